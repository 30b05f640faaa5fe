//! Swing assessment from racquet motion capture.
//!
//! The pipeline turns a 22-marker motion clip into a 12-value spatial pattern
//! and classifies it with a Gaussian RBF network:
//!
//! 1. [`mocap`] parses clips, ROIs and per-criterion labels.
//! 2. [`kinematics`] computes the racquet's virtual sweet-spot marker, its
//!    gradient vector flow and the vector tips.
//! 3. [`features`] projects both curves onto the sagittal and transverse
//!    planes and compresses each projection into quadratic coefficients.
//! 4. [`rbf`] trains and runs the classifier.
//! 5. [`eval`] runs repeated leave-one-out cross-validation and hidden-unit
//!    sweeps.
//!
//! [`synth`] generates labelled synthetic swings with known ground truth and
//! [`viewer`] builds the JSON bundles consumed by the replay/labelling UI.

pub mod eval;
pub mod features;
pub mod fsutil;
pub mod kinematics;
pub mod mocap;
pub mod pipeline;
pub mod rbf;
pub mod seed;
pub mod synth;
pub mod viewer;

pub use features::{FeatureVector, FEATURE_DIM};
pub use mocap::{Label, LabelRecord, Point3, RoiSpec, SourceConvention, SwingClip};
