//! Clip + ROI to features, keeping the intermediate kinematics.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{assemble_features, FeatureError, FeatureVector};
use crate::kinematics::{
    compute_vector_tips, gradient_flow, sweet_spot_from_clip, GradientFlow, KinematicsError,
    SweetSpotMethod, TipPath, VirtualMarkerPath,
};
use crate::mocap::{slice_roi, MocapError, RoiSpec, SwingClip};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Mocap(#[from] MocapError),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error(transparent)]
    Features(#[from] FeatureError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwingKinematics {
    pub roi: RoiSpec,
    pub path: VirtualMarkerPath,
    pub flow: GradientFlow,
    pub tips: TipPath,
    pub features: FeatureVector,
}

/// Runs the whole feature extraction for one swing. The swing id is the clip id.
pub fn extract_swing(
    clip: &SwingClip,
    roi: &RoiSpec,
    method: SweetSpotMethod,
) -> Result<SwingKinematics, PipelineError> {
    let swing = slice_roi(clip, roi)?;
    let path = sweet_spot_from_clip(&swing, method)?;
    let flow = gradient_flow(&path)?;
    let tips = compute_vector_tips(&path, &flow)?;
    let features = assemble_features(clip.clip_id(), &path, &tips)?;
    Ok(SwingKinematics {
        roi: roi.clone(),
        path,
        flow,
        tips,
        features,
    })
}
