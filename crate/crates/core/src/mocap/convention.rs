use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{MocapError, Point3};

/// Axis convention of a source file.
///
/// Every variant is a proper rotation (or identity) onto the canonical frame,
/// so conversion preserves norms and has an exact inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceConvention {
    /// Already X forward, Y lateral, Z up.
    #[default]
    Canonical,
    /// Right-handed lab export with Z up, Y forward and X to the right.
    RhXyzZup,
    /// Left-handed XZY layout: `(x, y, z)` maps to `(x, z, -y)`.
    LhXzy,
}

impl SourceConvention {
    pub const ALL: [SourceConvention; 3] = [
        SourceConvention::Canonical,
        SourceConvention::RhXyzZup,
        SourceConvention::LhXzy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SourceConvention::Canonical => "canonical",
            SourceConvention::RhXyzZup => "rh-xyz-zup",
            SourceConvention::LhXzy => "lh-xzy",
        }
    }

    /// Maps a source-frame point onto the canonical frame.
    pub fn to_canonical(self, [x, y, z]: Point3) -> Point3 {
        match self {
            SourceConvention::Canonical => [x, y, z],
            SourceConvention::RhXyzZup => [y, -x, z],
            SourceConvention::LhXzy => [x, z, -y],
        }
    }

    /// Inverse of [`to_canonical`](Self::to_canonical).
    pub fn from_canonical(self, [x, y, z]: Point3) -> Point3 {
        match self {
            SourceConvention::Canonical => [x, y, z],
            SourceConvention::RhXyzZup => [-y, x, z],
            SourceConvention::LhXzy => [x, -z, y],
        }
    }
}

/// Free-function form used by the ingestion path.
pub fn convert_handedness(p: Point3, convention: SourceConvention) -> Point3 {
    convention.to_canonical(p)
}

impl fmt::Display for SourceConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SourceConvention {
    type Err = MocapError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SourceConvention::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| MocapError::UnknownConvention(s.to_owned()))
    }
}
