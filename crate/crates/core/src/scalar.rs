//! Scalar abstraction for the geometric and physical layer.

use num_traits::{Float, FromPrimitive, NumCast};
use std::fmt::{Debug, Display};

/// Floating point type usable for coordinates and signal strengths.
pub trait Real: Float + FromPrimitive + NumCast + Debug + Display + Default + Send + Sync + 'static {
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        NumCast::from(self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
