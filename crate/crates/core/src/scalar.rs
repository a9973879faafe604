//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive};
use serde::Serialize;

/// Real scalar type the correlation and measure routines are generic over.
///
/// Implemented for `f32` and `f64`. Sign relations and Φ indicators never
/// touch a scalar; only the continuous quantities (ρ, fits, measures) do.
pub trait Scalar:
    Float + FromPrimitive + FromStr + Debug + Display + Serialize + Send + Sync + 'static
{
    /// Lossy conversion used only for formatting and reporting.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(Self::nan)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
