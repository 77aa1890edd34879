//! Binary-quartic root types, the twistor quartic type of a conformal
//! 3-structure, and para-CR frame diagnostics of projective 3-structures.

mod paracr;
mod quartic;

pub use paracr::{
    lie_bracket, paracr_frame, paracr_torsion_diagnostics, weyl_contraction, DiagnosticRow, ParaCrFrame, VectorField,
};
pub use quartic::{classify_quartic, QuarticCoefficients, RealRoot, RootPoint, RootType};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::affine::{Metric, WeylStructure};
use crate::confweyl::cotton;
use crate::error::GeomError;

#[derive(Clone, Debug, PartialEq)]
pub enum TwistorType {
    /// The quartic vanishes identically: `[g]` is conformally flat.
    Zero,
    /// A single real root of multiplicity four along the fiber direction.
    TypeN { root: RootPoint },
}

/// The twistor quartic type of a conformal 3-structure, decided by its Cotton tensor.
///
/// Only `C4` can be nonzero, so the quartic is `C4 a1⁴` with its root at `[0:1]`.
pub fn twistor_quartic_type(g: &Metric) -> Result<TwistorType, GeomError> {
    if g.dim() != 3 {
        return Err(GeomError::Dimension { got: g.dim(), requirement: "the twistor quartic is defined for n = 3" });
    }
    let y = cotton(&WeylStructure::metric_only(g.clone()))?;
    if y.is_zero() {
        return Ok(TwistorType::Zero);
    }
    let c = QuarticCoefficients([
        BigRational::zero(),
        BigRational::zero(),
        BigRational::zero(),
        BigRational::zero(),
        BigRational::one(),
    ]);
    match classify_quartic(&c) {
        RootType::Typed { real, .. } if real.len() == 1 => Ok(TwistorType::TypeN { root: real[0].point.clone() }),
        other => Err(GeomError::Invariant(format!("unexpected twistor quartic type {other:?}"))),
    }
}
