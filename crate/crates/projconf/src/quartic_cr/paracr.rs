//! The para-CR frame of a projective 3-structure on the correspondence space
//! with coordinates `(x0, x1, x2, p1, p2)`, and the bracket diagnostics that
//! detect the projective Weyl curvature.
//!
//! A point `p` of the fiber is the covector `ξ = dx0 − p1 dx1 − p2 dx2` up to
//! scale. With `X_a = ∂_a + p_a ∂_0`, the frame vector `v_a` lifts `X_a` so
//! that `ξ` is parallel along it:
//!
//! ```text
//! v_a = X_a − S(X_a, X_b) ∂_{p_b},    S(u, w) = ξ_m Γ^m_{kj} u^k w^j.
//! ```
//!
//! Since `S` is symmetric, `[v1, v2]` is vertical and equals
//! `−(Z_a + p_a Z_0) ∂_{p_a}` with `Z_j = ξ_m W^m_{jkl} X_1^k X_2^l`; all
//! non-Weyl parts of the curvature drop out because `ξ(X_a) = 0`.

use std::sync::Arc;

use num_rational::BigRational;
use symkernel::{Chart, Expr};

use crate::error::GeomError;
use crate::projective::projective_weyl;
use crate::tensor::{Connection, Tensor};

/// A vector field on the correspondence space, one component per chart variable.
pub type VectorField = Vec<Expr>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParaCrFrame {
    chart: Arc<Chart>,
    pub v1: VectorField,
    pub v2: VectorField,
}

fn fibered_chart(conn: &Connection) -> Result<Arc<Chart>, GeomError> {
    if conn.dim() != 3 {
        return Err(GeomError::Dimension { got: conn.dim(), requirement: "para-CR frames need n = 3" });
    }
    if !conn.chart().has_fiber() {
        return Err(GeomError::MissingFiber);
    }
    Ok(conn.chart().clone())
}

/// `ξ = (1, −p1, −p2)` and the horizontal vectors `X_1, X_2` on the base.
fn contact_data(chart: &Chart) -> ([Expr; 3], [[Expr; 3]; 2]) {
    let p1 = Expr::var(chart.fiber_var(1));
    let p2 = Expr::var(chart.fiber_var(2));
    let xi = [Expr::one(), -p1.clone(), -p2.clone()];
    let x = [[p1, Expr::one(), Expr::zero()], [p2, Expr::zero(), Expr::one()]];
    (xi, x)
}

pub fn paracr_frame(conn: &Connection) -> Result<ParaCrFrame, GeomError> {
    let chart = fibered_chart(conn)?;
    let (xi, x) = contact_data(&chart);
    let s = |u: &[Expr; 3], w: &[Expr; 3]| -> Expr {
        let mut acc = Expr::zero();
        for m in 0..3 {
            for k in 0..3 {
                if u[k].is_zero() {
                    continue;
                }
                for j in 0..3 {
                    let g = conn.get(m, k, j);
                    if !g.is_zero() && !w[j].is_zero() {
                        acc += &(&(&(g * &xi[m]) * &u[k]) * &w[j]);
                    }
                }
            }
        }
        acc
    };
    let lift = |a: usize| -> VectorField {
        let mut v: VectorField = x[a].to_vec();
        v.push(-s(&x[a], &x[0]));
        v.push(-s(&x[a], &x[1]));
        v
    };
    let (v1, v2) = (lift(0), lift(1));
    for e in v1.iter().chain(&v2) {
        chart.check_degree(e)?;
    }
    Ok(ParaCrFrame { chart, v1, v2 })
}

impl ParaCrFrame {
    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    /// `θ(v) = v^0 − p1 v^1 − p2 v^2` for both frame vectors.
    pub fn contact_values(&self) -> [Expr; 2] {
        let (xi, _) = contact_data(&self.chart);
        [&self.v1, &self.v2].map(|v| (0..3).map(|i| &xi[i] * &v[i]).sum())
    }

    /// The other Lagrangian distribution, spanned by `∂_{p1}` and `∂_{p2}`.
    pub fn fiber_distribution(&self) -> [VectorField; 2] {
        let n = self.chart.num_vars();
        [1, 2].map(|a| {
            let lane = self.chart.fiber_var(a);
            (0..n).map(|i| if i == lane { Expr::one() } else { Expr::zero() }).collect()
        })
    }

    pub fn bracket(&self) -> VectorField {
        lie_bracket(&self.v1, &self.v2)
    }

    /// `[v1, v2] − a v1 − b v2`, with `a, b` read off the `∂_1, ∂_2` components;
    /// zero exactly when the bracket lies in the span of the frame.
    pub fn defect(&self) -> VectorField {
        let br = self.bracket();
        let (a, b) = (br[1].clone(), br[2].clone());
        br.iter().zip(&self.v1).zip(&self.v2).map(|((c, u), w)| &(c - &(&a * u)) - &(&b * w)).collect()
    }
}

/// `[u, w]^c = u^d ∂_d w^c − w^d ∂_d u^c`.
pub fn lie_bracket(u: &[Expr], w: &[Expr]) -> VectorField {
    (0..u.len())
        .map(|c| {
            let mut acc = Expr::zero();
            for d in 0..u.len() {
                if !u[d].is_zero() {
                    acc += &(&u[d] * &w[c].diff(d));
                }
                if !w[d].is_zero() {
                    acc -= &(&w[d] * &u[c].diff(d));
                }
            }
            acc
        })
        .collect()
}

/// The predicted `∂_{p1}, ∂_{p2}` components of `[v1, v2]`: `−(Z_a + p_a Z_0)`.
pub fn weyl_contraction(w: &Tensor, chart: &Chart) -> [Expr; 2] {
    let (xi, x) = contact_data(chart);
    let z: Vec<Expr> = (0..3)
        .map(|j| {
            let mut acc = Expr::zero();
            for m in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let e = w.get(&[m, j, k, l]);
                        if !e.is_zero() && !x[0][k].is_zero() && !x[1][l].is_zero() {
                            acc += &(&(&(e * &xi[m]) * &x[0][k]) * &x[1][l]);
                        }
                    }
                }
            }
            acc
        })
        .collect();
    [0, 1].map(|a| -(&z[a + 1] + &(&x[a][0] * &z[0])))
}

/// One sample row of the torsion diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticRow {
    /// `(x0, x1, x2, p1, p2)`.
    pub point: Vec<BigRational>,
    /// The `∂_{x0}, ∂_{p1}, ∂_{p2}` components of the defect.
    pub defect_values: Vec<BigRational>,
    /// `W^0_{112}` and `W^0_{212}` at the base point.
    pub weyl_components: [BigRational; 2],
    /// The Weyl contraction predicted for the `∂_{p1}, ∂_{p2}` defect components.
    pub contraction: [BigRational; 2],
    /// Whether the defect and the two Weyl components vanish together.
    pub covanish: bool,
}

impl DiagnosticRow {
    /// The defect agrees with the Weyl contraction and has no `∂_{x0}` part.
    pub fn matches_contraction(&self) -> bool {
        use num_traits::Zero;
        self.defect_values[0].is_zero() && self.defect_values[1..] == self.contraction[..]
    }
}

pub fn paracr_torsion_diagnostics(
    conn: &Connection,
    samples: &[Vec<BigRational>],
) -> Result<Vec<DiagnosticRow>, GeomError> {
    use num_traits::Zero;
    let frame = paracr_frame(conn)?;
    let chart = frame.chart.clone();
    let defect = frame.defect();
    let w = projective_weyl(conn)?;
    let predicted = weyl_contraction(&w, &chart);
    let lanes = [0, chart.fiber_var(1), chart.fiber_var(2)];
    let mut rows = Vec::with_capacity(samples.len());
    for point in samples {
        if point.len() != chart.num_vars() {
            return Err(GeomError::Shape { expected: chart.num_vars(), got: point.len() });
        }
        let defect_values = lanes.iter().map(|&l| defect[l].eval(point)).collect::<Result<Vec<_>, _>>()?;
        let weyl_components = [w.get(&[0, 1, 1, 2]).eval(point)?, w.get(&[0, 2, 1, 2]).eval(point)?];
        let contraction = [predicted[0].eval(point)?, predicted[1].eval(point)?];
        let defect_zero = defect_values.iter().all(Zero::is_zero);
        let weyl_zero = weyl_components.iter().all(Zero::is_zero);
        rows.push(DiagnosticRow {
            point: point.clone(),
            defect_values,
            weyl_components,
            contraction,
            covanish: defect_zero == weyl_zero,
        });
    }
    Ok(rows)
}
