//! Conformal invariants of Weyl structures: the Rho tensor, the Cotton
//! tensor, the conformal Weyl tensor, conformal flatness and the
//! Einstein–Weyl condition.
//!
//! Rho follows the sign convention in which the unit round sphere has
//! `P = −½ g`. It is the unique `P` making
//!
//! ```text
//! C^i_{jkl} = R^i_{jkl} + δ^i_k P_{jl} − δ^i_l P_{jk} + g_{jl} P^i_k − g_{jk} P^i_l + 2 P_{[kl]} δ^i_j
//! ```
//!
//! trace-free, where `R` is the curvature of the Weyl connection. Solving the
//! trace conditions gives, with `R = g^{jl} R_{jl}`,
//!
//! ```text
//! P_{(jl)} = −(R_{(jl)} − R g_{jl} / (2(n−1))) / (n−2),    P_{[jl]} = −R_{[jl]} / n.
//! ```

use crate::affine::{curvature, weyl_connection, Curvature, Metric, WeylStructure};
use crate::error::GeomError;
use crate::tensor::{Connection, Down, Tensor, Up};
use symkernel::Expr;

/// How a Rho tensor was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RhoProvenance {
    /// `β = 0`: the metric formula applied to the Levi-Civita Ricci tensor.
    ClosedFormula,
    /// General Weyl structure: solved from the trace conditions on `C`.
    TraceSolve,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConformalRho {
    pub p: Tensor,
    pub provenance: RhoProvenance,
}

impl ConformalRho {
    /// `𝖯 = g^{kl} P_{kl}`.
    pub fn trace(&self, g: &Metric) -> Expr {
        g.trace(&self.p)
    }
}

fn require_dim(n: usize, min: usize, requirement: &'static str) -> Result<(), GeomError> {
    if n < min {
        return Err(GeomError::Dimension { got: n, requirement });
    }
    Ok(())
}

/// Rho from the Ricci tensor of a connection compatible with `g`.
pub fn rho_from_ricci(ricci: &Tensor, g: &Metric) -> Tensor {
    let n = g.dim() as i64;
    let scalar = g.trace(ricci);
    let half = Expr::frac(1, 2);
    let sym_w = Expr::frac(-1, n - 2);
    let alt_w = Expr::frac(-1, n);
    let r_term = &scalar * &Expr::frac(1, 2 * (n - 1));
    Tensor::from_fn(ricci.chart(), &[Down, Down], |ix| {
        let (a, b) = (ricci.get(&[ix[0], ix[1]]), ricci.get(&[ix[1], ix[0]]));
        let sym = &(a + b) * &half;
        let alt = &(a - b) * &half;
        let sym_part = &(&sym - &(&r_term * g.get(ix[0], ix[1]))) * &sym_w;
        &sym_part + &(&alt * &alt_w)
    })
}

/// The conformal Weyl tensor `C^i_{jkl}` built from curvature and Rho.
pub fn conformal_weyl_from_parts(riemann: &Tensor, p: &Tensor, g: &Metric) -> Result<Tensor, GeomError> {
    let p_up = p.raise(0, g)?;
    Ok(Tensor::from_fn(riemann.chart(), &[Up, Down, Down, Down], |ix| {
        let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
        let mut e = riemann.get(ix).clone();
        if i == k {
            e += p.get(&[j, l]);
        }
        if i == l {
            e -= p.get(&[j, k]);
        }
        let gjl = g.get(j, l);
        if !gjl.is_zero() {
            e += &(gjl * p_up.get(&[i, k]));
        }
        let gjk = g.get(j, k);
        if !gjk.is_zero() {
            e -= &(gjk * p_up.get(&[i, l]));
        }
        if i == j {
            e += p.get(&[k, l]);
            e -= p.get(&[l, k]);
        }
        e
    }))
}

/// Connection, curvature, Rho and conformal Weyl tensor of one Weyl structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConformalCurvature {
    pub connection: Connection,
    pub curvature: Curvature,
    pub rho: ConformalRho,
    pub weyl: Tensor,
}

pub fn conformal_curvature(w: &WeylStructure) -> Result<ConformalCurvature, GeomError> {
    require_dim(w.dim(), 3, "conformal Rho needs n >= 3")?;
    let connection = weyl_connection(w)?;
    let curvature = curvature(&connection)?;
    let p = rho_from_ricci(&curvature.ricci, &w.metric);
    p.check_degree()?;
    let provenance = if w.is_levi_civita() { RhoProvenance::ClosedFormula } else { RhoProvenance::TraceSolve };
    let weyl = conformal_weyl_from_parts(&curvature.riemann, &p, &w.metric)?;
    Ok(ConformalCurvature { connection, curvature, rho: ConformalRho { p, provenance }, weyl })
}

pub fn conformal_rho(w: &WeylStructure) -> Result<ConformalRho, GeomError> {
    Ok(conformal_curvature(w)?.rho)
}

/// `Y_{ijk} = ∇_j P_{ik} − ∇_k P_{ij}` in the Weyl connection.
pub fn cotton_from_parts(p: &Tensor, conn: &Connection) -> Result<Tensor, GeomError> {
    let dp = p.covariant_derivative(conn)?;
    let y = Tensor::from_fn(p.chart(), &[Down, Down, Down], |ix| {
        let (i, j, k) = (ix[0], ix[1], ix[2]);
        dp.get(&[i, k, j]) - dp.get(&[i, j, k])
    });
    y.check_degree()?;
    Ok(y)
}

pub fn cotton(w: &WeylStructure) -> Result<Tensor, GeomError> {
    let cc = conformal_curvature(w)?;
    cotton_from_parts(&cc.rho.p, &cc.connection)
}

/// Components `Y(e_a, e_b, e_c)` of a covariant tensor in a chosen frame,
/// where `frame[a]` lists the coordinate components of `e_a`.
pub fn frame_components(t: &Tensor, frame: &[Vec<Expr>]) -> Result<Tensor, GeomError> {
    let n = t.dim();
    if frame.len() != n || frame.iter().any(|e| e.len() != n) {
        return Err(GeomError::Shape { expected: n, got: frame.len() });
    }
    if let Some(slot) = t.slots().iter().position(|v| *v != Down) {
        return Err(GeomError::Variance { slot });
    }
    let rank = t.rank();
    Tensor::try_from_fn(t.chart(), t.slots(), |ab| {
        let mut acc = Expr::zero();
        for ix in crate::tensor::multi_indices(n, rank) {
            let entry = t.get(&ix);
            if entry.is_zero() {
                continue;
            }
            let mut term = entry.clone();
            for (s, &a) in ab.iter().enumerate() {
                term = &term * &frame[a][ix[s]];
            }
            acc += &term;
        }
        Ok(acc)
    })
}

/// The conformal Weyl tensor of a metric; needs `n >= 4`.
pub fn conformal_weyl_tensor(g: &Metric) -> Result<Tensor, GeomError> {
    require_dim(g.dim(), 4, "the conformal Weyl tensor is only an obstruction for n >= 4")?;
    Ok(conformal_curvature(&WeylStructure::metric_only(g.clone()))?.weyl)
}

/// The tensor whose vanishing decides conformal flatness: Cotton in
/// dimension 3, the conformal Weyl tensor above.
pub fn conformal_obstruction(g: &Metric) -> Result<Tensor, GeomError> {
    require_dim(g.dim(), 3, "conformal flatness is decided for n >= 3")?;
    if g.dim() == 3 {
        cotton(&WeylStructure::metric_only(g.clone()))
    } else {
        conformal_weyl_tensor(g)
    }
}

pub fn conformally_flat(g: &Metric) -> Result<bool, GeomError> {
    Ok(conformal_obstruction(g)?.is_zero())
}

/// Trace-free part of `Sym(Ric)` with respect to `g`, from a Ricci tensor.
pub fn einstein_weyl_residual(ricci: &Tensor, g: &Metric) -> Tensor {
    let n = g.dim() as i64;
    let mean = &g.trace(ricci) * &Expr::frac(1, n);
    let half = Expr::frac(1, 2);
    Tensor::from_fn(ricci.chart(), &[Down, Down], |ix| {
        let sym = &(ricci.get(&[ix[0], ix[1]]) + ricci.get(&[ix[1], ix[0]])) * &half;
        &sym - &(&mean * g.get(ix[0], ix[1]))
    })
}

/// Whether `Sym(Ric) = f g` for the Weyl connection, with the residual.
pub fn einstein_weyl(w: &WeylStructure) -> Result<(bool, Tensor), GeomError> {
    let conn = weyl_connection(w)?;
    let ricci = curvature(&conn)?.ricci;
    let residual = einstein_weyl_residual(&ricci, &w.metric);
    Ok((residual.is_zero(), residual))
}
