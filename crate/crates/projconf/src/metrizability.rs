//! Bridges between the conformal and projective pictures of one Weyl
//! structure: the map from conformal Rho `P` to projective Schouten `Q`, the
//! identities tying `C`, `W`, `P` and `Q` together, Weyl metrizability of a
//! projective class with respect to a given conformal class, and the conformal
//! Beltrami check.

use symkernel::Expr;

use crate::affine::{levi_civita, weyl_connection, Metric, WeylStructure};
use crate::confweyl::{conformal_curvature, conformal_obstruction, ConformalCurvature};
use crate::error::GeomError;
use crate::projective::{schouten_from_ricci, weyl_from_parts};
use crate::tensor::{Connection, Down, Tensor};

/// `Q_{ij} = 𝖯 g_{ij}/(n−1) + (n²−n−1)/(n²−1) P_{ij} − 1/(n²−1) P_{ji}`.
pub fn q_from_p(p: &Tensor, g: &Metric) -> Result<Tensor, GeomError> {
    let n = g.dim() as i64;
    if n < 3 {
        return Err(GeomError::Dimension { got: n as usize, requirement: "the Q–P map needs n >= 3" });
    }
    let trace = &g.trace(p) * &Expr::frac(1, n - 1);
    let a = Expr::frac(n * n - n - 1, n * n - 1);
    let b = Expr::frac(-1, n * n - 1);
    Ok(Tensor::from_fn(p.chart(), &[Down, Down], |ix| {
        let (i, j) = (ix[0], ix[1]);
        &(&(&trace * g.get(i, j)) + &(&a * p.get(&[i, j]))) + &(&b * p.get(&[j, i]))
    }))
}

/// Conformal Rho, its trace, and the projective Schouten tensor of the same
/// Weyl connection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QpPair {
    pub p: Tensor,
    pub q: Tensor,
    pub trace: Expr,
}

pub fn qp_pair(w: &WeylStructure) -> Result<QpPair, GeomError> {
    let cc = conformal_curvature(w)?;
    let q = schouten_from_ricci(&cc.curvature.ricci);
    let trace = w.metric.trace(&cc.rho.p);
    Ok(QpPair { p: cc.rho.p, q, trace })
}

/// `Q(∇) − q_from_p(P(∇))` for the Weyl connection `∇`.
pub fn verify_qp_identity(w: &WeylStructure) -> Result<Tensor, GeomError> {
    let pair = qp_pair(w)?;
    pair.q.sub(&q_from_p(&pair.p, &w.metric)?)
}

/// `W_{ijkl} = g_{im} W^m_{jkl}` for the projective Weyl tensor of the Weyl connection.
fn lowered_projective_weyl(cc: &ConformalCurvature, g: &Metric) -> Result<Tensor, GeomError> {
    let q = schouten_from_ricci(&cc.curvature.ricci);
    weyl_from_parts(&cc.curvature.riemann, &q).lower(0, g)
}

/// Coefficients `(a, b)` of the right-hand side of the W-trace identity,
/// `a P_{[ik]} + b (𝖯 g_{ik} − n P_{(ik)})`.
pub fn w_trace_coefficients(n: usize) -> (Expr, Expr) {
    let n = n as i64;
    (Expr::frac(4 - n * n, 2 * (n + 1)), Expr::frac(n - 2, 2 * (n - 1)))
}

/// `g^{jl} W_{(ij)kl} − a P_{[ik]} − b (𝖯 g_{ik} − n P_{(ik)})`, with
/// weight-½ symmetrization and `(a, b)` supplied by the caller.
pub fn w_trace_residual_with(w: &WeylStructure, a: &Expr, b: &Expr) -> Result<Tensor, GeomError> {
    let n = w.dim();
    if n < 3 {
        return Err(GeomError::Dimension { got: n, requirement: "the W-trace identity needs n >= 3" });
    }
    let cc = conformal_curvature(w)?;
    let g = &w.metric;
    let wl = lowered_projective_weyl(&cc, g)?;
    let p = &cc.rho.p;
    let trace = g.trace(p);
    let half = Expr::frac(1, 2);
    let nn = Expr::int(n as i64);
    Ok(Tensor::from_fn(p.chart(), &[Down, Down], |ix| {
        let (i, k) = (ix[0], ix[1]);
        let mut lhs = Expr::zero();
        for j in 0..n {
            for l in 0..n {
                let gjl = g.inv(j, l);
                if gjl.is_zero() {
                    continue;
                }
                let s = wl.get(&[i, j, k, l]) + wl.get(&[j, i, k, l]);
                lhs += &(gjl * &s);
            }
        }
        lhs = &lhs * &half;
        let alt = &(p.get(&[i, k]) - p.get(&[k, i])) * &half;
        let sym = &(p.get(&[i, k]) + p.get(&[k, i])) * &half;
        let rhs = &(a * &alt) + &(b * &(&(&trace * g.get(i, k)) - &(&nn * &sym)));
        &lhs - &rhs
    }))
}

pub fn verify_w_trace_identity(w: &WeylStructure) -> Result<Tensor, GeomError> {
    let (a, b) = w_trace_coefficients(w.dim());
    w_trace_residual_with(w, &a, &b)
}

/// Residual of the `(k,l)`-antisymmetrized relation between `C`, `W`, `P`
/// and `Q`, all lowered with `g`:
///
/// ```text
/// C_{ijkl} − W_{ijkl} + 2 A_{ij[kl]} − 2 B_{ij[kl]}
/// A_{ijkl} = g_{il} P_{jk} − g_{jl} P_{ik} + g_{ij} P_{lk}
/// B_{ijkl} = −g_{ik} Q_{jl} + g_{ij} Q_{lk}
/// ```
///
/// `Q` is taken from [`q_from_p`], so the residual also exercises the Q–P map.
pub fn verify_cwqp_identity(w: &WeylStructure) -> Result<Tensor, GeomError> {
    let n = w.dim();
    if n < 4 {
        return Err(GeomError::Dimension { got: n, requirement: "the C–W–Q–P relation degenerates for n = 3" });
    }
    let cc = conformal_curvature(w)?;
    let g = &w.metric;
    let c = cc.weyl.lower(0, g)?;
    let wl = lowered_projective_weyl(&cc, g)?;
    let p = &cc.rho.p;
    let q = q_from_p(p, g)?;
    let a_term = |i: usize, j: usize, k: usize, l: usize| -> Expr {
        &(&(g.get(i, l) * p.get(&[j, k])) - &(g.get(j, l) * p.get(&[i, k]))) + &(g.get(i, j) * p.get(&[l, k]))
    };
    let b_term = |i: usize, j: usize, k: usize, l: usize| -> Expr {
        &(g.get(i, j) * q.get(&[l, k])) - &(g.get(i, k) * q.get(&[j, l]))
    };
    Ok(Tensor::from_fn(p.chart(), &[Down, Down, Down, Down], |ix| {
        let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
        let mut e = c.get(ix) - wl.get(ix);
        e += &(&a_term(i, j, k, l) - &a_term(i, j, l, k));
        e -= &(&b_term(i, j, k, l) - &b_term(i, j, l, k));
        e
    }))
}

/// A Weyl structure `(g, β)` and a covector `f` realizing a projective class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metrization {
    pub beta: Vec<Expr>,
    pub f: Vec<Expr>,
}

/// Finds `(β, f)` with `weyl_connection(g, β) = rep + δf + δf`, if they exist.
///
/// Writing `D = LC(g) − rep`, the condition reads
/// `D^i_{jk} = δ^i_j u_k + δ^i_k u_j − g_{jk} β^i` with `u = β + f`. Its two
/// traces determine `u` and `β`; the full condition is then zero-tested.
pub fn weyl_metrizable_with(rep: &Connection, g: &Metric) -> Result<Option<Metrization>, GeomError> {
    if rep.chart().base_chart() != g.chart().base_chart() {
        return Err(GeomError::ChartMismatch);
    }
    let n = g.dim();
    let lc = levi_civita(g)?;
    let d = lc.sub(rep)?;
    let t: Vec<Expr> = (0..n).map(|k| (0..n).map(|i| d.get(&[i, i, k]).clone()).sum()).collect();
    let s: Vec<Expr> = (0..n)
        .map(|k| {
            let mut acc = Expr::zero();
            for i in 0..n {
                let gki = g.get(k, i);
                if gki.is_zero() {
                    continue;
                }
                for j in 0..n {
                    for l in 0..n {
                        let w = g.inv(j, l);
                        if !w.is_zero() {
                            acc += &(&(gki * w) * d.get(&[i, j, l]));
                        }
                    }
                }
            }
            acc
        })
        .collect();
    let ni = n as i64;
    let denom = Expr::frac(1, (ni + 2) * (ni - 1));
    let u: Vec<Expr> = (0..n).map(|k| &(&(&t[k] * &Expr::int(ni)) - &s[k]) * &denom).collect();
    let beta: Vec<Expr> =
        (0..n).map(|k| &(&(&t[k] * &Expr::int(2)) - &(&s[k] * &Expr::int(ni + 1))) * &denom).collect();
    let f: Vec<Expr> = u.iter().zip(&beta).map(|(u, b)| u - b).collect();
    let candidate = weyl_connection(&WeylStructure::new(g.clone(), beta.clone())?)?;
    let target = rep.projective_change(&f)?;
    Ok(if candidate.tensor().data() == target.tensor().data() { Some(Metrization { beta, f }) } else { None })
}

/// When the Weyl connection is projectively flat, `P_{(ij)} = c g_{ij}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PureTrace {
    pub c: Expr,
    pub constant: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeltramiVerdict {
    pub projectively_flat: bool,
    pub conformally_flat: bool,
    pub projective_weyl: Tensor,
    pub conformal_obstruction: Tensor,
    pub pure_trace: Option<PureTrace>,
}

/// Projective flatness of the Weyl connection against conformal flatness of
/// `[g]`; projective flatness must imply conformal flatness.
pub fn beltrami_check(w: &WeylStructure) -> Result<BeltramiVerdict, GeomError> {
    let n = w.dim();
    if n < 3 {
        return Err(GeomError::Dimension { got: n, requirement: "the Beltrami check needs n >= 3" });
    }
    let cc = conformal_curvature(w)?;
    let q = schouten_from_ricci(&cc.curvature.ricci);
    let projective_weyl = weyl_from_parts(&cc.curvature.riemann, &q);
    let projectively_flat = projective_weyl.is_zero();
    let conformal_obstruction = conformal_obstruction(&w.metric)?;
    let conformally_flat = conformal_obstruction.is_zero();
    if projectively_flat && !conformally_flat {
        return Err(GeomError::Invariant("projectively flat Weyl connection on a conformally curved class".into()));
    }
    let pure_trace = if projectively_flat {
        let p = &cc.rho.p;
        let c = &w.metric.trace(p) * &Expr::frac(1, n as i64);
        let half = Expr::frac(1, 2);
        for i in 0..n {
            for j in 0..n {
                let sym = &(p.get(&[i, j]) + p.get(&[j, i])) * &half;
                if sym != &c * w.metric.get(i, j) {
                    return Err(GeomError::Invariant(
                        "projectively flat Weyl connection with Rho not pure trace".into(),
                    ));
                }
            }
        }
        let constant = c.is_constant();
        Some(PureTrace { c, constant })
    } else {
        None
    };
    Ok(BeltramiVerdict { projectively_flat, conformally_flat, projective_weyl, conformal_obstruction, pure_trace })
}
