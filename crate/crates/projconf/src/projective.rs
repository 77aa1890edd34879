//! Projective structures: Thomas symbols, projective equivalence, the
//! projective Schouten and Weyl tensors, and the dictionary with pairs of
//! second-order ODEs in dimension 3.
//!
//! The projective Schouten tensor `Q` is normalized so that
//!
//! ```text
//! W^i_{jkl} = R^i_{jkl} + δ^i_k Q_{jl} − δ^i_l Q_{jk} + 2 Q_{[kl]} δ^i_j
//! ```
//!
//! is trace-free, which forces `Q_{(jl)} = −R_{(jl)}/(n−1)` and
//! `Q_{[jl]} = −R_{[jl]}/(n+1)`. On the unit round sphere `Q = −g`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use symkernel::{Chart, Expr, Monomial};

use crate::affine::{curvature, Curvature};
use crate::error::GeomError;
use crate::linalg;
use crate::tensor::{Connection, Down, Tensor, Up};

/// Trace-free representative `Π` of a projective class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThomasSymbols {
    pi: Connection,
}

impl ThomasSymbols {
    pub fn get(&self, i: usize, j: usize, k: usize) -> &Expr {
        self.pi.get(i, j, k)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.pi.chart()
    }

    /// `Π` viewed as a connection in its own right.
    pub fn as_connection(&self) -> &Connection {
        &self.pi
    }

    pub fn tensor(&self) -> &Tensor {
        self.pi.tensor()
    }
}

fn inv_n_plus_1(n: usize) -> Expr {
    Expr::frac(1, n as i64 + 1)
}

/// `Π^i_{jk} = Γ^i_{jk} − (Γ^l_{lk} δ^i_j + Γ^l_{lj} δ^i_k)/(n+1)`.
pub fn thomas(conn: &Connection) -> ThomasSymbols {
    let w = inv_n_plus_1(conn.dim());
    let f: Vec<Expr> = conn.trace().iter().map(|t| -(t * &w)).collect();
    ThomasSymbols { pi: conn.projective_change(&f).expect("trace has length n") }
}

/// The covector `f` with `b = a + δf + δf`, if one exists.
pub fn projectively_equivalent(a: &Connection, b: &Connection) -> Result<Option<Vec<Expr>>, GeomError> {
    if a.chart().base_chart() != b.chart().base_chart() {
        return Err(GeomError::ChartMismatch);
    }
    let w = inv_n_plus_1(a.dim());
    let f: Vec<Expr> = a.trace().iter().zip(b.trace()).map(|(ta, tb)| &(&tb - ta) * &w).collect();
    let shifted = a.projective_change(&f)?;
    Ok(if shifted.tensor().data() == b.tensor().data() { Some(f) } else { None })
}

/// `Q` from a Ricci tensor, in dimension `n`.
pub fn schouten_from_ricci(ricci: &Tensor) -> Tensor {
    let n = ricci.dim() as i64;
    let sym = Expr::frac(-1, n - 1);
    let alt = Expr::frac(-1, n + 1);
    Tensor::from_fn(ricci.chart(), &[Down, Down], |ix| {
        let (a, b) = (ricci.get(&[ix[0], ix[1]]), ricci.get(&[ix[1], ix[0]]));
        let half = Expr::frac(1, 2);
        let s = &(a + b) * &half;
        let t = &(a - b) * &half;
        &(&s * &sym) + &(&t * &alt)
    })
}

/// `R^i_{jkl} + δ^i_k Q_{jl} − δ^i_l Q_{jk} + 2 Q_{[kl]} δ^i_j`.
pub fn weyl_from_parts(riemann: &Tensor, q: &Tensor) -> Tensor {
    Tensor::from_fn(riemann.chart(), &[Up, Down, Down, Down], |ix| {
        let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
        let mut e = riemann.get(ix).clone();
        if i == k {
            e += q.get(&[j, l]);
        }
        if i == l {
            e -= q.get(&[j, k]);
        }
        if i == j {
            e += q.get(&[k, l]);
            e -= q.get(&[l, k]);
        }
        e
    })
}

/// Curvature of a connection together with its projective decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectiveCurvature {
    pub curvature: Curvature,
    pub schouten: Tensor,
    pub weyl: Tensor,
}

pub fn projective_curvature(conn: &Connection) -> Result<ProjectiveCurvature, GeomError> {
    let curvature = curvature(conn)?;
    let schouten = schouten_from_ricci(&curvature.ricci);
    let weyl = weyl_from_parts(&curvature.riemann, &schouten);
    weyl.check_degree()?;
    Ok(ProjectiveCurvature { curvature, schouten, weyl })
}

pub fn projective_schouten(conn: &Connection) -> Result<Tensor, GeomError> {
    Ok(projective_curvature(conn)?.schouten)
}

pub fn projective_weyl(conn: &Connection) -> Result<Tensor, GeomError> {
    Ok(projective_curvature(conn)?.weyl)
}

/// The trace `W^i_{jil}` and the lower antisymmetrization `W^i_{[jkl]}`;
/// both vanish for a genuine projective Weyl tensor.
pub fn weyl_trace_residuals(w: &Tensor) -> Result<(Tensor, Tensor), GeomError> {
    Ok((w.contract(0, 2)?, w.antisymmetrize(&[1, 2, 3])?))
}

/// Right-hand sides of `d²x^a/d(x⁰)² = F^a(x, p)` for `a = 1, 2`, with `p^a = dx^a/dx⁰`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OdePair {
    chart: Arc<Chart>,
    f: [Expr; 2],
}

impl OdePair {
    /// `chart` must carry fiber variables.
    pub fn new(chart: &Arc<Chart>, f1: Expr, f2: Expr) -> Result<OdePair, GeomError> {
        if !chart.has_fiber() {
            return Err(GeomError::MissingFiber);
        }
        Ok(OdePair { chart: chart.clone(), f: [f1, f2] })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    /// `F^a` for `a` in `{1, 2}`.
    pub fn rhs(&self, a: usize) -> &Expr {
        &self.f[a - 1]
    }
}

fn require_dim3(n: usize) -> Result<(), GeomError> {
    if n != 3 {
        return Err(GeomError::Dimension { got: n, requirement: "the ODE correspondence needs n = 3" });
    }
    Ok(())
}

/// `F^a = −Γ^a_{jk} p^j p^k + p^a Γ^0_{jk} p^j p^k` with `p^0 = 1`.
pub fn odes_from_connection(conn: &Connection) -> Result<OdePair, GeomError> {
    require_dim3(conn.dim())?;
    let chart = Arc::new(conn.chart().fibered()?);
    let p: Vec<Expr> = (0..3).map(|j| if j == 0 { Expr::one() } else { Expr::var(chart.fiber_var(j)) }).collect();
    let quad = |i: usize| -> Expr {
        let mut acc = Expr::zero();
        for j in 0..3 {
            for k in 0..3 {
                let g = conn.get(i, j, k);
                if !g.is_zero() {
                    acc += &(&(g * &p[j]) * &p[k]);
                }
            }
        }
        acc
    };
    let q0 = quad(0);
    let f = [1, 2].map(|a| &(&p[a] * &q0) - &quad(a));
    for e in &f {
        chart.check_degree(e)?;
    }
    Ok(OdePair { chart, f })
}

/// Third fiber derivatives `F^i_{jkl}`, indexed `[i-1][j-1][k-1][l-1]`.
fn third_derivatives(odes: &OdePair) -> Vec<Vec<Vec<Vec<Expr>>>> {
    let c = &odes.chart;
    (1..=2)
        .map(|i| {
            (1..=2)
                .map(|j| {
                    let dj = odes.rhs(i).diff(c.fiber_var(j));
                    (1..=2)
                        .map(|k| {
                            let djk = dj.diff(c.fiber_var(k));
                            (1..=2).map(|l| djk.diff(c.fiber_var(l))).collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// `F^i_{jkl} − ¾ F^r_{r(jk} δ^i_{l)}` for every index choice, symmetrization
/// with weight one third.
pub fn projectivity_residual(odes: &OdePair) -> Vec<Expr> {
    let f = third_derivatives(odes);
    let tr = |j: usize, k: usize| -> Expr { &f[0][0][j][k] + &f[1][1][j][k] };
    let quarter = Expr::frac(1, 4);
    let mut out = Vec::with_capacity(16);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    // ¾ · ⅓ (t_{jk} δ_l + t_{kl} δ_j + t_{lj} δ_k)
                    let mut sym = Expr::zero();
                    if i == l {
                        sym += &tr(j, k);
                    }
                    if i == j {
                        sym += &tr(k, l);
                    }
                    if i == k {
                        sym += &tr(l, j);
                    }
                    out.push(&f[i][j][k][l] - &(&sym * &quarter));
                }
            }
        }
    }
    out
}

pub fn odepair_is_projective(odes: &OdePair) -> bool {
    projectivity_residual(odes).iter().all(Expr::is_zero)
}

/// Unknowns `Π^i_{jk}` with `j <= k`, in a fixed order.
fn unknowns() -> Vec<(usize, usize, usize)> {
    let mut v = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            for k in j..3 {
                v.push((i, j, k));
            }
        }
    }
    v
}

/// Fiber monomials of degree at most 3, in a fixed order.
fn fiber_monomials(chart: &Chart) -> Vec<Monomial> {
    let (a, b) = (chart.fiber_var(1), chart.fiber_var(2));
    let mut v = Vec::new();
    for d in 0..=3u32 {
        for e in 0..=d {
            v.push(Monomial::var(a, d - e) * Monomial::var(b, e));
        }
    }
    v
}

fn coefficients(e: &Expr, chart: &Chart) -> Result<BTreeMap<Monomial, Expr>, GeomError> {
    let parts = e.split_by_vars(chart.fiber_mask()).map_err(|_| GeomError::NonPolynomial)?;
    if let Some(d) = parts.keys().map(|m| m.degree()).max() {
        if d > 3 {
            return Err(GeomError::FiberDegree(d));
        }
    }
    Ok(parts)
}

/// The unique trace-free `Π` whose ODE pair is `odes`.
pub fn thomas_from_odes(odes: &OdePair) -> Result<ThomasSymbols, GeomError> {
    let chart = odes.chart.clone();
    let base = Arc::new(chart.base_chart());
    let targets = [coefficients(odes.rhs(1), &chart)?, coefficients(odes.rhs(2), &chart)?];
    let monos = fiber_monomials(&chart);
    let unknowns = unknowns();

    // Column u of the forward map: the ODE pair of the unit symbol at u.
    let mut matrix: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); unknowns.len()]; 2 * monos.len() + 3];
    for (col, &(i, j, k)) in unknowns.iter().enumerate() {
        let unit = Connection::from_entries(&base, &[(i, j, k, Expr::one())])?;
        let image = odes_from_connection(&unit)?;
        for a in 0..2 {
            let coeffs = coefficients(&image.f[a], &chart)?;
            for (row, m) in monos.iter().enumerate() {
                if let Some(c) = coeffs.get(m) {
                    matrix[a * monos.len() + row][col] = c.as_rational().expect("unit image has constant coefficients");
                }
            }
        }
        // Trace rows: Π^l_{lk} = 0 for each k.
        for t in 0..3 {
            // Π^i_{jk} and Π^i_{kj} share one unknown; count each distinct slot once.
            let hits = if j == k {
                usize::from(i == j && k == t)
            } else {
                usize::from(i == j && k == t) + usize::from(i == k && j == t)
            };
            if hits > 0 {
                matrix[2 * monos.len() + t][col] += BigRational::from_integer(hits.into());
            }
        }
    }
    let mut rhs = Vec::with_capacity(matrix.len());
    for target in &targets {
        for m in &monos {
            rhs.push(target.get(m).cloned().unwrap_or_else(Expr::zero));
        }
    }
    rhs.extend(std::iter::repeat_n(Expr::zero(), 3));
    let solution = linalg::solve_rational(&matrix, &rhs).ok_or(GeomError::NonProjective)?;
    let mut entries = Vec::with_capacity(unknowns.len());
    for (&(i, j, k), value) in unknowns.iter().zip(solution) {
        entries.push((i, j, k, value));
    }
    let pi = Connection::from_entries(&base, &entries)?;
    if odes_from_connection(&pi)?.f != odes.f {
        return Err(GeomError::NonProjective);
    }
    Ok(ThomasSymbols { pi })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart3() -> Arc<Chart> {
        Arc::new(Chart::new(3).unwrap())
    }

    #[test]
    fn thomas_of_single_symbol() {
        let c = chart3();
        let g = Connection::from_entries(&c, &[(0, 0, 0, Expr::one())]).unwrap();
        let pi = thomas(&g);
        assert_eq!(pi.get(0, 0, 0), &Expr::frac(1, 2));
        assert_eq!(pi.get(1, 1, 0), &Expr::frac(-1, 4));
        assert_eq!(pi.get(2, 0, 2), &Expr::frac(-1, 4));
        assert_eq!(pi.tensor().nonzero_entries().len(), 5);
    }

    #[test]
    fn odes_of_single_symbols() {
        let c = chart3();
        let g = Connection::from_entries(&c, &[(0, 1, 1, Expr::one())]).unwrap();
        let o = odes_from_connection(&g).unwrap();
        let fc = o.chart().clone();
        assert_eq!(o.rhs(1), &fc.parse("p1^3").unwrap());
        assert_eq!(o.rhs(2), &fc.parse("p1^2*p2").unwrap());
        let g = Connection::from_entries(&c, &[(1, 0, 0, Expr::one())]).unwrap();
        let o = odes_from_connection(&g).unwrap();
        assert_eq!(o.rhs(1), &Expr::int(-1));
        assert!(o.rhs(2).is_zero());
    }

    #[test]
    fn quartic_rhs_is_not_projective() {
        let fc = Arc::new(chart3().fibered().unwrap());
        let o = OdePair::new(&fc, fc.parse("p1^4").unwrap(), Expr::zero()).unwrap();
        assert!(!odepair_is_projective(&o));
        assert_eq!(thomas_from_odes(&o), Err(GeomError::FiberDegree(4)));
        let o = OdePair::new(&fc, fc.parse("p1^2*p2").unwrap(), Expr::zero()).unwrap();
        assert!(!odepair_is_projective(&o));
        assert_eq!(thomas_from_odes(&o), Err(GeomError::NonProjective));
        let o = OdePair::new(&fc, fc.parse("1/(1+p1)").unwrap(), Expr::zero()).unwrap();
        assert_eq!(thomas_from_odes(&o), Err(GeomError::NonPolynomial));
    }
}
