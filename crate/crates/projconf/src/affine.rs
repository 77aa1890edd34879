//! Metrics, Weyl structures, Levi-Civita and Weyl connections, curvature, and
//! a numeric geodesic integrator.
//!
//! Curvature convention, fixed for the whole crate:
//!
//! ```text
//! R^i_{jkl} = ∂_k Γ^i_{lj} − ∂_l Γ^i_{kj} + Γ^i_{km} Γ^m_{lj} − Γ^i_{lm} Γ^m_{kj}
//! R_{jl}    = R^i_{jil}
//! ```
//!
//! With this choice the unit round sphere has `R_{jl} = (n − 1) g_{jl}`.

use std::sync::Arc;

use symkernel::{Chart, Expr};

use crate::error::GeomError;
use crate::linalg;
use crate::tensor::{Connection, Down, Tensor, Up};

/// The sign tag carried alongside a metric: `+1` for definite metrics and
/// `−1` for the split signature used in the Lorentzian setting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Signature {
    #[default]
    Riemannian,
    Lorentzian,
}

impl Signature {
    pub fn epsilon(self) -> i64 {
        match self {
            Signature::Riemannian => 1,
            Signature::Lorentzian => -1,
        }
    }

    pub fn from_epsilon(eps: i64) -> Option<Signature> {
        match eps {
            1 => Some(Signature::Riemannian),
            -1 => Some(Signature::Lorentzian),
            _ => None,
        }
    }
}

/// A symmetric, invertible (0,2) tensor together with its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metric {
    g: Tensor,
    inv: Tensor,
    det: Expr,
    signature: Signature,
}

impl Metric {
    pub fn new(g: Tensor, signature: Signature) -> Result<Metric, GeomError> {
        if g.slots() != [Down, Down] {
            return Err(GeomError::Variance { slot: 0 });
        }
        let n = g.dim();
        for i in 0..n {
            for j in i + 1..n {
                if g.get(&[i, j]) != g.get(&[j, i]) {
                    return Err(GeomError::AsymmetricMetric(i, j));
                }
            }
        }
        let rows: Vec<Vec<Expr>> = (0..n).map(|i| (0..n).map(|j| g.get(&[i, j]).clone()).collect()).collect();
        let (det, inv_rows) = linalg::invert(&rows).ok_or(GeomError::SingularMetric)?;
        let inv = Tensor::from_fn(g.chart(), &[Up, Up], |ix| inv_rows[ix[0]][ix[1]].clone());
        inv.check_degree()?;
        Ok(Metric { g, inv, det, signature })
    }

    /// Builds from a function evaluated for `i <= j` and mirrored.
    pub fn from_fn(
        chart: &Arc<Chart>,
        signature: Signature,
        f: impl Fn(usize, usize) -> Expr + Sync,
    ) -> Result<Metric, GeomError> {
        let g = Tensor::from_fn(chart, &[Down, Down], |ix| f(ix[0].min(ix[1]), ix[0].max(ix[1])));
        Metric::new(g, signature)
    }

    pub fn diagonal(chart: &Arc<Chart>, signature: Signature, entries: &[Expr]) -> Result<Metric, GeomError> {
        if entries.len() != chart.dim() {
            return Err(GeomError::Shape { expected: chart.dim(), got: entries.len() });
        }
        Metric::from_fn(chart, signature, |i, j| if i == j { entries[i].clone() } else { Expr::zero() })
    }

    /// The flat metric `diag(1, ε, ..., ε)`.
    pub fn flat(chart: &Arc<Chart>, signature: Signature) -> Metric {
        let eps = Expr::int(signature.epsilon());
        let entries: Vec<Expr> = (0..chart.dim()).map(|i| if i == 0 { Expr::one() } else { eps.clone() }).collect();
        Metric::diagonal(chart, signature, &entries).expect("flat metric is invertible")
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.g.chart()
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn tensor(&self) -> &Tensor {
        &self.g
    }

    pub fn inverse(&self) -> &Tensor {
        &self.inv
    }

    pub fn determinant(&self) -> &Expr {
        &self.det
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        self.g.get(&[i, j])
    }

    pub fn inv(&self, i: usize, j: usize) -> &Expr {
        self.inv.get(&[i, j])
    }

    /// The conformally related metric `factor · g`.
    pub fn rescale(&self, factor: &Expr) -> Result<Metric, GeomError> {
        Metric::new(self.g.scale(factor), self.signature)
    }

    /// `g^{ij} T_{ij}` for a (0,2) tensor.
    pub fn trace(&self, t: &Tensor) -> Expr {
        let n = self.dim();
        let mut acc = Expr::zero();
        for i in 0..n {
            for j in 0..n {
                let w = self.inv(i, j);
                if !w.is_zero() {
                    acc += &(w * t.get(&[i, j]));
                }
            }
        }
        acc
    }

    /// Raises the index of a covector.
    pub fn raise_covector(&self, w: &[Expr]) -> Vec<Expr> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|l| self.inv(i, l) * &w[l]).sum()).collect()
    }
}

/// A metric representative together with the 1-form `β` of a Weyl structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylStructure {
    pub metric: Metric,
    pub beta: Vec<Expr>,
}

impl WeylStructure {
    pub fn new(metric: Metric, beta: Vec<Expr>) -> Result<WeylStructure, GeomError> {
        if beta.len() != metric.dim() {
            return Err(GeomError::Shape { expected: metric.dim(), got: beta.len() });
        }
        Ok(WeylStructure { metric, beta })
    }

    /// The Levi-Civita case `β = 0`.
    pub fn metric_only(metric: Metric) -> WeylStructure {
        let n = metric.dim();
        WeylStructure { metric, beta: vec![Expr::zero(); n] }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.metric.chart()
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// Whether `dβ = 0`.
    pub fn is_closed(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (i + 1..n).all(|j| self.beta[j].diff(i) == self.beta[i].diff(j)))
    }

    pub fn is_levi_civita(&self) -> bool {
        self.beta.iter().all(Expr::is_zero)
    }

    /// The gauge-equivalent pair `(σ² g, β + dσ/σ)`.
    pub fn regauge(&self, sigma: &Expr) -> Result<WeylStructure, GeomError> {
        let metric = self.metric.rescale(&(sigma * sigma))?;
        let beta = self.beta.iter().enumerate().map(|(k, b)| b + &(&sigma.diff(k) / sigma)).collect();
        WeylStructure::new(metric, beta)
    }
}

/// `Γ^i_{jk} = ½ g^{il} (∂_j g_{lk} + ∂_k g_{lj} − ∂_l g_{jk})`.
pub fn levi_civita(g: &Metric) -> Result<Connection, GeomError> {
    let n = g.dim();
    let chart = g.chart();
    // First-kind symbols Γ_{ljk}, symmetric in (j, k).
    let first = Tensor::from_fn(chart, &[Down, Down, Down], |ix| {
        let (l, j, k) = (ix[0], ix[1], ix[2]);
        if j > k {
            return Expr::zero();
        }
        let s = &(&g.get(l, k).diff(j) + &g.get(l, j).diff(k)) - &g.get(j, k).diff(l);
        &s * &Expr::frac(1, 2)
    });
    let conn = Connection::from_fn(chart, |i, j, k| {
        let mut acc = Expr::zero();
        for l in 0..n {
            let w = g.inv(i, l);
            if !w.is_zero() {
                acc += &(w * first.get(&[l, j, k]));
            }
        }
        acc
    });
    conn.tensor().check_degree()?;
    Ok(conn)
}

/// The torsion-free connection with `∇_k g_{ij} = 2 β_k g_{ij}`:
/// `Γ^i_{jk} = LC^i_{jk} − (δ^i_j β_k + δ^i_k β_j − g_{jk} β^i)`.
pub fn weyl_connection(w: &WeylStructure) -> Result<Connection, GeomError> {
    let lc = levi_civita(&w.metric)?;
    if w.is_levi_civita() {
        return Ok(lc);
    }
    let beta_up = w.metric.raise_covector(&w.beta);
    let conn = Connection::from_fn(w.chart(), |i, j, k| {
        let mut e = lc.get(i, j, k).clone();
        if i == j {
            e -= &w.beta[k];
        }
        if i == k {
            e -= &w.beta[j];
        }
        e += &(w.metric.get(j, k) * &beta_up[i]);
        e
    });
    conn.tensor().check_degree()?;
    Ok(conn)
}

/// Riemann tensor `R^i_{jkl}` and Ricci tensor `R_{jl}` of a connection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curvature {
    pub riemann: Tensor,
    pub ricci: Tensor,
}

pub fn curvature(conn: &Connection) -> Result<Curvature, GeomError> {
    let n = conn.dim();
    let chart = conn.chart();
    // dgamma[k, i, l, j] = ∂_k Γ^i_{lj}
    let dgamma = Tensor::from_fn(chart, &[Down, Up, Down, Down], |ix| conn.get(ix[1], ix[2], ix[3]).diff(ix[0]));
    let half = Tensor::from_fn(chart, &[Up, Down, Down, Down], |ix| {
        let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
        if k >= l {
            return Expr::zero();
        }
        let mut acc = dgamma.get(&[k, i, l, j]) - dgamma.get(&[l, i, k, j]);
        for m in 0..n {
            let a = conn.get(i, k, m);
            if !a.is_zero() {
                let b = conn.get(m, l, j);
                if !b.is_zero() {
                    acc += &(a * b);
                }
            }
            let c = conn.get(i, l, m);
            if !c.is_zero() {
                let d = conn.get(m, k, j);
                if !d.is_zero() {
                    acc -= &(c * d);
                }
            }
        }
        acc
    });
    let mut riemann = half.clone();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..k {
                    riemann.set(&[i, j, k, l], -half.get(&[i, j, l, k]));
                }
            }
        }
    }
    riemann.check_degree()?;
    let ricci = riemann.contract(0, 2)?;
    Ok(Curvature { riemann, ricci })
}

/// One sample of a numerically integrated geodesic.
#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicSample {
    pub t: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

struct CompiledTerm {
    i: usize,
    j: usize,
    k: usize,
    weight: f64,
    expr: Expr,
}

/// Integrates `ẍ^i = −Γ^i_{jk}(x) ẋ^j ẋ^k` with classical fixed-step RK4.
///
/// Returns `steps + 1` samples starting at `t = 0`.
pub fn integrate_geodesic(
    conn: &Connection,
    x0: &[f64],
    v0: &[f64],
    h: f64,
    steps: usize,
) -> Result<Vec<GeodesicSample>, GeomError> {
    let n = conn.dim();
    if x0.len() != n || v0.len() != n {
        return Err(GeomError::Shape { expected: n, got: x0.len().min(v0.len()) });
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(GeomError::Invariant("step size must be positive".into()));
    }
    let mut terms = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in j..n {
                let e = conn.get(i, j, k);
                if !e.is_zero() {
                    terms.push(CompiledTerm { i, j, k, weight: if j == k { 1.0 } else { 2.0 }, expr: e.clone() });
                }
            }
        }
    }
    let accel = |x: &[f64], v: &[f64], t: f64| -> Result<Vec<f64>, GeomError> {
        let mut a = vec![0.0; n];
        for term in &terms {
            let den = term.expr.denom().eval_f64(x);
            if den == 0.0 {
                return Err(GeomError::Pole { t });
            }
            let g = term.expr.numer().eval_f64(x) / den;
            if !g.is_finite() {
                return Err(GeomError::Pole { t });
            }
            a[term.i] -= term.weight * g * v[term.j] * v[term.k];
        }
        Ok(a)
    };
    let axpy = |base: &[f64], d: &[f64], s: f64| -> Vec<f64> { base.iter().zip(d).map(|(b, d)| b + s * d).collect() };

    let mut out = Vec::with_capacity(steps + 1);
    let mut x = x0.to_vec();
    let mut v = v0.to_vec();
    out.push(GeodesicSample { t: 0.0, x: x.clone(), v: v.clone() });
    for step in 0..steps {
        let t = step as f64 * h;
        let k1x = v.clone();
        let k1v = accel(&x, &v, t)?;
        let x2 = axpy(&x, &k1x, h / 2.0);
        let v2 = axpy(&v, &k1v, h / 2.0);
        let k2v = accel(&x2, &v2, t + h / 2.0)?;
        let k2x = v2;
        let x3 = axpy(&x, &k2x, h / 2.0);
        let v3 = axpy(&v, &k2v, h / 2.0);
        let k3v = accel(&x3, &v3, t + h / 2.0)?;
        let k3x = v3;
        let x4 = axpy(&x, &k3x, h);
        let v4 = axpy(&v, &k3v, h);
        let k4v = accel(&x4, &v4, t + h)?;
        let k4x = v4;
        for d in 0..n {
            x[d] += h / 6.0 * (k1x[d] + 2.0 * k2x[d] + 2.0 * k3x[d] + k4x[d]);
            v[d] += h / 6.0 * (k1v[d] + 2.0 * k2v[d] + 2.0 * k3v[d] + k4v[d]);
        }
        let t_next = (step + 1) as f64 * h;
        if x.iter().chain(&v).any(|c| !c.is_finite() || c.abs() > 1e12) {
            return Err(GeomError::Diverged { t: t_next });
        }
        out.push(GeodesicSample { t: t_next, x: x.clone(), v: v.clone() });
    }
    Ok(out)
}

/// CSV with header `t,<names...>` and one row per sample.
pub fn geodesic_csv(samples: &[GeodesicSample], names: &[String]) -> String {
    let mut s = String::from("t");
    for name in names {
        s.push(',');
        s.push_str(name);
    }
    s.push('\n');
    for p in samples {
        s.push_str(&format!("{:e}", p.t));
        for c in &p.x {
            s.push_str(&format!(",{c:e}"));
        }
        s.push('\n');
    }
    s
}

/// Closest point to `p` on the segment `[a, b]`, with its distance.
fn point_segment(p: &[f64], a: &[f64], b: &[f64]) -> (f64, Vec<f64>) {
    let ab: Vec<f64> = a.iter().zip(b).map(|(a, b)| b - a).collect();
    let ap: Vec<f64> = a.iter().zip(p).map(|(a, p)| p - a).collect();
    let len2: f64 = ab.iter().map(|c| c * c).sum();
    let t = if len2 > 0.0 { (ap.iter().zip(&ab).map(|(x, y)| x * y).sum::<f64>() / len2).clamp(0.0, 1.0) } else { 0.0 };
    let foot: Vec<f64> = a.iter().zip(&ab).map(|(a, d)| a + t * d).collect();
    let d = foot.iter().zip(p).map(|(f, p)| (f - p).powi(2)).sum::<f64>().sqrt();
    (d, foot)
}

/// Distance from a point to a polyline, the index of the segment holding the
/// closest point, and the closest point itself.
fn point_polyline(p: &[f64], line: &[Vec<f64>]) -> (f64, usize, Vec<f64>) {
    if line.len() == 1 {
        let (d, foot) = point_segment(p, &line[0], &line[0]);
        return (d, 0, foot);
    }
    let mut best = (f64::INFINITY, 0, Vec::new());
    for s in 0..line.len() - 1 {
        let (d, foot) = point_segment(p, &line[s], &line[s + 1]);
        if d < best.0 {
            best = (d, s, foot);
        }
    }
    best
}

fn directed_hausdorff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter().map(|p| point_polyline(p, b).0).fold(0.0, f64::max)
}

/// `line` truncated at the point of it closest to `p`.
fn cut_at(line: &[Vec<f64>], p: &[f64]) -> (f64, Vec<Vec<f64>>) {
    let (d, seg, foot) = point_polyline(p, line);
    let mut out = line[..=seg].to_vec();
    out.push(foot);
    (d, out)
}

/// Hausdorff distance between two paths that start at the same point and may
/// be traversed at different speeds.
///
/// Both paths are compared over their common extent: the longer one is cut at
/// the point closest to the end of the shorter one.
pub fn unparametrized_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let (end_in_b, b_cut) = cut_at(b, a.last().expect("nonempty path"));
    let (end_in_a, a_cut) = cut_at(a, b.last().expect("nonempty path"));
    let (short, long) = if end_in_b <= end_in_a { (a.to_vec(), b_cut) } else { (b.to_vec(), a_cut) };
    directed_hausdorff(&short, &long).max(directed_hausdorff(&long, &short))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polar_coordinates_christoffels() {
        let chart = Arc::new(Chart::with_names(vec!["r".into(), "th".into()]).unwrap());
        let r = chart.parse("r").unwrap();
        let g = Metric::diagonal(&chart, Signature::Riemannian, &[Expr::one(), &r * &r]).unwrap();
        let lc = levi_civita(&g).unwrap();
        assert_eq!(lc.get(0, 1, 1), &-r.clone());
        assert_eq!(lc.get(1, 0, 1), &chart.parse("1/r").unwrap());
        assert!(lc.get(0, 0, 0).is_zero());
    }

    #[test]
    fn flat_straight_line() {
        let chart = Arc::new(Chart::new(3).unwrap());
        let path = integrate_geodesic(&Connection::zero(&chart), &[0.0; 3], &[1.0, 0.0, 0.0], 0.01, 100).unwrap();
        for s in &path {
            assert_eq!(s.x[1], 0.0);
            assert_eq!(s.x[2], 0.0);
            assert!((s.x[0] - s.t).abs() < 1e-12);
        }
    }

    #[test]
    fn hausdorff_of_reparametrized_segment() {
        let a: Vec<Vec<f64>> = (0..=10).map(|i| vec![i as f64 * 0.1, 0.0]).collect();
        let b: Vec<Vec<f64>> = (0..=10).map(|i| vec![i as f64 * 0.2, 0.0]).collect();
        assert!(unparametrized_distance(&a, &b) < 1e-12);
        let c: Vec<Vec<f64>> = (0..=10).map(|i| vec![i as f64 * 0.1, 0.01]).collect();
        assert!((unparametrized_distance(&a, &c) - 0.01).abs() < 1e-12);
    }
}
