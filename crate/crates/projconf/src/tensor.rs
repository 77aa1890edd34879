//! Dense tensors of exact expressions and torsion-free connections.
//!
//! Slots are addressed positionally from 0. Entries are stored row-major, so
//! the last slot varies fastest.

use std::sync::Arc;

use rayon::prelude::*;
use symkernel::{rat, Chart, Expr};

use crate::affine::Metric;
use crate::error::GeomError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variance {
    Up,
    Down,
}

pub use Variance::{Down, Up};

/// Which projector [`Tensor::sym_antisym`] applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bracket {
    /// Symmetrization, `(ij)`.
    Round,
    /// Antisymmetrization, `[ij]`.
    Square,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    chart: Arc<Chart>,
    slots: Vec<Variance>,
    data: Vec<Expr>,
}

fn unflatten(mut flat: usize, n: usize, rank: usize) -> Vec<usize> {
    let mut idx = vec![0; rank];
    for s in (0..rank).rev() {
        idx[s] = flat % n;
        flat /= n;
    }
    idx
}

fn flatten(idx: &[usize], n: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

/// Every multi-index of the given rank, in storage order.
pub fn multi_indices(n: usize, rank: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..n.pow(rank as u32)).map(move |f| unflatten(f, n, rank))
}

/// All permutations of `0..k` with their signs.
fn permutations(k: usize) -> Vec<(Vec<usize>, i64)> {
    fn go(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, sign: i64, out: &mut Vec<(Vec<usize>, i64)>) {
        if rest.is_empty() {
            out.push((prefix.clone(), sign));
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            prefix.push(x);
            // Moving element i to the front costs i transpositions.
            go(prefix, rest, if i % 2 == 0 { sign } else { -sign }, out);
            prefix.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..k).collect(), 1, &mut out);
    out
}

impl Tensor {
    /// Builds a tensor entry by entry; entries are computed in parallel.
    pub fn from_fn(chart: &Arc<Chart>, slots: &[Variance], f: impl Fn(&[usize]) -> Expr + Sync) -> Tensor {
        let n = chart.dim();
        let rank = slots.len();
        let data = (0..n.pow(rank as u32)).into_par_iter().map(|flat| f(&unflatten(flat, n, rank))).collect();
        Tensor { chart: chart.clone(), slots: slots.to_vec(), data }
    }

    pub fn try_from_fn(
        chart: &Arc<Chart>,
        slots: &[Variance],
        f: impl Fn(&[usize]) -> Result<Expr, GeomError> + Sync,
    ) -> Result<Tensor, GeomError> {
        let n = chart.dim();
        let rank = slots.len();
        let data = (0..n.pow(rank as u32))
            .into_par_iter()
            .map(|flat| f(&unflatten(flat, n, rank)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Tensor { chart: chart.clone(), slots: slots.to_vec(), data })
    }

    pub fn from_data(chart: &Arc<Chart>, slots: &[Variance], data: Vec<Expr>) -> Result<Tensor, GeomError> {
        let expected = chart.dim().pow(slots.len() as u32);
        if data.len() != expected {
            return Err(GeomError::Shape { expected, got: data.len() });
        }
        Ok(Tensor { chart: chart.clone(), slots: slots.to_vec(), data })
    }

    pub fn zeros(chart: &Arc<Chart>, slots: &[Variance]) -> Tensor {
        let len = chart.dim().pow(slots.len() as u32);
        Tensor { chart: chart.clone(), slots: slots.to_vec(), data: vec![Expr::zero(); len] }
    }

    pub fn scalar(chart: &Arc<Chart>, e: Expr) -> Tensor {
        Tensor { chart: chart.clone(), slots: Vec::new(), data: vec![e] }
    }

    /// The Kronecker delta as a (1,1) tensor.
    pub fn kronecker(chart: &Arc<Chart>) -> Tensor {
        Tensor::from_fn(chart, &[Up, Down], |ix| if ix[0] == ix[1] { Expr::one() } else { Expr::zero() })
    }

    /// A vector (one contravariant slot) or covector from components.
    pub fn vector(chart: &Arc<Chart>, variance: Variance, comps: Vec<Expr>) -> Result<Tensor, GeomError> {
        Tensor::from_data(chart, &[variance], comps)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[Variance] {
        &self.slots
    }

    pub fn data(&self) -> &[Expr] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Expr> {
        self.data
    }

    pub fn get(&self, idx: &[usize]) -> &Expr {
        assert_eq!(idx.len(), self.rank(), "index length must equal rank");
        &self.data[flatten(idx, self.dim())]
    }

    pub fn set(&mut self, idx: &[usize], e: Expr) {
        assert_eq!(idx.len(), self.rank(), "index length must equal rank");
        let n = self.dim();
        self.data[flatten(idx, n)] = e;
    }

    /// The scalar value of a rank-0 tensor.
    pub fn value(&self) -> &Expr {
        assert!(self.slots.is_empty(), "not a scalar");
        &self.data[0]
    }

    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> {
        multi_indices(self.dim(), self.rank())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Expr::is_zero)
    }

    /// Multi-indices and values of the entries that are not identically zero.
    pub fn nonzero_entries(&self) -> Vec<(Vec<usize>, &Expr)> {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.is_zero())
            .map(|(f, e)| (unflatten(f, self.dim(), self.rank()), e))
            .collect()
    }

    /// Errors if any entry exceeds the chart's degree bound.
    pub fn check_degree(&self) -> Result<(), GeomError> {
        for e in &self.data {
            self.chart.check_degree(e)?;
        }
        Ok(())
    }

    fn same_shape(&self, other: &Tensor) -> Result<(), GeomError> {
        if self.chart != other.chart {
            return Err(GeomError::ChartMismatch);
        }
        if self.slots != other.slots {
            let slot = self.slots.iter().zip(&other.slots).position(|(a, b)| a != b).unwrap_or(0);
            return Err(GeomError::Variance { slot });
        }
        Ok(())
    }

    fn check_slot(&self, slot: usize) -> Result<(), GeomError> {
        if slot >= self.rank() {
            return Err(GeomError::SlotRange { slot, rank: self.rank() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor, GeomError> {
        self.same_shape(other)?;
        let data = self.data.par_iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Tensor { chart: self.chart.clone(), slots: self.slots.clone(), data })
    }

    pub fn sub(&self, other: &Tensor) -> Result<Tensor, GeomError> {
        self.same_shape(other)?;
        let data = self.data.par_iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Tensor { chart: self.chart.clone(), slots: self.slots.clone(), data })
    }

    pub fn neg(&self) -> Tensor {
        self.map(|e| -e)
    }

    pub fn scale(&self, k: &Expr) -> Tensor {
        self.map(|e| e * k)
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr + Sync + Send) -> Tensor {
        Tensor { chart: self.chart.clone(), slots: self.slots.clone(), data: self.data.par_iter().map(f).collect() }
    }

    pub fn outer(&self, other: &Tensor) -> Result<Tensor, GeomError> {
        if self.chart != other.chart {
            return Err(GeomError::ChartMismatch);
        }
        let r = self.rank();
        let mut slots = self.slots.clone();
        slots.extend(&other.slots);
        Ok(Tensor::from_fn(&self.chart, &slots, |ix| self.get(&ix[..r]) * other.get(&ix[r..])))
    }

    /// Sums over a repeated index in slots `a` and `b`; one must be up, the other down.
    pub fn contract(&self, a: usize, b: usize) -> Result<Tensor, GeomError> {
        self.check_slot(a)?;
        self.check_slot(b)?;
        if a == b || self.slots[a] == self.slots[b] {
            return Err(GeomError::Variance { slot: b });
        }
        Ok(self.contract_unchecked(a, b, None))
    }

    /// Contraction that inserts the metric (or its inverse) when both slots share a variance.
    pub fn trace_with(&self, a: usize, b: usize, metric: &Metric) -> Result<Tensor, GeomError> {
        self.check_slot(a)?;
        self.check_slot(b)?;
        if a == b {
            return Err(GeomError::Variance { slot: b });
        }
        if self.chart.base_chart() != metric.chart().base_chart() {
            return Err(GeomError::ChartMismatch);
        }
        let m = match (self.slots[a], self.slots[b]) {
            (Down, Down) => Some(metric.inverse()),
            (Up, Up) => Some(metric.tensor()),
            _ => None,
        };
        Ok(self.contract_unchecked(a, b, m))
    }

    fn contract_unchecked(&self, a: usize, b: usize, metric: Option<&Tensor>) -> Tensor {
        let n = self.dim();
        let keep: Vec<usize> = (0..self.rank()).filter(|&s| s != a && s != b).collect();
        let slots: Vec<Variance> = keep.iter().map(|&s| self.slots[s]).collect();
        Tensor::from_fn(&self.chart, &slots, |ix| {
            let mut full = vec![0; self.rank()];
            for (pos, &s) in keep.iter().enumerate() {
                full[s] = ix[pos];
            }
            let mut acc = Expr::zero();
            for i in 0..n {
                full[a] = i;
                match metric {
                    None => {
                        full[b] = i;
                        acc += self.get(&full);
                    }
                    Some(m) => {
                        for j in 0..n {
                            let w = m.get(&[i, j]);
                            if w.is_zero() {
                                continue;
                            }
                            full[b] = j;
                            acc += &(w * self.get(&full));
                        }
                    }
                }
            }
            acc
        })
    }

    /// Reorders slots: slot `s` of the result is slot `perm[s]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<Tensor, GeomError> {
        let mut seen = vec![false; self.rank()];
        if perm.len() != self.rank() {
            return Err(GeomError::Shape { expected: self.rank(), got: perm.len() });
        }
        for &p in perm {
            self.check_slot(p)?;
            if std::mem::replace(&mut seen[p], true) {
                return Err(GeomError::SlotRange { slot: p, rank: self.rank() });
            }
        }
        let slots: Vec<Variance> = perm.iter().map(|&p| self.slots[p]).collect();
        Ok(Tensor::from_fn(&self.chart, &slots, |ix| {
            let mut src = vec![0; ix.len()];
            for (s, &p) in perm.iter().enumerate() {
                src[p] = ix[s];
            }
            self.get(&src).clone()
        }))
    }

    /// Swaps two slots.
    pub fn transpose(&self, a: usize, b: usize) -> Result<Tensor, GeomError> {
        let mut perm: Vec<usize> = (0..self.rank()).collect();
        self.check_slot(a)?;
        self.check_slot(b)?;
        perm.swap(a, b);
        self.permute(&perm)
    }

    /// Symmetrizes (`Round`) or antisymmetrizes (`Square`) over the given slots,
    /// with weight `1/k!`.
    pub fn sym_antisym(&self, slots: &[usize], mode: Bracket) -> Result<Tensor, GeomError> {
        for &s in slots {
            self.check_slot(s)?;
            if self.slots[s] != self.slots[slots[0]] {
                return Err(GeomError::Variance { slot: s });
            }
        }
        let perms = permutations(slots.len());
        let weight = Expr::rational(rat(1, perms.len() as i64));
        Ok(Tensor::from_fn(&self.chart, &self.slots, |ix| {
            let mut acc = Expr::zero();
            let mut src = ix.to_vec();
            for (perm, sign) in &perms {
                for (pos, &p) in perm.iter().enumerate() {
                    src[slots[pos]] = ix[slots[p]];
                }
                let term = self.get(&src);
                if mode == Bracket::Square && *sign < 0 {
                    acc -= term;
                } else {
                    acc += term;
                }
            }
            &acc * &weight
        }))
    }

    pub fn symmetrize(&self, slots: &[usize]) -> Result<Tensor, GeomError> {
        self.sym_antisym(slots, Bracket::Round)
    }

    pub fn antisymmetrize(&self, slots: &[usize]) -> Result<Tensor, GeomError> {
        self.sym_antisym(slots, Bracket::Square)
    }

    /// Raises a covariant slot with the inverse metric.
    pub fn raise(&self, slot: usize, metric: &Metric) -> Result<Tensor, GeomError> {
        self.check_slot(slot)?;
        if self.slots[slot] != Down {
            return Err(GeomError::Variance { slot });
        }
        Ok(self.move_index(slot, metric.inverse(), Up))
    }

    /// Lowers a contravariant slot with the metric.
    pub fn lower(&self, slot: usize, metric: &Metric) -> Result<Tensor, GeomError> {
        self.check_slot(slot)?;
        if self.slots[slot] != Up {
            return Err(GeomError::Variance { slot });
        }
        Ok(self.move_index(slot, metric.tensor(), Down))
    }

    fn move_index(&self, slot: usize, m: &Tensor, to: Variance) -> Tensor {
        let n = self.dim();
        let mut slots = self.slots.clone();
        slots[slot] = to;
        Tensor::from_fn(&self.chart, &slots, |ix| {
            let mut src = ix.to_vec();
            let mut acc = Expr::zero();
            for j in 0..n {
                let w = m.get(&[ix[slot], j]);
                if w.is_zero() {
                    continue;
                }
                src[slot] = j;
                acc += &(w * self.get(&src));
            }
            acc
        })
    }

    /// `∇T`, with the derivative index appended as a new last covariant slot.
    pub fn covariant_derivative(&self, conn: &Connection) -> Result<Tensor, GeomError> {
        if self.chart.base_chart() != conn.chart().base_chart() {
            return Err(GeomError::ChartMismatch);
        }
        let n = self.dim();
        let r = self.rank();
        let mut slots = self.slots.clone();
        slots.push(Down);
        Ok(Tensor::from_fn(&self.chart, &slots, |ix| {
            let k = ix[r];
            let base = &ix[..r];
            let mut acc = self.get(base).diff(k);
            let mut src = base.to_vec();
            for s in 0..r {
                for m in 0..n {
                    src[s] = m;
                    let t = self.get(&src);
                    if t.is_zero() {
                        continue;
                    }
                    match self.slots[s] {
                        Up => {
                            let g = conn.get(base[s], k, m);
                            if !g.is_zero() {
                                acc += &(g * t);
                            }
                        }
                        Down => {
                            let g = conn.get(m, k, base[s]);
                            if !g.is_zero() {
                                acc -= &(g * t);
                            }
                        }
                    }
                }
                src[s] = base[s];
            }
            acc
        }))
    }
}

/// Christoffel symbols `Γ^i_{jk}` of a torsion-free connection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    gamma: Tensor,
}

impl Connection {
    /// Wraps a (1,2) tensor, checking variance and symmetry in the lower slots.
    pub fn new(gamma: Tensor) -> Result<Connection, GeomError> {
        if gamma.slots() != [Up, Down, Down] {
            let slot = gamma.slots().iter().zip([Up, Down, Down]).position(|(a, b)| *a != b).unwrap_or(0);
            return Err(GeomError::Variance { slot });
        }
        let n = gamma.dim();
        for i in 0..n {
            for j in 0..n {
                for k in j + 1..n {
                    if gamma.get(&[i, j, k]) != gamma.get(&[i, k, j]) {
                        return Err(GeomError::Torsion(i, j, k));
                    }
                }
            }
        }
        Ok(Connection { gamma })
    }

    pub fn zero(chart: &Arc<Chart>) -> Connection {
        Connection { gamma: Tensor::zeros(chart, &[Up, Down, Down]) }
    }

    /// Builds from a function called only for `j <= k`.
    pub fn from_fn(chart: &Arc<Chart>, f: impl Fn(usize, usize, usize) -> Expr + Sync) -> Connection {
        let n = chart.dim();
        let half = Tensor::from_fn(chart, &[Up, Down, Down], |ix| {
            if ix[1] <= ix[2] {
                f(ix[0], ix[1], ix[2])
            } else {
                Expr::zero()
            }
        });
        let mut gamma = half.clone();
        for i in 0..n {
            for j in 0..n {
                for k in 0..j {
                    gamma.set(&[i, j, k], half.get(&[i, k, j]).clone());
                }
            }
        }
        Connection { gamma }
    }

    /// Builds from sparse entries `(i, j, k, value)`, mirrored in `(j, k)`.
    pub fn from_entries(chart: &Arc<Chart>, entries: &[(usize, usize, usize, Expr)]) -> Result<Connection, GeomError> {
        let n = chart.dim();
        let mut gamma = Tensor::zeros(chart, &[Up, Down, Down]);
        for (i, j, k, e) in entries {
            if *i >= n || *j >= n || *k >= n {
                return Err(GeomError::SlotRange { slot: *i.max(j).max(k), rank: n });
            }
            gamma.set(&[*i, *j, *k], e.clone());
            gamma.set(&[*i, *k, *j], e.clone());
        }
        Ok(Connection { gamma })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.gamma.chart()
    }

    pub fn dim(&self) -> usize {
        self.gamma.dim()
    }

    pub fn tensor(&self) -> &Tensor {
        &self.gamma
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Expr {
        self.gamma.get(&[i, j, k])
    }

    /// `Γ + δ^i_j f_k + δ^i_k f_j`, the projective change of Γ by the covector `f`.
    pub fn projective_change(&self, f: &[Expr]) -> Result<Connection, GeomError> {
        let n = self.dim();
        if f.len() != n {
            return Err(GeomError::Shape { expected: n, got: f.len() });
        }
        Ok(Connection::from_fn(self.chart(), |i, j, k| {
            let mut e = self.get(i, j, k).clone();
            if i == j {
                e += &f[k];
            }
            if i == k {
                e += &f[j];
            }
            e
        }))
    }

    pub fn add(&self, delta: &Tensor) -> Result<Connection, GeomError> {
        Connection::new(self.gamma.add(delta)?)
    }

    pub fn sub(&self, other: &Connection) -> Result<Tensor, GeomError> {
        self.gamma.sub(&other.gamma)
    }

    /// The trace `Γ^l_{lk}`.
    pub fn trace(&self) -> Vec<Expr> {
        let n = self.dim();
        (0..n).map(|k| (0..n).map(|l| self.get(l, l, k).clone()).sum()).collect()
    }
}
