//! Seeded random geometric structures for the property and identity suites.
//!
//! Entries are sparse polynomials of degree at most one with small rational
//! coefficients, which keeps exact curvature computations at desk scale.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symkernel::{rat, Chart, Expr};

use crate::affine::{Metric, Signature, WeylStructure};
use crate::quartic_cr::QuarticCoefficients;
use crate::tensor::Connection;

pub struct Corpus {
    rng: ChaCha8Rng,
}

impl Corpus {
    pub fn new(seed: u64) -> Corpus {
        Corpus { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A small nonzero rational `a/b` with `|a| <= max`, `1 <= b <= 3`.
    pub fn small_rational(&mut self, max: i64) -> Expr {
        loop {
            let a = self.rng.gen_range(-max..=max);
            if a != 0 {
                let b = self.rng.gen_range(1..=3);
                return Expr::frac(a, b);
            }
        }
    }

    /// `c + Σ c_i x_i`, each coefficient present with probability `density`.
    pub fn linear(&mut self, chart: &Chart, density: f64, max: i64) -> Expr {
        let mut e = Expr::zero();
        for v in 0..=chart.dim() {
            if self.rng.gen_bool(density) {
                let c = self.small_rational(max);
                e += &(if v == chart.dim() { c } else { &c * &Expr::var(v) });
            }
        }
        e
    }

    pub fn covector(&mut self, chart: &Chart) -> Vec<Expr> {
        (0..chart.dim()).map(|_| self.linear(chart, 0.4, 3)).collect()
    }

    /// A torsion-free connection with sparse linear entries.
    pub fn connection(&mut self, chart: &Arc<Chart>) -> Connection {
        let n = chart.dim();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in j..n {
                    if self.rng.gen_bool(0.5) {
                        entries.push((i, j, k, self.linear(chart, 0.5, 3)));
                    }
                }
            }
        }
        Connection::from_entries(chart, &entries).expect("indices in range")
    }

    /// `diag(1, ε, ..., ε)` plus a sparse symmetric linear perturbation.
    pub fn metric(&mut self, chart: &Arc<Chart>, signature: Signature) -> Metric {
        let n = chart.dim();
        loop {
            let eps = signature.epsilon();
            let mut rows = vec![vec![Expr::zero(); n]; n];
            for i in 0..n {
                for j in i..n {
                    let base = if i != j {
                        Expr::zero()
                    } else if i == 0 {
                        Expr::one()
                    } else {
                        Expr::int(eps)
                    };
                    let density = if i == j { 0.5 } else { 0.25 };
                    let mut e = base;
                    if self.rng.gen_bool(density) {
                        e += &(&self.small_rational(1) * &Expr::var(self.rng.gen_range(0..n)));
                    }
                    rows[i][j] = e.clone();
                    rows[j][i] = e;
                }
            }
            if let Ok(g) = Metric::from_fn(chart, signature, |i, j| rows[i][j].clone()) {
                return g;
            }
        }
    }

    pub fn weyl_structure(&mut self, chart: &Arc<Chart>, signature: Signature) -> WeylStructure {
        let g = self.metric(chart, signature);
        let beta = (0..chart.dim()).map(|_| self.linear(chart, 0.3, 2)).collect();
        WeylStructure::new(g, beta).expect("matching dimension")
    }

    /// A rational conformal factor `σ`: a linear polynomial with nonzero
    /// constant term, or a ratio of two such.
    pub fn sigma(&mut self, chart: &Chart) -> Expr {
        let affine = |c: &mut Corpus| {
            let v = c.rng.gen_range(0..chart.dim());
            &Expr::one() + &(&c.small_rational(2) * &Expr::var(v))
        };
        let num = affine(self);
        if self.rng.gen_bool(0.5) {
            &num / &affine(self)
        } else {
            num
        }
    }

    /// Coefficients `C0..C4` with numerators in `-10..=10` and denominators in `1..=4`.
    pub fn quartic(&mut self) -> QuarticCoefficients {
        QuarticCoefficients(std::array::from_fn(|_| {
            let a = self.rng.gen_range(-10..=10);
            let b = self.rng.gen_range(1..=4);
            rat(a, b)
        }))
    }

    /// A rational point with small coordinates.
    pub fn point(&mut self, len: usize) -> Vec<num_rational::BigRational> {
        (0..len).map(|_| rat(self.rng.gen_range(-9..=9), self.rng.gen_range(1..=5))).collect()
    }
}
