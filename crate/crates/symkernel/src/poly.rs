//! Sparse multivariate polynomials with integer coefficients.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::monomial::{Monomial, MAX_VARS};

/// A polynomial in `Z[x_0, ..., x_7]`.
///
/// Terms are kept sorted by strictly decreasing grlex order and never carry a
/// zero coefficient, so structural equality is polynomial equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    terms: Vec<(Monomial, BigInt)>,
}

impl IntPoly {
    pub fn zero() -> IntPoly {
        IntPoly { terms: Vec::new() }
    }

    pub fn one() -> IntPoly {
        IntPoly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> IntPoly {
        if c.is_zero() {
            IntPoly::zero()
        } else {
            IntPoly { terms: vec![(Monomial::ONE, c)] }
        }
    }

    pub fn var(v: usize) -> IntPoly {
        IntPoly { terms: vec![(Monomial::var(v, 1), BigInt::one())] }
    }

    pub fn monomial(m: Monomial, c: BigInt) -> IntPoly {
        if c.is_zero() {
            IntPoly::zero()
        } else {
            IntPoly { terms: vec![(m, c)] }
        }
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, BigInt)>) -> IntPoly {
        let mut acc: HashMap<Monomial, BigInt> = HashMap::new();
        for (m, c) in terms {
            *acc.entry(m).or_default() += c;
        }
        IntPoly::from_map(acc)
    }

    fn from_map(acc: HashMap<Monomial, BigInt>) -> IntPoly {
        let mut terms: Vec<(Monomial, BigInt)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by_key(|t| std::cmp::Reverse(t.0));
        IntPoly { terms }
    }

    pub fn terms(&self) -> &[(Monomial, BigInt)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    /// The constant value if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.as_slice() {
            [] => Some(BigInt::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn constant_term(&self) -> BigInt {
        match self.terms.last() {
            Some((m, c)) if m.is_one() => c.clone(),
            _ => BigInt::zero(),
        }
    }

    /// Leading term under grlex.
    pub fn leading(&self) -> Option<&(Monomial, BigInt)> {
        self.terms.first()
    }

    /// Leading term under pure lex order.
    pub fn lex_leading(&self) -> Option<&(Monomial, BigInt)> {
        self.terms.iter().max_by(|a, b| a.0.lex_cmp(&b.0))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.first().map_or(0, |t| t.0.degree())
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.iter().map(|t| t.0.exponent(v)).max().unwrap_or(0)
    }

    /// Bit mask of the variables that occur.
    pub fn var_mask(&self) -> u32 {
        let mut mask = 0;
        for (m, _) in &self.terms {
            for v in 0..MAX_VARS {
                if m.exponent(v) > 0 {
                    mask |= 1 << v;
                }
            }
        }
        mask
    }

    /// Positive gcd of the coefficients; zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides by the content and makes the grlex leading coefficient positive.
    pub fn primitive_part(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut c = self.content();
        if self.terms[0].1.is_negative() {
            c = -c;
        }
        self.div_int_exact(&c)
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }

    pub fn scale(&self, k: &BigInt) -> IntPoly {
        if k.is_zero() {
            return IntPoly::zero();
        }
        if k.is_one() {
            return self.clone();
        }
        IntPoly { terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect() }
    }

    /// Multiplies every term by a monomial.
    pub fn shift(&self, m: Monomial) -> IntPoly {
        IntPoly { terms: self.terms.iter().map(|(t, c)| (*t * m, c.clone())).collect() }
    }

    /// Divides every coefficient by `k`, which must divide them all.
    pub fn div_int_exact(&self, k: &BigInt) -> IntPoly {
        if k.is_one() {
            return self.clone();
        }
        IntPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    debug_assert!((c % k).is_zero());
                    (*m, c / k)
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        self.merge(other, true)
    }

    fn merge(&self, other: &IntPoly, negate: bool) -> IntPoly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0, c));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, c)| (*m, if negate { -c } else { c.clone() })));
        IntPoly { terms: out }
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return other.shift(*m).scale(c);
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return self.shift(*m).scale(c);
        }
        let mut acc: HashMap<Monomial, BigInt> = HashMap::with_capacity(self.terms.len() * other.terms.len() / 2 + 1);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let e = acc.entry(*ma * *mb).or_default();
                *e += ca * cb;
            }
        }
        IntPoly::from_map(acc)
    }

    pub fn pow(&self, mut e: u32) -> IntPoly {
        let mut base = self.clone();
        let mut acc = IntPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn derivative(&self, v: usize) -> IntPoly {
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e > 0 {
                terms.push((m.with_exponent(v, e - 1), c * BigInt::from(e)));
            }
        }
        // Lowering one exponent can reorder terms of equal degree, so re-sort.
        terms.sort_unstable_by_key(|t| std::cmp::Reverse(t.0));
        IntPoly { terms }
    }

    /// Exact quotient `self / d` in `Z[x]`, or `None` if `d` does not divide.
    pub fn div_exact(&self, d: &IntPoly) -> Option<IntPoly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        if let Some(c) = d.as_constant() {
            return if self.terms.iter().all(|(_, a)| (a % &c).is_zero()) {
                Some(self.div_int_exact(&c))
            } else {
                None
            };
        }
        // Cheap necessary conditions before the long division.
        if self.total_degree() < d.total_degree() {
            return None;
        }
        for v in 0..MAX_VARS {
            if d.var_mask() & (1 << v) != 0 && self.degree_in(v) < d.degree_in(v) {
                return None;
            }
        }
        let (dm, dc) = d.terms[0].clone();
        let mut rem: BTreeMap<Monomial, BigInt> = self.terms.iter().map(|(m, c)| (*m, c.clone())).collect();
        let mut quotient = Vec::new();
        while let Some((m, c)) = rem.pop_last() {
            let qm = m.checked_div(dm)?;
            let (qc, r) = c.div_rem(&dc);
            if !r.is_zero() {
                return None;
            }
            for (tm, tc) in &d.terms[1..] {
                let key = *tm * qm;
                let delta = &qc * tc;
                match rem.entry(key) {
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        *e.get_mut() -= delta;
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(-delta);
                    }
                }
            }
            quotient.push((qm, qc));
        }
        Some(IntPoly { terms: quotient })
    }

    /// Evaluates at a rational point; missing coordinates count as zero.
    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        let mut powers: Vec<Vec<BigRational>> = vec![vec![BigRational::one()]; point.len()];
        let mut sum = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = BigRational::from_integer(c.clone());
            for v in 0..MAX_VARS {
                let e = m.exponent(v) as usize;
                if e == 0 {
                    continue;
                }
                if v >= point.len() {
                    t = BigRational::zero();
                    break;
                }
                while powers[v].len() <= e {
                    let next = powers[v].last().unwrap() * &point[v];
                    powers[v].push(next);
                }
                t *= &powers[v][e];
            }
            sum += t;
        }
        sum
    }

    /// Evaluates in floating point; missing coordinates count as zero.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        use num_traits::ToPrimitive;
        let mut sum = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.to_f64().unwrap_or(f64::NAN);
            for v in 0..MAX_VARS {
                let e = m.exponent(v);
                if e > 0 {
                    t *= point.get(v).copied().unwrap_or(0.0).powi(e as i32);
                }
            }
            sum += t;
        }
        sum
    }

    /// Splits into coefficients of the monomials in the variables of `mask`.
    ///
    /// Returns pairs `(m, c)` where `m` only involves masked variables and `c`
    /// none of them, with `self = sum m * c`.
    pub fn split_by_vars(&self, mask: u32) -> BTreeMap<Monomial, IntPoly> {
        let mut groups: BTreeMap<Monomial, Vec<(Monomial, BigInt)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut outer = Monomial::ONE;
            let mut inner = *m;
            for v in 0..MAX_VARS {
                if mask & (1 << v) != 0 {
                    let e = m.exponent(v);
                    if e > 0 {
                        outer = outer * Monomial::var(v, e);
                        inner = inner.with_exponent(v, 0);
                    }
                }
            }
            groups.entry(outer).or_default().push((inner, c.clone()));
        }
        groups
            .into_iter()
            .map(|(k, mut ts)| {
                ts.sort_unstable_by_key(|t| std::cmp::Reverse(t.0));
                (k, IntPoly { terms: ts })
            })
            .collect()
    }

    /// Substitutes polynomials for variables: `x_v -> images[v]`.
    pub fn compose(&self, images: &[IntPoly]) -> IntPoly {
        let mut powers: Vec<Vec<IntPoly>> = images.iter().map(|p| vec![IntPoly::one(), p.clone()]).collect();
        let mut acc = IntPoly::zero();
        for (m, c) in &self.terms {
            let mut t = IntPoly::constant(c.clone());
            for v in 0..MAX_VARS {
                let e = m.exponent(v) as usize;
                if e == 0 {
                    continue;
                }
                assert!(v < images.len(), "no image for variable {v}");
                while powers[v].len() <= e {
                    let next = powers[v].last().unwrap().mul(&images[v]);
                    powers[v].push(next);
                }
                t = t.mul(&powers[v][e]);
            }
            acc = acc.add(&t);
        }
        acc
    }
}
