//! Arithmetic modulo word-sized primes, used by the modular gcd.
//!
//! Multivariate polynomials here are sorted by decreasing *lex* order, which is
//! what the dense recursive gcd wants: the leading coefficient with respect to
//! the lex-first variables is simply the first term.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

use crate::monomial::Monomial;
use crate::poly::IntPoly;

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub(crate) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub(crate) fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

pub(crate) fn reduce_big(c: &BigInt, p: u64) -> u64 {
    let r = c.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits in u64")
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(small) {
            return n == small;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes below 2^62 in decreasing order.
pub(crate) fn primes() -> impl Iterator<Item = u64> {
    let mut n: u64 = (1 << 62) - 1;
    std::iter::from_fn(move || {
        while n > 3 {
            let cand = n;
            n -= 2;
            if is_prime_u64(cand) {
                return Some(cand);
            }
        }
        None
    })
}

/// Dense univariate polynomials over `Z/p`, index = degree, no trailing zeros.
pub(crate) mod uni {
    use super::*;

    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn degree(a: &[u64]) -> usize {
        a.len().saturating_sub(1)
    }

    pub fn eval(a: &[u64], x: u64, p: u64) -> u64 {
        let mut acc = 0;
        for &c in a.iter().rev() {
            acc = add_mod(mul_mod(acc, x, p), c, p);
        }
        acc
    }

    pub fn scale(a: &[u64], k: u64, p: u64) -> Vec<u64> {
        let mut out: Vec<u64> = a.iter().map(|&c| mul_mod(c, k, p)).collect();
        trim(&mut out);
        out
    }

    pub fn add(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut out = vec![0; a.len().max(b.len())];
        for (i, o) in out.iter_mut().enumerate() {
            *o = add_mod(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0), p);
        }
        trim(&mut out);
        out
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = add_mod(out[i + j], mul_mod(x, y, p), p);
            }
        }
        trim(&mut out);
        out
    }

    /// Quotient and remainder; `b` must be nonzero.
    pub fn divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        assert!(!b.is_empty());
        let mut r = a.to_vec();
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let inv = inv_mod(*b.last().unwrap(), p);
        let mut q = vec![0; r.len() - b.len() + 1];
        for k in (0..q.len()).rev() {
            let coef = mul_mod(r[k + b.len() - 1], inv, p);
            q[k] = coef;
            if coef != 0 {
                for (j, &bj) in b.iter().enumerate() {
                    r[k + j] = sub_mod(r[k + j], mul_mod(coef, bj, p), p);
                }
            }
        }
        trim(&mut r);
        trim(&mut q);
        (q, r)
    }

    pub fn monic(a: &[u64], p: u64) -> Vec<u64> {
        match a.last() {
            None => Vec::new(),
            Some(&lc) => scale(a, inv_mod(lc, p), p),
        }
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let (mut x, mut y) = (a.to_vec(), b.to_vec());
        while !y.is_empty() {
            let (_, r) = divrem(&x, &y, p);
            x = y;
            y = r;
        }
        monic(&x, p)
    }
}

/// Sparse multivariate polynomial over `Z/p`, terms in decreasing lex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct ModPoly {
    pub terms: Vec<(Monomial, u64)>,
}

impl ModPoly {
    pub fn zero() -> ModPoly {
        ModPoly { terms: Vec::new() }
    }

    pub fn from_int(a: &IntPoly, p: u64) -> ModPoly {
        let mut terms: Vec<(Monomial, u64)> = a
            .terms()
            .iter()
            .filter_map(|(m, c)| {
                let r = reduce_big(c, p);
                (r != 0).then_some((*m, r))
            })
            .collect();
        terms.sort_unstable_by(|x, y| y.0.lex_cmp(&x.0));
        ModPoly { terms }
    }

    fn from_map(acc: HashMap<Monomial, u64>) -> ModPoly {
        let mut terms: Vec<(Monomial, u64)> = acc.into_iter().filter(|t| t.1 != 0).collect();
        terms.sort_unstable_by(|x, y| y.0.lex_cmp(&x.0));
        ModPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn lc(&self) -> u64 {
        self.terms[0].1
    }

    pub fn lm(&self) -> Monomial {
        self.terms[0].0
    }

    pub fn scale(&self, k: u64, p: u64) -> ModPoly {
        if k == 0 {
            return ModPoly::zero();
        }
        ModPoly { terms: self.terms.iter().map(|&(m, c)| (m, mul_mod(c, k, p))).collect() }
    }

    pub fn monic(&self, p: u64) -> ModPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(inv_mod(self.lc(), p), p)
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.iter().map(|t| t.0.exponent(v)).max().unwrap_or(0)
    }

    /// Substitutes `x_v = alpha`.
    pub fn eval_var(&self, v: usize, alpha: u64, p: u64) -> ModPoly {
        let mut acc: HashMap<Monomial, u64> = HashMap::with_capacity(self.terms.len());
        let mut powers = vec![1u64];
        for &(m, c) in &self.terms {
            let e = m.exponent(v) as usize;
            while powers.len() <= e {
                let next = mul_mod(*powers.last().unwrap(), alpha, p);
                powers.push(next);
            }
            let key = m.with_exponent(v, 0);
            let t = mul_mod(c, powers[e], p);
            let slot = acc.entry(key).or_insert(0);
            *slot = add_mod(*slot, t, p);
        }
        ModPoly::from_map(acc)
    }

    /// Views the polynomial as having dense univariate coefficients in `x_v`.
    pub fn group_by(&self, v: usize) -> BTreeMap<Monomial, Vec<u64>> {
        let mut groups: BTreeMap<Monomial, Vec<u64>> = BTreeMap::new();
        for &(m, c) in &self.terms {
            let e = m.exponent(v) as usize;
            let slot = groups.entry(m.with_exponent(v, 0)).or_default();
            if slot.len() <= e {
                slot.resize(e + 1, 0);
            }
            slot[e] = c;
        }
        groups
    }

    pub fn from_groups(groups: &BTreeMap<Monomial, Vec<u64>>, v: usize) -> ModPoly {
        let mut terms = Vec::new();
        for (m, coeffs) in groups {
            for (e, &c) in coeffs.iter().enumerate() {
                if c != 0 {
                    terms.push((m.with_exponent(v, e as u32), c));
                }
            }
        }
        terms.sort_unstable_by(|x, y| y.0.lex_cmp(&x.0));
        ModPoly { terms }
    }

    pub fn mul(&self, other: &ModPoly, p: u64) -> ModPoly {
        let mut acc: HashMap<Monomial, u64> = HashMap::new();
        for &(ma, ca) in &self.terms {
            for &(mb, cb) in &other.terms {
                let slot = acc.entry(ma * mb).or_insert(0);
                *slot = add_mod(*slot, mul_mod(ca, cb, p), p);
            }
        }
        ModPoly::from_map(acc)
    }

    /// Exact quotient, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &ModPoly, p: u64) -> Option<ModPoly> {
        assert!(!d.is_zero());
        let (dm, dc) = d.terms[0];
        let inv = inv_mod(dc, p);
        let mut rem: BTreeMap<LexKey, u64> = self.terms.iter().map(|&(m, c)| (LexKey(m), c)).collect();
        let mut quotient = Vec::new();
        while let Some((LexKey(m), c)) = rem.pop_last() {
            let qm = m.checked_div(dm)?;
            let qc = mul_mod(c, inv, p);
            for &(tm, tc) in &d.terms[1..] {
                let key = LexKey(tm * qm);
                let delta = mul_mod(qc, tc, p);
                let slot = rem.entry(key).or_insert(0);
                *slot = sub_mod(*slot, delta, p);
                if *slot == 0 {
                    rem.remove(&key);
                }
            }
            quotient.push((qm, qc));
        }
        Some(ModPoly { terms: quotient })
    }
}

/// Orders monomials lexicographically inside ordered maps.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) struct LexKey(pub Monomial);

impl PartialOrd for LexKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LexKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.lex_cmp(&other.0)
    }
}

/// True when `c` is divisible by `p`.
pub(crate) fn divisible(c: &BigInt, p: u64) -> bool {
    c.abs().mod_floor(&BigInt::from(p)) == BigInt::from(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_primes_are_prime_and_large() {
        let ps: Vec<u64> = primes().take(3).collect();
        assert!(ps.iter().all(|&p| p > (1 << 61)));
        assert!(ps.windows(2).all(|w| w[0] > w[1]));
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(1_000_000_007 * 3));
    }

    #[test]
    fn univariate_gcd() {
        let p = 101;
        // (x+1)(x+2) and (x+1)(x+3)
        let a = uni::mul(&[1, 1], &[2, 1], p);
        let b = uni::mul(&[1, 1], &[3, 1], p);
        assert_eq!(uni::gcd(&a, &b, p), vec![1, 1]);
    }
}
