//! Packed exponent vectors.
//!
//! A monomial stores up to [`MAX_VARS`] exponents in 16-bit lanes of a `u128`,
//! variable 0 in the most significant lane. Comparing the packed words is then
//! a lexicographic comparison, and prefixing the total degree gives graded lex.

use std::cmp::Ordering;

/// Maximum number of variables a monomial can carry.
pub const MAX_VARS: usize = 8;

const LANE_BITS: u32 = 16;
const LANE_MASK: u128 = 0xffff;

/// Largest exponent a single lane can hold.
pub const MAX_EXPONENT: u32 = 0xffff;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    deg: u32,
    packed: u128,
}

#[inline]
fn shift(var: usize) -> u32 {
    debug_assert!(var < MAX_VARS);
    (MAX_VARS - 1 - var) as u32 * LANE_BITS
}

impl Monomial {
    pub const ONE: Monomial = Monomial { deg: 0, packed: 0 };

    /// The monomial `x_var^exp`.
    pub fn var(var: usize, exp: u32) -> Monomial {
        assert!(var < MAX_VARS, "variable index {var} out of range");
        assert!(exp <= MAX_EXPONENT, "exponent {exp} out of range");
        Monomial { deg: exp, packed: (exp as u128) << shift(var) }
    }

    pub fn from_exponents(exps: &[u32]) -> Monomial {
        assert!(exps.len() <= MAX_VARS);
        let mut m = Monomial::ONE;
        for (v, &e) in exps.iter().enumerate() {
            if e > 0 {
                m = m * Monomial::var(v, e);
            }
        }
        m
    }

    #[inline]
    pub fn degree(self) -> u32 {
        self.deg
    }

    #[inline]
    pub fn exponent(self, var: usize) -> u32 {
        ((self.packed >> shift(var)) & LANE_MASK) as u32
    }

    pub fn exponents(self) -> [u32; MAX_VARS] {
        let mut out = [0; MAX_VARS];
        for (v, o) in out.iter_mut().enumerate() {
            *o = self.exponent(v);
        }
        out
    }

    #[inline]
    pub fn is_one(self) -> bool {
        self.packed == 0
    }

    /// `self / other` if every exponent of `other` is at most the one in `self`.
    pub fn checked_div(self, other: Monomial) -> Option<Monomial> {
        if !self.divisible_by(other) {
            return None;
        }
        Some(Monomial { deg: self.deg - other.deg, packed: self.packed - other.packed })
    }

    pub fn divisible_by(self, other: Monomial) -> bool {
        if other.deg > self.deg {
            return false;
        }
        (0..MAX_VARS).all(|v| self.exponent(v) >= other.exponent(v))
    }

    /// Componentwise minimum of the exponents.
    pub fn gcd(self, other: Monomial) -> Monomial {
        let mut m = Monomial::ONE;
        for v in 0..MAX_VARS {
            let e = self.exponent(v).min(other.exponent(v));
            if e > 0 {
                m = m * Monomial::var(v, e);
            }
        }
        m
    }

    /// Replace the exponent of `var` by `exp`.
    pub fn with_exponent(self, var: usize, exp: u32) -> Monomial {
        let old = self.exponent(var);
        let cleared = self.packed & !(LANE_MASK << shift(var));
        Monomial { deg: self.deg - old + exp, packed: cleared | ((exp as u128) << shift(var)) }
    }

    /// Lexicographic comparison with variable 0 most significant.
    #[inline]
    pub fn lex_cmp(&self, other: &Monomial) -> Ordering {
        self.packed.cmp(&other.packed)
    }

    /// Grlex comparison: total degree first, ties broken lexicographically.
    #[inline]
    pub fn grlex_cmp(&self, other: &Monomial) -> Ordering {
        self.deg.cmp(&other.deg).then(self.packed.cmp(&other.packed))
    }
}

impl std::ops::Mul for Monomial {
    type Output = Monomial;

    fn mul(self, rhs: Monomial) -> Monomial {
        debug_assert!((0..MAX_VARS).all(|v| self.exponent(v) + rhs.exponent(v) <= MAX_EXPONENT), "exponent overflow");
        Monomial { deg: self.deg + rhs.deg, packed: self.packed + rhs.packed }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Monomials are ordered by grlex.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.grlex_cmp(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grlex_prefers_degree_then_earlier_variables() {
        let x0 = Monomial::var(0, 1);
        let x1 = Monomial::var(1, 1);
        let x1sq = Monomial::var(1, 2);
        assert!(x0 > x1);
        assert!(x1sq > x0);
        assert!(x0 * x1 < Monomial::var(0, 2));
        assert!(Monomial::ONE < x1);
    }

    #[test]
    fn lane_access_round_trips() {
        let m = Monomial::from_exponents(&[3, 0, 2, 0, 0, 0, 0, 7]);
        assert_eq!(m.exponent(0), 3);
        assert_eq!(m.exponent(2), 2);
        assert_eq!(m.exponent(7), 7);
        assert_eq!(m.degree(), 12);
        assert_eq!(m.with_exponent(2, 5).exponent(2), 5);
        assert_eq!(m.with_exponent(2, 5).degree(), 15);
    }

    #[test]
    fn division_and_gcd() {
        let a = Monomial::from_exponents(&[2, 1]);
        let b = Monomial::from_exponents(&[1, 3]);
        assert_eq!(a.gcd(b), Monomial::from_exponents(&[1, 1]));
        assert_eq!(a.checked_div(Monomial::var(0, 1)), Some(Monomial::from_exponents(&[1, 1])));
        assert_eq!(a.checked_div(b), None);
    }
}
