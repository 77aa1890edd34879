//! Canonical rational functions.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::SymError;
use crate::gcd::gcd;
use crate::monomial::Monomial;
use crate::poly::IntPoly;

/// A rational function `num / den` with integer polynomial parts.
///
/// The pair is kept canonical: `gcd(num, den) = 1` including integer content,
/// and the grlex leading coefficient of `den` is positive. Two expressions are
/// therefore equal as rational functions exactly when they are equal as Rust
/// values, and an expression is zero exactly when its numerator is.
///
/// Variables are lane indices; names live in the [`Chart`](crate::Chart).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Expr {
    num: IntPoly,
    den: IntPoly,
}

impl Expr {
    pub fn zero() -> Expr {
        Expr { num: IntPoly::zero(), den: IntPoly::one() }
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn int(k: i64) -> Expr {
        Expr::integer(BigInt::from(k))
    }

    pub fn integer(k: BigInt) -> Expr {
        Expr { num: IntPoly::constant(k), den: IntPoly::one() }
    }

    /// The rational constant `n / d`; panics if `d == 0`.
    pub fn frac(n: i64, d: i64) -> Expr {
        Expr::rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn rational(q: BigRational) -> Expr {
        Expr { num: IntPoly::constant(q.numer().clone()), den: IntPoly::constant(q.denom().clone()) }
    }

    pub fn var(v: usize) -> Expr {
        Expr { num: IntPoly::var(v), den: IntPoly::one() }
    }

    pub fn from_poly(p: IntPoly) -> Expr {
        Expr { num: p, den: IntPoly::one() }
    }

    /// Canonicalizes `num / den`.
    pub fn from_parts(num: IntPoly, den: IntPoly) -> Result<Expr, SymError> {
        if den.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        Ok(Expr::reduce(num, den))
    }

    fn reduce(num: IntPoly, den: IntPoly) -> Expr {
        if num.is_zero() {
            return Expr::zero();
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        Expr::fix_sign(num, den)
    }

    fn fix_sign(num: IntPoly, den: IntPoly) -> Expr {
        if den.leading().is_some_and(|t| t.1.is_negative()) {
            Expr { num: num.neg(), den: den.neg() }
        } else {
            Expr { num, den }
        }
    }

    pub fn numer(&self) -> &IntPoly {
        &self.num
    }

    pub fn denom(&self) -> &IntPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        Some(BigRational::new(self.num.as_constant()?, self.den.as_constant()?))
    }

    /// The larger of the numerator and denominator total degrees.
    pub fn total_degree(&self) -> u32 {
        self.num.total_degree().max(self.den.total_degree())
    }

    /// Bit mask of the variables that occur.
    pub fn var_mask(&self) -> u32 {
        self.num.var_mask() | self.den.var_mask()
    }

    pub fn depends_on(&self, v: usize) -> bool {
        self.var_mask() & (1 << v) != 0
    }

    pub fn recip(&self) -> Result<Expr, SymError> {
        if self.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        Ok(Expr::fix_sign(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, other: &Expr) -> Result<Expr, SymError> {
        Ok(self * &other.recip()?)
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i32) -> Result<Expr, SymError> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let k = e.unsigned_abs();
        Ok(Expr { num: base.num.pow(k), den: base.den.pow(k) })
    }

    pub fn scale(&self, q: &BigRational) -> Expr {
        self * &Expr::rational(q.clone())
    }

    /// Exact partial derivative with respect to variable `v`.
    pub fn diff(&self, v: usize) -> Expr {
        let da = self.num.derivative(v);
        if self.den.is_constant() {
            return Expr::reduce(da, self.den.clone());
        }
        let db = self.den.derivative(v);
        if db.is_zero() {
            return Expr::reduce(da, self.den.clone());
        }
        // (a/b)' = (a' b - a b') / b^2; cancel gcd(b, b') before squaring.
        let g = gcd(&self.den, &db);
        let b_red = self.den.div_exact(&g).expect("gcd divides");
        let db_red = db.div_exact(&g).expect("gcd divides");
        let num = da.mul(&b_red).sub(&self.num.mul(&db_red));
        let den = self.den.mul(&b_red);
        Expr::reduce(num, den)
    }

    /// Exact value at a rational point.
    pub fn eval(&self, point: &[BigRational]) -> Result<BigRational, SymError> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(SymError::Pole);
        }
        Ok(self.num.eval(point) / d)
    }

    /// Floating point value; poles give infinities or NaN.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.num.eval_f64(point) / self.den.eval_f64(point)
    }

    /// Splits into coefficients of monomials in the variables of `mask`.
    ///
    /// Fails unless the denominator is free of those variables.
    pub fn split_by_vars(&self, mask: u32) -> Result<BTreeMap<Monomial, Expr>, SymError> {
        if self.den.var_mask() & mask != 0 {
            return Err(SymError::NotPolynomial);
        }
        Ok(self.num.split_by_vars(mask).into_iter().map(|(m, c)| (m, Expr::reduce(c, self.den.clone()))).collect())
    }

    /// Substitutes expressions for variables: `x_v -> images[v]`.
    pub fn compose(&self, images: &[Expr]) -> Result<Expr, SymError> {
        fn poly_at(p: &IntPoly, images: &[Expr]) -> Expr {
            let mut acc = Expr::zero();
            for (m, c) in p.terms() {
                let mut t = Expr::integer(c.clone());
                for (v, img) in images.iter().enumerate() {
                    let e = m.exponent(v);
                    if e > 0 {
                        t = &t * &img.pow(e as i32).expect("nonnegative power");
                    }
                }
                acc += &t;
            }
            acc
        }
        assert!(self.var_mask() >> images.len() == 0, "missing variable images");
        poly_at(&self.num, images).checked_div(&poly_at(&self.den, images))
    }

    fn add_impl(&self, other: &Expr, negate: bool) -> Expr {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { -other } else { other.clone() };
        }
        let c = if negate { other.num.neg() } else { other.num.clone() };
        let (a, b, d) = (&self.num, &self.den, &other.den);
        if b == d {
            return Expr::reduce(a.add(&c), b.clone());
        }
        if b.is_one() {
            return Expr::fix_sign(a.mul(d).add(&c), d.clone());
        }
        if d.is_one() {
            return Expr::fix_sign(a.add(&c.mul(b)), b.clone());
        }
        let g = gcd(b, d);
        if g.is_one() {
            // Coprime denominators: the cross sum is already reduced.
            return Expr::fix_sign(a.mul(d).add(&c.mul(b)), b.mul(d));
        }
        let b1 = b.div_exact(&g).expect("gcd divides");
        let d1 = d.div_exact(&g).expect("gcd divides");
        let num = a.mul(&d1).add(&c.mul(&b1));
        let den = b1.mul(d);
        if num.is_zero() {
            return Expr::zero();
        }
        // Only factors of g can cancel.
        let g2 = gcd(&num, &g);
        if g2.is_one() {
            Expr::fix_sign(num, den)
        } else {
            Expr::fix_sign(num.div_exact(&g2).expect("gcd divides"), den.div_exact(&g2).expect("gcd divides"))
        }
    }

    fn mul_impl(&self, other: &Expr) -> Expr {
        if self.is_zero() || other.is_zero() {
            return Expr::zero();
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let a = if g1.is_one() { self.num.clone() } else { self.num.div_exact(&g1).expect("gcd divides") };
        let d = if g1.is_one() { other.den.clone() } else { other.den.div_exact(&g1).expect("gcd divides") };
        let c = if g2.is_one() { other.num.clone() } else { other.num.div_exact(&g2).expect("gcd divides") };
        let b = if g2.is_one() { self.den.clone() } else { self.den.div_exact(&g2).expect("gcd divides") };
        Expr::fix_sign(a.mul(&c), b.mul(&d))
    }
}

impl Default for Expr {
    fn default() -> Expr {
        Expr::zero()
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..crate::monomial::MAX_VARS).map(|i| format!("v{i}")).collect();
        write!(f, "Expr({})", crate::print::render(self, &names))
    }
}

impl From<i64> for Expr {
    fn from(k: i64) -> Expr {
        Expr::int(k)
    }
}

impl From<BigRational> for Expr {
    fn from(q: BigRational) -> Expr {
        Expr::rational(q)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr { num: self.num.neg(), den: self.den.clone() }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl Add<&Expr> for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        self.add_impl(rhs, false)
    }
}

impl Sub<&Expr> for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        self.add_impl(rhs, true)
    }
}

impl Mul<&Expr> for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        self.mul_impl(rhs)
    }
}

/// Panics on division by an identically zero expression.
impl Div<&Expr> for &Expr {
    type Output = Expr;
    fn div(self, rhs: &Expr) -> Expr {
        self.checked_div(rhs).expect("division by zero expression")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                (&self).$method(rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&Expr> for Expr {
    fn add_assign(&mut self, rhs: &Expr) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Expr> for Expr {
    fn sub_assign(&mut self, rhs: &Expr) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Expr> for Expr {
    fn mul_assign(&mut self, rhs: &Expr) {
        *self = &*self * rhs;
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        let mut acc = Expr::zero();
        for e in iter {
            acc += &e;
        }
        acc
    }
}
