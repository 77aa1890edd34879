//! Exact real-root classification of binary quartics
//! `C4 a1⁴ + 4 C3 a1³ a2 + 6 C2 a1² a2² + 4 C1 a1 a2³ + C0 a2⁴` over `ℝP¹`.
//!
//! The form is dehomogenized at `a2 = 1` to `q(s)`, with `s = a1/a2`; the point
//! `[1:0]` is a root of multiplicity `4 − deg q`. The finite roots come from a
//! squarefree decomposition of `q` and Sturm sequences, so the multiplicity
//! partition and the reality of every root are decided exactly. Rational roots
//! are found exactly; irrational real roots carry their algebraic degree.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A univariate polynomial over ℚ, coefficients in increasing degree, trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
struct UPoly(Vec<BigRational>);

impl UPoly {
    fn new(mut c: Vec<BigRational>) -> UPoly {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        UPoly(c)
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with the zero polynomial at `None`.
    fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn lc(&self) -> &BigRational {
        self.0.last().expect("nonzero polynomial")
    }

    fn eval(&self, x: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    fn derivative(&self) -> UPoly {
        UPoly::new(self.0.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(i.into())).collect())
    }

    fn monic(&self) -> UPoly {
        let lc = self.lc().clone();
        UPoly(self.0.iter().map(|c| c / &lc).collect())
    }

    fn divrem(&self, d: &UPoly) -> (UPoly, UPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let mut r = self.0.clone();
        let mut q = vec![BigRational::zero(); r.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let shift = r.len() - 1 - dd;
            let k = r.last().expect("nonempty") / d.lc();
            for (i, c) in d.0.iter().enumerate() {
                r[shift + i] -= &k * c;
            }
            q[shift] = k;
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        (UPoly::new(q), UPoly::new(r))
    }

    fn gcd(&self, other: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// Scaled to a primitive integer polynomial with positive leading coefficient.
    fn primitive_integer(&self) -> Vec<BigInt> {
        let lcm = self.0.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> =
            self.0.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sign = if ints.last().is_some_and(|c| c.is_negative()) { -BigInt::one() } else { BigInt::one() };
        ints.into_iter().map(|c| c / &g * &sign).collect()
    }

    fn sign_at(&self, x: &BigRational) -> i32 {
        sign(&self.eval(x))
    }
}

fn sign(x: &BigRational) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Yun's algorithm: `f = c · Π s_m^m` with each `s_m` squarefree and monic.
fn squarefree_decomposition(f: &UPoly) -> Vec<(UPoly, u32)> {
    let mut out = Vec::new();
    let df = f.derivative();
    let a0 = f.gcd(&df);
    let mut b = f.divrem(&a0).0;
    let mut c = df.divrem(&a0).0;
    let mut d = &c - &b.derivative();
    let mut m = 1;
    while b.degree().is_some_and(|deg| deg > 0) {
        let a = b.gcd(&d);
        if a.degree().is_some_and(|deg| deg > 0) {
            out.push((a.clone(), m));
        }
        b = b.divrem(&a).0;
        c = d.divrem(&a).0;
        d = &c - &b.derivative();
        m += 1;
    }
    out
}

impl std::ops::Sub for &UPoly {
    type Output = UPoly;
    fn sub(self, other: &UPoly) -> UPoly {
        let len = self.0.len().max(other.0.len());
        let zero = BigRational::zero();
        UPoly::new((0..len).map(|i| self.0.get(i).unwrap_or(&zero) - other.0.get(i).unwrap_or(&zero)).collect())
    }
}

struct Sturm(Vec<UPoly>);

impl Sturm {
    fn new(f: &UPoly) -> Sturm {
        let mut seq = vec![f.clone(), f.derivative()];
        while !seq.last().expect("nonempty").is_zero() {
            let n = seq.len();
            let r = seq[n - 2].divrem(&seq[n - 1]).1;
            seq.push(UPoly(r.0.iter().map(|c| -c).collect()));
        }
        seq.pop();
        Sturm(seq)
    }

    fn changes(signs: impl Iterator<Item = i32>) -> usize {
        let nonzero: Vec<i32> = signs.filter(|&s| s != 0).collect();
        nonzero.windows(2).filter(|w| w[0] != w[1]).count()
    }

    fn variations_at(&self, x: &BigRational) -> usize {
        Sturm::changes(self.0.iter().map(|p| p.sign_at(x)))
    }

    fn variations_at_infinity(&self, positive: bool) -> usize {
        Sturm::changes(self.0.iter().map(|p| {
            let s = sign(p.lc());
            let odd = p.degree().unwrap_or(0) % 2 == 1;
            if !positive && odd {
                -s
            } else {
                s
            }
        }))
    }

    /// Distinct real roots in `(lo, hi]`.
    fn count(&self, lo: &BigRational, hi: &BigRational) -> usize {
        self.variations_at(lo) - self.variations_at(hi)
    }

    fn count_all(&self) -> usize {
        self.variations_at_infinity(false) - self.variations_at_infinity(true)
    }
}

fn cauchy_bound(f: &UPoly) -> BigRational {
    let lc = f.lc().abs();
    let m =
        f.0.iter()
            .take(f.0.len() - 1)
            .map(|c| c.abs() / &lc)
            .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
    m + BigRational::one()
}

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

/// Disjoint intervals `(lo, hi]`, each holding exactly one root of squarefree `f`.
fn isolate(f: &UPoly, sturm: &Sturm) -> Vec<(BigRational, BigRational)> {
    let b = cauchy_bound(f);
    let mut stack = vec![(-b.clone(), b)];
    let mut out = Vec::new();
    while let Some((lo, hi)) = stack.pop() {
        match sturm.count(&lo, &hi) {
            0 => {}
            1 => out.push((lo, hi)),
            _ => {
                let mid = (&lo + &hi) * half();
                stack.push((mid.clone(), hi));
                stack.push((lo, mid));
            }
        }
    }
    out.sort();
    out
}

fn refine(sturm: &Sturm, lo: &mut BigRational, hi: &mut BigRational, width: &BigRational) {
    while &(&*hi - &*lo) >= width {
        let mid = (&*lo + &*hi) * half();
        if sturm.count(lo, &mid) == 1 {
            *hi = mid;
        } else {
            *lo = mid;
        }
    }
}

fn floor(x: &BigRational) -> BigInt {
    x.floor().to_integer()
}

/// The rational with the smallest denominator strictly inside `(a, b)`, or
/// inside `(a, ∞)` when `b` is `None`.
fn simplest_between(a: &BigRational, b: Option<&BigRational>) -> BigRational {
    let fa = floor(a);
    let next = BigRational::from_integer(&fa + 1);
    match b {
        None => next,
        Some(b) if &next < b => next,
        Some(b) => {
            let base = BigRational::from_integer(fa);
            // a and b lie in [fa, fa + 1]; invert the fractional parts.
            let lo = (b - &base).recip();
            let frac_a = a - &base;
            let hi = if frac_a.is_zero() { None } else { Some(frac_a.recip()) };
            base + simplest_between(&lo, hi.as_ref()).recip()
        }
    }
}

/// The exact root in `(lo, hi]` if it is rational.
fn rational_root(f: &UPoly, sturm: &Sturm, mut lo: BigRational, mut hi: BigRational) -> Option<BigRational> {
    if f.eval(&hi).is_zero() {
        return Some(hi);
    }
    let lc = BigRational::from_integer(f.primitive_integer().last().expect("nonzero").clone());
    // Two distinct fractions with denominators at most |lc| are at least 1/lc² apart.
    let width = (&lc * &lc).recip();
    refine(sturm, &mut lo, &mut hi, &width);
    if f.eval(&hi).is_zero() {
        return Some(hi);
    }
    let candidate = simplest_between(&lo, Some(&hi));
    f.eval(&candidate).is_zero().then_some(candidate)
}

fn approx(sturm: &Sturm, mut lo: BigRational, mut hi: BigRational) -> f64 {
    let width = BigRational::new(1.into(), BigInt::from(10).pow(30));
    refine(sturm, &mut lo, &mut hi, &width);
    hi.to_f64().unwrap_or(f64::NAN)
}

/// Coefficients `(C0, C1, C2, C3, C4)` of the quartic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuarticCoefficients(pub [BigRational; 5]);

impl QuarticCoefficients {
    /// From `(C4, C3, C2, C1, C0)`, the order in which the form is written.
    pub fn from_descending(c: [BigRational; 5]) -> QuarticCoefficients {
        let [c4, c3, c2, c1, c0] = c;
        QuarticCoefficients([c0, c1, c2, c3, c4])
    }

    /// `C_k`.
    pub fn get(&self, k: usize) -> &BigRational {
        &self.0[k]
    }

    /// Coefficients of `q(s)` in increasing degree: `C0, 4C1, 6C2, 4C3, C4`.
    pub fn dehomogenized(&self) -> [BigRational; 5] {
        let w = [1, 4, 6, 4, 1];
        std::array::from_fn(|k| &self.0[k] * BigRational::from_integer(w[k].into()))
    }

    pub fn scale(&self, lambda: &BigRational) -> QuarticCoefficients {
        QuarticCoefficients(std::array::from_fn(|k| &self.0[k] * lambda))
    }
}

/// A point of `ℝP¹`.
#[derive(Clone, Debug, PartialEq)]
pub enum RootPoint {
    /// `[a1 : a2]` with coprime integers and `a2 >= 0` (`[1:0]` is infinity).
    Rational { a1: BigInt, a2: BigInt },
    /// An irrational real root of the given algebraic degree over ℚ.
    Algebraic { degree: u32, approx: f64 },
}

impl RootPoint {
    fn from_rational(s: &BigRational) -> RootPoint {
        RootPoint::Rational { a1: s.numer().clone(), a2: s.denom().clone() }
    }

    pub fn infinity() -> RootPoint {
        RootPoint::Rational { a1: BigInt::one(), a2: BigInt::zero() }
    }

    /// The affine value `a1/a2`, infinite at `[1:0]`.
    pub fn value(&self) -> f64 {
        match self {
            RootPoint::Rational { a2, .. } if a2.is_zero() => f64::INFINITY,
            RootPoint::Rational { a1, a2 } => BigRational::new(a1.clone(), a2.clone()).to_f64().unwrap_or(f64::NAN),
            RootPoint::Algebraic { approx, .. } => *approx,
        }
    }
}

impl fmt::Display for RootPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootPoint::Rational { a1, a2 } => write!(f, "[{a1}:{a2}]"),
            RootPoint::Algebraic { degree, approx } => write!(f, "algebraic(degree {degree}, ~{approx:.12})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealRoot {
    pub point: RootPoint,
    pub multiplicity: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RootType {
    /// The form vanishes identically.
    Zero,
    Typed {
        /// Distinct real roots in increasing affine value, `[1:0]` last.
        real: Vec<RealRoot>,
        /// Multiplicity of each pair of complex-conjugate roots, ascending.
        complex_pairs: Vec<u32>,
    },
}

impl RootType {
    /// Sorted real multiplicities and sorted complex-pair multiplicities.
    pub fn partition(&self) -> Option<(Vec<u32>, Vec<u32>)> {
        match self {
            RootType::Zero => None,
            RootType::Typed { real, complex_pairs } => {
                let mut r: Vec<u32> = real.iter().map(|x| x.multiplicity).collect();
                r.sort_unstable();
                Some((r, complex_pairs.clone()))
            }
        }
    }

    /// One real root of multiplicity four.
    pub fn is_type_n(&self) -> bool {
        matches!(self, RootType::Typed { real, .. } if real.len() == 1 && real[0].multiplicity == 4)
    }
}

/// Algebraic degree of the real roots of an irreducible-over-ℚ candidate,
/// testing a quartic for a split into two rational quadratics.
fn real_root_degree(f: &UPoly, real_approx: &[f64]) -> u32 {
    let deg = f.degree().expect("nonzero") as u32;
    if deg != 4 {
        return deg;
    }
    let ints = f.primitive_integer();
    let lc = ints[4].to_f64().unwrap_or(f64::NAN);
    let quadratic_divides = |r1: f64, r2: f64| -> bool {
        let coeffs = [lc * r1 * r2, -lc * (r1 + r2), lc];
        if coeffs.iter().any(|c| !c.is_finite() || c.abs() > 1e15) {
            return false;
        }
        let q = UPoly::new(coeffs.iter().map(|c| BigRational::from_integer(BigInt::from(c.round() as i64))).collect());
        q.degree() == Some(2) && f.divrem(&q).1.is_zero()
    };
    let splits = match real_approx {
        [a, b] => quadratic_divides(*a, *b),
        [a, b, c, d] => quadratic_divides(*a, *b) || quadratic_divides(*a, *c) || quadratic_divides(*a, *d),
        _ => false,
    };
    if splits {
        2
    } else {
        4
    }
}

pub fn classify_quartic(c: &QuarticCoefficients) -> RootType {
    let q = UPoly::new(c.dehomogenized().to_vec());
    let Some(deg) = q.degree() else {
        return RootType::Zero;
    };
    let mut real: Vec<RealRoot> = Vec::new();
    let mut complex_pairs = Vec::new();
    let at_infinity = 4 - deg as u32;
    for (factor, m) in squarefree_decomposition(&q) {
        let sturm = Sturm::new(&factor);
        let intervals = isolate(&factor, &sturm);
        let mut residual = factor.clone();
        let mut irrational = Vec::new();
        for (lo, hi) in intervals {
            match rational_root(&factor, &sturm, lo.clone(), hi.clone()) {
                Some(r) => {
                    residual = residual.divrem(&UPoly::new(vec![-r.clone(), BigRational::one()])).0;
                    real.push(RealRoot { point: RootPoint::from_rational(&r), multiplicity: m });
                }
                None => irrational.push(approx(&sturm, lo, hi)),
            }
        }
        let fdeg = factor.degree().expect("nonzero");
        let nonreal = fdeg - (sturm.count_all());
        complex_pairs.extend(std::iter::repeat_n(m, nonreal / 2));
        if !irrational.is_empty() {
            let degree = real_root_degree(&residual, &irrational);
            for x in irrational {
                real.push(RealRoot { point: RootPoint::Algebraic { degree, approx: x }, multiplicity: m });
            }
        }
    }
    if at_infinity > 0 {
        real.push(RealRoot { point: RootPoint::infinity(), multiplicity: at_infinity });
    }
    real.sort_by(|a, b| a.point.value().partial_cmp(&b.point.value()).unwrap_or(Ordering::Equal));
    complex_pairs.sort_unstable();
    RootType::Typed { real, complex_pairs }
}
