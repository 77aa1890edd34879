//! Multivariate polynomial gcd over the integers.
//!
//! Brown's dense modular algorithm: images modulo word-sized primes are
//! computed by evaluating one variable at a time and rebuilding it by Newton
//! interpolation, then the integer gcd is recovered by Chinese remaindering
//! and confirmed by trial division.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::modp::{divisible, inv_mod, mul_mod, primes, reduce_big, sub_mod, uni, LexKey, ModPoly};
use crate::monomial::{Monomial, MAX_VARS};
use crate::poly::IntPoly;

/// Greatest common divisor with positive grlex leading coefficient.
///
/// The integer content is included, so `gcd(6x, 4x) = 2x`.
pub fn gcd(a: &IntPoly, b: &IntPoly) -> IntPoly {
    if a.is_zero() {
        return normalize_sign(b.clone());
    }
    if b.is_zero() {
        return normalize_sign(a.clone());
    }
    let ca = a.content();
    let cb = b.content();
    let c = ca.gcd(&cb);
    if a.is_constant() || b.is_constant() {
        return IntPoly::constant(c);
    }
    let pa = a.div_int_exact(&ca);
    let pb = b.div_int_exact(&cb);
    if pa == pb || pa == pb.neg() {
        return normalize_sign(pa.scale(&c));
    }
    if pa.len() == 1 || pb.len() == 1 {
        let (single, other) = if pa.len() == 1 { (&pa, &pb) } else { (&pb, &pa) };
        let mut m = single.terms()[0].0;
        for (t, _) in other.terms() {
            m = m.gcd(*t);
            if m.is_one() {
                break;
            }
        }
        return IntPoly::monomial(m, c);
    }
    let g = primitive_gcd(&pa, &pb);
    normalize_sign(g.scale(&c))
}

fn normalize_sign(p: IntPoly) -> IntPoly {
    match p.leading() {
        Some((_, c)) if c.is_negative() => p.neg(),
        _ => p,
    }
}

/// Gcd of two primitive, nonconstant polynomials; the result is primitive.
fn primitive_gcd(a: &IntPoly, b: &IntPoly) -> IntPoly {
    // Divisibility is common in rational-function arithmetic and cheap to test.
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if large.div_exact(small).is_some() {
        return small.clone();
    }
    let mask = a.var_mask() | b.var_mask();
    let vars: Vec<usize> = (0..MAX_VARS).filter(|v| mask & (1 << v) != 0).collect();
    let lca = a.lex_leading().expect("nonzero").1.clone();
    let lcb = b.lex_leading().expect("nonzero").1.clone();
    let gamma = lca.gcd(&lcb);

    let mut residues: BTreeMap<LexKey, BigInt> = BTreeMap::new();
    let mut modulus = BigInt::one();
    let mut lead: Option<Monomial> = None;

    for p in primes() {
        if divisible(&lca, p) || divisible(&lcb, p) {
            continue;
        }
        let ap = ModPoly::from_int(a, p);
        let bp = ModPoly::from_int(b, p);
        let image = modular_gcd(&ap, &bp, &vars, p);
        if image.is_constant() {
            return IntPoly::one();
        }
        let image = image.scale(reduce_big(&gamma, p), p);
        let lm = image.lm();
        match lead {
            Some(cur) if lm.lex_cmp(&cur).is_gt() => continue,
            Some(cur) if lm.lex_cmp(&cur).is_eq() => {}
            _ => {
                residues.clear();
                modulus = BigInt::one();
                lead = Some(lm);
            }
        }
        let first = modulus.is_one();
        let image_terms: BTreeMap<LexKey, u64> = image.terms.iter().map(|&(m, c)| (LexKey(m), c)).collect();
        let stable = !first && agrees_mod(&residues, &modulus, &image_terms, p);
        if stable {
            let candidate = symmetric_poly(&residues, &modulus).primitive_part();
            if a.div_exact(&candidate).is_some() && b.div_exact(&candidate).is_some() {
                return candidate;
            }
        }
        crt_combine(&mut residues, &mut modulus, &image_terms, p);
    }
    unreachable!("prime supply exhausted")
}

fn symmetric(r: &BigInt, modulus: &BigInt) -> BigInt {
    if r * 2 > *modulus {
        r - modulus
    } else {
        r.clone()
    }
}

fn symmetric_poly(residues: &BTreeMap<LexKey, BigInt>, modulus: &BigInt) -> IntPoly {
    IntPoly::from_terms(residues.iter().map(|(k, r)| (k.0, symmetric(r, modulus))))
}

/// Whether the symmetric lift of the accumulated residues reduces to `image`.
fn agrees_mod(residues: &BTreeMap<LexKey, BigInt>, modulus: &BigInt, image: &BTreeMap<LexKey, u64>, p: u64) -> bool {
    for (k, r) in residues {
        let expected = reduce_big(&symmetric(r, modulus), p);
        if image.get(k).copied().unwrap_or(0) != expected {
            return false;
        }
    }
    image.keys().all(|k| residues.contains_key(k))
}

fn crt_combine(residues: &mut BTreeMap<LexKey, BigInt>, modulus: &mut BigInt, image: &BTreeMap<LexKey, u64>, p: u64) {
    let pb = BigInt::from(p);
    let m_mod_p = reduce_big(modulus, p);
    let m_inv = inv_mod(m_mod_p, p);
    let keys: Vec<LexKey> = residues.keys().chain(image.keys()).copied().collect();
    for k in keys {
        let r = residues.get(&k).cloned().unwrap_or_default();
        let g = image.get(&k).copied().unwrap_or(0);
        let r_mod_p = reduce_big(&r, p);
        let t = mul_mod(sub_mod(g, r_mod_p, p), m_inv, p);
        let combined = &r + &*modulus * BigInt::from(t);
        residues.insert(k, combined);
    }
    *modulus *= pb;
    residues.retain(|_, r| !r.is_zero());
}

/// Monic gcd modulo `p` of polynomials in the variables `vars`.
pub(crate) fn modular_gcd(a: &ModPoly, b: &ModPoly, vars: &[usize], p: u64) -> ModPoly {
    if a.is_zero() {
        return b.monic(p);
    }
    if b.is_zero() {
        return a.monic(p);
    }
    if a.is_constant() || b.is_constant() {
        return one();
    }
    if vars.len() == 1 {
        let v = vars[0];
        let ua = dense(a, v);
        let ub = dense(b, v);
        let g = uni::gcd(&ua, &ub, p);
        return from_dense(&g, v);
    }
    let z = *vars.last().unwrap();
    let rest = &vars[..vars.len() - 1];

    let ga = a.group_by(z);
    let gb = b.group_by(z);
    let cont_a = groups_content(&ga, p);
    let cont_b = groups_content(&gb, p);
    let cont = uni::gcd(&cont_a, &cont_b, p);
    let ga = divide_groups(&ga, &cont_a, p);
    let gb = divide_groups(&gb, &cont_b, p);
    let a1 = ModPoly::from_groups(&ga, z);
    let b1 = ModPoly::from_groups(&gb, z);

    let la = lex_leading_group(&ga);
    let lb = lex_leading_group(&gb);
    let g = uni::gcd(la, lb, p);
    let bound = a1.degree_in(z).min(b1.degree_in(z)) as usize + uni::degree(&g);

    let mut interp: BTreeMap<Monomial, Vec<u64>> = BTreeMap::new();
    let mut newton: Vec<u64> = vec![1];
    let mut points = 0usize;
    let mut lead: Option<Monomial> = None;

    for alpha in 1..p {
        let g_alpha = uni::eval(&g, alpha, p);
        if g_alpha == 0 {
            continue;
        }
        let image = modular_gcd(&a1.eval_var(z, alpha, p), &b1.eval_var(z, alpha, p), rest, p);
        if image.is_constant() {
            return from_dense(&cont, z);
        }
        let image = image.scale(g_alpha, p);
        let lm = image.lm();
        match lead {
            Some(cur) if lm.lex_cmp(&cur).is_gt() => continue,
            Some(cur) if lm.lex_cmp(&cur).is_eq() => {}
            _ => {
                interp.clear();
                newton = vec![1];
                points = 0;
                lead = Some(lm);
            }
        }

        let m_inv = inv_mod(uni::eval(&newton, alpha, p), p);
        let mut changed = false;
        let mut keys: Vec<Monomial> = interp.keys().copied().collect();
        keys.extend(image.terms.iter().map(|t| t.0));
        keys.sort_unstable();
        keys.dedup();
        let target: BTreeMap<Monomial, u64> = image.terms.iter().copied().collect();
        for k in keys {
            let current = interp.get(&k).map_or(0, |c| uni::eval(c, alpha, p));
            let want = target.get(&k).copied().unwrap_or(0);
            let diff = sub_mod(want, current, p);
            if diff != 0 {
                changed = true;
                let delta = uni::scale(&newton, mul_mod(diff, m_inv, p), p);
                let entry = interp.entry(k).or_default();
                *entry = uni::add(entry, &delta, p);
                if entry.is_empty() {
                    interp.remove(&k);
                }
            }
        }
        newton = uni::mul(&newton, &[p - alpha, 1], p);
        points += 1;

        if (points > 1 && !changed) || points > bound {
            let cont_h = groups_content(&interp, p);
            let h = ModPoly::from_groups(&divide_groups(&interp, &cont_h, p), z);
            if a1.div_exact(&h, p).is_some() && b1.div_exact(&h, p).is_some() {
                let cont_poly = from_dense(&cont, z);
                return h.mul(&cont_poly, p).monic(p);
            }
            if points > bound {
                interp.clear();
                newton = vec![1];
                points = 0;
                lead = None;
            }
        }
    }
    unreachable!("ran out of evaluation points")
}

fn one() -> ModPoly {
    ModPoly { terms: vec![(Monomial::ONE, 1)] }
}

fn dense(a: &ModPoly, v: usize) -> Vec<u64> {
    let mut out = vec![0; a.degree_in(v) as usize + 1];
    for &(m, c) in &a.terms {
        out[m.exponent(v) as usize] = c;
    }
    uni::trim(&mut out);
    out
}

fn from_dense(a: &[u64], v: usize) -> ModPoly {
    let mut terms: Vec<(Monomial, u64)> =
        a.iter().enumerate().filter(|(_, &c)| c != 0).map(|(e, &c)| (Monomial::var(v, e as u32), c)).collect();
    terms.reverse();
    ModPoly { terms }
}

fn groups_content(groups: &BTreeMap<Monomial, Vec<u64>>, p: u64) -> Vec<u64> {
    let mut g: Vec<u64> = Vec::new();
    for c in groups.values() {
        g = uni::gcd(&g, c, p);
        if g.len() == 1 {
            break;
        }
    }
    g
}

fn divide_groups(groups: &BTreeMap<Monomial, Vec<u64>>, d: &[u64], p: u64) -> BTreeMap<Monomial, Vec<u64>> {
    if d.len() <= 1 {
        return groups.clone();
    }
    groups
        .iter()
        .map(|(k, c)| {
            let (q, r) = uni::divrem(c, d, p);
            debug_assert!(r.is_empty());
            (*k, q)
        })
        .collect()
}

fn lex_leading_group(groups: &BTreeMap<Monomial, Vec<u64>>) -> &[u64] {
    groups.iter().max_by(|x, y| x.0.lex_cmp(y.0)).map(|(_, c)| c.as_slice()).expect("nonzero polynomial")
}
