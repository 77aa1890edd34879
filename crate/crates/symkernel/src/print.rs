//! Text rendering that the parser reads back to the same canonical value.

use num_traits::{One, Signed};

use crate::expr::Expr;
use crate::monomial::{Monomial, MAX_VARS};
use crate::poly::IntPoly;

fn render_monomial(m: Monomial, names: &[String], out: &mut String) {
    let mut first = true;
    for v in 0..MAX_VARS {
        let e = m.exponent(v);
        if e == 0 {
            continue;
        }
        if !first {
            out.push('*');
        }
        first = false;
        out.push_str(&names[v]);
        if e > 1 {
            out.push('^');
            out.push_str(&e.to_string());
        }
    }
}

/// Renders a polynomial with terms in decreasing grlex order.
pub fn render_poly(p: &IntPoly, names: &[String]) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().iter().enumerate() {
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mag = c.abs();
        if m.is_one() {
            out.push_str(&mag.to_string());
        } else {
            if !mag.is_one() {
                out.push_str(&mag.to_string());
                out.push('*');
            }
            render_monomial(*m, names, &mut out);
        }
    }
    out
}

/// Whether a denominator can follow `/` without parentheses.
fn is_atomic(p: &IntPoly) -> bool {
    match p.terms() {
        [(m, c)] => {
            c.is_positive() && (m.is_one() || (c.is_one() && (0..MAX_VARS).filter(|&v| m.exponent(v) > 0).count() == 1))
        }
        _ => false,
    }
}

pub fn render(e: &Expr, names: &[String]) -> String {
    let num = render_poly(e.numer(), names);
    if e.denom().is_one() {
        return num;
    }
    let num = if e.numer().len() > 1 { format!("({num})") } else { num };
    let den = render_poly(e.denom(), names);
    if is_atomic(e.denom()) {
        format!("{num}/{den}")
    } else {
        format!("{num}/({den})")
    }
}
