//! Named geometries and independent numeric oracles shared by the test suites.
#![allow(dead_code)]

use std::sync::Arc;

use num_rational::BigRational;
use projconf::{Connection, Metric, Signature, WeylStructure};
use symkernel::{rat, Chart, Expr};

pub fn chart(n: usize) -> Arc<Chart> {
    Arc::new(Chart::new(n).unwrap())
}

pub fn fibered_chart() -> Arc<Chart> {
    Arc::new(Chart::new(3).unwrap().fibered().unwrap())
}

pub fn parse(c: &Chart, s: &str) -> Expr {
    c.parse(s).unwrap()
}

fn radius_squared(c: &Chart) -> Expr {
    (0..c.dim()).map(|i| &Expr::var(i) * &Expr::var(i)).sum()
}

pub fn flat(c: &Arc<Chart>) -> Metric {
    Metric::flat(c, Signature::Riemannian)
}

pub fn conformally_flat_metric(c: &Arc<Chart>, factor: &Expr) -> Metric {
    Metric::diagonal(c, Signature::Riemannian, &vec![factor.clone(); c.dim()]).unwrap()
}

/// `4/(1+|x|²)² δ`, the unit round sphere in stereographic coordinates.
pub fn sphere(c: &Arc<Chart>) -> Metric {
    let d = &Expr::one() + &radius_squared(c);
    conformally_flat_metric(c, &(&Expr::int(4) / &(&d * &d)))
}

/// `4/(1−|x|²)² δ`, the Poincaré ball.
pub fn hyperbolic_ball(c: &Arc<Chart>) -> Metric {
    let d = &Expr::one() - &radius_squared(c);
    conformally_flat_metric(c, &(&Expr::int(4) / &(&d * &d)))
}

/// `δ/(1−|x|²) + (x·dx)²/(1−|x|²)²`, the Klein ball.
pub fn klein(c: &Arc<Chart>) -> Metric {
    let d = &Expr::one() - &radius_squared(c);
    let inv = d.recip().unwrap();
    let inv2 = &inv * &inv;
    Metric::from_fn(c, Signature::Riemannian, |i, j| {
        let mut e = &(&Expr::var(i) * &Expr::var(j)) * &inv2;
        if i == j {
            e += &inv;
        }
        e
    })
    .unwrap()
}

/// `diag(1, 1+x0², 1+x1²)`.
pub fn warped3(c: &Arc<Chart>) -> Metric {
    Metric::diagonal(c, Signature::Riemannian, &[Expr::one(), parse(c, "1+x0^2"), parse(c, "1+x1^2")]).unwrap()
}

pub fn levi_civita_structure(g: Metric) -> WeylStructure {
    WeylStructure::metric_only(g)
}

pub fn point(values: &[(i64, i64)]) -> Vec<BigRational> {
    values.iter().map(|&(a, b)| rat(a, b)).collect()
}

/// Three fixed sample points of a chart, avoiding the unit sphere and the origin.
pub fn sample_points(n: usize) -> Vec<Vec<BigRational>> {
    let raw = [(1, 3), (-1, 5), (2, 7), (1, 4), (-2, 9), (1, 6)];
    (0..3)
        .map(|s| {
            (0..n)
                .map(|i| {
                    let (a, b) = raw[(i + 2 * s) % raw.len()];
                    rat(a * (s as i64 + 1), b)
                })
                .collect()
        })
        .collect()
}

/// Christoffel symbols and their first derivatives at a point, from the
/// Expr entries alone.
struct Jet {
    g: Vec<Vec<Vec<BigRational>>>,
    dg: Vec<Vec<Vec<Vec<BigRational>>>>,
}

fn jet(conn: &Connection, at: &[BigRational]) -> Jet {
    let n = conn.dim();
    let mut g = vec![vec![vec![BigRational::from_integer(0.into()); n]; n]; n];
    let mut dg = vec![vec![vec![vec![BigRational::from_integer(0.into()); n]; n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let e = conn.get(i, j, k);
                g[i][j][k] = e.eval(at).unwrap();
                for d in 0..n {
                    dg[d][i][j][k] = e.diff(d).eval(at).unwrap();
                }
            }
        }
    }
    Jet { g, dg }
}

/// `R^i_{jkl}` at a point, evaluated directly from its defining formula.
pub fn riemann_at(conn: &Connection, at: &[BigRational]) -> Vec<Vec<Vec<Vec<BigRational>>>> {
    let n = conn.dim();
    let Jet { g, dg } = jet(conn, at);
    let zero = BigRational::from_integer(0.into());
    let mut r = vec![vec![vec![vec![zero.clone(); n]; n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut v = &dg[k][i][l][j] - &dg[l][i][k][j];
                    for m in 0..n {
                        v += &g[i][k][m] * &g[m][l][j] - &g[i][l][m] * &g[m][k][j];
                    }
                    r[i][j][k][l] = v;
                }
            }
        }
    }
    r
}

/// `R_{jl} = R^i_{jil}` at a point.
pub fn ricci_at(conn: &Connection, at: &[BigRational]) -> Vec<Vec<BigRational>> {
    let r = riemann_at(conn, at);
    let n = conn.dim();
    (0..n).map(|j| (0..n).map(|l| (0..n).map(|i| r[i][j][i][l].clone()).sum()).collect()).collect()
}

/// `∇_k g_{ij} − 2 β_k g_{ij}` at a point, with `∇` given by `conn`.
pub fn nonmetricity_at(conn: &Connection, g: &Metric, beta: &[Expr], at: &[BigRational]) -> Vec<BigRational> {
    let n = conn.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut v = g.get(i, j).diff(k).eval(at).unwrap();
                for m in 0..n {
                    v -= conn.get(m, k, i).eval(at).unwrap() * g.get(m, j).eval(at).unwrap();
                    v -= conn.get(m, k, j).eval(at).unwrap() * g.get(i, m).eval(at).unwrap();
                }
                v -= rat(2, 1) * beta[k].eval(at).unwrap() * g.get(i, j).eval(at).unwrap();
                out.push(v);
            }
        }
    }
    out
}

pub fn all_zero(v: &[BigRational]) -> bool {
    v.iter().all(|x| x == &BigRational::from_integer(0.into()))
}

/// Solves a square rational system by Gauss–Jordan elimination; `None` when singular.
pub fn gauss_solve(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = b.len();
    let zero = BigRational::from_integer(0.into());
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r][col] != zero)?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = BigRational::from_integer(1.into()) / &a[col][col];
        for c in col..n {
            a[col][c] = &a[col][c] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r != col && a[r][col] != zero {
                let factor = a[r][col].clone();
                for c in col..n {
                    let v = &factor * &a[col][c];
                    a[r][c] -= v;
                }
                let v = &factor * &b[col];
                b[r] -= v;
            }
        }
    }
    Some(b)
}

/// Metric components and inverse at a point.
pub fn metric_at(g: &Metric, at: &[BigRational]) -> (Vec<Vec<BigRational>>, Vec<Vec<BigRational>>) {
    let n = g.dim();
    let m = (0..n).map(|i| (0..n).map(|j| g.get(i, j).eval(at).unwrap()).collect()).collect();
    let inv = (0..n).map(|i| (0..n).map(|j| g.inv(i, j).eval(at).unwrap()).collect()).collect();
    (m, inv)
}

/// Conformal Rho at a point, found by solving `C^i_{jil} = 0` for the `n²`
/// unknowns `P_{jl}`, where `C` is the conformal curvature ansatz built on the
/// oracle Riemann tensor of `conn`.
pub fn rho_by_trace_solve(conn: &Connection, g: &Metric, at: &[BigRational]) -> Vec<Vec<BigRational>> {
    let n = conn.dim();
    let ric = ricci_at(conn, at);
    let (gm, gi) = metric_at(g, at);
    let zero = BigRational::from_integer(0.into());
    // Unknown index u = a*n + b stands for P_{ab}. The i–k trace of the
    // ansatz is linear in P; assemble its matrix column by column.
    let mut a = vec![vec![zero.clone(); n * n]; n * n];
    for pa in 0..n {
        for pb in 0..n {
            let u = pa * n + pb;
            let p = |x: usize, y: usize| if (x, y) == (pa, pb) { rat(1, 1) } else { rat(0, 1) };
            let p_up = |i: usize, k: usize| gi[i][pa].clone() * p(pa, k);
            for j in 0..n {
                for l in 0..n {
                    let mut v = zero.clone();
                    for i in 0..n {
                        let k = i;
                        v += p(j, l);
                        if i == l {
                            v -= p(j, k);
                        }
                        v += &gm[j][l] * p_up(i, k);
                        v -= &gm[j][k] * p_up(i, l);
                        if i == j {
                            v += p(k, l) - p(l, k);
                        }
                    }
                    a[j * n + l][u] += v;
                }
            }
        }
    }
    let b: Vec<BigRational> = (0..n * n).map(|r| -ric[r / n][r % n].clone()).collect();
    let x = gauss_solve(a, b).expect("trace system is nonsingular");
    (0..n).map(|j| (0..n).map(|l| x[j * n + l].clone()).collect()).collect()
}

/// `W^i_{jkl}` at a point, assembled from the oracle Riemann tensor and the
/// trace-free normalization `Q_(jl) = −R_(jl)/(n−1)`, `Q_[jl] = −R_[jl]/(n+1)`.
pub fn weyl_at(conn: &Connection, p: &[BigRational]) -> Vec<Vec<Vec<Vec<BigRational>>>> {
    let n = conn.dim();
    let r = riemann_at(conn, p);
    let ric = ricci_at(conn, p);
    let half = rat(1, 2);
    let q = |j: usize, l: usize| -> BigRational {
        let s = (&ric[j][l] + &ric[l][j]) * &half;
        let a = (&ric[j][l] - &ric[l][j]) * &half;
        -s / rat(n as i64 - 1, 1) - a / rat(n as i64 + 1, 1)
    };
    let mut w = r.clone();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    if i == k {
                        w[i][j][k][l] += q(j, l);
                    }
                    if i == l {
                        w[i][j][k][l] -= q(j, k);
                    }
                    if i == j {
                        w[i][j][k][l] += q(k, l) - q(l, k);
                    }
                }
            }
        }
    }
    w
}

/// Multiplicity partition of a binary quartic computed in floating point:
/// exact zero roots and roots at infinity are counted from vanishing
/// coefficients, the remaining roots come from Aberth iteration and are
/// clustered at tolerance `1e-8`.
pub fn numeric_partition(coeffs: &[BigRational; 5]) -> Option<(Vec<u32>, Vec<u32>)> {
    use num_complex::Complex64;
    use num_traits::ToPrimitive;
    let weights = [1.0, 4.0, 6.0, 4.0, 1.0];
    let mut q: Vec<f64> = coeffs.iter().zip(weights).map(|(c, w)| c.to_f64().unwrap() * w).collect();
    let exact_zero: Vec<bool> = coeffs.iter().map(|c| c == &rat(0, 1)).collect();
    if exact_zero.iter().all(|z| *z) {
        return None;
    }
    let mut real = Vec::new();
    let mut at_infinity = 0;
    while exact_zero[q.len() - 1] {
        q.pop();
        at_infinity += 1;
    }
    let zeros_at_origin = exact_zero.iter().take_while(|z| **z).count();
    let q: Vec<f64> = q[zeros_at_origin..].to_vec();
    if at_infinity > 0 {
        real.push(at_infinity);
    }
    if zeros_at_origin > 0 {
        real.push(zeros_at_origin as u32);
    }
    let deg = q.len() - 1;
    let mut complex_pairs = Vec::new();
    if deg > 0 {
        let lead = q[deg];
        let monic: Vec<f64> = q.iter().map(|c| c / lead).collect();
        let eval = |z: Complex64| -> (Complex64, Complex64) {
            let mut p = Complex64::new(0.0, 0.0);
            let mut dp = Complex64::new(0.0, 0.0);
            for &c in monic.iter().rev() {
                dp = dp * z + p;
                p = p * z + c;
            }
            (p, dp)
        };
        let bound = 1.0 + monic[..deg].iter().map(|c| c.abs()).fold(0.0, f64::max);
        let mut z: Vec<Complex64> = (0..deg)
            .map(|k| Complex64::from_polar(0.5 * bound, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / deg as f64))
            .collect();
        for _ in 0..2000 {
            let mut moved = 0.0f64;
            for i in 0..deg {
                let (p, dp) = eval(z[i]);
                if p.norm() == 0.0 {
                    continue;
                }
                let ratio = p / dp;
                let repulsion: Complex64 =
                    (0..deg).filter(|&j| j != i).map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j])).sum();
                let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
                z[i] -= step;
                moved = moved.max(step.norm());
            }
            if moved < 1e-15 {
                break;
            }
        }
        // Cluster nearby roots; multiple roots converge only to ~eps^(1/m).
        let mut used = vec![false; deg];
        let mut clusters: Vec<(Complex64, u32)> = Vec::new();
        for i in 0..deg {
            if used[i] {
                continue;
            }
            used[i] = true;
            let mut members = vec![z[i]];
            for j in i + 1..deg {
                if !used[j] && (z[j] - z[i]).norm() < 1e-8 * (1.0 + z[i].norm()) {
                    used[j] = true;
                    members.push(z[j]);
                }
            }
            let centre = members.iter().sum::<Complex64>() / members.len() as f64;
            clusters.push((centre, members.len() as u32));
        }
        for (centre, m) in clusters {
            if centre.im.abs() < 1e-8 * (1.0 + centre.norm()) {
                real.push(m);
            } else if centre.im > 0.0 {
                complex_pairs.push(m);
            }
        }
    }
    real.sort_unstable();
    complex_pairs.sort_unstable();
    Some((real, complex_pairs))
}

/// The frame built directly from its defining lift, and its bracket at a
/// point from numeric Jacobians.
pub fn oracle_bracket(conn: &Connection, at: &[BigRational]) -> Vec<BigRational> {
    let fc = conn.chart().clone();
    let p = [Expr::one(), Expr::var(fc.fiber_var(1)), Expr::var(fc.fiber_var(2))];
    let xi = [Expr::one(), -p[1].clone(), -p[2].clone()];
    let x = [[p[1].clone(), Expr::one(), Expr::zero()], [p[2].clone(), Expr::zero(), Expr::one()]];
    let s = |a: usize, b: usize| -> Expr {
        let mut acc = Expr::zero();
        for m in 0..3 {
            for k in 0..3 {
                for j in 0..3 {
                    acc += &(&(&(conn.get(m, k, j) * &xi[m]) * &x[a][k]) * &x[b][j]);
                }
            }
        }
        acc
    };
    let fields: Vec<Vec<Expr>> = (0..2)
        .map(|a| {
            let mut v = x[a].to_vec();
            v.push(-s(a, 0));
            v.push(-s(a, 1));
            v
        })
        .collect();
    let val = |e: &Expr| e.eval(at).unwrap();
    (0..5)
        .map(|c| {
            (0..5)
                .map(|d| {
                    val(&fields[0][d]) * val(&fields[1][c].diff(d)) - val(&fields[1][d]) * val(&fields[0][c].diff(d))
                })
                .sum()
        })
        .collect()
}

/// `−(Z_a + p_a Z_0)` for `a = 1, 2` at a point of the correspondence space,
/// with `Z_j = ξ_m W^m_{jkl} X_1^k X_2^l` and `W` from [`weyl_at`].
pub fn predicted_bracket_at(conn: &Connection, at: &[BigRational]) -> [BigRational; 2] {
    let w = weyl_at(conn, at);
    let pv = [rat(1, 1), at[3].clone(), at[4].clone()];
    let xi = [rat(1, 1), -pv[1].clone(), -pv[2].clone()];
    let xs = [[pv[1].clone(), rat(1, 1), rat(0, 1)], [pv[2].clone(), rat(0, 1), rat(1, 1)]];
    let z: Vec<BigRational> = (0..3)
        .map(|j| {
            let mut acc = rat(0, 1);
            for m in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        acc += &xi[m] * &w[m][j][k][l] * &xs[0][k] * &xs[1][l];
                    }
                }
            }
            acc
        })
        .collect();
    [0, 1].map(|a| -(&z[a + 1] + &pv[a + 1] * &z[0]))
}

/// `Q(∇) − Q(P)` at a point, with `Q(∇)` from the oracle Ricci tensor and `P`
/// from the oracle trace solve.
pub fn qp_residual_at(w: &WeylStructure, at: &[BigRational]) -> Vec<BigRational> {
    let n = w.dim();
    let conn = projconf::weyl_connection(w).unwrap();
    let ric = ricci_at(&conn, at);
    let p = rho_by_trace_solve(&conn, &w.metric, at);
    let (gm, gi) = metric_at(&w.metric, at);
    let trace: BigRational = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| &gi[i][j] * &p[i][j]).sum();
    let ni = n as i64;
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let s = (&ric[i][j] + &ric[j][i]) * rat(1, 2);
            let a = (&ric[i][j] - &ric[j][i]) * rat(1, 2);
            let q_conn = -s / rat(ni - 1, 1) - a / rat(ni + 1, 1);
            let q_p = &trace * &gm[i][j] / rat(ni - 1, 1) + rat(ni * ni - ni - 1, ni * ni - 1) * &p[i][j]
                - rat(1, ni * ni - 1) * &p[j][i];
            out.push(q_conn - q_p);
        }
    }
    out
}
