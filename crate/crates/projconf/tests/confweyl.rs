mod common;

use common::*;
use num_rational::BigRational;
use projconf::confweyl::{
    conformal_curvature, conformal_rho, conformal_weyl_tensor, conformally_flat, cotton, einstein_weyl,
    frame_components, rho_from_ricci, RhoProvenance,
};
use projconf::corpus::Corpus;
use projconf::tensor::Down;
use projconf::{
    curvature, levi_civita, weyl_connection, Connection, GeomError, Metric, Signature, Tensor, WeylStructure,
};
use symkernel::{rat, Expr};

fn x1_beta(c: &std::sync::Arc<symkernel::Chart>) -> WeylStructure {
    WeylStructure::new(flat(c), vec![parse(c, "x1"), Expr::zero(), Expr::zero()]).unwrap()
}

/// `Y_{ijk} = ∂_j P_{ik} − ∂_k P_{ij} − Γ^m_{ji} P_{mk} + Γ^m_{ki} P_{mj}` at a point.
fn cotton_at(p: &Tensor, conn: &Connection, at: &[BigRational]) -> Vec<BigRational> {
    let n = conn.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut v = p.get(&[i, k]).diff(j).eval(at).unwrap() - p.get(&[i, j]).diff(k).eval(at).unwrap();
                for m in 0..n {
                    v -= conn.get(m, j, i).eval(at).unwrap() * p.get(&[m, k]).eval(at).unwrap();
                    v += conn.get(m, k, i).eval(at).unwrap() * p.get(&[m, j]).eval(at).unwrap();
                }
                out.push(v);
            }
        }
    }
    out
}

fn assert_rho_matches_oracle(w: &WeylStructure) {
    let conn = weyl_connection(w).unwrap();
    let p = conformal_rho(w).unwrap().p;
    let n = w.dim();
    let mut checked = 0;
    for at in sample_points(n) {
        if w.metric.determinant().eval(&at).map_or(true, |d| d == rat(0, 1)) {
            continue;
        }
        let oracle = rho_by_trace_solve(&conn, &w.metric, &at);
        for i in 0..n {
            for j in 0..n {
                assert_eq!(p.get(&[i, j]).eval(&at).unwrap(), oracle[i][j]);
            }
        }
        checked += 1;
    }
    assert!(checked > 0);
}

#[test]
fn rho_examples() {
    let c = chart(3);
    let flat_rho = conformal_rho(&WeylStructure::metric_only(flat(&c))).unwrap();
    assert!(flat_rho.p.is_zero());
    assert_eq!(flat_rho.provenance, RhoProvenance::ClosedFormula);
    let g = sphere(&c);
    let rho = conformal_rho(&WeylStructure::metric_only(g.clone())).unwrap();
    assert_eq!(rho.p, g.tensor().scale(&Expr::frac(-1, 2)));
    assert_eq!(rho.trace(&g), Expr::frac(-3, 2));

    let w = x1_beta(&c);
    let rho = conformal_rho(&w).unwrap();
    assert_eq!(rho.provenance, RhoProvenance::TraceSolve);
    assert!(!rho.p.antisymmetrize(&[0, 1]).unwrap().is_zero());
    assert_rho_matches_oracle(&w);
    assert!(matches!(conformal_rho(&WeylStructure::metric_only(flat(&chart(2)))), Err(GeomError::Dimension { .. })));
}

#[test]
fn conformal_weyl_is_trace_free_for_random_weyl_structures() {
    let c = chart(3);
    let mut corpus = Corpus::new(41);
    for _ in 0..5 {
        let w = corpus.weyl_structure(&c, Signature::Riemannian);
        let cc = conformal_curvature(&w).unwrap();
        assert!(cc.weyl.contract(0, 2).unwrap().is_zero());
        assert!(cc.weyl.contract(0, 1).unwrap().is_zero());
        // In dimension 3 the conformal Weyl tensor of any Weyl structure vanishes.
        assert!(cc.weyl.is_zero());
        assert_rho_matches_oracle(&w);
    }
}

#[test]
fn rho_formula_agrees_with_trace_solve_for_metrics() {
    let mut corpus = Corpus::new(42);
    for (n, count) in [(3, 6), (4, 4)] {
        let c = chart(n);
        for _ in 0..count {
            let g = corpus.metric(&c, Signature::Riemannian);
            let w = WeylStructure::metric_only(g.clone());
            let rho = conformal_rho(&w).unwrap();
            assert_eq!(rho.provenance, RhoProvenance::ClosedFormula);
            let ricci = curvature(&levi_civita(&g).unwrap()).unwrap().ricci;
            assert_eq!(rho.p, rho_from_ricci(&ricci, &g));
            assert_rho_matches_oracle(&w);
        }
    }
}

#[test]
fn cotton_examples() {
    let c = chart(3);
    assert!(cotton(&WeylStructure::metric_only(flat(&c))).unwrap().is_zero());
    assert!(cotton(&WeylStructure::metric_only(sphere(&c))).unwrap().is_zero());
    let g = warped3(&c);
    let w = WeylStructure::metric_only(g.clone());
    let y = cotton(&w).unwrap();
    let p = conformal_rho(&w).unwrap().p;
    let lc = levi_civita(&g).unwrap();
    let mut any_nonzero = false;
    for at in sample_points(3) {
        let oracle = cotton_at(&p, &lc, &at);
        let ours: Vec<BigRational> = y.data().iter().map(|e| e.eval(&at).unwrap()).collect();
        assert_eq!(ours, oracle);
        any_nonzero |= !all_zero(&oracle);
    }
    assert_eq!(y.is_zero(), !any_nonzero);
    assert!(!y.is_zero());
    assert_eq!(conformally_flat(&g).unwrap(), y.is_zero());
}

#[test]
fn cotton_is_antisymmetric_and_trace_free() {
    let c = chart(3);
    let mut corpus = Corpus::new(43);
    let mut metrics = vec![warped3(&c), klein(&c)];
    metrics.extend((0..3).map(|_| corpus.metric(&c, Signature::Riemannian)));
    metrics.push(corpus.metric(&c, Signature::Lorentzian));
    for g in metrics {
        let y = cotton(&WeylStructure::metric_only(g.clone())).unwrap();
        assert_eq!(y.antisymmetrize(&[1, 2]).unwrap(), y);
        assert!(y.trace_with(0, 1, &g).unwrap().is_zero());
        assert!(y.trace_with(0, 2, &g).unwrap().is_zero());
        assert!(y.antisymmetrize(&[0, 1, 2]).unwrap().is_zero());
    }
}

#[test]
fn conformal_weyl_tensor_examples() {
    let c = chart(4);
    assert!(conformal_weyl_tensor(&flat(&c)).unwrap().is_zero());
    let factor = parse(&c, "(1+x0^2)^2");
    assert!(conformal_weyl_tensor(&conformally_flat_metric(&c, &factor)).unwrap().is_zero());
    let g = Metric::diagonal(
        &c,
        Signature::Riemannian,
        &[Expr::one(), Expr::one(), parse(&c, "1+x0^2+x1^2"), parse(&c, "1+x2^2")],
    )
    .unwrap();
    let cw = conformal_weyl_tensor(&g).unwrap();
    let lc = levi_civita(&g).unwrap();
    let mut any_nonzero = false;
    for at in sample_points(4) {
        let r = riemann_at(&lc, &at);
        let p = rho_by_trace_solve(&lc, &g, &at);
        let (gm, gi) = metric_at(&g, &at);
        for ix in cw.indices() {
            let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
            let p_up = |a: usize, b: usize| -> BigRational { (0..4).map(|m| &gi[a][m] * &p[m][b]).sum() };
            let mut v = r[i][j][k][l].clone();
            if i == k {
                v += &p[j][l];
            }
            if i == l {
                v -= &p[j][k];
            }
            v += &gm[j][l] * p_up(i, k) - &gm[j][k] * p_up(i, l);
            if i == j {
                v += &p[k][l] - &p[l][k];
            }
            assert_eq!(cw.get(&ix).eval(&at).unwrap(), v);
            any_nonzero |= v != rat(0, 1);
        }
    }
    assert_eq!(cw.is_zero(), !any_nonzero);
    assert!(matches!(conformal_weyl_tensor(&flat(&chart(3))), Err(GeomError::Dimension { .. })));
}

#[test]
fn conformal_flatness_examples() {
    let c = chart(3);
    assert!(conformally_flat(&flat(&c)).unwrap());
    assert!(conformally_flat(&sphere(&c)).unwrap());
    assert!(conformally_flat(&klein(&c)).unwrap());
    assert!(conformally_flat(&hyperbolic_ball(&c)).unwrap());
    assert!(!conformally_flat(&warped3(&c)).unwrap());
}

#[test]
fn conformal_flatness_is_a_class_property() {
    let c = chart(3);
    let mut corpus = Corpus::new(44);
    for _ in 0..5 {
        let g = corpus.metric(&c, Signature::Riemannian);
        let sigma = corpus.sigma(&c);
        let rescaled = g.rescale(&(&sigma * &sigma)).unwrap();
        assert_eq!(conformally_flat(&rescaled).unwrap(), conformally_flat(&g).unwrap());
        let flat_rescaled = flat(&c).rescale(&(&sigma * &sigma)).unwrap();
        assert!(conformally_flat(&flat_rescaled).unwrap());
    }
    let c4 = chart(4);
    let g = corpus.metric(&c4, Signature::Riemannian);
    let sigma = corpus.sigma(&c4);
    let rescaled = g.rescale(&(&sigma * &sigma)).unwrap();
    assert_eq!(conformal_weyl_tensor(&rescaled).unwrap(), conformal_weyl_tensor(&g).unwrap());
}

#[test]
fn weyl_connection_is_gauge_invariant() {
    let c = chart(3);
    let mut corpus = Corpus::new(45);
    for _ in 0..5 {
        let w = corpus.weyl_structure(&c, Signature::Riemannian);
        let sigma = corpus.sigma(&c);
        let moved = w.regauge(&sigma).unwrap();
        assert_eq!(weyl_connection(&moved).unwrap(), weyl_connection(&w).unwrap());
        assert_eq!(cotton(&moved).unwrap().is_zero(), cotton(&w).unwrap().is_zero());
    }
}

#[test]
fn einstein_weyl_examples() {
    let c = chart(3);
    let (ok, residual) = einstein_weyl(&WeylStructure::metric_only(flat(&c))).unwrap();
    assert!(ok && residual.is_zero());
    assert!(einstein_weyl(&WeylStructure::metric_only(sphere(&c))).unwrap().0);
    let w = x1_beta(&c);
    let (ok, residual) = einstein_weyl(&w).unwrap();
    assert!(!ok);
    let conn = weyl_connection(&w).unwrap();
    let mut any_nonzero = false;
    for at in sample_points(3) {
        let ric = ricci_at(&conn, &at);
        let mean: BigRational = (0..3).map(|i| ric[i][i].clone()).sum::<BigRational>() / rat(3, 1);
        for i in 0..3 {
            for j in 0..3 {
                let mut v = (&ric[i][j] + &ric[j][i]) * rat(1, 2);
                if i == j {
                    v -= &mean;
                }
                assert_eq!(residual.get(&[i, j]).eval(&at).unwrap(), v);
                any_nonzero |= v != rat(0, 1);
            }
        }
    }
    assert!(any_nonzero);
}

#[test]
fn frame_components_in_the_coordinate_frame_are_the_entries() {
    let c = chart(3);
    let y = cotton(&WeylStructure::metric_only(warped3(&c))).unwrap();
    let coord: Vec<Vec<Expr>> =
        (0..3).map(|a| (0..3).map(|i| if a == i { Expr::one() } else { Expr::zero() }).collect()).collect();
    assert_eq!(frame_components(&y, &coord).unwrap(), y);
    // Rescaling the frame by λ rescales rank-3 components by λ³.
    let lam = Expr::int(2);
    let scaled: Vec<Vec<Expr>> = coord.iter().map(|e| e.iter().map(|x| x * &lam).collect()).collect();
    assert_eq!(frame_components(&y, &scaled).unwrap(), y.scale(&Expr::int(8)));
    let vector = Tensor::zeros(&c, &[projconf::tensor::Up]);
    assert!(frame_components(&vector, &coord).is_err());
    let _ = Down;
}
