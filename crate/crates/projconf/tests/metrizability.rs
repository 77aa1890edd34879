mod common;

use common::*;
use num_rational::BigRational;
use projconf::corpus::Corpus;
use projconf::metrizability::{
    beltrami_check, q_from_p, qp_pair, verify_cwqp_identity, verify_qp_identity, verify_w_trace_identity,
    w_trace_coefficients, w_trace_residual_with, weyl_metrizable_with, Metrization,
};
use projconf::tensor::Down;
use projconf::{levi_civita, weyl_connection, Connection, GeomError, Signature, Tensor, WeylStructure};
use symkernel::{rat, Expr};

fn x1_beta(c: &std::sync::Arc<symkernel::Chart>) -> WeylStructure {
    WeylStructure::new(flat(c), vec![parse(c, "x1"), Expr::zero(), Expr::zero()]).unwrap()
}

fn usable(w: &WeylStructure, at: &[BigRational]) -> bool {
    w.metric.determinant().eval(at).is_ok_and(|d| d != rat(0, 1))
}

#[test]
fn q_from_p_examples() {
    let c = chart(3);
    let g = flat(&c);
    assert!(q_from_p(&Tensor::zeros(&c, &[Down, Down]), &g).unwrap().is_zero());
    assert_eq!(q_from_p(g.tensor(), &g).unwrap(), g.tensor().scale(&Expr::int(2)));
    let mut p = Tensor::zeros(&c, &[Down, Down]);
    p.set(&[0, 1], Expr::one());
    let q = q_from_p(&p, &g).unwrap();
    assert_eq!(q.get(&[0, 1]), &Expr::frac(5, 8));
    assert_eq!(q.get(&[1, 0]), &Expr::frac(-1, 8));
    assert_eq!(q.nonzero_entries().len(), 2);
    // The n = 3 map is ½ 𝖯 g + (5 P − Pᵀ)/8 for any P.
    let mut corpus = Corpus::new(50);
    let gm = corpus.metric(&c, Signature::Lorentzian);
    let p = Tensor::from_fn(&c, &[Down, Down], |ix| Expr::var(ix[0]) + Expr::int((ix[1] * 2) as i64));
    let q = q_from_p(&p, &gm).unwrap();
    let tr = gm.trace(&p);
    for ix in p.indices() {
        let want = &(&(&tr * &Expr::frac(1, 2)) * gm.get(ix[0], ix[1]))
            + &(&(&(p.get(&ix) * &Expr::int(5)) - p.get(&[ix[1], ix[0]])) * &Expr::frac(1, 8));
        assert_eq!(q.get(&ix), &want);
    }
}

#[test]
fn qp_identity_examples() {
    let c = chart(3);
    assert!(verify_qp_identity(&WeylStructure::metric_only(flat(&c))).unwrap().is_zero());
    let w = x1_beta(&c);
    assert!(verify_qp_identity(&w).unwrap().is_zero());
    let pair = qp_pair(&w).unwrap();
    assert!(!pair.q.is_zero());
    assert_eq!(pair.trace, w.metric.trace(&pair.p));
}

#[test]
fn qp_identity_on_random_weyl_structures() {
    let mut corpus = Corpus::new(51);
    for (n, count) in [(3, 10), (4, 5)] {
        let c = chart(n);
        for s in 0..count {
            let sig = if s % 3 == 2 { Signature::Lorentzian } else { Signature::Riemannian };
            let w = corpus.weyl_structure(&c, sig);
            assert!(verify_qp_identity(&w).unwrap().is_zero(), "n = {n}, item {s}");
            for at in sample_points(n).into_iter().filter(|p| usable(&w, p)) {
                assert!(all_zero(&qp_residual_at(&w, &at)));
            }
        }
    }
}

#[test]
fn w_trace_identity_examples() {
    assert!(verify_w_trace_identity(&WeylStructure::metric_only(flat(&chart(3)))).unwrap().is_zero());
    let mut corpus = Corpus::new(52);
    for (n, count) in [(3, 10), (4, 5)] {
        let c = chart(n);
        for _ in 0..count {
            let w = corpus.weyl_structure(&c, Signature::Riemannian);
            assert!(verify_w_trace_identity(&w).unwrap().is_zero());
        }
    }
    assert_eq!(w_trace_coefficients(3), (Expr::frac(-5, 8), Expr::frac(1, 4)));
}

#[test]
fn naive_w_trace_coefficients_leave_a_residual() {
    // Coefficients 2/(n+1) and (n−2)/(n−1), read both with weight-½ and with
    // unweighted symmetrization (the latter halves them here).
    let c = chart(3);
    let w = x1_beta(&c);
    let (a, b) = (Expr::frac(2, 4), Expr::frac(1, 2));
    assert!(!w_trace_residual_with(&w, &a, &b).unwrap().is_zero());
    let (ha, hb) = (Expr::frac(1, 4), Expr::frac(1, 4));
    assert!(!w_trace_residual_with(&w, &ha, &hb).unwrap().is_zero());
    // For a closed structure only the symmetric coefficient matters, and the
    // halved reading of it agrees.
    let closed = WeylStructure::metric_only(warped3(&c));
    assert!(w_trace_residual_with(&closed, &ha, &hb).unwrap().is_zero());
}

#[test]
fn cwqp_identity() {
    let c = chart(4);
    assert!(verify_cwqp_identity(&WeylStructure::metric_only(flat(&c))).unwrap().is_zero());
    let cf = WeylStructure::metric_only(conformally_flat_metric(&c, &parse(&c, "(1+x0^2)^2")));
    assert!(verify_cwqp_identity(&cf).unwrap().is_zero());
    let pair = qp_pair(&cf).unwrap();
    assert!(!pair.p.is_zero() && !pair.q.is_zero());
    let mut corpus = Corpus::new(53);
    for _ in 0..5 {
        let w = corpus.weyl_structure(&c, Signature::Riemannian);
        assert!(verify_cwqp_identity(&w).unwrap().is_zero());
    }
    assert!(matches!(
        verify_cwqp_identity(&WeylStructure::metric_only(flat(&chart(3)))),
        Err(GeomError::Dimension { .. })
    ));
}

#[test]
fn metrizability_examples() {
    let c = chart(3);
    let zero = Connection::zero(&c);
    let m = weyl_metrizable_with(&zero, &flat(&c)).unwrap().unwrap();
    assert_eq!(m, Metrization { beta: vec![Expr::zero(); 3], f: vec![Expr::zero(); 3] });

    let k = Expr::frac(7, 3);
    let w = WeylStructure::new(flat(&c), vec![k.clone(), Expr::zero(), Expr::zero()]).unwrap();
    let m = weyl_metrizable_with(&weyl_connection(&w).unwrap(), &flat(&c)).unwrap().unwrap();
    assert_eq!(m.beta, w.beta);
    assert!(m.f.iter().all(Expr::is_zero));

    let m = weyl_metrizable_with(&zero, &klein(&c)).unwrap().unwrap();
    assert!(m.beta.iter().all(Expr::is_zero));
    assert!(projconf::projective::projectively_equivalent(&zero, &levi_civita(&klein(&c)).unwrap()).unwrap().is_some());

    // A projective class with curvature is not Weyl metrizable for the flat class.
    let planted = Connection::from_entries(&c, &[(0, 1, 1, parse(&c, "x2"))]).unwrap();
    assert_eq!(weyl_metrizable_with(&planted, &flat(&c)).unwrap(), None);
}

#[test]
fn metrizability_round_trips() {
    let c = chart(3);
    let mut corpus = Corpus::new(54);
    for _ in 0..10 {
        let w = corpus.weyl_structure(&c, Signature::Riemannian);
        let conn = weyl_connection(&w).unwrap();
        let f = corpus.covector(&c);
        let rep = conn.projective_change(&f).unwrap();
        let m = weyl_metrizable_with(&rep, &w.metric).unwrap().unwrap();
        assert_eq!(m.beta, w.beta);
        let back: Vec<Expr> = f.iter().map(|x| -x.clone()).collect();
        assert_eq!(m.f, back);
        let again = weyl_metrizable_with(
            &weyl_connection(&WeylStructure::new(w.metric.clone(), m.beta.clone()).unwrap()).unwrap(),
            &w.metric,
        )
        .unwrap()
        .unwrap();
        assert_eq!(again.beta, m.beta);
        assert!(again.f.iter().all(Expr::is_zero));
    }
    for _ in 0..5 {
        let w = corpus.weyl_structure(&c, Signature::Riemannian);
        let sigma = corpus.sigma(&c);
        let moved = w.regauge(&sigma).unwrap();
        let m = weyl_metrizable_with(&weyl_connection(&w).unwrap(), &moved.metric).unwrap().unwrap();
        assert_eq!(m.beta, moved.beta);
        assert!(m.f.iter().all(Expr::is_zero));
    }
}

#[test]
fn beltrami_examples() {
    let c = chart(3);
    for (g, c_value) in [
        (flat(&c), Expr::zero()),
        (sphere(&c), Expr::frac(-1, 2)),
        (hyperbolic_ball(&c), Expr::frac(1, 2)),
        (klein(&c), Expr::frac(1, 2)),
    ] {
        let v = beltrami_check(&WeylStructure::metric_only(g)).unwrap();
        assert!(v.projectively_flat && v.conformally_flat);
        let pt = v.pure_trace.unwrap();
        assert_eq!(pt.c, c_value);
        assert!(pt.constant);
    }
    let v = beltrami_check(&WeylStructure::metric_only(warped3(&c))).unwrap();
    assert!(!v.projectively_flat && v.pure_trace.is_none());
    let lc = levi_civita(&warped3(&c)).unwrap();
    let mut nonzero = false;
    for at in sample_points(3) {
        nonzero |= v.projective_weyl.data().iter().any(|e| e.eval(&at).unwrap() != rat(0, 1));
    }
    assert!(nonzero);
    assert!(!riemann_at(&lc, &sample_points(3)[0]).concat().concat().concat().iter().all(|x| x == &rat(0, 1)));
}

#[test]
fn beltrami_implication_over_random_corpus() {
    let mut corpus = Corpus::new(55);
    for n in [3, 4] {
        let c = chart(n);
        for _ in 0..5 {
            let w = corpus.weyl_structure(&c, Signature::Riemannian);
            let v = beltrami_check(&w).unwrap();
            assert!(!v.projectively_flat || v.conformally_flat);
        }
        // The round sphere in a non-natural gauge: the connection and P are
        // unchanged, but c = 𝖯/n picks up the factor σ⁻².
        let sigma = corpus.sigma(&c);
        let w = WeylStructure::metric_only(sphere(&c)).regauge(&sigma).unwrap();
        let v = beltrami_check(&w).unwrap();
        assert!(v.projectively_flat && v.conformally_flat);
        let pt = v.pure_trace.unwrap();
        assert!(!pt.constant);
        assert_eq!(pt.c, &Expr::frac(-1, 2) / &(&sigma * &sigma));
    }
}
