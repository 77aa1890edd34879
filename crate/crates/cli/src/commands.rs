//! One function per command. Each returns its records and the verdict that
//! decides between exit codes 0 and 2.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use num_rational::BigRational;
use projconf::affine::{geodesic_csv, integrate_geodesic};
use projconf::confweyl::{conformal_obstruction, conformal_rho, einstein_weyl};
use projconf::corpus::Corpus;
use projconf::metrizability::{
    beltrami_check, verify_cwqp_identity, verify_qp_identity, verify_w_trace_identity, weyl_metrizable_with,
};
use projconf::projective::{
    odepair_is_projective, odes_from_connection, projective_curvature, projectively_equivalent, projectivity_residual,
    thomas, thomas_from_odes, weyl_trace_residuals, OdePair,
};
use projconf::quartic_cr::{
    classify_quartic, paracr_frame, paracr_torsion_diagnostics, twistor_quartic_type, weyl_contraction,
    QuarticCoefficients, RootType, TwistorType,
};
use projconf::{curvature, weyl_connection, Connection, GeomError, Tensor, Variance, WeylStructure};
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use symkernel::{Chart, Expr, SymError};

use crate::error::CliError;
use crate::report::{self, Verdict};
use crate::scene::Scene;

/// Run-wide settings shared by the commands.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub samples: Option<usize>,
    pub seed: u64,
}

pub type Records = Map<String, Value>;

/// Collects wall time per analysis.
#[derive(Default)]
pub struct Timer {
    pub entries: BTreeMap<String, f64>,
}

impl Timer {
    pub fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.entries.insert(name.to_string(), start.elapsed().as_secs_f64() * 1e3);
        out
    }
}

fn metric_of<'a>(scene: &'a Scene, command: &'static str) -> Result<&'a projconf::Metric, CliError> {
    scene.metric.as_ref().ok_or(CliError::MissingSection { command, section: "metric" })
}

fn connection_of<'a>(scene: &'a Scene, command: &'static str) -> Result<&'a Connection, CliError> {
    scene.connection.as_ref().ok_or(CliError::MissingSection { command, section: "connection" })
}

fn weyl_of(scene: &Scene, command: &'static str) -> Result<WeylStructure, CliError> {
    Ok(scene.weyl_structure().ok_or(CliError::MissingSection { command, section: "metric" })??)
}

/// The `[connection]` section, or else the Weyl connection of `[metric]` and `[beta]`.
fn any_connection(scene: &Scene, command: &'static str) -> Result<Connection, CliError> {
    if let Some(c) = &scene.connection {
        return Ok(c.clone());
    }
    match scene.weyl_structure() {
        Some(w) => Ok(weyl_connection(&w?)?),
        None => Err(CliError::MissingSection { command, section: "connection" }),
    }
}

fn insert(records: &mut Records, key: &str, value: Value) {
    records.insert(key.to_string(), value);
}

pub fn analyze_metric(scene: &Scene) -> Result<(Records, Verdict), CliError> {
    let w = weyl_of(scene, "analyze-metric")?;
    let chart = w.chart().clone();
    let conn = weyl_connection(&w)?;
    let curv = curvature(&conn)?;
    let g = w.metric.tensor();
    let beta = Tensor::vector(&chart, Variance::Down, w.beta.clone())?;
    let nonmetricity = g.covariant_derivative(&conn)?.sub(&g.outer(&beta)?.scale(&Expr::int(2)))?;

    let mut r = Records::new();
    insert(&mut r, "determinant", report::expr(&chart, w.metric.determinant()));
    insert(&mut r, "connection", report::tensor(conn.tensor()));
    insert(&mut r, "riemann", report::tensor(&curv.riemann));
    insert(&mut r, "ricci", report::tensor(&curv.ricci));
    insert(&mut r, "scalar_curvature", report::expr(&chart, &w.metric.trace(&curv.ricci)));
    insert(&mut r, "nonmetricity_residual", report::residual(&nonmetricity));
    if w.dim() >= 3 {
        insert(&mut r, "conformal_rho", report::tensor(&conformal_rho(&w)?.p));
        let obstruction = conformal_obstruction(&w.metric)?;
        insert(&mut r, "conformally_flat", json!(obstruction.is_zero()));
        insert(&mut r, "conformal_obstruction", report::tensor(&obstruction));
    }
    Ok((r, Verdict::from_bool(nonmetricity.is_zero())))
}

pub fn analyze_connection(scene: &Scene) -> Result<(Records, Verdict), CliError> {
    let conn = any_connection(scene, "analyze-connection")?;
    let pc = projective_curvature(&conn)?;
    let (trace, alternation) = weyl_trace_residuals(&pc.weyl)?;
    let ricci_alt = pc.curvature.ricci.antisymmetrize(&[0, 1])?;

    let mut r = Records::new();
    insert(&mut r, "connection", report::tensor(conn.tensor()));
    insert(&mut r, "riemann", report::tensor(&pc.curvature.riemann));
    insert(&mut r, "ricci", report::tensor(&pc.curvature.ricci));
    insert(&mut r, "ricci_symmetric", json!(ricci_alt.is_zero()));
    insert(&mut r, "projective_schouten", report::tensor(&pc.schouten));
    insert(&mut r, "projective_weyl", report::tensor(&pc.weyl));
    insert(&mut r, "projectively_flat", json!(pc.weyl.is_zero()));
    insert(&mut r, "weyl_trace_residual", report::residual(&trace));
    insert(&mut r, "weyl_alternation_residual", report::residual(&alternation));
    insert(&mut r, "thomas", report::tensor(thomas(&conn).tensor()));
    Ok((r, Verdict::from_bool(trace.is_zero() && alternation.is_zero())))
}

fn ode_source(scene: &Scene, command: &'static str) -> Result<(OdePair, &'static str), CliError> {
    match &scene.odes {
        Some(o) => Ok((o.clone(), "odes")),
        None => {
            let conn = any_connection(scene, command)?;
            let conn = scene.fiber_chart.as_ref().map_or(conn.clone(), |fc| lift(&conn, fc));
            Ok((odes_from_connection(&conn)?, "connection"))
        }
    }
}

pub fn odes(scene: &Scene) -> Result<(Records, Verdict), CliError> {
    let (pair, source) = ode_source(scene, "odes")?;
    let chart = pair.chart().clone();
    let projective = odepair_is_projective(&pair);

    let mut r = Records::new();
    insert(&mut r, "source", json!(source));
    insert(&mut r, "f1", report::expr(&chart, pair.rhs(1)));
    insert(&mut r, "f2", report::expr(&chart, pair.rhs(2)));
    insert(&mut r, "projective", json!(projective));
    insert(&mut r, "projectivity_residual", report::exprs(&chart, &projectivity_residual(&pair)));
    let thomas_value = match thomas_from_odes(&pair) {
        Ok(t) => report::tensor(t.tensor()),
        Err(GeomError::NonProjective | GeomError::NonPolynomial | GeomError::FiberDegree(_)) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    insert(&mut r, "thomas", thomas_value);
    Ok((r, Verdict::from_bool(projective)))
}

pub fn thomas_symbols(scene: &Scene) -> Result<(Records, Verdict), CliError> {
    let (pi, source) = if scene.connection.is_some() || scene.metric.is_some() {
        (thomas(&any_connection(scene, "thomas")?), "connection")
    } else {
        let (pair, _) = ode_source(scene, "thomas")?;
        (thomas_from_odes(&pair)?, "odes")
    };
    let trace_free = pi.as_connection().trace().iter().all(Expr::is_zero);
    let mut r = Records::new();
    insert(&mut r, "source", json!(source));
    insert(&mut r, "thomas", report::tensor(pi.tensor()));
    insert(&mut r, "trace_free", json!(trace_free));
    Ok((r, Verdict::from_bool(trace_free)))
}

pub fn equivalent(scene: &Scene) -> Result<(Records, Verdict), CliError> {
    let a = connection_of(scene, "equivalent")?;
    let b =
        scene.connection2.as_ref().ok_or(CliError::MissingSection { command: "equivalent", section: "connection2" })?;
    let f = projectively_equivalent(a, b)?;
    let mut r = Records::new();
    insert(&mut r, "equivalent", json!(f.is_some()));
    insert(&mut r, "f", f.as_ref().map_or(Value::Null, |f| report::exprs(&scene.chart, f)));
    Ok((r, Verdict::from_bool(f.is_some())))
}

pub fn metrizable(scene: &Scene) -> Result<(Records, Verdict), CliError> {
    let conn = connection_of(scene, "metrizable")?;
    let g = metric_of(scene, "metrizable")?;
    let m = weyl_metrizable_with(conn, g)?;
    let mut r = Records::new();
    insert(&mut r, "found", json!(m.is_some()));
    insert(&mut r, "beta", m.as_ref().map_or(Value::Null, |m| report::exprs(&scene.chart, &m.beta)));
    insert(&mut r, "f", m.as_ref().map_or(Value::Null, |m| report::exprs(&scene.chart, &m.f)));
    Ok((r, Verdict::from_bool(m.is_some())))
}

pub fn beltrami(scene: &Scene) -> Result<(Records, Verdict), CliError> {
    let w = weyl_of(scene, "beltrami")?;
    let mut r = Records::new();
    let v = match beltrami_check(&w) {
        Ok(v) => v,
        Err(GeomError::Invariant(message)) => {
            insert(&mut r, "implication_holds", json!(false));
            insert(&mut r, "message", json!(message));
            return Ok((r, Verdict::Fails));
        }
        Err(e) => return Err(e.into()),
    };
    insert(&mut r, "implication_holds", json!(true));
    insert(&mut r, "projectively_flat", json!(v.projectively_flat));
    insert(&mut r, "conformally_flat", json!(v.conformally_flat));
    insert(
        &mut r,
        "pure_trace",
        v.pure_trace
            .as_ref()
            .map_or(Value::Null, |p| json!({ "c": report::expr(w.chart(), &p.c), "constant": p.constant })),
    );
    insert(&mut r, "projective_weyl", report::tensor(&v.projective_weyl));
    insert(&mut r, "conformal_obstruction", report::tensor(&v.conformal_obstruction));
    Ok((r, Verdict::from_bool(v.projectively_flat)))
}

pub fn einstein_weyl_check(scene: &Scene) -> Result<(Records, Verdict), CliError> {
    let w = weyl_of(scene, "einstein-weyl")?;
    let (holds, residual) = einstein_weyl(&w)?;
    let mut r = Records::new();
    insert(&mut r, "einstein_weyl", json!(holds));
    insert(&mut r, "residual", report::tensor(&residual));
    Ok((r, Verdict::from_bool(holds)))
}

/// Names a root type by its multiset of complex root multiplicities.
fn root_type_name(t: &RootType) -> &'static str {
    let Some((real, pairs)) = t.partition() else {
        return "Zero";
    };
    let mut all: Vec<u32> = real.into_iter().chain(pairs.iter().flat_map(|&m| [m, m])).collect();
    all.sort_unstable_by(|a, b| b.cmp(a));
    match all.as_slice() {
        [4] => "TypeN",
        [3, 1] => "TypeIII",
        [2, 2] => "TypeD",
        [2, 1, 1] => "TypeII",
        _ => "TypeI",
    }
}

fn root_records(t: &RootType) -> Records {
    let mut r = Records::new();
    insert(&mut r, "kind", json!(root_type_name(t)));
    if let RootType::Typed { real, complex_pairs } = t {
        let roots: Vec<Value> =
            real.iter().map(|x| json!({ "root": x.point.to_string(), "multiplicity": x.multiplicity })).collect();
        insert(&mut r, "real_roots", Value::Array(roots));
        insert(&mut r, "complex_pairs", json!(complex_pairs));
        if t.is_type_n() {
            insert(&mut r, "root", json!(real[0].point.to_string()));
            insert(&mut r, "multiplicity", json!(4));
        }
    }
    r
}

/// Five coefficients `C4, ..., C0`, highest power of `a1` first.
pub fn parse_coeffs(raw: &[String]) -> Result<QuarticCoefficients, CliError> {
    if raw.len() != 5 {
        return Err(CliError::Usage(format!("--coeffs needs 5 values, got {}", raw.len())));
    }
    let mut out = Vec::with_capacity(5);
    for s in raw {
        let q: BigRational =
            s.trim().parse().map_err(|_| CliError::Usage(format!("`{s}` is not a rational number")))?;
        out.push(q);
    }
    Ok(QuarticCoefficients::from_descending(out.try_into().expect("five entries")))
}

pub fn quartic(coeffs: &QuarticCoefficients) -> (Records, Verdict) {
    (root_records(&classify_quartic(coeffs)), Verdict::Holds)
}

pub fn twistor_type(scene: &Scene) -> Result<(Records, Verdict), CliError> {
    let g = metric_of(scene, "twistor-type")?;
    let mut r = Records::new();
    match twistor_quartic_type(g)? {
        TwistorType::Zero => insert(&mut r, "kind", json!("Zero")),
        TwistorType::TypeN { root } => {
            insert(&mut r, "kind", json!("TypeN"));
            insert(&mut r, "root", json!(root.to_string()));
            insert(&mut r, "multiplicity", json!(4));
        }
    }
    Ok((r, Verdict::Holds))
}

/// Copies a base connection onto the chart with fiber variables; base lanes
/// are shared, so the entries carry over unchanged.
fn lift(conn: &Connection, fiber_chart: &Arc<Chart>) -> Connection {
    Connection::from_fn(fiber_chart, |i, j, k| conn.get(i, j, k).clone())
}

pub fn paracr(scene: &Scene, options: &RunOptions) -> Result<(Records, Verdict), CliError> {
    let conn = any_connection(scene, "paracr")?;
    let fc = scene
        .fiber_chart
        .clone()
        .ok_or(GeomError::Dimension { got: scene.chart.dim(), requirement: "para-CR frames need n = 3" })?;
    let lifted = lift(&conn, &fc);
    let frame = paracr_frame(&lifted)?;
    let bracket = frame.bracket();
    let contraction = weyl_contraction(&projconf::projective::projective_weyl(&lifted)?, &fc);
    let integrable = bracket.iter().all(Expr::is_zero);
    let matches = bracket[..3].iter().all(Expr::is_zero) && bracket[3..] == contraction;

    // Sample points, skipping any that hit a pole.
    let mut corpus = Corpus::new(options.seed);
    let wanted = options.samples.unwrap_or(4);
    let mut rows = Vec::new();
    let mut attempts = 0;
    while rows.len() < wanted && attempts < 20 * wanted.max(1) {
        attempts += 1;
        let point = corpus.point(fc.num_vars());
        match paracr_torsion_diagnostics(&lifted, &[point]) {
            Ok(mut row) => rows.push(row.remove(0)),
            Err(GeomError::Sym(SymError::Pole | SymError::DivisionByZero)) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    let rows: Vec<Value> = rows
        .iter()
        .map(|row| {
            json!({
                "point": report::rationals(&row.point),
                "defect": report::rationals(&row.defect_values),
                "weyl_components": report::rationals(&row.weyl_components),
                "contraction": report::rationals(&row.contraction),
                "covanish": row.covanish,
            })
        })
        .collect();

    let mut r = Records::new();
    insert(&mut r, "v1", report::exprs(&fc, &frame.v1));
    insert(&mut r, "v2", report::exprs(&fc, &frame.v2));
    insert(&mut r, "contact_values", report::exprs(&fc, &frame.contact_values()));
    insert(&mut r, "bracket", report::exprs(&fc, &bracket));
    insert(&mut r, "weyl_contraction", report::exprs(&fc, &contraction));
    insert(&mut r, "bracket_matches_contraction", json!(matches));
    insert(&mut r, "integrable", json!(integrable));
    insert(&mut r, "diagnostics", Value::Array(rows));
    Ok((r, Verdict::from_bool(integrable)))
}

type IdentityResult = Result<Option<Tensor>, GeomError>;
type IdentityCheck = fn(&WeylStructure) -> IdentityResult;

/// The identity suite: name, and a check returning its residual (or `None`
/// when the identity has no residual tensor). Sorted by name.
fn identity_suite(n: usize) -> Vec<(&'static str, IdentityCheck)> {
    let mut items: Vec<(&'static str, IdentityCheck)> = vec![
        ("beltrami_implication", |w| match beltrami_check(w) {
            Ok(_) => Ok(None),
            Err(GeomError::Invariant(_)) => Ok(Some(Tensor::scalar(w.chart(), Expr::one()))),
            Err(e) => Err(e),
        }),
        ("projective_weyl_traces", |w| {
            let pc = projective_curvature(&weyl_connection(w)?)?;
            let (trace, alternation) = weyl_trace_residuals(&pc.weyl)?;
            Ok(Some(if trace.is_zero() { alternation } else { trace }))
        }),
        ("qp", |w| verify_qp_identity(w).map(Some)),
        ("w_trace", |w| verify_w_trace_identity(w).map(Some)),
    ];
    if n == 4 {
        items.push(("cwqp", |w| verify_cwqp_identity(w).map(Some)));
    }
    items.sort_by_key(|(name, _)| *name);
    items
}

fn holds(residual: &Option<Tensor>) -> bool {
    residual.as_ref().is_none_or(Tensor::is_zero)
}

pub fn identities(scene: &Scene, options: &RunOptions, timer: &mut Timer) -> Result<(Records, Verdict), CliError> {
    let w = weyl_of(scene, "identities")?;
    let suite = identity_suite(w.dim());
    let results: Vec<(&str, IdentityResult, f64)> = suite
        .par_iter()
        .map(|(name, check)| {
            let start = Instant::now();
            let out = check(&w);
            (*name, out, start.elapsed().as_secs_f64() * 1e3)
        })
        .collect();

    let mut all_hold = true;
    let mut items = Records::new();
    for (name, result, ms) in results {
        let residual = result?;
        let ok = holds(&residual);
        all_hold &= ok;
        let mut item = json!({ "holds": ok });
        if let Some(t) = &residual {
            item["residual"] = report::tensor(t);
        }
        items.insert(name.to_string(), item);
        timer.entries.insert(format!("identities/{name}"), ms);
    }

    let mut r = Records::new();
    insert(&mut r, "scene", Value::Object(items));
    let count = options.samples.unwrap_or(0);
    if count > 0 {
        let mut corpus = Corpus::new(options.seed);
        let structures: Vec<WeylStructure> =
            (0..count).map(|_| corpus.weyl_structure(w.chart(), scene.signature)).collect();
        let mut failures: BTreeMap<&str, usize> = suite.iter().map(|(name, _)| (*name, 0)).collect();
        let outcomes: Vec<Vec<(&str, bool)>> = structures
            .par_iter()
            .map(|s| suite.iter().map(|(name, check)| (*name, check(s).is_ok_and(|r| holds(&r)))).collect())
            .collect();
        for (name, ok) in outcomes.into_iter().flatten() {
            if !ok {
                *failures.get_mut(name).expect("suite item") += 1;
                all_hold = false;
            }
        }
        insert(&mut r, "corpus", json!({ "structures": count, "seed": options.seed, "failures": failures }));
    }
    Ok((r, Verdict::from_bool(all_hold)))
}

pub struct GeodesicRequest<'a> {
    pub x0: &'a [f64],
    pub v0: &'a [f64],
    pub h: f64,
    pub steps: usize,
}

pub fn geodesic(scene: &Scene, req: &GeodesicRequest) -> Result<String, CliError> {
    let conn = any_connection(scene, "geodesic")?;
    let n = conn.dim();
    let x0 = if req.x0.is_empty() { vec![0.0; n] } else { req.x0.to_vec() };
    let samples = integrate_geodesic(&conn, &x0, req.v0, req.h, req.steps)?;
    Ok(geodesic_csv(&samples, scene.chart.base_names()))
}
