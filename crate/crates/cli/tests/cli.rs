use std::io::Write;
use std::process::Command as Process;

use clap::Parser;
use projconf::Signature;
use projconf_cli::{execute, parse_scene, Cli, CliError, LoadOptions, Outcome};
use serde_json::Value;
use tempfile::NamedTempFile;

const FLAT: &str = "[chart] n=3 vars=x0,x1,x2\n[metric] diag(1,1,1)\n";
const FLAT_WITH_ZERO_CONNECTION: &str =
    "[chart]\nn = 3\nvars = x0, x1, x2\n\n[metric]\ndiag(1, 1, 1)\n\n[connection]\n";
const PLANTED: &str = "[connection]\n0 1 1 = x2\n";
const SPHERE: &str = "[metric]\ndiag(4/(1+x0^2+x1^2+x2^2)^2, 4/(1+x0^2+x1^2+x2^2)^2, 4/(1+x0^2+x1^2+x2^2)^2)\n";
const WARPED: &str = "[metric]\n0 0 = 1\n1 1 = 1 + x0^2\n2 2 = 1 + x1^2\n";

fn scene_file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn run(args: &[&str], scene: Option<&str>) -> Result<Outcome, CliError> {
    let file = scene.map(scene_file);
    let mut argv: Vec<String> = vec!["projconf".into()];
    argv.extend(args.iter().map(|s| s.to_string()));
    if let Some(f) = &file {
        argv.push("--scene".into());
        argv.push(f.path().display().to_string());
    }
    execute(&Cli::try_parse_from(argv).unwrap())
}

fn records(o: &Outcome) -> Value {
    serde_json::from_str::<Value>(&o.text).unwrap()["records"].clone()
}

fn exit_code(r: &Result<Outcome, CliError>) -> i32 {
    r.as_ref().map_or(1, |o| o.exit_code)
}

#[test]
fn minimal_scene_is_flat() {
    let s = parse_scene(FLAT, &LoadOptions::default()).unwrap();
    assert_eq!(s.chart.dim(), 3);
    let g = s.metric.unwrap();
    assert_eq!(g, projconf::Metric::flat(&s.chart, Signature::Riemannian));
    assert!(s.connection.is_none() && s.odes.is_none());
}

#[test]
fn odes_only_scene() {
    let s = parse_scene("[odes]\nF1 = p1^3\nF2 = p1^2*p2\n", &LoadOptions::default()).unwrap();
    assert!(s.metric.is_none() && s.connection.is_none());
    let odes = s.odes.unwrap();
    assert_eq!(odes.chart().render(odes.rhs(1)), "p1^3");
}

#[test]
fn undeclared_variable_is_reported_at_its_line() {
    let text = "[chart]\nn = 3\n[metric]\n0 0 = 1\n1 1 = 1 + x3\n2 2 = 1\n";
    match parse_scene(text, &LoadOptions::default()) {
        Err(CliError::Scene { line, column, message }) => {
            assert_eq!(line, 5);
            assert_eq!(column, 11);
            assert!(message.contains("x3"), "{message}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn malformed_scenes_are_rejected() {
    let bad = [
        ("[metric]\ndiag(1,1)\n", 2),
        ("[connection]\n0 1 2 = x0\n0 2 1 = x1\n", 3),
        ("[chart]\nsignature = 2\n[metric]\ndiag(1,1,1)\n", 2),
        ("[chart]\nn = 3\nvars = a, b\n[metric]\ndiag(1,1,1)\n", 2),
        ("[shape]\n", 1),
        ("[metric]\ndiag(1,1,1)\n[beta]\n3 = x0\n", 4),
        ("[metric]\ndiag(1, 1, p1)\n", 2),
        ("0 0 = 1\n", 1),
    ];
    for (text, want_line) in bad {
        match parse_scene(text, &LoadOptions::default()) {
            Err(CliError::Scene { line, .. }) => assert_eq!(line, want_line, "{text}"),
            other => panic!("{text}: {other:?}"),
        }
    }
    assert!(matches!(parse_scene("[chart]\nn = 3\n", &LoadOptions::default()), Err(CliError::Scene { .. })));
    assert!(matches!(
        parse_scene("[metric]\ndiag(0,1,1)\n", &LoadOptions::default()),
        Err(CliError::Scene { line: 1, .. })
    ));
}

#[test]
fn chart_options_apply() {
    let text = "[chart]\nvars = t, u, v\nfiber = q1, q2\nsignature = -1\n[metric]\ndiag(1, -1, -1)\n[odes]\nF1 = q1*t\nF2 = 0\n";
    let s = parse_scene(text, &LoadOptions::default()).unwrap();
    assert_eq!(s.signature, Signature::Lorentzian);
    assert_eq!(s.fiber_chart.as_ref().unwrap().fiber_names(), ["q1", "q2"]);
    let over = LoadOptions { signature: Some(Signature::Riemannian), degree_bound: Some(5) };
    let s = parse_scene(text, &over).unwrap();
    assert_eq!(s.signature, Signature::Riemannian);
    assert_eq!(s.chart.degree_bound(), 5);
}

#[test]
fn spec_examples() {
    let o = run(&["beltrami"], Some(FLAT)).unwrap();
    let r = records(&o);
    assert_eq!(o.exit_code, 0);
    assert_eq!(r["projectively_flat"], true);
    assert_eq!(r["conformally_flat"], true);

    let o = run(&["metrizable"], Some(FLAT_WITH_ZERO_CONNECTION)).unwrap();
    let r = records(&o);
    assert_eq!(r["found"], true);
    assert_eq!(r["beta"], serde_json::json!(["0", "0", "0"]));

    let o = run(&["quartic", "--coeffs", "1,0,0,0,0"], None).unwrap();
    let r = records(&o);
    assert_eq!(r["kind"], "TypeN");
    assert_eq!(r["root"], "[0:1]");
    assert_eq!(r["multiplicity"], 4);
}

#[test]
fn exit_codes_per_command() {
    let n4 = "[chart]\nn = 4\n[metric]\ndiag(1,1,1,1)\n";
    let weyl_x1 = "[metric]\ndiag(1,1,1)\n[beta]\n0 = x1\n";
    let shifted = "[connection]\n0 0 0 = 2\n1 0 1 = 1\n2 0 2 = 1\n[connection2]\n";
    let cases: Vec<(Vec<&str>, &str, i32)> = vec![
        (vec!["analyze-metric"], SPHERE, 0),
        (vec!["analyze-metric"], weyl_x1, 0),
        (vec!["analyze-connection"], PLANTED, 0),
        (vec!["odes"], PLANTED, 0),
        (vec!["odes"], "[odes]\nF1 = p1^4\nF2 = 0\n", 2),
        (vec!["thomas"], PLANTED, 0),
        (vec!["thomas"], "[odes]\nF1 = p1^3\nF2 = p1^2*p2\n", 0),
        (vec!["thomas"], "[odes]\nF1 = p1^3\nF2 = 0\n", 1),
        (vec!["equivalent"], shifted, 0),
        (vec!["equivalent"], "[connection]\n0 1 1 = 1\n[connection2]\n", 2),
        (vec!["metrizable"], FLAT_WITH_ZERO_CONNECTION, 0),
        (vec!["metrizable"], "[metric]\ndiag(1,1,1)\n[connection]\n0 1 1 = x2\n", 2),
        (vec!["beltrami"], SPHERE, 0),
        (vec!["beltrami"], WARPED, 2),
        (vec!["einstein-weyl"], SPHERE, 0),
        (vec!["einstein-weyl"], WARPED, 2),
        (vec!["twistor-type"], WARPED, 0),
        (vec!["paracr"], FLAT_WITH_ZERO_CONNECTION, 0),
        (vec!["paracr"], PLANTED, 2),
        (vec!["identities"], weyl_x1, 0),
        (vec!["identities"], n4, 0),
        (vec!["geodesic", "--v0", "1,0,0", "--steps", "10"], SPHERE, 0),
        // Missing sections are errors.
        (vec!["metrizable"], FLAT, 1),
        (vec!["equivalent"], PLANTED, 1),
        (vec!["twistor-type"], PLANTED, 1),
        (vec!["paracr"], n4, 1),
    ];
    for (args, scene, want) in cases {
        let got = run(&args, Some(scene));
        assert_eq!(exit_code(&got), want, "{args:?} on {scene:?}: {:?}", got.as_ref().err());
    }
    assert_eq!(exit_code(&run(&["quartic", "--coeffs", "1,0,-5,0,6"], None)), 0);
    assert!(matches!(run(&["quartic", "--coeffs", "1,0,0"], None), Err(CliError::Usage(_))));
    assert!(matches!(run(&["beltrami"], None), Err(CliError::Usage(_))));
}

#[test]
fn command_records() {
    let o = run(&["equivalent"], Some("[connection]\n0 0 0 = 2\n1 0 1 = 1\n2 0 2 = 1\n[connection2]\n")).unwrap();
    assert_eq!(records(&o)["f"], serde_json::json!(["-1", "0", "0"]));

    let r = records(&run(&["twistor-type"], Some(WARPED)).unwrap());
    assert_eq!((r["kind"].as_str(), r["root"].as_str()), (Some("TypeN"), Some("[0:1]")));
    assert_eq!(records(&run(&["twistor-type"], Some(SPHERE)).unwrap())["kind"], "Zero");

    let r = records(&run(&["beltrami"], Some(SPHERE)).unwrap());
    assert_eq!(r["pure_trace"]["c"], "-1/2");

    let r = records(&run(&["odes"], Some("[connection]\n0 1 1 = 1\n")).unwrap());
    assert_eq!((r["f1"].as_str(), r["f2"].as_str()), (Some("p1^3"), Some("p1^2*p2")));
    assert_eq!(r["source"], "connection");

    let r = records(&run(&["paracr", "--samples", "3"], Some("[connection]\n0 1 1 = 1\n")).unwrap());
    assert_eq!(r["v1"], serde_json::json!(["p1", "1", "0", "-1", "0"]));
    assert_eq!(r["integrable"], true);
    assert_eq!(r["diagnostics"].as_array().unwrap().len(), 3);

    let r = records(&run(&["quartic", "--coeffs", "1,0,-5/6,0,6"], None).unwrap());
    assert_eq!(r["kind"], "TypeI");
    assert_eq!(r["real_roots"].as_array().unwrap().len(), 4);

    let r = records(
        &run(&["identities", "--samples", "2", "--seed", "9"], Some("[metric]\ndiag(1,1,1)\n[beta]\n0 = x1\n"))
            .unwrap(),
    );
    assert_eq!(r["scene"]["qp"]["holds"], true);
    assert_eq!(r["corpus"]["structures"], 2);
    assert!(r["corpus"]["failures"].as_object().unwrap().values().all(|v| v == 0));
    let names: Vec<&String> = r["scene"].as_object().unwrap().keys().collect();
    assert_eq!(names, ["beltrami_implication", "projective_weyl_traces", "qp", "w_trace"]);
}

#[test]
fn geodesic_csv_output() {
    let o = run(&["geodesic", "--x0", "0,0,0", "--v0", "1,-1,0", "--h", "0.01", "--steps", "5"], Some(FLAT)).unwrap();
    let lines: Vec<&str> = o.text.lines().collect();
    assert_eq!(lines[0], "t,x0,x1,x2");
    assert_eq!(lines.len(), 7);
    let last: Vec<f64> = lines[6].split(',').map(|x| x.parse().unwrap()).collect();
    assert!((last[0] - 0.05).abs() < 1e-12 && (last[1] - 0.05).abs() < 1e-12 && (last[2] + 0.05).abs() < 1e-12);
}

#[test]
fn timings_only_when_requested() {
    let plain = run(&["beltrami"], Some(FLAT)).unwrap();
    assert!(!plain.text.contains("timings_ms"));
    let timed = run(&["beltrami", "--timings"], Some(FLAT)).unwrap();
    let v: Value = serde_json::from_str(&timed.text).unwrap();
    assert!(v["timings_ms"]["beltrami"].as_f64().unwrap() >= 0.0);
}

#[test]
fn binary_reports_are_byte_identical() {
    let bin = env!("CARGO_BIN_EXE_projconf");
    let scene = scene_file(WARPED);
    let path = scene.path().display().to_string();
    for command in ["analyze-metric", "beltrami", "identities", "paracr"] {
        let mut outs = Vec::new();
        for _ in 0..2 {
            let out =
                Process::new(bin).args([command, "--scene", &path, "--samples", "2", "--seed", "3"]).output().unwrap();
            outs.push((out.status.code(), out.stdout));
        }
        assert_eq!(outs[0], outs[1], "{command}");
        assert!(!outs[0].1.is_empty());
    }
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.json");
    let status = Process::new(bin)
        .args(["quartic", "--coeffs", "0,0,0,0,0", "--out", target.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(written["records"]["kind"], "Zero");
    let missing = Process::new(bin).args(["beltrami", "--scene", "/nonexistent/scene"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("/nonexistent/scene"));
}
