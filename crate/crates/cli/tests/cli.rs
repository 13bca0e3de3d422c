use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use fsing_cli::commands::Options;
use fsing_cli::report::ideal_json;
use fsing_cli::spec::{BuildOptions, SpecFile};
use fsing_cli::{CliError, Format};
use fsing_core::relative::{verify_restriction_theorem, ChainMode, Multiplier};
use fsing_core::{Ideal, PolyRing};
use proptest::prelude::*;
use serde_json::Value;
use tempfile::NamedTempFile;

const INSEPARABLE: &str = r#"{"p": 3, "variables": ["x"], "base": "present", "relations": [],
    "map": {"e": 1, "u": "x^9+t"}, "depth": 4, "n_max": 4}"#;
const CUSP: &str = r#"{"p": 7, "variables": ["x", "y"], "relations": ["y^2+x^3+t"], "map": "canonical", "n_max": 2}"#;
const T_FAMILY: &str = r#"{"p": 3, "variables": ["x"], "base": true, "map": {"u": "t"}, "n_max": 2}"#;
const NODE: &str = r#"{"p": 3, "variables": ["x", "y"], "relations": ["x*y"]}"#;

fn spec_file(src: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(src.as_bytes()).unwrap();
    f
}

fn fsing(args: &[&str], spec: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fsing"))
        .args(args)
        .arg("--spec")
        .arg(spec)
        .output()
        .unwrap()
}

fn json_of(args: &[&str], src: &str) -> Value {
    let f = spec_file(src);
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = fsing(&all, f.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn exit_code(args: &[&str], src: &str) -> i32 {
    let f = spec_file(src);
    fsing(args, f.path()).status.code().unwrap()
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect()
}

fn ideal_from(ring: &std::sync::Arc<PolyRing>, v: &Value) -> Ideal {
    let gens = strings(v);
    let refs: Vec<&str> = gens.iter().map(String::as_str).collect();
    Ideal::parse(ring.clone(), &refs).unwrap()
}

#[test]
fn inseparable_spec_is_valid() {
    let spec = SpecFile::from_json(INSEPARABLE).unwrap();
    let problem = spec.build(&BuildOptions::default()).unwrap();
    assert_eq!(problem.ring.depth(), Some(4));
    assert_eq!(problem.multiplier, Multiplier::Explicit(problem.ring.parse("x^9+t").unwrap()));
}

#[test]
fn cusp_spec_uses_the_canonical_multiplier() {
    let spec = SpecFile::from_json(CUSP).unwrap();
    assert!(spec.has_base());
    let problem = spec.build(&BuildOptions::default()).unwrap();
    let family = problem.family(ChainMode::Sigma).unwrap();
    let f = problem.ring.parse("y^2+x^3+t").unwrap();
    assert_eq!(*family.map().multiplier(), problem.ring.pow(&f, 6).unwrap());
}

#[test]
fn composite_characteristic_is_rejected() {
    let spec = SpecFile::from_json(r#"{"p": 4, "variables": ["x"], "relations": []}"#).unwrap();
    let err = spec.build(&BuildOptions::default()).unwrap_err();
    assert!(matches!(err, CliError::Core(fsing_core::Error::InvalidField(_))));
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn reducible_minimal_polynomial_is_rejected() {
    let src = r#"{"p": 3, "extension_degree": 2, "minimal_polynomial": [2, 0, 1], "variables": ["x"]}"#;
    assert!(SpecFile::from_json(src).unwrap().build(&BuildOptions::default()).is_err());
}

#[test]
fn parse_errors_report_a_position() {
    let err = SpecFile::from_json("{\"p\": 3,\n \"variables\": [\"x\"").unwrap_err();
    assert!(err.to_string().contains("line 2"), "{err}");
}

#[test]
fn sigma_of_the_inseparable_family() {
    let v = json_of(&["sigma", "--n-max", "2"], INSEPARABLE);
    let problem = SpecFile::from_json(INSEPARABLE).unwrap().build(&BuildOptions::default()).unwrap();
    let levels = v["result"]["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 2);
    assert_eq!(strings(&levels[0]), ["x^3+t^(1/3)"]);
    assert_eq!(ideal_from(&problem.ring, &levels[1]), Ideal::parse(problem.ring.clone(), &["(x+t^(1/9))^4"]).unwrap());
    // a_3 is needed to see the chain become constant
    assert_eq!(v["result"]["stabilization"]["kind"], "none");
    let w = json_of(&["sigma", "--n-max", "3"], INSEPARABLE);
    assert_eq!(w["result"]["stabilization"]["kind"], "global");
    assert_eq!(w["result"]["stabilization"]["index"], 2);
}

#[test]
fn t_family_levels_serialize_as_fractions() {
    let v = json_of(&["sigma"], T_FAMILY);
    assert_eq!(v["result"]["levels"], serde_json::json!([["t^(1/3)"], ["t^(4/9)"]]));
    assert_eq!(v["result"]["stabilization"]["kind"], "generic");
}

#[test]
fn cusp_min_t_power() {
    let v = json_of(&["min-t-power", "--n", "1"], CUSP);
    assert_eq!(v["result"]["levels"][0]["units"], 1);
    assert_eq!(v["result"]["levels"][0]["t_power"], "t^(1/7)");
    let f = spec_file(CUSP);
    let text = String::from_utf8(fsing(&["min-t-power", "--n", "1"], f.path()).stdout).unwrap();
    assert!(text.lines().any(|l| l.split_whitespace().collect::<Vec<_>>() == ["1", "1", "t^(1/7)"]), "{text}");
}

#[test]
fn fedder_on_the_node() {
    let v = json_of(&["fedder"], NODE);
    assert_eq!(v["result"]["f_pure"], true);
    let cusp = json_of(&["fedder"], r#"{"p": 7, "variables": ["x", "y"], "relations": ["y^2+x^3"]}"#);
    assert_eq!(cusp["result"]["f_pure"], false);
    let nodal = json_of(&["fedder"], r#"{"p": 5, "variables": ["x", "y"], "relations": ["y^2+x^3+x^2"]}"#);
    assert_eq!(nodal["result"]["f_pure"], true);
}

#[test]
fn trivial_ideals_print_as_constants() {
    let r = PolyRing::new(fsing_core::Field::prime(3).unwrap(), vec!["x".into()], None).unwrap();
    assert_eq!(ideal_json(&Ideal::zero(r.clone()), None), serde_json::json!(["0"]));
    assert_eq!(ideal_json(&Ideal::unit(r), None), serde_json::json!(["1"]));
}

#[test]
fn tau_of_the_section_family() {
    let src = r#"{"p": 3, "variables": ["x"], "relations": [], "map": {"u": "x^9+t"}, "seed": ["x^3+t"], "n_max": 3}"#;
    let v = json_of(&["tau"], src);
    let levels = v["result"]["levels"].as_array().unwrap();
    assert_eq!(levels[1], levels[2]);
    assert_eq!(v["result"]["stabilization"]["kind"], "global");
    // the command-line seed overrides the file
    let w = json_of(&["tau", "--seed", "x^3+t"], &src.replace(r#""seed": ["x^3+t"], "#, ""));
    assert_eq!(v["result"], w["result"]);
}

#[test]
fn scan_matches_the_library() {
    let v = json_of(&["scan"], INSEPARABLE);
    let problem = SpecFile::from_json(INSEPARABLE).unwrap().build(&BuildOptions::default()).unwrap();
    let lib = verify_restriction_theorem(&problem.family(ChainMode::Sigma).unwrap(), problem.n_max).unwrap();
    let fibers = v["result"]["fibers"].as_array().unwrap();
    assert_eq!(fibers.len(), lib.fibers.len());
    for (cli, f) in fibers.iter().zip(&lib.fibers) {
        let field = problem.ring.field();
        assert_eq!(cli["lambda"], field.display(f.lambda).to_string());
        assert_eq!(strings(&cli["fiber_ideal"]), f.fiber_ideal.display_generators(None));
        assert_eq!(cli["n_lambda"], serde_json::json!(f.n_lambda));
    }
    assert_eq!(v["result"]["restriction_n"], 2);
}

#[test]
fn fiber_of_the_cusp() {
    let v = json_of(&["fiber", "--lambda", "0"], CUSP);
    assert_eq!(v["result"]["sigma"], serde_json::json!(["x", "y"]));
    assert_eq!(v["result"]["hsl"], 1);
    let v = json_of(&["fiber", "--lambda", "3"], CUSP);
    assert_eq!(v["result"]["sigma"], serde_json::json!(["1"]));
}

#[test]
fn hsl_and_flags() {
    let v = json_of(&["hsl", "--n-max", "3"], INSEPARABLE);
    assert_eq!(v["result"]["hsl"], 2);
    assert_eq!(v["result"]["within_bound"], true);
    let v = json_of(&["flags"], NODE);
    assert_eq!(v["result"]["f_pure"], true);
    assert_eq!(v["result"]["strongly_f_regular"], false);
}

#[test]
fn compare_absolute_agrees() {
    let v = json_of(&["compare-absolute"], T_FAMILY);
    for level in v["result"]["levels"].as_array().unwrap() {
        assert_eq!(level["equal"], true);
        assert_eq!(level["theta_contains"], true);
    }
}

#[test]
fn exit_codes() {
    let missing = Command::new(env!("CARGO_BIN_EXE_fsing"))
        .args(["sigma", "--spec", "/nonexistent/spec.json"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(1));
    assert_eq!(exit_code(&["sigma"], "{not json"), 1);
    assert_eq!(exit_code(&["sigma"], r#"{"p": 3, "variables": ["x"], "relations": ["x+"]}"#), 1);
    assert_eq!(exit_code(&["sigma", "--bogus"], NODE), 1);
    assert_eq!(exit_code(&["fiber", "--lambda", "0"], NODE), 2);
    let ill = r#"{"p": 3, "variables": ["x"], "base": "present", "relations": ["x^2"], "map": {"u": "x"}}"#;
    assert_eq!(exit_code(&["sigma"], ill), 2);
    assert_eq!(exit_code(&["sigma", "--n-max", "3", "--depth", "2"], T_FAMILY), 2);
    assert_eq!(exit_code(&["sigma"], T_FAMILY), 0);
}

#[test]
fn error_payload_is_structured() {
    let f = spec_file(NODE);
    let out = fsing(&["scan", "--format", "json"], f.path());
    let payload: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(payload["error"]["kind"], "precondition");
    assert_eq!(payload["exit_code"], 2);
}

#[test]
fn reports_are_deterministic() {
    let commands: [&[&str]; 8] = [
        &["sigma"],
        &["tau"],
        &["hsl"],
        &["scan"],
        &["stabilize"],
        &["flags"],
        &["min-t-power"],
        &["compare-absolute"],
    ];
    let f = spec_file(T_FAMILY);
    for args in commands {
        for format in ["text", "json"] {
            let mut all = args.to_vec();
            all.extend(["--format", format]);
            let a = fsing(&all, f.path());
            let b = fsing(&all, f.path());
            assert!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
            assert_eq!(a.stdout, b.stdout, "{args:?} {format}");
        }
    }
}

#[test]
fn timing_only_on_request() {
    let v = json_of(&["sigma"], T_FAMILY);
    assert!(v.get("timing_ms").is_none());
    assert!(v["version"].is_string());
    let w = json_of(&["sigma", "--timing"], T_FAMILY);
    assert!(w["timing_ms"].is_number());
}

#[test]
fn option_defaults() {
    let opts = Options {
        spec: None,
        n_max: None,
        depth: None,
        lambda: None,
        format: Format::Text,
        seed: None,
        power: 1,
        chain: fsing_cli::commands::ChainKind::Sigma,
        timing: false,
    };
    let err = fsing_cli::run(&fsing_cli::Command::Sigma, &opts).unwrap_err();
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn fixed_specs_round_trip() {
    for src in [INSEPARABLE, CUSP, T_FAMILY, NODE] {
        let once = SpecFile::from_json(src).unwrap();
        let twice = SpecFile::from_json(&once.emit()).unwrap();
        assert_eq!(once, twice);
    }
}

fn poly_strategy() -> impl Strategy<Value = String> {
    let term = (0u64..3, 0u64..4, 0u64..3, 1u64..3).prop_map(|(a, b, c, k)| format!("{k}*x^{a}*y^{b}*t^{c}"));
    prop::collection::vec(term, 1..4).prop_map(|ts| ts.join("+"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn emitted_specs_parse_back(
        p in prop::sample::select(vec![2u64, 3, 5, 7]),
        relations in prop::collection::vec(poly_strategy(), 0..3),
        u in prop::option::of(poly_strategy()),
        e in 1u32..3,
        seed in prop::option::of(prop::collection::vec(poly_strategy(), 1..3)),
        depth in prop::option::of(1u32..6),
        n_max in prop::option::of(1u32..6),
        base_flag in prop::option::of(any::<bool>()),
    ) {
        let mut obj = serde_json::json!({ "p": p, "variables": ["x", "y"], "relations": relations });
        if let Some(u) = &u {
            obj["map"] = serde_json::json!({ "e": e, "u": u });
        }
        if let Some(s) = &seed {
            obj["seed"] = serde_json::json!(s);
        }
        if let Some(d) = depth {
            obj["depth"] = serde_json::json!(d);
        }
        if let Some(n) = n_max {
            obj["n_max"] = serde_json::json!(n);
        }
        if let Some(b) = base_flag {
            obj["base"] = serde_json::json!(b);
        }
        let parsed = SpecFile::from_json(&obj.to_string()).unwrap();
        let again = SpecFile::from_json(&parsed.emit()).unwrap();
        prop_assert_eq!(&parsed, &again);
        prop_assert_eq!(parsed.emit(), again.emit());
    }
}
