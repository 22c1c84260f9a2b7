//! CLI behavior beyond the acceptance examples: seeding, output formats
//! and per-kind evaluation.

use std::process::Command;

fn run(args: &[&str], env_seed: Option<&str>) -> (String, String, i32) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_divkit"));
    cmd.args(args);
    match env_seed {
        Some(seed) => cmd.env("DIVKIT_SEED", seed),
        None => cmd.env_remove("DIVKIT_SEED"),
    };
    let out = cmd.output().expect("binary runs");
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap(),
    )
}

#[test]
fn all_eval_kinds_produce_values() {
    // tweedie p=1 at x = 2, mu = 2, base = 1:
    // beta/alpha/deviance vanish; qll and phi are 2 ln 2 - 1; theta = ln 2;
    // psi = 1.
    let two_ln2_m1 = 2.0 * std::f64::consts::LN_2 - 1.0;
    for (kind, expected) in [
        ("beta", 0.0),
        ("alpha", 0.0),
        ("deviance", 0.0),
        ("qll", two_ln2_m1),
        ("phi", two_ln2_m1),
        ("theta", std::f64::consts::LN_2),
        ("psi", 1.0),
    ] {
        let (out, err, code) = run(
            &[
                "eval",
                "--vf",
                "tweedie:p=1",
                "--kind",
                kind,
                "--x",
                "2",
                "--mu",
                "2",
                "--base",
                "1",
            ],
            None,
        );
        assert_eq!(code, 0, "kind {kind}: {err}");
        let value: f64 = out.split_whitespace().next().unwrap().parse().unwrap();
        assert!(
            (value - expected).abs() <= 1e-7 * expected.abs().max(1.0),
            "kind {kind}: {value} vs {expected}"
        );
    }
}

#[test]
fn eval_kind_beta_at_mu_not_x() {
    // distinct x and mu so each kind differs
    let (out, _, code) = run(
        &[
            "eval",
            "--vf",
            "tweedie:p=1",
            "--kind",
            "beta",
            "--x",
            "2",
            "--mu",
            "1",
        ],
        None,
    );
    assert_eq!(code, 0);
    let mut fields = out.split_whitespace();
    assert_eq!(fields.next(), Some("0.386294361"));
    assert_eq!(fields.next(), Some("closed_form"));
    assert_eq!(fields.next(), Some("0"));
}

#[test]
fn forced_quadrature_reports_method_and_error() {
    let (out, _, code) = run(
        &[
            "eval",
            "--vf",
            "tweedie:p=1",
            "--kind",
            "beta",
            "--x",
            "2",
            "--mu",
            "1",
            "--quadrature",
        ],
        None,
    );
    assert_eq!(code, 0);
    let fields: Vec<&str> = out.split_whitespace().collect();
    assert_eq!(fields[0], "0.386294361");
    assert_eq!(fields[1], "quadrature");
    let err: f64 = fields[2].parse().unwrap();
    assert!(err > 0.0 && err < 1e-8);
}

#[test]
fn missing_x_for_beta_is_a_domain_error() {
    let (_, err, code) = run(
        &["eval", "--vf", "tweedie:p=1", "--kind", "beta", "--mu", "1"],
        None,
    );
    assert_eq!(code, 2, "{err}");
}

#[test]
fn fractional_power_warns_on_stderr() {
    let (_, err, code) = run(
        &[
            "eval",
            "--vf",
            "tweedie:p=0.5",
            "--kind",
            "beta",
            "--x",
            "2",
            "--mu",
            "1",
        ],
        None,
    );
    assert_eq!(code, 0);
    assert!(err.contains("no exponential dispersion model"), "{err}");
}

#[test]
fn env_seed_changes_cases_and_flag_overrides() {
    let base = [
        "verify", "--suite", "bregman", "--vf", "sech", "--format", "json",
    ];
    let (seed_a, _, _) = run(&base, Some("11"));
    let (seed_b, _, _) = run(&base, Some("12"));
    assert_ne!(
        seed_a, seed_b,
        "different seeds must sample different cases"
    );

    let mut with_flag = base.to_vec();
    with_flag.extend(["--seed", "11"]);
    let (flag_out, _, _) = run(&with_flag, Some("999"));
    assert_eq!(flag_out, seed_a, "--seed overrides DIVKIT_SEED");
}

#[test]
fn verify_json_matches_schema() {
    let (out, _, code) = run(
        &[
            "verify", "--suite", "deviance", "--vf", "negbin", "--format", "json",
        ],
        None,
    );
    assert_eq!(code, 0);
    let parsed: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(parsed["suite"], "deviance");
    let cases = parsed["cases"].as_array().unwrap();
    assert!(!cases.is_empty());
    for case in cases {
        for key in ["name", "lhs", "rhs", "abs_err", "rel_err", "pass"] {
            assert!(case.get(key).is_some(), "case missing {key}: {case}");
        }
        assert_eq!(case["pass"], true);
    }
}

#[test]
fn degenerate_table_grid_is_a_single_zero_row() {
    let (out, _, code) = run(
        &[
            "table",
            "--vf",
            "tweedie:p=1",
            "--kind",
            "beta",
            "--x-min",
            "2",
            "--x-max",
            "2",
            "--x-steps",
            "1",
            "--mu-min",
            "2",
            "--mu-max",
            "2",
            "--mu-steps",
            "1",
        ],
        None,
    );
    assert_eq!(code, 0);
    assert_eq!(out, "x,mu,value,method,err\n2,2,0,closed_form,0\n");
}

#[test]
fn table_grid_crossing_zero_flags_domain_rows() {
    let (out, _, code) = run(
        &[
            "table",
            "--vf",
            "tweedie:p=2",
            "--kind",
            "beta",
            "--x-min",
            "1",
            "--x-max",
            "1",
            "--x-steps",
            "1",
            "--mu-min",
            "-1",
            "--mu-max",
            "1",
            "--mu-steps",
            "3",
        ],
        None,
    );
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[1], "1,-1,nan,none,domain");
    assert_eq!(lines[2], "1,0,nan,none,domain");
    assert_eq!(lines[3], "1,1,0,closed_form,0");
}

#[test]
fn density_range_emits_csv() {
    let (out, _, code) = run(
        &[
            "density",
            "--model",
            "poisson",
            "--mu",
            "2",
            "--x-min",
            "0",
            "--x-max",
            "3",
            "--x-steps",
            "4",
        ],
        None,
    );
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "x,mu,value,method,err");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("0,2,0.135335283"));
}

#[test]
fn density_outside_support_exits_two() {
    let (_, _, code) = run(
        &["density", "--model", "poisson", "--mu", "2", "--x", "1.5"],
        None,
    );
    assert_eq!(code, 2);
    let (_, _, code) = run(&["density", "--model", "gamma:a=2,b=2", "--x", "-1"], None);
    assert_eq!(code, 2);
}

#[test]
fn entropy_closed_and_mc_routes() {
    let (out, _, code) = run(&["entropy", "--model", "gaussian:sigma2=1"], None);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "1.41893853");

    let (out, _, code) = run(&["entropy", "--model", "gamma:a=1,b=1"], None);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "1");

    // No closed route for the Poisson: inapplicable without --mc.
    let (_, _, code) = run(&["entropy", "--model", "poisson", "--mu", "3"], None);
    assert_eq!(code, 4);

    let (out, _, code) = run(
        &[
            "entropy",
            "--model",
            "poisson",
            "--mu",
            "3",
            "--mc",
            "--samples",
            "50000",
            "--seed",
            "5",
        ],
        None,
    );
    assert_eq!(code, 0);
    let value: f64 = out.split_whitespace().next().unwrap().parse().unwrap();
    // direct summation gives H = 1.93147 for mu = 3
    assert!((value - 1.93147).abs() < 0.02, "{out}");
}

#[test]
fn unknown_family_token_exits_two() {
    let (_, err, code) = run(
        &[
            "eval", "--vf", "weibull", "--kind", "beta", "--x", "1", "--mu", "1",
        ],
        None,
    );
    assert_eq!(code, 2);
    assert!(err.contains("unknown family"), "{err}");
}
