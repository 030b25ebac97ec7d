use std::path::PathBuf;
use std::process::Command;

use proptest::prelude::*;
use serde_json::Value;
use serint_core::numeric::{PrecisionContext, Scalar};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn serint(args: &[&str]) -> Run {
    serint_env(args, None)
}

fn serint_env(args: &[&str], bits: Option<&str>) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_serint"));
    cmd.args(args).env_remove("SERINT_PRECISION_BITS");
    if let Some(b) = bits {
        cmd.env("SERINT_PRECISION_BITS", b);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--output", "json"]);
    let r = serint(&all);
    (
        r.code,
        serde_json::from_str(&r.stdout).expect("json report"),
    )
}

fn lit(s: &str) -> Scalar {
    Scalar::from_literal(s).unwrap()
}

/// The example commands with their contractual exit codes.
const EXAMPLES: &[(&str, &[&str], i32)] = &[
    ("integrate_x", &["integrate", "x", "--at", "3"], 0),
    ("integrate_exp", &["integrate", "e^x", "--at", "1"], 0),
    (
        "integrate_exp_over_x",
        &["integrate", "e^x / x", "--at", "10"],
        2,
    ),
    ("defint_x", &["defint", "x", "--a", "0", "--b", "1"], 0),
    (
        "defint_inverse",
        &["defint", "1/x", "--a", "1", "--b", "2"],
        3,
    ),
    (
        "defint_sin",
        &["defint", "sin(x)", "--a", "0", "--b", "3.141592653589793"],
        0,
    ),
    ("terms_x", &["terms", "x", "--at", "1", "-n", "3"], 0),
    ("terms_exp", &["terms", "e^x", "--at", "1", "-n", "4"], 0),
    (
        "terms_exp_over_x",
        &["terms", "e^x / x", "--at", "1", "-n", "5"],
        0,
    ),
    (
        "udv_inverse_exp",
        &["udv", "--u", "1/x", "--v", "exp(x)", "--at", "2"],
        2,
    ),
    (
        "udv_square_x",
        &["udv", "--u", "x^2", "--v", "x", "--at", "1"],
        0,
    ),
    (
        "udv_inverse_square_exp",
        &["udv", "--u", "1/x^2", "--v", "exp(x)", "--at", "3"],
        2,
    ),
    ("check_x", &["check", "x", "--at", "2", "-n", "1"], 0),
    ("check_exp", &["check", "e^x", "--at", "1", "-n", "3"], 0),
    (
        "check_sin",
        &["check", "sin(x)", "--at", "0.7", "-n", "5"],
        0,
    ),
    ("error_parse", &["integrate", "x +* 2", "--at", "1"], 1),
];

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{name}.json"))
}

#[test]
fn golden_json_is_byte_stable() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for (name, args, code) in EXAMPLES {
        let mut all = args.to_vec();
        all.extend(["--output", "json"]);
        let first = serint(&all);
        let second = serint(&all);
        assert_eq!(first.code, *code, "{name}: {}", first.stderr);
        assert_eq!(first.stdout, second.stdout, "{name}");
        assert_eq!(first.code, second.code, "{name}");
        let path = golden_path(name);
        if update {
            std::fs::create_dir_all(path.parent().unwrap()).unwrap();
            std::fs::write(&path, &first.stdout).unwrap();
        }
        let want =
            std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
        assert_eq!(first.stdout, want, "{name} differs from golden file");
    }
}

#[test]
fn every_report_carries_the_common_schema() {
    for (name, args, code) in EXAMPLES.iter().filter(|e| e.2 != 1) {
        let (got, v) = json(args);
        assert_eq!(got, *code);
        assert_eq!(v["command"], args[0], "{name}");
        assert!(v["input"].is_object(), "{name}");
        assert!(v["status"].is_string(), "{name}");
        assert!(v["value"].is_string(), "{name}");
        assert!(v["error_estimate"].is_string(), "{name}");
        lit(v["value"].as_str().unwrap());
    }
}

#[test]
fn integrate_reports() {
    let (code, v) = json(&["integrate", "x", "--at", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "Terminated");
    assert_eq!(v["value"], "4.5");
    assert_eq!(v["symbolic"], "x^2/2");

    let (code, v) = json(&["integrate", "e^x", "--at", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "Converged");
    let ctx = PrecisionContext::default();
    let want = Scalar::one().exp(&ctx).unwrap().sub(&Scalar::one());
    let got = lit(v["value"].as_str().unwrap());
    assert!(got.sub(&want).abs().cmp_value(&lit("1e-12")).is_le());

    let (code, v) = json(&["integrate", "e^x / x", "--at", "10"]);
    assert_eq!(code, 2);
    assert_eq!(v["status"], "Diverged");
    assert!(v["optimal_truncation"].is_u64());
}

#[test]
fn defint_reports() {
    let ctx = PrecisionContext::default();
    let (code, v) = json(&["defint", "x", "--a", "0", "--b", "1"]);
    assert_eq!(
        (code, &v["verdict"], &v["value"], &v["oracle_value"]),
        (0, &"Agrees".into(), &"0.5".into(), &"0.5".into())
    );

    let (code, v) = json(&["defint", "1/x", "--a", "1", "--b", "2"]);
    assert_eq!(code, 3);
    assert_eq!(v["verdict"], "Disagrees");
    assert_eq!(v["value"], "0");
    let ln2 = lit("2").ln(&ctx).unwrap();
    let oracle = lit(v["oracle_value"].as_str().unwrap());
    assert!(oracle.sub(&ln2).abs().cmp_value(&lit("1e-12")).is_le());

    let (code, v) = json(&["defint", "sin(x)", "--a", "0", "--b", "3.141592653589793"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "Agrees");
    let got = lit(v["value"].as_str().unwrap());
    assert!(got.sub(&lit("2")).abs().cmp_value(&lit("1e-10")).is_le());
}

#[test]
fn terms_table_rows() {
    let (_, v) = json(&["terms", "x", "--at", "1", "-n", "3"]);
    let rows = v["terms"].as_array().unwrap();
    let values: Vec<&str> = rows.iter().map(|r| r["value"].as_str().unwrap()).collect();
    let sums: Vec<&str> = rows
        .iter()
        .map(|r| r["partial_sum"].as_str().unwrap())
        .collect();
    assert_eq!(values, ["1", "-0.5", "0", "0"]);
    assert_eq!(sums, ["1", "0.5", "0.5", "0.5"]);

    // e (-1)^i / (i+1)!
    let ctx = PrecisionContext::default();
    let e = Scalar::one().exp(&ctx).unwrap();
    let (_, v) = json(&["terms", "e^x", "--at", "1", "-n", "4"]);
    let mut fact = Scalar::one();
    for (i, row) in v["terms"].as_array().unwrap().iter().enumerate() {
        fact = fact.mul(&Scalar::from_int(i as i64 + 1));
        let sign = if i % 2 == 0 {
            Scalar::one()
        } else {
            Scalar::one().neg()
        };
        let want = e.mul(&sign).div(&fact).unwrap();
        let got = lit(row["value"].as_str().unwrap());
        assert!(
            got.sub(&want).abs().cmp_value(&lit("1e-35")).is_le(),
            "row {i}"
        );
    }
}

#[test]
fn udv_reports_symbolic_terms() {
    let (code, v) = json(&["udv", "--u", "1/x", "--v", "exp(x)", "--at", "2"]);
    assert_eq!(code, 2);
    assert_eq!(v["status"], "Diverged");
    let sym: Vec<&str> = v["symbolic_terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap())
        .collect();
    assert_eq!(
        sym,
        ["exp(x)/x", "exp(x)/x^2", "2*exp(x)/x^3", "6*exp(x)/x^4"]
    );

    let (code, udv) = json(&["udv", "--u", "x^2", "--v", "x", "--at", "1"]);
    let (_, int) = json(&["integrate", "x^2", "--at", "1"]);
    assert_eq!(code, 0);
    assert_eq!(udv["status"], "Terminated");
    assert_eq!(udv["value"], int["value"]);

    let r = serint(&["udv", "--u", "x", "--v", "tan", "--at", "1"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("exp(c*x), sin, cos, x^k"), "{}", r.stderr);
}

#[test]
fn check_reports() {
    let (code, v) = json(&["check", "e^x", "--at", "1", "-n", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "PASS");
    // -e/24
    let want = Scalar::one()
        .exp(&PrecisionContext::default())
        .unwrap()
        .div(&Scalar::from_int(-24))
        .unwrap();
    let got = lit(v["value"].as_str().unwrap());
    assert!(got.sub(&want).abs().cmp_value(&lit("1e-35")).is_le());
}

#[test]
fn input_errors_exit_one_with_position() {
    let r = serint(&["integrate", "x +* 2", "--at", "1"]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.is_empty());
    assert!(r.stderr.contains("offset 3"), "{}", r.stderr);
    assert!(r.stderr.contains("\n     ^"), "{}", r.stderr);
    for args in [
        &["integrate", "x"][..],
        &["integrate", "x", "--at", "1/0"],
        &["integrate", "x", "--at", "abc"],
        &["terms", "x", "--at", "1", "-n", "0"],
        &["check", "ln(x)", "--at", "-1", "-n", "2"],
        &["bogus"],
        &[],
    ] {
        let r = serint(args);
        assert_eq!(r.code, 1, "{args:?}: {}", r.stderr);
        assert!(!r.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn precision_comes_from_environment() {
    let default = serint_env(&["integrate", "e^x", "--at", "1"], None);
    let narrow = serint_env(&["integrate", "e^x", "--at", "1"], Some("64"));
    let flag = serint_env(
        &["integrate", "e^x", "--at", "1", "--precision-bits", "64"],
        Some("256"),
    );
    let value = |r: &Run| {
        r.stdout
            .lines()
            .find(|l| l.starts_with("value: "))
            .unwrap()
            .to_string()
    };
    // ceil(bits * log10 2) significant digits
    assert_eq!(
        value(&default)
            .trim_start_matches("value: ")
            .replace('.', "")
            .len(),
        39
    );
    assert_eq!(
        value(&narrow)
            .trim_start_matches("value: ")
            .replace('.', "")
            .len(),
        20
    );
    assert_eq!(value(&narrow), value(&flag));
}

#[test]
fn batch_keeps_input_order() {
    let dir = std::env::temp_dir().join(format!("serint-batch-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("requests.txt");
    let lines: Vec<String> = (1..=12)
        .map(|k| format!("integrate \"x^2\" --at {k}"))
        .collect();
    std::fs::write(&path, format!("# squares\n\n{}\n", lines.join("\n"))).unwrap();
    let r = serint(&["--batch", path.to_str().unwrap(), "--output", "json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let reports: Vec<Value> = r
        .stdout
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(reports.len(), 12);
    for (k, rep) in (1i64..).zip(&reports) {
        let want = Scalar::ratio(k * k * k, 3).unwrap();
        let bound = want.mul(&lit("1e-38"));
        assert!(lit(rep["value"].as_str().unwrap())
            .sub(&want)
            .abs()
            .cmp_value(&bound)
            .is_le());
    }

    std::fs::write(
        &path,
        "defint 1/x --a 1 --b 2\nintegrate x --at\nintegrate x --at 1\n",
    )
    .unwrap();
    let r = serint(&["--batch", path.to_str().unwrap(), "--output", "json"]);
    assert_eq!(r.code, 3);
    let reports: Vec<Value> = r
        .stdout
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(reports.len(), 3);
    assert!(reports[1]["error"].is_string());
    assert_eq!(reports[2]["value"], "0.5");
    std::fs::remove_dir_all(&dir).ok();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // printed decimals parse back to within one ulp of the computed value
    #[test]
    fn printed_values_round_trip(k in 1i64..40, bits in prop_oneof![Just(64usize), Just(128), Just(200)]) {
        let ctx = PrecisionContext::new(bits).unwrap();
        let x0 = Scalar::ratio(k, 8).unwrap();
        let out = serint_cli::run([
            "serint", "integrate", "e^x", "--at", &x0.to_decimal(10),
            "--precision-bits", &bits.to_string(), "--output", "json",
        ]);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        let printed = lit(v["value"].as_str().unwrap());
        let exact = serint_core::series::theorem1_series(
            &serint_core::expr::parse("e^x").unwrap(),
            &x0,
            &serint_core::series::ConvergencePolicy::default(),
            &ctx,
        ).unwrap().value;
        // one ulp of a p-bit float is at most 2^(1-p) |v|
        let ulp = exact.abs().mul(&Scalar::from_int(2).pow_int(1 - bits as i64).unwrap());
        prop_assert!(printed.sub(&exact).abs().cmp_value(&ulp).is_le());
    }
}
