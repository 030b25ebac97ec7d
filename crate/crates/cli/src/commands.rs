use std::cmp::Ordering;

use serde_json::{json, Map, Value};
use serint_core::definite::{cross_validate, DefiniteRequest, Verdict};
use serint_core::error::Error;
use serint_core::expr::{parse, Expr};
use serint_core::jet::derivatives_at;
use serint_core::numeric::{PrecisionContext, Scalar};
use serint_core::series::{
    classify, lemma1_symbolic_terms, lemma1_terms, partial_sum_derivative_residual,
    theorem1_series, theorem1_symbolic, theorem1_term, AntiderivativeFamily, ConvergencePolicy,
    SeriesOutcome, Status, TermRecord,
};

use crate::args::{Command, GlobalOpts};
use crate::report::{table, Fields, Report};

/// Relative tolerance of the `check` command.
const CHECK_TOL: &str = "1e-10";

struct Env {
    ctx: PrecisionContext,
    policy: ConvergencePolicy,
    digits: usize,
}

impl Env {
    fn new(opts: &GlobalOpts) -> Result<Env, String> {
        let ctx = PrecisionContext::new(opts.precision_bits)
            .map_err(|e| format!("--precision-bits: {e}"))?;
        let policy = ConvergencePolicy {
            tol_abs: literal("--tol-abs", &opts.tol_abs)?,
            tol_rel: literal("--tol-rel", &opts.tol_rel)?,
            max_terms: opts.max_terms,
            ..ConvergencePolicy::default()
        };
        policy.validate().map_err(|e| e.to_string())?;
        let digits = ctx.decimal_digits();
        Ok(Env {
            ctx,
            policy,
            digits,
        })
    }

    fn num(&self, s: &Scalar) -> Value {
        Value::String(s.to_decimal(self.digits))
    }
}

fn literal(flag: &str, text: &str) -> Result<Scalar, String> {
    Scalar::from_literal(text).map_err(|e| format!("{flag}: {e}"))
}

fn expression(what: &str, text: &str) -> Result<Expr, String> {
    parse(text).map_err(|e| {
        let caret = " ".repeat(e.position);
        format!("{what}: {e}\n  {text}\n  {caret}^")
    })
}

fn core(e: Error) -> String {
    e.to_string()
}

fn input_of(cmd: &Command) -> Map<String, Value> {
    let v = match cmd {
        Command::Integrate { expr, at, symbolic } => {
            json!({"expr": expr, "at": at, "symbolic": symbolic})
        }
        Command::Defint { expr, a, b } => json!({"expr": expr, "a": a, "b": b}),
        Command::Terms { expr, at, n } => json!({"expr": expr, "at": at, "n": n}),
        Command::Udv { u, v, at, symbolic } => {
            json!({"u": u, "v": v, "at": at, "symbolic": symbolic})
        }
        Command::Check { expr, at, n } => json!({"expr": expr, "at": at, "n": n}),
    };
    match v {
        Value::Object(m) => m,
        _ => unreachable!("input is an object"),
    }
}

/// Runs one command to a report; never panics on bad input.
pub fn execute(opts: &GlobalOpts, cmd: &Command) -> Report {
    let input = input_of(cmd);
    let result = Env::new(opts).and_then(|env| match cmd {
        Command::Integrate { expr, at, symbolic } => integrate(&env, expr, at, *symbolic),
        Command::Defint { expr, a, b } => defint(&env, expr, a, b),
        Command::Terms { expr, at, n } => terms(&env, expr, at, *n),
        Command::Udv { u, v, at, symbolic } => udv(&env, u, v, at, *symbolic),
        Command::Check { expr, at, n } => check(&env, expr, at, *n),
    });
    match result {
        Ok((code, fields)) => Report {
            command: cmd.name(),
            input,
            code,
            body: Ok(fields),
        },
        Err(e) => Report::error(cmd.name(), input, e),
    }
}

fn series_code(status: Status) -> i32 {
    if status.is_success() {
        0
    } else {
        2
    }
}

fn term_json(env: &Env, t: &TermRecord) -> Value {
    json!({
        "index": t.index,
        "value": env.num(&t.value),
        "cofactor": t.cofactor.as_ref().map(|c| env.num(c)),
        "symbolic": t.symbolic.as_ref().map(|s| s.to_string()),
    })
}

fn put_outcome(env: &Env, f: &mut Fields, out: &SeriesOutcome) {
    f.put("status", out.status.name());
    f.put("value", env.num(&out.value));
    f.put("error_estimate", env.num(&out.error_estimate));
    f.put("stop_index", out.stop_index);
    f.put("optimal_truncation", out.optimal_truncation);
    let terms: Vec<Value> = out.terms.iter().map(|t| term_json(env, t)).collect();
    f.put_with_text(
        "terms",
        Value::Array(terms),
        vec![format!("terms_computed: {}", out.terms.len())],
    );
}

fn integrate(
    env: &Env,
    expr: &str,
    at: &str,
    symbolic: Option<usize>,
) -> Result<(i32, Fields), String> {
    let f = expression("expr", expr)?;
    let x0 = literal("--at", at)?;
    let out = theorem1_series(&f, &x0, &env.policy, &env.ctx).map_err(core)?;
    let mut fields = Fields::default();
    put_outcome(env, &mut fields, &out);
    // a terminated series is the exact antiderivative, so show it unasked
    let through = symbolic.or((out.status == Status::Terminated).then_some(out.stop_index));
    let sym = match through {
        Some(n) => Some(theorem1_symbolic(&f, n).map_err(core)?.to_string()),
        None => None,
    };
    fields.put("symbolic", sym);
    Ok((series_code(out.status), fields))
}

fn defint(env: &Env, expr: &str, a: &str, b: &str) -> Result<(i32, Fields), String> {
    let f = expression("expr", expr)?;
    let mut req = DefiniteRequest::new(f, literal("--a", a)?, literal("--b", b)?);
    req.policy = env.policy.clone();
    let out = cross_validate(&req, &env.ctx).map_err(core)?;
    let mut fields = Fields::default();
    fields.put("verdict", out.verdict.name());
    fields.put("oracle_value", env.num(&out.oracle_value));
    fields.put("abs_diff", env.num(&out.abs_diff));
    put_outcome(env, &mut fields, &out.series);
    let code = match out.verdict {
        Verdict::Agrees => 0,
        Verdict::Disagrees => 3,
        Verdict::SeriesFailed => 2,
    };
    Ok((code, fields))
}

fn trend(prev: Option<&Scalar>, cur: &Scalar) -> &'static str {
    match prev.map(|p| cur.cmp_abs(p)) {
        None => "",
        Some(Ordering::Greater) => "up",
        Some(Ordering::Less) => "down",
        Some(Ordering::Equal) => "flat",
    }
}

fn terms(env: &Env, expr: &str, at: &str, n: usize) -> Result<(i32, Fields), String> {
    if n == 0 {
        return Err("-n must be at least 1".into());
    }
    let f = expression("expr", expr)?;
    let x0 = literal("--at", at)?;
    let derivs = derivatives_at(&f, &x0, n, &env.ctx).map_err(core)?;
    let mut records = Vec::with_capacity(n + 1);
    let mut sum = Scalar::zero();
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    for i in 0..=n {
        let t = theorem1_term(i, &derivs, &x0);
        sum = sum.add(&t);
        let mark = trend(records.last().map(|r: &TermRecord| &r.value), &t);
        rows.push(vec![
            i.to_string(),
            t.to_decimal(env.digits),
            sum.to_decimal(env.digits),
            mark.to_string(),
        ]);
        json_rows.push(json!({
            "index": i,
            "value": env.num(&t),
            "partial_sum": env.num(&sum),
            "trend": mark,
        }));
        records.push(TermRecord {
            index: i,
            value: t,
            symbolic: None,
            cofactor: None,
        });
    }
    let mut fields = Fields::default();
    fields.put("status", classify(&records, &env.policy).name());
    fields.put("value", env.num(&sum));
    fields.put("error_estimate", env.num(&records[n].value.abs()));
    fields.put_with_text(
        "terms",
        Value::Array(json_rows),
        table(&["i", "term", "partial_sum", "trend"], &rows),
    );
    Ok((0, fields))
}

fn udv(env: &Env, u: &str, v: &str, at: &str, symbolic: usize) -> Result<(i32, Fields), String> {
    let u = expression("--u", u)?;
    let v = AntiderivativeFamily::from_text(v).map_err(core)?;
    let x0 = literal("--at", at)?;
    let mut out = lemma1_terms(&u, &v, &x0, &env.policy, &env.ctx).map_err(core)?;
    let sym = lemma1_symbolic_terms(&u, &v, symbolic).map_err(core)?;
    let text: Vec<String> = sym
        .iter()
        .enumerate()
        .map(|(i, s)| format!("  [{i}] {s}"))
        .collect();
    let listed: Vec<Value> = sym.iter().map(|s| Value::String(s.to_string())).collect();
    out.attach_symbolic(sym);
    let mut fields = Fields::default();
    fields.put("family", v.to_string());
    put_outcome(env, &mut fields, &out);
    let mut lines = vec!["symbolic_terms:".to_string()];
    lines.extend(text);
    fields.put_with_text("symbolic_terms", Value::Array(listed), lines);
    Ok((series_code(out.status), fields))
}

fn check(env: &Env, expr: &str, at: &str, n: usize) -> Result<(i32, Fields), String> {
    let f = expression("expr", expr)?;
    let x0 = literal("--at", at)?;
    let r = partial_sum_derivative_residual(&f, &x0, n, &env.ctx).map_err(core)?;
    let gap = r.residual.sub(&r.predicted).abs();
    let scale = if r.residual.cmp_abs(&r.predicted) == Ordering::Greater {
        r.residual.abs()
    } else {
        r.predicted.abs()
    };
    let tol = Scalar::from_literal(CHECK_TOL).expect("literal");
    let pass = gap.cmp_value(&tol.mul(&scale)) != Ordering::Greater;
    let mut fields = Fields::default();
    fields.put("status", if pass { "PASS" } else { "FAIL" });
    fields.put("value", env.num(&r.residual));
    fields.put("predicted", env.num(&r.predicted));
    fields.put("error_estimate", env.num(&gap));
    Ok((if pass { 0 } else { 3 }, fields))
}
