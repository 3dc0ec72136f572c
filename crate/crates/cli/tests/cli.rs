use std::io::Write;
use std::process::{Command, Output, Stdio};

use hecke_core::json::{
    cf_from_json, cycle_from_json, form_from_json, orbit_from_json, surd_from_json, trace_from_json,
};
use hecke_core::text::{parse_form, parse_surd};
use hecke_core::FieldContext;
use serde_json::Value;

const Q0: &str = "[-3L-2, 27L+15, -51L-32]";
const Q5: &str = "[L+2, -13L-5, 11L+8]";
const SIGMA1: &str = "(-3L-3 + sqrt(135L+86))/(6L+8)";

fn hecke(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hecke"))
        .args(args)
        .output()
        .unwrap()
}

fn hecke_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_hecke"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn alpha0(ctx: &FieldContext) -> String {
    hecke_core::text::render_surd(&parse_form(ctx, Q0).unwrap().alpha().unwrap())
}

#[test]
fn group_check() {
    let o = hecke(&["--p", "5", "group", "check"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).matches(": pass").count(), 4);
    let o = hecke(&["--p", "3", "group", "check"]);
    assert!(stdout(&o).contains("0 < 1 < inf"), "{}", stdout(&o));
    for p in 3..=12 {
        let o = hecke(&["--p", &p.to_string(), "--json", "group", "check"]);
        assert_eq!(code(&o), 0);
        let v = json(&o);
        assert!(v["checks"]
            .as_array()
            .unwrap()
            .iter()
            .all(|c| c["pass"] == true));
    }
}

#[test]
fn cf_expand_examples() {
    let ctx = FieldContext::new(5).unwrap();
    let o = hecke(&["--p", "5", "cf", "expand", &alpha0(&ctx)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "[2; 3, (2, 1, 1, 4)]");
    let o = hecke(&["--p", "4", "cf", "expand", "(L + 1*sqrt(L^2-2+1))/1"]);
    assert_eq!(stdout(&o).trim(), "[(2)]");
    let o = hecke(&["--p", "5", "--json", "cf", "expand", &alpha0(&ctx)]);
    let cf = cf_from_json(&json(&o)).unwrap();
    assert_eq!(cf.period, [2, 1, 1, 4]);
}

#[test]
fn cf_eval_round_trip() {
    let ctx = FieldContext::new(5).unwrap();
    let o = hecke(&["--p", "5", "--json", "cf", "eval", "[2; 3, (2, 1, 1, 4)]"]);
    assert_eq!(code(&o), 0);
    let x = surd_from_json(&ctx, &json(&o)).unwrap();
    assert!(x.value_eq(&parse_form(&ctx, Q0).unwrap().alpha().unwrap()));
    let o = hecke(&["--p", "5", "cf", "eval", "[2; 3]"]);
    assert_eq!(code(&o), 0);
    // A period that is not hyperbolic.
    let o = hecke(&["--p", "5", "cf", "eval", "[(2, 1, 1)]"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn form_reduce_example() {
    let o = hecke(&["--p", "5", "form", "reduce", Q0]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("terminal: [3L+4, -11L-3, L+2]"), "{s}");
    assert!(s.contains("exponents: [2, 3]"), "{s}");
    let ctx = FieldContext::new(5).unwrap();
    let o = hecke(&["--p", "5", "--json", "form", "reduce", Q0]);
    let t = trace_from_json(&ctx, &json(&o)).unwrap();
    assert_eq!(t.exponents(), [2, 3]);
    assert_eq!(t.terminal, parse_form(&ctx, "[3L+4, -11L-3, L+2]").unwrap());
}

#[test]
fn form_cycle_and_simple_set() {
    let ctx = FieldContext::new(5).unwrap();
    let o = hecke(&["--p", "5", "--json", "form", "cycle", Q0]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let c = cycle_from_json(&ctx, &v).unwrap();
    assert_eq!(c.exponents, [2, 1, 1, 4]);
    assert_eq!(c.forms[3], parse_form(&ctx, Q5).unwrap());
    assert_eq!(v["recurrence_length"], 4);
    assert_eq!(v["period_length"], 4);

    let o = hecke(&["--p", "5", "--json", "simple", "set", Q0]);
    let members = json(&o)["members"].as_array().unwrap().clone();
    assert_eq!(members.len(), 4);
    let first = form_from_json(&ctx, &members[0]["form"]).unwrap();
    assert_eq!(first, parse_form(&ctx, "[3L+4, 3L+3, -3L-2]").unwrap());
    let n = surd_from_json(&ctx, &members[0]["number"]).unwrap();
    assert_eq!(n, parse_surd(&ctx, SIGMA1).unwrap());
}

#[test]
fn form_equiv_and_act() {
    let o = hecke(&["--p", "5", "form", "equiv", Q0, Q5]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("equivalent: true"));
    let o = hecke(&["--p", "5", "form", "act", Q0, "[2, 3]"]);
    assert_eq!(stdout(&o).trim(), "[3L+4, -11L-3, L+2]");
    let o = hecke(&["--p", "5", "form", "act", Q0, "(1, L; 0, 1)"]);
    assert_eq!(code(&o), 0);
    let o = hecke(&["--p", "5", "form", "act", Q0, "(1, L; 1, 1)"]);
    assert_eq!(code(&o), 2, "a matrix literal off SL_2 is malformed input");
}

#[test]
fn number_form_dictionary() {
    let ctx = FieldContext::new(5).unwrap();
    let o = hecke(&["--p", "5", "number", "of-form", Q0]);
    assert_eq!(code(&o), 0);
    let a = stdout(&o);
    let o = hecke(&["--p", "5", "form", "of-number", a.trim()]);
    assert_eq!(
        stdout(&o).trim(),
        hecke_core::text::render_form(&parse_form(&ctx, Q0).unwrap())
    );
    let o = hecke(&["--p", "5", "stabilizer", a.trim()]);
    assert!(
        stdout(&o).contains("M: (-9L-6, 51L+32; -3L-2, 18L+9)"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn phi_orbit_example() {
    let ctx = FieldContext::new(5).unwrap();
    let o = hecke(&["--p", "5", "--json", "phi", "orbit", SIGMA1]);
    assert_eq!(code(&o), 0);
    let orbit = orbit_from_json(&ctx, &json(&o)).unwrap();
    assert_eq!(orbit.branches, [1, 4, 4, 3]);
    let o = hecke(&["--p", "5", "phi", "apply", SIGMA1]);
    assert!(stdout(&o).contains("branch: 1"));
}

#[test]
fn domain_errors_exit_one() {
    let cases: &[&[&str]] = &[
        &["--p", "5", "phi", "apply", "-1"],
        &["--p", "5", "form", "of-number", "1/2"],
        &["--p", "5", "stabilizer", "0"],
        &["--p", "5", "form", "reduce", "[1, 1, 1]"],
        &["--p", "5", "number", "of-form", "[0, 1, 1]"],
        &["--p", "5", "--max-steps", "2", "phi", "orbit", SIGMA1],
        &["--p", "5", "--max-steps", "3", "form", "cycle", Q0],
        // Not a fixed point of G_5; the expansion never closes.
        &["--p", "5", "--max-steps", "200", "cf", "expand", "sqrt(2)"],
    ];
    for args in cases {
        let o = hecke(args);
        assert_eq!(
            code(&o),
            1,
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn usage_errors_exit_two() {
    let cases: &[&[&str]] = &[
        &["--p", "2", "group", "check"],
        &["--p", "41", "group", "check"],
        &["--p", "50", "--max-p", "60", "cf", "expand", "(1 +"],
        &["group", "check"],
        &["--p", "5", "bogus"],
        &["--p", "5", "--max-steps", "0", "group", "check"],
        &["--p", "5", "cf", "expand", "(1 + "],
        &["--p", "5", "form", "reduce", "[1, 2"],
        &["--p", "5", "form", "equiv", Q0],
        &["--p", "5", "cf", "eval", "[2; (3"],
    ];
    for args in cases {
        let o = hecke(args);
        assert_eq!(code(&o), 2, "{args:?}");
    }
    let o = hecke(&["--p", "5", "cf", "expand", "(1 + "]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("position 5"));
    assert_eq!(code(&hecke(&["--help"])), 0);
}

#[test]
fn batch_mode() {
    let input = format!("{Q0} | {Q5}\n\n# comment\n[1,2|[3]\n[3L+4, -11L-3, L+2] | [1, 1, 1]\n");
    let o = hecke_stdin(&["--p", "5", "form", "equiv"], &input);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).starts_with("equivalent: true"));
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    assert!(err.contains("line 4: error"), "{err}");
    assert!(err.contains("line 5: error"), "{err}");

    let lines = format!("{Q0}\n{Q5}\n[3L+4, -11L-3, L+2]\n");
    let seq = hecke_stdin(&["--p", "5", "--json", "form", "cycle"], &lines);
    let par = hecke_stdin(
        &["--p", "5", "--json", "--jobs", "3", "form", "cycle"],
        &lines,
    );
    assert_eq!(code(&seq), 0);
    assert_eq!(seq.stdout, par.stdout);
    assert_eq!(stdout(&seq).lines().count(), 3);
}

#[test]
fn output_is_deterministic() {
    let x = hecke(&["--p", "7", "cf", "eval", "[1; (3, 1, 2)]"]);
    let q = hecke(&["--p", "7", "form", "of-number", stdout(&x).trim()]);
    assert_eq!(code(&q), 0);
    let form = stdout(&q);
    let args = ["--p", "7", "--json", "simple", "set", form.trim()];
    let a = hecke(&args);
    let b = hecke(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), b.status.code());
}
