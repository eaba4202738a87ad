use picalc::equivalence::Witness;
use picalc::semantics::{EarlyResidual, Residual, Semantics, Standard};
use picalc::{Agent, NameSet};
use picalc_cli::{run, run_with};

fn picalc(args: &[&str]) -> (u8, String, String) {
    picalc_with(&Standard, args)
}

fn picalc_with(sem: &dyn Semantics, args: &[&str]) -> (u8, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("picalc").chain(args.iter().copied());
    let code = run_with(argv, sem, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// Replication at the top level does nothing.
struct InertBang;

impl Semantics for InertBang {
    fn late(&self, p: &Agent, avoid: &NameSet) -> Vec<Residual> {
        match p {
            Agent::Bang(_) => Vec::new(),
            _ => Standard.late(p, avoid),
        }
    }

    fn early(&self, p: &Agent, avoid: &NameSet, inputs: &NameSet) -> Vec<EarlyResidual> {
        match p {
            Agent::Bang(_) => Vec::new(),
            _ => Standard.early(p, avoid, inputs),
        }
    }
}

#[test]
fn bound_output_binder_is_printed_in_parentheses() {
    let (code, out, _) = picalc(&["transitions", "(^b)a!b.0", "--system", "late"]);
    assert_eq!(code, 0);
    assert_eq!(out, "a!(b') -> 0\n");
}

#[test]
fn check_exit_codes() {
    assert_eq!(picalc(&["check", "a(u).(^b)b!x.0", "a(x).0"]).0, 0);
    let (code, out, _) = picalc(&["check", "tau.0", "0", "--kind", "strong-late"]);
    assert_eq!(code, 1);
    assert!(out.contains("Left: tau\n  Right has no answer"), "{out}");
    let (code, out, _) = picalc(&["check", "a!b.b!c.c!d.0", "a!b.b!c.c!e.0", "--max-states", "2"]);
    assert_eq!(code, 2);
    assert!(out.contains("reason:"), "{out}");
}

#[test]
fn usage_and_parse_errors_exit_3() {
    let (code, _, err) = picalc(&["parse", "a(x"]);
    assert_eq!(code, 3);
    assert!(err.contains("^"), "{err}");
    assert_eq!(picalc(&["check", "0", "0", "--kind", "strong"]).0, 3);
    assert_eq!(picalc(&["frobnicate"]).0, 3);
    assert_eq!(picalc(&["transitions", "0", "--avoid", "A"]).0, 3);
    assert_eq!(picalc(&["parse", "0", "--defs", "/nonexistent/defs"]).0, 3);
}

#[test]
fn definitions_file() {
    let dir = std::env::temp_dir().join(format!("picalc-defs-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("defs.pi");
    std::fs::write(&path, "Echo = a(x).x!x.0;\n").unwrap();
    let path = path.to_str().unwrap();
    let (code, out, _) = picalc(&["--defs", path, "parse", "Echo | 0"]);
    assert_eq!(code, 0);
    assert_eq!(out, "a(x).x!x.0 | 0\n");
}

#[test]
fn witness_survives_json() {
    let (code, out, _) = picalc(&["--json", "check", "a(x).x!x.0", "a(x).0"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["command"], "check");
    assert_eq!(v["verdict"], "inequivalent");
    let w: Witness = serde_json::from_value(v["witness"].clone()).unwrap();
    assert_eq!(serde_json::to_value(&w).unwrap(), v["witness"]);
    assert!(w.steps.iter().any(|s| s.action.received.is_some()));
    assert!(v["stats"]["states"].as_u64().unwrap() > 0);
    assert!(v["stats"].get("wall_ms").is_none());
}

#[test]
fn output_is_deterministic() {
    let cases: [&[&str]; 5] = [
        &["--json", "check", "a(x).([x=b]c!c.0 + [x!=b]d!d.0)", "a(x).tau.[x=b]c!c.0 + a(x).tau.[x!=b]d!d.0", "--kind", "weak-late"],
        &["--json", "relate", "tau.a!b.0", "a!b.0"],
        &["transitions", "(^z)(a!z.0 | a(x).x!c.0) + !b(y).0", "--system", "early", "--inputs", "c,d"],
        &["norm", "(^x)(a!b.0 | x!x.0 + 0) | 0"],
        &["--json", "laws", "--count", "2", "--size", "4", "--seed", "9"],
    ];
    for args in cases {
        let first = picalc(args);
        for _ in 0..3 {
            assert_eq!(picalc(args), first, "{args:?}");
        }
    }
}

#[test]
fn timing_is_opt_in() {
    let (_, out, _) = picalc(&["--timing", "check", "0", "0"]);
    assert!(out.contains("wall time"), "{out}");
    let (_, out, _) = picalc(&["--json", "--timing", "check", "0", "0"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["stats"]["wall_ms"].is_number());
}

#[test]
fn laws_pass_and_count_zero_is_trivial() {
    let (code, out, _) = picalc(&["laws", "--count", "3", "--size", "4"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(picalc(&["laws", "--count", "0"]).0, 0);
}

#[test]
fn broken_replication_fails_the_unfold_law() {
    let (code, out, _) = picalc_with(&InertBang, &["laws", "--count", "10", "--size", "4"]);
    assert_eq!(code, 1, "{out}");
    assert!(out.lines().any(|l| l.starts_with("FAIL unfold")), "{out}");
    assert_eq!(picalc_with(&InertBang, &["laws", "--count", "0"]).0, 0);
}

#[test]
fn weak_transitions_list_mid_points() {
    let (code, out, _) = picalc(&["transitions", "a(x).tau.x!x.0", "--system", "weak-late", "--inputs", "c"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "a(x)@tau.x!x.0\nc:a(x)@tau.x!x.0 -> tau.c!c.0\nc:a(x)@tau.x!x.0 -> c!c.0\n"
    );
}

#[test]
fn help_goes_to_stdout() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    assert_eq!(run(["picalc", "--help"], &mut out, &mut err), 0);
    assert!(String::from_utf8(out).unwrap().contains("transitions"));
}
