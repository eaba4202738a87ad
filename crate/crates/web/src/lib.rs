//! WebAssembly bindings for the browser demo. Every function answers with
//! the same JSON document as `picalc --json`, plus the exit code, or an
//! `error` string when the input was rejected.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn call(args: &[&str]) -> String {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = ["picalc", "--json"].into_iter().chain(args.iter().copied());
    let code = picalc_cli::run(argv, &mut out, &mut err);
    let doc = match serde_json::from_slice::<Value>(&out) {
        Ok(Value::Object(mut m)) => {
            m.insert("exit".into(), code.into());
            Value::Object(m)
        }
        _ => json!({ "exit": code, "error": String::from_utf8_lossy(&err).trim_end() }),
    };
    doc.to_string()
}

/// Transitions of `agent` under `system` (`late`, `early`, `weak-late` or
/// `weak-early`).
#[wasm_bindgen]
pub fn transitions(agent: &str, system: &str) -> String {
    call(&["transitions", agent, "--system", system])
}

/// Decides `left` against `right` for the named equivalence.
#[wasm_bindgen]
pub fn check(left: &str, right: &str, kind: &str) -> String {
    call(&["check", left, right, "--kind", kind])
}

/// Structural normal form of `agent`.
#[wasm_bindgen]
pub fn normalize(agent: &str) -> String {
    call(&["norm", agent])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parsed(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn check_reports_verdict_and_exit() {
        let v = parsed(check("tau.0", "0", "weak-late"));
        assert_eq!(v["verdict"], "equivalent");
        assert_eq!(v["exit"], 0);
        let v = parsed(check("tau.0", "0", "strong-late"));
        assert_eq!(v["exit"], 1);
        assert_eq!(v["witness"]["steps"][0]["action"]["kind"], "tau");
    }

    #[test]
    fn transitions_and_normal_form() {
        let v = parsed(transitions("(^b)a!b.0", "late"));
        assert_eq!(v["result"]["transitions"][0]["text"], "a!(b') -> 0");
        let v = parsed(normalize("0 | a!b.0"));
        assert_eq!(v["result"]["normal_form"], "a!b.0");
    }

    #[test]
    fn errors_are_reported() {
        let v = parsed(normalize("a(x"));
        assert_eq!(v["exit"], 3);
        assert!(v["error"].as_str().unwrap().contains("expected"));
        let v = parsed(check("0", "0", "nonsense"));
        assert_eq!(v["exit"], 3);
    }
}
