//! Plain-text renderings of the JSON outputs.

use std::fmt::Write;

use serde_json::{json, Value};

use mub6_core::musearch::ScanRow;
use mub6_core::refutation::LemmaReport;
use mub6_core::{LemmaForm, C64};

fn c(z: C64) -> String {
    format!("{:+.12}{:+.12}i", z.re, z.im)
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn lemma_report(r: &LemmaReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "M6(a), t = {}, a = {}", r.t, c(r.a));
    let _ = writeln!(
        out,
        "transform: column 2 times conj(a); rows 3,4,5,6,1,2; columns 3-6 rephased to dephase row 1"
    );
    for ch in &r.checks {
        let _ = writeln!(out, "{}  {:<48} {:.3e}", pass(ch.passed), ch.name, ch.value);
    }
    let _ = writeln!(out, "(y, x) = ({:.12}, {:.12})", r.y, r.x);
    let _ = writeln!(
        out,
        "column-2 tail x sqrt6 = ({}, {}, {})",
        c(r.tail[0]),
        c(r.tail[1]),
        c(r.tail[2])
    );
    let _ = writeln!(out, "s = {}   conj(a) = {}", c(r.s), c(r.s_expected));
    let moduli: Vec<String> = r
        .third_col_moduli
        .iter()
        .map(|m| format!("{:.12}", m * 6f64.sqrt()))
        .collect();
    let _ = writeln!(out, "third column moduli x sqrt6 = [{}]", moduli.join(", "));
    let _ = writeln!(out, "verdict: {}", r.verdict);
    out
}

pub fn lemma_form(lf: &LemmaForm) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(y, x) = ({}, {}){}", lf.y, lf.x, if lf.rank_one { "  [rank one]" } else { "" });
    match lf.s {
        Some(s) => {
            let _ = writeln!(out, "s = {}", c(s));
        }
        None => {
            let _ = writeln!(out, "s = none");
        }
    }
    let one = |v: &[usize]| v.iter().map(|k| (k + 1).to_string()).collect::<Vec<_>>().join(",");
    let _ = writeln!(out, "source columns {}; source rows {}", one(&lf.source_cols), one(&lf.source_rows));
    let _ = writeln!(out, "row_perm {}; col_perm {}", one(&lf.record.row_perm), one(&lf.record.col_perm));
    let phases = |p: &[C64]| p.iter().map(|z| c(*z)).collect::<Vec<_>>().join(", ");
    let _ = writeln!(out, "row_phases [{}]", phases(&lf.record.row_phases));
    let _ = writeln!(out, "col_phases [{}]", phases(&lf.record.col_phases));
    out
}

pub fn check(v: &Value) -> String {
    let mut out = String::new();
    let label = v["label"].as_str().unwrap_or("(unlabelled)");
    let _ = writeln!(
        out,
        "{}  {label} is complex Hadamard (residual {:.3e})",
        pass(v["is_hadamard"] == json!(true)),
        v["hadamard_residual"].as_f64().unwrap_or(f64::NAN)
    );
    if let Some(o) = v["against"].as_object() {
        let _ = writeln!(
            out,
            "{}  {} is complex Hadamard",
            pass(o["is_hadamard"] == json!(true)),
            o["label"].as_str().unwrap_or("(unlabelled)")
        );
        let _ = writeln!(
            out,
            "{}  pair is mutually unbiased (residual {:.3e})",
            pass(o["mu_pair"] == json!(true)),
            o["overlap_residual"].as_f64().unwrap_or(f64::NAN)
        );
    }
    out
}

pub fn scan_json(rows: &[ScanRow], timing: bool) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| {
                let (valid, counts, error) = match &r.counts {
                    Ok(cn) => (
                        true,
                        json!({
                            "n_mu_vectors": cn.n_mu_vectors,
                            "n_bases": cn.n_bases,
                            "n_triples": cn.n_triples,
                            "max_residual": cn.max_residual(),
                        }),
                        Value::Null,
                    ),
                    Err(e) => (false, Value::Null, json!(e)),
                };
                json!({
                    "t": r.t,
                    "a": [r.a[0], r.a[1]],
                    "valid": valid,
                    "counts": counts,
                    "error": error,
                    "starts": r.starts,
                    "seed": r.seed,
                    "wall_time_s": if timing { json!(r.wall_time) } else { Value::Null },
                })
            })
            .collect(),
    )
}
