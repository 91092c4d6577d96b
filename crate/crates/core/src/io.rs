//! JSON matrix files and JSON renderings of reports.
//!
//! Matrix files are `{"label": "...", "matrix": [[[re, im], ...], ...]}`
//! with every number written as `{:.16e}` (17 significant digits), so a
//! write/read round trip is bit-exact.

use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use serde_json::{json, Value};

use crate::analysis::{AnalysisReport, ReportKind};
use crate::musearch::MUVector;
use crate::refutation::{LemmaReport, ThirdColumnWitness};
use crate::{CMat6, Error, LemmaForm, Mat6, Result, TransformRecord};

type C = Complex<f64>;

fn raw(x: f64) -> Box<RawValue> {
    RawValue::from_string(format!("{x:.16e}")).expect("finite floats format as JSON numbers")
}

#[derive(Serialize)]
struct MatrixOut<'a> {
    label: &'a str,
    matrix: Vec<Vec<[Box<RawValue>; 2]>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixIn {
    #[serde(default)]
    label: Option<String>,
    matrix: Vec<Vec<[f64; 2]>>,
}

/// Serializes `h` in the matrix file format; a missing label is written as `""`.
pub fn matrix_to_json(h: &CMat6) -> String {
    let out = MatrixOut {
        label: h.label.as_deref().unwrap_or(""),
        matrix: h
            .entries()
            .iter()
            .map(|row| row.iter().map(|z| [raw(z.re), raw(z.im)]).collect())
            .collect(),
    };
    serde_json::to_string(&out).expect("matrix serialization cannot fail")
}

/// Parses the matrix file format. An empty label reads back as `None`.
pub fn matrix_from_json(text: &str) -> Result<CMat6> {
    let m: MatrixIn = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if m.matrix.len() != 6 || m.matrix.iter().any(|r| r.len() != 6) {
        return Err(Error::Parse("\"matrix\" must be 6 rows of 6 [re, im] pairs".into()));
    }
    let entries = std::array::from_fn(|i| std::array::from_fn(|j| C::new(m.matrix[i][j][0], m.matrix[i][j][1])));
    let label = m.label.filter(|l| !l.is_empty());
    Mat6::try_new(entries, label).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_matrix(path: &Path) -> Result<CMat6> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    matrix_from_json(&text)
}

pub fn write_matrix(path: &Path, h: &CMat6) -> std::io::Result<()> {
    std::fs::write(path, matrix_to_json(h) + "\n")
}

pub fn complex_value(z: C) -> Value {
    json!([z.re, z.im])
}

pub fn matrix_value(h: &CMat6) -> Value {
    Value::Array(
        h.entries()
            .iter()
            .map(|row| Value::Array(row.iter().map(|z| complex_value(*z)).collect()))
            .collect(),
    )
}

/// Permutations are written 1-based.
pub fn record_value(r: &TransformRecord) -> Value {
    let one_based = |p: &[usize; 6]| p.iter().map(|k| k + 1).collect::<Vec<_>>();
    json!({
        "row_perm": one_based(&r.row_perm),
        "col_perm": one_based(&r.col_perm),
        "row_phases": r.row_phases.iter().map(|z| complex_value(*z)).collect::<Vec<_>>(),
        "col_phases": r.col_phases.iter().map(|z| complex_value(*z)).collect::<Vec<_>>(),
    })
}

pub fn lemma_form_value(lf: &LemmaForm) -> Value {
    json!({
        "y": lf.y,
        "x": lf.x,
        "s": lf.s.map(complex_value),
        "rank_one": lf.rank_one,
        "source_cols": lf.source_cols.iter().map(|k| k + 1).collect::<Vec<_>>(),
        "source_rows": lf.source_rows.iter().map(|k| k + 1).collect::<Vec<_>>(),
        "record": record_value(&lf.record),
        "matrix": matrix_value(&lf.matrix),
    })
}

pub fn lemma_report_value(r: &LemmaReport) -> Value {
    json!({
        "t": r.t,
        "a": complex_value(r.a),
        "is_hadamard_ok": r.is_hadamard_ok,
        "hadamard_residual": r.hadamard_residual,
        "lemma_form_ok": r.lemma_form_ok,
        "y": r.y,
        "x": r.x,
        "tail": r.tail.iter().map(|z| complex_value(*z)).collect::<Vec<_>>(),
        "tail_ok": r.tail_ok,
        "s": complex_value(r.s),
        "s_expected": complex_value(r.s_expected),
        "s_error": r.s_error,
        "third_col_moduli": r.third_col_moduli,
        "min_third_col_modulus": r.min_third_col_modulus,
        "replay_residual": r.replay_residual,
        "checks": r.checks,
        "record": record_value(&r.record),
        "matrix": matrix_value(&r.matrix),
        "verdict": r.verdict,
    })
}

pub fn witness_value(w: &ThirdColumnWitness) -> Value {
    json!({
        "s": complex_value(w.s),
        "v": w.v.iter().map(|z| complex_value(*z)).collect::<Vec<_>>(),
        "residuals": w.residuals,
        "start_index": w.start_index,
    })
}

pub fn mu_vector_value(v: &MUVector) -> Value {
    json!({
        "phases": v.phases,
        "vector": v.vector.iter().map(|z| complex_value(*z)).collect::<Vec<_>>(),
        "residual": v.residual,
    })
}

/// The full report, or only the fields belonging to one section.
pub fn analysis_value(r: &AnalysisReport, kind: ReportKind) -> Value {
    let full = serde_json::to_value(r).expect("report serialization cannot fail");
    let keep: &[&str] = match kind {
        ReportKind::Full => return full,
        ReportKind::Real => &["real_entry_count", "exceeds_bound", "real_3x2_raw", "real_3x2_rephased"],
        ReportKind::H2 => &["h2_submatrix_count", "h2_reducible_partition", "unitary_3x3"],
        ReportKind::Product => &["product_triple_found", "product_triple"],
    };
    let mut out = serde_json::Map::new();
    for key in ["label", "is_hadamard"].iter().chain(keep) {
        out.insert((*key).to_string(), full[*key].clone());
    }
    Value::Object(out)
}
