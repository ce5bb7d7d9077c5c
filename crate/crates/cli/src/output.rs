//! Rendering of reports and constant tables.

use anyhow::Result;
use cubecar::verify::{Report, RieszRow};
use serde_json::{json, Value};

use crate::config::Format;

pub const CSV_HEADER: [&str; 7] = ["theorem_id", "n", "space", "instances", "worst_ratio", "bound_constant", "passed"];

fn param_text(v: Option<&Value>) -> String {
    match v {
        Some(Value::String(s)) => s.clone(),
        Some(v) => v.to_string(),
        None => String::new(),
    }
}

/// The dimension of a report: `n`, or `n_max` for growth tables.
fn report_n(r: &Report) -> String {
    param_text(r.params.get("n").or_else(|| r.params.get("n_max")))
}

pub fn reports(reports: &[Report], format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut out = String::new();
            for r in reports {
                out.push_str(&serde_json::to_string(r)?);
                out.push('\n');
            }
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_HEADER)?;
            for r in reports {
                w.write_record([
                    r.theorem_id.clone(),
                    report_n(r),
                    param_text(r.params.get("space")),
                    r.instances.to_string(),
                    r.worst_ratio.to_string(),
                    r.bound_constant.to_string(),
                    r.passed.to_string(),
                ])?;
            }
            Ok(String::from_utf8(w.into_inner()?)?)
        }
        Format::Text => Ok(text_table(reports)),
    }
}

fn text_table(reports: &[Report]) -> String {
    let mut out = format!(
        "{:<18} {:<13} {:>4} {:<8} {:>9} {:>14} {:>14}\n",
        "theorem", "verdict", "n", "space", "instances", "worst_ratio", "bound"
    );
    for r in reports {
        let verdict = serde_json::to_value(r.verdict).ok().map(|v| param_text(Some(&v))).unwrap_or_default();
        out.push_str(&format!(
            "{:<18} {:<13} {:>4} {:<8} {:>9} {:>14.8} {:>14.8}\n",
            r.theorem_id,
            verdict,
            report_n(r),
            param_text(r.params.get("space")),
            r.instances,
            r.worst_ratio,
            r.bound_constant
        ));
        if let Some(w) = &r.witness {
            out.push_str(&format!("    witness: {} ({} terms)\n", w.label, w.terms.len()));
        }
        for note in &r.notes {
            out.push_str(&format!("    note: {note}\n"));
        }
    }
    out
}

/// One `(constant, parameter, value)` row per requested exponent.
pub fn constants(rows: &[(&str, f64, f64)], format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut out = String::new();
            for (name, param, value) in rows {
                let v = json!({ "constant": name, "parameter": param, "value": value });
                out.push_str(&serde_json::to_string(&v)?);
                out.push('\n');
            }
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["constant", "parameter", "value"])?;
            for (name, param, value) in rows {
                w.write_record([name.to_string(), param.to_string(), value.to_string()])?;
            }
            Ok(String::from_utf8(w.into_inner()?)?)
        }
        Format::Text => {
            let mut out = format!("{:<10} {:>10} {:>20}\n", "constant", "parameter", "value");
            for (name, param, value) in rows {
                out.push_str(&format!("{name:<10} {param:>10} {value:>20.15}\n"));
            }
            Ok(out)
        }
    }
}

/// Growth table followed by the fitted slope and the verdict.
pub fn riesz_text(rows: &[RieszRow], report: &Report) -> String {
    let mut out = format!("{:>3} {:>16} {:>16} {:>16}\n", "n", "growth", "laplacian_ratio", "gradient_ratio");
    for r in rows {
        out.push_str(&format!("{:>3} {:>16.10} {:>16.10} {:>16.10}\n", r.n, r.growth, r.laplacian_ratio, r.gradient_ratio));
    }
    let get = |k: &str| report.details.get(k).copied().unwrap_or(f64::NAN);
    out.push_str(&format!("slope {:.6} (expected {:.6})\n", get("slope"), get("expected_slope")));
    out.push_str(&text_table(std::slice::from_ref(report)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use cubecar::verify::{Request, Verifier};

    fn sample() -> Report {
        let mut r = Request::new("poincare");
        r.n = 3;
        r.trials = 5;
        Verifier::default().run(&r).unwrap()
    }

    #[test]
    fn csv_has_fixed_header_and_one_row_per_report() {
        let r = sample();
        let s = reports(&[r.clone(), r], Format::Csv).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("poincare,3,lp:2,"));
    }

    #[test]
    fn json_lines_reparse() {
        let r = sample();
        let s = reports(std::slice::from_ref(&r), Format::Json).unwrap();
        let back: Report = serde_json::from_str(s.trim_end()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn text_mentions_every_report() {
        let s = reports(&[sample()], Format::Text).unwrap();
        assert!(s.lines().nth(1).unwrap().starts_with("poincare"));
    }
}
