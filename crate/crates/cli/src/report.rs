//! Report envelope, atomic output and the text renderer.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use pdml_core::experiments::REPORT_SCHEMA;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub schema: String,
    pub command: String,
    pub seed: u64,
    pub pass: bool,
    pub result: Value,
}

impl Envelope {
    pub fn new(command: &str, seed: u64, pass: bool, result: impl Serialize) -> Result<Self> {
        Ok(Envelope {
            schema: REPORT_SCHEMA.into(),
            command: command.into(),
            seed,
            pass,
            result: serde_json::to_value(result)?,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Deterministic text summary of an emitted report.
pub fn render(doc: &Value) -> Result<String> {
    let schema = doc.get("schema").and_then(Value::as_str).unwrap_or("<missing>");
    if schema != REPORT_SCHEMA {
        bail!("report schema {schema} is not {REPORT_SCHEMA}");
    }
    let env: Envelope = serde_json::from_value(doc.clone()).context("malformed report envelope")?;
    let mut out = String::new();
    writeln!(out, "command: {}", env.command)?;
    writeln!(out, "seed: {}", env.seed)?;
    writeln!(out, "verdict: {}", if env.pass { "pass" } else { "fail" })?;
    render_result(&env.result, &mut out)?;
    Ok(out)
}

fn render_result(v: &Value, out: &mut String) -> Result<()> {
    match v.get("kind").and_then(Value::as_str) {
        Some("two-speed") => return render_two_speed(v, out),
        Some("frobenius-p-set") => {
            render_fields(v, &["returnSet", "expected", "fitted"], out)?;
            return render_entries(&v["returnSet"], out);
        }
        _ => {}
    }
    if v.get("entries").is_some_and(Value::is_array) {
        render_fields(v, &["entries", "moduli"], out)?;
        return render_entries(v, out);
    }
    render_fields(v, &[], out)
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(xs) if xs.iter().all(|x| !x.is_object() && !x.is_array()) => {
            format!("[{}]", xs.iter().map(scalar).collect::<Vec<_>>().join(", "))
        }
        other => other.to_string(),
    }
}

fn render_fields(v: &Value, skip: &[&str], out: &mut String) -> Result<()> {
    match v {
        Value::Object(map) => {
            if map.is_empty() {
                writeln!(out, "no entries")?;
            }
            for (k, x) in map.iter().filter(|(k, _)| !skip.contains(&k.as_str())) {
                writeln!(out, "{k}: {}", scalar(x))?;
            }
        }
        Value::Array(xs) if xs.is_empty() => writeln!(out, "no entries")?,
        Value::Array(xs) if xs.iter().all(Value::is_object) => {
            for x in xs {
                let fields: Vec<String> =
                    x.as_object().into_iter().flatten().map(|(k, v)| format!("{k}: {}", scalar(v))).collect();
                writeln!(out, "- {}", fields.join(", "))?;
            }
        }
        other => writeln!(out, "{}", scalar(other))?,
    }
    Ok(())
}

/// One row per index: n, verdict, certainty and the bound or certificate.
fn render_entries(v: &Value, out: &mut String) -> Result<()> {
    let entries = v.get("entries").and_then(Value::as_array).map(Vec::as_slice).unwrap_or_default();
    if entries.is_empty() {
        writeln!(out, "no entries")?;
        return Ok(());
    }
    writeln!(out, "{:>8}  verdict", "n")?;
    for e in entries {
        let member = e["member"].as_bool().unwrap_or(false);
        let mut line = format!(
            "{:>8}  {} [{}]",
            scalar(&e["n"]),
            if member { "member" } else { "not member" },
            scalar(&e["certainty"])
        );
        if let Some(b) = e.get("error_bound_log2") {
            write!(line, " error <= 2^{}", scalar(b))?;
        }
        if let Some(q) = e.get("equation").and_then(Value::as_u64) {
            write!(line, " equation {}", q + 1)?;
        }
        if let Some(w) = e.get("witness").and_then(Value::as_str) {
            write!(line, " witness {}", short_witness(w))?;
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Moduli are printed by degree only; the full polynomial stays in the JSON.
fn short_witness(w: &str) -> String {
    match w.strip_prefix("t^").and_then(|r| r.split(|c: char| !c.is_ascii_digit()).next()) {
        Some(d) if !d.is_empty() => format!("modulus of degree {d}"),
        _ => w.to_string(),
    }
}

fn growth_line(label: &str, g: &Value) -> String {
    let mut s = format!("{label}: case ({})", scalar(&g["case"]));
    if let Some(k) = g.get("k").filter(|k| !k.is_null()) {
        write!(s, ", k = {}", scalar(k)).unwrap();
    }
    if let Some(l) = g.get("limitEstimate").filter(|l| !l.is_null()) {
        write!(s, ", limit {}", scalar(l)).unwrap();
    }
    if let Some(c) = g.get("boundConstant").filter(|c| !c.is_null()) {
        write!(s, ", bound constant {}", scalar(c)).unwrap();
    }
    s
}

fn render_two_speed(v: &Value, out: &mut String) -> Result<()> {
    for key in ["p", "window", "equations", "returnIndices", "finiteOnWindow", "case", "lambda1Approx", "degG"] {
        if let Some(x) = v.get(key) {
            writeln!(out, "{key}: {}", scalar(x))?;
        }
    }
    writeln!(out, "{}", growth_line("slow side", &v["slowGrowth"]))?;
    writeln!(out, "{}", growth_line("fast side", &v["fastGrowth"]))?;
    writeln!(out, "ksm upper check: {}", if v["ksm"]["pass"] == true { "pass" } else { "fail" })?;
    writeln!(out, "ample-gap lower check: {}", if v["gap"]["pass"] == true { "pass" } else { "fail" })?;
    writeln!(out, "outcome: {}", scalar(&v["verdict"]))?;
    Ok(())
}
