//! File formats: CSV data and draws, covariance files, fixed-precision JSON.

use std::fs;
use std::path::Path;

use serde_json::{Number, Value};
use wentropy_core::GaussianDist;

/// 17 significant digits; non-finite values become `NaN`/`inf`/`-inf`.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(fmt_num(x).parse::<Number>().expect("formatted float is valid JSON"))
}

/// Rewrites every non-integer number to 17 significant digits.
pub fn fix_precision(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => n.as_f64().map_or(Value::Null, num),
        Value::Array(a) => Value::Array(a.into_iter().map(fix_precision).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, fix_precision(v))).collect()),
        other => other,
    }
}

pub fn to_json_string(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&fix_precision(v)).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_cell(s: &str, row: usize, col: &str) -> Result<f64, String> {
    s.trim().parse::<f64>().map_err(|_| format!("row {row}, column {col}: '{s}' is not a number"))
}

/// A CSV file with named numeric columns; `#` lines are comments.
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn read_table(path: &Path) -> Result<Table, String> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| format!("{}: bad header: {e}", path.display()))?
        .iter()
        .map(String::from)
        .collect();
    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let row = k + 1;
        let rec = rec.map_err(|e| format!("{}: row {row}: {e}", path.display()))?;
        if rec.len() != headers.len() {
            return Err(format!("{}: row {row} has {} fields, expected {}", path.display(), rec.len(), headers.len()));
        }
        let vals = rec
            .iter()
            .zip(&headers)
            .map(|(s, h)| parse_cell(s, row, h))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| format!("{}: {e}", path.display()))?;
        rows.push(vals);
    }
    if rows.is_empty() {
        return Err(format!("{}: no data rows", path.display()));
    }
    Ok(Table { headers, rows })
}

/// Indices of the columns named `{prefix}1`, `{prefix}2`, … in order.
pub fn numbered_columns(t: &Table, prefix: &str, path: &Path) -> Result<Vec<usize>, String> {
    let mut idx = Vec::new();
    for k in 1.. {
        match t.headers.iter().position(|h| *h == format!("{prefix}{k}")) {
            Some(i) => idx.push(i),
            None => break,
        }
    }
    if idx.is_empty() {
        return Err(format!("{}: no column named {prefix}1", path.display()));
    }
    let stray = t.headers.iter().filter(|h| h.starts_with(prefix)).count();
    if stray != idx.len() {
        return Err(format!("{}: {prefix}* columns must be numbered 1..n without gaps", path.display()));
    }
    Ok(idx)
}

/// Observations `y_1..y_d` and the optional `weight` column.
pub fn read_data(path: &Path) -> Result<(Vec<Vec<f64>>, Option<Vec<f64>>), String> {
    let t = read_table(path)?;
    let ycols = numbered_columns(&t, "y_", path)?;
    let wcol = t.headers.iter().position(|h| h == "weight");
    let obs = t.rows.iter().map(|r| ycols.iter().map(|&i| r[i]).collect()).collect();
    let w = wcol.map(|i| t.rows.iter().map(|r| r[i]).collect());
    Ok((obs, w))
}

pub fn read_draws(path: &Path) -> Result<Vec<Vec<f64>>, String> {
    let t = read_table(path)?;
    let cols = numbered_columns(&t, "theta_", path)?;
    Ok(t.rows.iter().map(|r| cols.iter().map(|&i| r[i]).collect()).collect())
}

pub fn write_rows(path: &Path, comment: &str, headers: &[String], rows: &[Vec<f64>]) -> Result<(), String> {
    let mut out = String::new();
    out.push_str(comment);
    out.push('\n');
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| format!("cannot format {}: {e}", path.display());
    w.write_record(headers).map_err(err)?;
    for r in rows {
        w.write_record(r.iter().map(|&x| fmt_num(x))).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| format!("cannot format {}: {e}", path.display()))?;
    out.push_str(&String::from_utf8(bytes).expect("CSV of ASCII numbers is UTF-8"));
    fs::write(path, out).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

/// Covariance from JSON (`{"mean", "cov"}` or a bare nested array) or from
/// whitespace/comma separated rows.
pub fn read_cov(path: &Path) -> Result<GaussianDist, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let trimmed = text.trim_start();
    let bad = |e: String| format!("{}: {e}", path.display());
    if trimmed.starts_with('{') {
        return serde_json::from_str::<GaussianDist>(&text).map_err(|e| bad(e.to_string()));
    }
    let rows: Vec<Vec<f64>> = if trimmed.starts_with('[') {
        serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?
    } else {
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .map(|(i, l)| {
                l.split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<f64>().map_err(|_| bad(format!("line {}: '{s}' is not a number", i + 1))))
                    .collect()
            })
            .collect::<Result<_, _>>()?
    };
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(bad(format!("covariance must be square, got {n} rows of lengths {:?}", rows.iter().map(Vec::len).collect::<Vec<_>>())));
    }
    let flat: Vec<f64> = rows.concat();
    GaussianDist::zero_mean(n, &flat).map_err(|e| bad(e.to_string()))
}

pub fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("{what}: '{t}' is not a number")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_num(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_num(-2.0), "-2.0000000000000000e0");
        assert_eq!(fmt_num(f64::NAN), "NaN");
        let v = fix_precision(serde_json::json!({"a": 0.5, "n": 3, "xs": [1.5]}));
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"a":5.0000000000000000e-1,"n":3,"xs":[1.5000000000000000e+0]}"#);
    }

    #[test]
    fn list_parsing() {
        assert_eq!(parse_list("1, 2.5,-3", "x").unwrap(), vec![1.0, 2.5, -3.0]);
        assert!(parse_list("1,a", "x").is_err());
    }
}
