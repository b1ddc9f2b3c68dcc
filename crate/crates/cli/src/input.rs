//! Reading matrices, ladders and chart points from JSON files.
//!
//! The canonical forms are the library's serde forms. For hand-written
//! inputs a bare nested array is also accepted, with each scalar either a
//! number or an `[re, im]` pair.

use std::fs;
use std::io::Read;

use gz_core::{ChartPoint, ComplexMatrix, Ladder};
use num_complex::Complex64;
use serde_json::Value;

pub fn read_source(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| format!("reading stdin: {e}"))?;
        Ok(buf)
    } else {
        fs::read_to_string(path).map_err(|e| format!("reading {path}: {e}"))
    }
}

fn parse_value(text: &str) -> Result<Value, String> {
    serde_json::from_str(text).map_err(|e| format!("invalid JSON: {e}"))
}

fn scalar(v: &Value) -> Result<Complex64, String> {
    match v {
        Value::Number(x) => x
            .as_f64()
            .map(|re| Complex64::new(re, 0.0))
            .ok_or_else(|| format!("not a finite number: {x}")),
        Value::Array(pair) if pair.len() == 2 => {
            let re = pair[0].as_f64().ok_or("complex pair must hold numbers")?;
            let im = pair[1].as_f64().ok_or("complex pair must hold numbers")?;
            Ok(Complex64::new(re, im))
        }
        other => Err(format!("expected a number or [re, im], got {other}")),
    }
}

fn rows(v: &Value) -> Result<Vec<Vec<Complex64>>, String> {
    v.as_array()
        .ok_or("expected an array of rows")?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or("each row must be an array")?
                .iter()
                .map(scalar)
                .collect()
        })
        .collect()
}

pub fn matrix(text: &str) -> Result<ComplexMatrix, String> {
    let v = parse_value(text)?;
    if v.is_object() {
        return serde_json::from_value(v).map_err(|e| format!("invalid matrix: {e}"));
    }
    ComplexMatrix::from_rows(&rows(&v)?).map_err(|e| e.to_string())
}

pub fn ladder(text: &str) -> Result<Ladder, String> {
    let v = parse_value(text)?;
    if v.is_object() {
        return serde_json::from_value(v).map_err(|e| format!("invalid ladder: {e}"));
    }
    Ladder::new(rows(&v)?).map_err(|e| e.to_string())
}

pub fn chart_point(text: &str) -> Result<ChartPoint, String> {
    serde_json::from_str(text).map_err(|e| format!("invalid chart point: {e}"))
}

/// `"re,im"` or a bare real number.
pub fn complex_flag(s: &str) -> Result<Complex64, String> {
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("expected \"re,im\", got {s:?}"))
    };
    let z = match s.split_once(',') {
        Some((re, im)) => Complex64::new(parse(re)?, parse(im)?),
        None => Complex64::new(parse(s)?, 0.0),
    };
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(format!("time must be finite, got {s:?}"))
    }
}
