//! JSON coefficient files. Every real number is written as a decimal string
//! with 17 significant digits so that reading a file back reproduces the
//! coefficients bit for bit.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde_json::{json, Map, Value};

use super::{GlmError, ImexGlmMethod};

pub(crate) fn fmt_real(x: f64) -> Value {
    Value::String(format!("{x:.16e}"))
}

pub(crate) fn vec_value(v: &DVector<f64>) -> Value {
    Value::Array(v.iter().map(|&x| fmt_real(x)).collect())
}

pub(crate) fn mat_value(m: &DMatrix<f64>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| fmt_real(m[(i, j)])).collect()))
            .collect(),
    )
}

pub(crate) fn field<'a>(obj: &'a Map<String, Value>, name: &str) -> Result<&'a Value, GlmError> {
    obj.get(name).ok_or_else(|| GlmError::Parse {
        field: name.to_string(),
        reason: "missing field".to_string(),
    })
}

pub(crate) fn parse_real(v: &Value, name: &str) -> Result<f64, GlmError> {
    let bad = |reason: String| GlmError::Parse {
        field: name.to_string(),
        reason,
    };
    match v {
        Value::String(s) => s
            .trim()
            .parse::<f64>()
            .map_err(|e| bad(format!("`{s}`: {e}"))),
        Value::Number(n) => n.as_f64().ok_or_else(|| bad(format!("`{n}` not representable"))),
        other => Err(bad(format!("expected a number, found {other}"))),
    }
}

pub(crate) fn parse_usize(obj: &Map<String, Value>, name: &str) -> Result<usize, GlmError> {
    field(obj, name)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| GlmError::Parse {
            field: name.to_string(),
            reason: "expected a non-negative integer".to_string(),
        })
}

pub(crate) fn parse_vec(obj: &Map<String, Value>, name: &str) -> Result<DVector<f64>, GlmError> {
    let arr = field(obj, name)?.as_array().ok_or_else(|| GlmError::Parse {
        field: name.to_string(),
        reason: "expected an array".to_string(),
    })?;
    let vals = arr
        .iter()
        .map(|v| parse_real(v, name))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DVector::from_vec(vals))
}

pub(crate) fn parse_mat(obj: &Map<String, Value>, name: &str) -> Result<DMatrix<f64>, GlmError> {
    let rows = field(obj, name)?.as_array().ok_or_else(|| GlmError::Parse {
        field: name.to_string(),
        reason: "expected an array of rows".to_string(),
    })?;
    let mut data: Vec<Vec<f64>> = Vec::with_capacity(rows.len());
    for row in rows {
        let row = row.as_array().ok_or_else(|| GlmError::Parse {
            field: name.to_string(),
            reason: "expected each row to be an array".to_string(),
        })?;
        data.push(
            row.iter()
                .map(|v| parse_real(v, name))
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    let ncols = data.first().map_or(0, Vec::len);
    if let Some(bad) = data.iter().find(|r| r.len() != ncols) {
        return Err(GlmError::shape(
            name,
            format!("rows of length {ncols}"),
            format!("a row of length {}", bad.len()),
        ));
    }
    Ok(DMatrix::from_fn(data.len(), ncols, |i, j| data[i][j]))
}

fn expect_shape(name: &str, m: &DMatrix<f64>, rows: usize, cols: usize) -> Result<(), GlmError> {
    super::check_shape(name, m, rows, cols)
}

pub fn method_to_json(m: &ImexGlmMethod) -> Value {
    json!({
        "name": m.name(),
        "s": m.stages(),
        "r": m.externals(),
        "p": m.order(),
        "q": m.explicit().stage_order(),
        "c": vec_value(m.c()),
        "A": mat_value(m.explicit().a()),
        "Ahat": mat_value(m.implicit().a()),
        "B": mat_value(m.explicit().b()),
        "Bhat": mat_value(m.implicit().b()),
        "v": vec_value(m.v()),
        "Q": mat_value(m.q()),
        "Qhat": mat_value(m.qhat()),
    })
}

pub fn method_from_json(value: &Value) -> Result<ImexGlmMethod, GlmError> {
    let obj = value.as_object().ok_or_else(|| GlmError::Parse {
        field: "<root>".to_string(),
        reason: "expected a JSON object".to_string(),
    })?;
    let name = field(obj, "name")?
        .as_str()
        .ok_or_else(|| GlmError::Parse {
            field: "name".to_string(),
            reason: "expected a string".to_string(),
        })?
        .to_string();
    let s = parse_usize(obj, "s")?;
    let r = parse_usize(obj, "r")?;
    let p = parse_usize(obj, "p")?;
    let q = parse_usize(obj, "q")?;
    if r != s {
        return Err(GlmError::shape("r", format!("r = s = {s}"), r));
    }
    let c = parse_vec(obj, "c")?;
    if c.len() != s {
        return Err(GlmError::shape("c", s, c.len()));
    }
    let a = parse_mat(obj, "A")?;
    expect_shape("A", &a, s, s)?;
    let ahat = parse_mat(obj, "Ahat")?;
    expect_shape("Ahat", &ahat, s, s)?;
    let b = parse_mat(obj, "B")?;
    expect_shape("B", &b, r, s)?;
    let bhat = parse_mat(obj, "Bhat")?;
    expect_shape("Bhat", &bhat, r, s)?;
    let v = parse_vec(obj, "v")?;
    if v.len() != r {
        return Err(GlmError::shape("v", r, v.len()));
    }
    let qm = parse_mat(obj, "Q")?;
    expect_shape("Q", &qm, r, p + 1)?;
    let qhat = parse_mat(obj, "Qhat")?;
    expect_shape("Qhat", &qhat, r, p + 1)?;
    ImexGlmMethod::dimsim(name, p, q, c, a, ahat, b, bhat, v, qm, qhat)
}

pub fn write_method_file(m: &ImexGlmMethod, path: impl AsRef<Path>) -> Result<(), GlmError> {
    let text = serde_json::to_string_pretty(&method_to_json(m)).expect("json serialization");
    fs::write(path, text + "\n")?;
    Ok(())
}

pub fn read_method_file(path: impl AsRef<Path>) -> Result<ImexGlmMethod, GlmError> {
    let text = fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| GlmError::Parse {
        field: "<root>".to_string(),
        reason: e.to_string(),
    })?;
    method_from_json(&value)
}
