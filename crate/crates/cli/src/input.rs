//! Reading JSON inputs. Every loader accepts either the bare object or a
//! report produced by this tool that contains it.

use std::path::Path;

use ncreal::error::Error;
use ncreal::expr::{compile, parse};
use ncreal::inner::CoisometryPair;
use ncreal::json::{AnyRealization, PairJson, RealizationJson, TupleJson};
use ncreal::states::Convention;
use ncreal::tol::Tolerances;
use ncreal::tuple::MatrixTuple;
use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::Failure;

pub fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin())
    } else {
        std::fs::read_to_string(path)
    }
    .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        Failure::input(format!("{}: malformed JSON at line {} column {}: {e}", path.display(), e.line(), e.column()))
    })
}

/// Descends through `result` and then `key` when present.
fn unwrap_report<'a>(v: &'a Value, key: &str) -> &'a Value {
    let v = v.get("result").unwrap_or(v);
    v.get(key).unwrap_or(v)
}

fn decode<T: DeserializeOwned>(v: &Value, path: &Path, what: &str) -> Result<T, Failure> {
    T::deserialize(v).map_err(|e| Failure::input(format!("{}: invalid {what}: {e}", path.display())))
}

fn schema(path: &Path, e: Error) -> Failure {
    Failure::input(format!("{}: {e}", path.display()))
}

pub fn load_realization(path: &Path) -> Result<AnyRealization, Failure> {
    let v = read_json(path)?;
    let r: RealizationJson = decode(unwrap_report(&v, "realization"), path, "realization")?;
    r.parse().map_err(|e| schema(path, e))
}

pub fn load_tuple(path: &Path) -> Result<MatrixTuple, Failure> {
    let v = read_json(path)?;
    let inner = v.get("result").unwrap_or(&v);
    // coisometrize reports carry the coisometry as "Z"
    let t: TupleJson = match inner.get("tuple") {
        Some(t) => decode(t, path, "tuple")?,
        None => decode(inner, path, "tuple")?,
    };
    t.parse().map_err(|e| schema(path, e))
}

pub fn load_pair(path: &Path, tol: &Tolerances) -> Result<(CoisometryPair, Convention), Failure> {
    let v = read_json(path)?;
    let p: PairJson = decode(unwrap_report(&v, "pair"), path, "pair")?;
    p.parse(tol).map_err(|e| schema(path, e))
}

/// Smallest alphabet covering the variables used.
pub fn infer_d(text: &str) -> Result<usize, Failure> {
    let ast = parse(text, u8::MAX as usize).map_err(Failure::from)?;
    Ok(ast.max_var().max(1))
}

pub fn compile_expr(text: &str, d: Option<usize>) -> Result<ncreal::realization::FmRealization, Failure> {
    let d = match d {
        Some(d) => d,
        None => infer_d(text)?,
    };
    compile(text, d).map_err(Failure::from)
}
