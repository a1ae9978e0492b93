//! Pretty JSON with every float written to 17 significant digits, so a
//! report round-trips bit for bit.

use std::io;

use serde::Serialize;
use serde_value::Value;
use serde_json::ser::{Formatter, PrettyFormatter};

struct ExactFloats<'a> {
    pretty: PrettyFormatter<'a>,
}

impl Formatter for ExactFloats<'_> {
    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{:.16e}", value as f64)
    }

    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.pretty.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.pretty.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_object_value(writer)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum JsonError {
    #[error(transparent)]
    Serialize(#[from] serde_json::Error),
    #[error("{0}")]
    Walk(String),
    #[error("non-finite value in field '{0}'")]
    NonFinite(String),
}

/// Dotted path of the first non-finite float in `v`.
fn find_non_finite(v: &Value, path: &str) -> Option<String> {
    let here = || if path.is_empty() { "<root>".to_string() } else { path.to_string() };
    match v {
        Value::F64(x) if !x.is_finite() => Some(here()),
        Value::F32(x) if !x.is_finite() => Some(here()),
        Value::Option(Some(inner)) | Value::Newtype(inner) => find_non_finite(inner, path),
        Value::Seq(items) => items
            .iter()
            .enumerate()
            .find_map(|(i, x)| find_non_finite(x, &format!("{path}[{i}]"))),
        Value::Map(entries) => entries.iter().find_map(|(k, x)| {
            let key = match k {
                Value::String(s) => s.clone(),
                other => format!("{other:?}"),
            };
            let p = if path.is_empty() { key } else { format!("{path}.{key}") };
            find_non_finite(x, &p)
        }),
        _ => None,
    }
}

/// Serializes `value`; fails if any float is NaN or infinite, naming the
/// field that holds it.
pub fn to_string<T: Serialize>(value: &T) -> Result<String, JsonError> {
    let tree = serde_value::to_value(value).map_err(|e| JsonError::Walk(e.to_string()))?;
    if let Some(path) = find_non_finite(&tree, "") {
        return Err(JsonError::NonFinite(path));
    }
    let mut out = Vec::new();
    let fmt = ExactFloats {
        pretty: PrettyFormatter::new(),
    };
    value.serialize(&mut serde_json::Serializer::with_formatter(&mut out, fmt))?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}
