//! Polytope JSON files: `{"dim": d, "vertices": [["p/q" | integer, ...], ...]}`.

use crate::error::CliError;
use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;
use solidsum_core::rational::{parse_rational, Rational, RationalVector};
use solidsum_core::{Error, Polytope};
use std::fmt;
use std::path::Path;

struct Coordinate(Rational);

impl<'de> Deserialize<'de> for Coordinate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct CoordinateVisitor;

        impl Visitor<'_> for CoordinateVisitor {
            type Value = Coordinate;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a rational string \"p/q\"")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Coordinate, E> {
                Ok(Coordinate(Rational::from_integer(v.into())))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Coordinate, E> {
                Ok(Coordinate(Rational::from_integer(v.into())))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Coordinate, E> {
                Err(E::custom(format!("floating-point coordinate {v}; write it as a string \"p/q\" or \"{v}\"")))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Coordinate, E> {
                parse_rational(v).map(Coordinate).map_err(|_| E::custom(format!("invalid rational `{v}`")))
            }
        }

        deserializer.deserialize_any(CoordinateVisitor)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolytopeFile {
    dim: usize,
    vertices: Vec<Vec<Coordinate>>,
}

/// Line of the `k`-th vertex array, for diagnostics.
fn vertex_line(text: &str, k: usize) -> Option<usize> {
    let start = text.find("\"vertices\"")?;
    let mut depth = 0usize;
    let mut seen = 0usize;
    let mut in_string = false;
    let mut line = text[..start].matches('\n').count() + 1;
    for c in text[start..].chars() {
        match c {
            '\n' => line += 1,
            '"' => in_string = !in_string,
            '[' if !in_string => {
                depth += 1;
                if depth == 2 {
                    if seen == k {
                        return Some(line);
                    }
                    seen += 1;
                }
            }
            ']' if !in_string => {
                if depth <= 1 {
                    return None;
                }
                depth -= 1;
            }
            _ => {}
        }
    }
    None
}

pub fn parse_polytope(text: &str) -> Result<Polytope, CliError> {
    let file: PolytopeFile = serde_json::from_str(text).map_err(|e| CliError::Input(e.to_string()))?;
    if file.dim == 0 {
        return Err(CliError::Input("field `dim`: must be at least 1".into()));
    }
    if file.vertices.is_empty() {
        return Err(CliError::Input("field `vertices`: no vertices given".into()));
    }
    let mut points = Vec::with_capacity(file.vertices.len());
    for (k, v) in file.vertices.into_iter().enumerate() {
        if v.len() != file.dim {
            let at = vertex_line(text, k).map(|l| format!(" at line {l}")).unwrap_or_default();
            return Err(CliError::Input(format!(
                "field `vertices[{k}]`{at}: expected {} coordinates, found {}",
                file.dim,
                v.len()
            )));
        }
        points.push(RationalVector::new(v.into_iter().map(|c| c.0).collect()));
    }
    Polytope::new(points).map_err(|e| match e {
        Error::NotFullDimensional { .. } => CliError::Input(format!("field `vertices`: {e}")),
        other => other.into(),
    })
}

pub fn load_polytope(path: &Path) -> Result<Polytope, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_polytope(&text).map_err(|e| match e {
        CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}
