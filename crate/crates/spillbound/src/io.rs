//! Text interchange: trial CSV parsing and writing, population JSON, and
//! 17-significant-digit float formatting so reports are reproducible to
//! the bit across runs and platforms.

use std::collections::HashMap;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::population::Population;
use crate::randomize::{ObservedCluster, ObservedTrial};

/// Shortest-guaranteed-round-trip decimal form: 17 significant digits,
/// scientific notation. Parsing this back yields the identical f64.
pub fn fmt_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serialize a JSON value with floats in 17-significant-digit form and
/// object keys in stable (alphabetical) order. serde_json's default map is
/// ordered, so the stability comes for free; the custom writer exists to
/// control float formatting.
pub fn to_json_17(v: &Value) -> String {
    let mut out = String::new();
    write_json(v, 0, &mut out);
    out
}

fn write_json(v: &Value, indent: usize, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                // finite by construction: serde_json numbers exclude NaN/inf
                out.push_str(&fmt_sig17(n.as_f64().expect("numeric json value")));
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("string serializes"));
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                push_indent(indent + 1, out);
                write_json(item, indent + 1, out);
            }
            out.push('\n');
            push_indent(indent, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                push_indent(indent + 1, out);
                out.push_str(&serde_json::to_string(k).expect("key serializes"));
                out.push_str(": ");
                write_json(item, indent + 1, out);
            }
            out.push('\n');
            push_indent(indent, out);
            out.push('}');
        }
    }
}

fn push_indent(level: usize, out: &mut String) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

/// Column-name remapping for trial CSV files whose headers differ from the
/// canonical `cluster_id,z,d,y`.
#[derive(Debug, Clone)]
pub struct ColumnMap {
    pub cluster_id: String,
    pub z: String,
    pub d: String,
    pub y: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            cluster_id: "cluster_id".into(),
            z: "z".into(),
            d: "d".into(),
            y: "y".into(),
        }
    }
}

/// Parse `cluster_id=site,y=outcome` style overrides (unlisted columns
/// keep their canonical names).
pub fn parse_column_map(spec: &str) -> Result<ColumnMap> {
    let mut map = ColumnMap::default();
    for part in spec.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("column mapping `{part}` is not key=value")))?;
        let value = value.trim().to_string();
        match key.trim() {
            "cluster_id" => map.cluster_id = value,
            "z" => map.z = value,
            "d" => map.d = value,
            "y" => map.y = value,
            other => {
                return Err(Error::invalid(format!(
                    "unknown column `{other}` in mapping (expected cluster_id, z, d, y)"
                )))
            }
        }
    }
    Ok(map)
}

/// A parsed trial plus everything the analysis layer needs to qualify it.
#[derive(Debug, Clone)]
pub struct ParsedTrial {
    pub trial: ObservedTrial,
    /// cluster identifiers in first-appearance order
    pub cluster_ids: Vec<String>,
    /// 1-based file line numbers of rows with a receipt in a control cluster
    pub one_sided_violations: Vec<usize>,
}

fn parse_err(path_hint: &str, row: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path_hint.to_string(),
        row,
        message: message.into(),
    }
}

/// Parse a trial from CSV text. Expected columns (after `map` renaming):
/// cluster id (any token without commas), z and d in {0,1}, y a finite
/// number. Unknown extra columns are ignored. Rows sharing a cluster id
/// form one cluster, in first-appearance order; z must be constant within
/// a cluster, and both arms must be present. Line numbers in errors and
/// violation lists count from 1 including the header.
pub fn parse_trial_csv(text: &str, map: &ColumnMap, path_hint: &str) -> Result<ParsedTrial> {
    let text = text.trim_start_matches('\u{feff}');
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(path_hint, 1, "empty file"))?;
    let names: Vec<&str> = header.split(',').map(|s| s.trim()).collect();
    let column = |want: &str| -> Result<usize> {
        names.iter().position(|n| *n == want).ok_or_else(|| {
            parse_err(
                path_hint,
                1,
                format!("missing column `{want}` in header `{header}`"),
            )
        })
    };
    let ci = column(&map.cluster_id)?;
    let zi = column(&map.z)?;
    let di = column(&map.d)?;
    let yi = column(&map.y)?;

    let mut order: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut zs: Vec<bool> = Vec::new();
    let mut clusters: Vec<ObservedCluster> = Vec::new();
    let mut violations: Vec<usize> = Vec::new();

    for (lineno0, line) in lines {
        let row = lineno0 + 1; // 1-based, header included
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(|s| s.trim()).collect();
        let need = [ci, zi, di, yi].into_iter().max().unwrap();
        if fields.len() <= need {
            return Err(parse_err(
                path_hint,
                row,
                format!("expected at least {} fields, got {}", need + 1, fields.len()),
            ));
        }
        let bit = |i: usize, name: &str| -> Result<bool> {
            match fields[i] {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(parse_err(
                    path_hint,
                    row,
                    format!("column `{name}` must be 0 or 1, got `{other}`"),
                )),
            }
        };
        let z = bit(zi, &map.z)?;
        let d = bit(di, &map.d)?;
        let y: f64 = fields[yi].parse().map_err(|_| {
            parse_err(
                path_hint,
                row,
                format!("column `{}` is not a number: `{}`", map.y, fields[yi]),
            )
        })?;
        if !y.is_finite() {
            return Err(parse_err(path_hint, row, "outcome must be finite"));
        }

        let id = fields[ci].to_string();
        let j = match index.get(&id) {
            Some(&j) => {
                if zs[j] != z {
                    return Err(parse_err(
                        path_hint,
                        row,
                        format!("cluster `{id}` changes assignment mid-file"),
                    ));
                }
                j
            }
            None => {
                let j = order.len();
                index.insert(id.clone(), j);
                order.push(id);
                zs.push(z);
                clusters.push(ObservedCluster {
                    d: Vec::new(),
                    y: Vec::new(),
                });
                j
            }
        };
        if !z && d {
            violations.push(row);
        }
        clusters[j].d.push(d);
        clusters[j].y.push(y);
    }

    if clusters.is_empty() {
        return Err(parse_err(path_hint, 1, "no data rows"));
    }
    let treated = zs.iter().filter(|z| **z).count();
    if treated == 0 || treated == zs.len() {
        return Err(Error::invalid(format!(
            "need both arms observed: {} of {} clusters treated",
            treated,
            zs.len()
        )));
    }

    Ok(ParsedTrial {
        trial: ObservedTrial {
            z: zs,
            clusters,
        },
        cluster_ids: order,
        one_sided_violations: violations,
    })
}

/// Write a trial as canonical CSV. Binary outcomes print as 0/1; anything
/// else uses the 17-digit form. Cluster ids default to 1-based indices.
pub fn write_trial_csv(trial: &ObservedTrial, cluster_ids: Option<&[String]>) -> Result<String> {
    if let Some(ids) = cluster_ids {
        if ids.len() != trial.n_clusters() {
            return Err(Error::invalid("cluster id list does not match trial"));
        }
    }
    let binary = trial.outcomes_binary();
    let mut out = String::from("cluster_id,z,d,y\n");
    for (j, (z, c)) in trial.z.iter().zip(&trial.clusters).enumerate() {
        let id = match cluster_ids {
            Some(ids) => ids[j].clone(),
            None => (j + 1).to_string(),
        };
        for (d, y) in c.d.iter().zip(&c.y) {
            let y_text = if binary {
                if *y == 1.0 { "1".to_string() } else { "0".to_string() }
            } else {
                fmt_sig17(*y)
            };
            out.push_str(&format!(
                "{id},{},{},{y_text}\n",
                u8::from(*z),
                u8::from(*d)
            ));
        }
    }
    Ok(out)
}

/// Deserialize and validate a population from JSON.
pub fn read_population_json(text: &str) -> Result<Population> {
    let pop: Population = serde_json::from_str(text)?;
    pop.validate()?;
    Ok(pop)
}

/// Population as stable JSON.
pub fn population_to_json(pop: &Population) -> Result<String> {
    Ok(to_json_17(&serde_json::to_value(pop)?))
}
