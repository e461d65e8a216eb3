//! Cloud file ingestion and canonical serialization.
//!
//! Three input formats: CSV (one point per row), XYZ (count line, comment
//! line, coordinate rows with optional leading atom labels) and JSON-set
//! (a map from cloud names to coordinate arrays). Canonical output prints
//! floats with 17 significant digits so equal invariants serialize to
//! byte-identical text and parsing is lossless.

use crate::error::{Error, Result};
use crate::geometry::{DistanceMatrix, PointCloud};
use crate::invariants::{CentredDist, Column, Invariant, RelativeDist, WeightedDist};
use crate::moments::MomentVector;
use std::fmt::Write as _;
use std::path::Path;

/// Supported cloud file formats.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CloudFormat {
    Csv,
    Xyz,
    JsonSet,
}

impl CloudFormat {
    /// Detects the format from a file extension.
    pub fn from_path(path: &Path) -> Result<Self> {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
            .as_deref()
        {
            Some("csv") => Ok(CloudFormat::Csv),
            Some("xyz") => Ok(CloudFormat::Xyz),
            Some("json") => Ok(CloudFormat::JsonSet),
            other => Err(Error::Parse {
                line: 0,
                msg: format!(
                    "cannot infer a cloud format from extension {:?}; expected csv, xyz or json",
                    other.unwrap_or("<none>")
                ),
            }),
        }
    }
}

/// A named list of clouds read from one file; all share the dimension `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct CloudFile {
    pub format: CloudFormat,
    pub clouds: Vec<(String, PointCloud)>,
}

impl CloudFile {
    pub fn dim(&self) -> usize {
        self.clouds[0].1.dim()
    }
}

/// Reads and parses a cloud file.
pub fn parse_cloud_file(path: &Path, format: CloudFormat) -> Result<CloudFile> {
    let content = std::fs::read_to_string(path)?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("cloud")
        .to_string();
    let clouds = parse_cloud_str(&content, format, &stem)?;
    Ok(CloudFile { format, clouds })
}

/// Parses cloud file content; `default_name` names formats that carry none.
pub fn parse_cloud_str(
    content: &str,
    format: CloudFormat,
    default_name: &str,
) -> Result<Vec<(String, PointCloud)>> {
    let clouds = match format {
        CloudFormat::Csv => parse_csv(content, default_name)?,
        CloudFormat::Xyz => parse_xyz(content, default_name)?,
        CloudFormat::JsonSet => parse_json_set(content)?,
    };
    if clouds.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "file contains no clouds".into(),
        });
    }
    let n = clouds[0].1.dim();
    for (name, c) in &clouds {
        if c.dim() != n {
            return Err(Error::Parse {
                line: 0,
                msg: format!(
                    "cloud {name:?} has dimension {}, but the file started with {n}",
                    c.dim()
                ),
            });
        }
    }
    let mut names: Vec<&str> = clouds.iter().map(|(n, _)| n.as_str()).collect();
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Parse {
            line: 0,
            msg: "duplicate cloud names".into(),
        });
    }
    Ok(clouds)
}

fn parse_number(field: &str, line: usize) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| Error::Parse {
        line,
        msg: format!("non-numeric field {field:?}"),
    })
}

fn parse_csv(content: &str, name: &str) -> Result<Vec<(String, PointCloud)>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut dim = None;
    for (idx, raw) in content.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| parse_number(f, lineno))
            .collect::<Result<_>>()?;
        match dim {
            None => dim = Some(fields.len()),
            Some(d) if d != fields.len() => {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("ragged row: {} columns, expected {d}", fields.len()),
                })
            }
            _ => {}
        }
        rows.push(fields);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "empty CSV file".into(),
        });
    }
    let cloud = PointCloud::new(dim.unwrap(), &rows).map_err(|e| Error::Parse {
        line: 0,
        msg: e.to_string(),
    })?;
    Ok(vec![(name.to_string(), cloud)])
}

fn parse_xyz(content: &str, default_name: &str) -> Result<Vec<(String, PointCloud)>> {
    let lines: Vec<&str> = content.lines().collect();
    let mut clouds = Vec::new();
    let mut i = 0;
    let mut frame = 0;
    while i < lines.len() {
        if lines[i].trim().is_empty() {
            i += 1;
            continue;
        }
        let count: usize = lines[i].trim().parse().map_err(|_| Error::Parse {
            line: i + 1,
            msg: format!("expected a point count, got {:?}", lines[i].trim()),
        })?;
        if count == 0 {
            return Err(Error::Parse {
                line: i + 1,
                msg: "a cloud must contain at least one point".into(),
            });
        }
        let comment = lines.get(i + 1).map(|l| l.trim()).unwrap_or("");
        let name = if comment.is_empty() {
            if frame == 0 {
                default_name.to_string()
            } else {
                format!("{default_name}_{frame}")
            }
        } else {
            comment.to_string()
        };
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(count);
        let mut dim = None;
        for r in 0..count {
            let lineno = i + 3 + r;
            let raw = lines.get(i + 2 + r).ok_or_else(|| Error::Parse {
                line: lines.len(),
                msg: format!("file ends before point {} of {count}", r + 1),
            })?;
            let tokens: Vec<&str> = raw.split_whitespace().collect();
            if tokens.is_empty() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "blank line inside a coordinate block".into(),
                });
            }
            // an optional first token is an atom label; drop it when it is
            // not numeric
            let coords_tokens = if tokens[0].parse::<f64>().is_ok() {
                &tokens[..]
            } else {
                &tokens[1..]
            };
            let coords: Vec<f64> = coords_tokens
                .iter()
                .map(|t| parse_number(t, lineno))
                .collect::<Result<_>>()?;
            match dim {
                None => dim = Some(coords.len()),
                Some(d) if d != coords.len() => {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("ragged row: {} coordinates, expected {d}", coords.len()),
                    })
                }
                _ => {}
            }
            rows.push(coords);
        }
        let cloud = PointCloud::new(dim.unwrap(), &rows).map_err(|e| Error::Parse {
            line: i + 1,
            msg: e.to_string(),
        })?;
        clouds.push((name, cloud));
        i += 2 + count;
        frame += 1;
    }
    Ok(clouds)
}

fn parse_json_set(content: &str) -> Result<Vec<(String, PointCloud)>> {
    let value: serde_json::Value = serde_json::from_str(content).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    let map = value.as_object().ok_or_else(|| Error::Parse {
        line: 0,
        msg: "JSON-set must be an object mapping names to point arrays".into(),
    })?;
    let mut clouds = Vec::new();
    for (name, points_val) in map {
        let arr = points_val.as_array().ok_or_else(|| Error::Parse {
            line: 0,
            msg: format!("cloud {name:?} is not an array of points"),
        })?;
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(arr.len());
        for (i, p) in arr.iter().enumerate() {
            let coords = p
                .as_array()
                .and_then(|c| c.iter().map(|x| x.as_f64()).collect::<Option<Vec<f64>>>())
                .ok_or_else(|| Error::Parse {
                    line: 0,
                    msg: format!("cloud {name:?}, point {i}: expected an array of numbers"),
                })?;
            rows.push(coords);
        }
        if rows.is_empty() {
            return Err(Error::Parse {
                line: 0,
                msg: format!("cloud {name:?} is empty"),
            });
        }
        let cloud = PointCloud::new(rows[0].len(), &rows).map_err(|e| Error::Parse {
            line: 0,
            msg: format!("cloud {name:?}: {e}"),
        })?;
        clouds.push((name.clone(), cloud));
    }
    Ok(clouds)
}

/// Canonical float form: 17 significant digits, lossless to re-parse.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0e0".to_string();
    }
    format!("{x:.16e}")
}

fn push_float_array(out: &mut String, xs: &[f64]) {
    out.push('[');
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&fmt_f64(*x));
    }
    out.push(']');
}

fn push_entry(out: &mut String, basis: &DistanceMatrix, cols: &[Column], count: u64) {
    let _ = write!(out, "{{\"count\":{count},\"basis\":");
    push_float_array(out, basis.upper());
    out.push_str(",\"columns\":[");
    for (i, c) in cols.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push('[');
        for d in &c.dists {
            out.push_str(&fmt_f64(*d));
            out.push(',');
        }
        let _ = write!(out, "{},{}", c.sign, fmt_f64(c.norm_strength));
        out.push(']');
    }
    out.push_str("]}");
}

fn dist_to_json<T, F>(kind: &str, m: usize, n: usize, dist: &WeightedDist<T>, parts: F) -> String
where
    T: Invariant,
    F: Fn(&T) -> (&DistanceMatrix, &[Column]),
{
    let mut out = String::new();
    let _ = write!(
        out,
        "{{\"invariant\":\"{kind}\",\"m\":{m},\"n\":{n},\"total\":{},\"entries\":[",
        dist.total()
    );
    for (i, (e, count)) in dist.entries().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let (basis, cols) = parts(e);
        push_entry(&mut out, basis, cols, *count);
    }
    out.push_str("]}");
    out
}

/// Canonical JSON for an OSD.
pub fn osd_to_json(dist: &WeightedDist<RelativeDist>) -> String {
    let first = &dist.entries()[0].0;
    dist_to_json("osd", first.m(), first.n(), dist, |e| {
        (e.basis(), e.columns())
    })
}

/// Canonical JSON for an SCD.
pub fn scd_to_json(dist: &WeightedDist<CentredDist>) -> String {
    let first = &dist.entries()[0].0;
    dist_to_json("scd", first.m(), first.n(), dist, |e| {
        (e.basis(), e.columns())
    })
}

struct RawEntry {
    basis: DistanceMatrix,
    cols: Vec<Column>,
    count: u64,
}

fn entries_from_json(content: &str, kind: &str) -> Result<(Vec<RawEntry>, u64)> {
    let value: serde_json::Value = serde_json::from_str(content).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    let obj = value.as_object().ok_or_else(|| Error::Parse {
        line: 0,
        msg: "invariant JSON must be an object".into(),
    })?;
    let found = obj.get("invariant").and_then(|v| v.as_str()).unwrap_or("");
    if found != kind {
        return Err(Error::Parse {
            line: 0,
            msg: format!("expected invariant kind {kind:?}, found {found:?}"),
        });
    }
    let total = obj
        .get("total")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::Parse {
            line: 0,
            msg: "missing total".into(),
        })?;
    let entries_val = obj
        .get("entries")
        .and_then(|v| v.as_array())
        .ok_or_else(|| Error::Parse {
            line: 0,
            msg: "missing entries".into(),
        })?;
    let mut entries = Vec::with_capacity(entries_val.len());
    for e in entries_val {
        let count = e.get("count").and_then(|v| v.as_u64()).unwrap_or(0);
        let basis_vals: Vec<f64> = e
            .get("basis")
            .and_then(|v| v.as_array())
            .and_then(|a| a.iter().map(|x| x.as_f64()).collect())
            .ok_or_else(|| Error::Parse {
                line: 0,
                msg: "entry missing basis".into(),
            })?;
        // basis length h(h-1)/2 determines h
        let mut h = 1usize;
        while h * (h - 1) / 2 < basis_vals.len() {
            h += 1;
        }
        let basis = DistanceMatrix::new(h, basis_vals).map_err(|err| Error::Parse {
            line: 0,
            msg: err.to_string(),
        })?;
        let cols_val = e
            .get("columns")
            .and_then(|v| v.as_array())
            .ok_or_else(|| Error::Parse {
                line: 0,
                msg: "entry missing columns".into(),
            })?;
        let mut cols = Vec::with_capacity(cols_val.len());
        for c in cols_val {
            let xs: Vec<f64> = c
                .as_array()
                .and_then(|a| a.iter().map(|x| x.as_f64()).collect())
                .ok_or_else(|| Error::Parse {
                    line: 0,
                    msg: "column must be an array of numbers".into(),
                })?;
            if xs.len() != h + 2 {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("column of length {}, expected {}", xs.len(), h + 2),
                });
            }
            let sign = xs[h];
            if sign != -1.0 && sign != 0.0 && sign != 1.0 {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("sign {sign} not in -1, 0, 1"),
                });
            }
            cols.push(Column {
                dists: xs[..h].to_vec(),
                sign: sign as i8,
                norm_strength: xs[h + 1],
            });
        }
        entries.push(RawEntry { basis, cols, count });
    }
    Ok((entries, total))
}

/// Parses canonical OSD JSON.
pub fn osd_from_json(content: &str) -> Result<WeightedDist<RelativeDist>> {
    let (raw, total) = entries_from_json(content, "osd")?;
    let entries = raw
        .into_iter()
        .map(|e| Ok((RelativeDist::from_parts(e.basis, e.cols)?, e.count)))
        .collect::<Result<Vec<_>>>()?;
    WeightedDist::from_weighted_parts(entries, total)
}

/// Parses canonical SCD JSON.
pub fn scd_from_json(content: &str) -> Result<WeightedDist<CentredDist>> {
    let (raw, total) = entries_from_json(content, "scd")?;
    let entries = raw
        .into_iter()
        .map(|e| Ok((CentredDist::from_parts(e.basis, e.cols)?, e.count)))
        .collect::<Result<Vec<_>>>()?;
    WeightedDist::from_weighted_parts(entries, total)
}

/// Canonical JSON-set form of named clouds (sorted names, canonical floats).
pub fn clouds_to_json(clouds: &[(String, PointCloud)]) -> String {
    let mut sorted: Vec<&(String, PointCloud)> = clouds.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out = String::from("{");
    for (i, (name, cloud)) in sorted.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{}:[", serde_json::to_string(name).unwrap());
        for (j, p) in cloud.points().enumerate() {
            if j > 0 {
                out.push(',');
            }
            push_float_array(&mut out, p);
        }
        out.push(']');
    }
    out.push('}');
    out
}

/// Flat CSV row for a moment vector: `kind,l,m,n,coords..`.
pub fn moment_csv_row(v: &MomentVector) -> String {
    let mut out = format!("{},{},{},{}", v.kind.as_str(), v.order, v.m, v.n);
    for c in &v.coords {
        out.push(',');
        out.push_str(&fmt_f64(*c));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Tolerance;
    use crate::invariants::{build_osd, build_scd, Anchor};
    use crate::moments::odm;

    fn cloud_t() -> PointCloud {
        PointCloud::new(
            2,
            &[
                vec![1.0, 1.0],
                vec![-1.0, 1.0],
                vec![-2.0, 0.0],
                vec![2.0, 0.0],
            ],
        )
        .unwrap()
    }

    #[test]
    fn csv_parses_cloud_t() {
        let clouds = parse_cloud_str("1,1\n-1,1\n-2,0\n2,0\n", CloudFormat::Csv, "T").unwrap();
        assert_eq!(clouds.len(), 1);
        assert_eq!(clouds[0].0, "T");
        assert_eq!(clouds[0].1, cloud_t());
    }

    #[test]
    fn csv_rejects_bad_input() {
        assert!(matches!(
            parse_cloud_str("", CloudFormat::Csv, "x"),
            Err(Error::Parse { .. })
        ));
        let err = parse_cloud_str("1,2\n3\n", CloudFormat::Csv, "x").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
        let err = parse_cloud_str("1,abc\n", CloudFormat::Csv, "x").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn xyz_parses_labels_and_frames() {
        let content = "3\nwater-ish\nO 0.0 0.0\nH 1.0 0.0\nH 0.0 1.0\n2\n\n0.5 0.5\n1.5 0.5\n";
        let clouds = parse_cloud_str(content, CloudFormat::Xyz, "traj").unwrap();
        assert_eq!(clouds.len(), 2);
        assert_eq!(clouds[0].0, "water-ish");
        assert_eq!(clouds[0].1.len(), 3);
        assert_eq!(clouds[1].0, "traj_1");
        assert_eq!(clouds[1].1.point(1), &[1.5, 0.5]);
    }

    #[test]
    fn json_set_parses_named_clouds() {
        let content = r#"{"T":[[1,1],[-1,1],[-2,0],[2,0]],"K":[[0,1],[-1,0],[0,-1],[3,0]]}"#;
        let clouds = parse_cloud_str(content, CloudFormat::JsonSet, "x").unwrap();
        assert_eq!(clouds.len(), 2);
        let t = clouds.iter().find(|(n, _)| n == "T").unwrap();
        assert_eq!(t.1, cloud_t());
        // mixed dimensions are rejected
        let bad = r#"{"a":[[1,2]],"b":[[1,2,3]]}"#;
        assert!(parse_cloud_str(bad, CloudFormat::JsonSet, "x").is_err());
    }

    #[test]
    fn float_format_round_trips() {
        for x in [
            0.0,
            -0.0,
            1.0,
            -1.5,
            2f64.sqrt(),
            1.0 / 3.0,
            f64::MIN_POSITIVE,
            1e300,
            -2.2250738585072014e-308,
        ] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), if x == 0.0 { 0 } else { x.to_bits() }, "{s}");
        }
    }

    #[test]
    fn invariant_json_round_trips_bit_exactly() {
        let tol = Tolerance::default();
        let osd = build_osd(&cloud_t(), tol).unwrap();
        let json = osd_to_json(&osd);
        let back = osd_from_json(&json).unwrap();
        assert_eq!(back, osd);
        assert_eq!(osd_to_json(&back), json);

        let scd = build_scd(&cloud_t(), Anchor::Centroid, tol).unwrap();
        let json = scd_to_json(&scd);
        let back = scd_from_json(&json).unwrap();
        assert_eq!(back, scd);
        assert_eq!(scd_to_json(&back), json);

        // kind mixups are rejected
        assert!(scd_from_json(&osd_to_json(&osd)).is_err());
    }

    #[test]
    fn cloud_json_round_trips_bit_exactly() {
        let clouds = vec![
            ("T".to_string(), cloud_t()),
            (
                "line".to_string(),
                PointCloud::new(2, &[vec![0.0, 0.0], vec![1.0 / 3.0, 2f64.sqrt()]]).unwrap(),
            ),
        ];
        let json = clouds_to_json(&clouds);
        let mut back = parse_cloud_str(&json, CloudFormat::JsonSet, "x").unwrap();
        back.sort_by(|a, b| a.0.cmp(&b.0));
        let mut expect = clouds.clone();
        expect.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(back, expect);
        assert_eq!(clouds_to_json(&back), json);
    }

    #[test]
    fn moment_csv_shape() {
        let v = odm(&cloud_t(), 1, Tolerance::default()).unwrap();
        let row = moment_csv_row(&v);
        assert!(row.starts_with("odm,1,4,2,"));
        assert_eq!(row.split(',').count(), 4 + v.coords.len());
    }
}
