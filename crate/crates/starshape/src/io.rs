//! Text serialization of samples, boundaries, estimates, and reports.
//!
//! CSV formats:
//! - points: header `x1,...,xp`, one point per row;
//! - boundaries: header `u1,...,up,radius`, one node per row;
//! - estimates: boundary CSV preceded by `# key=value` metadata lines.
//!
//! Values are written with 17 significant digits; readers skip blank
//! lines and `#` comments and report parse failures with their location.
//! JSON mirrors the same content with full round-trip precision.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::StarBoundary;
use crate::metrics::HausdorffReport;
use crate::shape::{Convention, ShapeEstimate};

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serializes raw points to CSV with header `x1,...,xp`.
pub fn points_to_csv(points: &[Vec<f64>]) -> Result<String> {
    let dim = points
        .first()
        .map(|p| p.len())
        .ok_or_else(|| Error::parameter("point list is empty".to_string()))?;
    let mut out = String::new();
    out.push_str(&header("x", dim, false));
    for p in points {
        let row: Vec<String> = p.iter().map(|&v| fmt17(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct PointsJson {
    dimension: usize,
    points: Vec<Vec<f64>>,
}

/// Serializes raw points to JSON `{dimension, points}`.
pub fn points_to_json(points: &[Vec<f64>]) -> Result<String> {
    let dim = points
        .first()
        .map(|p| p.len())
        .ok_or_else(|| Error::parameter("point list is empty".to_string()))?;
    let doc = PointsJson {
        dimension: dim,
        points: points.to_vec(),
    };
    serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::numerical(format!("json serialization failed: {e}")))
}

fn header(prefix: &str, dim: usize, radius: bool) -> String {
    let mut cols: Vec<String> = (1..=dim).map(|k| format!("{prefix}{k}")).collect();
    if radius {
        cols.push("radius".to_string());
    }
    let mut s = cols.join(",");
    s.push('\n');
    s
}

/// Parses a CSV of numeric rows. Skips blank lines, `#` comments, and a
/// single header line of column names. `label` names the source in error
/// locations (typically the file path).
pub fn read_points_csv(text: &str, label: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    let mut dim: Option<usize> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        // A header of column names: first non-comment line that fails to
        // parse as numbers.
        let parsed: std::result::Result<Vec<f64>, _> =
            fields.iter().map(|f| f.trim().parse::<f64>()).collect();
        match parsed {
            Ok(values) => {
                if let Some(d) = dim {
                    if values.len() != d {
                        return Err(Error::Parse {
                            location: format!("{label}:{}", lineno + 1),
                            message: format!("expected {d} columns, found {}", values.len()),
                        });
                    }
                } else {
                    dim = Some(values.len());
                }
                rows.push(values);
            }
            Err(e) => {
                if rows.is_empty() && dim.is_none() {
                    // Header line; remember the column count it implies.
                    dim = Some(fields.len());
                } else {
                    return Err(Error::Parse {
                        location: format!("{label}:{}", lineno + 1),
                        message: format!("invalid number: {e}"),
                    });
                }
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            location: label.to_string(),
            message: "no data rows found".to_string(),
        });
    }
    Ok(rows)
}

/// Parses points from JSON `{dimension, points}`.
pub fn read_points_json(text: &str, label: &str) -> Result<Vec<Vec<f64>>> {
    let doc: PointsJson = serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("{label}:{}", e.line()),
        message: e.to_string(),
    })?;
    if doc.points.iter().any(|p| p.len() != doc.dimension) {
        return Err(Error::Parse {
            location: label.to_string(),
            message: "a point's length does not match the declared dimension".to_string(),
        });
    }
    Ok(doc.points)
}

/// Reads a points file, dispatching on the `.json` / `.csv` extension
/// (anything other than `.json` is treated as CSV).
pub fn read_points_file(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)?;
    let label = path.display().to_string();
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
    {
        read_points_json(&text, &label)
    } else {
        read_points_csv(&text, &label)
    }
}

/// Serializes a boundary to CSV with header `u1,...,up,radius`.
pub fn boundary_to_csv(boundary: &StarBoundary) -> String {
    let dim = boundary.dimension();
    let mut out = header("u", dim, true);
    for k in 0..boundary.len() {
        let mut row: Vec<String> = boundary.direction(k).iter().map(|&v| fmt17(v)).collect();
        row.push(fmt17(boundary.radii()[k]));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize, Deserialize)]
struct BoundaryJson {
    dimension: usize,
    directions: Vec<Vec<f64>>,
    radii: Vec<f64>,
}

/// Serializes a boundary to JSON `{dimension, directions, radii}`.
pub fn boundary_to_json(boundary: &StarBoundary) -> String {
    let doc = BoundaryJson {
        dimension: boundary.dimension(),
        directions: (0..boundary.len())
            .map(|k| boundary.direction(k).to_vec())
            .collect(),
        radii: boundary.radii().to_vec(),
    };
    serde_json::to_string_pretty(&doc).expect("boundary serialization cannot fail")
}

/// Parses a boundary from its CSV form.
pub fn read_boundary_csv(text: &str, label: &str) -> Result<StarBoundary> {
    let rows = read_points_csv(text, label)?;
    let width = rows[0].len();
    if width < 3 {
        return Err(Error::Parse {
            location: label.to_string(),
            message: format!("boundary rows need at least 3 columns, found {width}"),
        });
    }
    let dim = width - 1;
    let mut directions = Vec::with_capacity(rows.len() * dim);
    let mut radii = Vec::with_capacity(rows.len());
    for row in &rows {
        directions.extend_from_slice(&row[..dim]);
        radii.push(row[dim]);
    }
    StarBoundary::new(dim, directions, radii)
}

fn convention_label(c: Convention) -> &'static str {
    match c {
        Convention::Normalized => "normalized",
        Convention::KnownC0 => "known-c0",
        Convention::UnitVolumeRescaled => "unit-volume-rescaled",
    }
}

/// Serializes a shape estimate: metadata comment lines followed by the
/// boundary CSV.
pub fn estimate_to_csv(estimate: &ShapeEstimate) -> String {
    let mut out = String::new();
    out.push_str(&format!("# c0_used={}\n", fmt17(estimate.c0_used)));
    out.push_str(&format!(
        "# convention={}\n",
        convention_label(estimate.convention)
    ));
    out.push_str(&format!("# kernel={}\n", estimate.kernel_label));
    out.push_str(&format!("# eta={}\n", fmt17(estimate.eta)));
    out.push_str(&format!("# n={}\n", estimate.sample_size));
    out.push_str(&boundary_to_csv(&estimate.boundary));
    out
}

#[derive(Serialize)]
struct EstimateMetadataJson<'a> {
    c0_used: f64,
    convention: &'static str,
    kernel: &'a str,
    eta: f64,
    n: usize,
}

#[derive(Serialize)]
struct EstimateJson<'a> {
    dimension: usize,
    directions: Vec<Vec<f64>>,
    radii: &'a [f64],
    metadata: EstimateMetadataJson<'a>,
}

/// Serializes a shape estimate to JSON: the boundary plus a metadata block.
pub fn estimate_to_json(estimate: &ShapeEstimate) -> String {
    let b = &estimate.boundary;
    let doc = EstimateJson {
        dimension: b.dimension(),
        directions: (0..b.len()).map(|k| b.direction(k).to_vec()).collect(),
        radii: b.radii(),
        metadata: EstimateMetadataJson {
            c0_used: estimate.c0_used,
            convention: convention_label(estimate.convention),
            kernel: &estimate.kernel_label,
            eta: estimate.eta,
            n: estimate.sample_size,
        },
    };
    serde_json::to_string_pretty(&doc).expect("estimate serialization cannot fail")
}

/// Serializes a Hausdorff report (distance plus witnesses) to JSON.
pub fn report_to_json(report: &HausdorffReport) -> String {
    serde_json::to_string_pretty(report).expect("report serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{gauge_triangle, make_sphere_grid, true_boundary};

    #[test]
    fn points_roundtrip_csv_and_json() {
        let pts = vec![vec![1.5, -2.25], vec![0.1, 1e-17], vec![3.0, 4.0]];
        let csv = points_to_csv(&pts).unwrap();
        assert!(csv.starts_with("x1,x2\n"));
        let back = read_points_csv(&csv, "mem").unwrap();
        assert_eq!(back, pts, "17 significant digits round-trip f64 exactly");

        let json = points_to_json(&pts).unwrap();
        let back = read_points_json(&json, "mem").unwrap();
        assert_eq!(back, pts);
    }

    #[test]
    fn csv_reader_reports_locations() {
        let err = read_points_csv("x1,x2\n1.0,2.0\n1.0,oops\n", "data.csv").unwrap_err();
        match err {
            Error::Parse { location, .. } => assert_eq!(location, "data.csv:3"),
            other => panic!("unexpected error {other:?}"),
        }
        let err = read_points_csv("x1,x2\n1.0,2.0\n1.0\n", "data.csv").unwrap_err();
        match err {
            Error::Parse { location, message } => {
                assert_eq!(location, "data.csv:3");
                assert!(message.contains("columns"));
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(read_points_csv("x1,x2\n", "e").is_err());
        // Comments and blank lines are fine.
        let ok = read_points_csv("# provenance\n\nx1,x2\n1,2\n", "c").unwrap();
        assert_eq!(ok, vec![vec![1.0, 2.0]]);
    }

    #[test]
    fn boundary_roundtrip_and_estimate_metadata() {
        let tri = gauge_triangle();
        let grid = make_sphere_grid(2, 64).unwrap();
        let b = true_boundary(&tri, &grid).unwrap();
        let csv = boundary_to_csv(&b);
        assert!(csv.starts_with("u1,u2,radius\n"));
        let back = read_boundary_csv(&csv, "mem").unwrap();
        assert_eq!(back.radii(), b.radii());
        assert_eq!(back.directions_flat(), b.directions_flat());

        let json = boundary_to_json(&b);
        assert!(json.contains("\"dimension\": 2"));

        let est = ShapeEstimate {
            boundary: b,
            c0_used: 0.75,
            convention: Convention::KnownC0,
            kernel_label: "vonmises".to_string(),
            eta: 0.2,
            sample_size: 1000,
        };
        let csv = estimate_to_csv(&est);
        assert!(csv.contains("# convention=known-c0\n"));
        assert!(csv.contains("# kernel=vonmises\n"));
        assert!(csv.contains("# n=1000\n"));
        // Metadata comments do not break the boundary reader.
        let back = read_boundary_csv(&csv, "mem").unwrap();
        assert_eq!(back.len(), 64);
        let json = estimate_to_json(&est);
        assert!(json.contains("\"convention\": \"known-c0\""));
    }

    #[test]
    fn hausdorff_report_json_carries_witnesses() {
        let a = StarBoundary::new(2, vec![1.0, 0.0], vec![1.0]).unwrap();
        let b = StarBoundary::new(2, vec![0.0, 1.0], vec![2.0]).unwrap();
        let report = crate::metrics::hausdorff_boundaries(&a, &b).unwrap();
        let json = report_to_json(&report);
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert!(parsed["distance"].as_f64().unwrap() > 0.0);
        assert_eq!(parsed["witness_a_to_b"]["from"], serde_json::json!([1.0, 0.0]));
        assert_eq!(parsed["witness_b_to_a"]["from"], serde_json::json!([0.0, 2.0]));
        assert!(parsed["witness_a_to_b"]["gap"].is_f64());
        assert_eq!(parsed["grid_resolution"], 1);
    }
}
