//! The convergence table artifact.
//!
//! The CSV header is fixed: `n,seed,eta,hausdorff_boundary,hausdorff_body,
//! d_n,runtime_ms`. Wall-clock timings are not reproducible across runs,
//! so the runtime_ms field is left empty in the artifacts (timings go to
//! stderr instead); everything written to disk is byte-identical for a
//! fixed configuration.

use serde::Serialize;
use starshape::pipeline::CellOutcome;

/// One table row.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub seed: u64,
    pub eta: f64,
    pub hausdorff_boundary: f64,
    pub hausdorff_body: f64,
    pub d_n: f64,
    #[serde(skip)]
    pub runtime_ms: Option<u128>,
}

/// The full table, sorted by (n, seed).
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn from_outcomes(outcomes: &[CellOutcome]) -> Self {
        let mut rows: Vec<ConvergenceRow> = outcomes
            .iter()
            .map(|c| ConvergenceRow {
                n: c.n,
                seed: c.seed,
                eta: c.eta,
                hausdorff_boundary: c.hausdorff_boundary,
                hausdorff_body: c.hausdorff_body,
                d_n: c.d_n,
                runtime_ms: Some(c.runtime_ms),
            })
            .collect();
        rows.sort_by_key(|r| (r.n, r.seed));
        ConvergenceTable { rows }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,seed,eta,hausdorff_boundary,hausdorff_body,d_n,runtime_ms\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{:.16e},{:.16e},{:.16e},{:.16e},\n",
                r.n, r.seed, r.eta, r.hausdorff_boundary, r.hausdorff_body, r.d_n
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_pinned_header_and_empty_runtime() {
        let table = ConvergenceTable {
            rows: vec![ConvergenceRow {
                n: 100,
                seed: 7,
                eta: 0.25,
                hausdorff_boundary: 0.5,
                hausdorff_body: 0.4,
                d_n: 0.6,
                runtime_ms: Some(123),
            }],
        };
        let csv = table.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "n,seed,eta,hausdorff_boundary,hausdorff_body,d_n,runtime_ms"
        );
        let row = lines.next().unwrap();
        assert!(row.starts_with("100,7,2.5"));
        assert!(row.ends_with(','), "runtime field must be empty: {row}");
        let json = table.to_json();
        assert!(!json.contains("runtime"), "timings stay out of artifacts");
    }

    #[test]
    fn rows_sort_by_n_then_seed() {
        let mk = |n, seed| ConvergenceRow {
            n,
            seed,
            eta: 0.1,
            hausdorff_boundary: 0.0,
            hausdorff_body: 0.0,
            d_n: 0.0,
            runtime_ms: None,
        };
        let mut t = ConvergenceTable {
            rows: vec![mk(200, 1), mk(100, 2), mk(100, 1)],
        };
        t.rows.sort_by_key(|r| (r.n, r.seed));
        let keys: Vec<(usize, u64)> = t.rows.iter().map(|r| (r.n, r.seed)).collect();
        assert_eq!(keys, vec![(100, 1), (100, 2), (200, 1)]);
    }
}
