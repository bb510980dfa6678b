//! Post-hoc checks of solved surfaces.

mod criteria;
mod slope;
mod superharmonic;

use std::fmt;

use crate::numfmt::g17;

pub use criteria::{ordering_check, stability_check, uniqueness_criterion_check, uniqueness_margin};
pub use slope::{
    boundary_slope_check, estimate_boundary_slope, neville_at_zero, BoundarySlope, SlopeCheckConfig,
    SlopeLevel,
};
pub use superharmonic::{level_set_curvatures, superharmonicity_check, SuperharmonicityConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The evidence neither confirms nor refutes the claim.
    Inconclusive,
    /// A hypothesis of the claim does not hold for these inputs.
    NotApplicable,
}

impl CheckStatus {
    pub fn label(self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Inconclusive => "inconclusive",
            CheckStatus::NotApplicable => "not_applicable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Node(usize),
    Boundary(usize),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Node(i) => write!(f, "node:{i}"),
            Location::Boundary(i) => write!(f, "boundary:{i}"),
        }
    }
}

/// Outcome of one check. A negative margin marks a violation.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub status: CheckStatus,
    pub worst_margin: f64,
    pub location: Option<Location>,
    pub tolerances: Vec<(String, f64)>,
    pub detail: String,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }

    pub fn csv_header() -> &'static str {
        "check,status,margin,location,tolerances,detail"
    }

    /// One CSV row; the detail column is quoted.
    pub fn csv_row(&self) -> String {
        let tol = self
            .tolerances
            .iter()
            .map(|(k, v)| format!("{k}={}", g17(*v)))
            .collect::<Vec<_>>()
            .join(";");
        format!(
            "{},{},{},{},{},\"{}\"",
            self.name,
            self.status.label(),
            g17(self.worst_margin),
            self.location.map(|l| l.to_string()).unwrap_or_default(),
            tol,
            self.detail.replace('"', "'")
        )
    }
}

/// Sorts reports by name so concurrent checks merge deterministically.
pub fn merge_reports(mut reports: Vec<CheckReport>) -> Vec<CheckReport> {
    reports.sort_by(|a, b| a.name.cmp(&b.name));
    reports
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(name: &str) -> CheckReport {
        CheckReport {
            name: name.into(),
            status: CheckStatus::Fail,
            worst_margin: -0.25,
            location: Some(Location::Boundary(3)),
            tolerances: vec![("tol".into(), 1e-8), ("c".into(), 0.1)],
            detail: "said \"no\"".into(),
        }
    }

    #[test]
    fn merge_sorts_by_name() {
        let merged = merge_reports(vec![report("b"), report("a"), report("c")]);
        let names: Vec<&str> = merged.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(names, ["a", "b", "c"]);
    }

    #[test]
    fn csv_row_layout() {
        assert_eq!(
            report("x").csv_row(),
            "x,fail,-2.5000000000000000e-1,boundary:3,tol=1.0000000000000000e-8;c=1.0000000000000001e-1,\"said 'no'\""
        );
    }
}
