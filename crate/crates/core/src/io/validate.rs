use serde::Serialize;

use super::{Instance, Solution};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// The assignment has no entry for this circle.
    Unassigned { circle: usize },
    /// The assignment points past the end of the tour.
    BadPoint { circle: usize, point: usize },
    /// The assigned point lies outside the disk by `excess`.
    Outside { circle: usize, point: usize, excess: f64 },
    /// The assignment lists more circles than the instance has.
    ExtraAssignments { count: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub epsilon: f64,
    pub violations: Vec<Violation>,
    pub reported_length: f64,
    pub recomputed_length: f64,
    /// Reported and recomputed length differ by more than `1e-9` relative.
    pub length_mismatch: bool,
}

impl ValidationReport {
    /// No circle is violated. A length mismatch is only a warning.
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every circle against its assigned tour point with tolerance
/// `epsilon`, defaulting to `1e-6` times the instance diagonal.
pub fn validate(instance: &Instance, solution: &Solution, epsilon: Option<f64>) -> ValidationReport {
    let eps = epsilon.unwrap_or_else(|| 1e-6 * instance.diagonal());
    let mut violations = Vec::new();
    for (circle, c) in instance.circles.iter().enumerate() {
        let Some(&point) = solution.assignment.get(circle) else {
            violations.push(Violation::Unassigned { circle });
            continue;
        };
        let Some(&q) = solution.tour.get(point) else {
            violations.push(Violation::BadPoint { circle, point });
            continue;
        };
        let excess = q.distance(c.center) - c.radius;
        if excess > eps || !excess.is_finite() {
            violations.push(Violation::Outside { circle, point, excess });
        }
    }
    if solution.assignment.len() > instance.len() {
        violations.push(Violation::ExtraAssignments {
            count: solution.assignment.len() - instance.len(),
        });
    }
    ValidationReport {
        epsilon: eps,
        violations,
        reported_length: solution.length,
        recomputed_length: solution.recomputed_length(),
        length_mismatch: !solution.length_consistent(),
    }
}
