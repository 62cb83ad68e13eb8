use std::fmt::Write as _;

use serde::Deserialize;

use crate::construction::tour_length;
use crate::geometry::Point2;
use crate::solver::SolveParams;
use crate::Error;

/// A solved tour together with the parameters that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub instance: String,
    pub seed: u64,
    pub params: SolveParams,
    pub length: f64,
    /// Tour positions in visiting order.
    pub tour: Vec<Point2>,
    /// For each circle of the instance, the index of its tour position.
    pub assignment: Vec<usize>,
}

impl Solution {
    pub fn recomputed_length(&self) -> f64 {
        tour_length(&self.tour)
    }

    /// Whether `length` agrees with the tour within `1e-9` relative.
    pub fn length_consistent(&self) -> bool {
        let actual = self.recomputed_length();
        (self.length - actual).abs() <= 1e-9 * actual.abs().max(1.0)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SolutionFile {
    instance: String,
    seed: u64,
    params: SolveParams,
    length: f64,
    tour: Vec<[f64; 2]>,
    assignment: Vec<usize>,
}

fn json<T: serde::Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

/// JSON text with one tour point per line. Floats use the shortest
/// representation that parses back to the same value.
pub fn write_solution(solution: &Solution) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    writeln!(out, "  \"instance\": {},", json(&solution.instance)).unwrap();
    writeln!(out, "  \"seed\": {},", solution.seed).unwrap();
    writeln!(out, "  \"params\": {},", json(&solution.params)).unwrap();
    writeln!(out, "  \"length\": {},", json(&solution.length)).unwrap();
    out.push_str("  \"tour\": [");
    for (i, p) in solution.tour.iter().enumerate() {
        let sep = if i == 0 { "" } else { "," };
        write!(out, "{sep}\n    [{}, {}]", json(&p.x), json(&p.y)).unwrap();
    }
    out.push_str(if solution.tour.is_empty() { "],\n" } else { "\n  ],\n" });
    out.push_str("  \"assignment\": [");
    for (i, chunk) in solution.assignment.chunks(16).enumerate() {
        let sep = if i == 0 { "" } else { "," };
        let row: Vec<String> = chunk.iter().map(|a| a.to_string()).collect();
        write!(out, "{sep}\n    {}", row.join(", ")).unwrap();
    }
    out.push_str(if solution.assignment.is_empty() { "]\n" } else { "\n  ]\n" });
    out.push_str("}\n");
    out
}

/// Parses a solution file. Errors name the offending field path.
pub fn read_solution(text: &str) -> Result<Solution, Error> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: SolutionFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Solution(format!("{path}: {}", e.into_inner()))
    })?;
    Ok(Solution {
        instance: file.instance,
        seed: file.seed,
        params: file.params,
        length: file.length,
        tour: file.tour.into_iter().map(|[x, y]| Point2::new(x, y)).collect(),
        assignment: file.assignment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> Solution {
        let tour = vec![Point2::new(0.1, 0.2), Point2::new(-3.0, 1e-300), Point2::new(5.5, 2.0)];
        Solution {
            instance: "sample \"quoted\"".into(),
            seed: 42,
            params: SolveParams::default(),
            length: tour_length(&tour),
            tour,
            assignment: vec![0, 2, 1, 1],
        }
    }

    #[test]
    fn round_trip() {
        let s = sample();
        let text = write_solution(&s);
        assert_eq!(read_solution(&text).unwrap(), s);
        assert!(text.lines().any(|l| l.trim() == "[0.1, 0.2],"));
    }

    #[test]
    fn empty_lists_round_trip() {
        let s = Solution { tour: vec![], assignment: vec![], length: 0.0, ..sample() };
        assert_eq!(read_solution(&write_solution(&s)).unwrap(), s);
    }

    #[test]
    fn missing_length_is_an_error() {
        let text = write_solution(&sample());
        let broken: String =
            text.lines().filter(|l| !l.contains("\"length\"")).collect::<Vec<_>>().join("\n");
        let err = read_solution(&broken).unwrap_err().to_string();
        assert!(err.contains("length"), "{err}");
    }

    #[test]
    fn error_names_nested_field() {
        let text = write_solution(&sample()).replace("[0.1, 0.2]", "[0.1, \"y\"]");
        let err = read_solution(&text).unwrap_err().to_string();
        assert!(err.contains("tour[0]"), "{err}");
    }

    #[test]
    fn inconsistent_length_is_detected() {
        let mut s = sample();
        assert!(s.length_consistent());
        s.length *= 1.0 + 1e-6;
        assert!(!s.length_consistent());
    }

    proptest! {
        #[test]
        fn random_solutions_round_trip(
            pts in prop::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 0..40),
            assignment in prop::collection::vec(0usize..1000, 0..60),
            seed in any::<u64>(),
            length in any::<f64>().prop_filter("finite", |v| v.is_finite()),
        ) {
            let s = Solution {
                instance: "p".into(),
                seed,
                params: SolveParams { seed, ..SolveParams::default() },
                length,
                tour: pts.into_iter().map(|(x, y)| Point2::new(x, y)).collect(),
                assignment,
            };
            prop_assert_eq!(read_solution(&write_solution(&s)).unwrap(), s);
        }
    }
}
