use std::fmt::Write as _;

use crate::geometry::{Circle, Point2};
use crate::spatial_index::{IndexEntry, Rect, SpatialIndex};
use crate::Error;

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub name: String,
    pub circles: Vec<Circle>,
}

impl Instance {
    pub fn new(name: impl Into<String>, circles: Vec<Circle>) -> Self {
        Instance { name: name.into(), circles }
    }

    pub fn len(&self) -> usize {
        self.circles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.circles.is_empty()
    }

    /// Bounding box of all disks, or `None` for an empty instance.
    pub fn bounding_box(&self) -> Option<Rect> {
        bounding_box(&self.circles)
    }

    /// Length of the bounding-box diagonal (0 for an empty instance).
    pub fn diagonal(&self) -> f64 {
        self.bounding_box().map_or(0.0, |b| b.min.distance(b.max))
    }
}

pub fn bounding_box(circles: &[Circle]) -> Option<Rect> {
    let first = circles.first()?;
    let mut bb = Rect::from_circle(first);
    for c in &circles[1..] {
        let r = Rect::from_circle(c);
        bb.min = Point2::new(bb.min.x.min(r.min.x), bb.min.y.min(r.min.y));
        bb.max = Point2::new(bb.max.x.max(r.max.x), bb.max.y.max(r.max.y));
    }
    Some(bb)
}

/// Membership tolerance used inside the solver: `1e-9 * max(1, diagonal)`.
pub fn geometric_epsilon(circles: &[Circle]) -> f64 {
    let diag = bounding_box(circles).map_or(0.0, |b| b.min.distance(b.max));
    1e-9 * diag.max(1.0)
}

/// Splits a text file into numeric rows, skipping blanks and comments.
fn numeric_rows(text: &str) -> impl Iterator<Item = Result<(usize, Vec<f64>), Error>> + '_ {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("//") {
            return None;
        }
        let row: Result<Vec<f64>, Error> = line
            .split_whitespace()
            .map(|tok| match tok.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected a finite number, found `{tok}`"),
                }),
            })
            .collect();
        Some(row.map(|r| (i + 1, r)))
    })
}

/// Parses rows of `x y [z] [r]`. The `z` column is ignored. Rows without a
/// radius get radius 0; `radius_override`, when given, replaces every radius.
pub fn parse_instance(
    name: impl Into<String>,
    text: &str,
    radius_override: Option<f64>,
) -> Result<Instance, Error> {
    let mut circles = Vec::new();
    for row in numeric_rows(text) {
        let (line, row) = row?;
        let radius = match row.len() {
            2 | 3 => 0.0,
            4 => row[3],
            n => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected 2 to 4 columns, found {n}"),
                })
            }
        };
        let radius = radius_override.unwrap_or(radius);
        if radius < 0.0 {
            return Err(Error::Parse { line, message: format!("negative radius {radius}") });
        }
        circles.push(Circle::new(Point2::new(row[0], row[1]), radius));
    }
    if circles.is_empty() {
        return Err(Error::EmptyInstance);
    }
    Ok(Instance { name: name.into(), circles })
}

/// Reads the first two columns of every row as a point.
pub fn parse_points(text: &str) -> Result<Vec<Point2>, Error> {
    let mut out = Vec::new();
    for row in numeric_rows(text) {
        let (line, row) = row?;
        if row.len() < 2 {
            return Err(Error::Parse { line, message: "expected at least 2 columns".into() });
        }
        out.push(Point2::new(row[0], row[1]));
    }
    Ok(out)
}

/// Writes `x y 0 r` rows with round-trip precision.
pub fn write_instance(instance: &Instance) -> String {
    let mut out = String::new();
    writeln!(out, "# {}", instance.name).unwrap();
    for c in &instance.circles {
        writeln!(out, "{} {} 0 {}", c.center.x, c.center.y, c.radius).unwrap();
    }
    out
}

/// Recovers a common radius from circle centres and a tour through them:
/// the largest distance from any centre to its nearest tour point.
pub fn reconstruct_radius(centers: &[Point2], tour: &[Point2]) -> Result<f64, Error> {
    if centers.is_empty() || tour.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let mut index = SpatialIndex::new();
    for (id, &p) in tour.iter().enumerate() {
        index.insert(IndexEntry { rect: Rect::from_point(p), id })?;
    }
    Ok(centers
        .iter()
        .map(|&c| index.knn_rects(c, 1)[0].distance)
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_columns() {
        let inst = parse_instance("t", "0 0 0 1\n4 0 0 1\n", None).unwrap();
        assert_eq!(inst.circles.len(), 2);
        assert!(inst.circles.iter().all(|c| c.radius == 1.0));
        assert_eq!(inst.circles[1].center, Point2::new(4.0, 0.0));
    }

    #[test]
    fn two_columns_with_override() {
        let inst = parse_instance("t", "0 0\n1 1\n", Some(0.5)).unwrap();
        assert!(inst.circles.iter().all(|c| c.radius == 0.5));
        let inst = parse_instance("t", "0 0\n1 1\n", None).unwrap();
        assert!(inst.circles.iter().all(|c| c.radius == 0.0));
    }

    #[test]
    fn comments_and_blank_lines() {
        let inst =
            parse_instance("t", "# header\n\n// note\n  1 2 3\n", None).unwrap();
        assert_eq!(inst.circles, vec![Circle::new(Point2::new(1.0, 2.0), 0.0)]);
    }

    #[test]
    fn errors_name_the_line() {
        let err = parse_instance("t", "a b c\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        let err = parse_instance("t", "0 0 0 1\n1 2 3 4 5\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_instance("t", "0 0 0 -1\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        assert!(matches!(parse_instance("t", "# nothing\n", None), Err(Error::EmptyInstance)));
    }

    #[test]
    fn write_then_parse() {
        let inst = Instance::new(
            "w",
            vec![Circle::new(Point2::new(0.1, -3.25e-7), 0.3), Circle::new(Point2::new(1e9, 2.0), 0.0)],
        );
        let back = parse_instance("w", &write_instance(&inst), None).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn radius_reconstruction() {
        let c = [Point2::new(0., 0.), Point2::new(2., 0.)];
        assert_eq!(reconstruct_radius(&c, &c).unwrap(), 0.0);
        assert_eq!(reconstruct_radius(&c, &[Point2::new(1., 0.)]).unwrap(), 1.0);
        // (0,0)->(1,0): 1; (4,0)->(3,1): sqrt 2; (4,3)->(3,1): sqrt 5
        let c = [Point2::new(0., 0.), Point2::new(4., 0.), Point2::new(4., 3.)];
        let t = [Point2::new(1., 0.), Point2::new(3., 1.)];
        let r = reconstruct_radius(&c, &t).unwrap();
        assert!((r - 5f64.sqrt()).abs() < 1e-12);
        assert!(reconstruct_radius(&[], &t).is_err());
        assert!(reconstruct_radius(&c, &[]).is_err());
    }
}
