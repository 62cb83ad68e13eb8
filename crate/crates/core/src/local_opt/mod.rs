//! Energy-driven reinsertion and exponentially scheduled reoptimization of
//! tour points, plus the abstract gadget process used to bound the number of
//! reinsertions.

mod gadget;

use crate::construction::{PointId, Tour, TourBuilder, TourEvent};
use crate::geometry::{reoptimize_point, Circle, Point2};
use crate::Error;

pub use gadget::{simulate_gadget, GadgetReport};

/// Energy changes applied on every circle insertion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnergyPolicy {
    /// Added to the point receiving the circle.
    pub gain: i64,
    /// Subtracted from each immediate tour neighbour.
    pub neighbor_drain: i64,
}

impl Default for EnergyPolicy {
    fn default() -> Self {
        EnergyPolicy { gain: 3, neighbor_drain: 1 }
    }
}

/// Records one circle insertion into `point`: bumps its insertion counter,
/// adds the gain to it and drains its distinct neighbours. Returns the
/// neighbours whose energy dropped to zero or below.
pub fn on_insert_energy(tour: &mut Tour, point: PointId, policy: &EnergyPolicy) -> Vec<PointId> {
    let p = tour.point_mut(point);
    p.energy += policy.gain;
    p.insert_count += 1;
    let (prev, next) = (p.prev, p.next);

    let mut reset = Vec::new();
    for (i, nb) in [prev, next].into_iter().enumerate() {
        if nb == point || (i == 1 && nb == prev) {
            continue;
        }
        let q = tour.point_mut(nb);
        q.energy -= policy.neighbor_drain;
        if q.energy <= 0 {
            reset.push(nb);
        }
    }
    reset
}

/// Reoptimizes `point` when its insertion count is a power of two.
///
/// Returns the old and new position when the schedule fired. The tour length
/// never grows: only the two edges at `point` change and their added length
/// is non-increasing.
pub fn maybe_reoptimize(
    tour: &mut Tour,
    point: PointId,
    circles: &[Circle],
) -> Option<(Point2, Point2)> {
    let p = tour.point(point);
    if !p.insert_count.is_power_of_two() || tour.len() < 2 {
        return None;
    }
    let from = p.position;
    let a = tour.point(p.prev).position;
    let b = tour.point(p.next).position;
    let disks: Vec<Circle> = p.covered.iter().map(|&c| circles[c]).collect();
    let to = reoptimize_point(a, b, from, &disks);
    if to != from {
        tour.move_point(point, to);
    }
    Some((from, to))
}

impl TourBuilder<'_> {
    /// Drains the reset stack, reinserting points whose energy is still
    /// depleted. Resets raised during a reinsertion go on the same stack.
    pub fn process_resets(&mut self) -> Result<(), Error> {
        while let Some(point) = self.resets.pop() {
            if !self.tour.is_alive(point) || self.tour.point(point).energy > 0 {
                continue;
            }
            self.reinsert_point(point)?;
        }
        Ok(())
    }

    /// Removes `point` and inserts each of its circles again as new circles.
    /// A no-op once the reinsertion budget is used up.
    pub fn reinsert_point(&mut self, point: PointId) -> Result<(), Error> {
        if self.tour.len() <= 1 {
            return Ok(());
        }
        let circles = self.tour.point(point).covered.clone();
        match self.budget_left {
            Some(0) => {
                self.stats.dropped_reinsertions += 1;
                return Ok(());
            }
            Some(left) => self.budget_left = Some(left.saturating_sub(circles.len())),
            None => {}
        }
        for &c in &circles {
            self.tour.unassign(c);
        }
        self.emit(TourEvent::Reinsert { point, circles: circles.clone() });
        self.remove_point(point)?;
        self.stats.reinsertion_events += 1;
        self.stats.reinserted_circles += circles.len();
        for c in circles {
            self.insert_circle(c)?;
        }
        Ok(())
    }
}
