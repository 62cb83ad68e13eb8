//! Tour construction by top-down expansion of the cluster tree.
//!
//! The tour starts as one point at the root proxy's centre. Internal nodes
//! are expanded in decreasing order of merge distance: the proxy is dropped
//! from its tour point and both children are inserted, either for free into
//! an existing point inside their disk or as a new point spliced into the
//! cheapest of the `k` nearest tour edges.

mod tour;

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::clustering::{ClusterTree, NodeId};
use crate::geometry::{alhazen_bisection, newton_refine, Circle, Point2};
use crate::local_opt::{self, EnergyPolicy};
use crate::Error;

pub use tour::{tour_length, PointId, Tour, TourPoint};

#[derive(Clone, Debug, PartialEq)]
pub struct TourParams {
    /// Tour edges examined per non-free insertion.
    pub k_segments: usize,
    /// Apply one guarded Newton step after the bisection placement.
    pub newton: bool,
    /// Maximum number of circles reinserted; `None` disables the limit.
    pub reinsertion_budget: Option<usize>,
    /// Geometric membership tolerance.
    pub eps: f64,
    pub energy: EnergyPolicy,
}

impl Default for TourParams {
    fn default() -> Self {
        TourParams {
            k_segments: 6,
            newton: false,
            reinsertion_budget: None,
            eps: 1e-9,
            energy: EnergyPolicy::default(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildStats {
    /// Insertions caused by expanding cluster nodes.
    pub primary_insertions: usize,
    /// Insertions caused by reinsertion events.
    pub reinserted_circles: usize,
    pub zero_cost_insertions: usize,
    pub points_created: usize,
    pub reinsertion_events: usize,
    /// Reset points skipped because the budget ran out.
    pub dropped_reinsertions: usize,
    pub reoptimizations: usize,
    /// Sum of covered-list sizes over all reoptimizations.
    pub reopt_work: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TourEvent {
    Expand { node: NodeId },
    Insert { circle: NodeId, point: PointId, zero_cost: bool, delta: f64, position: Point2 },
    RemovePoint { point: PointId },
    Reinsert { point: PointId, circles: Vec<NodeId> },
    Reoptimize { point: PointId, from: Point2, to: Point2 },
}

/// Max-heap key: merge distance, ties resolved towards earlier-created nodes.
#[derive(Clone, Copy, Debug)]
struct Expansion {
    merge_distance: f64,
    node: NodeId,
}

impl PartialEq for Expansion {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Expansion {}

impl PartialOrd for Expansion {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expansion {
    fn cmp(&self, other: &Self) -> Ordering {
        self.merge_distance
            .total_cmp(&other.merge_distance)
            .then(Reverse(self.node).cmp(&Reverse(other.node)))
    }
}

/// Mutable state of one construction run.
pub struct TourBuilder<'a> {
    pub(crate) tree: &'a ClusterTree,
    pub(crate) circles: Vec<Circle>,
    pub(crate) tour: Tour,
    pub(crate) params: TourParams,
    pub(crate) stats: BuildStats,
    pub(crate) budget_left: Option<usize>,
    pub(crate) resets: Vec<PointId>,
    heap: BinaryHeap<Expansion>,
    pub(crate) trace: Option<&'a mut Vec<TourEvent>>,
}

impl<'a> TourBuilder<'a> {
    /// Initial tour: one point at the centre of the root, covering the root.
    pub fn new(tree: &'a ClusterTree, params: TourParams) -> Self {
        let circles: Vec<Circle> = tree.nodes().iter().map(|n| n.circle).collect();
        let root = tree.root();
        let mut tour = Tour::new(circles[root].center, circles.len());
        tour.assign(root, 0);
        let budget_left = params.reinsertion_budget;
        let mut builder = TourBuilder {
            tree,
            circles,
            tour,
            params,
            stats: BuildStats::default(),
            budget_left,
            resets: Vec::new(),
            heap: BinaryHeap::new(),
            trace: None,
        };
        // The root placement counts as the point's creating insertion.
        local_opt::on_insert_energy(&mut builder.tour, 0, &builder.params.energy);
        builder.push_if_internal(root);
        builder
    }

    pub fn with_trace(mut self, trace: &'a mut Vec<TourEvent>) -> Self {
        self.trace = Some(trace);
        self
    }

    pub fn tour(&self) -> &Tour {
        &self.tour
    }

    pub fn stats(&self) -> &BuildStats {
        &self.stats
    }

    pub fn circle(&self, node: NodeId) -> &Circle {
        &self.circles[node]
    }

    /// Runs the expansion loop until every internal node has been expanded.
    pub fn run(&mut self) -> Result<(), Error> {
        while let Some(Expansion { node, .. }) = self.heap.pop() {
            self.expand_node(node)?;
        }
        Ok(())
    }

    pub fn finish(self) -> (Tour, BuildStats) {
        (self.tour, self.stats)
    }

    fn push_if_internal(&mut self, node: NodeId) {
        let n = self.tree.node(node);
        if let Some(d) = n.merge_distance {
            self.heap.push(Expansion { merge_distance: d, node });
        }
    }

    /// Replaces a proxy circle in the tour by its two generating circles.
    pub fn expand_node(&mut self, node: NodeId) -> Result<(), Error> {
        let (left, right) = self
            .tree
            .node(node)
            .children
            .expect("only internal nodes are expanded");
        self.emit(TourEvent::Expand { node });
        let point = self.tour.unassign(node).expect("expanded proxy is assigned");
        let emptied = self.tour.point(point).covered.is_empty();
        // The last point of the tour stays as an anchor until the children
        // are in place.
        let anchor = emptied && self.tour.len() == 1;
        if emptied && !anchor {
            self.remove_point(point)?;
        }
        for child in [left, right] {
            self.insert_circle(child)?;
            self.stats.primary_insertions += 1;
            self.process_resets()?;
            self.push_if_internal(child);
        }
        if anchor && self.tour.is_alive(point) && self.tour.point(point).covered.is_empty() {
            self.remove_point(point)?;
        }
        Ok(())
    }

    pub(crate) fn remove_point(&mut self, point: PointId) -> Result<(), Error> {
        self.tour.remove_point(point)?;
        self.emit(TourEvent::RemovePoint { point });
        Ok(())
    }

    /// Inserts one circle and applies energy and reoptimization bookkeeping.
    /// Reset points are queued on `self.resets` for the caller to process.
    pub fn insert_circle(&mut self, node: NodeId) -> Result<PointId, Error> {
        if self.tour.is_empty() {
            return Err(Error::EmptyTour);
        }
        let circle = self.circles[node];

        let nearest = self.tour.point_index().knn_rects(circle.center, 1);
        let free = nearest
            .first()
            .filter(|h| h.distance <= circle.radius + self.params.eps)
            .map(|h| h.id);

        let (point, zero_cost, delta) = match free {
            Some(point) => {
                self.stats.zero_cost_insertions += 1;
                (point, true, 0.0)
            }
            None => {
                let (after, position, delta) = self.best_placement(&circle);
                let point = self.tour.insert_after(after, position);
                self.stats.points_created += 1;
                (point, false, delta)
            }
        };
        self.tour.assign(node, point);
        let position = self.tour.point(point).position;
        self.emit(TourEvent::Insert { circle: node, point, zero_cost, delta, position });

        let reset = local_opt::on_insert_energy(&mut self.tour, point, &self.params.energy);
        self.resets.extend(reset);
        if let Some((from, to)) = local_opt::maybe_reoptimize(&mut self.tour, point, &self.circles)
        {
            self.stats.reoptimizations += 1;
            self.stats.reopt_work += self.tour.point(point).covered.len();
            self.emit(TourEvent::Reoptimize { point, from, to });
        }
        Ok(point)
    }

    /// Cheapest bisection placement over the `k` nearest tour edges:
    /// `(edge start, position, added length)`.
    fn best_placement(&self, circle: &Circle) -> (PointId, Point2, f64) {
        let tour = &self.tour;
        let hits = tour.segment_index().knn_segments(circle.center, self.params.k_segments, |id| {
            tour.segment(id)
        });
        let mut best: Option<(PointId, Point2, f64)> = None;
        for hit in hits {
            let seg = tour.segment(hit.id);
            let (mut p, mut delta) = alhazen_bisection(&seg, circle);
            if self.params.newton && delta > 0.0 {
                p = newton_refine(&seg, circle, p);
                delta = crate::geometry::delta_len(seg.a, seg.b, p);
            }
            if best.is_none_or(|b| delta < b.2) {
                best = Some((hit.id, p, delta));
            }
        }
        best.expect("a non-empty tour has at least one edge")
    }

    pub(crate) fn emit(&mut self, event: TourEvent) {
        if let Some(t) = self.trace.as_deref_mut() {
            t.push(event);
        }
    }
}

/// Builds a closed tour covering every leaf of `tree`.
pub fn build_tour(tree: &ClusterTree, params: TourParams) -> Result<(Tour, BuildStats), Error> {
    let mut builder = TourBuilder::new(tree, params);
    builder.run()?;
    Ok(builder.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::build_tree;
    use crate::geometry::{delta_len, segment_point_distance};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn circle(x: f64, y: f64, r: f64) -> Circle {
        Circle::new(Point2::new(x, y), r)
    }

    fn tree_of(cs: &[Circle], seed: u64) -> ClusterTree {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        build_tree(cs, &mut rng, 8, None).unwrap()
    }

    fn assert_feasible(tree: &ClusterTree, tour: &Tour, eps: f64) {
        for leaf in 0..tree.leaf_count() {
            let p = tour.assignment(leaf).expect("leaf assigned");
            assert!(tour.is_alive(p));
            assert!(tree.node(leaf).circle.contains_point(tour.point(p).position, eps));
        }
    }

    #[test]
    fn single_leaf_tour() {
        let tree = tree_of(&[circle(2., 3., 1.)], 0);
        let (tour, _) = build_tour(&tree, TourParams::default()).unwrap();
        assert_eq!(tour.positions(), vec![Point2::new(2., 3.)]);
        assert_eq!(tour.length(), 0.0);
    }

    #[test]
    fn two_overlapping_leaves_share_a_point() {
        let tree = tree_of(&[circle(0., 0., 1.), circle(1., 0., 1.)], 0);
        let (tour, _) = build_tour(&tree, TourParams::default()).unwrap();
        assert_eq!(tour.len(), 1);
        assert_eq!(tour.length(), 0.0);
        assert_feasible(&tree, &tour, 1e-9);
    }

    #[test]
    fn two_disjoint_leaves() {
        let tree = tree_of(&[circle(0., 0., 1.), circle(4., 0., 1.)], 0);
        let (tour, _) = build_tour(&tree, TourParams::default()).unwrap();
        assert_eq!(tour.len(), 2);
        assert!((tour.length() - 4.0).abs() < 1e-9);
        assert_feasible(&tree, &tour, 1e-9);
    }

    #[test]
    fn nine_circles_all_assigned() {
        let cs: Vec<_> = (0..9)
            .map(|i| circle((i % 3) as f64 * 2.5, (i / 3) as f64 * 2.2, 0.4 + 0.1 * (i % 4) as f64))
            .collect();
        let tree = tree_of(&cs, 2);
        let mut trace = Vec::new();
        let mut b = TourBuilder::new(&tree, TourParams::default()).with_trace(&mut trace);
        b.run().unwrap();
        let (tour, _) = b.finish();
        let expansions = trace.iter().filter(|e| matches!(e, TourEvent::Expand { .. })).count();
        assert_eq!(expansions, 8);
        assert_feasible(&tree, &tour, 1e-9);
    }

    #[test]
    fn zero_cost_insert_keeps_length() {
        let tree = tree_of(&[circle(0., 0., 1.), circle(5., 0., 1.), circle(0., 6., 1.)], 0);
        let mut b = TourBuilder::new(&tree, TourParams::default());
        b.run().unwrap();
        let before = b.tour().length();
        let len = b.tour().len();
        let target = b.tour().assignment(0).unwrap();
        let at = b.tour().point(target).position;
        b.circles.push(Circle::new(at + Point2::new(0.1, 0.0), 0.3));
        b.tour.assignment_resize(b.circles.len());
        let got = b.insert_circle(b.circles.len() - 1).unwrap();
        assert_eq!(got, target);
        assert_eq!(b.tour().len(), len);
        assert!(b.tour().length() <= before + 1e-12);
        assert_eq!(b.stats().zero_cost_insertions, 1 + tree_zero_cost(&tree));
    }

    fn tree_zero_cost(tree: &ClusterTree) -> usize {
        let (_, stats) = build_tour(tree, TourParams::default()).unwrap();
        stats.zero_cost_insertions
    }

    #[test]
    fn far_circle_goes_to_bisection_point() {
        // Tour of two points; a far circle must create a new point.
        let tree = tree_of(&[circle(0., 0., 0.1), circle(2., 0., 0.1)], 0);
        let mut b = TourBuilder::new(&tree, TourParams::default());
        b.run().unwrap();
        assert_eq!(b.tour().len(), 2);
        b.circles.push(circle(1., 5., 0.5));
        b.tour.assignment_resize(b.circles.len());
        let node = b.circles.len() - 1;
        let before = b.tour().length();
        let p = b.insert_circle(node).unwrap();
        assert_eq!(b.tour().len(), 3);
        let pos = b.tour().point(p).position;
        assert!((pos.distance(Point2::new(1., 5.)) - 0.5).abs() < 1e-9);
        assert!(b.tour().length() > before);
    }

    #[test]
    fn sequential_insertions_pick_best_retrieved_edge() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let cs: Vec<Circle> = (0..20)
            .map(|_| circle(rng.gen_range(0.0..30.0), rng.gen_range(0.0..30.0), rng.gen_range(0.2..1.0)))
            .collect();
        let tree = tree_of(&cs[..1], 0);
        let params = TourParams { k_segments: 6, ..TourParams::default() };
        let mut b = TourBuilder::new(&tree, params);
        b.run().unwrap();
        b.tour.assignment_resize(1 + cs.len());
        for (i, c) in cs.iter().enumerate() {
            b.circles.push(*c);
            let node = i + 1;
            // linear-scan oracle over all edges
            let order = b.tour().order();
            let covered_free = order
                .iter()
                .any(|&p| c.contains_point(b.tour().point(p).position, b.params.eps));
            let min_all = order
                .iter()
                .map(|&p| alhazen_bisection(&b.tour().segment(p), c).1)
                .fold(f64::INFINITY, f64::min);
            let mut dists: Vec<(f64, PointId)> = order
                .iter()
                .map(|&p| (segment_point_distance(&b.tour().segment(p), c.center), p))
                .collect();
            dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let min_k = dists
                .iter()
                .take(6)
                .map(|&(_, p)| alhazen_bisection(&b.tour().segment(p), c).1)
                .fold(f64::INFINITY, f64::min);

            let before = b.tour().length();
            let p = b.insert_circle(node).unwrap();
            b.resets.clear();
            let pos = b.tour().point(p).position;
            assert!(c.contains_point(pos, 1e-9));
            if !covered_free {
                let prev = b.tour().point(b.tour().point(p).prev).position;
                let next = b.tour().point(b.tour().point(p).next).position;
                let added = if b.tour().len() == 2 {
                    2.0 * prev.distance(pos)
                } else {
                    delta_len(prev, next, pos)
                };
                assert!(min_k >= min_all - 1e-12);
                // chosen placement matches the best retrieved edge (before any
                // reoptimization moved the point further downhill)
                assert!(added <= min_k + 1e-9, "added {added} > best-of-k {min_k}");
                assert!(b.tour().length() <= before + min_k + 1e-9);
            }
        }
        for node in 1..=cs.len() {
            let p = b.tour().assignment(node).unwrap();
            assert!(b.circles[node].contains_point(b.tour().point(p).position, 1e-9));
        }
    }

    #[test]
    fn expand_keeps_point_with_other_circles() {
        let tree = tree_of(&[circle(0., 0., 1.), circle(1., 0., 1.)], 0);
        let mut b = TourBuilder::new(&tree, TourParams::default());
        let root = tree.root();
        // give the root point a second, unrelated circle
        b.circles.push(circle(0.5, 0.0, 10.0));
        b.tour.assignment_resize(b.circles.len());
        b.tour.assign(b.circles.len() - 1, 0);
        b.expand_node(root).unwrap();
        assert!(b.tour.is_alive(0));
    }

    #[test]
    fn expand_removes_point_covering_only_proxy() {
        let cs = [circle(0., 0., 0.2), circle(10., 0., 0.2), circle(10.5, 0.0, 0.2)];
        let tree = tree_of(&cs, 0);
        let mut trace = Vec::new();
        let mut b = TourBuilder::new(&tree, TourParams::default()).with_trace(&mut trace);
        b.run().unwrap();
        let (tour, _) = b.finish();
        assert!(trace.iter().any(|e| matches!(e, TourEvent::RemovePoint { .. })));
        assert_feasible(&tree, &tour, 1e-9);
        // segment index mirrors the tour order
        for id in tour.order() {
            assert!(tour.segment_index().contains(id));
        }
        assert_eq!(tour.segment_index().len(), tour.len());
    }

    #[test]
    fn empty_tour_rejected() {
        let tree = tree_of(&[circle(0., 0., 1.)], 0);
        let mut b = TourBuilder::new(&tree, TourParams::default());
        b.tour.unassign(0);
        b.tour.remove_point(0).unwrap();
        assert!(matches!(b.insert_circle(0), Err(Error::EmptyTour)));
    }

    #[test]
    fn random_instances_feasible_and_deterministic() {
        for seed in 0..10 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cs: Vec<Circle> = (0..200)
                .map(|_| circle(rng.gen_range(0.0..50.0), rng.gen_range(0.0..50.0), rng.gen_range(0.0..2.0)))
                .collect();
            let tree = tree_of(&cs, seed);
            let (t1, s1) = build_tour(&tree, TourParams::default()).unwrap();
            let (t2, s2) = build_tour(&tree, TourParams::default()).unwrap();
            assert_eq!(t1.positions(), t2.positions());
            assert_eq!(s1, s2);
            assert_feasible(&tree, &t1, 1e-9);
            assert_eq!(s1.primary_insertions, 2 * tree.internal_count());
        }
    }
}
