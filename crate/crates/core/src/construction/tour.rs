use crate::clustering::NodeId;
use crate::geometry::{Point2, Segment};
use crate::spatial_index::{IndexEntry, Rect, SpatialIndex};
use crate::Error;

pub type PointId = usize;

#[derive(Clone, Debug)]
pub struct TourPoint {
    pub position: Point2,
    /// Circles (cluster node ids) this point currently satisfies.
    pub covered: Vec<NodeId>,
    pub energy: i64,
    pub insert_count: u32,
    pub prev: PointId,
    pub next: PointId,
    alive: bool,
}

impl TourPoint {
    pub fn is_alive(&self) -> bool {
        self.alive
    }
}

/// Closed tour as a circular doubly linked list over an arena of points.
///
/// Point ids are never reused. The segment index holds one entry per live
/// point, keyed by the point's id and spanning the edge to its successor; a
/// single-point tour has one degenerate self-edge.
pub struct Tour {
    points: Vec<TourPoint>,
    live: usize,
    head: Option<PointId>,
    point_index: SpatialIndex,
    segment_index: SpatialIndex,
    assignment: Vec<Option<PointId>>,
}

impl Tour {
    /// A tour with one point at `position`. `node_count` sizes the
    /// circle→point assignment table.
    pub fn new(position: Point2, node_count: usize) -> Self {
        let mut tour = Tour {
            points: Vec::new(),
            live: 0,
            head: None,
            point_index: SpatialIndex::new(),
            segment_index: SpatialIndex::new(),
            assignment: vec![None; node_count],
        };
        tour.points.push(TourPoint {
            position,
            covered: Vec::new(),
            energy: 0,
            insert_count: 0,
            prev: 0,
            next: 0,
            alive: true,
        });
        tour.live = 1;
        tour.head = Some(0);
        tour.index_point(0);
        tour.index_segment(0);
        tour
    }

    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    pub fn point(&self, id: PointId) -> &TourPoint {
        &self.points[id]
    }

    pub fn point_mut(&mut self, id: PointId) -> &mut TourPoint {
        &mut self.points[id]
    }

    pub fn is_alive(&self, id: PointId) -> bool {
        self.points.get(id).is_some_and(|p| p.alive)
    }

    pub fn assignment(&self, node: NodeId) -> Option<PointId> {
        self.assignment[node]
    }

    pub fn point_index(&self) -> &SpatialIndex {
        &self.point_index
    }

    pub fn segment_index(&self) -> &SpatialIndex {
        &self.segment_index
    }

    /// Edge from `id` to its successor.
    pub fn segment(&self, id: PointId) -> Segment {
        let p = &self.points[id];
        Segment::new(p.position, self.points[p.next].position)
    }

    /// Adds `node` to the covered list of `point`.
    pub fn assign(&mut self, node: NodeId, point: PointId) {
        debug_assert!(self.points[point].alive);
        self.points[point].covered.push(node);
        self.assignment[node] = Some(point);
    }

    /// Removes `node` from its point's covered list. Returns the point.
    pub fn unassign(&mut self, node: NodeId) -> Option<PointId> {
        let point = self.assignment[node].take()?;
        self.points[point].covered.retain(|&c| c != node);
        Some(point)
    }

    /// Splices a new point at `position` into the edge starting at `after`.
    pub fn insert_after(&mut self, after: PointId, position: Point2) -> PointId {
        let next = self.points[after].next;
        let id = self.points.len();
        self.points.push(TourPoint {
            position,
            covered: Vec::new(),
            energy: 0,
            insert_count: 0,
            prev: after,
            next,
            alive: true,
        });
        self.points[after].next = id;
        self.points[next].prev = id;
        self.live += 1;
        self.index_point(id);
        self.reindex_segment(after);
        self.index_segment(id);
        id
    }

    /// Unlinks a point. Its covered circles must have been taken beforehand.
    pub fn remove_point(&mut self, id: PointId) -> Result<(), Error> {
        debug_assert!(self.points[id].alive);
        debug_assert!(self.points[id].covered.is_empty());
        self.point_index.delete(id)?;
        self.segment_index.delete(id)?;
        self.points[id].alive = false;
        self.live -= 1;
        if self.live == 0 {
            self.head = None;
            return Ok(());
        }
        let TourPoint { prev, next, .. } = self.points[id];
        self.points[prev].next = next;
        self.points[next].prev = prev;
        self.reindex_segment(prev);
        if self.head == Some(id) {
            self.head = Some(next);
        }
        Ok(())
    }

    /// Moves a point, keeping both indexes in sync.
    pub fn move_point(&mut self, id: PointId, position: Point2) {
        self.points[id].position = position;
        self.point_index
            .update(id, Rect::from_point(position))
            .expect("moved point is indexed");
        self.reindex_segment(id);
        let prev = self.points[id].prev;
        if prev != id {
            self.reindex_segment(prev);
        }
    }

    /// Live point ids in tour order.
    pub fn order(&self) -> Vec<PointId> {
        let mut out = Vec::with_capacity(self.live);
        if let Some(start) = self.head {
            let mut cur = start;
            loop {
                out.push(cur);
                cur = self.points[cur].next;
                if cur == start {
                    break;
                }
            }
        }
        out
    }

    pub fn positions(&self) -> Vec<Point2> {
        self.order().into_iter().map(|id| self.points[id].position).collect()
    }

    pub fn length(&self) -> f64 {
        tour_length(&self.positions())
    }

    #[cfg(test)]
    pub(crate) fn assignment_resize(&mut self, node_count: usize) {
        self.assignment.resize(node_count, None);
    }

    fn index_point(&mut self, id: PointId) {
        let rect = Rect::from_point(self.points[id].position);
        self.point_index.insert(IndexEntry { rect, id }).expect("fresh point id");
    }

    fn index_segment(&mut self, id: PointId) {
        let rect = Rect::from_segment(&self.segment(id));
        self.segment_index.insert(IndexEntry { rect, id }).expect("fresh segment id");
    }

    fn reindex_segment(&mut self, id: PointId) {
        let rect = Rect::from_segment(&self.segment(id));
        self.segment_index.update(id, rect).expect("segment is indexed");
    }
}

/// Length of the closed polygon through `points`, including the closing edge.
pub fn tour_length(points: &[Point2]) -> f64 {
    match points.len() {
        0 | 1 => 0.0,
        n => (0..n).map(|i| points[i].distance(points[(i + 1) % n])).sum(),
    }
}
