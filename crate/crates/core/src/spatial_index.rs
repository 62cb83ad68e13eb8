//! Dynamic R*-tree over axis-aligned rectangles keyed by caller-chosen ids.
//!
//! The same index type stores circle bounding boxes during clustering and
//! tour points and tour segments during construction. Query results are
//! ordered by distance with ties broken by id, so a solve is reproducible for
//! a fixed insertion sequence.

use rstar::primitives::{GeomWithData, Rectangle};
use rstar::{Envelope, RTree, RTreeObject, SelectionFunction, AABB};

use crate::geometry::{segment_point_distance, Circle, Point2, Segment};

pub type EntryId = usize;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub min: Point2,
    pub max: Point2,
}

impl Rect {
    pub fn new(min: Point2, max: Point2) -> Self {
        debug_assert!(min.x <= max.x && min.y <= max.y);
        Rect { min, max }
    }

    pub fn from_point(p: Point2) -> Self {
        Rect { min: p, max: p }
    }

    pub fn from_circle(c: &Circle) -> Self {
        let r = Point2::new(c.radius, c.radius);
        Rect { min: c.center - r, max: c.center + r }
    }

    pub fn from_segment(s: &Segment) -> Self {
        Rect {
            min: Point2::new(s.a.x.min(s.b.x), s.a.y.min(s.b.y)),
            max: Point2::new(s.a.x.max(s.b.x), s.a.y.max(s.b.y)),
        }
    }

    /// Closed containment of `other` in `self`.
    pub fn contains_rect(&self, other: &Rect) -> bool {
        self.min.x <= other.min.x
            && self.min.y <= other.min.y
            && self.max.x >= other.max.x
            && self.max.y >= other.max.y
    }

    /// Distance from `q` to the rectangle; zero inside.
    pub fn distance_to_point(&self, q: Point2) -> f64 {
        let dx = (self.min.x - q.x).max(0.0).max(q.x - self.max.x);
        let dy = (self.min.y - q.y).max(0.0).max(q.y - self.max.y);
        (dx * dx + dy * dy).sqrt()
    }

    /// Shrinks by `eps` on every side, collapsing to the centre if too small.
    pub fn shrink(&self, eps: f64) -> Rect {
        let cx = 0.5 * (self.min.x + self.max.x);
        let cy = 0.5 * (self.min.y + self.max.y);
        Rect {
            min: Point2::new((self.min.x + eps).min(cx), (self.min.y + eps).min(cy)),
            max: Point2::new((self.max.x - eps).max(cx), (self.max.y - eps).max(cy)),
        }
    }

    fn to_rstar(self) -> Rectangle<[f64; 2]> {
        Rectangle::from_corners([self.min.x, self.min.y], [self.max.x, self.max.y])
    }

    fn aabb(self) -> AABB<[f64; 2]> {
        AABB::from_corners([self.min.x, self.min.y], [self.max.x, self.max.y])
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IndexEntry {
    pub rect: Rect,
    pub id: EntryId,
}

/// Query hit: an entry with the distance it was ranked by.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hit {
    pub id: EntryId,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IndexError {
    #[error("id {0} is already present in the index")]
    DuplicateId(EntryId),
    #[error("id {0} is not present in the index")]
    UnknownId(EntryId),
}

type Item = GeomWithData<Rectangle<[f64; 2]>, EntryId>;

#[derive(Default)]
pub struct SpatialIndex {
    tree: RTree<Item>,
    /// Rectangle of each live id; ids are expected to be dense.
    live: Vec<Option<Rect>>,
    count: usize,
}

impl SpatialIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn contains(&self, id: EntryId) -> bool {
        self.rect(id).is_some()
    }

    pub fn rect(&self, id: EntryId) -> Option<Rect> {
        self.live.get(id).copied().flatten()
    }

    pub fn insert(&mut self, entry: IndexEntry) -> Result<(), IndexError> {
        if self.contains(entry.id) {
            return Err(IndexError::DuplicateId(entry.id));
        }
        if self.live.len() <= entry.id {
            self.live.resize(entry.id + 1, None);
        }
        self.live[entry.id] = Some(entry.rect);
        self.count += 1;
        self.tree.insert(GeomWithData::new(entry.rect.to_rstar(), entry.id));
        Ok(())
    }

    pub fn delete(&mut self, id: EntryId) -> Result<Rect, IndexError> {
        let rect = self.live.get_mut(id).and_then(Option::take).ok_or(IndexError::UnknownId(id))?;
        self.count -= 1;
        let removed = self.tree.remove(&GeomWithData::new(rect.to_rstar(), id));
        debug_assert!(removed.is_some(), "index and tree out of sync for id {id}");
        Ok(rect)
    }

    /// Replaces the rectangle of a live entry.
    pub fn update(&mut self, id: EntryId, rect: Rect) -> Result<(), IndexError> {
        self.delete(id)?;
        self.insert(IndexEntry { rect, id })
    }

    /// Up to `k` entries closest to `q` by point-to-rectangle distance.
    pub fn knn_rects(&self, q: Point2, k: usize) -> Vec<Hit> {
        let mut hits: Vec<Hit> = Vec::with_capacity(k + 1);
        let mut cutoff = f64::INFINITY;
        for (item, d2) in self.tree.nearest_neighbor_iter_with_distance_2(&[q.x, q.y]) {
            if hits.len() >= k && d2 > cutoff {
                break;
            }
            hits.push(Hit { id: item.data, distance: d2 });
            if hits.len() == k {
                cutoff = d2;
            }
        }
        hits.sort_by(|a, b| a.distance.total_cmp(&b.distance).then(a.id.cmp(&b.id)));
        hits.truncate(k);
        for h in &mut hits {
            h.distance = h.distance.sqrt();
        }
        hits
    }

    /// Exact k-nearest search under a caller-supplied distance that never
    /// undercuts the rectangle distance (e.g. distance to a segment whose
    /// bounding box was inserted).
    pub fn knn_by<F>(&self, q: Point2, k: usize, mut exact: F) -> Vec<Hit>
    where
        F: FnMut(EntryId) -> f64,
    {
        let mut best: Vec<Hit> = Vec::with_capacity(k + 1);
        if k == 0 {
            return best;
        }
        for (item, d2) in self.tree.nearest_neighbor_iter_with_distance_2(&[q.x, q.y]) {
            if best.len() == k && d2.sqrt() > best[k - 1].distance {
                break;
            }
            let hit = Hit { id: item.data, distance: exact(item.data) };
            let pos = best.partition_point(|h| {
                h.distance < hit.distance || (h.distance == hit.distance && h.id < hit.id)
            });
            if pos < k {
                best.insert(pos, hit);
                best.truncate(k);
            }
        }
        best
    }

    /// k-nearest segments to `q`, re-ranked by exact segment distance.
    pub fn knn_segments<F>(&self, q: Point2, k: usize, segment_of: F) -> Vec<Hit>
    where
        F: Fn(EntryId) -> Segment,
    {
        self.knn_by(q, k, |id| segment_point_distance(&segment_of(id), q))
    }

    /// All live entries whose rectangle contains `r`, sorted by id.
    pub fn covering_rects(&self, r: &Rect) -> Vec<IndexEntry> {
        let mut out: Vec<IndexEntry> = self
            .tree
            .locate_with_selection_function(Covering(r.aabb()))
            .map(|item| IndexEntry { rect: self.live[item.data].expect("indexed id is live"), id: item.data })
            .collect();
        out.sort_by_key(|e| e.id);
        out
    }

    pub fn entries(&self) -> impl Iterator<Item = IndexEntry> + '_ {
        self.live.iter().enumerate().filter_map(|(id, r)| r.map(|rect| IndexEntry { rect, id }))
    }
}

struct Covering(AABB<[f64; 2]>);

impl SelectionFunction<Item> for Covering {
    fn should_unpack_parent(&self, envelope: &AABB<[f64; 2]>) -> bool {
        envelope.contains_envelope(&self.0)
    }

    fn should_unpack_leaf(&self, leaf: &Item) -> bool {
        leaf.envelope().contains_envelope(&self.0)
    }
}
