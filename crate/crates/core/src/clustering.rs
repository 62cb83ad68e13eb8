//! Preprocessing and the agglomerative merge loop that builds the binary
//! cluster tree over the input circles.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{centroid, effective_distance, proxy_circle, Circle, Point2};
use crate::spatial_index::{IndexEntry, Rect, SpatialIndex};
use crate::Error;

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterNode {
    pub circle: Circle,
    /// Effective distance of the merged pair; `None` for leaves.
    pub merge_distance: Option<f64>,
    pub children: Option<(NodeId, NodeId)>,
    /// Position of the circle in the (preprocessed) leaf list.
    pub original_index: Option<usize>,
}

impl ClusterNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }
}

/// Binary hierarchy stored as an arena. Leaves occupy ids `0..leaf_count`,
/// internal nodes follow in creation order; the root is the last node.
#[derive(Clone, Debug)]
pub struct ClusterTree {
    nodes: Vec<ClusterNode>,
    leaf_count: usize,
}

impl ClusterTree {
    pub fn root(&self) -> NodeId {
        self.nodes.len() - 1
    }

    pub fn node(&self, id: NodeId) -> &ClusterNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[ClusterNode] {
        &self.nodes
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }

    pub fn internal_count(&self) -> usize {
        self.nodes.len() - self.leaf_count
    }
}

/// One merge of the clustering loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MergeEvent {
    pub left: NodeId,
    pub right: NodeId,
    pub node: NodeId,
    pub proxy: Circle,
    pub merge_distance: f64,
}

/// Output of [`preprocess`].
#[derive(Clone, Debug)]
pub struct Preprocessed {
    /// Rotated circles that survived redundancy removal.
    pub kept: Vec<Circle>,
    /// Input index of each kept circle.
    pub kept_index: Vec<usize>,
    /// Rotation applied about `pivot`.
    pub rotation: f64,
    pub pivot: Point2,
    /// `(removed input index, kept input index)`; the kept disk lies inside
    /// the removed one.
    pub removed_map: Vec<(usize, usize)>,
}

impl Preprocessed {
    /// Maps a point from the rotated working frame back to input coordinates.
    pub fn unrotate(&self, p: Point2) -> Point2 {
        p.rotate_about(self.pivot, -self.rotation)
    }
}

/// Applies a random global rotation and removes every circle whose disk
/// contains another circle's disk. A point inside the contained disk is also
/// inside the container, so the removed circle is satisfied automatically.
/// Of two coincident circles, the one with the larger index is removed.
pub fn preprocess<R: Rng + ?Sized>(
    circles: &[Circle],
    rng: &mut R,
    eps: f64,
) -> Result<Preprocessed, Error> {
    if circles.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let rotation = rng.gen_range(0.0..std::f64::consts::TAU);
    let pivot = centroid(circles.iter().map(|c| c.center)).unwrap_or(Point2::ORIGIN);
    let rotated: Vec<Circle> = circles
        .iter()
        .map(|c| Circle::new(c.center.rotate_about(pivot, rotation), c.radius))
        .collect();

    let n = rotated.len();
    let mut index = SpatialIndex::new();
    for (id, c) in rotated.iter().enumerate() {
        index.insert(IndexEntry { rect: Rect::from_circle(c), id })?;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| rotated[b].radius.total_cmp(&rotated[a].radius).then(a.cmp(&b)));

    // smallest (radius, index) contained circle found for each container
    let mut witness: Vec<Option<usize>> = vec![None; n];
    for &s in &order {
        let small = &rotated[s];
        for cand in index.covering_rects(&Rect::from_circle(small).shrink(eps)) {
            let b = cand.id;
            if b == s || !removes(&rotated, b, s, eps) {
                continue;
            }
            let better = match witness[b] {
                None => true,
                Some(w) => (small.radius, s) < (rotated[w].radius, w),
            };
            if better {
                witness[b] = Some(s);
            }
        }
    }

    let mut kept = Vec::new();
    let mut kept_index = Vec::new();
    let mut removed_map = Vec::new();
    for i in 0..n {
        match witness[i] {
            None => {
                kept.push(rotated[i]);
                kept_index.push(i);
            }
            Some(mut w) => {
                // Follow the chain in case tolerance broke transitivity.
                while let Some(next) = witness[w] {
                    w = next;
                }
                removed_map.push((i, w));
            }
        }
    }
    Ok(Preprocessed { kept, kept_index, rotation, pivot, removed_map })
}

/// Whether circle `big` is redundant because it contains circle `small`.
fn removes(circles: &[Circle], big: usize, small: usize, eps: f64) -> bool {
    let (b, s) = (&circles[big], &circles[small]);
    b.contains_circle(s, eps) && (!s.contains_circle(b, eps) || small < big)
}

#[derive(Clone, Copy, Debug)]
struct PairEntry {
    distance: f64,
    owner: NodeId,
    partner: NodeId,
    version: u32,
}

impl PartialEq for PairEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for PairEntry {}

impl PartialOrd for PairEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PairEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then(self.owner.cmp(&other.owner))
            .then(self.partner.cmp(&other.partner))
            .then(self.version.cmp(&other.version))
    }
}

/// Per-live-circle candidate lists plus the global min-heap of pairs.
struct NeighborState {
    neighbors: Vec<Vec<(NodeId, f64)>>,
    version: Vec<u32>,
    alive: Vec<bool>,
    heap: BinaryHeap<Reverse<PairEntry>>,
    k: usize,
}

impl NeighborState {
    fn push_best(&mut self, id: NodeId) {
        self.version[id] = self.version[id].wrapping_add(1);
        if let Some(&(partner, distance)) = self.neighbors[id].first() {
            self.heap.push(Reverse(PairEntry {
                distance,
                owner: id,
                partner,
                version: self.version[id],
            }));
        }
    }

    /// Rebuilds the candidate list of `id` from the `k` nearest boxes,
    /// re-ranked by exact effective distance.
    fn refresh(&mut self, id: NodeId, nodes: &[ClusterNode], index: &SpatialIndex) {
        let me = nodes[id].circle;
        let mut list: Vec<(NodeId, f64)> = index
            .knn_rects(me.center, self.k + 1)
            .into_iter()
            .filter(|h| h.id != id)
            .map(|h| (h.id, effective_distance(&me, &nodes[h.id].circle)))
            .collect();
        list.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        list.truncate(self.k);
        self.neighbors[id] = list;
        self.push_best(id);
    }

    fn add_node(&mut self) {
        self.neighbors.push(Vec::new());
        self.version.push(0);
        self.alive.push(true);
    }
}

/// Repeatedly merges the closest live pair (by cached approximate neighbour
/// candidates) into its proxy circle until one cluster remains.
///
/// `k` is the number of nearest bounding boxes examined per candidate refresh.
pub fn build_tree<R: Rng + ?Sized>(
    circles: &[Circle],
    rng: &mut R,
    k: usize,
    mut trace: Option<&mut Vec<MergeEvent>>,
) -> Result<ClusterTree, Error> {
    if circles.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let n = circles.len();
    let mut nodes: Vec<ClusterNode> = circles
        .iter()
        .enumerate()
        .map(|(i, &circle)| ClusterNode {
            circle,
            merge_distance: None,
            children: None,
            original_index: Some(i),
        })
        .collect();
    nodes.reserve(n.saturating_sub(1));

    let mut index = SpatialIndex::new();
    for (id, c) in circles.iter().enumerate() {
        index.insert(IndexEntry { rect: Rect::from_circle(c), id })?;
    }

    let mut state = NeighborState {
        neighbors: Vec::with_capacity(2 * n),
        version: Vec::with_capacity(2 * n),
        alive: Vec::with_capacity(2 * n),
        heap: BinaryHeap::with_capacity(2 * n),
        k: k.max(1),
    };
    for _ in 0..n {
        state.add_node();
    }
    for id in 0..n {
        state.refresh(id, &nodes, &index);
    }

    let mut live = n;
    while live > 1 {
        let Some(Reverse(entry)) = state.heap.pop() else {
            // Cannot happen while two circles are live: every live circle
            // owns a current heap entry.
            unreachable!("neighbour heap exhausted with {live} live circles");
        };
        let (i, j) = (entry.owner, entry.partner);
        if !state.alive[i] || state.version[i] != entry.version {
            continue;
        }
        if !state.alive[j] {
            state.refresh(i, &nodes, &index);
            continue;
        }

        state.alive[i] = false;
        state.alive[j] = false;
        index.delete(i)?;
        index.delete(j)?;
        let proxy = proxy_circle(&nodes[i].circle, &nodes[j].circle, rng);
        let m = nodes.len();
        nodes.push(ClusterNode {
            circle: proxy,
            merge_distance: Some(entry.distance),
            children: Some((i, j)),
            original_index: None,
        });
        index.insert(IndexEntry { rect: Rect::from_circle(&proxy), id: m })?;
        state.add_node();
        live -= 1;
        if let Some(t) = trace.as_deref_mut() {
            t.push(MergeEvent {
                left: i,
                right: j,
                node: m,
                proxy,
                merge_distance: entry.distance,
            });
        }
        if live == 1 {
            break;
        }

        state.refresh(m, &nodes, &index);
        // Circles near the proxy may now have it as their closest partner.
        let around: Vec<(NodeId, f64)> = state.neighbors[m].clone();
        for (x, d) in around {
            let current = state.neighbors[x].first().map_or(f64::INFINITY, |e| e.1);
            if d < current {
                state.neighbors[x].insert(0, (m, d));
                state.neighbors[x].truncate(state.k);
                state.push_best(x);
            }
        }
    }

    Ok(ClusterTree { nodes, leaf_count: n })
}
