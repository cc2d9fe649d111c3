//! Exact k-nearest-neighbor search over a fixed point set.
//!
//! Two interchangeable engines answer the same queries: a kd-tree
//! ([`KnnIndex`]) and a full-scan reference ([`query_brute`]). Both order
//! candidates by the total order (squared distance, row index) and compute
//! per-pair distances with the same summation order, so their results agree
//! not just set-wise but bit for bit. Ties in distance therefore always
//! resolve to the lower row index, and a neighborhood has exactly k members.

use crate::error::{Error, Result};

/// A k-nearest-neighbor question: query point, neighborhood size, and an
/// optional row to ignore (for leave-one-out evaluation).
#[derive(Debug, Clone)]
pub struct NeighborQuery<'a> {
    pub point: &'a [f64],
    pub k: usize,
    pub exclude: Option<usize>,
}

impl<'a> NeighborQuery<'a> {
    pub fn new(point: &'a [f64], k: usize) -> Self {
        Self {
            point,
            k,
            exclude: None,
        }
    }

    pub fn excluding(point: &'a [f64], k: usize, exclude: usize) -> Self {
        Self {
            point,
            k,
            exclude: Some(exclude),
        }
    }
}

/// Query answer: row indices and Euclidean distances, sorted ascending by
/// (distance, index).
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborList {
    pub indices: Vec<usize>,
    pub distances: Vec<f64>,
}

/// Squared Euclidean distance with a fixed left-to-right summation order.
#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc
}

const DEFAULT_LEAF_SIZE: usize = 32;

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        dim: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

/// Immutable kd-tree over an m x d point set; median split on the
/// widest-spread dimension, answering exact queries from any thread.
#[derive(Debug, Clone)]
pub struct KnnIndex {
    points: Vec<f64>,
    dim: usize,
    len: usize,
    nodes: Vec<Node>,
    /// Point ids arranged so that every leaf owns a contiguous range.
    order: Vec<usize>,
}

impl KnnIndex {
    /// Build with the default leaf size.
    pub fn build(points: Vec<f64>, dim: usize) -> Result<Self> {
        Self::with_leaf_size(points, dim, DEFAULT_LEAF_SIZE)
    }

    pub fn with_leaf_size(points: Vec<f64>, dim: usize, leaf_size: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid("point dimension must be positive".into()));
        }
        if points.is_empty() {
            return Err(Error::Invalid("empty point set".into()));
        }
        if points.len() % dim != 0 {
            return Err(Error::Invalid(format!(
                "point buffer of {} values is not a multiple of dim {dim}",
                points.len()
            )));
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite coordinate in point set".into()));
        }
        let len = points.len() / dim;
        let leaf_size = leaf_size.max(1);
        let mut index = Self {
            points,
            dim,
            len,
            nodes: Vec::new(),
            order: (0..len).collect(),
        };
        index.split(0, len, leaf_size);
        Ok(index)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coordinates of stored point `id`.
    pub fn point_row(&self, id: usize) -> &[f64] {
        self.point(id)
    }

    fn point(&self, id: usize) -> &[f64] {
        &self.points[id * self.dim..(id + 1) * self.dim]
    }

    /// Recursively partition `order[start..end]`; returns the node id.
    fn split(&mut self, start: usize, end: usize, leaf_size: usize) -> usize {
        let node_id = self.nodes.len();
        if end - start <= leaf_size {
            self.nodes.push(Node::Leaf { start, end });
            return node_id;
        }
        // Widest-spread dimension over this subset.
        let mut best_dim = 0;
        let mut best_spread = f64::NEG_INFINITY;
        for d in 0..self.dim {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &id in &self.order[start..end] {
                let v = self.point(id)[d];
                lo = lo.min(v);
                hi = hi.max(v);
            }
            let spread = hi - lo;
            if spread > best_spread {
                best_spread = spread;
                best_dim = d;
            }
        }
        let mid = (end - start) / 2;
        {
            let dim = best_dim;
            let points = &self.points;
            let ndim = self.dim;
            self.order[start..end].select_nth_unstable_by(mid, |&a, &b| {
                let va = points[a * ndim + dim];
                let vb = points[b * ndim + dim];
                va.partial_cmp(&vb).unwrap().then(a.cmp(&b))
            });
        }
        let split_value = self.point(self.order[start + mid])[best_dim];
        self.nodes.push(Node::Leaf { start, end }); // placeholder
        let left = self.split(start, start + mid, leaf_size);
        let right = self.split(start + mid, end, leaf_size);
        self.nodes[node_id] = Node::Split {
            dim: best_dim,
            value: split_value,
            left,
            right,
        };
        node_id
    }

    /// Exact k nearest neighbors of `q.point` under (distance, index) order.
    pub fn query(&self, q: &NeighborQuery) -> Result<NeighborList> {
        validate_query(q, self.dim, self.len)?;
        let mut heap = BoundedHeap::new(q.k);
        self.search(0, q, &mut heap);
        Ok(heap.into_list())
    }

    fn search(&self, node: usize, q: &NeighborQuery, heap: &mut BoundedHeap) {
        match &self.nodes[node] {
            Node::Leaf { start, end } => {
                for &id in &self.order[*start..*end] {
                    if q.exclude == Some(id) {
                        continue;
                    }
                    heap.offer(sq_dist(q.point, self.point(id)), id);
                }
            }
            Node::Split {
                dim,
                value,
                left,
                right,
            } => {
                let diff = q.point[*dim] - value;
                let (near, far) = if diff < 0.0 {
                    (*left, *right)
                } else {
                    (*right, *left)
                };
                self.search(near, q, heap);
                // The far side can still hold an equal-distance lower-index
                // candidate, so recurse on <= rather than <.
                if !heap.is_full() || diff * diff <= heap.worst().0 {
                    self.search(far, q, heap);
                }
            }
        }
    }
}

/// Reference engine: full scan and sort by (squared distance, index).
pub fn query_brute(points: &[f64], dim: usize, q: &NeighborQuery) -> Result<NeighborList> {
    if dim == 0 || points.is_empty() || points.len() % dim != 0 {
        return Err(Error::Invalid("bad point buffer".into()));
    }
    let len = points.len() / dim;
    validate_query(q, dim, len)?;
    let mut all: Vec<(f64, usize)> = (0..len)
        .filter(|&id| q.exclude != Some(id))
        .map(|id| (sq_dist(q.point, &points[id * dim..(id + 1) * dim]), id))
        .collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    all.truncate(q.k);
    Ok(NeighborList {
        indices: all.iter().map(|&(_, id)| id).collect(),
        distances: all.iter().map(|&(d, _)| d.sqrt()).collect(),
    })
}

fn validate_query(q: &NeighborQuery, dim: usize, len: usize) -> Result<()> {
    if q.point.len() != dim {
        return Err(Error::DimensionMismatch {
            got: q.point.len(),
            expected: dim,
        });
    }
    if q.point.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("non-finite query coordinate".into()));
    }
    let available = match q.exclude {
        Some(e) if e < len => len - 1,
        _ => len,
    };
    if q.k == 0 || q.k > available {
        return Err(Error::KOutOfRange {
            k: q.k,
            max: available,
        });
    }
    Ok(())
}

/// Fixed-capacity max-heap over (squared distance, index); the root is the
/// current worst candidate under the lexicographic order.
struct BoundedHeap {
    k: usize,
    items: Vec<(f64, usize)>,
}

impl BoundedHeap {
    fn new(k: usize) -> Self {
        Self {
            k,
            items: Vec::with_capacity(k),
        }
    }

    fn is_full(&self) -> bool {
        self.items.len() == self.k
    }

    fn worst(&self) -> (f64, usize) {
        self.items[0]
    }

    #[inline]
    fn offer(&mut self, sqd: f64, id: usize) {
        if self.items.len() < self.k {
            self.items.push((sqd, id));
            let mut i = self.items.len() - 1;
            while i > 0 {
                let parent = (i - 1) / 2;
                if lex_lt(self.items[parent], self.items[i]) {
                    self.items.swap(parent, i);
                    i = parent;
                } else {
                    break;
                }
            }
        } else if lex_lt((sqd, id), self.items[0]) {
            self.items[0] = (sqd, id);
            let mut i = 0;
            loop {
                let l = 2 * i + 1;
                let r = 2 * i + 2;
                let mut largest = i;
                if l < self.items.len() && lex_lt(self.items[largest], self.items[l]) {
                    largest = l;
                }
                if r < self.items.len() && lex_lt(self.items[largest], self.items[r]) {
                    largest = r;
                }
                if largest == i {
                    break;
                }
                self.items.swap(i, largest);
                i = largest;
            }
        }
    }

    fn into_list(self) -> NeighborList {
        let mut items = self.items;
        items.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        NeighborList {
            indices: items.iter().map(|&(_, id)| id).collect(),
            distances: items.iter().map(|&(d, _)| d.sqrt()).collect(),
        }
    }
}

#[inline]
fn lex_lt(a: (f64, usize), b: (f64, usize)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}
