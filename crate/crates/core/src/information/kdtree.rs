//! Static k-d tree over a row-major point buffer.
//!
//! Supports the two queries the nearest-neighbor estimators need: the k
//! nearest neighbors of an indexed point (self excluded) and the number of
//! points strictly inside a ball. Nodes carry bounding boxes so range counts
//! can accept or reject whole subtrees.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const LEAF_SIZE: usize = 16;
const NO_CHILD: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Max-norm.
    Chebyshev,
    Euclidean,
}

impl Metric {
    #[inline]
    fn dist(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Chebyshev => a
                .iter()
                .zip(b)
                .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs())),
            Metric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
        }
    }

    #[inline]
    fn combine(self, parts: impl Iterator<Item = f64>) -> f64 {
        match self {
            Metric::Chebyshev => parts.fold(0.0, f64::max),
            Metric::Euclidean => parts.map(|p| p * p).sum::<f64>().sqrt(),
        }
    }
}

#[derive(Debug, Clone)]
struct Node {
    lo: usize,
    hi: usize,
    left: usize,
    right: usize,
}

#[derive(Debug, Clone, Copy)]
struct HeapItem(f64, usize);

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

#[derive(Debug)]
pub struct KdTree<'a> {
    points: &'a [f64],
    dim: usize,
    metric: Metric,
    perm: Vec<usize>,
    nodes: Vec<Node>,
    /// Per node: `dim` minima followed by `dim` maxima.
    bounds: Vec<f64>,
}

impl<'a> KdTree<'a> {
    pub fn new(points: &'a [f64], dim: usize, metric: Metric) -> Self {
        assert!(dim > 0 && points.len().is_multiple_of(dim));
        let n = points.len() / dim;
        let mut tree = KdTree {
            points,
            dim,
            metric,
            perm: (0..n).collect(),
            nodes: Vec::with_capacity(2 * n / LEAF_SIZE + 1),
            bounds: Vec::new(),
        };
        if n > 0 {
            tree.build(0, n);
        }
        tree
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &'a [f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    fn build(&mut self, lo: usize, hi: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node {
            lo,
            hi,
            left: NO_CHILD,
            right: NO_CHILD,
        });
        let d = self.dim;
        let mut mins = vec![f64::INFINITY; d];
        let mut maxs = vec![f64::NEG_INFINITY; d];
        for &p in &self.perm[lo..hi] {
            let pt = &self.points[p * d..(p + 1) * d];
            for k in 0..d {
                mins[k] = mins[k].min(pt[k]);
                maxs[k] = maxs[k].max(pt[k]);
            }
        }
        let split_dim = (0..d)
            .max_by(|&a, &b| (maxs[a] - mins[a]).total_cmp(&(maxs[b] - mins[b])))
            .unwrap_or(0);
        let spread = maxs[split_dim] - mins[split_dim];
        self.bounds.extend_from_slice(&mins);
        self.bounds.extend_from_slice(&maxs);

        if hi - lo > LEAF_SIZE && spread > 0.0 {
            let mid = lo + (hi - lo) / 2;
            let points = self.points;
            self.perm[lo..hi].select_nth_unstable_by(mid - lo, |&a, &b| {
                points[a * d + split_dim].total_cmp(&points[b * d + split_dim])
            });
            let left = self.build(lo, mid);
            let right = self.build(mid, hi);
            self.nodes[id].left = left;
            self.nodes[id].right = right;
        }
        id
    }

    #[inline]
    fn node_bounds(&self, id: usize) -> (&[f64], &[f64]) {
        let d = self.dim;
        let b = &self.bounds[id * 2 * d..(id + 1) * 2 * d];
        b.split_at(d)
    }

    /// Smallest possible distance from `q` to any point in node `id`.
    fn min_dist(&self, id: usize, q: &[f64]) -> f64 {
        let (mins, maxs) = self.node_bounds(id);
        self.metric.combine(
            q.iter()
                .zip(mins.iter().zip(maxs))
                .map(|(&x, (&lo, &hi))| (lo - x).max(x - hi).max(0.0)),
        )
    }

    /// Largest possible distance from `q` to any point in node `id`.
    fn max_dist(&self, id: usize, q: &[f64]) -> f64 {
        let (mins, maxs) = self.node_bounds(id);
        self.metric.combine(
            q.iter()
                .zip(mins.iter().zip(maxs))
                .map(|(&x, (&lo, &hi))| (x - lo).abs().max((hi - x).abs())),
        )
    }

    /// The `k` nearest neighbors of point `query` (excluding itself), sorted
    /// by increasing distance. Returns `(distance, index)` pairs.
    pub fn nearest(&self, query: usize, k: usize) -> Vec<(f64, usize)> {
        let q = self.point(query);
        let mut heap: BinaryHeap<HeapItem> = BinaryHeap::with_capacity(k + 1);
        if k > 0 && !self.is_empty() {
            self.nearest_rec(0, q, query, k, &mut heap);
        }
        let mut out: Vec<(f64, usize)> = heap.into_iter().map(|h| (h.0, h.1)).collect();
        out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        out
    }

    fn nearest_rec(
        &self,
        id: usize,
        q: &[f64],
        skip: usize,
        k: usize,
        heap: &mut BinaryHeap<HeapItem>,
    ) {
        let node = &self.nodes[id];
        if node.left == NO_CHILD {
            for &p in &self.perm[node.lo..node.hi] {
                if p == skip {
                    continue;
                }
                let item = HeapItem(self.metric.dist(q, self.point(p)), p);
                if heap.len() < k {
                    heap.push(item);
                } else if item < *heap.peek().unwrap() {
                    heap.pop();
                    heap.push(item);
                }
            }
            return;
        }
        let (l, r) = (node.left, node.right);
        let (dl, dr) = (self.min_dist(l, q), self.min_dist(r, q));
        let order = if dl <= dr { [(l, dl), (r, dr)] } else { [(r, dr), (l, dl)] };
        for (child, bound) in order {
            if heap.len() == k && bound > heap.peek().unwrap().0 {
                continue;
            }
            self.nearest_rec(child, q, skip, k, heap);
        }
    }

    /// Distance from point `query` to its `k`-th nearest neighbor.
    pub fn kth_distance(&self, query: usize, k: usize) -> f64 {
        self.nearest(query, k).last().map_or(f64::INFINITY, |p| p.0)
    }

    /// Number of points at distance strictly less than `radius` from point
    /// `query`, not counting the point itself.
    pub fn count_within(&self, query: usize, radius: f64) -> usize {
        if radius <= 0.0 || self.is_empty() {
            return 0;
        }
        let q = self.point(query);
        // the query point itself is always at distance 0 < radius
        self.count_rec(0, q, radius) - 1
    }

    fn count_rec(&self, id: usize, q: &[f64], radius: f64) -> usize {
        if self.min_dist(id, q) >= radius {
            return 0;
        }
        let node = &self.nodes[id];
        if self.max_dist(id, q) < radius {
            return node.hi - node.lo;
        }
        if node.left == NO_CHILD {
            return self.perm[node.lo..node.hi]
                .iter()
                .filter(|&&p| self.metric.dist(q, self.point(p)) < radius)
                .count();
        }
        self.count_rec(node.left, q, radius) + self.count_rec(node.right, q, radius)
    }
}
