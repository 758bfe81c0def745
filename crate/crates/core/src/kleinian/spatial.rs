//! Static 3-d tree over points of the unit sphere, queried by chord length.

#[derive(Debug, Clone)]
pub struct SphereIndex {
    points: Vec<[f64; 3]>,
    // Permutation of point indices laid out as an implicit balanced tree: the
    // median of every range is the node, split along the range's widest axis.
    order: Vec<u32>,
    // Bounding box and split axis of each node's range, stored at the node's
    // position.
    boxes: Vec<[[f64; 3]; 2]>,
    axes: Vec<u8>,
}

#[inline]
pub fn chord2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

impl SphereIndex {
    pub fn new(points: Vec<[f64; 3]>) -> Self {
        let mut order: Vec<u32> = (0..points.len() as u32).collect();
        let mut boxes = vec![[[0.0; 3]; 2]; points.len()];
        let mut axes = vec![0; points.len()];
        build(&points, &mut order, &mut boxes, &mut axes);
        SphereIndex { points, order, boxes, axes }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> [f64; 3] {
        self.points[i]
    }

    /// Index and squared chord of the nearest point.
    pub fn nearest(&self, q: &[f64; 3]) -> Option<(usize, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let mut best = (usize::MAX, f64::INFINITY);
        self.nearest_in(q, 0, self.order.len(), &mut best);
        Some(best)
    }

    /// Every point with squared chord at most `r2`.
    pub fn within(&self, q: &[f64; 3], r2: f64, out: &mut Vec<usize>) {
        out.clear();
        self.within_in(q, r2, 0, self.order.len(), out);
    }

    fn nearest_in(&self, q: &[f64; 3], lo: usize, hi: usize, best: &mut (usize, f64)) {
        if lo >= hi {
            return;
        }
        let mid = lo + (hi - lo) / 2;
        if box_distance2(&self.boxes[mid], q) > best.1 {
            return;
        }
        let idx = self.order[mid] as usize;
        let p = &self.points[idx];
        let d2 = chord2(p, q);
        if d2 < best.1 || (d2 == best.1 && idx < best.0) {
            *best = (idx, d2);
        }
        let axis = self.axes[mid] as usize;
        let diff = q[axis] - p[axis];
        let (first, second) = if diff < 0.0 { ((lo, mid), (mid + 1, hi)) } else { ((mid + 1, hi), (lo, mid)) };
        self.nearest_in(q, first.0, first.1, best);
        if diff * diff <= best.1 {
            self.nearest_in(q, second.0, second.1, best);
        }
    }

    fn within_in(&self, q: &[f64; 3], r2: f64, lo: usize, hi: usize, out: &mut Vec<usize>) {
        if lo >= hi {
            return;
        }
        let mid = lo + (hi - lo) / 2;
        if box_distance2(&self.boxes[mid], q) > r2 {
            return;
        }
        let idx = self.order[mid] as usize;
        let p = &self.points[idx];
        if chord2(p, q) <= r2 {
            out.push(idx);
        }
        let axis = self.axes[mid] as usize;
        let diff = q[axis] - p[axis];
        if diff <= 0.0 || diff * diff <= r2 {
            self.within_in(q, r2, lo, mid, out);
        }
        if diff >= 0.0 || diff * diff <= r2 {
            self.within_in(q, r2, mid + 1, hi, out);
        }
    }
}

#[inline]
fn box_distance2(b: &[[f64; 3]; 2], q: &[f64; 3]) -> f64 {
    let mut d2 = 0.0;
    for k in 0..3 {
        let d = (b[0][k] - q[k]).max(q[k] - b[1][k]).max(0.0);
        d2 += d * d;
    }
    d2
}

fn build(points: &[[f64; 3]], order: &mut [u32], boxes: &mut [[[f64; 3]; 2]], axes: &mut [u8]) {
    if order.is_empty() {
        return;
    }
    let first = points[order[0] as usize];
    let mut b = [first, first];
    for &i in order.iter() {
        let p = points[i as usize];
        for k in 0..3 {
            b[0][k] = b[0][k].min(p[k]);
            b[1][k] = b[1][k].max(p[k]);
        }
    }
    let axis = (0..3).max_by(|&a, &c| (b[1][a] - b[0][a]).total_cmp(&(b[1][c] - b[0][c])).then(c.cmp(&a))).unwrap();
    let mid = order.len() / 2;
    order.select_nth_unstable_by(mid, |&i, &j| {
        points[i as usize][axis]
            .total_cmp(&points[j as usize][axis])
            .then(i.cmp(&j))
    });
    boxes[mid] = b;
    axes[mid] = axis as u8;
    let (left, right) = order.split_at_mut(mid);
    let (bl, br) = boxes.split_at_mut(mid);
    let (al, ar) = axes.split_at_mut(mid);
    build(points, left, bl, al);
    build(points, &mut right[1..], &mut br[1..], &mut ar[1..]);
}
