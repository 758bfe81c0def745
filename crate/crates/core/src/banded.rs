//! Square banded matrices with in-place LU factorization (no pivoting).
//!
//! Only used for diagonally dominant stencil systems, where elimination
//! without pivoting is stable and fill stays inside the band.

#[derive(Clone, Debug)]
pub(crate) struct BandedMatrix {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub(crate) fn zeros(n: usize, bw: usize) -> Self {
        BandedMatrix { n, bw, data: vec![0.0; n * (2 * bw + 1)] }
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(i.abs_diff(j) <= self.bw);
        i * (2 * self.bw + 1) + (j + self.bw - i)
    }

    #[inline]
    pub(crate) fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.offset(i, j);
        self.data[k] += v;
    }

    #[cfg(test)]
    fn get(&self, i: usize, j: usize) -> f64 {
        if i.abs_diff(j) > self.bw {
            0.0
        } else {
            self.data[self.offset(i, j)]
        }
    }

    /// Factor in place and solve `A x = b`; `b` is overwritten with `x`.
    /// Returns `None` on a vanishing pivot.
    pub(crate) fn solve_in_place(mut self, b: &mut [f64]) -> Option<()> {
        let (n, bw, w) = (self.n, self.bw, 2 * self.bw + 1);
        for k in 0..n {
            let pivot = self.data[k * w + bw];
            if pivot.abs() < 1e-300 || !pivot.is_finite() {
                return None;
            }
            let end = (k + bw + 1).min(n);
            let (head, tail) = self.data.split_at_mut((k + 1) * w);
            let row_k = &head[k * w..];
            for i in k + 1..end {
                let row_i = &mut tail[(i - k - 1) * w..(i - k) * w];
                let col = k + bw - i;
                let l = row_i[col] / pivot;
                if l == 0.0 {
                    continue;
                }
                row_i[col] = l;
                // row_i[j + bw - i] -= l * row_k[j + bw - k] for j in k+1..end
                for (dst, src) in row_i[col + 1..col + 1 + (end - k - 1)]
                    .iter_mut()
                    .zip(&row_k[bw + 1..bw + 1 + (end - k - 1)])
                {
                    *dst -= l * src;
                }
                b[i] -= l * b[k];
            }
        }
        for k in (0..n).rev() {
            let end = (k + bw + 1).min(n);
            let row = &self.data[k * w..(k + 1) * w];
            let mut s = b[k];
            for j in k + 1..end {
                s -= row[j + bw - k] * b[j];
            }
            b[k] = s / row[bw];
        }
        Some(())
    }
}
