//! Small packed GF(2) matrix used for ranks and linear solves.

#[derive(Clone, Debug)]
pub(crate) struct BitMatrix {
    cols: usize,
    rows: Vec<Vec<u64>>,
}

impl BitMatrix {
    pub fn new(cols: usize) -> Self {
        Self {
            cols,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, bits: impl IntoIterator<Item = usize>) {
        let mut row = vec![0u64; self.cols.div_ceil(64).max(1)];
        for b in bits {
            debug_assert!(b < self.cols);
            row[b >> 6] ^= 1 << (b & 63);
        }
        self.rows.push(row);
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.rows[r][c >> 6] >> (c & 63)) & 1 == 1
    }

    fn xor_rows(&mut self, dst: usize, src: usize) {
        let (a, b) = if dst < src {
            let (lo, hi) = self.rows.split_at_mut(src);
            (&mut lo[dst], &hi[0])
        } else {
            let (lo, hi) = self.rows.split_at_mut(dst);
            (&mut hi[0], &lo[src])
        };
        for (x, y) in a.iter_mut().zip(b) {
            *x ^= y;
        }
    }

    /// Reduced row echelon form over the first `upto` columns. Returns the
    /// pivot column of each leading row.
    pub fn reduce(&mut self, upto: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..upto {
            if r == self.rows.len() {
                break;
            }
            let Some(p) = (r..self.rows.len()).find(|&i| self.get(i, c)) else {
                continue;
            };
            self.rows.swap(r, p);
            for i in 0..self.rows.len() {
                if i != r && self.get(i, c) {
                    self.xor_rows(i, r);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(mut self) -> usize {
        let cols = self.cols;
        self.reduce(cols).len()
    }
}
