//! Dense square bit matrix, one row of `u64` words per object.

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct BitMatrix {
    n: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub(crate) fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BitMatrix {
            n,
            words,
            data: vec![0; n * words],
        }
    }

    #[inline]
    pub(crate) fn get(&self, row: usize, col: usize) -> bool {
        debug_assert!(row < self.n && col < self.n);
        self.data[row * self.words + col / 64] >> (col % 64) & 1 == 1
    }

    #[inline]
    pub(crate) fn set(&mut self, row: usize, col: usize) {
        self.data[row * self.words + col / 64] |= 1 << (col % 64);
    }

    #[inline]
    pub(crate) fn clear(&mut self, row: usize, col: usize) {
        self.data[row * self.words + col / 64] &= !(1 << (col % 64));
    }

    /// `row |= other`.
    pub(crate) fn or_row(&mut self, row: usize, other: &[u64]) {
        let start = row * self.words;
        for (w, o) in self.data[start..start + self.words].iter_mut().zip(other) {
            *w |= o;
        }
    }

    /// `row |= other`, calling `fresh` with each column that was not yet set.
    pub(crate) fn or_row_fresh(&mut self, row: usize, other: &[u64], mut fresh: impl FnMut(usize)) {
        let start = row * self.words;
        for (i, (w, &o)) in self.data[start..start + self.words].iter_mut().zip(other).enumerate() {
            let mut new = o & !*w;
            *w |= new;
            while new != 0 {
                fresh(i * 64 + new.trailing_zeros() as usize);
                new &= new - 1;
            }
        }
    }

    /// First column set in both `row` and `mask`.
    #[inline]
    pub(crate) fn first_common(&self, row: usize, mask: &[u64]) -> Option<usize> {
        self.row(row)
            .iter()
            .zip(mask)
            .enumerate()
            .find(|(_, (a, b))| *a & *b != 0)
            .map(|(i, (a, b))| i * 64 + (a & b).trailing_zeros() as usize)
    }

    #[inline]
    pub(crate) fn row(&self, row: usize) -> &[u64] {
        &self.data[row * self.words..(row + 1) * self.words]
    }

    pub(crate) fn row_count(&self, row: usize) -> usize {
        self.row(row).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Indices of set bits in `row`.
    pub(crate) fn iter_row(&self, row: usize) -> impl Iterator<Item = usize> + '_ {
        iter_bits(self.row(row))
    }
}

pub(crate) fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(i, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            }
        })
    })
}
