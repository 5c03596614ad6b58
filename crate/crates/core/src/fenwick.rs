//! Fenwick tree over non-negative weights with weighted rank search.

#[derive(Debug, Clone)]
pub(crate) struct Fenwick {
    tree: Vec<u64>,
    values: Vec<u32>,
    total: u64,
}

impl Fenwick {
    pub(crate) fn new(len: usize) -> Self {
        Fenwick {
            tree: vec![0; len + 1],
            values: vec![0; len],
            total: 0,
        }
    }

    pub(crate) fn total(&self) -> u64 {
        self.total
    }

    pub(crate) fn set(&mut self, i: usize, value: u32) {
        let old = self.values[i];
        if old == value {
            return;
        }
        self.values[i] = value;
        self.total = self.total + value as u64 - old as u64;
        let mut k = i + 1;
        while k < self.tree.len() {
            self.tree[k] = self.tree[k] + value as u64 - old as u64;
            k += k & k.wrapping_neg();
        }
    }

    /// Index `i` whose weight interval contains `rank`, i.e. the smallest `i`
    /// with `prefix(i + 1) > rank`, together with `rank - prefix(i)`.
    pub(crate) fn find(&self, rank: u64) -> (usize, u64) {
        debug_assert!(rank < self.total);
        let len = self.tree.len() - 1;
        let mut pos = 0;
        let mut rest = rank;
        let mut step = if len == 0 { 0 } else { 1 << (usize::BITS - 1 - len.leading_zeros()) };
        while step > 0 {
            let next = pos + step;
            if next <= len && self.tree[next] <= rest {
                pos = next;
                rest -= self.tree[next];
            }
            step >>= 1;
        }
        (pos, rest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn find_walks_weights() {
        let mut f = Fenwick::new(5);
        f.set(1, 2);
        f.set(3, 3);
        assert_eq!(f.total(), 5);
        assert_eq!(f.find(0), (1, 0));
        assert_eq!(f.find(1), (1, 1));
        assert_eq!(f.find(2), (3, 0));
        assert_eq!(f.find(4), (3, 2));
        f.set(1, 0);
        assert_eq!(f.find(0), (3, 0));
    }

    proptest! {
        #[test]
        fn find_matches_linear_scan(weights in proptest::collection::vec(0u32..4, 1..40), pick in 0u64..1000) {
            let mut f = Fenwick::new(weights.len());
            for (i, &w) in weights.iter().enumerate() {
                f.set(i, w);
            }
            let total: u64 = weights.iter().map(|&w| w as u64).sum();
            prop_assert_eq!(f.total(), total);
            if total > 0 {
                let rank = pick % total;
                let mut acc = 0u64;
                let mut expect = None;
                for (i, &w) in weights.iter().enumerate() {
                    if rank < acc + w as u64 {
                        expect = Some((i, rank - acc));
                        break;
                    }
                    acc += w as u64;
                }
                prop_assert_eq!(Some(f.find(rank)), expect);
            }
        }
    }
}
