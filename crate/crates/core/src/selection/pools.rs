//! Incrementally maintained question pools, one kind per strategy.
//!
//! Each pool draws the same question the reference functions in the parent
//! module would draw for the same random numbers: weighted rank search over
//! pairs in `(x, y)` order stands in for indexing into the sorted candidate
//! list.

use rand::Rng;

use super::tracker::{Status, Tracker};
use super::{PairState, Strategy, StrategyKind};
use crate::bits::{iter_bits, BitMatrix};
use crate::fenwick::Fenwick;
use crate::order::{CriterionId, KnowledgeBase, ObjectId, Question};

#[derive(Debug, Clone)]
pub(crate) enum Pool {
    /// Candidate questions weighted per ordered pair.
    Questions(TieredFenwick),
    /// Unordered pairs holding at least one candidate question.
    Pairs(TieredFenwick),
    Frq(FrqPool),
    /// Every unknown comparison, per unordered pair.
    Open(TieredFenwick),
    BruteForce,
}

/// Two Fenwick trees over `n * n` pair slots, one per macro tier.
#[derive(Debug, Clone)]
pub(crate) struct TieredFenwick {
    n: usize,
    tiers: [Fenwick; 2],
}

impl TieredFenwick {
    fn new(n: usize) -> Self {
        TieredFenwick {
            n,
            tiers: [Fenwick::new(n * n), Fenwick::new(n * n)],
        }
    }

    fn put(&mut self, slot: usize, entry: Option<(u8, u32)>) {
        let (t, w) = entry.unwrap_or((0, 0));
        self.tiers[t as usize].set(slot, w);
        self.tiers[1 - t as usize].set(slot, 0);
    }

    fn total(&self) -> u64 {
        self.tiers[0].total() + self.tiers[1].total()
    }

    /// Draws from the first non-empty tier: the slot as `(a, b)` and the
    /// offset within its weight.
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<(usize, usize, u64)> {
        let tier = self.tiers.iter().find(|f| f.total() > 0)?;
        let r = rng.gen_range(0..tier.total());
        let (slot, offset) = tier.find(r);
        Some((slot / self.n, slot % self.n, offset))
    }
}

#[derive(Debug, Clone)]
pub(crate) struct FrqPool {
    n: usize,
    criteria: usize,
    /// `buckets[tier * criteria + open - 1]` row `x` has bit `y` when `x ? y`
    /// holds exactly `open` candidate questions in `tier`.
    buckets: Vec<BitMatrix>,
    /// Set bits per bucket and row.
    row_counts: Vec<Vec<u32>>,
    totals: Vec<u64>,
    /// Bucket index + 1 per ordered pair, 0 for none.
    slot: Vec<u16>,
}

impl FrqPool {
    fn new(n: usize, criteria: usize) -> Self {
        let buckets = 2 * criteria;
        FrqPool {
            n,
            criteria,
            buckets: (0..buckets).map(|_| BitMatrix::new(n)).collect(),
            row_counts: vec![vec![0; n]; buckets],
            totals: vec![0; buckets],
            slot: vec![0; n * n],
        }
    }

    fn put(&mut self, x: usize, y: usize, entry: Option<(u8, u16)>) {
        let new = entry.map_or(0, |(t, open)| (t as usize * self.criteria + open as usize) as u16);
        let idx = x * self.n + y;
        let old = self.slot[idx];
        if old == new {
            return;
        }
        if old > 0 {
            let b = old as usize - 1;
            self.buckets[b].clear(x, y);
            self.row_counts[b][x] -= 1;
            self.totals[b] -= 1;
        }
        if new > 0 {
            let b = new as usize - 1;
            self.buckets[b].set(x, y);
            self.row_counts[b][x] += 1;
            self.totals[b] += 1;
        }
        self.slot[idx] = new;
    }

    fn total(&self) -> u64 {
        self.totals.iter().sum()
    }

    /// Ordered pair with the fewest candidate questions in the first
    /// non-empty tier; ties to the smallest dominance count of `x`, then the
    /// largest of `y`, then the smallest `(x, y)`.
    fn best_pair(&self, tracker: &Tracker) -> Option<(usize, usize)> {
        let b = self.totals.iter().position(|&t| t > 0)?;
        let counts = &self.row_counts[b];
        let min_d = (0..self.n)
            .filter(|&x| counts[x] > 0)
            .map(|x| tracker.dominance_count(x))
            .min()?;
        let xs: Vec<usize> = (0..self.n)
            .filter(|&x| counts[x] > 0 && tracker.dominance_count(x) == min_d)
            .collect();
        let bucket = &self.buckets[b];
        let words = bucket.row(0).len();
        let mut reach = vec![0u64; words];
        for &x in &xs {
            for (r, w) in reach.iter_mut().zip(bucket.row(x)) {
                *r |= w;
            }
        }
        let max_d = iter_bits(&reach).map(|y| tracker.dominance_count(y)).max()?;
        let mut top = vec![0u64; words];
        for y in iter_bits(&reach) {
            if tracker.dominance_count(y) == max_d {
                top[y / 64] |= 1 << (y % 64);
            }
        }
        xs.into_iter().find_map(|x| {
            let hit: Vec<u64> = bucket.row(x).iter().zip(&top).map(|(a, b)| a & b).collect();
            let first = iter_bits(&hit).next();
            first.map(|y| (x, y))
        })
    }
}

impl Pool {
    pub(crate) fn new(strategy: Strategy, n: usize, criteria: usize) -> Self {
        match strategy.kind() {
            StrategyKind::BruteForce => Pool::BruteForce,
            StrategyKind::Frq => Pool::Frq(FrqPool::new(n, criteria)),
            StrategyKind::RandomP => Pool::Pairs(TieredFenwick::new(n)),
            StrategyKind::RandomQ if strategy.use_cq() => Pool::Questions(TieredFenwick::new(n)),
            StrategyKind::RandomQ => Pool::Open(TieredFenwick::new(n)),
        }
    }

    /// Re-evaluates both orientations of the pair after a change to it or to
    /// the status of either object.
    pub(crate) fn touch(&mut self, tracker: &Tracker, a: usize, b: usize, use_mo: bool) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        match self {
            Pool::BruteForce => {}
            Pool::Questions(f) => {
                for (x, y) in [(lo, hi), (hi, lo)] {
                    let e = tracker.candidate(x, y, use_mo).map(|(t, k)| (t, k as u32));
                    f.put(x * f.n + y, e);
                }
            }
            Pool::Pairs(f) => {
                let e = pair_tier(tracker, lo, hi, use_mo).map(|t| (t, 1));
                f.put(lo * f.n + hi, e);
            }
            Pool::Frq(p) => {
                p.put(lo, hi, tracker.candidate(lo, hi, use_mo));
                p.put(hi, lo, tracker.candidate(hi, lo, use_mo));
            }
            Pool::Open(f) => {
                let open = (tracker.criteria() - tracker.known(lo, hi) as usize) as u32;
                let low = use_mo
                    && tracker.status(lo) == Status::Dominated
                    && tracker.status(hi) == Status::Dominated;
                let e = (open > 0).then_some((u8::from(low), open));
                f.put(lo * f.n + hi, e);
            }
        }
    }

    /// Whether any candidate question is left; `None` for pools that do not
    /// track candidate questions.
    pub(crate) fn has_candidates(&self) -> Option<bool> {
        match self {
            Pool::Questions(f) | Pool::Pairs(f) => Some(f.total() > 0),
            Pool::Frq(p) => Some(p.total() > 0),
            Pool::Open(_) | Pool::BruteForce => None,
        }
    }

    pub(crate) fn select<R: Rng + ?Sized>(
        &self,
        kb: &KnowledgeBase,
        tracker: &Tracker,
        state: Option<&PairState>,
        use_mo: bool,
        rng: &mut R,
    ) -> Option<(Question, Option<PairState>)> {
        match self {
            Pool::BruteForce => None,
            Pool::Questions(f) | Pool::Open(f) => {
                let (x, y, offset) = f.draw(rng)?;
                let c = nth_open_criterion(kb, x, y, offset as usize);
                Some((Question::new(x, y, c), None))
            }
            Pool::Pairs(f) => {
                let sticky = state
                    .map(|s| (s.x.index(), s.y.index()))
                    .filter(|&(lo, hi)| pair_tier(tracker, lo, hi, use_mo).is_some());
                let (lo, hi) = match sticky {
                    Some(p) => p,
                    None => {
                        let (lo, hi, _) = f.draw(rng)?;
                        (lo, hi)
                    }
                };
                let open = open_criteria(kb, lo, hi);
                let c = open[rng.gen_range(0..open.len() as u64) as usize];
                let fwd = tracker.candidate(lo, hi, use_mo).map(|(t, _)| t);
                let rev = tracker.candidate(hi, lo, use_mo).map(|(t, _)| t);
                let (x, y) = match (fwd, rev) {
                    (Some(a), Some(b)) if b < a => (hi, lo),
                    (None, Some(_)) => (hi, lo),
                    _ => (lo, hi),
                };
                let remaining = open.into_iter().filter(|&k| k != c).collect();
                Some((
                    Question { x: ObjectId::from(x), y: ObjectId::from(y), c },
                    Some(PairState {
                        x: ObjectId::from(lo),
                        y: ObjectId::from(hi),
                        remaining,
                    }),
                ))
            }
            Pool::Frq(p) => {
                let sticky = state
                    .map(|s| (s.x.index(), s.y.index()))
                    .filter(|&(x, y)| tracker.candidate(x, y, use_mo).is_some());
                let (x, y) = match sticky {
                    Some(pair) => pair,
                    None => p.best_pair(tracker)?,
                };
                let (x, y) = (ObjectId::from(x), ObjectId::from(y));
                let mut open = open_criteria(kb, x.index(), y.index());
                super::order_criteria(kb, x, y, &mut open);
                let c = open.remove(0);
                Some((Question { x, y, c }, Some(PairState { x, y, remaining: open })))
            }
        }
    }
}

/// Lowest tier over both orientations of the pair, if any holds a candidate.
fn pair_tier(tracker: &Tracker, lo: usize, hi: usize, use_mo: bool) -> Option<u8> {
    let fwd = tracker.candidate(lo, hi, use_mo).map(|(t, _)| t);
    let rev = tracker.candidate(hi, lo, use_mo).map(|(t, _)| t);
    match (fwd, rev) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

fn open_criteria(kb: &KnowledgeBase, a: usize, b: usize) -> Vec<CriterionId> {
    (0..kb.criterion_count())
        .map(CriterionId::from)
        .filter(|&c| kb.outcome_of(a.into(), b.into(), c).is_none())
        .collect()
}

fn nth_open_criterion(kb: &KnowledgeBase, a: usize, b: usize, nth: usize) -> CriterionId {
    (0..kb.criterion_count())
        .map(CriterionId::from)
        .filter(|&c| kb.outcome_of(a.into(), b.into(), c).is_none())
        .nth(nth)
        .expect("pool weight matches open criteria")
}
