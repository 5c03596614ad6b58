//! Incremental per-pair and per-object bookkeeping for the partition.
//!
//! Each unordered pair keeps how many criteria are known and how many favour
//! each side. From those counts follow, per pair, whether one object
//! dominates the other and whether an object is safe from the other (some
//! criterion favours it, or every criterion is recorded indifferent). An
//! object is dominated when some other object dominates it and confirmed
//! when it is safe from all others.

use crate::order::{ObjectId, Outcome, Partition};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Status {
    Unknown,
    Confirmed,
    Dominated,
}

#[derive(Debug, Clone, Copy, Default)]
struct PairStat {
    known: u16,
    lo_better: u16,
    hi_better: u16,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct PairFlags {
    lo_dominates: bool,
    hi_dominates: bool,
    lo_safe: bool,
    hi_safe: bool,
}

#[derive(Debug, Clone)]
pub(crate) struct Tracker {
    n: usize,
    criteria: u16,
    pairs: Vec<PairStat>,
    dominated_by: Vec<u32>,
    safe_from: Vec<u32>,
    dominates: Vec<u32>,
    status: Vec<Status>,
    unknown: usize,
    confirmed: usize,
}

#[inline]
fn tri(lo: usize, hi: usize) -> usize {
    hi * (hi - 1) / 2 + lo
}

impl PairStat {
    fn flags(self, criteria: u16) -> PairFlags {
        let complete = self.known == criteria;
        let all_indifferent = complete && self.lo_better == 0 && self.hi_better == 0;
        PairFlags {
            lo_dominates: complete && self.lo_better > 0 && self.hi_better == 0,
            hi_dominates: complete && self.hi_better > 0 && self.lo_better == 0,
            lo_safe: self.lo_better > 0 || all_indifferent,
            hi_safe: self.hi_better > 0 || all_indifferent,
        }
    }
}

impl Tracker {
    pub(crate) fn new(n: usize, criteria: usize) -> Self {
        let initial = if n <= 1 { Status::Confirmed } else { Status::Unknown };
        Tracker {
            n,
            criteria: criteria as u16,
            pairs: vec![PairStat::default(); n * n.saturating_sub(1) / 2],
            dominated_by: vec![0; n],
            safe_from: vec![0; n],
            dominates: vec![0; n],
            status: vec![initial; n],
            unknown: if n <= 1 { 0 } else { n },
            confirmed: if n <= 1 { n } else { 0 },
        }
    }

    pub(crate) fn n(&self) -> usize {
        self.n
    }

    pub(crate) fn criteria(&self) -> usize {
        self.criteria as usize
    }

    #[inline]
    pub(crate) fn status(&self, x: usize) -> Status {
        self.status[x]
    }

    pub(crate) fn unknown_count(&self) -> usize {
        self.unknown
    }

    /// Number of objects `x` dominates so far.
    #[inline]
    pub(crate) fn dominance_count(&self, x: usize) -> u32 {
        self.dominates[x]
    }

    /// Criteria with a known outcome for the pair.
    #[inline]
    pub(crate) fn known(&self, a: usize, b: usize) -> u16 {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.pairs[tri(lo, hi)].known
    }

    /// Criteria on which `x` is known to be better than `y`.
    #[inline]
    pub(crate) fn better_count(&self, x: usize, y: usize) -> u16 {
        if x < y {
            self.pairs[tri(x, y)].lo_better
        } else {
            self.pairs[tri(y, x)].hi_better
        }
    }

    /// Macro tier (0 or 1) and open criteria of the oriented candidate
    /// question group `x ? y`, or `None` when it holds no candidate question.
    #[inline]
    pub(crate) fn candidate(&self, x: usize, y: usize, use_mo: bool) -> Option<(u8, u16)> {
        if self.status[x] != Status::Unknown || self.better_count(x, y) > 0 {
            return None;
        }
        let open = self.criteria - self.known(x, y);
        if open == 0 {
            return None;
        }
        let tier = u8::from(use_mo && self.status[y] == Status::Dominated);
        Some((tier, open))
    }

    /// Records one new fact for the pair `x ? y`, oriented as given. Objects
    /// whose status changed are appended to `changed`.
    pub(crate) fn record(&mut self, x: usize, y: usize, outcome: Outcome, changed: &mut Vec<usize>) {
        let (lo, hi, outcome) = if x < y {
            (x, y, outcome)
        } else {
            (y, x, outcome.flipped())
        };
        let stat = &mut self.pairs[tri(lo, hi)];
        let before = stat.flags(self.criteria);
        stat.known += 1;
        match outcome {
            Outcome::XBetter => stat.lo_better += 1,
            Outcome::YBetter => stat.hi_better += 1,
            Outcome::Indifferent => {}
        }
        debug_assert!(stat.known <= self.criteria);
        let after = stat.flags(self.criteria);
        if before == after {
            return;
        }
        if before.lo_dominates != after.lo_dominates {
            self.dominates[lo] += 1;
            self.dominated_by[hi] += 1;
        }
        if before.hi_dominates != after.hi_dominates {
            self.dominates[hi] += 1;
            self.dominated_by[lo] += 1;
        }
        if before.lo_safe != after.lo_safe {
            self.safe_from[lo] += 1;
        }
        if before.hi_safe != after.hi_safe {
            self.safe_from[hi] += 1;
        }
        self.refresh(lo, changed);
        self.refresh(hi, changed);
    }

    fn refresh(&mut self, z: usize, changed: &mut Vec<usize>) {
        let status = if self.dominated_by[z] > 0 {
            Status::Dominated
        } else if self.safe_from[z] as usize == self.n - 1 {
            Status::Confirmed
        } else {
            Status::Unknown
        };
        let old = self.status[z];
        if old != status {
            debug_assert_eq!(old, Status::Unknown, "settled objects never change status");
            self.status[z] = status;
            self.unknown -= 1;
            if status == Status::Confirmed {
                self.confirmed += 1;
            }
            changed.push(z);
        }
    }

    pub(crate) fn sizes(&self) -> [usize; 3] {
        [self.confirmed, self.unknown, self.n - self.confirmed - self.unknown]
    }

    pub(crate) fn partition(&self) -> Partition {
        let mut part = Partition::default();
        for (i, s) in self.status.iter().enumerate() {
            let id = ObjectId::from(i);
            match s {
                Status::Unknown => part.unknown.push(id),
                Status::Confirmed => part.confirmed.push(id),
                Status::Dominated => part.dominated.push(id),
            }
        }
        part
    }
}
