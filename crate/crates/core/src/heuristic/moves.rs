//! The four neighborhood structures and incremental move evaluation.
//!
//! * N1 `Swap`: items `i < j` in different bins exchange bins.
//! * N2 `Relocate`: an item moves to another bin or to a fresh bin.
//! * N3 `SplitPair`: items `i < j` sharing bin `B1` move to `B2` and `B3`
//!   (`B2`, `B3` distinct from `B1`; they may coincide and may be fresh).
//! * N4 `Dissolve`: a bin is removed and its items are repacked first-fit, in
//!   their order inside the bin, into the remaining bins, opening bins only
//!   when nothing fits.
//!
//! Moved items are appended to their target bins and emptied bins are dropped
//! immediately, keeping the relative order of the surviving bins. Fresh bins
//! are appended after the existing ones.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use super::fitness::{
    exact_term_delta, fitness_unchecked, scenario_terms, Fitness, ScenarioTerm, FILTER_EPS,
};
use crate::instance::{Instance, Solution};

/// Destination of a moved item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Bin(usize),
    /// A new bin. `Fresh(1)` is only used next to `Fresh(0)` for N3 moves
    /// that split a pair into two new bins.
    Fresh(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    Swap { i: usize, j: usize },
    Relocate { item: usize, to: Target },
    SplitPair { from: usize, i: usize, j: usize, to_i: Target, to_j: Target },
    Dissolve { bin: usize },
}

impl Move {
    /// Index of the neighborhood structure (1..=4) the move belongs to.
    pub fn neighborhood(&self) -> usize {
        match self {
            Move::Swap { .. } => 1,
            Move::Relocate { .. } => 2,
            Move::SplitPair { .. } => 3,
            Move::Dissolve { .. } => 4,
        }
    }
}

pub const NUM_NEIGHBORHOODS: usize = 4;

fn bin_of(solution: &Solution, n: usize) -> Vec<usize> {
    let mut owner = vec![usize::MAX; n];
    for (b, bin) in solution.bins().iter().enumerate() {
        for &i in bin {
            owner[i] = b;
        }
    }
    owner
}

/// Applies a move to a feasible solution. Returns `None` if the move does not
/// reference the solution correctly or breaks a capacity constraint.
pub fn apply_move(instance: &Instance, solution: &Solution, mv: &Move) -> Option<Solution> {
    let n = instance.num_items();
    let m = solution.num_bins();
    let owner = bin_of(solution, n);
    let mut bins: Vec<Vec<usize>> = solution.bins().to_vec();
    let mut fresh: [Option<usize>; 2] = [None, None];
    let mut touched: Vec<usize> = Vec::with_capacity(3);

    let mut resolve = |t: Target, bins: &mut Vec<Vec<usize>>| -> Option<usize> {
        match t {
            Target::Bin(b) if b < m => Some(b),
            Target::Bin(_) => None,
            Target::Fresh(f) if (f as usize) < 2 => {
                let slot = &mut fresh[f as usize];
                Some(*slot.get_or_insert_with(|| {
                    bins.push(Vec::new());
                    bins.len() - 1
                }))
            }
            Target::Fresh(_) => None,
        }
    };
    let remove = |bins: &mut Vec<Vec<usize>>, b: usize, item: usize| -> Option<()> {
        let pos = bins[b].iter().position(|&x| x == item)?;
        bins[b].remove(pos);
        Some(())
    };

    match *mv {
        Move::Swap { i, j } => {
            if i >= n || j >= n || i == j {
                return None;
            }
            let (bi, bj) = (owner[i], owner[j]);
            if bi == bj || bi == usize::MAX || bj == usize::MAX {
                return None;
            }
            remove(&mut bins, bj, j)?;
            bins[bj].push(i);
            remove(&mut bins, bi, i)?;
            bins[bi].push(j);
            touched.extend([bi, bj]);
        }
        Move::Relocate { item, to } => {
            if item >= n || owner[item] == usize::MAX {
                return None;
            }
            let from = owner[item];
            let t = resolve(to, &mut bins)?;
            if t == from {
                return None;
            }
            remove(&mut bins, from, item)?;
            bins[t].push(item);
            touched.push(t);
        }
        Move::SplitPair {
            from,
            i,
            j,
            to_i,
            to_j,
        } => {
            if from >= m || i >= n || j >= n || i == j || owner[i] != from || owner[j] != from {
                return None;
            }
            let ti = resolve(to_i, &mut bins)?;
            let tj = resolve(to_j, &mut bins)?;
            if ti == from || tj == from {
                return None;
            }
            remove(&mut bins, from, i)?;
            remove(&mut bins, from, j)?;
            bins[ti].push(i);
            bins[tj].push(j);
            touched.extend([ti, tj]);
        }
        Move::Dissolve { bin } => {
            if bin >= m {
                return None;
            }
            let items = bins.remove(bin);
            let w = u64::from(instance.capacity());
            let mut loads: Vec<Vec<u64>> = bins.iter().map(|b| instance.loads_of(b)).collect();
            for item in items {
                let s = u64::from(instance.size(item));
                let ks = instance.scenarios_of(item);
                let target = loads
                    .iter()
                    .position(|l| ks.iter().all(|&k| l[k] + s <= w));
                let t = match target {
                    Some(t) => t,
                    None => {
                        bins.push(Vec::new());
                        loads.push(vec![0; instance.num_scenarios()]);
                        bins.len() - 1
                    }
                };
                bins[t].push(item);
                for &k in ks {
                    loads[t][k] += s;
                }
            }
            return Some(Solution::new(bins));
        }
    }

    for &b in &touched {
        if !instance.fits(&bins[b]) {
            return None;
        }
    }
    bins.retain(|b| !b.is_empty());
    Some(Solution::new(bins))
}

/// Up to two sorted scenario lists merged, yielding `(k, in_first, in_second)`.
struct Union2<'a> {
    a: &'a [usize],
    b: &'a [usize],
}

impl Iterator for Union2<'_> {
    type Item = (usize, bool, bool);

    #[inline]
    fn next(&mut self) -> Option<Self::Item> {
        match (self.a.first(), self.b.first()) {
            (None, None) => None,
            (Some(&x), None) => {
                self.a = &self.a[1..];
                Some((x, true, false))
            }
            (None, Some(&y)) => {
                self.b = &self.b[1..];
                Some((y, false, true))
            }
            (Some(&x), Some(&y)) => match x.cmp(&y) {
                Ordering::Less => {
                    self.a = &self.a[1..];
                    Some((x, true, false))
                }
                Ordering::Greater => {
                    self.b = &self.b[1..];
                    Some((y, false, true))
                }
                Ordering::Equal => {
                    self.a = &self.a[1..];
                    self.b = &self.b[1..];
                    Some((x, true, true))
                }
            },
        }
    }
}

/// An item transfer: `(item, from slot, to slot)`. Slots `m` and `m + 1` are
/// the fresh bins.
type Transfer = (usize, usize, usize);

#[derive(Debug, Clone, Copy)]
struct TermChange {
    old: ScenarioTerm,
    new: ScenarioTerm,
}

pub(crate) enum Visit {
    Continue,
    Stop,
}

/// Incremental evaluation state for one solution.
pub(crate) struct Packing<'a> {
    inst: &'a Instance,
    bins: Vec<Vec<usize>>,
    owner: Vec<usize>,
    loads: Vec<u64>,
    terms: Vec<ScenarioTerm>,
    hist: Vec<u32>,
    max_bins: usize,
    fitness: Fitness,
    w: u64,
    w2: f64,
    changes: Vec<TermChange>,
    last_max: usize,
}

impl<'a> Packing<'a> {
    pub fn new(inst: &'a Instance, solution: &Solution) -> Self {
        let n = inst.num_items();
        let d = inst.num_scenarios();
        let bins = solution.bins().to_vec();
        let owner = bin_of(solution, n);
        let mut loads = vec![0u64; bins.len() * d];
        for (b, bin) in bins.iter().enumerate() {
            for &i in bin {
                let s = u64::from(inst.size(i));
                for &k in inst.scenarios_of(i) {
                    loads[b * d + k] += s;
                }
            }
        }
        let terms = scenario_terms(inst, solution);
        let mut hist = vec![0u32; bins.len() + 3];
        for t in &terms {
            hist[t.bins as usize] += 1;
        }
        let max_bins = terms.iter().map(|t| t.bins as usize).max().unwrap_or(0);
        let fitness = fitness_unchecked(inst, solution);
        let w = u64::from(inst.capacity());
        Packing {
            inst,
            bins,
            owner,
            loads,
            terms,
            hist,
            max_bins,
            fitness,
            w,
            w2: (w * w) as f64,
            changes: Vec::new(),
            last_max: 0,
        }
    }

    pub fn solution(&self) -> Solution {
        Solution::new(self.bins.clone())
    }

    #[inline]
    fn load(&self, slot: usize, k: usize) -> u64 {
        if slot < self.bins.len() {
            self.loads[slot * self.inst.num_scenarios() + k]
        } else {
            0
        }
    }

    #[inline]
    fn fits_alone(&self, item: usize, slot: usize) -> bool {
        if slot >= self.bins.len() {
            return true;
        }
        let s = u64::from(self.inst.size(item));
        let base = slot * self.inst.num_scenarios();
        self.inst
            .scenarios_of(item)
            .iter()
            .all(|&k| self.loads[base + k] + s <= self.w)
    }

    /// Evaluates moving one or two items. On success the per-scenario changes
    /// stay in `self.changes` and the approximate fitness delta is returned.
    fn eval_transfers(&mut self, moved: &[Transfer]) -> Option<f64> {
        debug_assert!(!moved.is_empty() && moved.len() <= 2);
        let mut slots: [usize; 4] = [usize::MAX; 4];
        let mut nslots = 0;
        for &(_, f, t) in moved {
            for s in [f, t] {
                if !slots[..nslots].contains(&s) {
                    slots[nslots] = s;
                    nslots += 1;
                }
            }
        }
        let (ia, fa, ta) = moved[0];
        let (ib, fb, tb) = if moved.len() == 2 { moved[1] } else { (ia, usize::MAX, usize::MAX) };
        let sa = u64::from(self.inst.size(ia));
        let sb = u64::from(self.inst.size(ib));
        let kb: &[usize] = if moved.len() == 2 { self.inst.scenarios_of(ib) } else { &[] };
        let union = Union2 {
            a: self.inst.scenarios_of(ia),
            b: kb,
        };

        self.changes.clear();
        for (k, in_a, in_b) in union {
            let old_t = self.terms[k];
            let mut new_bins = old_t.bins as i64;
            let mut new_sq = old_t.sq_load as i128;
            for &slot in &slots[..nslots] {
                let old = self.load(slot, k);
                let mut new = old as i64;
                if in_a {
                    if slot == fa {
                        new -= sa as i64;
                    }
                    if slot == ta {
                        new += sa as i64;
                    }
                }
                if in_b {
                    if slot == fb {
                        new -= sb as i64;
                    }
                    if slot == tb {
                        new += sb as i64;
                    }
                }
                let new = new as u64;
                if new > self.w {
                    return None;
                }
                if new != old {
                    new_bins += i64::from(new > 0) - i64::from(old > 0);
                    new_sq += (new as i128) * (new as i128) - (old as i128) * (old as i128);
                }
            }
            let new_t = ScenarioTerm {
                bins: new_bins as u64,
                sq_load: new_sq as u64,
            };
            if new_t != old_t {
                self.changes.push(TermChange { old: old_t, new: new_t });
            }
        }

        // new worst-case scenario count from the histogram
        for c in &self.changes {
            self.hist[c.old.bins as usize] -= 1;
            self.hist[c.new.bins as usize] += 1;
        }
        let top = (self.max_bins + 2).min(self.hist.len() - 1);
        let new_max = (0..=top).rev().find(|&h| self.hist[h] > 0).unwrap_or(0);
        for c in &self.changes {
            self.hist[c.new.bins as usize] -= 1;
            self.hist[c.old.bins as usize] += 1;
        }
        self.last_max = new_max;

        let mut delta = new_max as f64 - self.max_bins as f64;
        for c in &self.changes {
            delta -= c.new.approx(self.w2) - c.old.approx(self.w2);
        }
        Some(delta)
    }

    /// Exact delta of the last successful [`Self::eval_transfers`] call.
    fn last_exact_delta(&self) -> BigRational {
        let w = BigInt::from(self.w);
        let w2 = &w * &w;
        let mut acc = BigRational::from_integer(BigInt::from(self.last_max as i64 - self.max_bins as i64));
        for c in &self.changes {
            acc -= exact_term_delta(c.old, c.new, &w2);
        }
        acc
    }

    fn last_is_noop(&self) -> bool {
        self.changes.is_empty() && self.last_max == self.max_bins
    }

    fn slot_target(&self, slot: usize) -> Target {
        let m = self.bins.len();
        if slot < m {
            Target::Bin(slot)
        } else {
            Target::Fresh((slot - m) as u8)
        }
    }

    fn target_slot(&self, t: Target) -> usize {
        match t {
            Target::Bin(b) => b,
            Target::Fresh(f) => self.bins.len() + f as usize,
        }
    }

    fn transfers_of(&self, mv: &Move) -> Option<([Transfer; 2], usize)> {
        match *mv {
            Move::Swap { i, j } => {
                let (bi, bj) = (self.owner[i], self.owner[j]);
                Some(([(i, bi, bj), (j, bj, bi)], 2))
            }
            Move::Relocate { item, to } => {
                let f = self.owner[item];
                Some(([(item, f, self.target_slot(to)), (0, 0, 0)], 1))
            }
            Move::SplitPair { from, i, j, to_i, to_j } => Some((
                [(i, from, self.target_slot(to_i)), (j, from, self.target_slot(to_j))],
                2,
            )),
            Move::Dissolve { .. } => None,
        }
    }

    /// Exact fitness delta of an N1..N3 move (re-evaluates it).
    fn exact_delta_of(&mut self, mv: &Move) -> BigRational {
        let (tr, len) = self.transfers_of(mv).expect("transfer move");
        self.eval_transfers(&tr[..len]).expect("feasible move");
        self.last_exact_delta()
    }

    /// Visits the feasible moves of neighborhood `kappa` in enumeration order.
    /// For N1..N3 the callback receives the approximate fitness delta; the
    /// exact change is available through `last_exact_delta` until the next
    /// evaluation.
    pub fn visit<F>(&mut self, kappa: usize, mut f: F)
    where
        F: FnMut(&mut Self, Move, Option<f64>) -> Visit,
    {
        let n = self.inst.num_items();
        let m = self.bins.len();
        match kappa {
            1 => {
                for i in 0..n {
                    for j in (i + 1)..n {
                        let (bi, bj) = (self.owner[i], self.owner[j]);
                        if bi == bj {
                            continue;
                        }
                        if let Some(delta) = self.eval_transfers(&[(i, bi, bj), (j, bj, bi)]) {
                            if let Visit::Stop = f(self, Move::Swap { i, j }, Some(delta)) {
                                return;
                            }
                        }
                    }
                }
            }
            2 => {
                for item in 0..n {
                    let from = self.owner[item];
                    for slot in 0..=m {
                        if slot == from || !self.fits_alone(item, slot) {
                            continue;
                        }
                        if let Some(delta) = self.eval_transfers(&[(item, from, slot)]) {
                            let mv = Move::Relocate {
                                item,
                                to: self.slot_target(slot),
                            };
                            if let Visit::Stop = f(self, mv, Some(delta)) {
                                return;
                            }
                        }
                    }
                }
            }
            3 => {
                for from in 0..m {
                    if self.bins[from].len() < 2 {
                        continue;
                    }
                    let mut members = self.bins[from].clone();
                    members.sort_unstable();
                    for a in 0..members.len() {
                        for b in (a + 1)..members.len() {
                            let (i, j) = (members[a], members[b]);
                            for t2 in 0..=m {
                                if t2 == from || !self.fits_alone(i, t2) {
                                    continue;
                                }
                                let last = if t2 == m { m + 1 } else { m };
                                for t3 in 0..=last {
                                    if t3 == from || !self.fits_alone(j, t3) {
                                        continue;
                                    }
                                    if let Some(delta) =
                                        self.eval_transfers(&[(i, from, t2), (j, from, t3)])
                                    {
                                        let mv = Move::SplitPair {
                                            from,
                                            i,
                                            j,
                                            to_i: self.slot_target(t2),
                                            to_j: self.slot_target(t3),
                                        };
                                        if let Visit::Stop = f(self, mv, Some(delta)) {
                                            return;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
            4 => {
                for bin in 0..m {
                    if let Visit::Stop = f(self, Move::Dissolve { bin }, None) {
                        return;
                    }
                }
            }
            _ => panic!("neighborhood index {kappa} outside 1..=4"),
        }
    }

    /// Best strictly improving move of neighborhood `kappa`, ties broken by
    /// enumeration order. `deadline` aborts the scan early.
    pub fn best_improving(
        &mut self,
        kappa: usize,
        deadline: Option<std::time::Instant>,
    ) -> Option<(Move, Solution)> {
        let mut counter = 0u32;
        let expired = |counter: &mut u32| -> bool {
            *counter += 1;
            if !(*counter).is_multiple_of(1024) {
                return false;
            }
            deadline.is_some_and(|d| std::time::Instant::now() >= d)
        };

        if kappa == NUM_NEIGHBORHOODS {
            let current = self.fitness.clone();
            let mut best: Option<(Move, Solution, Fitness)> = None;
            let inst = self.inst;
            self.visit(kappa, |me, mv, _| {
                if let Some(next) = apply_move(inst, &me.solution(), &mv) {
                    let f = fitness_unchecked(inst, &next);
                    let improves = f.is_better_than(best.as_ref().map_or(&current, |b| &b.2));
                    if improves {
                        best = Some((mv, next, f));
                    }
                }
                if expired(&mut counter) {
                    Visit::Stop
                } else {
                    Visit::Continue
                }
            });
            return best.map(|(mv, s, _)| (mv, s));
        }

        struct Best {
            mv: Move,
            approx: f64,
            exact: Option<BigRational>,
        }
        let mut best: Option<Best> = None;
        self.visit(kappa, |me, mv, delta| {
            let d = delta.expect("transfer delta");
            let mut exact: Option<BigRational> = None;
            let improving = if d < -FILTER_EPS {
                true
            } else if d > FILTER_EPS || me.last_is_noop() {
                false
            } else {
                let e = me.last_exact_delta();
                let neg = e.is_negative();
                exact = Some(e);
                neg
            };
            if improving {
                let replace = match &mut best {
                    None => true,
                    Some(b) => {
                        if d < b.approx - FILTER_EPS {
                            true
                        } else if d > b.approx + FILTER_EPS {
                            false
                        } else {
                            let e = exact.take().unwrap_or_else(|| me.last_exact_delta());
                            let be = match b.exact.take() {
                                Some(x) => x,
                                None => me.exact_delta_of(&b.mv),
                            };
                            let better = e < be;
                            b.exact = Some(be);
                            exact = Some(e);
                            better
                        }
                    }
                };
                if replace {
                    best = Some(Best {
                        mv,
                        approx: d,
                        exact,
                    });
                }
            }
            if expired(&mut counter) {
                Visit::Stop
            } else {
                Visit::Continue
            }
        });
        let b = best?;
        let next = apply_move(self.inst, &self.solution(), &b.mv).expect("evaluated move applies");
        Some((b.mv, next))
    }

    pub fn count_moves(&mut self, kappa: usize) -> usize {
        let mut count = 0usize;
        self.visit(kappa, |_, _, _| {
            count += 1;
            Visit::Continue
        });
        count
    }

    pub fn nth_move(&mut self, kappa: usize, index: usize) -> Option<Move> {
        let mut seen = 0usize;
        let mut found = None;
        self.visit(kappa, |_, mv, _| {
            if seen == index {
                found = Some(mv);
                return Visit::Stop;
            }
            seen += 1;
            Visit::Continue
        });
        found
    }

    #[cfg(test)]
    pub(crate) fn eval_delta(&mut self, mv: &Move) -> Option<BigRational> {
        let (tr, len) = self.transfers_of(mv)?;
        self.eval_transfers(&tr[..len])?;
        Some(self.last_exact_delta())
    }
}

/// All feasible moves of neighborhood `kappa` (1..=4), in enumeration order.
pub fn enumerate_neighbors(
    instance: &Instance,
    solution: &Solution,
    kappa: usize,
) -> impl Iterator<Item = Move> {
    assert!((1..=NUM_NEIGHBORHOODS).contains(&kappa), "kappa must be in 1..=4");
    let mut packing = Packing::new(instance, solution);
    let mut moves = Vec::new();
    packing.visit(kappa, |_, mv, _| {
        moves.push(mv);
        Visit::Continue
    });
    moves.into_iter()
}
