//! Enumeration over classes of interchangeable candidates.
//!
//! A search space is a list of blocks; each block offers some groups of
//! candidates and must contribute exactly `take` of them. Candidates inside a
//! group are interchangeable for the score, so only per-group counts are
//! enumerated.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::profile::{CandidateClasses, SetProfile};

use super::Objective;

/// Per-type score tables scaled to integers: a voter of type `t` with `j`
/// members of the committee in their set adds `table[t][j] / scale`.
pub(crate) struct Scaled {
    pub scale: i128,
    pub table: Vec<Vec<i128>>,
    pub mult: Vec<i128>,
}

impl Scaled {
    pub fn new(objective: Objective, profile: &SetProfile, k: usize) -> Result<Self> {
        let overflow = || Error::invalid("exact score scale exceeds the 128-bit range");
        let scale = match objective {
            Objective::Pav => crate::numeric::lcm_upto(k).ok_or_else(overflow)?,
            Objective::Sav => {
                use num_integer::Integer;
                let mut acc: i128 = 1;
                for (s, _) in profile.types() {
                    let a = s.count_ones(..) as i128;
                    if a > 0 {
                        acc = (acc / acc.gcd(&a)).checked_mul(a).ok_or_else(overflow)?;
                    }
                }
                acc
            }
            _ => 1,
        };
        let mut table = Vec::with_capacity(profile.type_count());
        let mut mult = Vec::with_capacity(profile.type_count());
        let mut bound: i128 = 0;
        for (s, count) in profile.types() {
            let size = s.count_ones(..);
            let mut row = Vec::with_capacity(k + 1);
            let mut acc: i128 = 0;
            for j in 0..=k {
                let v = match objective {
                    Objective::Av => j as i128,
                    Objective::Cc => (j > 0) as i128,
                    Objective::Lcc(l) => j.min(l) as i128,
                    Objective::Pav => {
                        if j > 0 {
                            acc = acc.checked_add(scale / j as i128).ok_or_else(overflow)?;
                        }
                        acc
                    }
                    Objective::Sav => {
                        if size == 0 {
                            0
                        } else {
                            (j as i128).checked_mul(scale / size as i128).ok_or_else(overflow)?
                        }
                    }
                };
                row.push(v);
            }
            let c = count as i128;
            bound = bound.checked_add(row[k].checked_mul(c).ok_or_else(overflow)?).ok_or_else(overflow)?;
            table.push(row);
            mult.push(c);
        }
        Ok(Scaled { scale, table, mult })
    }

    pub fn to_rational(&self, v: i128) -> BigRational {
        BigRational::new(BigInt::from(v), BigInt::from(self.scale))
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Group {
    pub members: Vec<usize>,
    pub holders: Vec<usize>,
}

#[derive(Clone, Debug)]
pub(crate) struct BlockSpec {
    pub groups: Vec<Group>,
    pub take: usize,
}

/// Flattened search space.
pub(crate) struct Space<'a> {
    groups: Vec<Group>,
    block_of: Vec<usize>,
    take: Vec<usize>,
    first_of_block: Vec<bool>,
    tail_cap: Vec<usize>,
    scaled: &'a Scaled,
}

#[derive(Clone, Debug)]
struct State {
    counts: Vec<usize>,
    score: i128,
    chosen: Vec<usize>,
    remaining: usize,
}

impl<'a> Space<'a> {
    pub fn new(blocks: Vec<BlockSpec>, scaled: &'a Scaled) -> Self {
        let mut groups = Vec::new();
        let mut block_of = Vec::new();
        let mut take = Vec::new();
        let mut first_of_block = Vec::new();
        for (b, spec) in blocks.into_iter().enumerate() {
            take.push(spec.take);
            for (i, g) in spec.groups.into_iter().enumerate() {
                first_of_block.push(i == 0);
                block_of.push(b);
                groups.push(g);
            }
        }
        let mut tail_cap = vec![0; groups.len() + 1];
        for g in (0..groups.len()).rev() {
            let same_next = g + 1 < groups.len() && block_of[g + 1] == block_of[g];
            tail_cap[g] = groups[g].members.len() + if same_next { tail_cap[g + 1] } else { 0 };
        }
        Space {
            groups,
            block_of,
            take,
            first_of_block,
            tail_cap,
            scaled,
        }
    }

    /// A single block asking for `k` of all candidates.
    pub fn whole(profile: &SetProfile, k: usize, scaled: &'a Scaled) -> Self {
        let classes = CandidateClasses::of(profile);
        let groups = classes
            .members
            .into_iter()
            .zip(classes.holders)
            .map(|(members, holders)| Group { members, holders })
            .collect();
        Space::new(vec![BlockSpec { groups, take: k }], scaled)
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    /// Blocks whose pools cannot supply `take` make the space empty.
    fn feasible(&self) -> bool {
        let mut cap = vec![0usize; self.take.len()];
        for (g, grp) in self.groups.iter().enumerate() {
            cap[self.block_of[g]] += grp.members.len();
        }
        cap.iter().zip(&self.take).all(|(c, t)| c >= t)
    }

    /// Number of count vectors the search visits, saturating.
    pub fn size(&self) -> u128 {
        if !self.feasible() {
            return 0;
        }
        let mut total: u128 = 1;
        let mut g = 0;
        while g < self.groups.len() {
            let b = self.block_of[g];
            let t = self.take[b];
            let mut ways = vec![0u128; t + 1];
            ways[0] = 1;
            while g < self.groups.len() && self.block_of[g] == b {
                let cap = self.groups[g].members.len();
                let mut next = vec![0u128; t + 1];
                for (r, &w) in ways.iter().enumerate() {
                    if w == 0 {
                        continue;
                    }
                    for c in 0..=cap.min(t - r) {
                        next[r + c] = next[r + c].saturating_add(w);
                    }
                }
                ways = next;
                g += 1;
            }
            total = total.saturating_mul(ways[t]);
        }
        total
    }

    fn start(&self) -> State {
        State {
            counts: vec![0; self.scaled.table.len()],
            score: self
                .scaled
                .table
                .iter()
                .zip(&self.scaled.mult)
                .map(|(row, m)| row[0] * m)
                .sum(),
            chosen: Vec::with_capacity(self.groups.len()),
            remaining: 0,
        }
    }

    fn range(&self, g: usize, st: &State) -> (usize, usize, usize) {
        let remaining = if self.first_of_block[g] {
            self.take[self.block_of[g]]
        } else {
            st.remaining
        };
        let cap = self.groups[g].members.len();
        let later = self.tail_cap[g] - cap;
        let lo = remaining.saturating_sub(later);
        let hi = cap.min(remaining);
        (lo, hi, remaining)
    }

    fn apply(&self, g: usize, c: usize, st: &mut State) {
        if c > 0 {
            for &t in &self.groups[g].holders {
                let row = &self.scaled.table[t];
                let old = st.counts[t];
                st.score += (row[old + c] - row[old]) * self.scaled.mult[t];
                st.counts[t] = old + c;
            }
        }
    }

    fn undo(&self, g: usize, c: usize, st: &mut State) {
        if c > 0 {
            for &t in &self.groups[g].holders {
                let row = &self.scaled.table[t];
                let new = st.counts[t];
                st.score -= (row[new] - row[new - c]) * self.scaled.mult[t];
                st.counts[t] = new - c;
            }
        }
    }

    fn dfs<V: FnMut(&[usize], i128)>(&self, g: usize, st: &mut State, visit: &mut V) {
        if g == self.groups.len() {
            visit(&st.chosen, st.score);
            return;
        }
        let (lo, hi, remaining) = self.range(g, st);
        if lo > hi {
            return;
        }
        let saved = st.remaining;
        for c in lo..=hi {
            self.apply(g, c, st);
            st.chosen.push(c);
            st.remaining = remaining - c;
            self.dfs(g + 1, st, visit);
            st.chosen.pop();
            self.undo(g, c, st);
        }
        st.remaining = saved;
    }

    /// Partial assignments of the leading groups, enough to keep a thread
    /// pool busy.
    fn prefixes(&self) -> Vec<State> {
        let mut frontier = vec![self.start()];
        let mut g = 0;
        while g < self.groups.len() && frontier.len() < 64 && g < 16 {
            let mut next = Vec::new();
            for st in frontier {
                let (lo, hi, remaining) = self.range(g, &st);
                for c in lo..=hi {
                    let mut s = st.clone();
                    self.apply(g, c, &mut s);
                    s.chosen.push(c);
                    s.remaining = remaining - c;
                    next.push(s);
                }
            }
            frontier = next;
            g += 1;
        }
        frontier
    }

    /// All count vectors reaching the maximum score, in enumeration order.
    pub fn argmax(&self, exec: Execution) -> Option<(i128, Vec<Vec<usize>>)> {
        if !self.feasible() {
            return None;
        }
        let prefixes = self.prefixes();
        let parts = par::map(exec, &prefixes, |st| {
            let mut st = st.clone();
            let g = st.chosen.len();
            let mut best: Option<(i128, Vec<Vec<usize>>)> = None;
            self.dfs(g, &mut st, &mut |chosen, score| match &mut best {
                Some((b, list)) if *b == score => list.push(chosen.to_vec()),
                Some((b, _)) if *b > score => {}
                _ => best = Some((score, vec![chosen.to_vec()])),
            });
            best
        });
        let mut best: Option<(i128, Vec<Vec<usize>>)> = None;
        for part in parts.into_iter().flatten() {
            match &mut best {
                Some((b, list)) if *b == part.0 => list.extend(part.1),
                Some((b, _)) if *b > part.0 => {}
                _ => best = Some(part),
            }
        }
        best
    }

    /// Smallest and largest score over the space.
    pub fn extremes(&self, exec: Execution) -> Option<(i128, i128)> {
        if !self.feasible() {
            return None;
        }
        let prefixes = self.prefixes();
        let parts = par::map(exec, &prefixes, |st| {
            let mut st = st.clone();
            let g = st.chosen.len();
            let mut acc: Option<(i128, i128)> = None;
            self.dfs(g, &mut st, &mut |_, s| {
                acc = Some(match acc {
                    Some((lo, hi)) => (lo.min(s), hi.max(s)),
                    None => (s, s),
                })
            });
            acc
        });
        parts.into_iter().flatten().reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
    }
}
