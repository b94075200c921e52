//! Approval profiles stored as distinct sets with multiplicities.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// A list of voter sets over candidates `0..m`, deduplicated by content.
///
/// Voters keep their original order through `voter_type`; identical sets
/// share one bitset. Very large structured instances (tens of thousands of
/// voters with a handful of distinct sets) stay cheap this way.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetProfile {
    m: usize,
    sets: Vec<FixedBitSet>,
    counts: Vec<usize>,
    voter_type: Vec<usize>,
}

impl SetProfile {
    pub fn from_lists<I, L>(m: usize, lists: I) -> Result<Self>
    where
        I: IntoIterator<Item = L>,
        L: AsRef<[usize]>,
    {
        let mut b = Builder::new(m);
        for list in lists {
            let mut set = FixedBitSet::with_capacity(m);
            for &c in list.as_ref() {
                if c >= m {
                    return Err(Error::CandidateRange { candidate: c, m });
                }
                set.insert(c);
            }
            b.push(set, 1);
        }
        Ok(b.finish())
    }

    pub fn from_bitsets<I: IntoIterator<Item = FixedBitSet>>(m: usize, sets: I) -> Result<Self> {
        Self::from_groups(m, sets.into_iter().map(|s| (s, 1)))
    }

    /// Voters are laid out group by group, `count` voters per group.
    pub fn from_groups<I: IntoIterator<Item = (FixedBitSet, usize)>>(m: usize, groups: I) -> Result<Self> {
        let mut b = Builder::new(m);
        for (mut set, count) in groups {
            if let Some(c) = set.ones().find(|&c| c >= m) {
                return Err(Error::CandidateRange { candidate: c, m });
            }
            set.grow(m);
            if set.len() > m {
                let mut trimmed = FixedBitSet::with_capacity(m);
                trimmed.extend(set.ones());
                set = trimmed;
            }
            b.push(set, count);
        }
        Ok(b.finish())
    }

    pub fn candidates(&self) -> usize {
        self.m
    }

    pub fn voters(&self) -> usize {
        self.voter_type.len()
    }

    pub fn type_count(&self) -> usize {
        self.sets.len()
    }

    pub fn set(&self, t: usize) -> &FixedBitSet {
        &self.sets[t]
    }

    pub fn count(&self, t: usize) -> usize {
        self.counts[t]
    }

    pub fn type_of(&self, voter: usize) -> usize {
        self.voter_type[voter]
    }

    pub fn voter_set(&self, voter: usize) -> &FixedBitSet {
        &self.sets[self.voter_type[voter]]
    }

    pub fn voter_list(&self, voter: usize) -> Vec<usize> {
        self.voter_set(voter).ones().collect()
    }

    /// `(set, multiplicity)` for each distinct set, in order of first voter.
    pub fn types(&self) -> impl Iterator<Item = (&FixedBitSet, usize)> + '_ {
        self.sets.iter().zip(self.counts.iter().copied())
    }

    pub fn to_lists(&self) -> Vec<Vec<usize>> {
        (0..self.voters()).map(|v| self.voter_list(v)).collect()
    }

    /// Number of voters whose set contains each candidate.
    pub fn tallies(&self) -> Vec<usize> {
        let mut t = vec![0usize; self.m];
        for (set, count) in self.types() {
            for c in set.ones() {
                t[c] += count;
            }
        }
        t
    }

    /// Candidates contained in no voter's set.
    pub fn unused_candidates(&self) -> Vec<usize> {
        let mut used = FixedBitSet::with_capacity(self.m);
        for s in &self.sets {
            used.union_with(s);
        }
        (0..self.m).filter(|&c| !used.contains(c)).collect()
    }
}

struct Builder {
    m: usize,
    index: HashMap<FixedBitSet, usize>,
    sets: Vec<FixedBitSet>,
    counts: Vec<usize>,
    voter_type: Vec<usize>,
}

impl Builder {
    fn new(m: usize) -> Self {
        Builder {
            m,
            index: HashMap::new(),
            sets: Vec::new(),
            counts: Vec::new(),
            voter_type: Vec::new(),
        }
    }

    fn push(&mut self, set: FixedBitSet, count: usize) {
        if count == 0 {
            return;
        }
        let t = match self.index.get(&set) {
            Some(&t) => t,
            None => {
                let t = self.sets.len();
                self.index.insert(set.clone(), t);
                self.sets.push(set);
                self.counts.push(0);
                t
            }
        };
        self.counts[t] += count;
        self.voter_type.extend(std::iter::repeat_n(t, count));
    }

    fn finish(self) -> SetProfile {
        debug_assert!(self.sets.iter().all(|s| s.len() == self.m));
        SetProfile {
            m: self.m,
            sets: self.sets,
            counts: self.counts,
            voter_type: self.voter_type,
        }
    }
}

/// Candidates grouped by the exact collection of profile types containing them.
///
/// Any score that depends only on `|W ∩ S_i|` per voter cannot tell two
/// candidates of the same class apart.
#[derive(Clone, Debug)]
pub(crate) struct CandidateClasses {
    pub class_of: Vec<usize>,
    pub members: Vec<Vec<usize>>,
    pub holders: Vec<Vec<usize>>,
}

impl CandidateClasses {
    pub fn of(profile: &SetProfile) -> Self {
        let m = profile.candidates();
        let mut per: Vec<Vec<usize>> = vec![Vec::new(); m];
        for t in 0..profile.type_count() {
            for c in profile.set(t).ones() {
                per[c].push(t);
            }
        }
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut class_of = Vec::with_capacity(m);
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut holders: Vec<Vec<usize>> = Vec::new();
        for (c, h) in per.into_iter().enumerate() {
            let id = *index.entry(h.clone()).or_insert_with(|| {
                members.push(Vec::new());
                holders.push(h);
                members.len() - 1
            });
            members[id].push(c);
            class_of.push(id);
        }
        CandidateClasses {
            class_of,
            members,
            holders,
        }
    }

    /// Splits `pool` into runs of same-class candidates, ordered by class id.
    pub fn split(&self, pool: &[usize]) -> Vec<(usize, Vec<usize>)> {
        let mut by: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for &c in pool {
            by.entry(self.class_of[c]).or_default().push(c);
        }
        by.into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedup_keeps_voter_order() {
        let p = SetProfile::from_lists(4, [vec![0, 1], vec![2], vec![1, 0], vec![]]).unwrap();
        assert_eq!(p.voters(), 4);
        assert_eq!(p.type_count(), 3);
        assert_eq!(p.type_of(2), 0);
        assert_eq!(p.voter_list(2), vec![0, 1]);
        assert_eq!(p.tallies(), vec![2, 2, 1, 0]);
        assert_eq!(p.unused_candidates(), vec![3]);
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(SetProfile::from_lists(3, [vec![3]]).is_err());
    }

    #[test]
    fn classes_group_interchangeable_candidates() {
        let p = SetProfile::from_lists(5, [vec![0, 1, 2], vec![0, 1], vec![3]]).unwrap();
        let cc = CandidateClasses::of(&p);
        assert_eq!(cc.members, vec![vec![0, 1], vec![2], vec![3], vec![4]]);
        assert_eq!(cc.split(&[4, 1, 2, 0]), vec![(0, vec![1, 0]), (1, vec![2]), (3, vec![4])]);
    }
}
