use crate::error::{Error, Result};
use crate::profile::SetProfile;

use super::{is_consistent_with_order, BroadcastOrder, Election, ElectionFrame};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Party {
    pub candidates: Vec<usize>,
    pub voters: Vec<usize>,
}

impl Party {
    pub fn size(&self) -> usize {
        self.candidates.len()
    }

    pub fn supporters(&self) -> usize {
        self.voters.len()
    }
}

/// Parties of a party-list profile, most supported first.
///
/// Ties in support are broken by the smallest candidate id. Voters with an
/// empty approval set belong to no party.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartyStructure {
    pub m: usize,
    pub parties: Vec<Party>,
    pub unaffiliated: Vec<usize>,
}

impl PartyStructure {
    pub fn g(&self) -> usize {
        self.parties.len()
    }

    pub fn voters(&self) -> usize {
        self.parties.iter().map(Party::supporters).sum::<usize>() + self.unaffiliated.len()
    }

    pub fn supporter_counts(&self) -> Vec<usize> {
        self.parties.iter().map(Party::supporters).collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.parties.iter().map(Party::size).collect()
    }

    /// Candidates that belong to no party.
    pub fn unapproved(&self) -> Vec<usize> {
        let mut used = vec![false; self.m];
        for p in &self.parties {
            for &c in &p.candidates {
                used[c] = true;
            }
        }
        (0..self.m).filter(|&c| !used[c]).collect()
    }

    /// The approval lists this structure was read from, in voter order.
    pub fn to_profile(&self) -> SetProfile {
        let mut lists: Vec<Vec<usize>> = vec![Vec::new(); self.voters()];
        for p in &self.parties {
            for &v in &p.voters {
                lists[v] = p.candidates.clone();
            }
        }
        SetProfile::from_lists(self.m, lists).expect("party candidates are in range")
    }
}

/// Groups voters into parties, or names two voters whose approval sets
/// overlap without being equal.
pub fn detect_party_structure(frame: &ElectionFrame) -> Result<PartyStructure> {
    detect_in_profile(frame.approvals())
}

pub(crate) fn detect_in_profile(profile: &SetProfile) -> Result<PartyStructure> {
    let m = profile.candidates();
    let mut first_voter = vec![usize::MAX; profile.type_count()];
    let mut voters: Vec<Vec<usize>> = vec![Vec::new(); profile.type_count()];
    for v in 0..profile.voters() {
        let t = profile.type_of(v);
        if first_voter[t] == usize::MAX {
            first_voter[t] = v;
        }
        voters[t].push(v);
    }
    let mut owner: Vec<Option<usize>> = vec![None; m];
    let mut parties = Vec::new();
    let mut unaffiliated = Vec::new();
    for t in 0..profile.type_count() {
        let set = profile.set(t);
        if set.is_clear() {
            unaffiliated = voters[t].clone();
            continue;
        }
        for c in set.ones() {
            if let Some(o) = owner[c] {
                return Err(Error::NotPartyList(first_voter[o], first_voter[t]));
            }
            owner[c] = Some(t);
        }
        parties.push(Party {
            candidates: set.ones().collect(),
            voters: std::mem::take(&mut voters[t]),
        });
    }
    parties.sort_by(|a, b| b.supporters().cmp(&a.supporters()).then(a.candidates[0].cmp(&b.candidates[0])));
    Ok(PartyStructure {
        m,
        parties,
        unaffiliated,
    })
}

/// Party-list approvals and ballots that follow `order`.
pub fn is_broadcasted_party_list(e: &Election, order: &BroadcastOrder) -> bool {
    order.len() == e.m() && detect_party_structure(e.frame()).is_ok() && is_consistent_with_order(e, order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn broadcast_recognition() {
        let f = ElectionFrame::new(5, 3, 2, [vec![0, 1, 2], vec![0, 1, 2], vec![3, 4]]).unwrap();
        let order = BroadcastOrder::identity(5);
        assert!(is_broadcasted_party_list(&Election::from_order(f.clone(), &order).unwrap(), &order));
        let off = Election::new(f, vec![vec![1, 2], vec![0, 1], vec![3, 4]]).unwrap();
        assert!(!is_broadcasted_party_list(&off, &order));
    }

    #[test]
    fn parties_sorted_by_support() {
        let f = ElectionFrame::new(6, 2, 1, [vec![4, 5], vec![0, 1], vec![], vec![4, 5], vec![2]]).unwrap();
        let p = detect_party_structure(&f).unwrap();
        assert_eq!(p.g(), 3);
        assert_eq!(p.parties[0].candidates, vec![4, 5]);
        assert_eq!(p.parties[0].voters, vec![0, 3]);
        assert_eq!(p.parties[1].candidates, vec![0, 1]);
        assert_eq!(p.unaffiliated, vec![2]);
        assert_eq!(p.unapproved(), vec![3]);
        assert_eq!(&p.to_profile(), f.approvals());
    }

    #[test]
    fn overlap_is_reported() {
        let f = ElectionFrame::new(4, 2, 1, [vec![0], vec![1, 2], vec![2, 3]]).unwrap();
        assert!(matches!(detect_party_structure(&f), Err(Error::NotPartyList(1, 2))));
    }
}
