//! Elections, committees, ballots and broadcast orders.

mod doc;
mod laminar;
mod party;

pub use doc::{ElectionDoc, LoadedElection};
pub use laminar::{is_broadcasted_laminar, is_laminar, respects_popularity};
pub use party::{detect_party_structure, is_broadcasted_party_list, Party, PartyStructure};

pub(crate) use laminar::components as components_of;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::SetProfile;

/// A committee: a sorted list of distinct candidate ids.
///
/// The derived ordering compares sorted member lists, so the minimum of a
/// collection is its lexicographically first committee.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Committee(Vec<usize>);

impl Committee {
    pub fn new<I: IntoIterator<Item = usize>>(members: I) -> Self {
        let mut v: Vec<usize> = members.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Committee(v)
    }

    /// Like [`Committee::new`] but rejects duplicates and out-of-range ids
    /// and checks the size.
    pub fn checked(members: &[usize], m: usize, k: usize) -> Result<Self> {
        if let Some(&c) = members.iter().find(|&&c| c >= m) {
            return Err(Error::CandidateRange { candidate: c, m });
        }
        let c = Committee::new(members.iter().copied());
        if c.len() != members.len() || c.len() != k {
            return Err(Error::CommitteeSize {
                expected: k,
                actual: c.len(),
            });
        }
        Ok(c)
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, c: usize) -> bool {
        self.0.binary_search(&c).is_ok()
    }

    pub fn to_bitset(&self, m: usize) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(m);
        b.extend(self.0.iter().copied());
        b
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }
}

impl std::fmt::Display for Committee {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}

/// Voters, candidates, committee size `k`, ballot limit `l` and approvals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElectionFrame {
    k: usize,
    l: usize,
    approvals: SetProfile,
}

impl ElectionFrame {
    pub fn new<I, L>(m: usize, k: usize, l: usize, approvals: I) -> Result<Self>
    where
        I: IntoIterator<Item = L>,
        L: AsRef<[usize]>,
    {
        Self::from_profile(SetProfile::from_lists(m, approvals)?, k, l)
    }

    pub fn from_profile(approvals: SetProfile, k: usize, l: usize) -> Result<Self> {
        let m = approvals.candidates();
        if approvals.voters() == 0 {
            return Err(Error::invalid("an election needs at least one voter"));
        }
        if !(1 <= l && l <= k && k <= m) {
            return Err(Error::invalid(format!(
                "need 1 <= l <= k <= m, got l = {l}, k = {k}, m = {m}"
            )));
        }
        Ok(ElectionFrame { k, l, approvals })
    }

    /// Same voters and candidates with a different committee size and limit.
    pub fn with_sizes(&self, k: usize, l: usize) -> Result<Self> {
        Self::from_profile(self.approvals.clone(), k, l)
    }

    pub fn n(&self) -> usize {
        self.approvals.voters()
    }

    pub fn m(&self) -> usize {
        self.approvals.candidates()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn approvals(&self) -> &SetProfile {
        &self.approvals
    }

    pub fn approval(&self, voter: usize) -> &FixedBitSet {
        self.approvals.voter_set(voter)
    }

    pub fn check_committee(&self, members: &[usize]) -> Result<Committee> {
        Committee::checked(members, self.m(), self.k)
    }
}

/// A frame together with one ballot per voter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Election {
    frame: ElectionFrame,
    ballots: Vec<Vec<usize>>,
}

impl Election {
    /// Ballots are checked structurally only; see [`Election::validate`].
    pub fn new(frame: ElectionFrame, ballots: Vec<Vec<usize>>) -> Result<Self> {
        if ballots.len() != frame.n() {
            return Err(Error::invalid(format!(
                "{} ballots for {} voters",
                ballots.len(),
                frame.n()
            )));
        }
        let m = frame.m();
        let mut out = Vec::with_capacity(ballots.len());
        for (i, b) in ballots.into_iter().enumerate() {
            if let Some(&c) = b.iter().find(|&&c| c >= m) {
                return Err(Error::at(format!("/ballots/{i}"), format!("candidate {c} out of range (m = {m})")));
            }
            let mut s = b.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() != b.len() {
                return Err(Error::at(format!("/ballots/{i}"), "repeated candidate"));
            }
            out.push(s);
        }
        Ok(Election { frame, ballots: out })
    }

    /// Builds ballots from the broadcast order (see [`gen_ballots`]).
    pub fn from_order(frame: ElectionFrame, order: &BroadcastOrder) -> Result<Self> {
        let ballots = gen_ballots(frame.approvals(), order, frame.l(), PaddingPolicy::Broadcast)?;
        Election::new(frame, ballots)
    }

    /// Like [`Election::new`] but also fails when [`Election::validate`]
    /// reports problems.
    pub fn new_valid(frame: ElectionFrame, ballots: Vec<Vec<usize>>) -> Result<Self> {
        let e = Election::new(frame, ballots)?;
        let report = e.validate();
        match report.violations.first() {
            None => Ok(e),
            Some(v) => Err(Error::at(format!("/ballots/{}", v.voter), v.kind.to_string())),
        }
    }

    pub fn frame(&self) -> &ElectionFrame {
        &self.frame
    }

    pub fn ballots(&self) -> &[Vec<usize>] {
        &self.ballots
    }

    pub fn ballot(&self, voter: usize) -> &[usize] {
        &self.ballots[voter]
    }

    pub fn n(&self) -> usize {
        self.frame.n()
    }

    pub fn m(&self) -> usize {
        self.frame.m()
    }

    pub fn k(&self) -> usize {
        self.frame.k()
    }

    pub fn l(&self) -> usize {
        self.frame.l()
    }

    pub fn ballot_profile(&self) -> SetProfile {
        SetProfile::from_lists(self.m(), &self.ballots).expect("ballots checked on construction")
    }

    pub fn validate(&self) -> ValidationReport {
        let l = self.l();
        let mut violations = Vec::new();
        for (voter, b) in self.ballots.iter().enumerate() {
            let a = self.frame.approval(voter);
            if b.len() != l {
                violations.push(BallotViolation {
                    voter,
                    kind: ViolationKind::WrongSize { size: b.len(), limit: l },
                });
                continue;
            }
            let approved = a.count_ones(..);
            if approved >= l {
                if let Some(&c) = b.iter().find(|&&c| !a.contains(c)) {
                    violations.push(BallotViolation {
                        voter,
                        kind: ViolationKind::Unapproved { candidate: c },
                    });
                }
            } else if let Some(c) = a.ones().find(|c| b.binary_search(c).is_err()) {
                violations.push(BallotViolation {
                    voter,
                    kind: ViolationKind::MissingApproved { candidate: c },
                });
            }
        }
        ValidationReport { violations }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<BallotViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallotViolation {
    pub voter: usize,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    WrongSize { size: usize, limit: usize },
    /// The voter approves at least `l` candidates but votes for one outside
    /// the approval set.
    Unapproved { candidate: usize },
    /// The voter approves fewer than `l` candidates and leaves an approved
    /// one off the ballot.
    MissingApproved { candidate: usize },
}

impl std::fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ViolationKind::WrongSize { size, limit } => {
                write!(f, "ballot has {size} candidates, expected {limit}")
            }
            ViolationKind::Unapproved { candidate } => {
                write!(f, "votes for unapproved candidate {candidate}")
            }
            ViolationKind::MissingApproved { candidate } => {
                write!(f, "omits approved candidate {candidate}")
            }
        }
    }
}

/// A strict ranking of all candidates, best first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BroadcastOrder {
    ranking: Vec<usize>,
    position: Vec<usize>,
}

impl BroadcastOrder {
    pub fn new(ranking: Vec<usize>) -> Result<Self> {
        let m = ranking.len();
        let mut position = vec![usize::MAX; m];
        for (i, &c) in ranking.iter().enumerate() {
            if c >= m || position[c] != usize::MAX {
                return Err(Error::at(
                    format!("/order/{i}"),
                    "order must be a permutation of the candidate ids",
                ));
            }
            position[c] = i;
        }
        Ok(BroadcastOrder { ranking, position })
    }

    pub fn identity(m: usize) -> Self {
        BroadcastOrder {
            ranking: (0..m).collect(),
            position: (0..m).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.ranking.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranking.is_empty()
    }

    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    pub fn position(&self, c: usize) -> usize {
        self.position[c]
    }
}

/// How voters approving fewer than `l` candidates fill the rest of a ballot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PaddingPolicy {
    /// Highest-ranked unapproved candidates in the broadcast order.
    #[default]
    Broadcast,
    /// Smallest unapproved candidate ids.
    LowestId,
}

/// Ballots built by following the order: each voter takes the first `l` of
/// their approved candidates, or all of them plus padding when they approve
/// fewer than `l`.
pub fn gen_ballots(
    approvals: &SetProfile,
    order: &BroadcastOrder,
    l: usize,
    padding: PaddingPolicy,
) -> Result<Vec<Vec<usize>>> {
    let m = approvals.candidates();
    if order.len() != m {
        return Err(Error::invalid(format!(
            "order ranks {} candidates, election has {m}",
            order.len()
        )));
    }
    if l > m {
        return Err(Error::invalid(format!("ballot limit {l} exceeds m = {m}")));
    }
    let per_type: Vec<Vec<usize>> = (0..approvals.type_count())
        .map(|t| {
            let a = approvals.set(t);
            let mut b: Vec<usize> = order.ranking().iter().copied().filter(|&c| a.contains(c)).take(l).collect();
            if b.len() < l {
                let need = l - b.len();
                let fill: Vec<usize> = match padding {
                    PaddingPolicy::Broadcast => order
                        .ranking()
                        .iter()
                        .copied()
                        .filter(|&c| !a.contains(c))
                        .take(need)
                        .collect(),
                    PaddingPolicy::LowestId => (0..m).filter(|&c| !a.contains(c)).take(need).collect(),
                };
                b.extend(fill);
            }
            b.sort_unstable();
            b
        })
        .collect();
    Ok((0..approvals.voters()).map(|v| per_type[approvals.type_of(v)].clone()).collect())
}

/// True when every voter votes for their approved candidates in order:
/// an approved candidate on the ballot never ranks below an approved one
/// left off it.
pub fn is_consistent_with_order(e: &Election, order: &BroadcastOrder) -> bool {
    first_order_violation(e, order).is_none()
}

pub fn first_order_violation(e: &Election, order: &BroadcastOrder) -> Option<usize> {
    if order.len() != e.m() {
        return Some(0);
    }
    (0..e.n()).find(|&v| {
        let a = e.frame().approval(v);
        let b = e.ballot(v);
        let worst_in = b.iter().filter(|&&c| a.contains(c)).map(|&c| order.position(c)).max();
        let best_out = a.ones().filter(|c| b.binary_search(c).is_err()).map(|c| order.position(c)).min();
        matches!((worst_in, best_out), (Some(x), Some(y)) if x > y)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame() -> ElectionFrame {
        ElectionFrame::new(5, 3, 2, [vec![0, 1, 2], vec![3], vec![]]).unwrap()
    }

    #[test]
    fn frame_bounds() {
        assert!(ElectionFrame::new(3, 4, 1, [vec![0]]).is_err());
        assert!(ElectionFrame::new(3, 2, 3, [vec![0]]).is_err());
        assert!(ElectionFrame::new(3, 2, 0, [vec![0]]).is_err());
        assert!(ElectionFrame::new(3, 2, 1, Vec::<Vec<usize>>::new()).is_err());
        assert!(ElectionFrame::new(3, 3, 3, [vec![0]]).is_ok());
    }

    #[test]
    fn ballots_follow_order_with_padding() {
        let f = frame();
        let ord = BroadcastOrder::new(vec![4, 2, 3, 1, 0]).unwrap();
        let b = gen_ballots(f.approvals(), &ord, 2, PaddingPolicy::Broadcast).unwrap();
        assert_eq!(b, vec![vec![1, 2], vec![3, 4], vec![2, 4]]);
        let b = gen_ballots(f.approvals(), &ord, 2, PaddingPolicy::LowestId).unwrap();
        assert_eq!(b, vec![vec![1, 2], vec![0, 3], vec![0, 1]]);
        let e = Election::new(f, b).unwrap();
        assert!(e.validate().is_valid());
    }

    #[test]
    fn validation_reports_each_kind() {
        let e = Election::new(frame(), vec![vec![0, 4], vec![0, 1], vec![1]]).unwrap();
        let r = e.validate();
        assert_eq!(
            r.violations,
            vec![
                BallotViolation { voter: 0, kind: ViolationKind::Unapproved { candidate: 4 } },
                BallotViolation { voter: 1, kind: ViolationKind::MissingApproved { candidate: 3 } },
                BallotViolation { voter: 2, kind: ViolationKind::WrongSize { size: 1, limit: 2 } },
            ]
        );
        assert!(Election::new(frame(), vec![vec![0, 0], vec![3, 1], vec![1, 2]]).is_err());
    }

    #[test]
    fn order_consistency() {
        let f = frame();
        let ord = BroadcastOrder::identity(5);
        let e = Election::from_order(f.clone(), &ord).unwrap();
        assert!(is_consistent_with_order(&e, &ord));
        let e = Election::new(f, vec![vec![1, 2], vec![3, 4], vec![0, 1]]).unwrap();
        assert_eq!(first_order_violation(&e, &ord), Some(0));
    }

    #[test]
    fn order_must_be_permutation() {
        assert!(BroadcastOrder::new(vec![0, 2, 2]).is_err());
        assert!(BroadcastOrder::new(vec![0, 3, 1]).is_err());
    }

    #[test]
    fn committee_checks() {
        assert!(Committee::checked(&[0, 1], 3, 2).is_ok());
        assert!(Committee::checked(&[0, 0], 3, 2).is_err());
        assert!(Committee::checked(&[0, 3], 3, 2).is_err());
        assert!(Committee::checked(&[0], 3, 2).is_err());
        assert!(Committee::new([3, 1]) < Committee::new([1, 4]));
        assert_eq!(Committee::new([2, 0]).to_string(), "{0,2}");
    }
}
