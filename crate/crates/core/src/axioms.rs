//! Proportionality axioms with violating witnesses.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::election::{detect_party_structure, is_laminar, Committee, ElectionFrame, PartyStructure};
use crate::error::{Error, Result};

/// Largest electorate on which PJR and EJR are decided by listing voter
/// groups when the profile is not party-list.
pub const MAX_ENUMERATED_VOTERS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    Jr,
    Pjr,
    Ejr,
    LowerQuota,
    LaminarProportionality,
}

/// A group that is owed representation and does not get it.
///
/// For JR/PJR/EJR `level` is the cohesion level and `common` the candidates
/// every member approves. For lower quota it is the party's quota and the
/// party's list. For laminar proportionality it is the seat share of the
/// sub-election whose condition fails. `seats` counts the committee members
/// relevant to the failed condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub voters: Vec<usize>,
    pub level: usize,
    pub common: Vec<usize>,
    pub seats: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomVerdict {
    pub axiom: Axiom,
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl AxiomVerdict {
    fn ok(axiom: Axiom) -> Self {
        AxiomVerdict { axiom, holds: true, witness: None }
    }

    fn fail(axiom: Axiom, w: Witness) -> Self {
        AxiomVerdict { axiom, holds: false, witness: Some(w) }
    }
}

fn common_of(frame: &ElectionFrame, voters: &[usize]) -> FixedBitSet {
    let mut it = voters.iter();
    let mut acc = frame.approval(*it.next().expect("non-empty group")).clone();
    for &v in it {
        acc.intersect_with(frame.approval(v));
    }
    acc
}

fn hits(frame: &ElectionFrame, w: &FixedBitSet, v: usize) -> usize {
    frame.approval(v).intersection_count(w)
}

pub fn check_jr(frame: &ElectionFrame, w: &Committee) -> Result<AxiomVerdict> {
    frame.check_committee(w.members())?;
    let wb = w.to_bitset(frame.m());
    let (n, k) = (frame.n(), frame.k());
    let unrepresented: Vec<usize> = (0..n).filter(|&v| hits(frame, &wb, v) == 0).collect();
    for c in 0..frame.m() {
        let s: Vec<usize> = unrepresented.iter().copied().filter(|&v| frame.approval(v).contains(c)).collect();
        if !s.is_empty() && s.len() * k >= n {
            let common = common_of(frame, &s).ones().collect();
            return Ok(AxiomVerdict::fail(
                Axiom::Jr,
                Witness { voters: s, level: 1, common, seats: 0 },
            ));
        }
    }
    Ok(AxiomVerdict::ok(Axiom::Jr))
}

pub fn check_pjr(frame: &ElectionFrame, w: &Committee) -> Result<AxiomVerdict> {
    cohesive_check(frame, w, Axiom::Pjr)
}

pub fn check_ejr(frame: &ElectionFrame, w: &Committee) -> Result<AxiomVerdict> {
    cohesive_check(frame, w, Axiom::Ejr)
}

fn cohesive_check(frame: &ElectionFrame, w: &Committee, axiom: Axiom) -> Result<AxiomVerdict> {
    frame.check_committee(w.members())?;
    let wb = w.to_bitset(frame.m());
    let (n, k) = (frame.n(), frame.k());
    if n <= MAX_ENUMERATED_VOTERS {
        let mut best: Option<Witness> = None;
        for mask in 1u32..(1u32 << n) {
            let voters: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            let common = common_of(frame, &voters);
            let level = common.count_ones(..).min(voters.len() * k / n);
            if level == 0 {
                continue;
            }
            let seats = match axiom {
                Axiom::Ejr => voters.iter().map(|&v| hits(frame, &wb, v)).max().unwrap_or(0),
                _ => {
                    let mut union = FixedBitSet::with_capacity(frame.m());
                    for &v in &voters {
                        union.union_with(frame.approval(v));
                    }
                    union.intersection_count(&wb)
                }
            };
            if seats < level && best.as_ref().is_none_or(|b| voters < b.voters) {
                best = Some(Witness { voters, level, common: common.ones().collect(), seats });
            }
        }
        return Ok(match best {
            Some(wit) => AxiomVerdict::fail(axiom, wit),
            None => AxiomVerdict::ok(axiom),
        });
    }
    let parties = match detect_party_structure(frame) {
        Ok(p) => p,
        Err(_) => {
            return Err(Error::Budget {
                what: "listing voter groups",
                needed: 1u128 << n.min(127),
                budget: 1u128 << MAX_ENUMERATED_VOTERS,
            })
        }
    };
    let mut first: Option<Witness> = None;
    for p in &parties.parties {
        let level = p.size().min(p.supporters() * k / n);
        let seats = p.candidates.iter().filter(|&&c| wb.contains(c)).count();
        if level > 0 && seats < level && first.as_ref().is_none_or(|f| p.voters < f.voters) {
            first = Some(Witness {
                voters: p.voters.clone(),
                level,
                common: p.candidates.clone(),
                seats,
            });
        }
    }
    Ok(match first {
        Some(wit) => AxiomVerdict::fail(axiom, wit),
        None => AxiomVerdict::ok(axiom),
    })
}

/// Every party gets at least `⌊k·n_i/n⌋` seats.
pub fn check_lower_quota(p: &PartyStructure, n: usize, k: usize, w: &Committee) -> Result<AxiomVerdict> {
    if n == 0 {
        return Err(Error::invalid("lower quota needs at least one voter"));
    }
    for party in &p.parties {
        let quota = k * party.supporters() / n;
        let seats = party.candidates.iter().filter(|&&c| w.contains(c)).count();
        if seats < quota {
            return Ok(AxiomVerdict::fail(
                Axiom::LowerQuota,
                Witness {
                    voters: party.voters.clone(),
                    level: quota,
                    common: party.candidates.clone(),
                    seats,
                },
            ));
        }
    }
    Ok(AxiomVerdict::ok(Axiom::LowerQuota))
}

/// Lower quota on a frame, which must be party-list.
pub fn check_lower_quota_frame(frame: &ElectionFrame, w: &Committee) -> Result<AxiomVerdict> {
    frame.check_committee(w.members())?;
    let p = detect_party_structure(frame)?;
    check_lower_quota(&p, frame.n(), frame.k(), w)
}

struct Part {
    set: FixedBitSet,
    voters: Vec<usize>,
}

/// Follows the laminar decomposition and checks that each unanimous block
/// gets no more than its seats, that every candidate approved by a whole
/// sub-electorate is elected, and hence that each part receives exactly its
/// proportional share.
pub fn check_laminar_proportionality(frame: &ElectionFrame, w: &Committee) -> Result<AxiomVerdict> {
    frame.check_committee(w.members())?;
    if !is_laminar(frame) {
        return Err(Error::Precondition("frame is not laminar".into()));
    }
    let wb = w.to_bitset(frame.m());
    let ap = frame.approvals();
    let mut parts: Vec<Part> = Vec::new();
    for v in 0..frame.n() {
        let t = ap.type_of(v);
        match parts.iter_mut().find(|p| &p.set == ap.set(t)) {
            Some(p) => p.voters.push(v),
            None => parts.push(Part { set: ap.set(t).clone(), voters: vec![v] }),
        }
    }
    Ok(match lp(parts, frame.k(), &wb) {
        Ok(()) => AxiomVerdict::ok(Axiom::LaminarProportionality),
        Err(wit) => AxiomVerdict::fail(Axiom::LaminarProportionality, wit),
    })
}

fn all_voters(parts: &[Part]) -> Vec<usize> {
    let mut v: Vec<usize> = parts.iter().flat_map(|p| p.voters.iter().copied()).collect();
    v.sort_unstable();
    v
}

fn lp(parts: Vec<Part>, k: usize, w: &FixedBitSet) -> std::result::Result<(), Witness> {
    let first = parts[0].set.clone();
    if parts.iter().all(|p| p.set == first) {
        let seats = first.intersection_count(w);
        if seats > k {
            return Err(Witness {
                voters: all_voters(&parts),
                level: k,
                common: first.ones().collect(),
                seats,
            });
        }
        return Ok(());
    }
    let mut common = first;
    for p in &parts[1..] {
        common.intersect_with(&p.set);
    }
    if let Some(c) = common.minimum() {
        if !w.contains(c) {
            return Err(Witness {
                voters: all_voters(&parts),
                level: k,
                common: vec![c],
                seats: 0,
            });
        }
        let reduced = parts
            .into_iter()
            .map(|mut p| {
                p.set.set(c, false);
                p
            })
            .collect();
        return lp(reduced, k - 1, w);
    }
    let groups: Vec<(FixedBitSet, usize)> = parts.iter().map(|p| (p.set.clone(), p.voters.len())).collect();
    let blocks = crate::election::components_of(&groups);
    let n: usize = groups.iter().map(|g| g.1).sum();
    let mut slots: Vec<Option<Part>> = parts.into_iter().map(Some).collect();
    let mut sub: Vec<(Vec<Part>, usize)> = blocks
        .into_iter()
        .map(|b| {
            let members: Vec<Part> = b.iter().map(|&i| slots[i].take().expect("each group in one block")).collect();
            let nb: usize = members.iter().map(|p| p.voters.len()).sum();
            (members, k * nb / n)
        })
        .collect();
    sub.sort_by_key(|(m, _)| all_voters(m)[0]);
    for (members, kb) in sub {
        lp(members, kb, w)?;
    }
    Ok(())
}
