//! Committee scores and voting rules.

mod engine;
mod winners;

pub use winners::{Choice, Product, TieBreak, WinnerSet, MATERIALIZE_CAP};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::election::{Committee, Election, ElectionFrame};
use crate::error::{Error, Result};
use crate::numeric::{harmonic, int};
use crate::par::Execution;
use crate::profile::SetProfile;

use engine::{Scaled, Space};

/// Default limit on the number of committee profiles an optimizing rule
/// may enumerate.
pub const ENUMERATION_BUDGET: u128 = 2_000_000;

/// Committee scoring functions. Each sums, over voters, a value depending
/// only on how many committee members the voter's set contains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// Number of approved members.
    Av,
    /// 1 if at least one member is approved.
    Cc,
    /// Harmonic number of the approved member count.
    Pav,
    /// Approved members divided by the voter's set size.
    Sav,
    /// Approved members capped at the given value.
    Lcc(usize),
}

impl Objective {
    pub fn name(&self) -> String {
        match self {
            Objective::Av => "av".into(),
            Objective::Cc => "cc".into(),
            Objective::Pav => "pav".into(),
            Objective::Sav => "sav".into(),
            Objective::Lcc(l) => format!("{l}-cc"),
        }
    }

    fn voter_value(&self, hits: usize, size: usize) -> BigRational {
        match self {
            Objective::Av => int(hits),
            Objective::Cc => int((hits > 0) as usize),
            Objective::Pav => harmonic(hits),
            Objective::Sav if size == 0 => BigRational::zero(),
            Objective::Sav => BigRational::new(BigInt::from(hits), BigInt::from(size)),
            Objective::Lcc(l) => int(hits.min(*l)),
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "av" => Objective::Av,
            "cc" => Objective::Cc,
            "pav" => Objective::Pav,
            "sav" => Objective::Sav,
            _ => match s.strip_suffix("-cc").and_then(|l| l.parse().ok()) {
                Some(l) => Objective::Lcc(l),
                None => return Err(Error::invalid(format!("unknown objective {s:?}"))),
            },
        })
    }
}

/// Exact score of `w` against every voter set in `profile`.
pub fn score(objective: Objective, profile: &SetProfile, w: &Committee) -> BigRational {
    let wb = w.to_bitset(profile.candidates());
    profile
        .types()
        .map(|(set, count)| objective.voter_value(set.intersection_count(&wb), set.count_ones(..)) * int(count))
        .sum()
}

fn checked(frame: &ElectionFrame, w: &Committee) -> Result<()> {
    frame.check_committee(w.members()).map(|_| ())
}

fn as_usize(r: BigRational) -> usize {
    use num_traits::ToPrimitive;
    r.to_integer().to_usize().expect("integer scores fit usize")
}

pub fn av_score(frame: &ElectionFrame, w: &Committee) -> Result<usize> {
    checked(frame, w)?;
    Ok(as_usize(score(Objective::Av, frame.approvals(), w)))
}

/// Votes the committee receives on the ballots.
pub fn lv_score(e: &Election, w: &Committee) -> Result<usize> {
    checked(e.frame(), w)?;
    Ok(e.ballots().iter().map(|b| b.iter().filter(|&&c| w.contains(c)).count()).sum())
}

pub fn cc_score(frame: &ElectionFrame, w: &Committee) -> Result<usize> {
    checked(frame, w)?;
    Ok(as_usize(score(Objective::Cc, frame.approvals(), w)))
}

pub fn pav_score(frame: &ElectionFrame, w: &Committee) -> Result<BigRational> {
    checked(frame, w)?;
    Ok(score(Objective::Pav, frame.approvals(), w))
}

pub fn sav_score(frame: &ElectionFrame, w: &Committee) -> Result<BigRational> {
    checked(frame, w)?;
    Ok(score(Objective::Sav, frame.approvals(), w))
}

pub fn lcc_score(frame: &ElectionFrame, w: &Committee, l: usize) -> Result<usize> {
    checked(frame, w)?;
    Ok(as_usize(score(Objective::Lcc(l), frame.approvals(), w)))
}

pub fn av_tallies(frame: &ElectionFrame) -> Vec<usize> {
    frame.approvals().tallies()
}

pub fn lv_tallies(e: &Election) -> Vec<usize> {
    let mut t = vec![0; e.m()];
    for b in e.ballots() {
        for &c in b {
            t[c] += 1;
        }
    }
    t
}

/// All `k`-sets of highest total tally.
///
/// Candidates above the `k`-th largest tally are in every winner; the rest
/// of the seats go to any of the candidates at that tally.
pub fn threshold_winners(tallies: &[usize], k: usize) -> Result<WinnerSet> {
    if k == 0 || k > tallies.len() {
        return Err(Error::invalid(format!("cannot fill {k} seats from {} candidates", tallies.len())));
    }
    let mut sorted: Vec<usize> = tallies.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let tau = sorted[k - 1];
    let locked: Vec<usize> = (0..tallies.len()).filter(|&c| tallies[c] > tau).collect();
    let ties: Vec<usize> = (0..tallies.len()).filter(|&c| tallies[c] == tau).collect();
    let slots = k - locked.len();
    let total: usize = locked.iter().map(|&c| tallies[c]).sum::<usize>() + slots * tau;
    Ok(WinnerSet::threshold(int(total), locked, ties, slots))
}

pub fn av_winners(frame: &ElectionFrame) -> WinnerSet {
    threshold_winners(&av_tallies(frame), frame.k()).expect("frame has k <= m")
}

pub fn lv_winners(e: &Election) -> WinnerSet {
    threshold_winners(&lv_tallies(e), e.k()).expect("frame has k <= m")
}

/// All size-`k` committees maximizing `objective` over `profile`.
///
/// Candidates contained in exactly the same voter sets are interchangeable,
/// so the search runs over how many members each such class contributes.
/// `budget` caps the number of those count vectors.
pub fn optimal_committees_in(
    profile: &SetProfile,
    k: usize,
    objective: Objective,
    budget: u128,
    exec: Execution,
) -> Result<WinnerSet> {
    if k == 0 || k > profile.candidates() {
        return Err(Error::invalid(format!("cannot fill {k} seats from {} candidates", profile.candidates())));
    }
    let scaled = Scaled::new(objective, profile, k)?;
    let space = Space::whole(profile, k, &scaled);
    let needed = space.size();
    if needed > budget {
        return Err(Error::Budget {
            what: "committee search",
            needed,
            budget,
        });
    }
    let (best, vectors) = space.argmax(exec).expect("k <= m leaves a committee");
    let products = vectors
        .into_iter()
        .map(|counts| Product {
            choices: counts
                .iter()
                .zip(space.groups())
                .filter(|(c, _)| **c > 0)
                .map(|(&take, g)| Choice {
                    pool: g.members.clone(),
                    take,
                })
                .collect(),
        })
        .collect();
    Ok(WinnerSet::new(scaled.to_rational(best), products))
}

pub fn optimal_committees(frame: &ElectionFrame, objective: Objective, budget: u128) -> Result<WinnerSet> {
    optimal_committees_in(frame.approvals(), frame.k(), objective, budget, Execution::default())
}

/// The rule that maximizes `objective` on the ballots instead of the
/// approvals (for instance PAV on ballots gives LPAV).
pub fn limited_rule(e: &Election, objective: Objective, budget: u128) -> Result<WinnerSet> {
    optimal_committees_in(&e.ballot_profile(), e.k(), objective, budget, Execution::default())
}
