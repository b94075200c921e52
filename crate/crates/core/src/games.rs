//! The game parties play under Limited Voting on a party-list frame.
//!
//! Each party decides how its supporters' ballots are spread over its own
//! candidates. A party's utility is the number of its candidates that are
//! certain to be elected: the minimum over all tied winning committees.

use serde::{Deserialize, Serialize};

use crate::election::{detect_party_structure, ElectionFrame, PartyStructure};
use crate::error::{Error, Result};
use crate::rules::{threshold_winners, WinnerSet};

/// Ballots of one party as `(ballot, number of voters casting it)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PartyStrategy(pub Vec<(Vec<usize>, usize)>);

impl PartyStrategy {
    pub fn voters(&self) -> usize {
        self.0.iter().map(|(_, c)| c).sum()
    }

    /// Votes per candidate over `m` candidates.
    pub fn counts(&self, m: usize) -> Vec<usize> {
        let mut t = vec![0; m];
        for (b, c) in &self.0 {
            for &x in b {
                t[x] += c;
            }
        }
        t
    }

    /// Candidates receiving at least one vote.
    pub fn supported(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.0.iter().flat_map(|(b, _)| b.iter().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// One strategy per party, in the party order of [`LvGame::parties`].
pub type StrategyProfile = Vec<PartyStrategy>;

#[derive(Clone, Debug)]
pub struct GameOutcome {
    pub tallies: Vec<usize>,
    pub winners: WinnerSet,
    pub utilities: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Deviation {
    pub party: usize,
    pub utility: usize,
    pub best_utility: usize,
    pub best_response: PartyStrategy,
}

impl Deviation {
    pub fn gain(&self) -> usize {
        self.best_utility.saturating_sub(self.utility)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquilibriumVerdict {
    pub epsilon: usize,
    pub holds: bool,
    pub deviations: Vec<Deviation>,
}

impl EquilibriumVerdict {
    pub fn max_gain(&self) -> usize {
        self.deviations.iter().map(Deviation::gain).max().unwrap_or(0)
    }
}

/// Seats a party is sure to win: its candidates above the cutoff tally,
/// plus the tied seats left over once every tied outsider is seated.
pub fn pessimistic_utility(tallies: &[usize], k: usize, party: &[usize]) -> usize {
    let mut sorted = tallies.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let tau = sorted[k - 1];
    let above = tallies.iter().filter(|&&t| t > tau).count();
    let open = k - above;
    let tied_outside = (0..tallies.len())
        .filter(|&c| tallies[c] == tau && !party.contains(&c))
        .count();
    let sure = party.iter().filter(|&&c| tallies[c] > tau).count();
    sure + open.saturating_sub(tied_outside)
}

#[derive(Clone, Debug)]
pub struct LvGame {
    frame: ElectionFrame,
    parties: PartyStructure,
}

impl LvGame {
    pub fn new(frame: ElectionFrame) -> Result<Self> {
        let parties = detect_party_structure(&frame)?;
        if !parties.unaffiliated.is_empty() {
            return Err(Error::Precondition(format!(
                "voter {} approves nobody and belongs to no party",
                parties.unaffiliated[0]
            )));
        }
        Ok(LvGame { frame, parties })
    }

    pub fn frame(&self) -> &ElectionFrame {
        &self.frame
    }

    pub fn parties(&self) -> &PartyStructure {
        &self.parties
    }

    /// `⌊k·n_i/n⌋` per party.
    pub fn quotas(&self) -> Vec<usize> {
        let (n, k) = (self.frame.n(), self.frame.k());
        self.parties.parties.iter().map(|p| k * p.supporters() / n).collect()
    }

    /// Seats left after every party receives its lower quota.
    pub fn quota_gap(&self) -> usize {
        self.frame.k() - self.quotas().iter().sum::<usize>()
    }

    /// Every quota lies between `l` and the party's list length.
    pub fn check_lq_preconditions(&self) -> Result<()> {
        let l = self.frame.l();
        for (i, (q, p)) in self.quotas().into_iter().zip(&self.parties.parties).enumerate() {
            if q < l || q > p.size() {
                return Err(Error::Precondition(format!(
                    "party {i}: quota {q} must lie between l = {l} and its {} candidates",
                    p.size()
                )));
            }
        }
        Ok(())
    }

    pub fn check_strategy(&self, party: usize, s: &PartyStrategy) -> Result<()> {
        let p = self.parties.parties.get(party).ok_or_else(|| Error::invalid(format!("no party {party}")))?;
        let l = self.frame.l();
        if s.voters() != p.supporters() {
            return Err(Error::invalid(format!(
                "party {party}: strategy covers {} voters, party has {}",
                s.voters(),
                p.supporters()
            )));
        }
        for (b, _) in &s.0 {
            let mut d = b.clone();
            d.sort_unstable();
            d.dedup();
            let fits = if p.size() >= l {
                b.iter().all(|c| p.candidates.contains(c))
            } else {
                p.candidates.iter().all(|c| b.contains(c))
            };
            if b.len() != l || d.len() != l || !fits || b.iter().any(|&c| c >= self.frame.m()) {
                return Err(Error::invalid(format!("party {party}: ballot {b:?} is not a valid ballot")));
            }
        }
        Ok(())
    }

    pub fn tallies(&self, profile: &[PartyStrategy]) -> Result<Vec<usize>> {
        if profile.len() != self.parties.g() {
            return Err(Error::invalid(format!(
                "{} strategies for {} parties",
                profile.len(),
                self.parties.g()
            )));
        }
        let mut t = vec![0; self.frame.m()];
        for (i, s) in profile.iter().enumerate() {
            self.check_strategy(i, s)?;
            for (x, c) in t.iter_mut().zip(s.counts(self.frame.m())) {
                *x += c;
            }
        }
        Ok(t)
    }

    pub fn outcome(&self, profile: &[PartyStrategy]) -> Result<GameOutcome> {
        let tallies = self.tallies(profile)?;
        let k = self.frame.k();
        let utilities = self
            .parties
            .parties
            .iter()
            .map(|p| pessimistic_utility(&tallies, k, &p.candidates))
            .collect();
        Ok(GameOutcome {
            winners: threshold_winners(&tallies, k)?,
            tallies,
            utilities,
        })
    }

    /// Lower-quota vote counts: the party's votes spread as evenly as
    /// possible over its first `q_i` candidates, the extra votes going to
    /// the later ones.
    pub fn lq_counts(&self, party: usize) -> Result<Vec<(usize, usize)>> {
        self.check_lq_preconditions()?;
        let p = &self.parties.parties[party];
        let q = self.quotas()[party];
        Ok(spread(&p.candidates[..q], p.supporters() * self.frame.l()))
    }

    pub fn lq_strategy(&self, party: usize) -> Result<PartyStrategy> {
        let counts = self.lq_counts(party)?;
        realize_counts(&counts, self.parties.parties[party].supporters(), self.frame.l())
    }

    pub fn lq_profile(&self) -> Result<StrategyProfile> {
        (0..self.parties.g()).map(|i| self.lq_strategy(i)).collect()
    }

    /// The best utility `party` can reach against the other tallies, found
    /// among even spreads over its first `t` candidates for each `t >= l`.
    /// Ties go to the smallest `t`.
    pub fn best_response(&self, party: usize, others: &[usize]) -> Result<(PartyStrategy, usize)> {
        let p = &self.parties.parties[party];
        let l = self.frame.l();
        let votes = p.supporters() * l;
        let mut best: Option<(usize, Vec<(usize, usize)>)> = None;
        for t in l.min(p.size())..=p.size() {
            let counts = spread(&p.candidates[..t], votes);
            if counts.iter().any(|&(_, c)| c > p.supporters()) {
                continue;
            }
            let mut tallies = others.to_vec();
            for &(c, x) in &counts {
                tallies[c] += x;
            }
            let u = pessimistic_utility(&tallies, self.frame.k(), &p.candidates);
            if best.as_ref().is_none_or(|(b, _)| u > *b) {
                best = Some((u, counts));
            }
        }
        let (u, counts) = best.ok_or_else(|| Error::Precondition(format!("party {party} has fewer than l candidates")))?;
        Ok((realize_counts(&counts, p.supporters(), l)?, u))
    }

    /// Whether no party can gain more than `epsilon` seats by deviating.
    pub fn verify_equilibrium(&self, profile: &[PartyStrategy], epsilon: usize) -> Result<EquilibriumVerdict> {
        let total = self.tallies(profile)?;
        let k = self.frame.k();
        let mut deviations = Vec::new();
        for (i, (p, s)) in self.parties.parties.iter().zip(profile).enumerate() {
            let own = s.counts(self.frame.m());
            let others: Vec<usize> = total.iter().zip(&own).map(|(a, b)| a - b).collect();
            let utility = pessimistic_utility(&total, k, &p.candidates);
            let (best_response, best_utility) = self.best_response(i, &others)?;
            deviations.push(Deviation {
                party: i,
                utility,
                best_utility,
                best_response,
            });
        }
        let holds = deviations.iter().all(|d| d.gain() <= epsilon);
        Ok(EquilibriumVerdict {
            epsilon,
            holds,
            deviations,
        })
    }
}

/// `votes` spread over `cands` so that counts differ by at most one, the
/// larger counts on the later candidates.
fn spread(cands: &[usize], votes: usize) -> Vec<(usize, usize)> {
    let t = cands.len();
    if t == 0 {
        return Vec::new();
    }
    let (base, extra) = (votes / t, votes % t);
    cands
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, base + (i >= t - extra) as usize))
        .collect()
}

/// Turns per-candidate vote counts into `voters` ballots of `l` distinct
/// candidates. Each ballot takes the `l` candidates with the most votes
/// still unassigned, lowest id first on ties. Identical ballots are merged.
pub fn realize_counts(counts: &[(usize, usize)], voters: usize, l: usize) -> Result<PartyStrategy> {
    let total: usize = counts.iter().map(|c| c.1).sum();
    if total != voters * l {
        return Err(Error::invalid(format!(
            "counts sum to {total}, expected {voters} voters times l = {l}"
        )));
    }
    if let Some(&(c, x)) = counts.iter().find(|c| c.1 > voters) {
        return Err(Error::invalid(format!(
            "candidate {c} needs {x} votes from only {voters} voters"
        )));
    }
    let mut left: Vec<(usize, usize)> = counts.iter().copied().filter(|c| c.1 > 0).collect();
    left.sort_unstable();
    let mut ballots: std::collections::BTreeMap<Vec<usize>, usize> = Default::default();
    for _ in 0..voters {
        let mut idx: Vec<usize> = (0..left.len()).filter(|&i| left[i].1 > 0).collect();
        idx.sort_by(|&a, &b| left[b].1.cmp(&left[a].1).then(left[a].0.cmp(&left[b].0)));
        if idx.len() < l {
            return Err(Error::Alarm("vote counts could not be split into ballots".into()));
        }
        let mut b: Vec<usize> = idx[..l].iter().map(|&i| left[i].0).collect();
        for &i in &idx[..l] {
            left[i].1 -= 1;
        }
        b.sort_unstable();
        *ballots.entry(b).or_default() += 1;
    }
    Ok(PartyStrategy(ballots.into_iter().collect()))
}
