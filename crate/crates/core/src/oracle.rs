//! Exhaustive reference implementations for small instances.
//!
//! Everything here is computed directly from the definitions by listing
//! committees, voter groups or vote-count vectors. Nothing is shared with
//! the optimized code paths, so agreement between the two is meaningful.

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::election::{Committee, Election, ElectionFrame};
use crate::error::{Error, Result};

/// Limits on exhaustive search. Exceeding one is an error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub subsets: u128,
    pub voter_group_size: usize,
    pub count_vectors: u128,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            subsets: 200_000,
            voter_group_size: 16,
            count_vectors: 2_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleObjective {
    Av,
    Lv,
    Cc,
    Pav,
    Sav,
    Lcc(usize),
}

/// Every maximizing committee, sorted, with the maximum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleWinners {
    pub score: BigRational,
    pub committees: Vec<Committee>,
}

fn frac(a: usize, b: usize) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn choose(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    r
}

fn sets(frame: &ElectionFrame) -> Vec<Vec<bool>> {
    (0..frame.n())
        .map(|v| (0..frame.m()).map(|c| frame.approval(v).contains(c)).collect())
        .collect()
}

fn ballot_sets(e: &Election) -> Vec<Vec<bool>> {
    e.ballots()
        .iter()
        .map(|b| (0..e.m()).map(|c| b.contains(&c)).collect())
        .collect()
}

/// Scores `w` from the definition of each objective.
pub fn oracle_score(e: &Election, objective: OracleObjective, w: &[usize]) -> BigRational {
    let approvals = sets(e.frame());
    let per_voter = |s: &Vec<bool>| w.iter().filter(|&&c| s[c]).count();
    match objective {
        OracleObjective::Lv => {
            let hits: usize = ballot_sets(e).iter().map(per_voter).sum();
            frac(hits, 1)
        }
        _ => {
            let mut total = BigRational::zero();
            for s in &approvals {
                let h = per_voter(s);
                let size = s.iter().filter(|&&x| x).count();
                total += match objective {
                    OracleObjective::Av => frac(h, 1),
                    OracleObjective::Cc => frac(if h > 0 { 1 } else { 0 }, 1),
                    OracleObjective::Pav => {
                        let mut acc = BigRational::zero();
                        for j in 1..=h {
                            acc += frac(1, j);
                        }
                        acc
                    }
                    OracleObjective::Sav => {
                        if size == 0 {
                            BigRational::zero()
                        } else {
                            frac(h, size)
                        }
                    }
                    OracleObjective::Lcc(l) => frac(if h < l { h } else { l }, 1),
                    OracleObjective::Lv => unreachable!(),
                };
            }
            total
        }
    }
}

fn check_subsets(m: usize, k: usize, budget: &OracleBudget) -> Result<()> {
    let needed = choose(m, k);
    if needed > budget.subsets {
        return Err(Error::Budget {
            what: "oracle committee listing",
            needed,
            budget: budget.subsets,
        });
    }
    Ok(())
}

/// Lists every `k`-subset and keeps the maximizers.
pub fn oracle_argmax(e: &Election, objective: OracleObjective, budget: &OracleBudget) -> Result<OracleWinners> {
    check_subsets(e.m(), e.k(), budget)?;
    let mut best: Option<BigRational> = None;
    let mut committees = Vec::new();
    for w in (0..e.m()).combinations(e.k()) {
        let s = oracle_score(e, objective, &w);
        match &best {
            Some(b) if *b > s => {}
            Some(b) if *b == s => committees.push(Committee::new(w)),
            _ => {
                best = Some(s);
                committees = vec![Committee::new(w)];
            }
        }
    }
    committees.sort();
    Ok(OracleWinners {
        score: best.expect("k <= m"),
        committees,
    })
}

/// Like [`oracle_argmax`] but scoring against the ballots as if they were
/// approval sets.
pub fn oracle_argmax_on_ballots(e: &Election, objective: OracleObjective, budget: &OracleBudget) -> Result<OracleWinners> {
    let as_frame = ElectionFrame::new(e.m(), e.k(), e.l(), e.ballots())?;
    let swapped = Election::new(as_frame, e.ballots().to_vec())?;
    oracle_argmax(&swapped, objective, budget)
}

/// `min` of `metric` over Limited Voting winners divided by `max` over
/// Approval Voting winners.
pub fn oracle_improvement(e: &Election, metric: OracleObjective, budget: &OracleBudget) -> Result<Option<BigRational>> {
    let lv = oracle_argmax(e, OracleObjective::Lv, budget)?;
    let av = oracle_argmax(e, OracleObjective::Av, budget)?;
    let lo = lv.committees.iter().map(|w| oracle_score(e, metric, w.members())).min().expect("non-empty");
    let hi = av.committees.iter().map(|w| oracle_score(e, metric, w.members())).max().expect("non-empty");
    Ok(if hi.is_zero() { None } else { Some(lo / hi) })
}

/// A committee every voter likes at least as much as `w` and some voter
/// likes strictly more, if one exists.
pub fn oracle_pareto_dominator(e: &Election, w: &Committee, budget: &OracleBudget) -> Result<Option<Committee>> {
    check_subsets(e.m(), e.k(), budget)?;
    let approvals = sets(e.frame());
    let base: Vec<usize> = approvals.iter().map(|s| w.members().iter().filter(|&&c| s[c]).count()).collect();
    for cand in (0..e.m()).combinations(e.k()) {
        let mut strict = false;
        let mut ok = true;
        for (s, &b) in approvals.iter().zip(&base) {
            let h = cand.iter().filter(|&&c| s[c]).count();
            if h < b {
                ok = false;
                break;
            }
            strict |= h > b;
        }
        if ok && strict {
            return Ok(Some(Committee::new(cand)));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleAxiom {
    Jr,
    Pjr,
    Ejr,
}

/// Decides JR, PJR or EJR by listing every voter group and every cohesion
/// level.
pub fn oracle_axiom(frame: &ElectionFrame, w: &Committee, axiom: OracleAxiom, budget: &OracleBudget) -> Result<bool> {
    let n = frame.n();
    if n > budget.voter_group_size {
        return Err(Error::Budget {
            what: "oracle voter groups",
            needed: n as u128,
            budget: budget.voter_group_size as u128,
        });
    }
    let approvals = sets(frame);
    let m = frame.m();
    let k = frame.k();
    for mask in 1u64..(1u64 << n) {
        let group: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let common = (0..m).filter(|&c| group.iter().all(|&v| approvals[v][c])).count();
        let max_level = if axiom == OracleAxiom::Jr { 1 } else { k };
        for level in 1..=max_level {
            // |S| >= level * n / k, compared without division
            if group.len() * k < level * n || common < level {
                continue;
            }
            let violated = match axiom {
                OracleAxiom::Jr => group.iter().all(|&v| w.members().iter().all(|&c| !approvals[v][c])),
                OracleAxiom::Ejr => group
                    .iter()
                    .all(|&v| w.members().iter().filter(|&&c| approvals[v][c]).count() < level),
                OracleAxiom::Pjr => {
                    w.members().iter().filter(|&&c| group.iter().any(|&v| approvals[v][c])).count() < level
                }
            };
            if violated {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Decides laminarity straight from the recursive definition: unanimous
/// elections, a candidate approved by everyone, or any split of voters and
/// candidates into two disjoint parts with matching seat shares.
pub fn oracle_is_laminar(frame: &ElectionFrame) -> bool {
    let approvals = sets(frame);
    let voters: Vec<usize> = (0..frame.n()).collect();
    let cands: Vec<usize> = (0..frame.m()).collect();
    laminar_rec(&approvals, &voters, &cands, frame.k())
}

fn laminar_rec(a: &[Vec<bool>], voters: &[usize], cands: &[usize], k: usize) -> bool {
    let unanimous = |vs: &[usize], cs: &[usize]| {
        let first: Vec<usize> = cs.iter().copied().filter(|&c| a[vs[0]][c]).collect();
        vs.iter().all(|&v| cs.iter().copied().filter(|&c| a[v][c]).collect::<Vec<_>>() == first)
    };
    if unanimous(voters, cands) {
        return cands.len() >= k;
    }
    for &c in cands {
        if k >= 1 && voters.iter().all(|&v| a[v][c]) {
            let rest: Vec<usize> = cands.iter().copied().filter(|&x| x != c).collect();
            if !unanimous(voters, &rest) && laminar_rec(a, voters, &rest, k - 1) {
                return true;
            }
        }
    }
    let n = voters.len();
    if n < 2 {
        return false;
    }
    // voter 0 always sits on the left to avoid mirrored splits
    for mask in 0u64..(1u64 << (n - 1)) {
        let left: Vec<usize> = std::iter::once(voters[0])
            .chain((1..n).filter(|&i| mask >> (i - 1) & 1 == 1).map(|i| voters[i]))
            .collect();
        let right: Vec<usize> = voters.iter().copied().filter(|v| !left.contains(v)).collect();
        if right.is_empty() {
            continue;
        }
        let used_l: Vec<usize> = cands.iter().copied().filter(|&c| left.iter().any(|&v| a[v][c])).collect();
        let used_r: Vec<usize> = cands.iter().copied().filter(|&c| right.iter().any(|&v| a[v][c])).collect();
        if used_l.iter().any(|c| used_r.contains(c)) {
            continue;
        }
        let free: Vec<usize> = cands
            .iter()
            .copied()
            .filter(|c| !used_l.contains(c) && !used_r.contains(c))
            .collect();
        for k1 in 0..=k {
            let k2 = k - k1;
            if left.len() * k2 != right.len() * k1 {
                continue;
            }
            for split in 0..=free.len() {
                let mut cl = used_l.clone();
                cl.extend(&free[..split]);
                let mut cr = used_r.clone();
                cr.extend(&free[split..]);
                cl.sort_unstable();
                cr.sort_unstable();
                if laminar_rec(a, &left, &cl, k1) && laminar_rec(a, &right, &cr, k2) {
                    return true;
                }
            }
        }
    }
    false
}

/// Seats a party is sure of: the fewest of its candidates in any committee
/// with the highest total tally.
pub fn oracle_pessimistic_utility(tallies: &[usize], k: usize, party: &[usize]) -> usize {
    let all: Vec<Vec<usize>> = (0..tallies.len()).combinations(k).collect();
    let best = all.iter().map(|w| w.iter().map(|&c| tallies[c]).sum::<usize>()).max().expect("k <= m");
    all.iter()
        .filter(|w| w.iter().map(|&c| tallies[c]).sum::<usize>() == best)
        .map(|w| w.iter().filter(|c| party.contains(c)).count())
        .min()
        .expect("some committee is best")
}

/// Best pessimistic utility over every vote-count vector a party with
/// `supporters` voters can produce on `party` (at most `supporters` votes
/// per candidate, `supporters * l` in total, at least `l` candidates used).
pub fn oracle_best_response(
    others: &[usize],
    k: usize,
    l: usize,
    party: &[usize],
    supporters: usize,
    budget: &OracleBudget,
) -> Result<usize> {
    let lattice = ((supporters + 1) as u128).saturating_pow(party.len() as u32);
    if lattice > budget.count_vectors {
        return Err(Error::Budget {
            what: "oracle count vectors",
            needed: lattice,
            budget: budget.count_vectors,
        });
    }
    let total = supporters * l;
    let mut best: Option<usize> = None;
    let mut y = vec![0usize; party.len()];
    loop {
        if y.iter().sum::<usize>() == total && y.iter().filter(|&&v| v > 0).count() >= l {
            let mut t = others.to_vec();
            for (i, &c) in party.iter().enumerate() {
                t[c] += y[i];
            }
            let u = oracle_pessimistic_utility(&t, k, party);
            best = Some(best.map_or(u, |b: usize| b.max(u)));
        }
        let mut i = 0;
        loop {
            if i == y.len() {
                return best.ok_or_else(|| Error::Precondition("no valid vote-count vector".into()));
            }
            if y[i] < supporters {
                y[i] += 1;
                break;
            }
            y[i] = 0;
            i += 1;
        }
    }
}

/// Total committee count, for callers sizing their runs.
pub fn committee_count(m: usize, k: usize) -> u128 {
    choose(m, k)
}
