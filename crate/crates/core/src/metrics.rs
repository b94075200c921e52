//! How much representation Limited Voting gives up or gains against
//! Approval Voting and against the best possible committee.

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::election::{is_broadcasted_laminar, BroadcastOrder, Committee, Election, ElectionFrame, PartyStructure};
use crate::error::{Error, Result};
use crate::numeric::{fmt_ratio, harmonic, int};
use crate::profile::SetProfile;
use crate::rules::{self, av_winners, lv_winners, Objective, TieBreak, WinnerSet, ENUMERATION_BUDGET};

/// Which committees of a tie a report compares.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Worst Limited Voting winner against the best Approval Voting winner.
    Irresolute,
    /// One committee per rule, picked by the tie-break.
    Resolute(TieBreak),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ImprovementReport {
    pub metric: Objective,
    #[serde(serialize_with = "ser_ratio")]
    pub value: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub lv_score: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub reference_score: BigRational,
    pub lv_committee: Option<Committee>,
    pub reference_committee: Option<Committee>,
    pub tie_seed: Option<u64>,
}

pub(crate) fn ser_ratio<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_ratio(r))
}

fn ratio(metric: Objective, num: BigRational, den: BigRational) -> Result<BigRational> {
    if den.is_zero() {
        return Err(Error::UndefinedRatio(format!(
            "no voter gains {} score from the reference committee",
            metric.name()
        )));
    }
    Ok(num / den)
}

/// One committee per rule, drawn with a shared tie-break.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolutePicks {
    pub lv: Committee,
    pub av: Committee,
    /// Rules whose winner set had more than one committee.
    pub ties_broken: usize,
}

/// Under a seeded tie-break the Limited Voting pick is drawn first, then the
/// Approval Voting pick, from one generator.
pub fn resolute_picks(e: &Election, tie: TieBreak) -> ResolutePicks {
    let lv = lv_winners(e);
    let av = av_winners(e.frame());
    let ties_broken = (!lv.is_unique()) as usize + (!av.is_unique()) as usize;
    let (lv, av) = match tie {
        TieBreak::Lexicographic => (lv.lexicographic_first(), av.lexicographic_first()),
        TieBreak::Seeded(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = lv.pick_with(&mut rng);
            (a, av.pick_with(&mut rng))
        }
    };
    ResolutePicks { lv, av, ties_broken }
}

/// Improvement of fixed committees, `metric(lv) / metric(av)`.
pub fn improvement_of_picks(
    frame: &ElectionFrame,
    picks: &ResolutePicks,
    metric: Objective,
    tie_seed: Option<u64>,
) -> Result<ImprovementReport> {
    let a = rules::score(metric, frame.approvals(), &picks.lv);
    let b = rules::score(metric, frame.approvals(), &picks.av);
    Ok(ImprovementReport {
        metric,
        value: ratio(metric, a.clone(), b.clone())?,
        lv_score: a,
        reference_score: b,
        lv_committee: Some(picks.lv.clone()),
        reference_committee: Some(picks.av.clone()),
        tie_seed,
    })
}

pub fn improvement(e: &Election, metric: Objective, mode: Mode) -> Result<ImprovementReport> {
    match mode {
        Mode::Irresolute => {
            let lv = lv_winners(e);
            let av = av_winners(e.frame());
            let (lo, _) = lv.score_range(e.frame().approvals(), metric, ENUMERATION_BUDGET)?;
            let (_, hi) = av.score_range(e.frame().approvals(), metric, ENUMERATION_BUDGET)?;
            Ok(ImprovementReport {
                metric,
                value: ratio(metric, lo.clone(), hi.clone())?,
                lv_score: lo,
                reference_score: hi,
                lv_committee: None,
                reference_committee: None,
                tie_seed: None,
            })
        }
        Mode::Resolute(tie) => {
            let picks = resolute_picks(e, tie);
            let seed = match tie {
                TieBreak::Seeded(s) => Some(s),
                TieBreak::Lexicographic => None,
            };
            improvement_of_picks(e.frame(), &picks, metric, seed)
        }
    }
}

pub fn cc_improvement(e: &Election, mode: Mode) -> Result<ImprovementReport> {
    improvement(e, Objective::Cc, mode)
}

pub fn pav_improvement(e: &Election, mode: Mode) -> Result<ImprovementReport> {
    improvement(e, Objective::Pav, mode)
}

pub fn av_improvement(e: &Election, mode: Mode) -> Result<ImprovementReport> {
    improvement(e, Objective::Av, mode)
}

/// Worst Limited Voting committee against the best committee overall.
pub fn ratio_to_optimum(e: &Election, metric: Objective, budget: u128) -> Result<ImprovementReport> {
    let (lo, _) = lv_winners(e).score_range(e.frame().approvals(), metric, budget)?;
    let best = rules::optimal_committees(e.frame(), metric, budget)?;
    Ok(ImprovementReport {
        metric,
        value: ratio(metric, lo.clone(), best.score().clone())?,
        lv_score: lo,
        reference_score: best.score().clone(),
        lv_committee: None,
        reference_committee: Some(best.lexicographic_first()),
        tie_seed: None,
    })
}

/// Theorem-style closed form of the CC improvement on a party-list profile.
///
/// `value` divides by the supporters of the parties Approval Voting fills
/// completely. When Approval Voting also takes part of the next party,
/// it covers that party's voters too; `covering_value` adds them to the
/// denominator and `ambiguous` marks that the two differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CcClosedForm {
    pub value: BigRational,
    pub covering_value: BigRational,
    pub ambiguous: bool,
    pub s: usize,
}

fn bpl_preconditions(p: &PartyStructure, k: usize, l: usize) -> Result<()> {
    if !(1 <= l && l <= k) {
        return Err(Error::Precondition(format!("need 1 <= l <= k, got l = {l}, k = {k}")));
    }
    if p.g() == 0 {
        return Err(Error::Precondition("no party has supporters".into()));
    }
    if !p.unaffiliated.is_empty() {
        return Err(Error::Precondition(format!(
            "{} voters approve nobody and would pad their ballots",
            p.unaffiliated.len()
        )));
    }
    if let Some((i, party)) = p.parties.iter().enumerate().find(|(_, q)| q.size() < l) {
        return Err(Error::Precondition(format!(
            "party {i} has {} candidates, fewer than l = {l}; its supporters would pad their ballots",
            party.size()
        )));
    }
    Ok(())
}

pub fn closed_form_cc_improvement_bpl(p: &PartyStructure, k: usize, l: usize) -> Result<CcClosedForm> {
    bpl_preconditions(p, k, l)?;
    let n = p.supporter_counts();
    let sizes = p.sizes();
    let g = p.g();
    let q = k.div_ceil(l).min(g);
    let num: usize = n[..q].iter().sum();
    let mut s = 0;
    let mut cum = 0;
    while s < g && cum + sizes[s] <= k {
        cum += sizes[s];
        s += 1;
    }
    let s = s.max(1);
    let cum: usize = sizes[..s].iter().sum();
    let den: usize = n[..s].iter().sum();
    let ambiguous = cum < k && s < g;
    let covering = if ambiguous { den + n[s] } else { den };
    Ok(CcClosedForm {
        value: BigRational::new(BigInt::from(num), BigInt::from(den)),
        covering_value: BigRational::new(BigInt::from(num), BigInt::from(covering)),
        ambiguous,
        s,
    })
}

/// Closed form of the PAV improvement on a party-list profile whose largest
/// party can fill the committee alone.
///
/// When fewer than `⌈k/l⌉` parties exist, the seats left after every party
/// got `l` must go to candidates nobody approves, so enough of those are
/// required.
pub fn closed_form_pav_improvement_bpl(p: &PartyStructure, k: usize, l: usize) -> Result<BigRational> {
    bpl_preconditions(p, k, l)?;
    let n = p.supporter_counts();
    let sizes = p.sizes();
    let g = p.g();
    if sizes[0] < k {
        return Err(Error::Precondition(format!(
            "largest party has {} candidates, fewer than k = {k}",
            sizes[0]
        )));
    }
    let full = k / l;
    let rest = k % l;
    let mut num = BigRational::zero();
    for &ni in &n[..full.min(g)] {
        num += int(ni) * harmonic(l);
    }
    if full < g {
        num += int(n[full]) * harmonic(rest);
    }
    let filled = full.min(g) * l + if full < g { rest } else { 0 };
    if filled < k && p.unapproved().len() < k - filled {
        return Err(Error::Precondition(format!(
            "{} seats left over but only {} candidates nobody approves",
            k - filled,
            p.unapproved().len()
        )));
    }
    let mut den = BigRational::zero();
    let mut left = k;
    for (i, &sz) in sizes.iter().enumerate() {
        if left == 0 {
            break;
        }
        let take = sz.min(left);
        den += int(n[i]) * harmonic(take);
        left -= take;
    }
    Ok(num / den)
}

/// Lower bound on the CC ratio of Limited Voting to the optimum over
/// broadcasted party-list elections: `⌈k/l⌉ / k`.
pub fn cc_guarantee_bpl(k: usize, l: usize) -> Result<BigRational> {
    if !(1 <= l && l <= k) {
        return Err(Error::invalid(format!("need 1 <= l <= k, got l = {l}, k = {k}")));
    }
    Ok(BigRational::new(BigInt::from(k.div_ceil(l)), BigInt::from(k)))
}

/// Adversarial families whose ratios approach the guarantees.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `n` voters each vote for a private candidate while all share `m-k`
    /// common ones; `l = 1`.
    AvGuarantee { n: usize, k: usize },
    /// `2k/l` voters split into coordinated pairs beat `x` voters who
    /// spread their votes over a large common pool.
    CcGuarantee { x: usize, k: usize, l: usize },
    /// `k` single-list parties of `l` candidates; the first `⌈k/l⌉` have
    /// `x+1` supporters and the rest `x`.
    CcGuaranteeBpl { x: usize, k: usize, l: usize },
}

pub fn worst_case_family(family: Family) -> Result<Election> {
    match family {
        Family::AvGuarantee { n, k } => {
            if k == 0 || n < k {
                return Err(Error::Precondition(format!("need 1 <= k <= n, got n = {n}, k = {k}")));
            }
            let m = (n + k - 1).max(2 * k);
            let approvals: Vec<Vec<usize>> = (0..n)
                .map(|i| {
                    let mut a: Vec<usize> = (k..m).collect();
                    if i < k {
                        a.insert(0, i);
                    }
                    a
                })
                .collect();
            let frame = ElectionFrame::new(m, k, 1, approvals)?;
            Election::new(frame, (0..n).map(|i| vec![i]).collect())
        }
        Family::CcGuarantee { x, k, l } => {
            if x == 0 || l == 0 || l > k || k % l != 0 || k < 2 {
                return Err(Error::Precondition(format!(
                    "need x >= 1, k >= 2 and l dividing k, got x = {x}, k = {k}, l = {l}"
                )));
            }
            let pairs = k / l;
            let m = k + l * x;
            let mut w = FixedBitSet::with_capacity(m);
            w.insert_range(0..k);
            let mut y = FixedBitSet::with_capacity(m);
            y.insert_range(k..m);
            let profile = SetProfile::from_groups(m, [(w, 2 * pairs), (y, x)])?;
            let frame = ElectionFrame::from_profile(profile, k, l)?;
            let mut ballots = Vec::with_capacity(2 * pairs + x);
            for p in 0..pairs {
                let b: Vec<usize> = (p * l..(p + 1) * l).collect();
                ballots.push(b.clone());
                ballots.push(b);
            }
            for j in 0..x {
                ballots.push((k + j * l..k + (j + 1) * l).collect());
            }
            Election::new(frame, ballots)
        }
        Family::CcGuaranteeBpl { x, k, l } => {
            if x == 0 || l == 0 || l > k {
                return Err(Error::Precondition(format!(
                    "need x >= 1 and 1 <= l <= k, got x = {x}, k = {k}, l = {l}"
                )));
            }
            let q = k.div_ceil(l);
            let m = k * l;
            let groups = (0..k).map(|i| {
                let mut s = FixedBitSet::with_capacity(m);
                s.insert_range(i * l..(i + 1) * l);
                (s, if i < q { x + 1 } else { x })
            });
            let frame = ElectionFrame::from_profile(SetProfile::from_groups(m, groups)?, k, l)?;
            Election::from_order(frame, &BroadcastOrder::identity(m))
        }
    }
}

/// CC improvement on a broadcasted laminar election where both rules are
/// resolute. Such elections never lose coverage, so a value below 1 raises
/// an internal-consistency alarm.
pub fn laminar_cc_check(e: &Election, order: &BroadcastOrder) -> Result<ImprovementReport> {
    if let Some(v) = (0..e.n()).find(|&v| e.frame().approval(v).count_ones(..) < e.l()) {
        return Err(Error::Precondition(format!("voter {v} approves fewer than l candidates")));
    }
    if !is_broadcasted_laminar(e, order) {
        return Err(Error::Precondition("election is not broadcasted laminar for this order".into()));
    }
    let unique = |w: &WinnerSet| w.is_unique();
    if !unique(&lv_winners(e)) || !unique(&av_winners(e.frame())) {
        return Err(Error::Precondition("a rule has tied winners".into()));
    }
    let report = cc_improvement(e, Mode::Irresolute)?;
    if report.value < int(1) {
        return Err(Error::Alarm(format!(
            "laminar CC improvement {} is below 1",
            fmt_ratio(&report.value)
        )));
    }
    Ok(report)
}

/// Largest CC score on a party-list profile: one seat for each of the `k`
/// best supported parties, everyone when there are at most `k` parties.
pub fn party_list_max_cc(p: &PartyStructure, k: usize) -> usize {
    p.supporter_counts().iter().take(k).sum()
}
