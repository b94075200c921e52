//! Acceptance suite. Prints one line per criterion and exits non-zero when
//! a criterion fails for a reason other than a documented fixture mismatch.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use limvote::election::{detect_party_structure, Committee, Election};
use limvote::games::LvGame;
use limvote::generate::gen_party_list;
use limvote::harness::repro::{run_repro, KNOWN_MISMATCHES};
use limvote::harness::{run_sweep, summarize, trials_csv, BallotSize, SweepConfig};
use limvote::metrics::{
    closed_form_cc_improvement_bpl, closed_form_pav_improvement_bpl, improvement, ratio_to_optimum, worst_case_family,
    Family, Mode,
};
use limvote::numeric::{fmt_ratio, rat, to_f64};
use limvote::oracle::{oracle_argmax, oracle_argmax_on_ballots, oracle_best_response, OracleBudget, OracleObjective};
use limvote::par::Execution;
use limvote::rules::{
    av_winners, limited_rule, lv_winners, optimal_committees, Objective, WinnerSet, ENUMERATION_BUDGET, MATERIALIZE_CAP,
};
use limvote::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Verdict {
    Pass(String),
    /// Failed, but only on items recorded as irreproducible as printed.
    Documented(String),
    Fail(String),
}

fn fixtures() -> Verdict {
    let items = run_repro();
    let failed: Vec<_> = items.iter().filter(|i| !i.pass).collect();
    let detail = |v: &[&limvote::harness::repro::ReproItem]| {
        v.iter()
            .map(|i| format!("{}: expected {:?}, computed {:?}", i.name, i.expected, i.computed))
            .collect::<Vec<_>>()
            .join("; ")
    };
    let summary = format!("{}/{} items exact", items.len() - failed.len(), items.len());
    if failed.is_empty() {
        Verdict::Pass(summary)
    } else if failed.iter().all(|i| KNOWN_MISMATCHES.contains(&i.name.as_str())) {
        Verdict::Documented(format!("{summary}; {}", detail(&failed)))
    } else {
        Verdict::Fail(format!("{summary}; {}", detail(&failed)))
    }
}

fn closed_forms() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut cc_checked, mut pav_checked, mut quarantined) = (0, 0, 0);
    for k in [4usize, 6, 8] {
        for l in [1, 2, k] {
            for _ in 0..1000 {
                let spec = common::random_bpl_spec(&mut rng, k, l);
                let e = gen_party_list(&spec).unwrap().election;
                let parties = detect_party_structure(e.frame()).unwrap();
                match closed_form_cc_improvement_bpl(&parties, k, l) {
                    Ok(cf) => {
                        let direct = improvement(&e, Objective::Cc, Mode::Irresolute).unwrap().value;
                        if cf.ambiguous {
                            quarantined += 1;
                            let extra = parties.supporter_counts()[cf.s];
                            let num = cf.value.clone() * rat(parties.supporter_counts()[..cf.s].iter().sum::<usize>() as i128, 1);
                            let den = parties.supporter_counts()[..cf.s].iter().sum::<usize>() + extra;
                            let expected = num / rat(den as i128, 1);
                            if cf.value == direct || direct != cf.covering_value || direct != expected {
                                return Verdict::Fail(format!(
                                    "k={k} l={l} {spec:?}: ambiguous instance direct {} closed {} covering {}",
                                    fmt_ratio(&direct),
                                    fmt_ratio(&cf.value),
                                    fmt_ratio(&cf.covering_value)
                                ));
                            }
                        } else {
                            cc_checked += 1;
                            if cf.value != direct {
                                return Verdict::Fail(format!(
                                    "k={k} l={l} {spec:?}: cc closed {} direct {}",
                                    fmt_ratio(&cf.value),
                                    fmt_ratio(&direct)
                                ));
                            }
                        }
                    }
                    Err(Error::Precondition(_)) => {}
                    Err(e) => return Verdict::Fail(format!("{spec:?}: {e}")),
                }
                match closed_form_pav_improvement_bpl(&parties, k, l) {
                    Ok(cf) => {
                        pav_checked += 1;
                        let direct = improvement(&e, Objective::Pav, Mode::Irresolute).unwrap().value;
                        if cf != direct {
                            return Verdict::Fail(format!(
                                "k={k} l={l} {spec:?}: pav closed {} direct {}",
                                fmt_ratio(&cf),
                                fmt_ratio(&direct)
                            ));
                        }
                    }
                    Err(Error::Precondition(_)) => {}
                    Err(e) => return Verdict::Fail(format!("{spec:?}: {e}")),
                }
            }
        }
    }
    Verdict::Pass(format!(
        "9000 elections; cc equal on {cc_checked}, {quarantined} ambiguous quarantined with the covering term; pav equal on {pav_checked}"
    ))
}

fn asymptotics() -> Verdict {
    for n in 2..=50 {
        for k in [1, 2, 4] {
            if k > n {
                continue;
            }
            let e = worst_case_family(Family::AvGuarantee { n, k }).unwrap();
            let v = improvement(&e, Objective::Av, Mode::Irresolute).unwrap().value;
            if v != rat(1, n as i128) {
                return Verdict::Fail(format!("av family n={n} k={k}: {}", fmt_ratio(&v)));
            }
        }
    }
    let mut worst_thm2: f64 = 0.0;
    for (k, l) in [(2, 1), (4, 2), (4, 1), (6, 3), (8, 4), (8, 8)] {
        let x = 10_000 * 2 * k / l;
        let e = worst_case_family(Family::CcGuarantee { x, k, l }).unwrap();
        let v = ratio_to_optimum(&e, Objective::Cc, ENUMERATION_BUDGET).unwrap().value;
        let exact = rat((2 * k / l) as i128, (2 * k / l + x) as i128);
        if v != exact || to_f64(&v) > 1e-3 {
            return Verdict::Fail(format!("cc family k={k} l={l}: {}", fmt_ratio(&v)));
        }
        worst_thm2 = worst_thm2.max(to_f64(&v));
    }
    let mut worst_thm3: f64 = 0.0;
    for k in [4usize, 6, 8] {
        for l in [1, 2, k] {
            let e = worst_case_family(Family::CcGuaranteeBpl { x: 10_000, k, l }).unwrap();
            let v = to_f64(&ratio_to_optimum(&e, Objective::Cc, ENUMERATION_BUDGET).unwrap().value);
            let target = k.div_ceil(l) as f64 / k as f64;
            if (v - target).abs() > 1e-3 {
                return Verdict::Fail(format!("bpl family k={k} l={l}: {v} vs {target}"));
            }
            worst_thm3 = worst_thm3.max((v - target).abs());
        }
    }
    Verdict::Pass(format!(
        "av = 1/n for n in 2..=50; general cc ratio <= {worst_thm2:.2e}; bpl cc off by <= {worst_thm3:.2e}"
    ))
}

fn as_set(w: &WinnerSet) -> BTreeSet<Committee> {
    w.materialize(MATERIALIZE_CAP).unwrap().into_iter().collect()
}

fn compare(name: &str, e: &Election, main: &WinnerSet, oracle: limvote::oracle::OracleWinners) -> Option<String> {
    let expected: BTreeSet<Committee> = oracle.committees.into_iter().collect();
    let got = as_set(main);
    if got != expected {
        return Some(format!("{name} on {:?}: {} main vs {} oracle committees", e.ballots(), got.len(), expected.len()));
    }
    None
}

fn oracle_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let budget = OracleBudget::default();
    let elections = 250;
    for _ in 0..elections {
        let e = common::random_election(&mut rng, 8, 6);
        let f = e.frame();
        let mut checks: Vec<(String, WinnerSet, limvote::oracle::OracleWinners)> = vec![
            ("av".into(), av_winners(f), oracle_argmax(&e, OracleObjective::Av, &budget).unwrap()),
            ("lv".into(), lv_winners(&e), oracle_argmax(&e, OracleObjective::Lv, &budget).unwrap()),
        ];
        let pairs = [
            (Objective::Cc, OracleObjective::Cc),
            (Objective::Pav, OracleObjective::Pav),
            (Objective::Sav, OracleObjective::Sav),
            (Objective::Lcc(2), OracleObjective::Lcc(2)),
        ];
        for (main, oracle) in pairs {
            checks.push((
                main.name(),
                optimal_committees(f, main, ENUMERATION_BUDGET).unwrap(),
                oracle_argmax(&e, oracle, &budget).unwrap(),
            ));
            checks.push((
                format!("limited {}", main.name()),
                limited_rule(&e, main, ENUMERATION_BUDGET).unwrap(),
                oracle_argmax_on_ballots(&e, oracle, &budget).unwrap(),
            ));
        }
        for (name, main, oracle) in checks {
            if main.score() != &oracle.score {
                return Verdict::Fail(format!("{name}: score {} vs oracle {}", fmt_ratio(main.score()), fmt_ratio(&oracle.score)));
            }
            if let Some(msg) = compare(&name, &e, &main, oracle) {
                return Verdict::Fail(msg);
            }
        }
    }
    let games = 80;
    for _ in 0..games {
        let game = common::random_game(&mut rng, 3, 4, 5);
        let profile: Vec<_> = (0..game.parties().g()).map(|i| common::random_strategy(&mut rng, &game, i)).collect();
        let total = game.tallies(&profile).unwrap();
        for (i, p) in game.parties().parties.iter().enumerate() {
            let own = profile[i].counts(game.frame().m());
            let others: Vec<usize> = total.iter().zip(&own).map(|(a, b)| a - b).collect();
            let (_, main) = game.best_response(i, &others).unwrap();
            let oracle =
                oracle_best_response(&others, game.frame().k(), game.frame().l(), &p.candidates, p.supporters(), &budget)
                    .unwrap();
            if main != oracle {
                return Verdict::Fail(format!(
                    "best response of party {i} in {:?}: {main} vs oracle {oracle}",
                    game.frame().approvals().to_lists()
                ));
            }
        }
    }
    Verdict::Pass(format!("{elections} elections x 10 rules, {games} games"))
}

/// Draws games meeting the lower-quota preconditions. Games where some
/// party cannot give every one of its quota candidates a vote
/// (`n_i * l < q_i`) are skipped and counted: there the quota seats can be
/// lost to zero-vote ties, so the propositions do not apply.
fn random_lq_game<R: Rng>(rng: &mut R, starved: &mut usize) -> LvGame {
    loop {
        let g = rng.random_range(1..=4);
        let l = rng.random_range(1..=3);
        let supporters: Vec<usize> = (0..g).map(|_| rng.random_range(1..=8)).collect();
        let n: usize = supporters.iter().sum();
        let k = rng.random_range(l..=12);
        let quotas: Vec<usize> = supporters.iter().map(|s| k * s / n).collect();
        let gap = k - quotas.iter().sum::<usize>();
        if quotas.iter().any(|&q| q < l) {
            continue;
        }
        if quotas.iter().zip(&supporters).any(|(&q, &s)| s * l < q) {
            *starved += 1;
            continue;
        }
        let sizes: Vec<usize> = quotas.iter().map(|&q| q + gap + rng.random_range(0..=2)).collect();
        let game = LvGame::new(common::party_frame(&sizes, &supporters, k, l, 0)).unwrap();
        if game.check_lq_preconditions().is_ok() {
            return game;
        }
    }
}

fn game_properties() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let games = 600;
    let (mut with_gap, mut starved, mut no_room) = (0, 0, 0);
    for _ in 0..games {
        let game = random_lq_game(&mut rng, &mut starved);
        let lq = game.lq_profile().unwrap();
        let outcome = game.outcome(&lq).unwrap();
        let quotas = game.quotas();
        let shape = game.frame().approvals().to_lists();
        for (i, s) in lq.iter().enumerate() {
            if !outcome.winners.has_superset_of(&s.supported()) {
                return Verdict::Fail(format!("(a) party {i} in {shape:?}"));
            }
        }
        for w in outcome.winners.iter() {
            for (i, p) in game.parties().parties.iter().enumerate() {
                let seats = w.members().iter().filter(|c| p.candidates.contains(c)).count();
                if seats < quotas[i] {
                    return Verdict::Fail(format!("(b) party {i} gets {seats} < {} in {w} of {shape:?}", quotas[i]));
                }
            }
        }
        let gap = game.quota_gap();
        with_gap += (gap > 0) as usize;
        if !game.verify_equilibrium(&lq, gap).unwrap().holds {
            return Verdict::Fail(format!("(c) not {gap}-Nash in {shape:?}"));
        }
        // A free seat can only be claimed by a party with enough votes and
        // candidates to support `q_i + gap` of them.
        let room = game
            .parties()
            .parties
            .iter()
            .zip(&quotas)
            .any(|(p, &q)| p.supporters() * game.frame().l() >= q + gap && p.size() >= q + gap);
        if gap > 0 && !room {
            no_room += 1;
            continue;
        }
        if game.verify_equilibrium(&lq, 0).unwrap().holds != (gap == 0) {
            return Verdict::Fail(format!("(d) Nash status wrong for gap {gap} in {shape:?}"));
        }
    }
    Verdict::Pass(format!(
        "{games} games, {with_gap} with a positive quota gap; {starved} draws skipped with n_i*l < q_i; \
         (d) not applicable to {no_room} games where no party can reach q_i + gap supported candidates"
    ))
}

fn desk_trend() -> Verdict {
    let cfg = SweepConfig {
        phi: vec![0.0, 0.1, 0.25, 1.0],
        g: vec![6],
        k: vec![8],
        l: vec![BallotSize::Fixed(1), BallotSize::Fixed(4), BallotSize::Fixed(8)],
        ..SweepConfig::desk()
    };
    let records = run_sweep(&cfg, Execution::default()).unwrap();
    let summaries = summarize(&records);
    let median = |phi: f64, l: usize| {
        summaries
            .iter()
            .find(|s| s.metric == "cc" && s.phi == phi && s.l == l)
            .map(|s| s.stats.median)
            .unwrap()
    };
    let trend = [median(0.0, 4), median(0.1, 4), median(0.25, 4)];
    let at_one = median(1.0, 4);
    let (l1, lk) = (median(0.0, 1), median(0.0, 8));
    let detail = format!(
        "medians at l=4 over phi 0, 0.1, 0.25: {:.4}, {:.4}, {:.4}; phi=1: {at_one:.4}; phi=0 l=1 {l1:.4} vs l=k {lk:.4}",
        trend[0], trend[1], trend[2]
    );
    if trend[0] > trend[1] && trend[1] > trend[2] && (0.95..=1.05).contains(&at_one) && l1 > lk {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn determinism() -> Verdict {
    let cfg = SweepConfig {
        phi: vec![0.0, 0.25, 1.0],
        g: vec![2, 6],
        k: vec![8],
        trials: 20,
        seed: 17,
        ..SweepConfig::desk()
    };
    let run = |threads: usize, exec: Execution| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| trials_csv(&cfg, &run_sweep(&cfg, exec).unwrap()).unwrap())
    };
    let reference = run(1, Execution::Sequential);
    for (threads, exec) in [(1, Execution::Sequential), (1, Execution::Parallel), (2, Execution::Parallel), (8, Execution::Parallel)] {
        if run(threads, exec) != reference {
            return Verdict::Fail(format!("output differs with {threads} workers ({exec:?})"));
        }
    }
    Verdict::Pass(format!("{} bytes identical over 5 runs with 1, 2 and 8 workers", reference.len()))
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 7] = [
        ("fixture reproduction", fixtures),
        ("closed forms vs direct", closed_forms),
        ("guarantee asymptotics", asymptotics),
        ("oracle equivalence", oracle_equivalence),
        ("lv-game properties", game_properties),
        ("desk sweep trend", desk_trend),
        ("sweep determinism", determinism),
    ];
    let mut hard_failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match verdict {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Documented(d) => ("FAIL (documented mismatch)", d),
            Verdict::Fail(d) => {
                hard_failures += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] criterion {} {name} ({secs:.1}s): {detail}", i + 1);
    }
    if hard_failures > 0 {
        std::process::exit(1);
    }
}
