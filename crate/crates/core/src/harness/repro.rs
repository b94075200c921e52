//! Replays the embedded reference instances and compares against the published
//! numbers.

use num_rational::BigRational;
use serde::Serialize;

use crate::axioms::{check_jr, check_laminar_proportionality};
use crate::election::{detect_party_structure, is_broadcasted_laminar, is_consistent_with_order, Committee, Election};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::games::{LvGame, PartyStrategy};
use crate::metrics::{
    closed_form_cc_improvement_bpl, closed_form_pav_improvement_bpl, improvement, laminar_cc_check, cc_guarantee_bpl,
    ratio_to_optimum, worst_case_family, Family, Mode,
};
use crate::numeric::{fmt_ratio, rat};
use crate::oracle::{oracle_pareto_dominator, OracleBudget};
use crate::rules::{
    av_score, cc_score, limited_rule, lv_winners, optimal_committees, Objective, TieBreak, WinnerSet,
    ENUMERATION_BUDGET,
};

/// Items whose published number cannot be reproduced as printed. With
/// `l = 2` only two candidates of the large party receive any points, so
/// the limited rule fills its other two seats from the small party.
pub const KNOWN_MISMATCHES: &[&str] = &["example12 lsav"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReproItem {
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

fn item(name: &str, expected: impl Into<String>, computed: Result<String>) -> ReproItem {
    let expected = expected.into();
    let computed = computed.unwrap_or_else(|e| format!("error: {e}"));
    ReproItem { name: name.to_string(), pass: computed == expected, expected, computed }
}

fn election(name: &str) -> Result<Election> {
    fixtures::load(name)?.election()
}

fn lex(e: &Election) -> Committee {
    lv_winners(e).pick(TieBreak::Lexicographic)
}

fn all_members(w: &WinnerSet, f: impl Fn(&Committee) -> bool) -> Result<bool> {
    Ok(w.materialize(crate::rules::MATERIALIZE_CAP)?.iter().all(f))
}

fn dominates(e: &Election, better: &Committee, worse: &Committee) -> bool {
    let hits = |v: usize, w: &Committee| w.members().iter().filter(|&&c| e.frame().approval(v).contains(c)).count();
    let pairs: Vec<(usize, usize)> = (0..e.n()).map(|v| (hits(v, better), hits(v, worse))).collect();
    pairs.iter().all(|(a, b)| a >= b) && pairs.iter().any(|(a, b)| a > b)
}

fn table1() -> Result<String> {
    let e = election("table1")?;
    let lv = av_score(e.frame(), &lex(&e))?;
    let av = av_score(e.frame(), &Committee::new(4..8))?;
    let imp = improvement(&e, Objective::Av, Mode::Irresolute)?;
    Ok(format!("{lv} vs {av}, {}", fmt_ratio(&imp.value)))
}

fn ratio_item(name: &str, metric: Objective) -> Result<String> {
    let e = election(name)?;
    let r = improvement(&e, metric, Mode::Irresolute)?;
    Ok(format!(
        "{} vs {} = {} ({} / {})",
        fmt_ratio(&r.lv_score),
        fmt_ratio(&r.reference_score),
        fmt_ratio(&r.value),
        short(&r.lv_score),
        short(&r.reference_score)
    ))
}

fn short(r: &BigRational) -> String {
    format!("{:.2}", crate::numeric::to_f64(r))
}

fn table5() -> Result<String> {
    let e = election("table5")?;
    let w = lex(&e);
    let found = oracle_pareto_dominator(&e, &w, &OracleBudget::default())?
        .ok_or_else(|| Error::invalid("no dominator"))?;
    let named = Committee::new(5..10);
    Ok(format!(
        "winner {w}, dominated: {}, by {named}: {}",
        dominates(&e, &found, &w),
        dominates(&e, &named, &w)
    ))
}

fn table6() -> Result<String> {
    let e = election("table6")?;
    let f = e.frame();
    let cc = optimal_committees(f, Objective::Cc, ENUMERATION_BUDGET)?;
    let pav = optimal_committees(f, Objective::Pav, ENUMERATION_BUDGET)?;
    let lpav = limited_rule(&e, Objective::Pav, ENUMERATION_BUDGET)?;
    let (p, lp) = (pav.lexicographic_first(), lpav.lexicographic_first());
    Ok(format!(
        "max cc {}, PAV {p} cc {}, LPAV {lp} cc {}",
        fmt_ratio(cc.score()),
        cc_score(f, &p)?,
        cc_score(f, &lp)?
    ))
}

fn table7() -> Result<String> {
    let loaded = fixtures::load("table7")?;
    let e = loaded.election()?;
    let check = match laminar_cc_check(&e, &loaded.order_or_identity()) {
        Err(Error::Precondition(_)) => "precondition fails",
        Err(other) => return Err(other),
        Ok(_) => "accepted",
    };
    let plain = improvement(&e, Objective::Cc, Mode::Irresolute)?;
    Ok(format!("{check}, {}", fmt_ratio(&plain.value)))
}

fn table8() -> Result<String> {
    let e = election("table8")?;
    let v = check_jr(e.frame(), &lex(&e))?;
    let witness = v.witness.map(|w| format!("{:?}", w.voters)).unwrap_or_default();
    Ok(format!("jr holds: {}, witness {witness}", v.holds))
}

fn table9() -> Result<String> {
    let e = election("table9")?;
    let v = check_laminar_proportionality(e.frame(), &lex(&e))?;
    let witness = v.witness.map(|w| format!("{:?}", w.voters)).unwrap_or_default();
    Ok(format!("holds: {}, witness {witness}", v.holds))
}

fn table3() -> Result<String> {
    let left = fixtures::load("table3_left")?;
    let right = fixtures::load("table3_right")?;
    let order = left.order_or_identity();
    Ok(format!(
        "left {}, right {}",
        is_broadcasted_laminar(&left.election()?, &order),
        is_consistent_with_order(&right.election()?, &order)
    ))
}

fn laminar_checks() -> Result<String> {
    let mut out = Vec::new();
    for name in ["laminar_party", "laminar_mixed"] {
        let loaded = fixtures::load(name)?;
        let r = laminar_cc_check(&loaded.election()?, &loaded.order_or_identity())?;
        out.push(format!("{name} {}", fmt_ratio(&r.value)));
    }
    Ok(out.join(", "))
}

fn game(name: &str) -> Result<LvGame> {
    LvGame::new(fixtures::load(name)?.frame)
}

fn table11() -> Result<String> {
    let g = game("table11")?;
    let profile: Vec<PartyStrategy> = serde_json::from_str(fixtures::text("table11_profile")?)?;
    Ok(format!("{:?}", g.outcome(&profile)?.utilities))
}

fn example7() -> Result<String> {
    let g = game("table11")?;
    let lq = g.lq_profile()?;
    Ok(format!("gap {}, nash {}", g.quota_gap(), g.verify_equilibrium(&lq, 0)?.holds))
}

fn example8() -> Result<String> {
    let g = game("example8")?;
    let lq = g.lq_profile()?;
    Ok(format!(
        "gap {}, 2-nash {}, 1-nash {}",
        g.quota_gap(),
        g.verify_equilibrium(&lq, 2)?.holds,
        g.verify_equilibrium(&lq, 1)?.holds
    ))
}

fn example2() -> Result<String> {
    let e = election("example2")?;
    let p = detect_party_structure(e.frame())?;
    let closed = closed_form_cc_improvement_bpl(&p, e.k(), e.l())?;
    let direct = improvement(&e, Objective::Cc, Mode::Irresolute)?;
    Ok(format!(
        "g {}, lv {}, closed {}, direct {}",
        p.g(),
        lex(&e),
        fmt_ratio(&closed.value),
        fmt_ratio(&direct.value)
    ))
}

fn party_split(w: &Committee, parties: &[Vec<usize>]) -> Vec<usize> {
    parties.iter().map(|p| w.members().iter().filter(|c| p.contains(c)).count()).collect()
}

fn example10() -> Result<String> {
    let e = election("example10")?;
    let parties = vec![vec![0, 1, 2], vec![3, 4]];
    let pav = optimal_committees(e.frame(), Objective::Pav, ENUMERATION_BUDGET)?;
    let lpav = limited_rule(&e, Objective::Pav, ENUMERATION_BUDGET)?;
    let pav_ok = all_members(&pav, |w| party_split(w, &parties) == [3, 0])?;
    let lpav_ok = all_members(&lpav, |w| party_split(w, &parties) == [2, 1])?;
    Ok(format!("PAV 3+0 {pav_ok}, LPAV 2+1 {lpav_ok}"))
}

fn example12() -> Result<String> {
    let e = election("example12")?;
    let f = e.frame();
    let sav = optimal_committees(f, Objective::Sav, ENUMERATION_BUDGET)?;
    let lsav = limited_rule(&e, Objective::Sav, ENUMERATION_BUDGET)?;
    Ok(format!(
        "LSAV cc {}, SAV cc {}",
        cc_score(f, &lsav.lexicographic_first())?,
        cc_score(f, &sav.lexicographic_first())?
    ))
}

fn example12_full() -> Result<String> {
    let loaded = fixtures::load("example12")?;
    let frame = loaded.frame.with_sizes(4, 4)?;
    let e = Election::from_order(frame, &loaded.order_or_identity())?;
    let lsav = limited_rule(&e, Objective::Sav, ENUMERATION_BUDGET)?;
    let sav = optimal_committees(e.frame(), Objective::Sav, ENUMERATION_BUDGET)?;
    Ok(format!(
        "LSAV cc {}, SAV cc {}",
        cc_score(e.frame(), &lsav.lexicographic_first())?,
        cc_score(e.frame(), &sav.lexicographic_first())?
    ))
}

fn pav_bpl() -> Result<String> {
    let e = election("example2")?;
    let p = detect_party_structure(e.frame())?;
    let closed = closed_form_pav_improvement_bpl(&p, e.k(), e.l())?;
    let direct = improvement(&e, Objective::Pav, Mode::Irresolute)?;
    Ok(format!("closed {}, direct {}", fmt_ratio(&closed), fmt_ratio(&direct.value)))
}

fn families() -> Result<String> {
    let av = worst_case_family(Family::AvGuarantee { n: 6, k: 4 })?;
    let av = improvement(&av, Objective::Av, Mode::Irresolute)?;
    let thm2 = worst_case_family(Family::CcGuarantee { x: 100, k: 4, l: 2 })?;
    let thm2 = ratio_to_optimum(&thm2, Objective::Cc, ENUMERATION_BUDGET)?;
    let thm3 = worst_case_family(Family::CcGuaranteeBpl { x: 100, k: 4, l: 2 })?;
    let thm3 = ratio_to_optimum(&thm3, Objective::Cc, ENUMERATION_BUDGET)?;
    Ok(format!(
        "av {}, cc {}, bpl cc {} -> {}",
        fmt_ratio(&av.value),
        fmt_ratio(&thm2.value),
        fmt_ratio(&thm3.value),
        fmt_ratio(&cc_guarantee_bpl(4, 2)?)
    ))
}

/// Every fixture check, in a fixed order.
pub fn run_repro() -> Vec<ReproItem> {
    let third = |x: i128, y: i128| fmt_ratio(&rat(x, y));
    vec![
        item("table1 av scores and improvement", "4 vs 24, 1/6", table1()),
        item("table2 cc improvement", "5 vs 6 = 5/6 (5.00 / 6.00)", ratio_item("table2", Objective::Cc)),
        item("table3 broadcast order", "left true, right false", table3()),
        item("table4a pav improvement", format!("15/2 vs 47/6 = {} (7.50 / 7.83)", third(45, 47)), ratio_item("table4a", Objective::Pav)),
        item("table4b pav improvement", "20/3 vs 25/4 = 16/15 (6.67 / 6.25)", ratio_item("table4b", Objective::Pav)),
        item("table5 pareto dominator", "winner {0,1,2,3,4}, dominated: true, by {5,6,7,8,9}: true", table5()),
        item("table6 lpav vs pav coverage", "max cc 6, PAV {1,2,3,4} cc 6, LPAV {0,1,2,3} cc 5", table6()),
        item("table7 laminar check", "precondition fails, 4/5", table7()),
        item("table8 jr", "jr holds: false, witness [0, 1]", table8()),
        item("table9 laminar proportionality", "holds: false, witness [2, 3]", table9()),
        item("laminar cc bound", "laminar_party 9/4, laminar_mixed 1", laminar_checks()),
        item("table11 utilities", "[2, 4]", table11()),
        item("example7 lower quota nash", "gap 0, nash true", example7()),
        item("example8 lower quota", "gap 2, 2-nash true, 1-nash false", example8()),
        item("example2 closed form", "g 3, lv {0,1,2,8,9,10,11,12}, closed 9/4, direct 9/4", example2()),
        item("example2 pav closed form", pav_bpl_expected(), pav_bpl()),
        item("example10 lpav split", "PAV 3+0 true, LPAV 2+1 true", example10()),
        item("example12 lsav", "LSAV cc 10, SAV cc 1", example12()),
        item("example12 lsav with l = k", "LSAV cc 10, SAV cc 1", example12_full()),
        item("guarantee families", "av 1/6, cc 1/26, bpl cc 101/201 -> 1/2", families()),
    ]
}

fn pav_bpl_expected() -> String {
    // LV: 4·H(3) + 3·H(3) + 2·H(2); AV: 4·H(8).
    let lv = rat(4 * 11, 6) + rat(3 * 11, 6) + rat(2 * 3, 2);
    let av = rat(4 * 761, 280);
    let v = fmt_ratio(&(lv / av));
    format!("closed {v}, direct {v}")
}
