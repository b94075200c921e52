mod common;

use limvote::axioms::{check_ejr, check_jr, check_lower_quota, check_pjr, Axiom, AxiomVerdict};
use limvote::election::{
    detect_party_structure, gen_ballots, is_broadcasted_party_list, is_consistent_with_order, is_laminar, BroadcastOrder,
    Committee, Election, ElectionFrame, PaddingPolicy,
};
use limvote::games::LvGame;
use limvote::generate::{gen_disjoint, gen_party_list, DisjointParams, PartitionMode, PartyListSpec};
use limvote::metrics::{cc_guarantee_bpl, improvement, ratio_to_optimum, Mode};
use limvote::numeric::{harmonic, int, rat};
use limvote::oracle::oracle_is_laminar;
use limvote::rules::{av_score, av_winners, lv_score, lv_winners, Objective, ENUMERATION_BUDGET};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sorted_lists(f: &ElectionFrame) -> Vec<Vec<usize>> {
    let mut v = f.approvals().to_lists();
    v.sort();
    v
}

fn random_committee<R: Rng>(r: &mut R, m: usize, k: usize) -> Committee {
    let mut c: Vec<usize> = (0..m).collect();
    c.shuffle(r);
    Committee::new(c.into_iter().take(k))
}

fn check_witness(frame: &ElectionFrame, w: &Committee, v: &AxiomVerdict) -> Result<(), TestCaseError> {
    let Some(wit) = &v.witness else {
        prop_assert!(v.holds);
        return Ok(());
    };
    prop_assert!(!v.holds);
    let (n, k) = (frame.n(), frame.k());
    let level = wit.level;
    prop_assert!(level >= 1);
    prop_assert!(wit.voters.len() * k >= level * n, "group too small");
    prop_assert!(wit.common.len() >= level, "not cohesive");
    for &c in &wit.common {
        prop_assert!(wit.voters.iter().all(|&i| frame.approval(i).contains(c)));
    }
    let hits = |i: usize| w.members().iter().filter(|&&c| frame.approval(i).contains(c)).count();
    match v.axiom {
        Axiom::Jr => prop_assert!(wit.voters.iter().all(|&i| hits(i) == 0)),
        Axiom::Pjr => {
            let covered = w.members().iter().filter(|&&c| wit.voters.iter().any(|&i| frame.approval(i).contains(c))).count();
            prop_assert!(covered < level);
        }
        Axiom::Ejr => prop_assert!(wit.voters.iter().all(|&i| hits(i) < level)),
        _ => {}
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn party_structure_round_trips(
        sizes in prop::collection::vec(1usize..5, 1..5),
        seed in any::<u64>(),
    ) {
        let mut r = rng(seed);
        let supporters: Vec<usize> = sizes.iter().map(|_| r.random_range(1..5)).collect();
        let m: usize = sizes.iter().sum();
        let f = common::party_frame(&sizes, &supporters, m.min(3), 1, r.random_range(0..3));
        let mut lists = f.approvals().to_lists();
        lists.shuffle(&mut r);
        let f = ElectionFrame::new(f.m(), f.k(), f.l(), lists).unwrap();
        let p = detect_party_structure(&f).unwrap();
        prop_assert_eq!(p.to_profile().to_lists(), f.approvals().to_lists());
        let counts = p.supporter_counts();
        prop_assert!(counts.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn generated_party_lists_are_broadcast(
        sizes in prop::collection::vec(1usize..6, 1..5),
        seed in any::<u64>(),
    ) {
        let mut r = rng(seed);
        let supporters = sizes.iter().map(|_| r.random_range(1..6)).collect();
        let m: usize = sizes.iter().sum();
        let k = r.random_range(1..=m);
        let spec = PartyListSpec { sizes, supporters, k, l: r.random_range(1..=k), unapproved: 0 };
        let g = gen_party_list(&spec).unwrap();
        prop_assert!(is_broadcasted_party_list(&g.election, &g.order));
    }

    #[test]
    fn disjoint_without_noise_is_party_list(seed in any::<u64>(), g in 1usize..6, random_partition in any::<bool>()) {
        let partition = if random_partition { PartitionMode::RandomPartition } else { PartitionMode::UniformPartyChoice };
        let params = DisjointParams { n: 40, m: 12, g, p: 0.5, phi: 0.0, partition };
        let a = gen_disjoint(&params, &mut rng(seed)).unwrap();
        let b = gen_disjoint(&params, &mut rng(seed)).unwrap();
        prop_assert_eq!(a.approvals.to_lists(), b.approvals.to_lists());
        let f = ElectionFrame::from_profile(a.approvals, 4, 2).unwrap();
        prop_assert!(detect_party_structure(&f).is_ok());
    }

    #[test]
    fn laminar_matches_definition(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = r.random_range(1..=6);
        let n = r.random_range(1..=6);
        let k = r.random_range(1..=m);
        // Few distinct sets, so laminar structure actually shows up.
        let pool: Vec<Vec<usize>> = (0..3).map(|_| (0..m).filter(|_| r.random_bool(0.5)).collect()).collect();
        let lists: Vec<Vec<usize>> = (0..n).map(|_| pool[r.random_range(0..pool.len())].clone()).collect();
        let f = ElectionFrame::new(m, k, 1, lists).unwrap();
        prop_assert_eq!(is_laminar(&f), oracle_is_laminar(&f), "{:?} k={}", sorted_lists(&f), k);
    }

    #[test]
    fn ballots_follow_the_order(seed in any::<u64>()) {
        let mut r = rng(seed);
        let e = common::random_election(&mut r, 8, 6);
        let mut ranking: Vec<usize> = (0..e.m()).collect();
        ranking.shuffle(&mut r);
        let order = BroadcastOrder::new(ranking).unwrap();
        let f = e.frame();
        let ballots = gen_ballots(f.approvals(), &order, f.l(), PaddingPolicy::Broadcast).unwrap();
        let built = Election::new(f.clone(), ballots.clone()).unwrap();
        prop_assert!(built.validate().is_valid());
        prop_assert!(is_consistent_with_order(&built, &order));
        for (v, b) in ballots.iter().enumerate() {
            let a = f.approval(v);
            if a.count_ones(..) < f.l() {
                let pad: Vec<usize> = order.ranking().iter().copied().filter(|&c| !a.contains(c)).take(f.l() - a.count_ones(..)).collect();
                prop_assert!(a.ones().all(|c| b.contains(&c)));
                prop_assert!(pad.iter().all(|c| b.contains(c)));
            }
        }
    }

    #[test]
    fn limited_score_never_exceeds_approval_score(seed in any::<u64>()) {
        let mut r = rng(seed);
        let e = common::random_election(&mut r, 8, 6);
        if (0..e.n()).all(|v| e.frame().approval(v).count_ones(..) >= e.l()) {
            let w = random_committee(&mut r, e.m(), e.k());
            prop_assert!(lv_score(&e, &w).unwrap() <= av_score(e.frame(), &w).unwrap());
        }
    }

    #[test]
    fn full_ballots_reproduce_approval_voting(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = r.random_range(2..=8);
        let k = r.random_range(1..=m);
        let n = r.random_range(1..=6);
        let lists: Vec<Vec<usize>> = (0..n).map(|_| random_committee(&mut r, m, k).into_vec()).collect();
        let f = ElectionFrame::new(m, k, k, lists.clone()).unwrap();
        let e = Election::new(f, lists).unwrap();
        prop_assert_eq!(lv_winners(&e), av_winners(e.frame()));
        prop_assert_eq!(improvement(&e, Objective::Av, Mode::Irresolute).unwrap().value, int(1));
    }

    #[test]
    fn av_improvement_at_most_one(seed in any::<u64>()) {
        let e = common::random_election(&mut rng(seed), 8, 6);
        if let Ok(r) = improvement(&e, Objective::Av, Mode::Irresolute) {
            prop_assert!(r.value <= int(1));
        }
    }

    #[test]
    fn axiom_chain_and_witnesses(seed in any::<u64>()) {
        let mut r = rng(seed);
        let e = common::random_election(&mut r, 8, 7);
        let f = e.frame();
        let w = random_committee(&mut r, f.m(), f.k());
        let (jr, pjr, ejr) = (check_jr(f, &w).unwrap(), check_pjr(f, &w).unwrap(), check_ejr(f, &w).unwrap());
        prop_assert!(!ejr.holds || pjr.holds);
        prop_assert!(!pjr.holds || jr.holds);
        for v in [&jr, &pjr, &ejr] {
            check_witness(f, &w, v)?;
        }
    }

    #[test]
    fn lower_quota_implies_jr_on_party_lists(
        sizes in prop::collection::vec(1usize..5, 1..5),
        seed in any::<u64>(),
    ) {
        let mut r = rng(seed);
        let supporters: Vec<usize> = sizes.iter().map(|_| r.random_range(1..6)).collect();
        let m: usize = sizes.iter().sum();
        let k = r.random_range(1..=m);
        let f = common::party_frame(&sizes, &supporters, k, 1, 0);
        let p = detect_party_structure(&f).unwrap();
        let w = random_committee(&mut r, m, k);
        if check_lower_quota(&p, f.n(), k, &w).unwrap().holds {
            prop_assert!(check_jr(&f, &w).unwrap().holds);
        }
    }

    #[test]
    fn bpl_guarantee_is_a_lower_bound(seed in any::<u64>(), k in prop::sample::select(vec![4usize, 6, 8]), li in 0usize..3) {
        let l = [1, 2, k][li];
        let spec = common::random_bpl_spec(&mut rng(seed), k, l);
        let e = gen_party_list(&spec).unwrap().election;
        let ratio = ratio_to_optimum(&e, Objective::Cc, ENUMERATION_BUDGET).unwrap().value;
        prop_assert!(ratio >= cc_guarantee_bpl(k, l).unwrap());
    }

    #[test]
    fn lq_profiles_are_sound(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = r.random_range(1..=3);
        let l = r.random_range(1..=2);
        let supporters: Vec<usize> = (0..g).map(|_| r.random_range(2..=6)).collect();
        let n: usize = supporters.iter().sum();
        let s_min = *supporters.iter().min().unwrap();
        let k_min = (l * n).div_ceil(s_min);
        let k = r.random_range(k_min..=(k_min + 4).min(l * n));
        let quotas: Vec<usize> = supporters.iter().map(|s| k * s / n).collect();
        let gap = k - quotas.iter().sum::<usize>();
        let sizes: Vec<usize> = quotas.iter().map(|&q| (q + gap).max(l)).collect();
        let game = LvGame::new(common::party_frame(&sizes, &supporters, k, l, 0)).unwrap();
        prop_assert!(game.check_lq_preconditions().is_ok());
        prop_assert!(quotas.iter().zip(&supporters).all(|(&q, &s)| s * l >= q));
        let lq = game.lq_profile().unwrap();
        let outcome = game.outcome(&lq).unwrap();
        for s in &lq {
            prop_assert!(outcome.winners.has_superset_of(&s.supported()));
        }
        prop_assert!(game.verify_equilibrium(&lq, gap).unwrap().holds);
        let room = game.parties().parties.iter().zip(game.quotas())
            .any(|(p, q)| p.supporters() * l >= q + gap && p.size() >= q + gap);
        if gap > 0 && room {
            prop_assert!(!game.verify_equilibrium(&lq, gap - 1).unwrap().holds);
        }
    }
}

#[test]
fn uniform_party_choice_concentrates() {
    let params = DisjointParams { n: 1500, m: 24, g: 6, p: 0.5, phi: 0.0, partition: PartitionMode::UniformPartyChoice };
    let sigma = (1500.0 * (1.0 / 6.0) * (5.0 / 6.0f64)).sqrt();
    for seed in 0..20 {
        let d = gen_disjoint(&params, &mut rng(seed)).unwrap();
        let mut sizes = [0usize; 6];
        for &p in &d.voter_party {
            sizes[p] += 1;
        }
        for s in sizes {
            assert!((s as f64 - 250.0).abs() <= 4.0 * sigma, "seed {seed}: {sizes:?}");
        }
    }
}

#[test]
fn harmonic_numbers_are_exact() {
    assert_eq!(harmonic(4), rat(25, 12));
}
