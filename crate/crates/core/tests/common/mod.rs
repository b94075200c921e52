#![allow(dead_code)]

use limvote::election::{Election, ElectionFrame};
use limvote::games::{LvGame, PartyStrategy};
use limvote::generate::PartyListSpec;
use rand::seq::SliceRandom;
use rand::Rng;

/// Random approvals and random valid ballots.
pub fn random_election<R: Rng>(rng: &mut R, max_m: usize, max_n: usize) -> Election {
    let m = rng.random_range(2..=max_m);
    let n = rng.random_range(1..=max_n);
    let k = rng.random_range(1..=m);
    let l = rng.random_range(1..=k);
    let density = rng.random_range(0.2..0.8);
    let approvals: Vec<Vec<usize>> = (0..n).map(|_| (0..m).filter(|_| rng.random_bool(density)).collect()).collect();
    let ballots = approvals
        .iter()
        .map(|a| {
            let mut pick = a.clone();
            pick.shuffle(rng);
            if pick.len() >= l {
                pick.truncate(l);
            } else {
                let mut rest: Vec<usize> = (0..m).filter(|c| !a.contains(c)).collect();
                rest.shuffle(rng);
                pick.extend(rest.into_iter().take(l - a.len()));
            }
            pick.sort_unstable();
            pick
        })
        .collect();
    let frame = ElectionFrame::new(m, k, l, approvals).unwrap();
    Election::new_valid(frame, ballots).unwrap()
}

/// Party-list frame: party `i` owns the next `sizes[i]` ids and the next
/// `supporters[i]` voters.
pub fn party_frame(sizes: &[usize], supporters: &[usize], k: usize, l: usize, unapproved: usize) -> ElectionFrame {
    let m = sizes.iter().sum::<usize>() + unapproved;
    let mut lists = Vec::new();
    let mut next = 0;
    for (&s, &n) in sizes.iter().zip(supporters) {
        lists.extend(std::iter::repeat_n((next..next + s).collect::<Vec<_>>(), n));
        next += s;
    }
    ElectionFrame::new(m, k, l, lists).unwrap()
}

/// Random broadcasted party-list spec with pairwise distinct supporter
/// counts and every party holding at least `l` candidates.
pub fn random_bpl_spec<R: Rng>(rng: &mut R, k: usize, l: usize) -> PartyListSpec {
    let g = rng.random_range(1..=6);
    let mut pool: Vec<usize> = (1..=30).collect();
    pool.shuffle(rng);
    let supporters: Vec<usize> = pool.into_iter().take(g).collect();
    let sizes: Vec<usize> = (0..g).map(|_| rng.random_range(l..=k + 2)).collect();
    let short = k.saturating_sub(sizes.iter().sum());
    PartyListSpec { sizes, supporters, k, l, unapproved: short + rng.random_range(0..=k) }
}

/// Small party-list game with any shape.
pub fn random_game<R: Rng>(rng: &mut R, max_parties: usize, max_supporters: usize, max_size: usize) -> LvGame {
    let g = rng.random_range(1..=max_parties);
    let l = rng.random_range(1..=3);
    let sizes: Vec<usize> = (0..g).map(|_| rng.random_range(l..=max_size.max(l))).collect();
    let supporters: Vec<usize> = (0..g).map(|_| rng.random_range(1..=max_supporters)).collect();
    let m = sizes.iter().sum::<usize>();
    let k = rng.random_range(l..=m);
    LvGame::new(party_frame(&sizes, &supporters, k, l, 0)).unwrap()
}

/// Each supporter votes for `l` random candidates of the party.
pub fn random_strategy<R: Rng>(rng: &mut R, game: &LvGame, party: usize) -> PartyStrategy {
    let p = &game.parties().parties[party];
    let l = game.frame().l();
    let ballots = (0..p.supporters())
        .map(|_| {
            let mut c = p.candidates.clone();
            c.shuffle(rng);
            let mut b: Vec<usize> = c.into_iter().take(l).collect();
            b.sort_unstable();
            (b, 1)
        })
        .collect();
    PartyStrategy(ballots)
}
