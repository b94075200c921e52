//! Synthetic profiles: party lists, perturbed disjoint models, Mallows
//! orders and laminar blueprints.

use fixedbitset::FixedBitSet;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::election::{gen_ballots, BroadcastOrder, Election, ElectionFrame, PaddingPolicy};
use crate::error::{Error, Result};
use crate::profile::SetProfile;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartyListSpec {
    pub sizes: Vec<usize>,
    pub supporters: Vec<usize>,
    pub k: usize,
    pub l: usize,
    /// Extra candidates that nobody approves.
    pub unapproved: usize,
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub election: Election,
    pub order: BroadcastOrder,
    /// Voters who approve fewer than `l` candidates and pad their ballot.
    pub padded: usize,
}

/// A broadcasted party-list election. Party `i` owns the next `sizes[i]`
/// candidate ids and is supported by the next `supporters[i]` voters; the
/// order is the identity, so ballots take each party's lowest ids.
pub fn gen_party_list(spec: &PartyListSpec) -> Result<Generated> {
    if spec.sizes.len() != spec.supporters.len() {
        return Err(Error::invalid("sizes and supporters differ in length"));
    }
    if spec.sizes.contains(&0) {
        return Err(Error::invalid("every party needs a candidate"));
    }
    let m = spec.sizes.iter().sum::<usize>() + spec.unapproved;
    let mut groups = Vec::new();
    let mut next = 0;
    for (&size, &count) in spec.sizes.iter().zip(&spec.supporters) {
        let mut s = FixedBitSet::with_capacity(m);
        s.insert_range(next..next + size);
        next += size;
        groups.push((s, count));
    }
    let frame = ElectionFrame::from_profile(SetProfile::from_groups(m, groups)?, spec.k, spec.l)?;
    let padded = spec
        .sizes
        .iter()
        .zip(&spec.supporters)
        .filter(|(s, _)| **s < spec.l)
        .map(|(_, n)| n)
        .sum();
    let order = BroadcastOrder::identity(m);
    let election = Election::from_order(frame, &order)?;
    Ok(Generated { election, order, padded })
}

/// How voters are spread over the parties in the disjoint model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionMode {
    /// Each voter picks a party uniformly at random.
    #[default]
    UniformPartyChoice,
    /// Party sizes form a uniformly random weak composition of `n`.
    RandomPartition,
}

impl std::str::FromStr for PartitionMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform-party-choice" => Ok(PartitionMode::UniformPartyChoice),
            "random-partition" => Ok(PartitionMode::RandomPartition),
            _ => Err(Error::invalid(format!("unknown partition mode {s:?}"))),
        }
    }
}

impl std::fmt::Display for PartitionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PartitionMode::UniformPartyChoice => "uniform-party-choice",
            PartitionMode::RandomPartition => "random-partition",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DisjointParams {
    pub n: usize,
    pub m: usize,
    pub g: usize,
    pub p: f64,
    pub phi: f64,
    pub partition: PartitionMode,
}

#[derive(Clone, Debug)]
pub struct DisjointProfile {
    pub approvals: SetProfile,
    pub candidate_party: Vec<usize>,
    pub voter_party: Vec<usize>,
}

/// The perturbed disjoint model: candidates split into `g` non-empty
/// blocks, each voter backs one block, then every voter-candidate entry is
/// redrawn with probability `phi` as an approval with probability `p`.
pub fn gen_disjoint<R: Rng + ?Sized>(params: &DisjointParams, rng: &mut R) -> Result<DisjointProfile> {
    let DisjointParams { n, m, g, p, phi, partition } = *params;
    if g == 0 || g > m {
        return Err(Error::invalid(format!("need 1 <= g <= m, got g = {g}, m = {m}")));
    }
    if n == 0 {
        return Err(Error::invalid("need at least one voter"));
    }
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&phi) {
        return Err(Error::invalid("p and phi must lie in [0, 1]"));
    }
    let candidate_party = loop {
        let labels: Vec<usize> = (0..m).map(|_| rng.random_range(0..g)).collect();
        let mut seen = vec![false; g];
        for &x in &labels {
            seen[x] = true;
        }
        if seen.iter().all(|&s| s) {
            break labels;
        }
    };
    let voter_party: Vec<usize> = match partition {
        PartitionMode::UniformPartyChoice => (0..n).map(|_| rng.random_range(0..g)).collect(),
        PartitionMode::RandomPartition => {
            let bars = rand::seq::index::sample(rng, n + g - 1, g - 1).into_vec();
            let mut bars = bars;
            bars.sort_unstable();
            let mut out = Vec::with_capacity(n);
            let mut prev = 0;
            for (party, &b) in bars.iter().chain(std::iter::once(&(n + g - 1))).enumerate() {
                let size = b - prev;
                out.extend(std::iter::repeat_n(party, size));
                prev = b + 1;
            }
            out
        }
    };
    let mut sets = Vec::with_capacity(n);
    for &vp in &voter_party {
        let mut s = FixedBitSet::with_capacity(m);
        for (c, &cp) in candidate_party.iter().enumerate() {
            let approve = if phi > 0.0 && rng.random_bool(phi) {
                rng.random_bool(p)
            } else {
                cp == vp
            };
            s.set(c, approve);
        }
        sets.push(s);
    }
    Ok(DisjointProfile {
        approvals: SetProfile::from_bitsets(m, sets)?,
        candidate_party,
        voter_party,
    })
}

/// A Mallows-distributed order around `base` with dispersion `phi`, drawn
/// by repeated insertion. `phi = 0` returns `base`; `phi = 1` is uniform.
pub fn gen_perturbed_order<R: Rng + ?Sized>(base: &BroadcastOrder, phi: f64, rng: &mut R) -> Result<BroadcastOrder> {
    if !(0.0..=1.0).contains(&phi) {
        return Err(Error::invalid("phi must lie in [0, 1]"));
    }
    let mut out: Vec<usize> = Vec::with_capacity(base.len());
    for (i, &c) in base.ranking().iter().enumerate() {
        let weights: Vec<f64> = (0..=i).map(|j| phi.powi((i - j) as i32)).collect();
        let j = WeightedIndex::new(&weights).expect("last weight is 1").sample(rng);
        out.insert(j, c);
    }
    BroadcastOrder::new(out)
}

/// Recipe for a laminar frame, mirroring how laminar elections are built.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Blueprint {
    /// `voters` voters all approving the same `approved` candidates, plus
    /// `free` candidates nobody approves, electing `seats`.
    Unanimous {
        voters: usize,
        approved: usize,
        free: usize,
        seats: usize,
    },
    /// One more candidate approved by everybody, and one more seat.
    WithCommon(Box<Blueprint>),
    /// Two candidate-disjoint parts with seats in proportion to voters.
    Sum(Box<Blueprint>, Box<Blueprint>),
}

struct Built {
    groups: Vec<(Vec<usize>, usize)>,
    m: usize,
    k: usize,
}

impl Built {
    fn voters(&self) -> usize {
        self.groups.iter().map(|g| g.1).sum()
    }

    fn unanimous(&self) -> bool {
        self.groups.iter().all(|g| g.0 == self.groups[0].0)
    }
}

fn build(bp: &Blueprint, path: &str) -> Result<Built> {
    match bp {
        Blueprint::Unanimous { voters, approved, free, seats } => {
            if *voters == 0 || approved + free < *seats {
                return Err(Error::invalid(format!(
                    "{path}: unanimous block needs voters and at least as many candidates as seats"
                )));
            }
            Ok(Built {
                groups: vec![((0..*approved).collect(), *voters)],
                m: approved + free,
                k: *seats,
            })
        }
        Blueprint::WithCommon(inner) => {
            let mut b = build(inner, &format!("{path}.inner"))?;
            if b.unanimous() {
                return Err(Error::invalid(format!(
                    "{path}: adding a common candidate to a unanimous part is the unanimous case itself"
                )));
            }
            let c = b.m;
            for g in &mut b.groups {
                g.0.push(c);
            }
            b.m += 1;
            b.k += 1;
            Ok(b)
        }
        Blueprint::Sum(a, b) => {
            let a = build(a, &format!("{path}.left"))?;
            let b = build(b, &format!("{path}.right"))?;
            if a.voters() * b.k != b.voters() * a.k {
                return Err(Error::invalid(format!(
                    "{path}: seat shares {}:{} do not match voter shares {}:{}",
                    a.k,
                    b.k,
                    a.voters(),
                    b.voters()
                )));
            }
            let mut groups = a.groups;
            groups.extend(b.groups.into_iter().map(|(s, n)| (s.into_iter().map(|c| c + a.m).collect(), n)));
            Ok(Built { groups, m: a.m + b.m, k: a.k + b.k })
        }
    }
}

pub fn gen_laminar(bp: &Blueprint, l: usize) -> Result<ElectionFrame> {
    let b = build(bp, "root")?;
    let lists = b.groups.iter().flat_map(|(s, n)| std::iter::repeat_n(s.clone(), *n));
    ElectionFrame::new(b.m, b.k, l, lists)
}

/// A random valid blueprint with `n` voters and `k` seats.
pub fn random_blueprint<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize, depth: usize) -> Blueprint {
    let leaf = |rng: &mut R| {
        let approved = rng.random_range(0..=k + 1);
        let free = k.saturating_sub(approved) + rng.random_range(0..=1);
        Blueprint::Unanimous { voters: n, approved, free, seats: k }
    };
    if depth == 0 {
        return leaf(rng);
    }
    let splits: Vec<usize> = (1..n).filter(|&a| (k * a).is_multiple_of(n)).collect();
    match rng.random_range(0..3) {
        1 if k >= 1 => {
            let inner = random_blueprint(rng, n, k - 1, depth - 1);
            let bp = Blueprint::WithCommon(Box::new(inner));
            if build(&bp, "root").is_ok() {
                bp
            } else {
                leaf(rng)
            }
        }
        2 if !splits.is_empty() => {
            let a = splits[rng.random_range(0..splits.len())];
            let ka = k * a / n;
            Blueprint::Sum(
                Box::new(random_blueprint(rng, a, ka, depth - 1)),
                Box::new(random_blueprint(rng, n - a, k - ka, depth - 1)),
            )
        }
        _ => leaf(rng),
    }
}

/// Ballots following `order` (re-exported here for generator pipelines).
pub fn ballots_from_order(frame: &ElectionFrame, order: &BroadcastOrder) -> Result<Vec<Vec<usize>>> {
    gen_ballots(frame.approvals(), order, frame.l(), PaddingPolicy::Broadcast)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::{detect_party_structure, is_consistent_with_order, is_laminar};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn party_list_layout() {
        let g = gen_party_list(&PartyListSpec {
            sizes: vec![3, 1],
            supporters: vec![2, 1],
            k: 3,
            l: 2,
            unapproved: 1,
        })
        .unwrap();
        assert_eq!(g.padded, 1);
        assert_eq!(g.election.m(), 5);
        assert_eq!(g.election.ballots(), &[vec![0, 1], vec![0, 1], vec![0, 3]]);
        let p = detect_party_structure(g.election.frame()).unwrap();
        assert_eq!(p.supporter_counts(), vec![2, 1]);
    }

    #[test]
    fn phi_zero_is_party_list() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for partition in [PartitionMode::UniformPartyChoice, PartitionMode::RandomPartition] {
            let params = DisjointParams { n: 40, m: 12, g: 4, p: 0.3, phi: 0.0, partition };
            let d = gen_disjoint(&params, &mut rng).unwrap();
            assert_eq!(d.voter_party.len(), 40);
            let f = ElectionFrame::from_profile(d.approvals, 4, 2).unwrap();
            assert!(detect_party_structure(&f).is_ok());
            let mut blocks = d.candidate_party.clone();
            blocks.sort_unstable();
            blocks.dedup();
            assert_eq!(blocks.len(), 4);
        }
    }

    #[test]
    fn mallows_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let base = BroadcastOrder::identity(10);
        assert_eq!(gen_perturbed_order(&base, 0.0, &mut rng).unwrap(), base);
        let o = gen_perturbed_order(&base, 1.0, &mut rng).unwrap();
        assert_eq!(o.len(), 10);
    }

    #[test]
    fn blueprints_build_laminar_frames() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.random_range(1..7);
            let k = rng.random_range(1..6);
            let bp = random_blueprint(&mut rng, n, k, 3);
            let f = gen_laminar(&bp, 1).unwrap();
            assert!(is_laminar(&f), "{bp:?}");
            let order = BroadcastOrder::identity(f.m());
            let e = Election::from_order(f, &order).unwrap();
            assert!(is_consistent_with_order(&e, &order));
        }
    }

    #[test]
    fn blueprint_ratio_error_names_node() {
        let u = |v, s| Blueprint::Unanimous { voters: v, approved: 2, free: 0, seats: s };
        let bp = Blueprint::WithCommon(Box::new(Blueprint::Sum(Box::new(u(1, 1)), Box::new(u(2, 1)))));
        let err = gen_laminar(&bp, 1).unwrap_err().to_string();
        assert!(err.contains("root.inner"), "{err}");
    }
}
