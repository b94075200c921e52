use itertools::Itertools;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::election::Committee;
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::profile::{CandidateClasses, SetProfile};

use super::engine::{BlockSpec, Group, Scaled, Space};
use super::Objective;

/// Largest number of committees [`WinnerSet::materialize`] will list.
pub const MATERIALIZE_CAP: usize = 100_000;

/// Choose exactly `take` candidates from `pool`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Choice {
    pub pool: Vec<usize>,
    pub take: usize,
}

/// One combination of choices; its committees are all unions of one pick
/// per choice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Product {
    pub choices: Vec<Choice>,
}

impl Product {
    fn size(&self) -> BigUint {
        self.choices
            .iter()
            .map(|c| binomial(c.pool.len(), c.take))
            .fold(BigUint::one(), |a, b| a * b)
    }

    fn first(&self) -> Committee {
        Committee::new(self.choices.iter().flat_map(|c| c.pool.iter().copied().take(c.take)))
    }

    fn contains(&self, w: &Committee) -> bool {
        let mut hit = 0;
        for c in &self.choices {
            let inside = c.pool.iter().filter(|&&x| w.contains(x)).count();
            if inside != c.take {
                return false;
            }
            hit += inside;
        }
        hit == w.len()
    }

    fn iter(&self) -> impl Iterator<Item = Committee> + '_ {
        self.choices
            .iter()
            .map(|c| c.pool.iter().copied().combinations(c.take))
            .multi_cartesian_product()
            .map(|parts| Committee::new(parts.into_iter().flatten()))
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    num_integer::binomial(BigUint::from(n), BigUint::from(k))
}

/// How a resolute rule picks one committee from a tie.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieBreak {
    /// The committee with the smallest sorted member list.
    Lexicographic,
    /// Uniform over the winning committees, reproducible from the seed.
    Seeded(u64),
}

/// All winning committees of a rule together with their common score.
///
/// Stored as a disjoint union of products so that large ties stay small.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WinnerSet {
    score: BigRational,
    products: Vec<Product>,
    threshold: Option<(Vec<usize>, Vec<usize>, usize)>,
}

impl WinnerSet {
    pub(crate) fn new(score: BigRational, mut products: Vec<Product>) -> Self {
        products.sort_by_cached_key(Product::first);
        WinnerSet {
            score,
            products,
            threshold: None,
        }
    }

    /// Committees of `locked` plus any `slots` members of `ties`.
    pub(crate) fn threshold(score: BigRational, locked: Vec<usize>, ties: Vec<usize>, slots: usize) -> Self {
        let mut choices = Vec::new();
        if !locked.is_empty() {
            choices.push(Choice {
                take: locked.len(),
                pool: locked.clone(),
            });
        }
        if slots > 0 {
            choices.push(Choice {
                pool: ties.clone(),
                take: slots,
            });
        }
        let mut w = WinnerSet::new(score, vec![Product { choices }]);
        w.threshold = Some((locked, ties, slots));
        w
    }

    pub fn score(&self) -> &BigRational {
        &self.score
    }

    pub fn products(&self) -> &[Product] {
        &self.products
    }

    pub fn count(&self) -> BigUint {
        self.products.iter().map(Product::size).sum()
    }

    pub fn is_unique(&self) -> bool {
        self.count().is_one()
    }

    /// For threshold rules: candidates in every winner, the tie at the
    /// cutoff, and how many seats the tie fills.
    pub fn threshold_parts(&self) -> Option<(Vec<usize>, Vec<usize>, usize)> {
        self.threshold.clone()
    }

    pub fn contains(&self, w: &Committee) -> bool {
        self.products.iter().any(|p| p.contains(w))
    }

    /// Whether some winning committee contains all of `set`.
    pub fn has_superset_of(&self, set: &[usize]) -> bool {
        self.products.iter().any(|p| {
            set.iter().all(|c| p.choices.iter().any(|ch| ch.pool.contains(c)))
                && p.choices
                    .iter()
                    .all(|ch| ch.pool.iter().filter(|c| set.contains(c)).count() <= ch.take)
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = Committee> + '_ {
        self.products.iter().flat_map(Product::iter)
    }

    /// Every winning committee, sorted. Fails when there are more than
    /// `cap` of them.
    pub fn materialize(&self, cap: usize) -> Result<Vec<Committee>> {
        let count = self.count();
        if count > BigUint::from(cap) {
            return Err(Error::Budget {
                what: "listing winning committees",
                needed: count.to_u128().unwrap_or(u128::MAX),
                budget: cap as u128,
            });
        }
        let mut all: Vec<Committee> = self.iter().collect();
        all.sort();
        Ok(all)
    }

    pub fn lexicographic_first(&self) -> Committee {
        self.products.iter().map(Product::first).min().expect("a winner set is never empty")
    }

    pub fn pick(&self, tie: TieBreak) -> Committee {
        match tie {
            TieBreak::Lexicographic => self.lexicographic_first(),
            TieBreak::Seeded(seed) => self.pick_with(&mut ChaCha8Rng::seed_from_u64(seed)),
        }
    }

    /// Uniform draw over the winning committees.
    pub fn pick_with<R: Rng + ?Sized>(&self, rng: &mut R) -> Committee {
        let product = if self.products.len() == 1 {
            &self.products[0]
        } else {
            let sizes: Vec<BigUint> = self.products.iter().map(Product::size).collect();
            let total: BigUint = sizes.iter().sum();
            let idx = match total.to_u128() {
                Some(t) => {
                    let mut r = rng.random_range(0..t);
                    let mut i = 0;
                    loop {
                        let s = sizes[i].to_u128().expect("part of a u128 total");
                        if r < s {
                            break i;
                        }
                        r -= s;
                        i += 1;
                    }
                }
                None => {
                    let w: Vec<f64> = sizes.iter().map(|s| s.to_f64().unwrap_or(f64::MAX)).collect();
                    let dist = rand::distr::weighted::WeightedIndex::new(&w).expect("positive weights");
                    rng.sample(dist)
                }
            };
            &self.products[idx]
        };
        let mut members = Vec::new();
        for c in &product.choices {
            let idx = rand::seq::index::sample(rng, c.pool.len(), c.take);
            members.extend(idx.into_iter().map(|i| c.pool[i]));
        }
        Committee::new(members)
    }

    /// Smallest and largest `objective` score over the winning committees,
    /// scored against `profile`.
    pub fn score_range(
        &self,
        profile: &SetProfile,
        objective: Objective,
        budget: u128,
    ) -> Result<(BigRational, BigRational)> {
        let k = self.products[0].choices.iter().map(|c| c.take).sum();
        let scaled = Scaled::new(objective, profile, k)?;
        let classes = CandidateClasses::of(profile);
        let spaces: Vec<Space> = self
            .products
            .iter()
            .map(|p| {
                let blocks = p
                    .choices
                    .iter()
                    .map(|ch| BlockSpec {
                        take: ch.take,
                        groups: classes
                            .split(&ch.pool)
                            .into_iter()
                            .map(|(cls, members)| Group {
                                members,
                                holders: classes.holders[cls].clone(),
                            })
                            .collect(),
                    })
                    .collect();
                Space::new(blocks, &scaled)
            })
            .collect();
        let needed = spaces.iter().map(Space::size).fold(0u128, u128::saturating_add);
        if needed > budget {
            return Err(Error::Budget {
                what: "scoring tied committees",
                needed,
                budget,
            });
        }
        let (lo, hi) = spaces
            .iter()
            .filter_map(|s| s.extremes(Execution::default()))
            .reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
            .expect("a winner set is never empty");
        Ok((scaled.to_rational(lo), scaled.to_rational(hi)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::int;

    fn tie() -> WinnerSet {
        WinnerSet::threshold(int(5), vec![4], vec![1, 2, 3], 2)
    }

    #[test]
    fn threshold_listing() {
        let w = tie();
        assert_eq!(w.count(), BigUint::from(3u32));
        let all = w.materialize(10).unwrap();
        assert_eq!(all, vec![Committee::new([1, 2, 4]), Committee::new([1, 3, 4]), Committee::new([2, 3, 4])]);
        assert!(w.materialize(2).is_err());
        assert_eq!(w.lexicographic_first(), Committee::new([1, 2, 4]));
        assert!(w.contains(&Committee::new([2, 3, 4])));
        assert!(!w.contains(&Committee::new([1, 2, 3])));
        assert!(w.has_superset_of(&[4, 3]));
        assert!(!w.has_superset_of(&[0]));
        assert_eq!(w.threshold_parts(), Some((vec![4], vec![1, 2, 3], 2)));
    }

    #[test]
    fn seeded_pick_is_reproducible_and_winning() {
        let w = tie();
        for seed in 0..20 {
            let a = w.pick(TieBreak::Seeded(seed));
            assert_eq!(a, w.pick(TieBreak::Seeded(seed)));
            assert!(w.contains(&a));
        }
    }

    #[test]
    fn seeded_pick_covers_union_of_products() {
        let w = WinnerSet::new(
            int(1),
            vec![
                Product { choices: vec![Choice { pool: vec![0, 1], take: 1 }] },
                Product { choices: vec![Choice { pool: vec![5], take: 1 }] },
            ],
        );
        let mut seen = std::collections::BTreeSet::new();
        for seed in 0..200 {
            seen.insert(w.pick(TieBreak::Seeded(seed)));
        }
        assert_eq!(seen.len(), 3);
        assert_eq!(w.lexicographic_first(), Committee::new([0]));
    }
}
