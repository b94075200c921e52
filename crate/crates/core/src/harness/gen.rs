//! Generator recipes read from TOML or JSON for the `gen` command.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::election::{gen_ballots, BroadcastOrder, Election, ElectionDoc, ElectionFrame, PaddingPolicy};
use crate::error::{Error, Result};
use crate::generate::{
    gen_disjoint, gen_laminar, gen_party_list, gen_perturbed_order, random_blueprint, Blueprint, DisjointParams,
    PartitionMode, PartyListSpec,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GenConfig {
    /// Deterministic broadcasted party list.
    PartyList {
        sizes: Vec<usize>,
        supporters: Vec<usize>,
        k: usize,
        l: usize,
        #[serde(default)]
        unapproved: usize,
    },
    /// Perturbed disjoint model with a perturbed identity order.
    Disjoint {
        n: usize,
        m: usize,
        g: usize,
        p: f64,
        phi: f64,
        k: usize,
        l: usize,
        #[serde(default)]
        partition: PartitionMode,
    },
    /// Laminar frame from a fixed blueprint, or a random one of the given
    /// size and depth. Ballots follow the identity order.
    Laminar {
        l: usize,
        #[serde(default)]
        blueprint: Option<Blueprint>,
        #[serde(default)]
        n: Option<usize>,
        #[serde(default)]
        k: Option<usize>,
        #[serde(default = "default_depth")]
        depth: usize,
    },
}

fn default_depth() -> usize {
    3
}

impl GenConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Draws one election. Only the random models use `seed`.
    pub fn generate(&self, seed: u64) -> Result<(Election, BroadcastOrder)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match self {
            GenConfig::PartyList { sizes, supporters, k, l, unapproved } => {
                let g = gen_party_list(&PartyListSpec {
                    sizes: sizes.clone(),
                    supporters: supporters.clone(),
                    k: *k,
                    l: *l,
                    unapproved: *unapproved,
                })?;
                Ok((g.election, g.order))
            }
            GenConfig::Disjoint { n, m, g, p, phi, k, l, partition } => {
                let params = DisjointParams { n: *n, m: *m, g: *g, p: *p, phi: *phi, partition: *partition };
                let profile = gen_disjoint(&params, &mut rng)?;
                let order = gen_perturbed_order(&BroadcastOrder::identity(*m), *phi, &mut rng)?;
                let ballots = gen_ballots(&profile.approvals, &order, *l, PaddingPolicy::Broadcast)?;
                let frame = ElectionFrame::from_profile(profile.approvals, *k, *l)?;
                Ok((Election::new(frame, ballots)?, order))
            }
            GenConfig::Laminar { l, blueprint, n, k, depth } => {
                let bp = match (blueprint, n, k) {
                    (Some(bp), None, None) => bp.clone(),
                    (None, Some(n), Some(k)) if *n > 0 && *k > 0 => {
                        let n = *n;
                        let k = *k;
                        (0..1000)
                            .map(|_| random_blueprint(&mut rng, n, k, *depth))
                            .find(|bp| gen_laminar(bp, *l).is_ok())
                            .ok_or_else(|| Error::invalid("no valid laminar blueprint found for these sizes"))?
                    }
                    _ => return Err(Error::at("/blueprint", "give either a blueprint or positive n and k")),
                };
                let frame = gen_laminar(&bp, *l)?;
                let order = BroadcastOrder::identity(frame.m());
                Ok((Election::from_order(frame, &order)?, order))
            }
        }
    }

    /// The generated election as a document, order included.
    pub fn generate_doc(&self, seed: u64) -> Result<ElectionDoc> {
        let (e, order) = self.generate(seed)?;
        Ok(ElectionDoc::from_election(&e, Some(&order)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::{detect_party_structure, is_laminar};

    #[test]
    fn party_list_from_toml() {
        let cfg = GenConfig::from_toml("model = \"party-list\"\nsizes = [3, 2]\nsupporters = [4, 2]\nk = 4\nl = 2\n").unwrap();
        let (e, _) = cfg.generate(0).unwrap();
        assert_eq!((e.n(), e.m(), e.k(), e.l()), (6, 5, 4, 2));
        assert!(detect_party_structure(e.frame()).is_ok());
    }

    #[test]
    fn disjoint_is_seeded() {
        let cfg = GenConfig::from_json(r#"{"model":"disjoint","n":30,"m":10,"g":3,"p":0.5,"phi":0.2,"k":4,"l":2}"#).unwrap();
        assert_eq!(cfg.generate_doc(5).unwrap(), cfg.generate_doc(5).unwrap());
        assert_ne!(cfg.generate_doc(5).unwrap(), cfg.generate_doc(6).unwrap());
    }

    #[test]
    fn random_laminar() {
        let cfg = GenConfig::from_toml("model = \"laminar\"\nl = 1\nn = 6\nk = 3\n").unwrap();
        for seed in 0..10 {
            let (e, _) = cfg.generate(seed).unwrap();
            assert!(is_laminar(e.frame()));
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(GenConfig::from_toml("model = \"party-list\"\nsizes = [1]\nsupporters = [1]\nk = 1\nl = 1\nextra = 3\n").is_err());
    }
}
