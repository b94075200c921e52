use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{BroadcastOrder, Election, ElectionFrame, PaddingPolicy, gen_ballots};

/// On-disk form of an election.
///
/// `ballots` and `order` are optional. Without ballots, they are built from
/// the order, or from the identity order when none is given.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElectionDoc {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub l: usize,
    pub approvals: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ballots: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct LoadedElection {
    pub frame: ElectionFrame,
    pub ballots: Option<Vec<Vec<usize>>>,
    pub order: Option<BroadcastOrder>,
}

impl LoadedElection {
    pub fn order_or_identity(&self) -> BroadcastOrder {
        self.order.clone().unwrap_or_else(|| BroadcastOrder::identity(self.frame.m()))
    }

    pub fn election(&self) -> Result<Election> {
        match &self.ballots {
            Some(b) => Election::new(self.frame.clone(), b.clone()),
            None => {
                let b = gen_ballots(self.frame.approvals(), &self.order_or_identity(), self.frame.l(), PaddingPolicy::Broadcast)?;
                Election::new(self.frame.clone(), b)
            }
        }
    }
}

fn check_lists(name: &str, lists: &[Vec<usize>], m: usize) -> Result<()> {
    for (i, list) in lists.iter().enumerate() {
        let mut seen = vec![false; m];
        for (j, &c) in list.iter().enumerate() {
            if c >= m {
                return Err(Error::at(format!("/{name}/{i}/{j}"), format!("candidate {c} out of range (m = {m})")));
            }
            if std::mem::replace(&mut seen[c], true) {
                return Err(Error::at(format!("/{name}/{i}/{j}"), format!("candidate {c} repeated")));
            }
        }
    }
    Ok(())
}

impl ElectionDoc {
    pub fn parse(text: &str) -> Result<LoadedElection> {
        let doc: ElectionDoc = serde_json::from_str(text)?;
        doc.load()
    }

    pub fn load(self) -> Result<LoadedElection> {
        let ElectionDoc { n, m, k, l, approvals, ballots, order } = self;
        if n == 0 {
            return Err(Error::at("/n", "need at least one voter"));
        }
        if approvals.len() != n {
            return Err(Error::at("/approvals", format!("{} entries, expected n = {n}", approvals.len())));
        }
        if !(1 <= l && l <= k && k <= m) {
            return Err(Error::at("/k", format!("need 1 <= l <= k <= m, got l = {l}, k = {k}, m = {m}")));
        }
        check_lists("approvals", &approvals, m)?;
        if let Some(b) = &ballots {
            if b.len() != n {
                return Err(Error::at("/ballots", format!("{} entries, expected n = {n}", b.len())));
            }
            check_lists("ballots", b, m)?;
        }
        let order = match order {
            Some(o) if o.len() != m => {
                return Err(Error::at("/order", format!("ranks {} candidates, expected m = {m}", o.len())));
            }
            Some(o) => Some(BroadcastOrder::new(o)?),
            None => None,
        };
        Ok(LoadedElection {
            frame: ElectionFrame::new(m, k, l, approvals)?,
            ballots,
            order,
        })
    }

    pub fn from_election(e: &Election, order: Option<&BroadcastOrder>) -> Self {
        ElectionDoc {
            n: e.n(),
            m: e.m(),
            k: e.k(),
            l: e.l(),
            approvals: e.frame().approvals().to_lists(),
            ballots: Some(e.ballots().to_vec()),
            order: order.map(|o| o.ranking().to_vec()),
        }
    }

    pub fn from_frame(f: &ElectionFrame) -> Self {
        ElectionDoc {
            n: f.n(),
            m: f.m(),
            k: f.k(),
            l: f.l(),
            approvals: f.approvals().to_lists(),
            ballots: None,
            order: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}
