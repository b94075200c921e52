//! Monte-Carlo sweeps over perturbed party-list elections, plus fixture
//! replay.

pub mod gen;
pub mod repro;

use std::io::Write;

use num_rational::BigRational;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::election::{gen_ballots, BroadcastOrder, Election, ElectionFrame, PaddingPolicy};
use crate::error::{Error, Result};
use crate::generate::{gen_disjoint, gen_perturbed_order, DisjointParams, DisjointProfile, PartitionMode};
use crate::metrics::{improvement_of_picks, resolute_picks};
use crate::numeric::{fmt_decimal, fmt_ratio};
use crate::par::{self, Execution};
use crate::rules::{Objective, TieBreak};

/// Ballot size of a sweep cell, absolute or relative to `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BallotSize {
    Fixed(usize),
    Relative(String),
}

impl BallotSize {
    pub fn resolve(&self, k: usize) -> Result<usize> {
        let l = match self {
            BallotSize::Fixed(l) => *l,
            BallotSize::Relative(s) => match s.trim() {
                "k" => k,
                "k/2" => k / 2,
                other => other
                    .parse()
                    .map_err(|_| Error::invalid(format!("ballot size {other:?} is not an integer, \"k\" or \"k/2\"")))?,
            },
        };
        if l == 0 || l > k {
            return Err(Error::invalid(format!("ballot size {l} must lie in 1..={k}")));
        }
        Ok(l)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n: usize,
    pub m: usize,
    pub p: f64,
    pub phi: Vec<f64>,
    pub g: Vec<usize>,
    pub k: Vec<usize>,
    pub l: Vec<BallotSize>,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub partition: PartitionMode,
}

impl SweepConfig {
    /// The full grid at its original scale.
    pub fn full() -> Self {
        SweepConfig {
            n: 1500,
            m: 24,
            p: 0.5,
            phi: vec![0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.5, 0.75, 1.0],
            g: vec![2, 6, 20],
            k: vec![8, 16, 12],
            l: vec![
                BallotSize::Relative("1".into()),
                BallotSize::Relative("k/2".into()),
                BallotSize::Relative("k".into()),
            ],
            trials: 2000,
            seed: 0,
            partition: PartitionMode::UniformPartyChoice,
        }
    }

    /// Same grid, small enough for a laptop.
    pub fn desk() -> Self {
        SweepConfig { n: 150, trials: 50, ..SweepConfig::full() }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "full" => Ok(SweepConfig::full()),
            "desk" => Ok(SweepConfig::desk()),
            _ => Err(Error::invalid(format!("unknown preset {name:?} (expected full or desk)"))),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SweepConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::invalid("n and m must be positive"));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::invalid("p must lie in [0, 1]"));
        }
        if let Some(phi) = self.phi.iter().find(|f| !(0.0..=1.0).contains(*f)) {
            return Err(Error::invalid(format!("phi {phi} outside [0, 1]")));
        }
        if let Some(g) = self.g.iter().find(|&&g| g == 0 || g > self.m) {
            return Err(Error::invalid(format!("g = {g} must lie in 1..={}", self.m)));
        }
        if let Some(k) = self.k.iter().find(|&&k| k == 0 || k > self.m) {
            return Err(Error::invalid(format!("k = {k} must lie in 1..={}", self.m)));
        }
        for &k in &self.k {
            for l in &self.l {
                l.resolve(k)?;
            }
        }
        if self.phi.is_empty() || self.g.is_empty() || self.k.is_empty() || self.l.is_empty() {
            return Err(Error::invalid("every grid axis needs at least one value"));
        }
        Ok(())
    }

    /// Grid cells in canonical order: phi, then g, then k, then l.
    pub fn cells(&self) -> Result<Vec<Cell>> {
        self.validate()?;
        let mut out = Vec::new();
        for &phi in &self.phi {
            for &g in &self.g {
                for &k in &self.k {
                    for l in &self.l {
                        out.push(Cell { index: out.len(), phi, g, k, l: l.resolve(k)? });
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub index: usize,
    pub phi: f64,
    pub g: usize,
    pub k: usize,
    pub l: usize,
}

/// Everything a single trial draws, before any rule runs.
#[derive(Clone, Debug)]
pub struct TrialDraw {
    pub profile: DisjointProfile,
    pub order: BroadcastOrder,
    pub election: Election,
    pub tie_seed: u64,
}

/// The generator for one (cell, trial): the sweep seed with a stream id
/// built from the two indices.
pub fn trial_rng(seed: u64, cell: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((cell as u64) << 32) | trial as u64);
    rng
}

pub fn draw_trial(cfg: &SweepConfig, cell: &Cell, trial: usize) -> Result<TrialDraw> {
    let mut rng = trial_rng(cfg.seed, cell.index, trial);
    let params = DisjointParams {
        n: cfg.n,
        m: cfg.m,
        g: cell.g,
        p: cfg.p,
        phi: cell.phi,
        partition: cfg.partition,
    };
    let profile = gen_disjoint(&params, &mut rng)?;
    let order = gen_perturbed_order(&BroadcastOrder::identity(cfg.m), cell.phi, &mut rng)?;
    let ballots = gen_ballots(&profile.approvals, &order, cell.l, PaddingPolicy::Broadcast)?;
    let frame = ElectionFrame::from_profile(profile.approvals.clone(), cell.k, cell.l)?;
    let election = Election::new(frame, ballots)?;
    let tie_seed = rng.next_u64();
    Ok(TrialDraw { profile, order, election, tie_seed })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Improvements {
    pub cc: BigRational,
    pub pav: BigRational,
    pub av: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub cell: Cell,
    pub partition: PartitionMode,
    pub trial: usize,
    pub seed: u64,
    pub tie_seed: u64,
    pub improvements: Improvements,
    pub largest_party: usize,
    pub smallest_party: usize,
    pub tie_breaks: usize,
}

/// Fixed CSV header of the per-trial output.
pub const TRIAL_HEADER: [&str; 20] = [
    "cell",
    "phi",
    "g",
    "k",
    "l",
    "partition",
    "trial",
    "seed",
    "tie_seed",
    "cc_improvement",
    "cc_decimal",
    "pav_improvement",
    "pav_decimal",
    "av_improvement",
    "av_decimal",
    "largest_party",
    "smallest_party",
    "n",
    "m",
    "tie_breaks",
];

impl TrialRecord {
    fn row(&self, n: usize, m: usize) -> Vec<String> {
        let imp = &self.improvements;
        vec![
            self.cell.index.to_string(),
            self.cell.phi.to_string(),
            self.cell.g.to_string(),
            self.cell.k.to_string(),
            self.cell.l.to_string(),
            self.partition.to_string(),
            self.trial.to_string(),
            self.seed.to_string(),
            self.tie_seed.to_string(),
            fmt_ratio(&imp.cc),
            fmt_decimal(&imp.cc),
            fmt_ratio(&imp.pav),
            fmt_decimal(&imp.pav),
            fmt_ratio(&imp.av),
            fmt_decimal(&imp.av),
            self.largest_party.to_string(),
            self.smallest_party.to_string(),
            n.to_string(),
            m.to_string(),
            self.tie_breaks.to_string(),
        ]
    }
}

pub fn run_trial(cfg: &SweepConfig, cell: &Cell, trial: usize) -> Result<TrialRecord> {
    let wrap = |e: Error| Error::Trial { cell: cell.index, trial, seed: cfg.seed, source: Box::new(e) };
    let draw = draw_trial(cfg, cell, trial).map_err(wrap)?;
    let frame = draw.election.frame();
    let picks = resolute_picks(&draw.election, TieBreak::Seeded(draw.tie_seed));
    let value = |metric| improvement_of_picks(frame, &picks, metric, Some(draw.tie_seed)).map(|r| r.value);
    let improvements = Improvements {
        cc: value(Objective::Cc).map_err(wrap)?,
        pav: value(Objective::Pav).map_err(wrap)?,
        av: value(Objective::Av).map_err(wrap)?,
    };
    let mut sizes = vec![0usize; cell.g];
    for &p in &draw.profile.voter_party {
        sizes[p] += 1;
    }
    Ok(TrialRecord {
        cell: *cell,
        partition: cfg.partition,
        trial,
        seed: cfg.seed,
        tie_seed: draw.tie_seed,
        improvements,
        largest_party: sizes.iter().copied().max().unwrap_or(0),
        smallest_party: sizes.iter().copied().min().unwrap_or(0),
        tie_breaks: picks.ties_broken,
    })
}

/// All trials of all cells, in canonical (cell, trial) order. The first
/// failing trial in that order is reported.
pub fn run_sweep(cfg: &SweepConfig, exec: Execution) -> Result<Vec<TrialRecord>> {
    let cells = cfg.cells()?;
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..cfg.trials).map(move |t| (c, t)))
        .collect();
    par::map(exec, &jobs, |&(c, t)| run_trial(cfg, &cells[c], t)).into_iter().collect()
}

pub fn write_trials<W: Write>(cfg: &SweepConfig, records: &[TrialRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRIAL_HEADER)?;
    for r in records {
        w.write_record(r.row(cfg.n, cfg.m))?;
    }
    w.flush()?;
    Ok(())
}

pub fn trials_csv(cfg: &SweepConfig, records: &[TrialRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_trials(cfg, records, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// Five-number summary with type-7 quartiles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl FiveNumber {
    pub fn of(values: &[f64]) -> Self {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        FiveNumber {
            min: v[0],
            q1: quantile(&v, 0.25),
            median: quantile(&v, 0.5),
            q3: quantile(&v, 0.75),
            max: v[v.len() - 1],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellSummary {
    pub cell: usize,
    pub phi: f64,
    pub g: usize,
    pub k: usize,
    pub l: usize,
    pub metric: &'static str,
    pub trials: usize,
    pub stats: FiveNumber,
}

pub const SUMMARY_HEADER: [&str; 12] = ["cell", "phi", "g", "k", "l", "metric", "trials", "min", "q1", "median", "q3", "max"];

pub fn summarize(records: &[TrialRecord]) -> Vec<CellSummary> {
    let mut out = Vec::new();
    for group in records.chunk_by(|a, b| a.cell.index == b.cell.index) {
        let cell = group[0].cell;
        type Getter = fn(&Improvements) -> &BigRational;
        let metrics: [(&'static str, Getter); 3] = [("cc", |i| &i.cc), ("pav", |i| &i.pav), ("av", |i| &i.av)];
        for (name, get) in metrics {
            let values: Vec<f64> = group.iter().map(|r| crate::numeric::to_f64(get(&r.improvements))).collect();
            out.push(CellSummary {
                cell: cell.index,
                phi: cell.phi,
                g: cell.g,
                k: cell.k,
                l: cell.l,
                metric: name,
                trials: group.len(),
                stats: FiveNumber::of(&values),
            });
        }
    }
    out
}

pub fn summary_csv(summaries: &[CellSummary]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SUMMARY_HEADER)?;
    for s in summaries {
        let f = s.stats;
        w.write_record([
            s.cell.to_string(),
            s.phi.to_string(),
            s.g.to_string(),
            s.k.to_string(),
            s.l.to_string(),
            s.metric.to_string(),
            s.trials.to_string(),
            f.min.to_string(),
            f.q1.to_string(),
            f.median.to_string(),
            f.q3.to_string(),
            f.max.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
