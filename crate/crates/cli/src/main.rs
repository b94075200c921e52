use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use limvote::axioms::{
    check_ejr, check_jr, check_laminar_proportionality, check_lower_quota_frame, check_pjr, Axiom, AxiomVerdict,
};
use limvote::election::{
    detect_party_structure, is_broadcasted_laminar, is_laminar, Committee, Election, ElectionDoc, LoadedElection,
};
use limvote::games::{LvGame, PartyStrategy};
use limvote::harness::gen::GenConfig;
use limvote::harness::repro::{run_repro, KNOWN_MISMATCHES};
use limvote::harness::{run_sweep, summarize, summary_csv, trials_csv, SweepConfig};
use limvote::metrics::{improvement, laminar_cc_check, Mode};
use limvote::numeric::{fmt_decimal, fmt_ratio};
use limvote::oracle::{oracle_argmax, oracle_argmax_on_ballots, oracle_improvement, OracleBudget, OracleObjective};
use limvote::par::Execution;
use limvote::rules::{av_winners, lv_winners, optimal_committees_in, Objective, TieBreak, WinnerSet, ENUMERATION_BUDGET};
use limvote::{fixtures, Error, Result};
use serde_json::{json, Value};

/// Limited Voting elections: rules, metrics, axioms, games and sweeps.
#[derive(Parser)]
#[command(name = "limvote", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Generator or sweep configuration (TOML, or JSON for gen).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for random generators and random tie-breaking.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Pick one committee per rule. Without it, metrics compare the worst
    /// Limited Voting winner with the best Approval Voting winner.
    #[arg(long, global = true, value_enum)]
    tiebreak: Option<Tie>,
    /// Cap on committee profiles an optimizing rule may enumerate.
    #[arg(long, global = true)]
    budget: Option<u128>,
    /// Recompute results by brute force and fail on any disagreement.
    #[arg(long, global = true, hide = true)]
    certify: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Tie {
    Lex,
    Random,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an election from a --config recipe.
    Gen,
    /// Winners and improvement ratios.
    Eval {
        /// Election document path, or fixture:NAME.
        election: String,
        /// Comma list of av, lv, cc, pav, sav, N-cc, and lcc, lpav, lsav for
        /// the same objectives on ballots.
        #[arg(long, default_value = "av,lv,cc,pav")]
        rules: String,
        /// Comma list of metrics for the improvement ratio.
        #[arg(long, default_value = "cc,pav,av")]
        metrics: String,
    },
    /// Proportionality axioms for one committee.
    Axioms {
        election: String,
        /// Comma list of candidates; defaults to the pick of --rule.
        #[arg(long)]
        committee: Option<String>,
        #[arg(long, default_value = "lv")]
        rule: String,
        /// Comma list of jr, pjr, ejr, lower-quota, laminar. Defaults to the
        /// first three plus whichever of the others apply.
        #[arg(long)]
        axioms: Option<String>,
    },
    /// Outcome and equilibrium check of a party strategy profile.
    Game {
        election: String,
        /// JSON list of party strategies; the lower-quota profile when absent.
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        epsilon: usize,
    },
    /// Monte-Carlo sweep over perturbed party-list elections.
    Sweep {
        /// Built-in grid used without --config: desk or full.
        #[arg(long, default_value = "desk")]
        preset: String,
        #[arg(long)]
        trials: Option<usize>,
        /// Per-cell summary file.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Run on the calling thread only.
        #[arg(long)]
        sequential: bool,
    },
    /// Replay the embedded fixtures against their published values.
    Repro,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn load(spec: &str) -> Result<LoadedElection> {
    match spec.strip_prefix("fixture:") {
        Some(name) => fixtures::load(name),
        None => ElectionDoc::parse(&read(Path::new(spec))?),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn json_text(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn list(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).collect()
}

fn members(c: &Committee) -> String {
    c.members().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

struct Ctx<'a> {
    common: &'a Common,
    budget: u128,
}

impl Ctx<'_> {
    fn tie(&self) -> Option<TieBreak> {
        self.common.tiebreak.map(|t| match t {
            Tie::Lex => TieBreak::Lexicographic,
            Tie::Random => TieBreak::Seeded(self.common.seed.unwrap_or(0)),
        })
    }

    fn format(&self, default: Format) -> Format {
        self.common.format.unwrap_or(default)
    }

    fn out(&self) -> Option<&Path> {
        self.common.out.as_deref()
    }
}

enum Rule {
    Av,
    Lv,
    Optimal(Objective),
    Limited(Objective),
}

fn parse_rule(s: &str) -> Result<Rule> {
    Ok(match s {
        "av" => Rule::Av,
        "lv" => Rule::Lv,
        _ => match s.strip_prefix('l') {
            Some(rest) if rest.parse::<Objective>().is_ok() && !s.ends_with("-cc") => Rule::Limited(rest.parse()?),
            _ => Rule::Optimal(s.parse()?),
        },
    })
}

fn run_rule(ctx: &Ctx, e: &Election, rule: &Rule) -> Result<WinnerSet> {
    let exec = Execution::default();
    match rule {
        Rule::Av => Ok(av_winners(e.frame())),
        Rule::Lv => Ok(lv_winners(e)),
        Rule::Optimal(o) => optimal_committees_in(e.frame().approvals(), e.k(), *o, ctx.budget, exec),
        Rule::Limited(o) => optimal_committees_in(&e.ballot_profile(), e.k(), *o, ctx.budget, exec),
    }
}

fn oracle_objective(o: Objective) -> OracleObjective {
    match o {
        Objective::Av => OracleObjective::Av,
        Objective::Cc => OracleObjective::Cc,
        Objective::Pav => OracleObjective::Pav,
        Objective::Sav => OracleObjective::Sav,
        Objective::Lcc(l) => OracleObjective::Lcc(l),
    }
}

fn certify_rule(e: &Election, name: &str, rule: &Rule, w: &WinnerSet) -> Result<()> {
    let budget = OracleBudget::default();
    let expected = match rule {
        Rule::Av => oracle_argmax(e, OracleObjective::Av, &budget)?,
        Rule::Lv => oracle_argmax(e, OracleObjective::Lv, &budget)?,
        Rule::Optimal(o) => oracle_argmax(e, oracle_objective(*o), &budget)?,
        Rule::Limited(o) => oracle_argmax_on_ballots(e, oracle_objective(*o), &budget)?,
    };
    let mut got: Vec<Committee> = w.iter().collect();
    got.sort();
    if got != expected.committees {
        return Err(Error::Alarm(format!("{name}: winners differ from brute force")));
    }
    Ok(())
}

fn cmd_gen(ctx: &Ctx) -> Result<()> {
    let path = ctx.common.config.as_deref().ok_or_else(|| invalid("gen needs --config"))?;
    let text = read(path)?;
    let cfg = match path.extension().and_then(|x| x.to_str()) {
        Some("json") => GenConfig::from_json(&text)?,
        _ => GenConfig::from_toml(&text)?,
    };
    if ctx.format(Format::Json) != Format::Json {
        return Err(invalid("gen writes JSON election documents only"));
    }
    let doc = cfg.generate_doc(ctx.common.seed.unwrap_or(0))?;
    emit(ctx.out(), &(doc.to_json() + "\n"))
}

fn cmd_eval(ctx: &Ctx, election: &str, rules: &str, metrics: &str) -> Result<()> {
    let loaded = load(election)?;
    let e = loaded.election()?;
    let tie = ctx.tie();
    let mut rule_rows = Vec::new();
    let mut rule_json = Vec::new();
    for name in list(rules) {
        let rule = parse_rule(name)?;
        let w = run_rule(ctx, &e, &rule)?;
        if ctx.common.certify {
            certify_rule(&e, name, &rule, &w)?;
        }
        let pick = w.pick(tie.unwrap_or(TieBreak::Lexicographic));
        let shown: Vec<Committee> = w.iter().take(20).collect();
        rule_rows.push(vec![
            "rule".into(),
            name.to_string(),
            fmt_ratio(w.score()),
            fmt_decimal(w.score()),
            members(&pick),
        ]);
        rule_json.push(json!({
            "rule": name,
            "score": fmt_ratio(w.score()),
            "winning_committees": w.count().to_string(),
            "winners": shown,
            "pick": pick,
        }));
    }
    let mode = match tie {
        Some(t) => Mode::Resolute(t),
        None => Mode::Irresolute,
    };
    let mut metric_rows = Vec::new();
    let mut metric_json = Vec::new();
    for name in list(metrics) {
        let metric: Objective = name.parse()?;
        let r = improvement(&e, metric, mode)?;
        if ctx.common.certify && mode == Mode::Irresolute {
            let o = oracle_improvement(&e, oracle_objective(metric), &OracleBudget::default())?;
            if o.as_ref() != Some(&r.value) {
                return Err(Error::Alarm(format!("{name} improvement differs from brute force")));
            }
        }
        metric_rows.push(vec![
            "metric".into(),
            name.to_string(),
            fmt_ratio(&r.value),
            fmt_decimal(&r.value),
            format!("{} / {}", fmt_ratio(&r.lv_score), fmt_ratio(&r.reference_score)),
        ]);
        let mut v = serde_json::to_value(&r).expect("plain data serializes");
        v["decimal"] = Value::String(fmt_decimal(&r.value));
        metric_json.push(v);
    }
    if ctx.common.certify {
        let order = loaded.order_or_identity();
        if is_broadcasted_laminar(&e, &order) {
            if let Err(err @ Error::Alarm(_)) = laminar_cc_check(&e, &order) {
                return Err(err);
            }
        }
    }
    let text = match ctx.format(Format::Json) {
        Format::Json => json_text(&json!({
            "n": e.n(), "m": e.m(), "k": e.k(), "l": e.l(),
            "rules": rule_json,
            "metrics": metric_json,
        })),
        Format::Csv => {
            rule_rows.extend(metric_rows);
            csv_text(&["kind", "name", "value", "decimal", "detail"], rule_rows)?
        }
    };
    emit(ctx.out(), &text)
}

fn cmd_axioms(ctx: &Ctx, election: &str, committee: Option<&str>, rule: &str, axioms: Option<&str>) -> Result<()> {
    let loaded = load(election)?;
    let e = loaded.election()?;
    let f = e.frame();
    let w = match committee {
        Some(s) => {
            let ids = list(s)
                .into_iter()
                .map(|x| x.parse::<usize>().map_err(|_| invalid(format!("bad candidate {x:?}"))))
                .collect::<Result<Vec<_>>>()?;
            f.check_committee(&ids)?
        }
        None => run_rule(ctx, &e, &parse_rule(rule)?)?.pick(ctx.tie().unwrap_or(TieBreak::Lexicographic)),
    };
    let wanted: Vec<String> = match axioms {
        Some(s) => list(s).into_iter().map(String::from).collect(),
        None => {
            let mut v: Vec<String> = ["jr", "pjr", "ejr"].map(String::from).to_vec();
            if detect_party_structure(f).is_ok() {
                v.push("lower-quota".into());
            }
            if is_laminar(f) {
                v.push("laminar".into());
            }
            v
        }
    };
    let verdicts = wanted
        .iter()
        .map(|a| match a.as_str() {
            "jr" => check_jr(f, &w),
            "pjr" => check_pjr(f, &w),
            "ejr" => check_ejr(f, &w),
            "lower-quota" => check_lower_quota_frame(f, &w),
            "laminar" => check_laminar_proportionality(f, &w),
            other => Err(invalid(format!("unknown axiom {other:?}"))),
        })
        .collect::<Result<Vec<AxiomVerdict>>>()?;
    let text = match ctx.format(Format::Json) {
        Format::Json => json_text(&json!({ "committee": w, "verdicts": verdicts })),
        Format::Csv => {
            let rows = verdicts
                .iter()
                .map(|v| {
                    let (voters, level) = match &v.witness {
                        Some(wit) => (
                            wit.voters.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
                            wit.level.to_string(),
                        ),
                        None => (String::new(), String::new()),
                    };
                    vec![axiom_name(v.axiom).into(), v.holds.to_string(), voters, level, members(&w)]
                })
                .collect();
            csv_text(&["axiom", "holds", "witness_voters", "level", "committee"], rows)?
        }
    };
    emit(ctx.out(), &text)
}

fn axiom_name(a: Axiom) -> &'static str {
    match a {
        Axiom::Jr => "jr",
        Axiom::Pjr => "pjr",
        Axiom::Ejr => "ejr",
        Axiom::LowerQuota => "lower-quota",
        Axiom::LaminarProportionality => "laminar",
    }
}

fn cmd_game(ctx: &Ctx, election: &str, profile: Option<&Path>, epsilon: usize) -> Result<()> {
    let game = LvGame::new(load(election)?.frame)?;
    let strategies: Vec<PartyStrategy> = match profile {
        Some(p) => serde_json::from_str(&read(p)?)?,
        None => game.lq_profile()?,
    };
    let outcome = game.outcome(&strategies)?;
    let verdict = game.verify_equilibrium(&strategies, epsilon)?;
    let quotas = game.quotas();
    let parties = &game.parties().parties;
    let text = match ctx.format(Format::Json) {
        Format::Json => json_text(&json!({
            "parties": parties.iter().zip(&quotas).map(|(p, q)| json!({
                "candidates": p.candidates, "supporters": p.supporters(), "quota": q,
            })).collect::<Vec<_>>(),
            "quota_gap": game.quota_gap(),
            "tallies": outcome.tallies,
            "utilities": outcome.utilities,
            "equilibrium": verdict,
        })),
        Format::Csv => {
            let rows = (0..parties.len())
                .map(|i| {
                    let best = verdict
                        .deviations
                        .iter()
                        .find(|d| d.party == i)
                        .map_or(outcome.utilities[i], |d| d.best_utility);
                    vec![
                        i.to_string(),
                        parties[i].supporters().to_string(),
                        quotas[i].to_string(),
                        outcome.utilities[i].to_string(),
                        best.to_string(),
                        epsilon.to_string(),
                        verdict.holds.to_string(),
                    ]
                })
                .collect();
            csv_text(&["party", "supporters", "quota", "utility", "best_response_utility", "epsilon", "equilibrium"], rows)?
        }
    };
    emit(ctx.out(), &text)
}

fn cmd_sweep(ctx: &Ctx, preset: &str, trials: Option<usize>, summary: Option<&Path>, sequential: bool) -> Result<()> {
    let mut cfg = match &ctx.common.config {
        Some(p) => SweepConfig::from_toml(&read(p)?)?,
        None => SweepConfig::preset(preset)?,
    };
    if let Some(s) = ctx.common.seed {
        cfg.seed = s;
    }
    if let Some(t) = trials {
        cfg.trials = t;
    }
    cfg.validate()?;
    let exec = if sequential { Execution::Sequential } else { Execution::default() };
    let records = run_sweep(&cfg, exec)?;
    emit(ctx.out(), &trials_csv(&cfg, &records)?)?;
    if let Some(path) = summary {
        let s = summarize(&records);
        let text = match ctx.format(Format::Csv) {
            Format::Csv => summary_csv(&s)?,
            Format::Json => json_text(&s),
        };
        std::fs::write(path, text)?;
    }
    Ok(())
}

fn cmd_repro(ctx: &Ctx) -> Result<()> {
    let items = run_repro();
    let status = |name: &str, pass: bool| match (pass, KNOWN_MISMATCHES.contains(&name)) {
        (true, _) => "pass",
        (false, true) => "known-mismatch",
        (false, false) => "fail",
    };
    let text = match ctx.format(Format::Csv) {
        Format::Json => json_text(
            &items
                .iter()
                .map(|i| json!({ "name": i.name, "status": status(&i.name, i.pass), "expected": i.expected, "computed": i.computed }))
                .collect::<Vec<_>>(),
        ),
        Format::Csv => csv_text(
            &["name", "status", "expected", "computed"],
            items
                .iter()
                .map(|i| vec![i.name.clone(), status(&i.name, i.pass).into(), i.expected.clone(), i.computed.clone()])
                .collect(),
        )?,
    };
    emit(ctx.out(), &text)?;
    let failed: Vec<&str> = items
        .iter()
        .filter(|i| status(&i.name, i.pass) == "fail")
        .map(|i| i.name.as_str())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::Alarm(format!("fixtures not reproduced: {}", failed.join(", "))))
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Ok(v) = std::env::var("LIMVOTE_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| invalid(format!("LIMVOTE_THREADS={v:?} is not a number")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| invalid(e.to_string()))?;
    }
    let ctx = Ctx { common: &cli.common, budget: cli.common.budget.unwrap_or(ENUMERATION_BUDGET) };
    match &cli.cmd {
        Cmd::Gen => cmd_gen(&ctx),
        Cmd::Eval { election, rules, metrics } => cmd_eval(&ctx, election, rules, metrics),
        Cmd::Axioms { election, committee, rule, axioms } => {
            cmd_axioms(&ctx, election, committee.as_deref(), rule, axioms.as_deref())
        }
        Cmd::Game { election, profile, epsilon } => cmd_game(&ctx, election, profile.as_deref(), *epsilon),
        Cmd::Sweep { preset, trials, summary, sequential } => {
            cmd_sweep(&ctx, preset, *trials, summary.as_deref(), *sequential)
        }
        Cmd::Repro => cmd_repro(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
