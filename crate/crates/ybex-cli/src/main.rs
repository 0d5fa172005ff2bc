//! Command-line front end for the `ybex` library.
//!
//! Every subcommand reads model files in the library's text format, runs one
//! well-defined computation, and prints a single table (text, JSON, or CSV
//! via `--format`). Exit code 0 means every check passed, 1 means a check
//! failed, and 2 means the input could not be used at all.

mod output;

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use output::{OutputFormat, Table};
use ybex::dynamics::{check_currents_vanish, evolve, long_time_limit_f64, sample_trajectory};
use ybex::markov::{
    check_hamiltonian_extraction_bounded, check_integrable_twist,
    check_transfer_commutation_bounded, commutation_grid, decode_config, encode_config,
    state_count, MarkovModel,
};
use ybex::model::{parse_model, ModelKind, ModelSpec};
use ybex::perm::Permutation;
use ybex::quench::{
    classify_partitions, BranchingMatrix, MassVector, PairRelation, QuenchMode, QuenchSchedule,
    QuenchStart, QuenchStep,
};
use ybex::rat;
use ybex::repro::run_repro_suite;
use ybex::report::CheckReport;
use ybex::sector::{
    check_stationary, count_sectors, sector_labels, stationary_state, SectorDecomposition,
};
use ybex::twosite::{
    check_braided_ybe, check_family_relations, check_involutive, check_spectral_ybe,
    spectral_grid, TwoSiteMap,
};

#[derive(Parser)]
#[command(
    name = "ybex",
    version,
    about = "Exactly verified integrable Markov models from set-theoretical \
             Yang-Baxter solutions",
    propagate_version = true
)]
struct Cli {
    /// Output format for the result table.
    #[arg(long, global = true, value_enum, default_value = "table")]
    format: OutputFormat,

    /// Largest state space any command is allowed to enumerate.
    #[arg(long, global = true, default_value_t = 4096)]
    max_states: usize,

    /// Error bound for floating-point time evolution.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Seed for reproducible trajectory sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for the reproduction suite (0 uses every core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check involutivity, the braided Yang-Baxter identity, and for
    /// families their defining relations.
    Verify {
        /// Model file.
        model: PathBuf,
    },
    /// Check the spectral Yang-Baxter identity, transfer-matrix commutation,
    /// and the generator extraction t(0)^-1 t'(0).
    Integrability {
        /// Model file.
        model: PathBuf,
    },
    /// List the dynamical sectors of a model.
    Sectors {
        /// Model file.
        model: PathBuf,
        /// Also list every member configuration of each sector.
        #[arg(long)]
        members: bool,
    },
    /// Count sectors by enumeration and, for twisted exclusion processes,
    /// by the closed formula.
    Count {
        /// Model file.
        model: PathBuf,
    },
    /// Uniform stationary states per sector, checked for stationarity and
    /// vanishing bond currents.
    Stationary {
        /// Model file.
        model: PathBuf,
        /// Restrict the output to one sector, listing its members.
        #[arg(long)]
        sector: Option<usize>,
    },
    /// Branching probabilities between the sector partitions of two models
    /// on the same chain.
    Branch {
        /// Model file providing the source partition.
        from: PathBuf,
        /// Model file providing the target partition.
        to: PathBuf,
    },
    /// Run a twist-switching schedule and report sector masses after every
    /// step.
    Quench {
        /// Alphabet size.
        #[arg(long)]
        n: usize,
        /// Chain length.
        #[arg(long)]
        l: usize,
        /// Initial state: "config:<sites>" or "sector:<index>" (a sector of
        /// the first step's twist).
        #[arg(long)]
        start: String,
        /// Schedule step, repeatable: a twist permutation, optionally with
        /// "@<duration>" to evolve for a fixed time instead of relaxing.
        #[arg(long = "step", value_name = "PERM[@T]", required = true)]
        steps: Vec<String>,
    },
    /// Sector masses over time, starting from one configuration.
    Evolve {
        /// Model file.
        model: PathBuf,
        /// Initial configuration, written as its site values.
        #[arg(long)]
        start: String,
        /// Final time of the evolution window.
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        /// Number of sample times, evenly spaced over [0, t-max].
        #[arg(long, default_value_t = 21)]
        points: usize,
    },
    /// Sample reproducible continuous-time trajectories.
    Sample {
        /// Model file.
        model: PathBuf,
        /// Initial configuration, written as its site values.
        #[arg(long)]
        start: String,
        /// Sampling horizon.
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        /// Number of independent trajectories (streams of the seed).
        #[arg(long, default_value_t = 1)]
        trajectories: u64,
    },
    /// Re-derive the frozen reference results and compare line by line.
    Repro,
}

/// Unusable input: reported on stderr, exit code 2.
struct UsageError(String);

fn usage(message: impl Into<String>) -> UsageError {
    UsageError(message.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
        if let Err(e) = pool {
            eprintln!("error: cannot size the thread pool: {}", e);
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(UsageError(message)) => {
            eprintln!("error: {}", message);
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<bool, UsageError> {
    let (table, passed) = match &cli.command {
        Command::Verify { model } => cmd_verify(&load_spec(model)?),
        Command::Integrability { model } => {
            cmd_integrability(&load_spec(model)?, cli.max_states)?
        }
        Command::Sectors { model, members } => {
            cmd_sectors(&load_spec(model)?, cli.max_states, *members)?
        }
        Command::Count { model } => cmd_count(&load_spec(model)?, cli.max_states)?,
        Command::Stationary { model, sector } => {
            cmd_stationary(&load_spec(model)?, cli.max_states, *sector)?
        }
        Command::Branch { from, to } => {
            cmd_branch(&load_spec(from)?, &load_spec(to)?, cli.max_states)?
        }
        Command::Quench { n, l, start, steps } => {
            cmd_quench(*n, *l, start, steps, cli.max_states, cli.tol)?
        }
        Command::Evolve {
            model,
            start,
            t_max,
            points,
        } => cmd_evolve(
            &load_spec(model)?,
            cli.max_states,
            start,
            *t_max,
            *points,
            cli.tol,
        )?,
        Command::Sample {
            model,
            start,
            t_max,
            trajectories,
        } => cmd_sample(
            &load_spec(model)?,
            cli.max_states,
            start,
            *t_max,
            *trajectories,
            cli.seed,
        )?,
        Command::Repro => cmd_repro(),
    };
    let mut stdout = std::io::stdout().lock();
    match table.emit(cli.format, &mut stdout).and_then(|()| stdout.flush()) {
        Ok(()) => Ok(passed),
        // a closed pipe downstream is not an error worth reporting
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(passed),
        Err(e) => Err(usage(format!("cannot write to stdout: {}", e))),
    }
}

fn load_spec(path: &Path) -> Result<ModelSpec, UsageError> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {}", path.display(), e)))?;
    parse_model(&text).map_err(|e| usage(format!("{}: {}", path.display(), e)))
}

/// Number of configurations, rejected when it exceeds the enumeration bound.
fn ensure_states(spec: &ModelSpec, max_states: usize) -> Result<usize, UsageError> {
    match state_count(spec.n(), spec.l()) {
        Some(states) if states <= max_states => Ok(states),
        Some(states) => Err(usage(format!(
            "the chain has {} configurations, over the --max-states bound {}",
            states, max_states
        ))),
        None => Err(usage(format!(
            "the state space {}^{} does not fit in a machine word",
            spec.n(),
            spec.l()
        ))),
    }
}

fn build_model(spec: &ModelSpec, max_states: usize) -> Result<MarkovModel, UsageError> {
    ensure_states(spec, max_states)?;
    spec.markov_model().map_err(|e| usage(e.to_string()))
}

fn describe_model(table: &mut Table, spec: &ModelSpec) {
    table.meta("n", spec.n().to_string());
    table.meta("l", spec.l().to_string());
    match spec.kind() {
        ModelKind::Lyubashenko { g } => {
            table.meta("kind", "lyubashenko");
            table.meta("g", g.to_string());
        }
        ModelKind::TwistedSsep { f } => {
            table.meta("kind", "twisted-ssep");
            table.meta("twist", f.to_string());
        }
        ModelKind::Family { family } => {
            table.meta("kind", "family");
            let list = |pick: &dyn Fn(usize) -> String| {
                (0..family.n()).map(pick).collect::<Vec<_>>().join("; ")
            };
            table.meta("g", list(&|i| family.g(i).to_string()));
            table.meta("f", list(&|j| family.f(j).to_string()));
        }
    }
}

fn status(ok: bool) -> String {
    if ok { "PASS" } else { "FAIL" }.to_string()
}

fn report_row(table: &mut Table, report: &CheckReport) {
    table.row(vec![
        report.name.clone(),
        report.checked.to_string(),
        report.failures.to_string(),
        status(report.passed()),
    ]);
    if let Some(first) = report.violations.first() {
        table.meta("violation", format!("{}: {}", report.name, first));
    }
}

/// Configuration text: concatenated digits for alphabets up to ten letters,
/// dot-separated site values otherwise. `parse_sites` accepts both.
fn render_sites(config: usize, n: usize, l: usize) -> String {
    let sites = decode_config(config, n, l);
    let cells: Vec<String> = sites.iter().map(|s| s.to_string()).collect();
    if n <= 10 {
        cells.concat()
    } else {
        cells.join(".")
    }
}

fn parse_sites(text: &str, n: usize, l: usize) -> Result<usize, UsageError> {
    let sites: Vec<usize> = if text.contains('.') {
        text.split('.')
            .map(|part| {
                part.parse::<usize>()
                    .map_err(|_| usage(format!("bad site value {:?} in {:?}", part, text)))
            })
            .collect::<Result<_, _>>()?
    } else {
        text.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as usize)
                    .ok_or_else(|| usage(format!("bad site digit {:?} in {:?}", c, text)))
            })
            .collect::<Result<_, _>>()?
    };
    if sites.len() != l {
        return Err(usage(format!(
            "configuration {:?} has {} sites, the chain has {}",
            text,
            sites.len(),
            l
        )));
    }
    if let Some(&bad) = sites.iter().find(|&&s| s >= n) {
        return Err(usage(format!(
            "site value {} is outside the alphabet 0..{}",
            bad, n
        )));
    }
    Ok(encode_config(&sites, n))
}

fn cmd_verify(spec: &ModelSpec) -> (Table, bool) {
    let mut table = Table::new("verify", &["check", "cases", "violations", "status"]);
    describe_model(&mut table, spec);
    let map = spec.two_site_map();
    let mut reports = vec![check_involutive(&map), check_braided_ybe(&map)];
    if let ModelKind::Family { family } = spec.kind() {
        reports.push(check_family_relations(family));
    }
    let passed = reports.iter().all(CheckReport::passed);
    for report in &reports {
        report_row(&mut table, report);
    }
    (table, passed)
}

fn cmd_integrability(spec: &ModelSpec, max_states: usize) -> Result<(Table, bool), UsageError> {
    ensure_states(spec, max_states)?;
    let l = spec.l();
    // The twisted exclusion process baxterizes the plain swap and carries the
    // twist in the transfer matrix; the other kinds baxterize their own map.
    let (map, twist) = match spec.kind() {
        ModelKind::TwistedSsep { f } => (TwoSiteMap::swap(spec.n()), Some(f)),
        _ => (spec.two_site_map(), None),
    };
    let grid = spectral_grid();

    let mut spectral = CheckReport::new("spectral Yang-Baxter identity on the grid");
    for u in &grid {
        for v in &grid {
            let one = check_spectral_ybe(&map, u, v).map_err(|e| usage(e.to_string()))?;
            spectral.absorb(one);
        }
    }
    let commutation =
        check_transfer_commutation_bounded(&map, l, twist, &commutation_grid(l), max_states)
            .map_err(|e| usage(e.to_string()))?;
    let extraction = check_hamiltonian_extraction_bounded(&map, l, twist, max_states)
        .map_err(|e| usage(e.to_string()))?;

    let mut reports = vec![spectral, commutation, extraction];
    if let Some(f) = twist {
        let mut commuting_twist =
            CheckReport::new("twist commutes with the Baxterized map on the grid");
        for u in &grid {
            for v in &grid {
                let one = check_integrable_twist(&map, f, u, v).map_err(|e| usage(e.to_string()))?;
                commuting_twist.absorb(one);
            }
        }
        reports.push(commuting_twist);
    }

    let mut table = Table::new("integrability", &["check", "cases", "violations", "status"]);
    describe_model(&mut table, spec);
    let grid_text: Vec<String> = grid.iter().map(rat::display).collect();
    table.meta("spectral-grid", grid_text.join(", "));
    let comm_text: Vec<String> = commutation_grid(l).iter().map(rat::display).collect();
    table.meta("commutation-grid", comm_text.join(", "));
    let passed = reports.iter().all(CheckReport::passed);
    for report in &reports {
        report_row(&mut table, report);
    }
    Ok((table, passed))
}

fn cmd_sectors(
    spec: &ModelSpec,
    max_states: usize,
    members: bool,
) -> Result<(Table, bool), UsageError> {
    let model = build_model(spec, max_states)?;
    let dec = SectorDecomposition::from_model(&model);
    let labels = spec.twist().map(|f| sector_labels(f, spec.l(), &dec));

    let mut columns = vec!["sector", "size", "label", "representative"];
    if members {
        columns.push("members");
    }
    let mut table = Table::new("sectors", &columns);
    describe_model(&mut table, spec);
    table.meta("states", model.state_count().to_string());
    table.meta("sectors", dec.count().to_string());
    for s in 0..dec.count() {
        let sector_members = dec.members(s);
        let label = labels
            .as_ref()
            .map(|all| all[s].to_string())
            .unwrap_or_default();
        let mut row = vec![
            s.to_string(),
            sector_members.len().to_string(),
            label,
            render_sites(sector_members[0], spec.n(), spec.l()),
        ];
        if members {
            let listed: Vec<String> = sector_members
                .iter()
                .map(|&x| render_sites(x, spec.n(), spec.l()))
                .collect();
            row.push(listed.join(" "));
        }
        table.row(row);
    }
    Ok((table, true))
}

fn cmd_count(spec: &ModelSpec, max_states: usize) -> Result<(Table, bool), UsageError> {
    let mut table = Table::new("count", &["method", "sectors"]);
    describe_model(&mut table, spec);
    let states = state_count(spec.n(), spec.l());
    table.meta(
        "states",
        states.map_or_else(|| "overflow".to_string(), |s| s.to_string()),
    );

    let mut passed = true;
    if let ModelKind::TwistedSsep { f } = spec.kind() {
        let closed = count_sectors(f, spec.l())
            .map_err(|e| usage(e.to_string()))?
            .to_string();
        table.row(vec!["closed-form".to_string(), closed.clone()]);
        if states.is_some_and(|s| s <= max_states) {
            let model = spec.markov_model().map_err(|e| usage(e.to_string()))?;
            let enumerated = SectorDecomposition::from_model(&model).count().to_string();
            table.row(vec!["enumerated".to_string(), enumerated.clone()]);
            passed = enumerated == closed;
            table.meta("agreement", status(passed));
        } else {
            table.meta(
                "agreement",
                "not enumerated, the state space is over --max-states",
            );
        }
    } else {
        let model = build_model(spec, max_states)?;
        let enumerated = SectorDecomposition::from_model(&model).count();
        table.row(vec!["enumerated".to_string(), enumerated.to_string()]);
    }
    Ok((table, passed))
}

fn cmd_stationary(
    spec: &ModelSpec,
    max_states: usize,
    sector: Option<usize>,
) -> Result<(Table, bool), UsageError> {
    let model = build_model(spec, max_states)?;
    let dec = SectorDecomposition::from_model(&model);
    let generator = model.generator();
    let dim = model.state_count();

    let verify = |s: usize| {
        let state = stationary_state(dim, dec.members(s));
        let stationary = check_stationary(generator, &state);
        let currents = check_currents_vanish(generator, &state);
        (stationary, currents)
    };

    match sector {
        Some(s) => {
            if s >= dec.count() {
                return Err(usage(format!(
                    "sector {} does not exist, the model has {} sectors",
                    s,
                    dec.count()
                )));
            }
            let members = dec.members(s);
            let weight = rat::rat(1, members.len() as i64);
            let (stationary, currents) = verify(s);
            let mut table = Table::new("stationary", &["configuration", "probability"]);
            describe_model(&mut table, spec);
            table.meta("sector", s.to_string());
            table.meta("size", members.len().to_string());
            table.meta("stationary", status(stationary.passed()));
            table.meta("currents-vanish", status(currents.passed()));
            for &x in members {
                table.row(vec![
                    render_sites(x, spec.n(), spec.l()),
                    rat::display(&weight),
                ]);
            }
            Ok((table, stationary.passed() && currents.passed()))
        }
        None => {
            let mut table = Table::new(
                "stationary",
                &["sector", "size", "probability", "stationary", "currents"],
            );
            describe_model(&mut table, spec);
            table.meta("sectors", dec.count().to_string());
            let mut passed = true;
            for s in 0..dec.count() {
                let size = dec.members(s).len();
                let (stationary, currents) = verify(s);
                passed &= stationary.passed() && currents.passed();
                table.row(vec![
                    s.to_string(),
                    size.to_string(),
                    rat::display(&rat::rat(1, size as i64)),
                    status(stationary.passed()),
                    status(currents.passed()),
                ]);
            }
            Ok((table, passed))
        }
    }
}

fn relation_word(relation: PairRelation) -> &'static str {
    match relation {
        PairRelation::Disjoint => "disjoint",
        PairRelation::Equal => "equal",
        PairRelation::FirstInsideSecond => "inside",
        PairRelation::SecondInsideFirst => "contains",
        PairRelation::ProperOverlap => "overlap",
    }
}

fn cmd_branch(
    from: &ModelSpec,
    to: &ModelSpec,
    max_states: usize,
) -> Result<(Table, bool), UsageError> {
    if from.n() != to.n() || from.l() != to.l() {
        return Err(usage(format!(
            "the models live on different chains: N={} L={} versus N={} L={}",
            from.n(),
            from.l(),
            to.n(),
            to.l()
        )));
    }
    let model_from = build_model(from, max_states)?;
    let model_to = build_model(to, max_states)?;
    let dec_from = SectorDecomposition::from_model(&model_from);
    let dec_to = SectorDecomposition::from_model(&model_to);
    let branching = BranchingMatrix::from_decompositions(&dec_from, &dec_to)
        .map_err(|e| usage(e.to_string()))?;
    let (relations, verdict) =
        classify_partitions(&dec_from, &dec_to).map_err(|e| usage(e.to_string()))?;
    let labels_from = from.twist().map(|f| sector_labels(f, from.l(), &dec_from));
    let labels_to = to.twist().map(|f| sector_labels(f, to.l(), &dec_to));
    let label_cell = |labels: &Option<Vec<ybex::sector::SectorLabel>>, s: usize| {
        labels
            .as_ref()
            .map(|all| all[s].to_string())
            .unwrap_or_default()
    };

    let mut table = Table::new(
        "branch",
        &[
            "from",
            "from-label",
            "to",
            "to-label",
            "probability",
            "relation",
        ],
    );
    table.meta("n", from.n().to_string());
    table.meta("l", from.l().to_string());
    table.meta("from-sectors", branching.n_from().to_string());
    table.meta("to-sectors", branching.n_to().to_string());
    table.meta("verdict", verdict.to_string());
    table.meta("rows-stochastic", status(branching.row_sums_are_one()));
    let zero = rat::zero();
    for (i, relation_row) in relations.iter().enumerate() {
        for (j, &relation) in relation_row.iter().enumerate() {
            let probability = branching.probability(i, j);
            if *probability == zero {
                continue;
            }
            table.row(vec![
                i.to_string(),
                label_cell(&labels_from, i),
                j.to_string(),
                label_cell(&labels_to, j),
                rat::display(probability),
                relation_word(relation).to_string(),
            ]);
        }
    }
    Ok((table, branching.row_sums_are_one()))
}

fn parse_quench_start(text: &str, n: usize, l: usize) -> Result<QuenchStart, UsageError> {
    if let Some(rest) = text.strip_prefix("config:") {
        Ok(QuenchStart::Configuration(parse_sites(rest, n, l)?))
    } else if let Some(rest) = text.strip_prefix("sector:") {
        rest.parse()
            .map(QuenchStart::SectorOfFirstTwist)
            .map_err(|_| usage(format!("bad sector index {:?}", rest)))
    } else {
        Err(usage(
            "--start must be config:<sites> or sector:<index>".to_string(),
        ))
    }
}

fn parse_quench_step(text: &str, n: usize) -> Result<QuenchStep, UsageError> {
    let (perm_text, mode) = match text.rsplit_once('@') {
        Some((perm_text, duration)) => {
            let t: f64 = duration
                .parse()
                .map_err(|_| usage(format!("bad duration {:?} in step {:?}", duration, text)))?;
            (perm_text, QuenchMode::Duration(t))
        }
        None => (text, QuenchMode::UntilStationary),
    };
    let twist = Permutation::parse(perm_text, n)
        .map_err(|e| usage(format!("bad twist {:?}: {}", perm_text, e)))?;
    Ok(QuenchStep { twist, mode })
}

fn mode_word(mode: &QuenchMode) -> String {
    match mode {
        QuenchMode::UntilStationary => "until-stationary".to_string(),
        QuenchMode::Duration(t) => format!("t={}", t),
    }
}

fn mass_cells(masses: &MassVector) -> Vec<String> {
    match masses {
        MassVector::Exact(values) => values.iter().map(rat::display).collect(),
        MassVector::Float(values) => values.iter().map(|v| v.to_string()).collect(),
    }
}

fn cmd_quench(
    n: usize,
    l: usize,
    start: &str,
    step_texts: &[String],
    max_states: usize,
    tol: f64,
) -> Result<(Table, bool), UsageError> {
    match state_count(n, l) {
        Some(states) if states <= max_states => {}
        Some(states) => {
            return Err(usage(format!(
                "the chain has {} configurations, over the --max-states bound {}",
                states, max_states
            )))
        }
        None => {
            return Err(usage(format!(
                "the state space {}^{} does not fit in a machine word",
                n, l
            )))
        }
    }
    let steps: Vec<QuenchStep> = step_texts
        .iter()
        .map(|text| parse_quench_step(text, n))
        .collect::<Result<_, _>>()?;
    let start = parse_quench_start(start, n, l)?;
    let schedule = QuenchSchedule::new(n, l, start, steps).map_err(|e| usage(e.to_string()))?;
    let run = schedule.run(tol).map_err(|e| usage(e.to_string()))?;

    let mut table = Table::new("quench", &["step", "twist", "mode", "sector", "mass"]);
    table.meta("n", n.to_string());
    table.meta("l", l.to_string());
    table.meta("tol", tol.to_string());
    table.meta(
        "final-masses",
        if run.final_state.is_exact() {
            "exact"
        } else {
            "float"
        },
    );
    for (index, outcome) in run.outcomes.iter().enumerate() {
        let cells = mass_cells(&outcome.sector_masses);
        for (sector, mass) in cells.into_iter().enumerate() {
            table.row(vec![
                index.to_string(),
                outcome.twist.to_string(),
                mode_word(&outcome.mode),
                sector.to_string(),
                mass,
            ]);
        }
    }
    Ok((table, true))
}

fn cmd_evolve(
    spec: &ModelSpec,
    max_states: usize,
    start: &str,
    t_max: f64,
    points: usize,
    tol: f64,
) -> Result<(Table, bool), UsageError> {
    if points < 2 {
        return Err(usage("--points must be at least 2".to_string()));
    }
    if !t_max.is_finite() || t_max <= 0.0 {
        return Err(usage(format!("--t-max must be a positive time, got {}", t_max)));
    }
    let model = build_model(spec, max_states)?;
    let dec = SectorDecomposition::from_model(&model);
    let config = parse_sites(start, spec.n(), spec.l())?;
    let mut initial = vec![0.0; model.state_count()];
    initial[config] = 1.0;
    let limit = long_time_limit_f64(&dec, &initial);

    let mut columns = vec!["t".to_string()];
    for s in 0..dec.count() {
        columns.push(format!("sector-{}", s));
    }
    columns.push("tv-to-limit".to_string());
    let column_refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = Table::new("evolve", &column_refs);
    describe_model(&mut table, spec);
    table.meta("start", render_sites(config, spec.n(), spec.l()));
    table.meta("sectors", dec.count().to_string());
    table.meta("tol", tol.to_string());

    for i in 0..points {
        let t = t_max * i as f64 / (points - 1) as f64;
        let p = evolve(model.generator(), &initial, t, tol).map_err(|e| usage(e.to_string()))?;
        let mut row = vec![t.to_string()];
        for s in 0..dec.count() {
            let mass: f64 = dec.members(s).iter().map(|&x| p[x]).sum();
            row.push(mass.to_string());
        }
        let tv = 0.5
            * p.iter()
                .zip(&limit)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>();
        row.push(tv.to_string());
        table.row(row);
    }
    Ok((table, true))
}

fn cmd_sample(
    spec: &ModelSpec,
    max_states: usize,
    start: &str,
    t_max: f64,
    trajectories: u64,
    seed: u64,
) -> Result<(Table, bool), UsageError> {
    if trajectories == 0 {
        return Err(usage("--trajectories must be at least 1".to_string()));
    }
    let model = build_model(spec, max_states)?;
    let config = parse_sites(start, spec.n(), spec.l())?;

    let mut table = Table::new("sample", &["trajectory", "time", "bond", "from", "to"]);
    describe_model(&mut table, spec);
    table.meta("start", render_sites(config, spec.n(), spec.l()));
    table.meta("t-max", t_max.to_string());
    table.meta("seed", seed.to_string());
    let mut finals = String::new();
    for stream in 0..trajectories {
        let trajectory = sample_trajectory(&model, config, t_max, seed, stream)
            .map_err(|e| usage(e.to_string()))?;
        for event in &trajectory.events {
            table.row(vec![
                stream.to_string(),
                event.time.to_string(),
                event.bond.to_string(),
                render_sites(event.from, spec.n(), spec.l()),
                render_sites(event.to, spec.n(), spec.l()),
            ]);
        }
        if !finals.is_empty() {
            finals.push(' ');
        }
        let _ = write!(
            finals,
            "{}",
            render_sites(trajectory.final_state(), spec.n(), spec.l())
        );
    }
    table.meta("final-states", finals);
    Ok((table, true))
}

fn cmd_repro() -> (Table, bool) {
    let report = run_repro_suite();
    let mut table = Table::new(
        "repro",
        &["status", "check", "expected", "computed", "seconds"],
    );
    table.meta("checks", report.checks.len().to_string());
    table.meta(
        "failures",
        report.checks.iter().filter(|c| !c.passed).count().to_string(),
    );
    for check in &report.checks {
        table.row(vec![
            status(check.passed),
            check.name.clone(),
            check.expected.clone(),
            check.computed.clone(),
            format!("{:.2}", check.seconds),
        ]);
    }
    (table, report.passed())
}
