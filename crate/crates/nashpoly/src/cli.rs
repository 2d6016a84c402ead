//! The `nashpoly` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use nashpoly_core::homotopy::StallReason;
use nashpoly_core::nash::{Warning, WarningKind};
use nashpoly_core::{
    enumerate_supports, find_pure_strict, Classification, EquilibriumCandidate, GameFormat, HomotopyConfig, Injection,
    PathStatus, SolveMethod, SolveOptions, StartLibrary, Support, SupportMode, SupportOptions,
};
use nashpoly_core::nash::PathTracker;
use serde_json::{json, Value};

use crate::error::{read_file, write_file, Error, Result};
use crate::gamefile::{parse_game, GameFile};
use crate::parallel::{find_all_nash_parallel, Threaded};
use crate::phc::{float_system, read_solutions, read_system, real_system, write_solutions, write_system, SolutionRecord};
use crate::validate::{residual_report, validate_solutions, DEFAULT_TOLERANCE};
use crate::cache;

#[derive(Debug, Parser)]
#[command(name = "nashpoly", version, about = "All Nash equilibria of normal-form games by polynomial homotopy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SupportChoice {
    All,
    Generic,
    TotallyMixed,
}

impl From<SupportChoice> for SupportMode {
    fn from(c: SupportChoice) -> Self {
        match c {
            SupportChoice::All => SupportMode::All,
            SupportChoice::Generic => SupportMode::Generic,
            SupportChoice::TotallyMixed => SupportMode::TotallyMixed,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodChoice {
    Library,
    Direct,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InjectionChoice {
    Pow2,
    Succ,
}

impl From<InjectionChoice> for Injection {
    fn from(c: InjectionChoice) -> Self {
        match c {
            InjectionChoice::Pow2 => Injection::PowersOfTwo,
            InjectionChoice::Succ => Injection::Successor,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the pure strict Nash equilibria of a game file.
    Pure {
        game: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Find all Nash equilibria of a game file.
    Solve {
        game: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        supports: SupportChoice,
        #[arg(long, value_enum, default_value = "library")]
        method: MethodChoice,
        #[arg(long, value_enum, default_value = "pow2")]
        injection: InjectionChoice,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value_t = HomotopyConfig::DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        json: bool,
        /// Also report quasi, complex and rejected candidates (with --json).
        #[arg(long, requires = "json")]
        all_candidates: bool,
        /// Start-library directory; defaults to $NASHPOLY_CACHE.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Build the start system of a format, enumerate its roots and cache
    /// the restricted start systems of every support.
    StartSystem {
        /// `N:n1,...,nN` with `ni` the strategy count of player i.
        #[arg(long)]
        format: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "pow2")]
        injection: InjectionChoice,
        /// Start-library directory; defaults to $NASHPOLY_CACHE, then --out.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Track solutions of a start system to a target system.
    Track {
        #[arg(long)]
        start: PathBuf,
        #[arg(long)]
        roots: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, default_value_t = HomotopyConfig::DEFAULT_SEED)]
        gamma_seed: u64,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Solution file to write; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a system at every solution of a solution file.
    Validate {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        solutions: PathBuf,
        #[arg(long, default_value_t = 16)]
        digits: usize,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
    },
}

/// Runs the command line on `args` (including the program name) and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match command {
        Command::Pure { game, json } => pure(&game, json, out),
        Command::Solve {
            game,
            supports,
            method,
            injection,
            workers,
            seed,
            json,
            all_candidates,
            cache,
        } => {
            let options = SolveOptions {
                supports: SupportOptions::mode(supports.into()),
                method: match method {
                    MethodChoice::Library => SolveMethod::StartLibrary,
                    MethodChoice::Direct => SolveMethod::Direct,
                },
                homotopy: HomotopyConfig::with_seed(seed),
                keep_all_candidates: all_candidates,
                injection: injection.into(),
                ..SolveOptions::default()
            };
            let settings = SolveSettings {
                workers,
                seed,
                json,
                cache: cache.or_else(cache::default_dir),
            };
            solve(&game, &options, &settings, out, err)
        }
        Command::StartSystem {
            format,
            out: dir,
            injection,
            cache,
        } => start_system(&format, &dir, injection.into(), cache, out),
        Command::Track {
            start,
            roots,
            target,
            gamma_seed,
            k,
            workers,
            out: path,
        } => track(&start, &roots, &target, gamma_seed, k, workers, path.as_deref(), out, err),
        Command::Validate {
            system,
            solutions,
            digits,
            tolerance,
        } => {
            let system = read_system(&read_file(&system)?)?;
            let records = read_solutions(&read_file(&solutions)?)?;
            let residuals = validate_solutions(&system, &records, digits, tolerance)?;
            write_out(out, &residual_report(&residuals, digits))
        }
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|source| Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

fn load_game(path: &Path) -> Result<(GameFile, nashpoly_core::Game)> {
    let file = parse_game(&read_file(path)?)?;
    let game = file.to_game()?;
    Ok((file, game))
}

fn pure(path: &Path, json: bool, out: &mut dyn Write) -> Result<()> {
    let (file, game) = load_game(path)?;
    let profiles = find_pure_strict(&game);
    if json {
        let labelled: Vec<Vec<String>> = profiles
            .iter()
            .map(|p| p.iter().enumerate().map(|(i, &s)| file.label(i, s)).collect())
            .collect();
        let doc = json!({ "format": game.format().to_string(), "pure_strict": profiles, "labels": labelled });
        return write_out(out, &format!("{}\n", serde_json::to_string_pretty(&doc)?));
    }
    let mut text = format!("{} pure strict equilibria\n", profiles.len());
    for p in &profiles {
        let labels: Vec<String> = p.iter().enumerate().map(|(i, &s)| file.label(i, s)).collect();
        text.push_str(&format!("  {}\n", labels.join(" ")));
    }
    write_out(out, &text)
}

struct SolveSettings {
    workers: usize,
    seed: u64,
    json: bool,
    cache: Option<PathBuf>,
}

/// Library for `format` holding every support `options` visits, read from
/// and written back to the cache directory when one is configured.
fn library_for(format: &GameFormat, options: &SolveOptions, cache_dir: Option<&Path>) -> Result<StartLibrary> {
    let mut library = match cache_dir {
        Some(dir) => cache::load(dir, format, options.injection)?,
        None => None,
    }
    .map_or_else(|| StartLibrary::new(format, options.injection), Ok)?;
    let before = library.len();
    library.prepare_all(enumerate_supports(format, &options.supports))?;
    if let Some(dir) = cache_dir {
        if library.len() != before {
            cache::save(&library, dir, options.injection)?;
        }
    }
    Ok(library)
}

fn support_sets(support: &Support) -> Vec<Vec<usize>> {
    (0..support.players()).map(|p| support.strategies(p).to_vec()).collect()
}

fn support_text(support: &Support) -> String {
    support_sets(support)
        .iter()
        .map(|s| format!("{{{}}}", s.iter().map(usize::to_string).collect::<Vec<_>>().join(",")))
        .collect::<Vec<_>>()
        .join(" ")
}

fn warning_text(w: &Warning) -> String {
    let what = match &w.kind {
        WarningKind::PathStalled(StallReason::StepUnderflow) => "path stalled: step size underflow".to_string(),
        WarningKind::PathStalled(StallReason::SingularEndgame) => "path stalled: singular endpoint".to_string(),
        WarningKind::PathStalled(reason) => format!("path stalled: {reason:?}"),
        WarningKind::PathDiverged => "path diverged".to_string(),
        WarningKind::PathFailed(e) => format!("path failed: {e}"),
        WarningKind::PositiveDimensional => "positive-dimensional solution set".to_string(),
    };
    match w.path {
        Some(p) => format!("support {} path {}: {what}", support_text(&w.support), p + 1),
        None => format!("support {}: {what}", support_text(&w.support)),
    }
}

fn classification_name(c: Classification) -> &'static str {
    match c {
        Classification::Nash => "nash",
        Classification::Quasi => "quasi",
        Classification::Complex => "complex",
        Classification::RejectedSlack => "rejected_slack",
        Classification::RejectedNegative => "rejected_negative",
    }
}

fn candidate_json(c: &EquilibriumCandidate) -> Value {
    json!({
        "support": support_sets(&c.support),
        "classification": classification_name(c.classification),
        "probabilities": c.profile.strategies(),
        "regrets": c.slack.as_ref().map(|v| v.values().to_vec()),
        "path": c.path.map(|p| p + 1),
    })
}

fn solve(path: &Path, options: &SolveOptions, settings: &SolveSettings, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let (file, game) = load_game(path)?;
    let library = match options.method {
        SolveMethod::StartLibrary => Some(library_for(game.format(), options, settings.cache.as_deref())?),
        SolveMethod::Direct => None,
    };
    let report = find_all_nash_parallel(&game, options, library.as_ref(), settings.workers)?;
    for w in &report.warnings {
        let _ = writeln!(err, "warning: {}", warning_text(w));
    }
    if settings.json {
        let mut doc = json!({
            "format": game.format().to_string(),
            "seed": settings.seed,
            "supports": report.supports,
            "paths": report.paths,
            "pure_strict": report.pure_strict,
            "equilibria": report.equilibria.iter().map(candidate_json).collect::<Vec<_>>(),
            "warnings": report.warnings.iter().map(warning_text).collect::<Vec<_>>(),
        });
        if options.keep_all_candidates {
            doc["candidates"] = report.candidates.iter().map(candidate_json).collect();
        }
        return write_out(out, &format!("{}\n", serde_json::to_string_pretty(&doc)?));
    }
    let mut text = format!(
        "game {}: {} Nash equilibria ({} supports, {} paths)\n",
        game.format(),
        report.equilibria.len(),
        report.supports,
        report.paths
    );
    for (n, e) in report.equilibria.iter().enumerate() {
        text.push_str(&format!("equilibrium {} : support {}\n", n + 1, support_text(&e.support)));
        for (p, probs) in e.profile.strategies().iter().enumerate() {
            text.push_str(&format!("  player {}\n", p + 1));
            for (s, prob) in probs.iter().enumerate() {
                let regret = e.slack.as_ref().map_or(f64::NAN, |v| v.get(p, s));
                text.push_str(&format!(
                    "    {:<8} probability {:>16.12}  regret {:>16.12}\n",
                    file.label(p, s),
                    prob,
                    regret
                ));
            }
        }
    }
    write_out(out, &text)
}

/// Parses `N:n1,...,nN`.
fn parse_format(text: &str) -> Result<GameFormat> {
    let bad = || Error::Usage(format!("format {text:?} is not of the form N:n1,...,nN"));
    let (players, counts) = text.split_once(':').ok_or_else(bad)?;
    let players: usize = players.trim().parse().map_err(|_| bad())?;
    let counts = counts
        .split(',')
        .map(|c| c.trim().parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| bad())?;
    if counts.len() != players {
        return Err(Error::Usage(format!("format {text:?} lists {} strategy counts for {players} players", counts.len())));
    }
    Ok(GameFormat::from_strategy_counts(&counts)?)
}

fn start_system(text: &str, dir: &Path, injection: Injection, cache_dir: Option<PathBuf>, out: &mut dyn Write) -> Result<()> {
    let format = parse_format(text)?;
    let options = SolveOptions {
        injection,
        ..SolveOptions::default()
    };
    let cache_dir = cache_dir.or_else(cache::default_dir).unwrap_or_else(|| dir.to_path_buf());
    let library = library_for(&format, &options, None)?;
    let start = library.full();
    let roots = start.roots()?;

    // Reversed equations make the variables appear in their natural order.
    let system = real_system(&start.expanded_exact());
    let reversed = nashpoly_core::PolySystem::new(
        system.names().to_vec(),
        system.equations().iter().rev().cloned().collect(),
    )?;
    let names = start.names();
    let records: Vec<SolutionRecord> = roots
        .iter()
        .enumerate()
        .map(|(i, r)| SolutionRecord {
            index: i + 1,
            t: num_complex::Complex64::new(0.0, 0.0),
            m: 1,
            coordinates: names
                .iter()
                .cloned()
                .zip(nashpoly_core::exact::to_complex(r))
                .collect(),
            err: 0.0,
            rco: 1.0,
            res: 0.0,
        })
        .collect();

    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let counts: Vec<String> = (0..format.players()).map(|p| format.strategies(p).to_string()).collect();
    let stem = dir.join(format!("gameof{}_start_phc", counts.join("x")));
    let roots_path = stem.with_file_name(format!("gameof{}_start_phc.roots", counts.join("x")));
    write_file(&stem, &write_system(&reversed)?)?;
    write_file(&roots_path, &write_solutions(&records, names.len())?)?;
    let cache_path = cache::save(&library, &cache_dir, injection)?;
    write_out(
        out,
        &format!(
            "format {format}: {} equations, {} roots, {} supports cached\n{}\n{}\n{}\n",
            reversed.len(),
            records.len(),
            library.len(),
            stem.display(),
            roots_path.display(),
            cache_path.display()
        ),
    )
}

#[allow(clippy::too_many_arguments)]
fn track(
    start: &Path,
    roots: &Path,
    target: &Path,
    gamma_seed: u64,
    k: u32,
    workers: usize,
    path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<()> {
    let start = read_system(&read_file(start)?)?;
    let records = read_solutions(&read_file(roots)?)?;
    let target = read_system(&read_file(target)?)?.reorder_variables(start.names())?;
    let points = records
        .iter()
        .map(|r| {
            if r.coordinates.len() != start.nvars() {
                return Err(Error::Arity {
                    index: r.index,
                    expected: start.nvars(),
                    got: r.coordinates.len(),
                });
            }
            start
                .names()
                .iter()
                .map(|n| {
                    r.coordinates
                        .iter()
                        .find(|(m, _)| m == n)
                        .map(|(_, z)| *z)
                        .ok_or_else(|| Error::UnknownName(n.clone()))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let config = HomotopyConfig {
        power: k,
        ..HomotopyConfig::with_seed(gamma_seed)
    };
    let (start, target) = (float_system(&start), float_system(&target));
    let results = Threaded { workers }.track(&start, &target, &points, &config);
    let mut solutions = Vec::with_capacity(results.len());
    let mut converged = 0;
    for (i, result) in results.into_iter().enumerate() {
        let r = result?;
        if r.status == PathStatus::Converged {
            converged += 1;
        } else {
            let _ = writeln!(err, "warning: path {} ended {:?} at t = {}", i + 1, r.status, r.t_reached);
        }
        solutions.push(SolutionRecord {
            index: i + 1,
            t: num_complex::Complex64::new(r.t_reached, 0.0),
            m: 1,
            coordinates: start.names().iter().cloned().zip(r.endpoint).collect(),
            err: r.err,
            rco: r.rco,
            res: r.residual,
        });
    }
    let _ = writeln!(err, "{} paths, {converged} converged", solutions.len());
    let text = write_solutions(&solutions, start.nvars())?;
    match path {
        Some(p) => write_file(p, &text),
        None => write_out(out, &text),
    }
}
