mod io;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use switched_lss::examples::{example1_minimal, example1_system, example2_markov};
use switched_lss::hankel::DEFAULT_ENTRY_CAP;
use switched_lss::lss_core::{check_morphism, io_map, HybridWord, LssDims, ModeWord};
use switched_lss::lss_realization::{
    algorithm_1, algorithm_1_from_markov, io_residual, is_observable, is_span_reachable, lss_isomorphism,
    minimize_lss, Algorithm1Output, RankTest, DEFAULT_MORPHISM_TOL, DEFAULT_VALIDATION_TOL,
};
use switched_lss::markov::ExperimentTable;
use switched_lss::numerics::RankReport;
use switched_lss::{build_hankel, extract_markov, hankel_rank, Error, HankelBlockMatrix, SwitchedLinearSystem, DEFAULT_RANK_TOL};

use crate::io::{list, matrix, num, yes_no};

#[derive(Parser)]
#[command(name = "lssreal", version, about = "Realization theory for discrete-time linear switched systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the output at every step of a hybrid input.
    Simulate {
        system: PathBuf,
        /// Mode sequence, e.g. 1,2,2.
        #[arg(long)]
        word: String,
        /// Headerless CSV with one row of m inputs per step; zero inputs if omitted.
        #[arg(long)]
        inputs: Option<PathBuf>,
    },
    /// Tabulate Markov parameters from a system or from recorded experiments.
    Markov {
        /// System file (omit when using --dataset).
        system: Option<PathBuf>,
        /// Experiment file, one `<word> | <inputs> | <output>` record per line.
        #[arg(long, conflicts_with = "system")]
        dataset: Option<PathBuf>,
        /// Dimensions D,m,p of the dataset.
        #[arg(long, value_parser = io::parse_dims)]
        dims: Option<LssDims>,
        /// Longest word length; defaults to 2n+1 for a system.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build the Hankel matrix H_{L,M} from a Markov table.
    Hankel {
        markov: PathBuf,
        #[arg(short = 'L', long = "L")]
        l: usize,
        #[arg(short = 'M', long = "M")]
        m: usize,
        /// Needed when the Markov file has no header.
        #[arg(long, value_parser = io::parse_dims)]
        dims: Option<LssDims>,
        /// Print the numerical rank and singular values.
        #[arg(long)]
        rank: bool,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        tol: f64,
        /// Matrix CSV; the index sidecar is written next to it as <stem>.index.csv.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Span-reachability, observability and minimality report.
    Check {
        system: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        tol: f64,
    },
    /// Compute a minimal system with the same input-output map.
    Minimize {
        system: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_MORPHISM_TOL)]
        morphism_tol: f64,
    },
    /// Minimal realization from Markov parameters or from a Hankel matrix H_{N,N+1}.
    Realize {
        /// Markov table, or Hankel CSV (by .csv extension).
        input: PathBuf,
        #[arg(short = 'N', long = "N")]
        n: usize,
        /// D,m,p; required for a Hankel CSV or a Markov file without header.
        #[arg(long, value_parser = io::parse_dims)]
        dims: Option<LssDims>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_VALIDATION_TOL)]
        validation_tol: f64,
    },
    /// Decide whether two systems realize the same map up to a change of basis.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_MORPHISM_TOL)]
        morphism_tol: f64,
    },
    /// Write the built-in worked examples as files.
    Examples {
        which: Which,
        /// Output directory.
        #[arg(short, long, default_value = ".")]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    /// Three-dimensional two-mode system and its two-dimensional minimal form.
    #[value(name = "example-1")]
    Example1,
    /// Markov table of the rank-2 two-mode map, depth 8.
    #[value(name = "example-2")]
    Example2,
}

/// A check that ran but came out negative; the report still goes to stdout.
#[derive(Debug)]
struct Rejected {
    report: String,
    reason: String,
}

fn rejected(report: String, reason: impl Into<String>) -> anyhow::Error {
    anyhow!(Rejected {
        report,
        reason: reason.into()
    })
}

impl std::fmt::Display for Rejected {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.reason)
    }
}

impl std::error::Error for Rejected {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Rejected>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            if matches!(
                e,
                Error::HypothesisViolated { .. } | Error::NotIsomorphic { .. } | Error::InsufficientDepth { .. }
            ) {
                return 2;
            }
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            if let Some(r) = err.downcast_ref::<Rejected>() {
                print!("{}", r.report);
            }
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn run(command: Command) -> Result<String> {
    match command {
        Command::Simulate { system, word, inputs } => simulate(&system, &word, inputs.as_deref()),
        Command::Markov {
            system,
            dataset,
            dims,
            depth,
            output,
        } => markov(system.as_deref(), dataset.as_deref(), dims, depth, output.as_deref()),
        Command::Hankel {
            markov,
            l,
            m,
            dims,
            rank,
            tol,
            output,
        } => hankel(&markov, l, m, dims, rank, tol, &output),
        Command::Check { system, tol } => check(&system, tol),
        Command::Minimize {
            system,
            output,
            tol,
            morphism_tol,
        } => minimize(&system, output.as_deref(), tol, morphism_tol),
        Command::Realize {
            input,
            n,
            dims,
            output,
            tol,
            validation_tol,
        } => realize(&input, n, dims, output.as_deref(), tol, validation_tol),
        Command::Compare { a, b, tol, morphism_tol } => compare(&a, &b, tol, morphism_tol),
        Command::Examples { which, output } => examples(which, &output),
    }
}

fn simulate(path: &Path, word: &str, inputs: Option<&Path>) -> Result<String> {
    let sys = io::load_system(path)?;
    let modes: ModeWord = word.parse().context("--word")?;
    if modes.is_empty() {
        bail!("--word must name at least one mode");
    }
    let us = match inputs {
        Some(p) => io::load_inputs(p, sys.input_dim(), modes.len())?,
        None => vec![DVector::zeros(sys.input_dim()); modes.len()],
    };
    let w = HybridWord::new(modes.clone(), us)?;
    let ys = sys.output_trajectory(sys.x0(), &w)?;
    let mut out = String::from("step,mode");
    for i in 1..=sys.output_dim() {
        let _ = write!(out, ",y{i}");
    }
    out.push('\n');
    for (t, (q, y)) in modes.letters().iter().zip(&ys).enumerate() {
        let values: Vec<String> = y.iter().map(|&x| num(x)).collect();
        let _ = writeln!(out, "{t},{q},{}", values.join(","));
    }
    Ok(out)
}

fn markov(
    system: Option<&Path>,
    dataset: Option<&Path>,
    dims: Option<LssDims>,
    depth: Option<usize>,
    output: Option<&Path>,
) -> Result<String> {
    let table = match (system, dataset) {
        (Some(p), None) => {
            let sys = io::load_system(p)?;
            let depth = depth.unwrap_or(2 * sys.state_dim() + 1).max(1);
            extract_markov(&io_map(&sys), depth)?
        }
        (None, Some(p)) => {
            let dims = dims.ok_or_else(|| anyhow!("--dataset needs --dims D,m,p"))?;
            let depth = depth.ok_or_else(|| anyhow!("--dataset needs --depth"))?;
            let data = ExperimentTable::from_text(&io::read(p)?, dims)
                .with_context(|| format!("invalid dataset {}", p.display()))?;
            extract_markov(&data, depth).context("the dataset lacks an experiment needed at this depth")?
        }
        _ => bail!("give either a system file or --dataset"),
    };
    let text = table.to_text()?;
    match output {
        Some(p) => {
            io::write(p, &text)?;
            Ok(format!("wrote {} (depth {})\n", p.display(), table.depth().unwrap_or(0)))
        }
        None => Ok(text),
    }
}

fn rank_lines(out: &mut String, report: &RankReport) {
    let _ = writeln!(out, "rank tolerance: {} (threshold {})", num(report.tolerance), num(report.threshold));
    let _ = writeln!(out, "rank: {}", report.rank);
    let _ = writeln!(out, "singular values: {}", list(&report.singular_values));
    if report.is_ambiguous() {
        let _ = writeln!(out, "warning: singular values near the threshold: {}", list(&report.near_threshold));
    }
}

fn hankel(markov: &Path, l: usize, m: usize, dims: Option<LssDims>, rank: bool, tol: f64, output: &Path) -> Result<String> {
    let family = io::load_markov(markov, dims)?;
    let h = build_hankel(&family, l, m, DEFAULT_ENTRY_CAP)?;
    io::write(output, &h.to_csv())?;
    let sidecar = io::sidecar_path(output);
    io::write(&sidecar, &h.index_sidecar())?;
    let mut out = format!(
        "H_{{{l},{m}}}: {}x{} written to {} (index {})\n",
        h.matrix().nrows(),
        h.matrix().ncols(),
        output.display(),
        sidecar.display()
    );
    if rank {
        rank_lines(&mut out, &hankel_rank(&h, tol));
    }
    Ok(out)
}

fn rank_test_lines(out: &mut String, name: &str, test: &RankTest) {
    let _ = writeln!(out, "{name}: {} (rank {} of {})", yes_no(test.holds), test.rank, test.state_dim);
    let _ = writeln!(out, "  singular values: {}", list(&test.report.singular_values));
    if test.report.is_ambiguous() {
        let _ = writeln!(out, "  warning: near the threshold: {}", list(&test.report.near_threshold));
    }
}

fn check(path: &Path, tol: f64) -> Result<String> {
    let sys = io::load_system(path)?;
    let reach = is_span_reachable(&sys, tol)?;
    let obs = is_observable(&sys, tol)?;
    let mut out = format!("rank tolerance: {}\nstate dimension: {}\n", num(tol), sys.state_dim());
    rank_test_lines(&mut out, "span-reachable", &reach);
    rank_test_lines(&mut out, "observable", &obs);
    let _ = writeln!(out, "minimal: {}", yes_no(reach.holds && obs.holds));
    Ok(out)
}

/// Word depth at which agreement of all combined Markov parameters of two
/// systems of dimensions `a` and `b` implies equal input-output maps.
fn decisive_depth(a: usize, b: usize) -> usize {
    (a + b).saturating_sub(1)
}

fn minimize(path: &Path, output: Option<&Path>, tol: f64, morphism_tol: f64) -> Result<String> {
    let sys = io::load_system(path)?;
    let min = minimize_lss(&sys, tol)?;
    let depth = decisive_depth(sys.state_dim(), min.system.state_dim());
    let residual = io_residual(&sys, &min.system, depth)?;
    let embedding = check_morphism(&min.reachable, &sys, &min.embedding.t, morphism_tol)?;
    let quotient = check_morphism(&min.reachable, &min.system, &min.quotient.t, morphism_tol)?;
    let mut out = format!(
        "rank tolerance: {}\nmorphism tolerance: {}\noriginal dimension: {}\nreachable dimension: {}\nminimal dimension: {}\n",
        num(tol),
        num(morphism_tol),
        sys.state_dim(),
        min.reachable.state_dim(),
        min.system.state_dim()
    );
    let _ = writeln!(
        out,
        "embedding (reachable -> original), residual {}:\n{}",
        num(embedding.max_residual()),
        matrix(&min.embedding.t, "  ").trim_end()
    );
    let _ = writeln!(
        out,
        "quotient (reachable -> minimal), residual {}:\n{}",
        num(quotient.max_residual()),
        matrix(&min.quotient.t, "  ").trim_end()
    );
    let _ = writeln!(out, "I/O residual (words up to length {}): {}", depth + 2, num(residual));
    match output {
        Some(p) => {
            io::write(p, &min.system.to_json())?;
            let _ = writeln!(out, "wrote {}", p.display());
        }
        None => {
            out.push_str(&min.system.to_json());
            out.push('\n');
        }
    }
    if !(embedding.holds && quotient.holds) {
        return Err(rejected(out, "morphism residual above tolerance"));
    }
    Ok(out)
}

fn realize(
    input: &Path,
    n: usize,
    dims: Option<LssDims>,
    output: Option<&Path>,
    tol: f64,
    validation_tol: f64,
) -> Result<String> {
    let is_csv = input.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let result: Algorithm1Output = if is_csv {
        let dims = dims.ok_or_else(|| anyhow!("a Hankel CSV needs --dims D,m,p"))?;
        let h = HankelBlockMatrix::from_csv(&io::read(input)?, dims, n, n + 1)
            .with_context(|| format!("invalid Hankel file {}", input.display()))?;
        algorithm_1(&h, tol, validation_tol)?
    } else {
        let family = io::load_markov(input, dims)?;
        algorithm_1_from_markov(&family, n, tol, validation_tol)?
    };
    let mut out = String::new();
    rank_lines(&mut out, &result.rank);
    let _ = writeln!(out, "validation tolerance: {}", num(result.validation_tolerance));
    let _ = writeln!(
        out,
        "validation residual (words up to length {}): {}",
        result.validation_depth,
        num(result.residual)
    );
    let _ = writeln!(out, "state dimension: {}", result.system.state_dim());
    match output {
        Some(p) => {
            io::write(p, &result.system.to_json())?;
            let _ = writeln!(out, "wrote {}", p.display());
        }
        None => {
            out.push_str(&result.system.to_json());
            out.push('\n');
        }
    }
    Ok(out)
}

fn minimal_form(out: &mut String, name: &str, sys: &SwitchedLinearSystem, tol: f64) -> Result<SwitchedLinearSystem> {
    let minimal = is_span_reachable(sys, tol)?.holds && is_observable(sys, tol)?.holds;
    if minimal {
        let _ = writeln!(out, "{name}: minimal, dimension {}", sys.state_dim());
        return Ok(sys.clone());
    }
    let reduced = minimize_lss(sys, tol)?.system;
    let _ = writeln!(out, "{name}: not minimal, reduced {} -> {}", sys.state_dim(), reduced.state_dim());
    Ok(reduced)
}

fn compare(a: &Path, b: &Path, tol: f64, morphism_tol: f64) -> Result<String> {
    let sa = io::load_system(a)?;
    let sb = io::load_system(b)?;
    if sa.dims() != sb.dims() {
        let reason = format!("systems differ in modes, inputs or outputs: {:?} vs {:?}", sa.dims(), sb.dims());
        return Err(rejected(String::new(), reason));
    }
    let mut out = format!("rank tolerance: {}\nmorphism tolerance: {}\n", num(tol), num(morphism_tol));
    let ma = minimal_form(&mut out, "first", &sa, tol)?;
    let mb = minimal_form(&mut out, "second", &sb, tol)?;
    let depth = decisive_depth(sa.state_dim(), sb.state_dim());
    let residual = io_residual(&sa, &sb, depth)?;
    let io_line = format!("I/O residual (words up to length {}): {}\n", depth + 2, num(residual));
    match lss_isomorphism(&ma, &mb, morphism_tol) {
        Ok(t) => {
            let report = check_morphism(&ma, &mb, &t.t, f64::INFINITY)?;
            let _ = writeln!(out, "isomorphic: yes");
            let _ = writeln!(out, "isomorphism (first -> second):\n{}", matrix(&t.t, "  ").trim_end());
            let _ = writeln!(
                out,
                "residuals: initial state {}, transitions {}, inputs {}, outputs {}",
                num(report.initial_state),
                num(report.transitions),
                num(report.inputs),
                num(report.outputs)
            );
            out.push_str(&io_line);
            Ok(out)
        }
        Err(e) => {
            let _ = writeln!(out, "isomorphic: no");
            out.push_str(&io_line);
            Err(rejected(out, e.to_string()))
        }
    }
}

fn examples(which: Which, dir: &Path) -> Result<String> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let files: Vec<(&str, String)> = match which {
        Which::Example1 => vec![
            ("example1-sigma.json", example1_system().to_json()),
            ("example1-sigma-min.json", example1_minimal().to_json()),
        ],
        Which::Example2 => vec![("example2-markov.txt", example2_markov(8).to_text()?)],
    };
    let mut out = String::new();
    for (name, text) in files {
        let path = dir.join(name);
        io::write(&path, &text)?;
        let _ = writeln!(out, "wrote {}", path.display());
    }
    Ok(out)
}
