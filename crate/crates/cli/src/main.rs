mod cases;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use nambu_graphs::ansatz::{generate, vanish_filter, AnsatzSpec};
use nambu_graphs::cohomology::{
    assemble_coboundary_signed, coboundary_residual, format_velocities, gamma3_flow, solution_sum,
    solve_sparse, velocities_of,
};
use nambu_graphs::eval::micro_multivector;
use nambu_graphs::linsys::min_support;
use nambu_graphs::multivector::nambu_bivector;
use nambu_graphs::reference;
use nambu_graphs::Error;

use cases::{render_text, run_case, Options, CASES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser)]
#[command(
    name = "nambu-graphs",
    about = "Graph flows on Nambu-Poisson structures and their trivializations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Ambient dimension, where a command allows a choice.
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Maximum number of tadpoles per micro-graph (0 or 1).
    #[arg(long, global = true, default_value_t = 1)]
    tadpoles: usize,
    /// Global sign of the Schouten bracket.
    #[arg(long, global = true, default_value_t = 1, allow_negative_numbers = true, value_parser = parse_sign)]
    schouten_sign: i32,
    /// Velocity file with `adot = …` and `rhodot = …` lines.
    #[arg(long, global = true)]
    velocities: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Allow the end-to-end solve in dimension 4, with no promised result.
    #[arg(long, global = true)]
    experimental_4d: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named reproduction case (or `all`).
    Run { case: String },
    /// List the case names.
    List,
    /// Enumerate a micro-graph ansatz for trivializing vector fields.
    GenAnsatz {
        /// Number of aerial vertices.
        #[arg(long, default_value_t = 3)]
        aerial: usize,
        /// Keep only graphs with a nonzero evaluation.
        #[arg(long)]
        filter: bool,
        /// Lower bound on the in-degree of Casimir vertices.
        #[arg(long, default_value_t = 0)]
        min_terminal_in_degree: usize,
    },
    /// Solve the coboundary equation over the full ansatz and dump the
    /// sparsest solution found.
    Solve,
    /// Print the velocities induced by the listed 3D field, in the format
    /// read by `--velocities`.
    Velocities,
}

/// Writes to stdout; a closed pipe (`| head`) is not an error.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
        }
    }
}

fn parse_sign(s: &str) -> Result<i32, String> {
    match s {
        "1" | "+1" => Ok(1),
        "-1" => Ok(-1),
        _ => Err("expected 1 or -1".into()),
    }
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn status(e: &Error) -> ExitCode {
    match e {
        Error::UnknownCase(_)
        | Error::MissingData(_)
        | Error::Io(_)
        | Error::Parse(_)
        | Error::UnsupportedDimension(_)
        | Error::Infeasible(_) => usage(e),
        _ => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if n == 0 {
            return usage("--jobs must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("thread pool set once");
    }
    let res = match &cli.command {
        Command::Run { case } => run(&cli, case),
        Command::List => {
            emit(&(CASES.join("\n") + "\n"));
            Ok(true)
        }
        Command::GenAnsatz {
            aerial,
            filter,
            min_terminal_in_degree,
        } => gen_ansatz(&cli, *aerial, *filter, *min_terminal_in_degree),
        Command::Solve => solve(&cli),
        Command::Velocities => print_velocities(),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => status(&e),
    }
}

fn print_velocities() -> nambu_graphs::Result<bool> {
    let x = micro_multivector(&reference::eleven_micrographs(), 3)?;
    let (adot, rhodot) = velocities_of(&x)?;
    emit(&format_velocities(&adot, &rhodot));
    Ok(true)
}

fn run(cli: &Cli, case: &str) -> nambu_graphs::Result<bool> {
    let opts = Options {
        dim: cli.dim,
        tadpoles: cli.tadpoles,
        schouten_sign: cli.schouten_sign,
        velocities: cli.velocities.clone(),
    };
    let names: Vec<&str> = if case == "all" {
        CASES
            .iter()
            .copied()
            .filter(|c| *c != "shortcut-3d" || opts.velocities.is_some())
            .collect()
    } else {
        vec![case]
    };
    let mut reports = Vec::new();
    for name in names {
        let r = run_case(name, &opts)?;
        if cli.format == Format::Text {
            emit(&render_text(&r));
        }
        reports.push(r);
    }
    let pass = reports.iter().all(|r| r.pass);
    if cli.format == Format::Json {
        let v = if reports.len() == 1 {
            json!(reports[0])
        } else {
            json!(reports)
        };
        emit(&(serde_json::to_string_pretty(&v).expect("serializable") + "\n"));
    }
    Ok(pass)
}

fn gen_ansatz(
    cli: &Cli,
    aerial: usize,
    filter: bool,
    min_terminal_in_degree: usize,
) -> nambu_graphs::Result<bool> {
    let d = cli.dim.unwrap_or(3);
    let mut spec = AnsatzSpec::vector_field(d, aerial, cli.tadpoles);
    spec.min_terminal_in_degree = min_terminal_in_degree;
    let a = generate(&spec)?;
    let kept = if filter {
        Some(vanish_filter(&a.graphs, d)?)
    } else {
        None
    };
    let graphs = kept.as_ref().unwrap_or(&a.graphs);
    let mut text = String::new();
    match cli.format {
        Format::Text => {
            for g in graphs {
                let _ = writeln!(text, "{}", g.to_text());
            }
            let s = &a.stats;
            let _ = writeln!(text, "# total {}", s.deduplicated);
            let _ = writeln!(
                text,
                "# unlabeled classes {} (by tadpole count {:?})",
                s.classes, s.classes_by_tadpoles
            );
            let _ = writeln!(text, "# labeled before dedup {}", s.labeled);
            let _ = writeln!(text, "# by tadpole count {:?}", s.by_tadpoles);
            let _ = writeln!(text, "# zero by symmetry {}", s.zero_by_symmetry);
            if let Some(k) = &kept {
                let _ = writeln!(text, "# nonvanishing {}", k.len());
            }
        }
        Format::Json => {
            let v = json!({
                "spec": spec,
                "stats": a.stats,
                "nonvanishing": kept.as_ref().map(Vec::len),
                "graphs": graphs.iter().map(|g| g.to_text()).collect::<Vec<_>>(),
            });
            text = serde_json::to_string_pretty(&v).expect("serializable") + "\n";
        }
    }
    emit(&text);
    Ok(true)
}

fn solve(cli: &Cli) -> nambu_graphs::Result<bool> {
    let d = cli.dim.unwrap_or(3);
    if d == 4 && !cli.experimental_4d {
        return Err(Error::MissingData(
            "solving in dimension 4 needs --experimental-4d".into(),
        ));
    }
    if d != 3 && d != 4 {
        return Err(Error::UnsupportedDimension(d));
    }
    let p = nambu_bivector(d)?;
    let q = gamma3_flow(&p)?;
    let a = generate(&AnsatzSpec::vector_field(d, 3, cli.tadpoles))?;
    let cols = vanish_filter(&a.graphs, d)?;
    let sys = assemble_coboundary_signed(&q, &p, &cols, d, cli.schouten_sign)?;
    let sol = solve_sparse(&sys);
    let x = if sol.is_feasible() {
        let order: Vec<usize> = (0..cols.len()).collect();
        min_support(&sol, cols.len(), &order)
    } else {
        None
    };
    let found = x.as_ref().map(|x| solution_sum(&cols, x));
    let verified = match &found {
        Some(f) => coboundary_residual(&q, &p, f, cli.schouten_sign)?.vanishes(),
        None => false,
    };
    let mut text = String::new();
    match cli.format {
        Format::Text => {
            let _ = writeln!(
                text,
                "# columns {} equations {} rank {} kernel {}",
                cols.len(),
                sys.num_rows(),
                sol.rank,
                sol.kernel_rank
            );
            let _ = writeln!(text, "# status {:?}", sol.status);
            if let Some(f) = &found {
                text.push_str(&f.to_text());
                let _ = writeln!(
                    text,
                    "# support {} residual {}",
                    f.len(),
                    if verified { "zero" } else { "NONZERO" }
                );
            }
        }
        Format::Json => {
            let v = json!({
                "columns": cols.len(),
                "equations": sys.num_rows(),
                "rank": sol.rank,
                "kernel_rank": sol.kernel_rank,
                "status": sol.status,
                "solution": found.as_ref().map(|f| f.iter().map(|(g, c)| json!({"coefficient": c.to_string(), "graph": g.to_text()})).collect::<Vec<_>>()),
                "residual_zero": verified,
            });
            text = serde_json::to_string_pretty(&v).expect("serializable") + "\n";
        }
    }
    emit(&text);
    Ok(verified)
}
