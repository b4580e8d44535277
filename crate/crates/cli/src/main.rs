mod commands;
mod render;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tiling_cohomology::homalg::Coefficients;
use tiling_cohomology::Error;

#[derive(Parser)]
#[command(
    name = "tilecoh",
    version,
    about = "Cohomology and representation varieties of substitution tiling spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Route {
    /// Tower of collared approximants joined by forgetful maps.
    Gahler,
    /// A single approximant and the self-map induced by substitution.
    Substitution,
    /// Both routes, compared degree by degree.
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DumpMap {
    Forgetful,
    Substitution,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a rule and summarize it.
    Info {
        /// Rule file, or the name of a bundled rule.
        rule: String,
        #[arg(long)]
        json: bool,
    },
    /// Cohomology of the tiling space.
    Cohomology {
        rule: String,
        #[arg(long, default_value_t = 1)]
        collar: usize,
        /// int, mod:k or rat.
        #[arg(long, default_value = "int")]
        coeff: Coefficients,
        #[arg(long, value_enum, default_value_t = Route::Gahler)]
        route: Route,
        /// Last level of the tower (default: collar + 2).
        #[arg(long)]
        max_collar: Option<usize>,
        #[arg(long, default_value_t = 2)]
        window: usize,
        #[arg(long)]
        json: bool,
    },
    /// Representation varieties Hom(π₁, G)/G of the approximants.
    Repvar {
        rule: String,
        /// cyclic:k, dihedral:n, sym:n or a Cayley table file.
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 1)]
        collar: usize,
        /// Last level of the tower (default: collar + 2 with --limit, else collar).
        #[arg(long)]
        max_collar: Option<usize>,
        #[arg(long, default_value_t = 2)]
        window: usize,
        /// Follow the tower and report the limit.
        #[arg(long)]
        limit: bool,
        #[arg(long)]
        json: bool,
    },
    /// Draw the patch obtained by substituting a single tile.
    Render {
        rule: String,
        #[arg(long, default_value_t = 3)]
        iterations: usize,
        /// Tile to start from (default: the first tile).
        #[arg(long)]
        seed: Option<String>,
        /// Output file (default: standard output).
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Cohomology of a hand-written complex.
    Cw {
        /// Complex file, or the name of a bundled complex.
        complex: String,
        #[arg(long, default_value = "int")]
        coeff: Coefficients,
        #[arg(long)]
        json: bool,
    },
    /// Print an approximant complex, or one of its maps, as JSON.
    Dump {
        rule: String,
        #[arg(long, default_value_t = 1)]
        collar: usize,
        #[arg(long, value_enum)]
        map: Option<DumpMap>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. }
        | Error::UnknownLabel { .. }
        | Error::RaggedBlock { .. }
        | Error::InvalidGroup(_)
        | Error::UnknownPattern(_)
        | Error::MissingAssignment { .. }
        | Error::Json(_)
        | Error::Io(_) => 2,
        Error::Precondition(_)
        | Error::RouteRefused(_)
        | Error::NotAComplex { .. }
        | Error::Unsupported(_)
        | Error::CoronaUndetermined(_)
        | Error::ContextUndetermined(_) => 3,
        Error::Budget(_) => 4,
        Error::Internal(_) => 1,
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let mut echo = vec!["tilecoh".to_string()];
    echo.extend(argv.into_iter().skip(1));
    let result = match cli.command {
        Command::Info { rule, json } => commands::info(&echo, &rule, json),
        Command::Cohomology {
            rule,
            collar,
            coeff,
            route,
            max_collar,
            window,
            json,
        } => commands::cohomology_cmd(
            &echo,
            &commands::CohomologyArgs {
                rule,
                collar,
                coeff,
                route,
                max_collar: max_collar.unwrap_or(collar + 2),
                window,
            },
            json,
        ),
        Command::Repvar {
            rule,
            group,
            collar,
            max_collar,
            window,
            limit,
            json,
        } => commands::repvar(
            &echo,
            &commands::RepvarArgs {
                rule,
                group,
                collar,
                max_collar: max_collar.unwrap_or(if limit { collar + 2 } else { collar }),
                window,
                limit,
            },
            json,
        ),
        Command::Render {
            rule,
            iterations,
            seed,
            out,
        } => commands::render(&rule, iterations, seed.as_deref(), out.as_deref()),
        Command::Cw {
            complex,
            coeff,
            json,
        } => commands::cw(&echo, &complex, coeff, json),
        Command::Dump { rule, collar, map } => commands::dump(&rule, collar, map),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
