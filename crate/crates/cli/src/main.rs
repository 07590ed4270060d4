mod commands;
mod input;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use digitbasis::{FamilyKind, Mode};

use crate::input::Failure;

#[derive(Parser, Debug)]
#[command(name = "digitbasis", version, about = "Digit-expansion bases of continuous functions on local rings")]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Local field: a JSON spec, or laurent:Q, padic:P, at-pi:R:c0,c1,...
    #[arg(long, global = true)]
    pub field: Option<String>,

    /// Shorthand for laurent:Q (the coefficient field for `carlitz`)
    #[arg(long, global = true)]
    pub q: Option<u32>,

    /// Shorthand for padic:P
    #[arg(long, global = true)]
    pub p: Option<u32>,

    #[arg(long, global = true)]
    pub level: Option<u32>,

    #[arg(long = "precN", global = true)]
    pub prec: Option<i64>,

    /// JSON payload: a path, or - for standard input
    #[arg(long, visible_alias = "input", global = true)]
    pub json: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Linear,
    Sublinear,
    General,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Linear => Mode::Linear,
            ModeArg::Sublinear => Mode::Sublinear,
            ModeArg::General => Mode::General,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct FamilyArgs {
    #[arg(long)]
    pub family: FamilyKind,

    /// Lubin-Tate Frobenius coefficients separated by ';' (integers, or label lists)
    #[arg(long)]
    pub frobenius: Option<String>,

    /// Lubin-Tate truncation degree
    #[arg(long)]
    pub degree: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the digit-principle hypotheses for a family at one level
    Certify {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Expansion coefficients of a table (or a built-in function) in a family
    Expand {
        #[command(flatten)]
        family: FamilyArgs,
        /// Built-in function instead of a payload: identity, or power:K
        #[arg(long)]
        function: Option<String>,
    },
    /// Tabulate sum a_i f_i from coefficients
    Eval {
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Carlitz polynomials e_j, factorials D_j and the values E_j(h), script-E_i(h)
    Carlitz {
        #[arg(long)]
        j: usize,
        /// Polynomial h as comma-separated labels, lowest degree first
        #[arg(long)]
        h: Option<String>,
        /// Index i for script-E_i(h) and the Carlitz factorial
        #[arg(long)]
        i: Option<u64>,
    },
    /// Hyperdifferential operators
    Hyperdiff {
        #[command(subcommand)]
        action: HyperdiffAction,
    },
    /// Endomorphism [a](X) of a Lubin-Tate group
    LubinTate {
        #[arg(long)]
        a: String,
        #[arg(long)]
        frobenius: Option<String>,
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Table of the Baker function B_m
    Baker {
        #[arg(long)]
        m: u64,
    },
    /// q-simplified series and the Tate model
    Tate {
        #[command(subcommand)]
        action: TateAction,
    },
    /// Measures on O as ball masses
    Measure {
        #[command(subcommand)]
        action: MeasureAction,
    },
}

#[derive(Subcommand, Debug)]
enum HyperdiffAction {
    /// D_j of a polynomial or a Laurent series element
    Apply {
        #[arg(long)]
        j: u64,
        /// Polynomial as comma-separated labels, instead of a payload
        #[arg(long)]
        poly: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum TateAction {
    Simplify,
    Eval {
        /// Point as an element JSON, an integer, or a label list
        #[arg(long)]
        x: String,
    },
    ToFunction,
    FromFunction,
}

#[derive(Subcommand, Debug)]
enum MeasureAction {
    Transform {
        #[command(flatten)]
        family: FamilyArgs,
        /// Number of coefficients, at most q^level
        #[arg(long)]
        count: Option<usize>,
    },
    Convolve {
        /// Second measure payload
        #[arg(long)]
        other: String,
    },
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let g = &cli.global;
    match cli.command {
        Command::Certify { family, mode } => commands::certify(g, &family, mode.map(Mode::from)),
        Command::Expand { family, function } => commands::expand(g, &family, function.as_deref()),
        Command::Eval { family } => commands::eval(g, &family),
        Command::Carlitz { j, h, i } => commands::carlitz(g, j, h.as_deref(), i),
        Command::Hyperdiff { action: HyperdiffAction::Apply { j, poly } } => commands::hyperdiff(g, j, poly.as_deref()),
        Command::LubinTate { a, frobenius, degree } => commands::lubin_tate(g, &a, frobenius.as_deref(), degree),
        Command::Baker { m } => commands::baker(g, m),
        Command::Tate { action } => match action {
            TateAction::Simplify => commands::tate_simplify(g),
            TateAction::Eval { x } => commands::tate_eval(g, &x),
            TateAction::ToFunction => commands::tate_to_function(g),
            TateAction::FromFunction => commands::tate_from_function(g),
        },
        Command::Measure { action } => match action {
            MeasureAction::Transform { family, count } => commands::measure_transform(g, &family, count),
            MeasureAction::Convolve { other } => commands::measure_convolve(g, &other),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
