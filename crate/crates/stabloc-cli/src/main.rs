mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Stabilizer states, graph rules, LHV tables, Bell inequalities and communication models.
#[derive(Parser, Debug)]
#[command(name = "stabloc", version)]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Input file (`-` or absent reads stdin).
    #[arg(long = "in", global = true, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Output file (absent writes stdout).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Force random measurement outcomes to this eigenvalue.
    #[arg(long, global = true, value_parser = parse_forced, allow_hyphen_values = true, value_name = "+1|-1")]
    pub forced: Option<bool>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Csv,
}

/// Outcome bit for an eigenvalue argument.
fn parse_forced(s: &str) -> Result<bool, String> {
    match s {
        "+1" | "1" => Ok(false),
        "-1" => Ok(true),
        _ => Err(format!("expected +1 or -1, got {s}")),
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    #[command(subcommand)]
    Pauli(PauliCmd),
    #[command(subcommand)]
    Tableau(TableauCmd),
    #[command(subcommand)]
    Graph(GraphCmd),
    #[command(subcommand)]
    Code(CodeCmd),
    #[command(subcommand)]
    Lhv(LhvCmd),
    #[command(subcommand)]
    Bell(BellCmd),
    #[command(subcommand)]
    Comm(CommCmd),
    #[command(subcommand)]
    Oracle(OracleCmd),
}

#[derive(Subcommand, Debug)]
pub enum PauliCmd {
    /// Normalizes a Pauli string and reports its properties.
    Parse { #[arg(allow_hyphen_values = true)] text: String },
    /// Multiplies two Pauli strings.
    Mul {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum TableauCmd {
    /// Checks the stabilizer invariants.
    Validate,
    /// Converts to graph form and lists the local operations.
    Canon,
    /// Measures a Pauli product.
    Measure { #[arg(long, allow_hyphen_values = true)] pauli: String },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum LocalGateArg {
    H,
    S,
    Z,
}

#[derive(Subcommand, Debug)]
pub enum GraphCmd {
    /// Applies equivalence rules until no hollow nodes or removable decorations remain.
    Reduce,
    /// Decides whether two stabilizer graphs describe the same state.
    Equiv { #[arg(long, value_name = "PATH")] other: PathBuf },
    /// Applies a local gate to one node.
    Gate {
        #[arg(long, value_enum)]
        gate: LocalGateArg,
        #[arg(long)]
        node: usize,
    },
    /// Applies CZ between two nodes.
    Cz { a: usize, b: usize },
    /// Measures a Pauli product (`--pauli`) or a single node (`--node`, `--basis`).
    Measure {
        #[arg(long, allow_hyphen_values = true)]
        pauli: Option<String>,
        #[arg(long)]
        node: Option<usize>,
        #[arg(long, default_value = "Z")]
        basis: char,
    },
    ToDot,
    ToTableau,
    FromTableau,
}

#[derive(Subcommand, Debug)]
pub enum CodeCmd {
    /// Builds the code graph from code JSON.
    Build,
    /// Graph of the logical basis state |c̄⟩.
    Basis { #[arg(long)] logical: String },
    /// Encodes a logical state through the graph circuit and compares with the oracle.
    Encode {
        /// Comma-separated amplitudes, each `re` or `re:im`.
        #[arg(long, allow_hyphen_values = true)]
        amplitudes: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum LhvCmd {
    /// Table value of a stabilizer element.
    Value {
        #[arg(long, allow_hyphen_values = true)]
        pauli: String,
        /// Table spec JSON; defaults to v = c = 0.
        #[arg(long, value_name = "PATH")]
        spec: Option<PathBuf>,
    },
    /// Number of distinct standard tables.
    Count,
    /// Correlation range of random variables with the given means.
    Range {
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        values: Vec<f64>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GptPreset {
    Pr,
    Bell,
    Product,
    Custom,
}

#[derive(Subcommand, Debug)]
pub enum BellCmd {
    /// Tests local-realistic feasibility; prints a violated inequality when infeasible.
    LpTest,
    /// Random-variable inequalities for a multiset of correlation terms.
    Rv {
        #[arg(long, value_delimiter = ',', default_value = "2,2")]
        parties: Vec<usize>,
        /// Terms as setting digits per party, e.g. `11,12,21,22`.
        #[arg(long, value_delimiter = ',')]
        terms: Vec<String>,
    },
    /// Evaluates an inequality on a correlation CSV.
    Eval { #[arg(long, value_name = "PATH")] ineq: PathBuf },
    /// Builds and validates a two-gbit state.
    Gpt {
        #[arg(long, value_enum, default_value = "pr")]
        preset: GptPreset,
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        a: Vec<f64>,
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        b: Vec<f64>,
        /// Rows separated by `;`, entries by `,`.
        #[arg(long, allow_hyphen_values = true)]
        c: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum VariantArg {
    Standard,
    Alternative,
}

#[derive(Subcommand, Debug)]
pub enum CommCmd {
    /// Runs the nearest-neighbour model on an assignment.
    Nn {
        #[arg(long, value_enum, default_value = "standard")]
        variant: VariantArg,
    },
    /// Runs the 1D chain model.
    Chain,
    /// Runs the universal model.
    Universal,
    /// Checks a counterexample: ghz, cluster2x3, chain11, ring(F).
    Verify { #[arg(long)] case: String },
    /// Sweeps a graph family for nearest-neighbour violations.
    Class {
        /// `kpq:P,Q`, `sd:N,B` or `cluster2x3`.
        #[arg(long)]
        family: Option<String>,
        /// Every family member with at most this many nodes.
        #[arg(long)]
        up_to: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
pub enum OracleCmd {
    /// Compares a graph or tableau with its statevector.
    Check,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
