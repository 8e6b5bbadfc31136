use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ringsynth::machine::Timing;

#[derive(Debug, Parser)]
#[command(name = "ringsynth", version, about = "Parameterized synthesis for token rings")]
pub struct Cli {
    /// More log output on stderr (repeat for more).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    /// Only errors on stderr.
    #[arg(short, long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    pub fn verbosity(&self) -> log::LevelFilter {
        if self.quiet {
            return log::LevelFilter::Error;
        }
        match self.verbose {
            0 => log::LevelFilter::Info,
            1 => log::LevelFilter::Debug,
            _ => log::LevelFilter::Trace,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply spec transformations one by one and print the result.
    Translate(TranslateArgs),
    /// Synthesize a process template.
    Synth(SynthArgs),
    /// Verify templates against their specs at the cutoff sizes.
    Verify(VerifyArgs),
    /// Model check one property on a ring of a given size.
    Mc(McArgs),
    /// Compose a ring and export its reachable state graph.
    Compose(ComposeArgs),
    /// Write the SMT-LIB script for one bound.
    EmitSmt(EmitSmtArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Step {
    /// Global outputs become per-process outputs.
    LocalizeOutputs,
    /// Token signals, token-arrival fairness and the mutex link.
    LocalizeAssumptions,
    /// Vertex-0 variant.
    SpecializeZero,
    /// Synchronous hub abstraction.
    Hub,
}

#[derive(Debug, Args)]
pub struct TranslateArgs {
    pub spec: PathBuf,
    /// Steps in application order [default: localize-outputs,localize-assumptions].
    #[arg(long, value_enum, value_delimiter = ',')]
    pub step: Vec<Step>,
    /// Global outputs to localize [default: all declared].
    #[arg(long, value_delimiter = ',')]
    pub globals: Vec<String>,
    /// Write the result here instead of stdout.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Opt {
    Gr1Direct,
    HardcodeToken,
    Hub,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TimingArg {
    Sync,
    Interleaving,
}

impl From<TimingArg> for Timing {
    fn from(t: TimingArg) -> Timing {
        match t {
            TimingArg::Sync => Timing::Synchronous,
            TimingArg::Interleaving => Timing::Interleaving,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverArg {
    Builtin,
    External(String),
}

pub fn parse_solver(s: &str) -> Result<SolverArg, String> {
    if s == "builtin" {
        return Ok(SolverArg::Builtin);
    }
    match s.strip_prefix("external:") {
        Some(cmd) if !cmd.trim().is_empty() => Ok(SolverArg::External(cmd.trim().to_string())),
        Some(_) => Err("external solver command is empty".into()),
        None => Err(format!("expected 'builtin' or 'external:<cmd>', got '{s}'")),
    }
}

/// `A..B`, `A..=B` or a single `N`.
pub fn parse_bound(s: &str) -> Result<RangeInclusive<usize>, String> {
    let num = |x: &str| {
        x.trim()
            .parse::<usize>()
            .map_err(|_| format!("bad bound '{x}' in '{s}'"))
    };
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => {
            let n = num(s)?;
            (n, n)
        }
    };
    if a > b {
        return Err(format!("bound range {a}..{b} is descending"));
    }
    Ok(a..=b)
}

#[derive(Debug, Args)]
pub struct SolverFlags {
    /// `builtin` or `external:"<cmd>"` (reads SMT-LIB on stdin).
    #[arg(long, value_parser = parse_solver, default_value = "builtin")]
    pub solver: SolverArg,
    /// Timeout for each external solver call, in seconds.
    #[arg(long, default_value_t = 3600)]
    pub timeout: u64,
    /// Search-node limit of the built-in solver.
    #[arg(long, default_value_t = 20_000_000)]
    pub node_limit: u64,
}

impl SolverFlags {
    pub fn timeout(&self) -> Duration {
        Duration::from_secs(self.timeout)
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Spec file; may be omitted with --stages.
    pub spec: Option<PathBuf>,
    #[arg(long, value_parser = parse_bound, default_value = "2..8")]
    pub bound: RangeInclusive<usize>,
    #[arg(long, value_enum, default_value = "sync")]
    pub timing: TimingArg,
    /// Optimizations: gr1-direct, hardcode-token, hub.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub opt: Vec<Opt>,
    #[command(flatten)]
    pub solver: SolverFlags,
    /// Decompositional synthesis driven by a stage file.
    #[arg(long)]
    pub stages: Option<PathBuf>,
    /// Skip verification of the model.
    #[arg(long)]
    pub no_verify: bool,
    #[arg(long)]
    pub out_dot: Option<PathBuf>,
    /// Model in the template interchange format (stdout when absent).
    #[arg(long)]
    pub out_json: Option<PathBuf>,
    /// Write each bound's SMT-LIB script, the bound inserted before the extension.
    #[arg(long)]
    pub emit_smt: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Template JSON.
    pub model: PathBuf,
    /// Spec the template was synthesized for.
    pub spec: PathBuf,
    /// Template for vertex 0.
    #[arg(long, requires = "zero_spec")]
    pub zero: Option<PathBuf>,
    /// Spec of the vertex-0 template.
    #[arg(long, requires = "zero")]
    pub zero_spec: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "sync")]
    pub timing: TimingArg,
    /// Check every vertex and pair instead of relying on rotation symmetry.
    #[arg(long)]
    pub all_instances: bool,
    /// Report as JSON.
    #[arg(long)]
    pub out_json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RingFlags {
    /// Template JSON run at every vertex.
    pub model: PathBuf,
    /// Template for vertex 0.
    #[arg(long)]
    pub zero: Option<PathBuf>,
    /// Ring size.
    #[arg(short, long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "sync")]
    pub timing: TimingArg,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub ring: RingFlags,
    /// Property over `_i` (and `_j`) atoms.
    #[arg(short, long)]
    pub formula: String,
    /// Assumption, one-indexed; repeatable.
    #[arg(short, long)]
    pub assume: Vec<String>,
    /// Vertex bound to `i`.
    #[arg(short, default_value_t = 0)]
    pub i: usize,
    /// Vertex bound to `j`.
    #[arg(short)]
    pub j: Option<usize>,
    /// Verdict as JSON.
    #[arg(long)]
    pub out_json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ComposeArgs {
    #[command(flatten)]
    pub ring: RingFlags,
    #[arg(long)]
    pub out_dot: Option<PathBuf>,
    #[arg(long)]
    pub out_json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EmitSmtArgs {
    pub spec: PathBuf,
    /// State bound.
    #[arg(long, default_value_t = 2)]
    pub bound: usize,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub opt: Vec<Opt>,
    /// Script path (stdout when absent).
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds() {
        assert_eq!(parse_bound("2..6"), Ok(2..=6));
        assert_eq!(parse_bound("2..=6"), Ok(2..=6));
        assert_eq!(parse_bound("3"), Ok(3..=3));
        assert!(parse_bound("6..2").is_err());
        assert!(parse_bound("x..2").is_err());
    }

    #[test]
    fn solvers() {
        assert_eq!(parse_solver("builtin"), Ok(SolverArg::Builtin));
        assert_eq!(
            parse_solver("external:z3 -in -smt2"),
            Ok(SolverArg::External("z3 -in -smt2".into()))
        );
        assert!(parse_solver("external:").is_err());
        assert!(parse_solver("cvc").is_err());
    }

    #[test]
    fn cli_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
