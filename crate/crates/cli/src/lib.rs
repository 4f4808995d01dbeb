//! The `locon` command line: table reproduction, single evaluations and the
//! verification suites of `locon-core`.

mod commands;
pub mod config;
pub mod error;
pub mod output;
mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::Settings;
use crate::error::{CliError, EXIT_OK, EXIT_USAGE};
use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "locon", version, about = "Exact local constants, lambda-functions and Heisenberg determinants")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Plain-text key = value file with defaults for format, seed and grid bounds.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for the randomized checks in `verify`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Corrupts one reference value so that `verify` must fail.
    #[arg(long, global = true, hide = true, value_enum)]
    pub inject_fault: Option<Fault>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    Q2Table,
    Catalogue,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// The seven quadratic lambda-values over Q_2 with a PASS/FAIL column.
    Q2Table,
    /// A Gauss sum over F_q and the closed form for the quadratic character.
    Gauss(GaussArgs),
    /// lambda for the unramified quadratic extension of an odd local field.
    TameLambda(TameArgs),
    #[command(subcommand)]
    Epsilon(EpsilonCmd),
    #[command(subcommand)]
    Lambda(LambdaCmd),
    #[command(subcommand)]
    Group(GroupCmd),
    #[command(subcommand)]
    Heisenberg(HeisenbergCmd),
    /// Runs every invariant suite; exits 1 on any mismatch.
    Verify(GridArgs),
    /// All reproduction tables in one document.
    Report(GridArgs),
}

#[derive(Debug, Args)]
pub struct GaussArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub s: u32,
    /// Character index k for chi(k mod q-1); the quadratic character when omitted.
    #[arg(long)]
    pub chi: Option<i64>,
    /// Additive twist b, as an element code of F_q.
    #[arg(long)]
    pub b: Option<u32>,
}

#[derive(Debug, Args)]
pub struct TameArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub s: u32,
    /// Use the canonical additive character instead of one of conductor -1.
    #[arg(long)]
    pub canonical: bool,
    /// Residue of Tr(pc) for the canonical character off Q_p.
    #[arg(long)]
    pub trace_residue: Option<u32>,
}

#[derive(Debug, Subcommand)]
pub enum EpsilonCmd {
    /// W(chi, psi) for one character.
    Eval(EpsilonEvalArgs),
    /// Functional equation, |W| = 1 and reduced sums over a grid of characters of Q_p.
    Verify(GridArgs),
}

#[derive(Debug, Args)]
pub struct EpsilonEvalArgs {
    /// Field descriptor `Local(p, e, f, d)`.
    #[arg(long)]
    pub field: String,
    /// Character descriptor `locchi(a; pi->zeta_N^k; unit->...)`.
    #[arg(long)]
    pub chi: String,
    /// Valuation of the shift b in psi(x) = psi_F(bx).
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub psi_val: i64,
    /// Residue of the unit part of b.
    #[arg(long, default_value_t = 1)]
    pub psi_unit: u32,
}

#[derive(Debug, Subcommand)]
pub enum LambdaCmd {
    Q2Table,
    Tame(TameArgs),
    Klein4 {
        #[arg(long)]
        q: u64,
    },
    /// lambda_1^G from the Sylow 2-subgroup of G.
    Classify {
        #[arg(long)]
        group: String,
        /// Residue field size, used to resolve the Klein four case.
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
        n_psi: i64,
    },
}

#[derive(Debug, Subcommand)]
pub enum GroupCmd {
    Info {
        #[arg(long)]
        group: String,
    },
    /// The transfer to a subgroup on every element.
    Transfer {
        #[arg(long)]
        group: String,
        /// `derived`, `center`, or comma-separated element ids generating H.
        #[arg(long, default_value = "derived")]
        subgroup: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum HeisenbergCmd {
    /// Three determinant routes on every element.
    Det {
        #[arg(long)]
        group: String,
        /// Index of the central character among those giving a nondegenerate pairing.
        #[arg(long)]
        chi: Option<usize>,
    },
    /// Conductor routes for a U-isotropic representation.
    Conductors {
        #[arg(long)]
        m: u64,
        /// Conductor of eta.
        #[arg(long)]
        a: u32,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d_ef: Option<u32>,
        #[arg(long)]
        d_kf: Option<u32>,
        #[arg(long)]
        f_e1f: Option<u32>,
    },
    /// W = R * L for a minimal tame U-isotropic representation.
    MinimalW(MinimalWArgs),
}

#[derive(Debug, Args)]
pub struct MinimalWArgs {
    /// Residue field size.
    #[arg(long)]
    pub q: u64,
    /// Index k of eta = chi(k mod q-1).
    #[arg(long)]
    pub eta: i64,
    /// Index of the (nontrivial) character theta on the residue units.
    #[arg(long, default_value_t = 1)]
    pub theta: i64,
    /// Delta(pi), `1` or `-1`.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub delta_pi: String,
    /// det rho(pi) as `1`, `-1`, `i`, `-i` or `k/N`.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub det_pi: String,
    /// Residue of the unit part of c.
    #[arg(long, default_value_t = 1)]
    pub c_unit: u32,
}

#[derive(Clone, Debug, Default, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub q_max: Option<u64>,
    #[arg(long)]
    pub p_max: Option<u64>,
    #[arg(long)]
    pub conductor_max: Option<u32>,
}

/// Resolved options shared by every verb.
pub struct Ctx {
    pub settings: Settings,
    pub fault: Option<Fault>,
}

impl Ctx {
    fn with_grid(&self, g: &GridArgs) -> Result<Ctx, CliError> {
        let mut settings = self.settings.clone();
        if let Some(q) = g.q_max {
            settings.q_max = q;
        }
        if let Some(p) = g.p_max {
            settings.p_max = p;
        }
        if let Some(c) = g.conductor_max {
            settings.conductor_max = c;
        }
        settings.validate()?;
        Ok(Ctx { settings, fault: self.fault })
    }

    pub fn format(&self) -> Format {
        self.settings.format
    }
}

/// Parses `args` (including the program name) and runs the verb, writing the
/// report to `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{rendered}") } else { write!(err, "{rendered}") };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut settings = match &cli.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    if let Some(f) = cli.format {
        settings.format = f;
    }
    if let Some(s) = cli.seed {
        settings.seed = s;
    }
    let ctx = Ctx { settings, fault: cli.inject_fault };
    match cli.command {
        Command::Q2Table | Command::Lambda(LambdaCmd::Q2Table) => commands::q2_table(&ctx, out),
        Command::Gauss(a) => commands::gauss(&ctx, &a, out),
        Command::TameLambda(a) | Command::Lambda(LambdaCmd::Tame(a)) => commands::tame_lambda(&ctx, &a, out),
        Command::Epsilon(EpsilonCmd::Eval(a)) => commands::epsilon_eval(&ctx, &a, out),
        Command::Epsilon(EpsilonCmd::Verify(g)) => verify::epsilon_grid(&ctx.with_grid(&g)?, out),
        Command::Lambda(LambdaCmd::Klein4 { q }) => commands::klein4(&ctx, q, out),
        Command::Lambda(LambdaCmd::Classify { group, q, n_psi }) => commands::classify(&ctx, &group, q, n_psi, out),
        Command::Group(GroupCmd::Info { group }) => commands::group_info(&ctx, &group, out),
        Command::Group(GroupCmd::Transfer { group, subgroup }) => commands::group_transfer(&ctx, &group, &subgroup, out),
        Command::Heisenberg(HeisenbergCmd::Det { group, chi }) => commands::heisenberg_det(&ctx, &group, chi, out),
        Command::Heisenberg(HeisenbergCmd::Conductors { m, a, p, d_ef, d_kf, f_e1f }) => {
            commands::conductors(&ctx, m, a, p, (d_ef, d_kf, f_e1f), out)
        }
        Command::Heisenberg(HeisenbergCmd::MinimalW(a)) => commands::minimal_w(&ctx, &a, out),
        Command::Verify(g) => verify::verify(&ctx.with_grid(&g)?, out),
        Command::Report(g) => verify::report(&ctx.with_grid(&g)?, out),
    }
}
