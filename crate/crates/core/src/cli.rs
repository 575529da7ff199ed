//! Command-line front end.
//!
//! Exit codes: 0 when a command ran (including a `not applicable`
//! certificate), 2 for usage or input errors, 3 for internal errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::arith::wieferich_scan;
use crate::cyclotomic::{build_layer, DEFAULT_DEGREE_CAP};
use crate::error::{Error, Result};
use crate::fieldspec::FieldSpec;
use crate::hypothesis::{
    check_prop_bound, check_theorem_aflt_layers, check_theorem_gfe_k_2d, check_theorem_gfe_layers,
    check_theorem_gfe_q_layers_2d, search_valid_d, CoeffDescriptor, HPlus, Scenario,
};
use crate::numberfield::{split_prime, Classification, NumberField};
use crate::polyfp::DEFAULT_SEED;
use crate::sunit::{normalize_solution, solve_sunit_equation, SUnitConfig, SUnitReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "cyclofermat",
    version,
    about = "Fermat-type equations over cyclotomic Z_l-layers"
)]
pub struct Cli {
    /// Write the primary output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Write a JSON run manifest (arguments, version, seed, timing) here.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scan odd primes l in [min, max] for base^(l-1) = 1 mod l^2.
    Wieferich {
        #[arg(long, default_value_t = 2)]
        base: u64,
        #[arg(long, default_value_t = 3)]
        min: u64,
        #[arg(long)]
        max: u64,
    },
    /// Decomposition of a rational prime in a field.
    Split {
        /// Field-spec file, or `Q`.
        #[arg(long)]
        field: String,
        #[arg(long = "p", alias = "prime")]
        p: u64,
        #[arg(long)]
        json: bool,
    },
    /// Build the layer Q_{n,l} from Gaussian periods.
    Layer {
        #[arg(long)]
        l: u64,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = DEFAULT_DEGREE_CAP)]
        cap: usize,
        /// Also write the defining polynomial as a field-spec file.
        #[arg(long)]
        spec_out: Option<PathBuf>,
    },
    /// Solve lambda + mu = 1 in S-units within a box or exponent window.
    Sunit {
        /// Field-spec file, or `Q`.
        #[arg(long)]
        field: String,
        /// Comma-separated primes of S (empty for the unit equation).
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        s: Vec<u64>,
        #[arg(long, default_value_t = 8)]
        height: u32,
        /// Per-prime exponent window for K = Q, in the order of --s.
        #[arg(long, value_delimiter = ',')]
        window: Option<Vec<u32>>,
        /// Normalize every solution at this prime.
        #[arg(long)]
        normalize: Option<u64>,
    },
    /// Evaluate a theorem checklist and print its certificate.
    Verify(VerifyArgs),
    /// Primes d <= max meeting the congruence hypotheses for Q_{n,l}.
    SearchD {
        #[arg(long)]
        l: u64,
        #[arg(long)]
        max: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoremArg {
    AfltLayers,
    GfeLayers,
    #[value(name = "gfe-K-2d", alias = "gfe-k-2d")]
    GfeK2d,
    #[value(name = "gfe-Q-2d", alias = "gfe-q-2d")]
    GfeQ2d,
    PropBound,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub theorem: TheoremArg,
    /// Field-spec file, or `Q`.
    #[arg(long)]
    pub field: Option<String>,
    #[arg(long)]
    pub l: Option<u64>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub d: Option<u64>,
    /// Coefficient descriptor u,r,s for A = u 2^r d^s.
    #[arg(long = "A", allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long = "B", allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long = "C", allow_hyphen_values = true)]
    pub c: Option<String>,
    /// Declared narrow class number parity: odd:<source> or even:<source>.
    #[arg(long = "h-plus")]
    pub h_plus: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub version: String,
    pub seed: u64,
    pub elapsed_ms: u128,
    pub exit_code: i32,
}

fn load_field(spec: &str) -> Result<Arc<NumberField>> {
    if spec == "Q" {
        return Ok(NumberField::rationals());
    }
    FieldSpec::load(Path::new(spec))?.field()
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn cmd_wieferich(base: u64, min: u64, max: u64) -> Result<String> {
    if min > max {
        return Err(Error::domain(format!("empty range: min {min} > max {max}")));
    }
    if base < 2 {
        return Err(Error::domain("base must be >= 2"));
    }
    let hits = wieferich_scan(base, min, max);
    let mut s = String::new();
    for h in &hits {
        s.push_str(&format!("{}\n", h.prime));
    }
    if hits.is_empty() {
        s.push_str("none found\n");
    }
    s.push_str(&format!(
        "# base {base}, odd primes in [{min}, {max}]: {} found\n",
        hits.len()
    ));
    Ok(s)
}

fn cmd_split(field: &str, p: u64, as_json: bool) -> Result<String> {
    let k = load_field(field)?;
    let rep = split_prime(&k, p)?;
    if as_json {
        return Ok(json(&rep));
    }
    let head = match rep.classification {
        Classification::Inert => "inert".to_string(),
        Classification::TotallyRamified => match rep.ramified_root {
            Some(c) => format!("totally ramified, root {c}"),
            None => "totally ramified".to_string(),
        },
        Classification::Other => format!("pattern {}", rep.pattern_string()),
    };
    let mut s = format!("{head}\n");
    s.push_str(&format!("pattern: {}\n", rep.pattern_string()));
    s.push_str(&format!("index_caveat: {}\n", rep.index_caveat));
    if let Some(c) = rep.ramified_root {
        s.push_str(&format!("ramified_root: {c}\n"));
    }
    Ok(s)
}

fn cmd_layer(l: u64, n: u32, cap: usize, spec_out: Option<&Path>) -> Result<String> {
    let layer = build_layer(l, n, cap)?;
    if let Some(path) = spec_out {
        std::fs::write(path, layer.to_field_spec().to_text())?;
    }
    Ok(json(&layer.report()))
}

fn cmd_sunit(
    field: &str,
    s: &[u64],
    height: u32,
    window: Option<&[u32]>,
    normalize: Option<u64>,
) -> Result<String> {
    let k = load_field(field)?;
    let mut cfg = SUnitConfig::new(&k, s, height)?;
    if let Some(w) = window {
        cfg = cfg.with_exponent_bounds(w)?;
    }
    let mut sols = solve_sunit_equation(&cfg)?;
    if let Some(p) = normalize {
        if !cfg.s_primes().contains(&p) {
            return Err(Error::domain(format!(
                "normalization prime {p} is not in S"
            )));
        }
        sols = sols
            .iter()
            .map(|x| normalize_solution(x, p))
            .collect::<Result<_>>()?;
    }
    Ok(SUnitReport::new(&cfg, &sols).to_json() + "\n")
}

fn scenario(v: &VerifyArgs) -> Result<Scenario> {
    let mut sc = Scenario::new();
    if let Some(f) = &v.field {
        sc = sc.with_field(&load_field(f)?);
    }
    sc.l = v.l;
    sc.n = v.n;
    sc.d = v.d;
    match (&v.a, &v.b, &v.c) {
        (Some(a), Some(b), Some(c)) => {
            sc.coeffs = Some([a.parse::<CoeffDescriptor>()?, b.parse()?, c.parse()?]);
        }
        (None, None, None) => {}
        _ => {
            return Err(Error::MissingInput(
                "give all of --A, --B, --C or none".into(),
            ))
        }
    }
    if let Some(h) = &v.h_plus {
        sc.h_plus = Some(h.parse::<HPlus>()?);
    }
    Ok(sc)
}

fn cmd_verify(v: &VerifyArgs) -> Result<String> {
    let mut sc = scenario(v)?;
    let cert = match v.theorem {
        TheoremArg::AfltLayers => check_theorem_aflt_layers(&sc)?,
        TheoremArg::GfeLayers => check_theorem_gfe_layers(&sc)?,
        TheoremArg::GfeK2d => check_theorem_gfe_k_2d(&sc)?,
        TheoremArg::GfeQ2d => {
            sc.field = None;
            check_theorem_gfe_q_layers_2d(&sc)?
        }
        TheoremArg::PropBound => check_prop_bound(&sc)?,
    };
    Ok(cert.to_json())
}

fn cmd_search_d(l: u64, max: u64) -> Result<String> {
    let ds = search_valid_d(l, max)?;
    let mut s: String = ds.iter().map(|d| format!("{d}\n")).collect();
    if ds.is_empty() {
        s.push_str("none found\n");
    }
    Ok(s)
}

fn dispatch(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Wieferich { base, min, max } => cmd_wieferich(*base, *min, *max),
        Command::Split { field, p, json } => cmd_split(field, *p, *json),
        Command::Layer {
            l,
            n,
            cap,
            spec_out,
        } => cmd_layer(*l, *n, *cap, spec_out.as_deref()),
        Command::Sunit {
            field,
            s,
            height,
            window,
            normalize,
        } => cmd_sunit(field, s, *height, window.as_deref(), *normalize),
        Command::Verify(v) => cmd_verify(v),
        Command::SearchD { l, max } => cmd_search_d(*l, *max),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Wieferich { .. } => "wieferich",
        Command::Split { .. } => "split",
        Command::Layer { .. } => "layer",
        Command::Sunit { .. } => "sunit",
        Command::Verify(_) => "verify",
        Command::SearchD { .. } => "search-d",
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Internal(_) => EXIT_INTERNAL,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run(args: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{text}");
            }
            return code;
        }
    };
    let start = Instant::now();
    let result = dispatch(&cli).and_then(|text| match &cli.out {
        Some(path) => std::fs::write(path, &text).map_err(Error::from),
        None => stdout.write_all(text.as_bytes()).map_err(Error::from),
    });
    let code = match &result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(e)
        }
    };
    if let Some(path) = &cli.manifest {
        let m = RunManifest {
            command: command_name(&cli.command).to_string(),
            args: args.to_vec(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: DEFAULT_SEED,
            elapsed_ms: start.elapsed().as_millis(),
            exit_code: code,
        };
        if let Err(e) = std::fs::write(path, json(&m)) {
            let _ = writeln!(stderr, "error: cannot write manifest: {e}");
            return EXIT_USAGE;
        }
    }
    code
}
