//! `gcoh`: JSON front end for the gaussian-coherence library.
//!
//! Every command prints one JSON document. Exit codes: 0 success, 1 negative
//! verdict, 2 input error, 3 numeric error. Errors go to stderr as
//! `{"error": {"kind", "detail"}}`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gaussian_coherence::json::{
    channel_from_json, channel_to_json, classification_to_json, report_to_json, state_from_json, state_to_json,
    to_string, unitary_to_json, verdict_to_json,
};
use gaussian_coherence::testing::{equivalent_pair, perturbed_pair, random_state, RandomStateRecipe};
use gaussian_coherence::zoo::{self, DisplacedSqueezedParams, StandardFormParams};
use gaussian_coherence::{
    apply_channel, brute_force_equivalence, classify_incoherent, decide_equivalence, is_frozen, petz_recovery,
    random_igo, relative_entropy_coherence, williamson_spectrum, Channel, Complex, EquivalenceVerdict, Error, Float,
    State,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "gcoh", version, about = "Coherence and incoherent equivalence of Gaussian states")]
struct Cli {
    /// Relative tolerance (default 1e-9; 1e-8 for equivalence residuals).
    #[arg(long, global = true, env = "GAUSS_COHERENCE_TOL", allow_hyphen_values = true)]
    tol: Option<f64>,
    /// Seed for random generators.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Indent the JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    /// Write the output document to a file instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a state document and print it normalized.
    Validate { state: PathBuf },
    /// Mean photon numbers, entropy and relative entropy of coherence.
    Coherence { state: PathBuf },
    /// Symplectic spectrum, determinant and purity (plus the partially
    /// transposed spectrum for two modes).
    Spectrum { state: PathBuf },
    /// Apply a channel to a state.
    Apply { channel: PathBuf, state: PathBuf },
    /// Classify a channel as (strictly) incoherent.
    Classify { channel: PathBuf },
    /// Petz recovery map of an incoherent channel for a thermal reference.
    Petz {
        channel: PathBuf,
        /// Thermal occupations of the reference, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        thermal: Vec<f64>,
    },
    /// Decide incoherent equivalence of two states.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        /// Use the brute-force grid search (at most three modes).
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 360)]
        grid: usize,
        #[arg(long, default_value_t = 60)]
        refine: usize,
    },
    /// Whether a strictly incoherent channel freezes the coherence of a state.
    Frozen { state: PathBuf, channel: PathBuf },
    /// Construct a standard state.
    #[command(subcommand)]
    Make(Make),
    /// Members of the incoherent equivalence class of a two-mode state.
    SampleClass {
        state: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        theta1: f64,
        #[arg(long, allow_hyphen_values = true)]
        theta2: f64,
    },
    /// Generate random fixtures.
    #[command(subcommand)]
    Gen(Gen),
}

#[derive(Subcommand)]
enum Make {
    /// Product of thermal states.
    Thermal {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<f64>,
    },
    /// Coherent state with amplitude `re + i im`.
    Coherent {
        #[arg(long, allow_hyphen_values = true)]
        re: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        im: f64,
    },
    /// Displaced squeezed state with squeezing `r e^{i phi}`.
    Squeezed {
        #[arg(long)]
        r: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        phi: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        re: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        im: f64,
    },
    /// Two-mode state `[[a I, C], [C, b I]]` with `C = diag(c, d_corr)`.
    StandardForm {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, allow_hyphen_values = true)]
        d_corr: f64,
    },
}

#[derive(Args)]
struct RecipeArgs {
    #[arg(long)]
    modes: usize,
    #[arg(long, default_value_t = 0.3)]
    coupling: f64,
    #[arg(long, default_value_t = 1.0)]
    mean_scale: f64,
    #[arg(long, default_value_t = 0.5)]
    squeeze_max: f64,
    #[arg(long, default_value_t = 1.0)]
    thermal_min: f64,
    #[arg(long, default_value_t = 2.0)]
    thermal_max: f64,
    /// Allow modes without off-diagonal coupling.
    #[arg(long)]
    no_hypothesis: bool,
}

impl RecipeArgs {
    fn recipe(&self, seed: u64) -> RandomStateRecipe {
        RandomStateRecipe {
            modes: self.modes,
            seed,
            coupling: self.coupling,
            mean_scale: self.mean_scale,
            squeeze_max: self.squeeze_max,
            thermal_min: self.thermal_min,
            thermal_max: self.thermal_max,
            hypothesis: !self.no_hypothesis,
        }
    }
}

#[derive(Subcommand)]
enum Gen {
    /// Random state.
    State(RecipeArgs),
    /// Planted equivalent pair with its certificate, or a perturbed pair.
    Pair {
        #[command(flatten)]
        recipe: RecipeArgs,
        /// Shift one off-diagonal covariance entry of the second state.
        #[arg(long)]
        perturb: Option<f64>,
    },
    /// Random incoherent channel.
    Igo {
        #[arg(long)]
        modes: usize,
        #[arg(long)]
        non_strict: bool,
    },
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    kind: String,
    detail: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_numeric() { 3 } else { 2 };
        Failure { code, kind: e.kind().into(), detail: e.to_string() }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        kind: "io-error".into(),
        detail: format!("{}: {e}", path.display()),
    })
}

fn load_state(path: &Path, tol: f64) -> Result<State, Failure> {
    Ok(state_from_json(&read(path)?, tol)?)
}

fn load_channel(path: &Path, tol: f64) -> Result<Channel, Failure> {
    Ok(channel_from_json(&read(path)?, tol)?)
}

fn run(cli: &Cli) -> Result<(Value, u8), Failure> {
    let tol = cli.tol.unwrap_or(f64::DEFAULT_TOL);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")).into());
    }
    let ok = |v: Value| Ok((v, 0));
    match &cli.command {
        Command::Validate { state } => ok(state_to_json(&load_state(state, tol)?)),
        Command::Coherence { state } => ok(report_to_json(&relative_entropy_coherence(&load_state(state, tol)?, tol)?)),
        Command::Spectrum { state } => {
            let s = load_state(state, tol)?;
            let det = s.cov().determinant();
            let mut doc = json!({
                "modes": s.modes(),
                "symplectic_spectrum": s.williamson_spectrum().values(),
                "det": det,
                "pure": s.is_pure(tol),
            });
            if s.modes() == 2 {
                let pt = zoo::partial_transpose_cov(s.cov(), 1)?;
                doc["pt_symplectic_spectrum"] = json!(williamson_spectrum(&pt, f64::PAIRING_TOL)?.values());
            }
            ok(doc)
        }
        Command::Apply { channel, state } => {
            ok(state_to_json(&apply_channel(&load_channel(channel, tol)?, &load_state(state, tol)?, tol)?))
        }
        Command::Classify { channel } => {
            let c = classify_incoherent(&load_channel(channel, tol)?, tol);
            Ok((classification_to_json(&c), if c.is_incoherent() { 0 } else { 1 }))
        }
        Command::Petz { channel, thermal } => {
            ok(channel_to_json(&petz_recovery(&load_channel(channel, tol)?, thermal, tol)?))
        }
        Command::Equiv { a, b, oracle, grid, refine } => {
            let (rho, sigma) = (load_state(a, tol)?, load_state(b, tol)?);
            let rtol = cli.tol.unwrap_or(f64::RESIDUAL_TOL);
            let verdict = if *oracle {
                brute_force_equivalence(&rho, &sigma, *grid, *refine, rtol)?
            } else {
                decide_equivalence(&rho, &sigma, rtol)?
            };
            let code = match verdict {
                EquivalenceVerdict::Equivalent { .. } | EquivalenceVerdict::AllIncoherent => 0,
                EquivalenceVerdict::NotEquivalent { .. } => 1,
                EquivalenceVerdict::HypothesisViolated { .. } => 2,
            };
            Ok((verdict_to_json(&verdict), code))
        }
        Command::Frozen { state, channel } => {
            let report = is_frozen(&load_state(state, tol)?, &load_channel(channel, tol)?, tol)?;
            let doc = json!({
                "frozen": report.frozen,
                "c_before": report.c_before,
                "c_after": report.c_after,
                "output": state_to_json(&report.output),
                "verdict": report.verdict.as_ref().map(verdict_to_json),
            });
            Ok((doc, if report.frozen { 0 } else { 1 }))
        }
        Command::Make(make) => ok(state_to_json(&make_state(make)?)),
        Command::SampleClass { state, theta1, theta2 } => {
            let (unswapped, swapped) = zoo::equivalence_class_samples(&load_state(state, tol)?, *theta1, *theta2, tol)?;
            ok(json!({ "unswapped": state_to_json(&unswapped), "swapped": state_to_json(&swapped) }))
        }
        Command::Gen(g) => ok(generate(g, cli.seed)?),
    }
}

fn make_state(make: &Make) -> Result<State, Error> {
    match *make {
        Make::Thermal { ref n } => zoo::thermal(n),
        Make::Coherent { re, im } => zoo::coherent(Complex::new(re, im)),
        Make::Squeezed { r, phi, re, im } => {
            if !(r >= 0.0) {
                return Err(Error::InvalidArgument(format!("squeezing magnitude {r} must be non-negative")));
            }
            zoo::displaced_squeezed(&DisplacedSqueezedParams::new(Complex::new(re, im), Complex::from_polar(r, phi)))
        }
        Make::StandardForm { a, b, c, d_corr } => {
            zoo::two_mode_standard_form(&StandardFormParams::new(a, b, c, d_corr))
        }
    }
}

fn generate(g: &Gen, seed: u64) -> Result<Value, Error> {
    match g {
        Gen::State(r) => Ok(state_to_json(&random_state::<f64>(&r.recipe(seed))?)),
        Gen::Pair { recipe, perturb: None } => {
            let (rho, sigma, u) = equivalent_pair::<f64>(&recipe.recipe(seed))?;
            Ok(
                json!({ "rho": state_to_json(&rho), "sigma": state_to_json(&sigma), "certificate": unitary_to_json(&u) }),
            )
        }
        Gen::Pair { recipe, perturb: Some(amount) } => {
            let (rho, sigma) = perturbed_pair::<f64>(&recipe.recipe(seed), *amount)?;
            Ok(json!({ "rho": state_to_json(&rho), "sigma": state_to_json(&sigma) }))
        }
        Gen::Igo { modes, non_strict } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(channel_to_json(&random_igo::<f64, _>(*modes, !non_strict, &mut rng)?))
        }
    }
}

fn fail(f: &Failure) -> ExitCode {
    eprintln!("{}", to_string(&json!({ "error": { "kind": f.kind, "detail": f.detail } }), false));
    ExitCode::from(f.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let detail = e.render().to_string();
            let detail = detail.lines().next().unwrap_or_default().trim_start_matches("error: ");
            return fail(&Failure { code: 2, kind: "usage-error".into(), detail: detail.into() });
        }
    };
    match run(&cli) {
        Ok((doc, code)) => {
            let mut text = to_string(&doc, cli.pretty);
            text.push('\n');
            if let Some(path) = &cli.output {
                if let Err(e) = fs::write(path, text) {
                    return fail(&Failure {
                        code: 2,
                        kind: "io-error".into(),
                        detail: format!("{}: {e}", path.display()),
                    });
                }
            } else {
                print!("{text}");
            }
            ExitCode::from(code)
        }
        Err(f) => fail(&f),
    }
}
