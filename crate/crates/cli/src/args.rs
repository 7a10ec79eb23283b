use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;

#[derive(Parser, Debug, Clone)]
#[command(name = "epx", version, about = "Exceptional points of one-parameter matrix families")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Spectrum along a real λ range with the minimal level gap
    Scan(ScanArgs),
    /// Exceptional points of the family
    Locate(LocateArgs),
    /// Continue the eigensystem along a contour
    Trace(TraceArgs),
    /// Monodromy of a closed loop
    Monodromy(TraceArgs),
    /// Two-level spectrum under λ = −iG and the critical absorption strengths
    Absorption(AbsorptionArgs),
}

#[derive(Args, Debug, Clone, Default)]
#[group(required = true, multiple = false)]
pub struct FamilySource {
    /// JSON family file
    #[arg(long, value_name = "FILE")]
    pub family: Option<PathBuf>,
    /// Two-level parameters; numbers may be written as `pi/25`, `3*pi/4`
    #[arg(long, value_name = "E1,E2,O1,O2,PHI", allow_hyphen_values = true)]
    pub two_level: Option<String>,
    /// Random real-symmetric N×N family drawn from `--seed`
    #[arg(long, value_name = "N")]
    pub random_symmetric: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output directory, created if missing
    #[arg(long, value_name = "DIR", default_value = "epx-out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub tol: Tolerances,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Tolerances {
    /// Relative discriminant residual accepted by the locator
    #[arg(long, default_value_t = 1e-10)]
    pub tol_residual: f64,
    /// Relative distance below which located roots merge
    #[arg(long, default_value_t = 1e-6)]
    pub tol_cluster: f64,
    /// Largest per-step eigenvalue move relative to the level gap
    #[arg(long, default_value_t = 0.2)]
    pub tol_gap_guard: f64,
    /// Required clearance between contour and EPs, relative to contour size
    #[arg(long, default_value_t = 1e-3)]
    pub tol_ep_exclusion: f64,
    /// Condition number above which an eigensolve counts as defective
    #[arg(long, default_value_t = 1e6)]
    pub tol_defect: f64,
    /// Energy-curve closure tolerance relative to the curve extent
    #[arg(long, default_value_t = 1e-8)]
    pub tol_closure: f64,
    /// Entrywise tolerance for the M² and M⁴ diagnostics
    #[arg(long, default_value_t = 1e-6)]
    pub tol_monodromy: f64,
}

impl Tolerances {
    pub fn validate(&self) -> Result<(), CliError> {
        let all = [
            ("tol-residual", self.tol_residual),
            ("tol-cluster", self.tol_cluster),
            ("tol-gap-guard", self.tol_gap_guard),
            ("tol-ep-exclusion", self.tol_ep_exclusion),
            ("tol-defect", self.tol_defect),
            ("tol-closure", self.tol_closure),
            ("tol-monodromy", self.tol_monodromy),
        ];
        for (name, v) in all {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Usage(format!("--{name} must be positive, got {v}")));
            }
        }
        if self.tol_gap_guard >= 0.5 {
            return Err(CliError::Usage("--tol-gap-guard must stay below 0.5".into()));
        }
        Ok(())
    }
}

#[derive(Args, Debug, Clone, Default)]
#[group(required = true, multiple = false)]
pub struct ContourSource {
    /// JSON contour file
    #[arg(long, value_name = "FILE")]
    pub contour: Option<PathBuf>,
    /// Circle: center, radius, intervals per revolution, revolutions (negative: clockwise)
    #[arg(long, value_name = "CX,CY,R,SAMPLES,TURNS", allow_hyphen_values = true)]
    pub circle: Option<String>,
    /// Arc from a to b on the real axis through bx + i·by
    #[arg(long, value_name = "A,B,BX,BY", allow_hyphen_values = true)]
    pub detour: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct ScanArgs {
    #[command(flatten)]
    pub family: FamilySource,
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_name = "A,B", default_value = "-2,2", allow_hyphen_values = true)]
    pub range: String,
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
}

#[derive(Args, Debug, Clone)]
pub struct LocateArgs {
    #[command(flatten)]
    pub family: FamilySource,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct TraceArgs {
    #[command(flatten)]
    pub family: FamilySource,
    #[command(flatten)]
    pub contour: ContourSource,
    #[command(flatten)]
    pub common: Common,
    /// Intervals used to sample `--detour`
    #[arg(long, default_value_t = 200)]
    pub detour_samples: usize,
    /// Record only these start levels (ranked by real part); default all
    #[arg(long, value_name = "I,J,...", value_delimiter = ',')]
    pub branches: Option<Vec<usize>>,
}

#[derive(Args, Debug, Clone)]
pub struct AbsorptionArgs {
    #[command(flatten)]
    pub family: FamilySource,
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_name = "A,B", default_value = "0,4", allow_hyphen_values = true)]
    pub g_range: String,
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
    /// Additional mixing angles: start, end, count
    #[arg(long, value_name = "START,END,COUNT", allow_hyphen_values = true)]
    pub phi_sweep: Option<String>,
}

/// A real number, `pi`, or a product/quotient such as `pi/25`, `-3*pi/4`, `2.5e-3`.
pub fn parse_number(s: &str) -> Result<f64, CliError> {
    let t = s.trim();
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let bad = || CliError::Usage(format!("not a number: {s:?}"));
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a, Some(b)),
        None => (t, None),
    };
    let mut value = 1.0;
    let num = num.trim();
    let (sign, num) = match num.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, num),
    };
    for factor in num.split('*') {
        value *= match factor.trim() {
            "pi" => std::f64::consts::PI,
            other => other.parse::<f64>().map_err(|_| bad())?,
        };
    }
    if let Some(d) = den {
        let d: f64 = match d.trim() {
            "pi" => std::f64::consts::PI,
            other => other.parse().map_err(|_| bad())?,
        };
        value /= d;
    }
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(sign * value)
}

/// Exactly `n` comma-separated numbers.
pub fn parse_list(s: &str, n: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let v = s.split(',').map(parse_number).collect::<Result<Vec<_>, _>>()?;
    if v.len() != n {
        return Err(CliError::Usage(format!("{what} needs {n} comma-separated values, got {}", v.len())));
    }
    Ok(v)
}
