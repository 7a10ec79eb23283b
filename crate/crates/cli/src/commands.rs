use std::fs;
use std::path::{Path, PathBuf};

use epx::analytic2::{absorption_ep, eigenvalues_closed, exceptional_points_closed, lambda_from_absorption};
use epx::io::{fmt_f64, write_trajectory_csv, ContourFile, EpRecord, FamilyFile, MonodromyRecord, TwoLevelSpec};
use epx::locator::{locate_eps_with, LocatorConfig};
use epx::model::{circle_contour, detour_path, random_symmetric_family, two_level_family};
use epx::scalar::cmp_re_im;
use epx::spectral::{eigensystem, eigenvalues};
use epx::tracer::{energy_closure, ClosureReport, TraceConfig, Track, Tracer};
use epx::{Complex64, Family, Params, Path as Contour};
use log::{info, warn};
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::args::{
    parse_list, AbsorptionArgs, Command, Common, ContourSource, FamilySource, LocateArgs, ScanArgs, TraceArgs,
    Tolerances,
};
use crate::error::CliError;

/// The family and, when it came from two-level parameters, those parameters.
#[derive(Clone, Debug)]
pub struct LoadedFamily {
    pub family: Family,
    pub two_level: Option<Params>,
}

pub fn load_family(src: &FamilySource, seed: u64) -> Result<LoadedFamily, CliError> {
    if let Some(path) = &src.family {
        let text = read(path)?;
        let file = FamilyFile::parse(&text)?;
        let two_level = file.two_level_params().transpose()?;
        return Ok(LoadedFamily { family: file.family()?, two_level });
    }
    if let Some(spec) = &src.two_level {
        let v = parse_list(spec, 5, "--two-level")?;
        let p = Params::new(v[0], v[1], v[2], v[3], v[4])?;
        return Ok(LoadedFamily { family: two_level_family(&p)?, two_level: Some(p) });
    }
    if let Some(n) = src.random_symmetric {
        if n < 2 {
            return Err(CliError::Usage(format!("--random-symmetric needs N >= 2, got {n}")));
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        return Ok(LoadedFamily { family: random_symmetric_family(n, &mut rng)?, two_level: None });
    }
    Err(CliError::Usage("one of --family, --two-level, --random-symmetric is required".into()))
}

pub fn load_contour(src: &ContourSource, detour_samples: usize) -> Result<Contour, CliError> {
    if let Some(path) = &src.contour {
        return Ok(ContourFile::parse(&read(path)?)?.contour()?);
    }
    if let Some(spec) = &src.circle {
        let v = parse_list(spec, 5, "--circle")?;
        let samples = whole(v[3], "circle samples")?;
        let turns = whole(v[4], "circle turns")?;
        let turns = i32::try_from(turns).map_err(|_| CliError::Usage("circle turns out of range".into()))?;
        let samples = usize::try_from(samples).map_err(|_| CliError::Usage("circle samples must be positive".into()))?;
        return Ok(circle_contour(Complex64::new(v[0], v[1]), v[2], samples, turns)?);
    }
    if let Some(spec) = &src.detour {
        let v = parse_list(spec, 4, "--detour")?;
        return Ok(detour_path(v[0], v[1], Complex64::new(v[2], v[3]), detour_samples)?);
    }
    Err(CliError::Usage("one of --contour, --circle, --detour is required".into()))
}

fn whole(x: f64, what: &str) -> Result<i64, CliError> {
    if x.fract() != 0.0 || !x.is_finite() {
        return Err(CliError::Usage(format!("{what} must be an integer, got {x}")));
    }
    Ok(x as i64)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn prepare(common: &Common) -> Result<(), CliError> {
    common.tol.validate()?;
    fs::create_dir_all(&common.out)?;
    Ok(())
}

fn write_json<V: Serialize>(dir: &Path, name: &str, value: &V) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(e.to_string()))?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

/// Every command leaves the family it used next to its outputs.
fn write_family(dir: &Path, loaded: &LoadedFamily) -> Result<PathBuf, CliError> {
    let file = match &loaded.two_level {
        Some(p) => FamilyFile::TwoLevel { two_level: TwoLevelSpec::from(p) },
        None => FamilyFile::from_family(&loaded.family),
    };
    write_json(dir, "family.json", &file)
}

fn locator_config(tol: &Tolerances) -> LocatorConfig<f64> {
    LocatorConfig { residual_tol: tol.tol_residual, cluster_tol: tol.tol_cluster, ..LocatorConfig::default() }
}

fn real_pair(s: &str, what: &str) -> Result<(f64, f64), CliError> {
    let v = parse_list(s, 2, what)?;
    if !(v[0] < v[1]) {
        return Err(CliError::Usage(format!("{what} needs A < B")));
    }
    Ok((v[0], v[1]))
}

fn sorted_spectrum(loaded: &LoadedFamily, lambda: Complex64) -> Result<Vec<Complex64>, CliError> {
    let mut e = match &loaded.two_level {
        Some(p) => {
            let (a, b) = eigenvalues_closed(p, lambda);
            vec![a, b]
        }
        None => eigenvalues(&loaded.family.evaluate(lambda))?,
    };
    e.sort_by(cmp_re_im);
    Ok(e)
}

fn min_adjacent_gap(e: &[Complex64]) -> f64 {
    e.windows(2).map(|w| (w[1] - w[0]).norm()).fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub range: [f64; 2],
    pub samples: usize,
    pub real_spectrum: bool,
    pub sampled_min_gap: f64,
    pub sampled_min_lambda: f64,
    /// Minimum of the gap after golden-section refinement around the sampled minimum.
    pub min_gap: f64,
    pub lambda_at_min_gap: f64,
}

pub fn cmd_scan(args: &ScanArgs) -> Result<ScanSummary, CliError> {
    let common = &args.common;
    prepare(common)?;
    let (a, b) = real_pair(&args.range, "--range")?;
    if args.samples < 2 {
        return Err(CliError::Usage(format!("--samples must be at least 2, got {}", args.samples)));
    }
    let loaded = load_family(&args.family, common.seed)?;
    let n = loaded.family.dim();
    let grid: Vec<f64> = (0..args.samples).map(|k| a + (b - a) * k as f64 / (args.samples - 1) as f64).collect();
    let spectra = grid
        .iter()
        .map(|&l| sorted_spectrum(&loaded, Complex64::new(l, 0.0)))
        .collect::<Result<Vec<_>, _>>()?;
    let scale = spectra.iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
    let real = spectra.iter().flatten().all(|z| z.im.abs() <= 1e-10 * scale);
    if !real {
        warn!("spectrum is not real on the scanned range; writing real and imaginary parts");
    }

    let mut csv = String::from("lambda");
    for k in 0..n {
        if real {
            csv.push_str(&format!(",e{k}"));
        } else {
            csv.push_str(&format!(",re_e{k},im_e{k}"));
        }
    }
    csv.push('\n');
    for (l, e) in grid.iter().zip(&spectra) {
        csv.push_str(&fmt_f64(*l));
        for z in e {
            csv.push(',');
            csv.push_str(&fmt_f64(z.re));
            if !real {
                csv.push(',');
                csv.push_str(&fmt_f64(z.im));
            }
        }
        csv.push('\n');
    }
    fs::write(common.out.join("scan.csv"), csv)?;

    let gaps: Vec<f64> = spectra.iter().map(|e| min_adjacent_gap(e)).collect();
    let k = (0..gaps.len()).fold(0, |best, i| if gaps[i] < gaps[best] { i } else { best });
    let lo = grid[k.saturating_sub(1)];
    let hi = grid[(k + 1).min(grid.len() - 1)];
    let gap_at = |l: f64| sorted_spectrum(&loaded, Complex64::new(l, 0.0)).map(|e| min_adjacent_gap(&e));
    let (mut lambda_min, mut gap_min) = golden_section(lo, hi, gap_at)?;
    if gaps[k] < gap_min {
        (lambda_min, gap_min) = (grid[k], gaps[k]);
    }
    let summary = ScanSummary {
        range: [a, b],
        samples: args.samples,
        real_spectrum: real,
        sampled_min_gap: gaps[k],
        sampled_min_lambda: grid[k],
        min_gap: gap_min,
        lambda_at_min_gap: lambda_min,
    };
    write_family(&common.out, &loaded)?;
    write_json(&common.out, "scan.json", &summary)?;
    info!("minimal gap {gap_min:e} at lambda = {lambda_min}");
    Ok(summary)
}

/// Minimizes a unimodal function on `[lo, hi]`.
fn golden_section<F>(mut lo: f64, mut hi: f64, f: F) -> Result<(f64, f64), CliError>
where
    F: Fn(f64) -> Result<f64, CliError>,
{
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..200 {
        if hi - lo <= 4.0 * f64::EPSILON * (lo.abs() + hi.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            (x2, f2) = (x1, f1);
            x1 = hi - r * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            (x1, f1) = (x2, f2);
            x2 = lo + r * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormCheck {
    pub lambda_c: [[f64; 2]; 2],
    /// Largest distance from a closed-form point to the nearest located point, relative to `|λ_c|`.
    pub max_relative_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocateSummary {
    /// Number of exceptional points counted with multiplicity.
    pub count: usize,
    pub eps: Vec<EpRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub closed_form: Option<ClosedFormCheck>,
}

pub fn cmd_locate(args: &LocateArgs) -> Result<LocateSummary, CliError> {
    let common = &args.common;
    prepare(common)?;
    let loaded = load_family(&args.family, common.seed)?;
    let eps = locate_eps_with(&loaded.family, &locator_config(&common.tol))?;
    let closed_form = loaded.two_level.as_ref().map(|p| {
        let pair = exceptional_points_closed(p);
        let dev = [pair.plus, pair.minus]
            .iter()
            .map(|z| eps.iter().map(|e| (e.lambda_c - z).norm()).fold(f64::INFINITY, f64::min) / z.norm())
            .fold(0.0, f64::max);
        ClosedFormCheck { lambda_c: [[pair.plus.re, pair.plus.im], [pair.minus.re, pair.minus.im]], max_relative_deviation: dev }
    });
    let summary = LocateSummary {
        count: eps.iter().map(|e| e.multiplicity).sum(),
        eps: eps.iter().map(EpRecord::from).collect(),
        closed_form,
    };
    write_family(&common.out, &loaded)?;
    write_json(&common.out, "eps.json", &summary)?;
    info!("located {} exceptional points", summary.count);
    Ok(summary)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureRecord {
    pub closure_after_revolutions: Option<usize>,
    /// Largest eigenvalue mismatch after each revolution.
    pub mismatch: Vec<f64>,
    pub tolerance: f64,
    pub energy_scale: f64,
}

impl From<&ClosureReport<f64>> for ClosureRecord {
    fn from(r: &ClosureReport<f64>) -> Self {
        Self {
            closure_after_revolutions: r.closure_after_revolutions,
            mismatch: r.mismatch.clone(),
            tolerance: r.tolerance,
            energy_scale: r.energy_scale,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopDiagnostics {
    pub monodromy: MonodromyRecord,
    pub closure: ClosureRecord,
    /// `M² = −I` and `M⁴ = I` within `--tol-monodromy`.
    pub m_squared_is_minus_identity: bool,
    pub m_fourth_is_identity: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub contour_points: usize,
    pub trajectory_samples: usize,
    pub closed: bool,
    pub branches: Vec<usize>,
    pub all_steps_matched: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub loop_diagnostics: Option<LoopDiagnostics>,
}

pub fn cmd_trace(args: &TraceArgs) -> Result<TraceSummary, CliError> {
    run_trace(args, true)
}

pub fn cmd_monodromy(args: &TraceArgs) -> Result<TraceSummary, CliError> {
    run_trace(args, false)
}

fn run_trace(args: &TraceArgs, write_csv: bool) -> Result<TraceSummary, CliError> {
    let common = &args.common;
    prepare(common)?;
    let loaded = load_family(&args.family, common.seed)?;
    let contour = load_contour(&args.contour, args.detour_samples)?;
    if !write_csv && !contour.is_closed() {
        return Err(CliError::Usage("monodromy needs a closed contour".into()));
    }
    let track = match &args.branches {
        Some(list) if write_csv => Track::Subset(list.clone()),
        Some(_) => return Err(CliError::Usage("--branches applies to trace only".into())),
        None => Track::All,
    };
    let tol = &common.tol;
    let config = TraceConfig {
        gap_guard: tol.tol_gap_guard,
        ep_exclusion_rel: tol.tol_ep_exclusion,
        defect_threshold: tol.tol_defect,
        ..TraceConfig::default()
    };
    let mut tracer = Tracer::new(&loaded.family).with_config(config);
    match locate_eps_with(&loaded.family, &locator_config(tol)) {
        Ok(eps) => tracer = tracer.with_eps(eps),
        Err(e) => warn!("exceptional points unavailable ({e}); relying on the defectivity guard"),
    }
    let traj = tracer.trace(&contour, &track)?;
    write_family(&common.out, &loaded)?;
    if write_csv {
        let file = fs::File::create(common.out.join("trajectory.csv"))?;
        write_trajectory_csv(&traj, std::io::BufWriter::new(file))?;
    }
    let mut summary = TraceSummary {
        contour_points: contour.points().len(),
        trajectory_samples: traj.len(),
        closed: contour.is_closed(),
        branches: traj.branches.clone(),
        all_steps_matched: traj.matched.iter().all(|&m| m),
        loop_diagnostics: None,
    };
    if contour.is_closed() && traj.branches.len() == loaded.family.dim() {
        let closure = ClosureRecord::from(&energy_closure(&traj, &contour, tol.tol_closure));
        let result = tracer.monodromy_of(&contour, traj)?;
        let monodromy = MonodromyRecord::from(&result);
        let diag = LoopDiagnostics {
            m_squared_is_minus_identity: monodromy.distance_m2_to_minus_identity <= tol.tol_monodromy,
            m_fourth_is_identity: monodromy.distance_m4_to_identity <= tol.tol_monodromy,
            monodromy,
            closure,
        };
        write_json(&common.out, "monodromy.json", &diag)?;
        summary.loop_diagnostics = Some(diag);
    }
    write_json(&common.out, if write_csv { "trace.json" } else { "summary.json" }, &summary)?;
    Ok(summary)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisSide {
    /// The real G axis runs above both critical points (Im G_c < 0).
    Above,
    Below,
    /// Critical points on the real axis.
    Through,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalAbsorption {
    pub phi: f64,
    pub g_c: [[f64; 2]; 2],
    pub real_axis: AxisSide,
    /// Largest eigenvalue condition number of `H(−iG_c)`.
    pub condition_at_g_c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionSummary {
    pub g_range: [f64; 2],
    pub samples: usize,
    pub critical: Vec<CriticalAbsorption>,
    /// Ratio of the larger to the smaller `|Im E|` at the end of the G range.
    pub width_ratio_at_max_g: f64,
}

pub fn cmd_absorption(args: &AbsorptionArgs) -> Result<AbsorptionSummary, CliError> {
    let common = &args.common;
    prepare(common)?;
    let (a, b) = real_pair(&args.g_range, "--g-range")?;
    if args.samples < 2 {
        return Err(CliError::Usage(format!("--samples must be at least 2, got {}", args.samples)));
    }
    let loaded = load_family(&args.family, common.seed)?;
    let p = loaded
        .two_level
        .ok_or_else(|| CliError::Usage("absorption needs two-level parameters".into()))?;

    let mut csv = String::from("g,re_e0,im_e0,re_e1,im_e1\n");
    let mut last = Vec::new();
    for k in 0..args.samples {
        let g = a + (b - a) * k as f64 / (args.samples - 1) as f64;
        let (e0, e1) = eigenvalues_closed(&p, lambda_from_absorption(Complex64::new(g, 0.0)));
        let mut e = [e0, e1];
        e.sort_by(cmp_re_im);
        csv.push_str(&fmt_f64(g));
        for z in e {
            csv.push_str(&format!(",{},{}", fmt_f64(z.re), fmt_f64(z.im)));
        }
        csv.push('\n');
        last = e.to_vec();
    }
    fs::write(common.out.join("absorption.csv"), csv)?;
    let widths = (last[0].im.abs(), last[1].im.abs());
    let width_ratio = widths.0.max(widths.1) / widths.0.min(widths.1).max(f64::MIN_POSITIVE);

    let mut phis = vec![p.phi];
    if let Some(spec) = &args.phi_sweep {
        let v = parse_list(spec, 3, "--phi-sweep")?;
        let count = usize::try_from(whole(v[2], "phi sweep count")?)
            .map_err(|_| CliError::Usage("phi sweep count must be positive".into()))?;
        match count {
            0 => {}
            1 => phis.push(v[0]),
            _ => phis.extend((0..count).map(|k| v[0] + (v[1] - v[0]) * k as f64 / (count - 1) as f64)),
        }
    }
    let critical = phis
        .iter()
        .map(|&phi| {
            let q = Params::new(p.eps1, p.eps2, p.om1, p.om2, phi)?;
            let f = two_level_family(&q)?;
            let pair = absorption_ep(&q);
            let im = pair.plus.im;
            let real_axis = if im.abs() <= 1e-12 * pair.plus.norm() {
                AxisSide::Through
            } else if im > 0.0 {
                AxisSide::Below
            } else {
                AxisSide::Above
            };
            let mut cond: f64 = 0.0;
            for g in [pair.plus, pair.minus] {
                let sys = eigensystem(&f.evaluate(lambda_from_absorption(g)))?;
                cond = cond.max(sys.condition.iter().copied().fold(0.0, f64::max));
            }
            Ok(CriticalAbsorption {
                phi,
                g_c: [[pair.plus.re, pair.plus.im], [pair.minus.re, pair.minus.im]],
                real_axis,
                condition_at_g_c: cond,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let summary = AbsorptionSummary { g_range: [a, b], samples: args.samples, critical, width_ratio_at_max_g: width_ratio };
    write_family(&common.out, &loaded)?;
    write_json(&common.out, "absorption.json", &summary)?;
    Ok(summary)
}

/// Runs a parsed command and returns its summary as pretty JSON.
pub fn run(command: &Command) -> Result<String, CliError> {
    let json = |v: serde_json::Result<String>| v.map_err(|e| CliError::Numerical(e.to_string()));
    match command {
        Command::Scan(a) => json(serde_json::to_string_pretty(&cmd_scan(a)?)),
        Command::Locate(a) => json(serde_json::to_string_pretty(&cmd_locate(a)?)),
        Command::Trace(a) => json(serde_json::to_string_pretty(&cmd_trace(a)?)),
        Command::Monodromy(a) => json(serde_json::to_string_pretty(&cmd_monodromy(a)?)),
        Command::Absorption(a) => json(serde_json::to_string_pretty(&cmd_absorption(a)?)),
    }
}
