//! Continuation of the eigensystem along contours in the λ-plane.
//!
//! Each accepted step satisfies two guards: every branch moves by less than
//! `gap_guard` times its distance to the nearest other level, and the
//! gauge-invariant overlap product `<l̃ₚ|r><l̃|rₚ>` stays close to one. Failing
//! steps are bisected. Eigenvectors are biorthonormalized at every sample and then
//! put in the continuity gauge: a unit phase `u` is chosen so that the forward
//! overlap `<l̃ₚ|u·r>` and the backward overlap `<u·l̃|rₚ>` carry the same phase,
//! namely that of `√(<l̃ₚ|r><l̃|rₚ>)`. For complex-symmetric families this
//! reproduces the analytic section with `ψᵀψ = 1`, so loop phases are exact signs.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::TraceError;
use crate::locator::{locate_eps, ExceptionalPoint};
use crate::matrix::{inner, scale_vec, CMatrix};
use crate::model::{Contour, MatrixFamily};
use crate::scalar::{cmp_re_im, unit_phase, Real};
use crate::spectral::{biorthonormalize_with, default_defect_threshold, eigensystem};
use crate::error::SpectralError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceConfig<T> {
    /// Largest accepted per-step eigenvalue displacement relative to the gap to other levels.
    pub gap_guard: T,
    /// Largest accepted `|1 − <l̃ₚ|r><l̃|rₚ>|` per step.
    pub overlap_guard: T,
    /// Smallest step before bisection gives up, relative to the contour scale.
    pub min_step_rel: T,
    /// Contours must keep this distance (relative to the contour scale) from known EPs.
    pub ep_exclusion_rel: T,
    pub defect_threshold: T,
    /// Hard cap on trajectory length.
    pub max_samples: usize,
}

impl<T: Real> Default for TraceConfig<T> {
    fn default() -> Self {
        Self {
            gap_guard: T::lit(0.2),
            overlap_guard: T::lit(0.5),
            min_step_rel: T::tol(1e-12, 64.0),
            ep_exclusion_rel: T::lit(1e-3),
            defect_threshold: default_defect_threshold(),
            max_samples: 2_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Track {
    All,
    Subset(Vec<usize>),
}

/// Biorthonormal eigenframe at one λ; branch `b` owns `values[b]`, `right[b]`, `left[b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame<T> {
    pub lambda: Complex<T>,
    pub values: Vec<Complex<T>>,
    pub right: Vec<Vec<Complex<T>>>,
    pub left: Vec<Vec<Complex<T>>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchTrajectory<T> {
    pub lambda_samples: Vec<Complex<T>>,
    /// `values[s][k]`: eigenvalue of tracked branch `k` at sample `s`.
    pub values: Vec<Vec<Complex<T>>>,
    pub right_vectors: Vec<Vec<Vec<Complex<T>>>>,
    pub left_vectors: Vec<Vec<Vec<Complex<T>>>>,
    /// Per sample: nearest-eigenvalue matching agreed with the best vector overlap.
    pub matched: Vec<bool>,
    /// Trajectory index of every contour point.
    pub knots: Vec<usize>,
    /// Start-frame level index of every tracked branch (levels ranked by Re, then Im).
    pub branches: Vec<usize>,
}

impl<T: Real> BranchTrajectory<T> {
    pub fn len(&self) -> usize {
        self.lambda_samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda_samples.is_empty()
    }

    pub fn frame(&self, s: usize) -> Frame<T> {
        Frame {
            lambda: self.lambda_samples[s],
            values: self.values[s].clone(),
            right: self.right_vectors[s].clone(),
            left: self.left_vectors[s].clone(),
        }
    }

    pub fn first(&self) -> Frame<T> {
        self.frame(0)
    }

    pub fn last(&self) -> Frame<T> {
        self.frame(self.len() - 1)
    }
}

/// Contour tracer bound to one family.
#[derive(Clone, Debug)]
pub struct Tracer<'a, T> {
    family: &'a MatrixFamily<T>,
    config: TraceConfig<T>,
    eps: Option<Vec<ExceptionalPoint<T>>>,
}

impl<'a, T: Real> Tracer<'a, T> {
    pub fn new(family: &'a MatrixFamily<T>) -> Self {
        Self { family, config: TraceConfig::default(), eps: None }
    }

    pub fn with_config(mut self, config: TraceConfig<T>) -> Self {
        self.config = config;
        self
    }

    /// Known exceptional points, used for the contour clearance check and for
    /// reporting enclosed points.
    pub fn with_eps(mut self, eps: Vec<ExceptionalPoint<T>>) -> Self {
        self.eps = Some(eps);
        self
    }

    pub fn config(&self) -> &TraceConfig<T> {
        &self.config
    }

    /// Biorthonormal frame at λ with levels ranked by (Re, Im).
    pub fn frame_at(&self, lambda: Complex<T>) -> Result<Frame<T>, TraceError> {
        let sys = eigensystem(&self.family.evaluate(lambda))?;
        let sys = biorthonormalize_with(&sys, self.config.defect_threshold).map_err(|e| match e {
            SpectralError::NearDefective { .. } => TraceError::EpTooClose {
                re: lambda.re.to_f64_lossy(),
                im: lambda.im.to_f64_lossy(),
            },
            other => TraceError::Spectral(other),
        })?;
        let mut order: Vec<usize> = (0..sys.len()).collect();
        order.sort_by(|&a, &b| cmp_re_im(&sys.values[a], &sys.values[b]));
        Ok(Frame {
            lambda,
            values: order.iter().map(|&k| sys.values[k]).collect(),
            right: order.iter().map(|&k| sys.right[k].clone()).collect(),
            left: order.iter().map(|&k| sys.left[k].clone()).collect(),
        })
    }

    fn check_clearance(&self, c: &Contour<T>) -> Result<(), TraceError> {
        if let Some(eps) = &self.eps {
            let radius = self.config.ep_exclusion_rel * c.scale();
            for ep in eps {
                let d = c.distance_to(ep.lambda_c);
                if d < radius {
                    return Err(TraceError::ContourNearEp {
                        re: ep.lambda_c.re.to_f64_lossy(),
                        im: ep.lambda_c.im.to_f64_lossy(),
                        distance: d.to_f64_lossy(),
                        radius: radius.to_f64_lossy(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn trace(&self, c: &Contour<T>, track: &Track) -> Result<BranchTrajectory<T>, TraceError> {
        self.check_clearance(c)?;
        let n = self.family.dim();
        let branches = match track {
            Track::All => (0..n).collect::<Vec<_>>(),
            Track::Subset(list) => {
                let mut seen = vec![false; n];
                for &b in list {
                    if b >= n || seen[b] {
                        return Err(TraceError::InvalidSubset(format!("{list:?} for dimension {n}")));
                    }
                    seen[b] = true;
                }
                if list.is_empty() {
                    return Err(TraceError::InvalidSubset("empty".into()));
                }
                list.clone()
            }
        };
        let min_step = self.config.min_step_rel * c.scale();

        let mut frames = vec![self.frame_at(c.start())?];
        let mut matched = vec![true];
        let mut knots = vec![0];
        for &target_point in &c.points()[1..] {
            let mut pending = vec![target_point];
            while let Some(&target) = pending.last() {
                let current = frames.last().expect("trajectory is never empty");
                let candidate = self.frame_at(target)?;
                match self.continue_frame(current, candidate) {
                    Some((next, agreed)) => {
                        frames.push(next);
                        matched.push(agreed);
                        pending.pop();
                        if frames.len() > self.config.max_samples {
                            return Err(TraceError::EpTooClose {
                                re: target.re.to_f64_lossy(),
                                im: target.im.to_f64_lossy(),
                            });
                        }
                    }
                    None => {
                        if (target - current.lambda).norm() < min_step {
                            return Err(TraceError::EpTooClose {
                                re: target.re.to_f64_lossy(),
                                im: target.im.to_f64_lossy(),
                            });
                        }
                        let mid = (current.lambda + target).scale(T::lit(0.5));
                        pending.push(mid);
                    }
                }
            }
            knots.push(frames.len() - 1);
        }

        let pick = |v: &Vec<Complex<T>>| branches.iter().map(|&b| v[b]).collect::<Vec<_>>();
        let pick_vec =
            |v: &Vec<Vec<Complex<T>>>| branches.iter().map(|&b| v[b].clone()).collect::<Vec<_>>();
        Ok(BranchTrajectory {
            lambda_samples: frames.iter().map(|f| f.lambda).collect(),
            values: frames.iter().map(|f| pick(&f.values)).collect(),
            right_vectors: frames.iter().map(|f| pick_vec(&f.right)).collect(),
            left_vectors: frames.iter().map(|f| pick_vec(&f.left)).collect(),
            matched,
            knots,
            branches,
        })
    }

    /// Matches `candidate` to `prev` branch by branch and fixes the continuity gauge.
    /// `None` when a guard fails and the step must be refined.
    fn continue_frame(&self, prev: &Frame<T>, candidate: Frame<T>) -> Option<(Frame<T>, bool)> {
        let n = prev.values.len();
        let mut assignment = vec![usize::MAX; n];
        let mut taken = vec![false; n];
        let mut agreed = true;
        for b in 0..n {
            let gap = (0..n)
                .filter(|&c| c != b)
                .map(|c| (prev.values[b] - prev.values[c]).norm())
                .fold(T::infinity(), T::min);
            let (j, disp) = nearest(&candidate.values, prev.values[b]);
            if !(disp < self.config.gap_guard * gap) || taken[j] {
                return None;
            }
            taken[j] = true;
            assignment[b] = j;
            let best_vec = (0..n)
                .max_by(|&x, &y| {
                    let ox = overlap_product(prev, b, &candidate, x).norm();
                    let oy = overlap_product(prev, b, &candidate, y).norm();
                    ox.partial_cmp(&oy).unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(j);
            agreed &= best_vec == j;
        }
        let mut next = Frame {
            lambda: candidate.lambda,
            values: Vec::with_capacity(n),
            right: Vec::with_capacity(n),
            left: Vec::with_capacity(n),
        };
        for b in 0..n {
            let j = assignment[b];
            let mut r = candidate.right[j].clone();
            let mut l = candidate.left[j].clone();
            let forward = inner(&prev.left[b], &r);
            let backward = inner(&l, &prev.right[b]);
            let product = forward * backward;
            if !((Complex::new(T::one(), T::zero()) - product).norm() < self.config.overlap_guard) {
                return None;
            }
            let u = unit_phase(product.sqrt() / forward);
            scale_vec(&mut r, u);
            scale_vec(&mut l, u);
            next.values.push(candidate.values[j]);
            next.right.push(r);
            next.left.push(l);
        }
        Some((next, agreed))
    }

    /// Permutation and phases picked up by the eigenframe around a closed loop.
    pub fn monodromy(&self, lp: &Contour<T>) -> Result<MonodromyResult<T>, TraceError> {
        if !lp.is_closed() {
            return Err(TraceError::NotClosed);
        }
        let traj = self.trace(lp, &Track::All)?;
        self.monodromy_of(lp, traj)
    }

    /// Monodromy from a full trajectory already traced along `lp`.
    pub fn monodromy_of(
        &self,
        lp: &Contour<T>,
        traj: BranchTrajectory<T>,
    ) -> Result<MonodromyResult<T>, TraceError> {
        if !lp.is_closed() {
            return Err(TraceError::NotClosed);
        }
        if traj.branches.len() != self.family.dim() {
            return Err(TraceError::InvalidSubset("monodromy needs every branch".into()));
        }
        let (start, end) = (traj.first(), traj.last());
        let (permutation, phases, phase_defect) = frame_transition(&start, &end)?;
        let eps = match &self.eps {
            Some(list) => list.clone(),
            None => locate_eps(self.family).unwrap_or_default(),
        };
        let enclosed_eps = enclosed(lp, &eps);
        let loop_winding = lp.winding_hint().unwrap_or_else(|| {
            let n = T::lit(lp.points().len() as f64);
            let centroid = lp.points().iter().fold(Complex::zero(), |a, &z| a + z) / n;
            lp.winding_about(centroid).round().to_i32().unwrap_or(0)
        });
        Ok(MonodromyResult { permutation, phases, loop_winding, enclosed_eps, phase_defect, trajectory: traj })
    }

    /// Compares the endpoint frames of two open paths with common endpoints.
    pub fn sheet_comparison(
        &self,
        below: &Contour<T>,
        above: &Contour<T>,
    ) -> Result<SheetReport<T>, TraceError> {
        if below.start() != above.start() || below.end() != above.end() {
            return Err(TraceError::EndpointMismatch);
        }
        let a = self.trace(below, &Track::All)?;
        let b = self.trace(above, &Track::All)?;
        let (fa, fb) = (a.last(), b.last());
        let n = fa.values.len();
        let mut overlap = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                overlap[(i, j)] = inner(&fa.left[i], &fb.right[j]);
            }
        }
        let threshold = T::lit(0.7);
        let mut permutation = vec![0; n];
        let mut phases = Vec::with_capacity(n);
        let mut owner: Vec<Option<usize>> = vec![None; n];
        for j in 0..n {
            let (i, mag) = (0..n)
                .map(|i| (i, overlap[(i, j)].norm()))
                .fold((0, T::neg_infinity()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(mag > threshold) {
                return Err(TraceError::AmbiguousOverlap { branch: j, largest: mag.to_f64_lossy() });
            }
            if let Some(first) = owner[i] {
                return Err(TraceError::MatchingCollision { first, second: j, target: i });
            }
            owner[i] = Some(j);
            permutation[j] = i;
            phases.push(unit_phase(overlap[(i, j)]));
        }
        let exchanged = permutation.iter().enumerate().any(|(j, &i)| i != j);
        let eps = match &self.eps {
            Some(list) => list.clone(),
            None => locate_eps(self.family).unwrap_or_default(),
        };
        let enclosed_eps = match below.join(&above.reversed()) {
            Ok(lp) => enclosed(&lp, &eps),
            Err(_) => Vec::new(),
        };
        let matrix = MonodromyMatrix::from_parts(&permutation, &phases);
        Ok(SheetReport { overlap, permutation, phases, exchanged, matrix, enclosed_eps, below: a, above: b })
    }
}

/// Traces with default settings and no known EP list.
pub fn trace<T: Real>(
    f: &MatrixFamily<T>,
    c: &Contour<T>,
    track: &Track,
) -> Result<BranchTrajectory<T>, TraceError> {
    Tracer::new(f).trace(c, track)
}

pub fn monodromy<T: Real>(f: &MatrixFamily<T>, lp: &Contour<T>) -> Result<MonodromyResult<T>, TraceError> {
    Tracer::new(f).monodromy(lp)
}

pub fn sheet_comparison<T: Real>(
    f: &MatrixFamily<T>,
    below: &Contour<T>,
    above: &Contour<T>,
) -> Result<SheetReport<T>, TraceError> {
    Tracer::new(f).sheet_comparison(below, above)
}

fn nearest<T: Real>(values: &[Complex<T>], z: Complex<T>) -> (usize, T) {
    values
        .iter()
        .enumerate()
        .map(|(j, &v)| (j, (v - z).norm()))
        .fold((0, T::infinity()), |best, cur| if cur.1 < best.1 { cur } else { best })
}

fn overlap_product<T: Real>(prev: &Frame<T>, b: usize, cand: &Frame<T>, j: usize) -> Complex<T> {
    inner(&prev.left[b], &cand.right[j]) * inner(&cand.left[j], &prev.right[b])
}

/// Permutation (end branch → start level), unit phases and the largest deviation of
/// `|<l̃_start|r_end>|` from one.
type Transition<T> = (Vec<usize>, Vec<Complex<T>>, T);

fn frame_transition<T: Real>(start: &Frame<T>, end: &Frame<T>) -> Result<Transition<T>, TraceError> {
    let n = start.values.len();
    let mut permutation = vec![0; n];
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut phases = Vec::with_capacity(n);
    let mut defect = T::zero();
    for i in 0..n {
        let (j, _) = nearest(&start.values, end.values[i]);
        if let Some(first) = owner[j] {
            return Err(TraceError::MatchingCollision { first, second: i, target: j });
        }
        owner[j] = Some(i);
        permutation[i] = j;
        let o = inner(&start.left[j], &end.right[i]);
        defect = defect.max((o.norm() - T::one()).abs());
        phases.push(unit_phase(o));
    }
    Ok((permutation, phases, defect))
}

fn enclosed<T: Real>(lp: &Contour<T>, eps: &[ExceptionalPoint<T>]) -> Vec<EnclosedEp<T>> {
    eps.iter()
        .filter_map(|ep| {
            let w = lp.winding_about(ep.lambda_c).round().to_i32().unwrap_or(0);
            (w != 0).then_some(EnclosedEp { ep: *ep, winding: w })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnclosedEp<T> {
    pub ep: ExceptionalPoint<T>,
    pub winding: i32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonodromyResult<T> {
    /// `permutation[i]`: start level reached by branch `i` after the loop.
    pub permutation: Vec<usize>,
    /// Unit phase with `right_end[i] ≈ phases[i] · right_start[permutation[i]]`.
    pub phases: Vec<Complex<T>>,
    pub loop_winding: i32,
    pub enclosed_eps: Vec<EnclosedEp<T>>,
    /// `max |(|<l̃_start|r_end>| − 1)|`; small when the trace was well resolved.
    pub phase_defect: T,
    pub trajectory: BranchTrajectory<T>,
}

impl<T: Real> MonodromyResult<T> {
    pub fn matrix(&self) -> MonodromyMatrix<T> {
        monodromy_matrix(self)
    }
}

/// Phase-weighted permutation matrix, `M[perm(i), i] = phaseᵢ`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonodromyMatrix<T> {
    pub m: CMatrix<T>,
}

pub fn monodromy_matrix<T: Real>(r: &MonodromyResult<T>) -> MonodromyMatrix<T> {
    MonodromyMatrix::from_parts(&r.permutation, &r.phases)
}

impl<T: Real> MonodromyMatrix<T> {
    pub fn from_parts(permutation: &[usize], phases: &[Complex<T>]) -> Self {
        let mut m = CMatrix::zeros(permutation.len());
        for (i, (&p, &ph)) in permutation.iter().zip(phases).enumerate() {
            m[(p, i)] = ph;
        }
        Self { m }
    }

    pub fn identity(n: usize) -> Self {
        Self { m: CMatrix::identity(n) }
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self { m: self.m.matmul(&other.m) }
    }

    pub fn pow(&self, k: u32) -> Self {
        Self { m: self.m.pow(k) }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.m.max_abs_diff(&other.m)
    }

    /// Distance to `s·I`.
    pub fn distance_to_scalar(&self, s: Complex<T>) -> T {
        self.m.max_abs_diff(&CMatrix::identity(self.dim()).scale(s))
    }

    pub fn trace(&self) -> Complex<T> {
        self.m.trace()
    }

    /// Determinant of a phase-permutation matrix: sign of the permutation times the phases.
    pub fn determinant(&self) -> Complex<T> {
        let n = self.dim();
        let mut perm = vec![usize::MAX; n];
        let mut prod = Complex::new(T::one(), T::zero());
        for col in 0..n {
            let row = (0..n)
                .max_by(|&a, &b| {
                    self.m[(a, col)].norm().partial_cmp(&self.m[(b, col)].norm()).unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(0);
            perm[col] = row;
            prod = prod * self.m[(row, col)];
        }
        let mut sign = T::one();
        let mut seen = vec![false; n];
        for start in 0..n {
            let mut len = 0;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                k = perm[k];
                len += 1;
            }
            if len > 0 && len % 2 == 0 {
                sign = -sign;
            }
        }
        prod.scale(sign)
    }
}

/// Endpoint comparison of two open paths.
#[derive(Clone, Debug, PartialEq)]
pub struct SheetReport<T> {
    /// `<l̃_below,i | r_above,j>` at the common end point.
    pub overlap: CMatrix<T>,
    /// `permutation[j]`: level of the `below` frame matched by branch `j` of `above`.
    pub permutation: Vec<usize>,
    pub phases: Vec<Complex<T>>,
    pub exchanged: bool,
    /// `M[perm(j), j] = phase_j`, the map from the `below` frame to the `above` frame.
    pub matrix: MonodromyMatrix<T>,
    /// EPs enclosed by `below` followed by reversed `above`.
    pub enclosed_eps: Vec<EnclosedEp<T>>,
    pub below: BranchTrajectory<T>,
    pub above: BranchTrajectory<T>,
}

/// Per-revolution eigenvalue mismatch along a traced loop.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosureReport<T> {
    /// `max_b |E_b(after r revolutions) − E_b(start)|` for `r = 1..=turns`.
    pub mismatch: Vec<T>,
    pub tolerance: T,
    /// First revolution count at which every branch returns to its start value.
    pub closure_after_revolutions: Option<usize>,
    /// Extent of the energy-plane curves, the scale for `tolerance`.
    pub energy_scale: T,
}

/// Closure of the energy-plane curves of a trajectory traced along `lp`, whose
/// `winding_hint` (default 1) gives the number of revolutions.
pub fn energy_closure<T: Real>(traj: &BranchTrajectory<T>, lp: &Contour<T>, rel_tol: T) -> ClosureReport<T> {
    let turns = lp.winding_hint().map(|k| k.unsigned_abs() as usize).unwrap_or(1).max(1);
    let per_rev = (lp.points().len() - 1) / turns;
    let k = traj.branches.len();
    let start = &traj.values[0];
    let mut energy_scale = T::zero();
    for row in &traj.values {
        for b in 0..k {
            energy_scale = energy_scale.max((row[b] - start[b]).norm());
        }
    }
    let tolerance = rel_tol * energy_scale.max(T::min_positive_value());
    let mismatch: Vec<T> = (1..=turns)
        .map(|r| {
            let s = traj.knots[(r * per_rev).min(traj.knots.len() - 1)];
            (0..k).map(|b| (traj.values[s][b] - start[b]).norm()).fold(T::zero(), T::max)
        })
        .collect();
    let closure_after_revolutions = mismatch.iter().position(|&m| m <= tolerance).map(|r| r + 1);
    ClosureReport { mismatch, tolerance, closure_after_revolutions, energy_scale }
}

/// `tan θ = v₁/v₀` for a two-component vector parametrized as `(cos θ, sin θ)`.
pub fn tan_theta_of<T: Real>(v: &[Complex<T>]) -> Complex<T> {
    v[1] / v[0]
}

/// Growth of normalized eigenvector components approaching an exceptional point.
#[derive(Clone, Debug, PartialEq)]
pub struct BlowupProfile<T> {
    pub distances: Vec<T>,
    /// Largest component modulus of the biorthonormalized right vectors of the
    /// coalescing pair.
    pub max_component: Vec<T>,
    /// `1/|<l̂|r̂>|` of the pair at unit norms.
    pub condition: Vec<T>,
    /// Least-squares slope of `log max_component` against `log distance`.
    pub slope: T,
}

pub fn component_blowup<T: Real>(
    f: &MatrixFamily<T>,
    lambda_c: Complex<T>,
    direction: Complex<T>,
    distances: &[T],
) -> Result<BlowupProfile<T>, TraceError> {
    let dir = unit_phase(direction);
    let mut max_component = Vec::with_capacity(distances.len());
    let mut condition = Vec::with_capacity(distances.len());
    for &d in distances {
        let sys = eigensystem(&f.evaluate(lambda_c + dir.scale(d)))?;
        let sys = biorthonormalize_with(&sys, T::infinity())?;
        let n = sys.len();
        let (mut bi, mut bj, mut best) = (0, 1, T::infinity());
        for i in 0..n {
            for j in i + 1..n {
                let g = (sys.values[i] - sys.values[j]).norm();
                if g < best {
                    (bi, bj, best) = (i, j, g);
                }
            }
        }
        let comp = [bi, bj]
            .iter()
            .flat_map(|&k| sys.right[k].iter().map(|z| z.norm()))
            .fold(T::zero(), T::max);
        max_component.push(comp);
        condition.push(sys.condition[bi].max(sys.condition[bj]));
    }
    let slope = loglog_slope(distances, &max_component);
    Ok(BlowupProfile { distances: distances.to_vec(), max_component, condition, slope })
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope<T: Real>(x: &[T], y: &[T]) -> T {
    let n = T::lit(x.len() as f64);
    let lx: Vec<T> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<T> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().fold(T::zero(), |a, &b| a + b) / n;
    let my = ly.iter().fold(T::zero(), |a, &b| a + b) / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (a, b) in lx.iter().zip(&ly) {
        sxy = sxy + (*a - mx) * (*b - my);
        sxx = sxx + (*a - mx) * (*a - mx);
    }
    sxy / sxx
}
