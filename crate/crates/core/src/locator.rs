//! Exceptional points of `H₀ + λH₁` as roots of the discriminant
//! `D(λ) = Π_{i<j} (Eᵢ(λ) − Eⱼ(λ))²`, a polynomial of degree at most `N(N−1)`.
//!
//! `D` is sampled from eigensolves at roots of unity on a circle, interpolated by a
//! discrete Fourier transform, solved with Aberth iteration and finally polished by
//! damped Newton steps against `D` evaluated directly.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{LocatorError, SpectralError};
use crate::model::MatrixFamily;
use crate::roots::{aberth, eval_scale, horner};
use crate::scalar::{cmp_re_im, Real};
use crate::spectral::eigenvalues;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocatorConfig<T> {
    /// Newton stops once `|D(λ)| < residual_tol · Σ|c_k||λ|^k`.
    pub residual_tol: T,
    /// Roots closer than `cluster_tol · ρ` are merged.
    pub cluster_tol: T,
    /// Probe offset relative to `|λ_c|` used to classify the coalescing pair.
    pub probe_rel: T,
    /// Leading coefficients below `trim_tol` times the largest scaled coefficient are dropped.
    pub trim_tol: T,
    /// Largest tolerated relative DFT energy above the nominal degree.
    pub aliasing_tol: T,
    pub max_newton: usize,
    pub max_aberth: usize,
}

impl<T: Real> Default for LocatorConfig<T> {
    fn default() -> Self {
        Self {
            residual_tol: T::tol(1e-10, 1e4),
            cluster_tol: T::tol(1e-6, 1e6),
            probe_rel: T::tol(1e-4, 1e8),
            trim_tol: T::tol(1e-10, 1e4),
            aliasing_tol: T::tol(1e-6, 1e6),
            max_newton: 60,
            max_aberth: 500,
        }
    }
}

/// Ascending coefficients of the discriminant in λ.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscriminantPoly<T> {
    pub coeffs: Vec<Complex<T>>,
    /// Radius `ρ` of the sampling circle.
    pub radius: T,
    /// `N(N−1)`.
    pub nominal_degree: usize,
    /// Largest scaled coefficient over the scaled leading coefficient.
    pub condition: T,
    /// Relative DFT energy above the nominal degree (eigensolver noise indicator).
    pub aliasing: T,
}

impl<T: Real> DiscriminantPoly<T> {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        horner(&self.coeffs, z).0
    }

    pub fn derivative(&self, z: Complex<T>) -> Complex<T> {
        horner(&self.coeffs, z).1
    }

    pub fn scale_at(&self, z: Complex<T>) -> T {
        eval_scale(&self.coeffs, z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExceptionalPoint<T> {
    pub lambda_c: Complex<T>,
    /// Ranks (ascending real part, then imaginary part) of the two coalescing
    /// levels in the spectrum next to `lambda_c`; zero-based.
    pub level_pair: (usize, usize),
    /// `|D(λ_c)|` evaluated directly.
    pub residual: T,
    /// `|Eᵢ − Eⱼ|` of the coalescing pair at `λ_c + δ`.
    pub gap_at_offset: T,
    pub multiplicity: usize,
    /// Newton refinement reached the residual tolerance.
    pub refined: bool,
    /// Three or more levels were close at the probe points.
    pub ambiguous: bool,
}

/// `Π_{i<j} (Eᵢ − Eⱼ)²` from a fresh eigensolve of `H(λ)`.
pub fn discriminant_at<T: Real>(
    f: &MatrixFamily<T>,
    lambda: Complex<T>,
) -> Result<Complex<T>, SpectralError> {
    let vals = eigenvalues(&f.evaluate(lambda))?;
    Ok(discriminant_of(&vals))
}

fn discriminant_of<T: Real>(vals: &[Complex<T>]) -> Complex<T> {
    let mut d = Complex::new(T::one(), T::zero());
    for i in 0..vals.len() {
        for j in i + 1..vals.len() {
            let g = vals[i] - vals[j];
            d = d * g * g;
        }
    }
    d
}

/// Sampling radius `1 + ‖H₀‖/‖H₁‖`.
pub fn sampling_radius<T: Real>(f: &MatrixFamily<T>) -> T {
    T::one() + f.lambda_scale()
}

pub fn discriminant_poly<T: Real>(f: &MatrixFamily<T>) -> Result<DiscriminantPoly<T>, LocatorError> {
    discriminant_poly_with(f, &LocatorConfig::default())
}

pub fn discriminant_poly_with<T: Real>(
    f: &MatrixFamily<T>,
    cfg: &LocatorConfig<T>,
) -> Result<DiscriminantPoly<T>, LocatorError> {
    let n = f.dim();
    let degree = n * (n - 1);
    let m = 2 * (degree + 1);
    let rho = sampling_radius(f);
    let unit = |k: usize| Complex::from_polar(T::one(), T::TAU() * T::lit(k as f64) / T::lit(m as f64));
    let samples = (0..m)
        .map(|k| discriminant_at(f, unit(k).scale(rho)))
        .collect::<Result<Vec<_>, _>>()?;

    let sample_max = samples.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let spread = f.h0().norm_fro() + rho * f.h1().norm_fro();
    let natural = (T::lit(2.0) * spread).powi(degree as i32);
    if !(sample_max > T::tol(1e-12, 1e4) * natural) {
        return Err(LocatorError::IdenticallyZero);
    }

    // scaled coefficients ĉ_k = c_k ρ^k from the DFT of the samples
    let inv_m = T::one() / T::lit(m as f64);
    let scaled: Vec<Complex<T>> = (0..m)
        .map(|k| {
            samples
                .iter()
                .enumerate()
                .fold(Complex::zero(), |acc, (j, &d)| acc + d * unit((j * k) % m).conj())
                .scale(inv_m)
        })
        .collect();
    let kept_max = scaled[..=degree].iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let alias_max = scaled[degree + 1..].iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let aliasing = alias_max / kept_max;
    let mut top = degree;
    while top > 0 && scaled[top].norm() <= cfg.trim_tol * kept_max {
        top -= 1;
    }
    let condition = kept_max / scaled[top].norm();
    if !(aliasing <= cfg.aliasing_tol) {
        return Err(LocatorError::IllConditioned {
            condition: condition.to_f64_lossy(),
            aliasing: aliasing.to_f64_lossy(),
        });
    }
    let mut rk = T::one();
    let coeffs = scaled[..=top]
        .iter()
        .map(|&c| {
            let out = c.scale(T::one() / rk);
            rk = rk * rho;
            out
        })
        .collect();
    Ok(DiscriminantPoly { coeffs, radius: rho, nominal_degree: degree, condition, aliasing })
}

pub fn locate_eps<T: Real>(f: &MatrixFamily<T>) -> Result<Vec<ExceptionalPoint<T>>, LocatorError> {
    locate_eps_with(f, &LocatorConfig::default())
}

pub fn locate_eps_with<T: Real>(
    f: &MatrixFamily<T>,
    cfg: &LocatorConfig<T>,
) -> Result<Vec<ExceptionalPoint<T>>, LocatorError> {
    let poly = discriminant_poly_with(f, cfg)?;
    if poly.degree() == 0 {
        return Ok(Vec::new());
    }
    let seeds = aberth(&poly.coeffs, cfg.max_aberth, T::tol(1e-12, 1e3));
    if seeds.roots.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(LocatorError::RootFinder { iterations: seeds.iterations });
    }
    let refined = seeds
        .roots
        .iter()
        .map(|&z| newton_refine(f, &poly, z, cfg))
        .collect::<Result<Vec<_>, _>>()?;

    let clusters = cluster(&refined, cfg.cluster_tol * poly.radius);
    let mut out = Vec::with_capacity(clusters.len());
    for members in clusters {
        let k = T::lit(members.len() as f64);
        let lambda_c = members.iter().fold(Complex::zero(), |acc, &i| acc + refined[i].0) / k;
        let residual = if members.len() == 1 {
            refined[members[0]].1
        } else {
            discriminant_at(f, lambda_c)?.norm()
        };
        let probe = classify(f, lambda_c, poly.radius, cfg)?;
        out.push(ExceptionalPoint {
            lambda_c,
            level_pair: probe.pair,
            residual,
            gap_at_offset: probe.gap,
            multiplicity: members.len(),
            refined: members.iter().all(|&i| refined[i].2),
            ambiguous: probe.ambiguous,
        });
    }
    out.sort_by(|a, b| cmp_re_im(&a.lambda_c, &b.lambda_c));
    Ok(out)
}

/// Damped Newton on the directly evaluated discriminant, using the interpolant's
/// derivative. Returns `(λ, |D(λ)|, converged)`.
fn newton_refine<T: Real>(
    f: &MatrixFamily<T>,
    poly: &DiscriminantPoly<T>,
    start: Complex<T>,
    cfg: &LocatorConfig<T>,
) -> Result<(Complex<T>, T, bool), LocatorError> {
    let mut z = start;
    let mut d = discriminant_at(f, z)?;
    for _ in 0..cfg.max_newton {
        if d.norm() < cfg.residual_tol * poly.scale_at(z) {
            return Ok((z, d.norm(), true));
        }
        let slope = poly.derivative(z);
        if slope.is_zero() {
            break;
        }
        let step = d / slope;
        let mut t = T::one();
        let mut accepted = false;
        for _ in 0..30 {
            let trial = z - step.scale(t);
            let dt = discriminant_at(f, trial)?;
            if dt.norm() < d.norm() {
                z = trial;
                d = dt;
                accepted = true;
                break;
            }
            t = t * T::lit(0.5);
        }
        if !accepted {
            break;
        }
    }
    let ok = d.norm() < cfg.residual_tol * poly.scale_at(z);
    Ok((z, d.norm(), ok))
}

fn cluster<T: Real>(roots: &[(Complex<T>, T, bool)], tol: T) -> Vec<Vec<usize>> {
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i].0 - roots[j].0).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_of[r] {
            Some(g) => groups[g].push(i),
            None => {
                root_of[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    groups
}

struct Probe<T> {
    pair: (usize, usize),
    gap: T,
    ambiguous: bool,
}

/// Closest pair of levels at `λ_c ± δ`, `λ_c ± iδ`; the modal pair wins.
fn classify<T: Real>(
    f: &MatrixFamily<T>,
    lambda_c: Complex<T>,
    radius: T,
    cfg: &LocatorConfig<T>,
) -> Result<Probe<T>, LocatorError> {
    let base = if lambda_c.norm() > T::zero() { lambda_c.norm() } else { radius };
    let delta = cfg.probe_rel * base;
    let dirs = [
        Complex::new(T::one(), T::zero()),
        Complex::new(-T::one(), T::zero()),
        Complex::new(T::zero(), T::one()),
        Complex::new(T::zero(), -T::one()),
    ];
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(4);
    let mut first_gap = T::zero();
    let mut ambiguous = false;
    for (k, dir) in dirs.iter().enumerate() {
        let mut vals = eigenvalues(&f.evaluate(lambda_c + dir.scale(delta)))?;
        vals.sort_by(cmp_re_im);
        let mut gaps: Vec<(T, usize, usize)> = Vec::new();
        for i in 0..vals.len() {
            for j in i + 1..vals.len() {
                gaps.push(((vals[i] - vals[j]).norm(), i, j));
            }
        }
        gaps.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let (g, i, j) = gaps[0];
        if gaps.len() > 1 && gaps[1].0 < T::lit(10.0) * g {
            ambiguous = true;
        }
        if k == 0 {
            first_gap = g;
        }
        pairs.push((i, j));
    }
    let mut best = pairs[0];
    let mut best_count = 0;
    for p in &pairs {
        let count = pairs.iter().filter(|q| *q == p).count();
        if count > best_count {
            best = *p;
            best_count = count;
        }
    }
    Ok(Probe { pair: best, gap: first_gap, ambiguous })
}
