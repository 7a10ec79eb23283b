//! Closed forms for the two-level model: eigenvalues, the radicand `R²`,
//! exceptional points, the complex mixing angle θ and the absorptive map `λ = −iG`.

use num_complex::Complex;

use crate::error::AnalyticError;
use crate::model::TwoLevelParams;
use crate::scalar::{is_finite_c, Real};

/// Which Riemann sheet of `R = √radicand` is meant: `Upper` takes `E₁ − E₂ = +2R`
/// with the principal root, `Lower` takes `E₁ − E₂ = −2R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sheet {
    Upper,
    Lower,
}

impl Sheet {
    pub fn other(self) -> Self {
        match self {
            Sheet::Upper => Sheet::Lower,
            Sheet::Lower => Sheet::Upper,
        }
    }

    fn sign<T: Real>(self) -> T {
        match self {
            Sheet::Upper => T::one(),
            Sheet::Lower => -T::one(),
        }
    }
}

/// Complex mixing angle, principal value with `Re θ ∈ (−π/2, π/2]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaValue<T> {
    pub theta: Complex<T>,
    pub sheet: Sheet,
}

impl<T: Real> ThetaValue<T> {
    pub fn tan(&self) -> Complex<T> {
        self.theta.tan()
    }
}

/// Conjugate pair of exceptional points (`plus` carries `exp(+2iφ)`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpPair<T> {
    pub plus: Complex<T>,
    pub minus: Complex<T>,
}

/// `R² = ((ε₁−ε₂)/2)² + (λ(ω₁−ω₂)/2)² + ½·λ(ε₁−ε₂)(ω₁−ω₂)·cos 2φ`.
pub fn radicand<T: Real>(p: &TwoLevelParams<T>, lambda: Complex<T>) -> Complex<T> {
    let half = T::lit(0.5);
    let de = p.d_eps() * half;
    let dl = lambda.scale(p.d_om() * half);
    let cos2 = (p.phi + p.phi).cos();
    Complex::new(de * de, T::zero()) + dl * dl + lambda.scale(half * p.d_eps() * p.d_om() * cos2)
}

/// `(E₁, E₂) = (ε₁+ε₂+λ(ω₁+ω₂))/2 ± R`, principal root, `E₁` on the `+` branch.
pub fn eigenvalues_closed<T: Real>(
    p: &TwoLevelParams<T>,
    lambda: Complex<T>,
) -> (Complex<T>, Complex<T>) {
    let mean = (Complex::new(p.eps1 + p.eps2, T::zero()) + lambda.scale(p.om1 + p.om2))
        .scale(T::lit(0.5));
    let r = radicand(p, lambda).sqrt();
    (mean + r, mean - r)
}

/// `λ_c = −((ε₁−ε₂)/(ω₁−ω₂))·exp(±2iφ)`.
pub fn exceptional_points_closed<T: Real>(p: &TwoLevelParams<T>) -> EpPair<T> {
    let m = -p.d_eps() / p.d_om();
    let two_phi = p.phi + p.phi;
    EpPair { plus: Complex::from_polar(m, two_phi), minus: Complex::from_polar(m, -two_phi) }
}

/// Exceptional points in the complex G-plane under `λ = −iG`:
/// `G_c = −((ε₁−ε₂)/(ω₁−ω₂))·exp(±2iφ + iπ/2)`.
pub fn absorption_ep<T: Real>(p: &TwoLevelParams<T>) -> EpPair<T> {
    let m = -p.d_eps() / p.d_om();
    let two_phi = p.phi + p.phi;
    let q = T::FRAC_PI_2();
    EpPair {
        plus: Complex::from_polar(m, two_phi + q),
        minus: Complex::from_polar(m, -two_phi + q),
    }
}

/// `λ = −iG`.
pub fn lambda_from_absorption<T: Real>(g: Complex<T>) -> Complex<T> {
    Complex::new(g.im, -g.re)
}

/// Tolerance below which `|R|` counts as sitting on an exceptional point.
pub fn divergence_threshold<T: Real>(p: &TwoLevelParams<T>, lambda: Complex<T>) -> T {
    let half = T::lit(0.5);
    let scale = p.d_eps().abs() * half + lambda.norm() * p.d_om().abs() * half;
    T::tol(1e-8, 64.0) * scale
}

/// Complex mixing angle of the eigenvector `ψ₁ = (cos θ, sin θ)` on the given sheet,
/// from `tan θ = λ(ω₁−ω₂)·sin 2φ / (E₁−E₂ + ε₁−ε₂ + λ(ω₁−ω₂)·cos 2φ)`.
pub fn theta<T: Real>(
    p: &TwoLevelParams<T>,
    lambda: Complex<T>,
    sheet: Sheet,
) -> Result<ThetaValue<T>, AnalyticError> {
    let r = radicand(p, lambda).sqrt();
    let threshold = divergence_threshold(p, lambda);
    if r.norm() < threshold {
        return Err(AnalyticError::DivergentAtEp {
            radius: r.norm().to_f64_lossy(),
            threshold: threshold.to_f64_lossy(),
        });
    }
    let gap = r.scale(T::lit(2.0) * sheet.sign::<T>());
    let (sin2, cos2) = (p.phi + p.phi).sin_cos();
    let a = Complex::new(p.d_eps(), T::zero()) + lambda.scale(p.d_om() * cos2);
    let b = lambda.scale(p.d_om() * sin2);
    // tan θ = b / (gap + a) = (gap − a) / b; the two quotients agree because
    // gap² − a² = b², so take whichever has the larger denominator.
    let den1 = gap + a;
    let theta = if den1.norm() >= b.norm() && den1.norm() > T::zero() {
        (b / den1).atan()
    } else if b.norm() > T::zero() {
        let t = (gap - a) / b;
        if t.norm() > T::one() / T::epsilon() {
            Complex::new(T::FRAC_PI_2(), T::zero())
        } else {
            t.atan()
        }
    } else {
        // 0/0: λ sits where the sheet's eigenvector is (0, 1)
        Complex::new(T::FRAC_PI_2(), T::zero())
    };
    if !is_finite_c(theta) {
        return Err(AnalyticError::NonFinite);
    }
    let theta = if theta.re <= -T::FRAC_PI_2() { theta + T::PI() } else { theta };
    Ok(ThetaValue { theta, sheet })
}

/// Right-hand side of `tan²θ = (E₁−E₂ − (ε₁−ε₂) − λ(ω₁−ω₂)cos 2φ) / (E₁−E₂ + (ε₁−ε₂) + λ(ω₁−ω₂)cos 2φ)`.
pub fn tan_sq_theta<T: Real>(p: &TwoLevelParams<T>, lambda: Complex<T>, sheet: Sheet) -> Complex<T> {
    let gap = radicand(p, lambda).sqrt().scale(T::lit(2.0) * sheet.sign::<T>());
    let cos2 = (p.phi + p.phi).cos();
    let a = Complex::new(p.d_eps(), T::zero()) + lambda.scale(p.d_om() * cos2);
    (gap - a) / (gap + a)
}

/// `ψ₁ = (cos θ, sin θ)`, `ψ₂ = (−sin θ, cos θ)`; with the transpose as left
/// partner the pair satisfies `ψᵢᵀψⱼ = δᵢⱼ`.
pub fn wavefunctions_from_theta<T: Real>(t: &ThetaValue<T>) -> ([Complex<T>; 2], [Complex<T>; 2]) {
    let (s, c) = (t.theta.sin(), t.theta.cos());
    ([c, s], [-s, c])
}
