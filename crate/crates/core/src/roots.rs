//! Simultaneous polynomial root finding (Aberth–Ehrlich iteration).

use num_complex::Complex;
use num_traits::Zero;

use crate::scalar::Real;

/// `(p(z), p'(z))` for ascending coefficients.
pub fn horner<T: Real>(coeffs: &[Complex<T>], z: Complex<T>) -> (Complex<T>, Complex<T>) {
    let mut p = Complex::zero();
    let mut dp = Complex::zero();
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// `Σ |c_k|·|z|^k`, the natural magnitude of terms summed when evaluating at `z`.
pub fn eval_scale<T: Real>(coeffs: &[Complex<T>], z: Complex<T>) -> T {
    let r = z.norm();
    coeffs.iter().rev().fold(T::zero(), |acc, c| acc * r + c.norm())
}

#[derive(Clone, Debug, PartialEq)]
pub struct AberthOutcome<T> {
    pub roots: Vec<Complex<T>>,
    pub iterations: usize,
    pub converged: bool,
}

/// All roots of the polynomial with ascending coefficients `coeffs`
/// (leading coefficient must be nonzero).
pub fn aberth<T: Real>(coeffs: &[Complex<T>], max_iter: usize, tol: T) -> AberthOutcome<T> {
    let degree = coeffs.len().saturating_sub(1);
    if degree == 0 {
        return AberthOutcome { roots: Vec::new(), iterations: 0, converged: true };
    }
    let lead = coeffs[degree];
    if degree == 1 {
        return AberthOutcome { roots: vec![-coeffs[0] / lead], iterations: 0, converged: true };
    }

    // start on a circle enclosing all roots (Fujiwara-type bound, halved)
    let mut radius = T::zero();
    for (k, c) in coeffs[..degree].iter().enumerate() {
        let q = (c.norm() / lead.norm()).powf(T::one() / T::lit((degree - k) as f64));
        radius = radius.max(q);
    }
    if !(radius > T::zero()) {
        return AberthOutcome { roots: vec![Complex::zero(); degree], iterations: 0, converged: true };
    }
    let offset = T::lit(0.4);
    let mut z: Vec<Complex<T>> = (0..degree)
        .map(|k| {
            let angle = T::TAU() * T::lit(k as f64) / T::lit(degree as f64) + offset;
            Complex::from_polar(radius, angle)
        })
        .collect();

    let floor = radius * T::epsilon();
    let noise = T::lit(4.0 * degree as f64) * T::epsilon();
    for iter in 1..=max_iter {
        let mut done = true;
        for k in 0..degree {
            let (p, dp) = horner(coeffs, z[k]);
            // value already at rounding level: nothing more to gain
            if p.norm() <= noise * eval_scale(coeffs, z[k]) {
                continue;
            }
            let ratio = p / dp;
            let repulsion = z
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .fold(Complex::zero(), |acc, (_, &zj)| {
                    let d = z[k] - zj;
                    if d.is_zero() {
                        acc
                    } else {
                        acc + Complex::new(T::one(), T::zero()) / d
                    }
                });
            let denom = Complex::new(T::one(), T::zero()) - ratio * repulsion;
            let step = if denom.is_zero() || !dp.norm().is_finite() || dp.is_zero() {
                ratio
            } else {
                ratio / denom
            };
            if !(step.re.is_finite() && step.im.is_finite()) {
                continue;
            }
            z[k] = z[k] - step;
            if step.norm() > tol * z[k].norm() + floor {
                done = false;
            }
        }
        if done {
            return AberthOutcome { roots: z, iterations: iter, converged: true };
        }
    }
    AberthOutcome { roots: z, iterations: max_iter, converged: false }
}
