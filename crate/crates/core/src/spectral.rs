//! Dense complex eigensolver with independently computed left eigenvectors,
//! biorthonormalization `<left_i|right_j> = δ_ij` and defectivity diagnostics.
//!
//! Eigenvalues come from a Householder reduction to Hessenberg form followed by
//! shifted QR sweeps (Wilkinson shifts, Givens rotations) down to a complex Schur
//! form `A = Z·T·Zᴴ`. Eigenvectors are back-substituted from `T`.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::SpectralError;
use crate::matrix::{inner, scale_vec, vec_norm, CMatrix};
use crate::scalar::{unit_phase, Real};

/// Eigenvalues with paired right and left eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSystem<T> {
    pub values: Vec<Complex<T>>,
    pub right: Vec<Vec<Complex<T>>>,
    pub left: Vec<Vec<Complex<T>>>,
    /// `‖A·rightᵢ − valueᵢ·rightᵢ‖` for the vectors as stored.
    pub residuals: Vec<T>,
    /// `1/|<leftᵢ|rightᵢ>|` at unit norms (eigenvalue condition numbers).
    pub condition: Vec<T>,
}

impl<T: Real> EigenSystem<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Matrix of overlaps `<leftᵢ|rightⱼ>`.
    pub fn overlap_matrix(&self) -> CMatrix<T> {
        let n = self.len();
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = inner(&self.left[i], &self.right[j]);
            }
        }
        m
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DefectivityReport<T> {
    pub min_pair_gap: T,
    pub max_condition: T,
    pub near_defective: bool,
}

/// Condition number above which a pair counts as numerically defective.
pub fn default_defect_threshold<T: Real>() -> T {
    T::lit(1e6).min(T::one() / T::epsilon().sqrt())
}

/// Complex Schur decomposition `A = Z·T·Zᴴ`; returns `(T, Z)`.
pub fn schur<T: Real>(a: &CMatrix<T>) -> Result<(CMatrix<T>, CMatrix<T>), SpectralError> {
    if !a.is_finite() {
        return Err(SpectralError::NonFinite);
    }
    let (mut h, mut z) = hessenberg(a);
    qr_iterate(&mut h, &mut z)?;
    Ok((h, z))
}

/// Eigenvalues only, in Schur order.
pub fn eigenvalues<T: Real>(a: &CMatrix<T>) -> Result<Vec<Complex<T>>, SpectralError> {
    if !a.is_finite() {
        return Err(SpectralError::NonFinite);
    }
    let (mut h, mut z) = hessenberg(a);
    qr_iterate(&mut h, &mut z)?;
    Ok((0..h.dim()).map(|i| h[(i, i)]).collect())
}

/// Full eigensystem. Right vectors come from `A`, left vectors from an independent
/// solve of `Aᴴ`; the two sets are paired greedily by largest `|<left|right>|`.
/// Vectors have unit norm with the largest component real and positive.
pub fn eigensystem<T: Real>(a: &CMatrix<T>) -> Result<EigenSystem<T>, SpectralError> {
    let (values, right) = right_eigenpairs(a)?;
    let (_, left_raw) = right_eigenpairs(&a.conj_transpose())?;
    let n = values.len();

    // greedy pairing on the overlap matrix
    let mut overlaps: Vec<(T, usize, usize)> = Vec::with_capacity(n * n);
    for (i, l) in left_raw.iter().enumerate() {
        for (j, r) in right.iter().enumerate() {
            overlaps.push((inner(l, r).norm(), i, j));
        }
    }
    overlaps.sort_by(|x, y| {
        y.0.partial_cmp(&x.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.1.cmp(&y.1))
            .then(x.2.cmp(&y.2))
    });
    let mut left: Vec<Option<Vec<Complex<T>>>> = vec![None; n];
    let mut used_left = vec![false; n];
    for &(_, i, j) in &overlaps {
        if used_left[i] || left[j].is_some() {
            continue;
        }
        used_left[i] = true;
        left[j] = Some(left_raw[i].clone());
    }
    let left: Vec<_> = left.into_iter().map(|l| l.expect("pairing is complete")).collect();

    let residuals = residuals(a, &values, &right);
    let condition = right
        .iter()
        .zip(&left)
        .map(|(r, l)| {
            let s = inner(l, r).norm();
            if s > T::zero() {
                T::one() / s
            } else {
                T::infinity()
            }
        })
        .collect();
    Ok(EigenSystem { values, right, left, residuals, condition })
}

/// Rescales each pair so that `<leftᵢ|rightᵢ> = 1` and `‖leftᵢ‖ = ‖rightᵢ‖`,
/// with the largest-magnitude component of `rightᵢ` real and positive.
/// Refuses near-defective pairs.
pub fn biorthonormalize<T: Real>(sys: &EigenSystem<T>) -> Result<EigenSystem<T>, SpectralError> {
    biorthonormalize_with(sys, default_defect_threshold())
}

pub fn biorthonormalize_with<T: Real>(
    sys: &EigenSystem<T>,
    defect_threshold: T,
) -> Result<EigenSystem<T>, SpectralError> {
    let mut out = sys.clone();
    for i in 0..sys.len() {
        let (r, l) = (&sys.right[i], &sys.left[i]);
        let (nr, nl) = (vec_norm(r), vec_norm(l));
        let s = inner(l, r) / (nr * nl);
        if !(s.norm() * defect_threshold > T::one()) {
            return Err(SpectralError::NearDefective {
                index: i,
                overlap: s.norm().to_f64_lossy(),
            });
        }
        // right' = a·r̂, left' = b·l̂ with conj(b)·a·s = 1 and |a| = |b| = |s|^(-1/2)
        let mag = T::one() / s.norm().sqrt();
        let big = largest_component(r);
        let a = unit_phase(r[big]).conj().scale(mag / nr);
        let mut right = r.clone();
        scale_vec(&mut right, a);
        let b = (Complex::<T>::one() / (a * nr * s)).conj().scale(T::one() / nl);
        let mut left = l.clone();
        scale_vec(&mut left, b);
        out.right[i] = right;
        out.left[i] = left;
        out.condition[i] = T::one() / s.norm();
    }
    out.residuals = residuals_from_sys(&out, sys);
    Ok(out)
}

/// Smallest pairwise eigenvalue gap and largest condition number.
pub fn defectivity<T: Real>(sys: &EigenSystem<T>) -> DefectivityReport<T> {
    defectivity_with(sys, default_defect_threshold())
}

pub fn defectivity_with<T: Real>(sys: &EigenSystem<T>, threshold: T) -> DefectivityReport<T> {
    let n = sys.len();
    let mut min_pair_gap = T::infinity();
    for i in 0..n {
        for j in i + 1..n {
            min_pair_gap = min_pair_gap.min((sys.values[i] - sys.values[j]).norm());
        }
    }
    let max_condition = sys.condition.iter().fold(T::zero(), |a, &b| {
        if b.is_nan() {
            T::infinity()
        } else {
            a.max(b)
        }
    });
    DefectivityReport { min_pair_gap, max_condition, near_defective: max_condition > threshold }
}

fn largest_component<T: Real>(v: &[Complex<T>]) -> usize {
    let mut best = 0;
    let mut best_norm = T::neg_infinity();
    for (k, z) in v.iter().enumerate() {
        // ties go to the lower index so the gauge is deterministic
        if z.norm() > best_norm * (T::one() + T::lit(16.0) * T::epsilon()) {
            best = k;
            best_norm = z.norm();
        }
    }
    best
}

fn residuals<T: Real>(
    a: &CMatrix<T>,
    values: &[Complex<T>],
    vectors: &[Vec<Complex<T>>],
) -> Vec<T> {
    values
        .iter()
        .zip(vectors)
        .map(|(&lam, v)| {
            let av = a.mul_vec(v);
            av.iter().zip(v).map(|(&x, &y)| (x - lam * y).norm_sqr()).fold(T::zero(), |s, t| s + t).sqrt()
        })
        .collect()
}

// scaling by a scalar scales the residual by the same modulus
fn residuals_from_sys<T: Real>(scaled: &EigenSystem<T>, orig: &EigenSystem<T>) -> Vec<T> {
    scaled
        .right
        .iter()
        .zip(&orig.right)
        .zip(&orig.residuals)
        .map(|((new, old), &res)| res * vec_norm(new) / vec_norm(old))
        .collect()
}

type Eigenpairs<T> = (Vec<Complex<T>>, Vec<Vec<Complex<T>>>);

fn right_eigenpairs<T: Real>(a: &CMatrix<T>) -> Result<Eigenpairs<T>, SpectralError> {
    let (t, z) = schur(a)?;
    let n = t.dim();
    let values: Vec<_> = (0..n).map(|i| t[(i, i)]).collect();
    let smin = (T::epsilon() * t.norm_fro()).max(T::min_positive_value());
    let mut vectors = Vec::with_capacity(n);
    for k in 0..n {
        // solve (T − t_kk I) y = 0 with y_k = 1, y_j = 0 for j > k
        let mut y = vec![Complex::<T>::zero(); n];
        y[k] = Complex::one();
        for i in (0..k).rev() {
            let mut acc = Complex::<T>::zero();
            for j in i + 1..=k {
                acc = acc + t[(i, j)] * y[j];
            }
            let mut d = t[(i, i)] - values[k];
            if d.norm() < smin {
                d = Complex::new(smin, T::zero());
            }
            y[i] = -acc / d;
            // rescale to avoid overflow when denominators are tiny
            let big = y.iter().map(|z| z.norm()).fold(T::zero(), T::max);
            if big > T::one() / T::epsilon() {
                let s = Complex::new(T::one() / big, T::zero());
                scale_vec(&mut y, s);
            }
        }
        let mut x = z.mul_vec(&y);
        let nrm = vec_norm(&x);
        let big = largest_component(&x);
        let g = unit_phase(x[big]).conj().scale(T::one() / nrm);
        scale_vec(&mut x, g);
        vectors.push(x);
    }
    Ok((values, vectors))
}

fn hessenberg<T: Real>(a: &CMatrix<T>) -> (CMatrix<T>, CMatrix<T>) {
    let n = a.dim();
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let xnorm = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).fold(T::zero(), |s, t| s + t).sqrt();
        if xnorm == T::zero() {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let alpha = -unit_phase(x0).scale(xnorm);
        let mut v: Vec<Complex<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] = v[0] - alpha;
        let vn = vec_norm(&v);
        if vn == T::zero() {
            continue;
        }
        scale_vec(&mut v, Complex::new(T::one() / vn, T::zero()));
        let two = T::lit(2.0);
        // H ← P H with P = I − 2vvᴴ acting on rows k+1..n
        for j in 0..n {
            let mut s = Complex::zero();
            for (idx, i) in (k + 1..n).enumerate() {
                s = s + v[idx].conj() * h[(i, j)];
            }
            for (idx, i) in (k + 1..n).enumerate() {
                h[(i, j)] = h[(i, j)] - v[idx] * s.scale(two);
            }
        }
        // H ← H P, Q ← Q P on columns k+1..n
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let mut s = Complex::zero();
                for (idx, j) in (k + 1..n).enumerate() {
                    s = s + m[(i, j)] * v[idx];
                }
                for (idx, j) in (k + 1..n).enumerate() {
                    m[(i, j)] = m[(i, j)] - s.scale(two) * v[idx].conj();
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex::zero();
        }
    }
    (h, q)
}

struct Givens<T> {
    c: T,
    s: Complex<T>,
}

impl<T: Real> Givens<T> {
    /// Rotation mapping `(x, y)` to `(r, 0)`.
    fn new(x: Complex<T>, y: Complex<T>) -> Self {
        let (ax, ay) = (x.norm(), y.norm());
        if ay == T::zero() {
            return Self { c: T::one(), s: Complex::zero() };
        }
        if ax == T::zero() {
            return Self { c: T::zero(), s: Complex::one() };
        }
        let r = ax.hypot(ay);
        Self { c: ax / r, s: (x / ax) * y.conj() / r }
    }

    /// Rows `(k, k+1)` ← G·rows, over columns `cols`.
    fn rotate_rows(&self, m: &mut CMatrix<T>, k: usize, cols: std::ops::Range<usize>) {
        for j in cols {
            let (a, b) = (m[(k, j)], m[(k + 1, j)]);
            m[(k, j)] = a.scale(self.c) + self.s * b;
            m[(k + 1, j)] = b.scale(self.c) - self.s.conj() * a;
        }
    }

    /// Columns `(k, k+1)` ← columns·Gᴴ, over rows `rows`.
    fn rotate_cols(&self, m: &mut CMatrix<T>, k: usize, rows: std::ops::Range<usize>) {
        for i in rows {
            let (p, q) = (m[(i, k)], m[(i, k + 1)]);
            m[(i, k)] = p.scale(self.c) + q * self.s.conj();
            m[(i, k + 1)] = q.scale(self.c) - p * self.s;
        }
    }
}

fn qr_iterate<T: Real>(h: &mut CMatrix<T>, z: &mut CMatrix<T>) -> Result<(), SpectralError> {
    let n = h.dim();
    if n == 0 {
        return Ok(());
    }
    let eps = T::epsilon();
    let tiny = T::min_positive_value() / eps;
    let max_iter = 30 * n.max(1);
    let mut hi = n - 1;
    let mut iter = 0usize;
    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if diag == T::zero() {
                diag = h.norm_fro();
            }
            if sub <= eps * diag || sub < tiny {
                h[(lo, lo - 1)] = Complex::zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > max_iter {
            return Err(SpectralError::NoConvergence { indices: (0..=hi).collect() });
        }
        let mu = if iter.is_multiple_of(10) {
            // exceptional shift to break cycles
            h[(hi, hi)] + Complex::new(T::lit(0.75) * h[(hi, hi - 1)].norm(), T::zero())
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        for i in lo..=hi {
            h[(i, i)] = h[(i, i)] - mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let g = Givens::new(h[(k, k)], h[(k + 1, k)]);
            g.rotate_rows(h, k, k..n);
            h[(k + 1, k)] = Complex::zero();
            rots.push(g);
        }
        for (k, g) in (lo..hi).zip(&rots) {
            g.rotate_cols(h, k, 0..(k + 2).min(hi + 1));
            g.rotate_cols(z, k, 0..n);
        }
        for i in lo..=hi {
            h[(i, i)] = h[(i, i)] + mu;
        }
    }
    Ok(())
}

/// Eigenvalue of `[[a, b], [c, d]]` closer to `d`.
fn wilkinson_shift<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    d: Complex<T>,
) -> Complex<T> {
    let half = T::lit(0.5);
    let m = (a - d).scale(half);
    let disc = (m * m + b * c).sqrt();
    let mean = (a + d).scale(half);
    let (e1, e2) = (mean + disc, mean - disc);
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}
