//! Matrix families `H(λ) = H₀ + λ·H₁`, the two-level rotation model and sampled
//! contours in the complex λ-plane.

use num_complex::Complex;
use rand::Rng;

use crate::error::ModelError;
use crate::matrix::CMatrix;
use crate::scalar::{is_finite_c, Real};

/// One-parameter family `H(λ) = h0 + λ·h1` of complex `N×N` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixFamily<T> {
    h0: CMatrix<T>,
    h1: CMatrix<T>,
}

impl<T: Real> MatrixFamily<T> {
    pub fn new(h0: CMatrix<T>, h1: CMatrix<T>) -> Result<Self, ModelError> {
        if h0.dim() != h1.dim() {
            return Err(ModelError::DimensionMismatch { h0: h0.dim(), h1: h1.dim() });
        }
        if h0.dim() < 2 {
            return Err(ModelError::DimensionTooSmall(h0.dim()));
        }
        if !h0.is_finite() {
            return Err(ModelError::NonFinite("h0"));
        }
        if !h1.is_finite() {
            return Err(ModelError::NonFinite("h1"));
        }
        Ok(Self { h0, h1 })
    }

    pub fn dim(&self) -> usize {
        self.h0.dim()
    }

    pub fn h0(&self) -> &CMatrix<T> {
        &self.h0
    }

    pub fn h1(&self) -> &CMatrix<T> {
        &self.h1
    }

    /// Both `h0` and `h1` have zero imaginary parts.
    pub fn is_real(&self) -> bool {
        self.h0.is_real() && self.h1.is_real()
    }

    /// Materializes `h0 + λ·h1`.
    pub fn evaluate(&self, lambda: Complex<T>) -> CMatrix<T> {
        self.h0.add_scaled(lambda, &self.h1)
    }

    /// Rough magnitude of λ at which `h0` and `λ·h1` are comparable.
    pub fn lambda_scale(&self) -> T {
        let n1 = self.h1.norm_fro();
        if n1 > T::zero() {
            self.h0.norm_fro() / n1
        } else {
            T::zero()
        }
    }
}

/// Parameters `(ε₁, ε₂, ω₁, ω₂, φ)` of the two-level model
/// `H = diag(ε₁, ε₂) + λ·U(φ)·diag(ω₁, ω₂)·Uᵀ(φ)` with `U` a plane rotation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoLevelParams<T> {
    pub eps1: T,
    pub eps2: T,
    pub om1: T,
    pub om2: T,
    pub phi: T,
}

impl<T: Real> TwoLevelParams<T> {
    pub fn new(eps1: T, eps2: T, om1: T, om2: T, phi: T) -> Result<Self, ModelError> {
        if ![eps1, eps2, om1, om2, phi].iter().all(|x| x.is_finite()) {
            return Err(ModelError::NonFinite("two-level parameters"));
        }
        if eps1 == eps2 {
            return Err(ModelError::Degenerate("eps1 == eps2"));
        }
        if om1 == om2 {
            return Err(ModelError::Degenerate("om1 == om2"));
        }
        Ok(Self { eps1, eps2, om1, om2, phi })
    }

    /// `ε₁ − ε₂`
    pub fn d_eps(&self) -> T {
        self.eps1 - self.eps2
    }

    /// `ω₁ − ω₂`
    pub fn d_om(&self) -> T {
        self.om1 - self.om2
    }
}

/// Builds the `N = 2` family of the rotation-coupled two-level model.
pub fn two_level_family<T: Real>(p: &TwoLevelParams<T>) -> Result<MatrixFamily<T>, ModelError> {
    let p = TwoLevelParams::new(p.eps1, p.eps2, p.om1, p.om2, p.phi)?;
    let (s, c) = p.phi.sin_cos();
    let h0 = CMatrix::from_real_diag(&[p.eps1, p.eps2]);
    // U·diag(ω₁, ω₂)·Uᵀ with U = [[c, -s], [s, c]]
    let off = p.d_om() * s * c;
    let h1 = CMatrix::from_real_rows(&[
        vec![p.om1 * c * c + p.om2 * s * s, off],
        vec![off, p.om1 * s * s + p.om2 * c * c],
    ])?;
    MatrixFamily::new(h0, h1)
}

/// Random real-symmetric family with entries uniform in `[-1, 1]`.
pub fn random_symmetric_family<T: Real, R: Rng + ?Sized>(
    dim: usize,
    rng: &mut R,
) -> Result<MatrixFamily<T>, ModelError> {
    let sym = |rng: &mut R| {
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                let x = T::lit(rng.gen_range(-1.0..=1.0));
                m[(i, j)] = Complex::new(x, T::zero());
                m[(j, i)] = Complex::new(x, T::zero());
            }
        }
        m
    };
    let h0 = sym(rng);
    let h1 = sym(rng);
    MatrixFamily::new(h0, h1)
}

/// Pre-sampled path in the complex λ-plane.
#[derive(Clone, Debug, PartialEq)]
pub struct Contour<T> {
    points: Vec<Complex<T>>,
    closed: bool,
    winding_hint: Option<i32>,
}

impl<T: Real> Contour<T> {
    pub fn new(points: Vec<Complex<T>>, closed: bool) -> Result<Self, ModelError> {
        if points.len() < 3 {
            return Err(ModelError::InvalidContour(format!(
                "need at least 3 points, got {}",
                points.len()
            )));
        }
        if !points.iter().all(|&z| is_finite_c(z)) {
            return Err(ModelError::NonFinite("contour"));
        }
        if let Some(k) = points.windows(2).position(|w| w[0] == w[1]) {
            return Err(ModelError::InvalidContour(format!(
                "consecutive points {k} and {} coincide",
                k + 1
            )));
        }
        if closed && points.first() != points.last() {
            return Err(ModelError::InvalidContour(
                "closed contour must end exactly at its first point".into(),
            ));
        }
        Ok(Self { points, closed, winding_hint: None })
    }

    pub fn with_winding_hint(mut self, turns: i32) -> Self {
        self.winding_hint = Some(turns);
        self
    }

    pub fn points(&self) -> &[Complex<T>] {
        &self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn winding_hint(&self) -> Option<i32> {
        self.winding_hint
    }

    pub fn start(&self) -> Complex<T> {
        self.points[0]
    }

    pub fn end(&self) -> Complex<T> {
        self.points[self.points.len() - 1]
    }

    /// Diagonal of the bounding box; the length scale used for relative tolerances.
    pub fn scale(&self) -> T {
        let (mut lo_re, mut hi_re) = (T::infinity(), T::neg_infinity());
        let (mut lo_im, mut hi_im) = (T::infinity(), T::neg_infinity());
        for z in &self.points {
            lo_re = lo_re.min(z.re);
            hi_re = hi_re.max(z.re);
            lo_im = lo_im.min(z.im);
            hi_im = hi_im.max(z.im);
        }
        (hi_re - lo_re).hypot(hi_im - lo_im)
    }

    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        Self { points, closed: self.closed, winding_hint: self.winding_hint.map(|k| -k) }
    }

    /// Concatenates `self` with `next`, which must start where `self` ends.
    /// The result is closed when it returns to the start point.
    pub fn join(&self, next: &Self) -> Result<Self, ModelError> {
        if self.end() != next.start() {
            return Err(ModelError::InvalidContour("joined contours do not meet".into()));
        }
        let mut points = self.points.clone();
        points.extend_from_slice(&next.points[1..]);
        let closed = points.first() == points.last();
        Self::new(points, closed)
    }

    /// Real winding number of the polyline about `z` (sum of argument increments / 2π).
    pub fn winding_about(&self, z: Complex<T>) -> T {
        winding_number(&self.points, z)
    }

    /// Smallest distance from `z` to the polyline.
    pub fn distance_to(&self, z: Complex<T>) -> T {
        self.points
            .windows(2)
            .map(|w| segment_distance(w[0], w[1], z))
            .fold(T::infinity(), T::min)
    }
}

/// Closed circle traversed `|turns|` times; negative `turns` run clockwise.
/// `samples` is the number of intervals per revolution.
pub fn circle_contour<T: Real>(
    center: Complex<T>,
    radius: T,
    samples: usize,
    turns: i32,
) -> Result<Contour<T>, ModelError> {
    circle_contour_from(center, radius, samples, turns, T::zero())
}

/// As [`circle_contour`], starting at angle `start_angle`.
pub fn circle_contour_from<T: Real>(
    center: Complex<T>,
    radius: T,
    samples: usize,
    turns: i32,
    start_angle: T,
) -> Result<Contour<T>, ModelError> {
    if !(radius > T::zero()) || !radius.is_finite() {
        return Err(ModelError::InvalidContour("radius must be positive".into()));
    }
    if samples < 16 {
        return Err(ModelError::InvalidContour(format!(
            "need at least 16 samples per turn, got {samples}"
        )));
    }
    if turns == 0 {
        return Err(ModelError::InvalidContour("turns must be nonzero".into()));
    }
    let dir = if turns > 0 { T::one() } else { -T::one() };
    let total = samples * turns.unsigned_abs() as usize;
    let step = T::TAU() / T::lit(samples as f64);
    let first = center + Complex::from_polar(radius, start_angle);
    let points = (0..=total)
        .map(|k| {
            let j = k % samples;
            if j == 0 {
                first
            } else {
                center + Complex::from_polar(radius, start_angle + dir * step * T::lit(j as f64))
            }
        })
        .collect();
    Ok(Contour::new(points, true)?.with_winding_hint(turns))
}

/// Open quadratic arc from `start` to `end` on the real axis through `bulge`,
/// sampled uniformly in the curve parameter with `samples` intervals.
pub fn detour_path<T: Real>(
    start: T,
    end: T,
    bulge: Complex<T>,
    samples: usize,
) -> Result<Contour<T>, ModelError> {
    if !(start < end) {
        return Err(ModelError::InvalidContour("detour needs start < end".into()));
    }
    if bulge.im == T::zero() {
        return Err(ModelError::InvalidContour("detour bulge must leave the real axis".into()));
    }
    if samples < 2 {
        return Err(ModelError::InvalidContour("detour needs at least 2 intervals".into()));
    }
    let p0 = Complex::new(start, T::zero());
    let p2 = Complex::new(end, T::zero());
    let half = T::lit(0.5);
    // control point so that the arc passes through `bulge` at t = 1/2
    let p1 = bulge.scale(T::lit(2.0)) - (p0 + p2).scale(half);
    let n = T::lit(samples as f64);
    let points = (0..=samples)
        .map(|k| {
            if k == 0 {
                return p0;
            }
            if k == samples {
                return p2;
            }
            let t = T::lit(k as f64) / n;
            let u = T::one() - t;
            p0.scale(u * u) + p1.scale(T::lit(2.0) * t * u) + p2.scale(t * t)
        })
        .collect();
    Contour::new(points, false)
}

/// Open straight segment with `samples` intervals.
pub fn segment<T: Real>(
    start: Complex<T>,
    end: Complex<T>,
    samples: usize,
) -> Result<Contour<T>, ModelError> {
    if samples < 2 {
        return Err(ModelError::InvalidContour("segment needs at least 2 intervals".into()));
    }
    let n = T::lit(samples as f64);
    let points = (0..=samples)
        .map(|k| match k {
            0 => start,
            k if k == samples => end,
            k => start + (end - start).scale(T::lit(k as f64) / n),
        })
        .collect();
    Contour::new(points, false)
}

/// Sum of argument increments of `(p_k − z)` over the polyline, divided by 2π.
pub fn winding_number<T: Real>(points: &[Complex<T>], z: Complex<T>) -> T {
    let total = points
        .windows(2)
        .map(|w| ((w[1] - z) / (w[0] - z)).arg())
        .fold(T::zero(), |a, b| a + b);
    total / T::TAU()
}

fn segment_distance<T: Real>(a: Complex<T>, b: Complex<T>, z: Complex<T>) -> T {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2.is_zero() {
        return (z - a).norm();
    }
    let t = ((z - a) * ab.conj()).re / len2;
    let t = t.max(T::zero()).min(T::one());
    (a + ab.scale(t) - z).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn reference_pair(phi: f64) -> TwoLevelParams<f64> {
        TwoLevelParams::new(1.0, 2.0, 2.0, -1.0, phi).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn two_level_at_zero_angle_is_diagonal() {
        let f = two_level_family(&reference_pair(0.0)).unwrap();
        assert_eq!(f.h1(), &CMatrix::from_real_diag(&[2.0, -1.0]));
        assert_eq!(f.h0(), &CMatrix::from_real_diag(&[1.0, 2.0]));
    }

    #[test]
    fn two_level_off_diagonal_coupling() {
        let phi = PI / 25.0;
        let f = two_level_family(&reference_pair(phi)).unwrap();
        let expect = 3.0 * phi.sin() * phi.cos();
        assert!((f.h1()[(0, 1)].re - expect).abs() < 1e-15);
        assert_eq!(f.h1()[(0, 1)], f.h1()[(1, 0)]);
    }

    #[test]
    fn two_level_equal_coupling_angle() {
        let f = two_level_family(&reference_pair(PI / 4.0)).unwrap();
        let expect = CMatrix::from_real_rows(&[vec![0.5, 1.5], vec![1.5, 0.5]]).unwrap();
        assert!(f.h1().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn degenerate_two_level_rejected() {
        assert_eq!(
            TwoLevelParams::new(1.0, 1.0, 2.0, -1.0, 0.1),
            Err(ModelError::Degenerate("eps1 == eps2"))
        );
        assert_eq!(
            TwoLevelParams::new(1.0, 2.0, 2.0, 2.0, 0.1),
            Err(ModelError::Degenerate("om1 == om2"))
        );
        let bad = TwoLevelParams { eps1: 1.0, eps2: 2.0, om1: 3.0, om2: 3.0, phi: 0.0 };
        assert!(two_level_family(&bad).is_err());
    }

    #[test]
    fn evaluate_special_values() {
        let f = two_level_family(&reference_pair(PI / 25.0)).unwrap();
        assert_eq!(f.evaluate(c(0.0, 0.0)), *f.h0());

        let diag = two_level_family(&reference_pair(0.0)).unwrap();
        let m = diag.evaluate(c(0.7, 0.0));
        let expect = CMatrix::from_real_diag(&[1.0 + 0.7 * 2.0, 2.0 - 0.7]);
        assert!(m.max_abs_diff(&expect) < 1e-15);

        let g = MatrixFamily::new(f.h0().clone(), CMatrix::identity(2)).unwrap();
        let m = g.evaluate(c(0.0, 1.0));
        let expect = f.h0().add_scaled(c(0.0, 1.0), &CMatrix::identity(2));
        assert_eq!(m, expect);
    }

    #[test]
    fn family_validation() {
        let a = CMatrix::<f64>::identity(2);
        let b = CMatrix::<f64>::identity(3);
        assert!(matches!(MatrixFamily::new(a.clone(), b), Err(ModelError::DimensionMismatch { .. })));
        assert!(matches!(
            MatrixFamily::new(CMatrix::<f64>::identity(1), CMatrix::identity(1)),
            Err(ModelError::DimensionTooSmall(1))
        ));
        let mut nan = a.clone();
        nan[(0, 1)] = c(f64::NAN, 0.0);
        assert_eq!(MatrixFamily::new(a, nan), Err(ModelError::NonFinite("h1")));
    }

    #[test]
    fn circle_contour_shape() {
        let circ = circle_contour(c(0.0, 0.0), 1.0, 64, 1).unwrap();
        assert_eq!(circ.points().len(), 65);
        assert!(circ.is_closed());
        assert_eq!(circ.start(), circ.end());
        assert_eq!(circ.winding_hint(), Some(1));
        assert!(circ.points().iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));

        let double = circle_contour(c(0.3, 0.1), 0.1, 32, 2).unwrap();
        assert_eq!(double.points()[32], double.start());
        assert!(circle_contour(c(0.0, 0.0), 1.0, 15, 1).is_err());
        assert!(circle_contour(c(0.0, 0.0), 0.0, 64, 1).is_err());
        assert!(circle_contour(c(0.0, 0.0), 1.0, 64, 0).is_err());
    }

    #[test]
    fn circle_winding_counts_turns() {
        for turns in [-3, -1, 1, 2, 4] {
            let circ = circle_contour(c(1.0, -2.0), 0.5, 40, turns).unwrap();
            let w = circ.winding_about(c(1.0, -2.0));
            assert!((w - turns as f64).abs() < 1e-12, "turns {turns}: {w}");
            assert!(circ.winding_about(c(5.0, 0.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn detour_encloses_off_axis_points() {
        let straight = segment(c(0.0, 0.0), c(10.0, 0.0), 20).unwrap();
        for (bulge, sign) in [(c(5.0, 2.0), 1.0), (c(5.0, -2.0), -1.0)] {
            let detour = detour_path(0.0, 10.0, bulge, 64).unwrap();
            assert_eq!(detour.start(), c(0.0, 0.0));
            assert_eq!(detour.end(), c(10.0, 0.0));
            assert!(detour.points().iter().all(|z| z.im * sign >= 0.0));
            let mid = detour.points()[32];
            assert!((mid - bulge).norm() < 1e-12);
            let lp = straight.join(&detour.reversed()).unwrap();
            assert!(lp.is_closed());
            // inside the region between the two paths
            let w = lp.winding_about(c(5.0, 0.5 * sign)).round();
            assert_eq!(w.abs(), 1.0);
            assert_eq!(lp.winding_about(c(5.0, -0.5 * sign)).round(), 0.0);
        }
        assert!(detour_path(0.0, 10.0, c(5.0, 0.0), 64).is_err());
        assert!(detour_path(10.0, 0.0, c(5.0, 1.0), 64).is_err());
    }

    #[test]
    fn contour_validation() {
        let p = vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        assert!(Contour::new(p, true).is_err());
        let p = vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0)];
        assert!(Contour::new(p.clone(), true).is_err());
        assert!(Contour::new(p, false).is_ok());
        assert!(Contour::new(vec![c(0.0, 0.0), c(1.0, 0.0)], false).is_err());
    }

    proptest! {
        #[test]
        fn evaluate_is_affine(
            a in -2.0f64..2.0,
            l1 in (-3.0f64..3.0, -3.0f64..3.0),
            l2 in (-3.0f64..3.0, -3.0f64..3.0),
            entries in proptest::collection::vec(-1.0f64..1.0, 16),
        ) {
            let mk = |off: usize| CMatrix::from_rows(vec![
                vec![c(entries[off], entries[off + 1]), c(entries[off + 2], entries[off + 3])],
                vec![c(entries[off + 4], entries[off + 5]), c(entries[off + 6], entries[off + 7])],
            ]).unwrap();
            let f = MatrixFamily::new(mk(0), mk(8)).unwrap();
            let (l1, l2) = (c(l1.0, l1.1), c(l2.0, l2.1));
            let mixed = f.evaluate(l1.scale(a) + l2.scale(1.0 - a));
            let combo = f.evaluate(l1).scale(c(a, 0.0)).add_scaled(c(1.0 - a, 0.0), &f.evaluate(l2));
            prop_assert!(mixed.max_abs_diff(&combo) < 1e-13);
        }

        #[test]
        fn two_level_coupling_has_spectrum_om(
            om1 in -5.0f64..5.0, om2 in -5.0f64..5.0, phi in -3.2f64..3.2,
        ) {
            prop_assume!((om1 - om2).abs() > 1e-3);
            let p = TwoLevelParams::new(1.0, -1.0, om1, om2, phi).unwrap();
            let h1 = two_level_family(&p).unwrap().h1().clone();
            prop_assert_eq!(h1[(0, 1)], h1[(1, 0)]);
            // 2x2 symmetric: tr/2 ± sqrt(((a-d)/2)² + b²)
            let tr = h1.trace().re;
            let half_diff = (h1[(0, 0)] - h1[(1, 1)]).re / 2.0;
            let disc = half_diff.hypot(h1[(0, 1)].re);
            let (hi, lo) = (tr / 2.0 + disc, tr / 2.0 - disc);
            prop_assert!((hi - om1.max(om2)).abs() < 1e-12);
            prop_assert!((lo - om1.min(om2)).abs() < 1e-12);
        }
    }
}
