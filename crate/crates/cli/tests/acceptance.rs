//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use clap::Parser;
use epx::analytic2::{absorption_ep, eigenvalues_closed, exceptional_points_closed, lambda_from_absorption};
use epx::locator::locate_eps;
use epx::matrix::inner;
use epx::model::{circle_contour, circle_contour_from, detour_path, random_symmetric_family, segment, two_level_family};
use epx::spectral::{biorthonormalize, eigensystem, eigenvalues};
use epx::tracer::{component_blowup, energy_closure, monodromy, sheet_comparison, tan_theta_of, trace, MonodromyMatrix, Track};
use epx::{Complex64 as C, Family, Matrix, Params};
use epx_cli::args::Command;
use epx_cli::commands::{cmd_scan, cmd_trace};
use epx_cli::Cli;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn reference_pair() -> (Params, Family) {
    let p = Params::new(1.0, 2.0, 2.0, -1.0, PI / 25.0).unwrap();
    let f = two_level_family(&p).unwrap();
    (p, f)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn upper_ep(p: &Params) -> C {
    let pair = exceptional_points_closed(p);
    if pair.plus.im > 0.0 {
        pair.plus
    } else {
        pair.minus
    }
}

fn minus_identity(n: usize) -> MonodromyMatrix<f64> {
    MonodromyMatrix { m: Matrix::identity(n).scale(C::new(-1.0, 0.0)) }
}

fn nearest(list: &[C], z: C) -> f64 {
    list.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min)
}

fn criterion_1() -> Outcome {
    let (_, f) = reference_pair();
    let eps = locate_eps(&f).map_err(|e| e.to_string())?;
    let exact = [C::from_polar(1.0 / 3.0, 2.0 * PI / 25.0), C::from_polar(1.0 / 3.0, -2.0 * PI / 25.0)];
    let found: Vec<C> = eps.iter().map(|e| e.lambda_c).collect();
    let err = exact.iter().map(|z| nearest(&found, *z) / z.norm()).fold(0.0, f64::max);
    check(found.len() == 2 && err <= 1e-8, format!("{} EPs, max relative error {err:.2e}", found.len()))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst_e, mut worst_ep) = (0.0f64, 0.0f64);
    let mut done = 0;
    while done < 1000 {
        let mut pick = || rng.gen_range(-2.0f64..2.0);
        let (e1, e2, o1, o2) = (pick(), pick(), pick(), pick());
        if (e1 - e2).abs() < 0.1 || (o1 - o2).abs() < 0.1 {
            continue;
        }
        let phi = rng.gen_range(0.0..PI);
        let p = Params::new(e1, e2, o1, o2, phi).unwrap();
        let f = two_level_family(&p).unwrap();
        let eps = exceptional_points_closed(&p);
        // sample points kept off the branch points, where the spectrum itself is ill-conditioned
        let lambda = loop {
            let z = C::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            if (z - eps.plus).norm() > 0.05 && (z - eps.minus).norm() > 0.05 {
                break z;
            }
        };
        let (a, b) = eigenvalues_closed(&p, lambda);
        let num = eigenvalues(&f.evaluate(lambda)).map_err(|e| e.to_string())?;
        let scale = a.norm().max(b.norm()).max(1.0);
        worst_e = worst_e.max(nearest(&num, a) / scale).max(nearest(&num, b) / scale);
        let found: Vec<C> = locate_eps(&f).map_err(|e| e.to_string())?.iter().map(|e| e.lambda_c).collect();
        for z in [eps.plus, eps.minus] {
            worst_ep = worst_ep.max(nearest(&found, z) / z.norm());
        }
        done += 1;
    }
    check(
        worst_e <= 1e-10 && worst_ep <= 1e-8,
        format!("1000 families: eigenvalue rel err {worst_e:.2e}, EP rel err {worst_ep:.2e}"),
    )
}

fn criterion_3() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().to_str().unwrap();
    let cli = Cli::try_parse_from(["epx", "scan", "--two-level", "1,2,2,-1,pi/25", "--range=-2,2", "--samples", "400", "--out", out])
        .map_err(|e| e.to_string())?;
    let Command::Scan(args) = cli.command else { unreachable!() };
    let s = cmd_scan(&args).map_err(|e| e.to_string())?;
    let expected = (2.0 * PI / 25.0).sin();
    let err = (s.min_gap - expected).abs();
    check(err <= 1e-6, format!("min gap {:.12} vs {expected:.12}, error {err:.2e}", s.min_gap))
}

fn criterion_4() -> Outcome {
    let (p, f) = reference_pair();
    let far = circle_contour(C::new(2.0, 0.5), 0.3, 200, 1).unwrap();
    let t = trace(&f, &far, &Track::All).map_err(|e| e.to_string())?;
    let r_far = energy_closure(&t, &far, 1e-8);
    let around = circle_contour(upper_ep(&p), 0.05, 200, 2).unwrap();
    let t = trace(&f, &around, &Track::All).map_err(|e| e.to_string())?;
    let r = energy_closure(&t, &around, 1e-8);
    let (m1, m2) = (r.mismatch[0], r.mismatch[1]);
    let ok = r_far.closure_after_revolutions == Some(1)
        && r_far.mismatch[0] <= r_far.tolerance
        && r.closure_after_revolutions == Some(2)
        && m1 >= 1e3 * m2
        && m1 > r.tolerance;
    check(
        ok,
        format!(
            "no EP: mismatch {:.1e} (tol {:.1e}); one EP: after 1 rev {m1:.2e}, after 2 revs {m2:.1e}",
            r_far.mismatch[0], r_far.tolerance
        ),
    )
}

fn criterion_5() -> Outcome {
    let (p, f) = reference_pair();
    let ep = upper_ep(&p);
    let run = |turns| {
        monodromy(&f, &circle_contour(ep, 0.05, 200, turns).unwrap()).map(|r| r.matrix()).map_err(|e| e.to_string())
    };
    let m = run(1)?;
    let is_transposition = m.m[(0, 0)].norm() < 1e-6
        && m.m[(1, 1)].norm() < 1e-6
        && (m.m[(0, 1)].norm() - 1.0).abs() < 1e-6
        && (m.m[(1, 0)].norm() - 1.0).abs() < 1e-6;
    let d2 = m.pow(2).max_abs_diff(&minus_identity(2));
    let d4 = m.pow(4).distance_to_scalar(C::new(1.0, 0.0));
    let t2 = run(2)?.max_abs_diff(&m.pow(2));
    let t4 = run(4)?.distance_to_scalar(C::new(1.0, 0.0));
    check(
        is_transposition && d2 <= 1e-6 && d4 <= 1e-6 && t2 <= 1e-6 && t4 <= 1e-6,
        format!("|M²+I| {d2:.1e}, |M⁴-I| {d4:.1e}, traced turns=2 vs M² {t2:.1e}, traced turns=4 vs I {t4:.1e}"),
    )
}

fn criterion_6() -> Outcome {
    let (p, f) = reference_pair();
    let l = 1e8;
    let straight = segment(C::new(0.0, 0.0), C::new(l, 0.0), 200).unwrap();
    let above = detour_path(0.0, l, C::new(l / 2.0, l / 5.0), 200).unwrap();
    let rep = sheet_comparison(&f, &straight, &above).map_err(|e| e.to_string())?;
    let one_flip = (rep.phases[0] * rep.phases[1] + C::new(1.0, 0.0)).norm() < 1e-6;
    let (tan_phi, neg_cot) = (p.phi.tan(), -1.0 / p.phi.tan());
    let a = tan_theta_of(&rep.below.last().right[0]);
    let b = tan_theta_of(&rep.above.last().right[0]);
    let (ea, eb) = ((a - C::new(neg_cot, 0.0)).norm(), (b - C::new(tan_phi, 0.0)).norm());
    check(
        rep.exchanged && one_flip && ea <= 1e-6 && eb <= 1e-6,
        format!("exchange {}, straight tan θ err {ea:.1e} (−cot φ), detour tan θ err {eb:.1e} (tan φ)", rep.exchanged),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut worst_conj = 0.0f64;
    for seed in 0..20u64 {
        let n = if seed % 2 == 0 { 3 } else { 4 };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_symmetric_family::<f64, _>(n, &mut rng).unwrap();
        let eps = locate_eps(&f).map_err(|e| e.to_string())?;
        let count: usize = eps.iter().map(|e| e.multiplicity).sum();
        if count != n * (n - 1) {
            return Err(format!("seed {seed}, N={n}: {count} EPs"));
        }
        let found: Vec<C> = eps.iter().map(|e| e.lambda_c).collect();
        for z in &found {
            worst_conj = worst_conj.max(nearest(&found, z.conj()) / z.norm().max(1.0));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(worst_conj <= 1e-9 && secs <= 60.0, format!("20 families, conjugation error {worst_conj:.1e}, {secs:.2} s"))
}

fn criterion_8() -> Outcome {
    let (p, f) = reference_pair();
    let d: Vec<f64> = (0..=16).map(|k| 10f64.powf(-2.0 - 0.25 * k as f64)).collect();
    let prof = component_blowup(&f, upper_ep(&p), C::new(1.0, 0.0), &d).map_err(|e| e.to_string())?;
    check(prof.slope >= -0.30 && prof.slope <= -0.20, format!("fitted exponent {:.4}", prof.slope))
}

fn criterion_9() -> Outcome {
    let q = PI / 4.0;
    let p = Params::new(1.0, 2.0, 2.0, -1.0, q).unwrap();
    let pair = absorption_ep(&p);
    let expected = (p.eps1 - p.eps2) / (p.om1 - p.om2);
    let real = pair.plus.im.abs() < 1e-12 && pair.minus.im.abs() < 1e-12;
    let values_ok = nearest(&[pair.plus, pair.minus], C::new(expected, 0.0)) < 1e-12
        && nearest(&[pair.plus, pair.minus], C::new(-expected, 0.0)) < 1e-12;
    let f = two_level_family(&p).unwrap();
    let mut cond: f64 = f64::INFINITY;
    for g in [pair.plus, pair.minus] {
        let sys = eigensystem(&f.evaluate(lambda_from_absorption(C::new(g.re, 0.0)))).map_err(|e| e.to_string())?;
        cond = cond.min(sys.condition.iter().copied().fold(0.0, f64::max));
    }
    let im = |phi| absorption_ep(&Params::new(1.0, 2.0, 2.0, -1.0, phi).unwrap()).plus.im;
    let (below, above) = (im(q - 0.01), im(q + 0.01));
    check(
        real && values_ok && cond > 1e6 && below * above < 0.0,
        format!("G_c = ±{:.6}, condition {cond:.2e}, Im G_c {below:.2e} / {above:.2e}", expected.abs()),
    )
}

fn criterion_10() -> Outcome {
    let (p, f) = reference_pair();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    // trace-sum conservation along a trajectory
    let c = circle_contour(upper_ep(&p), 0.05, 200, 2).unwrap();
    let t = trace(&f, &c, &Track::All).map_err(|e| e.to_string())?;
    let trace_err = t
        .lambda_samples
        .iter()
        .zip(&t.values)
        .map(|(&l, e)| (e.iter().sum::<C>() - f.evaluate(l).trace()).norm())
        .fold(0.0, f64::max);
    // biorthogonality of random complex matrices
    let mut bio_err = 0.0f64;
    for n in 2..=8 {
        let g = random_symmetric_family::<f64, _>(n, &mut rng).unwrap();
        let l = C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let sys = biorthonormalize(&eigensystem(&g.evaluate(l)).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                bio_err = bio_err.max((inner(&sys.left[i], &sys.right[j]) - C::new(want, 0.0)).norm());
            }
        }
    }
    // start-point invariance of monodromy invariants
    let mut gauge_err = 0.0f64;
    let mats: Vec<_> = [0.0, 2.0, 4.5]
        .iter()
        .map(|&a| monodromy(&f, &circle_contour_from(upper_ep(&p), 0.05, 200, 1, a).unwrap()).map(|r| r.matrix()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    for m in &mats[1..] {
        gauge_err = gauge_err
            .max((m.trace() - mats[0].trace()).norm())
            .max((m.determinant() - mats[0].determinant()).norm())
            .max(m.pow(2).max_abs_diff(&mats[0].pow(2)))
            .max(m.pow(4).max_abs_diff(&mats[0].pow(4)));
    }
    // byte-identical CLI outputs
    let dirs = [tempfile::tempdir().map_err(|e| e.to_string())?, tempfile::tempdir().map_err(|e| e.to_string())?];
    for d in &dirs {
        let out = d.path().to_str().unwrap();
        let cli = Cli::try_parse_from(["epx", "trace", "--random-symmetric", "3", "--seed", "9", "--circle", "0,0.1,3,200,1", "--out", out])
            .map_err(|e| e.to_string())?;
        let Command::Trace(args) = cli.command else { unreachable!() };
        cmd_trace(&args).map_err(|e| e.to_string())?;
    }
    let same = ["trajectory.csv", "monodromy.json", "family.json", "trace.json"].iter().all(|name| {
        std::fs::read(dirs[0].path().join(name)).ok() == std::fs::read(dirs[1].path().join(name)).ok()
    });
    check(
        trace_err <= 1e-10 && bio_err <= 1e-10 && gauge_err <= 1e-6 && same,
        format!("trace sum {trace_err:.1e}, biorthogonality {bio_err:.1e}, start-point spread {gauge_err:.1e}, deterministic outputs {same}"),
    )
}

fn main() {
    let criteria: [(usize, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut failed = 0;
    for (n, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n}: PASS ({detail}; {secs:.2} s)"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n}: FAIL ({detail}; {secs:.2} s)");
            }
        }
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
