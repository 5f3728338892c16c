use super::*;
use crate::paths::{approximate, sample_path, Approximation, PathEnsembleSpec, PathKind};
use proptest::prelude::*;
use std::f64::consts::PI;

fn periodic(n: usize, f: impl Fn(f64) -> f64) -> GridFn1<f64> {
    GridFn1::from_fn(0.0, 2.0 * PI / n as f64, n, Boundary::Periodic, f).unwrap()
}

// Periodised Gaussian of variance `var` centred at π, scaled to keep its mass.
fn wrapped_gaussian(x: f64, var: f64, mass: f64) -> f64 {
    (-4..=4)
        .map(|k| {
            let d = x - PI + 2.0 * PI * k as f64;
            (-d * d / (2.0 * var)).exp()
        })
        .sum::<f64>()
        * mass
        / (2.0 * PI * var).sqrt()
}

fn brownian(seed: u64) -> Path<f64> {
    sample_path(&PathEnsembleSpec::new(seed, 1.0, 1024, PathKind::Brownian)).unwrap()
}

#[test]
fn zero_coefficient_flow_is_identity() {
    let t = flow_solve(&NoiseCoefficient::Zero, (-1.0, 1.0), 21, (-0.5, 0.5), 1e-2).unwrap();
    for j in 0..t.ns {
        for i in 0..t.nv {
            let k = j * t.nv + i;
            assert_eq!((t.phi[k], t.d1[k], t.d2[k]), (t.v(i), 1.0, 0.0));
        }
    }
}

#[test]
fn linear_coefficient_flow_is_exponential() {
    let t: FlowTable<f64> =
        flow_solve(&NoiseCoefficient::Linear { c: 1.0 }, (-2.0, 2.0), 41, (-1.0, 1.0), 1e-3).unwrap();
    let zero = t.slice(0.0).unwrap();
    assert!(zero.phi.iter().enumerate().all(|(i, &p)| p == t.v(i)));
    for j in 0..t.ns {
        let s = t.s(j);
        for i in 0..t.nv {
            let k = j * t.nv + i;
            assert!((t.phi[k] - t.v(i) * s.exp()).abs() < 1e-10);
            assert!((t.d1[k] - s.exp()).abs() < 1e-10);
            assert!(t.d2[k].abs() < 1e-10);
        }
    }
    let sl = t.slice(0.43217).unwrap();
    let (p, d1, _) = sl.eval(0.777).unwrap();
    assert!((p - 0.777 * 0.43217f64.exp()).abs() < 1e-9);
    assert!((d1 - 0.43217f64.exp()).abs() < 1e-9);
}

#[test]
fn sine_flow_converges_under_step_halving_and_stays_monotone() {
    let h = NoiseCoefficient::Sine { amp: 1.0f64 };
    let a: FlowTable<f64> = flow_solve(&h, (-3.0, 3.0), 31, (-1.0, 1.0), 1e-2).unwrap();
    let b: FlowTable<f64> = flow_solve(&h, (-3.0, 3.0), 31, (-1.0, 1.0), 5e-3).unwrap();
    let mut gap: f64 = 0.0;
    for j in 0..a.ns {
        let jb = 2 * j;
        assert!((a.s(j) - b.s(jb)).abs() < 1e-12);
        for i in 0..a.nv {
            gap = gap.max((a.phi[j * a.nv + i] - b.phi[jb * b.nv + i]).abs());
            gap = gap.max((a.d1[j * a.nv + i] - b.d1[jb * b.nv + i]).abs());
        }
    }
    assert!(gap < 1e-8, "{gap}");
    for j in 0..b.ns {
        assert!(b.phi[j * b.nv..(j + 1) * b.nv].windows(2).all(|w| w[1] > w[0]));
    }
}

#[test]
fn flow_property_within_table_tolerance() {
    let t = flow_solve(&NoiseCoefficient::Sine { amp: 1.0 }, (-4.0, 4.0), 401, (-1.0, 1.0), 1e-3).unwrap();
    for &(s1, s2) in &[(0.3, 0.4), (-0.45, 0.2), (0.5, -0.9)] {
        let (a, b, c) = (t.slice(s1).unwrap(), t.slice(s2).unwrap(), t.slice(s1 + s2).unwrap());
        for k in 0..20 {
            let v = -2.0 + 0.2 * k as f64;
            let two = b.eval(a.eval(v).unwrap().0).unwrap().0;
            assert!((two - c.eval(v).unwrap().0).abs() < 1e-8, "{s1} {s2} {v}");
        }
    }
}

#[test]
fn exploding_flow_is_degenerate() {
    let r = flow_solve(&NoiseCoefficient::Linear { c: 1000.0 }, (-1.0, 1.0), 5, (0.0, 1.0), 1e-3);
    assert!(matches!(r, Err(Error::FlowDegenerate(_))));
}

#[test]
fn lookups_outside_the_table_are_refused() {
    let t = flow_solve(&NoiseCoefficient::Linear { c: 1.0 }, (-1.0, 1.0), 5, (-0.1, 0.1), 1e-2).unwrap();
    assert!(t.slice(0.5).is_err());
    assert!(t.slice(0.05).unwrap().eval(3.0).is_err());
}

#[test]
fn heat_with_linear_noise_transforms_to_heat() {
    let t: FlowTable<f64> =
        flow_solve(&NoiseCoefficient::Linear { c: 1.0 }, (-2.0, 2.0), 41, (-2.0, 2.0), 1e-3).unwrap();
    let p = transform(&Operator::Laplacian { nu: 0.3 }, t).unwrap();
    for &(x, q, v, s) in
        &[(0.0f64, 0.0, 0.0, 0.0), (1.0, 2.0, 0.5, 1.3), (-3.0, 0.1, -1.2, -1.7), (0.25, -4.0, 0.0, 0.0)]
    {
        let f = p.eval(x, q, v, s).unwrap();
        assert!((f - 0.3 * x).abs() <= 1e-12 * (1.0 + x.abs()), "{f}");
    }
    let z = transform(&Operator::Zero, p.flow.clone()).unwrap();
    assert_eq!(z.eval(3.0, -2.0, 1.0, 0.7).unwrap(), 0.0);
}

#[test]
fn structure_audit_of_linear_forms_is_box_independent() {
    for op in [
        Operator::Laplacian { nu: 0.5 },
        Operator::Max(LinearForm::new(1.0, 0.5, 0.0), LinearForm::new(0.2, -1.0, 0.0)),
    ] {
        let small = structure_audit(&op, 1.0, 21);
        let big = structure_audit(&op, 100.0, 21);
        assert!(small.one_sided_constant() < 1e-6 && big.one_sided_constant() < 1e-6);
    }
    // intercepts shift the quantity to −c on each piece
    let op = Operator::Min(LinearForm::new(1.0, 0.0, 2.0), LinearForm::new(0.5, 1.0, -1.0));
    let a: StructureAudit<f64> = structure_audit(&op, 10.0, 41);
    assert!((a.upper - 1.0).abs() < 1e-6 && (a.lower + 2.0).abs() < 1e-6, "{a:?}");
    assert!((a.one_sided_constant() - 1.0).abs() < 1e-6);
}

#[test]
fn negative_diffusion_is_rejected() {
    assert!(Operator::Laplacian { nu: -1.0 }.validate().is_err());
    let u0 = periodic(16, f64::sin);
    let r = solve_semilinear(
        &Operator::Laplacian { nu: -1.0 },
        &NoiseCoefficient::Zero,
        &Path::zero(1.0, 1).unwrap(),
        &u0,
        0.1,
        &SemilinearMesh::default(),
    );
    assert!(r.is_err());
}

#[test]
fn needs_a_periodic_grid() {
    let u0 = GridFn1::on_interval(0.0, 1.0, 11, Boundary::LinearExtension, |x| x).unwrap();
    let r = solve_semilinear(
        &Operator::Laplacian { nu: 1.0 },
        &NoiseCoefficient::Zero,
        &Path::zero(1.0, 1).unwrap(),
        &u0,
        0.1,
        &SemilinearMesh::default(),
    );
    assert!(matches!(r, Err(Error::Precondition(_))));
}

#[test]
fn oversized_time_step_is_refused() {
    let u0 = periodic(32, f64::sin);
    let mesh = SemilinearMesh { dt: Some(0.1), ..Default::default() };
    let r = solve_semilinear(&Operator::Laplacian { nu: 1.0 }, &NoiseCoefficient::Zero, &brownian(1), &u0, 0.5, &mesh);
    assert!(matches!(r, Err(Error::Cfl { block: 0, .. })), "{r:?}");
}

#[test]
fn zero_noise_is_the_explicit_heat_scheme() {
    let u0 = periodic(64, |x| (x.sin() + 0.3 * (3.0 * x).cos()).abs());
    let nu = 0.4;
    let run = semilinear_run(
        &Operator::Laplacian { nu },
        &NoiseCoefficient::Zero,
        &brownian(3),
        &u0,
        0.5,
        &SemilinearMesh::default(),
    )
    .unwrap();
    let mut v = u0.values.clone();
    let n = v.len();
    let lam = nu * run.dt / (u0.step * u0.step);
    for _ in 1..run.times.len() {
        v = (0..n).map(|i| v[i] + lam * (v[(i + 1) % n] - 2.0 * v[i] + v[(i + n - 1) % n])).collect();
    }
    let gap = run.last().values.iter().zip(&v).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(gap < 1e-13, "{gap}");
}

#[test]
fn linear_noise_matches_the_exponential_heat_solution() {
    let (nu, t_end, var, mass) = (0.5, 1.0, 0.25, 2.0);
    let path = brownian(11);
    let bt = path.eval(0, t_end).unwrap();
    let mut errs = vec![];
    for n in [64, 128] {
        let u0 = periodic(n, |x| wrapped_gaussian(x, var, mass));
        let u = solve_semilinear(
            &Operator::Laplacian { nu },
            &NoiseCoefficient::Linear { c: 1.0 },
            &path,
            &u0,
            t_end,
            &SemilinearMesh::default(),
        )
        .unwrap();
        let err = (0..n)
            .map(|i| (u.values[i] - bt.exp() * wrapped_gaussian(u.x(i), var + 2.0 * nu * t_end, mass)).abs())
            .fold(0.0, f64::max);
        assert!(err <= 10.0 * u0.step, "n = {n}: {err}");
        errs.push(err);
    }
    // second order in h
    assert!(errs[0] / errs[1] > 3.0, "{errs:?}");
}

#[test]
fn mollified_drivers_form_a_cauchy_family() {
    let path = brownian(5);
    let u0 = periodic(64, |x| x.sin() + 0.5 * (2.0 * x).cos());
    let run = |eps: f64| {
        let p = approximate(&path, Approximation::Mollify(eps)).unwrap();
        let mesh = SemilinearMesh { dt: Some(0.008), ..Default::default() };
        semilinear_run(&Operator::Laplacian { nu: 0.2 }, &NoiseCoefficient::Sine { amp: 1.0 }, &p, &u0, 1.0, &mesh)
            .unwrap()
    };
    let runs: Vec<_> = [0.08, 0.04, 0.02, 0.01].iter().map(|&e| run(e)).collect();
    let d: Vec<f64> = runs.windows(2).map(|w| w[0].sup_distance(&w[1]).unwrap()).collect();
    assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
}

#[test]
fn heat_flow_lipschitz_constant_decreases() {
    let u0 = periodic(64, |x| (x - PI).abs());
    let run = semilinear_run(
        &Operator::Laplacian { nu: 0.3 },
        &NoiseCoefficient::Zero,
        &brownian(2),
        &u0,
        1.0,
        &SemilinearMesh::default(),
    )
    .unwrap();
    let audit = lipschitz_bound_audit(&run);
    assert!(audit.is_nonincreasing(1e-12));
    assert!(audit.bound <= audit.lipschitz[0] * (1.0 + 1e-12));
    assert!(*audit.lipschitz.last().unwrap() < 0.99);
}

#[test]
fn linear_noise_lipschitz_bound() {
    let path = brownian(4);
    let u0 = periodic(128, |x| x.sin() + 0.25 * (3.0 * x).sin());
    let run = semilinear_run(
        &Operator::Laplacian { nu: 0.3 },
        &NoiseCoefficient::Linear { c: 1.0 },
        &path,
        &u0,
        1.0,
        &SemilinearMesh::default(),
    )
    .unwrap();
    let (m, lo) = path.running_extrema(1.0).unwrap();
    let big = m.abs().max(lo.abs());
    let audit = lipschitz_bound_audit(&run);
    assert!(audit.bound <= big.exp() * u0.lipschitz() * (1.0 + 1e-9), "{} {}", audit.bound, big.exp() * u0.lipschitz());
}

#[test]
fn sine_noise_lipschitz_bound_is_stable_under_refinement() {
    let path = brownian(8);
    let bound = |n: usize| {
        let u0 = periodic(n, |x| x.sin() + 0.3 * (2.0 * x).cos());
        let run = semilinear_run(
            &Operator::Laplacian { nu: 0.2 },
            &NoiseCoefficient::Sine { amp: 1.0 },
            &path,
            &u0,
            1.0,
            &SemilinearMesh::default(),
        )
        .unwrap();
        lipschitz_bound_audit(&run).bound
    };
    let (a, b) = (bound(64), bound(128));
    assert!(a.is_finite() && ((a - b) / b).abs() < 0.05, "{a} {b}");
}

#[test]
fn max_form_without_noise_obeys_the_maximum_principle() {
    let u0 = periodic(64, |x| x.cos());
    let op = Operator::Max(LinearForm::new(0.3, 0.5, 0.0), LinearForm::new(0.1, -0.5, 0.0));
    let u = solve_semilinear(&op, &NoiseCoefficient::Zero, &brownian(9), &u0, 0.5, &SemilinearMesh::default()).unwrap();
    assert!(u.max() <= u0.max() && u.min() >= u0.min());
    assert!(u.max() < 0.99);
    let noisy =
        solve_semilinear(&op, &NoiseCoefficient::Sine { amp: 0.5 }, &brownian(9), &u0, 0.5, &SemilinearMesh::default());
    assert!(noisy.unwrap().values.iter().all(|v| v.is_finite()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn composed_solver_preserves_order(
        base in prop::collection::vec(-1.0f64..1.0, 32),
        bump in prop::collection::vec(0.0f64..0.5, 32),
        seed in 0u64..1000,
    ) {
        let u0 = GridFn1::new(0.0, 2.0 * PI / 32.0, base.clone(), Boundary::Periodic).unwrap();
        let w0 = u0.with_values(base.iter().zip(&bump).map(|(a, b)| a + b).collect());
        let path = sample_path(&PathEnsembleSpec::new(seed, 0.5, 256, PathKind::Brownian)).unwrap();
        let op = Operator::Laplacian { nu: 0.2 };
        let h = NoiseCoefficient::Sine { amp: 1.0 };
        let mesh = SemilinearMesh { v_range: Some((-1.6, 1.6)), dt: Some(0.01), ..Default::default() };
        let u = solve_semilinear(&op, &h, &path, &u0, 0.5, &mesh).unwrap();
        let w = solve_semilinear(&op, &h, &path, &w0, 0.5, &mesh).unwrap();
        prop_assert!(u.values.iter().zip(&w.values).all(|(a, b)| a <= b));
    }
}
