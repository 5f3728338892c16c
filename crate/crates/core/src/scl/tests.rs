use super::*;
use crate::paths::{sample_path, PathEnsembleSpec, PathKind};
use proptest::prelude::*;
use std::f64::consts::PI;

fn periodic(n: usize, f: impl Fn(f64) -> f64) -> ConservedField<f64> {
    ConservedField::from_fn(0.0, 2.0 * PI, n, CellBoundary::Periodic, f).unwrap()
}

fn open(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> ConservedField<f64> {
    ConservedField::from_fn(a, b, n, CellBoundary::Open, f).unwrap()
}

fn up_down(a: f64) -> Path<f64> {
    Path::from_knots(&[(0.0, 0.0), (1.0, a), (2.0, 0.0)]).unwrap()
}

#[test]
fn unit_courant_upwind_is_an_exact_shift() {
    let u = periodic(50, |x| (x.sin() * 3.0).floor());
    let next = entropy_step(&Flux::Linear { c: 1.0 }, &u, u.h, 1).unwrap();
    assert_eq!(next.u, u.shifted(1).u);
    let back = entropy_step(&Flux::Linear { c: 1.0 }, &next, u.h, -1).unwrap();
    assert_eq!(back.u, u.u);
}

#[test]
fn cfl_violation_is_refused() {
    let u = periodic(50, f64::sin);
    assert!(matches!(entropy_step(&Flux::Burgers, &u, 1.5 * u.h, 1), Err(Error::Cfl { .. })));
    assert!(entropy_step(&Flux::Burgers, &u, u.h, 1).is_ok());
}

#[test]
fn burgers_shock_moves_at_the_rankine_hugoniot_speed() {
    let u0 = open(-1.0, 2.0, 600, |x| if x < 0.0 { 1.0 } else { 0.0 });
    let u = pathwise_scl_solve(&Flux::Burgers, &Path::linear(1.0, 1.0).unwrap(), &u0, 1.0).unwrap();
    let exact = u0.with_values((0..u0.len()).map(|i| if u0.x(i) < 0.5 { 1.0 } else { 0.0 }).collect());
    let err = u.l1_distance(&exact).unwrap();
    assert!(err < 4.0 * u0.h, "{err}");
    let front = (0..u.len()).find(|&i| u.u[i] < 0.5).unwrap();
    assert!((u.x(front) - 0.5).abs() < 3.0 * u0.h);
}

#[test]
fn burgers_rarefaction_opens_a_fan() {
    let u0 = open(-2.0, 2.0, 800, |x| if x < 0.0 { -1.0 } else { 1.0 });
    let u = pathwise_scl_solve(&Flux::Burgers, &Path::linear(1.0, 1.0).unwrap(), &u0, 1.0).unwrap();
    let exact = u0.with_values((0..u0.len()).map(|i| u0.x(i).clamp(-1.0, 1.0)).collect());
    assert!(u.l1_distance(&exact).unwrap() < 0.05);
    // no expansion shock: the largest jump is a few slopes of the fan
    let jump = u.u.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
    assert!(jump < 10.0 * u0.h, "{jump}");
}

#[test]
fn zero_path_leaves_data_alone() {
    let u0 = periodic(64, |x| x.sin() + 0.5);
    let u = pathwise_scl_solve(&Flux::Cubic, &Path::zero(1.0, 1).unwrap(), &u0, 1.0).unwrap();
    assert_eq!(u.u, u0.u);
}

#[test]
fn monotone_path_is_a_time_change() {
    let u0 = periodic(200, |x| x.sin());
    let direct = pathwise_scl_solve(&Flux::Burgers, &Path::linear(1.5, 1.0).unwrap(), &u0, 1.0).unwrap();
    let kinked = Path::from_knots(&[(0.0, 0.0), (0.2, 1.0), (1.0, 1.5)]).unwrap();
    let via = pathwise_scl_solve(&Flux::Burgers, &kinked, &u0, 1.0).unwrap();
    assert!(direct.l1_distance(&via).unwrap() < 2.0 * u0.h);
}

#[test]
fn linear_table_matches_the_closed_form_flux() {
    let nodes: Vec<(f64, f64)> = (-40..=40).map(|k| k as f64 / 20.0).map(|u| (u, u * u / 2.0)).collect();
    let table = Flux::table(nodes).unwrap();
    for &u in &[-1.3, -0.2, 0.0, 0.37, 1.9] {
        assert!((table.eval(u) - u * u / 2.0).abs() < 1e-3);
        assert!((table.plus(u) + table.minus(u) - table.eval(u)).abs() < 1e-12);
    }
    let u0 = periodic(100, |x| x.sin());
    let a = pathwise_scl_solve(&table, &up_down(0.8), &u0, 2.0).unwrap();
    let b = pathwise_scl_solve(&Flux::Burgers, &up_down(0.8), &u0, 2.0).unwrap();
    assert!(a.l1_distance(&b).unwrap() < 0.05);
}

#[test]
fn reversible_before_shocks_irreversible_after() {
    // sin data steepen into a shock at stretched time 1
    for n in [200, 400] {
        let u0 = periodic(n, |x| x.sin());
        let before = pathwise_scl_solve(&Flux::Burgers, &up_down(0.5), &u0, 2.0).unwrap();
        let after = pathwise_scl_solve(&Flux::Burgers, &up_down(2.0), &u0, 2.0).unwrap();
        let (b, a) = (before.l1_distance(&u0).unwrap(), after.l1_distance(&u0).unwrap());
        assert!(b <= 3.0 * u0.h, "n = {n}: {b}");
        assert!(a >= 10.0 * u0.h, "n = {n}: {a}");
    }
}

#[test]
fn source_noise_is_refused() {
    assert!(check_noise::<f64>(&SclNoise::Flux).is_ok());
    let err = check_noise(&SclNoise::Source(NoiseCoefficient::Sine { amp: 1.0 })).unwrap_err();
    assert!(err.to_string().contains("shock"));
}

#[test]
fn kinetic_density_examples() {
    let xi = XiGrid::symmetric(2.0, 40).unwrap();
    let zero = periodic(8, |_| 0.0);
    assert!(kinetic_density(&zero, &xi).unwrap().chi.iter().all(|&c| c == 0));
    let bump = open(0.0, 1.0, 4, |x| if x < 0.25 { 1.0 } else { 0.0 });
    let k = kinetic_density(&bump, &xi).unwrap();
    assert!((k.reconstruct()[0] - 1.0).abs() < 1e-12);
    assert!((0..40).all(|j| (k.at(0, j) == 1) == (xi.xi(j) > 0.0 && xi.xi(j) < 1.0)));
    let tight = XiGrid::symmetric(0.5, 10).unwrap();
    assert!(kinetic_density(&bump, &tight).is_err());
}

#[test]
fn kinetic_moments_reproduce_entropies() {
    let u = periodic(50, |x| 1.7 * x.sin() + 0.3 * (3.0 * x).cos());
    let xi = XiGrid::symmetric(2.5, 500).unwrap();
    let k = kinetic_density(&u, &xi).unwrap();
    for (i, (&v, r)) in u.u.iter().zip(k.reconstruct()).enumerate() {
        assert!((v - r).abs() <= xi.step, "cell {i}");
    }
    for (&v, s) in u.u.iter().zip(k.moment(|x| 2.0 * x)) {
        assert!((v * v - s).abs() <= 2.0 * xi.step * (v.abs() + xi.step), "{v} {s}");
    }
}

#[test]
fn linear_flux_transport_is_stationary_up_to_diffusion() {
    let path = Path::from_knots(&[(0.0, 0.0), (0.4, 1.0), (1.0, -0.5)]).unwrap();
    let flux = Flux::Linear { c: 0.7 };
    let xi = XiGrid::symmetric(1.2, 48).unwrap();
    let check = |n: usize| {
        let u0 = periodic(n, |x| (x - PI).abs().min(1.0));
        let run = pathwise_scl_run(&flux, &path, &u0, 1.0).unwrap();
        let picks: Vec<ConservedField<f64>> = run.fields.iter().step_by(run.fields.len() / 8).cloned().collect();
        let rep = kinetic_transport_check(&flux, &picks, &path, &Kernel::Biweight { radius: 0.5 }, &xi).unwrap();
        assert!(rep.max_increase <= 1e-12, "{}", rep.max_increase);
        (rep.drift.iter().copied().fold(0.0, f64::max), rep.defect_lower_bound)
    };
    let (d1, e1) = check(200);
    let (d2, e2) = check(400);
    // χ jumps where u crosses ξ, so near extrema of u the drift decays like h^½
    assert!(d1 < 0.15 && d2 < d1 / 1.15, "{d1} {d2}");
    assert!(e2 < e1 / 1.5, "{e1} {e2}");
}

#[test]
fn burgers_shock_dissipates_within_the_kinetic_bounds() {
    let u0 = periodic(400, |x| x.sin() + 0.5);
    let path = up_down(2.0);
    let run = pathwise_scl_run(&Flux::Burgers, &path, &u0, 2.0).unwrap();
    let xi = XiGrid::symmetric(1.6, 64).unwrap();
    let d = defect_estimate(&u0, run.last(), &xi).unwrap();
    let half_l2 = 0.5 * u0.lp_norm(2.0).powi(2);
    assert!(d.total > 0.1 && d.total <= half_l2 + 5.0 * u0.h, "{} {}", d.total, half_l2);
    assert!(d.min_profile() >= -1e-12);
    assert!(d.max_profile() <= u0.lp_norm(1.0));
    assert!((d.profile_mass(xi.step) - d.total).abs() < 0.05 * d.total);
    // ∫|u| never increases
    let abs: Vec<f64> = run.fields.iter().map(|f| f.lp_norm(1.0)).collect();
    assert!(abs.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    let picks: Vec<ConservedField<f64>> = run.fields.iter().step_by(run.fields.len() / 10).cloned().collect();
    let rep = kinetic_transport_check(&Flux::Burgers, &picks, &path, &Kernel::Biweight { radius: 0.4 }, &xi).unwrap();
    assert!(rep.max_increase <= 1e-9, "{}", rep.max_increase);
    assert!(rep.defect_lower_bound > 0.05);
}

#[test]
fn identical_and_shifted_pairs() {
    let u0 = periodic(128, |x| if x.sin() > 0.2 { 1.0 } else { -0.5 });
    let path = sample_path(&PathEnsembleSpec::new(7, 1.0, 128, PathKind::Brownian)).unwrap();
    let same = ContractionCase { u1: u0.clone(), u2: u0.clone(), path1: path.clone(), path2: path.clone() };
    let r = &contraction_suite(&Flux::Burgers, &[same], 1.0).unwrap()[0];
    assert_eq!((r.l1_initial, r.l1_final, r.constant), (0.0, 0.0, None));
    let a = pathwise_scl_solve(&Flux::Burgers, &path, &u0, 1.0).unwrap();
    let b = pathwise_scl_solve(&Flux::Burgers, &path, &u0.shifted(1), 1.0).unwrap();
    assert_eq!(b.u, a.shifted(1).u);
    assert!(a.l1_distance(&b).unwrap() <= u0.l1_distance(&u0.shifted(1)).unwrap());
}

#[test]
fn path_stability_constant_is_mesh_stable() {
    let base = sample_path(&PathEnsembleSpec::new(12, 1.0, 256, PathKind::Brownian)).unwrap();
    let drift = Path::linear(0.2, 1.0).unwrap();
    let other = base.combine(1.0, &drift, 1.0).unwrap();
    let constant = |n: usize| {
        let u1 = periodic(n, |x| if (x - 2.0).abs() < 1.0 { 1.0 } else { 0.0 });
        let u2 = periodic(n, |x| x.sin().max(0.0));
        let case = ContractionCase { u1, u2, path1: base.clone(), path2: other.clone() };
        let r = contraction_suite(&Flux::Burgers, &[case], 1.0).unwrap().remove(0);
        assert!(r.gap() <= r.endpoint_term + r.sup_term);
        r.constant.unwrap()
    };
    let (c1, c2) = (constant(200), constant(400));
    assert!(c1 < 1.0 && (c1 - c2).abs() <= 0.25 * c1.max(c2), "{c1} {c2}");
}

#[test]
fn refining_the_knots_of_a_path_changes_little() {
    let path = sample_path(&PathEnsembleSpec::new(5, 1.0, 64, PathKind::Brownian)).unwrap();
    let fine_times: Vec<f64> = (0..=256).map(|k| k as f64 / 256.0).collect();
    let fine = path.resample(&fine_times).unwrap();
    assert!(path.sup_distance(&fine) < 1e-12);
    for n in [200, 400] {
        let u0 = periodic(n, |x| x.sin() + 0.3);
        let a = pathwise_scl_solve(&Flux::Burgers, &path, &u0, 1.0).unwrap();
        let b = pathwise_scl_solve(&Flux::Burgers, &fine, &u0, 1.0).unwrap();
        let d = a.l1_distance(&b).unwrap();
        assert!(d <= 5.0 * u0.h, "n = {n}: {d}");
    }
}

fn bv_data() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(-1.0), Just(0.0), Just(0.5), Just(1.0), -1.0f64..1.0], 8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn conservation_maximum_principle_and_tv(levels in bv_data(), seed in 0u64..1000, cubic in any::<bool>()) {
        let u0 = periodic(96, |x| levels[((x / (2.0 * PI)) * 8.0) as usize % 8]);
        let path = sample_path(&PathEnsembleSpec::new(seed, 0.5, 64, PathKind::Brownian)).unwrap();
        let flux = if cubic { Flux::Cubic } else { Flux::Burgers };
        let run = pathwise_scl_run(&flux, &path, &u0, 0.5).unwrap();
        let (m0, lo, hi) = (u0.mass(), u0.min(), u0.max());
        let mut tv = u0.total_variation();
        for f in &run.fields {
            prop_assert!((f.mass() - m0).abs() <= 1e-12 * (1.0 + m0.abs()));
            prop_assert!(f.min() >= lo && f.max() <= hi, "{} {}", f.min(), f.max());
            let next = f.total_variation();
            prop_assert!(next <= tv * (1.0 + 1e-14), "{} > {}", next, tv);
            tv = next;
        }
    }

    #[test]
    fn l1_contraction_for_equal_paths(a in bv_data(), b in bv_data(), seed in 0u64..1000) {
        let u1 = periodic(96, |x| a[((x / (2.0 * PI)) * 8.0) as usize % 8]);
        let u2 = periodic(96, |x| b[((x / (2.0 * PI)) * 8.0) as usize % 8]);
        let path = sample_path(&PathEnsembleSpec::new(seed, 0.5, 64, PathKind::Brownian)).unwrap();
        let case = ContractionCase { u1, u2, path1: path.clone(), path2: path };
        let r = contraction_suite(&Flux::Burgers, &[case], 0.5).unwrap().remove(0);
        prop_assert!(r.gap() <= 1e-12);
        prop_assert!(r.lp_growth.iter().all(|&g| g <= 1e-12));
        prop_assert!(r.tv_growth <= 1e-12);
    }
}
