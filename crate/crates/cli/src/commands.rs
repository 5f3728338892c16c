//! One function per module section. Each reads its parameters, runs, and fills a [`Manifest`]
//! plus the CSV artifacts; [`run`] writes everything under the output directory.

use crate::acceptance;
use crate::catalog;
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{csv, output_dir, Artifacts};
use crate::verdict::{Manifest, Relation, VerdictRecord};
use rough_hj::characteristics::window_scaling_experiment;
use rough_hj::convex::{convex_envelope, growth_exponent, hopf_iterate, legendre};
use rough_hj::grid::{Boundary, GridFn1};
use rough_hj::paths::{fully_reduce_path, reduce_path, Path};
use rough_hj::schemes::{gassiat_experiment, rate_harness, solve_by_scheme, DrivingPath, RateProblem};
use rough_hj::scl::{
    contraction_suite, defect_estimate, kinetic_transport_check, pathwise_scl_run, CellBoundary, ConservedField,
    ContractionCase, XiGrid,
};
use rough_hj::semigroup::{solve_exact, PathwiseSolveSpec};
use rough_hj::semilinear::{lipschitz_bound_audit, semilinear_run, SemilinearMesh};
use std::f64::consts::PI;
use std::path::PathBuf;

/// Everything one invocation produced.
#[derive(Debug)]
pub struct Outcome {
    pub manifest: Manifest,
    pub dir: PathBuf,
    /// Text for stdout (catalog listing, acceptance lines).
    pub stdout: String,
}

/// Runs the configured command and writes its artifacts and `manifest.json`.
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mut manifest =
        Manifest { command: cfg.command.clone(), action: cfg.action.clone(), seed: cfg.seed, ..Manifest::default() };
    let mut files = Artifacts::default();
    let mut stdout = String::new();
    match cfg.command.as_str() {
        "path" => path_cmd(cfg, &mut manifest, &mut files)?,
        "convex" => convex_cmd(cfg, &mut manifest, &mut files)?,
        "solve" => solve_cmd(cfg, &mut manifest, &mut files)?,
        "chars" => chars_cmd(cfg, &mut manifest, &mut files)?,
        "scheme" => scheme_cmd(cfg, &mut manifest, &mut files)?,
        "semilinear" => semilinear_cmd(cfg, &mut manifest, &mut files)?,
        "scl" => scl_cmd(cfg, &mut manifest, &mut files)?,
        "catalog" => {
            allow(cfg, &[], &[""])?;
            let text = serde_json::to_string_pretty(&catalog::catalog_list()).expect("catalog serializes");
            stdout = text.clone() + "\n";
            files.add("catalog.json", text);
        }
        "acceptance" => stdout = acceptance_cmd(cfg, &mut manifest)?,
        other => return Err(CliError::Usage(format!("unknown command {other:?}"))),
    }
    let dir = output_dir(cfg);
    manifest.artifacts = files.write_all(&dir)?;
    manifest.artifacts.push("manifest.json".into());
    crate::output::write_atomic(&dir.join("manifest.json"), &manifest.to_json())?;
    crate::output::write_atomic(&dir.join("config.txt"), &cfg.to_text())?;
    Ok(Outcome { manifest, dir, stdout })
}

/// Refuses unknown parameters and actions, so typos do not silently fall back to defaults.
fn allow(cfg: &ExperimentConfig, keys: &[&str], actions: &[&str]) -> Result<(), CliError> {
    if !actions.contains(&cfg.action.as_str()) {
        return Err(CliError::Config(format!(
            "[{}] action {:?}; expected one of {}",
            cfg.command,
            cfg.action,
            actions.iter().filter(|a| !a.is_empty()).cloned().collect::<Vec<_>>().join(", ")
        )));
    }
    match cfg.params.keys().find(|k| !keys.contains(&k.as_str())) {
        Some(k) => Err(CliError::Config(format!("[{}] has no parameter {k:?}", cfg.command))),
        None => Ok(()),
    }
}

fn driving_path(cfg: &ExperimentConfig, horizon: f64) -> Result<Path<f64>, CliError> {
    catalog::path(cfg.str_or("path", "brownian"), cfg.seed_or(0), horizon, cfg.usize_or("knots", 1024)?)
}

fn grid_initial(
    cfg: &ExperimentConfig,
    default: &str,
    lo: f64,
    hi: f64,
    boundary: Boundary,
) -> Result<GridFn1<f64>, CliError> {
    let f = catalog::initial(cfg.str_or("initial", default))?;
    let n = cfg.usize_or("n", 401)?;
    Ok(GridFn1::on_interval(cfg.f64_or("lo", lo)?, cfg.f64_or("hi", hi)?, n, boundary, f)?)
}

fn path_cmd(cfg: &ExperimentConfig, m: &mut Manifest, files: &mut Artifacts) -> Result<(), CliError> {
    allow(cfg, &["path", "horizon", "knots", "count"], &["sample", "reduce", "stats"])?;
    let horizon = cfg.f64_or("horizon", 1.0)?;
    match cfg.action.as_str() {
        "sample" => {
            let p = driving_path(cfg, horizon)?;
            m.summary.insert("total_variation".into(), p.total_variation(0.0, horizon)?);
            files.add("path.csv", p.to_csv());
        }
        "reduce" => {
            let p = driving_path(cfg, horizon)?;
            let r = reduce_path(&p, horizon)?;
            let f = fully_reduce_path(&p, horizon)?;
            let (tv, tvr) = (p.total_variation(0.0, horizon)?, r.total_variation(0.0, horizon)?);
            m.summary.insert("knots".into(), p.len() as f64);
            m.summary.insert("reduced_knots".into(), r.len() as f64);
            m.summary.insert("fully_reduced_knots".into(), f.len() as f64);
            m.verdicts.push(VerdictRecord::at_most(
                "reduced-tv",
                "the skeleton never adds variation",
                tvr,
                tv * (1.0 + 1e-12),
            ));
            let (hi, lo) = p.running_extrema(horizon)?;
            let (rhi, rlo) = r.running_extrema(horizon)?;
            m.verdicts.push(VerdictRecord::at_most(
                "reduced-extrema",
                "the skeleton keeps the running maximum and minimum",
                (hi - rhi).abs().max((lo - rlo).abs()),
                0.0,
            ));
            files.add("path.csv", p.to_csv());
            files.add("reduced.csv", r.to_csv());
            files.add("fully_reduced.csv", f.to_csv());
        }
        _ => {
            let count = cfg.usize_or("count", 100)?;
            let base = cfg.seed_or(0);
            let mut rows = vec![];
            for s in 0..count as u64 {
                let p = catalog::path(cfg.str_or("path", "brownian"), base + s, horizon, cfg.usize_or("knots", 1024)?)?;
                let (hi, lo) = p.running_extrema(horizon)?;
                let reduced = reduce_path(&p, horizon)?.total_variation(0.0, horizon)?;
                rows.push(vec![(base + s) as f64, hi - lo, p.total_variation(0.0, horizon)?, reduced]);
            }
            let mean_range = rows.iter().map(|r| r[1]).sum::<f64>() / count.max(1) as f64;
            m.summary.insert("mean_range".into(), mean_range);
            files.add("stats.csv", csv(&["seed", "range", "total_variation", "reduced_total_variation"], rows));
        }
    }
    Ok(())
}

fn convex_cmd(cfg: &ExperimentConfig, m: &mut Manifest, files: &mut Artifacts) -> Result<(), CliError> {
    allow(
        cfg,
        &["hamiltonian", "initial", "lo", "hi", "n", "delta", "steps", "points"],
        &["legendre", "envelope", "hopf-iterate"],
    )?;
    match cfg.action.as_str() {
        "legendre" => {
            let h = catalog::hamiltonian(cfg.str_or("hamiltonian", "quadratic"))?;
            let f = h.sample(cfg.f64_or("lo", -2.0)?, cfg.f64_or("hi", 2.0)?, cfg.usize_or("n", 401)?)?;
            let star = legendre(&f, None)?;
            let dip = star.second_differences().iter().fold(0.0f64, |a, d| a.max(-d));
            m.verdicts.push(VerdictRecord::at_most(
                "conjugate-convex",
                "second differences of the conjugate",
                dip,
                1e-8,
            ));
            files.add("function.csv", f.to_csv());
            files.add("conjugate.csv", star.to_csv());
        }
        "envelope" => {
            let f = grid_initial(cfg, "sine", -4.0, 4.0, Boundary::LinearExtension)?;
            let env = convex_envelope(&f);
            let above = env.values.iter().zip(&f.values).fold(f64::NEG_INFINITY, |a, (e, v)| a.max(e - v));
            m.verdicts.push(VerdictRecord::at_most("envelope-below", "the envelope lies below the data", above, 1e-12));
            files.add("function.csv", f.to_csv());
            files.add("envelope.csv", env.to_csv());
        }
        _ => {
            let h = catalog::hamiltonian(cfg.str_or("hamiltonian", "power(0.25)"))?;
            let steps = cfg.usize_or("steps", 200)?;
            let it = hopf_iterate(&h, cfg.f64_or("delta", 1.0)?, steps, cfg.usize_or("points", 2001)?)?;
            m.summary.insert("blow_up".into(), f64::from(u8::from(it.blow_up)));
            if let Some(beta) = growth_exponent(&it.m, (steps / 10).max(1), steps) {
                m.summary.insert("growth_exponent".into(), beta);
            }
            files.add("iterate.csv", csv(&["k", "m"], it.m.iter().enumerate().map(|(k, v)| vec![k as f64, *v])));
        }
    }
    Ok(())
}

fn solve_cmd(cfg: &ExperimentConfig, m: &mut Manifest, files: &mut Artifacts) -> Result<(), CliError> {
    allow(cfg, &["hamiltonian", "initial", "path", "knots", "horizon", "lo", "hi", "n"], &["exact", "scheme"])?;
    let h = catalog::hamiltonian(cfg.str_or("hamiltonian", "abs"))?;
    let horizon = cfg.f64_or("horizon", 1.0)?;
    let path = driving_path(cfg, horizon)?;
    let u0 = grid_initial(cfg, "cone", -2.0, 2.0, Boundary::LinearExtension)?;
    let u = if cfg.action == "exact" {
        solve_exact(&PathwiseSolveSpec::new(h, path, u0.clone()))?
    } else {
        solve_by_scheme(&[h], &path, &u0, horizon)?
    };
    m.summary.insert("min".into(), u.min());
    m.summary.insert("max".into(), u.max());
    files.add("initial.csv", u0.to_csv());
    files.add("solution.csv", u.to_csv());
    Ok(())
}

fn chars_cmd(cfg: &ExperimentConfig, m: &mut Manifest, files: &mut Artifacts) -> Result<(), CliError> {
    allow(cfg, &["hamiltonian", "potential", "lambdas", "horizon", "dt"], &["window"])?;
    let w = window_scaling_experiment(
        &catalog::hamiltonian(cfg.str_or("hamiltonian", "saturating"))?,
        &catalog::potential(cfg.str_or("potential", "cos(1,1)"))?,
        &cfg.list_or("lambdas", &[10.0, 1e2, 1e3])?,
        cfg.f64_or("horizon", 2.0)?,
        cfg.f64_or("dt", 1e-3)?,
    )?;
    m.summary.insert("slope".into(), w.slope);
    m.summary.insert("constant".into(), w.constant);
    m.verdicts.push(VerdictRecord::at_least(
        "window-slope",
        "log-log slope of the invertibility window",
        w.slope,
        -1.0 / 3.0 - 0.1,
    ));
    let rows = (0..w.lambdas.len()).map(|i| vec![w.lambdas[i], w.t_star[i], w.t_star_half_step[i]]);
    files.add("window.csv", csv(&["lambda", "t_star", "t_star_half_step"], rows));
    Ok(())
}

fn scheme_cmd(cfg: &ExperimentConfig, m: &mut Manifest, files: &mut Artifacts) -> Result<(), CliError> {
    allow(
        cfg,
        &[
            "driver",
            "alpha",
            "h",
            "seeds",
            "height",
            "teeth",
            "theta",
            "hamiltonian",
            "initial",
            "path",
            "knots",
            "horizon",
            "lo",
            "hi",
            "n",
        ],
        &["rates", "gassiat", "evolve"],
    )?;
    match cfg.action.as_str() {
        "rates" => {
            let driver = match cfg.str_or("driver", "zigzag") {
                "zigzag" => DrivingPath::Zigzag,
                "hoelder" => DrivingPath::Hoelder { alpha: cfg.f64_or("alpha", 0.5)? },
                "brownian" => DrivingPath::Brownian,
                "random-walk" => DrivingPath::RandomWalk,
                other => return Err(CliError::UnknownKey(other.into())),
            };
            let hs = cfg.list_or("h", &[2f64.powi(-6), 2f64.powi(-7), 2f64.powi(-8)])?;
            let base = cfg.seed_or(0);
            let seeds: Vec<u64> = (base..base + cfg.usize_or("seeds", 1)? as u64).collect();
            let mut problem = RateProblem::abs_cone(driver);
            problem.theta = cfg.f64_or("theta", 1.0)?;
            let rep = rate_harness(&problem, &hs, &seeds)?;
            m.summary.insert("slope".into(), rep.slope);
            files.add("rates.csv", rep.to_csv());
            let levels = rep.levels.iter().map(|l| vec![l.0, l.1, l.2]);
            files.add("levels.csv", csv(&["h", "median_error", "median_normalized_error"], levels));
        }
        "gassiat" => {
            let r = cfg.f64_or("height", 1.0)?;
            let teeth = cfg.usize_or("teeth", 2)?.max(1);
            let top = (r + teeth as f64) / teeth as f64;
            let knots: Vec<(f64, f64)> =
                (0..=teeth).map(|k| (k as f64 / teeth as f64, if k % 2 == 1 { top } else { 0.0 })).collect();
            let h = cfg.f64_or("h", 2f64.powi(-6))?;
            let rep = gassiat_experiment(r, &Path::from_knots(&knots)?, h, cfg.f64_or("theta", 1.0)?)?;
            for (k, v) in [
                ("value", rep.value),
                ("baseline", rep.baseline),
                ("excess", rep.excess),
                ("total_variation", rep.total_variation),
                ("lower_bound", rep.lower_bound),
            ] {
                m.summary.insert(k.into(), v);
            }
            m.verdicts.push(VerdictRecord::at_least(
                "plateau-lift",
                "the plateau value reaches the origin despite the distance R",
                rep.excess,
                0.5 * rep.lower_bound,
            ));
        }
        _ => {
            let h = catalog::hamiltonian(cfg.str_or("hamiltonian", "abs"))?;
            let horizon = cfg.f64_or("horizon", 1.0)?;
            let u0 = grid_initial(cfg, "cone", -2.0, 2.0, Boundary::LinearExtension)?;
            let u = solve_by_scheme(&[h], &driving_path(cfg, horizon)?, &u0, horizon)?;
            files.add("solution.csv", u.to_csv());
        }
    }
    Ok(())
}

fn semilinear_cmd(cfg: &ExperimentConfig, m: &mut Manifest, files: &mut Artifacts) -> Result<(), CliError> {
    allow(cfg, &["operator", "noise", "initial", "path", "knots", "horizon", "n", "dt"], &["run"])?;
    let horizon = cfg.f64_or("horizon", 1.0)?;
    let n = cfg.usize_or("n", 128)?;
    let f = catalog::initial(cfg.str_or("initial", "sine"))?;
    let u0 = GridFn1::from_fn(0.0, 2.0 * PI / n as f64, n, Boundary::Periodic, f)?;
    let mesh =
        SemilinearMesh { dt: cfg.has("dt").then(|| cfg.f64_or("dt", 0.0)).transpose()?, ..SemilinearMesh::default() };
    let run = semilinear_run(
        &catalog::operator(cfg.str_or("operator", "heat(0.5)"))?,
        &catalog::noise(cfg.str_or("noise", "linear(1)"))?,
        &driving_path(cfg, horizon)?,
        &u0,
        horizon,
        &mesh,
    )?;
    let audit = lipschitz_bound_audit(&run);
    m.summary.insert("dt".into(), run.dt);
    m.summary.insert("lipschitz_bound".into(), audit.bound);
    files.add("solution.csv", run.last().to_csv());
    files.add(
        "lipschitz.csv",
        csv(&["t", "lipschitz"], audit.times.iter().zip(&audit.lipschitz).map(|(t, l)| vec![*t, *l])),
    );
    Ok(())
}

fn scl_cmd(cfg: &ExperimentConfig, m: &mut Manifest, files: &mut Artifacts) -> Result<(), CliError> {
    allow(
        cfg,
        &[
            "flux", "initial", "initial2", "path", "path2", "knots", "horizon", "lo", "hi", "n", "kernel", "xi-bound",
            "xi-cells",
        ],
        &["run", "contraction", "kinetic"],
    )?;
    let flux = catalog::flux(cfg.str_or("flux", "burgers"))?;
    let horizon = cfg.f64_or("horizon", 1.0)?;
    let n = cfg.usize_or("n", 400)?;
    let (lo, hi) = (cfg.f64_or("lo", 0.0)?, cfg.f64_or("hi", 2.0 * PI)?);
    let field = |key: &str, default: &str| -> Result<ConservedField<f64>, CliError> {
        Ok(ConservedField::from_fn(lo, hi, n, CellBoundary::Periodic, catalog::initial(cfg.str_or(key, default))?)?)
    };
    let u0 = field("initial", "sine")?;
    let path = driving_path(cfg, horizon)?;
    match cfg.action.as_str() {
        "run" => {
            let run = pathwise_scl_run(&flux, &path, &u0, horizon)?;
            let scale = u0.u.iter().map(|v| v.abs()).sum::<f64>() * u0.h;
            let drift = run.fields.iter().map(|f| (f.mass() - u0.mass()).abs()).fold(0.0, f64::max);
            let above = run.fields.iter().map(|f| f.max() - u0.max()).fold(f64::NEG_INFINITY, f64::max);
            let below = run.fields.iter().map(|f| u0.min() - f.min()).fold(f64::NEG_INFINITY, f64::max);
            m.verdicts.push(VerdictRecord::new(
                "mass",
                "conserved up to rounding",
                drift,
                Relation::AtMost,
                0.0,
                1e-12 * scale.max(1.0),
            ));
            m.verdicts.push(VerdictRecord::at_most("max-principle-above", "no new maxima", above, 0.0));
            m.verdicts.push(VerdictRecord::at_most("max-principle-below", "no new minima", below, 0.0));
            let rows = run
                .fields
                .iter()
                .enumerate()
                .map(|(k, f)| vec![k as f64, f.mass(), f.total_variation(), f.min(), f.max()]);
            files.add("history.csv", csv(&["substep", "mass", "total_variation", "min", "max"], rows));
            files.add("solution.csv", run.last().to_csv());
        }
        "contraction" => {
            let path2 = match cfg.params.get("path2") {
                Some(k) => catalog::path(k, cfg.seed_or(0) + 1, horizon, cfg.usize_or("knots", 1024)?)?,
                None => path.clone(),
            };
            let case = ContractionCase { u1: u0, u2: field("initial2", "bump")?, path1: path, path2 };
            let rec = contraction_suite(&flux, &[case], horizon)?.remove(0);
            m.summary.insert("l1_initial".into(), rec.l1_initial);
            m.summary.insert("l1_final".into(), rec.l1_final);
            if let Some(c) = rec.constant {
                m.summary.insert("stability_constant".into(), c);
            }
        }
        _ => {
            let run = pathwise_scl_run(&flux, &path, &u0, horizon)?;
            let bound = cfg.f64_or("xi-bound", 1.05 * u0.max().abs().max(u0.min().abs()))?;
            let xi = XiGrid::symmetric(bound, cfg.usize_or("xi-cells", 64)?)?;
            let defect = defect_estimate(&u0, run.last(), &xi)?;
            let kernel = catalog::kernel(cfg.str_or("kernel", "biweight(0.3)"))?;
            let report = kinetic_transport_check(&flux, &run.fields, &path, &kernel, &xi)?;
            m.summary.insert("defect_total".into(), defect.total);
            m.summary.insert("defect_lower_bound".into(), report.defect_lower_bound);
            m.verdicts.push(VerdictRecord::at_least(
                "defect-nonnegative",
                "kinetic defect profile",
                defect.min_profile(),
                0.0,
            ));
            m.verdicts.push(VerdictRecord::at_most(
                "entropy-nonincreasing",
                "∫S(u) for S = ξ²/2 and S = |ξ|",
                report.max_increase,
                1e-9,
            ));
            files.add(
                "defect.csv",
                csv(&["xi", "profile"], defect.xi.iter().zip(&defect.profile).map(|(a, b)| vec![*a, *b])),
            );
            let rows = (0..report.times.len()).map(|k| {
                vec![report.times[k], report.drift[k], report.quadratic_entropy[k], report.absolute_entropy[k]]
            });
            files.add("transport.csv", csv(&["t", "drift", "quadratic_entropy", "absolute_entropy"], rows));
        }
    }
    Ok(())
}

fn acceptance_cmd(cfg: &ExperimentConfig, m: &mut Manifest) -> Result<String, CliError> {
    allow(cfg, &["suite", "only"], &["", "run"])?;
    if cfg.str_or("suite", "primary") != "primary" {
        return Err(CliError::Config(format!("unknown suite {:?}; only \"primary\" exists", cfg.str_or("suite", ""))));
    }
    let all: Vec<f64> = (1..=15).map(f64::from).collect();
    let only = cfg.list_or("only", &all)?;
    let mut text = String::new();
    for n in only {
        if !((1.0..=15.0).contains(&n) && n.fract() == 0.0) {
            return Err(CliError::Config(format!("only: no criterion {n}")));
        }
        let r = acceptance::run_criterion(n as usize);
        text.push_str(&r.line());
        text.push('\n');
        m.summary.insert(format!("criterion_{:02}_pass", r.number), f64::from(u8::from(r.pass())));
        if let Some(e) = &r.error {
            m.verdicts.push(VerdictRecord::at_most(format!("{}.error", r.number), e.clone(), f64::NAN, 0.0));
        }
        m.verdicts.extend(r.records);
    }
    Ok(text)
}
