//! Built-in problem pieces, addressed by keys such as `abs`, `power(0.25)` or `heat(0.5)`.

use crate::error::CliError;
use rough_hj::characteristics::Potential;
use rough_hj::hamiltonian::{Convexity, Hamiltonian, Hamiltonian2};
use rough_hj::paths::{sample_path, HoelderConstruction, Path, PathEnsembleSpec, PathKind};
use rough_hj::scl::{Flux, Kernel};
use rough_hj::semilinear::{LinearForm, NoiseCoefficient, Operator};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub kind: &'static str,
    pub key: String,
    pub formula: String,
    pub convexity: String,
    /// Lipschitz constant on `|p| ≤ 1` (Hamiltonians), `sup|A'|` on `[−1, 1]` (fluxes).
    pub lipschitz: Option<f64>,
    pub notes: Vec<String>,
}

/// Splits `name(a, b)` into the name and its numeric arguments.
pub fn parse_key(key: &str) -> Result<(String, Vec<f64>), CliError> {
    let key = key.trim();
    match key.split_once('(') {
        None => Ok((key.to_string(), vec![])),
        Some((name, rest)) => {
            let inner = rest.strip_suffix(')').ok_or_else(|| CliError::UnknownKey(key.into()))?;
            let args = inner
                .split(',')
                .map(|a| crate::config::parse_number(a).map_err(|_| CliError::UnknownKey(key.into())))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((name.trim().to_string(), args))
        }
    }
}

fn args<const N: usize>(key: &str, got: &[f64], defaults: [f64; N]) -> Result<[f64; N], CliError> {
    if got.len() > N {
        return Err(CliError::UnknownKey(key.into()));
    }
    let mut out = defaults;
    out[..got.len()].copy_from_slice(got);
    Ok(out)
}

pub fn hamiltonian(key: &str) -> Result<Hamiltonian<f64>, CliError> {
    let (name, a) = parse_key(key)?;
    Ok(match name.as_str() {
        "abs" => Hamiltonian::abs(),
        "neg-abs" => Hamiltonian::abs().negated(),
        "quadratic" => Hamiltonian::quadratic(),
        "neg-quadratic" => Hamiltonian::quadratic().negated(),
        "linear" => Hamiltonian::Linear { slope: args(key, &a, [1.0])?[0] },
        "power" => Hamiltonian::power(args(key, &a, [0.25])?[0]),
        "saturating" => Hamiltonian::Saturating { scale: args(key, &a, [1.0])?[0] },
        _ => return Err(CliError::UnknownKey(key.into())),
    })
}

pub fn hamiltonian2(key: &str) -> Result<Hamiltonian2<f64>, CliError> {
    match key {
        "gassiat2d" => Ok(Hamiltonian2::gassiat()),
        _ => Err(CliError::UnknownKey(key.into())),
    }
}

pub fn potential(key: &str) -> Result<Potential<f64>, CliError> {
    let (name, a) = parse_key(key)?;
    match name.as_str() {
        "zero" => Ok(Potential::Zero),
        "cos" => {
            let [amp, freq] = args(key, &a, [1.0, 1.0])?;
            Ok(Potential::Cos { amp, freq })
        }
        _ => Err(CliError::UnknownKey(key.into())),
    }
}

pub fn operator(key: &str) -> Result<Operator<f64>, CliError> {
    let (name, a) = parse_key(key)?;
    Ok(match name.as_str() {
        "zero" => Operator::Zero,
        "heat" => Operator::Laplacian { nu: args(key, &a, [0.5])?[0] },
        // νX + |p| and νX − |p|
        "bellman" | "isaacs" => {
            let nu = args(key, &a, [0.5])?[0];
            let (up, down) = (LinearForm::new(nu, 1.0, 0.0), LinearForm::new(nu, -1.0, 0.0));
            if name == "bellman" {
                Operator::Max(up, down)
            } else {
                Operator::Min(up, down)
            }
        }
        _ => return Err(CliError::UnknownKey(key.into())),
    })
}

pub fn noise(key: &str) -> Result<NoiseCoefficient<f64>, CliError> {
    let (name, a) = parse_key(key)?;
    Ok(match name.as_str() {
        "zero" => NoiseCoefficient::Zero,
        "linear" => NoiseCoefficient::Linear { c: args(key, &a, [1.0])?[0] },
        "sine" => NoiseCoefficient::Sine { amp: args(key, &a, [1.0])?[0] },
        _ => return Err(CliError::UnknownKey(key.into())),
    })
}

pub fn flux(key: &str) -> Result<Flux<f64>, CliError> {
    let (name, a) = parse_key(key)?;
    Ok(match name.as_str() {
        "linear" => Flux::Linear { c: args(key, &a, [1.0])?[0] },
        "burgers" => Flux::Burgers,
        "cubic" => Flux::Cubic,
        // u²/2 through 81 nodes on [−2, 2]
        "table" => Flux::table((0..=80).map(|k| -2.0 + k as f64 / 20.0).map(|u| (u, u * u / 2.0)).collect())?,
        _ => return Err(CliError::UnknownKey(key.into())),
    })
}

pub fn kernel(key: &str) -> Result<Kernel<f64>, CliError> {
    let (name, a) = parse_key(key)?;
    match name.as_str() {
        "biweight" => Ok(Kernel::Biweight { radius: args(key, &a, [0.5])?[0] }),
        _ => Err(CliError::UnknownKey(key.into())),
    }
}

/// Initial data as a function of `x`.
pub fn initial(key: &str) -> Result<Box<dyn Fn(f64) -> f64>, CliError> {
    let (name, a) = parse_key(key)?;
    Ok(match name.as_str() {
        "cone" => Box::new(f64::abs),
        "tent" => Box::new(|x: f64| 1.0 - (x.rem_euclid(2.0) - 1.0).abs()),
        "sine" => Box::new(f64::sin),
        "bump" => Box::new(|x: f64| (-x * x).exp()),
        "sawtooth" => {
            let s = args(key, &a, [10.0])?[0];
            // slope ±s, amplitude 1, period 2/s
            Box::new(move |x: f64| {
                let period = 2.0 / s;
                let r = x.rem_euclid(period);
                s * r.min(period - r)
            })
        }
        "plateau" => {
            let [r, level] = args(key, &a, [2.0, 0.0])?;
            Box::new(move |x: f64| level + (x.abs() - r).max(0.0))
        }
        "riemann-shock" => Box::new(|x: f64| if x < 0.0 { 1.0 } else { 0.0 }),
        "riemann-fan" => Box::new(|x: f64| if x < 0.0 { -1.0 } else { 1.0 }),
        "step" => Box::new(|x: f64| if (x - 2.0).abs() < 1.0 { 1.0 } else { 0.0 }),
        _ => return Err(CliError::UnknownKey(key.into())),
    })
}

/// Driving path of horizon `horizon` with `n` knots (where the kind has a resolution).
pub fn path(key: &str, seed: u64, horizon: f64, n: usize) -> Result<Path<f64>, CliError> {
    let (name, a) = parse_key(key)?;
    let spec = |kind| sample_path(&PathEnsembleSpec::new(seed, horizon, n, kind)).map_err(CliError::from);
    match name.as_str() {
        "brownian" => spec(PathKind::Brownian),
        "linear" => spec(PathKind::Linear { slope: args(key, &a, [1.0])?[0] }),
        "sawtooth" => {
            let [mu, teeth] = args(key, &a, [2.0, 2.0])?;
            spec(PathKind::Sawtooth { slope: mu, teeth: teeth as usize })
        }
        "hoelder" | "hoelder-random" => {
            let construction =
                if name == "hoelder" { HoelderConstruction::Takagi } else { HoelderConstruction::RandomSignTakagi };
            spec(PathKind::Hoelder { alpha: args(key, &a, [0.5])?[0], construction })
        }
        "zigzag" => {
            let k = [(0.0, 0.0), (0.3, 0.3), (0.55, 0.05), (0.8, 0.3), (1.0, 0.1)];
            Ok(Path::from_knots(&k.map(|(t, v)| (t * horizon, v)))?)
        }
        "up-down" => {
            let amp = args(key, &a, [1.0])?[0];
            Ok(Path::from_knots(&[(0.0, 0.0), (horizon / 2.0, amp), (horizon, 0.0)])?)
        }
        _ => Err(CliError::UnknownKey(key.into())),
    }
}

fn convexity_name(c: Convexity) -> &'static str {
    match c {
        Convexity::Affine => "affine",
        Convexity::Convex => "convex",
        Convexity::Concave => "concave",
        Convexity::Neither => "nonconvex",
    }
}

fn ham_entry(key: &str) -> CatalogEntry {
    let h = hamiltonian(key).expect("catalog keys resolve");
    let mut notes = vec![];
    if h.is_difference_of_convex() {
        notes.push("difference of convex".to_string());
    } else {
        notes.push("not difference of convex".to_string());
    }
    if let Hamiltonian::Power { exponent, .. } = h {
        if exponent < 0.5 {
            notes.push("alternating Hopf iteration blows up (exponent below 1/2)".into());
        }
    }
    if let Some(theta) = h.uniform_convexity() {
        notes.push(format!("uniformly convex, theta = {theta}"));
    }
    let lip = h.lipschitz(1.0);
    CatalogEntry {
        kind: "hamiltonian",
        key: key.into(),
        formula: h.describe(),
        convexity: convexity_name(h.convexity()).into(),
        lipschitz: lip.is_finite().then_some(lip),
        notes,
    }
}

fn plain(kind: &'static str, key: &str, formula: &str, convexity: &str, notes: &[&str]) -> CatalogEntry {
    CatalogEntry {
        kind,
        key: key.into(),
        formula: formula.into(),
        convexity: convexity.into(),
        lipschitz: None,
        notes: notes.iter().map(|s| s.to_string()).collect(),
    }
}

/// Every built-in entry, in a fixed order.
pub fn catalog_list() -> Vec<CatalogEntry> {
    let mut out: Vec<CatalogEntry> =
        ["abs", "neg-abs", "quadratic", "neg-quadratic", "linear(1)", "power(0.25)", "power(0.75)", "saturating"]
            .iter()
            .map(|k| ham_entry(k))
            .collect();
    let g = Hamiltonian2::<f64>::gassiat();
    out.push(CatalogEntry {
        kind: "hamiltonian",
        key: "gassiat2d".into(),
        formula: "|p| − |q|".into(),
        convexity: convexity_name(g.convexity()).into(),
        lipschitz: Some(1.0),
        notes: vec!["two-dimensional".into(), "no finite speed of propagation".into()],
    });
    out.extend([
        plain("potential", "zero", "0", "affine", &[]),
        plain("potential", "cos(amp,freq)", "amp·cos(freq·x)", "nonconvex", &["separated partner of saturating"]),
    ]);
    for key in ["zero", "heat(0.5)", "bellman(0.5)", "isaacs(0.5)"] {
        let op = operator(key).expect("catalog keys resolve");
        let convexity = match op {
            Operator::Max(..) => "convex",
            Operator::Min(..) => "concave",
            _ => "affine",
        };
        out.push(plain("operator", key, &op.describe(), convexity, &["degenerate elliptic"]));
    }
    for key in ["zero", "linear(1)", "sine(1)"] {
        let n = noise(key).expect("catalog keys resolve");
        out.push(plain("noise", key, &n.describe(), "-", &[]));
    }
    for key in ["linear(1)", "burgers", "cubic", "table"] {
        let f = flux(key).expect("catalog keys resolve");
        let convexity = match f {
            Flux::Linear { .. } => "affine",
            Flux::Cubic => "nonconvex",
            _ => "convex",
        };
        let mut e = plain("flux", key, &f.describe(), convexity, &[]);
        e.lipschitz = f.max_speed(-1.0, 1.0).ok();
        out.push(e);
    }
    out.push(plain("kernel", "biweight(r)", "(15/16r)(1 − (z/r)²)²", "-", &["compact support"]));
    for (key, formula) in [
        ("cone", "|x|"),
        ("tent", "1 − |x − 1|, 2-periodic"),
        ("sine", "sin x"),
        ("bump", "exp(−x²)"),
        ("sawtooth(s)", "periodic, slope ±s, amplitude 1"),
        ("plateau(R,A)", "A + (|x| − R)₊"),
        ("riemann-shock", "1 left of 0, 0 right"),
        ("riemann-fan", "−1 left of 0, 1 right"),
        ("step", "indicator of |x − 2| < 1"),
    ] {
        out.push(plain("initial", key, formula, "-", &[]));
    }
    for (key, formula) in [
        ("brownian", "piecewise-linear Brownian sample"),
        ("linear(s)", "s·t"),
        ("sawtooth(mu,n)", "n teeth of slope ±mu"),
        ("hoelder(alpha)", "Takagi-type, alpha-Hölder"),
        ("hoelder-random(alpha)", "Takagi-type with random signs"),
        ("zigzag", "(0,0) (.3,.3) (.55,.05) (.8,.3) (1,.1), scaled to the horizon"),
        ("up-down(a)", "0 → a → 0"),
    ] {
        out.push(plain("path", key, formula, "-", &[]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn find(key: &str) -> CatalogEntry {
        catalog_list().into_iter().find(|e| e.key == key).unwrap()
    }

    #[test]
    fn abs_is_convex_with_unit_constant() {
        let e = find("abs");
        assert_eq!((e.convexity.as_str(), e.lipschitz), ("convex", Some(1.0)));
    }

    #[test]
    fn quarter_power_is_flagged() {
        let e = find("power(0.25)");
        assert!(e.notes.iter().any(|n| n == "not difference of convex"));
        assert!(e.notes.iter().any(|n| n.contains("blows up")));
    }

    #[test]
    fn gassiat_is_nonconvex() {
        assert_eq!(find("gassiat2d").convexity, "nonconvex");
    }

    #[test]
    fn keys_parse_and_reject() {
        assert_eq!(parse_key("power(0.25)").unwrap(), ("power".into(), vec![0.25]));
        assert_eq!(parse_key("cos(1, 2)").unwrap(), ("cos".into(), vec![1.0, 2.0]));
        assert!(matches!(hamiltonian("nope"), Err(CliError::UnknownKey(_))));
        assert!(hamiltonian("power(1,2)").is_err());
        assert!(initial("cone").unwrap()(-2.0) == 2.0);
        let tent = initial("tent").unwrap();
        assert_eq!((tent(0.0), tent(1.0), tent(2.5)), (0.0, 1.0, 0.5));
    }

    #[test]
    fn listing_is_deterministic() {
        assert_eq!(catalog_list(), catalog_list());
    }
}
