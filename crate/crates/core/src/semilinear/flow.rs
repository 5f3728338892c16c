//! The noise flow `∂ₛΦ̂ = H(Φ̂)`, `Φ̂(v, 0) = v`, tabulated with its `v`-derivatives.

use crate::error::{arg, Error, Result};
use crate::scalar::Real;

/// Scalar coefficient `H(u)` multiplying the noise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseCoefficient<T> {
    Zero,
    /// `H(u) = c·u`.
    Linear {
        c: T,
    },
    /// `H(u) = amp·sin u`.
    Sine {
        amp: T,
    },
}

impl<T: Real> NoiseCoefficient<T> {
    pub fn eval(&self, u: T) -> T {
        match *self {
            Self::Zero => T::zero(),
            Self::Linear { c } => c * u,
            Self::Sine { amp } => amp * u.sin(),
        }
    }

    pub fn d1(&self, u: T) -> T {
        match *self {
            Self::Zero => T::zero(),
            Self::Linear { c } => c,
            Self::Sine { amp } => amp * u.cos(),
        }
    }

    pub fn d2(&self, u: T) -> T {
        match *self {
            Self::Zero | Self::Linear { .. } => T::zero(),
            Self::Sine { amp } => -amp * u.sin(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            Self::Zero => true,
            Self::Linear { c } => c == T::zero(),
            Self::Sine { amp } => amp == T::zero(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Zero => "0".into(),
            Self::Linear { c } => format!("{c}·u"),
            Self::Sine { amp } => format!("{amp}·sin u"),
        }
    }
}

// Joint right-hand side for (Φ̂, Φ̂', Φ̂''), the last two from the variational equations.
fn rhs<T: Real>(h: &NoiseCoefficient<T>, y: [T; 3]) -> [T; 3] {
    let (a, b) = (h.d1(y[0]), h.d2(y[0]));
    [h.eval(y[0]), a * y[1], b * y[1] * y[1] + a * y[2]]
}

fn rk4<T: Real>(h: &NoiseCoefficient<T>, y: [T; 3], ds: T) -> [T; 3] {
    let add = |y: [T; 3], k: [T; 3], c: T| [y[0] + c * k[0], y[1] + c * k[1], y[2] + c * k[2]];
    let k1 = rhs(h, y);
    let k2 = rhs(h, add(y, k1, ds * T::half()));
    let k3 = rhs(h, add(y, k2, ds * T::half()));
    let k4 = rhs(h, add(y, k3, ds));
    let six = T::lit(6.0);
    let mut out = y;
    for c in 0..3 {
        out[c] = y[c] + ds * (k1[c] + T::two() * (k2[c] + k3[c]) + k4[c]) / six;
    }
    out
}

const MAX_ENTRIES: usize = 50_000_000;

/// `Φ̂`, `∂ᵥΦ̂`, `∂ᵥ²Φ̂` on the lattice `(v0 + i·dv, s0 + j·ds)`; `s = 0` is a lattice row.
#[derive(Clone, Debug)]
pub struct FlowTable<T> {
    pub coefficient: NoiseCoefficient<T>,
    pub v0: T,
    pub dv: T,
    pub nv: usize,
    pub s0: T,
    pub ds: T,
    pub ns: usize,
    /// Row-major in `s`: entry `j·nv + i` belongs to `(v_i, s_j)`.
    pub phi: Vec<T>,
    pub d1: Vec<T>,
    pub d2: Vec<T>,
}

/// Integrates the flow and its variational equations with RK4, one step per table row.
///
/// Fails with [`Error::FlowDegenerate`] when `Φ̂'` stops being positive and finite, or when a
/// row loses strict monotonicity in `v`.
pub fn flow_solve<T: Real>(
    h: &NoiseCoefficient<T>,
    v_range: (T, T),
    nv: usize,
    s_range: (T, T),
    step: T,
) -> Result<FlowTable<T>> {
    let (v_lo, v_hi) = v_range;
    let (s_lo, s_hi) = s_range;
    if nv < 2 || !(v_hi > v_lo) {
        return arg("flow table needs nv ≥ 2 and a nonempty v range");
    }
    if !(step > T::zero()) || !(s_lo <= T::zero() && s_hi >= T::zero()) {
        return arg("flow step must be positive and the s range must contain 0");
    }
    let k_lo = (s_lo / step).floor().to_isize().unwrap_or(isize::MIN);
    let k_hi = (s_hi / step).ceil().to_isize().unwrap_or(isize::MAX);
    let ns = (k_hi - k_lo + 1).max(2) as usize;
    if ns.saturating_mul(nv) > MAX_ENTRIES {
        return arg(format!("flow table of {ns}×{nv} entries is too large"));
    }
    let dv = (v_hi - v_lo) / T::from_usize_lossy(nv - 1);
    let zero_row = (-k_lo) as usize;
    let mut t = FlowTable {
        coefficient: *h,
        v0: v_lo,
        dv,
        nv,
        s0: step * T::lit(k_lo as f64),
        ds: step,
        ns,
        phi: vec![T::zero(); ns * nv],
        d1: vec![T::zero(); ns * nv],
        d2: vec![T::zero(); ns * nv],
    };
    for i in 0..nv {
        let v = v_lo + dv * T::from_usize_lossy(i);
        let start = [v, T::one(), T::zero()];
        t.put(zero_row, i, start);
        for (rows, ds) in [((zero_row + 1..ns).collect::<Vec<_>>(), step), ((0..zero_row).rev().collect(), -step)] {
            let mut y = start;
            for j in rows {
                y = rk4(h, y, ds);
                if !y.iter().all(|c| c.is_finite()) || !(y[1] > T::zero()) {
                    return Err(Error::FlowDegenerate(format!("Φ̂' = {} at v = {v}, s = {}", y[1], t.s(j))));
                }
                t.put(j, i, y);
            }
        }
    }
    for j in 0..ns {
        let row = &t.phi[j * nv..(j + 1) * nv];
        if let Some(i) = row.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::FlowDegenerate(format!("Φ̂(·, {}) not increasing near v = {}", t.s(j), t.v(i))));
        }
    }
    Ok(t)
}

/// Cubic Hermite interpolation on `[0, 1]` with end slopes already scaled by the cell width.
fn hermite<T: Real>(y0: T, m0: T, y1: T, m1: T, tau: T) -> T {
    let t2 = tau * tau;
    let t3 = t2 * tau;
    let (two, three) = (T::two(), T::lit(3.0));
    (two * t3 - three * t2 + T::one()) * y0 + (t3 - two * t2 + tau) * m0 + (three * t2 - two * t3) * y1 + (t3 - t2) * m1
}

impl<T: Real> FlowTable<T> {
    fn put(&mut self, j: usize, i: usize, y: [T; 3]) {
        let k = j * self.nv + i;
        self.phi[k] = y[0];
        self.d1[k] = y[1];
        self.d2[k] = y[2];
    }

    fn get(&self, j: usize, i: usize) -> [T; 3] {
        let k = j * self.nv + i;
        [self.phi[k], self.d1[k], self.d2[k]]
    }

    pub fn v(&self, i: usize) -> T {
        self.v0 + self.dv * T::from_usize_lossy(i)
    }

    pub fn s(&self, j: usize) -> T {
        self.s0 + self.ds * T::from_usize_lossy(j)
    }

    pub fn s_range(&self) -> (T, T) {
        (self.s0, self.s(self.ns - 1))
    }

    pub fn v_range(&self) -> (T, T) {
        (self.v0, self.v(self.nv - 1))
    }

    /// The table at flow time `s`, interpolated in `s` by cubic Hermite using the ODE itself
    /// for the `s`-slopes.
    pub fn slice(&self, s: T) -> Result<FlowSlice<T>> {
        let (lo, hi) = self.s_range();
        let slack = self.ds * T::lit(1e-9);
        if !(s >= lo - slack && s <= hi + slack) {
            return Err(Error::Precondition(format!("flow time {s} outside the table range [{lo}, {hi}]")));
        }
        let pos = ((s - lo) / self.ds).max(T::zero());
        let j = pos.floor().to_usize().unwrap_or(0).min(self.ns - 2);
        let tau = (pos - T::from_usize_lossy(j)).min(T::one());
        let mut out = FlowSlice {
            s,
            v0: self.v0,
            dv: self.dv,
            phi: Vec::with_capacity(self.nv),
            d1: Vec::with_capacity(self.nv),
            d2: Vec::with_capacity(self.nv),
        };
        for i in 0..self.nv {
            let (a, b) = (self.get(j, i), self.get(j + 1, i));
            let y = if tau == T::zero() {
                a
            } else {
                let (ma, mb) = (rhs(&self.coefficient, a), rhs(&self.coefficient, b));
                let mut y = a;
                for c in 0..3 {
                    y[c] = hermite(a[c], ma[c] * self.ds, b[c], mb[c] * self.ds, tau);
                }
                y
            };
            out.phi.push(y[0]);
            out.d1.push(y[1]);
            out.d2.push(y[2]);
        }
        Ok(out)
    }

    /// `(max |Φ̂''/Φ̂'|, max Lipschitz constant of Φ̂''/Φ̂' in v, max 1/Φ̂')` over the lattice.
    pub fn ratio_bounds(&self) -> (T, T, T) {
        let (mut r, mut lr, mut w) = (T::zero(), T::zero(), T::zero());
        for j in 0..self.ns {
            let row = j * self.nv..(j + 1) * self.nv;
            let q: Vec<T> = self.d1[row.clone()].iter().zip(&self.d2[row.clone()]).map(|(&a, &b)| b / a).collect();
            r = q.iter().fold(r, |m, x| m.max(x.abs()));
            lr = q.windows(2).fold(lr, |m, x| m.max((x[1] - x[0]).abs() / self.dv));
            w = self.d1[row].iter().fold(w, |m, &a| m.max(T::one() / a));
        }
        (r, lr, w)
    }

    /// Rows `v,s,phi,d1,d2`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("v,s,phi,d1,d2\n");
        for j in 0..self.ns {
            for i in 0..self.nv {
                let [a, b, c] = self.get(j, i);
                out.push_str(&format!("{},{},{},{},{}\n", self.v(i), self.s(j), a, b, c));
            }
        }
        out
    }
}

/// `Φ̂(·, s)` and its derivatives at one flow time, on the table's `v` lattice.
#[derive(Clone, Debug)]
pub struct FlowSlice<T> {
    pub s: T,
    pub v0: T,
    pub dv: T,
    pub phi: Vec<T>,
    pub d1: Vec<T>,
    pub d2: Vec<T>,
}

impl<T: Real> FlowSlice<T> {
    /// `(Φ̂, Φ̂', Φ̂'')` at `v`; Hermite in `v` for the first two, linear for the last.
    pub fn eval(&self, v: T) -> Result<(T, T, T)> {
        let n = self.phi.len();
        let pos = (v - self.v0) / self.dv;
        let top = T::from_usize_lossy(n - 1);
        let slack = T::lit(1e-9);
        if !(pos >= -slack && pos <= top + slack) {
            return Err(Error::Precondition(format!(
                "value {v} outside the flow table range [{}, {}]",
                self.v0,
                self.v0 + self.dv * top
            )));
        }
        let pos = pos.max(T::zero()).min(top);
        let i = pos.floor().to_usize().unwrap_or(0).min(n - 2);
        let tau = pos - T::from_usize_lossy(i);
        let dv = self.dv;
        let phi = hermite(self.phi[i], self.d1[i] * dv, self.phi[i + 1], self.d1[i + 1] * dv, tau);
        let d1 = hermite(self.d1[i], self.d2[i] * dv, self.d1[i + 1], self.d2[i + 1] * dv, tau);
        let d2 = self.d2[i] + (self.d2[i + 1] - self.d2[i]) * tau;
        Ok((phi, d1, d2))
    }

    /// Largest `|Δ(Φ̂''/Φ̂')| / dv` across the lattice: a Lipschitz bound for the curvature ratio.
    pub fn ratio_lipschitz(&self) -> T {
        let r: Vec<T> = self.d1.iter().zip(&self.d2).map(|(&a, &b)| b / a).collect();
        r.windows(2).fold(T::zero(), |m, w| m.max((w[1] - w[0]).abs() / self.dv))
    }
}
