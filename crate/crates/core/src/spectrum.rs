//! Closed-form spectrum and terminating-hypergeometric eigenfunctions
//!
//! ```text
//! eps = B(E) / (2(n + A + 1)),   eps^2 = m0^2 - E^2
//! F(r) = N r^{A+1} e^{-eps r} 1F1(-n, c; 2 eps r)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::model::{BoundState, EffectiveChannel};
use crate::quadrature::{adaptive_gk_half_line, GaussLaguerre};

/// Relative tolerance of the adaptive normalization fallback.
pub const NORMALIZATION_RTOL: f64 = 1e-10;

/// Solves `eps = B(E)/(2(n+A+1))` together with `eps^2 + E^2 = m0^2`.
///
/// With `eps = p E + q` the energy obeys `(1 + p^2) E^2 + 2pq E + q^2 - m0^2 = 0`.
/// When both roots are bound (`eps > 0`, `|E| < m0`) the larger energy is
/// returned.
pub fn bound_state_energy(channel: &EffectiveChannel, n: usize) -> Result<BoundState> {
    let m0 = channel.setup.m0;
    let two_nu = 2.0 * (n as f64 + channel.a + 1.0);
    let p = channel.beta1 / two_nu;
    let q = channel.beta0 / two_nu;
    let lead = 1.0 + p * p;
    if lead.abs() < f64::EPSILON {
        return Err(Error::DegenerateQuadratic(lead));
    }
    let half_b = p * q;
    let c = q * q - m0 * m0;
    let disc = half_b * half_b - lead * c;
    if disc < 0.0 {
        return Err(Error::NoBoundState(format!(
            "energy quadratic has no real root for level {n}"
        )));
    }
    // stable pair of roots
    let t = -(half_b + half_b.signum() * disc.sqrt());
    let mut roots = Vec::with_capacity(2);
    if t != 0.0 {
        roots.push(t / lead);
        roots.push(c / t);
    } else {
        let s = (-c / lead).sqrt();
        roots.extend([s, -s]);
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    let eps_floor = 1e-12 * m0;
    roots
        .into_iter()
        .filter(|&e| e.abs() < m0)
        .map(|e| (e, p * e + q))
        .find(|&(_, eps)| eps > eps_floor)
        .map(|(energy, epsilon)| BoundState {
            n,
            channel: *channel,
            energy,
            epsilon,
            b_value: channel.b_of(energy),
        })
        .ok_or_else(|| {
            Error::NoBoundState(format!(
                "no root with eps > 0 and |E| < m0 for level {n} of the {} channel",
                channel.component
            ))
        })
}

/// Second Kummer parameter convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KummerMode {
    /// `c = 2A + 2`, the value for which the ansatz solves the radial equation.
    OdeConsistent,
    /// `c = 2B + 2`, the literal form of the eigenfunction formula. Fails the
    /// radial equation for `n >= 1` unless `B = A`.
    PaperLiteral,
}

impl KummerMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            KummerMode::OdeConsistent => "ode-consistent",
            KummerMode::PaperLiteral => "paper-literal",
        }
    }
}

impl std::str::FromStr for KummerMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "ode-consistent" | "odeconsistent" => Ok(KummerMode::OdeConsistent),
            "paper-literal" | "paperliteral" => Ok(KummerMode::PaperLiteral),
            other => Err(format!("unknown Kummer mode '{other}'")),
        }
    }
}

/// Coefficients of `1F1(-n, c; z)` as a polynomial in `z`:
/// `t_j = (-n)_j / ((c)_j j!)`.
pub fn kummer_coefficients(n: usize, c: f64) -> Result<Vec<f64>> {
    if c <= 0.0 && c.fract() == 0.0 && c > -(n as f64) {
        return Err(Error::BadParameter(format!(
            "c = {c} makes (c)_j vanish inside the degree-{n} series"
        )));
    }
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut t = 1.0;
    coeffs.push(t);
    for j in 0..n {
        let jf = j as f64;
        t *= (jf - n as f64) / ((c + jf) * (jf + 1.0));
        coeffs.push(t);
    }
    Ok(coeffs)
}

fn horner(coeffs: &[f64], z: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * z + c)
}

/// `1F1(-n, c; z)`.
pub fn kummer_eval(n: usize, c: f64, z: f64) -> Result<f64> {
    Ok(horner(&kummer_coefficients(n, c)?, z))
}

/// Constant `(B+n+1)^n prod_{k=0}^{n-1} (2B+2+k)` that accompanies the
/// literal eigenfunction formula. Not an L2 norm; reported for comparison only.
pub fn paper_literal_prefactor(n: usize, b: f64) -> f64 {
    let nf = n as f64;
    let product: f64 = (0..n).map(|k| 2.0 * b + 2.0 + k as f64).product();
    (b + nf + 1.0).powi(n as i32) * product
}

/// Upper/lower radial function `N r^{A+1} e^{-eps r} 1F1(-n, c; 2 eps r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialWavefunction {
    pub state: BoundState,
    pub kummer_coeffs: Vec<f64>,
    pub c: f64,
    pub norm_constant: f64,
    pub mode: KummerMode,
}

/// `F`, `F'` and `F''` at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavefunctionValue {
    pub r: f64,
    pub value: f64,
    pub first: f64,
    pub second: f64,
}

impl RadialWavefunction {
    /// Unit-prefactor wavefunction for `state`.
    pub fn unnormalized(state: BoundState, mode: KummerMode) -> Result<Self> {
        if !(state.epsilon > 0.0) {
            return Err(Error::NoBoundState(format!("eps = {} is not positive", state.epsilon)));
        }
        let c = match mode {
            KummerMode::OdeConsistent => 2.0 * state.channel.a + 2.0,
            KummerMode::PaperLiteral => 2.0 * state.b_value + 2.0,
        };
        Ok(Self {
            kummer_coeffs: kummer_coefficients(state.n, c)?,
            state,
            c,
            norm_constant: 1.0,
            mode,
        })
    }

    /// Unit-norm wavefunction for `state`.
    pub fn normalized(state: BoundState, mode: KummerMode) -> Result<Self> {
        normalize(&Self::unnormalized(state, mode)?)
    }

    pub fn a(&self) -> f64 {
        self.state.channel.a
    }

    pub fn epsilon(&self) -> f64 {
        self.state.epsilon
    }

    /// Kummer factor `chi(r) = 1F1(-n, c; 2 eps r)`.
    pub fn kummer_factor(&self, r: f64) -> f64 {
        horner(&self.kummer_coeffs, 2.0 * self.epsilon() * r)
    }

    /// `chi'(r) / chi(r)`.
    pub fn kummer_log_derivative(&self, r: f64) -> f64 {
        let z = Jet::variable(r, 1).scale(2.0 * self.epsilon());
        let chi = z.compose_poly(&self.kummer_coeffs);
        chi.coeffs()[1] / chi.value()
    }

    /// Jet of `F` at `r`, order 2.
    pub fn jet(&self, r: f64) -> Result<Jet> {
        if !(r > 0.0) {
            return Err(Error::DomainError(format!("wavefunction needs r > 0, got {r}")));
        }
        let eps = self.epsilon();
        let power = Jet::power(r, self.a() + 1.0, 2)?;
        let decay = Jet::exp_linear(r, -eps, 2);
        let chi = Jet::variable(r, 2).scale(2.0 * eps).compose_poly(&self.kummer_coeffs);
        Ok(power.mul(&decay).mul(&chi).scale(self.norm_constant))
    }

    pub fn eval(&self, r: f64) -> Result<WavefunctionValue> {
        let j = self.jet(r)?;
        Ok(WavefunctionValue {
            r,
            value: j.coeffs()[0],
            first: j.coeffs()[1],
            second: 2.0 * j.coeffs()[2],
        })
    }

    /// `int_0^inf F^2 dr` for the current prefactor.
    pub fn norm_squared(&self) -> Result<f64> {
        Ok(self.norm_constant * self.norm_constant * shape_integral(self)?)
    }

    /// Interior zeros on `(0, inf)`, counted as sign changes of the Kummer
    /// factor over a fine grid covering every possible root.
    pub fn interior_nodes(&self) -> usize {
        let n = self.state.n as f64;
        // Laguerre roots lie below 4n + 2(c - 1) + 2
        let z_max = 4.0 * n + 2.0 * self.c.abs() + 10.0;
        let eps = self.epsilon();
        let steps = 20_000;
        let mut count = 0;
        let mut prev = self.kummer_factor(0.0);
        for i in 1..=steps {
            let r = z_max * i as f64 / steps as f64 / (2.0 * eps);
            let v = self.kummer_factor(r);
            if v != 0.0 && prev != 0.0 && (v < 0.0) != (prev < 0.0) {
                count += 1;
            }
            if v != 0.0 {
                prev = v;
            }
        }
        count
    }
}

/// `int_0^inf r^{2A+2} e^{-2 eps r} chi(2 eps r)^2 dr`.
fn shape_integral(wf: &RadialWavefunction) -> Result<f64> {
    let a = wf.a();
    let eps = wf.epsilon();
    let n = wf.state.n;
    let power = 2.0 * a + 2.0;
    let chi = |x: f64| horner(&wf.kummer_coeffs, x);
    // substitute x = 2 eps r
    let scale = (2.0 * eps).powf(-(power + 1.0));
    let reduced = if a.fract() == 0.0 {
        let nodes = 2 * (n + a as usize) + 4;
        GaussLaguerre::new(nodes).integrate(|x| {
            let k = chi(x);
            x.powf(power) * k * k
        })
    } else {
        adaptive_gk_half_line(
            |x| {
                let k = chi(x);
                x.powf(power) * k * k * (-x).exp()
            },
            1e-13,
        )?
    };
    let integral = scale * reduced;
    if !(integral.is_finite() && integral > 0.0) {
        return Err(Error::QuadratureFail(format!("norm integral {integral} is not positive")));
    }
    Ok(integral)
}

/// Rescales so that `int_0^inf F^2 dr = 1`.
pub fn normalize(wf: &RadialWavefunction) -> Result<RadialWavefunction> {
    let shape = shape_integral(wf)?;
    let mut out = wf.clone();
    out.norm_constant = 1.0 / shape.sqrt();
    // the adaptive branch is accepted only if it reproduces unit norm
    if wf.a().fract() != 0.0 {
        let check = out.norm_squared()?;
        if (check - 1.0).abs() > NORMALIZATION_RTOL {
            return Err(Error::QuadratureFail(format!("norm check gave {check}")));
        }
    }
    Ok(out)
}

/// Residual of `F'' + (-eps^2 - A(A+1)/r^2 + B/r) F` using the state's eps, B.
pub fn ode_residual(wf: &RadialWavefunction, state: &BoundState, r: f64) -> Result<f64> {
    let v = wf.eval(r)?;
    let a = state.channel.a;
    let coef = -state.epsilon * state.epsilon - a * (a + 1.0) / (r * r) + state.b_value / r;
    Ok(v.second + coef * v.value)
}

/// `|residual| / max(|F''|, eps^2 |F|, eps |F'|)`.
pub fn relative_ode_residual(wf: &RadialWavefunction, state: &BoundState, r: f64) -> Result<f64> {
    let v = wf.eval(r)?;
    let res = ode_residual(wf, state, r)?;
    let eps = state.epsilon;
    let scale = v
        .second
        .abs()
        .max(eps * eps * v.value.abs())
        .max(eps * v.first.abs());
    if scale == 0.0 {
        return Ok(res.abs());
    }
    Ok(res.abs() / scale)
}

/// `count` points spaced geometrically over `[lo, hi]`.
pub fn geometric_samples(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let ratio = (hi / lo).ln();
    (0..count)
        .map(|i| lo * (ratio * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Largest relative ODE residual over 200 geometric samples in `[0.05, 25]`.
pub fn max_relative_residual(wf: &RadialWavefunction, state: &BoundState) -> Result<f64> {
    geometric_samples(0.05, 25.0, 200)
        .into_iter()
        .map(|r| relative_ode_residual(wf, state, r))
        .try_fold(0.0f64, |m, x| x.map(|x| m.max(x)))
}
