//! Asymptotic iteration method.
//!
//! For `y'' = lambda0 y' + s0 y` the recursion
//!
//! ```text
//! lambda_n = lambda_{n-1}' + s_{n-1} + lambda0 lambda_{n-1}
//! s_n      = s_{n-1}'      + s0 lambda_{n-1}
//! ```
//!
//! terminates when `delta_n = lambda_{n-1} s_n - lambda_n s_{n-1}` vanishes.
//! Two engines share the recursion through [`AimAlgebra`]: exact rational
//! functions ([`RationalFn`]) and Taylor jets at a fixed point ([`Jet`]).

use num_rational::BigRational;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::RationalFn;
use crate::jet::Jet;
use crate::model::{exact_coefficients, BoundState, CoulombCoefficients, EffectiveChannel};
use crate::precise::{delta_precise, DeltaEvaluation};
use crate::spectrum::bound_state_energy;

/// Extra jet order on top of the iteration depth.
pub const JET_ORDER_MARGIN: usize = 2;
/// Uniform scan size over the energy window.
pub const SCAN_POINTS: usize = 200;
/// Absolute bisection tolerance on E.
pub const BISECTION_TOL: f64 = 1e-12;
/// Allowed relative drift of a root between depths N and N + 5.
pub const STABILITY_RTOL: f64 = 1e-9;
/// Depth increment used by the stability test.
pub const STABILITY_EXTRA_DEPTH: usize = 5;
/// Default iteration depth.
pub const DEFAULT_DEPTH: usize = 40;

/// Arithmetic the recursion needs.
pub trait AimAlgebra: Clone + Send + Sync {
    fn derivative(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn is_identically_zero(&self) -> bool;
    /// Ok when `depth` levels can be generated from this seed.
    fn check_depth(&self, depth: usize) -> Result<()>;
    /// Value at `r` as a float.
    fn value_at(&self, r: f64) -> Result<f64>;
}

impl AimAlgebra for Jet {
    fn derivative(&self) -> Self {
        Jet::derivative(self)
    }
    fn add(&self, other: &Self) -> Self {
        Jet::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        Jet::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        Jet::mul(self, other)
    }
    fn is_identically_zero(&self) -> bool {
        self.coeffs().iter().all(|&c| c == 0.0)
    }
    fn check_depth(&self, depth: usize) -> Result<()> {
        let required = depth + JET_ORDER_MARGIN;
        if self.order() < required {
            return Err(Error::OrderExhausted {
                requested: depth,
                available: self.order(),
                required,
            });
        }
        Ok(())
    }
    fn value_at(&self, r: f64) -> Result<f64> {
        if r != self.base() {
            return Err(Error::DomainError(format!(
                "jet at r0 = {} cannot be evaluated at r = {r}",
                self.base()
            )));
        }
        Ok(self.value())
    }
}

impl AimAlgebra for RationalFn {
    fn derivative(&self) -> Self {
        RationalFn::derivative(self)
    }
    fn add(&self, other: &Self) -> Self {
        RationalFn::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        RationalFn::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        RationalFn::mul(self, other)
    }
    fn is_identically_zero(&self) -> bool {
        self.is_zero()
    }
    fn check_depth(&self, _depth: usize) -> Result<()> {
        Ok(())
    }
    fn value_at(&self, r: f64) -> Result<f64> {
        self.eval_f64(r).ok_or(Error::PoleAtR(r))
    }
}

/// Every level `(lambda_n, s_n)` for `n = 0..=N` and the determinants
/// `delta_1..=delta_N`.
#[derive(Debug, Clone)]
pub struct AimTrace<T> {
    levels: Vec<(T, T)>,
    deltas: Vec<T>,
}

impl<T: AimAlgebra> AimTrace<T> {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[(T, T)] {
        &self.levels
    }

    pub fn lambda(&self, n: usize) -> &T {
        &self.levels[n].0
    }

    pub fn s(&self, n: usize) -> &T {
        &self.levels[n].1
    }

    /// Cached `delta_n`, `n >= 1`.
    pub fn delta(&self, n: usize) -> Option<&T> {
        n.checked_sub(1).and_then(|i| self.deltas.get(i))
    }
}

fn next_level<T: AimAlgebra>(lambda0: &T, s0: &T, lambda: &T, s: &T) -> (T, T) {
    let lambda_next = lambda.derivative().add(s).add(&lambda0.mul(lambda));
    let s_next = s.derivative().add(&s0.mul(lambda));
    (lambda_next, s_next)
}

fn determinant<T: AimAlgebra>(prev: &(T, T), cur: &(T, T)) -> T {
    prev.0.mul(&cur.1).sub(&cur.0.mul(&prev.1))
}

/// Runs the recursion to depth `N`.
pub fn aim_iterate<T: AimAlgebra>(lambda0: T, s0: T, depth: usize) -> Result<AimTrace<T>> {
    if depth < 1 {
        return Err(Error::DomainError("AIM depth must be >= 1".into()));
    }
    if lambda0.is_identically_zero() {
        return Err(Error::DomainError("lambda0 vanishes identically".into()));
    }
    lambda0.check_depth(depth)?;
    s0.check_depth(depth)?;
    let mut levels = Vec::with_capacity(depth + 1);
    let mut deltas = Vec::with_capacity(depth);
    levels.push((lambda0.clone(), s0.clone()));
    for n in 1..=depth {
        let (lam, s) = &levels[n - 1];
        let next = next_level(&lambda0, &s0, lam, s);
        deltas.push(determinant(&levels[n - 1], &next));
        levels.push(next);
    }
    Ok(AimTrace { levels, deltas })
}

/// `delta_n = lambda_{n-1} s_n - lambda_n s_{n-1}`, recomputed from the levels.
pub fn termination_delta<T: AimAlgebra>(trace: &AimTrace<T>, n: usize) -> Result<T> {
    if n < 1 || n > trace.depth() {
        return Err(Error::DomainError(format!(
            "delta level {n} outside 1..={}",
            trace.depth()
        )));
    }
    Ok(determinant(&trace.levels[n - 1], &trace.levels[n]))
}

/// `alpha = s_n / lambda_n` at `r` (the jet engine only knows its base point).
pub fn generator_alpha<T: AimAlgebra>(trace: &AimTrace<T>, n: usize, r: f64) -> Result<f64> {
    if n > trace.depth() {
        return Err(Error::DomainError(format!("level {n} beyond depth {}", trace.depth())));
    }
    let lambda = trace.lambda(n).value_at(r)?;
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::PoleAtR(r));
    }
    Ok(trace.s(n).value_at(r)? / lambda)
}

/// `alpha = s_n / lambda_n` as an exact rational function.
pub fn generator_alpha_exact(trace: &AimTrace<RationalFn>, n: usize) -> Result<RationalFn> {
    if n > trace.depth() {
        return Err(Error::DomainError(format!("level {n} beyond depth {}", trace.depth())));
    }
    trace.s(n).div(trace.lambda(n))
}

/// `eps_n = B / (2(n + A + 1))`.
pub fn quantized_epsilon_closed(a: f64, b: f64, n: usize) -> Result<f64> {
    if !(b > 0.0) {
        return Err(Error::NoBoundState(format!("B = {b} is not positive")));
    }
    Ok(b / (2.0 * (n as f64 + a + 1.0)))
}

/// True iff the reduced numerator of `delta_{n+1}` is the zero polynomial.
pub fn exact_termination_check(
    a: &BigRational,
    b: &BigRational,
    epsilon: &BigRational,
    n: usize,
) -> Result<bool> {
    Ok(exact_delta(a, b, epsilon, n + 1)?.numerator().is_zero())
}

/// `delta_level` for the Coulomb coefficients, exactly.
pub fn exact_delta(
    a: &BigRational,
    b: &BigRational,
    epsilon: &BigRational,
    level: usize,
) -> Result<RationalFn> {
    let (lambda0, s0) = exact_coefficients(a, b, epsilon)?;
    let trace = aim_iterate(lambda0, s0, level)?;
    termination_delta(&trace, level)
}

/// `delta_N(r0)` at energy `E`, evaluated in extended precision.
pub fn delta_at_energy(channel: &EffectiveChannel, energy: f64, r0: f64, depth: usize) -> Result<f64> {
    Ok(delta_evaluation_at_energy(channel, energy, r0, depth)?.value)
}

/// As [`delta_at_energy`], also reporting the size of `delta_N` relative to
/// the two products it is the difference of.
pub fn delta_evaluation_at_energy(
    channel: &EffectiveChannel,
    energy: f64,
    r0: f64,
    depth: usize,
) -> Result<DeltaEvaluation> {
    let epsilon = channel.epsilon_of(energy);
    let coeffs = CoulombCoefficients::new(channel.a, channel.b_of(energy), epsilon)?;
    delta_precise(&coeffs, r0, depth)
}

pub fn delta_for_coefficients(coeffs: &CoulombCoefficients, r0: f64, depth: usize) -> Result<f64> {
    Ok(delta_precise(coeffs, r0, depth)?.value)
}

/// Options for [`aim_energy_solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AimSolveOptions {
    pub depth: usize,
    /// Evaluation point; defaults to `(A+1)/eps_hat`.
    pub r0: Option<f64>,
    /// Energy window; defaults to [`default_window`].
    pub window: Option<(f64, f64)>,
    pub scan_points: usize,
    /// Number of times the scan density may be doubled when no root of the
    /// requested level is resolved.
    pub max_refinements: usize,
}

impl Default for AimSolveOptions {
    fn default() -> Self {
        Self {
            depth: DEFAULT_DEPTH,
            r0: None,
            window: None,
            scan_points: SCAN_POINTS,
            max_refinements: 4,
        }
    }
}

/// A sign change of `delta_N(r0; E)` refined by bisection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootCandidate {
    pub energy: f64,
    pub epsilon: f64,
    pub b_value: f64,
    /// Root of `delta_{N+5}` near this one, if found.
    pub energy_deeper: Option<f64>,
    pub stable: bool,
    /// `B / (2 eps) - A - 1`: the level this root quantizes.
    pub effective_level: f64,
}

#[derive(Debug, Clone)]
pub struct AimSolution {
    pub state: BoundState,
    pub r0: f64,
    pub depth: usize,
    pub window: (f64, f64),
    pub candidates: Vec<RootCandidate>,
}

/// `(A+1)/eps_hat` from the closed-form level, else 1.
pub fn default_r0(channel: &EffectiveChannel, n: usize) -> f64 {
    match bound_state_energy(channel, n) {
        Ok(state) => (channel.a + 1.0) / state.epsilon,
        Err(_) => 1.0,
    }
}

fn full_window(m0: f64) -> (f64, f64) {
    let pad = 1e-9 * m0;
    (-m0 + pad, m0 - pad)
}

/// Window around the closed-form estimate of level `n`, reaching halfway to
/// the neighbouring levels; the full `(-m0, m0)` range when no estimate exists.
pub fn default_window(channel: &EffectiveChannel, n: usize) -> (f64, f64) {
    let m0 = channel.setup.m0;
    let full = full_window(m0);
    let Ok(centre) = bound_state_energy(channel, n) else {
        return full;
    };
    let e = centre.energy;
    let below = n
        .checked_sub(1)
        .and_then(|m| bound_state_energy(channel, m).ok())
        .map(|s| (s.energy - e).abs());
    let above = bound_state_energy(channel, n + 1).ok().map(|s| (s.energy - e).abs());
    let half = match (below, above) {
        (Some(x), Some(y)) => 0.5 * x.min(y),
        (Some(x), None) | (None, Some(x)) => 0.5 * x,
        (None, None) => return full,
    };
    ((e - half).max(full.0), (e + half).min(full.1))
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, mut flo: f64, tol: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Sign-change brackets of `f` on a uniform grid, evaluated in parallel.
/// Points where `f` is not finite are skipped.
fn sign_brackets<F: Fn(f64) -> f64 + Sync>(f: &F, grid: &[f64]) -> Vec<(f64, f64, f64)> {
    let values: Vec<f64> = grid.par_iter().map(|&e| f(e)).collect();
    let mut out = Vec::new();
    for i in 0..grid.len().saturating_sub(1) {
        let (a, b) = (values[i], values[i + 1]);
        if !(a.is_finite() && b.is_finite()) {
            continue;
        }
        if a == 0.0 {
            out.push((grid[i], grid[i], a));
        } else if (a < 0.0) != (b < 0.0) && b != 0.0 {
            out.push((grid[i], grid[i + 1], a));
        }
    }
    out
}

/// Finds the energy of level `n` as a root of `delta_N(r0; E)`.
pub fn aim_energy_solve(
    channel: &EffectiveChannel,
    n: usize,
    options: &AimSolveOptions,
) -> Result<AimSolution> {
    let m0 = channel.setup.m0;
    let depth = options.depth;
    if depth < n + 2 {
        return Err(Error::Unstable(format!(
            "depth {depth} is below n + 2 = {} for level {n}",
            n + 2
        )));
    }
    let r0 = options.r0.unwrap_or_else(|| default_r0(channel, n));
    if !(r0 > 0.0) {
        return Err(Error::DomainError(format!("r0 must be > 0, got {r0}")));
    }
    let (lo, hi) = options.window.unwrap_or_else(|| default_window(channel, n));
    if !(-m0 < lo && lo < hi && hi < m0) {
        return Err(Error::DomainError(format!(
            "search window ({lo}, {hi}) must satisfy -m0 < Elo < Ehi < m0"
        )));
    }

    let bound = |e: f64| channel.b_of(e) > 0.0 && channel.epsilon_of(e) > 0.0;
    let delta = |d: usize| {
        move |e: f64| {
            if !bound(e) {
                return f64::NAN;
            }
            delta_at_energy(channel, e, r0, d).unwrap_or(f64::NAN)
        }
    };
    let delta_n = delta(depth);
    let delta_deep = delta(depth + STABILITY_EXTRA_DEPTH);
    let principal = |m: f64| m + channel.a + 1.0;

    let mut points = options.scan_points.max(3);
    let mut candidates: Vec<RootCandidate> = Vec::new();
    for _ in 0..=options.max_refinements {
        let grid = linspace(lo, hi, points);
        if !grid.iter().any(|&e| bound(e)) {
            return Err(Error::NoBoundState(format!(
                "B(E) <= 0 over the whole window ({lo}, {hi})"
            )));
        }
        let cell = (hi - lo) / (points - 1) as f64;
        candidates = sign_brackets(&delta_n, &grid)
            .into_par_iter()
            .map(|(a, b, fa)| {
                let root = if a == b { a } else { bisect(delta_n, a, b, fa, BISECTION_TOL) };
                let deeper = deeper_root(&delta_deep, root, (a, b), cell, lo, hi);
                let stable = deeper.is_some_and(|d| {
                    (d - root).abs() <= STABILITY_RTOL * root.abs().max(f64::EPSILON * m0)
                });
                let epsilon = channel.epsilon_of(root);
                let b_value = channel.b_of(root);
                RootCandidate {
                    energy: root,
                    epsilon,
                    b_value,
                    energy_deeper: deeper,
                    stable,
                    effective_level: b_value / (2.0 * epsilon) - channel.a - 1.0,
                }
            })
            .collect();
        let hit = candidates
            .iter()
            .any(|c| c.stable && (c.effective_level - n as f64).abs() < 0.5);
        if hit {
            break;
        }
        points = 2 * (points - 1) + 1;
    }

    let residual = |c: &RootCandidate| {
        let target = c.b_value / (2.0 * principal(n as f64));
        (c.epsilon - target).abs() / c.epsilon
    };
    let best = candidates
        .iter()
        .filter(|c| c.stable && (c.effective_level - n as f64).abs() < 0.5)
        .min_by(|x, y| residual(x).total_cmp(&residual(y)));
    match best {
        Some(c) => Ok(AimSolution {
            state: BoundState::from_energy(*channel, n, c.energy)?,
            r0,
            depth,
            window: (lo, hi),
            candidates,
        }),
        None if candidates.iter().any(|c| !c.stable) => Err(Error::Unstable(format!(
            "{} root(s) in window drift by more than {STABILITY_RTOL:e} between depths {depth} and {}",
            candidates.iter().filter(|c| !c.stable).count(),
            depth + STABILITY_EXTRA_DEPTH
        ))),
        None => Err(Error::NoRootInWindow),
    }
}

/// Root of the deeper determinant near `root`: first in the scan cell that
/// bracketed it, then anywhere within one cell on either side.
fn deeper_root<F: Fn(f64) -> f64>(
    f: &F,
    root: f64,
    bracket: (f64, f64),
    cell: f64,
    lo: f64,
    hi: f64,
) -> Option<f64> {
    let (a, b) = bracket;
    if a < b {
        let (fa, fb) = (f(a), f(b));
        if fa.is_finite() && fb.is_finite() && fa != 0.0 && (fa < 0.0) != (fb < 0.0) {
            return Some(bisect(f, a, b, fa, BISECTION_TOL));
        }
    }
    let a = (root - cell).max(lo);
    let b = (root + cell).min(hi);
    let grid = linspace(a, b, 21);
    let values: Vec<f64> = grid.iter().map(|&e| f(e)).collect();
    let mut best: Option<f64> = None;
    for i in 0..grid.len() - 1 {
        let (fa, fb) = (values[i], values[i + 1]);
        if !(fa.is_finite() && fb.is_finite()) {
            continue;
        }
        let r = if fa == 0.0 {
            grid[i]
        } else if (fa < 0.0) != (fb < 0.0) {
            bisect(f, grid[i], grid[i + 1], fa, BISECTION_TOL)
        } else {
            continue;
        };
        if best.is_none_or(|x| (x - root).abs() > (r - root).abs()) {
            best = Some(r);
        }
    }
    best
}
