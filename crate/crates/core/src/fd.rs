//! Finite-difference oracle for the effective radial equation.
//!
//! The operator `-d^2/dr^2 + A(A+1)/r^2 - B/r` is discretized with central
//! differences on a uniform grid with Dirichlet ends; a bound state has
//! eigenvalue `-eps^2`. Because `B` depends on `E`, the energy is found by a
//! damped fixed-point loop.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BoundState, EffectiveChannel};
use crate::tridiag::{SturmCount, SymTridiagonal};

pub const DEFAULT_R_MIN: f64 = 1e-4;
pub const DEFAULT_R_MAX: f64 = 40.0;
pub const DEFAULT_H: f64 = 1e-3;
pub const MIN_GRID_POINTS: usize = 50;
pub const MAX_ITERATIONS: usize = 200;
pub const CONVERGENCE_TOL: f64 = 1e-10;
pub const DAMPING: f64 = 0.5;

/// Uniform grid with `count` interior points `r_i = r_min + (i+1) h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RadialGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub h: f64,
    pub count: usize,
}

impl RadialGrid {
    /// Grid on `[r_min, r_max]` with spacing as close to `h` as divides the
    /// interval evenly.
    pub fn new(r_min: f64, r_max: f64, h: f64) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min && h > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "need 0 < rMin < rMax and h > 0, got ({r_min}, {r_max}, {h})"
            )));
        }
        let cells = ((r_max - r_min) / h).round().max(1.0) as usize;
        let count = cells - 1;
        if count < MIN_GRID_POINTS {
            return Err(Error::InvalidGrid(format!(
                "{count} interior points, need at least {MIN_GRID_POINTS}"
            )));
        }
        Ok(Self {
            r_min,
            r_max,
            h: (r_max - r_min) / cells as f64,
            count,
        })
    }

    pub fn point(&self, i: usize) -> f64 {
        self.r_min + (i + 1) as f64 * self.h
    }

    /// Same interval with half the spacing.
    pub fn halved(&self) -> Self {
        let cells = 2 * (self.count + 1);
        Self {
            h: (self.r_max - self.r_min) / cells as f64,
            count: cells - 1,
            ..*self
        }
    }
}

impl Default for RadialGrid {
    fn default() -> Self {
        Self::new(DEFAULT_R_MIN, DEFAULT_R_MAX, DEFAULT_H).expect("default grid is valid")
    }
}

/// Symmetric tridiagonal discretization of the radial operator.
///
/// Every row is `2/h^2 + V_i` with `V_i = A(A+1)/r_i^2 - B/r_i` and the
/// off-diagonal is the constant `-1/h^2`. Eigenvalue counts use the pivots
/// in the offset form `h^2 q_i = 1 + tau_i`,
///
/// ```text
/// tau_i = h^2 (V_i - x) + tau_{i-1} / (1 + tau_{i-1}),   tau_0 = 1 + h^2 (V_0 - x)
/// ```
///
/// which never forms `2/h^2 - x` and so keeps the small eigenvalues accurate
/// relative to `V` rather than to `1/h^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    pub grid: RadialGrid,
    pub off_diagonal: f64,
    potential: Vec<f64>,
}

impl TridiagonalOperator {
    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let two = -2.0 * self.off_diagonal;
        self.potential.iter().map(|v| two + v).collect()
    }

    /// The same matrix in general tridiagonal form.
    pub fn matrix(&self) -> SymTridiagonal {
        SymTridiagonal::new(self.diagonal(), vec![self.off_diagonal; self.grid.count - 1])
    }
}

impl SturmCount for TridiagonalOperator {
    fn dim(&self) -> usize {
        self.potential.len()
    }

    fn count_below(&self, x: f64) -> usize {
        let h2 = self.grid.h * self.grid.h;
        let tiny = f64::EPSILON * f64::EPSILON;
        let mut count = 0;
        let mut tau = 0.0;
        for (i, v) in self.potential.iter().enumerate() {
            let w = h2 * (v - x);
            tau = if i == 0 { 1.0 + w } else { w + tau / (1.0 + tau) };
            if (1.0 + tau).abs() < tiny {
                tau = -1.0 - tiny;
            }
            if 1.0 + tau < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn spectrum_bounds(&self) -> (f64, f64) {
        let (lo, hi) = self
            .potential
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        let band = -4.0 * self.off_diagonal;
        let pad = f64::EPSILON * (lo.abs().max(hi.abs()) + band);
        (lo - pad, hi + band + pad)
    }
}

/// `d_i = 2/h^2 + A(A+1)/r_i^2 - B/r_i`, off-diagonal `-1/h^2`.
pub fn discretize(a: f64, b: f64, grid: &RadialGrid) -> Result<TridiagonalOperator> {
    if !(a >= 0.0) {
        return Err(Error::DomainError(format!("A must be >= 0, got {a}")));
    }
    let centrifugal = a * (a + 1.0);
    let potential = (0..grid.count)
        .map(|i| {
            let r = grid.point(i);
            centrifugal / (r * r) - b / r
        })
        .collect();
    Ok(TridiagonalOperator {
        grid: *grid,
        off_diagonal: -1.0 / (grid.h * grid.h),
        potential,
    })
}

/// `k`-th smallest eigenvalue by Sturm counting and bisection.
pub fn tridiag_eigen_k(op: &TridiagonalOperator, k: usize) -> Result<f64> {
    if k >= op.grid.count {
        return Err(Error::DomainError(format!(
            "eigenvalue index {k} outside 0..{}",
            op.grid.count
        )));
    }
    Ok(op.eigenvalue(k))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdSolution {
    pub state: BoundState,
    /// Converged eigenvalue `-eps^2`.
    pub eigenvalue: f64,
    pub iterations: usize,
    /// Negative-energy partner `-sqrt(m0^2 - eps^2)`, diagnostic only.
    pub negative_branch: f64,
}

/// Damped fixed point `E -> B(E) -> mu_n -> sqrt(m0^2 + mu_n)` on the
/// positive-energy branch. The damping factor starts at 0.5 and is halved
/// whenever the undamped step grows.
pub fn self_consistent_energy(
    channel: &EffectiveChannel,
    n: usize,
    grid: &RadialGrid,
    initial: Option<f64>,
) -> Result<FdSolution> {
    let m0 = channel.setup.m0;
    let mut energy = initial.unwrap_or(0.9 * m0);
    let mut omega = DAMPING;
    let mut last_step = f64::INFINITY;
    let mut mu_prev: Option<f64> = None;
    for iteration in 1..=MAX_ITERATIONS {
        let op = discretize(channel.a, channel.b_of(energy), grid)?;
        if n >= grid.count {
            return Err(Error::DomainError(format!("level {n} exceeds grid size")));
        }
        let mu = match mu_prev {
            Some(m) => {
                let w = 1e-3 * m.abs().max(1e-6);
                op.eigenvalue_near(n, m - w, m + w)
            }
            None => op.eigenvalue(n),
        };
        if mu >= 0.0 {
            return Err(Error::PositiveEigenvalue(mu));
        }
        mu_prev = Some(mu);
        let eps2 = -mu;
        let target = (m0 * m0 - eps2).max(0.0).sqrt();
        let step = target - energy;
        if step.abs() < CONVERGENCE_TOL {
            let state = BoundState::from_energy(*channel, n, target)?;
            return Ok(FdSolution {
                state,
                eigenvalue: mu,
                iterations: iteration,
                negative_branch: -target,
            });
        }
        if step.abs() > last_step && omega > 1.0 / 1024.0 {
            omega *= 0.5;
        }
        last_step = step.abs();
        energy += omega * step;
    }
    Err(Error::NotConverged {
        iterations: MAX_ITERATIONS,
        last_step,
    })
}
