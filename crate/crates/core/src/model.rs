//! Physical setup of the Dirac-Coulomb problem with position-dependent mass
//! and its reduction to the effective radial equation
//!
//! ```text
//! F'' + (-eps^2 - A(A+1)/r^2 + B/r) F = 0,    B(E) = beta0 + beta1 E
//! ```
//!
//! for either spinor component.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::RationalFn;
use crate::jet::Jet;

/// Relative tolerance used when checking floating-point invariants.
pub const INVARIANT_RTOL: f64 = 1e-12;

/// Rest mass, Coulomb strength, scalar/vector ratio and the relativistic
/// quantum number `k`. Natural units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalSetup {
    pub m0: f64,
    pub v0: f64,
    pub b: f64,
    pub k: i64,
}

impl PhysicalSetup {
    pub fn new(m0: f64, v0: f64, b: f64, k: i64) -> Result<Self> {
        let setup = Self { m0, v0, b, k };
        setup.validate()?;
        Ok(setup)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m0.is_finite() && self.m0 > 0.0) {
            return Err(Error::InvalidSetup(format!("m0 must be > 0, got {}", self.m0)));
        }
        if !self.v0.is_finite() {
            return Err(Error::InvalidSetup(format!("V0 must be finite, got {}", self.v0)));
        }
        if !(self.b.is_finite() && self.b >= 0.0) {
            return Err(Error::InvalidSetup(format!("b must be >= 0, got {}", self.b)));
        }
        if self.k == 0 {
            return Err(Error::InvalidSetup("k must be nonzero".into()));
        }
        Ok(())
    }

    /// Vector potential V(r) = V0/r.
    pub fn vector_potential(&self, r: f64) -> f64 {
        self.v0 / r
    }

    /// Scalar potential S(r) = (b-1) V0/r.
    pub fn scalar_potential(&self, r: f64) -> f64 {
        (self.b - 1.0) * self.v0 / r
    }

    /// Sigma(r) = V + S = b V0/r.
    pub fn sigma(&self, r: f64) -> f64 {
        self.b * self.v0 / r
    }

    /// Delta(r) = V - S = (2-b) V0/r.
    pub fn delta(&self, r: f64) -> f64 {
        (2.0 - self.b) * self.v0 / r
    }

    /// Orbital label `l` for `k < 0` (where `k = -(l+1)`), otherwise `l = k`.
    pub fn orbital_l(&self) -> i64 {
        if self.k < 0 {
            -self.k - 1
        } else {
            self.k
        }
    }
}

/// Which radial function of the Dirac spinor is being solved for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinorComponent {
    Upper,
    Lower,
}

impl SpinorComponent {
    pub fn as_str(&self) -> &'static str {
        match self {
            SpinorComponent::Upper => "upper",
            SpinorComponent::Lower => "lower",
        }
    }
}

impl std::fmt::Display for SpinorComponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SpinorComponent {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "upper" => Ok(SpinorComponent::Upper),
            "lower" => Ok(SpinorComponent::Lower),
            other => Err(format!("unknown spinor component '{other}'")),
        }
    }
}

/// Parameters of the effective radial equation for one spinor component.
///
/// `B` depends on the unknown energy, so it is kept as the affine map
/// `B(E) = beta0 + beta1 E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveChannel {
    pub a: f64,
    pub beta0: f64,
    pub beta1: f64,
    pub component: SpinorComponent,
    pub setup: PhysicalSetup,
}

impl EffectiveChannel {
    /// `B(E)`.
    pub fn b_of(&self, energy: f64) -> f64 {
        self.beta0 + self.beta1 * energy
    }

    /// `eps(E) = sqrt(m0^2 - E^2)`, NaN outside `|E| <= m0`.
    pub fn epsilon_of(&self, energy: f64) -> f64 {
        let m0 = self.setup.m0;
        ((m0 - energy) * (m0 + energy)).sqrt()
    }

    /// A(A+1).
    pub fn centrifugal(&self) -> f64 {
        self.a * (self.a + 1.0)
    }

    /// Right-hand side the channel's A(A+1) must reproduce.
    pub fn centrifugal_target(&self) -> f64 {
        centrifugal_rhs(&self.setup, self.component)
    }

    pub fn coefficients(&self, energy: f64) -> Result<CoulombCoefficients> {
        effective_coefficients(self, energy, self.epsilon_of(energy))
    }
}

fn centrifugal_rhs(setup: &PhysicalSetup, component: SpinorComponent) -> f64 {
    let k = setup.k as f64;
    match component {
        SpinorComponent::Upper => k * (k + 1.0),
        SpinorComponent::Lower => {
            let b = setup.b;
            k * (k - 1.0) + 4.0 * setup.v0 * setup.v0 * (b * b - 3.0 * b + 2.0)
        }
    }
}

/// Builds the effective channel, taking the nonnegative root of A(A+1) = RHS.
pub fn make_channel(setup: PhysicalSetup, component: SpinorComponent) -> Result<EffectiveChannel> {
    setup.validate()?;
    let rhs = centrifugal_rhs(&setup, component);
    let disc = 0.25 + rhs;
    if disc < 0.0 {
        return Err(Error::NegativeDiscriminant { rhs });
    }
    let a = match component {
        // k(k+1) = A(A+1) has the integer roots k and -k-1.
        SpinorComponent::Upper => {
            if setup.k >= 0 {
                setup.k as f64
            } else {
                (-setup.k - 1) as f64
            }
        }
        SpinorComponent::Lower => {
            let k = setup.k;
            if rhs == (k * (k - 1)) as f64 {
                // roots k-1 and -k
                (k - 1).max(-k) as f64
            } else {
                -0.5 + disc.sqrt()
            }
        }
    };
    let (m0, v0, b) = (setup.m0, setup.v0, setup.b);
    let (beta0, beta1) = match component {
        SpinorComponent::Upper => (-2.0 * m0 * v0, -2.0 * v0),
        SpinorComponent::Lower => (2.0 * (2.0 * b - 3.0) * m0 * v0, 2.0 * v0),
    };
    Ok(EffectiveChannel {
        a,
        beta0,
        beta1,
        component,
        setup,
    })
}

/// Position-dependent mass that removes the derivative coupling term.
///
/// Upper: `M(r) = (2-b) V0/r + m0`; lower: `M(r) = (b-2) V0/r + m0`.
pub fn mass_function(setup: &PhysicalSetup, component: SpinorComponent, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::DomainError(format!("mass function needs r > 0, got {r}")));
    }
    let perturbation = (2.0 - setup.b) * setup.v0 / r;
    Ok(match component {
        SpinorComponent::Upper => setup.m0 + perturbation,
        SpinorComponent::Lower => setup.m0 - perturbation,
    })
}

/// Jet of `M(r)` at `r0`, used to check the mass constraint `M' = Delta'`.
pub fn mass_function_jet(
    setup: &PhysicalSetup,
    component: SpinorComponent,
    r0: f64,
    order: usize,
) -> Result<Jet> {
    let sign = match component {
        SpinorComponent::Upper => 1.0,
        SpinorComponent::Lower => -1.0,
    };
    let inv = Jet::power(r0, -1.0, order)?;
    Ok(inv.scale(sign * (2.0 - setup.b) * setup.v0).add_scalar(setup.m0))
}

/// Jet of `Delta(r) = (2-b) V0 / r` at `r0`.
pub fn delta_jet(setup: &PhysicalSetup, r0: f64, order: usize) -> Result<Jet> {
    Ok(Jet::power(r0, -1.0, order)?.scale((2.0 - setup.b) * setup.v0))
}

/// AIM coefficient functions of the equation for `chi`, where
/// `F = r^{A+1} e^{-eps r} chi(r)`:
///
/// ```text
/// lambda0(r) = 2 (eps r - A - 1) / r
/// s0(r)      = (2 (A+1) eps - B) / r
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoulombCoefficients {
    pub a: f64,
    pub b: f64,
    pub epsilon: f64,
}

impl CoulombCoefficients {
    pub fn new(a: f64, b: f64, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::DomainError(format!("eps must be > 0, got {epsilon}")));
        }
        Ok(Self { a, b, epsilon })
    }

    pub fn lambda0(&self, r: f64) -> f64 {
        2.0 * (self.epsilon * r - self.a - 1.0) / r
    }

    pub fn s0(&self, r: f64) -> f64 {
        (2.0 * (self.a + 1.0) * self.epsilon - self.b) / r
    }

    /// Taylor jets of `(lambda0, s0)` at `r0`.
    pub fn jets(&self, r0: f64, order: usize) -> Result<(Jet, Jet)> {
        let inv = Jet::power(r0, -1.0, order)?;
        let lambda0 = inv.scale(-2.0 * (self.a + 1.0)).add_scalar(2.0 * self.epsilon);
        let s0 = inv.scale(2.0 * (self.a + 1.0) * self.epsilon - self.b);
        Ok((lambda0, s0))
    }

    /// Exact rational-function form, using the exact binary value of every
    /// float input.
    pub fn exact(&self) -> Result<(RationalFn, RationalFn)> {
        let conv = |x: f64, name: &str| {
            BigRational::from_float(x)
                .ok_or_else(|| Error::DomainError(format!("{name} = {x} is not finite")))
        };
        exact_coefficients(
            &conv(self.a, "A")?,
            &conv(self.b, "B")?,
            &conv(self.epsilon, "eps")?,
        )
    }
}

/// `(lambda0, s0)` as exact rational functions of `r`.
pub fn exact_coefficients(
    a: &BigRational,
    b: &BigRational,
    epsilon: &BigRational,
) -> Result<(RationalFn, RationalFn)> {
    use crate::exact::Poly;
    let two = BigRational::from_integer(2.into());
    let a1 = a + BigRational::from_integer(1.into());
    let r = Poly::monomial(BigRational::from_integer(1.into()), 1);
    // lambda0 = (2 eps r - 2(A+1)) / r
    let lam_num = Poly::from_coeffs(vec![-(&two * &a1), &two * epsilon]);
    let s_num = Poly::constant(&two * &a1 * epsilon - b);
    Ok((
        RationalFn::new(lam_num, r.clone())?,
        RationalFn::new(s_num, r)?,
    ))
}

/// Coefficient functions of the effective equation at energy `E` with the
/// supplied `eps`.
pub fn effective_coefficients(
    channel: &EffectiveChannel,
    energy: f64,
    epsilon: f64,
) -> Result<CoulombCoefficients> {
    CoulombCoefficients::new(channel.a, channel.b_of(energy), epsilon)
}

/// A (possibly approximate) bound state of one channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundState {
    pub n: usize,
    pub channel: EffectiveChannel,
    pub energy: f64,
    pub epsilon: f64,
    pub b_value: f64,
}

impl BoundState {
    /// Builds a state at energy `E`, deriving eps and B from it.
    pub fn from_energy(channel: EffectiveChannel, n: usize, energy: f64) -> Result<Self> {
        let epsilon = channel.epsilon_of(energy);
        if !(epsilon > 0.0) {
            return Err(Error::NoBoundState(format!(
                "eps = sqrt(m0^2 - E^2) is not positive at E = {energy}"
            )));
        }
        Ok(Self {
            n,
            channel,
            energy,
            epsilon,
            b_value: channel.b_of(energy),
        })
    }

    /// n + A + 1.
    pub fn principal(&self) -> f64 {
        self.n as f64 + self.channel.a + 1.0
    }

    /// Relative defect of eps^2 + E^2 = m0^2.
    pub fn mass_shell_residual(&self) -> f64 {
        let m0 = self.channel.setup.m0;
        (self.epsilon * self.epsilon + self.energy * self.energy - m0 * m0).abs() / (m0 * m0)
    }

    /// Relative defect of eps = B / (2(n+A+1)).
    pub fn quantization_residual(&self) -> f64 {
        let target = self.b_value / (2.0 * self.principal());
        (self.epsilon - target).abs() / self.epsilon.abs().max(f64::MIN_POSITIVE)
    }

    /// Checks the bound-state invariants to relative tolerance `rtol`.
    pub fn check_invariants(&self, rtol: f64) -> std::result::Result<(), String> {
        if !(self.epsilon > 0.0) {
            return Err(format!("eps = {} is not positive", self.epsilon));
        }
        if self.energy.abs() >= self.channel.setup.m0 {
            return Err(format!("|E| = {} is not below m0", self.energy.abs()));
        }
        let shell = self.mass_shell_residual();
        if shell > rtol {
            return Err(format!("eps^2 + E^2 - m0^2 relative defect {shell:e}"));
        }
        let quant = self.quantization_residual();
        if quant > rtol {
            return Err(format!("quantization relative defect {quant:e}"));
        }
        Ok(())
    }
}
