//! The AIM determinant at a point, computed exactly.
//!
//! `delta_N` is a small difference of two large products and loses roughly
//! one decimal digit per iteration level in double precision, so past depth
//! twenty the float value is noise. Here the recursion is run in the
//! dimensionless variable `u = r / r0` at `u = 1`, where the Taylor
//! coefficients of `1/u` are `(-1)^k`. Every input is a binary fraction, so
//! with one power-of-two scale per level the whole computation is in big
//! integers and the determinant is exact for the given float inputs.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::float::FloatCore;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::CoulombCoefficients;

/// `delta_N(r0)` together with its size relative to the cancelling terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaEvaluation {
    /// `lambda_{N-1} s_N - lambda_N s_{N-1}`; the magnitude saturates to
    /// zero or infinity outside the float range, the sign is exact.
    pub value: f64,
    /// `value / (|lambda_{N-1} s_N| + |lambda_N s_{N-1}|)`.
    pub relative: f64,
}

/// `mantissa * 2^exponent`.
#[derive(Debug, Clone, PartialEq)]
struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::DomainError(format!("{x} is not finite")));
        }
        let (m, e, sign) = x.integer_decode();
        let mut mantissa = BigInt::from(m);
        if sign < 0 {
            mantissa = -mantissa;
        }
        Ok(Self { mantissa, exponent: e as i64 }.normalized())
    }

    fn normalized(mut self) -> Self {
        if self.mantissa.is_zero() {
            self.exponent = 0;
            return self;
        }
        let tz = self.mantissa.trailing_zeros().unwrap_or(0);
        self.mantissa >>= tz;
        self.exponent += tz as i64;
        self
    }

    fn mul(&self, other: &Self) -> Self {
        Self {
            mantissa: &self.mantissa * &other.mantissa,
            exponent: self.exponent + other.exponent,
        }
        .normalized()
    }

    fn add(&self, other: &Self) -> Self {
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << (self.exponent - e) as usize;
        let b = &other.mantissa << (other.exponent - e) as usize;
        Self { mantissa: a + b, exponent: e }.normalized()
    }

    fn neg(&self) -> Self {
        Self { mantissa: -&self.mantissa, exponent: self.exponent }
    }

    fn scale_pow2(&self, k: i64) -> Self {
        Self { mantissa: self.mantissa.clone(), exponent: self.exponent + k }
    }

    /// `self * 2^q` as an integer; `q` must clear the exponent.
    fn times_pow2(&self, q: i64) -> BigInt {
        let shift = self.exponent + q;
        debug_assert!(shift >= 0);
        &self.mantissa << shift as usize
    }
}

/// `x * 2^shift` as a float, saturating.
fn big_to_f64(x: &BigInt, shift: f64) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let bits = x.bits() as i64;
    let drop = (bits - 64).max(0);
    let top = (x >> drop as usize).to_f64().unwrap_or(0.0);
    let exponent = drop as f64 + shift;
    let log2 = top.abs().log2() + exponent;
    if log2 > 1024.0 {
        return top.signum() * f64::INFINITY;
    }
    if log2 < -1100.0 {
        return top.signum() * 0.0;
    }
    // split to keep the intermediate power of two inside the float range
    let half = (exponent / 2.0).floor();
    top * half.exp2() * (exponent - half).exp2()
}

/// `a / b` as a float, for integers of any size.
fn ratio_to_f64(a: &BigInt, b: &BigInt) -> f64 {
    if a.is_zero() {
        return 0.0;
    }
    let shift = b.bits() as i64 - a.bits() as i64 + 64;
    let q = if shift >= 0 {
        (a << shift as usize).div_floor(b)
    } else {
        a.div_floor(&(b << (-shift) as usize))
    };
    big_to_f64(&q, -(shift as f64))
}

/// `g_k = f_k - g_{k-1}`: multiplication by `1/u` at `u = 1`.
fn over_u(f: &[BigInt]) -> Vec<BigInt> {
    let mut g: Vec<BigInt> = Vec::with_capacity(f.len());
    for (k, fk) in f.iter().enumerate() {
        g.push(if k == 0 { fk.clone() } else { fk - &g[k - 1] });
    }
    g
}

/// Evaluates `delta_N(r0)` for the Coulomb-type coefficients
/// `lambda0 = 2 eps - 2(A+1)/r`, `s0 = (2(A+1) eps - B)/r`.
///
/// With `lambda~_j = r0^{j+1} lambda_j` and `s~_j = r0^{j+2} s_j` in the
/// variable `u`, the integers `L_j = lambda~_j 2^{q(j+1)}` and
/// `S_j = s~_j 2^{q(j+1)}` satisfy
///
/// ```text
/// L_{j+1} = 2^q (L_j' + S_j) + E L_j + K D(L_j)
/// S_{j+1} = 2^q S_j'          + C D(L_j)
/// ```
///
/// where `D` is multiplication by `1/u` and `E, K, C` are the scaled
/// constants `2 eps r0`, `-2(A+1)` and `(2(A+1) eps - B) r0`. Level `j`
/// only needs Taylor order `N - j`.
pub fn delta_precise(coeffs: &CoulombCoefficients, r0: f64, depth: usize) -> Result<DeltaEvaluation> {
    if depth == 0 {
        return Err(Error::DomainError("depth must be >= 1".into()));
    }
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(Error::DomainError(format!("r0 must be > 0, got {r0}")));
    }
    let r0d = Dyadic::from_f64(r0)?;
    let eps = Dyadic::from_f64(coeffs.epsilon)?;
    let a1 = Dyadic::from_f64(coeffs.a)?.add(&Dyadic::from_f64(1.0)?);
    let b = Dyadic::from_f64(coeffs.b)?;

    let e_const = eps.mul(&r0d).scale_pow2(1);
    let k_const = a1.scale_pow2(1).neg();
    let c_const = a1.mul(&eps).scale_pow2(1).add(&b.neg()).mul(&r0d);
    let q = [&e_const, &k_const, &c_const]
        .iter()
        .filter(|d| !d.mantissa.is_zero())
        .map(|d| -d.exponent)
        .fold(0i64, i64::max);
    let e_int = e_const.times_pow2(q);
    let k_int = k_const.times_pow2(q);
    let c_int = if c_const.mantissa.is_zero() { BigInt::zero() } else { c_const.times_pow2(q) };

    // 1/u = sum_k (-1)^k (u - 1)^k
    let alternating = |c: &BigInt| -> Vec<BigInt> {
        (0..=depth).map(|k| if k % 2 == 0 { c.clone() } else { -c }).collect()
    };
    let mut lambda = alternating(&k_int);
    lambda[0] += &e_int;
    let mut s = alternating(&c_int);

    let next = |lambda: &[BigInt], s: &[BigInt]| -> (Vec<BigInt>, Vec<BigInt>) {
        let order = lambda.len() - 1;
        let dl = over_u(&lambda[..order]);
        let mut l = Vec::with_capacity(order);
        let mut t = Vec::with_capacity(order);
        for k in 0..order {
            let up = (k + 1) as u64;
            let lk = ((&lambda[k + 1] * up + &s[k]) << q as usize) + &e_int * &lambda[k] + &k_int * &dl[k];
            let tk = ((&s[k + 1] * up) << q as usize) + &c_int * &dl[k];
            l.push(lk);
            t.push(tk);
        }
        (l, t)
    };

    let mut prev = (std::mem::take(&mut lambda), std::mem::take(&mut s));
    let mut cur = next(&prev.0, &prev.1);
    for _ in 2..=depth {
        let n = next(&cur.0, &cur.1);
        prev = cur;
        cur = n;
    }
    let left = &prev.0[0] * &cur.1[0];
    let right = &cur.0[0] * &prev.1[0];
    let delta = &left - &right;
    let scale = left.abs() + right.abs();
    let relative = if scale.is_zero() { 0.0 } else { ratio_to_f64(&delta, &scale) };

    // undo 2^{q(2N+1)} and r0^{2N+2}
    let n = depth as f64;
    let shift = -(q as f64) * (2.0 * n + 1.0) - (2.0 * n + 2.0) * r0.log2();
    Ok(DeltaEvaluation {
        value: big_to_f64(&delta, shift),
        relative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aim::{aim_iterate, exact_delta};
    use num_rational::BigRational;

    #[test]
    fn matches_float_jets_at_shallow_depth() {
        let c = CoulombCoefficients::new(1.0, 2.3, 0.6).unwrap();
        for &r0 in &[0.4, 1.0, 3.0] {
            let (l, s) = c.jets(r0, 6).unwrap();
            let trace = aim_iterate(l, s, 4).unwrap();
            for n in 1..=4 {
                let float = trace.delta(n).unwrap().value();
                let precise = delta_precise(&c, r0, n).unwrap().value;
                assert!((float - precise).abs() <= 1e-9 * precise.abs(), "n={n} r0={r0}: {float} vs {precise}");
            }
        }
    }

    #[test]
    fn matches_exact_rational_engine() {
        // the same float inputs, carried through the rational-function
        // engine and evaluated at r0
        for &(a, b, eps, r0) in &[(0.0, 1.6, 0.55, 1.25), (2.0, 2.9, 0.3, 10.0), (1.0, 0.7, 0.1, 0.3)] {
            let c = CoulombCoefficients::new(a, b, eps).unwrap();
            let conv = |x: f64| BigRational::from_float(x).unwrap();
            for depth in [1, 4, 9] {
                let exact = exact_delta(&conv(a), &conv(b), &conv(eps), depth).unwrap();
                let expect = exact.eval(&conv(r0)).unwrap();
                let got = delta_precise(&c, r0, depth).unwrap().value;
                let expect = expect.to_f64().unwrap();
                assert!((got - expect).abs() <= 1e-13 * expect.abs(), "{a} {b} {eps} {r0} N={depth}: {got} vs {expect}");
            }
        }
    }

    #[test]
    fn quantized_inputs_give_exact_zero() {
        // A = 0, B = 1.6, eps = 0.4 is level 1 in binary-exact arithmetic
        // only up to the rounding of 0.4 and 1.6, so use dyadic values
        let c = CoulombCoefficients::new(0.0, 1.5, 0.375).unwrap();
        for depth in [2, 10, 40] {
            let d = delta_precise(&c, 0.75, depth).unwrap();
            assert_eq!(d.value, 0.0);
            assert_eq!(d.relative, 0.0);
        }
        let off = CoulombCoefficients::new(0.0, 1.5, 0.376).unwrap();
        assert!(delta_precise(&off, 0.75, 40).unwrap().relative != 0.0);
    }

    #[test]
    fn rejects_bad_point() {
        let c = CoulombCoefficients::new(0.0, 1.6, 0.5).unwrap();
        assert!(delta_precise(&c, 0.0, 3).is_err());
        assert!(delta_precise(&c, 1.0, 0).is_err());
    }
}
