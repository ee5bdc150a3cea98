//! Truncated Taylor series ("jets") at a fixed base point.
//!
//! A jet of order `O` at `r0` stores `c_k = f^(k)(r0) / k!` for `k = 0..=O`.
//! Binary operations truncate to the smaller order, and differentiation
//! lowers the order by one, so no operation ever reads past what is stored.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    base: f64,
    coeffs: Vec<f64>,
}

impl Jet {
    /// Jet from raw Taylor coefficients. `coeffs` must be non-empty.
    pub fn from_coeffs(base: f64, coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least the value coefficient");
        Self { base, coeffs }
    }

    pub fn constant(base: f64, value: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Self { base, coeffs }
    }

    /// The identity function `r` expanded at `base`.
    pub fn variable(base: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = base;
        if order >= 1 {
            coeffs[1] = 1.0;
        }
        Self { base, coeffs }
    }

    /// `r^p` at `base > 0`, any real `p`: `c_k = binom(p, k) base^(p-k)`.
    pub fn power(base: f64, p: f64, order: usize) -> Result<Self> {
        if !(base > 0.0) {
            return Err(Error::DomainError(format!("jet of r^p needs r0 > 0, got {base}")));
        }
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut c = base.powf(p);
        for k in 0..=order {
            coeffs.push(c);
            // binom(p, k+1) / binom(p, k) = (p - k) / (k + 1)
            c *= (p - k as f64) / ((k + 1) as f64) / base;
        }
        Ok(Self { base, coeffs })
    }

    /// `exp(rate * r)` at `base`.
    pub fn exp_linear(base: f64, rate: f64, order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut c = (rate * base).exp();
        for k in 0..=order {
            coeffs.push(c);
            c *= rate / ((k + 1) as f64);
        }
        Self { base, coeffs }
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// `f^(k)(base)`; `None` beyond the stored order.
    pub fn derivative_value(&self, k: usize) -> Option<f64> {
        let c = *self.coeffs.get(k)?;
        Some(c * (1..=k).map(|i| i as f64).product::<f64>())
    }

    /// Derivative jet, one order lower. An order-0 jet carries no derivative
    /// information and yields a zero constant; the AIM driver checks order
    /// up front so this is never hit there.
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::constant(self.base, 0.0, 0);
        }
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(k, c)| (k + 1) as f64 * c)
            .collect();
        Self {
            base: self.base,
            coeffs,
        }
    }

    pub fn truncate(&self, order: usize) -> Self {
        let len = (order + 1).min(self.coeffs.len());
        Self {
            base: self.base,
            coeffs: self.coeffs[..len].to_vec(),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            base: self.base,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn add_scalar(&self, value: f64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += value;
        out
    }

    fn check_base(&self, other: &Self) {
        debug_assert!(
            self.base == other.base,
            "jets at different base points ({} vs {})",
            self.base,
            other.base
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_base(other);
        let len = self.coeffs.len().min(other.coeffs.len());
        Self {
            base: self.base,
            coeffs: (0..len).map(|k| self.coeffs[k] + other.coeffs[k]).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_base(other);
        let len = self.coeffs.len().min(other.coeffs.len());
        Self {
            base: self.base,
            coeffs: (0..len).map(|k| self.coeffs[k] - other.coeffs[k]).collect(),
        }
    }

    /// Cauchy product truncated to the smaller order.
    pub fn mul(&self, other: &Self) -> Self {
        self.check_base(other);
        let len = self.coeffs.len().min(other.coeffs.len());
        let coeffs = (0..len)
            .map(|k| (0..=k).map(|i| self.coeffs[i] * other.coeffs[k - i]).sum())
            .collect();
        Self {
            base: self.base,
            coeffs,
        }
    }

    /// `p(self)` for a polynomial with coefficients `poly[j]` of `x^j`.
    pub fn compose_poly(&self, poly: &[f64]) -> Self {
        let mut acc = Self::constant(self.base, 0.0, self.order());
        for &c in poly.iter().rev() {
            acc = acc.mul(self).add_scalar(c);
        }
        acc
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        Jet::add(self, rhs)
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        Jet::sub(self, rhs)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        Jet::mul(self, rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * y.abs().max(1.0))
    }

    #[test]
    fn inverse_r_at_one() {
        let j = Jet::power(1.0, -1.0, 2).unwrap();
        assert!(close(j.coeffs(), &[1.0, -1.0, 1.0], 1e-15));
        let d = j.derivative();
        assert_eq!(d.order(), 1);
        assert!(close(d.coeffs(), &[-1.0, 2.0], 1e-15));
    }

    #[test]
    fn power_derivative_rule() {
        // d/dr r^m = m r^(m-1), order-reduced
        for m in 0..=3 {
            for &r0 in &[0.3, 1.0, 2.5] {
                let j = Jet::power(r0, m as f64, 6).unwrap();
                let expect = Jet::power(r0, (m - 1) as f64, 5).unwrap().scale(m as f64);
                assert!(close(j.derivative().coeffs(), expect.coeffs(), 1e-14), "m={m}, r0={r0}");
            }
        }
    }

    #[test]
    fn exp_coefficients() {
        let j = Jet::exp_linear(0.0, 1.0, 4);
        assert!(close(j.coeffs(), &[1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0], 1e-15));
        let j = Jet::exp_linear(2.0, -0.5, 3);
        assert!((j.derivative_value(2).unwrap() - 0.25 * (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn product_truncates_to_the_smaller_order() {
        let a = Jet::power(1.5, 2.0, 5).unwrap();
        let b = Jet::power(1.5, -1.0, 3).unwrap();
        let p = a.mul(&b);
        assert_eq!(p.order(), 3);
        // r^2 * r^-1 = r
        assert!(close(p.coeffs(), Jet::variable(1.5, 3).coeffs(), 1e-14));
    }

    #[test]
    fn compose_poly_matches_direct_expansion() {
        // p(x) = 1 - x + x^2/6 at x = 2 r, r0 = 0.7
        let x = Jet::variable(0.7, 3).scale(2.0);
        let p = x.compose_poly(&[1.0, -1.0, 1.0 / 6.0]);
        let z = 1.4;
        assert!((p.value() - (1.0 - z + z * z / 6.0)).abs() < 1e-15);
        assert!((p.derivative_value(1).unwrap() - 2.0 * (-1.0 + z / 3.0)).abs() < 1e-14);
        assert!((p.derivative_value(2).unwrap() - 4.0 / 3.0).abs() < 1e-14);
        assert!(p.derivative_value(3).unwrap().abs() < 1e-14);
        assert_eq!(p.derivative_value(4), None);
    }

    #[test]
    fn power_rejects_nonpositive_base() {
        assert!(Jet::power(0.0, -1.0, 2).is_err());
    }
}
