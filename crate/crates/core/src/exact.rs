//! Exact univariate polynomials and rational functions over `Q`.
//!
//! Every [`RationalFn`] is kept in canonical form: numerator and denominator
//! are coprime and the denominator is monic.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Dense polynomial, coefficients stored from the constant term up.
/// Trailing zeros are never stored; the zero polynomial is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn monomial(c: BigRational, degree: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); degree];
        coeffs.push(c);
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(k.into()))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = BigRational::zero();
        Self::from_coeffs(
            (0..len)
                .map(|k| self.coeffs.get(k).unwrap_or(&zero) + other.coeffs.get(k).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(out)
    }

    /// Euclidean division over `Q`. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("polynomial division by zero");
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree() else {
            return (Self::zero(), Self::zero());
        };
        if nd < dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); nd - dd + 1];
        for shift in (0..=nd - dd).rev() {
            let c = &rem[shift + dd] / &lead;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[shift + j] -= &c * d;
            }
            quot[shift] = c;
        }
        rem.truncate(dd);
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    /// Monic gcd. `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        let g = int_gcd(&to_primitive(self), &to_primitive(other));
        let p = Self::from_coeffs(g.into_iter().map(BigRational::from_integer).collect());
        match p.leading().cloned() {
            Some(lead) => p.scale(&lead.recip()),
            None => p,
        }
    }
}

/// Integer primitive part with positive leading coefficient.
fn to_primitive(p: &Poly) -> Vec<BigInt> {
    if p.is_zero() {
        return Vec::new();
    }
    let lcm = p
        .coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p
        .coeffs
        .iter()
        .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    primitive_part(ints)
}

fn primitive_part(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    let Some(lead) = p.last() else {
        return p;
    };
    let mut content = p.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if lead.is_negative() {
        content = -content;
    }
    p.into_iter().map(|c| c / &content).collect()
}

/// `lc(b)^(deg a - deg b + 1) a mod b`, all over `Z`.
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lead = &b[db];
    let mut rem = a.to_vec();
    while rem.len() > db && !rem.is_empty() {
        let dr = rem.len() - 1;
        let c = rem[dr].clone();
        for x in rem.iter_mut() {
            *x *= lead;
        }
        for (j, bj) in b.iter().enumerate() {
            rem[dr - db + j] -= &c * bj;
        }
        rem.pop();
        while rem.last().is_some_and(Zero::is_zero) {
            rem.pop();
        }
    }
    rem
}

/// Primitive remainder sequence.
fn int_gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let (mut a, mut b) = if a.len() >= b.len() {
        (a.to_vec(), b.to_vec())
    } else {
        (b.to_vec(), a.to_vec())
    };
    while !b.is_empty() {
        let r = primitive_part(pseudo_rem(&a, &b));
        a = b;
        b = r;
    }
    primitive_part(a)
}

fn fmt_rational(c: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.denom().is_one() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

/// Renders `c` as `p/q` (or `p` when integral).
pub fn rational_string(c: &BigRational) -> String {
    struct D<'a>(&'a BigRational);
    impl fmt::Display for D<'_> {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            fmt_rational(self.0, f)
        }
    }
    D(c).to_string()
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            f.write_str("(")?;
            fmt_rational(c, f)?;
            f.write_str(")")?;
            match k {
                0 => {}
                1 => f.write_str("*r")?,
                _ => write!(f, "*r^{k}")?,
            }
        }
        Ok(())
    }
}

/// Ratio of two polynomials in canonical reduced form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalFn {
    num: Poly,
    den: Poly,
}

impl RationalFn {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZeroFn);
        }
        Ok(Self::canonical(num, den))
    }

    pub fn from_poly(p: Poly) -> Self {
        Self { num: p, den: Poly::one() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    fn canonical(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        };
        let lead = den.leading().unwrap().clone();
        if !lead.is_one() {
            let inv = lead.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Self { num, den }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.den == other.den {
            return Self::canonical(self.num.add(&other.num), self.den.clone());
        }
        Self::canonical(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::canonical(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZeroFn);
        }
        Ok(Self::canonical(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        ))
    }

    /// `(p/q)' = (p' q - p q') / q^2`.
    pub fn derivative(&self) -> Self {
        Self::canonical(
            self.num
                .derivative()
                .mul(&self.den)
                .sub(&self.num.mul(&self.den.derivative())),
            self.den.mul(&self.den),
        )
    }

    /// Exact value, `None` on a pole.
    pub fn eval(&self, x: &BigRational) -> Option<BigRational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    /// Value at a float point, evaluated exactly and rounded once.
    pub fn eval_f64(&self, x: f64) -> Option<f64> {
        let xq = BigRational::from_float(x)?;
        self.eval(&xq).and_then(|v| v.to_f64())
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] / [{}]", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn gcd_of_shared_factor() {
        // (r - 1)(r + 2) and (r - 1)(3r + 1)
        let a = Poly::from_i64(&[-1, 1]).mul(&Poly::from_i64(&[2, 1]));
        let b = Poly::from_i64(&[-1, 1]).mul(&Poly::from_i64(&[1, 3]));
        assert_eq!(a.gcd(&b), Poly::from_i64(&[-1, 1]));
        assert_eq!(a.gcd(&Poly::from_i64(&[5])), Poly::one());
        assert_eq!(Poly::zero().gcd(&Poly::zero()), Poly::zero());
        assert_eq!(Poly::zero().gcd(&b.scale(&q(7, 2))), b.scale(&q(1, 3)));
    }

    #[test]
    fn division_identity() {
        let a = Poly::from_coeffs(vec![q(1, 2), q(-3, 4), q(0, 1), q(5, 3)]);
        let b = Poly::from_coeffs(vec![q(2, 1), q(1, 7)]);
        let (quo, rem) = a.div_rem(&b);
        assert!(rem.degree().unwrap_or(0) < b.degree().unwrap());
        assert_eq!(quo.mul(&b).add(&rem), a);
    }

    #[test]
    fn rational_fn_reduces() {
        let f = RationalFn::new(
            Poly::from_i64(&[-2, 2]).mul(&Poly::from_i64(&[0, 1])),
            Poly::from_i64(&[0, 0, 4]),
        )
        .unwrap();
        // 2r(r-1) / 4r^2 = (r - 1) / (2r) = (r/2 - 1/2) / r
        assert_eq!(f.denominator(), &Poly::from_i64(&[0, 1]));
        assert_eq!(f.numerator(), &Poly::from_coeffs(vec![q(-1, 2), q(1, 2)]));
        assert!(RationalFn::new(Poly::one(), Poly::zero()).is_err());
    }

    #[test]
    fn derivative_of_inverse() {
        let inv = RationalFn::new(Poly::one(), Poly::from_i64(&[0, 1])).unwrap();
        let d = inv.derivative();
        assert_eq!(d.numerator(), &Poly::from_i64(&[-1]));
        assert_eq!(d.denominator(), &Poly::from_i64(&[0, 0, 1]));
        assert_eq!(d.eval(&q(0, 1)), None);
    }

    #[test]
    fn display_uses_p_over_q() {
        let p = Poly::from_coeffs(vec![q(-8, 5), q(0, 1), q(3, 1)]);
        assert_eq!(p.to_string(), "(-8/5) + (3)*r^2");
        assert_eq!(rational_string(&q(4, 5)), "4/5");
    }

    fn small_poly() -> impl Strategy<Value = Poly> {
        prop::collection::vec((-9i64..=9, 1i64..=5), 0..5)
            .prop_map(|cs| Poly::from_coeffs(cs.into_iter().map(|(n, d)| q(n, d)).collect()))
    }

    proptest! {
        #[test]
        fn canonical_after_arithmetic(a in small_poly(), b in small_poly(), c in small_poly(), d in small_poly()) {
            prop_assume!(!b.is_zero() && !d.is_zero());
            let f = RationalFn::new(a, b).unwrap();
            let g = RationalFn::new(c, d).unwrap();
            for h in [f.add(&g), f.sub(&g), f.mul(&g), f.derivative()] {
                let gcd = h.numerator().gcd(h.denominator());
                prop_assert!(gcd.is_constant());
                prop_assert!(h.denominator().leading().unwrap().is_one());
            }
        }

        #[test]
        fn gcd_divides_both(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assume!(!c.is_zero());
            let x = a.mul(&c);
            let y = b.mul(&c);
            let g = x.gcd(&y);
            if !g.is_zero() {
                prop_assert!(x.div_rem(&g).1.is_zero());
                prop_assert!(y.div_rem(&g).1.is_zero());
                prop_assert!(g.div_rem(&c).1.is_zero() || x.is_zero() && y.is_zero());
            }
        }
    }
}
