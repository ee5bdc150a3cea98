//! Quadrature on `[0, inf)`: Gauss-Laguerre for polynomial-times-exponential
//! integrands and an adaptive Gauss-Kronrod (7/15) fallback.

use crate::error::{Error, Result};
use crate::tridiag::{SturmCount, SymTridiagonal};

/// Gauss-Laguerre rule for the weight `e^{-x}`, exact for polynomials of
/// degree up to `2m - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLaguerre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// `(L_m(x), L_{m-1}(x))` by the three-term recurrence.
fn laguerre_pair(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = 1.0 - x;
    if m == 0 {
        return (p0, 0.0);
    }
    for j in 1..m {
        let jf = j as f64;
        let p2 = ((2.0 * jf + 1.0 - x) * p1 - jf * p0) / (jf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

impl GaussLaguerre {
    pub fn new(m: usize) -> Self {
        assert!(m >= 1, "Gauss-Laguerre needs at least one node");
        // Jacobi matrix: diagonal 2i+1, off-diagonal i
        let jacobi = SymTridiagonal::new(
            (0..m).map(|i| (2 * i + 1) as f64).collect(),
            (1..m).map(|i| i as f64).collect(),
        );
        let mut nodes = Vec::with_capacity(m);
        let mut weights = Vec::with_capacity(m);
        let mf = m as f64;
        for k in 0..m {
            let mut x = jacobi.eigenvalue(k);
            // Newton polish: L_m'(x) = m (L_m - L_{m-1}) / x
            for _ in 0..3 {
                let (p, pm1) = laguerre_pair(m, x);
                let dp = mf * (p - pm1) / x;
                if dp == 0.0 {
                    break;
                }
                x -= p / dp;
            }
            let (_, pm1) = laguerre_pair(m, x);
            let lm1 = {
                // L_{m+1}(x) = ((2m+1-x) L_m - m L_{m-1}) / (m+1), with L_m(x) = 0
                -mf * pm1 / (mf + 1.0)
            };
            nodes.push(x);
            weights.push(x / ((mf + 1.0) * (mf + 1.0) * lm1 * lm1));
        }
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `sum w_i f(x_i)`, approximating `int_0^inf e^{-x} f(x) dx`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_KRONROD: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_GAUSS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One G7/K15 panel: `(kronrod, |kronrod - gauss|)`.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = GK_KRONROD[7] * fc;
    let mut gauss = GK_GAUSS[3] * fc;
    for i in 0..7 {
        let dx = h * GK_NODES[i];
        let pair = f(c - dx) + f(c + dx);
        kronrod += GK_KRONROD[i] * pair;
        if i % 2 == 1 {
            gauss += GK_GAUSS[i / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod on `[a, b]` to relative tolerance `rtol`.
pub fn adaptive_gk<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rtol: f64) -> Result<f64> {
    const MAX_PANELS: usize = 4000;
    let (v, e) = gk15(&f, a, b);
    let mut panels = vec![(a, b, v, e)];
    loop {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if !(total.is_finite() && err.is_finite()) {
            return Err(Error::QuadratureFail(format!(
                "non-finite estimate {total} (error {err}) on [{a}, {b}]"
            )));
        }
        if err <= rtol * total.abs() || err == 0.0 {
            return Ok(total);
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::QuadratureFail(format!(
                "estimated relative error {:e} after {MAX_PANELS} panels",
                err / total.abs()
            )));
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (pa, pb, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (pa + pb);
        for (l, r) in [(pa, mid), (mid, pb)] {
            let (v, e) = gk15(&f, l, r);
            panels.push((l, r, v, e));
        }
    }
}

/// Adaptive Gauss-Kronrod on `[0, inf)` via `x = t / (1 - t)`.
pub fn adaptive_gk_half_line<F: Fn(f64) -> f64>(f: F, rtol: f64) -> Result<f64> {
    adaptive_gk(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let s = 1.0 - t;
            let v = f(t / s) / (s * s);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        rtol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laguerre_integrates_factorials() {
        let rule = GaussLaguerre::new(4);
        let fact5 = rule.integrate(|x| x.powi(5));
        assert!((fact5 - 120.0).abs() < 1e-11);
        let rule = GaussLaguerre::new(14);
        for p in 0..=27 {
            let exact: f64 = (1..=p).map(|i| i as f64).product();
            let got = rule.integrate(|x| x.powi(p));
            assert!((got - exact).abs() <= 1e-12 * exact, "x^{p}: {got} vs {exact}");
        }
    }

    #[test]
    fn laguerre_weights_sum_to_one() {
        for m in [1, 2, 5, 10, 30] {
            let s: f64 = GaussLaguerre::new(m).weights().iter().sum();
            assert!((s - 1.0).abs() < 1e-13, "m = {m}: {s}");
        }
    }

    #[test]
    fn two_point_rule_closed_form() {
        // nodes 2 -+ sqrt(2), weights (2 +- sqrt(2)) / 4
        let rule = GaussLaguerre::new(2);
        let s2 = 2f64.sqrt();
        assert!((rule.nodes()[0] - (2.0 - s2)).abs() < 1e-14);
        assert!((rule.nodes()[1] - (2.0 + s2)).abs() < 1e-14);
        assert!((rule.weights()[0] - (2.0 + s2) / 4.0).abs() < 1e-14);
    }

    #[test]
    fn kronrod_half_line_gamma() {
        // int x^{1.5} e^{-x} = Gamma(2.5) = 0.75 sqrt(pi)
        let v = adaptive_gk_half_line(|x| x.powf(1.5) * (-x).exp(), 1e-13).unwrap();
        let exact = 0.75 * std::f64::consts::PI.sqrt();
        assert!((v - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn kronrod_fails_on_divergent_integrand() {
        let err = adaptive_gk(|x| 1.0 / x, 0.0, 1.0, 1e-12);
        assert!(matches!(err, Err(Error::QuadratureFail(_))));
    }
}
