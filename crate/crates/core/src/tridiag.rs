//! Symmetric tridiagonal eigenvalues by Sturm-sequence counting and
//! bisection.

/// Symmetric tridiagonal matrix: `diag[0..n]`, `off[0..n-1]` with `off[i]`
/// coupling rows `i` and `i+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
    pivmin: f64,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty(), "empty tridiagonal matrix");
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal length must be n - 1");
        let emax = off.iter().fold(1.0f64, |m, e| m.max(e * e));
        let pivmin = f64::MIN_POSITIVE * emax;
        Self { diag, off, pivmin }
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    /// Number of eigenvalues strictly below `x` (negative LDL^T pivots).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q.abs() < self.pivmin {
            q = -self.pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            let e = self.off[i - 1];
            q = self.diag[i] - x - e * e / q;
            if q.abs() < self.pivmin {
                q = -self.pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        let pad = f64::EPSILON * lo.abs().max(hi.abs()) + self.pivmin;
        (lo - pad, hi + pad)
    }
}

impl SturmCount for SymTridiagonal {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn count_below(&self, x: f64) -> usize {
        SymTridiagonal::count_below(self, x)
    }

    fn spectrum_bounds(&self) -> (f64, f64) {
        self.gershgorin()
    }

    fn resolution(&self) -> f64 {
        self.pivmin
    }
}

/// A symmetric matrix whose eigenvalue counts below a shift are known;
/// eigenvalues follow by bisection on the count.
pub trait SturmCount {
    fn dim(&self) -> usize;

    /// Number of eigenvalues strictly below `x`.
    fn count_below(&self, x: f64) -> usize;

    /// An interval containing the whole spectrum.
    fn spectrum_bounds(&self) -> (f64, f64);

    /// Absolute floor on the bisection width.
    fn resolution(&self) -> f64 {
        0.0
    }

    /// The `k`-th smallest eigenvalue (0-based), bisected to float resolution.
    fn eigenvalue(&self, k: usize) -> f64 {
        let (lo, hi) = self.spectrum_bounds();
        self.bisect(k, lo, hi)
    }

    /// As [`eigenvalue`](Self::eigenvalue), starting from a guess bracket
    /// that is widened until it contains the eigenvalue.
    fn eigenvalue_near(&self, k: usize, guess_lo: f64, guess_hi: f64) -> f64 {
        let (glo, ghi) = self.spectrum_bounds();
        let mut lo = guess_lo.max(glo);
        let mut hi = guess_hi.min(ghi).max(lo);
        let mut width = (hi - lo).max(1e-12 * (1.0 + lo.abs()));
        while lo > glo && self.count_below(lo) > k {
            lo = (lo - width).max(glo);
            width *= 2.0;
        }
        let mut width = (hi - lo).max(1e-12 * (1.0 + hi.abs()));
        while hi < ghi && self.count_below(hi) <= k {
            hi = (hi + width).min(ghi);
            width *= 2.0;
        }
        self.bisect(k, lo, hi)
    }

    /// Bisection for eigenvalue `k` inside `[lo, hi]`.
    fn bisect(&self, k: usize, mut lo: f64, mut hi: f64) -> f64 {
        assert!(k < self.dim(), "eigenvalue index {k} out of range");
        for _ in 0..256 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let tol = 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + self.resolution();
            if hi - lo <= tol {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_by_two() {
        let m = SymTridiagonal::new(vec![2.0, 2.0], vec![-1.0]);
        assert!((m.eigenvalue(0) - 1.0).abs() < 1e-14);
        assert!((m.eigenvalue(1) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn one_by_one() {
        let m = SymTridiagonal::new(vec![-4.25], vec![]);
        assert_eq!(m.eigenvalue(0), -4.25);
    }

    #[test]
    fn warm_start_matches_cold() {
        let n = 50;
        let m = SymTridiagonal::new(
            (0..n).map(|i| 2.0 + (i as f64).sin()).collect(),
            vec![-1.0; n - 1],
        );
        for k in [0, 7, 49] {
            let cold = m.eigenvalue(k);
            let warm = m.eigenvalue_near(k, cold + 0.3, cold + 0.4);
            assert!((cold - warm).abs() < 1e-13);
            let warm = m.eigenvalue_near(k, cold - 0.4, cold - 0.3);
            assert!((cold - warm).abs() < 1e-13);
        }
    }

    /// Characteristic polynomial by the three-term recurrence
    /// `p_i(x) = (d_i - x) p_{i-1} - e_{i-1}^2 p_{i-2}`.
    fn char_poly(diag: &[f64], off: &[f64], x: f64) -> f64 {
        let mut p_prev = 1.0;
        let mut p = diag[0] - x;
        for i in 1..diag.len() {
            let next = (diag[i] - x) * p - off[i - 1] * off[i - 1] * p_prev;
            p_prev = p;
            p = next;
        }
        p
    }

    proptest! {
        #[test]
        fn matches_characteristic_polynomial(
            diag in prop::collection::vec(-5.0f64..5.0, 1..=8),
            off_seed in prop::collection::vec(0.2f64..3.0, 8),
        ) {
            let n = diag.len();
            let off: Vec<f64> = off_seed[..n - 1].to_vec();
            let m = SymTridiagonal::new(diag.clone(), off.clone());
            let (lo, hi) = m.gershgorin();
            let (lo, hi) = (lo - 1.0, hi + 1.0);
            // brute-force roots of the characteristic polynomial on a fine
            // grid, refined by bisection on the recurrence
            let steps = 100_000;
            let mut roots = Vec::new();
            let mut x0 = lo;
            let mut f0 = char_poly(&diag, &off, x0);
            for i in 1..=steps {
                let x1 = lo + (hi - lo) * i as f64 / steps as f64;
                let f1 = char_poly(&diag, &off, x1);
                if f0 == 0.0 {
                    roots.push(x0);
                } else if (f0 < 0.0) != (f1 < 0.0) {
                    let (mut a, mut b, fa) = (x0, x1, f0);
                    for _ in 0..200 {
                        let mid = 0.5 * (a + b);
                        if mid <= a || mid >= b { break; }
                        if (char_poly(&diag, &off, mid) < 0.0) == (fa < 0.0) { a = mid; } else { b = mid; }
                    }
                    roots.push(0.5 * (a + b));
                }
                x0 = x1;
                f0 = f1;
            }
            prop_assert_eq!(roots.len(), n);
            for (k, root) in roots.iter().enumerate() {
                prop_assert!((m.eigenvalue(k) - root).abs() < 1e-10);
            }
        }
    }
}
