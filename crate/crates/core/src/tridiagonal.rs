//! Real symmetric tridiagonal matrices: Sturm-sequence counting, bisection
//! for eigenvalues in a spectral slice, and inverse iteration for
//! eigenvectors.

use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TridiagonalError {
    #[error("off-diagonal length {off} does not match diagonal length {diag}")]
    ShapeMismatch { diag: usize, off: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("{found} eigenvalues below the threshold exceed the cap of {cap}")]
    TooManyRequested { found: usize, cap: usize },
    #[error("threshold {0} is not finite")]
    BadThreshold(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
    pivmin: f64,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self, TridiagonalError> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(TridiagonalError::ShapeMismatch {
                diag: diag.len(),
                off: off.len(),
            });
        }
        if diag.iter().chain(off.iter()).any(|v| !v.is_finite()) {
            return Err(TridiagonalError::NonFinite);
        }
        let max_off_sq = off.iter().map(|b| b * b).fold(1.0, f64::max);
        Ok(Self {
            diag,
            off,
            pivmin: f64::MIN_POSITIVE * max_off_sq,
        })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off_diag(&self) -> &[f64] {
        &self.off
    }

    /// Number of eigenvalues strictly below `shift`.
    pub fn sturm_count(&self, shift: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.diag.len() {
            let coupling = if i == 0 {
                0.0
            } else {
                self.off[i - 1] * self.off[i - 1] / d
            };
            d = self.diag[i] - shift - coupling;
            if d.abs() < self.pivmin {
                d = -self.pivmin;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin enclosure `[lo, hi]` of the spectrum.
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
        (lo, hi)
    }

    fn norm_scale(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE)
    }

    /// The `k`-th smallest eigenvalue (0-based) inside `[lo, hi]`, by
    /// bisection down to f64 resolution relative to the matrix norm.
    fn bisect(&self, k: usize, mut lo: f64, mut hi: f64) -> f64 {
        let floor = 2.0 * f64::EPSILON * self.norm_scale();
        for _ in 0..256 {
            let mid = lo + 0.5 * (hi - lo);
            if mid <= lo || mid >= hi || hi - lo <= floor {
                break;
            }
            if self.sturm_count(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo + 0.5 * (hi - lo)
    }

    /// All eigenvalues below `threshold`, ascending.
    pub fn eigenvalues_below(
        &self,
        threshold: f64,
        max_count: usize,
    ) -> Result<Vec<f64>, TridiagonalError> {
        let (g_lo, g_hi) = self.gershgorin();
        if threshold.is_nan() || threshold == f64::NEG_INFINITY {
            return Err(TridiagonalError::BadThreshold(threshold));
        }
        let upper = threshold.min(g_hi + 1.0 + g_hi.abs() * f64::EPSILON);
        let count = self.sturm_count(upper);
        if count > max_count {
            return Err(TridiagonalError::TooManyRequested {
                found: count,
                cap: max_count,
            });
        }
        let lower = g_lo - 1.0 - g_lo.abs() * f64::EPSILON;
        Ok((0..count)
            .into_par_iter()
            .map(|k| self.bisect(k, lower, upper))
            .collect())
    }

    /// Every eigenvalue, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues_below(f64::INFINITY, usize::MAX)
            .expect("unbounded slice cannot overflow the cap")
    }

    /// Unit eigenvector for a converged eigenvalue, by inverse iteration.
    /// The sign is fixed so the largest-magnitude component is positive.
    pub fn eigenvector(&self, eigenvalue: f64) -> Vec<f64> {
        let n = self.diag.len();
        let tiny = f64::EPSILON * self.norm_scale();
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64) / (n as f64)).collect();
        normalize(&mut x);
        for _ in 0..4 {
            let mut rhs = x.clone();
            shifted_solve(&self.diag, &self.off, eigenvalue, tiny, &mut rhs);
            normalize(&mut rhs);
            x = rhs;
        }
        let peak = x
            .iter()
            .cloned()
            .fold(0.0_f64, |m, v| if v.abs() > m.abs() { v } else { m });
        if peak < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        x
    }
}

fn normalize(v: &mut [f64]) {
    let peak = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if peak > 0.0 {
        v.iter_mut().for_each(|x| *x /= peak);
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

/// Solves `(T − shift·I) x = b` in place with partial pivoting; zero pivots
/// are replaced by `tiny`.
fn shifted_solve(diag: &[f64], off: &[f64], shift: f64, tiny: f64, b: &mut [f64]) {
    let n = diag.len();
    if n == 1 {
        let d = diag[0] - shift;
        b[0] /= if d == 0.0 { tiny } else { d };
        return;
    }
    let mut d: Vec<f64> = diag.iter().map(|v| v - shift).collect();
    let mut dl = off.to_vec();
    let mut du = off.to_vec();
    // second superdiagonal fill-in, stored in dl after elimination
    let guard = |v: f64| if v == 0.0 { tiny } else { v };
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            d[i] = guard(d[i]);
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
            dl[i] = 0.0;
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 2 < n {
                dl[i] = du[i + 1];
                du[i + 1] = -fact * dl[i];
            } else {
                dl[i] = 0.0;
            }
            du[i] = temp;
            let temp = b[i];
            b[i] = b[i + 1];
            b[i + 1] = temp - fact * b[i + 1];
        }
    }
    d[n - 1] = guard(d[n - 1]);
    b[n - 1] /= d[n - 1];
    b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - du[i] * b[i + 1] - dl[i] * b[i + 2]) / d[i];
    }
}
