//! Real symmetric tridiagonal matrices and their largest eigenpair.
//!
//! The largest eigenvalue is bracketed by Sturm-sequence bisection (the
//! LDL^T pivot count gives the number of eigenvalues below a shift) and
//! the eigenvector follows from shifted inverse iteration with a
//! partial-pivoting tridiagonal solve.

use crate::error::{CoreError, Result};

/// Symmetric tridiagonal matrix: `diag` has the main diagonal, `off[i]`
/// couples rows i and i+1.
#[derive(Clone, Debug, PartialEq)]
pub struct TridiagSym {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl TridiagSym {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(CoreError::DimensionMismatch(format!(
                "tridiagonal needs off.len() = diag.len() - 1, got {} and {}",
                off.len(),
                diag.len()
            )));
        }
        Ok(TridiagSym { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut s = self.diag[i] * v[i];
            if i > 0 {
                s += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * v[i + 1];
            }
            out[i] = s;
        }
        out
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i];
                if i > 0 {
                    s += self.off[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i];
                }
                s
            })
            .collect()
    }

    /// Quadratic form v^T M v.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            s += self.diag[i] * v[i] * v[i];
            if i + 1 < n {
                s += 2.0 * self.off[i] * v[i] * v[i + 1];
            }
        }
        s
    }
}

/// Number of eigenvalues strictly below `shift` (Sturm count via LDL^T).
fn sturm_count(m: &TridiagSym, shift: f64) -> usize {
    const PIVOT_GUARD: f64 = 1e-300;
    let mut count = 0usize;
    let mut q = m.diag[0] - shift;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..m.dim() {
        let q_safe = if q.abs() < PIVOT_GUARD {
            if q >= 0.0 {
                PIVOT_GUARD
            } else {
                -PIVOT_GUARD
            }
        } else {
            q
        };
        q = (m.diag[i] - shift) - m.off[i - 1] * m.off[i - 1] / q_safe;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Solve (M - shift I) x = rhs by Gaussian elimination with partial
/// pivoting (one extra superdiagonal of fill-in). Returns None on
/// breakdown so inverse iteration can retry with a perturbed shift.
fn solve_shifted(m: &TridiagSym, shift: f64, rhs: &[f64]) -> Option<Vec<f64>> {
    let n = m.dim();
    let mut dl = m.off.clone(); // dl[i]: row i+1, col i
    let mut d: Vec<f64> = m.diag.iter().map(|&x| x - shift).collect();
    let mut du = m.off.clone(); // du[i]: row i, col i+1
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut x = rhs.to_vec();
    for i in 0..n - 1 {
        if dl[i] == 0.0 {
            if d[i] == 0.0 {
                return None;
            }
        } else if d[i].abs() >= dl[i].abs() {
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            x[i + 1] -= fact * x[i];
            dl[i] = 0.0;
        } else {
            // pivot: swap rows i and i+1
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -fact;
            }
            du[i] = temp;
            let t = x[i];
            x[i] = x[i + 1];
            x[i + 1] = t - fact * x[i + 1];
        }
    }
    if d[n - 1] == 0.0 {
        return None;
    }
    x[n - 1] /= d[n - 1];
    if n >= 2 {
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    if x.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some(x)
}

/// Largest eigenvalue and its eigenvector, normalized and oriented so the
/// entries are nonnegative for nonnegative irreducible matrices (Perron
/// vector). Residual guarantee: ||Mv - lambda v||_inf <= 1e-10 max(1, lambda).
pub fn max_eigen(m: &TridiagSym) -> Result<(f64, Vec<f64>)> {
    let n = m.dim();
    if n == 1 {
        return Ok((m.diag[0], vec![1.0]));
    }
    // Gershgorin bracket
    let mut lo = f64::MAX;
    let mut hi = f64::MIN;
    for i in 0..n {
        let r = (if i > 0 { m.off[i - 1].abs() } else { 0.0 })
            + (if i + 1 < n { m.off[i].abs() } else { 0.0 });
        lo = lo.min(m.diag[i] - r);
        hi = hi.max(m.diag[i] + r);
    }
    let scale = hi.abs().max(lo.abs()).max(1.0);
    lo -= 1e-12 * scale;
    hi += 1e-12 * scale;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-13 * mid.abs().max(1.0) {
            break;
        }
        if sturm_count(m, mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let bisected = 0.5 * (lo + hi);

    // inverse iteration from the converged shift
    let mut best: Option<(f64, Vec<f64>, f64)> = None;
    'attempt: for attempt in 0..8 {
        let shift = bisected + attempt as f64 * 1e-11 * scale;
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        for _ in 0..50 {
            let Some(w) = solve_shifted(m, shift, &v) else {
                continue 'attempt;
            };
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(norm.is_finite() && norm > 0.0) {
                continue 'attempt;
            }
            v = w.into_iter().map(|x| x / norm).collect();
            let rayleigh = m.quad_form(&v);
            let mv = m.matvec(&v);
            let resid = mv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - rayleigh * b).abs())
                .fold(0.0f64, f64::max);
            if resid <= 1e-11 * rayleigh.abs().max(1.0) {
                best = Some((rayleigh, v, resid));
                break 'attempt;
            }
            if best.as_ref().is_none_or(|(_, _, r)| resid < *r) {
                best = Some((rayleigh, v.clone(), resid));
            }
        }
    }
    let (lambda, mut v, resid) = best.ok_or_else(|| {
        CoreError::NonConvergence("inverse iteration broke down for every shift".into())
    })?;
    if resid > 1e-10 * lambda.abs().max(1.0) {
        return Err(CoreError::Eigensolver(format!(
            "residual {resid:e} exceeds tolerance at lambda = {lambda}"
        )));
    }
    // Perron orientation
    if v.iter().sum::<f64>() < 0.0 {
        for x in &mut v {
            *x = -*x;
        }
    }
    Ok((lambda, v))
}
