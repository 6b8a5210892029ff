//! Legendre polynomials and Gauss-Legendre quadrature on [-1, 1].

use crate::error::{CoreError, Result};

/// P_L(x) by the three-term recurrence.
pub fn legendre_p(l: u32, x: f64) -> f64 {
    match l {
        0 => 1.0,
        1 => x,
        _ => {
            let mut pm1 = 1.0;
            let mut p = x;
            for k in 1..l {
                let kf = k as f64;
                let next = ((2.0 * kf + 1.0) * x * p - kf * pm1) / (kf + 1.0);
                pm1 = p;
                p = next;
            }
            p
        }
    }
}

/// P_n(x) together with its derivative, for the root refinement.
fn legendre_with_deriv(n: u32, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut pm1 = 1.0;
    let mut p = x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * p - kf * pm1) / (kf + 1.0);
        pm1 = p;
        p = next;
    }
    let dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
    (p, dp)
}

/// Gauss-Legendre nodes and weights of order n, ascending by node.
///
/// Each node is bracketed by the Bruns inequalities around the Chebyshev
/// initial guess and refined by bisection-safeguarded Newton steps; weights
/// are w = 2 / ((1 - x^2) P_n'(x)^2). Weights are positive, sum to 2, and
/// the rule is symmetric about 0.
pub fn gauss_legendre(n: usize) -> Result<Vec<(f64, f64)>> {
    if n == 0 {
        return Err(CoreError::InvalidArgument("gauss_legendre order must be >= 1".into()));
    }
    if n == 1 {
        return Ok(vec![(0.0, 2.0)]);
    }
    let nf = n as f64;
    let mut nodes = vec![(0.0, 0.0); n];
    // solve for the upper half (descending roots i = 1..=n/2), mirror the rest
    for i in 1..=n / 2 {
        let i_f = i as f64;
        // theta_i bracketed by (i - 1/2) pi / (n + 1/2) and i pi / (n + 1/2)
        let mut lo_x = (std::f64::consts::PI * i_f / (nf + 0.5)).cos();
        let mut hi_x = (std::f64::consts::PI * (i_f - 0.5) / (nf + 0.5)).cos();
        let mut x = (std::f64::consts::PI * (i_f - 0.25) / (nf + 0.5)).cos();
        let (plo, _) = legendre_with_deriv(n as u32, lo_x);
        let mut sign_lo = plo.signum();
        let mut converged = false;
        for _ in 0..100 {
            let (p, dp) = legendre_with_deriv(n as u32, x);
            if p == 0.0 {
                converged = true;
                break;
            }
            if p.signum() == sign_lo {
                lo_x = x;
                sign_lo = p.signum();
            } else {
                hi_x = x;
            }
            let step = p / dp;
            let mut next = x - step;
            if !(lo_x..=hi_x).contains(&next) {
                next = 0.5 * (lo_x + hi_x);
            }
            let delta = (next - x).abs();
            x = next;
            if delta <= 4.0 * f64::EPSILON * x.abs().max(0.25)
                || hi_x - lo_x <= 4.0 * f64::EPSILON
            {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(CoreError::NonConvergence(format!(
                "gauss_legendre root {i} of order {n}"
            )));
        }
        let (_, dp) = legendre_with_deriv(n as u32, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - i] = (x, w);
        nodes[i - 1] = (-x, w);
    }
    if n % 2 == 1 {
        // middle root is exactly 0 by symmetry
        let (_, dp) = legendre_with_deriv(n as u32, 0.0);
        nodes[n / 2] = (0.0, 2.0 / (dp * dp));
    }
    Ok(nodes)
}
