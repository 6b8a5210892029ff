//! Clebsch-Gordan coefficients and Wigner rotation matrices.
//!
//! Convention lock: D^j_{m'm}(alpha, beta, gamma) =
//! exp(-i m' alpha) d^j_{m'm}(beta) exp(-i m gamma), with d^j the standard
//! real rotation factor in the Condon-Shortley phase convention. This is
//! the unique choice reproducing the spin-1 character
//! tr U^(1)(g) = cos(beta) + (1 + cos(beta)) cos(alpha + gamma).

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::euler::EulerAngles;
use crate::halfint::{validate_jm, HalfInt};

/// Largest factorial argument kept in the tables; bounds the spins the
/// coupling kernel accepts (two_j up to roughly LN_FACT_LEN / 3).
const LN_FACT_LEN: usize = 4096;
const FACT_LEN: usize = 171; // 170! is the largest finite f64 factorial

fn ln_fact_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![0.0; LN_FACT_LEN];
        for n in 2..LN_FACT_LEN {
            t[n] = t[n - 1] + (n as f64).ln();
        }
        t
    })
}

fn fact_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![1.0; FACT_LEN];
        for n in 2..FACT_LEN {
            t[n] = t[n - 1] * n as f64;
        }
        t
    })
}

#[inline]
fn ln_fact(n: i32) -> f64 {
    debug_assert!(n >= 0 && (n as usize) < LN_FACT_LEN);
    ln_fact_table()[n as usize]
}

/// Clebsch-Gordan coefficient <j1 m1 j2 m2 | J M> in the Condon-Shortley
/// convention (real; <j1 j1 j2 (J-j1) | J J> > 0). Returns 0 when the
/// coupling is forbidden (M != m1 + m2, triangle violation, or mixed
/// parity of j1 + j2 + J).
///
/// Evaluated by the Racah finite sum in log space with sign tracking, so
/// it stays finite far past the point where raw factorials overflow.
pub fn clebsch_gordan(
    two_j1: HalfInt,
    two_m1: HalfInt,
    two_j2: HalfInt,
    two_m2: HalfInt,
    two_jj: HalfInt,
    two_mm: HalfInt,
) -> Result<f64> {
    validate_jm(two_j1, two_m1)?;
    validate_jm(two_j2, two_m2)?;
    validate_jm(two_jj, two_mm)?;
    let (j1, m1) = (two_j1.doubled(), two_m1.doubled());
    let (j2, m2) = (two_j2.doubled(), two_m2.doubled());
    let (jj, mm) = (two_jj.doubled(), two_mm.doubled());

    if j1 + j2 + jj + 2 > 2 * (LN_FACT_LEN as i32 - 1) {
        return Err(CoreError::LabelTooLarge(j1.max(j2).max(jj)));
    }
    if m1 + m2 != mm || (j1 + j2 + jj) % 2 != 0 {
        return Ok(0.0);
    }
    if jj < (j1 - j2).abs() || jj > j1 + j2 {
        return Ok(0.0);
    }

    // All of these are integers (doubled values cancel in pairs).
    let a1 = (j1 + j2 - jj) / 2;
    let a2 = (j1 - j2 + jj) / 2;
    let a3 = (-j1 + j2 + jj) / 2;
    let ln_delta = ln_fact(a1) + ln_fact(a2) + ln_fact(a3) - ln_fact((j1 + j2 + jj) / 2 + 1);
    let ln_norm = ln_fact((j1 + m1) / 2)
        + ln_fact((j1 - m1) / 2)
        + ln_fact((j2 + m2) / 2)
        + ln_fact((j2 - m2) / 2)
        + ln_fact((jj + mm) / 2)
        + ln_fact((jj - mm) / 2);
    let pref = 0.5 * ((jj as f64 + 1.0).ln() + ln_delta + ln_norm);

    let k_min = 0.max((j2 - jj - m1) / 2).max((j1 + m2 - jj) / 2);
    let k_max = a1.min((j1 - m1) / 2).min((j2 + m2) / 2);
    if k_min > k_max {
        return Ok(0.0);
    }

    let mut ln_terms = Vec::with_capacity((k_max - k_min + 1) as usize);
    let mut max_ln = f64::NEG_INFINITY;
    for k in k_min..=k_max {
        let ln_den = ln_fact(k)
            + ln_fact(a1 - k)
            + ln_fact((j1 - m1) / 2 - k)
            + ln_fact((j2 + m2) / 2 - k)
            + ln_fact((jj - j2 + m1) / 2 + k)
            + ln_fact((jj - j1 - m2) / 2 + k);
        let ln_t = pref - ln_den;
        max_ln = max_ln.max(ln_t);
        ln_terms.push((k, ln_t));
    }
    let mut sum = 0.0;
    for (k, ln_t) in ln_terms {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (ln_t - max_ln).exp();
    }
    Ok(sum * max_ln.exp())
}

/// Wigner small-d matrix element d^j_{m'm}(beta) by the standard finite
/// sum; rows and columns are orthonormal.
pub fn wigner_small_d(two_j: HalfInt, two_mp: HalfInt, two_m: HalfInt, beta: f64) -> Result<f64> {
    validate_jm(two_j, two_mp)?;
    validate_jm(two_j, two_m)?;
    let j = two_j.doubled();
    if j >= FACT_LEN as i32 {
        return Err(CoreError::LabelTooLarge(j));
    }
    Ok(small_d_unchecked(j, two_mp.doubled(), two_m.doubled(), beta))
}

/// Internal small-d without label validation. Doubled-integer arguments.
pub(crate) fn small_d_unchecked(tj: i32, tmp: i32, tm: i32, beta: f64) -> f64 {
    let fact = fact_table();
    let f = |n: i32| -> f64 { fact[(n / 2) as usize] };
    let pref = (f(tj + tmp) * f(tj - tmp) * f(tj + tm) * f(tj - tm)).sqrt();
    let c = (beta / 2.0).cos();
    let s = (beta / 2.0).sin();

    // k runs (in doubled units) over max(0, m - m') .. min(j + m, j - m')
    let k_min = 0.max(tm - tmp);
    let k_max = (tj + tm).min(tj - tmp);
    let mut sum = 0.0;
    let mut k = k_min;
    while k <= k_max {
        let den = f(tj + tm - k) * f(k) * f(tmp - tm + k) * f(tj - tmp - k);
        let sign = if ((tmp - tm + k) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let pc = (2 * tj + tm - tmp - 2 * k) / 2;
        let ps = (tmp - tm + 2 * k) / 2;
        sum += sign / den * c.powi(pc) * s.powi(ps);
        k += 2;
    }
    pref * sum
}

/// Full (2j+1) x (2j+1) small-d matrix at `beta`, row-major, rows and
/// columns ordered by ascending m. Used by the hot paths that need every
/// element at once.
pub(crate) fn small_d_matrix(tj: i32, beta: f64) -> Vec<f64> {
    let dim = (tj + 1) as usize;
    let mut out = vec![0.0; dim * dim];
    for (r, tmp) in (-tj..=tj).step_by(2).enumerate() {
        for (c, tm) in (-tj..=tj).step_by(2).enumerate() {
            out[r * dim + c] = small_d_unchecked(tj, tmp, tm, beta);
        }
    }
    out
}

/// Wigner D-matrix element D^j_{m'm}(g).
pub fn wigner_big_d(
    two_j: HalfInt,
    two_mp: HalfInt,
    two_m: HalfInt,
    g: &EulerAngles,
) -> Result<Complex64> {
    let d = wigner_small_d(two_j, two_mp, two_m, g.beta)?;
    let mp = two_mp.as_f64();
    let m = two_m.as_f64();
    Ok(Complex64::from_polar(d, -(mp * g.alpha + m * g.gamma)))
}

/// Character of the spin-1 representation,
/// t(g) = cos(beta) + (1 + cos(beta)) cos(alpha + gamma); always in [-1, 3].
pub fn trace_rep1(g: &EulerAngles) -> f64 {
    let cb = g.beta.cos();
    cb + (1.0 + cb) * (g.alpha + g.gamma).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::{haar_sample, Quaternion};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn h(two: i32) -> HalfInt {
        HalfInt::from_doubled(two)
    }

    #[test]
    fn cg_highest_weight_is_one() {
        // (1/2, 1/2; 1/2, 1/2 | 1, 1)
        let v = clebsch_gordan(h(1), h(1), h(1), h(1), h(2), h(2)).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn cg_spin_zero_coupling_is_identity() {
        for (tj, tm) in [(2, 0), (3, -1), (5, 5), (8, -4)] {
            let v = clebsch_gordan(h(tj), h(tm), h(0), h(0), h(tj), h(tm)).unwrap();
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn cg_forbidden_couplings_vanish() {
        // m1 + m2 != M
        assert_eq!(clebsch_gordan(h(2), h(2), h(2), h(0), h(2), h(0)).unwrap(), 0.0);
        // triangle violation
        assert_eq!(clebsch_gordan(h(2), h(0), h(2), h(0), h(8), h(0)).unwrap(), 0.0);
    }

    #[test]
    fn cg_rejects_parity_mismatch() {
        assert!(clebsch_gordan(h(2), h(1), h(0), h(0), h(2), h(1)).is_err());
    }

    /// Independent oracle: build the coupled basis of j1 (x) j2 explicitly
    /// by lowering from each highest-weight state and Gram-Schmidt against
    /// the already-built states, then read off the expansion coefficients.
    fn cg_oracle(tj1: i32, tj2: i32) -> Vec<(i32, i32, i32, i32, f64)> {
        let d1 = (tj1 + 1) as usize;
        let d2 = (tj2 + 1) as usize;
        let dim = d1 * d2;
        let idx = |i1: usize, i2: usize| i1 * d2 + i2;
        // lowering: J- |j m> = sqrt(j(j+1) - m(m-1)) |j m-1>
        let lower = |v: &[f64], tj_a: i32, tj_b: i32| -> Vec<f64> {
            let mut out = vec![0.0; dim];
            for i1 in 0..d1 {
                for i2 in 0..d2 {
                    let a = v[idx(i1, i2)];
                    if a == 0.0 {
                        continue;
                    }
                    let m1 = (-tj_a + 2 * i1 as i32) as f64 / 2.0;
                    let m2 = (-tj_b + 2 * i2 as i32) as f64 / 2.0;
                    let j1 = tj_a as f64 / 2.0;
                    let j2 = tj_b as f64 / 2.0;
                    if i1 > 0 {
                        out[idx(i1 - 1, i2)] += a * (j1 * (j1 + 1.0) - m1 * (m1 - 1.0)).sqrt();
                    }
                    if i2 > 0 {
                        out[idx(i1, i2 - 1)] += a * (j2 * (j2 + 1.0) - m2 * (m2 - 1.0)).sqrt();
                    }
                }
            }
            out
        };
        let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
        let mut table = Vec::new();
        let mut built: Vec<(i32, i32, Vec<f64>)> = Vec::new(); // (two_J, two_M, vec)
        let mut tjj = tj1 + tj2;
        while tjj >= (tj1 - tj2).abs() {
            // highest weight of the J ladder: the unique M = J state
            // orthogonal to every previously built state with that M
            let tmm = tjj;
            let mut v = vec![0.0; dim];
            if tjj == tj1 + tj2 {
                v[idx(d1 - 1, d2 - 1)] = 1.0;
            } else {
                // span of product states with m1 + m2 = M, orthogonalized
                let mut cand = Vec::new();
                for i1 in 0..d1 {
                    for i2 in 0..d2 {
                        if (-tj1 + 2 * i1 as i32) + (-tj2 + 2 * i2 as i32) == tmm {
                            cand.push(idx(i1, i2));
                        }
                    }
                }
                v[cand[0]] = 1.0;
                for (_, tm_b, b) in built.iter().filter(|(_, tm, _)| *tm == tmm) {
                    let _ = tm_b;
                    let c = dot(&v, b);
                    for i in 0..dim {
                        v[i] -= c * b[i];
                    }
                }
                // Condon-Shortley: highest m1 component positive
                let top = *cand.iter().max_by_key(|&&i| i / d2).unwrap();
                let n = dot(&v, &v).sqrt();
                let s = if v[top] < 0.0 { -1.0 } else { 1.0 };
                for x in v.iter_mut() {
                    *x *= s / n;
                }
            }
            // walk down the ladder with J-
            let mut tm_cur = tmm;
            let mut cur = v;
            loop {
                for i1 in 0..d1 {
                    for i2 in 0..d2 {
                        let c = cur[idx(i1, i2)];
                        if c.abs() > 1e-13 {
                            table.push((
                                -tj1 + 2 * i1 as i32,
                                -tj2 + 2 * i2 as i32,
                                tjj,
                                tm_cur,
                                c,
                            ));
                        }
                    }
                }
                built.push((tjj, tm_cur, cur.clone()));
                if tm_cur - 2 < -tjj {
                    break;
                }
                let jw = tjj as f64 / 2.0;
                let mw = tm_cur as f64 / 2.0;
                let norm = (jw * (jw + 1.0) - mw * (mw - 1.0)).sqrt();
                cur = lower(&cur, tj1, tj2);
                for x in cur.iter_mut() {
                    *x /= norm;
                }
                tm_cur -= 2;
            }
            tjj -= 2;
        }
        table
    }

    #[test]
    fn cg_matches_product_space_oracle() {
        // 9-dim product space 1 (x) 1, plus a half-integer case
        for (tj1, tj2) in [(2, 2), (1, 2), (3, 1)] {
            for (tm1, tm2, tjj, tmm, expect) in cg_oracle(tj1, tj2) {
                let got =
                    clebsch_gordan(h(tj1), h(tm1), h(tj2), h(tm2), h(tjj), h(tmm)).unwrap();
                assert_abs_diff_eq!(got, expect, epsilon = 1e-12);
            }
        }
        // the frozen classic: (1,1; 1,-1 | 1,0) = 1/sqrt(2)
        let v = clebsch_gordan(h(2), h(2), h(2), h(-2), h(2), h(0)).unwrap();
        assert_abs_diff_eq!(v, 0.5f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn small_d_identity_rotation() {
        for tj in [0, 1, 2, 3, 5] {
            for tmp in (-tj..=tj).step_by(2) {
                for tm in (-tj..=tj).step_by(2) {
                    let v = wigner_small_d(h(tj), h(tmp), h(tm), 0.0).unwrap();
                    let expect = if tmp == tm { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(v, expect, epsilon = 1e-15);
                }
            }
        }
    }

    #[test]
    fn small_d_corner_element() {
        // d^1_{1,1}(pi/2) = (1 + cos(pi/2)) / 2 = 1/2
        let v = wigner_small_d(h(2), h(2), h(2), PI / 2.0).unwrap();
        assert_abs_diff_eq!(v, 0.5, epsilon = 1e-15);
        let beta = 0.7;
        let v = wigner_small_d(h(2), h(2), h(2), beta).unwrap();
        assert_abs_diff_eq!(v, (1.0 + beta.cos()) / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn small_d_rows_are_unit_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for tj in [1, 2, 3, 4, 7] {
            for _ in 0..5 {
                let beta = PI * rng.gen::<f64>();
                for tmp in (-tj..=tj).step_by(2) {
                    let s: f64 = (-tj..=tj)
                        .step_by(2)
                        .map(|tm| {
                            let d = wigner_small_d(h(tj), h(tmp), h(tm), beta).unwrap();
                            d * d
                        })
                        .sum();
                    assert_abs_diff_eq!(s, 1.0, epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn big_d_trace_matches_spin1_character() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let g = haar_sample(&mut rng);
            let tr: Complex64 = (-2..=2i32)
                .step_by(2)
                .map(|tm| wigner_big_d(h(2), h(tm), h(tm), &g).unwrap())
                .sum();
            assert_abs_diff_eq!(tr.re, trace_rep1(&g), epsilon = 1e-13);
            assert_abs_diff_eq!(tr.im, 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn trace_rep1_special_points() {
        assert_eq!(trace_rep1(&EulerAngles::IDENTITY), 3.0);
        let v = trace_rep1(&EulerAngles::new(0.0, PI, 0.0));
        assert_abs_diff_eq!(v, -1.0, epsilon = 1e-15);
        let v = trace_rep1(&EulerAngles::new(PI / 2.0, 0.0, 0.0));
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn spin_half_matrix_matches_quaternion_oracle() {
        // D^{1/2} read directly off the double-cover matrix
        // [[w - iz, -y - ix], [y - ix, w + iz]]
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut gs: Vec<EulerAngles> = (0..20).map(|_| haar_sample(&mut rng)).collect();
        gs.push(EulerAngles::new(0.0, PI, 0.0)); // the frozen antidiagonal case
        for g in gs {
            let q = Quaternion::from_euler(&g);
            let u = [
                [Complex64::new(q.w, -q.z), Complex64::new(-q.y, -q.x)],
                [Complex64::new(q.y, -q.x), Complex64::new(q.w, q.z)],
            ];
            for (r, tmp) in [1, -1].into_iter().enumerate() {
                for (c, tm) in [1, -1].into_iter().enumerate() {
                    let d = wigner_big_d(h(1), h(tmp), h(tm), &g).unwrap();
                    assert_abs_diff_eq!(d.re, u[r][c].re, epsilon = 1e-13);
                    assert_abs_diff_eq!(d.im, u[r][c].im, epsilon = 1e-13);
                }
            }
        }
        // at (0, pi, 0) the diagonal vanishes and the off-diagonal is +/-1
        let g = EulerAngles::new(0.0, PI, 0.0);
        assert_abs_diff_eq!(
            wigner_big_d(h(1), h(1), h(-1), &g).unwrap().re,
            -1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            wigner_big_d(h(1), h(-1), h(1), &g).unwrap().re,
            1.0,
            epsilon = 1e-15
        );
    }
}
