//! Product quadrature on the rotation group, exact for band-limited
//! integrands.
//!
//! Equidistant angles in alpha and gamma kill every nonzero integer
//! frequency up to the design band; Gauss-Legendre nodes in cos(beta)
//! integrate the matching polynomial degree exactly. Total weight is 1,
//! mirroring the normalized invariant measure.

use std::f64::consts::TAU;

use crate::error::Result;
use crate::euler::EulerAngles;
use crate::legendre::gauss_legendre;

/// Weighted nodes on the group; weights sum to 1.
#[derive(Clone, Debug)]
pub struct GroupGrid {
    pub nodes: Vec<(EulerAngles, f64)>,
}

impl GroupGrid {
    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|&(_, w)| w).sum()
    }

    /// Integrate a scalar function against the grid.
    pub fn integrate<F: FnMut(&EulerAngles) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().map(|(g, w)| w * f(g)).sum()
    }
}

/// Grid that integrates any product D^j_{Mm} conj(D^{j'}_{M'm'}) with
/// j, j' <= j_max (same parity) exactly to roundoff, reproducing the
/// orthogonality value delta^{jj'} delta_{MM'} delta_{mm'} / (2j + 1).
pub fn su2_quadrature_grid(two_j_max: crate::halfint::HalfInt) -> Result<GroupGrid> {
    build_grid(two_j_max.doubled().max(0), 0)
}

/// Internal constructor; `shrink_ang` exists so the verification suite can
/// deliberately undersize the angular rule and watch exactness break.
pub(crate) fn build_grid(two_j_max: i32, shrink_ang: i32) -> Result<GroupGrid> {
    let n_ang = ((two_j_max + 1) - shrink_ang).max(1) as usize;
    let n_beta = ((two_j_max + 3) / 2) as usize; // >= j_max + 1
    let gl = gauss_legendre(n_beta.max(1))?;
    let mut nodes = Vec::with_capacity(n_ang * n_ang * gl.len());
    let ang_w = 1.0 / (n_ang * n_ang) as f64;
    for ka in 0..n_ang {
        let alpha = TAU * ka as f64 / n_ang as f64;
        for kg in 0..n_ang {
            let gamma = TAU * kg as f64 / n_ang as f64;
            for &(x, w) in &gl {
                nodes.push((
                    EulerAngles::new(alpha, x.clamp(-1.0, 1.0).acos(), gamma),
                    (w / 2.0) * ang_w,
                ));
            }
        }
    }
    Ok(GroupGrid { nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfint::HalfInt;
    use crate::wigner::{trace_rep1, wigner_big_d};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    /// All same-parity index tuples with j, j' <= j_max reproduce the
    /// orthogonality relation on the grid.
    fn max_orthogonality_error(grid: &GroupGrid, two_j_max: i32) -> f64 {
        let mut worst: f64 = 0.0;
        let ladder: Vec<i32> = (two_j_max % 2..=two_j_max).step_by(2).collect();
        for &tj in &ladder {
            for &tjp in &ladder {
                for tmm in (-tj..=tj).step_by(2) {
                    for tm in (-tj..=tj).step_by(2) {
                        for tmmp in (-tjp..=tjp).step_by(2) {
                            for tmp in (-tjp..=tjp).step_by(2) {
                                let mut s = Complex64::new(0.0, 0.0);
                                for (g, w) in &grid.nodes {
                                    let a = wigner_big_d(
                                        HalfInt::from_doubled(tj),
                                        HalfInt::from_doubled(tmm),
                                        HalfInt::from_doubled(tm),
                                        g,
                                    )
                                    .unwrap();
                                    let b = wigner_big_d(
                                        HalfInt::from_doubled(tjp),
                                        HalfInt::from_doubled(tmmp),
                                        HalfInt::from_doubled(tmp),
                                        g,
                                    )
                                    .unwrap();
                                    s += w * a * b.conj();
                                }
                                let expect = if tj == tjp && tmm == tmmp && tm == tmp {
                                    1.0 / (tj as f64 + 1.0)
                                } else {
                                    0.0
                                };
                                worst = worst.max((s - expect).norm());
                            }
                        }
                    }
                }
            }
        }
        worst
    }

    #[test]
    fn grid_weight_is_normalized() {
        let g = su2_quadrature_grid(HalfInt::from_int(2)).unwrap();
        assert_abs_diff_eq!(g.total_weight(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn orthogonality_exact_at_design_spin() {
        let grid = su2_quadrature_grid(HalfInt::ONE).unwrap();
        assert!(max_orthogonality_error(&grid, 2) < 1e-13);
        let grid = su2_quadrature_grid(HalfInt::from_doubled(3)).unwrap();
        assert!(max_orthogonality_error(&grid, 3) < 1e-13);
    }

    #[test]
    fn undersized_grid_breaks_exactness() {
        let grid = build_grid(2, 1).unwrap();
        assert!(max_orthogonality_error(&grid, 2) > 1e-6);
    }

    #[test]
    fn spin1_character_integrates_to_zero() {
        let grid = su2_quadrature_grid(HalfInt::ONE).unwrap();
        let v = grid.integrate(trace_rep1);
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-14);
    }
}
