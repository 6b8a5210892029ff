//! Finite measurements: isotropic group-element sets, the finite optimal
//! POVM they induce for any spin count, the minimal 4-outcome measurement
//! for two spins, and completeness certification.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::euler::EulerAngles;
use crate::halfint::HalfInt;
use crate::legendre::gauss_legendre;
use crate::states::{IrrepBlock, ReferenceState};
use crate::wigner::wigner_big_d;

/// A finite measurement: a reference state plus weighted group elements.
/// Outcome r projects onto the reference rotated by g_r; the weights are
/// positive and sum to 1.
#[derive(Clone, Debug)]
pub struct FinitePovm {
    pub n_spins: u32,
    pub reference: ReferenceState,
    pub outcomes: Vec<(EulerAngles, f64)>,
}

impl FinitePovm {
    pub fn new(
        n_spins: u32,
        reference: ReferenceState,
        outcomes: Vec<(EulerAngles, f64)>,
    ) -> Result<Self> {
        if outcomes.is_empty() || !outcomes.iter().all(|&(_, w)| w > 0.0) {
            return Err(CoreError::InvalidArgument(
                "POVM needs nonempty outcomes with positive weights".into(),
            ));
        }
        let total: f64 = outcomes.iter().map(|&(_, w)| w).sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(CoreError::InvalidArgument(format!(
                "outcome weights sum to {total}, expected 1"
            )));
        }
        Ok(FinitePovm { n_spins, reference, outcomes })
    }

    /// Dimension of the direct-sum space the measurement acts on.
    pub fn dimension(&self) -> usize {
        self.reference.dimension()
    }

    /// The weighted outcome vectors: block j of outcome r holds
    /// sqrt(2j+1) U^j(g_r) |B^j>, concatenated over the ladder.
    pub fn outcome_vectors(&self) -> Vec<Vec<Complex64>> {
        self.outcomes
            .iter()
            .map(|(g, _)| weighted_vector(&self.reference, g))
            .collect()
    }
}

/// Concatenated components of the sqrt(2j+1)-weighted rotated reference.
pub(crate) fn weighted_vector(reference: &ReferenceState, g: &EulerAngles) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(reference.dimension());
    for block in reference.blocks() {
        let w = (block.two_j.doubled() as f64 + 1.0).sqrt();
        for x in block.rotated(g) {
            v.push(w * x);
        }
    }
    v
}

/// Completeness certificate of a finite POVM on its declared space.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompletenessReport {
    pub dimension: usize,
    /// Largest absolute entry of (sum of weighted projectors - identity).
    pub residual_norm: f64,
    /// True when the outcomes are mutually orthogonal projectors.
    pub is_projective: bool,
    /// Largest deviation over pairs ||O_r O_s - delta_{rs} O_r||.
    pub pairwise_residual: f64,
}

/// Group elements isotropically distributed up to spin N/2: N+1
/// equidistant angles in alpha and gamma each, Gauss-Legendre nodes in
/// cos(beta), weights normalized to total mass 1.
pub fn build_isotropic_set(n_spins: u32) -> Result<Vec<(EulerAngles, f64)>> {
    let n = n_spins as usize;
    let n_ang = n + 1;
    let n_beta = n / 2 + 1; // smallest rule killing Legendre moments 1..N
    let gl = gauss_legendre(n_beta)?;
    let ang_w = 1.0 / (n_ang * n_ang) as f64;
    let mut out = Vec::with_capacity(n_ang * n_ang * gl.len());
    for ka in 0..n_ang {
        let alpha = TAU * ka as f64 / n_ang as f64;
        for kg in 0..n_ang {
            let gamma = TAU * kg as f64 / n_ang as f64;
            for &(x, w) in &gl {
                out.push((
                    EulerAngles::new(alpha, x.clamp(-1.0, 1.0).acos(), gamma),
                    (w / 2.0) * ang_w,
                ));
            }
        }
    }
    Ok(out)
}

/// Largest deviation of the weighted sums
/// sum_r c_r D^j_{mn}(g_r) conj(D^{j'}_{m'n'}(g_r)) from the continuum
/// value delta/(2j+1), over all same-parity index tuples with
/// j, j' <= j_max.
pub fn check_discrete_orthogonality(
    set: &[(EulerAngles, f64)],
    two_j_max: HalfInt,
) -> Result<f64> {
    let top = two_j_max.doubled().max(0);
    let ladder: Vec<i32> = (top % 2..=top).step_by(2).collect();
    // cache the D matrices of every point once
    let mut cache: Vec<Vec<Vec<Complex64>>> = Vec::with_capacity(set.len());
    for (g, _) in set {
        let mut per_j = Vec::with_capacity(ladder.len());
        for &tj in &ladder {
            let dim = (tj + 1) as usize;
            let mut mat = vec![Complex64::new(0.0, 0.0); dim * dim];
            for (r, tm) in (-tj..=tj).step_by(2).enumerate() {
                for (c, tn) in (-tj..=tj).step_by(2).enumerate() {
                    mat[r * dim + c] = wigner_big_d(
                        HalfInt::from_doubled(tj),
                        HalfInt::from_doubled(tm),
                        HalfInt::from_doubled(tn),
                        g,
                    )?;
                }
            }
            per_j.push(mat);
        }
        cache.push(per_j);
    }
    let weights: Vec<f64> = set.iter().map(|&(_, w)| w).collect();
    let total_w: f64 = weights.iter().sum();
    let mut worst: f64 = 0.0;
    for (aj, &tj) in ladder.iter().enumerate() {
        let dj = (tj + 1) as usize;
        for (bj, &tjp) in ladder.iter().enumerate() {
            let djp = (tjp + 1) as usize;
            for i1 in 0..dj * dj {
                for i2 in 0..djp * djp {
                    let mut s = Complex64::new(0.0, 0.0);
                    for (p, w) in weights.iter().enumerate() {
                        s += w * cache[p][aj][i1] * cache[p][bj][i2].conj();
                    }
                    let expect = if aj == bj && i1 == i2 {
                        total_w / (tj as f64 + 1.0)
                    } else {
                        0.0
                    };
                    worst = worst.max((s - expect).norm());
                }
            }
        }
    }
    Ok(worst)
}

/// Attach the isotropic set for `n_spins` to a reference state. With a
/// per-block-normalized reference this is complete on the direct-sum
/// space spanned by the reference blocks.
pub fn build_finite_povm(n_spins: u32, reference: ReferenceState) -> Result<FinitePovm> {
    let outcomes = build_isotropic_set(n_spins)?;
    FinitePovm::new(n_spins, reference, outcomes)
}

/// Certify completeness (sum of weighted projectors equals the identity)
/// and projectivity (pairwise products vanish) on the declared space.
pub fn check_completeness(p: &FinitePovm) -> CompletenessReport {
    let dim = p.dimension();
    let vecs = p.outcome_vectors();
    let weights: Vec<f64> = p.outcomes.iter().map(|&(_, w)| w).collect();
    let mut sum = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (v, &w) in vecs.iter().zip(&weights) {
        for a in 0..dim {
            for b in 0..dim {
                sum[a * dim + b] += w * v[a] * v[b].conj();
            }
        }
    }
    let mut residual: f64 = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            let expect = if a == b { 1.0 } else { 0.0 };
            residual = residual.max((sum[a * dim + b] - expect).norm());
        }
    }
    // O_r O_s = c_r c_s <v_r, v_s> v_r v_s^dagger is rank one, so the
    // max-abs entry of O_r O_s - delta O_r follows from scalars alone.
    let max_abs: Vec<f64> = vecs
        .iter()
        .map(|v| v.iter().map(|x| x.norm()).fold(0.0, f64::max))
        .collect();
    let norms_sq: Vec<f64> = vecs
        .iter()
        .map(|v| v.iter().map(|x| x.norm_sqr()).sum())
        .collect();
    let mut pairwise: f64 = 0.0;
    for r in 0..vecs.len() {
        for s in 0..vecs.len() {
            if r == s {
                // O_r^2 - O_r = c_r (c_r |v_r|^2 - 1) v_r v_r^dagger
                let scale = weights[r] * (weights[r] * norms_sq[r] - 1.0).abs();
                pairwise = pairwise.max(scale * max_abs[r] * max_abs[r]);
            } else {
                let inner: Complex64 = vecs[r]
                    .iter()
                    .zip(&vecs[s])
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let scale = weights[r] * weights[s] * inner.norm();
                pairwise = pairwise.max(scale * max_abs[r] * max_abs[s]);
            }
        }
    }
    CompletenessReport {
        dimension: dim,
        residual_norm: residual,
        is_projective: pairwise <= 1e-10,
        pairwise_residual: pairwise,
    }
}

/// The minimal 4-outcome measurement for two spins: reference
/// sqrt(3)/2 |1,1> + 1/2 |0,0> (per-block normalized here), three
/// outcomes on a tetrahedral cap with cos(beta) = -1/3 and gamma folded
/// against alpha, plus the identity, all at weight 1/4.
///
/// The published angle table quotes cos(theta_r) = 1/3; certification of
/// the completeness identity fixes the Euler reading to cos(beta_r) = -1/3
/// (the rotated z-axes then form a regular tetrahedron with +z).
pub fn minimal_povm_n2() -> FinitePovm {
    let reference = ReferenceState::new(vec![
        IrrepBlock::new(HalfInt::ZERO, vec![Complex64::new(1.0, 0.0)]).expect("scalar block"),
        IrrepBlock::highest_weight(HalfInt::ONE),
    ])
    .expect("unit blocks");
    let beta = (-1f64 / 3.0).acos();
    let mut outcomes = Vec::with_capacity(4);
    for r in 0..3 {
        let alpha = r as f64 * TAU / 3.0;
        outcomes.push((EulerAngles::new(alpha, beta, PI - alpha), 0.25));
    }
    outcomes.push((EulerAngles::IDENTITY, 0.25));
    FinitePovm::new(2, reference, outcomes).expect("weights sum to 1")
}

// --- export schema ---------------------------------------------------

/// Serialized form of a finite POVM, written and read by the CLI.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PovmFile {
    pub n_spins: u32,
    pub reference: Vec<PovmBlock>,
    pub outcomes: Vec<PovmOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub completeness: Option<CompletenessReport>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PovmBlock {
    pub two_j: i32,
    /// Complex amplitudes as [re, im] pairs, ascending in m.
    pub amps: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PovmOutcome {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub weight: f64,
}

impl PovmFile {
    pub fn from_povm(p: &FinitePovm, report: Option<CompletenessReport>) -> Self {
        PovmFile {
            n_spins: p.n_spins,
            reference: p
                .reference
                .blocks()
                .iter()
                .map(|b| PovmBlock {
                    two_j: b.two_j.doubled(),
                    amps: b.amps.iter().map(|a| [a.re, a.im]).collect(),
                })
                .collect(),
            outcomes: p
                .outcomes
                .iter()
                .map(|(g, w)| PovmOutcome { alpha: g.alpha, beta: g.beta, gamma: g.gamma, weight: *w })
                .collect(),
            completeness: report,
        }
    }

    pub fn to_povm(&self) -> Result<FinitePovm> {
        let blocks = self
            .reference
            .iter()
            .map(|b| {
                IrrepBlock::new(
                    HalfInt::from_doubled(b.two_j),
                    b.amps.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let reference = ReferenceState::new(blocks)?;
        let outcomes = self
            .outcomes
            .iter()
            .map(|o| (EulerAngles::new(o.alpha, o.beta, o.gamma), o.weight))
            .collect();
        FinitePovm::new(self.n_spins, reference, outcomes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn isotropic_set_counts_and_mass() {
        let s0 = build_isotropic_set(0).unwrap();
        assert_eq!(s0.len(), 1);
        assert_abs_diff_eq!(s0[0].1, 1.0, epsilon = 1e-15);
        let s2 = build_isotropic_set(2).unwrap();
        assert_eq!(s2.len(), 18); // 3 * 3 * 2
        let mass: f64 = s2.iter().map(|&(_, w)| w).sum();
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-14);
        assert!(s2.iter().all(|&(_, w)| w > 0.0));
    }

    #[test]
    fn isotropic_set_passes_design_spin() {
        let s = build_isotropic_set(4).unwrap();
        let v = check_discrete_orthogonality(&s, HalfInt::from_int(2)).unwrap();
        assert!(v < 1e-12, "violation {v:e}");
    }

    #[test]
    fn single_point_fails_orthogonality() {
        let one = vec![(EulerAngles::IDENTITY, 1.0)];
        let v = check_discrete_orthogonality(&one, HalfInt::ONE).unwrap();
        assert!(v >= 1.0 / 3.0);
    }

    #[test]
    fn exactness_guarantee_is_sharp() {
        // one spin above the design value must visibly fail
        for n in [2u32, 4] {
            let s = build_isotropic_set(n).unwrap();
            let v =
                check_discrete_orthogonality(&s, HalfInt::from_doubled(n as i32 + 2)).unwrap();
            assert!(v > 1e-6, "N={n}: violation {v:e} unexpectedly small");
        }
    }

    #[test]
    fn recipe_povm_complete() {
        for n in [2u32, 4] {
            let p = build_finite_povm(n, ReferenceState::b_op(n)).unwrap();
            let rep = check_completeness(&p);
            assert_eq!(rep.dimension, if n == 2 { 4 } else { 9 });
            assert!(rep.residual_norm < 1e-12, "N={n}: {:e}", rep.residual_norm);
            assert!(!rep.is_projective, "more outcomes than dimensions");
        }
    }

    #[test]
    fn dropping_an_outcome_breaks_completeness() {
        let p = build_finite_povm(2, ReferenceState::b_op(2)).unwrap();
        let dropped = p.outcomes[0];
        let mut outcomes = p.outcomes.clone();
        outcomes.remove(0);
        // weights now sum below 1; bypass the validating constructor
        let crippled = FinitePovm {
            n_spins: 2,
            reference: p.reference.clone(),
            outcomes,
        };
        let rep = check_completeness(&crippled);
        let v = weighted_vector(&p.reference, &dropped.0);
        let vmax = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
        assert!(rep.residual_norm >= dropped.1 * vmax * vmax - 1e-12);
    }

    #[test]
    fn minimal_measurement_is_complete_and_projective() {
        let p = minimal_povm_n2();
        assert_eq!(p.outcomes.len(), 4);
        let rep = check_completeness(&p);
        assert_eq!(rep.dimension, 4);
        assert!(rep.residual_norm < 1e-12, "completeness {:e}", rep.residual_norm);
        assert!(rep.is_projective);
        assert!(rep.pairwise_residual < 1e-12, "projectivity {:e}", rep.pairwise_residual);
    }

    #[test]
    fn minimal_set_is_not_isotropic() {
        let p = minimal_povm_n2();
        let v = check_discrete_orthogonality(&p.outcomes, HalfInt::ONE).unwrap();
        assert!(v > 1e-3, "the four points should violate some index tuples");
    }

    #[test]
    fn schema_round_trip() {
        let p = minimal_povm_n2();
        let rep = check_completeness(&p);
        let file = PovmFile::from_povm(&p, Some(rep.clone()));
        let json = serde_json::to_string_pretty(&file).unwrap();
        let parsed: PovmFile = serde_json::from_str(&json).unwrap();
        let rebuilt = parsed.to_povm().unwrap();
        let rep2 = check_completeness(&rebuilt);
        assert!((rep2.residual_norm - rep.residual_norm).abs() < 1e-12);
        assert_eq!(rep2.is_projective, rep.is_projective);
    }
}
