//! Monte-Carlo playthrough of the full channel: draw a random frame,
//! measure with a finite POVM, score the guess, and estimate the average
//! score. Also hosts the exact quadrature evaluation of the expected
//! score, used as the independent oracle for the algebraic route.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::euler::{compose, haar_sample, inverse, EulerAngles};
use crate::povm::FinitePovm;
use crate::quadrature::su2_quadrature_grid;
use crate::states::{ReferenceState, SignalState};
use crate::wigner::trace_rep1;

/// Shots per worker shard; the shard layout depends only on the shot
/// count, so results are independent of how shards map to threads.
const SHARD_SIZE: u64 = 1 << 16;

/// Monte-Carlo estimate of the expected score.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub shots: u64,
    pub t_mean: f64,
    pub h_mean: f64,
    pub std_err: f64,
    pub seed: u64,
}

/// How the receiver turns an outcome into a frame guess.
#[derive(Clone, Copy, Debug)]
pub enum GuessStrategy {
    /// Guess the frame of the observed outcome (the protocol proper).
    OutcomeFrame,
    /// Ignore the outcome and always guess the same frame (control run).
    Fixed(EulerAngles),
}

/// <B| U(g) |A> with the sqrt(2j+1) block weights on the reference side.
pub fn overlap(b: &ReferenceState, a: &SignalState, g: &EulerAngles) -> Result<Complex64> {
    if a.ladder() != b.ladder() {
        return Err(CoreError::LadderMismatch);
    }
    let mut total = Complex64::new(0.0, 0.0);
    for (bb, ab) in b.blocks().iter().zip(a.blocks()) {
        let rotated = ab.rotated(g);
        let w = (bb.two_j.doubled() as f64 + 1.0).sqrt();
        let inner: Complex64 = bb
            .amps
            .iter()
            .zip(&rotated)
            .map(|(x, y)| x.conj() * y)
            .sum();
        total += w * inner;
    }
    Ok(total)
}

/// Squared frame distance h(g, g') = 6 - 2 t(g'^{-1} g); equals the sum
/// of squared differences of the two rotated trihedra, and lies in [0, 8].
pub fn error_h(g: &EulerAngles, gp: &EulerAngles) -> f64 {
    6.0 - 2.0 * trace_rep1(&compose(&inverse(gp), g))
}

/// Born probabilities of each outcome when the signal was rotated by g:
/// p_r = c_r |<B| U(g_r^{-1} g) |A>|^2. Sums to 1 for a complete POVM.
pub fn outcome_probs(p: &FinitePovm, a: &SignalState, g: &EulerAngles) -> Result<Vec<f64>> {
    if a.ladder() != p.reference.ladder() {
        return Err(CoreError::LadderMismatch);
    }
    let mut probs = Vec::with_capacity(p.outcomes.len());
    for (g_r, c_r) in &p.outcomes {
        let amp = overlap(&p.reference, a, &compose(&inverse(g_r), g))?;
        probs.push((c_r * amp.norm_sqr()).max(0.0));
    }
    Ok(probs)
}

/// Run the full protocol for `shots` transmissions. Deterministic for a
/// fixed (seed, shots, inputs) triple regardless of thread count: shard k
/// covers a fixed shot range and draws from a generator seeded with
/// seed + k.
pub fn simulate(p: &FinitePovm, a: &SignalState, shots: u64, seed: u64) -> Result<SimResult> {
    simulate_with_guess(p, a, shots, seed, GuessStrategy::OutcomeFrame)
}

pub fn simulate_with_guess(
    p: &FinitePovm,
    a: &SignalState,
    shots: u64,
    seed: u64,
    guess: GuessStrategy,
) -> Result<SimResult> {
    if shots == 0 {
        return Err(CoreError::InvalidArgument("shots must be >= 1".into()));
    }
    if a.ladder() != p.reference.ladder() {
        return Err(CoreError::LadderMismatch);
    }
    // fixed per-outcome data: weighted bra vectors and guess frames
    let bras = p.outcome_vectors();
    let weights: Vec<f64> = p.outcomes.iter().map(|&(_, w)| w).collect();
    let guesses: Vec<EulerAngles> = p.outcomes.iter().map(|&(g, _)| g).collect();
    let signal = a.clone();

    let n_shards = shots.div_ceil(SHARD_SIZE);
    let partials: Vec<Result<(f64, f64)>> = (0..n_shards)
        .into_par_iter()
        .map(|k| {
            let lo = k * SHARD_SIZE;
            let hi = (lo + SHARD_SIZE).min(shots);
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k));
            let mut sum_t = 0.0;
            let mut sum_t2 = 0.0;
            for _ in lo..hi {
                let g = haar_sample(&mut rng);
                // signal rotated once per shot; outcomes reduce to dots
                let mut rotated: Vec<Complex64> = Vec::with_capacity(signal.blocks().len());
                for block in signal.blocks() {
                    rotated.extend(block.rotated(&g));
                }
                let mut probs = Vec::with_capacity(bras.len());
                let mut total = 0.0;
                for (bra, &c) in bras.iter().zip(&weights) {
                    let amp: Complex64 = bra
                        .iter()
                        .zip(&rotated)
                        .map(|(x, y)| x.conj() * y)
                        .sum();
                    let pr = (c * amp.norm_sqr()).max(0.0);
                    probs.push(pr);
                    total += pr;
                }
                if (1.0 - total).abs() > 1e-6 {
                    return Err(CoreError::IncompletePovm { deficit: 1.0 - total });
                }
                // inverse-CDF draw with a single uniform
                let u = rng.gen::<f64>() * total;
                let mut acc = 0.0;
                let mut r = probs.len() - 1;
                for (i, &pr) in probs.iter().enumerate() {
                    acc += pr;
                    if u < acc {
                        r = i;
                        break;
                    }
                }
                let guess_frame = match guess {
                    GuessStrategy::OutcomeFrame => guesses[r],
                    GuessStrategy::Fixed(g0) => g0,
                };
                let t = trace_rep1(&compose(&inverse(&guess_frame), &g));
                sum_t += t;
                sum_t2 += t * t;
            }
            Ok((sum_t, sum_t2))
        })
        .collect();

    let mut sum_t = 0.0;
    let mut sum_t2 = 0.0;
    for part in partials {
        let (s, s2) = part?;
        sum_t += s;
        sum_t2 += s2;
    }
    let n = shots as f64;
    let t_mean = sum_t / n;
    let std_err = if shots > 1 {
        let var = ((sum_t2 - sum_t * sum_t / n) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(SimResult {
        shots,
        t_mean,
        h_mean: 6.0 - 2.0 * t_mean,
        std_err,
        seed,
    })
}

/// Expected score by exact quadrature of |<B|U(g)|A>|^2 t(g): the grid is
/// sized for two state factors plus the spin-1 character, so the
/// band-limited integrand is integrated exactly to roundoff.
pub fn avg_t_quadrature(a: &SignalState, b: &ReferenceState) -> Result<f64> {
    if a.ladder() != b.ladder() {
        return Err(CoreError::LadderMismatch);
    }
    let two_j_top = a
        .ladder()
        .last()
        .map(|j| j.doubled())
        .unwrap_or(0);
    let grid = su2_quadrature_grid(crate::halfint::HalfInt::from_doubled(2 * two_j_top + 2))?;
    let mut total = 0.0;
    for (g, w) in &grid.nodes {
        let amp = overlap(b, a, g)?;
        total += w * amp.norm_sqr() * trace_rep1(g);
    }
    Ok(total)
}
