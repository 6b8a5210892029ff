//! Fidelity quadratic forms and the optimal transmission protocol.
//!
//! The expected score <t> of a signal/reference pair reduces blockwise to
//! a quadratic form over the per-block weights, whose kernel is a
//! nonnegative symmetric tridiagonal matrix in the spin label. The
//! optimal protocol is the Perron eigenpair of the saturating matrix,
//! whose entries are closed forms valid to very large spin counts.

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::halfint::HalfInt;
use crate::states::{ladder, time_reverse, IrrepBlock, ReducedWeights, ReferenceState, SignalState};
use crate::tridiag::{max_eigen, TridiagSym};
use crate::wigner::clebsch_gordan;

/// Solved optimal protocol for a given number of spins.
#[derive(Clone, Debug)]
pub struct ProtocolSolution {
    pub n_spins: u32,
    /// Largest achievable <t>.
    pub lambda_op: f64,
    /// Perron weights C^j, ascending in j over the ladder.
    pub weights: ReducedWeights,
    /// Average error 6 - 2*lambda_op.
    pub avg_h: f64,
}

/// Coupling kernel M^{lj}_{n m n' m'}: zero unless |l - j| <= 1, the
/// labels share parity, and n - m = n' - m' lies in {-1, 0, 1}.
pub fn m_tensor(
    two_l: HalfInt,
    two_j: HalfInt,
    two_n: HalfInt,
    two_m: HalfInt,
    two_np: HalfInt,
    two_mp: HalfInt,
) -> Result<f64> {
    crate::halfint::validate_jm(two_l, two_n)?;
    crate::halfint::validate_jm(two_j, two_m)?;
    crate::halfint::validate_jm(two_l, two_np)?;
    crate::halfint::validate_jm(two_j, two_mp)?;
    if (two_l.doubled() - two_j.doubled()).abs() > 2 || !two_l.same_parity(two_j) {
        return Ok(0.0);
    }
    let two_mm = two_n - two_m;
    if two_mm != two_np - two_mp || two_mm.doubled().abs() > 2 {
        return Ok(0.0);
    }
    let c1 = clebsch_gordan(HalfInt::ONE, two_mm, two_j, two_m, two_l, two_n)?;
    let c2 = clebsch_gordan(HalfInt::ONE, two_mm, two_j, two_mp, two_l, two_np)?;
    let ratio = (two_j.doubled() as f64 + 1.0) / (two_l.doubled() as f64 + 1.0);
    Ok(ratio.sqrt() * c1 * c2)
}

/// <t> for arbitrary (signal, reference) on a common ladder, contracted
/// through the coupling kernel. Real within roundoff, in [-1, 3].
pub fn avg_t_general(a: &SignalState, b: &ReferenceState) -> Result<f64> {
    if a.ladder() != b.ladder() {
        return Err(CoreError::LadderMismatch);
    }
    let mut total = Complex64::new(0.0, 0.0);
    let blocks_a = a.blocks();
    let blocks_b = b.blocks();
    for (il, bl_l) in blocks_a.iter().enumerate() {
        for (ij, bl_j) in blocks_a.iter().enumerate() {
            let two_l = bl_l.two_j;
            let two_j = bl_j.two_j;
            if (two_l.doubled() - two_j.doubled()).abs() > 2 {
                continue;
            }
            let ref_l = &blocks_b[il];
            let ref_j = &blocks_b[ij];
            // M = n - m runs over the three spin-1 labels
            for two_mm in [-2i32, 0, 2] {
                let mut za = Complex64::new(0.0, 0.0); // sum over (n, m) of conj(A^l_n) A^j_m <1 M j m|l n>
                let mut zb = Complex64::new(0.0, 0.0); // sum over (n', m') of B^l_{n'} conj(B^j_{m'}) <1 M j m'|l n'>
                for two_m in two_j.magnetic_range() {
                    let two_n = two_m + HalfInt::from_doubled(two_mm);
                    if two_n.doubled().abs() > two_l.doubled() {
                        continue;
                    }
                    let cg = clebsch_gordan(
                        HalfInt::ONE,
                        HalfInt::from_doubled(two_mm),
                        two_j,
                        two_m,
                        two_l,
                        two_n,
                    )?;
                    if cg == 0.0 {
                        continue;
                    }
                    za += bl_l.amp(two_n).conj() * bl_j.amp(two_m) * cg;
                    zb += ref_l.amp(two_n) * ref_j.amp(two_m).conj() * cg;
                }
                let ratio = (two_j.doubled() as f64 + 1.0) / (two_l.doubled() as f64 + 1.0);
                total += ratio.sqrt() * za * zb;
            }
        }
    }
    Ok(total.re)
}

/// The reduced fidelity matrix of a reference state: entry (j, l) is
/// sqrt((2j+1)(2l+1))/3 times the weight of the spin-1 component of
/// |B^j> (x) |time-reversed B^l>. Tridiagonal, symmetric, nonnegative.
pub fn build_m_b(b: &ReferenceState) -> Result<TridiagSym> {
    let blocks = b.blocks();
    let n = blocks.len();
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n {
        diag.push(m_b_entry(&blocks[i], &blocks[i])?);
        if i + 1 < n {
            off.push(m_b_entry(&blocks[i], &blocks[i + 1])?);
        }
    }
    TridiagSym::new(diag, off)
}

/// Single entry of the reduced matrix for blocks (j, l); public for the
/// cross-route verification against the coupling-kernel contraction.
pub fn m_b_entry(bj: &IrrepBlock, bl: &IrrepBlock) -> Result<f64> {
    let two_j = bj.two_j;
    let two_l = bl.two_j;
    if (two_j.doubled() - two_l.doubled()).abs() > 2 || !two_j.same_parity(two_l) {
        return Ok(0.0);
    }
    let tl = time_reverse(bl);
    let mut total = 0.0;
    for two_mm in [-2i32, 0, 2] {
        let mut z = Complex64::new(0.0, 0.0);
        for two_m in two_j.magnetic_range() {
            let two_n = HalfInt::from_doubled(two_mm) - two_m;
            if two_n.doubled().abs() > two_l.doubled() {
                continue;
            }
            let cg = clebsch_gordan(
                two_j,
                two_m,
                two_l,
                two_n,
                HalfInt::ONE,
                HalfInt::from_doubled(two_mm),
            )?;
            if cg == 0.0 {
                continue;
            }
            z += cg * bj.amp(two_m) * tl.amp(two_n);
        }
        total += z.norm_sqr();
    }
    let w = ((two_j.doubled() as f64 + 1.0) * (two_l.doubled() as f64 + 1.0)).sqrt();
    Ok(w / 3.0 * total)
}

/// Quadratic form c^dagger M c of reduced weights; real by symmetry.
pub fn avg_t_reduced(c: &ReducedWeights, m: &TridiagSym) -> Result<f64> {
    if c.c.len() != m.dim() {
        return Err(CoreError::DimensionMismatch(format!(
            "{} weights for a {}-dim matrix",
            c.c.len(),
            m.dim()
        )));
    }
    let mut s = 0.0;
    for i in 0..m.dim() {
        s += m.diag[i] * c.c[i].norm_sqr();
        if i + 1 < m.dim() {
            s += 2.0 * m.off[i] * (c.c[i].conj() * c.c[i + 1]).re;
        }
    }
    Ok(s)
}

/// The saturating matrix for the standard ladder of `n_spins` spins:
/// diag(j) = j/(j+1), off(j, j+1) = sqrt((2j+1)/(2j+3)). Closed forms
/// only, so it scales to very large N.
pub fn build_m_op(n_spins: u32) -> TridiagSym {
    build_m_op_ladder(HalfInt::from_doubled(n_spins as i32))
}

/// Same matrix on the ladder ending at an arbitrary top spin (used to
/// probe the alternative reading of published table entries).
pub fn build_m_op_ladder(two_j_top: HalfInt) -> TridiagSym {
    let top = two_j_top.doubled().max(0);
    let js = (top % 2..=top).step_by(2).collect::<Vec<_>>();
    let diag: Vec<f64> = js
        .iter()
        .map(|&tj| {
            let j = tj as f64 / 2.0;
            j / (j + 1.0)
        })
        .collect();
    let off: Vec<f64> = js
        .iter()
        .take(js.len().saturating_sub(1))
        .map(|&tj| {
            let tjf = tj as f64;
            ((tjf + 1.0) / (tjf + 3.0)).sqrt()
        })
        .collect();
    TridiagSym::new(diag, off).expect("ladder matrix is well-formed")
}

/// Optimal protocol: Perron eigenpair of the saturating matrix.
pub fn optimal_protocol(n_spins: u32) -> Result<ProtocolSolution> {
    let m = build_m_op(n_spins);
    let (lambda_op, vec) = max_eigen(&m)?;
    let weights = ReducedWeights::new(
        vec.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
    )?;
    Ok(ProtocolSolution {
        n_spins,
        lambda_op,
        weights,
        avg_h: 6.0 - 2.0 * lambda_op,
    })
}

/// Optimal signal state: amplitude C^j on |j, j> in every ladder block.
pub fn optimal_signal_state(sol: &ProtocolSolution) -> SignalState {
    let blocks = ladder(sol.n_spins)
        .into_iter()
        .zip(&sol.weights.c)
        .map(|(two_j, w)| {
            let mut blk = IrrepBlock::highest_weight(two_j);
            *blk.amps.last_mut().expect("nonempty") = *w;
            blk
        })
        .collect();
    SignalState::new(blocks).expect("Perron weights are normalized")
}

/// Certified bracket for lambda_op: the upper bound is the largest row
/// sum; the lower bound is the best Rayleigh quotient of the trial family
/// C^j ~ sqrt(2j-1) (N/2 - j) j^p, scanned around p* = (3N/4)^(1/3).
pub fn bounds(n_spins: u32) -> Result<(f64, f64)> {
    if n_spins < 2 {
        return Err(CoreError::InvalidArgument("bounds need n_spins >= 2".into()));
    }
    let m = build_m_op(n_spins);
    let upper = m
        .row_sums()
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);

    let js: Vec<f64> = ladder(n_spins).iter().map(|j| j.as_f64()).collect();
    let half_n = n_spins as f64 / 2.0;
    let rayleigh = |p: f64| -> f64 {
        let mut v: Vec<f64> = js
            .iter()
            .map(|&j| {
                if j >= 1.0 {
                    (2.0 * j - 1.0).sqrt() * (half_n - j) * j.powf(p)
                } else {
                    0.0
                }
            })
            .collect();
        let norm2: f64 = v.iter().map(|x| x * x).sum();
        if norm2 <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let n = norm2.sqrt();
        for x in &mut v {
            *x /= n;
        }
        m.quad_form(&v)
    };

    let p_star = (3.0 * n_spins as f64 / 4.0).cbrt();
    let (mut lo, mut hi) = (0.25 * p_star, 4.0 * p_star);
    // coarse scan, then golden-section refinement on the best cell
    let coarse = 24;
    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=coarse {
        let p = lo + (hi - lo) * i as f64 / coarse as f64;
        let v = rayleigh(p);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    if best > f64::NEG_INFINITY {
        let cell = (hi - lo) / coarse as f64;
        lo = (lo + cell * (best_i as f64 - 1.0)).max(lo);
        hi = (lo + 2.0 * cell).min(hi);
        const INV_PHI: f64 = 0.618_033_988_749_894_9;
        let mut a = lo;
        let mut b = hi;
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let mut fc = rayleigh(c);
        let mut fd = rayleigh(d);
        for _ in 0..60 {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                fc = rayleigh(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                fd = rayleigh(d);
            }
        }
        best = best.max(fc).max(fd);
    } else {
        // trial family degenerates (N = 2); any normalized vector bounds
        // lambda from below, use the flat one
        let dim = js.len() as f64;
        let v: Vec<f64> = js.iter().map(|_| 1.0 / dim.sqrt()).collect();
        best = m.quad_form(&v);
    }
    Ok((best, upper))
}

/// Least-squares fit of 3 - lambda_op(N) against a/N + b/N^(4/3) over the
/// given spin counts; returns (a, b).
pub fn asymptotic_fit(n_list: &[u32]) -> Result<(f64, f64)> {
    if n_list.len() < 4 {
        return Err(CoreError::InvalidArgument("fit needs at least 4 points".into()));
    }
    if n_list.iter().any(|&n| n < 100) {
        return Err(CoreError::InvalidArgument("fit needs all N >= 100".into()));
    }
    let (mut s11, mut s12, mut s22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &n in n_list {
        let y = 3.0 - optimal_protocol(n)?.lambda_op;
        let x1 = 1.0 / n as f64;
        let x2 = (n as f64).powf(-4.0 / 3.0);
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        r1 += x1 * y;
        r2 += x2 * y;
    }
    let det = s11 * s22 - s12 * s12;
    if det.abs() <= 1e-30 * s11 * s22 {
        return Err(CoreError::Eigensolver("singular fit normal equations".into()));
    }
    let a = (s22 * r1 - s12 * r2) / det;
    let b = (s11 * r2 - s12 * r1) / det;
    Ok((a, b))
}
