//! Signal and reference states as complex amplitude blocks, one per
//! irreducible spin block.
//!
//! The two state families carry different normalizations: a reference
//! state is unit-norm within every block (the sqrt(2j+1) weights are
//! applied by the operations that need them), while a signal state is
//! unit-norm globally.

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::euler::EulerAngles;
use crate::halfint::HalfInt;
use crate::wigner::small_d_matrix;

/// Spin ladder of the N-spin problem: j = N/2, N/2 - 1, ... down to 0
/// (even N) or 1/2 (odd N), returned ascending.
pub fn ladder(n_spins: u32) -> Vec<HalfInt> {
    let n = n_spins as i32;
    (n % 2..=n).step_by(2).map(HalfInt::from_doubled).collect()
}

/// Complex amplitudes of one spin-j block, indexed by ascending m
/// (amps[i] belongs to two_m = -two_j + 2 i).
#[derive(Clone, Debug, PartialEq)]
pub struct IrrepBlock {
    pub two_j: HalfInt,
    pub amps: Vec<Complex64>,
}

impl IrrepBlock {
    pub fn new(two_j: HalfInt, amps: Vec<Complex64>) -> Result<Self> {
        if two_j.is_negative() || amps.len() != two_j.dim() {
            return Err(CoreError::DimensionMismatch(format!(
                "block j = {two_j} needs {} amplitudes, got {}",
                two_j.dim(),
                amps.len()
            )));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(CoreError::InvalidArgument("non-finite amplitude".into()));
        }
        Ok(IrrepBlock { two_j, amps })
    }

    /// Highest-weight block |j, j>.
    pub fn highest_weight(two_j: HalfInt) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); two_j.dim()];
        *amps.last_mut().expect("dim >= 1") = Complex64::new(1.0, 0.0);
        IrrepBlock { two_j, amps }
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm_sq().sqrt();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
        self
    }

    /// Amplitude at magnetic label m.
    pub fn amp(&self, two_m: HalfInt) -> Complex64 {
        let i = (two_m.doubled() + self.two_j.doubled()) / 2;
        self.amps[i as usize]
    }

    /// Components of U^j(g) |block>.
    pub fn rotated(&self, g: &EulerAngles) -> Vec<Complex64> {
        let tj = self.two_j.doubled();
        let dim = self.two_j.dim();
        let d = small_d_matrix(tj, g.beta);
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for (r, tmp) in (-tj..=tj).step_by(2).enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, tm) in (-tj..=tj).step_by(2).enumerate() {
                let phase = Complex64::from_polar(1.0, -(tm as f64 / 2.0) * g.gamma);
                acc += d[r * dim + c] * phase * self.amps[c];
            }
            out[r] = acc * Complex64::from_polar(1.0, -(tmp as f64 / 2.0) * g.alpha);
        }
        out
    }
}

/// Bob's reference state: one block per ladder entry, each block unit norm.
#[derive(Clone, Debug)]
pub struct ReferenceState {
    blocks: Vec<IrrepBlock>,
}

impl ReferenceState {
    /// Blocks must be ascending in j with no repeats, each unit norm.
    pub fn new(blocks: Vec<IrrepBlock>) -> Result<Self> {
        check_ascending(&blocks)?;
        for b in &blocks {
            if (b.norm_sq() - 1.0).abs() > 1e-8 {
                return Err(CoreError::InvalidArgument(format!(
                    "reference block j = {} has norm^2 = {}",
                    b.two_j,
                    b.norm_sq()
                )));
            }
        }
        Ok(ReferenceState { blocks })
    }

    /// The optimal reference: |j, j> in every ladder block.
    pub fn b_op(n_spins: u32) -> Self {
        ReferenceState {
            blocks: ladder(n_spins).into_iter().map(IrrepBlock::highest_weight).collect(),
        }
    }

    /// A reference living in a single spin block (top spin only).
    pub fn single_irrep(block: IrrepBlock) -> Result<Self> {
        ReferenceState::new(vec![block])
    }

    pub fn blocks(&self) -> &[IrrepBlock] {
        &self.blocks
    }

    pub fn ladder(&self) -> Vec<HalfInt> {
        self.blocks.iter().map(|b| b.two_j).collect()
    }

    /// Total dimension of the direct-sum space the state lives in.
    pub fn dimension(&self) -> usize {
        self.blocks.iter().map(|b| b.two_j.dim()).sum()
    }
}

/// Alice's signal state: one block per ladder entry, unit norm globally.
#[derive(Clone, Debug)]
pub struct SignalState {
    blocks: Vec<IrrepBlock>,
}

impl SignalState {
    pub fn new(blocks: Vec<IrrepBlock>) -> Result<Self> {
        check_ascending(&blocks)?;
        let total: f64 = blocks.iter().map(|b| b.norm_sq()).sum();
        if (total - 1.0).abs() > 1e-8 {
            return Err(CoreError::InvalidArgument(format!(
                "signal state has norm^2 = {total}"
            )));
        }
        Ok(SignalState { blocks })
    }

    /// Assemble A^j_m = C^j B^j_m from reduced weights and a reference.
    pub fn from_weights(c: &ReducedWeights, b: &ReferenceState) -> Result<Self> {
        if c.c.len() != b.blocks.len() {
            return Err(CoreError::DimensionMismatch(format!(
                "{} weights for {} blocks",
                c.c.len(),
                b.blocks.len()
            )));
        }
        let blocks = b
            .blocks
            .iter()
            .zip(&c.c)
            .map(|(blk, w)| IrrepBlock {
                two_j: blk.two_j,
                amps: blk.amps.iter().map(|a| a * w).collect(),
            })
            .collect();
        SignalState::new(blocks)
    }

    pub fn blocks(&self) -> &[IrrepBlock] {
        &self.blocks
    }

    pub fn ladder(&self) -> Vec<HalfInt> {
        self.blocks.iter().map(|b| b.two_j).collect()
    }
}

/// Reduced weights C^j coupling the signal to the reference blockwise;
/// sum of |C^j|^2 is 1.
#[derive(Clone, Debug)]
pub struct ReducedWeights {
    pub c: Vec<Complex64>,
}

impl ReducedWeights {
    pub fn new(c: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = c.iter().map(|w| w.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(CoreError::InvalidArgument(format!(
                "reduced weights have norm^2 = {norm}"
            )));
        }
        Ok(ReducedWeights { c })
    }

    pub fn from_real(c: &[f64]) -> Result<Self> {
        ReducedWeights::new(c.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }
}

fn check_ascending(blocks: &[IrrepBlock]) -> Result<()> {
    if blocks.is_empty() {
        return Err(CoreError::InvalidArgument("state needs at least one block".into()));
    }
    for w in blocks.windows(2) {
        if w[1].two_j <= w[0].two_j {
            return Err(CoreError::InvalidArgument(
                "blocks must be strictly ascending in j".into(),
            ));
        }
    }
    Ok(())
}

/// Time reversal of a block: component m of the output is
/// (-1)^(j - m) conj(input at -m). The exponent j - m is an integer for
/// every valid label, so the phase stays real for half-integer spins too.
pub fn time_reverse(b: &IrrepBlock) -> IrrepBlock {
    let tj = b.two_j.doubled();
    let dim = b.two_j.dim();
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    for (i, a) in amps.iter_mut().enumerate() {
        // output index i has two_m = -tj + 2i; input index holds -m
        let j_minus_m = tj - i as i32;
        let sign = if j_minus_m % 2 == 0 { 1.0 } else { -1.0 };
        *a = sign * b.amps[dim - 1 - i].conj();
    }
    IrrepBlock { two_j: b.two_j, amps }
}
