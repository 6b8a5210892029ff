//! Self-verification: every documented invariant of the crate, grouped
//! and runnable as one suite. The CLI exposes this as `verify`; the
//! option flags deliberately corrupt single ingredients so tests can
//! confirm the right group trips.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::euler::{compose, haar_sample, EulerAngles};
use crate::fidelity::{
    avg_t_general, build_m_b, build_m_op, m_b_entry, m_tensor, optimal_protocol,
    optimal_signal_state,
};
use crate::halfint::HalfInt;
use crate::povm::{
    build_finite_povm, build_isotropic_set, check_completeness, check_discrete_orthogonality,
    minimal_povm_n2,
};
use crate::quadrature::build_grid;
use crate::sim::{avg_t_quadrature, outcome_probs, simulate};
use crate::states::{ladder, IrrepBlock, ReferenceState, SignalState};
use crate::tridiag::max_eigen;
use crate::wigner::{clebsch_gordan, trace_rep1, wigner_big_d};

/// Fault-injection hooks for testing the suite itself.
#[derive(Clone, Copy, Debug, Default)]
pub struct VerifyOptions {
    /// Flip coupling-coefficient signs on the stretched output block for
    /// negative first labels. A separable sign flip would cancel in the
    /// bilinear orthogonality sums; this one pairs m1 with J and cannot.
    pub corrupt_cg_sign: bool,
    /// Undersize the angular rule of the orthogonality grid by one.
    pub undersize_grid: bool,
}

#[derive(Clone, Debug)]
pub struct GroupReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl GroupReport {
    fn from_worst(name: &'static str, worst: f64, tol: f64) -> Self {
        GroupReport {
            name,
            passed: worst <= tol,
            detail: format!("max deviation {worst:.3e} (tolerance {tol:.0e})"),
        }
    }
}

/// Run every invariant group; the report order is stable.
pub fn run_all(opts: &VerifyOptions) -> Vec<GroupReport> {
    vec![
        convention_lock(),
        homomorphism(),
        unitarity(),
        cg_orthogonality(opts),
        quadrature_exactness(opts),
        entry_domination(),
        eigenvalue_domination(),
        oracle_equivalence(),
        form_equivalence(),
        protocol_monotonicity(),
        perron_positivity(),
        povm_completeness(),
        povm_weights(),
        isotropy_sharpness(),
        minimal_certification(),
        sim_probability(),
        sim_estimator(),
        sim_determinism(),
        score_range(),
    ]
}

pub fn all_passed(reports: &[GroupReport]) -> bool {
    reports.iter().all(|r| r.passed)
}

/// Just the representation-kernel groups (convention lock, homomorphism,
/// unitarity, coupling orthogonality, quadrature exactness).
pub fn run_kernel_suite(opts: &VerifyOptions) -> Vec<GroupReport> {
    vec![
        convention_lock(),
        homomorphism(),
        unitarity(),
        cg_orthogonality(opts),
        quadrature_exactness(opts),
    ]
}

fn convention_lock() -> GroupReport {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let g = haar_sample(&mut rng);
        let tr: Complex64 = (-2..=2i32)
            .step_by(2)
            .map(|tm| {
                wigner_big_d(HalfInt::ONE, HalfInt::from_doubled(tm), HalfInt::from_doubled(tm), &g)
                    .expect("valid labels")
            })
            .sum();
        worst = worst.max((tr - trace_rep1(&g)).norm());
    }
    GroupReport::from_worst("su2.convention_lock", worst, 1e-12)
}

fn homomorphism() -> GroupReport {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut worst: f64 = 0.0;
    for tj in [1i32, 2, 3, 4, 5] {
        for _ in 0..20 {
            let g1 = haar_sample(&mut rng);
            let g2 = haar_sample(&mut rng);
            let g12 = compose(&g1, &g2);
            let dim = (tj + 1) as usize;
            let d = |g: &EulerAngles| -> Vec<Complex64> {
                let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
                for (r, tmp) in (-tj..=tj).step_by(2).enumerate() {
                    for (c, tm) in (-tj..=tj).step_by(2).enumerate() {
                        m[r * dim + c] = wigner_big_d(
                            HalfInt::from_doubled(tj),
                            HalfInt::from_doubled(tmp),
                            HalfInt::from_doubled(tm),
                            g,
                        )
                        .expect("valid labels");
                    }
                }
                m
            };
            let (m1, m2, m12) = (d(&g1), d(&g2), d(&g12));
            // canonical angles name rotations, not cover elements, so the
            // half-integer blocks carry the composite only up to the
            // double-cover sign; integer blocks must match exactly
            let mut dev_plus: f64 = 0.0;
            let mut dev_minus: f64 = 0.0;
            for r in 0..dim {
                for c in 0..dim {
                    let mut prod = Complex64::new(0.0, 0.0);
                    for k in 0..dim {
                        prod += m1[r * dim + k] * m2[k * dim + c];
                    }
                    dev_plus = dev_plus.max((prod - m12[r * dim + c]).norm());
                    dev_minus = dev_minus.max((prod + m12[r * dim + c]).norm());
                }
            }
            let dev = if tj % 2 == 0 { dev_plus } else { dev_plus.min(dev_minus) };
            worst = worst.max(dev);
        }
    }
    GroupReport::from_worst("su2.homomorphism", worst, 1e-11)
}

fn unitarity() -> GroupReport {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut worst: f64 = 0.0;
    for tj in [1i32, 2, 3, 4, 5] {
        for _ in 0..10 {
            let g = haar_sample(&mut rng);
            let dim = (tj + 1) as usize;
            let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
            for (r, tmp) in (-tj..=tj).step_by(2).enumerate() {
                for (c, tm) in (-tj..=tj).step_by(2).enumerate() {
                    m[r * dim + c] = wigner_big_d(
                        HalfInt::from_doubled(tj),
                        HalfInt::from_doubled(tmp),
                        HalfInt::from_doubled(tm),
                        &g,
                    )
                    .expect("valid labels");
                }
            }
            for r in 0..dim {
                for c in 0..dim {
                    let mut prod = Complex64::new(0.0, 0.0);
                    for k in 0..dim {
                        prod += m[r * dim + k] * m[c * dim + k].conj();
                    }
                    let expect = if r == c { 1.0 } else { 0.0 };
                    worst = worst.max((prod - expect).norm());
                }
            }
        }
    }
    GroupReport::from_worst("su2.unitarity", worst, 1e-12)
}

fn cg_orthogonality(opts: &VerifyOptions) -> GroupReport {
    let cg = |tj1: i32, tm1: i32, tj2: i32, tm2: i32, tjj: i32, tmm: i32| -> f64 {
        let v = clebsch_gordan(
            HalfInt::from_doubled(tj1),
            HalfInt::from_doubled(tm1),
            HalfInt::from_doubled(tj2),
            HalfInt::from_doubled(tm2),
            HalfInt::from_doubled(tjj),
            HalfInt::from_doubled(tmm),
        )
        .expect("valid labels");
        if opts.corrupt_cg_sign && tm1 < 0 && tjj == tj1 + tj2 {
            -v
        } else {
            v
        }
    };
    let mut worst: f64 = 0.0;
    for tj1 in 0..=6i32 {
        for tj2 in 0..=6i32 {
            let lo = (tj1 - tj2).abs();
            let hi = tj1 + tj2;
            for tjj in (lo..=hi).step_by(2) {
                for tjjp in (lo..=hi).step_by(2) {
                    for tmm in (-tjj..=tjj).step_by(2) {
                        for tmmp in (-tjjp..=tjjp).step_by(2) {
                            let mut s = 0.0;
                            for tm1 in (-tj1..=tj1).step_by(2) {
                                let tm2 = tmm - tm1;
                                let tm2p = tmmp - tm1;
                                if tm2.abs() > tj2 || tm2p != tm2 {
                                    continue;
                                }
                                s += cg(tj1, tm1, tj2, tm2, tjj, tmm)
                                    * cg(tj1, tm1, tj2, tm2, tjjp, tmmp);
                            }
                            let expect = if tjj == tjjp && tmm == tmmp { 1.0 } else { 0.0 };
                            worst = worst.max((s - expect).abs());
                        }
                    }
                }
            }
        }
    }
    GroupReport::from_worst("su2.cg_orthogonality", worst, 1e-12)
}

fn quadrature_exactness(opts: &VerifyOptions) -> GroupReport {
    let shrink = if opts.undersize_grid { 1 } else { 0 };
    let grid = match build_grid(2, shrink) {
        Ok(g) => g,
        Err(e) => {
            return GroupReport {
                name: "su2.quadrature_exactness",
                passed: false,
                detail: format!("grid construction failed: {e}"),
            }
        }
    };
    let mut worst: f64 = (grid.total_weight() - 1.0).abs();
    worst = worst.max(grid.integrate(trace_rep1).abs());
    for tj in [0i32, 1, 2] {
        for tjp in [0i32, 1, 2] {
            if (tj - tjp) % 2 != 0 {
                continue;
            }
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
                                .expect("valid");
                                let b = wigner_big_d(
                                    HalfInt::from_doubled(tjp),
                                    HalfInt::from_doubled(tmmp),
                                    HalfInt::from_doubled(tmp),
                                    g,
                                )
                                .expect("valid");
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
    GroupReport::from_worst("su2.quadrature_exactness", worst, 1e-13)
}

pub fn random_reference(n_spins: u32, rng: &mut ChaCha8Rng) -> ReferenceState {
    let blocks = ladder(n_spins)
        .into_iter()
        .map(|two_j| {
            let amps = (0..two_j.dim())
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            IrrepBlock::new(two_j, amps).expect("sized amps").normalized()
        })
        .collect();
    ReferenceState::new(blocks).expect("normalized blocks")
}

pub fn random_signal(n_spins: u32, rng: &mut ChaCha8Rng) -> SignalState {
    let mut blocks: Vec<IrrepBlock> = ladder(n_spins)
        .into_iter()
        .map(|two_j| {
            let amps = (0..two_j.dim())
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            IrrepBlock::new(two_j, amps).expect("sized amps")
        })
        .collect();
    let norm: f64 = blocks.iter().map(|b| b.norm_sq()).sum::<f64>().sqrt();
    for b in &mut blocks {
        for a in &mut b.amps {
            *a /= norm;
        }
    }
    SignalState::new(blocks).expect("normalized")
}

fn entry_domination() -> GroupReport {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut worst: f64 = 0.0;
    for n in [2u32, 3, 4, 6] {
        let mo = build_m_op(n);
        for _ in 0..200 {
            let b = random_reference(n, &mut rng);
            let mb = build_m_b(&b).expect("ladder states");
            for i in 0..mb.dim() {
                worst = worst.max(mb.diag[i].abs() - mo.diag[i]);
                if i + 1 < mb.dim() {
                    worst = worst.max(mb.off[i].abs() - mo.off[i]);
                }
            }
        }
    }
    GroupReport::from_worst("fidelity.entry_domination", worst.max(0.0), 1e-10)
}

fn eigenvalue_domination() -> GroupReport {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let mut worst: f64 = 0.0;
    for n in [2u32, 3, 4, 6] {
        let lam_op = optimal_protocol(n).expect("solvable").lambda_op;
        for _ in 0..200 {
            let b = random_reference(n, &mut rng);
            let mb = build_m_b(&b).expect("ladder states");
            let (lam, _) = max_eigen(&mb).expect("solvable");
            worst = worst.max(lam - lam_op);
        }
    }
    GroupReport::from_worst("fidelity.eigen_domination", worst.max(0.0), 1e-10)
}

fn oracle_equivalence() -> GroupReport {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let mut worst: f64 = 0.0;
    for n in 1..=4u32 {
        for _ in 0..50 {
            let b = random_reference(n, &mut rng);
            let a = random_signal(n, &mut rng);
            let t1 = avg_t_general(&a, &b).expect("same ladder");
            let t2 = avg_t_quadrature(&a, &b).expect("same ladder");
            worst = worst.max((t1 - t2).abs());
        }
    }
    GroupReport::from_worst("fidelity.oracle_equivalence", worst, 1e-10)
}

/// The time-reversal projector route and the coupling-kernel contraction
/// must produce identical reduced matrices.
fn form_equivalence() -> GroupReport {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let mut worst: f64 = 0.0;
    for n in 1..=4u32 {
        for _ in 0..25 {
            let b = random_reference(n, &mut rng);
            let blocks = b.blocks();
            for i in 0..blocks.len() {
                for k in i..blocks.len() {
                    if k - i > 1 {
                        continue;
                    }
                    let via_p1 = m_b_entry(&blocks[i], &blocks[k]).expect("entry");
                    // contraction of the kernel with four reference factors
                    let (bj, bl) = (&blocks[i], &blocks[k]);
                    let mut s = Complex64::new(0.0, 0.0);
                    for two_m in bj.two_j.magnetic_range() {
                        for two_n in bl.two_j.magnetic_range() {
                            for two_mp in bj.two_j.magnetic_range() {
                                let two_np = two_mp + (two_n - two_m);
                                if two_np.doubled().abs() > bl.two_j.doubled() {
                                    continue;
                                }
                                let kern = m_tensor(
                                    bl.two_j, bj.two_j, two_n, two_m, two_np, two_mp,
                                )
                                .expect("labels");
                                if kern == 0.0 {
                                    continue;
                                }
                                s += bl.amp(two_n).conj()
                                    * bj.amp(two_m)
                                    * bl.amp(two_np)
                                    * bj.amp(two_mp).conj()
                                    * kern;
                            }
                        }
                    }
                    worst = worst.max((s.re - via_p1).abs()).max(s.im.abs());
                }
            }
        }
    }
    GroupReport::from_worst("fidelity.form_equivalence", worst, 1e-11)
}

fn protocol_monotonicity() -> GroupReport {
    let mut prev = -1.0;
    let mut ok = true;
    let mut detail = String::new();
    for n in 1..=60u32 {
        let sol = optimal_protocol(n).expect("solvable");
        if sol.lambda_op < prev - 1e-12 || sol.lambda_op >= 3.0 {
            ok = false;
            detail = format!("lambda({n}) = {} after {prev}", sol.lambda_op);
            break;
        }
        if !(sol.avg_h > 0.0 && sol.avg_h <= 6.0) {
            ok = false;
            detail = format!("avg_h({n}) = {}", sol.avg_h);
            break;
        }
        prev = sol.lambda_op;
    }
    GroupReport {
        name: "fidelity.protocol_monotone",
        passed: ok,
        detail: if ok {
            format!("lambda nondecreasing over N = 1..60, final {prev:.6}")
        } else {
            detail
        },
    }
}

fn perron_positivity() -> GroupReport {
    let mut min_entry = f64::MAX;
    for n in (1..=200u32).filter(|n| *n <= 30 || n % 10 == 0) {
        let sol = optimal_protocol(n).expect("solvable");
        for c in &sol.weights.c {
            min_entry = min_entry.min(c.re);
        }
    }
    GroupReport {
        name: "fidelity.perron_positive",
        passed: min_entry > 0.0,
        detail: format!("smallest weight {min_entry:.3e}"),
    }
}

fn povm_completeness() -> GroupReport {
    let mut worst: f64 = 0.0;
    let rep = check_completeness(&minimal_povm_n2());
    worst = worst.max(rep.residual_norm);
    for n in [2u32, 4, 6, 8] {
        let p = build_finite_povm(n, ReferenceState::b_op(n)).expect("recipe");
        worst = worst.max(check_completeness(&p).residual_norm);
    }
    GroupReport::from_worst("povm.completeness", worst, 1e-10)
}

fn povm_weights() -> GroupReport {
    let mut worst: f64 = 0.0;
    let mut positive = true;
    for n in [0u32, 2, 3, 4, 8] {
        let set = build_isotropic_set(n).expect("rule");
        positive &= set.iter().all(|&(_, w)| w > 0.0);
        let mass: f64 = set.iter().map(|&(_, w)| w).sum();
        worst = worst.max((mass - 1.0).abs());
    }
    GroupReport {
        name: "povm.weights",
        passed: positive && worst <= 1e-12,
        detail: format!("mass deviation {worst:.3e}, positivity {positive}"),
    }
}

fn isotropy_sharpness() -> GroupReport {
    let mut min_violation = f64::MAX;
    for n in [2u32, 4] {
        let set = build_isotropic_set(n).expect("rule");
        let v = check_discrete_orthogonality(&set, HalfInt::from_doubled(n as i32 + 2))
            .expect("check");
        min_violation = min_violation.min(v);
    }
    GroupReport {
        name: "povm.sharpness",
        passed: min_violation > 1e-6,
        detail: format!("violation one spin past design: {min_violation:.3e}"),
    }
}

fn minimal_certification() -> GroupReport {
    let rep = check_completeness(&minimal_povm_n2());
    GroupReport {
        name: "povm.minimal_certified",
        passed: rep.residual_norm < 1e-12 && rep.is_projective && rep.pairwise_residual < 1e-12,
        detail: format!(
            "completeness {:.3e}, projectivity {:.3e}",
            rep.residual_norm, rep.pairwise_residual
        ),
    }
}

fn sim_probability() -> GroupReport {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let p = minimal_povm_n2();
    let a = optimal_signal_state(&optimal_protocol(2).expect("solvable"));
    let p4 = build_finite_povm(4, ReferenceState::b_op(4)).expect("recipe");
    let a4 = optimal_signal_state(&optimal_protocol(4).expect("solvable"));
    let mut worst: f64 = 0.0;
    let mut neg: f64 = 0.0;
    for _ in 0..200 {
        let g = haar_sample(&mut rng);
        for (povm, sig) in [(&p, &a), (&p4, &a4)] {
            let probs = outcome_probs(povm, sig, &g).expect("same ladder");
            let total: f64 = probs.iter().sum();
            worst = worst.max((total - 1.0).abs());
            neg = neg.min(probs.iter().cloned().fold(0.0, f64::min));
        }
    }
    GroupReport {
        name: "sim.probability",
        passed: worst <= 1e-10 && neg >= -1e-14,
        detail: format!("sum deviation {worst:.3e}, most negative entry {neg:.3e}"),
    }
}

fn sim_estimator() -> GroupReport {
    let p = minimal_povm_n2();
    let sol = optimal_protocol(2).expect("solvable");
    let a = optimal_signal_state(&sol);
    let mut hits = 0;
    let seeds = 100;
    for s in 0..seeds {
        let r = simulate(&p, &a, 20_000, 1000 + s).expect("complete POVM");
        if (r.t_mean - sol.lambda_op).abs() <= 4.0 * r.std_err {
            hits += 1;
        }
    }
    GroupReport {
        name: "sim.estimator",
        passed: hits >= 95,
        detail: format!("{hits}/{seeds} seeds within 4 standard errors"),
    }
}

fn sim_determinism() -> GroupReport {
    let p = minimal_povm_n2();
    let a = optimal_signal_state(&optimal_protocol(2).expect("solvable"));
    let r1 = simulate(&p, &a, 70_000, 3).expect("complete POVM");
    let r2 = simulate(&p, &a, 70_000, 3).expect("complete POVM");
    GroupReport {
        name: "sim.determinism",
        passed: r1 == r2,
        detail: format!("t_mean {} repeated {}", r1.t_mean, r2.t_mean),
    }
}

fn score_range() -> GroupReport {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let mut lo = f64::MAX;
    let mut hi = f64::MIN;
    for _ in 0..100_000 {
        let t = trace_rep1(&haar_sample(&mut rng));
        lo = lo.min(t);
        hi = hi.max(t);
    }
    let mut h_ok = true;
    for _ in 0..10_000 {
        let h = crate::sim::error_h(&haar_sample(&mut rng), &haar_sample(&mut rng));
        if !(-1e-12..=8.0 + 1e-12).contains(&h) {
            h_ok = false;
            break;
        }
    }
    GroupReport {
        name: "sim.score_range",
        passed: (-1.0 - 1e-12..=3.0 + 1e-12).contains(&lo)
            && (-1.0 - 1e-12..=3.0 + 1e-12).contains(&hi)
            && h_ok,
        detail: format!("t in [{lo:.4}, {hi:.4}], h within [0, 8]: {h_ok}"),
    }
}
