//! Acceptance suite: one test per shipping criterion, each printing a
//! single pass/fail line with the measured values. Tolerances are pinned
//! here, not configurable.
//!
//! Criteria 3 (scaling window at N = 2000) and 4 (the published N^{-4/3}
//! fit coefficient) assert literature-quoted targets that the computed
//! spectrum does not attain; they are kept as stated and fail honestly,
//! printing the computed values. See README.

use std::time::Instant;

use trihedron_core::sim::GuessStrategy;
use trihedron_core::verify::{self, VerifyOptions};
use trihedron_core::*;

struct Criterion {
    id: u32,
    limit_s: f64,
    start: Instant,
}

impl Criterion {
    fn with_limit(id: u32, limit_s: f64) -> Self {
        Criterion { id, limit_s, start: Instant::now() }
    }

    fn finish(self, passed: bool, detail: String) {
        let elapsed = self.start.elapsed().as_secs_f64();
        let time_ok = elapsed < self.limit_s;
        let verdict = if passed && time_ok { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2}: {verdict} — {detail} ({elapsed:.2} s, limit {} s)",
            self.id, self.limit_s
        );
        assert!(
            passed && time_ok,
            "criterion {} failed: {detail} (elapsed {elapsed:.2} s)",
            self.id
        );
    }
}

#[test]
fn criterion_01_exact_table_entries() {
    let c = Criterion::with_limit(1, 1.0);
    let lam2 = optimal_protocol(2).unwrap().lambda_op;
    let lam3 = optimal_protocol(3).unwrap().lambda_op;
    let lam5 = optimal_protocol(5).unwrap().lambda_op;
    let exact2 = (3.0 + 57f64.sqrt()) / 12.0;
    let exact3 = (14.0 + 466f64.sqrt()) / 30.0;
    let ok2 = ((lam2 - exact2) / exact2).abs() <= 1e-12;
    let ok3 = ((lam3 - exact3) / exact3).abs() <= 1e-12;
    let ok5 = (lam5 - 1.6708).abs() <= 5e-5;
    c.finish(
        ok2 && ok3 && ok5,
        format!("lambda(2)={lam2:.15} lambda(3)={lam3:.15} lambda(5)={lam5:.6}"),
    );
}

#[test]
fn criterion_02_table_discrepancy_documented() {
    let c = Criterion::with_limit(2, 5.0);
    let lam_half_10 = optimal_protocol(10).unwrap().lambda_op;
    let row_bound = build_m_op(10)
        .row_sums()
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let below_bound = lam_half_10 <= 2.5864 + 1e-4 && lam_half_10 <= row_bound;
    let differs_from_published = (lam_half_10 - 2.6202).abs() > 0.05;
    let mut alt_ok = true;
    let mut alts = String::new();
    for (n, published) in [(10u32, 2.6202), (50, 2.9362), (100, 2.9707)] {
        let (lam_full, _) = max_eigen(&build_m_op_ladder(HalfInt::from_int(n as i32))).unwrap();
        alt_ok &= (lam_full - published).abs() <= 0.02;
        alts.push_str(&format!(" top-N({n})={lam_full:.7} vs {published};"));
    }
    c.finish(
        below_bound && differs_from_published && alt_ok,
        format!(
            "lambda_half(10)={lam_half_10:.7} <= row bound {row_bound:.4};{alts}"
        ),
    );
}

#[test]
fn criterion_03_bounds_sandwich_and_scaling_window() {
    let c = Criterion::with_limit(3, 30.0);
    let mut sandwich_ok = true;
    let mut worst = String::new();
    let mut lam_2000 = 0.0;
    for n in (2..=2000u32).step_by(2) {
        let lam = optimal_protocol(n).unwrap().lambda_op;
        let (lo, up) = bounds(n).unwrap();
        if !(lo <= lam + 1e-12 && lam <= up + 1e-12) {
            sandwich_ok = false;
            worst = format!("N={n}: {lo} <= {lam} <= {up} violated");
            break;
        }
        if n == 2000 {
            lam_2000 = lam;
        }
    }
    let deficit = 2000.0 * (3.0 - lam_2000);
    let window_ok = (4.0..=4.6).contains(&deficit);
    c.finish(
        sandwich_ok && window_ok,
        format!(
            "sandwich all even N<=2000: {sandwich_ok} {worst}; N(3-lambda) at 2000 = {deficit:.4} (required window [4.0, 4.6])"
        ),
    );
}

#[test]
fn criterion_04_asymptotic_fit_coefficients() {
    let c = Criterion::with_limit(4, 60.0);
    let (a, b) = asymptotic_fit(&[200, 400, 800, 1600, 3200]).unwrap();
    let a_ok = (a - 4.0).abs() <= 0.2;
    let b_ok = (b - 9.4).abs() <= 1.5;
    c.finish(
        a_ok && b_ok,
        format!("a = {a:.4} (required 4 +/- 0.2), b = {b:.4} (required 9.4 +/- 1.5)"),
    );
}

#[test]
fn criterion_05_oracle_equivalence() {
    let c = Criterion::with_limit(5, 30.0);
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(501);
    let mut worst: f64 = 0.0;
    for n in 1..=4u32 {
        for _ in 0..50 {
            let b = verify::random_reference(n, &mut rng);
            let a = verify::random_signal(n, &mut rng);
            let t_alg = avg_t_general(&a, &b).unwrap();
            let t_quad = avg_t_quadrature(&a, &b).unwrap();
            worst = worst.max((t_alg - t_quad).abs());
        }
    }
    c.finish(worst <= 1e-10, format!("max |general - quadrature| = {worst:.3e}"));
}

#[test]
fn criterion_06_entry_and_eigenvalue_domination() {
    let c = Criterion::with_limit(6, 60.0);
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(601);
    let mut worst_entry: f64 = 0.0;
    let mut worst_eig: f64 = 0.0;
    for n in [2u32, 3, 4, 6] {
        let mo = build_m_op(n);
        let lam_op = optimal_protocol(n).unwrap().lambda_op;
        for _ in 0..200 {
            let b = verify::random_reference(n, &mut rng);
            let mb = build_m_b(&b).unwrap();
            for i in 0..mb.dim() {
                worst_entry = worst_entry.max(mb.diag[i].abs() - mo.diag[i]);
                if i + 1 < mb.dim() {
                    worst_entry = worst_entry.max(mb.off[i].abs() - mo.off[i]);
                }
            }
            let (lam, _) = max_eigen(&mb).unwrap();
            worst_eig = worst_eig.max(lam - lam_op);
        }
    }
    c.finish(
        worst_entry <= 1e-10 && worst_eig <= 1e-10,
        format!("entry excess {worst_entry:.3e}, eigenvalue excess {worst_eig:.3e}"),
    );
}

#[test]
fn criterion_07_minimal_measurement() {
    let c = Criterion::with_limit(7, 1.0);
    let p = minimal_povm_n2();
    let rep = check_completeness(&p);
    c.finish(
        p.outcomes.len() == 4
            && rep.residual_norm < 1e-12
            && rep.pairwise_residual < 1e-12
            && rep.is_projective,
        format!(
            "4 outcomes, completeness {:.3e}, projectivity {:.3e}",
            rep.residual_norm, rep.pairwise_residual
        ),
    );
}

#[test]
fn criterion_08_finite_povm_recipe() {
    let c = Criterion::with_limit(8, 10.0);
    let mut worst: f64 = 0.0;
    let mut dims = String::new();
    for n in [2u32, 4, 6, 8] {
        let p = build_finite_povm(n, ReferenceState::b_op(n)).unwrap();
        let rep = check_completeness(&p);
        worst = worst.max(rep.residual_norm);
        dims.push_str(&format!(" D({n})={}", rep.dimension));
    }
    c.finish(worst < 1e-10, format!("max completeness residual {worst:.3e};{dims}"));
}

#[test]
fn criterion_09_monte_carlo_closure() {
    let c = Criterion::with_limit(9, 60.0);
    let p = minimal_povm_n2();
    let sol = optimal_protocol(2).unwrap();
    let a = optimal_signal_state(&sol);
    let r = simulate(&p, &a, 1_000_000, 2024).unwrap();
    let protocol_ok =
        (r.t_mean - sol.lambda_op).abs() <= 4.0 * r.std_err && r.std_err < 0.002;
    let ctrl = simulate_with_guess(
        &p,
        &a,
        1_000_000,
        2025,
        GuessStrategy::Fixed(EulerAngles::IDENTITY),
    )
    .unwrap();
    let control_ok = ctrl.t_mean.abs() <= 4.0 * ctrl.std_err;
    c.finish(
        protocol_ok && control_ok,
        format!(
            "t_mean {:.6} vs lambda {:.6} (se {:.2e}); control mean {:.2e} (se {:.2e})",
            r.t_mean, sol.lambda_op, r.std_err, ctrl.t_mean, ctrl.std_err
        ),
    );
}

#[test]
fn criterion_10_representation_kernel_suite() {
    let c = Criterion::with_limit(10, 30.0);
    let reports = verify::run_kernel_suite(&VerifyOptions::default());
    let all_ok = verify::all_passed(&reports);
    let detail: Vec<String> = reports
        .iter()
        .map(|r| format!("{}={}", r.name, if r.passed { "ok" } else { "FAIL" }))
        .collect();
    c.finish(all_ok, detail.join(", "));
}

