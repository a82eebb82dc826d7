//! Acceptance gate: one test per shipped criterion, each printing a
//! single PASS line with the measured numbers. Tolerances are pinned
//! inline next to the assertions they guard; runtime ceilings are
//! asserted with wall-clock measurements so regressions fail loudly.

use std::f64::consts::PI;
use std::time::Instant;

use boundbell::algebra::{
    dur_state, expectation, ghz, product_projector, ProductProjectorSpec, QubitCount,
};
use boundbell::bell::{
    bell_operator_closed_form, bell_operator_three, lhv_bound_enumeration, noise_threshold_mk,
    noise_threshold_three, rotate_operator, SettingPhaseTable,
};
use boundbell::lhv::{
    lhv_feasible, lhv_feasible_exact, quantum_behavior, random_setting_scan, strategy_matrix,
    ExperimentSpec, QuantumBehavior, Verdict,
};
use boundbell::linalg::{hermitian_eigenvalues, max_abs_diff};
use boundbell::witness::{detection_value, kappa_min, positivity_scan, s_witness};

fn qc(n: usize) -> QubitCount {
    QubitCount::new(n).unwrap()
}

/// Twenty alpha values covering a full period, none at special angles.
fn alpha_grid() -> Vec<f64> {
    (0..20)
        .map(|step| -PI + 2.0 * PI * (step as f64 + 0.5) / 20.0)
        .collect()
}

/// Criterion 1: the 3^n-term assembly of the three-setting operator
/// equals the two-corner closed form for n = 2..7, every off-corner
/// entry below 1e-10, in under 30 s.
#[test]
fn criterion_1_operator_identity() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in 2..=7 {
        let table = SettingPhaseTable::standard(qc(n));
        let assembled = bell_operator_three(qc(n), &table).unwrap();
        let corner_form = bell_operator_closed_form(qc(n), 0.0);
        let diff = max_abs_diff(assembled.matrix(), corner_form.matrix());
        assert!(diff < 1e-10, "n={n}: entrywise deviation {diff:e}");
        worst = worst.max(diff);
        let dim = 1usize << n;
        let corner = assembled.matrix()[[0, dim - 1]];
        let want = (-3.0f64).powi(n as i32) / 2.0;
        assert!(
            (corner.re - want).abs() < 1e-10 && corner.im.abs() < 1e-10,
            "n={n}: corner {corner} vs {want}"
        );
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "assembly sweep took {elapsed:.2?}"
    );
    println!(
        "criterion 1 PASS: assembly equals the corner form for n=2..7 \
         (worst entry deviation {worst:.2e}, {elapsed:.2?})"
    );
}

/// Criterion 2: Tr(B_n(alpha) rho_n(alpha)) = (-3)^n / (2(n+1)) within
/// 1e-9 for n = 4..8 across 20 alphas, with the violation verdict
/// flipping exactly at n = 7.
#[test]
fn criterion_2_family_expectation() {
    let mut worst = 0.0f64;
    for n in 4..=8 {
        let base = bell_operator_closed_form(qc(n), 0.0);
        let want = (-3.0f64).powi(n as i32) / (2.0 * (n as f64 + 1.0));
        for alpha in alpha_grid() {
            let operator = rotate_operator(&base, alpha);
            let rho = dur_state(qc(n), alpha).unwrap();
            let got = expectation(operator.matrix(), &rho).unwrap();
            let err = (got - want).abs();
            assert!(err < 1e-9, "n={n} alpha={alpha}: {got} vs {want}");
            worst = worst.max(err);
            let violated = got.abs() > operator.classical_bound();
            assert_eq!(violated, n >= 7, "verdict at n={n} alpha={alpha}");
        }
    }
    println!(
        "criterion 2 PASS: family expectation matches (-3)^n/(2(n+1)) for n=4..8 \
         x 20 alphas (worst error {worst:.2e}); violation starts at n=7"
    );
}

/// Criterion 3: noise thresholds match their rounded reference values;
/// the MK threshold vanishes at n=7 and the n=8 optimization stays
/// under two minutes.
#[test]
fn criterion_3_noise_thresholds() {
    let three7 = noise_threshold_three(qc(7));
    let three8 = noise_threshold_three(qc(8));
    assert!(
        (three7.value - 0.18903).abs() < 5e-5,
        "v_three(7) = {}",
        three7.value
    );
    assert!(three7.violation);
    assert!(
        (three8.value - 0.39178).abs() < 5e-5,
        "v_three(8) = {}",
        three8.value
    );
    assert!(three8.violation);
    let mk7 = noise_threshold_mk(qc(7)).unwrap();
    assert_eq!(mk7.value, 0.0, "v_mk(7) must vanish");
    assert!(!mk7.violation);
    let start = Instant::now();
    let mk8 = noise_threshold_mk(qc(8)).unwrap();
    let elapsed = start.elapsed();
    assert!(
        (mk8.value - 0.2045).abs() < 5e-3,
        "v_mk(8) = {}",
        mk8.value
    );
    assert!(mk8.violation);
    assert!(
        elapsed.as_secs_f64() <= 120.0,
        "MK optimization at n=8 took {elapsed:.2?}"
    );
    println!(
        "criterion 3 PASS: v_three(7)={:.5}, v_three(8)={:.5}, v_mk(7)=0, v_mk(8)={:.5} \
         (n=8 optimization in {elapsed:.2?})",
        three7.value, three8.value, mk8.value
    );
}

/// Criterion 4: exhaustive LHV enumeration over 8^n deterministic
/// strategies reproduces 2^(n-1) sqrt 3 for n = 2..5 in under 10 s.
#[test]
fn criterion_4_classical_bound_enumeration() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in 2..=5 {
        let table = SettingPhaseTable::standard(qc(n));
        let got = lhv_bound_enumeration(qc(n), &table).unwrap();
        let want = 2f64.powi(n as i32 - 1) * 3f64.sqrt();
        let err = (got - want).abs();
        assert!(err < 1e-9, "n={n}: {got} vs {want}");
        worst = worst.max(err);
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "enumeration sweep took {elapsed:.2?}"
    );
    println!(
        "criterion 4 PASS: enumerated LHV bound equals 2^(n-1) sqrt(3) for n=2..5 \
         (worst error {worst:.2e}, {elapsed:.2?})"
    );
}

/// Criterion 5: the GHZ expectation of the assembled operator is
/// (-3)^n / 2 and its extreme eigenvalue magnitude is 3^n / 2, both
/// within 1e-9, for n = 2..7.
#[test]
fn criterion_5_ghz_quantum_value() {
    let mut worst = 0.0f64;
    for n in 2..=7 {
        let operator = bell_operator_three(qc(n), &SettingPhaseTable::standard(qc(n))).unwrap();
        let rho = ghz(qc(n), 0.0).projector();
        let got = expectation(operator.matrix(), &rho).unwrap();
        let want = (-3.0f64).powi(n as i32) / 2.0;
        let trace_err = (got - want).abs();
        assert!(trace_err < 1e-9, "n={n}: trace {got} vs {want}");
        let extreme = hermitian_eigenvalues(operator.matrix())
            .iter()
            .fold(0.0f64, |acc, e| acc.max(e.abs()));
        let eig_err = (extreme - 3f64.powi(n as i32) / 2.0).abs();
        assert!(eig_err < 1e-9, "n={n}: extreme eigenvalue {extreme}");
        worst = worst.max(trace_err.max(eig_err));
    }
    println!(
        "criterion 5 PASS: GHZ trace (-3)^n/2 and extreme eigenvalue 3^n/2 \
         for n=2..7 (worst error {worst:.2e})"
    );
}

/// Criterion 6: witness detection equals the closed form
/// (1 - 2^(n-1) + n)/(n+1) < 0 for n = 4..10 across 20 alphas within
/// 1e-10; detection is exactly zero at kappa_min; the product-state
/// positivity scan stays above -1e-9 and converges to 1 - kappa.
#[test]
fn criterion_6_witness_suite() {
    let mut worst = 0.0f64;
    for n in 4..=10 {
        let closed = detection_value(qc(n), 1.0);
        let formula = (1.0 - 2f64.powi(n as i32 - 1) + n as f64) / (n as f64 + 1.0);
        assert!((closed - formula).abs() < 1e-14, "n={n} closed form");
        assert!(closed < 0.0, "n={n} must detect at kappa = 1");
        for alpha in alpha_grid() {
            let witness = s_witness(qc(n), 1.0, alpha).unwrap();
            let rho = dur_state(qc(n), alpha).unwrap();
            let traced = expectation(witness.matrix(), &rho).unwrap();
            let err = (traced - formula).abs();
            assert!(err < 1e-10, "n={n} alpha={alpha}: {traced} vs {formula}");
            worst = worst.max(err);
        }
        assert_eq!(
            detection_value(qc(n), kappa_min(qc(n))),
            0.0,
            "n={n}: detection must vanish exactly at kappa_min"
        );
    }
    for &kappa in &[0.0, 0.5, 1.0] {
        for n in [4, 6] {
            let witness = s_witness(qc(n), kappa, 0.7).unwrap();
            let scan = positivity_scan(&witness, 60, 4242).unwrap();
            assert!(
                scan.min_value >= -1e-9,
                "kappa={kappa} n={n}: scan minimum {}",
                scan.min_value
            );
            assert!(
                (scan.min_value - (1.0 - kappa)).abs() < 1e-6,
                "kappa={kappa} n={n}: scan minimum {} vs {}",
                scan.min_value,
                1.0 - kappa
            );
        }
    }
    println!(
        "criterion 6 PASS: detection matches (1-2^(n-1)+n)/(n+1) < 0 for n=4..10 \
         x 20 alphas (worst error {worst:.2e}); zero at kappa_min; \
         product minimum is 1-kappa within 1e-6 for kappa in {{0, 0.5, 1}}"
    );
}

fn chsh_behavior() -> QuantumBehavior {
    let spec =
        ExperimentSpec::equatorial(&[vec![0.0, PI / 2.0], vec![-PI / 4.0, PI / 4.0]]).unwrap();
    quantum_behavior(&ghz(qc(2), 0.0).projector(), &spec).unwrap()
}

fn product_behavior(angles: &[(f64, f64)], measure: &[Vec<f64>]) -> QuantumBehavior {
    let rho = product_projector(&ProductProjectorSpec::new(angles.to_vec()).unwrap());
    let spec = ExperimentSpec::equatorial(measure).unwrap();
    quantum_behavior(&rho, &spec).unwrap()
}

/// Maximum reconstruction error of a returned strategy mixture against
/// the behavior it claims to reproduce, via the explicit strategy matrix.
fn reconstruction_error(behavior: &QuantumBehavior, weights: &[(u64, f64)]) -> f64 {
    let lp = strategy_matrix(qc(behavior.observers()), behavior.settings()).unwrap();
    let mut recon = vec![0.0; behavior.probabilities().len()];
    for &(s, w) in weights {
        for (row, value) in recon.iter_mut().enumerate() {
            *value += w * lp.a[[row, s as usize]];
        }
    }
    recon
        .iter()
        .zip(behavior.probabilities())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Criterion 7: the LP oracle is sound in both directions. CHSH is
/// infeasible with the textbook certificate (classical max 2, quantum
/// value 2 sqrt 2); product behaviors come back feasible with a mixture
/// reconstructing them to 1e-8; the exact rational re-solve agrees with
/// the floating verdict on every instance small enough to afford it.
#[test]
fn criterion_7_lp_soundness() {
    let chsh = chsh_behavior();
    let result = lhv_feasible(&chsh).unwrap();
    assert_eq!(result.verdict, Verdict::Infeasible);
    let certificate = result.certificate.as_ref().unwrap();
    assert!(
        (certificate.classical_max - 2.0).abs() < 1e-6,
        "classical max {}",
        certificate.classical_max
    );
    assert!(
        (certificate.quantum_value - 2.0 * 2f64.sqrt()).abs() < 1e-6,
        "quantum value {}",
        certificate.quantum_value
    );
    let direct: f64 = certificate
        .coefficients
        .iter()
        .zip(chsh.probabilities())
        .map(|(c, p)| c * p)
        .sum();
    assert!(
        (direct - certificate.quantum_value).abs() < 1e-9,
        "certificate must evaluate to its claimed quantum value"
    );

    let products = [
        product_behavior(
            &[(0.3, 1.1), (1.2, -0.4)],
            &[vec![0.0, 1.3], vec![0.7, 2.1]],
        ),
        product_behavior(
            &[(0.8, 0.2), (0.45, 2.8)],
            &[vec![0.4, -0.9], vec![1.9, 0.3]],
        ),
        product_behavior(
            &[(0.3, 1.1), (1.2, -0.4), (0.55, 2.2)],
            &[vec![0.0, 1.3], vec![0.7, 2.1], vec![-0.5, 0.9]],
        ),
    ];
    let mut worst_recon = 0.0f64;
    for (i, behavior) in products.iter().enumerate() {
        let result = lhv_feasible(behavior).unwrap();
        assert_eq!(result.verdict, Verdict::Feasible, "product instance {i}");
        let weights = result.weights.as_ref().unwrap();
        let total: f64 = weights.iter().map(|w| w.1).sum();
        assert!((total - 1.0).abs() <= 1e-8, "instance {i}: weight sum {total}");
        let err = reconstruction_error(behavior, weights);
        assert!(err <= 1e-8, "instance {i}: reconstruction error {err:e}");
        worst_recon = worst_recon.max(err);
    }

    let mermin = {
        let spec = ExperimentSpec::equatorial(&vec![vec![0.0, PI / 2.0]; 3]).unwrap();
        quantum_behavior(&ghz(qc(3), 0.0).projector(), &spec).unwrap()
    };
    let dur_small = {
        let spec = ExperimentSpec::three_setting(&SettingPhaseTable::standard(qc(2))).unwrap();
        quantum_behavior(&dur_state(qc(2), 0.9).unwrap(), &spec).unwrap()
    };
    let exact_instances: Vec<(&str, &QuantumBehavior)> = vec![
        ("chsh", &chsh),
        ("product-2x2-a", &products[0]),
        ("product-2x2-b", &products[1]),
        ("product-3x2", &products[2]),
        ("mermin-3x2", &mermin),
        ("dur-2x3", &dur_small),
    ];
    for (label, behavior) in exact_instances {
        assert!(
            behavior.observers() * behavior.settings() <= 6,
            "{label} exceeds the exact-arithmetic budget"
        );
        let float_verdict = lhv_feasible(behavior).unwrap().verdict;
        let exact_verdict = lhv_feasible_exact(behavior).unwrap();
        assert_eq!(float_verdict, exact_verdict, "instance {label}");
    }
    println!(
        "criterion 7 PASS: CHSH certificate (classical 2, quantum 2 sqrt 2); \
         product mixtures reconstruct to {worst_recon:.2e}; \
         exact re-solve agrees on all 6 small instances"
    );
}

/// Criterion 8: 100 Haar-random three-setting trials per alpha in
/// {0, pi/2, pi} on the four-qubit family, fixed seeds, all feasible,
/// within the 15-minute ceiling.
#[test]
fn criterion_8_four_qubit_scan() {
    let start = Instant::now();
    for (i, alpha) in [0.0, PI / 2.0, PI].into_iter().enumerate() {
        let rho = dur_state(qc(4), alpha).unwrap();
        let report = random_setting_scan(&rho, 3, 100, 42 + i as u64).unwrap();
        assert_eq!(report.trials, 100);
        assert_eq!(
            report.infeasible,
            0,
            "alpha={alpha}: infeasible trials {:?}",
            report
                .infeasible_trials
                .iter()
                .map(|t| t.trial)
                .collect::<Vec<_>>()
        );
        assert_eq!(report.failed, 0, "alpha={alpha}: failures {:?}", report.failures);
        assert_eq!(report.feasible, 100);
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() <= 900.0,
        "scan took {elapsed:.1?}"
    );
    println!(
        "criterion 8 PASS: 300 random-setting trials on the four-qubit family \
         all feasible ({elapsed:.1?})"
    );
}

/// Criterion 9: the thresholds subcommand emits a CSV whose
/// three-setting column dominates the MK column for every n >= 7 and
/// whose first positive MK entry sits at n = 8.
#[test]
fn criterion_9_threshold_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("thresholds.csv");
    let output = std::process::Command::new(env!("CARGO_BIN_EXE_boundbell"))
        .args(["thresholds", "--n-min", "4", "--n-max", "10", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N,v_three,v_mk"));
    let mut rows = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 3, "row {line:?}");
        rows.push((
            fields[0].parse::<usize>().unwrap(),
            fields[1].parse::<f64>().unwrap(),
            fields[2].parse::<f64>().unwrap(),
        ));
    }
    assert_eq!(
        rows.iter().map(|r| r.0).collect::<Vec<_>>(),
        vec![4, 5, 6, 7, 8, 9, 10]
    );
    for &(n, three, mk) in &rows {
        assert!(three >= 0.0 && mk >= 0.0, "n={n}: thresholds are fractions");
        if n >= 7 {
            assert!(three > mk, "n={n}: v_three={three} must dominate v_mk={mk}");
        }
    }
    let first_positive_mk = rows.iter().find(|r| r.2 > 0.0).map(|r| r.0);
    assert_eq!(first_positive_mk, Some(8), "first positive MK entry");
    println!(
        "criterion 9 PASS: CSV three-setting column dominates MK for n>=7; \
         first positive MK entry at n=8"
    );
}
