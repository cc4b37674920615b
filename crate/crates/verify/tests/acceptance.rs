//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

use std::path::{Path, PathBuf};

use way_core::bounds::{
    check_invariant_state, difference_form_minimum, optimal_probe_distribution, ratio_and_cv,
    ratio_of_distribution,
};
use way_core::conservation::{
    conservation_residual, conservation_residual_of, exponentiate_additive,
    random_commutant_unitary,
};
use way_core::ensemble::{run_master_suite, run_suite_on, SuiteConfig, SuiteSummary};
use way_core::linalg::{exp_i_hermitian, operator_modulus, tensor};
use way_core::models::{
    build_cnot_model, build_example1, build_example2, DimChoice, EnsembleSpec, NamedModel,
};
use way_core::num_complex::Complex64;
use way_core::random::{
    haar_state, haar_unitary, hermitian_with_spectrum, random_hermitian, rng_for,
};
use way_core::{
    ComplexMatrix, ConservedPair, Execution, MeasuringProcess, StateVector, Tolerances,
};

use rand::Rng;

type Outcome = (bool, String);

fn tol() -> Tolerances {
    Tolerances::default()
}

fn e(x: f64) -> String {
    format!("{x:.3e}")
}

/// Plain nested-array complex arithmetic, independent of the library.
mod oracle {
    use way_core::num_complex::Complex64;

    pub type M = Vec<Vec<Complex64>>;

    pub fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    pub fn real(rows: &[&[f64]]) -> M {
        rows.iter()
            .map(|r| r.iter().map(|&x| c(x)).collect())
            .collect()
    }

    pub fn kron(a: &M, b: &M) -> M {
        let (n, m) = (a.len(), b.len());
        let mut out = vec![vec![c(0.0); n * m]; n * m];
        for i in 0..n {
            for j in 0..n {
                for k in 0..m {
                    for l in 0..m {
                        out[i * m + k][j * m + l] = a[i][j] * b[k][l];
                    }
                }
            }
        }
        out
    }

    pub fn mul(a: &M, b: &M) -> M {
        let n = a.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                    .collect()
            })
            .collect()
    }

    pub fn sub(a: &M, b: &M) -> M {
        a.iter()
            .zip(b)
            .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect())
            .collect()
    }

    pub fn dagger(a: &M) -> M {
        let n = a.len();
        (0..n)
            .map(|i| (0..n).map(|j| a[j][i].conj()).collect())
            .collect()
    }

    pub fn apply(a: &M, v: &[Complex64]) -> Vec<Complex64> {
        a.iter()
            .map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum())
            .collect()
    }

    pub fn norm(v: &[Complex64]) -> f64 {
        v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest singular value by power iteration on `A†A`.
    pub fn spectral_norm(a: &M) -> f64 {
        let ata = mul(&dagger(a), a);
        let n = a.len();
        let mut v: Vec<Complex64> = (0..n).map(|i| c(1.0 + 0.1 * i as f64)).collect();
        let mut lambda = 0.0;
        for _ in 0..500 {
            let w = apply(&ata, &v);
            let nw = norm(&w);
            if nw == 0.0 {
                return 0.0;
            }
            lambda = nw / norm(&v);
            v = w.into_iter().map(|z| z / nw).collect();
        }
        lambda.sqrt()
    }

    pub fn identity(n: usize) -> M {
        (0..n)
            .map(|i| (0..n).map(|j| c(if i == j { 1.0 } else { 0.0 })).collect())
            .collect()
    }
}

fn cnot_oracle() -> oracle::M {
    oracle::real(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ])
}

fn criterion_1() -> Outcome {
    let m = build_cnot_model();
    let z = ComplexMatrix::pauli_z();
    let mut rng = rng_for(101, 0);
    let states: Vec<StateVector> = (0..2)
        .map(|i| StateVector::basis(2, i))
        .chain((0..100).map(|_| haar_state(2, &mut rng)))
        .collect();
    let mut max_eps: f64 = 0.0;
    let mut max_eta: f64 = 0.0;
    let mut max_oracle: f64 = 0.0;
    // N = U†(I⊗σz)U − σz⊗I computed with plain arrays.
    let u = cnot_oracle();
    let zo = oracle::real(&[&[1.0, 0.0], &[0.0, -1.0]]);
    let n = oracle::sub(
        &oracle::mul(
            &oracle::mul(
                &oracle::dagger(&u),
                &oracle::kron(&oracle::identity(2), &zo),
            ),
            &u,
        ),
        &oracle::kron(&zo, &oracle::identity(2)),
    );
    for psi in &states {
        max_eps = max_eps.max(m.process.rms_noise(&z, psi).unwrap());
        max_eta = max_eta.max(m.process.rms_disturbance(&z, psi).unwrap());
        let phi: Vec<Complex64> = psi.tensor(m.process.xi()).iter().copied().collect();
        max_oracle = max_oracle.max(oracle::norm(&oracle::apply(&n, &phi)));
    }
    let pass = max_eps <= 1e-10 && max_eta <= 1e-10 && max_oracle <= 1e-10;
    (
        pass,
        format!(
            "CNOT: max ε = {}, max η = {}, array oracle ε = {} over {} states",
            e(max_eps),
            e(max_eta),
            e(max_oracle),
            states.len()
        ),
    )
}

fn criterion_2() -> Outcome {
    let m = build_cnot_model();
    let t = tol();
    let ok = m.process.detect_araki_yanase(&ComplexMatrix::pauli_z(), &t);
    let rejected = m
        .process
        .detect_araki_yanase(&ComplexMatrix::pauli_x(), &t)
        .is_err();
    let rep = m
        .process
        .check_repeatability(&ComplexMatrix::pauli_z(), &t)
        .unwrap();
    match ok {
        Ok(d) => {
            let r = d.residuals;
            let pass = rejected
                && r.reconstruction <= 1e-9
                && r.distinguishability <= 1e-9
                && r.meter <= 1e-9
                && rep.max_deviation <= 1e-10;
            (
                pass,
                format!(
                    "σz detected, σx rejected = {rejected}; residuals U {} dis {} meter {}; repeatability deviation {}",
                    e(r.reconstruction),
                    e(r.distinguishability),
                    e(r.meter),
                    e(rep.max_deviation)
                ),
            )
        }
        Err(err) => (false, format!("detection failed on σz: {err}")),
    }
}

fn criterion_3() -> Outcome {
    let m = build_example1();
    let c = &m.conserved[0];
    let residual = conservation_residual(&m.process, c).unwrap();
    let comm = m.observable.commutator(c.l1()).unwrap().spectral_norm();
    let comm_abs = m.observable.commutator(c.abs_l1()).unwrap().spectral_norm();
    // ‖[U, σx⊗σx]‖ with plain arrays.
    let u = cnot_oracle();
    let x = oracle::real(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let xx = oracle::kron(&x, &x);
    let oracle_residual =
        oracle::spectral_norm(&oracle::sub(&oracle::mul(&u, &xx), &oracle::mul(&xx, &u)));
    let pass = residual <= 1e-12 && (comm - 2.0).abs() <= 1e-10 && comm_abs <= 1e-12;
    (
        pass,
        format!(
            "(σx, σx): conservation residual {} (array oracle {}, need ≤ 1e-12); ‖[A,L1]‖ = {comm:.12}; ‖[A,|L1|]‖ = {}",
            e(residual),
            e(oracle_residual),
            e(comm_abs)
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = rng_for(404, 0);
    let mut max_residual: f64 = 0.0;
    for _ in 0..10 {
        let m = build_example2(Some(random_hermitian(2, &mut rng))).unwrap();
        max_residual =
            max_residual.max(conservation_residual(&m.process, &m.conserved[0]).unwrap());
    }
    let m = build_example2(None).unwrap();
    let c = &m.conserved[0];
    let smin = c.l2_min_abs_eigenvalue();
    let comm_abs = m.observable.commutator(c.abs_l1()).unwrap().spectral_norm();
    let pass = max_residual <= 1e-12 && smin <= 1e-12 && (comm_abs - 1.0).abs() <= 1e-10;
    (
        pass,
        format!(
            "10 random L1: max residual {}; L2 min |eigenvalue| {}; ‖[A,|L1|]‖ = {comm_abs:.12}",
            e(max_residual),
            e(smin)
        ),
    )
}

fn master_summary() -> SuiteSummary {
    let config = SuiteConfig::new(EnsembleSpec {
        dims: DimChoice::Uniform { min: 2, max: 4 },
        count: 200,
        seed: 2024,
        yanase: true,
        invertible_l2: true,
    });
    run_master_suite(&config, &tol(), Execution::Parallel).unwrap()
}

fn criterion_5(s: &SuiteSummary) -> Outcome {
    let bound_violations = s
        .violations
        .iter()
        .filter(|v| v.message.contains("bound") || v.message.contains("Heisenberg"))
        .count();
    let pass = s.models == 200
        && bound_violations == 0
        && s.min_general_margin >= -1e-8
        && s.min_yanase_margin >= -1e-8
        && s.min_hr_margin >= -1e-8;
    (
        pass,
        format!(
            "{} models, {} states ({} kernel states skipped): {} bound violations; min margins general {}, Yanase {}, HR {}",
            s.models,
            s.states_evaluated,
            s.kernel_states,
            bound_violations,
            e(s.min_general_margin),
            e(s.min_yanase_margin),
            e(s.min_hr_margin)
        ),
    )
}

fn criterion_6(s: &SuiteSummary) -> Outcome {
    let all_rows = s.outcomes.iter().all(|o| o.identity_residual.is_some());
    let pass = all_rows && s.max_identity_residual <= 1e-9;
    (
        pass,
        format!(
            "max commutator identity residual {} over {} models",
            e(s.max_identity_residual),
            s.models
        ),
    )
}

/// Controlled flips `P₊⊗I + P₋⊗σx` on a random frame: precise for
/// `A = P₊ − P₋`, with `L₂ = c·σx` and a Yanase meter σz.
fn precise_family(index: usize, block_diagonal_l1: bool) -> NamedModel {
    let t = tol();
    let mut rng = rng_for(777, index as u64);
    let dim_h = rng.random_range(2..=4usize);
    let plus = rng.random_range(1..dim_h);
    let v = haar_unitary(dim_h, &mut rng);
    let frame = |d: &[f64]| &(&v * &ComplexMatrix::diag(d)) * &v.adjoint();
    let mask: Vec<f64> = (0..dim_h)
        .map(|i| if i < plus { 1.0 } else { 0.0 })
        .collect();
    let p_plus = frame(&mask);
    let p_minus = frame(&mask.iter().map(|m| 1.0 - m).collect::<Vec<_>>());
    let a = &p_plus - &p_minus;
    let u = &tensor(&p_plus, &ComplexMatrix::identity(2))
        + &tensor(&p_minus, &ComplexMatrix::pauli_x());
    let l1 = if block_diagonal_l1 {
        let h = random_hermitian(dim_h, &mut rng);
        &(&(&p_plus * &h) * &p_plus) + &(&(&p_minus * &h) * &p_minus)
    } else {
        random_hermitian(dim_h, &mut rng)
    };
    let scale = [1.0, 2.0, 3.0][rng.random_range(0..3)];
    let l2 = ComplexMatrix::pauli_x().scale_real(scale);
    let process = MeasuringProcess::new(
        dim_h,
        StateVector::basis(2, 0),
        u,
        ComplexMatrix::pauli_z(),
        t,
    )
    .unwrap();
    NamedModel {
        name: format!("precise-{index}"),
        process,
        observable: a,
        conserved: vec![ConservedPair::multiplicative(l1, l2, &t).unwrap()],
        expected: Vec::new(),
    }
}

fn criterion_7(s: &SuiteSummary) -> Outcome {
    let family: Vec<NamedModel> = (0..40).map(|i| precise_family(i, i % 2 == 0)).collect();
    let config = SuiteConfig::new(EnsembleSpec::default());
    let f = run_suite_on(&family, &config, &tol(), Execution::Parallel).unwrap();
    let conserving_precise = f
        .outcomes
        .iter()
        .filter(|o| o.max_basis_noise <= 1e-8 && o.conservation_residual <= 1e-9)
        .count();
    let pass = s.contrapositive_hits == 0 && f.contrapositive_hits == 0;
    (
        pass,
        format!(
            "random ensemble: {} hits ({} precise models); controlled-flip family: {} hits, {} precise and conserving",
            s.contrapositive_hits, s.precise_models, f.contrapositive_hits, conserving_precise
        ),
    )
}

fn criterion_8() -> Outcome {
    let t = tol();
    let mut max_norm: f64 = 0.0;
    let mut max_diff: f64 = 0.0;
    for i in 0..50u64 {
        let mut rng = rng_for(808, i);
        let dh = rng.random_range(2..=3usize);
        let dk = rng.random_range(2..=3usize);
        let u = haar_unitary(dh * dk, &mut rng);
        let meter = if i % 2 == 0 {
            random_hermitian(dk, &mut rng)
        } else {
            // Degenerate meter: two clusters at most.
            let levels: Vec<f64> = (0..dk).map(|j| if j == 0 { 1.0 } else { -1.0 }).collect();
            hermitian_with_spectrum(&levels, &mut rng)
        };
        let xi = haar_state(dk, &mut rng);
        let p = MeasuringProcess::new(dh, xi, u, meter, t).unwrap();
        let povm = p.povm();
        max_norm = max_norm.max(povm.normalization_residual());
        for _ in 0..5 {
            let psi = haar_state(dh, &mut rng);
            let direct = p.output_distribution(&psi).unwrap();
            let via_povm = povm.probabilities(&psi).unwrap();
            for ((m1, p1), (m2, p2)) in direct.outcomes.iter().zip(&via_povm) {
                assert!((m1 - m2).abs() < 1e-9);
                max_diff = max_diff.max((p1 - p2).abs());
            }
        }
    }
    let pass = max_norm <= 1e-10 && max_diff <= 1e-10;
    (
        pass,
        format!(
            "50 processes: ‖ΣΠ − I‖ ≤ {}, route disagreement ≤ {}",
            e(max_norm),
            e(max_diff)
        ),
    )
}

/// Brute-force minimum of `R` over the simplex at step `1/n`.
fn grid_oracle(levels: &[f64], n: usize) -> f64 {
    let r = |p: &[f64]| {
        let mean: f64 = p.iter().zip(levels).map(|(p, l)| p * l).sum();
        let second: f64 = p.iter().zip(levels).map(|(p, l)| p * l * l).sum();
        mean * mean / second
    };
    let mut best = f64::INFINITY;
    match levels.len() {
        2 => {
            for i in 0..=n {
                let a = i as f64 / n as f64;
                best = best.min(r(&[a, 1.0 - a]));
            }
        }
        3 => {
            for i in 0..=n {
                for j in 0..=(n - i) {
                    let a = i as f64 / n as f64;
                    let b = j as f64 / n as f64;
                    best = best.min(r(&[a, b, (1.0 - a - b).max(0.0)]));
                }
            }
        }
        _ => unreachable!(),
    }
    best
}

fn criterion_9() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for levels in [vec![1.0, 2.0], vec![1.0, 5.0], vec![1.0, 2.0, 5.0]] {
        let dist = optimal_probe_distribution(&levels).unwrap();
        let grid = grid_oracle(&levels, 1000);
        let at_dist = ratio_of_distribution(&levels, &dist.probabilities);
        pass &= (grid - dist.r_min).abs() <= 1e-4 && (at_dist - dist.r_min).abs() <= 1e-12;
        parts.push(format!(
            "{:?}: r_min {:.6} grid {:.6}",
            levels, dist.r_min, grid
        ));
    }
    let printed = difference_form_minimum(1.0, 2.0);
    pass &= printed > 1.0;

    let t = tol();
    let mut max_identity: f64 = 0.0;
    let mut max_oracle: f64 = 0.0;
    for i in 0..100u64 {
        let mut rng = rng_for(909, i);
        let d = rng.random_range(2..=4usize);
        let l2 = random_hermitian(d, &mut rng);
        let xi = haar_state(d, &mut rng);
        let rc = ratio_and_cv(&l2, &xi, &t).unwrap();
        max_identity = max_identity.max((rc.ratio - 1.0 / (1.0 + rc.cv * rc.cv)).abs());
        // ⟨|L2|²⟩ = ⟨L2²⟩ needs no modulus.
        let abs = operator_modulus(&l2, &t).unwrap();
        let mean = abs.expectation(xi.amplitudes()).unwrap().re;
        let second = l2.apply(xi.amplitudes()).unwrap().norm_squared();
        max_oracle = max_oracle.max((rc.ratio - mean * mean / second).abs());
    }
    pass &= max_identity <= 1e-10 && max_oracle <= 1e-10;
    parts.push(format!(
        "4·l_m·l_M/(l_M−l_m)² at (1,2) = {printed} > 1; R vs 1/(1+CV²) ≤ {} on 100 draws",
        e(max_identity)
    ));
    (pass, parts.join("; "))
}

/// Spectrum drawn from `levels` with at least two distinct values, so the
/// exponentiated pair is not a multiple of the identity.
fn nonconstant_levels<R: Rng>(levels: &[f64], n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let d: Vec<f64> = (0..n)
            .map(|_| levels[rng.random_range(0..levels.len())])
            .collect();
        if d.iter().any(|&x| x != d[0]) {
            return d;
        }
    }
}

fn criterion_10() -> Outcome {
    let t = tol();
    let mut max_conserving: f64 = 0.0;
    let mut min_control = f64::INFINITY;
    for i in 0..50u64 {
        let mut rng = rng_for(1010, i);
        let dh = rng.random_range(2..=3usize);
        let dk = rng.random_range(2..=3usize);
        let d1 = nonconstant_levels(&[-1.0, 0.0, 1.0], dh, &mut rng);
        let d2 = nonconstant_levels(&[0.0, 1.0, 2.0], dk, &mut rng);
        let v1 = haar_unitary(dh, &mut rng);
        let v2 = haar_unitary(dk, &mut rng);
        let l1 = &(&v1 * &ComplexMatrix::diag(&d1)) * &v1.adjoint();
        let l2 = &(&v2 * &ComplexMatrix::diag(&d2)) * &v2.adjoint();
        let pair = ConservedPair::additive(l1.clone(), l2.clone(), &t).unwrap();
        let u = if i % 2 == 0 {
            // Controlled phases diagonal in the product eigenbasis.
            let phases: Vec<Complex64> = (0..dh * dk)
                .map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
                .collect();
            let w = tensor(&v1, &v2);
            let diag = ComplexMatrix::from_fn(dh * dk, |r, c| {
                if r == c {
                    phases[r]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            &(&w * &diag) * &w.adjoint()
        } else {
            random_commutant_unitary(&pair.total(), rng.random(), &t).unwrap()
        };
        assert!(conservation_residual_of(&u, &pair).unwrap() <= 1e-9);
        let mult = exponentiate_additive(&pair, &t).unwrap();
        max_conserving = max_conserving.max(conservation_residual_of(&u, &mult).unwrap());

        let h = random_hermitian(dh * dk, &mut rng);
        let control = exp_i_hermitian(&h, &t).unwrap();
        min_control = min_control.min(conservation_residual_of(&control, &mult).unwrap());
    }
    let pass = max_conserving <= 1e-8 && min_control > 1e-3;
    (
        pass,
        format!(
            "50 additive models: max multiplicative residual {}; 50 controls: min residual {}",
            e(max_conserving),
            e(min_control)
        ),
    )
}

fn criterion_11() -> Outcome {
    let m = build_cnot_model();
    let rho1 = ComplexMatrix::diag(&[0.3, 0.7]);
    let rho2 = ComplexMatrix::diag(&[0.5, 0.5]);
    let r =
        check_invariant_state(&m.process, &rho1, &rho2, &ComplexMatrix::pauli_z(), &tol()).unwrap();
    let pass = r.invariance_residual <= 1e-12
        && r.rho2_min_eigenvalue > 0.0
        && r.commutator_a_rho1 <= 1e-12;
    (
        pass,
        format!(
            "invariance residual {}; ρ2 min eigenvalue {}; ‖[A,ρ1]‖ = {}; consistent = {}",
            e(r.invariance_residual),
            r.rho2_min_eigenvalue,
            e(r.commutator_a_rho1),
            r.consistent
        ),
    )
}

fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../cli/models")
}

/// Runs `waycheck` in-process with captured output; returns the exit code.
fn run_cli(args: &[&str]) -> i32 {
    let argv = std::iter::once("waycheck").chain(args.iter().copied());
    let (mut out, mut err) = (Vec::new(), Vec::new());
    way_cli::run_with(argv, &mut out, &mut err)
}

/// Report body with the timestamp line removed.
fn body_of(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.trim_start().starts_with("\"generated_at\""))
        .collect::<Vec<_>>()
        .join("\n")
}

fn perturbed_cnot(dir: &Path) -> PathBuf {
    let m = build_cnot_model();
    let t = tol();
    let rotation = exp_i_hermitian(
        &tensor(&ComplexMatrix::pauli_y(), &ComplexMatrix::identity(2)).scale_real(1e-3),
        &t,
    )
    .unwrap();
    let u = &rotation * m.process.unitary();
    let process =
        MeasuringProcess::new(2, m.process.xi().clone(), u, m.process.meter().clone(), t).unwrap();
    let perturbed = NamedModel {
        name: "cnot-perturbed".into(),
        process,
        ..m
    };
    let path = dir.join("perturbed.json");
    std::fs::write(
        &path,
        way_cli::schema::ModelFile::from_named(&perturbed, &[]).to_pretty_json(),
    )
    .unwrap();
    path
}

fn criterion_12() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cnot = models_dir().join("cnot.json");
    let cnot = cnot.to_str().unwrap();
    let mut identical = true;
    for (tag, args) in [
        ("validate", vec!["validate", cnot]),
        (
            "ensemble",
            vec!["ensemble", "--dims", "2x2", "--count", "30", "--yanase"],
        ),
    ] {
        let a = d.join(format!("{tag}-a.json"));
        let b = d.join(format!("{tag}-b.json"));
        for path in [&a, &b] {
            let mut full = args.clone();
            full.extend([
                "--seed",
                "7",
                "--output",
                "json",
                "--report",
                path.to_str().unwrap(),
            ]);
            run_cli(&full);
        }
        identical &= body_of(&a) == body_of(&b) && !body_of(&a).is_empty();
    }

    let perturbed = perturbed_cnot(d);
    let truncated = d.join("truncated.json");
    let text = std::fs::read_to_string(models_dir().join("cnot.json")).unwrap();
    std::fs::write(&truncated, &text[..text.len() / 2]).unwrap();
    let model = |n: &str| {
        models_dir()
            .join(format!("{n}.json"))
            .to_str()
            .unwrap()
            .to_string()
    };
    let cases: Vec<(Vec<String>, i32)> = vec![
        (vec!["validate".into(), model("cnot")], 0),
        (vec!["validate".into(), model("example1")], 0),
        (vec!["validate".into(), model("example2")], 0),
        (vec!["validate".into(), model("qutrit")], 0),
        (
            vec!["validate".into(), perturbed.to_str().unwrap().into()],
            1,
        ),
        (
            vec!["validate".into(), truncated.to_str().unwrap().into()],
            2,
        ),
        (vec!["bound".into(), model("example2")], 0),
        (vec!["bound".into(), model("cnot")], 2),
        (
            "ensemble --dims 2x2 --count 200 --seed 7 --yanase"
                .split(' ')
                .map(String::from)
                .collect(),
            0,
        ),
        (vec!["ensemble".into(), "--count".into(), "0".into()], 0),
        (
            vec!["optimize".into(), "--l2-spec".into(), "diag:1,2".into()],
            0,
        ),
        (
            vec!["optimize".into(), "--l2-spec".into(), "diag:1,1".into()],
            2,
        ),
    ];
    let mut mismatches = Vec::new();
    for (args, want) in &cases {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let mut quiet = refs.clone();
        quiet.extend(["--output", "json"]);
        let got = run_cli(&quiet);
        if got != *want {
            mismatches.push(format!(
                "`{}` exited {got}, expected {want}",
                refs.join(" ")
            ));
        }
    }
    let pass = identical && mismatches.is_empty();
    let mut detail = format!(
        "report bodies identical across runs = {identical}; {}/{} golden exit codes",
        cases.len() - mismatches.len(),
        cases.len()
    );
    if !mismatches.is_empty() {
        detail.push_str(&format!(" ({})", mismatches.join("; ")));
    }
    (pass, detail)
}

fn main() {
    let summary = master_summary();
    let results: Vec<(usize, &str, Outcome)> = vec![
        (1, "CNOT preciseness", criterion_1()),
        (2, "Araki-Yanase equivalence", criterion_2()),
        (3, "Example 1 goldens", criterion_3()),
        (4, "Example 2 goldens", criterion_4()),
        (5, "master bound suite", criterion_5(&summary)),
        (6, "commutator identity", criterion_6(&summary)),
        (7, "theorem contrapositive", criterion_7(&summary)),
        (8, "POVM consistency", criterion_8()),
        (9, "R minimizer oracle", criterion_9()),
        (10, "additive bridge", criterion_10()),
        (11, "invariant state golden", criterion_11()),
        (12, "CLI determinism", criterion_12()),
    ];
    let mut failed = 0;
    for (n, name, (pass, detail)) in &results {
        let status = if *pass { "PASS" } else { "FAIL" };
        println!("criterion {n:>2} {status}  {name}: {detail}");
        if !pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
