//! Acceptance suite: one test per criterion, each printing a single
//! pass/fail line (visible with `--nocapture`). Tolerances and runtime
//! budgets are pinned in the assertions.
//!
//! Everything runs at desk scale: two to four modes for the worked
//! examples, up to six modes for the structural relations.

use std::time::Instant;

use carsep::algebra::{anticommutator, FermionAlgebra};
use carsep::basis::{GradeFilter, Partition};
use carsep::entanglement::{
    concurrence_eof, eof_averaged, eof_superselected, eof_tensor, RoofOptions, Side,
};
use carsep::linalg::{cr, max_abs, max_abs_diff, CMat};
use carsep::named::{self, PhiLambdaSpec};
use carsep::random;
use carsep::separability::{
    car_implies_tensor_check, hopping_witness, ppt_check, rho_one_four_term_decomposition,
    verify_separable_decomposition, Pairing, SeparableKind, Verdict, random_car_separable,
};
use carsep::state::{marginal_entropies, product_extension, QuantumState};
use carsep::{tol, Error};

const LN2: f64 = std::f64::consts::LN_2;

fn report(criterion: &str, elapsed: std::time::Duration, budget_s: f64, detail: &str) {
    println!(
        "criterion {criterion}: PASS in {:.2}s (budget {budget_s}s) — {detail}",
        elapsed.as_secs_f64()
    );
    assert!(
        elapsed.as_secs_f64() < budget_s,
        "criterion {criterion} exceeded its {budget_s}s budget"
    );
}

fn two_site() -> Partition {
    Partition::new(&[1], &[2]).unwrap()
}

#[test]
fn acceptance_01_car_relations() {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    for n in 1..=6u32 {
        let labels: Vec<u32> = (1..=n).collect();
        let alg = FermionAlgebra::new(&labels).unwrap();
        for &i in &labels {
            for &j in &labels {
                let ci = alg.creation(i).unwrap();
                let cj = alg.creation(j).unwrap();
                let ai = alg.annihilation(i).unwrap();
                let aj = alg.annihilation(j).unwrap();
                let mut target = CMat::zeros(alg.dim(), alg.dim());
                if i == j {
                    target = alg.identity();
                }
                worst = worst.max(max_abs_diff(&anticommutator(ci, aj), &target));
                worst = worst.max(max_abs(&anticommutator(ai, aj)));
                worst = worst.max(max_abs(&anticommutator(ci, cj)));
            }
        }
    }
    assert!(worst <= 1e-12, "anticommutator residual {worst:.3e}");
    report(
        "1 (CAR relations, 1..6 modes)",
        t0.elapsed(),
        1.0,
        &format!("worst residual {worst:.2e}"),
    );
}

#[test]
fn acceptance_02_phi_lambda_correlators() {
    let t0 = Instant::now();
    let part = two_site();
    let amb = part.ambient().clone();
    let dim = amb.dim() as f64;
    let tau = |m: &CMat| m.trace() / cr(dim);
    let mut worst_closed: f64 = 0.0;
    let mut worst_general: f64 = 0.0;
    let mut rng = random::rng_from_seed(2024);
    for &lambda in &[-1.0, -0.5, 0.25, 0.5, 1.0] {
        let st = named::phi_lambda(&part, &PhiLambdaSpec::new(lambda)).unwrap();
        let hop = amb.creation(1).unwrap() * amb.annihilation(2).unwrap();
        let anti = amb.annihilation(1).unwrap() * amb.creation(2).unwrap();
        worst_closed = worst_closed.max((st.expect(&hop) - cr(lambda / 8.0)).norm());
        worst_closed = worst_closed.max((st.expect(&anti) + cr(lambda / 8.0)).norm());
        let k1 = amb.annihilation(1).unwrap().clone();
        let k2 = amb.annihilation(2).unwrap().clone();
        for _ in 0..100 {
            let a1 = random::subalgebra_element(part.basis_i(), &mut rng, GradeFilter::All);
            let a2 = random::subalgebra_element(part.basis_j(), &mut rng, GradeFilter::All);
            let (a1p, a1m) = amb.grade_split(&a1);
            let (a2p, a2m) = amb.grade_split(&a2);
            let base = tau(&a1p) * tau(&a2p);
            let hop_term = tau(&(k1.adjoint() * &a1m)) * tau(&(&k2 * &a2m))
                - tau(&(&k1 * &a1m)) * tau(&(k2.adjoint() * &a2m));
            worst_general = worst_general
                .max((st.expect(&(&a1 * &a2)) - (base - hop_term * cr(lambda / 2.0))).norm());
            worst_general = worst_general
                .max((st.expect(&(&a2 * &a1)) - (base + hop_term * cr(lambda / 2.0))).norm());
        }
    }
    assert!(worst_closed <= 1e-12, "closed-form residual {worst_closed:.3e}");
    assert!(worst_general <= 1e-10, "correlation residual {worst_general:.3e}");
    report(
        "2 (hopping-family correlators)",
        t0.elapsed(),
        5.0,
        &format!("closed {worst_closed:.2e}, general {worst_general:.2e}"),
    );
}

#[test]
fn acceptance_03_phi_lambda_dual_verdicts() {
    let t0 = Instant::now();
    let part = two_site();
    for k in 0..21 {
        let lambda = -1.0 + 0.1 * k as f64;
        let st = named::phi_lambda(&part, &PhiLambdaSpec::new(lambda)).unwrap();
        let ppt = ppt_check(&st, &part).unwrap();
        assert_eq!(ppt.verdict, Verdict::Separable, "lambda {lambda}");
        if let carsep::Certificate::PptSpectrum { min_eigenvalue, .. } = ppt.certificate {
            assert!(min_eigenvalue >= -1e-10);
        }
        let rep = hopping_witness(&st, &part).unwrap();
        assert!(
            (rep.max_violation - lambda.abs() / 8.0).abs() <= 1e-10,
            "lambda {lambda} violation {}",
            rep.max_violation
        );
        assert_eq!(rep.nonseparable, lambda != 0.0, "lambda {lambda}");
    }
    report(
        "3 (dual verdicts for the hopping family)",
        t0.elapsed(),
        5.0,
        "PPT separable and witness |lambda|/8 across the grid",
    );
}

#[test]
fn acceptance_04_rho_one() {
    let t0 = Instant::now();
    let part = two_site();
    let rho = named::rho_one(part.ambient()).unwrap();
    let dec = rho_one_four_term_decomposition(&part).unwrap();
    let tensor = verify_separable_decomposition(&rho, &part, &dec, Pairing::Tensor).unwrap();
    assert!(tensor.accepted && tensor.reassembly_error <= 1e-12);
    let rep = hopping_witness(&rho, &part).unwrap();
    assert!((rep.max_violation - 0.25).abs() <= 1e-12);
    for (l, r) in &dec.pairs {
        assert!(matches!(
            product_extension(&part, l, r),
            Err(Error::NoProductExtension)
        ));
    }
    report(
        "4 (two-mode mixture with hopping correlation)",
        t0.elapsed(),
        1.0,
        &format!(
            "tensor reassembly {:.1e}, witness {}, extensions rejected",
            tensor.reassembly_error, rep.max_violation
        ),
    );
}

#[test]
fn acceptance_05_asymmetric_marginal_state() {
    let t0 = Instant::now();
    let part = two_site();
    let st = named::varrho_asym(part.ambient()).unwrap();
    let s_i = st.restrict(&[1]).unwrap().entropy();
    let s_j = st.restrict(&[2]).unwrap().entropy();
    assert!(s_i <= 1e-10, "pure-side entropy {s_i:.3e}");
    assert!((s_j - LN2).abs() <= 1e-10, "mixed-side entropy {s_j}");

    let opts = RoofOptions::seeded(5);
    let avr = eof_averaged(&st, &part, &opts).unwrap().value;
    assert!((avr - 0.5 * LN2).abs() <= 1e-3, "averaged roof {avr}");

    // For this pure state the side roofs equal the side entropies: zero on
    // the side with the pure marginal and ln 2 on the side with the tracial
    // marginal.
    let e_i = eof_tensor(&st, &part, Side::I, &opts).unwrap().value;
    let e_j = eof_tensor(&st, &part, Side::J, &opts).unwrap().value;
    assert!(e_i <= 1e-3, "side-I roof {e_i:.3e}");
    assert!((e_j - LN2).abs() <= 1e-3, "side-J roof {e_j}");
    report(
        "5 (asymmetric-marginal state)",
        t0.elapsed(),
        30.0,
        &format!("entropies ({s_i:.1e}, {s_j:.6}); averaged {avr:.6}; sides ({e_i:.1e}, {e_j:.6})"),
    );
}

#[test]
fn acceptance_06_witness_vanishes_on_separable() {
    let t0 = Instant::now();
    let part = two_site();
    let mut rng = random::rng_from_seed(600);
    let mut worst: f64 = 0.0;
    for trial in 0..500 {
        let kind = if trial % 2 == 0 {
            SeparableKind::EvenFactors
        } else {
            SeparableKind::OneEvenFactor
        };
        let (state, _) = random_car_separable(&part, &mut rng, kind);
        worst = worst.max(hopping_witness(&state, &part).unwrap().max_violation);
    }
    assert!(worst < 1e-10, "violation {worst:.3e} on a separable state");
    report(
        "6 (odd-odd correlations vanish on 500 separable states)",
        t0.elapsed(),
        60.0,
        &format!("max violation {worst:.2e}"),
    );
}

#[test]
fn acceptance_07_roof_separability_round_trip() {
    let t0 = Instant::now();
    let part = two_site();
    let opts = RoofOptions::seeded(700).with_restarts(12);

    // Even separable states: superselected roof numerically zero and the
    // generating certificate accepted.
    let mut rng = random::rng_from_seed(701);
    let mut worst_roof: f64 = 0.0;
    for _ in 0..50 {
        let (state, dec) = random_car_separable(&part, &mut rng, SeparableKind::EvenFactors);
        let check = verify_separable_decomposition(&state, &part, &dec, Pairing::Car).unwrap();
        assert!(check.accepted, "generator certificate rejected");
        let roof = eof_superselected(&state, &part, &opts).unwrap().value;
        worst_roof = worst_roof.max(roof);
    }
    assert!(worst_roof <= 1e-3, "separable roof {worst_roof:.3e}");

    // States with a clear hopping violation have a clearly positive
    // averaged roof.
    let alg = part.ambient().clone();
    let mut min_roof = f64::INFINITY;
    let mut found = 0;
    let mut draw = 0u64;
    while found < 50 {
        let mut gen_rng = random::rng_from_seed(90_000 + draw);
        draw += 1;
        let rho = random::density(&mut gen_rng, alg.dim(), alg.dim());
        let st = QuantumState::from_density(&alg, rho).unwrap();
        if hopping_witness(&st, &part).unwrap().max_violation <= 1e-2 {
            continue;
        }
        found += 1;
        let roof = eof_averaged(&st, &part, &opts).unwrap().value;
        min_roof = min_roof.min(roof);
    }
    assert!(min_roof >= 1e-3, "nonseparable roof {min_roof:.3e}");
    report(
        "7 (roof round trip: 50 separable, 50 witness-violating)",
        t0.elapsed(),
        600.0,
        &format!("separable max {worst_roof:.2e}, violating min {min_roof:.2e}"),
    );
}

#[test]
fn acceptance_08_car_implies_tensor() {
    let t0 = Instant::now();
    let part = two_site();
    let opts = RoofOptions::seeded(800).with_restarts(8);
    let mut rng = random::rng_from_seed(801);
    for trial in 0..200 {
        let kind = if trial < 100 {
            SeparableKind::EvenFactors
        } else {
            SeparableKind::OneEvenFactor
        };
        let (state, dec) = random_car_separable(&part, &mut rng, kind);
        // The certificate verifies, the state is positive under partial
        // transposition, and the decision pipeline agrees.
        let check = verify_separable_decomposition(&state, &part, &dec, Pairing::Car).unwrap();
        assert!(check.accepted);
        let ppt = ppt_check(&state, &part).unwrap();
        assert_ne!(ppt.verdict, Verdict::Nonseparable, "trial {trial}");
        assert!(car_implies_tensor_check(&state, &part, &opts).unwrap());
    }
    report(
        "8 (CAR-separability implies tensor-pair separability, 200 states)",
        t0.elapsed(),
        120.0,
        "implication held on every trial",
    );
}

#[test]
fn acceptance_09_roof_inequalities() {
    let t0 = Instant::now();
    let part = two_site();
    let alg = part.ambient().clone();
    let opts = RoofOptions::seeded(900).with_restarts(12);
    let tolerance = 2e-3;

    let mut min_slack = f64::INFINITY;
    for trial in 0..100u64 {
        let mut rng = random::rng_from_seed(9000 + trial);
        let st = QuantumState::from_density(&alg, random::even_density(&alg, &mut rng)).unwrap();
        let sup = eof_superselected(&st, &part, &opts).unwrap().value;
        let avr = eof_averaged(&st, &part, &opts).unwrap().value;
        let e_i = eof_tensor(&st, &part, Side::I, &opts).unwrap().value;
        let e_j = eof_tensor(&st, &part, Side::J, &opts).unwrap().value;
        for slack in [
            avr - 0.5 * (e_i + e_j),
            sup - avr,
            sup - e_i,
            sup - e_j,
        ] {
            min_slack = min_slack.min(slack);
            assert!(slack >= -tolerance, "trial {trial} slack {slack:.4e}");
        }
    }
    for trial in 0..100u64 {
        let mut rng = random::rng_from_seed(9500 + trial);
        let st = QuantumState::from_density(&alg, random::density(&mut rng, 4, 4)).unwrap();
        let avr = eof_averaged(&st, &part, &opts).unwrap().value;
        let e_i = eof_tensor(&st, &part, Side::I, &opts).unwrap().value;
        let e_j = eof_tensor(&st, &part, Side::J, &opts).unwrap().value;
        let slack = avr - 0.5 * (e_i + e_j);
        min_slack = min_slack.min(slack);
        assert!(slack >= -tolerance, "noneven trial {trial} slack {slack:.4e}");
    }
    report(
        "9 (roof inequalities on 100 even and 100 noneven states)",
        t0.elapsed(),
        600.0,
        &format!("minimal slack {min_slack:+.3e}"),
    );
}

#[test]
fn acceptance_10_roof_against_closed_form() {
    let t0 = Instant::now();
    let part = two_site();
    let alg = part.ambient().clone();
    let opts = RoofOptions::seeded(1000).with_restarts(16);
    let mut worst: f64 = 0.0;
    for trial in 0..100u64 {
        let mut rng = random::rng_from_seed(10_000 + trial);
        let rank = 1 + (trial as usize) % 4;
        let st = QuantumState::from_density(&alg, random::density(&mut rng, 4, rank)).unwrap();
        let oracle = concurrence_eof(&st, &part).unwrap();
        let roof = eof_tensor(&st, &part, Side::I, &opts).unwrap().value;
        worst = worst.max((roof - oracle).abs());
        assert!(
            (roof - oracle).abs() <= 5e-3,
            "trial {trial}: roof {roof:.6} oracle {oracle:.6}"
        );
    }
    report(
        "10 (roof optimizer vs two-qubit closed form, 100 states)",
        t0.elapsed(),
        300.0,
        &format!("worst gap {worst:.2e}"),
    );
}

#[test]
fn acceptance_11_entropy_symmetry() {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    let mut rng = random::rng_from_seed(1100);
    for trial in 0..100 {
        let (i_labels, j_labels): (Vec<u32>, Vec<u32>) = if trial % 2 == 0 {
            (vec![1], vec![2])
        } else {
            (vec![1, 2], vec![3, 4])
        };
        let part = Partition::new(&i_labels, &j_labels).unwrap();
        let alg = part.ambient().clone();
        let v = random::even_pure_vector(&alg, &mut rng);
        let st = QuantumState::from_vector(&alg, v).unwrap();
        let m = marginal_entropies(&st, &part).unwrap();
        let values = [m.on_i, m.on_j, m.on_commutant_i, m.on_commutant_j];
        for a in 0..4 {
            for b in (a + 1)..4 {
                worst = worst.max((values[a] - values[b]).abs());
            }
        }
    }
    assert!(worst <= 1e-8, "marginal entropy spread {worst:.3e}");
    let _ = tol::OP_EQ;
    report(
        "11 (four-marginal entropy symmetry, 100 even pure states)",
        t0.elapsed(),
        10.0,
        &format!("worst pairwise spread {worst:.2e}"),
    );
}
