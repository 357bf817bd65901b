//! Randomized invariants of the quantum numerics, 1000+ cases each.

mod common;

use common::*;
use qikse::quantum::{
    eigendecompose, maxlik_density_matrix_traced, maxlik_density_vector_traced, pca_truncate, reduce_event,
    trace_probability, vector_probability, vnd_full, vnd_score, DensityVector, EigenSystem, Event, MaxLikOptions,
    ReducedEvent,
};
use qikse::StatementId;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CASES: usize = 1000;

#[test]
fn density_matrix_estimates_are_valid_and_monotone() {
    density_matrix_estimates_are_valid_and_monotone_check();
}

pub fn density_matrix_estimates_are_valid_and_monotone_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let opts = MaxLikOptions::default();
    for case in 0..CASES {
        let m = rng.gen_range(1..=6);
        let (events, freqs) = random_events(&mut rng, m);
        let (rho, trace) = maxlik_density_matrix_traced(&events, &freqs, &opts).unwrap();
        let mut asym = 0.0f64;
        for i in 0..rho.dim() {
            for j in 0..rho.dim() {
                asym = asym.max((rho.get(i, j) - rho.get(j, i)).abs());
            }
        }
        assert!(asym <= 1e-12, "case {case}: asymmetry {asym}");
        assert!((rho.trace() - 1.0).abs() <= 1e-9, "case {case}: trace {}", rho.trace());
        let min = min_eigenvalue(&rho);
        assert!(min >= -1e-10, "case {case}: eigenvalue {min}");
        for w in trace.log_likelihoods.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "case {case}: {} -> {}", w[0], w[1]);
        }
    }
}

fn random_reduced(rng: &mut ChaCha8Rng, h: usize) -> ReducedEvent {
    if rng.gen_bool(0.1) {
        return ReducedEvent {
            sq: vec![0.0; h],
            present: false,
        };
    }
    let raw: Vec<f64> = (0..h)
        .map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..1.0) })
        .collect();
    let total: f64 = raw.iter().sum();
    if total == 0.0 {
        let mut sq = vec![0.0; h];
        sq[rng.gen_range(0..h)] = 1.0;
        return ReducedEvent { sq, present: true };
    }
    ReducedEvent {
        sq: raw.iter().map(|x| x / total).collect(),
        present: true,
    }
}

#[test]
fn density_vector_estimates_are_valid_and_monotone() {
    density_vector_estimates_are_valid_and_monotone_check();
}

pub fn density_vector_estimates_are_valid_and_monotone_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let opts = MaxLikOptions {
        tol: 1e-9,
        max_iter: 300,
        prob_floor: 1e-12,
    };
    let mut checked = 0;
    while checked < CASES {
        let h = rng.gen_range(1..=6);
        let n = rng.gen_range(1..=6);
        let reduced: Vec<ReducedEvent> = (0..n).map(|_| random_reduced(&mut rng, h)).collect();
        let freqs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
        if !reduced.iter().any(|r| r.present) {
            assert!(maxlik_density_vector_traced(&reduced, &freqs, &opts).is_err());
            continue;
        }
        let (beta, trace) = maxlik_density_vector_traced(&reduced, &freqs, &opts).unwrap();
        assert!(beta.as_slice().iter().all(|b| *b >= 0.0));
        assert!((beta.as_slice().iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        for w in trace.log_likelihoods.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "{} -> {}", w[0], w[1]);
        }
        checked += 1;
    }
}

#[test]
fn jacobi_reconstructs_and_is_orthonormal() {
    jacobi_reconstructs_and_is_orthonormal_check();
}

pub fn jacobi_reconstructs_and_is_orthonormal_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..CASES {
        let m = rng.gen_range(1..=8);
        let r = rng.gen_range(1..=m);
        let rho = random_density(&mut rng, m, r);
        let es = eigendecompose(&rho).unwrap();
        assert!((es.values.iter().sum::<f64>() - 1.0).abs() <= 1e-8);
        assert!(es.values.windows(2).all(|w| w[0] >= w[1]), "case {case}");
        assert!(es.values.iter().all(|v| *v >= 0.0));
        let rec = es.reconstruct();
        let err = rec
            .iter()
            .zip(rho.entries())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(err <= 1e-8, "case {case}: reconstruction {err}");
        for i in 0..m {
            for j in 0..m {
                let d: f64 = es.vectors[i].iter().zip(&es.vectors[j]).map(|(a, b)| a * b).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((d - want).abs() <= 1e-8, "case {case}: <v{i}|v{j}> = {d}");
            }
        }
    }
}

#[test]
fn trace_and_vector_probabilities_agree_untruncated() {
    trace_and_vector_probabilities_agree_untruncated_check();
}

pub fn trace_and_vector_probabilities_agree_untruncated_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    while checked < CASES {
        let m = rng.gen_range(1..=6);
        let rho = random_density(&mut rng, m, m);
        let es = eigendecompose(&rho).unwrap();
        let ds = pca_truncate(&es, 1.0, StatementId(0)).unwrap();
        if ds.h < m {
            continue;
        }
        let event = random_event(&mut rng, rho.basis());
        let eq1 = trace_probability(&rho, &event);
        let eq6 = vector_probability(&ds.val, &reduce_event(&event, &ds)).unwrap();
        assert!((eq1 - eq6).abs() <= 1e-10, "{eq1} vs {eq6}");
        checked += 1;
    }
}

#[test]
fn diagonal_density_probabilities_agree() {
    diagonal_density_probabilities_agree_check();
}

pub fn diagonal_density_probabilities_agree_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..CASES {
        let m = rng.gen_range(1..=6);
        let raw: Vec<f64> = (0..m).map(|_| rng.gen_range(0.01..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let diag: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let mut entries = vec![0.0; m * m];
        for i in 0..m {
            entries[i * m + i] = diag[i];
        }
        let rho = qikse::quantum::DensityMatrix::new(basis(m), entries).unwrap();
        let event = random_event(&mut rng, rho.basis());
        let sq: Vec<f64> = rho.basis().iter().map(|w| event.ket.amplitude(*w).powi(2)).collect();
        let beta = DensityVector::new(diag).unwrap();
        let p6 = vector_probability(&beta, &ReducedEvent { sq, present: true }).unwrap();
        assert!((trace_probability(&rho, &event) - p6).abs() <= 1e-10);
    }
}

/// Candidate orderings by the full and diagonal divergence forms, each
/// query density expressed in its candidate's eigenbasis.
#[test]
fn full_and_diagonal_divergence_rank_alike() {
    full_and_diagonal_divergence_rank_alike_check();
}

pub fn full_and_diagonal_divergence_rank_alike_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let opts = MaxLikOptions {
        tol: 1e-9,
        max_iter: 300,
        prob_floor: 1e-12,
    };
    for case in 0..CASES {
        let m = rng.gen_range(2..=5);
        let words = basis(m);
        let query: Vec<Event> = (0..rng.gen_range(1..=4)).map(|_| random_event(&mut rng, &words)).collect();
        let freqs = vec![1.0 / query.len() as f64; query.len()];
        let mut by_full = Vec::new();
        let mut by_diag = Vec::new();
        for c in 0..rng.gen_range(2..=6) {
            let es_c = eigendecompose(&random_density(&mut rng, m, m)).unwrap();
            let ds = pca_truncate(&es_c, 1.0, StatementId(c)).unwrap();
            let reduced: Vec<ReducedEvent> = query.iter().map(|e| reduce_event(e, &ds)).collect();
            let beta = qikse::quantum::maxlik_density_vector(&reduced, &freqs, &opts).unwrap();
            let es_q = EigenSystem {
                basis: es_c.basis.clone(),
                values: beta.as_slice().to_vec(),
                vectors: es_c.vectors[..ds.h].to_vec(),
            };
            let full = vnd_full(&es_q, &es_c);
            let diag = vnd_score(&beta, &ds.val).unwrap();
            assert!((full - diag).abs() <= 1e-9, "case {case}: {full} vs {diag}");
            by_full.push((full, c));
            by_diag.push((diag, c));
        }
        by_full.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        by_diag.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let order = |v: &[(f64, u32)]| v.iter().map(|x| x.1).collect::<Vec<_>>();
        // Orderings may only differ between candidates whose scores tie.
        if order(&by_full) != order(&by_diag) {
            for (a, b) in by_full.iter().zip(&by_diag) {
                assert!((a.0 - b.0).abs() <= 1e-9, "case {case}");
            }
        }
    }
}

#[test]
fn full_divergence_is_rotation_invariant() {
    full_divergence_is_rotation_invariant_check();
}

pub fn full_divergence_is_rotation_invariant_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..CASES {
        let m = rng.gen_range(1..=6);
        let r = rng.gen_range(1..=m);
        let es_q = eigendecompose(&random_density(&mut rng, m, r)).unwrap();
        let es_c = eigendecompose(&random_density(&mut rng, m, m)).unwrap();
        let q = random_orthogonal(&mut rng, m);
        let rotate = |es: &EigenSystem| EigenSystem {
            basis: es.basis.clone(),
            values: es.values.clone(),
            vectors: es
                .vectors
                .iter()
                .map(|v| (0..m).map(|i| (0..m).map(|j| q[i][j] * v[j]).sum()).collect())
                .collect(),
        };
        let before = vnd_full(&es_q, &es_c);
        let after = vnd_full(&rotate(&es_q), &rotate(&es_c));
        assert!((before - after).abs() <= 1e-9, "{before} vs {after}");
    }
}

#[test]
fn shared_eigenvectors_collapse_full_divergence() {
    shared_eigenvectors_collapse_full_divergence_check();
}

pub fn shared_eigenvectors_collapse_full_divergence_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..CASES {
        let m = rng.gen_range(1..=6);
        let es_c = eigendecompose(&random_density(&mut rng, m, m)).unwrap();
        let raw: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let beta: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let es_q = EigenSystem {
            basis: es_c.basis.clone(),
            values: beta.clone(),
            vectors: es_c.vectors.clone(),
        };
        let val = DensityVector::new(es_c.values.iter().map(|v| v / es_c.values.iter().sum::<f64>()).collect()).unwrap();
        let diag = vnd_score(&DensityVector::new(beta).unwrap(), &val).unwrap();
        assert!((vnd_full(&es_q, &es_c) - diag).abs() <= 1e-10);
        let self_score: f64 = es_c.values.iter().map(|l| l * l.max(1e-12).ln()).sum();
        assert!((vnd_full(&es_c, &es_c) - self_score).abs() <= 1e-10);
    }
}

#[test]
fn pca_truncation_is_minimal() {
    pca_truncation_is_minimal_check();
}

pub fn pca_truncation_is_minimal_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for case in 0..CASES {
        let m = rng.gen_range(1..=10);
        let mut raw: Vec<f64> = (0..m)
            .map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..1.0) })
            .collect();
        raw[0] += 0.01;
        raw.sort_by(|a, b| b.total_cmp(a));
        let total: f64 = raw.iter().sum();
        let values: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let es = EigenSystem {
            basis: basis(m),
            values: values.clone(),
            vectors: (0..m)
                .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        };
        let tau = if rng.gen_bool(0.1) { 1.0 } else { rng.gen_range(0.01..1.0) };
        let ds = pca_truncate(&es, tau, StatementId(0)).unwrap();
        let mass = |h: usize| values[..h].iter().sum::<f64>();
        assert!(mass(ds.h) >= tau - 1e-12, "case {case}");
        assert!(ds.h == 1 || mass(ds.h - 1) < tau, "case {case}");
        assert!(ds.val.as_slice().iter().all(|v| *v > 0.0));
        assert!((ds.val.as_slice().iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        if tau == 1.0 {
            assert_eq!(ds.h, values.iter().filter(|v| **v > 0.0).count());
        }
    }
}
