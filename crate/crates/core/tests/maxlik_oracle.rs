//! Both estimators against independent brute-force maximizers of the
//! log-likelihood Σ fₑ ln pₑ.

use qikse::quantum::{
    maxlik_density_matrix, maxlik_density_vector, Event, MaxLikOptions, ReducedEvent,
};
use qikse::WordId;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Maximizes over 2×2 real density matrices [[a, b], [b, 1-a]] with
/// b² ≤ a(1-a), by a grid search that is repeatedly refined around the
/// best point.
fn grid_max_2x2(loglik: impl Fn(f64, f64) -> f64) -> (f64, f64) {
    let (mut a0, mut a1, mut b0, mut b1) = (0.0, 1.0, -0.5, 0.5);
    let mut best = (0.5, 0.0, f64::NEG_INFINITY);
    for _ in 0..40 {
        let n = 200;
        for i in 0..=n {
            let a = a0 + (a1 - a0) * i as f64 / n as f64;
            if !(0.0..=1.0).contains(&a) {
                continue;
            }
            let bound = (a * (1.0 - a)).sqrt();
            for j in 0..=n {
                let b = (b0 + (b1 - b0) * j as f64 / n as f64).clamp(-bound, bound);
                let l = loglik(a, b);
                if l > best.2 {
                    best = (a, b, l);
                }
            }
        }
        let (da, db) = ((a1 - a0) / 10.0, (b1 - b0) / 10.0);
        (a0, a1, b0, b1) = (best.0 - da, best.0 + da, best.1 - db, best.1 + db);
    }
    (best.0, best.1)
}

#[test]
fn two_by_two_matches_grid_maximizer() {
    two_by_two_matches_grid_maximizer_check();
}

pub fn two_by_two_matches_grid_maximizer_check() {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let e1 = Event::elementary(WordId(0), 1.0);
    let plus = Event::superposition(&[WordId(0), WordId(1)], &[0.5, 0.5], 1.0).unwrap();
    let rho = maxlik_density_matrix(&[e1, plus], &[0.5, 0.5], &MaxLikOptions::default()).unwrap();

    // p(e1) = a, p(plus) = (a + 2b + 1 - a) / 2
    let (a, b) = grid_max_2x2(|a, b| 0.5 * a.max(1e-300).ln() + 0.5 * ((1.0 + 2.0 * b) / 2.0).max(1e-300).ln());
    assert!((rho.get(0, 0) - a).abs() <= 1e-4, "{} vs {a}", rho.get(0, 0));
    assert!((rho.get(0, 1) - b).abs() <= 1e-4, "{} vs {b}", rho.get(0, 1));
    assert!((rho.get(1, 1) - (1.0 - a)).abs() <= 1e-4);
    // The optimum is the pure state along cos(π/8) e1 + sin(π/8) e2.
    assert!((a - (1.0 + r) / 2.0).abs() <= 1e-4);
    assert!((b - r / 2.0).abs() <= 1e-4);
}

#[test]
fn random_two_by_two_instances_match_grid() {
    random_two_by_two_instances_match_grid_check();
}

pub fn random_two_by_two_instances_match_grid_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..25 {
        let s: f64 = rng.gen_range(0.1..0.9);
        let f: f64 = rng.gen_range(0.2..0.8);
        let e1 = Event::elementary(WordId(0), 1.0);
        let e2 = Event::elementary(WordId(1), 1.0);
        let k = Event::superposition(&[WordId(0), WordId(1)], &[s, 1.0 - s], 1.0).unwrap();
        let g = rng.gen_range(0.05..0.3);
        let freqs = [f * (1.0 - g), (1.0 - f) * (1.0 - g), g];
        let opts = MaxLikOptions {
            tol: 1e-12,
            max_iter: 20_000,
            prob_floor: 1e-12,
        };
        let rho = maxlik_density_matrix(&[e1, e2, k], &freqs, &opts).unwrap();
        let (x, y) = (s.sqrt(), (1.0 - s).sqrt());
        let ll = |a: f64, b: f64| {
            let pk = x * x * a + 2.0 * x * y * b + y * y * (1.0 - a);
            freqs[0] * a.max(1e-300).ln() + freqs[1] * (1.0 - a).max(1e-300).ln() + freqs[2] * pk.max(1e-300).ln()
        };
        let (a, b) = grid_max_2x2(ll);
        assert!((rho.get(0, 0) - a).abs() <= 1e-4, "case {case}: a {} vs {a}", rho.get(0, 0));
        assert!((rho.get(0, 1) - b).abs() <= 1e-4, "case {case}: b {} vs {b}", rho.get(0, 1));
    }
}

fn present(sq: &[f64]) -> ReducedEvent {
    ReducedEvent {
        sq: sq.to_vec(),
        present: true,
    }
}

/// Best point of the 1-simplex grid with step 1e-4.
fn simplex_grid(loglik: impl Fn(f64) -> f64) -> f64 {
    let mut best = (0.0, f64::NEG_INFINITY);
    for i in 0..=10_000 {
        let b = i as f64 / 10_000.0;
        let l = loglik(b);
        if l > best.1 {
            best = (b, l);
        }
    }
    best.0
}

#[test]
fn density_vector_matches_simplex_grid() {
    density_vector_matches_simplex_grid_check();
}

pub fn density_vector_matches_simplex_grid_check() {
    let beta = maxlik_density_vector(
        &[present(&[1.0, 0.0]), present(&[0.5, 0.5])],
        &[0.5, 0.5],
        &MaxLikOptions {
            tol: 1e-9,
            max_iter: 300,
            prob_floor: 1e-12,
        },
    )
    .unwrap();
    let b = simplex_grid(|b| 0.5 * b.max(1e-12).ln() + 0.5 * (0.5 * b + 0.5 * (1.0 - b)).ln());
    assert!((beta.as_slice()[0] - b).abs() <= 1e-6, "{} vs {b}", beta.as_slice()[0]);
}

#[test]
fn random_density_vectors_reach_grid_likelihood() {
    random_density_vectors_reach_grid_likelihood_check();
}

pub fn random_density_vectors_reach_grid_likelihood_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let opts = MaxLikOptions {
        tol: 1e-13,
        max_iter: 200_000,
        prob_floor: 1e-12,
    };
    for case in 0..200 {
        let n = rng.gen_range(1..=4);
        let sqs: Vec<[f64; 2]> = (0..n)
            .map(|_| {
                let x = rng.gen_range(0.0..1.0);
                [x, 1.0 - x]
            })
            .collect();
        let freqs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = freqs.iter().sum();
        let ll = |b: f64| -> f64 {
            sqs.iter()
                .zip(&freqs)
                .map(|(sq, f)| f / total * (b * sq[0] + (1.0 - b) * sq[1]).max(1e-12).ln())
                .sum()
        };
        let grid = simplex_grid(ll);
        let reduced: Vec<ReducedEvent> = sqs.iter().map(|s| present(s)).collect();
        let beta = maxlik_density_vector(&reduced, &freqs, &opts).unwrap();
        let got = beta.as_slice()[0];
        // The estimate is at least as likely as the best grid point, up to
        // the grid's own resolution.
        assert!(ll(got) >= ll(grid) - 1e-6, "case {case}: {got} vs {grid}");
        assert!((got - grid).abs() <= 1e-2, "case {case}: {got} vs {grid}");
    }
}

#[test]
fn orthogonal_events_give_their_frequencies() {
    orthogonal_events_give_their_frequencies_check();
}

pub fn orthogonal_events_give_their_frequencies_check() {
    let events = [Event::elementary(WordId(0), 3.0), Event::elementary(WordId(1), 1.0)];
    let rho = maxlik_density_matrix(&events, &[0.75, 0.25], &MaxLikOptions::default()).unwrap();
    assert!((rho.get(0, 0) - 0.75).abs() <= 1e-6);
    assert!((rho.get(1, 1) - 0.25).abs() <= 1e-6);
    assert!(rho.get(0, 1).abs() <= 1e-9);
}

#[test]
fn single_event_gives_its_projector() {
    single_event_gives_its_projector_check();
}

pub fn single_event_gives_its_projector_check() {
    let k = Event::superposition(&[WordId(2), WordId(5)], &[0.3, 0.7], 1.0).unwrap();
    let rho = maxlik_density_matrix(&[k], &[1.0], &MaxLikOptions::default()).unwrap();
    let (x, y) = (0.3f64.sqrt(), 0.7f64.sqrt());
    assert!((rho.get(0, 0) - x * x).abs() <= 1e-4);
    assert!((rho.get(0, 1) - x * y).abs() <= 1e-4);
    assert!((rho.get(1, 1) - y * y).abs() <= 1e-4);
}
