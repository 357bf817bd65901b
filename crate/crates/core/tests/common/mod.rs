#![allow(dead_code)]

use qikse::quantum::{DensityMatrix, Event};
use qikse::WordId;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn basis(m: usize) -> Vec<WordId> {
    (0..m as u32).map(|i| WordId(i * 3 + 1)).collect()
}

/// A random event over `words`: a single word or a positive superposition
/// of two or three of them.
pub fn random_event(rng: &mut ChaCha8Rng, words: &[WordId]) -> Event {
    let weight = rng.gen_range(1..=4) as f64;
    if words.len() < 2 || rng.gen_bool(0.5) {
        return Event::elementary(*words.choose(rng).unwrap(), weight);
    }
    let p = rng.gen_range(2..=words.len().min(3));
    let chosen: Vec<WordId> = words.choose_multiple(rng, p).copied().collect();
    let raw: Vec<f64> = (0..p).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let sigma_sq: Vec<f64> = raw.iter().map(|x| x / total).collect();
    Event::superposition(&chosen, &sigma_sq, weight).unwrap()
}

pub fn random_events(rng: &mut ChaCha8Rng, m: usize) -> (Vec<Event>, Vec<f64>) {
    let words = basis(m);
    let n = rng.gen_range(1..=8);
    let mut events: Vec<Event> = (0..n).map(|_| random_event(rng, &words)).collect();
    // Make sure every basis word is touched so the estimate spans them all.
    for &w in &words {
        if !events.iter().any(|e| e.ket.amplitude(w) != 0.0) {
            events.push(Event::elementary(w, 1.0));
        }
    }
    let total: f64 = events.iter().map(|e| e.weight).sum();
    let freqs = events.iter().map(|e| e.weight / total).collect();
    (events, freqs)
}

/// AAᵀ / tr(AAᵀ) with A of shape m×r; rank ≤ r.
pub fn random_density(rng: &mut ChaCha8Rng, m: usize, r: usize) -> DensityMatrix {
    let a: Vec<f64> = (0..m * r).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut rho = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            rho[i * m + j] = (0..r).map(|k| a[i * r + k] * a[j * r + k]).sum();
        }
    }
    let tr: f64 = (0..m).map(|i| rho[i * m + i]).sum();
    rho.iter_mut().for_each(|x| *x /= tr);
    DensityMatrix::from_entries(basis(m), rho).unwrap()
}

/// Random orthogonal matrix (rows orthonormal) by Gram-Schmidt.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, m: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    while rows.len() < m {
        let mut v: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for r in &rows {
            let d: f64 = v.iter().zip(r).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(r).for_each(|(a, b)| *a -= d * b);
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 {
            rows.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    rows
}

pub fn min_eigenvalue(rho: &DensityMatrix) -> f64 {
    // Jacobi on a copy that skips the clamp so negative values show.
    let m = rho.dim();
    let mut a = rho.entries().to_vec();
    for _ in 0..100 {
        let mut off = 0.0;
        for p in 0..m {
            for q in p + 1..m {
                off += a[p * m + q] * a[p * m + q];
                if a[p * m + q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * m + q] - a[p * m + p]) / (2.0 * a[p * m + q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let (x, y) = (a[k * m + p], a[k * m + q]);
                    a[k * m + p] = c * x - s * y;
                    a[k * m + q] = s * x + c * y;
                }
                for k in 0..m {
                    let (x, y) = (a[p * m + k], a[q * m + k]);
                    a[p * m + k] = c * x - s * y;
                    a[q * m + k] = s * x + c * y;
                }
            }
        }
        if off < 1e-30 {
            break;
        }
    }
    (0..m).map(|i| a[i * m + i]).fold(f64::INFINITY, f64::min)
}
