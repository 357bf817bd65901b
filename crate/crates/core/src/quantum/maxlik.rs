use super::density::{dot, quadratic_form};
use super::{DensityMatrix, DensityVector, Event, ReducedEvent, WordId};
use crate::config::Config;
use crate::error::{Error, Result};

/// Stopping rule and probability floor for the iterative estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxLikOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub prob_floor: f64,
}

impl MaxLikOptions {
    pub fn for_matrix(config: &Config) -> Self {
        MaxLikOptions {
            tol: config.rho_tol,
            max_iter: config.rho_max_iter,
            prob_floor: config.prob_floor,
        }
    }

    pub fn for_vector(config: &Config) -> Self {
        MaxLikOptions {
            tol: config.beta_tol,
            max_iter: config.beta_max_iter,
            prob_floor: config.prob_floor,
        }
    }
}

impl Default for MaxLikOptions {
    fn default() -> Self {
        MaxLikOptions {
            tol: 1e-8,
            max_iter: 500,
            prob_floor: 1e-12,
        }
    }
}

/// Per-iteration record of an estimator run.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxLikTrace {
    /// Log-likelihood of the starting point followed by one entry per
    /// accepted iteration.
    pub log_likelihoods: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn normalized_freqs(freqs: &[f64], n: usize) -> Result<Vec<f64>> {
    if freqs.len() != n {
        return Err(Error::Argument(format!("{n} events but {} frequencies", freqs.len())));
    }
    if freqs.iter().any(|f| !(*f >= 0.0) || !f.is_finite()) {
        return Err(Error::Argument("frequencies must be finite and nonnegative".into()));
    }
    let total: f64 = freqs.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Argument("frequencies sum to zero".into()));
    }
    Ok(freqs.iter().map(|f| f / total).collect())
}

/// Event kets in local coordinates, kept sparse.
struct LocalEvents {
    kets: Vec<Vec<(usize, f64)>>,
    freqs: Vec<f64>,
}

impl LocalEvents {
    fn probabilities(&self, rho: &[f64], m: usize) -> Vec<f64> {
        self.kets
            .iter()
            .map(|u| {
                let mut p = 0.0;
                for &(i, a) in u {
                    for &(j, b) in u {
                        p += a * b * rho[i * m + j];
                    }
                }
                p
            })
            .collect()
    }

    fn log_likelihood(&self, rho: &[f64], m: usize, floor: f64) -> f64 {
        self.probabilities(rho, m)
            .iter()
            .zip(&self.freqs)
            .filter(|(_, f)| **f > 0.0)
            .map(|(p, f)| f * p.max(floor).ln())
            .sum()
    }

    /// R·X with R = Σₑ cₑ|uₑ⟩⟨uₑ|.
    fn apply_r(&self, coeffs: &[f64], x: &[f64], m: usize) -> Vec<f64> {
        let mut out = vec![0.0; m * m];
        let mut row = vec![0.0; m];
        for (u, &c) in self.kets.iter().zip(coeffs) {
            if c == 0.0 {
                continue;
            }
            row.iter_mut().for_each(|r| *r = 0.0);
            for &(i, a) in u {
                let xi = &x[i * m..(i + 1) * m];
                for (r, v) in row.iter_mut().zip(xi) {
                    *r += a * v;
                }
            }
            for &(i, a) in u {
                let target = &mut out[i * m..(i + 1) * m];
                for (t, r) in target.iter_mut().zip(&row) {
                    *t += c * a * r;
                }
            }
        }
        out
    }
}

fn transpose(x: &[f64], m: usize) -> Vec<f64> {
    let mut t = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            t[j * m + i] = x[i * m + j];
        }
    }
    t
}

/// Trace-normalizes and symmetrizes in place. Returns false for a zero trace.
fn normalize(x: &mut [f64], m: usize) -> bool {
    let tr: f64 = (0..m).map(|i| x[i * m + i]).sum();
    if !(tr > 0.0) || !tr.is_finite() {
        return false;
    }
    for i in 0..m {
        for j in i..m {
            let s = 0.5 * (x[i * m + j] + x[j * m + i]) / tr;
            x[i * m + j] = s;
            x[j * m + i] = s;
        }
    }
    true
}

fn frobenius(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Σₑ fₑ ln max(Tr(ρΠₑ), floor).
pub fn density_matrix_log_likelihood(rho: &DensityMatrix, events: &[Event], freqs: &[f64], floor: f64) -> Result<f64> {
    let freqs = normalized_freqs(freqs, events.len())?;
    Ok(events
        .iter()
        .zip(&freqs)
        .filter(|(_, f)| **f > 0.0)
        .map(|(e, f)| f * quadratic_form(rho, &rho.local_ket(e)).max(floor).ln())
        .sum())
}

/// Maximum-likelihood density matrix over the span of the events.
pub fn maxlik_density_matrix(events: &[Event], freqs: &[f64], opts: &MaxLikOptions) -> Result<DensityMatrix> {
    maxlik_density_matrix_traced(events, freqs, opts).map(|(rho, _)| rho)
}

/// RρR iteration with a diluted fallback.
///
/// Each step tries ρ' = N[RρR] first. When that would lower the likelihood
/// it falls back to N[(I+εR)ρ(I+εR)] with ε halved from 1 until the
/// likelihood does not drop, so the likelihood sequence is monotone.
pub fn maxlik_density_matrix_traced(
    events: &[Event],
    freqs: &[f64],
    opts: &MaxLikOptions,
) -> Result<(DensityMatrix, MaxLikTrace)> {
    if events.is_empty() {
        return Err(Error::Argument("no events to estimate from".into()));
    }
    let freqs = normalized_freqs(freqs, events.len())?;
    let mut basis: Vec<WordId> = events
        .iter()
        .flat_map(|e| e.ket.components().iter().map(|&(w, _)| w))
        .collect();
    basis.sort();
    basis.dedup();
    let m = basis.len();
    let local = LocalEvents {
        kets: events
            .iter()
            .map(|e| {
                e.ket
                    .components()
                    .iter()
                    .map(|&(w, a)| (basis.binary_search(&w).expect("word in basis"), a))
                    .collect()
            })
            .collect(),
        freqs,
    };

    let mut rho = DensityMatrix::maximally_mixed(basis.clone())?.entries().to_vec();
    let mut ll = local.log_likelihood(&rho, m, opts.prob_floor);
    let mut trace = MaxLikTrace {
        log_likelihoods: vec![ll],
        iterations: 0,
        converged: false,
    };

    while trace.iterations < opts.max_iter {
        let probs = local.probabilities(&rho, m);
        let coeffs: Vec<f64> = probs
            .iter()
            .zip(&local.freqs)
            .map(|(p, f)| f / p.max(opts.prob_floor))
            .collect();
        // A = Rρ, so ρR = Aᵀ and RρR = R·Aᵀ.
        let a = local.apply_r(&coeffs, &rho, m);
        let at = transpose(&a, m);
        let b = local.apply_r(&coeffs, &at, m);

        let mut next = None;
        let mut candidate = b.clone();
        if normalize(&mut candidate, m) {
            let cand_ll = local.log_likelihood(&candidate, m, opts.prob_floor);
            if cand_ll >= ll {
                next = Some((candidate, cand_ll));
            }
        }
        let mut eps = 1.0;
        while next.is_none() && eps >= 1e-12 {
            let mut candidate: Vec<f64> = (0..m * m)
                .map(|k| rho[k] + eps * (a[k] + at[k]) + eps * eps * b[k])
                .collect();
            if normalize(&mut candidate, m) {
                let cand_ll = local.log_likelihood(&candidate, m, opts.prob_floor);
                if cand_ll >= ll {
                    next = Some((candidate, cand_ll));
                }
            }
            eps *= 0.5;
        }
        let Some((candidate, cand_ll)) = next else {
            // No step improves the likelihood: ρ is stationary.
            trace.converged = true;
            break;
        };
        trace.iterations += 1;
        let delta = frobenius(&candidate, &rho);
        rho = candidate;
        ll = cand_ll;
        trace.log_likelihoods.push(ll);
        if delta <= opts.tol {
            trace.converged = true;
            break;
        }
    }
    if !trace.converged {
        log::debug!("density matrix estimate stopped after {} iterations", trace.iterations);
    }
    Ok((DensityMatrix::from_entries(basis, rho)?, trace))
}

fn present_events(reduced: &[ReducedEvent], freqs: &[f64]) -> Result<(Vec<Vec<f64>>, Vec<f64>, usize)> {
    if reduced.len() != freqs.len() {
        return Err(Error::Argument(format!(
            "{} events but {} frequencies",
            reduced.len(),
            freqs.len()
        )));
    }
    let h = reduced.first().map_or(0, |r| r.sq.len());
    if reduced.iter().any(|r| r.sq.len() != h) {
        return Err(Error::Argument("reduced events differ in length".into()));
    }
    let mut sqs = Vec::new();
    let mut fs = Vec::new();
    for (r, &f) in reduced.iter().zip(freqs) {
        if r.present && f > 0.0 {
            sqs.push(r.sq.clone());
            fs.push(f);
        }
    }
    if sqs.is_empty() || h == 0 {
        return Err(Error::NoOverlap);
    }
    let fs = normalized_freqs(&fs, sqs.len())?;
    Ok((sqs, fs, h))
}

/// Σₑ fₑ ln max(β·sqₑ, floor) over present events.
pub fn density_vector_log_likelihood(
    beta: &DensityVector,
    reduced: &[ReducedEvent],
    freqs: &[f64],
    floor: f64,
) -> Result<f64> {
    let (sqs, fs, h) = present_events(reduced, freqs)?;
    if beta.len() != h {
        return Err(Error::Argument("density vector length mismatch".into()));
    }
    Ok(sqs
        .iter()
        .zip(&fs)
        .map(|(sq, f)| f * dot(beta.as_slice(), sq).max(floor).ln())
        .sum())
}

/// Maximum-likelihood diagonal density from rotated events.
///
/// Absent events are ignored; if none is present the candidate has no
/// overlap with the query.
pub fn maxlik_density_vector(reduced: &[ReducedEvent], freqs: &[f64], opts: &MaxLikOptions) -> Result<DensityVector> {
    maxlik_density_vector_traced(reduced, freqs, opts).map(|(b, _)| b)
}

pub fn maxlik_density_vector_traced(
    reduced: &[ReducedEvent],
    freqs: &[f64],
    opts: &MaxLikOptions,
) -> Result<(DensityVector, MaxLikTrace)> {
    let (sqs, fs, h) = present_events(reduced, freqs)?;
    let ll_of = |beta: &[f64]| -> f64 {
        sqs.iter()
            .zip(&fs)
            .map(|(sq, f)| f * dot(beta, sq).max(opts.prob_floor).ln())
            .sum()
    };
    let mut beta = vec![1.0 / h as f64; h];
    let mut trace = MaxLikTrace {
        log_likelihoods: vec![ll_of(&beta)],
        iterations: 0,
        converged: false,
    };
    while trace.iterations < opts.max_iter {
        let mut next = vec![0.0; h];
        for (sq, f) in sqs.iter().zip(&fs) {
            let p = dot(&beta, sq).max(opts.prob_floor);
            for j in 0..h {
                next[j] += f * sq[j] / p;
            }
        }
        for j in 0..h {
            next[j] *= beta[j];
        }
        // Exact arithmetic keeps Σβ = 1; remove rounding drift.
        let sum: f64 = next.iter().sum();
        debug_assert!((sum - 1.0).abs() < 1e-6, "EM step lost mass: {sum}");
        next.iter_mut().for_each(|b| *b /= sum);
        let delta: f64 = next.iter().zip(&beta).map(|(a, b)| (a - b).abs()).sum();
        beta = next;
        trace.iterations += 1;
        trace.log_likelihoods.push(ll_of(&beta));
        if delta <= opts.tol {
            trace.converged = true;
            break;
        }
    }
    Ok((DensityVector::new(beta)?, trace))
}
