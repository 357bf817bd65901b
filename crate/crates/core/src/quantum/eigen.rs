use std::cmp::Ordering;

use super::{tol, DensityMatrix, WordId};
use crate::error::{Error, Result};

const OFF_DIAGONAL_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;
/// Eigenvalues closer than this are treated as tied when ordering.
const TIE: f64 = 1e-12;

/// Eigenvalues in descending order with orthonormal eigenvectors in the
/// local basis of the matrix they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub basis: Vec<WordId>,
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl EigenSystem {
    /// Σλᵢ vᵢvᵢᵀ, row-major.
    pub fn reconstruct(&self) -> Vec<f64> {
        let m = self.basis.len();
        let mut out = vec![0.0; m * m];
        for (lambda, v) in self.values.iter().zip(&self.vectors) {
            for i in 0..m {
                if v[i] == 0.0 {
                    continue;
                }
                for j in 0..m {
                    out[i * m + j] += lambda * v[i] * v[j];
                }
            }
        }
        out
    }
}

/// Cyclic Jacobi diagonalization of a symmetric matrix.
///
/// Eigenvectors are sign-normalized so their first nonzero component is
/// positive; equal eigenvalues are ordered lexicographically by vector.
pub fn eigendecompose(rho: &DensityMatrix) -> Result<EigenSystem> {
    let asym = rho.max_asymmetry();
    if asym > tol::SYMMETRY {
        return Err(Error::Invariant(format!("matrix asymmetry {asym:e}")));
    }
    let m = rho.dim();
    let mut a = rho.entries().to_vec();
    // Use the exact symmetric part so rotations stay consistent.
    for i in 0..m {
        for j in i + 1..m {
            let s = 0.5 * (a[i * m + j] + a[j * m + i]);
            a[i * m + j] = s;
            a[j * m + i] = s;
        }
    }
    let mut v = vec![0.0; m * m];
    for i in 0..m {
        v[i * m + i] = 1.0;
    }

    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    s += a[i * m + j] * a[i * m + j];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&a) > OFF_DIAGONAL_TOL {
        if sweeps == MAX_SWEEPS {
            return Err(Error::Invariant(format!(
                "Jacobi did not converge in {MAX_SWEEPS} sweeps"
            )));
        }
        sweeps += 1;
        for p in 0..m {
            for q in p + 1..m {
                let apq = a[p * m + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * m + p];
                let aqq = a[q * m + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
                a[p * m + q] = 0.0;
                a[q * m + p] = 0.0;
                for k in 0..m {
                    let vkp = v[k * m + p];
                    let vkq = v[k * m + q];
                    v[k * m + p] = c * vkp - s * vkq;
                    v[k * m + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(m);
    for j in 0..m {
        let mut lambda = a[j * m + j];
        if lambda < 0.0 {
            if lambda > -tol::PSD {
                lambda = 0.0;
            } else {
                return Err(Error::Invariant(format!("negative eigenvalue {lambda:e}")));
            }
        }
        let mut vec: Vec<f64> = (0..m).map(|k| v[k * m + j]).collect();
        if let Some(first) = vec.iter().copied().find(|x| *x != 0.0) {
            if first < 0.0 {
                vec.iter_mut().for_each(|x| *x = -*x);
            }
        }
        pairs.push((lambda, vec));
    }
    order_pairs(&mut pairs);

    let (values, vectors) = pairs.into_iter().unzip();
    Ok(EigenSystem {
        basis: rho.basis().to_vec(),
        values,
        vectors,
    })
}

/// Descending by value; runs of near-equal values are ordered by vector.
fn order_pairs(pairs: &mut [(f64, Vec<f64>)]) {
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end - 1].0 - pairs[end].0 <= TIE {
            end += 1;
        }
        // Values in a run agree to within TIE; keep them descending and
        // order only the vectors.
        let values: Vec<f64> = pairs[start..end].iter().map(|p| p.0).collect();
        pairs[start..end].sort_by(|a, b| lexicographic_desc(&a.1, &b.1));
        for (p, v) in pairs[start..end].iter_mut().zip(values) {
            p.0 = v;
        }
        start = end;
    }
}

/// Vectors with larger leading components come first.
fn lexicographic_desc(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match y.total_cmp(x) {
            Ordering::Equal => continue,
            ord => return ord,
        }
    }
    Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(m: u32, entries: Vec<f64>) -> DensityMatrix {
        DensityMatrix::from_entries((0..m).map(WordId).collect(), entries).unwrap()
    }

    #[test]
    fn diagonal_input() {
        let es = eigendecompose(&matrix(2, vec![0.25, 0.0, 0.0, 0.75])).unwrap();
        assert_eq!(es.values, vec![0.75, 0.25]);
        assert_eq!(es.vectors, vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn uniform_superposition_spectrum() {
        let es = eigendecompose(&matrix(2, vec![0.5, 0.5, 0.5, 0.5])).unwrap();
        assert!((es.values[0] - 1.0).abs() < 1e-12);
        assert!(es.values[1].abs() < 1e-12);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((es.vectors[0][0] - r).abs() < 1e-12);
        assert!((es.vectors[0][1] - r).abs() < 1e-12);
    }

    #[test]
    fn ties_are_deterministic() {
        let es = eigendecompose(&matrix(3, vec![
            1.0 / 3.0, 0.0, 0.0, 0.0, 1.0 / 3.0, 0.0, 0.0, 0.0, 1.0 / 3.0,
        ]))
        .unwrap();
        assert_eq!(
            es.vectors,
            vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]
        );
    }

    #[test]
    fn rejects_asymmetric() {
        assert!(eigendecompose(&matrix(2, vec![0.5, 0.2, 0.1, 0.5])).is_err());
    }

    #[test]
    fn clamps_tiny_negative() {
        let es = eigendecompose(&matrix(2, vec![1.0, 0.0, 0.0, -1e-11])).unwrap();
        assert_eq!(es.values, vec![1.0, 0.0]);
        assert!(eigendecompose(&matrix(2, vec![1.0, 0.0, 0.0, -1e-6])).is_err());
    }
}
