//! Seeded generators for random states, Hermitian matrices and ensembles.
//!
//! Pure states come from normalized standard complex Gaussian vectors; mixed
//! states are uniform mixtures of `k` such pure states.

use faer::Mat;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::discrimination::Ensemble;
use crate::hermitian::{c64, DensityMatrix, HermitianMatrix};

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<c64> {
    (0..dim)
        .map(|_| {
            c64::new(
                StandardNormal.sample(&mut *rng),
                StandardNormal.sample(&mut *rng),
            )
        })
        .collect()
}

pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    loop {
        let v = gaussian_vector(rng, dim);
        if let Ok(rho) = DensityMatrix::pure(&v) {
            return rho;
        }
    }
}

/// Uniform mixture of `k` random pure states, rank `min(k, dim)` almost surely.
pub fn mixed_state<R: Rng + ?Sized>(rng: &mut R, dim: usize, k: usize) -> DensityMatrix {
    let pure: Vec<DensityMatrix> = (0..k.max(1)).map(|_| pure_state(rng, dim)).collect();
    DensityMatrix::uniform_mixture(&pure).expect("equal dimensions")
}

/// Random unitary: Gram–Schmidt over Gaussian vectors, stored as columns.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Mat<c64> {
    let mut cols: Vec<Vec<c64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v = gaussian_vector(rng, dim);
        for u in &cols {
            let dot: c64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= dot * ui;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    Mat::from_fn(dim, dim, |j, c| cols[c][j])
}

/// `V diag(λ) V†` with a random unitary `V`.
pub fn hermitian_with_spectrum<R: Rng + ?Sized>(rng: &mut R, spectrum: &[f64]) -> HermitianMatrix {
    let n = spectrum.len();
    let v = unitary(rng, n);
    let scaled = Mat::from_fn(n, n, |j, c| v[(j, c)] * spectrum[c]);
    HermitianMatrix::hermitian_part(&scaled * v.adjoint())
}

/// Random Hermitian matrix of the given rank with eigenvalues in `[-2, 2]`
/// bounded away from zero (`|λ| >= 0.1`).
pub fn hermitian_of_rank<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> HermitianMatrix {
    let spectrum: Vec<f64> = (0..dim)
        .map(|i| {
            if i < rank {
                let mag: f64 = rng.gen_range(0.1..2.0);
                if rng.gen_bool(0.5) {
                    mag
                } else {
                    -mag
                }
            } else {
                0.0
            }
        })
        .collect();
    hermitian_with_spectrum(rng, &spectrum)
}

/// Random PSD matrix of the given rank with nonzero eigenvalues in `[0.1, 2]`.
pub fn psd_of_rank<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> HermitianMatrix {
    let spectrum: Vec<f64> = (0..dim)
        .map(|i| {
            if i < rank {
                rng.gen_range(0.1..2.0)
            } else {
                0.0
            }
        })
        .collect();
    hermitian_with_spectrum(rng, &spectrum)
}

/// Ensemble of `classes` random mixed states (each a mixture of 1..=`max_mix`
/// pure states) with uniform priors.
pub fn uniform_ensemble<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    classes: usize,
    max_mix: usize,
) -> Ensemble {
    let states: Vec<DensityMatrix> = (0..classes)
        .map(|_| {
            let k = rng.gen_range(1..=max_mix.max(1));
            mixed_state(rng, dim, k)
        })
        .collect();
    Ensemble::uniform(states).expect("valid random ensemble")
}

/// Like [`uniform_ensemble`] but with random priors drawn from `[0.05, 1)` and normalized.
pub fn weighted_ensemble<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    classes: usize,
    max_mix: usize,
) -> Ensemble {
    let weights: Vec<f64> = (0..classes).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let entries = weights
        .iter()
        .map(|w| {
            let k = rng.gen_range(1..=max_mix.max(1));
            (w / total, mixed_state(rng, dim, k))
        })
        .collect();
    Ensemble::new(entries).expect("valid random ensemble")
}
