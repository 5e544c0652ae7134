#![allow(dead_code)]

use faer::Mat;
use qsd::hermitian::{c64, HermitianMatrix};
use qsd::{Dataset, FeatureVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn mat_diff(a: &Mat<c64>, b: &Mat<c64>) -> f64 {
    qsd::hermitian::max_abs_diff(a.as_ref(), b.as_ref())
}

pub fn herm_diff(a: &Mat<c64>, b: &HermitianMatrix) -> f64 {
    qsd::hermitian::max_abs_diff(a.as_ref(), b.as_mat())
}

/// Max deviation of `m` from its own adjoint.
pub fn asymmetry(m: &Mat<c64>) -> f64 {
    mat_diff(m, &m.adjoint().to_owned())
}

/// Random labelled dataset with `classes` classes, `d` features in [-2, 2] and
/// between `min_per_class` and `max_per_class` points per class.
pub fn random_dataset<R: Rng>(
    rng: &mut R,
    classes: usize,
    d: usize,
    min_per_class: usize,
    max_per_class: usize,
) -> Dataset {
    let mut points = Vec::new();
    for label in 1..=classes {
        let k = rng.gen_range(min_per_class..=max_per_class);
        for _ in 0..k {
            let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
            points.push(FeatureVector::labeled(v, label).unwrap());
        }
    }
    Dataset::new(points, classes).unwrap()
}
