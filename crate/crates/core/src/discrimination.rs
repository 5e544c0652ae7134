//! Quantum state discrimination: ensembles, measurements, the Helstrom
//! measurement for two states and the pretty good measurement for any number.

use faer::Mat;

use crate::error::{Error, Result};
use crate::hermitian::{
    c64, check_same_dim, eig_hermitian, trace_norm, DensityMatrix, HermitianMatrix, PSD_TOL,
};

/// Tolerance on `Σ p_i = 1`.
pub const PRIOR_SUM_TOL: f64 = 1e-10;
/// Tolerance on effect bounds `0 <= E <= I` and on `Σ E_i = I`.
pub const EFFECT_TOL: f64 = 1e-9;
/// Eigenvalues of the Helstrom observable at or below this go to `P₋`.
pub const DEFAULT_EIG_TOL: f64 = 1e-10;
/// `tr(P_ker(σ))` below this marks the average state as full rank.
pub const FULL_RANK_TOL: f64 = 1e-9;

fn validate_priors(priors: &[f64]) -> Result<()> {
    if let Some(p) = priors
        .iter()
        .find(|p| !p.is_finite() || **p <= 0.0 || **p > 1.0)
    {
        return Err(Error::InvalidPriors(format!("prior {p} outside (0, 1]")));
    }
    let sum: f64 = priors.iter().sum();
    if (sum - 1.0).abs() > PRIOR_SUM_TOL {
        return Err(Error::InvalidPriors(format!("priors sum to {sum}")));
    }
    Ok(())
}

/// A set of states with a priori probabilities, `{(p_1, ρ_1), …, (p_ℓ, ρ_ℓ)}`.
#[derive(Clone, Debug)]
pub struct Ensemble {
    entries: Vec<(f64, DensityMatrix)>,
}

impl Ensemble {
    /// Needs at least two states of equal dimension and strictly positive
    /// priors summing to one.
    pub fn new(entries: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::TooFewClasses {
                found: entries.len(),
            });
        }
        let priors: Vec<f64> = entries.iter().map(|(p, _)| *p).collect();
        validate_priors(&priors)?;
        let dim = entries[0].1.dim();
        for (_, s) in &entries {
            check_same_dim(dim, s.dim())?;
        }
        Ok(Self { entries })
    }

    pub fn uniform(states: Vec<DensityMatrix>) -> Result<Self> {
        let w = 1.0 / states.len() as f64;
        Self::new(states.into_iter().map(|s| (w, s)).collect())
    }

    pub fn entries(&self) -> &[(f64, DensityMatrix)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.entries[0].1.dim()
    }

    pub fn priors(&self) -> Vec<f64> {
        self.entries.iter().map(|(p, _)| *p).collect()
    }

    /// `σ = Σ p_i ρ_i`.
    pub fn average_state(&self) -> HermitianMatrix {
        let n = self.dim();
        let mut acc = Mat::<c64>::zeros(n, n);
        for (p, rho) in &self.entries {
            let m = rho.as_mat();
            for j in 0..n {
                for k in 0..n {
                    acc[(j, k)] += m[(j, k)] * *p;
                }
            }
        }
        HermitianMatrix::hermitian_part(acc)
    }
}

/// A measurement: effects `0 <= E_i <= I` with `Σ E_i = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    effects: Vec<HermitianMatrix>,
}

impl Measurement {
    pub fn new(effects: Vec<HermitianMatrix>) -> Result<Self> {
        let first = effects
            .first()
            .ok_or_else(|| Error::InvalidMeasurement("no effects".into()))?;
        let dim = first.dim();
        for (i, e) in effects.iter().enumerate() {
            check_same_dim(dim, e.dim())?;
            let evd = eig_hermitian(e);
            let (lo, hi) = (evd.eigenvalues()[0], evd.eigenvalues()[dim - 1]);
            if lo < -EFFECT_TOL || hi > 1.0 + EFFECT_TOL {
                return Err(Error::InvalidMeasurement(format!(
                    "effect {i} has spectrum [{lo:.3e}, {hi:.3e}] outside [0, 1]"
                )));
            }
        }
        let m = Self { effects };
        let err = m.completeness_error();
        if err > EFFECT_TOL {
            return Err(Error::InvalidMeasurement(format!(
                "effects sum to identity only within {err:.3e}"
            )));
        }
        Ok(m)
    }

    pub(crate) fn new_unchecked(effects: Vec<HermitianMatrix>) -> Self {
        Self { effects }
    }

    /// `{I/ℓ, …, I/ℓ}`: uniform guessing.
    pub fn trivial(outcomes: usize, dim: usize) -> Self {
        let e = HermitianMatrix::identity(dim).scale(1.0 / outcomes as f64);
        Self {
            effects: vec![e; outcomes],
        }
    }

    pub fn effects(&self) -> &[HermitianMatrix] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    /// `max |Σ E_i - I|` entry-wise.
    pub fn completeness_error(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for k in 0..n {
                let s: c64 = self.effects.iter().map(|e| e.get(j, k)).sum();
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }

    /// Outcome probabilities `tr(E_i ρ)`.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        check_same_dim(self.dim(), rho.dim())?;
        Ok(self
            .effects
            .iter()
            .map(|e| e.trace_product(rho.as_hermitian()))
            .collect())
    }
}

/// The optimal two-outcome measurement `{P₊, P₋}`, the Helstrom observable
/// `Λ = p₁ρ₁ − p₂ρ₂` and the Helstrom bound.
#[derive(Clone, Debug)]
pub struct HelstromResult {
    measurement: Measurement,
    observable: HermitianMatrix,
    bound: f64,
}

impl HelstromResult {
    pub fn measurement(&self) -> &Measurement {
        &self.measurement
    }

    pub fn into_measurement(self) -> Measurement {
        self.measurement
    }

    pub fn observable(&self) -> &HermitianMatrix {
        &self.observable
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn positive_projector(&self) -> &HermitianMatrix {
        &self.measurement.effects[0]
    }

    pub fn negative_projector(&self) -> &HermitianMatrix {
        &self.measurement.effects[1]
    }
}

/// Helstrom measurement and bound for `(p1, rho1)` versus `(p2, rho2)`.
pub fn helstrom(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    p1: f64,
    p2: f64,
) -> Result<HelstromResult> {
    helstrom_with_tol(rho1, rho2, p1, p2, DEFAULT_EIG_TOL)
}

/// As [`helstrom`]; eigenvalues of `Λ` at or below `eig_tol` are assigned to `P₋`.
pub fn helstrom_with_tol(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    p1: f64,
    p2: f64,
    eig_tol: f64,
) -> Result<HelstromResult> {
    check_same_dim(rho1.dim(), rho2.dim())?;
    validate_priors(&[p1, p2])?;
    let observable = rho1
        .as_hermitian()
        .linear_combination(p1, rho2.as_hermitian(), -p2)?;
    let positive = eig_hermitian(&observable).spectral_map(|l| if l > eig_tol { 1.0 } else { 0.0 });
    let negative = HermitianMatrix::identity(rho1.dim()).sub(&positive)?;
    let bound = p1 * positive.trace_product(rho1.as_hermitian())
        + p2 * negative.trace_product(rho2.as_hermitian());
    Ok(HelstromResult {
        measurement: Measurement::new_unchecked(vec![positive, negative]),
        observable,
        bound,
    })
}

/// Helstrom measurement of a two-state ensemble.
pub fn helstrom_ensemble(r: &Ensemble) -> Result<HelstromResult> {
    if r.len() != 2 {
        return Err(Error::ClassCount {
            kind: "helstrom",
            expected: 2,
            found: r.len(),
        });
    }
    let (p1, rho1) = &r.entries[0];
    let (p2, rho2) = &r.entries[1];
    helstrom(rho1, rho2, *p1, *p2)
}

/// `(1 + ‖p₁ρ₁ − p₂ρ₂‖₁) / 2`, the Helstrom bound through the trace norm.
pub fn helstrom_bound_trace_form(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    p1: f64,
    p2: f64,
) -> Result<f64> {
    check_same_dim(rho1.dim(), rho2.dim())?;
    validate_priors(&[p1, p2])?;
    let lambda = rho1
        .as_hermitian()
        .linear_combination(p1, rho2.as_hermitian(), -p2)?;
    Ok(0.5 * (1.0 + trace_norm(&lambda)))
}

/// Everything the pretty good measurement is assembled from.
#[derive(Clone, Debug)]
pub struct PgmComponents {
    average_state: HermitianMatrix,
    /// `E_i = (σ⁺)^{1/2} p_i ρ_i (σ⁺)^{1/2}`
    unnormalized: Vec<HermitianMatrix>,
    kernel_projector: HermitianMatrix,
    measurement: Measurement,
}

impl PgmComponents {
    pub fn average_state(&self) -> &HermitianMatrix {
        &self.average_state
    }

    /// The operators `E_i`, which sum to the projector onto `im(σ)`.
    pub fn unnormalized_effects(&self) -> &[HermitianMatrix] {
        &self.unnormalized
    }

    pub fn kernel_projector(&self) -> &HermitianMatrix {
        &self.kernel_projector
    }

    pub fn measurement(&self) -> &Measurement {
        &self.measurement
    }

    pub fn into_measurement(self) -> Measurement {
        self.measurement
    }

    /// `tr(P_ker(σ)) < 1e-9`, in which case `F_i = E_i`.
    pub fn full_rank_sigma(&self) -> bool {
        self.kernel_projector.trace() < FULL_RANK_TOL
    }
}

/// Builds `E_i` and `F_i = E_i + P_ker(σ)/ℓ` from one eigendecomposition of `σ`.
pub fn pgm_components(r: &Ensemble) -> Result<PgmComponents> {
    let sigma = r.average_state();
    let n = sigma.dim();
    let evd = eig_hermitian(&sigma);
    let min_eigenvalue = evd.eigenvalues()[0];
    if min_eigenvalue < -PSD_TOL {
        return Err(Error::NotPsd { min_eigenvalue });
    }
    let tol = evd.default_rank_tol();
    let active: Vec<usize> = (0..n).filter(|&i| evd.eigenvalues()[i] > tol).collect();
    let v = evd.eigenvectors();

    // W = V_im diag(λ^{-1/2}), so (σ⁺)^{1/2} = W V_im† and E_i = W (V_im† p_i ρ_i V_im) W†.
    let w = Mat::from_fn(n, active.len(), |j, c| {
        let i = active[c];
        v[(j, i)] * (1.0 / evd.eigenvalues()[i].sqrt())
    });
    let basis = Mat::from_fn(n, active.len(), |j, c| v[(j, active[c])]);
    let image_projector = HermitianMatrix::hermitian_part(&basis * basis.adjoint());
    let kernel_projector = HermitianMatrix::identity(n).sub(&image_projector)?;

    let share = 1.0 / r.len() as f64;
    let mut unnormalized = Vec::with_capacity(r.len());
    let mut effects = Vec::with_capacity(r.len());
    for (p, rho) in &r.entries {
        let inner = basis.adjoint() * (rho.as_mat() * &basis);
        let e = HermitianMatrix::hermitian_part(&w * (&inner * w.adjoint())).scale(*p);
        effects.push(e.linear_combination(1.0, &kernel_projector, share)?);
        unnormalized.push(e);
    }
    Ok(PgmComponents {
        average_state: sigma,
        unnormalized,
        kernel_projector,
        measurement: Measurement::new_unchecked(effects),
    })
}

/// The pretty good measurement `{F_1, …, F_ℓ}` of an ensemble, in class order.
pub fn pgm(r: &Ensemble) -> Result<Measurement> {
    Ok(pgm_components(r)?.into_measurement())
}

/// `Σ_i p_i tr(M_i ρ_i)`.
pub fn success_probability(r: &Ensemble, m: &Measurement) -> Result<f64> {
    if m.len() != r.len() {
        return Err(Error::ArityMismatch {
            effects: m.len(),
            entries: r.len(),
        });
    }
    check_same_dim(r.dim(), m.dim())?;
    Ok(r.entries
        .iter()
        .zip(&m.effects)
        .map(|((p, rho), e)| p * e.trace_product(rho.as_hermitian()))
        .sum())
}

/// Success probability of the pretty good measurement on its own ensemble.
pub fn pgm_bound(r: &Ensemble) -> Result<f64> {
    success_probability(r, &pgm(r)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{kron, pinv, projector_kernel, psd_sqrt};

    fn diag(d: &[f64]) -> DensityMatrix {
        DensityMatrix::from_diagonal(d).unwrap()
    }

    #[test]
    fn ensemble_validation() {
        let a = diag(&[1.0, 0.0]);
        assert!(matches!(
            Ensemble::new(vec![(1.0, a.clone())]),
            Err(Error::TooFewClasses { found: 1 })
        ));
        assert!(matches!(
            Ensemble::new(vec![(0.5, a.clone()), (0.6, a.clone())]),
            Err(Error::InvalidPriors(_))
        ));
        assert!(matches!(
            Ensemble::new(vec![(1.0, a.clone()), (0.0, a.clone())]),
            Err(Error::InvalidPriors(_))
        ));
        assert!(matches!(
            Ensemble::new(vec![(0.5, a), (0.5, DensityMatrix::maximally_mixed(3))]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn helstrom_examples() {
        let (a, b) = (diag(&[1.0, 0.0]), diag(&[0.0, 1.0]));
        assert!((helstrom(&a, &b, 0.5, 0.5).unwrap().bound() - 1.0).abs() < 1e-12);
        assert!((helstrom(&a, &a, 0.5, 0.5).unwrap().bound() - 0.5).abs() < 1e-12);
        let h = helstrom(&a, &diag(&[0.5, 0.5]), 0.5, 0.5).unwrap();
        assert!((h.bound() - 0.75).abs() < 1e-12);
        assert!(
            h.observable()
                .max_abs_diff(&HermitianMatrix::from_real_diagonal(&[0.25, -0.25]))
                < 1e-15
        );
        assert!(
            h.positive_projector()
                .max_abs_diff(&HermitianMatrix::from_real_diagonal(&[1.0, 0.0]))
                < 1e-12
        );
        assert!(h.measurement().completeness_error() < 1e-12);
    }

    #[test]
    fn helstrom_zero_eigenvalues_go_to_negative_projector() {
        let a = diag(&[0.5, 0.5, 0.0]);
        let b = diag(&[0.5, 0.0, 0.5]);
        let h = helstrom(&a, &b, 0.5, 0.5).unwrap();
        assert_eq!(h.observable().get(0, 0).re, 0.0);
        assert!(h.negative_projector().get(0, 0).re > 1.0 - 1e-12);
        assert!((h.bound() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn helstrom_rejects_bad_input() {
        let a = diag(&[1.0, 0.0]);
        assert!(matches!(
            helstrom(&a, &a, 0.5, 0.6),
            Err(Error::InvalidPriors(_))
        ));
        assert!(matches!(
            helstrom(&a, &DensityMatrix::maximally_mixed(3), 0.5, 0.5),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn trace_form_examples() {
        let (a, b) = (diag(&[1.0, 0.0]), diag(&[0.0, 1.0]));
        assert!((helstrom_bound_trace_form(&a, &b, 0.5, 0.5).unwrap() - 1.0).abs() < 1e-12);
        assert!((helstrom_bound_trace_form(&a, &a, 0.5, 0.5).unwrap() - 0.5).abs() < 1e-12);
        let c = diag(&[0.5, 0.5]);
        assert!((helstrom_bound_trace_form(&a, &c, 0.5, 0.5).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn pgm_orthogonal_states_give_projectors() {
        let r = Ensemble::uniform(vec![diag(&[1.0, 0.0]), diag(&[0.0, 1.0])]).unwrap();
        let m = pgm(&r).unwrap();
        assert!(
            m.effects()[0].max_abs_diff(&HermitianMatrix::from_real_diagonal(&[1.0, 0.0])) < 1e-12
        );
        assert!(
            m.effects()[1].max_abs_diff(&HermitianMatrix::from_real_diagonal(&[0.0, 1.0])) < 1e-12
        );
        assert!((success_probability(&r, &m).unwrap() - 1.0).abs() < 1e-12);
        assert!((pgm_bound(&r).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pgm_identical_full_rank_states_split_evenly() {
        let rho = DensityMatrix::new(
            HermitianMatrix::from_real_rows(&[&[0.6, 0.1], &[0.1, 0.4]]).unwrap(),
        )
        .unwrap();
        let c = pgm_components(&Ensemble::uniform(vec![rho.clone(), rho]).unwrap()).unwrap();
        assert!(c.full_rank_sigma());
        let half = HermitianMatrix::identity(2).scale(0.5);
        for (e, f) in c
            .unnormalized_effects()
            .iter()
            .zip(c.measurement().effects())
        {
            assert!(f.max_abs_diff(&half) < 1e-12);
            assert!(e.max_abs_diff(f) < 1e-12);
        }
    }

    #[test]
    fn pgm_rank_deficient_sigma_matches_direct_formula() {
        // two identical pure states in dimension 3: σ has a 2-dimensional kernel
        let psi =
            DensityMatrix::pure(&[c64::new(0.6, 0.0), c64::new(0.0, 0.8), c64::new(0.0, 0.0)])
                .unwrap();
        let r = Ensemble::uniform(vec![psi.clone(), psi.clone()]).unwrap();
        let c = pgm_components(&r).unwrap();
        assert!(!c.full_rank_sigma());

        let sigma = r.average_state();
        let root = psd_sqrt(&pinv(&sigma)).unwrap();
        let ker = projector_kernel(&sigma);
        for f in c.measurement().effects() {
            let e = HermitianMatrix::hermitian_part(root.matmul(&HermitianMatrix::hermitian_part(
                psi.as_hermitian().scale(0.5).matmul(&root),
            )));
            let direct = e.linear_combination(1.0, &ker, 0.5).unwrap();
            assert!(f.max_abs_diff(&direct) < 1e-12);
        }
        assert!(c.measurement().completeness_error() < 1e-9);
        assert!((c.kernel_projector().trace() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn trivial_measurement_gives_uniform_guessing() {
        let r = Ensemble::uniform(vec![
            diag(&[0.2, 0.8]),
            diag(&[0.7, 0.3]),
            diag(&[1.0, 0.0]),
        ])
        .unwrap();
        let p = success_probability(&r, &Measurement::trivial(3, 2)).unwrap();
        assert!((p - 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            success_probability(&r, &Measurement::trivial(2, 2)),
            Err(Error::ArityMismatch {
                effects: 2,
                entries: 3
            })
        ));
    }

    #[test]
    fn pgm_bound_diagonal_examples() {
        let closed = |r1: f64, r2: f64, s1: f64, s2: f64| {
            let (r, s) = (r1 + r2, s1 + s2);
            2.0 * (r * (s - 1.0) - s) / ((r + s) * (r + s - 4.0))
        };
        let state = |a: f64, b: f64| {
            DensityMatrix::uniform_mixture(&[diag(&[1.0 - a, a]), diag(&[1.0 - b, b])]).unwrap()
        };
        let r = Ensemble::uniform(vec![state(0.2, 0.4), state(0.6, 0.8)]).unwrap();
        let b = pgm_bound(&r).unwrap();
        assert!((b - 0.58).abs() < 1e-12);
        assert!((b - closed(0.2, 0.4, 0.6, 0.8)).abs() < 1e-12);
        let same = Ensemble::uniform(vec![state(0.3, 0.3), state(0.3, 0.3)]).unwrap();
        assert!((pgm_bound(&same).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn measurement_validation() {
        let p = HermitianMatrix::from_real_diagonal(&[1.0, 0.0]);
        let q = HermitianMatrix::from_real_diagonal(&[0.0, 1.0]);
        assert!(Measurement::new(vec![p.clone(), q]).is_ok());
        assert!(matches!(
            Measurement::new(vec![p.clone(), p.clone()]),
            Err(Error::InvalidMeasurement(_))
        ));
        let over = HermitianMatrix::from_real_diagonal(&[1.5, 0.5]);
        let under = HermitianMatrix::from_real_diagonal(&[-0.5, 0.5]);
        assert!(matches!(
            Measurement::new(vec![over, under]),
            Err(Error::InvalidMeasurement(_))
        ));
    }

    #[test]
    fn helstrom_on_copies_not_worse() {
        let a = diag(&[0.9, 0.1]);
        let b = diag(&[0.3, 0.7]);
        let h1 = helstrom(&a, &b, 0.5, 0.5).unwrap().bound();
        let a2 = DensityMatrix::new(kron(a.as_hermitian(), a.as_hermitian()).unwrap()).unwrap();
        let b2 = DensityMatrix::new(kron(b.as_hermitian(), b.as_hermitian()).unwrap()).unwrap();
        let h2 = helstrom(&a2, &b2, 0.5, 0.5).unwrap().bound();
        assert!(h2 >= h1);
    }
}
