//! Four-dimensional Hermitian dilation Ĥ = I₂⊗Λ + iσy⊗Ω of a two-level
//! PT-symmetric Hamiltonian.
//!
//! The coupling operator T pairs a system state ψ with its ancilla partner Tψ
//! in the dilated vector. With the ancilla⊗system layout
//! (|0⟩|0⟩, |0⟩|1⟩, |1⟩|0⟩, |1⟩|1⟩), both
//!
//! ```text
//! e^{−itĤ}(|0⟩|ψ⟩ + |1⟩|Tψ⟩) = |0⟩|e^{−itH}ψ⟩ + |1⟩|T e^{−itH}ψ⟩
//! e^{−itĤ}(|1⟩|ψ⟩ − |0⟩|Tψ⟩) = |1⟩|e^{−itH}ψ⟩ − |0⟩|T e^{−itH}ψ⟩
//! ```
//!
//! hold iff Λ + ΩT = H and ΛT − Ω = TH. Solving those for Λ and Ω gives
//! Λ = (H + THT)(I + T²)⁻¹ and Ω = (HT − TH)(I + T²)⁻¹, which is the τ-form
//! (Hτ^{-1/2} + τ^{1/2}H)(τ^{-1/2} + τ^{1/2})⁻¹ with τ = T².

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    antihermitian_defect, eig_general, eig_hermitian, herm_sqrt_psd, hermitian_defect, mat_exp,
    sigma_y, vec_dist_max, vec_norm, ComplexMatrix, C64, DEFECTIVE_CONDITION, EVOLUTION_TOL,
    HERMITIAN_INPUT_TOL, I, ZERO,
};
use crate::pt_model::{build_model, model_eigenvalues, ModelParams};

pub const RESIDUAL_HERMITICITY: &str = "hhat_hermiticity";
pub const RESIDUAL_GENERATOR_LAMBDA: &str = "generator_lambda";
pub const RESIDUAL_GENERATOR_OMEGA: &str = "generator_omega";
pub const RESIDUAL_SPECTRUM: &str = "spectrum";
pub const RESIDUAL_EVOLUTION_PLUS: &str = "evolution_plus";
pub const RESIDUAL_EVOLUTION_MINUS: &str = "evolution_minus";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DilationResult {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ModelParams>,
    #[serde(rename = "H")]
    pub h: ComplexMatrix,
    #[serde(rename = "T")]
    pub coupling: ComplexMatrix,
    #[serde(rename = "Lambda")]
    pub lambda: ComplexMatrix,
    #[serde(rename = "Omega")]
    pub omega: ComplexMatrix,
    #[serde(rename = "Hhat")]
    pub hhat: ComplexMatrix,
    pub residuals: BTreeMap<String, f64>,
}

/// A vector in the dilated space, ancilla ⊗ system.
#[derive(Clone, Debug, PartialEq)]
pub struct DilatedState(Vec<C64>);

impl DilatedState {
    pub fn new(components: Vec<C64>) -> Result<Self> {
        if components.len() < 2 || !components.len().is_multiple_of(2) {
            return Err(Error::Dimension(format!(
                "dilated state needs an even number of components, got {}",
                components.len()
            )));
        }
        Ok(Self(components))
    }

    pub fn components(&self) -> &[C64] {
        &self.0
    }

    pub fn system_dim(&self) -> usize {
        self.0.len() / 2
    }

    /// Ancilla-|0⟩ block.
    pub fn upper(&self) -> &[C64] {
        &self.0[..self.system_dim()]
    }

    /// Ancilla-|1⟩ block.
    pub fn lower(&self) -> &[C64] {
        &self.0[self.system_dim()..]
    }

    pub fn norm(&self) -> f64 {
        vec_norm(&self.0)
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::DegenerateInput("zero dilated state".into()));
        }
        Ok(Self(self.0.iter().map(|z| z / n).collect()))
    }
}

/// How close α may get to ±π/2 before the coupling counts as singular:
/// the condition number (1+|sinα|)/(1−|sinα|) of T must stay at or below this.
pub const COUPLING_CONDITION_LIMIT: f64 = DEFECTIVE_CONDITION;

/// T = (I + sinα·σy)/cosα.
pub fn coupling_operator_2d(p: &ModelParams) -> Result<ComplexMatrix> {
    p.validate()?;
    let (sin, cos) = p.alpha.sin_cos();
    let ratio = (1.0 + sin.abs()) / (1.0 - sin.abs());
    if cos <= 0.0 || !(ratio <= COUPLING_CONDITION_LIMIT) {
        return Err(Error::ExceptionalPoint { alpha: p.alpha });
    }
    let t = &ComplexMatrix::identity(2) + &sigma_y().scale_real(sin);
    Ok(t.scale_real(1.0 / cos))
}

fn require_positive_definite(t: &ComplexMatrix) -> Result<()> {
    let e = eig_hermitian(t)?;
    let lowest = e.values[0].re;
    if lowest <= 0.0 {
        return Err(Error::Contract(format!(
            "coupling operator must be positive definite, smallest eigenvalue {lowest:e}"
        )));
    }
    Ok(())
}

/// Λ = (H + THT)(I + T²)⁻¹, Ω = (HT − TH)(I + T²)⁻¹.
pub fn build_lambda_omega(
    h: &ComplexMatrix,
    t: &ComplexMatrix,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let n = h.require_square("H")?;
    if t.rows() != n || t.cols() != n {
        return Err(Error::Dimension("H and T sizes differ".into()));
    }
    require_positive_definite(t)?;
    let id = ComplexMatrix::identity(n);
    let denom = (&id + &(t * t)).inverse()?;
    let th = t * h;
    let ht = h * t;
    let lambda = &(h + &(&th * t)) * &denom;
    let omega = &(&ht - &th) * &denom;
    Ok((lambda, omega))
}

/// Λ and Ω evaluated literally from a metric-like τ through Hermitian square roots.
pub fn lambda_omega_from_tau(
    h: &ComplexMatrix,
    tau: &ComplexMatrix,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let n = h.require_square("H")?;
    if tau.rows() != n || tau.cols() != n {
        return Err(Error::Dimension("H and tau sizes differ".into()));
    }
    let root = herm_sqrt_psd(tau)?;
    let inv_root = root.inverse()?;
    let denom = (&inv_root + &root).inverse()?;
    let lambda = &(&(h * &inv_root) + &(&root * h)) * &denom;
    let omega = &(h - &(&(&root * h) * &inv_root)) * &denom;
    Ok((lambda, omega))
}

/// Ĥ = I₂⊗Λ + iσy⊗Ω.
pub fn build_hhat(lambda: &ComplexMatrix, omega: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = lambda.require_square("Lambda")?;
    if omega.rows() != n || omega.cols() != n {
        return Err(Error::Dimension("Lambda and Omega sizes differ".into()));
    }
    let scale = lambda.max_abs().max(omega.max_abs()).max(1.0);
    let ld = hermitian_defect(lambda)?;
    if ld > HERMITIAN_INPUT_TOL * scale {
        return Err(Error::Contract(format!(
            "Lambda is not Hermitian (defect {ld:e})"
        )));
    }
    let od = antihermitian_defect(omega)?;
    if od > HERMITIAN_INPUT_TOL * scale {
        return Err(Error::Contract(format!(
            "Omega is not anti-Hermitian (defect {od:e})"
        )));
    }
    let i_sigma_y = sigma_y().scale(I);
    Ok(&ComplexMatrix::identity(2).kron(lambda) + &i_sigma_y.kron(omega))
}

/// Sorted multiset distance between two real spectra of equal length.
fn spectrum_distance(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

impl DilationResult {
    /// Dilate an arbitrary H with a caller-supplied coupling candidate.
    pub fn with_coupling(h: ComplexMatrix, coupling: ComplexMatrix) -> Result<Self> {
        let (lambda, omega) = build_lambda_omega(&h, &coupling)?;
        let hhat = build_hhat(&lambda, &omega)?;
        let mut d = Self {
            params: None,
            h,
            coupling,
            lambda,
            omega,
            hhat,
            residuals: BTreeMap::new(),
        };
        d.residuals = d.static_residuals()?;
        Ok(d)
    }

    /// Full dilation of the two-level family at `p`.
    pub fn from_model(p: &ModelParams) -> Result<Self> {
        let t = coupling_operator_2d(p)?;
        let mut d = Self::with_coupling(build_model(p), t)?;
        d.params = Some(*p);
        d.residuals = d.static_residuals()?;
        Ok(d)
    }

    /// Expected spectrum of Ĥ: each eigenvalue of H twice.
    pub fn target_spectrum(&self) -> Result<Vec<f64>> {
        let base: Vec<f64> = match &self.params {
            Some(p) => {
                let (lo, hi) = model_eigenvalues(p);
                vec![lo, hi]
            }
            None => eig_general(&self.h)?.real_values(),
        };
        Ok(base.iter().flat_map(|&x| [x, x]).collect())
    }

    /// Residuals that need no time evolution.
    pub fn static_residuals(&self) -> Result<BTreeMap<String, f64>> {
        let mut r = BTreeMap::new();
        r.insert(
            RESIDUAL_HERMITICITY.to_string(),
            hermitian_defect(&self.hhat)?,
        );
        let t = &self.coupling;
        let gen_l = (&(&self.lambda + &(&self.omega * t)) - &self.h).max_abs();
        let gen_o = (&(&(&self.lambda * t) - &self.omega) - &(t * &self.h)).max_abs();
        r.insert(RESIDUAL_GENERATOR_LAMBDA.to_string(), gen_l);
        r.insert(RESIDUAL_GENERATOR_OMEGA.to_string(), gen_o);
        let spec = eig_hermitian(&self.hhat)?.real_values();
        r.insert(
            RESIDUAL_SPECTRUM.to_string(),
            spectrum_distance(spec, self.target_spectrum()?),
        );
        Ok(r)
    }
}

/// Named residuals of a dilation check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub residuals: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub passed: bool,
}

impl VerificationReport {
    pub fn from_residuals(residuals: BTreeMap<String, f64>, tolerance: f64) -> Self {
        let passed = residuals.values().all(|&v| v < tolerance);
        Self {
            residuals,
            tolerance,
            passed,
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.values().copied().fold(0.0, f64::max)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.residuals
            .iter()
            .filter(|(_, &v)| !(v < self.tolerance))
            .map(|(k, _)| k.as_str())
            .collect()
    }
}

/// Seeded unit vector, uniform on the complex sphere.
pub fn random_state(dim: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..dim)
            .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect();
        let n = vec_norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

fn stack(upper: &[C64], lower: &[C64]) -> Vec<C64> {
    upper.iter().chain(lower).copied().collect()
}

/// Residuals of every dilation identity, including both evolution conventions
/// over `trials` seeded random states and every t in `t_samples`.
pub fn verify_dilation(
    d: &DilationResult,
    trials: usize,
    t_samples: &[f64],
    seed: u64,
) -> Result<BTreeMap<String, f64>> {
    let mut residuals = d.static_residuals()?;
    let n = d.h.require_square("H")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states: Vec<Vec<C64>> = (0..trials).map(|_| random_state(n, &mut rng)).collect();

    let mut plus = 0.0_f64;
    let mut minus = 0.0_f64;
    for &t in t_samples {
        let u_big = mat_exp(&d.hhat, t);
        let u_small = mat_exp(&d.h, t);
        for psi in &states {
            let t_psi = d.coupling.mul_vec(psi)?;
            let psi_t = u_small.mul_vec(psi)?;
            let t_psi_t = d.coupling.mul_vec(&psi_t)?;

            let lhs = u_big.mul_vec(&stack(psi, &t_psi))?;
            plus = plus.max(vec_dist_max(&lhs, &stack(&psi_t, &t_psi_t)));

            let neg = |v: &[C64]| v.iter().map(|z| -z).collect::<Vec<_>>();
            let lhs = u_big.mul_vec(&stack(&neg(&t_psi), psi))?;
            minus = minus.max(vec_dist_max(&lhs, &stack(&neg(&t_psi_t), &psi_t)));
        }
    }
    residuals.insert(RESIDUAL_EVOLUTION_PLUS.to_string(), plus);
    residuals.insert(RESIDUAL_EVOLUTION_MINUS.to_string(), minus);
    Ok(residuals)
}

/// P₁: keep the ancilla-|0⟩ block.
pub fn p1_project(x: &DilatedState) -> Vec<C64> {
    x.upper().to_vec()
}

/// Whether x satisfies P₁Ĥx = HP₁x and P₁e^{−itĤ}x = e^{−itH}P₁x at every sampled t.
pub fn x_space_member(d: &DilationResult, x: &DilatedState, t_samples: &[f64]) -> Result<bool> {
    let n = d.h.require_square("H")?;
    if x.system_dim() != n {
        return Err(Error::Dimension(format!(
            "dilated state of length {} for a {n}-level system",
            x.components().len()
        )));
    }
    let scale = x.norm();
    if scale == 0.0 {
        return Err(Error::DegenerateInput(
            "zero vector has no X-space test".into(),
        ));
    }
    let tol = EVOLUTION_TOL * scale.max(1.0);
    let px = p1_project(x);
    let gen = d.hhat.mul_vec(x.components())?;
    if vec_dist_max(&gen[..n], &d.h.mul_vec(&px)?) > tol {
        return Ok(false);
    }
    for &t in t_samples {
        let big = mat_exp(&d.hhat, t).mul_vec(x.components())?;
        let small = mat_exp(&d.h, t).mul_vec(&px)?;
        if vec_dist_max(&big[..n], &small) > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// |0⟩|ψ⟩ + |1⟩|Tψ⟩, the layout that lies in the X-space.
pub fn embed(psi: &[C64], coupling: &ComplexMatrix) -> Result<DilatedState> {
    let t_psi = coupling.mul_vec(psi)?;
    DilatedState::new(stack(psi, &t_psi))
}

/// |0⟩|ψ⟩ with nothing on the ancilla-|1⟩ branch.
pub fn ancilla_zero(psi: &[C64]) -> Result<DilatedState> {
    DilatedState::new(stack(psi, &vec![ZERO; psi.len()]))
}
