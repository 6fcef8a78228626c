//! The two-level PT-symmetric family E0·I + s·[[i sinα, 1], [1, −i sinα]] and
//! generic PT classification.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{eig_general, sigma_x, ComplexMatrix, C64, I};

/// Parameters (E0, s, α) of the two-level family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub e0: f64,
    pub s: f64,
    pub alpha: f64,
}

impl ModelParams {
    /// Validates s ≠ 0, finiteness, and α ∈ (−π/2, π/2].
    pub fn new(e0: f64, s: f64, alpha: f64) -> Result<Self> {
        let p = Self { e0, s, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e0.is_finite() && self.s.is_finite() && self.alpha.is_finite()) {
            return Err(Error::Contract("model parameters must be finite".into()));
        }
        if self.s == 0.0 {
            return Err(Error::Contract("coupling s must be nonzero".into()));
        }
        if !(self.alpha > -FRAC_PI_2 && self.alpha <= FRAC_PI_2) {
            return Err(Error::Contract(format!(
                "alpha = {} outside (-pi/2, pi/2]",
                self.alpha
            )));
        }
        Ok(())
    }

    /// ω0 = 2 s cos α.
    pub fn omega0(&self) -> f64 {
        2.0 * self.s * self.alpha.cos()
    }

    pub fn is_exceptional_point(&self) -> bool {
        self.alpha == FRAC_PI_2
    }
}

pub fn build_model(p: &ModelParams) -> ComplexMatrix {
    let (sin, e0, s) = (p.alpha.sin(), C64::new(p.e0, 0.0), p.s);
    ComplexMatrix::from_rows(&[
        [e0 + I * (s * sin), C64::new(s, 0.0)],
        [C64::new(s, 0.0), e0 - I * (s * sin)],
    ])
    .expect("2x2")
}

/// (λ−, λ+) = (E0 − s cos α, E0 + s cos α).
pub fn model_eigenvalues(p: &ModelParams) -> (f64, f64) {
    let d = p.s * p.alpha.cos();
    (p.e0 - d, p.e0 + d)
}

/// Parity for the two-level family.
pub fn parity_op() -> ComplexMatrix {
    sigma_x()
}

/// ‖P·conj(H)·P⁻¹ − H‖_max with time reversal taken as entrywise conjugation.
pub fn pt_symmetry_check(h: &ComplexMatrix, parity: &ComplexMatrix) -> Result<f64> {
    let n = h.require_square("Hamiltonian")?;
    if parity.rows() != n || parity.cols() != n {
        return Err(Error::Dimension(
            "parity and Hamiltonian sizes differ".into(),
        ));
    }
    let sq = parity * parity;
    if sq.dist_max(&ComplexMatrix::identity(n)) > 1e-12 {
        return Err(Error::Contract(
            "parity operator must square to the identity".into(),
        ));
    }
    // P² = I, so P⁻¹ = P.
    let image = &(parity * &h.conj()) * parity;
    Ok(image.dist_max(h))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PtPhase {
    Unbroken,
    Exceptional,
    Broken,
}

#[derive(Clone, Debug)]
pub struct PtClassification {
    pub kind: PtPhase,
    pub eigenvalues: Vec<C64>,
    /// Condition number of the eigenvector matrix.
    pub evidence: f64,
}

/// Unbroken: real spectrum and diagonalizable. Exceptional: real spectrum but
/// defective. Broken: some eigenvalue off the real axis.
pub fn classify(h: &ComplexMatrix) -> Result<PtClassification> {
    let e = eig_general(h)?;
    let scale = h.max_abs().max(1.0);
    // A defective block perturbs eigenvalues by O(sqrt(eps)), so widen the
    // realness window once the eigenbasis has collapsed.
    let real_tol = if e.is_defective() { 1e-6 } else { 1e-10 } * scale;
    let real = e.values.iter().all(|z| z.im.abs() < real_tol);
    let kind = match (real, e.is_defective()) {
        (false, _) => PtPhase::Broken,
        (true, true) => PtPhase::Exceptional,
        (true, false) => PtPhase::Unbroken,
    };
    Ok(PtClassification {
        kind,
        eigenvalues: e.values,
        evidence: e.condition,
    })
}
