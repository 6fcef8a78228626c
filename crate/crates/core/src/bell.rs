//! Bell-operator expectations in the simulation, classical and local-Hermitian
//! pictures, their bounds, and the CHSH baseline.
//!
//! Bob holds the ancilla and measures |0⟩⟨0| or |1⟩⟨1|; Alice holds the system
//! and uses |u₊⟩ = u|0⟩ + v|1⟩ for A₀ and |u₋⟩ = v̄|0⟩ − ū|1⟩ for A₁. A
//! correlation ⟨BᵢAⱼ⟩ is Tr[(|i⟩⟨i| ⊗ |uⱼ⟩⟨uⱼ|) Ĥ] and the combination is
//! ⟨B₀A₀⟩ + ⟨B₀A₁⟩ + ⟨B₁A₀⟩ − ⟨B₁A₁⟩.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dilation::DilationResult;
use crate::error::{Error, Result};
use crate::numerics::{inner, sigma_x, sigma_y, sigma_z, vec_norm, ComplexMatrix, C64, ONE, ZERO};
use crate::pt_model::{model_eigenvalues, ModelParams};

const NORM_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AliceSetting {
    pub u: C64,
    pub v: C64,
}

impl AliceSetting {
    pub fn new(u: C64, v: C64) -> Result<Self> {
        let n = u.norm_sqr() + v.norm_sqr();
        if !((n - 1.0).abs() <= NORM_TOL) {
            return Err(Error::Contract(format!("|u|^2 + |v|^2 = {n}, expected 1")));
        }
        Ok(Self { u, v })
    }

    /// u = v = 1/√2, which saturates the simulation-picture bound.
    pub fn balanced() -> Self {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { u: h, v: h }
    }

    /// Alice's A₀ state from a vector that need not be normalized.
    pub fn from_state(state: [C64; 2]) -> Result<Self> {
        let n = vec_norm(&state);
        if n == 0.0 {
            return Err(Error::DegenerateInput("zero Alice state".into()));
        }
        Self::new(state[0] / n, state[1] / n)
    }

    pub fn u_plus(&self) -> [C64; 2] {
        [self.u, self.v]
    }

    pub fn u_minus(&self) -> [C64; 2] {
        [self.v.conj(), -self.u.conj()]
    }

    /// ūv + uv̄ = 2 Re(ūv).
    pub fn cross_term(&self) -> f64 {
        2.0 * (self.u.conj() * self.v).re
    }

    pub fn branch(&self, branch: Branch) -> [C64; 2] {
        match branch {
            Branch::Plus => self.u_plus(),
            Branch::Minus => self.u_minus(),
        }
    }
}

/// Alice's two measurement settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalHermitianSetting {
    pub s_plus: [C64; 2],
    pub s_minus: [C64; 2],
}

impl LocalHermitianSetting {
    pub fn new(s_plus: [C64; 2], s_minus: [C64; 2]) -> Result<Self> {
        let np = vec_norm(&s_plus);
        let nm = vec_norm(&s_minus);
        let ov = inner(&s_plus, &s_minus).norm();
        if (np - 1.0).abs() > NORM_TOL || (nm - 1.0).abs() > NORM_TOL || ov > NORM_TOL {
            return Err(Error::Contract(
                "local Hermitian eigenvectors must be orthonormal".into(),
            ));
        }
        Ok(Self { s_plus, s_minus })
    }

    /// |±⟩ = (|0⟩ ± |1⟩)/√2.
    pub fn hadamard_basis() -> Self {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            s_plus: [h, h],
            s_minus: [h, -h],
        }
    }

    /// H_h = λ₊|s₊⟩⟨s₊| + λ₋|s₋⟩⟨s₋|.
    pub fn hamiltonian(&self, p: &ModelParams) -> ComplexMatrix {
        let (lo, hi) = model_eigenvalues(p);
        let plus = ComplexMatrix::outer(&self.s_plus, &self.s_plus).scale_real(hi);
        let minus = ComplexMatrix::outer(&self.s_minus, &self.s_minus).scale_real(lo);
        &plus + &minus
    }

    /// p₊ = |⟨u₊|s₊⟩|².
    pub fn p_plus(&self, a: &AliceSetting) -> f64 {
        inner(&a.u_plus(), &self.s_plus).norm_sqr()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalSetting {
    pub p_plus: f64,
}

impl ClassicalSetting {
    pub fn new(p_plus: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_plus) {
            return Err(Error::Contract(format!("p_plus = {p_plus} outside [0, 1]")));
        }
        Ok(Self { p_plus })
    }

    pub fn p_minus(&self) -> f64 {
        1.0 - self.p_plus
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Picture {
    Simulation,
    Classical,
    LocalHermitian,
}

impl Picture {
    pub const ALL: [Picture; 3] = [
        Picture::Simulation,
        Picture::Classical,
        Picture::LocalHermitian,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Picture::Simulation => "simulation",
            Picture::Classical => "classical",
            Picture::LocalHermitian => "local_hermitian",
        }
    }
}

impl fmt::Display for Picture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Picture {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "simulation" => Ok(Picture::Simulation),
            "classical" => Ok(Picture::Classical),
            "local_hermitian" | "local-hermitian" => Ok(Picture::LocalHermitian),
            other => Err(Error::Contract(format!("unknown picture '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellReport {
    pub alpha: f64,
    pub e0: f64,
    pub s: f64,
    pub picture: Picture,
    pub b0a0: f64,
    pub b1a0: f64,
    pub b0a1: f64,
    pub b1a1: f64,
    pub bell_value: f64,
    pub mean_term: f64,
    pub deviation_term: f64,
    pub bound: f64,
}

impl BellReport {
    fn assemble(p: &ModelParams, picture: Picture, corr: [f64; 4], bound: f64) -> Self {
        let [b0a0, b1a0, b0a1, b1a1] = corr;
        let bell_value = b0a0 + b0a1 + b1a0 - b1a1;
        let mean_term = 2.0 * p.e0;
        Self {
            alpha: p.alpha,
            e0: p.e0,
            s: p.s,
            picture,
            b0a0,
            b1a0,
            b0a1,
            b1a1,
            bell_value,
            mean_term,
            deviation_term: bell_value - mean_term,
            bound,
        }
    }

    pub fn params(&self) -> ModelParams {
        ModelParams {
            e0: self.e0,
            s: self.s,
            alpha: self.alpha,
        }
    }
}

/// Tr[(|b⟩⟨b| ⊗ |a⟩⟨a|) G] for a 4x4 generator G.
pub fn product_expectation(g: &ComplexMatrix, bob: usize, alice: &[C64; 2]) -> f64 {
    let mut b = [ZERO, ZERO];
    b[bob] = ONE;
    let proj = ComplexMatrix::outer(&b, &b).kron(&ComplexMatrix::outer(alice, alice));
    (&proj * g).trace().re
}

fn four_correlations(g: &ComplexMatrix, a: &AliceSetting) -> [f64; 4] {
    let (up, um) = (a.u_plus(), a.u_minus());
    [
        product_expectation(g, 0, &up),
        product_expectation(g, 1, &up),
        product_expectation(g, 0, &um),
        product_expectation(g, 1, &um),
    ]
}

/// |2 s cos²α|.
pub fn bound_simulation(p: &ModelParams) -> f64 {
    let c = p.alpha.cos();
    (2.0 * p.s * c * c).abs()
}

/// |2 s cos α|.
pub fn bound_classical_local(p: &ModelParams) -> f64 {
    (2.0 * p.s * p.alpha.cos()).abs()
}

/// 2E0 + (ūv + uv̄) ω0 cos α.
pub fn simulation_closed_form(p: &ModelParams, a: &AliceSetting) -> f64 {
    2.0 * p.e0 + a.cross_term() * p.omega0() * p.alpha.cos()
}

/// Literal trace evaluation against the dilation.
pub fn bell_simulation(d: &DilationResult, a: &AliceSetting) -> Result<BellReport> {
    let p = d
        .params
        .ok_or_else(|| Error::Contract("simulation picture needs a model dilation".into()))?;
    let a = AliceSetting::new(a.u, a.v)?;
    Ok(BellReport::assemble(
        &p,
        Picture::Simulation,
        four_correlations(&d.hhat, &a),
        bound_simulation(&p),
    ))
}

/// Bob always reports 1; A₀ and A₁ both return λ± with probabilities p±.
pub fn bell_classical(p: &ModelParams, c: &ClassicalSetting) -> Result<BellReport> {
    p.validate()?;
    let c = ClassicalSetting::new(c.p_plus)?;
    let (lo, hi) = model_eigenvalues(p);
    let mean_a = c.p_plus * hi + c.p_minus() * lo;
    Ok(BellReport::assemble(
        p,
        Picture::Classical,
        [mean_a; 4],
        bound_classical_local(p),
    ))
}

/// 2E0 + ω0 (p₊ − p₋).
pub fn classical_closed_form(p: &ModelParams, p_plus: f64) -> f64 {
    2.0 * p.e0 + p.omega0() * (2.0 * p_plus - 1.0)
}

/// Traces against Ĥ′ = I ⊗ H_h.
pub fn bell_local_hermitian(
    p: &ModelParams,
    a: &AliceSetting,
    lh: &LocalHermitianSetting,
) -> Result<BellReport> {
    p.validate()?;
    let a = AliceSetting::new(a.u, a.v)?;
    let lh = LocalHermitianSetting::new(lh.s_plus, lh.s_minus)?;
    let g = ComplexMatrix::identity(2).kron(&lh.hamiltonian(p));
    Ok(BellReport::assemble(
        p,
        Picture::LocalHermitian,
        four_correlations(&g, &a),
        bound_classical_local(p),
    ))
}

/// Spin observable n·σ.
fn spin(n: [f64; 3]) -> ComplexMatrix {
    let x = sigma_x().scale_real(n[0]);
    let y = sigma_y().scale_real(n[1]);
    let z = sigma_z().scale_real(n[2]);
    &(&x + &y) + &z
}

/// ⟨A₀B₀⟩, ⟨A₁B₀⟩, ⟨A₀B₁⟩, ⟨A₁B₁⟩ in the singlet with A along e₀, e₁ and B
/// along −(e₀+e₁)/√2, (e₁−e₀)/√2.
pub fn chsh_singlet_correlations() -> [f64; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let psi = [ZERO, C64::new(h, 0.0), C64::new(-h, 0.0), ZERO];
    let e0 = [0.0, 0.0, 1.0];
    let e1 = [1.0, 0.0, 0.0];
    let a = [spin(e0), spin(e1)];
    let b = [spin([-h, 0.0, -h]), spin([h, 0.0, -h])];
    let corr = |i: usize, j: usize| -> f64 {
        let op = a[i].kron(&b[j]);
        inner(&psi, &op.mul_vec(&psi).expect("4x4")).re
    };
    [corr(0, 0), corr(1, 0), corr(0, 1), corr(1, 1)]
}

pub fn chsh_singlet() -> f64 {
    let [a0b0, a1b0, a0b1, a1b1] = chsh_singlet_correlations();
    a0b0 + a1b0 + a0b1 - a1b1
}

/// Maximum of the CHSH combination over all 16 deterministic ±1 assignments.
pub fn chsh_classical_max() -> f64 {
    let mut best = f64::NEG_INFINITY;
    for bits in 0u8..16 {
        let sign = |k: u8| if bits >> k & 1 == 1 { -1.0 } else { 1.0 };
        let (a0, a1, b0, b1) = (sign(0), sign(1), sign(2), sign(3));
        best = best.max(a0 * b0 + a1 * b0 + a0 * b1 - a1 * b1);
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PictureVerdict {
    ConsistentSimulation,
    InconsistentSimulation,
    OutsideAll,
}

/// Compare an observed Bell value's distance from 2E0 against both bounds.
pub fn classify_picture(observed: f64, p: &ModelParams) -> PictureVerdict {
    let dev = (observed - 2.0 * p.e0).abs();
    if dev <= bound_simulation(p) {
        PictureVerdict::ConsistentSimulation
    } else if dev <= bound_classical_local(p) {
        PictureVerdict::InconsistentSimulation
    } else {
        PictureVerdict::OutsideAll
    }
}

/// Settings used for every row of a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPolicy {
    pub alice: AliceSetting,
    pub classical: ClassicalSetting,
    pub local: LocalHermitianSetting,
}

impl Default for SweepPolicy {
    /// Extremal settings: u = v = 1/√2, p₊ = 1, s± = |±⟩ (so |⟨u₊|s₊⟩|² = 1).
    fn default() -> Self {
        Self {
            alice: AliceSetting::balanced(),
            classical: ClassicalSetting { p_plus: 1.0 },
            local: LocalHermitianSetting::hadamard_basis(),
        }
    }
}

fn report_for(p: &ModelParams, picture: Picture, policy: &SweepPolicy) -> Result<BellReport> {
    match picture {
        Picture::Simulation => bell_simulation(&DilationResult::from_model(p)?, &policy.alice),
        Picture::Classical => bell_classical(p, &policy.classical),
        Picture::LocalHermitian => bell_local_hermitian(p, &policy.alice, &policy.local),
    }
}

/// One row per (grid point, picture), grid-major in the given order.
pub fn alpha_sweep(
    grid: &[ModelParams],
    pictures: &[Picture],
    policy: &SweepPolicy,
) -> Result<Vec<BellReport>> {
    let rows: Vec<Result<Vec<BellReport>>> = grid
        .par_iter()
        .map(|p| {
            pictures
                .iter()
                .map(|&pic| report_for(p, pic, policy))
                .collect::<Result<Vec<_>>>()
        })
        .collect();
    let mut out = Vec::with_capacity(grid.len() * pictures.len());
    for r in rows {
        out.extend(r?);
    }
    Ok(out)
}

/// `steps` evenly spaced α values from `lo` to `hi` inclusive.
pub fn alpha_grid(e0: f64, s: f64, lo: f64, hi: f64, steps: usize) -> Result<Vec<ModelParams>> {
    if steps < 2 {
        return Err(Error::Contract("grid needs at least 2 steps".into()));
    }
    (0..steps)
        .map(|k| {
            let alpha = if k == steps - 1 {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (steps - 1) as f64
            };
            ModelParams::new(e0, s, alpha)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, PI, SQRT_2};

    fn params(e0: f64, s: f64, a: f64) -> ModelParams {
        ModelParams::new(e0, s, a).unwrap()
    }

    fn sim(e0: f64, s: f64, a: f64, alice: &AliceSetting) -> BellReport {
        bell_simulation(
            &DilationResult::from_model(&params(e0, s, a)).unwrap(),
            alice,
        )
        .unwrap()
    }

    #[test]
    fn simulation_worked_example() {
        let r = sim(0.0, 1.0, FRAC_PI_6, &AliceSetting::balanced());
        for (got, want) in [
            (r.b0a0, 0.75),
            (r.b1a0, 0.75),
            (r.b0a1, -0.75),
            (r.b1a1, -0.75),
        ] {
            assert!((got - want).abs() < 1e-12, "{r:?}");
        }
        assert!((r.bell_value - 1.5).abs() < 1e-12);
        assert!((r.bound - 1.5).abs() < 1e-12);
    }

    #[test]
    fn simulation_hermitian_limit_reaches_two_e0_plus_two_s() {
        let r = sim(1.0, 1.0, 0.0, &AliceSetting::balanced());
        assert!((r.bell_value - 4.0).abs() < 1e-12);
    }

    #[test]
    fn pure_basis_alice_gives_mean_term() {
        let a = AliceSetting::new(ONE, ZERO).unwrap();
        let r = sim(0.7, 1.3, 0.9, &a);
        assert!((r.bell_value - 1.4).abs() < 1e-12);
    }

    #[test]
    fn simulation_near_exceptional_point() {
        let r = sim(0.0, 1.0, 0.499 * PI, &AliceSetting::balanced());
        assert!(r.bell_value.abs() <= 2.0 * (0.499 * PI).cos().powi(2) + 1e-12);
        let want = simulation_closed_form(&params(0.0, 1.0, 0.499 * PI), &AliceSetting::balanced());
        assert!(
            (r.bell_value - want).abs() < 1e-9,
            "{} vs {want}",
            r.bell_value
        );
    }

    #[test]
    fn rejects_unnormalized_alice() {
        assert!(AliceSetting::new(ONE, ONE).is_err());
        let mut a = AliceSetting::balanced();
        a.u = ONE;
        let d = DilationResult::from_model(&params(0.0, 1.0, 0.2)).unwrap();
        assert!(matches!(bell_simulation(&d, &a), Err(Error::Contract(_))));
    }

    #[test]
    fn bounds() {
        let p = params(0.0, 1.0, FRAC_PI_3);
        assert!((bound_simulation(&p) - 0.5).abs() < 1e-15);
        assert!((bound_classical_local(&p) - 1.0).abs() < 1e-15);
        let p = params(0.0, 1.0, 0.0);
        assert_eq!(
            (bound_simulation(&p), bound_classical_local(&p)),
            (2.0, 2.0)
        );
        let p = params(0.0, 2.0, FRAC_PI_2);
        assert!(bound_simulation(&p) < 1e-15 && bound_classical_local(&p) < 1e-15);
    }

    #[test]
    fn classical_examples() {
        let r = bell_classical(
            &params(0.0, 1.0, FRAC_PI_6),
            &ClassicalSetting::new(1.0).unwrap(),
        )
        .unwrap();
        assert!((r.bell_value - 1.7320508075688772).abs() < 1e-12);
        let r = bell_classical(
            &params(1.0, 1.0, FRAC_PI_3),
            &ClassicalSetting::new(0.5).unwrap(),
        )
        .unwrap();
        assert!((r.bell_value - 2.0).abs() < 1e-12);
        let r =
            bell_classical(&params(0.0, 1.0, 0.0), &ClassicalSetting::new(0.0).unwrap()).unwrap();
        assert!((r.bell_value + 2.0).abs() < 1e-12);
        assert!(ClassicalSetting::new(1.2).is_err());
        assert!(
            bell_classical(&params(0.0, 1.0, 0.0), &ClassicalSetting { p_plus: -0.1 }).is_err()
        );
    }

    #[test]
    fn local_hermitian_examples() {
        let p = params(0.0, 1.0, FRAC_PI_6);
        let lh = LocalHermitianSetting::hadamard_basis();
        let a = AliceSetting::from_state(lh.s_plus).unwrap();
        let r = bell_local_hermitian(&p, &a, &lh).unwrap();
        assert!((r.bell_value - 1.7320508075688772).abs() < 1e-12);

        // u₊ at 45° to s±: |0⟩ against the |±⟩ basis
        let p = params(1.0, 1.0, FRAC_PI_3);
        let r = bell_local_hermitian(&p, &AliceSetting::new(ONE, ZERO).unwrap(), &lh).unwrap();
        assert!((r.bell_value - 2.0).abs() < 1e-12);

        // |⟨u₊|s₊⟩|² = 0.75 with u₊ = cos θ|+⟩ + sin θ|−⟩, cos²θ = 0.75
        let p = params(0.0, 1.0, FRAC_PI_6);
        let (c, s) = (0.75_f64.sqrt(), 0.5);
        let u = [
            C64::new((c + s) * FRAC_1_SQRT_2, 0.0),
            C64::new((c - s) * FRAC_1_SQRT_2, 0.0),
        ];
        let a = AliceSetting::from_state(u).unwrap();
        assert!((lh.p_plus(&a) - 0.75).abs() < 1e-12);
        let r = bell_local_hermitian(&p, &a, &lh).unwrap();
        assert!((r.bell_value - 0.8660254037844386).abs() < 1e-12);

        let bad = LocalHermitianSetting {
            s_plus: [ONE, ZERO],
            s_minus: [ONE, ZERO],
        };
        assert!(bell_local_hermitian(&p, &a, &bad).is_err());
    }

    #[test]
    fn chsh_baseline() {
        assert!((chsh_singlet() - 2.0 * SQRT_2).abs() < 1e-12);
        let corr = chsh_singlet_correlations();
        let h = FRAC_1_SQRT_2;
        for (got, want) in corr.iter().zip([h, h, h, -h]) {
            assert!((got - want).abs() < 1e-12, "{corr:?}");
        }
        assert_eq!(chsh_classical_max(), 2.0);
    }

    #[test]
    fn classifier_examples() {
        let p = params(0.0, 1.0, FRAC_PI_6);
        assert_eq!(
            classify_picture(1.4, &p),
            PictureVerdict::ConsistentSimulation
        );
        assert_eq!(
            classify_picture(1.6, &p),
            PictureVerdict::InconsistentSimulation
        );
        assert_eq!(classify_picture(2.0, &p), PictureVerdict::OutsideAll);
    }

    #[test]
    fn sweep_rows_track_the_bounds() {
        let grid: Vec<ModelParams> = [0.0, FRAC_PI_6, FRAC_PI_3]
            .iter()
            .map(|&a| params(0.0, 1.0, a))
            .collect();
        let rows = alpha_sweep(
            &grid,
            &[Picture::Simulation, Picture::Classical],
            &SweepPolicy::default(),
        )
        .unwrap();
        assert_eq!(rows.len(), 6);
        let sim: Vec<f64> = rows
            .iter()
            .filter(|r| r.picture == Picture::Simulation)
            .map(|r| r.deviation_term)
            .collect();
        let cls: Vec<f64> = rows
            .iter()
            .filter(|r| r.picture == Picture::Classical)
            .map(|r| r.deviation_term)
            .collect();
        for (got, want) in sim.iter().zip([2.0, 1.5, 0.5]) {
            assert!((got - want).abs() < 1e-12, "{sim:?}");
        }
        for (got, want) in cls.iter().zip([2.0, 1.7320508075688772, 1.0]) {
            assert!((got - want).abs() < 1e-12, "{cls:?}");
        }
    }

    #[test]
    fn sweep_through_exceptional_point_fails_for_simulation() {
        let grid = alpha_grid(0.0, 1.0, 0.0, FRAC_PI_2, 5).unwrap();
        let err = alpha_sweep(&grid, &[Picture::Simulation], &SweepPolicy::default()).unwrap_err();
        assert!(matches!(err, Error::ExceptionalPoint { .. }));
        // the closed-form pictures are fine there
        assert!(alpha_sweep(&grid, &[Picture::Classical], &SweepPolicy::default()).is_ok());
    }

    #[test]
    fn grid_endpoints_are_exact() {
        let g = alpha_grid(0.0, 1.0, 0.0, 1.5393804, 50).unwrap();
        assert_eq!(g.len(), 50);
        assert_eq!(g[0].alpha, 0.0);
        assert_eq!(g[49].alpha, 1.5393804);
        assert!(alpha_grid(0.0, 1.0, 0.0, 1.0, 1).is_err());
    }

    #[test]
    fn picture_names_roundtrip() {
        for p in Picture::ALL {
            assert_eq!(p.as_str().parse::<Picture>().unwrap(), p);
        }
        assert!("quantum".parse::<Picture>().is_err());
    }
}
