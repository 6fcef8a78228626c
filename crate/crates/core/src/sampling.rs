//! Finite-shot Monte Carlo for the three pictures.
//!
//! Every estimator draws from its own ChaCha8 stream: the seed picks the key
//! and the setting picks the stream, so settings can be sampled on any thread
//! and still reproduce bit for bit.

use rand::distributions::{Bernoulli, Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bell::{AliceSetting, Branch, ClassicalSetting, LocalHermitianSetting};
use crate::dilation::DilationResult;
use crate::error::{Error, Result};
use crate::numerics::{eig_hermitian, inner, ComplexMatrix, C64, ONE, ZERO};
use crate::pt_model::{model_eigenvalues, ModelParams};

/// Eigenvalues closer than this (relative to the spectral scale) share a
/// Born-probability bucket.
const CLUSTER_TOL: f64 = 1e-9;

const SIMULATION_STREAM: u64 = 0;
const LOCAL_HERMITIAN_STREAM: u64 = 4;
const CLASSICAL_STREAM: u64 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorResult {
    pub mean: f64,
    pub stderr: f64,
    pub shots: u64,
    pub seed: u64,
    /// Set when a single shot leaves the variance undefined.
    pub degenerate: bool,
}

impl EstimatorResult {
    /// From outcome values and their counts.
    pub fn from_counts(values: &[f64], counts: &[u64], seed: u64) -> Result<Self> {
        let shots: u64 = counts.iter().sum();
        if shots == 0 {
            return Err(Error::DegenerateInput("no shots recorded".into()));
        }
        let n = shots as f64;
        let mean = values
            .iter()
            .zip(counts)
            .map(|(v, &c)| v * c as f64)
            .sum::<f64>()
            / n;
        if shots == 1 {
            return Ok(Self {
                mean,
                stderr: 0.0,
                shots,
                seed,
                degenerate: true,
            });
        }
        let ss: f64 = values
            .iter()
            .zip(counts)
            .map(|(v, &c)| c as f64 * (v - mean).powi(2))
            .sum();
        let sd = (ss / (n - 1.0)).sqrt();
        Ok(Self {
            mean,
            stderr: sd / n.sqrt(),
            shots,
            seed,
            degenerate: false,
        })
    }

    pub fn within(&self, exact: f64, sigmas: f64) -> bool {
        (self.mean - exact).abs() <= sigmas * self.stderr
    }
}

/// Signed sum of independent estimators, errors added in quadrature.
pub fn combine(terms: &[(f64, EstimatorResult)]) -> EstimatorResult {
    let mean = terms.iter().map(|(w, e)| w * e.mean).sum();
    let var: f64 = terms.iter().map(|(w, e)| (w * e.stderr).powi(2)).sum();
    EstimatorResult {
        mean,
        stderr: var.sqrt(),
        shots: terms.iter().map(|(_, e)| e.shots).min().unwrap_or(0),
        seed: terms.first().map_or(0, |(_, e)| e.seed),
        degenerate: terms.iter().any(|(_, e)| e.degenerate),
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn branch_index(b: Branch) -> u64 {
    match b {
        Branch::Plus => 0,
        Branch::Minus => 1,
    }
}

fn require_shots(shots: u64) -> Result<()> {
    if shots == 0 {
        return Err(Error::Contract("shots must be at least 1".into()));
    }
    Ok(())
}

/// Born-rule readout of a Hermitian 4x4 generator in product states
/// |b⟩⊗|a⟩. The eigendecomposition is done once per sampler.
#[derive(Clone, Debug)]
pub struct ProductStateSampler {
    levels: Vec<f64>,
    /// Projector onto each level's eigenspace.
    projectors: Vec<ComplexMatrix>,
}

impl ProductStateSampler {
    pub fn new(g: &ComplexMatrix) -> Result<Self> {
        let e = eig_hermitian(g)?;
        let scale = e.values.iter().map(|z| z.re.abs()).fold(1.0, f64::max);
        let mut levels: Vec<f64> = Vec::new();
        let mut projectors: Vec<ComplexMatrix> = Vec::new();
        for (k, lam) in e.values.iter().enumerate() {
            let v = e.vectors.column(k);
            let proj = ComplexMatrix::outer(&v, &v);
            match levels.last() {
                Some(&l) if (lam.re - l).abs() <= CLUSTER_TOL * scale => {
                    let last = projectors.last_mut().expect("paired with levels");
                    *last = &*last + &proj;
                }
                _ => {
                    levels.push(lam.re);
                    projectors.push(proj);
                }
            }
        }
        Ok(Self { levels, projectors })
    }

    /// Distinct eigenvalues, ascending.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Normalized Born probabilities of each level in |b⟩⊗|a⟩.
    pub fn probabilities(&self, bob: usize, alice: &[C64; 2]) -> Result<Vec<f64>> {
        if bob > 1 {
            return Err(Error::Contract(format!(
                "bob setting {bob} not in {{0, 1}}"
            )));
        }
        let mut b = [ZERO, ZERO];
        b[bob] = ONE;
        let psi: Vec<C64> = b
            .iter()
            .flat_map(|bi| alice.iter().map(move |ai| bi * ai))
            .collect();
        let raw: Vec<f64> = self
            .projectors
            .iter()
            .map(|p| Ok(inner(&psi, &p.mul_vec(&psi)?).re.max(0.0)))
            .collect::<Result<_>>()?;
        let total: f64 = raw.iter().sum();
        if !(total > 0.0) {
            return Err(Error::DegenerateInput("product state has zero norm".into()));
        }
        Ok(raw.into_iter().map(|p| p / total).collect())
    }

    /// Per-level counts for `shots` draws on one stream.
    pub fn sample_counts(
        &self,
        bob: usize,
        alice: &[C64; 2],
        shots: u64,
        seed: u64,
        stream: u64,
    ) -> Result<Vec<u64>> {
        require_shots(shots)?;
        let probs = self.probabilities(bob, alice)?;
        let dist = WeightedIndex::new(&probs)
            .map_err(|e| Error::DegenerateInput(format!("Born weights: {e}")))?;
        let mut rng = stream_rng(seed, stream);
        let mut counts = vec![0u64; self.levels.len()];
        for _ in 0..shots {
            counts[dist.sample(&mut rng)] += 1;
        }
        Ok(counts)
    }

    pub fn estimate(
        &self,
        bob: usize,
        alice: &[C64; 2],
        shots: u64,
        seed: u64,
        stream: u64,
    ) -> Result<EstimatorResult> {
        let counts = self.sample_counts(bob, alice, shots, seed, stream)?;
        EstimatorResult::from_counts(&self.levels, &counts, seed)
    }
}

/// Eigenvalue readout of Ĥ in |bob⟩⊗|u±⟩.
pub fn sample_hhat(
    d: &DilationResult,
    bob: usize,
    alice: &AliceSetting,
    branch: Branch,
    shots: u64,
    seed: u64,
) -> Result<EstimatorResult> {
    let sampler = ProductStateSampler::new(&d.hhat)?;
    let stream = SIMULATION_STREAM + 2 * bob as u64 + branch_index(branch);
    sampler.estimate(bob, &alice.branch(branch), shots, seed, stream)
}

/// Eigenvalue readout of I⊗H_h in |bob⟩⊗|u±⟩.
pub fn sample_local_hermitian(
    p: &ModelParams,
    lh: &LocalHermitianSetting,
    bob: usize,
    alice: &AliceSetting,
    branch: Branch,
    shots: u64,
    seed: u64,
) -> Result<EstimatorResult> {
    let g = ComplexMatrix::identity(2).kron(&lh.hamiltonian(p));
    let sampler = ProductStateSampler::new(&g)?;
    let stream = LOCAL_HERMITIAN_STREAM + 2 * bob as u64 + branch_index(branch);
    sampler.estimate(bob, &alice.branch(branch), shots, seed, stream)
}

/// Four correlation estimates in b0a0, b1a0, b0a1, b1a1 order plus the
/// combined Bell estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellEstimate {
    pub terms: [EstimatorResult; 4],
    pub bell: EstimatorResult,
}

impl BellEstimate {
    fn from_terms(terms: [EstimatorResult; 4]) -> Self {
        let [b0a0, b1a0, b0a1, b1a1] = terms;
        let bell = combine(&[(1.0, b0a0), (1.0, b0a1), (1.0, b1a0), (-1.0, b1a1)]);
        Self { terms, bell }
    }
}

const TERM_ORDER: [(usize, Branch); 4] = [
    (0, Branch::Plus),
    (1, Branch::Plus),
    (0, Branch::Minus),
    (1, Branch::Minus),
];

fn bell_from_sampler(
    sampler: &ProductStateSampler,
    alice: &AliceSetting,
    shots: u64,
    seed: u64,
    base_stream: u64,
) -> Result<BellEstimate> {
    let terms: Vec<EstimatorResult> = TERM_ORDER
        .par_iter()
        .map(|&(bob, br)| {
            let stream = base_stream + 2 * bob as u64 + branch_index(br);
            sampler.estimate(bob, &alice.branch(br), shots, seed, stream)
        })
        .collect::<Result<_>>()?;
    Ok(BellEstimate::from_terms(
        terms.try_into().expect("four terms"),
    ))
}

/// `shots` draws per correlation term.
pub fn estimate_bell_simulation(
    d: &DilationResult,
    alice: &AliceSetting,
    shots: u64,
    seed: u64,
) -> Result<BellEstimate> {
    let alice = AliceSetting::new(alice.u, alice.v)?;
    let sampler = ProductStateSampler::new(&d.hhat)?;
    bell_from_sampler(&sampler, &alice, shots, seed, SIMULATION_STREAM)
}

pub fn estimate_bell_local_hermitian(
    p: &ModelParams,
    lh: &LocalHermitianSetting,
    alice: &AliceSetting,
    shots: u64,
    seed: u64,
) -> Result<BellEstimate> {
    p.validate()?;
    let alice = AliceSetting::new(alice.u, alice.v)?;
    let lh = LocalHermitianSetting::new(lh.s_plus, lh.s_minus)?;
    let g = ComplexMatrix::identity(2).kron(&lh.hamiltonian(p));
    let sampler = ProductStateSampler::new(&g)?;
    bell_from_sampler(&sampler, &alice, shots, seed, LOCAL_HERMITIAN_STREAM)
}

/// Outcome counts per (Alice setting i, Bob setting j, a, b).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotTable {
    pub a_values: Vec<f64>,
    pub b_values: Vec<f64>,
    pub settings_a: usize,
    pub settings_b: usize,
    counts: Vec<u64>,
}

pub const SHOT_TABLE_CSV_HEADER: &str = "setting_i,setting_j,outcome_a,outcome_b,count";

impl ShotTable {
    pub fn new(
        settings_a: usize,
        settings_b: usize,
        a_values: Vec<f64>,
        b_values: Vec<f64>,
    ) -> Self {
        let len = settings_a * settings_b * a_values.len() * b_values.len();
        Self {
            a_values,
            b_values,
            settings_a,
            settings_b,
            counts: vec![0; len],
        }
    }

    fn index(&self, i: usize, j: usize, a: usize, b: usize) -> usize {
        ((i * self.settings_b + j) * self.a_values.len() + a) * self.b_values.len() + b
    }

    pub fn count(&self, i: usize, j: usize, a: usize, b: usize) -> u64 {
        self.counts[self.index(i, j, a, b)]
    }

    pub fn add(&mut self, i: usize, j: usize, a: usize, b: usize, n: u64) {
        let k = self.index(i, j, a, b);
        self.counts[k] += n;
    }

    /// Shots recorded for setting pair (i, j).
    pub fn pair_total(&self, i: usize, j: usize) -> u64 {
        let mut n = 0;
        for a in 0..self.a_values.len() {
            for b in 0..self.b_values.len() {
                n += self.count(i, j, a, b);
            }
        }
        n
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Cell-wise sum with a table of the same shape.
    pub fn merge(&mut self, other: &ShotTable) -> Result<()> {
        if self.a_values != other.a_values
            || self.b_values != other.b_values
            || self.settings_a != other.settings_a
            || self.settings_b != other.settings_b
        {
            return Err(Error::Dimension("shot tables have different shapes".into()));
        }
        for (c, o) in self.counts.iter_mut().zip(&other.counts) {
            *c += o;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(SHOT_TABLE_CSV_HEADER);
        out.push('\n');
        for i in 0..self.settings_a {
            for j in 0..self.settings_b {
                for (a, av) in self.a_values.iter().enumerate() {
                    for (b, bv) in self.b_values.iter().enumerate() {
                        out.push_str(&format!("{i},{j},{av},{bv},{}\n", self.count(i, j, a, b)));
                    }
                }
            }
        }
        out
    }
}

/// max |p̂(ab|ij) − p̂(a|i)p̂(b|j)| with marginals pooled over the other
/// party's settings.
pub fn factorization_defect(t: &ShotTable) -> Result<f64> {
    if t.total() == 0 {
        return Err(Error::DegenerateInput("empty shot table".into()));
    }
    let (na, nb) = (t.a_values.len(), t.b_values.len());
    let ratio = |num: u64, den: u64| {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    };

    let p_a = |i: usize, a: usize| {
        let (mut num, mut den) = (0, 0);
        for j in 0..t.settings_b {
            den += t.pair_total(i, j);
            num += (0..nb).map(|b| t.count(i, j, a, b)).sum::<u64>();
        }
        ratio(num, den)
    };
    let p_b = |j: usize, b: usize| {
        let (mut num, mut den) = (0, 0);
        for i in 0..t.settings_a {
            den += t.pair_total(i, j);
            num += (0..na).map(|a| t.count(i, j, a, b)).sum::<u64>();
        }
        ratio(num, den)
    };

    let mut worst = 0.0_f64;
    for i in 0..t.settings_a {
        for j in 0..t.settings_b {
            let n = t.pair_total(i, j);
            for a in 0..na {
                for b in 0..nb {
                    let joint = ratio(t.count(i, j, a, b), n);
                    worst = worst.max((joint - p_a(i, a) * p_b(j, b)).abs());
                }
            }
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalSample {
    pub table: ShotTable,
    pub bell: EstimatorResult,
}

/// Hidden-variable sampler: each shot fixes A₀ and A₁ independently to λ₊
/// with probability p₊ (else λ₋) and Bob's outcome to 1, so every shot
/// carries a value for all four setting pairs and contributes 2·A₀ to the
/// Bell combination.
pub fn sample_classical(
    p: &ModelParams,
    c: &ClassicalSetting,
    shots: u64,
    seed: u64,
) -> Result<ClassicalSample> {
    p.validate()?;
    require_shots(shots)?;
    let c = ClassicalSetting::new(c.p_plus)?;
    let (lo, hi) = model_eigenvalues(p);
    let coin = Bernoulli::new(c.p_plus).map_err(|e| Error::Contract(e.to_string()))?;
    let mut rng = stream_rng(seed, CLASSICAL_STREAM);

    // index 0 is λ₊, index 1 is λ₋
    let mut table = ShotTable::new(2, 2, vec![hi, lo], vec![1.0]);
    let mut a0_plus = 0u64;
    for _ in 0..shots {
        let a0 = if coin.sample(&mut rng) { 0 } else { 1 };
        let a1 = if coin.sample(&mut rng) { 0 } else { 1 };
        for j in 0..2 {
            table.add(0, j, a0, 0, 1);
            table.add(1, j, a1, 0, 1);
        }
        if a0 == 0 {
            a0_plus += 1;
        }
    }
    let bell =
        EstimatorResult::from_counts(&[2.0 * hi, 2.0 * lo], &[a0_plus, shots - a0_plus], seed)?;
    Ok(ClassicalSample { table, bell })
}
