//! Post-selected evolution in the dilated space versus direct non-unitary
//! evolution e^{−itH}ψ.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dilation::{DilatedState, DilationResult};
use crate::error::{Error, Result};
use crate::numerics::{inner, mat_exp, vec_dist_max, vec_norm, ComplexMatrix, C64};

/// Which dilated layout carries the state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// |0⟩|ψ⟩ + |1⟩|Tψ⟩, post-select ancilla |0⟩.
    Plus,
    /// |1⟩|ψ⟩ − |0⟩|Tψ⟩, post-select ancilla |1⟩.
    #[default]
    Minus,
}

impl std::str::FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" => Ok(Convention::Plus),
            "minus" => Ok(Convention::Minus),
            other => Err(Error::Contract(format!("unknown convention '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionComparison {
    pub t: f64,
    pub deviation: f64,
    pub success_probability: f64,
}

/// Unnormalized dilated vector for ψ.
pub fn prepare_dilated(
    psi: &[C64],
    coupling: &ComplexMatrix,
    convention: Convention,
) -> Result<DilatedState> {
    if vec_norm(psi) == 0.0 {
        return Err(Error::DegenerateInput(
            "cannot dilate the zero state".into(),
        ));
    }
    let t_psi = coupling.mul_vec(psi)?;
    let components = match convention {
        Convention::Plus => psi.iter().chain(&t_psi).copied().collect(),
        Convention::Minus => t_psi
            .iter()
            .map(|z| -z)
            .chain(psi.iter().copied())
            .collect(),
    };
    DilatedState::new(components)
}

/// Max-entry distance between two vectors after normalizing both and
/// removing the relative global phase.
pub fn phase_matched_distance(a: &[C64], b: &[C64]) -> f64 {
    let (na, nb) = (vec_norm(a), vec_norm(b));
    let a: Vec<C64> = a.iter().map(|z| z / na).collect();
    let b: Vec<C64> = b.iter().map(|z| z / nb).collect();
    let overlap = inner(&a, &b);
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let aligned: Vec<C64> = a.iter().map(|z| z * phase).collect();
    vec_dist_max(&aligned, &b)
}

/// Evolve the normalized dilated state under Ĥ for time t, keep the ancilla
/// branch that carries e^{−itH}ψ, and compare it to direct evolution.
pub fn evolve_and_postselect(
    d: &DilationResult,
    psi: &[C64],
    t: f64,
    convention: Convention,
) -> Result<EvolutionComparison> {
    let state = prepare_dilated(psi, &d.coupling, convention)?.normalized()?;
    let evolved = DilatedState::new(mat_exp(&d.hhat, t).mul_vec(state.components())?)?;
    let kept = match convention {
        Convention::Plus => evolved.upper(),
        Convention::Minus => evolved.lower(),
    };
    let norm = vec_norm(kept);
    if norm < 1e-14 {
        return Err(Error::PostSelection { norm });
    }
    let direct = mat_exp(&d.h, t).mul_vec(psi)?;
    Ok(EvolutionComparison {
        t,
        deviation: phase_matched_distance(kept, &direct),
        success_probability: norm * norm,
    })
}

/// One comparison per t, in input order.
pub fn evolution_trace(
    d: &DilationResult,
    psi: &[C64],
    times: &[f64],
    convention: Convention,
) -> Result<Vec<EvolutionComparison>> {
    times
        .par_iter()
        .map(|&t| evolve_and_postselect(d, psi, t, convention))
        .collect()
}

pub const TRACE_CSV_HEADER: &str = "t,deviation,success_probability";

pub fn trace_to_csv(rows: &[EvolutionComparison]) -> String {
    let mut out = String::from(TRACE_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            r.t, r.deviation, r.success_probability
        ));
    }
    out
}
