//! Matrix exponentials.
//!
//! `mat_exp` is the physical propagator exp(−i t A). Hermitian generators are
//! exponentiated through their eigenbasis so the result is unitary to rounding;
//! everything else goes through scaling and squaring with a degree-13 Padé
//! approximant (Higham 2005).

use super::eigen::eig_hermitian;
use super::matrix::{ComplexMatrix, C64};
use super::{hermitian_defect, HERMITIAN_TOL};

const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371_920_351_148_152;

/// exp(−i·t·A) for square A.
pub fn mat_exp(a: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let n = a
        .require_square("propagator generator")
        .expect("square generator");
    if t == 0.0 {
        return ComplexMatrix::identity(n);
    }
    let scale = a.max_abs().max(1.0);
    let hermitian = hermitian_defect(a).is_ok_and(|d| d <= HERMITIAN_TOL * scale);
    if hermitian {
        if let Ok(e) = eig_hermitian(a) {
            let phases: Vec<C64> = e
                .values
                .iter()
                .map(|lam| C64::from_polar(1.0, -lam.re * t))
                .collect();
            return &(&e.vectors * &ComplexMatrix::diag(&phases)) * &e.vectors.adjoint();
        }
    }
    expm(&a.scale(C64::new(0.0, -t)))
}

/// Raw exponential exp(M).
pub fn expm(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.require_square("exponent").expect("square exponent");
    let norm = m.norm_1();
    if norm == 0.0 {
        return ComplexMatrix::identity(n);
    }
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = m.scale_real(0.5_f64.powi(squarings));
    let id = ComplexMatrix::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE13;

    let lin = |c6: f64, c4: f64, c2: f64, c0: f64| -> ComplexMatrix {
        let mut acc = a6.scale_real(c6);
        acc = &acc + &a4.scale_real(c4);
        acc = &acc + &a2.scale_real(c2);
        &acc + &id.scale_real(c0)
    };
    let hi_u = &a6 * &(&(&a6.scale_real(b[13]) + &a4.scale_real(b[11])) + &a2.scale_real(b[9]));
    let u = &a * &(&hi_u + &lin(b[7], b[5], b[3], b[1]));
    let hi_v = &a6 * &(&(&a6.scale_real(b[12]) + &a4.scale_real(b[10])) + &a2.scale_real(b[8]));
    let v = &hi_v + &lin(b[6], b[4], b[2], b[0]);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .solve(&p)
        .expect("Padé denominator is nonsingular after scaling");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}
