//! Eigendecompositions for small dense complex matrices.
//!
//! Hermitian input goes through cyclic complex Jacobi rotations. General input
//! uses the closed form for 2x2 and a Hessenberg/shifted-QR Schur reduction
//! followed by triangular back-substitution otherwise.

use std::cmp::Ordering;

use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use super::{hermitian_defect, DEFECTIVE_CONDITION, HERMITIAN_INPUT_TOL};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<C64>,
    /// Columns are right eigenvectors, unit-normalized.
    pub vectors: ComplexMatrix,
    /// 2-norm condition number of `vectors`; infinite when they are linearly dependent.
    pub condition: f64,
}

impl EigenDecomposition {
    pub fn is_defective(&self) -> bool {
        !(self.condition <= DEFECTIVE_CONDITION)
    }

    /// max |A v_k − λ_k v_k| over all pairs.
    pub fn pair_residual(&self, a: &ComplexMatrix) -> f64 {
        let mut worst = 0.0_f64;
        for (k, &lam) in self.values.iter().enumerate() {
            let v = self.vectors.column(k);
            let av = a.mul_vec(&v).expect("square input");
            for (x, y) in av.iter().zip(&v) {
                worst = worst.max((x - lam * y).norm());
            }
        }
        worst
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }
}

fn eig_order(a: &C64, b: &C64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn sorted(values: Vec<C64>, vectors: ComplexMatrix, condition: f64) -> EigenDecomposition {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| eig_order(&values[i], &values[j]));
    let mut v = ComplexMatrix::zeros(vectors.rows(), vectors.cols());
    for (new, &old) in idx.iter().enumerate() {
        v.set_column(new, &vectors.column(old));
    }
    EigenDecomposition {
        values: idx.iter().map(|&i| values[i]).collect(),
        vectors: v,
        condition,
    }
}

/// Eigendecomposition of a Hermitian matrix: ascending real eigenvalues and an
/// orthonormal eigenbasis.
pub fn eig_hermitian(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    let n = a.require_square("Hermitian eigensolver input")?;
    let defect = hermitian_defect(a)?;
    if defect > HERMITIAN_INPUT_TOL * a.max_abs().max(1.0) {
        return Err(Error::Contract(format!(
            "eig_hermitian needs Hermitian input, defect {defect:e}"
        )));
    }
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.norm_fro().max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                jacobi_rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let values: Vec<C64> = (0..n).map(|k| C64::new(m[(k, k)].re, 0.0)).collect();
    Ok(sorted(values, v, 1.0))
}

/// Annihilate m[p][q] with a unitary acting on coordinates p, q.
fn jacobi_rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let zeta = (aqq - app) / (2.0 * r);
    let t = zeta.signum() / (zeta.abs() + (zeta * zeta + 1.0).sqrt());
    let t = if zeta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // U = diag(1, conj(phase)) · [[c, s], [-s, c]] on the (p, q) plane.
    let u_pp = C64::new(c, 0.0);
    let u_pq = C64::new(s, 0.0);
    let u_qp = -phase.conj() * s;
    let u_qq = phase.conj() * c;
    let n = m.rows();
    for k in 0..n {
        let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = mkp * u_pp + mkq * u_qp;
        m[(k, q)] = mkp * u_pq + mkq * u_qq;
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
    for k in 0..n {
        let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = u_pp.conj() * mpk + u_qp.conj() * mqk;
        m[(q, k)] = u_pq.conj() * mpk + u_qq.conj() * mqk;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
}

/// Eigendecomposition of an arbitrary square matrix. Defective input is not
/// rejected; it shows up as a huge or infinite `condition`.
pub fn eig_general(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    let n = a.require_square("eigensolver input")?;
    let (values, vectors) = match n {
        1 => (vec![a[(0, 0)]], ComplexMatrix::identity(1)),
        2 => eig2(a),
        _ => eig_schur(a)?,
    };
    let condition = condition_number(&vectors);
    Ok(sorted(values, vectors, condition))
}

fn normalize(v: &mut [C64]) {
    let nrm = super::matrix::vec_norm(v);
    if nrm > 0.0 {
        v.iter_mut().for_each(|z| *z /= nrm);
    }
}

fn eig2(a: &ComplexMatrix) -> (Vec<C64>, ComplexMatrix) {
    let (p, b, c, d) = (a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
    let mean = (p + d) * 0.5;
    let half = (p - d) * 0.5;
    let delta = (half * half + b * c).sqrt();
    let values = [mean - delta, mean + delta];

    let mut vectors = ComplexMatrix::zeros(2, 2);
    if b == ZERO && c == ZERO {
        // Already diagonal; pair each eigenvalue with the nearer diagonal slot.
        let first_is_p = (values[0] - p).norm() <= (values[0] - d).norm();
        let (e0, e1) = ([ONE, ZERO], [ZERO, ONE]);
        let (v0, v1) = if first_is_p { (e0, e1) } else { (e1, e0) };
        vectors.set_column(0, &v0);
        vectors.set_column(1, &v1);
        return (values.to_vec(), vectors);
    }
    for (k, &lam) in values.iter().enumerate() {
        let mut v = if b.norm() >= c.norm() {
            [b, lam - p]
        } else {
            [lam - d, c]
        };
        normalize(&mut v);
        vectors.set_column(k, &v);
    }
    (values.to_vec(), vectors)
}

/// Householder reduction to upper Hessenberg form; returns (H, Q) with A = Q H Q†.
fn hessenberg(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let alpha = super::matrix::vec_norm(&x);
        if alpha == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            ONE
        };
        let mut w = x.clone();
        w[0] += phase * alpha;
        normalize(&mut w);
        // H ← (I − 2ww†) H (I − 2ww†) on rows/cols k+1..n
        for j in 0..n {
            let dot: C64 = (0..w.len()).map(|i| w[i].conj() * h[(k + 1 + i, j)]).sum();
            for i in 0..w.len() {
                let t = w[i] * dot * 2.0;
                h[(k + 1 + i, j)] -= t;
            }
        }
        for i in 0..n {
            let dot: C64 = (0..w.len()).map(|j| h[(i, k + 1 + j)] * w[j]).sum();
            for j in 0..w.len() {
                let t = dot * w[j].conj() * 2.0;
                h[(i, k + 1 + j)] -= t;
            }
            let dotq: C64 = (0..w.len()).map(|j| q[(i, k + 1 + j)] * w[j]).sum();
            for j in 0..w.len() {
                let t = dotq * w[j].conj() * 2.0;
                q[(i, k + 1 + j)] -= t;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    (h, q)
}

/// Givens rotation G with G·[x; y] = [r; 0]; returns (c, s) for G = [[c, s], [-s̄, c]].
fn givens(x: C64, y: C64) -> (f64, C64) {
    let (nx, ny) = (x.norm(), y.norm());
    if ny == 0.0 {
        return (1.0, ZERO);
    }
    if nx == 0.0 {
        return (0.0, y.conj() / ny);
    }
    let r = nx.hypot(ny);
    let c = nx / r;
    let s = (x / nx) * y.conj() / r;
    (c, s)
}

fn eig_schur(a: &ComplexMatrix) -> Result<(Vec<C64>, ComplexMatrix)> {
    let n = a.rows();
    let (mut t, mut z) = hessenberg(a);
    let eps = f64::EPSILON;
    let norm = t.max_abs().max(f64::MIN_POSITIVE);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;

    while hi > 0 {
        // find active block [lo, hi]
        let mut lo = hi;
        while lo > 0 {
            let sub = t[(lo, lo - 1)].norm();
            let diag = t[(lo, lo)].norm() + t[(lo - 1, lo - 1)].norm();
            if sub <= eps * diag.max(norm * eps) {
                t[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 100 * n {
            return Err(Error::Verification("QR iteration did not converge".into()));
        }
        // Wilkinson shift from the trailing 2x2 block, exceptional shift now and then.
        let (p, b, c, d) = (
            t[(hi - 1, hi - 1)],
            t[(hi - 1, hi)],
            t[(hi, hi - 1)],
            t[(hi, hi)],
        );
        let mu = if iter % 11 == 10 {
            d + t[(hi, hi - 1)].norm() * 0.75
        } else {
            let mean = (p + d) * 0.5;
            let half = (p - d) * 0.5;
            let delta = (half * half + b * c).sqrt();
            let (l1, l2) = (mean + delta, mean - delta);
            if (l1 - d).norm() <= (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };

        // One explicit shifted QR step on the active block via Givens rotations.
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..=hi {
            t[(k, k)] -= mu;
        }
        for k in lo..hi {
            let (c, s) = givens(t[(k, k)], t[(k + 1, k)]);
            rots.push((c, s));
            for j in k..n {
                let (x, y) = (t[(k, j)], t[(k + 1, j)]);
                t[(k, j)] = x * c + s * y;
                t[(k + 1, j)] = -s.conj() * x + y * c;
            }
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = lo + idx;
            // right-multiply by G†
            for i in 0..=k + 1 {
                let (x, y) = (t[(i, k)], t[(i, k + 1)]);
                t[(i, k)] = x * c + y * s.conj();
                t[(i, k + 1)] = -x * s + y * c;
            }
            for i in 0..n {
                let (x, y) = (z[(i, k)], z[(i, k + 1)]);
                z[(i, k)] = x * c + y * s.conj();
                z[(i, k + 1)] = -x * s + y * c;
            }
        }
        for k in lo..=hi {
            t[(k, k)] += mu;
        }
    }

    // Eigenvectors of the triangular factor by back-substitution.
    let values: Vec<C64> = (0..n).map(|k| t[(k, k)]).collect();
    let small = eps * norm;
    let mut y = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let mut col = vec![ZERO; n];
        col[k] = ONE;
        for j in (0..k).rev() {
            let acc: C64 = (j + 1..=k).map(|m| t[(j, m)] * col[m]).sum();
            let mut denom = t[(j, j)] - values[k];
            if denom.norm() < small {
                denom = C64::new(small, 0.0);
            }
            col[j] = -acc / denom;
        }
        y.set_column(k, &col);
    }
    let mut vectors = &z * &y;
    for k in 0..n {
        let mut col = vectors.column(k);
        normalize(&mut col);
        vectors.set_column(k, &col);
    }
    Ok((values, vectors))
}

/// 2-norm condition number via the spectrum of V†V.
pub fn condition_number(v: &ComplexMatrix) -> f64 {
    if !v.is_finite() {
        return f64::INFINITY;
    }
    let gram = &v.adjoint() * v;
    let Ok(e) = eig_hermitian(&gram) else {
        return f64::INFINITY;
    };
    let lo = e.values.first().map_or(0.0, |z| z.re);
    let hi = e.values.last().map_or(0.0, |z| z.re);
    if lo <= 0.0 || !hi.is_finite() {
        f64::INFINITY
    } else {
        (hi / lo).sqrt()
    }
}
