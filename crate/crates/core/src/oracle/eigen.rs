//! Cyclic complex Jacobi eigensolver for small Hermitian matrices.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;

const MAX_SWEEPS: usize = 64;

/// Eigenpairs of a Hermitian matrix, eigenvalues sorted descending.
///
/// Each eigenvector is normalised and phased so that its largest component is
/// real and positive. Hermiticity is the caller's responsibility.
pub(crate) fn hermitian_eigen(h: &ComplexMatrix) -> Vec<(f64, Vec<Complex64>)> {
    let n = h.dim();
    let mut a = h.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = h.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= 1e-16 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g <= 1e-300 {
                    continue;
                }
                let phase = apq / g;
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * g);
                let t = crate::sign(theta) / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                let mut j = ComplexMatrix::identity(n);
                j[(p, p)] = Complex64::new(c, 0.0);
                j[(p, q)] = Complex64::new(s, 0.0);
                j[(q, p)] = phase.conj() * -s;
                j[(q, q)] = phase.conj() * c;

                a = &(&j.adjoint() * &a) * &j;
                v = &v * &j;
            }
        }
        // keep the iterate exactly Hermitian
        a = (&a + &a.adjoint()).scale(0.5);
    }

    let mut pairs: Vec<(f64, Vec<Complex64>)> = (0..n)
        .map(|k| {
            let col: Vec<Complex64> = (0..n).map(|i| v[(i, k)]).collect();
            (a[(k, k)].re, fix_phase(col))
        })
        .collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    pairs
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn fix_phase(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let norm = super::matrix::norm_sqr(&v).sqrt();
    let biggest = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(pivot) = v.iter().copied().find(|z| z.norm() >= biggest - 1e-12) {
        let rot = pivot.conj() / (pivot.norm() * norm);
        for z in &mut v {
            *z *= rot;
        }
    }
    v
}
