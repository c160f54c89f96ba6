use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::HermitianOperator;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    /// σ_x, σ_y, σ_z.
    Pauli,
    /// The eight standard Gell-Mann matrices, `Tr(ΛᵢΛⱼ) = 2δᵢⱼ`.
    GellMann,
    /// Spin-1 Σ_x, Σ_y, Σ_z extended by five more traceless operators.
    AngularMomentum,
}

impl BasisKind {
    pub fn dim(self) -> usize {
        match self {
            BasisKind::Pauli => 2,
            BasisKind::GellMann | BasisKind::AngularMomentum => 3,
        }
    }

    pub fn len(self) -> usize {
        match self {
            BasisKind::Pauli => 3,
            BasisKind::GellMann | BasisKind::AngularMomentum => 8,
        }
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisKind::Pauli => "pauli",
            BasisKind::GellMann => "gell-mann",
            BasisKind::AngularMomentum => "angular-momentum",
        })
    }
}

impl FromStr for BasisKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "pauli" => Ok(BasisKind::Pauli),
            "gell-mann" | "gellmann" => Ok(BasisKind::GellMann),
            "angular-momentum" | "angular" | "sigma" => Ok(BasisKind::AngularMomentum),
            other => Err(Error::InvalidParameter(format!("unknown basis '{other}'"))),
        }
    }
}

/// Coefficients `c[i][j][k]`, zero-based.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    n: usize,
    values: Vec<f64>,
}

impl StructureConstants {
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[(i * self.n + j) * self.n + k]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

#[derive(Debug, Clone)]
pub struct OperatorBasis {
    pub kind: BasisKind,
    pub operators: Vec<HermitianOperator>,
    /// `[Tᵢ,Tⱼ] = 2i Σ_k f_ijk T_k`.
    pub f: StructureConstants,
    /// `{Tᵢ,Tⱼ} = (Tr{Tᵢ,Tⱼ}/dim) I + 2 Σ_k d_ijk T_k`.
    pub d: StructureConstants,
}

impl OperatorBasis {
    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// Gram matrix `Tr(TᵢTⱼ)` (real for Hermitian operands).
    pub fn gram(&self) -> Vec<Vec<f64>> {
        let ops = &self.operators;
        ops.iter()
            .map(|a| ops.iter().map(|b| (a.matrix() * b.matrix()).trace().re).collect())
            .collect()
    }

    /// Expansion coefficients of a traceless Hermitian matrix in this basis.
    pub fn coordinates(&self, x: &ComplexMatrix) -> Vec<f64> {
        let rhs: Vec<f64> = self
            .operators
            .iter()
            .map(|t| (t.matrix() * x).trace().re)
            .collect();
        solve_dense(self.gram(), rhs)
    }
}

pub fn build_basis(kind: BasisKind) -> OperatorBasis {
    let matrices = match kind {
        BasisKind::Pauli => pauli(),
        BasisKind::GellMann => gell_mann(),
        BasisKind::AngularMomentum => angular_momentum(),
    };
    let operators: Vec<HermitianOperator> = matrices
        .into_iter()
        .map(|m| HermitianOperator::new(m).expect("basis matrices are Hermitian"))
        .collect();
    let mut basis = OperatorBasis {
        kind,
        operators,
        f: StructureConstants { n: 0, values: vec![] },
        d: StructureConstants { n: 0, values: vec![] },
    };
    let (f, d) = structure_constants(&basis);
    basis.f = f;
    basis.d = d;
    basis
}

fn structure_constants(basis: &OperatorBasis) -> (StructureConstants, StructureConstants) {
    let n = basis.len();
    let dim = basis.dim() as f64;
    let identity = ComplexMatrix::identity(basis.dim());
    let mut f = vec![0.0; n * n * n];
    let mut d = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            let a = basis.operators[i].matrix();
            let b = basis.operators[j].matrix();
            // [A,B]/(2i) is Hermitian and traceless
            let comm = a.commutator(b).scale_complex(Complex64::new(0.0, -0.5));
            let anti = a.anticommutator(b);
            let anti = &anti - &identity.scale(anti.trace().re / dim);
            let fc = basis.coordinates(&comm);
            let dc = basis.coordinates(&anti.scale(0.5));
            for k in 0..n {
                f[(i * n + j) * n + k] = fc[k];
                d[(i * n + j) * n + k] = dc[k];
            }
        }
    }
    (
        StructureConstants { n, values: f },
        StructureConstants { n, values: d },
    )
}

/// Gaussian elimination with partial pivoting. The matrix must be nonsingular.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .expect("non-empty system");
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col];
        assert!(p.abs() > 1e-14, "singular Gram matrix");
        for row in (col + 1)..n {
            let factor = a[row][col] / p;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = ((row + 1)..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pauli() -> Vec<ComplexMatrix> {
    let z = c(0.0, 0.0);
    vec![
        ComplexMatrix::from_rows(&[vec![z, c(1.0, 0.0)], vec![c(1.0, 0.0), z]]),
        ComplexMatrix::from_rows(&[vec![z, c(0.0, -1.0)], vec![c(0.0, 1.0), z]]),
        ComplexMatrix::diagonal(&[1.0, -1.0]),
    ]
}

fn sym(i: usize, j: usize, v: Complex64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(3);
    m[(i, j)] = v;
    m[(j, i)] = v.conj();
    m
}

fn gell_mann() -> Vec<ComplexMatrix> {
    let s3 = 3f64.sqrt();
    vec![
        sym(0, 1, c(1.0, 0.0)),
        sym(0, 1, c(0.0, -1.0)),
        ComplexMatrix::diagonal(&[1.0, -1.0, 0.0]),
        sym(0, 2, c(1.0, 0.0)),
        sym(0, 2, c(0.0, -1.0)),
        sym(1, 2, c(1.0, 0.0)),
        sym(1, 2, c(0.0, -1.0)),
        ComplexMatrix::diagonal(&[1.0 / s3, 1.0 / s3, -2.0 / s3]),
    ]
}

/// Σ₁..Σ₃ are the spin-1 matrices; Σ₄..Σ₈ complete them to a basis of
/// traceless Hermitian 3×3 matrices.
fn angular_momentum() -> Vec<ComplexMatrix> {
    let r = FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    let sigma_x = ComplexMatrix::from_rows(&[
        vec![z, c(r, 0.0), z],
        vec![c(r, 0.0), z, c(r, 0.0)],
        vec![z, c(r, 0.0), z],
    ]);
    let sigma_y = ComplexMatrix::from_rows(&[
        vec![z, c(0.0, -r), z],
        vec![c(0.0, r), z, c(0.0, -r)],
        vec![z, c(0.0, r), z],
    ]);
    let sigma_z = ComplexMatrix::diagonal(&[1.0, 0.0, -1.0]);
    let sigma_4 = ComplexMatrix::from_rows(&[
        vec![z, c(r, 0.0), z],
        vec![c(r, 0.0), z, c(-r, 0.0)],
        vec![z, c(-r, 0.0), z],
    ]);
    let sigma_5 = ComplexMatrix::from_rows(&[
        vec![z, c(0.0, -r), z],
        vec![c(0.0, r), z, c(0.0, r)],
        vec![z, c(0.0, -r), z],
    ]);
    let sigma_6 = ComplexMatrix::diagonal(&[0.0, 1.0, -1.0]);
    let sigma_7 = sym(0, 2, c(1.0, 0.0));
    let sigma_8 = sym(0, 2, c(0.0, -1.0));
    vec![
        sigma_x, sigma_y, sigma_z, sigma_4, sigma_5, sigma_6, sigma_7, sigma_8,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(basis: &OperatorBasis, i: usize) -> &ComplexMatrix {
        basis.operators[i].matrix()
    }

    #[test]
    fn all_bases_traceless() {
        for kind in [BasisKind::Pauli, BasisKind::GellMann, BasisKind::AngularMomentum] {
            let b = build_basis(kind);
            assert_eq!(b.len(), kind.len());
            for op in &b.operators {
                assert!(op.matrix().trace().norm() < 1e-12);
            }
        }
    }

    #[test]
    fn orthonormal_bases() {
        for kind in [BasisKind::Pauli, BasisKind::GellMann] {
            let g = build_basis(kind).gram();
            for (i, row) in g.iter().enumerate() {
                for (j, &x) in row.iter().enumerate() {
                    let want = if i == j { 2.0 } else { 0.0 };
                    assert!((x - want).abs() < 1e-12, "{kind} G[{i}][{j}] = {x}");
                }
            }
        }
    }

    #[test]
    fn sigma_from_gell_mann_relations() {
        let gm = build_basis(BasisKind::GellMann);
        let am = build_basis(BasisKind::AngularMomentum);
        let l = |i: usize| m(&gm, i - 1).clone();
        let s3 = 3f64.sqrt();
        let r = FRAC_1_SQRT_2;
        let expected = [
            (&l(1) + &l(6)).scale(r),
            (&l(2) + &l(7)).scale(r),
            (&l(8).scale(s3) + &l(3)).scale(0.5),
            (&l(1) - &l(6)).scale(r),
            (&l(2) - &l(7)).scale(r),
            (&l(8).scale(s3) - &l(3)).scale(0.5),
            l(4),
            l(5),
        ];
        for (k, e) in expected.iter().enumerate() {
            assert!(m(&am, k).max_abs_diff(e) < 1e-12, "Σ{} mismatch", k + 1);
        }
    }

    #[test]
    fn gell_mann_f123_from_commutator() {
        // [Λ₁,Λ₂] = 2i Λ₃, projected by hand
        let gm = build_basis(BasisKind::GellMann);
        let comm = m(&gm, 0).commutator(m(&gm, 1));
        let f123 = (m(&gm, 2) * &comm).trace() / Complex64::new(0.0, 4.0);
        assert!((f123.re - 1.0).abs() < 1e-12 && f123.im.abs() < 1e-12);
        assert!((gm.f.get(0, 1, 2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn known_gell_mann_constants() {
        let gm = build_basis(BasisKind::GellMann);
        let s3 = 3f64.sqrt();
        // standard table (one-based indices)
        let f = [
            ((1, 4, 7), 0.5),
            ((1, 5, 6), -0.5),
            ((2, 4, 6), 0.5),
            ((2, 5, 7), 0.5),
            ((3, 4, 5), 0.5),
            ((3, 6, 7), -0.5),
            ((4, 5, 8), s3 / 2.0),
            ((6, 7, 8), s3 / 2.0),
        ];
        for ((i, j, k), v) in f {
            assert!((gm.f.get(i - 1, j - 1, k - 1) - v).abs() < 1e-12, "f{i}{j}{k}");
        }
        let d = [((1, 1, 8), 1.0 / s3), ((1, 4, 6), 0.5), ((3, 3, 8), 1.0 / s3), ((8, 8, 8), -1.0 / s3)];
        for ((i, j, k), v) in d {
            assert!((gm.d.get(i - 1, j - 1, k - 1) - v).abs() < 1e-12, "d{i}{j}{k}");
        }
    }

    #[test]
    fn structure_constant_symmetries() {
        for kind in [BasisKind::Pauli, BasisKind::GellMann] {
            let b = build_basis(kind);
            let n = b.len();
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let f = b.f.get(i, j, k);
                        assert!((f + b.f.get(j, i, k)).abs() < 1e-12);
                        assert!((f - b.f.get(j, k, i)).abs() < 1e-12);
                        assert!((f + b.f.get(i, k, j)).abs() < 1e-12);
                        let d = b.d.get(i, j, k);
                        assert!((d - b.d.get(j, i, k)).abs() < 1e-12);
                        assert!((d - b.d.get(i, k, j)).abs() < 1e-12);
                    }
                }
            }
        }
        let am = build_basis(BasisKind::AngularMomentum);
        for i in 0..8 {
            for j in 0..8 {
                for k in 0..8 {
                    assert!((am.f.get(i, j, k) + am.f.get(j, i, k)).abs() < 1e-12);
                    assert!((am.d.get(i, j, k) - am.d.get(j, i, k)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn structure_constants_reconstruct_products() {
        for kind in [BasisKind::Pauli, BasisKind::GellMann, BasisKind::AngularMomentum] {
            let b = build_basis(kind);
            let n = b.len();
            let id = ComplexMatrix::identity(b.dim());
            for i in 0..n {
                for j in 0..n {
                    let mut comm = ComplexMatrix::zeros(b.dim());
                    let mut anti = ComplexMatrix::zeros(b.dim());
                    for k in 0..n {
                        comm = &comm + &m(&b, k).scale_complex(Complex64::new(0.0, 2.0 * b.f.get(i, j, k)));
                        anti = &anti + &m(&b, k).scale(2.0 * b.d.get(i, j, k));
                    }
                    let direct = m(&b, i).anticommutator(m(&b, j));
                    anti = &anti + &id.scale(direct.trace().re / b.dim() as f64);
                    assert!(comm.max_abs_diff(&m(&b, i).commutator(m(&b, j))) < 1e-12);
                    assert!(anti.max_abs_diff(&direct) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn gell_mann_anticommutator_normalisation() {
        // {Λᵢ,Λᵢ} carries 4/3 I
        let gm = build_basis(BasisKind::GellMann);
        for i in 0..8 {
            let anti = m(&gm, i).anticommutator(m(&gm, i));
            assert!((anti.trace().re / 3.0 - 4.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn angular_momentum_algebra() {
        // [Σx,Σy] = iΣz, so f_xyz = 1/2 under the 2i convention
        let am = build_basis(BasisKind::AngularMomentum);
        assert!((am.f.get(0, 1, 2) - 0.5).abs() < 1e-12);
        assert!((am.f.get(1, 2, 0) - 0.5).abs() < 1e-12);
        assert!((am.f.get(2, 0, 1) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn parse_kind() {
        assert_eq!("gell-mann".parse::<BasisKind>().unwrap(), BasisKind::GellMann);
        assert_eq!("Angular_Momentum".parse::<BasisKind>().unwrap(), BasisKind::AngularMomentum);
        assert!("su4".parse::<BasisKind>().is_err());
    }
}
