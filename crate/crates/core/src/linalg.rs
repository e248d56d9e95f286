//! Small dense complex linear algebra shared by the algebra and group layers.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Largest size for which determinants are expanded by cofactors.
const LAPLACE_MAX: usize = 4;

/// Determinant of the submatrix `m[rows; cols]`.
///
/// Cofactor expansion up to size 4, LU factorization above.
pub fn minor_det(m: &CMatrix, rows: &[usize], cols: &[usize]) -> Complex64 {
    debug_assert_eq!(rows.len(), cols.len());
    if rows.len() <= LAPLACE_MAX {
        laplace(m, rows, cols)
    } else {
        let sub = CMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])]);
        sub.lu().determinant()
    }
}

pub fn det(m: &CMatrix) -> Complex64 {
    let idx: Vec<usize> = (0..m.nrows()).collect();
    minor_det(m, &idx, &idx)
}

fn laplace(m: &CMatrix, rows: &[usize], cols: &[usize]) -> Complex64 {
    match rows.len() {
        0 => Complex64::new(1.0, 0.0),
        1 => m[(rows[0], cols[0])],
        2 => {
            m[(rows[0], cols[0])] * m[(rows[1], cols[1])]
                - m[(rows[0], cols[1])] * m[(rows[1], cols[0])]
        }
        _ => {
            let (head, tail) = rows.split_first().expect("non-empty");
            let mut acc = Complex64::new(0.0, 0.0);
            let mut rest = Vec::with_capacity(cols.len() - 1);
            for (k, &c) in cols.iter().enumerate() {
                let entry = m[(*head, c)];
                if entry == Complex64::new(0.0, 0.0) {
                    continue;
                }
                rest.clear();
                rest.extend(cols.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, &c)| c));
                let cofactor = laplace(m, tail, &rest);
                if k % 2 == 0 {
                    acc += entry * cofactor;
                } else {
                    acc -= entry * cofactor;
                }
            }
            acc
        }
    }
}

/// Max-entry norm of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Hermitian inner product `w* z`.
pub fn herm_dot(w: &[Complex64], z: &[Complex64]) -> Complex64 {
    w.iter().zip(z).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm_sqr(z: &[Complex64]) -> f64 {
    z.iter().map(|x| x.norm_sqr()).sum()
}

/// Integer power by repeated multiplication; negative exponents invert first.
pub fn powi(z: Complex64, k: i64) -> Complex64 {
    let base = if k < 0 { z.inv() } else { z };
    let mut e = k.unsigned_abs();
    let mut acc = Complex64::new(1.0, 0.0);
    let mut b = base;
    while e > 0 {
        if e & 1 == 1 {
            acc *= b;
        }
        b *= b;
        e >>= 1;
    }
    acc
}
