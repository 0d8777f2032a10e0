use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use super::{CMatrix, DysonIndex, Field, FieldMatrix};
use crate::error::{Error, Result};

/// QR with the diagonal of `R` made real and positive, which makes the
/// factorisation unique.
fn qr_positive_complex(m: CMatrix) -> (CMatrix, CMatrix) {
    let qr = m.qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for k in 0..r.nrows().min(r.ncols()) {
        let d = r[(k, k)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { Complex64::new(1.0, 0.0) };
        q.column_mut(k).iter_mut().for_each(|z| *z *= phase);
        r.row_mut(k).iter_mut().for_each(|z| *z *= phase.conj());
    }
    (q, r)
}

fn qr_positive_real(m: DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let qr = m.qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for k in 0..r.nrows().min(r.ncols()) {
        if r[(k, k)] < 0.0 {
            q.column_mut(k).iter_mut().for_each(|x| *x = -*x);
            r.row_mut(k).iter_mut().for_each(|x| *x = -*x);
        }
    }
    (q, r)
}

fn real_part(m: &CMatrix) -> DMatrix<f64> {
    m.map(|z| z.re)
}

/// Haar-distributed element of O(n), U(n) or USp(2n).
///
/// Corrected QR of a Ginibre matrix. For quaternions the complex QR of the
/// embedded Ginibre matrix is already quaternion-structured (the positive-
/// diagonal factorisation is unique and the quaternion Gram-Schmidt result
/// satisfies it); the final projection only removes roundoff.
pub fn haar_sample<R: Rng + ?Sized>(beta: DysonIndex, n: usize, rng: &mut R) -> Result<FieldMatrix> {
    if n == 0 {
        return Err(Error::InvalidSpec("Haar sample of dimension 0".into()));
    }
    let field = beta.field();
    let g = FieldMatrix::gaussian(field, n, n, 0.5, rng);
    let mut u = match field {
        Field::Real => {
            let (q, _) = qr_positive_real(real_part(g.data()));
            FieldMatrix::from_real(&q)
        }
        _ => {
            let (q, _) = qr_positive_complex(g.into_data());
            FieldMatrix::from_data_unchecked(field, q)
        }
    };
    u.enforce_structure();
    Ok(u)
}

/// Square `rows x rows` matrix `S` with `S S† = W W†`, obtained as the
/// adjoint of the positive-diagonal `R` factor of `W†`. Used to replace a
/// rectangular factor by its induced square counterpart inside a product.
pub fn square_reduction(w: &FieldMatrix) -> Result<FieldMatrix> {
    if w.cols() < w.rows() {
        return Err(Error::DimensionMismatch(format!(
            "square reduction needs cols >= rows, got {}x{}",
            w.rows(),
            w.cols()
        )));
    }
    if w.cols() == w.rows() {
        return Ok(w.clone());
    }
    let field = w.field();
    let mut s = match field {
        Field::Real => {
            let (_, r) = qr_positive_real(real_part(w.data()).transpose());
            FieldMatrix::from_real(&r.transpose())
        }
        _ => {
            let (_, r) = qr_positive_complex(w.data().adjoint());
            FieldMatrix::from_data_unchecked(field, r.adjoint())
        }
    };
    s.enforce_structure();
    Ok(s)
}
