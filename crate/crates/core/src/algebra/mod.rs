//! Dense matrices over the reals, complex numbers and quaternions.
//!
//! All three fields share one storage type: a complex matrix. Real matrices
//! carry zero imaginary parts and quaternion matrices use the 2x2 complex
//! (Pauli) representation, where the quaternion `a + b j` with complex
//! `a, b` becomes the block
//!
//! ```text
//! [  a    b  ]
//! [ -b*   a* ]
//! ```
//!
//! Blocks are interleaved: quaternion entry `(i, j)` occupies rows
//! `2i, 2i+1` and columns `2j, 2j+1`. In this layout the self-conjugacy
//! constraint reads `M* = (1 ⊗ τ₂) M (1 ⊗ τ₂)`.

mod haar;

pub use haar::{haar_sample, square_reduction};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Tolerance for structural checks (reality, quaternion self-conjugacy).
pub const STRUCTURE_TOL: f64 = 1e-12;
/// Tolerance for Kramers pairing of quaternion Gram spectra.
pub const KRAMERS_TOL: f64 = 1e-8;
/// Tolerance for the Hermiticity precondition of the eigensolver.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Dyson index together with its bookkeeping constants.
///
/// | beta | gamma | gamma_tilde | beta_tilde |
/// |------|-------|-------------|------------|
/// | 1    | 1     | 2           | 4          |
/// | 2    | 1     | 1           | 2          |
/// | 4    | 2     | 1           | 1          |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum DysonIndex {
    Real,
    Complex,
    Quaternion,
}

impl DysonIndex {
    pub const ALL: [DysonIndex; 3] = [DysonIndex::Real, DysonIndex::Complex, DysonIndex::Quaternion];

    pub fn from_beta(beta: u32) -> Result<Self> {
        match beta {
            1 => Ok(DysonIndex::Real),
            2 => Ok(DysonIndex::Complex),
            4 => Ok(DysonIndex::Quaternion),
            other => Err(Error::InvalidBeta(other)),
        }
    }

    pub fn beta(self) -> u32 {
        match self {
            DysonIndex::Real => 1,
            DysonIndex::Complex => 2,
            DysonIndex::Quaternion => 4,
        }
    }

    /// Dimension doubling of the matrix space (2 for quaternions).
    pub fn gamma(self) -> usize {
        match self {
            DysonIndex::Quaternion => 2,
            _ => 1,
        }
    }

    /// Dimension doubling of the mass slot (2 for reals).
    pub fn gamma_tilde(self) -> usize {
        match self {
            DysonIndex::Real => 2,
            _ => 1,
        }
    }

    /// Dyson index of the dual circular ensemble, `4 / beta`.
    pub fn beta_tilde(self) -> f64 {
        4.0 / self.beta() as f64
    }

    pub fn field(self) -> Field {
        match self {
            DysonIndex::Real => Field::Real,
            DysonIndex::Complex => Field::Complex,
            DysonIndex::Quaternion => Field::Quaternion,
        }
    }
}

impl TryFrom<u32> for DysonIndex {
    type Error = Error;
    fn try_from(beta: u32) -> Result<Self> {
        DysonIndex::from_beta(beta)
    }
}

impl From<DysonIndex> for u32 {
    fn from(d: DysonIndex) -> u32 {
        d.beta()
    }
}

impl std::fmt::Display for DysonIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "beta={}", self.beta())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Real,
    Complex,
    Quaternion,
}

impl Field {
    pub fn dyson(self) -> DysonIndex {
        match self {
            Field::Real => DysonIndex::Real,
            Field::Complex => DysonIndex::Complex,
            Field::Quaternion => DysonIndex::Quaternion,
        }
    }

    /// Complex dimensions per logical index.
    pub fn gamma(self) -> usize {
        self.dyson().gamma()
    }

    /// Real degrees of freedom per logical entry.
    pub fn real_components(self) -> usize {
        match self {
            Field::Real => 1,
            Field::Complex => 2,
            Field::Quaternion => 4,
        }
    }
}

/// A matrix over one of the three fields, stored in its complex representation.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: CMatrix,
}

impl FieldMatrix {
    /// Wraps complex storage, checking its shape and field structure.
    pub fn from_data(field: Field, data: CMatrix) -> Result<Self> {
        let g = field.gamma();
        if !data.nrows().is_multiple_of(g) || !data.ncols().is_multiple_of(g) || data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} storage is not a valid {:?} matrix",
                data.nrows(),
                data.ncols(),
                field
            )));
        }
        let m = FieldMatrix {
            field,
            rows: data.nrows() / g,
            cols: data.ncols() / g,
            data,
        };
        if !validate_symmetry(&m) {
            return Err(Error::InvalidSpec(format!(
                "storage violates the {:?} structure",
                field
            )));
        }
        Ok(m)
    }

    pub(crate) fn from_data_unchecked(field: Field, data: CMatrix) -> Self {
        let g = field.gamma();
        FieldMatrix {
            field,
            rows: data.nrows() / g,
            cols: data.ncols() / g,
            data,
        }
    }

    pub fn from_real(m: &DMatrix<f64>) -> Self {
        let data = m.map(|x| Complex64::new(x, 0.0));
        FieldMatrix::from_data_unchecked(Field::Real, data)
    }

    pub fn from_complex(m: CMatrix) -> Self {
        FieldMatrix::from_data_unchecked(Field::Complex, m)
    }

    /// Builds the quaternion matrix with entries `a_ij + b_ij j`.
    pub fn from_quaternion_parts(a: &CMatrix, b: &CMatrix) -> Result<Self> {
        if a.shape() != b.shape() {
            return Err(Error::DimensionMismatch(format!(
                "quaternion parts {:?} and {:?}",
                a.shape(),
                b.shape()
            )));
        }
        let (r, c) = a.shape();
        let mut data = CMatrix::zeros(2 * r, 2 * c);
        for i in 0..r {
            for j in 0..c {
                let (p, q) = (a[(i, j)], b[(i, j)]);
                data[(2 * i, 2 * j)] = p;
                data[(2 * i, 2 * j + 1)] = q;
                data[(2 * i + 1, 2 * j)] = -q.conj();
                data[(2 * i + 1, 2 * j + 1)] = p.conj();
            }
        }
        Ok(FieldMatrix::from_data_unchecked(Field::Quaternion, data))
    }

    /// Builds a matrix from its real coordinates, entries in row-major order
    /// with `field.real_components()` consecutive reals per entry
    /// (`re`, or `re, im`, or `re a, im a, re b, im b`).
    pub fn from_real_params(field: Field, rows: usize, cols: usize, params: &[f64]) -> Result<Self> {
        let d = field.real_components();
        if params.len() != rows * cols * d {
            return Err(Error::DimensionMismatch(format!(
                "expected {} real parameters, got {}",
                rows * cols * d,
                params.len()
            )));
        }
        let g = field.gamma();
        let mut data = CMatrix::zeros(g * rows, g * cols);
        for i in 0..rows {
            for j in 0..cols {
                let p = &params[(i * cols + j) * d..(i * cols + j + 1) * d];
                write_entry(&mut data, field, i, j, p);
            }
        }
        Ok(FieldMatrix::from_data_unchecked(field, data))
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let g = field.gamma();
        FieldMatrix::from_data_unchecked(field, CMatrix::identity(g * n, g * n))
    }

    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        let g = field.gamma();
        FieldMatrix::from_data_unchecked(field, CMatrix::zeros(g * rows, g * cols))
    }

    /// Entries i.i.d. with every real component `N(0, variance)`.
    pub fn gaussian<R: Rng + ?Sized>(field: Field, rows: usize, cols: usize, variance: f64, rng: &mut R) -> Self {
        let sd = variance.sqrt();
        let params: Vec<f64> = (0..rows * cols * field.real_components())
            .map(|_| sd * rng.sample::<f64, _>(StandardNormal))
            .collect();
        FieldMatrix::from_real_params(field, rows, cols, &params).expect("parameter count matches")
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dyson(&self) -> DysonIndex {
        self.field.dyson()
    }

    /// Logical row count (quaternion rows count once).
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_data(self) -> CMatrix {
        self.data
    }

    /// Real and quaternionic-imaginary parts `(a, b)` of a quaternion matrix.
    pub fn quaternion_parts(&self) -> Option<(CMatrix, CMatrix)> {
        if self.field != Field::Quaternion {
            return None;
        }
        let a = CMatrix::from_fn(self.rows, self.cols, |i, j| self.data[(2 * i, 2 * j)]);
        let b = CMatrix::from_fn(self.rows, self.cols, |i, j| self.data[(2 * i, 2 * j + 1)]);
        Some((a, b))
    }

    pub fn mul(&self, rhs: &FieldMatrix) -> Result<FieldMatrix> {
        if self.field != rhs.field {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {:?} by {:?}",
                self.field, rhs.field
            )));
        }
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(FieldMatrix::from_data_unchecked(self.field, &self.data * &rhs.data))
    }

    pub fn adjoint(&self) -> FieldMatrix {
        FieldMatrix::from_data_unchecked(self.field, self.data.adjoint())
    }

    pub fn scale(&self, s: f64) -> FieldMatrix {
        FieldMatrix::from_data_unchecked(self.field, self.data.map(|z| z * s))
    }

    /// Logical top-left `rows x cols` block.
    pub fn top_left(&self, rows: usize, cols: usize) -> Result<FieldMatrix> {
        if rows > self.rows || cols > self.cols || rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} block of a {}x{} matrix",
                rows, cols, self.rows, self.cols
            )));
        }
        let g = self.field.gamma();
        let block = self.data.view((0, 0), (g * rows, g * cols)).into_owned();
        Ok(FieldMatrix::from_data_unchecked(self.field, block))
    }

    /// Largest absolute entry of the storage.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.data)
    }

    /// Restores the exact field structure after roundoff (no-op for complex).
    pub(crate) fn enforce_structure(&mut self) {
        match self.field {
            Field::Complex => {}
            Field::Real => self.data.iter_mut().for_each(|z| z.im = 0.0),
            Field::Quaternion => project_quaternion(&mut self.data),
        }
    }
}

fn write_entry(data: &mut CMatrix, field: Field, i: usize, j: usize, p: &[f64]) {
    match field {
        Field::Real => data[(i, j)] = Complex64::new(p[0], 0.0),
        Field::Complex => data[(i, j)] = Complex64::new(p[0], p[1]),
        Field::Quaternion => {
            let a = Complex64::new(p[0], p[1]);
            let b = Complex64::new(p[2], p[3]);
            data[(2 * i, 2 * j)] = a;
            data[(2 * i, 2 * j + 1)] = b;
            data[(2 * i + 1, 2 * j)] = -b.conj();
            data[(2 * i + 1, 2 * j + 1)] = a.conj();
        }
    }
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn project_quaternion(m: &mut CMatrix) {
    for bi in 0..m.nrows() / 2 {
        for bj in 0..m.ncols() / 2 {
            let (r, c) = (2 * bi, 2 * bj);
            let a = (m[(r, c)] + m[(r + 1, c + 1)].conj()) * 0.5;
            let b = (m[(r, c + 1)] - m[(r + 1, c)].conj()) * 0.5;
            m[(r, c)] = a;
            m[(r, c + 1)] = b;
            m[(r + 1, c)] = -b.conj();
            m[(r + 1, c + 1)] = a.conj();
        }
    }
}

/// Largest violation of the field structure, relative to the largest entry.
pub fn structure_defect(w: &FieldMatrix) -> f64 {
    let scale = w.max_abs().max(f64::MIN_POSITIVE);
    let d = &w.data;
    let defect = match w.field {
        Field::Complex => 0.0,
        Field::Real => d.iter().fold(0.0_f64, |acc, z| acc.max(z.im.abs())),
        Field::Quaternion => {
            let mut worst = 0.0_f64;
            for bi in 0..d.nrows() / 2 {
                for bj in 0..d.ncols() / 2 {
                    let (r, c) = (2 * bi, 2 * bj);
                    worst = worst
                        .max((d[(r, c)] - d[(r + 1, c + 1)].conj()).norm())
                        .max((d[(r + 1, c)] + d[(r, c + 1)].conj()).norm());
                }
            }
            worst
        }
    };
    // reality is checked with tolerance 0
    if w.field == Field::Real {
        defect
    } else {
        defect / scale
    }
}

/// True iff the field-specific structural invariant holds.
pub fn validate_symmetry(w: &FieldMatrix) -> bool {
    validate_symmetry_with(w, STRUCTURE_TOL)
}

pub fn validate_symmetry_with(w: &FieldMatrix, tol: f64) -> bool {
    let defect = structure_defect(w);
    match w.field {
        Field::Real => defect == 0.0,
        _ => defect <= tol,
    }
}

/// Gram matrix `W W†`, Hermitian by construction.
pub fn gram(w: &FieldMatrix) -> FieldMatrix {
    let d = &w.data;
    let (n, k) = d.shape();
    let mut h = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut s = Complex64::new(0.0, 0.0);
            for l in 0..k {
                s += d[(i, l)] * d[(j, l)].conj();
            }
            if i == j {
                h[(i, i)] = Complex64::new(s.re, 0.0);
            } else {
                h[(i, j)] = s;
                h[(j, i)] = s.conj();
            }
        }
    }
    FieldMatrix::from_data_unchecked(w.field, h)
}

/// Ascending eigenvalues of a Gram-type matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumWithMultiplicity {
    pub values: Vec<f64>,
    pub kramers_collapsed: bool,
}

impl SpectrumWithMultiplicity {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}

pub(crate) fn hermitian_defect(h: &CMatrix) -> (f64, f64) {
    let n = h.nrows();
    let mut asym = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            asym = asym.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    (asym, max_abs(h))
}

/// Eigenvalues of a Hermitian matrix in its full complex representation.
pub fn eigenvalues_hermitian(h: &FieldMatrix) -> Result<SpectrumWithMultiplicity> {
    eigenvalues_hermitian_data(&h.data)
}

pub(crate) fn eigenvalues_hermitian_data(h: &CMatrix) -> Result<SpectrumWithMultiplicity> {
    if h.nrows() != h.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "eigenvalues of a {}x{} matrix",
            h.nrows(),
            h.ncols()
        )));
    }
    let (asymmetry, scale) = hermitian_defect(h);
    if asymmetry > HERMITIAN_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotHermitian { asymmetry, scale });
    }
    let mut values: Vec<f64> = if h.nrows() == 1 {
        vec![h[(0, 0)].re]
    } else {
        h.symmetric_eigenvalues().iter().copied().collect()
    };
    values.sort_by(f64::total_cmp);
    Ok(SpectrumWithMultiplicity {
        values,
        kramers_collapsed: false,
    })
}

/// Keeps one member of each Kramers pair.
///
/// Consecutive values `2i, 2i+1` must agree to relative tolerance `tol`,
/// measured against the larger member plus a floor of `1e-6` times the
/// spectral radius so that roundoff on near-zero pairs is not mistaken
/// for a broken degeneracy.
pub fn collapse_kramers(s: &SpectrumWithMultiplicity, tol: f64) -> Result<SpectrumWithMultiplicity> {
    if s.kramers_collapsed {
        return Ok(s.clone());
    }
    if !s.values.len().is_multiple_of(2) {
        let last = *s.values.last().unwrap_or(&f64::NAN);
        return Err(Error::PairingFailure {
            index: s.values.len() / 2,
            lower: last,
            upper: f64::NAN,
            gap: f64::INFINITY,
        });
    }
    let floor = 1e-6 * s.max_abs();
    let mut values = Vec::with_capacity(s.values.len() / 2);
    for (index, pair) in s.values.chunks_exact(2).enumerate() {
        let (lower, upper) = (pair[0], pair[1]);
        let denom = lower.abs().max(upper.abs()) + floor;
        let gap = if denom > 0.0 { (upper - lower).abs() / denom } else { 0.0 };
        if !(gap <= tol) {
            return Err(Error::PairingFailure {
                index,
                lower,
                upper,
                gap,
            });
        }
        values.push(0.5 * (lower + upper));
    }
    Ok(SpectrumWithMultiplicity {
        values,
        kramers_collapsed: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bookkeeping_constants() {
        for d in DysonIndex::ALL {
            let gg = d.gamma() * d.gamma_tilde();
            assert_eq!(gg, if d == DysonIndex::Complex { 1 } else { 2 });
            assert_eq!(d.beta_tilde() * d.beta() as f64, 4.0);
        }
        assert!(DysonIndex::from_beta(3).is_err());
    }

    #[test]
    fn gram_scalars() {
        let w = FieldMatrix::from_real(&DMatrix::from_element(1, 1, 2.0));
        assert_eq!(gram(&w).data()[(0, 0)], c(4.0, 0.0));

        let w = FieldMatrix::from_complex(CMatrix::from_element(1, 1, c(0.0, 1.0)));
        assert_eq!(gram(&w).data()[(0, 0)], c(1.0, 0.0));

        let one = CMatrix::from_element(1, 1, c(1.0, 0.0));
        let q = FieldMatrix::from_quaternion_parts(&one, &one).unwrap();
        let h = gram(&q);
        assert_eq!(h.data(), &(CMatrix::identity(2, 2) * c(2.0, 0.0)));
        let s = eigenvalues_hermitian(&h).unwrap();
        assert_eq!(s.values, vec![2.0, 2.0]);
    }

    #[test]
    fn eigenvalues_of_simple_matrices() {
        let id = FieldMatrix::identity(Field::Real, 3);
        let s = eigenvalues_hermitian(&id).unwrap();
        for v in s.values {
            assert!((v - 1.0).abs() < 1e-14);
        }
        let d = FieldMatrix::from_real(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0])));
        let s = eigenvalues_hermitian(&d).unwrap();
        assert!((s.values[0] - 1.0).abs() < 1e-14 && (s.values[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let err = eigenvalues_hermitian(&FieldMatrix::from_complex(m)).unwrap_err();
        assert!(matches!(err, Error::NotHermitian { .. }));
    }

    #[test]
    fn kramers_collapse_examples() {
        let s = |v: Vec<f64>| SpectrumWithMultiplicity {
            values: v,
            kramers_collapsed: false,
        };
        assert_eq!(collapse_kramers(&s(vec![2.0, 2.0]), 1e-8).unwrap().values, vec![2.0]);
        let out = collapse_kramers(&s(vec![1.0, 1.0, 5.0, 5.0]), 1e-8).unwrap();
        assert_eq!(out.values, vec![1.0, 5.0]);
        assert!(out.kramers_collapsed);
        assert!(matches!(
            collapse_kramers(&s(vec![1.0, 2.0]), 1e-8),
            Err(Error::PairingFailure { .. })
        ));
        assert!(collapse_kramers(&s(vec![1.0, 1.0, 2.0]), 1e-8).is_err());
    }

    #[test]
    fn symmetry_validation() {
        let mut m = CMatrix::from_element(2, 2, c(1.0, 0.0));
        assert!(validate_symmetry(&FieldMatrix::from_data_unchecked(Field::Real, m.clone())));
        m[(0, 1)] = c(1.0, 1e-3);
        assert!(!validate_symmetry(&FieldMatrix::from_data_unchecked(Field::Real, m.clone())));
        assert!(validate_symmetry(&FieldMatrix::from_complex(m.clone())));

        let a = CMatrix::from_row_slice(1, 2, &[c(1.0, 2.0), c(-0.5, 0.3)]);
        let b = CMatrix::from_row_slice(1, 2, &[c(0.1, -1.0), c(2.0, 0.0)]);
        let q = FieldMatrix::from_quaternion_parts(&a, &b).unwrap();
        assert!(validate_symmetry(&q));
        let mut broken = q.clone().into_data();
        broken[(1, 1)] += c(1e-6, 0.0);
        assert!(FieldMatrix::from_data(Field::Quaternion, broken).is_err());
        let (a2, b2) = q.quaternion_parts().unwrap();
        assert_eq!((a2, b2), (a, b));
    }

    #[test]
    fn quaternion_gram_is_kramers_degenerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 3, 8, 32] {
            let w = FieldMatrix::gaussian(Field::Quaternion, n, n + 1, 0.25, &mut rng);
            let h = gram(&w);
            assert!(validate_symmetry(&h));
            let s = eigenvalues_hermitian(&h).unwrap();
            let collapsed = collapse_kramers(&s, KRAMERS_TOL).unwrap();
            assert_eq!(collapsed.len() * 2, s.len());
            assert!(s.values[0] >= -1e-10 * s.max_abs());
        }
    }

    #[test]
    fn real_params_roundtrip_entry_layout() {
        let p = [1.0, 2.0, 3.0, 4.0];
        let q = FieldMatrix::from_real_params(Field::Quaternion, 1, 1, &p).unwrap();
        assert_eq!(q.data()[(0, 0)], c(1.0, 2.0));
        assert_eq!(q.data()[(0, 1)], c(3.0, 4.0));
        assert_eq!(q.data()[(1, 0)], c(-3.0, 4.0));
        assert_eq!(q.data()[(1, 1)], c(1.0, -2.0));
        assert!(FieldMatrix::from_real_params(Field::Complex, 1, 1, &p).is_err());
    }
}
