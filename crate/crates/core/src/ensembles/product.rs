use rand::Rng;

use super::{EnsembleSampler, McmcConfig, ProductSpec};
use crate::algebra::{square_reduction, FieldMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ProductSample {
    /// Factors as drawn, in spec order.
    pub factors: Vec<FieldMatrix>,
    /// `W_1 ⋯ W_L`.
    pub product: FieldMatrix,
}

/// Draws every factor independently and multiplies left to right.
pub fn sample_product<R: Rng + ?Sized>(pspec: &ProductSpec, rng: &mut R, mcmc: &McmcConfig) -> Result<ProductSample> {
    sample_product_with(pspec, rng, |spec, rng| {
        let mut sampler = EnsembleSampler::new(spec, mcmc, Some(mcmc), rng)?;
        sampler.draw(rng)
    })
}

/// As [`sample_product`] with a caller-supplied factor sampler.
pub fn sample_product_with<R, F>(pspec: &ProductSpec, rng: &mut R, mut draw: F) -> Result<ProductSample>
where
    R: Rng + ?Sized,
    F: FnMut(&super::EnsembleSpec, &mut R) -> Result<FieldMatrix>,
{
    let factors = &pspec.factors;
    assemble(factors.len(), |j| draw(&factors[j], rng))
}

/// Factors are `n x (n + ν_j)`. Every factor but the last is replaced by its
/// square reduction `S_j` (same Gram matrix); the dropped right unitary is
/// absorbed by the left invariance of the next factor's law, so
/// `S_1 ⋯ S_{L-1} W_L` has the singular values of the product of the
/// induced square factors. A single factor is returned unchanged.
pub(crate) fn assemble<F>(count: usize, mut draw: F) -> Result<ProductSample>
where
    F: FnMut(usize) -> Result<FieldMatrix>,
{
    if count == 0 {
        return Err(Error::InvalidSpec("empty product".into()));
    }
    let factors = (0..count).map(&mut draw).collect::<Result<Vec<_>>>()?;
    let n = factors[0].rows();
    for (j, f) in factors.iter().enumerate() {
        if f.rows() != n || f.cols() < n || f.field() != factors[0].field() {
            return Err(Error::DimensionMismatch(format!(
                "factor {j} is a {:?} {}x{} matrix, expected {:?} with {n} rows",
                f.field(),
                f.rows(),
                f.cols(),
                factors[0].field()
            )));
        }
    }
    let mut product = factors[0].clone();
    for (j, f) in factors.iter().enumerate().skip(1) {
        if j == 1 {
            product = square_reduction(&product)?;
        }
        let next = if j + 1 == count { f.clone() } else { square_reduction(f)? };
        product = product.mul(&next)?;
    }
    Ok(ProductSample { factors, product })
}
