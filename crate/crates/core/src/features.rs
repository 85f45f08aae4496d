//! Dense observed feature matrices for items and groups.

use crate::error::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;

/// Dense observed features, one row per node.
///
/// Entries are stored as `f32`, the precision of the on-disk binary format
/// and of typical CNN-activation features; all model arithmetic upcasts to
/// `f64` at the point of use.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    n_rows: usize,
    dim: usize,
    data: Vec<f32>,
}

impl FeatureMatrix {
    /// Builds a matrix from a row-major buffer, rejecting NaN and infinity.
    pub fn from_vec(n_rows: usize, dim: usize, data: Vec<f32>) -> Result<FeatureMatrix> {
        if data.len() != n_rows * dim {
            return Err(Error::ShapeMismatch {
                what: "feature buffer length",
                expected: n_rows * dim,
                found: data.len(),
            });
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite {
                what: "feature matrix",
            });
        }
        Ok(FeatureMatrix { n_rows, dim, data })
    }

    pub fn zeros(n_rows: usize, dim: usize) -> FeatureMatrix {
        FeatureMatrix {
            n_rows,
            dim,
            data: vec![0.0; n_rows * dim],
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, r: usize) -> &[f32] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    /// Copy of row `r` upcast to `f64`, for use as a model input.
    pub fn row_f64(&self, r: usize) -> Vec<f64> {
        self.row(r).iter().map(|&v| v as f64).collect()
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    /// Returns a copy with every nonzero row scaled to unit Euclidean norm.
    /// All-zero rows are left untouched. Norms are accumulated in `f64`.
    pub fn l2_normalize_rows(&self) -> FeatureMatrix {
        let mut out = self.clone();
        for r in 0..self.n_rows {
            let norm_sq: f64 = self.row(r).iter().map(|&v| (v as f64) * (v as f64)).sum();
            if norm_sq > 0.0 {
                let inv = 1.0 / libm::sqrt(norm_sq);
                for v in &mut out.data[r * self.dim..(r + 1) * self.dim] {
                    *v = ((*v as f64) * inv) as f32;
                }
            }
        }
        out
    }
}
