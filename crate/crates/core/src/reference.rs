//! Published reference values for the worked example, embedded from
//! `data/reference_values.json`. The CLI diff output and the acceptance
//! suite both read from here.

use std::sync::OnceLock;

use serde::Deserialize;

use crate::linalg::{ComplexMatrix, Scalar};
use crate::toeplitz::{ToeplitzCovariance, ToeplitzJson};

pub const REFERENCE_JSON: &str = include_str!("../data/reference_values.json");

#[derive(Debug, Clone, Deserialize)]
pub struct ReferenceValues {
    pub version: u32,
    pub example_covariance: ExampleCovariance,
    pub example_split: ExampleSplit,
    pub spectral_radius_table: RadiusTable,
    pub capacity: CapacityReference,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ExampleCovariance {
    pub source: String,
    #[serde(flatten)]
    pub toeplitz: ToeplitzJson,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ExampleSplit {
    pub source: String,
    pub decimals: u32,
    pub circulant_coefficients: Vec<[f64; 2]>,
    pub skew_coefficients: Vec<[f64; 2]>,
    pub circulant_dense: Vec<Vec<[f64; 2]>>,
    pub skew_dense: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    pub errata: Vec<Erratum>,
}

/// A printed entry that contradicts the rest of the published example.
#[derive(Debug, Clone, Deserialize)]
pub struct Erratum {
    pub matrix: String,
    pub row: usize,
    pub col: usize,
    pub printed: [f64; 2],
    pub consistent: [f64; 2],
    pub note: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RadiusTable {
    pub source: String,
    pub decimals: u32,
    pub rows: Vec<RadiusRow>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
pub struct RadiusRow {
    pub alpha: f64,
    pub sigma: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CapacityReference {
    pub source: String,
    pub n_t: usize,
    pub n_r: usize,
    pub snr_db: f64,
    pub correlation_loss: f64,
    pub gains: Vec<GainReference>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
pub struct GainReference {
    pub alpha: f64,
    pub gain: f64,
}

pub fn reference() -> &'static ReferenceValues {
    static CELL: OnceLock<ReferenceValues> = OnceLock::new();
    CELL.get_or_init(|| serde_json::from_str(REFERENCE_JSON).expect("embedded reference values parse"))
}

pub fn to_scalars(v: &[[f64; 2]]) -> Vec<Scalar> {
    v.iter().map(|&[re, im]| Scalar::new(re, im)).collect()
}

pub fn to_matrix(rows: &[Vec<[f64; 2]>]) -> ComplexMatrix {
    let rows: Vec<Vec<Scalar>> = rows.iter().map(|r| to_scalars(r)).collect();
    ComplexMatrix::from_rows(&rows).expect("reference matrix is rectangular")
}

impl ReferenceValues {
    pub fn covariance(&self) -> ToeplitzCovariance {
        self.example_covariance
            .toeplitz
            .to_toeplitz(false)
            .expect("reference covariance is well formed")
    }

    pub fn table_row(&self, alpha: f64) -> Option<RadiusRow> {
        self.spectral_radius_table.rows.iter().copied().find(|r| r.alpha == alpha)
    }

    pub fn gain(&self, alpha: f64) -> Option<f64> {
        self.capacity.gains.iter().find(|g| g.alpha == alpha).map(|g| g.gain)
    }

    pub fn table_alphas(&self) -> Vec<f64> {
        self.spectral_radius_table.rows.iter().map(|r| r.alpha).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::icc::DEFAULT_ALPHA_GRID;
    use crate::toeplitz::example_covariance;

    #[test]
    fn embedded_values_parse() {
        let r = reference();
        assert_eq!(r.version, 1);
        assert_eq!(r.covariance(), example_covariance());
        assert_eq!(r.table_alphas(), DEFAULT_ALPHA_GRID.to_vec());
        assert_eq!(r.gain(20.0), Some(2.4));
        assert_eq!(r.table_row(30.0).map(|row| row.rho), Some(0.9364));
        assert_eq!(to_matrix(&r.example_split.skew_dense).shape(), (4, 4));
        assert_eq!(r.example_split.errata.len(), 1);
    }
}
