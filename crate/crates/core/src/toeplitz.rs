//! Toeplitz matrices and their circulant / skew-circulant splitting.
//!
//! A Toeplitz matrix `R` with entries `r_ij = h_{i−j}` splits as `R = A + B`
//! where `A` is circulant and `B` is skew-circulant:
//!
//! ```text
//! a_0 = b_0 = h_0 / 2
//! a_j = (h_{−j} + h_{N−j}) / 2,   b_j = (h_{−j} − h_{N−j}) / 2,   j = 1..N−1
//! ```
//!
//! The split never uses Hermitian structure, so any square Toeplitz matrix
//! is accepted.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{ComplexMatrix, Scalar};

/// Diagonal-constancy tolerance for [`ToeplitzCovariance::from_dense`].
pub const STRUCTURE_TOL: f64 = 1e-10;
/// Tolerance for the `h_{−j} = conj(h_j)` check.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ToeplitzError {
    #[error("Toeplitz input must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("not Toeplitz: entry ({row}, {col}) differs from its diagonal by {deviation:e}")]
    NotToeplitz {
        row: usize,
        col: usize,
        deviation: f64,
    },
    #[error("Hermitian Toeplitz requested but h_{{-{lag}}} != conj(h_{lag}) (off by {deviation:e})")]
    NotHermitian { lag: usize, deviation: f64 },
    #[error("first_column has {column} entries but first_row_tail has {tail}; expected n and n-1")]
    Length { column: usize, tail: usize },
    #[error("Toeplitz order must be positive")]
    Empty,
    #[error("coefficient sequence has {got} entries, expected {expected}")]
    CoefficientLength { expected: usize, got: usize },
}

/// Toeplitz matrix stored by its first column `h_0..h_{N−1}` (subdiagonals)
/// and the tail of its first row `h_{−1}..h_{−N+1}` (superdiagonals).
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzCovariance {
    first_column: Vec<Scalar>,
    first_row_tail: Vec<Scalar>,
    hermitian: bool,
}

impl ToeplitzCovariance {
    pub fn new(first_column: Vec<Scalar>, first_row_tail: Vec<Scalar>) -> Result<Self, ToeplitzError> {
        if first_column.is_empty() {
            return Err(ToeplitzError::Empty);
        }
        if first_row_tail.len() + 1 != first_column.len() {
            return Err(ToeplitzError::Length {
                column: first_column.len(),
                tail: first_row_tail.len(),
            });
        }
        Ok(Self {
            first_column,
            first_row_tail,
            hermitian: false,
        })
    }

    /// Like [`new`](Self::new) but validates `h_{−j} = conj(h_j)` and a real `h_0`.
    pub fn new_hermitian(first_column: Vec<Scalar>, first_row_tail: Vec<Scalar>) -> Result<Self, ToeplitzError> {
        let mut t = Self::new(first_column, first_row_tail)?;
        t.check_hermitian()?;
        t.hermitian = true;
        Ok(t)
    }

    /// Hermitian Toeplitz matrix from its first column alone.
    pub fn hermitian_from_column(first_column: Vec<Scalar>) -> Result<Self, ToeplitzError> {
        let tail = first_column.iter().skip(1).map(|z| z.conj()).collect();
        let mut column = first_column;
        if let Some(h0) = column.first_mut() {
            h0.im = 0.0;
        }
        Self::new_hermitian(column, tail)
    }

    /// Reads `h` off a dense matrix, checking diagonal constancy to 1e-10.
    pub fn from_dense(m: &ComplexMatrix, hermitian: bool) -> Result<Self, ToeplitzError> {
        if !m.is_square() {
            return Err(ToeplitzError::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        let n = m.rows();
        let column: Vec<Scalar> = (0..n).map(|i| m[(i, 0)]).collect();
        let tail: Vec<Scalar> = (1..n).map(|j| m[(0, j)]).collect();
        for i in 1..n {
            for j in 1..n {
                let deviation = (m[(i, j)] - m[(i - 1, j - 1)]).norm();
                if deviation > STRUCTURE_TOL {
                    return Err(ToeplitzError::NotToeplitz {
                        row: i,
                        col: j,
                        deviation,
                    });
                }
            }
        }
        if hermitian {
            Self::new_hermitian(column, tail)
        } else {
            Self::new(column, tail)
        }
    }

    fn check_hermitian(&self) -> Result<(), ToeplitzError> {
        let h0 = self.first_column[0];
        if h0.im.abs() > SYMMETRY_TOL {
            return Err(ToeplitzError::NotHermitian {
                lag: 0,
                deviation: h0.im.abs(),
            });
        }
        for lag in 1..self.n() {
            let deviation = (self.lag(-(lag as isize)) - self.lag(lag as isize).conj()).norm();
            if deviation > SYMMETRY_TOL {
                return Err(ToeplitzError::NotHermitian { lag, deviation });
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.first_column.len()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn first_column(&self) -> &[Scalar] {
        &self.first_column
    }

    pub fn first_row_tail(&self) -> &[Scalar] {
        &self.first_row_tail
    }

    /// `h_k` for `−(N−1) ≤ k ≤ N−1`.
    pub fn lag(&self, k: isize) -> Scalar {
        if k >= 0 {
            self.first_column[k as usize]
        } else {
            self.first_row_tail[(-k) as usize - 1]
        }
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let n = self.n();
        ComplexMatrix::from_fn(n, n, |i, j| self.lag(i as isize - j as isize))
    }

    /// Hermitian projection `(R + R^H)/2`, which is again Toeplitz.
    pub fn hermitian_part(&self) -> Self {
        let n = self.n();
        let column: Vec<Scalar> = (0..n)
            .map(|k| (self.lag(k as isize) + self.lag(-(k as isize)).conj()) * 0.5)
            .collect();
        Self::hermitian_from_column(column).expect("projection is Hermitian by construction")
    }

    pub fn to_json(&self) -> ToeplitzJson {
        ToeplitzJson {
            n: self.n(),
            first_column: self.first_column.iter().map(|z| [z.re, z.im]).collect(),
            first_row_tail: self.first_row_tail.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl std::ops::Add for &ToeplitzCovariance {
    type Output = ToeplitzCovariance;
    fn add(self, rhs: &ToeplitzCovariance) -> ToeplitzCovariance {
        assert_eq!(self.n(), rhs.n(), "Toeplitz add order mismatch");
        let sum = |a: &[Scalar], b: &[Scalar]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        ToeplitzCovariance {
            first_column: sum(&self.first_column, &rhs.first_column),
            first_row_tail: sum(&self.first_row_tail, &rhs.first_row_tail),
            hermitian: false,
        }
    }
}

/// JSON form `{"n": N, "first_column": [[re, im], …], "first_row_tail": [[re, im], …]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToeplitzJson {
    pub n: usize,
    pub first_column: Vec<[f64; 2]>,
    pub first_row_tail: Vec<[f64; 2]>,
}

impl ToeplitzJson {
    pub fn to_toeplitz(&self, hermitian: bool) -> Result<ToeplitzCovariance, ToeplitzError> {
        let to_c = |v: &[[f64; 2]]| v.iter().map(|&[re, im]| Scalar::new(re, im)).collect::<Vec<_>>();
        if self.first_column.len() != self.n {
            return Err(ToeplitzError::CoefficientLength {
                expected: self.n,
                got: self.first_column.len(),
            });
        }
        let (col, tail) = (to_c(&self.first_column), to_c(&self.first_row_tail));
        if hermitian {
            ToeplitzCovariance::new_hermitian(col, tail)
        } else {
            ToeplitzCovariance::new(col, tail)
        }
    }
}

/// Circulant matrix `circ[a_0 … a_{N−1}]`; row `k+1` is row `k` shifted right.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantMatrix {
    first_row: Vec<Scalar>,
}

impl CirculantMatrix {
    pub fn new(first_row: Vec<Scalar>) -> Result<Self, ToeplitzError> {
        if first_row.is_empty() {
            return Err(ToeplitzError::Empty);
        }
        Ok(Self { first_row })
    }

    pub fn n(&self) -> usize {
        self.first_row.len()
    }

    pub fn first_row(&self) -> &[Scalar] {
        &self.first_row
    }

    /// Entry `(i, j) = a_{(j−i) mod N}`.
    pub fn to_dense(&self) -> ComplexMatrix {
        let n = self.n();
        ComplexMatrix::from_fn(n, n, |i, j| self.first_row[(j + n - i) % n])
    }

    pub fn scale(&self, c: Scalar) -> Self {
        Self {
            first_row: self.first_row.iter().map(|&z| z * c).collect(),
        }
    }
}

/// Skew-circulant matrix: like a circulant but entries that wrap around the
/// right edge change sign, so `b_{−j} = −b_{N−j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewCirculantMatrix {
    first_row: Vec<Scalar>,
}

impl SkewCirculantMatrix {
    pub fn new(first_row: Vec<Scalar>) -> Result<Self, ToeplitzError> {
        if first_row.is_empty() {
            return Err(ToeplitzError::Empty);
        }
        Ok(Self { first_row })
    }

    pub fn n(&self) -> usize {
        self.first_row.len()
    }

    pub fn first_row(&self) -> &[Scalar] {
        &self.first_row
    }

    /// Entry `(i, j) = b_{j−i}` for `j ≥ i`, `−b_{N+j−i}` below the diagonal.
    pub fn to_dense(&self) -> ComplexMatrix {
        let n = self.n();
        ComplexMatrix::from_fn(n, n, |i, j| {
            if j >= i {
                self.first_row[j - i]
            } else {
                -self.first_row[n + j - i]
            }
        })
    }

    pub fn scale(&self, c: Scalar) -> Self {
        Self {
            first_row: self.first_row.iter().map(|&z| z * c).collect(),
        }
    }
}

/// `R = A + B` with `A` circulant and `B` skew-circulant.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPair {
    pub circulant: CirculantMatrix,
    pub skew: SkewCirculantMatrix,
    pub source: ToeplitzCovariance,
}

impl SplitPair {
    pub fn n(&self) -> usize {
        self.source.n()
    }

    /// Sum of the dense parts.
    pub fn reconstruct(&self) -> ComplexMatrix {
        &self.circulant.to_dense() + &self.skew.to_dense()
    }

    /// `max |(A + B − R)_ij|`.
    pub fn reconstruction_error(&self) -> f64 {
        self.reconstruct().max_abs_diff(&self.source.to_dense())
    }
}

/// Splits a Toeplitz matrix into circulant plus skew-circulant parts.
pub fn split(r: &ToeplitzCovariance) -> SplitPair {
    let n = r.n();
    let h0 = r.lag(0) * 0.5;
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    a.push(h0);
    b.push(h0);
    for j in 1..n {
        let upper = r.lag(-(j as isize));
        let wrapped = r.lag((n - j) as isize);
        a.push((upper + wrapped) * 0.5);
        b.push((upper - wrapped) * 0.5);
    }
    SplitPair {
        circulant: CirculantMatrix { first_row: a },
        skew: SkewCirculantMatrix { first_row: b },
        source: r.clone(),
    }
}

/// The 4×4 transmit covariance used as the worked example throughout the
/// crate. Note its corner lags are equal (`h_3 = h_{−3}`) rather than
/// conjugate, so the matrix is Toeplitz but not exactly Hermitian.
pub fn example_covariance() -> ToeplitzCovariance {
    let c = Scalar::new;
    ToeplitzCovariance::new(
        vec![c(1.0, 0.0), c(-0.3581, 0.4435), c(0.1700, -0.0034), c(-0.2841, 0.0581)],
        vec![c(-0.3581, -0.4435), c(0.1700, 0.0034), c(-0.2841, 0.0581)],
    )
    .expect("example covariance is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Scalar {
        Scalar::new(re, im)
    }

    #[test]
    fn identity_extracts_unit_lag() {
        let t = ToeplitzCovariance::from_dense(&ComplexMatrix::identity(4), true).unwrap();
        assert_eq!(t.lag(0), c(1.0, 0.0));
        assert!(t.first_column()[1..].iter().chain(t.first_row_tail()).all(|z| *z == c(0.0, 0.0)));
    }

    #[test]
    fn example_lags_from_dense() {
        let dense = example_covariance().to_dense();
        let t = ToeplitzCovariance::from_dense(&dense, false).unwrap();
        assert_eq!(t.lag(0), c(1.0, 0.0));
        assert_eq!(t.lag(-1), c(-0.3581, -0.4435));
        assert_eq!(t.lag(-2), c(0.1700, 0.0034));
        assert_eq!(t.lag(-3), c(-0.2841, 0.0581));
        // equal corner lags break Hermitian symmetry at lag 3
        assert!(matches!(
            ToeplitzCovariance::from_dense(&dense, true),
            Err(ToeplitzError::NotHermitian { lag: 3, .. })
        ));
    }

    #[test]
    fn non_toeplitz_rejected() {
        let mut m = ComplexMatrix::identity(3);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(
            ToeplitzCovariance::from_dense(&m, false),
            Err(ToeplitzError::NotToeplitz { row: 1, col: 2, .. })
        ));
        assert!(matches!(
            ToeplitzCovariance::from_dense(&ComplexMatrix::zeros(2, 3), false),
            Err(ToeplitzError::NotSquare { .. })
        ));
    }

    #[test]
    fn length_validation() {
        assert!(matches!(ToeplitzCovariance::new(vec![], vec![]), Err(ToeplitzError::Empty)));
        assert!(matches!(
            ToeplitzCovariance::new(vec![c(1.0, 0.0); 3], vec![c(0.0, 0.0)]),
            Err(ToeplitzError::Length { column: 3, tail: 1 })
        ));
    }

    #[test]
    fn identity_split_is_half_identity_twice() {
        let t = ToeplitzCovariance::from_dense(&ComplexMatrix::identity(4), true).unwrap();
        let pair = split(&t);
        let half = [c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert_eq!(pair.circulant.first_row(), half);
        assert_eq!(pair.skew.first_row(), half);
        assert_eq!(pair.reconstruct(), ComplexMatrix::identity(4));
    }

    #[test]
    fn order_one_split() {
        let t = ToeplitzCovariance::new(vec![c(3.0, 1.0)], vec![]).unwrap();
        let pair = split(&t);
        assert_eq!(pair.circulant.first_row(), [c(1.5, 0.5)]);
        assert_eq!(pair.reconstruction_error(), 0.0);
    }

    #[test]
    fn dense_layouts_order_two() {
        let (a0, a1) = (c(1.0, 2.0), c(3.0, -1.0));
        let circ = CirculantMatrix::new(vec![a0, a1]).unwrap().to_dense();
        assert_eq!(circ.to_rows(), vec![vec![a0, a1], vec![a1, a0]]);
        let skew = SkewCirculantMatrix::new(vec![a0, a1]).unwrap().to_dense();
        assert_eq!(skew.to_rows(), vec![vec![a0, a1], vec![-a1, a0]]);
    }

    #[test]
    fn shift_layouts() {
        let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
        let circ = CirculantMatrix::new(vec![z, o, z, z]).unwrap().to_dense();
        let skew = SkewCirculantMatrix::new(vec![z, o, z, z]).unwrap().to_dense();
        for i in 0..4 {
            for j in 0..4 {
                let expected_circ = if j == (i + 1) % 4 { o } else { z };
                assert_eq!(circ[(i, j)], expected_circ);
                let expected_skew = if j == i + 1 {
                    o
                } else if i == 3 && j == 0 {
                    -o
                } else {
                    z
                };
                assert_eq!(skew[(i, j)], expected_skew);
            }
        }
    }

    #[test]
    fn hermitian_part_of_example() {
        let h = example_covariance().hermitian_part();
        assert!(h.is_hermitian());
        assert_eq!(h.lag(3), c(-0.2841, 0.0));
        assert_eq!(h.lag(-1), c(-0.3581, -0.4435));
    }

    #[test]
    fn json_round_trip() {
        let t = example_covariance();
        let text = serde_json::to_string(&t.to_json()).unwrap();
        let back: ToeplitzJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_toeplitz(false).unwrap(), t);
        let bad = ToeplitzJson {
            n: 3,
            first_column: vec![[1.0, 0.0]; 2],
            first_row_tail: vec![],
        };
        assert!(bad.to_toeplitz(false).is_err());
    }
}
