//! Independent reference implementations used as test oracles. Nothing
//! here calls into the library's numerical routines; inputs and outputs are
//! plain `Vec<Vec<Complex64>>`.

#![allow(dead_code, clippy::needless_range_loop)]

use num_complex::Complex64 as C;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

pub type Dense = Vec<Vec<C>>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn identity(n: usize) -> Dense {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect())
        .collect()
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![c(0.0, 0.0); m]; n];
    for i in 0..n {
        for j in 0..m {
            for l in 0..k {
                out[i][j] += a[i][l] * b[l][j];
            }
        }
    }
    out
}

pub fn adjoint(a: &Dense) -> Dense {
    let (n, m) = (a.len(), a[0].len());
    (0..m).map(|j| (0..n).map(|i| a[i][j].conj()).collect()).collect()
}

pub fn max_diff(a: &Dense, b: &Dense) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Laplace expansion along the first row. Fine up to N ≈ 7.
pub fn det_cofactor(a: &Dense) -> C {
    let n = a.len();
    match n {
        0 => c(1.0, 0.0),
        1 => a[0][0],
        _ => {
            let mut total = c(0.0, 0.0);
            for j in 0..n {
                let minor: Dense = a[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| *v).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                total += a[0][j] * det_cofactor(&minor) * sign;
            }
            total
        }
    }
}

/// Dense Toeplitz matrix from lags: entry (i, j) is `lag(i - j)`.
pub fn toeplitz_dense(first_column: &[C], first_row_tail: &[C]) -> Dense {
    let n = first_column.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i >= j { first_column[i - j] } else { first_row_tail[j - i - 1] })
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Eigenvalues by Hessenberg reduction and shifted QR
// ---------------------------------------------------------------------------

fn hessenberg(mut h: Dense) -> Dense {
    let n = h.len();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C> = (k + 1..n).map(|i| h[i][k]).collect();
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { c(1.0, 0.0) };
        let mut v = x.clone();
        v[0] += phase * norm;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v {
            *z /= vn;
        }
        // H ← (I − 2vvᴴ) H
        for j in 0..n {
            let dot: C = (0..v.len()).map(|t| v[t].conj() * h[k + 1 + t][j]).sum();
            for t in 0..v.len() {
                h[k + 1 + t][j] -= v[t] * dot * 2.0;
            }
        }
        // H ← H (I − 2vvᴴ)
        for row in h.iter_mut() {
            let dot: C = (0..v.len()).map(|t| row[k + 1 + t] * v[t]).sum();
            for t in 0..v.len() {
                row[k + 1 + t] -= dot * v[t].conj() * 2.0;
            }
        }
    }
    h
}

fn wilkinson_shift(a: C, b: C, cc: C, d: C) -> C {
    // eigenvalue of [[a, b], [cc, d]] closer to d
    let tr = a + d;
    let det = a * d - b * cc;
    let disc = (tr * tr / 4.0 - det).sqrt();
    let l1 = tr / 2.0 + disc;
    let l2 = tr / 2.0 - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// All eigenvalues of a general complex matrix.
pub fn eigenvalues(a: &Dense) -> Vec<C> {
    let n = a.len();
    if n == 0 {
        return Vec::new();
    }
    let mut h = hessenberg(a.clone());
    let mut eig = vec![c(0.0, 0.0); n];
    let mut hi = n - 1;
    let mut stall = 0usize;
    loop {
        if hi == 0 {
            eig[0] = h[0][0];
            break;
        }
        for i in 1..=hi {
            let scale = h[i][i].norm() + h[i - 1][i - 1].norm();
            if h[i][i - 1].norm() <= f64::EPSILON * scale.max(1e-300) {
                h[i][i - 1] = c(0.0, 0.0);
            }
        }
        if h[hi][hi - 1] == c(0.0, 0.0) {
            eig[hi] = h[hi][hi];
            hi -= 1;
            stall = 0;
            continue;
        }
        let mut lo = hi - 1;
        while lo > 0 && h[lo][lo - 1] != c(0.0, 0.0) {
            lo -= 1;
        }
        stall += 1;
        assert!(stall < 10_000, "QR oracle failed to converge");
        let mu = if stall.is_multiple_of(11) {
            h[hi][hi] + c(h[hi][hi - 1].norm(), 0.0)
        } else {
            wilkinson_shift(h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi])
        };
        for i in lo..=hi {
            h[i][i] -= mu;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (x, y) = (h[k][k], h[k + 1][k]);
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (gc, gs) = if r == 0.0 { (c(1.0, 0.0), c(0.0, 0.0)) } else { (x / r, y / r) };
            for j in k..=hi {
                let (p, q) = (h[k][j], h[k + 1][j]);
                h[k][j] = gc.conj() * p + gs.conj() * q;
                h[k + 1][j] = -gs * p + gc * q;
            }
            rotations.push((k, gc, gs));
        }
        for (k, gc, gs) in rotations {
            for row in h.iter_mut().take(hi + 1).skip(lo) {
                let (p, q) = (row[k], row[k + 1]);
                row[k] = p * gc + q * gs;
                row[k + 1] = -p * gs.conj() + q * gc.conj();
            }
        }
        for i in lo..=hi {
            h[i][i] += mu;
        }
    }
    eig
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(a: &Dense) -> f64 {
    eigenvalues(a).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest distance in an optimal-ish greedy pairing of two multisets.
/// Pairs the globally closest remaining elements first.
pub fn multiset_distance(a: &[C], b: &[C]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for _ in 0..a.len() {
        let mut best = (f64::INFINITY, 0, 0);
        for (i, x) in a.iter().enumerate().filter(|(i, _)| !used_a[*i]) {
            for (j, y) in b.iter().enumerate().filter(|(j, _)| !used_b[*j]) {
                let d = (x - y).norm();
                if d < best.0 {
                    best = (d, i, j);
                }
            }
        }
        used_a[best.1] = true;
        used_b[best.2] = true;
        worst = worst.max(best.0);
    }
    worst
}

// ---------------------------------------------------------------------------
// Monte Carlo capacity oracle
// ---------------------------------------------------------------------------

/// Mean of `log₂ det(I + (γ/N_t) H Hᴴ)` over `trials` i.i.d. Rayleigh
/// draws, optionally with `H = H_w S` for a given transmit factor `S`.
/// Own RNG stream, cofactor determinant.
pub fn capacity_oracle(n_r: usize, n_t: usize, snr_db: f64, trials: usize, seed: u64, tx_factor: Option<&Dense>) -> f64 {
    let mut rng = StdRng::seed_from_u64(seed);
    let gamma = 10f64.powf(snr_db / 10.0);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut total = 0.0;
    for _ in 0..trials {
        let hw: Dense = (0..n_r)
            .map(|_| {
                (0..n_t)
                    .map(|_| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        c(re * scale, im * scale)
                    })
                    .collect()
            })
            .collect();
        let h = match tx_factor {
            Some(s) => matmul(&hw, s),
            None => hw,
        };
        let gram = matmul(&h, &adjoint(&h));
        let mut m = identity(n_r);
        for i in 0..n_r {
            for j in 0..n_r {
                m[i][j] += gram[i][j] * (gamma / n_t as f64);
            }
        }
        total += det_cofactor(&m).re.log2();
    }
    total / trials as f64
}

/// Square root of a nonnegative diagonal matrix.
pub fn diag_sqrt(d: &[f64]) -> Dense {
    let n = d.len();
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { c(d[i].sqrt(), 0.0) } else { c(0.0, 0.0) }).collect())
        .collect()
}

/// Random complex entries with components uniform in [-1, 1).
pub fn random_complex(rng: &mut StdRng, n: usize) -> Vec<C> {
    (0..n)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

pub fn seeded(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}
