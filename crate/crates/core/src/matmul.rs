//! Exact `i64` matrix multiplication.
//!
//! Two backends compute bit-identical products:
//!
//! | Backend | Strategy |
//! |---------|----------|
//! | [`Backend::Naive`] | i-j-k triple loop, single thread. Reference. |
//! | [`Backend::Blocked`] | `TILE x TILE` tiles, i-k-j order inside a tile, row panels in parallel. Default. |
//!
//! Overflow never wraps. Before multiplying, the product of the largest
//! magnitudes in each operand times the inner dimension is compared against
//! `i64::MAX`. When that bound fits, the kernels run unchecked; otherwise every
//! multiply and add is checked and the first overflow aborts the product with
//! [`Error::ArithmeticOverflow`].
//!
//! A Strassen-style backend would slot in as another [`Backend`] variant; it is
//! not provided because its intermediate sums grow past the bound above.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Tile edge for [`Backend::Blocked`]. Three 64x64 `i64` tiles take 96 KiB.
pub const TILE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    Naive,
    #[default]
    Blocked,
}

impl std::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "naive" => Ok(Backend::Naive),
            "blocked" => Ok(Backend::Blocked),
            other => Err(format!("unknown backend `{other}` (expected naive|blocked)")),
        }
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::Naive => "naive",
            Backend::Blocked => "blocked",
        })
    }
}

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<i64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                left: data.len(),
                right: rows * cols,
            });
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    left: row.len(),
                    right: cols,
                });
            }
            data.extend_from_slice(row);
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Square matrix with entries uniform in `1..=max`.
    pub fn random(n: usize, max: i64, rng: &mut impl Rng) -> Self {
        let data = (0..n * n).map(|_| rng.random_range(1..=max)).collect();
        IntMatrix {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[i64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<i64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.cols.max(1)).map(<[i64]>::to_vec).collect()
    }

    fn max_abs(&self) -> u128 {
        self.data
            .iter()
            .map(|v| v.unsigned_abs() as u128)
            .max()
            .unwrap_or(0)
    }
}

/// Exact product `a * b`.
pub fn multiply(a: &IntMatrix, b: &IntMatrix, backend: Backend) -> Result<IntMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch {
            left: a.cols,
            right: b.rows,
        });
    }
    let bound = a.max_abs() * b.max_abs() * a.cols as u128;
    let safe = bound <= i64::MAX as u128;
    let mut c = IntMatrix::zeros(a.rows, b.cols);
    match (backend, safe) {
        (Backend::Naive, true) => naive::<Unchecked>(a, b, &mut c)?,
        (Backend::Naive, false) => naive::<Checked>(a, b, &mut c)?,
        (Backend::Blocked, true) => blocked::<Unchecked>(a, b, &mut c)?,
        (Backend::Blocked, false) => blocked::<Checked>(a, b, &mut c)?,
    }
    Ok(c)
}

/// Multiply-accumulate policy for the kernels.
trait Accumulate {
    fn mul_add(acc: i64, x: i64, y: i64) -> Option<i64>;
}

/// Used only when the magnitude bound proves every partial sum fits.
struct Unchecked;
struct Checked;

impl Accumulate for Unchecked {
    #[inline(always)]
    fn mul_add(acc: i64, x: i64, y: i64) -> Option<i64> {
        Some(acc.wrapping_add(x.wrapping_mul(y)))
    }
}

impl Accumulate for Checked {
    #[inline(always)]
    fn mul_add(acc: i64, x: i64, y: i64) -> Option<i64> {
        acc.checked_add(x.checked_mul(y)?)
    }
}

fn naive<A: Accumulate>(a: &IntMatrix, b: &IntMatrix, c: &mut IntMatrix) -> Result<()> {
    let (n, inner, m) = (a.rows, a.cols, b.cols);
    for i in 0..n {
        for j in 0..m {
            let mut sum = 0i64;
            for k in 0..inner {
                sum = A::mul_add(sum, a.data[i * inner + k], b.data[k * m + j])
                    .ok_or(Error::ArithmeticOverflow)?;
            }
            c.data[i * m + j] = sum;
        }
    }
    Ok(())
}

fn blocked<A: Accumulate>(a: &IntMatrix, b: &IntMatrix, c: &mut IntMatrix) -> Result<()> {
    let (inner, m) = (a.cols, b.cols);
    if m == 0 || a.rows == 0 {
        return Ok(());
    }
    c.data
        .par_chunks_mut(TILE * m)
        .enumerate()
        .try_for_each(|(panel, c_panel)| {
            let i0 = panel * TILE;
            let rows = c_panel.len() / m;
            for k0 in (0..inner).step_by(TILE) {
                let k1 = (k0 + TILE).min(inner);
                for j0 in (0..m).step_by(TILE) {
                    let j1 = (j0 + TILE).min(m);
                    for di in 0..rows {
                        let a_row = &a.data[(i0 + di) * inner..(i0 + di + 1) * inner];
                        let c_row = &mut c_panel[di * m + j0..di * m + j1];
                        for k in k0..k1 {
                            let x = a_row[k];
                            let b_row = &b.data[k * m + j0..k * m + j1];
                            for (cv, &y) in c_row.iter_mut().zip(b_row) {
                                *cv = A::mul_add(*cv, x, y).ok_or(Error::ArithmeticOverflow)?;
                            }
                        }
                    }
                }
            }
            Ok(())
        })
}

/// One row of [`bench_multiply`] output.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub backend: Backend,
    /// Median wall time in seconds.
    pub median_secs: f64,
}

/// Times `multiply` on random square matrices with entries in `1..=10^6`.
pub fn bench_multiply(sizes: &[usize], backend: Backend, repetitions: usize, seed: u64) -> Vec<BenchRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sizes
        .iter()
        .map(|&n| {
            let a = IntMatrix::random(n, 1_000_000, &mut rng);
            let b = IntMatrix::random(n, 1_000_000, &mut rng);
            let times = (0..repetitions.max(1))
                .map(|_| {
                    let start = Instant::now();
                    let c = multiply(&a, &b, backend).expect("entries bounded by 10^6");
                    std::hint::black_box(c);
                    start.elapsed().as_secs_f64()
                })
                .collect();
            BenchRow {
                n,
                backend,
                median_secs: median(times),
            }
        })
        .collect()
}

pub(crate) fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let mid = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[mid]
    } else {
        (xs[mid - 1] + xs[mid]) / 2.0
    }
}
