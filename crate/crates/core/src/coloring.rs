//! Colored complete digraphs as color matrices, and partition refinement.
//!
//! Colors are contiguous ids `1..=r`. Cell `(u, v)` holds the color of the arc
//! from `u` to `v`; diagonal cells are vertex colors. Two matrices describe the
//! same set of relations when their cell partitions coincide, regardless of
//! the color names.

use rayon::slice::ParallelSliceMut;

use crate::error::{Error, Result};

/// Vertex counts above this would overflow the `u32` cell indices used when sorting.
pub const MAX_VERTICES: usize = 65_535;

/// An `n x n` coloring with colors numbered `1..=r`, every color in use.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColorMatrix {
    n: usize,
    r: u32,
    cells: Vec<u32>,
}

/// Outcome of refining a coloring by per-cell values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementOutcome {
    pub refined: bool,
    pub result: ColorMatrix,
    /// `old_to_new[c - 1]` is the input color that new color `c` was split from.
    pub old_to_new: Vec<u32>,
}

/// Shape of a partition with color names forgotten.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionView {
    pub class_count: usize,
    /// Sizes of all classes, ascending.
    pub class_sizes: Vec<usize>,
}

impl ColorMatrix {
    /// Builds a matrix from a flat row-major grid of positive colors, renumbering
    /// them by rank among the distinct values. Unlike [`validate`] the result
    /// does not depend on the vertex order, and inputs that are already
    /// contiguous come back unchanged.
    pub fn from_ranked(n: usize, mut cells: Vec<u32>) -> Result<Self> {
        check_size(n)?;
        if cells.len() != n * n {
            return Err(Error::DimensionMismatch {
                left: cells.len(),
                right: n * n,
            });
        }
        if let Some(pos) = cells.iter().position(|&c| c == 0) {
            return Err(Error::NonPositiveEntry {
                row: pos / n,
                col: pos % n,
                value: 0,
            });
        }
        let mut distinct = cells.clone();
        distinct.sort_unstable();
        distinct.dedup();
        for c in cells.iter_mut() {
            *c = distinct.binary_search(c).expect("value present") as u32 + 1;
        }
        Ok(ColorMatrix {
            n,
            r: distinct.len() as u32,
            cells,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of colors.
    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn cells(&self) -> &[u32] {
        &self.cells
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> u32 {
        self.cells[u * self.n + v]
    }

    pub fn row(&self, u: usize) -> &[u32] {
        &self.cells[u * self.n..(u + 1) * self.n]
    }

    /// Nested-vector copy, mainly for tests and printing.
    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        self.cells.chunks(self.n).map(<[u32]>::to_vec).collect()
    }

    /// Class sizes indexed by color id (`hist[c - 1]`).
    pub fn histogram(&self) -> Vec<usize> {
        let mut hist = vec![0usize; self.r as usize];
        for &c in &self.cells {
            hist[c as usize - 1] += 1;
        }
        hist
    }

    pub fn partition_view(&self) -> PartitionView {
        let mut class_sizes = self.histogram();
        class_sizes.sort_unstable();
        PartitionView {
            class_count: self.r as usize,
            class_sizes,
        }
    }

    /// Relabels vertices: vertex `u` becomes `perm[u]`.
    ///
    /// # Panics
    ///
    /// Panics if `perm` is not a permutation of `0..n`.
    pub fn permute(&self, perm: &[usize]) -> ColorMatrix {
        assert_eq!(perm.len(), self.n, "permutation length");
        let mut seen = vec![false; self.n];
        for &p in perm {
            assert!(p < self.n && !seen[p], "not a permutation");
            seen[p] = true;
        }
        let n = self.n;
        let mut cells = vec![0u32; n * n];
        for u in 0..n {
            for v in 0..n {
                cells[perm[u] * n + perm[v]] = self.cells[u * n + v];
            }
        }
        ColorMatrix { n, r: self.r, cells }
    }

    /// Vertex colors are disjoint from arc colors and every color class has
    /// its transpose as a color class.
    pub fn is_rainbow(&self) -> bool {
        let n = self.n;
        // 1 = seen on the diagonal, 2 = seen off the diagonal
        let mut side = vec![0u8; self.r as usize];
        let mut transpose = vec![0u32; self.r as usize];
        for u in 0..n {
            for v in 0..n {
                let c = self.get(u, v) as usize - 1;
                let s = if u == v { 1 } else { 2 };
                if side[c] == 0 {
                    side[c] = s;
                } else if side[c] != s {
                    return false;
                }
                let t = self.get(v, u);
                if transpose[c] == 0 {
                    transpose[c] = t;
                } else if transpose[c] != t {
                    return false;
                }
            }
        }
        true
    }

    /// Every vertex has its own loop color.
    pub fn is_discrete(&self) -> bool {
        let mut loops: Vec<u32> = (0..self.n).map(|u| self.get(u, u)).collect();
        loops.sort_unstable();
        loops.windows(2).all(|w| w[0] != w[1])
    }
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyGrid);
    }
    if n > MAX_VERTICES {
        return Err(Error::TooLarge(n));
    }
    Ok(())
}

/// Checks a raw grid and renumbers its colors to `1..=r` in order of first
/// occurrence (row-major). The partition is unchanged.
pub fn validate(raw: &[Vec<i64>]) -> Result<ColorMatrix> {
    let n = raw.len();
    check_size(n)?;
    let mut cells = Vec::with_capacity(n * n);
    for (row, line) in raw.iter().enumerate() {
        if line.len() != n {
            return Err(Error::NonSquare {
                row,
                len: line.len(),
                n,
            });
        }
        for (col, &value) in line.iter().enumerate() {
            if value <= 0 {
                return Err(Error::NonPositiveEntry { row, col, value });
            }
            cells.push(value);
        }
    }
    let mut sorted: Vec<i64> = cells.clone();
    sorted.sort_unstable();
    sorted.dedup();
    // new id per distinct value, assigned on first sighting
    let mut ids = vec![0u32; sorted.len()];
    let mut next = 0u32;
    let out: Vec<u32> = cells
        .iter()
        .map(|v| {
            let slot = sorted.binary_search(v).expect("value present");
            if ids[slot] == 0 {
                next += 1;
                ids[slot] = next;
            }
            ids[slot]
        })
        .collect();
    Ok(ColorMatrix {
        n,
        r: next,
        cells: out,
    })
}

/// Refines `x` so that each cell's new color is the rank of the pair
/// `(x[u][v], values[u][v])` among all distinct pairs, sorted lexicographically.
///
/// The ranks depend only on the multiset of keys, so equal inputs always
/// produce identical color ids.
///
/// # Panics
///
/// Panics if `values` does not hold exactly one value per cell.
pub fn refine_by<T: Ord + Sync>(x: &ColorMatrix, values: &[T]) -> RefinementOutcome {
    assert_eq!(values.len(), x.cells.len(), "one value per cell");
    let cells = &x.cells;
    let mut order: Vec<u32> = (0..cells.len() as u32).collect();
    order.par_sort_unstable_by(|&a, &b| {
        let (a, b) = (a as usize, b as usize);
        cells[a]
            .cmp(&cells[b])
            .then_with(|| values[a].cmp(&values[b]))
    });

    let mut out = vec![0u32; cells.len()];
    let mut old_to_new = Vec::new();
    let mut prev: Option<usize> = None;
    for &i in &order {
        let i = i as usize;
        let same = prev.is_some_and(|p| cells[p] == cells[i] && values[p] == values[i]);
        if !same {
            old_to_new.push(cells[i]);
        }
        out[i] = old_to_new.len() as u32;
        prev = Some(i);
    }
    let r = old_to_new.len() as u32;
    RefinementOutcome {
        refined: r > x.r,
        result: ColorMatrix {
            n: x.n,
            r,
            cells: out,
        },
        old_to_new,
    }
}

/// Splits colors so that vertex colors and arc colors are disjoint and classes
/// are closed under transposition: arc `(u, v)` gets the pair
/// `(c(u, v), c(v, u))`, loop `(u, u)` gets `(c(u, u), r + 1)`.
pub fn rainbow_refine(x: &ColorMatrix) -> ColorMatrix {
    let n = x.n;
    let marker = x.r + 1;
    let mut partner = vec![0u32; n * n];
    for u in 0..n {
        for v in 0..n {
            partner[u * n + v] = if u == v { marker } else { x.get(v, u) };
        }
    }
    refine_by(x, &partner).result
}

/// True iff every class of `coarse` is a union of classes of `fine`.
pub fn is_refinement(fine: &ColorMatrix, coarse: &ColorMatrix) -> Result<bool> {
    if fine.n != coarse.n {
        return Err(Error::DimensionMismatch {
            left: fine.n,
            right: coarse.n,
        });
    }
    let mut image = vec![0u32; fine.r as usize];
    for (&f, &c) in fine.cells.iter().zip(&coarse.cells) {
        let slot = &mut image[f as usize - 1];
        if *slot == 0 {
            *slot = c;
        } else if *slot != c {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff the two colorings have the same cell partition.
pub fn is_same_partition(x: &ColorMatrix, y: &ColorMatrix) -> Result<bool> {
    Ok(is_refinement(x, y)? && x.r == y.r)
}
