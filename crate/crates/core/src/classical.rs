//! Exact Weisfeiler-Leman refinement.
//!
//! Each step replaces every color by a formal noncommutative variable, squares
//! the color matrix symbolically and splits classes whose cells received
//! different polynomials. A cell of the symbolic square is a sum of monomials
//! `x_i x_j`, stored here as a [`Fingerprint`]: the sorted list of
//! `((i, j), multiplicity)`.
//!
//! The output of [`classical_closure`] is canonical: relabeling vertices
//! relabels the closure the same way and leaves every color id untouched.

use rayon::prelude::*;

use crate::coloring::{rainbow_refine, refine_by, ColorMatrix, RefinementOutcome};
use crate::error::{Error, Result};
use crate::{StoppingReason, WlResult};

/// Ordered pair of colors `(left, right)`: the monomial `x_left x_right`.
pub type ColorPair = (u32, u32);

/// One cell of the symbolic square. Strictly sorted by pair, positive counts
/// summing to `n`. Ordered lexicographically on the entry list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fingerprint(pub Vec<(ColorPair, u32)>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FingerprintMatrix {
    pub n: usize,
    pub cells: Vec<Fingerprint>,
}

impl FingerprintMatrix {
    pub fn get(&self, u: usize, v: usize) -> &Fingerprint {
        &self.cells[u * self.n + v]
    }
}

fn fingerprint(x: &ColorMatrix, u: usize, v: usize, scratch: &mut Vec<ColorPair>) -> Fingerprint {
    let n = x.n();
    scratch.clear();
    scratch.extend((0..n).map(|w| (x.get(u, w), x.get(w, v))));
    scratch.sort_unstable();
    let mut entries: Vec<(ColorPair, u32)> = Vec::new();
    for &pair in scratch.iter() {
        match entries.last_mut() {
            Some((last, count)) if *last == pair => *count += 1,
            _ => entries.push((pair, 1)),
        }
    }
    Fingerprint(entries)
}

/// Symbolic square of the color matrix: cell `(u, v)` is the multiset
/// `{ (x[u][w], x[w][v]) : w }`.
pub fn noncommutative_product(x: &ColorMatrix) -> FingerprintMatrix {
    let n = x.n();
    let cells: Vec<Fingerprint> = (0..n)
        .into_par_iter()
        .flat_map_iter(|u| {
            let mut scratch = Vec::with_capacity(n);
            (0..n)
                .map(|v| fingerprint(x, u, v, &mut scratch))
                .collect::<Vec<_>>()
        })
        .collect();
    FingerprintMatrix { n, cells }
}

/// One exact refinement step.
pub fn classical_step(x: &ColorMatrix) -> RefinementOutcome {
    let product = noncommutative_product(x);
    refine_by(x, &product.cells)
}

/// Rainbow preprocessing followed by exact steps until nothing splits.
pub fn classical_closure(x: &ColorMatrix) -> Result<WlResult> {
    let mut current = rainbow_refine(x);
    let mut trace = vec![current.r() as usize];
    let n = x.n();
    // every refining step adds a class and there are at most n^2 classes
    let cap = n * n + 1;
    let mut iterations = 0;
    loop {
        if iterations == cap {
            return Err(Error::Internal(format!(
                "exact refinement did not stabilize within {cap} steps"
            )));
        }
        let step = classical_step(&current);
        iterations += 1;
        if step.result.r() < current.r() {
            return Err(Error::Internal("refinement lost classes".into()));
        }
        trace.push(step.result.r() as usize);
        current = step.result;
        if !step.refined {
            break;
        }
    }
    Ok(WlResult {
        closure: current,
        iterations,
        trace,
        stopping_reason: StoppingReason::Stable,
        max_value: None,
    })
}

/// `ceil(c * n * log2(n))`, at least 1.
pub fn iteration_budget(n: usize, c: f64) -> usize {
    assert!(n >= 1 && c > 0.0, "iteration_budget needs n >= 1 and C > 0");
    let raw = c * n as f64 * (n as f64).log2();
    (raw.ceil() as usize).max(1)
}
