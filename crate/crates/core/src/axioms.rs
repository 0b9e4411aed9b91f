//! Direct check of the coherent configuration axioms, plus test fixtures.
//!
//! [`verify_coherent`] counts intersection numbers cell by cell and never goes
//! through a refinement step, so it can be used to cross-check both engines.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coloring::{validate, ColorMatrix};
use crate::error::{Error, Result};

pub type Cell = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A loop and an arc share a color.
    LoopArcClash,
    /// Two cells share a color but their transposes do not.
    TransposeSplit { first_transpose: u32, second_transpose: u32 },
    /// The number of `w` with `(x[u][w], x[w][v]) == pair` differs.
    IntersectionNumber {
        pair: (u32, u32),
        first_count: usize,
        second_count: usize,
    },
}

/// Two cells of the same color that the axioms tell apart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub color: u32,
    pub first: Cell,
    pub second: Cell,
    pub violation: Violation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoherenceReport {
    pub coherent: bool,
    pub witness: Option<Witness>,
}

type Profile = BTreeMap<(u32, u32), usize>;

fn profile(x: &ColorMatrix, (u, v): Cell) -> Profile {
    let mut counts = Profile::new();
    for w in 0..x.n() {
        *counts.entry((x.get(u, w), x.get(w, v))).or_default() += 1;
    }
    counts
}

/// First pair whose count differs between two profiles.
fn first_difference(a: &Profile, b: &Profile) -> Option<((u32, u32), usize, usize)> {
    let mut keys: Vec<&(u32, u32)> = a.keys().chain(b.keys()).collect();
    keys.sort_unstable();
    keys.dedup();
    keys.into_iter().find_map(|k| {
        let (p, q) = (a.get(k).copied().unwrap_or(0), b.get(k).copied().unwrap_or(0));
        (p != q).then_some((*k, p, q))
    })
}

/// Checks that loop and arc colors are disjoint, that every class has its
/// transpose as a class, and that intersection numbers are constant on every
/// class. Classes are scanned by color id, cells within a class in row-major
/// order; the first violation is reported.
pub fn verify_coherent(x: &ColorMatrix) -> CoherenceReport {
    let n = x.n();
    let mut classes: Vec<Vec<Cell>> = vec![Vec::new(); x.r() as usize];
    for u in 0..n {
        for v in 0..n {
            classes[x.get(u, v) as usize - 1].push((u, v));
        }
    }
    for (idx, cells) in classes.iter().enumerate() {
        let color = idx as u32 + 1;
        let first = cells[0];
        let fail = |second, violation| CoherenceReport {
            coherent: false,
            witness: Some(Witness {
                color,
                first,
                second,
                violation,
            }),
        };
        let is_loop = first.0 == first.1;
        if let Some(&second) = cells.iter().find(|c| (c.0 == c.1) != is_loop) {
            return fail(second, Violation::LoopArcClash);
        }
        let t = x.get(first.1, first.0);
        if let Some(&second) = cells.iter().find(|c| x.get(c.1, c.0) != t) {
            return fail(
                second,
                Violation::TransposeSplit {
                    first_transpose: t,
                    second_transpose: x.get(second.1, second.0),
                },
            );
        }
        let reference = profile(x, first);
        for &second in &cells[1..] {
            if let Some((pair, first_count, second_count)) = first_difference(&reference, &profile(x, second)) {
                return fail(
                    second,
                    Violation::IntersectionNumber {
                        pair,
                        first_count,
                        second_count,
                    },
                );
            }
        }
    }
    CoherenceReport {
        coherent: true,
        witness: None,
    }
}

/// Named test colorings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fixture {
    /// Loops color 1, arcs color 2.
    Trivial(usize),
    /// Arc `(u, v)` colored by `(v - u) mod n`: the group scheme of `Z_n`.
    Cyclic(usize),
    /// Loop / edge / non-edge of the 5-cycle.
    Cycle5,
    /// Loop / edge / non-edge of the Petersen graph.
    Petersen,
    /// Loop / edge / non-edge of the path on `n` vertices.
    Path(usize),
    /// Independent uniform colors in `1..=r`.
    Random { n: usize, r: usize, seed: u64 },
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fixture::Trivial(n) => write!(f, "trivial {n}"),
            Fixture::Cyclic(n) => write!(f, "cyclic {n}"),
            Fixture::Cycle5 => f.write_str("cycle5"),
            Fixture::Petersen => f.write_str("petersen"),
            Fixture::Path(n) => write!(f, "path {n}"),
            Fixture::Random { n, r, seed } => write!(f, "random {n} {r} {seed}"),
        }
    }
}

impl FromStr for Fixture {
    type Err = Error;

    /// Parses `"trivial 6"`, `"cyclic 5"`, `"cycle5"`, `"petersen"`, `"path 4"`
    /// or `"random <n> <r> [seed]"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let bad = || Error::UnknownFixture(s.to_string());
        let num = |i: usize| -> Result<usize> {
            parts
                .get(i)
                .and_then(|p| p.parse().ok())
                .filter(|&v: &usize| v >= 1)
                .ok_or_else(bad)
        };
        let fixture = match parts.first().copied() {
            Some("trivial") if parts.len() == 2 => Fixture::Trivial(num(1)?),
            Some("cyclic") if parts.len() == 2 => Fixture::Cyclic(num(1)?),
            Some("cycle5") if parts.len() == 1 => Fixture::Cycle5,
            Some("petersen") if parts.len() == 1 => Fixture::Petersen,
            Some("path") if parts.len() == 2 => Fixture::Path(num(1)?),
            Some("random") if (3..=4).contains(&parts.len()) => Fixture::Random {
                n: num(1)?,
                r: num(2)?,
                seed: match parts.get(3) {
                    Some(p) => p.parse().map_err(|_| bad())?,
                    None => 0,
                },
            },
            _ => return Err(bad()),
        };
        Ok(fixture)
    }
}

fn graph_coloring(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<ColorMatrix> {
    let mut rows = vec![vec![3i64; n]; n];
    for (u, v) in edges {
        rows[u][v] = 2;
        rows[v][u] = 2;
    }
    for (u, row) in rows.iter_mut().enumerate() {
        row[u] = 1;
    }
    validate(&rows)
}

pub fn make_fixture(fixture: &Fixture) -> Result<ColorMatrix> {
    match *fixture {
        Fixture::Trivial(n) => {
            let rows: Vec<Vec<i64>> = (0..n)
                .map(|u| (0..n).map(|v| if u == v { 1 } else { 2 }).collect())
                .collect();
            validate(&rows)
        }
        Fixture::Cyclic(n) => {
            let rows: Vec<Vec<i64>> = (0..n)
                .map(|u| (0..n).map(|v| ((v + n - u) % n) as i64 + 1).collect())
                .collect();
            validate(&rows)
        }
        Fixture::Cycle5 => graph_coloring(5, (0..5).map(|u| (u, (u + 1) % 5))),
        Fixture::Petersen => {
            // vertices are the 2-subsets of {0..5}, adjacent when disjoint
            let pairs: Vec<(usize, usize)> = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
            let disjoint = |p: (usize, usize), q: (usize, usize)| p.0 != q.0 && p.0 != q.1 && p.1 != q.0 && p.1 != q.1;
            let edges: Vec<(usize, usize)> = (0..10)
                .flat_map(|i| (i + 1..10).map(move |j| (i, j)))
                .filter(|&(i, j)| disjoint(pairs[i], pairs[j]))
                .collect();
            graph_coloring(10, edges)
        }
        Fixture::Path(n) => graph_coloring(n, (1..n).map(|u| (u - 1, u))),
        Fixture::Random { n, r, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rows: Vec<Vec<i64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.random_range(1..=r.max(1) as i64)).collect())
                .collect();
            validate(&rows)
        }
    }
}
