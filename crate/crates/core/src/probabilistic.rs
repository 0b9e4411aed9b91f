//! Monte Carlo Weisfeiler-Leman refinement.
//!
//! Instead of squaring the color matrix symbolically, each step draws two
//! independent random integers `left[c], right[c]` in `1..=m` for every color
//! `c` and computes the exact integer product `L * R` with
//! `L[u][w] = left[x[u][w]]` and `R[w][v] = right[x[w][v]]`. Cells with equal
//! symbolic entries always get equal numbers, so a step never splits more than
//! the exact step would. Two different symbolic entries differ by a nonzero
//! polynomial of degree 2 and collide with probability at most `2/m`.
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64(seed)`; each step draws
//! `left[1..=r]` then `right[1..=r]` with `Rng::random_range(1..=m)`. For a fixed
//! seed and crate versions every run is reproducible bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classical::iteration_budget;
use crate::coloring::{rainbow_refine, refine_by, ColorMatrix, RefinementOutcome};
use crate::error::{Error, Result};
use crate::matmul::{multiply, Backend, IntMatrix};
use crate::{StoppingReason, WlResult};

/// Default substitution range: leaves room for `n * m^2` in 63 bits up to n ~ 9.2e6.
pub const DEFAULT_M: u64 = 1_000_000;
/// Default number of consecutive quiet steps before the practical policy stops.
pub const DEFAULT_K: usize = 3;

/// Random values substituted for the colors in one step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomSubstitution {
    pub m: u64,
    /// `left[c - 1]` replaces color `c` in the left factor.
    pub left: Vec<i64>,
    /// `right[c - 1]` replaces color `c` in the right factor.
    pub right: Vec<i64>,
}

impl RandomSubstitution {
    pub fn colors(&self) -> usize {
        self.left.len()
    }
}

/// Exact numeric product `L * R` for one substitution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueMatrix(IntMatrix);

impl ValueMatrix {
    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn get(&self, u: usize, v: usize) -> i64 {
        self.0.get(u, v)
    }

    pub fn cells(&self) -> &[i64] {
        self.0.data()
    }

    pub fn max_entry(&self) -> i64 {
        self.0.data().iter().copied().max().unwrap_or(0)
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.0.to_rows()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StoppingPolicy {
    /// Run exactly `ceil(c * n * log2 n)` steps.
    Theoretical { c: f64 },
    /// Stop after `k` consecutive steps that split nothing.
    Practical { k: usize },
}

impl Default for StoppingPolicy {
    fn default() -> Self {
        StoppingPolicy::Practical { k: DEFAULT_K }
    }
}

impl std::fmt::Display for StoppingPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StoppingPolicy::Theoretical { c } => write!(f, "theoretical C={c}"),
            StoppingPolicy::Practical { k } => write!(f, "practical k={k}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunParams {
    pub m: u64,
    pub policy: StoppingPolicy,
    pub seed: u64,
    pub backend: Backend,
}

impl RunParams {
    pub fn new(seed: u64) -> Self {
        RunParams {
            m: DEFAULT_M,
            policy: StoppingPolicy::default(),
            seed,
            backend: Backend::default(),
        }
    }

    fn check(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::BoundTooSmall(self.m));
        }
        match self.policy {
            StoppingPolicy::Practical { k: 0 } => {
                Err(Error::BadPolicy("practical policy needs k >= 1".into()))
            }
            StoppingPolicy::Theoretical { c } if c.is_nan() || c <= 0.0 => {
                Err(Error::BadPolicy("theoretical policy needs C > 0".into()))
            }
            _ => Ok(()),
        }
    }
}

/// The generator behind every seeded run.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws `left[1..=r]` then `right[1..=r]`, each uniform in `1..=m`.
pub fn draw_substitution<R: Rng + ?Sized>(r: usize, m: u64, rng: &mut R) -> Result<RandomSubstitution> {
    if m < 2 {
        return Err(Error::BoundTooSmall(m));
    }
    if m > i64::MAX as u64 {
        return Err(Error::MagnitudeGuard { n: 1, m });
    }
    let mut draw = |_| rng.random_range(1..=m) as i64;
    let left = (0..r).map(&mut draw).collect();
    let right = (0..r).map(&mut draw).collect();
    Ok(RandomSubstitution { m, left, right })
}

/// Fails unless every entry of the numeric product, at most `n * m^2`, fits in `i64`.
pub fn check_magnitude(n: usize, m: u64) -> Result<()> {
    let bound = (n as u128) * (m as u128) * (m as u128);
    if bound > i64::MAX as u128 {
        return Err(Error::MagnitudeGuard { n, m });
    }
    Ok(())
}

/// `A'[u][v] = sum_w left[x[u][w]] * right[x[w][v]]`, computed exactly.
pub fn numeric_product(x: &ColorMatrix, sub: &RandomSubstitution, backend: Backend) -> Result<ValueMatrix> {
    let n = x.n();
    let r = x.r() as usize;
    if sub.left.len() < r || sub.right.len() < r {
        return Err(Error::SubstitutionSize {
            expected: r,
            got: sub.left.len().min(sub.right.len()),
        });
    }
    check_magnitude(n, sub.m)?;
    let lookup = |table: &[i64]| -> Vec<i64> { x.cells().iter().map(|&c| table[c as usize - 1]).collect() };
    let left = IntMatrix::from_vec(n, n, lookup(&sub.left))?;
    let right = IntMatrix::from_vec(n, n, lookup(&sub.right))?;
    let product = multiply(&left, &right, backend)?;
    drop((left, right));
    let values = ValueMatrix(product);
    let limit = n as i128 * sub.m as i128 * sub.m as i128;
    if values.max_entry() as i128 > limit {
        return Err(Error::Internal(format!(
            "product entry {} above n*m^2 = {limit}",
            values.max_entry()
        )));
    }
    Ok(values)
}

/// Refines `x` by the numeric product for a given substitution. Also returns
/// the largest product entry.
pub fn substitution_step(
    x: &ColorMatrix,
    sub: &RandomSubstitution,
    backend: Backend,
) -> Result<(RefinementOutcome, i64)> {
    let values = numeric_product(x, sub, backend)?;
    let max = values.max_entry();
    Ok((refine_by(x, values.cells()), max))
}

/// One Monte Carlo step with a fresh substitution.
pub fn probabilistic_step<R: Rng + ?Sized>(x: &ColorMatrix, m: u64, rng: &mut R) -> Result<RefinementOutcome> {
    let sub = draw_substitution(x.r() as usize, m, rng)?;
    Ok(substitution_step(x, &sub, Backend::default())?.0)
}

/// State of one run between steps.
struct Run {
    current: ColorMatrix,
    trace: Vec<usize>,
    iterations: usize,
    quiet: usize,
    max_value: i64,
    policy: StoppingPolicy,
    budget: usize,
}

impl Run {
    fn start(x: &ColorMatrix, policy: StoppingPolicy) -> Self {
        let current = rainbow_refine(x);
        let budget = match policy {
            StoppingPolicy::Theoretical { c } => iteration_budget(x.n(), c),
            StoppingPolicy::Practical { .. } => 0,
        };
        Run {
            trace: vec![current.r() as usize],
            current,
            iterations: 0,
            quiet: 0,
            max_value: 0,
            policy,
            budget,
        }
    }

    fn done(&self) -> bool {
        match self.policy {
            StoppingPolicy::Theoretical { .. } => self.iterations >= self.budget,
            StoppingPolicy::Practical { k } => self.quiet >= k,
        }
    }

    fn advance(&mut self, sub: &RandomSubstitution, backend: Backend) -> Result<()> {
        let (step, max) = substitution_step(&self.current, sub, backend)?;
        if step.result.r() < self.current.r() {
            return Err(Error::Internal("refinement lost classes".into()));
        }
        self.iterations += 1;
        self.max_value = self.max_value.max(max);
        self.quiet = if step.refined { 0 } else { self.quiet + 1 };
        self.trace.push(step.result.r() as usize);
        self.current = step.result;
        Ok(())
    }

    fn finish(self) -> WlResult {
        let stopping_reason = match self.policy {
            StoppingPolicy::Theoretical { .. } => StoppingReason::BudgetExhausted,
            StoppingPolicy::Practical { .. } => StoppingReason::Stable,
        };
        WlResult {
            closure: self.current,
            iterations: self.iterations,
            trace: self.trace,
            stopping_reason,
            max_value: (self.iterations > 0).then_some(self.max_value),
        }
    }
}

/// Monte Carlo coherent closure: rainbow preprocessing, then random steps
/// until the stopping policy is met.
pub fn probabilistic_closure(x: &ColorMatrix, params: &RunParams) -> Result<WlResult> {
    params.check()?;
    check_magnitude(x.n(), params.m)?;
    let mut rng = seeded_rng(params.seed);
    let mut run = Run::start(x, params.policy);
    while !run.done() {
        let sub = draw_substitution(run.current.r() as usize, params.m, &mut rng)?;
        run.advance(&sub, params.backend)?;
    }
    Ok(run.finish())
}

/// One-sided probabilistic coherence test.
///
/// A coloring that is not rainbow is reported incoherent without sampling.
/// Otherwise `trials` independent steps are run; any split means incoherent.
/// Coherent inputs always pass; an incoherent rainbow input passes with
/// probability at most `(2/m)^trials`. `trials = 0` is treated as 1.
pub fn check_coherent<R: Rng + ?Sized>(x: &ColorMatrix, m: u64, trials: usize, rng: &mut R) -> Result<bool> {
    if m < 2 {
        return Err(Error::BoundTooSmall(m));
    }
    if !x.is_rainbow() {
        return Ok(false);
    }
    for _ in 0..trials.max(1) {
        if probabilistic_step(x, m, rng)?.refined {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Upper bound `2 C n^5 log2(n) / m` on the error of the theoretical policy,
/// clamped to 1. Uninformative (1) when `m <= 2 n^4`; zero for a single vertex.
pub fn error_bound(n: usize, m: f64, c: f64) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    let n = n as f64;
    if m <= 2.0 * n.powi(4) {
        return 1.0;
    }
    (2.0 * c * n.powi(5) * n.log2() / m).min(1.0)
}

/// Chance that `k` consecutive quiet steps all miss an available split: `(2/m)^k`.
pub fn practical_miss_probability(m: u64, k: usize) -> f64 {
    (2.0 / m as f64).powi(k as i32)
}

/// Two runs driven by one random stream.
#[derive(Debug, Clone)]
pub struct PairedOutcome {
    pub first: WlResult,
    pub second: WlResult,
    /// Class sizes by color id after rainbow preprocessing and after each step.
    pub first_histograms: Vec<Vec<usize>>,
    pub second_histograms: Vec<Vec<usize>>,
    /// First index at which the histograms differ, if any.
    pub divergence: Option<usize>,
    /// Candidate isomorphism `first -> second` when both closures are discrete
    /// and never diverged. Not yet verified.
    pub mapping: Option<Vec<usize>>,
}

/// Runs the Monte Carlo closure on `x` and `y` in lockstep, handing both the
/// same substitution at every step. Isomorphic inputs then follow identical
/// trajectories with identical color ids.
pub fn paired_closure(x: &ColorMatrix, y: &ColorMatrix, params: &RunParams) -> Result<PairedOutcome> {
    if x.n() != y.n() {
        return Err(Error::DimensionMismatch {
            left: x.n(),
            right: y.n(),
        });
    }
    params.check()?;
    check_magnitude(x.n(), params.m)?;
    let mut rng = seeded_rng(params.seed);
    let mut a = Run::start(x, params.policy);
    let mut b = Run::start(y, params.policy);
    let mut hist_a = vec![a.current.histogram()];
    let mut hist_b = vec![b.current.histogram()];
    while !(a.done() && b.done()) {
        let r = [&a, &b]
            .iter()
            .filter(|run| !run.done())
            .map(|run| run.current.r() as usize)
            .max()
            .unwrap_or(0);
        let sub = draw_substitution(r, params.m, &mut rng)?;
        for (run, hist) in [(&mut a, &mut hist_a), (&mut b, &mut hist_b)] {
            if !run.done() {
                run.advance(&sub, params.backend)?;
                hist.push(run.current.histogram());
            }
        }
    }
    let divergence = hist_a
        .iter()
        .zip(&hist_b)
        .position(|(p, q)| p != q)
        .or_else(|| (hist_a.len() != hist_b.len()).then(|| hist_a.len().min(hist_b.len())));
    let first = a.finish();
    let second = b.finish();
    let mapping = if divergence.is_none() {
        loop_mapping(&first.closure, &second.closure)
    } else {
        None
    };
    Ok(PairedOutcome {
        first,
        second,
        first_histograms: hist_a,
        second_histograms: hist_b,
        divergence,
        mapping,
    })
}

/// Matches vertices by loop color when both colorings are discrete.
fn loop_mapping(x: &ColorMatrix, y: &ColorMatrix) -> Option<Vec<usize>> {
    if !x.is_discrete() || !y.is_discrete() {
        return None;
    }
    let n = y.n();
    let mut by_color = vec![usize::MAX; y.r() as usize + 1];
    for v in 0..n {
        by_color[y.get(v, v) as usize] = v;
    }
    (0..n)
        .map(|u| {
            let c = x.get(u, u) as usize;
            by_color.get(c).copied().filter(|&v| v != usize::MAX)
        })
        .collect()
}

/// True iff `mapping` is a bijection with `x[u][w] == y[mapping[u]][mapping[w]]`
/// for all `u, w`.
pub fn is_isomorphism(x: &ColorMatrix, y: &ColorMatrix, mapping: &[usize]) -> bool {
    let n = x.n();
    if y.n() != n || mapping.len() != n {
        return false;
    }
    let mut hit = vec![false; n];
    for &v in mapping {
        if v >= n || hit[v] {
            return false;
        }
        hit[v] = true;
    }
    (0..n).all(|u| (0..n).all(|w| x.get(u, w) == y.get(mapping[u], mapping[w])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::classical_closure;
    use crate::coloring::{is_refinement, is_same_partition, validate};

    fn cm(rows: &[&[i64]]) -> ColorMatrix {
        validate(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn p3() -> ColorMatrix {
        cm(&[&[1, 2, 3], &[2, 1, 2], &[3, 2, 1]])
    }

    #[test]
    fn draw_rejects_degenerate_bound() {
        let mut rng = seeded_rng(0);
        assert!(matches!(draw_substitution(3, 1, &mut rng), Err(Error::BoundTooSmall(1))));
    }

    #[test]
    fn draw_is_reproducible() {
        let a = draw_substitution(2, DEFAULT_M, &mut seeded_rng(17)).unwrap();
        let b = draw_substitution(2, DEFAULT_M, &mut seeded_rng(17)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.left.len(), 2);
        assert!(a.left.iter().chain(&a.right).all(|&v| (1..=DEFAULT_M as i64).contains(&v)));
        let c = draw_substitution(2, DEFAULT_M, &mut seeded_rng(18)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn draw_order_is_left_then_right() {
        let mut rng = seeded_rng(5);
        let sub = draw_substitution(3, 1000, &mut rng).unwrap();
        let mut rng = seeded_rng(5);
        let flat: Vec<i64> = (0..6).map(|_| rng.random_range(1..=1000u64) as i64).collect();
        assert_eq!(&flat[..3], &sub.left[..]);
        assert_eq!(&flat[3..], &sub.right[..]);
    }

    #[test]
    fn draw_frequencies_are_uniform() {
        // 10^5 values with m = 4: each frequency within 5 sigma of 1/4
        let mut rng = seeded_rng(2024);
        let sub = draw_substitution(50_000, 4, &mut rng).unwrap();
        let mut counts = [0usize; 4];
        for &v in sub.left.iter().chain(&sub.right) {
            counts[v as usize - 1] += 1;
        }
        let total = 100_000f64;
        let sigma = (total * 0.25 * 0.75).sqrt();
        for c in counts {
            assert!((c as f64 - total / 4.0).abs() <= 5.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn numeric_product_examples() {
        let x = cm(&[&[2, 1], &[1, 2]]);
        // color 1 -> left 3, right 2; color 2 -> left 5, right 7
        let sub = RandomSubstitution {
            m: 10,
            left: vec![3, 5],
            right: vec![2, 7],
        };
        for be in [Backend::Naive, Backend::Blocked] {
            let a = numeric_product(&x, &sub, be).unwrap();
            assert_eq!(a.to_rows(), vec![vec![41, 31], vec![31, 41]]);
        }

        let y = cm(&[&[1, 2, 3], &[3, 1, 2], &[2, 3, 1]]);
        let ones = RandomSubstitution {
            m: 2,
            left: vec![1; 3],
            right: vec![1; 3],
        };
        let a = numeric_product(&y, &ones, Backend::Blocked).unwrap();
        assert!(a.cells().iter().all(|&v| v == 3));

        let single = RandomSubstitution {
            m: 100,
            left: vec![12],
            right: vec![34],
        };
        let a = numeric_product(&cm(&[&[1]]), &single, Backend::Naive).unwrap();
        assert_eq!(a.to_rows(), vec![vec![408]]);
    }

    #[test]
    fn numeric_product_guards() {
        let x = cm(&[&[1, 2], &[2, 1]]);
        let short = RandomSubstitution {
            m: 10,
            left: vec![1],
            right: vec![1],
        };
        assert!(matches!(
            numeric_product(&x, &short, Backend::Naive),
            Err(Error::SubstitutionSize { expected: 2, got: 1 })
        ));
        // 2 * (2^31)^2 = 2^63 > i64::MAX
        let huge = RandomSubstitution {
            m: 1 << 31,
            left: vec![1, 1],
            right: vec![1, 1],
        };
        assert!(matches!(
            numeric_product(&x, &huge, Backend::Naive),
            Err(Error::MagnitudeGuard { n: 2, .. })
        ));
        assert!(check_magnitude(1, 3_037_000_499).is_ok());
        assert!(check_magnitude(2, 3_037_000_499).is_err());
    }

    #[test]
    fn step_on_trivial_scheme_never_refines() {
        let x = cm(&[&[2, 1], &[1, 2]]);
        for seed in 0..50 {
            assert!(!probabilistic_step(&x, 10, &mut seeded_rng(seed)).unwrap().refined);
        }
    }

    #[test]
    fn step_on_path_refines() {
        let out = probabilistic_step(&p3(), DEFAULT_M, &mut seeded_rng(11)).unwrap();
        assert!(out.refined);
        let again = probabilistic_step(&p3(), DEFAULT_M, &mut seeded_rng(11)).unwrap();
        assert_eq!(out, again);
    }

    #[test]
    fn closure_of_uniform_k5() {
        let x = validate(&vec![vec![1; 5]; 5]).unwrap();
        let res = probabilistic_closure(&x, &RunParams::new(1)).unwrap();
        assert_eq!(res.closure.r(), 2);
        assert_eq!(res.iterations, 3);
        assert_eq!(res.stopping_reason, StoppingReason::Stable);
        let exact = classical_closure(&x).unwrap();
        assert!(is_same_partition(&res.closure, &exact.closure).unwrap());
    }

    #[test]
    fn closure_on_coherent_input_with_k1() {
        let x = cm(&[&[1, 2, 3], &[3, 1, 2], &[2, 3, 1]]);
        let params = RunParams {
            policy: StoppingPolicy::Practical { k: 1 },
            ..RunParams::new(4)
        };
        let res = probabilistic_closure(&x, &params).unwrap();
        assert_eq!(res.iterations, 1);
        assert_eq!(res.refining_iterations(), 0);
        assert!(is_same_partition(&res.closure, &x).unwrap());
    }

    #[test]
    fn theoretical_policy_runs_full_budget() {
        let x = p3();
        let params = RunParams {
            policy: StoppingPolicy::Theoretical { c: 1.0 },
            ..RunParams::new(8)
        };
        let res = probabilistic_closure(&x, &params).unwrap();
        assert_eq!(res.iterations, iteration_budget(3, 1.0));
        assert_eq!(res.stopping_reason, StoppingReason::BudgetExhausted);
        assert!(is_refinement(&res.closure, &x).unwrap());
        let exact = classical_closure(&x).unwrap();
        assert!(is_same_partition(&res.closure, &exact.closure).unwrap());
    }

    #[test]
    fn closure_rejects_bad_params() {
        let x = p3();
        let mut params = RunParams::new(0);
        params.m = 1;
        assert!(matches!(probabilistic_closure(&x, &params), Err(Error::BoundTooSmall(1))));
        params.m = 1 << 32;
        assert!(matches!(probabilistic_closure(&x, &params), Err(Error::MagnitudeGuard { .. })));
        params.m = 10;
        params.policy = StoppingPolicy::Practical { k: 0 };
        assert!(matches!(probabilistic_closure(&x, &params), Err(Error::BadPolicy(_))));
        params.policy = StoppingPolicy::Theoretical { c: f64::NAN };
        assert!(matches!(probabilistic_closure(&x, &params), Err(Error::BadPolicy(_))));
    }

    #[test]
    fn closure_is_deterministic() {
        let x = crate::axioms::make_fixture(&crate::axioms::Fixture::Random { n: 20, r: 4, seed: 3 }).unwrap();
        let p = RunParams::new(99);
        assert_eq!(probabilistic_closure(&x, &p).unwrap(), probabilistic_closure(&x, &p).unwrap());
    }

    #[test]
    fn check_coherent_cases() {
        let trivial = cm(&[&[2, 1, 1], &[1, 2, 1], &[1, 1, 2]]);
        for seed in 0..20 {
            assert!(check_coherent(&trivial, 8, 1, &mut seeded_rng(seed)).unwrap());
        }
        // not rainbow: loops share the arc color
        let uniform = cm(&[&[1, 1], &[1, 1]]);
        assert!(!check_coherent(&uniform, 8, 1, &mut seeded_rng(0)).unwrap());
        assert!(!check_coherent(&p3(), DEFAULT_M, 3, &mut seeded_rng(0)).unwrap());
        assert!(check_coherent(&p3(), 1, 3, &mut seeded_rng(0)).is_err());
    }

    #[test]
    fn error_bound_values() {
        let (n, c) = (6usize, 1.5);
        let m = 8.0 * c * (n as f64).powi(5) * (n as f64).log2();
        assert!((error_bound(n, m, c) - 0.25).abs() < 1e-12);
        assert_eq!(error_bound(5, 2.0 * 625.0, 1.0), 1.0);
        assert_eq!(error_bound(5, 100.0, 1.0), 1.0);
        assert_eq!(error_bound(1, 1e6, 1.0), 0.0);
        assert!(error_bound(10, 1e12, 1.0) > error_bound(10, 1e13, 1.0));
        assert!((practical_miss_probability(1_000_000, 3) - 8e-18).abs() < 1e-30);
    }

    #[test]
    fn paired_on_permuted_copy() {
        let x = crate::axioms::make_fixture(&crate::axioms::Fixture::Random { n: 12, r: 3, seed: 1 }).unwrap();
        let perm = [3, 7, 0, 11, 5, 9, 1, 2, 10, 4, 8, 6];
        let y = x.permute(&perm);
        let out = paired_closure(&x, &y, &RunParams::new(5)).unwrap();
        assert_eq!(out.divergence, None);
        assert_eq!(out.first_histograms, out.second_histograms);
        let mapping = out.mapping.expect("random graphs close to discrete colorings");
        assert_eq!(mapping, perm);
        assert!(is_isomorphism(&x, &y, &mapping));
    }

    #[test]
    fn paired_detects_different_graphs() {
        let cycle = crate::axioms::make_fixture(&crate::axioms::Fixture::Cycle5).unwrap();
        let path = crate::axioms::make_fixture(&crate::axioms::Fixture::Path(5)).unwrap();
        let out = paired_closure(&cycle, &path, &RunParams::new(5)).unwrap();
        assert!(out.divergence.is_some());
        assert!(out.mapping.is_none());
        assert!(matches!(
            paired_closure(&cycle, &p3(), &RunParams::new(0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn isomorphism_check_rejects_non_bijections() {
        let x = p3();
        assert!(is_isomorphism(&x, &x, &[0, 1, 2]));
        assert!(is_isomorphism(&x, &x, &[2, 1, 0]));
        assert!(!is_isomorphism(&x, &x, &[1, 0, 2]));
        assert!(!is_isomorphism(&x, &x, &[0, 0, 2]));
        assert!(!is_isomorphism(&x, &x, &[0, 1]));
    }
}
