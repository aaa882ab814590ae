//! Tuple reliability: entropy/rule-frequency attribute weights, weighted
//! similarity, kNN density, conflict degree, and the per-component
//! density–conflict penalty.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{AttrKind, Dataset};
use crate::decomposition::Component;
use crate::error::{Error, Result};
use crate::graph::ConflictGraph;
use crate::rules::{attribute_cfd_frequency, CfdRule};

/// Lower bound applied to every combined attribute weight.
pub const WEIGHT_FLOOR: f64 = 0.1;
/// Default `ε` for both the penalty and the cover cost.
pub const DEFAULT_EPSILON: f64 = 1e-6;
/// Bounds applied to the component weights before normalisation.
pub const COMPONENT_WEIGHT_MIN: f64 = 0.1;
pub const COMPONENT_WEIGHT_MAX: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeWeights {
    pub cfd_part: Vec<f64>,
    pub entropy_part: Vec<f64>,
    pub combined: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
}

impl AttributeWeights {
    pub fn compute(dataset: &Dataset, rules: &[CfdRule], alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0,1), got {alpha}")));
        }
        let attrs = dataset.attr_count();
        let freq = attribute_cfd_frequency(rules, attrs);
        let entropies: Vec<f64> = (0..attrs).map(|a| column_entropy(dataset, a)).collect();
        Ok(Self::from_parts(&freq, &entropies, alpha))
    }

    /// Builds weights from rule frequencies `f_i` and column entropies `H_i`.
    pub fn from_parts(freq: &[usize], entropies: &[f64], alpha: f64) -> Self {
        let beta = 1.0 - alpha;
        let cfd_part = frequency_weights(freq, alpha);
        let entropy_part = entropy_weights(entropies, beta);
        let combined = cfd_part
            .iter()
            .zip(&entropy_part)
            .map(|(c, e)| (c + e).max(WEIGHT_FLOOR))
            .collect();
        AttributeWeights {
            cfd_part,
            entropy_part,
            combined,
            alpha,
            beta,
        }
    }

    pub fn total(&self) -> f64 {
        self.combined.iter().sum()
    }
}

/// `α · f_i / max_j f_j`, or zeros when no attribute appears in a rule.
pub fn frequency_weights(freq: &[usize], alpha: f64) -> Vec<f64> {
    let max = freq.iter().copied().max().unwrap_or(0);
    if max == 0 {
        return vec![0.0; freq.len()];
    }
    freq.iter().map(|&f| alpha * f as f64 / max as f64).collect()
}

/// `β · H_i / Σ_j H_j`, or zeros when every column is constant.
pub fn entropy_weights(entropies: &[f64], beta: f64) -> Vec<f64> {
    let total: f64 = entropies.iter().sum();
    if total <= 0.0 {
        return vec![0.0; entropies.len()];
    }
    entropies.iter().map(|h| beta * h / total).collect()
}

/// Shannon entropy (natural log) of a column's raw values, the missing token
/// counted as an ordinary value.
pub fn column_entropy(dataset: &Dataset, attr: usize) -> f64 {
    let mut counts = vec![0usize; dataset.cardinality(attr)];
    for &c in dataset.column_codes(attr) {
        counts[c as usize] += 1;
    }
    entropy_of_counts(&counts, f64::ln)
}

/// `-Σ p log p` over nonzero counts, with a caller-chosen logarithm.
pub fn entropy_of_counts(counts: &[usize], log: impl Fn(f64) -> f64) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let h: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n as f64;
            -p * log(p)
        })
        .sum();
    // -0.0 for a single-valued column
    h.max(0.0)
}

/// Weighted similarity `Σ_j w_j s_j(a, b)`.
pub fn pair_similarity(a: usize, b: usize, weights: &AttributeWeights, dataset: &Dataset) -> f64 {
    let mut sim = 0.0;
    for (attr, meta) in dataset.attributes().iter().enumerate() {
        let s = match (dataset.is_missing(a, attr), dataset.is_missing(b, attr)) {
            (true, true) => 1.0,
            (true, false) | (false, true) => 0.0,
            (false, false) => match meta.kind {
                AttrKind::Numeric => {
                    let va = dataset.numeric(a, attr).unwrap_or_default();
                    let vb = dataset.numeric(b, attr).unwrap_or_default();
                    1.0 / (1.0 + (va - vb).abs())
                }
                AttrKind::Categorical => {
                    if dataset.code(a, attr) == dataset.code(b, attr) {
                        1.0
                    } else {
                        0.0
                    }
                }
            },
        };
        sim += weights.combined[attr] * s;
    }
    sim
}

/// Precomputed similarities between every row and every pool row.
#[derive(Debug, Clone)]
pub struct SimilarityMatrix {
    pool: Vec<usize>,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn build(dataset: &Dataset, weights: &AttributeWeights, pool: &[usize]) -> Self {
        let width = pool.len();
        let mut values = vec![0.0; dataset.len() * width];
        if width > 0 {
            values
                .par_chunks_mut(width)
                .enumerate()
                .for_each(|(row, out)| {
                    for (slot, &p) in out.iter_mut().zip(pool) {
                        *slot = pair_similarity(row, p, weights, dataset);
                    }
                });
        }
        SimilarityMatrix {
            pool: pool.to_vec(),
            values,
        }
    }

    pub fn pool(&self) -> &[usize] {
        &self.pool
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let w = self.pool.len();
        &self.values[row * w..(row + 1) * w]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DensityOptions {
    pub k: usize,
    /// Largest `rows × pool` similarity matrix that will be materialised;
    /// above it similarities are computed per row on demand.
    pub matrix_budget: usize,
}

impl DensityOptions {
    pub fn new(k: usize) -> Self {
        DensityOptions {
            k,
            matrix_budget: 1 << 24,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityTable {
    pub rho: Vec<f64>,
    pub neighbor_ids: Vec<Vec<usize>>,
    pub k: usize,
    pub pool: Vec<usize>,
    /// True when no row was conflict-free and the whole dataset served as pool.
    pub pool_is_fallback: bool,
}

impl DensityTable {
    /// Density table with no rows scored; used when there is nothing to repair.
    pub fn empty(rows: usize, k: usize) -> Self {
        DensityTable {
            rho: vec![0.0; rows],
            neighbor_ids: vec![Vec::new(); rows],
            k,
            pool: Vec::new(),
            pool_is_fallback: false,
        }
    }

    pub fn get(&self, row: usize) -> f64 {
        self.rho[row]
    }

    pub fn max(&self) -> f64 {
        self.rho.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.rho.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn mean(&self) -> f64 {
        if self.rho.is_empty() {
            0.0
        } else {
            self.rho.iter().sum::<f64>() / self.rho.len() as f64
        }
    }
}

/// Neighbour ordering: higher similarity first, lower row id on ties.
fn neighbor_order(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    b.0.total_cmp(&a.0).then(a.1.cmp(&b.1))
}

fn top_k(mut scored: Vec<(f64, usize)>, k: usize) -> (f64, Vec<usize>) {
    if scored.len() > k {
        scored.select_nth_unstable_by(k - 1, neighbor_order);
        scored.truncate(k);
    }
    scored.sort_unstable_by(neighbor_order);
    let rho = scored.iter().map(|(s, _)| s).sum();
    (rho, scored.into_iter().map(|(_, id)| id).collect())
}

pub fn compute_density(
    dataset: &Dataset,
    graph: &ConflictGraph,
    weights: &AttributeWeights,
    k: usize,
) -> Result<DensityTable> {
    compute_density_with(dataset, graph, weights, DensityOptions::new(k))
}

/// kNN density over the conflict-free rows (or every row when all conflict).
pub fn compute_density_with(
    dataset: &Dataset,
    graph: &ConflictGraph,
    weights: &AttributeWeights,
    options: DensityOptions,
) -> Result<DensityTable> {
    let k = options.k;
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    let n = dataset.len();
    if n < 2 {
        return Err(Error::EmptyPool { rows: n });
    }
    let mut pool = graph.non_conflicting();
    let pool_is_fallback = pool.is_empty();
    if pool_is_fallback {
        pool = (0..n).collect();
    }

    let matrix = (n.saturating_mul(pool.len()) <= options.matrix_budget)
        .then(|| SimilarityMatrix::build(dataset, weights, &pool));

    let per_row: Vec<(f64, Vec<usize>)> = (0..n)
        .into_par_iter()
        .map(|row| {
            let scored: Vec<(f64, usize)> = match &matrix {
                Some(m) => m
                    .row(row)
                    .iter()
                    .zip(&pool)
                    .filter(|(_, &p)| p != row)
                    .map(|(&s, &p)| (s, p))
                    .collect(),
                None => pool
                    .iter()
                    .filter(|&&p| p != row)
                    .map(|&p| (pair_similarity(row, p, weights, dataset), p))
                    .collect(),
            };
            top_k(scored, k)
        })
        .collect();

    let (rho, neighbor_ids) = per_row.into_iter().unzip();
    Ok(DensityTable {
        rho,
        neighbor_ids,
        k,
        pool,
        pool_is_fallback,
    })
}

/// Population coefficient of variation; 0 when the mean is 0 or there are no
/// samples.
pub fn coefficient_of_variation(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return 0.0;
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    var.sqrt() / mean
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentWeights {
    pub cv_density: f64,
    pub cv_conflict: f64,
    /// Clamped, not yet normalised.
    pub clamped_density: f64,
    pub clamped_conflict: f64,
    pub w_density: f64,
    pub w_conflict: f64,
}

impl ComponentWeights {
    /// Weights used for clique components: density only.
    pub const CLIQUE: ComponentWeights = ComponentWeights {
        cv_density: 0.0,
        cv_conflict: 0.0,
        clamped_density: 1.0,
        clamped_conflict: 0.0,
        w_density: 1.0,
        w_conflict: 0.0,
    };

    /// Base 0.5 amplified by dispersion, clamped to [0.1, 0.9], then scaled to
    /// sum to one.
    pub fn from_samples(densities: &[f64], degrees: &[f64]) -> Self {
        let cv_density = coefficient_of_variation(densities);
        let cv_conflict = coefficient_of_variation(degrees);
        let clamp = |w: f64| w.clamp(COMPONENT_WEIGHT_MIN, COMPONENT_WEIGHT_MAX);
        let clamped_density = clamp(0.5 * (1.0 + cv_density));
        let clamped_conflict = clamp(0.5 * (1.0 + cv_conflict));
        let sum = clamped_density + clamped_conflict;
        ComponentWeights {
            cv_density,
            cv_conflict,
            clamped_density,
            clamped_conflict,
            w_density: clamped_density / sum,
            w_conflict: clamped_conflict / sum,
        }
    }
}

pub fn component_weights(
    component: &Component,
    density: &DensityTable,
    graph: &ConflictGraph,
) -> ComponentWeights {
    if component.is_clique {
        return ComponentWeights::CLIQUE;
    }
    let densities: Vec<f64> = component.members.iter().map(|&v| density.get(v)).collect();
    let degrees: Vec<f64> = component
        .members
        .iter()
        .map(|&v| graph.degree(v) as f64)
        .collect();
    ComponentWeights::from_samples(&densities, &degrees)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TupleScore {
    pub rho: f64,
    pub conflict_degree: usize,
    pub penalty: f64,
}

pub fn penalty(rho: f64, conflict_degree: usize, weights: &ComponentWeights, epsilon: f64) -> f64 {
    weights.w_density / (rho + epsilon) + weights.w_conflict * conflict_degree as f64
}

pub fn score_component(
    component: &Component,
    density: &DensityTable,
    graph: &ConflictGraph,
    weights: &ComponentWeights,
    epsilon: f64,
) -> BTreeMap<usize, TupleScore> {
    component
        .members
        .iter()
        .map(|&v| {
            let rho = density.get(v);
            let conflict_degree = graph.degree(v);
            (
                v,
                TupleScore {
                    rho,
                    conflict_degree,
                    penalty: penalty(rho, conflict_degree, weights, epsilon),
                },
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::LoadOptions;
    use crate::decomposition::decompose;
    use crate::rules::parse_rules_str;

    macro_rules! assert_close {
        ($a:expr, $b:expr, $tol:expr) => {{
            let (a, b): (f64, f64) = ($a, $b);
            assert!((a - b).abs() <= $tol, "{a} != {b} (tol {})", $tol);
        }};
    }

    fn employee() -> Dataset {
        let opts = LoadOptions::default().excluding(["Id", "Data labeling"]);
        Dataset::from_reader(include_str!("../data/employee.csv").as_bytes(), &opts).unwrap()
    }

    #[test]
    fn single_valued_column_has_zero_entropy() {
        assert_eq!(entropy_of_counts(&[7], f64::ln), 0.0);
    }

    #[test]
    fn position_entropy() {
        let ds = employee();
        let h = column_entropy(&ds, ds.attribute_index("Position").unwrap());
        let expected = -(0.3f64 * 0.3f64.ln() + 0.2 * 0.2f64.ln() + 0.5 * 0.5f64.ln());
        assert_close!(h, expected, 1e-12);
        assert_close!(h, 1.0297, 1e-4);
    }

    #[test]
    fn cfd_part_for_conditional_rules() {
        let ds = employee();
        let rules = parse_rules_str(include_str!("../data/employee_cfds.txt"), &ds).unwrap();
        let w = AttributeWeights::compute(&ds, &rules, 0.5).unwrap();
        assert_close!(w.cfd_part[1], 0.5 / 3.0, 1e-12);
        assert_close!(w.cfd_part[0], 0.5, 1e-12);
        assert_close!(w.alpha + w.beta, 1.0, 1e-15);
        for i in 0..4 {
            assert_close!(w.combined[i], (w.cfd_part[i] + w.entropy_part[i]).max(0.1), 1e-15);
        }
    }

    #[test]
    fn degenerate_weight_inputs() {
        let w = AttributeWeights::from_parts(&[0, 0], &[1.0, 3.0], 0.5);
        assert_eq!(w.cfd_part, vec![0.0, 0.0]);
        assert_close!(w.combined[0], 0.125, 1e-15);
        assert_close!(w.combined[1], 0.375, 1e-15);

        let w = AttributeWeights::from_parts(&[1, 0], &[0.0, 0.0], 0.5);
        assert_eq!(w.entropy_part, vec![0.0, 0.0]);
        assert_eq!(w.combined, vec![0.5, WEIGHT_FLOOR]);
    }

    #[test]
    fn alpha_out_of_range_rejected() {
        let ds = employee();
        assert!(AttributeWeights::compute(&ds, &[], 1.0).is_err());
        assert!(AttributeWeights::compute(&ds, &[], 0.0).is_err());
    }

    #[test]
    fn similarity_cases() {
        let ds = Dataset::from_rows(
            vec!["n".into(), "c".into(), "m".into()],
            vec![
                vec!["6500".into(), "x".into(), "".into()],
                vec!["6600".into(), "x".into(), "".into()],
                vec!["6500".into(), "y".into(), "z".into()],
            ],
            "",
        )
        .unwrap();
        let w = AttributeWeights::from_parts(&[0, 0, 0], &[0.0, 0.0, 0.0], 0.5);
        // every combined weight sits at the floor
        assert_close!(pair_similarity(0, 0, &w, &ds), 0.3, 1e-12);
        assert_close!(pair_similarity(0, 1, &w, &ds), 0.1 * (1.0 / 101.0 + 1.0 + 1.0), 1e-12);
        assert_close!(pair_similarity(0, 2, &w, &ds), 0.1, 1e-12);
    }

    #[test]
    fn identical_rows_density() {
        let rows = vec![vec!["a".to_owned(), "1".to_owned()]; 5];
        let ds = Dataset::from_rows(vec!["p".into(), "q".into()], rows, "").unwrap();
        let w = AttributeWeights::from_parts(&[1, 1], &[0.0, 0.0], 0.5);
        let g = ConflictGraph::from_edges(5, []);
        let d = compute_density(&ds, &g, &w, 3).unwrap();
        for r in 0..5 {
            assert_close!(d.rho[r], 3.0 * w.total(), 1e-12);
            assert!(!d.neighbor_ids[r].contains(&r));
        }
        let big_k = compute_density(&ds, &g, &w, 50).unwrap();
        assert_close!(big_k.rho[0], 4.0 * w.total(), 1e-12);
    }

    #[test]
    fn density_needs_two_rows() {
        let ds = Dataset::from_rows(vec!["p".into()], vec![vec!["a".into()]], "").unwrap();
        let w = AttributeWeights::from_parts(&[0], &[0.0], 0.5);
        let g = ConflictGraph::from_edges(1, []);
        assert!(matches!(
            compute_density(&ds, &g, &w, 3),
            Err(Error::EmptyPool { rows: 1 })
        ));
    }

    #[test]
    fn all_conflicting_falls_back_to_full_pool() {
        let ds = employee();
        let rules = parse_rules_str(include_str!("../data/employee_fds.txt"), &ds).unwrap();
        let groups = crate::rules::group_rules(&rules);
        let (g, _) = crate::detection::detect_conflicts(&ds, &groups);
        let w = AttributeWeights::compute(&ds, &rules, 0.5).unwrap();
        let d = compute_density(&ds, &g, &w, 3).unwrap();
        assert!(d.pool_is_fallback);
        assert_eq!(d.pool.len(), 10);
        // t0 and t1 are identical, so t1 is t0's nearest neighbour
        assert_eq!(d.neighbor_ids[0][0], 1);
    }

    #[test]
    fn matrix_and_on_demand_agree() {
        let ds = employee();
        let w = AttributeWeights::compute(&ds, &[], 0.5).unwrap();
        let g = ConflictGraph::from_edges(10, [(0, 1), (2, 3)]);
        let cached = compute_density_with(&ds, &g, &w, DensityOptions::new(3)).unwrap();
        let lazy = compute_density_with(
            &ds,
            &g,
            &w,
            DensityOptions {
                k: 3,
                matrix_budget: 0,
            },
        )
        .unwrap();
        assert_eq!(cached, lazy);
    }

    #[test]
    fn symmetric_component_gets_even_weights() {
        let w = ComponentWeights::from_samples(&[2.0, 2.0, 2.0], &[1.0, 1.0, 1.0]);
        assert_close!(w.w_density, 0.5, 1e-15);
        assert_close!(w.w_conflict, 0.5, 1e-15);
    }

    #[test]
    fn dispersed_degrees_shift_weight() {
        let w = ComponentWeights::from_samples(&[1.0, 1.0], &[1.0, 3.0]);
        assert_close!(w.cv_density, 0.0, 1e-15);
        assert_close!(w.cv_conflict, 0.5, 1e-15);
        assert_close!(w.clamped_conflict, 0.75, 1e-15);
        assert_close!(w.w_density, 0.4, 1e-12);
        assert_close!(w.w_conflict, 0.6, 1e-12);
    }

    #[test]
    fn extreme_dispersion_is_clamped() {
        let w = ComponentWeights::from_samples(&[0.0, 0.0, 100.0], &[1.0, 1.0, 1.0]);
        assert_eq!(w.clamped_density, COMPONENT_WEIGHT_MAX);
        assert_close!(w.w_density, 0.9 / 1.4, 1e-12);
    }

    #[test]
    fn zero_mean_cv_is_zero() {
        assert_eq!(coefficient_of_variation(&[0.0, 0.0]), 0.0);
        assert_eq!(coefficient_of_variation(&[]), 0.0);
    }

    #[test]
    fn clique_weights_fixed() {
        let g = ConflictGraph::from_edges(3, [(0, 1), (1, 2), (0, 2)]);
        let c = &decompose(&g)[0];
        let d = DensityTable::empty(3, 3);
        assert_eq!(component_weights(c, &d, &g), ComponentWeights::CLIQUE);
    }

    #[test]
    fn penalty_values() {
        let even = ComponentWeights::from_samples(&[1.0], &[1.0]);
        assert_close!(penalty(1.0, 2, &even, 1e-12), 1.5, 1e-9);
        let clique = ComponentWeights::CLIQUE;
        assert_close!(penalty(2.0, 7, &clique, 1e-6), 1.0 / (2.0 + 1e-6), 1e-15);
        let p = penalty(0.0, 3, &even, 1e-6);
        assert!(p.is_finite());
        assert_close!(p, 0.5e6 + 1.5, 1e-6);
    }

    #[test]
    fn score_uses_full_degree() {
        let g = ConflictGraph::from_edges(4, [(0, 1), (1, 2), (2, 3)]);
        let c = &decompose(&g)[0];
        let mut d = DensityTable::empty(4, 1);
        d.rho = vec![1.0, 2.0, 3.0, 4.0];
        let w = component_weights(c, &d, &g);
        let s = score_component(c, &d, &g, &w, DEFAULT_EPSILON);
        assert_eq!(s[&1].conflict_degree, 2);
        assert_eq!(s[&3].conflict_degree, 1);
        assert_close!(s[&2].penalty, penalty(3.0, 2, &w, DEFAULT_EPSILON), 1e-15);
    }
}
