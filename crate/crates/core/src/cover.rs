//! Exact minimum-weight vertex cover by branch and bound.
//!
//! Vertices are local indices `0..n`. The search branches on the free vertex
//! with the most free neighbours: first into the cover, then out of it (which
//! forces every free neighbour in). The lower bound at each node is the cost
//! already committed plus a local-ratio pass over the uncovered edges, which
//! dominates the greedy edge-disjoint matching bound.
//!
//! Once optimality is proven, a second pass walks vertices in index order and
//! keeps each one in the cover whenever an optimal cover still exists with it,
//! which yields the lexicographically smallest optimal cover.

use std::time::{Duration, Instant};

const FREE: u8 = 0;
const IN: u8 = 1;
const OUT: u8 = 2;

/// Nodes explored between deadline checks.
const CLOCK_STRIDE: u64 = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct CoverProblem {
    costs: Vec<f64>,
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl CoverProblem {
    /// # Panics
    /// On non-positive or non-finite costs, self-loops, or out-of-range endpoints.
    pub fn new(costs: Vec<f64>, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let n = costs.len();
        assert!(
            costs.iter().all(|c| c.is_finite() && *c > 0.0),
            "cover costs must be positive and finite"
        );
        let mut edges: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(u, v)| {
                assert!(u != v && u < n && v < n, "bad edge ({u},{v})");
                (u.min(v), u.max(v))
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        CoverProblem {
            costs,
            adjacency,
            edges,
        }
    }

    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_cover(&self, selected: &[usize]) -> bool {
        let mut mark = vec![false; self.len()];
        for &v in selected {
            mark[v] = true;
        }
        self.edges.iter().all(|&(u, v)| mark[u] || mark[v])
    }

    /// Sum of costs, accumulated in ascending vertex order.
    pub fn objective(&self, selected: &[usize]) -> f64 {
        let mut sorted = selected.to_vec();
        sorted.sort_unstable();
        sorted.iter().map(|&v| self.costs[v]).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverStatus {
    /// Search space exhausted: the returned cover is optimal.
    Optimal,
    /// Deadline hit after the search found a cover better than the seed.
    Feasible,
    /// Deadline hit before the search improved on the seed (or no time at all).
    NoIncumbent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverOutcome {
    pub status: CoverStatus,
    /// Ascending local indices; `None` only with [`CoverStatus::NoIncumbent`].
    pub cover: Option<Vec<usize>>,
    pub objective: f64,
    pub nodes: u64,
}

enum RunEnd {
    Exhausted,
    TimedOut,
    Found,
}

#[derive(Clone, Copy)]
enum Mode {
    Optimize,
    /// Stop at the first cover with objective within tolerance of the target.
    Reach(f64),
}

struct Frame {
    vertex: usize,
    trail_len: usize,
    cost_before: f64,
    tried_out: bool,
}

struct Search<'a> {
    problem: &'a CoverProblem,
    status: Vec<u8>,
    trail: Vec<usize>,
    cost_in: f64,
    residual: Vec<f64>,
    free_degree: Vec<usize>,
    deadline: Instant,
    nodes: u64,
    best: Option<(f64, Vec<usize>)>,
    improved: bool,
}

fn tolerance(value: f64) -> f64 {
    1e-12 * value.abs().max(1.0)
}

impl<'a> Search<'a> {
    fn new(problem: &'a CoverProblem, deadline: Instant) -> Self {
        let n = problem.len();
        Search {
            problem,
            status: vec![FREE; n],
            trail: Vec::new(),
            cost_in: 0.0,
            residual: vec![0.0; n],
            free_degree: vec![0; n],
            deadline,
            nodes: 0,
            best: None,
            improved: false,
        }
    }

    fn set_in(&mut self, v: usize) {
        self.status[v] = IN;
        self.trail.push(v);
        self.cost_in += self.problem.costs[v];
    }

    /// Excludes `v` and forces its free neighbours in. False on a conflict
    /// with a neighbour that is already excluded.
    fn set_out(&mut self, v: usize) -> bool {
        self.status[v] = OUT;
        self.trail.push(v);
        for i in 0..self.problem.adjacency[v].len() {
            let w = self.problem.adjacency[v][i];
            match self.status[w] {
                OUT => return false,
                FREE => self.set_in(w),
                _ => {}
            }
        }
        true
    }

    fn undo_to(&mut self, len: usize, cost: f64) {
        while self.trail.len() > len {
            let v = self.trail.pop().unwrap();
            self.status[v] = FREE;
        }
        self.cost_in = cost;
    }

    /// Lower bound for the current node and the vertex to branch on (`None`
    /// when every edge is covered).
    fn bound(&mut self) -> (f64, Option<usize>) {
        let p = self.problem;
        for (v, r) in self.residual.iter_mut().enumerate() {
            *r = p.costs[v];
        }
        self.free_degree.iter_mut().for_each(|d| *d = 0);
        let mut extra = 0.0;
        let mut any = false;
        for &(u, v) in &p.edges {
            if self.status[u] != FREE || self.status[v] != FREE {
                continue;
            }
            any = true;
            let delta = self.residual[u].min(self.residual[v]);
            extra += delta;
            self.residual[u] -= delta;
            self.residual[v] -= delta;
            self.free_degree[u] += 1;
            self.free_degree[v] += 1;
        }
        if !any {
            return (self.cost_in, None);
        }
        let mut pick = 0;
        for v in 1..p.len() {
            if self.free_degree[v] > self.free_degree[pick] {
                pick = v;
            }
        }
        (self.cost_in + extra, Some(pick))
    }

    fn current_cover(&self) -> Vec<usize> {
        (0..self.problem.len())
            .filter(|&v| self.status[v] == IN)
            .collect()
    }

    fn run(&mut self, mode: Mode) -> RunEnd {
        let mut frames: Vec<Frame> = Vec::new();
        'node: loop {
            self.nodes += 1;
            if self.nodes.is_multiple_of(CLOCK_STRIDE) && Instant::now() >= self.deadline {
                return RunEnd::TimedOut;
            }
            let (lb, branch) = self.bound();
            let pruned = match mode {
                Mode::Optimize => self
                    .best
                    .as_ref()
                    .is_some_and(|(b, _)| lb >= b - tolerance(*b)),
                Mode::Reach(target) => lb > target + tolerance(target),
            };
            if !pruned {
                match branch {
                    None => {
                        let cover = self.current_cover();
                        let objective = self.problem.objective(&cover);
                        match mode {
                            Mode::Optimize => {
                                self.best = Some((objective, cover));
                                self.improved = true;
                            }
                            Mode::Reach(target) => {
                                if objective <= target + tolerance(target) {
                                    self.best = Some((objective, cover));
                                    return RunEnd::Found;
                                }
                            }
                        }
                    }
                    Some(v) => {
                        frames.push(Frame {
                            vertex: v,
                            trail_len: self.trail.len(),
                            cost_before: self.cost_in,
                            tried_out: false,
                        });
                        self.set_in(v);
                        continue 'node;
                    }
                }
            }
            loop {
                let Some(frame) = frames.last_mut() else {
                    return RunEnd::Exhausted;
                };
                let (len, cost, v) = (frame.trail_len, frame.cost_before, frame.vertex);
                let retry = !frame.tried_out;
                frame.tried_out = true;
                self.undo_to(len, cost);
                if retry {
                    if self.set_out(v) {
                        continue 'node;
                    }
                    continue;
                }
                frames.pop();
            }
        }
    }

    /// Lexicographic tie-break among covers of cost `optimum`. Leaves
    /// `self.best` holding the smallest one found before the deadline.
    fn refine(&mut self, optimum: f64) {
        let Some((_, mut cover)) = self.best.clone() else {
            return;
        };
        self.undo_to(0, 0.0);
        let mut chosen = vec![false; self.problem.len()];
        for &v in &cover {
            chosen[v] = true;
        }
        for v in 0..self.problem.len() {
            if self.status[v] != FREE {
                continue;
            }
            if chosen[v] {
                self.set_in(v);
                continue;
            }
            let (len, cost) = (self.trail.len(), self.cost_in);
            self.set_in(v);
            let (fixed_len, fixed_cost) = (self.trail.len(), self.cost_in);
            match self.run(Mode::Reach(optimum)) {
                RunEnd::Found => {
                    self.undo_to(fixed_len, fixed_cost);
                    let (_, found) = self.best.clone().expect("found cover");
                    chosen.iter_mut().for_each(|c| *c = false);
                    for &w in &found {
                        chosen[w] = true;
                    }
                    cover = found;
                }
                RunEnd::Exhausted => {
                    self.undo_to(len, cost);
                    let ok = self.set_out(v);
                    debug_assert!(ok, "current optimal cover excludes {v}");
                }
                RunEnd::TimedOut => break,
            }
        }
        let objective = self.problem.objective(&cover);
        self.best = Some((objective, cover));
    }
}

/// Solves the cover under a wall-clock budget. `seed` (e.g. a heuristic
/// cover) primes the incumbent; it is not reported as a search result.
pub fn solve_cover(problem: &CoverProblem, seed: Option<&[usize]>, budget: Duration) -> CoverOutcome {
    let start = Instant::now();
    let deadline = start + budget;
    if budget.is_zero() {
        return CoverOutcome {
            status: CoverStatus::NoIncumbent,
            cover: None,
            objective: f64::NAN,
            nodes: 0,
        };
    }

    let mut search = Search::new(problem, deadline);
    if let Some(seed) = seed {
        debug_assert!(problem.is_cover(seed));
        let mut s = seed.to_vec();
        s.sort_unstable();
        search.best = Some((problem.objective(&s), s));
    }

    match search.run(Mode::Optimize) {
        RunEnd::Exhausted | RunEnd::Found => {
            let optimum = search.best.as_ref().map(|b| b.0).unwrap_or(0.0);
            if search.best.is_none() {
                // no edges and no seed: the empty cover
                search.best = Some((0.0, Vec::new()));
            }
            search.refine(optimum);
            let (objective, cover) = search.best.take().expect("incumbent");
            CoverOutcome {
                status: CoverStatus::Optimal,
                cover: Some(cover),
                objective,
                nodes: search.nodes,
            }
        }
        RunEnd::TimedOut if search.improved => {
            let (objective, cover) = search.best.take().expect("incumbent");
            CoverOutcome {
                status: CoverStatus::Feasible,
                cover: Some(cover),
                objective,
                nodes: search.nodes,
            }
        }
        RunEnd::TimedOut => CoverOutcome {
            status: CoverStatus::NoIncumbent,
            cover: None,
            objective: f64::NAN,
            nodes: search.nodes,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(p: &CoverProblem) -> (f64, Vec<usize>) {
        let n = p.len();
        let mut best: Option<(f64, Vec<usize>)> = None;
        for mask in 0u32..(1 << n) {
            let set: Vec<usize> = (0..n).filter(|v| mask & (1 << v) != 0).collect();
            if !p.is_cover(&set) {
                continue;
            }
            let cost: f64 = set.iter().map(|&v| p.costs()[v]).sum();
            let better = match &best {
                None => true,
                Some((b, bs)) => cost < b - 1e-12 || ((cost - b).abs() <= 1e-12 && set < *bs),
            };
            if better {
                best = Some((cost, set));
            }
        }
        best.unwrap()
    }

    const LONG: Duration = Duration::from_secs(30);

    #[test]
    fn path_prefers_middle() {
        let p = CoverProblem::new(vec![1.0; 3], [(0, 1), (1, 2)]);
        let out = solve_cover(&p, None, LONG);
        assert_eq!(out.status, CoverStatus::Optimal);
        assert_eq!(out.cover.unwrap(), vec![1]);
        assert_eq!(out.objective, 1.0);
    }

    #[test]
    fn ties_resolve_to_smallest_set() {
        // 4-cycle: {0,2} and {1,3} both cost 2
        let p = CoverProblem::new(vec![1.0; 4], [(0, 1), (1, 2), (2, 3), (3, 0)]);
        let out = solve_cover(&p, Some(&[1, 3]), LONG);
        assert_eq!(out.cover.unwrap(), vec![0, 2]);
        // single edge with equal costs
        let p = CoverProblem::new(vec![2.0, 2.0], [(0, 1)]);
        assert_eq!(solve_cover(&p, Some(&[1]), LONG).cover.unwrap(), vec![0]);
    }

    #[test]
    fn zero_budget_has_no_incumbent() {
        let p = CoverProblem::new(vec![1.0; 3], [(0, 1), (1, 2)]);
        let out = solve_cover(&p, Some(&[0, 2]), Duration::ZERO);
        assert_eq!(out.status, CoverStatus::NoIncumbent);
        assert!(out.cover.is_none());
    }

    #[test]
    fn edgeless_problem_is_empty_cover() {
        let p = CoverProblem::new(vec![1.0, 2.0], []);
        let out = solve_cover(&p, None, LONG);
        assert_eq!(out.cover.unwrap(), Vec::<usize>::new());
        assert_eq!(out.objective, 0.0);
    }

    #[test]
    fn star_takes_cheap_leaves_or_center() {
        let p = CoverProblem::new(vec![10.0, 1.0, 1.0, 1.0], [(0, 1), (0, 2), (0, 3)]);
        assert_eq!(solve_cover(&p, None, LONG).cover.unwrap(), vec![1, 2, 3]);
        let p = CoverProblem::new(vec![2.0, 1.0, 1.0, 1.0], [(0, 1), (0, 2), (0, 3)]);
        assert_eq!(solve_cover(&p, None, LONG).cover.unwrap(), vec![0]);
    }

    #[test]
    fn matches_enumeration_on_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let n = rng.gen_range(2..=12);
            let costs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..5.0)).collect();
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.35) {
                        edges.push((u, v));
                    }
                }
            }
            let p = CoverProblem::new(costs, edges);
            let (cost, set) = brute_force(&p);
            let out = solve_cover(&p, None, LONG);
            assert_eq!(out.status, CoverStatus::Optimal);
            assert!((out.objective - cost).abs() <= 1e-9);
            assert_eq!(out.cover.unwrap(), set);
        }
    }
}
