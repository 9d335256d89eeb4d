//! Bipartite Tanner graph and its structural analytics.
//!
//! Symbol nodes are indexed `0..n`, check nodes `0..m`. Adjacency is kept
//! sorted on both sides so that iteration order, and therefore every
//! construction decision downstream, is deterministic. Check nodes carry a
//! target degree next to the realized (partial) one; the difference is the
//! free degree used by the FCD selection criterion.

use std::collections::{BTreeMap, VecDeque};

use crate::degree::{DegreeDistribution, Side};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TannerGraph {
    n: usize,
    m: usize,
    symbol_adj: Vec<Vec<usize>>,
    check_adj: Vec<Vec<usize>>,
    check_target: Vec<usize>,
}

impl TannerGraph {
    /// Creates an edgeless graph with `n` symbols, `m` checks and the given
    /// per-check target degrees.
    pub fn new(n: usize, m: usize, check_target: Vec<usize>) -> Result<Self> {
        if check_target.len() != m {
            return Err(Error::Validation(format!(
                "expected {m} check targets, got {}",
                check_target.len()
            )));
        }
        Ok(Self {
            n,
            m,
            symbol_adj: vec![Vec::new(); n],
            check_adj: vec![Vec::new(); m],
            check_target,
        })
    }

    pub fn symbol_count(&self) -> usize {
        self.n
    }

    pub fn check_count(&self) -> usize {
        self.m
    }

    /// Checks adjacent to `symbol`, ascending.
    pub fn symbol_neighbors(&self, symbol: usize) -> &[usize] {
        &self.symbol_adj[symbol]
    }

    /// Symbols adjacent to `check`, ascending.
    pub fn check_neighbors(&self, check: usize) -> &[usize] {
        &self.check_adj[check]
    }

    pub fn symbol_degree(&self, symbol: usize) -> usize {
        self.symbol_adj[symbol].len()
    }

    /// Target degree d(c) of a check node.
    pub fn check_target(&self, check: usize) -> usize {
        self.check_target[check]
    }

    /// Realized (partial) degree of a check node.
    pub fn check_partial(&self, check: usize) -> usize {
        self.check_adj[check].len()
    }

    /// Free degree f(c) = d(c) - partial(c). Negative after overfill.
    pub fn free_degree(&self, check: usize) -> i64 {
        self.check_target[check] as i64 - self.check_adj[check].len() as i64
    }

    pub fn edge_count(&self) -> usize {
        self.symbol_adj.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, check: usize, symbol: usize) -> bool {
        self.check_adj[check].binary_search(&symbol).is_ok()
    }

    /// Inserts the edge (check, symbol), keeping both adjacency lists sorted.
    pub fn add_edge(&mut self, check: usize, symbol: usize) -> Result<()> {
        if check >= self.m || symbol >= self.n {
            return Err(Error::Structural(format!(
                "edge (c{check}, s{symbol}) out of bounds for {}x{} graph",
                self.m, self.n
            )));
        }
        let pos_c = match self.check_adj[check].binary_search(&symbol) {
            Ok(_) => {
                return Err(Error::Structural(format!(
                    "duplicate edge (c{check}, s{symbol})"
                )))
            }
            Err(pos) => pos,
        };
        self.check_adj[check].insert(pos_c, symbol);
        let pos_s = self.symbol_adj[symbol]
            .binary_search(&check)
            .expect_err("mirror list cannot already contain the edge");
        self.symbol_adj[symbol].insert(pos_s, check);
        Ok(())
    }

    /// Realized check-degree spectrum: degree -> number of checks.
    pub fn check_degree_spectrum(&self) -> BTreeMap<usize, usize> {
        let mut spectrum = BTreeMap::new();
        for adj in &self.check_adj {
            *spectrum.entry(adj.len()).or_insert(0) += 1;
        }
        spectrum
    }

    /// Realized symbol-degree spectrum: degree -> number of symbols.
    pub fn symbol_degree_spectrum(&self) -> BTreeMap<usize, usize> {
        let mut spectrum = BTreeMap::new();
        for adj in &self.symbol_adj {
            *spectrum.entry(adj.len()).or_insert(0) += 1;
        }
        spectrum
    }

    /// Length of the shortest cycle, or `None` for a forest. Bipartite, so
    /// the result is always even.
    ///
    /// BFS from every symbol node with parent-edge exclusion; every cycle
    /// alternates sides, so rooting at symbols covers all of them. The search
    /// is pruned once a level can no longer improve on the best cycle found.
    pub fn girth(&self) -> Option<usize> {
        let mut scratch = BfsScratch::new(self.n + self.m);
        let mut best = usize::MAX;
        for root in 0..self.n {
            best = best.min(self.shortest_cycle_over(root, best, &mut scratch));
        }
        (best != usize::MAX).then_some(best)
    }

    /// Shortest cycle passing through `symbol`, or `None` if no cycle does.
    ///
    /// A cycle through the symbol uses two distinct incident edges, so for
    /// each incident check the shortest alternative path back to it is
    /// measured with the direct edge removed.
    pub fn local_girth(&self, symbol: usize) -> Option<usize> {
        let mut scratch = BfsScratch::new(self.n + self.m);
        let mut best = usize::MAX;
        for &check in self.symbol_neighbors(symbol) {
            if let Some(d) = self.distance_avoiding_edge(symbol, check, best, &mut scratch) {
                best = best.min(d + 1);
            }
        }
        (best != usize::MAX).then_some(best)
    }

    // Upper bound on the shortest cycle found from this root; exact when the
    // root lies on a globally shortest cycle, which some root always does.
    fn shortest_cycle_over(&self, root: usize, mut best: usize, s: &mut BfsScratch) -> usize {
        s.reset();
        s.visit(root, 0, usize::MAX);
        while let Some(u) = s.queue.pop_front() {
            let du = s.dist[u];
            if 2 * du >= best {
                break;
            }
            let (neighbors, nb_offset) = if u < self.n {
                (&self.symbol_adj[u][..], self.n)
            } else {
                (&self.check_adj[u - self.n][..], 0usize)
            };
            for &raw in neighbors {
                let v = raw + nb_offset;
                if v == s.parent[u] {
                    continue;
                }
                if s.dist[v] == usize::MAX {
                    s.visit(v, du + 1, u);
                } else {
                    best = best.min(du + s.dist[v] + 1);
                }
            }
        }
        best
    }

    // BFS distance from `symbol` to `check` with the direct edge excluded.
    fn distance_avoiding_edge(
        &self,
        symbol: usize,
        check: usize,
        best: usize,
        s: &mut BfsScratch,
    ) -> Option<usize> {
        let target = self.n + check;
        s.reset();
        s.visit(symbol, 0, usize::MAX);
        while let Some(u) = s.queue.pop_front() {
            let du = s.dist[u];
            if du + 1 >= best {
                return None;
            }
            let (neighbors, nb_offset) = if u < self.n {
                (&self.symbol_adj[u][..], self.n)
            } else {
                (&self.check_adj[u - self.n][..], 0usize)
            };
            for &raw in neighbors {
                let v = raw + nb_offset;
                if u == symbol && v == target {
                    continue; // the excluded direct edge
                }
                if s.dist[v] == usize::MAX {
                    if v == target {
                        return Some(du + 1);
                    }
                    s.visit(v, du + 1, u);
                }
            }
        }
        None
    }

    /// ρ-compliance in the edge perspective: the realized fraction of edges
    /// attached to degree-j checks is compared term by term against the
    /// target coefficients. Realized degrees outside the target support
    /// contribute their full mass.
    pub fn rho_compliance(&self, rho: &DegreeDistribution) -> Result<f64> {
        let edges = self.edge_count();
        if edges == 0 {
            return Err(Error::Validation(
                "rho-compliance is undefined on a graph with no edges".into(),
            ));
        }
        let spectrum = self.check_degree_spectrum();
        let mut eta = 0.0;
        let mut degrees: Vec<usize> = rho.coefficients().keys().copied().collect();
        degrees.extend(spectrum.keys().copied());
        degrees.sort_unstable();
        degrees.dedup();
        for degree in degrees {
            let target = rho.coefficients().get(&degree).copied().unwrap_or(0.0);
            let count = spectrum.get(&degree).copied().unwrap_or(0);
            let realized = (degree * count) as f64 / edges as f64;
            eta += (target - realized).abs();
        }
        Ok(eta)
    }

    /// ρ-compliance in the node perspective: the target is first converted to
    /// node fractions, the realized side is the fraction of checks per degree.
    pub fn rho_compliance_node(&self, rho: &DegreeDistribution) -> Result<f64> {
        if self.edge_count() == 0 {
            return Err(Error::Validation(
                "rho-compliance is undefined on a graph with no edges".into(),
            ));
        }
        let targets = rho.node_fractions();
        let spectrum = self.check_degree_spectrum();
        let mut eta = 0.0;
        let mut degrees: Vec<usize> = targets.keys().copied().collect();
        degrees.extend(spectrum.keys().copied());
        degrees.sort_unstable();
        degrees.dedup();
        for degree in degrees {
            let target = targets.get(&degree).copied().unwrap_or(0.0);
            let count = spectrum.get(&degree).copied().unwrap_or(0);
            eta += (target - count as f64 / self.m as f64).abs();
        }
        Ok(eta)
    }

    /// Analyzes the subgraph induced by degree-2 symbol nodes and their
    /// incident checks. Each degree-2 symbol acts as an edge between two
    /// checks; the subgraph is a zig-zag forest exactly when no component
    /// carries as many symbols as checks.
    pub fn degree2_chain_report(&self) -> Degree2ChainReport {
        let mut dsu = DisjointSet::new(self.m);
        for adj in &self.symbol_adj {
            if adj.len() == 2 {
                dsu.union(adj[0], adj[1]);
            }
        }
        let mut edges_per_root: BTreeMap<usize, usize> = BTreeMap::new();
        for adj in &self.symbol_adj {
            if adj.len() == 2 {
                *edges_per_root.entry(dsu.find(adj[0])).or_insert(0) += 1;
            }
        }
        let mut checks_per_root: BTreeMap<usize, usize> = BTreeMap::new();
        for check in 0..self.m {
            let root = dsu.find(check);
            if edges_per_root.contains_key(&root) {
                *checks_per_root.entry(root).or_insert(0) += 1;
            }
        }
        let mut acyclic = true;
        let mut longest_chain = 0;
        for (&root, &edges) in &edges_per_root {
            longest_chain = longest_chain.max(edges);
            if edges + 1 != checks_per_root[&root] {
                acyclic = false;
            }
        }
        Degree2ChainReport {
            acyclic,
            chain_count: edges_per_root.len(),
            longest_chain,
        }
    }
}

/// Topology of the subgraph spanned by degree-2 symbol nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Degree2ChainReport {
    /// True when every component of the induced subgraph is a tree.
    pub acyclic: bool,
    /// Number of components containing at least one degree-2 symbol.
    pub chain_count: usize,
    /// Largest number of degree-2 symbols in a single component.
    pub longest_chain: usize,
}

/// Builds the edge-perspective distribution realized by a degree sequence.
pub fn distribution_from_sequence(
    side: Side,
    degrees: &[usize],
) -> Result<DegreeDistribution> {
    let total: usize = degrees.iter().sum();
    if total == 0 {
        return Err(Error::Validation("sequence has no sockets".into()));
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &d in degrees {
        *counts.entry(d).or_insert(0) += 1;
    }
    let coefficients = counts
        .into_iter()
        .map(|(d, c)| (d, (d * c) as f64 / total as f64))
        .collect();
    DegreeDistribution::new(side, coefficients)
}

struct BfsScratch {
    dist: Vec<usize>,
    parent: Vec<usize>,
    queue: VecDeque<usize>,
    touched: Vec<usize>,
}

impl BfsScratch {
    fn new(size: usize) -> Self {
        Self {
            dist: vec![usize::MAX; size],
            parent: vec![usize::MAX; size],
            queue: VecDeque::new(),
            touched: Vec::new(),
        }
    }

    fn visit(&mut self, node: usize, dist: usize, parent: usize) {
        self.dist[node] = dist;
        self.parent[node] = parent;
        self.touched.push(node);
        self.queue.push_back(node);
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            self.dist[v] = usize::MAX;
            self.parent[v] = usize::MAX;
        }
        self.touched.clear();
        self.queue.clear();
    }
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(size: usize) -> Self {
        Self {
            parent: (0..size).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph_with_edges(n: usize, m: usize, edges: &[(usize, usize)]) -> TannerGraph {
        let mut g = TannerGraph::new(n, m, vec![6; m]).unwrap();
        for &(c, s) in edges {
            g.add_edge(c, s).unwrap();
        }
        g
    }

    #[test]
    fn add_edge_updates_both_sides() {
        let mut g = TannerGraph::new(2, 2, vec![3, 3]).unwrap();
        g.add_edge(0, 0).unwrap();
        assert_eq!(g.symbol_neighbors(0), &[0]);
        assert_eq!(g.check_neighbors(0), &[0]);
        assert_eq!(g.check_partial(0), 1);
        g.add_edge(1, 0).unwrap();
        assert_eq!(g.symbol_neighbors(0), &[0, 1]);
    }

    #[test]
    fn add_edge_rejects_duplicate() {
        let mut g = TannerGraph::new(1, 1, vec![2]).unwrap();
        g.add_edge(0, 0).unwrap();
        let err = g.add_edge(0, 0).unwrap_err();
        assert!(matches!(err, Error::Structural(_)), "{err}");
    }

    #[test]
    fn free_degree_tracks_partial() {
        let mut g = TannerGraph::new(2, 1, vec![2]).unwrap();
        assert_eq!(g.free_degree(0), 2);
        g.add_edge(0, 0).unwrap();
        g.add_edge(0, 1).unwrap();
        assert_eq!(g.free_degree(0), 0);
    }

    #[test]
    fn girth_of_four_cycle() {
        // c0 - s0 - c1 - s1 - c0
        let g = graph_with_edges(2, 2, &[(0, 0), (1, 0), (1, 1), (0, 1)]);
        assert_eq!(g.girth(), Some(4));
    }

    #[test]
    fn girth_of_zig_zag_chain_is_infinite() {
        // c0 - s0 - c1 - s1 - c2
        let g = graph_with_edges(2, 3, &[(0, 0), (1, 0), (1, 1), (2, 1)]);
        assert_eq!(g.girth(), None);
    }

    #[test]
    fn girth_of_complete_bipartite_3x3() {
        let edges: Vec<(usize, usize)> = (0..3).flat_map(|c| (0..3).map(move |s| (c, s))).collect();
        let g = graph_with_edges(3, 3, &edges);
        assert_eq!(g.girth(), Some(4));
    }

    #[test]
    fn local_girth_on_four_cycle() {
        let g = graph_with_edges(2, 2, &[(0, 0), (1, 0), (1, 1), (0, 1)]);
        assert_eq!(g.local_girth(0), Some(4));
        assert_eq!(g.local_girth(1), Some(4));
    }

    #[test]
    fn local_girth_in_tree_is_infinite() {
        let g = graph_with_edges(2, 3, &[(0, 0), (1, 0), (1, 1), (2, 1)]);
        assert_eq!(g.local_girth(0), None);
    }

    #[test]
    fn local_girth_ignores_remote_short_cycle() {
        // 6-cycle through s0: c0-s0-c1-s1-c2-s2-c0
        // remote 4-cycle: c3-s3-c4-s4-c3
        let g = graph_with_edges(
            5,
            5,
            &[
                (0, 0),
                (1, 0),
                (1, 1),
                (2, 1),
                (2, 2),
                (0, 2),
                (3, 3),
                (4, 3),
                (4, 4),
                (3, 4),
            ],
        );
        assert_eq!(g.local_girth(0), Some(6));
        assert_eq!(g.girth(), Some(4));
    }

    #[test]
    fn rho_compliance_zero_for_exact_match() {
        let rho = DegreeDistribution::new(Side::Check, [(2usize, 1.0)].into_iter().collect())
            .unwrap();
        let mut g = TannerGraph::new(2, 2, vec![2, 2]).unwrap();
        for (c, s) in [(0, 0), (1, 0), (1, 1), (0, 1)] {
            g.add_edge(c, s).unwrap();
        }
        assert!(g.rho_compliance(&rho).unwrap().abs() < 1e-12);
        assert!(g.rho_compliance_node(&rho).unwrap().abs() < 1e-12);
    }

    #[test]
    fn rho_compliance_mixed_degrees_hand_value() {
        // 2 checks of degree 2 and 1 of degree 4 against rho = {2: 0.5, 4: 0.5}:
        // realized edge fractions are 4/8 and 4/8, so eta = 0.
        let rho = DegreeDistribution::new(
            Side::Check,
            [(2usize, 0.5), (4usize, 0.5)].into_iter().collect(),
        )
        .unwrap();
        let mut g = TannerGraph::new(4, 3, vec![2, 2, 4]).unwrap();
        for (c, s) in [(0, 0), (0, 1), (1, 2), (1, 3), (2, 0), (2, 1), (2, 2), (2, 3)] {
            g.add_edge(c, s).unwrap();
        }
        assert!(g.rho_compliance(&rho).unwrap().abs() < 1e-12);
        // node targets (2/3, 1/3) are realized exactly as well
        assert!(g.rho_compliance_node(&rho).unwrap().abs() < 1e-12);
    }

    #[test]
    fn rho_compliance_penalizes_out_of_support_degrees() {
        // both checks realized at degree 2 against a pure degree-3 target
        let rho = DegreeDistribution::new(Side::Check, [(3usize, 1.0)].into_iter().collect())
            .unwrap();
        let mut g = TannerGraph::new(2, 2, vec![3, 3]).unwrap();
        for (c, s) in [(0, 0), (1, 0), (1, 1), (0, 1)] {
            g.add_edge(c, s).unwrap();
        }
        // |1 - 0| for the empty degree 3 plus |0 - 1| for the realized degree 2
        assert!((g.rho_compliance(&rho).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rho_compliance_errors_on_empty_graph() {
        let rho = DegreeDistribution::new(Side::Check, [(3usize, 1.0)].into_iter().collect())
            .unwrap();
        let g = TannerGraph::new(2, 2, vec![3, 3]).unwrap();
        assert!(g.rho_compliance(&rho).is_err());
    }

    #[test]
    fn degree2_report_zig_zag_chain() {
        // three degree-2 symbols chained: c0-s0-c1-s1-c2-s2-c3
        let g = graph_with_edges(3, 4, &[(0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (3, 2)]);
        let report = g.degree2_chain_report();
        assert!(report.acyclic);
        assert_eq!(report.chain_count, 1);
        assert_eq!(report.longest_chain, 3);
    }

    #[test]
    fn degree2_report_detects_ring() {
        // ring: c0-s0-c1-s1-c0
        let g = graph_with_edges(2, 2, &[(0, 0), (1, 0), (1, 1), (0, 1)]);
        let report = g.degree2_chain_report();
        assert!(!report.acyclic);
        assert_eq!(report.chain_count, 1);
    }

    #[test]
    fn degree2_report_empty_without_degree2_symbols() {
        // single degree-3 symbol
        let g = graph_with_edges(1, 3, &[(0, 0), (1, 0), (2, 0)]);
        let report = g.degree2_chain_report();
        assert!(report.acyclic);
        assert_eq!(report.chain_count, 0);
        assert_eq!(report.longest_chain, 0);
    }

    #[test]
    fn distribution_from_sequence_round_trip() {
        let d = distribution_from_sequence(Side::Check, &[2, 2, 4]).unwrap();
        assert!((d.coefficients()[&2] - 0.5).abs() < 1e-12);
        assert!((d.coefficients()[&4] - 0.5).abs() < 1e-12);
    }
}
