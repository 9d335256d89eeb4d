//! Helpers shared by the integration suites.

#![allow(dead_code)]

use std::collections::VecDeque;

use ldpc_peg::decoder::syndrome;
use ldpc_peg::degree::{
    balance_sockets, check_count_for, quantize_sequence, DegreeDistribution, DegreeSequence,
    Side,
};
use ldpc_peg::graph::TannerGraph;

/// Exhaustive shortest-cycle search: for every edge, the shortest alternative
/// path between its endpoints plus one. Independent of the BFS girth
/// implementation under test.
pub fn girth_oracle(graph: &TannerGraph) -> Option<usize> {
    let n = graph.symbol_count();
    let mut best: Option<usize> = None;
    for s in 0..n {
        for &c in graph.symbol_neighbors(s) {
            if let Some(d) = bfs_distance_without_edge(graph, s, c) {
                let cycle = d + 1;
                if best.is_none_or(|b| cycle < b) {
                    best = Some(cycle);
                }
            }
        }
    }
    best
}

fn bfs_distance_without_edge(
    graph: &TannerGraph,
    from_symbol: usize,
    to_check: usize,
) -> Option<usize> {
    let n = graph.symbol_count();
    let m = graph.check_count();
    let mut dist = vec![usize::MAX; n + m];
    let mut queue = VecDeque::new();
    dist[from_symbol] = 0;
    queue.push_back(from_symbol);
    while let Some(u) = queue.pop_front() {
        let (neighbors, offset): (&[usize], usize) = if u < n {
            (graph.symbol_neighbors(u), n)
        } else {
            (graph.check_neighbors(u - n), 0)
        };
        for &raw in neighbors {
            let v = raw + offset;
            if u == from_symbol && v == n + to_check {
                continue;
            }
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                if v == n + to_check {
                    return Some(dist[v]);
                }
                queue.push_back(v);
            }
        }
    }
    None
}

/// Builds matched symbol and check degree sequences for a distribution pair.
pub fn build_pair(
    lambda: &DegreeDistribution,
    rho: &DegreeDistribution,
    n: usize,
) -> (DegreeSequence, DegreeSequence) {
    let symbols = quantize_sequence(lambda, n).expect("feasible symbol sequence");
    let m = check_count_for(symbols.total_sockets(), rho);
    let checks = balance_sockets(&symbols, rho, m)
        .expect("feasible check sequence")
        .sequence;
    (symbols, checks)
}

pub fn distribution(side: Side, terms: &[(usize, f64)]) -> DegreeDistribution {
    DegreeDistribution::new(side, terms.iter().copied().collect()).expect("valid distribution")
}

/// The irregular pair used across the acceptance experiments: rate 1/2, a
/// three-degree check distribution and a symbol side reaching degree 12,
/// designed so that density evolution on the erasure channel succeeds at
/// erasure rates up to 0.47.
pub fn acceptance_lambda() -> DegreeDistribution {
    distribution(
        Side::Symbol,
        &[(2, 0.178673), (3, 0.522571), (10, 0.051745), (12, 0.247011)],
    )
}

pub fn acceptance_rho() -> DegreeDistribution {
    distribution(Side::Check, &[(6, 0.3), (7, 0.4), (8, 0.3)])
}

/// The same pair as a distribution-spec document, for CLI-level tests.
pub const ACCEPTANCE_LAMBDA_TEXT: &str =
    "side: symbol\n2 0.178673\n3 0.522571\n10 0.051745\n12 0.247011\n";
pub const ACCEPTANCE_RHO_TEXT: &str = "side: check\n6 0.3\n7 0.4\n8 0.3\n";

/// All valid codewords of a small code, by exhaustive enumeration.
pub fn enumerate_codebook(graph: &TannerGraph) -> Vec<Vec<u8>> {
    let n = graph.symbol_count();
    assert!(n <= 20, "codebook enumeration is exponential in n");
    let mut codebook = Vec::new();
    for word in 0u32..(1 << n) {
        let bits: Vec<u8> = (0..n).map(|s| ((word >> s) & 1) as u8).collect();
        if syndrome(graph, &bits)
            .expect("word length matches")
            .iter()
            .all(|&b| b == 0)
        {
            codebook.push(bits);
        }
    }
    codebook
}

/// Exact bitwise posterior LLRs of a small code by enumerating every valid
/// codeword, weighting each by the channel likelihood.
pub fn exhaustive_posteriors(graph: &TannerGraph, llr: &[f64]) -> Vec<f64> {
    let n = graph.symbol_count();
    let mut zero_mass = vec![0.0f64; n];
    let mut one_mass = vec![0.0f64; n];
    for bits in enumerate_codebook(graph) {
        let weight: f64 = (0..n)
            .map(|s| -llr[s] * bits[s] as f64)
            .sum::<f64>()
            .exp();
        for s in 0..n {
            if bits[s] == 0 {
                zero_mass[s] += weight;
            } else {
                one_mass[s] += weight;
            }
        }
    }
    (0..n).map(|s| (zero_mass[s] / one_mass[s]).ln()).collect()
}
