//! Flooding-schedule sum-product decoder over a Tanner graph.
//!
//! Messages are log-likelihood ratios with the convention that positive
//! values favor bit 0. Check updates use the exact tanh product rule;
//! magnitudes are clamped to [`LLR_MAX`] so the hyperbolic functions stay
//! away from their saturation points. Decoding stops as soon as the hard
//! decision satisfies every parity check.

use crate::error::{Error, Result};
use crate::graph::TannerGraph;

/// Channel log-likelihood ratios, one per symbol; positive favors bit 0.
pub type LlrVector = Vec<f64>;

/// Magnitude clamp applied to channel values and internal messages.
pub const LLR_MAX: f64 = 30.0;

/// Outcome of a decode attempt. Failure to converge is a result state, not
/// an error.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    /// Hard decision per bit, 0 or 1.
    pub hard_decision: Vec<u8>,
    /// Iterations actually run; at most the configured maximum.
    pub iterations_used: usize,
    /// True when the hard decision satisfies every parity check.
    pub syndrome_zero: bool,
    /// A-posteriori LLR per bit after the last iteration.
    pub posterior: LlrVector,
}

/// Maps hard bits received over a binary symmetric channel with crossover
/// probability `epsilon` to LLRs: `±ln((1-ε)/ε)`.
pub fn bsc_llr(received: &[u8], epsilon: f64) -> Result<LlrVector> {
    if epsilon.is_nan() || epsilon <= 0.0 || epsilon >= 0.5 {
        return Err(Error::Validation(format!(
            "BSC crossover probability must lie in (0, 0.5), got {epsilon}"
        )));
    }
    let magnitude = (((1.0 - epsilon) / epsilon).ln()).min(LLR_MAX);
    received
        .iter()
        .map(|&bit| match bit {
            0 => Ok(magnitude),
            1 => Ok(-magnitude),
            other => Err(Error::Validation(format!(
                "received word contains non-bit value {other}"
            ))),
        })
        .collect()
}

/// Maps BPSK samples (bit 0 sent as +1) received over an AWGN channel with
/// noise standard deviation `noise_sigma` to LLRs: `2y/σ²`.
pub fn awgn_llr(received: &[f64], noise_sigma: f64) -> Result<LlrVector> {
    if !noise_sigma.is_finite() || noise_sigma <= 0.0 {
        return Err(Error::Validation(format!(
            "noise sigma must be positive, got {noise_sigma}"
        )));
    }
    let scale = 2.0 / (noise_sigma * noise_sigma);
    Ok(received
        .iter()
        .map(|&y| (scale * y).clamp(-LLR_MAX, LLR_MAX))
        .collect())
}

/// Per-check XOR of the incident bits.
pub fn syndrome(graph: &TannerGraph, word: &[u8]) -> Result<Vec<u8>> {
    if word.len() != graph.symbol_count() {
        return Err(Error::Validation(format!(
            "word length {} does not match symbol count {}",
            word.len(),
            graph.symbol_count()
        )));
    }
    Ok((0..graph.check_count())
        .map(|c| {
            graph
                .check_neighbors(c)
                .iter()
                .fold(0u8, |acc, &s| acc ^ (word[s] & 1))
        })
        .collect())
}

/// Runs flooding sum-product decoding for at most `max_iterations` rounds,
/// exiting early once the syndrome is zero.
pub fn decode(
    graph: &TannerGraph,
    channel_llr: &[f64],
    max_iterations: usize,
) -> Result<DecodeResult> {
    let n = graph.symbol_count();
    let m = graph.check_count();
    if channel_llr.len() != n {
        return Err(Error::Validation(format!(
            "LLR length {} does not match symbol count {n}",
            channel_llr.len()
        )));
    }
    if let Some(bad) = channel_llr.iter().find(|v| !v.is_finite()) {
        return Err(Error::Validation(format!(
            "channel LLRs must be finite, got {bad}"
        )));
    }
    if let Some(c) = (0..m).find(|&c| graph.check_partial(c) == 1) {
        return Err(Error::Validation(format!(
            "check {c} has degree 1; such checks cannot arise from a valid \
             check distribution"
        )));
    }

    // Edge-indexed message storage: edges grouped by check, ascending.
    let edge_count = graph.edge_count();
    let mut check_edge_start = Vec::with_capacity(m + 1);
    check_edge_start.push(0usize);
    for c in 0..m {
        check_edge_start.push(check_edge_start[c] + graph.check_partial(c));
    }
    // For each symbol, the edge indices it participates in.
    let mut symbol_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (c, &start) in check_edge_start.iter().take(m).enumerate() {
        for (slot, &s) in graph.check_neighbors(c).iter().enumerate() {
            symbol_edges[s].push(start + slot);
        }
    }

    let clamp = |v: f64| v.clamp(-LLR_MAX, LLR_MAX);
    let mut v2c: Vec<f64> = vec![0.0; edge_count];
    let mut c2v: Vec<f64> = vec![0.0; edge_count];
    for s in 0..n {
        for &e in &symbol_edges[s] {
            v2c[e] = clamp(channel_llr[s]);
        }
    }

    let mut posterior: Vec<f64> = channel_llr.iter().map(|&v| clamp(v)).collect();
    let mut hard: Vec<u8> = posterior.iter().map(|&v| (v < 0.0) as u8).collect();
    let mut tanh_buf: Vec<f64> = Vec::new();
    let mut suffix: Vec<f64> = Vec::new();

    let syndrome_ok = |graph: &TannerGraph, hard: &[u8]| {
        (0..graph.check_count()).all(|c| {
            graph
                .check_neighbors(c)
                .iter()
                .fold(0u8, |acc, &s| acc ^ hard[s])
                == 0
        })
    };

    let mut iterations_used = 0;
    let mut converged = syndrome_ok(graph, &hard);
    while !converged && iterations_used < max_iterations {
        iterations_used += 1;
        // check update: c2v = 2 atanh( prod of tanh(v2c / 2) over the others )
        for c in 0..m {
            let begin = check_edge_start[c];
            let end = check_edge_start[c + 1];
            let degree = end - begin;
            if degree == 0 {
                continue;
            }
            tanh_buf.clear();
            tanh_buf.extend(v2c[begin..end].iter().map(|&v| (v / 2.0).tanh()));
            // suffix[i] = product of tanh_buf[i..]
            suffix.clear();
            suffix.resize(degree + 1, 1.0);
            for i in (0..degree).rev() {
                suffix[i] = suffix[i + 1] * tanh_buf[i];
            }
            let mut prefix = 1.0;
            for i in 0..degree {
                let others = prefix * suffix[i + 1];
                c2v[begin + i] = clamp(2.0 * others.atanh());
                prefix *= tanh_buf[i];
            }
        }
        // variable update and hard decision
        for s in 0..n {
            let mut total = clamp(channel_llr[s]);
            for &e in &symbol_edges[s] {
                total += c2v[e];
            }
            posterior[s] = total;
            hard[s] = (total < 0.0) as u8;
            for &e in &symbol_edges[s] {
                v2c[e] = clamp(total - c2v[e]);
            }
        }
        converged = syndrome_ok(graph, &hard);
    }

    Ok(DecodeResult {
        hard_decision: hard,
        iterations_used,
        syndrome_zero: converged,
        posterior,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph_with_edges(
        n: usize,
        m: usize,
        edges: &[(usize, usize)],
    ) -> TannerGraph {
        let mut g = TannerGraph::new(n, m, vec![8; m]).unwrap();
        for &(c, s) in edges {
            g.add_edge(c, s).unwrap();
        }
        g
    }

    #[test]
    fn bsc_llr_is_nearly_zero_at_half() {
        let llr = bsc_llr(&[0], 0.499999).unwrap();
        assert!(llr[0] > 0.0 && llr[0] < 1e-4);
    }

    #[test]
    fn bsc_llr_inverts_to_minus_one() {
        // epsilon = 1 / (1 + e) makes ln((1-eps)/eps) = 1
        let eps = 1.0 / (1.0 + std::f64::consts::E);
        let llr = bsc_llr(&[1], eps).unwrap();
        assert!((llr[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn bsc_llr_all_zero_word_is_positive() {
        let llr = bsc_llr(&[0; 16], 0.1).unwrap();
        assert!(llr.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn bsc_llr_rejects_out_of_range_epsilon() {
        assert!(bsc_llr(&[0], 0.0).is_err());
        assert!(bsc_llr(&[0], 0.5).is_err());
        assert!(bsc_llr(&[0], 0.7).is_err());
    }

    #[test]
    fn awgn_llr_formula() {
        assert_eq!(awgn_llr(&[0.0], 1.0).unwrap()[0], 0.0);
        assert!((awgn_llr(&[1.0], 1.0).unwrap()[0] - 2.0).abs() < 1e-12);
        // hand arithmetic: 2 * (-0.5) / 0.64 = -1.5625
        assert!((awgn_llr(&[-0.5], 0.8).unwrap()[0] + 1.5625).abs() < 1e-12);
    }

    #[test]
    fn awgn_llr_rejects_bad_sigma() {
        assert!(awgn_llr(&[0.0], 0.0).is_err());
        assert!(awgn_llr(&[0.0], -1.0).is_err());
    }

    #[test]
    fn syndrome_of_all_zero_word() {
        let g = graph_with_edges(3, 2, &[(0, 0), (0, 1), (1, 1), (1, 2)]);
        assert_eq!(syndrome(&g, &[0, 0, 0]).unwrap(), vec![0, 0]);
    }

    #[test]
    fn syndrome_flips_incident_checks() {
        let g = graph_with_edges(3, 2, &[(0, 0), (0, 1), (1, 1), (1, 2)]);
        // symbol 1 touches both checks
        assert_eq!(syndrome(&g, &[0, 1, 0]).unwrap(), vec![1, 1]);
    }

    #[test]
    fn syndrome_rejects_length_mismatch() {
        let g = graph_with_edges(3, 2, &[(0, 0), (0, 1), (1, 1), (1, 2)]);
        assert!(syndrome(&g, &[0, 0]).is_err());
    }

    #[test]
    fn syndrome_matches_dense_matrix_product() {
        // independent oracle: dense GF(2) matrix-vector product
        let edges = [(0, 0), (0, 2), (1, 1), (1, 2), (1, 3), (2, 0), (2, 3)];
        let g = graph_with_edges(4, 3, &edges);
        let mut h = [[0u8; 4]; 3];
        for &(c, s) in &edges {
            h[c][s] = 1;
        }
        let words = [[1, 0, 1, 1], [0, 1, 1, 0], [1, 1, 1, 1]];
        for word in words {
            let expected: Vec<u8> = h
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(word.iter())
                        .fold(0u8, |acc, (&a, &b)| acc ^ (a & b))
                })
                .collect();
            assert_eq!(syndrome(&g, &word).unwrap(), expected);
        }
    }

    #[test]
    fn decode_noiseless_converges_immediately() {
        let g = graph_with_edges(3, 2, &[(0, 0), (0, 1), (1, 1), (1, 2)]);
        let llr = vec![20.0, 20.0, 20.0];
        let result = decode(&g, &llr, 2000).unwrap();
        assert!(result.syndrome_zero);
        assert!(result.iterations_used <= 1);
        assert_eq!(result.hard_decision, vec![0, 0, 0]);
    }

    #[test]
    fn decode_single_check_flips_weak_bit() {
        // one parity check over three bits; the strong +5 pair outvotes -0.1
        let g = graph_with_edges(3, 1, &[(0, 0), (0, 1), (0, 2)]);
        let result = decode(&g, &[5.0, 5.0, -0.1], 2000).unwrap();
        assert!(result.syndrome_zero);
        assert_eq!(result.iterations_used, 1);
        assert_eq!(result.hard_decision, vec![0, 0, 0]);
        assert!(result.posterior[2] > 0.0);
    }

    #[test]
    fn decode_rejects_length_mismatch() {
        let g = graph_with_edges(3, 1, &[(0, 0), (0, 1), (0, 2)]);
        assert!(decode(&g, &[1.0, 2.0], 10).is_err());
    }

    #[test]
    fn decode_rejects_degree_one_check() {
        let g = graph_with_edges(2, 2, &[(0, 0), (0, 1), (1, 0)]);
        assert!(decode(&g, &[1.0, 1.0], 10).is_err());
    }

    #[test]
    fn decode_rejects_non_finite_llr() {
        let g = graph_with_edges(3, 1, &[(0, 0), (0, 1), (0, 2)]);
        assert!(decode(&g, &[1.0, f64::NAN, 1.0], 10).is_err());
    }

    #[test]
    fn decode_sign_symmetry() {
        // Negating every channel LLR negates all messages. Even check
        // degrees keep the early-exit syndrome test symmetric under the
        // global bit flip, so both runs stop at the same iteration.
        let g = graph_with_edges(
            4,
            2,
            &[(0, 0), (0, 1), (0, 2), (0, 3), (1, 0), (1, 1)],
        );
        let llr = vec![1.3, -0.4, 2.2, -0.9];
        let pos = decode(&g, &llr, 50).unwrap();
        let neg_llr: Vec<f64> = llr.iter().map(|v| -v).collect();
        let neg = decode(&g, &neg_llr, 50).unwrap();
        assert_eq!(pos.iterations_used, neg.iterations_used);
        for s in 0..4 {
            assert!((pos.posterior[s] + neg.posterior[s]).abs() < 1e-9);
            assert_eq!(pos.hard_decision[s] ^ neg.hard_decision[s], 1);
        }
    }

    #[test]
    fn decode_is_deterministic() {
        let g = graph_with_edges(
            4,
            2,
            &[(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (1, 3)],
        );
        let llr = vec![0.3, -0.2, 0.8, -0.1];
        let a = decode(&g, &llr, 100).unwrap();
        let b = decode(&g, &llr, 100).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn decode_on_tree_matches_exhaustive_marginals() {
        // Tree: c0 over {s0, s1, s2}, c1 over {s2, s3, s4}. The channel
        // strongly favors a non-codeword, so no intermediate hard decision
        // triggers the early exit and messages run to their fixed point,
        // which on a tree is the exact marginalization.
        let g = graph_with_edges(
            5,
            2,
            &[(0, 0), (0, 1), (0, 2), (1, 2), (1, 3), (1, 4)],
        );
        // Every bit leans to 1 firmly enough that extrinsic support never
        // flips any of them: the decision sits on the all-ones non-codeword
        // through every iteration and no early exit fires.
        let llr = vec![-3.0, -3.05, -5.0, -2.95, -3.0];
        let result = decode(&g, &llr, 50).unwrap();
        assert!(!result.syndrome_zero, "instance must not converge early");
        let exact = exhaustive_posteriors(&g, &llr);
        for s in 0..5 {
            assert!(
                (result.posterior[s] - exact[s]).abs() < 1e-9,
                "bit {s}: bp {} vs exact {}",
                result.posterior[s],
                exact[s]
            );
        }
    }

    // Exact bitwise posterior LLRs by enumerating every valid codeword.
    fn exhaustive_posteriors(graph: &TannerGraph, llr: &[f64]) -> Vec<f64> {
        let n = graph.symbol_count();
        assert!(n <= 20);
        let mut num = vec![0.0f64; n];
        let mut den = vec![0.0f64; n];
        for word in 0u32..(1 << n) {
            let bits: Vec<u8> = (0..n).map(|s| ((word >> s) & 1) as u8).collect();
            if syndrome(graph, &bits).unwrap().iter().any(|&b| b != 0) {
                continue;
            }
            let weight: f64 = (0..n)
                .map(|s| -llr[s] * bits[s] as f64)
                .sum::<f64>()
                .exp();
            for s in 0..n {
                if bits[s] == 0 {
                    num[s] += weight;
                } else {
                    den[s] += weight;
                }
            }
        }
        (0..n).map(|s| (num[s] / den[s]).ln()).collect()
    }
}
