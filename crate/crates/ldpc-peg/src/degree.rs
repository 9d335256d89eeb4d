//! Edge-perspective degree distributions and their conversion into exact
//! integer degree sequences.
//!
//! A family of irregular codes is specified by two generating polynomials
//! whose coefficients give the fraction of *edges* incident to nodes of each
//! degree, one polynomial per side of the bipartite graph. Construction needs
//! per-node integer targets, so the distributions are converted to node
//! fractions, quantized by largest-remainder rounding, and the check side is
//! then adjusted so that both sides expose exactly the same number of sockets.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Absolute tolerance on the coefficient sum of a distribution.
pub const COEFF_SUM_TOL: f64 = 1e-9;

/// Which side of the bipartite graph a distribution describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Symbol,
    Check,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Symbol => write!(f, "symbol"),
            Side::Check => write!(f, "check"),
        }
    }
}

/// An edge-perspective degree distribution: degree -> fraction of edges
/// incident to nodes of that degree.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    side: Side,
    coefficients: BTreeMap<usize, f64>,
    max_degree: usize,
}

impl DegreeDistribution {
    /// Builds a distribution, enforcing the type invariants: all degrees at
    /// least 2, all coefficients strictly positive, coefficients summing to 1
    /// within [`COEFF_SUM_TOL`].
    pub fn new(side: Side, coefficients: BTreeMap<usize, f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::Validation("distribution has no terms".into()));
        }
        for (&degree, &coeff) in &coefficients {
            if degree < 2 {
                return Err(Error::Validation(format!(
                    "degree {degree} is below the minimum of 2"
                )));
            }
            if !coeff.is_finite() || coeff <= 0.0 {
                return Err(Error::Validation(format!(
                    "coefficient for degree {degree} must be strictly positive, got {coeff}"
                )));
            }
        }
        let sum: f64 = coefficients.values().sum();
        if (sum - 1.0).abs() > COEFF_SUM_TOL {
            return Err(Error::Validation(format!(
                "coefficients sum to {sum}, expected 1 within {COEFF_SUM_TOL:e}"
            )));
        }
        let max_degree = *coefficients.keys().next_back().expect("non-empty");
        Ok(Self {
            side,
            coefficients,
            max_degree,
        })
    }

    /// Parses the distribution-spec text format.
    ///
    /// One `<degree> <coefficient>` term per line, or several terms separated
    /// by `/`. Lines starting with `#` are comments. An optional header line
    /// `side: symbol|check` is checked against `expected_side`.
    pub fn parse(text: &str, expected_side: Side) -> Result<Self> {
        let mut coefficients = BTreeMap::new();
        let mut declared_side: Option<Side> = None;
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(value) = line.strip_prefix("side:") {
                if declared_side.is_some() {
                    return Err(Error::parse(lineno, "duplicate side header"));
                }
                declared_side = Some(match value.trim() {
                    "symbol" => Side::Symbol,
                    "check" => Side::Check,
                    other => {
                        return Err(Error::parse(
                            lineno,
                            format!("unknown side {other:?}, expected symbol or check"),
                        ))
                    }
                });
                continue;
            }
            for term in line.split('/') {
                let term = term.trim();
                if term.is_empty() {
                    continue;
                }
                let mut tokens = term.split_whitespace();
                let (deg_tok, coeff_tok) = match (tokens.next(), tokens.next(), tokens.next()) {
                    (Some(d), Some(c), None) => (d, c),
                    _ => {
                        return Err(Error::parse(
                            lineno,
                            format!("expected `<degree> <coefficient>`, got {term:?}"),
                        ))
                    }
                };
                let degree: usize = deg_tok.parse().map_err(|_| {
                    Error::parse(lineno, format!("invalid degree {deg_tok:?}"))
                })?;
                let coeff: f64 = coeff_tok.parse().map_err(|_| {
                    Error::parse(lineno, format!("invalid coefficient {coeff_tok:?}"))
                })?;
                if coefficients.insert(degree, coeff).is_some() {
                    return Err(Error::parse(lineno, format!("duplicate degree {degree}")));
                }
            }
        }
        if let Some(declared) = declared_side {
            if declared != expected_side {
                return Err(Error::Validation(format!(
                    "distribution declares side {declared} but is used as {expected_side}"
                )));
            }
        }
        Self::new(expected_side, coefficients)
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Degree -> edge fraction, ascending by degree.
    pub fn coefficients(&self) -> &BTreeMap<usize, f64> {
        &self.coefficients
    }

    /// Largest degree present in the distribution.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Smallest degree present in the distribution.
    pub fn min_degree(&self) -> usize {
        *self.coefficients.keys().next().expect("non-empty")
    }

    /// Sum of coefficient/degree over all terms. This is the inverse of the
    /// mean node degree and the quantity entering the design-rate identity.
    pub fn inv_mean_degree(&self) -> f64 {
        self.coefficients.iter().map(|(&d, &c)| c / d as f64).sum()
    }

    /// Converts edge fractions to node fractions: the fraction of nodes of
    /// degree `i` is `(c_i / i) / sum_j (c_j / j)`.
    pub fn node_fractions(&self) -> BTreeMap<usize, f64> {
        let norm = self.inv_mean_degree();
        self.coefficients
            .iter()
            .map(|(&d, &c)| (d, c / d as f64 / norm))
            .collect()
    }
}

/// Per-node integer target degrees, stored sorted non-decreasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    degrees: Vec<usize>,
    total_sockets: usize,
}

impl DegreeSequence {
    /// Builds a sequence from raw degrees, sorting them non-decreasing.
    /// Every entry must be at least 2.
    pub fn new(mut degrees: Vec<usize>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::Validation("degree sequence is empty".into()));
        }
        if let Some(&bad) = degrees.iter().find(|&&d| d < 2) {
            return Err(Error::Validation(format!(
                "degree sequence entry {bad} is below the minimum of 2"
            )));
        }
        degrees.sort_unstable();
        let total_sockets = degrees.iter().sum();
        Ok(Self {
            degrees,
            total_sockets,
        })
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    /// Sum of all entries, i.e. the number of sockets the side exposes.
    pub fn total_sockets(&self) -> usize {
        self.total_sockets
    }
}

/// Design rate of the pair, `1 - sum(rho_j / j) / sum(lambda_i / i)`.
pub fn design_rate(lambda: &DegreeDistribution, rho: &DegreeDistribution) -> f64 {
    1.0 - rho.inv_mean_degree() / lambda.inv_mean_degree()
}

/// Nominal check-node count for a symbol side exposing `symbol_sockets`
/// sockets: `round(symbol_sockets * sum(rho_j / j))`.
pub fn check_count_for(symbol_sockets: usize, rho: &DegreeDistribution) -> usize {
    (symbol_sockets as f64 * rho.inv_mean_degree()).round() as usize
}

/// Converts a distribution into an exact integer degree sequence of length
/// `node_count` by largest-remainder rounding of the node fractions.
/// Remainder ties are broken toward the larger degree.
pub fn quantize_sequence(
    dist: &DegreeDistribution,
    node_count: usize,
) -> Result<DegreeSequence> {
    let fractions = dist.node_fractions();
    if node_count < fractions.len() {
        return Err(Error::Infeasible(format!(
            "{node_count} nodes cannot host {} distinct degrees",
            fractions.len()
        )));
    }
    // floor pass, then hand out the leftover to the largest remainders
    let mut counts: Vec<(usize, usize, f64)> = fractions
        .iter()
        .map(|(&degree, &frac)| {
            let ideal = frac * node_count as f64;
            let base = ideal.floor() as usize;
            (degree, base, ideal - base as f64)
        })
        .collect();
    let assigned: usize = counts.iter().map(|&(_, base, _)| base).sum();
    let leftover = node_count
        .checked_sub(assigned)
        .ok_or_else(|| Error::Validation("node fractions exceed 1".into()))?;
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| {
        counts[b]
            .2
            .partial_cmp(&counts[a].2)
            .expect("finite remainders")
            .then(counts[b].0.cmp(&counts[a].0))
    });
    for &i in order.iter().take(leftover) {
        counts[i].1 += 1;
    }
    let mut degrees = Vec::with_capacity(node_count);
    for (degree, count, _) in counts {
        degrees.extend(std::iter::repeat_n(degree, count));
    }
    DegreeSequence::new(degrees)
}

/// One check-node target changed during socket balancing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SocketAdjustment {
    pub from: usize,
    pub to: usize,
}

/// Result of [`balance_sockets`]: the balanced check sequence plus the
/// metadata of every adjustment applied to reach an exact socket match.
#[derive(Debug, Clone)]
pub struct BalancedChecks {
    pub sequence: DegreeSequence,
    pub adjustments: Vec<SocketAdjustment>,
    /// Realized check count minus the requested one (-1, 0 or +1).
    pub check_count_delta: isize,
}

/// Builds a check-side degree sequence whose socket total equals
/// `symbol_seq.total_sockets()` exactly.
///
/// The balancing ladder, tried in order until the sums match:
/// 1. quantize at the requested check count and move entries one step
///    within `[max_degree - 1, max_degree]`;
/// 2. re-quantize at the check count plus or minus one and retry step 1;
/// 3. after exhausting in-range moves, change a single entry one step past
///    the distribution support (`max_degree + 1`, or `min_degree - 1` but
///    never below 2).
pub fn balance_sockets(
    symbol_seq: &DegreeSequence,
    rho: &DegreeDistribution,
    check_count: usize,
) -> Result<BalancedChecks> {
    let target = symbol_seq.total_sockets();
    if check_count == 0 {
        return Err(Error::Validation("check count must be positive".into()));
    }

    let candidate_counts = |m: usize, delta_hint: i64| -> Vec<usize> {
        let mut v = vec![m];
        if delta_hint >= 0 {
            v.push(m + 1);
            if m > 1 {
                v.push(m - 1);
            }
        } else {
            if m > 1 {
                v.push(m - 1);
            }
            v.push(m + 1);
        }
        v
    };

    let first = quantize_sequence(rho, check_count)?;
    let hint = target as i64 - first.total_sockets() as i64;
    let counts = candidate_counts(check_count, hint);

    // pass 1: in-range moves only; pass 2: allow one out-of-support move
    for allow_out_of_support in [false, true] {
        for &m in &counts {
            let Ok(quantized) = quantize_sequence(rho, m) else {
                continue;
            };
            if let Some((degrees, adjustments)) =
                try_balance(&quantized, rho, target, allow_out_of_support)
            {
                return Ok(BalancedChecks {
                    sequence: DegreeSequence::new(degrees)?,
                    adjustments,
                    check_count_delta: m as isize - check_count as isize,
                });
            }
        }
    }
    Err(Error::Infeasible(format!(
        "cannot balance check sockets to {target}: required adjustment exceeds \
         the available max-degree entries"
    )))
}

fn try_balance(
    quantized: &DegreeSequence,
    rho: &DegreeDistribution,
    target: usize,
    allow_out_of_support: bool,
) -> Option<(Vec<usize>, Vec<SocketAdjustment>)> {
    let max_deg = rho.max_degree();
    let min_deg = rho.min_degree();
    let mut degrees = quantized.degrees().to_vec();
    let mut adjustments = Vec::new();
    let mut delta = target as i64 - quantized.total_sockets() as i64;

    // in-range moves: max_degree entries may drop to max_degree - 1 and back
    if delta > 0 {
        for d in degrees.iter_mut().rev() {
            if delta == 0 {
                break;
            }
            if *d == max_deg - 1 {
                adjustments.push(SocketAdjustment {
                    from: *d,
                    to: *d + 1,
                });
                *d += 1;
                delta -= 1;
            }
        }
    } else if delta < 0 {
        for d in degrees.iter_mut().rev() {
            if delta == 0 {
                break;
            }
            if *d == max_deg && max_deg >= 3 {
                adjustments.push(SocketAdjustment {
                    from: *d,
                    to: *d - 1,
                });
                *d -= 1;
                delta += 1;
            }
        }
    }

    if delta != 0 && allow_out_of_support {
        if delta == 1 {
            if let Some(d) = degrees.iter_mut().rev().find(|d| **d == max_deg) {
                adjustments.push(SocketAdjustment {
                    from: *d,
                    to: *d + 1,
                });
                *d += 1;
                delta = 0;
            }
        } else if delta == -1 && min_deg >= 3 {
            if let Some(d) = degrees.iter_mut().find(|d| **d == min_deg) {
                adjustments.push(SocketAdjustment {
                    from: *d,
                    to: *d - 1,
                });
                *d -= 1;
                delta = 0;
            }
        }
    }

    if delta == 0 {
        Some((degrees, adjustments))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(side: Side, terms: &[(usize, f64)]) -> DegreeDistribution {
        DegreeDistribution::new(side, terms.iter().copied().collect()).unwrap()
    }

    #[test]
    fn parse_two_term_slash_format() {
        let d = DegreeDistribution::parse("2 0.5 / 3 0.5", Side::Symbol).unwrap();
        assert_eq!(d.coefficients().len(), 2);
        assert_eq!(d.coefficients()[&2], 0.5);
        assert_eq!(d.coefficients()[&3], 0.5);
        assert_eq!(d.max_degree(), 3);
    }

    #[test]
    fn parse_regular_single_term() {
        let d = DegreeDistribution::parse("3 1.0", Side::Check).unwrap();
        assert_eq!(d.coefficients()[&3], 1.0);
        assert_eq!(d.max_degree(), 3);
    }

    #[test]
    fn parse_rejects_bad_sum() {
        let err = DegreeDistribution::parse("2 0.6 / 3 0.6", Side::Symbol).unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
    }

    #[test]
    fn parse_rejects_degree_below_two() {
        let err = DegreeDistribution::parse("1 0.5 / 3 0.5", Side::Symbol).unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
    }

    #[test]
    fn parse_reports_line_numbers() {
        let err = DegreeDistribution::parse("# comment\n2 0.5\nbogus\n", Side::Symbol).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn parse_side_header_checked() {
        let text = "side: check\n6 1.0\n";
        assert!(DegreeDistribution::parse(text, Side::Check).is_ok());
        let err = DegreeDistribution::parse(text, Side::Symbol).unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
    }

    #[test]
    fn parse_comments_and_per_line_terms() {
        let text = "# lambda\n2 0.5\n3 0.5\n";
        let d = DegreeDistribution::parse(text, Side::Symbol).unwrap();
        assert_eq!(d.coefficients().len(), 2);
    }

    #[test]
    fn node_fractions_regular_is_fixed_point() {
        let d = dist(Side::Symbol, &[(3, 1.0)]);
        let f = d.node_fractions();
        assert_eq!(f.len(), 1);
        assert!((f[&3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn node_fractions_two_degrees() {
        // hand oracle: (0.25, 1/6) / (0.25 + 1/6) = (0.6, 0.4)
        let d = dist(Side::Symbol, &[(2, 0.5), (3, 0.5)]);
        let f = d.node_fractions();
        assert!((f[&2] - 0.6).abs() < 1e-12);
        assert!((f[&3] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn node_fractions_spread_degrees() {
        // hand oracle: (0.2, 0.1) / 0.3 = (2/3, 1/3)
        let d = dist(Side::Symbol, &[(2, 0.4), (6, 0.6)]);
        let f = d.node_fractions();
        assert!((f[&2] - 2.0 / 3.0).abs() < 1e-12);
        assert!((f[&6] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn node_fractions_sum_to_one() {
        let d = dist(Side::Check, &[(4, 0.25), (6, 0.5), (9, 0.25)]);
        let sum: f64 = d.node_fractions().values().sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn design_rate_regular_codes() {
        let r36 = design_rate(&dist(Side::Symbol, &[(3, 1.0)]), &dist(Side::Check, &[(6, 1.0)]));
        assert!((r36 - 0.5).abs() < 1e-12);
        let r24 = design_rate(&dist(Side::Symbol, &[(2, 1.0)]), &dist(Side::Check, &[(4, 1.0)]));
        assert!((r24 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn design_rate_irregular() {
        // hand oracle: 1 - 0.2 / (0.25 + 1/6) = 0.52
        let r = design_rate(
            &dist(Side::Symbol, &[(2, 0.5), (3, 0.5)]),
            &dist(Side::Check, &[(5, 1.0)]),
        );
        assert!((r - 0.52).abs() < 1e-12);
    }

    #[test]
    fn quantize_regular() {
        let seq = quantize_sequence(&dist(Side::Symbol, &[(3, 1.0)]), 6).unwrap();
        assert_eq!(seq.degrees(), &[3, 3, 3, 3, 3, 3]);
        assert_eq!(seq.total_sockets(), 18);
    }

    #[test]
    fn quantize_splits_by_node_fractions() {
        // node fractions (0.6, 0.4), ideal (3.0, 2.0)
        let seq = quantize_sequence(&dist(Side::Symbol, &[(2, 0.5), (3, 0.5)]), 5).unwrap();
        assert_eq!(seq.degrees(), &[2, 2, 2, 3, 3]);
    }

    #[test]
    fn quantize_largest_remainder() {
        // ideal (2.4, 1.6): floors (2, 1), remainder 0.6 on degree 3
        let seq = quantize_sequence(&dist(Side::Symbol, &[(2, 0.5), (3, 0.5)]), 4).unwrap();
        assert_eq!(seq.degrees(), &[2, 2, 3, 3]);
    }

    #[test]
    fn quantize_tie_prefers_larger_degree() {
        // node fractions exactly (0.5, 0.5) -> ideal (1.5, 1.5), one leftover
        let d = dist(Side::Symbol, &[(2, 1.0 / 3.0), (4, 2.0 / 3.0)]);
        let f = d.node_fractions();
        assert!((f[&2] - 0.5).abs() < 1e-12 && (f[&4] - 0.5).abs() < 1e-12);
        let seq = quantize_sequence(&d, 3).unwrap();
        assert_eq!(seq.degrees(), &[2, 4, 4]);
    }

    #[test]
    fn quantize_rejects_too_few_nodes() {
        let err = quantize_sequence(&dist(Side::Symbol, &[(2, 0.5), (3, 0.5)]), 1).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)), "{err}");
    }

    #[test]
    fn balance_exact_division_needs_no_adjustment() {
        let symbols = DegreeSequence::new(vec![3; 1200]).unwrap(); // 3600 sockets
        let rho = dist(Side::Check, &[(6, 1.0)]);
        let m = check_count_for(symbols.total_sockets(), &rho);
        assert_eq!(m, 600);
        let balanced = balance_sockets(&symbols, &rho, m).unwrap();
        assert_eq!(balanced.sequence.total_sockets(), 3600);
        assert_eq!(balanced.sequence.len(), 600);
        assert!(balanced.adjustments.is_empty());
        assert_eq!(balanced.check_count_delta, 0);
    }

    #[test]
    fn balance_odd_socket_total_steps_the_ladder() {
        // 3601 sockets against a pure degree-6 check side: the requested
        // m = 600 cannot be fixed in range, m = 601 can (five entries 6 -> 5).
        let mut degrees = vec![3; 1199];
        degrees.push(4);
        let symbols = DegreeSequence::new(degrees).unwrap();
        assert_eq!(symbols.total_sockets(), 3601);
        let rho = dist(Side::Check, &[(6, 1.0)]);
        let m = check_count_for(symbols.total_sockets(), &rho);
        assert_eq!(m, 600);
        let balanced = balance_sockets(&symbols, &rho, m).unwrap();
        assert_eq!(balanced.sequence.total_sockets(), 3601);
        assert_eq!(balanced.check_count_delta, 1);
        assert_eq!(balanced.sequence.len(), 601);
        assert_eq!(balanced.adjustments.len(), 5);
        assert!(balanced
            .adjustments
            .iter()
            .all(|a| a.from == 6 && a.to == 5));
        assert!(balanced.sequence.degrees().iter().all(|&d| (5..=6).contains(&d)));
    }

    #[test]
    fn balance_mixed_check_degrees() {
        let symbols = DegreeSequence::new(vec![2; 50]).unwrap(); // 100 sockets
        let rho = dist(Side::Check, &[(4, 0.5), (6, 0.5)]);
        let m = check_count_for(100, &rho);
        assert_eq!(m, 21);
        let balanced = balance_sockets(&symbols, &rho, m).unwrap();
        assert_eq!(balanced.sequence.total_sockets(), 100);
    }

    #[test]
    fn balance_all_degree_two_checks_odd_total() {
        // in-range moves cannot fix parity when the support is {2};
        // a single out-of-support raise to 3 can.
        let symbols = DegreeSequence::new(vec![3, 2]).unwrap(); // 5 sockets
        let rho = dist(Side::Check, &[(2, 1.0)]);
        let balanced = balance_sockets(&symbols, &rho, 2).unwrap();
        assert_eq!(balanced.sequence.total_sockets(), 5);
        assert_eq!(balanced.adjustments.len(), 1);
        assert_eq!(balanced.adjustments[0], SocketAdjustment { from: 2, to: 3 });
    }

    #[test]
    fn sequence_rejects_degree_below_two() {
        assert!(DegreeSequence::new(vec![2, 1, 3]).is_err());
    }

    #[test]
    fn sequence_is_sorted() {
        let seq = DegreeSequence::new(vec![5, 2, 3]).unwrap();
        assert_eq!(seq.degrees(), &[2, 3, 5]);
        assert_eq!(seq.total_sockets(), 10);
    }
}
