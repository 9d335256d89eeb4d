//! Progressive edge growth with degree-distribution-aware check selection.
//!
//! A Tanner graph is built edge by edge. For every edge after a symbol's
//! first, a breadth-first subgraph expansion from the symbol determines the
//! candidate checks whose selection maximizes the length of the shortest
//! cycle being closed; a selection criterion then picks one candidate. Five
//! criteria variants are provided, differing in how the first edge of a
//! symbol is placed and in whether candidates are ranked by lowest current
//! degree or by highest free degree (FCD), the number of still-unassigned
//! sockets. FCD ranking steers the realized check degrees toward a target
//! degree sequence; a relaxed mode trades a little of the local cycle length
//! for even tighter compliance by re-admitting shallower candidate ensembles
//! that still hold free sockets.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::degree::{DegreeSequence, Side};
use crate::error::{Error, Result};
use crate::graph::{distribution_from_sequence, TannerGraph};

/// The five construction methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PegVariant {
    /// Classic progressive edge growth: lowest current check degree
    /// everywhere, check targets ignored.
    Original,
    /// Highest free check degree for every edge, first edges included.
    Fcd,
    /// FCD with first edges restricted to checks already connected.
    FcdConnectedFirst,
    /// Degree-2 symbols chain through already-connected checks by lowest
    /// current degree (zig-zag); everything else by FCD.
    ZigZagFcd,
    /// Lowest current degree for every symbol's first edge, FCD for the rest.
    LowestFirstFcd,
}

impl PegVariant {
    pub fn from_number(number: u8) -> Result<Self> {
        match number {
            1 => Ok(Self::Original),
            2 => Ok(Self::Fcd),
            3 => Ok(Self::FcdConnectedFirst),
            4 => Ok(Self::ZigZagFcd),
            5 => Ok(Self::LowestFirstFcd),
            other => Err(Error::Validation(format!(
                "variant must be 1..=5, got {other}"
            ))),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Self::Original => 1,
            Self::Fcd => 2,
            Self::FcdConnectedFirst => 3,
            Self::ZigZagFcd => 4,
            Self::LowestFirstFcd => 5,
        }
    }

    /// Whether the variant ranks candidates by free check degree and thus
    /// follows the check-side target sequence.
    pub fn uses_fcd(self) -> bool {
        !matches!(self, Self::Original)
    }

    pub fn all() -> [PegVariant; 5] {
        [
            Self::Original,
            Self::Fcd,
            Self::FcdConnectedFirst,
            Self::ZigZagFcd,
            Self::LowestFirstFcd,
        ]
    }
}

impl fmt::Display for PegVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

#[derive(Debug, Clone)]
pub struct PegConfig {
    pub variant: PegVariant,
    pub relaxed: bool,
    pub seed: u64,
    /// Cap on the expansion depth; `None` expands until a stop condition.
    pub max_expansion_depth: Option<usize>,
}

impl PegConfig {
    pub fn new(variant: PegVariant, relaxed: bool, seed: u64) -> Result<Self> {
        let config = Self {
            variant,
            relaxed,
            seed,
            max_expansion_depth: None,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.relaxed && !self.variant.uses_fcd() {
            return Err(Error::Validation(
                "relaxed edge selection requires an FCD variant (2..=5)".into(),
            ));
        }
        Ok(())
    }
}

/// Why a subgraph expansion stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The reached check set stopped growing.
    Saturated,
    /// The next level would have reached every check.
    ComplementVanished,
    /// The configured depth cap was hit.
    DepthCapped,
}

/// Layered result of a breadth-first expansion from a symbol node.
///
/// `first_depth[c]` is the depth at which check `c` first enters the reached
/// set, or `UNREACHED`. The reached set at depth `l` is therefore
/// `{c : first_depth[c] <= l}` and the candidate ensemble is its complement.
#[derive(Debug, Clone)]
pub struct ExpansionResult {
    first_depth: Vec<u32>,
    depth: usize,
    stop_reason: StopReason,
}

const UNREACHED: u32 = u32::MAX;

impl ExpansionResult {
    fn empty() -> Self {
        Self {
            first_depth: Vec::new(),
            depth: 0,
            stop_reason: StopReason::Saturated,
        }
    }

    /// Stopping depth l.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn stop_reason(&self) -> StopReason {
        self.stop_reason
    }

    /// Reached checks at depth `l`, ascending.
    pub fn reached(&self, l: usize) -> Vec<usize> {
        self.first_depth
            .iter()
            .enumerate()
            .filter(|&(_, &d)| d != UNREACHED && d as usize <= l)
            .map(|(c, _)| c)
            .collect()
    }

    /// Complement of the reached set at depth `l`, ascending.
    pub fn complement(&self, l: usize) -> Vec<usize> {
        self.first_depth
            .iter()
            .enumerate()
            .filter(|&(_, &d)| d == UNREACHED || d as usize > l)
            .map(|(c, _)| c)
            .collect()
    }

    /// Final candidate ensemble: the complement at the stopping depth.
    pub fn candidates(&self) -> Vec<usize> {
        self.complement(self.depth)
    }
}

/// Expands a subgraph from `root` under the current graph setting until the
/// reached check set saturates or its complement is about to vanish.
pub fn expand_subgraph(graph: &TannerGraph, root: usize) -> ExpansionResult {
    let mut expander = Expander::new(graph.symbol_count(), graph.check_count());
    let mut result = ExpansionResult::empty();
    expander.run(graph, root, None);
    expander.snapshot_into(&mut result);
    result
}

// Reusable expansion workspace; epoch stamps avoid clearing arrays between
// the tens of thousands of expansions a construction performs.
struct Expander {
    check_depth: Vec<u32>,
    check_epoch: Vec<u32>,
    symbol_epoch: Vec<u32>,
    frontier: Vec<usize>,
    next_frontier: Vec<usize>,
    epoch: u32,
    reached: usize,
    depth: usize,
    stop_reason: StopReason,
}

impl Expander {
    fn new(n: usize, m: usize) -> Self {
        Self {
            check_depth: vec![0; m],
            check_epoch: vec![0; m],
            symbol_epoch: vec![0; n],
            frontier: Vec::new(),
            next_frontier: Vec::new(),
            epoch: 0,
            reached: 0,
            depth: 0,
            stop_reason: StopReason::Saturated,
        }
    }

    fn run(&mut self, graph: &TannerGraph, root: usize, cap: Option<usize>) {
        debug_assert!(
            graph.symbol_degree(root) > 0,
            "expansion requires an already-connected root"
        );
        let m = graph.check_count();
        self.epoch += 1;
        self.reached = 0;
        self.frontier.clear();
        self.symbol_epoch[root] = self.epoch;
        for &c in graph.symbol_neighbors(root) {
            self.mark(c, 0);
            self.frontier.push(c);
        }
        let mut level = 0usize;
        loop {
            if self.reached == m {
                // no candidates at any depth; callers treat this as exhaustion
                self.depth = level;
                self.stop_reason = StopReason::ComplementVanished;
                return;
            }
            if cap.is_some_and(|cap| level >= cap) {
                self.depth = level;
                self.stop_reason = StopReason::DepthCapped;
                return;
            }
            self.next_frontier.clear();
            let mut next = std::mem::take(&mut self.next_frontier);
            for i in 0..self.frontier.len() {
                let c = self.frontier[i];
                for &s in graph.check_neighbors(c) {
                    if self.symbol_epoch[s] == self.epoch {
                        continue;
                    }
                    self.symbol_epoch[s] = self.epoch;
                    for &c2 in graph.symbol_neighbors(s) {
                        if self.check_epoch[c2] != self.epoch {
                            self.mark(c2, level as u32 + 1);
                            next.push(c2);
                        }
                    }
                }
            }
            self.next_frontier = next;
            if self.next_frontier.is_empty() {
                self.depth = level;
                self.stop_reason = StopReason::Saturated;
                return;
            }
            if self.reached == m {
                // the complement vanishes at level + 1, candidates stay at `level`
                self.depth = level;
                self.stop_reason = StopReason::ComplementVanished;
                return;
            }
            level += 1;
            std::mem::swap(&mut self.frontier, &mut self.next_frontier);
        }
    }

    fn mark(&mut self, check: usize, depth: u32) {
        self.check_epoch[check] = self.epoch;
        self.check_depth[check] = depth;
        self.reached += 1;
    }

    fn first_depth(&self, check: usize) -> u32 {
        if self.check_epoch[check] == self.epoch {
            self.check_depth[check]
        } else {
            UNREACHED
        }
    }

    fn snapshot_into(&self, result: &mut ExpansionResult) {
        let m = self.check_depth.len();
        result.first_depth.clear();
        result.first_depth.extend((0..m).map(|c| self.first_depth(c)));
        result.depth = self.depth;
        result.stop_reason = self.stop_reason;
    }
}

/// Picks a candidate with minimal current degree, breaking ties uniformly.
pub fn select_lowest_degree(
    candidates: &[usize],
    graph: &TannerGraph,
    rng: &mut impl Rng,
) -> usize {
    assert!(!candidates.is_empty(), "selection over empty candidate set");
    let mut ties: Vec<usize> = Vec::new();
    let mut best = usize::MAX;
    for &c in candidates {
        let degree = graph.check_partial(c);
        if degree < best {
            best = degree;
            ties.clear();
            ties.push(c);
        } else if degree == best {
            ties.push(c);
        }
    }
    ties[rng.random_range(0..ties.len())]
}

/// Picks a candidate with maximal free degree f(c) = d(c) - partial(c),
/// breaking ties uniformly. A forced single candidate is returned even when
/// its free degree is not positive.
pub fn select_highest_fcd(
    candidates: &[usize],
    graph: &TannerGraph,
    rng: &mut impl Rng,
) -> usize {
    assert!(!candidates.is_empty(), "selection over empty candidate set");
    let mut ties: Vec<usize> = Vec::new();
    let mut best = i64::MIN;
    for &c in candidates {
        let f = graph.free_degree(c);
        if f > best {
            best = f;
            ties.clear();
            ties.push(c);
        } else if f == best {
            ties.push(c);
        }
    }
    ties[rng.random_range(0..ties.len())]
}

/// How an edge's check was selected; serialized into the construction log.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionMode {
    /// First edge, pool restricted to already-connected checks, lowest degree.
    FirstConnectedLowest,
    /// First edge over all checks by lowest degree.
    FirstAllLowest,
    /// First edge, pool restricted to already-connected checks, highest FCD.
    FirstConnectedFcd,
    /// First edge over all checks by highest FCD.
    FirstAllFcd,
    /// Expansion candidates ranked by lowest current degree.
    Lowest,
    /// Expansion candidates ranked by highest FCD.
    Fcd,
    /// Relaxed ladder found free sockets in the ensemble at this depth.
    Relaxed { depth: usize },
    /// Strict FCD selection forced onto a candidate without free sockets.
    Overfill,
    /// Relaxed ladder exhausted; strict selection on the final ensemble.
    RelaxedOverfill,
}

impl fmt::Display for SelectionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::FirstConnectedLowest => write!(f, "first_conn_low"),
            Self::FirstAllLowest => write!(f, "first_all_low"),
            Self::FirstConnectedFcd => write!(f, "first_conn_fcd"),
            Self::FirstAllFcd => write!(f, "first_all_fcd"),
            Self::Lowest => write!(f, "lowest"),
            Self::Fcd => write!(f, "fcd"),
            Self::Relaxed { depth } => write!(f, "relaxed:{depth}"),
            Self::Overfill => write!(f, "overfill"),
            Self::RelaxedOverfill => write!(f, "relaxed_overfill"),
        }
    }
}

/// Selects the check for a symbol's first edge according to the variant.
pub fn select_first_edge(
    graph: &TannerGraph,
    symbol: usize,
    symbol_degree: usize,
    config: &PegConfig,
    rng: &mut impl Rng,
) -> usize {
    first_edge_choice(graph, symbol, symbol_degree, config, rng).0
}

fn first_edge_choice(
    graph: &TannerGraph,
    _symbol: usize,
    symbol_degree: usize,
    config: &PegConfig,
    rng: &mut impl Rng,
) -> (usize, SelectionMode, usize) {
    let all: Vec<usize> = (0..graph.check_count()).collect();
    let connected: Vec<usize> = (0..graph.check_count())
        .filter(|&c| graph.check_partial(c) > 0)
        .collect();
    match config.variant {
        PegVariant::Original | PegVariant::LowestFirstFcd => (
            select_lowest_degree(&all, graph, rng),
            SelectionMode::FirstAllLowest,
            all.len(),
        ),
        PegVariant::Fcd => (
            select_highest_fcd(&all, graph, rng),
            SelectionMode::FirstAllFcd,
            all.len(),
        ),
        PegVariant::FcdConnectedFirst => {
            if connected.is_empty() {
                (
                    select_highest_fcd(&all, graph, rng),
                    SelectionMode::FirstAllFcd,
                    all.len(),
                )
            } else {
                (
                    select_highest_fcd(&connected, graph, rng),
                    SelectionMode::FirstConnectedFcd,
                    connected.len(),
                )
            }
        }
        PegVariant::ZigZagFcd => {
            if symbol_degree == 2 {
                if connected.is_empty() {
                    (
                        select_lowest_degree(&all, graph, rng),
                        SelectionMode::FirstAllLowest,
                        all.len(),
                    )
                } else {
                    (
                        select_lowest_degree(&connected, graph, rng),
                        SelectionMode::FirstConnectedLowest,
                        connected.len(),
                    )
                }
            } else {
                (
                    select_highest_fcd(&all, graph, rng),
                    SelectionMode::FirstAllFcd,
                    all.len(),
                )
            }
        }
    }
}

/// Walks the candidate ensembles from depth l-1 downward until one contains
/// a check with free sockets, then selects by highest FCD within it. Falls
/// back to strict selection on the final ensemble when no ensemble at any
/// depth has free sockets left.
pub fn relaxed_fallback(
    expansion: &ExpansionResult,
    graph: &TannerGraph,
    rng: &mut impl Rng,
) -> usize {
    relaxed_choice(expansion, graph, rng).0
}

fn relaxed_choice(
    expansion: &ExpansionResult,
    graph: &TannerGraph,
    rng: &mut impl Rng,
) -> (usize, SelectionMode, usize) {
    for depth in (0..expansion.depth()).rev() {
        let free: Vec<usize> = expansion
            .complement(depth)
            .into_iter()
            .filter(|&c| graph.free_degree(c) > 0)
            .collect();
        if !free.is_empty() {
            return (
                select_highest_fcd(&free, graph, rng),
                SelectionMode::Relaxed { depth },
                free.len(),
            );
        }
    }
    let candidates = expansion.candidates();
    (
        select_highest_fcd(&candidates, graph, rng),
        SelectionMode::RelaxedOverfill,
        candidates.len(),
    )
}

/// One edge-placement decision of the construction loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeDecision {
    pub symbol: usize,
    /// 0-based edge index within the symbol.
    pub k: usize,
    pub check: usize,
    /// Expansion stopping depth; `None` for first edges.
    pub depth: Option<usize>,
    /// Size of the pool the check was selected from.
    pub candidates: usize,
    /// Free degree of the chosen check before the edge was added.
    pub f_chosen: i64,
    pub mode: SelectionMode,
}

/// Everything the construction loop decided, plus summary analytics.
#[derive(Debug, Clone)]
pub struct ConstructionReport {
    pub decisions: Vec<EdgeDecision>,
    /// Edges placed on checks that had no free sockets left.
    pub overfill_events: usize,
    pub girth: Option<usize>,
    /// Compliance of the realized check degrees against the target sequence,
    /// edge perspective.
    pub eta_edge: f64,
    /// Same, node perspective.
    pub eta_node: f64,
}

impl ConstructionReport {
    /// Line-oriented log: one record per edge, then a summary block.
    pub fn to_log(&self) -> String {
        let mut out = String::new();
        for d in &self.decisions {
            let depth = d
                .depth
                .map_or_else(|| "-".to_string(), |v| v.to_string());
            out.push_str(&format!(
                "edge {} {} {} {} {} {} {}\n",
                d.symbol, d.k, d.check, depth, d.candidates, d.f_chosen, d.mode
            ));
        }
        let girth = self
            .girth
            .map_or_else(|| "inf".to_string(), |g| g.to_string());
        out.push_str(&format!("girth {girth}\n"));
        out.push_str(&format!("eta_edge {:.9}\n", self.eta_edge));
        out.push_str(&format!("eta_node {:.9}\n", self.eta_node));
        out.push_str(&format!("overfill {}\n", self.overfill_events));
        out
    }
}

/// Runs the full edge-by-edge construction.
///
/// The symbol sequence drives the outer loop in non-decreasing degree order;
/// the check sequence provides the per-check targets. For FCD variants both
/// sides must expose the same socket total. Identical inputs and seed yield
/// an identical graph.
pub fn construct(
    config: &PegConfig,
    symbol_seq: &DegreeSequence,
    check_seq: &DegreeSequence,
) -> Result<(TannerGraph, ConstructionReport)> {
    config.validate()?;
    if config.variant.uses_fcd() && symbol_seq.total_sockets() != check_seq.total_sockets() {
        return Err(Error::Validation(format!(
            "socket totals differ: {} symbol vs {} check",
            symbol_seq.total_sockets(),
            check_seq.total_sockets()
        )));
    }
    let n = symbol_seq.len();
    let m = check_seq.len();
    let mut graph = TannerGraph::new(n, m, check_seq.degrees().to_vec())?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut expander = Expander::new(n, m);
    let mut expansion = ExpansionResult::empty();
    let mut decisions = Vec::with_capacity(symbol_seq.total_sockets());
    let mut overfill_events = 0usize;

    for (symbol, &degree) in symbol_seq.degrees().iter().enumerate() {
        for k in 0..degree {
            let (check, mode, depth, pool) = if k == 0 {
                let (check, mode, pool) =
                    first_edge_choice(&graph, symbol, degree, config, &mut rng);
                (check, mode, None, pool)
            } else {
                expander.run(&graph, symbol, config.max_expansion_depth);
                expander.snapshot_into(&mut expansion);
                let candidates = expansion.candidates();
                if candidates.is_empty() {
                    return Err(Error::Construction(format!(
                        "symbol {symbol} edge {k}: every check is already reachable \
                         and adjacent, no candidate remains"
                    )));
                }
                let depth = Some(expansion.depth());
                if !config.variant.uses_fcd() {
                    let check = select_lowest_degree(&candidates, &graph, &mut rng);
                    (check, SelectionMode::Lowest, depth, candidates.len())
                } else {
                    let best_f = candidates
                        .iter()
                        .map(|&c| graph.free_degree(c))
                        .max()
                        .expect("non-empty");
                    if best_f > 0 {
                        let check = select_highest_fcd(&candidates, &graph, &mut rng);
                        (check, SelectionMode::Fcd, depth, candidates.len())
                    } else if config.relaxed {
                        let (check, mode, pool) = relaxed_choice(&expansion, &graph, &mut rng);
                        (check, mode, depth, pool)
                    } else {
                        let check = select_highest_fcd(&candidates, &graph, &mut rng);
                        (check, SelectionMode::Overfill, depth, candidates.len())
                    }
                }
            };
            let f_chosen = graph.free_degree(check);
            if f_chosen <= 0 {
                overfill_events += 1;
            }
            graph.add_edge(check, symbol)?;
            decisions.push(EdgeDecision {
                symbol,
                k,
                check,
                depth,
                candidates: pool,
                f_chosen,
                mode,
            });
        }
    }

    let target_rho = distribution_from_sequence(Side::Check, check_seq.degrees())?;
    let report = ConstructionReport {
        decisions,
        overfill_events,
        girth: graph.girth(),
        eta_edge: graph.rho_compliance(&target_rho)?,
        eta_node: graph.rho_compliance_node(&target_rho)?,
    };
    Ok((graph, report))
}
