//! The coarse-grained propagation engine: a single parameterized
//! implementation covering maxRPC3 (incremental support tables), maxRPC3rm
//! (residual tables), behavioral emulations of the earlier maxRPC2 and
//! maxRPCrm algorithms, the light variants of all four, and an AC-3-with-
//! residues baseline.
//!
//! The engine drives a propagation list of variables whose domains changed.
//! Extracting `x_j` revises every neighbor `x_i`: each value `a_i` must still
//! have a PC-support in `D(x_j)` (`search_pc_sup`), and in the full (non-
//! light) variants every cached support pair must still have a PC-witness
//! (`check_pc_wit`). Values that fail are deleted by the revision loop, never
//! inside the search functions. A domain wipeout bumps the weight of the
//! revising constraint and reports failure.
//!
//! What separates the variants is purely how the LastPC/LastAC tables are
//! used: incremental mode trails every write and resumes scans after the
//! last support, residual mode keeps untrailed hints and rescans from
//! scratch, and the emulation flags disable the LastAC shortcut tests so the
//! older algorithms' check counts can be reproduced side by side.

use std::str::FromStr;

use thiserror::Error;

use crate::domain::DomainStore;
use crate::heuristics::{
    order_neighbors_case1, order_triangle_vars, HeuristicId, PropagationList, WeightTable,
};
use crate::network::{ConstraintId, ConstraintNetwork, VarId};
use crate::stats::SolverStats;
use crate::support::{is_valid, ScanMarks, StoreMode, SupportStore, TableKind, NIL};
use crate::trail::Trail;

/// Engine selector. The two emulations reproduce the scan behavior of the
/// earlier coarse-grained algorithms through restricted table usage; the
/// maxRPCrm emulation omits that algorithm's extra special-purpose residues,
/// so its check counts are an upper bound for the original.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    MaxRpc3,
    MaxRpc3Rm,
    MaxRpc2Emu,
    MaxRpcRmEmu,
    Ac3Rm,
}

impl Variant {
    pub fn store_mode(self) -> StoreMode {
        match self {
            Variant::MaxRpc3 | Variant::MaxRpc2Emu => StoreMode::Incremental,
            Variant::MaxRpc3Rm | Variant::MaxRpcRmEmu | Variant::Ac3Rm => StoreMode::Residual,
        }
    }

    fn base_id(self) -> &'static str {
        match self {
            Variant::MaxRpc3 => "maxrpc3",
            Variant::MaxRpc3Rm => "maxrpc3rm",
            Variant::MaxRpc2Emu => "maxrpc2",
            Variant::MaxRpcRmEmu => "maxrpcrm",
            Variant::Ac3Rm => "ac3rm",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("unknown algorithm id '{0}'")]
    UnknownAlgorithm(String),
    #[error("ac3rm has no light form")]
    LightAc,
    #[error("{0:?} emulates an algorithm without LastAC shortcuts")]
    ShortcutsOnEmulation(Variant),
    #[error("bidirectional support writes require residual mode")]
    BidirectionalIncremental,
    #[error("fifo is only valid for propagation-list extraction")]
    FifoOrdering,
}

/// Full static configuration of one propagation engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropagatorConfig {
    pub variant: Variant,
    /// Light variants skip the PC-witness-loss check, propagating only
    /// support loss; still at least as strong as AC.
    pub light: bool,
    /// LastAC residue tests and writes. Forced off for the emulations.
    pub use_last_ac_shortcuts: bool,
    /// On finding a PC-support (a_i, a_j), also record a_i as the support of
    /// a_j in the reverse direction. Residual mode only.
    pub use_bidirectionality: bool,
    /// Propagation-list extraction policy.
    pub queue_heuristic: HeuristicId,
    /// Revision ordering of the neighbors of an extracted variable.
    pub case1_ordering: Option<HeuristicId>,
    /// Triangle ordering inside the witness search under `search_pc_sup`.
    pub case2_ordering: Option<HeuristicId>,
    /// Triangle ordering of the witness-loss loop in `check_pc_wit`.
    pub case3_ordering: Option<HeuristicId>,
    /// Triangle ordering inside the witness search under `check_pc_wit`.
    pub case4_ordering: Option<HeuristicId>,
    /// Maintain trailed scan high-water marks and count any PC-support
    /// rescan of a value index along a branch (incremental mode only).
    pub debug_checks: bool,
}

impl PropagatorConfig {
    pub fn new(variant: Variant) -> Self {
        PropagatorConfig {
            variant,
            light: false,
            use_last_ac_shortcuts: matches!(variant, Variant::MaxRpc3 | Variant::MaxRpc3Rm),
            use_bidirectionality: variant.store_mode() == StoreMode::Residual
                && variant != Variant::Ac3Rm,
            queue_heuristic: HeuristicId::Fifo,
            case1_ordering: None,
            case2_ordering: None,
            case3_ordering: None,
            case4_ordering: None,
            debug_checks: false,
        }
    }

    /// Selects the light variant. Light residual configurations drop the
    /// bidirectional LastPC writes: a reverse-direction hint is only a
    /// once-validated pair, and with the witness-loss check omitted nothing
    /// would ever revisit it, so keeping the hints would make the light
    /// residual fixpoint weaker than the light incremental one.
    pub fn light(mut self, light: bool) -> Self {
        self.light = light;
        self.use_bidirectionality = self.variant.store_mode() == StoreMode::Residual
            && self.variant != Variant::Ac3Rm
            && !light;
        self
    }

    /// The dom/wdeg preset for the propagation list and neighbor ordering,
    /// the configuration the "+h" algorithm ids denote.
    pub fn with_list_heuristics(mut self) -> Self {
        self.queue_heuristic = HeuristicId::DomWdeg;
        self.case1_ordering = Some(HeuristicId::DomWdeg);
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.variant == Variant::Ac3Rm && self.light {
            return Err(ConfigError::LightAc);
        }
        if matches!(self.variant, Variant::MaxRpc2Emu | Variant::MaxRpcRmEmu)
            && self.use_last_ac_shortcuts
        {
            return Err(ConfigError::ShortcutsOnEmulation(self.variant));
        }
        if self.use_bidirectionality && self.variant.store_mode() == StoreMode::Incremental {
            return Err(ConfigError::BidirectionalIncremental);
        }
        for case in [
            self.case1_ordering,
            self.case2_ordering,
            self.case3_ordering,
            self.case4_ordering,
        ] {
            if case == Some(HeuristicId::Fifo) {
                return Err(ConfigError::FifoOrdering);
            }
        }
        Ok(())
    }

    /// Canonical algorithm id: optional `l` prefix, base name, `+h` suffix
    /// when the dom/wdeg list preset is active.
    pub fn id(&self) -> String {
        let mut s = String::new();
        if self.light {
            s.push('l');
        }
        s.push_str(self.variant.base_id());
        if self.queue_heuristic == HeuristicId::DomWdeg
            && self.case1_ordering == Some(HeuristicId::DomWdeg)
        {
            s.push_str("+h");
        }
        s
    }
}

impl FromStr for PropagatorConfig {
    type Err = ConfigError;

    /// Parses algorithm ids as they appear in CLI flags and manifests:
    /// `[l]{maxrpc3,maxrpc3rm,maxrpc2,maxrpcrm,ac3rm}[+h]`.
    fn from_str(id: &str) -> Result<Self, ConfigError> {
        let mut rest = id;
        let with_h = if let Some(stripped) = rest.strip_suffix("+h") {
            rest = stripped;
            true
        } else {
            false
        };
        let light = if let Some(stripped) = rest.strip_prefix('l') {
            rest = stripped;
            true
        } else {
            false
        };
        let variant = match rest {
            "maxrpc3" => Variant::MaxRpc3,
            "maxrpc3rm" => Variant::MaxRpc3Rm,
            "maxrpc2" => Variant::MaxRpc2Emu,
            "maxrpcrm" => Variant::MaxRpcRmEmu,
            "ac3rm" => Variant::Ac3Rm,
            _ => return Err(ConfigError::UnknownAlgorithm(id.to_string())),
        };
        if light && variant == Variant::Ac3Rm {
            return Err(ConfigError::LightAc);
        }
        let mut config = PropagatorConfig::new(variant).light(light);
        if with_h {
            config = config.with_list_heuristics();
        }
        Ok(config)
    }
}

/// Call site of the triangle-witness search, selecting the ordering case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TriSite {
    SupportSearch,
    WitnessCheck,
}

/// One single-threaded solver session: trailed domains and support tables
/// over a shared immutable network, plus counters, weights, and the pending
/// list. Sessions may move between threads but are never shared.
pub struct Session<'n> {
    net: &'n ConstraintNetwork,
    pub config: PropagatorConfig,
    pub domains: DomainStore,
    pub supports: SupportStore,
    pub trail: Trail,
    pub stats: SolverStats,
    pub weights: WeightTable,
    list: PropagationList,
    marks: ScanMarks,
}

impl<'n> Session<'n> {
    pub fn new(net: &'n ConstraintNetwork, config: PropagatorConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let marks = if config.debug_checks && config.variant.store_mode() == StoreMode::Incremental
        {
            ScanMarks::new(net)
        } else {
            ScanMarks::disabled()
        };
        Ok(Session {
            net,
            domains: DomainStore::new(net),
            supports: SupportStore::new(net, config.variant.store_mode()),
            trail: Trail::new(),
            stats: SolverStats::new(),
            weights: WeightTable::new(net),
            list: PropagationList::new(net.num_vars()),
            marks,
            config,
        })
    }

    pub fn network(&self) -> &'n ConstraintNetwork {
        self.net
    }

    /// PC-support rescans observed by the amortization instrumentation.
    pub fn scan_violations(&self) -> u64 {
        self.marks.violations()
    }

    /// The counted constraint check: exactly one `cc` per call. `u`/`v` may
    /// be given in either order; the relation is evaluated in the
    /// constraint's stored orientation.
    pub fn is_consistent(&mut self, cid: ConstraintId, u: VarId, au: i32, v: VarId, av: i32) -> bool {
        self.stats.cc += 1;
        let c = self.net.constraint(cid);
        debug_assert!((c.x == u && c.y == v) || (c.x == v && c.y == u));
        if c.x == u {
            self.net.check(cid, au, av)
        } else {
            self.net.check(cid, av, au)
        }
    }

    /// Removes `idx` from `D(x)`, returning true on wipeout.
    pub fn remove_value(&mut self, x: VarId, idx: i32) -> bool {
        self.domains
            .remove(x, idx, &mut self.trail, &mut self.stats)
    }

    /// Narrows `D(x)` to the singleton `{idx}`.
    pub fn assign(&mut self, x: VarId, idx: i32) {
        self.domains.assign(x, idx, &mut self.trail, &mut self.stats);
    }

    pub fn level(&self) -> usize {
        self.trail.level()
    }

    pub fn push_level(&mut self) -> usize {
        self.trail.push_level()
    }

    /// Restores every trailed write above `level`: domain deletions,
    /// incremental support-table writes, and scan marks, in reverse order.
    pub fn restore(&mut self, level: usize) {
        self.trail
            .restore(level, &mut self.domains, &mut self.supports, &mut self.marks);
    }

    /// Root-level consistency enforcement: the brute-force initialization
    /// pass followed by propagation to fixpoint. Returns false iff the
    /// instance is inconsistent under the configured consistency.
    pub fn preprocess(&mut self) -> bool {
        match self.config.variant {
            Variant::Ac3Rm => {
                self.list.clear();
                for x in 0..self.net.num_vars() {
                    self.list.insert(x);
                }
                self.propagate()
            }
            _ => self.initialize() && self.propagate(),
        }
    }

    /// Seeds the propagation list with one variable (the just-assigned or
    /// just-pruned one during search) and propagates to fixpoint.
    pub fn propagate_from(&mut self, x: VarId) -> bool {
        self.list.clear();
        self.list.insert(x);
        self.propagate()
    }

    /// Seeds the propagation list with several variables and propagates.
    pub fn propagate_seeded(&mut self, seeds: &[VarId]) -> bool {
        self.list.clear();
        for &x in seeds {
            self.list.insert(x);
        }
        self.propagate()
    }

    /// The preprocessing pass: for every value of every variable, force a
    /// PC-support search on each incident constraint starting from NIL
    /// pointers. Failing values are deleted and their variables queued for
    /// the subsequent fixpoint propagation.
    pub fn initialize(&mut self) -> bool {
        debug_assert!(self.config.variant != Variant::Ac3Rm);
        let net = self.net;
        for xi in 0..net.num_vars() {
            let mut next = self.domains.next_value(xi, 0);
            while let Some(ai) = next {
                for &(cid, xj) in net.adjacency(xi) {
                    if !self.search_pc_sup(xi, ai, cid, xj) {
                        let wipeout = self.remove_value(xi, ai);
                        self.list.insert(xi);
                        if wipeout {
                            self.weights.bump(cid, &mut self.stats);
                            return false;
                        }
                        break;
                    }
                }
                next = self.domains.next_value(xi, ai + 1);
            }
        }
        true
    }

    /// Drains the propagation list to fixpoint. Returns false on the first
    /// domain wipeout, after finishing the current value loop, with the
    /// revising constraint's weight bumped.
    pub fn propagate(&mut self) -> bool {
        match self.config.variant {
            Variant::Ac3Rm => self.propagate_ac(),
            _ => self.propagate_maxrpc(),
        }
    }

    fn propagate_maxrpc(&mut self) -> bool {
        let net = self.net;
        while let Some(xj) =
            self.list
                .extract(self.config.queue_heuristic, net, &self.domains, &self.weights)
        {
            let plain;
            let ordered;
            let neighbors: &[(ConstraintId, VarId)] = match self.config.case1_ordering {
                None => {
                    plain = net.adjacency(xj);
                    plain
                }
                Some(h) => {
                    ordered =
                        order_neighbors_case1(xj, Some(h), net, &self.domains, &self.weights);
                    &ordered
                }
            };
            for &(cid, xi) in neighbors {
                let mut next = self.domains.next_value(xi, 0);
                while let Some(ai) = next {
                    let keep = self.search_pc_sup(xi, ai, cid, xj)
                        && (self.config.light || self.check_pc_wit(xi, ai, cid, xj));
                    if !keep {
                        self.remove_value(xi, ai);
                        self.list.insert(xi);
                    }
                    next = self.domains.next_value(xi, ai + 1);
                }
                if self.domains.is_empty(xi) {
                    self.weights.bump(cid, &mut self.stats);
                    return false;
                }
            }
        }
        true
    }

    /// Coarse-grained AC with one multidirectional residue per (arc, value),
    /// sharing the queue, ordering, and weight-bump contract of the maxRPC
    /// loop.
    fn propagate_ac(&mut self) -> bool {
        let net = self.net;
        while let Some(xj) =
            self.list
                .extract(self.config.queue_heuristic, net, &self.domains, &self.weights)
        {
            let plain;
            let ordered;
            let neighbors: &[(ConstraintId, VarId)] = match self.config.case1_ordering {
                None => {
                    plain = net.adjacency(xj);
                    plain
                }
                Some(h) => {
                    ordered =
                        order_neighbors_case1(xj, Some(h), net, &self.domains, &self.weights);
                    &ordered
                }
            };
            for &(cid, xi) in neighbors {
                let arc = net.arc(cid, xi);
                let mut next = self.domains.next_value(xi, 0);
                while let Some(ai) = next {
                    let residue = self.supports.get(TableKind::Ac, arc, ai);
                    if !is_valid(residue, xj, &self.domains) {
                        let mut found = NIL;
                        let mut cand = self.domains.next_value(xj, 0);
                        while let Some(aj) = cand {
                            if self.is_consistent(cid, xi, ai, xj, aj) {
                                found = aj;
                                break;
                            }
                            cand = self.domains.next_value(xj, aj + 1);
                        }
                        if found == NIL {
                            self.remove_value(xi, ai);
                            self.list.insert(xi);
                        } else {
                            self.supports
                                .set(TableKind::Ac, arc, ai, found, &mut self.trail);
                            let back = net.arc(cid, xj);
                            self.supports
                                .set(TableKind::Ac, back, found, ai, &mut self.trail);
                        }
                    }
                    next = self.domains.next_value(xi, ai + 1);
                }
                if self.domains.is_empty(xi) {
                    self.weights.bump(cid, &mut self.stats);
                    return false;
                }
            }
        }
        true
    }

    /// Is there a PC-support for `a_i` in `D(x_j)`?
    ///
    /// A still-valid LastPC answers immediately. Otherwise incremental mode
    /// resumes the scan from `max(LastPC + 1, LastAC)` (or `LastAC + 1` when
    /// the LastAC entry is stale), residual mode rescans from the first
    /// value. Each AC-consistent candidate is verified by the triangle
    /// witness search; success records LastPC, and in residual mode the
    /// LastAC residue plus the reverse-direction LastPC when
    /// bidirectionality is on.
    pub fn search_pc_sup(&mut self, xi: VarId, ai: i32, cid: ConstraintId, xj: VarId) -> bool {
        let net = self.net;
        let arc = net.arc(cid, xi);
        let last_pc = self.supports.get(TableKind::Pc, arc, ai);
        if is_valid(last_pc, xj, &self.domains) {
            return true;
        }
        let incremental = self.supports.mode() == StoreMode::Incremental;
        let start = if incremental {
            let last_ac = self.supports.get(TableKind::Ac, arc, ai);
            if is_valid(last_ac, xj, &self.domains) {
                (last_pc + 1).max(last_ac)
            } else {
                (last_pc + 1).max(last_ac + 1)
            }
        } else {
            0
        };

        let start_mark = self.marks.start(arc, ai);
        let mut max_visited = NIL;
        let mut found = false;
        let mut cand = self.domains.next_value(xj, start);
        while let Some(aj) = cand {
            self.marks.record_visit(start_mark, aj);
            max_visited = aj;
            if self.is_consistent(cid, xi, ai, xj, aj) {
                if incremental && self.config.use_last_ac_shortcuts {
                    let last_ac = self.supports.get(TableKind::Ac, arc, ai);
                    if !is_valid(last_ac, xj, &self.domains) && last_ac > last_pc {
                        self.supports.set(TableKind::Ac, arc, ai, aj, &mut self.trail);
                    }
                }
                if self.search_pc_wit(xi, ai, xj, aj, cid, TriSite::SupportSearch) {
                    self.supports.set(TableKind::Pc, arc, ai, aj, &mut self.trail);
                    if !incremental {
                        if self.config.use_last_ac_shortcuts {
                            self.supports.set(TableKind::Ac, arc, ai, aj, &mut self.trail);
                        }
                        if self.config.use_bidirectionality {
                            let back = net.arc(cid, xj);
                            self.supports.set(TableKind::Pc, back, aj, ai, &mut self.trail);
                        }
                    }
                    found = true;
                    break;
                }
            }
            cand = self.domains.next_value(xj, aj + 1);
        }
        self.marks.finish(arc, ai, max_visited, &mut self.trail);
        found
    }

    /// Is the pair `(a_i, a_j)` path consistent? For every variable closing a
    /// 3-clique with the pair's constraint, some value must support both.
    ///
    /// With shortcuts on, a valid LastAC of either side that checks against
    /// the opposite value certifies a witness without scanning. Incremental
    /// mode then seeks fresh lexicographically-smallest AC supports and scans
    /// from their maximum; residual mode scans from scratch and records the
    /// found witness in both LastAC residues.
    fn search_pc_wit(
        &mut self,
        xi: VarId,
        ai: i32,
        xj: VarId,
        aj: i32,
        cid: ConstraintId,
        site: TriSite,
    ) -> bool {
        let net = self.net;
        let heuristic = match site {
            TriSite::SupportSearch => self.config.case2_ordering,
            TriSite::WitnessCheck => self.config.case4_ordering,
        };
        let plain;
        let ordered;
        let triangles: &[VarId] = match heuristic {
            None => {
                plain = net.triangles(cid);
                plain
            }
            Some(h) => {
                ordered = order_triangle_vars(cid, Some(h), net, &self.domains, &self.weights);
                &ordered
            }
        };
        let incremental = self.supports.mode() == StoreMode::Incremental;
        let shortcuts = self.config.use_last_ac_shortcuts;

        'triangles: for &xk in triangles {
            let c_ik = net.between(xi, xk).expect("triangle edge i-k");
            let c_jk = net.between(xj, xk).expect("triangle edge j-k");
            let arc_ik = net.arc(c_ik, xi);
            let arc_jk = net.arc(c_jk, xj);

            if shortcuts {
                let r_i = self.supports.get(TableKind::Ac, arc_ik, ai);
                if is_valid(r_i, xk, &self.domains) && self.is_consistent(c_jk, xk, r_i, xj, aj) {
                    continue 'triangles;
                }
                let r_j = self.supports.get(TableKind::Ac, arc_jk, aj);
                if is_valid(r_j, xk, &self.domains) && self.is_consistent(c_ik, xk, r_j, xi, ai) {
                    continue 'triangles;
                }
            }

            let start = if incremental && shortcuts {
                if !self.seek_ac_support(xi, ai, xk, c_ik) || !self.seek_ac_support(xj, aj, xk, c_jk)
                {
                    return false;
                }
                self.supports
                    .get(TableKind::Ac, arc_ik, ai)
                    .max(self.supports.get(TableKind::Ac, arc_jk, aj))
            } else {
                0
            };

            let mut cand = self.domains.next_value(xk, start);
            while let Some(ak) = cand {
                if self.is_consistent(c_ik, xi, ai, xk, ak)
                    && self.is_consistent(c_jk, xj, aj, xk, ak)
                {
                    if !incremental && shortcuts {
                        self.supports.set(TableKind::Ac, arc_ik, ai, ak, &mut self.trail);
                        self.supports.set(TableKind::Ac, arc_jk, aj, ak, &mut self.trail);
                    }
                    continue 'triangles;
                }
                cand = self.domains.next_value(xk, ak + 1);
            }
            return false;
        }
        true
    }

    /// PC-witness-loss check for `a_i` after `x_j` was pruned, full variants
    /// only. For each triangle variable `x_k` of the revising constraint:
    /// if the cached PC-support `a_k = LastPC` of `a_i` in `x_k` is still
    /// present, the pair `(a_i, a_k)` must keep a witness in `D(x_j)`;
    /// otherwise a replacement PC-support for `a_i` is sought in `D(x_k)`.
    /// Returns false when neither exists for some triangle variable.
    pub fn check_pc_wit(&mut self, xi: VarId, ai: i32, cid: ConstraintId, xj: VarId) -> bool {
        let net = self.net;
        let plain;
        let ordered;
        let triangles: &[VarId] = match self.config.case3_ordering {
            None => {
                plain = net.triangles(cid);
                plain
            }
            Some(h) => {
                ordered =
                    order_triangle_vars(cid, Some(h), net, &self.domains, &self.weights);
                &ordered
            }
        };
        let incremental = self.supports.mode() == StoreMode::Incremental;
        let shortcuts = self.config.use_last_ac_shortcuts;

        for &xk in triangles {
            let c_ik = net.between(xi, xk).expect("triangle edge i-k");
            let c_jk = net.between(xj, xk).expect("triangle edge j-k");
            let arc_ik = net.arc(c_ik, xi);
            let mut witness = false;

            let last_pc = self.supports.get(TableKind::Pc, arc_ik, ai);
            if is_valid(last_pc, xk, &self.domains) {
                let ak = last_pc;
                // First part: does (a_i, a_k) still have a witness in D(x_j)?
                if shortcuts {
                    let r_i = self.supports.get(TableKind::Ac, net.arc(cid, xi), ai);
                    if is_valid(r_i, xj, &self.domains)
                        && self.is_consistent(c_jk, xj, r_i, xk, ak)
                    {
                        witness = true;
                    } else {
                        let r_k = self.supports.get(TableKind::Ac, net.arc(c_jk, xk), ak);
                        if is_valid(r_k, xj, &self.domains)
                            && self.is_consistent(cid, xj, r_k, xi, ai)
                        {
                            witness = true;
                        }
                    }
                }
                if !witness {
                    let mut skip_witness_scan = false;
                    let start = if incremental && shortcuts {
                        if self.seek_ac_support(xi, ai, xj, cid)
                            && self.seek_ac_support(xk, ak, xj, c_jk)
                        {
                            self.supports
                                .get(TableKind::Ac, net.arc(cid, xi), ai)
                                .max(self.supports.get(TableKind::Ac, net.arc(c_jk, xk), ak))
                        } else {
                            // One side has no AC support left in D(x_j):
                            // no witness can exist, go straight to the
                            // replacement-support search.
                            skip_witness_scan = true;
                            0
                        }
                    } else {
                        0
                    };
                    if !skip_witness_scan {
                        let mut cand = self.domains.next_value(xj, start);
                        while let Some(aj) = cand {
                            if self.is_consistent(cid, xi, ai, xj, aj)
                                && self.is_consistent(c_jk, xk, ak, xj, aj)
                            {
                                if !incremental && shortcuts {
                                    self.supports.set(
                                        TableKind::Ac,
                                        net.arc(cid, xi),
                                        ai,
                                        aj,
                                        &mut self.trail,
                                    );
                                    self.supports.set(
                                        TableKind::Ac,
                                        net.arc(c_jk, xk),
                                        ak,
                                        aj,
                                        &mut self.trail,
                                    );
                                }
                                witness = true;
                                break;
                            }
                            cand = self.domains.next_value(xj, aj + 1);
                        }
                    }
                }
            }

            if !witness {
                // Second part: seek a replacement PC-support for a_i in
                // D(x_k). Incremental mode resumes above the stale LastPC;
                // residual mode rescans the whole domain, since residues
                // written on other branches carry no ordering guarantee.
                let start = if incremental {
                    let last_ac = self.supports.get(TableKind::Ac, arc_ik, ai);
                    if is_valid(last_ac, xk, &self.domains) {
                        (last_pc + 1).max(last_ac)
                    } else {
                        (last_pc + 1).max(last_ac + 1)
                    }
                } else {
                    0
                };
                let start_mark = self.marks.start(arc_ik, ai);
                let mut max_visited = NIL;
                let mut cand = self.domains.next_value(xk, start);
                while let Some(ak) = cand {
                    self.marks.record_visit(start_mark, ak);
                    max_visited = ak;
                    if self.is_consistent(c_ik, xi, ai, xk, ak) {
                        if incremental && shortcuts {
                            let last_ac = self.supports.get(TableKind::Ac, arc_ik, ai);
                            if !is_valid(last_ac, xk, &self.domains) && last_ac > last_pc {
                                self.supports
                                    .set(TableKind::Ac, arc_ik, ai, ak, &mut self.trail);
                            }
                        }
                        if self.search_pc_wit(xi, ai, xk, ak, c_ik, TriSite::WitnessCheck) {
                            self.supports
                                .set(TableKind::Pc, arc_ik, ai, ak, &mut self.trail);
                            if !incremental {
                                if shortcuts {
                                    self.supports
                                        .set(TableKind::Ac, arc_ik, ai, ak, &mut self.trail);
                                }
                                if self.config.use_bidirectionality {
                                    let back = net.arc(c_ik, xk);
                                    self.supports
                                        .set(TableKind::Pc, back, ak, ai, &mut self.trail);
                                }
                            }
                            witness = true;
                            break;
                        }
                    }
                    cand = self.domains.next_value(xk, ak + 1);
                }
                self.marks.finish(arc_ik, ai, max_visited, &mut self.trail);
            }

            if !witness {
                return false;
            }
        }
        true
    }

    /// AC2001-style pointer maintenance: if the LastAC entry for `a` toward
    /// `y` is stale, resume the scan right after it and record the first
    /// consistent value found. Incremental mode only.
    fn seek_ac_support(&mut self, x: VarId, a: i32, y: VarId, cid: ConstraintId) -> bool {
        debug_assert!(self.supports.mode() == StoreMode::Incremental);
        let arc = self.net.arc(cid, x);
        let last_ac = self.supports.get(TableKind::Ac, arc, a);
        if is_valid(last_ac, y, &self.domains) {
            return true;
        }
        let mut cand = self.domains.next_value(y, last_ac + 1);
        while let Some(b) = cand {
            if self.is_consistent(cid, x, a, y, b) {
                self.supports.set(TableKind::Ac, arc, a, b, &mut self.trail);
                return true;
            }
            cand = self.domains.next_value(y, b + 1);
        }
        false
    }
}
