//! Labelled tableaux: signed formulas `L(φ)` with `L` a truth value, expansion
//! rules read off the multialgebras, closure conditions mirroring the
//! restriction clauses, optional derived rules, and countermodels from open
//! branches.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::algebra::{Snapshot, ValueSet};
use crate::formula::{Formula, Kind, Logic};
use crate::truthtable::millis;
use crate::valuation::{complete, ExtensionError, Valuation};

pub type Label = Snapshot;

pub const DEFAULT_NODE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignedFormula {
    pub label: Label,
    pub formula: Formula,
    pub used: bool,
}

impl SignedFormula {
    pub fn new(label: Label, formula: Formula) -> SignedFormula {
        SignedFormula { label, formula, used: false }
    }
}

impl std::fmt::Display for SignedFormula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}({})", self.label, self.formula)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableauError {
    #[error("no rule applies to the atomic signed formula {0}")]
    NoRule(SignedFormula),
    #[error("node cap of {cap} exceeded")]
    NodeCap { cap: usize },
    #[error("{formula} uses the consistency connective, which {logic} lacks")]
    Signature { formula: Formula, logic: Logic },
    #[error("label {label} is not a value of {logic}")]
    Label { label: Label, logic: Logic },
    #[error("countermodels come only from open complete branches")]
    BranchNotOpen,
    #[error("open branch has no model: {0}")]
    Extraction(ExtensionError),
}

/// One alternative of a rule: the labels allowed for each listed formula.
/// Set labels multiply out into one branch per combination.
type Alternative = Vec<(ValueSet, Formula)>;

fn multiply(alts: Vec<Alternative>, n: u32) -> Vec<Vec<SignedFormula>> {
    let mut out = Vec::new();
    for alt in alts {
        let mut partial: Vec<Vec<SignedFormula>> = vec![vec![]];
        for (set, f) in alt {
            let mut next = Vec::new();
            for prefix in &partial {
                for l in set.values(n) {
                    let mut b = prefix.clone();
                    b.push(SignedFormula::new(l, f.clone()));
                    next.push(b);
                }
            }
            partial = next;
        }
        out.extend(partial);
    }
    out
}

fn one(v: Snapshot) -> ValueSet {
    ValueSet::single(v)
}

/// Basic rules of the three-valued systems, alternatives in the order the
/// calculus lists them.
fn three_valued_rule(logic: Logic, label: Label, f: &Formula) -> Vec<Alternative> {
    let (t_, i_, f_) = (one(Snapshot::top(1)), one(Snapshot::inconsistent(1, 0)), one(Snapshot::bottom(1)));
    let (is_t, is_i) = (label.is_top(), label.inconsistency_index().is_some());
    let mb = logic == Logic::MbCcl;
    let alt1 = |s: ValueSet, a: &Formula| vec![(s, a.clone())];
    let alt2 = |s: ValueSet, a: &Formula, r: ValueSet, b: &Formula| vec![(s, a.clone()), (r, b.clone())];
    match f.kind() {
        Kind::Var(_) => vec![],
        Kind::Neg(a) => {
            if is_t || (mb && is_i) {
                vec![alt1(f_, a), alt1(i_, a)]
            } else if is_i {
                vec![alt1(i_, a)]
            } else {
                vec![alt1(t_, a)]
            }
        }
        Kind::Cons(a) => {
            if is_t || (mb && is_i) {
                vec![alt1(t_, a), alt1(f_, a)]
            } else if is_i {
                vec![]
            } else {
                vec![alt1(i_, a)]
            }
        }
        Kind::And(a, b) => {
            if is_t || (mb && is_i) {
                vec![alt2(t_, a, t_, b), alt2(t_, a, i_, b), alt2(i_, a, t_, b), alt2(i_, a, i_, b)]
            } else if is_i {
                vec![alt2(t_, a, i_, b), alt2(i_, a, t_, b), alt2(i_, a, i_, b)]
            } else {
                vec![alt1(f_, a), alt1(f_, b)]
            }
        }
        Kind::Or(a, b) => {
            if is_t || (mb && is_i) {
                vec![alt1(t_, a), alt1(i_, a), alt1(t_, b), alt1(i_, b)]
            } else if is_i {
                vec![alt1(i_, a), alt1(i_, b)]
            } else {
                vec![alt2(f_, a, f_, b)]
            }
        }
        Kind::Imp(a, b) => {
            if is_t || (mb && is_i) {
                vec![alt1(f_, a), alt1(t_, b), alt1(i_, b)]
            } else if is_i {
                vec![alt2(i_, a, t_, b), alt1(i_, b)]
            } else {
                vec![alt2(t_, a, f_, b), alt2(i_, a, f_, b)]
            }
        }
    }
}

/// Basic rules of `T_n`, `n ≥ 2`, with set labels `D`, `I`.
fn cn_rule(n: u32, label: Label, f: &Formula) -> Vec<Alternative> {
    let t_ = one(Snapshot::top(n));
    let f_ = one(Snapshot::bottom(n));
    let d = ValueSet::designated(n);
    let i = ValueSet::inconsistent(n);
    let (is_t, is_f) = (label.is_top(), label.is_bottom());
    let alt1 = |s: ValueSet, a: &Formula| vec![(s, a.clone())];
    let alt2 = |s: ValueSet, a: &Formula, r: ValueSet, b: &Formula| vec![(s, a.clone()), (r, b.clone())];
    match f.kind() {
        Kind::Var(_) | Kind::Cons(_) => vec![],
        Kind::Neg(a) => {
            if is_t {
                vec![alt1(i, a), alt1(f_, a)]
            } else if is_f {
                vec![alt1(t_, a)]
            } else {
                vec![alt1(i, a)]
            }
        }
        Kind::And(a, b) => {
            if is_t {
                vec![alt2(d, a, d, b)]
            } else if is_f {
                vec![alt1(f_, a), alt1(f_, b)]
            } else {
                vec![alt2(t_, a, i, b), alt2(i, a, i, b), alt2(t_, b, i, a)]
            }
        }
        Kind::Or(a, b) => {
            if is_t {
                vec![alt1(d, a), alt1(d, b)]
            } else if is_f {
                vec![alt2(f_, a, f_, b)]
            } else {
                vec![alt1(i, a), alt1(i, b)]
            }
        }
        Kind::Imp(a, b) => {
            if is_t {
                vec![alt1(f_, a), alt1(d, b)]
            } else if is_f {
                vec![alt2(f_, b, d, a)]
            } else {
                vec![alt2(t_, b, i, a), alt1(i, b)]
            }
        }
    }
}

fn check_input(logic: Logic, sf: &SignedFormula) -> Result<(), TableauError> {
    if sf.label.n() != logic.n() {
        return Err(TableauError::Label { label: sf.label, logic });
    }
    if let Kind::Cons(_) = sf.formula.kind() {
        if !logic.has_consistency() {
            return Err(TableauError::Signature { formula: sf.formula.clone(), logic });
        }
    }
    Ok(())
}

/// Branch extensions of the basic rule for `sf`. An empty list means no
/// extension is consistent (the branch closes).
pub fn expand(logic: Logic, sf: &SignedFormula) -> Result<Vec<Vec<SignedFormula>>, TableauError> {
    check_input(logic, sf)?;
    if sf.formula.is_atom() {
        return Err(TableauError::NoRule(sf.clone()));
    }
    let alts = match logic {
        Logic::Cn(n) if n >= 2 => cn_rule(n, sf.label, &sf.formula),
        _ => three_valued_rule(logic, sf.label, &sf.formula),
    };
    Ok(multiply(alts, logic.n()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DerivedExpansion {
    /// The branch closes at once.
    Star,
    Branches(Vec<Vec<SignedFormula>>),
}

enum Derived {
    Star,
    Alts(Vec<Alternative>),
}

fn derived_three_valued(label: Label, f: &Formula) -> Option<Derived> {
    let (t_, i_, f_) = (one(Snapshot::top(1)), one(Snapshot::inconsistent(1, 0)), one(Snapshot::bottom(1)));
    let is_i = label.inconsistency_index().is_some();
    if let Some(phi) = f.as_contradiction() {
        return match () {
            _ if label.is_top() => Some(Derived::Alts(vec![vec![(i_, phi.clone())]])),
            _ if label.is_bottom() => Some(Derived::Alts(vec![vec![(t_, phi.clone())], vec![(f_, phi.clone())]])),
            _ => None,
        };
    }
    if let Some(phi) = f.as_pow1() {
        return Some(match () {
            _ if is_i => Derived::Star,
            _ if label.is_top() => Derived::Alts(vec![vec![(t_, phi.clone())], vec![(f_, phi.clone())]]),
            _ => Derived::Alts(vec![vec![(i_, phi.clone())]]),
        });
    }
    if let Kind::And(a, b) = f.kind() {
        if let (Some(phi), Some(psi)) = (a.as_pow1(), b.as_pow1()) {
            let (phi, psi) = (phi.clone(), psi.clone());
            return Some(match () {
                _ if is_i => Derived::Star,
                _ if label.is_top() => Derived::Alts(
                    [(t_, t_), (t_, f_), (f_, t_), (f_, f_)]
                        .into_iter()
                        .map(|(x, y)| vec![(x, phi.clone()), (y, psi.clone())])
                        .collect(),
                ),
                _ => Derived::Alts(vec![vec![(i_, phi)], vec![(i_, psi)]]),
            });
        }
    }
    None
}

fn derived_cn(n: u32, label: Label, f: &Formula) -> Option<Derived> {
    let f_ = one(Snapshot::bottom(n));
    if let Some((phi, _)) = f.as_powseq().filter(|&(_, r)| r >= n) {
        let classical = vec![vec![(one(Snapshot::top(n)), phi.clone())], vec![(f_, phi.clone())]];
        return Some(match () {
            _ if label.is_top() => Derived::Alts(classical),
            _ if label.is_bottom() => Derived::Alts(vec![vec![(ValueSet::inconsistent(n), phi.clone())]]),
            _ => Derived::Star,
        });
    }
    let alt = |s: ValueSet, phi: &Formula| Derived::Alts(vec![vec![(s, phi.clone())]]);
    let upto_or_f = |i: i64| ValueSet::designated_upto(n, i).union(f_);
    if let Some(a) = f.as_contradiction() {
        let (phi, i) = a.power_decomposition();
        return match label.inconsistency_index() {
            None if label.is_top() => Some(if i < n { alt(one(Snapshot::inconsistent(n, i)), phi) } else { Derived::Star }),
            None => (i < n).then(|| alt(upto_or_f(i as i64 - 1), phi)),
            Some(_) => Some(if i + 2 <= n { alt(ValueSet::inconsistent_from(n, i + 1), phi) } else { Derived::Star }),
        };
    }
    if f.as_pow1().is_some() {
        let (phi, j) = f.power_decomposition();
        return match label.inconsistency_index() {
            None if label.is_top() => (j <= n).then(|| alt(upto_or_f(j as i64 - 2), phi)),
            None => (j <= n).then(|| alt(one(Snapshot::inconsistent(n, j - 1)), phi)),
            Some(s) => Some(if j < n && s + j < n {
                alt(one(Snapshot::inconsistent(n, s + j)), phi)
            } else {
                Derived::Star
            }),
        };
    }
    if let Kind::Neg(a) = f.kind() {
        if a.as_pow1().is_some() {
            let (phi, j) = a.power_decomposition();
            return match label.inconsistency_index() {
                None if label.is_top() => (j <= n).then(|| alt(ValueSet::inconsistent_from(n, j - 1), phi)),
                None => (j <= n).then(|| alt(upto_or_f(j as i64 - 2), phi)),
                Some(_) => Some(if j < n { alt(ValueSet::inconsistent_from(n, j), phi) } else { Derived::Star }),
            };
        }
    }
    None
}

fn derived(logic: Logic, label: Label, f: &Formula) -> Option<Derived> {
    match logic {
        Logic::Cn(n) if n >= 2 => derived_cn(n, label, f),
        Logic::Cn(_) | Logic::Cila => derived_three_valued(label, f),
        Logic::MbCcl => None,
    }
}

/// The derived rule for `sf`, if one matches; `None` means use [`expand`].
pub fn expand_derived(logic: Logic, sf: &SignedFormula) -> Option<DerivedExpansion> {
    check_input(logic, sf).ok()?;
    Some(match derived(logic, sf.label, &sf.formula)? {
        Derived::Star => DerivedExpansion::Star,
        Derived::Alts(a) => DerivedExpansion::Branches(multiply(a, logic.n())),
    })
}

fn shape_name(f: &Formula) -> &'static str {
    if f.as_powseq().is_some() {
        "a^(k)"
    } else if f.as_contradiction().is_some() {
        "a & ~a"
    } else if f.as_pow1().is_some() {
        "a^k"
    } else if matches!(f.kind(), Kind::Neg(a) if a.as_pow1().is_some()) {
        "~a^k"
    } else if matches!(f.kind(), Kind::And(..)) {
        "a^1 & b^1"
    } else {
        "?"
    }
}

fn rule_name(label: Label, f: &Formula, derived: bool) -> Arc<str> {
    if derived {
        format!("{label}({}) derived", shape_name(f)).into()
    } else {
        let sym = f.connective().map_or("atom", |c| c.symbol());
        format!("{label}({sym})").into()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClosureReason {
    /// Two different labels on one formula.
    Conflict { formula: Formula, first: Label, second: Label },
    /// An inconsistent label on `ψ ∧ ¬ψ` (three-valued systems).
    InconsistentContradiction { formula: Formula },
    /// An inconsistent label on `∘ψ` (Cila).
    InconsistentConsistency { formula: Formula },
    /// `t_0(ψ)` with an inconsistent label on `ψ ∧ ¬ψ`.
    FirstInconsistency { base: Formula },
    /// `t_k(ψ)`, `k ≥ 1`, with `T(ψ ∧ ¬ψ)`.
    TopContradiction { base: Formula },
    /// `t_k(ψ)`, `k ≥ 1`, with a label other than `t_{k-1}` on `ψ¹`.
    StepMismatch { base: Formula },
    /// A derived rule closed the branch.
    Star { rule: String },
    /// The applicable rule has no consistent extension.
    NoExtension { formula: Formula },
    /// The remaining alternatives of a branching rule, closed because the
    /// previous alternative closed without using its own formulas.
    Backjump { skipped: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BranchStatus {
    /// Complete and open.
    Open,
    Closed { reason: ClosureReason },
    /// Left unexplored after the search stopped early.
    Unfinished,
}

#[derive(Debug, Clone)]
pub struct TableauNode {
    pub label: Label,
    pub formula: Formula,
    pub rule: Option<Arc<str>>,
    /// The node whose expansion introduced this one.
    pub source: Option<usize>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchRecord {
    pub leaf: usize,
    pub status: BranchStatus,
    /// Nodes still awaiting expansion when the branch ended.
    pub pending: Vec<usize>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct TableauStats {
    pub nodes: usize,
    pub branches: usize,
    pub closures: usize,
    pub derived_rule_hits: usize,
    /// Branching rules skipped because an alternative was already on the branch.
    pub redundant_skips: usize,
    /// Alternatives skipped by backjumping.
    pub backjumped: usize,
    #[serde(serialize_with = "millis")]
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct Branch {
    pub formulas: Vec<SignedFormula>,
    pub status: BranchStatus,
}

#[derive(Debug, Clone)]
pub struct Tableau {
    pub logic: Logic,
    /// Empty, like `branches`, when the tree was not recorded.
    pub nodes: Vec<TableauNode>,
    pub branches: Vec<BranchRecord>,
    pub stats: TableauStats,
    /// Every branch is closed or open and complete.
    pub completed: bool,
}

impl Tableau {
    pub fn root(&self) -> Option<&TableauNode> {
        self.nodes.first()
    }

    /// Root-to-leaf signed formulas of branch `i`.
    pub fn branch(&self, i: usize) -> Branch {
        let rec = &self.branches[i];
        let mut path = Vec::new();
        let mut at = Some(rec.leaf);
        while let Some(id) = at {
            path.push(id);
            at = self.nodes[id].parent;
        }
        path.reverse();
        let formulas = path
            .iter()
            .map(|&id| {
                let node = &self.nodes[id];
                let used = !node.formula.is_atom() && !rec.pending.contains(&id);
                SignedFormula { label: node.label, formula: node.formula.clone(), used }
            })
            .collect();
        Branch { formulas, status: rec.status.clone() }
    }

    pub fn open_branches(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.branches.len()).filter(|&i| self.branches[i].status == BranchStatus::Open)
    }

    /// Indented tree: one line per node, children of branching nodes indented.
    pub fn render(&self) -> String {
        let leaves: HashMap<usize, &BranchStatus> = self.branches.iter().map(|b| (b.leaf, &b.status)).collect();
        let mark = |st: &BranchStatus| match st {
            BranchStatus::Open => "o open".to_string(),
            BranchStatus::Closed { reason } => format!("x closed: {}", describe(reason)),
            BranchStatus::Unfinished => ". unfinished".to_string(),
        };
        let mut out = String::new();
        // Err entries are backjump markers, printed after the skipped node's children.
        let mut stack: Vec<(Result<usize, String>, usize)> =
            if self.nodes.is_empty() { vec![] } else { vec![(Ok(0), 0)] };
        while let Some((item, depth)) = stack.pop() {
            let pad = "  ".repeat(depth);
            let id = match item {
                Ok(id) => id,
                Err(m) => {
                    let _ = writeln!(out, "{pad}{m}");
                    continue;
                }
            };
            let node = &self.nodes[id];
            let _ = write!(out, "{pad}{}({})", node.label, node.formula);
            if let Some(r) = &node.rule {
                let _ = write!(out, "    [{r}]");
            }
            out.push('\n');
            let status = leaves.get(&id);
            let jumped = !node.children.is_empty() && status.is_some();
            if let (Some(st), false) = (status, jumped) {
                let _ = writeln!(out, "{pad}{}", mark(st));
            }
            let inner = if node.children.len() > 1 || jumped { depth + 1 } else { depth };
            if let (Some(st), true) = (status, jumped) {
                stack.push((Err(mark(st)), inner));
            }
            for &c in node.children.iter().rev() {
                stack.push((Ok(c), inner));
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let leaves: HashMap<usize, &BranchStatus> = self.branches.iter().map(|b| (b.leaf, &b.status)).collect();
        // Built bottom-up so deep trees need no recursion.
        let mut built: Vec<Option<serde_json::Value>> = vec![None; self.nodes.len()];
        for id in (0..self.nodes.len()).rev() {
            let node = &self.nodes[id];
            let children: Vec<serde_json::Value> =
                node.children.iter().map(|&c| built[c].take().expect("children built first")).collect();
            let mut v = json!({
                "label": node.label.to_string(),
                "formula": node.formula.to_string(),
                "rule": node.rule.as_deref(),
                "children": children,
            });
            if let Some(st) = leaves.get(&id) {
                v["branch"] = serde_json::to_value(st).expect("plain data");
            }
            built[id] = Some(v);
        }
        json!({
            "logic": self.logic.to_string(),
            "completed": self.completed,
            "stats": self.stats,
            "root": built.first_mut().and_then(Option::take),
        })
    }
}

fn describe(r: &ClosureReason) -> String {
    match r {
        ClosureReason::Conflict { formula, first, second } => format!("{first}({formula}) and {second}({formula})"),
        ClosureReason::InconsistentContradiction { formula } => format!("inconsistent label on {formula}"),
        ClosureReason::InconsistentConsistency { formula } => format!("inconsistent label on {formula}"),
        ClosureReason::FirstInconsistency { base } => format!("t_0 on {base} with inconsistent contradiction"),
        ClosureReason::TopContradiction { base } => format!("t_k on {base} with T on its contradiction"),
        ClosureReason::StepMismatch { base } => format!("consistency step of {base} mislabelled"),
        ClosureReason::Star { rule } => format!("star by {rule}"),
        ClosureReason::NoExtension { formula } => format!("no rule extension for {formula}"),
        ClosureReason::Backjump { skipped: 1 } => "the remaining alternative closes the same way".to_string(),
        ClosureReason::Backjump { skipped } => format!("the remaining {skipped} alternatives close the same way"),
    }
}

#[derive(Debug, Clone)]
pub struct ProveOptions {
    pub use_derived: bool,
    pub node_cap: usize,
    /// Stop at the first open complete branch instead of completing the tableau.
    pub stop_at_first_open: bool,
    /// Keep the tree; when off only the statistics and countermodel survive.
    pub record_tree: bool,
    /// Skip the remaining alternatives of a branching rule once one closes
    /// without depending on the formulas it introduced.
    pub backjump: bool,
}

impl Default for ProveOptions {
    fn default() -> ProveOptions {
        ProveOptions {
            use_derived: false,
            node_cap: DEFAULT_NODE_CAP,
            stop_at_first_open: false,
            record_tree: true,
            backjump: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProofResult {
    /// Every branch is closed.
    pub proved: bool,
    /// At least one branch is closed (the weaker, literal notion).
    pub literal_closed: bool,
    /// The formula at the root, premises folded in.
    pub root: Formula,
    pub tableau: Tableau,
    /// Extracted from the first open branch.
    pub countermodel: Option<Valuation>,
}

impl ProofResult {
    pub fn to_json(&self, goal: &Formula, premises: &[Formula]) -> serde_json::Value {
        let verdict = match (self.proved, premises.is_empty()) {
            (true, true) => "valid",
            (false, true) => "invalid",
            (true, false) => "entailed",
            (false, false) => "not-entailed",
        };
        json!({
            "logic": self.tableau.logic.to_string(),
            "goal": goal.to_string(),
            "premises": premises.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
            "verdict": verdict,
            "literal_closed": self.literal_closed,
            "countermodel": self.countermodel.as_ref().map(Valuation::to_json),
            "stats": self.tableau.stats,
        })
    }
}

enum Exp {
    Star(Arc<str>),
    Branches { rule: Arc<str>, derived: bool, branches: Vec<Vec<SignedFormula>> },
}

/// Branching points, by depth, that a formula on the branch rests on.
#[derive(Debug, Clone, Default)]
struct Deps(Vec<u64>);

impl Deps {
    fn contains(&self, level: usize) -> bool {
        self.0.get(level / 64).is_some_and(|w| w & (1 << (level % 64)) != 0)
    }

    fn with(&self, level: usize) -> Deps {
        let mut d = self.clone();
        if d.0.len() <= level / 64 {
            d.0.resize(level / 64 + 1, 0);
        }
        d.0[level / 64] |= 1 << (level % 64);
        d
    }

    fn union(mut self, other: &Deps) -> Deps {
        if self.0.len() < other.0.len() {
            self.0.resize(other.0.len(), 0);
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
        self
    }

    fn without(mut self, level: usize) -> Deps {
        if let Some(w) = self.0.get_mut(level / 64) {
            *w &= !(1 << (level % 64));
        }
        self
    }
}

#[derive(Clone)]
struct Pending {
    node: usize,
    formula: Formula,
    exp: Arc<Exp>,
    deps: Deps,
}

enum Insert {
    New,
    Duplicate,
    Closed(ClosureReason, Deps),
}

struct Engine {
    logic: Logic,
    opts: ProveOptions,
    nodes: Vec<TableauNode>,
    branches: Vec<BranchRecord>,
    labels: HashMap<Formula, (Label, Deps)>,
    undo: Vec<Formula>,
    derived_hits: usize,
    redundant: usize,
    backjumped: usize,
    stop: bool,
    node_count: usize,
    branch_count: usize,
    closed_count: usize,
    unfinished: bool,
    first_open: Option<HashMap<Formula, Label>>,
}

impl Engine {
    fn expansion(&self, label: Label, f: &Formula) -> Exp {
        if self.opts.use_derived {
            if let Some(d) = derived(self.logic, label, f) {
                return match d {
                    Derived::Star => Exp::Star(rule_name(label, f, true)),
                    Derived::Alts(a) => Exp::Branches {
                        rule: rule_name(label, f, true),
                        derived: true,
                        branches: multiply(a, self.logic.n()),
                    },
                };
            }
        }
        let sf = SignedFormula::new(label, f.clone());
        Exp::Branches {
            rule: rule_name(label, f, false),
            derived: false,
            branches: expand(self.logic, &sf).expect("non-atomic formulas have rules"),
        }
    }

    fn add_node(
        &mut self,
        parent: Option<usize>,
        sf: &SignedFormula,
        rule: Option<Arc<str>>,
        source: Option<usize>,
    ) -> Result<usize, TableauError> {
        if self.node_count >= self.opts.node_cap {
            return Err(TableauError::NodeCap { cap: self.opts.node_cap });
        }
        self.node_count += 1;
        if !self.opts.record_tree {
            return Ok(0);
        }
        let id = self.nodes.len();
        self.nodes.push(TableauNode {
            label: sf.label,
            formula: sf.formula.clone(),
            rule,
            source,
            parent,
            children: vec![],
        });
        if let Some(p) = parent {
            self.nodes[p].children.push(id);
        }
        Ok(id)
    }

    fn label(&self, f: &Formula) -> Option<Label> {
        self.labels.get(f).map(|(l, _)| *l)
    }

    /// Closure caused by adding `label(f)`, with the dependencies of the
    /// other formulas involved.
    fn closure(&self, label: Label, f: &Formula) -> Option<(ClosureReason, Deps)> {
        let n = self.logic.n();
        let inconsistent = label.inconsistency_index();
        if n == 1 {
            if inconsistent.is_some() {
                if f.as_contradiction().is_some() {
                    return Some((ClosureReason::InconsistentContradiction { formula: f.clone() }, Deps::default()));
                }
                if self.logic == Logic::Cila && matches!(f.kind(), Kind::Cons(_)) {
                    return Some((ClosureReason::InconsistentConsistency { formula: f.clone() }, Deps::default()));
                }
            }
            return None;
        }
        let top = Snapshot::top(n);
        if let Some(k) = inconsistent {
            let contra = Formula::and(f.clone(), Formula::neg(f.clone()));
            if let Some((lc, d)) = self.labels.get(&contra) {
                if k == 0 && lc.inconsistency_index().is_some() {
                    return Some((ClosureReason::FirstInconsistency { base: f.clone() }, d.clone()));
                }
                if k >= 1 && *lc == top {
                    return Some((ClosureReason::TopContradiction { base: f.clone() }, d.clone()));
                }
            }
            if k >= 1 {
                if let Some((ls, d)) = self.labels.get(&Formula::neg(contra)) {
                    if *ls != Snapshot::inconsistent(n, k - 1) {
                        return Some((ClosureReason::StepMismatch { base: f.clone() }, d.clone()));
                    }
                }
            }
        }
        if let Some(psi) = f.as_contradiction() {
            if let Some((l, d)) = self.labels.get(psi) {
                match l.inconsistency_index() {
                    Some(0) if inconsistent.is_some() => {
                        return Some((ClosureReason::FirstInconsistency { base: psi.clone() }, d.clone()))
                    }
                    Some(k) if k >= 1 && label == top => {
                        return Some((ClosureReason::TopContradiction { base: psi.clone() }, d.clone()))
                    }
                    _ => {}
                }
            }
        }
        if let Some(psi) = f.as_pow1() {
            if let Some((l, d)) = self.labels.get(psi) {
                if let Some(k) = l.inconsistency_index() {
                    if k >= 1 && label != Snapshot::inconsistent(n, k - 1) {
                        return Some((ClosureReason::StepMismatch { base: psi.clone() }, d.clone()));
                    }
                }
            }
        }
        None
    }

    fn insert(&mut self, sf: &SignedFormula, deps: &Deps) -> Insert {
        if let Some((old, d)) = self.labels.get(&sf.formula) {
            return if *old == sf.label {
                Insert::Duplicate
            } else {
                let reason = ClosureReason::Conflict { formula: sf.formula.clone(), first: *old, second: sf.label };
                Insert::Closed(reason, d.clone().union(deps))
            };
        }
        if let Some((r, d)) = self.closure(sf.label, &sf.formula) {
            return Insert::Closed(r, d.union(deps));
        }
        self.labels.insert(sf.formula.clone(), (sf.label, deps.clone()));
        self.undo.push(sf.formula.clone());
        Insert::New
    }

    fn holds(&self, sf: &SignedFormula) -> bool {
        self.label(&sf.formula) == Some(sf.label)
    }

    fn survives(&self, sf: &SignedFormula) -> bool {
        match self.label(&sf.formula) {
            Some(l) => l == sf.label,
            None => self.closure(sf.label, &sf.formula).is_none(),
        }
    }

    /// Next rule to apply: one that closes the branch or is already satisfied,
    /// else the one with fewest alternatives surviving insertion, earliest first.
    fn pick(&self, pending: &[Pending]) -> usize {
        let mut best = (usize::MAX, 0);
        for (i, p) in pending.iter().enumerate() {
            let Exp::Branches { branches, .. } = &*p.exp else { return i };
            let mut live = 0;
            for br in branches {
                if br.iter().all(|sf| self.holds(sf)) {
                    return i;
                }
                let clash = br.iter().enumerate().any(|(j, a)| {
                    br[..j].iter().any(|b| b.formula == a.formula && b.label != a.label)
                });
                if !clash && br.iter().all(|sf| self.survives(sf)) {
                    live += 1;
                }
            }
            if live == 0 {
                return i;
            }
            if live < best.0 {
                best = (live, i);
            }
        }
        best.1
    }

    fn undo_to(&mut self, mark: usize) {
        while self.undo.len() > mark {
            let f = self.undo.pop().unwrap();
            self.labels.remove(&f);
        }
    }

    fn finish(&mut self, leaf: usize, status: BranchStatus, pending: &[Pending]) {
        self.branch_count += 1;
        match status {
            BranchStatus::Open => {
                if self.first_open.is_none() {
                    self.first_open = Some(self.labels.iter().map(|(f, (l, _))| (f.clone(), *l)).collect());
                }
                self.stop |= self.opts.stop_at_first_open;
            }
            BranchStatus::Closed { .. } => self.closed_count += 1,
            BranchStatus::Unfinished => self.unfinished = true,
        }
        if self.opts.record_tree {
            self.branches.push(BranchRecord { leaf, status, pending: pending.iter().map(|p| p.node).collect() });
        }
    }

    /// Adds `sf` below `leaf`; returns the new leaf and the closure it caused, if any.
    fn extend(
        &mut self,
        leaf: usize,
        sf: &SignedFormula,
        rule: &Arc<str>,
        source: usize,
        deps: &Deps,
        pending: &mut Vec<Pending>,
    ) -> Result<(usize, Option<(ClosureReason, Deps)>), TableauError> {
        let id = self.add_node(Some(leaf), sf, Some(rule.clone()), Some(source))?;
        match self.insert(sf, deps) {
            Insert::Closed(r, d) => return Ok((id, Some((r, d)))),
            Insert::New if !sf.formula.is_atom() => pending.push(Pending {
                node: id,
                formula: sf.formula.clone(),
                exp: Arc::new(self.expansion(sf.label, &sf.formula)),
                deps: deps.clone(),
            }),
            _ => {}
        }
        Ok((id, None))
    }

    fn close(&mut self, leaf: usize, reason: ClosureReason, deps: Deps, pending: &[Pending]) -> Option<Deps> {
        self.finish(leaf, BranchStatus::Closed { reason }, pending);
        Some(deps)
    }

    /// Expands the branch ending at `leaf`, which sits below `depth` branching
    /// points. Returns the dependencies of the closure when every branch below
    /// closed.
    fn run(&mut self, mut leaf: usize, mut pending: Vec<Pending>, depth: usize) -> Result<Option<Deps>, TableauError> {
        loop {
            if self.stop {
                self.finish(leaf, BranchStatus::Unfinished, &pending);
                return Ok(None);
            }
            if pending.is_empty() {
                self.finish(leaf, BranchStatus::Open, &pending);
                return Ok(None);
            }
            let item = pending.remove(self.pick(&pending));
            let (rule, derived, branches) = match &*item.exp {
                Exp::Star(rule) => {
                    self.derived_hits += 1;
                    let reason = ClosureReason::Star { rule: rule.to_string() };
                    return Ok(self.close(leaf, reason, item.deps, &pending));
                }
                Exp::Branches { rule, derived, branches } => (rule, *derived, branches),
            };
            if derived {
                self.derived_hits += 1;
            }
            match branches.len() {
                0 => {
                    let reason = ClosureReason::NoExtension { formula: item.formula.clone() };
                    return Ok(self.close(leaf, reason, item.deps, &pending));
                }
                1 => {
                    for sf in &branches[0] {
                        let (id, closed) = self.extend(leaf, sf, rule, item.node, &item.deps, &mut pending)?;
                        leaf = id;
                        if let Some((reason, deps)) = closed {
                            return Ok(self.close(leaf, reason, deps, &pending));
                        }
                    }
                }
                _ if branches.iter().any(|br| br.iter().all(|sf| self.holds(sf))) => {
                    // One alternative already holds on this branch.
                    self.redundant += 1;
                }
                _ => {
                    let level = depth;
                    let deps = item.deps.with(level);
                    let mark = self.undo.len();
                    let mut all_closed = Some(Deps::default());
                    for (i, br) in branches.iter().enumerate() {
                        if self.stop {
                            break;
                        }
                        let mut pend = pending.clone();
                        let mut cur = leaf;
                        let mut closed = None;
                        for sf in br {
                            let (id, c) = self.extend(cur, sf, rule, item.node, &deps, &mut pend)?;
                            cur = id;
                            if c.is_some() {
                                closed = c;
                                break;
                            }
                        }
                        let outcome = match closed {
                            Some((reason, d)) => self.close(cur, reason, d, &pend),
                            None => self.run(cur, pend, depth + 1)?,
                        };
                        self.undo_to(mark);
                        match outcome {
                            Some(d) if self.opts.backjump && !d.contains(level) => {
                                let skipped = branches.len() - i - 1;
                                if skipped > 0 {
                                    self.backjumped += skipped;
                                    let reason = ClosureReason::Backjump { skipped };
                                    self.finish(leaf, BranchStatus::Closed { reason }, &pending);
                                }
                                return Ok(Some(d));
                            }
                            Some(d) => all_closed = all_closed.map(|acc| acc.union(&d.without(level))),
                            None => all_closed = None,
                        }
                    }
                    return Ok(all_closed.filter(|_| !self.stop));
                }
            }
        }
    }
}

/// `γ1 → (γ2 → ... → (γk → φ))`.
pub fn fold_premises(goal: &Formula, premises: &[Formula]) -> Formula {
    premises.iter().rev().fold(goal.clone(), |acc, p| Formula::imp(p.clone(), acc))
}

pub fn prove(logic: Logic, goal: &Formula, premises: &[Formula], use_derived: bool) -> Result<ProofResult, TableauError> {
    prove_with(logic, goal, premises, &ProveOptions { use_derived, ..ProveOptions::default() })
}

/// Builds the tableau rooted at `F(γ1 → ... → φ)`.
pub fn prove_with(
    logic: Logic,
    goal: &Formula,
    premises: &[Formula],
    opts: &ProveOptions,
) -> Result<ProofResult, TableauError> {
    let start = Instant::now();
    let root = fold_premises(goal, premises);
    if !logic.has_consistency() && root.uses_consistency() {
        let formula = root.subformulas().into_iter().find(|f| matches!(f.kind(), Kind::Cons(_))).unwrap();
        return Err(TableauError::Signature { formula, logic });
    }
    let mut e = Engine {
        logic,
        opts: opts.clone(),
        nodes: vec![],
        branches: vec![],
        labels: HashMap::new(),
        undo: vec![],
        derived_hits: 0,
        redundant: 0,
        backjumped: 0,
        stop: false,
        node_count: 0,
        branch_count: 0,
        closed_count: 0,
        unfinished: false,
        first_open: None,
    };
    let root_sf = SignedFormula::new(Snapshot::bottom(logic.n()), root.clone());
    let id = e.add_node(None, &root_sf, None, None)?;
    e.insert(&root_sf, &Deps::default());
    let mut pending = vec![];
    if !root.is_atom() {
        let exp = Arc::new(e.expansion(root_sf.label, &root));
        pending.push(Pending { node: id, formula: root.clone(), exp, deps: Deps::default() });
    }
    e.run(id, pending, 0)?;

    let closures = e.closed_count;
    let stats = TableauStats {
        nodes: e.node_count,
        branches: e.branch_count,
        closures,
        derived_rule_hits: e.derived_hits,
        redundant_skips: e.redundant,
        backjumped: e.backjumped,
        elapsed: start.elapsed(),
    };
    let proved = closures == stats.branches;
    let countermodel = match &e.first_open {
        Some(nu0) => Some(complete(logic, nu0).map_err(TableauError::Extraction)?),
        None => None,
    };
    let tableau = Tableau { logic, nodes: e.nodes, branches: e.branches, stats, completed: !e.unfinished };
    Ok(ProofResult { proved, literal_closed: closures > 0, root, tableau, countermodel })
}

/// Reads `ν0(φ) = L` off an open complete branch and extends it to a
/// restricted valuation.
pub fn extract_countermodel(branch: &Branch, logic: Logic) -> Result<Valuation, TableauError> {
    if branch.status != BranchStatus::Open {
        return Err(TableauError::BranchNotOpen);
    }
    let mut nu0 = HashMap::new();
    for sf in &branch.formulas {
        if nu0.insert(sf.formula.clone(), sf.label).is_some_and(|old| old != sf.label) {
            return Err(TableauError::BranchNotOpen);
        }
    }
    complete(logic, &nu0).map_err(TableauError::Extraction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_unchecked as parse;
    use crate::formula::powseq;

    fn sf(label: Label, s: &str) -> SignedFormula {
        SignedFormula::new(label, parse(s).unwrap())
    }

    fn show(bs: &[Vec<SignedFormula>]) -> Vec<Vec<String>> {
        bs.iter().map(|b| b.iter().map(|x| x.to_string()).collect()).collect()
    }

    #[test]
    fn basic_rule_examples() {
        let (t, f) = (Snapshot::top(1), Snapshot::bottom(1));
        assert_eq!(show(&expand(Logic::Cn(1), &sf(t, "~p")).unwrap()), [["F(p)"], ["t(p)"]]);
        assert_eq!(
            show(&expand(Logic::Cn(1), &sf(f, "p -> q")).unwrap()),
            [["T(p)", "F(q)"], ["t(p)", "F(q)"]]
        );
        let i = Snapshot::inconsistent(1, 0);
        assert_eq!(show(&expand(Logic::MbCcl, &sf(i, "@p")).unwrap()), [["T(p)"], ["F(p)"]]);
        let n = 3;
        let bs = expand(Logic::Cn(n), &sf(Snapshot::inconsistent(n, 1), "p | q")).unwrap();
        assert_eq!(bs.len(), 2 * n as usize);
        assert!(matches!(expand(Logic::Cn(1), &sf(t, "p")), Err(TableauError::NoRule(_))));
    }

    #[test]
    fn rules_match_tables() {
        use crate::algebra::{snapshots, Multialgebra};
        use crate::formula::Connective;
        let (a, b) = (parse("a").unwrap(), parse("b").unwrap());
        let logics = [Logic::Cn(1), Logic::Cn(2), Logic::Cn(3), Logic::Cn(4), Logic::MbCcl, Logic::Cila];
        for logic in logics {
            let alg = Multialgebra::for_logic(logic);
            let n = logic.n();
            for conn in [Connective::Neg, Connective::Cons, Connective::And, Connective::Or, Connective::Imp] {
                if conn == Connective::Cons && !logic.has_consistency() {
                    continue;
                }
                let f = if conn.arity() == 1 { Formula::unary(conn, a.clone()) } else { Formula::binary(conn, a.clone(), b.clone()) };
                for label in snapshots(n) {
                    let mut want = std::collections::BTreeSet::new();
                    let mut got = std::collections::BTreeSet::new();
                    for x in snapshots(n) {
                        for y in snapshots(n) {
                            let args: Vec<Snapshot> = if conn.arity() == 1 { vec![x] } else { vec![x, y] };
                            if alg.cell(conn, &args).unwrap().contains(label) {
                                want.insert((x.index(), if conn.arity() == 1 { 0 } else { y.index() }));
                            }
                        }
                    }
                    for br in expand(logic, &SignedFormula::new(label, f.clone())).unwrap() {
                        let fixed: HashMap<&Formula, Snapshot> = br.iter().map(|s| (&s.formula, s.label)).collect();
                        for x in snapshots(n) {
                            for y in snapshots(n) {
                                let ok_x = fixed.get(&a).map_or(true, |&v| v == x);
                                let ok_y = conn.arity() == 1 || fixed.get(&b).map_or(true, |&v| v == y);
                                if ok_x && ok_y {
                                    got.insert((x.index(), if conn.arity() == 1 { 0 } else { y.index() }));
                                }
                            }
                        }
                    }
                    assert_eq!(got, want, "{logic} {label}({f})");
                }
            }
        }
    }

    #[test]
    fn derived_rule_examples() {
        let i = Snapshot::inconsistent(1, 0);
        assert_eq!(expand_derived(Logic::Cn(1), &sf(i, "~(p & ~p)")), Some(DerivedExpansion::Star));
        let n = 4;
        let got = expand_derived(Logic::Cn(n), &sf(Snapshot::inconsistent(n, 1), "p^2")).unwrap();
        assert_eq!(got, DerivedExpansion::Branches(vec![vec![sf(Snapshot::inconsistent(n, 3), "p")]]));
        let got = expand_derived(Logic::Cn(n), &sf(Snapshot::top(n), "p^4 & ~p^4"));
        assert_eq!(got, Some(DerivedExpansion::Star));
        assert_eq!(expand_derived(Logic::MbCcl, &sf(i, "~(p & ~p)")), None);
        assert_eq!(expand_derived(Logic::Cn(2), &sf(Snapshot::top(2), "p -> q")), None);
    }

    /// Every restricted valuation giving a derived-rule premise its label
    /// satisfies one of the rule's branches.
    #[test]
    fn derived_rules_are_sound() {
        use crate::algebra::snapshots;
        use crate::formula::pow;
        use crate::truthtable::build_table;
        let (p, q) = (parse("p").unwrap(), parse("q").unwrap());
        for logic in [Logic::Cn(1), Logic::Cn(2), Logic::Cn(3), Logic::Cn(4), Logic::Cila] {
            let n = logic.n();
            let mut shapes = vec![Formula::and(pow(&p, 1), pow(&q, 1))];
            for k in 0..=n + 2 {
                let a = pow(&p, k);
                shapes.push(Formula::and(a.clone(), Formula::neg(a.clone())));
                if k >= 1 {
                    shapes.push(Formula::neg(a.clone()));
                    shapes.push(a);
                    shapes.push(powseq(&p, k));
                }
            }
            for f in shapes {
                let t = build_table(logic, &f, &[]).unwrap();
                let col = |g: &Formula| t.columns.iter().position(|c| c == g).unwrap();
                for label in snapshots(n) {
                    let Some(exp) = expand_derived(logic, &SignedFormula::new(label, f.clone())) else { continue };
                    let branches = match exp {
                        DerivedExpansion::Star => vec![],
                        DerivedExpansion::Branches(b) => b,
                    };
                    for row in t.live_rows().filter(|r| r.values[col(&f)] == label) {
                        let holds = branches.iter().any(|br| br.iter().all(|sf| row.values[col(&sf.formula)] == sf.label));
                        assert!(holds, "{logic} {label}({f}) misses row {:?}", row.values);
                    }
                }
            }
        }
    }

    #[test]
    fn proofs() {
        let psi = parse("((p & ~p) & ~(p & ~p)) -> ~~p").unwrap();
        for derived in [false, true] {
            let r = prove(Logic::Cn(1), &psi, &[], derived).unwrap();
            assert!(r.proved && r.literal_closed && r.countermodel.is_none());
        }
        let p = parse("p").unwrap();
        let r = prove(Logic::Cn(1), &p, &[], false).unwrap();
        assert!(!r.proved);
        assert_eq!(r.countermodel.unwrap().value(&p), Snapshot::bottom(1));
        for n in 1..=4 {
            assert!(prove(Logic::Cn(n), &parse("p | ~p").unwrap(), &[], false).unwrap().proved);
        }
    }

    #[test]
    fn literal_closure_differs_from_refutation() {
        // Invalid, yet one branch of its tableau closes.
        let f = parse("p -> (~p -> q)").unwrap();
        let r = prove(Logic::Cn(1), &f, &[], false).unwrap();
        assert!(!r.proved);
        assert!(r.literal_closed);
    }

    #[test]
    fn countermodel_read_off() {
        let (t, f) = (Snapshot::top(1), Snapshot::bottom(1));
        let b = Branch {
            formulas: vec![sf(f, "p -> q"), sf(t, "p"), sf(f, "q")],
            status: BranchStatus::Open,
        };
        let v = extract_countermodel(&b, Logic::Cn(1)).unwrap();
        assert_eq!(v.value(&parse("p -> q").unwrap()), f);
        assert_eq!(v.value(&parse("p").unwrap()), t);

        let i = Snapshot::inconsistent(1, 0);
        let b = Branch { formulas: vec![sf(i, "~p"), sf(i, "p")], status: BranchStatus::Open };
        let v = extract_countermodel(&b, Logic::Cn(1)).unwrap();
        assert_eq!(v.value(&parse("p & ~p").unwrap()), t);

        let closed = Branch { formulas: vec![], status: BranchStatus::Unfinished };
        assert_eq!(extract_countermodel(&closed, Logic::Cn(1)).unwrap_err(), TableauError::BranchNotOpen);
    }

    #[test]
    fn premises_fold_right() {
        let g = fold_premises(&parse("q").unwrap(), &[parse("p").unwrap(), parse("~p").unwrap()]);
        assert_eq!(g.to_string(), "p -> ~p -> q");
        let r = prove(Logic::Cn(2), &parse("q").unwrap(), &[parse("p").unwrap(), parse("~p").unwrap(), parse("p^(2)").unwrap()], true).unwrap();
        assert!(r.proved);
    }

    #[test]
    fn dumps() {
        let r = prove(Logic::Cn(1), &parse("p -> (~p -> q)").unwrap(), &[], false).unwrap();
        let text = r.tableau.render();
        assert!(text.starts_with("F(p -> ~p -> q)"));
        assert!(text.contains("x closed") && text.contains("o open"));
        let j = r.tableau.to_json();
        assert_eq!(j["root"]["label"], "F");
        assert!(j["root"]["children"].is_array());
    }

    #[test]
    fn node_cap() {
        let opts = ProveOptions { node_cap: 3, ..ProveOptions::default() };
        let err = prove_with(Logic::Cn(3), &parse("(p | q) -> (q | p)").unwrap(), &[], &opts).unwrap_err();
        assert_eq!(err, TableauError::NodeCap { cap: 3 });
    }

    #[test]
    fn early_stop() {
        let opts = ProveOptions { stop_at_first_open: true, ..ProveOptions::default() };
        let r = prove_with(Logic::Cn(2), &parse("p -> q").unwrap(), &[], &opts).unwrap();
        assert!(!r.proved && r.countermodel.is_some());
    }

    #[test]
    fn backjumping_keeps_verdicts() {
        use crate::gen::{atoms, enumerate};
        let pq = atoms(&["p", "q"]);
        let on = ProveOptions { record_tree: false, ..ProveOptions::default() };
        let off = ProveOptions { backjump: false, ..on.clone() };
        let mut skipped = 0;
        for logic in [Logic::Cn(2), Logic::Cila] {
            for f in enumerate(logic, &pq, 2) {
                let (a, b) = (prove_with(logic, &f, &[], &on).unwrap(), prove_with(logic, &f, &[], &off).unwrap());
                assert_eq!(a.proved, b.proved, "{logic} {f}");
                assert!(a.tableau.stats.nodes <= b.tableau.stats.nodes);
                skipped += a.tableau.stats.backjumped;
            }
        }
        assert_eq!(skipped, 0);
        // T(p & p) closes the first alternative of T(|) without using it.
        let r = prove_with(Logic::Cn(2), &parse("p & p | (q -> q | q)").unwrap(), &[], &ProveOptions::default()).unwrap();
        assert!(r.proved && r.tableau.stats.backjumped > 0);
        assert!(r.tableau.render().contains("x closed: the remaining alternative closes the same way"));
    }

    #[test]
    fn lookahead_sees_clashes_inside_an_alternative() {
        // every alternative of F(p -> p) carries F(p) next to a non-F label
        let f = parse("p^3 & ~p^3 | (p -> p)").unwrap();
        for use_derived in [false, true] {
            let opts = ProveOptions { use_derived, ..ProveOptions::default() };
            let r = prove_with(Logic::Cn(4), &f, &[], &opts).unwrap();
            assert!(r.proved);
            assert_eq!(r.tableau.stats.nodes, 13);
        }
    }

    #[test]
    fn strong_consistency_rule() {
        let n = 3;
        let f = powseq(&parse("p").unwrap(), 4);
        let got = expand_derived(Logic::Cn(n), &SignedFormula::new(Snapshot::top(n), f.clone())).unwrap();
        assert_eq!(
            got,
            DerivedExpansion::Branches(vec![vec![sf(Snapshot::top(n), "p")], vec![sf(Snapshot::bottom(n), "p")]])
        );
        let t1 = SignedFormula::new(Snapshot::inconsistent(n, 1), f);
        assert_eq!(expand_derived(Logic::Cn(n), &t1), Some(DerivedExpansion::Star));
        let short = powseq(&parse("p").unwrap(), 2);
        assert_eq!(expand_derived(Logic::Cn(n), &SignedFormula::new(Snapshot::top(n), short)), None);
    }
}
