//! Row-branching truth tables: enumerate the restricted partial valuations over
//! the ordered subformulas of a goal and its premises, and decide entailment.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::algebra::{Multialgebra, Snapshot, ValueSet};
use crate::formula::{ordered_subformulas, Connective, Formula, Kind, Logic};
use crate::valuation::Valuation;

pub use crate::valuation::{complete, extend_partial, ExtensionError, Violation};

pub const DEFAULT_ROW_CAP: usize = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("row cap of {cap} exceeded")]
    RowCap { cap: usize },
    #[error("{formula} uses the consistency connective, which {logic} lacks")]
    Signature { formula: Formula, logic: Logic },
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Atom,
    Unary(Connective, usize),
    Binary(Connective, usize, usize),
}

#[derive(Debug, Clone, Copy)]
enum Restrict {
    Free,
    Contradiction(usize),
    Step(usize),
}

/// Columns compiled to index form. Every column's subformulas precede it.
#[derive(Debug, Clone)]
pub(crate) struct Plan {
    alg: Arc<Multialgebra>,
    columns: Vec<Formula>,
    ops: Vec<Op>,
    restrict: Vec<Restrict>,
}

impl Plan {
    /// Fails with the offending formula when `∘` is outside the signature.
    pub(crate) fn new(logic: Logic, columns: Vec<Formula>) -> Result<Plan, Formula> {
        let alg = Arc::new(Multialgebra::for_logic(logic));
        let pos: HashMap<&Formula, usize> = columns.iter().enumerate().map(|(i, f)| (f, i)).collect();
        let mut ops = Vec::with_capacity(columns.len());
        let mut restrict = Vec::with_capacity(columns.len());
        for f in &columns {
            let op = match f.kind() {
                Kind::Var(_) => Op::Atom,
                Kind::Cons(_) if !alg.has_consistency() => return Err(f.clone()),
                Kind::Neg(a) | Kind::Cons(a) => Op::Unary(f.connective().unwrap(), pos[a]),
                Kind::And(a, b) | Kind::Or(a, b) | Kind::Imp(a, b) => {
                    Op::Binary(f.connective().unwrap(), pos[a], pos[b])
                }
            };
            ops.push(op);
            restrict.push(if let Some(base) = f.as_contradiction() {
                Restrict::Contradiction(pos[base])
            } else if let Some(base) = f.as_pow1() {
                Restrict::Step(pos[base])
            } else {
                Restrict::Free
            });
        }
        Ok(Plan { alg, columns, ops, restrict })
    }

    pub(crate) fn columns(&self) -> &[Formula] {
        &self.columns
    }

    pub(crate) fn algebra(&self) -> &Multialgebra {
        &self.alg
    }

    pub(crate) fn algebra_arc(&self) -> Arc<Multialgebra> {
        self.alg.clone()
    }

    fn n(&self) -> u32 {
        self.alg.n()
    }

    /// Unrestricted cell and restriction mask for column `c`.
    #[inline]
    fn cell(&self, c: usize, vals: &[u8]) -> (ValueSet, ValueSet) {
        let cell = match self.ops[c] {
            Op::Atom => self.alg.all(),
            Op::Unary(conn, a) => self.alg.unary_cell(conn, vals[a] as usize),
            Op::Binary(conn, a, b) => self.alg.binary_cell(conn, vals[a] as usize, vals[b] as usize),
        };
        let mask = match self.restrict[c] {
            Restrict::Free => self.alg.all(),
            Restrict::Contradiction(base) => self.alg.contradiction_allowed(vals[base] as usize),
            Restrict::Step(base) => self.alg.step_allowed(vals[base] as usize),
        };
        (cell, mask)
    }

    /// Over-approximation of the values each column can still take once the
    /// first `depth` columns are fixed.
    fn possible(&self, depth: usize, vals: &[u8], out: &mut Vec<ValueSet>) {
        out.clear();
        out.extend(vals[..depth].iter().map(|&v| ValueSet(1 << v)));
        for c in depth..self.columns.len() {
            let mut s = match self.ops[c] {
                Op::Atom => self.alg.all(),
                Op::Unary(conn, a) => self.alg.image(conn, &[out[a]]),
                Op::Binary(conn, a, b) => self.alg.image(conn, &[out[a], out[b]]),
            };
            let mask = match self.restrict[c] {
                Restrict::Free => None,
                Restrict::Contradiction(base) => Some(
                    out[base]
                        .indices()
                        .fold(ValueSet::EMPTY, |m, i| m.union(self.alg.contradiction_allowed(i))),
                ),
                Restrict::Step(base) => {
                    Some(out[base].indices().fold(ValueSet::EMPTY, |m, i| m.union(self.alg.step_allowed(i))))
                }
            };
            if let Some(m) = mask {
                s = s.intersect(m);
            }
            out.push(s);
        }
    }

    /// First live row (as value indices) compatible with the per-column pins.
    pub(crate) fn first_row(&self, pins: &[ValueSet]) -> Option<Vec<u8>> {
        let mut found = None;
        let mut s = Search::new(self, usize::MAX);
        s.pins = Some(pins);
        s.run(&mut |ev| {
            if let Event::Live(vals) = ev {
                found = Some(vals.to_vec());
                return Flow::Stop;
            }
            Flow::Go
        });
        found
    }
}

enum Event<'a> {
    Live(&'a [u8]),
    Discarded(&'a [u8]),
}

#[derive(PartialEq, Eq)]
enum Flow {
    Go,
    Stop,
}

struct Target {
    goal: usize,
    premises: Vec<usize>,
}

struct Search<'a> {
    plan: &'a Plan,
    pins: Option<&'a [ValueSet]>,
    target: Option<Target>,
    keep_discarded: bool,
    cap: usize,
    vals: Vec<u8>,
    scratch: Vec<ValueSet>,
    rows: usize,
    discarded: usize,
    pruned: usize,
    stopped: bool,
    cap_hit: bool,
}

impl<'a> Search<'a> {
    fn new(plan: &'a Plan, cap: usize) -> Search<'a> {
        Search {
            plan,
            pins: None,
            target: None,
            keep_discarded: false,
            cap,
            vals: Vec::with_capacity(plan.columns.len()),
            scratch: Vec::new(),
            rows: 0,
            discarded: 0,
            pruned: 0,
            stopped: false,
            cap_hit: false,
        }
    }

    fn run(&mut self, visit: &mut dyn FnMut(Event) -> Flow) {
        self.go(visit);
    }

    fn dead_end(&mut self) -> bool {
        let Some(t) = &self.target else { return false };
        let depth = self.vals.len();
        self.plan.possible(depth, &self.vals, &mut self.scratch);
        let n = self.plan.n();
        let designated = ValueSet::designated(n);
        let can_fail = !self.scratch[t.goal].intersect(ValueSet::undesignated(n)).is_empty();
        !can_fail || t.premises.iter().any(|&p| self.scratch[p].intersect(designated).is_empty())
    }

    fn go(&mut self, visit: &mut dyn FnMut(Event) -> Flow) {
        let depth = self.vals.len();
        if depth == self.plan.columns.len() {
            self.rows += 1;
            if self.rows > self.cap {
                self.cap_hit = true;
                self.stopped = true;
                return;
            }
            if visit(Event::Live(&self.vals)) == Flow::Stop {
                self.stopped = true;
            }
            return;
        }
        if self.dead_end() {
            self.pruned += 1;
            return;
        }
        let (cell, mask) = self.plan.cell(depth, &self.vals);
        let pin = self.pins.map_or(self.plan.alg.all(), |p| p[depth]);
        for i in cell.intersect(pin).indices() {
            self.vals.push(i as u8);
            if mask.contains_index(i) {
                self.go(visit);
            } else {
                self.discarded += 1;
                if self.keep_discarded && visit(Event::Discarded(&self.vals)) == Flow::Stop {
                    self.stopped = true;
                }
            }
            self.vals.pop();
            if self.stopped {
                return;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum RowStatus {
    Live,
    /// Cut at `column` by a restriction clause; the row holds values up to it.
    Discarded { column: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    pub values: Vec<Snapshot>,
    pub status: RowStatus,
}

impl Row {
    pub fn is_live(&self) -> bool {
        self.status == RowStatus::Live
    }
}

#[derive(Debug, Clone)]
pub struct TruthTable {
    pub logic: Logic,
    pub columns: Vec<Formula>,
    pub rows: Vec<Row>,
    pub goal: usize,
    pub premises: Vec<usize>,
}

impl TruthTable {
    pub fn live_rows(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.is_live())
    }

    pub fn column(&self, f: &Formula) -> Option<usize> {
        self.columns.iter().position(|c| c == f)
    }

    /// The total valuation extending a live row.
    pub fn row_valuation(&self, row: &Row) -> Valuation {
        assert!(row.is_live(), "discarded rows do not extend");
        let alg = Arc::new(Multialgebra::for_logic(self.logic));
        Valuation::from_parts(alg, self.columns.clone(), row.values.clone())
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "logic": self.logic.to_string(),
            "columns": self.columns.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
            "goal": self.goal,
            "premises": self.premises,
            "rows": self.rows,
        })
    }
}

#[derive(Debug, Clone)]
pub struct TableOptions {
    pub row_cap: usize,
    /// Keep rows cut by restriction clauses, for display.
    pub keep_discarded: bool,
}

impl Default for TableOptions {
    fn default() -> TableOptions {
        TableOptions { row_cap: DEFAULT_ROW_CAP, keep_discarded: false }
    }
}

fn compile(logic: Logic, goal: &Formula, premises: &[Formula]) -> Result<(Plan, Target), TableError> {
    let columns = ordered_subformulas(goal, premises);
    let plan = Plan::new(logic, columns).map_err(|formula| TableError::Signature { formula, logic })?;
    let idx = |f: &Formula| plan.columns.iter().position(|c| c == f).expect("column present");
    let target = Target { goal: idx(goal), premises: premises.iter().map(idx).collect() };
    Ok((plan, target))
}

pub fn build_table(logic: Logic, goal: &Formula, premises: &[Formula]) -> Result<TruthTable, TableError> {
    build_table_with(logic, goal, premises, &TableOptions::default())
}

pub fn build_table_with(
    logic: Logic,
    goal: &Formula,
    premises: &[Formula],
    opts: &TableOptions,
) -> Result<TruthTable, TableError> {
    let (plan, target) = compile(logic, goal, premises)?;
    let n = logic.n();
    let to_values = |v: &[u8]| v.iter().map(|&i| Snapshot::from_index(n, i as usize)).collect::<Vec<_>>();
    let mut rows = Vec::new();
    let mut s = Search::new(&plan, opts.row_cap);
    s.keep_discarded = opts.keep_discarded;
    s.run(&mut |ev| {
        match ev {
            Event::Live(v) => rows.push(Row { values: to_values(v), status: RowStatus::Live }),
            Event::Discarded(v) => {
                rows.push(Row { values: to_values(v), status: RowStatus::Discarded { column: v.len() - 1 } })
            }
        }
        Flow::Go
    });
    if s.cap_hit {
        return Err(TableError::RowCap { cap: opts.row_cap });
    }
    Ok(TruthTable { logic, columns: plan.columns.clone(), rows, goal: target.goal, premises: target.premises })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Valid,
    Invalid,
}

impl Verdict {
    pub fn is_valid(self) -> bool {
        self == Verdict::Valid
    }

    /// `valid`/`invalid`, or `entailed`/`not-entailed` when there are premises.
    pub fn label(self, with_premises: bool) -> &'static str {
        match (self, with_premises) {
            (Verdict::Valid, false) => "valid",
            (Verdict::Invalid, false) => "invalid",
            (Verdict::Valid, true) => "entailed",
            (Verdict::Invalid, true) => "not-entailed",
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct TableStats {
    /// Complete live rows visited.
    pub rows_total: usize,
    /// Branches cut by a restriction clause.
    pub rows_discarded: usize,
    /// Subtrees skipped because no completion can refute the goal.
    pub subtrees_pruned: usize,
    #[serde(serialize_with = "millis")]
    pub elapsed: Duration,
}

pub(crate) fn millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1000.0)
}

#[derive(Debug, Clone)]
pub struct DecisionResult {
    pub logic: Logic,
    pub goal: Formula,
    pub premises: Vec<Formula>,
    pub verdict: Verdict,
    /// Present iff invalid: the goal is undesignated, every premise designated.
    pub countermodel: Option<Valuation>,
    pub stats: TableStats,
}

impl DecisionResult {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "logic": self.logic.to_string(),
            "goal": self.goal.to_string(),
            "premises": self.premises.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
            "verdict": self.verdict.label(!self.premises.is_empty()),
            "countermodel": self.countermodel.as_ref().map(Valuation::to_json),
            "stats": self.stats,
        })
    }
}

pub fn decide(logic: Logic, goal: &Formula, premises: &[Formula]) -> Result<DecisionResult, TableError> {
    decide_with(logic, goal, premises, &TableOptions::default())
}

/// Searches depth-first for a row designating every premise and not the goal,
/// skipping subtrees where that is impossible.
pub fn decide_with(
    logic: Logic,
    goal: &Formula,
    premises: &[Formula],
    opts: &TableOptions,
) -> Result<DecisionResult, TableError> {
    let start = Instant::now();
    let (plan, target) = compile(logic, goal, premises)?;
    let (g, ps) = (target.goal, target.premises.clone());
    let n = logic.n();
    let mut found = None;
    let mut s = Search::new(&plan, opts.row_cap);
    s.target = Some(target);
    s.run(&mut |ev| {
        if let Event::Live(v) = ev {
            let undesignated = n as usize + 1;
            if v[g] as usize == undesignated && ps.iter().all(|&p| v[p] as usize != undesignated) {
                found = Some(v.to_vec());
                return Flow::Stop;
            }
        }
        Flow::Go
    });
    if s.cap_hit {
        return Err(TableError::RowCap { cap: opts.row_cap });
    }
    let stats = TableStats {
        rows_total: s.rows,
        rows_discarded: s.discarded,
        subtrees_pruned: s.pruned,
        elapsed: start.elapsed(),
    };
    let countermodel = found.map(|v| {
        let values = v.iter().map(|&i| Snapshot::from_index(n, i as usize)).collect();
        Valuation::from_parts(plan.algebra_arc(), plan.columns.clone(), values)
    });
    Ok(DecisionResult {
        logic,
        goal: goal.clone(),
        premises: premises.to_vec(),
        verdict: if countermodel.is_some() { Verdict::Invalid } else { Verdict::Valid },
        countermodel,
        stats,
    })
}

/// Aligned text table. Discarded rows show the cut value in brackets.
pub fn render_table(t: &TruthTable, show_discarded: bool) -> String {
    let headers: Vec<String> = t.columns.iter().map(|f| f.to_string()).collect();
    let rows: Vec<&Row> = t.rows.iter().filter(|r| show_discarded || r.is_live()).collect();
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut c: Vec<String> = r.values.iter().map(|v| v.to_string()).collect();
            if let RowStatus::Discarded { column } = r.status {
                c[column] = format!("[{}]", c[column]);
                c.resize(headers.len(), String::new());
                if column + 1 < headers.len() {
                    c[column + 1] = "discarded".into();
                }
            }
            c
        })
        .collect();
    let widths: Vec<usize> = (0..headers.len())
        .map(|i| cells.iter().map(|r| r[i].chars().count()).chain([headers[i].chars().count()]).max().unwrap())
        .collect();
    let line = |items: &[String]| -> String {
        let mut s = String::new();
        for (i, item) in items.iter().enumerate() {
            if i > 0 {
                s.push_str(" | ");
            }
            let _ = write!(s, "{item:<w$}", w = widths[i]);
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(&headers);
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&line(&rule).replace(" | ", "-+-"));
    for r in &cells {
        out.push_str(&line(r));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_unchecked as parse, powseq};

    fn names(t: &TruthTable, col: usize) -> Vec<String> {
        t.live_rows().map(|r| r.values[col].to_string()).collect()
    }

    #[test]
    fn example_table_six_rows() {
        let psi = parse("((p & ~p) & ~(p & ~p)) -> ~~p").unwrap();
        let t = build_table(Logic::Cn(1), &psi, &[]).unwrap();
        assert_eq!(t.columns.len(), 7);
        assert_eq!(t.rows.len(), 6);
        assert_eq!(names(&t, 6), ["T", "T", "T", "T", "t", "T"]);
        assert!(names(&t, 5).iter().all(|v| v == "F"));
    }

    #[test]
    fn contradiction_column() {
        let t = build_table(Logic::Cn(1), &parse("p & ~p").unwrap(), &[]).unwrap();
        let rows: Vec<Vec<String>> =
            t.live_rows().map(|r| r.values.iter().map(|v| v.to_string()).collect()).collect();
        assert_eq!(rows, [["T", "F", "F"], ["t", "T", "T"], ["t", "t", "T"], ["F", "T", "F"]]);
    }

    #[test]
    fn discarded_rows_are_kept_on_request() {
        let opts = TableOptions { keep_discarded: true, ..TableOptions::default() };
        let t = build_table_with(Logic::Cn(1), &parse("p & ~p").unwrap(), &[], &opts).unwrap();
        // p = t, ¬p ∈ {T, t}: the t-valued conjunction is cut each time.
        assert_eq!(t.rows.iter().filter(|r| !r.is_live()).count(), 2);
        let text = render_table(&t, true);
        assert!(text.contains("[t]"));
        assert_eq!(render_table(&t, false).lines().count(), 2 + 4);
    }

    #[test]
    fn consistency_step_forcing_in_c2() {
        let p1 = parse("p^1").unwrap();
        let t = build_table(Logic::Cn(2), &p1, &[]).unwrap();
        let c = t.column(&parse("p & ~p").unwrap()).unwrap();
        for r in t.live_rows() {
            if r.values[0] == Snapshot::inconsistent(2, 1) {
                assert!(r.values[c].inconsistency_index().is_some());
                assert_eq!(r.values[3], Snapshot::inconsistent(2, 0));
            }
        }
    }

    #[test]
    fn decisions() {
        let psi = parse("((p & ~p) & ~(p & ~p)) -> ~~p").unwrap();
        assert!(decide(Logic::Cn(1), &psi, &[]).unwrap().verdict.is_valid());

        let (p, q) = (parse("p").unwrap(), parse("q").unwrap());
        let np = parse("~p").unwrap();
        let r = decide(Logic::Cn(1), &q, &[p.clone(), np.clone()]).unwrap();
        assert_eq!(r.verdict, Verdict::Invalid);
        let cm = r.countermodel.unwrap();
        assert_eq!(cm.value(&p), Snapshot::inconsistent(1, 0));
        assert_eq!(cm.value(&q), Snapshot::bottom(1));

        let prem = [p.clone(), np.clone(), powseq(&p, 1)];
        assert!(decide(Logic::Cn(1), &q, &prem).unwrap().verdict.is_valid());
        let r = decide(Logic::Cn(2), &q, &prem).unwrap();
        assert_eq!(r.countermodel.unwrap().value(&p), Snapshot::inconsistent(2, 1));
    }

    #[test]
    fn atom_table() {
        let t = build_table(Logic::Cn(1), &parse("p").unwrap(), &[]).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert_eq!(render_table(&t, false).lines().count(), 5);
    }

    #[test]
    fn row_cap_is_reported() {
        let f = parse("~p | ~q | ~r").unwrap();
        let opts = TableOptions { row_cap: 10, ..TableOptions::default() };
        assert_eq!(
            build_table_with(Logic::Cn(3), &f, &[], &opts).unwrap_err(),
            TableError::RowCap { cap: 10 }
        );
    }

    #[test]
    fn signature_error() {
        assert!(matches!(
            decide(Logic::Cn(1), &parse("@p").unwrap(), &[]),
            Err(TableError::Signature { .. })
        ));
    }

    #[test]
    fn live_rows_extend() {
        let f = parse("(p -> ~q) | ~(q & ~q) & ~~p").unwrap();
        for logic in [Logic::Cn(1), Logic::Cn(2), Logic::Cn(3)] {
            let t = build_table(logic, &f, &[]).unwrap();
            for r in t.live_rows() {
                let domain = t.columns.clone();
                let nu0 = domain.iter().cloned().zip(r.values.iter().copied()).collect();
                extend_partial(logic, &domain, &nu0).unwrap();
            }
        }
    }

    #[test]
    fn json_shape() {
        let r = decide(Logic::Cn(1), &parse("q").unwrap(), &[parse("p").unwrap(), parse("~p").unwrap()]).unwrap();
        let j = r.to_json();
        assert_eq!(j["verdict"], "not-entailed");
        assert_eq!(j["countermodel"]["p"], "t");
        assert!(j["stats"]["elapsed"].is_number());
    }
}
