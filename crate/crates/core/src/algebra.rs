//! Truth values (snapshots), value classes, the multialgebras of each logic and
//! the local restriction clauses that cut the valuation sets down.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Connective, Logic, MAX_N};

/// A truth value of `C_n` (or of a three-valued logic, at `n = 1`).
///
/// Index order is canonical: `T_n`, `t^n_0`, ..., `t^n_{n-1}`, `F_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Snapshot {
    n: u8,
    index: u8,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("{conn:?} takes {expected} argument(s), got {got}")]
    Arity { conn: Connective, expected: usize, got: usize },
    #[error("value {value} does not belong to the domain of {logic}")]
    Domain { value: Snapshot, logic: Logic },
    #[error("{logic} has no consistency connective")]
    Signature { logic: Logic },
    #[error("unknown value name `{0}`")]
    UnknownValue(String),
}

impl Snapshot {
    pub fn from_index(n: u32, index: usize) -> Snapshot {
        assert!((1..=MAX_N).contains(&n) && index < n as usize + 2, "snapshot index out of range");
        Snapshot { n: n as u8, index: index as u8 }
    }

    pub fn top(n: u32) -> Snapshot {
        Snapshot::from_index(n, 0)
    }

    pub fn bottom(n: u32) -> Snapshot {
        Snapshot::from_index(n, n as usize + 1)
    }

    /// `t^n_i`.
    pub fn inconsistent(n: u32, i: u32) -> Snapshot {
        assert!(i < n, "t^{n}_{i} does not exist");
        Snapshot::from_index(n, i as usize + 1)
    }

    pub fn n(self) -> u32 {
        self.n as u32
    }

    pub fn index(self) -> usize {
        self.index as usize
    }

    pub fn is_top(self) -> bool {
        self.index == 0
    }

    pub fn is_bottom(self) -> bool {
        self.index == self.n + 1
    }

    pub fn is_designated(self) -> bool {
        !self.is_bottom()
    }

    pub fn is_boolean(self) -> bool {
        self.is_top() || self.is_bottom()
    }

    /// `Some(i)` for `t^n_i`.
    pub fn inconsistency_index(self) -> Option<u32> {
        (!self.is_boolean()).then(|| self.index as u32 - 1)
    }

    /// Coordinate `k` (0-based) of the bit tuple.
    pub fn coord(self, k: usize) -> bool {
        let n = self.n as usize;
        assert!(k <= n);
        match self.index as usize {
            0 => k != 1,
            i if i == n + 1 => k != 0,
            i => {
                let t = i - 1;
                !(t + 2 <= n && k == t + 2)
            }
        }
    }

    pub fn coords(self) -> Vec<bool> {
        (0..=self.n as usize).map(|k| self.coord(k)).collect()
    }

    /// Inverse of [`Snapshot::coords`]; `None` when the tuple has two zeros.
    pub fn from_coords(bits: &[bool]) -> Option<Snapshot> {
        let n = bits.len().checked_sub(1)? as u32;
        if n == 0 || n > MAX_N {
            return None;
        }
        snapshots(n).into_iter().find(|s| s.coords() == bits)
    }

    pub fn name(self) -> String {
        self.to_string()
    }

    pub fn short_name(self) -> String {
        if self.n == 1 {
            return self.to_string();
        }
        match self.inconsistency_index() {
            None if self.is_top() => "T".into(),
            None => "F".into(),
            Some(i) => format!("t{i}"),
        }
    }

    /// Accepts `T`, `t`, `F` at `n = 1` and `T_n`/`T`, `t^n_i`/`t_i`/`ti`,
    /// `F_n`/`F` in general.
    pub fn parse_name(n: u32, s: &str) -> Result<Snapshot, AlgebraError> {
        let bad = || AlgebraError::UnknownValue(s.to_string());
        let s = s.trim();
        let head = s.chars().next().ok_or_else(bad)?;
        let rest = &s[head.len_utf8()..];
        let check_n = |tail: &str| -> bool { tail.is_empty() || tail.parse::<u32>() == Ok(n) };
        match head {
            'T' if check_n(rest.trim_start_matches('_')) => Ok(Snapshot::top(n)),
            'F' if check_n(rest.trim_start_matches('_')) => Ok(Snapshot::bottom(n)),
            't' => {
                if rest.is_empty() {
                    return if n == 1 { Ok(Snapshot::inconsistent(1, 0)) } else { Err(bad()) };
                }
                let rest = match rest.strip_prefix('^') {
                    Some(r) => {
                        let (m, tail) = r.split_once('_').ok_or_else(bad)?;
                        if m.parse::<u32>() != Ok(n) {
                            return Err(bad());
                        }
                        tail
                    }
                    None => rest.trim_start_matches('_'),
                };
                let i: u32 = rest.parse().map_err(|_| bad())?;
                if i < n {
                    Ok(Snapshot::inconsistent(n, i))
                } else {
                    Err(bad())
                }
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Snapshot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n;
        if n == 1 {
            return f.write_str(match self.index {
                0 => "T",
                1 => "t",
                _ => "F",
            });
        }
        match self.inconsistency_index() {
            None if self.is_top() => write!(f, "T_{n}"),
            None => write!(f, "F_{n}"),
            Some(i) => write!(f, "t^{n}_{i}"),
        }
    }
}

impl Serialize for Snapshot {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `B_n` in canonical order.
pub fn snapshots(n: u32) -> Vec<Snapshot> {
    (0..n as usize + 2).map(|i| Snapshot::from_index(n, i)).collect()
}

/// A set of snapshot indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ValueSet(pub u64);

impl ValueSet {
    pub const EMPTY: ValueSet = ValueSet(0);

    pub fn all(n: u32) -> ValueSet {
        ValueSet((1u64 << (n + 2)) - 1)
    }

    pub fn single(v: Snapshot) -> ValueSet {
        ValueSet(1 << v.index())
    }

    pub fn of(vals: impl IntoIterator<Item = Snapshot>) -> ValueSet {
        vals.into_iter().fold(ValueSet::EMPTY, |s, v| s.with(v))
    }

    pub fn designated(n: u32) -> ValueSet {
        ValueSet::all(n).without(Snapshot::bottom(n))
    }

    pub fn undesignated(n: u32) -> ValueSet {
        ValueSet::single(Snapshot::bottom(n))
    }

    pub fn boolean(n: u32) -> ValueSet {
        ValueSet::single(Snapshot::top(n)).with(Snapshot::bottom(n))
    }

    pub fn inconsistent(n: u32) -> ValueSet {
        ValueSet(ValueSet::all(n).0 & !ValueSet::boolean(n).0)
    }

    /// `D^{≤i} = {T, t_0, ..., t_i}`; `i = -1` gives `{T}`.
    pub fn designated_upto(n: u32, i: i64) -> ValueSet {
        let top = (i + 2).clamp(1, n as i64 + 1) as u32;
        ValueSet((1u64 << top) - 1)
    }

    /// `D^{≥i} = {t_i, ..., t_{n-1}}`.
    pub fn inconsistent_from(n: u32, i: u32) -> ValueSet {
        ValueSet::of((i..n).map(|j| Snapshot::inconsistent(n, j)))
    }

    pub fn with(self, v: Snapshot) -> ValueSet {
        ValueSet(self.0 | 1 << v.index())
    }

    pub fn without(self, v: Snapshot) -> ValueSet {
        ValueSet(self.0 & !(1 << v.index()))
    }

    pub fn contains(self, v: Snapshot) -> bool {
        self.0 >> v.index() & 1 == 1
    }

    pub fn contains_index(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, o: ValueSet) -> ValueSet {
        ValueSet(self.0 | o.0)
    }

    pub fn intersect(self, o: ValueSet) -> ValueSet {
        ValueSet(self.0 & o.0)
    }

    pub fn is_subset(self, o: ValueSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }

    pub fn values(self, n: u32) -> impl Iterator<Item = Snapshot> {
        self.indices().map(move |i| Snapshot::from_index(n, i))
    }

    pub fn first(self, n: u32) -> Option<Snapshot> {
        (self.0 != 0).then(|| Snapshot::from_index(n, self.0.trailing_zeros() as usize))
    }

    /// `D`, `U`, `I`, `B`, a single name or an explicit list.
    pub fn display(self, n: u32) -> String {
        if self.len() == 1 {
            return self.first(n).unwrap().to_string();
        }
        if self == ValueSet::designated(n) {
            return "D".into();
        }
        if n > 1 && self == ValueSet::inconsistent(n) {
            return "I".into();
        }
        if self == ValueSet::all(n) {
            return "B".into();
        }
        let names: Vec<String> = self.values(n).map(|v| v.to_string()).collect();
        format!("{{{}}}", names.join(","))
    }
}

/// The shapes on which valuations are restricted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RestrictedShape {
    /// `α ∧ ¬α`, keyed by the value of `α`.
    Contradiction,
    /// `α¹ = ¬(α ∧ ¬α)`, keyed by the value of `α`.
    ConsistencyStep,
}

/// When `α` takes value `trigger`, a formula of shape `shape` over `α` may only
/// take values in `allowed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RestrictionClause {
    pub shape: RestrictedShape,
    pub trigger: Snapshot,
    pub allowed: ValueSet,
}

pub fn restriction_clauses(logic: Logic) -> Vec<RestrictionClause> {
    let n = logic.n();
    let mut out = Vec::new();
    for v in snapshots(n) {
        for shape in [RestrictedShape::Contradiction, RestrictedShape::ConsistencyStep] {
            if let Some(allowed) = restricted_values(logic, shape, v) {
                out.push(RestrictionClause { shape, trigger: v, allowed });
            }
        }
    }
    out
}

/// Values a formula of `shape` over `α` may take when `ν(α) = base`; `None` when
/// unrestricted.
pub fn restricted_values(logic: Logic, shape: RestrictedShape, base: Snapshot) -> Option<ValueSet> {
    let n = logic.n();
    let k = base.inconsistency_index()?;
    match shape {
        RestrictedShape::Contradiction if k == 0 => Some(ValueSet::single(Snapshot::top(n))),
        RestrictedShape::Contradiction => Some(ValueSet::inconsistent(n)),
        RestrictedShape::ConsistencyStep if k == 0 => None,
        RestrictedShape::ConsistencyStep => Some(ValueSet::single(Snapshot::inconsistent(n, k - 1))),
    }
}

/// A finite multialgebra with its restriction clauses, indexed by snapshot index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multialgebra {
    logic: Logic,
    n: u32,
    neg: Vec<ValueSet>,
    cons: Option<Vec<ValueSet>>,
    and: Vec<ValueSet>,
    or: Vec<ValueSet>,
    imp: Vec<ValueSet>,
    contradiction: Vec<ValueSet>,
    step: Vec<ValueSet>,
}

impl Multialgebra {
    /// The algebra that drives the engines: `A_Cn` for `n ≥ 2`, the `Σ`-reduct
    /// of `A_Cila` for `C_1`, and the hard-coded three-valued tables otherwise.
    pub fn for_logic(logic: Logic) -> Multialgebra {
        match logic {
            Logic::Cn(1) => cila_reduct(),
            Logic::Cn(n) => cn_multialgebra(n),
            Logic::MbCcl => three_valued(Logic::MbCcl),
            Logic::Cila => three_valued(Logic::Cila),
        }
    }

    fn assemble(logic: Logic, tables: [Vec<ValueSet>; 4], cons: Option<Vec<ValueSet>>) -> Multialgebra {
        let n = logic.n();
        let [neg, and, or, imp] = tables;
        let all = ValueSet::all(n);
        let contradiction = snapshots(n)
            .into_iter()
            .map(|v| restricted_values(logic, RestrictedShape::Contradiction, v).unwrap_or(all))
            .collect();
        let step = snapshots(n)
            .into_iter()
            .map(|v| restricted_values(logic, RestrictedShape::ConsistencyStep, v).unwrap_or(all))
            .collect();
        Multialgebra { logic, n, neg, cons, and, or, imp, contradiction, step }
    }

    pub fn logic(&self) -> Logic {
        self.logic
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn size(&self) -> usize {
        self.n as usize + 2
    }

    pub fn values(&self) -> Vec<Snapshot> {
        snapshots(self.n)
    }

    pub fn all(&self) -> ValueSet {
        ValueSet::all(self.n)
    }

    pub fn designated(&self) -> ValueSet {
        ValueSet::designated(self.n)
    }

    pub fn has_consistency(&self) -> bool {
        self.cons.is_some()
    }

    /// Unary cell by argument index. Panics on `Cons` without a table.
    #[inline]
    pub fn unary_cell(&self, conn: Connective, a: usize) -> ValueSet {
        match conn {
            Connective::Neg => self.neg[a],
            Connective::Cons => self.cons.as_ref().expect("no consistency table")[a],
            _ => panic!("{conn:?} is not unary"),
        }
    }

    /// Binary cell by argument indices.
    #[inline]
    pub fn binary_cell(&self, conn: Connective, a: usize, b: usize) -> ValueSet {
        let m = self.size();
        match conn {
            Connective::And => self.and[a * m + b],
            Connective::Or => self.or[a * m + b],
            Connective::Imp => self.imp[a * m + b],
            _ => panic!("{conn:?} is not binary"),
        }
    }

    /// Checked access to a cell.
    pub fn cell(&self, conn: Connective, args: &[Snapshot]) -> Result<ValueSet, AlgebraError> {
        if args.len() != conn.arity() {
            return Err(AlgebraError::Arity { conn, expected: conn.arity(), got: args.len() });
        }
        if let Some(&value) = args.iter().find(|v| v.n() != self.n) {
            return Err(AlgebraError::Domain { value, logic: self.logic });
        }
        if conn == Connective::Cons && self.cons.is_none() {
            return Err(AlgebraError::Signature { logic: self.logic });
        }
        Ok(match args {
            [a] => self.unary_cell(conn, a.index()),
            [a, b] => self.binary_cell(conn, a.index(), b.index()),
            _ => unreachable!(),
        })
    }

    /// Union of the cells over all argument choices.
    pub fn image(&self, conn: Connective, args: &[ValueSet]) -> ValueSet {
        let mut out = ValueSet::EMPTY;
        match args {
            [a] => {
                for i in a.indices() {
                    out = out.union(self.unary_cell(conn, i));
                }
            }
            [a, b] => {
                for i in a.indices() {
                    for j in b.indices() {
                        out = out.union(self.binary_cell(conn, i, j));
                    }
                }
            }
            _ => panic!("bad arity"),
        }
        out
    }

    /// Allowed values for `α ∧ ¬α` given the index of `ν(α)`.
    #[inline]
    pub fn contradiction_allowed(&self, base: usize) -> ValueSet {
        self.contradiction[base]
    }

    /// Allowed values for `¬(α ∧ ¬α)` given the index of `ν(α)`.
    #[inline]
    pub fn step_allowed(&self, base: usize) -> ValueSet {
        self.step[base]
    }

    /// The algebra without its consistency table.
    pub fn sigma_reduct(&self) -> Multialgebra {
        Multialgebra { cons: None, ..self.clone() }
    }

    fn connectives(&self) -> Vec<Connective> {
        let mut c = vec![Connective::Neg];
        if self.cons.is_some() {
            c.push(Connective::Cons);
        }
        c.extend(Connective::BINARY);
        c
    }

    /// Aligned text tables, one block per connective.
    pub fn render(&self) -> String {
        let vals = self.values();
        let w = vals
            .iter()
            .map(|v| v.to_string().len())
            .chain(self.all_cells().map(|c| c.display(self.n).len()))
            .max()
            .unwrap_or(1)
            + 1;
        let mut s = format!("{} (designated: {})\n", self.logic, self.designated().display(self.n));
        for conn in self.connectives() {
            s.push('\n');
            if conn.arity() == 1 {
                s.push_str(&format!("{:<w$}|\n", conn.symbol()));
                for v in &vals {
                    let cell = self.unary_cell(conn, v.index()).display(self.n);
                    s.push_str(&format!("{:<w$}| {cell}\n", v.to_string()));
                }
            } else {
                s.push_str(&format!("{:<w$}|", conn.symbol()));
                for v in &vals {
                    s.push_str(&format!(" {:<w$}", v.to_string()));
                }
                s.push('\n');
                for a in &vals {
                    s.push_str(&format!("{:<w$}|", a.to_string()));
                    for b in &vals {
                        let cell = self.binary_cell(conn, a.index(), b.index()).display(self.n);
                        s.push_str(&format!(" {cell:<w$}"));
                    }
                    s.push('\n');
                }
            }
        }
        s.lines().map(str::trim_end).collect::<Vec<_>>().join("\n") + "\n"
    }

    fn all_cells(&self) -> impl Iterator<Item = ValueSet> + '_ {
        self.neg
            .iter()
            .chain(self.cons.iter().flatten())
            .chain(&self.and)
            .chain(&self.or)
            .chain(&self.imp)
            .copied()
    }

    /// JSON: value names, designated values and, per connective, the cells as
    /// arrays of value names (binary tables row-major by first argument).
    pub fn to_json(&self) -> serde_json::Value {
        let vals = self.values();
        let names = |c: ValueSet| -> Vec<String> { c.values(self.n).map(|v| v.to_string()).collect() };
        let mut tables = BTreeMap::new();
        for conn in self.connectives() {
            let t = if conn.arity() == 1 {
                serde_json::to_value(
                    vals.iter().map(|v| names(self.unary_cell(conn, v.index()))).collect::<Vec<_>>(),
                )
            } else {
                serde_json::to_value(
                    vals.iter()
                        .map(|a| {
                            vals.iter()
                                .map(|b| names(self.binary_cell(conn, a.index(), b.index())))
                                .collect::<Vec<_>>()
                        })
                        .collect::<Vec<_>>(),
                )
            };
            tables.insert(conn.symbol().to_string(), t.expect("plain data"));
        }
        serde_json::json!({
            "logic": self.logic.to_string(),
            "values": vals.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "designated": names(self.designated()),
            "tables": tables,
        })
    }
}

/// Exact table cell of `logic` (builds the algebra on each call).
pub fn mult_op(logic: Logic, conn: Connective, args: &[Snapshot]) -> Result<ValueSet, AlgebraError> {
    Multialgebra::for_logic(logic).cell(conn, args)
}

/// `A_Cn`, computed from its defining predicates on bit tuples.
pub fn cn_multialgebra(n: u32) -> Multialgebra {
    let vals = snapshots(n);
    let m = vals.len();
    let boolean = ValueSet::boolean(n);
    let neg = vals
        .iter()
        .map(|z| ValueSet::of(vals.iter().copied().filter(|w| w.coord(0) == z.coord(1) && (!w.coord(1) || z.coord(0)))))
        .collect();
    let bin = |conn: Connective| -> Vec<ValueSet> {
        let mut t = Vec::with_capacity(m * m);
        for z in &vals {
            for w in &vals {
                let first = conn.boolean(z.coord(0), w.coord(0));
                let pool = if z.is_boolean() && w.is_boolean() { boolean } else { ValueSet::all(n) };
                t.push(ValueSet::of(pool.values(n).filter(|u| u.coord(0) == first)));
            }
        }
        t
    };
    Multialgebra::assemble(
        Logic::Cn(n),
        [neg, bin(Connective::And), bin(Connective::Or), bin(Connective::Imp)],
        None,
    )
}

/// `A_C1`: the `Σ`-reduct of `A_Cila`.
pub fn cila_reduct() -> Multialgebra {
    let cila = three_valued(Logic::Cila);
    Multialgebra { logic: Logic::Cn(1), ..cila.sigma_reduct() }
}

fn three_valued(logic: Logic) -> Multialgebra {
    // Index order: T = 0, t = 1, F = 2.
    const T: ValueSet = ValueSet(0b001);
    const F: ValueSet = ValueSet(0b100);
    const D: ValueSet = ValueSet(0b011);
    const U: ValueSet = F;
    // Tables below are written with rows and columns in the order F, t, T.
    let reorder = |rows: [[ValueSet; 3]; 3]| -> Vec<ValueSet> {
        let pos = [2, 1, 0];
        let mut t = vec![ValueSet::EMPTY; 9];
        for (a, row) in rows.iter().enumerate() {
            for (b, cell) in row.iter().enumerate() {
                t[pos[a] * 3 + pos[b]] = *cell;
            }
        }
        t
    };
    let unary = |cells: [ValueSet; 3]| -> Vec<ValueSet> { vec![cells[2], cells[1], cells[0]] };
    match logic {
        Logic::MbCcl => Multialgebra::assemble(
            logic,
            [
                unary([D, D, U]),
                reorder([[U, U, U], [U, D, D], [U, D, D]]),
                reorder([[U, D, D], [D, D, D], [D, D, D]]),
                reorder([[D, D, D], [U, D, D], [U, D, D]]),
            ],
            Some(unary([D, U, D])),
        ),
        Logic::Cila => Multialgebra::assemble(
            logic,
            [
                unary([T, D, F]),
                reorder([[F, F, F], [F, D, D], [F, D, T]]),
                reorder([[F, D, T], [D, D, D], [T, D, T]]),
                reorder([[T, D, T], [F, D, D], [F, D, T]]),
            ],
            Some(unary([T, F, T])),
        ),
        Logic::Cn(_) => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &[u8]) -> Vec<bool> {
        s.iter().map(|&b| b == 1).collect()
    }

    #[test]
    fn snapshot_tuples() {
        let b2: Vec<Vec<bool>> = snapshots(2).iter().map(|s| s.coords()).collect();
        assert_eq!(b2, vec![bits(&[1, 0, 1]), bits(&[1, 1, 0]), bits(&[1, 1, 1]), bits(&[0, 1, 1])]);
        let b1: Vec<Vec<bool>> = snapshots(1).iter().map(|s| s.coords()).collect();
        assert_eq!(b1, vec![bits(&[1, 0]), bits(&[1, 1]), bits(&[0, 1])]);
        assert_eq!(snapshots(5).len(), 7);
    }

    #[test]
    fn snapshots_have_at_most_one_zero() {
        for n in 1..=8 {
            let all = snapshots(n);
            let mut seen = std::collections::HashSet::new();
            for s in &all {
                let c = s.coords();
                assert_eq!(c.len(), n as usize + 1);
                assert!(c.iter().filter(|b| !**b).count() <= 1);
                assert!(seen.insert(c.clone()));
                assert_eq!(Snapshot::from_coords(&c), Some(*s));
            }
            // every tuple with at most one zero is a snapshot
            assert_eq!(all.len(), n as usize + 2);
        }
        assert_eq!(Snapshot::from_coords(&bits(&[0, 0, 1])), None);
    }

    #[test]
    fn value_classes() {
        for n in 1..=6 {
            assert_eq!(ValueSet::designated(n).len(), n as usize + 1);
            assert_eq!(ValueSet::inconsistent(n).len(), n as usize);
            assert_eq!(ValueSet::boolean(n).len(), 2);
            assert!(!ValueSet::designated(n).contains(Snapshot::bottom(n)));
        }
        assert_eq!(ValueSet::designated_upto(3, -1), ValueSet::single(Snapshot::top(3)));
        assert_eq!(ValueSet::designated_upto(3, 1).len(), 3);
        assert_eq!(ValueSet::inconsistent_from(3, 1).len(), 2);
    }

    #[test]
    fn names_round_trip() {
        for n in 1..=4 {
            for s in snapshots(n) {
                assert_eq!(Snapshot::parse_name(n, &s.to_string()), Ok(s));
                assert_eq!(Snapshot::parse_name(n, &s.short_name()), Ok(s));
            }
        }
        assert_eq!(Snapshot::inconsistent(3, 1).to_string(), "t^3_1");
        assert_eq!(Snapshot::parse_name(3, "t_2"), Ok(Snapshot::inconsistent(3, 2)));
        assert!(Snapshot::parse_name(3, "t^2_0").is_err());
        assert!(Snapshot::parse_name(3, "t3").is_err());
        assert!(Snapshot::parse_name(2, "t").is_err());
    }

    #[test]
    fn documented_cells() {
        let n = 3;
        for i in 0..n {
            let c = mult_op(Logic::Cn(n), Connective::Neg, &[Snapshot::inconsistent(n, i)]).unwrap();
            assert_eq!(c, ValueSet::designated(n));
        }
        let f = Snapshot::bottom(n);
        assert_eq!(
            mult_op(Logic::Cn(n), Connective::Imp, &[f, f]).unwrap(),
            ValueSet::single(Snapshot::top(n))
        );
        let t1 = Snapshot::top(1);
        let i1 = Snapshot::inconsistent(1, 0);
        let f1 = Snapshot::bottom(1);
        assert_eq!(mult_op(Logic::Cila, Connective::And, &[t1, t1]).unwrap(), ValueSet::single(t1));
        assert_eq!(mult_op(Logic::MbCcl, Connective::Cons, &[i1]).unwrap(), ValueSet::single(f1));
        let red = cila_reduct();
        assert!(!red.has_consistency());
        assert_eq!(red.cell(Connective::Neg, &[f1]).unwrap(), ValueSet::single(t1));
        assert_eq!(red.cell(Connective::Imp, &[i1, f1]).unwrap(), ValueSet::single(f1));
    }

    #[test]
    fn cell_errors() {
        let a = Multialgebra::for_logic(Logic::Cn(2));
        let t = Snapshot::top(2);
        assert!(matches!(a.cell(Connective::And, &[t]), Err(AlgebraError::Arity { .. })));
        assert!(matches!(a.cell(Connective::Cons, &[t]), Err(AlgebraError::Signature { .. })));
        assert!(matches!(a.cell(Connective::Neg, &[Snapshot::top(3)]), Err(AlgebraError::Domain { .. })));
    }

    /// Compact tables for `A_Cn`: rows/columns grouped as T, t (any), F.
    #[test]
    fn cn_compact_tables() {
        for n in 2..=6 {
            let a = cn_multialgebra(n);
            let d = ValueSet::designated(n);
            let t = ValueSet::single(Snapshot::top(n));
            let f = ValueSet::single(Snapshot::bottom(n));
            let group = |v: Snapshot| if v.is_top() { 0 } else if v.is_bottom() { 2 } else { 1 };
            let expect = |conn: Connective| -> [[ValueSet; 3]; 3] {
                match conn {
                    Connective::Imp => [[t, d, f], [d, d, f], [t, d, t]],
                    Connective::And => [[t, d, f], [d, d, f], [f, f, f]],
                    Connective::Or => [[t, d, t], [d, d, d], [t, d, f]],
                    _ => unreachable!(),
                }
            };
            for conn in Connective::BINARY {
                for z in snapshots(n) {
                    for w in snapshots(n) {
                        assert_eq!(
                            a.binary_cell(conn, z.index(), w.index()),
                            expect(conn)[group(z)][group(w)],
                            "{conn:?} {z} {w}"
                        );
                    }
                }
            }
            for z in snapshots(n) {
                let want = [f, d, t][group(z)];
                assert_eq!(a.unary_cell(Connective::Neg, z.index()), want);
            }
        }
    }

    /// The step clause forces `ν(α¹) = t_{k-1}` while the contradiction clause
    /// lets `α ∧ ¬α` range over I; every such choice must admit t_{k-1} under ¬.
    #[test]
    fn step_value_is_a_negation_of_every_contradiction_value() {
        for n in 2..=8 {
            let a = cn_multialgebra(n);
            for k in 1..n {
                let base = Snapshot::inconsistent(n, k);
                let contra = restricted_values(Logic::Cn(n), RestrictedShape::Contradiction, base).unwrap();
                let step = restricted_values(Logic::Cn(n), RestrictedShape::ConsistencyStep, base).unwrap();
                for c in contra.values(n) {
                    assert!(step.is_subset(a.unary_cell(Connective::Neg, c.index())), "n = {n}, k = {k}, {c}");
                }
            }
        }
    }

    #[test]
    fn cells_are_nonempty() {
        let mut logics = vec![Logic::MbCcl, Logic::Cila];
        logics.extend((1..=8).map(Logic::Cn));
        for l in logics {
            let a = Multialgebra::for_logic(l);
            assert!(a.all_cells().all(|c| !c.is_empty() && c.is_subset(a.all())), "{l}");
        }
    }

    #[test]
    fn first_coordinate_homomorphism() {
        for n in 1..=6 {
            let a = cn_multialgebra(n);
            for z in snapshots(n) {
                for w in a.unary_cell(Connective::Neg, z.index()).values(n) {
                    assert!(w.coord(0) == z.coord(1) && (!w.coord(1) || z.coord(0)));
                }
                for w in snapshots(n) {
                    for conn in Connective::BINARY {
                        let cell = a.binary_cell(conn, z.index(), w.index());
                        for u in cell.values(n) {
                            assert_eq!(u.coord(0), conn.boolean(z.coord(0), w.coord(0)));
                        }
                        if z.is_boolean() && w.is_boolean() {
                            assert_eq!(cell.len(), 1);
                            assert!(cell.is_subset(ValueSet::boolean(n)));
                        }
                    }
                }
            }
            let (t, f) = (Snapshot::top(n), Snapshot::bottom(n));
            assert_eq!(a.unary_cell(Connective::Neg, t.index()), ValueSet::single(f));
            assert_eq!(a.unary_cell(Connective::Neg, f.index()), ValueSet::single(t));
        }
    }

    #[test]
    fn cila_is_a_submultialgebra_of_mbccl() {
        let c = Multialgebra::for_logic(Logic::Cila);
        let m = Multialgebra::for_logic(Logic::MbCcl);
        for (x, y) in c.all_cells().zip(m.all_cells()) {
            assert!(x.is_subset(y));
        }
    }

    #[test]
    fn computed_c1_matches_the_cila_reduct() {
        let computed = cn_multialgebra(1);
        assert_eq!(computed, cila_reduct());
    }

    #[test]
    fn restrictions_force_only_cell_members() {
        for n in 1..=6 {
            let logic = Logic::Cn(n);
            let a = Multialgebra::for_logic(logic);
            for base in snapshots(n) {
                let allowed = a.contradiction_allowed(base.index());
                for neg in a.unary_cell(Connective::Neg, base.index()).values(n) {
                    let cell = a.binary_cell(Connective::And, base.index(), neg.index());
                    assert!(!cell.intersect(allowed).is_empty());
                    if allowed != a.all() {
                        assert!(allowed.intersect(cell) == allowed, "forced values outside the cell");
                    }
                    for c in cell.intersect(allowed).values(n) {
                        let step = a.step_allowed(base.index());
                        let neg_cell = a.unary_cell(Connective::Neg, c.index());
                        assert!(step == a.all() || step.is_subset(neg_cell));
                    }
                }
            }
        }
    }

    #[test]
    fn clause_listing() {
        assert_eq!(restriction_clauses(Logic::Cila).len(), 1);
        // t_0 → T, and for each k ≥ 1 two clauses.
        assert_eq!(restriction_clauses(Logic::Cn(3)).len(), 1 + 2 * 2);
    }

    #[test]
    fn renders() {
        let text = Multialgebra::for_logic(Logic::Cila).render();
        assert!(text.contains("Cila"));
        let json = Multialgebra::for_logic(Logic::Cn(2)).to_json();
        assert_eq!(json["values"].as_array().unwrap().len(), 4);
        assert_eq!(json["tables"]["~"][0], serde_json::json!(["F_2"]));
    }
}
