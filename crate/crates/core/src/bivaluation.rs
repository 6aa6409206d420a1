//! Two-valued bivaluation semantics, used as an independent check on the
//! matrix engines, and the maps between bivaluations and restricted valuations.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::Snapshot;
use crate::formula::{ordered_subformulas, parse_unchecked, pow, Formula, Kind, Logic, ParseError};
use crate::valuation::{extend_partial, ExtensionError, Valuation};

/// Which clause list a bivaluation must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BivaluationSystem {
    Cn(u32),
    MbC,
    MbCci,
    MbCcl,
    Cila,
}

impl From<Logic> for BivaluationSystem {
    fn from(l: Logic) -> BivaluationSystem {
        match l {
            Logic::Cn(n) => BivaluationSystem::Cn(n),
            Logic::MbCcl => BivaluationSystem::MbCcl,
            Logic::Cila => BivaluationSystem::Cila,
        }
    }
}

impl BivaluationSystem {
    /// Width of the snapshot tuples built from a bivaluation.
    pub fn n(self) -> u32 {
        match self {
            BivaluationSystem::Cn(n) => n,
            _ => 1,
        }
    }

    fn has(self, c: Clause) -> bool {
        use BivaluationSystem::*;
        use Clause::*;
        match c {
            B1 | B2 | B3 | B4 => true,
            B5 | B8 => matches!(self, Cn(_) | Cila),
            B6 | B7 => matches!(self, Cn(_)),
            Bp1 => !matches!(self, Cn(_)),
            Bp2 => matches!(self, MbCci | Cila),
            Bp3 => matches!(self, MbCcl | Cila),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Clause {
    B1,
    B2,
    B3,
    B4,
    B5,
    B6,
    B7,
    B8,
    Bp1,
    Bp2,
    Bp3,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::B1 => "B1",
            Clause::B2 => "B2",
            Clause::B3 => "B3",
            Clause::B4 => "B4",
            Clause::B5 => "B5",
            Clause::B6 => "B6_n",
            Clause::B7 => "B7",
            Clause::B8 => "B8",
            Clause::Bp1 => "B'1",
            Clause::Bp2 => "B'2",
            Clause::Bp3 => "B'3",
        })
    }
}

/// A clause instance: the clause and the formulas it mentions, in the order
/// documented on [`clause_holds`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseViolation {
    pub clause: Clause,
    pub formulas: Vec<Formula>,
}

impl fmt::Display for ClauseViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fs: Vec<String> = self.formulas.iter().map(|x| x.to_string()).collect();
        write!(f, "({}) fails on {}", self.clause, fs.join(", "))
    }
}

/// Truth of a clause instance. Argument order per clause:
/// B1–B3 `[α#β, α, β]`; B4 `[α, ¬α]`; B5 `[α, ¬¬α]`; B6 `[α^{n-1}, ¬α^{n-1}, α^n]`;
/// B7 `[α, ¬α, ¬α°]`; B8 `[α, ¬α, β, ¬β, α#β, ¬(α#β)]`; B'1 `[∘α, α, ¬α]`;
/// B'2 `[¬∘α, α, ¬α]`; B'3 `[¬(α∧¬α), ∘α]`.
pub fn clause_holds(c: Clause, v: &[bool]) -> bool {
    match c {
        Clause::B1 => v[0] == (v[1] && v[2]),
        Clause::B2 => v[0] == (v[1] || v[2]),
        Clause::B3 => v[0] == (!v[1] || v[2]),
        Clause::B4 => v[0] || v[1],
        Clause::B5 => !v[1] || v[0],
        Clause::B6 => (v[0] == v[1]) == !v[2],
        Clause::B7 => (v[0] == v[1]) == v[2],
        Clause::B8 => !(v[0] != v[1] && v[2] != v[3]) || v[4] != v[5],
        Clause::Bp1 => !v[0] || !v[1] || !v[2],
        Clause::Bp2 => !v[0] || (v[1] && v[2]),
        Clause::Bp3 => !v[0] || v[1],
    }
}

#[derive(Debug, Clone)]
struct Instance {
    clause: Clause,
    at: Vec<usize>,
}

/// Every clause instance whose formulas all lie in `domain`.
fn instances(system: BivaluationSystem, domain: &[Formula]) -> Vec<Instance> {
    let pos: HashMap<&Formula, usize> = domain.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let at = |f: &Formula| pos.get(f).copied();
    let neg_at = |f: &Formula| at(&Formula::neg(f.clone()));
    let mut out = Vec::new();
    let mut push = |clause: Clause, fs: Option<Vec<usize>>| {
        if let Some(at) = fs.filter(|_| system.has(clause)) {
            out.push(Instance { clause, at });
        }
    };
    for (i, x) in domain.iter().enumerate() {
        match x.kind() {
            Kind::Var(_) => {}
            Kind::And(a, b) | Kind::Or(a, b) | Kind::Imp(a, b) => {
                let clause = match x.kind() {
                    Kind::And(..) => Clause::B1,
                    Kind::Or(..) => Clause::B2,
                    _ => Clause::B3,
                };
                push(clause, (|| Some(vec![i, at(a)?, at(b)?]))());
            }
            Kind::Cons(a) => push(Clause::Bp1, (|| Some(vec![i, at(a)?, neg_at(a)?]))()),
            Kind::Neg(a) => {
                push(Clause::B4, at(a).map(|j| vec![j, i]));
                match a.kind() {
                    Kind::Neg(c) => push(Clause::B5, at(c).map(|j| vec![j, i])),
                    Kind::Cons(c) => push(Clause::Bp2, (|| Some(vec![i, at(c)?, neg_at(c)?]))()),
                    Kind::And(l, r) | Kind::Or(l, r) | Kind::Imp(l, r) => push(
                        Clause::B8,
                        (|| Some(vec![at(l)?, neg_at(l)?, at(r)?, neg_at(r)?, at(a)?, i]))(),
                    ),
                    Kind::Var(_) => {}
                }
                if let Some(beta) = x.as_pow1() {
                    if let BivaluationSystem::Cn(n) = system {
                        if beta.power_decomposition().1 + 1 >= n {
                            push(Clause::B6, (|| Some(vec![at(beta)?, neg_at(beta)?, i]))());
                        }
                    }
                    push(Clause::Bp3, at(&Formula::cons(beta.clone())).map(|j| vec![i, j]));
                }
                if let Some(alpha) = a.as_pow1() {
                    push(Clause::B7, (|| Some(vec![at(alpha)?, neg_at(alpha)?, i]))());
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bivaluation {
    values: HashMap<Formula, bool>,
}

#[derive(Debug, Error)]
pub enum BivaluationError {
    #[error("{0} is needed but has no value")]
    Missing(Formula),
    #[error("{formula} gets the tuple {bits:?}, which is not a snapshot")]
    NotASnapshot { formula: Formula, bits: Vec<bool> },
    #[error(transparent)]
    Extension(#[from] ExtensionError),
    #[error("bad formula key: {0}")]
    Parse(#[from] ParseError),
    #[error("bad bivaluation JSON: {0}")]
    Json(String),
}

impl Bivaluation {
    pub fn new() -> Bivaluation {
        Bivaluation::default()
    }

    pub fn set(&mut self, f: Formula, v: bool) {
        self.values.insert(f, v);
    }

    pub fn get(&self, f: &Formula) -> Option<bool> {
        self.values.get(f).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Domain sorted by complexity, then printed form.
    pub fn domain(&self) -> Vec<Formula> {
        let mut d: Vec<(u64, String, Formula)> =
            self.values.keys().map(|f| (f.complexity(), f.to_string(), f.clone())).collect();
        d.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        d.into_iter().map(|x| x.2).collect()
    }

    /// `{"formula": 0 | 1, ...}`.
    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .domain()
            .into_iter()
            .map(|f| {
                let v = self.values[&f] as u8;
                (f.to_string(), v.into())
            })
            .collect();
        serde_json::Value::Object(map)
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Bivaluation, BivaluationError> {
        let obj = v.as_object().ok_or_else(|| BivaluationError::Json("expected an object".into()))?;
        let mut b = Bivaluation::new();
        for (k, x) in obj {
            let bit = match x {
                serde_json::Value::Bool(t) => *t,
                serde_json::Value::Number(n) if n.as_u64() == Some(0) => false,
                serde_json::Value::Number(n) if n.as_u64() == Some(1) => true,
                other => return Err(BivaluationError::Json(format!("value of `{k}` is {other}, expected 0 or 1"))),
            };
            b.set(parse_unchecked(k)?, bit);
        }
        Ok(b)
    }
}

impl FromIterator<(Formula, bool)> for Bivaluation {
    fn from_iter<I: IntoIterator<Item = (Formula, bool)>>(it: I) -> Bivaluation {
        Bivaluation { values: it.into_iter().collect() }
    }
}

/// Violations of the applicable clauses on `b`'s domain; empty iff `b` is a
/// bivaluation there.
pub fn check_bivaluation(system: impl Into<BivaluationSystem>, b: &Bivaluation) -> Vec<ClauseViolation> {
    let domain = b.domain();
    let vals: Vec<bool> = domain.iter().map(|f| b.values[f]).collect();
    instances(system.into(), &domain)
        .into_iter()
        .filter(|inst| {
            let v: Vec<bool> = inst.at.iter().map(|&i| vals[i]).collect();
            !clause_holds(inst.clause, &v)
        })
        .map(|inst| ClauseViolation { clause: inst.clause, formulas: inst.at.iter().map(|&i| domain[i].clone()).collect() })
        .collect()
}

/// Seeds, their subformulas, and for each of those `¬γ`, `γ ∧ ¬γ` and `γ^k`
/// for `1 ≤ k ≤ n` (plus `∘γ`, `¬∘γ` when the system has `∘`), closed under
/// subformulas, in complexity order.
pub fn closure(system: impl Into<BivaluationSystem>, seeds: &[Formula]) -> Vec<Formula> {
    let system = system.into();
    let n = system.n();
    let cons = !matches!(system, BivaluationSystem::Cn(_));
    let mut extra = Vec::new();
    let mut seen = HashSet::new();
    for s in seeds {
        for g in s.subformulas() {
            if !seen.insert(g.clone()) {
                continue;
            }
            extra.push(Formula::neg(g.clone()));
            extra.push(Formula::and(g.clone(), Formula::neg(g.clone())));
            extra.push(pow(&g, n));
            if cons {
                extra.push(Formula::neg(Formula::cons(g.clone())));
            }
        }
    }
    match extra.split_last() {
        Some((last, rest)) => {
            let mut all = rest.to_vec();
            all.extend(seeds.iter().cloned());
            ordered_subformulas(last, &all)
        }
        None => vec![],
    }
}

/// `b(α) = ν(α)_1` on `formulas` (the valuation's fixed domain when empty).
pub fn valuation_to_bivaluation(v: &Valuation, formulas: &[Formula]) -> Bivaluation {
    let domain = if formulas.is_empty() { v.domain() } else { formulas };
    domain.iter().map(|f| (f.clone(), v.value(f).coord(0))).collect()
}

/// The tuple `(b(α), b(¬α), b(α^1), ..., b(α^{n-1}))` as a snapshot.
pub fn snapshot_of(b: &Bivaluation, alpha: &Formula, n: u32) -> Result<Snapshot, BivaluationError> {
    let get = |f: &Formula| b.get(f).ok_or_else(|| BivaluationError::Missing(f.clone()));
    let mut bits = vec![get(alpha)?, get(&Formula::neg(alpha.clone()))?];
    for k in 1..n {
        bits.push(get(&pow(alpha, k))?);
    }
    Snapshot::from_coords(&bits).ok_or(BivaluationError::NotASnapshot { formula: alpha.clone(), bits })
}

/// Builds the valuation `ν(α) = (b(α), b(¬α), b(α^1), ..., b(α^{n-1}))` on the
/// subformulas of `query` and extends it to a total restricted valuation.
pub fn bivaluation_to_valuation(
    b: &Bivaluation,
    logic: Logic,
    query: &[Formula],
) -> Result<Valuation, BivaluationError> {
    let domain = match query.split_last() {
        Some((last, rest)) => ordered_subformulas(last, rest),
        None => vec![],
    };
    let mut nu0 = HashMap::new();
    for a in &domain {
        nu0.insert(a.clone(), snapshot_of(b, a, logic.n())?);
    }
    Ok(extend_partial(logic, &domain, &nu0)?)
}

/// Enumerates every clause-consistent 0/1 map on `domain` (assumed closed under
/// subformulas) agreeing with `pins`, calling `visit` until it returns false.
pub fn enumerate_bivaluations(
    system: impl Into<BivaluationSystem>,
    domain: &[Formula],
    pins: &HashMap<Formula, bool>,
    visit: &mut dyn FnMut(&Bivaluation) -> bool,
) {
    let system = system.into();
    let insts = instances(system, domain);
    let mut by_last: Vec<Vec<Instance>> = vec![Vec::new(); domain.len()];
    for inst in insts {
        let last = *inst.at.iter().max().unwrap();
        by_last[last].push(inst);
    }
    let pinned: Vec<Option<bool>> = domain.iter().map(|f| pins.get(f).copied()).collect();
    let mut vals = Vec::with_capacity(domain.len());
    let mut scratch = Vec::new();
    go(domain, &by_last, &pinned, &mut vals, &mut scratch, visit);
}

fn go(
    domain: &[Formula],
    by_last: &[Vec<Instance>],
    pinned: &[Option<bool>],
    vals: &mut Vec<bool>,
    scratch: &mut Vec<bool>,
    visit: &mut dyn FnMut(&Bivaluation) -> bool,
) -> bool {
    let d = vals.len();
    if d == domain.len() {
        let b = domain.iter().cloned().zip(vals.iter().copied()).collect();
        return visit(&b);
    }
    let choices: &[bool] = match pinned[d] {
        Some(true) => &[true],
        Some(false) => &[false],
        None => &[false, true],
    };
    for &c in choices {
        vals.push(c);
        let ok = by_last[d].iter().all(|inst| {
            scratch.clear();
            scratch.extend(inst.at.iter().map(|&i| vals[i]));
            clause_holds(inst.clause, scratch)
        });
        let keep_going = !ok || go(domain, by_last, pinned, vals, scratch, visit);
        vals.pop();
        if !keep_going {
            return false;
        }
    }
    true
}

#[derive(Debug, Clone)]
pub struct BivaluationVerdict {
    pub valid: bool,
    /// A bivaluation designating the premises and not the goal.
    pub counterexample: Option<Bivaluation>,
}

/// Brute-force entailment over the clause-consistent maps on the closure.
pub fn entails(system: impl Into<BivaluationSystem>, goal: &Formula, premises: &[Formula]) -> BivaluationVerdict {
    let system = system.into();
    let mut seeds = premises.to_vec();
    seeds.push(goal.clone());
    let domain = closure(system, &seeds);
    let mut pins: HashMap<Formula, bool> = premises.iter().map(|p| (p.clone(), true)).collect();
    if pins.insert(goal.clone(), false) == Some(true) {
        return BivaluationVerdict { valid: true, counterexample: None };
    }
    let mut found = None;
    enumerate_bivaluations(system, &domain, &pins, &mut |b| {
        found = Some(b.clone());
        false
    });
    BivaluationVerdict { valid: found.is_none(), counterexample: found }
}
