//! Restricted valuations: local membership checks, extension of partial
//! valuations to total ones, and completion of arbitrary partial maps.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use serde_json::json;
use thiserror::Error;

use crate::algebra::{Multialgebra, Snapshot, ValueSet};
use crate::formula::{ordered_subformulas, Formula, Kind, Logic};
use crate::truthtable::Plan;

/// Why a value breaks membership in the restricted valuation set.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("{formula} = {value} is outside its table cell {cell}")]
    NotInCell { formula: Formula, value: Snapshot, cell: String },
    #[error("{formula} = {value} but {base} = {base_value} only allows {allowed}")]
    Restricted { formula: Formula, value: Snapshot, base: Formula, base_value: Snapshot, allowed: String },
    #[error("{formula} uses a connective outside the signature of {logic}")]
    Signature { formula: Formula, logic: Logic },
}

impl Violation {
    pub fn formula(&self) -> &Formula {
        match self {
            Violation::NotInCell { formula, .. }
            | Violation::Restricted { formula, .. }
            | Violation::Signature { formula, .. } => formula,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtensionError {
    #[error("{0} is in the domain but its subformula {1} is not")]
    NotClosed(Formula, Formula),
    #[error("{0} is in the domain but has no value")]
    Missing(Formula),
    #[error("value {value} of {formula} is not a value of {logic}")]
    Domain { formula: Formula, value: Snapshot, logic: Logic },
    #[error("precondition violated: {0}")]
    Local(#[from] Violation),
    #[error("no restricted valuation agrees with the given values")]
    Unsatisfiable,
}

/// Checks the homomorphism condition and the restriction clauses at `f`, given
/// the values of `f` and of its relevant subformulas. Unknown values skip the
/// corresponding check.
pub fn local_violation(
    alg: &Multialgebra,
    f: &Formula,
    get: &dyn Fn(&Formula) -> Option<Snapshot>,
) -> Option<Violation> {
    let n = alg.n();
    let value = get(f)?;
    let cell = match f.kind() {
        Kind::Var(_) => None,
        Kind::Cons(_) if !alg.has_consistency() => {
            return Some(Violation::Signature { formula: f.clone(), logic: alg.logic() })
        }
        Kind::Neg(a) | Kind::Cons(a) => get(a).map(|va| alg.unary_cell(f.connective().unwrap(), va.index())),
        Kind::And(a, b) | Kind::Or(a, b) | Kind::Imp(a, b) => match (get(a), get(b)) {
            (Some(va), Some(vb)) => Some(alg.binary_cell(f.connective().unwrap(), va.index(), vb.index())),
            _ => None,
        },
    };
    if let Some(cell) = cell {
        if !cell.contains(value) {
            return Some(Violation::NotInCell { formula: f.clone(), value, cell: cell.display(n) });
        }
    }
    let restricted = if let Some(base) = f.as_contradiction() {
        get(base).map(|bv| (base, bv, alg.contradiction_allowed(bv.index())))
    } else if let Some(base) = f.as_pow1() {
        get(base).map(|bv| (base, bv, alg.step_allowed(bv.index())))
    } else {
        None
    };
    if let Some((base, base_value, allowed)) = restricted {
        if !allowed.contains(value) {
            return Some(Violation::Restricted {
                formula: f.clone(),
                value,
                base: base.clone(),
                base_value,
                allowed: allowed.display(n),
            });
        }
    }
    None
}

/// `f`, its subformulas, and for each of those `¬α`, `α ∧ ¬α`, `¬(α ∧ ¬α)`.
pub fn companion_closure(formulas: &[Formula]) -> Vec<Formula> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut push = |f: Formula, out: &mut Vec<Formula>| {
        if seen.insert(f.clone()) {
            out.push(f);
        }
    };
    for g in formulas {
        for a in g.subformulas() {
            let neg = Formula::neg(a.clone());
            let contra = Formula::and(a.clone(), neg.clone());
            let step = Formula::neg(contra.clone());
            push(a, &mut out);
            push(neg, &mut out);
            push(contra, &mut out);
            push(step, &mut out);
        }
    }
    out
}

/// A total restricted valuation: fixed values on a finite domain, and a
/// deterministic lawful choice everywhere else (first allowed value in
/// canonical order, children first).
#[derive(Debug, Clone)]
pub struct Valuation {
    algebra: Arc<Multialgebra>,
    fixed: HashMap<Formula, Snapshot>,
    order: Vec<Formula>,
}

impl Valuation {
    /// The valuation with an empty fixed domain.
    pub fn free(logic: Logic) -> Valuation {
        Valuation { algebra: Arc::new(Multialgebra::for_logic(logic)), fixed: HashMap::new(), order: vec![] }
    }

    pub(crate) fn from_parts(algebra: Arc<Multialgebra>, order: Vec<Formula>, values: Vec<Snapshot>) -> Valuation {
        let fixed = order.iter().cloned().zip(values).collect();
        Valuation { algebra, fixed, order }
    }

    pub fn logic(&self) -> Logic {
        self.algebra.logic()
    }

    pub fn algebra(&self) -> &Multialgebra {
        &self.algebra
    }

    /// Fixed domain in complexity order.
    pub fn domain(&self) -> &[Formula] {
        &self.order
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Formula, Snapshot)> + '_ {
        self.order.iter().map(move |f| (f, self.fixed[f]))
    }

    pub fn fixed(&self, f: &Formula) -> Option<Snapshot> {
        self.fixed.get(f).copied()
    }

    pub fn value(&self, f: &Formula) -> Snapshot {
        let mut memo = HashMap::new();
        self.eval(f, &mut memo)
    }

    pub fn designates(&self, f: &Formula) -> bool {
        self.value(f).is_designated()
    }

    fn eval(&self, f: &Formula, memo: &mut HashMap<Formula, Snapshot>) -> Snapshot {
        if let Some(&v) = self.fixed.get(f).or_else(|| memo.get(f)) {
            return v;
        }
        let alg = &*self.algebra;
        let mut allowed = match f.kind() {
            Kind::Var(_) => alg.all(),
            Kind::Neg(a) | Kind::Cons(a) => {
                let va = self.eval(a, memo);
                alg.unary_cell(f.connective().unwrap(), va.index())
            }
            Kind::And(a, b) | Kind::Or(a, b) | Kind::Imp(a, b) => {
                let va = self.eval(a, memo);
                let vb = self.eval(b, memo);
                alg.binary_cell(f.connective().unwrap(), va.index(), vb.index())
            }
        };
        if let Some(base) = f.as_contradiction() {
            allowed = allowed.intersect(alg.contradiction_allowed(self.eval(base, memo).index()));
        } else if let Some(base) = f.as_pow1() {
            allowed = allowed.intersect(alg.step_allowed(self.eval(base, memo).index()));
        }
        let v = allowed.first(alg.n()).expect("restricted cells are never empty");
        memo.insert(f.clone(), v);
        v
    }

    /// Checks every local condition on the companion closure of `formulas`.
    pub fn check_on(&self, formulas: &[Formula]) -> Result<(), Violation> {
        let closure = companion_closure(formulas);
        let mut memo = HashMap::new();
        for f in &closure {
            if f.uses_consistency() && !self.algebra.has_consistency() {
                return Err(Violation::Signature { formula: f.clone(), logic: self.logic() });
            }
            self.eval(f, &mut memo);
        }
        let get = |g: &Formula| self.fixed.get(g).or_else(|| memo.get(g)).copied();
        for f in &closure {
            if let Some(v) = local_violation(&self.algebra, f, &get) {
                return Err(v);
            }
        }
        Ok(())
    }

    /// A countermodel check: lawful on the closure, premises designated, goal not.
    pub fn refutes(&self, goal: &Formula, premises: &[Formula]) -> Result<bool, Violation> {
        let mut all = premises.to_vec();
        all.push(goal.clone());
        self.check_on(&all)?;
        Ok(!self.designates(goal) && premises.iter().all(|p| self.designates(p)))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> =
            self.entries().map(|(f, v)| (f.to_string(), json!(v.to_string()))).collect();
        serde_json::Value::Object(map)
    }
}

/// Extends `nu0`, given on the subformula-closed `domain`, to a total restricted
/// valuation.
pub fn extend_partial(
    logic: Logic,
    domain: &[Formula],
    nu0: &HashMap<Formula, Snapshot>,
) -> Result<Valuation, ExtensionError> {
    let alg = Arc::new(Multialgebra::for_logic(logic));
    let in_domain: HashSet<&Formula> = domain.iter().collect();
    for f in domain {
        for c in f.children() {
            if !in_domain.contains(c) {
                return Err(ExtensionError::NotClosed(f.clone(), c.clone()));
            }
        }
        let v = *nu0.get(f).ok_or_else(|| ExtensionError::Missing(f.clone()))?;
        if v.n() != alg.n() {
            return Err(ExtensionError::Domain { formula: f.clone(), value: v, logic });
        }
    }
    let get = |g: &Formula| if in_domain.contains(g) { nu0.get(g).copied() } else { None };
    for f in domain {
        if let Kind::Cons(_) = f.kind() {
            if !alg.has_consistency() {
                return Err(Violation::Signature { formula: f.clone(), logic }.into());
            }
        }
        if let Some(v) = local_violation(&alg, f, &get) {
            return Err(v.into());
        }
    }
    let mut order = ordered_subformulas_of(domain);
    order.retain(|f| in_domain.contains(f));
    let values = order.iter().map(|f| nu0[f]).collect();
    Ok(Valuation::from_parts(alg, order, values))
}

fn ordered_subformulas_of(fs: &[Formula]) -> Vec<Formula> {
    match fs.split_last() {
        Some((last, rest)) => ordered_subformulas(last, rest),
        None => vec![],
    }
}

/// Finds a restricted valuation agreeing with `pinned` (any finite partial map,
/// not necessarily subformula-closed). Returns the first such valuation in
/// canonical row order.
pub fn complete(logic: Logic, pinned: &HashMap<Formula, Snapshot>) -> Result<Valuation, ExtensionError> {
    let keys: Vec<Formula> = pinned.keys().cloned().collect();
    for (f, &v) in pinned {
        if v.n() != logic.n() {
            return Err(ExtensionError::Domain { formula: f.clone(), value: v, logic });
        }
    }
    let columns = ordered_subformulas_of(&keys);
    let plan = Plan::new(logic, columns).map_err(|f| Violation::Signature { formula: f, logic })?;
    let pins: Vec<ValueSet> = plan
        .columns()
        .iter()
        .map(|f| pinned.get(f).map_or(plan.algebra().all(), |&v| ValueSet::single(v)))
        .collect();
    let row = plan.first_row(&pins).ok_or(ExtensionError::Unsatisfiable)?;
    let values = row.into_iter().map(|i| Snapshot::from_index(logic.n(), i as usize)).collect();
    Ok(Valuation::from_parts(plan.algebra_arc(), plan.columns().to_vec(), values))
}
