//! Formula syntax: the shared AST, the abbreviations `α^k`, `α^(k)` and `∼α`,
//! complexity, and the ordered subformula list used as table columns.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

mod parser;

pub use parser::{parse, parse_unchecked, ParseError};

/// Largest `n` accepted for `C_n`. Snapshot sets are stored as 64-bit masks.
pub const MAX_N: u32 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Connective {
    Neg,
    Cons,
    And,
    Or,
    Imp,
}

impl Connective {
    pub const BINARY: [Connective; 3] = [Connective::And, Connective::Or, Connective::Imp];

    pub fn arity(self) -> usize {
        match self {
            Connective::Neg | Connective::Cons => 1,
            _ => 2,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Connective::Neg => "~",
            Connective::Cons => "@",
            Connective::And => "&",
            Connective::Or => "|",
            Connective::Imp => "->",
        }
    }

    /// The classical truth function on first coordinates.
    pub fn boolean(self, a: bool, b: bool) -> bool {
        match self {
            Connective::Neg => !a,
            Connective::Cons => true,
            Connective::And => a && b,
            Connective::Or => a || b,
            Connective::Imp => !a || b,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LogicError {
    #[error("C_n needs 1 <= n <= {MAX_N}, got {0}")]
    BadIndex(u32),
    #[error("unknown logic `{0}` (expected C1..C{MAX_N}, mbCcl or Cila)")]
    Unknown(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Logic {
    Cn(u32),
    MbCcl,
    Cila,
}

impl Logic {
    pub fn cn(n: u32) -> Result<Logic, LogicError> {
        if (1..=MAX_N).contains(&n) {
            Ok(Logic::Cn(n))
        } else {
            Err(LogicError::BadIndex(n))
        }
    }

    /// Snapshot width: `n` for `C_n`, 1 for the three-valued logics.
    pub fn n(self) -> u32 {
        match self {
            Logic::Cn(n) => n,
            Logic::MbCcl | Logic::Cila => 1,
        }
    }

    pub fn has_consistency(self) -> bool {
        !matches!(self, Logic::Cn(_))
    }

    pub fn domain_size(self) -> usize {
        self.n() as usize + 2
    }

    pub fn name(self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Logic::Cn(n) => write!(f, "C{n}"),
            Logic::MbCcl => f.write_str("mbCcl"),
            Logic::Cila => f.write_str("Cila"),
        }
    }
}

impl FromStr for Logic {
    type Err = LogicError;

    fn from_str(s: &str) -> Result<Logic, LogicError> {
        let t = s.trim();
        let lower = t.to_ascii_lowercase();
        match lower.as_str() {
            "mbccl" => return Ok(Logic::MbCcl),
            "cila" => return Ok(Logic::Cila),
            _ => {}
        }
        if let Some(rest) = lower.strip_prefix('c') {
            if let Ok(n) = rest.parse::<u32>() {
                return Logic::cn(n);
            }
        }
        Err(LogicError::Unknown(t.to_string()))
    }
}

/// An immutable, cheaply clonable formula. Subtrees are shared, so `pow(p, 40)`
/// stays small in memory even though its tree is exponential.
#[derive(Clone)]
pub struct Formula(Arc<Node>);

struct Node {
    kind: Kind,
    hash: u64,
    complexity: u64,
    connectives: u64,
    height: u32,
}

#[derive(Clone, PartialEq, Eq)]
pub enum Kind {
    Var(Arc<str>),
    Neg(Formula),
    Cons(Formula),
    And(Formula, Formula),
    Or(Formula, Formula),
    Imp(Formula, Formula),
}

impl Formula {
    fn make(kind: Kind) -> Formula {
        let mut h = DefaultHasher::new();
        let (complexity, connectives, height) = match &kind {
            Kind::Var(name) => {
                0u8.hash(&mut h);
                name.hash(&mut h);
                (0, 0, 0)
            }
            Kind::Neg(a) => {
                1u8.hash(&mut h);
                h.write_u64(a.0.hash);
                (a.complexity() + 1, a.connectives() + 1, a.height() + 1)
            }
            Kind::Cons(a) => {
                2u8.hash(&mut h);
                h.write_u64(a.0.hash);
                (a.complexity() + 2, a.connectives() + 1, a.height() + 1)
            }
            Kind::And(a, b) | Kind::Or(a, b) | Kind::Imp(a, b) => {
                let tag: u8 = match &kind {
                    Kind::And(..) => 3,
                    Kind::Or(..) => 4,
                    _ => 5,
                };
                tag.hash(&mut h);
                h.write_u64(a.0.hash);
                h.write_u64(b.0.hash);
                (
                    a.complexity() + b.complexity() + 1,
                    a.connectives() + b.connectives() + 1,
                    a.height().max(b.height()) + 1,
                )
            }
        };
        Formula(Arc::new(Node {
            kind,
            hash: h.finish(),
            complexity,
            connectives,
            height,
        }))
    }

    pub fn var(name: &str) -> Formula {
        Formula::make(Kind::Var(Arc::from(name)))
    }

    pub fn neg(a: Formula) -> Formula {
        Formula::make(Kind::Neg(a))
    }

    pub fn cons(a: Formula) -> Formula {
        Formula::make(Kind::Cons(a))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::make(Kind::And(a, b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::make(Kind::Or(a, b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::make(Kind::Imp(a, b))
    }

    pub fn unary(c: Connective, a: Formula) -> Formula {
        match c {
            Connective::Neg => Formula::neg(a),
            Connective::Cons => Formula::cons(a),
            _ => panic!("{c:?} is not unary"),
        }
    }

    pub fn binary(c: Connective, a: Formula, b: Formula) -> Formula {
        match c {
            Connective::And => Formula::and(a, b),
            Connective::Or => Formula::or(a, b),
            Connective::Imp => Formula::imp(a, b),
            _ => panic!("{c:?} is not binary"),
        }
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    pub fn connective(&self) -> Option<Connective> {
        match self.kind() {
            Kind::Var(_) => None,
            Kind::Neg(_) => Some(Connective::Neg),
            Kind::Cons(_) => Some(Connective::Cons),
            Kind::And(..) => Some(Connective::And),
            Kind::Or(..) => Some(Connective::Or),
            Kind::Imp(..) => Some(Connective::Imp),
        }
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self.kind() {
            Kind::Var(_) => vec![],
            Kind::Neg(a) | Kind::Cons(a) => vec![a],
            Kind::And(a, b) | Kind::Or(a, b) | Kind::Imp(a, b) => vec![a, b],
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self.kind(), Kind::Var(_))
    }

    pub fn atom_name(&self) -> Option<&str> {
        match self.kind() {
            Kind::Var(n) => Some(n),
            _ => None,
        }
    }

    pub fn complexity(&self) -> u64 {
        self.0.complexity
    }

    /// Number of connective occurrences in the tree.
    pub fn connectives(&self) -> u64 {
        self.0.connectives
    }

    pub fn height(&self) -> u32 {
        self.0.height
    }

    pub fn ptr_eq(&self, other: &Formula) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn uses_consistency(&self) -> bool {
        self.subformulas().iter().any(|f| matches!(f.kind(), Kind::Cons(_)))
    }

    /// Distinct subformulas, children before parents.
    pub fn subformulas(&self) -> Vec<Formula> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        collect_subformulas(self, &mut seen, &mut out);
        out
    }

    /// Distinct atoms, sorted by name.
    pub fn atoms(&self) -> Vec<Formula> {
        let mut atoms: Vec<Formula> = self.subformulas().into_iter().filter(Formula::is_atom).collect();
        atoms.sort_by(|a, b| a.atom_name().cmp(&b.atom_name()));
        atoms
    }

    /// `Some(α)` when the formula is literally `α ∧ ¬α`.
    pub fn as_contradiction(&self) -> Option<&Formula> {
        match self.kind() {
            Kind::And(a, b) => match b.kind() {
                Kind::Neg(c) if c == a => Some(a),
                _ => None,
            },
            _ => None,
        }
    }

    /// `Some(α)` when the formula is literally `α¹ = ¬(α ∧ ¬α)`.
    pub fn as_pow1(&self) -> Option<&Formula> {
        match self.kind() {
            Kind::Neg(a) => a.as_contradiction(),
            _ => None,
        }
    }

    pub fn is_pow1_of(&self, alpha: &Formula) -> bool {
        self.as_pow1().is_some_and(|a| a == alpha)
    }

    /// `Some((α, r))`, `r ≥ 2`, when the formula is literally
    /// `α^(r) = α¹ ∧ α² ∧ ... ∧ α^r`, conjunctions to the left.
    pub fn as_powseq(&self) -> Option<(&Formula, u32)> {
        let mut spine = vec![];
        let mut f = self;
        while let Kind::And(a, b) = f.kind() {
            spine.push(b);
            f = a;
        }
        let alpha = f.as_pow1()?;
        let mut prev = f;
        for c in spine.iter().rev() {
            if !c.is_pow1_of(prev) {
                return None;
            }
            prev = c;
        }
        (!spine.is_empty()).then(|| (alpha, spine.len() as u32 + 1))
    }

    /// Maximal decomposition `self = base^k`.
    pub fn power_decomposition(&self) -> (&Formula, u32) {
        let mut f = self;
        let mut k = 0;
        while let Some(a) = f.as_pow1() {
            f = a;
            k += 1;
        }
        (f, k)
    }

    /// Replaces atoms by formulas; atoms missing from `map` are kept.
    pub fn substitute(&self, map: &dyn Fn(&str) -> Option<Formula>) -> Formula {
        let mut memo = std::collections::HashMap::new();
        substitute_memo(self, map, &mut memo)
    }

    pub fn to_unicode(&self) -> String {
        let mut s = String::new();
        write_formula(self, &mut s, true, 0);
        s
    }
}

fn collect_subformulas(f: &Formula, seen: &mut HashSet<Formula>, out: &mut Vec<Formula>) {
    if seen.contains(f) {
        return;
    }
    for c in f.children() {
        collect_subformulas(c, seen, out);
    }
    seen.insert(f.clone());
    out.push(f.clone());
}

fn substitute_memo(
    f: &Formula,
    map: &dyn Fn(&str) -> Option<Formula>,
    memo: &mut std::collections::HashMap<Formula, Formula>,
) -> Formula {
    if let Some(r) = memo.get(f) {
        return r.clone();
    }
    let r = match f.kind() {
        Kind::Var(n) => map(n).unwrap_or_else(|| f.clone()),
        Kind::Neg(a) => Formula::neg(substitute_memo(a, map, memo)),
        Kind::Cons(a) => Formula::cons(substitute_memo(a, map, memo)),
        Kind::And(a, b) => Formula::and(substitute_memo(a, map, memo), substitute_memo(b, map, memo)),
        Kind::Or(a, b) => Formula::or(substitute_memo(a, map, memo), substitute_memo(b, map, memo)),
        Kind::Imp(a, b) => Formula::imp(substitute_memo(a, map, memo), substitute_memo(b, map, memo)),
    };
    memo.insert(f.clone(), r.clone());
    r
}

impl PartialEq for Formula {
    fn eq(&self, other: &Formula) -> bool {
        self.ptr_eq(other)
            || (self.0.hash == other.0.hash
                && self.0.complexity == other.0.complexity
                && self.0.kind == other.0.kind)
    }
}

impl Eq for Formula {}

impl Hash for Formula {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

// Precedence levels used by the printer: higher binds tighter.
const PREC_IMP: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_PREFIX: u8 = 4;

fn write_formula(f: &Formula, out: &mut String, unicode: bool, ctx: u8) {
    let sym = |c: Connective| -> &'static str {
        if unicode {
            match c {
                Connective::Neg => "¬",
                Connective::Cons => "∘",
                Connective::And => " ∧ ",
                Connective::Or => " ∨ ",
                Connective::Imp => " → ",
            }
        } else {
            match c {
                Connective::Neg => "~",
                Connective::Cons => "@",
                Connective::And => " & ",
                Connective::Or => " | ",
                Connective::Imp => " -> ",
            }
        }
    };
    match f.kind() {
        Kind::Var(n) => out.push_str(n),
        Kind::Neg(a) | Kind::Cons(a) => {
            out.push_str(sym(f.connective().unwrap()));
            write_formula(a, out, unicode, PREC_PREFIX);
        }
        Kind::And(a, b) | Kind::Or(a, b) | Kind::Imp(a, b) => {
            let c = f.connective().unwrap();
            let prec = match c {
                Connective::And => PREC_AND,
                Connective::Or => PREC_OR,
                _ => PREC_IMP,
            };
            let paren = prec < ctx;
            if paren {
                out.push('(');
            }
            // & and | associate to the left, -> to the right.
            let (lp, rp) = if c == Connective::Imp { (prec + 1, prec) } else { (prec, prec + 1) };
            write_formula(a, out, unicode, lp);
            out.push_str(sym(c));
            write_formula(b, out, unicode, rp);
            if paren {
                out.push(')');
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_formula(self, &mut s, false, 0);
        f.write_str(&s)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

impl Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Formula, D::Error> {
        let s = String::deserialize(d)?;
        parse_unchecked(&s).map_err(serde::de::Error::custom)
    }
}

/// `α^k`: `α^0 = α`, `α^{k+1} = ¬(α^k ∧ ¬α^k)`.
pub fn pow(phi: &Formula, k: u32) -> Formula {
    let mut f = phi.clone();
    for _ in 0..k {
        f = Formula::neg(Formula::and(f.clone(), Formula::neg(f)));
    }
    f
}

/// `α^(k)`: `α^(0) = α`, `α^(1) = α^1`, `α^(k+1) = α^(k) ∧ α^{k+1}`.
pub fn powseq(phi: &Formula, k: u32) -> Formula {
    if k == 0 {
        return phi.clone();
    }
    let mut acc = pow(phi, 1);
    let mut p = acc.clone();
    for _ in 1..k {
        p = Formula::neg(Formula::and(p.clone(), Formula::neg(p)));
        acc = Formula::and(acc, p.clone());
    }
    acc
}

/// Strong negation `∼α = ¬α ∧ α^(n)`.
pub fn strong_neg(phi: &Formula, n: u32) -> Formula {
    Formula::and(Formula::neg(phi.clone()), powseq(phi, n))
}

/// All subformulas of the goal and premises, deduplicated, sorted by complexity
/// and then by printed form.
pub fn ordered_subformulas(goal: &Formula, premises: &[Formula]) -> Vec<Formula> {
    let mut seen = HashSet::new();
    let mut all = Vec::new();
    for f in premises.iter().chain(std::iter::once(goal)) {
        collect_subformulas(f, &mut seen, &mut all);
    }
    let mut keyed: Vec<(u64, String, Formula)> =
        all.into_iter().map(|f| (f.complexity(), f.to_string(), f)).collect();
    keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    keyed.into_iter().map(|(_, _, f)| f).collect()
}
