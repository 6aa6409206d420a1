//! Hilbert axiom schemata, as formula templates over the metavariables
//! `alpha`, `beta`, `gamma`.

use std::collections::HashMap;

use thiserror::Error;

use crate::formula::{parse_unchecked, Formula, Logic};

pub const METAVARIABLES: [&str; 3] = ["alpha", "beta", "gamma"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub name: String,
    pub template: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("schema {schema} needs a formula for {metavariable}")]
    MissingMetavariable { schema: String, metavariable: String },
}

impl Schema {
    fn new(name: impl Into<String>, template: &str) -> Schema {
        Schema { name: name.into(), template: parse_unchecked(template).expect("built-in schema parses") }
    }

    /// Metavariables occurring in the template, in `alpha, beta, gamma` order.
    pub fn metavariables(&self) -> Vec<&'static str> {
        let atoms = self.template.atoms();
        METAVARIABLES.into_iter().filter(|m| atoms.iter().any(|a| a.atom_name() == Some(m))).collect()
    }

    pub fn arity(&self) -> usize {
        self.metavariables().len()
    }

    pub fn instantiate(&self, assignment: &HashMap<String, Formula>) -> Result<Formula, SchemaError> {
        if let Some(m) = self.metavariables().into_iter().find(|m| !assignment.contains_key(*m)) {
            return Err(SchemaError::MissingMetavariable { schema: self.name.clone(), metavariable: m.to_string() });
        }
        Ok(self.template.substitute(&|name| assignment.get(name).cloned()))
    }
}

impl std::fmt::Display for Schema {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.name, self.template)
    }
}

fn positive() -> Vec<Schema> {
    vec![
        Schema::new("Ax1", "alpha -> (beta -> alpha)"),
        Schema::new("Ax2", "(alpha -> (beta -> gamma)) -> ((alpha -> beta) -> (alpha -> gamma))"),
        Schema::new("Ax3", "alpha -> (beta -> (alpha & beta))"),
        Schema::new("Ax4", "(alpha & beta) -> alpha"),
        Schema::new("Ax5", "(alpha & beta) -> beta"),
        Schema::new("Ax6", "alpha -> (alpha | beta)"),
        Schema::new("Ax7", "beta -> (alpha | beta)"),
        Schema::new("Ax8", "(alpha -> gamma) -> ((beta -> gamma) -> ((alpha | beta) -> gamma))"),
        Schema::new("Ax9", "alpha | ~alpha"),
    ]
}

pub fn schemata(logic: Logic) -> Vec<Schema> {
    let mut out = positive();
    let dummett = Schema::new("Dummett", "alpha | (alpha -> beta)");
    match logic {
        Logic::Cn(n) => {
            out.push(Schema::new("Ax10", "~~alpha -> alpha"));
            out.push(Schema::new(format!("bc_{n}"), &format!("alpha^({n}) -> (alpha -> (~alpha -> beta))")));
            out.push(Schema::new(
                format!("dc_{n}"),
                &format!("alpha^({n}) -> ((beta -> alpha) -> ((beta -> ~alpha) -> ~beta))"),
            ));
            out.push(Schema::new(
                format!("P_{n}"),
                &format!(
                    "(alpha^({n}) & beta^({n})) -> ((alpha & beta)^({n}) & (alpha | beta)^({n}) & (alpha -> beta)^({n}))"
                ),
            ));
            out.push(dummett);
        }
        Logic::MbCcl | Logic::Cila => {
            out.push(dummett);
            out.push(Schema::new("bc1", "@alpha -> (alpha -> (~alpha -> beta))"));
            out.push(Schema::new("cl", "~(alpha & ~alpha) -> @alpha"));
            if logic == Logic::Cila {
                out.push(Schema::new("ci", "~@alpha -> (alpha & ~alpha)"));
                out.push(Schema::new("cf", "~~alpha -> alpha"));
                out.push(Schema::new("ca_and", "(@alpha & @beta) -> @(alpha & beta)"));
                out.push(Schema::new("ca_or", "(@alpha & @beta) -> @(alpha | beta)"));
                out.push(Schema::new("ca_imp", "(@alpha & @beta) -> @(alpha -> beta)"));
            }
        }
    }
    out
}

pub fn schema(logic: Logic, name: &str) -> Option<Schema> {
    schemata(logic).into_iter().find(|s| s.name.eq_ignore_ascii_case(name))
}
