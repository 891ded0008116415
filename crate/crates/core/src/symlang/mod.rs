//! Boolean action language: causal laws over fluents and actions, a text
//! format for writing them down, and grounding into a transition system.
//!
//! ```text
//! % comments run to end of line
//! fluent at_a, at_b.
//! action go.
//! inertial at_a, at_b.
//! go causes at_b=true if at_a=true.
//! at_a=false if at_b=true.
//! nonexecutable go if at_b=true.
//! default at_a=true.
//! initial at_a=true.
//! ```

mod ground;
mod parse;
mod semantics;

use std::fmt;

pub use ground::{
    ground, ground_with_cap, GroundError, Transition, TransitionSystem, DEFAULT_STATE_CAP,
};
pub use parse::{parse_domain, ParseError};
pub use semantics::{apply, initial_state, Dynamics, SemanticsError};

/// `fluent = value`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FluentAtom {
    pub fluent: String,
    pub value: bool,
}

impl FluentAtom {
    pub fn new(fluent: impl Into<String>, value: bool) -> Self {
        Self {
            fluent: fluent.into(),
            value,
        }
    }
}

impl fmt::Display for FluentAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.fluent, self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionSymbol(pub String);

impl ActionSymbol {
    pub fn new(name: impl Into<String>) -> Self {
        Self(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ActionSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawKind {
    Static,
    Default,
    Dynamic,
    Nonexecutable,
    Inertial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CausalLaw {
    /// `head if conditions.`
    Static {
        head: FluentAtom,
        conditions: Vec<FluentAtom>,
    },
    /// `default head.`
    Default { head: FluentAtom },
    /// `action causes head if conditions.`
    Dynamic {
        action: ActionSymbol,
        head: FluentAtom,
        conditions: Vec<FluentAtom>,
    },
    /// `nonexecutable action if conditions.`
    Nonexecutable {
        action: ActionSymbol,
        conditions: Vec<FluentAtom>,
    },
    /// `inertial fluent.`
    Inertial { fluent: String },
}

impl CausalLaw {
    pub fn kind(&self) -> LawKind {
        match self {
            CausalLaw::Static { .. } => LawKind::Static,
            CausalLaw::Default { .. } => LawKind::Default,
            CausalLaw::Dynamic { .. } => LawKind::Dynamic,
            CausalLaw::Nonexecutable { .. } => LawKind::Nonexecutable,
            CausalLaw::Inertial { .. } => LawKind::Inertial,
        }
    }

    pub fn trigger(&self) -> Option<&ActionSymbol> {
        match self {
            CausalLaw::Dynamic { action, .. } | CausalLaw::Nonexecutable { action, .. } => {
                Some(action)
            }
            _ => None,
        }
    }

    pub fn head(&self) -> Option<&FluentAtom> {
        match self {
            CausalLaw::Static { head, .. }
            | CausalLaw::Default { head }
            | CausalLaw::Dynamic { head, .. } => Some(head),
            _ => None,
        }
    }

    pub fn conditions(&self) -> &[FluentAtom] {
        match self {
            CausalLaw::Static { conditions, .. }
            | CausalLaw::Dynamic { conditions, .. }
            | CausalLaw::Nonexecutable { conditions, .. } => conditions,
            _ => &[],
        }
    }
}

fn write_conditions(f: &mut fmt::Formatter<'_>, conditions: &[FluentAtom]) -> fmt::Result {
    if conditions.is_empty() {
        return Ok(());
    }
    f.write_str(" if ")?;
    for (i, c) in conditions.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{c}")?;
    }
    Ok(())
}

impl fmt::Display for CausalLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CausalLaw::Static { head, conditions } => {
                write!(f, "{head}")?;
                write_conditions(f, conditions)?;
            }
            CausalLaw::Default { head } => write!(f, "default {head}")?,
            CausalLaw::Dynamic {
                action,
                head,
                conditions,
            } => {
                write!(f, "{action} causes {head}")?;
                write_conditions(f, conditions)?;
            }
            CausalLaw::Nonexecutable { action, conditions } => {
                write!(f, "nonexecutable {action}")?;
                write_conditions(f, conditions)?;
            }
            CausalLaw::Inertial { fluent } => write!(f, "inertial {fluent}")?,
        }
        f.write_str(".")
    }
}

/// A parsed domain: declarations, laws in source order, optional initial state.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ActionDescription {
    pub fluents: Vec<String>,
    pub actions: Vec<ActionSymbol>,
    pub laws: Vec<CausalLaw>,
    pub initial: Option<Vec<FluentAtom>>,
}

impl ActionDescription {
    pub fn fluent_index(&self, name: &str) -> Option<usize> {
        self.fluents.iter().position(|f| f == name)
    }

    pub fn action(&self, name: &str) -> Option<&ActionSymbol> {
        self.actions.iter().find(|a| a.0 == name)
    }
}

/// Canonical text form; `parse_domain(&d.to_string()) == Ok(d)`.
impl fmt::Display for ActionDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for fl in &self.fluents {
            writeln!(f, "fluent {fl}.")?;
        }
        for a in &self.actions {
            writeln!(f, "action {a}.")?;
        }
        for law in &self.laws {
            writeln!(f, "{law}")?;
        }
        if let Some(init) = &self.initial {
            f.write_str("initial ")?;
            for (i, a) in init.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(".\n")?;
        }
        Ok(())
    }
}

/// Complete assignment over a description's fluents, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolicState {
    values: Vec<bool>,
}

impl SymbolicState {
    pub fn from_values(values: Vec<bool>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn get(&self, i: usize) -> bool {
        self.values[i]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn atoms(&self, fluents: &[String]) -> Vec<FluentAtom> {
        fluents
            .iter()
            .zip(&self.values)
            .map(|(f, &v)| FluentAtom::new(f.clone(), v))
            .collect()
    }

    /// `{a=true, b=false}`.
    pub fn render(&self, fluents: &[String]) -> String {
        let parts: Vec<String> = self.atoms(fluents).iter().map(|a| a.to_string()).collect();
        format!("{{{}}}", parts.join(", "))
    }

    /// Only the true fluents, comma separated; `-` if none.
    pub fn render_true(&self, fluents: &[String]) -> String {
        let on: Vec<&str> = fluents
            .iter()
            .zip(&self.values)
            .filter(|(_, &v)| v)
            .map(|(f, _)| f.as_str())
            .collect();
        if on.is_empty() {
            "-".into()
        } else {
            on.join(",")
        }
    }
}
