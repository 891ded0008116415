use std::collections::HashMap;

use thiserror::Error;

use super::{ActionDescription, CausalLaw, FluentAtom, SymbolicState};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("contradiction on fluent `{fluent}` while applying `{context}`")]
    Contradiction { fluent: String, context: String },
    #[error("fluent `{fluent}` is not determined after applying `{context}`")]
    Underdetermined { fluent: String, context: String },
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("unknown fluent `{0}`")]
    UnknownFluent(String),
    #[error("state has {got} values, domain declares {want} fluents")]
    Arity { got: usize, want: usize },
    #[error("domain has no `initial` statement")]
    NoInitial,
    #[error("state violates static law `{0}`")]
    StaticViolation(String),
}

type Cond = Vec<(usize, bool)>;

/// Index-resolved form of an [`ActionDescription`].
#[derive(Debug, Clone)]
pub struct Dynamics {
    fluents: Vec<String>,
    action_names: Vec<String>,
    action_index: HashMap<String, usize>,
    inertial: Vec<bool>,
    defaults: Vec<Option<bool>>,
    statics: Vec<(usize, bool, Cond, String)>,
    effects: Vec<Vec<(usize, bool, Cond)>>,
    blockers: Vec<Vec<Cond>>,
}

#[derive(Clone, Copy, PartialEq, Debug)]
enum Slot {
    Unknown,
    Weak(bool),
    Strong(bool),
}

impl Slot {
    fn value(self) -> Option<bool> {
        match self {
            Slot::Unknown => None,
            Slot::Weak(v) | Slot::Strong(v) => Some(v),
        }
    }
}

fn holds(cond: &Cond, values: &[bool]) -> bool {
    cond.iter().all(|&(f, v)| values[f] == v)
}

impl Dynamics {
    pub fn new(d: &ActionDescription) -> Self {
        let findex: HashMap<&str, usize> = d
            .fluents
            .iter()
            .enumerate()
            .map(|(i, f)| (f.as_str(), i))
            .collect();
        let action_index: HashMap<String, usize> = d
            .actions
            .iter()
            .enumerate()
            .map(|(i, a)| (a.0.clone(), i))
            .collect();
        let n = d.fluents.len();
        let conv = |atoms: &[FluentAtom]| -> Cond {
            atoms
                .iter()
                .map(|a| (findex[a.fluent.as_str()], a.value))
                .collect()
        };
        let mut dy = Dynamics {
            fluents: d.fluents.clone(),
            action_names: d.actions.iter().map(|a| a.0.clone()).collect(),
            action_index,
            inertial: vec![false; n],
            defaults: vec![None; n],
            statics: Vec::new(),
            effects: vec![Vec::new(); d.actions.len()],
            blockers: vec![Vec::new(); d.actions.len()],
        };
        for law in &d.laws {
            match law {
                CausalLaw::Static { head, conditions } => dy.statics.push((
                    findex[head.fluent.as_str()],
                    head.value,
                    conv(conditions),
                    law.to_string(),
                )),
                CausalLaw::Default { head } => {
                    dy.defaults[findex[head.fluent.as_str()]] = Some(head.value)
                }
                CausalLaw::Dynamic {
                    action,
                    head,
                    conditions,
                } => dy.effects[dy.action_index[&action.0]].push((
                    findex[head.fluent.as_str()],
                    head.value,
                    conv(conditions),
                )),
                CausalLaw::Nonexecutable { action, conditions } => {
                    dy.blockers[dy.action_index[&action.0]].push(conv(conditions))
                }
                CausalLaw::Inertial { fluent } => dy.inertial[findex[fluent.as_str()]] = true,
            }
        }
        dy
    }

    pub fn fluent_count(&self) -> usize {
        self.fluents.len()
    }

    pub fn action_count(&self) -> usize {
        self.effects.len()
    }

    pub fn action_id(&self, name: &str) -> Option<usize> {
        self.action_index.get(name).copied()
    }

    /// Static closure over `slots`, per the three-phase scheme: first derive
    /// from strong values only, then let the caller fill weak values, then
    /// close again with weak values overridable.
    fn close(
        &self,
        slots: &mut [Slot],
        strong_only: bool,
        ctx: &str,
    ) -> Result<(), SemanticsError> {
        loop {
            let mut changed = false;
            for (head, val, cond, _) in &self.statics {
                let fires = cond.iter().all(|&(f, v)| match slots[f] {
                    Slot::Strong(x) => x == v,
                    Slot::Weak(x) if !strong_only => x == v,
                    _ => false,
                });
                if !fires {
                    continue;
                }
                match slots[*head] {
                    Slot::Strong(x) if x != *val => {
                        return Err(SemanticsError::Contradiction {
                            fluent: self.fluents[*head].clone(),
                            context: ctx.to_string(),
                        })
                    }
                    Slot::Strong(_) => {}
                    _ => {
                        slots[*head] = Slot::Strong(*val);
                        changed = true;
                    }
                }
            }
            if !changed {
                return Ok(());
            }
        }
    }

    fn finish(&self, mut slots: Vec<Slot>, ctx: &str) -> Result<SymbolicState, SemanticsError> {
        self.close(&mut slots, false, ctx)?;
        let mut values = Vec::with_capacity(slots.len());
        for (i, s) in slots.iter().enumerate() {
            match s.value() {
                Some(v) => values.push(v),
                None => {
                    return Err(SemanticsError::Underdetermined {
                        fluent: self.fluents[i].clone(),
                        context: ctx.to_string(),
                    })
                }
            }
        }
        Ok(SymbolicState { values })
    }

    /// Successor of `s` under action `a`; `Ok(None)` when a nonexecutable law blocks it.
    pub fn apply_id(
        &self,
        s: &SymbolicState,
        a: usize,
    ) -> Result<Option<SymbolicState>, SemanticsError> {
        let ctx = self.action_names[a].as_str();
        if self.blockers[a].iter().any(|c| holds(c, &s.values)) {
            return Ok(None);
        }
        let mut slots = vec![Slot::Unknown; s.values.len()];
        for (head, val, cond) in &self.effects[a] {
            if !holds(cond, &s.values) {
                continue;
            }
            match slots[*head] {
                Slot::Strong(x) if x != *val => {
                    return Err(SemanticsError::Contradiction {
                        fluent: self.fluents[*head].clone(),
                        context: ctx.to_string(),
                    })
                }
                _ => slots[*head] = Slot::Strong(*val),
            }
        }
        self.close(&mut slots, true, ctx)?;
        for (i, slot) in slots.iter_mut().enumerate() {
            if *slot == Slot::Unknown {
                if self.inertial[i] {
                    *slot = Slot::Weak(s.values[i]);
                } else if let Some(v) = self.defaults[i] {
                    *slot = Slot::Weak(v);
                }
            }
        }
        self.finish(slots, ctx).map(Some)
    }

    /// Initial state from explicit atoms; other fluents take their default, else false.
    pub fn initial_from(&self, atoms: &[FluentAtom]) -> Result<SymbolicState, SemanticsError> {
        let mut slots = vec![Slot::Unknown; self.fluents.len()];
        for a in atoms {
            let i = self
                .fluents
                .iter()
                .position(|f| *f == a.fluent)
                .ok_or_else(|| SemanticsError::UnknownFluent(a.fluent.clone()))?;
            slots[i] = Slot::Strong(a.value);
        }
        self.close(&mut slots, true, "initial")?;
        for (i, slot) in slots.iter_mut().enumerate() {
            if *slot == Slot::Unknown {
                *slot = Slot::Weak(self.defaults[i].unwrap_or(false));
            }
        }
        self.finish(slots, "initial")
    }

    /// First static law violated by `s`, if any.
    pub fn static_violation(&self, s: &SymbolicState) -> Option<&str> {
        self.statics
            .iter()
            .find(|(h, v, c, _)| holds(c, &s.values) && s.values[*h] != *v)
            .map(|(_, _, _, text)| text.as_str())
    }
}

/// Apply action `a` in state `s`. `Ok(None)` means the action is inapplicable.
pub fn apply(
    d: &ActionDescription,
    s: &SymbolicState,
    a: &str,
) -> Result<Option<SymbolicState>, SemanticsError> {
    if s.len() != d.fluents.len() {
        return Err(SemanticsError::Arity {
            got: s.len(),
            want: d.fluents.len(),
        });
    }
    let dy = Dynamics::new(d);
    let id = dy
        .action_id(a)
        .ok_or_else(|| SemanticsError::UnknownAction(a.to_string()))?;
    if let Some(law) = dy.static_violation(s) {
        return Err(SemanticsError::StaticViolation(law.to_string()));
    }
    dy.apply_id(s, id)
}

/// The state described by the domain's `initial` statement.
pub fn initial_state(d: &ActionDescription) -> Result<SymbolicState, SemanticsError> {
    let atoms = d.initial.as_ref().ok_or(SemanticsError::NoInitial)?;
    Dynamics::new(d).initial_from(atoms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symlang::parse_domain;

    fn st(v: &[bool]) -> SymbolicState {
        SymbolicState::from_values(v.to_vec())
    }

    #[test]
    fn single_law_effect() {
        let d =
            parse_domain("fluent at_a. action go. inertial at_a. go causes at_a=true.").unwrap();
        assert_eq!(apply(&d, &st(&[false]), "go").unwrap(), Some(st(&[true])));
    }

    #[test]
    fn nonexecutable_blocks() {
        let d =
            parse_domain("fluent at_a. action go. inertial at_a. nonexecutable go if at_a=true.")
                .unwrap();
        assert_eq!(apply(&d, &st(&[true]), "go").unwrap(), None);
        assert_eq!(apply(&d, &st(&[false]), "go").unwrap(), Some(st(&[false])));
    }

    #[test]
    fn opposite_dynamic_heads_contradict() {
        let d =
            parse_domain("fluent a. action go. inertial a. go causes a=true. go causes a=false.")
                .unwrap();
        assert!(matches!(
            apply(&d, &st(&[false]), "go"),
            Err(SemanticsError::Contradiction { .. })
        ));
    }

    #[test]
    fn static_head_against_effect_contradicts() {
        let d = parse_domain(
            "fluent a, b. action go. inertial a, b. go causes a=true. go causes b=true. b=false if a=true.",
        )
        .unwrap();
        assert!(matches!(
            apply(&d, &st(&[false, false]), "go"),
            Err(SemanticsError::Contradiction { .. })
        ));
    }

    #[test]
    fn statics_override_inertia() {
        // Symmetric exclusivity must not trip over the stale inertial value.
        let d = parse_domain(
            "fluent x, y. action to_y. inertial x, y.\n\
             to_y causes y=true.\n\
             x=false if y=true.\n\
             y=false if x=true.",
        )
        .unwrap();
        assert_eq!(
            apply(&d, &st(&[true, false]), "to_y").unwrap(),
            Some(st(&[false, true]))
        );
    }

    #[test]
    fn defaults_fill_non_inertial() {
        let d = parse_domain(
            "fluent a, flash. action go, wait. inertial a. default flash=false. go causes flash=true.",
        )
        .unwrap();
        let s1 = apply(&d, &st(&[true, false]), "go").unwrap().unwrap();
        assert_eq!(s1, st(&[true, true]));
        assert_eq!(apply(&d, &s1, "wait").unwrap(), Some(st(&[true, false])));
    }

    #[test]
    fn free_fluent_is_underdetermined() {
        let d = parse_domain("fluent a, b. action go. inertial a. go causes a=true.").unwrap();
        assert!(matches!(
            apply(&d, &st(&[false, false]), "go"),
            Err(SemanticsError::Underdetermined { .. })
        ));
    }

    #[test]
    fn initial_uses_defaults_and_statics() {
        let d = parse_domain(
            "fluent a, b, c. inertial a, b, c. default c=true. b=true if a=true. initial a=true.",
        )
        .unwrap();
        assert_eq!(initial_state(&d).unwrap(), st(&[true, true, true]));
    }

    #[test]
    fn unknown_action_and_arity() {
        let d = parse_domain("fluent a. action go.").unwrap();
        assert!(matches!(
            apply(&d, &st(&[false]), "jump"),
            Err(SemanticsError::UnknownAction(_))
        ));
        assert!(matches!(
            apply(&d, &st(&[]), "go"),
            Err(SemanticsError::Arity { .. })
        ));
    }
}
