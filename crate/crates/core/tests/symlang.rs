use std::collections::BTreeSet;

use proptest::prelude::*;
use tdm_core::symlang::{
    apply, ground, initial_state, parse_domain, ActionDescription, ActionSymbol, CausalLaw,
    Dynamics, FluentAtom, SymbolicState,
};

fn domain(name: &str) -> ActionDescription {
    let path = format!("{}/../../domains/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_domain(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Successor by candidate checking: s' is a successor of s under a when it
/// equals the static closure of the direct effects plus the inertial literals
/// it shares with s. Only valid for domains without default laws.
fn reference_successor(d: &ActionDescription, s: &[bool], a: &str) -> Option<Vec<bool>> {
    let idx = |f: &str| d.fluent_index(f).unwrap();
    let holds = |c: &[FluentAtom], v: &[bool]| c.iter().all(|x| v[idx(&x.fluent)] == x.value);
    let mut inertial = BTreeSet::new();
    for law in &d.laws {
        match law {
            CausalLaw::Nonexecutable { action, conditions }
                if action.0 == a && holds(conditions, s) =>
            {
                return None;
            }
            CausalLaw::Inertial { fluent } => {
                inertial.insert(idx(fluent));
            }
            CausalLaw::Default { .. } => panic!("reference interpreter does not handle defaults"),
            _ => {}
        }
    }
    let effects: Vec<(usize, bool)> = d
        .laws
        .iter()
        .filter_map(|l| match l {
            CausalLaw::Dynamic {
                action,
                head,
                conditions,
            } if action.0 == a && holds(conditions, s) => Some((idx(&head.fluent), head.value)),
            _ => None,
        })
        .collect();
    let n = d.fluents.len();
    let mut found = Vec::new();
    for bits in 0u32..(1 << n) {
        let cand: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
        let mut known: Vec<Option<bool>> = vec![None; n];
        let mut ok = true;
        let assign = |known: &mut Vec<Option<bool>>, f: usize, v: bool| match known[f] {
            Some(w) if w != v => false,
            _ => {
                known[f] = Some(v);
                true
            }
        };
        for &(f, v) in &effects {
            ok &= assign(&mut known, f, v);
        }
        for &f in &inertial {
            if cand[f] == s[f] {
                ok &= assign(&mut known, f, s[f]);
            }
        }
        loop {
            let mut changed = false;
            for law in &d.laws {
                if let CausalLaw::Static { head, conditions } = law {
                    let fire = conditions
                        .iter()
                        .all(|c| known[idx(&c.fluent)] == Some(c.value));
                    let h = idx(&head.fluent);
                    if fire && known[h] != Some(head.value) {
                        ok &= assign(&mut known, h, head.value);
                        changed = true;
                    }
                }
            }
            if !changed || !ok {
                break;
            }
        }
        if ok && known.iter().zip(&cand).all(|(k, &c)| *k == Some(c)) {
            found.push(cand);
        }
    }
    assert!(
        found.len() <= 1,
        "nondeterministic reference successor for {a}"
    );
    found.pop()
}

fn state_of(d: &ActionDescription, atoms: &[(&str, bool)]) -> SymbolicState {
    let mut v = vec![false; d.fluents.len()];
    for (f, b) in atoms {
        v[d.fluent_index(f).unwrap()] = *b;
    }
    SymbolicState::from_values(v)
}

#[test]
fn gridworld_grab_sets_grabbed_and_keeps_the_rest() {
    let d = domain("gridworld.bc");
    let s = state_of(&d, &[("at_door", true)]);
    let next = apply(&d, &s, "grab").unwrap().unwrap();
    let want = state_of(&d, &[("at_door", true), ("grabbed", true)]);
    assert_eq!(next, want);
    assert_eq!(
        reference_successor(&d, s.values(), "grab"),
        Some(want.values().to_vec())
    );
}

#[test]
fn shipped_domains_agree_with_reference_interpreter() {
    for name in ["taxi.bc", "gridworld.bc", "montezuma.bc"] {
        let d = domain(name);
        let ts = ground(&d, &initial_state(&d).unwrap()).unwrap();
        for s in ts.states() {
            for a in &d.actions {
                let got = apply(&d, s, a.as_str())
                    .unwrap()
                    .map(|x| x.values().to_vec());
                let want = reference_successor(&d, s.values(), a.as_str());
                assert_eq!(got, want, "{name}: {} under {a}", s.render_true(&d.fluents));
            }
        }
    }
}

#[test]
fn shipped_domain_sizes() {
    let sizes = [
        ("taxi.bc", 7, 7),
        ("gridworld.bc", 6, 6),
        ("montezuma.bc", 10, 13),
    ];
    for (name, states, transitions) in sizes {
        let d = domain(name);
        let ts = ground(&d, &initial_state(&d).unwrap()).unwrap();
        assert_eq!(
            (ts.state_count(), ts.transitions().len()),
            (states, transitions),
            "{name}"
        );
    }
}

fn atom(n: usize) -> impl Strategy<Value = FluentAtom> {
    (0..n, any::<bool>()).prop_map(|(f, v)| FluentAtom::new(format!("f{f}"), v))
}

fn law(n: usize, m: usize) -> impl Strategy<Value = CausalLaw> {
    let conds = move || {
        prop::sample::subsequence((0..n).collect::<Vec<_>>(), 0..=n.min(2)).prop_flat_map(|fs| {
            prop::collection::vec(any::<bool>(), fs.len()).prop_map(move |vs| {
                fs.iter()
                    .zip(vs)
                    .map(|(f, v)| FluentAtom::new(format!("f{f}"), v))
                    .collect::<Vec<_>>()
            })
        })
    };
    prop_oneof![
        (atom(n), conds()).prop_map(|(head, conditions)| CausalLaw::Static { head, conditions }),
        (0..m, atom(n), conds()).prop_map(|(a, head, conditions)| CausalLaw::Dynamic {
            action: ActionSymbol::new(format!("a{a}")),
            head,
            conditions,
        }),
        (0..m, conds()).prop_map(|(a, conditions)| CausalLaw::Nonexecutable {
            action: ActionSymbol::new(format!("a{a}")),
            conditions,
        }),
        atom(n).prop_map(|head| CausalLaw::Default { head }),
        (0..n).prop_map(|f| CausalLaw::Inertial {
            fluent: format!("f{f}")
        }),
    ]
}

prop_compose! {
    fn description()(n in 1usize..5, m in 1usize..4)
        (laws in prop::collection::vec(law(n, m), 0..10),
         init in prop::collection::vec(any::<bool>(), n),
         n in Just(n), m in Just(m)) -> ActionDescription {
        ActionDescription {
            fluents: (0..n).map(|i| format!("f{i}")).collect(),
            actions: (0..m).map(|i| ActionSymbol::new(format!("a{i}"))).collect(),
            laws,
            initial: Some(init.iter().enumerate().map(|(i, &v)| FluentAtom::new(format!("f{i}"), v)).collect()),
        }
    }
}

proptest! {
    #[test]
    fn text_form_round_trips(d in description()) {
        prop_assert_eq!(parse_domain(&d.to_string()), Ok(d));
    }

    #[test]
    fn grounded_states_satisfy_static_laws(d in description()) {
        let Ok(init) = initial_state(&d) else { return Ok(()) };
        let Ok(ts) = ground(&d, &init) else { return Ok(()) };
        let dy = Dynamics::new(&d);
        for s in ts.states() {
            prop_assert_eq!(dy.static_violation(s), None);
        }
    }

    #[test]
    fn untouched_inertial_fluents_persist(d in description()) {
        let Ok(init) = initial_state(&d) else { return Ok(()) };
        let Ok(ts) = ground(&d, &init) else { return Ok(()) };
        for t in ts.transitions() {
            let a = ts.action_name(t).as_str();
            for (i, f) in d.fluents.iter().enumerate() {
                let touched = d.laws.iter().any(|l| match l {
                    CausalLaw::Dynamic { action, head, .. } => action.0 == a && head.fluent == *f,
                    CausalLaw::Static { head, .. } | CausalLaw::Default { head } => head.fluent == *f,
                    _ => false,
                });
                let inertial = d.laws.iter().any(|l| matches!(l, CausalLaw::Inertial { fluent } if fluent == f));
                if inertial && !touched {
                    prop_assert_eq!(ts.state(t.from).get(i), ts.state(t.to).get(i));
                }
            }
        }
    }

    #[test]
    fn grounding_is_deterministic(d in description()) {
        let Ok(init) = initial_state(&d) else { return Ok(()) };
        prop_assert_eq!(ground(&d, &init), ground(&d, &init));
    }
}
