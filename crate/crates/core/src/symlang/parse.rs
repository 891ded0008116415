use std::collections::HashMap;

use thiserror::Error;

use super::{ActionDescription, ActionSymbol, CausalLaw, FluentAtom};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("{line}:{col}: undeclared {kind} `{name}`")]
    Undeclared {
        line: usize,
        col: usize,
        kind: &'static str,
        name: String,
    },
    #[error("{line}:{col}: duplicate declaration of `{name}`")]
    Duplicate {
        line: usize,
        col: usize,
        name: String,
    },
}

const KEYWORDS: &[&str] = &[
    "fluent",
    "action",
    "causes",
    "if",
    "default",
    "inertial",
    "nonexecutable",
    "initial",
    "true",
    "false",
];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Dot,
    Comma,
    Eq,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line = li + 1;
        let body = raw.split('%').next().unwrap_or("");
        let chars: Vec<(usize, char)> = body.char_indices().collect();
        let mut i = 0;
        while i < chars.len() {
            let (_, c) = chars[i];
            let col = body[..chars[i].0].chars().count() + 1;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let tok = match c {
                '.' => Tok::Dot,
                ',' => Tok::Comma,
                '=' => Tok::Eq,
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = chars[i].0;
                    let mut j = i;
                    while j < chars.len()
                        && (chars[j].1.is_ascii_alphanumeric() || chars[j].1 == '_')
                    {
                        j += 1;
                    }
                    let end = if j < chars.len() {
                        chars[j].0
                    } else {
                        body.len()
                    };
                    out.push(Token {
                        tok: Tok::Ident(body[start..end].to_string()),
                        line,
                        col,
                    });
                    i = j;
                    continue;
                }
                other => {
                    return Err(ParseError::Syntax {
                        line,
                        col,
                        msg: format!("unexpected character `{other}`"),
                    })
                }
            };
            out.push(Token { tok, line, col });
            i += 1;
        }
    }
    Ok(out)
}

/// Identifier with its source position, resolved after all declarations are seen.
#[derive(Debug, Clone)]
struct Name {
    text: String,
    line: usize,
    col: usize,
}

#[derive(Debug)]
struct RawAtom {
    fluent: Name,
    value: bool,
}

#[derive(Debug)]
enum RawLaw {
    Static(RawAtom, Vec<RawAtom>),
    Default(RawAtom),
    Dynamic(Name, RawAtom, Vec<RawAtom>),
    Nonexecutable(Name, Vec<RawAtom>),
    Inertial(Name),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end_line: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn peek2(&self) -> Option<&Token> {
        self.toks.get(self.pos + 1)
    }

    fn err_here(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = match self.peek() {
            Some(t) => (t.line, t.col),
            None => (self.end_line, 1),
        };
        ParseError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t.tok == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(ParseError::Syntax {
                line: t.line,
                col: t.col,
                msg: format!("expected {what}, found {}", describe(&t.tok)),
            }),
            None => Err(self.err_here(format!("expected {what}, found end of input"))),
        }
    }

    fn ident(&mut self) -> Result<Name, ParseError> {
        match self.peek().cloned() {
            Some(Token {
                tok: Tok::Ident(s),
                line,
                col,
            }) => {
                if KEYWORDS.contains(&s.as_str()) {
                    return Err(ParseError::Syntax {
                        line,
                        col,
                        msg: format!("keyword `{s}` used as identifier"),
                    });
                }
                self.pos += 1;
                Ok(Name { text: s, line, col })
            }
            Some(t) => Err(ParseError::Syntax {
                line: t.line,
                col: t.col,
                msg: format!("expected identifier, found {}", describe(&t.tok)),
            }),
            None => Err(self.err_here("expected identifier, found end of input")),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Ident(s), .. }) if s == kw)
    }

    fn ident_list(&mut self) -> Result<Vec<Name>, ParseError> {
        let mut names = vec![self.ident()?];
        while matches!(
            self.peek(),
            Some(Token {
                tok: Tok::Comma,
                ..
            })
        ) {
            self.pos += 1;
            names.push(self.ident()?);
        }
        Ok(names)
    }

    fn atom(&mut self) -> Result<RawAtom, ParseError> {
        let fluent = self.ident()?;
        self.expect(Tok::Eq, "`=`")?;
        let value = match self.peek().cloned() {
            Some(Token {
                tok: Tok::Ident(s), ..
            }) if s == "true" || s == "false" => {
                self.pos += 1;
                s == "true"
            }
            Some(t) => {
                return Err(ParseError::Syntax {
                    line: t.line,
                    col: t.col,
                    msg: format!("expected `true` or `false`, found {}", describe(&t.tok)),
                })
            }
            None => return Err(self.err_here("expected `true` or `false`, found end of input")),
        };
        Ok(RawAtom { fluent, value })
    }

    fn atom_list(&mut self) -> Result<Vec<RawAtom>, ParseError> {
        let mut atoms = vec![self.atom()?];
        while matches!(
            self.peek(),
            Some(Token {
                tok: Tok::Comma,
                ..
            })
        ) {
            self.pos += 1;
            atoms.push(self.atom()?);
        }
        Ok(atoms)
    }

    fn opt_conditions(&mut self) -> Result<Vec<RawAtom>, ParseError> {
        if self.is_keyword("if") {
            self.pos += 1;
            self.atom_list()
        } else {
            Ok(Vec::new())
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Dot => "`.`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Eq => "`=`".into(),
    }
}

/// Parse a domain file.
pub fn parse_domain(text: &str) -> Result<ActionDescription, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end_line: text.lines().count().max(1),
    };

    let mut fluent_decls: Vec<Name> = Vec::new();
    let mut action_decls: Vec<Name> = Vec::new();
    let mut raw_laws: Vec<RawLaw> = Vec::new();
    let mut initial: Option<(Name, Vec<RawAtom>)> = None;

    while let Some(first) = p.peek().cloned() {
        let word = match &first.tok {
            Tok::Ident(s) => s.clone(),
            other => {
                return Err(ParseError::Syntax {
                    line: first.line,
                    col: first.col,
                    msg: format!("expected statement, found {}", describe(other)),
                })
            }
        };
        match word.as_str() {
            "fluent" => {
                p.pos += 1;
                fluent_decls.extend(p.ident_list()?);
            }
            "action" => {
                p.pos += 1;
                action_decls.extend(p.ident_list()?);
            }
            "inertial" => {
                p.pos += 1;
                for n in p.ident_list()? {
                    raw_laws.push(RawLaw::Inertial(n));
                }
            }
            "default" => {
                p.pos += 1;
                raw_laws.push(RawLaw::Default(p.atom()?));
            }
            "nonexecutable" => {
                p.pos += 1;
                let a = p.ident()?;
                let conds = p.opt_conditions()?;
                raw_laws.push(RawLaw::Nonexecutable(a, conds));
            }
            "initial" => {
                p.pos += 1;
                let at = Name {
                    text: "initial".into(),
                    line: first.line,
                    col: first.col,
                };
                if initial.is_some() {
                    return Err(ParseError::Duplicate {
                        line: first.line,
                        col: first.col,
                        name: "initial".into(),
                    });
                }
                initial = Some((at, p.atom_list()?));
            }
            _ => match p.peek2().map(|t| t.tok.clone()) {
                Some(Tok::Ident(s)) if s == "causes" => {
                    let a = p.ident()?;
                    p.pos += 1;
                    let head = p.atom()?;
                    let conds = p.opt_conditions()?;
                    raw_laws.push(RawLaw::Dynamic(a, head, conds));
                }
                Some(Tok::Eq) => {
                    let head = p.atom()?;
                    let conds = p.opt_conditions()?;
                    raw_laws.push(RawLaw::Static(head, conds));
                }
                _ => {
                    // Reports keyword misuse or a dangling identifier.
                    p.ident()?;
                    return Err(p.err_here("expected `causes` or `=`"));
                }
            },
        }
        p.expect(Tok::Dot, "`.`")?;
    }

    resolve(fluent_decls, action_decls, raw_laws, initial)
}

#[derive(Clone, Copy, PartialEq)]
enum Sym {
    Fluent,
    Action,
}

fn resolve(
    fluent_decls: Vec<Name>,
    action_decls: Vec<Name>,
    raw_laws: Vec<RawLaw>,
    initial: Option<(Name, Vec<RawAtom>)>,
) -> Result<ActionDescription, ParseError> {
    let mut table: HashMap<String, Sym> = HashMap::new();
    let mut decls: Vec<(&Name, Sym)> = fluent_decls
        .iter()
        .map(|n| (n, Sym::Fluent))
        .chain(action_decls.iter().map(|n| (n, Sym::Action)))
        .collect();
    // Report duplicates at the later of the two positions in the file.
    decls.sort_by_key(|(n, _)| (n.line, n.col));
    for (n, kind) in decls {
        if table.insert(n.text.clone(), kind).is_some() {
            return Err(ParseError::Duplicate {
                line: n.line,
                col: n.col,
                name: n.text.clone(),
            });
        }
    }

    let fluent = |n: &Name| -> Result<String, ParseError> {
        match table.get(&n.text) {
            Some(Sym::Fluent) => Ok(n.text.clone()),
            _ => Err(ParseError::Undeclared {
                line: n.line,
                col: n.col,
                kind: "fluent",
                name: n.text.clone(),
            }),
        }
    };
    let action = |n: &Name| -> Result<ActionSymbol, ParseError> {
        match table.get(&n.text) {
            Some(Sym::Action) => Ok(ActionSymbol(n.text.clone())),
            _ => Err(ParseError::Undeclared {
                line: n.line,
                col: n.col,
                kind: "action",
                name: n.text.clone(),
            }),
        }
    };
    let atom = |a: &RawAtom| -> Result<FluentAtom, ParseError> {
        Ok(FluentAtom {
            fluent: fluent(&a.fluent)?,
            value: a.value,
        })
    };
    let atoms = |list: &[RawAtom]| -> Result<Vec<FluentAtom>, ParseError> {
        let mut out: Vec<FluentAtom> = Vec::with_capacity(list.len());
        for a in list {
            let resolved = atom(a)?;
            if out
                .iter()
                .any(|o| o.fluent == resolved.fluent && o.value != resolved.value)
            {
                return Err(ParseError::Syntax {
                    line: a.fluent.line,
                    col: a.fluent.col,
                    msg: format!("`{}` assigned both true and false", resolved.fluent),
                });
            }
            out.push(resolved);
        }
        Ok(out)
    };

    let mut laws = Vec::with_capacity(raw_laws.len());
    for law in &raw_laws {
        laws.push(match law {
            RawLaw::Static(h, c) => CausalLaw::Static {
                head: atom(h)?,
                conditions: atoms(c)?,
            },
            RawLaw::Default(h) => CausalLaw::Default { head: atom(h)? },
            RawLaw::Dynamic(a, h, c) => CausalLaw::Dynamic {
                action: action(a)?,
                head: atom(h)?,
                conditions: atoms(c)?,
            },
            RawLaw::Nonexecutable(a, c) => CausalLaw::Nonexecutable {
                action: action(a)?,
                conditions: atoms(c)?,
            },
            RawLaw::Inertial(f) => CausalLaw::Inertial { fluent: fluent(f)? },
        });
    }

    let initial = match initial {
        Some((_, list)) => Some(atoms(&list)?),
        None => None,
    };

    Ok(ActionDescription {
        fluents: fluent_decls.into_iter().map(|n| n.text).collect(),
        actions: action_decls
            .into_iter()
            .map(|n| ActionSymbol(n.text))
            .collect(),
        laws,
        initial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symlang::LawKind;

    #[test]
    fn minimal_dynamic_law() {
        let d = parse_domain("fluent at_a. action go. go causes at_a=true.").unwrap();
        assert_eq!(d.fluents, vec!["at_a"]);
        assert_eq!(d.actions.len(), 1);
        assert_eq!(d.laws.len(), 1);
        assert_eq!(d.laws[0].kind(), LawKind::Dynamic);
    }

    #[test]
    fn empty_input_is_empty_description() {
        let d = parse_domain("").unwrap();
        assert!(d.fluents.is_empty() && d.actions.is_empty() && d.laws.is_empty());
        let d = parse_domain("% only a comment\n\n").unwrap();
        assert_eq!(d, ActionDescription::default());
    }

    #[test]
    fn undeclared_action_is_reported_with_position() {
        let err = parse_domain("fluent at_a.\nnonexecutable go if at_a=true.").unwrap_err();
        assert_eq!(
            err,
            ParseError::Undeclared {
                line: 2,
                col: 15,
                kind: "action",
                name: "go".into()
            }
        );
    }

    #[test]
    fn duplicate_declaration() {
        let err = parse_domain("fluent a.\naction a.").unwrap_err();
        assert!(
            matches!(
                err,
                ParseError::Duplicate {
                    line: 2,
                    col: 8,
                    ..
                }
            ),
            "{err:?}"
        );
    }

    #[test]
    fn syntax_errors_carry_line_and_column() {
        let err = parse_domain("fluent a.\nfluent b\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, .. }), "{err:?}");
        let err = parse_domain("fluent a.\na=maybe.").unwrap_err();
        assert!(
            matches!(
                err,
                ParseError::Syntax {
                    line: 2,
                    col: 3,
                    ..
                }
            ),
            "{err:?}"
        );
        let err = parse_domain("fluent a; ").unwrap_err();
        assert!(
            matches!(
                err,
                ParseError::Syntax {
                    line: 1,
                    col: 9,
                    ..
                }
            ),
            "{err:?}"
        );
    }

    #[test]
    fn keyword_cannot_name_a_fluent() {
        assert!(matches!(
            parse_domain("fluent causes."),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn fluent_used_as_action_is_undeclared_action() {
        let err = parse_domain("fluent a. a causes a=true.").unwrap_err();
        assert!(matches!(err, ParseError::Undeclared { kind: "action", .. }));
    }

    #[test]
    fn contradictory_condition_set_rejected() {
        assert!(parse_domain("fluent a, b. b=true if a=true, a=false.").is_err());
    }

    #[test]
    fn all_forms_round_trip() {
        let src = "fluent a, b. action go, stop.\n\
                   inertial a, b.\n\
                   default b=false.\n\
                   go causes a=true if b=false.\n\
                   b=true if a=true, b=false.\n\
                   a=false.\n\
                   nonexecutable stop.\n\
                   nonexecutable go if a=true.\n\
                   initial a=false, b=false.";
        let d = parse_domain(src).unwrap();
        assert_eq!(d.laws.len(), 8);
        let printed = d.to_string();
        assert_eq!(parse_domain(&printed).unwrap(), d);
    }
}
