//! Explicit-state model format.
//!
//! ```text
//! # comment
//! states 3
//! initial 0
//! ap goal,bad
//! state 0 label "start"
//! state 1 label goal
//! state 2 label bad
//! trans 0 go 1/2 1
//! trans 0 go 0.5 2
//! trans 1 stay 1 1
//! trans 2 stay 1 2
//! ```
//!
//! `initial` defaults to 0 and `ap` is optional (propositions mentioned in
//! labels are added automatically). Probabilities are decimals or `n/d`
//! fractions. Product exports add annotation lines `accepting i act`,
//! `rabin i act k fin|inf` and `sink i`; they are returned separately and do
//! not change the MDP.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::{Choice, Mdp, ModelError, Pos};

/// Extra per-choice information carried by product exports.
#[derive(Debug, Clone, PartialEq)]
pub enum Annotation {
    Accepting { state: usize, action: String },
    Rabin { state: usize, action: String, pair: usize, inf: bool },
    Sink { state: usize },
}

#[derive(Debug, Clone)]
pub struct ExplicitModel {
    pub mdp: Mdp,
    pub annotations: Vec<Annotation>,
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> ModelError {
    ModelError::Syntax {
        pos: Pos { line, col },
        msg: msg.into(),
    }
}

/// Parses a probability literal: a decimal number or a fraction `n/d`.
pub fn parse_probability(tok: &str) -> Option<f64> {
    if let Some((n, d)) = tok.split_once('/') {
        let n: f64 = n.trim().parse().ok()?;
        let d: f64 = d.trim().parse().ok()?;
        if d == 0.0 {
            return None;
        }
        Some(n / d)
    } else {
        tok.parse().ok()
    }
}

pub fn parse_explicit(text: &str) -> Result<ExplicitModel, ModelError> {
    let mut num_states: Option<usize> = None;
    let mut initial = 0usize;
    let mut ap: Vec<String> = Vec::new();
    let mut names: Vec<Option<String>> = Vec::new();
    let mut labels: Vec<Vec<usize>> = Vec::new();
    let mut actions: Vec<String> = Vec::new();
    // (state, action) -> target -> probability
    let mut trans: BTreeMap<(usize, usize), BTreeMap<usize, f64>> = BTreeMap::new();
    let mut annotations = Vec::new();

    let ap_index = |ap: &mut Vec<String>, name: &str| -> usize {
        match ap.iter().position(|a| a == name) {
            Some(i) => i,
            None => {
                ap.push(name.to_string());
                ap.len() - 1
            }
        }
    };

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let (line, name) = match line.find('"') {
            Some(i) => {
                let rest = &line[i + 1..];
                let end = rest
                    .find('"')
                    .ok_or_else(|| syntax(line_no, i + 1, "unterminated state name"))?;
                (&line[..i], Some(rest[..end].to_string()))
            }
            None => (line, None),
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let col = raw.find(toks[0]).unwrap_or(0) + 1;
        let need_states = |num: Option<usize>| {
            num.ok_or_else(|| syntax(line_no, col, "`states N` must come first"))
        };
        let index = |tok: &str, n: usize| -> Result<usize, ModelError> {
            let i: usize = tok
                .parse()
                .map_err(|_| syntax(line_no, col, format!("expected state index, got `{tok}`")))?;
            if i >= n {
                return Err(syntax(line_no, col, format!("state {i} out of range 0..{n}")));
            }
            Ok(i)
        };
        match toks[0] {
            "states" => {
                if toks.len() != 2 {
                    return Err(syntax(line_no, col, "expected `states N`"));
                }
                let n: usize = toks[1]
                    .parse()
                    .map_err(|_| syntax(line_no, col, "expected state count"))?;
                num_states = Some(n);
                names = vec![None; n];
                labels = vec![Vec::new(); n];
            }
            "initial" => {
                let n = need_states(num_states)?;
                if toks.len() != 2 {
                    return Err(syntax(line_no, col, "expected `initial i`"));
                }
                initial = index(toks[1], n)?;
            }
            "ap" => {
                for t in toks[1..].iter().flat_map(|t| t.split(',')) {
                    if !t.is_empty() {
                        ap_index(&mut ap, t);
                    }
                }
            }
            "state" => {
                let n = need_states(num_states)?;
                if toks.len() < 2 {
                    return Err(syntax(line_no, col, "expected `state i label ...`"));
                }
                let s = index(toks[1], n)?;
                if toks.len() > 2 {
                    if toks[2] != "label" {
                        return Err(syntax(line_no, col, format!("expected `label`, got `{}`", toks[2])));
                    }
                    for t in toks[3..].iter().flat_map(|t| t.split(',')) {
                        if !t.is_empty() {
                            let i = ap_index(&mut ap, t);
                            labels[s].push(i);
                        }
                    }
                }
                if name.is_some() {
                    names[s] = name;
                }
            }
            "trans" => {
                let n = need_states(num_states)?;
                if toks.len() != 5 {
                    return Err(syntax(line_no, col, "expected `trans i act p j`"));
                }
                let s = index(toks[1], n)?;
                let a = match actions.iter().position(|a| a == toks[2]) {
                    Some(i) => i,
                    None => {
                        actions.push(toks[2].to_string());
                        actions.len() - 1
                    }
                };
                let p = parse_probability(toks[3])
                    .ok_or_else(|| syntax(line_no, col, format!("bad probability `{}`", toks[3])))?;
                let t = index(toks[4], n)?;
                *trans.entry((s, a)).or_default().entry(t).or_insert(0.0) += p;
            }
            "accepting" => {
                let n = need_states(num_states)?;
                if toks.len() != 3 {
                    return Err(syntax(line_no, col, "expected `accepting i act`"));
                }
                annotations.push(Annotation::Accepting {
                    state: index(toks[1], n)?,
                    action: toks[2].to_string(),
                });
            }
            "rabin" => {
                let n = need_states(num_states)?;
                if toks.len() != 5 || !matches!(toks[4], "fin" | "inf") {
                    return Err(syntax(line_no, col, "expected `rabin i act k fin|inf`"));
                }
                annotations.push(Annotation::Rabin {
                    state: index(toks[1], n)?,
                    action: toks[2].to_string(),
                    pair: toks[3]
                        .parse()
                        .map_err(|_| syntax(line_no, col, "expected pair index"))?,
                    inf: toks[4] == "inf",
                });
            }
            "sink" => {
                let n = need_states(num_states)?;
                if toks.len() != 2 {
                    return Err(syntax(line_no, col, "expected `sink i`"));
                }
                annotations.push(Annotation::Sink {
                    state: index(toks[1], n)?,
                });
            }
            other => return Err(syntax(line_no, col, format!("unknown directive `{other}`"))),
        }
    }

    let n = num_states.ok_or_else(|| syntax(1, 1, "missing `states N` header"))?;
    let mut choices: Vec<Vec<Choice>> = vec![Vec::new(); n];
    for ((s, a), dist) in trans {
        choices[s].push(Choice::new(a, dist.into_iter().collect()));
    }
    // keep choices in order of first action declaration
    for cs in &mut choices {
        cs.sort_by_key(|c| c.action);
    }
    let state_names = names
        .into_iter()
        .enumerate()
        .map(|(i, n)| n.unwrap_or_else(|| i.to_string()))
        .collect();
    let mdp = Mdp::new(state_names, actions, choices, ap, labels, initial)?;
    Ok(ExplicitModel { mdp, annotations })
}

/// Writes `m` in the explicit format. Parsing the result yields an
/// isomorphic MDP (state and action order may differ only in action
/// numbering, which follows first use).
pub fn write_explicit(m: &Mdp) -> String {
    write_explicit_annotated(m, &[])
}

pub fn write_explicit_annotated(m: &Mdp, annotations: &[Annotation]) -> String {
    let mut out = String::new();
    writeln!(out, "states {}", m.num_states()).unwrap();
    writeln!(out, "initial {}", m.initial()).unwrap();
    if !m.ap().is_empty() {
        writeln!(out, "ap {}", m.ap().join(",")).unwrap();
    }
    for s in 0..m.num_states() {
        write!(out, "state {s} label {}", m.label_names(s).join(",")).unwrap();
        let name = m.state_name(s);
        if name != s.to_string() {
            write!(out, " \"{name}\"").unwrap();
        }
        out.push('\n');
    }
    for s in 0..m.num_states() {
        for c in m.choices(s) {
            for &(t, p) in &c.dist {
                writeln!(out, "trans {s} {} {p} {t}", m.action_name(c.action)).unwrap();
            }
        }
    }
    for a in annotations {
        match a {
            Annotation::Accepting { state, action } => writeln!(out, "accepting {state} {action}"),
            Annotation::Rabin {
                state,
                action,
                pair,
                inf,
            } => writeln!(
                out,
                "rabin {state} {action} {pair} {}",
                if *inf { "inf" } else { "fin" }
            ),
            Annotation::Sink { state } => writeln!(out, "sink {state}"),
        }
        .unwrap();
    }
    out
}
