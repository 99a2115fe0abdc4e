//! HOA v1 reader and writer.
//!
//! Supported: explicit edge labels, a single initial state, Büchi
//! acceptance (`Inf(i)`, disjunctions of `Inf`, `t`, `f`) and Rabin
//! acceptance (disjunctions of `Fin(i) & Inf(j)`, `Inf(j)` or `Fin(i)`).
//! Acceptance marks on states are moved onto their outgoing edges.
//! The writer always emits transition-based acceptance.

use std::collections::HashMap;
use std::fmt::Write;

use super::{Acceptance, Automaton, AutomatonError, Edge, Guard, RabinPair};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Header(String),
    Ident(String),
    Int(usize),
    Str(String),
    Alias(String),
    Sym(char),
    Body,
    End,
}

fn hoa_err(line: usize, msg: impl Into<String>) -> AutomatonError {
    AutomatonError::Hoa {
        line,
        msg: msg.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, AutomatonError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line) = (0usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c == '/' && chars.get(i + 1) == Some(&'*') {
            i += 2;
            while i + 1 < chars.len() && !(chars[i] == '*' && chars[i + 1] == '/') {
                if chars[i] == '\n' {
                    line += 1;
                }
                i += 1;
            }
            if i + 1 >= chars.len() {
                return Err(hoa_err(line, "unterminated comment"));
            }
            i += 2;
        } else if c == '"' {
            let mut s = String::new();
            i += 1;
            while i < chars.len() && chars[i] != '"' {
                if chars[i] == '\\' && i + 1 < chars.len() {
                    i += 1;
                }
                if chars[i] == '\n' {
                    line += 1;
                }
                s.push(chars[i]);
                i += 1;
            }
            if i >= chars.len() {
                return Err(hoa_err(line, "unterminated string"));
            }
            i += 1;
            out.push((Tok::Str(s), line));
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let n = s.parse().map_err(|_| hoa_err(line, format!("bad integer `{s}`")))?;
            out.push((Tok::Int(n), line));
        } else if c == '-' && chars[i..].starts_with(&['-', '-']) {
            let start = i;
            i += 2;
            while i < chars.len() && (chars[i].is_ascii_alphabetic() || chars[i] == '-') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            match s.as_str() {
                "--BODY--" => out.push((Tok::Body, line)),
                "--END--" => out.push((Tok::End, line)),
                _ => return Err(hoa_err(line, format!("unexpected `{s}`"))),
            }
        } else if c == '@' || c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            i += 1;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '-') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            if c == '@' {
                out.push((Tok::Alias(s[1..].to_string()), line));
            } else if chars.get(i) == Some(&':') {
                i += 1;
                out.push((Tok::Header(s), line));
            } else {
                out.push((Tok::Ident(s), line));
            }
        } else if "!&|()[]{}".contains(c) {
            out.push((Tok::Sym(c), line));
            i += 1;
        } else {
            return Err(hoa_err(line, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
enum AccExpr {
    True,
    False,
    Fin(usize),
    Inf(usize),
    And(Box<AccExpr>, Box<AccExpr>),
    Or(Box<AccExpr>, Box<AccExpr>),
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    aliases: HashMap<String, Guard>,
    num_ap: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn line(&self) -> usize {
        self.toks
            .get(self.at)
            .or(self.toks.last())
            .map_or(1, |&(_, l)| l)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(t, _)| t.clone());
        self.at += 1;
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, AutomatonError> {
        Err(hoa_err(self.line(), msg))
    }

    fn expect_sym(&mut self, c: char) -> Result<(), AutomatonError> {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn int(&mut self) -> Result<usize, AutomatonError> {
        match self.bump() {
            Some(Tok::Int(n)) => Ok(n),
            _ => {
                self.at -= 1;
                self.err("expected an integer")
            }
        }
    }

    fn guard_or(&mut self) -> Result<Guard, AutomatonError> {
        let mut v = vec![self.guard_and()?];
        while self.peek() == Some(&Tok::Sym('|')) {
            self.bump();
            v.push(self.guard_and()?);
        }
        Ok(Guard::or(v))
    }

    fn guard_and(&mut self) -> Result<Guard, AutomatonError> {
        let mut v = vec![self.guard_unary()?];
        while self.peek() == Some(&Tok::Sym('&')) {
            self.bump();
            v.push(self.guard_unary()?);
        }
        Ok(Guard::and(v))
    }

    fn guard_unary(&mut self) -> Result<Guard, AutomatonError> {
        let line = self.line();
        match self.bump() {
            Some(Tok::Sym('!')) => Ok(Guard::not(self.guard_unary()?)),
            Some(Tok::Sym('(')) => {
                let g = self.guard_or()?;
                self.expect_sym(')')?;
                Ok(g)
            }
            Some(Tok::Ident(s)) if s == "t" => Ok(Guard::True),
            Some(Tok::Ident(s)) if s == "f" => Ok(Guard::False),
            Some(Tok::Int(i)) => {
                if i >= self.num_ap {
                    return Err(AutomatonError::UndeclaredAp { line, index: i });
                }
                Ok(Guard::Ap(i))
            }
            Some(Tok::Alias(a)) => self
                .aliases
                .get(&a)
                .cloned()
                .ok_or_else(|| hoa_err(line, format!("unknown alias @{a}"))),
            _ => Err(hoa_err(line, "malformed label expression")),
        }
    }

    fn acc_or(&mut self) -> Result<AccExpr, AutomatonError> {
        let mut e = self.acc_and()?;
        while self.peek() == Some(&Tok::Sym('|')) {
            self.bump();
            e = AccExpr::Or(Box::new(e), Box::new(self.acc_and()?));
        }
        Ok(e)
    }

    fn acc_and(&mut self) -> Result<AccExpr, AutomatonError> {
        let mut e = self.acc_atom()?;
        while self.peek() == Some(&Tok::Sym('&')) {
            self.bump();
            e = AccExpr::And(Box::new(e), Box::new(self.acc_atom()?));
        }
        Ok(e)
    }

    fn acc_atom(&mut self) -> Result<AccExpr, AutomatonError> {
        match self.bump() {
            Some(Tok::Sym('(')) => {
                let e = self.acc_or()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Some(Tok::Ident(s)) if s == "t" => Ok(AccExpr::True),
            Some(Tok::Ident(s)) if s == "f" => Ok(AccExpr::False),
            Some(Tok::Ident(s)) if s == "Inf" || s == "Fin" => {
                self.expect_sym('(')?;
                if self.peek() == Some(&Tok::Sym('!')) {
                    return Err(AutomatonError::UnsupportedAcceptance("negated acceptance set".into()));
                }
                let n = self.int()?;
                self.expect_sym(')')?;
                Ok(if s == "Inf" { AccExpr::Inf(n) } else { AccExpr::Fin(n) })
            }
            _ => {
                self.at -= 1;
                self.err("malformed acceptance condition")
            }
        }
    }
}

fn show_acc(e: &AccExpr) -> String {
    match e {
        AccExpr::True => "t".into(),
        AccExpr::False => "f".into(),
        AccExpr::Fin(n) => format!("Fin({n})"),
        AccExpr::Inf(n) => format!("Inf({n})"),
        AccExpr::And(a, b) => format!("({} & {})", show_acc(a), show_acc(b)),
        AccExpr::Or(a, b) => format!("({} | {})", show_acc(a), show_acc(b)),
    }
}

/// The shape of a supported acceptance condition, in terms of set numbers.
enum AccShape {
    /// Accepting iff one of these sets is visited infinitely often;
    /// `all` means every edge is accepting.
    Buchi { sets: Vec<usize>, all: bool },
    /// Pairs `(fin, inf)`; `None` stands for the empty set (fin) or the set
    /// of all edges (inf).
    Rabin(Vec<(Option<usize>, Option<usize>)>),
}

fn acceptance_shape(e: &AccExpr) -> Result<AccShape, AutomatonError> {
    fn disjuncts<'a>(e: &'a AccExpr, out: &mut Vec<&'a AccExpr>) {
        match e {
            AccExpr::Or(a, b) => {
                disjuncts(a, out);
                disjuncts(b, out);
            }
            _ => out.push(e),
        }
    }
    fn conjuncts<'a>(e: &'a AccExpr, out: &mut Vec<&'a AccExpr>) {
        match e {
            AccExpr::And(a, b) => {
                conjuncts(a, out);
                conjuncts(b, out);
            }
            _ => out.push(e),
        }
    }
    let unsupported = || AutomatonError::UnsupportedAcceptance(show_acc(e));
    match e {
        AccExpr::True => return Ok(AccShape::Buchi { sets: vec![], all: true }),
        AccExpr::False => return Ok(AccShape::Buchi { sets: vec![], all: false }),
        _ => {}
    }
    let mut terms = Vec::new();
    disjuncts(e, &mut terms);
    if terms.iter().all(|t| matches!(t, AccExpr::Inf(_))) {
        let sets = terms
            .iter()
            .map(|t| match t {
                AccExpr::Inf(n) => *n,
                _ => unreachable!(),
            })
            .collect();
        return Ok(AccShape::Buchi { sets, all: false });
    }
    let mut pairs = Vec::new();
    for t in terms {
        let mut atoms = Vec::new();
        conjuncts(t, &mut atoms);
        let (mut fin, mut inf) = (None, None);
        for a in atoms {
            match a {
                AccExpr::Fin(n) if fin.is_none() => fin = Some(*n),
                AccExpr::Inf(n) if inf.is_none() => inf = Some(*n),
                AccExpr::True => {}
                _ => return Err(unsupported()),
            }
        }
        pairs.push((fin, inf));
    }
    Ok(AccShape::Rabin(pairs))
}

/// Parses an HOA v1 automaton.
pub fn parse_hoa(text: &str) -> Result<Automaton, AutomatonError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        aliases: HashMap::new(),
        num_ap: 0,
    };

    let mut name = None;
    let mut num_states: Option<usize> = None;
    let mut start: Option<usize> = None;
    let mut ap: Vec<String> = Vec::new();
    let mut acc: Option<(usize, AccExpr)> = None;
    let mut seen_version = false;

    loop {
        let line = p.line();
        match p.bump() {
            Some(Tok::Body) => break,
            Some(Tok::Header(h)) => match h.as_str() {
                "HOA" => {
                    match p.bump() {
                        Some(Tok::Ident(v)) if v == "v1" => {}
                        _ => return Err(hoa_err(line, "only HOA v1 is supported")),
                    }
                    seen_version = true;
                }
                "name" => match p.bump() {
                    Some(Tok::Str(s)) => name = Some(s),
                    _ => return Err(hoa_err(line, "expected a quoted name")),
                },
                "States" => num_states = Some(p.int()?),
                "Start" => {
                    if start.is_some() {
                        return Err(hoa_err(line, "several initial states are not supported"));
                    }
                    start = Some(p.int()?);
                    if p.peek() == Some(&Tok::Sym('&')) {
                        return Err(hoa_err(line, "conjunctive initial states are not supported"));
                    }
                }
                "AP" => {
                    let n = p.int()?;
                    for _ in 0..n {
                        match p.bump() {
                            Some(Tok::Str(s)) => ap.push(s),
                            _ => return Err(hoa_err(line, format!("AP header declares {n} names"))),
                        }
                    }
                    p.num_ap = n;
                }
                "Alias" => {
                    let Some(Tok::Alias(a)) = p.bump() else {
                        return Err(hoa_err(line, "expected @name after Alias:"));
                    };
                    let g = p.guard_or()?;
                    p.aliases.insert(a, g);
                }
                "Acceptance" => {
                    let n = p.int()?;
                    acc = Some((n, p.acc_or()?));
                }
                _ => {
                    // acc-name, properties, tool, controllable-AP, ...: skipped
                    while matches!(
                        p.peek(),
                        Some(Tok::Ident(_) | Tok::Int(_) | Tok::Str(_) | Tok::Sym(_) | Tok::Alias(_))
                    ) {
                        p.bump();
                    }
                }
            },
            _ => return Err(hoa_err(line, "expected a header or --BODY--")),
        }
    }
    if !seen_version {
        return Err(hoa_err(1, "missing `HOA: v1` header"));
    }
    let (num_sets, acc) = acc.ok_or_else(|| hoa_err(1, "missing Acceptance header"))?;
    let shape = acceptance_shape(&acc)?;

    let mut state_names: Vec<Option<String>> = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut marks: Vec<Vec<usize>> = Vec::new();
    let mut declared = Vec::new();
    let mut current: Option<(usize, Vec<usize>)> = None;
    loop {
        let line = p.line();
        match p.bump() {
            Some(Tok::End) => break,
            Some(Tok::Header(h)) if h == "State" => {
                if p.peek() == Some(&Tok::Sym('[')) {
                    return Err(hoa_err(line, "state labels are not supported"));
                }
                let q = p.int()?;
                if q >= state_names.len() {
                    state_names.resize(q + 1, None);
                }
                if let Some(Tok::Str(_)) = p.peek() {
                    if let Some(Tok::Str(s)) = p.bump() {
                        state_names[q] = Some(s);
                    }
                }
                let sets = set_list(&mut p, num_sets)?;
                declared.push(q);
                current = Some((q, sets));
            }
            Some(Tok::Sym('[')) => {
                let Some((q, ref state_sets)) = current else {
                    return Err(hoa_err(line, "edge outside of a state"));
                };
                let guard = p.guard_or()?;
                p.expect_sym(']')?;
                let dst = p.int()?;
                if p.peek() == Some(&Tok::Sym('&')) {
                    return Err(hoa_err(line, "alternating automata are not supported"));
                }
                let mut sets = set_list(&mut p, num_sets)?;
                sets.extend(state_sets.iter().copied());
                sets.sort_unstable();
                sets.dedup();
                edges.push(Edge { src: q, guard, dst });
                marks.push(sets);
            }
            Some(Tok::Int(_)) => return Err(hoa_err(line, "implicit edge labels are not supported")),
            _ => return Err(hoa_err(line, "malformed body")),
        }
    }
    if p.peek().is_some() {
        return p.err("text after --END--");
    }

    let n = num_states.unwrap_or(0).max(state_names.len()).max(
        edges
            .iter()
            .map(|e| e.dst + 1)
            .chain(start.map(|s| s + 1))
            .max()
            .unwrap_or(0),
    );
    if let Some(count) = num_states {
        if n > count {
            return Err(hoa_err(1, format!("States: {count} but state {} is used", n - 1)));
        }
    }
    let mut seen = vec![false; n];
    for q in declared {
        if std::mem::replace(&mut seen[q], true) {
            return Err(hoa_err(1, format!("state {q} is declared twice")));
        }
    }
    state_names.resize(n, None);
    let state_names = state_names
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.unwrap_or_else(|| i.to_string()))
        .collect();

    let has = |e: usize, set: usize| marks[e].contains(&set);
    let acceptance = match shape {
        AccShape::Buchi { sets, all } => {
            Acceptance::Buchi((0..edges.len()).map(|e| all || sets.iter().any(|&s| has(e, s))).collect())
        }
        AccShape::Rabin(pairs) => Acceptance::Rabin(
            pairs
                .into_iter()
                .map(|(fin, inf)| RabinPair {
                    fin: (0..edges.len()).map(|e| fin.is_some_and(|s| has(e, s))).collect(),
                    inf: (0..edges.len()).map(|e| inf.map_or(true, |s| has(e, s))).collect(),
                })
                .collect(),
        ),
    };
    let a = Automaton::new(ap, state_names, start.unwrap_or(0), edges, acceptance)?;
    Ok(match name {
        Some(nm) => a.with_name(nm),
        None => a,
    })
}

fn set_list(p: &mut Parser, num_sets: usize) -> Result<Vec<usize>, AutomatonError> {
    let mut sets = Vec::new();
    if p.peek() == Some(&Tok::Sym('{')) {
        p.bump();
        while p.peek() != Some(&Tok::Sym('}')) {
            let s = p.int()?;
            if s >= num_sets {
                return p.err(format!("acceptance set {s} not declared"));
            }
            sets.push(s);
        }
        p.bump();
    }
    Ok(sets)
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Writes `a` in HOA v1 with transition-based acceptance. Büchi automata use
/// set 0; Rabin pair `i` uses sets `2i` (Fin) and `2i+1` (Inf).
pub fn print_hoa(a: &Automaton) -> String {
    let mut out = String::new();
    writeln!(out, "HOA: v1").unwrap();
    if let Some(n) = a.name() {
        writeln!(out, "name: {}", quote(n)).unwrap();
    }
    writeln!(out, "States: {}", a.num_states()).unwrap();
    writeln!(out, "Start: {}", a.initial()).unwrap();
    write!(out, "AP: {}", a.ap().len()).unwrap();
    for p in a.ap() {
        write!(out, " {}", quote(p)).unwrap();
    }
    out.push('\n');
    match a.acceptance() {
        Acceptance::Buchi(_) => {
            writeln!(out, "acc-name: Buchi").unwrap();
            writeln!(out, "Acceptance: 1 Inf(0)").unwrap();
        }
        Acceptance::Rabin(pairs) => {
            writeln!(out, "acc-name: Rabin {}", pairs.len()).unwrap();
            let cond: Vec<String> = (0..pairs.len())
                .map(|i| format!("(Fin({})&Inf({}))", 2 * i, 2 * i + 1))
                .collect();
            writeln!(out, "Acceptance: {} {}", 2 * pairs.len(), cond.join("|")).unwrap();
        }
    }
    writeln!(out, "properties: trans-labels explicit-labels trans-acc").unwrap();
    writeln!(out, "--BODY--").unwrap();
    for q in 0..a.num_states() {
        writeln!(out, "State: {} {}", q, quote(a.state_name(q))).unwrap();
        for &e in a.out(q) {
            let edge = a.edge(e);
            let sets: Vec<usize> = match a.acceptance() {
                Acceptance::Buchi(acc) => if acc[e] { vec![0] } else { vec![] },
                Acceptance::Rabin(pairs) => pairs
                    .iter()
                    .enumerate()
                    .flat_map(|(i, p)| {
                        [(p.fin[e], 2 * i), (p.inf[e], 2 * i + 1)]
                            .into_iter()
                            .filter(|&(b, _)| b)
                            .map(|(_, s)| s)
                    })
                    .collect(),
            };
            write!(out, "[{}] {}", edge.guard, edge.dst).unwrap();
            if !sets.is_empty() {
                let s: Vec<String> = sets.iter().map(|s| s.to_string()).collect();
                write!(out, " {{{}}}", s.join(" ")).unwrap();
            }
            out.push('\n');
        }
    }
    writeln!(out, "--END--").unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNIVERSAL: &str = "HOA: v1\nStates: 1\nStart: 0\nAP: 1 \"a\"\nAcceptance: 1 Inf(0)\n\
                             --BODY--\nState: 0\n[t] 0 {0}\n--END--\n";

    #[test]
    fn universal_buchi() {
        let a = parse_hoa(UNIVERSAL).unwrap();
        assert_eq!(a.num_states(), 1);
        assert_eq!(a.buchi_marks(), Some(&[true][..]));
    }

    #[test]
    fn state_based_acceptance_moves_to_edges() {
        let text = "HOA: v1\nStates: 2\nStart: 0\nAP: 1 \"a\"\nacc-name: Buchi\nAcceptance: 1 Inf(0)\n\
                    properties: state-acc\n--BODY--\nState: 0\n[0] 1\n[!0] 0\nState: 1 {0}\n[t] 0\n[0] 1\n--END--\n";
        let a = parse_hoa(text).unwrap();
        assert_eq!(a.buchi_marks(), Some(&[false, false, true, true][..]));
    }

    #[test]
    fn rabin_with_aliases_and_comments() {
        let text = "HOA: v1 /* two pairs */\nStates: 1\nStart: 0\nAP: 2 \"x\" \"y\"\nAlias: @both 0 & 1\n\
                    Acceptance: 4 (Fin(0) & Inf(1)) | (Inf(3) & Fin(2))\n--BODY--\nState: 0 \"q\"\n\
                    [@both] 0 {1 2}\n[!@both] 0 {0 3}\n--END--\n";
        let a = parse_hoa(text).unwrap();
        let Acceptance::Rabin(pairs) = a.acceptance() else {
            panic!("expected Rabin")
        };
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0].fin, vec![false, true]);
        assert_eq!(pairs[0].inf, vec![true, false]);
        assert_eq!(pairs[1].fin, vec![true, false]);
        assert_eq!(pairs[1].inf, vec![false, true]);
        assert!(a.edge(0).guard.eval(0b11));
    }

    #[test]
    fn round_trip() {
        let text = "HOA: v1\nname: \"demo\"\nStates: 2\nStart: 1\nAP: 2 \"a\" \"b\"\nAcceptance: 2 Fin(0) & Inf(1)\n\
                    --BODY--\nState: 0\n[0 & !(1 & 0)] 1 {0}\n[t] 0\nState: 1\n[(0 & 1) & 1] 0 {1}\n[!!0] 1\n--END--\n";
        let a = parse_hoa(text).unwrap();
        let b = parse_hoa(&print_hoa(&a)).unwrap();
        assert_eq!(a, b);
        let c = parse_hoa(UNIVERSAL).unwrap();
        assert_eq!(parse_hoa(&print_hoa(&c)).unwrap(), c);
    }

    #[test]
    fn errors() {
        let with = |acc: &str, body: &str| {
            format!("HOA: v1\nStates: 1\nStart: 0\nAP: 1 \"a\"\nAcceptance: {acc}\n--BODY--\nState: 0\n{body}\n--END--\n")
        };
        assert!(matches!(
            parse_hoa(&with("2 Inf(0) & Inf(1)", "[t] 0")),
            Err(AutomatonError::UnsupportedAcceptance(_))
        ));
        assert!(matches!(
            parse_hoa(&with("1 Inf(!0)", "[t] 0")),
            Err(AutomatonError::UnsupportedAcceptance(_))
        ));
        assert!(matches!(
            parse_hoa(&with("1 Inf(0)", "[1] 0")),
            Err(AutomatonError::UndeclaredAp { index: 1, .. })
        ));
        assert!(parse_hoa(&with("1 Inf(0)", "0")).is_err());
        assert!(parse_hoa(&with("1 Inf(0)", "[t] 0 {3}")).is_err());
        assert!(parse_hoa(&with("1 Inf(0)", "[t] 4")).is_err());
        assert!(parse_hoa("States: 1\n--BODY--\n--END--").is_err());
        assert!(parse_hoa(&with("1 Inf(0)", "[t 0")).is_err());
    }

    #[test]
    fn t_and_f_acceptance() {
        let text = |acc: &str| {
            format!("HOA: v1\nStates: 1\nStart: 0\nAP: 0\nAcceptance: {acc}\n--BODY--\nState: 0\n[t] 0\n--END--\n")
        };
        assert_eq!(parse_hoa(&text("0 t")).unwrap().buchi_marks(), Some(&[true][..]));
        assert_eq!(parse_hoa(&text("0 f")).unwrap().buchi_marks(), Some(&[false][..]));
    }
}
