//! LTL formulas and their evaluation on lasso words.
//!
//! Syntax: `true`, `false`, atoms (`[a-z_][a-zA-Z0-9_]*`), `!`, `X`, `F`,
//! `G`, `U`, `&`/`&&`, `|`/`||`, `->`, parentheses. Precedence from
//! tightest: unary operators, `U` (right-associative), `&`, `|`, `->`
//! (right-associative). Derived operators are rewritten into the core
//! connectives `¬`, `∨`, `X`, `U`:
//! `a & b = !(!a | !b)`, `a -> b = !a | b`, `F a = true U a`,
//! `G a = !F !a`, `false = !true`.

use thiserror::Error;

use super::lasso::Lasso;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ltl {
    True,
    Atom(String),
    Not(Box<Ltl>),
    Or(Box<Ltl>, Box<Ltl>),
    Next(Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
}

#[derive(Debug, Error, PartialEq)]
#[error("LTL syntax error at column {col}: {msg}")]
pub struct LtlError {
    pub col: usize,
    pub msg: String,
}

impl Ltl {
    pub fn atom(name: &str) -> Ltl {
        Ltl::Atom(name.to_string())
    }

    pub fn not(f: Ltl) -> Ltl {
        Ltl::Not(Box::new(f))
    }

    pub fn or(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Ltl, b: Ltl) -> Ltl {
        Ltl::not(Ltl::or(Ltl::not(a), Ltl::not(b)))
    }

    pub fn implies(a: Ltl, b: Ltl) -> Ltl {
        Ltl::or(Ltl::not(a), b)
    }

    pub fn next(f: Ltl) -> Ltl {
        Ltl::Next(Box::new(f))
    }

    pub fn until(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Until(Box::new(a), Box::new(b))
    }

    pub fn eventually(f: Ltl) -> Ltl {
        Ltl::until(Ltl::True, f)
    }

    pub fn always(f: Ltl) -> Ltl {
        Ltl::not(Ltl::eventually(Ltl::not(f)))
    }

    pub fn falsum() -> Ltl {
        Ltl::not(Ltl::True)
    }

    /// Atoms occurring in the formula, in order of first occurrence.
    pub fn atoms(&self) -> Vec<String> {
        fn go(f: &Ltl, out: &mut Vec<String>) {
            match f {
                Ltl::True => {}
                Ltl::Atom(a) => {
                    if !out.contains(a) {
                        out.push(a.clone());
                    }
                }
                Ltl::Not(a) | Ltl::Next(a) => go(a, out),
                Ltl::Or(a, b) | Ltl::Until(a, b) => {
                    go(a, out);
                    go(b, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Sym(&'static str),
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, LtlError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let sym = ["->", "&&", "||", "!", "&", "|", "(", ")"]
            .into_iter()
            .find(|s| two.starts_with(s))
            .ok_or_else(|| LtlError {
                col,
                msg: format!("unexpected character `{c}`"),
            })?;
        i += sym.len();
        let sym = match sym {
            "&&" => "&",
            "||" => "|",
            s => s,
        };
        out.push((Tok::Sym(sym), col));
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn col(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, LtlError> {
        Err(LtlError {
            col: self.col(),
            msg: msg.into(),
        })
    }

    fn implies(&mut self) -> Result<Ltl, LtlError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Sym("->") {
            self.bump();
            return Ok(Ltl::implies(lhs, self.implies()?));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Ltl, LtlError> {
        let mut f = self.and()?;
        while *self.peek() == Tok::Sym("|") {
            self.bump();
            f = Ltl::or(f, self.and()?);
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<Ltl, LtlError> {
        let mut f = self.until()?;
        while *self.peek() == Tok::Sym("&") {
            self.bump();
            f = Ltl::and(f, self.until()?);
        }
        Ok(f)
    }

    fn until(&mut self) -> Result<Ltl, LtlError> {
        let lhs = self.unary()?;
        if *self.peek() == Tok::Ident("U".into()) {
            self.bump();
            return Ok(Ltl::until(lhs, self.until()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Ltl, LtlError> {
        let col = self.col();
        match self.bump() {
            Tok::Sym("!") => Ok(Ltl::not(self.unary()?)),
            Tok::Sym("(") => {
                let f = self.implies()?;
                if *self.peek() != Tok::Sym(")") {
                    return self.fail("expected `)`");
                }
                self.bump();
                Ok(f)
            }
            Tok::Ident(s) => match s.as_str() {
                "X" => Ok(Ltl::next(self.unary()?)),
                "F" => Ok(Ltl::eventually(self.unary()?)),
                "G" => Ok(Ltl::always(self.unary()?)),
                "U" => Err(LtlError {
                    col,
                    msg: "`U` needs a left operand".into(),
                }),
                "true" => Ok(Ltl::True),
                "false" => Ok(Ltl::falsum()),
                _ => Ok(Ltl::Atom(s)),
            },
            Tok::End => Err(LtlError {
                col,
                msg: "unexpected end of formula".into(),
            }),
            Tok::Sym(s) => Err(LtlError {
                col,
                msg: format!("unexpected `{s}`"),
            }),
        }
    }
}

pub fn parse_ltl(text: &str) -> Result<Ltl, LtlError> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let f = p.implies()?;
    if *p.peek() != Tok::End {
        return p.fail("unexpected trailing input");
    }
    Ok(f)
}

/// Truth values of `f` at every position of the lasso buffer.
fn eval_positions(f: &Ltl, ap: &[String], w: &Lasso) -> Vec<bool> {
    let n = w.len();
    match f {
        Ltl::True => vec![true; n],
        Ltl::Atom(a) => match ap.iter().position(|x| x == a) {
            Some(bit) => (0..n).map(|i| w.letter(i) >> bit & 1 == 1).collect(),
            None => vec![false; n],
        },
        Ltl::Not(g) => eval_positions(g, ap, w).into_iter().map(|b| !b).collect(),
        Ltl::Or(a, b) => {
            let (x, y) = (eval_positions(a, ap, w), eval_positions(b, ap, w));
            x.iter().zip(&y).map(|(p, q)| *p || *q).collect()
        }
        Ltl::Next(g) => {
            let x = eval_positions(g, ap, w);
            (0..n).map(|i| x[w.next(i)]).collect()
        }
        Ltl::Until(a, b) => {
            let (x, y) = (eval_positions(a, ap, w), eval_positions(b, ap, w));
            // least fixpoint of v = y ∨ (x ∧ X v)
            let mut v = vec![false; n];
            loop {
                let mut changed = false;
                for i in (0..n).rev() {
                    let nv = y[i] || (x[i] && v[w.next(i)]);
                    if nv != v[i] {
                        v[i] = nv;
                        changed = true;
                    }
                }
                if !changed {
                    return v;
                }
            }
        }
    }
}

/// Whether `prefix · cycle^ω` satisfies `f`. Bit `i` of a letter is the
/// truth of `ap[i]`; atoms not in `ap` never hold.
pub fn eval_ltl_lasso(f: &Ltl, ap: &[String], w: &Lasso) -> bool {
    eval_positions(f, ap, w)[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ap(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn precedence() {
        let f = parse_ltl("F G g0 | F G g1 & G !b").unwrap();
        let g = parse_ltl("(F G g0) | ((F G g1) & (G !b))").unwrap();
        assert_eq!(f, g);
        let phi = parse_ltl("(F G g0 | F G g1) & G !b").unwrap();
        assert_ne!(f, phi);
        assert_eq!(parse_ltl("a U b U c").unwrap(), parse_ltl("a U (b U c)").unwrap());
        assert_eq!(parse_ltl("a -> b -> c").unwrap(), parse_ltl("a -> (b -> c)").unwrap());
        assert_eq!(parse_ltl("!a U b").unwrap(), parse_ltl("(!a) U b").unwrap());
        assert_eq!(parse_ltl("a && b || c").unwrap(), parse_ltl("(a & b) | c").unwrap());
    }

    #[test]
    fn derived_operators_normalize() {
        assert_eq!(parse_ltl("true").unwrap(), Ltl::True);
        assert_eq!(parse_ltl("false").unwrap(), Ltl::not(Ltl::True));
        assert_eq!(
            parse_ltl("G a").unwrap(),
            Ltl::not(Ltl::until(Ltl::True, Ltl::not(Ltl::atom("a"))))
        );
        let slalom = parse_ltl("G (p -> X G !q) & G (q -> X G !p)").unwrap();
        assert_eq!(slalom.atoms(), vec!["p", "q"]);
    }

    #[test]
    fn syntax_errors_have_columns() {
        assert_eq!(parse_ltl("a &").unwrap_err().col, 4);
        assert_eq!(parse_ltl("(a | b").unwrap_err().col, 7);
        assert_eq!(parse_ltl("a $ b").unwrap_err().col, 3);
        assert!(parse_ltl("U a").is_err());
        assert!(parse_ltl("a b").is_err());
    }

    #[test]
    fn lasso_evaluation() {
        let names = ap(&["a"]);
        let g_a = parse_ltl("G a").unwrap();
        assert!(eval_ltl_lasso(&g_a, &names, &Lasso::new(vec![], vec![1])));
        assert!(!eval_ltl_lasso(&g_a, &names, &Lasso::new(vec![1, 0], vec![1])));
        let gf = parse_ltl("G F a").unwrap();
        assert!(eval_ltl_lasso(&gf, &names, &Lasso::new(vec![0], vec![0, 0, 1])));
        assert!(!eval_ltl_lasso(&gf, &names, &Lasso::new(vec![1], vec![0])));
        let x = parse_ltl("X X a").unwrap();
        assert!(eval_ltl_lasso(&x, &names, &Lasso::new(vec![0], vec![0, 1])));
        assert!(!eval_ltl_lasso(&x, &names, &Lasso::new(vec![0], vec![1, 0])));
    }

    #[test]
    fn until_needs_its_goal() {
        let names = ap(&["a", "b"]);
        let f = parse_ltl("a U b").unwrap();
        // a forever, never b
        assert!(!eval_ltl_lasso(&f, &names, &Lasso::new(vec![], vec![0b01])));
        assert!(eval_ltl_lasso(&f, &names, &Lasso::new(vec![0b01, 0b01], vec![0b10])));
        assert!(!eval_ltl_lasso(&f, &names, &Lasso::new(vec![0b01, 0b00], vec![0b10])));
    }

    #[test]
    fn paper_objectives_on_small_words() {
        // letters over (b, g0, g1)
        let names = ap(&["b", "g0", "g1"]);
        let phi = parse_ltl("(F G g0 | F G g1) & G !b").unwrap();
        assert!(eval_ltl_lasso(&phi, &names, &Lasso::new(vec![0], vec![0b010])));
        assert!(!eval_ltl_lasso(&phi, &names, &Lasso::new(vec![0, 0b001], vec![0b010])));
        let names = ap(&["b", "g"]);
        let psi = parse_ltl("G !b & G F g").unwrap();
        assert!(!eval_ltl_lasso(&psi, &names, &Lasso::new(vec![0, 0b01], vec![0b10, 0])));
        assert!(eval_ltl_lasso(&psi, &names, &Lasso::new(vec![0], vec![0b10, 0])));
    }
}
