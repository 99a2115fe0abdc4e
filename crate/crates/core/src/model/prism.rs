//! Restricted PRISM language: constants, exactly one module with bounded
//! integer or boolean variables, guarded probabilistic commands, and labels.
//!
//! ```text
//! model    := ["mdp"] { const | module | label }
//! const    := "const" ["int" | "double" | "bool"] IDENT ["=" expr] ";"
//! module   := "module" IDENT { var } { command } "endmodule"
//! var      := IDENT ":" ("[" expr ".." expr "]" | "bool") ["init" expr] ";"
//! command  := "[" [IDENT] "]" expr "->" branch { "+" branch } ";"
//! branch   := [expr ":"] updates
//! updates  := "true" | "(" IDENT "'" "=" expr ")" { "&" "(" IDENT "'" "=" expr ")" }
//! label    := "label" STRING "=" expr ";"
//! expr     := ite;  ite := implies ["?" expr ":" expr]
//! implies  := or {"=>" or};  or := and {"|" and};  and := not {"&" not}
//! not      := "!" not | rel;  rel := add [("="|"!="|"<"|"<="|">"|">=") add]
//! add      := mul {("+"|"-") mul};  mul := unary {("*"|"/") unary}
//! unary    := "-" unary | primary
//! primary  := INT | REAL | "true" | "false" | IDENT | "(" expr ")"
//!           | ("min"|"max"|"floor"|"ceil"|"pow"|"mod") "(" expr {"," expr} ")"
//! ```
//!
//! Comments start with `//`. Constants without a value must be supplied
//! through the override map. The state space is the set of valuations
//! reachable from the initial valuation. Unlabeled commands get the action
//! name `_k`, where `k` is the 1-based position of the command.

use std::collections::{BTreeMap, HashMap, VecDeque};

use super::{Choice, Mdp, ModelError, Pos};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Real(f64),
    Str(String),
    Sym(&'static str),
    Eof,
}

const SYMBOLS: [&str; 27] = [
    "->", "=>", "<=", ">=", "!=", "..", "'", "[", "]", "(", ")", ";", ":", "+", "-", "*", "/", "=",
    "<", ">", "!", "&", "|", "?", ",", "{", "}",
];

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ModelError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, msg: String| ModelError::Syntax {
        pos: Pos { line, col },
        msg,
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            out.push((Tok::Ident(word), pos));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let mut real = false;
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                real = true;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    real = true;
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = if real {
                Tok::Real(word.parse().map_err(|_| err(pos.line, pos.col, format!("bad number `{word}`")))?)
            } else {
                Tok::Int(word.parse().map_err(|_| err(pos.line, pos.col, format!("bad number `{word}`")))?)
            };
            out.push((tok, pos));
            continue;
        }
        if c == '"' {
            let start = i + 1;
            i += 1;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                i += 1;
            }
            if i >= chars.len() || chars[i] != '"' {
                return Err(err(pos.line, pos.col, "unterminated string".into()));
            }
            let s: String = chars[start..i].iter().collect();
            col += i + 1 - (start - 1);
            i += 1;
            out.push((Tok::Str(s), pos));
            continue;
        }
        let rest: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let sym = SYMBOLS
            .iter()
            .find(|s| rest.starts_with(**s))
            .ok_or_else(|| err(line, col, format!("unexpected character `{c}`")))?;
        i += sym.len();
        col += sym.len();
        out.push((Tok::Sym(sym), pos));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Implies,
}

#[derive(Debug, Clone, PartialEq)]
enum ExprKind {
    Int(i64),
    Real(f64),
    Bool(bool),
    Ident(String),
    Neg(Box<Expr>),
    Not(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Ite(Box<Expr>, Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
    // resolved forms
    Value(Value),
    Var(usize),
}

#[derive(Debug, Clone, PartialEq)]
struct Expr {
    kind: ExprKind,
    pos: Pos,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Value {
    Int(i64),
    Real(f64),
    Bool(bool),
}

impl Value {
    fn as_f64(self, pos: Pos) -> Result<f64, ModelError> {
        match self {
            Value::Int(i) => Ok(i as f64),
            Value::Real(r) => Ok(r),
            Value::Bool(_) => Err(eval_err(pos, "expected a number, found a boolean")),
        }
    }

    fn as_bool(self, pos: Pos) -> Result<bool, ModelError> {
        match self {
            Value::Bool(b) => Ok(b),
            _ => Err(eval_err(pos, "expected a boolean")),
        }
    }
}

fn eval_err(pos: Pos, msg: impl Into<String>) -> ModelError {
    ModelError::Eval {
        pos,
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum ConstType {
    Int,
    Double,
    Bool,
}

#[derive(Debug)]
struct ConstDecl {
    name: String,
    ty: ConstType,
    value: Option<Expr>,
    pos: Pos,
}

#[derive(Debug)]
struct VarDecl {
    name: String,
    bounds: Option<(Expr, Expr)>,
    init: Option<Expr>,
    pos: Pos,
}

#[derive(Debug)]
struct Branch {
    prob: Option<Expr>,
    updates: Vec<(String, Expr, Pos)>,
}

#[derive(Debug)]
struct Command {
    action: Option<String>,
    guard: Expr,
    branches: Vec<Branch>,
}

#[derive(Debug, Default)]
struct Program {
    consts: Vec<ConstDecl>,
    module: Option<String>,
    vars: Vec<VarDecl>,
    commands: Vec<Command>,
    labels: Vec<(String, Expr)>,
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ModelError> {
        Err(ModelError::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), ModelError> {
        if self.is_sym(s) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected `{s}`, found {}", describe(self.peek())))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ModelError> {
        match self.bump() {
            (Tok::Ident(s), p) => Ok((s, p)),
            (t, p) => Err(ModelError::Syntax {
                pos: p,
                msg: format!("expected identifier, found {}", describe(&t)),
            }),
        }
    }

    fn program(&mut self) -> Result<Program, ModelError> {
        let mut prog = Program::default();
        if self.is_kw("mdp") {
            self.bump();
        }
        loop {
            match self.peek().clone() {
                Tok::Eof => break,
                Tok::Ident(k) if k == "const" => {
                    let pos = self.pos();
                    self.bump();
                    let ty = if self.is_kw("int") {
                        self.bump();
                        ConstType::Int
                    } else if self.is_kw("double") {
                        self.bump();
                        ConstType::Double
                    } else if self.is_kw("bool") {
                        self.bump();
                        ConstType::Bool
                    } else {
                        ConstType::Int
                    };
                    let (name, _) = self.ident()?;
                    let value = if self.is_sym("=") {
                        self.bump();
                        Some(self.expr()?)
                    } else {
                        None
                    };
                    self.expect_sym(";")?;
                    prog.consts.push(ConstDecl { name, ty, value, pos });
                }
                Tok::Ident(k) if k == "module" => {
                    if prog.module.is_some() {
                        return self.error("only one module is supported");
                    }
                    self.bump();
                    let (name, _) = self.ident()?;
                    prog.module = Some(name);
                    self.module_body(&mut prog)?;
                }
                Tok::Ident(k) if k == "label" => {
                    self.bump();
                    let name = match self.bump() {
                        (Tok::Str(s), _) => s,
                        (t, p) => {
                            return Err(ModelError::Syntax {
                                pos: p,
                                msg: format!("expected label name string, found {}", describe(&t)),
                            })
                        }
                    };
                    self.expect_sym("=")?;
                    let e = self.expr()?;
                    self.expect_sym(";")?;
                    prog.labels.push((name, e));
                }
                Tok::Ident(k) if matches!(k.as_str(), "dtmc" | "ctmc" | "pta" | "rewards" | "system" | "formula") => {
                    return self.error(format!("`{k}` is not supported by the PRISM subset"));
                }
                t => return self.error(format!("unexpected {}", describe(&t))),
            }
        }
        if prog.module.is_none() {
            return self.error("missing module");
        }
        Ok(prog)
    }

    fn module_body(&mut self, prog: &mut Program) -> Result<(), ModelError> {
        loop {
            if self.is_kw("endmodule") {
                self.bump();
                return Ok(());
            }
            match self.peek().clone() {
                Tok::Ident(_) => {
                    let (name, pos) = self.ident()?;
                    self.expect_sym(":")?;
                    let bounds = if self.is_kw("bool") {
                        self.bump();
                        None
                    } else {
                        self.expect_sym("[")?;
                        let lo = self.expr()?;
                        self.expect_sym("..")?;
                        let hi = self.expr()?;
                        self.expect_sym("]")?;
                        Some((lo, hi))
                    };
                    let init = if self.is_kw("init") {
                        self.bump();
                        Some(self.expr()?)
                    } else {
                        None
                    };
                    self.expect_sym(";")?;
                    prog.vars.push(VarDecl {
                        name,
                        bounds,
                        init,
                        pos,
                    });
                }
                Tok::Sym("[") => {
                    self.bump();
                    let action = if self.is_sym("]") {
                        None
                    } else {
                        Some(self.ident()?.0)
                    };
                    self.expect_sym("]")?;
                    let guard = self.expr()?;
                    self.expect_sym("->")?;
                    let mut branches = vec![self.branch()?];
                    while self.is_sym("+") {
                        self.bump();
                        branches.push(self.branch()?);
                    }
                    self.expect_sym(";")?;
                    prog.commands.push(Command {
                        action,
                        guard,
                        branches,
                    });
                }
                Tok::Eof => return self.error("missing `endmodule`"),
                t => return self.error(format!("unexpected {} in module", describe(&t))),
            }
        }
    }

    fn starts_assignment(&self) -> bool {
        self.is_sym("(") && matches!(self.peek_at(1), Tok::Ident(_)) && matches!(self.peek_at(2), Tok::Sym("'"))
    }

    fn starts_empty_update(&self) -> bool {
        self.is_kw("true") && matches!(self.peek_at(1), Tok::Sym(";") | Tok::Sym("+"))
    }

    fn branch(&mut self) -> Result<Branch, ModelError> {
        let prob = if self.starts_assignment() || self.starts_empty_update() {
            None
        } else {
            let p = self.expr()?;
            self.expect_sym(":")?;
            Some(p)
        };
        let mut updates = Vec::new();
        if self.is_kw("true") {
            self.bump();
        } else {
            loop {
                self.expect_sym("(")?;
                let (var, pos) = self.ident()?;
                self.expect_sym("'")?;
                self.expect_sym("=")?;
                let e = self.expr()?;
                self.expect_sym(")")?;
                updates.push((var, e, pos));
                if self.is_sym("&") {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        Ok(Branch { prob, updates })
    }

    fn expr(&mut self) -> Result<Expr, ModelError> {
        let c = self.implies()?;
        if self.is_sym("?") {
            self.bump();
            let a = self.expr()?;
            self.expect_sym(":")?;
            let b = self.expr()?;
            let pos = c.pos;
            return Ok(Expr {
                kind: ExprKind::Ite(Box::new(c), Box::new(a), Box::new(b)),
                pos,
            });
        }
        Ok(c)
    }

    fn binary_level(
        &mut self,
        ops: &[(&'static str, BinOp)],
        next: fn(&mut Self) -> Result<Expr, ModelError>,
        single: bool,
    ) -> Result<Expr, ModelError> {
        let mut lhs = next(self)?;
        loop {
            let op = ops.iter().find(|(s, _)| self.is_sym(s)).map(|&(_, op)| op);
            let Some(op) = op else { break };
            let pos = self.pos();
            self.bump();
            let rhs = next(self)?;
            lhs = Expr {
                kind: ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)),
                pos,
            };
            if single {
                break;
            }
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Expr, ModelError> {
        self.binary_level(&[("=>", BinOp::Implies)], Self::or, false)
    }

    fn or(&mut self) -> Result<Expr, ModelError> {
        self.binary_level(&[("|", BinOp::Or)], Self::and, false)
    }

    fn and(&mut self) -> Result<Expr, ModelError> {
        self.binary_level(&[("&", BinOp::And)], Self::not, false)
    }

    fn not(&mut self) -> Result<Expr, ModelError> {
        if self.is_sym("!") {
            let pos = self.pos();
            self.bump();
            let e = self.not()?;
            return Ok(Expr {
                kind: ExprKind::Not(Box::new(e)),
                pos,
            });
        }
        self.rel()
    }

    fn rel(&mut self) -> Result<Expr, ModelError> {
        self.binary_level(
            &[
                ("=", BinOp::Eq),
                ("!=", BinOp::Ne),
                ("<=", BinOp::Le),
                (">=", BinOp::Ge),
                ("<", BinOp::Lt),
                (">", BinOp::Gt),
            ],
            Self::add,
            true,
        )
    }

    fn add(&mut self) -> Result<Expr, ModelError> {
        self.binary_level(&[("+", BinOp::Add), ("-", BinOp::Sub)], Self::mul, false)
    }

    fn mul(&mut self) -> Result<Expr, ModelError> {
        self.binary_level(&[("*", BinOp::Mul), ("/", BinOp::Div)], Self::unary, false)
    }

    fn unary(&mut self) -> Result<Expr, ModelError> {
        if self.is_sym("-") {
            let pos = self.pos();
            self.bump();
            let e = self.unary()?;
            return Ok(Expr {
                kind: ExprKind::Neg(Box::new(e)),
                pos,
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ModelError> {
        let (tok, pos) = self.bump();
        let kind = match tok {
            Tok::Int(i) => ExprKind::Int(i),
            Tok::Real(r) => ExprKind::Real(r),
            Tok::Ident(s) if s == "true" => ExprKind::Bool(true),
            Tok::Ident(s) if s == "false" => ExprKind::Bool(false),
            Tok::Ident(s) if matches!(s.as_str(), "min" | "max" | "floor" | "ceil" | "pow" | "mod") && self.is_sym("(") => {
                self.bump();
                let mut args = vec![self.expr()?];
                while self.is_sym(",") {
                    self.bump();
                    args.push(self.expr()?);
                }
                self.expect_sym(")")?;
                ExprKind::Call(s, args)
            }
            Tok::Ident(s) => ExprKind::Ident(s),
            Tok::Sym("(") => {
                let e = self.expr()?;
                self.expect_sym(")")?;
                return Ok(e);
            }
            t => {
                return Err(ModelError::Syntax {
                    pos,
                    msg: format!("expected expression, found {}", describe(&t)),
                })
            }
        };
        Ok(Expr { kind, pos })
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(i) => format!("`{i}`"),
        Tok::Real(r) => format!("`{r}`"),
        Tok::Str(s) => format!("\"{s}\""),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Eof => "end of input".into(),
    }
}

/// Replaces identifiers with constant values or variable slots.
fn resolve(
    e: &Expr,
    consts: &HashMap<String, Value>,
    vars: &HashMap<String, usize>,
) -> Result<Expr, ModelError> {
    let r = |x: &Expr| resolve(x, consts, vars).map(Box::new);
    let kind = match &e.kind {
        ExprKind::Ident(name) => {
            if let Some(v) = consts.get(name) {
                ExprKind::Value(*v)
            } else if let Some(&i) = vars.get(name) {
                ExprKind::Var(i)
            } else {
                return Err(ModelError::UnknownIdentifier {
                    pos: e.pos,
                    name: name.clone(),
                });
            }
        }
        ExprKind::Neg(x) => ExprKind::Neg(r(x)?),
        ExprKind::Not(x) => ExprKind::Not(r(x)?),
        ExprKind::Bin(op, a, b) => ExprKind::Bin(*op, r(a)?, r(b)?),
        ExprKind::Ite(c, a, b) => ExprKind::Ite(r(c)?, r(a)?, r(b)?),
        ExprKind::Call(f, args) => ExprKind::Call(
            f.clone(),
            args.iter()
                .map(|a| resolve(a, consts, vars))
                .collect::<Result<_, _>>()?,
        ),
        k => k.clone(),
    };
    Ok(Expr { kind, pos: e.pos })
}

/// Evaluates a resolved expression; `bools[i]` marks boolean variables.
fn eval(e: &Expr, vals: &[i64], bools: &[bool]) -> Result<Value, ModelError> {
    let pos = e.pos;
    Ok(match &e.kind {
        ExprKind::Int(i) => Value::Int(*i),
        ExprKind::Real(r) => Value::Real(*r),
        ExprKind::Bool(b) => Value::Bool(*b),
        ExprKind::Value(v) => *v,
        ExprKind::Var(i) => {
            if bools[*i] {
                Value::Bool(vals[*i] != 0)
            } else {
                Value::Int(vals[*i])
            }
        }
        ExprKind::Ident(name) => {
            return Err(ModelError::UnknownIdentifier {
                pos,
                name: name.clone(),
            })
        }
        ExprKind::Neg(x) => match eval(x, vals, bools)? {
            Value::Int(i) => Value::Int(-i),
            Value::Real(r) => Value::Real(-r),
            Value::Bool(_) => return Err(eval_err(pos, "cannot negate a boolean")),
        },
        ExprKind::Not(x) => Value::Bool(!eval(x, vals, bools)?.as_bool(x.pos)?),
        ExprKind::Ite(c, a, b) => {
            if eval(c, vals, bools)?.as_bool(c.pos)? {
                eval(a, vals, bools)?
            } else {
                eval(b, vals, bools)?
            }
        }
        ExprKind::Bin(op, a, b) => {
            let x = eval(a, vals, bools)?;
            match op {
                BinOp::And => {
                    return Ok(Value::Bool(x.as_bool(a.pos)? && eval(b, vals, bools)?.as_bool(b.pos)?))
                }
                BinOp::Or => {
                    return Ok(Value::Bool(x.as_bool(a.pos)? || eval(b, vals, bools)?.as_bool(b.pos)?))
                }
                BinOp::Implies => {
                    return Ok(Value::Bool(!x.as_bool(a.pos)? || eval(b, vals, bools)?.as_bool(b.pos)?))
                }
                _ => {}
            }
            let y = eval(b, vals, bools)?;
            match (op, x, y) {
                (BinOp::Eq, Value::Bool(p), Value::Bool(q)) => Value::Bool(p == q),
                (BinOp::Ne, Value::Bool(p), Value::Bool(q)) => Value::Bool(p != q),
                (BinOp::Add, Value::Int(p), Value::Int(q)) => Value::Int(p + q),
                (BinOp::Sub, Value::Int(p), Value::Int(q)) => Value::Int(p - q),
                (BinOp::Mul, Value::Int(p), Value::Int(q)) => Value::Int(p * q),
                (BinOp::Eq, Value::Int(p), Value::Int(q)) => Value::Bool(p == q),
                (BinOp::Ne, Value::Int(p), Value::Int(q)) => Value::Bool(p != q),
                _ => {
                    let p = x.as_f64(a.pos)?;
                    let q = y.as_f64(b.pos)?;
                    match op {
                        BinOp::Add => Value::Real(p + q),
                        BinOp::Sub => Value::Real(p - q),
                        BinOp::Mul => Value::Real(p * q),
                        BinOp::Div => Value::Real(p / q),
                        BinOp::Eq => Value::Bool(p == q),
                        BinOp::Ne => Value::Bool(p != q),
                        BinOp::Lt => Value::Bool(p < q),
                        BinOp::Le => Value::Bool(p <= q),
                        BinOp::Gt => Value::Bool(p > q),
                        BinOp::Ge => Value::Bool(p >= q),
                        BinOp::And | BinOp::Or | BinOp::Implies => unreachable!(),
                    }
                }
            }
        }
        ExprKind::Call(f, args) => {
            let v: Vec<Value> = args
                .iter()
                .map(|a| eval(a, vals, bools))
                .collect::<Result<_, _>>()?;
            let all_int = v.iter().all(|x| matches!(x, Value::Int(_)));
            let nums: Vec<f64> = v
                .iter()
                .zip(args)
                .map(|(x, a)| x.as_f64(a.pos))
                .collect::<Result<_, _>>()?;
            let arity = |n: usize| {
                if nums.len() == n {
                    Ok(())
                } else {
                    Err(eval_err(pos, format!("`{f}` expects {n} argument(s)")))
                }
            };
            match f.as_str() {
                "min" | "max" => {
                    let pick = if f == "min" { f64::min } else { f64::max };
                    let r = nums.iter().copied().fold(if f == "min" { f64::INFINITY } else { f64::NEG_INFINITY }, pick);
                    if all_int {
                        Value::Int(r as i64)
                    } else {
                        Value::Real(r)
                    }
                }
                "floor" => {
                    arity(1)?;
                    Value::Int(nums[0].floor() as i64)
                }
                "ceil" => {
                    arity(1)?;
                    Value::Int(nums[0].ceil() as i64)
                }
                "pow" => {
                    arity(2)?;
                    if all_int && nums[1] >= 0.0 {
                        Value::Int((nums[0] as i64).pow(nums[1] as u32))
                    } else {
                        Value::Real(nums[0].powf(nums[1]))
                    }
                }
                "mod" => {
                    arity(2)?;
                    if !all_int {
                        return Err(eval_err(pos, "`mod` expects integers"));
                    }
                    let (a, b) = (nums[0] as i64, nums[1] as i64);
                    if b == 0 {
                        return Err(eval_err(pos, "modulo by zero"));
                    }
                    Value::Int(a.rem_euclid(b))
                }
                _ => return Err(eval_err(pos, format!("unknown function `{f}`"))),
            }
        }
    })
}

fn eval_const(e: &Expr, consts: &HashMap<String, Value>) -> Result<Value, ModelError> {
    let resolved = resolve(e, consts, &HashMap::new())?;
    eval(&resolved, &[], &[])
}

fn as_int(v: Value, pos: Pos) -> Result<i64, ModelError> {
    match v {
        Value::Int(i) => Ok(i),
        Value::Real(r) if r.fract() == 0.0 => Ok(r as i64),
        _ => Err(eval_err(pos, "expected an integer")),
    }
}

/// Parses and explores a PRISM-subset model.
pub fn parse_prism(text: &str, overrides: &BTreeMap<String, f64>) -> Result<Mdp, ModelError> {
    let toks = lex(text)?;
    let prog = Parser { toks, at: 0 }.program()?;

    let mut consts: HashMap<String, Value> = HashMap::new();
    for c in &prog.consts {
        let v = if let Some(&o) = overrides.get(&c.name) {
            match c.ty {
                ConstType::Int if o.fract() != 0.0 => {
                    return Err(eval_err(c.pos, format!("constant `{}` needs an integer value", c.name)))
                }
                ConstType::Int => Value::Int(o as i64),
                ConstType::Double => Value::Real(o),
                ConstType::Bool => Value::Bool(o != 0.0),
            }
        } else {
            let e = c
                .value
                .as_ref()
                .ok_or_else(|| eval_err(c.pos, format!("constant `{}` has no value", c.name)))?;
            let v = eval_const(e, &consts)?;
            match (c.ty, v) {
                (ConstType::Double, Value::Int(i)) => Value::Real(i as f64),
                (ConstType::Int, Value::Real(_)) => Value::Int(as_int(v, e.pos)?),
                (ConstType::Bool, Value::Bool(_)) | (ConstType::Int, Value::Int(_)) | (ConstType::Double, Value::Real(_)) => v,
                _ => return Err(eval_err(e.pos, format!("constant `{}` has the wrong type", c.name))),
            }
        };
        consts.insert(c.name.clone(), v);
    }

    let mut var_index: HashMap<String, usize> = HashMap::new();
    let mut bounds = Vec::new();
    let mut bools = Vec::new();
    let mut init = Vec::new();
    for (i, v) in prog.vars.iter().enumerate() {
        if var_index.insert(v.name.clone(), i).is_some() || consts.contains_key(&v.name) {
            return Err(eval_err(v.pos, format!("`{}` declared twice", v.name)));
        }
        let (lo, hi) = match &v.bounds {
            Some((lo, hi)) => (
                as_int(eval_const(lo, &consts)?, lo.pos)?,
                as_int(eval_const(hi, &consts)?, hi.pos)?,
            ),
            None => (0, 1),
        };
        if lo > hi {
            return Err(eval_err(v.pos, format!("empty range for `{}`", v.name)));
        }
        let start = match &v.init {
            Some(e) => match eval_const(e, &consts)? {
                Value::Bool(b) if v.bounds.is_none() => b as i64,
                other if v.bounds.is_some() => as_int(other, e.pos)?,
                _ => return Err(eval_err(e.pos, format!("bad initial value for `{}`", v.name))),
            },
            None => lo,
        };
        bounds.push((lo, hi));
        bools.push(v.bounds.is_none());
        init.push(start);
    }
    let names: Vec<String> = prog.vars.iter().map(|v| v.name.clone()).collect();
    for (i, &x) in init.iter().enumerate() {
        let (lo, hi) = bounds[i];
        if x < lo || x > hi {
            return Err(ModelError::OutOfBounds {
                var: names[i].clone(),
                value: x,
                lo,
                hi,
                state: "init".into(),
            });
        }
    }

    struct Compiled {
        action: String,
        guard: Expr,
        branches: Vec<(Expr, Vec<(usize, Expr)>)>,
    }
    let mut commands = Vec::new();
    for (k, c) in prog.commands.iter().enumerate() {
        let guard = resolve(&c.guard, &consts, &var_index)?;
        let mut branches = Vec::new();
        for b in &c.branches {
            let prob = match &b.prob {
                Some(p) => resolve(p, &consts, &var_index)?,
                None => Expr {
                    kind: ExprKind::Real(1.0),
                    pos: guard.pos,
                },
            };
            let mut ups = Vec::new();
            for (var, e, pos) in &b.updates {
                let slot = *var_index.get(var).ok_or_else(|| ModelError::UnknownIdentifier {
                    pos: *pos,
                    name: var.clone(),
                })?;
                ups.push((slot, resolve(e, &consts, &var_index)?));
            }
            branches.push((prob, ups));
        }
        commands.push(Compiled {
            action: c.action.clone().unwrap_or_else(|| format!("_{}", k + 1)),
            guard,
            branches,
        });
    }
    let labels: Vec<(String, Expr)> = prog
        .labels
        .iter()
        .map(|(n, e)| Ok((n.clone(), resolve(e, &consts, &var_index)?)))
        .collect::<Result<_, ModelError>>()?;

    let mut actions: Vec<String> = Vec::new();
    for c in &commands {
        if !actions.contains(&c.action) {
            actions.push(c.action.clone());
        }
    }

    let state_name = |v: &[i64]| -> String {
        let parts: Vec<String> = v
            .iter()
            .zip(&bools)
            .map(|(&x, &b)| if b { (x != 0).to_string() } else { x.to_string() })
            .collect();
        format!("({})", parts.join(","))
    };

    let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
    let mut states: Vec<Vec<i64>> = Vec::new();
    let mut choices: Vec<Vec<Choice>> = Vec::new();
    let mut queue = VecDeque::new();
    index.insert(init.clone(), 0);
    states.push(init.clone());
    queue.push_back(0usize);
    while let Some(s) = queue.pop_front() {
        let vals = states[s].clone();
        let mut by_action: BTreeMap<usize, BTreeMap<usize, f64>> = BTreeMap::new();
        for c in &commands {
            if !eval(&c.guard, &vals, &bools)?.as_bool(c.guard.pos)? {
                continue;
            }
            let a = actions.iter().position(|x| *x == c.action).unwrap();
            if by_action.contains_key(&a) {
                return Err(eval_err(
                    c.guard.pos,
                    format!("two `{}` commands are enabled in state {}", c.action, state_name(&vals)),
                ));
            }
            let mut dist: BTreeMap<usize, f64> = BTreeMap::new();
            for (prob, ups) in &c.branches {
                let p = eval(prob, &vals, &bools)?.as_f64(prob.pos)?;
                let mut next = vals.clone();
                for (slot, e) in ups {
                    let v = eval(e, &vals, &bools)?;
                    let x = if bools[*slot] {
                        v.as_bool(e.pos)? as i64
                    } else {
                        as_int(v, e.pos)?
                    };
                    let (lo, hi) = bounds[*slot];
                    if x < lo || x > hi {
                        return Err(ModelError::OutOfBounds {
                            var: names[*slot].clone(),
                            value: x,
                            lo,
                            hi,
                            state: state_name(&vals),
                        });
                    }
                    next[*slot] = x;
                }
                if p == 0.0 {
                    continue;
                }
                let t = match index.get(&next) {
                    Some(&t) => t,
                    None => {
                        let t = states.len();
                        index.insert(next.clone(), t);
                        states.push(next);
                        queue.push_back(t);
                        t
                    }
                };
                *dist.entry(t).or_insert(0.0) += p;
            }
            by_action.insert(a, dist);
        }
        let cs = by_action
            .into_iter()
            .map(|(a, d)| Choice::new(a, d.into_iter().collect()))
            .collect();
        if choices.len() <= s {
            choices.resize(s + 1, Vec::new());
        }
        choices[s] = cs;
    }
    choices.resize(states.len(), Vec::new());

    let ap: Vec<String> = labels.iter().map(|(n, _)| n.clone()).collect();
    let mut state_labels = Vec::with_capacity(states.len());
    for v in &states {
        let mut l = Vec::new();
        for (i, (_, e)) in labels.iter().enumerate() {
            if eval(e, v, &bools)?.as_bool(e.pos)? {
                l.push(i);
            }
        }
        state_labels.push(l);
    }
    let state_names = states.iter().map(|v| state_name(v)).collect();
    Mdp::new(state_names, actions, choices, ap, state_labels, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Mdp, ModelError> {
        parse_prism(text, &BTreeMap::new())
    }

    #[test]
    fn counter_with_labels() {
        let m = parse(
            "mdp\nconst int N = 3;\nmodule m\n x : [0..N] init 0;\n\
             [inc] x < N -> 0.5 : (x'=x+1) + 0.5 : true;\n [stay] true -> true;\nendmodule\n\
             label \"top\" = x = N;\n",
        )
        .unwrap();
        assert_eq!(m.num_states(), 4);
        assert_eq!(m.state_name(3), "(3)");
        assert_eq!(m.label_names(3), vec!["top"]);
        assert_eq!(m.choices(0).len(), 2);
        assert_eq!(m.choices(3).len(), 1);
    }

    #[test]
    fn constant_override_and_zero_branch() {
        let text = "const double p = 0.5;\nmodule m\n x : [0..1];\n [go] x=0 -> p : (x'=1) + 1-p : true;\n \
                    [go] x=1 -> true;\nendmodule\n";
        let m = parse_prism(text, &BTreeMap::from([("p".to_string(), 1.0)])).unwrap();
        assert_eq!(m.choices(0)[0].dist, vec![(1, 1.0)]);
    }

    #[test]
    fn bool_vars_and_functions() {
        let m = parse(
            "module m\n b : bool init false;\n y : [0..4] init 2;\n\
             [t] !b -> (b'=true) & (y'=min(y+3, 4));\n [t] b -> (y'=mod(y+1, 5));\nendmodule\n",
        )
        .unwrap();
        assert_eq!(m.state_name(1), "(true,4)");
        assert_eq!(m.num_states(), 6);
    }

    #[test]
    fn out_of_bounds_update() {
        let err = parse("module m\n x : [0..1];\n [a] true -> (x'=x+1);\nendmodule\n").unwrap_err();
        assert!(matches!(err, ModelError::OutOfBounds { value: 2, .. }), "{err}");
    }

    #[test]
    fn unknown_identifier_has_position() {
        let err = parse("module m\n x : [0..1];\n [a] y=0 -> true;\nendmodule\n").unwrap_err();
        match err {
            ModelError::UnknownIdentifier { name, pos } => {
                assert_eq!(name, "y");
                assert_eq!(pos, Pos { line: 3, col: 6 });
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn bad_mass_and_deadlock() {
        let err = parse("module m\n x : [0..1];\n [a] true -> 0.3 : (x'=0) + 0.3 : (x'=1);\nendmodule\n").unwrap_err();
        assert!(err.to_string().contains("mass != 1"), "{err}");
        let err = parse("module m\n x : [0..1];\n [a] x=0 -> (x'=1);\nendmodule\n").unwrap_err();
        assert!(err.to_string().contains("deadlock"), "{err}");
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(parse("module m\n x : [0..1]\nendmodule"), Err(ModelError::Syntax { .. })));
        assert!(matches!(parse("const int N = 2;"), Err(ModelError::Syntax { .. })));
        assert!(matches!(parse("dtmc\nmodule m\nendmodule"), Err(ModelError::Syntax { .. })));
        assert!(matches!(parse("module m\n x : [0..1];\n [a] x=0 -> (x'=1) $;\nendmodule"), Err(ModelError::Syntax { .. })));
    }

    #[test]
    fn missing_constant_value() {
        let err = parse("const double p;\nmodule m\n x : [0..1];\n [a] true -> true;\nendmodule\n").unwrap_err();
        assert!(err.to_string().contains("no value"));
    }

    #[test]
    fn duplicate_enabled_action_is_rejected() {
        let err = parse("module m\n x : [0..1];\n [a] true -> true;\n [a] x=0 -> (x'=1);\nendmodule\n").unwrap_err();
        assert!(err.to_string().contains("two `a` commands"));
    }

    #[test]
    fn unlabeled_commands_are_numbered() {
        let m = parse("module m\n x : [0..1];\n [] x=0 -> (x'=1);\n [] x=1 -> true;\nendmodule\n").unwrap();
        assert_eq!(m.actions(), &["_1".to_string(), "_2".to_string()]);
    }
}
