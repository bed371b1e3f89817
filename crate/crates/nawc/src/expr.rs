//! Tiny arithmetic expression language: `+ - * / ^`, unary minus,
//! parentheses, `sin cos exp`, numeric literals and variables `x1..xn`.

use std::fmt;

use crate::error::{NawcError, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Bin(Op, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
}

impl Expr {
    pub fn parse(src: &str, nvars: usize) -> Result<Expr> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0, nvars };
        let e = p.sum()?;
        if p.pos != p.tokens.len() {
            return Err(NawcError::Invalid(format!("unexpected trailing input in '{src}'")));
        }
        Ok(e)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => x[*i],
            Expr::Neg(e) => -e.eval(x),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(x), b.eval(x));
                match op {
                    Op::Add => a + b,
                    Op::Sub => a - b,
                    Op::Mul => a * b,
                    Op::Div => a / b,
                    Op::Pow => {
                        if b.fract() == 0.0 && b.abs() < 64.0 {
                            a.powi(b as i32)
                        } else {
                            a.powf(b)
                        }
                    }
                }
            }
            Expr::Call(f, e) => {
                let v = e.eval(x);
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                }
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, a, b) => {
                let s = match op {
                    Op::Add => "+",
                    Op::Sub => "-",
                    Op::Mul => "*",
                    Op::Div => "/",
                    Op::Pow => "^",
                };
                write!(f, "({a} {s} {b})")
            }
            Expr::Call(func, e) => {
                let name = match func {
                    Func::Sin => "sin",
                    Func::Cos => "cos",
                    Func::Exp => "exp",
                };
                write!(f, "{name}({e})")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v = s.parse::<f64>().map_err(|_| NawcError::Invalid(format!("bad number '{s}'")))?;
            out.push(Tok::Num(v));
        } else if ch.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(ch) {
            out.push(Tok::Sym(ch));
            i += 1;
        } else {
            return Err(NawcError::Invalid(format!("unexpected character '{ch}'")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
    nvars: usize,
}

impl Parser {
    fn peek_sym(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Tok::Sym(c)) => Some(*c),
            _ => None,
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek_sym() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(NawcError::Invalid(format!("expected '{c}'")))
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        while let Some(c @ ('+' | '-')) = self.peek_sym() {
            self.pos += 1;
            let rhs = self.product()?;
            let op = if c == '+' { Op::Add } else { Op::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek_sym() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if c == '*' { Op::Mul } else { Op::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek_sym() {
            Some('-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    // right-associative, binds tighter than unary minus on its left
    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek_sym() == Some('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Bin(Op::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let tok = self.tokens.get(self.pos).cloned().ok_or_else(|| NawcError::Invalid("unexpected end of expression".into()))?;
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::Sym('(') => {
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let func = match name.as_str() {
                    "sin" => Some(Func::Sin),
                    "cos" => Some(Func::Cos),
                    "exp" => Some(Func::Exp),
                    _ => None,
                };
                if let Some(func) = func {
                    self.expect('(')?;
                    let e = self.sum()?;
                    self.expect(')')?;
                    return Ok(Expr::Call(func, Box::new(e)));
                }
                let idx = name
                    .strip_prefix('x')
                    .and_then(|s| s.parse::<usize>().ok())
                    .filter(|&k| k >= 1 && k <= self.nvars)
                    .ok_or_else(|| NawcError::Invalid(format!("unknown identifier '{name}' (variables are x1..x{})", self.nvars)))?;
                Ok(Expr::Var(idx - 1))
            }
            Tok::Sym(c) => Err(NawcError::Invalid(format!("unexpected '{c}'"))),
        }
    }
}

/// A map `Z: R^n → R^n` with its Jacobian `jacobian[k][i] = ∂_i Z^k`, both
/// given in closed form.
#[derive(Clone, Debug)]
pub struct SmoothVectorField {
    pub value: Vec<Expr>,
    pub jacobian: Vec<Vec<Expr>>,
}

impl SmoothVectorField {
    pub fn parse(value: &[String], jacobian: &[Vec<String>]) -> Result<Self> {
        let n = value.len();
        if jacobian.len() != n || jacobian.iter().any(|r| r.len() != n) {
            return Err(NawcError::Dimension(format!("jacobian must be {n}x{n}")));
        }
        let value = value.iter().map(|s| Expr::parse(s, n)).collect::<Result<Vec<_>>>()?;
        let jacobian = jacobian.iter().map(|r| r.iter().map(|s| Expr::parse(s, n)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
        Ok(Self { value, jacobian })
    }

    pub fn identity(n: usize) -> Self {
        let value = (0..n).map(Expr::Var).collect();
        let jacobian = (0..n).map(|k| (0..n).map(|i| Expr::Num(if i == k { 1.0 } else { 0.0 })).collect()).collect();
        Self { value, jacobian }
    }

    /// `z_k = x_k + c·x_k²`.
    pub fn quadratic(n: usize, c: f64) -> Self {
        let s = |k: usize| format!("x{} + {c}*x{}^2", k + 1, k + 1);
        let value: Vec<String> = (0..n).map(s).collect();
        let jac: Vec<Vec<String>> = (0..n).map(|k| (0..n).map(|i| if i == k { format!("1 + {}*x{}", 2.0 * c, k + 1) } else { "0".into() }).collect()).collect();
        Self::parse(&value, &jac).expect("built-in field parses")
    }

    pub fn dim(&self) -> usize {
        self.value.len()
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.value.iter().map(|e| e.eval(x)).collect()
    }

    pub fn jacobian_at(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.jacobian.iter().map(|r| r.iter().map(|e| e.eval(x)).collect()).collect()
    }

    /// Worst relative disagreement between the closed-form Jacobian and
    /// central differences of the value map.
    pub fn jacobian_residual(&self, samples: &[Vec<f64>]) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for x in samples {
            let jac = self.jacobian_at(x);
            let scale = jac.iter().flatten().fold(1.0_f64, |m, v| m.max(v.abs()));
            for i in 0..n {
                let h = 1e-5 * x[i].abs().max(1.0);
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                let (zp, zm) = (self.eval(&xp), self.eval(&xm));
                for k in 0..n {
                    let fd = (zp[k] - zm[k]) / (2.0 * h);
                    worst = worst.max((fd - jac[k][i]).abs() / scale);
                }
            }
        }
        worst
    }
}
