//! A small expression parser shared by polynomial, rational-function and
//! Laurent-equation inputs.

use num_bigint::BigInt;

use super::field::Field;
use super::poly::Poly;
use super::ratfunc::RatFunc;
use super::FuncFieldError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num(BigInt),
    Var(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i64),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>, FuncFieldError> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Tok::Num(text.parse().expect("digits")));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(FuncFieldError::Parse(format!("unexpected character '{c}' in \"{s}\"")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, msg: &str) -> FuncFieldError {
        FuncFieldError::Parse(format!("{msg} at token {}", self.pos))
    }

    fn expr(&mut self) -> Result<Expr, FuncFieldError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, FuncFieldError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, FuncFieldError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, FuncFieldError> {
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            let paren = self.eat('(');
            let neg = neg || (paren && self.eat('-'));
            let e = match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    i64::try_from(&n).map_err(|_| self.err("exponent too large"))?
                }
                _ => return Err(self.err("expected integer exponent")),
            };
            if paren && !self.eat(')') {
                return Err(self.err("expected ')'"));
            }
            return Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, FuncFieldError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Num(n))
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(Expr::Var(s))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

pub fn parse_expr(s: &str) -> Result<Expr, FuncFieldError> {
    let toks = tokenize(s)?;
    if toks.is_empty() {
        return Err(FuncFieldError::Parse("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

/// Evaluates an expression in the single variable `var` as a rational function.
pub fn eval_ratfunc<F: Field>(field: &F, e: &Expr, var: &str) -> Result<RatFunc<F>, FuncFieldError> {
    Ok(match e {
        Expr::Num(n) => RatFunc::constant(field.clone(), field.from_bigint(n)),
        Expr::Var(v) if v == var => RatFunc::x(field.clone()),
        Expr::Var(v) => return Err(FuncFieldError::Parse(format!("unknown variable '{v}'"))),
        Expr::Add(a, b) => eval_ratfunc(field, a, var)?.add(&eval_ratfunc(field, b, var)?),
        Expr::Sub(a, b) => eval_ratfunc(field, a, var)?.sub(&eval_ratfunc(field, b, var)?),
        Expr::Mul(a, b) => eval_ratfunc(field, a, var)?.mul(&eval_ratfunc(field, b, var)?),
        Expr::Div(a, b) => eval_ratfunc(field, a, var)?.div(&eval_ratfunc(field, b, var)?)?,
        Expr::Neg(a) => eval_ratfunc(field, a, var)?.neg(),
        Expr::Pow(a, k) => eval_ratfunc(field, a, var)?.pow(*k)?,
    })
}

pub fn parse_ratfunc<F: Field>(field: &F, s: &str, var: &str) -> Result<RatFunc<F>, FuncFieldError> {
    eval_ratfunc(field, &parse_expr(s)?, var)
}

pub fn parse_poly<F: Field>(field: &F, s: &str, var: &str) -> Result<Poly<F>, FuncFieldError> {
    let r = parse_ratfunc(field, s, var)?;
    if !r.is_poly() {
        return Err(FuncFieldError::Parse(format!("\"{s}\" is not a polynomial")));
    }
    Ok(r.num().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcfield::field::Fp;

    #[test]
    fn parses_sparse_and_signed() {
        let f5 = Fp::new(5);
        let p = parse_poly(&f5, "3*t^4 + t + 2", "t").unwrap();
        assert_eq!(p, Poly::from_i64s(f5, &[2, 1, 0, 0, 3]));
        let q = parse_poly(&f5, "-(t - 1)*(t+1)", "t").unwrap();
        assert_eq!(q, Poly::from_i64s(f5, &[1, 0, -1]));
        let r = parse_ratfunc(&f5, "t^-2 * (t^2 + t)", "t").unwrap();
        assert_eq!(r.render("t"), "(t + 1) / t");
        assert!(parse_poly(&f5, "1/t", "t").is_err());
        assert!(parse_poly(&f5, "t +", "t").is_err());
        assert!(parse_poly(&f5, "s", "t").is_err());
    }
}
