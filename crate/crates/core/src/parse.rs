//! Lexer and LL(1) parser for the expression grammar shared by scalars,
//! graded functions and Laurent functions.
//!
//! Precedence, tightest first: `^`, unary `-`, `*` and `/`, binary `+` and `-`.

use num_bigint::BigInt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Num(BigInt),
    Ident {
        name: String,
        column: usize,
    },
    /// `name` applied to `args`, differentiated `deriv[i]` times in slot i.
    Call {
        name: String,
        deriv: Option<Vec<u32>>,
        args: Vec<Ast>,
        column: usize,
    },
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>, usize),
    Pow(Box<Ast>, i64, usize),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Prime,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(n) => format!("number `{n}`"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::End => "end of input".into(),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBracket => "`[`".into(),
        Tok::RBracket => "`]`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Prime => "`'`".into(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Num(s.parse().unwrap()), col));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
            continue;
        }
        let t = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            '\'' => Tok::Prime,
            other => return Err(Error::parse(1, col, format!("unexpected character `{other}`"))),
        };
        out.push((t, col));
        i += 1;
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(Error::parse(
                1,
                self.col(),
                format!("expected {}, found {}", describe(&t), describe(self.peek())),
            ))
        }
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    let col = self.col();
                    self.bump();
                    lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?), col);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Ast> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        let col = self.col();
        self.bump();
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let e = self.small_int("exponent")?;
        if *self.peek() == Tok::Caret {
            return Err(Error::parse(1, self.col(), "chained `^` needs parentheses"));
        }
        Ok(Ast::Pow(Box::new(base), if neg { -e } else { e }, col))
    }

    fn small_int(&mut self, what: &str) -> Result<i64> {
        let col = self.col();
        match self.bump() {
            Tok::Num(n) => i64::try_from(n)
                .ok()
                .filter(|v| *v <= u32::MAX as i64)
                .ok_or_else(|| Error::parse(1, col, format!("{what} too large"))),
            t => Err(Error::parse(1, col, format!("expected {what}, found {}", describe(&t)))),
        }
    }

    fn args(&mut self) -> Result<Vec<Ast>> {
        self.expect(Tok::LParen)?;
        let mut args = vec![self.expr()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.expr()?);
        }
        self.expect(Tok::RParen)?;
        Ok(args)
    }

    fn primary(&mut self) -> Result<Ast> {
        let col = self.col();
        match self.bump() {
            Tok::Num(n) => Ok(Ast::Num(n)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) if name == "D" && *self.peek() == Tok::LBracket => {
                self.bump();
                let fcol = self.col();
                let fname = match self.bump() {
                    Tok::Ident(f) => f,
                    t => {
                        return Err(Error::parse(1, fcol, format!("expected function name, found {}", describe(&t))))
                    }
                };
                self.expect(Tok::Comma)?;
                self.expect(Tok::LParen)?;
                let mut deriv = vec![self.small_int("derivative order")? as u32];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    deriv.push(self.small_int("derivative order")? as u32);
                }
                self.expect(Tok::RParen)?;
                self.expect(Tok::RBracket)?;
                let args = self.args()?;
                if args.len() != deriv.len() {
                    return Err(Error::parse(
                        1,
                        col,
                        format!("derivative index has {} slots but {} arguments given", deriv.len(), args.len()),
                    ));
                }
                Ok(Ast::Call {
                    name: fname,
                    deriv: Some(deriv),
                    args,
                    column: col,
                })
            }
            Tok::Ident(name) => {
                let mut primes = 0u32;
                while *self.peek() == Tok::Prime {
                    self.bump();
                    primes += 1;
                }
                if *self.peek() == Tok::LParen {
                    let args = self.args()?;
                    let deriv = if primes > 0 {
                        if args.len() != 1 {
                            return Err(Error::parse(1, col, "primes are only allowed on one-argument functions"));
                        }
                        Some(vec![primes])
                    } else {
                        None
                    };
                    return Ok(Ast::Call {
                        name,
                        deriv,
                        args,
                        column: col,
                    });
                }
                if primes > 0 {
                    return Err(Error::parse(1, self.col(), "expected `(` after primed function name"));
                }
                Ok(Ast::Ident { name, column: col })
            }
            t => Err(Error::parse(1, col, format!("unexpected {}", describe(&t)))),
        }
    }
}

pub fn parse_expr(src: &str) -> Result<Ast> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(Error::parse(1, p.col(), format!("unexpected {}", describe(p.peek()))));
    }
    Ok(e)
}
