use num_bigint::BigInt;

use super::{MultiPoly, MAX_VARS};
use crate::error::{Result, WittError};
use crate::exactnum::Zmod;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Var(usize),
    P,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn err<T>(msg: impl Into<String>) -> Result<T> {
    Err(WittError::Parse(msg.into()))
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1
            }
            '*' => {
                out.push(Tok::Star);
                i += 1
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1
            }
            'p' => {
                out.push(Tok::P);
                i += 1
            }
            'T' | 't' => {
                i += 1;
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let idx = if start == i {
                    1
                } else {
                    chars[start..i].iter().collect::<String>().parse::<usize>().unwrap()
                };
                if idx == 0 || idx > MAX_VARS {
                    return err(format!("variable index {idx} out of range"));
                }
                out.push(Tok::Var(idx - 1));
            }
            d if d.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Tok::Num(s.parse().unwrap()));
            }
            other => return err(format!("unexpected character '{other}'")),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
    ring: Zmod,
    nvars: usize,
    p_symbol: Option<u64>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            self.term()?.neg()
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn exponent(&mut self) -> Result<u64> {
        match self.next() {
            Some(Tok::Num(n)) => n.try_into().or_else(|_| err("exponent too large")),
            Some(Tok::P) => self.p_symbol.ok_or_else(|| WittError::Parse("'p' is not bound here".into())),
            _ => err("expected an exponent"),
        }
    }

    fn factor(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let e = self.exponent()?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        match self.next() {
            Some(Tok::Num(n)) => Ok(MultiPoly::constant(self.ring, self.nvars, self.ring.from_bigint(&n))),
            Some(Tok::P) => {
                let p = self.p_symbol.ok_or_else(|| WittError::Parse("'p' is not bound here".into()))?;
                Ok(MultiPoly::constant(self.ring, self.nvars, p % self.ring.m))
            }
            Some(Tok::Var(i)) => {
                if i >= self.nvars {
                    return err(format!("variable T{} but only {} variables", i + 1, self.nvars));
                }
                Ok(MultiPoly::var(self.ring, self.nvars, i))
            }
            Some(Tok::Minus) => Ok(self.factor()?.neg()),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                if self.next() != Some(Tok::RParen) {
                    return err("expected ')'");
                }
                Ok(e)
            }
            t => err(format!("unexpected token {t:?}")),
        }
    }
}

fn parse_inner(s: &str, ring: Zmod, nvars: usize, p_symbol: Option<u64>) -> Result<MultiPoly> {
    if nvars > MAX_VARS {
        return err(format!("at most {MAX_VARS} variables"));
    }
    let toks = tokenize(s)?;
    if toks.is_empty() {
        return err("empty polynomial");
    }
    let mut parser = Parser {
        toks: &toks,
        pos: 0,
        ring,
        nvars,
        p_symbol,
    };
    let out = parser.expr()?;
    if parser.pos != toks.len() {
        return err(format!("trailing input in '{s}'"));
    }
    Ok(out)
}

/// Parses text such as `3*T1^2*T2 + 1`; `T` alone means `T1`.
pub fn parse_poly(s: &str, ring: Zmod, nvars: usize) -> Result<MultiPoly> {
    parse_inner(s, ring, nvars, None)
}

/// Like [`parse_poly`], with the symbol `p` bound to the prime.
pub fn parse_poly_with_p(s: &str, ring: Zmod, nvars: usize) -> Result<MultiPoly> {
    parse_inner(s, ring, nvars, Some(ring.p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let r = Zmod::new(5, 3);
        for s in ["3*T1^2*T2 + 1", "T1^4 + 124*T2", "0", "T1*T2^3 + 2*T1 + 7"] {
            let f = parse_poly(s, r, 2).unwrap();
            assert_eq!(parse_poly(&f.to_string(), r, 2).unwrap(), f);
        }
    }

    #[test]
    fn syntax() {
        let r = Zmod::new(3, 2);
        assert_eq!(parse_poly("-1", r, 1).unwrap().to_string(), "8");
        assert_eq!(parse_poly("(T+1)^2", r, 1).unwrap().to_string(), "T1^2 + 2*T1 + 1");
        assert_eq!(parse_poly_with_p("T^p + p*T", r, 1).unwrap().to_string(), "T1^3 + 3*T1");
        assert!(parse_poly("T3", r, 2).is_err());
        assert!(parse_poly("T +", r, 1).is_err());
        assert!(parse_poly("p", r, 1).is_err());
    }
}
