//! Text form of operators.
//!
//! A term is `F^-r([f1; f2]) * {d1}_{j/q} * {d2}_{k}^e ...`. The leading
//! coefficient is optional and `F^-0(...)` may be written as the bare
//! vector; `{dl}_{j/q}` is the basic operator with q a power of p (also
//! accepted as `p^r`), `{dl}_{j}` means `{dl}_{j/1}`, and `^e` composes e
//! times. Terms are joined by `+` or `-`; `0` is the zero operator.

use crate::error::{Result, WittError};
use crate::exactnum::checked_pow;
use crate::witt::WittVec;

use super::{compose_symbolic, power, twisted_left_mul, WdoNormalForm, WorkingContext};

pub fn format_normal_form(nf: &WdoNormalForm) -> String {
    let ctx = nf.context();
    let pm = checked_pow(ctx.p, ctx.level).unwrap();
    let terms: Vec<String> = nf
        .terms()
        .iter()
        .map(|t| {
            let mut parts = Vec::new();
            if t.twist > 0 {
                parts.push(format!("F^-{}({})", t.twist, t.coeff));
            } else {
                parts.push(t.coeff.to_string());
            }
            let q = checked_pow(ctx.p, t.twist).unwrap();
            for (l, &j) in t.frac.iter().enumerate() {
                if j == 0 {
                    continue;
                }
                if t.twist > 0 {
                    parts.push(format!("{{d{}}}_{{{j}/{q}}}", l + 1));
                } else {
                    parts.push(format!("{{d{}}}_{{{j}}}", l + 1));
                }
            }
            for (l, &i) in t.level_index.iter().enumerate() {
                match i {
                    0 => {}
                    1 => parts.push(format!("{{d{}}}_{{{pm}}}", l + 1)),
                    _ => parts.push(format!("{{d{}}}_{{{pm}}}^{i}", l + 1)),
                }
            }
            parts.join(" * ")
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

fn err<T>(msg: impl Into<String>) -> Result<T> {
    Err(WittError::Parse(msg.into()))
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, lit: &str) -> bool {
        self.skip_ws();
        if self.s[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str) -> Result<()> {
        if self.eat(lit) {
            Ok(())
        } else {
            err(format!("expected '{lit}' at offset {}", self.pos))
        }
    }

    fn int(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return err(format!("expected an integer at offset {start}"));
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| WittError::Parse("integer too large".into()))
    }

    /// Text of a bracketed Witt vector, brackets included.
    fn bracket(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        let end = self.s[start..]
            .iter()
            .position(|&c| c == b']')
            .ok_or_else(|| WittError::Parse("unterminated Witt vector".into()))?;
        self.pos = start + end + 1;
        Ok(std::str::from_utf8(&self.s[start..self.pos]).unwrap())
    }
}

enum Factor {
    Coeff(WittVec, u32),
    Op(WdoNormalForm),
}

fn log_p(q: u64, p: u64) -> Option<u32> {
    let mut r = 0;
    let mut x = q;
    while x > 1 {
        if x % p != 0 {
            return None;
        }
        x /= p;
        r += 1;
    }
    (x == 1).then_some(r)
}

fn factor(c: &mut Cursor, ctx: &WorkingContext) -> Result<Factor> {
    let witt = |s: &str| WittVec::parse(s, ctx.p, ctx.nvars, ctx.len);
    if c.eat("F^-") {
        let r = c.int()? as u32;
        c.expect("(")?;
        let a = witt(c.bracket()?)?;
        c.expect(")")?;
        return Ok(Factor::Coeff(a, r));
    }
    match c.peek() {
        Some(b'[') => Ok(Factor::Coeff(witt(c.bracket()?)?, 0)),
        Some(b'{') => {
            c.expect("{d")?;
            let l = c.int()? as usize;
            if l == 0 || l > ctx.nvars {
                return err(format!("variable d{l} out of range"));
            }
            c.expect("}_{")?;
            let j = c.int()?;
            let r = if c.eat("/") {
                if c.eat("p^") {
                    c.int()? as u32
                } else {
                    let q = c.int()?;
                    log_p(q, ctx.p).ok_or_else(|| WittError::Parse(format!("denominator {q} is not a power of p")))?
                }
            } else {
                0
            };
            c.expect("}")?;
            let mut op = WdoNormalForm::basic(ctx, l - 1, j, r)?;
            if c.eat("^") {
                let e = c.int()? as u32;
                op = power(&op, e)?;
            }
            Ok(Factor::Op(op))
        }
        Some(b) if b.is_ascii_digit() => {
            let n = c.int()?;
            Ok(Factor::Coeff(WittVec::integer(n, ctx.p, ctx.nvars, ctx.len), 0))
        }
        _ => err(format!("unexpected input at offset {}", c.pos)),
    }
}

fn term(c: &mut Cursor, ctx: &WorkingContext) -> Result<WdoNormalForm> {
    let mut coeff: Option<(WittVec, u32)> = None;
    let mut op: Option<WdoNormalForm> = None;
    loop {
        match factor(c, ctx)? {
            Factor::Coeff(a, r) => {
                if op.is_some() {
                    return err("coefficients must precede the operator factors of a term");
                }
                coeff = Some(match coeff {
                    None => (a, r),
                    Some((b, 0)) if r == 0 => (b.mul(&a)?, 0),
                    Some(_) => return err("at most one twisted coefficient per term"),
                });
            }
            Factor::Op(q) => {
                op = Some(match op {
                    None => q,
                    Some(prev) => compose_symbolic(&prev, &q)?,
                });
            }
        }
        if !c.eat("*") {
            break;
        }
    }
    let op = op.unwrap_or_else(|| WdoNormalForm::identity(ctx));
    match coeff {
        None => Ok(op),
        Some((a, r)) => twisted_left_mul(&a, r, &op),
    }
}

/// Parses an operator at the given context into its normal form.
pub fn parse_operator(s: &str, ctx: &WorkingContext) -> Result<WdoNormalForm> {
    let mut c = Cursor { s: s.as_bytes(), pos: 0 };
    let mut neg = c.eat("-");
    let mut acc = WdoNormalForm::zero(ctx);
    loop {
        let t = term(&mut c, ctx)?;
        acc = if neg { acc.sub(&t)? } else { acc.add(&t)? };
        if c.eat("+") {
            neg = false;
        } else if c.eat("-") {
            neg = true;
        } else {
            break;
        }
    }
    if c.peek().is_some() {
        return err(format!("trailing input at offset {}", c.pos));
    }
    Ok(acc)
}
