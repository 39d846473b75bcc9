//! Element text: a small sum/product/power grammar.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := atom ['^' ['-'] int]
//! factor := '-' factor
//! atom   := int | ident | '(' expr ')'
//! ```
//!
//! Identifiers are algebra generators, ring parameters, or `h`. Division is
//! only by nonzero rational constants, and negative exponents only apply to
//! monomials in `h`. Operator text additionally accepts `d/d<gen>` factors;
//! juxtaposition and `*` both mean composition there.

use num_traits::{One, Zero};

use super::ring::{Key, Ring};
use super::series::Series;
use super::monomial_cmp;
use crate::error::{Error, Result};
use crate::scalar::{render_coeff, Q};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(num_bigint::BigInt),
    Ident(String),
    Sym(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
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
            out.push(Tok::Int(text.parse().expect("digits")));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    ring: &'a Ring,
    toks: Vec<Tok>,
    pos: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(ring: &'a Ring, src: &'a str) -> Result<Self> {
        Ok(Self {
            ring,
            toks: tokenize(src)?,
            pos: 0,
            src,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn peek_sym(&self, c: char) -> bool {
        self.peek() == Some(&Tok::Sym(c))
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek_sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at token {} in {:?}", self.pos, self.src))
    }

    fn finish(&self) -> Result<()> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            Err(self.err("trailing input"))
        }
    }

    fn expr(&mut self) -> Result<Series> {
        let mut acc = Series::zero();
        let mut first = true;
        loop {
            let neg = if self.eat_sym('-') {
                true
            } else if self.eat_sym('+') {
                false
            } else if first {
                false
            } else {
                break;
            };
            first = false;
            let t = self.term()?;
            if neg {
                acc -= t;
            } else {
                acc += t;
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Series> {
        let mut acc = self.factor()?;
        loop {
            if self.eat_sym('*') {
                let f = self.factor()?;
                acc = self.ring.mul(&acc, &f);
            } else if self.eat_sym('/') {
                let f = self.factor()?;
                let c = scalar_value(&f).ok_or_else(|| self.err("division by a non-constant"))?;
                if c.is_zero() {
                    return Err(self.err("division by zero"));
                }
                acc = acc.scale(&c.recip());
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn exponent(&mut self) -> Result<Option<i64>> {
        if !self.eat_sym('^') {
            return Ok(None);
        }
        let neg = self.eat_sym('-');
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                let n: i64 = n.try_into().map_err(|_| self.err("exponent too large"))?;
                Ok(Some(if neg { -n } else { n }))
            }
            _ => Err(self.err("expected integer exponent")),
        }
    }

    fn factor(&mut self) -> Result<Series> {
        if self.eat_sym('-') {
            return Ok(-self.factor()?);
        }
        let base = self.atom()?;
        match self.exponent()? {
            None => Ok(base),
            Some(e) if e >= 0 => Ok(self.ring.pow(&base, e as u32)),
            Some(e) => {
                // only c*h^p may be inverted
                let mut it = base.terms();
                let (k, c) = match (it.next(), it.next()) {
                    (Some(t), None) => t,
                    _ => return Err(self.err("negative exponent of a non-monomial")),
                };
                if !k.mono_is_unit() || k.params.iter().any(|&x| x != 0) {
                    return Err(self.err("negative exponent only allowed on powers of h"));
                }
                let n = (-e) as i32;
                let mut c_inv = Q::one();
                for _ in 0..n {
                    c_inv /= c;
                }
                let key = Key {
                    hbar: -k.hbar * n,
                    ..k.clone()
                };
                Ok(self.ring.truncate(&Series::from_term(key, c_inv)))
            }
        }
    }

    fn ident_value(&self, name: &str) -> Result<Series> {
        if name == "h" {
            let key = Key {
                hbar: 1,
                ..self.ring.unit_key()
            };
            return Ok(Series::from_term(key, Q::one()));
        }
        if let Some(i) = self.ring.param_index(name) {
            let mut key = self.ring.unit_key();
            key.params[i] = 1;
            return Ok(Series::from_term(key, Q::one()));
        }
        self.ring
            .generator(name)
            .map_err(|_| Error::Parse(format!("unknown symbol {name:?} in {:?}", self.src)))
    }

    fn atom(&mut self) -> Result<Series> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(self.ring.scalar(Q::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                self.ident_value(&name)
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat_sym(')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            _ => Err(self.err("expected a number, symbol or '('")),
        }
    }
}

fn scalar_value(s: &Series) -> Option<Q> {
    let mut it = s.terms();
    match (it.next(), it.next()) {
        (None, _) => Some(Q::zero()),
        (Some((k, c)), None) if k.is_unit() => Some(c.clone()),
        _ => None,
    }
}

/// Parses element text into `ring`. Terms beyond the truncation are dropped.
pub fn parse_series(ring: &Ring, text: &str) -> Result<Series> {
    let mut p = Parser::new(ring, text)?;
    if p.toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let s = p.expr()?;
    p.finish()?;
    Ok(ring.truncate(&s))
}

/// Parses `lhs -> rhs`, where `lhs` is a monomial of `source` with
/// coefficient 1 and `rhs` is element text in `target`.
pub fn parse_monomial_rule(source: &Ring, target: &Ring, line: &str) -> Result<(Vec<u32>, Series)> {
    let (lhs, rhs) = line
        .split_once("->")
        .ok_or_else(|| Error::Parse(format!("rule {line:?} has no '->'")))?;
    let l = parse_series(source, lhs)?;
    let mut it = l.terms();
    let mono = match (it.next(), it.next()) {
        (Some((k, c)), None) if c.is_one() && k.hbar == 0 && k.params.iter().all(|&e| e == 0) => {
            k.mono.clone()
        }
        _ => {
            return Err(Error::Parse(format!(
                "rule left side {:?} is not a bare monomial",
                lhs.trim()
            )))
        }
    };
    Ok((mono, parse_series(target, rhs)?))
}

/// One factor of an operator word.
#[derive(Clone, Debug, PartialEq)]
pub enum OpLetter {
    /// Left multiplication.
    Mul(Series),
    /// Left derivative by a generator.
    Deriv(usize),
}

/// `coeff * L_1 L_2 ... L_r`, applied right to left.
#[derive(Clone, Debug, PartialEq)]
pub struct OpWord {
    pub coeff: Q,
    pub letters: Vec<OpLetter>,
}

impl<'a> Parser<'a> {
    fn op_expr(&mut self) -> Result<Vec<OpWord>> {
        let mut out = Vec::new();
        let mut first = true;
        loop {
            let neg = if self.eat_sym('-') {
                true
            } else if self.eat_sym('+') {
                false
            } else if first {
                false
            } else {
                break;
            };
            first = false;
            let mut w = self.op_term()?;
            if neg {
                w.coeff = -w.coeff;
            }
            out.push(w);
        }
        Ok(out)
    }

    fn op_term(&mut self) -> Result<OpWord> {
        let mut word = OpWord {
            coeff: Q::one(),
            letters: Vec::new(),
        };
        let mut any = false;
        loop {
            match self.peek() {
                None | Some(Tok::Sym('+')) | Some(Tok::Sym('-')) | Some(Tok::Sym(')')) => break,
                _ => {}
            }
            if any && self.eat_sym('*') {
                // explicit composition
            } else if any && self.peek_sym('/') {
                self.pos += 1;
                let f = self.factor()?;
                let c = scalar_value(&f).ok_or_else(|| self.err("division by a non-constant"))?;
                if c.is_zero() {
                    return Err(self.err("division by zero"));
                }
                word.coeff /= c;
                continue;
            }
            any = true;
            if let Some(Tok::Ident(name)) = self.peek().cloned() {
                if name == "d" && self.toks.get(self.pos + 1) == Some(&Tok::Sym('/')) {
                    self.pos += 2;
                    let target = match self.peek().cloned() {
                        Some(Tok::Ident(t)) if t.starts_with('d') && t.len() > 1 => t[1..].to_string(),
                        _ => return Err(self.err("expected d/d<generator>")),
                    };
                    self.pos += 1;
                    let g = self.ring.algebra().generator_index(&target).ok_or_else(|| {
                        Error::Parse(format!("unknown generator {target:?} in derivative"))
                    })?;
                    let times = self.exponent()?.unwrap_or(1);
                    if times < 0 {
                        return Err(self.err("negative power of a derivative"));
                    }
                    for _ in 0..times {
                        word.letters.push(OpLetter::Deriv(g));
                    }
                    continue;
                }
            }
            let f = self.factor()?;
            match scalar_value(&f) {
                Some(c) => word.coeff *= c,
                None => word.letters.push(OpLetter::Mul(f)),
            }
        }
        if !any {
            return Err(self.err("empty operator term"));
        }
        Ok(word)
    }
}

/// Parses operator text such as `t * d/ddt` or `d/dt d/ddt` into words.
pub fn parse_operator(ring: &Ring, text: &str) -> Result<Vec<OpWord>> {
    let mut p = Parser::new(ring, text)?;
    if p.toks.is_empty() || (p.toks.len() == 1 && p.toks[0] == Tok::Int(0.into())) {
        return Ok(Vec::new());
    }
    let w = p.op_expr()?;
    p.finish()?;
    Ok(w)
}

fn render_key(ring: &Ring, k: &Key, c: &Q) -> String {
    let mut parts = vec![render_coeff(c)];
    for (e, p) in k.params.iter().zip(ring.params()) {
        match e {
            0 => {}
            1 => parts.push(p.name.clone()),
            _ => parts.push(format!("{}^{e}", p.name)),
        }
    }
    if k.hbar != 0 {
        parts.push(format!("h^{}", k.hbar));
    }
    let mut any_gen = false;
    for (e, g) in k.mono.iter().zip(ring.algebra().generators()) {
        match e {
            0 => {}
            1 => parts.push(g.name.clone()),
            _ => parts.push(format!("{}^{e}", g.name)),
        }
        any_gen |= *e > 0;
    }
    if !any_gen {
        parts.push("1".into());
    }
    parts.join("*")
}

/// Canonical text: terms ordered by parameters, then `h`-power, then
/// monomials from highest to lowest in graded-lex order.
pub fn render_series(ring: &Ring, s: &Series) -> String {
    if s.is_zero() {
        return "0".into();
    }
    let mut terms: Vec<(&Key, &Q)> = s.terms().collect();
    terms.sort_by(|(a, _), (b, _)| {
        a.params
            .cmp(&b.params)
            .then(a.hbar.cmp(&b.hbar))
            .then_with(|| monomial_cmp(&b.mono, &a.mono))
    });
    terms
        .into_iter()
        .map(|(k, c)| render_key(ring, k, c))
        .collect::<Vec<_>>()
        .join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::{Algebra, GeneratorSpec, ParamSpec, Truncation};
    use crate::scalar::{q, q_frac};
    use std::sync::Arc;

    fn ring() -> Ring {
        let a = Arc::new(
            Algebra::new(
                "A",
                vec![GeneratorSpec::new("t", 0), GeneratorSpec::new("dt", -1)],
                1,
            )
            .unwrap(),
        );
        Ring::new(a, vec![ParamSpec::deformation("u1", 0)], Truncation::new(10, 5, 3)).unwrap()
    }

    #[test]
    fn render_matches_canonical_example() {
        let r = ring();
        let s = parse_series(&r, "3/2*t^2*dt - h").unwrap();
        assert_eq!(render_series(&r, &s), "3/2*t^2*dt + (-1)*h^1*1");
        assert_eq!(render_series(&r, &Series::zero()), "0");
        assert_eq!(render_series(&r, &parse_series(&r, "u1^2*h^-1").unwrap()), "1*u1^2*h^-1*1");
    }

    #[test]
    fn round_trip() {
        let r = ring();
        for text in ["3/2*t^2*dt + (-1)*h^1*1", "(t + h)^3 - 2/3*u1*dt", "h^-2*u1^2 + 7"] {
            let s = parse_series(&r, text).unwrap();
            let back = parse_series(&r, &render_series(&r, &s)).unwrap();
            assert_eq!(s, back);
        }
    }

    #[test]
    fn arithmetic_in_text() {
        let r = ring();
        let s = parse_series(&r, "(t+1)^2 - t^2 - 2*t").unwrap();
        assert_eq!(s, r.one());
        let s = parse_series(&r, "6/4*h^-1 * h").unwrap();
        assert_eq!(s, r.scalar(q_frac(3, 2)));
        assert_eq!(parse_series(&r, "(2*h)^-1").unwrap(), parse_series(&r, "1/2*h^-1").unwrap());
        assert_eq!(parse_series(&r, "-t").unwrap(), r.generator("t").unwrap().scale(&q(-1)));
    }

    #[test]
    fn parse_errors() {
        let r = ring();
        for bad in ["", "t +", "x", "t^-1", "t/t", "1/0", "(t", "t $ t"] {
            assert!(matches!(parse_series(&r, bad), Err(Error::Parse(_))), "{bad}");
        }
    }

    #[test]
    fn rules() {
        let r = ring();
        let (m, rhs) = parse_monomial_rule(&r, &r, "t^2 -> -1*h").unwrap();
        assert_eq!(m, vec![2, 0]);
        assert_eq!(rhs, parse_series(&r, "-h").unwrap());
        assert!(parse_monomial_rule(&r, &r, "2*t -> 1").is_err());
        assert!(parse_monomial_rule(&r, &r, "t").is_err());
    }

    #[test]
    fn operator_text() {
        let r = ring();
        let w = parse_operator(&r, "t * d/ddt").unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(
            w[0].letters,
            vec![OpLetter::Mul(r.generator("t").unwrap()), OpLetter::Deriv(1)]
        );
        let w = parse_operator(&r, "d/dt d/ddt - 1/2 d/dt^3 d/ddt").unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(w[0].letters, vec![OpLetter::Deriv(0), OpLetter::Deriv(1)]);
        assert_eq!(w[1].coeff, q_frac(-1, 2));
        assert_eq!(w[1].letters.len(), 4);
        assert!(parse_operator(&r, "0").unwrap().is_empty());
        assert!(parse_operator(&r, "d/dx").is_err());
    }
}
