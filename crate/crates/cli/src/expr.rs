//! Numeric literals of the config file: decimals or small arithmetic expressions such as
//! `sqrt(3)/2` or `1/sqrt(2)`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := ('+' | '-') factor | number | 'sqrt' '(' expr ')' | '(' expr ')'
//! ```

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

/// A number written either as a TOML number or as an expression string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Num;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or an expression like \"sqrt(3)/2\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Num, E> {
                Ok(Num(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Num, E> {
                eval(v).map(Num).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn err(&self, msg: &str) -> String {
        format!("{msg} at offset {} in expression `{}`", self.pos, self.src)
    }

    fn expr(&mut self) -> Result<f64, String> {
        let mut v = self.term()?;
        loop {
            if self.eat('+') {
                v += self.term()?;
            } else if self.eat('-') {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<f64, String> {
        let mut v = self.factor()?;
        loop {
            if self.eat('*') {
                v *= self.factor()?;
            } else if self.eat('/') {
                v /= self.factor()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn factor(&mut self) -> Result<f64, String> {
        if self.eat('-') {
            return Ok(-self.factor()?);
        }
        if self.eat('+') {
            return self.factor();
        }
        if self.eat('(') {
            let v = self.expr()?;
            return if self.eat(')') { Ok(v) } else { Err(self.err("expected `)`")) };
        }
        self.skip_ws();
        let rest = &self.src[self.pos..];
        if let Some(after) = rest.strip_prefix("sqrt") {
            self.pos += 4;
            if !after.trim_start().starts_with('(') {
                return Err(self.err("expected `(` after sqrt"));
            }
            let v = self.factor()?;
            if v < 0.0 {
                return Err(self.err("square root of a negative number"));
            }
            return Ok(v.sqrt());
        }
        let len = number_len(rest);
        if len == 0 {
            return Err(self.err("expected a number"));
        }
        let v = rest[..len].parse::<f64>().map_err(|_| self.err("malformed number"))?;
        self.pos += len;
        Ok(v)
    }
}

fn number_len(s: &str) -> usize {
    let b = s.as_bytes();
    let mut i = 0;
    while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
        i += 1;
    }
    if i > 0 && i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        let digits = j;
        while j < b.len() && b[j].is_ascii_digit() {
            j += 1;
        }
        if j > digits {
            i = j;
        }
    }
    i
}

/// Evaluates an expression; the result must be finite.
pub fn eval(src: &str) -> Result<f64, String> {
    let mut p = Parser { src, pos: 0 };
    let v = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("unexpected trailing input"));
    }
    if !v.is_finite() {
        return Err(format!("expression `{src}` is not a finite number"));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(eval("sqrt(3)/2").unwrap(), 3f64.sqrt() / 2.0);
        assert_eq!(eval("sqrt(3)/2").unwrap(), 0.8660254037844386);
        assert_eq!(eval("1/sqrt(3)").unwrap(), 1.0 / 3f64.sqrt());
        assert_eq!(eval(" -2.5e-1 * (1 + 3) ").unwrap(), -1.0);
        assert_eq!(eval("1/2").unwrap(), 0.5);
        assert!(eval("sqrt 4").is_err());
    }

    #[test]
    fn rejects_junk() {
        for bad in ["", "sqrt(-1)", "1/0", "2 3", "(1", "x", "1e"] {
            assert!(eval(bad).is_err(), "{bad}");
        }
    }
}
