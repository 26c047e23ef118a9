//! Parser for the polynomial expression grammar used by the command line:
//! rational literals, variables `x[i,m]` / `x[s,i,m]` / `t[k]`, the alias `h`
//! for the distinguished linear form in the `t`'s, operators `+ - * ^`, and
//! parentheses.

use crate::error::{Error, Result};
use crate::poly::{Coeff, MultiPoly, Var};
use num_bigint::BigInt;
use num_traits::Zero;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    hbar: Option<MultiPoly>,
}

/// Parses an expression into an exact polynomial. `hbar` supplies the linear
/// form the bare symbol `h` stands for; expressions using `h` fail without it.
pub fn parse_poly(src: &str, hbar: Option<&[i64]>) -> Result<MultiPoly> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        hbar: hbar.map(MultiPoly::t_combination),
    };
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(poly)
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", b as char)))
        }
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc.add_assign_ref(&t);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc.sub_assign_ref(&t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.factor()?;
            acc = acc.mul(&f);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MultiPoly> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.factor()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.factor()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.uint()?;
            if e > 64 {
                return Err(self.err("exponent too large"));
            }
            return Ok(base.pow(e as u32));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => self.rational(),
            Some(b'x') | Some(b't') => self.variable(),
            Some(b'h') => {
                self.pos += 1;
                match &self.hbar {
                    Some(h) => Ok(h.clone()),
                    None => Err(self.err("'h' requires a weighting to define it")),
                }
            }
            Some(c) => Err(self.err(&format!("unexpected character '{}'", c as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn uint(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("digits are ascii")
            .parse::<u64>()
            .map_err(|_| Error::Parse {
                pos: start,
                msg: "integer too large".into(),
            })
    }

    fn bigint(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected an integer"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("digits are ascii");
        Ok(text.parse::<BigInt>().expect("digit string"))
    }

    fn rational(&mut self) -> Result<MultiPoly> {
        let numer = self.bigint()?;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let denom_pos = self.pos;
            let denom = self.bigint()?;
            if denom.is_zero() {
                return Err(Error::Parse {
                    pos: denom_pos,
                    msg: "zero denominator".into(),
                });
            }
            return Ok(MultiPoly::constant(Coeff::new(numer, denom)));
        }
        Ok(MultiPoly::constant(Coeff::from_integer(numer)))
    }

    fn variable(&mut self) -> Result<MultiPoly> {
        let head = self.peek().expect("caller checked");
        let head_pos = self.pos;
        self.pos += 1;
        self.expect(b'[')?;
        let mut nums = vec![self.uint()?];
        while self.eat(b',') {
            nums.push(self.uint()?);
        }
        self.expect(b']')?;
        let small = |n: u64| -> Result<u8> {
            if (1..=255).contains(&n) {
                Ok((n - 1) as u8)
            } else {
                Err(Error::Parse {
                    pos: head_pos,
                    msg: format!("index {n} out of range"),
                })
            }
        };
        let var = match (head, nums.as_slice()) {
            (b't', [k]) => Var::T(small(*k)?),
            (b'x', [i, m]) => Var::X {
                slot: 0,
                vertex: small(*i)?,
                idx: small(*m)?,
            },
            (b'x', [s, i, m]) => {
                if !(1..=255).contains(s) {
                    return Err(Error::Parse {
                        pos: head_pos,
                        msg: format!("slot {s} out of range"),
                    });
                }
                Var::X {
                    slot: *s as u8,
                    vertex: small(*i)?,
                    idx: small(*m)?,
                }
            }
            _ => {
                return Err(Error::Parse {
                    pos: head_pos,
                    msg: "variable must be t[k], x[i,m], or x[s,i,m]".into(),
                })
            }
        };
        Ok(MultiPoly::var(var))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_arithmetic() {
        let p = parse_poly("x[1,1]^2 - 2*t[1] + 1/2", None).unwrap();
        assert_eq!(p.to_string(), "x[1,1]^2 - 2*t[1] + 1/2");
        let q = parse_poly("(x[1,1] + x[1,2]) * (x[1,1] - x[1,2])", None).unwrap();
        assert_eq!(q.to_string(), "-x[1,2]^2 + x[1,1]^2");
    }

    #[test]
    fn unary_minus_and_nesting() {
        let p = parse_poly("-(x[1,1] - 1)^2", None).unwrap();
        assert_eq!(p.to_string(), "-x[1,1]^2 + 2*x[1,1] - 1");
        let q = parse_poly("- - 3", None).unwrap();
        assert_eq!(q.to_string(), "3");
    }

    #[test]
    fn h_expands_to_the_weighting_form() {
        let p = parse_poly("2*h", Some(&[1, 1])).unwrap();
        assert_eq!(p.to_string(), "2*t[2] + 2*t[1]");
        let err = parse_poly("h", None).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn slotted_variables_parse() {
        let p = parse_poly("x[2,1,1] - x[1,1,1] - t[1]", None).unwrap();
        assert_eq!(p.to_string(), "x[2,1,1] - x[1,1,1] - t[1]");
    }

    #[test]
    fn error_positions_point_at_the_problem() {
        match parse_poly("x[1,1] + $", None) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 9),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_poly("1/0", None) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_poly("x[1,1", None).is_err());
        assert!(parse_poly("3 3", None).is_err());
    }
}
