//! Text grammar for ring elements, round-tripping bit-exactly with the
//! canonical printer:
//!
//! ```text
//! element  := "0" | term (("+"|"-") term)*
//! term     := [integer "*"] monomial | integer
//! monomial := "t{" idxlist "}" "x{" idxlist "}"
//! idxlist  := "" | int ("," int)*
//! ```
//!
//! Indices are 1-based and strictly ascending; the unit monomial is
//! `t{}x{}` and a bare integer `k` abbreviates `k*t{}x{}`.  Whitespace is
//! permitted between tokens.  The printer emits terms in canonical
//! ascending `(T, S)` order, folds the sign of later terms into the
//! separator, and renders the unit monomial as a bare integer.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{Error, Result};

use super::{Monomial, Params, RingElem};

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let write_set = |f: &mut fmt::Formatter<'_>, mask: u16| -> fmt::Result {
            let mut first = true;
            for i in 1..=super::MAX_ARITY {
                if mask & (1 << (i - 1)) != 0 {
                    if !first {
                        write!(f, ",")?;
                    }
                    write!(f, "{i}")?;
                    first = false;
                }
            }
            Ok(())
        };
        write!(f, "t{{")?;
        write_set(f, self.ts)?;
        write!(f, "}}x{{")?;
        write_set(f, self.xs)?;
        write!(f, "}}")
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (pos, (mono, coeff)) in self.terms.iter().enumerate() {
            let is_unit = *mono == Monomial::one();
            if pos == 0 {
                if is_unit {
                    write!(f, "{coeff}")?;
                } else if coeff.is_one() {
                    write!(f, "{mono}")?;
                } else {
                    write!(f, "{coeff}*{mono}")?;
                }
            } else {
                let sep = if coeff.is_negative() { " - " } else { " + " };
                let abs = coeff.abs();
                write!(f, "{sep}")?;
                if is_unit {
                    write!(f, "{abs}")?;
                } else if abs.is_one() {
                    write!(f, "{mono}")?;
                } else {
                    write!(f, "{abs}*{mono}")?;
                }
            }
        }
        Ok(())
    }
}

impl RingElem {
    /// Parses the element grammar in the given ring.
    pub fn parse(params: Params, input: &str) -> Result<RingElem> {
        let mut p = Parser {
            bytes: input.as_bytes(),
            pos: 0,
        };
        p.skip_ws();
        let mut terms: Vec<(Monomial, BigInt)> = Vec::new();
        let mut sign = p.take_sign();
        loop {
            let (mono, coeff) = p.parse_term()?;
            terms.push((mono, if sign < 0 { -coeff } else { coeff }));
            p.skip_ws();
            match p.peek() {
                Some(b'+') => {
                    p.pos += 1;
                    sign = 1;
                }
                Some(b'-') => {
                    p.pos += 1;
                    sign = -1;
                }
                None => break,
                Some(c) => {
                    return Err(p.error(format!("unexpected character '{}'", c as char)));
                }
            }
            p.skip_ws();
        }
        RingElem::from_terms(params, terms)
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            at: self.pos,
            msg: msg.into(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ') | Some(b'\t')) {
            self.pos += 1;
        }
    }

    fn take_sign(&mut self) -> i8 {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.skip_ws();
                -1
            }
            Some(b'+') => {
                self.pos += 1;
                self.skip_ws();
                1
            }
            _ => 1,
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", c as char)))
        }
    }

    fn parse_uint(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected an integer"));
        }
        BigInt::parse_bytes(&self.bytes[start..self.pos], 10)
            .ok_or_else(|| self.error("invalid integer"))
    }

    fn parse_index(&mut self) -> Result<usize> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected an index"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.error("invalid index"))
    }

    fn parse_idxlist(&mut self) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        self.skip_ws();
        if self.peek() == Some(b'}') {
            return Ok(out);
        }
        loop {
            self.skip_ws();
            let idx = self.parse_index()?;
            if let Some(&last) = out.last() {
                if idx <= last {
                    return Err(self.error("indices must be strictly ascending"));
                }
            }
            out.push(idx);
            self.skip_ws();
            if self.peek() == Some(b',') {
                self.pos += 1;
            } else {
                return Ok(out);
            }
        }
    }

    fn parse_monomial(&mut self) -> Result<Monomial> {
        self.expect(b't')?;
        self.expect(b'{')?;
        let ts = self.parse_idxlist()?;
        self.expect(b'}')?;
        self.skip_ws();
        self.expect(b'x')?;
        self.expect(b'{')?;
        let xs = self.parse_idxlist()?;
        self.expect(b'}')?;
        Monomial::from_indices(&ts, &xs).map_err(|e| self.error(e.to_string()))
    }

    /// One unsigned term: `[integer "*"] monomial | integer` (a leading
    /// sign before a bare monomial is handled by the caller).
    fn parse_term(&mut self) -> Result<(Monomial, BigInt)> {
        self.skip_ws();
        match self.peek() {
            Some(b'0'..=b'9') => {
                let coeff = self.parse_uint()?;
                self.skip_ws();
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                    self.skip_ws();
                    let mono = self.parse_monomial()?;
                    Ok((mono, coeff))
                } else {
                    Ok((Monomial::one(), coeff))
                }
            }
            Some(b't') => Ok((self.parse_monomial()?, BigInt::one())),
            Some(c) => Err(self.error(format!("unexpected character '{}'", c as char))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Params, Q, RingElem};

    fn params(n: usize, q: u64) -> Params {
        Params::new(n, Q::parse(q).unwrap()).unwrap()
    }

    #[test]
    fn prints_spec_examples() {
        let p = params(2, 2);
        let e = RingElem::parse(p, "t{1}x{} - 2*t{}x{1,2}").unwrap();
        assert_eq!(e.to_string(), "t{1}x{} - 2*t{}x{1,2}");
        assert_eq!(RingElem::zero(p).to_string(), "0");
        assert_eq!(RingElem::unit(p).to_string(), "1");
        assert_eq!(RingElem::unit(p).neg().to_string(), "-1");
        assert_eq!(
            RingElem::generator_t(p, 1).unwrap().neg().to_string(),
            "-1*t{1}x{}"
        );
    }

    #[test]
    fn canonical_term_order() {
        let p = params(2, 2);
        // ascending (T, S): x-free terms first, then by x-subset bits
        let e = RingElem::parse(p, "t{}x{1,2} + t{2}x{1} + 3 + t{1}x{}").unwrap();
        assert_eq!(e.to_string(), "3 + t{1}x{} + t{2}x{1} + t{}x{1,2}");
    }

    #[test]
    fn parse_accepts_grammar_forms() {
        let p = params(2, 2);
        assert_eq!(RingElem::parse(p, "0").unwrap(), RingElem::zero(p));
        assert_eq!(
            RingElem::parse(p, "5").unwrap(),
            RingElem::scalar(p, 5)
        );
        assert_eq!(
            RingElem::parse(p, "1*t{}x{}").unwrap(),
            RingElem::unit(p)
        );
        // repeated monomials accumulate; cancellation prunes to zero
        assert_eq!(
            RingElem::parse(p, "t{1}x{} - t{1}x{}").unwrap(),
            RingElem::zero(p)
        );
        // whitespace tolerance
        assert_eq!(
            RingElem::parse(p, "  2 * t{1}x{}   +   t{}x{2} ").unwrap(),
            RingElem::parse(p, "2*t{1}x{}+t{}x{2}").unwrap()
        );
        // leading sign on the first term
        assert_eq!(
            RingElem::parse(p, "-2*t{1}x{}").unwrap(),
            RingElem::generator_t(p, 1).unwrap().scale(-2)
        );
    }

    #[test]
    fn parse_rejects_malformed_input() {
        let p = params(2, 2);
        assert!(RingElem::parse(p, "").is_err());
        assert!(RingElem::parse(p, "t{1}").is_err());
        assert!(RingElem::parse(p, "t{2,1}x{}").is_err());
        assert!(RingElem::parse(p, "t{1,1}x{}").is_err());
        assert!(RingElem::parse(p, "t{3}x{}").is_err());
        assert!(RingElem::parse(p, "t{0}x{}").is_err());
        assert!(RingElem::parse(p, "2**t{1}x{}").is_err());
        assert!(RingElem::parse(p, "t{1}x{} + ").is_err());
        assert!(RingElem::parse(p, "t{1}x{} junk").is_err());
    }

    #[test]
    fn json_wrapper() {
        let p = params(2, 2);
        let e = RingElem::parse(p, "t{1}x{} - 2*t{}x{1,2}").unwrap();
        let js = serde_json::to_string(&e).unwrap();
        assert_eq!(js, r#"{"n":2,"q":2,"expr":"t{1}x{} - 2*t{}x{1,2}"}"#);
        let back: RingElem = serde_json::from_str(&js).unwrap();
        assert_eq!(back, e);
        // hopf-mode data deserializes; other squares do not
        assert!(serde_json::from_str::<RingElem>(r#"{"n":1,"q":1,"expr":"t{1}x{}"}"#).is_ok());
        assert!(serde_json::from_str::<RingElem>(r#"{"n":1,"q":4,"expr":"t{1}x{}"}"#).is_err());
    }

    #[test]
    fn round_trip_random() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for n in 1..=4 {
            let p = params(n, 3);
            for _ in 0..100 {
                let e = super::super::random_elem(p, &mut rng, 6, 9);
                let printed = e.to_string();
                let back = RingElem::parse(p, &printed).unwrap();
                assert_eq!(back, e, "round trip through {printed:?}");
                assert_eq!(back.to_string(), printed);
            }
        }
    }
}
