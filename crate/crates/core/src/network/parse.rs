//! Parser for the plain-text reaction format.
//!
//! One reaction per line, `#` starts a comment:
//!
//! ```text
//! # reversible pair and an inflow
//! A + B <-> C, kf=1, kb=0.5
//! 2A -> B, k=3
//! 0 -> A, k=1e-2
//! ```
//!
//! Grammar:
//!
//! ```text
//! line := sum "->" sum "," "k=" number
//!       | sum "<->" sum "," "kf=" number "," "kb=" number
//! sum  := "0" | term ("+" term)*
//! term := [coefficient] identifier      coefficient := decimal ≥ 1
//! ```
//!
//! Species are indexed in first-appearance order; `<->` expands into two
//! `Reaction` records carrying the forward and backward rates. Coefficients
//! are exact rationals (decimal literals), rates are floats.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Complex, NetworkError, Rational, Reaction, ReactionNetwork};

/// Syntax or semantic error with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        Self { line, col, message: message.into() }
    }
}

pub(super) fn parse_network(text: &str) -> Result<ReactionNetwork, ParseError> {
    let mut species: Vec<String> = Vec::new();
    let mut raw: Vec<RawReaction> = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let body = match line.find('#') {
            Some(p) => &line[..p],
            None => line,
        };
        if body.trim().is_empty() {
            continue;
        }
        let mut cursor = Cursor::new(body, line_no);
        cursor.parse_line(&mut species, &mut raw)?;
    }

    if raw.is_empty() {
        return Err(ParseError::new(1, 1, "no reactions"));
    }

    let count = species.len();
    let mut reactions = Vec::with_capacity(raw.len());
    for r in raw {
        let reactant = dense_complex(&r.lhs, count);
        let product = dense_complex(&r.rhs, count);
        let push = |reactions: &mut Vec<Reaction>, from: &Complex, to: &Complex, k: f64| {
            Reaction::new(from.clone(), to.clone(), k).map(|re| reactions.push(re))
        };
        let map_err = |e: NetworkError| ParseError::new(r.line, 1, e.to_string());
        push(&mut reactions, &reactant, &product, r.k_forward).map_err(map_err)?;
        if let Some(kb) = r.k_backward {
            push(&mut reactions, &product, &reactant, kb).map_err(map_err)?;
        }
    }

    ReactionNetwork::new(species, reactions).map_err(|e| ParseError::new(1, 1, e.to_string()))
}

struct RawReaction {
    line: usize,
    lhs: Vec<(usize, Rational)>,
    rhs: Vec<(usize, Rational)>,
    k_forward: f64,
    k_backward: Option<f64>,
}

fn dense_complex(sparse: &[(usize, Rational)], len: usize) -> Complex {
    let mut coeffs = alloc::vec![Rational::zero(); len];
    for (i, c) in sparse {
        coeffs[*i] = c.clone();
    }
    Complex::new(coeffs).expect("parser validated all coefficients")
}

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    _raw: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(body: &'a str, line: usize) -> Self {
        Self { chars: body.chars().collect(), pos: 0, line, _raw: body }
    }

    fn col(&self) -> usize {
        self.pos + 1
    }

    fn err(&self, col: usize, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.line, col, msg)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        let end = self.pos + token.chars().count();
        if end <= self.chars.len() && self.chars[self.pos..end].iter().collect::<String>() == token
        {
            self.pos = end;
            true
        } else {
            false
        }
    }

    fn parse_line(
        &mut self,
        species: &mut Vec<String>,
        out: &mut Vec<RawReaction>,
    ) -> Result<(), ParseError> {
        let lhs = self.parse_sum(species)?;
        self.skip_ws();
        let col = self.col();
        let reversible = if self.eat("<->") {
            true
        } else if self.eat("->") {
            false
        } else {
            return Err(self.err(col, format!("expected `->` or `<->`, found {}", self.describe())));
        };
        let rhs = self.parse_sum(species)?;

        self.expect_char(',')?;
        let (k_forward, k_backward) = if reversible {
            let kf = self.parse_rate("kf")?;
            self.expect_char(',')?;
            let kb = self.parse_rate("kb")?;
            (kf, Some(kb))
        } else {
            (self.parse_rate("k")?, None)
        };

        self.skip_ws();
        if self.peek().is_some() {
            return Err(self.err(self.col(), format!("unexpected trailing input {}", self.describe())));
        }

        out.push(RawReaction { line: self.line, lhs, rhs, k_forward, k_backward });
        Ok(())
    }

    fn describe(&self) -> String {
        match self.peek() {
            Some(c) => format!("`{c}`"),
            None => "end of line".to_string(),
        }
    }

    fn expect_char(&mut self, c: char) -> Result<(), ParseError> {
        self.skip_ws();
        let col = self.col();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(col, format!("expected `{c}`, found {}", self.describe())))
        }
    }

    fn parse_sum(&mut self, species: &mut Vec<String>) -> Result<Vec<(usize, Rational)>, ParseError> {
        let mut terms: Vec<(usize, Rational)> = Vec::new();
        loop {
            self.skip_ws();
            let col = self.col();
            let coeff = if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                let c = self.parse_decimal()?;
                self.skip_ws();
                let ident_follows = matches!(self.peek(), Some(ch) if is_ident_start(ch));
                if !ident_follows {
                    if c.is_zero() && terms.is_empty() {
                        // the sum "0": the empty complex
                        return Ok(terms);
                    }
                    return Err(self.err(self.col(), "expected species name after coefficient"));
                }
                if c.is_zero() {
                    return Err(self.err(col, "zero coefficient: omit the term, or write `0` for the empty complex"));
                }
                if c < Rational::one() {
                    return Err(self.err(col, format!("coefficient {c} outside {{0}} ∪ [1,∞)")));
                }
                c
            } else {
                Rational::one()
            };

            let ident_col = self.col();
            let name = self.parse_identifier()?;
            let index = match species.iter().position(|s| s == &name) {
                Some(i) => i,
                None => {
                    species.push(name.clone());
                    species.len() - 1
                }
            };
            if terms.iter().any(|(i, _)| *i == index) {
                return Err(self.err(ident_col, format!("duplicate species `{name}` in complex")));
            }
            terms.push((index, coeff));

            self.skip_ws();
            if self.peek() == Some('+') {
                self.pos += 1;
            } else {
                return Ok(terms);
            }
        }
    }

    /// `digits ["." digits]` as an exact rational.
    fn parse_decimal(&mut self) -> Result<Rational, ParseError> {
        let col = self.col();
        let mut int_part = String::new();
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            int_part.push(self.bump().unwrap());
        }
        let mut frac_part = String::new();
        if self.peek() == Some('.') {
            self.pos += 1;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                frac_part.push(self.bump().unwrap());
            }
            if frac_part.is_empty() {
                return Err(self.err(self.col(), "expected digits after decimal point"));
            }
        }
        let digits = format!("{int_part}{frac_part}");
        let numer: BigInt = digits
            .parse()
            .map_err(|_| self.err(col, "invalid decimal literal"))?;
        let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
        Ok(Rational::new(numer, denom))
    }

    fn parse_identifier(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let col = self.col();
        if !matches!(self.peek(), Some(c) if is_ident_start(c)) {
            return Err(self.err(col, format!("expected species name, found {}", self.describe())));
        }
        let mut name = String::new();
        while matches!(self.peek(), Some(c) if is_ident_continue(c)) {
            name.push(self.bump().unwrap());
        }
        Ok(name)
    }

    /// `<key>=<number>` with a strictly positive finite number.
    fn parse_rate(&mut self, key: &str) -> Result<f64, ParseError> {
        self.skip_ws();
        let col = self.col();
        if !self.eat(key) {
            return Err(self.err(col, format!("expected `{key}=`, found {}", self.describe())));
        }
        self.skip_ws();
        if self.peek() != Some('=') {
            return Err(self.err(self.col(), format!("expected `=` after `{key}`")));
        }
        self.pos += 1;
        self.skip_ws();
        let col = self.col();
        let mut token = String::new();
        while matches!(self.peek(), Some(c) if c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-')) {
            token.push(self.bump().unwrap());
        }
        let value: f64 = token
            .parse()
            .map_err(|_| self.err(col, format!("invalid number `{token}`")))?;
        if !(value > 0.0) || !value.is_finite() {
            return Err(self.err(col, format!("rate must be positive and finite, got {value}")));
        }
        Ok(value)
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn reversible_pair_expands() {
        let net = ReactionNetwork::parse("A <-> B, kf=1, kb=1").unwrap();
        assert_eq!(net.species(), ["A", "B"]);
        assert_eq!(net.reaction_count(), 2);
        let r0 = &net.reactions()[0];
        assert_eq!(r0.reactant().float_coeffs(), [1.0, 0.0]);
        assert_eq!(r0.product().float_coeffs(), [0.0, 1.0]);
        assert_eq!(r0.rate(), 1.0);
        let r1 = &net.reactions()[1];
        assert_eq!(r1.reactant().float_coeffs(), [0.0, 1.0]);
        assert_eq!(r1.product().float_coeffs(), [1.0, 0.0]);
    }

    #[test]
    fn integer_coefficient() {
        let net = ReactionNetwork::parse("2A -> B, k=3").unwrap();
        assert_eq!(net.species(), ["A", "B"]);
        assert_eq!(net.reaction_count(), 1);
        let r = &net.reactions()[0];
        assert_eq!(r.reactant().float_coeffs(), [2.0, 0.0]);
        assert_eq!(r.product().float_coeffs(), [0.0, 1.0]);
        assert_eq!(r.rate(), 3.0);
    }

    #[test]
    fn fractional_coefficient_below_one_rejected() {
        let err = ReactionNetwork::parse("0.5A -> B, k=1").unwrap_err();
        assert_eq!((err.line, err.col), (1, 1));
        assert!(err.message.contains("coefficient 1/2 outside"), "{}", err.message);
    }

    #[test]
    fn decimal_coefficient_is_exact() {
        let net = ReactionNetwork::parse("1.5A -> B, k=1").unwrap();
        let c = &net.reactions()[0].reactant().coeffs()[0];
        assert_eq!(c, &Rational::new(3.into(), 2.into()));
        assert_eq!(c.to_f64().unwrap(), 1.5);
    }

    #[test]
    fn empty_complex_and_comments() {
        let text = "# inflow/outflow\n0 -> A, k=2  # source\nA -> 0, k=1\n";
        let net = ReactionNetwork::parse(text).unwrap();
        assert_eq!(net.species(), ["A"]);
        assert_eq!(net.reaction_count(), 2);
        assert!(net.reactions()[0].reactant().float_coeffs().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn rate_errors_carry_position() {
        let err = ReactionNetwork::parse("A -> B, k=0").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.message.contains("rate must be positive"));
        let err = ReactionNetwork::parse("A -> B, k=-2").unwrap_err();
        assert!(err.message.contains("rate must be positive"));
    }

    #[test]
    fn syntax_error_position() {
        let err = ReactionNetwork::parse("A -> B k=1").unwrap_err();
        assert_eq!((err.line, err.col), (1, 8));
        assert!(err.message.contains("expected `,`"));
        let err = ReactionNetwork::parse("A = B, k=1").unwrap_err();
        assert_eq!(err.col, 3);
    }

    #[test]
    fn duplicate_species_in_sum_rejected() {
        let err = ReactionNetwork::parse("A + A -> B, k=1").unwrap_err();
        assert!(err.message.contains("duplicate species `A`"));
    }

    #[test]
    fn self_loop_rejected() {
        let err = ReactionNetwork::parse("A -> A, k=1").unwrap_err();
        assert!(err.message.contains("coincide"));
    }

    #[test]
    fn empty_input_rejected() {
        for text in ["", "   \n# only a comment\n"] {
            let err = ReactionNetwork::parse(text).unwrap_err();
            assert_eq!(err.message, "no reactions");
        }
    }

    #[test]
    fn first_appearance_indexing_across_lines() {
        let net = ReactionNetwork::parse("C -> D, k=1\nA + D -> C, k=2").unwrap();
        assert_eq!(net.species(), ["C", "D", "A"]);
    }

    #[test]
    fn scientific_rate_notation() {
        let net = ReactionNetwork::parse("A -> B, k=1e-3").unwrap();
        assert_eq!(net.reactions()[0].rate(), 1e-3);
    }

    #[test]
    fn json_round_trip() {
        let net = ReactionNetwork::parse("A+B <-> C, kf=1, kb=0.5").unwrap();
        let json = serde_json::to_string(&net).unwrap();
        assert!(json.contains("\"species\""));
        assert!(json.contains("\"yp\""));
        let back: ReactionNetwork = serde_json::from_str(&json).unwrap();
        assert_eq!(back.species(), net.species());
        assert_eq!(back.reaction_count(), net.reaction_count());
        assert_eq!(back.wegscheider_matrix(), net.wegscheider_matrix());
    }
}
