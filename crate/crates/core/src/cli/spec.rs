//! The strategy mini-language.
//!
//! ```text
//! x:<real>                      time cutoff
//! d:<int>                       skip d-1 arrivals
//! cutoffs:<list>;tail=<real>    per-index cutoffs
//! skipfirst:a1=<real>,x=<real>
//! restart:x=<real>,y=<real>
//! onee                          x:1/e
//! ```

use std::fmt;
use std::str::FromStr;

use crate::dominance::{build_restart, build_skip_first};
use crate::error::Result;
use crate::strategy::{make_d_strategy, make_x_strategy, CutoffStrategy, Strategy};
use crate::INV_E;

#[derive(Debug, Clone, PartialEq)]
pub enum StrategySpec {
    X(f64),
    D(u64),
    Cutoffs { cutoffs: Vec<f64>, tail: f64 },
    SkipFirst { a1: f64, x: f64 },
    Restart { x: f64, y: f64 },
    OneOverE,
}

/// A syntax error at byte offset `position`.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("strategy spec error at position {position}: {reason}")]
pub struct ParseError {
    pub position: usize,
    pub reason: String,
}

fn err<T>(position: usize, reason: impl Into<String>) -> std::result::Result<T, ParseError> {
    Err(ParseError { position, reason: reason.into() })
}

/// Cursor over the spec text that tracks byte offsets.
struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn expect(&mut self, literal: &str) -> std::result::Result<(), ParseError> {
        if self.rest().starts_with(literal) {
            self.pos += literal.len();
            Ok(())
        } else {
            err(self.pos, format!("expected `{literal}`"))
        }
    }

    /// Text up to (not including) the next delimiter or the end.
    fn token(&mut self, delimiters: &[char]) -> (usize, &'a str) {
        let start = self.pos;
        let len = self.rest().find(|c| delimiters.contains(&c)).unwrap_or(self.rest().len());
        self.pos += len;
        (start, &self.text[start..start + len])
    }

    fn real(&mut self, delimiters: &[char]) -> std::result::Result<f64, ParseError> {
        let (at, tok) = self.token(delimiters);
        match tok.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ if tok.is_empty() => err(at, "expected a number"),
            _ => err(at, format!("`{tok}` is not a finite number")),
        }
    }

    fn end(&self) -> std::result::Result<(), ParseError> {
        if self.rest().is_empty() {
            Ok(())
        } else {
            err(self.pos, format!("unexpected trailing text `{}`", self.rest()))
        }
    }
}

impl FromStr for StrategySpec {
    type Err = ParseError;

    fn from_str(text: &str) -> std::result::Result<Self, ParseError> {
        let mut c = Cursor { text, pos: 0 };
        if text == "onee" {
            return Ok(StrategySpec::OneOverE);
        }
        let (at, kind) = c.token(&[':']);
        if c.rest().is_empty() {
            return err(at, format!("unknown strategy `{kind}`"));
        }
        c.expect(":")?;
        let spec = match kind {
            "x" => StrategySpec::X(c.real(&[])?),
            "d" => {
                let (at, tok) = c.token(&[]);
                match tok.parse::<u64>() {
                    Ok(d) if d >= 1 => StrategySpec::D(d),
                    _ => return err(at, format!("`{tok}` is not a positive integer")),
                }
            }
            "cutoffs" => {
                let mut cutoffs = Vec::new();
                if !c.rest().starts_with(';') {
                    loop {
                        cutoffs.push(c.real(&[',', ';'])?);
                        if c.rest().starts_with(',') {
                            c.expect(",")?;
                        } else {
                            break;
                        }
                    }
                }
                c.expect(";")?;
                c.expect("tail=")?;
                let tail = c.real(&[])?;
                StrategySpec::Cutoffs { cutoffs, tail }
            }
            "skipfirst" => {
                c.expect("a1=")?;
                let a1 = c.real(&[','])?;
                c.expect(",x=")?;
                let x = c.real(&[])?;
                StrategySpec::SkipFirst { a1, x }
            }
            "restart" => {
                c.expect("x=")?;
                let x = c.real(&[','])?;
                c.expect(",y=")?;
                let y = c.real(&[])?;
                StrategySpec::Restart { x, y }
            }
            other => return err(at, format!("unknown strategy `{other}`")),
        };
        c.end()?;
        Ok(spec)
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategySpec::X(x) => write!(f, "x:{x}"),
            StrategySpec::D(d) => write!(f, "d:{d}"),
            StrategySpec::Cutoffs { cutoffs, tail } => {
                let list: Vec<String> = cutoffs.iter().map(f64::to_string).collect();
                write!(f, "cutoffs:{};tail={tail}", list.join(","))
            }
            StrategySpec::SkipFirst { a1, x } => write!(f, "skipfirst:a1={a1},x={x}"),
            StrategySpec::Restart { x, y } => write!(f, "restart:x={x},y={y}"),
            StrategySpec::OneOverE => f.write_str("onee"),
        }
    }
}

impl StrategySpec {
    /// Build the strategy, validating parameter ranges.
    pub fn to_strategy(&self) -> Result<Strategy> {
        Ok(match self {
            StrategySpec::X(x) => make_x_strategy(*x)?.into(),
            StrategySpec::D(d) => make_d_strategy(*d)?.into(),
            StrategySpec::Cutoffs { cutoffs, tail } => CutoffStrategy::new(cutoffs.clone(), *tail)?.into(),
            StrategySpec::SkipFirst { a1, x } => build_skip_first(*a1, *x)?.strategy.into(),
            StrategySpec::Restart { x, y } => build_restart(*x, *y)?.strategy.into(),
            StrategySpec::OneOverE => make_x_strategy(INV_E)?.into(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_form() {
        assert_eq!("x:0.25".parse(), Ok(StrategySpec::X(0.25)));
        assert_eq!("d:4".parse(), Ok(StrategySpec::D(4)));
        assert_eq!("onee".parse(), Ok(StrategySpec::OneOverE));
        assert_eq!(
            "cutoffs:0.9,0.5;tail=0.3".parse(),
            Ok(StrategySpec::Cutoffs { cutoffs: vec![0.9, 0.5], tail: 0.3 })
        );
        assert_eq!("cutoffs:;tail=0.3".parse(), Ok(StrategySpec::Cutoffs { cutoffs: vec![], tail: 0.3 }));
        assert_eq!("skipfirst:a1=1,x=0.36".parse(), Ok(StrategySpec::SkipFirst { a1: 1.0, x: 0.36 }));
        assert_eq!("restart:x=0.4,y=0.2".parse(), Ok(StrategySpec::Restart { x: 0.4, y: 0.2 }));
    }

    #[test]
    fn errors_carry_positions() {
        let e = "x:abc".parse::<StrategySpec>().unwrap_err();
        assert_eq!(e.position, 2);
        let e = "cutoffs:0.5,;tail=0".parse::<StrategySpec>().unwrap_err();
        assert_eq!(e.position, 12);
        let e = "d:0".parse::<StrategySpec>().unwrap_err();
        assert_eq!(e.position, 2);
        let e = "restart:x=0.4;y=0.2".parse::<StrategySpec>().unwrap_err();
        assert_eq!(e.position, 10);
        let e = "zeta:1".parse::<StrategySpec>().unwrap_err();
        assert_eq!(e.position, 0);
        let e = "x:0.5junk".parse::<StrategySpec>().unwrap_err();
        assert_eq!(e.position, 2);
        assert!("x:inf".parse::<StrategySpec>().is_err());
        assert!("onee2".parse::<StrategySpec>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for text in ["x:0.36787944117144233", "d:7", "cutoffs:1,0.5;tail=0.1", "skipfirst:a1=1,x=0.3", "restart:x=0.4,y=0.2", "onee"] {
            let spec: StrategySpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
            assert_eq!(spec.to_string().parse::<StrategySpec>().unwrap(), spec);
        }
    }

    #[test]
    fn range_checks_happen_when_building() {
        let spec: StrategySpec = "x:1.5".parse().unwrap();
        assert!(spec.to_strategy().is_err());
        let spec: StrategySpec = "restart:x=0.2,y=0.1".parse().unwrap();
        assert!(spec.to_strategy().is_err());
    }
}
