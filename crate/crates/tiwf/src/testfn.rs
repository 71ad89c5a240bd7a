//! Monomial test functions written as `x^2*y`, `xy`, `x2`, `y^3`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub n: usize,
    pub m: usize,
}

impl Monomial {
    pub const fn new(n: usize, m: usize) -> Self {
        Self { n, m }
    }

    pub fn degree(&self) -> usize {
        self.n + self.m
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse test function {0:?}; expected a monomial such as x, y, xy, x^2, x^2*y")]
pub struct ParseMonomialError(String);

impl FromStr for Monomial {
    type Err = ParseMonomialError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseMonomialError(s.to_string());
        let text: String = s.chars().filter(|c| !c.is_whitespace() && *c != '*').collect();
        if text == "1" {
            return Ok(Monomial::new(0, 0));
        }
        if text.is_empty() {
            return Err(err());
        }
        let mut out = Monomial::new(0, 0);
        let mut chars = text.chars().peekable();
        while let Some(var) = chars.next() {
            if chars.peek() == Some(&'^') {
                chars.next();
            }
            let mut digits = String::new();
            while let Some(d) = chars.peek().filter(|c| c.is_ascii_digit()) {
                digits.push(*d);
                chars.next();
            }
            let power = if digits.is_empty() { 1 } else { digits.parse().map_err(|_| err())? };
            match var {
                'x' => out.n += power,
                'y' => out.m += power,
                _ => return Err(err()),
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part = |v: char, k: usize| match k {
            0 => None,
            1 => Some(v.to_string()),
            _ => Some(format!("{v}^{k}")),
        };
        let parts: Vec<String> = [part('x', self.n), part('y', self.m)].into_iter().flatten().collect();
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}

impl Serialize for Monomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Monomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_spellings() {
        for (s, n, m) in [("x", 1, 0), ("y", 0, 1), ("xy", 1, 1), ("x2", 2, 0), ("x^2*y", 2, 1), ("x^2 y^3", 2, 3), ("1", 0, 0)] {
            assert_eq!(s.parse::<Monomial>().unwrap(), Monomial::new(n, m), "{s}");
        }
        assert!("z".parse::<Monomial>().is_err());
        assert!("".parse::<Monomial>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for mono in [Monomial::new(1, 0), Monomial::new(2, 1), Monomial::new(0, 3), Monomial::new(0, 0)] {
            assert_eq!(mono.to_string().parse::<Monomial>().unwrap(), mono);
        }
        assert_eq!(Monomial::new(2, 1).to_string(), "x^2*y");
    }
}
