use std::fmt::Write as _;

use super::automorphism::Automorphism;
use super::word::{Letter, Word};
use crate::error::{Error, Result};

/// Named free basis `{x_1, …, x_N}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis {
    names: Vec<String>,
}

impl Basis {
    pub fn new(names: Vec<String>) -> Result<Self> {
        if names.len() < 2 {
            return Err(Error::Input(format!(
                "basis needs at least 2 generators, got {}",
                names.len()
            )));
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || !n.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(Error::Input(format!(
                    "generator name {n:?} is not an identifier"
                )));
            }
            if n.chars().next().is_some_and(|c| c.is_ascii_digit()) {
                return Err(Error::Input(format!(
                    "generator name {n:?} starts with a digit"
                )));
            }
            if names[..i].contains(n) {
                return Err(Error::Input(format!("duplicate generator name {n:?}")));
            }
        }
        Ok(Basis { names })
    }

    /// `x, y, z` for rank ≤ 3, otherwise `x1 … xN`.
    pub fn standard(rank: usize) -> Self {
        let names = if rank <= 3 {
            ["x", "y", "z"][..rank]
                .iter()
                .map(|s| s.to_string())
                .collect()
        } else {
            (1..=rank).map(|i| format!("x{i}")).collect()
        };
        Basis::new(names).expect("standard names are valid")
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn format_letter(&self, l: Letter) -> String {
        let name = &self.names[l.index()];
        if l.is_inverse() {
            format!("{name}^-1")
        } else {
            name.clone()
        }
    }

    /// Space-separated letters, `1` for the identity.
    pub fn format_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".into();
        }
        let mut s = String::with_capacity(w.len() * 2);
        for (i, &l) in w.letters().iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            s.push_str(&self.format_letter(l));
        }
        s
    }

    /// Parses a word such as `x y^-1 x` (spaces optional between
    /// single-character names; `1` or empty is the identity).
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut letters = Vec::new();
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        // Longest names first so `x1` wins over `x`.
        let mut order: Vec<usize> = (0..self.rank()).collect();
        order.sort_by_key(|&k| std::cmp::Reverse(self.names[k].chars().count()));
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c == '1' && !self.starts_name_at(&chars, i) {
                i += 1;
                continue;
            }
            let Some(k) = order.iter().copied().find(|&k| {
                let name: Vec<char> = self.names[k].chars().collect();
                chars[i..].starts_with(&name)
            }) else {
                return Err(Error::Input(format!(
                    "unknown generator at {:?} in word {text:?}",
                    chars[i..].iter().collect::<String>()
                )));
            };
            i += self.names[k].chars().count();
            let mut inverse = false;
            let mut j = i;
            while j < chars.len() && chars[j].is_whitespace() {
                j += 1;
            }
            if chars[j..].starts_with(&['^', '-', '1']) {
                inverse = true;
                i = j + 3;
            }
            letters.push(Letter::new(k, inverse));
        }
        Ok(Word::reduce(letters))
    }

    fn starts_name_at(&self, chars: &[char], i: usize) -> bool {
        self.names.iter().any(|n| {
            let name: Vec<char> = n.chars().collect();
            chars[i..].starts_with(&name)
        })
    }

    /// `a -> ..., b -> ...` substitution list.
    fn parse_maps(&self, text: &str) -> Result<Vec<Word>> {
        let mut images: Vec<Option<Word>> = vec![None; self.rank()];
        for part in text.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (lhs, rhs) = part
                .split_once("->")
                .ok_or_else(|| Error::Input(format!("expected `gen -> word` in {part:?}")))?;
            let lhs = lhs.trim();
            let k = self
                .names
                .iter()
                .position(|n| n == lhs)
                .ok_or_else(|| Error::Input(format!("unknown generator {lhs:?}")))?;
            if images[k].is_some() {
                return Err(Error::Input(format!("generator {lhs:?} mapped twice")));
            }
            images[k] = Some(self.parse_word(rhs)?);
        }
        images
            .into_iter()
            .enumerate()
            .map(|(k, w)| {
                w.ok_or_else(|| {
                    Error::Input(format!("no image given for generator {:?}", self.names[k]))
                })
            })
            .collect()
    }

    /// Parses `name: x -> x y, y -> x | inverse: x -> y, y -> y^-1 x`.
    pub fn parse_automorphism(&self, text: &str) -> Result<(String, Automorphism)> {
        let (fwd, inv) = text
            .split_once('|')
            .ok_or_else(|| Error::Input("automorphism needs `| inverse: ...`".into()))?;
        let (name, maps) = fwd
            .split_once(':')
            .ok_or_else(|| Error::Input("automorphism needs `name: ...`".into()))?;
        let name = name.trim();
        if name.is_empty() {
            return Err(Error::Input("automorphism name is empty".into()));
        }
        let inv = inv.trim();
        let inv_maps = inv
            .strip_prefix("inverse")
            .and_then(|r| r.trim_start().strip_prefix(':'))
            .ok_or_else(|| Error::Input(format!("expected `inverse:` after `|` in {name:?}")))?;
        let images = self.parse_maps(maps)?;
        let inverse_images = self.parse_maps(inv_maps)?;
        let a = Automorphism::new(images, inverse_images).map_err(|e| match e {
            Error::Internal(m) => Error::Input(format!("{name}: {m}")),
            other => other,
        })?;
        Ok((name.to_string(), a))
    }

    pub fn format_automorphism(&self, name: &str, a: &Automorphism) -> String {
        let maps = |ws: &[Word]| {
            let mut s = String::new();
            for (i, w) in ws.iter().enumerate() {
                if i > 0 {
                    s.push_str(", ");
                }
                let _ = write!(s, "{} -> {}", self.names[i], self.format_word(w));
            }
            s
        };
        format!(
            "{name}: {} | inverse: {}",
            maps(a.images()),
            maps(a.inverse_images())
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_fibonacci_text() {
        let b = Basis::standard(2);
        let (name, a) = b
            .parse_automorphism("fib: x -> x y, y -> x | inverse: x -> y, y -> y^-1 x")
            .unwrap();
        assert_eq!(name, "fib");
        assert_eq!(a, Automorphism::fibonacci());
        let (_, a2) = b
            .parse_automorphism("fib:x->xy,y->x|inverse:x->y,y->y^-1x")
            .unwrap();
        assert_eq!(a2, a);
        let text = b.format_automorphism("fib", &a);
        assert_eq!(b.parse_automorphism(&text).unwrap().1, a);
    }

    #[test]
    fn parse_errors() {
        let b = Basis::standard(2);
        assert!(b.parse_word("x q").is_err());
        assert!(b.parse_automorphism("fib: x -> x y, y -> x").is_err());
        assert!(b
            .parse_automorphism("bad: x -> x y, y -> x | inverse: x -> y, y -> x")
            .is_err());
        assert!(b
            .parse_automorphism("bad: x -> x | inverse: x -> x")
            .is_err());
    }

    #[test]
    fn words_round_trip() {
        let b = Basis::standard(4);
        let w = b.parse_word("x1 x4^-1 x2 x2").unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(b.parse_word(&b.format_word(&w)).unwrap(), w);
        assert_eq!(
            Basis::standard(2).parse_word("1").unwrap(),
            Word::identity()
        );
        assert_eq!(Basis::standard(2).format_word(&Word::identity()), "1");
    }

    #[test]
    fn basis_validation() {
        assert!(Basis::new(vec!["x".into()]).is_err());
        assert!(Basis::new(vec!["x".into(), "x".into()]).is_err());
        assert!(Basis::new(vec!["a".into(), "b c".into()]).is_err());
    }
}
