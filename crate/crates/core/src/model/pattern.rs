use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shift-invariant replacement rule: when species `i` holds the minimum,
/// every species in `i + E_0 (mod N)` gets a fresh fitness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplacementPattern {
    n: usize,
    /// Sorted residues in `0..n`, always containing 0.
    base: Vec<usize>,
    literal: PatternLiteral,
}

impl ReplacementPattern {
    /// Builds a pattern from signed offsets, reduced modulo `n`.
    pub fn from_offsets<I>(n: usize, offsets: I) -> Result<Self>
    where
        I: IntoIterator<Item = i64>,
    {
        let offsets: Vec<i64> = offsets.into_iter().collect();
        let base = reduce(n, &offsets)?;
        if !base.contains(&0) {
            return Err(Error::Pattern(
                "base set must contain 0 (the minimum species is always replaced)".into(),
            ));
        }
        Ok(Self {
            n,
            base,
            literal: PatternLiteral::BaseSet(offsets),
        })
    }

    /// `E_i = {i-1, i, i+1}`.
    pub fn isotropic(n: usize) -> Result<Self> {
        let mut p = Self::from_offsets(n, [-1, 0, 1])?;
        p.literal = PatternLiteral::Isotropic;
        Ok(p)
    }

    /// `E_i = {i, i+1}`.
    pub fn anisotropic(n: usize) -> Result<Self> {
        let mut p = Self::from_offsets(n, [0, 1])?;
        p.literal = PatternLiteral::Anisotropic;
        Ok(p)
    }

    /// `E_0 = Z_N` minus the given offsets.
    pub fn complement(n: usize, excluded: &[i64]) -> Result<Self> {
        let excluded_res = reduce(n, excluded)?;
        if excluded_res.contains(&0) {
            return Err(Error::Pattern(
                "the minimum species (offset 0) cannot be excluded".into(),
            ));
        }
        let base: Vec<i64> = (0..n as i64)
            .filter(|j| !excluded_res.contains(&(*j as usize)))
            .collect();
        let mut p = Self::from_offsets(n, base)?;
        p.literal = PatternLiteral::Complement(excluded.to_vec());
        Ok(p)
    }

    /// Every species is replaced at every step.
    pub fn all_replaced(n: usize) -> Result<Self> {
        Self::from_offsets(n, 0..n as i64)
    }

    pub fn n_species(&self) -> usize {
        self.n
    }

    pub fn base_set(&self) -> &[usize] {
        &self.base
    }

    pub fn complement_set(&self) -> Vec<usize> {
        (0..self.n).filter(|j| !self.base.contains(j)).collect()
    }

    pub fn literal(&self) -> &PatternLiteral {
        &self.literal
    }

    /// `E_i = i + E_0`, in the order of the sorted base set.
    pub fn replacement_set(&self, i: usize) -> Vec<usize> {
        debug_assert!(i < self.n);
        self.base.iter().map(|j| (i + j) % self.n).collect()
    }

    #[inline]
    pub fn replaces(&self, i: usize, species: usize) -> bool {
        let offset = (species + self.n - i % self.n) % self.n;
        self.base.binary_search(&offset).is_ok()
    }

    pub fn is_all_replaced(&self) -> bool {
        self.base.len() == self.n
    }

    /// `Some(k)` when `E_0 = Z_N \ {k}`.
    pub fn one_non_replaced(&self) -> Option<usize> {
        match self.complement_set()[..] {
            [k] => Some(k),
            _ => None,
        }
    }

    /// `Some(k)` when `E_0 = Z_N \ {k, k+1}` with `k ∉ {-2, -1, 0, 1}`.
    pub fn two_non_replaced(&self) -> Option<usize> {
        let c = self.complement_set();
        if c.len() != 2 {
            return None;
        }
        let n = self.n;
        let k = if (c[0] + 1) % n == c[1] {
            c[0]
        } else if (c[1] + 1) % n == c[0] {
            c[1]
        } else {
            return None;
        };
        two_site_k_valid(n, k).then_some(k)
    }
}

/// `k ∉ {-2, -1, 0, 1} (mod n)`.
pub fn two_site_k_valid(n: usize, k: usize) -> bool {
    let k = k % n;
    ![n - 2, n - 1, 0, 1].contains(&k)
}

fn reduce(n: usize, offsets: &[i64]) -> Result<Vec<usize>> {
    if n < 3 {
        return Err(Error::Pattern(format!("need at least 3 species, got {n}")));
    }
    if offsets.is_empty() {
        return Err(Error::Pattern("empty offset set".into()));
    }
    let mut out: Vec<usize> = offsets
        .iter()
        .map(|&j| j.rem_euclid(n as i64) as usize)
        .collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

impl fmt::Display for ReplacementPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.literal)
    }
}

/// Textual pattern syntax: `isotropic`, `anisotropic`, `complement:[k]`,
/// `complement:[k,k+1]` or `base_set:[j1,j2,...]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum PatternLiteral {
    Isotropic,
    Anisotropic,
    Complement(Vec<i64>),
    BaseSet(Vec<i64>),
}

impl PatternLiteral {
    pub fn build(&self, n: usize) -> Result<ReplacementPattern> {
        match self {
            Self::Isotropic => ReplacementPattern::isotropic(n),
            Self::Anisotropic => ReplacementPattern::anisotropic(n),
            Self::Complement(ks) => ReplacementPattern::complement(n, ks),
            Self::BaseSet(js) => ReplacementPattern::from_offsets(n, js.iter().copied()),
        }
    }
}

impl FromStr for PatternLiteral {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "isotropic" => return Ok(Self::Isotropic),
            "anisotropic" => return Ok(Self::Anisotropic),
            _ => {}
        }
        let (head, list) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("unknown pattern literal `{s}`")))?;
        let list = list
            .trim()
            .strip_prefix('[')
            .and_then(|l| l.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("expected `[..]` list in `{s}`")))?;
        let values = list
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::Parse(format!("bad offset `{v}` in `{s}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        match head.trim() {
            "complement" => {
                if values.is_empty() || values.len() > 2 {
                    return Err(Error::Parse(format!(
                        "complement takes one or two offsets, got {}",
                        values.len()
                    )));
                }
                if values.len() == 2 && values[1] != values[0] + 1 {
                    return Err(Error::Parse(format!(
                        "complement pair must be adjacent `[k,k+1]`, got {values:?}"
                    )));
                }
                Ok(Self::Complement(values))
            }
            "base_set" => Ok(Self::BaseSet(values)),
            other => Err(Error::Parse(format!("unknown pattern kind `{other}`"))),
        }
    }
}

impl fmt::Display for PatternLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[i64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            Self::Isotropic => write!(f, "isotropic"),
            Self::Anisotropic => write!(f, "anisotropic"),
            Self::Complement(v) => write!(f, "complement:[{}]", list(v)),
            Self::BaseSet(v) => write!(f, "base_set:[{}]", list(v)),
        }
    }
}

impl From<PatternLiteral> for String {
    fn from(p: PatternLiteral) -> Self {
        p.to_string()
    }
}

impl TryFrom<String> for PatternLiteral {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}
