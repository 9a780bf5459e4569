use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::field::FieldSpec;

use super::{ArrayCode, CodeError, EvenOdd, StackedReedSolomon};

/// Text-serializable name of a shipped code instance.
///
/// The text form is `family:key=value,...`, for example
/// `stacked-rs:n=5,k=3,alpha=2,w=3` or `evenodd:n=5,k=3,alpha=4,w=1,p=5`.
/// When parsing an EVENODD descriptor only `k` and `p` are required; any of
/// `n`, `alpha`, `w` that are present must agree with them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodeDescriptor {
    StackedRs { n: usize, k: usize, alpha: usize, w: u8 },
    EvenOdd { k: usize, p: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DescriptorError {
    #[error("unknown code family {0:?}")]
    UnknownFamily(String),
    #[error("malformed descriptor field {0:?}")]
    Malformed(String),
    #[error("descriptor is missing {0}")]
    Missing(&'static str),
    #[error("descriptor field {field} = {got} disagrees with derived value {expected}")]
    Inconsistent {
        field: &'static str,
        got: usize,
        expected: usize,
    },
}

impl CodeDescriptor {
    pub fn n(&self) -> usize {
        match *self {
            Self::StackedRs { n, .. } => n,
            Self::EvenOdd { k, .. } => k + 2,
        }
    }

    pub fn k(&self) -> usize {
        match *self {
            Self::StackedRs { k, .. } | Self::EvenOdd { k, .. } => k,
        }
    }

    pub fn alpha(&self) -> usize {
        match *self {
            Self::StackedRs { alpha, .. } => alpha,
            Self::EvenOdd { p, .. } => p.saturating_sub(1),
        }
    }

    pub fn width(&self) -> u8 {
        match *self {
            Self::StackedRs { w, .. } => w,
            Self::EvenOdd { .. } => 1,
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Self::StackedRs { .. } => "stacked-rs",
            Self::EvenOdd { .. } => "evenodd",
        }
    }

    pub fn build(&self) -> Result<Arc<dyn ArrayCode>, CodeError> {
        Ok(match *self {
            Self::StackedRs { n, k, alpha, w } => {
                Arc::new(StackedReedSolomon::new(n, k, alpha, FieldSpec::new(w)?)?)
            }
            Self::EvenOdd { k, p } => Arc::new(EvenOdd::new(k, p)?),
        })
    }
}

impl fmt::Display for CodeDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::StackedRs { n, k, alpha, w } => {
                write!(f, "stacked-rs:n={n},k={k},alpha={alpha},w={w}")
            }
            Self::EvenOdd { k, p } => write!(
                f,
                "evenodd:n={},k={k},alpha={},w=1,p={p}",
                self.n(),
                self.alpha()
            ),
        }
    }
}

impl FromStr for CodeDescriptor {
    type Err = DescriptorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (family, rest) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| DescriptorError::Malformed(s.to_string()))?;
        let (mut n, mut k, mut alpha, mut w, mut p) = (None, None, None, None, None);
        for field in rest.split(',').filter(|f| !f.is_empty()) {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| DescriptorError::Malformed(field.to_string()))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| DescriptorError::Malformed(field.to_string()))?;
            let slot = match key.trim() {
                "n" => &mut n,
                "k" => &mut k,
                "alpha" => &mut alpha,
                "w" => &mut w,
                "p" => &mut p,
                _ => return Err(DescriptorError::Malformed(field.to_string())),
            };
            *slot = Some(value);
        }
        match family {
            "stacked-rs" => {
                let w = w.ok_or(DescriptorError::Missing("w"))?;
                Ok(Self::StackedRs {
                    n: n.ok_or(DescriptorError::Missing("n"))?,
                    k: k.ok_or(DescriptorError::Missing("k"))?,
                    alpha: alpha.ok_or(DescriptorError::Missing("alpha"))?,
                    w: u8::try_from(w).map_err(|_| DescriptorError::Malformed(format!("w={w}")))?,
                })
            }
            "evenodd" => {
                let d = Self::EvenOdd {
                    k: k.ok_or(DescriptorError::Missing("k"))?,
                    p: p.ok_or(DescriptorError::Missing("p"))?,
                };
                for (field, got, expected) in [
                    ("n", n, d.n()),
                    ("alpha", alpha, d.alpha()),
                    ("w", w, 1),
                ] {
                    if let Some(got) = got {
                        if got != expected {
                            return Err(DescriptorError::Inconsistent {
                                field,
                                got,
                                expected,
                            });
                        }
                    }
                }
                Ok(d)
            }
            other => Err(DescriptorError::UnknownFamily(other.to_string())),
        }
    }
}

impl Serialize for CodeDescriptor {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CodeDescriptor {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}
