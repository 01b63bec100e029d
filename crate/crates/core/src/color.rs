//! The leveled color universe.
//!
//! Colors live in a tower `Q_0 ⊂ Q_1 ⊂ … ⊂ Q_ω`. A color belongs to `Q_i`
//! when its level is at most `i`. Each level contributes infinitely many
//! fresh `Base` colors, one `Marker` (the distinguished color used between a
//! type element and the base points outside its support) and the `PairCode`
//! colors that name equivalence classes of type pairs.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::ParseError;

/// A color term. Ordering is the fixed well-order `<_Q` used by the
/// extension functor: by level, then kind (`Base < Marker < PairCode`), then
/// index or code bytes.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ColorTerm {
    Base { level: u32, index: u64 },
    Marker { level: u32 },
    PairCode { level: u32, code: Arc<[u8]> },
}

impl ColorTerm {
    pub fn base(level: u32, index: u64) -> Self {
        ColorTerm::Base { level, index }
    }

    /// The distinguished color of level `level`; panics on level 0, which has
    /// no marker.
    pub fn marker(level: u32) -> Self {
        assert!(level >= 1, "markers start at level 1");
        ColorTerm::Marker { level }
    }

    pub fn pair_code(level: u32, code: &[u8]) -> Self {
        assert!(level >= 1, "pair codes start at level 1");
        ColorTerm::PairCode {
            level,
            code: Arc::from(code),
        }
    }

    pub fn level(&self) -> u32 {
        match self {
            ColorTerm::Base { level, .. }
            | ColorTerm::Marker { level }
            | ColorTerm::PairCode { level, .. } => *level,
        }
    }

    fn kind_tag(&self) -> u8 {
        match self {
            ColorTerm::Base { .. } => 0,
            ColorTerm::Marker { .. } => 1,
            ColorTerm::PairCode { .. } => 2,
        }
    }

    pub fn is_base(&self) -> bool {
        matches!(self, ColorTerm::Base { .. })
    }
}

/// Strict comparison under `<_Q`.
pub fn color_less(c1: &ColorTerm, c2: &ColorTerm) -> bool {
    c1 < c2
}

impl Ord for ColorTerm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.level()
            .cmp(&other.level())
            .then_with(|| self.kind_tag().cmp(&other.kind_tag()))
            .then_with(|| match (self, other) {
                (ColorTerm::Base { index: a, .. }, ColorTerm::Base { index: b, .. }) => a.cmp(b),
                (ColorTerm::PairCode { code: a, .. }, ColorTerm::PairCode { code: b, .. }) => {
                    a.cmp(b)
                }
                _ => Ordering::Equal,
            })
    }
}

impl PartialOrd for ColorTerm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ColorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColorTerm::Base { level, index } => write!(f, "b:{level}:{index}"),
            ColorTerm::Marker { level } => write!(f, "m:{level}"),
            ColorTerm::PairCode { level, code } => write!(f, "k:{level}:{}", hex::encode(code)),
        }
    }
}

impl fmt::Debug for ColorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ColorTerm {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseError::BadColor(s.to_string());
        let mut parts = s.split(':');
        let kind = parts.next().ok_or_else(bad)?;
        let level: u32 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let term = match kind {
            "b" => {
                let index = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
                ColorTerm::Base { level, index }
            }
            "m" if level >= 1 => ColorTerm::Marker { level },
            "k" if level >= 1 => {
                let text = parts.next().ok_or_else(bad)?;
                // only the lowercase spelling is canonical
                if text.bytes().any(|b| b.is_ascii_uppercase()) {
                    return Err(bad());
                }
                let code = hex::decode(text).map_err(|_| bad())?;
                ColorTerm::PairCode {
                    level,
                    code: Arc::from(code),
                }
            }
            _ => return Err(bad()),
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(term)
    }
}
