//! Canonical codes for finite structures with marked points.
//!
//! An isomorphism between two linearly ordered structures, if it exists, is
//! the unique order-preserving bijection. So serializing colors in position
//! order already yields a complete invariant: no search is needed.

use std::fmt::Write;

use crate::color::ColorTerm;
use crate::structure::FinStruct;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CanonicalCode(Vec<u8>);

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.0
    }
}

/// Code of `n` ordered points whose pair colors are given by `color(i, j)`
/// (`i < j`, `None` for an uncolored pair) with the listed marked positions.
pub(crate) fn encode(
    n: usize,
    marked: &[usize],
    mut color: impl FnMut(usize, usize) -> Option<ColorTerm>,
) -> CanonicalCode {
    let mut out = String::new();
    write!(out, "{n}|").unwrap();
    let mut first = true;
    for i in 0..n {
        for j in i + 1..n {
            if !first {
                out.push(',');
            }
            first = false;
            match color(i, j) {
                Some(c) => write!(out, "{c}").unwrap(),
                None => out.push('_'),
            }
        }
    }
    out.push('|');
    for (k, m) in marked.iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        write!(out, "{m}").unwrap();
    }
    CanonicalCode(out.into_bytes())
}

/// Canonical code of `s` with `marked` positions (order of the list is
/// significant). Point names and the structure name do not enter the code.
pub fn canonical_code(s: &FinStruct, marked: &[usize]) -> CanonicalCode {
    encode(s.len(), marked, |i, j| Some(s.color(i, j).clone()))
}
