//! One-point extension types over a finite base.
//!
//! A type fixes a support (a substructure of the base), the position of the
//! new point relative to the sorted support, and the colors between the new
//! point and each support point. Supports may be empty or the whole base.

use std::collections::BTreeSet;
use std::hash::{Hash, Hasher};

use crate::amalgam::smallest_admissible;
use crate::color::ColorTerm;
use crate::embedding::Embedding;
use crate::error::{ParseError, TypeError};
use crate::katetov::compare_types;
use crate::structure::FinStruct;

/// A partial one-point type over a base structure. Support points are base
/// positions in increasing order; `colors[k]` is the color towards
/// `support[k]`.
///
/// Equality ignores `level`: two types over the same base are equal iff
/// support, cut and colors coincide.
#[derive(Clone, Debug)]
pub struct OnePointType {
    pub support: Vec<usize>,
    pub cut: usize,
    pub colors: Vec<ColorTerm>,
    pub level: u32,
}

impl PartialEq for OnePointType {
    fn eq(&self, other: &Self) -> bool {
        self.support == other.support && self.cut == other.cut && self.colors == other.colors
    }
}

impl Eq for OnePointType {}

impl Hash for OnePointType {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.support.hash(state);
        self.cut.hash(state);
        self.colors.hash(state);
    }
}

impl OnePointType {
    /// The type with empty support.
    pub fn free(level: u32) -> Self {
        OnePointType {
            support: Vec::new(),
            cut: 0,
            colors: Vec::new(),
            level,
        }
    }

    /// Number of base points below the minimal placement of the new point:
    /// it sits immediately above its greatest support point below the cut.
    pub fn gap(&self) -> usize {
        match self.cut {
            0 => 0,
            k => self.support[k - 1] + 1,
        }
    }

    pub fn color_at(&self, v: usize) -> Option<&ColorTerm> {
        self.support
            .binary_search(&v)
            .ok()
            .map(|k| &self.colors[k])
    }

    /// Checks the type against `base`: well-formed support, colors within
    /// the type level and no monochromatic triangle inside support ∪ {new}.
    pub fn check(&self, base: &FinStruct) -> Result<(), TypeError> {
        if let Some(&p) = self.support.iter().find(|&&p| p >= base.len()) {
            return Err(TypeError::SupportOutOfRange(p));
        }
        if self.support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(TypeError::UnsortedSupport);
        }
        if self.cut > self.support.len() {
            return Err(TypeError::CutOutOfRange {
                cut: self.cut,
                size: self.support.len(),
            });
        }
        if self.colors.len() != self.support.len() {
            return Err(TypeError::ColorCount {
                colors: self.colors.len(),
                size: self.support.len(),
            });
        }
        if let Some(c) = self.colors.iter().find(|c| c.level() > self.level) {
            return Err(TypeError::ColorAboveLevel(c.to_string()));
        }
        for a in 0..self.support.len() {
            for b in a + 1..self.support.len() {
                let c = &self.colors[a];
                if *c == self.colors[b] && c == base.color(self.support[a], self.support[b]) {
                    return Err(TypeError::Monochromatic(self.support[a], self.support[b]));
                }
            }
        }
        Ok(())
    }

    /// The image of this type under an embedding of its base.
    pub fn transport(&self, e: &Embedding) -> OnePointType {
        OnePointType {
            support: self.support.iter().map(|&p| e.apply(p)).collect(),
            cut: self.cut,
            colors: self.colors.clone(),
            level: self.level,
        }
    }

    /// Text form `type supp=<ids> cut=<k> colors=<terms> level=<l>`.
    pub fn to_text(&self, base: &FinStruct) -> String {
        let supp: Vec<&str> = self.support.iter().map(|&p| base.point(p)).collect();
        let colors: Vec<String> = self.colors.iter().map(|c| c.to_string()).collect();
        format!(
            "type supp={} cut={} colors={} level={}",
            supp.join(","),
            self.cut,
            colors.join(","),
            self.level
        )
    }

    /// Parses the text form against `base` (point names resolve to
    /// positions). Accepts the tokens with or without the leading `type`.
    pub fn parse(text: &str, base: &FinStruct) -> Result<OnePointType, ParseError> {
        let bad = |m: &str| ParseError::line(0, format!("type: {m}"));
        let mut tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.first() == Some(&"type") {
            tokens.remove(0);
        }
        let field = |key: &str| -> Result<&str, ParseError> {
            let prefix = format!("{key}=");
            let hits: Vec<&str> = tokens
                .iter()
                .filter_map(|t| t.strip_prefix(prefix.as_str()))
                .collect();
            match hits.as_slice() {
                [one] => Ok(one),
                _ => Err(bad(&format!("expected exactly one `{key}=`"))),
            }
        };
        if tokens.len() != 4 {
            return Err(bad("expected supp, cut, colors and level"));
        }
        let list = |s: &str| -> Vec<String> {
            if s.is_empty() {
                Vec::new()
            } else {
                s.split(',').map(String::from).collect()
            }
        };
        let support = list(field("supp")?)
            .iter()
            .map(|name| base.position(name).ok_or_else(|| bad(&format!("unknown point `{name}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        let colors = list(field("colors")?)
            .iter()
            .map(|c| c.parse::<ColorTerm>())
            .collect::<Result<Vec<_>, _>>()?;
        let cut = field("cut")?.parse().map_err(|_| bad("bad cut"))?;
        let level = field("level")?.parse().map_err(|_| bad("bad level"))?;
        let t = OnePointType {
            support,
            cut,
            colors,
            level,
        };
        t.check(base).map_err(|e| bad(&e.to_string()))?;
        Ok(t)
    }
}

/// The type realized by `u` over the positions `over` (increasing, not
/// containing `u`).
pub fn type_of_point(s: &FinStruct, u: usize, over: &[usize]) -> Result<OnePointType, TypeError> {
    if over.contains(&u) {
        return Err(TypeError::PointInSupport(u));
    }
    if over.windows(2).any(|w| w[0] >= w[1]) {
        return Err(TypeError::UnsortedSupport);
    }
    Ok(OnePointType {
        support: over.to_vec(),
        cut: over.iter().filter(|&&a| a < u).count(),
        colors: over.iter().map(|&a| s.color(a, u).clone()).collect(),
        level: s.level(),
    })
}

/// Colors available to types over `x` at `level` with budget `budget`:
/// `Base(l, n)` for `l <= level`, `n < budget`, plus the markers and pair
/// codes of level at most `level` that already occur in `x`.
pub fn palette(x: &FinStruct, level: u32, budget: u64) -> Vec<ColorTerm> {
    let mut set: BTreeSet<ColorTerm> = (0..=level)
        .flat_map(|l| (0..budget).map(move |n| ColorTerm::base(l, n)))
        .collect();
    for (_, _, c) in x.pairs() {
        if !c.is_base() && c.level() <= level {
            set.insert(c.clone());
        }
    }
    set.into_iter().collect()
}

/// All valid one-point types over `x` whose colors lie in
/// [`palette`]`(x, level, budget)`, sorted by [`compare_types`].
pub fn enumerate_types(x: &FinStruct, level: u32, budget: u64) -> Vec<OnePointType> {
    let colors = palette(x, level, budget);
    let n = x.len();
    let mut out = Vec::new();
    let mut support = Vec::new();
    let mut assigned = Vec::new();
    for mask in 0u64..(1u64 << n) {
        support.clear();
        support.extend((0..n).filter(|&p| mask >> p & 1 == 1));
        colorings(x, &support, &colors, &mut assigned, &mut |cs| {
            for cut in 0..=support.len() {
                out.push(OnePointType {
                    support: support.clone(),
                    cut,
                    colors: cs.to_vec(),
                    level,
                });
            }
        });
    }
    out.sort_by(compare_types);
    out
}

// Depth-first over triangle-free colorings of the support.
fn colorings(
    x: &FinStruct,
    support: &[usize],
    palette: &[ColorTerm],
    assigned: &mut Vec<ColorTerm>,
    emit: &mut impl FnMut(&[ColorTerm]),
) {
    let k = assigned.len();
    if k == support.len() {
        emit(assigned);
        return;
    }
    for c in palette {
        let closes_triangle =
            (0..k).any(|j| assigned[j] == *c && x.color(support[j], support[k]) == c);
        if !closes_triangle {
            assigned.push(c.clone());
            colorings(x, support, palette, assigned, emit);
            assigned.pop();
        }
    }
}

/// Adds a new point named `name` realizing `t` over `f`.
///
/// The point takes the minimal placement of `t`. Colors towards support
/// points are those of `t`; every other pair, in order of position, gets the
/// smallest base color at `f`'s level that closes no monochromatic triangle.
/// Returns the extended structure and the position of the new point.
pub fn realize_type(
    f: &FinStruct,
    t: &OnePointType,
    name: impl Into<String>,
) -> Result<(FinStruct, usize), TypeError> {
    t.check(f)?;
    let n = f.len();
    let mut colors: Vec<Option<ColorTerm>> = (0..n).map(|v| t.color_at(v).cloned()).collect();
    for v in 0..n {
        if colors[v].is_some() {
            continue;
        }
        let chosen = {
            let constraints = (0..n)
                .filter(|&w| w != v)
                .filter_map(|w| colors[w].as_ref().map(|cw| (cw, f.color(v, w))));
            smallest_admissible(f.level(), constraints)
        };
        colors[v] = Some(chosen);
    }
    let colors: Vec<ColorTerm> = colors.into_iter().map(Option::unwrap).collect();
    let pos = t.gap();
    let extended = f
        .insert_point(pos, name, &colors)
        .map_err(|_| TypeError::PointInSupport(pos))?;
    Ok((extended, pos))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::validate;

    fn b(n: u64) -> ColorTerm {
        ColorTerm::base(0, n)
    }

    fn two(c: u64) -> FinStruct {
        FinStruct::from_fn("x", 0, vec!["a".into(), "b".into()], |_, _| b(c)).unwrap()
    }

    #[test]
    fn read_off_types() {
        let s = two(0);
        let t = type_of_point(&s, 1, &[0]).unwrap();
        assert_eq!((t.support.clone(), t.cut, t.colors.clone()), (vec![0], 1, vec![b(0)]));
        let free = type_of_point(&s, 1, &[]).unwrap();
        assert_eq!(free, OnePointType::free(0));
        assert_eq!(type_of_point(&s, 1, &[1]), Err(TypeError::PointInSupport(1)));

        let three = FinStruct::from_fn("y", 0, vec!["a".into(), "b".into(), "c".into()], |i, j| {
            b((i + j) as u64)
        })
        .unwrap();
        let t = type_of_point(&three, 1, &[0, 2]).unwrap();
        assert_eq!(t.cut, 1);
        assert_eq!(t.colors, vec![b(1), b(3)]);
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_types(&FinStruct::empty("e", 0), 0, 2).len(), 1);
        let one = FinStruct::from_fn("o", 0, vec!["a".into()], |_, _| unreachable!()).unwrap();
        for budget in 0..4 {
            assert_eq!(enumerate_types(&one, 0, budget).len(), 1 + 2 * budget as usize);
        }
        assert_eq!(enumerate_types(&two(0), 0, 2).len(), 18);
    }

    #[test]
    fn enumeration_sorted_and_unique() {
        let types = enumerate_types(&two(0), 0, 2);
        for w in types.windows(2) {
            assert_eq!(compare_types(&w[0], &w[1]), std::cmp::Ordering::Less);
        }
        for t in &types {
            t.check(&two(0)).unwrap();
        }
    }

    #[test]
    fn realize_minimal_placement() {
        let f = two(0);
        let t = OnePointType {
            support: vec![1],
            cut: 1,
            colors: vec![b(1)],
            level: 0,
        };
        let (g, u) = realize_type(&f, &t, "u").unwrap();
        assert_eq!(u, 2);
        assert_eq!(g.color(0, u), &b(0));
        assert_eq!(g.color(1, u), &b(1));
        assert!(validate(&g).is_valid());
        assert_eq!(type_of_point(&g, u, &[1]).unwrap(), t);
    }

    #[test]
    fn realize_on_support_only() {
        let f = two(0);
        let t = OnePointType {
            support: vec![0, 1],
            cut: 1,
            colors: vec![b(1), b(0)],
            level: 0,
        };
        let (g, u) = realize_type(&f, &t, "u").unwrap();
        assert_eq!(g.points(), &["a".to_string(), "u".into(), "b".into()][..]);
        assert_eq!(type_of_point(&g, u, &[0, 2]).unwrap().colors, t.colors);
    }

    #[test]
    fn invalid_type_rejected() {
        let f = two(0);
        let mono = OnePointType {
            support: vec![0, 1],
            cut: 0,
            colors: vec![b(0), b(0)],
            level: 0,
        };
        assert_eq!(realize_type(&f, &mono, "u"), Err(TypeError::Monochromatic(0, 1)));
    }

    #[test]
    fn text_round_trip() {
        let f = two(0);
        for t in enumerate_types(&f, 0, 2) {
            let text = t.to_text(&f);
            assert_eq!(OnePointType::parse(&text, &f).unwrap(), t, "{text}");
        }
        assert_eq!(
            OnePointType::free(0).to_text(&f),
            "type supp= cut=0 colors= level=0"
        );
        assert!(OnePointType::parse("type supp=a,b cut=0 colors=b:0:0,b:0:0 level=0", &f).is_err());
        assert!(OnePointType::parse("type supp=z cut=0 colors=b:0:0 level=0", &f).is_err());
    }
}
