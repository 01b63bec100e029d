//! Finite linearly ordered sets with a coloring of pairs.

use std::collections::BTreeMap;

use crate::color::ColorTerm;
use crate::error::StructureError;

/// A finite structure of the class `C_level`: points listed in increasing
/// order, every unordered pair carrying a color.
///
/// A `FinStruct` is always well formed (distinct points, total coloring) but
/// may still contain a monochromatic triangle or a color above its level;
/// [`validate`] decides membership in the class.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FinStruct {
    name: String,
    level: u32,
    points: Vec<String>,
    // upper triangle, row-major over i < j
    colors: Vec<ColorTerm>,
}

fn tri_len(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn tri_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

fn check_distinct(points: &[String]) -> Result<(), StructureError> {
    let mut seen = BTreeMap::new();
    for p in points {
        if seen.insert(p.as_str(), ()).is_some() {
            return Err(StructureError::DuplicatePoint(p.clone()));
        }
    }
    Ok(())
}

impl FinStruct {
    pub fn empty(name: impl Into<String>, level: u32) -> Self {
        FinStruct {
            name: name.into(),
            level,
            points: Vec::new(),
            colors: Vec::new(),
        }
    }

    /// Builds a structure from point names (in increasing order) and a list of
    /// named pairs. Every pair must be colored exactly once.
    pub fn new(
        name: impl Into<String>,
        level: u32,
        points: Vec<String>,
        pairs: impl IntoIterator<Item = (String, String, ColorTerm)>,
    ) -> Result<Self, StructureError> {
        check_distinct(&points)?;
        let index: BTreeMap<&str, usize> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_str(), i))
            .collect();
        let n = points.len();
        let mut slots: Vec<Option<ColorTerm>> = vec![None; tri_len(n)];
        for (a, b, c) in pairs {
            let ia = *index
                .get(a.as_str())
                .ok_or_else(|| StructureError::UnknownPoint(a.clone()))?;
            let ib = *index
                .get(b.as_str())
                .ok_or_else(|| StructureError::UnknownPoint(b.clone()))?;
            if ia == ib {
                return Err(StructureError::SelfPair(a));
            }
            let slot = &mut slots[tri_index(n, ia.min(ib), ia.max(ib))];
            if slot.is_some() {
                return Err(StructureError::DuplicatePair(a, b));
            }
            *slot = Some(c);
        }
        let mut colors = Vec::with_capacity(slots.len());
        for i in 0..n {
            for j in i + 1..n {
                match slots[tri_index(n, i, j)].take() {
                    Some(c) => colors.push(c),
                    None => {
                        return Err(StructureError::MissingPair(
                            points[i].clone(),
                            points[j].clone(),
                        ))
                    }
                }
            }
        }
        Ok(FinStruct {
            name: name.into(),
            level,
            points,
            colors,
        })
    }

    /// Builds a structure whose pair colors are given by `color(i, j)` for
    /// positions `i < j`.
    pub fn from_fn(
        name: impl Into<String>,
        level: u32,
        points: Vec<String>,
        mut color: impl FnMut(usize, usize) -> ColorTerm,
    ) -> Result<Self, StructureError> {
        check_distinct(&points)?;
        let n = points.len();
        let mut colors = Vec::with_capacity(tri_len(n));
        for i in 0..n {
            for j in i + 1..n {
                colors.push(color(i, j));
            }
        }
        Ok(FinStruct {
            name: name.into(),
            level,
            points,
            colors,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn with_level(mut self, level: u32) -> Self {
        self.level = level;
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn point(&self, pos: usize) -> &str {
        &self.points[pos]
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.points.iter().position(|p| p == name)
    }

    /// Color of the pair at positions `i != j`.
    pub fn color(&self, i: usize, j: usize) -> &ColorTerm {
        assert_ne!(i, j, "no color on the diagonal");
        let n = self.len();
        &self.colors[tri_index(n, i.min(j), i.max(j))]
    }

    /// Replaces the color of one pair.
    pub fn recolor(&mut self, i: usize, j: usize, color: ColorTerm) {
        assert_ne!(i, j, "no color on the diagonal");
        let n = self.len();
        self.colors[tri_index(n, i.min(j), i.max(j))] = color;
    }

    /// All pairs `(i, j, color)` with `i < j`, row-major.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, &ColorTerm)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j, self.color(i, j))))
    }

    /// The substructure on the given positions, which must be strictly
    /// increasing.
    pub fn induced(&self, positions: &[usize]) -> FinStruct {
        debug_assert!(positions.windows(2).all(|w| w[0] < w[1]));
        let points = positions.iter().map(|&p| self.points[p].clone()).collect();
        FinStruct::from_fn(self.name.clone(), self.level, points, |i, j| {
            self.color(positions[i], positions[j]).clone()
        })
        .expect("subset of distinct points")
    }

    /// Inserts a new point at order position `pos`; `colors[k]` is the color
    /// between the new point and the old point at position `k`.
    pub fn insert_point(
        &self,
        pos: usize,
        name: impl Into<String>,
        colors: &[ColorTerm],
    ) -> Result<FinStruct, StructureError> {
        assert!(pos <= self.len());
        assert_eq!(colors.len(), self.len());
        let mut points = self.points.clone();
        points.insert(pos, name.into());
        let old = |p: usize| if p < pos { p } else { p - 1 };
        FinStruct::from_fn(self.name.clone(), self.level, points, |i, j| {
            if i == pos {
                colors[old(j)].clone()
            } else if j == pos {
                colors[old(i)].clone()
            } else {
                self.color(old(i), old(j)).clone()
            }
        })
    }
}

/// Outcome of [`validate`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Validity {
    Valid,
    /// The pair at these positions carries a color above the structure level.
    ColorAboveLevel(usize, usize),
    /// Positions `i < j < k` of a monochromatic triangle.
    Monochromatic(usize, usize, usize),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

/// Decides membership of `s` in `C_level`. Level violations are reported
/// first; otherwise the lexicographically first monochromatic triple.
pub fn validate(s: &FinStruct) -> Validity {
    for (i, j, c) in s.pairs() {
        if c.level() > s.level() {
            return Validity::ColorAboveLevel(i, j);
        }
    }
    let n = s.len();
    for i in 0..n {
        for j in i + 1..n {
            let cij = s.color(i, j);
            for k in j + 1..n {
                if s.color(i, k) == cij && s.color(j, k) == cij {
                    return Validity::Monochromatic(i, j, k);
                }
            }
        }
    }
    Validity::Valid
}
