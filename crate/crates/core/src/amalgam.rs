//! Deterministic disjoint amalgamation.

use std::collections::BTreeSet;

use crate::color::ColorTerm;
use crate::embedding::{check_embedding, Embedding};
use crate::error::AmalgamError;
use crate::structure::{validate, FinStruct};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Amalgam {
    pub structure: FinStruct,
    pub left: Embedding,
    pub right: Embedding,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Origin {
    Left(usize),
    Right(usize),
    Shared(usize),
}

/// Smallest `Base(level, n)` that closes no monochromatic triangle. Each
/// constraint holds the two already fixed colors joining the endpoints of the
/// pair being colored to some third point.
pub(crate) fn smallest_admissible<'a>(
    level: u32,
    constraints: impl Iterator<Item = (&'a ColorTerm, &'a ColorTerm)>,
) -> ColorTerm {
    let forbidden: BTreeSet<&ColorTerm> = constraints
        .filter(|(c1, c2)| c1 == c2)
        .map(|(c1, _)| c1)
        .collect();
    (0u64..)
        .map(|n| ColorTerm::base(level, n))
        .find(|c| !forbidden.contains(c))
        .expect("finitely many forbidden colors")
}

/// Amalgamates `left` and `right` over `shared` along `into_left` and
/// `into_right`.
///
/// New points are placed by their gap over the shared part, left before right
/// within a gap. Pairs between a left-only and a right-only point get the
/// smallest admissible base color at the working level, assigned in
/// lexicographic order of positions.
pub fn amalgamate(
    left: &FinStruct,
    right: &FinStruct,
    shared: &FinStruct,
    into_left: &Embedding,
    into_right: &Embedding,
) -> Result<Amalgam, AmalgamError> {
    check_embedding(&into_left.map, shared, left).map_err(AmalgamError::Left)?;
    check_embedding(&into_right.map, shared, right).map_err(AmalgamError::Right)?;
    for s in [left, right] {
        if !validate(s).is_valid() {
            return Err(AmalgamError::InvalidInput(s.name().to_string()));
        }
    }
    let level = left.level().max(right.level());

    // sort key: (gap, rank within gap, original position)
    let mut elems: Vec<((usize, u8, usize), Origin)> = Vec::new();
    for k in 0..shared.len() {
        elems.push(((k, 2, 0), Origin::Shared(k)));
    }
    for (side, s, e) in [(0u8, left, into_left), (1u8, right, into_right)] {
        for p in 0..s.len() {
            if e.map.contains(&p) {
                continue;
            }
            let gap = e.map.iter().filter(|&&q| q < p).count();
            let origin = if side == 0 {
                Origin::Left(p)
            } else {
                Origin::Right(p)
            };
            elems.push(((gap, side, p), origin));
        }
    }
    elems.sort();
    let origins: Vec<Origin> = elems.into_iter().map(|(_, o)| o).collect();
    let n = origins.len();

    // each point seen from one side (shared points from both)
    let left_pos = |o: Origin| match o {
        Origin::Left(p) => Some(p),
        Origin::Shared(k) => Some(into_left.map[k]),
        Origin::Right(_) => None,
    };
    let right_pos = |o: Origin| match o {
        Origin::Right(p) => Some(p),
        Origin::Shared(k) => Some(into_right.map[k]),
        Origin::Left(_) => None,
    };

    let mut table: Vec<Vec<Option<ColorTerm>>> = vec![vec![None; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let c = match (left_pos(origins[i]), left_pos(origins[j])) {
                (Some(a), Some(b)) => Some(left.color(a, b).clone()),
                _ => match (right_pos(origins[i]), right_pos(origins[j])) {
                    (Some(a), Some(b)) => Some(right.color(a, b).clone()),
                    _ => None,
                },
            };
            table[i][j] = c.clone();
            table[j][i] = c;
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if table[i][j].is_some() {
                continue;
            }
            let chosen = {
                let constraints = (0..n).filter(|&w| w != i && w != j).filter_map(|w| {
                    match (&table[i][w], &table[j][w]) {
                        (Some(a), Some(b)) => Some((a, b)),
                        _ => None,
                    }
                });
                smallest_admissible(level, constraints)
            };
            table[i][j] = Some(chosen.clone());
            table[j][i] = Some(chosen);
        }
    }

    let mut used = BTreeSet::new();
    let mut names = Vec::with_capacity(n);
    for &o in &origins {
        let mut name = match o {
            Origin::Shared(k) => left.point(into_left.map[k]).to_string(),
            Origin::Left(p) => left.point(p).to_string(),
            Origin::Right(p) => right.point(p).to_string(),
        };
        while used.contains(&name) {
            name.push('\'');
        }
        used.insert(name.clone());
        names.push(name);
    }
    let structure = FinStruct::from_fn(
        format!("{}+{}", left.name(), right.name()),
        level,
        names,
        |i, j| table[i][j].clone().expect("all pairs colored"),
    )
    .expect("names made unique");

    let mut left_map = vec![0; left.len()];
    let mut right_map = vec![0; right.len()];
    for (d, &o) in origins.iter().enumerate() {
        if let Some(p) = left_pos(o) {
            left_map[p] = d;
        }
        if let Some(p) = right_pos(o) {
            right_map[p] = d;
        }
    }
    Ok(Amalgam {
        structure,
        left: Embedding::new(left_map),
        right: Embedding::new(right_map),
    })
}
