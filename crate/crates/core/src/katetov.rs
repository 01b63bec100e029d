//! The extension functor `K`.
//!
//! `K(x)` is `x` together with one new element per one-point type over `x`
//! (budget-truncated). A type element sits at the minimal placement allowed
//! by its support, distinct types in the same gap are ordered by support
//! size, then by the largest point of the symmetric difference of supports,
//! then by the largest disagreeing color. Colors:
//!
//! * base point to type element: the type's color on its support, the marker
//!   of the next level elsewhere;
//! * two type elements: a pair code of the next level, the canonical code of
//!   the pair's induced marked structure (supports, both elements, every
//!   color except the one being defined).
//!
//! Pair codes are invariant under embeddings of the base, so `K(e)` is an
//! embedding whenever `e` is, and distinct isomorphism classes of pairs get
//! distinct colors.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::canon::{encode, CanonicalCode};
use crate::color::ColorTerm;
use crate::embedding::{check_embedding, Embedding};
use crate::error::KatetovError;
use crate::format::{write_structure, Writer};
use crate::structure::{validate, FinStruct};
use crate::types::{enumerate_types, OnePointType};

/// Position of the type element `t` relative to the base point `v`:
/// `Greater` when `v < t`.
pub fn order_type_vs_point(t: &OnePointType, v: usize) -> Ordering {
    if let Ok(k) = t.support.binary_search(&v) {
        return if k < t.cut {
            Ordering::Greater
        } else {
            Ordering::Less
        };
    }
    // outside the support, v is below t only when forced by a support point
    // below the cut
    if t.cut > 0 && v < t.support[t.cut - 1] {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

/// The order on type elements of `K(x)`.
pub fn compare_types(a: &OnePointType, b: &OnePointType) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    // a base point separates the two
    let by_gap = a.gap().cmp(&b.gap());
    if by_gap != Ordering::Equal {
        return by_gap;
    }
    let by_size = a.support.len().cmp(&b.support.len());
    if by_size != Ordering::Equal {
        return by_size;
    }
    if a.support != b.support {
        let top = a
            .support
            .iter()
            .filter(|v| b.support.binary_search(v).is_err())
            .chain(b.support.iter().filter(|v| a.support.binary_search(v).is_err()))
            .max()
            .expect("supports differ");
        return if a.support.binary_search(top).is_ok() {
            Ordering::Less
        } else {
            Ordering::Greater
        };
    }
    let k = (0..a.support.len())
        .rev()
        .find(|&k| a.colors[k] != b.colors[k])
        .expect("equal support and gap force equal cut, so some color differs");
    a.colors[k].cmp(&b.colors[k])
}

/// One element of a pair structure.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PairElement {
    Base(usize),
    Lower,
    Upper,
}

/// The marked structure induced on `supp(lower) ∪ supp(upper) ∪ {lower,
/// upper}` inside `K(x)`, without the color of the pair itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairStructure {
    pub elements: Vec<PairElement>,
    pub code: CanonicalCode,
}

/// Builds the pair structure of two distinct types over `base`; the
/// argument order does not matter.
pub fn pair_structure(base: &FinStruct, a: &OnePointType, b: &OnePointType) -> PairStructure {
    let (lower, upper) = match compare_types(a, b) {
        Ordering::Less => (a, b),
        Ordering::Greater => (b, a),
        Ordering::Equal => panic!("pair structure of a type with itself"),
    };
    let mut union: Vec<usize> = lower.support.iter().chain(&upper.support).copied().collect();
    union.sort_unstable();
    union.dedup();

    // merge the two type elements into the sorted union
    let mut elements = Vec::with_capacity(union.len() + 2);
    let mut placed = [false, false];
    for &v in &union {
        for (k, t) in [lower, upper].into_iter().enumerate() {
            if !placed[k] && order_type_vs_point(t, v) == Ordering::Less {
                elements.push(if k == 0 {
                    PairElement::Lower
                } else {
                    PairElement::Upper
                });
                placed[k] = true;
            }
        }
        elements.push(PairElement::Base(v));
    }
    if !placed[0] {
        elements.push(PairElement::Lower);
    }
    if !placed[1] {
        elements.push(PairElement::Upper);
    }

    let marker = ColorTerm::marker(base.level() + 1);
    let towards = |t: &OnePointType, v: usize| t.color_at(v).cloned().unwrap_or(marker.clone());
    let color = |e1: PairElement, e2: PairElement| -> Option<ColorTerm> {
        use PairElement::*;
        match (e1, e2) {
            (Base(u), Base(v)) => Some(base.color(u, v).clone()),
            (Base(v), Lower) | (Lower, Base(v)) => Some(towards(lower, v)),
            (Base(v), Upper) | (Upper, Base(v)) => Some(towards(upper, v)),
            _ => None,
        }
    };
    let marks = [
        elements.iter().position(|e| *e == PairElement::Lower).unwrap(),
        elements.iter().position(|e| *e == PairElement::Upper).unwrap(),
    ];
    let code = encode(elements.len(), &marks, |i, j| color(elements[i], elements[j]));
    PairStructure { elements, code }
}

/// Color of the pair of type elements `{a, b}` in `K(base)`.
pub fn pair_color(base: &FinStruct, a: &OnePointType, b: &OnePointType) -> ColorTerm {
    ColorTerm::pair_code(base.level() + 1, pair_structure(base, a, b).code.as_bytes())
}

/// An element of `K(x)`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Element {
    Base(usize),
    Type(usize),
}

/// `K(x)` for a budget: the base, its type elements in order, and the merged
/// linear order. Colors between type elements are computed on demand; call
/// [`ExtendedStructure::materialize`] for the full structure.
#[derive(Clone, Debug)]
pub struct ExtendedStructure {
    base: FinStruct,
    budget: u64,
    types: Vec<OnePointType>,
    order: Vec<Element>,
    base_pos: Vec<usize>,
    type_pos: Vec<usize>,
    names: Vec<String>,
    index: HashMap<OnePointType, usize>,
}

/// Name of the `index`-th type element over a base of the given level.
fn element_name(level: u32, index: usize) -> String {
    if level == 0 {
        format!("t{index}")
    } else {
        format!("t{level}_{index}")
    }
}

impl ExtendedStructure {
    pub fn base(&self) -> &FinStruct {
        &self.base
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    /// Level of `K(x)`, one above the base.
    pub fn level(&self) -> u32 {
        self.base.level() + 1
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn types(&self) -> &[OnePointType] {
        &self.types
    }

    pub fn element(&self, pos: usize) -> Element {
        self.order[pos]
    }

    pub fn name(&self, pos: usize) -> &str {
        &self.names[pos]
    }

    pub fn base_position(&self, v: usize) -> usize {
        self.base_pos[v]
    }

    pub fn type_position(&self, k: usize) -> usize {
        self.type_pos[k]
    }

    pub fn type_index(&self, t: &OnePointType) -> Option<usize> {
        self.index.get(t).copied()
    }

    /// The natural inclusion `x → K(x)`.
    pub fn inclusion(&self) -> Embedding {
        Embedding::new(self.base_pos.clone())
    }

    /// Color between the elements at positions `i != j`.
    pub fn color(&self, i: usize, j: usize) -> ColorTerm {
        match (self.order[i], self.order[j]) {
            (Element::Base(u), Element::Base(v)) => self.base.color(u, v).clone(),
            (Element::Base(v), Element::Type(k)) | (Element::Type(k), Element::Base(v)) => self
                .types[k]
                .color_at(v)
                .cloned()
                .unwrap_or_else(|| ColorTerm::marker(self.level())),
            (Element::Type(a), Element::Type(b)) => {
                pair_color(&self.base, &self.types[a], &self.types[b])
            }
        }
    }

    /// The type realized by the element at `pos` over the given base
    /// positions, read from `K(x)` without materializing pair colors.
    pub fn type_of_element(&self, pos: usize, over: &[usize]) -> OnePointType {
        let below = over.iter().filter(|&&v| self.base_pos[v] < pos).count();
        OnePointType {
            support: over.to_vec(),
            cut: below,
            colors: over
                .iter()
                .map(|&v| self.color(self.base_pos[v], pos))
                .collect(),
            level: self.base.level(),
        }
    }

    pub fn materialize(&self) -> FinStruct {
        FinStruct::from_fn(
            format!("K({})", self.base.name()),
            self.level(),
            self.names.clone(),
            |i, j| self.color(i, j),
        )
        .expect("element names are unique")
    }

    /// Writes `K(x)` in the structure format followed by a sidecar listing the
    /// defining type of every type element.
    pub fn write(&self, w: &mut Writer) {
        let k = self.materialize();
        write_structure(w, &k);
        w.header(format!("types {} base {}", k.name(), self.base.name()));
        for (idx, t) in self.types.iter().enumerate() {
            w.item(format!(
                "element {} {}",
                self.names[self.type_pos[idx]],
                t.to_text(&self.base)
            ));
        }
        w.end_block();
    }
}

/// Builds `K(x)` with type colors drawn from budget `budget`.
pub fn apply_k(x: &FinStruct, budget: u64) -> Result<ExtendedStructure, KatetovError> {
    if !validate(x).is_valid() {
        return Err(KatetovError::InvalidInput);
    }
    let types = enumerate_types(x, x.level(), budget);
    let mut order = Vec::with_capacity(x.len() + types.len());
    // types come sorted by gap first
    let mut next = 0;
    for v in 0..=x.len() {
        while next < types.len() && types[next].gap() == v {
            order.push(Element::Type(next));
            next += 1;
        }
        if v < x.len() {
            order.push(Element::Base(v));
        }
    }
    debug_assert_eq!(next, types.len());

    let mut base_pos = vec![0; x.len()];
    let mut type_pos = vec![0; types.len()];
    let mut names = Vec::with_capacity(order.len());
    let mut used: std::collections::BTreeSet<String> = x.points().iter().cloned().collect();
    for (pos, e) in order.iter().enumerate() {
        match *e {
            Element::Base(v) => {
                base_pos[v] = pos;
                names.push(x.point(v).to_string());
            }
            Element::Type(k) => {
                type_pos[k] = pos;
                let mut name = element_name(x.level(), k);
                while used.contains(&name) {
                    name.push('\'');
                }
                used.insert(name.clone());
                names.push(name);
            }
        }
    }
    let index = types.iter().cloned().enumerate().map(|(k, t)| (t, k)).collect();
    Ok(ExtendedStructure {
        base: x.clone(),
        budget,
        types,
        order,
        base_pos,
        type_pos,
        names,
        index,
    })
}

/// `K(e)` between already built `K(x)` and `K(y)`: base points follow `e`,
/// a type moves to the type with transported support, same cut and colors.
pub fn map_morphism(
    e: &Embedding,
    kx: &ExtendedStructure,
    ky: &ExtendedStructure,
) -> Result<Embedding, KatetovError> {
    let (x, y) = (kx.base(), ky.base());
    if x.level() != y.level() {
        return Err(crate::error::MorphismError::LevelMismatch(x.level(), y.level()).into());
    }
    if kx.budget() != ky.budget() {
        return Err(KatetovError::BudgetMismatch(kx.budget(), ky.budget()));
    }
    check_embedding(&e.map, x, y)?;
    let map = kx
        .order
        .iter()
        .map(|el| match *el {
            Element::Base(v) => ky.base_position(e.apply(v)),
            Element::Type(k) => {
                let image = kx.types[k].transport(e);
                let idx = ky
                    .type_index(&image)
                    .expect("transported type stays within the palette");
                ky.type_position(idx)
            }
        })
        .collect();
    Ok(Embedding::new(map))
}

/// `K(e)` for an embedding `e: x → y`, building both extensions.
pub fn apply_k_morphism(
    e: &Embedding,
    x: &FinStruct,
    y: &FinStruct,
    budget: u64,
) -> Result<(Embedding, ExtendedStructure, ExtendedStructure), KatetovError> {
    let kx = apply_k(x, budget)?;
    let ky = apply_k(y, budget)?;
    let ke = map_morphism(e, &kx, &ky)?;
    Ok((ke, kx, ky))
}

/// The chain `x ⊆ K_0(x) ⊆ K_1(K_0(x)) ⊆ …` for `stages` steps, stage `s`
/// using `budgets[s]`. Each entry's base is the previous stage materialized.
pub fn iterate_k(
    x: &FinStruct,
    stages: usize,
    budgets: &[u64],
) -> Result<Vec<ExtendedStructure>, KatetovError> {
    if budgets.len() != stages {
        return Err(KatetovError::BudgetCount {
            expected: stages,
            got: budgets.len(),
        });
    }
    let mut chain: Vec<ExtendedStructure> = Vec::with_capacity(stages);
    for &budget in budgets {
        let stage = match chain.last() {
            None => apply_k(x, budget)?,
            Some(prev) => apply_k(&prev.materialize(), budget)?,
        };
        chain.push(stage);
    }
    Ok(chain)
}
