//! Finite approximations of the generic limit of the level-0 class.
//!
//! An [`Approximation`] only ever grows by adding points, so successive
//! states form a chain of inclusions. Growth follows a dovetailing schedule
//! over rounds `(w, B)`: round `(w, B)` asks for every type with budget-`B`
//! colors over every subset of the first `w` created points. Rounds run in
//! increasing `w + B`, ties by `w`. A ledger remembers which tasks are
//! realized and by which point.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::color::ColorTerm;
use crate::embedding::{check_embedding, Embedding};
use crate::error::{LimitError, ParseError};
use crate::format::{tokenize, write_structure, Writer};
use crate::structure::{validate, FinStruct};
use crate::types::{enumerate_types, realize_type, type_of_point, OnePointType};

/// A one-point type whose support is given by point names, so that it stays
/// meaningful while the approximation grows.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct NamedType {
    pub support: Vec<String>,
    pub cut: usize,
    pub colors: Vec<ColorTerm>,
}

impl NamedType {
    pub fn from_type(t: &OnePointType, s: &FinStruct) -> Self {
        NamedType {
            support: t.support.iter().map(|&p| s.point(p).to_string()).collect(),
            cut: t.cut,
            colors: t.colors.clone(),
        }
    }

    pub fn resolve(&self, s: &FinStruct) -> Result<OnePointType, LimitError> {
        let support = self
            .support
            .iter()
            .map(|n| s.position(n).ok_or_else(|| LimitError::UnknownPoint(n.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(OnePointType {
            support,
            cut: self.cut,
            colors: self.colors.clone(),
            level: s.level(),
        })
    }
}

/// A finite partial map between points of one structure, by name, in the
/// order its pairs were added.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct PartialIso {
    pub pairs: Vec<(String, String)>,
}

impl PartialIso {
    pub fn new(pairs: Vec<(String, String)>) -> Self {
        PartialIso { pairs }
    }

    pub fn identity<'a>(points: impl IntoIterator<Item = &'a str>) -> Self {
        PartialIso {
            pairs: points
                .into_iter()
                .map(|p| (p.to_string(), p.to_string()))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn image(&self, p: &str) -> Option<&str> {
        self.pairs.iter().find(|(a, _)| a == p).map(|(_, b)| b.as_str())
    }

    pub fn preimage(&self, p: &str) -> Option<&str> {
        self.pairs.iter().find(|(_, b)| b == p).map(|(a, _)| a.as_str())
    }

    pub fn inverse(&self) -> PartialIso {
        PartialIso {
            pairs: self.pairs.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
        }
    }

    /// Domain and range positions in `s`, sorted by domain position.
    fn positions(&self, s: &FinStruct) -> Result<Vec<(usize, usize)>, LimitError> {
        let mut out = self
            .pairs
            .iter()
            .map(|(a, b)| {
                let pa = s.position(a).ok_or_else(|| LimitError::UnknownPoint(a.clone()))?;
                let pb = s.position(b).ok_or_else(|| LimitError::UnknownPoint(b.clone()))?;
                Ok((pa, pb))
            })
            .collect::<Result<Vec<_>, LimitError>>()?;
        out.sort_unstable();
        Ok(out)
    }

    /// True when the map and its inverse are both embeddings of the induced
    /// substructures of `s`.
    pub fn is_valid(&self, s: &FinStruct) -> bool {
        let Ok(pos) = self.positions(s) else {
            return false;
        };
        let domain: Vec<usize> = pos.iter().map(|p| p.0).collect();
        if domain.windows(2).any(|w| w[0] == w[1]) {
            return false;
        }
        let forward: Vec<usize> = pos.iter().map(|p| p.1).collect();
        let dom = s.induced(&domain);
        if check_embedding(&forward, &dom, s).is_err() {
            return false;
        }
        let mut back = pos.clone();
        back.sort_unstable_by_key(|p| p.1);
        let range: Vec<usize> = back.iter().map(|p| p.1).collect();
        let inverse: Vec<usize> = back.iter().map(|p| p.0).collect();
        check_embedding(&inverse, &s.induced(&range), s).is_ok()
    }

    pub fn to_lines(&self) -> Vec<String> {
        self.pairs.iter().map(|(a, b)| format!("pair {a} {b}")).collect()
    }

    /// Reads `pair <id> <id>` lines.
    pub fn parse(text: &str) -> Result<PartialIso, ParseError> {
        let mut pairs = Vec::new();
        for line in tokenize(text) {
            if line.keyword() == "pair" {
                line.expect_len(3)?;
                pairs.push((line.tokens[1].to_string(), line.tokens[2].to_string()));
            }
        }
        Ok(PartialIso { pairs })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Round {
    window: usize,
    budget: u64,
    /// Number of points actually available when the round was expanded.
    effective_window: usize,
}

/// Dovetailing task queue.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    max_budget: Option<u64>,
    current: Option<Round>,
    pending: VecDeque<NamedType>,
    completed: Vec<Round>,
}

impl Schedule {
    pub fn new(max_budget: Option<u64>) -> Self {
        Schedule {
            max_budget,
            current: None,
            pending: VecDeque::new(),
            completed: Vec::new(),
        }
    }

    fn next_round(&self) -> (usize, u64) {
        let mut at = match &self.current {
            None => return (0, 0),
            Some(r) => (r.window, r.budget),
        };
        loop {
            let d = at.0 as u64 + at.1;
            at = if at.1 == 0 {
                (0, d + 1)
            } else {
                (at.0 + 1, at.1 - 1)
            };
            if self.max_budget.map_or(true, |m| at.1 <= m) {
                return at;
            }
        }
    }

    /// Whether a completed round dominates `(window, budget)`, so that every
    /// task of that round has been processed.
    pub fn covers(&self, window: usize, budget: u64) -> bool {
        self.completed
            .iter()
            .any(|r| r.effective_window >= window && r.budget >= budget)
    }

    /// The round being processed and the number of tasks left in it.
    pub fn position(&self) -> Option<(usize, u64, usize)> {
        self.current
            .as_ref()
            .map(|r| (r.window, r.budget, self.pending.len()))
    }
}

/// Finite stage of the generic limit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Approximation {
    current: FinStruct,
    created: Vec<String>,
    ledger: BTreeMap<NamedType, String>,
    schedule: Schedule,
    fresh: usize,
}

impl Approximation {
    /// The empty approximation with an unbounded schedule.
    pub fn new() -> Self {
        Approximation::with_schedule(FinStruct::empty("approx", 0), Schedule::new(None))
            .expect("empty seed is valid")
    }

    /// An approximation starting from a valid level-0 seed; seed points
    /// count as created in their order.
    pub fn from_seed(seed: &FinStruct) -> Result<Self, LimitError> {
        Approximation::with_schedule(seed.clone(), Schedule::new(None))
    }

    pub fn with_schedule(seed: FinStruct, schedule: Schedule) -> Result<Self, LimitError> {
        if seed.level() != 0 || !validate(&seed).is_valid() {
            return Err(LimitError::BadSeed);
        }
        Ok(Approximation {
            created: seed.points().to_vec(),
            current: seed,
            ledger: BTreeMap::new(),
            schedule,
            fresh: 0,
        })
    }

    pub fn current(&self) -> &FinStruct {
        &self.current
    }

    pub fn created(&self) -> &[String] {
        &self.created
    }

    pub fn ledger(&self) -> &BTreeMap<NamedType, String> {
        &self.ledger
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    fn fresh_name(&mut self) -> String {
        loop {
            let name = format!("p{}", self.fresh);
            self.fresh += 1;
            if self.current.position(&name).is_none() {
                return name;
            }
        }
    }

    /// Smallest point (in the linear order) realizing `t`.
    pub fn find_realizer(&self, t: &OnePointType) -> Option<usize> {
        (0..self.current.len()).find(|&u| {
            t.support.binary_search(&u).is_err()
                && type_of_point(&self.current, u, &t.support).as_ref() == Ok(t)
        })
    }

    /// Adds a fresh point realizing `t` and returns its name.
    pub fn realize_fresh(&mut self, t: &NamedType) -> Result<String, LimitError> {
        let resolved = t.resolve(&self.current)?;
        let name = self.fresh_name();
        let (next, _) = realize_type(&self.current, &resolved, name.clone())?;
        self.current = next;
        self.created.push(name.clone());
        self.ledger.insert(t.clone(), name.clone());
        Ok(name)
    }

    /// Name of a realizer of `t`: the ledger entry, else the smallest
    /// existing realizer, else a fresh point.
    pub fn find_or_realize(&mut self, t: &NamedType) -> Result<String, LimitError> {
        if let Some(name) = self.ledger.get(t) {
            return Ok(name.clone());
        }
        let resolved = t.resolve(&self.current)?;
        if let Some(u) = self.find_realizer(&resolved) {
            let name = self.current.point(u).to_string();
            self.ledger.insert(t.clone(), name.clone());
            return Ok(name);
        }
        self.realize_fresh(t)
    }

    fn window_positions(&self, w: usize) -> Vec<usize> {
        let mut pos: Vec<usize> = self.created[..w.min(self.created.len())]
            .iter()
            .map(|n| self.current.position(n).expect("created points persist"))
            .collect();
        pos.sort_unstable();
        pos
    }

    /// All types with budget-`budget` colors over subsets of the first `w`
    /// created points, with supports named.
    fn window_tasks(&self, w: usize, budget: u64) -> Vec<NamedType> {
        let pos = self.window_positions(w);
        let window = self.current.induced(&pos);
        enumerate_types(&window, 0, budget)
            .iter()
            .map(|t| NamedType::from_type(t, &window))
            .collect()
    }

    fn close_round(&mut self) {
        if !self.schedule.pending.is_empty() {
            return;
        }
        if let Some(r) = &self.schedule.current {
            if !self.schedule.completed.contains(r) {
                self.schedule.completed.push(r.clone());
            }
        }
    }

    fn next_task(&mut self) -> NamedType {
        loop {
            if let Some(t) = self.schedule.pending.pop_front() {
                return t;
            }
            self.close_round();
            let (window, budget) = self.schedule.next_round();
            let effective_window = window.min(self.created.len());
            self.schedule.pending = self.window_tasks(window, budget).into();
            self.schedule.current = Some(Round {
                window,
                budget,
                effective_window,
            });
        }
    }

    /// Runs `steps` schedule steps.
    pub fn grow(&mut self, steps: usize) -> Result<(), LimitError> {
        for _ in 0..steps {
            let task = self.next_task();
            self.find_or_realize(&task)?;
            self.close_round();
        }
        Ok(())
    }

    /// Grows until round `(window, budget)` (or a dominating one) has been
    /// fully processed. Returns the number of steps taken.
    pub fn grow_until_covered(&mut self, window: usize, budget: u64) -> Result<usize, LimitError> {
        let mut steps = 0;
        while !self.schedule.covers(window, budget) {
            self.grow(1)?;
            steps += 1;
        }
        Ok(steps)
    }

    /// True iff every valid type with budget-`budget` colors over every
    /// subset of the first `w` created points is realized. A zero window
    /// asks for nothing.
    pub fn saturation_check(&self, w: usize, budget: u64) -> bool {
        if w == 0 {
            return true;
        }
        let pos = self.window_positions(w);
        let window = self.current.induced(&pos);
        enumerate_types(&window, 0, budget).iter().all(|t| {
            let lifted = OnePointType {
                support: t.support.iter().map(|&k| pos[k]).collect(),
                cut: t.cut,
                colors: t.colors.clone(),
                level: 0,
            };
            self.find_realizer(&lifted).is_some()
        })
    }

    /// Extends `p` to the point `u`: the type of `u` over the domain is
    /// carried through `p`, and its smallest realizer outside the range (a
    /// fresh one if none exists) becomes the image of `u`.
    pub fn extend_partial_iso(&mut self, p: &PartialIso, u: &str) -> Result<PartialIso, LimitError> {
        if p.image(u).is_some() {
            return Err(LimitError::InDomain(u.to_string()));
        }
        let pu = self
            .current
            .position(u)
            .ok_or_else(|| LimitError::UnknownPoint(u.to_string()))?;
        if !p.is_valid(&self.current) {
            return Err(LimitError::NotPartialIso);
        }
        let pos = p.positions(&self.current)?;
        let domain: Vec<usize> = pos.iter().map(|q| q.0).collect();
        let over = type_of_point(&self.current, pu, &domain)?;
        let moved = NamedType {
            support: pos
                .iter()
                .map(|q| self.current.point(q.1).to_string())
                .collect(),
            cut: over.cut,
            colors: over.colors,
        };
        let resolved = moved.resolve(&self.current)?;
        let image = match self.find_realizer(&resolved) {
            Some(v) => self.current.point(v).to_string(),
            None => self.realize_fresh(&moved)?,
        };
        let mut out = p.clone();
        out.pairs.push((u.to_string(), image));
        Ok(out)
    }

    /// The symmetric step: extends `p` so that `v` enters its range.
    pub fn extend_partial_iso_back(
        &mut self,
        p: &PartialIso,
        v: &str,
    ) -> Result<PartialIso, LimitError> {
        if p.preimage(v).is_some() {
            return Err(LimitError::InRange(v.to_string()));
        }
        Ok(self.extend_partial_iso(&p.inverse(), v)?.inverse())
    }

    /// Embeds `s` point by point, each point realized over the images of its
    /// predecessors. Returns the embedding into the final `current()`.
    pub fn embed(&mut self, s: &FinStruct) -> Result<Embedding, LimitError> {
        if s.level() != 0 || !validate(s).is_valid() {
            return Err(LimitError::BadSeed);
        }
        let mut images: Vec<String> = Vec::with_capacity(s.len());
        for k in 0..s.len() {
            let prefix: Vec<usize> = (0..k).collect();
            let t = type_of_point(s, k, &prefix)?;
            let task = NamedType {
                support: images.clone(),
                cut: t.cut,
                colors: t.colors,
            };
            let resolved = task.resolve(&self.current)?;
            let name = match self.find_realizer(&resolved) {
                Some(v) => self.current.point(v).to_string(),
                None => self.realize_fresh(&task)?,
            };
            images.push(name);
        }
        Ok(Embedding::new(
            images
                .iter()
                .map(|n| self.current.position(n).expect("realized"))
                .collect(),
        ))
    }

    /// Structure block followed by the ledger and the schedule state.
    pub fn write(&self, w: &mut Writer) {
        write_structure(w, &self.current);
        w.header(format!("ledger {}", self.current.name()));
        w.item(format!("created {}", self.created.join(" ")).trim_end().to_string());
        for (task, realizer) in &self.ledger {
            let supp = task.support.join(",");
            let colors: Vec<String> = task.colors.iter().map(|c| c.to_string()).collect();
            w.item(format!(
                "entry {realizer} type supp={supp} cut={} colors={} level=0",
                task.cut,
                colors.join(",")
            ));
        }
        if let Some((window, budget, left)) = self.schedule.position() {
            w.item(format!("round {window} {budget} pending {left}"));
        }
        w.end_block();
    }
}

impl Default for Approximation {
    fn default() -> Self {
        Approximation::new()
    }
}

/// Names of the points of `s` whose creation order is recorded in a
/// `created` ledger line, if present.
pub fn parse_created(text: &str) -> Option<Vec<String>> {
    tokenize(text)
        .into_iter()
        .find(|l| l.keyword() == "created")
        .map(|l| l.tokens[1..].iter().map(|s| s.to_string()).collect())
}

impl Approximation {
    /// Rebuilds an approximation from a structure and, optionally, its
    /// creation order. The ledger starts empty and the schedule restarts.
    pub fn from_parts(
        current: FinStruct,
        created: Option<Vec<String>>,
        max_budget: Option<u64>,
    ) -> Result<Self, LimitError> {
        let mut a = Approximation::with_schedule(current, Schedule::new(max_budget))?;
        if let Some(order) = created {
            let known: BTreeSet<&String> = a.current.points().iter().collect();
            let listed: BTreeSet<&String> = order.iter().collect();
            if known != listed || order.len() != a.current.len() {
                return Err(LimitError::BadSeed);
            }
            a.created = order;
        }
        Ok(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_realizes_the_free_type() {
        let mut a = Approximation::new();
        a.grow(1).unwrap();
        assert_eq!(a.current().len(), 1);
    }

    #[test]
    fn schedule_order() {
        let mut s = Schedule::new(None);
        let mut seen = Vec::new();
        for _ in 0..6 {
            let r = s.next_round();
            seen.push(r);
            s.current = Some(Round {
                window: r.0,
                budget: r.1,
                effective_window: 0,
            });
        }
        assert_eq!(seen, vec![(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]);
        let mut capped = Schedule::new(Some(0));
        capped.current = Some(Round {
            window: 0,
            budget: 0,
            effective_window: 0,
        });
        assert_eq!(capped.next_round(), (1, 0));
    }

    #[test]
    fn saturation_before_and_after() {
        let mut a = Approximation::new();
        assert!(a.saturation_check(0, 3));
        assert!(!a.saturation_check(1, 1));
        a.grow_until_covered(2, 1).unwrap();
        assert!(a.saturation_check(2, 1));
    }

    #[test]
    fn ledger_prevents_duplicates() {
        let mut a = Approximation::new();
        a.grow_until_covered(1, 1).unwrap();
        let before = a.current().clone();
        let tasks: Vec<NamedType> = a.ledger().keys().cloned().collect();
        for t in &tasks {
            a.find_or_realize(t).unwrap();
        }
        assert_eq!(a.current(), &before);
        for (t, name) in a.ledger() {
            let u = a.current().position(name).unwrap();
            let resolved = t.resolve(a.current()).unwrap();
            assert_eq!(type_of_point(a.current(), u, &resolved.support).unwrap(), resolved);
        }
    }

    #[test]
    fn free_extension_of_empty_iso() {
        let mut a = Approximation::new();
        a.grow_until_covered(2, 1).unwrap();
        let u = a.current().point(0).to_string();
        let p = a.extend_partial_iso(&PartialIso::default(), &u).unwrap();
        // the smallest realizer of the free type is the first point
        assert_eq!(p.pairs, vec![(u.clone(), a.current().point(0).to_string())]);
    }

    #[test]
    fn extension_preserves_color_to_fixed_point() {
        let mut a = Approximation::new();
        a.grow_until_covered(2, 2).unwrap();
        let s = a.current().clone();
        for x in 0..s.len() {
            for t1 in 0..s.len() {
                if x == t1 {
                    continue;
                }
                let (xn, tn) = (s.point(x).to_string(), s.point(t1).to_string());
                let p = PartialIso::identity([xn.as_str()]);
                let mut b = a.clone();
                let q = b.extend_partial_iso(&p, &tn).unwrap();
                assert!(q.is_valid(b.current()));
                let t2 = q.image(&tn).unwrap();
                let cur = b.current();
                let (px, p1, p2) = (
                    cur.position(&xn).unwrap(),
                    cur.position(&tn).unwrap(),
                    cur.position(t2).unwrap(),
                );
                assert_eq!(cur.color(px, p1), cur.color(px, p2));
                assert_eq!(px < p1, px < p2);
            }
        }
    }

    #[test]
    fn back_and_forth_four_points() {
        let mut a = Approximation::new();
        a.grow_until_covered(2, 1).unwrap();
        let names: Vec<String> = a.current().points().to_vec();
        let mut p = PartialIso::default();
        for (k, n) in names.iter().take(4).enumerate() {
            p = if k % 2 == 0 {
                a.extend_partial_iso(&p, n).unwrap()
            } else if p.preimage(n).is_none() {
                a.extend_partial_iso_back(&p, n).unwrap()
            } else {
                p
            };
            assert!(p.is_valid(a.current()));
        }
        assert!(p.len() >= 3);
    }

    #[test]
    fn embed_small_structures() {
        let mut a = Approximation::new();
        let e = a.embed(&FinStruct::empty("e", 0)).unwrap();
        assert!(e.is_empty());
        let s = FinStruct::from_fn(
            "s",
            0,
            vec!["a".into(), "b".into(), "c".into()],
            |i, j| ColorTerm::base(0, (i + j) as u64 % 2),
        )
        .unwrap();
        let e = a.embed(&s).unwrap();
        assert!(crate::embedding::is_embedding(&e.map, &s, a.current()));
        let again = a.embed(&s).unwrap();
        assert_eq!(e, again);
    }

    #[test]
    fn deterministic_runs() {
        let mut a = Approximation::new();
        let mut b = Approximation::new();
        a.grow(40).unwrap();
        b.grow(40).unwrap();
        let (mut wa, mut wb) = (Writer::default(), Writer::default());
        a.write(&mut wa);
        b.write(&mut wb);
        assert_eq!(wa.finish(), wb.finish());
    }
}
