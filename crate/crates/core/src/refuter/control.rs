//! Positive control on pure linear orders, where homogeneous one-point
//! extensions exist.
//!
//! The model is color-free: an approximation of the rationals is a list of
//! point ids in increasing order, and a fresh point can be inserted into any
//! gap. The strategy "t sits directly below the upper part of the cut" is
//! checked against randomly sampled back-and-forth partial isomorphisms
//! fixing the base.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlReport {
    pub size: usize,
    pub cut: usize,
    pub depth: usize,
    pub samples: usize,
    /// Number of (point, image) pairs whose answers were compared.
    pub checks: usize,
    pub violations: usize,
}

impl ControlReport {
    pub fn to_lines(&self) -> Vec<String> {
        vec![
            format!("control lo size {} cut {}", self.size, self.cut),
            format!("depth {}", self.depth),
            format!("samples {}", self.samples),
            format!("checks {}", self.checks),
            format!("violations {}", self.violations),
        ]
    }
}

struct Order {
    ids: Vec<u32>,
    next: u32,
}

impl Order {
    fn pos(&self, id: u32) -> usize {
        self.ids.iter().position(|&p| p == id).expect("known id")
    }

    fn insert(&mut self, at: usize) -> u32 {
        let id = self.next;
        self.next += 1;
        self.ids.insert(at, id);
        id
    }
}

/// Open interval of positions strictly between the neighbours of `p`
/// within `from`, carried over to the matching neighbours within `to`.
fn matching_gap(order: &Order, pairs: &[(u32, u32)], p: u32) -> (usize, usize) {
    let pp = order.pos(p);
    let below = pairs
        .iter()
        .filter(|(d, _)| order.pos(*d) < pp)
        .max_by_key(|(d, _)| order.pos(*d));
    let above = pairs
        .iter()
        .filter(|(d, _)| order.pos(*d) > pp)
        .min_by_key(|(d, _)| order.pos(*d));
    let lo = below.map_or(0, |(_, r)| order.pos(*r) + 1);
    let hi = above.map_or(order.ids.len(), |(_, r)| order.pos(*r));
    (lo, hi)
}

/// Picks an image for `p` in the gap matching its position over `pairs`:
/// an existing free point or a fresh one.
fn extend(order: &mut Order, pairs: &[(u32, u32)], p: u32, rng: &mut ChaCha8Rng) -> u32 {
    let (lo, hi) = matching_gap(order, pairs, p);
    let free: Vec<u32> = order.ids[lo..hi]
        .iter()
        .copied()
        .filter(|&q| !pairs.iter().any(|(_, r)| *r == q))
        .collect();
    if !free.is_empty() && rng.gen_bool(0.5) {
        free[rng.gen_range(0..free.len())]
    } else {
        // recompute after a possible insertion below
        let at = rng.gen_range(lo..=hi);
        order.insert(at)
    }
}

/// Runs `samples` random back-and-forth sequences of length `depth` from the
/// identity on an `size`-point base and compares the strategy's sides on
/// every pair of the resulting maps.
pub fn control_lo(size: usize, cut: usize, depth: usize, samples: usize, seed: u64) -> ControlReport {
    assert!(cut <= size, "cut beyond the base");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = 0;
    let mut violations = 0;
    for _ in 0..samples {
        // base points interleaved with two free points per gap
        let mut order = Order {
            ids: Vec::new(),
            next: 0,
        };
        let mut base = Vec::with_capacity(size);
        for k in 0..=size {
            for _ in 0..2 {
                let at = order.ids.len();
                order.insert(at);
            }
            if k < size {
                let at = order.ids.len();
                base.push(order.insert(at));
            }
        }
        let mut pairs: Vec<(u32, u32)> = base.iter().map(|&b| (b, b)).collect();
        for step in 0..depth {
            let forth = step % 2 == 0;
            let taken = |q: u32, pairs: &[(u32, u32)]| {
                pairs
                    .iter()
                    .any(|(d, r)| if forth { *d == q } else { *r == q })
            };
            let free: Vec<u32> = order
                .ids
                .iter()
                .copied()
                .filter(|&q| !taken(q, &pairs))
                .collect();
            let p = if free.is_empty() || rng.gen_bool(0.25) {
                let at = rng.gen_range(0..=order.ids.len());
                order.insert(at)
            } else {
                free[rng.gen_range(0..free.len())]
            };
            if forth {
                let image = extend(&mut order, &pairs, p, &mut rng);
                pairs.push((p, image));
            } else {
                let inverse: Vec<(u32, u32)> = pairs.iter().map(|&(d, r)| (r, d)).collect();
                let pre = extend(&mut order, &inverse, p, &mut rng);
                pairs.push((pre, p));
            }
        }

        // u < t iff u lies below every upper-cut base point
        let bound = base.get(cut).copied();
        let below_t = |order: &Order, u: u32| bound.is_none_or(|b| order.pos(u) < order.pos(b));
        for &(d, r) in &pairs {
            checks += 1;
            if below_t(&order, d) != below_t(&order, r) {
                violations += 1;
            }
        }
        debug_assert!(is_order_preserving(&order, &pairs));
    }
    ControlReport {
        size,
        cut,
        depth,
        samples,
        checks,
        violations,
    }
}

fn is_order_preserving(order: &Order, pairs: &[(u32, u32)]) -> bool {
    pairs.iter().all(|&(d1, r1)| {
        pairs
            .iter()
            .all(|&(d2, r2)| (order.pos(d1) < order.pos(d2)) == (order.pos(r1) < order.pos(r2)))
    })
}
