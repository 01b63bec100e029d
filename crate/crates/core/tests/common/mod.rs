//! Test-only oracles, written without the library's own algorithms: plain
//! enumeration and direct checks.
#![allow(dead_code)]

pub mod criteria;

use std::collections::BTreeSet;

use fraisse_core::{ColorTerm, FinStruct};

pub fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

/// Some triple `i < j < k` with all three colors equal.
pub fn has_mono_triangle(n: usize, color: impl Fn(usize, usize) -> ColorTerm) -> bool {
    for i in 0..n {
        for j in i + 1..n {
            let c = color(i, j);
            for k in j + 1..n {
                if color(i, k) == c && color(j, k) == c {
                    return true;
                }
            }
        }
    }
    false
}

/// Every triangle-free level-0 structure on `n` points with colors
/// `Base(0, 0..k)`.
pub fn all_structures(n: usize, k: u64) -> Vec<FinStruct> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let total = (k as usize).pow(pairs.len() as u32);
    let mut out = Vec::new();
    for mut code in 0..total {
        let mut table = vec![vec![0u64; n]; n];
        for &(i, j) in &pairs {
            let c = (code % k as usize) as u64;
            code /= k as usize;
            table[i][j] = c;
            table[j][i] = c;
        }
        if has_mono_triangle(n, |i, j| ColorTerm::base(0, table[i][j])) {
            continue;
        }
        let s = FinStruct::from_fn(format!("s{n}_{}", out.len()), 0, names(n), |i, j| {
            ColorTerm::base(0, table[i][j])
        })
        .unwrap();
        out.push(s);
    }
    out
}

/// A type as plain data: support positions, cut, colors.
pub type RawType = (Vec<usize>, usize, Vec<ColorTerm>);

/// All one-point types over a level-0 `x` with colors `Base(0, 0..budget)`,
/// found by building every candidate one-point extension of the support
/// and scanning it for monochromatic triangles.
pub fn brute_types(x: &FinStruct, budget: u64) -> BTreeSet<RawType> {
    let n = x.len();
    let mut out = BTreeSet::new();
    for mask in 0u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|p| mask >> p & 1 == 1).collect();
        let m = support.len();
        let combos = (budget as usize).pow(m as u32);
        for mut code in 0..combos {
            let mut colors = Vec::with_capacity(m);
            for _ in 0..m {
                colors.push(ColorTerm::base(0, (code % budget as usize) as u64));
                code /= budget as usize;
            }
            // the new point is index m in this little structure
            let color = |i: usize, j: usize| -> ColorTerm {
                match (i == m, j == m) {
                    (true, _) => colors[j].clone(),
                    (_, true) => colors[i].clone(),
                    _ => x.color(support[i], support[j]).clone(),
                }
            };
            if has_mono_triangle(m + 1, color) {
                continue;
            }
            for cut in 0..=m {
                out.insert((support.clone(), cut, colors.clone()));
            }
        }
    }
    out
}

/// Equivalence of two marked pairs inside (possibly different) structures:
/// the unique order-preserving bijection between the point sets must keep
/// the marks in place and all colors except the one between the marks.
pub fn marked_pairs_equivalent(
    s: &FinStruct,
    set_s: &[usize],
    marks_s: (usize, usize),
    t: &FinStruct,
    set_t: &[usize],
    marks_t: (usize, usize),
) -> bool {
    if set_s.len() != set_t.len() {
        return false;
    }
    let mut a = set_s.to_vec();
    let mut b = set_t.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    let at = |v: &[usize], p: usize| v.iter().position(|&q| q == p).unwrap();
    if at(&a, marks_s.0) != at(&b, marks_t.0) || at(&a, marks_s.1) != at(&b, marks_t.1) {
        return false;
    }
    let skip = |x: usize, y: usize, m: (usize, usize)| (x, y) == m || (y, x) == m;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if skip(a[i], a[j], marks_s) {
                continue;
            }
            if s.color(a[i], a[j]) != t.color(b[i], b[j]) {
                return false;
            }
        }
    }
    true
}

/// Lowest gap of `x` (number of base points below) compatible with a
/// point above exactly the first `cut` points of `support`.
pub fn minimal_gap(n: usize, support: &[usize], cut: usize) -> usize {
    (0..=n)
        .find(|&g| {
            support
                .iter()
                .enumerate()
                .all(|(k, &s)| (s < g) == (k < cut))
        })
        .expect("some gap is consistent")
}

/// Every increasing injection of `0..m` into `0..n`.
pub fn increasing_maps(m: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(m: usize, n: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for p in start..n {
            cur.push(p);
            go(m, n, p + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(m, n, 0, &mut Vec::new(), &mut out);
    out
}

/// Order- and color-preserving check of a map given by positions.
pub fn preserves(s: &FinStruct, map: &[(usize, usize)]) -> bool {
    map.iter().all(|&(a, fa)| {
        map.iter().all(|&(b, fb)| {
            a == b || ((a < b) == (fa < fb) && fa != fb && s.color(a, b) == s.color(fa, fb))
        })
    })
}
