//! Exhaustive checks behind the acceptance criteria, shared by the core
//! integration tests and the acceptance target.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use fraisse_core::embedding::all_embeddings;
use fraisse_core::katetov::{map_morphism, order_type_vs_point, Element};
use fraisse_core::limit::{Approximation, PartialIso};
use fraisse_core::refuter::{
    battery, check_certificate_by_name, control_lo, mutants, refute, strategy::Spoiler,
};
use fraisse_core::{
    apply_k, compare_types, enumerate_types, type_of_point, ColorTerm, Embedding, FinStruct,
};

use super::*;

pub struct Outcome {
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (ok, detail) = f();
    let elapsed = start.elapsed();
    let in_time = limit.is_none_or(|l| elapsed <= l);
    Outcome {
        passed: ok && in_time,
        detail: if in_time {
            detail
        } else {
            format!("{detail}; over the time limit")
        },
        elapsed,
    }
}

/// Every structure of size `0..=max` over two base colors.
pub fn small_structures(max: usize) -> Vec<FinStruct> {
    (0..=max).flat_map(|n| all_structures(n, 2)).collect()
}

/// compare_types is a strict total order on every type list.
pub fn total_order() -> Outcome {
    timed(Some(Duration::from_secs(30)), || {
        let mut violations = 0usize;
        let mut lists = 0usize;
        for x in small_structures(3) {
            for b in 0..=2 {
                let ts = enumerate_types(&x, 0, b);
                lists += 1;
                for (i, a) in ts.iter().enumerate() {
                    if compare_types(a, a) != Ordering::Equal {
                        violations += 1;
                    }
                    for (j, c) in ts.iter().enumerate() {
                        let ac = compare_types(a, c);
                        if i != j && (ac == Ordering::Equal || ac != compare_types(c, a).reverse()) {
                            violations += 1;
                        }
                        // the enumeration is sorted, so the order must match positions
                        if ac != i.cmp(&j) {
                            violations += 1;
                        }
                    }
                }
                // transitivity over all triples
                for a in &ts {
                    for b2 in &ts {
                        if compare_types(a, b2) != Ordering::Less {
                            continue;
                        }
                        for c in &ts {
                            if compare_types(b2, c) == Ordering::Less
                                && compare_types(a, c) != Ordering::Less
                            {
                                violations += 1;
                            }
                        }
                    }
                }
            }
        }
        (violations == 0, format!("{lists} type lists, {violations} violations"))
    })
}

/// K(x) has no monochromatic triangle; triples are tallied by how many of
/// their points are type elements.
pub fn triangle_free() -> Outcome {
    timed(Some(Duration::from_secs(60)), || {
        let mut by_kind = [0usize; 4];
        let mut bad = 0usize;
        let mut misplaced = 0usize;
        for x in small_structures(3) {
            for b in 0..=2 {
                let kx = apply_k(&x, b).unwrap();
                let m = kx.materialize();
                let is_type: Vec<bool> = (0..m.len())
                    .map(|p| matches!(kx.element(p), Element::Type(_)))
                    .collect();
                for i in 0..m.len() {
                    for j in i + 1..m.len() {
                        for k in j + 1..m.len() {
                            let kind = [i, j, k].iter().filter(|&&p| is_type[p]).count();
                            by_kind[kind] += 1;
                            let c = m.color(i, j);
                            if m.color(i, k) == c && m.color(j, k) == c {
                                bad += 1;
                            }
                        }
                    }
                }
                // placement cross-check: each type sits in its minimal gap
                for (idx, t) in kx.types().iter().enumerate() {
                    let pos = kx.type_position(idx);
                    let below = (0..x.len()).filter(|&v| kx.base_position(v) < pos).count();
                    if below != minimal_gap(x.len(), &t.support, t.cut) {
                        misplaced += 1;
                    }
                    for v in 0..x.len() {
                        let expected = if v < below { Ordering::Greater } else { Ordering::Less };
                        if order_type_vs_point(t, v) != expected {
                            misplaced += 1;
                        }
                    }
                }
            }
        }
        let covered = by_kind.iter().all(|&c| c > 0);
        (
            bad == 0 && misplaced == 0 && covered,
            format!(
                "triples with 0/1/2/3 type points: {}/{}/{}/{}, {bad} monochromatic, {misplaced} misplaced",
                by_kind[0], by_kind[1], by_kind[2], by_kind[3]
            ),
        )
    })
}

/// All embeddings among the given structures, as (source, target, map).
fn embeddings(structs: &[FinStruct]) -> Vec<(usize, usize, Embedding)> {
    let mut out = Vec::new();
    for (i, s) in structs.iter().enumerate() {
        for (j, t) in structs.iter().enumerate() {
            for e in all_embeddings(s, t) {
                out.push((i, j, e));
            }
        }
    }
    out
}

/// K(id) = id, K(g∘f) = K(g)∘K(f), K(e) restricted to the base is e, K(e) is
/// an embedding, and K is faithful.
pub fn functor_laws() -> Outcome {
    timed(Some(Duration::from_secs(30)), || {
        let structs = small_structures(2);
        let ks: Vec<_> = structs.iter().map(|x| apply_k(x, 2).unwrap()).collect();
        let ms: Vec<_> = ks.iter().map(|k| k.materialize()).collect();
        let es = embeddings(&structs);
        let k_of = |i: usize, j: usize, e: &Embedding| map_morphism(e, &ks[i], &ks[j]).unwrap();
        let mut failures = 0usize;
        let mut compositions = 0usize;
        for (i, j, e) in &es {
            let ke = k_of(*i, *j, e);
            if !fraisse_core::is_embedding(&ke.map, &ms[*i], &ms[*j]) {
                failures += 1;
            }
            // naturality
            let via_k = ks[*i].inclusion().then(&ke);
            let via_e = e.then(&ks[*j].inclusion());
            if via_k.map != via_e.map {
                failures += 1;
            }
            if i == j && e.map == Embedding::identity(structs[*i].len()).map {
                if ke.map != Embedding::identity(ks[*i].len()).map {
                    failures += 1;
                }
            }
            for (j2, l, g) in &es {
                if j2 != j {
                    continue;
                }
                compositions += 1;
                let composed = k_of(*i, *l, &e.then(g));
                if composed.map != ke.then(&k_of(*j, *l, g)).map {
                    failures += 1;
                }
            }
        }
        // faithfulness: distinct embeddings between the same pair stay distinct
        let mut images: BTreeMap<(usize, usize), BTreeSet<Vec<usize>>> = BTreeMap::new();
        let mut count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (i, j, e) in &es {
            images.entry((*i, *j)).or_default().insert(k_of(*i, *j, e).map);
            *count.entry((*i, *j)).or_default() += 1;
        }
        for (key, set) in &images {
            if set.len() != count[key] {
                failures += 1;
            }
        }
        (
            failures == 0,
            format!("{} embeddings, {compositions} compositions, {failures} failures", es.len()),
        )
    })
}

/// Positions in K(x) of the supports of two type elements and the
/// elements themselves.
fn pair_points(k: &fraisse_core::ExtendedStructure, a: usize, b: usize) -> (Vec<usize>, (usize, usize)) {
    let ts = k.types();
    let mut set: BTreeSet<usize> = ts[a]
        .support
        .iter()
        .chain(ts[b].support.iter())
        .map(|&v| k.base_position(v))
        .collect();
    let (pa, pb) = (k.type_position(a), k.type_position(b));
    set.insert(pa);
    set.insert(pb);
    (set.into_iter().collect(), (pa.min(pb), pa.max(pb)))
}

/// Pair equivalence is preserved and reflected by K(f), and pair colors
/// agree exactly with the equivalence (inherited colors along embeddings,
/// distinct colors for inequivalent pairs).
pub fn claim_one() -> Outcome {
    timed(None, || {
        let structs = small_structures(2);
        let ks: Vec<_> = structs.iter().map(|x| apply_k(x, 2).unwrap()).collect();
        let ms: Vec<_> = ks.iter().map(|k| k.materialize()).collect();
        let mut checked = 0usize;
        let mut violations = 0usize;
        for (i, j, e) in embeddings(&structs) {
            let (kx, ky) = (&ks[i], &ks[j]);
            let ke = map_morphism(&e, kx, ky).unwrap();
            let img = |t: usize| {
                let p = ke.apply(kx.type_position(t));
                match ky.element(p) {
                    Element::Type(u) => u,
                    Element::Base(_) => unreachable!("types map to types"),
                }
            };
            let n = kx.types().len();
            let pairs: Vec<(usize, usize)> =
                (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
            for (p, &(a0, b0)) in pairs.iter().enumerate() {
                let (s0, m0) = pair_points(kx, a0, b0);
                let (t0, n0) = pair_points(ky, img(a0), img(b0));
                for &(a1, b1) in &pairs[p..] {
                    let (s1, m1) = pair_points(kx, a1, b1);
                    let (t1, n1) = pair_points(ky, img(a1), img(b1));
                    let before = marked_pairs_equivalent(&ms[i], &s0, m0, &ms[i], &s1, m1);
                    let after = marked_pairs_equivalent(&ms[j], &t0, n0, &ms[j], &t1, n1);
                    let same_color = ms[i].color(m0.0, m0.1) == ms[i].color(m1.0, m1.1);
                    checked += 1;
                    if before != after || before != same_color {
                        violations += 1;
                    }
                }
            }
        }
        (violations == 0, format!("{checked} pair comparisons, {violations} violations"))
    })
}

/// enumerate_types matches the brute-force enumerator.
pub fn type_counts() -> Outcome {
    timed(None, || {
        let mut mismatches = 0usize;
        let mut lists = 0usize;
        for x in small_structures(3) {
            for b in 0..=2 {
                let got: BTreeSet<RawType> = enumerate_types(&x, 0, b)
                    .into_iter()
                    .map(|t| (t.support, t.cut, t.colors))
                    .collect();
                let listed = enumerate_types(&x, 0, b).len();
                let want = brute_types(&x, b);
                lists += 1;
                if got != want || listed != want.len() {
                    mismatches += 1;
                }
            }
        }
        let empty = FinStruct::empty("e", 0);
        let one = &all_structures(1, 1)[0];
        let two = FinStruct::from_fn("x", 0, names(2), |_, _| ColorTerm::base(0, 0)).unwrap();
        let examples = enumerate_types(&empty, 0, 2).len() == 1
            && (0..=2).all(|b| enumerate_types(one, 0, b).len() == 1 + 2 * b as usize)
            && enumerate_types(&two, 0, 2).len() == 18;
        (
            mismatches == 0 && examples,
            format!("{lists} lists, {mismatches} mismatches, examples 1 / 1+2B / 18 {}", if examples { "hold" } else { "fail" }),
        )
    })
}

/// Pair colors survive every K(f), and each type element realizes its type.
pub fn pair_color_functoriality() -> Outcome {
    timed(None, || {
        let structs = small_structures(2);
        let mut checked = 0usize;
        let mut failures = 0usize;
        for (i, j, e) in embeddings(&structs) {
            let kx = apply_k(&structs[i], 2).unwrap();
            let ky = apply_k(&structs[j], 2).unwrap();
            let ke = map_morphism(&e, &kx, &ky).unwrap();
            let n = kx.types().len();
            for a in 0..n {
                for b in a + 1..n {
                    let (pa, pb) = (kx.type_position(a), kx.type_position(b));
                    checked += 1;
                    if kx.color(pa, pb) != ky.color(ke.apply(pa), ke.apply(pb)) {
                        failures += 1;
                    }
                }
            }
        }
        for x in small_structures(3) {
            let kx = apply_k(&x, 2).unwrap();
            let m = kx.materialize();
            let base: Vec<usize> = (0..x.len()).map(|v| kx.base_position(v)).collect();
            for (idx, t) in kx.types().iter().enumerate() {
                let got = type_of_point(&m, kx.type_position(idx), &base).unwrap();
                let want: Vec<ColorTerm> = base
                    .iter()
                    .enumerate()
                    .map(|(v, _)| match t.support.binary_search(&v) {
                        Ok(k) => t.colors[k].clone(),
                        Err(_) => ColorTerm::marker(1),
                    })
                    .collect();
                if got.colors != want {
                    failures += 1;
                }
            }
        }
        (failures == 0, format!("{checked} pairs, {failures} failures"))
    })
}

/// Coverage of (w=3, B=1), then saturation and one-point extensions among
/// the first eight points.
pub fn limit_engine() -> Outcome {
    timed(Some(Duration::from_secs(60)), || {
        let mut approx = Approximation::new();
        let steps = approx.grow_until_covered(3, 1).unwrap();
        let saturated = approx.saturation_check(3, 1);
        let first: Vec<String> = approx.created()[..8.min(approx.created().len())].to_vec();
        let mut attempts = 0usize;
        let mut failures = 0usize;
        for size in 0..=2 {
            for a in increasing_maps(size, first.len()) {
                for b in increasing_maps(size, first.len()) {
                    let cur = approx.current().clone();
                    let pos = |names: &[usize]| -> Vec<usize> {
                        names.iter().map(|&k| cur.position(&first[k]).unwrap()).collect()
                    };
                    let (pa, pb) = (pos(&a), pos(&b));
                    let mut sa: Vec<(usize, usize)> = pa.iter().copied().zip(pb.iter().copied()).collect();
                    sa.sort_unstable();
                    if !preserves(&cur, &sa) {
                        continue;
                    }
                    let iso = PartialIso::new(
                        a.iter()
                            .zip(&b)
                            .map(|(&x, &y)| (first[x].clone(), first[y].clone()))
                            .collect(),
                    );
                    for u in 0..first.len() {
                        if a.contains(&u) {
                            continue;
                        }
                        attempts += 1;
                        match approx.extend_partial_iso(&iso, &first[u]) {
                            Ok(ext) => {
                                let s = approx.current();
                                let mut m: Vec<(usize, usize)> = ext
                                    .pairs
                                    .iter()
                                    .map(|(x, y)| (s.position(x).unwrap(), s.position(y).unwrap()))
                                    .collect();
                                m.sort_unstable();
                                if !preserves(s, &m) {
                                    failures += 1;
                                }
                            }
                            Err(_) => failures += 1,
                        }
                    }
                }
            }
        }
        (
            saturated && failures == 0,
            format!(
                "{steps} steps, {} points, saturation {}, {attempts} extensions, {failures} failures",
                approx.current().len(),
                if saturated { "holds" } else { "fails" }
            ),
        )
    })
}

/// Refutation battery with the mutation check.
pub fn refutation_battery() -> Outcome {
    timed(None, || {
        let mut certs = 0usize;
        let mut accepted = 0usize;
        let mut kinds: BTreeMap<&'static str, (usize, usize, usize)> = BTreeMap::new();
        let mut misclassified = 0usize;
        let mut record = |cert: &fraisse_core::refuter::RefutationCertificate| {
            certs += 1;
            if check_certificate_by_name(cert).is_ok() {
                accepted += 1;
            }
            let entry = kinds.entry(cert.verdict.kind()).or_default();
            entry.0 += 1;
            for (_, m) in mutants(cert) {
                entry.1 += 1;
                if check_certificate_by_name(&m).is_ok() {
                    entry.2 += 1;
                    misclassified += 1;
                }
            }
        };
        for x in small_structures(2) {
            for tau in enumerate_types(&x, 0, 2) {
                for mut s in battery() {
                    let cert = refute(&x, &tau, s.as_mut(), 3).unwrap();
                    record(&cert);
                }
                let cert = refute(&x, &tau, &mut Spoiler::default(), 3).unwrap();
                record(&cert);
            }
        }
        let mut detail = format!("{certs} certificates, {accepted} accepted");
        let mut enough = true;
        for (kind, (n, m, leaked)) in &kinds {
            detail.push_str(&format!("; {kind}: {n} certs, {m} mutants, {leaked} accepted"));
            enough &= *m >= 10 * n;
        }
        let all_kinds = kinds.len() == 3;
        (
            accepted == certs && misclassified == 0 && enough && all_kinds,
            detail,
        )
    })
}

pub fn positive_control() -> Outcome {
    timed(None, || {
        let mut runs = 0usize;
        let mut violations = 0usize;
        let mut checks = 0usize;
        for size in 0..=3 {
            for cut in 0..=size {
                let r = control_lo(size, cut, 3, 20, 0);
                runs += 1;
                violations += r.violations;
                checks += r.checks;
            }
        }
        (
            violations == 0,
            format!("{runs} cuts, {checks} checks, {violations} violations"),
        )
    })
}
