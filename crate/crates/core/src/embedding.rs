use crate::error::MorphismError;
use crate::structure::FinStruct;

/// A map between point positions, `map[i]` being the image of source
/// position `i`. Whether it is an embedding depends on the structures it is
/// checked against; see [`check_embedding`].
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Embedding {
    pub map: Vec<usize>,
}

impl Embedding {
    pub fn new(map: Vec<usize>) -> Self {
        Embedding { map }
    }

    pub fn identity(n: usize) -> Self {
        Embedding { map: (0..n).collect() }
    }

    pub fn apply(&self, p: usize) -> usize {
        self.map[p]
    }

    /// `other ∘ self`: first `self`, then `other`.
    pub fn then(&self, other: &Embedding) -> Embedding {
        Embedding {
            map: self.map.iter().map(|&p| other.map[p]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Checks that `map` is an injective, order- and color-preserving map from
/// `source` into `target`.
pub fn check_embedding(
    map: &[usize],
    source: &FinStruct,
    target: &FinStruct,
) -> Result<(), MorphismError> {
    if map.len() != source.len() {
        return Err(MorphismError::WrongLength {
            expected: source.len(),
            got: map.len(),
        });
    }
    if let Some(i) = map.iter().position(|&p| p >= target.len()) {
        return Err(MorphismError::OutOfRange(i));
    }
    let mut seen = vec![false; target.len()];
    for &p in map {
        if std::mem::replace(&mut seen[p], true) {
            return Err(MorphismError::NotInjective);
        }
    }
    for i in 0..map.len() {
        for j in i + 1..map.len() {
            if map[i] >= map[j] {
                return Err(MorphismError::OrderViolated(i, j));
            }
            if source.color(i, j) != target.color(map[i], map[j]) {
                return Err(MorphismError::ColorViolated(i, j));
            }
        }
    }
    Ok(())
}

pub fn is_embedding(map: &[usize], source: &FinStruct, target: &FinStruct) -> bool {
    check_embedding(map, source, target).is_ok()
}

/// All embeddings of `source` into `target`, in lexicographic order of maps.
/// Brute force over increasing position sequences.
pub fn all_embeddings(source: &FinStruct, target: &FinStruct) -> Vec<Embedding> {
    fn go(
        source: &FinStruct,
        target: &FinStruct,
        prefix: &mut Vec<usize>,
        out: &mut Vec<Embedding>,
    ) {
        let k = prefix.len();
        if k == source.len() {
            out.push(Embedding::new(prefix.clone()));
            return;
        }
        let start = prefix.last().map_or(0, |&p| p + 1);
        for cand in start..target.len() {
            if (0..k).all(|i| source.color(i, k) == target.color(prefix[i], cand)) {
                prefix.push(cand);
                go(source, target, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(source, target, &mut Vec::new(), &mut out);
    out
}
