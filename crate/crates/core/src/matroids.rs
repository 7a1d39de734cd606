//! Matroids given by an independence oracle: uniform, partition, and an
//! arbitrary callback for tests.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::subset::{combinations, Subset};
use crate::{Error, Result};

/// Largest rank for which [`Matroid::exchange_bijection`] runs bipartite
/// matching on a callback matroid.
pub const CALLBACK_EXCHANGE_LIMIT: usize = 10;

pub type IndependenceFn = Arc<dyn Fn(&Subset) -> bool + Send + Sync>;

#[derive(Clone)]
pub enum MatroidKind {
    Uniform { k: usize },
    Partition { classes: Vec<usize>, capacities: Vec<usize> },
    /// The callback must describe a matroid; only its independence answers are
    /// used.
    Callback(IndependenceFn),
}

impl std::fmt::Debug for MatroidKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MatroidKind::Uniform { k } => write!(f, "Uniform {{ k: {k} }}"),
            MatroidKind::Partition { classes, capacities } => {
                write!(f, "Partition {{ classes: {classes:?}, capacities: {capacities:?} }}")
            }
            MatroidKind::Callback(_) => write!(f, "Callback"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Matroid {
    n: usize,
    kind: MatroidKind,
    rank: usize,
}

/// JSON form of the shipped matroid kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MatroidSpec {
    Uniform { n: usize, k: usize },
    Partition { n: usize, classes: Vec<usize>, capacities: Vec<usize> },
}

impl Matroid {
    /// Sets of size at most `min(k, n)`.
    pub fn uniform(n: usize, k: usize) -> Self {
        let k = k.min(n);
        Matroid { n, kind: MatroidKind::Uniform { k }, rank: k }
    }

    /// Element `e` belongs to class `classes[e]`; at most `capacities[c]`
    /// elements of class `c` may be chosen.
    pub fn partition(classes: Vec<usize>, capacities: Vec<usize>) -> Result<Self> {
        if let Some(&c) = classes.iter().find(|&&c| c >= capacities.len()) {
            return Err(Error::InvalidArgument(format!(
                "class {c} has no capacity (only {} capacities given)",
                capacities.len()
            )));
        }
        let mut sizes = vec![0usize; capacities.len()];
        for &c in &classes {
            sizes[c] += 1;
        }
        let rank = sizes.iter().zip(&capacities).map(|(s, c)| *s.min(c)).sum();
        Ok(Matroid { n: classes.len(), kind: MatroidKind::Partition { classes, capacities }, rank })
    }

    /// Matroid defined by an independence callback. The rank is found with
    /// the greedy rule from the empty set.
    pub fn from_callback(n: usize, independent: IndependenceFn) -> Self {
        let mut s = Subset::empty();
        for e in 0..n {
            if independent(&s.with(e)) {
                s.insert(e);
            }
        }
        Matroid { n, rank: s.len(), kind: MatroidKind::Callback(independent) }
    }

    pub fn from_spec(spec: &MatroidSpec) -> Result<Self> {
        match spec {
            MatroidSpec::Uniform { n, k } => Ok(Matroid::uniform(*n, *k)),
            MatroidSpec::Partition { n, classes, capacities } => {
                if classes.len() != *n {
                    return Err(Error::InvalidArgument(format!(
                        "partition matroid has n = {n} but {} class labels",
                        classes.len()
                    )));
                }
                Matroid::partition(classes.clone(), capacities.clone())
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: MatroidSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_spec(&spec)
    }

    /// `None` for callback matroids.
    pub fn spec(&self) -> Option<MatroidSpec> {
        match &self.kind {
            MatroidKind::Uniform { k } => Some(MatroidSpec::Uniform { n: self.n, k: *k }),
            MatroidKind::Partition { classes, capacities } => Some(MatroidSpec::Partition {
                n: self.n,
                classes: classes.clone(),
                capacities: capacities.clone(),
            }),
            MatroidKind::Callback(_) => None,
        }
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn kind(&self) -> &MatroidKind {
        &self.kind
    }

    pub fn is_independent(&self, set: &Subset) -> bool {
        if set.max_element().is_some_and(|e| e >= self.n) {
            return false;
        }
        match &self.kind {
            MatroidKind::Uniform { k } => set.len() <= *k,
            MatroidKind::Partition { classes, capacities } => {
                let mut used = vec![0usize; capacities.len()];
                for e in set.iter() {
                    let c = classes[e];
                    used[c] += 1;
                    if used[c] > capacities[c] {
                        return false;
                    }
                }
                true
            }
            MatroidKind::Callback(f) => f(set),
        }
    }

    pub fn is_base(&self, set: &Subset) -> bool {
        set.len() == self.rank && self.is_independent(set)
    }

    /// `T` disjoint from `s` such that `s + T` is a base and `sum of w over T`
    /// is maximal. Elements are scanned by descending weight (lowest index on
    /// ties) and kept whenever independence is preserved.
    pub fn max_weight_base_completion(&self, s: &Subset, weights: &[f64]) -> Result<Subset> {
        if !self.is_independent(s) {
            return Err(Error::InfeasibleCompletion(s.as_slice().to_vec()));
        }
        if weights.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for a ground set of size {}",
                weights.len(),
                self.n
            )));
        }
        let mut order: Vec<usize> = (0..self.n).filter(|e| !s.contains(*e)).collect();
        order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
        Ok(self.greedy_extend(s, order))
    }

    fn greedy_extend(&self, s: &Subset, order: impl IntoIterator<Item = usize>) -> Subset {
        let mut current = s.clone();
        let mut added = Subset::empty();
        for e in order {
            if current.len() == self.rank {
                break;
            }
            if self.can_add(&current, e) {
                current.insert(e);
                added.insert(e);
            }
        }
        added
    }

    /// Whether `s + e` is independent, given that `s` is.
    fn can_add(&self, s: &Subset, e: usize) -> bool {
        match &self.kind {
            MatroidKind::Uniform { k } => s.len() < *k,
            MatroidKind::Partition { classes, capacities } => {
                let c = classes[e];
                s.iter().filter(|&x| classes[x] == c).count() < capacities[c]
            }
            MatroidKind::Callback(f) => f(&s.with(e)),
        }
    }

    /// Shuffles the ground set and completes the empty set greedily in that
    /// order.
    pub fn random_base<R: Rng + ?Sized>(&self, rng: &mut R) -> Subset {
        let mut order: Vec<usize> = (0..self.n).collect();
        order.shuffle(rng);
        self.greedy_extend(&Subset::empty(), order)
    }

    /// The base obtained by completing `s` greedily by lowest index.
    pub fn complete_lowest(&self, s: &Subset) -> Result<Subset> {
        if !self.is_independent(s) {
            return Err(Error::InfeasibleCompletion(s.as_slice().to_vec()));
        }
        let added = self.greedy_extend(s, 0..self.n);
        Ok(s.union(&added))
    }

    /// Every base, in lexicographic order (exhaustive; intended for small n).
    pub fn bases(&self) -> Vec<Subset> {
        combinations(self.n, self.rank).map(Subset::from).filter(|s| self.is_independent(s)).collect()
    }

    /// A bijection `pi: A -> B` with `A - a + pi(a)` independent for every
    /// `a`, fixing `A ∩ B`. Returned as `(a, pi(a))` pairs sorted by `a`.
    pub fn exchange_bijection(&self, a: &Subset, b: &Subset) -> Result<Vec<(usize, usize)>> {
        if !self.is_base(a) || !self.is_base(b) {
            return Err(Error::NoBijection(format!("{:?} and {:?} are not both bases", a.as_slice(), b.as_slice())));
        }
        let mut pairs: Vec<(usize, usize)> = a.intersection(b).iter().map(|e| (e, e)).collect();
        let left: Vec<usize> = a.difference(b).into_vec();
        let right: Vec<usize> = b.difference(a).into_vec();
        match &self.kind {
            MatroidKind::Uniform { .. } => pairs.extend(left.iter().copied().zip(right.iter().copied())),
            MatroidKind::Partition { classes, .. } => {
                let mut used = vec![false; right.len()];
                for &x in &left {
                    let j = (0..right.len())
                        .find(|&j| !used[j] && classes[right[j]] == classes[x])
                        .ok_or_else(|| Error::NoBijection(format!("no partner of class {} for {x}", classes[x])))?;
                    used[j] = true;
                    pairs.push((x, right[j]));
                }
            }
            MatroidKind::Callback(_) => {
                if self.rank > CALLBACK_EXCHANGE_LIMIT {
                    return Err(Error::SetTooLarge { size: self.rank, limit: CALLBACK_EXCHANGE_LIMIT });
                }
                let adj: Vec<Vec<usize>> = left
                    .iter()
                    .map(|&x| (0..right.len()).filter(|&j| self.is_independent(&a.swap(x, right[j]))).collect())
                    .collect();
                let matched = perfect_matching(&adj, right.len())
                    .ok_or_else(|| Error::NoBijection("exchange graph has no perfect matching".into()))?;
                pairs.extend(left.iter().zip(matched).map(|(&x, j)| (x, right[j])));
            }
        }
        pairs.sort_unstable();
        Ok(pairs)
    }
}

/// Kuhn's augmenting-path matching; `adj[i]` lists the right vertices of left
/// vertex `i`. Returns the partner of each left vertex.
fn perfect_matching(adj: &[Vec<usize>], right: usize) -> Option<Vec<usize>> {
    fn augment(i: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &j in &adj[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if owner[j].is_none_or(|o| augment(o, adj, seen, owner)) {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; right];
    for i in 0..adj.len() {
        let mut seen = vec![false; right];
        if !augment(i, adj, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut partner = vec![0; adj.len()];
    for (j, o) in owner.iter().enumerate() {
        if let Some(i) = o {
            partner[*i] = j;
        }
    }
    Some(partner)
}
