use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

/// Memo key for a subset: its bitset words.
pub type SubsetKey = SmallVec<[u64; 2]>;

/// A finite set of ground-set indices, kept sorted and duplicate free.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Subset(Vec<usize>);

impl Subset {
    pub fn empty() -> Self {
        Subset(Vec::new())
    }

    pub fn new(elements: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = elements.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Subset(v)
    }

    /// Elements whose bit is set in `mask`.
    pub fn from_mask(mask: u64) -> Self {
        let mut v = Vec::with_capacity(mask.count_ones() as usize);
        let mut m = mask;
        while m != 0 {
            v.push(m.trailing_zeros() as usize);
            m &= m - 1;
        }
        Subset(v)
    }

    /// Picks `members[i]` for every bit `i` set in `mask`.
    pub fn from_mask_over(mask: u64, members: &[usize]) -> Self {
        let mut v = Vec::with_capacity(mask.count_ones() as usize);
        let mut m = mask;
        while m != 0 {
            v.push(members[m.trailing_zeros() as usize]);
            m &= m - 1;
        }
        v.sort_unstable();
        Subset(v)
    }

    pub fn full(n: usize) -> Self {
        Subset((0..n).collect())
    }

    /// Bitmask of the set. Panics if an element is >= 64.
    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0u64, |m, &e| {
            assert!(e < 64, "element {e} does not fit a 64-bit mask");
            m | (1u64 << e)
        })
    }

    pub fn key(&self) -> SubsetKey {
        let mut key = SubsetKey::new();
        for &e in &self.0 {
            let w = e / 64;
            if key.len() <= w {
                key.resize(w + 1, 0);
            }
            key[w] |= 1u64 << (e % 64);
        }
        key
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, e: usize) -> bool {
        self.0.binary_search(&e).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn insert(&mut self, e: usize) -> bool {
        match self.0.binary_search(&e) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, e);
                true
            }
        }
    }

    pub fn remove(&mut self, e: usize) -> bool {
        match self.0.binary_search(&e) {
            Ok(pos) => {
                self.0.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    /// `self + e`
    pub fn with(&self, e: usize) -> Self {
        let mut s = self.clone();
        s.insert(e);
        s
    }

    /// `self - e`
    pub fn without(&self, e: usize) -> Self {
        let mut s = self.clone();
        s.remove(e);
        s
    }

    /// `self - out + inn`
    pub fn swap(&self, out: usize, inn: usize) -> Self {
        let mut s = self.without(out);
        s.insert(inn);
        s
    }

    pub fn union(&self, other: &Subset) -> Self {
        Subset::new(self.iter().chain(other.iter()))
    }

    pub fn difference(&self, other: &Subset) -> Self {
        Subset(self.iter().filter(|&e| !other.contains(e)).collect())
    }

    pub fn intersection(&self, other: &Subset) -> Self {
        Subset(self.iter().filter(|&e| other.contains(e)).collect())
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.iter().all(|e| other.contains(e))
    }

    pub fn max_element(&self) -> Option<usize> {
        self.0.last().copied()
    }
}

impl From<Vec<usize>> for Subset {
    fn from(v: Vec<usize>) -> Self {
        Subset::new(v)
    }
}

impl<const N: usize> From<[usize; N]> for Subset {
    fn from(v: [usize; N]) -> Self {
        Subset::new(v)
    }
}

impl FromIterator<usize> for Subset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Subset::new(iter)
    }
}

/// Iterates over all `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = if k <= n { Some((0..k).collect()) } else { None };
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let next = {
            let c = current.as_mut().unwrap();
            let mut i = k;
            loop {
                if i == 0 {
                    break None;
                }
                i -= 1;
                if c[i] < n - k + i {
                    c[i] += 1;
                    for j in i + 1..k {
                        c[j] = c[j - 1] + 1;
                    }
                    break Some(());
                }
            }
        };
        if next.is_none() {
            current = None;
        }
        Some(out)
    })
}

/// Binomial coefficient as f64 (exact for the small arguments used here).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
