/// Set of 1-based PRB indices `1..=n_prb` stored as a bitset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrbSet {
    n_prb: u32,
    words: Vec<u64>,
}

impl PrbSet {
    pub fn new(n_prb: u32) -> Self {
        PrbSet {
            n_prb,
            words: vec![0; (n_prb as usize).div_ceil(64)],
        }
    }

    pub fn from_iter_n(n_prb: u32, prbs: impl IntoIterator<Item = u32>) -> Self {
        let mut s = PrbSet::new(n_prb);
        for k in prbs {
            s.insert(k);
        }
        s
    }

    pub fn n_prb(&self) -> u32 {
        self.n_prb
    }

    fn slot(&self, k: u32) -> (usize, u64) {
        assert!(k >= 1 && k <= self.n_prb, "PRB {k} outside 1..={}", self.n_prb);
        let i = (k - 1) as usize;
        (i / 64, 1u64 << (i % 64))
    }

    pub fn insert(&mut self, k: u32) -> bool {
        let (w, bit) = self.slot(k);
        let fresh = self.words[w] & bit == 0;
        self.words[w] |= bit;
        fresh
    }

    pub fn remove(&mut self, k: u32) -> bool {
        let (w, bit) = self.slot(k);
        let had = self.words[w] & bit != 0;
        self.words[w] &= !bit;
        had
    }

    pub fn contains(&self, k: u32) -> bool {
        if k == 0 || k > self.n_prb {
            return false;
        }
        let (w, bit) = self.slot(k);
        self.words[w] & bit != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn union_with(&mut self, other: &PrbSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn is_disjoint(&self, other: &PrbSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    /// Ascending PRB indices.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &bits)| {
            let mut bits = bits;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros();
                bits &= bits - 1;
                Some(w as u32 * 64 + b + 1)
            })
        })
    }

    /// Members of `self` not in `other`, ascending.
    pub fn difference<'a>(&'a self, other: &'a PrbSet) -> impl Iterator<Item = u32> + 'a {
        self.iter().filter(move |&k| !other.contains(k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_operations() {
        let mut a = PrbSet::from_iter_n(130, [1, 64, 65, 130]);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![1, 64, 65, 130]);
        assert_eq!(a.len(), 4);
        assert!(!a.insert(64));
        assert!(a.remove(64));
        assert!(!a.contains(64) && !a.contains(0) && !a.contains(131));
        let b = PrbSet::from_iter_n(130, [65, 2]);
        assert_eq!(a.difference(&b).collect::<Vec<_>>(), vec![1, 130]);
        assert!(!a.is_disjoint(&b));
        a.union_with(&b);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![1, 2, 65, 130]);
        a.clear();
        assert!(a.is_empty());
    }
}
