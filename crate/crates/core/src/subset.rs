use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A subset of a ground set `0..n`, stored as a bitmask.
///
/// Trailing zero words are trimmed so that equality and hashing do not depend
/// on how the set was built.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset {
    words: Vec<u64>,
}

impl Subset {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a subset from the low bits of `mask`.
    pub fn from_mask(mask: u64) -> Self {
        let mut s = Subset { words: vec![mask] };
        s.trim();
        s
    }

    /// Every element of `0..n`.
    pub fn full(n: usize) -> Self {
        (0..n).collect()
    }

    /// The mask form, if every element is below 64.
    pub fn to_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.words
            .get(v / 64)
            .is_some_and(|w| w & (1u64 << (v % 64)) != 0)
    }

    /// Inserts `v`, returning whether it was absent.
    pub fn insert(&mut self, v: usize) -> bool {
        let (w, b) = (v / 64, v % 64);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        let absent = self.words[w] & (1u64 << b) == 0;
        self.words[w] |= 1u64 << b;
        absent
    }

    /// Removes `v`, returning whether it was present.
    pub fn remove(&mut self, v: usize) -> bool {
        let present = self.contains(v);
        if present {
            self.words[v / 64] &= !(1u64 << (v % 64));
            self.trim();
        }
        present
    }

    /// A copy with `v` added.
    pub fn with(&self, v: usize) -> Self {
        let mut s = self.clone();
        s.insert(v);
        s
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Elements in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i * 64 + b)
            })
        })
    }

    /// One past the largest element, or 0 for the empty set.
    pub fn bound(&self) -> usize {
        match self.words.last() {
            None => 0,
            Some(&w) => (self.words.len() - 1) * 64 + 64 - w.leading_zeros() as usize,
        }
    }

    pub fn union(&self, other: &Subset) -> Subset {
        let (long, short) = if self.words.len() >= other.words.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut words = long.words.clone();
        for (w, o) in words.iter_mut().zip(&short.words) {
            *w |= o;
        }
        Subset { words }
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        let mut s = Subset {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        };
        s.trim();
        s
    }

    pub fn difference(&self, other: &Subset) -> Subset {
        let mut s = Subset {
            words: self
                .words
                .iter()
                .enumerate()
                .map(|(i, a)| a & !other.words.get(i).copied().unwrap_or(0))
                .collect(),
        };
        s.trim();
        s
    }

    pub fn is_subset(&self, other: &Subset) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, a)| a & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}

impl FromIterator<usize> for Subset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = Subset::new();
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let items = Vec::<usize>::deserialize(deserializer)?;
        Ok(items.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn insert_remove_canonical() {
        let mut s = Subset::new();
        assert!(s.insert(130));
        assert!(!s.insert(130));
        assert_eq!(s.bound(), 131);
        assert!(s.remove(130));
        assert_eq!(s, Subset::new());
        assert!(s.is_empty());
        assert_eq!(s.to_mask(), Some(0));
    }

    #[test]
    fn display_and_mask() {
        let s = Subset::from_mask(0b1011);
        assert_eq!(s.to_string(), "{0,1,3}");
        assert_eq!(s.len(), 3);
        assert_eq!(Subset::full(3).to_mask(), Some(0b111));
    }

    proptest! {
        #[test]
        fn set_algebra_matches_masks(a in any::<u64>(), b in any::<u64>()) {
            let (sa, sb) = (Subset::from_mask(a), Subset::from_mask(b));
            prop_assert_eq!(sa.union(&sb).to_mask(), Some(a | b));
            prop_assert_eq!(sa.intersection(&sb).to_mask(), Some(a & b));
            prop_assert_eq!(sa.difference(&sb).to_mask(), Some(a & !b));
            prop_assert_eq!(sa.is_subset(&sb), a & !b == 0);
            prop_assert_eq!(sa.iter().collect::<Subset>(), sa.clone());
        }

        #[test]
        fn json_round_trip(items in proptest::collection::btree_set(0usize..300, 0..20)) {
            let s: Subset = items.iter().copied().collect();
            let text = serde_json::to_string(&s).unwrap();
            let back: Subset = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
