use std::fmt;

use crate::error::{Error, Result};

/// A vertex of the hypercube `{0,1}^n`. Bit `i` of the packed words is
/// coordinate `x_i`; bits at positions `>= n` are always zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitState {
    n: usize,
    words: Vec<u64>,
}

fn word_count(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

impl BitState {
    pub fn zeros(n: usize) -> Self {
        BitState {
            n,
            words: vec![0; word_count(n)],
        }
    }

    pub fn ones(n: usize) -> Self {
        let mut s = Self::zeros(n);
        for i in 0..n {
            s.set(i, true);
        }
        s
    }

    /// Builds a state from its packed index; requires `n <= 64` and `index < 2^n`.
    pub fn from_index(n: usize, index: u64) -> Result<Self> {
        if n > 64 || (n < 64 && index >> n != 0) {
            return Err(Error::InvalidArgument(format!(
                "index {index} is not a state of {{0,1}}^{n}"
            )));
        }
        let mut s = Self::zeros(n);
        s.words[0] = index;
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Packed index, available when the state fits a single word.
    pub fn index(&self) -> Option<u64> {
        (self.n <= 64).then(|| self.words[0])
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.n);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.n, "coordinate {i} out of range for n = {}", self.n);
        let mask = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.n, "coordinate {i} out of range for n = {}", self.n);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    /// Hamming weight `|x| = sum x_i`.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn leq(&self, other: &BitState) -> Result<bool> {
        leq(self, other)
    }

    pub fn up_neighbors(&self) -> Vec<BitState> {
        up_neighbors(self)
    }

    /// Little-endian 0/1 string: character `i` is coordinate `i`.
    pub fn to_bit_string(&self) -> String {
        (0..self.n)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut state = Self::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => state.set(i, true),
                _ => return Err(Error::InvalidState(s.to_string())),
            }
        }
        Ok(state)
    }
}

impl fmt::Display for BitState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

impl fmt::Debug for BitState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitState({})", self.to_bit_string())
    }
}

/// Coordinatewise order: `x <= y` iff `x AND NOT y == 0`.
pub fn leq(x: &BitState, y: &BitState) -> Result<bool> {
    if x.n != y.n {
        return Err(Error::DimensionMismatch {
            left: x.n,
            right: y.n,
        });
    }
    Ok(x.words.iter().zip(&y.words).all(|(a, b)| a & !b == 0))
}

/// States obtained by raising exactly one zero coordinate of `x`.
pub fn up_neighbors(x: &BitState) -> Vec<BitState> {
    (0..x.n)
        .filter(|&i| !x.get(i))
        .map(|i| {
            let mut y = x.clone();
            y.set(i, true);
            y
        })
        .collect()
}

/// Up-neighbors of a packed index, for the word-level exact analysis paths.
pub(crate) fn up_neighbor_indices(x: usize, n: usize) -> impl Iterator<Item = usize> {
    (0..n)
        .filter(move |&i| x >> i & 1 == 0)
        .map(move |i| x | 1 << i)
}

pub(crate) fn index_to_bit_string(x: usize, n: usize) -> String {
    (0..n)
        .map(|i| if x >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(bits: &str) -> BitState {
        BitState::parse(bits).unwrap()
    }

    #[test]
    fn leq_examples() {
        assert!(leq(&s("000"), &s("000")).unwrap());
        assert!(leq(&s("010"), &s("110")).unwrap());
        assert!(!leq(&s("011"), &s("101")).unwrap());
        assert!(matches!(
            leq(&s("01"), &s("011")),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn up_neighbor_examples() {
        let names = |x: &str| {
            let mut v: Vec<String> = up_neighbors(&s(x))
                .iter()
                .map(|y| y.to_bit_string())
                .collect();
            v.sort();
            v
        };
        assert_eq!(names("00"), vec!["01", "10"]);
        assert!(names("11").is_empty());
        assert_eq!(names("100"), vec!["101", "110"]);
    }

    #[test]
    fn wide_states() {
        let mut x = BitState::zeros(130);
        x.set(129, true);
        x.flip(64);
        assert_eq!(x.weight(), 2);
        assert!(x.get(64) && x.get(129) && !x.get(63));
        assert_eq!(x.index(), None);
        assert_eq!(BitState::parse(&x.to_bit_string()).unwrap(), x);
        assert_eq!(BitState::ones(70).weight(), 70);
    }

    #[test]
    fn from_index_rejects_overflow() {
        assert!(BitState::from_index(2, 4).is_err());
        assert_eq!(BitState::from_index(3, 5).unwrap().to_bit_string(), "101");
    }

    proptest! {
        #[test]
        fn leq_is_partial_order(n in 1usize..12, a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
            let m = (1u64 << n) - 1;
            let (x, y, z) = (
                BitState::from_index(n, a & m).unwrap(),
                BitState::from_index(n, b & m).unwrap(),
                BitState::from_index(n, c & m).unwrap(),
            );
            prop_assert!(leq(&x, &x).unwrap());
            if leq(&x, &y).unwrap() && leq(&y, &x).unwrap() {
                prop_assert_eq!(&x, &y);
            }
            // force a comparable chain x & y & z <= y & z <= z
            let lo = BitState::from_index(n, a & b & c & m).unwrap();
            let mid = BitState::from_index(n, b & c & m).unwrap();
            prop_assert!(leq(&lo, &mid).unwrap() && leq(&mid, &z).unwrap() && leq(&lo, &z).unwrap());
        }

        #[test]
        fn up_neighbor_count(n in 1usize..20, a in any::<u64>()) {
            let x = BitState::from_index(n, a & ((1u64 << n) - 1)).unwrap();
            let ups = up_neighbors(&x);
            prop_assert_eq!(ups.len(), n - x.weight());
            for y in ups {
                prop_assert!(leq(&x, &y).unwrap());
                prop_assert_eq!(y.weight(), x.weight() + 1);
            }
        }
    }
}
