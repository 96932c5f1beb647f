//! Menus as bitmasks and the canonical coordinate order over contour pairs.
//!
//! Every table indexed by `(x, A)` with `x ∈ A` uses the same order: menus by
//! decreasing size, then ascending bitmask, then `x` ascending. This is the
//! order of the flow-diagram edges and of every choice vector.

use std::fmt;
use std::sync::Arc;

use crate::preference::ContourPair;
use crate::{Error, Result};

/// A subset of the universe, bit `x` set when alternative `x` is present.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Menu(u32);

impl Menu {
    pub const EMPTY: Menu = Menu(0);

    pub fn from_bits(bits: u32) -> Self {
        Menu(bits)
    }

    pub fn full(n: usize) -> Self {
        if n >= 32 {
            Menu(u32::MAX)
        } else {
            Menu((1u32 << n) - 1)
        }
    }

    pub fn singleton(x: usize) -> Self {
        Menu(1 << x)
    }

    pub fn from_indices(xs: impl IntoIterator<Item = usize>) -> Self {
        xs.into_iter().fold(Menu::EMPTY, Menu::with)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, x: usize) -> bool {
        x < 32 && self.0 >> x & 1 == 1
    }

    pub fn with(self, x: usize) -> Menu {
        Menu(self.0 | 1 << x)
    }

    pub fn without(self, x: usize) -> Menu {
        Menu(self.0 & !(1 << x))
    }

    pub fn union(self, other: Menu) -> Menu {
        Menu(self.0 | other.0)
    }

    pub fn is_subset_of(self, other: Menu) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn highest(self) -> Option<usize> {
        (self.0 != 0).then(|| 31 - self.0.leading_zeros() as usize)
    }

    /// Members in ascending index order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let x = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(x)
        })
    }

    /// Nonempty subsets of `self`, in descending bitmask order.
    pub fn nonempty_subsets(self) -> impl Iterator<Item = Menu> {
        let full = self.0;
        let mut sub = full;
        let mut done = full == 0;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = sub;
            sub = (sub.wrapping_sub(1)) & full;
            if sub == 0 {
                done = true;
            }
            Some(Menu(out))
        })
    }

    /// Strict supersets of `self` inside `universe`.
    pub fn strict_supersets(self, universe: Menu) -> impl Iterator<Item = Menu> {
        let base = self;
        Menu(universe.0 & !self.0)
            .nonempty_subsets()
            .map(move |extra| base.union(extra))
    }
}

impl fmt::Debug for Menu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// The coordinate order for one universe size.
#[derive(Debug, PartialEq, Eq)]
pub struct PairIndex {
    n: usize,
    pairs: Vec<ContourPair>,
    offsets: Vec<u32>,
}

impl PairIndex {
    /// Largest `n` for which a full index may be built.
    pub const MAX_N: usize = 24;

    pub fn new(n: usize) -> Result<Arc<Self>> {
        if n == 0 {
            return Err(Error::EmptyUniverse);
        }
        if n > Self::MAX_N {
            return Err(Error::CapExceeded {
                n,
                cap: Self::MAX_N,
                what: "the menu lattice",
            });
        }
        let mut menus: Vec<u32> = (1u32..1 << n).collect();
        menus.sort_by_key(|&m| (std::cmp::Reverse(m.count_ones()), m));
        let mut offsets = vec![0u32; 1 << n];
        let mut pairs = Vec::with_capacity(n << (n - 1));
        for bits in menus {
            offsets[bits as usize] = pairs.len() as u32;
            let menu = Menu(bits);
            pairs.extend(menu.iter().map(|x| ContourPair { x, menu }));
        }
        Ok(Arc::new(PairIndex { n, pairs, offsets }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[ContourPair] {
        &self.pairs
    }

    pub fn pair(&self, i: usize) -> ContourPair {
        self.pairs[i]
    }

    /// Position of `pair`; the pair must lie in this universe.
    pub fn position(&self, pair: ContourPair) -> usize {
        debug_assert!(pair.menu.contains(pair.x));
        let below = pair.menu.0 & ((1u32 << pair.x) - 1);
        self.offsets[pair.menu.0 as usize] as usize + below.count_ones() as usize
    }

    pub fn full_menu(&self) -> Menu {
        Menu::full(self.n)
    }

    /// Nonempty menus in ascending bitmask order.
    pub fn menus(&self) -> impl Iterator<Item = Menu> {
        (1u32..1 << self.n).map(Menu)
    }
}

/// Dense values over all contour pairs of one universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairTable<T> {
    index: Arc<PairIndex>,
    values: Vec<T>,
}

impl<T> PairTable<T> {
    pub fn from_fn(index: Arc<PairIndex>, mut f: impl FnMut(ContourPair) -> T) -> Self {
        let values = index.pairs.iter().map(|&p| f(p)).collect();
        PairTable { index, values }
    }

    pub fn from_values(index: Arc<PairIndex>, values: Vec<T>) -> Result<Self> {
        if values.len() != index.len() {
            return Err(Error::WrongLength {
                expected: index.len(),
                found: values.len(),
            });
        }
        Ok(PairTable { index, values })
    }

    pub fn index(&self) -> &Arc<PairIndex> {
        &self.index
    }

    pub fn n(&self) -> usize {
        self.index.n
    }

    pub fn get(&self, pair: ContourPair) -> &T {
        &self.values[self.index.position(pair)]
    }

    pub fn get_mut(&mut self, pair: ContourPair) -> &mut T {
        let i = self.index.position(pair);
        &mut self.values[i]
    }

    pub fn set(&mut self, pair: ContourPair, value: T) {
        *self.get_mut(pair) = value;
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (ContourPair, &T)> {
        self.index.pairs.iter().copied().zip(self.values.iter())
    }

    pub fn map<U>(&self, mut f: impl FnMut(ContourPair, &T) -> U) -> PairTable<U> {
        PairTable {
            index: self.index.clone(),
            values: self.iter().map(|(p, v)| f(p, v)).collect(),
        }
    }
}
