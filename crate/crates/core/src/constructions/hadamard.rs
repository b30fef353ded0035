//! Hadamard matrices from Sylvester doubling, the two Paley constructions
//! over prime fields, and Kronecker products of these.
//!
//! Matrices are kept symbolic: a [`HadamardMatrix`] stores its recipe and
//! evaluates `entry(i, j)` on demand, so orders up to 2^24 cost nothing until
//! a block is materialized.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

pub const MAX_SYLVESTER_K: u32 = 24;

/// How a Hadamard matrix is built.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Recipe {
    Sylvester { k: u32 },
    PaleyI { q: u64 },
    PaleyII { q: u64 },
    Kronecker { left: Box<Recipe>, right: Box<Recipe> },
}

impl Recipe {
    pub fn order(&self) -> u64 {
        match self {
            Recipe::Sylvester { k } => 1u64 << k,
            Recipe::PaleyI { q } => q + 1,
            Recipe::PaleyII { q } => 2 * (q + 1),
            Recipe::Kronecker { left, right } => left.order() * right.order(),
        }
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Recipe::Sylvester { k } => write!(f, "sylvester(2^{k})"),
            Recipe::PaleyI { q } => write!(f, "paley_i({q})"),
            Recipe::PaleyII { q } => write!(f, "paley_ii({q})"),
            Recipe::Kronecker { left, right } => write!(f, "({left} ⊗ {right})"),
        }
    }
}

/// A ±1 matrix `H` of order `m` with `H Hᵀ = m I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HadamardMatrix {
    recipe: Recipe,
    order: u64,
}

impl HadamardMatrix {
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn recipe(&self) -> &Recipe {
        &self.recipe
    }

    /// Entry `H[i][j]` as ±1.
    pub fn entry(&self, i: u64, j: u64) -> i8 {
        debug_assert!(i < self.order && j < self.order);
        recipe_entry(&self.recipe, i, j)
    }

    /// Top-left `n × n` block, row-major.
    pub fn block(&self, n: usize) -> Vec<i8> {
        assert!(n as u64 <= self.order, "block larger than matrix");
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n as u64 {
            for j in 0..n as u64 {
                out.push(self.entry(i, j));
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<i8> {
        self.block(usize::try_from(self.order).expect("order fits in usize"))
    }

    /// Exact integer check of `H Hᵀ = m I`.
    pub fn verify(&self) -> bool {
        let m = usize::try_from(self.order).expect("order fits in usize");
        let h = self.to_dense();
        if h.iter().any(|&v| v != 1 && v != -1) {
            return false;
        }
        for i in 0..m {
            let ri = &h[i * m..(i + 1) * m];
            for j in i..m {
                let rj = &h[j * m..(j + 1) * m];
                let dot: i64 = ri.iter().zip(rj).map(|(&a, &b)| (a as i64) * (b as i64)).sum();
                let expect = if i == j { m as i64 } else { 0 };
                if dot != expect {
                    return false;
                }
            }
        }
        true
    }

    pub fn from_recipe(recipe: Recipe) -> Result<Self> {
        match &recipe {
            Recipe::Sylvester { k } => {
                if *k > MAX_SYLVESTER_K {
                    return Err(Error::TooLarge {
                        what: "sylvester exponent",
                        n: *k as usize,
                        max: MAX_SYLVESTER_K as usize,
                    });
                }
            }
            Recipe::PaleyI { q } => check_paley(*q, 3)?,
            Recipe::PaleyII { q } => check_paley(*q, 1)?,
            Recipe::Kronecker { left, right } => {
                HadamardMatrix::from_recipe((**left).clone())?;
                HadamardMatrix::from_recipe((**right).clone())?;
            }
        }
        let order = recipe.order();
        Ok(HadamardMatrix { recipe, order })
    }
}

fn check_paley(q: u64, residue: u64) -> Result<()> {
    if !is_prime(q) {
        return Err(Error::NotPrime { q });
    }
    if q % 4 != residue {
        return Err(Error::BadResidue { q, expected: residue });
    }
    Ok(())
}

/// Sylvester matrix of order 2^k: `H[i][j] = (−1)^{popcount(i & j)}`.
pub fn sylvester(k: u32) -> Result<HadamardMatrix> {
    HadamardMatrix::from_recipe(Recipe::Sylvester { k })
}

/// Paley I, order q + 1, for a prime q ≡ 3 (mod 4).
pub fn paley_i(q: u64) -> Result<HadamardMatrix> {
    HadamardMatrix::from_recipe(Recipe::PaleyI { q })
}

/// Paley II, order 2(q + 1), for a prime q ≡ 1 (mod 4).
pub fn paley_ii(q: u64) -> Result<HadamardMatrix> {
    HadamardMatrix::from_recipe(Recipe::PaleyII { q })
}

pub fn kronecker(a: &HadamardMatrix, b: &HadamardMatrix) -> HadamardMatrix {
    let recipe = Recipe::Kronecker {
        left: Box::new(a.recipe.clone()),
        right: Box::new(b.recipe.clone()),
    };
    let order = recipe.order();
    HadamardMatrix { recipe, order }
}

fn recipe_entry(r: &Recipe, i: u64, j: u64) -> i8 {
    match r {
        Recipe::Sylvester { .. } => {
            if (i & j).count_ones().is_multiple_of(2) {
                1
            } else {
                -1
            }
        }
        Recipe::PaleyI { q } => {
            // H = I + [[0, 1ᵀ], [−1, Q]] with the Jacobsthal matrix Q_ab = χ(b − a).
            if i == j || i == 0 {
                1
            } else if j == 0 {
                -1
            } else {
                legendre((j + q - i) % q, *q)
            }
        }
        Recipe::PaleyII { q } => {
            // Symmetric conference matrix C = [[0, 1ᵀ], [1, Q]]; each zero of C
            // becomes [[1, −1], [−1, −1]] and each ±1 becomes ±[[1, 1], [1, −1]].
            let (bi, bj) = (i / 2, j / 2);
            let (si, sj) = (i % 2, j % 2);
            let c = if bi == bj {
                0
            } else if bi == 0 || bj == 0 {
                1
            } else {
                legendre((bj + q - bi) % q, *q)
            };
            if c == 0 {
                if si == 0 && sj == 0 {
                    1
                } else {
                    -1
                }
            } else {
                let inner = if si == 1 && sj == 1 { -1 } else { 1 };
                c * inner
            }
        }
        Recipe::Kronecker { left, right } => {
            let m = right.order();
            recipe_entry(left, i / m, j / m) * recipe_entry(right, i % m, j % m)
        }
    }
}

/// Legendre symbol (a | q) for an odd prime q, via Euler's criterion.
fn legendre(a: u64, q: u64) -> i8 {
    let a = a % q;
    if a == 0 {
        return 0;
    }
    match pow_mod(a, (q - 1) / 2, q) {
        1 => 1,
        _ => -1,
    }
}

fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut b = (base % m) as u128;
    let m128 = m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    if q < 4 {
        return true;
    }
    if q.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Largest `n` accepted by [`smallest_constructible_order`].
pub const MAX_ORDER_QUERY: u64 = 1 << 20;

/// Smallest order `m ≥ n` that the generators in this module can produce,
/// with a recipe for it. This can exceed the true smallest Hadamard order
/// (e.g. order 52 needs a prime-power Paley construction); the next power of
/// two always terminates the search.
pub fn smallest_constructible_order(n: u64) -> Result<(u64, Recipe)> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if n > MAX_ORDER_QUERY {
        return Err(Error::TooLarge {
            what: "order query",
            n: n as usize,
            max: MAX_ORDER_QUERY as usize,
        });
    }
    let mut memo = HashMap::new();
    let mut m = n;
    loop {
        if let Some(r) = constructible(m, &mut memo) {
            return Ok((m, r));
        }
        // Only 1, 2 and multiples of 4 can be Hadamard orders.
        m = if m < 4 { m + 1 } else { (m / 4 + 1) * 4 };
    }
}

/// A recipe of order exactly `m`, preferring Sylvester, then Paley I, then
/// Paley II, then Kronecker products with the smallest left factor.
pub fn recipe_for_order(m: u64) -> Option<Recipe> {
    constructible(m, &mut HashMap::new())
}

fn constructible(m: u64, memo: &mut HashMap<u64, Option<Recipe>>) -> Option<Recipe> {
    if let Some(r) = memo.get(&m) {
        return r.clone();
    }
    let r = constructible_uncached(m, memo);
    memo.insert(m, r.clone());
    r
}

fn constructible_uncached(m: u64, memo: &mut HashMap<u64, Option<Recipe>>) -> Option<Recipe> {
    if m == 0 {
        return None;
    }
    if m.is_power_of_two() {
        return Some(Recipe::Sylvester { k: m.trailing_zeros() });
    }
    if !m.is_multiple_of(4) {
        return None;
    }
    let q = m - 1;
    if q % 4 == 3 && is_prime(q) {
        return Some(Recipe::PaleyI { q });
    }
    if m.is_multiple_of(2) {
        let q = m / 2 - 1;
        if q % 4 == 1 && is_prime(q) {
            return Some(Recipe::PaleyII { q });
        }
    }
    let mut a = 2;
    while a * a <= m {
        if m.is_multiple_of(a) {
            let b = m / a;
            if let (Some(l), Some(r)) = (constructible(a, memo), constructible(b, memo)) {
                return Some(Recipe::Kronecker {
                    left: Box::new(l),
                    right: Box::new(r),
                });
            }
        }
        a += 1;
    }
    None
}
