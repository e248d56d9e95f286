//! Exterior algebra over the odd generators.
//!
//! Monomials `ζ^I = ζ_{i1} ∧ … ∧ ζ_{iρ}` are stored with strictly increasing
//! factor order and encoded as bitsets, lowest bit = generator 1. A
//! [`GrassmannVector`] is a dense coefficient array over all `2^rank`
//! monomials; the holomorphic sector uses `rank = r`, the full sector of
//! holomorphic and anti-holomorphic generators uses `rank = 2r` with the
//! anti-holomorphic generators occupying bits `r..2r` (see
//! [`MultiIndex::pair`]).

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{minor_det, CMatrix};

pub const MAX_RANK: usize = 16;

/// Subset of `{1, …, r}` indexing an odd monomial.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(u16);

impl MultiIndex {
    pub const EMPTY: MultiIndex = MultiIndex(0);

    pub fn from_bits(bits: u16) -> Self {
        MultiIndex(bits)
    }

    /// Builds an index from 1-based generator numbers, in any order.
    pub fn from_indices(indices: &[usize], rank: usize) -> Result<Self> {
        check_rank(rank)?;
        let mut bits = 0u16;
        for &i in indices {
            if i == 0 || i > rank {
                return Err(Error::IndexOutOfRange { index: i, rank });
            }
            bits |= 1 << (i - 1);
        }
        Ok(MultiIndex(bits))
    }

    /// The pair `(I, J)` in the full sector of rank `2r`.
    pub fn pair(holomorphic: MultiIndex, anti: MultiIndex, r: usize) -> Result<Self> {
        if 2 * r > MAX_RANK {
            return Err(Error::RankTooLarge(2 * r));
        }
        if (holomorphic.0 as u32) >> r != 0 || (anti.0 as u32) >> r != 0 {
            return Err(Error::InvalidArgument(format!(
                "multi-index exceeds rank {r} in pair construction"
            )));
        }
        Ok(MultiIndex(holomorphic.0 | (anti.0 << r)))
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        (1..=MAX_RANK).contains(&i) && self.0 & (1 << (i - 1)) != 0
    }

    /// 1-based generator numbers in increasing order.
    pub fn indices(self) -> Vec<usize> {
        self.positions().map(|p| p + 1).collect()
    }

    /// 0-based bit positions in increasing order.
    pub fn positions(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..MAX_RANK).filter(move |p| bits & (1 << p) != 0)
    }

    /// Largest generator number used, 0 for the empty index.
    pub fn max_index(self) -> usize {
        MAX_RANK - self.0.leading_zeros() as usize
    }

    /// All `2^rank` indices in bitset order.
    pub fn all(rank: usize) -> impl Iterator<Item = MultiIndex> {
        let rank = rank.min(MAX_RANK);
        (0u32..(1u32 << rank)).map(|b| MultiIndex(b as u16))
    }

    /// All indices of cardinality `degree`.
    pub fn of_degree(rank: usize, degree: usize) -> impl Iterator<Item = MultiIndex> {
        Self::all(rank).filter(move |i| i.len() == degree)
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.indices().into_iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.indices().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MultiIndex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let indices = Vec::<usize>::deserialize(deserializer)?;
        MultiIndex::from_indices(&indices, MAX_RANK).map_err(serde::de::Error::custom)
    }
}

fn check_rank(rank: usize) -> Result<()> {
    if rank > MAX_RANK {
        Err(Error::RankTooLarge(rank))
    } else {
        Ok(())
    }
}

/// `ζ^I ∧ ζ^J = sign · ζ^K`, or `None` when the factors overlap.
pub fn wedge(i: MultiIndex, j: MultiIndex) -> Option<(i32, MultiIndex)> {
    if i.0 & j.0 != 0 {
        return None;
    }
    // Each generator of J must move left past every larger generator of I.
    let inversions: u32 = j
        .positions()
        .map(|p| (i.0 as u32 >> (p + 1)).count_ones())
        .sum();
    let sign = if inversions % 2 == 0 { 1 } else { -1 };
    Some((sign, MultiIndex(i.0 | j.0)))
}

/// Dense element of the exterior algebra on `rank` generators.
#[derive(Clone, PartialEq)]
pub struct GrassmannVector {
    rank: usize,
    coeffs: Vec<Complex64>,
}

impl GrassmannVector {
    pub fn zeros(rank: usize) -> Result<Self> {
        check_rank(rank)?;
        Ok(Self {
            rank,
            coeffs: vec![Complex64::new(0.0, 0.0); 1 << rank],
        })
    }

    pub fn basis(rank: usize, index: MultiIndex) -> Result<Self> {
        let mut v = Self::zeros(rank)?;
        v.set(index, Complex64::new(1.0, 0.0))?;
        Ok(v)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn slot(&self, index: MultiIndex) -> Result<usize> {
        if index.max_index() > self.rank {
            return Err(Error::IndexOutOfRange {
                index: index.max_index(),
                rank: self.rank,
            });
        }
        Ok(index.0 as usize)
    }

    pub fn get(&self, index: MultiIndex) -> Complex64 {
        self.coeffs
            .get(index.0 as usize)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn set(&mut self, index: MultiIndex, value: Complex64) -> Result<()> {
        let s = self.slot(index)?;
        self.coeffs[s] = value;
        Ok(())
    }

    pub fn add_to(&mut self, index: MultiIndex, value: Complex64) -> Result<()> {
        let s = self.slot(index)?;
        self.coeffs[s] += value;
        Ok(())
    }

    /// Nonzero terms in bitset order.
    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
            .map(|(b, c)| (MultiIndex(b as u16), *c))
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Hermitian product, linear in `self` and semi-linear in `other`.
    pub fn scalar_product(&self, other: &Self) -> Result<Complex64> {
        if self.rank != other.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                found: other.rank,
                context: "scalar product rank",
            });
        }
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b.conj())
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Exterior product of two vectors on the same generators.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.rank != other.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                found: other.rank,
                context: "wedge rank",
            });
        }
        let mut out = Self::zeros(self.rank)?;
        for (i, a) in self.terms() {
            for (j, b) in other.terms() {
                if let Some((sign, k)) = wedge(i, j) {
                    out.coeffs[k.0 as usize] += a * b * sign as f64;
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rank: self.rank,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Largest coefficient distance, for tolerance comparisons.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let len = self.coeffs.len().max(other.coeffs.len());
        (0..len)
            .map(|b| {
                let m = MultiIndex(b as u16);
                (self.get(m) - other.get(m)).norm()
            })
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for GrassmannVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms()).finish()
    }
}

impl Add for &GrassmannVector {
    type Output = GrassmannVector;

    fn add(self, rhs: Self) -> GrassmannVector {
        assert_eq!(self.rank, rhs.rank, "rank mismatch in addition");
        GrassmannVector {
            rank: self.rank,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &GrassmannVector {
    type Output = GrassmannVector;

    fn sub(self, rhs: Self) -> GrassmannVector {
        assert_eq!(self.rank, rhs.rank, "rank mismatch in subtraction");
        GrassmannVector {
            rank: self.rank,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul<Complex64> for &GrassmannVector {
    type Output = GrassmannVector;

    fn mul(self, rhs: Complex64) -> GrassmannVector {
        self.scale(rhs)
    }
}

/// `(Eϑ)^I = Σ_{|J|=|I|} det(E[I;J]) ϑ^J`.
pub fn exterior_action(e: &CMatrix, index: MultiIndex, r: usize) -> Result<GrassmannVector> {
    if e.nrows() != r || e.ncols() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            found: if e.nrows() != r { e.nrows() } else { e.ncols() },
            context: "odd block size",
        });
    }
    if index.max_index() > r {
        return Err(Error::IndexOutOfRange {
            index: index.max_index(),
            rank: r,
        });
    }
    let rows: Vec<usize> = index.positions().collect();
    let mut out = GrassmannVector::zeros(r)?;
    for j in MultiIndex::of_degree(r, index.len()) {
        let cols: Vec<usize> = j.positions().collect();
        out.coeffs[j.0 as usize] = minor_det(e, &rows, &cols);
    }
    Ok(out)
}

/// Extends `ϑ^I ↦ (Eϑ)^I` linearly to a whole vector.
pub fn apply_exterior(e: &CMatrix, v: &GrassmannVector) -> Result<GrassmannVector> {
    let mut out = GrassmannVector::zeros(v.rank)?;
    for (i, a) in v.terms() {
        let image = exterior_action(e, i, v.rank)?;
        for (j, b) in image.terms() {
            out.coeffs[j.0 as usize] += a * b;
        }
    }
    Ok(out)
}
