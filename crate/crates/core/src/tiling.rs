//! Translate extraction from grid-resolved tilings and `d`-dimensional pair assembly.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ladder::{approximant, FactorSpec};
use crate::measures::{self, DiscreteMeasure};
use crate::rational::Rational;

/// A union of cells `[j/m, (j+1)/m)` for the `j` whose flag is set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GridMask {
    m: u64,
    cells: Vec<bool>,
}

impl GridMask {
    pub fn new(m: u64, cells: Vec<bool>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidMask("resolution must be positive".into()));
        }
        if !cells.contains(&true) {
            return Err(Error::InvalidMask("no cell is set".into()));
        }
        Ok(GridMask { m, cells })
    }

    /// Parses a string of `0`/`1` characters.
    pub fn from_bits(m: u64, bits: &str) -> Result<Self> {
        let cells = bits
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidMask(format!("unexpected character {c:?}"))),
            })
            .collect::<Result<_>>()?;
        GridMask::new(m, cells)
    }

    /// Mask of the given cell indices, which must be nonnegative.
    pub fn from_indices(m: u64, indices: &[usize]) -> Result<Self> {
        let len = indices.iter().max().map_or(0, |&x| x + 1);
        let mut cells = vec![false; len];
        for &i in indices {
            cells[i] = true;
        }
        GridMask::new(m, cells)
    }

    pub fn resolution(&self) -> u64 {
        self.m
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.cells.iter().enumerate().filter(|(_, &c)| c).map(|(i, _)| i).collect()
    }

    pub fn to_bits(&self) -> String {
        self.cells.iter().map(|&c| if c { '1' } else { '0' }).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct RawMask {
    m: u64,
    cells: String,
}

impl Serialize for GridMask {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawMask { m: self.m, cells: self.to_bits() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GridMask {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawMask::deserialize(deserializer)?;
        GridMask::from_bits(raw.m, &raw.cells).map_err(serde::de::Error::custom)
    }
}

/// `ν = (1/N) Σ δ_{a_k}` with offsets `a_k = shift_k / m`, sorted.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TranslateSystem {
    m: u64,
    shifts: Vec<i64>,
}

impl TranslateSystem {
    pub fn new(m: u64, shifts: Vec<i64>) -> Result<Self> {
        if m == 0 || m > i64::MAX as u64 {
            return Err(Error::InvalidMask(format!("resolution {m} out of range")));
        }
        if shifts.is_empty() || shifts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMask("offsets must be non-empty, sorted and distinct".into()));
        }
        Ok(TranslateSystem { m, shifts })
    }

    pub fn resolution(&self) -> u64 {
        self.m
    }

    /// Offsets in units of `1/m`.
    pub fn shifts(&self) -> &[i64] {
        &self.shifts
    }

    pub fn count(&self) -> usize {
        self.shifts.len()
    }

    pub fn offsets(&self) -> Vec<Rational> {
        self.shifts.iter().map(|&s| Rational::new(s, self.m as i64)).collect()
    }

    /// The measure `(1/N) Σ δ_{a_k}`.
    pub fn measure(&self) -> Result<DiscreteMeasure> {
        DiscreteMeasure::uniform_on(self.offsets())
    }
}

struct Offset(i64, u64);

impl fmt::Display for Offset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0, self.1)
    }
}

#[derive(Serialize, Deserialize)]
struct RawTranslates {
    offsets: Vec<String>,
    count: usize,
}

impl Serialize for TranslateSystem {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let offsets = self.shifts.iter().map(|&s| Offset(s, self.m).to_string()).collect();
        RawTranslates { offsets, count: self.count() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TranslateSystem {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawTranslates::deserialize(deserializer)?;
        let mut m = None;
        let mut shifts = Vec::with_capacity(raw.offsets.len());
        for s in &raw.offsets {
            let (num, den) = s.split_once('/').ok_or_else(|| D::Error::custom(format!("offset {s:?} needs a denominator")))?;
            let num = i64::from_str(num.trim()).map_err(D::Error::custom)?;
            let den = u64::from_str(den.trim()).map_err(D::Error::custom)?;
            if *m.get_or_insert(den) != den {
                return Err(D::Error::custom("offsets must share one denominator"));
            }
            shifts.push(num);
        }
        if shifts.len() != raw.count {
            return Err(D::Error::custom(format!("count {} differs from {} offsets", raw.count, shifts.len())));
        }
        TranslateSystem::new(m.unwrap_or(1), shifts).map_err(D::Error::custom)
    }
}

/// Finds the translates with `Q = ⊔ (Ω + a_k)`.
///
/// The leftmost uncovered cell of `Q` can only be covered by a copy of `Ω`
/// whose leftmost cell lands on it, so the peeling is forced.
pub fn extract_translates(omega: &GridMask, q: &GridMask) -> Result<TranslateSystem> {
    if omega.m != q.m {
        return Err(Error::ResolutionMismatch(omega.m, q.m));
    }
    let shape = omega.indices();
    let (nw, nq) = (shape.len(), q.count());
    if nq % nw != 0 {
        return Err(Error::NoTiling(format!("{nw} cells of Ω do not divide {nq} cells of Q")));
    }
    let first = shape[0];
    let mut left = q.cells.clone();
    let mut shifts = Vec::with_capacity(nq / nw);
    let mut cursor = 0;
    while let Some(c) = left[cursor..].iter().position(|&x| x).map(|p| p + cursor) {
        let shift = c as i64 - first as i64;
        for &j in &shape {
            let cell = j - first + c;
            if !left.get(cell).copied().unwrap_or(false) {
                return Err(Error::NoTiling(format!("the copy of Ω at {} does not fit", Offset(shift, q.m))));
            }
            left[cell] = false;
        }
        shifts.push(shift);
        cursor = c;
    }
    TranslateSystem::new(q.m, shifts)
}

/// `⊔ (Ω + a_k)` as a mask, or an error if two copies overlap or a copy
/// leaves the nonnegative cells.
pub fn assemble(omega: &GridMask, t: &TranslateSystem) -> Result<GridMask> {
    if omega.m != t.m {
        return Err(Error::ResolutionMismatch(omega.m, t.m));
    }
    let mut cells: Vec<bool> = Vec::new();
    for &s in &t.shifts {
        for j in omega.indices() {
            let cell = usize::try_from(j as i64 + s)
                .map_err(|_| Error::NoTiling(format!("copy at {} leaves [0, ∞)", Offset(s, t.m))))?;
            if cell >= cells.len() {
                cells.resize(cell + 1, false);
            }
            if cells[cell] {
                return Err(Error::NoTiling(format!("copies overlap in cell {cell}")));
            }
            cells[cell] = true;
        }
    }
    GridMask::new(t.m, cells)
}

/// Level-`k` approximants of `μ = σ₁ ⊗ ⋯ ⊗ σ_d` and `ν = τ₁ ⊗ ⋯ ⊗ τ_d`.
pub fn product_pair(sigmas: &[FactorSpec], taus: &[FactorSpec], k: usize) -> Result<(DiscreteMeasure, DiscreteMeasure)> {
    if sigmas.len() != taus.len() {
        return Err(Error::DimensionMismatch { left: sigmas.len(), right: taus.len() });
    }
    if sigmas.is_empty() {
        return Err(Error::EmptyFactorList);
    }
    let mut left = Vec::with_capacity(sigmas.len());
    let mut right = Vec::with_capacity(taus.len());
    for (i, (s, t)) in sigmas.iter().zip(taus).enumerate() {
        if !s.is_complement_of(t) {
            return Err(Error::NotComplementary(format!("axis {i}: specs do not come from one ladder")));
        }
        left.push(approximant(s, k)?);
        right.push(approximant(t, k)?);
    }
    let mu = measures::product(&left)?;
    let nu = measures::product(&right)?;
    for (axis, (l, r)) in left.iter().zip(&right).enumerate() {
        if measures::marginal(&mu, axis)? != *l || measures::marginal(&nu, axis)? != *r {
            return Err(Error::InvalidMeasure(format!("marginal {axis} differs from its factor")));
        }
    }
    Ok((mu, nu))
}

/// Whether the marginals of `μ` and `ν` along every axis convolve to the
/// uniform measure on that axis' grid.
pub fn verify_marginal_factorization(mu: &DiscreteMeasure, nu: &DiscreteMeasure, grids: &[u64]) -> bool {
    if mu.dim() != nu.dim() || mu.dim() != grids.len() {
        return false;
    }
    grids.iter().enumerate().all(|(axis, &n)| {
        let (Ok(a), Ok(b)) = (measures::marginal(mu, axis), measures::marginal(nu, axis)) else {
            return false;
        };
        measures::convolve(&a, &b).is_ok_and(|c| measures::is_uniform_on_grid(&c, n))
    })
}
