//! Finite atomic probability measures with exact rational positions and weights.

use serde::{Deserialize, Serialize};
use num_integer::Integer;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A position in `R^d`.
pub type Point = SmallVec<[Rational; 2]>;

/// A finite atomic probability measure on `R^d`.
///
/// Atoms are kept sorted lexicographically by position, every weight is
/// strictly positive and the weights sum to exactly one.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DiscreteMeasure {
    dim: usize,
    atoms: Vec<(Point, Rational)>,
}

/// Normalized Lebesgue measure on `[0, length]^dim`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct UniformSegment {
    length: Rational,
    dim: usize,
}

impl UniformSegment {
    pub fn new(length: Rational, dim: usize) -> Result<Self> {
        if !length.is_positive() {
            return Err(Error::InvalidMeasure(format!("segment length {length} is not positive")));
        }
        if dim == 0 {
            return Err(Error::InvalidMeasure("segment dimension must be at least 1".into()));
        }
        Ok(UniformSegment { length, dim })
    }

    pub fn length(&self) -> &Rational {
        &self.length
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

fn point1(x: Rational) -> Point {
    let mut p = Point::new();
    p.push(x);
    p
}

impl DiscreteMeasure {
    /// Builds a measure from `(position, weight)` pairs, validating every invariant.
    pub fn new(dim: usize, atoms: impl IntoIterator<Item = (Point, Rational)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMeasure("dimension must be at least 1".into()));
        }
        let mut atoms: Vec<(Point, Rational)> = atoms.into_iter().collect();
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        for (p, w) in &atoms {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: p.len() });
            }
            if !w.is_positive() {
                return Err(Error::InvalidMeasure(format!("non-positive weight {w} at {p:?}")));
            }
        }
        atoms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = atoms.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidMeasure(format!("repeated position {:?}", w[0].0)));
        }
        let mass: Rational = atoms.iter().map(|(_, w)| w).sum();
        if mass != Rational::one() {
            return Err(Error::InvalidMeasure(format!("total mass {mass} is not 1")));
        }
        Ok(DiscreteMeasure { dim, atoms })
    }

    /// One-dimensional constructor.
    pub fn from_atoms_1d(atoms: impl IntoIterator<Item = (Rational, Rational)>) -> Result<Self> {
        Self::new(1, atoms.into_iter().map(|(x, w)| (point1(x), w)))
    }

    /// Equal weights on the given 1-d positions.
    pub fn uniform_on(positions: impl IntoIterator<Item = Rational>) -> Result<Self> {
        let xs: Vec<Rational> = positions.into_iter().collect();
        if xs.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        let w = Rational::new(1, xs.len() as i64);
        Self::from_atoms_1d(xs.into_iter().map(|x| (x, w.clone())))
    }

    /// The point mass at the origin of `R^dim`.
    pub fn dirac(dim: usize) -> Self {
        let origin: Point = (0..dim.max(1)).map(|_| Rational::zero()).collect();
        DiscreteMeasure { dim: dim.max(1), atoms: vec![(origin, Rational::one())] }
    }

    /// `(1/n) Σ_{j<n} δ_{j/n}`.
    pub fn uniform_grid(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMeasure("grid size must be positive".into()));
        }
        let n = i64::try_from(n).map_err(|_| Error::Overflow(format!("grid size {n}")))?;
        let w = Rational::new(1, n);
        let atoms = (0..n).map(|j| (point1(Rational::new(j, n)), w.clone())).collect();
        Ok(DiscreteMeasure { dim: 1, atoms })
    }

    // Caller guarantees sorted, distinct, positive, unit mass.
    pub(crate) fn from_sorted_unchecked(dim: usize, atoms: Vec<(Point, Rational)>) -> Self {
        debug_assert!(atoms.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(atoms.iter().map(|(_, w)| w).sum::<Rational>() == Rational::one());
        DiscreteMeasure { dim, atoms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[(Point, Rational)] {
        &self.atoms
    }

    /// Iterates `(x, w)` of a one-dimensional measure.
    pub fn atoms_1d(&self) -> impl Iterator<Item = (&Rational, &Rational)> + '_ {
        self.atoms.iter().map(|(p, w)| (&p[0], w))
    }

    pub fn weight_at(&self, pos: &[Rational]) -> Option<&Rational> {
        self.atoms
            .binary_search_by(|(p, _)| p.as_slice().cmp(pos))
            .ok()
            .map(|i| &self.atoms[i].1)
    }

    pub fn total_mass(&self) -> Rational {
        self.atoms.iter().map(|(_, w)| w).sum()
    }

    pub fn is_point_mass_at_origin(&self) -> bool {
        self.atoms.len() == 1 && self.atoms[0].0.iter().all(Rational::is_zero)
    }
}

fn merge_sorted(mut raw: Vec<(Point, Rational)>) -> Vec<(Point, Rational)> {
    raw.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<(Point, Rational)> = Vec::with_capacity(raw.len());
    for (p, w) in raw {
        match out.last_mut() {
            Some((q, acc)) if *q == p => *acc = &*acc + &w,
            _ => out.push((p, w)),
        }
    }
    out
}

/// Integer numerators of 1-d positions over their common denominator, when it
/// is small enough for sums to stay in range.
fn grid_keys(m: &DiscreteMeasure, den: i64) -> Option<Vec<i64>> {
    m.atoms_1d()
        .map(|(x, _)| {
            let (n, d) = x.as_i64_pair()?;
            n.checked_mul(den / d)
        })
        .collect()
}

fn common_denominator(ms: [&DiscreteMeasure; 2]) -> Option<i64> {
    const LIMIT: i64 = 1 << 40;
    let mut den: i64 = 1;
    for m in ms {
        for (x, _) in m.atoms_1d() {
            let (_, d) = x.as_i64_pair()?;
            den = den.lcm(&d);
            if den > LIMIT {
                return None;
            }
        }
    }
    Some(den)
}

// Same result as the generic path; positions are added as integers over a
// common denominator so only the weights need rational arithmetic.
fn convolve_on_common_grid(a: &DiscreteMeasure, b: &DiscreteMeasure) -> Option<Vec<(Point, Rational)>> {
    let den = common_denominator([a, b])?;
    let (ka, kb) = (grid_keys(a, den)?, grid_keys(b, den)?);
    if ka.iter().chain(&kb).any(|k| k.unsigned_abs() > 1 << 61) {
        return None;
    }
    let mut raw: Vec<(i64, Rational)> = Vec::with_capacity(a.len() * b.len());
    for (x, (_, wx)) in ka.iter().zip(&a.atoms) {
        for (y, (_, wy)) in kb.iter().zip(&b.atoms) {
            raw.push((x + y, wx * wy));
        }
    }
    raw.sort_unstable_by_key(|&(k, _)| k);
    let mut out: Vec<(Point, Rational)> = Vec::with_capacity(raw.len());
    let mut last = None;
    for (k, w) in raw {
        if last == Some(k) {
            let acc = &mut out.last_mut().expect("previous atom").1;
            *acc = &*acc + &w;
        } else {
            out.push((point1(Rational::new(k, den)), w));
            last = Some(k);
        }
    }
    Some(out)
}

/// `a ∗ b`: atoms on the sumset, weights collected over every representation.
pub fn convolve(a: &DiscreteMeasure, b: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { left: a.dim, right: b.dim });
    }
    if a.dim == 1 {
        if let Some(atoms) = convolve_on_common_grid(a, b) {
            return Ok(DiscreteMeasure::from_sorted_unchecked(1, atoms));
        }
    }
    let mut raw = Vec::with_capacity(a.len() * b.len());
    for (x, wx) in &a.atoms {
        for (y, wy) in &b.atoms {
            let s: Point = x.iter().zip(y.iter()).map(|(u, v)| u + v).collect();
            raw.push((s, wx * wy));
        }
    }
    Ok(DiscreteMeasure::from_sorted_unchecked(a.dim, merge_sorted(raw)))
}

/// Convolution of a sequence of measures; the empty sequence gives `δ_0`.
pub fn convolve_all<'a>(dim: usize, measures: impl IntoIterator<Item = &'a DiscreteMeasure>) -> Result<DiscreteMeasure> {
    let mut acc = DiscreteMeasure::dirac(dim);
    for m in measures {
        acc = convolve(&acc, m)?;
    }
    Ok(acc)
}

/// Cartesian product `μ₁ ⊗ … ⊗ μ_d` of one-dimensional measures.
pub fn product(factors: &[DiscreteMeasure]) -> Result<DiscreteMeasure> {
    if factors.is_empty() {
        return Err(Error::EmptyFactorList);
    }
    if let Some(f) = factors.iter().find(|f| f.dim != 1) {
        return Err(Error::DimensionMismatch { left: 1, right: f.dim });
    }
    let mut atoms: Vec<(Point, Rational)> = vec![(Point::new(), Rational::one())];
    for f in factors {
        let mut next = Vec::with_capacity(atoms.len() * f.len());
        for (p, w) in &atoms {
            for (x, v) in f.atoms_1d() {
                let mut q = p.clone();
                q.push(x.clone());
                next.push((q, w * v));
            }
        }
        atoms = next;
    }
    // lexicographic order is preserved by the nested loops
    Ok(DiscreteMeasure::from_sorted_unchecked(factors.len(), atoms))
}

/// Pushforward under the projection onto coordinate `axis`.
pub fn marginal(m: &DiscreteMeasure, axis: usize) -> Result<DiscreteMeasure> {
    if axis >= m.dim {
        return Err(Error::AxisOutOfRange { axis, dim: m.dim });
    }
    let raw = m.atoms.iter().map(|(p, w)| (point1(p[axis].clone()), w.clone())).collect();
    Ok(DiscreteMeasure::from_sorted_unchecked(1, merge_sorted(raw)))
}

/// True iff `m` is exactly `(1/n) Σ_{j<n} δ_{j/n}`.
pub fn is_uniform_on_grid(m: &DiscreteMeasure, n: u64) -> bool {
    if m.dim != 1 || n == 0 || m.len() as u64 != n {
        return false;
    }
    let Ok(n) = i64::try_from(n) else { return false };
    let w = Rational::new(1, n);
    // x = j/n  ⟺  num·n = j·den, without reducing j/n
    m.atoms_1d().enumerate().all(|(j, (x, v))| {
        *v == w
            && match x.as_i64_pair() {
                Some((num, den)) => num as i128 * n as i128 == j as i128 * den as i128,
                None => false,
            }
    })
}

/// Same check for the `n₁ × … × n_d` grid on `[0,1)^d`.
pub fn is_uniform_on_product_grid(m: &DiscreteMeasure, grid: &[u64]) -> bool {
    if m.dim != grid.len() || grid.contains(&0) {
        return false;
    }
    let total: Option<u64> = grid.iter().try_fold(1u64, |acc, &g| acc.checked_mul(g));
    let Some(total) = total else { return false };
    if m.len() as u64 != total {
        return false;
    }
    let Ok(t) = i64::try_from(total) else { return false };
    let w = Rational::new(1, t);
    let mut idx = vec![0i64; grid.len()];
    for (p, v) in &m.atoms {
        if *v != w {
            return false;
        }
        for (axis, x) in p.iter().enumerate() {
            if *x != Rational::new(idx[axis], grid[axis] as i64) {
                return false;
            }
        }
        // advance odometer, last axis fastest
        for axis in (0..grid.len()).rev() {
            idx[axis] += 1;
            if idx[axis] < grid[axis] as i64 {
                break;
            }
            idx[axis] = 0;
        }
    }
    true
}

#[derive(Serialize, Deserialize)]
struct RawAtom {
    pos: Vec<Rational>,
    w: Rational,
}

#[derive(Serialize, Deserialize)]
struct RawMeasure {
    dim: usize,
    atoms: Vec<RawAtom>,
}

impl Serialize for DiscreteMeasure {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let raw = RawMeasure {
            dim: self.dim,
            atoms: self
                .atoms
                .iter()
                .map(|(p, w)| RawAtom { pos: p.to_vec(), w: w.clone() })
                .collect(),
        };
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DiscreteMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawMeasure::deserialize(deserializer)?;
        DiscreteMeasure::new(raw.dim, raw.atoms.into_iter().map(|a| (Point::from_vec(a.pos), a.w)))
            .map_err(serde::de::Error::custom)
    }
}
