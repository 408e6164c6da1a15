//! Integer spectra of ladder factors: digit sets, their direct sums, exact and
//! numeric orthogonality checks, the `Q` function and tiling of `Z^d`.

use std::collections::{BTreeSet, HashSet};
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{self, divisibility_depth, Truncated};
use crate::ladder::{Decomposition, FactorSpec, Ladder, Side};
use crate::measures::DiscreteMeasure;
use crate::rational::Rational;

/// Number of lattice translates summed explicitly on each side of a periodic spectrum.
pub const LATTICE_TERMS: i64 = 1000;

/// Largest window `(2W+1)^d` that [`tiling_check`] will enumerate.
pub const MAX_WINDOW_POINTS: u64 = 50_000_000;

/// A finite set of integer points, optionally repeated along the lattice `M·Z^d`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Spectrum {
    dim: usize,
    base: Vec<Vec<i64>>,
    period: Option<u64>,
}

fn residue(p: &[i64], m: u64) -> Vec<i64> {
    p.iter().map(|&x| x.rem_euclid(m as i64)).collect()
}

impl Spectrum {
    /// Validates and sorts `base`.
    pub fn new(dim: usize, base: Vec<Vec<i64>>, period: Option<u64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpectrum("dimension must be at least 1".into()));
        }
        if let Some(p) = base.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch { left: dim, right: p.len() });
        }
        let mut base = base;
        base.sort();
        if let Some(w) = base.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidSpectrum(format!("repeated point {:?}", w[0])));
        }
        if let Some(m) = period {
            if m == 0 || m > i64::MAX as u64 {
                return Err(Error::InvalidSpectrum(format!("period {m} out of range")));
            }
            let mut seen = HashSet::new();
            for p in &base {
                if !seen.insert(residue(p, m)) {
                    return Err(Error::InvalidSpectrum(format!("{p:?} repeats a residue mod {m}")));
                }
            }
        }
        Ok(Spectrum { dim, base, period })
    }

    pub fn finite(values: impl IntoIterator<Item = i64>) -> Result<Self> {
        Spectrum::new(1, values.into_iter().map(|v| vec![v]).collect(), None)
    }

    /// `values ⊕ period·Z`.
    pub fn periodic(values: impl IntoIterator<Item = i64>, period: u64) -> Result<Self> {
        Spectrum::new(1, values.into_iter().map(|v| vec![v]).collect(), Some(period))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn base(&self) -> &[Vec<i64>] {
        &self.base
    }

    pub fn period(&self) -> Option<u64> {
        self.period
    }

    pub fn is_finite(&self) -> bool {
        self.period.is_none()
    }

    /// Number of base points.
    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    /// Base values of a one-dimensional spectrum, sorted.
    pub fn values(&self) -> Result<Vec<i64>> {
        if self.dim != 1 {
            return Err(Error::DimensionMismatch { left: 1, right: self.dim });
        }
        Ok(self.base.iter().map(|p| p[0]).collect())
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        if p.len() != self.dim {
            return false;
        }
        match self.period {
            None => self.base.binary_search_by(|b| b.as_slice().cmp(p)).is_ok(),
            Some(m) => {
                let r = residue(p, m);
                self.base.iter().any(|b| residue(b, m) == r)
            }
        }
    }

    /// `{−λ}` with the same period.
    pub fn negated(&self) -> Spectrum {
        let base = self.base.iter().map(|p| p.iter().map(|x| -x).collect()).collect();
        Spectrum::new(self.dim, base, self.period).expect("negation keeps points and residues distinct")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawBase {
    Flat(Vec<i64>),
    Nested(Vec<Vec<i64>>),
}

#[derive(Serialize, Deserialize)]
struct RawSpectrum {
    base: RawBase,
    period: Option<u64>,
    dim: usize,
}

impl Serialize for Spectrum {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let base = if self.dim == 1 {
            RawBase::Flat(self.base.iter().map(|p| p[0]).collect())
        } else {
            RawBase::Nested(self.base.clone())
        };
        RawSpectrum { base, period: self.period, dim: self.dim }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Spectrum {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSpectrum::deserialize(deserializer)?;
        let base = match raw.base {
            RawBase::Flat(v) if raw.dim == 1 => v.into_iter().map(|x| vec![x]).collect(),
            RawBase::Flat(v) if v.is_empty() => Vec::new(),
            RawBase::Flat(_) => return Err(serde::de::Error::custom("flat base needs dim 1")),
            RawBase::Nested(v) => v,
        };
        Spectrum::new(raw.dim, base, raw.period).map_err(serde::de::Error::custom)
    }
}

/// `A_n = N₁⋯N_{n−1}·{0, …, N_n − 1}`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DigitSet {
    pub n: usize,
    pub values: Vec<i64>,
}

fn prefix_i64(l: &Ladder, j: usize) -> Result<i64> {
    l.prefix_product(j)
        .and_then(|p| i64::try_from(p).ok())
        .ok_or_else(|| Error::Overflow(format!("N₁⋯N_{j} for ladder of length {}", l.len())))
}

pub fn digit_set(l: &Ladder, n: usize) -> Result<DigitSet> {
    let entry = l.entry(n)? as i64;
    let step = prefix_i64(l, n - 1)?;
    let values = (0..entry)
        .map(|j| j.checked_mul(step).ok_or_else(|| Error::Overflow(format!("{j}·{step}"))))
        .collect::<Result<_>>()?;
    Ok(DigitSet { n, values })
}

/// Sumset `a + b`, failing on the first repeated sum.
pub fn direct_sum(a: &[i64], b: &[i64]) -> Result<Vec<i64>> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x.checked_add(y).ok_or_else(|| Error::Overflow(format!("{x}+{y}")))?);
        }
    }
    out.sort_unstable();
    if let Some(w) = out.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::SpectrumCollision(w[0]));
    }
    Ok(out)
}

/// `Λ_k`: the direct sum of the first `k` digit sets on the spec's side.
pub fn lambda_k(spec: &FactorSpec, k: usize) -> Result<Spectrum> {
    let mut acc = vec![0i64];
    for idx in spec.side_indices(k)? {
        acc = direct_sum(&acc, &digit_set(spec.ladder(), idx)?.values)?;
    }
    Spectrum::finite(acc)
}

/// `Λ_k ⊕ N₁⋯N_{2k}·Z` for the factor carrying the Lebesgue tail.
pub fn type1_spectrum_tail_side(spec: &FactorSpec) -> Result<Spectrum> {
    if spec.decomposition() != Decomposition::TypeI || !spec.has_tail() {
        return Err(Error::NotTypeITail);
    }
    let base = lambda_k(spec, spec.level())?;
    let period = prefix_i64(spec.ladder(), spec.ladder().len())? as u64;
    Spectrum::periodic(base.values()?, period)
}

/// The spectrum a spec is built for: periodic on a Type I tail side, otherwise
/// `Λ_level`.
pub fn factor_spectrum(spec: &FactorSpec) -> Result<Spectrum> {
    if spec.has_tail() {
        type1_spectrum_tail_side(spec)
    } else {
        lambda_k(spec, spec.level())
    }
}

/// Distinct positive differences of a sorted set, ascending.
pub fn positive_differences(values: &[i64]) -> Vec<u64> {
    let (Some(&lo), Some(&hi)) = (values.first(), values.last()) else {
        return Vec::new();
    };
    let span = hi.abs_diff(lo);
    if span <= 1 << 27 {
        let mut bits = vec![0u64; span as usize / 64 + 1];
        for (i, &a) in values.iter().enumerate() {
            for &b in &values[i + 1..] {
                let d = (b - a) as usize;
                bits[d / 64] |= 1 << (d % 64);
            }
        }
        let mut out = Vec::new();
        for (w, &word) in bits.iter().enumerate() {
            let mut word = word;
            while word != 0 {
                let t = word.trailing_zeros() as usize;
                out.push((w * 64 + t) as u64);
                word &= word - 1;
            }
        }
        out
    } else {
        let mut set = BTreeSet::new();
        for (i, &a) in values.iter().enumerate() {
            for &b in &values[i + 1..] {
                set.insert(b.abs_diff(a));
            }
        }
        set.into_iter().collect()
    }
}

/// Whether the integer `d ≠ 0` is a zero of one of the first `k` side factors.
fn side_zero(l: &Ladder, side: Side, k: usize, d: i64) -> bool {
    if k == 0 || d == 0 {
        return false;
    }
    let idx = divisibility_depth(l, d) + 1;
    let parity = if idx % 2 == 1 { Side::Odd } else { Side::Even };
    idx <= l.len() && parity == side && idx <= side.ladder_index(k)
}

/// Exact certificate that `s` is a spectrum of the level-`k` approximant:
/// every non-zero difference is a zero of some side factor, and `|s|` equals
/// the number of atoms.
pub fn gram_check_structural(spec: &FactorSpec, k: usize, s: &Spectrum) -> Result<bool> {
    if !s.is_finite() {
        return Err(Error::InvalidSpectrum("structural check needs a finite spectrum".into()));
    }
    let values = s.values()?;
    let mut atoms: u128 = 1;
    for idx in spec.side_indices(k)? {
        atoms = atoms.saturating_mul(spec.ladder().entry(idx)? as u128);
    }
    if values.len() as u128 != atoms {
        return Ok(false);
    }
    let (l, side) = (spec.ladder(), spec.side());
    Ok(positive_differences(&values)
        .into_iter()
        .all(|d| i64::try_from(d).is_ok_and(|d| side_zero(l, side, k, d))))
}

/// A coordinate `x` prepared for evaluating `frac(d·x)` exactly.
enum Coord {
    Small(i128, i128),
    Big(num_rational::BigRational),
}

impl Coord {
    fn new(x: &Rational) -> Coord {
        match x.as_i64_pair() {
            Some((n, d)) => Coord::Small(n as i128, d as i128),
            None => Coord::Big(x.to_big()),
        }
    }

    /// Fractional part of `d·x` in `[0, 1)`.
    fn frac(&self, d: i64) -> f64 {
        match self {
            Coord::Small(n, den) => {
                let r = (n * d as i128).rem_euclid(*den);
                r as f64 / *den as f64
            }
            Coord::Big(x) => {
                let y = x * BigInt::from(d);
                let r = y.numer().mod_floor(y.denom());
                if r.is_zero() {
                    0.0
                } else {
                    num_rational::BigRational::new(r, y.denom().clone()).to_f64().unwrap_or(0.0)
                }
            }
        }
    }
}

/// `m̂` at an integer point, with each phase reduced exactly modulo 1.
fn ft_at_integer(atoms: &[(Vec<Coord>, f64)], d: &[i64]) -> f64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (pos, w) in atoms {
        let mut f: f64 = pos.iter().zip(d).map(|(c, &di)| c.frac(di)).sum();
        f -= f.floor();
        let (s, c) = (2.0 * PI * f).sin_cos();
        re += w * c;
        im -= w * s;
    }
    re.hypot(im)
}

/// One-dimensional atoms `a_j / L` over a common denominator `L ≤ 2^16`, with
/// the phases `e^{−2πir/L}` tabulated.
struct PhaseTable {
    den: u64,
    atoms: Vec<(u64, f64)>,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl PhaseTable {
    const MAX_DEN: u64 = 1 << 16;

    fn new(m: &DiscreteMeasure) -> Option<PhaseTable> {
        if m.dim() != 1 {
            return None;
        }
        let pairs: Vec<(i64, i64)> = m.atoms_1d().map(|(x, _)| x.as_i64_pair()).collect::<Option<_>>()?;
        let den = pairs.iter().try_fold(1u64, |acc, &(_, d)| {
            let l = acc.lcm(&(d as u64));
            (l <= Self::MAX_DEN).then_some(l)
        })?;
        let atoms = pairs
            .iter()
            .zip(m.atoms_1d())
            .map(|(&(n, d), (_, w))| ((n * (den as i64 / d)).rem_euclid(den as i64) as u64, w.to_f64()))
            .collect();
        let (sin, cos) = (0..den).map(|r| (2.0 * PI * r as f64 / den as f64).sin_cos()).unzip();
        Some(PhaseTable { den, atoms, cos, sin })
    }

    fn abs_at(&self, d: u64) -> f64 {
        let d = d % self.den;
        let (mut re, mut im) = (0.0, 0.0);
        for &(a, w) in &self.atoms {
            let r = (d * a % self.den) as usize;
            re += w * self.cos[r];
            im -= w * self.sin[r];
        }
        re.hypot(im)
    }
}

/// Direct evaluation of the Gram matrix `⟨e_λ, e_λ'⟩_{L²(m)} = m̂(λ' − λ)`:
/// true iff every off-diagonal entry is at most `eps` in modulus. Diagonal
/// entries equal the total mass, which is exactly one.
pub fn gram_check_numeric(m: &DiscreteMeasure, s: &Spectrum, eps: f64) -> Result<bool> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidTolerance(eps));
    }
    if !s.is_finite() {
        return Err(Error::InvalidSpectrum("numeric check needs a finite spectrum".into()));
    }
    if m.dim() != s.dim() {
        return Err(Error::DimensionMismatch { left: m.dim(), right: s.dim() });
    }
    // |m̂(−d)| = |m̂(d)|, so one sign per difference suffices
    if s.dim() == 1 {
        let diffs = positive_differences(&s.values()?);
        if let Some(table) = PhaseTable::new(m) {
            return Ok(diffs.iter().all(|&d| table.abs_at(d) <= eps));
        }
    }
    let atoms: Vec<(Vec<Coord>, f64)> =
        m.atoms().iter().map(|(p, w)| (p.iter().map(Coord::new).collect(), w.to_f64())).collect();
    let diffs: Vec<Vec<i64>> = if s.dim() == 1 {
        positive_differences(&s.values()?).into_iter().map(|d| vec![d as i64]).collect()
    } else {
        let mut set = BTreeSet::new();
        for (i, a) in s.base().iter().enumerate() {
            for b in &s.base()[i + 1..] {
                set.insert(b.iter().zip(a).map(|(x, y)| x - y).collect::<Vec<_>>());
            }
        }
        set.into_iter().collect()
    };
    Ok(diffs.iter().all(|d| ft_at_integer(&atoms, d) <= eps))
}

/// A value together with a bound on its error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QValue {
    pub value: f64,
    pub bound: f64,
}

/// Adds `|μ̂|²` for one truncated evaluation, returning `(value, bound)`.
fn squared(t: &Truncated) -> (f64, f64) {
    let v = t.value.norm();
    let e = t.abs_bound();
    let hi = v + e;
    let lo = (v - e).max(0.0);
    (v * v, (hi * hi - v * v).max(v * v - lo * lo))
}

/// `Q(ξ) = Σ_{λ∈s} |μ̂(ξ+λ)|²` with the transform truncated at `K` side factors.
///
/// A periodic `s` must belong to a Type I tail-side spec. Its lattice is summed
/// over `|m| ≤ LATTICE_TERMS` translates explicitly; the rest is bounded in
/// closed form using the periodicity of the discrete part and of
/// `sin²(πξ/(N₁⋯N_{2k}))`.
pub fn q_function(spec: &FactorSpec, s: &Spectrum, k: usize, xi: f64) -> Result<QValue> {
    let values = s.values()?;
    let mut value = 0.0;
    let mut bound = 0.0;
    match s.period() {
        None => {
            for &lambda in &values {
                let (v, b) = squared(&fourier::ft_truncated_product(spec, k, xi + lambda as f64)?);
                value += v;
                bound += b;
            }
        }
        Some(period) => {
            if !spec.has_tail() {
                return Err(Error::InvalidSpectrum("a periodic spectrum needs a Type I tail-side spec".into()));
            }
            let p = period as f64;
            let big_m = LATTICE_TERMS as f64;
            for &b in &values {
                let t = xi + b as f64;
                for m in -LATTICE_TERMS..=LATTICE_TERMS {
                    let (v, e) = squared(&fourier::ft_truncated_product(spec, k, t + m as f64 * p)?);
                    value += v;
                    bound += e;
                }
                // |μ̂(t + mP)|² = |D̂(t)|² sin²(πu) / (π²(u+m)²) with u = t/P
                let u = t / p;
                if u.abs() >= big_m {
                    return Err(Error::InvalidSpectrum(format!("base point {b} too far from the origin")));
                }
                let disc = fourier::ft_side_factors(spec, spec.level(), t)?;
                let dv = disc.value.norm();
                let dhi = dv + disc.abs_bound();
                let s2 = (PI * u).sin().powi(2);
                let lo = 1.0 / (u + big_m + 1.0) + 1.0 / (big_m + 1.0 - u);
                let hi = 1.0 / (u + big_m) + 1.0 / (big_m - u);
                let c = dv * dv * s2 / (PI * PI);
                let c_hi = dhi * dhi * s2 / (PI * PI) * (1.0 + 4.0 * f64::EPSILON);
                let mid = c * (lo + hi) / 2.0;
                value += mid;
                bound += (c_hi * hi - mid).max(mid - c * lo).max(0.0);
            }
        }
    }
    bound += 4.0 * f64::EPSILON * values.len() as f64 * value.max(1.0);
    Ok(QValue { value, bound })
}

/// `Q` of a product measure at `ξ ∈ R^d`: the product of per-axis values.
pub fn q_product(parts: &[(FactorSpec, Spectrum)], k: usize, xi: &[f64]) -> Result<QValue> {
    if parts.is_empty() {
        return Err(Error::EmptyFactorList);
    }
    if parts.len() != xi.len() {
        return Err(Error::DimensionMismatch { left: parts.len(), right: xi.len() });
    }
    let mut value = 1.0;
    let mut upper = 1.0;
    for ((spec, s), &x) in parts.iter().zip(xi) {
        let q = q_function(spec, s, k, x)?;
        value *= q.value;
        upper *= q.value + q.bound;
    }
    Ok(QValue { value, bound: upper - value })
}

/// Sums `a ± b` of two finite spectra, or `None` when some sum repeats.
fn finite_sums(a: &Spectrum, b: &Spectrum) -> Option<HashSet<Vec<i64>>> {
    let mut sums = HashSet::with_capacity(a.len() * b.len());
    for p in a.base() {
        for q in b.base() {
            if !sums.insert(p.iter().zip(q).map(|(x, y)| x + y).collect()) {
                return None;
            }
        }
    }
    Some(sums)
}

/// Whether `sA ⊕ sB` (or `sA ⊕ (−sB)`) tiles `Z^d`.
///
/// * finite ⊕ periodic with period `M`: the sums must hit every residue class
///   mod `M` exactly once, which settles the whole lattice;
/// * finite ⊕ finite: all sums must be distinct and cover `[−W, W]^d`;
/// * periodic ⊕ periodic never gives unique representations.
pub fn tiling_check(sa: &Spectrum, sb: &Spectrum, w: u64, negate_b: bool) -> Result<bool> {
    if sa.dim() != sb.dim() {
        return Err(Error::DimensionMismatch { left: sa.dim(), right: sb.dim() });
    }
    let dim = sa.dim();
    let owned;
    let sb = if negate_b {
        owned = sb.negated();
        &owned
    } else {
        sb
    };
    match (sa.period(), sb.period()) {
        (Some(_), Some(_)) => Ok(false),
        (None, Some(m)) | (Some(m), None) => {
            let (fin, per) = if sa.is_finite() { (sa, sb) } else { (sb, sa) };
            let cells = (m as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
            if (fin.len() as u128) * (per.len() as u128) != cells {
                return Ok(false);
            }
            if dim == 1 {
                let mut hit = vec![false; m as usize];
                for p in fin.base() {
                    for q in per.base() {
                        let r = (p[0] + q[0]).rem_euclid(m as i64) as usize;
                        if std::mem::replace(&mut hit[r], true) {
                            return Ok(false);
                        }
                    }
                }
                return Ok(true);
            }
            let mut seen = HashSet::with_capacity(fin.len() * per.len());
            for p in fin.base() {
                for q in per.base() {
                    let sum: Vec<i64> = p.iter().zip(q).map(|(x, y)| x + y).collect();
                    if !seen.insert(residue(&sum, m)) {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        (None, None) => {
            let side = 2 * w as u128 + 1;
            let count = side.checked_pow(dim as u32).unwrap_or(u128::MAX);
            if count > MAX_WINDOW_POINTS as u128 {
                return Err(Error::Guardrail {
                    what: "window points",
                    value: count.min(u64::MAX as u128) as u64,
                    limit: MAX_WINDOW_POINTS,
                });
            }
            if dim == 1 {
                let sums = match direct_sum(&sa.values()?, &sb.values()?) {
                    Ok(v) => v,
                    Err(Error::SpectrumCollision(_)) => return Ok(false),
                    Err(e) => return Err(e),
                };
                let w = w as i64;
                let start = sums.partition_point(|&x| x < -w);
                let end = sums.partition_point(|&x| x <= w);
                // distinct integers in [−W, W] cover it iff there are 2W + 1 of them
                return Ok((end - start) as u128 == side);
            }
            let Some(sums) = finite_sums(sa, sb) else { return Ok(false) };
            let w = w as i64;
            let mut point = vec![-w; dim];
            loop {
                if !sums.contains(&point) {
                    return Ok(false);
                }
                let mut axis = 0;
                loop {
                    if axis == dim {
                        return Ok(true);
                    }
                    if point[axis] < w {
                        point[axis] += 1;
                        break;
                    }
                    point[axis] = -w;
                    axis += 1;
                }
            }
        }
    }
}

/// The interval covered by `A₁ ⊕ (−A₂) ⊕ A₃ ⊕ (−A₄) ⊕ ⋯` over the first `levels`
/// digit sets, or `None` if the sum is not a run of consecutive integers.
pub fn exhaustion_interval(l: &Ladder, levels: usize) -> Result<Option<(i64, i64)>> {
    let mut acc = vec![0i64];
    for n in 1..=levels {
        let digits = digit_set(l, n)?.values;
        let signed: Vec<i64> = if n % 2 == 1 { digits } else { digits.iter().map(|x| -x).collect() };
        acc = match direct_sum(&acc, &signed) {
            Ok(v) => v,
            Err(Error::SpectrumCollision(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
    }
    let (lo, hi) = (acc[0], acc[acc.len() - 1]);
    Ok(((hi - lo + 1) as usize == acc.len()).then_some((lo, hi)))
}

/// Cartesian product of one-dimensional spectra. Periodic parts are expanded to
/// the least common multiple of their periods; mixing finite and periodic
/// parts is rejected.
pub fn product_spectrum(parts: &[Spectrum]) -> Result<Spectrum> {
    if parts.is_empty() {
        return Err(Error::EmptyFactorList);
    }
    if let Some(p) = parts.iter().find(|p| p.dim() != 1) {
        return Err(Error::DimensionMismatch { left: 1, right: p.dim() });
    }
    let periodic = parts.iter().filter(|p| !p.is_finite()).count();
    let (axes, period) = if periodic == 0 {
        (parts.iter().map(|p| p.values()).collect::<Result<Vec<_>>>()?, None)
    } else if periodic == parts.len() {
        let lcm = parts.iter().try_fold(1u64, |acc, p| {
            let m = p.period().unwrap_or(1);
            let l = acc.lcm(&m);
            (l <= i64::MAX as u64).then_some(l).ok_or_else(|| Error::Overflow(format!("lcm of periods {acc}, {m}")))
        })?;
        let mut axes = Vec::new();
        for p in parts {
            let m = p.period().unwrap_or(1) as i64;
            let mut v = Vec::new();
            for b in p.values()? {
                let r = b.rem_euclid(m);
                v.extend((0..lcm as i64 / m).map(|t| r + t * m));
            }
            v.sort_unstable();
            axes.push(v);
        }
        (axes, Some(lcm))
    } else {
        return Err(Error::InvalidSpectrum("cannot mix finite and periodic spectra in a product".into()));
    };
    let mut points: Vec<Vec<i64>> = vec![Vec::new()];
    for axis in &axes {
        points = points
            .iter()
            .flat_map(|p| {
                axis.iter().map(move |&x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    Spectrum::new(parts.len(), points, period)
}
