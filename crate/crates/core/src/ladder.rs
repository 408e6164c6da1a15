//! Ladders `N₁, N₂, …` and the complementary factor pairs they generate.
//!
//! A ladder defines the discrete factors
//! `ν_k = (1/N_k) Σ_{j<N_k} δ_{j/(N₁⋯N_k)}` whose full convolution is the
//! uniform measure on the grid `{j/(N₁⋯N_L)}`. A [`FactorSpec`] names one
//! side of a complementary pair: the odd-indexed or the even-indexed factors,
//! optionally carrying a Lebesgue tail (Type I).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{self, DiscreteMeasure};
use crate::rational::Rational;

/// Largest ladder entry accepted when parsing.
pub const MAX_ENTRY: u64 = 1 << 32;

/// A finite sequence of integers, each at least 2.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Ladder(Vec<u64>);

impl Ladder {
    pub fn new(entries: Vec<u64>) -> Result<Self> {
        if let Some(&bad) = entries.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidLadder(format!("entry {bad} is below 2")));
        }
        if let Some(&bad) = entries.iter().find(|&&n| n > MAX_ENTRY) {
            return Err(Error::InvalidLadder(format!("entry {bad} exceeds 2^32")));
        }
        Ok(Ladder(entries))
    }

    pub fn empty() -> Self {
        Ladder(Vec::new())
    }

    /// `n` repeated `len` times.
    pub fn constant(n: u64, len: usize) -> Result<Self> {
        Self::new(vec![n; len])
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `N_j` with 1-based indexing.
    pub fn entry(&self, j: usize) -> Result<u64> {
        if j == 0 || j > self.0.len() {
            return Err(Error::IndexOutOfRange { index: j, len: self.0.len() });
        }
        Ok(self.0[j - 1])
    }

    /// `N₁⋯N_j` (with `P₀ = 1`), if it fits in a `u64`.
    pub fn prefix_product(&self, j: usize) -> Option<u64> {
        self.0.iter().take(j).try_fold(1u64, |acc, &n| acc.checked_mul(n))
    }

    pub fn prefix_product_big(&self, j: usize) -> BigInt {
        self.0.iter().take(j).fold(BigInt::from(1u8), |acc, &n| acc * n)
    }

    /// `N₁⋯N_j` in floating point; exact while it stays below 2^53.
    pub fn prefix_product_f64(&self, j: usize) -> f64 {
        self.0.iter().take(j).map(|&n| n as f64).product()
    }

    pub fn total_product(&self) -> Option<u64> {
        self.prefix_product(self.0.len())
    }

    pub fn prefix(&self, len: usize) -> Ladder {
        Ladder(self.0[..len.min(self.0.len())].to_vec())
    }
}

impl fmt::Display for Ladder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Parses a comma separated list such as `2,3,2`; the empty string is the empty ladder.
impl FromStr for Ladder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        if s.trim().is_empty() {
            return Ok(Ladder::empty());
        }
        let entries = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::InvalidLadder(format!("bad entry {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ladder::new(entries)
    }
}

impl Serialize for Ladder {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Ladder {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<u64>::deserialize(deserializer)?;
        Ladder::new(v).map_err(serde::de::Error::custom)
    }
}

/// Which parity of `ν_j` a factor collects.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Odd,
    Even,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Odd => Side::Even,
            Side::Even => Side::Odd,
        }
    }

    /// Ladder index (1-based) of the `j`-th factor on this side.
    pub fn ladder_index(self, j: usize) -> usize {
        match self {
            Side::Odd => 2 * j - 1,
            Side::Even => 2 * j,
        }
    }

    /// Number of factors this side takes from a ladder of length `len`.
    pub fn count_in(self, len: usize) -> usize {
        match self {
            Side::Odd => len.div_ceil(2),
            Side::Even => len / 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Odd => "odd",
            Side::Even => "even",
        }
    }
}

impl FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "odd" => Ok(Side::Odd),
            "even" => Ok(Side::Even),
            _ => Err(Error::InvalidSpec(format!("unknown side {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Decomposition {
    /// Finite split; one side carries a Lebesgue tail on `[0, 1/(N₁⋯N_{2k})]`.
    #[serde(rename = "I")]
    TypeI,
    /// Infinite alternating split, handled through truncation levels.
    #[serde(rename = "II")]
    TypeII,
}

impl FromStr for Decomposition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" | "TYPEI" => Ok(Decomposition::TypeI),
            "II" | "2" | "TYPEII" => Ok(Decomposition::TypeII),
            _ => Err(Error::InvalidSpec(format!("unknown decomposition type {s:?}"))),
        }
    }
}

/// One factor of a complementary pair built from a ladder.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct FactorSpec {
    ladder: Ladder,
    #[serde(rename = "type")]
    decomposition: Decomposition,
    side: Side,
    level: usize,
    #[serde(rename = "tail_on")]
    tail_on: Option<Side>,
}

#[derive(Deserialize)]
struct RawSpec {
    ladder: Ladder,
    #[serde(rename = "type")]
    decomposition: Decomposition,
    side: Side,
    level: Option<usize>,
    #[serde(default)]
    tail_on: Option<Side>,
}

impl<'de> Deserialize<'de> for FactorSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSpec::deserialize(deserializer)?;
        match raw.decomposition {
            Decomposition::TypeI => {
                let tail = raw
                    .tail_on
                    .ok_or_else(|| serde::de::Error::custom("Type I spec needs tail_on"))?;
                let spec = FactorSpec::type_one(raw.ladder, raw.side, tail).map_err(serde::de::Error::custom)?;
                match raw.level {
                    Some(l) if l != spec.level => Err(serde::de::Error::custom(format!(
                        "Type I level must be {}, got {l}",
                        spec.level
                    ))),
                    _ => Ok(spec),
                }
            }
            Decomposition::TypeII => {
                if raw.tail_on.is_some() {
                    return Err(serde::de::Error::custom("Type II spec cannot carry a Lebesgue tail"));
                }
                let level = raw.level.unwrap_or_else(|| raw.side.count_in(raw.ladder.len()));
                FactorSpec::type_two(raw.ladder, raw.side, level).map_err(serde::de::Error::custom)
            }
        }
    }
}

impl FactorSpec {
    /// Type I factor: the ladder has even length `2k`, `tail_on` names the side
    /// convolved with `L_[0, 1/(N₁⋯N_{2k})]`.
    pub fn type_one(ladder: Ladder, side: Side, tail_on: Side) -> Result<Self> {
        if !ladder.len().is_multiple_of(2) {
            return Err(Error::InvalidSpec(format!(
                "Type I needs an even ladder length, got {}",
                ladder.len()
            )));
        }
        let level = ladder.len() / 2;
        Ok(FactorSpec { ladder, decomposition: Decomposition::TypeI, side, level, tail_on: Some(tail_on) })
    }

    /// Type II factor truncated at `level`.
    pub fn type_two(ladder: Ladder, side: Side, level: usize) -> Result<Self> {
        let available = side.count_in(ladder.len());
        if level > available {
            return Err(Error::InsufficientLadder { level, side: side.name(), needed: level, available });
        }
        Ok(FactorSpec { ladder, decomposition: Decomposition::TypeII, side, level, tail_on: None })
    }

    /// The complementary pair `(odd side, even side)`.
    pub fn pair(
        ladder: Ladder,
        decomposition: Decomposition,
        tail_on: Option<Side>,
        level: Option<usize>,
    ) -> Result<(FactorSpec, FactorSpec)> {
        match decomposition {
            Decomposition::TypeI => {
                let tail = tail_on.ok_or_else(|| Error::InvalidSpec("Type I needs a tail side".into()))?;
                let odd = FactorSpec::type_one(ladder.clone(), Side::Odd, tail)?;
                if let Some(l) = level {
                    if l != odd.level {
                        return Err(Error::InvalidSpec(format!("Type I level must be {}, got {l}", odd.level)));
                    }
                }
                Ok((odd, FactorSpec::type_one(ladder, Side::Even, tail)?))
            }
            Decomposition::TypeII => {
                if tail_on.is_some() {
                    return Err(Error::InvalidSpec("Type II cannot carry a Lebesgue tail".into()));
                }
                let odd_level = level.unwrap_or_else(|| Side::Odd.count_in(ladder.len()));
                let even_level = level.unwrap_or_else(|| Side::Even.count_in(ladder.len()));
                Ok((
                    FactorSpec::type_two(ladder.clone(), Side::Odd, odd_level)?,
                    FactorSpec::type_two(ladder, Side::Even, even_level)?,
                ))
            }
        }
    }

    pub fn ladder(&self) -> &Ladder {
        &self.ladder
    }

    pub fn decomposition(&self) -> Decomposition {
        self.decomposition
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn tail_on(&self) -> Option<Side> {
        self.tail_on
    }

    /// True when this factor carries the Lebesgue tail.
    pub fn has_tail(&self) -> bool {
        self.tail_on == Some(self.side)
    }

    /// Number of discrete factors this side has in the ladder.
    pub fn side_count(&self) -> usize {
        self.side.count_in(self.ladder.len())
    }

    /// Ladder indices of the first `k` factors on this side.
    pub fn side_indices(&self, k: usize) -> Result<Vec<usize>> {
        let available = self.side_count();
        if k > available {
            return Err(Error::InsufficientLadder { level: k, side: self.side.name(), needed: k, available });
        }
        Ok((1..=k).map(|j| self.side.ladder_index(j)).collect())
    }

    /// Whether `other` is the complementary factor from the same ladder.
    pub fn is_complement_of(&self, other: &FactorSpec) -> bool {
        self.ladder == other.ladder
            && self.decomposition == other.decomposition
            && self.side == other.side.other()
            && self.tail_on == other.tail_on
    }

    /// Same spec with a different truncation level (Type II only).
    pub fn with_level(&self, level: usize) -> Result<FactorSpec> {
        match self.decomposition {
            Decomposition::TypeI if level == self.level => Ok(self.clone()),
            Decomposition::TypeI => Err(Error::InvalidSpec("Type I level is fixed by the ladder".into())),
            Decomposition::TypeII => FactorSpec::type_two(self.ladder.clone(), self.side, level),
        }
    }
}

/// `ν_k = (1/N_k) Σ_{j<N_k} δ_{j/(N₁⋯N_k)}` for `1 ≤ k ≤ |l|`.
pub fn nu_factor(l: &Ladder, k: usize) -> Result<DiscreteMeasure> {
    let n = l.entry(k)?;
    let weight = Rational::new(1, n as i64);
    let positions: Vec<Rational> = match l.prefix_product(k).and_then(|p| i64::try_from(p).ok()) {
        Some(p) => (0..n as i64).map(|j| Rational::new(j, p)).collect(),
        None => {
            let p = l.prefix_product_big(k);
            (0..n).map(|j| Rational::from_bigints(BigInt::from(j), p.clone())).collect()
        }
    };
    DiscreteMeasure::from_atoms_1d(positions.into_iter().map(|x| (x, weight.clone())))
}

/// Level-`k` discrete approximant of a factor: the convolution of its first `k` side factors.
pub fn approximant(spec: &FactorSpec, k: usize) -> Result<DiscreteMeasure> {
    let mut acc = DiscreteMeasure::dirac(1);
    for idx in spec.side_indices(k)? {
        acc = measures::convolve(&acc, &nu_factor(&spec.ladder, idx)?)?;
    }
    Ok(acc)
}

/// Exact check that `ν₁ ∗ ⋯ ∗ ν_L` is uniform on `{j/(N₁⋯N_L)}`.
pub fn verify_pair(l: &Ladder) -> bool {
    let Some(total) = l.total_product() else { return false };
    let mut acc = DiscreteMeasure::dirac(1);
    for k in 1..=l.len() {
        let Ok(nu) = nu_factor(l, k) else { return false };
        let Ok(next) = measures::convolve(&acc, &nu) else { return false };
        acc = next;
    }
    measures::is_uniform_on_grid(&acc, total)
}

/// Labels assigning each `ν_k` of a ladder to one of two factors.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Assignment(pub Vec<Side>);

impl Assignment {
    /// The alternating assignment starting with `first`.
    pub fn alternating(first: Side, len: usize) -> Self {
        Assignment((0..len).map(|i| if i % 2 == 0 { first } else { first.other() }).collect())
    }

    pub fn labels(&self) -> &[Side] {
        &self.0
    }

    pub fn is_alternating(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1])
    }
}

/// Canonical form of a labelled ladder.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Canonical {
    pub ladder: Ladder,
    pub assignment: Assignment,
    /// Spec of the factor carrying the `Side::Odd` label.
    pub odd_labelled: FactorSpec,
    /// Spec of the factor carrying the `Side::Even` label.
    pub even_labelled: FactorSpec,
}

/// Merges consecutive same-label factors `ν_k ∗ ν_{k+1}` into a single entry
/// `N_k N_{k+1}`, leaving a strictly alternating assignment.
pub fn canonicalize(l: &Ladder, a: &Assignment) -> Result<Canonical> {
    if a.0.len() != l.len() {
        return Err(Error::InvalidSpec(format!(
            "assignment has {} labels for a ladder of length {}",
            a.0.len(),
            l.len()
        )));
    }
    let mut entries: Vec<u64> = Vec::new();
    let mut labels: Vec<Side> = Vec::new();
    for (&n, &label) in l.entries().iter().zip(&a.0) {
        match (entries.last_mut(), labels.last()) {
            (Some(last), Some(&prev)) if prev == label => {
                *last = last
                    .checked_mul(n)
                    .ok_or_else(|| Error::Overflow(format!("merged entry {last}·{n}")))?;
            }
            _ => {
                entries.push(n);
                labels.push(label);
            }
        }
    }
    let ladder = Ladder::new(entries)?;
    // The factor holding the first merged entry collects the odd positions.
    let first_label = labels.first().copied().unwrap_or(Side::Odd);
    let spec_for = |label: Side| {
        let side = if label == first_label { Side::Odd } else { Side::Even };
        FactorSpec::type_two(ladder.clone(), side, side.count_in(ladder.len()))
    };
    Ok(Canonical {
        odd_labelled: spec_for(Side::Odd)?,
        even_labelled: spec_for(Side::Even)?,
        ladder,
        assignment: Assignment(labels),
    })
}

/// Convolution of the `ν_k` carrying `label` under an arbitrary assignment.
pub fn labelled_measure(l: &Ladder, a: &Assignment, label: Side) -> Result<DiscreteMeasure> {
    if a.0.len() != l.len() {
        return Err(Error::InvalidSpec("assignment length differs from ladder length".into()));
    }
    let mut acc = DiscreteMeasure::dirac(1);
    for (k, &lab) in a.0.iter().enumerate() {
        if lab == label {
            acc = measures::convolve(&acc, &nu_factor(l, k + 1)?)?;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lad(v: &[u64]) -> Ladder {
        Ladder::new(v.to_vec()).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn ladder_validation() {
        assert!(Ladder::new(vec![2, 1]).is_err());
        assert!(Ladder::new(vec![MAX_ENTRY + 1]).is_err());
        assert_eq!("2, 3,2".parse::<Ladder>().unwrap(), lad(&[2, 3, 2]));
        assert_eq!("".parse::<Ladder>().unwrap(), Ladder::empty());
        assert!("2,x".parse::<Ladder>().is_err());
        assert!(serde_json::from_str::<Ladder>("[2, 4294967297]").is_err());
    }

    #[test]
    fn nu_factor_examples() {
        let nu = nu_factor(&lad(&[2, 3]), 2).unwrap();
        assert_eq!(nu, DiscreteMeasure::uniform_on([r(0, 1), r(1, 6), r(2, 6)]).unwrap());
        assert_eq!(nu_factor(&lad(&[2]), 1).unwrap(), DiscreteMeasure::uniform_on([r(0, 1), r(1, 2)]).unwrap());
        assert_eq!(nu_factor(&lad(&[4]), 1).unwrap(), DiscreteMeasure::uniform_grid(4).unwrap());
        assert_eq!(nu_factor(&lad(&[2]), 2).unwrap_err(), Error::IndexOutOfRange { index: 2, len: 1 });
        assert!(nu_factor(&lad(&[2]), 0).is_err());
    }

    #[test]
    fn nu_factor_past_machine_range() {
        let l = Ladder::constant(2, 70).unwrap();
        let nu = nu_factor(&l, 70).unwrap();
        assert_eq!(nu.len(), 2);
        let top = &nu.atoms()[1].0[0];
        assert_eq!(top.denom(), BigInt::from(2u8).pow(70));
    }

    #[test]
    fn consecutive_factors_merge() {
        let l = lad(&[2, 3, 5]);
        let merged = measures::convolve(&nu_factor(&l, 2).unwrap(), &nu_factor(&l, 3).unwrap()).unwrap();
        let grid: Vec<Rational> = (0..15).map(|j| r(j, 30)).collect();
        assert_eq!(merged, DiscreteMeasure::uniform_on(grid).unwrap());
    }

    #[test]
    fn approximant_examples() {
        let l = Ladder::constant(2, 6).unwrap();
        let spec = FactorSpec::type_two(l.clone(), Side::Odd, 3).unwrap();
        let a = approximant(&spec, 3).unwrap();
        let mut expect = Vec::new();
        for x in [r(0, 1), r(1, 2)] {
            for y in [r(0, 1), r(1, 8)] {
                for z in [r(0, 1), r(1, 32)] {
                    expect.push(&(&x + &y) + &z);
                }
            }
        }
        assert_eq!(a, DiscreteMeasure::uniform_on(expect).unwrap());
        assert_eq!(approximant(&spec, 0).unwrap(), DiscreteMeasure::dirac(1));
        assert!(approximant(&spec, 4).is_err());

        let even = FactorSpec::type_two(lad(&[2, 3]), Side::Even, 1).unwrap();
        assert_eq!(approximant(&even, 1).unwrap(), nu_factor(&lad(&[2, 3]), 2).unwrap());
    }

    #[test]
    fn spec_validation() {
        assert!(FactorSpec::type_one(lad(&[2, 2, 2]), Side::Odd, Side::Even).is_err());
        let s = FactorSpec::type_one(lad(&[2, 3]), Side::Even, Side::Even).unwrap();
        assert_eq!(s.level(), 1);
        assert!(s.has_tail());
        assert!(FactorSpec::type_two(lad(&[2, 3, 2]), Side::Odd, 2).is_ok());
        assert!(FactorSpec::type_two(lad(&[2, 3, 2]), Side::Even, 2).is_err());
        let (a, b) = FactorSpec::pair(lad(&[2, 2]), Decomposition::TypeI, Some(Side::Even), None).unwrap();
        assert!(a.is_complement_of(&b));
        assert!(FactorSpec::pair(lad(&[2, 2]), Decomposition::TypeII, Some(Side::Even), None).is_err());
    }

    #[test]
    fn spec_json() {
        let spec: FactorSpec =
            serde_json::from_str(r#"{"ladder":[2,3,2], "type":"II", "side":"odd", "level":2, "tail_on":null}"#)
                .unwrap();
        assert_eq!(spec, FactorSpec::type_two(lad(&[2, 3, 2]), Side::Odd, 2).unwrap());
        let v = serde_json::to_value(&spec).unwrap();
        assert_eq!(v, serde_json::json!({"ladder":[2,3,2], "type":"II", "side":"odd", "level":2, "tail_on":null}));
        assert!(serde_json::from_str::<FactorSpec>(r#"{"ladder":[2,3,2], "type":"II", "side":"odd", "level":3}"#)
            .is_err());
        let t1: FactorSpec =
            serde_json::from_str(r#"{"ladder":[2,2], "type":"I", "side":"odd", "tail_on":"even"}"#).unwrap();
        assert_eq!(t1.level(), 1);
    }

    #[test]
    fn verify_pair_examples() {
        assert!(verify_pair(&lad(&[2, 3, 2, 4])));
        assert!(verify_pair(&Ladder::empty()));
        assert!(verify_pair(&lad(&[7])));
    }

    #[test]
    fn canonicalize_examples() {
        let c = canonicalize(&lad(&[2, 2]), &Assignment(vec![Side::Odd, Side::Odd])).unwrap();
        assert_eq!(c.ladder, lad(&[4]));
        assert_eq!(c.assignment, Assignment(vec![Side::Odd]));

        let c = canonicalize(&lad(&[2, 3]), &Assignment(vec![Side::Odd, Side::Even])).unwrap();
        assert_eq!(c.ladder, lad(&[2, 3]));

        let l = lad(&[2, 2, 3]);
        let a = Assignment(vec![Side::Odd, Side::Odd, Side::Even]);
        let c = canonicalize(&l, &a).unwrap();
        assert_eq!(c.ladder, lad(&[4, 3]));
        assert_eq!(c.assignment, Assignment(vec![Side::Odd, Side::Even]));
        for label in [Side::Odd, Side::Even] {
            let spec = if label == Side::Odd { &c.odd_labelled } else { &c.even_labelled };
            assert_eq!(labelled_measure(&l, &a, label).unwrap(), approximant(spec, spec.level()).unwrap());
        }

        assert!(canonicalize(&l, &Assignment(vec![Side::Odd])).is_err());
    }

    #[test]
    fn canonicalize_with_even_first_label() {
        let l = lad(&[3, 2, 2]);
        let a = Assignment(vec![Side::Even, Side::Odd, Side::Odd]);
        let c = canonicalize(&l, &a).unwrap();
        assert_eq!(c.ladder, lad(&[3, 4]));
        assert_eq!(c.even_labelled.side(), Side::Odd);
        assert_eq!(labelled_measure(&l, &a, Side::Even).unwrap(), approximant(&c.even_labelled, 1).unwrap());
        assert_eq!(labelled_measure(&l, &a, Side::Odd).unwrap(), approximant(&c.odd_labelled, 1).unwrap());
    }
}
