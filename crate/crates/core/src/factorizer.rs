//! Recovering ladders from complementary data.
//!
//! Two measures on the grid `{j/n}` whose convolution is uniform are peeled
//! apart one uniform factor at a time: the side holding the coarsest factor
//! `ν₁` has a weight vector made of `N₁` identical blocks, while the other side
//! lives inside the first block. Taking the largest such `N` at every stage
//! gives the merged, strictly alternating ladder.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ladder::{labelled_measure, Assignment, Ladder, Side};
use crate::measures::{self, DiscreteMeasure};
use crate::rational::Rational;

/// Largest `n` accepted by [`enumerate_complementary_pairs`].
pub const MAX_ENUMERATION_N: u64 = 64;

/// Which of the two inputs.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum PairSide {
    A,
    B,
}

impl PairSide {
    pub fn other(self) -> PairSide {
        match self {
            PairSide::A => PairSide::B,
            PairSide::B => PairSide::A,
        }
    }

    fn label(self) -> Side {
        match self {
            PairSide::A => Side::Odd,
            PairSide::B => Side::Even,
        }
    }
}

/// Two sets of nonnegative integers with `A ⊕ B = {0, …, n−1}`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SetPair {
    #[serde(rename = "A")]
    pub a: Vec<u64>,
    #[serde(rename = "B")]
    pub b: Vec<u64>,
    pub n: u64,
}

impl SetPair {
    /// Checks that the sums `a + b` hit every integer below `n` exactly once.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::NotComplementary(msg));
        if !self.a.contains(&0) || !self.b.contains(&0) {
            return fail("both sets must contain 0".into());
        }
        let n = usize::try_from(self.n).map_err(|_| Error::Overflow(format!("n = {}", self.n)))?;
        if self.a.len().checked_mul(self.b.len()) != Some(n) {
            return fail(format!("|A|·|B| = {}·{} differs from n = {n}", self.a.len(), self.b.len()));
        }
        let mut hit = vec![false; n];
        for &x in &self.a {
            for &y in &self.b {
                let s = x.checked_add(y).filter(|&s| s < self.n);
                match s {
                    Some(s) if !hit[s as usize] => hit[s as usize] = true,
                    Some(s) => return fail(format!("{s} has two representations")),
                    None => return fail(format!("{x} + {y} is not below {n}")),
                }
            }
        }
        Ok(())
    }
}

/// A ladder `M₁, M₂, …` listed finest first, with the input that received `M₁`.
///
/// It expands to `first = E_{M₁} ⊕ M₁M₂E_{M₃} ⊕ ⋯` and
/// `other = M₁E_{M₂} ⊕ M₁M₂M₃E_{M₄} ⊕ ⋯` where `E_N = {0, …, N−1}`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LadderWithSides {
    pub ladder: Ladder,
    pub first_side: PairSide,
}

impl LadderWithSides {
    /// The same ladder coarsest first, as `N₁, N₂, …` with `ν₁` the coarsest factor.
    pub fn coarsest_first(&self) -> Ladder {
        let mut v = self.ladder.entries().to_vec();
        v.reverse();
        Ladder::new(v).expect("reversal keeps entries valid")
    }

    /// The input holding the coarsest factor.
    pub fn coarsest_side(&self) -> PairSide {
        if self.ladder.len() % 2 == 1 {
            self.first_side
        } else {
            self.first_side.other()
        }
    }

    /// Side of `M_i` (1-based, finest first).
    fn side_of(&self, i: usize) -> PairSide {
        if i % 2 == 1 {
            self.first_side
        } else {
            self.first_side.other()
        }
    }

    /// The integer sets `(A, B)`.
    pub fn expand_sets(&self) -> Result<SetPair> {
        let mut a = vec![0u64];
        let mut b = vec![0u64];
        let mut scale: u64 = 1;
        for (i, &m) in self.ladder.entries().iter().enumerate() {
            let target = if self.side_of(i + 1) == PairSide::A { &mut a } else { &mut b };
            let mut next = Vec::with_capacity(target.len() * m as usize);
            for d in 0..m {
                for &x in target.iter() {
                    next.push(x + d * scale);
                }
            }
            next.sort_unstable();
            *target = next;
            scale = scale
                .checked_mul(m)
                .ok_or_else(|| Error::Overflow(format!("ladder product past {scale}")))?;
        }
        Ok(SetPair { a, b, n: scale })
    }

    /// The measures `(p, q)` as convolutions of the ladder factors.
    pub fn expand_measures(&self) -> Result<(DiscreteMeasure, DiscreteMeasure)> {
        let len = self.ladder.len();
        let coarse = self.coarsest_first();
        // ν_k coarsest first is M_{len+1−k}
        let labels = Assignment((1..=len).map(|k| self.side_of(len + 1 - k).label()).collect());
        Ok((
            labelled_measure(&coarse, &labels, PairSide::A.label())?,
            labelled_measure(&coarse, &labels, PairSide::B.label())?,
        ))
    }
}

/// Weights of a measure on `{j/n : 0 ≤ j < n}`, indexed by `j`.
fn grid_weights(m: &DiscreteMeasure, n: u64) -> Result<Vec<Rational>> {
    if m.dim() != 1 {
        return Err(Error::DimensionMismatch { left: 1, right: m.dim() });
    }
    let ni = i64::try_from(n).map_err(|_| Error::Overflow(format!("grid {n}")))?;
    let scale = Rational::from_integer(ni);
    let mut w = vec![Rational::zero(); n as usize];
    for (x, v) in m.atoms_1d() {
        let j = (x * &scale)
            .as_i64_pair()
            .filter(|&(num, den)| den == 1 && (0..ni).contains(&num))
            .ok_or_else(|| Error::NotComplementary(format!("atom {x} is not on the grid 1/{n}")))?;
        w[j.0 as usize] = v.clone();
    }
    Ok(w)
}

/// Largest `N ≥ 2` dividing `w.len()` such that `w` is `N` copies of one block.
fn max_block_period(w: &[Rational]) -> Option<usize> {
    let g = w.len();
    (2..=g).rev().filter(|n| g.is_multiple_of(*n)).find(|&n| {
        let len = g / n;
        w.chunks(len).skip(1).all(|c| c == &w[..len])
    })
}

fn assert_uniform(w: &[Rational], g: usize) -> Result<()> {
    let mut nonzero = w.iter().filter(|x| !x.is_zero());
    let first = nonzero.next().cloned();
    if nonzero.any(|x| Some(x) != first.as_ref()) {
        return Err(Error::PeelingFailed { grid: g as u64, reason: "intermediate factor is not uniform".into() });
    }
    Ok(())
}

/// Peels a complementary pair `p ∗ q = (1/n) Σ δ_{j/n}` into its ladder.
pub fn factor_uniform_pair(p: &DiscreteMeasure, q: &DiscreteMeasure) -> Result<LadderWithSides> {
    let c = measures::convolve(p, q)?;
    let n = c.len() as u64;
    if !measures::is_uniform_on_grid(&c, n) {
        return Err(Error::NotComplementary("the convolution is not uniform on a grid".into()));
    }
    let mut wa = grid_weights(p, n)?;
    let mut wb = grid_weights(q, n)?;
    let mut g = n as usize;
    let mut peeled: Vec<(u64, PairSide)> = Vec::new();
    while g > 1 {
        let pa = max_block_period(&wa);
        let pb = max_block_period(&wb);
        let (side, big_n) = match (pa, pb) {
            (Some(x), None) => (PairSide::A, x),
            (None, Some(x)) => (PairSide::B, x),
            (Some(_), Some(_)) => {
                return Err(Error::PeelingFailed { grid: g as u64, reason: "both sides are block-periodic".into() })
            }
            (None, None) => {
                return Err(Error::PeelingFailed { grid: g as u64, reason: "neither side is block-periodic".into() })
            }
        };
        if peeled.last().is_some_and(|&(_, s)| s == side) {
            return Err(Error::PeelingFailed { grid: g as u64, reason: "the same side would be peeled twice".into() });
        }
        let block = g / big_n;
        let factor = Rational::from_integer(big_n as i64);
        let (periodic, rest) = if side == PairSide::A { (&mut wa, &mut wb) } else { (&mut wb, &mut wa) };
        if rest[block..].iter().any(|x| !x.is_zero()) {
            return Err(Error::PeelingFailed { grid: g as u64, reason: "the other side leaves the first block".into() });
        }
        periodic.truncate(block);
        for x in periodic.iter_mut() {
            *x = &*x * &factor;
        }
        rest.truncate(block);
        assert_uniform(&wa, block)?;
        assert_uniform(&wb, block)?;
        peeled.push((big_n as u64, side));
        g = block;
    }
    let first_side = peeled.last().map_or(PairSide::A, |&(_, s)| s);
    let entries: Vec<u64> = peeled.iter().rev().map(|&(m, _)| m).collect();
    Ok(LadderWithSides { ladder: Ladder::new(entries)?, first_side })
}

/// Factors `A ⊕ B = {0, …, n−1}` through the equal-weight measures on `A/n`, `B/n`.
pub fn factor_sets(sp: &SetPair) -> Result<LadderWithSides> {
    sp.validate()?;
    let n = i64::try_from(sp.n).map_err(|_| Error::Overflow(format!("n = {}", sp.n)))?;
    let to_measure = |s: &[u64]| DiscreteMeasure::uniform_on(s.iter().map(|&x| Rational::new(x as i64, n)));
    factor_uniform_pair(&to_measure(&sp.a)?, &to_measure(&sp.b)?)
}

/// Every `(A, B)` with `A ⊕ B = {0, …, n−1}` and `0 ∈ A ∩ B`.
///
/// Sets are grown by placing the smallest uncovered integer in `A` (tried first)
/// or in `B`; the smallest uncovered integer can only be reached as `c + 0`.
pub fn enumerate_complementary_pairs(n: u64) -> Result<Vec<SetPair>> {
    if n > MAX_ENUMERATION_N {
        return Err(Error::Guardrail { what: "n", value: n, limit: MAX_ENUMERATION_N });
    }
    if n == 0 {
        return Err(Error::NotComplementary("n must be positive".into()));
    }
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut out = Vec::new();
    search(n, full, 1, 1, 1, &mut out);
    Ok(out)
}

fn shifted_cover(set: u64, c: u64, n: u64) -> Option<u64> {
    // {x + c : x ∈ set}, provided every sum stays below n
    if set.checked_shl(c as u32).unwrap_or(0) >> c != set {
        return None;
    }
    let shifted = set << c;
    let limit = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    (shifted & !limit == 0).then_some(shifted)
}

fn search(n: u64, full: u64, a: u64, b: u64, covered: u64, out: &mut Vec<SetPair>) {
    if covered == full {
        let bits = |m: u64| (0..n).filter(|i| m >> i & 1 == 1).collect();
        out.push(SetPair { a: bits(a), b: bits(b), n });
        return;
    }
    let c = (!covered).trailing_zeros() as u64;
    if let Some(add) = shifted_cover(b, c, n).filter(|s| s & covered == 0) {
        search(n, full, a | 1 << c, b, covered | add, out);
    }
    if let Some(add) = shifted_cover(a, c, n).filter(|s| s & covered == 0) {
        search(n, full, a, b | 1 << c, covered | add, out);
    }
}

/// Whether `p` is symmetric about the midpoint of its support, exactly.
pub fn symmetry_check(p: &DiscreteMeasure) -> bool {
    if p.dim() != 1 {
        return false;
    }
    let atoms: Vec<_> = p.atoms_1d().collect();
    let (lo, hi) = (atoms[0].0, atoms[atoms.len() - 1].0);
    let reflect = lo + hi;
    atoms.iter().all(|&(x, w)| p.weight_at(&[&reflect - x]) == Some(w))
}

/// `p` translated so that its support is centred at the origin.
pub fn centered(p: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    if p.dim() != 1 {
        return Err(Error::DimensionMismatch { left: 1, right: p.dim() });
    }
    let atoms: Vec<_> = p.atoms_1d().collect();
    let mid = &(atoms[0].0 + atoms[atoms.len() - 1].0) / &Rational::from_integer(2);
    DiscreteMeasure::from_atoms_1d(atoms.into_iter().map(|(x, w)| (x - &mid, w.clone())))
}

/// For a centred `p` with support `[−a, a]` and smallest positive integer zero
/// `r` of `p̂`: whether `1/(4r) ≤ a ≤ 1/(2r)`.
pub fn support_bound_check(p: &DiscreteMeasure, r: u64) -> bool {
    if p.dim() != 1 || r == 0 {
        return false;
    }
    let atoms: Vec<_> = p.atoms_1d().collect();
    let (lo, hi) = (atoms[0].0, atoms[atoms.len() - 1].0);
    if *lo != -hi {
        return false;
    }
    let Ok(r) = i64::try_from(r) else { return false };
    *hi >= Rational::new(1, 4 * r) && *hi <= Rational::new(1, 2 * r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quarters(xs: &[i64], n: i64) -> DiscreteMeasure {
        DiscreteMeasure::uniform_on(xs.iter().map(|&x| Rational::new(x, n))).unwrap()
    }

    fn pair(a: &[u64], b: &[u64], n: u64) -> SetPair {
        SetPair { a: a.to_vec(), b: b.to_vec(), n }
    }

    #[test]
    fn measure_peeling_examples() {
        let out = factor_uniform_pair(&quarters(&[0, 1], 4), &quarters(&[0, 2], 4)).unwrap();
        assert_eq!(out.ladder.entries(), &[2, 2]);
        assert_eq!(out.first_side, PairSide::A);
        assert_eq!(out.coarsest_side(), PairSide::B);

        let out = factor_uniform_pair(&DiscreteMeasure::dirac(1), &DiscreteMeasure::uniform_grid(5).unwrap()).unwrap();
        assert_eq!(out.ladder.entries(), &[5]);
        assert_eq!(out.first_side, PairSide::B);

        let half = quarters(&[0, 1], 2);
        assert!(matches!(factor_uniform_pair(&half, &half), Err(Error::NotComplementary(_))));
    }

    #[test]
    fn set_factor_examples() {
        let out = factor_sets(&pair(&[0, 1], &[0, 2], 4)).unwrap();
        assert_eq!((out.ladder.entries(), out.first_side), (&[2u64, 2][..], PairSide::A));
        let out = factor_sets(&pair(&[0, 1, 4, 5], &[0, 2], 8)).unwrap();
        assert_eq!((out.ladder.entries(), out.first_side), (&[2u64, 2, 2][..], PairSide::A));
        assert_eq!(out.expand_sets().unwrap(), pair(&[0, 1, 4, 5], &[0, 2], 8));
        let out = factor_sets(&pair(&[0], &[0], 1)).unwrap();
        assert!(out.ladder.is_empty());
        assert!(factor_sets(&pair(&[0, 1], &[0, 1], 4)).is_err());
        assert!(factor_sets(&pair(&[0, 1], &[0, 3], 4)).is_err());
    }

    #[test]
    fn expansion_matches_measures() {
        let lws = LadderWithSides { ladder: Ladder::new(vec![3, 2, 4]).unwrap(), first_side: PairSide::B };
        let sets = lws.expand_sets().unwrap();
        let (p, q) = lws.expand_measures().unwrap();
        let n = sets.n as i64;
        let to_measure = |s: &[u64]| DiscreteMeasure::uniform_on(s.iter().map(|&x| Rational::new(x as i64, n))).unwrap();
        assert_eq!(p, to_measure(&sets.a));
        assert_eq!(q, to_measure(&sets.b));
        assert_eq!(factor_uniform_pair(&p, &q).unwrap(), lws);
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_complementary_pairs(1).unwrap(), vec![pair(&[0], &[0], 1)]);
        let four = enumerate_complementary_pairs(4).unwrap();
        for expected in [
            pair(&[0, 1], &[0, 2], 4),
            pair(&[0, 1, 2, 3], &[0], 4),
            pair(&[0], &[0, 1, 2, 3], 4),
            pair(&[0, 2], &[0, 1], 4),
        ] {
            assert!(four.contains(&expected), "{expected:?}");
        }
        assert_eq!(four.len(), 4);
        for p in [2, 3, 5, 7, 11, 13] {
            assert_eq!(enumerate_complementary_pairs(p).unwrap().len(), 2);
        }
        assert!(enumerate_complementary_pairs(65).is_err());
        assert!(enumerate_complementary_pairs(64).is_ok());
    }

    #[test]
    fn symmetry_examples() {
        assert!(symmetry_check(&quarters(&[0, 1], 4)));
        let skew = DiscreteMeasure::from_atoms_1d([(Rational::zero(), Rational::new(1, 3)), (Rational::new(1, 2), Rational::new(2, 3))])
            .unwrap();
        assert!(!symmetry_check(&skew));
    }

    #[test]
    fn support_bound_examples() {
        assert!(support_bound_check(&quarters(&[-1, 1], 4), 2));
        assert!(support_bound_check(&quarters(&[-3, -1, 1, 3], 8), 1));
        assert!(!support_bound_check(&quarters(&[0, 1], 4), 2));
        assert!(!support_bound_check(&quarters(&[-1, 1], 4), 3));
        assert_eq!(centered(&quarters(&[0, 1, 2, 3], 4)).unwrap(), quarters(&[-3, -1, 1, 3], 8));
    }
}
