//! Fourier transforms `μ̂(ξ) = ∫ e^{−2πiξx} dμ(x)` of ladder factors and their products.
//!
//! This is the only floating-point part of the crate. Every truncated product
//! carries two error terms:
//!
//! * `tail_bound`: a multiplicative bound `B` on the factors left out, so the
//!   exact infinite product lies within `value · [1 − B, 1 + B]`. It comes from
//!   `|ν̂_j(ξ) − 1| ≤ π|ξ| / (N₁⋯N_{j−1})` summed over the omitted factors,
//!   with `B = exp(Σ) − 1`.
//! * `roundoff`: a first-order estimate of the floating-point error of the
//!   factors that were evaluated.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ladder::{Decomposition, FactorSpec, Ladder, Side};
use crate::measures::DiscreteMeasure;

pub type ComplexValue = Complex64;

/// Below this `|sin(πξ/(N₁⋯N_j))|` the closed form is replaced by direct summation.
pub const SINGULARITY_CUTOFF: f64 = 1e-8;
/// `|μ̂(m)|` below this counts as a zero.
pub const ZERO_EPS: f64 = 1e-8;
/// A non-zero must be certified above this.
pub const SEPARATION: f64 = 1e-6;

const EPS: f64 = f64::EPSILON;

/// Direct sum `Σ w e^{−2πiξx}` over the atoms, in sorted order.
pub fn ft_discrete(m: &DiscreteMeasure, xi: f64) -> Result<ComplexValue> {
    if m.dim() != 1 {
        return Err(Error::DimensionMismatch { left: 1, right: m.dim() });
    }
    Ok(m.atoms_1d()
        .map(|(x, w)| Complex64::from_polar(w.to_f64(), -2.0 * PI * xi * x.to_f64()))
        .sum())
}

/// Direct sum in `R^d` with `⟨ξ, x⟩` in the exponent.
pub fn ft_discrete_nd(m: &DiscreteMeasure, xi: &[f64]) -> Result<ComplexValue> {
    if m.dim() != xi.len() {
        return Err(Error::DimensionMismatch { left: m.dim(), right: xi.len() });
    }
    Ok(m.atoms()
        .iter()
        .map(|(p, w)| {
            let dot: f64 = p.iter().zip(xi).map(|(x, t)| x.to_f64() * t).sum();
            Complex64::from_polar(w.to_f64(), -2.0 * PI * dot)
        })
        .sum())
}

/// `ν̂_j(ξ)` together with a roundoff estimate.
fn factor_with_error(l: &Ladder, j: usize, xi: f64) -> Result<(Complex64, f64)> {
    let n = l.entry(j)? as f64;
    let coarse = l.prefix_product_f64(j - 1);
    let fine = coarse * n;
    let b = PI * xi / fine;
    let sin_b = b.sin();
    if sin_b.abs() < SINGULARITY_CUTOFF {
        // near a period of the factor: sum the atoms directly
        let count = l.entry(j)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..count {
            acc += Complex64::from_polar(1.0, -2.0 * PI * xi * (r as f64) / fine);
        }
        let value = acc / n;
        let err = 4.0 * EPS * (1.0 + 2.0 * PI * xi.abs() / coarse) + n * EPS;
        return Ok((value, err));
    }
    let a = PI * xi / coarse;
    let c = PI * (n - 1.0) * xi / fine;
    let real = a.sin() / (n * sin_b);
    let value = Complex64::from_polar(1.0, -c) * real;
    let r = real.abs();
    // arguments carry relative error, so sin(x(1+δ)) is off by about |x|δ + ε|sin x|
    let sin_a = a.sin().abs();
    let err = 4.0
        * EPS
        * ((a.abs() + sin_a) / (n * sin_b.abs()) + r * (b.abs() + sin_b.abs()) / sin_b.abs() + r * (1.0 + c.abs()));
    Ok((value, err))
}

/// Closed form of `ν̂_j(ξ)`:
/// `e^{−πi(N_j−1)ξ/(N₁⋯N_j)} · sin(πξ/(N₁⋯N_{j−1})) / (N_j sin(πξ/(N₁⋯N_j)))`,
/// falling back to the atom sum at removable singularities.
pub fn ft_factor(l: &Ladder, j: usize, xi: f64) -> Result<ComplexValue> {
    factor_with_error(l, j, xi).map(|(v, _)| v)
}

/// Transform of the normalized Lebesgue measure on `[0, 1/p]`.
pub fn ft_segment(p: f64, xi: f64) -> ComplexValue {
    let t = PI * xi / p;
    if t.abs() < 1e-300 {
        return Complex64::new(1.0, 0.0);
    }
    Complex64::from_polar(1.0, -t) * (t.sin() / t)
}

/// A truncated infinite product with its error terms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Truncated {
    pub value: ComplexValue,
    /// Multiplicative bound on the omitted factors.
    pub tail_bound: f64,
    /// Estimated floating-point error of `value`.
    pub roundoff: f64,
}

impl Truncated {
    /// Bound on `|exact − value|`.
    pub fn abs_bound(&self) -> f64 {
        self.value.norm() * self.tail_bound + self.roundoff * (1.0 + self.tail_bound)
    }
}

/// Contribution `π|ξ|/(N₁⋯N_{idx−1})` of every omitted side factor, with indices
/// past the stored ladder bounded for any continuation with entries `≥ 2`.
fn omitted_sum(l: &Ladder, side: Side, first_missing: usize, xi: f64) -> f64 {
    let len = l.len();
    let mut s = 0.0;
    let mut j = first_missing;
    loop {
        let idx = side.ladder_index(j);
        if idx > len {
            // geometric tail: P_{idx−1} ≥ P_len · 2^{idx−1−len}, indices step by 2
            let p_len = l.prefix_product_f64(len);
            let scale = 2f64.powi((idx - 1 - len) as i32);
            s += PI * xi.abs() / (p_len * scale) * (4.0 / 3.0);
            break;
        }
        s += PI * xi.abs() / l.prefix_product_f64(idx - 1);
        j += 1;
    }
    s
}

/// Product of the first `K` side factors of `spec` at `ξ`, with a bound on the rest.
///
/// For a Type I spec the side has finitely many factors; once `K` covers them
/// the result is exact up to roundoff, including the closed-form Lebesgue tail
/// on the tail side.
pub fn ft_truncated_product(spec: &FactorSpec, k: usize, xi: f64) -> Result<Truncated> {
    let l = spec.ladder();
    let side = spec.side();
    let available = spec.side_count();
    let take = match spec.decomposition() {
        Decomposition::TypeI => k.min(spec.level()),
        Decomposition::TypeII => k.min(available),
    };
    let mut value = Complex64::new(1.0, 0.0);
    let mut roundoff = 0.0;
    for j in 1..=take {
        let (v, e) = factor_with_error(l, side.ladder_index(j), xi)?;
        value *= v;
        roundoff += e + 2.0 * EPS;
    }
    let omitted = match spec.decomposition() {
        Decomposition::TypeI => {
            let tail_len = l.prefix_product_f64(l.len());
            let mut s: f64 = (take + 1..=spec.level())
                .map(|j| PI * xi.abs() / l.prefix_product_f64(side.ladder_index(j) - 1))
                .sum();
            if spec.has_tail() {
                if k >= spec.level() {
                    value *= ft_segment(tail_len, xi);
                    roundoff += 4.0 * EPS * (1.0 + PI * xi.abs() / tail_len);
                } else {
                    s += PI * xi.abs() / tail_len;
                }
            }
            s
        }
        Decomposition::TypeII => omitted_sum(l, side, take + 1, xi),
    };
    Ok(Truncated { value, tail_bound: omitted.exp_m1(), roundoff })
}

/// Product of the first `k` discrete side factors only, ignoring any Lebesgue
/// tail and making no statement about the omitted factors.
pub fn ft_side_factors(spec: &FactorSpec, k: usize, xi: f64) -> Result<Truncated> {
    let mut value = Complex64::new(1.0, 0.0);
    let mut roundoff = 0.0;
    for idx in spec.side_indices(k)? {
        let (v, e) = factor_with_error(spec.ladder(), idx, xi)?;
        value *= v;
        roundoff += e + 2.0 * EPS;
    }
    Ok(Truncated { value, tail_bound: 0.0, roundoff })
}

/// Integers in `[−W, W]` where `ν̂_n` vanishes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroSetWindow {
    pub window: u64,
    pub members: Vec<i64>,
}

/// `Z(ν̂_n) ∩ [−W, W]`: multiples of `N₁⋯N_{n−1}` that are not multiples of `N₁⋯N_n`.
pub fn zero_set_factor(l: &Ladder, n: usize, w: u64) -> Result<ZeroSetWindow> {
    let entry = l.entry(n)?;
    let mut members = Vec::new();
    if let Some(step) = l.prefix_product(n - 1).filter(|&s| s <= w) {
        let reach = (w / step) as i64;
        for t in -reach..=reach {
            if t.rem_euclid(entry as i64) != 0 {
                members.push(t * step as i64);
            }
        }
    }
    Ok(ZeroSetWindow { window: w, members })
}

/// Largest `i ≤ |l|` with `N₁⋯N_i | m`.
pub(crate) fn divisibility_depth(l: &Ladder, m: i64) -> usize {
    let mut depth = 0;
    let mut rest = m.unsigned_abs();
    for &n in l.entries() {
        if !rest.is_multiple_of(n) {
            break;
        }
        rest /= n;
        depth += 1;
    }
    depth
}

/// Exact test for `spec`'s transform vanishing at the integer `m`, considering
/// the first `k` side factors and, for the tail side of a Type I pair, the
/// Lebesgue tail.
pub fn structural_zero(spec: &FactorSpec, k: usize, m: i64) -> bool {
    if m == 0 {
        return false;
    }
    let l = spec.ladder();
    let depth = divisibility_depth(l, m);
    if depth == l.len() {
        // every factor is 1 here; only the Lebesgue tail can vanish
        return spec.has_tail() && k >= spec.level();
    }
    // m ∈ Z(ν̂_{depth+1}) and no other factor
    let idx = depth + 1;
    let side_of_idx = if idx % 2 == 1 { Side::Odd } else { Side::Even };
    side_of_idx == spec.side() && idx <= spec.side().ladder_index(k.max(1)) && k > 0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Class {
    Zero,
    NonZero,
}

fn classify(t: &Truncated, m: i64, eps: f64) -> Result<Class> {
    let v = t.value.norm();
    let bound = t.abs_bound();
    if v + bound < eps {
        Ok(Class::Zero)
    } else if v - bound > SEPARATION.max(eps) {
        Ok(Class::NonZero)
    } else {
        Err(Error::AmbiguousZero { m, value: v, bound })
    }
}

/// For each integer `1 ≤ |m| ≤ W`, checks that exactly one of the two
/// transforms vanishes, numerically (below `eps`, with every non-zero
/// certified above [`SEPARATION`]) and structurally, and that both agree.
///
/// All factors available in the ladder are used. An `AmbiguousZero` error
/// means the ladder is too short to resolve some `m`.
pub fn check_zero_partition(spec_a: &FactorSpec, spec_b: &FactorSpec, w: u64, eps: f64) -> Result<bool> {
    if !spec_a.is_complement_of(spec_b) {
        return Err(Error::NotComplementary("specs do not come from one ladder".into()));
    }
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidTolerance(eps));
    }
    let w = i64::try_from(w).map_err(|_| Error::Overflow(format!("window {w}")))?;
    let ka = spec_a.level().max(spec_a.side_count());
    let kb = spec_b.level().max(spec_b.side_count());
    for m in (1..=w).flat_map(|m| [m, -m]) {
        let ta = ft_truncated_product(spec_a, ka, m as f64)?;
        let tb = ft_truncated_product(spec_b, kb, m as f64)?;
        let ca = classify(&ta, m, eps)?;
        let cb = classify(&tb, m, eps)?;
        if (ca == Class::Zero) == (cb == Class::Zero) {
            return Ok(false);
        }
        if (ca == Class::Zero) != structural_zero(spec_a, ka, m) || (cb == Class::Zero) != structural_zero(spec_b, kb, m)
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Lower bound `c` on the squared tail products of a Type II factor:
/// `∏_j (1 − (3π²/32)·(1/2^{2j−2})²)²`, the worst case over all ladders
/// (every entry equal to 2), evaluated until the remaining factors can change
/// the result by less than `tol`.
pub fn compute_c(spec: &FactorSpec, tol: f64) -> Result<f64> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidTolerance(tol));
    }
    if spec.decomposition() != Decomposition::TypeII {
        return Err(Error::InvalidSpec("the tail constant applies to Type II factors".into()));
    }
    Ok(c_partial_products(tol).last().copied().unwrap_or(1.0))
}

/// Partial products of the constant `c`, one per factor, until the tail
/// correction drops below `tol`.
pub fn c_partial_products(tol: f64) -> Vec<f64> {
    let a = 3.0 * PI * PI / 32.0;
    let mut out = Vec::new();
    let mut p = 1.0;
    for j in 1..=64 {
        let t = a / 16f64.powi(j - 1);
        p *= (1.0 - t) * (1.0 - t);
        out.push(p);
        // 1 − ∏_{i>j}(1 − t_i)² ≤ 2 Σ_{i>j} t_i = 2 t_{j+1} · 16/15
        let correction = p * 2.0 * (t / 16.0) * (16.0 / 15.0);
        if correction < tol {
            break;
        }
    }
    out
}

/// `sin(πξ)/(πξ)` with the removable singularity filled in.
pub fn sinc(xi: f64) -> f64 {
    if xi == 0.0 {
        1.0
    } else {
        (PI * xi).sin() / (PI * xi)
    }
}

/// Residual of the identity `μ̂ · ν̂ = sin(πξ)/(πξ)` for a complementary pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub xi: f64,
    pub residual: f64,
    pub bound: f64,
}

/// `|μ̂_K(ξ) ν̂_K(ξ) e^{πiξ} − sin(πξ)/(πξ)|`.
///
/// The phase `e^{πiξ}` recentres `L_[0,1]` to `L_[−1/2,1/2]`, whose transform is
/// the real sinc. For Type I pairs the closed-form Lebesgue tail is included
/// once `K` covers the discrete factors.
pub fn sinc_identity_residual(spec_a: &FactorSpec, spec_b: &FactorSpec, k: usize, xi: f64) -> Result<Residual> {
    if !spec_a.is_complement_of(spec_b) {
        return Err(Error::NotComplementary("specs do not come from one ladder".into()));
    }
    let ta = ft_truncated_product(spec_a, k, xi)?;
    let tb = ft_truncated_product(spec_b, k, xi)?;
    let product = ta.value * tb.value * Complex64::from_polar(1.0, PI * xi);
    let target = sinc(xi);
    let residual = (product - target).norm();
    let (ea, eb) = (ta.abs_bound(), tb.abs_bound());
    let bound = ta.value.norm() * eb + (tb.value.norm() + eb) * ea + 8.0 * EPS * (1.0 + PI * xi.abs());
    Ok(Residual { xi, residual, bound })
}

/// One row of a transform grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FtRow {
    pub xi: f64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    pub bound: f64,
}

pub fn ft_row(spec: &FactorSpec, k: usize, xi: f64) -> Result<FtRow> {
    let t = ft_truncated_product(spec, k, xi)?;
    Ok(FtRow { xi, re: t.value.re, im: t.value.im, abs: t.value.norm(), bound: t.abs_bound() })
}
