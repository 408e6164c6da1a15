//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use specforge_core::factorizer::{
    enumerate_complementary_pairs, factor_sets, factor_uniform_pair, PairSide, SetPair,
};
use specforge_core::fourier::{
    c_partial_products, check_zero_partition, compute_c, ft_truncated_product, sinc_identity_residual,
    SEPARATION, ZERO_EPS,
};
use specforge_core::ladder::{approximant, canonicalize, labelled_measure, nu_factor, Assignment};
use specforge_core::measures::{self, is_uniform_on_grid, is_uniform_on_product_grid};
use specforge_core::spectra::{
    direct_sum, exhaustion_interval, gram_check_numeric, gram_check_structural, lambda_k, product_spectrum,
    q_function, tiling_check, type1_spectrum_tail_side,
};
use specforge_core::tiling::{assemble, extract_translates, product_pair, verify_marginal_factorization, GridMask, TranslateSystem};
use specforge_core::{Decomposition, DiscreteMeasure, FactorSpec, Ladder, Side};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type Visit<'a, S> = dyn FnMut(&[u64], &S) -> Result<S, String> + 'a;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($arg)+));
        }
    };
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

/// Calls `visit` on every non-empty ladder with entries from `entries` and product at most `max`,
/// in depth-first order, passing the running prefix state.
fn walk<S>(entries: &[u64], max: u64, prefix: &mut Vec<u64>, state: &S, visit: &mut Visit<S>) -> Result<(), String> {
    let product: u64 = prefix.iter().product();
    for &n in entries {
        if product * n > max {
            continue;
        }
        prefix.push(n);
        let next = visit(prefix, state)?;
        walk(entries, max, prefix, &next, visit)?;
        prefix.pop();
    }
    Ok(())
}

fn family<F: FnMut(&[u64]) -> Result<(), String>>(entries: &[u64], max: u64, mut f: F) -> Result<(), String> {
    walk(entries, max, &mut Vec::new(), &(), &mut |p, _| f(p))
}

fn lad(v: &[u64]) -> Ladder {
    Ladder::new(v.to_vec()).unwrap()
}

fn cantor_pair(len: usize) -> (FactorSpec, FactorSpec) {
    FactorSpec::pair(Ladder::constant(2, len).unwrap(), Decomposition::TypeII, None, None).unwrap()
}

fn criterion_1() -> Outcome {
    let mut count = 0usize;
    walk(&[2, 3, 4, 5], 4096, &mut Vec::new(), &DiscreteMeasure::dirac(1), &mut |prefix, acc| {
        let l = lad(prefix);
        let next = measures::convolve(acc, &nu_factor(&l, prefix.len()).map_err(err)?).map_err(err)?;
        let total: u64 = prefix.iter().product();
        ensure!(is_uniform_on_grid(&next, total), "ladder {prefix:?}: convolution is not uniform");
        // independent oracle: every atom j/total with weight exactly 1/total
        let w = specforge_core::Rational::new(1, total as i64);
        ensure!(
            next.atoms_1d().enumerate().all(|(j, (x, v))| *v == w
                && x.as_i64_pair().is_some_and(|(n, d)| n as i128 * total as i128 == j as i128 * d as i128)),
            "ladder {prefix:?}: atom mismatch"
        );
        count += 1;
        Ok(next)
    })?;
    Ok(format!("{count} ladders"))
}

fn criterion_2() -> Outcome {
    // Λ_k and the level-k approximant depend only on the ladder prefix that ends
    // at the k-th factor of the side, so each (ladder, side, level) is checked
    // once, at the prefix whose newest entry is that factor.
    let mut checks = 0usize;
    let base = cantor_pair(2).0;
    ensure!(gram_check_structural(&base, 0, &lambda_k(&base, 0).map_err(err)?).map_err(err)?, "level 0");
    family(&[2, 3, 4, 5], 4096, |prefix| {
        let l = lad(prefix);
        let len = prefix.len();
        let side = if len % 2 == 1 { Side::Odd } else { Side::Even };
        let k = side.count_in(len);
        let spec = FactorSpec::type_two(l, side, k).map_err(err)?;
        let s = lambda_k(&spec, k).map_err(err)?;
        let expected: u64 = prefix.iter().skip(if side == Side::Odd { 0 } else { 1 }).step_by(2).product();
        ensure!(s.len() as u64 == expected, "{prefix:?}: |Λ| = {}", s.len());
        ensure!(gram_check_structural(&spec, k, &s).map_err(err)?, "{prefix:?}: structural check failed");
        let m = approximant(&spec, k).map_err(err)?;
        ensure!(gram_check_numeric(&m, &s, 1e-10).map_err(err)?, "{prefix:?}: numeric Gram check failed");
        checks += 1;
        Ok(())
    })?;
    Ok(format!("{checks} (ladder, side, level) spectra"))
}

fn criterion_3() -> Outcome {
    let mut type1 = 0usize;
    let mut type2 = 0usize;
    family(&[2, 3, 4, 5], 4096, |prefix| {
        let l = lad(prefix);
        let len = prefix.len();
        if len % 2 == 0 {
            for tail in [Side::Odd, Side::Even] {
                let (odd, even) = FactorSpec::pair(l.clone(), Decomposition::TypeI, Some(tail), None).map_err(err)?;
                let (plain, tailed) = if tail == Side::Odd { (even, odd) } else { (odd, even) };
                let a = lambda_k(&plain, plain.level()).map_err(err)?;
                let b = type1_spectrum_tail_side(&tailed).map_err(err)?;
                ensure!(tiling_check(&a, &b, 0, false).map_err(err)?, "{prefix:?}: Type I residue cover fails");
                // oracle: every residue mod P hit exactly once
                let p = b.period().unwrap() as i64;
                let mut hits = vec![0u32; p as usize];
                for x in a.values().unwrap() {
                    for y in b.values().unwrap() {
                        hits[(x + y).rem_euclid(p) as usize] += 1;
                    }
                }
                ensure!(hits.iter().all(|&h| h == 1), "{prefix:?}: residue oracle disagrees");
                type1 += 1;
            }
        }
        if len >= 2 {
            let (odd, even) = FactorSpec::pair(l.clone(), Decomposition::TypeII, None, None).map_err(err)?;
            let a = lambda_k(&odd, odd.level()).map_err(err)?;
            let b = lambda_k(&even, even.level()).map_err(err)?;
            let Some((lo, hi)) = exhaustion_interval(&l, len).map_err(err)? else {
                return Err(format!("{prefix:?}: signed digit sum is not an interval"));
            };
            let neg_b: Vec<i64> = b.values().unwrap().iter().map(|x| -x).collect();
            let sums = direct_sum(&a.values().unwrap(), &neg_b).map_err(err)?;
            ensure!(sums == (lo..=hi).collect::<Vec<_>>(), "{prefix:?}: Λ_μ ⊕ (−Λ_ν) differs from [{lo}, {hi}]");
            let w = (-lo).min(hi).max(0) as u64;
            ensure!(tiling_check(&a, &b, w, true).map_err(err)?, "{prefix:?}: window {w} not tiled");
            let (plo, phi) = exhaustion_interval(&l, len - 1).map_err(err)?.unwrap();
            ensure!(lo <= plo && phi <= hi && (lo, hi) != (plo, phi), "{prefix:?}: window did not grow");
            type2 += 1;
        }
        Ok(())
    })?;
    let l = Ladder::constant(2, 6).unwrap();
    ensure!(exhaustion_interval(&l, 2).map_err(err)? == Some((-2, 1)), "all-2 window is not {{-2,-1,0,1}}");
    Ok(format!("{type1} Type I and {type2} Type II pairs"))
}

fn criterion_4() -> Outcome {
    let (a, b) = cantor_pair(80);
    let mut worst_residual: f64 = 0.0;
    let mut worst_bound: f64 = 0.0;
    for i in 0..1000 {
        let xi = -10.0 + 20.0 * i as f64 / 999.0;
        let r = sinc_identity_residual(&a, &b, 40, xi).map_err(err)?;
        ensure!(r.residual <= r.bound, "ξ = {xi}: residual {:e} above bound {:e}", r.residual, r.bound);
        ensure!(r.bound < 1e-9, "ξ = {xi}: bound {:e}", r.bound);
        // oracle: centred sinc computed independently
        let sinc = if xi == 0.0 { 1.0 } else { (PI * xi).sin() / (PI * xi) };
        let ta = ft_truncated_product(&a, 40, xi).map_err(err)?;
        let tb = ft_truncated_product(&b, 40, xi).map_err(err)?;
        let direct = (ta.value * tb.value * num_complex::Complex64::from_polar(1.0, PI * xi) - sinc).norm();
        ensure!((direct - r.residual).abs() < 1e-15, "ξ = {xi}: residual mismatch");
        worst_residual = worst_residual.max(r.residual);
        worst_bound = worst_bound.max(r.bound);
    }
    Ok(format!("max residual {worst_residual:.2e}, max bound {worst_bound:.2e}"))
}

fn criterion_5() -> Outcome {
    let (a, b) = cantor_pair(60);
    ensure!(check_zero_partition(&a, &b, 4096, ZERO_EPS).map_err(err)?, "partition fails");
    let mut min_nonzero = f64::INFINITY;
    let mut max_zero: f64 = 0.0;
    for m in (1..=4096i64).flat_map(|m| [m, -m]) {
        let va = ft_truncated_product(&a, 30, m as f64).map_err(err)?.value.norm();
        let vb = ft_truncated_product(&b, 30, m as f64).map_err(err)?.value.norm();
        // oracle: ν̂_j vanishes at m exactly when the 2-adic valuation of m is j − 1
        let a_zero = m.trailing_zeros() % 2 == 0;
        let (z, nz) = if a_zero { (va, vb) } else { (vb, va) };
        ensure!(z < ZERO_EPS && nz > SEPARATION, "m = {m}: zero {z:e}, non-zero {nz:e}");
        max_zero = max_zero.max(z);
        min_nonzero = min_nonzero.min(nz);
    }
    Ok(format!("largest zero {max_zero:.1e}, smallest non-zero {min_nonzero:.2e}"))
}

fn criterion_6() -> Outcome {
    let (odd, _) = cantor_pair(48);
    let grid: Vec<f64> = (0..101).map(|j| (j as f64 - 50.0) / 101.0).collect();
    let spectra: Vec<_> = (1..=6).map(|k| lambda_k(&odd, k)).collect::<Result<_, _>>().map_err(err)?;
    let mut worst_gap: f64 = 0.0;
    for &xi in &grid {
        let q: Vec<_> = spectra.iter().map(|s| q_function(&odd, s, 24, xi)).collect::<Result<_, _>>().map_err(err)?;
        for (k, w) in q.windows(2).enumerate() {
            ensure!(w[1].value >= w[0].value - (w[0].bound + w[1].bound), "ξ = {xi}: Q_{} < Q_{}", k + 2, k + 1);
        }
        for (k, v) in q.iter().enumerate() {
            ensure!(v.value <= 1.0 + v.bound, "ξ = {xi}: Q_{} = {} above 1", k + 1, v.value);
        }
        if xi == 0.0 {
            for v in &q {
                ensure!((v.value - 1.0).abs() <= v.bound, "Q(0) = {}", v.value);
            }
        }
        let (q1, q6) = (q[0], q[5]);
        let slack = q1.bound + q6.bound;
        ensure!(1.0 - q6.value <= 1.0 - q1.value + slack, "ξ = {xi}: 1 − Q₆ exceeds 1 − Q₁");
        if 1.0 - q1.value > slack {
            ensure!(1.0 - q6.value < 1.0 - q1.value, "ξ = {xi}: 1 − Q₆ not below 1 − Q₁");
        }
        worst_gap = worst_gap.max(1.0 - q6.value);
    }
    Ok(format!("max 1 − Q₆ = {worst_gap:.3e}"))
}

fn criterion_7() -> Outcome {
    let spec = cantor_pair(4).0;
    let c = compute_c(&spec, 1e-12).map_err(err)?;
    ensure!(c > 0.0 && c < 1.0, "c = {c}");
    let first = c_partial_products(1e-12)[0];
    let expected = (1.0 - 3.0 * PI * PI / 32.0).powi(2);
    ensure!((first - expected).abs() < 1e-12, "first factor {first} vs {expected}");
    // oracle: long product, far past where the factors differ from one
    let mut long = 1.0f64;
    for j in 0..200 {
        long *= (1.0 - 3.0 * PI * PI / (32.0 * 16f64.powi(j))).powi(2);
    }
    ensure!((c - long).abs() < 1e-12, "c = {c} vs long product {long}");
    ensure!((c - 4.92e-3).abs() < 5e-6, "c = {c} not near 4.92e-3");
    Ok(format!("c = {c:.6e}"))
}

fn sets_oracle(sp: &SetPair) -> bool {
    let mut hit = vec![0u32; sp.n as usize];
    for &x in &sp.a {
        for &y in &sp.b {
            if x + y >= sp.n {
                return false;
            }
            hit[(x + y) as usize] += 1;
        }
    }
    hit.iter().all(|&h| h == 1)
}

fn criterion_8() -> Outcome {
    let mut total = 0usize;
    for n in 1..=48u64 {
        let pairs = enumerate_complementary_pairs(n).map_err(err)?;
        let prime = n > 1 && (2..n).all(|d| n % d != 0);
        if prime {
            ensure!(pairs.len() == 2, "n = {n}: {} pairs for a prime", pairs.len());
        }
        for sp in &pairs {
            ensure!(sets_oracle(sp), "n = {n}: {sp:?} is not a complementary pair");
            let lws = factor_sets(sp).map_err(err)?;
            ensure!(lws.ladder.entries().iter().product::<u64>() == n, "n = {n}: ladder product");
            let back = lws.expand_sets().map_err(err)?;
            ensure!(back == *sp, "n = {n}: {sp:?} re-expands to {back:?}");
        }
        total += pairs.len();
    }
    Ok(format!("{total} pairs for n ≤ 48"))
}

fn criterion_9() -> Outcome {
    let mut runs = 0usize;
    let entries: Vec<u64> = (2..=256).collect();
    family(&entries, 256, |prefix| {
        let l = lad(prefix);
        for first in [Side::Odd, Side::Even] {
            let a = Assignment::alternating(first, prefix.len());
            let canon = canonicalize(&l, &a).map_err(err)?;
            let p = labelled_measure(&l, &a, Side::Odd).map_err(err)?;
            let q = labelled_measure(&l, &a, Side::Even).map_err(err)?;
            let lws = factor_uniform_pair(&p, &q).map_err(err)?;
            ensure!(lws.coarsest_first() == canon.ladder, "{prefix:?}/{first:?}: got {:?}", lws.coarsest_first());
            let coarse = if first == Side::Odd { PairSide::A } else { PairSide::B };
            ensure!(lws.coarsest_side() == coarse, "{prefix:?}/{first:?}: coarsest factor on the wrong side");
            runs += 1;
        }
        Ok(())
    })?;
    Ok(format!("{runs} labelled ladders"))
}

fn criterion_10() -> Outcome {
    let mask = |m, bits| GridMask::from_bits(m, bits).unwrap();
    let t = extract_translates(&mask(1, "1"), &mask(1, "1")).map_err(err)?;
    ensure!(t.shifts() == [0] && t.count() == 1, "example 1: {t:?}");
    let t = extract_translates(&mask(1, "101"), &mask(1, "1111")).map_err(err)?;
    ensure!(t.shifts() == [0, 1] && t.count() == 2, "example 2: {t:?}");
    ensure!(extract_translates(&mask(2, "11"), &mask(2, "111")).is_err(), "example 3 should fail");

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut done = 0;
    while done < 100 {
        let m = rng.gen_range(1..=8u64);
        let width = rng.gen_range(1..=12usize);
        let mut cells: Vec<bool> = (0..width).map(|_| rng.gen_bool(0.5)).collect();
        cells[rng.gen_range(0..width)] = true;
        let omega = GridMask::new(m, cells).unwrap();
        let shape = omega.indices();
        let mut used = [false; 64];
        let mut shifts = Vec::new();
        for s in 0..64i64 {
            let fits = shape.iter().all(|&j| {
                let c = j as i64 + s;
                c < 64 && !used[c as usize]
            });
            if fits && rng.gen_bool(0.4) {
                shape.iter().for_each(|&j| used[j + s as usize] = true);
                shifts.push(s);
            }
        }
        if shifts.is_empty() {
            continue;
        }
        let system = TranslateSystem::new(m, shifts).unwrap();
        let q = assemble(&omega, &system).map_err(err)?;
        ensure!(q.cells().len() <= 64, "Q longer than 64 cells");
        let found = extract_translates(&omega, &q).map_err(err)?;
        ensure!(found == system, "round trip {system:?} → {found:?}");
        ensure!(found.count() * omega.count() == q.count(), "cell count identity");
        done += 1;
    }
    Ok("3 examples and 100 random tilings".into())
}

fn criterion_11() -> Outcome {
    let (s, t) = cantor_pair(4);
    let (mu, nu) = product_pair(&[s.clone(), s], &[t.clone(), t], 2).map_err(err)?;
    ensure!(mu.len() == 16 && nu.len() == 16, "approximant sizes {} and {}", mu.len(), nu.len());
    let c = measures::convolve(&mu, &nu).map_err(err)?;
    ensure!(is_uniform_on_product_grid(&c, &[16, 16]), "convolution is not uniform on the 16×16 grid");
    ensure!(verify_marginal_factorization(&mu, &nu, &[16, 16]), "marginal identity fails");

    let (odd, even) = cantor_pair(6);
    let la = lambda_k(&odd, 3).map_err(err)?;
    let lb = lambda_k(&even, 3).map_err(err)?;
    let sa = product_spectrum(&[la.clone(), la]).map_err(err)?;
    let sb = product_spectrum(&[lb.clone(), lb]).map_err(err)?;
    ensure!(tiling_check(&sa, &sb, 20, true).map_err(err)?, "product spectra do not tile [−20, 20]²");
    // oracle: count representations of every window point directly
    for x in -20i64..=20 {
        for y in -20i64..=20 {
            let reps = sa
                .base()
                .iter()
                .flat_map(|p| sb.base().iter().map(move |q| (p[0] - q[0], p[1] - q[1])))
                .filter(|&r| r == (x, y))
                .count();
            ensure!(reps == 1, "({x}, {y}) has {reps} representations");
        }
    }
    Ok("16×16 grid, window [−20, 20]²".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("exact factorization identity", criterion_1),
        ("spectral certificates", criterion_2),
        ("spectra tile Z", criterion_3),
        ("sinc identity", criterion_4),
        ("zero-set partition", criterion_5),
        ("Q behaviour", criterion_6),
        ("constant c", criterion_7),
        ("set-pair round trip", criterion_8),
        ("measure-pair round trip", criterion_9),
        ("translate extraction", criterion_10),
        ("two-dimensional products", criterion_11),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("{} of 11 criteria passed in {:.1}s", 11 - failed, start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
