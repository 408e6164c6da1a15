use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use specforge_core::factorizer::{self, SetPair};
use specforge_core::fourier::{self, ZERO_EPS};
use specforge_core::ladder::{approximant, verify_pair};
use specforge_core::measures::{self, is_uniform_on_grid};
use specforge_core::spectra::{self, QValue, Spectrum};
use specforge_core::tiling::{self, TranslateSystem};
use specforge_core::{Decomposition, DiscreteMeasure, Error, FactorSpec, Side};

use crate::input;
use crate::report::RunReport;
use crate::{Global, SpecArgs};

const MAX_GRID: usize = 1_000_000;

fn build_pair(report: &mut RunReport, g: &Global, args: &SpecArgs) -> Result<(FactorSpec, FactorSpec)> {
    let ladder = input::parse_ladder(&args.ladder)?;
    let kind: Decomposition = args.kind.parse()?;
    let tail = args.tail.as_deref().map(str::parse::<Side>).transpose()?;
    report.input("ladder", &ladder);
    report.input("type", kind);
    report.input("tail", tail);
    report.input("level", args.level);
    let product = input::check_size(&ladder, g.max_n)?;
    report.input("product", product);
    Ok(FactorSpec::pair(ladder, kind, tail, args.level)?)
}

fn pick(side: Side, odd: FactorSpec, even: FactorSpec) -> FactorSpec {
    match side {
        Side::Odd => odd,
        Side::Even => even,
    }
}

/// `ξ_j = (j − (G−1)/2)/G`, `j = 0, …, G−1`: `G` points symmetric about 0 in `(−1/2, 1/2)`.
fn xi_grid(g: &Global) -> Result<Vec<f64>> {
    if g.grid == 0 || g.grid > MAX_GRID {
        bail!("grid size must be in 1..={MAX_GRID}, got {}", g.grid);
    }
    let n = g.grid as f64;
    Ok((0..g.grid).map(|j| (j as f64 - (n - 1.0) / 2.0) / n).collect())
}

fn check_tol(g: &Global) -> Result<()> {
    if g.tol.is_nan() || g.tol <= 0.0 {
        bail!("tolerance must be positive, got {}", g.tol);
    }
    Ok(())
}

/// Ladder index up to which the two discrete parts together use every factor.
fn joint_depth(odd: &FactorSpec, even: &FactorSpec) -> Option<usize> {
    (odd.level() == even.level() || odd.level() == even.level() + 1).then(|| odd.level() + even.level())
}

pub fn decompose(report: &mut RunReport, g: &Global, args: &SpecArgs) -> Result<()> {
    let (odd, even) = build_pair(report, g, args)?;
    let ladder = odd.ladder().clone();
    let mut parts = Vec::new();
    for spec in [&odd, &even] {
        let measure = approximant(spec, spec.level())?;
        let tail = spec
            .has_tail()
            .then(|| format!("1/{}", ladder.total_product().expect("size checked")));
        parts.push(json!({
            "side": spec.side(),
            "spec": spec,
            "measure": measure,
            "lebesgue_tail": tail,
            "spectrum": spectra::factor_spectrum(spec)?,
        }));
        report.output(spec.side().name(), &parts[parts.len() - 1]);
    }
    report.check("verify_pair", verify_pair(&ladder), "ν₁ ∗ ⋯ ∗ ν_L is uniform on the ladder grid");
    if let Some(depth) = joint_depth(&odd, &even) {
        let mu = approximant(&odd, odd.level())?;
        let nu = approximant(&even, even.level())?;
        let grid = ladder.prefix_product(depth).expect("size checked");
        let uniform = is_uniform_on_grid(&measures::convolve(&mu, &nu)?, grid);
        report.check("discrete_product", uniform, format!("discrete parts convolve to the uniform measure on 1/{grid}"));
    }
    Ok(())
}

pub fn verify(
    report: &mut RunReport,
    g: &Global,
    args: &SpecArgs,
    spectrum_file: Option<&Path>,
    spectrum_side: &str,
) -> Result<()> {
    let (odd, even) = build_pair(report, g, args)?;
    check_tol(g)?;
    let xs = xi_grid(g)?;
    report.input("window", g.window);
    report.input("grid", g.grid);
    report.input("trunc", g.trunc);
    report.input("tol", g.tol);
    let mut spectra = [spectra::factor_spectrum(&odd)?, spectra::factor_spectrum(&even)?];
    if let Some(path) = spectrum_file {
        let side: Side = spectrum_side.parse()?;
        let s: Spectrum = serde_json::from_str(&input::read(path)?)
            .with_context(|| format!("bad spectrum in {}", path.display()))?;
        if s.dim() != 1 {
            bail!("spectrum file must be one-dimensional, got dimension {}", s.dim());
        }
        if s.len() as u64 > g.max_n || s.period().is_some_and(|p| p > g.max_n) {
            bail!("spectrum file exceeds SPECFORGE_MAX_N = {}", g.max_n);
        }
        report.input("spectrum_file", path.display().to_string());
        report.input("spectrum_side", side);
        spectra[usize::from(side == Side::Even)] = s;
    }
    report.output("spectra", json!({ "odd": spectra[0], "even": spectra[1] }));

    report.check("verify_pair", verify_pair(odd.ladder()), "ν₁ ∗ ⋯ ∗ ν_L is uniform on the ladder grid");
    for (spec, s) in [&odd, &even].into_iter().zip(&spectra) {
        gram_checks(report, g, spec, s);
    }
    zero_partition(report, g, &odd, &even);
    tiling_checks(report, g, &odd, &even, &spectra);
    for (spec, s) in [&odd, &even].into_iter().zip(&spectra) {
        q_checks(report, g, spec, s, &xs);
    }
    Ok(())
}

fn record(report: &mut RunReport, name: &str, outcome: Result<bool, Error>, detail: &str) {
    match outcome {
        Ok(ok) => report.check(name, ok, detail),
        Err(e) => report.check(name, false, e.to_string()),
    };
}

fn gram_checks(report: &mut RunReport, g: &Global, spec: &FactorSpec, s: &Spectrum) {
    let side = spec.side().name();
    let base = s.values().and_then(Spectrum::finite);
    let base = match base {
        Ok(b) => b,
        Err(e) => {
            report.check(&format!("gram_structural[{side}]"), false, e.to_string());
            return;
        }
    };
    record(
        report,
        &format!("gram_structural[{side}]"),
        spectra::gram_check_structural(spec, spec.level(), &base),
        "every difference of the base is a zero of a side factor and the size matches",
    );
    let numeric = approximant(spec, spec.level()).and_then(|m| spectra::gram_check_numeric(&m, &base, g.tol));
    record(report, &format!("gram_numeric[{side}]"), numeric, "off-diagonal Gram entries of the discrete part below tol");
    if let Some(period) = s.period() {
        let expected = spec.ladder().total_product().expect("size checked");
        let ok = spec.has_tail() && period == expected;
        let detail = if spec.has_tail() {
            format!("lattice period {period}, Lebesgue tail needs {expected}")
        } else {
            format!("periodic spectrum on the {side} side, which has no Lebesgue tail")
        };
        report.check(&format!("lattice[{side}]"), ok, detail);
    }
}

fn zero_partition(report: &mut RunReport, g: &Global, odd: &FactorSpec, even: &FactorSpec) {
    if g.window == 0 {
        report.warn("zero_partition", "window 0: nothing to check");
        return;
    }
    record(
        report,
        "zero_partition",
        fourier::check_zero_partition(odd, even, g.window, ZERO_EPS),
        &format!("each m in [−{0}, {0}] \\ {{0}} is a zero of exactly one factor", g.window),
    );
}

fn tiling_checks(report: &mut RunReport, g: &Global, odd: &FactorSpec, even: &FactorSpec, s: &[Spectrum; 2]) {
    match odd.decomposition() {
        Decomposition::TypeI => record(
            report,
            "tiling",
            spectra::tiling_check(&s[0], &s[1], g.window, false),
            "Λ(odd) ⊕ Λ(even) = Z",
        ),
        Decomposition::TypeII => {
            let interval = joint_depth(odd, even)
                .map(|d| spectra::exhaustion_interval(odd.ladder(), d))
                .transpose();
            let w = match interval {
                Ok(Some(Some((lo, hi)))) => g.window.min(lo.unsigned_abs().min(hi.unsigned_abs())),
                Ok(_) => g.window,
                Err(e) => {
                    report.check("tiling", false, e.to_string());
                    return;
                }
            };
            let detail = format!("Λ(odd) ⊕ (−Λ(even)) covers [−{w}, {w}] once (window {} requested)", g.window);
            record(report, "tiling", spectra::tiling_check(&s[0], &s[1], w, true), &detail);
            report.results.last_mut().expect("just recorded").value(w as f64);
        }
    }
}

fn q_values(g: &Global, spec: &FactorSpec, s: &Spectrum, xs: &[f64]) -> Result<Vec<QValue>, Error> {
    xs.par_iter().map(|&x| spectra::q_function(spec, s, g.trunc, x)).collect()
}

/// Largest `excess(q)` over a column, with the `Q` value and bound where it occurs.
fn worst(qs: &[QValue], excess: impl Fn(&QValue) -> f64) -> (f64, QValue) {
    let mut best = (f64::NEG_INFINITY, QValue { value: f64::NAN, bound: f64::NAN });
    for q in qs {
        let e = excess(q);
        if e > best.0 || e.is_nan() {
            best = (e, *q);
        }
    }
    best
}

fn q_checks(report: &mut RunReport, g: &Global, spec: &FactorSpec, s: &Spectrum, xs: &[f64]) {
    let side = spec.side().name();
    let qs = match q_values(g, spec, s, xs) {
        Ok(qs) => qs,
        Err(e) => {
            report.check(&format!("q_grid[{side}]"), false, e.to_string());
            return;
        }
    };
    match spec.decomposition() {
        Decomposition::TypeI => {
            let (e, q) = worst(&qs, |q| (q.value - 1.0).abs() - q.bound);
            report
                .check(&format!("q_identity[{side}]"), e <= g.tol, "|Q(ξ) − 1| ≤ bound + tol on the ξ grid")
                .value(q.value)
                .bound(q.bound);
        }
        Decomposition::TypeII => {
            let (e, q) = worst(&qs, |q| q.value - 1.0 - q.bound);
            report
                .check(&format!("q_upper[{side}]"), e <= g.tol, "Q(ξ) ≤ 1 + bound + tol on the ξ grid")
                .value(q.value)
                .bound(q.bound);
            match spectra::q_function(spec, s, g.trunc, 0.0) {
                Ok(q0) => {
                    report
                        .check(&format!("q_origin[{side}]"), (q0.value - 1.0).abs() <= q0.bound + g.tol, "|Q(0) − 1| ≤ bound + tol")
                        .value(q0.value)
                        .bound(q0.bound);
                }
                Err(e) => {
                    report.check(&format!("q_origin[{side}]"), false, e.to_string());
                }
            }
        }
    }
}

#[derive(Serialize)]
struct QRow {
    xi: f64,
    k: usize,
    q: f64,
    bound: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn qplot(
    report: &mut RunReport,
    g: &Global,
    args: &SpecArgs,
    side: &str,
    kmax: usize,
    out: Option<&Path>,
    ft_out: Option<&Path>,
) -> Result<()> {
    let (odd, even) = build_pair(report, g, args)?;
    check_tol(g)?;
    let side: Side = side.parse()?;
    let spec = pick(side, odd, even);
    let xs = xi_grid(g)?;
    report.input("side", side);
    report.input("kmax", kmax);
    report.input("grid", g.grid);
    report.input("trunc", g.trunc);
    let levels: Vec<usize> = match spec.decomposition() {
        Decomposition::TypeI => vec![spec.level()],
        Decomposition::TypeII => {
            if kmax == 0 || kmax > spec.side_count() {
                bail!("kmax must be in 1..={} for the {} side of this ladder", spec.side_count(), side.name());
            }
            (1..=kmax).collect()
        }
    };
    let mut columns = Vec::with_capacity(levels.len());
    for &k in &levels {
        let s = match spec.decomposition() {
            Decomposition::TypeI => spectra::factor_spectrum(&spec)?,
            Decomposition::TypeII => spectra::lambda_k(&spec, k)?,
        };
        let qs = q_values(g, &spec, &s, &xs)?;
        let q0 = spectra::q_function(&spec, &s, g.trunc, 0.0)?;
        columns.push((k, qs, q0));
    }

    let mut csv = String::from("xi,k,q,bound\n");
    let mut rows = Vec::new();
    for (k, qs, _) in &columns {
        for (&xi, q) in xs.iter().zip(qs) {
            writeln!(csv, "{xi},{k},{},{}", q.value, q.bound).expect("writing to a string");
            rows.push(QRow { xi, k: *k, q: q.value, bound: q.bound });
        }
    }
    match out {
        Some(path) => {
            std::fs::write(path, &csv).with_context(|| format!("cannot write {}", path.display()))?;
            report.output("csv", path.display().to_string());
            report.output("rows", rows.len());
        }
        None => report.output("rows", &rows),
    }
    if let Some(path) = ft_out {
        let ft: Vec<_> = xs
            .par_iter()
            .map(|&x| fourier::ft_row(&spec, g.trunc, x))
            .collect::<Result<_, _>>()?;
        let mut text = String::from("xi,re,im,abs,bound\n");
        for r in &ft {
            writeln!(text, "{},{},{},{},{}", r.xi, r.re, r.im, r.abs, r.bound).expect("writing to a string");
        }
        std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
        report.output("ft_csv", path.display().to_string());
    }

    let all = || columns.iter().flat_map(|(_, qs, _)| qs.iter());
    match spec.decomposition() {
        Decomposition::TypeI => {
            let (e, q) = worst(&all().copied().collect::<Vec<_>>(), |q| (q.value - 1.0).abs() - q.bound);
            report.check("q_identity", e <= g.tol, "|Q(ξ) − 1| ≤ bound + tol").value(q.value).bound(q.bound);
        }
        Decomposition::TypeII => {
            let mut drop = f64::NEG_INFINITY;
            for pair in columns.windows(2) {
                for (lo, hi) in pair[0].1.iter().zip(&pair[1].1) {
                    drop = drop.max(lo.value - hi.value - lo.bound - hi.bound);
                }
            }
            report
                .check("monotone", drop <= g.tol, "Q_{k+1}(ξ) ≥ Q_k(ξ) up to the bounds")
                .value(drop.max(0.0));
            let (e, q) = worst(&all().copied().collect::<Vec<_>>(), |q| q.value - 1.0 - q.bound);
            report.check("q_upper", e <= g.tol, "Q_k(ξ) ≤ 1 + bound + tol").value(q.value).bound(q.bound);
        }
    }
    let origin: Vec<QValue> = columns.iter().map(|c| c.2).collect();
    let (e, q) = worst(&origin, |q| (q.value - 1.0).abs() - q.bound);
    report.check("q_origin", e <= g.tol, "|Q_k(0) − 1| ≤ bound + tol for every k").value(q.value).bound(q.bound);
    Ok(())
}

pub fn factor_sets(
    report: &mut RunReport,
    g: &Global,
    a: Option<String>,
    b: Option<String>,
    file: Option<&Path>,
) -> Result<()> {
    let mut pair = match (file, a, b) {
        (Some(path), None, None) => serde_json::from_str::<SetPair>(&input::read(path)?)
            .with_context(|| format!("bad set pair in {}", path.display()))?,
        (None, Some(a), Some(b)) => {
            let (a, b) = (input::parse_set(&a)?, input::parse_set(&b)?);
            let n = (a.len() as u64).saturating_mul(b.len() as u64);
            SetPair { a, b, n }
        }
        _ => bail!("give either both --A and --B, or --input"),
    };
    if pair.n > g.max_n {
        bail!("n = {} exceeds SPECFORGE_MAX_N = {}", pair.n, g.max_n);
    }
    pair.a.sort_unstable();
    pair.b.sort_unstable();
    report.input("A", &pair.a);
    report.input("B", &pair.b);
    report.input("n", pair.n);
    pair.validate()?;
    let found = factorizer::factor_sets(&pair)?;
    report.output("ladder", &found.ladder);
    report.output("first_side", found.first_side);
    report.output("coarsest_first", found.coarsest_first());
    report.output("coarsest_side", found.coarsest_side());
    let back = found.expand_sets()?;
    report.check("round_trip", back == pair, "the ladder expands back to A and B");
    Ok(())
}

#[derive(Deserialize)]
struct MeasurePair {
    p: DiscreteMeasure,
    q: DiscreteMeasure,
}

pub fn factor_measures(report: &mut RunReport, g: &Global, path: &Path) -> Result<()> {
    let pair: MeasurePair = serde_json::from_str(&input::read(path)?)
        .with_context(|| format!("bad measure pair in {}", path.display()))?;
    report.input("input", path.display().to_string());
    if (pair.p.len() as u64).saturating_mul(pair.q.len() as u64) > g.max_n {
        bail!("|supp p|·|supp q| exceeds SPECFORGE_MAX_N = {}", g.max_n);
    }
    let found = factorizer::factor_uniform_pair(&pair.p, &pair.q)?;
    report.output("ladder", &found.ladder);
    report.output("first_side", found.first_side);
    report.output("coarsest_first", found.coarsest_first());
    report.output("coarsest_side", found.coarsest_side());
    let (p, q) = found.expand_measures()?;
    report.check("round_trip", p == pair.p && q == pair.q, "the ladder expands back to p and q");
    Ok(())
}

pub fn tile_extract(report: &mut RunReport, omega: &str, q: &str, m: u64) -> Result<()> {
    let omega = input::parse_mask(omega, m)?;
    let q = input::parse_mask(q, m)?;
    report.input("omega", &omega);
    report.input("q", &q);
    let t: TranslateSystem = match tiling::extract_translates(&omega, &q) {
        Ok(t) => t,
        Err(Error::NoTiling(msg)) => {
            report.check("tiling", false, msg);
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    report.output("translates", &t);
    report.output("nu", t.measure()?);
    let rebuilt = tiling::assemble(&omega, &t)?;
    report.check(
        "tiling",
        rebuilt.resolution() == q.resolution() && rebuilt.indices() == q.indices(),
        format!("Q is the disjoint union of {} translates of Ω", t.count()),
    );
    Ok(())
}

pub fn enumerate_pairs(report: &mut RunReport, n: u64) -> Result<()> {
    report.input("n", n);
    let pairs = factorizer::enumerate_complementary_pairs(n)?;
    let mut listed = Vec::with_capacity(pairs.len());
    let mut all_round_trip = true;
    for p in &pairs {
        let found = factorizer::factor_sets(p)?;
        all_round_trip &= found.expand_sets()? == *p;
        listed.push(json!({ "A": p.a, "B": p.b, "ladder": found.ladder, "first_side": found.first_side }));
    }
    report.output("count", pairs.len());
    report.output("pairs", listed);
    report.check("round_trip", all_round_trip, "every pair factors and expands back");
    Ok(())
}
