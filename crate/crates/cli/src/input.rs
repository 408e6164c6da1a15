use std::path::Path;

use anyhow::{bail, Context, Result};
use specforge_core::tiling::GridMask;
use specforge_core::Ladder;

/// Parses `2,3,2` with `N*k` meaning `k` copies of `N`; empty means the empty ladder.
pub fn parse_ladder(s: &str) -> Result<Ladder> {
    let s = s.trim().trim_start_matches('(').trim_end_matches(')').trim();
    if s.is_empty() {
        return Ok(Ladder::empty());
    }
    let mut entries = Vec::new();
    for token in s.split(',') {
        let token = token.trim();
        match token.split_once('*') {
            Some((n, k)) => {
                let n: u64 = n.trim().parse().with_context(|| format!("bad ladder entry {token:?}"))?;
                let k: usize = k.trim().parse().with_context(|| format!("bad repeat count in {token:?}"))?;
                if k > 4096 {
                    bail!("repeat count {k} in {token:?} is too large");
                }
                entries.extend(std::iter::repeat_n(n, k));
            }
            None => entries.push(token.parse().with_context(|| format!("bad ladder entry {token:?}"))?),
        }
    }
    Ok(Ladder::new(entries)?)
}

/// Refuses ladders whose product exceeds `max_n`.
pub fn check_size(l: &Ladder, max_n: u64) -> Result<u64> {
    match l.total_product() {
        Some(p) if p <= max_n => Ok(p),
        Some(p) => bail!("ladder product {p} exceeds SPECFORGE_MAX_N = {max_n}"),
        None => bail!("ladder product overflows; SPECFORGE_MAX_N = {max_n}"),
    }
}

/// Comma-separated nonnegative integers, optionally in braces or brackets.
pub fn parse_set(s: &str) -> Result<Vec<u64>> {
    let s = s.trim().trim_matches(|c| matches!(c, '{' | '}' | '[' | ']')).trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| t.trim().parse::<u64>().with_context(|| format!("bad set element {t:?}")))
        .collect()
}

/// A mask given as a `0`/`1` string at resolution `m`, an inline JSON mask, or
/// a path to a JSON mask.
pub fn parse_mask(arg: &str, m: u64) -> Result<GridMask> {
    let t = arg.trim();
    if t.starts_with('{') {
        return serde_json::from_str(t).context("bad JSON mask");
    }
    if !t.is_empty() && t.chars().all(|c| c == '0' || c == '1') {
        return Ok(GridMask::from_bits(m, t)?);
    }
    let text = read(Path::new(t))?;
    serde_json::from_str(&text).with_context(|| format!("bad JSON mask in {t}"))
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}
