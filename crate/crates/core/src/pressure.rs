//! The pressure product and its roots.
//!
//! For a block of levels `k..=k+l` the log-pressure at exponent `s` is
//! `g(s) = sum_i ln(sum_j c_{i,j}^s)`. It is strictly decreasing and convex
//! in `s`, positive at `s = 0` (each factor is `ln n_i >= ln 2`) and
//! non-positive at `s = d` (admissibility), so the root is unique and
//! bracketed by `[0, d]`. Everything here is bisection on that bracket.
//!
//! Window suprema of roots (over `k` at fixed block length, or over a
//! `(k, l)` region) are computed without materializing every root: the max
//! of finitely many decreasing functions is decreasing, and its root is the
//! supremum of the individual roots, so one bisection with an existence
//! predicate per step suffices. That keeps wide windows affordable.

use std::collections::VecDeque;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::num::{lit, out, Real};
use crate::schedule::DerivedSequences;

/// Default bracket-width tolerance for root solving.
pub fn default_tau<F: Real>() -> F {
    lit::<F>(1e-12)
}

/// Hard cap on bisection steps; `[0, d]` reaches `1e-15` well before this.
const MAX_ITERS: usize = 200;

/// `ln(sum_j m_j exp(s ln_j))`, shifted for stability. `ln_j` descending.
fn group_term<F: Real>(ln: &[F], mult: &[u32], s: F) -> F {
    let shift = s * ln[0];
    let mut acc = F::zero();
    for (l, m) in ln.iter().zip(mult.iter()) {
        acc = acc + lit::<F>(*m as f64) * (s * *l - shift).exp();
    }
    shift + acc.ln()
}

/// `sum_{i=k}^{k+l} ln(sum_j c_{i,j}^s)`, computed in log domain.
///
/// Strictly decreasing in `s`; at `s = 0` it equals `sum ln n_i`.
pub fn log_pressure<F: Real>(d: &DerivedSequences<F>, k: usize, l: usize, s: F) -> Result<F> {
    if k == 0 {
        return Err(Error::Config("levels are 1-indexed".into()));
    }
    if k + l > d.horizon() {
        return Err(Error::Horizon {
            requested: k + l,
            horizon: d.horizon(),
        });
    }
    let mut acc = F::zero();
    for i in k..=k + l {
        let (ln, mult) = d.groups(i)?;
        acc = acc + group_term(ln, mult, s);
    }
    Ok(acc)
}

/// Bisection on a monotone predicate: `pred(lo) = true`, `pred(hi) = false`.
fn bisect<F: Real, P: FnMut(F) -> bool>(mut lo: F, mut hi: F, tau: F, mut pred: P) -> F {
    let half = lit::<F>(0.5);
    let mut iters = 0;
    while hi - lo > tau && iters < MAX_ITERS {
        let mid = (lo + hi) * half;
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        iters += 1;
    }
    (lo + hi) * half
}

/// A solved pressure root with its recorded residual.
#[derive(Clone, Copy, Debug)]
pub struct Root<F> {
    pub value: F,
    /// `|log-pressure(value)|`.
    pub residual: F,
}

/// Solves `prod_{i=k}^{k+l} sum_j c_{i,j}^s = 1` to bracket width `tau`.
pub fn solve_root<F: Real>(d: &DerivedSequences<F>, k: usize, l: usize, tau: F) -> Result<Root<F>> {
    solve_root_hinted(d, k, l, tau, None)
}

/// As [`solve_root`] with an optional warm bracket; falls back to `[0, d]`
/// when the hint does not actually bracket the root.
pub fn solve_root_hinted<F: Real>(
    d: &DerivedSequences<F>,
    k: usize,
    l: usize,
    tau: F,
    hint: Option<(F, F)>,
) -> Result<Root<F>> {
    // surface range errors before entering the closure
    log_pressure(d, k, l, F::zero())?;
    let dim = lit::<F>(d.dim() as f64);
    let g = |s: F| log_pressure(d, k, l, s).expect("range checked");
    let (mut lo, mut hi) = (F::zero(), dim);
    if let Some((a, b)) = hint {
        let a = a.max(F::zero());
        let b = b.min(dim);
        if a < b {
            if g(a) > F::zero() {
                lo = a;
            }
            if g(b) <= F::zero() {
                hi = b;
            }
        }
    }
    if lo >= hi {
        lo = F::zero();
        hi = dim;
    }
    let value = bisect(lo, hi, tau, |s| g(s) > F::zero());
    Ok(Root {
        value,
        residual: g(value).abs(),
    })
}

/// Cached roots over a `(k, l)` window: entry `(k, l)` holds `s_{k,k+l}` for
/// `k` in `1..=k_max`, `l` in `0..=l_max`.
pub struct PressureGrid<F> {
    k_max: usize,
    l_max: usize,
    tau: F,
    values: Vec<F>,
    residuals: Vec<F>,
}

impl<F: Real> PressureGrid<F> {
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn tau(&self) -> F {
        self.tau
    }

    fn idx(&self, k: usize, l: usize) -> usize {
        debug_assert!(k >= 1 && k <= self.k_max && l <= self.l_max);
        (k - 1) * (self.l_max + 1) + l
    }

    /// `s_{k,k+l}`.
    pub fn s(&self, k: usize, l: usize) -> F {
        self.values[self.idx(k, l)]
    }

    pub fn residual(&self, k: usize, l: usize) -> F {
        self.residuals[self.idx(k, l)]
    }

    /// CSV export: header `k,l,s,residual`, one row per entry.
    pub fn to_csv(&self) -> String {
        let mut csv = String::from("k,l,s,residual\n");
        for k in 1..=self.k_max {
            for l in 0..=self.l_max {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    k,
                    l,
                    out(self.s(k, l)),
                    out(self.residual(k, l))
                ));
            }
        }
        csv
    }
}

/// Fills the whole window. Entries are independent; rows are computed in
/// parallel and the result is identical to sequential evaluation.
pub fn grid<F: Real>(
    d: &Arc<DerivedSequences<F>>,
    k_max: usize,
    l_max: usize,
    tau: F,
) -> Result<PressureGrid<F>> {
    if k_max == 0 {
        return Err(Error::Config("grid needs k_max >= 1".into()));
    }
    if k_max + l_max > d.horizon() {
        return Err(Error::Horizon {
            requested: k_max + l_max,
            horizon: d.horizon(),
        });
    }
    let pad = lit::<F>(1e-9);
    let rows: Vec<Vec<Root<F>>> = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let mut row = Vec::with_capacity(l_max + 1);
            let mut prev: Option<F> = None;
            for l in 0..=l_max {
                // warm bracket from the previous root and the appended level:
                // the block root lies between them
                let hint = prev.map(|p| {
                    let single = solve_root(d, k + l, 0, tau).expect("in range").value;
                    (p.min(single) - pad, p.max(single) + pad)
                });
                let root = solve_root_hinted(d, k, l, tau, hint).expect("in range");
                prev = Some(root.value);
                row.push(root);
            }
            row
        })
        .collect();
    let mut values = Vec::with_capacity(k_max * (l_max + 1));
    let mut residuals = Vec::with_capacity(k_max * (l_max + 1));
    for row in rows {
        for r in row {
            values.push(r.value);
            residuals.push(r.residual);
        }
    }
    Ok(PressureGrid {
        k_max,
        l_max,
        tau,
        values,
        residuals,
    })
}

/// Bracket validation plus bisection on `g(s) > 0`; falls back to `[0, dim]`
/// end by end when the hint does not bracket.
fn bisect_on<F: Real, G: Fn(F) -> F>(dim: F, tau: F, hint: Option<(F, F)>, g: G) -> F {
    let (mut lo, mut hi) = (F::zero(), dim);
    if let Some((a, b)) = hint {
        let a = a.max(F::zero());
        let b = b.min(dim);
        if a < b {
            if g(a) > F::zero() {
                lo = a;
            }
            if g(b) <= F::zero() {
                hi = b;
            }
        }
    }
    if lo >= hi {
        lo = F::zero();
        hi = dim;
    }
    bisect(lo, hi, tau, |s| g(s) > F::zero())
}

/// `sum over levels 1..=l of the interned type terms at s`.
fn typed_row_term<F: Real>(t: &crate::schedule::TypeTable<F>, l: usize, s: F) -> F {
    let mut acc = F::zero();
    for (ti, (ln, mult)) in t.groups.iter().enumerate() {
        let cnt = t.pref[ti][l];
        if cnt > 0 {
            acc = acc + lit::<F>(cnt as f64) * group_term(ln, mult, s);
        }
    }
    acc
}

/// Roots of the first row, `s_{1,l}` for `l = 1..=l_max` (index `l - 1`).
///
/// Work is chunked: chunk heads solve cold, within a chunk each root is
/// warm-bracketed by its predecessor and the appended single-level root
/// (which always bracket the next root). Interned level tables make each
/// evaluation O(#types), so deep first-row horizons stay affordable.
pub fn row_roots<F: Real>(d: &DerivedSequences<F>, l_max: usize, tau: F) -> Result<Vec<F>> {
    if l_max == 0 || l_max > d.horizon() {
        return Err(Error::Horizon {
            requested: l_max.max(1),
            horizon: d.horizon(),
        });
    }
    let singles = single_roots(d, l_max, tau)?;
    let dim = lit::<F>(d.dim() as f64);
    let pad = lit::<F>(1e-9);
    let chunk = 1usize << 15;
    let chunks: Vec<Vec<F>> = (0..l_max.div_ceil(chunk))
        .into_par_iter()
        .map(|ci| {
            let start = ci * chunk + 1;
            let end = ((ci + 1) * chunk).min(l_max);
            let mut out = Vec::with_capacity(end - start + 1);
            let mut prev: Option<F> = None;
            for l in start..=end {
                let hint = prev.map(|p| {
                    let s = singles[l - 1];
                    (p.min(s) - pad, p.max(s) + pad)
                });
                let root = if let Some(t) = d.typed() {
                    bisect_on(dim, tau, hint, |s| typed_row_term(t, l, s))
                } else {
                    bisect_on(dim, tau, hint, |s| {
                        log_pressure(d, 1, l - 1, s).expect("range checked")
                    })
                };
                prev = Some(root);
                out.push(root);
            }
            out
        })
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

/// Single-level roots `s_{i,i}` for `i = 1..=max_level` (index `i - 1`).
/// With an interned type table only one root per layout is solved.
pub fn single_roots<F: Real>(d: &DerivedSequences<F>, max_level: usize, tau: F) -> Result<Vec<F>> {
    if max_level == 0 || max_level > d.horizon() {
        return Err(Error::Horizon {
            requested: max_level.max(1),
            horizon: d.horizon(),
        });
    }
    if let Some(t) = d.typed() {
        let dim = lit::<F>(d.dim() as f64);
        let by_type: Vec<F> = t
            .groups
            .iter()
            .map(|(ln, mult)| bisect(F::zero(), dim, tau, |s| group_term(ln, mult, s) > F::zero()))
            .collect();
        let mut singles = Vec::with_capacity(max_level);
        for i in 1..=max_level {
            let ti = (0..t.groups.len())
                .find(|&ti| t.pref[ti][i] > t.pref[ti][i - 1])
                .expect("level has a type");
            singles.push(by_type[ti]);
        }
        Ok(singles)
    } else {
        (1..=max_level)
            .map(|i| solve_root(d, i, 0, tau).map(|r| r.value))
            .collect()
    }
}

/// Existence predicate: is some masked block `[k+1, k+l]` still positive at `s`?
fn any_masked_positive<F: Real>(d: &DerivedSequences<F>, l: usize, mask: &[bool], s: F) -> bool {
    if let Some(t) = d.typed() {
        let f: Vec<F> = t
            .groups
            .iter()
            .map(|(ln, mult)| group_term(ln, mult, s))
            .collect();
        for (k, &on) in mask.iter().enumerate() {
            if !on {
                continue;
            }
            let mut v = F::zero();
            for (ti, ft) in f.iter().enumerate() {
                let cnt = t.pref[ti][k + l] - t.pref[ti][k];
                if cnt > 0 {
                    v = v + lit::<F>(cnt as f64) * *ft;
                }
            }
            if v > F::zero() {
                return true;
            }
        }
        false
    } else {
        // prefix of level terms over everything the mask can reach
        let hi = mask.len() - 1 + l;
        let mut pref = Vec::with_capacity(hi + 1);
        pref.push(F::zero());
        for i in 1..=hi {
            let (ln, mult) = d.groups(i).expect("mask within horizon");
            let prev = *pref.last().unwrap();
            pref.push(prev + group_term(ln, mult, s));
        }
        mask.iter()
            .enumerate()
            .any(|(k, &on)| on && pref[k + l] - pref[k] > F::zero())
    }
}

/// Supremum of `s_{k+1,k+l}` over masked `k` (`mask[k]`, `k` from 0), at fixed
/// block length `l >= 1`, to bracket width `tau`. `None` for an empty mask.
///
/// Exact to the same tolerance as per-entry bisection: the pointwise max of
/// the masked log-pressure functions is strictly decreasing with root equal
/// to the supremum of the individual roots.
pub fn sup_root_fixed_len<F: Real>(
    d: &DerivedSequences<F>,
    l: usize,
    mask: &[bool],
    tau: F,
    hint: Option<(F, F)>,
) -> Result<Option<F>> {
    if l == 0 {
        return Err(Error::Config("block length must be >= 1".into()));
    }
    if mask.len() + l > d.horizon() + 1 {
        return Err(Error::Horizon {
            requested: mask.len() - 1 + l,
            horizon: d.horizon(),
        });
    }
    if !mask.iter().any(|&b| b) {
        return Ok(None);
    }
    let dim = lit::<F>(d.dim() as f64);
    let pred = |s: F| any_masked_positive(d, l, mask, s);
    let (mut lo, mut hi) = (F::zero(), dim);
    if let Some((a, b)) = hint {
        let a = a.max(F::zero());
        let b = b.min(dim);
        if a < b {
            if pred(a) {
                lo = a;
            }
            if !pred(b) {
                hi = b;
            }
        }
    }
    if lo >= hi {
        lo = F::zero();
        hi = dim;
    }
    Ok(Some(bisect(lo, hi, tau, pred)))
}

/// Existence predicate over the region `k >= m, l >= m` (clamped by
/// `k <= k_cap`, `l <= l_cap`, `k + l <= horizon`) for blocks `[k+1, k+l]`.
fn region_any_positive<F: Real>(
    d: &DerivedSequences<F>,
    m: usize,
    k_cap: usize,
    l_cap: usize,
    s: F,
) -> bool {
    let hi = (k_cap + l_cap).min(d.horizon());
    // prefix over block sums: blocks [k+1, k+l] become pref[k+l] - pref[k]
    let mut pref = Vec::with_capacity(hi + 1);
    pref.push(F::zero());
    if let Some(t) = d.typed() {
        let f: Vec<F> = t
            .groups
            .iter()
            .map(|(ln, mult)| group_term(ln, mult, s))
            .collect();
        for i in 1..=hi {
            let mut v = *pref.last().unwrap();
            for (ti, ft) in f.iter().enumerate() {
                if t.pref[ti][i] > t.pref[ti][i - 1] {
                    v = v + *ft;
                }
            }
            pref.push(v);
        }
    } else {
        for i in 1..=hi {
            let (ln, mult) = d.groups(i).expect("within horizon");
            let prev = *pref.last().unwrap();
            pref.push(prev + group_term(ln, mult, s));
        }
    }
    // sliding-window minimum of pref[k] over k in [max(m, b-l_cap), min(k_cap, b-m)]
    let mut deque: VecDeque<usize> = VecDeque::new();
    let mut next_k = m;
    for b in (2 * m).max(m + 1)..=hi {
        let k_hi = k_cap.min(b - m);
        let k_lo = m.max(b.saturating_sub(l_cap));
        while next_k <= k_hi {
            while let Some(&back) = deque.back() {
                if pref[back] >= pref[next_k] {
                    deque.pop_back();
                } else {
                    break;
                }
            }
            deque.push_back(next_k);
            next_k += 1;
        }
        while let Some(&front) = deque.front() {
            if front < k_lo {
                deque.pop_front();
            } else {
                break;
            }
        }
        if let Some(&front) = deque.front() {
            if pref[b] - pref[front] > F::zero() {
                return true;
            }
        }
    }
    false
}

/// Supremum of `s_{k+1,k+l}` over the region `k >= m, l >= m` within the
/// caps, to bracket width `tau`. `None` when the region is empty.
pub fn sup_root_region<F: Real>(
    d: &DerivedSequences<F>,
    m: usize,
    k_cap: usize,
    l_cap: usize,
    tau: F,
    hint: Option<(F, F)>,
) -> Result<Option<F>> {
    if m == 0 {
        return Err(Error::Config("region offset m must be >= 1".into()));
    }
    if 2 * m > d.horizon() || m > k_cap || m > l_cap {
        return Ok(None);
    }
    let dim = lit::<F>(d.dim() as f64);
    let pred = |s: F| region_any_positive(d, m, k_cap, l_cap, s);
    if !pred(F::zero()) {
        return Ok(None);
    }
    let (mut lo, mut hi) = (F::zero(), dim);
    if let Some((a, b)) = hint {
        let a = a.max(F::zero());
        let b = b.min(dim);
        if a < b {
            if pred(a) {
                lo = a;
            }
            if !pred(b) {
                hi = b;
            }
        }
    }
    if lo >= hi {
        lo = F::zero();
        hi = dim;
    }
    Ok(Some(bisect(lo, hi, tau, pred)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{Family, RatioSchedule};

    fn derived(f: Family, horizon: usize) -> Arc<DerivedSequences<f64>> {
        let s = Arc::new(RatioSchedule::family(1, f).unwrap());
        Arc::new(DerivedSequences::build(s, horizon).unwrap())
    }

    fn explicit(levels: Vec<Vec<f64>>, horizon: usize) -> Arc<DerivedSequences<f64>> {
        let s = Arc::new(RatioSchedule::explicit(1, vec![], levels).unwrap());
        Arc::new(DerivedSequences::build(s, horizon).unwrap())
    }

    const TAU: f64 = 1e-12;

    #[test]
    fn half_half_root_is_one() {
        let d = explicit(vec![vec![0.5, 0.5]], 32);
        for (k, l) in [(1, 0), (3, 7), (1, 20)] {
            let r = solve_root(&d, k, l, TAU).unwrap();
            assert!((r.value - 1.0).abs() < 1e-11);
            assert!(r.residual < 1e-10);
        }
    }

    #[test]
    fn cantor_root_is_log2_over_log3() {
        let d = derived(Family::middle_cantor(1.0 / 3.0), 64);
        let expect = 2f64.ln() / 3f64.ln();
        for (k, l) in [(1, 0), (5, 10), (20, 40)] {
            let r = solve_root(&d, k, l, TAU).unwrap();
            assert!((r.value - expect).abs() < 1e-11);
        }
    }

    #[test]
    fn half_quarter_root_matches_scalar_oracle() {
        // independent oracle: bisection on x + x^2 = 1 with x = 2^-s
        let mut lo = 0.0f64;
        let mut hi = 1.0;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if mid + mid * mid < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x = 0.5 * (lo + hi);
        let oracle = -x.log2();
        assert!((oracle - 0.6942419136306174).abs() < 1e-12);

        let d = explicit(vec![vec![0.5, 0.25]], 32);
        let r = solve_root(&d, 2, 9, TAU).unwrap();
        assert!((r.value - oracle).abs() < 1e-11);
    }

    #[test]
    fn log_pressure_examples() {
        let d = explicit(vec![vec![0.5, 0.25]], 8);
        // single level at s = 0.5: ln(2^-0.5 + 4^-0.5)
        let g = log_pressure(&d, 1, 0, 0.5).unwrap();
        assert!((g - (0.5f64.sqrt() + 0.5).ln()).abs() < 1e-14);
        assert!((g - 0.18822924922849) < 1e-10);

        let c = derived(Family::middle_cantor(1.0 / 3.0), 8);
        assert!((log_pressure(&c, 1, 0, 0.0).unwrap() - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn log_pressure_monotone_in_s() {
        let d = explicit(vec![vec![0.5, 0.25], vec![0.3, 0.3, 0.2]], 16);
        let mut last = f64::INFINITY;
        for i in 0..=20 {
            let s = i as f64 * 0.05;
            let g = log_pressure(&d, 1, 7, s).unwrap();
            assert!(g < last);
            last = g;
        }
    }

    #[test]
    fn grid_constant_for_cantor() {
        let d = derived(Family::middle_cantor(1.0 / 3.0), 32);
        let g = grid(&d, 10, 10, TAU).unwrap();
        let expect = 2f64.ln() / 3f64.ln();
        for k in 1..=10 {
            for l in 0..=10 {
                assert!((g.s(k, l) - expect).abs() < 1e-11);
                assert!(g.residual(k, l) < 1e-10);
            }
        }
        let csv = g.to_csv();
        assert!(csv.starts_with("k,l,s,residual\n"));
        assert_eq!(csv.lines().count(), 1 + 10 * 11);
    }

    #[test]
    fn phase_blocks_pure_quarter_window() {
        let d = derived(Family::phase_blocks_default(200), 150);
        // inside [a_5, 2a_5) = [132, 264) every level is (1/2, 1/4)
        let r = solve_root(&d, 133, 10, TAU).unwrap();
        assert!((r.value - 0.6942419136306174).abs() < 1e-11);
    }

    #[test]
    fn row_roots_match_direct_solve() {
        let d = derived(Family::power_pair(1.0, 2.0), 64);
        let rows = row_roots(&d, 40, TAU).unwrap();
        for l in [1usize, 7, 23, 40] {
            let direct = solve_root(&d, 1, l - 1, TAU).unwrap().value;
            assert!((rows[l - 1] - direct).abs() < 1e-10);
        }
    }

    #[test]
    fn masked_sup_matches_brute_force() {
        let d = explicit(
            vec![
                vec![0.5, 0.25],
                vec![0.3, 0.3],
                vec![0.5, 0.5],
                vec![0.4, 0.2],
                vec![0.35, 0.35],
            ],
            64,
        );
        for l in 1..=6usize {
            let k_hi = 20usize;
            let mask: Vec<bool> = (0..=k_hi).map(|k| k % 3 != 1).collect();
            let sup = sup_root_fixed_len(&d, l, &mask, TAU, None).unwrap().unwrap();
            let brute = (0..=k_hi)
                .filter(|k| mask[*k])
                .map(|k| solve_root(&d, k + 1, l - 1, TAU).unwrap().value)
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((sup - brute).abs() < 1e-10, "l={l}: {sup} vs {brute}");
        }
    }

    #[test]
    fn empty_mask_is_none() {
        let d = derived(Family::middle_cantor(0.5), 16);
        let mask = vec![false; 8];
        assert!(sup_root_fixed_len(&d, 2, &mask, TAU, None)
            .unwrap()
            .is_none());
    }

    #[test]
    fn region_sup_matches_brute_force() {
        let d = explicit(
            vec![vec![0.5, 0.25], vec![0.45, 0.3], vec![0.5, 0.5], vec![0.2, 0.2]],
            64,
        );
        for m in 1..=4usize {
            let (k_cap, l_cap) = (12usize, 10usize);
            let sup = sup_root_region(&d, m, k_cap, l_cap, TAU, None)
                .unwrap()
                .unwrap();
            let mut brute = f64::NEG_INFINITY;
            for k in m..=k_cap {
                for l in m..=l_cap {
                    if k + l <= d.horizon() {
                        brute = brute.max(solve_root(&d, k + 1, l - 1, TAU).unwrap().value);
                    }
                }
            }
            assert!((sup - brute).abs() < 1e-10, "m={m}: {sup} vs {brute}");
        }
    }

    #[test]
    fn homogeneous_closed_form() {
        // for equal ratios per level the root is sum(ln n) / -sum(ln c)
        let d = derived(Family::HarmonicBranch, 64);
        for (k, l) in [(1usize, 0usize), (2, 5), (7, 12)] {
            let num: f64 = (k..=k + l).map(|i| ((i + 1) as f64).ln()).sum();
            let den: f64 = (k..=k + l).map(|i| (2.0 * i as f64).ln()).sum();
            let closed = num / den;
            let r = solve_root(&d, k, l, TAU).unwrap();
            assert!((r.value - closed).abs() < 1e-10);
        }
    }
}
