//! 1-D interval realizations and the empirical side: cut sets, covering
//! numbers, box slope, neighbour counts, and the scale-pair spectrum.
//!
//! Placements in higher ambient dimension are unconstrained beyond disjoint
//! interiors, so the geometry layer is deliberately 1-D: there greedy
//! left-to-right covering is optimal and neighbour counts are exact.
//!
//! A query at scale `r` refines to cut threshold `r/2`; the unrefined tail
//! contributes intervals of length at most `r/2`, each absorbed by a single
//! covering ball, so counts are exact for the approximant and within a
//! factor 2 for the limit set. Interval-intersection predicates carry an
//! absolute slack of `1e-12`.

use std::sync::{Arc, RwLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::{lit, out, Real};
use crate::schedule::RatioSchedule;

/// How children are placed inside their parent interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Placement {
    /// Children abut from the parent's left end; slack at the right.
    LeftPacked,
    /// First child starts at the parent's left endpoint, last child ends at
    /// the parent's right endpoint, interior gaps equal.
    EndpointsAligned,
    /// Equal gaps everywhere, including before the first and after the last child.
    UniformGap,
}

impl Placement {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "left-packed" => Ok(Placement::LeftPacked),
            "endpoints-aligned" => Ok(Placement::EndpointsAligned),
            "uniform-gap" => Ok(Placement::UniformGap),
            other => Err(Error::Config(format!("unknown placement policy {other:?}"))),
        }
    }
}

/// Per-level child offsets relative to the parent's unit interval.
struct LevelPlacement<F> {
    left: Vec<F>,
    ratio: Vec<F>,
}

/// How far to expand an interval tree.
#[derive(Clone, Copy, Debug)]
pub enum Expansion<F> {
    /// All words of the given depth.
    Depth(usize),
    /// The cut set at the given threshold.
    Threshold(F),
}

/// A leaf of the expanded tree.
#[derive(Clone, Debug)]
pub struct Leaf<F> {
    pub word: Vec<u32>,
    pub left: F,
    pub len: F,
}

/// A member of a cut set: maximal word whose cylinder ratio first drops to
/// the threshold.
#[derive(Clone, Debug)]
pub struct CutWord<F> {
    pub word: Vec<u32>,
    pub left: F,
    pub len: F,
}

/// A materialized cut set relative to a prefix.
#[derive(Clone, Debug)]
pub struct CutSet<F> {
    pub prefix: Vec<u32>,
    pub delta: F,
    pub words: Vec<CutWord<F>>,
}

/// An interval realization of a schedule on `[0,1]` under a placement policy.
///
/// Tree expansion is single-writer; all queries are read-only against the
/// schedule plus an append-only per-level placement cache and may run in
/// parallel.
pub struct Realization<F> {
    schedule: Arc<RatioSchedule<F>>,
    policy: Placement,
    node_cap: usize,
    slack: F,
    placements: RwLock<Vec<Arc<LevelPlacement<F>>>>,
    leaves: Vec<Leaf<F>>,
    expansion: Expansion<F>,
}

/// Expands a realization: nodes to depth `K` or to the cut set at a threshold.
pub fn realize<F: Real>(
    schedule: Arc<RatioSchedule<F>>,
    policy: Placement,
    expansion: Expansion<F>,
    node_cap: usize,
) -> Result<Realization<F>> {
    let mut r = Realization {
        schedule,
        policy,
        node_cap,
        slack: lit(1e-12),
        placements: RwLock::new(Vec::new()),
        leaves: Vec::new(),
        expansion,
    };
    r.leaves = match expansion {
        Expansion::Depth(k) => {
            if k == 0 {
                return Err(Error::Precondition("expansion depth must be >= 1".into()));
            }
            r.depth_leaves(k)?
        }
        Expansion::Threshold(delta) => {
            if !(delta > F::zero() && delta < F::one()) {
                return Err(Error::Precondition("cut threshold must be in (0,1)".into()));
            }
            let mut leaves = Vec::new();
            r.walk_cut(&[], delta, None, true, &mut |word: &[u32], left, len| {
                leaves.push(Leaf {
                    word: word.to_vec(),
                    left,
                    len,
                });
            })?;
            leaves
        }
    };
    Ok(r)
}

impl<F: Real> Realization<F> {
    pub fn policy(&self) -> Placement {
        self.policy
    }

    pub fn expansion(&self) -> Expansion<F> {
        self.expansion
    }

    pub fn leaves(&self) -> &[Leaf<F>] {
        &self.leaves
    }

    fn placement(&self, k: usize) -> Result<Arc<LevelPlacement<F>>> {
        {
            let cache = self.placements.read().expect("placement cache poisoned");
            if k <= cache.len() {
                return Ok(Arc::clone(&cache[k - 1]));
            }
        }
        let mut cache = self.placements.write().expect("placement cache poisoned");
        while cache.len() < k {
            let level = self.schedule.level(cache.len() + 1)?;
            cache.push(Arc::new(self.level_placement(&level)?));
        }
        Ok(Arc::clone(&cache[k - 1]))
    }

    fn level_placement(
        &self,
        level: &crate::schedule::RatioVector<F>,
    ) -> Result<LevelPlacement<F>> {
        let ratio = level.ratios();
        let n = ratio.len();
        let total: F = ratio.iter().cloned().fold(F::zero(), |a, b| a + b);
        let gap_total = F::one() - total;
        if gap_total < -self.slack {
            return Err(Error::Precondition(format!(
                "level {} has ratio sum {} > 1: not realizable in one dimension",
                level.level(),
                out(total)
            )));
        }
        let gap_total = gap_total.max(F::zero());
        let mut left = Vec::with_capacity(n);
        let mut acc = F::zero();
        match self.policy {
            Placement::LeftPacked => {
                for &c in &ratio {
                    left.push(acc);
                    acc = acc + c;
                }
            }
            Placement::EndpointsAligned => {
                let g = gap_total / lit::<F>((n - 1) as f64);
                for (j, &c) in ratio.iter().enumerate() {
                    left.push(acc + lit::<F>(j as f64) * g);
                    acc = acc + c;
                }
            }
            Placement::UniformGap => {
                let g = gap_total / lit::<F>((n + 1) as f64);
                for (j, &c) in ratio.iter().enumerate() {
                    left.push(acc + lit::<F>((j + 1) as f64) * g);
                    acc = acc + c;
                }
            }
        }
        Ok(LevelPlacement { left, ratio })
    }

    /// Absolute interval `(left, length)` of a word.
    pub fn interval_of(&self, word: &[u32]) -> Result<(F, F)> {
        let mut left = F::zero();
        let mut len = F::one();
        for (depth, &sym) in word.iter().enumerate() {
            let p = self.placement(depth + 1)?;
            let j = sym as usize;
            if j == 0 || j > p.ratio.len() {
                return Err(Error::Config(format!(
                    "symbol {sym} out of range at depth {}",
                    depth + 1
                )));
            }
            left = left + p.left[j - 1] * len;
            len = len * p.ratio[j - 1];
        }
        Ok((left, len))
    }

    fn depth_leaves(&self, depth: usize) -> Result<Vec<Leaf<F>>> {
        let mut frontier: Vec<Leaf<F>> = vec![Leaf {
            word: Vec::new(),
            left: F::zero(),
            len: F::one(),
        }];
        for k in 1..=depth {
            let p = self.placement(k)?;
            let mut next = Vec::with_capacity(frontier.len() * p.ratio.len());
            for leaf in &frontier {
                for j in 0..p.ratio.len() {
                    if next.len() >= self.node_cap {
                        return Err(Error::CapExceeded {
                            what: "depth expansion",
                            cap: self.node_cap,
                            bottleneck: depth as f64,
                        });
                    }
                    let mut word = leaf.word.clone();
                    word.push((j + 1) as u32);
                    next.push(Leaf {
                        word,
                        left: leaf.left + p.left[j] * leaf.len,
                        len: leaf.len * p.ratio[j],
                    });
                }
            }
            frontier = next;
        }
        Ok(frontier)
    }

    /// Depth-first walk of the cut set relative to `prefix` at relative
    /// threshold `delta`, optionally pruned to a window. Emits segments in
    /// left-to-right order. `with_words` controls whether word labels are
    /// tracked; interval-only walks skip that bookkeeping.
    fn walk_cut(
        &self,
        prefix: &[u32],
        delta: F,
        window: Option<(F, F)>,
        with_words: bool,
        emit: &mut dyn FnMut(&[u32], F, F),
    ) -> Result<()> {
        self.walk_cut_capped(prefix, delta, window, with_words, self.node_cap, emit)
    }

    fn walk_cut_capped(
        &self,
        prefix: &[u32],
        delta: F,
        window: Option<(F, F)>,
        with_words: bool,
        node_cap: usize,
        emit: &mut dyn FnMut(&[u32], F, F),
    ) -> Result<()> {
        let (p_left, p_len) = self.interval_of(prefix)?;
        // relative slack so that thresholds sitting exactly on a cylinder
        // ratio are not flipped by round-off in the length products
        let threshold = delta * p_len * (F::one() + lit::<F>(1e-12));
        // stack entries: (depth, left, len, next child index)
        let mut stack: Vec<(usize, F, F, usize)> = vec![(prefix.len(), p_left, p_len, 0)];
        let mut word: Vec<u32> = prefix.to_vec();
        let mut visited = 0usize;
        while let Some(top) = stack.last_mut() {
            let (depth, left, len, child) = *top;
            let place = self.placement(depth + 1)?;
            if child >= place.ratio.len() {
                stack.pop();
                if with_words && word.len() > prefix.len() {
                    word.pop();
                }
                continue;
            }
            top.3 += 1;
            visited += 1;
            if visited > node_cap {
                return Err(Error::CapExceeded {
                    what: "cut-set expansion",
                    cap: node_cap,
                    bottleneck: out(delta),
                });
            }
            let c_left = left + place.left[child] * len;
            let c_len = len * place.ratio[child];
            if let Some((a, b)) = window {
                if c_left > b + self.slack || c_left + c_len < a - self.slack {
                    continue;
                }
            }
            if c_len <= threshold {
                // parent length exceeds the threshold by construction
                if with_words {
                    word.push((child + 1) as u32);
                    emit(&word, c_left, c_len);
                    word.pop();
                } else {
                    emit(&[], c_left, c_len);
                }
            } else {
                if with_words {
                    word.push((child + 1) as u32);
                }
                stack.push((depth + 1, c_left, c_len, 0));
            }
        }
        Ok(())
    }

    /// The cut set relative to `prefix`: maximal extensions whose relative
    /// cylinder ratio first drops to `delta`.
    pub fn cut_set(&self, prefix: &[u32], delta: F) -> Result<CutSet<F>> {
        if !(delta > F::zero() && delta < F::one()) {
            return Err(Error::Precondition("cut threshold must be in (0,1)".into()));
        }
        let mut words = Vec::new();
        self.walk_cut(prefix, delta, None, true, &mut |w: &[u32], left, len| {
            words.push(CutWord {
                word: w.to_vec(),
                left,
                len,
            });
        })?;
        Ok(CutSet {
            prefix: prefix.to_vec(),
            delta,
            words,
        })
    }

    /// Fixed-length variant: cut-set members whose suffix has exactly
    /// `len_suffix` symbols.
    pub fn cut_set_fixed_len(
        &self,
        prefix: &[u32],
        delta: F,
        len_suffix: usize,
    ) -> Result<CutSet<F>> {
        let full = self.cut_set(prefix, delta)?;
        let words: Vec<CutWord<F>> = full
            .words
            .into_iter()
            .filter(|w| w.word.len() == prefix.len() + len_suffix)
            .collect();
        Ok(CutSet {
            prefix: prefix.to_vec(),
            delta,
            words,
        })
    }

    /// Minimal number of radius-`r` balls covering `B(x,R)` intersected with
    /// the approximant refined to cut threshold `r/2`. Greedy left-to-right,
    /// which is optimal in one dimension, so the count is exact for the
    /// approximant.
    pub fn covering_number(&self, x: F, radius_big: F, radius_small: F) -> Result<usize> {
        self.covering_number_capped(x, radius_big, radius_small, self.node_cap)
    }

    fn covering_number_capped(
        &self,
        x: F,
        radius_big: F,
        radius_small: F,
        cap: usize,
    ) -> Result<usize> {
        if !(radius_small > F::zero() && radius_small < radius_big) {
            return Err(Error::Precondition(format!(
                "covering needs 0 < r < R, got r = {}, R = {}",
                out(radius_small),
                out(radius_big)
            )));
        }
        let a = x - radius_big;
        let b = x + radius_big;
        let two_r = radius_small + radius_small;
        let slack = self.slack;
        let cut = (radius_small * lit::<F>(0.5)).min(lit(0.999_999));
        let mut count = 0usize;
        let mut covered = F::neg_infinity();
        self.walk_cut_capped(&[], cut, Some((a, b)), false, cap, &mut |_, left, len| {
            let seg_a = left.max(a);
            let seg_b = (left + len).min(b);
            if seg_b < seg_a - slack || seg_b <= covered + slack {
                return;
            }
            let mut p = if seg_a > covered + slack { seg_a } else { covered };
            loop {
                covered = p + two_r;
                count += 1;
                if seg_b <= covered + slack {
                    break;
                }
                p = covered;
            }
        })?;
        Ok(count)
    }

    /// Exact neighbour count: the maximum over probe points of the number of
    /// cut-set cylinders meeting `B(x, c_prefix * delta)`. Default probes are
    /// all cut-interval endpoints plus gap midpoints; the count is a
    /// piecewise-constant function of `x`, evaluated exactly at each probe.
    pub fn neighbour_count(
        &self,
        prefix: &[u32],
        delta: F,
        probes: Option<&[F]>,
    ) -> Result<NeighbourReport> {
        self.neighbour_count_scaled(prefix, delta, F::one(), probes)
    }

    /// As [`Realization::neighbour_count`] with the ball radius scaled to
    /// `scale * c_prefix * delta`. Bounded-neighbour evidence for abutting
    /// constructions is naturally stated at a fractional radius.
    pub fn neighbour_count_scaled(
        &self,
        prefix: &[u32],
        delta: F,
        scale: F,
        probes: Option<&[F]>,
    ) -> Result<NeighbourReport> {
        if !(delta > F::zero() && delta < F::one()) {
            return Err(Error::Precondition("cut threshold must be in (0,1)".into()));
        }
        if !(scale > F::zero()) {
            return Err(Error::Precondition("radius scale must be positive".into()));
        }
        let (_, p_len) = self.interval_of(prefix)?;
        let radius = p_len * delta * scale;
        let mut segs: Vec<(F, F)> = Vec::new();
        self.walk_cut(prefix, delta, None, false, &mut |_, left, len| {
            segs.push((left, left + len));
        })?;
        if segs.is_empty() {
            return Ok(NeighbourReport {
                delta: out(delta),
                radius: out(radius),
                count: 0,
                intervals: 0,
                probes: 0,
            });
        }
        let default_probes: Vec<F>;
        let probe_list: &[F] = match probes {
            Some(p) => p,
            None => {
                let mut p = Vec::with_capacity(3 * segs.len());
                for w in segs.windows(2) {
                    if w[1].0 > w[0].1 {
                        p.push((w[0].1 + w[1].0) * lit::<F>(0.5));
                    }
                }
                for &(a, b) in &segs {
                    p.push(a);
                    p.push(b);
                }
                default_probes = p;
                &default_probes
            }
        };
        let mut starts: Vec<F> = segs.iter().map(|&(a, _)| a).collect();
        let mut ends: Vec<F> = segs.iter().map(|&(_, b)| b).collect();
        starts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ends.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let slack = self.slack;
        let mut best = 0usize;
        for &x in probe_list {
            // active cylinders: start <= x + radius + slack, end >= x - radius - slack
            let started = starts.partition_point(|&s| s <= x + radius + slack);
            let ended = ends.partition_point(|&e| e < x - radius - slack);
            best = best.max(started - ended);
        }
        Ok(NeighbourReport {
            delta: out(delta),
            radius: out(radius),
            count: best,
            intervals: segs.len(),
            probes: probe_list.len(),
        })
    }

    /// Box-dimension slope: least-squares fit of `log N_r` against `log(1/r)`
    /// for whole-set covering counts over the scale grid.
    pub fn box_slope(&self, scales: &[F]) -> Result<BoxReport> {
        if scales.len() < 2 {
            return Err(Error::Precondition("box slope needs >= 2 scales".into()));
        }
        let half = lit::<F>(0.5);
        let mut rows = Vec::with_capacity(scales.len());
        let mut xs = Vec::with_capacity(scales.len());
        let mut ys = Vec::with_capacity(scales.len());
        for &r in scales {
            if !(r > F::zero() && r < half) {
                return Err(Error::Precondition(format!(
                    "box scale {} outside (0, 1/2)",
                    out(r)
                )));
            }
            let n = self.covering_number(half, half, r)?;
            rows.push((out(r), n as u64));
            xs.push(out(r).recip().ln());
            ys.push((n as f64).ln());
        }
        Ok(BoxReport {
            rows,
            slope: least_squares_slope(&xs, &ys),
        })
    }

    /// Scale-pair spectrum estimate at cutoff `eta`.
    ///
    /// For each base scale `R` in the grid, probes are drawn from the cut
    /// set at threshold `R` and the worst covering count `N_r(B(x,R))` over
    /// probes is taken at every rung of a descending ladder of fine scales
    /// `r_j = R^{1+eta} * 2^{-j/2}` (all admissible, since finer `r` only
    /// sharpens the scale separation). The per-base estimate is the fitted
    /// slope of `log N` against `log(1/r)` down the ladder: within one
    /// window the covering constant cancels, which a single scale pair
    /// cannot achieve at floating-point-reachable scales. The report carries
    /// `h_est` (worst fitted slope over the fine tail of the grid) and the
    /// literal single-pair ratio as a diagnostic.
    pub fn spectrum(&self, eta: F, base_scales: &[F], probe_cap: usize) -> Result<SpectrumReport> {
        if !(eta > F::zero()) {
            return Err(Error::Precondition(
                "spectrum cutoff must be positive".into(),
            ));
        }
        if base_scales.len() < 2 || probe_cap == 0 {
            return Err(Error::Precondition(
                "spectrum needs >= 2 base scales and a positive probe cap".into(),
            ));
        }
        let one = F::one();
        let floor = self.slack * lit::<F>(1e3);
        let rung = lit::<F>(std::f64::consts::SQRT_2).recip();
        let max_rungs = 17usize;
        let mut rows: Vec<SpectrumRow> = Vec::with_capacity(base_scales.len());
        for &big in base_scales {
            if !(big > F::zero() && big < one) {
                return Err(Error::Precondition(format!(
                    "base scale {} outside (0,1)",
                    out(big)
                )));
            }
            let small = big.powf(one + eta);
            if !(small < big) {
                return Err(Error::Precondition(
                    "degenerate scale pair: r must be strictly below R".into(),
                ));
            }
            // refinement below the predicate slack would be meaningless;
            // record a skipped row instead of a silent lie
            if small <= floor {
                rows.push(SpectrumRow {
                    r_base: out(big),
                    r_fine: out(small),
                    count: 0,
                    ratio: f64::NAN,
                    ladder_slope: f64::NAN,
                    skipped: true,
                });
                continue;
            }
            let mut segs: Vec<(F, F)> = Vec::new();
            self.walk_cut(&[], big, None, false, &mut |_, left, len| {
                segs.push((left, left + len));
            })?;
            let mut probes: Vec<F> = Vec::with_capacity(2 * segs.len());
            for w in segs.windows(2) {
                if w[1].0 > w[0].1 {
                    probes.push((w[0].1 + w[1].0) * lit::<F>(0.5));
                }
            }
            for &(a, b) in &segs {
                probes.push(a);
                probes.push(b);
            }
            let probes = select_probes(probes, big, probe_cap);
            let rungs: Vec<F> = (0..max_rungs)
                .map(|j| small * rung.powi(j as i32))
                .take_while(|&r| r > floor)
                .collect();
            // deep probes near an accumulation point make refinement linear
            // in 1/r; bound the per-call budget and stop a probe's ladder at
            // its first infeasible rung (finer rungs only cost more)
            let local_cap = self.node_cap.min(1 << 19);
            let mut best = vec![0usize; rungs.len()];
            let mut any = vec![false; rungs.len()];
            for &x in &probes {
                for (j, &r_fine) in rungs.iter().enumerate() {
                    match self.covering_number_capped(x, big, r_fine, local_cap) {
                        Ok(n) => {
                            any[j] = true;
                            best[j] = best[j].max(n);
                        }
                        Err(Error::CapExceeded { .. }) => break,
                        Err(e) => return Err(e),
                    }
                }
            }
            let mut xs: Vec<f64> = Vec::with_capacity(rungs.len());
            let mut ys: Vec<f64> = Vec::with_capacity(rungs.len());
            let mut top_count = 0u64;
            for (j, &r_fine) in rungs.iter().enumerate() {
                if !any[j] {
                    break;
                }
                if j == 0 {
                    top_count = best[j] as u64;
                }
                xs.push(out(r_fine).recip().ln());
                ys.push((best[j].max(1) as f64).ln());
            }
            if xs.is_empty() {
                rows.push(SpectrumRow {
                    r_base: out(big),
                    r_fine: out(small),
                    count: 0,
                    ratio: f64::NAN,
                    ladder_slope: f64::NAN,
                    skipped: true,
                });
                continue;
            }
            let ratio = (top_count.max(1) as f64).ln() / (out(big) / out(small)).ln();
            let ladder_slope = if xs.len() >= 3 {
                least_squares_slope(&xs, &ys)
            } else {
                f64::NAN
            };
            rows.push(SpectrumRow {
                r_base: out(big),
                r_fine: out(small),
                count: top_count,
                ratio,
                ladder_slope,
                skipped: false,
            });
        }
        let live: Vec<&SpectrumRow> = rows
            .iter()
            .filter(|r| !r.skipped && r.ladder_slope.is_finite())
            .collect();
        if live.is_empty() {
            return Err(Error::Precondition(
                "all spectrum scale pairs were below the refinement floor".into(),
            ));
        }
        let tail_from = live.len() / 2;
        let ratio_max_tail = live[tail_from..]
            .iter()
            .map(|r| r.ratio)
            .fold(f64::NEG_INFINITY, f64::max);
        let h_est = live[tail_from..]
            .iter()
            .map(|r| r.ladder_slope)
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(SpectrumReport {
            eta: out(eta),
            rows,
            ratio_max_tail,
            h_est,
        })
    }

    /// Depth-first pass over the intervals of one depth, without word labels.
    fn for_each_depth_interval(
        &self,
        depth: usize,
        emit: &mut dyn FnMut(F, F),
    ) -> Result<()> {
        let mut stack: Vec<(usize, F, F, usize)> = vec![(0, F::zero(), F::one(), 0)];
        let mut visited = 0usize;
        while let Some(top) = stack.last_mut() {
            let (d, left, len, child) = *top;
            let place = self.placement(d + 1)?;
            if child >= place.ratio.len() {
                stack.pop();
                continue;
            }
            top.3 += 1;
            visited += 1;
            if visited > self.node_cap {
                return Err(Error::CapExceeded {
                    what: "depth expansion",
                    cap: self.node_cap,
                    bottleneck: depth as f64,
                });
            }
            let c_left = left + place.left[child] * len;
            let c_len = len * place.ratio[child];
            if d + 1 == depth {
                emit(c_left, c_len);
            } else {
                stack.push((d + 1, c_left, c_len, 0));
            }
        }
        Ok(())
    }

    /// Merged length of all intervals at the given depth.
    pub fn depth_measure(&self, depth: usize) -> Result<F> {
        let mut segs: Vec<(F, F)> = Vec::new();
        self.for_each_depth_interval(depth, &mut |left, len| segs.push((left, left + len)))?;
        segs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut total = F::zero();
        let mut cur: Option<(F, F)> = None;
        for (a, b) in segs {
            match cur {
                Some((ca, cb)) if a <= cb + self.slack => cur = Some((ca, cb.max(b))),
                Some((ca, cb)) => {
                    total = total + (cb - ca);
                    cur = Some((a, b));
                }
                None => cur = Some((a, b)),
            }
        }
        if let Some((ca, cb)) = cur {
            total = total + (cb - ca);
        }
        Ok(total)
    }

    /// CSV rows `word,depth,left,length` for all nodes up to `depth`.
    pub fn nodes_csv(&self, depth: usize) -> Result<String> {
        let mut csv = String::from("word,depth,left,length\n");
        for k in 1..=depth {
            for leaf in self.depth_leaves(k)? {
                let word = leaf
                    .word
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join("-");
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    word,
                    k,
                    out(leaf.left),
                    out(leaf.len)
                ));
            }
        }
        Ok(csv)
    }

    /// Static SVG: one horizontal band per level, one rectangle per node.
    pub fn render_svg(&self, depth: usize) -> Result<String> {
        if depth == 0 {
            return Err(Error::Precondition("render depth must be >= 1".into()));
        }
        let width = 800.0;
        let band = 26.0;
        let pad = 4.0;
        let height = depth as f64 * band + pad * 2.0;
        let mut svg = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
        );
        for k in 1..=depth {
            let y = pad + (k - 1) as f64 * band;
            self.for_each_depth_interval(k, &mut |left, len| {
                let x = out(left) * width;
                let w = (out(len) * width).max(0.2);
                svg.push_str(&format!(
                    "  <rect x=\"{x:.4}\" y=\"{y:.1}\" width=\"{w:.4}\" height=\"{:.1}\" fill=\"#2b6cb0\"/>\n",
                    band - 6.0
                ));
            })?;
        }
        svg.push_str("</svg>\n");
        Ok(svg)
    }
}

/// Result of a neighbour-count query.
#[derive(Clone, Debug, Serialize)]
pub struct NeighbourReport {
    pub delta: f64,
    pub radius: f64,
    pub count: usize,
    pub intervals: usize,
    pub probes: usize,
}

/// Per-scale covering counts and the fitted box slope.
#[derive(Clone, Debug, Serialize)]
pub struct BoxReport {
    /// `(r, N_r)` rows.
    pub rows: Vec<(f64, u64)>,
    pub slope: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumRow {
    pub r_base: f64,
    pub r_fine: f64,
    /// Worst covering count at the coarsest ladder rung `r = R^{1+eta}`.
    pub count: u64,
    /// Literal single-pair ratio `log N / log(R/r)`; diagnostic only, it
    /// carries the covering constant and overshoots at reachable scales.
    pub ratio: f64,
    /// Fitted slope of `log N` against `log(1/r)` down this window's ladder.
    pub ladder_slope: f64,
    pub skipped: bool,
}

/// Scale-pair spectrum estimate at one cutoff.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub eta: f64,
    pub rows: Vec<SpectrumRow>,
    /// Max single-pair ratio over the fine tail of the grid (diagnostic).
    pub ratio_max_tail: f64,
    /// The spectrum estimate: worst ladder slope over the fine tail.
    pub h_est: f64,
}

/// Probe selection for the spectrum: endpoints clustered near an
/// accumulation point are exponentially over-represented in the cut set, so
/// the zone within a few base radii of the left-most structure gets a fixed
/// handful of representatives and the rest of the budget is strided evenly.
fn select_probes<F: Real>(mut probes: Vec<F>, big: F, cap: usize) -> Vec<F> {
    probes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    probes.dedup();
    let bound = probes.first().map(|&p| p + big * lit::<F>(4.0));
    let deep_end = match bound {
        Some(b) => probes.partition_point(|&x| x <= b),
        None => 0,
    };
    let mut picked: Vec<F> = Vec::with_capacity(cap + 4);
    if deep_end > 0 {
        for q in [0usize, deep_end / 3, 2 * deep_end / 3, deep_end - 1] {
            picked.push(probes[q]);
        }
    }
    let shallow = &probes[deep_end..];
    if !shallow.is_empty() {
        let budget = cap.saturating_sub(picked.len()).max(1);
        let stride = shallow.len().div_ceil(budget).max(1);
        picked.extend(shallow.iter().step_by(stride).cloned());
    }
    picked.dedup();
    picked
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys.iter()) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    if den == 0.0 {
        f64::NAN
    } else {
        num / den
    }
}
