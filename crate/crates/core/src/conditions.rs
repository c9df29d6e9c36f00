//! Structural condition checks with tri-state verdicts.
//!
//! Every hypothesis consumed by the dimension identities is asymptotic, so a
//! finite horizon can never prove a limit. Each check therefore returns
//! holds / fails / inconclusive together with the numeric trend it looked at,
//! deciding via doubling-window statistics (compare `[K/4, K/2)` against
//! `[K/2, K]`) rather than single points.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::{lit, out, Real};
use crate::schedule::DerivedSequences;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Holds,
    Fails,
    Inconclusive,
}

/// A named evidence sequence, subsampled for reporting.
#[derive(Clone, Debug, Serialize)]
pub struct Series {
    pub name: String,
    pub points: Vec<(u64, f64)>,
}

impl Series {
    fn new(name: &str, points: Vec<(u64, f64)>) -> Self {
        Series {
            name: name.into(),
            points: subsample(points, 128),
        }
    }
}

/// Tri-state verdict with its basis and the evidence that decided it.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub status: Status,
    /// Which criterion fired. Always present for holds / fails.
    pub basis: Option<String>,
    pub evidence: Vec<Series>,
    /// `(K, L)` windows used.
    pub window: (usize, usize),
}

impl Verdict {
    fn holds(basis: &str, evidence: Vec<Series>, window: (usize, usize)) -> Self {
        Verdict {
            status: Status::Holds,
            basis: Some(basis.into()),
            evidence,
            window,
        }
    }

    fn fails(basis: &str, evidence: Vec<Series>, window: (usize, usize)) -> Self {
        Verdict {
            status: Status::Fails,
            basis: Some(basis.into()),
            evidence,
            window,
        }
    }

    fn inconclusive(evidence: Vec<Series>, window: (usize, usize)) -> Self {
        Verdict {
            status: Status::Inconclusive,
            basis: None,
            evidence,
            window,
        }
    }

    pub fn holds_status(&self) -> bool {
        self.status == Status::Holds
    }

    pub fn fails_status(&self) -> bool {
        self.status == Status::Fails
    }
}

/// Thresholds for the condition checks. Config-exposed with these defaults.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionConfig<F> {
    /// Level horizon for per-level statistics.
    pub k: usize,
    /// Window-length horizon for per-length trends.
    pub l: usize,
    /// Threshold under which ratio-type trends count as vanishing.
    pub eps_ratio: F,
    /// Threshold under which product-type trends count as vanishing.
    pub eps_product: F,
    /// Positive floor for liminf-type checks.
    pub liminf_floor: F,
    /// Per-level search cap for block lengths.
    pub b_cap: usize,
    /// Tail level at which window products count as approaching 1.
    pub near_one: F,
}

impl<F: Real> ConditionConfig<F> {
    pub fn new(k: usize, l: usize) -> Self {
        ConditionConfig {
            k,
            l,
            eps_ratio: lit(0.05),
            eps_product: lit(1e-3),
            liminf_floor: lit(0.01),
            b_cap: 64,
            near_one: lit(0.9),
        }
    }
}

/// All verdicts, as emitted by `run_all`.
#[derive(Clone, Debug, Serialize)]
pub struct VerdictBundle<F> {
    pub c_star: Verdict,
    pub club: Verdict,
    pub bbc: Verdict,
    pub locally_contracting: Verdict,
    #[serde(rename = "cdnllZ")]
    pub cdnll_z: Verdict,
    pub liminf_uc: Verdict,
    pub normal: Verdict,
    pub quasi_normal: Verdict,
    #[serde(skip)]
    _marker: std::marker::PhantomData<F>,
}

fn subsample(points: Vec<(u64, f64)>, cap: usize) -> Vec<(u64, f64)> {
    if points.len() <= cap {
        return points;
    }
    let stride = points.len().div_ceil(cap);
    let mut kept: Vec<(u64, f64)> = points.iter().step_by(stride).cloned().collect();
    if kept.last() != points.last() {
        kept.push(*points.last().unwrap());
    }
    kept
}

/// Doubling windows over `1..=k`: `[k/4, k/2)` and `[k/2, k]`, 1-clamped.
fn windows(k: usize) -> (std::ops::Range<usize>, std::ops::RangeInclusive<usize>) {
    let half = (k / 2).max(1);
    let quarter = (k / 4).max(1);
    (quarter..half, half..=k)
}

fn min_over<F: Real>(vals: &[F], range: impl Iterator<Item = usize>) -> F {
    range.fold(F::infinity(), |m, i| m.min(vals[i - 1]))
}

fn max_over<F: Real>(vals: &[F], range: impl Iterator<Item = usize>) -> F {
    range.fold(F::neg_infinity(), |m, i| m.max(vals[i - 1]))
}

fn series_of<F: Real>(name: &str, vals: &[F]) -> Series {
    Series::new(
        name,
        vals.iter()
            .enumerate()
            .map(|(i, &v)| ((i + 1) as u64, out(v)))
            .collect(),
    )
}

fn check_k<F: Real>(d: &DerivedSequences<F>, cfg: &ConditionConfig<F>) -> Result<usize> {
    if cfg.k < 8 {
        return Err(Error::Config("condition horizon K must be >= 8".into()));
    }
    if cfg.k > d.horizon() {
        return Err(Error::Horizon {
            requested: cfg.k,
            horizon: d.horizon(),
        });
    }
    Ok(cfg.k)
}

/// `r_k = log uc_k / log om_k`: the thin-to-fat prefix share. Positive.
fn thin_ratio_series<F: Real>(d: &DerivedSequences<F>, k_max: usize) -> Vec<F> {
    (1..=k_max)
        .map(|k| d.ln_min_ratio(k).unwrap() / d.ln_max_prefix(k).unwrap())
        .collect()
}

/// Positivity of the global ratio infimum `c_* = inf_{k,j} c_{k,j}`.
pub fn c_star<F: Real>(d: &DerivedSequences<F>, cfg: &ConditionConfig<F>) -> Result<Verdict> {
    let k_max = check_k(d, cfg)?;
    let ln_uc: Vec<F> = (1..=k_max).map(|k| d.ln_min_ratio(k).unwrap()).collect();
    let inf_ln = ln_uc.iter().cloned().fold(F::infinity(), F::min);
    let mut evidence = vec![
        series_of("ln_min_ratio", &ln_uc),
        Series::new("inf_estimate", vec![(k_max as u64, out(inf_ln.exp()))]),
    ];
    let win = (k_max, 0);

    if let Some(hint) = d.schedule().hints().c_star {
        evidence.push(Series::new("analytic_hint", vec![(0, hint)]));
        return Ok(if hint > 0.0 {
            Verdict::holds("analytic hint: positive infimum", evidence, win)
        } else {
            Verdict::fails("analytic hint: infimum zero", evidence, win)
        });
    }

    let eighth = (k_max / 8).max(1);
    let (w1, w2) = windows(k_max);
    let m0 = min_over(&ln_uc, eighth..w1.start.max(eighth + 1));
    let m1 = min_over(&ln_uc, w1.clone());
    let m2 = min_over(&ln_uc, w2.clone());
    let ln_half = lit::<F>(std::f64::consts::LN_2);
    let tiny = lit::<F>(1e-9);

    Ok(if m1 <= m0 - ln_half + tiny && m2 <= m1 - ln_half + tiny {
        Verdict::fails("window minimum keeps halving", evidence, win)
    } else if m2 >= m1 - tiny && m2.is_finite() {
        Verdict::holds("window minimum stable and positive", evidence, win)
    } else {
        Verdict::inconclusive(evidence, win)
    })
}

/// Vanishing of `log uc_k / log om_k`.
pub fn club_check<F: Real>(d: &DerivedSequences<F>, cfg: &ConditionConfig<F>) -> Result<Verdict> {
    let k_max = check_k(d, cfg)?;
    let r = thin_ratio_series(d, k_max);
    let evidence = vec![series_of("thin_ratio", &r)];
    let win = (k_max, 0);
    let (w1, w2) = windows(k_max);
    let max1 = max_over(&r, w1.clone());
    let max2 = max_over(&r, w2.clone());
    let min1 = min_over(&r, w1);
    let min2 = min_over(&r, w2);
    let tiny = lit::<F>(1e-9);

    Ok(if max2 < cfg.eps_ratio && max2 <= max1 + tiny {
        Verdict::holds("tail ratio below threshold and not increasing", evidence, win)
    } else if min1 > cfg.eps_ratio && min2 > cfg.eps_ratio {
        Verdict::fails("ratio stabilizes above threshold", evidence, win)
    } else {
        Verdict::inconclusive(evidence, win)
    })
}

/// `b_k = min { l : om_{k,k+l} <= uc_k }`, or `None` past the search cap.
fn block_lengths<F: Real>(
    d: &DerivedSequences<F>,
    k_max: usize,
    b_cap: usize,
) -> (Vec<Option<usize>>, usize) {
    let k_eff = k_max.min(d.horizon().saturating_sub(b_cap));
    // log-domain slack: exact-equality boundaries (common in structured
    // families) must not flip on round-off in the prefix sums
    let slack = lit::<F>(1e-9);
    let mut b = Vec::with_capacity(k_eff);
    for k in 1..=k_eff {
        let target = d.ln_min_ratio(k).unwrap();
        let base = d.ln_max_prefix(k - 1).unwrap();
        let mut found = None;
        for l in 0..=b_cap {
            if d.ln_max_prefix(k + l).unwrap() - base <= target + slack {
                found = Some(l);
                break;
            }
        }
        b.push(found);
    }
    (b, k_eff)
}

/// Bounded-branching: `sup_k b_k < inf` and `sup_k n_k < inf`.
pub fn bbc_check<F: Real>(d: &DerivedSequences<F>, cfg: &ConditionConfig<F>) -> Result<Verdict> {
    let k_max = check_k(d, cfg)?;
    let (b, k_eff) = block_lengths(d, k_max, cfg.b_cap);
    if k_eff < 8 {
        return Err(Error::Config(
            "condition horizon leaves no room for the block-length search cap".into(),
        ));
    }
    let n: Vec<u32> = (1..=k_eff).map(|k| d.branching(k).unwrap()).collect();

    // record-setting block lengths, useful evidence for growing families
    let mut records: Vec<(u64, f64)> = Vec::new();
    let mut best = -1i64;
    for (i, bk) in b.iter().enumerate() {
        let v = bk.map(|x| x as i64).unwrap_or(i64::MAX);
        if v > best {
            best = v;
            records.push(((i + 1) as u64, bk.map(|x| x as f64).unwrap_or(f64::INFINITY)));
        }
    }
    let b_vals: Vec<F> = b
        .iter()
        .map(|x| lit::<F>(x.map(|v| v as f64).unwrap_or(f64::NAN)))
        .collect();
    let n_vals: Vec<F> = n.iter().map(|&x| lit::<F>(x as f64)).collect();
    let evidence = vec![
        series_of("b", &b_vals),
        Series::new("b_records", records),
        series_of("n", &n_vals),
    ];
    let win = (k_eff, cfg.b_cap);

    if let Some(pos) = b.iter().position(|x| x.is_none()) {
        return Ok(Verdict::fails(
            &format!("block length exceeded cap {} at level {}", cfg.b_cap, pos + 1),
            evidence,
            win,
        ));
    }
    let (w1, w2) = windows(k_eff);
    let bmax = |r: &mut dyn Iterator<Item = usize>| -> usize {
        r.map(|k| b[k - 1].unwrap()).max().unwrap_or(0)
    };
    let b1 = bmax(&mut w1.clone().into_iter());
    let b2 = bmax(&mut w2.clone().into_iter());
    let n1 = w1.clone().map(|k| n[k - 1]).max().unwrap_or(0);
    let n2 = w2.clone().map(|k| n[k - 1]).max().unwrap_or(0);

    // clear growth rather than one-off jitter
    let grown = |a: usize, z: usize| z >= a + 2.max(a / 4);
    Ok(if grown(n1 as usize, n2 as usize) {
        Verdict::fails("unbounded branching", evidence, win)
    } else if grown(b1, b2) {
        Verdict::fails("growing block lengths", evidence, win)
    } else if b2 <= b1 && n2 <= n1 {
        Verdict::holds("block lengths and branching stable", evidence, win)
    } else {
        Verdict::inconclusive(evidence, win)
    })
}

/// Trend `T(l) = sup_k om_{k,k+l}` in log domain, `l = 1..=l_max`.
fn sup_window_products<F: Real>(d: &DerivedSequences<F>, k_max: usize, l_max: usize) -> Vec<F> {
    (1..=l_max)
        .map(|l| {
            let hi = k_max.min(d.horizon() - l);
            (1..=hi)
                .map(|k| d.ln_max_product(k, k + l).unwrap())
                .fold(F::neg_infinity(), F::max)
        })
        .collect()
}

/// Locally contracting: `lim_l sup_k om_{k,k+l} = 0`.
pub fn locally_contracting_check<F: Real>(
    d: &DerivedSequences<F>,
    cfg: &ConditionConfig<F>,
) -> Result<Verdict> {
    let k_max = check_k(d, cfg)?;
    let l_max = cfg.l.max(8).min(d.horizon() - 1);
    let t = sup_window_products(d, k_max, l_max);
    let lin: Vec<F> = t.iter().map(|&x| x.exp()).collect();
    let evidence = vec![series_of("sup_window_product", &lin)];
    let win = (k_max, l_max);
    let (w1, w2) = windows(l_max);
    let max2 = max_over(&t, w2.clone());
    let min1 = min_over(&t, w1);
    let min2 = min_over(&t, w2);
    let floor = lit::<F>(0.1).ln();

    Ok(if max2 <= cfg.eps_product.ln() && t[l_max - 1] <= t[l_max / 2 - 1] {
        Verdict::holds("tail supremum below threshold and decreasing", evidence, win)
    } else if min1 >= floor && min2 >= floor {
        Verdict::fails("tail supremum bounded away from zero", evidence, win)
    } else {
        Verdict::inconclusive(evidence, win)
    })
}

/// Evidence that `sup_k om_{k,k+l}` tends to 1, needed by one of the
/// non-quasi-normality criteria.
fn window_products_near_one<F: Real>(t: &[F], near_one: F) -> bool {
    let (_, w2) = windows(t.len());
    min_over(t, w2) >= near_one.ln()
}

/// Both tail-vanishing ratio conditions used by the three-way identity:
/// `sup_k log uc_k / log om_{k+1,k+l} -> 0` and the shifted variant.
pub fn cdnll_z_check<F: Real>(
    d: &DerivedSequences<F>,
    cfg: &ConditionConfig<F>,
) -> Result<Verdict> {
    let k_max = check_k(d, cfg)?;
    let l_max = cfg.l.max(8);
    if l_max + 2 > d.horizon() {
        return Err(Error::Horizon {
            requested: l_max + 2,
            horizon: d.horizon(),
        });
    }
    let mut head = Vec::with_capacity(l_max);
    let mut tail = Vec::with_capacity(l_max);
    for l in 1..=l_max {
        let hi_a = k_max.min(d.horizon() - l);
        let a = (1..=hi_a)
            .map(|k| d.ln_min_ratio(k).unwrap() / d.ln_max_product(k + 1, k + l).unwrap())
            .fold(F::neg_infinity(), F::max);
        let hi_b = k_max.min(d.horizon().saturating_sub(l + 1));
        let b = (1..=hi_b)
            .map(|k| d.ln_min_ratio(k + l + 1).unwrap() / d.ln_max_product(k + 1, k + l).unwrap())
            .fold(F::neg_infinity(), F::max);
        head.push(a);
        tail.push(b);
    }
    let evidence = vec![
        series_of("sup_head_ratio", &head),
        series_of("sup_tail_ratio", &tail),
    ];
    let win = (k_max, l_max);
    let (w1, w2) = windows(l_max);
    let tiny = lit::<F>(1e-9);
    let ok = |v: &Vec<F>| {
        max_over(v, w2.clone()) < cfg.eps_ratio
            && max_over(v, w2.clone()) <= max_over(v, w1.clone()) + tiny
    };
    let stuck = |v: &Vec<F>| {
        min_over(v, w1.clone()) > cfg.eps_ratio && min_over(v, w2.clone()) > cfg.eps_ratio
    };

    Ok(if ok(&head) && ok(&tail) {
        Verdict::holds("both tail ratios vanish", evidence, win)
    } else if stuck(&head) || stuck(&tail) {
        Verdict::fails("a tail ratio stabilizes above threshold", evidence, win)
    } else {
        Verdict::inconclusive(evidence, win)
    })
}

/// Positive lower bound for `liminf log uc_k / log om_k`.
pub fn liminf_uc_check<F: Real>(
    d: &DerivedSequences<F>,
    cfg: &ConditionConfig<F>,
) -> Result<Verdict> {
    let k_max = check_k(d, cfg)?;
    let r = thin_ratio_series(d, k_max);
    let evidence = vec![series_of("thin_ratio", &r)];
    let win = (k_max, 0);
    let (w1, w2) = windows(k_max);
    let min1 = min_over(&r, w1);
    let min2 = min_over(&r, w2);
    let tiny = lit::<F>(1e-9);

    Ok(if min1 >= cfg.liminf_floor && min2 >= cfg.liminf_floor {
        Verdict::holds("tail minimum above floor", evidence, win)
    } else if min2 < cfg.liminf_floor && min2 <= min1 + tiny {
        Verdict::fails("tail minimum decays below floor", evidence, win)
    } else {
        Verdict::inconclusive(evidence, win)
    })
}

/// Normality and quasi-normality, decided through the verifiable criteria
/// only; anything outside them is inconclusive.
pub fn normality_check<F: Real>(
    d: &DerivedSequences<F>,
    cfg: &ConditionConfig<F>,
    c_star_v: &Verdict,
    bbc_v: &Verdict,
    liminf_v: &Verdict,
) -> Result<(Verdict, Verdict)> {
    let k_max = check_k(d, cfg)?;
    let l_max = cfg.l.max(8).min(d.horizon() - 1);
    let (w1, w2) = windows(k_max);
    let tiny = lit::<F>(1e-9);

    // share of the fattest ratio in the fattest prefix
    let q: Vec<F> = (1..=k_max)
        .map(|k| d.ln_max_ratio(k).unwrap() / d.ln_max_prefix(k).unwrap())
        .collect();
    let r = thin_ratio_series(d, k_max);
    let ln_oc: Vec<F> = (1..=k_max).map(|k| d.ln_max_ratio(k).unwrap()).collect();
    let t = sup_window_products(d, k_max, l_max);

    let normal_basis: Option<&str> = if c_star_v.holds_status() {
        Some("positive ratio infimum")
    } else if min_over(&q, w1.clone()) >= cfg.liminf_floor
        && min_over(&q, w2.clone()) >= cfg.liminf_floor
    {
        Some("max-ratio share bounded below")
    } else if liminf_v.holds_status() && bbc_v.holds_status() {
        Some("min-ratio share bounded below with bounded branching")
    } else {
        None
    };

    // A positive ratio infimum or homogeneity implies quasi-normality
    // outright, and then every failure criterion below is provably
    // inapplicable (pinched ratios force all its limit hypotheses to zero).
    // Finite-window trend heuristics must not get a vote against an exact
    // implication.
    let exact_quasi_normal = c_star_v.holds_status() || d.schedule().is_homogeneous();

    // criteria that rule quasi-normality out; limsup-positivity proxies
    // demand a non-decaying trend across the doubling windows, otherwise a
    // sequence vanishing slowly (like 1/k) would false-positive
    let recurrent = |v: &[F], a: F, b: F| -> bool {
        b >= cfg.liminf_floor && b >= a * lit::<F>(0.75) && !v.is_empty()
    };
    let near_one = window_products_near_one(&t, cfg.near_one);
    let (tw1, tw2) = windows(l_max);
    let t_max1 = max_over(&t, tw1.clone());
    let t_max2 = max_over(&t, tw2.clone());
    let r_max1 = max_over(&r, w1.clone());
    let r_max2 = max_over(&r, w2.clone());
    let not_qn_basis: Option<&str> = if exact_quasi_normal {
        None
    } else if near_one && liminf_v.holds_status() {
        Some("window products approach 1 with thin ratio bounded below")
    } else if out(d.ln_max_prefix(k_max).unwrap()) <= (1e-9f64).ln()
        && t_max2 >= lit::<F>(0.01).ln()
        && t_max2 >= t_max1 + lit::<F>(0.75f64.ln())
        && liminf_v.holds_status()
    {
        Some("vanishing prefix with recurrent window products and thin ratio bounded below")
    } else if {
        let oc_min1 = min_over(&ln_oc, w1.clone());
        let oc_min2 = min_over(&ln_oc, w2.clone());
        let oc_max1 = max_over(&ln_oc, w1.clone());
        let oc_max2 = max_over(&ln_oc, w2.clone());
        let pinched = oc_min2 >= oc_min1 - tiny
            && oc_min2 >= lit::<F>(1e-6).ln()
            && oc_max1 <= lit::<F>(1.0 - 1e-3).ln()
            && oc_max2 <= lit::<F>(1.0 - 1e-3).ln();
        pinched && recurrent(&r, r_max1, r_max2)
    } {
        Some("pinched max ratio with recurrent thin-ratio share")
    } else {
        None
    };

    let evidence = || {
        vec![
            series_of("max_ratio_share", &q),
            series_of("thin_ratio", &r),
            series_of(
                "sup_window_product",
                &t.iter().map(|&x| x.exp()).collect::<Vec<F>>(),
            ),
        ]
    };
    let win = (k_max, l_max);

    let qn_holds_basis: Option<&str> = if normal_basis.is_some() {
        Some("implied by normal")
    } else if d.schedule().is_homogeneous() {
        Some("homogeneous structure")
    } else {
        None
    };

    if let (Some(h), Some(f)) = (qn_holds_basis, not_qn_basis) {
        return Err(Error::Internal(format!(
            "quasi-normality both holds ({h}) and fails ({f})"
        )));
    }

    let quasi_normal = if let Some(f) = not_qn_basis {
        Verdict::fails(f, evidence(), win)
    } else if let Some(h) = qn_holds_basis {
        Verdict::holds(h, evidence(), win)
    } else {
        Verdict::inconclusive(evidence(), win)
    };

    let normal = if let Some(b) = normal_basis {
        Verdict::holds(b, evidence(), win)
    } else if quasi_normal.fails_status() {
        Verdict::fails("not quasi-normal, hence not normal", evidence(), win)
    } else {
        Verdict::inconclusive(evidence(), win)
    };

    Ok((normal, quasi_normal))
}

/// Runs every check. Checks are independent and read-only.
pub fn run_all<F: Real>(
    d: &DerivedSequences<F>,
    cfg: &ConditionConfig<F>,
) -> Result<VerdictBundle<F>> {
    let c_star_v = c_star(d, cfg)?;
    let club = club_check(d, cfg)?;
    let bbc = bbc_check(d, cfg)?;
    let locally_contracting = locally_contracting_check(d, cfg)?;
    let cdnll_z = cdnll_z_check(d, cfg)?;
    let liminf_uc = liminf_uc_check(d, cfg)?;
    let (normal, quasi_normal) = normality_check(d, cfg, &c_star_v, &bbc, &liminf_uc)?;
    Ok(VerdictBundle {
        c_star: c_star_v,
        club,
        bbc,
        locally_contracting,
        cdnll_z,
        liminf_uc,
        normal,
        quasi_normal,
        _marker: std::marker::PhantomData,
    })
}
