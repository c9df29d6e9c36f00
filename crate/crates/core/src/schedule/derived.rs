//! Eagerly precomputed per-level statistics over a fixed horizon.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::num::{lit, out, Real};
use crate::schedule::RatioSchedule;

/// Distinct level layouts are interned; schedules with at most this many
/// layouts get O(1) windowed pressure evaluation via prefix counts.
const TYPE_CAP: usize = 8;

/// Per-level extremes, cumulative log-products, and grouped ratio tables for
/// levels `1..=horizon`. Immutable after construction; all queries are pure
/// and safe for concurrent readers.
pub struct DerivedSequences<F> {
    schedule: Arc<RatioSchedule<F>>,
    horizon: usize,
    // grouped level data, one arena for all levels; groups sorted by
    // descending ratio, multiplicities alongside
    group_ln: Vec<F>,
    group_mult: Vec<u32>,
    offsets: Vec<u32>,
    n: Vec<u32>,
    ln_oc: Vec<F>,
    ln_uc: Vec<F>,
    // prefix sums of ln oc / ln uc; index 0 holds 0
    pref_oc: Vec<F>,
    pref_uc: Vec<F>,
    // interned level layouts when few enough
    typed: Option<TypeTable<F>>,
}

pub(crate) struct TypeTable<F> {
    /// For each type: grouped (ln ratio, multiplicity).
    pub groups: Vec<(Vec<F>, Vec<u32>)>,
    /// Per type, prefix counts over levels; index 0 holds 0.
    pub pref: Vec<Vec<u32>>,
}

impl<F: Real> std::fmt::Debug for DerivedSequences<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DerivedSequences")
            .field("horizon", &self.horizon)
            .field("dim", &self.schedule.dim())
            .finish_non_exhaustive()
    }
}

impl<F: Real> DerivedSequences<F> {
    /// Builds the derived arrays for `1..=horizon`, enforcing MSC
    /// admissibility at every level and cross-checking analytic hints.
    pub fn build(schedule: Arc<RatioSchedule<F>>, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::Config("horizon must be >= 1".into()));
        }
        if let Some(max) = schedule.max_level() {
            if horizon > max {
                return Err(Error::Horizon {
                    requested: horizon,
                    horizon: max,
                });
            }
        }
        let d = lit::<F>(schedule.dim() as f64);
        let admissibility_slack = lit::<F>(1e-12);

        let mut group_ln = Vec::new();
        let mut group_mult = Vec::new();
        let mut offsets = Vec::with_capacity(horizon + 1);
        offsets.push(0u32);
        let mut n = Vec::with_capacity(horizon);
        let mut ln_oc = Vec::with_capacity(horizon);
        let mut ln_uc = Vec::with_capacity(horizon);
        let mut pref_oc = Vec::with_capacity(horizon + 1);
        let mut pref_uc = Vec::with_capacity(horizon + 1);
        pref_oc.push(F::zero());
        pref_uc.push(F::zero());

        let mut intern: HashMap<Vec<(u64, u32)>, u32> = HashMap::new();
        let mut type_of: Vec<u32> = Vec::with_capacity(horizon);
        let mut typed_alive = true;

        let mut scratch: Vec<F> = Vec::new();
        for k in 1..=horizon {
            let lv = schedule.level(k)?;
            scratch.clear();
            scratch.extend_from_slice(lv.ln_ratios());
            scratch.sort_by(|a, b| b.partial_cmp(a).expect("finite log-ratio"));

            let start = group_ln.len();
            for &x in scratch.iter() {
                match group_ln.last() {
                    Some(&prev) if prev == x && group_ln.len() > start => {
                        *group_mult.last_mut().unwrap() += 1;
                    }
                    _ if group_ln.len() > start && *group_ln.last().unwrap() == x => {
                        *group_mult.last_mut().unwrap() += 1;
                    }
                    _ => {
                        group_ln.push(x);
                        group_mult.push(1);
                    }
                }
            }
            offsets.push(group_ln.len() as u32);

            // admissibility: sum of mult * exp(d ln c) <= 1
            let mut sum = F::zero();
            for gi in start..group_ln.len() {
                sum = sum + lit::<F>(group_mult[gi] as f64) * (d * group_ln[gi]).exp();
            }
            if sum > F::one() + admissibility_slack {
                return Err(Error::Inadmissible {
                    level: k,
                    sum: out(sum),
                });
            }

            n.push(lv.branching() as u32);
            let oc = group_ln[start];
            let uc = *group_ln.last().unwrap();
            ln_oc.push(oc);
            ln_uc.push(uc);
            pref_oc.push(*pref_oc.last().unwrap() + oc);
            pref_uc.push(*pref_uc.last().unwrap() + uc);

            if typed_alive {
                let key: Vec<(u64, u32)> = (start..group_ln.len())
                    .map(|gi| (out(group_ln[gi]).to_bits(), group_mult[gi]))
                    .collect();
                let next_id = intern.len() as u32;
                let id = *intern.entry(key).or_insert(next_id);
                if intern.len() > TYPE_CAP {
                    typed_alive = false;
                } else {
                    type_of.push(id);
                }
            }
        }

        let typed = if typed_alive {
            let ntypes = intern.len();
            let mut groups: Vec<(Vec<F>, Vec<u32>)> = vec![(Vec::new(), Vec::new()); ntypes];
            let mut seen = vec![false; ntypes];
            for (k, &t) in type_of.iter().enumerate() {
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    let s = offsets[k] as usize;
                    let e = offsets[k + 1] as usize;
                    groups[t as usize] = (group_ln[s..e].to_vec(), group_mult[s..e].to_vec());
                }
            }
            let mut pref: Vec<Vec<u32>> = vec![Vec::with_capacity(horizon + 1); ntypes];
            for p in pref.iter_mut() {
                p.push(0);
            }
            for &t in type_of.iter() {
                for (ti, p) in pref.iter_mut().enumerate() {
                    let prev = *p.last().unwrap();
                    p.push(prev + u32::from(ti as u32 == t));
                }
            }
            Some(TypeTable { groups, pref })
        } else {
            None
        };

        let this = Self {
            schedule,
            horizon,
            group_ln,
            group_mult,
            offsets,
            n,
            ln_oc,
            ln_uc,
            pref_oc,
            pref_uc,
            typed,
        };
        this.check_hints()?;
        Ok(this)
    }

    /// Analytic hints are never trusted silently. A finite window only upper
    /// bounds the true infimum, so the check is one-sided.
    fn check_hints(&self) -> Result<()> {
        let hints = self.schedule.hints().clone();
        if let Some(c_star) = hints.c_star {
            let observed = out(self.ln_uc.iter().cloned().fold(F::infinity(), F::min).exp());
            if c_star > observed + 1e-9 {
                return Err(Error::HintMismatch {
                    name: "c_star",
                    declared: c_star,
                    observed,
                });
            }
        }
        if let Some(n_sup) = hints.n_sup {
            let observed = self.n.iter().cloned().max().unwrap_or(0) as u64;
            if observed > n_sup {
                return Err(Error::HintMismatch {
                    name: "n_sup",
                    declared: n_sup as f64,
                    observed: observed as f64,
                });
            }
        }
        Ok(())
    }

    pub fn schedule(&self) -> &Arc<RatioSchedule<F>> {
        &self.schedule
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn dim(&self) -> u32 {
        self.schedule.dim()
    }

    fn check_level(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.horizon {
            Err(Error::Horizon {
                requested: k,
                horizon: self.horizon,
            })
        } else {
            Ok(())
        }
    }

    /// `n_k`.
    pub fn branching(&self, k: usize) -> Result<u32> {
        self.check_level(k)?;
        Ok(self.n[k - 1])
    }

    /// `ln` of the level maximum ratio.
    pub fn ln_max_ratio(&self, k: usize) -> Result<F> {
        self.check_level(k)?;
        Ok(self.ln_oc[k - 1])
    }

    /// `ln` of the level minimum ratio.
    pub fn ln_min_ratio(&self, k: usize) -> Result<F> {
        self.check_level(k)?;
        Ok(self.ln_uc[k - 1])
    }

    /// `ln` of the fattest depth-`k` cylinder; `k = 0` gives the empty word (0).
    pub fn ln_max_prefix(&self, k: usize) -> Result<F> {
        if k > self.horizon {
            return Err(Error::Horizon {
                requested: k,
                horizon: self.horizon,
            });
        }
        Ok(self.pref_oc[k])
    }

    /// `ln` of the thinnest depth-`k` cylinder; `k = 0` gives 0.
    pub fn ln_min_prefix(&self, k: usize) -> Result<F> {
        if k > self.horizon {
            return Err(Error::Horizon {
                requested: k,
                horizon: self.horizon,
            });
        }
        Ok(self.pref_uc[k])
    }

    /// Exact prefix-sum difference: `(ln max-product, ln min-product)` over
    /// levels `p..=q`. Errors past the horizon, never extrapolates.
    pub fn cumulative(&self, p: usize, q: usize) -> Result<(F, F)> {
        if p == 0 || p > q {
            return Err(Error::Config(format!("bad cumulative range {p}..={q}")));
        }
        self.check_level(q)?;
        Ok((
            self.pref_oc[q] - self.pref_oc[p - 1],
            self.pref_uc[q] - self.pref_uc[p - 1],
        ))
    }

    /// `ln` of the max product over `p..=q`.
    pub fn ln_max_product(&self, p: usize, q: usize) -> Result<F> {
        Ok(self.cumulative(p, q)?.0)
    }

    /// `ln` of the min product over `p..=q`.
    pub fn ln_min_product(&self, p: usize, q: usize) -> Result<F> {
        Ok(self.cumulative(p, q)?.1)
    }

    /// Grouped `(ln ratio, multiplicity)` table of level `k`, ratios descending.
    pub fn groups(&self, k: usize) -> Result<(&[F], &[u32])> {
        self.check_level(k)?;
        let s = self.offsets[k - 1] as usize;
        let e = self.offsets[k] as usize;
        Ok((&self.group_ln[s..e], &self.group_mult[s..e]))
    }

    pub(crate) fn typed(&self) -> Option<&TypeTable<F>> {
        self.typed.as_ref()
    }

    /// Number of interned level layouts, when few enough to intern.
    pub fn type_count(&self) -> Option<usize> {
        self.typed.as_ref().map(|t| t.groups.len())
    }
}
