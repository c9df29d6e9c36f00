//! Ratio schedules: the level data `(n_k, c_{k,1..n_k})` of a Moran structure.
//!
//! A schedule is MSC-admissible when `n_k >= 2`, every ratio lies in `(0,1)`,
//! and `sum_j c_{k,j}^d <= 1` for the ambient dimension `d`. Ratios are carried
//! in log domain throughout; products of ratios are never formed directly.

mod derived;
mod doc;
mod family;

pub use derived::DerivedSequences;
pub(crate) use derived::TypeTable;
pub use doc::ScheduleDoc;
pub use family::Family;

use crate::error::{Error, Result};
use crate::num::{lit, out, Real};

/// Ordered contraction ratios of one construction level.
///
/// Stored as `ln c_{k,j}`; the linear values are recovered on demand so that
/// families with extremely small ratios stay representable.
#[derive(Clone, Debug)]
pub struct RatioVector<F> {
    level: usize,
    ln_ratios: Vec<F>,
}

impl<F: Real> RatioVector<F> {
    fn new(level: usize, ln_ratios: Vec<F>) -> Result<Self> {
        if ln_ratios.len() < 2 {
            return Err(Error::Config(format!(
                "level {level}: branching {} < 2",
                ln_ratios.len()
            )));
        }
        for (j, &ln) in ln_ratios.iter().enumerate() {
            if !(ln < F::zero()) || !ln.is_finite() {
                return Err(Error::Config(format!(
                    "level {level}: ratio {} not in (0,1) (ln = {ln})",
                    j + 1
                )));
            }
        }
        Ok(Self { level, ln_ratios })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// `n_k`, the number of children.
    pub fn branching(&self) -> usize {
        self.ln_ratios.len()
    }

    pub fn ln_ratios(&self) -> &[F] {
        &self.ln_ratios
    }

    pub fn ratios(&self) -> Vec<F> {
        self.ln_ratios.iter().map(|&x| x.exp()).collect()
    }

    pub fn ln_max(&self) -> F {
        self.ln_ratios.iter().cloned().fold(F::neg_infinity(), F::max)
    }

    pub fn ln_min(&self) -> F {
        self.ln_ratios.iter().cloned().fold(F::infinity(), F::min)
    }

    /// `sum_j c_{k,j}^e`, evaluated stably from the stored logs.
    pub fn power_sum(&self, e: F) -> F {
        self.ln_ratios
            .iter()
            .map(|&ln| (e * ln).exp())
            .fold(F::zero(), |a, b| a + b)
    }
}

/// How level data is produced.
#[derive(Clone, Debug)]
enum Kind {
    /// Explicit per-level ratio vectors, then a cyclic tail.
    Explicit {
        prefix: Vec<Vec<f64>>,
        tail: Vec<Vec<f64>>,
    },
    /// A named parametric family.
    Family(Family),
}

/// Optional declared limits. Never trusted silently: each one is cross-checked
/// against the computed horizon value when derived sequences are built.
#[derive(Clone, Debug, Default)]
pub struct Hints {
    /// Exact value of `inf_{k,j} c_{k,j}`, when known.
    pub c_star: Option<f64>,
    /// Exact value of `sup_k n_k`, when finite and known.
    pub n_sup: Option<u64>,
    /// Free-form provenance note.
    pub note: Option<String>,
}

/// A Moran ratio schedule: ambient dimension plus a rule producing the level
/// data for every `k >= 1`. Immutable after construction; queries are pure.
#[derive(Clone, Debug)]
pub struct RatioSchedule<F> {
    dim: u32,
    kind: Kind,
    homogeneous: bool,
    hints: Hints,
    _marker: std::marker::PhantomData<F>,
}

impl<F: Real> RatioSchedule<F> {
    /// Explicit prefix plus cyclic tail. With an empty tail the schedule is
    /// only defined up to the prefix length.
    pub fn explicit(dim: u32, prefix: Vec<Vec<f64>>, tail: Vec<Vec<f64>>) -> Result<Self> {
        Self::explicit_with_hints(dim, prefix, tail, Hints::default(), false)
    }

    pub fn explicit_with_hints(
        dim: u32,
        prefix: Vec<Vec<f64>>,
        tail: Vec<Vec<f64>>,
        hints: Hints,
        declared_homogeneous: bool,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("ambient dimension must be >= 1".into()));
        }
        if prefix.is_empty() && tail.is_empty() {
            return Err(Error::Config("schedule has no levels".into()));
        }
        let homogeneous = prefix
            .iter()
            .chain(tail.iter())
            .all(|v| v.windows(2).all(|w| w[0] == w[1]));
        if declared_homogeneous && !homogeneous {
            return Err(Error::Config(
                "declared homogeneous but some level has unequal ratios".into(),
            ));
        }
        let sched = Self {
            dim,
            kind: Kind::Explicit { prefix, tail },
            homogeneous,
            hints,
            _marker: std::marker::PhantomData,
        };
        // Fail malformed ratio vectors at construction, not at query time.
        sched.level(1)?;
        Ok(sched)
    }

    /// A registry family. Parameter validity is checked here.
    pub fn family(dim: u32, family: Family) -> Result<Self> {
        Self::family_with_hints(dim, family, Hints::default())
    }

    pub fn family_with_hints(dim: u32, family: Family, hints: Hints) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("ambient dimension must be >= 1".into()));
        }
        family.check()?;
        let homogeneous = family.is_homogeneous();
        Ok(Self {
            dim,
            kind: Kind::Family(family),
            homogeneous,
            hints,
            _marker: std::marker::PhantomData,
        })
    }

    /// Ambient dimension `d`.
    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Whether every level uses a single ratio value.
    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous
    }

    pub fn hints(&self) -> &Hints {
        &self.hints
    }

    /// Largest level the schedule can produce, if bounded.
    pub fn max_level(&self) -> Option<usize> {
        match &self.kind {
            Kind::Explicit { prefix, tail } if tail.is_empty() => Some(prefix.len()),
            Kind::Explicit { .. } => None,
            Kind::Family(f) => f.max_level(),
        }
    }

    /// The ratio vector of level `k` (1-indexed). Deterministic.
    pub fn level(&self, k: usize) -> Result<RatioVector<F>> {
        if k == 0 {
            return Err(Error::Config("levels are 1-indexed".into()));
        }
        if let Some(max) = self.max_level() {
            if k > max {
                return Err(Error::Horizon {
                    requested: k,
                    horizon: max,
                });
            }
        }
        let ln = match &self.kind {
            Kind::Explicit { prefix, tail } => {
                let raw = if k <= prefix.len() {
                    &prefix[k - 1]
                } else {
                    &tail[(k - prefix.len() - 1) % tail.len()]
                };
                raw.iter()
                    .map(|&c| {
                        if c > 0.0 && c < 1.0 {
                            Ok(lit::<F>(c.ln()))
                        } else {
                            Err(Error::Config(format!("level {k}: ratio {c} not in (0,1)")))
                        }
                    })
                    .collect::<Result<Vec<F>>>()?
            }
            Kind::Family(f) => f.level_ln::<F>(k)?,
        };
        RatioVector::new(k, ln)
    }

    /// Per-level MSC slack report: `slack_k = 1 - sum_j c_{k,j}^d` for `k <= horizon`.
    pub fn validate(&self, horizon: usize) -> Result<ValidationReport> {
        if horizon == 0 {
            return Err(Error::Config("validation horizon must be >= 1".into()));
        }
        let d = lit::<F>(self.dim as f64);
        let mut rows = Vec::with_capacity(horizon);
        let mut violation = None;
        for k in 1..=horizon {
            let lv = self.level(k)?;
            let sum = out(lv.power_sum(d));
            let slack = 1.0 - sum;
            if slack < -1e-12 && violation.is_none() {
                violation = Some(LevelSlack { level: k, sum, slack });
            }
            rows.push(LevelSlack { level: k, sum, slack });
        }
        Ok(ValidationReport {
            horizon,
            ok: violation.is_none(),
            violation,
            rows,
        })
    }
}

/// One row of a validation report.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct LevelSlack {
    pub level: usize,
    pub sum: f64,
    pub slack: f64,
}

/// Result of checking `sum_j c_{k,j}^d <= 1` level by level.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ValidationReport {
    pub horizon: usize,
    pub ok: bool,
    /// First offending level, if any.
    pub violation: Option<LevelSlack>,
    pub rows: Vec<LevelSlack>,
}

impl ValidationReport {
    /// Smallest slack over the checked window.
    pub fn min_slack(&self) -> f64 {
        self.rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min)
    }
}
