//! The registry of parametric schedule families.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::num::{lit, Real};

/// Largest level with `2^k * ln 2` representable in `f64`.
const DOUBLE_EXP_MAX_LEVEL: usize = 1024;

/// Named parametric families.
///
/// Each family documents its parameter validity domain and rejects parameters
/// outside it at construction time.
#[derive(Clone, Debug)]
pub enum Family {
    /// Homogeneous middle-gap Cantor schedule: `n_k = 2`, `c_k = (1 - gap)/2`.
    /// Domain: `gap` in `(0, 1)`.
    MiddleCantor { gap: f64 },
    /// `n_k = 2`, `c_k = 2^{-2^k}` for both children. Homogeneous with
    /// super-exponentially shrinking ratios. Domain: levels `k <= 1024`.
    DoubleExp,
    /// `n_k = k + 1` equal ratios `1/(2k)`. Homogeneous with unbounded branching.
    HarmonicBranch,
    /// `n_k = 2`. At triangular indices `k = n(n+1)/2` the pair is
    /// `(1/(1+2^n), 2^n/(1+2^n))`; elsewhere `(1/2, 1/2)`.
    Triangular,
    /// `n_k = 2`, first ratio `1/2`; the second cycles through three phases
    /// driven by a strictly increasing index sequence `a_n`:
    /// `1/4` on `[a_n, 2a_n)`, `1/2` on `[2a_n, 2a_n + n)`, `1/8` on
    /// `[2a_n + n, a_{n+1})`. Domain: `a_1 = 1`, `a_{n+1} > 2 a_n + n`.
    PhaseBlocks { breaks: Arc<Vec<u64>> },
    /// `n_k = 2`, `c_{k,1} = 1 - (k+1)^{-alpha}`, `c_{k,2} = (k+1)^{-beta}`.
    /// Domain: `0 < alpha < beta`.
    PowerPair { alpha: f64, beta: f64 },
}

impl Family {
    pub fn middle_cantor(gap: f64) -> Self {
        Family::MiddleCantor { gap }
    }

    pub fn power_pair(alpha: f64, beta: f64) -> Self {
        Family::PowerPair { alpha, beta }
    }

    /// The default block-index sequence: `a_1 = 1`,
    /// `a_{n+1} = max(2 a_n + n + 1, n a_n)`, extended until it covers `cover`.
    pub fn default_breaks(cover: u64) -> Vec<u64> {
        let mut a = vec![1u64];
        let mut n = 1u64;
        while *a.last().unwrap() <= cover.saturating_mul(2).saturating_add(64) {
            let last = *a.last().unwrap();
            let next = (2 * last + n + 1).max(n * last);
            a.push(next);
            n += 1;
        }
        a
    }

    /// Block family with the default index sequence covering `cover` levels.
    pub fn phase_blocks_default(cover: u64) -> Self {
        Family::PhaseBlocks {
            breaks: Arc::new(Self::default_breaks(cover)),
        }
    }

    /// Block family with an explicit index sequence.
    pub fn phase_blocks(breaks: Vec<u64>) -> Self {
        Family::PhaseBlocks {
            breaks: Arc::new(breaks),
        }
    }

    /// Parameter validity check.
    pub fn check(&self) -> Result<()> {
        match self {
            Family::MiddleCantor { gap } => {
                if !(*gap > 0.0 && *gap < 1.0) {
                    return Err(Error::Config(format!(
                        "middle-cantor gap {gap} outside (0,1)"
                    )));
                }
            }
            Family::DoubleExp | Family::HarmonicBranch | Family::Triangular => {}
            Family::PhaseBlocks { breaks } => {
                if breaks.first() != Some(&1) {
                    return Err(Error::Config("phase-blocks: a_1 must be 1".into()));
                }
                if breaks.len() < 2 {
                    return Err(Error::Config("phase-blocks: need at least a_1, a_2".into()));
                }
                for (i, w) in breaks.windows(2).enumerate() {
                    let n = (i + 1) as u64;
                    if w[1] <= 2 * w[0] + n {
                        return Err(Error::Config(format!(
                            "phase-blocks: a_{} = {} must exceed 2 a_{} + {} = {}",
                            n + 1,
                            w[1],
                            n,
                            n,
                            2 * w[0] + n
                        )));
                    }
                }
            }
            Family::PowerPair { alpha, beta } => {
                if !(*alpha > 0.0 && *beta > *alpha) {
                    return Err(Error::Config(format!(
                        "power-pair requires 0 < alpha < beta, got alpha={alpha}, beta={beta}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Whether every level has equal ratios.
    pub fn is_homogeneous(&self) -> bool {
        matches!(
            self,
            Family::MiddleCantor { .. } | Family::DoubleExp | Family::HarmonicBranch
        )
    }

    /// Largest defined level, if the family domain is bounded.
    pub fn max_level(&self) -> Option<usize> {
        match self {
            Family::DoubleExp => Some(DOUBLE_EXP_MAX_LEVEL),
            // beyond 2 a_last + n the phase is undefined
            Family::PhaseBlocks { breaks } => Some((*breaks.last().unwrap() - 1) as usize),
            _ => None,
        }
    }

    /// Log-ratios of level `k`, in child order.
    pub fn level_ln<F: Real>(&self, k: usize) -> Result<Vec<F>> {
        let ln2 = lit::<F>(std::f64::consts::LN_2);
        match self {
            Family::MiddleCantor { gap } => {
                let ln = lit::<F>(((1.0 - gap) / 2.0).ln());
                Ok(vec![ln, ln])
            }
            Family::DoubleExp => {
                let e = lit::<F>(-(2f64.powi(k as i32))) * ln2;
                Ok(vec![e, e])
            }
            Family::HarmonicBranch => {
                let ln = -lit::<F>((2.0 * k as f64).ln());
                Ok(vec![ln; k + 1])
            }
            Family::Triangular => {
                if let Some(n) = triangular_order(k) {
                    // (1/(1+2^n), 2^n/(1+2^n)) computed without forming 2^n
                    let small = lit::<F>(-((n as f64) * std::f64::consts::LN_2 + (2f64.powi(-(n as i32))).ln_1p()));
                    let big = lit::<F>(-(2f64.powi(-(n as i32))).ln_1p());
                    Ok(vec![small, big])
                } else {
                    Ok(vec![-ln2, -ln2])
                }
            }
            Family::PhaseBlocks { breaks } => {
                let k64 = k as u64;
                let n = match breaks.binary_search(&k64) {
                    Ok(i) => i + 1,
                    Err(0) => {
                        return Err(Error::Config(format!("phase-blocks: level {k} before a_1")))
                    }
                    Err(i) => i,
                } as u64;
                let a_n = breaks[(n - 1) as usize];
                let second = if k64 < 2 * a_n {
                    lit::<F>(-2.0) * ln2 // 1/4
                } else if k64 < 2 * a_n + n {
                    -ln2 // 1/2
                } else {
                    lit::<F>(-3.0) * ln2 // 1/8
                };
                Ok(vec![-ln2, second])
            }
            Family::PowerPair { alpha, beta } => {
                let x = (k as f64) + 1.0;
                let first = lit::<F>((-x.powf(-alpha)).ln_1p());
                let second = lit::<F>(-beta * x.ln());
                Ok(vec![first, second])
            }
        }
    }
}

/// If `k = n(n+1)/2` for some `n >= 1`, returns `n`.
fn triangular_order(k: usize) -> Option<u64> {
    let k = k as u64;
    let n = (((8 * k + 1) as f64).sqrt() as u64).saturating_sub(1) / 2;
    for cand in n.saturating_sub(1)..=n + 1 {
        if cand >= 1 && cand * (cand + 1) / 2 == k {
            return Some(cand);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangular_orders() {
        assert_eq!(triangular_order(1), Some(1));
        assert_eq!(triangular_order(3), Some(2));
        assert_eq!(triangular_order(6), Some(3));
        assert_eq!(triangular_order(10), Some(4));
        assert_eq!(triangular_order(2), None);
        assert_eq!(triangular_order(7), None);
    }

    #[test]
    fn default_breaks_recurrence() {
        let a = Family::default_breaks(10_000);
        assert_eq!(&a[..8], &[1, 4, 11, 33, 132, 660, 3960, 27720]);
        for (i, w) in a.windows(2).enumerate() {
            let n = (i + 1) as u64;
            assert!(w[1] > 2 * w[0] + n);
        }
    }

    #[test]
    fn phase_blocks_level_pattern() {
        let f = Family::phase_blocks_default(100);
        // a_2 = 4: levels 4..8 -> 1/4, 8..10 -> 1/2 (n = 2), 10..11 -> 1/8
        let second = |k: usize| f.level_ln::<f64>(k).unwrap()[1].exp();
        assert!((second(4) - 0.25).abs() < 1e-14);
        assert!((second(7) - 0.25).abs() < 1e-14);
        assert!((second(8) - 0.5).abs() < 1e-14);
        assert!((second(9) - 0.5).abs() < 1e-14);
        assert!((second(10) - 0.125).abs() < 1e-14);
    }

    #[test]
    fn double_exp_exact_log() {
        let f = Family::DoubleExp;
        let ln = f.level_ln::<f64>(5).unwrap();
        assert!((ln[0] + 32.0 * std::f64::consts::LN_2).abs() < 1e-12);
        // deep levels remain finite in log domain
        let deep = f.level_ln::<f64>(900).unwrap();
        assert!(deep[0].is_finite() && deep[0] < 0.0);
        assert!(f.level_ln::<f64>(DOUBLE_EXP_MAX_LEVEL).is_ok());
    }
}
