//! Log-space arithmetic for the union bound over containers.
//!
//! At the lattice sizes where the bound bites (`n = 10^16` and up) the quantities involved are
//! towers: `m ≈ 2^n`, and each factor of the bound is `exp(c · m)`. Every factor is therefore
//! carried as the logarithm of its logarithm. The dominant `n ln 2` term is shared by all of
//! them, and the margins are formed with that term cancelled symbolically so they keep full
//! precision.

use alloc::format;
use core::f64::consts::{LN_10, LN_2, PI};

use crate::error::{Error, Result};

/// Largest `s` for which [`small_binom_sum_log`] sums terms exactly.
pub const EXACT_SUM_MAX: u64 = 1_000_000;
/// Below this the central binomial uses log-gamma instead of the asymptotic series.
const SERIES_MIN_N: f64 = 1000.0;

/// `ln n!`
pub fn ln_factorial(n: u64) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// `ln C(n, k)` for real arguments; `-inf` outside `0 <= k <= n`.
pub fn ln_binomial(n: f64, k: f64) -> f64 {
    if k < 0.0 || k > n {
        return f64::NEG_INFINITY;
    }
    libm::lgamma(n + 1.0) - libm::lgamma(k + 1.0) - libm::lgamma(n - k + 1.0)
}

/// `ln C(n, floor(n/2)) - n ln 2`, accurate to better than `1e-6` for all `n`.
///
/// For `n >= 1000` this uses `ln C(2k, k) = 2k ln 2 - ln(πk)/2 - 1/(8k) + 1/(192k^3)`, whose
/// truncation error is below `1/(640 k^5)`; odd `n` goes through `C(2k+1, k) = C(2k+2, k+1)/2`.
pub fn ln_central_binomial_excess(n: f64) -> f64 {
    if n < SERIES_MIN_N {
        let n = libm::floor(n);
        return ln_binomial(n, libm::floor(n / 2.0)) - n * LN_2;
    }
    let even = |two_k: f64| {
        let k = two_k / 2.0;
        -0.5 * libm::log(PI * k) - 1.0 / (8.0 * k) + 1.0 / (192.0 * k * k * k)
    };
    if libm::fmod(n, 2.0) == 0.0 {
        even(n)
    } else {
        // halving C(n+1, ·) cancels the extra ln 2 of n+1
        even(n + 1.0)
    }
}

/// `ln C(n, floor(n/2))`.
pub fn ln_central_binomial(n: f64) -> f64 {
    n * LN_2 + ln_central_binomial_excess(n)
}

/// `ln Σ_{k <= t_cap} C(s, k)`: exact for `s <= 10^6`, otherwise the upper bound
/// `min(t (ln(s/t) + 1), s ln 2)`.
pub fn small_binom_sum_log(s: u64, t_cap: u64) -> f64 {
    let top = t_cap.min(s);
    if top == 0 {
        return 0.0;
    }
    if s <= EXACT_SUM_MAX {
        let sf = s as f64;
        let terms = (0..=top).map(|k| ln_binomial(sf, k as f64));
        return log_sum_exp(terms);
    }
    let (sf, tf) = (s as f64, top as f64);
    (tf * (libm::log(sf / tf) + 1.0)).min(sf * LN_2)
}

fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let peak = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return peak;
    }
    peak + libm::log(terms.map(|x| libm::exp(x - peak)).sum::<f64>())
}

/// `ln` of the multiplicative Chernoff tail `exp(-δ² μ / (2 + δ))`, `δ = threshold/mean - 1`.
pub fn chernoff_log_bound(mean: f64, threshold: f64) -> Result<f64> {
    if !(mean > 0.0 && threshold > mean && threshold.is_finite()) {
        return Err(Error::Precondition(format!(
            "Chernoff tail needs threshold > mean > 0, got mean={mean} threshold={threshold}"
        )));
    }
    let delta = threshold / mean - 1.0;
    Ok(-delta * delta * mean / (2.0 + delta))
}

/// The exponent `-eps^2 pmt / 100` used in the union bound.
pub fn target_chernoff_exponent(eps: f64, pmt: f64) -> f64 {
    -eps * eps * pmt / 100.0
}

/// Whether the Chernoff tail for mean `(1+eps/4) pmt` and threshold `(1+eps/2) pmt` is at most
/// `exp(-eps^2 pmt / 100)`.
pub fn chernoff_dominates(eps: f64, pmt: f64) -> Result<bool> {
    let bound = chernoff_log_bound((1.0 + eps / 4.0) * pmt, (1.0 + eps / 2.0) * pmt)?;
    Ok(bound <= target_chernoff_exponent(eps, pmt))
}

/// A signed quantity `sign · exp(ln_abs)`, used for logarithms too large for an `f64`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct HugeLog {
    pub sign: i8,
    pub ln_abs: f64,
}

impl HugeLog {
    fn from_value(x: f64) -> Self {
        if x == 0.0 {
            HugeLog {
                sign: 0,
                ln_abs: f64::MIN,
            }
        } else {
            HugeLog {
                sign: if x > 0.0 { 1 } else { -1 },
                ln_abs: libm::log(x.abs()),
            }
        }
    }
}

/// Logarithms of the four factors of the displayed union bound.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FactorLogs {
    /// `(a_max + 1)(b_max + 1)`, the number of summands.
    pub count: HugeLog,
    /// `C(2^n, a_max) p^a_max`.
    pub first_selection: HugeLog,
    /// `C((t+2)m, b_max) p^b_max`.
    pub second_selection: HugeLog,
    /// `exp(-eps^2 pmt / 100)`.
    pub chernoff: HugeLog,
}

/// `ln ln(factor) - ln(eps^2 pmt / 400)`; negative means the factor is at most
/// `exp(eps^2 pmt / 400)`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FactorMargins {
    pub count: f64,
    pub first_selection: f64,
    pub second_selection: f64,
}

impl FactorMargins {
    pub fn all_negative(&self) -> bool {
        self.count < 0.0 && self.first_selection < 0.0 && self.second_selection < 0.0
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoundReport {
    pub n_exponent: u32,
    pub n: f64,
    pub t: u32,
    pub eps: f64,
    pub eps1: f64,
    /// `C = 10^10 eps^-5`.
    pub c: f64,
    pub p: f64,
    pub ln_p: f64,
    pub ln_m: f64,
    /// `ln a_max`, `a_max = n^-(t+0.9) 2^n`.
    pub ln_a_max: f64,
    /// `ln b_max`, `b_max = (t+2) m / (eps1^2 n^t)`.
    pub ln_b_max: f64,
    pub log_terms: FactorLogs,
    /// `ln(eps^2 pmt / 400)`, the per-factor allowance.
    pub ln_allowance: f64,
    /// `ln(eps^2 pmt / 100)`.
    pub chernoff_exponent_ln: f64,
    pub margins: FactorMargins,
    /// `ln((t+2)/eps1^2) - ln(eps C t / 2)`; negative means `|S1 ∪ S2|` costs at most
    /// `eps pmt / 2` of the excess.
    pub selection_margin: f64,
    /// Upper bound on `ln Π`.
    pub total_log_pi: HugeLog,
    pub total_negative: bool,
}

/// `ln(1 + e^x)`
fn softplus(x: f64) -> f64 {
    if x > 40.0 {
        x
    } else {
        libm::log1p(libm::exp(x))
    }
}

/// `C = 10^10 eps^-5`.
pub fn container_constant(eps: f64) -> f64 {
    1e10 * libm::pow(eps, -5.0)
}

/// Smallest `k` with `C / (10^k)^t <= 1`.
pub fn min_feasible_n_exponent(t: u32, eps: f64) -> u32 {
    let ln_c = 10.0 * LN_10 - 5.0 * libm::log(eps);
    libm::ceil(ln_c / (f64::from(t) * LN_10) - 1e-12).max(0.0) as u32
}

/// Evaluates the displayed union bound at `n = 10^n_exponent`, `p = C / n^t`.
pub fn union_bound_report(n_exponent: u32, t: u32, eps: f64) -> Result<BoundReport> {
    if t == 0 {
        return Err(Error::Parameter("t must be a positive integer".into()));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Parameter(format!("eps={eps} must lie in (0, 1]")));
    }
    let tf = f64::from(t);
    let ln_n = f64::from(n_exponent) * LN_10;
    let n = libm::exp(ln_n);
    let eps1 = eps / 4.0;
    let c = container_constant(eps);
    let ln_c = libm::log(c);
    let ln_p = ln_c - tf * ln_n;
    if ln_p > 0.0 {
        return Err(Error::Parameter(format!(
            "p = C/n^t = {} exceeds 1 at n=10^{n_exponent}; smallest feasible n exponent is {}",
            libm::exp(ln_p),
            min_feasible_n_exponent(t, eps)
        )));
    }
    let n_ln2 = n * LN_2;
    let excess_m = ln_central_binomial_excess(n);
    let ln_m = n_ln2 + excess_m;

    // Allowance ln(eps^2 pmt / 400), split as n ln 2 + excess.
    let allowance_excess = libm::log(eps * eps / 400.0) + ln_p + excess_m + libm::log(tf);
    let ln_allowance = n_ln2 + allowance_excess;

    let ln_a_max = n_ln2 - (tf + 0.9) * ln_n;
    let ln_b_max = libm::log(tf + 2.0) + ln_m - 2.0 * libm::log(eps1) - tf * ln_n;

    // Number of summands.
    let ln_count = softplus(ln_a_max) + softplus(ln_b_max);
    let count_margin = libm::log(ln_count) - ln_allowance;

    // C(N, k) p^k <= exp(k (ln(N/k) + 1 + ln p)).
    let first_inner = (tf + 0.9) * ln_n + 1.0 + ln_p;
    let second_inner = 2.0 * libm::log(eps1) + tf * ln_n + 1.0 + ln_p;
    let selection = |ln_k: f64, ln_k_excess: f64, inner: f64| {
        if inner > 0.0 {
            (
                HugeLog {
                    sign: 1,
                    ln_abs: ln_k + libm::log(inner),
                },
                ln_k_excess + libm::log(inner) - allowance_excess,
            )
        } else {
            // The factor is at most 1; compare ln 1 = 0 against the allowance instead.
            (HugeLog::from_value(inner), -ln_allowance)
        }
    };
    let (first_log, first_margin) =
        selection(ln_a_max, -(tf + 0.9) * ln_n, first_inner);
    let (second_log, second_margin) = selection(
        ln_b_max,
        libm::log(tf + 2.0) + excess_m - 2.0 * libm::log(eps1) - tf * ln_n,
        second_inner,
    );

    let chernoff_exponent_ln = ln_allowance + libm::log(4.0);
    let chernoff = HugeLog {
        sign: -1,
        ln_abs: chernoff_exponent_ln,
    };

    // ln Π <= allowance · (Σ ratio_i - 4), ratio_i = ln(F_i) / allowance.
    let ratio = |log: HugeLog, margin: f64| f64::from(log.sign) * libm::exp(margin);
    let count_log = HugeLog {
        sign: 1,
        ln_abs: libm::log(ln_count),
    };
    let scaled_total = ratio(count_log, count_margin)
        + ratio(first_log, first_margin)
        + ratio(second_log, second_margin)
        - 4.0;
    let total_log_pi = HugeLog {
        sign: if scaled_total < 0.0 {
            -1
        } else if scaled_total > 0.0 {
            1
        } else {
            0
        },
        ln_abs: ln_allowance + libm::log(scaled_total.abs()),
    };

    let selection_margin =
        libm::log((tf + 2.0) / (eps1 * eps1)) - libm::log(eps / 2.0 * c * tf);

    Ok(BoundReport {
        n_exponent,
        n,
        t,
        eps,
        eps1,
        c,
        p: libm::exp(ln_p),
        ln_p,
        ln_m,
        ln_a_max,
        ln_b_max,
        log_terms: FactorLogs {
            count: count_log,
            first_selection: first_log,
            second_selection: second_log,
            chernoff,
        },
        ln_allowance,
        chernoff_exponent_ln,
        margins: FactorMargins {
            count: count_margin,
            first_selection: first_margin,
            second_selection: second_margin,
        },
        selection_margin,
        total_log_pi,
        total_negative: scaled_total < 0.0,
    })
}
