//! Boost sequences and the analytic guarantee calculator.
//!
//! A boost sequence fixes the initial wealth `β₀` and the wealth earned by
//! each rejection. Boosts are indexed by rejection count: the `r`-th
//! rejection earns [`BoostSequence::boost`]`(r)`.
//!
//! For SupLORD with offset `a` the two quantities that everything hinges on are
//!
//! ```text
//! w₀ = ε*·r* / C_a(1/δ*) − a      (budget for β₀ and the first r*−1 boosts)
//! b  = ε*    / C_a(1/δ*)          (cap on every boost from rejection r* on)
//! ```
//!
//! with `C_a(1/δ) = log(1/δ) / (a·log(1 + log(1/δ)/a))`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{BoostCondition, Error, Result};
use crate::numerics;
use crate::tolerance;

/// User parameters of SupLORD: FDP threshold `ε*`, exceedance probability
/// `δ*`, the number of rejections `r*` after which control starts, and the
/// estimator offset `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupLordParams {
    pub epsilon_star: f64,
    pub delta_star: f64,
    pub r_star: usize,
    pub a: f64,
}

impl SupLordParams {
    pub fn new(epsilon_star: f64, delta_star: f64, r_star: usize, a: f64) -> Result<Self> {
        if !(epsilon_star > 0.0 && epsilon_star < 1.0) {
            return Err(Error::Domain(format!("epsilon* must lie in (0,1), got {epsilon_star}")));
        }
        if !(delta_star > 0.0 && delta_star < 1.0) {
            return Err(Error::Domain(format!("delta* must lie in (0,1), got {delta_star}")));
        }
        if r_star == 0 {
            return Err(Error::Domain("r* must be a positive integer".into()));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Domain(format!("offset a must be positive, got {a}")));
        }
        Ok(SupLordParams { epsilon_star, delta_star, r_star, a })
    }

    /// Parameters with `a` set to the value that maximises `w₀`.
    pub fn with_canonical_a(epsilon_star: f64, delta_star: f64, r_star: usize) -> Result<Self> {
        let a = canonical_a(epsilon_star, delta_star, r_star)?;
        Self::new(epsilon_star, delta_star, r_star, a)
    }

    /// `C_a(1/δ*)`.
    pub fn coef(&self) -> f64 {
        coef_unchecked(self.delta_star, self.a)
    }

    /// Upper bound on `β₀ + Σ_{r<r*} β_r`. Negative when infeasible.
    pub fn w0(&self) -> f64 {
        self.epsilon_star * self.r_star as f64 / self.coef() - self.a
    }

    /// Cap on every boost from rejection `r*` onwards.
    pub fn per_rejection_cap(&self) -> f64 {
        self.epsilon_star / self.coef()
    }
}

/// `C_a(1/δ) = log(1/δ) / (a·log(1 + log(1/δ)/a))`.
pub fn coef(delta: f64, a: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta must lie in (0,1), got {delta}")));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!("offset a must be positive, got {a}")));
    }
    Ok(coef_unchecked(delta, a))
}

fn coef_unchecked(delta: f64, a: f64) -> f64 {
    coef_of_log(-delta.ln(), a)
}

/// The coefficient written in terms of `L = log(1/δ)`; tends to 1 as `L → 0`.
fn coef_of_log(l: f64, a: f64) -> f64 {
    if l <= 0.0 {
        return 1.0;
    }
    let x = l / a;
    if x < 1e-8 {
        // log1p(x)/x = 1 - x/2 + x²/3 - ...
        return 1.0 / (1.0 - x / 2.0 + x * x / 3.0);
    }
    x / x.ln_1p()
}

/// `c_a = ∫₀¹ C_a(1/δ) dδ`, to absolute accuracy `tol`.
///
/// The middle of the interval is integrated adaptively. Both end pieces are
/// replaced by the midpoint of analytic lower and upper bounds whose gap is
/// below `tol/10`.
pub fn c_a(a: f64, tol: f64) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!("offset a must be positive, got {a}")));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    // Left end: with L = log(1/δ), ∫₀^{δ₀} C dδ = ∫_{L₀}^∞ g(L) e^{-L} dL where
    // g(L) = L/(a log(1+L/a)) is increasing, so the piece lies in
    // [δ₀·g(L₀), δ₀·(L₀+1)/(a log(1+L₀/a))].
    let mut d0 = 1e-3;
    let (left_lo, left_hi) = loop {
        let l0 = -f64::ln(d0);
        let lower = d0 * coef_of_log(l0, a);
        let upper = d0 * (l0 + 1.0) / (a * (l0 / a).ln_1p());
        if upper < tol / 10.0 {
            break (lower, upper);
        }
        d0 /= 10.0;
        if d0 < 1e-300 {
            return Err(Error::Numerical("left tail of c_a does not shrink".into()));
        }
    };
    // Right end: 1 <= C <= C(1/(1-δ₁)) on [1-δ₁, 1].
    let mut d1 = 1e-3;
    let (right_lo, right_hi) = loop {
        let upper = d1 * coef_unchecked(1.0 - d1, a);
        if upper - d1 < tol / 10.0 {
            break (d1, upper);
        }
        d1 /= 10.0;
        if d1 < 1e-15 {
            return Err(Error::Numerical("right tail of c_a does not shrink".into()));
        }
    };
    let body = numerics::adaptive_simpson(|d| coef_unchecked(d, a), d0, 1.0 - d1, tol / 2.0)?;
    Ok(body + 0.5 * (left_lo + left_hi) + 0.5 * (right_lo + right_hi))
}

/// The offset `a` maximising `w₀(a) = ε*r*/C_a(1/δ*) − a`.
///
/// Solves `log(1 + L/a) − L/(a+L) = L/(ε*r*)`, `L = log(1/δ*)`, by bisection.
/// The left side falls strictly from `+∞` to 0, so there is exactly one root.
pub fn canonical_a(epsilon_star: f64, delta_star: f64, r_star: usize) -> Result<f64> {
    // Reuse the range checks; the offset is a placeholder.
    SupLordParams::new(epsilon_star, delta_star, r_star, 1.0)?;
    let l = -delta_star.ln();
    let rhs = l / (epsilon_star * r_star as f64);
    let h = |a: f64| (l / a).ln_1p() - l / (a + l) - rhs;
    let mut hi = 1.0;
    while h(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Numerical("canonical a: no upper bracket".into()));
        }
    }
    // Walk down from the upper bracket; the last halving leaves h(2·lo) <= 0 < h(lo).
    let mut lo = hi;
    while h(lo) <= 0.0 {
        lo /= 2.0;
        if lo < 1e-300 {
            return Err(Error::Numerical("canonical a: no lower bracket".into()));
        }
    }
    numerics::bisect(h, lo, 2.0 * lo, tolerance::ROOT_RELATIVE)
}

/// Which construction produced a [`BoostSequence`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoostKind {
    SupLordDefault,
    MfdrSafe,
    Lord,
    AlphaSpending,
    Custom,
}

/// Initial wealth plus per-rejection boosts.
///
/// Rejection `r` (1-based) earns `phase1[r-1]` while `r <= phase1.len()`
/// and `phase2` afterwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostSequence {
    pub beta0: f64,
    pub phase1: Vec<f64>,
    pub phase2: f64,
    pub kind: BoostKind,
}

impl BoostSequence {
    pub fn custom(beta0: f64, phase1: Vec<f64>, phase2: f64) -> Self {
        BoostSequence { beta0, phase1, phase2, kind: BoostKind::Custom }
    }

    /// Boost earned by the `r`-th rejection (`r >= 1`).
    #[inline]
    pub fn boost(&self, r: usize) -> f64 {
        debug_assert!(r >= 1);
        match self.phase1.get(r.wrapping_sub(1)) {
            Some(&b) => b,
            None => self.phase2,
        }
    }

    /// `β₀ + β₁`, the quantity bounded for fixed-time FDR and mFDR control.
    pub fn first_pair(&self) -> f64 {
        self.beta0 + self.boost(1)
    }

    /// Checks nonnegativity and finiteness only; the SupLORD conditions are
    /// checked by [`validate_boosts`].
    pub fn check_nonnegative(&self) -> Result<()> {
        let bad = std::iter::once(self.beta0)
            .chain(self.phase1.iter().copied())
            .chain(std::iter::once(self.phase2))
            .find(|b| !(b.is_finite() && *b >= 0.0));
        match bad {
            Some(b) => Err(Error::BoostViolation {
                condition: BoostCondition::Nonnegative,
                excess: if b.is_finite() { -b } else { f64::INFINITY },
            }),
            None => Ok(()),
        }
    }
}

fn infeasible(params: &SupLordParams) -> Error {
    Error::Infeasible(format!(
        "w0 = eps*·r*/C_a(1/delta*) - a = {:.6} < 0 for eps*={}, delta*={}, r*={}, a={}; increase r*",
        params.w0(),
        params.epsilon_star,
        params.delta_star,
        params.r_star,
        params.a
    ))
}

/// Default SupLORD boosts: `w₀` split evenly over `β₀` and the first `r*−1`
/// rejections, then `b` per rejection.
pub fn suplord_default_boosts(params: &SupLordParams) -> Result<BoostSequence> {
    let w0 = params.w0();
    if w0 < 0.0 {
        return Err(infeasible(params));
    }
    let slot = w0 / params.r_star as f64;
    Ok(BoostSequence {
        beta0: slot,
        phase1: vec![slot; params.r_star - 1],
        phase2: params.per_rejection_cap(),
        kind: BoostKind::SupLordDefault,
    })
}

/// Boosts with `β₀ + β₁ <= b`, which additionally give fixed-time FDR and
/// mFDR control at level `b`.
///
/// `β₀ = w₀/(2r*)`, `β₁ = (ε*r*/C − a·1{r*>1})/(2r*)`, the remaining
/// rejections before `r*` earn `w₀/r*` and later ones earn `b`.
pub fn mfdr_safe_boosts(params: &SupLordParams) -> Result<BoostSequence> {
    let w0 = params.w0();
    if w0 < 0.0 {
        return Err(infeasible(params));
    }
    let r = params.r_star as f64;
    let beta0 = w0 / (2.0 * r);
    let indicator = if params.r_star > 1 { 1.0 } else { 0.0 };
    let beta1 = (params.epsilon_star * r / params.coef() - params.a * indicator) / (2.0 * r);
    let mut phase1 = Vec::with_capacity(params.r_star.max(1));
    phase1.push(beta1);
    phase1.extend(std::iter::repeat(w0 / r).take(params.r_star.saturating_sub(2)));
    Ok(BoostSequence {
        beta0,
        phase1,
        phase2: params.per_rejection_cap(),
        kind: BoostKind::MfdrSafe,
    })
}

/// LORD boosts at level `ℓ`: `β₀ = fℓ`, `β₁ = (1−f)ℓ`, `β_r = ℓ` for `r > 1`.
pub fn lord_boosts(level: f64, beta0_fraction: f64) -> Result<BoostSequence> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain(format!("level must lie in (0,1), got {level}")));
    }
    if !(0.0..=1.0).contains(&beta0_fraction) {
        return Err(Error::Domain(format!("beta0 fraction must lie in [0,1], got {beta0_fraction}")));
    }
    Ok(BoostSequence {
        beta0: beta0_fraction * level,
        phase1: vec![(1.0 - beta0_fraction) * level],
        phase2: level,
        kind: BoostKind::Lord,
    })
}

/// Alpha-spending (online Bonferroni): all budget up front, no boosts.
pub fn alpha_spending_boosts(level: f64) -> Result<BoostSequence> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain(format!("level must lie in (0,1), got {level}")));
    }
    Ok(BoostSequence { beta0: level, phase1: Vec::new(), phase2: 0.0, kind: BoostKind::AlphaSpending })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub condition: BoostCondition,
    /// Amount by which the bound is exceeded.
    pub excess: f64,
}

/// Every violated condition of a boost sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn into_error(self) -> Error {
        let v = self.violations[0];
        Error::BoostViolation { condition: v.condition, excess: v.excess }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{} exceeded by {:e}", v.condition, v.excess)?;
        }
        Ok(())
    }
}

/// Checks a boost sequence against the SupLORD conditions for `params`,
/// each to additive tolerance [`tolerance::VALIDATION`].
pub fn validate_boosts(seq: &BoostSequence, params: &SupLordParams) -> std::result::Result<(), ValidationReport> {
    let mut violations = Vec::new();
    if let Err(Error::BoostViolation { condition, excess }) = seq.check_nonnegative() {
        violations.push(Violation { condition, excess });
    }
    let early: f64 = seq.beta0 + (1..params.r_star).map(|r| seq.boost(r)).sum::<f64>();
    let excess = early - params.w0();
    if excess > tolerance::VALIDATION {
        violations.push(Violation { condition: BoostCondition::InitialPhase, excess });
    }
    let late_max = seq
        .phase1
        .iter()
        .skip(params.r_star - 1)
        .copied()
        .fold(seq.phase2, f64::max);
    let excess = late_max - params.per_rejection_cap();
    if excess > tolerance::VALIDATION {
        violations.push(Violation { condition: BoostCondition::PerRejection, excess });
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(ValidationReport { violations })
    }
}

/// A bound that holds only when `β₀ + β₁ <= b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionalBound {
    pub bound: f64,
    pub active: bool,
}

/// Every error bound implied by a validated SupLORD configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuaranteeSummary {
    pub params: SupLordParams,
    /// `C_a(1/δ*)`.
    pub coef: f64,
    pub c_a: f64,
    pub w0: f64,
    pub per_rejection_cap: f64,
    /// `P(sup_{k ≥ t_{r*}} FDP ≥ ε*) ≤ δ*`; stored as `(ε*, δ*, r*)`.
    pub fdx: (f64, f64, usize),
    /// `E[sup_{k ≥ t_{r*}} FDP] ≤ c_a·ε*/C_a(1/δ*)`.
    pub supfd_bound: f64,
    /// FDR at any stopping time `τ ≥ t_{r*}`; same value as `supfd_bound`.
    pub fdr_stopping_bound: f64,
    pub mfdr: ConditionalBound,
    pub fixed_time_fdr: ConditionalBound,
}

impl GuaranteeSummary {
    /// The FDP threshold controlled at exceedance probability `delta`:
    /// `ε*·C_a(1/δ)/C_a(1/δ*)`.
    pub fn fdx_family(&self, delta: f64) -> Result<f64> {
        Ok(self.params.epsilon_star * coef(delta, self.params.a)? / self.coef)
    }

    /// One record per line: a record name followed by `key=value` pairs.
    pub fn to_key_value(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        s += &format!("params eps={} delta={} rstar={} a={}\n", p.epsilon_star, p.delta_star, p.r_star, p.a);
        s += &format!("constants coef={} c_a={} w0={} b={}\n", self.coef, self.c_a, self.w0, self.per_rejection_cap);
        s += &format!("fdx eps={} delta={} from_rejection={}\n", self.fdx.0, self.fdx.1, self.fdx.2);
        s += &format!("supfd bound={} from_rejection={}\n", self.supfd_bound, p.r_star);
        s += &format!("fdr_stopping bound={} from_rejection={}\n", self.fdr_stopping_bound, p.r_star);
        s += &format!("mfdr bound={} active={}\n", self.mfdr.bound, self.mfdr.active);
        s += &format!("fixed_time_fdr bound={} active={}\n", self.fixed_time_fdr.bound, self.fixed_time_fdr.active);
        s
    }

    /// Two-column CSV (`key,value`) with the same content as [`to_key_value`](Self::to_key_value).
    pub fn to_csv(&self) -> String {
        let p = &self.params;
        let rows: [(&str, String); 15] = [
            ("eps", p.epsilon_star.to_string()),
            ("delta", p.delta_star.to_string()),
            ("rstar", p.r_star.to_string()),
            ("a", p.a.to_string()),
            ("coef", self.coef.to_string()),
            ("c_a", self.c_a.to_string()),
            ("w0", self.w0.to_string()),
            ("b", self.per_rejection_cap.to_string()),
            ("fdx_from_rejection", self.fdx.2.to_string()),
            ("supfd_bound", self.supfd_bound.to_string()),
            ("fdr_stopping_bound", self.fdr_stopping_bound.to_string()),
            ("mfdr_bound", self.mfdr.bound.to_string()),
            ("mfdr_active", self.mfdr.active.to_string()),
            ("fixed_time_fdr_bound", self.fixed_time_fdr.bound.to_string()),
            ("fixed_time_fdr_active", self.fixed_time_fdr.active.to_string()),
        ];
        let mut s = String::from("key,value\n");
        for (k, v) in rows {
            s += &format!("{k},{v}\n");
        }
        s
    }
}

pub fn guarantee_summary(params: &SupLordParams, seq: &BoostSequence) -> Result<GuaranteeSummary> {
    validate_boosts(seq, params).map_err(ValidationReport::into_error)?;
    let coef = params.coef();
    let c = c_a(params.a, tolerance::QUADRATURE)?;
    let b = params.per_rejection_cap();
    let active = seq.first_pair() <= b + tolerance::VALIDATION;
    let supfd = c * params.epsilon_star / coef;
    Ok(GuaranteeSummary {
        params: *params,
        coef,
        c_a: c,
        w0: params.w0(),
        per_rejection_cap: b,
        fdx: (params.epsilon_star, params.delta_star, params.r_star),
        supfd_bound: supfd,
        fdr_stopping_bound: supfd,
        mfdr: ConditionalBound { bound: b, active },
        fixed_time_fdr: ConditionalBound { bound: b, active },
    })
}
