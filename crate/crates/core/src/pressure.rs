//! Pressure-law abstraction.
//!
//! A law `p(rho)` enters the momentum flux as `eps^2 p(rho)` and must satisfy
//! `p'(rho) > 0` and `2 p'(rho) + rho p''(rho) > 0` on the densities a run
//! visits. Two closed-form families are built in: the power law
//! `p = rho^gamma` (gamma >= 1, `p -> 0` as `rho -> 0`) and the logarithmic
//! law `p = ln rho` (`p -> -inf`). Arbitrary laws can be loaded as tables.

use std::sync::Arc;

use crate::error::{Result, SolverError};
use crate::interp::{linspace, Pchip};

/// Behaviour of `p(rho)` as `rho -> 0+`: finite (normalised to zero) or `-inf`.
/// The two cases need different hypotheses at density jumps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitClass {
    FiniteZero,
    MinusInfinity,
}

#[derive(Debug, Clone)]
pub enum PressureKind {
    GammaLaw { gamma: f64 },
    LogLaw,
    Tabulated(Arc<Pchip>),
}

#[derive(Debug, Clone)]
pub struct PressureModel {
    kind: PressureKind,
    limit_class: LimitClass,
}

/// Which admissibility inequality a sampled point violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdmissibilityCondition {
    /// `p'(rho) > 0`
    SlopePositive,
    /// `2 p'(rho) + rho p''(rho) > 0`
    CurvaturePositive,
}

#[derive(Debug, Clone)]
pub struct AdmissibilityReport {
    pub range: (f64, f64),
    pub violations: Vec<(f64, AdmissibilityCondition)>,
    pub passed: bool,
}

/// Outcome of the blow-up-time convergence hypotheses on the curvature
/// functional `I`: monotonicity, and divergence of `int_0^delta I(s)/s^2 ds`.
#[derive(Debug, Clone, Copy)]
pub struct BlowupConditions {
    pub monotone_i: bool,
    pub integral_diverges: bool,
}

/// Growth factor over the last two cutoff decades above which the improper
/// integral is declared divergent.
pub const DIVERGENCE_FACTOR: f64 = 10.0;

impl PressureModel {
    pub fn gamma_law(gamma: f64) -> Result<Self> {
        if !(gamma >= 1.0) {
            return Err(SolverError::Config(format!(
                "gamma law needs gamma >= 1, got {gamma}"
            )));
        }
        Ok(PressureModel {
            kind: PressureKind::GammaLaw { gamma },
            limit_class: LimitClass::FiniteZero,
        })
    }

    pub fn log_law() -> Self {
        PressureModel {
            kind: PressureKind::LogLaw,
            limit_class: LimitClass::MinusInfinity,
        }
    }

    /// Tabulated law from `(rho, p)` samples with strictly increasing `rho`.
    /// Monotone cubic interpolation keeps `p'` positive wherever the data is
    /// increasing; linear extension is used outside the table. Tables are
    /// classified `FiniteZero` (a log-type law should use the built-in).
    pub fn tabulated(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 4 {
            return Err(SolverError::Config(
                "tabulated pressure law needs at least 4 samples".into(),
            ));
        }
        let xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
        if xs[0] <= 0.0 {
            return Err(SolverError::NonPositiveDensity(xs[0]));
        }
        for w in xs.windows(2) {
            if w[1] <= w[0] {
                return Err(SolverError::Config(format!(
                    "tabulated densities must increase strictly: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(PressureModel {
            kind: PressureKind::Tabulated(Arc::new(Pchip::new(xs, ys))),
            limit_class: LimitClass::FiniteZero,
        })
    }

    pub fn limit_class(&self) -> LimitClass {
        self.limit_class
    }

    pub fn kind(&self) -> &PressureKind {
        &self.kind
    }

    /// Infimum of the range of `p` (lower bound for invertible arguments).
    pub fn range_infimum(&self) -> f64 {
        match &self.kind {
            PressureKind::GammaLaw { .. } => 0.0,
            PressureKind::LogLaw => f64::NEG_INFINITY,
            // linear extension makes the table invertible on all of R below
            // its first knot only until p crosses zero slope; treat the value
            // extrapolated to rho -> 0 as the practical infimum
            PressureKind::Tabulated(t) => {
                let x0 = t.xs()[0];
                t.eval(x0) - t.deriv(x0) * x0
            }
        }
    }

    /// `(p, p', p'')` at a positive density.
    pub fn evaluate(&self, rho: f64) -> Result<(f64, f64, f64)> {
        if !(rho > 0.0) {
            return Err(SolverError::NonPositiveDensity(rho));
        }
        Ok(match &self.kind {
            PressureKind::GammaLaw { gamma } => {
                let g = *gamma;
                let p = rho.powf(g);
                let dp = g * rho.powf(g - 1.0);
                let ddp = if g == 1.0 {
                    0.0
                } else {
                    g * (g - 1.0) * rho.powf(g - 2.0)
                };
                (p, dp, ddp)
            }
            PressureKind::LogLaw => (rho.ln(), 1.0 / rho, -1.0 / (rho * rho)),
            PressureKind::Tabulated(t) => (t.eval(rho), t.deriv(rho), t.second_deriv(rho)),
        })
    }

    /// `p(rho)` alone.
    pub fn p(&self, rho: f64) -> Result<f64> {
        Ok(self.evaluate(rho)?.0)
    }

    /// `rho p'(rho)`, the sound-speed factor in `lambda_1 = u - eps^2 rho p'`.
    pub fn rho_dp(&self, rho: f64) -> Result<f64> {
        let (_, dp, _) = self.evaluate(rho)?;
        Ok(rho * dp)
    }

    /// Inverse of the (strictly increasing) law. Exact closed forms for the
    /// built-ins; safeguarded Newton with bracket expansion for tables.
    /// Relative round-trip tolerance 1e-12.
    pub fn p_inverse(&self, q: f64) -> Result<f64> {
        match &self.kind {
            PressureKind::GammaLaw { gamma } => {
                if q <= 0.0 {
                    return Err(SolverError::OutOfRange { q, infimum: 0.0 });
                }
                Ok(q.powf(1.0 / *gamma))
            }
            PressureKind::LogLaw => Ok(q.exp()),
            PressureKind::Tabulated(t) => {
                let inf = self.range_infimum();
                if q <= inf {
                    return Err(SolverError::OutOfRange { q, infimum: inf });
                }
                tabulated_inverse(t, q)
            }
        }
    }

    /// Curvature functional of the gradient equation,
    /// `I(rho) = (2 rho p' + rho^2 p'') / (rho p')^2`.
    /// Closed forms for the built-ins: `I = 1` for the log law and
    /// `I = (gamma+1) / (gamma rho^gamma)` for the power law.
    pub fn curvature(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(SolverError::NonPositiveDensity(rho));
        }
        Ok(match &self.kind {
            PressureKind::LogLaw => 1.0,
            PressureKind::GammaLaw { gamma } => (*gamma + 1.0) / (*gamma * rho.powf(*gamma)),
            PressureKind::Tabulated(_) => {
                let (_, dp, ddp) = self.evaluate(rho)?;
                let s = rho * dp;
                (2.0 * rho * dp + rho * rho * ddp) / (s * s)
            }
        })
    }

    /// Sample both admissibility inequalities on a uniform grid over `range`.
    pub fn validate_admissibility(
        &self,
        range: (f64, f64),
        n_samples: usize,
    ) -> AdmissibilityReport {
        assert!(n_samples >= 2, "need at least two samples");
        assert!(
            range.0 > 0.0 && range.1 > range.0,
            "range must be positive and ordered"
        );
        let mut violations = Vec::new();
        for rho in linspace(range.0, range.1, n_samples) {
            match self.evaluate(rho) {
                Ok((_, dp, ddp)) => {
                    if !(dp > 0.0) {
                        violations.push((rho, AdmissibilityCondition::SlopePositive));
                    }
                    if !(2.0 * dp + rho * ddp > 0.0) {
                        violations.push((rho, AdmissibilityCondition::CurvaturePositive));
                    }
                }
                Err(_) => violations.push((rho, AdmissibilityCondition::SlopePositive)),
            }
        }
        AdmissibilityReport {
            range,
            passed: violations.is_empty(),
            violations,
        }
    }

    /// Check the blow-up-time convergence hypotheses.
    ///
    /// `monotone_i`: `I` nondecreasing on the sampled range (constant passes).
    /// `integral_diverges`: the partial integrals `int_c^delta I(s)/s^2 ds`
    /// keep growing by more than [`DIVERGENCE_FACTOR`] over the last two
    /// cutoffs as `c` walks down the given decreasing sequence.
    pub fn check_blowup_conditions(&self, delta: f64, cutoffs: &[f64]) -> Result<BlowupConditions> {
        if !(delta > 0.0) {
            return Err(SolverError::Config(format!(
                "delta must be positive, got {delta}"
            )));
        }
        if cutoffs.len() < 3 {
            return Err(SolverError::Config("need at least three cutoffs".into()));
        }
        for w in cutoffs.windows(2) {
            if !(w[1] < w[0]) {
                return Err(SolverError::Config("cutoffs must decrease strictly".into()));
            }
        }
        let c_min = *cutoffs.last().unwrap();
        if !(c_min > 0.0) {
            return Err(SolverError::Config("cutoffs must stay positive".into()));
        }

        // monotonicity sampled log-uniformly on [min cutoff, max(delta, 1)]
        let hi = delta.max(1.0);
        let n = 512;
        let mut monotone = true;
        let mut prev = f64::NEG_INFINITY;
        for k in 0..n {
            let t = k as f64 / (n - 1) as f64;
            let rho = c_min * (hi / c_min).powf(t);
            let i = self.curvature(rho)?;
            if i < prev - 1e-12 * (1.0 + prev.abs()) {
                monotone = false;
                break;
            }
            prev = i;
        }

        // partial integrals via s = e^w so the 1/s^2 scale is resolved
        let mut partials = Vec::with_capacity(cutoffs.len());
        let mut acc = 0.0;
        let mut upper = delta;
        for &c in cutoffs {
            if c < upper {
                let (a, b) = (c.ln(), upper.ln());
                let piece = integrate_log(self, a, b)?;
                acc += piece;
                upper = c;
            }
            partials.push(acc);
        }
        let m = partials.len();
        let tail_growth = partials[m - 1] / partials[m - 3].max(f64::MIN_POSITIVE);
        Ok(BlowupConditions {
            monotone_i: monotone,
            integral_diverges: tail_growth > DIVERGENCE_FACTOR,
        })
    }
}

/// `int I(e^w)/e^w dw` over `[a, b]` by composite Simpson; this equals
/// `int I(s)/s^2 ds` over `[e^a, e^b]`.
fn integrate_log(model: &PressureModel, a: f64, b: f64) -> Result<f64> {
    let n = 256;
    let m = 2 * n;
    let h = (b - a) / m as f64;
    let mut acc = 0.0;
    for k in 0..=m {
        let w = a + h * k as f64;
        let s = w.exp();
        let val = model.curvature(s)? / s;
        let weight = if k == 0 || k == m {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += weight * val;
    }
    Ok(acc * h / 3.0)
}

fn tabulated_inverse(t: &Pchip, q: f64) -> Result<f64> {
    let xs = t.xs();
    let (mut lo, mut hi) = (xs[0], xs[xs.len() - 1]);
    // expand the bracket through the linear extensions if needed
    let mut guard = 0;
    while t.eval(lo) > q {
        lo *= 0.5;
        guard += 1;
        if guard > 200 {
            return Err(SolverError::OutOfRange {
                q,
                infimum: t.eval(lo),
            });
        }
    }
    guard = 0;
    while t.eval(hi) < q {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(SolverError::OutOfRange {
                q,
                infimum: t.eval(xs[0]),
            });
        }
    }
    // safeguarded Newton
    let mut x = 0.5 * (lo + hi);
    for _ in 0..100 {
        let fx = t.eval(x) - q;
        if fx.abs() <= 1e-12 * (1.0 + q.abs()) {
            return Ok(x);
        }
        if fx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let dfx = t.deriv(x);
        let newton = x - fx / dfx;
        x = if dfx > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Ok(x)
}
