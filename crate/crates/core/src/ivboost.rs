//! Two-stage IV estimation with a boosted first stage.
//!
//! The first stage boosts the endogenous regressor on the instruments and
//! uses the fitted values `D̂` as a single constructed instrument. The second
//! stage is the just-identified IV estimator `(Σ D̂ d̃)⁻¹ Σ D̂ ỹ`, which is
//! 2SLS with `D̂` instrumenting `d`. Exogenous controls, when given, are
//! partialled out of `y`, `d` and every instrument beforehand.

use alloc::vec::Vec;

use crate::boosting::{fit_learner, BoostConfig, DesignMatrix, Learner};
use crate::error::{Error, Result};
use crate::numerics::{
    check_finite, dot, mean, ols_solve, residuals, sum_sq, two_sided_critical, two_sided_p_value,
    RealMatrix,
};

#[derive(Debug, Clone, PartialEq)]
pub struct IVConfig {
    pub learner: Learner,
    pub boost_cfg: BoostConfig,
    /// Always-included exogenous regressors (raw scale), partialled out.
    pub exog_controls: Option<RealMatrix>,
    pub ci_level: f64,
}

impl Default for IVConfig {
    fn default() -> Self {
        Self {
            learner: Learner::PostBoost,
            boost_cfg: BoostConfig::default(),
            exog_controls: None,
            ci_level: 0.95,
        }
    }
}

impl IVConfig {
    pub fn with_learner(learner: Learner) -> Self {
        Self {
            learner,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IVResult {
    pub alpha_hat: f64,
    pub se: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub p_value: f64,
    pub first_stage_support: Vec<usize>,
    /// Constructed instrument `D̂`, demeaned.
    pub d_hat: Vec<f64>,
    /// `Ω̂ = E_n[ε̂² D̂²]`.
    pub omega_hat: f64,
    /// `Q̂ = E_n[D̂²]`.
    pub q_hat: f64,
}

/// Residual-maker for the exogenous controls (plus intercept).
struct Partialler {
    controls: Option<RealMatrix>,
}

impl Partialler {
    fn new(controls: Option<&RealMatrix>, n: usize) -> Result<Self> {
        let Some(w) = controls else {
            return Ok(Self { controls: None });
        };
        if w.nrows() != n {
            return Err(Error::InvalidInput(alloc::format!(
                "exogenous controls have {} rows, expected {n}",
                w.nrows()
            )));
        }
        if w.ncols() == 0 {
            return Ok(Self { controls: None });
        }
        let mut centred = RealMatrix::zeros(n, 0);
        for c in w.columns() {
            let m = mean(c);
            let col: Vec<f64> = c.iter().map(|v| v - m).collect();
            centred.push_column(&col)?;
        }
        Ok(Self {
            controls: Some(centred),
        })
    }

    fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let m = mean(v);
        let vc: Vec<f64> = v.iter().map(|e| e - m).collect();
        match &self.controls {
            None => Ok(vc),
            Some(w) => {
                let coef = ols_solve(w, &vc)?;
                Ok(residuals(w, &vc, &coef))
            }
        }
    }
}

/// Just-identified IV stage with a given demeaned instrument `d_hat`.
///
/// `y_t` and `d_t` must already have controls (or means) removed.
pub fn iv_second_stage(
    y_t: &[f64],
    d_t: &[f64],
    d_hat: Vec<f64>,
    first_stage_support: Vec<usize>,
    ci_level: f64,
) -> Result<IVResult> {
    let n = y_t.len();
    if d_t.len() != n || d_hat.len() != n {
        return Err(Error::InvalidInput("second-stage vectors differ in length".into()));
    }
    if !(ci_level > 0.0 && ci_level < 1.0) {
        return Err(Error::InvalidInput("ci_level must lie in (0, 1)".into()));
    }
    let q_hat = sum_sq(&d_hat) / n as f64;
    let cross = dot(&d_hat, d_t);
    if !(q_hat >= 1e-12) || cross == 0.0 {
        return Err(Error::DegenerateInstrument { q: q_hat });
    }
    let alpha_hat = dot(&d_hat, y_t) / cross;
    let omega_hat = y_t
        .iter()
        .zip(d_t)
        .zip(&d_hat)
        .map(|((y, d), h)| {
            let e = y - d * alpha_hat;
            e * e * h * h
        })
        .sum::<f64>()
        / n as f64;
    let se = libm::sqrt(omega_hat / (q_hat * q_hat) / n as f64);
    let z = two_sided_critical(ci_level);
    let p_value = if se > 0.0 {
        two_sided_p_value(alpha_hat / se)
    } else if alpha_hat == 0.0 {
        1.0
    } else {
        0.0
    };
    Ok(IVResult {
        alpha_hat,
        se,
        ci_lower: alpha_hat - z * se,
        ci_upper: alpha_hat + z * se,
        p_value,
        first_stage_support,
        d_hat,
        omega_hat,
        q_hat,
    })
}

fn check_lengths(y: &[f64], d: &[f64], n: usize) -> Result<()> {
    if y.len() != n || d.len() != n {
        return Err(Error::InvalidInput(alloc::format!(
            "outcome ({}) and endogenous regressor ({}) must both have length {n}",
            y.len(),
            d.len()
        )));
    }
    check_finite(y)?;
    check_finite(d)
}

/// IV estimate of the effect of `d` on `y`, instrumenting `d` by the boosted
/// prediction from the columns of `z`.
pub fn fit_iv(y: &[f64], d: &[f64], z: &DesignMatrix, cfg: &IVConfig) -> Result<IVResult> {
    let n = z.n();
    check_lengths(y, d, n)?;
    let part = Partialler::new(cfg.exog_controls.as_ref(), n)?;
    let y_t = part.apply(y)?;
    let d_t = part.apply(d)?;

    let z_t = if part.controls.is_some() {
        let mut m = RealMatrix::zeros(n, 0);
        for c in z.raw().columns() {
            m.push_column(&part.apply(c)?)?;
        }
        DesignMatrix::new(m)?
    } else {
        z.clone()
    };
    if z_t.p() == 0 {
        return Err(Error::WeakInstrument);
    }

    let fit = fit_learner(&z_t, &d_t, cfg.learner, &cfg.boost_cfg)?;
    if fit.path.support.is_empty() {
        return Err(Error::WeakInstrument);
    }
    iv_second_stage(&y_t, &d_t, fit.fitted, fit.path.support, cfg.ci_level)
}

/// Textbook 2SLS using the listed columns of `z` as instruments, with the
/// same robust inference as [`fit_iv`]. First stage is plain OLS.
pub fn fit_iv_fixed(
    y: &[f64],
    d: &[f64],
    z: &DesignMatrix,
    instruments: &[usize],
    ci_level: f64,
) -> Result<IVResult> {
    let n = z.n();
    check_lengths(y, d, n)?;
    if instruments.is_empty() {
        return Err(Error::WeakInstrument);
    }
    let d_mean = mean(d);
    let y_mean = mean(y);
    let d_t: Vec<f64> = d.iter().map(|v| v - d_mean).collect();
    let y_t: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let sub = z.select(instruments);
    let coef = ols_solve(&sub, &d_t)?;
    let d_hat = sub.mul_vec(&coef);
    let mut support = instruments.to_vec();
    support.sort_unstable();
    support.dedup();
    iv_second_stage(&y_t, &d_t, d_hat, support, ci_level)
}
