//! Treatment-effect estimation after boosting-based double selection.
//!
//! Two selection regressions (treatment on controls, outcome on controls)
//! each contribute a support; the treatment coefficient is then read off an
//! OLS regression of the outcome on an intercept, the treatment and the union
//! of both supports. Standard errors use the heteroskedasticity-robust
//! sandwich built from the treatment-equation residuals `ν̂` and the
//! degrees-of-freedom-corrected outcome residuals `ξ̂`.

use alloc::vec::Vec;

use crate::boosting::{fit_learner, BoostConfig, DesignMatrix, Learner};
use crate::error::{Error, Result};
use crate::numerics::{
    check_finite, mean, ols_solve, residuals, sum_sq, two_sided_critical, two_sided_p_value,
    RealMatrix,
};

#[derive(Debug, Clone, PartialEq)]
pub struct DSConfig {
    pub learner: Learner,
    /// Boosting settings for the outcome equation (and the treatment
    /// equation unless `treatment_cfg` overrides it).
    pub boost_cfg: BoostConfig,
    pub treatment_cfg: Option<BoostConfig>,
    /// Controls always included in the final regression.
    pub amend: Vec<usize>,
    pub ci_level: f64,
}

impl Default for DSConfig {
    fn default() -> Self {
        Self {
            learner: Learner::PostBoost,
            boost_cfg: BoostConfig::default(),
            treatment_cfg: None,
            amend: Vec::new(),
            ci_level: 0.95,
        }
    }
}

impl DSConfig {
    pub fn with_learner(learner: Learner) -> Self {
        Self {
            learner,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoubleSelectionResult {
    pub alpha_hat: f64,
    /// `σ̂ₙ / √n`.
    pub se: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub p_value: f64,
    /// Controls selected by the treatment equation.
    pub set_d: Vec<usize>,
    /// Controls selected by the outcome equation.
    pub set_y: Vec<usize>,
    /// Controls entering the final regression, ascending.
    pub controls: Vec<usize>,
    pub union_size: usize,
    pub xi_hat: Vec<f64>,
    pub nu_hat: Vec<f64>,
    pub sigma2_hat: f64,
}

/// Plug-in sandwich `[E_n ν̂²]⁻¹ E_n[ν̂² ξ̂²] [E_n ν̂²]⁻¹`.
pub fn robust_variance(nu_hat: &[f64], xi_hat: &[f64]) -> Result<f64> {
    if nu_hat.len() != xi_hat.len() {
        return Err(Error::InvalidInput(alloc::format!(
            "residual vectors differ in length ({} vs {})",
            nu_hat.len(),
            xi_hat.len()
        )));
    }
    if nu_hat.is_empty() || nu_hat.iter().all(|&v| v == 0.0) {
        return Err(Error::IdentificationFailure);
    }
    let n = nu_hat.len() as f64;
    let m2 = sum_sq(nu_hat) / n;
    let meat = nu_hat
        .iter()
        .zip(xi_hat)
        .map(|(v, x)| v * v * x * x)
        .sum::<f64>()
        / n;
    Ok(meat / (m2 * m2))
}

fn check_inputs(y: &[f64], d: &[f64], x: &DesignMatrix, cfg: &DSConfig) -> Result<()> {
    let n = x.n();
    if y.len() != n || d.len() != n {
        return Err(Error::InvalidInput(alloc::format!(
            "outcome ({}) and treatment ({}) must both have length {n}",
            y.len(),
            d.len()
        )));
    }
    check_finite(y)?;
    check_finite(d)?;
    if !(cfg.ci_level > 0.0 && cfg.ci_level < 1.0) {
        return Err(Error::InvalidInput("ci_level must lie in (0, 1)".into()));
    }
    if let Some(&bad) = cfg.amend.iter().find(|&&j| j >= x.p()) {
        return Err(Error::InvalidInput(alloc::format!(
            "amended control {bad} out of range for {} columns",
            x.p()
        )));
    }
    Ok(())
}

fn sorted_union(sets: &[&[usize]]) -> Vec<usize> {
    let mut all: Vec<usize> = sets.iter().flat_map(|s| s.iter().copied()).collect();
    all.sort_unstable();
    all.dedup();
    all
}

/// Final-stage OLS of `y` on (intercept, `d`, `controls`) with the robust
/// variance built from the supplied treatment residuals `nu_hat`.
#[allow(clippy::too_many_arguments)]
fn final_stage(
    y: &[f64],
    d: &[f64],
    x: &DesignMatrix,
    controls: Vec<usize>,
    nu_hat: Vec<f64>,
    set_d: Vec<usize>,
    set_y: Vec<usize>,
    ci_level: f64,
) -> Result<DoubleSelectionResult> {
    let n = x.n();
    let s_hat = controls.len();
    if s_hat + 2 >= n {
        return Err(Error::TooManySelected { selected: s_hat, n });
    }
    let d_mean = mean(d);
    let dc: Vec<f64> = d.iter().map(|v| v - d_mean).collect();
    let m2 = sum_sq(&nu_hat) / n as f64;
    let d_var = sum_sq(&dc) / n as f64;
    if !(d_var > 0.0) || !(m2 > 1e-12 * d_var) {
        return Err(Error::IdentificationFailure);
    }

    let y_mean = mean(y);
    let yc: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let mut design = RealMatrix::from_col_major(n, 1, dc)?;
    for &j in &controls {
        design.push_column(x.standardized().col(j))?;
    }
    let coef = ols_solve(&design, &yc)?;
    let alpha_hat = coef[0];
    let correction = libm::sqrt(n as f64 / (n - s_hat - 1) as f64);
    let xi_hat: Vec<f64> = residuals(&design, &yc, &coef)
        .into_iter()
        .map(|e| e * correction)
        .collect();

    let sigma2_hat = robust_variance(&nu_hat, &xi_hat)?;
    let se = libm::sqrt(sigma2_hat / n as f64);
    let z = two_sided_critical(ci_level);
    let p_value = if se > 0.0 {
        two_sided_p_value(alpha_hat / se)
    } else if alpha_hat == 0.0 {
        1.0
    } else {
        0.0
    };

    Ok(DoubleSelectionResult {
        alpha_hat,
        se,
        ci_lower: alpha_hat - z * se,
        ci_upper: alpha_hat + z * se,
        p_value,
        set_d,
        set_y,
        union_size: s_hat,
        controls,
        xi_hat,
        nu_hat,
        sigma2_hat,
    })
}

/// Double-selection estimate of the treatment effect of `d` on `y`.
pub fn double_select(
    y: &[f64],
    d: &[f64],
    x: &DesignMatrix,
    cfg: &DSConfig,
) -> Result<DoubleSelectionResult> {
    check_inputs(y, d, x, cfg)?;
    let d_mean = mean(d);
    let (set_d, set_y, nu_hat) = if x.p() == 0 {
        (Vec::new(), Vec::new(), d.iter().map(|v| v - d_mean).collect())
    } else {
        let d_cfg = cfg.treatment_cfg.as_ref().unwrap_or(&cfg.boost_cfg);
        let d_fit = fit_learner(x, d, cfg.learner, d_cfg)?;
        let y_fit = fit_learner(x, y, cfg.learner, &cfg.boost_cfg)?;
        let nu_hat: Vec<f64> = d
            .iter()
            .zip(&d_fit.fitted)
            .map(|(v, f)| v - d_mean - f)
            .collect();
        (d_fit.path.support, y_fit.path.support, nu_hat)
    };
    let controls = sorted_union(&[&set_d, &set_y, &cfg.amend]);
    final_stage(y, d, x, controls, nu_hat, set_d, set_y, cfg.ci_level)
}

/// OLS of `y` on (intercept, `d`, the listed controls) with robust inference.
///
/// The treatment residuals come from regressing `d` on the same controls, so
/// the variance is the usual heteroskedasticity-robust one for the
/// treatment coefficient (with the `n/(n−ŝ−1)` correction).
pub fn fixed_controls_estimate(
    y: &[f64],
    d: &[f64],
    x: &DesignMatrix,
    controls: &[usize],
    ci_level: f64,
) -> Result<DoubleSelectionResult> {
    let cfg = DSConfig {
        ci_level,
        amend: controls.to_vec(),
        ..DSConfig::default()
    };
    check_inputs(y, d, x, &cfg)?;
    let controls = sorted_union(&[controls]);
    let nu_hat = partial_residuals(d, x, &controls)?;
    final_stage(y, d, x, controls, nu_hat, Vec::new(), Vec::new(), ci_level)
}

fn partial_residuals(v: &[f64], x: &DesignMatrix, controls: &[usize]) -> Result<Vec<f64>> {
    let m = mean(v);
    let vc: Vec<f64> = v.iter().map(|e| e - m).collect();
    if controls.is_empty() {
        return Ok(vc);
    }
    let sub = x.select(controls);
    match ols_solve(&sub, &vc) {
        Ok(coef) => Ok(residuals(&sub, &vc, &coef)),
        Err(Error::Singular { .. }) => Err(Error::IdentificationFailure),
        Err(e) => Err(e),
    }
}

/// Single-selection baseline: boost `y` on the controls only, then regress
/// `y` on the treatment and whatever was selected.
pub fn naive_select_estimate(
    y: &[f64],
    d: &[f64],
    x: &DesignMatrix,
    cfg: &DSConfig,
) -> Result<DoubleSelectionResult> {
    check_inputs(y, d, x, cfg)?;
    let set_y = if x.p() == 0 {
        Vec::new()
    } else {
        fit_learner(x, y, cfg.learner, &cfg.boost_cfg)?.path.support
    };
    let controls = sorted_union(&[&set_y, &cfg.amend]);
    let nu_hat = partial_residuals(d, x, &controls)?;
    final_stage(y, d, x, controls, nu_hat, Vec::new(), set_y, cfg.ci_level)
}
