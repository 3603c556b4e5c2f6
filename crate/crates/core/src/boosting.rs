//! Componentwise L2-Boosting and its orthogonal variant.
//!
//! Both variants pick, at every step, the column whose empirical inner
//! product with the current residual is largest in absolute value. Classic
//! boosting then moves that single coefficient by the univariate
//! least-squares step; the orthogonal variant re-projects the response onto
//! every column selected so far, so a column is never picked twice.
//!
//! Stopping uses two triggers, either of which ends the run:
//!
//! * relative improvement: the candidate step would lower the residual sum
//!   of squares by at most `stop_threshold · rss` (the step is discarded);
//! * noise gate: the largest residual correlation is at or below
//!   `λ = 2 σ̂ √(ln(2p/α) / n)`.
//!
//! `σ̂` comes from the residuals of an ungated orthogonal pilot path (see
//! [`pilot_sigma`]) and is held fixed during the run.
//!
//! A `stop_threshold` of zero disables the noise gate, so the run continues
//! until no step improves the fit or `max_iter` is reached.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numerics::{axpy, check_finite, dot, mean, ols_solve, sum_sq, RealMatrix};

/// Regressor matrix together with its standardized (mean 0, `E_n[x²] = 1`) copy.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    raw: RealMatrix,
    col_mean: Vec<f64>,
    col_scale: Vec<f64>,
    standardized: RealMatrix,
}

impl DesignMatrix {
    /// Standardizes every column by its mean and root mean square deviation.
    ///
    /// Constant columns cannot be scaled and are rejected.
    pub fn new(raw: RealMatrix) -> Result<Self> {
        let n = raw.nrows();
        if n < 2 && raw.ncols() > 0 {
            return Err(Error::InvalidInput(
                "at least two observations are needed to standardize".into(),
            ));
        }
        let mut col_mean = Vec::with_capacity(raw.ncols());
        let mut col_scale = Vec::with_capacity(raw.ncols());
        let mut standardized = RealMatrix::zeros(n, raw.ncols());
        for j in 0..raw.ncols() {
            let col = raw.col(j);
            let m = mean(col);
            let centred: Vec<f64> = col.iter().map(|v| v - m).collect();
            let scale = libm::sqrt(sum_sq(&centred) / n as f64);
            let magnitude = col.iter().fold(0.0f64, |a, v| a.max(libm::fabs(*v)));
            if !(scale > 1e-12 * magnitude) || scale == 0.0 {
                return Err(Error::ConstantColumn { index: j });
            }
            for (dst, c) in standardized.col_mut(j).iter_mut().zip(&centred) {
                *dst = c / scale;
            }
            col_mean.push(m);
            col_scale.push(scale);
        }
        Ok(Self {
            raw,
            col_mean,
            col_scale,
            standardized,
        })
    }

    /// A design with `n` rows and no columns.
    pub fn empty(n: usize) -> Self {
        Self {
            raw: RealMatrix::zeros(n, 0),
            col_mean: Vec::new(),
            col_scale: Vec::new(),
            standardized: RealMatrix::zeros(n, 0),
        }
    }

    pub fn n(&self) -> usize {
        self.raw.nrows()
    }

    pub fn p(&self) -> usize {
        self.raw.ncols()
    }

    pub fn raw(&self) -> &RealMatrix {
        &self.raw
    }

    pub fn standardized(&self) -> &RealMatrix {
        &self.standardized
    }

    pub fn col_mean(&self) -> &[f64] {
        &self.col_mean
    }

    pub fn col_scale(&self) -> &[f64] {
        &self.col_scale
    }

    /// Standardized columns listed in `idx`.
    pub fn select(&self, idx: &[usize]) -> RealMatrix {
        self.standardized.select_columns(idx)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoostVariant {
    Classic,
    Orthogonal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostConfig {
    pub variant: BoostVariant,
    /// Iteration cap; `None` means `min(n, p, 200)`.
    pub max_iter: Option<usize>,
    /// Relative-improvement threshold τ. Zero disables the noise gate.
    pub stop_threshold: f64,
    /// Shrinkage on the classic update; 1.0 is the unshrunk step.
    pub step_scale: f64,
    /// Level α in the noise gate `2 σ̂ √(ln(2p/α)/n)`; `None` disables the gate.
    pub gate_alpha: Option<f64>,
}

impl Default for BoostConfig {
    fn default() -> Self {
        Self {
            variant: BoostVariant::Classic,
            max_iter: None,
            stop_threshold: 1e-3,
            step_scale: 1.0,
            gate_alpha: Some(0.05),
        }
    }
}

impl BoostConfig {
    pub fn with_variant(variant: BoostVariant) -> Self {
        Self {
            variant,
            ..Self::default()
        }
    }

    pub fn resolved_max_iter(&self, n: usize, p: usize) -> usize {
        self.max_iter.unwrap_or_else(|| n.min(p).min(200)).max(1)
    }

    fn validate(&self) -> Result<()> {
        if self.max_iter == Some(0) {
            return Err(Error::InvalidInput("max_iter must be at least 1".into()));
        }
        if !(self.stop_threshold >= 0.0) || !self.stop_threshold.is_finite() {
            return Err(Error::InvalidInput("stop_threshold must be finite and >= 0".into()));
        }
        if !(self.step_scale > 0.0 && self.step_scale <= 1.0) {
            return Err(Error::InvalidInput("step_scale must lie in (0, 1]".into()));
        }
        if let Some(a) = self.gate_alpha {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::InvalidInput("gate_alpha must lie in (0, 1)".into()));
            }
        }
        Ok(())
    }

    fn gate_active(&self) -> bool {
        self.stop_threshold > 0.0 && self.gate_alpha.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The next step improved the fit by no more than the relative threshold.
    Threshold,
    /// The largest residual correlation fell to the noise level.
    NoiseGate,
    MaxIter,
}

/// Iteration record of one boosting run.
#[derive(Debug, Clone, PartialEq)]
pub struct BoostPath {
    /// Column chosen at each committed step.
    pub selected: Vec<usize>,
    /// `γ^m = ⟨U^m, x_j⟩_n / E_n[x_j²]` at each step; for the classic variant
    /// this already includes `step_scale`.
    pub steps: Vec<f64>,
    /// Residual sum of squares; `rss[0]` is that of the demeaned response.
    pub rss: Vec<f64>,
    /// Final coefficients on the standardized scale.
    pub beta: Vec<f64>,
    /// Distinct selected columns, ascending.
    pub support: Vec<usize>,
    pub stopped_reason: StopReason,
    /// Mean of the response, removed before fitting.
    pub y_mean: f64,
}

impl BoostPath {
    pub fn iterations(&self) -> usize {
        self.selected.len()
    }
}

/// Relative-improvement stopping predicate.
pub fn should_stop(rss_prev: f64, rss_new: f64, cfg: &BoostConfig) -> bool {
    rss_prev - rss_new <= cfg.stop_threshold * rss_prev
}

/// Noise level `λ_n = 2 σ̂ √(ln(2p/α)/n)`.
pub fn noise_gate_level(sigma_hat: f64, n: usize, p: usize, alpha: f64) -> f64 {
    2.0 * sigma_hat * libm::sqrt(libm::log(2.0 * p as f64 / alpha) / n as f64)
}

/// Runs boosting of `y` on the standardized columns of `x`.
///
/// The response is demeaned internally; the removed mean is kept in
/// [`BoostPath::y_mean`].
pub fn fit_boost(x: &DesignMatrix, y: &[f64], cfg: &BoostConfig) -> Result<BoostPath> {
    cfg.validate()?;
    let (n, p) = (x.n(), x.p());
    if p == 0 {
        return Err(Error::EmptyDesign);
    }
    if y.len() != n {
        return Err(Error::InvalidInput(alloc::format!(
            "response has length {}, design has {n} rows",
            y.len()
        )));
    }
    check_finite(y)?;

    let y_mean = mean(y);
    let yc: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let xs = x.standardized();
    // E_n[x_j²], equal to one up to rounding for standardized columns
    let second_moment: Vec<f64> = xs.columns().map(|c| sum_sq(c) / n as f64).collect();
    let max_iter = cfg.resolved_max_iter(n, p);

    let run = |gate: Option<f64>| match cfg.variant {
        BoostVariant::Classic => classic(xs, yc.clone(), y_mean, &second_moment, max_iter, cfg, gate),
        BoostVariant::Orthogonal => {
            orthogonal(xs, yc.clone(), y_mean, &second_moment, max_iter, cfg, gate)
        }
    };
    match cfg.gate_alpha {
        Some(alpha) if cfg.gate_active() => {
            let pilot = orthogonal(xs, yc.clone(), y_mean, &second_moment, max_iter, cfg, None)?;
            let level = noise_gate_level(pilot_sigma(&pilot, n), n, p, alpha);
            run(Some(level))
        }
        _ => run(None),
    }
}

/// Noise scale from an ungated orthogonal path: `√(rss_m / (n − k_m))` at
/// the last step whose support still leaves at least half the observations
/// free.
pub fn pilot_sigma(path: &BoostPath, n: usize) -> f64 {
    let mut seen = vec![false; path.beta.len()];
    let mut k = 0;
    let mut best = path.rss[0] / (n.max(2) - 1) as f64;
    for (m, &j) in path.selected.iter().enumerate() {
        if !seen[j] {
            seen[j] = true;
            k += 1;
        }
        if 2 * k > n {
            break;
        }
        best = path.rss[m + 1] / (n - k) as f64;
    }
    libm::sqrt(best)
}

/// Lowest-index argmax of `|⟨u, x_j⟩_n|` over columns not excluded.
fn best_column(xs: &RealMatrix, u: &[f64], skip: &[bool]) -> Option<(usize, f64)> {
    let n = u.len() as f64;
    let mut best: Option<(usize, f64)> = None;
    for j in 0..xs.ncols() {
        if skip[j] {
            continue;
        }
        let c = dot(xs.col(j), u) / n;
        match best {
            Some((_, b)) if libm::fabs(c) <= libm::fabs(b) => {}
            _ => best = Some((j, c)),
        }
    }
    best
}

fn gate_fires(gate: Option<f64>, corr: f64) -> bool {
    gate.is_some_and(|level| libm::fabs(corr) <= level)
}

fn classic(
    xs: &RealMatrix,
    yc: Vec<f64>,
    y_mean: f64,
    second_moment: &[f64],
    max_iter: usize,
    cfg: &BoostConfig,
    gate: Option<f64>,
) -> Result<BoostPath> {
    let (n, p) = (xs.nrows(), xs.ncols());
    let skip = vec![false; p];
    let mut in_support = vec![false; p];
    let mut beta = vec![0.0; p];
    let mut u = yc;
    let mut rss = sum_sq(&u);
    let mut path_rss = vec![rss];
    let mut selected = Vec::new();
    let mut steps = Vec::new();
    let mut trial = vec![0.0; n];

    let mut reason = StopReason::MaxIter;
    while selected.len() < max_iter {
        let Some((j, corr)) = best_column(xs, &u, &skip) else {
            reason = StopReason::Threshold;
            break;
        };
        if gate_fires(gate, corr) {
            reason = StopReason::NoiseGate;
            break;
        }
        let gamma = cfg.step_scale * corr / second_moment[j];
        trial.copy_from_slice(&u);
        axpy(-gamma, xs.col(j), &mut trial);
        let rss_new = sum_sq(&trial);
        if corr == 0.0 || should_stop(rss, rss_new, cfg) {
            reason = StopReason::Threshold;
            break;
        }
        core::mem::swap(&mut u, &mut trial);
        rss = rss_new;
        beta[j] += gamma;
        in_support[j] = true;
        selected.push(j);
        steps.push(gamma);
        path_rss.push(rss);
    }

    Ok(BoostPath {
        support: (0..p).filter(|&j| in_support[j]).collect(),
        selected,
        steps,
        rss: path_rss,
        beta,
        stopped_reason: reason,
        y_mean,
    })
}

fn orthogonal(
    xs: &RealMatrix,
    yc: Vec<f64>,
    y_mean: f64,
    second_moment: &[f64],
    max_iter: usize,
    cfg: &BoostConfig,
    gate: Option<f64>,
) -> Result<BoostPath> {
    let (n, p) = (xs.nrows(), xs.ncols());
    // columns already selected, or numerically inside the selected span
    let mut skip = vec![false; p];
    let mut basis: Vec<Vec<f64>> = Vec::new();
    // r_cols[m][k] = ⟨q_k, x_{j_m}⟩ for k ≤ m (upper-triangular R by columns)
    let mut r_cols: Vec<Vec<f64>> = Vec::new();
    let mut u = yc.clone();
    let mut rss = sum_sq(&u);
    let mut path_rss = vec![rss];
    let mut selected = Vec::new();
    let mut steps = Vec::new();
    let mut trial = vec![0.0; n];

    let mut reason = StopReason::MaxIter;
    while selected.len() < max_iter {
        let Some((j, corr)) = best_column(xs, &u, &skip) else {
            reason = StopReason::Threshold;
            break;
        };
        if gate_fires(gate, corr) {
            reason = StopReason::NoiseGate;
            break;
        }

        // Gram-Schmidt against the current basis, repeated once.
        let xj = xs.col(j);
        let mut w = xj.to_vec();
        let mut coefs = vec![0.0; basis.len()];
        for _ in 0..2 {
            for (k, q) in basis.iter().enumerate() {
                let c = dot(q, &w);
                axpy(-c, q, &mut w);
                coefs[k] += c;
            }
        }
        let norm = libm::sqrt(sum_sq(&w));
        if !(norm > 1e-10 * libm::sqrt(sum_sq(xj))) {
            skip[j] = true;
            continue;
        }
        w.iter_mut().for_each(|v| *v /= norm);
        let proj = dot(&w, &u);
        trial.copy_from_slice(&u);
        axpy(-proj, &w, &mut trial);
        let rss_new = sum_sq(&trial);
        if should_stop(rss, rss_new, cfg) {
            reason = StopReason::Threshold;
            break;
        }

        core::mem::swap(&mut u, &mut trial);
        rss = rss_new;
        coefs.push(norm);
        r_cols.push(coefs);
        basis.push(w);
        skip[j] = true;
        selected.push(j);
        steps.push(corr / second_moment[j]);
        path_rss.push(rss);
    }

    // Solve R b = Qᵀ y on the selected columns.
    let k = selected.len();
    let qty: Vec<f64> = basis.iter().map(|q| dot(q, &yc)).collect();
    let mut b = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = qty[i];
        for c in i + 1..k {
            s -= r_cols[c][i] * b[c];
        }
        b[i] = s / r_cols[i][i];
    }
    let mut beta = vec![0.0; p];
    for (&j, &v) in selected.iter().zip(&b) {
        beta[j] = v;
    }
    let mut support = selected.clone();
    support.sort_unstable();

    Ok(BoostPath {
        selected,
        steps,
        rss: path_rss,
        beta,
        support,
        stopped_reason: reason,
        y_mean,
    })
}

/// OLS of the demeaned response on the standardized columns in `support`,
/// scattered into a length-`p` vector that is zero off the support.
pub fn refit_post_boost(x: &DesignMatrix, y: &[f64], support: &[usize]) -> Result<Vec<f64>> {
    if y.len() != x.n() {
        return Err(Error::InvalidInput(alloc::format!(
            "response has length {}, design has {} rows",
            y.len(),
            x.n()
        )));
    }
    if let Some(&bad) = support.iter().find(|&&j| j >= x.p()) {
        return Err(Error::InvalidInput(alloc::format!(
            "support index {bad} out of range for {} columns",
            x.p()
        )));
    }
    let mut beta = vec![0.0; x.p()];
    if support.is_empty() {
        return Ok(beta);
    }
    let y_mean = mean(y);
    let yc: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let coef = ols_solve(&x.select(support), &yc)?;
    for (&j, c) in support.iter().zip(coef) {
        beta[j] = c;
    }
    Ok(beta)
}

/// Maps standardized-scale coefficients back to the raw columns.
///
/// Returns `(coefficients, intercept)` such that
/// `intercept + raw · coefficients` equals `y_mean + standardized · beta_std`.
pub fn destandardize(beta_std: &[f64], x: &DesignMatrix, y_mean: f64) -> (Vec<f64>, f64) {
    let coef: Vec<f64> = beta_std
        .iter()
        .zip(x.col_scale())
        .map(|(b, s)| b / s)
        .collect();
    let intercept = y_mean
        - coef
            .iter()
            .zip(x.col_mean())
            .map(|(c, m)| c * m)
            .sum::<f64>();
    (coef, intercept)
}

/// The three boosting-based learners used for selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Learner {
    /// Classic boosting; coefficients as boosted.
    Classic,
    /// Classic boosting followed by an OLS refit on the selected support.
    PostBoost,
    /// Orthogonal boosting.
    Orthogonal,
}

impl Learner {
    pub fn variant(self) -> BoostVariant {
        match self {
            Learner::Classic | Learner::PostBoost => BoostVariant::Classic,
            Learner::Orthogonal => BoostVariant::Orthogonal,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Learner::Classic => "classic-BA",
            Learner::PostBoost => "post-BA",
            Learner::Orthogonal => "oBA",
        }
    }
}

/// A fitted learner: the boosting path plus the coefficients it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerFit {
    pub path: BoostPath,
    /// Standardized-scale coefficients (post-refit for [`Learner::PostBoost`]).
    pub coef: Vec<f64>,
    /// Demeaned fitted values `X_std · coef`.
    pub fitted: Vec<f64>,
}

impl LearnerFit {
    pub fn support(&self) -> &[usize] {
        &self.path.support
    }
}

/// Runs `learner` on `(x, y)`. The variant in `cfg` is overridden by the learner.
pub fn fit_learner(
    x: &DesignMatrix,
    y: &[f64],
    learner: Learner,
    cfg: &BoostConfig,
) -> Result<LearnerFit> {
    let cfg = BoostConfig {
        variant: learner.variant(),
        ..*cfg
    };
    let path = fit_boost(x, y, &cfg)?;
    let coef = match learner {
        Learner::PostBoost => refit_post_boost(x, y, &path.support)?,
        Learner::Classic | Learner::Orthogonal => path.beta.clone(),
    };
    let fitted = x.standardized().mul_vec(&coef);
    Ok(LearnerFit { path, coef, fitted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{residuals, standard_normals, stream_rng};

    fn random_design(seed: u64, n: usize, p: usize) -> DesignMatrix {
        let mut rng = stream_rng(seed, 0);
        let cols: Vec<Vec<f64>> = (0..p).map(|_| standard_normals(n, &mut rng)).collect();
        DesignMatrix::new(RealMatrix::from_columns(n, &cols).unwrap()).unwrap()
    }

    #[test]
    fn standardized_moments() {
        let x = random_design(1, 37, 4);
        for c in x.standardized().columns() {
            assert!(mean(c).abs() < 1e-10);
            assert!((sum_sq(c) / 37.0 - 1.0).abs() < 1e-10);
        }
        assert!(x.col_scale().iter().all(|&s| s > 0.0));
    }

    #[test]
    fn constant_column_rejected() {
        let raw = RealMatrix::from_columns(3, &[vec![1.0, 2.0, 3.0], vec![5.0; 3]]).unwrap();
        assert_eq!(DesignMatrix::new(raw), Err(Error::ConstantColumn { index: 1 }));
    }

    #[test]
    fn empty_design_and_bad_response_rejected() {
        let cfg = BoostConfig::default();
        assert_eq!(fit_boost(&DesignMatrix::empty(5), &[0.0; 5], &cfg), Err(Error::EmptyDesign));
        let x = random_design(2, 5, 2);
        let y = [1.0, f64::NAN, 0.0, 0.0, 0.0];
        assert_eq!(fit_boost(&x, &y, &cfg), Err(Error::NonFinite { index: 1 }));
        assert!(matches!(fit_boost(&x, &[0.0; 4], &cfg), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn orthogonal_exact_one_variable_fit() {
        let x = random_design(3, 40, 6);
        let y = x.standardized().col(1).to_vec();
        let path = fit_boost(&x, &y, &BoostConfig::with_variant(BoostVariant::Orthogonal)).unwrap();
        assert_eq!(path.selected, vec![1]);
        assert!(path.rss[1] < 1e-16);
    }

    #[test]
    fn classic_converges_to_ols() {
        let (n, p) = (50, 5);
        let x = random_design(4, n, p);
        let mut rng = stream_rng(4, 1);
        let noise = standard_normals(n, &mut rng);
        let y: Vec<f64> = (0..n)
            .map(|i| (0..p).map(|j| (j as f64 + 1.0) * x.raw().get(i, j)).sum::<f64>() + noise[i])
            .collect();
        let cfg = BoostConfig {
            stop_threshold: 0.0,
            max_iter: Some(2000),
            ..BoostConfig::default()
        };
        let path = fit_boost(&x, &y, &cfg).unwrap();
        let ols = refit_post_boost(&x, &y, &[0, 1, 2, 3, 4]).unwrap();
        for j in 0..p {
            assert!((path.beta[j] - ols[j]).abs() < 1e-4, "{:?} vs {:?}", path.beta, ols);
        }
    }

    #[test]
    fn first_selection_is_brute_force_argmax() {
        let (n, p) = (30, 4);
        let x = random_design(5, n, p);
        let mut rng = stream_rng(5, 1);
        let e = standard_normals(n, &mut rng);
        let y: Vec<f64> = (0..n)
            .map(|i| 0.4 * x.raw().get(i, 2) - 0.3 * x.raw().get(i, 0) + e[i])
            .collect();
        // sample correlations straight from the raw data
        let ym = mean(&y);
        let mut best = (0, 0.0f64);
        for j in 0..p {
            let c = x.raw().col(j);
            let cm = mean(c);
            let sxy: f64 = (0..n).map(|i| (c[i] - cm) * (y[i] - ym)).sum();
            let sxx: f64 = (0..n).map(|i| (c[i] - cm).powi(2)).sum();
            let syy: f64 = (0..n).map(|i| (y[i] - ym).powi(2)).sum();
            let r = (sxy / (sxx * syy).sqrt()).abs();
            if r > best.1 {
                best = (j, r);
            }
        }
        let cfg = BoostConfig {
            stop_threshold: 0.0,
            ..BoostConfig::default()
        };
        let path = fit_boost(&x, &y, &cfg).unwrap();
        assert_eq!(path.selected[0], best.0);
    }

    #[test]
    fn should_stop_examples() {
        let cfg = |t| BoostConfig {
            stop_threshold: t,
            ..BoostConfig::default()
        };
        assert!(should_stop(10.0, 10.0, &cfg(0.5)));
        assert!(!should_stop(10.0, 0.0, &cfg(0.01)));
        assert!(should_stop(100.0, 99.9, &cfg(0.01)));
        assert!(!should_stop(100.0, 98.9, &cfg(0.01)));
    }

    #[test]
    fn refit_empty_and_full_support() {
        let x = random_design(6, 20, 3);
        let y = standard_normals(20, &mut stream_rng(6, 1));
        assert_eq!(refit_post_boost(&x, &y, &[]).unwrap(), vec![0.0; 3]);
        let full = refit_post_boost(&x, &y, &[0, 1, 2]).unwrap();
        let ym = mean(&y);
        let yc: Vec<f64> = y.iter().map(|v| v - ym).collect();
        let direct = ols_solve(x.standardized(), &yc).unwrap();
        for j in 0..3 {
            assert!((full[j] - direct[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn refit_matches_two_by_two_oracle() {
        let (n, p) = (40, 10);
        let x = random_design(7, n, p);
        let y = standard_normals(n, &mut stream_rng(7, 1));
        let beta = refit_post_boost(&x, &y, &[2, 7]).unwrap();

        let a = x.standardized().col(2);
        let b = x.standardized().col(7);
        let ym = mean(&y);
        let yc: Vec<f64> = y.iter().map(|v| v - ym).collect();
        let (saa, sab, sbb) = (dot(a, a), dot(a, b), dot(b, b));
        let (say, sby) = (dot(a, &yc), dot(b, &yc));
        let det = saa * sbb - sab * sab;
        let ba = (sbb * say - sab * sby) / det;
        let bb = (saa * sby - sab * say) / det;
        assert!((beta[2] - ba).abs() < 1e-12);
        assert!((beta[7] - bb).abs() < 1e-12);
        for j in (0..p).filter(|&j| j != 2 && j != 7) {
            assert_eq!(beta[j], 0.0);
        }
        let r = residuals(&x.select(&[2, 7]), &yc, &[beta[2], beta[7]]);
        assert!(dot(&r, a).abs() < 1e-8 && dot(&r, b).abs() < 1e-8);
    }

    #[test]
    fn destandardize_examples() {
        let x = random_design(8, 25, 3);
        let (c, b0) = destandardize(&[0.0; 3], &x, 1.5);
        assert_eq!(c, vec![0.0; 3]);
        assert_eq!(b0, 1.5);

        let already = DesignMatrix::new(x.standardized().clone()).unwrap();
        let beta = [0.3, -1.0, 2.0];
        let (c, b0) = destandardize(&beta, &already, -0.25);
        for j in 0..3 {
            assert!((c[j] - beta[j]).abs() < 1e-12);
        }
        assert!((b0 + 0.25).abs() < 1e-12);
    }

    #[test]
    fn destandardize_preserves_predictions() {
        let mut rng = stream_rng(9, 0);
        let n = 30;
        let cols: Vec<Vec<f64>> = (0..4)
            .map(|j| {
                standard_normals(n, &mut rng)
                    .into_iter()
                    .map(|v| 3.0 * v + j as f64 * 10.0)
                    .collect()
            })
            .collect();
        let x = DesignMatrix::new(RealMatrix::from_columns(n, &cols).unwrap()).unwrap();
        let beta = [0.5, 0.0, -1.2, 0.7];
        let (c, b0) = destandardize(&beta, &x, 4.0);
        let std_pred = x.standardized().mul_vec(&beta);
        let raw_pred = x.raw().mul_vec(&c);
        for i in 0..n {
            assert!(((b0 + raw_pred[i]) - (4.0 + std_pred[i])).abs() < 1e-10);
        }
    }

    #[test]
    fn orthogonal_fit_is_ols_on_its_support() {
        let (n, p) = (60, 12);
        let x = random_design(10, n, p);
        let e = standard_normals(n, &mut stream_rng(10, 1));
        let y: Vec<f64> = (0..n)
            .map(|i| x.raw().get(i, 3) + 0.8 * x.raw().get(i, 8) + 0.5 * e[i])
            .collect();
        let path = fit_boost(&x, &y, &BoostConfig::with_variant(BoostVariant::Orthogonal)).unwrap();
        let ols = refit_post_boost(&x, &y, &path.support).unwrap();
        for j in 0..p {
            assert!((path.beta[j] - ols[j]).abs() < 1e-10);
        }
        assert!(path.support.contains(&3) && path.support.contains(&8));
    }

    #[test]
    fn learner_labels_and_variants() {
        assert_eq!(Learner::PostBoost.variant(), BoostVariant::Classic);
        assert_eq!(Learner::Orthogonal.label(), "oBA");
    }
}
