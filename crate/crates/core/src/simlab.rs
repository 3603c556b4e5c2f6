//! Simulation designs and the Monte Carlo fold.
//!
//! Replication `r` of a run draws from [`stream_rng`]`(master_seed, r)`, so a
//! replication's outcome does not depend on which thread computed it.
//! [`MonteCarloReport::aggregate`] folds outcomes in index order; any
//! executor that returns them in that order produces identical reports.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;

use crate::boosting::{BoostConfig, DesignMatrix, Learner};
use crate::dselect::{double_select, fixed_controls_estimate, naive_select_estimate, DSConfig};
use crate::error::{Error, Result};
use crate::ivboost::{fit_iv, fit_iv_fixed, IVConfig};
use crate::numerics::{
    median, sample_mvn, standard_normals, stream_rng, two_sided_critical, RealMatrix,
    ToeplitzAr1Cov,
};

/// Correlation of the AR(1) Toeplitz covariance used for every regressor design.
pub const DESIGN_RHO: f64 = 0.5;
/// Nominal size of the two-sided test and complement of the CI level.
pub const NOMINAL_LEVEL: f64 = 0.05;
/// Default treatment effect in the controls designs.
pub const DEFAULT_ALPHA0: f64 = 0.5;
/// Structural coefficient in the IV design.
pub const IV_BETA: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DgpSpec {
    /// First `s` coefficients equal one in both equations.
    ControlsSparse {
        n: usize,
        p: usize,
        s: usize,
        alpha0: f64,
    },
    /// Geometrically decaying coefficients, see [`approx_sparse_coefficients`].
    ControlsApprox { n: usize, p: usize, alpha0: f64 },
    /// Many-instrument design indexed by the concentration parameter `mu`.
    IvSparse {
        n: usize,
        p: usize,
        s: usize,
        mu: f64,
        rho_ev: f64,
    },
    /// One treatment, one covariate: `y = α d + β x + ε`, `corr(d, x) = rho_dx`.
    NaiveDemo {
        n: usize,
        alpha: f64,
        beta: f64,
        rho_dx: f64,
    },
}

impl DgpSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InfeasibleSpec(m));
        match *self {
            DgpSpec::ControlsSparse { n, p, s, .. } => {
                if s > p {
                    return bad(alloc::format!("s = {s} exceeds p = {p}"));
                }
                if n < 2 {
                    return bad("n must be at least 2".into());
                }
            }
            DgpSpec::ControlsApprox { n, .. } => {
                if n < 2 {
                    return bad("n must be at least 2".into());
                }
            }
            DgpSpec::IvSparse {
                n, p, s, mu, rho_ev, ..
            } => {
                if s > p || s == 0 {
                    return bad(alloc::format!("need 1 <= s <= p, got s = {s}, p = {p}"));
                }
                if n < 2 {
                    return bad("n must be at least 2".into());
                }
                if !(mu > 0.0) {
                    return bad("concentration parameter must be positive".into());
                }
                if !(rho_ev > -1.0 && rho_ev < 1.0) {
                    return bad("corr(e, v) must lie in (-1, 1)".into());
                }
            }
            DgpSpec::NaiveDemo { n, rho_dx, .. } => {
                if n < 2 {
                    return bad("n must be at least 2".into());
                }
                if !(rho_dx > -1.0 && rho_dx < 1.0) {
                    return bad("corr(d, x) must lie in (-1, 1)".into());
                }
            }
        }
        Ok(())
    }

    /// The parameter each estimator targets.
    pub fn target(&self) -> f64 {
        match *self {
            DgpSpec::ControlsSparse { alpha0, .. } | DgpSpec::ControlsApprox { alpha0, .. } => {
                alpha0
            }
            DgpSpec::IvSparse { .. } => IV_BETA,
            DgpSpec::NaiveDemo { alpha, .. } => alpha,
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            DgpSpec::ControlsSparse { n, .. }
            | DgpSpec::ControlsApprox { n, .. }
            | DgpSpec::IvSparse { n, .. }
            | DgpSpec::NaiveDemo { n, .. } => n,
        }
    }

    pub fn p(&self) -> usize {
        match *self {
            DgpSpec::ControlsSparse { p, .. }
            | DgpSpec::ControlsApprox { p, .. }
            | DgpSpec::IvSparse { p, .. } => p,
            DgpSpec::NaiveDemo { .. } => 1,
        }
    }

    /// Sparsity index, where the design has one.
    pub fn s(&self) -> Option<usize> {
        match *self {
            DgpSpec::ControlsSparse { s, .. } | DgpSpec::IvSparse { s, .. } => Some(s),
            DgpSpec::NaiveDemo { .. } => Some(1),
            DgpSpec::ControlsApprox { .. } => None,
        }
    }

    pub fn table_name(&self) -> &'static str {
        match self {
            DgpSpec::ControlsSparse { .. } => "controls-sparse",
            DgpSpec::ControlsApprox { .. } => "controls-approx",
            DgpSpec::IvSparse { .. } => "iv-sparse",
            DgpSpec::NaiveDemo { .. } => "naive-demo",
        }
    }

    fn is_iv(&self) -> bool {
        matches!(self, DgpSpec::IvSparse { .. })
    }
}

/// Generating parameters kept alongside a simulated dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Truth {
    /// Parameter of interest (α₀ or β).
    pub target: f64,
    /// Coefficients of the regressor design: θ for the controls designs,
    /// Π for the IV design, `[β]` for the naive demo.
    pub coefficients: Vec<f64>,
    /// Indices with a non-zero coefficient.
    pub support: Vec<usize>,
    /// First-stage scale `C` (IV design only).
    pub first_stage_scale: Option<f64>,
    /// First-stage error variance `σ_v²` (IV design only).
    pub sigma_v2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedDataset {
    pub y: Vec<f64>,
    pub d: Vec<f64>,
    /// Controls (`X`) or instruments (`Z`).
    pub x: RealMatrix,
    pub truth: Truth,
}

/// Coefficients of the approximately sparse design.
///
/// Reads `(1, 0.7², 0.7³, …, 0.7^{p−1})²` elementwise: `θ₁ = 1` and
/// `θ_j = 0.7^{2j} = 0.49^j` for `j = 2, …, p − 1` (1-based), padded with a
/// final zero to length `p`.
pub fn approx_sparse_coefficients(p: usize) -> Vec<f64> {
    let mut theta = vec![0.0; p];
    if p == 0 {
        return theta;
    }
    theta[0] = 1.0;
    for j in 2..p {
        theta[j - 1] = libm::pow(0.49, j as f64);
    }
    theta
}

fn support_of(theta: &[f64]) -> Vec<usize> {
    theta
        .iter()
        .enumerate()
        .filter(|(_, &t)| t != 0.0)
        .map(|(j, _)| j)
        .collect()
}

/// Draws a dataset from one of the two treatment-with-controls designs.
///
/// `y = α₀ d + X θ + ξ`, `d = X θ + ν`, `(ξ, ν) ~ N(0, I₂)`, rows of `X`
/// from `N(0, Σ)` with `Σ_kj = 0.5^|j−k|`.
pub fn gen_controls<R: Rng + ?Sized>(spec: &DgpSpec, rng: &mut R) -> Result<SimulatedDataset> {
    spec.validate()?;
    let (n, p, theta, alpha0) = match *spec {
        DgpSpec::ControlsSparse { n, p, s, alpha0 } => {
            let mut theta = vec![0.0; p];
            theta[..s].iter_mut().for_each(|t| *t = 1.0);
            (n, p, theta, alpha0)
        }
        DgpSpec::ControlsApprox { n, p, alpha0 } => (n, p, approx_sparse_coefficients(p), alpha0),
        _ => {
            return Err(Error::InvalidInput(
                "gen_controls needs a controls design".into(),
            ))
        }
    };
    let x = sample_mvn(n, &ToeplitzAr1Cov::new(p, DESIGN_RHO)?, rng)?;
    let xi = standard_normals(n, rng);
    let nu = standard_normals(n, rng);
    let signal = x.mul_vec(&theta);
    let d: Vec<f64> = signal.iter().zip(&nu).map(|(s, v)| s + v).collect();
    let y: Vec<f64> = (0..n).map(|i| alpha0 * d[i] + signal[i] + xi[i]).collect();
    Ok(SimulatedDataset {
        y,
        d,
        x,
        truth: Truth {
            target: alpha0,
            support: support_of(&theta),
            coefficients: theta,
            first_stage_scale: None,
            sigma_v2: None,
        },
    })
}

/// First-stage scale `C` hitting concentration `mu`:
/// `μ = n C² A / (1 − C² A)` with `A = ι_sᵀ Σ ι_s`, so `C = √(μ / (A (n + μ)))`.
pub fn iv_first_stage_scale(n: usize, s: usize, mu: f64) -> Result<f64> {
    let a = ToeplitzAr1Cov::new(s.max(1), DESIGN_RHO)?.leading_block_sum(s);
    if !(a > 0.0) {
        return Err(Error::InfeasibleSpec("empty first-stage support".into()));
    }
    Ok(libm::sqrt(mu / (a * (n as f64 + mu))))
}

/// Draws a dataset from the many-instrument design.
///
/// `y = β d + e`, `d = Z Π + v`, `Π = C (1,…,1,0,…,0)`, `σ_e² = 1`,
/// `σ_v² = 1 − Πᵀ Σ_z Π` so that `var(d) = 1`.
pub fn gen_iv<R: Rng + ?Sized>(spec: &DgpSpec, rng: &mut R) -> Result<SimulatedDataset> {
    spec.validate()?;
    let DgpSpec::IvSparse {
        n,
        p,
        s,
        mu,
        rho_ev,
    } = *spec
    else {
        return Err(Error::InvalidInput("gen_iv needs the IV design".into()));
    };
    let cov = ToeplitzAr1Cov::new(p, DESIGN_RHO)?;
    let c = iv_first_stage_scale(n, s, mu)?;
    let mut pi = vec![0.0; p];
    pi[..s].iter_mut().for_each(|v| *v = c);
    let sigma_v2 = 1.0 - cov.quad_form(&pi);
    if !(sigma_v2 > 0.0) {
        return Err(Error::InfeasibleSpec(alloc::format!(
            "first-stage error variance {sigma_v2} is not positive"
        )));
    }
    let sigma_v = libm::sqrt(sigma_v2);

    let z = sample_mvn(n, &cov, rng)?;
    let u1 = standard_normals(n, rng);
    let u2 = standard_normals(n, rng);
    let tail = libm::sqrt(1.0 - rho_ev * rho_ev);
    let signal = z.mul_vec(&pi);
    let mut y = Vec::with_capacity(n);
    let mut d = Vec::with_capacity(n);
    for i in 0..n {
        let e = u1[i];
        let v = sigma_v * (rho_ev * u1[i] + tail * u2[i]);
        let di = signal[i] + v;
        d.push(di);
        y.push(IV_BETA * di + e);
    }
    Ok(SimulatedDataset {
        y,
        d,
        x: z,
        truth: Truth {
            target: IV_BETA,
            support: (0..s).collect(),
            coefficients: pi,
            first_stage_scale: Some(c),
            sigma_v2: Some(sigma_v2),
        },
    })
}

/// Draws a dataset from the single-covariate demonstration design.
///
/// `x ~ N(0, 1)`, `d = ρ x + v` with `v ~ N(0, 1 − ρ²)` (so `(d, x)` are
/// standard bivariate normal with correlation `ρ`), `y = α d + β x + ε`.
pub fn gen_naive_demo<R: Rng + ?Sized>(spec: &DgpSpec, rng: &mut R) -> Result<SimulatedDataset> {
    spec.validate()?;
    let DgpSpec::NaiveDemo {
        n,
        alpha,
        beta,
        rho_dx,
    } = *spec
    else {
        return Err(Error::InvalidInput("gen_naive_demo needs the demo design".into()));
    };
    let x = standard_normals(n, rng);
    let v = standard_normals(n, rng);
    let eps = standard_normals(n, rng);
    let sd_v = libm::sqrt(1.0 - rho_dx * rho_dx);
    let d: Vec<f64> = (0..n).map(|i| rho_dx * x[i] + sd_v * v[i]).collect();
    let y: Vec<f64> = (0..n).map(|i| alpha * d[i] + beta * x[i] + eps[i]).collect();
    let coefficients = vec![beta];
    Ok(SimulatedDataset {
        y,
        d,
        x: RealMatrix::from_col_major(n, 1, x)?,
        truth: Truth {
            target: alpha,
            support: support_of(&coefficients),
            coefficients,
            first_stage_scale: None,
            sigma_v2: None,
        },
    })
}

/// Draws one dataset from any design.
pub fn generate<R: Rng + ?Sized>(spec: &DgpSpec, rng: &mut R) -> Result<SimulatedDataset> {
    match spec {
        DgpSpec::ControlsSparse { .. } | DgpSpec::ControlsApprox { .. } => gen_controls(spec, rng),
        DgpSpec::IvSparse { .. } => gen_iv(spec, rng),
        DgpSpec::NaiveDemo { .. } => gen_naive_demo(spec, rng),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimator {
    PostBa,
    OBa,
    ClassicBa,
    /// Outcome-equation selection only.
    Naive,
    /// OLS (or 2SLS) on the true support.
    OracleOls,
}

impl Estimator {
    pub const ALL: [Estimator; 5] = [
        Estimator::PostBa,
        Estimator::OBa,
        Estimator::ClassicBa,
        Estimator::Naive,
        Estimator::OracleOls,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Estimator::PostBa => "post-BA",
            Estimator::OBa => "oBA",
            Estimator::ClassicBa => "classic-BA",
            Estimator::Naive => "naive",
            Estimator::OracleOls => "oracle-OLS",
        }
    }

    fn learner(self) -> Learner {
        match self {
            Estimator::OBa => Learner::Orthogonal,
            Estimator::ClassicBa => Learner::Classic,
            _ => Learner::PostBoost,
        }
    }

    /// Whether the estimator is defined for the design.
    pub fn supports(self, spec: &DgpSpec) -> bool {
        !(spec.is_iv() && self == Estimator::Naive)
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Estimator::ALL
            .into_iter()
            .find(|e| e.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(alloc::format!("unknown estimator '{s}'")))
    }
}

/// Point estimate and interval from one replication.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub estimate: f64,
    pub se: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
}

/// Runs `estimator` on a single dataset.
pub fn estimate_once(
    spec: &DgpSpec,
    data: &SimulatedDataset,
    estimator: Estimator,
    boost_cfg: &BoostConfig,
) -> Result<Estimate> {
    if !estimator.supports(spec) {
        return Err(Error::UnsupportedEstimator {
            estimator: estimator.label(),
        });
    }
    let x = DesignMatrix::new(data.x.clone())?;
    let ci_level = 1.0 - NOMINAL_LEVEL;
    if spec.is_iv() {
        let r = match estimator {
            Estimator::OracleOls => fit_iv_fixed(&data.y, &data.d, &x, &data.truth.support, ci_level)?,
            _ => {
                let cfg = IVConfig {
                    learner: estimator.learner(),
                    boost_cfg: *boost_cfg,
                    exog_controls: None,
                    ci_level,
                };
                fit_iv(&data.y, &data.d, &x, &cfg)?
            }
        };
        return Ok(Estimate {
            estimate: r.alpha_hat,
            se: r.se,
            ci_lower: r.ci_lower,
            ci_upper: r.ci_upper,
        });
    }
    let cfg = DSConfig {
        learner: estimator.learner(),
        boost_cfg: *boost_cfg,
        ci_level,
        ..DSConfig::default()
    };
    let r = match estimator {
        Estimator::OracleOls => {
            fixed_controls_estimate(&data.y, &data.d, &x, &data.truth.support, ci_level)?
        }
        Estimator::Naive => naive_select_estimate(&data.y, &data.d, &x, &cfg)?,
        _ => double_select(&data.y, &data.d, &x, &cfg)?,
    };
    Ok(Estimate {
        estimate: r.alpha_hat,
        se: r.se,
        ci_lower: r.ci_lower,
        ci_upper: r.ci_upper,
    })
}

/// Outcome of replication `index`.
#[derive(Debug, Clone, PartialEq)]
pub struct Replication {
    pub index: u64,
    pub outcome: core::result::Result<Estimate, Error>,
}

impl Replication {
    /// `(α̂ − truth) / se`.
    pub fn t_stat(&self, truth: f64) -> Option<f64> {
        self.outcome.as_ref().ok().map(|e| (e.estimate - truth) / e.se)
    }
}

/// Generates and estimates replication `index` under `master_seed`.
pub fn replicate(
    spec: &DgpSpec,
    estimator: Estimator,
    boost_cfg: &BoostConfig,
    master_seed: u64,
    index: u64,
) -> Replication {
    let mut rng = stream_rng(master_seed, index);
    let outcome =
        generate(spec, &mut rng).and_then(|data| estimate_once(spec, &data, estimator, boost_cfg));
    Replication { index, outcome }
}

/// Aggregate of one Monte Carlo run.
///
/// Bias, rejection and coverage are computed over the successful
/// replications; `failures` counts the rest. With no successes they are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    pub spec: DgpSpec,
    pub estimator: Estimator,
    pub replications: usize,
    pub successes: usize,
    pub failures: usize,
    pub mean_bias: f64,
    pub median_bias: f64,
    /// Share of successes with `|t| > Φ⁻¹(0.975)` against the true parameter.
    pub rejection_rate: f64,
    /// Share of successes whose 95% interval contains the true parameter.
    pub coverage: f64,
    pub master_seed: u64,
}

impl MonteCarloReport {
    /// Folds replications, which must be in index order.
    pub fn aggregate(
        spec: DgpSpec,
        estimator: Estimator,
        master_seed: u64,
        replications: &[Replication],
    ) -> Self {
        let truth = spec.target();
        let crit = two_sided_critical(1.0 - NOMINAL_LEVEL);
        let mut biases = Vec::with_capacity(replications.len());
        let mut rejected = 0usize;
        let mut covered = 0usize;
        for rep in replications {
            if let Ok(e) = &rep.outcome {
                biases.push(e.estimate - truth);
                let t = (e.estimate - truth) / e.se;
                if libm::fabs(t) > crit {
                    rejected += 1;
                }
                if e.ci_lower <= truth && truth <= e.ci_upper {
                    covered += 1;
                }
            }
        }
        let successes = biases.len();
        let frac = |k: usize| {
            if successes == 0 {
                f64::NAN
            } else {
                k as f64 / successes as f64
            }
        };
        let mean_bias = if successes == 0 {
            f64::NAN
        } else {
            biases.iter().sum::<f64>() / successes as f64
        };
        Self {
            spec,
            estimator,
            replications: replications.len(),
            successes,
            failures: replications.len() - successes,
            mean_bias,
            median_bias: median(&biases),
            rejection_rate: frac(rejected),
            coverage: frac(covered),
            master_seed,
        }
    }
}

/// Sequential Monte Carlo run with default boosting settings.
pub fn run_monte_carlo(
    spec: &DgpSpec,
    estimator: Estimator,
    replications: usize,
    master_seed: u64,
) -> Result<MonteCarloReport> {
    run_monte_carlo_with(spec, estimator, replications, master_seed, &BoostConfig::default())
}

pub fn run_monte_carlo_with(
    spec: &DgpSpec,
    estimator: Estimator,
    replications: usize,
    master_seed: u64,
    boost_cfg: &BoostConfig,
) -> Result<MonteCarloReport> {
    check_run(spec, estimator, replications)?;
    let reps: Vec<Replication> = (0..replications as u64)
        .map(|r| replicate(spec, estimator, boost_cfg, master_seed, r))
        .collect();
    Ok(MonteCarloReport::aggregate(*spec, estimator, master_seed, &reps))
}

/// Validates a run before any replication is attempted.
pub fn check_run(spec: &DgpSpec, estimator: Estimator, replications: usize) -> Result<()> {
    spec.validate()?;
    if replications == 0 {
        return Err(Error::InvalidInput("at least one replication is required".into()));
    }
    if !estimator.supports(spec) {
        return Err(Error::UnsupportedEstimator {
            estimator: estimator.label(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{dot, mean, ols_solve, sum_sq};

    #[test]
    fn approx_coefficients_rule() {
        let t = approx_sparse_coefficients(5);
        assert_eq!(t.len(), 5);
        assert_eq!(t[0], 1.0);
        assert!((t[1] - 0.49f64.powi(2)).abs() < 1e-15);
        assert!((t[3] - 0.49f64.powi(4)).abs() < 1e-15);
        assert_eq!(t[4], 0.0);
    }

    #[test]
    fn iv_scale_closed_form_for_single_instrument() {
        let c = iv_first_stage_scale(800, 1, 180.0).unwrap();
        assert!((c * c - 180.0 / 980.0).abs() < 1e-15);
    }

    #[test]
    fn controls_without_confounding_is_unbiased_for_ols() {
        let spec = DgpSpec::ControlsSparse {
            n: 20_000,
            p: 5,
            s: 0,
            alpha0: 0.5,
        };
        let data = gen_controls(&spec, &mut stream_rng(41, 0)).unwrap();
        let dm = mean(&data.d);
        let ym = mean(&data.y);
        let dc: Vec<f64> = data.d.iter().map(|v| v - dm).collect();
        let yc: Vec<f64> = data.y.iter().map(|v| v - ym).collect();
        let slope = dot(&dc, &yc) / sum_sq(&dc);
        assert!((slope - 0.5).abs() < 0.03);
        assert!(data.truth.support.is_empty());
    }

    #[test]
    fn controls_treatment_variance_matches_toeplitz() {
        let spec = DgpSpec::ControlsSparse {
            n: 100_000,
            p: 10,
            s: 5,
            alpha0: 0.5,
        };
        let data = gen_controls(&spec, &mut stream_rng(42, 0)).unwrap();
        // ι₅ᵀ Σ ι₅ from Σ_kj = 0.5^|j−k|: 5 + 2(4·0.5 + 3·0.25 + 2·0.125 + 0.0625)
        let expected = 1.0 + 5.0 + 2.0 * (4.0 * 0.5 + 3.0 * 0.25 + 2.0 * 0.125 + 0.0625);
        let m = mean(&data.d);
        let var = data.d.iter().map(|v| (v - m).powi(2)).sum::<f64>() / 100_000.0;
        assert!((var / expected - 1.0).abs() < 0.03, "var {var} vs {expected}");
    }

    #[test]
    fn iv_design_has_unit_treatment_variance_and_target_concentration() {
        let spec = DgpSpec::IvSparse {
            n: 100_000,
            p: 20,
            s: 5,
            mu: 180.0,
            rho_ev: 0.6,
        };
        let data = gen_iv(&spec, &mut stream_rng(43, 0)).unwrap();
        let n = 100_000.0;
        let m = mean(&data.d);
        let var = data.d.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
        assert!((var - 1.0).abs() < 0.05, "var(d) = {var}");

        // concentration at the design's own n, with Σ_z replaced by its sample analogue
        let pi = &data.truth.coefficients;
        let fitted = data.x.mul_vec(pi);
        let fm = mean(&fitted);
        let quad = fitted.iter().map(|v| (v - fm).powi(2)).sum::<f64>() / n;
        let sigma_v2 = data.truth.sigma_v2.unwrap();
        let mu_hat = 100_000.0 * quad / sigma_v2;
        let c = data.truth.first_stage_scale.unwrap();
        let a = ToeplitzAr1Cov::new(20, 0.5).unwrap().leading_block_sum(5);
        let mu_pop = 100_000.0 * c * c * a / sigma_v2;
        assert!((mu_pop - 180.0).abs() < 1e-8);
        assert!((mu_hat / 180.0 - 1.0).abs() < 0.05, "mu_hat = {mu_hat}");
        assert!((sigma_v2 - (1.0 - c * c * a)).abs() < 1e-12);
    }

    #[test]
    fn naive_demo_regression_slope() {
        let spec = DgpSpec::NaiveDemo {
            n: 100_000,
            alpha: 0.5,
            beta: 0.2,
            rho_dx: 0.8,
        };
        let data = gen_naive_demo(&spec, &mut stream_rng(44, 0)).unwrap();
        let x = data.x.col(0);
        let xm = mean(x);
        let dm = mean(&data.d);
        let xc: Vec<f64> = x.iter().map(|v| v - xm).collect();
        let dc: Vec<f64> = data.d.iter().map(|v| v - dm).collect();
        let slope = dot(&xc, &dc) / sum_sq(&xc);
        assert!((slope - 0.8).abs() < 0.01);
        let corr = dot(&xc, &dc) / (sum_sq(&xc) * sum_sq(&dc)).sqrt();
        assert!((corr - 0.8).abs() < 0.01);
    }

    #[test]
    fn naive_demo_without_confounding_both_unbiased() {
        let spec = DgpSpec::NaiveDemo {
            n: 200,
            alpha: 0.0,
            beta: 0.2,
            rho_dx: 0.0,
        };
        for est in [Estimator::Naive, Estimator::PostBa] {
            let r = run_monte_carlo(&spec, est, 200, 3).unwrap();
            assert!(r.mean_bias.abs() < 0.03, "{est}: {}", r.mean_bias);
        }
    }

    #[test]
    fn single_replication_report() {
        let spec = DgpSpec::ControlsSparse {
            n: 100,
            p: 10,
            s: 2,
            alpha0: 0.5,
        };
        let r = run_monte_carlo(&spec, Estimator::PostBa, 1, 9).unwrap();
        assert_eq!(r.replications, 1);
        assert!(r.rejection_rate == 0.0 || r.rejection_rate == 1.0);
        assert!(r.coverage == 0.0 || r.coverage == 1.0);
        assert_eq!(r.mean_bias, r.median_bias);
    }

    #[test]
    fn naive_unsupported_for_iv() {
        let spec = DgpSpec::IvSparse {
            n: 100,
            p: 10,
            s: 2,
            mu: 30.0,
            rho_ev: 0.6,
        };
        assert_eq!(
            run_monte_carlo(&spec, Estimator::Naive, 5, 1),
            Err(Error::UnsupportedEstimator { estimator: "naive" })
        );
    }

    #[test]
    fn oracle_iv_matches_textbook_2sls() {
        let spec = DgpSpec::IvSparse {
            n: 400,
            p: 20,
            s: 3,
            mu: 100.0,
            rho_ev: 0.6,
        };
        let data = gen_iv(&spec, &mut stream_rng(45, 0)).unwrap();
        let est = estimate_once(&spec, &data, Estimator::OracleOls, &BoostConfig::default()).unwrap();
        // (Z'Z)⁻¹Z'd on the centred true-support columns, then (D̂'d)⁻¹D̂'y
        let n = 400;
        let mut zc = RealMatrix::zeros(n, 0);
        for j in 0..3 {
            let c = data.x.col(j);
            let m = mean(c);
            zc.push_column(&c.iter().map(|v| v - m).collect::<Vec<_>>()).unwrap();
        }
        let dm = mean(&data.d);
        let dc: Vec<f64> = data.d.iter().map(|v| v - dm).collect();
        let pi = ols_solve(&zc, &dc).unwrap();
        let dh = zc.mul_vec(&pi);
        let ym = mean(&data.y);
        let yc: Vec<f64> = data.y.iter().map(|v| v - ym).collect();
        let alpha = dot(&dh, &yc) / dot(&dh, &dc);
        assert!((est.estimate - alpha).abs() < 1e-10);
    }

    #[test]
    fn estimator_labels_parse() {
        for e in Estimator::ALL {
            assert_eq!(e.label().parse::<Estimator>().unwrap(), e);
        }
        assert!("lasso".parse::<Estimator>().is_err());
    }
}
