use l2boost_core::numerics::{
    dot, mean, norm_cdf, norm_quantile, ols_solve, residuals, standard_normals, stream_rng,
};
use l2boost_core::{
    expand_design, fit_boost, refit_post_boost, robust_variance, BoostConfig, BoostPath,
    BoostVariant, DesignMatrix, ExpansionConfig, RawTable, RealMatrix,
};
use proptest::prelude::*;

fn instance(seed: u64, n: usize, p: usize, signal: usize) -> (DesignMatrix, Vec<f64>) {
    let mut rng = stream_rng(seed, 0);
    let cols: Vec<Vec<f64>> = (0..p).map(|_| standard_normals(n, &mut rng)).collect();
    let noise = standard_normals(n, &mut rng);
    let y: Vec<f64> = (0..n)
        .map(|i| (0..signal.min(p)).map(|j| cols[j][i] * (1.0 + j as f64)).sum::<f64>() + noise[i])
        .collect();
    let x = DesignMatrix::new(RealMatrix::from_columns(n, &cols).unwrap()).unwrap();
    (x, y)
}

fn config(variant: BoostVariant, tau: f64, max_iter: usize) -> BoostConfig {
    BoostConfig {
        variant,
        max_iter: Some(max_iter),
        stop_threshold: tau,
        ..BoostConfig::default()
    }
}

fn inner(x: &DesignMatrix, u: &[f64], j: usize) -> f64 {
    dot(x.standardized().col(j), u) / u.len() as f64
}

/// Residual before each step, rebuilt from the path alone.
fn residual_before_steps(x: &DesignMatrix, y: &[f64], path: &BoostPath, variant: BoostVariant) -> Vec<Vec<f64>> {
    let ym = mean(y);
    let yc: Vec<f64> = y.iter().map(|v| v - ym).collect();
    let mut out = Vec::new();
    match variant {
        BoostVariant::Classic => {
            let mut u = yc;
            for (&j, &g) in path.selected.iter().zip(&path.steps) {
                out.push(u.clone());
                for (ui, xi) in u.iter_mut().zip(x.standardized().col(j)) {
                    *ui -= g * xi;
                }
            }
        }
        BoostVariant::Orthogonal => {
            for m in 0..path.selected.len() {
                let sub = x.select(&path.selected[..m]);
                let coef = ols_solve(&sub, &yc).unwrap();
                out.push(residuals(&sub, &yc, &coef));
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rss_never_increases(seed in 0u64..10_000, n in 8usize..40, p in 1usize..10,
                           tau in prop_oneof![Just(0.0), 1e-4f64..0.05], orth in any::<bool>()) {
        let (x, y) = instance(seed, n, p, 3);
        let variant = if orth { BoostVariant::Orthogonal } else { BoostVariant::Classic };
        let path = fit_boost(&x, &y, &config(variant, tau, 60)).unwrap();
        for w in path.rss.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
        prop_assert_eq!(path.rss.len(), path.selected.len() + 1);
    }

    #[test]
    fn orthogonal_never_reselects(seed in 0u64..10_000, n in 8usize..40, p in 1usize..10) {
        let (x, y) = instance(seed, n, p, 4);
        let path = fit_boost(&x, &y, &config(BoostVariant::Orthogonal, 0.0, 50)).unwrap();
        let mut s = path.selected.clone();
        s.sort_unstable();
        s.dedup();
        prop_assert_eq!(s.len(), path.selected.len());
    }

    #[test]
    fn support_is_distinct_selected(seed in 0u64..10_000, n in 8usize..40, p in 1usize..10, orth in any::<bool>()) {
        let (x, y) = instance(seed, n, p, 2);
        let variant = if orth { BoostVariant::Orthogonal } else { BoostVariant::Classic };
        let path = fit_boost(&x, &y, &config(variant, 1e-3, 30)).unwrap();
        let mut s = path.selected.clone();
        s.sort_unstable();
        s.dedup();
        prop_assert_eq!(&s, &path.support);
        for j in 0..p {
            if !path.support.contains(&j) {
                prop_assert_eq!(path.beta[j], 0.0);
            }
        }
    }

    #[test]
    fn every_step_is_greedy(seed in 0u64..10_000, n in 6usize..50, p in 1usize..10, orth in any::<bool>()) {
        let (x, y) = instance(seed, n, p, 3);
        let variant = if orth { BoostVariant::Orthogonal } else { BoostVariant::Classic };
        let path = fit_boost(&x, &y, &config(variant, 0.0, 40)).unwrap();
        for (u, &j) in residual_before_steps(&x, &y, &path, variant).iter().zip(&path.selected) {
            let best = (0..p).map(|k| inner(&x, u, k).abs()).fold(0.0, f64::max);
            prop_assert!(inner(&x, u, j).abs() >= best * (1.0 - 1e-9) - 1e-12);
        }
    }

    #[test]
    fn post_refit_residuals_orthogonal(seed in 0u64..10_000, n in 12usize..50, p in 1usize..10) {
        let (x, y) = instance(seed, n, p, 3);
        let path = fit_boost(&x, &y, &BoostConfig::default()).unwrap();
        let beta = refit_post_boost(&x, &y, &path.support).unwrap();
        let ym = mean(&y);
        let fitted = x.standardized().mul_vec(&beta);
        let e: Vec<f64> = y.iter().zip(&fitted).map(|(y, f)| y - ym - f).collect();
        for &j in &path.support {
            prop_assert!(dot(&e, x.standardized().col(j)).abs() < 1e-8 * (1.0 + dot(&y, &y).sqrt()));
        }
    }

    #[test]
    fn orthogonal_matches_ols_on_support(seed in 0u64..10_000, n in 12usize..50, p in 1usize..10) {
        let (x, y) = instance(seed, n, p, 3);
        let path = fit_boost(&x, &y, &config(BoostVariant::Orthogonal, 0.0, 5)).unwrap();
        let ols = refit_post_boost(&x, &y, &path.support).unwrap();
        for (a, b) in path.beta.iter().zip(&ols) {
            prop_assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn robust_variance_scaling(seed in 0u64..10_000, n in 2usize..60, c in 0.1f64..10.0) {
        let mut rng = stream_rng(seed, 1);
        let nu = standard_normals(n, &mut rng);
        let xi = standard_normals(n, &mut rng);
        let base = robust_variance(&nu, &xi).unwrap();
        let scaled_nu: Vec<f64> = nu.iter().map(|v| v * c).collect();
        let scaled_xi: Vec<f64> = xi.iter().map(|v| v * c).collect();
        prop_assert!((robust_variance(&scaled_nu, &xi).unwrap() - base / (c * c)).abs() <= 1e-9 * base / (c * c));
        prop_assert!((robust_variance(&nu, &scaled_xi).unwrap() - base * c * c).abs() <= 1e-9 * base * c * c);
    }

    #[test]
    fn quantile_inverts_cdf(q in 1e-6f64..(1.0 - 1e-6)) {
        prop_assert!((norm_cdf(norm_quantile(q)) - q).abs() < 1e-12);
    }

    #[test]
    fn expansion_accounts_for_every_candidate(seed in 0u64..10_000, k in 1usize..6, binary in 0usize..3) {
        let n = 60;
        let mut rng = stream_rng(seed, 2);
        let mut names = Vec::new();
        let mut cols = Vec::new();
        for j in 0..k {
            names.push(format!("c{j}"));
            cols.push(standard_normals(n, &mut rng));
        }
        for b in 0..binary {
            names.push(format!("b{b}"));
            let z = standard_normals(n, &mut rng);
            cols.push(z.iter().map(|v| if *v > 0.8 * b as f64 { 1.0 } else { 0.0 }).collect());
        }
        let m = names.len();
        let table = RawTable::new(names, cols).unwrap();
        let cfg = ExpansionConfig::default();
        let a = expand_design(&table, &cfg);
        let b = expand_design(&table, &cfg);
        prop_assert_eq!(&a, &b);
        if let Ok(e) = a {
            prop_assert_eq!(e.names.len() + e.dropped.len(), m + m * (m - 1) / 2);
            let mut all: Vec<&String> = e.names.iter().chain(e.dropped.iter().map(|d| &d.name)).collect();
            all.sort();
            all.dedup();
            prop_assert_eq!(all.len(), m + m * (m - 1) / 2);
            prop_assert_eq!(e.design.p(), e.names.len());
        }
    }
}
