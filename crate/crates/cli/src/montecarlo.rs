//! Parallel Monte Carlo driver.
//!
//! Replication `r` always draws from stream `r` of the master seed and the
//! outcomes are folded in index order, so the report does not depend on the
//! thread count or on scheduling.

use rayon::prelude::*;

use l2boost_core::simlab::{check_run, replicate, DgpSpec, Estimator, MonteCarloReport, Replication};
use l2boost_core::{BoostConfig, Error};

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: MonteCarloReport,
    pub replications: Vec<Replication>,
}

pub fn run_parallel(
    spec: &DgpSpec,
    estimator: Estimator,
    replications: usize,
    master_seed: u64,
    boost_cfg: &BoostConfig,
    threads: Option<usize>,
) -> Result<RunOutput, Error> {
    check_run(spec, estimator, replications)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start worker threads: {e}")))?;
    let reps: Vec<Replication> = pool.install(|| {
        (0..replications as u64)
            .into_par_iter()
            .map(|r| replicate(spec, estimator, boost_cfg, master_seed, r))
            .collect()
    });
    let report = MonteCarloReport::aggregate(*spec, estimator, master_seed, &reps);
    Ok(RunOutput {
        report,
        replications: reps,
    })
}
