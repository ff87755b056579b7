//! Replica fan-out.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

use super::manifest::{RunRecord, RunStatus};
use crate::rng::derive_seed;

/// Options shared by all commands.
#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Worker threads; 0 uses one per core.
    pub jobs: usize,
    pub out: PathBuf,
    /// Write one JSON-lines trace per run.
    pub trace: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { jobs: 1, out: PathBuf::from("out"), trace: false }
    }
}

/// One replica at one sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Job {
    pub run_id: u64,
    pub point: usize,
    pub replica: usize,
    pub seed: u64,
}

/// Jobs in `(point, replica)` order, replica `r` of point `p` getting
/// `derive_seed(base, p·replicas + r)`.
pub fn jobs(points: usize, replicas: usize, base_seed: u64) -> Vec<Job> {
    (0..points)
        .flat_map(|point| (0..replicas).map(move |replica| (point, replica)))
        .map(|(point, replica)| {
            let run_id = (point * replicas + replica) as u64;
            Job { run_id, point, replica, seed: derive_seed(base_seed, run_id) }
        })
        .collect()
}

/// Map `f` over `items` on `threads` workers. Results keep input order.
pub fn par_map<J: Sync, R: Send>(threads: usize, items: &[J], f: impl Fn(&J) -> R + Sync + Send) -> Vec<R> {
    if threads == 1 {
        return items.iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool starts");
    pool.install(|| items.par_iter().map(f).collect())
}

/// Result of one job. `Err` holds non-censorable failures.
pub struct Completed<T, E> {
    pub job: Job,
    pub value: Result<Option<T>, E>,
    pub wall_seconds: f64,
}

impl<T, E> Completed<T, E> {
    pub fn record(&self) -> RunRecord {
        let outcome = match &self.value {
            Ok(Some(_)) | Err(_) => RunStatus::Ok,
            Ok(None) => RunStatus::Budget,
        };
        RunRecord {
            run_id: self.job.run_id,
            point: self.job.point,
            replica: self.job.replica,
            seed: self.job.seed,
            outcome,
            wall_seconds: self.wall_seconds,
        }
    }
}

/// Run every job, timing each. `f` returns `Ok(None)` for a censored run.
pub fn run_jobs<T: Send, E: Send>(
    threads: usize,
    jobs: &[Job],
    f: impl Fn(&Job) -> Result<Option<T>, E> + Sync + Send,
) -> Vec<Completed<T, E>> {
    par_map(threads, jobs, |job| {
        let start = Instant::now();
        let value = f(job);
        log::debug!("run {} done", job.run_id);
        Completed { job: *job, value, wall_seconds: start.elapsed().as_secs_f64() }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_independent_of_threads() {
        let items: Vec<u64> = (0..200).collect();
        let f = |x: &u64| derive_seed(*x, 1);
        assert_eq!(par_map(1, &items, f), par_map(3, &items, f));
    }

    #[test]
    fn job_layout() {
        let js = jobs(3, 4, 9);
        assert_eq!(js.len(), 12);
        assert_eq!((js[5].point, js[5].replica, js[5].run_id), (1, 1, 5));
        assert_eq!(js[5].seed, derive_seed(9, 5));
    }
}
