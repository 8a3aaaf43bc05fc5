//! Batch front end: record files, checkpointed classification runs, verification,
//! Fine-interior augmentation and CSV statistics.

pub mod checkpoint;
pub mod commands;
pub mod error;
pub mod record;

pub use error::{CliError, Result};

/// Runs `f` inside a rayon pool of `jobs` threads (rayon's default when `None`).
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err(CliError::Usage("--jobs must be positive".into()));
        }
        builder = builder.num_threads(j);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
