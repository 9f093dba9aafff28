use crate::error::{MfgError, Result};

/// Environment variable capping the worker threads of a study.
pub const THREADS_ENV: &str = "MFGLAB_THREADS";

/// Worker count from `MFGLAB_THREADS`; 1 when unset.
pub fn thread_count() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(1),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(MfgError::input(format!("{THREADS_ENV} = {s:?} is not a positive integer"))),
        },
    }
}

/// Runs `f` on a dedicated rayon pool sized by [`thread_count`].
pub fn with_pool<R: Send>(f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count()?)
        .build()
        .map_err(|e| MfgError::input(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(f))
}
