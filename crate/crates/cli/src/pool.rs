use crate::error::{CliError, CliResult};

/// Sizes the global worker pool from `DISCLOSE_THREADS` when set.
pub fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("DISCLOSE_THREADS") else { return Ok(()) };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("DISCLOSE_THREADS must be a positive integer, got `{value}`")))?;
    build(threads)
}

#[cfg(feature = "parallel")]
fn build(threads: usize) -> CliResult<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size the worker pool: {e}")))
}

#[cfg(not(feature = "parallel"))]
fn build(_threads: usize) -> CliResult<()> {
    Ok(())
}

/// Runs grid points, in parallel when enabled, keeping input order.
pub fn map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
