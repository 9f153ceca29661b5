//! The `SCATTER_THREADS` knob.
//!
//! The sampler itself is inherently sequential, so the only real choice is
//! whether the chain runs on a background worker (progress streamed to the
//! foreground, the default) or inline on the calling thread
//! (`SCATTER_THREADS=0`, handy under debuggers and in single-threaded
//! harnesses).

use crate::error::{CliError, Result};

pub const THREADS_ENV: &str = "SCATTER_THREADS";

/// Number of worker threads to use: `SCATTER_THREADS` if set, else 1.
pub fn configured_threads() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(1),
        Err(e) => Err(CliError::Config(format!("{THREADS_ENV}: {e}"))),
        Ok(raw) => raw.trim().parse::<usize>().map_err(|_| {
            CliError::Config(format!(
                "{THREADS_ENV}={raw:?} is not a thread count (expected a small integer)"
            ))
        }),
    }
}

/// Runs `job` either inline (`threads == 0`) or on one worker thread,
/// forwarding every progress item to `on_progress` as it arrives.
pub fn run_streaming<T, P, F>(threads: usize, job: F, mut on_progress: impl FnMut(P)) -> T
where
    T: Send,
    P: Send,
    F: FnOnce(&mut dyn FnMut(P)) -> T + Send,
{
    if threads == 0 {
        return job(&mut on_progress);
    }
    std::thread::scope(|scope| {
        let (tx, rx) = std::sync::mpsc::channel::<P>();
        let handle = scope.spawn(move || {
            let mut sink = |item: P| {
                // The receiver only disconnects if the foreground panicked;
                // dropping the record is then the least bad option.
                let _ = tx.send(item);
            };
            job(&mut sink)
        });
        for item in rx {
            on_progress(item);
        }
        match handle.join() {
            Ok(result) => result,
            Err(payload) => std::panic::resume_unwind(payload),
        }
    })
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
