//! Hooks for running sibling subtrees concurrently and for reading a clock.
//!
//! The core is `no_std`, so threads and wall-clock time are supplied by the
//! caller. Results never depend on which implementation is used, except for
//! the reported timings.

use core::time::Duration;

/// Runs two independent closures, possibly in parallel.
pub trait Fork: Sync {
    fn join<A, B, RA, RB>(&self, a: A, b: B) -> (RA, RB)
    where
        A: FnOnce() -> RA + Send,
        B: FnOnce() -> RB + Send,
        RA: Send,
        RB: Send;
}

/// Runs both closures on the current thread, `a` first.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Fork for Sequential {
    fn join<A, B, RA, RB>(&self, a: A, b: B) -> (RA, RB)
    where
        A: FnOnce() -> RA + Send,
        B: FnOnce() -> RB + Send,
        RA: Send,
        RB: Send,
    {
        let ra = a();
        (ra, b())
    }
}

/// A monotonic clock measured from an arbitrary origin.
pub trait Clock: Sync {
    fn now(&self) -> Duration;
}

/// A clock that never advances; all timings come out as zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now(&self) -> Duration {
        Duration::ZERO
    }
}
