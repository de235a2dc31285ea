//! Search limits. Node counts keep runs deterministic; an optional clock adds
//! a wall-clock backstop.

/// Source of elapsed seconds. The core crate has no clock of its own.
pub trait Clock {
    fn seconds(&self) -> f64;
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Limits {
    pub nodes: Option<u64>,
    pub seconds: Option<f64>,
}

impl Limits {
    pub const UNLIMITED: Limits = Limits { nodes: None, seconds: None };

    pub const fn nodes(nodes: u64) -> Self {
        Limits { nodes: Some(nodes), seconds: None }
    }

    pub fn with_seconds(mut self, seconds: f64) -> Self {
        self.seconds = Some(seconds);
        self
    }
}

/// Consumable counterpart of [`Limits`].
pub struct Budget<'c> {
    limits: Limits,
    used: u64,
    clock: Option<&'c dyn Clock>,
    started: f64,
    exhausted: bool,
}

const CLOCK_STRIDE: u64 = 256;

impl<'c> Budget<'c> {
    pub fn new(limits: Limits) -> Self {
        Budget { limits, used: 0, clock: None, started: 0.0, exhausted: false }
    }

    pub fn with_clock(limits: Limits, clock: &'c dyn Clock) -> Self {
        Budget { limits, used: 0, clock: Some(clock), started: clock.seconds(), exhausted: false }
    }

    pub fn unlimited() -> Self {
        Budget::new(Limits::UNLIMITED)
    }

    /// Spends one node. Returns `false` once the budget is gone.
    pub fn tick(&mut self) -> bool {
        if self.exhausted {
            return false;
        }
        if self.limits.nodes.is_some_and(|n| self.used >= n) {
            self.exhausted = true;
            return false;
        }
        if let (Some(clock), Some(limit)) = (self.clock, self.limits.seconds) {
            if self.used % CLOCK_STRIDE == 0 && clock.seconds() - self.started >= limit {
                self.exhausted = true;
                return false;
            }
        }
        self.used += 1;
        true
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    pub fn clock(&self) -> Option<&'c dyn Clock> {
        self.clock
    }

    /// A fresh budget sharing this one's clock.
    pub fn child(&self, limits: Limits) -> Budget<'c> {
        match self.clock {
            Some(c) => Budget::with_clock(limits, c),
            None => Budget::new(limits),
        }
    }
}
