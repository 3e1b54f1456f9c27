use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Step-dependent rate `numerator / (offset + t / scale)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub numerator: f64,
    pub offset: f64,
    pub scale: f64,
}

impl Schedule {
    pub const fn new(numerator: f64, offset: f64, scale: f64) -> Self {
        Self {
            numerator,
            offset,
            scale,
        }
    }

    pub fn at(&self, t: u64) -> f64 {
        self.numerator / (self.offset + t as f64 / self.scale)
    }

    /// Positive, at most 1, and nonincreasing in `t`.
    fn check(&self, name: &str) -> Result<()> {
        let ok = self.numerator > 0.0
            && self.offset > 0.0
            && self.scale > 0.0
            && self.scale.is_finite()
            && self.at(0) <= 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::OutOfRange(format!("{name} schedule {self:?} must stay in (0, 1]")))
        }
    }

    fn limit_ratio(&self, other: &Self) -> f64 {
        // numerator * scale / t dominates as t grows.
        (self.numerator * self.scale) / (other.numerator * other.scale)
    }
}

/// Learning rates of a WoLF-PHC learner; `t` counts the learner's updates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WolfPhcConfig {
    pub alpha: Schedule,
    pub delta_win: Schedule,
    pub delta_lose: Schedule,
    pub explore: Schedule,
    pub gamma: f64,
}

impl Default for WolfPhcConfig {
    /// Small, slowly decaying rates that settle within about 10^6 plays
    /// of a small matrix game. Hill-climbing steps shrink like `1 / t`
    /// while the Q learning rate stays near 0.01, so Q keeps up with the
    /// policy.
    fn default() -> Self {
        Self {
            alpha: Schedule::new(1.0, 100.0, 10_000.0),
            delta_win: Schedule::new(1.0, 20_000.0, 1.0),
            delta_lose: Schedule::new(4.0, 20_000.0, 1.0),
            explore: Schedule::new(0.2, 1.0, 10_000.0),
            gamma: 0.0,
        }
    }
}

impl WolfPhcConfig {
    pub fn check(&self) -> Result<()> {
        self.alpha.check("alpha")?;
        self.delta_win.check("delta_win")?;
        self.delta_lose.check("delta_lose")?;
        self.explore.check("explore")?;
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::OutOfRange(format!("gamma {} not in [0, 1)", self.gamma)));
        }
        // The ratio of two such schedules is monotone in t, so comparing
        // the start and the limit covers every step.
        let start = self.delta_lose.at(0) / self.delta_win.at(0);
        let limit = self.delta_lose.limit_ratio(&self.delta_win);
        if start <= 1.0 || limit <= 1.0 {
            return Err(Error::OutOfRange(
                "delta_lose must exceed delta_win at every step".into(),
            ));
        }
        Ok(())
    }
}

/// Rates of a tabular Q-learner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QConfig {
    pub alpha: Schedule,
    pub explore: Schedule,
    pub gamma: f64,
}

impl Default for QConfig {
    fn default() -> Self {
        let wolf = WolfPhcConfig::default();
        Self {
            alpha: wolf.alpha,
            explore: wolf.explore,
            gamma: 0.0,
        }
    }
}

impl QConfig {
    pub fn check(&self) -> Result<()> {
        self.alpha.check("alpha")?;
        self.explore.check("explore")?;
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::OutOfRange(format!("gamma {} not in [0, 1)", self.gamma)));
        }
        Ok(())
    }
}
