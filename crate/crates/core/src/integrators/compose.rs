use super::{step, Scheme, SchemeConfig, SolveStats, SystemState};
use crate::error::{Error, Result};

/// Coefficients of the symmetric fourth-order triple jump.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TripleJump {
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
}

impl TripleJump {
    pub fn new() -> Self {
        let b1 = (2.0 + 2f64.cbrt() + 1.0 / 2f64.cbrt()) / 3.0;
        Self {
            beta1: b1,
            beta2: 1.0 - 2.0 * b1,
            beta3: b1,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.beta1, self.beta2, self.beta3]
    }
}

impl Default for TripleJump {
    fn default() -> Self {
        Self::new()
    }
}

/// Three substeps `beta_s dt` of a time-symmetric base scheme. Substeps
/// with a negative coefficient use the reversed flux (upwind becomes
/// downwind), so backward substeps stay dissipation-free in the reversed
/// direction.
pub fn compose_triple_jump(
    base: Scheme,
    state: &SystemState,
    dt: f64,
    config: &SchemeConfig,
) -> Result<(SystemState, SolveStats)> {
    if !matches!(base, Scheme::S2 | Scheme::S3 | Scheme::S4) {
        return Err(Error::config(format!(
            "triple jump needs a time-symmetric base scheme, got {}",
            base.as_str()
        )));
    }
    let mut current = state.clone();
    let mut stats = SolveStats::default();
    for beta in TripleJump::new().as_array() {
        let flux = if beta < 0.0 {
            config.flux.reversed()
        } else {
            config.flux
        };
        let sub = config.with_scheme(base).with_flux(flux);
        let (next, s) = step(&current, beta * dt, &sub)?;
        stats += s;
        current = next;
    }
    current.t = state.t + dt;
    Ok((current, stats))
}
