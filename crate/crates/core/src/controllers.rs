//! Sliding-mode and super-twisting boundary feedback on the sliding
//! variable `σ = ⟨φ, z⟩`, the discrete realizations of the set-valued sign,
//! and the gain conditions that guarantee finite-time reaching.
//!
//! Both laws are written for a generic stabilizing feedback `L`; the heat
//! plant uses `L = 0` ([`ZeroFeedback`]).

use crate::error::{Error, Result};
use crate::heat_sim::DisturbanceSpec;
use crate::scalar::Scalar;
use crate::spectral::Eigenpair;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmcGains<T> {
    pub k: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StGains<T> {
    pub alpha: T,
    pub beta: T,
}

/// Integrator state `v` of the super-twisting law.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StState<T> {
    pub v: T,
}

impl<T: Scalar> SmcGains<T> {
    pub fn new(k: T) -> Result<Self> {
        if !(k > T::zero() && k.is_finite()) {
            return Err(Error::invalid("gains.k", format!("must be positive, got {k}")));
        }
        Ok(Self { k })
    }
}

impl<T: Scalar> StGains<T> {
    pub fn new(alpha: T, beta: T) -> Result<Self> {
        if !(alpha > T::zero() && alpha.is_finite()) {
            return Err(Error::invalid("gains.alpha", format!("must be positive, got {alpha}")));
        }
        if !(beta > T::zero() && beta.is_finite()) {
            return Err(Error::invalid("gains.beta", format!("must be positive, got {beta}")));
        }
        Ok(Self { alpha, beta })
    }
}

/// How the selection from `sign(σ) = [−1, 1]` at `σ = 0` is realized in
/// discrete time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignMode {
    /// Projection onto the surface (see [`sign_step`]).
    #[default]
    Implicit,
    /// `s = sign(σ)`, zero only at `σ = 0` exactly. Chatters.
    Explicit,
}

/// One strict inequality of a gain condition, as `lhs > rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct GainCheck<T> {
    pub law: &'static str,
    pub condition: &'static str,
    pub lhs: T,
    pub rhs: T,
}

impl<T: Scalar> GainCheck<T> {
    pub fn margin(&self) -> T {
        self.lhs - self.rhs
    }

    pub fn pass(&self) -> bool {
        self.lhs > self.rhs
    }
}

/// Outcome of a gain validation: every check must pass.
#[derive(Debug, Clone, PartialEq)]
pub struct GainReport<T> {
    pub checks: Vec<GainCheck<T>>,
}

impl<T: Scalar> GainReport<T> {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(GainCheck::pass)
    }

    /// Smallest margin over all checks.
    pub fn margin(&self) -> T {
        self.checks.iter().map(GainCheck::margin).fold(T::infinity(), T::min)
    }

    /// Fails with the first violated condition.
    pub fn into_result(self) -> Result<Self> {
        match self.checks.iter().find(|c| !c.pass()) {
            Some(c) => Err(Error::GainsRejected { condition: c.condition.to_string(), margin: c.margin().as_f64() }),
            None => Ok(self),
        }
    }
}

/// `K > K_d·|B*φ|`. The margin `K − K_d|B*φ|` is the guaranteed decay
/// slope of `|σ|` before reaching.
pub fn validate_smc_gains<T: Scalar>(
    gains: &SmcGains<T>,
    disturbance: &DisturbanceSpec<T>,
    b_star_phi: T,
) -> Result<GainReport<T>> {
    if b_star_phi == T::zero() {
        return Err(Error::DegenerateTrace);
    }
    Ok(GainReport {
        checks: vec![GainCheck {
            law: "smc",
            condition: "K > Kd*|B*phi|",
            lhs: gains.k,
            rhs: disturbance.kd() * b_star_phi.abs(),
        }],
    })
}

/// `β > |B*φ|·C` and `α > √(β + |B*φ|·C)`.
pub fn validate_st_gains<T: Scalar>(
    gains: &StGains<T>,
    disturbance: &DisturbanceSpec<T>,
    b_star_phi: T,
) -> Result<GainReport<T>> {
    if b_star_phi == T::zero() {
        return Err(Error::DegenerateTrace);
    }
    let c = disturbance.c().ok_or(Error::MissingDerivativeBound)?;
    let bc = b_star_phi.abs() * c;
    Ok(GainReport {
        checks: vec![
            GainCheck { law: "st", condition: "beta > |B*phi|*C", lhs: gains.beta, rhs: bc },
            GainCheck {
                law: "st",
                condition: "alpha > sqrt(beta + |B*phi|*C)",
                lhs: gains.alpha,
                rhs: (gains.beta + bc).sqrt(),
            },
        ],
    })
}

/// `u = −(λσ + K s) / B*φ`, where `s` is the chosen element of `sign(σ)`.
pub fn smc_control<T: Scalar>(sigma: T, pair: &Eigenpair<T>, gains: &SmcGains<T>, selection: T) -> T {
    -(pair.lambda() * sigma + gains.k * selection) / pair.b_star_phi()
}

/// `u = (−λσ − α|σ|^{1/2} sign(σ) + v) / B*φ`. Continuous in `σ`; the
/// selection at `σ = 0` is irrelevant because it multiplies `|σ|^{1/2} = 0`.
pub fn st_control<T: Scalar>(sigma: T, state: &StState<T>, pair: &Eigenpair<T>, gains: &StGains<T>) -> T {
    (-pair.lambda() * sigma - gains.alpha * sigma.abs().sqrt() * sigma.sign0() + state.v) / pair.b_star_phi()
}

/// Result of one projected sign step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignStep<T> {
    pub selection: T,
    pub sigma_next: T,
}

/// Solves `σ⁺ = σ̂ − threshold·s` with `s ∈ sign(σ⁺)`, where `σ̂` is the
/// prediction without the switching term. The solution is unique: outside
/// the band `|σ̂| ≤ threshold` the sign is strict, inside it `σ⁺ = 0`.
pub fn project_selection<T: Scalar>(prediction: T, threshold: T) -> SignStep<T> {
    if prediction.abs() > threshold {
        let s = prediction.sign0();
        SignStep { selection: s, sigma_next: prediction - threshold * s }
    } else if threshold > T::zero() {
        SignStep { selection: prediction / threshold, sigma_next: T::zero() }
    } else {
        SignStep { selection: T::zero(), sigma_next: T::zero() }
    }
}

/// Implicit Euler step of `σ̇ ∈ drift − gain·sign(σ)`.
pub fn sign_step<T: Scalar>(sigma: T, drift: T, gain: T, dt: T) -> SignStep<T> {
    project_selection(sigma + dt * drift, dt * gain)
}

/// `v⁺ = v − dt·β·s`.
pub fn st_integrator_step<T: Scalar>(state: &StState<T>, selection: T, gains: &StGains<T>, dt: T) -> StState<T> {
    StState { v: state.v - dt * gains.beta * selection }
}

/// A bounded linear state feedback `L z` added to either law.
pub trait StateFeedback<T> {
    fn apply(&self, z: &[T]) -> T;
}

/// `L = 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroFeedback;

impl<T: Scalar> StateFeedback<T> for ZeroFeedback {
    fn apply(&self, _z: &[T]) -> T {
        T::zero()
    }
}

/// Boundary control law driving a closed-loop simulation.
#[derive(Debug, Clone, PartialEq)]
pub enum ControlLaw<T> {
    /// `u ≡ 0`.
    Open,
    Smc {
        gains: SmcGains<T>,
        mode: SignMode,
    },
    SuperTwisting {
        gains: StGains<T>,
        initial: StState<T>,
    },
}

impl<T: Scalar> ControlLaw<T> {
    pub fn name(&self) -> &'static str {
        match self {
            ControlLaw::Open => "open",
            ControlLaw::Smc { .. } => "smc",
            ControlLaw::SuperTwisting { .. } => "st",
        }
    }

    /// Gain report for the law; `None` for the open loop.
    pub fn gain_report(&self, disturbance: &DisturbanceSpec<T>, b_star_phi: T) -> Result<Option<GainReport<T>>> {
        match self {
            ControlLaw::Open => Ok(None),
            ControlLaw::Smc { gains, .. } => validate_smc_gains(gains, disturbance, b_star_phi).map(Some),
            ControlLaw::SuperTwisting { gains, .. } => validate_st_gains(gains, disturbance, b_star_phi).map(Some),
        }
    }

    /// Fails unless every gain condition holds.
    pub fn validate(&self, disturbance: &DisturbanceSpec<T>, b_star_phi: T) -> Result<()> {
        if let Some(report) = self.gain_report(disturbance, b_star_phi)? {
            report.into_result()?;
        }
        Ok(())
    }
}
