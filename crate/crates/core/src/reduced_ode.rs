//! Scalar reduced dynamics of the sliding variable, integrated as Filippov
//! inclusions. These are the reference solutions for the PDE loop.
//!
//! SMC:  `σ̇ ∈ B*φ·d(t) − K·sign(σ)`
//!
//! Super-twisting, with `w = B*φ·d + v`:
//!
//! ```text
//! σ̇ = −α|σ|^{1/2} sign(σ) + w
//! ẇ ∈ B*φ·ḋ(t) − β·sign(σ)
//! ```

use crate::controllers::{sign_step, validate_smc_gains, validate_st_gains, SmcGains, StGains};
use crate::error::{Error, Result};
use crate::heat_sim::DisturbanceSpec;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedTrajectory<T> {
    pub t: Vec<T>,
    pub sigma: Vec<T>,
    /// Transformed integrator state (super-twisting only).
    pub w: Option<Vec<T>>,
    /// Sign selection used on the step leaving each sample.
    pub selection: Vec<T>,
    /// Reaching time detected with the default criterion of the integrator.
    pub t_reach: Option<T>,
}

impl<T: Scalar> ReducedTrajectory<T> {
    /// First time after which `|σ|` (and `|w|`) stay within `band`.
    pub fn detect_reaching_time(&self, band: T, dwell: T) -> Option<T> {
        match &self.w {
            Some(w) => detect_reaching_time(&self.t, &[&self.sigma, w], band, dwell),
            None => detect_reaching_time(&self.t, &[&self.sigma], band, dwell),
        }
    }
}

/// First sample time `t*` such that every channel stays within `band` for
/// all samples from `t*` to the end of the record, and the record extends at
/// least `dwell` past `t*`. `None` when no such time exists.
pub fn detect_reaching_time<T: Scalar>(t: &[T], channels: &[&[T]], band: T, dwell: T) -> Option<T> {
    let n = t.len();
    let outside = |k: usize| channels.iter().any(|c| !(c[k].abs() <= band));
    let first_inside = match (0..n).rev().find(|&k| outside(k)) {
        None => 0,
        Some(k) => k + 1,
    };
    if first_inside >= n {
        return None;
    }
    let t_star = t[first_inside];
    (t[n - 1] - t_star >= dwell).then_some(t_star)
}

/// `|σ₀| / (K − K_d |B*φ|)`.
pub fn reaching_time_bound<T: Scalar>(
    sigma0: T,
    gains: &SmcGains<T>,
    disturbance: &DisturbanceSpec<T>,
    b_star_phi: T,
) -> Result<T> {
    let report = validate_smc_gains(gains, disturbance, b_star_phi)?;
    let margin = report.margin();
    if !(margin > T::zero()) {
        return Err(Error::GainsRejected { condition: "K > Kd*|B*phi|".into(), margin: margin.as_f64() });
    }
    Ok(sigma0.abs() / margin)
}

fn step_count<T: Scalar>(dt: T, horizon: T) -> Result<usize> {
    if !(dt > T::zero()) {
        return Err(Error::invalid("dt", "must be positive"));
    }
    if !(horizon > T::zero()) {
        return Err(Error::invalid("horizon", "must be positive"));
    }
    Ok((horizon / dt).round().to_usize().unwrap_or(0))
}

/// Implicit Euler for `σ̇ ∈ B*φ·d − K sign(σ)`.
///
/// The projection makes the surface exactly invariant while `|B*φ·d| ≤ K`.
/// The reaching time is located inside the step that lands on `σ = 0` for
/// good: with the drift frozen over that step, `|σ|` hits zero at
/// `t_k + |σ_k| / (K − sign(σ_k)·B*φ·d_k)`.
pub fn simulate_smc_reduced<T: Scalar>(
    sigma0: T,
    gains: &SmcGains<T>,
    b_star_phi: T,
    disturbance: &DisturbanceSpec<T>,
    dt: T,
    horizon: T,
) -> Result<ReducedTrajectory<T>> {
    validate_smc_gains(gains, disturbance, b_star_phi)?.into_result()?;
    let n = step_count(dt, horizon)?;
    let mut t = Vec::with_capacity(n + 1);
    let mut sigma = Vec::with_capacity(n + 1);
    let mut selection = Vec::with_capacity(n + 1);
    let mut drift = Vec::with_capacity(n + 1);
    let mut s_now = sigma0;
    for k in 0..=n {
        let tk = T::from_count(k) * dt;
        let dk = b_star_phi * disturbance.value(tk);
        let step = sign_step(s_now, dk, gains.k, dt);
        drift.push(dk);
        t.push(tk);
        sigma.push(s_now);
        selection.push(step.selection);
        s_now = step.sigma_next;
        if !s_now.is_finite() {
            return Err(Error::BlowUp { t: tk.as_f64() });
        }
    }
    let t_reach = detect_reaching_time(&t, &[&sigma], T::zero(), T::zero()).map(|t_hit| {
        let k = (t_hit / dt).round().to_usize().unwrap_or(0);
        if k == 0 {
            return t_hit;
        }
        let s = sigma[k - 1];
        let closing = gains.k - s.sign0() * drift[k - 1];
        let inside = s.abs() / closing;
        t[k - 1] + if inside > T::zero() && inside < dt { inside } else { dt }
    });
    Ok(ReducedTrajectory { t, sigma, w: None, selection, t_reach })
}

/// Solves `x + h·|x|^{1/2} sign(x) = y` for `x` (unique, same sign as `y`).
fn implicit_root_step<T: Scalar>(y: T, h: T) -> T {
    let two = T::lit(2.0);
    let q = (-h + (h * h + T::lit(4.0) * y.abs()).sqrt()) / two;
    y.sign0() * q * q
}

/// Super-twisting reduced system. The `σ` equation is stepped implicitly in
/// the `|σ|^{1/2}` term; the `w` inclusion uses `sign(σ⁺)` off the surface
/// and the projected selection when `σ⁺ = 0`.
///
/// The default reaching criterion is `|σ|, |w| ≤ 10·dt`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_st_reduced<T: Scalar>(
    sigma0: T,
    w0: T,
    gains: &StGains<T>,
    b_star_phi: T,
    disturbance: &DisturbanceSpec<T>,
    dt: T,
    horizon: T,
) -> Result<ReducedTrajectory<T>> {
    validate_st_gains(gains, disturbance, b_star_phi)?.into_result()?;
    let n = step_count(dt, horizon)?;
    let mut t = Vec::with_capacity(n + 1);
    let mut sigma = Vec::with_capacity(n + 1);
    let mut w = Vec::with_capacity(n + 1);
    let mut selection = Vec::with_capacity(n + 1);
    let (mut s_now, mut w_now) = (sigma0, w0);
    for k in 0..=n {
        let tk = T::from_count(k) * dt;
        let drive = b_star_phi * disturbance.derivative(tk);
        let s_next = implicit_root_step(s_now + dt * w_now, dt * gains.alpha);
        let (sel, w_next) = if s_next != T::zero() {
            let sel = s_next.sign0();
            (sel, w_now + dt * (drive - gains.beta * sel))
        } else {
            let step = sign_step(w_now, drive, gains.beta, dt);
            (step.selection, step.sigma_next)
        };
        t.push(tk);
        sigma.push(s_now);
        w.push(w_now);
        selection.push(sel);
        s_now = s_next;
        w_now = w_next;
        if !(s_now.is_finite() && w_now.is_finite()) {
            return Err(Error::BlowUp { t: tk.as_f64() });
        }
    }
    let band = T::lit(10.0) * dt;
    let t_reach = detect_reaching_time(&t, &[&sigma, &w], band, dt);
    Ok(ReducedTrajectory { t, sigma, w: Some(w), selection, t_reach })
}
