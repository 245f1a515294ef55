//! Method-of-lines simulator for `z_t = z_xx` on `[0, 1]` with
//! `z_x(t, 0) = c0 z(t, 0)` and the actuated, disturbed boundary
//! `z_x(t, 1) = u(t) + d(t)`.

mod config;
mod disturbance;
mod operator;

pub use config::{InitialProfile, RobinClosure, SimConfig, TimeScheme};
pub use disturbance::{DisturbanceKind, DisturbanceSpec};
pub use operator::{HeatOperator, StepMap};

use crate::controllers::{
    project_selection, smc_control, st_control, st_integrator_step, ControlLaw, SignMode, StateFeedback, ZeroFeedback,
};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectral::{sample_eigenfunction, solve_eigenvalue, Eigenpair, UniformGrid};

/// Nodal values of `z(t, ·)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState<T> {
    pub t: T,
    pub values: Vec<T>,
}

impl<T: Scalar> FieldState<T> {
    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

pub fn build_initial_state<T: Scalar>(config: &SimConfig<T>) -> Result<FieldState<T>> {
    let grid = config.grid()?;
    let values = match &config.initial {
        InitialProfile::Polynomial(coeffs) => {
            grid.nodes().map(|x| coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)).collect()
        }
        InitialProfile::Table(values) => {
            if values.len() != grid.n_nodes() {
                return Err(Error::GridMismatch { left: grid.n_nodes(), right: values.len() });
            }
            values.clone()
        }
        InitialProfile::Eigenfunction { branch, scale } => {
            let pair = solve_eigenvalue(config.c0, *branch)?.rescaled(*scale);
            sample_eigenfunction(&pair, grid).into_values()
        }
    };
    Ok(FieldState { t: T::zero(), values })
}

/// Advances the field by one step with boundary input `u` and disturbance `d`.
pub fn step<T: Scalar>(state: &FieldState<T>, u: T, d: T, config: &SimConfig<T>) -> Result<FieldState<T>> {
    config.validate()?;
    let grid = config.grid()?;
    if state.values.len() != grid.n_nodes() {
        return Err(Error::GridMismatch { left: grid.n_nodes(), right: state.values.len() });
    }
    let op = HeatOperator::new(grid, config.c0, config.robin)?;
    let map = StepMap::new(op, config.dt, config.scheme);
    let next = FieldState { t: state.t + config.dt, values: map.step(&state.values, u + d) };
    if !next.is_finite() {
        return Err(Error::BlowUp { t: next.t.as_f64() });
    }
    Ok(next)
}

/// `‖A_h φ_h − λ φ_h‖∞` for the sampled analytic eigenfunction.
pub fn discrete_eigen_residual<T: Scalar>(
    pair: &Eigenpair<T>,
    grid: UniformGrid<T>,
    closure: RobinClosure,
) -> Result<T> {
    let op = HeatOperator::new(grid, pair.c0(), closure)?;
    let phi = sample_eigenfunction(pair, grid).into_values();
    let mut a_phi = vec![T::zero(); phi.len()];
    op.apply(&phi, &mut a_phi);
    Ok(a_phi.iter().zip(&phi).map(|(&a, &p)| (a - pair.lambda() * p).abs()).fold(T::zero(), T::max))
}

/// Per-step closed-loop record. All series share the time axis `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub grid: UniformGrid<T>,
    pub pair: Eigenpair<T>,
    pub dt: T,
    pub t: Vec<T>,
    pub sigma: Vec<T>,
    pub u: Vec<T>,
    /// Sign selection (SMC), integrator `v` (super-twisting), or zero.
    pub aux: Vec<T>,
    pub norm_z: Vec<T>,
    /// Disturbance applied over each step.
    pub disturbance: Vec<T>,
    pub snapshots: Vec<FieldState<T>>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// `max_k |(σ_{k+1} − σ_k)/Δt − (λσ_k + B*φ (u_k + d_k))|`, the defect
    /// of the discrete sliding-variable dynamics.
    pub fn sigma_dynamics_defect(&self) -> T {
        let lam = self.pair.lambda();
        let b = self.pair.b_star_phi();
        (0..self.len().saturating_sub(1))
            .map(|k| {
                let fd = (self.sigma[k + 1] - self.sigma[k]) / self.dt;
                (fd - (lam * self.sigma[k] + b * (self.u[k] + self.disturbance[k]))).abs()
            })
            .fold(T::zero(), T::max)
    }
}

/// Closed-loop run with `L = 0`.
pub fn simulate<T: Scalar>(config: &SimConfig<T>, law: &ControlLaw<T>) -> Result<Trajectory<T>> {
    simulate_with_feedback(config, law, &ZeroFeedback)
}

/// Closed-loop run with an extra state feedback `L z` added to the law.
///
/// Gain conditions are checked before the first step; a violated condition
/// refuses the run.
pub fn simulate_with_feedback<T: Scalar>(
    config: &SimConfig<T>,
    law: &ControlLaw<T>,
    feedback: &dyn StateFeedback<T>,
) -> Result<Trajectory<T>> {
    config.validate()?;
    let grid = config.grid()?;
    let pair = solve_eigenvalue(config.c0, config.branch)?;
    law.validate(&config.disturbance, pair.b_star_phi())?;

    let phi = sample_eigenfunction(&pair, grid).into_values();
    let map = StepMap::new(HeatOperator::new(grid, config.c0, config.robin)?, config.dt, config.scheme);
    // σ⁺ = ⟨φ, F(z)⟩ + (u + d)·η
    let eta = grid.dot(&phi, map.flux_response());
    let lam = pair.lambda();
    let b = pair.b_star_phi();

    let steps = config.steps();
    let mut traj = Trajectory {
        grid,
        pair,
        dt: config.dt,
        t: Vec::with_capacity(steps + 1),
        sigma: Vec::with_capacity(steps + 1),
        u: Vec::with_capacity(steps + 1),
        aux: Vec::with_capacity(steps + 1),
        norm_z: Vec::with_capacity(steps + 1),
        disturbance: Vec::with_capacity(steps + 1),
        snapshots: Vec::new(),
    };

    let mut z = build_initial_state(config)?.values;
    let mut st_state = match law {
        ControlLaw::SuperTwisting { initial, .. } => *initial,
        _ => Default::default(),
    };

    for k in 0..=steps {
        let t = config.time(k);
        let sigma = grid.dot(&phi, &z);
        let free = map.free(&z);
        let lz = feedback.apply(&z);

        let (u, aux) = match law {
            ControlLaw::Open => (T::zero(), T::zero()),
            ControlLaw::Smc { gains, mode } => {
                let s = match mode {
                    SignMode::Explicit => sigma.sign0(),
                    SignMode::Implicit => {
                        // Prediction with the measurable terms only; d is unknown.
                        let scale = eta / b;
                        let prediction = grid.dot(&phi, &free) + scale * (lz * b - lam * sigma);
                        project_selection(prediction, scale * gains.k).selection
                    }
                };
                (lz + smc_control(sigma, &pair, gains, s), s)
            }
            ControlLaw::SuperTwisting { gains, .. } => {
                let u = lz + st_control(sigma, &st_state, &pair, gains);
                let v = st_state.v;
                st_state = st_integrator_step(&st_state, sigma.sign0(), gains, config.dt);
                (u, v)
            }
        };
        let d = config.disturbance.value(t);

        traj.t.push(t);
        traj.sigma.push(sigma);
        traj.u.push(u);
        traj.aux.push(aux);
        traj.norm_z.push(grid.norm(&z));
        traj.disturbance.push(d);
        if let Some(stride) = config.snapshot_stride {
            if k % stride == 0 {
                traj.snapshots.push(FieldState { t, values: z.clone() });
            }
        }
        if k == steps {
            break;
        }

        z = map.apply_flux(free, u + d);
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowUp { t: config.time(k + 1).as_f64() });
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controllers::{SmcGains, StGains, StState};

    fn quiet(mut c: SimConfig<f64>) -> SimConfig<f64> {
        c.snapshot_stride = None;
        c
    }

    #[test]
    fn initial_state_samples_profile() {
        let c = SimConfig::<f64>::reference();
        let s = build_initial_state(&c).unwrap();
        assert_eq!(s.values[10], 10.0);
        assert!((s.values[5] - 1.25).abs() < 1e-15);
        assert_eq!(s.t, 0.0);
        let zero = SimConfig { initial: InitialProfile::Polynomial(vec![]), ..c };
        assert!(build_initial_state(&zero).unwrap().values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_state_is_an_equilibrium() {
        let c = SimConfig { initial: InitialProfile::Polynomial(vec![]), ..SimConfig::<f64>::reference() };
        let s = build_initial_state(&c).unwrap();
        let next = step(&s, 0.0, 0.0, &c).unwrap();
        assert!(next.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn pure_neumann_preserves_constants_and_mass() {
        let c = SimConfig { c0: 0.0, initial: InitialProfile::Polynomial(vec![1.0]), ..SimConfig::<f64>::reference() };
        let s = build_initial_state(&c).unwrap();
        let next = step(&s, 0.0, 0.0, &c).unwrap();
        assert_eq!(next.values, s.values);

        let c = SimConfig {
            c0: 0.0,
            initial: InitialProfile::Polynomial(vec![0.3, -1.0, 0.0, 4.0]),
            ..SimConfig::<f64>::reference()
        };
        let grid = c.grid().unwrap();
        let ones = vec![1.0; grid.n_nodes()];
        let mut state = build_initial_state(&c).unwrap();
        let mass0 = grid.dot(&ones, &state.values);
        for _ in 0..1000 {
            let next = step(&state, 0.0, 0.0, &c).unwrap();
            let m0 = grid.dot(&ones, &state.values);
            let m1 = grid.dot(&ones, &next.values);
            assert!((m1 - m0).abs() < 1e-12);
            state = next;
        }
        assert!((grid.dot(&ones, &state.values) - mass0).abs() < 1e-11);
    }

    #[test]
    fn eigenfunction_step_scales_by_one_plus_lambda_dt() {
        let pair = solve_eigenvalue(0.5, 0).unwrap();
        let mut defects = Vec::new();
        for n in [11, 21, 41] {
            let c = SimConfig {
                n_nodes: n,
                dt: 1e-5,
                initial: InitialProfile::Eigenfunction { branch: 0, scale: 1.0 },
                ..SimConfig::<f64>::reference()
            };
            let s = build_initial_state(&c).unwrap();
            let next = step(&s, 0.0, 0.0, &c).unwrap();
            let defect = next
                .values
                .iter()
                .zip(&s.values)
                .map(|(a, p)| (a - (1.0 + pair.lambda() * c.dt) * p).abs())
                .fold(0.0, f64::max)
                / c.dt;
            defects.push(defect);
        }
        for w in defects.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.4..=4.6).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn eigen_residual_is_second_order_with_corrected_closure() {
        for branch in [0, 1] {
            let pair = solve_eigenvalue(0.5, branch).unwrap();
            let coarse =
                discrete_eigen_residual(&pair, UniformGrid::<f64>::new(11).unwrap(), RobinClosure::Corrected).unwrap();
            let fine =
                discrete_eigen_residual(&pair, UniformGrid::<f64>::new(21).unwrap(), RobinClosure::Corrected).unwrap();
            assert!((3.4..=4.6).contains(&(coarse / fine)));
        }
    }

    #[test]
    fn centered_closure_is_first_order_at_the_robin_node() {
        let pair = solve_eigenvalue(0.5, 0).unwrap();
        let coarse =
            discrete_eigen_residual(&pair, UniformGrid::<f64>::new(41).unwrap(), RobinClosure::Centered).unwrap();
        let fine =
            discrete_eigen_residual(&pair, UniformGrid::<f64>::new(81).unwrap(), RobinClosure::Centered).unwrap();
        let ratio = coarse / fine;
        assert!((1.8..2.2).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn open_loop_eigenmode_decays_at_lambda() {
        let c = quiet(SimConfig {
            initial: InitialProfile::Eigenfunction { branch: 0, scale: 1.0 },
            disturbance: DisturbanceSpec::zero(),
            horizon: 2.0,
            ..SimConfig::<f64>::reference()
        });
        let traj = simulate(&c, &ControlLaw::Open).unwrap();
        let n = traj.len() - 1;
        let rate = -(traj.norm_z[n] / traj.norm_z[0]).ln() / traj.t[n];
        assert!((rate - 0.4268).abs() < 0.01, "rate {rate}");
        assert!(traj.u.iter().all(|&u| u == 0.0));
    }

    #[test]
    fn zero_start_stays_zero_under_both_laws() {
        let c = quiet(SimConfig {
            initial: InitialProfile::Polynomial(vec![]),
            disturbance: DisturbanceSpec::zero(),
            horizon: 0.5,
            ..SimConfig::<f64>::reference()
        });
        let smc = ControlLaw::Smc { gains: SmcGains::new(2.5).unwrap(), mode: SignMode::Implicit };
        let st = ControlLaw::SuperTwisting { gains: StGains::new(2.2, 2.5).unwrap(), initial: StState::default() };
        for law in [smc, st] {
            let traj = simulate(&c, &law).unwrap();
            assert!(traj.sigma.iter().chain(&traj.u).chain(&traj.norm_z).chain(&traj.aux).all(|&v| v == 0.0));
        }
    }

    #[test]
    fn invalid_gains_refuse_the_run() {
        let c = quiet(SimConfig::reference());
        let law = ControlLaw::Smc { gains: SmcGains::new(2.0).unwrap(), mode: SignMode::Implicit };
        assert!(matches!(simulate(&c, &law), Err(Error::GainsRejected { .. })));
    }

    #[test]
    fn runs_are_bit_identical() {
        let c = SimConfig { horizon: 0.2, ..SimConfig::<f64>::reference() };
        let law = ControlLaw::Smc { gains: SmcGains::new(2.5).unwrap(), mode: SignMode::Implicit };
        assert_eq!(simulate(&c, &law).unwrap(), simulate(&c, &law).unwrap());
    }

    #[test]
    fn snapshot_stride() {
        let c = SimConfig { horizon: 0.1, ..SimConfig::<f64>::reference() };
        let traj = simulate(&c, &ControlLaw::Open).unwrap();
        assert_eq!(traj.len(), 1001);
        assert_eq!(traj.snapshots.len(), 11);
        assert_eq!(traj.snapshots[1].t, traj.t[100]);
    }

    #[test]
    fn backward_euler_tracks_explicit() {
        let base = quiet(SimConfig { horizon: 0.5, ..SimConfig::<f64>::reference() });
        let law = ControlLaw::Smc { gains: SmcGains::new(2.5).unwrap(), mode: SignMode::Implicit };
        let a = simulate(&base, &law).unwrap();
        let b = simulate(&SimConfig { scheme: TimeScheme::BackwardEuler, ..base }, &law).unwrap();
        let n = a.len() - 1;
        assert!((a.norm_z[n] - b.norm_z[n]).abs() < 1e-2 * a.norm_z[n]);
    }

    #[test]
    fn f32_simulation_runs() {
        let c = SimConfig::<f32> { horizon: 0.5, snapshot_stride: None, ..SimConfig::reference() };
        let law = ControlLaw::Smc { gains: SmcGains::new(2.5f32).unwrap(), mode: SignMode::Implicit };
        let traj = simulate(&c, &law).unwrap();
        assert!(traj.norm_z.iter().all(|v| v.is_finite()));
        assert!(traj.sigma[traj.len() - 1].abs() < traj.sigma[0].abs());
    }
}
