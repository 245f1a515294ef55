use crate::error::{Error, Result};
use crate::heat_sim::DisturbanceSpec;
use crate::scalar::Scalar;
use crate::spectral::UniformGrid;

/// Time integrator for the semi-discrete system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeScheme {
    #[default]
    ExplicitEuler,
    /// θ = 1; unconditionally stable, for stiff sweeps.
    BackwardEuler,
}

/// Ghost-node closure of the Robin row at `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RobinClosure {
    /// `z₋₁ = z₁ − 2Δx c0 z₀ − (Δx³/3) c0 z_xx(0)`, which uses
    /// `z_xxx(0) = c0 z_xx(0)` and leaves an `O(Δx²)` truncation error in the
    /// boundary row.
    #[default]
    Corrected,
    /// `z₋₁ = z₁ − 2Δx c0 z₀`; `O(Δx)` truncation error in the boundary row.
    Centered,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialProfile<T> {
    /// Coefficients in ascending powers of `x`.
    Polynomial(Vec<T>),
    /// Nodal values, one per grid node.
    Table(Vec<T>),
    /// `scale·φ` for the eigenfunction of the given branch.
    Eigenfunction { branch: usize, scale: T },
}

impl<T: Scalar> InitialProfile<T> {
    /// `10x³`.
    pub fn reference() -> Self {
        InitialProfile::Polynomial(vec![T::zero(), T::zero(), T::zero(), T::lit(10.0)])
    }
}

/// Plant and discretization settings for one closed-loop run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig<T> {
    pub c0: T,
    pub n_nodes: usize,
    pub dt: T,
    pub horizon: T,
    pub initial: InitialProfile<T>,
    pub disturbance: DisturbanceSpec<T>,
    /// Eigen branch that defines the sliding variable.
    pub branch: usize,
    pub scheme: TimeScheme,
    pub robin: RobinClosure,
    /// Record a field snapshot every this many steps; `None` disables.
    pub snapshot_stride: Option<usize>,
}

impl<T: Scalar> SimConfig<T> {
    /// c0 = 0.5, Δx = 0.1, Δt = 1e-4, z0 = 10x³, d = 2 sin t, branch 1, 3 s.
    pub fn reference() -> Self {
        Self {
            c0: T::lit(0.5),
            n_nodes: 11,
            dt: T::lit(1e-4),
            horizon: T::lit(3.0),
            initial: InitialProfile::reference(),
            disturbance: DisturbanceSpec::sinusoid(T::lit(2.0), T::one()),
            branch: 1,
            scheme: TimeScheme::ExplicitEuler,
            robin: RobinClosure::Corrected,
            snapshot_stride: Some(100),
        }
    }

    pub fn grid(&self) -> Result<UniformGrid<T>> {
        UniformGrid::new(self.n_nodes)
    }

    /// Number of time steps covering the horizon.
    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round().to_usize().unwrap_or(0)
    }

    pub fn time(&self, step: usize) -> T {
        T::from_count(step) * self.dt
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c0 >= T::zero() && self.c0.is_finite()) {
            return Err(Error::invalid("c0", format!("must be finite and non-negative, got {}", self.c0)));
        }
        if self.n_nodes < 3 {
            return Err(Error::invalid("nx", format!("need at least 3 nodes, got {}", self.n_nodes)));
        }
        if !(self.dt > T::zero() && self.dt.is_finite()) {
            return Err(Error::invalid("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.horizon > T::zero() && self.horizon.is_finite()) {
            return Err(Error::invalid("horizon", format!("must be positive, got {}", self.horizon)));
        }
        if self.scheme == TimeScheme::ExplicitEuler {
            let dx = T::one() / T::from_count(self.n_nodes - 1);
            let limit = dx * dx / T::lit(2.0);
            if self.dt > limit {
                return Err(Error::Unstable { dt: self.dt.as_f64(), limit: limit.as_f64() });
            }
        }
        if let InitialProfile::Table(values) = &self.initial {
            if values.len() != self.n_nodes {
                return Err(Error::GridMismatch { left: self.n_nodes, right: values.len() });
            }
        }
        if self.snapshot_stride == Some(0) {
            return Err(Error::invalid("snapshot_stride", "must be positive"));
        }
        Ok(())
    }
}
