//! Central-difference discretization of `z ↦ z_xx` with the Robin row at
//! `x = 0` and the flux-driven Neumann row at `x = 1`, plus the one-step
//! maps of the two time integrators.

use crate::error::{Error, Result};
use crate::heat_sim::{RobinClosure, TimeScheme};
use crate::scalar::Scalar;
use crate::spectral::UniformGrid;

/// Discrete heat operator `A_h`. The boundary flux `u + d` enters only the
/// last row, with weight [`HeatOperator::flux_gain`].
#[derive(Debug, Clone)]
pub struct HeatOperator<T> {
    grid: UniformGrid<T>,
    c0: T,
    closure: RobinClosure,
}

impl<T: Scalar> HeatOperator<T> {
    pub fn new(grid: UniformGrid<T>, c0: T, closure: RobinClosure) -> Result<Self> {
        if grid.n_nodes() < 3 {
            return Err(Error::invalid("nx", "the stencil needs at least 3 nodes"));
        }
        Ok(Self { grid, c0, closure })
    }

    pub fn grid(&self) -> &UniformGrid<T> {
        &self.grid
    }

    fn robin_factor(&self) -> T {
        match self.closure {
            RobinClosure::Centered => T::one(),
            RobinClosure::Corrected => T::one() / (T::one() + self.c0 * self.grid.spacing() / T::lit(3.0)),
        }
    }

    /// Coefficient multiplying `u + d` in the last row, from eliminating the
    /// ghost `z_n = z_{n−2} + 2Δx (u + d)`.
    pub fn flux_gain(&self) -> T {
        T::lit(2.0) / self.grid.spacing()
    }

    /// `out = A_h z` with zero boundary flux.
    pub fn apply(&self, z: &[T], out: &mut [T]) {
        let n = self.grid.n_nodes();
        debug_assert_eq!(z.len(), n);
        debug_assert_eq!(out.len(), n);
        let dx = self.grid.spacing();
        let inv = T::one() / (dx * dx);
        let two = T::lit(2.0);
        out[0] = self.robin_factor() * inv * (two * z[1] - two * z[0] - two * dx * self.c0 * z[0]);
        for i in 1..n - 1 {
            out[i] = inv * (z[i - 1] - two * z[i] + z[i + 1]);
        }
        out[n - 1] = inv * two * (z[n - 2] - z[n - 1]);
    }

    /// Rows of `A_h` as (sub, main, super) diagonals.
    fn tridiagonal(&self) -> Tridiagonal<T> {
        let n = self.grid.n_nodes();
        let dx = self.grid.spacing();
        let inv = T::one() / (dx * dx);
        let two = T::lit(2.0);
        let mut t = Tridiagonal { lower: vec![inv; n], diag: vec![-two * inv; n], upper: vec![inv; n] };
        let f = self.robin_factor();
        t.lower[0] = T::zero();
        t.diag[0] = -f * inv * (two + two * dx * self.c0);
        t.upper[0] = f * two * inv;
        t.lower[n - 1] = two * inv;
        t.diag[n - 1] = -two * inv;
        t.upper[n - 1] = T::zero();
        t
    }
}

#[derive(Debug, Clone)]
struct Tridiagonal<T> {
    lower: Vec<T>,
    diag: Vec<T>,
    upper: Vec<T>,
}

/// Thomas-algorithm factorization of a tridiagonal matrix.
#[derive(Debug, Clone)]
struct ThomasFactors<T> {
    lower: Vec<T>,
    upper_mod: Vec<T>,
    pivot: Vec<T>,
}

impl<T: Scalar> ThomasFactors<T> {
    fn new(m: &Tridiagonal<T>) -> Self {
        let n = m.diag.len();
        let mut upper_mod = vec![T::zero(); n];
        let mut pivot = vec![T::zero(); n];
        pivot[0] = m.diag[0];
        upper_mod[0] = m.upper[0] / pivot[0];
        for i in 1..n {
            pivot[i] = m.diag[i] - m.lower[i] * upper_mod[i - 1];
            upper_mod[i] = m.upper[i] / pivot[i];
        }
        Self { lower: m.lower.clone(), upper_mod, pivot }
    }

    fn solve(&self, rhs: &[T]) -> Vec<T> {
        let n = rhs.len();
        let mut y = vec![T::zero(); n];
        y[0] = rhs[0] / self.pivot[0];
        for i in 1..n {
            y[i] = (rhs[i] - self.lower[i] * y[i - 1]) / self.pivot[i];
        }
        for i in (0..n - 1).rev() {
            y[i] = y[i] - self.upper_mod[i] * y[i + 1];
        }
        y
    }
}

/// One time step written as `z⁺ = F(z) + (u + d)·h`, which is affine in the
/// boundary flux for both integrators.
#[derive(Debug, Clone)]
pub struct StepMap<T> {
    op: HeatOperator<T>,
    dt: T,
    factors: Option<ThomasFactors<T>>,
    response: Vec<T>,
}

impl<T: Scalar> StepMap<T> {
    pub fn new(op: HeatOperator<T>, dt: T, scheme: TimeScheme) -> Self {
        let n = op.grid().n_nodes();
        let mut unit = vec![T::zero(); n];
        unit[n - 1] = dt * op.flux_gain();
        let (factors, response) = match scheme {
            TimeScheme::ExplicitEuler => (None, unit),
            TimeScheme::BackwardEuler => {
                let mut m = op.tridiagonal();
                for i in 0..n {
                    m.lower[i] = -dt * m.lower[i];
                    m.diag[i] = T::one() - dt * m.diag[i];
                    m.upper[i] = -dt * m.upper[i];
                }
                let f = ThomasFactors::new(&m);
                let response = f.solve(&unit);
                (Some(f), response)
            }
        };
        Self { op, dt, factors, response }
    }

    pub fn operator(&self) -> &HeatOperator<T> {
        &self.op
    }

    /// `F(z)`: the step taken with zero boundary flux.
    pub fn free(&self, z: &[T]) -> Vec<T> {
        match &self.factors {
            None => {
                let mut az = vec![T::zero(); z.len()];
                self.op.apply(z, &mut az);
                z.iter().zip(&az).map(|(&zi, &ai)| zi + self.dt * ai).collect()
            }
            Some(f) => f.solve(z),
        }
    }

    /// `h`: the state increment produced by a unit boundary flux.
    pub fn flux_response(&self) -> &[T] {
        &self.response
    }

    /// Completes a step from a precomputed `F(z)`.
    pub fn apply_flux(&self, mut free: Vec<T>, flux: T) -> Vec<T> {
        for (zi, &hi) in free.iter_mut().zip(&self.response) {
            *zi = *zi + flux * hi;
        }
        free
    }

    pub fn step(&self, z: &[T], flux: T) -> Vec<T> {
        self.apply_flux(self.free(z), flux)
    }
}
