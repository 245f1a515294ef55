//! Eigenpairs of the Robin/Neumann heat operator and the discrete inner
//! product that defines the sliding variable.
//!
//! The operator is `z ↦ z''` on `[0, 1]` with `z'(0) = c0·z(0)` and
//! `z'(1) = 0`. Its eigenpairs are
//!
//! ```text
//! φ(x) = cos(r x) + (c0 / r) sin(r x),    λ = −r²,    r tan(r) = c0,
//! ```
//!
//! with one root `r` in each interval `(kπ, kπ + π/2)`. Eigenfunctions keep
//! the normalization `φ(0) = 1`; the control laws divide by `B*φ = φ(1)` of
//! this same representative, so any rescaling cancels.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Uniform grid over `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid<T> {
    n_nodes: usize,
    spacing: T,
}

impl<T: Scalar> UniformGrid<T> {
    pub fn new(n_nodes: usize) -> Result<Self> {
        if n_nodes < 2 {
            return Err(Error::invalid("n_nodes", format!("need at least 2 nodes, got {n_nodes}")));
        }
        Ok(Self { n_nodes, spacing: T::one() / T::from_count(n_nodes - 1) })
    }

    /// Grid with spacing `dx`; `1 / dx` must be an integer up to rounding.
    pub fn from_spacing(dx: T) -> Result<Self> {
        if !(dx > T::zero() && dx <= T::one()) {
            return Err(Error::invalid("dx", format!("spacing must lie in (0, 1], got {dx}")));
        }
        let cells = (T::one() / dx).round();
        let n = cells.to_usize().ok_or_else(|| Error::invalid("dx", "too many cells"))?;
        if (cells * dx - T::one()).abs() > T::lit(1e3) * T::epsilon() {
            return Err(Error::invalid("dx", format!("1/dx = {} is not an integer", T::one() / dx)));
        }
        Self::new(n + 1)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    /// Node coordinate; the last node is exactly `1`.
    pub fn x(&self, i: usize) -> T {
        T::from_count(i) / T::from_count(self.n_nodes - 1)
    }

    pub fn nodes(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.n_nodes).map(move |i| self.x(i))
    }

    /// Composite trapezoid weights.
    pub fn trapezoid_weights(&self) -> Vec<T> {
        let mut w = vec![self.spacing; self.n_nodes];
        let half = self.spacing / T::lit(2.0);
        w[0] = half;
        w[self.n_nodes - 1] = half;
        w
    }

    /// Trapezoid approximation of `∫₀¹ a·b dx` for nodal vectors on this grid.
    pub fn dot(&self, a: &[T], b: &[T]) -> T {
        debug_assert_eq!(a.len(), self.n_nodes);
        debug_assert_eq!(b.len(), self.n_nodes);
        let n = self.n_nodes;
        let interior = a[1..n - 1].iter().zip(&b[1..n - 1]).fold(T::zero(), |acc, (&x, &y)| acc + x * y);
        let ends = (a[0] * b[0] + a[n - 1] * b[n - 1]) / T::lit(2.0);
        self.spacing * (interior + ends)
    }

    /// Trapezoid `L²` norm.
    pub fn norm(&self, a: &[T]) -> T {
        self.dot(a, a).sqrt()
    }
}

/// Nodal values of a function on a [`UniformGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction<T> {
    grid: UniformGrid<T>,
    values: Vec<T>,
}

impl<T: Scalar> SampledFunction<T> {
    pub fn new(grid: UniformGrid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.n_nodes() {
            return Err(Error::GridMismatch { left: grid.n_nodes(), right: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: UniformGrid<T>, f: impl Fn(T) -> T) -> Self {
        let values = grid.nodes().map(f).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &UniformGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }
}

/// One eigenpair of the heat operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenpair<T> {
    c0: T,
    branch: usize,
    r: T,
    lambda: T,
    b_star_phi: T,
    scale: T,
}

impl<T: Scalar> Eigenpair<T> {
    pub fn c0(&self) -> T {
        self.c0
    }

    pub fn branch(&self) -> usize {
        self.branch
    }

    /// Frequency `r = √(−λ)`.
    pub fn r(&self) -> T {
        self.r
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    /// Trace of the eigenfunction at the actuated end, `φ(1)`.
    pub fn b_star_phi(&self) -> T {
        self.b_star_phi
    }

    /// Multiplier applied to the `φ(0) = 1` representative.
    pub fn scale(&self) -> T {
        self.scale
    }

    /// Characteristic-equation residual `|r tan r − c0|`.
    pub fn residual(&self) -> T {
        characteristic(self.r, self.c0).abs()
    }

    /// Same eigenvalue, eigenfunction multiplied by `c`.
    pub fn rescaled(&self, c: T) -> Self {
        Self { scale: self.scale * c, b_star_phi: self.b_star_phi * c, ..*self }
    }

    pub fn eval(&self, x: T) -> T {
        let rx = self.r * x;
        self.scale * (rx.cos() + self.c0 / self.r * rx.sin())
    }

    /// `φ'(x) = −r sin(rx) + c0 cos(rx)`.
    pub fn derivative(&self, x: T) -> T {
        let rx = self.r * x;
        self.scale * (self.c0 * rx.cos() - self.r * rx.sin())
    }

    /// The closed-form estimate `−2c0 − π²` of the branch-1 eigenvalue.
    pub fn approximate_branch1_lambda(c0: T) -> T {
        -(T::lit(2.0) * c0) - T::PI() * T::PI()
    }

    /// `|λ − (−2c0 − π²)|`.
    pub fn approximation_gap(&self) -> T {
        (self.lambda - Self::approximate_branch1_lambda(self.c0)).abs()
    }
}

fn characteristic<T: Scalar>(r: T, c0: T) -> T {
    r * r.tan() - c0
}

/// Residual accepted after bisection: a few ulps of `r` pushed through the
/// slope `f'(r) = tan r + r sec² r`, which blows up as `c0` grows and the
/// root approaches the pole.
fn residual_tolerance<T: Scalar>(r: T, c0: T) -> T {
    let t = r.tan();
    let slope = t.abs() + r * (T::one() + t * t);
    T::lit(64.0) * T::epsilon() * (T::one() + c0 + r * slope)
}

/// Solves `r tan r = c0` on branch `k`, i.e. for `r ∈ (kπ, kπ + π/2)`.
///
/// `r tan r` increases monotonically from `≈ 0` to `+∞` on that interval,
/// so plain bisection always converges.
pub fn solve_eigenvalue<T: Scalar>(c0: T, branch: usize) -> Result<Eigenpair<T>> {
    if !(c0 > T::zero()) || !c0.is_finite() {
        return Err(Error::invalid("c0", format!("Robin coefficient must be positive, got {c0}")));
    }
    let k = T::from_count(branch);
    let mut lo = k * T::PI();
    let pole = lo + T::FRAC_PI_2();

    // Step back from the pole until tan is safely large and positive.
    let mut delta = T::epsilon().sqrt();
    let mut hi = pole - delta;
    while !(characteristic(hi, c0) > T::zero() && hi.tan().is_finite()) {
        delta = delta / T::lit(10.0);
        hi = pole - delta;
        if delta < T::epsilon() * pole {
            break;
        }
    }

    let f_lo = characteristic(lo, c0);
    let f_hi = characteristic(hi, c0);
    if !(f_lo < T::zero() && f_hi > T::zero()) {
        return Err(Error::NoSignChange { lo: lo.as_f64(), hi: hi.as_f64(), f_lo: f_lo.as_f64(), f_hi: f_hi.as_f64() });
    }

    for _ in 0..4096 {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if characteristic(mid, c0) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = if characteristic(lo, c0).abs() <= characteristic(hi, c0).abs() { lo } else { hi };

    let residual = characteristic(r, c0).abs();
    if !(residual < residual_tolerance(r, c0)) {
        return Err(Error::NotConverged { residual: residual.as_f64() });
    }
    let b_star_phi = r.cos() + c0 / r * r.sin();
    if b_star_phi == T::zero() {
        return Err(Error::DegenerateTrace);
    }
    Ok(Eigenpair { c0, branch, r, lambda: -(r * r), b_star_phi, scale: T::one() })
}

/// `φ(x) = cos(r x) + (c0 / r) sin(r x)`.
pub fn eigenfunction_eval<T: Scalar>(pair: &Eigenpair<T>, x: T) -> T {
    pair.eval(x)
}

pub fn sample_eigenfunction<T: Scalar>(pair: &Eigenpair<T>, grid: UniformGrid<T>) -> SampledFunction<T> {
    SampledFunction::from_fn(grid, |x| pair.eval(x))
}

/// Composite trapezoid approximation of `∫₀¹ f g dx`.
pub fn inner_product<T: Scalar>(f: &SampledFunction<T>, g: &SampledFunction<T>) -> Result<T> {
    if f.grid.n_nodes() != g.grid.n_nodes() {
        return Err(Error::GridMismatch { left: f.grid.n_nodes(), right: g.grid.n_nodes() });
    }
    Ok(f.grid.dot(&f.values, &g.values))
}
