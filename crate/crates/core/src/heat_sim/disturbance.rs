use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum DisturbanceKind<T> {
    Zero,
    Constant {
        value: T,
    },
    /// `a·sin(ωt + phase)`.
    Sinusoid {
        amplitude: T,
        omega: T,
        phase: T,
    },
    /// Piecewise-linear interpolation of samples taken every `step` seconds
    /// from `t = 0`; held constant outside the sampled range.
    Table {
        step: T,
        samples: Vec<T>,
    },
}

/// Boundary disturbance together with its certified bounds: `|d| ≤ kd`
/// everywhere and, when present, `|ḋ| ≤ c` almost everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct DisturbanceSpec<T> {
    kind: DisturbanceKind<T>,
    kd: T,
    c: Option<T>,
}

impl<T: Scalar> DisturbanceSpec<T> {
    pub fn zero() -> Self {
        Self { kind: DisturbanceKind::Zero, kd: T::zero(), c: Some(T::zero()) }
    }

    pub fn constant(value: T) -> Self {
        Self { kind: DisturbanceKind::Constant { value }, kd: value.abs(), c: Some(T::zero()) }
    }

    pub fn sinusoid(amplitude: T, omega: T) -> Self {
        Self::sinusoid_with_phase(amplitude, omega, T::zero())
    }

    pub fn sinusoid_with_phase(amplitude: T, omega: T, phase: T) -> Self {
        Self {
            kind: DisturbanceKind::Sinusoid { amplitude, omega, phase },
            kd: amplitude.abs(),
            c: Some(amplitude.abs() * omega.abs()),
        }
    }

    /// Tabulated disturbance with user-certified bounds. The certified `kd`
    /// must dominate the samples, and a supplied `c` must dominate the
    /// interpolant's slopes.
    pub fn table(step: T, samples: Vec<T>, kd: T, c: Option<T>) -> Result<Self> {
        if !(step > T::zero()) {
            return Err(Error::invalid("disturbance.step", "sample spacing must be positive"));
        }
        if samples.is_empty() {
            return Err(Error::invalid("disturbance.values", "table needs at least one sample"));
        }
        if let Some(bad) = samples.iter().find(|v| !(v.abs() <= kd)) {
            return Err(Error::invalid("disturbance.kd", format!("sample {bad} exceeds certified bound {kd}")));
        }
        if let Some(c) = c {
            let steepest = samples.windows(2).map(|w| ((w[1] - w[0]) / step).abs()).fold(T::zero(), T::max);
            if steepest > c {
                return Err(Error::invalid("disturbance.c", format!("slope {steepest} exceeds certified bound {c}")));
            }
        }
        Ok(Self { kind: DisturbanceKind::Table { step, samples }, kd, c })
    }

    pub fn kind(&self) -> &DisturbanceKind<T> {
        &self.kind
    }

    /// Certified sup bound `K_d`.
    pub fn kd(&self) -> T {
        self.kd
    }

    /// Certified derivative bound `C`, if any.
    pub fn c(&self) -> Option<T> {
        self.c
    }

    pub fn value(&self, t: T) -> T {
        match &self.kind {
            DisturbanceKind::Zero => T::zero(),
            DisturbanceKind::Constant { value } => *value,
            DisturbanceKind::Sinusoid { amplitude, omega, phase } => *amplitude * (*omega * t + *phase).sin(),
            DisturbanceKind::Table { step, samples } => {
                let (i, frac) = locate(*step, samples.len(), t);
                match samples.get(i + 1) {
                    Some(&next) => samples[i] + frac * (next - samples[i]),
                    None => samples[i],
                }
            }
        }
    }

    /// Exact time derivative (right derivative at table knots).
    pub fn derivative(&self, t: T) -> T {
        match &self.kind {
            DisturbanceKind::Zero | DisturbanceKind::Constant { .. } => T::zero(),
            DisturbanceKind::Sinusoid { amplitude, omega, phase } => *amplitude * *omega * (*omega * t + *phase).cos(),
            DisturbanceKind::Table { step, samples } => {
                if t < T::zero() {
                    return T::zero();
                }
                let (i, _) = locate(*step, samples.len(), t);
                match samples.get(i + 1) {
                    Some(&next) => (next - samples[i]) / *step,
                    None => T::zero(),
                }
            }
        }
    }
}

/// Interval index and fractional position of `t` in a uniform table.
fn locate<T: Scalar>(step: T, len: usize, t: T) -> (usize, T) {
    if t <= T::zero() {
        return (0, T::zero());
    }
    let pos = t / step;
    let i = pos.floor().to_usize().unwrap_or(usize::MAX);
    if i >= len - 1 {
        (len - 1, T::zero())
    } else {
        (i, pos - T::from_count(i))
    }
}
