use std::f64::consts::PI;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::mesh::Side;

/// Scalar time factor multiplying the spatial load pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum TimeProfile {
    /// `amplitude · sin(omega · t)`
    Sine {
        amplitude: f64,
        omega: f64,
    },
    Constant {
        amplitude: f64,
    },
}

impl TimeProfile {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Sine { amplitude, omega } => amplitude * (omega * t).sin(),
            TimeProfile::Constant { amplitude } => amplitude,
        }
    }

    /// Same shape, amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match *self {
            TimeProfile::Sine { amplitude, omega } => TimeProfile::Sine { amplitude: amplitude * factor, omega },
            TimeProfile::Constant { amplitude } => TimeProfile::Constant { amplitude: amplitude * factor },
        }
    }
}

/// A nodal load `direction · profile(t)` at one mesh node, plus an optional
/// uniform body force sharing the same time profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadSpec {
    /// Coordinates of the loaded node.
    pub position: [f64; 2],
    #[serde(default)]
    pub side: Side,
    /// Spatial direction at unit amplitude.
    pub direction: [f64; 2],
    #[serde(flatten)]
    pub profile: TimeProfile,
    /// Volume force per unit volume at unit amplitude.
    #[serde(default)]
    pub body_force: [f64; 2],
}

/// Horizontal oscillation `(1.5 sin(0.1πt), 0)`.
pub const LOAD1_AMPLITUDE: f64 = 1.5;
pub const LOAD_OMEGA: f64 = 0.1 * PI;

impl LoadSpec {
    /// Horizontal nodal load `(1.5 sin(0.1πt), 0)`.
    pub fn load1(position: [f64; 2]) -> Self {
        Self {
            position,
            side: Side::Minus,
            direction: [1.0, 0.0],
            profile: TimeProfile::Sine { amplitude: LOAD1_AMPLITUDE, omega: LOAD_OMEGA },
            body_force: [0.0, 0.0],
        }
    }

    /// Inclined load with both components `1.5 sin(0.1πt) sin(0.25π)`.
    pub fn load2(position: [f64; 2]) -> Self {
        let s = (0.25 * PI).sin();
        Self { direction: [s, s], ..Self::load1(position) }
    }

    pub fn custom(position: [f64; 2], direction: [f64; 2], amplitude: f64, omega: f64) -> Self {
        Self { direction, profile: TimeProfile::Sine { amplitude, omega }, ..Self::load1(position) }
    }

    pub fn constant(position: [f64; 2], direction: [f64; 2], amplitude: f64) -> Self {
        Self { direction, profile: TimeProfile::Constant { amplitude }, ..Self::load1(position) }
    }

    pub fn with_side(mut self, side: Side) -> Self {
        self.side = side;
        self
    }
}

/// Assembled load `f(t) = pattern · profile(t)` over the free DOFs.
#[derive(Debug, Clone, PartialEq)]
pub struct Load {
    pub pattern: DVector<f64>,
    pub profile: TimeProfile,
}

impl Load {
    pub fn zero(n: usize) -> Self {
        Self { pattern: DVector::zeros(n), profile: TimeProfile::Constant { amplitude: 0.0 } }
    }

    pub fn at(&self, t: f64) -> DVector<f64> {
        &self.pattern * self.profile.value(t)
    }

    /// Same spatial pattern, amplitude scaled.
    pub fn rescaled(&self, factor: f64) -> Self {
        Self { pattern: self.pattern.clone(), profile: self.profile.scaled(factor) }
    }
}
