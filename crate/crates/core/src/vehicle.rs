//! Vehicle limits and the constant wind field.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed range and lateral-acceleration limit of the vehicle.
///
/// A speed `v` admits turning radii no tighter than `v² / K`, so the
/// extreme radii are `v_min² / K` and `v_max² / K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleParams {
    pub v_min: f64,
    pub v_max: f64,
    #[serde(rename = "K")]
    pub k: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self { v_min: 0.5, v_max: 1.0, k: 1.0 }
    }
}

impl VehicleParams {
    pub fn new(v_min: f64, v_max: f64, k: f64) -> Result<Self> {
        let p = Self { v_min, v_max, k };
        p.validate()?;
        Ok(p)
    }

    pub fn with_v_min(v_min: f64) -> Result<Self> {
        Self::new(v_min, 1.0, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v_min > 0.0 && self.v_min <= self.v_max && self.k > 0.0) || !self.v_max.is_finite() {
            return Err(Error::InvalidParams(format!(
                "need 0 < v_min <= v_max and K > 0, got v_min={} v_max={} K={}",
                self.v_min, self.v_max, self.k
            )));
        }
        Ok(())
    }

    pub fn rho_min(&self) -> f64 {
        self.v_min * self.v_min / self.k
    }

    pub fn rho_max(&self) -> f64 {
        self.v_max * self.v_max / self.k
    }

    /// Speed at which `radius` is the tightest admissible turn.
    pub fn speed_for_radius(&self, radius: f64) -> f64 {
        (self.k * radius).sqrt()
    }

    pub fn radius_for_speed(&self, speed: f64) -> f64 {
        speed * speed / self.k
    }
}

/// Constant wind, in the same speed units as the vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct WindVector {
    pub wx: f64,
    pub wy: f64,
}

impl WindVector {
    pub const CALM: WindVector = WindVector { wx: 0.0, wy: 0.0 };

    pub fn new(wx: f64, wy: f64) -> Self {
        Self { wx, wy }
    }

    pub fn from_polar(magnitude: f64, direction: f64) -> Self {
        Self { wx: magnitude * direction.cos(), wy: magnitude * direction.sin() }
    }

    pub fn magnitude(&self) -> f64 {
        self.wx.hypot(self.wy)
    }

    pub fn is_calm(&self) -> bool {
        self.wx == 0.0 && self.wy == 0.0
    }

    /// The vehicle must always make forward progress over ground.
    pub fn check_against(&self, params: &VehicleParams) -> Result<()> {
        if self.magnitude() >= params.v_min {
            return Err(Error::WindTooStrong { wind: self.magnitude(), v_min: params.v_min });
        }
        Ok(())
    }
}
