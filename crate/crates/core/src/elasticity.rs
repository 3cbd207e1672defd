//! Piecewise-linear stress-strain model of the structure network and the
//! colour ramp used to display it.
//!
//! The curve rises with slope `modulus` up to the yield strain, continues with
//! `post_yield_slope` up to the necking strain, then softens linearly to zero
//! at twice the necking strain.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElasticityError {
    #[error("strain must be non-negative")]
    NegativeStrain,
    #[error("invalid elasticity parameters: {0}")]
    InvalidParams(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Region {
    Elastic,
    Yield,
    Necking,
}

impl Region {
    pub fn as_str(&self) -> &'static str {
        match self {
            Region::Elastic => "Elastic",
            Region::Yield => "Yield",
            Region::Necking => "Necking",
        }
    }
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    pub const RED: Rgb = Rgb(255, 0, 0);
    pub const GREEN: Rgb = Rgb(0, 160, 0);
    pub const PURPLE: Rgb = Rgb(128, 0, 128);
    pub const NEAR_BLACK: Rgb = Rgb(32, 0, 32);
    /// Used for sectors that carry no stress-strain information.
    pub const NEUTRAL: Rgb = Rgb(200, 200, 200);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElasticityParams<T> {
    pub modulus: T,
    pub yield_strain: T,
    pub necking_strain: T,
    pub post_yield_slope: T,
}

impl<T: Scalar> Default for ElasticityParams<T> {
    fn default() -> Self {
        Self {
            modulus: T::one(),
            yield_strain: T::ratio(1, 5),
            necking_strain: T::ratio(3, 5),
            post_yield_slope: T::ratio(1, 4),
        }
    }
}

impl<T: Scalar> ElasticityParams<T> {
    pub fn new(
        modulus: T,
        yield_strain: T,
        necking_strain: T,
        post_yield_slope: T,
    ) -> Result<Self, ElasticityError> {
        let params = Self {
            modulus,
            yield_strain,
            necking_strain,
            post_yield_slope,
        };
        params.validate()?;
        Ok(params)
    }

    // negated comparisons so that NaN fails every check
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), ElasticityError> {
        if !(self.modulus > T::zero()) {
            return Err(ElasticityError::InvalidParams("modulus must be positive"));
        }
        if !(self.yield_strain > T::zero()) {
            return Err(ElasticityError::InvalidParams("yield strain must be positive"));
        }
        if !(self.necking_strain > self.yield_strain) {
            return Err(ElasticityError::InvalidParams(
                "necking strain must exceed yield strain",
            ));
        }
        if !(self.post_yield_slope >= T::zero()) {
            return Err(ElasticityError::InvalidParams(
                "post-yield slope must be non-negative",
            ));
        }
        Ok(())
    }

    /// Strain at which the softened curve reaches zero stress.
    pub fn fracture_strain(&self) -> T {
        self.necking_strain + self.necking_strain
    }

    /// Stress at the necking strain, the peak of the curve.
    pub fn peak_stress(&self) -> T {
        self.modulus * self.yield_strain
            + self.post_yield_slope * (self.necking_strain - self.yield_strain)
    }
}

fn check_strain<T: Scalar>(strain: T) -> Result<(), ElasticityError> {
    // also rejects NaN
    if strain >= T::zero() {
        Ok(())
    } else {
        Err(ElasticityError::NegativeStrain)
    }
}

/// Region of a strain value. Boundary strains belong to the higher region.
/// The stress is accepted for symmetry with the sample type but does not
/// influence the result.
pub fn classify_region<T: Scalar>(
    _stress: T,
    strain: T,
    params: &ElasticityParams<T>,
) -> Result<Region, ElasticityError> {
    region_of(strain, params)
}

pub fn region_of<T: Scalar>(strain: T, params: &ElasticityParams<T>) -> Result<Region, ElasticityError> {
    check_strain(strain)?;
    Ok(if strain < params.yield_strain {
        Region::Elastic
    } else if strain < params.necking_strain {
        Region::Yield
    } else {
        Region::Necking
    })
}

pub fn stress_at<T: Scalar>(strain: T, params: &ElasticityParams<T>) -> Result<T, ElasticityError> {
    check_strain(strain)?;
    let ElasticityParams {
        modulus,
        yield_strain,
        necking_strain,
        post_yield_slope,
    } = *params;
    let fracture = params.fracture_strain();
    Ok(if strain < yield_strain {
        modulus * strain
    } else if strain < necking_strain {
        modulus * yield_strain + post_yield_slope * (strain - yield_strain)
    } else if strain < fracture {
        params.peak_stress() * (fracture - strain) / necking_strain
    } else {
        T::zero()
    })
}

fn lerp_channel<T: Scalar>(from: u8, to: u8, t: T) -> u8 {
    let from_s = T::from_u8(from).unwrap();
    let to_s = T::from_u8(to).unwrap();
    let value = from_s + (to_s - from_s) * t;
    // round half away from zero; channels are always within [0, 255]
    let v = value.to_f64().unwrap_or(0.0).round();
    v.clamp(0.0, 255.0) as u8
}

fn lerp_rgb<T: Scalar>(from: Rgb, to: Rgb, t: T) -> Rgb {
    Rgb(
        lerp_channel(from.0, to.0, t),
        lerp_channel(from.1, to.1, t),
        lerp_channel(from.2, to.2, t),
    )
}

/// Colour ramp red → green → purple → near-black through the anchor strains
/// `0`, yield, necking and twice necking. Clamped past the last stop.
pub fn region_color<T: Scalar>(strain: T, params: &ElasticityParams<T>) -> Result<Rgb, ElasticityError> {
    check_strain(strain)?;
    let stops = [
        (T::zero(), Rgb::RED),
        (params.yield_strain, Rgb::GREEN),
        (params.necking_strain, Rgb::PURPLE),
        (params.fracture_strain(), Rgb::NEAR_BLACK),
    ];
    for pair in stops.windows(2) {
        let (lo, lo_color) = pair[0];
        let (hi, hi_color) = pair[1];
        if strain < hi {
            let t = (strain - lo) / (hi - lo);
            return Ok(lerp_rgb(lo_color, hi_color, t));
        }
    }
    Ok(Rgb::NEAR_BLACK)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StressStrainSample<T> {
    pub stress: T,
    pub strain: T,
    pub region: Region,
}

impl<T: Scalar> StressStrainSample<T> {
    /// Samples the constitutive curve at `strain`.
    pub fn at(strain: T, params: &ElasticityParams<T>) -> Result<Self, ElasticityError> {
        let stress = stress_at(strain, params)?;
        let region = classify_region(stress, strain, params)?;
        Ok(Self {
            stress,
            strain,
            region,
        })
    }
}
