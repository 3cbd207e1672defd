//! Exact piecewise constitutive curve and colour ramp.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

#[derive(Debug, Clone)]
pub struct Params {
    pub modulus: BigRational,
    pub yield_strain: BigRational,
    pub necking_strain: BigRational,
    pub post_yield_slope: BigRational,
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Default for Params {
    fn default() -> Self {
        Self {
            modulus: q(1, 1),
            yield_strain: q(1, 5),
            necking_strain: q(3, 5),
            post_yield_slope: q(1, 4),
        }
    }
}

/// 0 = elastic, 1 = yield, 2 = necking.
pub fn region_rank(strain: &BigRational, p: &Params) -> u8 {
    if *strain >= p.necking_strain {
        2
    } else if *strain >= p.yield_strain {
        1
    } else {
        0
    }
}

pub fn stress(strain: &BigRational, p: &Params) -> BigRational {
    let at_yield = &p.modulus * &p.yield_strain;
    let peak = &at_yield + &p.post_yield_slope * (&p.necking_strain - &p.yield_strain);
    let fracture = &p.necking_strain * BigInt::from(2);
    if *strain < p.yield_strain {
        &p.modulus * strain
    } else if *strain < p.necking_strain {
        at_yield + &p.post_yield_slope * (strain - &p.yield_strain)
    } else if *strain < fracture {
        // linear from (necking, peak) down to (fracture, 0)
        peak * (fracture - strain) / &p.necking_strain
    } else {
        BigRational::zero()
    }
}

pub fn peak(p: &Params) -> BigRational {
    stress(&p.necking_strain, p)
}

fn channel(from: u8, to: u8, t: &BigRational) -> u8 {
    let v = BigRational::from_integer(BigInt::from(from))
        + BigRational::from_integer(BigInt::from(to as i32 - from as i32)) * t;
    // BigRational::round rounds half away from zero
    v.round().to_integer().to_u8().expect("channel in range")
}

pub fn color(strain: &BigRational, p: &Params) -> (u8, u8, u8) {
    let stops = [
        (BigRational::zero(), (255, 0, 0)),
        (p.yield_strain.clone(), (0, 160, 0)),
        (p.necking_strain.clone(), (128, 0, 128)),
        (&p.necking_strain * BigInt::from(2), (32, 0, 32)),
    ];
    for w in stops.windows(2) {
        let (lo, a) = &w[0];
        let (hi, b) = &w[1];
        if strain < hi {
            let t = (strain - lo) / (hi - lo);
            return (channel(a.0, b.0, &t), channel(a.1, b.1, &t), channel(a.2, b.2, &t));
        }
    }
    (32, 0, 32)
}
