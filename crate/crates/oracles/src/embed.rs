use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

fn q(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Minkowski coordinates `(c, r, e)` from raw counts, exactly.
pub fn point(
    incidence: u64,
    objects: u64,
    attributes: u64,
    clicks: u64,
    impressions: u64,
    ordinal: u64,
) -> (BigRational, BigRational, BigRational) {
    let cells = objects * attributes;
    let c = if cells == 0 { BigRational::zero() } else { q(incidence, cells) };
    let r = q(ordinal, ordinal + 1);
    let e = if impressions == 0 { BigRational::zero() } else { q(clicks, impressions) };
    (c, r, e)
}

/// `c² + r² − e²`.
pub fn interval(c: &BigRational, r: &BigRational, e: &BigRational) -> BigRational {
    c * c + r * r - e * e
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
