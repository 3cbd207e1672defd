pub mod elasticity;
pub mod fsn;
pub mod ontology;
pub mod scalar;
pub mod tag;
pub mod query;
pub mod nav;
pub mod seed;

pub use scalar::{Exact, Real, Scalar};

pub type ElasticityParams = elasticity::ElasticityParams<f64>;
pub type ElasticityParamsF32 = elasticity::ElasticityParams<f32>;
pub type ElasticityParamsExact = elasticity::ElasticityParams<Exact>;
pub type MinkowskiPoint = tag::MinkowskiPoint<f64>;
pub type MinkowskiPointF32 = tag::MinkowskiPoint<f32>;
pub type MinkowskiPointExact = tag::MinkowskiPoint<Exact>;
pub type FolksodrivenTag = tag::FolksodrivenTag<f64>;
pub type FolksodrivenTagF32 = tag::FolksodrivenTag<f32>;
pub type FolksodrivenTagExact = tag::FolksodrivenTag<Exact>;
pub type FsnGraph = fsn::FsnGraph<f64>;
pub type FsnGraphF32 = fsn::FsnGraph<f32>;
