//! The Folksodriven tag: a formal context, its time exposition (CTR), the
//! resource it points to, and the derived point in Minkowski space.

use std::collections::BTreeSet;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TagError {
    #[error("tag was never displayed: click-through rate is undefined")]
    ZeroImpressions,
    #[error("{clicks} clicks exceed {impressions} impressions")]
    ClicksExceedImpressions { clicks: u64, impressions: u64 },
    #[error("incidence ({object}, {attribute}) references an unknown object or attribute")]
    DanglingIncidence { object: String, attribute: String },
    #[error("resource uri `{0}` is not an absolute uri")]
    InvalidUri(String),
}

/// Formal context `(T, D, I)`: objects, attributes, and their incidence.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawContext")]
pub struct FormalContext {
    objects: BTreeSet<String>,
    attributes: BTreeSet<String>,
    incidence: BTreeSet<(String, String)>,
}

#[derive(Deserialize)]
struct RawContext {
    objects: BTreeSet<String>,
    attributes: BTreeSet<String>,
    incidence: BTreeSet<(String, String)>,
}

impl TryFrom<RawContext> for FormalContext {
    type Error = TagError;

    fn try_from(raw: RawContext) -> Result<Self, Self::Error> {
        FormalContext::new(raw.objects, raw.attributes, raw.incidence)
    }
}

impl FormalContext {
    pub fn new<O, A, I>(objects: O, attributes: A, incidence: I) -> Result<Self, TagError>
    where
        O: IntoIterator,
        O::Item: Into<String>,
        A: IntoIterator,
        A::Item: Into<String>,
        I: IntoIterator<Item = (String, String)>,
    {
        let objects: BTreeSet<String> = objects.into_iter().map(Into::into).collect();
        let attributes: BTreeSet<String> = attributes.into_iter().map(Into::into).collect();
        let incidence: BTreeSet<(String, String)> = incidence.into_iter().collect();
        for (object, attribute) in &incidence {
            if !objects.contains(object) || !attributes.contains(attribute) {
                return Err(TagError::DanglingIncidence {
                    object: object.clone(),
                    attribute: attribute.clone(),
                });
            }
        }
        Ok(Self {
            objects,
            attributes,
            incidence,
        })
    }

    /// Context where every object carries every attribute.
    pub fn full<O, A>(objects: O, attributes: A) -> Self
    where
        O: IntoIterator,
        O::Item: Into<String>,
        A: IntoIterator,
        A::Item: Into<String>,
    {
        let objects: BTreeSet<String> = objects.into_iter().map(Into::into).collect();
        let attributes: BTreeSet<String> = attributes.into_iter().map(Into::into).collect();
        let incidence = objects
            .iter()
            .flat_map(|o| attributes.iter().map(move |a| (o.clone(), a.clone())))
            .collect();
        Self {
            objects,
            attributes,
            incidence,
        }
    }

    pub fn objects(&self) -> &BTreeSet<String> {
        &self.objects
    }

    pub fn attributes(&self) -> &BTreeSet<String> {
        &self.attributes
    }

    pub fn incidence(&self) -> &BTreeSet<(String, String)> {
        &self.incidence
    }

    /// `|I| / (|T|·|D|)`, or 0 for a context with no objects or no attributes.
    pub fn density<T: Scalar>(&self) -> T {
        let cells = (self.objects.len() * self.attributes.len()) as u64;
        if cells == 0 {
            T::zero()
        } else {
            T::ratio(self.incidence.len() as u64, cells)
        }
    }
}

/// Free-function form of [`FormalContext::density`].
pub fn context_density<T: Scalar>(context: &FormalContext) -> T {
    context.density()
}

/// Clicks and impressions of a resource.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawExposition")]
pub struct TimeExposition {
    clicks: u64,
    impressions: u64,
}

#[derive(Deserialize)]
struct RawExposition {
    clicks: u64,
    impressions: u64,
}

impl TryFrom<RawExposition> for TimeExposition {
    type Error = TagError;

    fn try_from(raw: RawExposition) -> Result<Self, Self::Error> {
        TimeExposition::new(raw.clicks, raw.impressions)
    }
}

impl TimeExposition {
    pub fn new(clicks: u64, impressions: u64) -> Result<Self, TagError> {
        if clicks > impressions {
            return Err(TagError::ClicksExceedImpressions {
                clicks,
                impressions,
            });
        }
        Ok(Self {
            clicks,
            impressions,
        })
    }

    pub fn clicks(&self) -> u64 {
        self.clicks
    }

    pub fn impressions(&self) -> u64 {
        self.impressions
    }

    /// Click-through rate as a reduced fraction.
    pub fn ctr_exact(&self) -> Result<Ratio<u64>, TagError> {
        if self.impressions == 0 {
            return Err(TagError::ZeroImpressions);
        }
        Ok(Ratio::new(self.clicks, self.impressions))
    }

    pub fn ctr<T: Scalar>(&self) -> Result<T, TagError> {
        if self.impressions == 0 {
            return Err(TagError::ZeroImpressions);
        }
        Ok(T::ratio(self.clicks, self.impressions))
    }
}

/// Free-function form of [`TimeExposition::ctr`].
pub fn compute_ctr<T: Scalar>(exposition: &TimeExposition) -> Result<T, TagError> {
    exposition.ctr()
}

/// A web resource and its intake position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawResource")]
pub struct Resource {
    uri: String,
    ordinal: u64,
}

#[derive(Deserialize)]
struct RawResource {
    uri: String,
    ordinal: u64,
}

impl TryFrom<RawResource> for Resource {
    type Error = TagError;

    fn try_from(raw: RawResource) -> Result<Self, Self::Error> {
        Resource::new(raw.uri, raw.ordinal)
    }
}

impl Resource {
    pub fn new(uri: impl Into<String>, ordinal: u64) -> Result<Self, TagError> {
        let uri = uri.into();
        // `Url::parse` only succeeds on absolute uris (it requires a scheme).
        if url::Url::parse(&uri).is_err() {
            return Err(TagError::InvalidUri(uri));
        }
        Ok(Self { uri, ordinal })
    }

    pub fn uri(&self) -> &str {
        &self.uri
    }

    pub fn ordinal(&self) -> u64 {
        self.ordinal
    }

    /// `ordinal / (1 + ordinal)`, squashed into `[0, 1)`.
    pub fn coordinate<T: Scalar>(&self) -> T {
        T::ratio(self.ordinal, self.ordinal + 1)
    }
}

/// Point of the tag space with signature `(+, +, -)`; the exposition axis is
/// the time-like one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiPoint<T> {
    pub c: T,
    pub r: T,
    pub e: T,
}

/// Causal character of an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntervalKind {
    SpaceLike,
    LightLike,
    TimeLike,
}

impl<T: Scalar> MinkowskiPoint<T> {
    pub fn new(c: T, r: T, e: T) -> Self {
        Self { c, r, e }
    }

    /// `s² = c² + r² − e²`.
    pub fn interval(&self) -> T {
        self.c * self.c + self.r * self.r - self.e * self.e
    }

    /// Squared interval of the separation `self − other`.
    pub fn interval_to(&self, other: &Self) -> T {
        Self::new(self.c - other.c, self.r - other.r, self.e - other.e).interval()
    }

    pub fn kind(&self) -> IntervalKind {
        let s2 = self.interval();
        if s2 < T::zero() {
            IntervalKind::TimeLike
        } else if s2 > T::zero() {
            IntervalKind::SpaceLike
        } else {
            IntervalKind::LightLike
        }
    }
}

/// Embeds the three tag components. Zero impressions put the tag at `e = 0`.
pub fn embed_parts<T: Scalar>(
    context: &FormalContext,
    exposition: &TimeExposition,
    resource: &Resource,
) -> MinkowskiPoint<T> {
    MinkowskiPoint {
        c: context.density(),
        r: resource.coordinate(),
        e: exposition.ctr().unwrap_or_else(|_| T::zero()),
    }
}

/// The `(C, E, R, X)` tuple. `point` is kept in sync with the other three
/// components by every mutator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FolksodrivenTag<T> {
    id: String,
    label: String,
    context: FormalContext,
    exposition: TimeExposition,
    resource: Resource,
    point: MinkowskiPoint<T>,
}

impl<T: Scalar> FolksodrivenTag<T> {
    pub fn new(
        id: impl Into<String>,
        label: impl Into<String>,
        context: FormalContext,
        exposition: TimeExposition,
        resource: Resource,
    ) -> Self {
        let point = embed_parts(&context, &exposition, &resource);
        Self {
            id: id.into(),
            label: label.into(),
            context,
            exposition,
            resource,
            point,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn context(&self) -> &FormalContext {
        &self.context
    }

    pub fn exposition(&self) -> &TimeExposition {
        &self.exposition
    }

    pub fn resource(&self) -> &Resource {
        &self.resource
    }

    pub fn point(&self) -> &MinkowskiPoint<T> {
        &self.point
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn set_context(&mut self, context: FormalContext) {
        self.context = context;
        self.reembed();
    }

    pub fn set_exposition(&mut self, exposition: TimeExposition) {
        self.exposition = exposition;
        self.reembed();
    }

    fn reembed(&mut self) {
        self.point = embed_parts(&self.context, &self.exposition, &self.resource);
    }
}

/// Recomputes the point of a tag from its components.
pub fn embed<T: Scalar>(tag: &FolksodrivenTag<T>) -> MinkowskiPoint<T> {
    embed_parts(tag.context(), tag.exposition(), tag.resource())
}
