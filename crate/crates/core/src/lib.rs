//! Accessibility opinion mining over point-of-interest reviews.
//!
//! The pipeline runs from raw review and place files to region-level
//! regression: [`corpus`] ingests, [`filter`] extracts accessibility
//! snippets, [`annotation`] measures coder agreement and splits labeled
//! data, [`classify`] trains or calls attitude classifiers, [`lsva`] and
//! [`poianalysis`] summarize labels per word and per place, and [`geostat`]
//! joins everything to census regions and fits the additive model.
//! [`synth`] generates seeded data with known answers.

pub mod annotation;
pub mod classify;
pub mod corpus;
pub mod error;
pub mod filter;
pub mod geostat;
pub mod jsonl;
pub mod lsva;
pub mod poianalysis;
pub mod synth;

pub use error::{Error, Result};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
    #[doc = include_str!("../../../book/src/filtering.md")]
    mod filtering {}
    #[doc = include_str!("../../../book/src/agreement.md")]
    mod agreement {}
    #[doc = include_str!("../../../book/src/classification.md")]
    mod classification {}
    #[doc = include_str!("../../../book/src/lsva.md")]
    mod lsva {}
    #[doc = include_str!("../../../book/src/poi.md")]
    mod poi {}
    #[doc = include_str!("../../../book/src/regions.md")]
    mod regions {}
    #[doc = include_str!("../../../book/src/configuration.md")]
    mod configuration {}
}
