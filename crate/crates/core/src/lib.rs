//! Multi-channel emotion profiling and group consensus ranking for movies.
//!
//! Every channel (description text, poster colors, soundtrack labels)
//! produces an [`EmotionProfile`] over the same five emotions. Profiles are
//! fused by a weighted average, thresholded into [`EmotionSet`]s and compared
//! with Jaccard similarity; a group's consensus score for a candidate is the
//! mean similarity to each member's favorite movie.
//!
//! The crate is `no_std` and only needs `alloc`. Decoding files, images and
//! audio lives in the `moodpick` companion crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod audio;
pub mod catalog;
pub mod color;
pub mod emotion;
pub mod evaluate;
pub mod recommend;
pub mod text;

pub use emotion::{
    fuse_channels, jaccard, mean_jaccard, to_emotion_set, ChannelScore, ChannelWeights, Emotion,
    EmotionError, EmotionProfile, EmotionSet, Threshold,
};

pub use catalog::{Catalog, Channel, ChannelEntry, ChannelProfiles, MovieRecord, Provenance};
pub use recommend::{recommend, GroupSession, ParticipantSpec, RecommendationResult};
