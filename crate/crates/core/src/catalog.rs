//! Movie records and the catalog snapshot they live in.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::audio::AudioLabel;
use crate::emotion::{fuse_channels, ChannelWeights, EmotionError, EmotionProfile, Threshold};

pub const SCHEMA_VERSION: u32 = 1;

/// Tolerance for cached fused profiles against a fresh fusion.
pub const CACHE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("duplicate movie id {0:?}")]
    DuplicateId(String),
    #[error("movie has an empty id")]
    EmptyId,
    #[error("movie {0:?} has no genres")]
    NoGenres(String),
    #[error("movie {id:?}: cached fused profile differs from its channels by {diff}")]
    StaleFusedProfile { id: String, diff: f64 },
    #[error("movie {id:?}: {source}")]
    Fusion { id: String, source: EmotionError },
    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Poster,
    Music,
    Description,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Poster, Channel::Music, Channel::Description];

    pub fn as_str(self) -> &'static str {
        match self {
            Channel::Poster => "poster",
            Channel::Music => "music",
            Channel::Description => "description",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where a cached channel profile came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Computed from the movie's raw inputs.
    Computed,
    /// Supplied verbatim in the manifest.
    External,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelEntry {
    pub profile: EmotionProfile,
    pub provenance: Provenance,
    #[serde(default)]
    pub degenerate: bool,
}

impl ChannelEntry {
    pub fn external(profile: EmotionProfile) -> Self {
        ChannelEntry {
            profile,
            provenance: Provenance::External,
            degenerate: profile.is_zero(),
        }
    }

    pub fn computed(score: crate::emotion::ChannelScore) -> Self {
        ChannelEntry {
            profile: score.profile,
            provenance: Provenance::Computed,
            degenerate: score.degenerate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ChannelProfiles {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<ChannelEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub music: Option<ChannelEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poster: Option<ChannelEntry>,
}

impl ChannelProfiles {
    pub fn get(&self, channel: Channel) -> Option<&ChannelEntry> {
        match channel {
            Channel::Poster => self.poster.as_ref(),
            Channel::Music => self.music.as_ref(),
            Channel::Description => self.description.as_ref(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.description.is_none() && self.music.is_none() && self.poster.is_none()
    }

    pub fn fuse(&self, weights: &ChannelWeights) -> Result<EmotionProfile, EmotionError> {
        fuse_channels(
            self.poster.as_ref().map(|c| &c.profile),
            self.music.as_ref().map(|c| &c.profile),
            self.description.as_ref().map(|c| &c.profile),
            weights,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MovieRecord {
    pub id: String,
    pub title: String,
    pub year: i32,
    pub genres: Vec<String>,
    #[serde(default)]
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poster_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audio_labels: Option<Vec<AudioLabel>>,
    #[serde(default)]
    pub channel_profiles: ChannelProfiles,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fused_profile: Option<EmotionProfile>,
}

impl MovieRecord {
    /// The movie's profile under `weights`: a fresh fusion of its channels,
    /// or the cached fused profile when no channel is stored.
    pub fn profile_under(&self, weights: &ChannelWeights) -> Result<EmotionProfile, EmotionError> {
        if self.channel_profiles.is_empty() {
            self.fused_profile.ok_or(EmotionError::NoChannels)
        } else {
            self.channel_profiles.fuse(weights)
        }
    }

    /// Case-insensitive genre membership test.
    pub fn shares_genre_with(&self, genres: &BTreeSet<String>) -> bool {
        self.genres
            .iter()
            .any(|g| genres.contains(&g.to_lowercase()))
    }
}

/// An immutable snapshot of the movie collection together with the fusion
/// parameters its cached profiles were computed under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub schema_version: u32,
    pub weights: ChannelWeights,
    pub threshold: Threshold,
    pub movies: Vec<MovieRecord>,
}

impl Catalog {
    pub fn empty(weights: ChannelWeights, threshold: Threshold) -> Self {
        Catalog {
            schema_version: SCHEMA_VERSION,
            weights,
            threshold,
            movies: Vec::new(),
        }
    }

    pub fn new(
        weights: ChannelWeights,
        threshold: Threshold,
        movies: Vec<MovieRecord>,
    ) -> Result<Self, CatalogError> {
        let catalog = Catalog {
            schema_version: SCHEMA_VERSION,
            weights,
            threshold,
            movies,
        };
        catalog.validate()?;
        Ok(catalog)
    }

    /// Checks schema version, id uniqueness, genres and cache coherence.
    pub fn validate(&self) -> Result<(), CatalogError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CatalogError::SchemaVersion {
                found: self.schema_version,
                expected: SCHEMA_VERSION,
            });
        }
        let mut ids = BTreeSet::new();
        for movie in &self.movies {
            validate_record(movie, &self.weights)?;
            if !ids.insert(movie.id.as_str()) {
                return Err(CatalogError::DuplicateId(movie.id.clone()));
            }
        }
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&MovieRecord> {
        self.movies.iter().find(|m| m.id == id)
    }

    pub fn len(&self) -> usize {
        self.movies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.movies.is_empty()
    }

    /// Validates and appends a record.
    pub fn insert(&mut self, movie: MovieRecord) -> Result<(), CatalogError> {
        validate_record(&movie, &self.weights)?;
        if self.get(&movie.id).is_some() {
            return Err(CatalogError::DuplicateId(movie.id));
        }
        self.movies.push(movie);
        Ok(())
    }
}

fn validate_record(movie: &MovieRecord, weights: &ChannelWeights) -> Result<(), CatalogError> {
    if movie.id.is_empty() {
        return Err(CatalogError::EmptyId);
    }
    if movie.genres.is_empty() {
        return Err(CatalogError::NoGenres(movie.id.clone()));
    }
    if movie.channel_profiles.is_empty() {
        return Ok(());
    }
    let fresh = movie
        .channel_profiles
        .fuse(weights)
        .map_err(|source| CatalogError::Fusion {
            id: movie.id.clone(),
            source,
        })?;
    if let Some(cached) = &movie.fused_profile {
        let diff = cached.max_abs_diff(&fresh);
        if diff > CACHE_TOLERANCE {
            return Err(CatalogError::StaleFusedProfile {
                id: movie.id.clone(),
                diff,
            });
        }
    }
    Ok(())
}
