//! The five-emotion vocabulary and the algebra every channel shares:
//! weighted fusion, thresholding into sets, Jaccard similarity and the
//! group mean.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::de::{self, MapAccess, SeqAccess, Visitor};
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmotionError {
    #[error("no channels")]
    NoChannels,
    #[error("zero total weight")]
    ZeroTotalWeight,
    #[error("degenerate pair")]
    DegeneratePair,
    #[error("no participants")]
    NoParticipants,
    #[error("score for {emotion} is {value}, expected a finite value in [0, 1]")]
    ScoreOutOfRange { emotion: Emotion, value: f64 },
    #[error("invalid channel weights: {0}")]
    InvalidWeights(&'static str),
    #[error("threshold {0} outside [0, 1)")]
    InvalidThreshold(f64),
    #[error("unknown emotion {0:?}")]
    UnknownEmotion(String),
}

/// One of the five canonical emotions. Declaration order is the canonical
/// order used for iteration, serialization and flattening.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Emotion {
    Happy,
    Angry,
    Surprise,
    Sad,
    Fear,
}

impl Emotion {
    pub const ALL: [Emotion; 5] = [
        Emotion::Happy,
        Emotion::Angry,
        Emotion::Surprise,
        Emotion::Sad,
        Emotion::Fear,
    ];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn as_str(self) -> &'static str {
        match self {
            Emotion::Happy => "Happy",
            Emotion::Angry => "Angry",
            Emotion::Surprise => "Surprise",
            Emotion::Sad => "Sad",
            Emotion::Fear => "Fear",
        }
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Emotion {
    type Err = EmotionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Emotion::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| EmotionError::UnknownEmotion(s.into()))
    }
}

/// A score in `[0, 1]` for each of the five emotions.
///
/// Profiles are not distributions: text and audio profiles sum to one, poster
/// profiles are per-emotion similarities and usually do not.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EmotionProfile {
    scores: [f64; 5],
}

impl EmotionProfile {
    pub const ZERO: EmotionProfile = EmotionProfile { scores: [0.0; 5] };

    /// Builds a profile from scores in canonical order.
    pub fn new(scores: [f64; 5]) -> Result<Self, EmotionError> {
        for (emotion, &value) in Emotion::ALL.iter().zip(&scores) {
            if !(value.is_finite() && (0.0..=1.0).contains(&value)) {
                return Err(EmotionError::ScoreOutOfRange {
                    emotion: *emotion,
                    value,
                });
            }
        }
        Ok(EmotionProfile { scores })
    }

    /// Builds a profile from `(emotion, score)` pairs; emotions not listed
    /// score zero. A repeated emotion keeps the last value.
    pub fn from_pairs<I>(pairs: I) -> Result<Self, EmotionError>
    where
        I: IntoIterator<Item = (Emotion, f64)>,
    {
        let mut scores = [0.0; 5];
        for (emotion, value) in pairs {
            scores[emotion.index()] = value;
        }
        Self::new(scores)
    }

    pub fn get(&self, emotion: Emotion) -> f64 {
        self.scores[emotion.index()]
    }

    pub fn scores(&self) -> &[f64; 5] {
        &self.scores
    }

    pub fn iter(&self) -> impl Iterator<Item = (Emotion, f64)> + '_ {
        Emotion::ALL.into_iter().zip(self.scores.iter().copied())
    }

    pub fn is_zero(&self) -> bool {
        self.scores.iter().all(|&s| s == 0.0)
    }

    pub fn sum(&self) -> f64 {
        self.scores.iter().sum()
    }

    /// Largest per-emotion absolute difference.
    pub fn max_abs_diff(&self, other: &EmotionProfile) -> f64 {
        self.scores
            .iter()
            .zip(&other.scores)
            .map(|(a, b)| libm::fabs(a - b))
            .fold(0.0, f64::max)
    }
}

impl Serialize for EmotionProfile {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(5))?;
        for (emotion, score) in self.iter() {
            map.serialize_entry(emotion.as_str(), &score)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for EmotionProfile {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ProfileVisitor;

        impl<'de> Visitor<'de> for ProfileVisitor {
            type Value = EmotionProfile;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an object with keys Happy, Angry, Surprise, Sad, Fear")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut scores: [Option<f64>; 5] = [None; 5];
                while let Some(key) = map.next_key::<String>()? {
                    let emotion: Emotion = key.parse().map_err(|_| {
                        de::Error::custom(format_args!("unknown emotion key {key:?}"))
                    })?;
                    let slot = &mut scores[emotion.index()];
                    if slot.is_some() {
                        return Err(de::Error::custom(format_args!(
                            "duplicate emotion key {key:?}"
                        )));
                    }
                    *slot = Some(map.next_value()?);
                }
                let mut out = [0.0; 5];
                for (emotion, (dst, src)) in Emotion::ALL.iter().zip(out.iter_mut().zip(scores)) {
                    *dst = src.ok_or_else(|| {
                        de::Error::custom(format_args!("missing emotion key \"{emotion}\""))
                    })?;
                }
                EmotionProfile::new(out).map_err(de::Error::custom)
            }
        }

        deserializer.deserialize_map(ProfileVisitor)
    }
}

/// Profile produced by a channel, with a flag for the case where the channel
/// found no evidence at all (and the profile is all zeros).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelScore {
    pub profile: EmotionProfile,
    pub degenerate: bool,
}

impl ChannelScore {
    pub fn degenerate() -> Self {
        ChannelScore {
            profile: EmotionProfile::ZERO,
            degenerate: true,
        }
    }
}

/// Fusion weights for the poster, music and description channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeights", into = "RawWeights")]
pub struct ChannelWeights {
    poster: f64,
    music: f64,
    description: f64,
}

#[derive(Serialize, Deserialize)]
struct RawWeights {
    poster: f64,
    music: f64,
    description: f64,
}

impl TryFrom<RawWeights> for ChannelWeights {
    type Error = EmotionError;

    fn try_from(raw: RawWeights) -> Result<Self, Self::Error> {
        ChannelWeights::new(raw.poster, raw.music, raw.description)
    }
}

impl From<ChannelWeights> for RawWeights {
    fn from(w: ChannelWeights) -> Self {
        RawWeights {
            poster: w.poster,
            music: w.music,
            description: w.description,
        }
    }
}

impl ChannelWeights {
    pub fn new(poster: f64, music: f64, description: f64) -> Result<Self, EmotionError> {
        let all = [poster, music, description];
        if all.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(EmotionError::InvalidWeights(
                "weights must be finite and non-negative",
            ));
        }
        if all.iter().all(|w| *w == 0.0) {
            return Err(EmotionError::InvalidWeights(
                "at least one weight must be positive",
            ));
        }
        Ok(ChannelWeights {
            poster,
            music,
            description,
        })
    }

    pub fn poster(&self) -> f64 {
        self.poster
    }

    pub fn music(&self) -> f64 {
        self.music
    }

    pub fn description(&self) -> f64 {
        self.description
    }
}

impl Default for ChannelWeights {
    fn default() -> Self {
        ChannelWeights {
            poster: 1.0,
            music: 2.0,
            description: 3.0,
        }
    }
}

/// Score cut for set membership. Comparison is always strict: an emotion is
/// in the set only when its score is greater than the threshold.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Threshold(f64);

impl Threshold {
    pub fn new(value: f64) -> Result<Self, EmotionError> {
        if value.is_finite() && (0.0..1.0).contains(&value) {
            Ok(Threshold(value))
        } else {
            Err(EmotionError::InvalidThreshold(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn admits(self, score: f64) -> bool {
        score > self.0
    }
}

impl Default for Threshold {
    fn default() -> Self {
        Threshold(0.1)
    }
}

impl TryFrom<f64> for Threshold {
    type Error = EmotionError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Threshold::new(value)
    }
}

impl From<Threshold> for f64 {
    fn from(t: Threshold) -> f64 {
        t.0
    }
}

/// A subset of the five emotions, stored as a bitmask in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct EmotionSet(u8);

impl EmotionSet {
    pub const EMPTY: EmotionSet = EmotionSet(0);
    pub const FULL: EmotionSet = EmotionSet(0b1_1111);

    /// Builds a set from its bitmask; bit `i` is `Emotion::ALL[i]`.
    pub fn from_bits(bits: u8) -> Option<Self> {
        (bits <= Self::FULL.0).then_some(EmotionSet(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn insert(&mut self, emotion: Emotion) {
        self.0 |= 1 << emotion.index();
    }

    pub fn contains(self, emotion: Emotion) -> bool {
        self.0 & (1 << emotion.index()) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn intersection(self, other: EmotionSet) -> EmotionSet {
        EmotionSet(self.0 & other.0)
    }

    pub fn union(self, other: EmotionSet) -> EmotionSet {
        EmotionSet(self.0 | other.0)
    }

    pub fn is_subset(self, other: EmotionSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Emotion> {
        Emotion::ALL.into_iter().filter(move |e| self.contains(*e))
    }
}

impl FromIterator<Emotion> for EmotionSet {
    fn from_iter<I: IntoIterator<Item = Emotion>>(iter: I) -> Self {
        let mut set = EmotionSet::EMPTY;
        for e in iter {
            set.insert(e);
        }
        set
    }
}

impl Serialize for EmotionSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.len()))?;
        for e in self.iter() {
            seq.serialize_element(e.as_str())?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for EmotionSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct SetVisitor;

        impl<'de> Visitor<'de> for SetVisitor {
            type Value = EmotionSet;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an array of emotion names")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
                let mut set = EmotionSet::EMPTY;
                while let Some(e) = seq.next_element::<Emotion>()? {
                    set.insert(e);
                }
                Ok(set)
            }
        }

        deserializer.deserialize_seq(SetVisitor)
    }
}

/// Weighted average of the present channel profiles.
///
/// Absent channels are left out of both the weighted sum and the weight
/// total, so a movie with only two channels fuses over those two.
pub fn fuse_channels(
    poster: Option<&EmotionProfile>,
    music: Option<&EmotionProfile>,
    description: Option<&EmotionProfile>,
    weights: &ChannelWeights,
) -> Result<EmotionProfile, EmotionError> {
    let present: Vec<(f64, &EmotionProfile)> = [
        (weights.poster, poster),
        (weights.music, music),
        (weights.description, description),
    ]
    .into_iter()
    .filter_map(|(w, p)| p.map(|p| (w, p)))
    .collect();

    if present.is_empty() {
        return Err(EmotionError::NoChannels);
    }
    let total: f64 = present.iter().map(|(w, _)| w).sum();
    if total <= 0.0 {
        return Err(EmotionError::ZeroTotalWeight);
    }

    let mut scores = [0.0; 5];
    for (i, slot) in scores.iter_mut().enumerate() {
        let weighted: f64 = present.iter().map(|(w, p)| w * p.scores[i]).sum();
        // Rounding can push a convex combination one ulp past its inputs.
        let lo = present
            .iter()
            .map(|(_, p)| p.scores[i])
            .fold(f64::INFINITY, f64::min);
        let hi = present
            .iter()
            .map(|(_, p)| p.scores[i])
            .fold(f64::NEG_INFINITY, f64::max);
        *slot = (weighted / total).clamp(lo, hi);
    }
    Ok(EmotionProfile { scores })
}

pub fn to_emotion_set(profile: &EmotionProfile, threshold: Threshold) -> EmotionSet {
    profile
        .iter()
        .filter(|(_, score)| threshold.admits(*score))
        .map(|(e, _)| e)
        .collect()
}

/// `|a ∩ b| / |a ∪ b|`. Two empty sets have no defined similarity.
pub fn jaccard(a: EmotionSet, b: EmotionSet) -> Result<f64, EmotionError> {
    let union = a.union(b).len();
    if union == 0 {
        return Err(EmotionError::DegeneratePair);
    }
    Ok(a.intersection(b).len() as f64 / union as f64)
}

/// Arithmetic mean of per-participant similarities.
///
/// Values are summed in ascending order so the result does not depend on
/// participant order, bit for bit.
pub fn mean_jaccard(values: &[f64]) -> Result<f64, EmotionError> {
    if values.is_empty() {
        return Err(EmotionError::NoParticipants);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let sum: f64 = sorted.iter().sum();
    let lo = sorted[0];
    let hi = sorted[sorted.len() - 1];
    Ok((sum / values.len() as f64).clamp(lo, hi))
}
