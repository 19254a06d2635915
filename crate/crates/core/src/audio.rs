//! Soundtrack emotion scoring from per-partition class labels.
//!
//! An excerpt is cut into (by default) ten equal partitions and each
//! partition gets one label from an eight-class speech/music emotion model.
//! Only the five canonical classes are kept; the profile is the share of
//! kept labels per emotion.

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::emotion::{ChannelScore, Emotion, EmotionProfile};

pub const DEFAULT_PARTITIONS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AudioError {
    #[error("invalid label code {0} (expected 0..=7)")]
    InvalidCode(i64),
    #[error("no labels")]
    NoLabels,
    #[error("clip too short: {frames} frames for {partitions} partitions")]
    ClipTooShort { frames: usize, partitions: usize },
    #[error("partition count must be at least 1")]
    ZeroPartitions,
    #[error("clip must have a positive sample rate and at least one frame")]
    EmptyClip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AudioClass {
    Neutral,
    Calm,
    Happy,
    Sad,
    Angry,
    Fearful,
    Disgust,
    Surprised,
}

/// Class code emitted by the audio classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u8")]
pub struct AudioLabel(u8);

impl AudioLabel {
    pub const NEUTRAL: AudioLabel = AudioLabel(0);
    pub const CALM: AudioLabel = AudioLabel(1);
    pub const HAPPY: AudioLabel = AudioLabel(2);
    pub const SAD: AudioLabel = AudioLabel(3);
    pub const ANGRY: AudioLabel = AudioLabel(4);
    pub const FEARFUL: AudioLabel = AudioLabel(5);
    pub const DISGUST: AudioLabel = AudioLabel(6);
    pub const SURPRISED: AudioLabel = AudioLabel(7);

    pub fn new(code: i64) -> Result<Self, AudioError> {
        u8::try_from(code)
            .ok()
            .filter(|c| *c <= 7)
            .map(AudioLabel)
            .ok_or(AudioError::InvalidCode(code))
    }

    pub fn code(self) -> u8 {
        self.0
    }

    pub fn class(self) -> AudioClass {
        match self.0 {
            0 => AudioClass::Neutral,
            1 => AudioClass::Calm,
            2 => AudioClass::Happy,
            3 => AudioClass::Sad,
            4 => AudioClass::Angry,
            5 => AudioClass::Fearful,
            6 => AudioClass::Disgust,
            _ => AudioClass::Surprised,
        }
    }

    /// The canonical emotion for kept codes; `None` for neutral, calm and
    /// disgust.
    pub fn emotion(self) -> Option<Emotion> {
        match self.class() {
            AudioClass::Happy => Some(Emotion::Happy),
            AudioClass::Sad => Some(Emotion::Sad),
            AudioClass::Angry => Some(Emotion::Angry),
            AudioClass::Fearful => Some(Emotion::Fear),
            AudioClass::Surprised => Some(Emotion::Surprise),
            AudioClass::Neutral | AudioClass::Calm | AudioClass::Disgust => None,
        }
    }
}

impl TryFrom<i64> for AudioLabel {
    type Error = AudioError;

    fn try_from(code: i64) -> Result<Self, Self::Error> {
        AudioLabel::new(code)
    }
}

impl From<AudioLabel> for u8 {
    fn from(l: AudioLabel) -> u8 {
        l.0
    }
}

impl fmt::Display for AudioLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Mono PCM excerpt with samples in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    sample_rate: u32,
    samples: Vec<f32>,
}

impl AudioClip {
    pub fn new(sample_rate: u32, samples: Vec<f32>) -> Result<Self, AudioError> {
        if sample_rate == 0 || samples.is_empty() {
            return Err(AudioError::EmptyClip);
        }
        Ok(AudioClip {
            sample_rate,
            samples,
        })
    }

    /// Averages interleaved multi-channel frames down to mono.
    pub fn from_interleaved(
        sample_rate: u32,
        channels: u16,
        interleaved: &[f32],
    ) -> Result<Self, AudioError> {
        let channels = usize::from(channels.max(1));
        let mono = interleaved
            .chunks_exact(channels)
            .map(|frame| frame.iter().sum::<f32>() / channels as f32)
            .collect();
        Self::new(sample_rate, mono)
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn samples(&self) -> &[f32] {
        &self.samples
    }

    pub fn frames(&self) -> usize {
        self.samples.len()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate)
    }
}

/// Splits a clip into `n` contiguous segments whose lengths differ by at most
/// one frame; the first `frames % n` segments carry the extra frame.
pub fn partition_clip(clip: &AudioClip, n: usize) -> Result<Vec<AudioClip>, AudioError> {
    if n == 0 {
        return Err(AudioError::ZeroPartitions);
    }
    let frames = clip.frames();
    if frames < n {
        return Err(AudioError::ClipTooShort {
            frames,
            partitions: n,
        });
    }
    let base = frames / n;
    let extra = frames % n;
    let mut out = Vec::with_capacity(n);
    let mut start = 0;
    for i in 0..n {
        let len = base + usize::from(i < extra);
        out.push(AudioClip {
            sample_rate: clip.sample_rate,
            samples: clip.samples[start..start + len].to_vec(),
        });
        start += len;
    }
    Ok(out)
}

/// Share of kept labels per emotion. Neutral, calm and disgust are dropped
/// before counting.
pub fn prevalence_scores(labels: &[AudioLabel]) -> Result<ChannelScore, AudioError> {
    if labels.is_empty() {
        return Err(AudioError::NoLabels);
    }
    let mut counts = [0usize; 5];
    for e in labels.iter().filter_map(|l| l.emotion()) {
        counts[e.index()] += 1;
    }
    let kept: usize = counts.iter().sum();
    if kept == 0 {
        return Ok(ChannelScore::degenerate());
    }
    let mut scores = [0.0; 5];
    for (s, c) in scores.iter_mut().zip(counts) {
        *s = c as f64 / kept as f64;
    }
    Ok(ChannelScore {
        profile: EmotionProfile::new(scores).expect("shares lie in [0, 1]"),
        degenerate: false,
    })
}

/// RMS level below which a segment is treated as quiet.
pub const STUB_QUIET_RMS: f64 = 0.05;
/// RMS level at or above which a segment is treated as loud.
pub const STUB_LOUD_RMS: f64 = 0.2;
/// Zero-crossing rate (crossings per adjacent sample pair) separating tonal
/// from noisy material.
pub const STUB_NOISY_ZCR: f64 = 0.1;

pub fn rms(samples: &[f32]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let energy: f64 = samples.iter().map(|&s| f64::from(s) * f64::from(s)).sum();
    libm::sqrt(energy / samples.len() as f64)
}

pub fn zero_crossing_rate(samples: &[f32]) -> f64 {
    if samples.len() < 2 {
        return 0.0;
    }
    let crossings = samples
        .windows(2)
        .filter(|w| (w[0] < 0.0) != (w[1] < 0.0))
        .count();
    crossings as f64 / (samples.len() - 1) as f64
}

/// Low-fidelity stand-in for a trained classifier, for demos only.
///
/// | RMS                 | ZCR < 0.1 | ZCR >= 0.1 |
/// |---------------------|-----------|------------|
/// | < 0.05              | Sad       | Sad        |
/// | 0.05 ..< 0.2        | Happy     | Fearful    |
/// | >= 0.2              | Surprised | Angry      |
pub fn stub_classify(segment: &AudioClip) -> AudioLabel {
    let level = rms(segment.samples());
    let noisy = zero_crossing_rate(segment.samples()) >= STUB_NOISY_ZCR;
    if level < STUB_QUIET_RMS {
        AudioLabel::SAD
    } else if level < STUB_LOUD_RMS {
        if noisy {
            AudioLabel::FEARFUL
        } else {
            AudioLabel::HAPPY
        }
    } else if noisy {
        AudioLabel::ANGRY
    } else {
        AudioLabel::SURPRISED
    }
}

/// Partitions the clip and labels every segment with [`stub_classify`].
pub fn stub_label_clip(clip: &AudioClip, n: usize) -> Result<Vec<AudioLabel>, AudioError> {
    Ok(partition_clip(clip, n)?.iter().map(stub_classify).collect())
}
