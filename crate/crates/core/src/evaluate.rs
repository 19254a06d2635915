//! Comparison of predicted profiles against survey ratings.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{Catalog, Channel};
use crate::emotion::{jaccard, to_emotion_set, Emotion, EmotionProfile, EmotionSet, Threshold};

/// Survey rows are rounded proportions, so sums drift from one.
pub const SURVEY_SUM_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("survey for {movie_id:?} sums to {sum}, expected 1 ± {SURVEY_SUM_TOLERANCE}")]
    SurveySum { movie_id: String, sum: f64 },
    #[error("survey movie {0:?} is not in the catalog")]
    MissingMovie(String),
    #[error("movie {0:?} has no fused profile")]
    NoFusedProfile(String),
    #[error("movie {movie_id:?} has no {channel} profile")]
    MissingChannel { movie_id: String, channel: Channel },
    #[error("duplicate survey for movie {0:?}")]
    DuplicateSurvey(String),
    #[error("no surveys")]
    NoSurveys,
    #[error("series lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least two points, got {0}")]
    TooShort(usize),
    #[error("zero variance")]
    ZeroVariance,
}

/// Share of survey selections per emotion for one movie.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSurvey")]
pub struct SurveyRecord {
    pub movie_id: String,
    pub profile: EmotionProfile,
}

#[derive(Deserialize)]
struct RawSurvey {
    movie_id: String,
    profile: EmotionProfile,
}

impl TryFrom<RawSurvey> for SurveyRecord {
    type Error = EvalError;

    fn try_from(raw: RawSurvey) -> Result<Self, Self::Error> {
        SurveyRecord::new(raw.movie_id, raw.profile)
    }
}

impl SurveyRecord {
    pub fn new(movie_id: impl Into<String>, profile: EmotionProfile) -> Result<Self, EvalError> {
        let movie_id = movie_id.into();
        let sum = profile.sum();
        if libm::fabs(sum - 1.0) > SURVEY_SUM_TOLERANCE + 1e-12 {
            return Err(EvalError::SurveySum { movie_id, sum });
        }
        Ok(SurveyRecord { movie_id, profile })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRow {
    pub movie_id: String,
    pub title: String,
    pub predicted_set: EmotionSet,
    pub human_set: EmotionSet,
    pub jaccard: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub threshold: Threshold,
    pub rows: Vec<EvaluationRow>,
    pub mean: f64,
}

impl EvaluationReport {
    pub fn has_degenerate(&self) -> bool {
        self.rows.iter().any(|r| r.degenerate)
    }
}

fn check_unique(surveys: &[SurveyRecord]) -> Result<(), EvalError> {
    if surveys.is_empty() {
        return Err(EvalError::NoSurveys);
    }
    let mut seen = BTreeSet::new();
    for s in surveys {
        if !seen.insert(s.movie_id.as_str()) {
            return Err(EvalError::DuplicateSurvey(s.movie_id.clone()));
        }
    }
    Ok(())
}

/// Jaccard similarity, per surveyed movie, between the thresholded fused
/// prediction and the thresholded survey profile. Rows follow survey order.
pub fn evaluate_predictions(
    catalog: &Catalog,
    surveys: &[SurveyRecord],
    threshold: Threshold,
) -> Result<EvaluationReport, EvalError> {
    check_unique(surveys)?;
    let mut rows = Vec::with_capacity(surveys.len());
    for survey in surveys {
        let movie = catalog
            .get(&survey.movie_id)
            .ok_or_else(|| EvalError::MissingMovie(survey.movie_id.clone()))?;
        let fused = movie
            .fused_profile
            .ok_or_else(|| EvalError::NoFusedProfile(movie.id.clone()))?;
        let predicted_set = to_emotion_set(&fused, threshold);
        let human_set = to_emotion_set(&survey.profile, threshold);
        let (value, degenerate) = match jaccard(predicted_set, human_set) {
            Ok(j) => (j, false),
            Err(_) => (0.0, true),
        };
        rows.push(EvaluationRow {
            movie_id: movie.id.clone(),
            title: movie.title.clone(),
            predicted_set,
            human_set,
            jaccard: value,
            degenerate,
        });
    }
    let mean = rows.iter().map(|r| r.jaccard).sum::<f64>() / rows.len() as f64;
    Ok(EvaluationReport {
        threshold,
        rows,
        mean,
    })
}

/// Sample Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, EvalError> {
    if xs.len() != ys.len() {
        return Err(EvalError::LengthMismatch(xs.len(), ys.len()));
    }
    let n = xs.len();
    if n < 2 {
        return Err(EvalError::TooShort(n));
    }
    let mean_x = xs.iter().sum::<f64>() / n as f64;
    let mean_y = ys.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(EvalError::ZeroVariance);
    }
    Ok((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Pearson r of one channel against the survey ratings.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelCorrelation {
    pub channel: Channel,
    /// Number of (movie, emotion) pairs in each series.
    pub pairs: usize,
    pub r: Result<f64, EvalError>,
}

/// The paired series for one channel: (movie id ascending, canonical emotion
/// order), channel score first, survey score second.
pub fn channel_series(
    catalog: &Catalog,
    surveys: &[SurveyRecord],
    channel: Channel,
) -> Result<(Vec<f64>, Vec<f64>), EvalError> {
    check_unique(surveys)?;
    let mut ordered: Vec<&SurveyRecord> = surveys.iter().collect();
    ordered.sort_by(|a, b| a.movie_id.cmp(&b.movie_id));
    let mut xs = Vec::with_capacity(ordered.len() * 5);
    let mut ys = Vec::with_capacity(ordered.len() * 5);
    for survey in ordered {
        let movie = catalog
            .get(&survey.movie_id)
            .ok_or_else(|| EvalError::MissingMovie(survey.movie_id.clone()))?;
        let entry =
            movie
                .channel_profiles
                .get(channel)
                .ok_or_else(|| EvalError::MissingChannel {
                    movie_id: movie.id.clone(),
                    channel,
                })?;
        for e in Emotion::ALL {
            xs.push(entry.profile.get(e));
            ys.push(survey.profile.get(e));
        }
    }
    Ok((xs, ys))
}

pub fn channel_correlations(
    catalog: &Catalog,
    surveys: &[SurveyRecord],
) -> Vec<ChannelCorrelation> {
    Channel::ALL
        .into_iter()
        .map(|channel| match channel_series(catalog, surveys, channel) {
            Ok((xs, ys)) => ChannelCorrelation {
                channel,
                pairs: xs.len(),
                r: pearson(&xs, &ys),
            },
            Err(e) => ChannelCorrelation {
                channel,
                pairs: 0,
                r: Err(e),
            },
        })
        .collect()
}
