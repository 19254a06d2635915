//! Group consensus ranking.
//!
//! Every participant names one favorite movie. A candidate's consensus score
//! is the mean, over participants, of the Jaccard similarity between the
//! candidate's emotion set and the favorite's emotion set. The candidates
//! with the maximum score form the top set, which may then be narrowed to
//! genres the favorites share.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Reverse;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{Catalog, MovieRecord};
use crate::emotion::{
    jaccard, to_emotion_set, ChannelWeights, EmotionError, EmotionSet, Threshold,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecommendError {
    #[error("empty pool")]
    EmptyPool,
    #[error("no participants")]
    NoParticipants,
    #[error("duplicate participant id {0:?}")]
    DuplicateParticipant(String),
    #[error("duplicate pool movie {0:?}")]
    DuplicateCandidate(String),
    #[error("participant {participant:?} names unknown favorite movie {movie:?}")]
    UnknownFavorite { participant: String, movie: String },
    #[error("pool references unknown movie {0:?}")]
    UnknownCandidate(String),
    #[error("movie {id:?} has no usable profile: {source}")]
    Profile { id: String, source: EmotionError },
    #[error("all participants degenerate")]
    AllDegenerate,
}

fn default_genre_filter() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParticipantSpec {
    pub id: String,
    pub favorite_movie_id: String,
}

/// A group decision: who is choosing, what they are choosing from, and the
/// fusion and threshold parameters to score with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSession {
    pub id: String,
    pub participants: Vec<ParticipantSpec>,
    pub pool: Vec<String>,
    #[serde(default)]
    pub weights: ChannelWeights,
    #[serde(default)]
    pub threshold: Threshold,
    #[serde(default = "default_genre_filter")]
    pub genre_filter: bool,
}

impl GroupSession {
    pub fn new(id: impl Into<String>, pool: Vec<String>) -> Self {
        GroupSession {
            id: id.into(),
            participants: Vec::new(),
            pool,
            weights: ChannelWeights::default(),
            threshold: Threshold::default(),
            genre_filter: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantReport {
    pub id: String,
    pub favorite_movie_id: String,
    pub emotion_set: EmotionSet,
    /// The favorite's emotion set is empty at the session threshold.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairScore {
    pub participant_id: String,
    pub jaccard: f64,
    /// Both sets were empty; scored 0.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    pub rank: usize,
    pub movie_id: String,
    pub title: String,
    pub genres: Vec<String>,
    pub emotion_set: EmotionSet,
    pub per_participant: Vec<PairScore>,
    pub score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterStatus {
    /// Filtering was switched off for the session.
    Disabled,
    /// Some top-set movies were removed.
    Applied,
    /// Every top-set movie already shared a genre with the favorites.
    NoChange,
    /// No top-set movie shared a genre; the unfiltered set was kept.
    Inert,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenreFilterReport {
    pub status: FilterStatus,
    pub kept: Vec<String>,
    pub removed: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationResult {
    pub session_id: String,
    pub weights: ChannelWeights,
    pub threshold: Threshold,
    pub participants: Vec<ParticipantReport>,
    /// Every candidate, best first; ties ordered by ascending movie id.
    pub ranking: Vec<CandidateScore>,
    /// Candidates attaining the maximum score, ascending id.
    pub top_set: Vec<String>,
    pub genre_filter: GenreFilterReport,
    /// First surviving top-set movie by ascending id.
    pub best: String,
    pub warnings: Vec<String>,
}

impl RecommendationResult {
    pub fn candidate(&self, movie_id: &str) -> Option<&CandidateScore> {
        self.ranking.iter().find(|c| c.movie_id == movie_id)
    }

    pub fn has_degenerate(&self) -> bool {
        !self.warnings.is_empty()
    }
}

/// Outcome of narrowing a top set by genre.
#[derive(Debug, Clone, PartialEq)]
pub struct GenreFilterOutcome<'a> {
    pub kept: Vec<&'a MovieRecord>,
    pub status: FilterStatus,
}

/// Keeps top-set movies sharing at least one genre (case-insensitive) with
/// any favorite. If none do, the top set is returned unchanged.
pub fn filter_by_genre<'a>(
    top_set: &[&'a MovieRecord],
    favorites: &[&MovieRecord],
) -> GenreFilterOutcome<'a> {
    let wanted: BTreeSet<String> = favorites
        .iter()
        .flat_map(|f| f.genres.iter().map(|g| g.to_lowercase()))
        .collect();
    let kept: Vec<&MovieRecord> = top_set
        .iter()
        .copied()
        .filter(|m| m.shares_genre_with(&wanted))
        .collect();
    if kept.is_empty() {
        GenreFilterOutcome {
            kept: top_set.to_vec(),
            status: FilterStatus::Inert,
        }
    } else if kept.len() == top_set.len() {
        GenreFilterOutcome {
            kept,
            status: FilterStatus::NoChange,
        }
    } else {
        GenreFilterOutcome {
            kept,
            status: FilterStatus::Applied,
        }
    }
}

/// Every Jaccard value over five emotions is `k / u` with `u <= 5`, hence an
/// exact multiple of 1/60. Scores are accumulated in sixtieths so ties are
/// exact.
fn sixtieths(a: EmotionSet, b: EmotionSet) -> u64 {
    let union = a.union(b).len() as u64;
    (a.intersection(b).len() as u64 * 60)
        .checked_div(union)
        .unwrap_or(0)
}

fn movie_set(
    movie: &MovieRecord,
    weights: &ChannelWeights,
    threshold: Threshold,
) -> Result<EmotionSet, RecommendError> {
    let profile = movie
        .profile_under(weights)
        .map_err(|source| RecommendError::Profile {
            id: movie.id.clone(),
            source,
        })?;
    Ok(to_emotion_set(&profile, threshold))
}

pub fn recommend(
    session: &GroupSession,
    catalog: &Catalog,
) -> Result<RecommendationResult, RecommendError> {
    if session.pool.is_empty() {
        return Err(RecommendError::EmptyPool);
    }
    if session.participants.is_empty() {
        return Err(RecommendError::NoParticipants);
    }
    let weights = &session.weights;
    let threshold = session.threshold;

    let mut seen = BTreeSet::new();
    let mut favorites = Vec::with_capacity(session.participants.len());
    let mut participants = Vec::with_capacity(session.participants.len());
    let mut warnings = Vec::new();
    for p in &session.participants {
        if !seen.insert(p.id.as_str()) {
            return Err(RecommendError::DuplicateParticipant(p.id.clone()));
        }
        let favorite =
            catalog
                .get(&p.favorite_movie_id)
                .ok_or_else(|| RecommendError::UnknownFavorite {
                    participant: p.id.clone(),
                    movie: p.favorite_movie_id.clone(),
                })?;
        let set = movie_set(favorite, weights, threshold)?;
        if set.is_empty() {
            warnings.push(alloc::format!(
                "participant {:?}: favorite {:?} has an empty emotion set",
                p.id,
                favorite.id
            ));
        }
        favorites.push(favorite);
        participants.push(ParticipantReport {
            id: p.id.clone(),
            favorite_movie_id: favorite.id.clone(),
            emotion_set: set,
            degenerate: set.is_empty(),
        });
    }
    if participants.iter().all(|p| p.degenerate) {
        return Err(RecommendError::AllDegenerate);
    }

    let mut pool_seen = BTreeSet::new();
    let m = participants.len() as u64;
    let mut scored: Vec<(u64, CandidateScore)> = Vec::with_capacity(session.pool.len());
    for id in &session.pool {
        if !pool_seen.insert(id.as_str()) {
            return Err(RecommendError::DuplicateCandidate(id.clone()));
        }
        let movie = catalog
            .get(id)
            .ok_or_else(|| RecommendError::UnknownCandidate(id.clone()))?;
        let set = movie_set(movie, weights, threshold)?;
        let mut total = 0u64;
        let mut per_participant = Vec::with_capacity(participants.len());
        for p in &participants {
            let (value, degenerate) = match jaccard(set, p.emotion_set) {
                Ok(j) => (j, false),
                Err(_) => (0.0, true),
            };
            if degenerate && !p.degenerate {
                warnings.push(alloc::format!(
                    "movie {:?} vs participant {:?}: both emotion sets empty",
                    movie.id,
                    p.id
                ));
            }
            total += sixtieths(set, p.emotion_set);
            per_participant.push(PairScore {
                participant_id: p.id.clone(),
                jaccard: value,
                degenerate,
            });
        }
        scored.push((
            total,
            CandidateScore {
                rank: 0,
                movie_id: movie.id.clone(),
                title: movie.title.clone(),
                genres: movie.genres.clone(),
                emotion_set: set,
                per_participant,
                score: total as f64 / (60 * m) as f64,
            },
        ));
    }

    scored.sort_by(|(ta, a), (tb, b)| {
        (Reverse(*ta), a.movie_id.as_str()).cmp(&(Reverse(*tb), b.movie_id.as_str()))
    });
    let best_total = scored[0].0;
    let mut top_set: Vec<String> = scored
        .iter()
        .take_while(|(t, _)| *t == best_total)
        .map(|(_, c)| c.movie_id.clone())
        .collect();
    top_set.sort();

    let genre_filter = if session.genre_filter {
        let top_movies: Vec<&MovieRecord> =
            top_set.iter().filter_map(|id| catalog.get(id)).collect();
        let outcome = filter_by_genre(&top_movies, &favorites);
        let kept: Vec<String> = outcome.kept.iter().map(|m| m.id.clone()).collect();
        let removed = top_set
            .iter()
            .filter(|id| !kept.contains(id))
            .cloned()
            .collect();
        GenreFilterReport {
            status: outcome.status,
            kept,
            removed,
        }
    } else {
        GenreFilterReport {
            status: FilterStatus::Disabled,
            kept: top_set.clone(),
            removed: Vec::new(),
        }
    };
    let best = genre_filter
        .kept
        .iter()
        .min()
        .cloned()
        .expect("top set is never empty");

    let ranking = scored
        .into_iter()
        .enumerate()
        .map(|(i, (_, mut c))| {
            c.rank = i + 1;
            c
        })
        .collect();

    Ok(RecommendationResult {
        session_id: session.id.clone(),
        weights: *weights,
        threshold,
        participants,
        ranking,
        top_set,
        genre_filter,
        best,
        warnings,
    })
}
