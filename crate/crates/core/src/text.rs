//! Lexicon-based emotion scoring of a movie description.
//!
//! Each lexicon token votes for one emotion. The profile is the share of
//! matched tokens that voted for each emotion, so any profile with a match
//! sums to one.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::emotion::{ChannelScore, Emotion, EmotionProfile};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexiconError {
    #[error("line {line}: expected `token<TAB>Emotion`")]
    Malformed { line: usize },
    #[error("line {line}: unknown emotion {name:?}")]
    UnknownEmotion { line: usize, name: String },
    #[error("token {token:?} maps to both {first} and {second}")]
    Conflict {
        token: String,
        first: Emotion,
        second: Emotion,
    },
    #[error("token {0:?} is both a lexicon entry and a stopword")]
    StopwordInLexicon(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EmotionLexicon {
    entries: BTreeMap<String, Emotion>,
    stopwords: BTreeSet<String>,
}

impl EmotionLexicon {
    pub fn new(
        entries: BTreeMap<String, Emotion>,
        stopwords: BTreeSet<String>,
    ) -> Result<Self, LexiconError> {
        let entries: BTreeMap<String, Emotion> = entries
            .into_iter()
            .map(|(k, v)| (k.to_lowercase(), v))
            .collect();
        let stopwords: BTreeSet<String> = stopwords.into_iter().map(|s| s.to_lowercase()).collect();
        if let Some(word) = stopwords.iter().find(|w| entries.contains_key(*w)) {
            return Err(LexiconError::StopwordInLexicon(word.clone()));
        }
        Ok(EmotionLexicon { entries, stopwords })
    }

    /// Parses the tab-separated lexicon format and a newline-separated
    /// stopword list. `#` starts a comment line in both; blank lines are
    /// skipped.
    pub fn parse(lexicon: &str, stopwords: &str) -> Result<Self, LexiconError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in lexicon.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (token, name) = line
                .split_once('\t')
                .map(|(t, n)| (t.trim(), n.trim()))
                .filter(|(t, n)| !t.is_empty() && !n.is_empty())
                .ok_or(LexiconError::Malformed { line: i + 1 })?;
            let emotion: Emotion = name.parse().map_err(|_| LexiconError::UnknownEmotion {
                line: i + 1,
                name: name.to_string(),
            })?;
            let token = token.to_lowercase();
            match entries.get(&token) {
                Some(&first) if first != emotion => {
                    return Err(LexiconError::Conflict {
                        token,
                        first,
                        second: emotion,
                    })
                }
                _ => {
                    entries.insert(token, emotion);
                }
            }
        }
        let stops = stopwords
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(ToString::to_string)
            .collect();
        Self::new(entries, stops)
    }

    pub fn lookup(&self, token: &str) -> Option<Emotion> {
        self.entries.get(token).copied()
    }

    pub fn stopwords(&self) -> &BTreeSet<String> {
        &self.stopwords
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, Emotion)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Number of entries voting for each emotion, in canonical order.
    pub fn coverage(&self) -> [usize; 5] {
        let mut counts = [0; 5];
        for e in self.entries.values() {
            counts[e.index()] += 1;
        }
        counts
    }
}

/// Lowercases, splits on every run of non-alphanumeric characters and drops
/// stopwords. Token order follows the text.
pub fn tokenize(text: &str, stopwords: &BTreeSet<String>) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .filter(|t| !stopwords.contains(t))
        .collect()
}

pub fn score_text(text: &str, lexicon: &EmotionLexicon) -> ChannelScore {
    let mut counts = [0usize; 5];
    for token in tokenize(text, &lexicon.stopwords) {
        if let Some(e) = lexicon.lookup(&token) {
            counts[e.index()] += 1;
        }
    }
    let matched: usize = counts.iter().sum();
    if matched == 0 {
        return ChannelScore::degenerate();
    }
    let mut scores = [0.0; 5];
    for (s, c) in scores.iter_mut().zip(counts) {
        *s = c as f64 / matched as f64;
    }
    ChannelScore {
        profile: EmotionProfile::new(scores).expect("shares lie in [0, 1]"),
        degenerate: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec;

    fn stops(words: &[&str]) -> BTreeSet<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn tokenizes_case_and_punctuation() {
        assert_eq!(
            tokenize("Love, and DEATH!", &stops(&["and"])),
            vec!["love", "death"]
        );
        assert!(tokenize("", &stops(&[])).is_empty());
        assert_eq!(
            tokenize("year-old 100", &stops(&[])),
            vec!["year", "old", "100"]
        );
    }

    #[test]
    fn scores_by_share_of_matches() {
        let lex = EmotionLexicon::parse("love\tHappy\ndeath\tSad\n", "and\n").unwrap();
        let score = score_text("love and death and death", &lex);
        assert!(!score.degenerate);
        assert!((score.profile.get(Emotion::Happy) - 1.0 / 3.0).abs() < 1e-15);
        assert!((score.profile.get(Emotion::Sad) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(score.profile.get(Emotion::Fear), 0.0);
    }

    #[test]
    fn no_hits_is_degenerate() {
        let lex = EmotionLexicon::parse("love\tHappy\n", "").unwrap();
        let score = score_text("nothing relevant here", &lex);
        assert!(score.degenerate);
        assert!(score.profile.is_zero());
    }

    #[test]
    fn parse_rejects_bad_lines() {
        assert_eq!(
            EmotionLexicon::parse("just-a-token\n", ""),
            Err(LexiconError::Malformed { line: 1 })
        );
        assert!(matches!(
            EmotionLexicon::parse("# c\nrage\tFury\n", ""),
            Err(LexiconError::UnknownEmotion { line: 2, .. })
        ));
        assert!(matches!(
            EmotionLexicon::parse("rage\tAngry\nrage\tSad\n", ""),
            Err(LexiconError::Conflict { .. })
        ));
        assert!(matches!(
            EmotionLexicon::parse("the\tHappy\n", "the\n"),
            Err(LexiconError::StopwordInLexicon(_))
        ));
        // Repeating an identical entry is harmless.
        assert_eq!(
            EmotionLexicon::parse("joy\tHappy\nJoy\tHappy\n", "")
                .unwrap()
                .len(),
            1
        );
    }
}
