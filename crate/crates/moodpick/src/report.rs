//! Plain-text tables for the human (non `--json`) CLI output. Numbers are
//! shown to two decimals.

use std::fmt::Write;

use moodpick_core::catalog::Channel;
use moodpick_core::evaluate::{ChannelCorrelation, EvaluationReport};
use moodpick_core::recommend::FilterStatus;
use moodpick_core::{
    Catalog, Emotion, EmotionProfile, EmotionSet, MovieRecord, RecommendationResult,
};

fn profile_cells(p: &EmotionProfile) -> String {
    Emotion::ALL
        .iter()
        .map(|&e| format!("{:>9.2}", p.get(e)))
        .collect()
}

fn emotion_header() -> String {
    Emotion::ALL
        .iter()
        .map(|e| format!("{:>9}", e.as_str()))
        .collect()
}

fn set_label(set: EmotionSet) -> String {
    if set.is_empty() {
        return "{}".to_owned();
    }
    let names: Vec<&str> = set.iter().map(Emotion::as_str).collect();
    format!("{{{}}}", names.join(", "))
}

fn title_width<'a>(titles: impl Iterator<Item = &'a str>) -> usize {
    titles.map(|t| t.chars().count()).max().unwrap_or(0).max(5)
}

/// One row per movie with its cached fused profile.
pub fn fused_table(catalog: &Catalog) -> String {
    let tw = title_width(catalog.movies.iter().map(|m| m.title.as_str()));
    let iw = catalog
        .movies
        .iter()
        .map(|m| m.id.len())
        .max()
        .unwrap_or(2)
        .max(2);
    let mut out = String::new();
    let _ = writeln!(out, "{:<iw$}  {:<tw$}{}", "id", "title", emotion_header());
    for m in &catalog.movies {
        let cells = m
            .fused_profile
            .as_ref()
            .map(profile_cells)
            .unwrap_or_default();
        let _ = writeln!(out, "{:<iw$}  {:<tw$}{}", m.id, m.title, cells);
    }
    let _ = writeln!(out, "{} movies", catalog.len());
    out
}

/// Channel breakdown for a single movie.
pub fn profile_view(
    movie: &MovieRecord,
    fused: &EmotionProfile,
    threshold_set: EmotionSet,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} ({}) [{}]", movie.title, movie.year, movie.id);
    let _ = writeln!(out, "genres: {}", movie.genres.join(", "));
    let _ = writeln!(out, "{:<13}{}", "channel", emotion_header());
    for ch in Channel::ALL {
        match movie.channel_profiles.get(ch) {
            Some(entry) => {
                let mut note = format!("  {:?}", entry.provenance).to_lowercase();
                if entry.degenerate {
                    note.push_str(", degenerate");
                }
                let _ = writeln!(
                    out,
                    "{:<13}{}{}",
                    ch.as_str(),
                    profile_cells(&entry.profile),
                    note
                );
            }
            None => {
                let _ = writeln!(out, "{:<13}{:>9}", ch.as_str(), "-");
            }
        }
    }
    let _ = writeln!(out, "{:<13}{}", "fused", profile_cells(fused));
    let _ = writeln!(out, "emotion set: {}", set_label(threshold_set));
    out
}

/// Ranked candidates with one Jaccard column per participant.
pub fn recommendation_table(result: &RecommendationResult) -> String {
    let tw = title_width(result.ranking.iter().map(|c| c.title.as_str()));
    let iw = result
        .ranking
        .iter()
        .map(|c| c.movie_id.len())
        .max()
        .unwrap_or(2)
        .max(2);
    let cols: Vec<usize> = result
        .participants
        .iter()
        .map(|p| p.id.len().max(6))
        .collect();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "session {}  weights p={} m={} d={}  threshold {}",
        result.session_id,
        result.weights.poster(),
        result.weights.music(),
        result.weights.description(),
        result.threshold.value()
    );
    for p in &result.participants {
        let flag = if p.degenerate { "  (degenerate)" } else { "" };
        let _ = writeln!(
            out,
            "  {} -> {} {}{}",
            p.id,
            p.favorite_movie_id,
            set_label(p.emotion_set),
            flag
        );
    }
    let _ = write!(out, "{:>4}  {:<iw$}  {:<tw$}", "rank", "id", "title");
    for (p, w) in result.participants.iter().zip(&cols) {
        let _ = write!(out, "  {:>w$}", p.id);
    }
    let _ = writeln!(out, "  {:>6}", "score");
    for c in &result.ranking {
        let _ = write!(out, "{:>4}  {:<iw$}  {:<tw$}", c.rank, c.movie_id, c.title);
        for (pair, w) in c.per_participant.iter().zip(&cols) {
            let _ = write!(out, "  {:>w$.2}", pair.jaccard);
        }
        let marker = if result.top_set.contains(&c.movie_id) {
            " *"
        } else {
            ""
        };
        let _ = writeln!(out, "  {:>6.2}{}", c.score, marker);
    }
    let status = match result.genre_filter.status {
        FilterStatus::Disabled => "disabled",
        FilterStatus::Applied => "applied",
        FilterStatus::NoChange => "no change",
        FilterStatus::Inert => "inert (no genre overlap, top set kept)",
    };
    let _ = writeln!(out, "top set: {}", result.top_set.join(", "));
    let _ = write!(out, "genre filter: {status}");
    if !result.genre_filter.removed.is_empty() {
        let _ = write!(out, ", removed {}", result.genre_filter.removed.join(", "));
    }
    let _ = writeln!(out);
    let best = result
        .candidate(&result.best)
        .map(|c| format!("{} ({})", c.title, c.movie_id))
        .unwrap_or_else(|| result.best.clone());
    let _ = writeln!(out, "best: {best}");
    for w in &result.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

/// Movies across, one row of similarities underneath, then the mean and
/// per-channel correlations.
pub fn evaluation_table(report: &EvaluationReport, correlations: &[ChannelCorrelation]) -> String {
    let widths: Vec<usize> = report
        .rows
        .iter()
        .map(|r| r.title.chars().count().max(6))
        .collect();
    let mut out = String::new();
    let _ = write!(out, "{:<8}", "Movie");
    for (r, w) in report.rows.iter().zip(&widths) {
        let _ = write!(out, "  {:>w$}", r.title);
    }
    let _ = writeln!(out);
    let _ = write!(out, "{:<8}", "Jaccard");
    for (r, w) in report.rows.iter().zip(&widths) {
        let mark = if r.degenerate { "!" } else { "" };
        let _ = write!(out, "  {:>w$}", format!("{:.2}{mark}", r.jaccard));
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "mean Jaccard {:.2} over {} movies",
        report.mean,
        report.rows.len()
    );
    for c in correlations {
        match &c.r {
            Ok(r) => {
                let _ = writeln!(
                    out,
                    "pearson {:<12} {:>6.2}  ({} pairs)",
                    c.channel.as_str(),
                    r,
                    c.pairs
                );
            }
            Err(e) => {
                let _ = writeln!(
                    out,
                    "pearson {:<12} {:>6}  ({} pairs; {e})",
                    c.channel.as_str(),
                    "n/a",
                    c.pairs
                );
            }
        }
    }
    if report.has_degenerate() {
        let _ = writeln!(out, "! degenerate pair, scored 0");
    }
    out
}
