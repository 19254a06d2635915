//! Manifest ingestion and the JSON files the CLI and service share: catalog,
//! session and survey.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use moodpick_core::audio::{prevalence_scores, stub_label_clip, AudioLabel, DEFAULT_PARTITIONS};
use moodpick_core::catalog::{CatalogError, SCHEMA_VERSION};
use moodpick_core::color::score_poster;
use moodpick_core::evaluate::SurveyRecord;
use moodpick_core::text::score_text;
use moodpick_core::{
    Catalog, ChannelEntry, ChannelProfiles, ChannelWeights, EmotionProfile, GroupSession,
    MovieRecord, Provenance, Threshold,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::assets::Resources;
use crate::media::{load_poster, load_wav};
use crate::{Error, Result};

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|source| Error::Json {
        path: path.to_owned(),
        source,
    })
}

/// Pretty JSON with a trailing newline; the one rendering every output uses.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_owned(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

/// Channel profiles given verbatim in a manifest, bypassing raw inputs.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalProfiles {
    pub description: Option<Value>,
    pub music: Option<Value>,
    pub poster: Option<Value>,
}

/// One movie in an ingest manifest. Paths are relative to the manifest.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub id: String,
    pub title: String,
    #[serde(default)]
    pub year: i32,
    pub genres: Vec<String>,
    #[serde(default)]
    pub description: String,
    pub poster: Option<PathBuf>,
    pub audio_labels: Option<Vec<i64>>,
    pub audio_labels_file: Option<PathBuf>,
    pub audio_wav: Option<PathBuf>,
    #[serde(default)]
    pub use_stub_classifier: bool,
    #[serde(default)]
    pub profiles: ExternalProfiles,
}

fn external(id: &str, field: &str, value: &Option<Value>) -> Result<Option<ChannelEntry>> {
    value
        .as_ref()
        .map(|v| {
            EmotionProfile::deserialize(v)
                .map(ChannelEntry::external)
                .map_err(|e| Error::rejected(id, field, e))
        })
        .transpose()
}

fn parse_labels(id: &str, field: &str, codes: &[i64]) -> Result<Vec<AudioLabel>> {
    codes
        .iter()
        .map(|&c| AudioLabel::new(c).map_err(|e| Error::rejected(id, field, e)))
        .collect()
}

fn absolute(path: &Path) -> PathBuf {
    fs::canonicalize(path).unwrap_or_else(|_| path.to_owned())
}

/// Builds a record from a manifest entry: external profiles win, otherwise
/// each channel is computed from whatever raw input the entry carries.
pub fn ingest_movie(
    entry: &ManifestEntry,
    base_dir: &Path,
    res: &Resources,
    weights: &ChannelWeights,
) -> Result<MovieRecord> {
    let id = entry.id.as_str();
    if id.is_empty() {
        return Err(Error::rejected(id, "id", "must not be empty"));
    }
    if entry.genres.is_empty() {
        return Err(Error::rejected(
            id,
            "genres",
            "at least one genre is required",
        ));
    }

    let labels = match (&entry.audio_labels, &entry.audio_labels_file) {
        (Some(_), Some(_)) => {
            return Err(Error::rejected(
                id,
                "audio_labels_file",
                "give audio_labels or audio_labels_file, not both",
            ))
        }
        (Some(codes), None) => Some(parse_labels(id, "audio_labels", codes)?),
        (None, Some(file)) => {
            let codes: Vec<i64> = read_json(&base_dir.join(file))
                .map_err(|e| Error::rejected(id, "audio_labels_file", e))?;
            Some(parse_labels(id, "audio_labels_file", &codes)?)
        }
        (None, None) => None,
    };
    let labels = match (&entry.audio_wav, labels) {
        (Some(_), Some(_)) => {
            return Err(Error::rejected(id, "audio_wav", "labels are already given"))
        }
        (Some(_), None) if !entry.use_stub_classifier => {
            return Err(Error::rejected(
                id,
                "audio_wav",
                "raw audio needs use_stub_classifier (or supply audio_labels)",
            ))
        }
        (Some(wav), None) => {
            let clip =
                load_wav(&base_dir.join(wav)).map_err(|e| Error::rejected(id, "audio_wav", e))?;
            Some(
                stub_label_clip(&clip, DEFAULT_PARTITIONS)
                    .map_err(|e| Error::rejected(id, "audio_wav", e))?,
            )
        }
        (None, labels) => labels,
    };

    let poster_path = entry.poster.as_ref().map(|p| absolute(&base_dir.join(p)));
    if let Some(p) = &poster_path {
        if !p.is_file() {
            return Err(Error::rejected(
                id,
                "poster",
                format!("{} not found", p.display()),
            ));
        }
    }

    let mut channels = ChannelProfiles {
        description: external(id, "profiles.description", &entry.profiles.description)?,
        music: external(id, "profiles.music", &entry.profiles.music)?,
        poster: external(id, "profiles.poster", &entry.profiles.poster)?,
    };
    if channels.description.is_none() {
        channels.description = Some(ChannelEntry::computed(score_text(
            &entry.description,
            &res.lexicon,
        )));
    }
    if channels.music.is_none() {
        if let Some(labels) = &labels {
            let score =
                prevalence_scores(labels).map_err(|e| Error::rejected(id, "audio_labels", e))?;
            channels.music = Some(ChannelEntry::computed(score));
        }
    }
    if channels.poster.is_none() {
        if let Some(path) = &poster_path {
            channels.poster = Some(ChannelEntry::computed(
                poster_channel(path, res).map_err(|e| Error::rejected(id, "poster", e))?,
            ));
        }
    }
    let fused = channels
        .fuse(weights)
        .map_err(|e| Error::rejected(id, "profiles", e))?;

    Ok(MovieRecord {
        id: entry.id.clone(),
        title: entry.title.clone(),
        year: entry.year,
        genres: entry.genres.clone(),
        description: entry.description.clone(),
        poster_path: poster_path.map(|p| p.to_string_lossy().into_owned()),
        audio_labels: labels,
        channel_profiles: channels,
        fused_profile: Some(fused),
    })
}

fn poster_channel(path: &Path, res: &Resources) -> Result<moodpick_core::ChannelScore> {
    let img = load_poster(path)?;
    Ok(score_poster(
        &img,
        &res.palette,
        &res.kb,
        res.dominance_tau,
    )?)
}

/// Parses a manifest into `(entry index, raw id, parsed entry)` triples,
/// naming the movie in any parse error.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let values: Vec<Value> = read_json(path)?;
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let id = v
                .get("id")
                .and_then(Value::as_str)
                .map(str::to_owned)
                .unwrap_or_else(|| format!("#{i}"));
            ManifestEntry::deserialize(&v).map_err(|e| Error::rejected(id, "entry", e))
        })
        .collect()
}

/// Ingests every manifest entry into `catalog`. Rejected entries are
/// collected, not fatal, so one run reports all of them.
pub fn ingest_into(
    catalog: &mut Catalog,
    entries: &[ManifestEntry],
    base_dir: &Path,
    res: &Resources,
) -> Vec<Error> {
    let mut rejected = Vec::new();
    for entry in entries {
        if catalog.get(&entry.id).is_some() {
            rejected.push(Error::rejected(&entry.id, "id", "duplicate movie id"));
            continue;
        }
        match ingest_movie(entry, base_dir, res, &catalog.weights) {
            Ok(record) => {
                if let Err(e) = catalog.insert(record) {
                    rejected.push(Error::rejected(&entry.id, "record", e));
                }
            }
            Err(e) => rejected.push(e),
        }
    }
    rejected
}

/// Fresh catalog from a manifest file.
pub fn ingest_manifest(
    manifest: &Path,
    res: &Resources,
    weights: ChannelWeights,
    threshold: Threshold,
) -> std::result::Result<Catalog, Vec<Error>> {
    let entries = read_manifest(manifest).map_err(|e| vec![e])?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let mut catalog = Catalog::empty(weights, threshold);
    let rejected = ingest_into(&mut catalog, &entries, base, res);
    if rejected.is_empty() {
        Ok(catalog)
    } else {
        Err(rejected)
    }
}

/// Recomputes every `computed` channel of a record from its stored raw
/// inputs. External channels are copied through.
pub fn recompute_channels(record: &MovieRecord, res: &Resources) -> Result<ChannelProfiles> {
    let id = record.id.as_str();
    let mut out = record.channel_profiles;
    if matches!(out.description, Some(c) if c.provenance == Provenance::Computed) {
        out.description = Some(ChannelEntry::computed(score_text(
            &record.description,
            &res.lexicon,
        )));
    }
    if matches!(out.music, Some(c) if c.provenance == Provenance::Computed) {
        let labels = record.audio_labels.as_deref().ok_or_else(|| {
            Error::rejected(id, "audio_labels", "computed music channel without labels")
        })?;
        let score =
            prevalence_scores(labels).map_err(|e| Error::rejected(id, "audio_labels", e))?;
        out.music = Some(ChannelEntry::computed(score));
    }
    if matches!(out.poster, Some(c) if c.provenance == Provenance::Computed) {
        let path = record.poster_path.as_deref().ok_or_else(|| {
            Error::rejected(id, "poster_path", "computed poster channel without poster")
        })?;
        out.poster = Some(ChannelEntry::computed(
            poster_channel(Path::new(path), res)
                .map_err(|e| Error::rejected(id, "poster_path", e))?,
        ));
    }
    Ok(out)
}

/// Loads and validates a catalog file: schema version, per-movie schema
/// (errors name the movie), invariants, and referenced poster files.
pub fn load_catalog(path: &Path) -> Result<Catalog> {
    let json_err = |source| Error::Json {
        path: path.to_owned(),
        source,
    };
    let root: Value = serde_json::from_str(&read_text(path)?).map_err(json_err)?;
    let found = root
        .get("schema_version")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::rejected("-", "schema_version", "missing or not an integer"))?;
    if found != u64::from(SCHEMA_VERSION) {
        return Err(CatalogError::SchemaVersion {
            found: u32::try_from(found).unwrap_or(u32::MAX),
            expected: SCHEMA_VERSION,
        }
        .into());
    }
    let weights = ChannelWeights::deserialize(root.get("weights").unwrap_or(&Value::Null))
        .map_err(|e| Error::rejected("-", "weights", e))?;
    let threshold = Threshold::deserialize(root.get("threshold").unwrap_or(&Value::Null))
        .map_err(|e| Error::rejected("-", "threshold", e))?;
    let movies = root
        .get("movies")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::rejected("-", "movies", "missing or not an array"))?;
    let mut records = Vec::with_capacity(movies.len());
    for (i, v) in movies.iter().enumerate() {
        let id = v
            .get("id")
            .and_then(Value::as_str)
            .map(str::to_owned)
            .unwrap_or_else(|| format!("#{i}"));
        let record = MovieRecord::deserialize(v).map_err(|e| Error::rejected(&id, "record", e))?;
        if let Some(p) = &record.poster_path {
            if !Path::new(p).is_file() {
                return Err(Error::rejected(
                    &id,
                    "poster_path",
                    format!("{p} not found"),
                ));
            }
        }
        records.push(record);
    }
    Ok(Catalog::new(weights, threshold, records)?)
}

pub fn save_catalog(catalog: &Catalog, path: &Path) -> Result<()> {
    write_atomic(path, &to_json(catalog))
}

pub fn load_session(path: &Path) -> Result<GroupSession> {
    read_json(path)
}

pub fn load_surveys(path: &Path) -> Result<Vec<SurveyRecord>> {
    read_json(path)
}
