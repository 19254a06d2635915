//! `moodpick` subcommands. `run` is the whole binary minus process exit so
//! tests can drive it in-process.

use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use axum::http::HeaderValue;
use clap::{Args, Parser, Subcommand};
use moodpick_core::evaluate::{channel_correlations, evaluate_predictions, ChannelCorrelation};
use moodpick_core::{recommend, to_emotion_set, Catalog, ChannelWeights, Threshold};
use serde_json::{json, Value};

use crate::assets::Resources;
use crate::files::{
    ingest_into, ingest_manifest, load_catalog, load_session, load_surveys, read_manifest,
    save_catalog, to_json,
};
use crate::report;
use crate::service::{serve, ServeConfig};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DEGENERATE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "moodpick",
    version,
    about = "Group movie picks from multi-channel emotion profiles"
)]
struct Cli {
    /// Catalog file to read (and, for `ingest`, write).
    #[arg(
        long,
        global = true,
        env = "MOODPICK_CATALOG",
        default_value = "catalog.json"
    )]
    catalog: PathBuf,
    #[command(flatten)]
    resources: ResourceArgs,
    #[command(subcommand)]
    command: Command,
}

/// Replacement scorer resources; built-in defaults otherwise.
#[derive(Debug, Args)]
struct ResourceArgs {
    /// Emotion lexicon (TSV: token, emotion).
    #[arg(long, global = true)]
    lexicon: Option<PathBuf>,
    #[arg(long, global = true)]
    stopwords: Option<PathBuf>,
    /// Fuzzy color palette (JSON array of terms).
    #[arg(long, global = true)]
    palette: Option<PathBuf>,
    /// Color-emotion knowledge base (JSON object: emotion -> color terms).
    #[arg(long, global = true)]
    color_kb: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the catalog from a manifest and print fused profiles.
    Ingest {
        manifest: PathBuf,
        /// Fusion weights as poster,music,description.
        #[arg(long, value_parser = parse_weights)]
        weights: Option<ChannelWeights>,
        #[arg(long, value_parser = parse_threshold)]
        threshold: Option<Threshold>,
        /// Add to the existing catalog instead of replacing it.
        #[arg(long)]
        append: bool,
        #[arg(long)]
        json: bool,
    },
    /// Show one movie's channel and fused profiles.
    Profile {
        movie_id: String,
        #[arg(long, value_parser = parse_weights)]
        weights: Option<ChannelWeights>,
        #[arg(long, value_parser = parse_threshold)]
        threshold: Option<Threshold>,
        #[arg(long)]
        json: bool,
    },
    /// Rank a session's candidate pool.
    Recommend {
        session: PathBuf,
        #[arg(long, value_parser = parse_threshold)]
        threshold: Option<Threshold>,
        #[arg(long)]
        no_genre_filter: bool,
        #[arg(long)]
        json: bool,
    },
    /// Compare predicted profiles with survey profiles.
    Evaluate {
        survey: PathBuf,
        #[arg(long, value_parser = parse_threshold)]
        threshold: Option<Threshold>,
        #[arg(long)]
        json: bool,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, env = "MOODPICK_BIND", default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
        /// Allowed browser origin for the companion UI (repeatable).
        #[arg(
            long = "cors-origin",
            env = "MOODPICK_CORS_ORIGIN",
            default_value = "http://localhost:5173"
        )]
        cors_origin: Vec<String>,
        /// Session snapshot file, restored on start and written on shutdown.
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
}

fn parse_weights(s: &str) -> Result<ChannelWeights, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [p, m, d] = parts[..] else {
        return Err("expected three comma-separated weights: poster,music,description".into());
    };
    let num = |x: &str| x.parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    ChannelWeights::new(num(p)?, num(m)?, num(d)?).map_err(|e| e.to_string())
}

fn parse_threshold(s: &str) -> Result<Threshold, String> {
    let v: f64 = s.parse().map_err(|e| format!("{s:?}: {e}"))?;
    Threshold::new(v).map_err(|e| e.to_string())
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

/// Parses `args` (including the program name) and runs the subcommand,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let mut io = Io { out, err };
    match dispatch(cli, &mut io) {
        Ok(code) => code,
        Err(errors) => {
            for e in errors {
                let _ = writeln!(io.err, "error: {e}");
            }
            EXIT_INVALID
        }
    }
}

type CmdResult = Result<i32, Vec<Error>>;

fn one(e: impl Into<Error>) -> Vec<Error> {
    vec![e.into()]
}

fn dispatch(cli: Cli, io: &mut Io) -> CmdResult {
    let r = &cli.resources;
    let load_resources = || {
        Resources::load(
            r.lexicon.as_deref(),
            r.stopwords.as_deref(),
            r.palette.as_deref(),
            r.color_kb.as_deref(),
        )
        .map_err(one)
    };
    match cli.command {
        Command::Ingest {
            manifest,
            weights,
            threshold,
            append,
            json,
        } => {
            let res = load_resources()?;
            cmd_ingest(
                &manifest,
                &cli.catalog,
                &res,
                weights,
                threshold,
                append,
                json,
                io,
            )
        }
        Command::Profile {
            movie_id,
            weights,
            threshold,
            json,
        } => cmd_profile(&cli.catalog, &movie_id, weights, threshold, json, io),
        Command::Recommend {
            session,
            threshold,
            no_genre_filter,
            json,
        } => cmd_recommend(&cli.catalog, &session, threshold, no_genre_filter, json, io),
        Command::Evaluate {
            survey,
            threshold,
            json,
        } => cmd_evaluate(&cli.catalog, &survey, threshold, json, io),
        Command::Serve {
            bind,
            cors_origin,
            snapshot,
        } => cmd_serve(cli.catalog, bind, &cors_origin, snapshot, io),
    }
}

fn emit(io: &mut Io, text: &str) {
    let _ = io.out.write_all(text.as_bytes());
}

fn warn_all(io: &mut Io, warnings: &[String]) -> i32 {
    for w in warnings {
        let _ = writeln!(io.err, "warning: {w}");
    }
    if warnings.is_empty() {
        EXIT_OK
    } else {
        EXIT_DEGENERATE
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_ingest(
    manifest: &Path,
    catalog_path: &Path,
    res: &Resources,
    weights: Option<ChannelWeights>,
    threshold: Option<Threshold>,
    append: bool,
    json: bool,
    io: &mut Io,
) -> CmdResult {
    let catalog = if append && catalog_path.exists() {
        let mut catalog = load_catalog(catalog_path).map_err(one)?;
        if weights.is_some_and(|w| w != catalog.weights) {
            return Err(one(Error::rejected(
                "-",
                "weights",
                "--append must keep the catalog's fusion weights",
            )));
        }
        if let Some(t) = threshold {
            catalog.threshold = t;
        }
        let entries = read_manifest(manifest).map_err(one)?;
        let base = manifest.parent().unwrap_or(Path::new("."));
        let rejected = ingest_into(&mut catalog, &entries, base, res);
        if !rejected.is_empty() {
            return Err(rejected);
        }
        catalog
    } else {
        ingest_manifest(
            manifest,
            res,
            weights.unwrap_or_default(),
            threshold.unwrap_or_default(),
        )?
    };
    save_catalog(&catalog, catalog_path).map_err(one)?;
    if json {
        emit(io, &to_json(&catalog));
    } else {
        emit(io, &report::fused_table(&catalog));
    }
    let warnings: Vec<String> = catalog
        .movies
        .iter()
        .flat_map(|m| {
            moodpick_core::catalog::Channel::ALL
                .into_iter()
                .filter_map(move |ch| {
                    m.channel_profiles
                        .get(ch)
                        .filter(|e| e.degenerate)
                        .map(|_| {
                            format!(
                                "movie {:?}: {} channel found no emotion cues",
                                m.id,
                                ch.as_str()
                            )
                        })
                })
        })
        .collect();
    Ok(warn_all(io, &warnings))
}

fn cmd_profile(
    catalog_path: &Path,
    movie_id: &str,
    weights: Option<ChannelWeights>,
    threshold: Option<Threshold>,
    json: bool,
    io: &mut Io,
) -> CmdResult {
    let catalog = load_catalog(catalog_path).map_err(one)?;
    let movie = catalog
        .get(movie_id)
        .ok_or_else(|| one(Error::UnknownMovie(movie_id.to_owned())))?;
    let weights = weights.unwrap_or(catalog.weights);
    let threshold = threshold.unwrap_or(catalog.threshold);
    let fused = movie
        .profile_under(&weights)
        .map_err(|e| one(Error::rejected(movie_id, "channel_profiles", e)))?;
    let set = to_emotion_set(&fused, threshold);
    if json {
        emit(
            io,
            &to_json(&json!({
                "movie": movie,
                "weights": weights,
                "threshold": threshold,
                "fused": fused,
                "emotion_set": set,
            })),
        );
    } else {
        emit(io, &report::profile_view(movie, &fused, set));
    }
    let warnings = if set.is_empty() {
        vec![format!(
            "movie {movie_id:?} has an empty emotion set at threshold {}",
            threshold.value()
        )]
    } else {
        Vec::new()
    };
    Ok(warn_all(io, &warnings))
}

fn cmd_recommend(
    catalog_path: &Path,
    session_path: &Path,
    threshold: Option<Threshold>,
    no_genre_filter: bool,
    json: bool,
    io: &mut Io,
) -> CmdResult {
    let catalog = load_catalog(catalog_path).map_err(one)?;
    let mut session = load_session(session_path).map_err(one)?;
    if let Some(t) = threshold {
        session.threshold = t;
    }
    if no_genre_filter {
        session.genre_filter = false;
    }
    let result = recommend(&session, &catalog).map_err(one)?;
    if json {
        emit(io, &to_json(&result));
    } else {
        emit(io, &report::recommendation_table(&result));
    }
    Ok(warn_all(io, &result.warnings))
}

fn correlation_json(c: &ChannelCorrelation) -> Value {
    match &c.r {
        Ok(r) => json!({ "channel": c.channel, "pairs": c.pairs, "r": r }),
        Err(e) => {
            json!({ "channel": c.channel, "pairs": c.pairs, "r": null, "error": e.to_string() })
        }
    }
}

fn cmd_evaluate(
    catalog_path: &Path,
    survey_path: &Path,
    threshold: Option<Threshold>,
    json: bool,
    io: &mut Io,
) -> CmdResult {
    let catalog: Catalog = load_catalog(catalog_path).map_err(one)?;
    let surveys = load_surveys(survey_path).map_err(one)?;
    let threshold = threshold.unwrap_or(catalog.threshold);
    let report = evaluate_predictions(&catalog, &surveys, threshold).map_err(one)?;
    let correlations = channel_correlations(&catalog, &surveys);
    if json {
        let corr: Vec<Value> = correlations.iter().map(correlation_json).collect();
        emit(
            io,
            &to_json(&json!({ "report": report, "correlations": corr })),
        );
    } else {
        emit(io, &report::evaluation_table(&report, &correlations));
    }
    let warnings: Vec<String> = report
        .rows
        .iter()
        .filter(|r| r.degenerate)
        .map(|r| format!("movie {:?}: both emotion sets empty, scored 0", r.movie_id))
        .collect();
    Ok(warn_all(io, &warnings))
}

fn cmd_serve(
    catalog: PathBuf,
    bind: SocketAddr,
    origins: &[String],
    snapshot: Option<PathBuf>,
    io: &mut Io,
) -> CmdResult {
    let cors_origins = origins
        .iter()
        .map(|o| HeaderValue::from_str(o).map_err(|e| one(Error::rejected("-", "cors-origin", e))))
        .collect::<Result<Vec<_>, _>>()?;
    let runtime = tokio::runtime::Runtime::new().map_err(|source| {
        one(Error::Io {
            path: "<runtime>".into(),
            source,
        })
    })?;
    runtime
        .block_on(serve(ServeConfig {
            bind,
            catalog_path: catalog,
            cors_origins,
            snapshot,
        }))
        .map_err(one)?;
    let _ = writeln!(io.err, "shut down");
    Ok(EXIT_OK)
}
