use std::path::PathBuf;

use moodpick_core::catalog::CatalogError;
use moodpick_core::color::ColorError;
use moodpick_core::evaluate::EvalError;
use moodpick_core::recommend::RecommendError;
use moodpick_core::text::LexiconError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{}: {source}", path.display())]
    Image {
        path: PathBuf,
        source: image::ImageError,
    },
    #[error("{}: {source}", path.display())]
    Wav { path: PathBuf, source: hound::Error },
    #[error("{}: {detail}", path.display())]
    Media { path: PathBuf, detail: String },
    /// A manifest entry or catalog record was refused.
    #[error("movie {movie:?}, field {field}: {message}")]
    Rejected {
        movie: String,
        field: String,
        message: String,
    },
    #[error("lexicon: {0}")]
    Lexicon(#[from] LexiconError),
    #[error("palette/knowledge base: {0}")]
    Color(#[from] ColorError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Recommend(#[from] RecommendError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("unknown movie {0:?}")]
    UnknownMovie(String),
}

impl Error {
    pub(crate) fn rejected(
        movie: impl Into<String>,
        field: impl Into<String>,
        message: impl ToString,
    ) -> Self {
        Error::Rejected {
            movie: movie.into(),
            field: field.into(),
            message: message.to_string(),
        }
    }
}
