//! JSON HTTP API under `/v1/`: catalog browsing plus in-memory group
//! sessions whose recommendation is recomputed on every read.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post, put};
use axum::Router;
use moodpick_core::recommend::RecommendError;
use moodpick_core::{
    recommend, to_emotion_set, Catalog, ChannelWeights, GroupSession, ParticipantSpec, Threshold,
};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Map, Value};
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::files::{load_catalog, read_json, to_json, write_atomic};

/// Error body: `{"error": ..., "field": ...}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub error: String,
    pub field: Option<String>,
}

impl ApiError {
    fn new(status: StatusCode, error: impl ToString) -> Self {
        ApiError {
            status,
            error: error.to_string(),
            field: None,
        }
    }

    fn not_found(what: &str, id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, format!("unknown {what} {id:?}"))
    }

    fn invalid(field: &str, error: impl ToString) -> Self {
        ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            error: error.to_string(),
            field: Some(field.to_owned()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.error });
        if let Some(f) = self.field {
            body["field"] = Value::String(f);
        }
        json_response(self.status, to_json(&body))
    }
}

fn json_response(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn ok_json<T: Serialize>(status: StatusCode, value: &T) -> Response {
    json_response(status, to_json(value))
}

type ApiResult = Result<Response, ApiError>;

/// Sessions plus the catalog snapshot they are scored against.
#[derive(Debug)]
pub struct AppState {
    catalog: RwLock<Arc<Catalog>>,
    catalog_path: Option<PathBuf>,
    sessions: RwLock<BTreeMap<String, Arc<Mutex<GroupSession>>>>,
}

impl AppState {
    pub fn new(catalog: Catalog) -> Self {
        AppState {
            catalog: RwLock::new(Arc::new(catalog)),
            catalog_path: None,
            sessions: RwLock::new(BTreeMap::new()),
        }
    }

    /// Remembers where the catalog came from so `POST /v1/catalog/reload`
    /// can re-read it.
    pub fn with_catalog_path(mut self, path: PathBuf) -> Self {
        self.catalog_path = Some(path);
        self
    }

    pub fn catalog(&self) -> Arc<Catalog> {
        Arc::clone(&self.catalog.read().unwrap())
    }

    pub fn replace_catalog(&self, catalog: Catalog) {
        *self.catalog.write().unwrap() = Arc::new(catalog);
    }

    pub fn sessions(&self) -> Vec<GroupSession> {
        self.sessions
            .read()
            .unwrap()
            .values()
            .map(|s| s.lock().unwrap().clone())
            .collect()
    }

    pub fn restore_sessions(&self, sessions: Vec<GroupSession>) {
        let mut map = self.sessions.write().unwrap();
        for s in sessions {
            map.insert(s.id.clone(), Arc::new(Mutex::new(s)));
        }
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<GroupSession>>, ApiError> {
        self.sessions
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("session", id))
    }
}

pub fn router(state: Arc<AppState>, cors_origins: &[HeaderValue]) -> Router {
    let cors = CorsLayer::new()
        .allow_origin(AllowOrigin::list(cors_origins.iter().cloned()))
        .allow_methods([Method::GET, Method::POST, Method::PUT, Method::DELETE])
        .allow_headers([header::CONTENT_TYPE]);
    let v1 = Router::new()
        .route("/movies", get(list_movies))
        .route("/movies/{id}", get(get_movie))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/participants", post(add_participant))
        .route(
            "/sessions/{id}/participants/{pid}",
            delete(remove_participant),
        )
        .route("/sessions/{id}/params", put(put_params))
        .route("/sessions/{id}/recommendation", get(get_recommendation))
        .route("/catalog/reload", post(reload_catalog));
    Router::new()
        .nest("/v1", v1)
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "no such endpoint") })
        .layer(cors)
        .with_state(state)
}

fn body_object(body: &Bytes) -> Result<Map<String, Value>, ApiError> {
    if body.is_empty() {
        return Ok(Map::new());
    }
    match serde_json::from_slice::<Value>(body) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(ApiError::invalid("body", "expected a JSON object")),
        Err(e) => Err(ApiError::invalid("body", e)),
    }
}

/// Takes `name` out of the body, failing with that field named.
fn take<T: DeserializeOwned>(
    map: &mut Map<String, Value>,
    name: &str,
) -> Result<Option<T>, ApiError> {
    match map.remove(name) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => serde_json::from_value(v)
            .map(Some)
            .map_err(|e| ApiError::invalid(name, e)),
    }
}

fn reject_unknown(map: &Map<String, Value>) -> Result<(), ApiError> {
    match map.keys().next() {
        Some(k) => Err(ApiError::invalid(k, "unknown field")),
        None => Ok(()),
    }
}

async fn list_movies(State(state): State<Arc<AppState>>) -> Response {
    let catalog = state.catalog();
    let movies: Vec<Value> = catalog
        .movies
        .iter()
        .map(|m| json!({ "id": m.id, "title": m.title, "year": m.year, "genres": m.genres }))
        .collect();
    ok_json(StatusCode::OK, &movies)
}

async fn get_movie(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let catalog = state.catalog();
    let movie = catalog
        .get(&id)
        .ok_or_else(|| ApiError::not_found("movie", &id))?;
    let set = movie
        .fused_profile
        .map(|p| to_emotion_set(&p, catalog.threshold));
    Ok(ok_json(
        StatusCode::OK,
        &json!({ "movie": movie, "emotion_set": set, "threshold": catalog.threshold }),
    ))
}

fn check_favorite(catalog: &Catalog, p: &ParticipantSpec) -> Result<(), ApiError> {
    if p.id.is_empty() {
        return Err(ApiError::invalid("id", "must not be empty"));
    }
    if catalog.get(&p.favorite_movie_id).is_none() {
        return Err(ApiError::invalid(
            "favorite_movie_id",
            format!("unknown movie {:?}", p.favorite_movie_id),
        ));
    }
    Ok(())
}

async fn create_session(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult {
    let catalog = state.catalog();
    let mut map = body_object(&body)?;
    let id: Option<String> = take(&mut map, "id")?;
    let pool: Option<Vec<String>> = take(&mut map, "pool")?;
    let pool = pool.unwrap_or_else(|| catalog.movies.iter().map(|m| m.id.clone()).collect());
    if pool.is_empty() {
        return Err(ApiError::invalid("pool", "candidate pool is empty"));
    }
    if let Some(missing) = pool.iter().find(|m| catalog.get(m).is_none()) {
        return Err(ApiError::invalid(
            "pool",
            format!("unknown movie {missing:?}"),
        ));
    }
    let mut session = GroupSession::new(String::new(), pool);
    if let Some(w) = take::<ChannelWeights>(&mut map, "weights")? {
        session.weights = w;
    }
    if let Some(t) = take::<Threshold>(&mut map, "threshold")? {
        session.threshold = t;
    }
    if let Some(g) = take::<bool>(&mut map, "genre_filter")? {
        session.genre_filter = g;
    }
    let participants: Vec<ParticipantSpec> = take(&mut map, "participants")?.unwrap_or_default();
    reject_unknown(&map)?;
    for (i, p) in participants.iter().enumerate() {
        check_favorite(&catalog, p).map_err(|e| {
            ApiError::invalid(
                &format!("participants[{i}].{}", e.field.unwrap_or_default()),
                e.error,
            )
        })?;
        if participants[..i].iter().any(|q| q.id == p.id) {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                format!("duplicate participant {:?}", p.id),
            ));
        }
    }
    session.participants = participants;

    let mut sessions = state.sessions.write().unwrap();
    session.id = match id {
        Some(id) if id.is_empty() => return Err(ApiError::invalid("id", "must not be empty")),
        Some(id) if sessions.contains_key(&id) => {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                format!("session {id:?} exists"),
            ))
        }
        Some(id) => id,
        None => (1..)
            .map(|n| format!("s{n}"))
            .find(|k| !sessions.contains_key(k))
            .expect("unbounded"),
    };
    let response = ok_json(StatusCode::CREATED, &session);
    sessions.insert(session.id.clone(), Arc::new(Mutex::new(session)));
    Ok(response)
}

async fn get_session(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let session = state.session(&id)?.lock().unwrap().clone();
    Ok(ok_json(StatusCode::OK, &session))
}

async fn add_participant(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult {
    let handle = state.session(&id)?;
    let mut map = body_object(&body)?;
    let pid: String = take(&mut map, "id")?.ok_or_else(|| ApiError::invalid("id", "required"))?;
    let favorite: String = take(&mut map, "favorite_movie_id")?
        .ok_or_else(|| ApiError::invalid("favorite_movie_id", "required"))?;
    reject_unknown(&map)?;
    let spec = ParticipantSpec {
        id: pid,
        favorite_movie_id: favorite,
    };
    check_favorite(&state.catalog(), &spec)?;
    let mut session = handle.lock().unwrap();
    if session.participants.iter().any(|p| p.id == spec.id) {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            format!("duplicate participant {:?}", spec.id),
        ));
    }
    session.participants.push(spec);
    Ok(ok_json(StatusCode::CREATED, &*session))
}

async fn remove_participant(
    State(state): State<Arc<AppState>>,
    Path((id, pid)): Path<(String, String)>,
) -> ApiResult {
    let handle = state.session(&id)?;
    let mut session = handle.lock().unwrap();
    let before = session.participants.len();
    session.participants.retain(|p| p.id != pid);
    if session.participants.len() == before {
        return Err(ApiError::not_found("participant", &pid));
    }
    Ok(ok_json(StatusCode::OK, &*session))
}

async fn put_params(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult {
    let handle = state.session(&id)?;
    let mut map = body_object(&body)?;
    let weights: Option<ChannelWeights> = take(&mut map, "weights")?;
    let threshold: Option<Threshold> = take(&mut map, "threshold")?;
    let genre_filter: Option<bool> = take(&mut map, "genre_filter")?;
    reject_unknown(&map)?;
    let mut session = handle.lock().unwrap();
    if let Some(w) = weights {
        session.weights = w;
    }
    if let Some(t) = threshold {
        session.threshold = t;
    }
    if let Some(g) = genre_filter {
        session.genre_filter = g;
    }
    Ok(ok_json(StatusCode::OK, &*session))
}

async fn get_recommendation(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult {
    let session = state.session(&id)?.lock().unwrap().clone();
    let catalog = state.catalog();
    match recommend(&session, &catalog) {
        Ok(result) => Ok(json_response(StatusCode::OK, to_json(&result))),
        Err(e @ RecommendError::NoParticipants) => Err(ApiError::invalid("participants", e)),
        Err(e @ RecommendError::EmptyPool) | Err(e @ RecommendError::UnknownCandidate(_)) => {
            Err(ApiError::invalid("pool", e))
        }
        Err(e) => Err(ApiError::invalid("participants", e)),
    }
}

async fn reload_catalog(State(state): State<Arc<AppState>>) -> ApiResult {
    let path = state
        .catalog_path
        .clone()
        .ok_or_else(|| ApiError::new(StatusCode::CONFLICT, "service has no catalog path"))?;
    let catalog = tokio::task::spawn_blocking(move || load_catalog(&path))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e))?
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e))?;
    let count = catalog.len();
    state.replace_catalog(catalog);
    Ok(ok_json(StatusCode::OK, &json!({ "movies": count })))
}

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub bind: SocketAddr,
    pub catalog_path: PathBuf,
    pub cors_origins: Vec<HeaderValue>,
    /// Sessions are read from here at startup (if present) and written
    /// back on shutdown.
    pub snapshot: Option<PathBuf>,
}

/// Runs until Ctrl-C.
pub async fn serve(cfg: ServeConfig) -> crate::Result<()> {
    let catalog = load_catalog(&cfg.catalog_path)?;
    let state = Arc::new(AppState::new(catalog).with_catalog_path(cfg.catalog_path.clone()));
    if let Some(snap) = &cfg.snapshot {
        if snap.is_file() {
            state.restore_sessions(read_json(snap)?);
        }
    }
    let listener = tokio::net::TcpListener::bind(cfg.bind)
        .await
        .map_err(|source| crate::Error::Io {
            path: cfg.bind.to_string().into(),
            source,
        })?;
    eprintln!("listening on http://{}/v1/", cfg.bind);
    axum::serve(listener, router(Arc::clone(&state), &cfg.cors_origins))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|source| crate::Error::Io {
            path: cfg.bind.to_string().into(),
            source,
        })?;
    if let Some(snap) = &cfg.snapshot {
        write_atomic(snap, &to_json(&state.sessions()))?;
    }
    Ok(())
}
