//! JSON over HTTP.

use std::io;
use std::net::SocketAddr;
use std::path::{Path as FsPath, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

use crate::api::{ApiError, ApiResult, ChainRequest, ErrorCode, Gateway, NewAnnotation, ScoreRequest, SelectorQuery};
use crate::engine::{Engine, EngineConfig, LoadError};
use crate::store::Workspace;

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub listen: SocketAddr,
    pub root: PathBuf,
    pub modules: Option<PathBuf>,
    pub resources: Option<PathBuf>,
    pub timeout: Duration,
    /// Static console assets served under `/ui/`.
    pub ui: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("{}: {what} does not exist", path.display())]
    MissingPath { path: PathBuf, what: &'static str },
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("cannot listen on {addr}: {source}")]
    Bind { addr: SocketAddr, source: io::Error },
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

type Shared = Arc<Gateway>;

async fn blocking<T, F>(gw: Shared, f: F) -> ApiResult<T>
where
    T: Send + 'static,
    F: FnOnce(&Gateway) -> ApiResult<T> + Send + 'static,
{
    tokio::task::spawn_blocking(move || f(&gw))
        .await
        .unwrap_or_else(|e| Err(ApiError::new(ErrorCode::IoFailure, format!("worker failed: {e}"))))
}

fn ok_json<T: Serialize>(r: ApiResult<T>) -> Response {
    match r {
        Ok(v) => Json(v).into_response(),
        Err(e) => e.into_response(),
    }
}

fn created<T: Serialize>(r: ApiResult<T>) -> Response {
    match r {
        Ok(v) => (StatusCode::CREATED, Json(v)).into_response(),
        Err(e) => e.into_response(),
    }
}

fn bytes(r: ApiResult<Vec<u8>>, content_type: &'static str) -> Response {
    match r {
        Ok(v) => ([(header::CONTENT_TYPE, content_type)], v).into_response(),
        Err(e) => e.into_response(),
    }
}

fn query<T>(q: Result<Query<T>, QueryRejection>) -> ApiResult<T> {
    q.map(|Query(v)| v).map_err(|e| ApiError::bad_request(e.body_text()))
}

fn body<T>(b: Result<Json<T>, JsonRejection>) -> ApiResult<T> {
    b.map(|Json(v)| v).map_err(|e| ApiError::bad_request(e.body_text()))
}

#[derive(Deserialize)]
struct NewCollection {
    name: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UploadQuery {
    id: String,
    #[serde(default)]
    format: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TextQuery {
    start: Option<usize>,
    end: Option<usize>,
}

async fn list_collections(State(gw): State<Shared>) -> Response {
    ok_json(blocking(gw, |g| g.list_collections()).await)
}

async fn create_collection(State(gw): State<Shared>, b: Result<Json<NewCollection>, JsonRejection>) -> Response {
    let req = match body(b) {
        Ok(r) => r,
        Err(e) => return e.into_response(),
    };
    created(blocking(gw, move |g| g.create_collection(&req.name)).await)
}

async fn list_documents(State(gw): State<Shared>, Path(c): Path<String>) -> Response {
    ok_json(blocking(gw, move |g| g.list_documents(&c)).await)
}

async fn add_document(
    State(gw): State<Shared>,
    Path(c): Path<String>,
    q: Result<Query<UploadQuery>, QueryRejection>,
    data: Bytes,
) -> Response {
    let q = match query(q) {
        Ok(q) => q,
        Err(e) => return e.into_response(),
    };
    let sgml = match q.format.as_deref() {
        None | Some("raw") => false,
        Some("sgml") => true,
        Some(other) => return ApiError::bad_request(format!("unknown format {other:?}")).into_response(),
    };
    created(blocking(gw, move |g| g.add_document(&c, &q.id, data.to_vec(), sgml)).await)
}

async fn text(
    State(gw): State<Shared>,
    Path((c, d)): Path<(String, String)>,
    q: Result<Query<TextQuery>, QueryRejection>,
) -> Response {
    let q = match query(q) {
        Ok(q) => q,
        Err(e) => return e.into_response(),
    };
    bytes(
        blocking(gw, move |g| g.text(&c, &d, q.start, q.end)).await,
        "application/octet-stream",
    )
}

async fn get_annotations(
    State(gw): State<Shared>,
    Path((c, d)): Path<(String, String)>,
    q: Result<Query<SelectorQuery>, QueryRejection>,
) -> Response {
    let q = match query(q) {
        Ok(q) => q,
        Err(e) => return e.into_response(),
    };
    ok_json(blocking(gw, move |g| g.annotations(&c, &d, &q)).await)
}

async fn add_annotation(
    State(gw): State<Shared>,
    Path((c, d)): Path<(String, String)>,
    b: Result<Json<NewAnnotation>, JsonRejection>,
) -> Response {
    let new = match body(b) {
        Ok(n) => n,
        Err(e) => return e.into_response(),
    };
    created(blocking(gw, move |g| g.add_annotation(&c, &d, new)).await)
}

async fn delete_annotations(
    State(gw): State<Shared>,
    Path((c, d)): Path<(String, String)>,
    q: Result<Query<SelectorQuery>, QueryRejection>,
) -> Response {
    let q = match query(q) {
        Ok(q) => q,
        Err(e) => return e.into_response(),
    };
    ok_json(blocking(gw, move |g| g.delete_annotations(&c, &d, &q)).await)
}

async fn modules(State(gw): State<Shared>) -> Response {
    Json(gw.modules()).into_response()
}

async fn states(State(gw): State<Shared>, Path((c, d)): Path<(String, String)>) -> Response {
    ok_json(blocking(gw, move |g| g.states(&c, &d)).await)
}

async fn run(State(gw): State<Shared>, Path((c, d, m)): Path<(String, String, String)>) -> Response {
    ok_json(blocking(gw, move |g| g.run(&c, &d, &m)).await)
}

async fn run_chain(
    State(gw): State<Shared>,
    Path((c, d)): Path<(String, String)>,
    b: Result<Json<ChainRequest>, JsonRejection>,
) -> Response {
    let req = match body(b) {
        Ok(r) => r,
        Err(e) => return e.into_response(),
    };
    ok_json(blocking(gw, move |g| g.run_chain(&c, &d, &req)).await)
}

async fn run_collection(State(gw): State<Shared>, Path((c, m)): Path<(String, String)>) -> Response {
    ok_json(blocking(gw, move |g| g.run_collection(&c, &m)).await)
}

async fn export_sgml(
    State(gw): State<Shared>,
    Path((c, d)): Path<(String, String)>,
    q: Result<Query<SelectorQuery>, QueryRejection>,
) -> Response {
    let q = match query(q) {
        Ok(q) => q,
        Err(e) => return e.into_response(),
    };
    bytes(blocking(gw, move |g| g.export_sgml(&c, &d, &q)).await, "application/sgml")
}

async fn score(
    State(gw): State<Shared>,
    Path((c, d)): Path<(String, String)>,
    b: Result<Json<ScoreRequest>, JsonRejection>,
) -> Response {
    let req = match body(b) {
        Ok(r) => r,
        Err(e) => return e.into_response(),
    };
    ok_json(blocking(gw, move |g| g.score(&c, &d, &req)).await)
}

async fn not_found() -> Response {
    ApiError::new(ErrorCode::NotFound, "no such endpoint").into_response()
}

pub fn router(gateway: Arc<Gateway>, ui: Option<&FsPath>) -> Router {
    let doc = "/collections/{c}/documents/{d}";
    let mut app = Router::new()
        .route("/collections", get(list_collections).post(create_collection))
        .route("/collections/{c}/documents", get(list_documents).post(add_document))
        .route("/collections/{c}/run/{m}", post(run_collection))
        .route(&format!("{doc}/text"), get(text))
        .route(
            &format!("{doc}/annotations"),
            get(get_annotations).post(add_annotation).delete(delete_annotations),
        )
        .route(&format!("{doc}/states"), get(states))
        .route(&format!("{doc}/run/{{m}}"), post(run))
        .route(&format!("{doc}/run-chain"), post(run_chain))
        .route(&format!("{doc}/export/sgml"), get(export_sgml))
        .route(&format!("{doc}/score"), post(score))
        .route("/modules", get(modules));
    if let Some(dir) = ui {
        app = app.nest_service("/ui", ServeDir::new(dir).append_index_html_on_directories(true));
    }
    app.fallback(not_found).with_state(gateway)
}

fn require_dir(path: &FsPath, what: &'static str) -> Result<(), ServeError> {
    if path.is_dir() {
        Ok(())
    } else {
        Err(ServeError::MissingPath {
            path: path.into(),
            what,
        })
    }
}

/// Builds the gateway described by `config`, checking every configured
/// path first.
pub fn gateway(config: &ServerConfig) -> Result<Gateway, ServeError> {
    require_dir(&config.root, "collection root")?;
    if let Some(p) = &config.modules {
        require_dir(p, "module descriptor directory")?;
    }
    if let Some(p) = &config.resources {
        require_dir(p, "resource directory")?;
    }
    if let Some(p) = &config.ui {
        require_dir(p, "console asset directory")?;
    }
    let engine = Engine::load(&EngineConfig {
        descriptor_dir: config.modules.clone(),
        resource_dir: config.resources.clone(),
        timeout: Some(config.timeout),
    })?;
    Ok(Gateway::new(Workspace::new(&config.root), engine))
}

pub struct Server {
    listener: tokio::net::TcpListener,
    app: Router,
}

impl Server {
    pub async fn bind(config: &ServerConfig) -> Result<Server, ServeError> {
        let gw = Arc::new(gateway(config)?);
        let listener = tokio::net::TcpListener::bind(config.listen)
            .await
            .map_err(|source| ServeError::Bind {
                addr: config.listen,
                source,
            })?;
        Ok(Server {
            listener,
            app: router(gw, config.ui.as_deref()),
        })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    pub async fn run(self) -> io::Result<()> {
        axum::serve(self.listener, self.app).await
    }
}

/// Runs the service until the process is stopped.
pub fn serve(config: &ServerConfig) -> Result<(), ServeError> {
    let rt = tokio::runtime::Runtime::new().map_err(|source| ServeError::Bind {
        addr: config.listen,
        source,
    })?;
    rt.block_on(async {
        let server = Server::bind(config).await?;
        if let Ok(addr) = server.local_addr() {
            eprintln!("listening on http://{addr}/");
        }
        server.run().await.map_err(|source| ServeError::Bind {
            addr: config.listen,
            source,
        })
    })
}
