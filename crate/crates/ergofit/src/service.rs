//! `/v1` HTTP API: sessions holding an avatar, collection queries, rankings
//! and deformation previews. Bodies are JSON; geometry uses the shape file
//! schema.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use ergofit_core::analytics::{evaluate, rank, PipelineConfig, RankEntry};
use ergofit_core::avatar::{
    Attribute, Avatar, AvatarDoc, BodyMeasurements, Camera, EditMode, PoseName,
};
use ergofit_core::shape::{Shape, ShapeDoc};
use serde::{Deserialize, Serialize};
use tokio::sync::{Mutex, RwLock};

use crate::report::{avatar_hash, DeformReport};
use crate::AppError;

pub struct AppState {
    shapes: Vec<Shape>,
    index: HashMap<String, usize>,
    cfg: PipelineConfig,
    sessions: RwLock<BTreeMap<String, Arc<Mutex<Session>>>>,
    next_session: AtomicU64,
}

struct Session {
    id: String,
    avatar: Avatar,
    avatar_hash: String,
    edit_counter: u64,
    /// Energies keyed by (shape id, avatar hash).
    costs: BTreeMap<(String, String), f64>,
}

impl Session {
    fn new(id: String, avatar: Avatar) -> Self {
        Session {
            id,
            avatar_hash: avatar_hash(&avatar),
            avatar,
            edit_counter: 0,
            costs: BTreeMap::new(),
        }
    }

    /// Replaces the avatar. An unchanged avatar is not an edit: the counter
    /// and the cache stay as they are.
    fn set_avatar(&mut self, avatar: Avatar) {
        let hash = avatar_hash(&avatar);
        if hash == self.avatar_hash {
            return;
        }
        self.avatar = avatar;
        self.avatar_hash = hash;
        self.edit_counter += 1;
        self.costs.clear();
    }

    fn view(&self) -> SessionView {
        SessionView {
            session_id: self.id.clone(),
            edit_counter: self.edit_counter,
            avatar_hash: self.avatar_hash.clone(),
            pose: self.avatar.pose.name,
            avatar: AvatarDoc::from_avatar(&self.avatar),
            measurements: self.avatar.measure(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SessionView {
    pub session_id: String,
    pub edit_counter: u64,
    pub avatar_hash: String,
    pub pose: PoseName,
    pub avatar: AvatarDoc,
    pub measurements: BodyMeasurements,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RankedShape {
    pub rank: usize,
    pub shape_id: String,
    /// `null` when the shape could not be reshaped.
    pub energy: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RankingView {
    pub session_id: String,
    pub avatar_hash: String,
    pub edit_counter: u64,
    pub pose: PoseName,
    pub entries: Vec<RankedShape>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DeformedView {
    pub session_id: String,
    pub avatar_hash: String,
    pub edit_counter: u64,
    pub shape_id: String,
    pub original: ShapeDoc,
    pub deformed: ShapeDoc,
    pub report: DeformReport,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ShapeSummary {
    pub id: String,
    pub style_label: Option<String>,
    pub components: usize,
    pub tags: Vec<String>,
    pub aabb_min: [f64; 3],
    pub aabb_max: [f64; 3],
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PresetView {
    pub name: PoseName,
    pub avatar: AvatarDoc,
    pub measurements: BodyMeasurements,
}

/// Avatar update carried by `PUT /v1/sessions/{id}/avatar`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AvatarEdit {
    /// Keep the body, switch to a preset pose.
    Preset(PoseName),
    /// Full replacement; client-side joint drags arrive this way as joint
    /// positions.
    Avatar(AvatarDoc),
    SetAttribute {
        bone: String,
        attribute: Attribute,
        value: f64,
        #[serde(default)]
        mode: EditMode,
    },
    /// Screen-space drag resolved on the server.
    Drag {
        joint: String,
        dx: f64,
        dy: f64,
        #[serde(default)]
        camera: Camera,
    },
}

/// Optional body of `POST /v1/sessions`.
#[derive(Debug, Default, Serialize, Deserialize)]
pub struct NewSession {
    #[serde(default)]
    pub preset: Option<PoseName>,
    #[serde(default)]
    pub avatar: Option<AvatarDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invariant: Option<String>,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: ErrorBody {
                code: code.into(),
                message: message.into(),
                invariant: None,
            },
        }
    }

    fn not_found(what: &str, id: &str) -> Self {
        Self::new(
            StatusCode::NOT_FOUND,
            "not_found",
            format!("unknown {what} `{id}`"),
        )
    }

    /// A rejected avatar edit, naming the broken invariant.
    fn invalid_avatar(e: ergofit_core::Error) -> Self {
        use ergofit_core::Error as E;
        let invariant = match &e {
            E::Validation { name, .. } => name.clone(),
            E::Unknown { kind, .. } => format!("known {kind}"),
            E::Parse { field, .. } => field.clone(),
            _ => "avatar".into(),
        };
        let mut err = Self::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "invalid_avatar",
            e.to_string(),
        );
        err.body.invariant = Some(invariant);
        err
    }

    fn internal(e: impl std::fmt::Display) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        json_response(self.status, &serde_json::json!({ "error": self.body }))
    }
}

fn json_response<T: Serialize>(status: StatusCode, v: &T) -> Response {
    let body = serde_json::to_vec(v).expect("response types serialise");
    (
        status,
        [(
            header::CONTENT_TYPE,
            HeaderValue::from_static("application/json"),
        )],
        body,
    )
        .into_response()
}

fn ok<T: Serialize>(v: &T) -> Response {
    json_response(StatusCode::OK, v)
}

fn parse_body<T: for<'de> Deserialize<'de> + Default>(
    bytes: &Bytes,
    allow_empty: bool,
) -> Result<T, ApiError> {
    if allow_empty && bytes.iter().all(|b| b.is_ascii_whitespace()) {
        return Ok(T::default());
    }
    serde_json::from_slice(bytes)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "bad_request", e.to_string()))
}

type Shared = Arc<AppState>;

impl AppState {
    pub fn new(shapes: Vec<Shape>, cfg: PipelineConfig) -> Self {
        let index = shapes
            .iter()
            .enumerate()
            .map(|(i, s)| (s.id.clone(), i))
            .collect();
        AppState {
            shapes,
            index,
            cfg,
            sessions: RwLock::new(BTreeMap::new()),
            next_session: AtomicU64::new(1),
        }
    }

    async fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.sessions
            .read()
            .await
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("session", id))
    }

    fn shape(&self, id: &str) -> Result<&Shape, ApiError> {
        self.index
            .get(id)
            .map(|&i| &self.shapes[i])
            .ok_or_else(|| ApiError::not_found("shape", id))
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/v1/sessions", axum::routing::post(create_session))
        .route("/v1/sessions/{id}", get(get_session))
        .route("/v1/sessions/{id}/avatar", get(get_session).put(put_avatar))
        .route("/v1/sessions/{id}/ranking", get(get_ranking))
        .route("/v1/sessions/{id}/deformed/{shape_id}", get(get_deformed))
        .route("/v1/shapes", get(list_shapes))
        .route("/v1/shapes/{id}", get(get_shape))
        .route("/v1/presets", get(list_presets))
        .fallback(|| async {
            ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint")
        })
        .with_state(state)
}

async fn create_session(State(st): State<Shared>, body: Bytes) -> Result<Response, ApiError> {
    let req: NewSession = parse_body(&body, true)?;
    let avatar = match req.avatar {
        Some(doc) => doc.into_avatar().map_err(ApiError::invalid_avatar)?,
        None => Avatar::default(),
    };
    let avatar = match req.preset {
        Some(p) => avatar.with_preset(p).map_err(ApiError::invalid_avatar)?,
        None => avatar,
    };
    let id = format!("s{}", st.next_session.fetch_add(1, Ordering::SeqCst));
    let session = Session::new(id.clone(), avatar);
    let view = session.view();
    st.sessions
        .write()
        .await
        .insert(id, Arc::new(Mutex::new(session)));
    Ok(json_response(StatusCode::CREATED, &view))
}

async fn get_session(
    State(st): State<Shared>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let s = st.session(&id).await?;
    let view = s.lock().await.view();
    Ok(ok(&view))
}

fn apply_edit(current: &Avatar, edit: AvatarEdit) -> ergofit_core::Result<Avatar> {
    match edit {
        AvatarEdit::Preset(p) => current.with_preset(p),
        AvatarEdit::Avatar(doc) => doc.into_avatar(),
        AvatarEdit::SetAttribute {
            bone,
            attribute,
            value,
            mode,
        } => current.set_attribute(&bone, attribute, value, mode),
        AvatarEdit::Drag {
            joint,
            dx,
            dy,
            camera,
        } => current.drag_joint(&joint, (dx, dy), &camera),
    }
}

async fn put_avatar(
    State(st): State<Shared>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let s = st.session(&id).await?;
    let edit: AvatarEdit = serde_json::from_slice(&body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "bad_request", e.to_string()))?;
    // Edits on one session are serialised by its lock.
    let mut session = s.lock().await;
    let next = apply_edit(&session.avatar, edit).map_err(ApiError::invalid_avatar)?;
    session.set_avatar(next);
    Ok(ok(&session.view()))
}

async fn get_ranking(
    State(st): State<Shared>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let s = st.session(&id).await?;
    let (avatar, hash, counter, cached) = {
        let session = s.lock().await;
        let hash = session.avatar_hash.clone();
        let cached: Option<Vec<RankEntry>> = st
            .shapes
            .iter()
            .map(|shape| {
                session
                    .costs
                    .get(&(shape.id.clone(), hash.clone()))
                    .map(|&energy| RankEntry {
                        shape_id: shape.id.clone(),
                        energy,
                    })
            })
            .collect();
        (session.avatar.clone(), hash, session.edit_counter, cached)
    };
    let hit = cached.is_some();
    let entries = match cached {
        Some(mut entries) => {
            entries.sort_by(|a, b| {
                a.energy
                    .total_cmp(&b.energy)
                    .then_with(|| a.shape_id.cmp(&b.shape_id))
            });
            entries
        }
        None => {
            let st2 = st.clone();
            let av = avatar.clone();
            let ranking = tokio::task::spawn_blocking(move || rank(&st2.shapes, &av, &st2.cfg))
                .await
                .map_err(ApiError::internal)?;
            let mut session = s.lock().await;
            // Only cache results for the avatar still in place.
            if session.avatar_hash == hash {
                for e in &ranking {
                    session
                        .costs
                        .insert((e.shape_id.clone(), hash.clone()), e.energy);
                }
            }
            ranking
        }
    };
    let view = RankingView {
        session_id: id,
        avatar_hash: hash,
        edit_counter: counter,
        pose: avatar.pose.name,
        entries: entries
            .into_iter()
            .enumerate()
            .map(|(i, e)| RankedShape {
                rank: i + 1,
                shape_id: e.shape_id,
                energy: e.energy.is_finite().then_some(e.energy),
            })
            .collect(),
    };
    let mut resp = ok(&view);
    resp.headers_mut().insert(
        "x-cache",
        HeaderValue::from_static(if hit { "hit" } else { "miss" }),
    );
    Ok(resp)
}

async fn get_deformed(
    State(st): State<Shared>,
    Path((id, shape_id)): Path<(String, String)>,
) -> Result<Response, ApiError> {
    let s = st.session(&id).await?;
    let shape = st.shape(&shape_id)?.clone();
    let (avatar, hash, counter) = {
        let session = s.lock().await;
        (
            session.avatar.clone(),
            session.avatar_hash.clone(),
            session.edit_counter,
        )
    };
    let cfg = st.cfg.clone();
    let (eval, report) = tokio::task::spawn_blocking(move || -> Result<_, AppError> {
        let eval = evaluate(&shape, &avatar.measure(), &cfg)?;
        let report = DeformReport::new(&eval)?;
        Ok((eval, report))
    })
    .await
    .map_err(ApiError::internal)?
    .map_err(|e| {
        ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "unsupported_shape",
            e.to_string(),
        )
    })?;
    {
        let mut session = s.lock().await;
        if session.avatar_hash == hash {
            session
                .costs
                .insert((shape_id.clone(), hash.clone()), eval.energy);
        }
    }
    let original = st.shape(&shape_id)?;
    Ok(ok(&DeformedView {
        session_id: id,
        avatar_hash: hash,
        edit_counter: counter,
        shape_id,
        original: ShapeDoc::from_shape(original),
        deformed: ShapeDoc::from_shape(&eval.reshaped.shape),
        report,
    }))
}

async fn list_shapes(State(st): State<Shared>) -> Response {
    let list: Vec<ShapeSummary> = st
        .shapes
        .iter()
        .map(|s| {
            let bb = s.aabb();
            let tags: BTreeSet<String> = s.components.iter().map(|c| c.tag.to_string()).collect();
            ShapeSummary {
                id: s.id.clone(),
                style_label: s.style_label.clone(),
                components: s.components.len(),
                tags: tags.into_iter().collect(),
                aabb_min: bb.min.into(),
                aabb_max: bb.max.into(),
            }
        })
        .collect();
    ok(&list)
}

async fn get_shape(State(st): State<Shared>, Path(id): Path<String>) -> Result<Response, ApiError> {
    Ok(ok(&ShapeDoc::from_shape(st.shape(&id)?)))
}

async fn list_presets() -> Result<Response, ApiError> {
    let mut out = Vec::new();
    for name in PoseName::PRESETS {
        let a = Avatar::preset(name).map_err(ApiError::internal)?;
        out.push(PresetView {
            name,
            avatar: AvatarDoc::from_avatar(&a),
            measurements: a.measure(),
        });
    }
    Ok(ok(&out))
}

/// Runs the service until interrupted.
pub fn serve_blocking(shapes: Vec<Shape>, bind: &str, port: u16) -> Result<(), AppError> {
    let rt =
        tokio::runtime::Runtime::new().map_err(|e| AppError::Runtime(format!("runtime: {e}")))?;
    rt.block_on(async move {
        let addr = format!("{bind}:{port}");
        let listener = tokio::net::TcpListener::bind(&addr)
            .await
            .map_err(|e| AppError::Runtime(format!("bind {addr}: {e}")))?;
        log::info!("serving {} shapes on http://{addr}/v1", shapes.len());
        eprintln!("listening on http://{addr}");
        let app = router(Arc::new(AppState::new(shapes, PipelineConfig::default())));
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| AppError::Runtime(format!("server: {e}")))
    })
}
