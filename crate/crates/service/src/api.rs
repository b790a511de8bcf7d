use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use cxo_core::exact::{parse_rational, to_fraction_string};
use cxo_core::{BitString, Error, MarketParams, OptionStyle};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::game::{Action, Amount, GameError, Session, Status};
use crate::AppState;

pub const OPENAPI: &str = include_str!("../openapi.json");

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/openapi.json", get(openapi))
        .route("/complexity", get(complexity))
        .route("/price", post(price))
        .route("/game/new", post(new_game))
        .route("/game/{id}", get(game_state))
        .route("/game/{id}/step", post(step))
        .route("/game/{id}/report", get(report))
        .with_state(state)
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }

    fn unknown_session(id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, format!("no session `{id}`"))
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::LimitExceeded { .. } => StatusCode::PAYLOAD_TOO_LARGE,
            Error::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError::new(status, e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, e.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, e.body_text())
    }
}

impl From<GameError> for ApiError {
    fn from(e: GameError) -> Self {
        let message = match e {
            GameError::NotActive(Status::Exercised) => "game already exercised".to_string(),
            GameError::NotActive(_) => "game already expired".to_string(),
            GameError::NotFinished => "game still active".to_string(),
        };
        ApiError::new(StatusCode::CONFLICT, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

type ApiResult = Result<Json<Value>, ApiError>;

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
}

/// A rational given as a JSON number or as a decimal/fraction string.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Rational {
    Text(String),
    Number(serde_json::Number),
}

impl Rational {
    fn parse(&self) -> cxo_core::Result<num_rational::BigRational> {
        match self {
            Rational::Text(s) => parse_rational(s),
            Rational::Number(n) => parse_rational(&n.to_string()),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
pub struct Market {
    rate: Option<Rational>,
    p: Option<Rational>,
    u: Option<Rational>,
    d: Option<Rational>,
}

impl Market {
    pub fn params(&self) -> Result<MarketParams, ApiError> {
        let rate = match &self.rate {
            Some(r) => r.parse()?,
            None => num_rational::BigRational::from_integer(0.into()),
        };
        let params = match (&self.p, &self.u, &self.d) {
            (None, Some(u), Some(d)) => MarketParams::from_factors(rate, u.parse()?, d.parse()?)?,
            (Some(p), None, None) => MarketParams::new(rate, p.parse()?)?,
            (None, None, None) => MarketParams::fair(rate)?,
            _ => {
                return Err(ApiError::new(
                    StatusCode::BAD_REQUEST,
                    "give either p or both u and d",
                ))
            }
        };
        Ok(params)
    }
}

async fn openapi() -> impl IntoResponse {
    ([(header::CONTENT_TYPE, "application/json")], OPENAPI)
}

#[derive(Deserialize)]
struct ComplexityQuery {
    x: String,
}

async fn complexity(
    State(state): State<AppState>,
    query: Result<Query<ComplexityQuery>, QueryRejection>,
) -> ApiResult {
    let Query(query) = query?;
    let x = BitString::parse(&query.x)?;
    blocking(move || {
        let engine = state.engine();
        let result = engine.an_complexity(&x)?;
        let d = engine.deficiency(&x)?;
        Ok(Json(json!({
            "string": x.to_string(),
            "length": x.len(),
            "complexity": result.complexity,
            "b_n": d.b_n,
            "deficiency": d.deficiency,
            "witness": result.witness,
            "automaton": result.witness_automaton.to_text(),
        })))
    })
    .await
}

#[derive(Debug, Deserialize)]
pub struct PriceRequest {
    pub style: OptionStyle,
    pub n: usize,
    #[serde(flatten)]
    pub market: Market,
    #[serde(default)]
    pub tree: bool,
}

async fn price(
    State(state): State<AppState>,
    body: Result<Json<Value>, JsonRejection>,
) -> ApiResult {
    let Json(body) = body?;
    let req: PriceRequest = serde_json::from_value(body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?;
    let params = req.market.params()?;
    blocking(move || {
        let pricer = state.pricer();
        let (value, tree) = match (req.style, req.tree) {
            (OptionStyle::European, false) => (pricer.european_price(req.n, &params)?, None),
            (style, _) => {
                let tree = pricer.price_tree(req.n, &params, style)?;
                (tree.value().clone(), req.tree.then(|| tree.to_json(6)))
            }
        };
        let amount = Amount::new(&value);
        let mut out = json!({
            "style": req.style,
            "n": req.n,
            "params": params,
            "value": amount.value,
            "display": amount.display,
            "exact": to_fraction_string(&value),
        });
        if let Some(tree) = tree {
            out["tree"] = tree;
        }
        Ok(Json(out))
    })
    .await
}

#[derive(Debug, Deserialize)]
pub struct NewGame {
    pub n: usize,
    #[serde(flatten)]
    pub market: Market,
    pub seed: Option<u64>,
}

async fn new_game(
    State(state): State<AppState>,
    body: Result<Json<Value>, JsonRejection>,
) -> ApiResult {
    let Json(body) = body?;
    let req: NewGame = serde_json::from_value(body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?;
    let params = req.market.params()?;
    blocking(move || {
        let tree = state.game_tree(req.n, &params)?;
        let seed = req.seed.unwrap_or_else(rand::random);
        let session = Session::new(uuid::Uuid::new_v4().simple().to_string(), seed, tree);
        let out = json!({
            "id": session.id(),
            "n": session.n(),
            "params": params,
            "optimal_value": Amount::new(session.optimal_value()),
            "state": session.view(),
        });
        state.sessions().insert(session);
        Ok(Json(out))
    })
    .await
}

async fn game_state(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    state
        .sessions()
        .with(&id, |s| Json(json!(s.view())))
        .ok_or_else(|| ApiError::unknown_session(&id))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepRequest {
    pub action: Action,
}

async fn step(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<Value>, JsonRejection>,
) -> ApiResult {
    let Json(body) = body?;
    let req: StepRequest = serde_json::from_value(body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?;
    let view = state
        .sessions()
        .with(&id, |s| s.step(req.action))
        .ok_or_else(|| ApiError::unknown_session(&id))??;
    Ok(Json(json!(view)))
}

async fn report(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let report = state
        .sessions()
        .with(&id, |s| s.report())
        .ok_or_else(|| ApiError::unknown_session(&id))??;
    Ok(Json(json!(report)))
}
