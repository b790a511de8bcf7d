//! `cxo-serve`: the HTTP service.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use axum::http::HeaderValue;
use clap::Parser;
use cxo_core::complexity::DEFAULT_MAX_SEARCH_LEN;
use cxo_core::pricing::DEFAULT_TREE_LIMIT;
use cxo_core::{AnCache, ComplexityEngine};
use cxo_service::{router, store, AppState};
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

#[derive(Parser, Debug)]
#[command(
    name = "cxo-serve",
    version,
    about = "HTTP service for complexity options"
)]
struct Args {
    #[arg(long, env = "CXO_BIND", default_value = "127.0.0.1")]
    bind: std::net::IpAddr,
    #[arg(long, env = "CXO_PORT", default_value_t = 8080)]
    port: u16,
    /// Largest expiry priced or played.
    #[arg(long, env = "CXO_LIMIT", default_value_t = DEFAULT_TREE_LIMIT)]
    limit: usize,
    /// Longest string the complexity search accepts.
    #[arg(long, env = "CXO_MAX_LEN", default_value_t = DEFAULT_MAX_SEARCH_LEN)]
    max_len: usize,
    #[arg(long, env = "CXO_CACHE")]
    cache: Option<PathBuf>,
    /// Seconds a game may sit idle before it is dropped.
    #[arg(long, env = "CXO_IDLE_TIMEOUT", default_value_t = 1800)]
    idle_timeout: u64,
    /// Session snapshot file, read at startup and rewritten periodically.
    #[arg(long, env = "CXO_SNAPSHOT")]
    snapshot: Option<PathBuf>,
    /// Allowed CORS origins; any origin when omitted.
    #[arg(long = "cors-origin", env = "CXO_CORS_ORIGIN", value_delimiter = ',')]
    cors_origins: Vec<String>,
}

fn cors(origins: &[String]) -> Result<CorsLayer, String> {
    let layer = CorsLayer::new().allow_methods(Any).allow_headers(Any);
    if origins.is_empty() {
        return Ok(layer.allow_origin(Any));
    }
    let origins = origins
        .iter()
        .map(|o| HeaderValue::from_str(o).map_err(|e| format!("bad origin `{o}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(layer.allow_origin(AllowOrigin::list(origins)))
}

async fn serve(args: Args) -> Result<(), String> {
    let cache = match &args.cache {
        Some(path) => {
            let (cache, stats) = AnCache::open(path).map_err(|e| e.to_string())?;
            eprintln!(
                "cxo-serve: {} cached values, {} skipped",
                stats.loaded, stats.skipped
            );
            cache
        }
        None => AnCache::new(),
    };
    let engine = ComplexityEngine::new(cache).with_max_len(args.max_len);
    let idle = Duration::from_secs(args.idle_timeout.max(1));
    let state = AppState::new(engine, args.limit, idle);
    if let Some(path) = &args.snapshot {
        let records = store::read_snapshot(path).map_err(|e| e.to_string())?;
        eprintln!("cxo-serve: restored {} session(s)", state.restore(records));
    }

    let sweeper = {
        let state = state.clone();
        let snapshot = args.snapshot.clone();
        tokio::spawn(async move {
            let mut tick = tokio::time::interval(
                (idle / 4).clamp(Duration::from_secs(1), Duration::from_secs(60)),
            );
            loop {
                tick.tick().await;
                state.sessions().evict_idle();
                if let Some(path) = &snapshot {
                    if let Err(e) = state.sessions().snapshot(path) {
                        eprintln!("cxo-serve: snapshot failed: {e}");
                    }
                }
            }
        })
    };

    let app = router(state.clone()).layer(cors(&args.cors_origins)?);
    let addr = SocketAddr::new(args.bind, args.port);
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| format!("bind {addr}: {e}"))?;
    eprintln!("cxo-serve: listening on http://{addr}");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| e.to_string())?;
    sweeper.abort();
    if let Some(path) = &args.snapshot {
        state.sessions().snapshot(path).map_err(|e| e.to_string())?;
    }
    Ok(())
}

#[tokio::main]
async fn main() -> ExitCode {
    match serve(Args::parse()).await {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cxo-serve: {e}");
            ExitCode::FAILURE
        }
    }
}
