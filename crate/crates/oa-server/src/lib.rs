//! HTTP publish/discover service for annotation stores.
//!
//! [`ServiceConfig`] layers a config file, `OASTORE_*` environment
//! variables, and flag overrides; [`serve`] (or [`run_blocking`] from
//! synchronous code) exposes the store over HTTP. Tests can drive the
//! [`router`] directly or use [`serve_with_listener`] with a port of
//! their choosing.

pub mod config;
pub mod service;

pub use config::{ConfigError, ConfigLayer, ServiceConfig, DEFAULT_BIND, DEFAULT_MAX_BODY_BYTES};
pub use service::{
    negotiate_format, open_store, router, run_blocking, serve, serve_with_listener, AppState,
    Format, ServeError, MEDIA_LD_JSON, MEDIA_TRIG, MEDIA_TURTLE,
};
