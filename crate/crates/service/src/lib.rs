//! Stateful HTTP sessions around the decompose, refine, and animate loop.

pub mod api;
pub mod config;
pub mod error;
pub mod http;
pub mod service;
pub mod session;
pub mod store;

pub use error::{ApiError, ErrorCode};
pub use http::router;
pub use service::SessionService;
pub use session::{Session, SessionState};
