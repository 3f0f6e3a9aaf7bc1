use std::net::SocketAddr;
use std::path::PathBuf;

use clap::Parser;

use decomate_core::llm::{TransportConfig, TransportMode, DEFAULT_API_KEY_ENV, DEFAULT_ENDPOINT, DEFAULT_MODEL};

#[derive(Clone, Debug, Parser)]
#[command(name = "decomate-server", about = "Serve the SVG co-animation session API")]
pub struct ServerArgs {
    /// Directory holding sessions/ and exports/.
    #[arg(long, env = "DECOMATE_DATA_DIR", default_value = "decomate-data")]
    pub data_dir: PathBuf,
    #[arg(long, env = "DECOMATE_BIND", default_value = "127.0.0.1:8787")]
    pub bind: SocketAddr,
    /// live, replay, or scripted.
    #[arg(long, env = "DECOMATE_TRANSPORT", default_value = "replay")]
    pub transport: TransportMode,
    #[arg(long, env = "DECOMATE_FIXTURE_DIR", default_value = "fixtures/llm")]
    pub fixture_dir: PathBuf,
    /// Name of the environment variable holding the API key (live mode).
    #[arg(long, env = "DECOMATE_API_KEY_ENV", default_value = DEFAULT_API_KEY_ENV)]
    pub api_key_env_name: String,
    #[arg(long, env = "DECOMATE_ENDPOINT", default_value = DEFAULT_ENDPOINT)]
    pub endpoint_url: String,
    #[arg(long, env = "DECOMATE_MODEL", default_value = DEFAULT_MODEL)]
    pub model: String,
    #[arg(long, env = "DECOMATE_TIMEOUT_MS", default_value_t = 120_000)]
    pub timeout_ms: u64,
}

impl ServerArgs {
    pub fn transport_config(&self) -> TransportConfig {
        TransportConfig {
            mode: self.transport,
            endpoint_url: self.endpoint_url.clone(),
            api_key_env_name: self.api_key_env_name.clone(),
            model: self.model.clone(),
            fixture_dir: Some(self.fixture_dir.clone()),
            timeout_ms: self.timeout_ms,
            ..TransportConfig::default()
        }
    }
}
