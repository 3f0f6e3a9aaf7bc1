use std::sync::Arc;

use clap::Parser;

use decomate_core::llm::build_transport;
use decomate_service::config::ServerArgs;
use decomate_service::{router, SessionService};

#[tokio::main]
async fn main() {
    let args = ServerArgs::parse();
    let transport = match build_transport(&args.transport_config()) {
        Ok(t) => Arc::from(t),
        Err(e) => {
            eprintln!("decomate-server: {e}");
            std::process::exit(2);
        }
    };
    let service = match SessionService::open(&args.data_dir, transport) {
        Ok(s) => Arc::new(s),
        Err(e) => {
            eprintln!("decomate-server: cannot open {}: {e}", args.data_dir.display());
            std::process::exit(2);
        }
    };
    let listener = match tokio::net::TcpListener::bind(args.bind).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("decomate-server: cannot bind {}: {e}", args.bind);
            std::process::exit(2);
        }
    };
    let addr = listener.local_addr().map(|a| a.to_string()).unwrap_or_default();
    eprintln!(
        "decomate-server: listening on {addr} ({} sessions loaded, transport {:?})",
        service.session_ids().len(),
        args.transport
    );
    let shutdown = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    if let Err(e) = axum::serve(listener, router(service)).with_graceful_shutdown(shutdown).await {
        eprintln!("decomate-server: {e}");
        std::process::exit(1);
    }
}
