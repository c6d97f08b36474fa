//! Fetches the chain a TLS server presents and classifies it.
//!
//! cargo run --example capture_chain -- HOST[:PORT] STORE.pem...
//!
//! Without arguments a local server with a self-signed certificate is
//! started and audited.

use std::net::TcpListener;
use std::sync::Arc;
use std::time::Duration;

use chrono::Utc;
use rustls::pki_types::{CertificateDer, PrivateKeyDer, PrivatePkcs8KeyDer};
use sslguard::audit::{audit_target, Endpoint, Target};
use sslguard::x509::TrustStore;
use sslguard_fixtures::certs::{CertSpec, Issued};

fn local_server() -> Endpoint {
    let cert = Issued::self_signed(&CertSpec::leaf("localhost", &["localhost"])).unwrap();
    let config = rustls::ServerConfig::builder_with_provider(Arc::new(rustls::crypto::ring::default_provider()))
        .with_safe_default_protocol_versions()
        .unwrap()
        .with_no_client_auth()
        .with_single_cert(
            vec![CertificateDer::from(cert.der())],
            PrivateKeyDer::Pkcs8(PrivatePkcs8KeyDer::from(cert.key_der())),
        )
        .unwrap();
    let config = Arc::new(config);
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let port = listener.local_addr().unwrap().port();
    std::thread::spawn(move || {
        for mut stream in listener.incoming().flatten() {
            let mut conn = rustls::ServerConnection::new(config.clone()).unwrap();
            while conn.is_handshaking() && conn.complete_io(&mut stream).is_ok() {}
        }
    });
    Endpoint::new("localhost", port).unwrap()
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (endpoint, stores) = match args.split_first() {
        Some((target, stores)) if !stores.is_empty() => (target.parse::<Endpoint>().unwrap(), stores.to_vec()),
        _ => (
            local_server(),
            vec![concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/chains/stores/android-4.2.pem").to_string()],
        ),
    };
    let profiles: Vec<TrustStore> = stores.iter().map(|p| TrustStore::load(p.as_ref()).unwrap()).collect();
    let r = audit_target(&Target::Endpoint(endpoint), &profiles, Utc::now(), Duration::from_secs(10)).unwrap();
    println!("{}", serde_json::to_string_pretty(&r).unwrap());
}
