//! Test and example fixtures for `sslguard`: generated certificate chains
//! and synthetic decompiled-app corpora.
//!
//! Nothing here depends on `sslguard` itself, so the crate can be a
//! dev-dependency without creating a type-level cycle.

pub mod certs;
pub mod corpus;
