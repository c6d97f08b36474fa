//! Manifest-driven SSL verification for Android-style apps, plus the
//! tooling to audit how apps actually use SSL.
//!
//! * [`policy`] reads the debug flag and the `uses-SSLPinning` element.
//! * [`x509`] builds and checks chains, matches pins and host names, and
//!   turns all of it into a [`x509::VerificationVerdict`].
//! * [`scanner`] greps decompiled app trees for SSL usage and for the
//!   trust-all / allow-all / ignore-error idioms.
//! * [`audit`] captures server chains and classifies them against several
//!   root-store profiles.
//! * [`report`] rolls scans and audits up into corpus-level tables.
//! * [`cli`] wires the above into the `sslguard` command.

pub mod audit;
pub mod cli;
pub mod policy;
pub mod report;
pub mod scanner;
pub mod x509;
