//! Certificate generation on top of `rcgen`.

use rcgen::{
    BasicConstraints, Certificate, CertificateParams, DistinguishedName, DnType, IsCa, KeyPair,
    KeyUsagePurpose,
};

pub use rcgen::Error;

/// Calendar date, UTC midnight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Day(pub i32, pub u8, pub u8);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaBit {
    /// Basic Constraints with `CA:TRUE`.
    Ca,
    /// Basic Constraints with `CA:FALSE`.
    NotCa,
    /// No Basic Constraints extension at all.
    Absent,
}

/// What to put in one certificate.
#[derive(Debug, Clone)]
pub struct CertSpec {
    pub common_name: Option<String>,
    pub organization: String,
    /// DNS names or IP literals; empty means no SubjectAltName extension.
    pub sans: Vec<String>,
    pub not_before: Day,
    pub not_after: Day,
    pub ca: CaBit,
}

impl CertSpec {
    pub fn leaf(cn: &str, sans: &[&str]) -> Self {
        CertSpec {
            common_name: Some(cn.to_string()),
            organization: "Fixture Servers".into(),
            sans: sans.iter().map(|s| s.to_string()).collect(),
            not_before: Day(2012, 1, 1),
            not_after: Day(2030, 1, 1),
            ca: CaBit::Absent,
        }
    }

    pub fn ca(cn: &str) -> Self {
        CertSpec {
            common_name: Some(cn.to_string()),
            organization: "Fixture Trust Services".into(),
            sans: Vec::new(),
            not_before: Day(2010, 1, 1),
            not_after: Day(2035, 1, 1),
            ca: CaBit::Ca,
        }
    }

    pub fn valid(mut self, from: Day, until: Day) -> Self {
        self.not_before = from;
        self.not_after = until;
        self
    }

    pub fn with_ca_bit(mut self, ca: CaBit) -> Self {
        self.ca = ca;
        self
    }

    fn params(&self) -> Result<CertificateParams, Error> {
        let mut params = CertificateParams::new(self.sans.clone())?;
        let mut dn = DistinguishedName::new();
        dn.push(DnType::OrganizationName, self.organization.as_str());
        if let Some(cn) = &self.common_name {
            dn.push(DnType::CommonName, cn.as_str());
        }
        params.distinguished_name = dn;
        params.not_before = rcgen::date_time_ymd(self.not_before.0, self.not_before.1, self.not_before.2);
        params.not_after = rcgen::date_time_ymd(self.not_after.0, self.not_after.1, self.not_after.2);
        params.is_ca = match self.ca {
            CaBit::Ca => IsCa::Ca(BasicConstraints::Unconstrained),
            CaBit::NotCa => IsCa::ExplicitNoCa,
            CaBit::Absent => IsCa::NoCa,
        };
        if self.ca == CaBit::Ca {
            params.key_usages = vec![KeyUsagePurpose::KeyCertSign, KeyUsagePurpose::CrlSign];
        }
        Ok(params)
    }
}

/// A certificate together with its private key, able to issue children.
pub struct Issued {
    pub cert: Certificate,
    pub key: KeyPair,
}

impl Issued {
    pub fn self_signed(spec: &CertSpec) -> Result<Self, Error> {
        let key = KeyPair::generate()?;
        let cert = spec.params()?.self_signed(&key)?;
        Ok(Issued { cert, key })
    }

    /// Signed by `issuer` regardless of the issuer's CA bit.
    pub fn signed_by(spec: &CertSpec, issuer: &Issued) -> Result<Self, Error> {
        let key = KeyPair::generate()?;
        let cert = spec.params()?.signed_by(&key, &issuer.cert, &issuer.key)?;
        Ok(Issued { cert, key })
    }

    pub fn der(&self) -> Vec<u8> {
        self.cert.der().to_vec()
    }

    pub fn pem(&self) -> String {
        self.cert.pem()
    }

    pub fn key_pem(&self) -> String {
        self.key.serialize_pem()
    }

    pub fn key_der(&self) -> Vec<u8> {
        self.key.serialize_der()
    }
}

/// Which defect, if any, a generated three-certificate chain carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainFault {
    None,
    /// Intermediate validity ends 2012-12-31.
    ExpiredIntermediate,
    /// Intermediate carries `CA:FALSE`.
    IntermediateNotCa,
}

/// Root, intermediate and leaf. The leaf covers `www.foo.com` and
/// `*.foo.com` and is valid 2012-01-01 .. 2030-01-01.
pub struct ThreeChain {
    pub root: Issued,
    pub intermediate: Issued,
    pub leaf: Issued,
}

impl ThreeChain {
    pub fn generate(tag: &str, fault: ChainFault) -> Result<Self, Error> {
        let root = Issued::self_signed(&CertSpec::ca(&format!("{tag} Root CA")))?;
        let mut int_spec = CertSpec::ca(&format!("{tag} Intermediate CA"));
        match fault {
            ChainFault::None => {}
            ChainFault::ExpiredIntermediate => {
                int_spec = int_spec.valid(Day(2010, 1, 1), Day(2012, 12, 31));
            }
            ChainFault::IntermediateNotCa => int_spec = int_spec.with_ca_bit(CaBit::NotCa),
        }
        let intermediate = Issued::signed_by(&int_spec, &root)?;
        let leaf = Issued::signed_by(
            &CertSpec::leaf("www.foo.com", &["www.foo.com", "*.foo.com"]),
            &intermediate,
        )?;
        Ok(ThreeChain {
            root,
            intermediate,
            leaf,
        })
    }

    /// Leaf then intermediate, as a server would present them.
    pub fn presented_pem(&self) -> String {
        format!("{}{}", self.leaf.pem(), self.intermediate.pem())
    }
}
