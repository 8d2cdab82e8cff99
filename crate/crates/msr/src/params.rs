//! Parameter files.
//!
//! A parameter file is JSON holding everything needed to rebuild a code
//! instance. The checksum stamped into shard headers is CRC-32 over the
//! canonical form: the code-defining keys only, sorted, with no whitespace.
//! The optional `certificate` object records how the coefficients were
//! found and does not enter the checksum.

use std::fs;
use std::path::Path;

use msr_core::coefficients::CoefficientCertificate;
use msr_core::{CodeParams, MsrCode};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Current parameter file version.
pub const FORMAT_VERSION: u32 = 1;

/// Scenario enumeration tag. Only lexicographic order is defined.
pub const SCENARIO_ORDER: &str = "lex";

/// What the coefficient search established.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub any_helper_verified: bool,
    pub bound_any: u128,
    pub bound_mds: u128,
    pub mds_verified: bool,
    pub seed: u64,
    pub tries: u32,
}

impl From<&CoefficientCertificate> for Certificate {
    fn from(c: &CoefficientCertificate) -> Self {
        Certificate {
            any_helper_verified: c.any_helper_verified,
            bound_any: c.bound_any,
            bound_mds: c.bound_mds,
            mds_verified: c.mds_verified,
            seed: c.seed,
            tries: c.tries,
        }
    }
}

/// Contents of a parameter file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsFile {
    pub alpha: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    pub d: usize,
    pub format_version: u32,
    pub k: usize,
    pub lambda: Vec<Vec<u64>>,
    pub n: usize,
    pub q: u64,
    pub rho: usize,
    pub scenario_order: String,
}

impl ParamsFile {
    /// Describe `code`, optionally with the certificate that produced it.
    pub fn from_code(code: &MsrCode, certificate: Option<&CoefficientCertificate>) -> Self {
        let p = code.params();
        ParamsFile {
            alpha: p.alpha(),
            certificate: certificate.map(Certificate::from),
            d: p.d(),
            format_version: FORMAT_VERSION,
            k: p.k(),
            lambda: code.lambdas(),
            n: p.n(),
            q: p.q(),
            rho: p.rho(),
            scenario_order: SCENARIO_ORDER.to_string(),
        }
    }

    /// Canonical serialization: sorted keys, no whitespace, no certificate.
    pub fn canonical_json(&self) -> String {
        // serde_json's default map is ordered by key.
        let v: Value = json!({
            "alpha": self.alpha,
            "d": self.d,
            "format_version": self.format_version,
            "k": self.k,
            "lambda": self.lambda,
            "n": self.n,
            "q": self.q,
            "rho": self.rho,
            "scenario_order": self.scenario_order,
        });
        v.to_string()
    }

    /// CRC-32 of [`ParamsFile::canonical_json`].
    pub fn checksum(&self) -> u32 {
        crc32fast::hash(self.canonical_json().as_bytes())
    }

    /// Rebuild the code, checking that the stored derived values agree.
    pub fn build(&self) -> Result<MsrCode> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Params(format!(
                "unsupported format_version {}",
                self.format_version
            )));
        }
        if self.scenario_order != SCENARIO_ORDER {
            return Err(Error::Params(format!(
                "unsupported scenario_order {:?}",
                self.scenario_order
            )));
        }
        let params = CodeParams::new(self.n, self.k, self.d, self.q)?;
        if params.alpha() != self.alpha || params.rho() != self.rho {
            return Err(Error::Params(format!(
                "alpha/rho are {}/{}, expected {}/{}",
                self.alpha,
                self.rho,
                params.alpha(),
                params.rho()
            )));
        }
        if self.lambda.len() != params.r() || self.lambda.iter().any(|r| r.len() != params.k()) {
            return Err(Error::Params(format!(
                "lambda must be {}x{}",
                params.r(),
                params.k()
            )));
        }
        Ok(MsrCode::new(params, &self.lambda)?)
    }

    /// Pretty JSON for writing to disk.
    pub fn to_json_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    /// Parse JSON text.
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Read a file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(Error::io(path))?;
        Self::from_json(&text)
    }

    /// Write a file.
    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json_pretty()).map_err(Error::io(path))
    }
}

/// A loaded code together with its checksum.
#[derive(Debug, Clone)]
pub struct LoadedCode {
    pub file: ParamsFile,
    pub code: MsrCode,
    pub checksum: u32,
}

impl LoadedCode {
    /// Load and build from a parameter file.
    pub fn load(path: &Path) -> Result<Self> {
        Self::from_file(ParamsFile::load(path)?)
    }

    /// Build from parsed contents.
    pub fn from_file(file: ParamsFile) -> Result<Self> {
        let code = file.build()?;
        let checksum = file.checksum();
        Ok(LoadedCode {
            file,
            code,
            checksum,
        })
    }
}
