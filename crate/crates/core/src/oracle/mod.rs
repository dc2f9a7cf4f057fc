//! Brute-force verifiers that re-derive the library's results over complete
//! residue systems and emit self-describing certificates.
//!
//! Arithmetic here is deliberately naive (repeated multiplication, orbit
//! walking, set building) and shares nothing with the fast paths it checks.

mod lemma1;
mod linear;
mod log_isometry;
mod minimal;
pub(crate) mod naive;
mod unique;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub use lemma1::verify_lemma1;
pub use linear::{invariant_probability_vectors, InvariantSolution};
pub use log_isometry::verify_log_isometry;
pub use minimal::{verify_generation, verify_theorem_minimal};
pub use unique::verify_unique_invariance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// A verification result with a SHA-256 digest over its own content.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub claim: String,
    pub parameters: Value,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    pub annotations: Vec<String>,
    pub digest: String,
}

impl Certificate {
    fn new(
        claim: &str,
        parameters: Value,
        ok: bool,
        witness: Option<Value>,
        annotations: Vec<String>,
    ) -> Self {
        let status = Status::from_bool(ok);
        let body = json!({
            "claim": claim,
            "parameters": parameters,
            "status": status,
            "witness": witness,
            "annotations": annotations,
        });
        let bytes = serde_json::to_vec(&body).expect("JSON values always serialize");
        Certificate {
            claim: claim.to_string(),
            parameters,
            status,
            witness,
            annotations,
            digest: hex::encode(Sha256::digest(&bytes)),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Sweep limits; both can be raised by the caller.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OracleCaps {
    /// Largest modulus `p^K` enumerated in one sweep.
    pub max_residues: u64,
    pub max_exponent: u64,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps {
            max_residues: 1_000_000,
            max_exponent: 64,
        }
    }
}

impl OracleCaps {
    fn check_modulus(&self, p: u64, e: u32) -> crate::Result<u64> {
        match naive::power(p, e) {
            Some(m) if m <= self.max_residues => Ok(m),
            _ => Err(crate::Error::resource(format!(
                "{p}^{e} residues exceed the sweep cap {}",
                self.max_residues
            ))),
        }
    }
}
