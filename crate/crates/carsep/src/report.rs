//! Serializable report documents for verdicts, witnesses, and roof values.

use serde::Serialize;

use crate::entanglement::RoofResult;
use crate::separability::{Certificate, Pairing, SeparabilityVerdict, Verdict, WitnessReport};
use crate::tol;

#[derive(Debug, Clone, Serialize)]
pub struct WitnessDoc {
    pub max_violation: f64,
    pub threshold: f64,
    pub nonseparable: bool,
    pub left: String,
    pub right: String,
}

impl WitnessDoc {
    pub fn from_report(rep: &WitnessReport) -> WitnessDoc {
        WitnessDoc {
            max_violation: rep.max_violation,
            threshold: rep.threshold,
            nonseparable: rep.nonseparable,
            left: rep.left_expr.clone(),
            right: rep.right_expr.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RoofDoc {
    pub value: f64,
    pub converged: bool,
    pub gap_estimate: f64,
    pub restarts_used: usize,
    pub components: usize,
    pub all_components_even: bool,
    pub all_components_pure: bool,
}

impl RoofDoc {
    pub fn from_result(r: &RoofResult) -> RoofDoc {
        RoofDoc {
            value: r.value,
            converged: r.converged,
            gap_estimate: r.gap_estimate,
            restarts_used: r.restarts_used,
            components: r.decomposition.len(),
            all_components_even: r.decomposition.all_even(),
            all_components_pure: r.decomposition.all_pure(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictDoc {
    pub pairing: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ppt_min_eigenvalue: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ppt_decisive: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub roof_upper_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_components: Option<usize>,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub witness_threshold: f64,
    pub ppt_eigenvalue: f64,
    pub certificate_reassembly: f64,
    pub roof_zero: f64,
}

impl Default for Tolerances {
    fn default() -> Tolerances {
        Tolerances {
            witness_threshold: tol::WITNESS,
            ppt_eigenvalue: tol::PPT_EIG,
            certificate_reassembly: tol::DECOMP_REASSEMBLE,
            roof_zero: tol::ROOF_ZERO,
        }
    }
}

impl VerdictDoc {
    pub fn from_verdict(v: &SeparabilityVerdict) -> VerdictDoc {
        let mut doc = VerdictDoc {
            pairing: match v.pairing {
                Pairing::Car => "car".to_string(),
                Pairing::Tensor => "tensor".to_string(),
            },
            verdict: match v.verdict {
                Verdict::Separable => "separable".to_string(),
                Verdict::Nonseparable => "nonseparable".to_string(),
                Verdict::Inconclusive => "inconclusive".to_string(),
            },
            witness: None,
            ppt_min_eigenvalue: None,
            ppt_decisive: None,
            roof_upper_bound: None,
            certificate_components: None,
            tolerances: Tolerances::default(),
        };
        match &v.certificate {
            Certificate::Witness(w) => doc.witness = Some(WitnessDoc::from_report(w)),
            Certificate::PptSpectrum {
                min_eigenvalue,
                decisive,
            } => {
                doc.ppt_min_eigenvalue = Some(*min_eigenvalue);
                doc.ppt_decisive = Some(*decisive);
            }
            Certificate::RoofBound { value, .. } => doc.roof_upper_bound = Some(*value),
            Certificate::Decomposition(dec) => {
                doc.certificate_components = Some(dec.len());
            }
        }
        doc
    }
}

/// 12-significant-digit fixed formatting used by the CLI tables and files.
pub fn sig(x: f64) -> String {
    format!("{x:.11e}")
}
