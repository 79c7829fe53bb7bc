//! Serializable report shapes. Field order here is the order on disk.

use qlocal::{PremiseStatus, VerdictReport};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::format::{complex_to_value, matrix_to_value, vector_to_value, ChannelFile};

#[derive(Debug, Serialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Serialize)]
pub struct WitnessDto {
    pub label: String,
    pub state: Option<Value>,
    pub deviation: f64,
}

#[derive(Debug, Serialize)]
pub struct VerdictDto {
    pub premise_status: &'static str,
    pub tolerance: f64,
    pub recovered_unitary: Option<Value>,
    pub recovered_env_channel: Option<Value>,
    pub recovered_env_state: Option<Value>,
    pub phase: Option<Value>,
    pub residuals: Vec<Residual>,
    pub witnesses: Vec<WitnessDto>,
    pub warnings: Vec<String>,
    pub alarm: Option<String>,
}

impl VerdictDto {
    pub fn from_report(r: &VerdictReport) -> Self {
        Self {
            premise_status: r.premise_status.as_str(),
            tolerance: r.tolerance,
            recovered_unitary: r.recovered_unitary.as_ref().map(matrix_to_value),
            recovered_env_channel: r
                .recovered_env_channel
                .as_ref()
                .map(|c| ChannelFile::from_choi(c.choi(), None).to_value()),
            recovered_env_state: r
                .recovered_env_state
                .as_ref()
                .map(|s| matrix_to_value(s.matrix())),
            phase: r.phase.as_ref().map(complex_to_value),
            residuals: r
                .residuals
                .iter()
                .map(|(name, value)| Residual {
                    name: name.clone(),
                    value: *value,
                })
                .collect(),
            witnesses: r
                .witnesses
                .iter()
                .map(|w| WitnessDto {
                    label: w.label.clone(),
                    state: w.state.as_ref().map(|s| vector_to_value(s.amplitudes())),
                    deviation: w.deviation,
                })
                .collect(),
            warnings: r.warnings.clone(),
            alarm: r.alarm.clone(),
        }
    }

    /// Combines per-point verdicts: holds only if every point holds; each
    /// residual is the maximum over the points reporting it; witnesses and
    /// warnings are collected under the point label.
    pub fn aggregate(points: &[(String, VerdictReport)], tolerance: f64) -> Self {
        if let [(_, only)] = points {
            return Self::from_report(only);
        }
        let status = if points.iter().all(|(_, r)| r.holds()) {
            PremiseStatus::Holds
        } else {
            PremiseStatus::Fails
        };
        let mut residuals: Vec<Residual> = Vec::new();
        let mut witnesses = Vec::new();
        let mut warnings = Vec::new();
        let mut alarm = None;
        for (label, r) in points {
            for (name, value) in &r.residuals {
                match residuals.iter_mut().find(|x| &x.name == name) {
                    Some(x) => x.value = x.value.max(*value),
                    None => residuals.push(Residual {
                        name: name.clone(),
                        value: *value,
                    }),
                }
            }
            for w in &r.witnesses {
                witnesses.push(WitnessDto {
                    label: format!("{label}: {}", w.label),
                    state: w.state.as_ref().map(|s| vector_to_value(s.amplitudes())),
                    deviation: w.deviation,
                });
            }
            for w in &r.warnings {
                let w = format!("{label}: {w}");
                if !warnings.contains(&w) {
                    warnings.push(w);
                }
            }
            if alarm.is_none() {
                alarm = r.alarm.as_ref().map(|a| format!("{label}: {a}"));
            }
        }
        Self {
            premise_status: status.as_str(),
            tolerance,
            recovered_unitary: None,
            recovered_env_channel: None,
            recovered_env_state: None,
            phase: None,
            residuals,
            witnesses,
            warnings,
            alarm,
        }
    }

    pub fn residual_map(&self) -> Map<String, Value> {
        self.residuals
            .iter()
            .map(|r| (r.name.clone(), crate::format::real_to_value(r.value)))
            .collect()
    }
}

/// One probed environment state in an `analyze` run.
#[derive(Debug, Serialize)]
pub struct PointDto {
    pub label: String,
    pub theta: Option<f64>,
    pub xi: Value,
    pub restriction_choi_spectrum: Vec<f64>,
    pub unitary: Option<Value>,
    pub verdict: VerdictDto,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub tolerance: f64,
    pub seed: u64,
    pub verdict: VerdictDto,
    pub residuals: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<PointDto>>,
    pub runtime_ms: Option<f64>,
}
