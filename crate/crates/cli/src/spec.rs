//! Parsers for the `--dims`, `--xi` and `--unitaries` arguments.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use qlocal::gallery::named_gate;
use qlocal::{BipartiteDims, CMatrix, PureState};
use serde_json::Value;

use crate::error::CliError;
use crate::format::parse_complex;

pub fn parse_dims(s: &str) -> Result<BipartiteDims, CliError> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| CliError::input(format!("dims \"{s}\" must look like 2x3")))?;
    let num = |t: &str| {
        t.trim().parse::<usize>().map_err(|_| {
            CliError::input(format!("dims \"{s}\": \"{t}\" is not a positive integer"))
        })
    };
    BipartiteDims::new(num(a)?, num(b)?).map_err(|e| CliError::input(format!("dims \"{s}\": {e}")))
}

/// One environment state to probe, with a label and its great-circle angle
/// when it has one.
#[derive(Clone, Debug)]
pub struct XiPoint {
    pub label: String,
    pub theta: Option<f64>,
    pub state: PureState,
}

/// Resolves an environment-state spec on a `db`-dimensional system.
///
/// Accepted forms: a basis index `k`; `+`, `-`, `+i`, `-i` for
/// `(|0⟩ ± |1⟩)/√2` and `(|0⟩ ± i|1⟩)/√2`; `theta:<rad>` for
/// `cos θ|0⟩ + sin θ|1⟩`; `scan:<N>` for `N` points with `θ_k = kπ/(N−1)`;
/// or a JSON vector literal of reals or `[re, im]` pairs, normalized.
pub fn parse_xi(spec: &str, db: usize) -> Result<Vec<XiPoint>, CliError> {
    let s = spec.trim();
    let bad = |e: qlocal::Error| CliError::input(format!("xi \"{s}\": {e}"));
    let single = |state, theta| {
        Ok(vec![XiPoint {
            label: s.to_string(),
            theta,
            state,
        }])
    };
    if let Ok(k) = s.parse::<usize>() {
        return single(PureState::basis(db, k).map_err(bad)?, None);
    }
    let phase = match s {
        "+" => Some(C64::new(1.0, 0.0)),
        "-" => Some(C64::new(-1.0, 0.0)),
        "+i" => Some(C64::i()),
        "-i" => Some(-C64::i()),
        _ => None,
    };
    if let Some(p) = phase {
        return single(PureState::superposition(db, 0, 1, p).map_err(bad)?, None);
    }
    if let Some(t) = s.strip_prefix("theta:") {
        let theta: f64 = t
            .parse()
            .map_err(|_| CliError::input(format!("xi \"{s}\": angle is not a number")))?;
        return single(
            PureState::great_circle(db, theta).map_err(bad)?,
            Some(theta),
        );
    }
    if let Some(n) = s.strip_prefix("scan:") {
        let n: usize =
            n.parse().ok().filter(|&n| n >= 2).ok_or_else(|| {
                CliError::input(format!("xi \"{s}\": scan needs an integer N >= 2"))
            })?;
        return (0..n)
            .map(|k| {
                let theta = k as f64 * PI / (n - 1) as f64;
                Ok(XiPoint {
                    label: format!("scan[{k}]"),
                    theta: Some(theta),
                    state: PureState::great_circle(db, theta).map_err(bad)?,
                })
            })
            .collect();
    }
    if s.starts_with('[') {
        let v: Value = serde_json::from_str(s)
            .map_err(|e| CliError::input(format!("xi \"{s}\": invalid vector literal: {e}")))?;
        let entries = v
            .as_array()
            .ok_or_else(|| CliError::input(format!("xi \"{s}\": expected an array")))?;
        let amps = entries
            .iter()
            .enumerate()
            .map(|(i, e)| parse_complex(e, &format!("xi entry {i}")))
            .collect::<Result<Vec<_>, _>>()?;
        if amps.len() != db {
            return Err(CliError::input(format!(
                "xi \"{s}\": vector has {} entries, environment dimension is {db}",
                amps.len()
            )));
        }
        return single(PureState::normalized(amps).map_err(bad)?, None);
    }
    Err(CliError::input(format!(
        "xi \"{s}\": expected a basis index, +, -, +i, -i, theta:<rad>, scan:<N> or a vector literal"
    )))
}

/// Comma-separated gate names, e.g. `I,X`.
pub fn parse_unitaries(s: &str) -> Result<Vec<CMatrix>, CliError> {
    s.split(',')
        .map(|name| {
            let name = name.trim();
            named_gate(name).ok_or_else(|| {
                CliError::input(format!(
                    "unknown gate \"{name}\" (known: I, X, Y, Z, H, S, T)"
                ))
            })
        })
        .collect()
}
