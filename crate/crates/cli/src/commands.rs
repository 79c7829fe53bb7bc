use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use qlocal::channels::{is_unitary, kraus_from_choi, unitarity_probe};
use qlocal::dilation::{minimal_dilation, stinespring_from_kraus};
use qlocal::gallery::{
    completely_depolarizing, controlled_channel, orthogonal_cloner_unitary, random_channel,
    random_product_channel, swap_unitary,
};
use qlocal::locality::{restrict, theorem1_factorize, theorem2_check, theorem3_factorize};
use qlocal::{BipartiteDims, CMatrix, Channel, Exec, PipelineConfig, VerdictReport};
use serde_json::{json, Map, Value};

use crate::error::CliError;
use crate::format::{
    choi_frobenius, matrix_to_value, to_json_string, vector_to_value, ChannelFile, Kind,
    CONVERT_RANK_TOL, ROUNDTRIP_TOL,
};
use crate::report::{PointDto, Report, VerdictDto};
use crate::spec::{parse_dims, parse_unitaries, parse_xi, XiPoint};

/// Options shared by the reporting commands.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub tol: f64,
    pub seed: u64,
    pub trials: usize,
    pub report: Option<PathBuf>,
    pub omit_timing: bool,
    pub exec: Exec,
}

impl RunOptions {
    fn pipeline(&self) -> PipelineConfig {
        PipelineConfig::default()
            .with_tol(self.tol)
            .with_seed(self.seed)
            .with_probes(self.trials)
            .with_exec(self.exec)
    }
}

fn read_channel(path: &Path) -> Result<(ChannelFile, Channel), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let file = ChannelFile::parse(&text).map_err(|e| match e {
        CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
        other => other,
    })?;
    let channel = file.to_channel()?;
    Ok((file, channel))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text)
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

fn resolve_dims(file: &ChannelFile, flag: Option<&str>) -> Result<BipartiteDims, CliError> {
    let dims = match flag {
        Some(s) => parse_dims(s)?,
        None => file.dims.bipartite().ok_or_else(|| {
            CliError::input("bipartite dims needed: pass --dims dAxdB or set dims.dA/dB")
        })?,
    };
    if dims.total() != file.dims.din || file.dims.din != file.dims.dout {
        return Err(CliError::input(format!(
            "dims {}x{} do not match a {}->{} channel",
            dims.da, dims.db, file.dims.din, file.dims.dout
        )));
    }
    Ok(dims)
}

fn dims_label(d: BipartiteDims) -> String {
    format!("{}x{}", d.da, d.db)
}

fn validate_tol(tol: f64) -> Result<(), CliError> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(CliError::input(format!(
            "--tol must be a positive number, got {tol}"
        )))
    }
}

fn emit(report: &Report, path: Option<&Path>) -> Result<(), CliError> {
    let text = to_json_string(report);
    match path {
        Some(p) => {
            write_text(p, &text)?;
            eprintln!("{}: {}", report.command, report.verdict.premise_status);
        }
        None => print!("{text}"),
    }
    match &report.verdict.alarm {
        Some(a) => Err(CliError::Alarm(a.clone())),
        None => Ok(()),
    }
}

fn finish(
    command: String,
    inputs: Value,
    opts: &RunOptions,
    verdict: VerdictDto,
    points: Option<Vec<PointDto>>,
    started: Instant,
) -> Result<(), CliError> {
    let runtime_ms = (!opts.omit_timing).then(|| started.elapsed().as_secs_f64() * 1e3);
    let report = Report {
        command,
        inputs,
        tolerance: opts.tol,
        seed: opts.seed,
        residuals: verdict.residual_map(),
        verdict,
        points,
        runtime_ms,
    };
    emit(&report, opts.report.as_deref())
}

/// Converts to `target`, preferring the representation already present.
fn convert_channel(
    channel: &Channel,
    source: Kind,
    target: Kind,
    tol: f64,
    dims: Option<BipartiteDims>,
) -> Result<ChannelFile, CliError> {
    Ok(match target {
        Kind::Choi => ChannelFile::from_choi(channel.choi(), dims),
        Kind::Kraus => {
            let k = if source == Kind::Choi {
                kraus_from_choi(channel.choi(), CONVERT_RANK_TOL)
                    .map_err(CliError::from_pipeline)?
            } else {
                channel.kraus().clone()
            };
            ChannelFile::from_kraus(&k, dims)
        }
        Kind::Stinespring => {
            let s = if source == Kind::Kraus {
                stinespring_from_kraus(channel.kraus())
            } else {
                minimal_dilation(channel, CONVERT_RANK_TOL).map_err(CliError::from_pipeline)?
            };
            ChannelFile::from_stinespring(&s, dims)
        }
        Kind::Unitary => {
            let u = is_unitary(channel, tol).ok_or_else(|| {
                let p = unitarity_probe(channel, tol);
                CliError::Numerical(format!(
                    "channel is not unitary: Choi second eigenvalue ratio {:.3e} exceeds {tol:.1e}",
                    p.second_ratio
                ))
            })?;
            ChannelFile::from_unitary(&u, dims)
        }
    })
}

pub fn run_convert(input: &Path, output: &Path, target: &str, tol: f64) -> Result<(), CliError> {
    validate_tol(tol)?;
    let target = Kind::parse(target).ok_or_else(|| {
        CliError::input(format!(
            "unknown target kind \"{target}\" (kraus, choi, unitary, stinespring)"
        ))
    })?;
    let (file, channel) = read_channel(input)?;
    let dims = file.dims.bipartite();
    let mut out = convert_channel(&channel, file.kind, target, tol, dims)?;

    let converted = out
        .to_channel()
        .map_err(|e| CliError::Alarm(format!("converted file is invalid: {e}")))?;
    let back = convert_channel(&converted, target, file.kind, tol, dims)
        .and_then(|f| f.to_channel())
        .map_err(|e| CliError::Alarm(format!("reverse conversion failed: {e}")))?;
    let roundtrip = choi_frobenius(&channel, &back);

    out.metadata = file.metadata.clone();
    out.metadata.insert(
        "converted_from".into(),
        Value::String(file.kind.as_str().into()),
    );
    out.metadata
        .insert("roundtrip_choi_distance".into(), json!(roundtrip));
    write_text(output, &to_json_string(&out.to_value()))?;
    if roundtrip > ROUNDTRIP_TOL {
        return Err(CliError::Alarm(format!(
            "round trip {} -> {} -> {} drifted by {roundtrip:.3e} in Choi norm",
            file.kind.as_str(),
            target.as_str(),
            file.kind.as_str()
        )));
    }
    Ok(())
}

fn collect_points(specs: &[String], db: usize) -> Result<Vec<XiPoint>, CliError> {
    let mut points = Vec::new();
    for s in specs {
        points.extend(parse_xi(s, db)?);
    }
    Ok(points)
}

pub fn run_analyze(
    input: &Path,
    dims_flag: Option<&str>,
    xi_specs: &[String],
    opts: &RunOptions,
) -> Result<(), CliError> {
    let started = Instant::now();
    validate_tol(opts.tol)?;
    let (file, channel) = read_channel(input)?;
    let dims = resolve_dims(&file, dims_flag)?;
    if xi_specs.is_empty() {
        return Err(CliError::input("analyze needs at least one --xi"));
    }
    let points = collect_points(xi_specs, dims.db)?;
    let cfg = opts.pipeline();

    let mut verdicts: Vec<(String, VerdictReport)> = Vec::with_capacity(points.len());
    let mut dtos = Vec::with_capacity(points.len());
    for p in &points {
        let r = restrict(&channel, &p.state, dims).map_err(CliError::from_pipeline)?;
        let probe = unitarity_probe(&r, opts.tol);
        let verdict =
            theorem1_factorize(&channel, &p.state, dims, &cfg).map_err(CliError::from_pipeline)?;
        dtos.push(PointDto {
            label: p.label.clone(),
            theta: p.theta,
            xi: vector_to_value(p.state.amplitudes()),
            restriction_choi_spectrum: probe.spectrum,
            unitary: probe.unitary.as_ref().map(matrix_to_value),
            verdict: VerdictDto::from_report(&verdict),
        });
        verdicts.push((p.label.clone(), verdict));
    }
    let inputs = json!({
        "channel": input.display().to_string(),
        "dims": dims_label(dims),
        "xi": xi_specs,
        "trials": opts.trials,
    });
    let verdict = VerdictDto::aggregate(&verdicts, opts.tol);
    finish("analyze".into(), inputs, opts, verdict, Some(dtos), started)
}

pub fn run_verify(
    theorem: u8,
    input: &Path,
    dims_flag: Option<&str>,
    xi_specs: &[String],
    opts: &RunOptions,
) -> Result<(), CliError> {
    let started = Instant::now();
    validate_tol(opts.tol)?;
    let (file, channel) = read_channel(input)?;
    let dims = resolve_dims(&file, dims_flag)?;
    let cfg = opts.pipeline();
    let points = collect_points(xi_specs, dims.db)?;
    let report = match (theorem, points.as_slice()) {
        (1, [xi]) => theorem1_factorize(&channel, &xi.state, dims, &cfg),
        (1, _) => {
            return Err(CliError::input(
                "verify 1 needs exactly one environment state via --xi",
            ))
        }
        (2, [xi1, xi2]) => theorem2_check(&channel, &xi1.state, &xi2.state, dims, opts.tol),
        (2, _) => {
            return Err(CliError::input(
                "verify 2 needs exactly two environment states via --xi",
            ))
        }
        (3, []) => theorem3_factorize(&channel, dims, &cfg),
        (3, _) => return Err(CliError::input("verify 3 takes no --xi")),
        _ => {
            return Err(CliError::input(format!(
                "unknown theorem {theorem} (expected 1, 2 or 3)"
            )))
        }
    }
    .map_err(CliError::from_pipeline)?;
    let inputs = json!({
        "theorem": theorem,
        "channel": input.display().to_string(),
        "dims": dims_label(dims),
        "xi": xi_specs,
        "trials": opts.trials,
    });
    finish(
        format!("verify {theorem}"),
        inputs,
        opts,
        VerdictDto::from_report(&report),
        None,
        started,
    )
}

/// Parameters accepted by `generate`; each generator reads the ones it needs.
#[derive(Clone, Debug, Default)]
pub struct GenerateParams {
    pub d: Option<usize>,
    pub unitaries: Option<String>,
    pub din: Option<usize>,
    pub dout: Option<usize>,
    pub denv: Option<usize>,
    pub da: Option<usize>,
    pub db: Option<usize>,
    pub dims: Option<String>,
    pub seed: u64,
}

fn need(v: Option<usize>, flag: &str, name: &str) -> Result<usize, CliError> {
    v.filter(|&x| x > 0)
        .ok_or_else(|| CliError::input(format!("generate {name} needs a positive --{flag}")))
}

fn attach_dims(file: &mut ChannelFile, dims: Option<&str>) -> Result<(), CliError> {
    if let Some(s) = dims {
        let d = parse_dims(s)?;
        if d.total() != file.dims.din || file.dims.din != file.dims.dout {
            return Err(CliError::input(format!(
                "--dims {s} does not fit a {}->{} channel",
                file.dims.din, file.dims.dout
            )));
        }
        file.dims = file.dims.with_bipartite(Some(d));
    }
    Ok(())
}

pub fn build_gallery(name: &str, p: &GenerateParams) -> Result<ChannelFile, CliError> {
    let bad = |e: qlocal::Error| CliError::input(format!("generate {name}: {e}"));
    let square = |d: usize| BipartiteDims::new(d, d).ok();
    let mut params = Map::new();
    let mut file = match name {
        "identity" => {
            let d = match (&p.dims, p.d) {
                (Some(s), _) => parse_dims(s)?.total(),
                (None, d) => need(d, "d", name)?,
            };
            params.insert("d".into(), json!(d));
            ChannelFile::from_unitary(&CMatrix::identity(d), None)
        }
        "controlled" => {
            let spec = p.unitaries.as_deref().unwrap_or("I,X");
            let us = parse_unitaries(spec)?;
            let n = controlled_channel(&us).map_err(bad)?;
            params.insert("unitaries".into(), json!(spec));
            ChannelFile::from_kraus(n.kraus(), BipartiteDims::new(us[0].rows(), us.len()).ok())
        }
        "orthogonal-cloner" => {
            let d = p.d.unwrap_or(2);
            params.insert("d".into(), json!(d));
            ChannelFile::from_unitary(&orthogonal_cloner_unitary(d).map_err(bad)?, square(d))
        }
        "swap" => {
            let d = need(p.d, "d", name)?;
            params.insert("d".into(), json!(d));
            ChannelFile::from_unitary(&swap_unitary(d), square(d))
        }
        "depolarizing" => {
            let d = match (&p.dims, p.d) {
                (Some(s), _) => parse_dims(s)?.total(),
                (None, d) => need(d, "d", name)?,
            };
            params.insert("d".into(), json!(d));
            ChannelFile::from_kraus(completely_depolarizing(d).kraus(), None)
        }
        "random" => {
            let din = need(p.din, "din", name)?;
            let dout = need(p.dout, "dout", name)?;
            let denv = need(p.denv, "denv", name)?;
            let n = random_channel(din, dout, denv, p.seed).map_err(bad)?;
            params.insert("din".into(), json!(din));
            params.insert("dout".into(), json!(dout));
            params.insert("denv".into(), json!(denv));
            params.insert("seed".into(), json!(p.seed));
            ChannelFile::from_stinespring(n.stinespring(), None)
        }
        "product" => {
            let da = need(p.da, "da", name)?;
            let db = need(p.db, "db", name)?;
            let denv = p.denv.unwrap_or(db);
            let pc = random_product_channel(da, db, denv, p.seed).map_err(bad)?;
            params.insert("dA".into(), json!(da));
            params.insert("dB".into(), json!(db));
            params.insert("denv".into(), json!(denv));
            params.insert("seed".into(), json!(p.seed));
            ChannelFile::from_kraus(pc.channel.kraus(), BipartiteDims::new(da, db).ok())
        }
        other => {
            return Err(CliError::input(format!(
            "unknown gallery channel \"{other}\" (identity, controlled, orthogonal-cloner, swap, \
                 depolarizing, random, product)"
        )))
        }
    };
    if file.dims.da.is_none() {
        attach_dims(&mut file, p.dims.as_deref())?;
    }
    let mut generator = Map::new();
    generator.insert("name".into(), json!(name));
    generator.insert("parameters".into(), Value::Object(params));
    file.metadata
        .insert("generator".into(), Value::Object(generator));
    Ok(file)
}

pub fn run_generate(name: &str, params: &GenerateParams, out: &Path) -> Result<(), CliError> {
    let file = build_gallery(name, params)?;
    write_text(out, &to_json_string(&file.to_value()))
}
