//! ChannelFile codec and the JSON number formatting shared by all outputs.

use std::io;

use num_complex::Complex64 as C64;
use qlocal::channels::{choi_of, REPR_TOL};
use qlocal::{BipartiteDims, CMatrix, Channel, ChoiRepr, KrausRepr, StinespringRepr};
use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Kraus,
    Choi,
    Unitary,
    Stinespring,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Kraus => "kraus",
            Kind::Choi => "choi",
            Kind::Unitary => "unitary",
            Kind::Stinespring => "stinespring",
        }
    }

    pub fn parse(s: &str) -> Option<Kind> {
        match s {
            "kraus" => Some(Kind::Kraus),
            "choi" => Some(Kind::Choi),
            "unitary" => Some(Kind::Unitary),
            "stinespring" => Some(Kind::Stinespring),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FileDims {
    pub din: usize,
    pub dout: usize,
    #[serde(rename = "dA", skip_serializing_if = "Option::is_none")]
    pub da: Option<usize>,
    #[serde(rename = "dB", skip_serializing_if = "Option::is_none")]
    pub db: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub denv: Option<usize>,
}

impl FileDims {
    pub fn bipartite(&self) -> Option<BipartiteDims> {
        match (self.da, self.db) {
            (Some(da), Some(db)) => BipartiteDims::new(da, db).ok(),
            _ => None,
        }
    }

    pub fn with_bipartite(mut self, dims: Option<BipartiteDims>) -> Self {
        if let Some(d) = dims {
            self.da = Some(d.da);
            self.db = Some(d.db);
        }
        self
    }
}

/// A validated channel file: the parsed channel plus its declared form.
#[derive(Clone, Debug)]
pub struct ChannelFile {
    pub kind: Kind,
    pub dims: FileDims,
    pub data: Vec<CMatrix>,
    pub metadata: Map<String, Value>,
}

pub fn matrix_to_value(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(complex_to_value).collect()))
            .collect(),
    )
}

pub fn vector_to_value(v: &[C64]) -> Value {
    Value::Array(v.iter().map(complex_to_value).collect())
}

pub fn complex_to_value(z: &C64) -> Value {
    Value::Array(vec![real_to_value(z.re), real_to_value(z.im)])
}

/// Non-finite values have no JSON number form and become `null`.
pub fn real_to_value(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn parse_complex(v: &Value, at: &str) -> Result<C64, CliError> {
    match v {
        Value::Array(pair) if pair.len() == 2 => {
            let re = pair[0].as_f64();
            let im = pair[1].as_f64();
            match (re, im) {
                (Some(re), Some(im)) => Ok(C64::new(re, im)),
                _ => Err(CliError::input(format!(
                    "{at}: entries of [re, im] must be numbers"
                ))),
            }
        }
        Value::Number(n) => Ok(C64::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
        _ => Err(CliError::input(format!("{at}: expected a [re, im] pair"))),
    }
}

pub fn parse_matrix(v: &Value, name: &str) -> Result<CMatrix, CliError> {
    let rows = v
        .as_array()
        .ok_or_else(|| CliError::input(format!("{name}: expected an array of rows")))?;
    if rows.is_empty() {
        return Err(CliError::input(format!("{name}: matrix has no rows")));
    }
    let mut parsed: Vec<Vec<C64>> = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let entries = row.as_array().ok_or_else(|| {
            CliError::input(format!("{name}, row {i}: expected an array of entries"))
        })?;
        let mut out = Vec::with_capacity(entries.len());
        for (j, e) in entries.iter().enumerate() {
            out.push(parse_complex(e, &format!("{name}, row {i}, column {j}"))?);
        }
        if let Some(first) = parsed.first() {
            if out.len() != first.len() {
                return Err(CliError::input(format!(
                    "{name}, row {i}: has {} entries but row 0 has {}",
                    out.len(),
                    first.len()
                )));
            }
        }
        parsed.push(out);
    }
    CMatrix::from_rows(&parsed).map_err(|e| CliError::input(format!("{name}: {e}")))
}

fn dim_field(obj: &Map<String, Value>, key: &str) -> Result<Option<usize>, CliError> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => match v.as_u64() {
            Some(d) if d > 0 => Ok(Some(d as usize)),
            _ => Err(CliError::input(format!(
                "dims.{key} must be a positive integer"
            ))),
        },
    }
}

fn expect_shape(m: &CMatrix, name: &str, rows: usize, cols: usize) -> Result<(), CliError> {
    if m.shape() != (rows, cols) {
        return Err(CliError::input(format!(
            "{name} is {}x{}, dims require {rows}x{cols}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

impl ChannelFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let root: Value = serde_json::from_str(text)
            .map_err(|e| CliError::input(format!("invalid JSON: {e}")))?;
        let obj = root
            .as_object()
            .ok_or_else(|| CliError::input("channel file must be a JSON object"))?;
        let kind_str = obj
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| CliError::input("missing string field \"kind\""))?;
        let kind = Kind::parse(kind_str).ok_or_else(|| {
            CliError::input(format!(
                "unknown kind \"{kind_str}\" (expected kraus, choi, unitary or stinespring)"
            ))
        })?;
        let dims_obj = obj
            .get("dims")
            .and_then(Value::as_object)
            .ok_or_else(|| CliError::input("missing object field \"dims\""))?;
        let dims = FileDims {
            din: dim_field(dims_obj, "din")?
                .ok_or_else(|| CliError::input("dims.din is required"))?,
            dout: dim_field(dims_obj, "dout")?
                .ok_or_else(|| CliError::input("dims.dout is required"))?,
            da: dim_field(dims_obj, "dA")?,
            db: dim_field(dims_obj, "dB")?,
            denv: dim_field(dims_obj, "denv")?,
        };
        let data_arr = obj
            .get("data")
            .and_then(Value::as_array)
            .ok_or_else(|| CliError::input("missing array field \"data\""))?;
        let data = data_arr
            .iter()
            .enumerate()
            .map(|(k, m)| parse_matrix(m, &format!("data[{k}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let metadata = match obj.get("metadata") {
            None | Some(Value::Null) => Map::new(),
            Some(Value::Object(m)) => m.clone(),
            Some(_) => return Err(CliError::input("metadata must be an object")),
        };
        let file = ChannelFile {
            kind,
            dims,
            data,
            metadata,
        };
        file.check_dims()?;
        Ok(file)
    }

    fn check_dims(&self) -> Result<(), CliError> {
        let FileDims {
            din,
            dout,
            da,
            db,
            denv,
        } = self.dims;
        match (da, db) {
            (Some(a), Some(b)) if a * b != din || din != dout => {
                return Err(CliError::input(format!(
                    "bipartite dims violate dA*dB = din = dout: {a}*{b} vs din {din}, dout {dout}"
                )))
            }
            (Some(_), None) | (None, Some(_)) => {
                return Err(CliError::input(
                    "dims.dA and dims.dB must be given together",
                ))
            }
            _ => {}
        }
        let single = |what: &str| -> Result<&CMatrix, CliError> {
            match self.data.as_slice() {
                [m] => Ok(m),
                other => Err(CliError::input(format!(
                    "{what} file needs exactly one matrix in data, found {}",
                    other.len()
                ))),
            }
        };
        match self.kind {
            Kind::Kraus => {
                if self.data.is_empty() {
                    return Err(CliError::input("kraus file needs at least one operator"));
                }
                for (k, m) in self.data.iter().enumerate() {
                    expect_shape(m, &format!("data[{k}]"), dout, din)?;
                }
            }
            Kind::Choi => expect_shape(single("choi")?, "data[0]", dout * din, dout * din)?,
            Kind::Unitary => {
                if din != dout {
                    return Err(CliError::input("unitary file needs din = dout"));
                }
                expect_shape(single("unitary")?, "data[0]", dout, din)?;
            }
            Kind::Stinespring => {
                let denv =
                    denv.ok_or_else(|| CliError::input("stinespring file needs dims.denv"))?;
                expect_shape(single("stinespring")?, "data[0]", dout * denv, din)?;
            }
        }
        Ok(())
    }

    /// Builds the channel, enforcing the representation's invariants.
    pub fn to_channel(&self) -> Result<Channel, CliError> {
        let FileDims { din, dout, .. } = self.dims;
        let invalid = |e: qlocal::Error| {
            CliError::input(format!("{} invariant violated: {e}", self.kind.as_str()))
        };
        match self.kind {
            Kind::Kraus => KrausRepr::new(din, dout, self.data.clone())
                .map(Channel::from_kraus)
                .map_err(invalid),
            Kind::Choi => ChoiRepr::new(din, dout, self.data[0].clone())
                .map(Channel::from_choi)
                .map_err(invalid),
            Kind::Unitary => Channel::unitary(self.data[0].clone()).map_err(invalid),
            Kind::Stinespring => {
                let denv = self.dims.denv.expect("checked in parse");
                StinespringRepr::new(din, dout, denv, self.data[0].clone())
                    .map(Channel::from_stinespring)
                    .map_err(invalid)
            }
        }
    }

    pub fn from_kraus(k: &KrausRepr, bipartite: Option<BipartiteDims>) -> Self {
        Self::new(
            Kind::Kraus,
            FileDims {
                din: k.din(),
                dout: k.dout(),
                ..FileDims::default()
            }
            .with_bipartite(bipartite),
            k.operators().to_vec(),
        )
    }

    pub fn from_choi(j: &ChoiRepr, bipartite: Option<BipartiteDims>) -> Self {
        Self::new(
            Kind::Choi,
            FileDims {
                din: j.din(),
                dout: j.dout(),
                ..FileDims::default()
            }
            .with_bipartite(bipartite),
            vec![j.matrix().clone()],
        )
    }

    pub fn from_unitary(u: &CMatrix, bipartite: Option<BipartiteDims>) -> Self {
        Self::new(
            Kind::Unitary,
            FileDims {
                din: u.cols(),
                dout: u.rows(),
                ..FileDims::default()
            }
            .with_bipartite(bipartite),
            vec![u.clone()],
        )
    }

    pub fn from_stinespring(s: &StinespringRepr, bipartite: Option<BipartiteDims>) -> Self {
        Self::new(
            Kind::Stinespring,
            FileDims {
                din: s.din(),
                dout: s.dout(),
                denv: Some(s.denv()),
                ..FileDims::default()
            }
            .with_bipartite(bipartite),
            vec![s.isometry().clone()],
        )
    }

    fn new(kind: Kind, dims: FileDims, data: Vec<CMatrix>) -> Self {
        Self {
            kind,
            dims,
            data,
            metadata: Map::new(),
        }
    }

    pub fn to_value(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("kind".into(), Value::String(self.kind.as_str().into()));
        obj.insert(
            "dims".into(),
            serde_json::to_value(self.dims).expect("plain struct"),
        );
        obj.insert(
            "data".into(),
            Value::Array(self.data.iter().map(matrix_to_value).collect()),
        );
        if !self.metadata.is_empty() {
            obj.insert("metadata".into(), Value::Object(self.metadata.clone()));
        }
        Value::Object(obj)
    }
}

/// Choi-matrix Frobenius distance between two channels with equal dims.
pub fn choi_frobenius(a: &Channel, b: &Channel) -> f64 {
    choi_of(a).matrix().distance(choi_of(b).matrix())
}

/// Round-trip threshold for conversions.
pub const ROUNDTRIP_TOL: f64 = 1e-10;

/// Default relative tolerance for rank decisions in conversions.
pub const CONVERT_RANK_TOL: f64 = REPR_TOL;

/// Writes every `f64` with 17 significant digits so a reader recovers the
/// exact double. Integers keep their integer form.
struct ExactFloats;

impl Formatter for ExactFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

pub fn to_json_string(v: &impl Serialize) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloats);
    v.serialize(&mut ser)
        .expect("serializing to memory cannot fail");
    let mut s = String::from_utf8(buf).expect("serde_json writes UTF-8");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        let s = to_json_string(&serde_json::json!([0.1, 1.0 / 3.0, -2.5e-300, 7]));
        assert_eq!(
            s,
            "[1.0000000000000001e-1,3.3333333333333331e-1,-2.5000000000000000e-300,7]\n"
        );
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back[1], 1.0 / 3.0);
    }

    #[test]
    fn row_length_mismatch_names_row() {
        let text = r#"{"kind":"unitary","dims":{"din":2,"dout":2},
            "data":[[[[0,0],[1,0]],[[1,0]]]]}"#;
        let err = ChannelFile::parse(text).unwrap_err();
        assert_eq!(err.code(), 2);
        assert!(err.to_string().contains("row 1"), "{err}");
    }

    #[test]
    fn bipartite_product_must_match() {
        let text = r#"{"kind":"unitary","dims":{"din":2,"dout":2,"dA":2,"dB":2},
            "data":[[[[1,0],[0,0]],[[0,0],[1,0]]]]}"#;
        assert!(ChannelFile::parse(text)
            .unwrap_err()
            .to_string()
            .contains("dA*dB"));
    }

    #[test]
    fn codec_round_trip() {
        let u = qlocal::tensorlab::haar_unitary(3, 4);
        let f = ChannelFile::from_unitary(&u, None);
        let back = ChannelFile::parse(&to_json_string(&f.to_value())).unwrap();
        assert_eq!(back.kind, Kind::Unitary);
        assert_eq!(back.data[0], u);
    }

    #[test]
    fn invariant_violation_is_input_error() {
        let text = r#"{"kind":"kraus","dims":{"din":1,"dout":1},"data":[[[[2,0]]]]}"#;
        let err = ChannelFile::parse(text).unwrap().to_channel().unwrap_err();
        assert_eq!(err.code(), 2);
        assert!(err.to_string().contains("kraus invariant"), "{err}");
    }
}
