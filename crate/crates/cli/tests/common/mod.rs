#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jsonschema::{Resource, Validator};
use serde_json::Value;

pub const BIN: &str = env!("CARGO_BIN_EXE_qlocal");

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schema")
}

fn load(name: &str) -> Value {
    let text = std::fs::read_to_string(schema_dir().join(name)).expect("schema file");
    serde_json::from_str(&text).expect("schema is JSON")
}

pub struct Schemas {
    pub report: Validator,
    pub channel_file: Validator,
}

impl Schemas {
    pub fn load() -> Self {
        let channel = load("channel_file.schema.json");
        let id = channel["$id"].as_str().expect("$id").to_string();
        let report = jsonschema::options()
            .with_resource(
                id,
                Resource::from_contents(channel.clone()).expect("resource"),
            )
            .build(&load("report.schema.json"))
            .expect("report schema compiles");
        let channel_file = jsonschema::validator_for(&channel).expect("channel schema compiles");
        Self {
            report,
            channel_file,
        }
    }

    pub fn check_report(&self, v: &Value) -> Result<(), String> {
        errors(&self.report, v)
    }

    pub fn check_channel(&self, v: &Value) -> Result<(), String> {
        errors(&self.channel_file, v)
    }
}

fn errors(validator: &Validator, v: &Value) -> Result<(), String> {
    let msgs: Vec<String> = validator
        .iter_errors(v)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect();
    if msgs.is_empty() {
        Ok(())
    } else {
        Err(msgs.join("; "))
    }
}

pub fn qlocal(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn qlocal")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

pub fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).expect("read output"))
        .expect("output is JSON")
}
