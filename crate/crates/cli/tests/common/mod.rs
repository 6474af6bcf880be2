#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

pub struct Run {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_pascal-spiral")).args(args).output().expect("binary runs");
    Run {
        status: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
    }
}

pub fn schema_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/schema").join(format!("{name}.json"))
}

/// Validation messages of `instance` against the shipped schema `name`.
pub fn schema_errors(name: &str, instance: &Value) -> Vec<String> {
    let text = std::fs::read_to_string(schema_path(name)).expect("schema file");
    let schema: Value = serde_json::from_str(&text).expect("schema json");
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    let result = match compiled.validate(instance) {
        Ok(()) => Vec::new(),
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    result
}

/// Header and records of an RFC-4180 document.
pub fn csv_table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(text.as_bytes());
    let header = reader.headers().expect("csv header").iter().map(str::to_owned).collect();
    let rows = reader.records().map(|r| r.expect("csv record").iter().map(str::to_owned).collect()).collect();
    (header, rows)
}
