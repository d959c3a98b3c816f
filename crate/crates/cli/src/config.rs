// Copyright 2026 The SHARQ Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! `--config FILE` support: each `key=value` line becomes `--key value` unless
//! the flag was given on the command line.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::Path;

use sharq::{Result, SharqError};

pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            SharqError::Config(format!(
                "config line {}: expected key=value, got {line:?}",
                n + 1
            ))
        })?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(SharqError::Config(format!(
                "config line {}: invalid key",
                n + 1
            )));
        }
        pairs.push((key, value.trim().to_string()));
    }
    Ok(pairs)
}

fn config_path(argv: &[OsString]) -> Result<Option<OsString>> {
    let mut iter = argv.iter();
    while let Some(arg) = iter.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            return iter
                .next()
                .cloned()
                .map(Some)
                .ok_or_else(|| SharqError::Config("--config needs a file".into()));
        }
        if let Some(path) = s.strip_prefix("--config=") {
            return Ok(Some(path.into()));
        }
    }
    Ok(None)
}

pub fn merge_config(mut argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&argv)? else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(Path::new(&path)).map_err(|e| {
        SharqError::Config(format!(
            "cannot read config {}: {e}",
            Path::new(&path).display()
        ))
    })?;
    let given: BTreeSet<String> = argv
        .iter()
        .filter_map(|a| a.to_str())
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();
    for (key, value) in parse_config(&text)? {
        if given.contains(&key) {
            continue;
        }
        argv.push(format!("--{key}={value}").into());
    }
    Ok(argv)
}
