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

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Rule, RuleSet};
use crate::dataset::Element;
use crate::error::{Result, SharqError};

/// One line of the rules JSONL format.
#[derive(Debug, Serialize, Deserialize)]
struct RuleRecord {
    lhs: Vec<Element>,
    rhs: Vec<Element>,
    support: f64,
    lift: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    confidence: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    score: Option<f64>,
}

impl From<&Rule> for RuleRecord {
    fn from(r: &Rule) -> Self {
        RuleRecord {
            lhs: r.lhs().to_vec(),
            rhs: r.rhs().to_vec(),
            support: r.support(),
            lift: r.lift(),
            confidence: r.confidence(),
            score: r.score(),
        }
    }
}

pub fn load_rules(path: impl AsRef<Path>) -> Result<RuleSet> {
    read_rules(std::fs::File::open(path.as_ref())?)
}

/// Parses rules JSONL; blank lines are skipped and records are numbered by line.
pub fn read_rules<R: Read>(reader: R) -> Result<RuleSet> {
    let mut rules = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let record_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: RuleRecord =
            serde_json::from_str(&line).map_err(|err| SharqError::Validation {
                record: record_no,
                message: err.to_string(),
            })?;
        let invalid = |message: String| SharqError::Validation {
            record: record_no,
            message,
        };
        let mut rule = Rule::new(rec.lhs, rec.rhs, rec.support, rec.lift).map_err(invalid)?;
        if let Some(c) = rec.confidence {
            rule = rule.with_confidence(c);
        }
        if let Some(s) = rec.score {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(invalid(format!("score {s} must be a non-negative number")));
            }
            rule = rule.with_score(s);
        }
        rules.push(rule);
    }
    Ok(RuleSet::new(rules))
}

pub fn write_rules<W: Write>(rules: &RuleSet, writer: W) -> Result<()> {
    let mut out = BufWriter::new(writer);
    for r in rules.rules() {
        serde_json::to_writer(&mut out, &RuleRecord::from(r))
            .map_err(|err| SharqError::Io(err.into()))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_rules(rules: &RuleSet, path: impl AsRef<Path>) -> Result<()> {
    write_rules(rules, std::fs::File::create(path.as_ref())?)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) const RUNNING_RULES: &str = r#"{"lhs":[{"attr":"age","value":"44-53"},{"attr":"hours-per-week","value":"40-50"},{"attr":"relationship","value":"unmarried"}],"rhs":[{"attr":"income","value":">=50K"}],"support":0.2,"lift":5.25,"score":1.05}
{"lhs":[{"attr":"age","value":"44-53"},{"attr":"hours-per-week","value":"40-50"}],"rhs":[{"attr":"income","value":">=50K"}],"support":0.25,"lift":4.08,"score":1.02}
{"lhs":[{"attr":"income","value":"<50K"}],"rhs":[{"attr":"age","value":"31-44"}],"support":0.43,"lift":2.44,"score":1.05}
{"lhs":[{"attr":"income","value":"<50K"}],"rhs":[{"attr":"age","value":"31-44"},{"attr":"relationship","value":"unmarried"}],"support":0.21,"lift":3.33,"score":0.70}
"#;

    #[test]
    fn running_example_round_trip() {
        let rs = read_rules(RUNNING_RULES.as_bytes()).unwrap();
        assert_eq!(rs.len(), 4);
        assert_eq!(rs.universe().len(), 6);
        assert_eq!(rs.rules()[3].rhs().len(), 2);
        assert_eq!(rs.rules()[0].score(), Some(1.05));
        let mut buf = Vec::new();
        write_rules(&rs, &mut buf).unwrap();
        assert_eq!(read_rules(buf.as_slice()).unwrap(), rs);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rules.jsonl");
        save_rules(&rs, &path).unwrap();
        assert_eq!(load_rules(&path).unwrap(), rs);
    }

    #[test]
    fn side_order_is_irrelevant() {
        let a = r#"{"lhs":[{"attr":"b","value":"1"},{"attr":"a","value":"2"}],"rhs":[{"attr":"c","value":"3"}],"support":0.1,"lift":2}"#;
        let b = r#"{"lhs":[{"attr":"a","value":"2"},{"attr":"b","value":"1"}],"rhs":[{"attr":"c","value":"3"}],"support":0.1,"lift":2}"#;
        assert_eq!(
            read_rules(a.as_bytes()).unwrap(),
            read_rules(b.as_bytes()).unwrap()
        );
    }

    #[test]
    fn invalid_records_name_their_line() {
        let empty_lhs = "\n{\"lhs\":[],\"rhs\":[{\"attr\":\"a\",\"value\":\"1\"}],\"support\":0.1,\"lift\":1}\n";
        match read_rules(empty_lhs.as_bytes()) {
            Err(SharqError::Validation { record, .. }) => assert_eq!(record, 2),
            other => panic!("expected validation error, got {other:?}"),
        }
        let clash = r#"{"lhs":[{"attr":"age","value":"x"}],"rhs":[{"attr":"age","value":"x"}],"support":0.1,"lift":1}"#;
        assert!(matches!(
            read_rules(clash.as_bytes()),
            Err(SharqError::Validation { record: 1, .. })
        ));
        assert!(matches!(
            read_rules("not json".as_bytes()),
            Err(SharqError::Validation { record: 1, .. })
        ));
    }
}
