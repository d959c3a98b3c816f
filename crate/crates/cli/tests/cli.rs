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

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const RUNNING_RULES: &str = r#"{"lhs":[{"attr":"age","value":"44-53"},{"attr":"hours-per-week","value":"40-50"},{"attr":"relationship","value":"unmarried"}],"rhs":[{"attr":"income","value":">=50K"}],"support":0.2,"lift":5.25,"score":1.05}
{"lhs":[{"attr":"age","value":"44-53"},{"attr":"hours-per-week","value":"40-50"}],"rhs":[{"attr":"income","value":">=50K"}],"support":0.25,"lift":4.08,"score":1.02}
{"lhs":[{"attr":"income","value":"<50K"}],"rhs":[{"attr":"age","value":"31-44"}],"support":0.43,"lift":2.44,"score":1.05}
{"lhs":[{"attr":"income","value":"<50K"}],"rhs":[{"attr":"age","value":"31-44"},{"attr":"relationship","value":"unmarried"}],"support":0.21,"lift":3.33,"score":0.70}
"#;

const PEOPLE: &str = "\
age,hours-per-week,income,relationship
44-53,40-50,>=50K,unmarried
44-53,40-50,>=50K,married
31-44,40-50,<50K,unmarried
31-44,10-20,<50K,unmarried
31-44,10-20,<50K,married
";

const NUMERIC: &str = "\
age,hours,sex
25,40,m
38,50,f
52,45,m
46,40,f
33,20,m
61,60,f
29,40,m
44,38,f
";

fn sharq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sharq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exact_scores_of_the_running_example() {
    let dir = tempfile::tempdir().unwrap();
    let rules = fixture(dir.path(), "rules.jsonl", RUNNING_RULES);
    let text = stdout(&sharq(&[
        "score",
        "--rules",
        s(&rules),
        "--method",
        "exact",
    ]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "rank,attribute,value,score");
    assert_eq!(lines.len(), 7);
    assert!(lines[6].starts_with("6,relationship,unmarried,"));
    let top: Vec<&str> = lines[1..3]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(top, ["age", "income"]);
    let score = |l: &str| l.rsplit(',').next().unwrap().to_string();
    assert_eq!(score(lines[1]), score(lines[2]));
}

#[test]
fn single_element_matches_all() {
    let dir = tempfile::tempdir().unwrap();
    let rules = fixture(dir.path(), "rules.jsonl", RUNNING_RULES);
    let all = stdout(&sharq(&["score", "--rules", s(&rules)]));
    let one = stdout(&sharq(&[
        "score",
        "--rules",
        s(&rules),
        "--elements",
        "age=31-44",
    ]));
    let row = one.lines().nth(1).unwrap();
    let value = row.rsplit(',').next().unwrap();
    assert!(all
        .lines()
        .any(|l| l.contains("age,31-44") && l.ends_with(value)));
}

#[test]
fn sampling_with_exhaustive_budget_equals_exact() {
    let dir = tempfile::tempdir().unwrap();
    let rules = fixture(dir.path(), "rules.jsonl", RUNNING_RULES);
    let exact = stdout(&sharq(&[
        "score",
        "--rules",
        s(&rules),
        "--method",
        "exact",
    ]));
    for method in ["kernel", "mc", "antithetic", "stratified", "sobol", "naive"] {
        let got = stdout(&sharq(&[
            "score",
            "--rules",
            s(&rules),
            "--method",
            method,
            "--budget",
            "1000000",
        ]));
        assert_eq!(got, exact, "{method}");
    }
}

#[test]
fn naive_over_budget_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let rules = fixture(dir.path(), "rules.jsonl", RUNNING_RULES);
    let out = sharq(&[
        "score",
        "--rules",
        s(&rules),
        "--method",
        "naive",
        "--oracle-budget",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("needs 12 coalitions"), "{err}");
}

#[test]
fn itop_baseline_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let rules = fixture(dir.path(), "rules.jsonl", RUNNING_RULES);
    let text = stdout(&sharq(&[
        "baseline",
        "--rules",
        s(&rules),
        "--method",
        "itop",
    ]));
    assert_eq!(text.lines().count(), 7);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",1.05")));
    let infl = stdout(&sharq(&[
        "baseline",
        "--rules",
        s(&rules),
        "--method",
        "influence",
    ]));
    assert!(infl.lines().skip(1).all(|l| l.ends_with(",0")));
}

#[test]
fn reports() {
    let dir = tempfile::tempdir().unwrap();
    let rules = fixture(dir.path(), "rules.jsonl", RUNNING_RULES);
    let data = fixture(dir.path(), "people.csv", PEOPLE);
    let base = ["--rules", s(&rules), "--data", s(&data)];

    let mut args = vec!["report", "elements"];
    args.extend(base);
    let text = stdout(&sharq(&args));
    assert_eq!(
        text.lines().next().unwrap(),
        "attribute,value,sharq,normalized_sharq,freq_pct,n_rules_low,n_rules_med,n_rules_high"
    );
    assert_eq!(text.lines().count(), 7);
    let e1 = text
        .lines()
        .find(|l| l.starts_with("relationship,unmarried,"))
        .unwrap();
    let counts: usize = e1
        .split(',')
        .skip(5)
        .map(|c| c.parse::<usize>().unwrap())
        .sum();
    assert_eq!(counts, 2);

    let mut args = vec!["report", "rules"];
    args.extend(base);
    let all = stdout(&sharq(&args));
    assert_eq!(
        all.lines().next().unwrap(),
        "rule_id,score,r_sharq,min_element"
    );
    assert_eq!(all.lines().count(), 5);
    let r_sharq: Vec<f64> = all
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    let cut = r_sharq.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let kept = dir.path().join("kept.jsonl");
    let cut_s = cut.to_string();
    args.extend(["--prune", &cut_s, "--pruned-rules", s(&kept)]);
    let pruned = stdout(&sharq(&args));
    let expected = r_sharq.iter().filter(|&&r| r >= cut).count();
    assert_eq!(pruned.lines().count(), expected + 1);
    assert_eq!(
        std::fs::read_to_string(&kept).unwrap().lines().count(),
        expected
    );

    let mut args = vec!["report", "attributes"];
    args.extend(base);
    let attrs = stdout(&sharq(&args));
    assert_eq!(
        attrs.lines().next().unwrap(),
        "attribute,a_sharq,n_participating"
    );
    assert_eq!(attrs.lines().count(), 5);
}

#[test]
fn mining_is_deterministic_and_validates_bins() {
    let dir = tempfile::tempdir().unwrap();
    let data = fixture(dir.path(), "numeric.csv", NUMERIC);
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    let run = |out: &Path| {
        sharq(&[
            "mine",
            "--input",
            s(&data),
            "--sample",
            "6",
            "--bins",
            "2",
            "--support",
            "0.2",
            "--lift-threshold",
            "1.05",
            "--seed",
            "3",
            "--output",
            s(out),
        ])
    };
    assert!(run(&a).status.success());
    assert!(run(&b).status.success());
    let text = std::fs::read_to_string(&a).unwrap();
    assert!(!text.is_empty());
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(text
        .lines()
        .all(|l| l.contains("\"support\"") && l.contains("\"score\"")));

    let bad = dir.path().join("bad.jsonl");
    let out = sharq(&[
        "mine",
        "--input",
        s(&data),
        "--bins",
        "1",
        "--output",
        s(&bad),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!bad.exists());
}

#[test]
fn data_errors_exit_3_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let bad = fixture(dir.path(), "bad.jsonl", "{\"lhs\": []}\n");
    let out_path = dir.path().join("scores.csv");
    let out = sharq(&["score", "--rules", s(&bad), "--output", s(&out_path)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out_path.exists());
    let missing = sharq(&["score", "--rules", s(&dir.path().join("nope.jsonl"))]);
    assert_eq!(missing.status.code(), Some(3));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let rules = fixture(dir.path(), "rules.jsonl", RUNNING_RULES);
    let conf = fixture(
        dir.path(),
        "run.conf",
        &format!(
            "# scoring defaults\nrules={}\nmethod=naive\noracle_budget=5\n",
            s(&rules)
        ),
    );
    let refused = sharq(&["score", "--config", s(&conf)]);
    assert_eq!(refused.status.code(), Some(4));
    let ok = sharq(&["score", "--config", s(&conf), "--method", "exact"]);
    assert_eq!(stdout(&ok).lines().count(), 7);
    let broken = fixture(dir.path(), "broken.conf", "method\n");
    assert_eq!(
        sharq(&["score", "--config", s(&broken)]).status.code(),
        Some(2)
    );
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench");
    let one = sharq(&[
        "bench",
        "--suite",
        "ablation",
        "--instances",
        "1",
        "--n-rules",
        "300",
        "--tau",
        "3",
        "--out",
        s(&out),
        "--threads",
        "1",
    ]);
    stdout(&one);
    let first = std::fs::read_to_string(out.join("ablation.csv")).unwrap();
    let four = sharq(&[
        "bench",
        "--suite",
        "ablation",
        "--instances",
        "1",
        "--n-rules",
        "300",
        "--tau",
        "3",
        "--out",
        s(&out),
        "--threads",
        "4",
    ]);
    stdout(&four);
    assert_eq!(
        std::fs::read_to_string(out.join("ablation.csv")).unwrap(),
        first
    );
    assert_eq!(
        first.lines().next().unwrap(),
        "instance,reference,variant,spearman"
    );
}

#[test]
fn bench_suites_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    for (suite, file, header) in [
        (
            "coalitions",
            "coalitions.csv",
            "instance,attribute,value,naive_count",
        ),
        (
            "runtime",
            "runtime.csv",
            "instance,n_elements,n_rules,tau,sequential_s",
        ),
        (
            "approx",
            "approx.csv",
            "instance,scheme,budget_fraction,spearman",
        ),
    ] {
        let out = sharq(&[
            "bench",
            "--suite",
            suite,
            "--instances",
            "2",
            "--attributes",
            "5",
            "--n-rules",
            "100",
            "--tau",
            "3",
            "--repeats",
            "1",
            "--seed",
            "4",
            "--out",
            s(dir.path()),
        ]);
        stdout(&out);
        let text = std::fs::read_to_string(dir.path().join(file)).unwrap();
        assert!(text.starts_with(header), "{suite}: {text}");
        assert!(text.lines().count() > 2);
    }
}
