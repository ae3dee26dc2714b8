mod common;

use std::fs;
use std::path::Path;

use common::*;

const FILES: [&str; 7] = [
    "audit/audits.jsonl",
    "scan/opportunities.jsonl",
    "scan/runs.jsonl",
    "report/report.json",
    "report/daily_series.csv",
    "report/gains.csv",
    "report/opportunities.csv",
];

fn ok(out: std::process::Output) {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn pipeline(root: &Path) {
    let f1 = write_f1(&root.join("f1"));
    let tri = write_triangle(&root.join("tri"), &[9, 10, 11, 14]);
    let (audit, scan, report) = (root.join("audit"), root.join("scan"), root.join("report"));
    ok(run(&[
        "route-audit",
        "--events", s(&f1.join("events.jsonl")),
        "--reserves", s(&f1.join("reserves.jsonl")),
        "--prices", s(&f1.join("prices.jsonl")),
        "--blocks", s(&f1.join("blocks.jsonl")),
        "--graph", s(&f1.join("graph.json")),
        "--out", s(&audit),
    ]));
    ok(run(&[
        "arb-scan",
        "--reserves", s(&tri.join("reserves.jsonl")),
        "--prices", s(&tri.join("prices.jsonl")),
        "--blocks", s(&tri.join("blocks.jsonl")),
        "--network", "arb-uniswap-triangle",
        "--from-block", "8",
        "--to-block", "17",
        "--out", s(&scan),
    ]));
    ok(run(&[
        "report",
        "--audit-dir", s(&audit),
        "--scan-dir", s(&scan),
        "--prices", s(&tri.join("prices.jsonl")),
        "--blocks", s(&tri.join("blocks.jsonl")),
        "--out", s(&report),
    ]));
}

#[test]
fn fixture_outputs_match_golden_copies() {
    let tmp = tempfile::tempdir().unwrap();
    pipeline(tmp.path());
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    if std::env::var_os("AMMSCOPE_UPDATE_GOLDEN").is_some() {
        for f in FILES {
            let dest = golden.join(f.replace('/', "__"));
            fs::create_dir_all(dest.parent().unwrap()).unwrap();
            fs::copy(tmp.path().join(f), dest).unwrap();
        }
    }
    for f in FILES {
        let expected = read(&golden.join(f.replace('/', "__")));
        assert_eq!(String::from_utf8(read(&tmp.path().join(f))).unwrap(), String::from_utf8(expected).unwrap(), "{f}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    pipeline(a.path());
    pipeline(b.path());
    for f in FILES {
        assert_eq!(read(&a.path().join(f)), read(&b.path().join(f)), "{f}");
    }
}
