use std::path::Path;
use std::process::{Command, Output};

fn qsd(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsd"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("qsd runs")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

const BLOBS: &[&str] = &[
    "generate",
    "--generator",
    "blobs",
    "--centers",
    "0,0;5,5",
    "--spread",
    "0.5",
    "--seed",
    "7",
    "--output",
    "blobs.csv",
];

#[test]
fn sweep_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    ok(&qsd(dir.path(), BLOBS));
    for (out, format) in [
        ("a.json", "json"),
        ("b.json", "json"),
        ("a.csv", "csv"),
        ("b.csv", "csv"),
    ] {
        ok(&qsd(
            dir.path(),
            &[
                "sweep",
                "--input",
                "blobs.csv",
                "--label-column",
                "label",
                "--classifier",
                "helstrom",
                "--copies",
                "1..3",
                "--seed",
                "11",
                "--scale",
                "minmax",
                "--output",
                out,
                "--format",
                format,
            ],
        ));
    }
    let read = |n: &str| std::fs::read(dir.path().join(n)).unwrap();
    assert_eq!(read("a.json"), read("b.json"));
    assert_eq!(read("a.csv"), read("b.csv"));
    let json: serde_json::Value = serde_json::from_slice(&read("a.json")).unwrap();
    assert_eq!(json["schema"], "qsd-result/1");
    assert_eq!(json["records"].as_array().unwrap().len(), 3);
    assert_eq!(json["dataset"]["m"], 100);
    assert_eq!(json["config"]["seed"], 11);
}

#[test]
fn generated_data_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    ok(&qsd(
        dir.path(),
        &[
            "generate",
            "--generator",
            "diagonal2x2",
            "--seed",
            "3",
            "--output",
            "x.csv",
        ],
    ));
    ok(&qsd(
        dir.path(),
        &[
            "generate",
            "--generator",
            "diagonal2x2",
            "--seed",
            "3",
            "--output",
            "y.csv",
        ],
    ));
    let x = std::fs::read_to_string(dir.path().join("x.csv")).unwrap();
    assert_eq!(
        x,
        std::fs::read_to_string(dir.path().join("y.csv")).unwrap()
    );
    assert_eq!(x.lines().count(), 5);
}

#[test]
fn train_predict_evaluate_with_header_label_column() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("d.csv"),
        "kind,x,y\ncat,0.1,0.2\ndog,4.9,5.1\ncat,-0.2,0.1\ndog,5.2,4.8\n",
    )
    .unwrap();
    ok(&qsd(
        dir.path(),
        &[
            "train",
            "--input",
            "d.csv",
            "--label-column",
            "kind",
            "--classifier",
            "helstrom",
            "--copies",
            "2",
            "--output",
            "m.json",
        ],
    ));
    let out = qsd(
        dir.path(),
        &[
            "predict",
            "--model",
            "m.json",
            "--input",
            "d.csv",
            "--label-column",
            "kind",
        ],
    );
    ok(&out);
    let text = String::from_utf8(out.stdout).unwrap();
    let labels: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(labels, ["cat", "dog", "cat", "dog"]);
    assert!(text.starts_with("row,label,score_cat,score_dog\n"));

    let out = qsd(
        dir.path(),
        &[
            "evaluate",
            "--model",
            "m.json",
            "--input",
            "d.csv",
            "--label-column",
            "kind",
        ],
    );
    ok(&out);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["balanced_accuracy"], 1.0);
    assert_eq!(v["classes"][1], "dog");
}

#[test]
fn study_reports_pearson() {
    let dir = tempfile::tempdir().unwrap();
    let out = qsd(
        dir.path(),
        &[
            "study",
            "--synthetic",
            "10",
            "--seed",
            "2",
            "--output",
            "s.json",
        ],
    );
    ok(&out);
    let v: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("s.json")).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 10);
    let p = v["pearson"].as_f64().unwrap();
    assert!((-1.0..=1.0).contains(&p));
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // usage
    assert_eq!(qsd(dir.path(), &[]).status.code(), Some(1));
    assert_eq!(
        qsd(
            dir.path(),
            &["sweep", "--input", "x.csv", "--copies", "3..1"]
        )
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        qsd(
            dir.path(),
            &[
                "sweep",
                "--input",
                "x.csv",
                "--test-fraction",
                "0.3",
                "--folds",
                "3"
            ]
        )
        .status
        .code(),
        Some(1)
    );
    assert_eq!(qsd(dir.path(), &["--help"]).status.code(), Some(0));
    // data
    assert_eq!(
        qsd(dir.path(), &["sweep", "--input", "missing.csv"])
            .status
            .code(),
        Some(2)
    );
    std::fs::write(dir.path().join("one.csv"), "1,2,a\n3,4,a\n").unwrap();
    let out = qsd(dir.path(), &["sweep", "--input", "one.csv"]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(dir.path().join("bad.csv"), "f1,f2,label\n1,2,a\n3,oops,b\n").unwrap();
    let out = qsd(dir.path(), &["sweep", "--input", "bad.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 3, column 2"));
    // helstrom on three classes
    let out = qsd(
        dir.path(),
        &[
            "sweep",
            "--generator",
            "blobs",
            "--classes",
            "3",
            "--classifier",
            "helstrom",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failed_run_leaves_existing_output_untouched() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("r.json"), "previous").unwrap();
    let out = qsd(
        dir.path(),
        &["sweep", "--input", "missing.csv", "--output", "r.json"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(
        std::fs::read_to_string(dir.path().join("r.json")).unwrap(),
        "previous"
    );
}
