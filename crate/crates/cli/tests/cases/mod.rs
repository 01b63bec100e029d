//! Subcommand invocations with their expected exit codes, run from the
//! fixtures directory. Each has a golden output file of the same name.

use std::path::PathBuf;
use std::process::Command;

pub const CASES: &[(&str, &[&str], i32)] = &[
    ("validate_pair", &["validate", "pair.txt"], 0),
    ("validate_mono", &["validate", "mono.txt"], 2),
    ("validate_malformed", &["validate", "malformed.txt"], 1),
    (
        "amalgamate",
        &["amalgamate", "--left", "left.txt", "--right", "right.txt", "--over", "single.txt"],
        0,
    ),
    ("types_pair", &["types", "--budget", "1", "pair.txt"], 0),
    ("types_pretty", &["--format", "pretty", "types", "--budget", "2", "single.txt"], 0),
    ("k_apply_pair", &["k-apply", "--budget", "2", "pair.txt"], 0),
    ("k_apply_mono", &["k-apply", "--budget", "1", "mono.txt"], 2),
    ("k_iterate", &["k-iterate", "--budgets", "0,1", "single.txt"], 0),
    ("limit_build", &["limit-build", "--steps", "12", "--budget", "1"], 0),
    (
        "limit_build_seeded",
        &["limit-build", "--steps", "5", "--seed-file", "triple.txt"],
        0,
    ),
    (
        "limit_extend_iso",
        &["limit-extend-iso", "--structure", "approx.txt", "--iso", "iso.txt", "--point", "p2"],
        0,
    ),
    (
        "limit_extend_iso_back",
        &[
            "limit-extend-iso",
            "--structure",
            "approx.txt",
            "--iso",
            "iso.txt",
            "--point",
            "p3",
            "--back",
        ],
        0,
    ),
    ("embed", &["embed", "triple.txt"], 0),
    ("embed_into", &["embed", "pair.txt", "--into", "approx.txt"], 0),
    (
        "refute_index",
        &[
            "refute",
            "--base",
            "pair.txt",
            "--type",
            "type supp=a cut=1 colors=b:0:1 level=0",
            "--strategy",
            "index-sensitive",
            "--depth",
            "3",
        ],
        0,
    ),
    (
        "refute_constant_pretty",
        &[
            "--format",
            "pretty",
            "refute",
            "--base",
            "single.txt",
            "--type",
            "type supp= cut=0 colors= level=0",
            "--strategy",
            "constant",
            "--depth",
            "2",
        ],
        0,
    ),
    ("check_cert", &["check-cert", "cert.txt"], 0),
    ("check_cert_tampered", &["check-cert", "cert_tampered.txt"], 2),
    ("check_cert_other_strategy", &["check-cert", "cert.txt", "--strategy", "support-echo"], 2),
    ("control_lo", &["control-lo", "--size", "2", "--cut", "1", "--depth", "3", "--samples", "20"], 0),
    ("control_lo_bad_cut", &["control-lo", "--size", "1", "--cut", "2"], 1),
    ("unknown_flag", &["validate", "--frobnicate", "pair.txt"], 1),
];

pub fn dir(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join(name)
}

pub fn run(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_fraisse"))
        .args(args)
        .current_dir(dir("fixtures"))
        .output()
        .expect("binary runs");
    (out.status.code().expect("exit code"), out.stdout)
}
