//! The command line, run in-process against checked-in expected output.

use std::path::Path;

use algebra_growth::cli::run;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("algebra-growth").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

/// Paths in the arguments are relative to the crate root, which is also
/// what the reports record.
fn golden(name: &str, args: &[&str]) {
    std::env::set_current_dir(env!("CARGO_MANIFEST_DIR")).unwrap();
    let (code, out, err) = invoke(args);
    assert_eq!(code, 0, "stderr: {err}");
    let want = std::fs::read_to_string(Path::new("tests/golden").join(name)).unwrap();
    assert_eq!(out, want, "{name}");
}

#[test]
fn cube_decide_maltsev() {
    golden(
        "cube_maltsev.txt",
        &["cube", "decide", "--theory", "data/maltsev.eqn"],
    );
}

#[test]
fn cube_decide_unit_json() {
    golden(
        "cube_unit.json",
        &["--json", "cube", "decide", "--theory", "data/unit.eqn"],
    );
}

#[test]
fn growth_table_bare() {
    golden(
        "growth_bare2.txt",
        &[
            "growth",
            "table",
            "--algebra",
            "data/bare2.json",
            "--n",
            "1..3",
            "--oracle",
        ],
    );
}

#[test]
fn growth_table_json() {
    golden(
        "growth_z2.json",
        &[
            "--json",
            "growth",
            "table",
            "--algebra",
            "data/z2.json",
            "--n",
            "0..3",
        ],
    );
}

#[test]
fn growth_h() {
    golden(
        "h_bare2.txt",
        &[
            "growth",
            "h",
            "--algebra",
            "data/bare2.json",
            "--g",
            "5",
            "--horizon",
            "6",
        ],
    );
}

#[test]
fn kelly_inconsistent_theory_is_not_an_error() {
    golden(
        "kelly_xy.txt",
        &["kelly", "consistent", "--theory", "data/xy.eqn"],
    );
}

#[test]
fn construct_emits_algebra_file() {
    golden(
        "construct_nu.json",
        &["construct", "example-nu", "--q", "1", "--k", "2"],
    );
}

#[test]
fn ideals_certify_json() {
    golden(
        "ideals_a4.json",
        &[
            "--json",
            "ideals",
            "certify",
            "--algebra",
            "data/a4.json",
            "--verify-n",
            "2",
        ],
    );
}

#[test]
fn template_generate_verified() {
    golden(
        "template_z2.txt",
        &[
            "template",
            "generate",
            "--algebra",
            "data/z2.json",
            "--witness",
            "data/z2_unit_witness.json",
            "--n",
            "3",
            "--verify",
        ],
    );
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    std::env::set_current_dir(env!("CARGO_MANIFEST_DIR")).unwrap();
    let args = [
        "--json",
        "growth",
        "table",
        "--algebra",
        "data/square.json",
        "--n",
        "1..3",
        "--oracle",
    ];
    let first = invoke(&args);
    assert_eq!(first.0, 0, "stderr: {}", first.2);
    for _ in 0..3 {
        assert_eq!(invoke(&args), first);
    }
}

#[test]
fn timings_are_opt_in() {
    std::env::set_current_dir(env!("CARGO_MANIFEST_DIR")).unwrap();
    let (_, plain, _) = invoke(&[
        "--json",
        "growth",
        "table",
        "--algebra",
        "data/bare2.json",
        "--n",
        "2",
    ]);
    assert!(!plain.contains("elapsed"));
    let (_, timed, _) = invoke(&[
        "--json",
        "--timings",
        "growth",
        "table",
        "--algebra",
        "data/bare2.json",
        "--n",
        "2",
    ]);
    assert!(timed.contains("elapsed_ms"));
}

#[test]
fn exit_codes() {
    std::env::set_current_dir(env!("CARGO_MANIFEST_DIR")).unwrap();
    let (code, _, err) = invoke(&[
        "growth",
        "table",
        "--algebra",
        "data/missing.json",
        "--n",
        "1",
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("data/missing.json"));
    let (code, _, _) = invoke(&["growth", "frob"]);
    assert_eq!(code, 2);
    let (code, _, _) = invoke(&[
        "growth",
        "table",
        "--algebra",
        "data/bare2.json",
        "--n",
        "x..y",
    ]);
    assert_eq!(code, 2);
    let (code, out, _) = invoke(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("Usage"));
}
