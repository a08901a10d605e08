mod common;

use std::fs;

use common::{check_golden, golden_dir, run_canonical, seirs, COMMANDS};
use seirs_cli::parse_config;

#[test]
fn every_command_matches_its_golden_report() {
    let scratch = tempfile::tempdir().unwrap();
    for command in COMMANDS {
        let run = run_canonical(command, scratch.path());
        assert_eq!(run.status, Some(0), "{command}: {}", run.stderr);
        check_golden(command, &run).unwrap();
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    for command in COMMANDS {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let first = run_canonical(command, a.path());
        let second = run_canonical(command, b.path());
        assert_eq!(first.report, second.report, "{command}");
        assert_eq!(first.trajectory, second.trajectory, "{command}");
    }
}

fn write_config(dir: &tempfile::TempDir, text: &str) -> String {
    let path = dir.path().join("run.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const BASE: &str = "[params]\nbeta = 0.1\nmu = 0.2\ngamma = 0.3\nk_r = 2.0\nr = 0.5\nepsilon = 0.0\n";

#[test]
fn exit_codes_follow_the_failure_class() {
    let dir = tempfile::tempdir().unwrap();

    let missing = dir.path().join("absent.toml");
    let out = seirs(&["equilibria", "--config", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    let out = seirs(&["no-such-command", "--config", "x.toml"]);
    assert_eq!(out.status.code(), Some(1));

    let cfg = write_config(&dir, "[params\nbeta = 0.1\n");
    assert_eq!(seirs(&["equilibria", "--config", &cfg]).status.code(), Some(2));

    let cfg = write_config(&dir, &BASE.replace("gamma = 0.3\n", ""));
    assert_eq!(seirs(&["equilibria", "--config", &cfg]).status.code(), Some(2));

    let cfg = write_config(&dir, &BASE.replace("k_r = 2.0", "k_r = 1.0"));
    let out = seirs(&["equilibria", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("k_r ≥ r·e"));

    let cfg = write_config(&dir, &BASE.replace("beta = 0.1", "beta = 0.2"));
    assert_eq!(seirs(&["delay-margin", "--config", &cfg]).status.code(), Some(4));

    let cfg = write_config(
        &dir,
        &format!(
            "{}[run]\nhorizon = 1.0\nstep = 0.01\n[ensemble]\nn_rep = 20\nrho = [5.0, 6.0]\n",
            BASE.replace("r = 0.5", "r = 0.0")
                .replace("epsilon = 0.0", "epsilon = 0.1")
        ),
    );
    assert_eq!(seirs(&["concentration", "--config", &cfg]).status.code(), Some(4));
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = golden_dir().join("lyapunov.toml");
    let report = dir.path().join("report.txt");
    let out = seirs(&[
        "lyapunov",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "5",
        "--reps",
        "3",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(report).unwrap();
    assert!(text.contains("input.ensemble.seed = 5\n"));
    assert!(text.contains("input.ensemble.n_rep = 3\n"));
}

#[test]
fn unknown_keys_become_report_warnings() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, &format!("{BASE}colour = \"red\"\n"));
    let out = seirs(&["equilibria", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.ends_with("warnings = 1\nwarning.0 = \"unknown key params.colour\"\n"),
        "{text}"
    );
}

#[test]
fn shipped_example_config_parses() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/example.toml");
    let parsed = parse_config(&fs::read_to_string(path).unwrap()).unwrap();
    assert!(parsed.warnings.is_empty(), "{:?}", parsed.warnings);
}
