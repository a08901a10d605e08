//! Helpers shared by the CLI test targets.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const COMMANDS: [&str; 7] = [
    "equilibria",
    "simulate",
    "simulate-sde",
    "stability",
    "delay-margin",
    "concentration",
    "lyapunov",
];

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

pub fn writes_trajectory(command: &str) -> bool {
    matches!(command, "simulate" | "simulate-sde")
}

pub fn seirs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seirs"))
        .args(args)
        .env("SEIRS_LOG", "quiet")
        .output()
        .expect("binary runs")
}

/// Report bytes and, for the simulation commands, trajectory bytes of one
/// run on the canonical config.
pub struct Run {
    pub status: Option<i32>,
    pub report: Vec<u8>,
    pub trajectory: Option<Vec<u8>>,
    pub stderr: String,
}

pub fn run_canonical(command: &str, scratch: &Path) -> Run {
    let config = golden_dir().join(format!("{command}.toml"));
    let csv = scratch.join(format!("{command}.csv"));
    let config = config.to_str().unwrap().to_string();
    let csv_arg = csv.to_str().unwrap().to_string();
    let mut args = vec![command, "--config", config.as_str()];
    if writes_trajectory(command) {
        args.extend(["--trajectory", csv_arg.as_str()]);
    }
    let out = seirs(&args);
    Run {
        status: out.status.code(),
        report: out.stdout,
        trajectory: writes_trajectory(command).then(|| std::fs::read(&csv).unwrap_or_default()),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

/// Compares against `golden/<command>.report` (and `.csv`). Setting
/// `SEIRS_UPDATE_GOLDEN=1` rewrites the files instead.
pub fn check_golden(command: &str, run: &Run) -> Result<(), String> {
    let dir = golden_dir();
    let mut files = vec![(dir.join(format!("{command}.report")), &run.report)];
    if let Some(csv) = &run.trajectory {
        files.push((dir.join(format!("{command}.csv")), csv));
    }
    let update = std::env::var("SEIRS_UPDATE_GOLDEN").is_ok_and(|v| v == "1");
    for (path, bytes) in files {
        if update {
            std::fs::write(&path, bytes).map_err(|e| e.to_string())?;
            continue;
        }
        let expected = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        if &expected != bytes {
            return Err(format!("{} differs from the golden file", path.display()));
        }
    }
    Ok(())
}
