//! One line per acceptance criterion; exits nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use steenrod_cli::check::criteria;

fn binary_golden() -> Result<(), String> {
    let run = |mode: &str| {
        Command::new(env!("CARGO_BIN_EXE_steenrod"))
            .args(["normalize", "--l", "3", "--mode", mode, "P1 P1"])
            .output()
            .map_err(|e| e.to_string())
    };
    for (mode, want) in [("classical", "2 P2\n"), ("motivic", "2 P2 P0\n")] {
        let out = run(mode)?;
        let got = String::from_utf8_lossy(&out.stdout);
        if !out.status.success() || got != want {
            return Err(format!("binary, {mode}: {got:?}"));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut failed = 0;
    for (k, suite) in criteria().iter().enumerate() {
        let t = Instant::now();
        let mut result = (suite.run)();
        if k == 7 {
            result = result.and_then(|msg| binary_golden().map(|()| msg));
        }
        let ms = t.elapsed().as_millis();
        match result {
            Ok(msg) => println!("criterion {}: PASS {} ({ms} ms): {msg}", k + 1, suite.name),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL {} ({ms} ms): {msg}", k + 1, suite.name);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    println!("acceptance: {} of 8 passed in {secs:.2} s", 8 - failed);
    if failed == 0 && secs < 60.0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
