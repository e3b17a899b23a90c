//! Runner and numerical helpers for the acceptance suite in
//! `tests/acceptance.rs`.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

/// Result of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

pub type CriterionFn = fn() -> Result<Outcome, String>;

pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub run: CriterionFn,
}

/// Runs every criterion, printing one `PASS`/`FAIL` line each. Errors and
/// panics count as failures. Fails the process if any criterion fails.
pub fn run_all(criteria: &[Criterion]) -> ExitCode {
    let mut failed = Vec::new();
    for c in criteria {
        let start = Instant::now();
        let outcome = match panic::catch_unwind(AssertUnwindSafe(c.run)) {
            Ok(Ok(o)) => o,
            Ok(Err(e)) => Outcome::new(false, format!("error: {e}")),
            Err(p) => {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into());
                Outcome::new(false, format!("panic: {msg}"))
            }
        };
        let secs = start.elapsed().as_secs_f64();
        println!(
            "criterion {:>2} {} {} ({secs:.1}s): {}",
            c.id,
            if outcome.pass { "PASS" } else { "FAIL" },
            c.name,
            outcome.detail
        );
        if !outcome.pass {
            failed.push(c.id);
        }
    }
    println!(
        "acceptance: {} passed, {} failed{}",
        criteria.len() - failed.len(),
        failed.len(),
        if failed.is_empty() { String::new() } else { format!(" {failed:?}") }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

/// `‖a − b‖ / ‖b‖`, guarded against a vanishing reference.
pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den.max(1e-12)
}

/// Central-difference gradient of a scalar function.
pub fn fd_gradient(x: &[f64], h: f64, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut p = x.to_vec();
    (0..p.len())
        .map(|k| {
            let orig = p[k];
            p[k] = orig + h;
            let up = f(&p);
            p[k] = orig - h;
            let down = f(&p);
            p[k] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Central-difference Jacobian (row-major, `m × n`) of a vector function.
pub fn fd_jacobian(x: &[f64], h: f64, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Vec<Vec<f64>> {
    let mut p = x.to_vec();
    let mut cols = Vec::with_capacity(p.len());
    for k in 0..p.len() {
        let orig = p[k];
        p[k] = orig + h;
        let up = f(&p);
        p[k] = orig - h;
        let down = f(&p);
        p[k] = orig;
        cols.push(up.iter().zip(&down).map(|(u, d)| (u - d) / (2.0 * h)).collect::<Vec<f64>>());
    }
    let m = cols.first().map_or(0, |c| c.len());
    (0..m).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}
