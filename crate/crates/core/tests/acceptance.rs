//! Runs every acceptance criterion and prints one line per criterion.
//! Pass criterion ids as arguments to run a subset.

use std::process::ExitCode;

use kuramoto3::acceptance;

fn main() -> ExitCode {
    let only: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for id in acceptance::CRITERIA.iter().map(|(id, _)| *id) {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = std::time::Instant::now();
        let r = acceptance::run(&[id]).remove(0);
        println!("{r} ({:.1}s)", start.elapsed().as_secs_f64());
        failed += usize::from(!r.passed);
    }
    println!("{failed} criteria failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
