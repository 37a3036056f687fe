use ree_core::fixer::{verify_theorem_case_i, SweepMode};
use ree_core::FieldCtx;
use std::time::Instant;

fn main() {
    let f = FieldCtx::new(5).unwrap();
    let q0 = f.subfield(1).unwrap();
    let jobs = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(4);
    eprintln!("jobs = {jobs}");
    let t0 = Instant::now();
    let report = verify_theorem_case_i(&f, q0, false, SweepMode::Exhaustive, jobs). unwrap();
    eprintln!("exhaustive no-phi: {:?} status {:?}", t0.elapsed(), report.status);
    let total: u64 = report.counts.values().sum();
    eprintln!("total {total}");
    eprintln!("counts {:?}", report.counts);
    let t1 = Instant::now();
    let r2 = verify_theorem_case_i(&f, q0, true, SweepMode::Sample { count: 1_000_000, seed: 20_240_817 }, jobs).unwrap();
    eprintln!("sampled with-phi 1e6: {:?} status {:?}", t1.elapsed(), r2.status);
    eprintln!("counts {:?}", r2.counts);
}
