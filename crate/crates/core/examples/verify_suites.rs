//! Run each seeded suite at a small size and print one line per suite.

use baire_lab::verify::{
    ratios_strictly_increasing, run_branch_isometry, run_hi_suite, run_oracle_equivalence, run_tsirelson_fixed_point,
    run_tsirelson_suite, DEFAULT_HI_PAIRS,
};

fn main() {
    let reports = [
        run_oracle_equivalence(60, 1, 8),
        run_branch_isometry(20, 30, 1),
        run_tsirelson_fixed_point(20, 1, 9),
        run_tsirelson_suite(30, 1),
        run_hi_suite(&DEFAULT_HI_PAIRS),
    ];
    for r in &reports {
        println!(
            "{:<22} {:>3} cases  {}  {:.2}s  {}",
            r.experiment,
            r.cases.len(),
            if r.pass { "pass" } else { "FAIL" },
            r.wall_time.as_secs_f64(),
            &r.inputs_digest[..16]
        );
    }
    println!("hi ratios increasing: {}", ratios_strictly_increasing(&reports[4]));
    let bad: Vec<String> = reports
        .iter()
        .flat_map(|r| r.failures())
        .map(|c| serde_json::to_string_pretty(c).expect("serializes"))
        .collect();
    if let Some(first) = bad.first() {
        println!("{first}");
        std::process::exit(1);
    }
}
