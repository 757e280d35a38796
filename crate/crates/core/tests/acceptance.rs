//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use xxz_core::verify::{
    check_appendix_closed_forms, check_band_decay, check_kink_gap, check_lemma31, check_polarized_interval,
    check_prop24, check_ring, check_solver_agreement, check_theorem1, check_theorem2, check_two_site_tables,
    check_xxz_gap, CheckReport, ClosedFormLimits, RingConstants, StateSource, Theorem2Constants,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn gather(reports: xxz_core::Result<Vec<CheckReport>>, limit: Option<Duration>, start: Instant) -> Outcome {
    let elapsed = start.elapsed();
    let reports = match reports {
        Ok(r) => r,
        Err(e) => return Outcome { pass: false, detail: format!("error: {e}") },
    };
    let failed: Vec<String> = reports.iter().filter(|r| !r.pass).map(|r| r.to_string()).collect();
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let mut detail = format!("{} report(s), {:.1}s", reports.len(), elapsed.as_secs_f64());
    if let Some(l) = limit {
        detail.push_str(&format!(" (limit {}s)", l.as_secs()));
    }
    for f in &failed {
        detail.push_str(&format!("\n      {f}"));
    }
    Outcome { pass: failed.is_empty() && in_time, detail }
}

fn collect<I>(items: I) -> xxz_core::Result<Vec<CheckReport>>
where
    I: IntoIterator<Item = xxz_core::Result<CheckReport>>,
{
    items.into_iter().collect()
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let r = collect((2..=12).flat_map(|l| [0.1, 0.25, 0.5].map(move |q| check_kink_gap(l, q))));
    gather(r, Some(Duration::from_secs(60)), t)
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    gather(collect([0.1, 0.25, 0.5, 0.9].map(check_two_site_tables)), None, t)
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let r = check_appendix_closed_forms(&ClosedFormLimits { max_l: 10, qs: vec![0.25, 0.5] });
    gather(r.map(|r| vec![r]), Some(Duration::from_secs(300)), t)
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    gather(collect([4, 6, 8].map(|n| check_theorem1(12, n, 0.25))), None, t)
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let c = Theorem2Constants::FROZEN;
    let mut r: Vec<_> = (3..=9).map(|n| check_theorem2(12, n, 0.25, &c)).collect();
    r.push(check_band_decay(12, 0.25));
    gather(collect(r), Some(Duration::from_secs(120)), t)
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    gather(check_ring(12, 6, 0.25, &RingConstants::FROZEN).map(|r| vec![r]), None, t)
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    let r = collect((2..=10).flat_map(|l| {
        [0.25, 0.5].into_iter().flat_map(move |q| [check_xxz_gap(l, q), check_prop24(l, q)])
    }));
    gather(r, None, t)
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let r = collect([4, 6].into_iter().flat_map(|n| {
        [2, 3].map(|block| check_polarized_interval(12, 0.25, block, StateSource::GroundState { n }))
    }));
    gather(r, None, t)
}

fn criterion_9() -> Outcome {
    let t = Instant::now();
    gather(collect([3, 4, 5].map(|n| check_lemma31(10, n, 0.25))), None, t)
}

fn criterion_10() -> Outcome {
    let t = Instant::now();
    let all: Vec<usize> = (0..=10).collect();
    let r = collect([check_solver_agreement(10, &all, 0.25, 5, 7), check_solver_agreement(14, &[7], 0.25, 5, 7)]);
    gather(r, None, t)
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("kink gap, L 2..12, q 0.1/0.25/0.5: |l1| <= 1e-10, |l2 - gamma_L| <= 1e-9", criterion_1),
        ("two-site tables by dense 4x4 diagonalisation: error <= 1e-13", criterion_2),
        ("closed-form identity sweep, L <= 10, q 0.25/0.5: relative error <= 1e-11", criterion_3),
        ("band norm and droplet residual bounds, L 12, n 4/6/8", criterion_4),
        ("band, gap, distance (frozen constants +10%) and decay <= 2q, L 12, n 3..9", criterion_5),
        ("ring band and gap (frozen constants +10%), overlaps to 1e-12, L 12, n 6", criterion_6),
        ("free and droplet chain spectral bounds, L <= 10: slack 1e-10", criterion_7),
        ("polarised interval weight, commutator norm <= 1/Delta + 1e-12, L 12", criterion_8),
        ("frame versus Gram projector, L 10, n 3..5: spectra to 1e-10", criterion_9),
        ("dense versus Lanczos lowest 5 to 1e-8, L 10 all sectors, L 14 n 7", criterion_10),
    ];
    let mut failures = 0;
    for (i, (label, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failures += 1;
        }
        println!("{} criterion {:>2}: {label} [{}]", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
