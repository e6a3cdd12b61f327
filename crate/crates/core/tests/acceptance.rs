//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! A criterion that fails only through the n = 2 counterexample family
//! (f primitive, g = X^2 - f(0), generating GammaL_1(q^2)) is reported as
//! FAIL with that analysis; the process exits non-zero only for failures
//! outside the family.

mod common;

use std::collections::BTreeSet;
use std::process::Command;
use std::time::Instant;

use ffgroup::matgf::Mat;
use ffgroup::poly::enumerate_primitive;
use ffgroup::verify::{
    expected_main_cases, kantor_scan, verify_degos, verify_fixed_point_lemma, verify_main_theorem,
    verify_singer_lemma, verify_two_companion, verify_unique_extension, Failure,
};
use ffgroup::{gl_order, Budget, Elem, ExtensionFrame, HarnessConfig, Poly, Report};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

const GRID: [(u64, usize); 16] = [
    (2, 2),
    (2, 3),
    (2, 4),
    (2, 5),
    (2, 6),
    (3, 2),
    (3, 3),
    (4, 2),
    (4, 3),
    (5, 2),
    (5, 3),
    (7, 2),
    (8, 2),
    (9, 2),
    (2, 8),
    (3, 4),
];

enum Outcome {
    Pass(String),
    /// Fails only through the documented counterexample family.
    Documented(String),
    Fail(String),
}

/// The `(f, g)` pairs with `f` primitive of degree 2 and `g = X^2 - f(0)`,
/// for `q >= 3`, each confirmed by brute-force closure to generate a group
/// of order `2(q^2 - 1)`.
fn counterexample_family(q: u64, n: usize) -> Result<BTreeSet<(String, String)>, String> {
    if n != 2 || q < 3 {
        return Ok(BTreeSet::new());
    }
    let ctx = field(q);
    let mut out = BTreeSet::new();
    for f in enumerate_primitive(&ctx, 2, &Budget::default()).unwrap() {
        let g = Poly::new(
            ctx.clone(),
            vec![ctx.neg(f.constant_term()), Elem::ZERO, Elem::ONE],
        );
        let raw = |p: &Poly| -> RawMat {
            let c: Vec<u32> = p.coeffs().iter().map(|e| e.0).collect();
            companion_brute(&ctx, &c)
        };
        let order = closure_order_brute(&ctx, 2, &[raw(&f), raw(&g)], 10_000);
        let want = 2 * (q * q - 1) as usize;
        if order != Some(want) {
            return Err(format!(
                "closure of ({f}, {g}) over F_{q} gave {order:?}, not {want}"
            ));
        }
        out.insert((f.to_text(), g.to_text()));
    }
    Ok(out)
}

fn pairs(failures: &[&Failure]) -> BTreeSet<(String, String)> {
    failures
        .iter()
        .map(|f| {
            (
                f.f.clone().unwrap_or_default(),
                f.g.clone().unwrap_or_default(),
            )
        })
        .collect()
}

fn q_n(r: &Report) -> (u64, usize) {
    (
        r.param("q").unwrap().parse().unwrap(),
        r.param("n").unwrap().parse().unwrap(),
    )
}

fn cfg() -> HarnessConfig {
    serial_cfg()
}

fn oracle_ok(reports: &[&Report]) -> Result<u64, String> {
    let mut checks = 0;
    for r in reports {
        if r.param("oracle_mismatches") != Some("0") {
            return Err(format!("{} {:?}: oracle mismatch", r.harness, r.params));
        }
        checks += r.param("oracle_checks").unwrap().parse::<u64>().unwrap();
    }
    Ok(checks)
}

struct Suite {
    all_reports: Vec<Report>,
}

impl Suite {
    fn criterion_1(&mut self) -> Outcome {
        let start = Instant::now();
        let mut reports = Vec::new();
        for &(q, n) in &GRID {
            reports.push(verify_main_theorem(q, n, &cfg()).unwrap());
        }
        let serial_secs = start.elapsed().as_secs_f64();
        let mut parallel_cfg = cfg();
        parallel_cfg.workers = 4;
        for (r, &(q, n)) in reports.iter().zip(&GRID) {
            let mut a = r.clone();
            let mut b = verify_main_theorem(q, n, &parallel_cfg).unwrap();
            a.elapsed_ms = 0;
            b.elapsed_ms = 0;
            if a != b {
                return Outcome::Fail(format!("({q}, {n}) differs between 1 and 4 workers"));
            }
        }
        let mut documented = Vec::new();
        for r in &reports {
            let (q, n) = q_n(r);
            if r.budget_hit || r.cases_checked != r.cases_total {
                return Outcome::Fail(format!(
                    "({q}, {n}) incomplete: budget_hit={}",
                    r.budget_hit
                ));
            }
            if BigUint::from(r.cases_total) != expected_main_cases(q, n) {
                return Outcome::Fail(format!(
                    "({q}, {n}) cases_total {} breaks the counting identity",
                    r.cases_total
                ));
            }
            if r.failures.is_empty() {
                continue;
            }
            let family = match counterexample_family(q, n) {
                Ok(f) => f,
                Err(e) => return Outcome::Fail(e),
            };
            let want = (2 * (q * q - 1)).to_string();
            let all: Vec<&Failure> = r.failures.iter().collect();
            if pairs(&all) != family
                || all.len() != family.len()
                || all.iter().any(|f| f.observed != want)
            {
                return Outcome::Fail(format!(
                    "({q}, {n}) failures outside the known family: {:?}",
                    r.failures
                ));
            }
            documented.push(format!("({q},{n}):{}", r.failures.len()));
        }
        self.all_reports.extend(reports);
        let summary = format!("16 grid points, serial {serial_secs:.1}s, 1 vs 4 workers identical");
        if documented.is_empty() {
            Outcome::Pass(summary)
        } else {
            Outcome::Documented(format!(
                "{summary}; failures only at {}: g = X^2 - f(0) generates GammaL_1(q^2) (closure-confirmed)",
                documented.join(" ")
            ))
        }
    }

    fn criterion_2(&mut self) -> Outcome {
        let mut runs = 0;
        for p in [2u64, 3, 5, 7] {
            let mut n = 1;
            while p.pow(n as u32) <= 2048 {
                let r = verify_degos(p, n, &cfg()).unwrap();
                if !r.passed() || r.cases_checked != r.cases_total {
                    return Outcome::Fail(format!("degos ({p}, {n}): {:?}", r.failures));
                }
                self.all_reports.push(r);
                runs += 1;
                n += 1;
            }
        }
        Outcome::Pass(format!(
            "{runs} (p, n) pairs with p <= 7, p^n <= 2048, 0 failures"
        ))
    }

    fn criterion_3(&mut self) -> Outcome {
        let mut cases = 0;
        for &(q, n) in &GRID {
            let r = verify_singer_lemma(q, n, &cfg()).unwrap();
            if !r.passed() || r.cases_checked != r.cases_total {
                return Outcome::Fail(format!("singer ({q}, {n}): {:?}", r.failures));
            }
            let expected = BigUint::from(q - 1) * BigUint::from(q).pow(n as u32 - 1);
            if BigUint::from(r.cases_total) != expected {
                return Outcome::Fail(format!("singer ({q}, {n}) not exhaustive"));
            }
            cases += r.cases_total;
            self.all_reports.push(r);
        }
        Outcome::Pass(format!(
            "{cases} companion matrices, order and min/char polynomials all consistent"
        ))
    }

    fn criterion_4(&mut self) -> Outcome {
        let mut attained = Vec::new();
        for (q, a, d) in [
            (2u64, 1usize, 2usize),
            (2, 1, 3),
            (2, 1, 4),
            (3, 1, 2),
            (3, 1, 3),
            (5, 1, 2),
            (2, 2, 2),
        ] {
            let r = verify_fixed_point_lemma(q, a, d, &cfg()).unwrap();
            if !r.passed() {
                return Outcome::Fail(format!("({q},{a},{d}): {:?}", r.failures));
            }
            let order: BigUint = r.param("group_order").unwrap().parse().unwrap();
            if BigUint::from(r.cases_total + 1) != order {
                return Outcome::Fail(format!("({q},{a},{d}) enumeration incomplete"));
            }
            attained.push(format!(
                "({q},{a},{d}) {}/{}",
                r.param("max_fixed").unwrap(),
                r.param("bound").unwrap()
            ));
            self.all_reports.push(r);
        }
        let last = self.all_reports.last().unwrap();
        if last.param("max_fixed") != Some("4") || last.param("bound") != Some("4") {
            return Outcome::Fail("(2,2,2) should attain 4 of bound 4".into());
        }
        Outcome::Pass(format!("max fixed/bound: {}", attained.join(", ")))
    }

    fn criterion_5(&mut self) -> Outcome {
        let mut documented = Vec::new();
        let mut skipped = false;
        for &(q, n) in &GRID {
            let r = verify_two_companion(q, n, &cfg()).unwrap();
            if r.budget_hit || r.cases_checked != r.cases_total {
                return Outcome::Fail(format!("two-companion ({q}, {n}) incomplete"));
            }
            if (q, n) == (2, 2) {
                skipped = r
                    .param("check_ii")
                    .is_some_and(|s| s.starts_with("skipped"));
            }
            if r.failures
                .iter()
                .any(|f| f.witness.as_deref() == Some("check=i"))
            {
                return Outcome::Fail(format!("check (i) fails at ({q}, {n})"));
            }
            if !r.failures.is_empty() {
                let family = match counterexample_family(q, n) {
                    Ok(f) => f,
                    Err(e) => return Outcome::Fail(e),
                };
                let all: Vec<&Failure> = r.failures.iter().collect();
                let only_ii = all
                    .iter()
                    .all(|f| f.witness.as_deref() == Some("check=ii d=2"));
                if !only_ii || pairs(&all) != family || all.len() != family.len() {
                    return Outcome::Fail(format!(
                        "({q}, {n}) failures outside the known family: {:?}",
                        r.failures
                    ));
                }
                documented.push(format!("({q},{n})"));
            }
            self.all_reports.push(r);
        }
        if !skipped {
            return Outcome::Fail("(2,2) skip of check (ii) not recorded".into());
        }
        if documented.is_empty() {
            Outcome::Pass(
                "check (i) everywhere, check (ii) everywhere but the recorded (2,2) skip".into(),
            )
        } else {
            Outcome::Documented(format!(
                "check (i) holds everywhere; check (ii) fails only for g = X^2 - f(0) at {} (order 2(q^2-1) divides |GammaL_1(q^2)|)",
                documented.join(" ")
            ))
        }
    }

    fn criterion_6(&mut self) -> Outcome {
        let mut seen = Vec::new();
        for (q, n, d) in [
            (2u64, 2usize, 2usize),
            (3, 2, 2),
            (2, 3, 3),
            (2, 4, 2),
            (2, 4, 4),
            (4, 2, 2),
        ] {
            let r = verify_unique_extension(q, n, d, &cfg()).unwrap();
            if !r.passed() || r.param("count") != Some("1") {
                return Outcome::Fail(format!(
                    "({q},{n},{d}): count {:?}, {:?}",
                    r.param("count"),
                    r.failures
                ));
            }
            seen.push(format!("({q},{n},{d})"));
            self.all_reports.push(r);
        }
        Outcome::Pass(format!("count = 1 at {}", seen.join(" ")))
    }

    fn criterion_7(&mut self) -> Outcome {
        let mut seen = Vec::new();
        for (q, n) in [
            (2u64, 2usize),
            (3, 2),
            (4, 2),
            (5, 2),
            (2, 3),
            (2, 4),
            (3, 3),
        ] {
            let r = kantor_scan(q, n, &cfg()).unwrap();
            if !r.passed()
                || r.cases_total != gl_order(n, &BigUint::from(q)).try_into().unwrap_or(0u64)
            {
                return Outcome::Fail(format!("kantor ({q},{n}): {:?}", r.failures));
            }
            seen.push(format!(
                "({q},{n}) {{{}}}",
                r.param("orders_observed").unwrap()
            ));
            self.all_reports.push(r);
        }
        if kantor_scan(2, 5, &cfg()).is_ok() {
            return Outcome::Fail("(2,5) should exceed the scan budget".into());
        }
        Outcome::Pass(format!("orders observed: {}", seen.join(" ")))
    }

    fn criterion_8(&mut self) -> Outcome {
        let refs: Vec<&Report> = self.all_reports.iter().collect();
        let checks = match oracle_ok(&refs) {
            Ok(c) => c,
            Err(e) => return Outcome::Fail(e),
        };
        if checks == 0 {
            return Outcome::Fail("no closure cross-checks ran".into());
        }
        for (q, n) in [(2u64, 2usize), (2, 3), (3, 2), (2, 4)] {
            let brute = gl_count_brute(&field(q), n);
            if gl_order(n, &BigUint::from(q)) != BigUint::from(brute) {
                return Outcome::Fail(format!("gl_order({n}, {q}) != {brute}"));
            }
        }
        Outcome::Pass(format!(
            "{checks} groups of order <= 5000 matched their closure; gl_order matches enumeration at 4 points"
        ))
    }

    fn criterion_9(&mut self) -> Outcome {
        let mut count = 0;
        for &(q, n) in GRID.iter().filter(|(_, n)| is_prime_brute(*n as u64)) {
            let ctx = field(q);
            let frame = ExtensionFrame::new(&ctx, n, 1, &Budget::default()).unwrap();
            let (f, c) = ffgroup::fieldext::singer_generator(&ctx, n, &Budget::default()).unwrap();
            if frame.scalar(frame.alpha()) != c || frame.min_poly() != &f {
                return Outcome::Fail(format!("embedding of alpha is not C_f at ({q}, {n})"));
            }
            count += 1;
        }
        let frame = ExtensionFrame::new(&field(2), 2, 2, &Budget::default()).unwrap();
        let k = frame.ext().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let random = |rng: &mut ChaCha8Rng| loop {
            let m = Mat::from_entries(
                k.clone(),
                2,
                (0..4).map(|_| Elem(rng.gen_range(0..4))).collect(),
            );
            if !m.det().is_zero() {
                break m;
            }
        };
        for _ in 0..200 {
            let (a, b) = (random(&mut rng), random(&mut rng));
            let lhs = frame.embed_linear(&a.mul(&b)).unwrap();
            let rhs = frame
                .embed_linear(&a)
                .unwrap()
                .mul(&frame.embed_linear(&b).unwrap());
            if lhs != rhs {
                return Outcome::Fail("block embedding is not multiplicative".into());
            }
        }
        Outcome::Pass(format!(
            "L_alpha -> C_f exactly at {count} prime-n grid points; 200/200 block pairs exact"
        ))
    }

    fn criterion_10(&mut self) -> Outcome {
        let dir = tempfile::tempdir().unwrap();
        let mut outputs = Vec::new();
        for i in 0..2 {
            let path = dir.path().join(format!("run{i}.json"));
            let status = Command::new(env!("CARGO_BIN_EXE_ffgroup"))
                .args([
                    "report",
                    "--qmax",
                    "5",
                    "--nmax",
                    "4",
                    "--out",
                    path.to_str().unwrap(),
                ])
                .env_remove("FFGROUP_BUDGET_POINTS")
                .output()
                .unwrap()
                .status;
            if !matches!(status.code(), Some(0 | 1)) {
                return Outcome::Fail(format!("report exited with {status}"));
            }
            outputs.push(std::fs::read_to_string(&path).unwrap());
        }
        let strip = |s: &str| -> Vec<String> {
            s.lines()
                .map(|l| {
                    let t = l.trim_start();
                    if t.starts_with("\"elapsed_ms\"") || t.starts_with("\"tool_version\"") {
                        t.split(':').next().unwrap().to_string()
                    } else {
                        l.to_string()
                    }
                })
                .collect()
        };
        if strip(&outputs[0]) != strip(&outputs[1]) {
            return Outcome::Fail("report runs differ outside elapsed_ms/tool_version".into());
        }
        let runs = serde_json::from_str::<Vec<Report>>(&outputs[0])
            .map(|v| v.len())
            .unwrap_or(0);
        Outcome::Pass(format!(
            "two report runs ({runs} harness runs each) identical modulo elapsed_ms/tool_version"
        ))
    }
}

type Criterion = fn(&mut Suite) -> Outcome;

fn main() {
    let mut suite = Suite {
        all_reports: Vec::new(),
    };
    let criteria: [(&str, Criterion); 10] = [
        ("main theorem grid", Suite::criterion_1),
        ("degos conjecture", Suite::criterion_2),
        ("singer lemma", Suite::criterion_3),
        ("fixed-point lemma", Suite::criterion_4),
        ("two-companion corollary", Suite::criterion_5),
        ("unique extension subgroup", Suite::criterion_6),
        ("singer-containing subgroups scan", Suite::criterion_7),
        ("oracle cross-checks", Suite::criterion_8),
        ("embedding identities", Suite::criterion_9),
        ("report determinism", Suite::criterion_10),
    ];
    let mut unexpected = 0;
    let mut documented = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run(&mut suite);
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Outcome::Pass(msg) => println!("PASS criterion {} ({name}) [{secs:.1}s]: {msg}", i + 1),
            Outcome::Documented(msg) => {
                documented += 1;
                println!("FAIL criterion {} ({name}) [{secs:.1}s]: {msg}", i + 1);
            }
            Outcome::Fail(msg) => {
                unexpected += 1;
                println!(
                    "FAIL criterion {} ({name}) [{secs:.1}s]: UNEXPECTED: {msg}",
                    i + 1
                );
            }
        }
    }
    println!(
        "acceptance: {} passed, {documented} failed with the documented n = 2 counterexample family, {unexpected} unexpected",
        criteria.len() - documented - unexpected
    );
    if unexpected > 0 {
        std::process::exit(1);
    }
}
