//! Exhaustive harnesses over small `(q, n)`, each returning a [`Report`].
//!
//! Every harness enumerates its cases in a fixed order, fans them out over a
//! dedicated thread pool and merges the results in input order, so reports
//! are identical for every worker count. Failures are sorted before output.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fieldext::{singer_generator, ExtensionFrame, StandardExtSubgroup};
use crate::gf::{is_prime, prime_power, FieldCtx};
use crate::matgf::Mat;
use crate::permgrp::{
    closure_oracle, gl_order, gl_standard_generators, group_order_bounded, matrix_to_perm,
    perm_to_matrix, Bsgs, Closure, Perm,
};
use crate::poly::{enumerate_nonzero_const, enumerate_primitive, Poly};
use crate::Budget;

/// Cap on the number of `a x a` candidates examined when listing the
/// elements of a standard field-extension subgroup.
pub const EXT_ENUM_LIMIT: u64 = 1_000_000;

pub const TOOL_VERSION: &str = concat!("ffgroup ", env!("CARGO_PKG_VERSION"));

/// Knobs shared by all harnesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HarnessConfig {
    pub budget: Budget,
    /// Size of the worker pool; `1` runs inline.
    pub workers: usize,
    /// When set, every generated group of order at most this value is also
    /// closed by brute force and the two orders compared.
    pub oracle_cap: Option<usize>,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            budget: Budget::default(),
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            oracle_cap: None,
        }
    }
}

/// One failed case. Every field is text: polynomials and matrices in their
/// text formats, integers in decimal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Failure {
    pub f: Option<String>,
    pub g: Option<String>,
    pub witness: Option<String>,
    pub observed: String,
    pub expected: String,
}

/// Outcome of one harness run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub harness: String,
    pub params: BTreeMap<String, String>,
    #[serde(with = "decimal")]
    pub cases_total: u64,
    #[serde(with = "decimal")]
    pub cases_checked: u64,
    pub failures: Vec<Failure>,
    #[serde(with = "decimal")]
    pub elapsed_ms: u64,
    pub budget_hit: bool,
    pub tool_version: String,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && !self.budget_hit
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }
}

mod decimal {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

struct Builder {
    harness: &'static str,
    params: BTreeMap<String, String>,
    failures: Vec<Failure>,
    oracle_checks: u64,
    oracle_mismatches: u64,
    start: Instant,
}

impl Builder {
    fn new(harness: &'static str) -> Builder {
        Builder {
            harness,
            params: BTreeMap::new(),
            failures: Vec::new(),
            oracle_checks: 0,
            oracle_mismatches: 0,
            start: Instant::now(),
        }
    }

    fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    fn fail(
        &mut self,
        f: Option<&Poly>,
        g: Option<&Poly>,
        witness: Option<String>,
        observed: impl ToString,
        expected: impl ToString,
    ) {
        self.failures.push(Failure {
            f: f.map(Poly::to_text),
            g: g.map(Poly::to_text),
            witness,
            observed: observed.to_string(),
            expected: expected.to_string(),
        });
    }

    /// Folds in the result of a closure cross-check; mismatches become
    /// failures carrying both orders.
    fn oracle(
        &mut self,
        o: &OrderResult,
        f: Option<&Poly>,
        g: Option<&Poly>,
        witness: Option<String>,
    ) {
        if let Some(closure) = &o.closure {
            self.oracle_checks += 1;
            if Some(o.order.clone()) != closure.clone() {
                self.oracle_mismatches += 1;
                let seen = closure
                    .as_ref()
                    .map_or("overflow".to_string(), |c| format!("closure={c}"));
                self.fail(f, g, witness, seen, format!("closure={}", o.order));
            }
        }
    }

    fn finish(mut self, cfg: &HarnessConfig, total: u64, checked: u64, budget_hit: bool) -> Report {
        if let Some(cap) = cfg.oracle_cap {
            self.param("oracle_cap", cap);
            self.param("oracle_checks", self.oracle_checks);
            self.param("oracle_mismatches", self.oracle_mismatches);
        }
        self.failures.sort();
        Report {
            harness: self.harness.to_string(),
            params: self.params,
            cases_total: total,
            cases_checked: checked,
            failures: self.failures,
            elapsed_ms: self.start.elapsed().as_millis() as u64,
            budget_hit,
            tool_version: TOOL_VERSION.to_string(),
        }
    }

    fn budget_hit(mut self, cfg: &HarnessConfig, size: &str) -> Report {
        self.param("budget_points", cfg.budget.points);
        self.param("budget_needed", size);
        self.finish(cfg, 0, 0, true)
    }
}

fn field_of(q: u64, budget: &Budget) -> Result<Arc<FieldCtx>> {
    let (p, k) =
        prime_power(q).ok_or_else(|| Error::InvalidParams(format!("{q} is not a prime power")))?;
    FieldCtx::new(p, k, budget)
}

/// `q^n` if it fits the point budget.
fn points_within(q: u64, n: usize, budget: &Budget) -> Option<u64> {
    let n = u32::try_from(n).ok()?;
    q.checked_pow(n).filter(|&v| v <= budget.points)
}

fn require_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParams("n must be at least 1".into()));
    }
    Ok(())
}

fn par_map<T, R, F>(cfg: &HarnessConfig, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    if cfg.workers <= 1 || items.len() < 2 {
        return items.iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
    {
        Ok(pool) => pool.install(|| items.par_iter().map(f).collect()),
        Err(_) => items.iter().map(f).collect(),
    }
}

fn collect<R>(results: Vec<Result<R>>) -> Result<Vec<R>> {
    results.into_iter().collect()
}

struct OrderResult {
    order: BigUint,
    /// `Some(closure size or None on overflow)` when the oracle applies.
    closure: Option<Option<BigUint>>,
}

fn order_of(gens: &[Perm], bound: &BigUint, cfg: &HarnessConfig) -> Result<OrderResult> {
    let order = group_order_bounded(gens, bound)?;
    let closure = match cfg.oracle_cap {
        Some(cap) if order <= BigUint::from(cap) => Some(match closure_oracle(gens, cap) {
            Closure::Elements(e) => Some(BigUint::from(e.len())),
            Closure::Overflow => None,
        }),
        _ => None,
    };
    Ok(OrderResult { order, closure })
}

fn divisors_above_one(n: usize) -> Vec<usize> {
    (2..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Companion permutations for every polynomial in `polys`.
fn companion_perms(polys: &[Poly], budget: &Budget) -> Result<Vec<Perm>> {
    polys
        .iter()
        .map(|f| matrix_to_perm(&Mat::companion(f)?, budget))
        .collect()
}

/// Every `(f, g)` with `f` primitive, `g` monic with nonzero constant term,
/// `g != f`, as indices into the nonzero-constant list.
struct PairCases {
    all: Vec<Poly>,
    perms: Vec<Perm>,
    pairs: Vec<(usize, usize)>,
    primitive_count: usize,
}

fn pair_cases(ctx: &Arc<FieldCtx>, n: usize, budget: &Budget) -> Result<PairCases> {
    let all = enumerate_nonzero_const(ctx, n, budget)?;
    let prims = enumerate_primitive(ctx, n, budget)?;
    let prim_idx: Vec<usize> = prims
        .iter()
        .map(|f| {
            all.iter()
                .position(|g| g == f)
                .expect("primitive polynomials have nonzero constant term")
        })
        .collect();
    let pairs = prim_idx
        .iter()
        .flat_map(|&fi| {
            (0..all.len())
                .filter(move |&gi| gi != fi)
                .map(move |gi| (fi, gi))
        })
        .collect();
    let perms = companion_perms(&all, budget)?;
    Ok(PairCases {
        all,
        perms,
        pairs,
        primitive_count: prims.len(),
    })
}

fn base_params(b: &mut Builder, q: u64, n: usize) {
    b.param("q", q).param("n", n);
}

/// For every primitive `f` and every other monic `g` of degree `n` with
/// `g(0) != 0`, checks that `<C_f, C_g>` is all of `GL_n(q)`.
pub fn verify_main_theorem(q: u64, n: usize, cfg: &HarnessConfig) -> Result<Report> {
    require_n(n)?;
    let mut b = Builder::new("main");
    base_params(&mut b, q, n);
    let ctx = field_of(q, &cfg.budget)?;
    if points_within(q, n, &cfg.budget).is_none() {
        return Ok(b.budget_hit(cfg, &format!("{q}^{n}")));
    }
    let cases = pair_cases(&ctx, n, &cfg.budget)?;
    let target = gl_order(n, &BigUint::from(q));
    let results = collect(par_map(cfg, &cases.pairs, |&(fi, gi)| {
        order_of(
            &[cases.perms[fi].clone(), cases.perms[gi].clone()],
            &target,
            cfg,
        )
    }))?;
    for (&(fi, gi), r) in cases.pairs.iter().zip(&results) {
        let (f, g) = (&cases.all[fi], &cases.all[gi]);
        if r.order != target {
            b.fail(Some(f), Some(g), None, &r.order, &target);
        }
        b.oracle(r, Some(f), Some(g), None);
    }
    b.param("primitive_count", cases.primitive_count)
        .param("nonzero_const_count", cases.all.len())
        .param("expected_order", &target);
    let total = cases.pairs.len() as u64;
    Ok(b.finish(cfg, total, total, false))
}

/// The `g = X^n - 1` slice of [`verify_main_theorem`] over a prime field.
/// When `X^n - 1` is itself primitive (only `p = 2, n = 1`) the `f = g` case
/// is excluded and the exclusion recorded.
pub fn verify_degos(p: u64, n: usize, cfg: &HarnessConfig) -> Result<Report> {
    require_n(n)?;
    if !is_prime(p) {
        return Err(Error::NonPrimeCharacteristic(p));
    }
    let mut b = Builder::new("degos");
    b.param("p", p).param("n", n);
    let ctx = FieldCtx::new(p, 1, &cfg.budget)?;
    if points_within(p, n, &cfg.budget).is_none() {
        return Ok(b.budget_hit(cfg, &format!("{p}^{n}")));
    }
    let g = Poly::x_pow_minus_one(ctx.clone(), n);
    let prims = enumerate_primitive(&ctx, n, &cfg.budget)?;
    let excluded = prims.contains(&g);
    let fs: Vec<Poly> = prims.into_iter().filter(|f| *f != g).collect();
    let pg = matrix_to_perm(&Mat::companion(&g)?, &cfg.budget)?;
    let pfs = companion_perms(&fs, &cfg.budget)?;
    let target = gl_order(n, &BigUint::from(p));
    let results = collect(par_map(cfg, &pfs, |pf| {
        order_of(&[pf.clone(), pg.clone()], &target, cfg)
    }))?;
    for (f, r) in fs.iter().zip(&results) {
        if r.order != target {
            b.fail(Some(f), Some(&g), None, &r.order, &target);
        }
        b.oracle(r, Some(f), Some(&g), None);
    }
    b.param("g", g.to_text())
        .param("excluded_f_equals_g", excluded)
        .param("expected_order", &target);
    let total = fs.len() as u64;
    Ok(b.finish(cfg, total, total, false))
}

/// For every monic `f` of degree `n` with `f(0) != 0`: `C_f` has order
/// `q^n - 1` exactly when `f` is primitive, and the minimal and
/// characteristic polynomials of `C_f` are both `f`.
pub fn verify_singer_lemma(q: u64, n: usize, cfg: &HarnessConfig) -> Result<Report> {
    require_n(n)?;
    let mut b = Builder::new("singer-lemma");
    base_params(&mut b, q, n);
    let ctx = field_of(q, &cfg.budget)?;
    let Some(points) = points_within(q, n, &cfg.budget) else {
        return Ok(b.budget_hit(cfg, &format!("{q}^{n}")));
    };
    let singer = BigUint::from(points - 1);
    let all = enumerate_nonzero_const(&ctx, n, &cfg.budget)?;
    let results = collect(par_map(cfg, &all, |f| -> Result<_> {
        let c = Mat::companion(f)?;
        Ok((c.order()?, f.is_primitive()?, c.min_char_poly()))
    }))?;
    let (mut primitive, mut full) = (0u64, 0u64);
    for (f, (order, prim, (min, chr))) in all.iter().zip(results) {
        let is_singer = order == singer;
        primitive += u64::from(prim);
        full += u64::from(is_singer);
        if is_singer != prim {
            b.fail(
                Some(f),
                None,
                None,
                format!("order={order} primitive={prim}"),
                format!("order={singer} iff primitive"),
            );
        }
        if min != *f || chr != *f {
            b.fail(
                Some(f),
                None,
                None,
                format!("min={} char={}", min.to_text(), chr.to_text()),
                format!("min={0} char={0}", f.to_text()),
            );
        }
    }
    b.param("singer_order", &singer)
        .param("primitive_count", primitive)
        .param("singer_count", full);
    let total = all.len() as u64;
    Ok(b.finish(cfg, total, total, false))
}

/// Lists the standard `GammaL_a(q^d)` inside `GL_{ad}(q)` and checks that no
/// non-identity element fixes more than `(q^a)^{d-1}` vectors.
pub fn verify_fixed_point_lemma(q: u64, a: usize, d: usize, cfg: &HarnessConfig) -> Result<Report> {
    require_n(a)?;
    require_n(d)?;
    let n = a * d;
    let mut b = Builder::new("fixed-points");
    b.param("q", q).param("a", a).param("d", d).param("n", n);
    let ctx = field_of(q, &cfg.budget)?;
    if points_within(q, n, &cfg.budget).is_none() {
        return Ok(b.budget_hit(cfg, &format!("{q}^{n}")));
    }
    let frame = ExtensionFrame::new(&ctx, d, a, &cfg.budget)?;
    for (k, v) in frame.descriptor() {
        b.param(&format!("frame_{k}"), v);
    }
    let e = StandardExtSubgroup::new(frame);
    let elems = e.elements(EXT_ENUM_LIMIT)?;
    let expected_order = e.order();
    let distinct: HashSet<&Mat> = elems.iter().collect();
    if BigUint::from(distinct.len()) != expected_order || distinct.len() != elems.len() {
        b.fail(
            None,
            None,
            None,
            format!("distinct={} listed={}", distinct.len(), elems.len()),
            &expected_order,
        );
    }
    let bound = BigUint::from(q).pow((a * (d - 1)) as u32);
    let nontrivial: Vec<&Mat> = elems.iter().filter(|m| !m.is_identity()).collect();
    let counts = par_map(cfg, &nontrivial, |m| m.fixed_point_count());
    let mut max_fixed = BigUint::zero();
    for (m, c) in nontrivial.iter().zip(counts) {
        if c > bound {
            b.fail(None, None, Some(m.to_text()), &c, format!("<={bound}"));
        }
        max_fixed = max_fixed.max(c);
    }
    b.param("group_order", &expected_order)
        .param("bound", &bound)
        .param("max_fixed", &max_fixed);
    let total = nontrivial.len() as u64;
    Ok(b.finish(cfg, total, total, false))
}

/// For every admissible `(f, g)`: (i) `C_f^{-1} C_g` fixes at least
/// `q^{n-1}` vectors; (ii) "exclusion-by-order": the order of `<C_f, C_g>`
/// divides no `d * |GL_{n/d}(q^d)|` for `d | n`, `d > 1`. Check (ii) is
/// skipped at `(q, n) = (2, 2)`, where that subgroup is the whole group.
pub fn verify_two_companion(q: u64, n: usize, cfg: &HarnessConfig) -> Result<Report> {
    require_n(n)?;
    let mut b = Builder::new("two-companion");
    base_params(&mut b, q, n);
    let ctx = field_of(q, &cfg.budget)?;
    if points_within(q, n, &cfg.budget).is_none() {
        return Ok(b.budget_hit(cfg, &format!("{q}^{n}")));
    }
    let cases = pair_cases(&ctx, n, &cfg.budget)?;
    let target = gl_order(n, &BigUint::from(q));
    let fixed_bound = BigUint::from(q).pow(n as u32 - 1);
    let skip_ii = (q, n) == (2, 2);
    let divisors = divisors_above_one(n);
    let ext_orders: Vec<(usize, BigUint)> = divisors
        .iter()
        .map(|&d| {
            (
                d,
                BigUint::from(d) * gl_order(n / d, &BigUint::from(q).pow(d as u32)),
            )
        })
        .collect();
    let companions: Vec<Mat> = cases
        .all
        .iter()
        .map(Mat::companion)
        .collect::<Result<_>>()?;
    let results = collect(par_map(cfg, &cases.pairs, |&(fi, gi)| -> Result<_> {
        let h = companions[fi].inv()?.mul(&companions[gi]);
        let fixed = h.fixed_point_count();
        let order = if skip_ii {
            None
        } else {
            Some(order_of(
                &[cases.perms[fi].clone(), cases.perms[gi].clone()],
                &target,
                cfg,
            )?)
        };
        Ok((fixed, order))
    }))?;
    let mut min_fixed: Option<BigUint> = None;
    for (&(fi, gi), (fixed, order)) in cases.pairs.iter().zip(&results) {
        let (f, g) = (&cases.all[fi], &cases.all[gi]);
        if *fixed < fixed_bound {
            b.fail(
                Some(f),
                Some(g),
                Some("check=i".into()),
                fixed,
                format!(">={fixed_bound}"),
            );
        }
        min_fixed = Some(min_fixed.map_or(fixed.clone(), |m| m.min(fixed.clone())));
        if let Some(r) = order {
            for (d, ext) in &ext_orders {
                if (ext % &r.order).is_zero() {
                    b.fail(
                        Some(f),
                        Some(g),
                        Some(format!("check=ii d={d}")),
                        &r.order,
                        format!("does not divide {ext}"),
                    );
                }
            }
            b.oracle(r, Some(f), Some(g), None);
        }
    }
    b.param("fixed_bound", &fixed_bound)
        .param(
            "min_fixed",
            min_fixed.map_or("none".to_string(), |m| m.to_string()),
        )
        .param("divisors", join(&divisors))
        .param(
            "check_ii",
            if skip_ii {
                "skipped: degree-2 field-extension subgroup of GL_2(2) is the whole group"
            } else {
                "exclusion-by-order"
            },
        );
    let total = cases.pairs.len() as u64;
    Ok(b.finish(cfg, total, total, false))
}

fn require_scan(q: u64, n: usize, budget: &Budget) -> Result<BigUint> {
    let order = gl_order(n, &BigUint::from(q));
    if order > BigUint::from(budget.scan) {
        return Err(Error::ScanTooLarge {
            size: order.to_string(),
            limit: budget.scan,
        });
    }
    Ok(order)
}

/// All of `GL_n(q)` as permutations, via a base and strong generating set
/// of the standard generators.
fn gl_elements(
    ctx: &Arc<FieldCtx>,
    n: usize,
    order: &BigUint,
    budget: &Budget,
) -> Result<Vec<Perm>> {
    let gens = gl_standard_generators(ctx, n, budget)?
        .iter()
        .map(|m| matrix_to_perm(m, budget))
        .collect::<Result<Vec<_>>>()?;
    Ok(Bsgs::with_order_bound(&gens, order)?.elements())
}

/// Counts the conjugates `m E m^{-1}` of the standard degree-`d`
/// field-extension subgroup that contain the Singer cycle, scanning every
/// `m` in `GL_n(q)`. Expects exactly one.
pub fn verify_unique_extension(q: u64, n: usize, d: usize, cfg: &HarnessConfig) -> Result<Report> {
    require_n(n)?;
    if d < 2 || !n.is_multiple_of(d) {
        return Err(Error::InvalidParams(format!(
            "d = {d} must divide n = {n} and exceed 1"
        )));
    }
    let mut b = Builder::new("unique-ext");
    base_params(&mut b, q, n);
    b.param("d", d).param("a", n / d);
    let ctx = field_of(q, &cfg.budget)?;
    let gl = require_scan(q, n, &cfg.budget)?;
    if points_within(q, n, &cfg.budget).is_none() {
        return Ok(b.budget_hit(cfg, &format!("{q}^{n}")));
    }
    let (_, s) = singer_generator(&ctx, n, &cfg.budget)?;
    let frame = ExtensionFrame::new(&ctx, d, n / d, &cfg.budget)?;
    for (k, v) in frame.descriptor() {
        b.param(&format!("frame_{k}"), v);
    }
    let e = StandardExtSubgroup::new(frame);
    let e_list = e.elements(EXT_ENUM_LIMIT)?;
    let e_set: HashSet<&Mat> = e_list.iter().collect();
    let group = gl_elements(&ctx, n, &gl, &cfg.budget)?;
    if BigUint::from(group.len()) != gl {
        b.fail(None, None, Some("GL enumeration".into()), group.len(), &gl);
    }
    let results = collect(par_map(cfg, &group, |perm| -> Result<_> {
        let m = perm_to_matrix(perm, &ctx, n);
        let m_inv = m.inv()?;
        let conj = m_inv.mul(&s).mul(&m);
        let by_normalizer = e.contains(&conj)?;
        let by_list = e_set.contains(&conj);
        let key = by_list.then(|| {
            let mut key: Vec<Vec<u32>> = e_list
                .iter()
                .map(|x| m.mul(x).mul(&m_inv).entries().iter().map(|v| v.0).collect())
                .collect();
            key.sort_unstable();
            key
        });
        Ok((by_normalizer, by_list, key, m))
    }))?;
    let mut conjugates = BTreeSet::new();
    let mut containing = 0u64;
    for (by_normalizer, by_list, key, m) in results {
        if by_normalizer != by_list {
            b.fail(
                None,
                None,
                Some(m.to_text()),
                format!("normalizer={by_normalizer}"),
                format!("list={by_list}"),
            );
        }
        if let Some(key) = key {
            containing += 1;
            conjugates.insert(key);
        }
    }
    if conjugates.len() != 1 {
        b.fail(None, None, Some(s.to_text()), conjugates.len(), 1);
    }
    b.param("singer", s.to_text())
        .param("subgroup_order", e.order())
        .param("containing_elements", containing)
        .param("count", conjugates.len());
    let total = group.len() as u64;
    Ok(b.finish(cfg, total, total, false))
}

/// With `s` the Singer generator: for every `x` in `GL_n(q)`, `<s, x>` is
/// either the whole group or has order dividing `d * |GL_{n/d}(q^d)|` for
/// some `d | n`, `d > 1`.
pub fn kantor_scan(q: u64, n: usize, cfg: &HarnessConfig) -> Result<Report> {
    require_n(n)?;
    let mut b = Builder::new("kantor");
    base_params(&mut b, q, n);
    let ctx = field_of(q, &cfg.budget)?;
    let gl = require_scan(q, n, &cfg.budget)?;
    if points_within(q, n, &cfg.budget).is_none() {
        return Ok(b.budget_hit(cfg, &format!("{q}^{n}")));
    }
    let (_, s) = singer_generator(&ctx, n, &cfg.budget)?;
    let ps = matrix_to_perm(&s, &cfg.budget)?;
    let ext_orders: Vec<BigUint> = divisors_above_one(n)
        .into_iter()
        .map(|d| BigUint::from(d) * gl_order(n / d, &BigUint::from(q).pow(d as u32)))
        .collect();
    let group = gl_elements(&ctx, n, &gl, &cfg.budget)?;
    let results = collect(par_map(cfg, &group, |x| {
        order_of(&[ps.clone(), x.clone()], &gl, cfg)
    }))?;
    let mut observed = BTreeSet::new();
    for (x, r) in group.iter().zip(&results) {
        let ok = r.order == gl || ext_orders.iter().any(|e| (e % &r.order).is_zero());
        if !ok {
            let witness = perm_to_matrix(x, &ctx, n).to_text();
            b.fail(
                None,
                None,
                Some(witness),
                &r.order,
                format!("{gl} or a divisor of one of {}", join(&ext_orders)),
            );
        }
        if r.closure.is_some() {
            b.oracle(r, None, None, Some(perm_to_matrix(x, &ctx, n).to_text()));
        }
        observed.insert(r.order.clone());
    }
    b.param("singer", s.to_text())
        .param("group_order", &gl)
        .param("extension_orders", join(&ext_orders))
        .param("orders_observed", join(&observed));
    let total = group.len() as u64;
    Ok(b.finish(cfg, total, total, false))
}

/// Every prime power in `2..=qmax`.
pub fn prime_powers_upto(qmax: u64) -> Vec<u64> {
    (2..=qmax).filter(|&q| prime_power(q).is_some()).collect()
}

/// Runs every harness whose preconditions hold at each `(q, n)` with `q` a
/// prime power at most `qmax`, `n <= nmax` and `q^n` within the point
/// budget.
pub fn sweep(qmax: u64, nmax: usize, cfg: &HarnessConfig) -> Result<Vec<Report>> {
    let mut out = Vec::new();
    for q in prime_powers_upto(qmax) {
        for n in 1..=nmax {
            if points_within(q, n, &cfg.budget).is_none() {
                continue;
            }
            out.push(verify_main_theorem(q, n, cfg)?);
            if is_prime(q) {
                out.push(verify_degos(q, n, cfg)?);
            }
            out.push(verify_singer_lemma(q, n, cfg)?);
            out.push(verify_two_companion(q, n, cfg)?);
            let gl_fits = gl_order(n, &BigUint::from(q)) <= BigUint::from(cfg.budget.scan);
            for d in divisors_above_one(n) {
                let a = n / d;
                let candidates = BigUint::from(q).pow((d * a * a) as u32);
                if candidates <= BigUint::from(EXT_ENUM_LIMIT) {
                    out.push(verify_fixed_point_lemma(q, a, d, cfg)?);
                }
                if gl_fits {
                    out.push(verify_unique_extension(q, n, d, cfg)?);
                }
            }
            if gl_fits {
                out.push(kantor_scan(q, n, cfg)?);
            }
        }
    }
    Ok(out)
}

/// Cases with `cases_total = phi(q^n - 1)/n * ((q-1) q^{n-1} - 1)`.
pub fn expected_main_cases(q: u64, n: usize) -> BigUint {
    let qn = BigUint::from(q).pow(n as u32);
    let m = &qn - 1u32;
    let phi = crate::poly::factor_integer(&m)
        .into_iter()
        .fold(m.clone(), |acc, (p, _)| acc / &p * (&p - 1u32));
    let nonzero = BigUint::from(q - 1) * BigUint::from(q).pow(n as u32 - 1) - BigUint::one();
    phi / BigUint::from(n) * nonzero
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> HarnessConfig {
        HarnessConfig {
            workers: 1,
            oracle_cap: Some(5000),
            ..HarnessConfig::default()
        }
    }

    #[test]
    fn main_small() {
        let r = verify_main_theorem(2, 2, &cfg()).unwrap();
        assert_eq!((r.cases_total, r.failures.len()), (1, 0));
        let r = verify_main_theorem(2, 3, &cfg()).unwrap();
        assert_eq!((r.cases_total, r.failures.len()), (6, 0));
        let r = verify_main_theorem(3, 2, &cfg()).unwrap();
        assert_eq!(r.cases_total, 10);
        assert_eq!(r.param("oracle_mismatches"), Some("0"));
        // g = X^2 - f(0) normalizes <C_f>: the pair generates GammaL_1(9)
        let pairs: Vec<(&str, &str, &str)> = r
            .failures
            .iter()
            .map(|f| {
                (
                    f.f.as_deref().unwrap(),
                    f.g.as_deref().unwrap(),
                    f.observed.as_str(),
                )
            })
            .collect();
        assert_eq!(pairs, [("2,1,1", "1,0,1", "16"), ("2,2,1", "1,0,1", "16")]);
    }

    #[test]
    fn main_over_budget_is_recorded() {
        let mut c = cfg();
        c.budget.points = 10;
        let r = verify_main_theorem(2, 4, &c).unwrap();
        assert!(r.budget_hit && !r.passed());
        assert_eq!(r.cases_checked, 0);
    }

    #[test]
    fn degos_small() {
        let r = verify_degos(2, 3, &cfg()).unwrap();
        assert_eq!((r.cases_total, r.failures.len()), (2, 0));
        assert_eq!(r.param("g"), Some("1,0,0,1"));
        let r = verify_degos(2, 1, &cfg()).unwrap();
        assert_eq!(r.param("excluded_f_equals_g"), Some("true"));
        assert_eq!(r.cases_total, 0);
        assert!(verify_degos(4, 2, &cfg()).is_err());
    }

    #[test]
    fn singer_small() {
        let r = verify_singer_lemma(3, 2, &cfg()).unwrap();
        assert_eq!(r.cases_total, 6);
        assert_eq!(r.param("singer_count"), Some("2"));
        let r = verify_singer_lemma(2, 4, &cfg()).unwrap();
        assert_eq!((r.cases_total, r.failures.len()), (8, 0));
        assert_eq!(r.param("singer_count"), Some("2"));
    }

    #[test]
    fn fixed_points_small() {
        let r = verify_fixed_point_lemma(2, 1, 2, &cfg()).unwrap();
        assert_eq!(r.cases_total, 5);
        assert_eq!(r.param("max_fixed"), Some("2"));
        let r = verify_fixed_point_lemma(2, 1, 3, &cfg()).unwrap();
        assert_eq!(r.cases_total, 20);
        assert_eq!(r.param("max_fixed"), Some("2"));
        assert!(r.passed());
    }

    #[test]
    fn two_companion_small() {
        let r = verify_two_companion(2, 2, &cfg()).unwrap();
        assert!(r.passed());
        assert!(r.param("check_ii").unwrap().starts_with("skipped"));
        assert_eq!(r.param("min_fixed"), Some("2"));
        let r = verify_two_companion(3, 2, &cfg()).unwrap();
        assert_eq!(r.failures.len(), 2);
        assert!(r
            .failures
            .iter()
            .all(|f| f.witness.as_deref() == Some("check=ii d=2")));
        let r = verify_two_companion(2, 3, &cfg()).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn unique_and_kantor_small() {
        let r = verify_unique_extension(3, 2, 2, &cfg()).unwrap();
        assert_eq!(r.param("count"), Some("1"));
        assert_eq!(r.cases_total, 48);
        assert!(r.passed());
        let r = kantor_scan(2, 3, &cfg()).unwrap();
        assert!(r.passed());
        assert_eq!(r.param("orders_observed"), Some("7,21,168"));
        assert!(verify_unique_extension(2, 3, 2, &cfg()).is_err());
    }

    #[test]
    fn worker_count_does_not_change_reports() {
        let mut many = cfg();
        many.workers = 3;
        let mut a = verify_main_theorem(2, 4, &cfg()).unwrap();
        let mut b = verify_main_theorem(2, 4, &many).unwrap();
        a.elapsed_ms = 0;
        b.elapsed_ms = 0;
        assert_eq!(a, b);
    }

    #[test]
    fn counting_identity() {
        assert_eq!(expected_main_cases(2, 3), BigUint::from(6u32));
        assert_eq!(expected_main_cases(3, 2), BigUint::from(10u32));
    }

    #[test]
    fn json_uses_decimal_strings() {
        let r = verify_main_theorem(2, 2, &cfg()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["cases_total"], "1");
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys.len(), 8);
        let back: Report = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }
}
