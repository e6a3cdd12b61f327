//! Dense square matrices over a [`FieldCtx`].
//!
//! Matrices act on column vectors from the left. The companion matrix is
//! stored exactly as displayed in the usual convention: ones on the
//! subdiagonal and `-a_0, ..., -a_{n-1}` down the last column.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::gf::{Elem, FieldCtx};
use crate::permgrp::gl_order;
use crate::poly::{factor_integer, Poly};

/// Above this bound on `|GL_n(q)|`, element orders are found by stripping
/// prime factors from the group order instead of iterating powers.
pub const ORDER_BRUTE_LIMIT: u64 = 1 << 16;

#[derive(Clone)]
pub struct Mat {
    ctx: Arc<FieldCtx>,
    n: usize,
    /// Row-major.
    entries: Vec<Elem>,
}

impl PartialEq for Mat {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && *self.ctx == *other.ctx && self.entries == other.entries
    }
}

impl Eq for Mat {}

impl Hash for Mat {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.entries.hash(state);
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.n)
            .map(|i| {
                let row: Vec<String> = self.row(i).iter().map(|e| e.0.to_string()).collect();
                format!("[{}]", row.join(", "))
            })
            .collect();
        write!(
            f,
            "[{}] over GF({})",
            rows.join(", "),
            self.ctx.descriptor()
        )
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Mat {
    pub fn zeros(ctx: Arc<FieldCtx>, n: usize) -> Mat {
        Mat {
            ctx,
            n,
            entries: vec![Elem::ZERO; n * n],
        }
    }

    pub fn identity(ctx: Arc<FieldCtx>, n: usize) -> Mat {
        Mat::scalar(ctx, n, Elem::ONE)
    }

    pub fn scalar(ctx: Arc<FieldCtx>, n: usize, c: Elem) -> Mat {
        let mut m = Mat::zeros(ctx, n);
        for i in 0..n {
            m.set(i, i, c);
        }
        m
    }

    pub fn from_entries(ctx: Arc<FieldCtx>, n: usize, entries: Vec<Elem>) -> Mat {
        assert_eq!(entries.len(), n * n, "expected {n}x{n} entries");
        Mat { ctx, n, entries }
    }

    /// Builds from rows of raw encodings, checking shape and range.
    pub fn from_rows(ctx: Arc<FieldCtx>, rows: &[Vec<u32>]) -> Result<Mat> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch(n, row.len()));
            }
            for &v in row {
                entries.push(ctx.elem(v)?);
            }
        }
        Ok(Mat { ctx, n, entries })
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Elem] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.entries[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<Elem> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| self.get(i, j) == if i == j { Elem::ONE } else { Elem::ZERO })
        })
    }

    fn check_compatible(&self, other: &Mat) -> Result<()> {
        if *self.ctx != *other.ctx {
            return Err(Error::MixedFields(
                self.ctx.descriptor(),
                other.ctx.descriptor(),
            ));
        }
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        Ok(())
    }

    /// Product with field and shape checks.
    pub fn try_mul(&self, other: &Mat) -> Result<Mat> {
        self.check_compatible(other)?;
        Ok(self.mul(other))
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        debug_assert!(self.check_compatible(other).is_ok());
        let n = self.n;
        let ctx = &self.ctx;
        let mut out = vec![Elem::ZERO; n * n];
        for i in 0..n {
            for l in 0..n {
                let a = self.entries[i * n + l];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let idx = i * n + j;
                    out[idx] = ctx.add(out[idx], ctx.mul(a, other.entries[l * n + j]));
                }
            }
        }
        Mat::from_entries(ctx.clone(), n, out)
    }

    pub fn mul_vec(&self, v: &[Elem]) -> Vec<Elem> {
        let ctx = &self.ctx;
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Elem::ZERO, |acc, (&a, &b)| ctx.add(acc, ctx.mul(a, b)))
            })
            .collect()
    }

    pub fn add(&self, other: &Mat) -> Mat {
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| self.ctx.add(a, b))
            .collect();
        Mat::from_entries(self.ctx.clone(), self.n, entries)
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| self.ctx.sub(a, b))
            .collect();
        Mat::from_entries(self.ctx.clone(), self.n, entries)
    }

    pub fn scale(&self, c: Elem) -> Mat {
        let entries = self.entries.iter().map(|&a| self.ctx.mul(a, c)).collect();
        Mat::from_entries(self.ctx.clone(), self.n, entries)
    }

    /// Applies `f` entrywise, e.g. a field automorphism.
    pub fn map(&self, f: impl Fn(Elem) -> Elem) -> Mat {
        Mat::from_entries(
            self.ctx.clone(),
            self.n,
            self.entries.iter().map(|&a| f(a)).collect(),
        )
    }

    pub fn pow(&self, e: &BigUint) -> Mat {
        let mut acc = Mat::identity(self.ctx.clone(), self.n);
        for i in (0..e.bits()).rev() {
            acc = acc.mul(&acc);
            if e.bit(i) {
                acc = acc.mul(self);
            }
        }
        acc
    }

    /// Row reduction with first-nonzero pivoting. Returns rank and the
    /// determinant (zero when rank-deficient).
    fn echelon(&self) -> (usize, Elem) {
        let n = self.n;
        let ctx = &self.ctx;
        let mut a = self.entries.clone();
        let mut det = Elem::ONE;
        let mut rank = 0;
        for col in 0..n {
            let Some(piv) = (rank..n).find(|&r| !a[r * n + col].is_zero()) else {
                det = Elem::ZERO;
                continue;
            };
            if piv != rank {
                for j in 0..n {
                    a.swap(piv * n + j, rank * n + j);
                }
                det = ctx.neg(det);
            }
            let pv = a[rank * n + col];
            det = ctx.mul(det, pv);
            let pinv = ctx.inv(pv).expect("pivot is nonzero");
            for r in rank + 1..n {
                let factor = ctx.mul(a[r * n + col], pinv);
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] = ctx.sub(a[r * n + j], ctx.mul(factor, a[rank * n + j]));
                }
            }
            rank += 1;
        }
        (rank, det)
    }

    pub fn det(&self) -> Elem {
        self.echelon().1
    }

    pub fn rank(&self) -> usize {
        self.echelon().0
    }

    /// Gauss-Jordan inverse.
    pub fn inv(&self) -> Result<Mat> {
        let n = self.n;
        let ctx = &self.ctx;
        let w = 2 * n;
        let mut a = vec![Elem::ZERO; n * w];
        for i in 0..n {
            a[i * w..i * w + n].copy_from_slice(self.row(i));
            a[i * w + n + i] = Elem::ONE;
        }
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| !a[r * w + col].is_zero())
                .ok_or(Error::SingularMatrix)?;
            if piv != col {
                for j in 0..w {
                    a.swap(piv * w + j, col * w + j);
                }
            }
            let pinv = ctx.inv(a[col * w + col])?;
            for j in 0..w {
                a[col * w + j] = ctx.mul(a[col * w + j], pinv);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[r * w + col];
                if factor.is_zero() {
                    continue;
                }
                for j in 0..w {
                    a[r * w + j] = ctx.sub(a[r * w + j], ctx.mul(factor, a[col * w + j]));
                }
            }
        }
        let entries = (0..n)
            .flat_map(|i| a[i * w + n..(i + 1) * w].to_vec())
            .collect();
        Ok(Mat::from_entries(ctx.clone(), n, entries))
    }

    /// Companion matrix of `f`, after dividing `f` by its leading coefficient.
    pub fn companion(f: &Poly) -> Result<Mat> {
        let n = f.degree().ok_or(Error::ZeroPolynomial)?;
        if n == 0 {
            return Err(Error::DegreeZero);
        }
        let f = f.monic()?;
        let ctx = f.ctx().clone();
        let mut m = Mat::zeros(ctx.clone(), n);
        for i in 0..n - 1 {
            m.set(i + 1, i, Elem::ONE);
        }
        for i in 0..n {
            m.set(i, n - 1, ctx.neg(f.coeff(i)));
        }
        Ok(m)
    }

    /// Characteristic polynomial `det(X*I - A)` through reduction to upper
    /// Hessenberg form. Valid in every characteristic.
    pub fn char_poly(&self) -> Poly {
        let n = self.n;
        let ctx = self.ctx.clone();
        let mut h = self.entries.clone();
        for m in 1..n.saturating_sub(1) {
            let Some(piv) = (m..n).find(|&i| !h[i * n + m - 1].is_zero()) else {
                continue;
            };
            if piv != m {
                for j in 0..n {
                    h.swap(piv * n + j, m * n + j);
                }
                for i in 0..n {
                    h.swap(i * n + piv, i * n + m);
                }
            }
            let t_inv = ctx.inv(h[m * n + m - 1]).expect("pivot is nonzero");
            for i in m + 1..n {
                let u = ctx.mul(h[i * n + m - 1], t_inv);
                if u.is_zero() {
                    continue;
                }
                for j in 0..n {
                    h[i * n + j] = ctx.sub(h[i * n + j], ctx.mul(u, h[m * n + j]));
                }
                for j in 0..n {
                    h[j * n + m] = ctx.add(h[j * n + m], ctx.mul(u, h[j * n + i]));
                }
            }
        }
        // 1-indexed access into the Hessenberg form
        let at = |i: usize, j: usize| h[(i - 1) * n + (j - 1)];
        let x = Poly::x(ctx.clone());
        let mut ps = vec![Poly::one(ctx.clone())];
        for m in 1..=n {
            let lin = x.sub(&Poly::new(ctx.clone(), vec![at(m, m)]));
            let mut pm = lin.mul(&ps[m - 1]);
            let mut t = Elem::ONE;
            for i in 1..m {
                t = ctx.mul(t, at(m - i + 1, m - i));
                let c = ctx.mul(t, at(m - i, m));
                pm = pm.sub(&ps[m - i - 1].scale(c));
            }
            ps.push(pm);
        }
        ps.pop().expect("at least p_0")
    }

    /// Minimal polynomial: the first monic linear relation among
    /// `I, A, A^2, ...` viewed as vectors of length `n^2`.
    pub fn min_poly(&self) -> Poly {
        let ctx = self.ctx.clone();
        let len = self.n * self.n;
        // reduced rows: (pivot column, vector, combination of powers)
        let mut basis: Vec<(usize, Vec<Elem>, Vec<Elem>)> = Vec::new();
        let mut power = Mat::identity(ctx.clone(), self.n);
        for k in 0..=self.n {
            let mut v = power.entries.clone();
            let mut comb = vec![Elem::ZERO; self.n + 1];
            comb[k] = Elem::ONE;
            for (pc, row, rc) in &basis {
                let factor = v[*pc];
                if factor.is_zero() {
                    continue;
                }
                for j in 0..len {
                    v[j] = ctx.sub(v[j], ctx.mul(factor, row[j]));
                }
                for j in 0..=self.n {
                    comb[j] = ctx.sub(comb[j], ctx.mul(factor, rc[j]));
                }
            }
            match v.iter().position(|e| !e.is_zero()) {
                None => return Poly::new(ctx, comb),
                Some(pc) => {
                    let inv = ctx.inv(v[pc]).expect("nonzero pivot");
                    let v = v.iter().map(|&e| ctx.mul(e, inv)).collect();
                    let comb = comb.iter().map(|&e| ctx.mul(e, inv)).collect();
                    basis.push((pc, v, comb));
                }
            }
            power = power.mul(self);
        }
        unreachable!("Cayley-Hamilton bounds the minimal polynomial degree by n")
    }

    /// `(minimal, characteristic)`.
    pub fn min_char_poly(&self) -> (Poly, Poly) {
        (self.min_poly(), self.char_poly())
    }

    /// Least `m >= 1` with `A^m = I`.
    pub fn order(&self) -> Result<BigUint> {
        if self.det().is_zero() {
            return Err(Error::SingularMatrix);
        }
        let q = BigUint::from(self.ctx.order());
        let bound = gl_order(self.n, &q);
        if bound.to_u64().is_some_and(|b| b <= ORDER_BRUTE_LIMIT) {
            let mut m = 1u64;
            let mut power = self.clone();
            while !power.is_identity() {
                power = power.mul(self);
                m += 1;
            }
            return Ok(BigUint::from(m));
        }
        let mut m = bound;
        for (r, e) in gl_order_factorization(self.n, &self.ctx) {
            for _ in 0..e {
                let cand = &m / &r;
                if self.pow(&cand).is_identity() {
                    m = cand;
                } else {
                    break;
                }
            }
        }
        Ok(m)
    }

    /// Number of vectors `v` (zero included) with `Av = v`:
    /// `q^{n - rank(A - I)}`.
    pub fn fixed_point_count(&self) -> BigUint {
        let moved = self.sub(&Mat::identity(self.ctx.clone(), self.n));
        let free = self.n - moved.rank();
        BigUint::from(self.ctx.order()).pow(free as u32)
    }

    /// `n` lines of `n` space-separated encodings.
    pub fn to_text(&self) -> String {
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|e| e.0.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn parse(ctx: Arc<FieldCtx>, text: &str) -> Result<Mat> {
        let mats = parse_generator_file(ctx, None, text)?;
        match mats.len() {
            1 => Ok(mats.into_iter().next().unwrap()),
            k => Err(Error::Parse {
                line: 1,
                msg: format!("expected one matrix, found {k}"),
            }),
        }
    }
}

/// Parses matrices separated by blank lines. `#` starts a comment; lines
/// holding only a comment are skipped. When `n` is given every block must
/// be `n x n`.
pub fn parse_generator_file(ctx: Arc<FieldCtx>, n: Option<usize>, text: &str) -> Result<Vec<Mat>> {
    let mut blocks: Vec<Vec<(usize, Vec<u32>)>> = vec![Vec::new()];
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            if !raw.contains('#') && !blocks.last().unwrap().is_empty() {
                blocks.push(Vec::new());
            }
            continue;
        }
        let row = body
            .split_whitespace()
            .map(|t| {
                t.parse::<u32>().map_err(|_| Error::Parse {
                    line,
                    msg: format!("`{t}` is not an element encoding"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        blocks.last_mut().unwrap().push((line, row));
    }
    let mut out = Vec::new();
    for block in blocks.into_iter().filter(|b| !b.is_empty()) {
        let dim = n.unwrap_or(block.len());
        let first = block[0].0;
        if block.len() != dim {
            return Err(Error::Parse {
                line: first,
                msg: format!(
                    "matrix starting here has {} rows, expected {dim}",
                    block.len()
                ),
            });
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for (line, row) in &block {
            if row.len() != dim {
                return Err(Error::Parse {
                    line: *line,
                    msg: format!("row has {} entries, expected {dim}", row.len()),
                });
            }
            for &v in row {
                entries.push(ctx.elem(v).map_err(|_| Error::Parse {
                    line: *line,
                    msg: format!("{v} is not an element of GF({})", ctx.descriptor()),
                })?);
            }
        }
        out.push(Mat::from_entries(ctx.clone(), dim, entries));
    }
    if out.is_empty() {
        return Err(Error::Parse {
            line: 1,
            msg: "no matrices found".into(),
        });
    }
    Ok(out)
}

/// Prime factorization of `|GL_n(q)| = q^{n(n-1)/2} * prod_{i=1..n} (q^i - 1)`,
/// assembled from the factors of each term.
pub fn gl_order_factorization(n: usize, ctx: &FieldCtx) -> Vec<(BigUint, u32)> {
    let mut acc: BTreeMap<BigUint, u32> = BTreeMap::new();
    let p_exp = ctx.degree() as usize * n * n.saturating_sub(1) / 2;
    if p_exp > 0 {
        *acc.entry(BigUint::from(ctx.characteristic())).or_default() += p_exp as u32;
    }
    let q = BigUint::from(ctx.order());
    for i in 1..=n {
        let term = q.pow(i as u32) - BigUint::one();
        for (r, e) in factor_integer(&term) {
            *acc.entry(r).or_default() += e;
        }
    }
    acc.into_iter().collect()
}
