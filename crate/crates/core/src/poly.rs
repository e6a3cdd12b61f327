//! Univariate polynomials over a [`FieldCtx`], irreducibility and primitivity
//! tests, and the ordered polynomial families the harnesses quantify over.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::gf::{Elem, FieldCtx};
use crate::Budget;

/// A polynomial with coefficients stored low-degree-first. The highest
/// stored coefficient is nonzero; the zero polynomial has no coefficients.
#[derive(Clone)]
pub struct Poly {
    ctx: Arc<FieldCtx>,
    coeffs: Vec<Elem>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        *self.ctx == *other.ctx && self.coeffs == other.coeffs
    }
}

impl Eq for Poly {}

impl Hash for Poly {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over GF({})", self, self.ctx.descriptor())
    }
}

/// Pretty form, e.g. `X^2+X+1`. Coefficients other than 1 are printed as
/// their element encodings.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (deg, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (deg, c.0) {
                (0, v) => write!(f, "{v}")?,
                (1, 1) => write!(f, "X")?,
                (1, v) => write!(f, "{v}X")?,
                (d, 1) => write!(f, "X^{d}")?,
                (d, v) => write!(f, "{v}X^{d}")?,
            }
        }
        Ok(())
    }
}

/// Which operation [`poly_arithmetic`] performs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Mul,
    Rem,
    Gcd,
}

impl Poly {
    pub fn new(ctx: Arc<FieldCtx>, mut coeffs: Vec<Elem>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { ctx, coeffs }
    }

    /// Builds from raw encodings, rejecting values outside the field.
    pub fn from_values(ctx: Arc<FieldCtx>, values: &[u32]) -> Result<Poly> {
        let coeffs = values.iter().map(|&v| ctx.elem(v)).collect::<Result<_>>()?;
        Ok(Poly::new(ctx, coeffs))
    }

    pub fn zero(ctx: Arc<FieldCtx>) -> Poly {
        Poly {
            ctx,
            coeffs: Vec::new(),
        }
    }

    pub fn one(ctx: Arc<FieldCtx>) -> Poly {
        Poly {
            ctx,
            coeffs: vec![Elem::ONE],
        }
    }

    /// The indeterminate `X`.
    pub fn x(ctx: Arc<FieldCtx>) -> Poly {
        Poly {
            ctx,
            coeffs: vec![Elem::ZERO, Elem::ONE],
        }
    }

    /// `X^n - 1`.
    pub fn x_pow_minus_one(ctx: Arc<FieldCtx>, n: usize) -> Poly {
        let mut coeffs = vec![Elem::ZERO; n + 1];
        coeffs[0] = ctx.neg(Elem::ONE);
        coeffs[n] = ctx.add(coeffs[n], Elem::ONE);
        Poly::new(ctx, coeffs)
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    /// Coefficient of `X^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(Elem::ZERO)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [Elem::ONE]
    }

    pub fn leading(&self) -> Option<Elem> {
        self.coeffs.last().copied()
    }

    pub fn constant_term(&self) -> Elem {
        self.coeff(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(Elem::ONE)
    }

    fn same_field(&self, other: &Poly) -> Result<()> {
        if *self.ctx != *other.ctx {
            return Err(Error::MixedFields(
                self.ctx.descriptor(),
                other.ctx.descriptor(),
            ));
        }
        Ok(())
    }

    /// Divides through by the leading coefficient.
    pub fn monic(&self) -> Result<Poly> {
        let lead = self.leading().ok_or(Error::ZeroPolynomial)?;
        let inv = self.ctx.inv(lead)?;
        Ok(self.scale(inv))
    }

    pub fn scale(&self, c: Elem) -> Poly {
        let coeffs = self.coeffs.iter().map(|&a| self.ctx.mul(a, c)).collect();
        Poly::new(self.ctx.clone(), coeffs)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert!(*self.ctx == *other.ctx);
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| self.ctx.add(self.coeff(i), other.coeff(i)))
            .collect();
        Poly::new(self.ctx.clone(), coeffs)
    }

    pub fn neg(&self) -> Poly {
        let coeffs = self.coeffs.iter().map(|&a| self.ctx.neg(a)).collect();
        Poly::new(self.ctx.clone(), coeffs)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert!(*self.ctx == *other.ctx);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.ctx.clone());
        }
        let mut coeffs = vec![Elem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = self.ctx.add(coeffs[i + j], self.ctx.mul(a, b));
            }
        }
        Poly::new(self.ctx.clone(), coeffs)
    }

    /// Quotient and remainder.
    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        self.same_field(divisor)?;
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let ctx = &self.ctx;
        let lead_inv = ctx.inv(divisor.coeffs[dd])?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Elem::ZERO; rem.len().saturating_sub(dd)];
        while rem.len() > dd {
            let top = rem.len() - 1;
            let c = ctx.mul(rem[top], lead_inv);
            if !c.is_zero() {
                let shift = top - dd;
                quot[shift] = c;
                for (i, &b) in divisor.coeffs.iter().enumerate() {
                    rem[shift + i] = ctx.sub(rem[shift + i], ctx.mul(c, b));
                }
            }
            rem.pop();
        }
        Ok((Poly::new(ctx.clone(), quot), Poly::new(ctx.clone(), rem)))
    }

    pub fn rem(&self, divisor: &Poly) -> Result<Poly> {
        Ok(self.div_rem(divisor)?.1)
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Result<Poly> {
        self.same_field(other)?;
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        if a.is_zero() {
            Ok(a)
        } else {
            a.monic()
        }
    }

    pub fn eval(&self, x: Elem) -> Elem {
        self.coeffs
            .iter()
            .rev()
            .fold(Elem::ZERO, |acc, &c| self.ctx.add(self.ctx.mul(acc, x), c))
    }

    /// `self^e mod modulus`.
    pub fn pow_mod(&self, e: &BigUint, modulus: &Poly) -> Result<Poly> {
        let base = self.rem(modulus)?;
        let mut acc = Poly::one(self.ctx.clone()).rem(modulus)?;
        for i in (0..e.bits()).rev() {
            acc = acc.mul(&acc).rem(modulus)?;
            if e.bit(i) {
                acc = acc.mul(&base).rem(modulus)?;
            }
        }
        Ok(acc)
    }

    /// The coefficient vector read as a base-`q` integer, low digit first.
    /// This is the canonical ordering key for enumeration and reports.
    pub fn index(&self) -> BigUint {
        let q = BigUint::from(self.ctx.order());
        self.coeffs
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, c| acc * &q + BigUint::from(c.0))
    }

    /// Comma-separated encodings, low-degree-first (`"1,1,1"` is `X^2+X+1`).
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.0.to_string()).collect();
        parts.join(",")
    }

    /// Accepts both the comma-separated form and the pretty form.
    pub fn parse(ctx: Arc<FieldCtx>, s: &str) -> Result<Poly> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = |msg: &str| Error::Parse {
            line: 1,
            msg: format!("{msg} in polynomial `{s}`"),
        };
        if s.is_empty() {
            return Err(bad("empty input"));
        }
        if !s.contains(['X', 'x']) {
            let values = s
                .split(',')
                .map(|t| t.parse::<u32>().map_err(|_| bad("bad coefficient")))
                .collect::<Result<Vec<_>>>()?;
            return Poly::from_values(ctx, &values);
        }
        let mut values: Vec<u32> = Vec::new();
        for term in s.split('+') {
            let (coef, power) = match term.find(['X', 'x']) {
                None => (term, 0usize),
                Some(pos) => {
                    let coef = term[..pos].trim_end_matches('*');
                    let rest = &term[pos + 1..];
                    let power = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^')
                            .and_then(|e| e.parse().ok())
                            .ok_or_else(|| bad("bad exponent"))?
                    };
                    (coef, power)
                }
            };
            let c = if coef.is_empty() && power > 0 {
                1
            } else {
                coef.parse::<u32>().map_err(|_| bad("bad coefficient"))?
            };
            let c = ctx.elem(c)?;
            if values.len() <= power {
                values.resize(power + 1, 0);
            }
            values[power] = ctx.add(Elem(values[power]), c).0;
        }
        Poly::from_values(ctx, &values)
    }

    /// Irreducibility via `X^{q^n} = X mod f` and
    /// `gcd(X^{q^{n/r}} - X, f) = 1` for every prime `r | n`.
    pub fn is_irreducible(&self) -> Result<bool> {
        let n = match self.degree() {
            None | Some(0) => return Err(Error::ConstantPolynomial),
            Some(n) => n,
        };
        if n == 1 {
            return Ok(true);
        }
        let f = self.monic()?;
        let q = BigUint::from(self.ctx.order());
        let x = Poly::x(self.ctx.clone());
        // frob[j] = X^{q^{j+1}} mod f
        let mut frob = Vec::with_capacity(n);
        let mut cur = x.clone();
        for _ in 0..n {
            cur = cur.pow_mod(&q, &f)?;
            frob.push(cur.clone());
        }
        if frob[n - 1] != x {
            return Ok(false);
        }
        for (r, _) in factor_u64(n as u64) {
            let h = frob[n / r as usize - 1].sub(&x);
            if h.gcd(&f)?.degree() != Some(0) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// True iff this monic `f` is irreducible and `X mod f` has
    /// multiplicative order `q^n - 1`.
    pub fn is_primitive(&self) -> Result<bool> {
        let n = match self.degree() {
            None | Some(0) => return Err(Error::ConstantPolynomial),
            Some(n) => n,
        };
        if !self.is_monic() {
            return Err(Error::NotMonic);
        }
        if self.constant_term().is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        if !self.is_irreducible()? {
            return Ok(false);
        }
        let group = BigUint::from(self.ctx.order()).pow(n as u32) - 1u32;
        let x = Poly::x(self.ctx.clone()).rem(self)?;
        if !x.pow_mod(&group, self)?.is_one() {
            return Ok(false);
        }
        for (r, _) in factor_integer(&group) {
            if x.pow_mod(&(&group / &r), self)?.is_one() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Checked binary polynomial operation.
pub fn poly_arithmetic(u: &Poly, v: &Poly, op: PolyOp) -> Result<Poly> {
    u.same_field(v)?;
    match op {
        PolyOp::Add => Ok(u.add(v)),
        PolyOp::Mul => Ok(u.mul(v)),
        PolyOp::Rem => u.rem(v),
        PolyOp::Gcd => u.gcd(v),
    }
}

pub fn is_irreducible(f: &Poly) -> Result<bool> {
    f.is_irreducible()
}

pub fn is_primitive_poly(f: &Poly) -> Result<bool> {
    f.is_primitive()
}

/// Every monic degree-`n` polynomial with nonzero constant term, ascending
/// by [`Poly::index`].
pub fn enumerate_nonzero_const(
    ctx: &Arc<FieldCtx>,
    n: usize,
    budget: &Budget,
) -> Result<Vec<Poly>> {
    if n == 0 {
        return Err(Error::InvalidParams("degree must be at least 1".into()));
    }
    let q = ctx.order() as u64;
    let total = crate::checked_pow(q, n as u32).unwrap_or(u64::MAX);
    budget.check_points("q^n", total)?;
    let mut out = Vec::with_capacity((total - total / q) as usize);
    for idx in 0..total {
        if idx % q == 0 {
            continue;
        }
        let mut rest = idx;
        let mut coeffs = Vec::with_capacity(n + 1);
        for _ in 0..n {
            coeffs.push(Elem((rest % q) as u32));
            rest /= q;
        }
        coeffs.push(Elem::ONE);
        out.push(Poly::new(ctx.clone(), coeffs));
    }
    Ok(out)
}

/// Every monic primitive polynomial of degree `n`, ascending by
/// [`Poly::index`].
pub fn enumerate_primitive(ctx: &Arc<FieldCtx>, n: usize, budget: &Budget) -> Result<Vec<Poly>> {
    let mut out = Vec::new();
    for f in enumerate_nonzero_const(ctx, n, budget)? {
        if f.is_primitive()? {
            out.push(f);
        }
    }
    Ok(out)
}

/// Prime factorization by trial division, ascending primes.
pub fn factor_u64(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= m {
        if m.is_multiple_of(d) {
            let mut e = 0;
            while m.is_multiple_of(d) {
                m /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

/// Prime factorization by trial division; `1` factors as the empty list.
pub fn factor_integer(m: &BigUint) -> Vec<(BigUint, u32)> {
    if let Some(small) = m.to_u64() {
        return factor_u64(small)
            .into_iter()
            .map(|(p, e)| (BigUint::from(p), e))
            .collect();
    }
    let mut m = m.clone();
    let mut out = Vec::new();
    let mut d = BigUint::from(2u32);
    while &d * &d <= m {
        if (&m % &d).is_zero() {
            let mut e = 0;
            while (&m % &d).is_zero() {
                m /= &d;
                e += 1;
            }
            out.push((d.clone(), e));
        }
        d += BigUint::one();
    }
    if m > BigUint::one() {
        out.push((m, 1));
    }
    out
}
