//! Exact arithmetic in `F_p` and `F_{p^k}`.
//!
//! An element is stored as the base-`p` integer whose digits (low first) are
//! its coordinates in the power basis of the field's defining modulus. That
//! integer is both the in-memory handle ([`Elem`]) and the text encoding.
//! Multiplication goes through exp/log tables built once per field, and
//! addition in proper extensions through a Zech logarithm table.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::poly::{factor_integer, Poly};
use crate::Budget;

/// A field element, encoded as a base-`p` integer in `[0, q)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

const NO_LOG: u32 = u32::MAX;

/// The finite field `F_q`, `q = p^k`, with its canonical defining modulus.
pub struct FieldCtx {
    p: u32,
    k: u32,
    q: u32,
    /// Monic irreducible of degree `k` over `F_p`, low-degree-first. `None`
    /// for prime fields.
    modulus: Option<Vec<u32>>,
    /// `exp[i] = g^i` for `i < 2(q-1)`, `g` the least primitive element.
    exp: Vec<u32>,
    log: Vec<u32>,
    /// `zech[i] = log(1 + g^i)`, or `NO_LOG` when `1 + g^i = 0`.
    zech: Vec<u32>,
    neg: Vec<u32>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.descriptor())
    }
}

impl PartialEq for FieldCtx {
    // The modulus is a function of (p, k), so these two numbers identify the field.
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k
    }
}

impl Eq for FieldCtx {}

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Builds the canonical `F_{p^k}` under the default budget.
pub fn make_field(p: u64, k: u32) -> Result<Arc<FieldCtx>> {
    FieldCtx::new(p, k, &Budget::default())
}

/// Splits a prime power into `(p, k)`, or `None` if `q` is not one.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

/// Parses a field descriptor: either `"p^k"` or a plain prime power.
pub fn parse_field_descriptor(s: &str) -> Result<(u64, u32)> {
    let bad = || Error::InvalidParams(format!("`{s}` is not a prime power"));
    let s = s.trim();
    if let Some((p, k)) = s.split_once('^') {
        let p: u64 = p.trim().parse().map_err(|_| bad())?;
        let k: u32 = k.trim().parse().map_err(|_| bad())?;
        if !is_prime(p) || k == 0 {
            return Err(bad());
        }
        Ok((p, k))
    } else {
        let q: u64 = s.parse().map_err(|_| bad())?;
        prime_power(q).ok_or_else(bad)
    }
}

impl FieldCtx {
    /// Builds `F_{p^k}` with the lexicographically first monic irreducible
    /// modulus (coefficients read as a base-`p` integer, low digit first).
    pub fn new(p: u64, k: u32, budget: &Budget) -> Result<Arc<FieldCtx>> {
        if !is_prime(p) {
            return Err(Error::NonPrimeCharacteristic(p));
        }
        if k == 0 {
            return Err(Error::InvalidParams(
                "extension degree must be at least 1".into(),
            ));
        }
        let q = crate::checked_pow(p, k).ok_or_else(|| Error::BudgetExceeded {
            what: "field order",
            size: format!("{p}^{k}"),
            limit: budget.points,
        })?;
        budget.check_points("field order", q)?;
        let p = p as u32;
        if k == 1 {
            return Ok(Arc::new(Self::with_modulus(p, 1, None)));
        }
        let prime = Arc::new(Self::with_modulus(p, 1, None));
        let mut coeffs = vec![Elem::ZERO; k as usize + 1];
        coeffs[k as usize] = Elem::ONE;
        for idx in 0..(q as u32) {
            let mut rest = idx;
            for c in coeffs.iter_mut().take(k as usize) {
                *c = Elem(rest % p);
                rest /= p;
            }
            let f = Poly::new(prime.clone(), coeffs.clone());
            if f.is_irreducible()? {
                let modulus = coeffs.iter().map(|c| c.0).collect();
                return Ok(Arc::new(Self::with_modulus(p, k, Some(modulus))));
            }
        }
        unreachable!("an irreducible polynomial of every degree exists over F_p")
    }

    fn with_modulus(p: u32, k: u32, modulus: Option<Vec<u32>>) -> FieldCtx {
        let q = p.pow(k);
        let mut ctx = FieldCtx {
            p,
            k,
            q,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
            zech: Vec::new(),
            neg: Vec::new(),
        };
        ctx.neg = (0..q)
            .map(|a| {
                let digits: Vec<u32> = ctx.digits(Elem(a)).iter().map(|&d| (p - d) % p).collect();
                ctx.from_digits(&digits).0
            })
            .collect();
        ctx.build_tables();
        ctx
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let (p, k) = (self.p as u64, self.k as usize);
        let da = self.digits(Elem(a));
        let db = self.digits(Elem(b));
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        if let Some(m) = &self.modulus {
            // t^k = -(m_0 + ... + m_{k-1} t^{k-1})
            for top in (k..prod.len()).rev() {
                let c = prod[top];
                if c == 0 {
                    continue;
                }
                prod[top] = 0;
                for (i, &mi) in m.iter().take(k).enumerate() {
                    let idx = top - k + i;
                    prod[idx] = (prod[idx] + (p - c) * mi as u64) % p;
                }
            }
        }
        let digits: Vec<u32> = prod.iter().take(k).map(|&d| d as u32).collect();
        self.from_digits(&digits).0
    }

    fn slow_add(&self, a: u32, b: u32) -> u32 {
        let da = self.digits(Elem(a));
        let db = self.digits(Elem(b));
        let digits: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        self.from_digits(&digits).0
    }

    fn build_tables(&mut self) {
        let q = self.q;
        let order = q - 1;
        let mut generator = 1;
        if q > 2 {
            generator = (2..q)
                .find(|&g| {
                    let mut x = g;
                    let mut n = 1;
                    while x != 1 {
                        x = self.slow_mul(x, g);
                        n += 1;
                    }
                    n == order
                })
                .expect("the multiplicative group of a finite field is cyclic");
        }
        let mut exp = Vec::with_capacity(2 * order as usize);
        let mut log = vec![NO_LOG; q as usize];
        let mut x = 1;
        for i in 0..order {
            exp.push(x);
            log[x as usize] = i;
            x = self.slow_mul(x, generator);
        }
        exp.extend_from_within(..);
        self.zech = (0..order)
            .map(|i| {
                let s = self.slow_add(1, exp[i as usize]);
                if s == 0 {
                    NO_LOG
                } else {
                    log[s as usize]
                }
            })
            .collect();
        self.exp = exp;
        self.log = log;
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Defining modulus over `F_p`, monic and low-degree-first; `None` for a
    /// prime field.
    pub fn modulus(&self) -> Option<&[u32]> {
        self.modulus.as_deref()
    }

    /// `"p^k"`.
    pub fn descriptor(&self) -> String {
        format!("{}^{}", self.p, self.k)
    }

    /// The least primitive element; it generates the internal log tables.
    pub fn primitive_element(&self) -> Elem {
        Elem(self.exp[1])
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.q).map(Elem)
    }

    /// Coordinates in the power basis of the modulus, low-degree-first.
    pub fn digits(&self, a: Elem) -> Vec<u32> {
        let mut rest = a.0;
        (0..self.k)
            .map(|_| {
                let d = rest % self.p;
                rest /= self.p;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, digits: &[u32]) -> Elem {
        debug_assert!(digits.len() <= self.k as usize);
        Elem(
            digits
                .iter()
                .rev()
                .fold(0, |acc, &d| acc * self.p + d % self.p),
        )
    }

    /// The image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.p as i64) as u32)
    }

    /// Checks that an encoding denotes an element of this field.
    pub fn elem(&self, value: u32) -> Result<Elem> {
        if value >= self.q {
            return Err(Error::InvalidParams(format!(
                "{value} is not an element of GF({})",
                self.descriptor()
            )));
        }
        Ok(Elem(value))
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            return Elem(a.0 ^ b.0);
        }
        if self.k == 1 {
            return Elem((a.0 + b.0) % self.p);
        }
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let order = self.q - 1;
        let la = self.log[a.0 as usize];
        let lb = self.log[b.0 as usize];
        let diff = if lb >= la { lb - la } else { lb + order - la };
        match self.zech[diff as usize] {
            NO_LOG => Elem::ZERO,
            z => Elem(self.exp[(la + z) as usize]),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        Elem(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let order = self.q - 1;
        let l = self.log[a.0 as usize];
        Ok(Elem(self.exp[((order - l) % order) as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e` by square-and-multiply.
    pub fn pow(&self, a: Elem, e: &BigUint) -> Elem {
        let mut acc = Elem::ONE;
        for i in (0..e.bits()).rev() {
            acc = self.mul(acc, acc);
            if e.bit(i) {
                acc = self.mul(acc, a);
            }
        }
        acc
    }

    pub fn pow_u64(&self, a: Elem, e: u64) -> Elem {
        self.pow(a, &BigUint::from(e))
    }

    /// `a^{q0}` for `q0 = p^j`, `j | k`: the generator of `Gal(F_q / F_{q0})`.
    pub fn frobenius(&self, a: Elem, subfield_order: u64) -> Result<Elem> {
        match prime_power(subfield_order) {
            Some((p, j)) if p == self.p as u64 && self.k.is_multiple_of(j) => {
                Ok(self.pow_u64(a, subfield_order))
            }
            _ => Err(Error::InvalidSubfield(subfield_order)),
        }
    }

    /// Least `m >= 1` with `a^m = 1`, found by stripping prime factors off `q - 1`.
    pub fn multiplicative_order(&self, a: Elem) -> Result<BigUint> {
        if a.is_zero() {
            return Err(Error::ZeroElement);
        }
        let group = BigUint::from(self.q - 1);
        let mut m = group.clone();
        for (r, e) in factor_integer(&group) {
            for _ in 0..e {
                let cand = &m / &r;
                if self.pow(a, &cand) == Elem::ONE {
                    m = cand;
                } else {
                    break;
                }
            }
        }
        Ok(m)
    }

    pub fn is_primitive_element(&self, a: Elem) -> Result<bool> {
        let ord = self.multiplicative_order(a)?;
        Ok(ord.to_u64() == Some(self.q as u64 - 1))
    }

    /// The elements of the subfield of order `p^j` (`j | k`), as the fixed
    /// set of the `p^j`-power map.
    pub fn subfield(&self, j: u32) -> Result<Vec<Elem>> {
        let q0 = (self.p as u64).pow(j);
        let mut out = Vec::new();
        for a in self.elements() {
            if self.frobenius(a, q0)? == a {
                out.push(a);
            }
        }
        Ok(out)
    }
}

/// Which operation [`field_arithmetic`] performs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Inv,
}

/// A field element bound to its field, with checked arithmetic.
#[derive(Clone)]
pub struct FieldElem {
    ctx: Arc<FieldCtx>,
    value: Elem,
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@GF({})", self.value, self.ctx.descriptor())
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        *self.ctx == *other.ctx && self.value == other.value
    }
}

impl Eq for FieldElem {}

impl FieldElem {
    pub fn new(ctx: Arc<FieldCtx>, value: u32) -> Result<FieldElem> {
        let value = ctx.elem(value)?;
        Ok(FieldElem { ctx, value })
    }

    pub fn value(&self) -> Elem {
        self.value
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    /// Residues mod `p`, low-degree-first.
    pub fn rep(&self) -> Vec<u32> {
        self.ctx.digits(self.value)
    }

    fn same_field(&self, other: &FieldElem) -> Result<()> {
        if *self.ctx != *other.ctx {
            return Err(Error::MixedFields(
                self.ctx.descriptor(),
                other.ctx.descriptor(),
            ));
        }
        Ok(())
    }

    fn with(&self, value: Elem) -> FieldElem {
        FieldElem {
            ctx: self.ctx.clone(),
            value,
        }
    }

    pub fn add(&self, other: &FieldElem) -> Result<FieldElem> {
        self.same_field(other)?;
        Ok(self.with(self.ctx.add(self.value, other.value)))
    }

    pub fn sub(&self, other: &FieldElem) -> Result<FieldElem> {
        self.same_field(other)?;
        Ok(self.with(self.ctx.sub(self.value, other.value)))
    }

    pub fn mul(&self, other: &FieldElem) -> Result<FieldElem> {
        self.same_field(other)?;
        Ok(self.with(self.ctx.mul(self.value, other.value)))
    }

    pub fn div(&self, other: &FieldElem) -> Result<FieldElem> {
        self.same_field(other)?;
        Ok(self.with(self.ctx.div(self.value, other.value)?))
    }

    pub fn neg(&self) -> FieldElem {
        self.with(self.ctx.neg(self.value))
    }

    pub fn inv(&self) -> Result<FieldElem> {
        Ok(self.with(self.ctx.inv(self.value)?))
    }

    pub fn pow(&self, e: &BigUint) -> FieldElem {
        self.with(self.ctx.pow(self.value, e))
    }

    pub fn frobenius(&self, subfield_order: u64) -> Result<FieldElem> {
        Ok(self.with(self.ctx.frobenius(self.value, subfield_order)?))
    }

    pub fn multiplicative_order(&self) -> Result<BigUint> {
        self.ctx.multiplicative_order(self.value)
    }

    pub fn is_primitive(&self) -> Result<bool> {
        self.ctx.is_primitive_element(self.value)
    }

    pub fn is_one(&self) -> bool {
        self.value == Elem::ONE
    }
}

/// Dispatches one of the six field operations. Unary operations ignore `y`.
pub fn field_arithmetic(x: &FieldElem, y: &FieldElem, op: ArithOp) -> Result<FieldElem> {
    match op {
        ArithOp::Add => x.add(y),
        ArithOp::Sub => x.sub(y),
        ArithOp::Mul => x.mul(y),
        ArithOp::Div => x.div(y),
        ArithOp::Neg => Ok(x.neg()),
        ArithOp::Inv => x.inv(),
    }
}
