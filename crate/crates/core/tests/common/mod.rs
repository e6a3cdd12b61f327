//! Brute-force oracles that share no code paths with the library beyond the
//! element encoding.

#![allow(dead_code)]

use std::collections::HashSet;
use std::sync::Arc;

use ffgroup::{Elem, FieldCtx, HarnessConfig};

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `phi(m)` by counting residues coprime to `m`.
pub fn phi_brute(m: u64) -> u64 {
    (1..=m).filter(|&k| gcd(k, m) == 1).count() as u64
}

pub fn is_prime_brute(n: u64) -> bool {
    n >= 2
        && (2..n)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

/// `(p, k)` for every prime power `q <= qmax`.
pub fn prime_powers(qmax: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for q in 2..=qmax {
        for p in 2..=q {
            if !is_prime_brute(p) {
                continue;
            }
            let mut v = p;
            let mut k = 1;
            while v < q {
                v *= p;
                k += 1;
            }
            if v == q {
                out.push((p, k));
            }
            if q % p == 0 {
                break;
            }
        }
    }
    out
}

fn digits(v: u32, p: u32, k: usize) -> Vec<u32> {
    let mut rest = v;
    (0..k)
        .map(|_| {
            let d = rest % p;
            rest /= p;
            d
        })
        .collect()
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

/// Sum by digitwise addition mod `p`.
pub fn add_brute(ctx: &FieldCtx, a: Elem, b: Elem) -> Elem {
    let (p, k) = (ctx.characteristic(), ctx.degree() as usize);
    let (x, y) = (digits(a.0, p, k), digits(b.0, p, k));
    Elem(undigits(
        &x.iter()
            .zip(&y)
            .map(|(u, v)| (u + v) % p)
            .collect::<Vec<_>>(),
        p,
    ))
}

/// Product by schoolbook polynomial multiplication reduced by the modulus.
pub fn mul_brute(ctx: &FieldCtx, a: Elem, b: Elem) -> Elem {
    let (p, k) = (ctx.characteristic(), ctx.degree() as usize);
    if k == 1 {
        return Elem(((a.0 as u64 * b.0 as u64) % p as u64) as u32);
    }
    let m = ctx.modulus().expect("extension field has a modulus");
    let (x, y) = (digits(a.0, p, k), digits(b.0, p, k));
    let mut prod = vec![0u32; 2 * k - 1];
    for (i, &u) in x.iter().enumerate() {
        for (j, &v) in y.iter().enumerate() {
            prod[i + j] = (prod[i + j] + u * v) % p;
        }
    }
    for top in (k..prod.len()).rev() {
        let c = prod[top];
        if c == 0 {
            continue;
        }
        for (i, &mi) in m.iter().enumerate() {
            let idx = top - k + i;
            prod[idx] = (prod[idx] + (p - c) * mi % p) % p;
        }
    }
    Elem(undigits(&prod[..k], p))
}

pub fn mult_order_brute(ctx: &FieldCtx, a: Elem) -> u64 {
    let mut x = a;
    let mut n = 1;
    while x != Elem::ONE {
        x = mul_brute(ctx, x, a);
        n += 1;
    }
    n
}

/// Row-major `n x n` matrices as plain entry vectors.
pub type RawMat = Vec<u32>;

pub fn raw_mul(ctx: &FieldCtx, n: usize, a: &[u32], b: &[u32]) -> RawMat {
    let mut out = vec![0u32; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Elem::ZERO;
            for t in 0..n {
                acc = add_brute(
                    ctx,
                    acc,
                    mul_brute(ctx, Elem(a[i * n + t]), Elem(b[t * n + j])),
                );
            }
            out[i * n + j] = acc.0;
        }
    }
    out
}

/// Determinant by the Leibniz expansion.
pub fn det_brute(ctx: &FieldCtx, n: usize, a: &[u32]) -> Elem {
    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }
    let mut total = Elem::ZERO;
    for sigma in perms(n) {
        let inversions = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| sigma[i] > sigma[j])
            .count();
        let mut term = Elem::ONE;
        for (i, &s) in sigma.iter().enumerate() {
            term = mul_brute(ctx, term, Elem(a[i * n + s]));
        }
        if inversions % 2 == 1 {
            term = ctx.neg(term);
        }
        total = add_brute(ctx, total, term);
    }
    total
}

/// Number of invertible `n x n` matrices, by enumeration.
pub fn gl_count_brute(ctx: &FieldCtx, n: usize) -> u64 {
    let q = ctx.order();
    let total = (q as u64).pow((n * n) as u32);
    (0..total)
        .filter(|&idx| {
            let entries = digits_u64(idx, q, n * n);
            !det_brute(ctx, n, &entries).is_zero()
        })
        .count() as u64
}

fn digits_u64(mut v: u64, q: u32, len: usize) -> Vec<u32> {
    (0..len)
        .map(|_| {
            let d = (v % q as u64) as u32;
            v /= q as u64;
            d
        })
        .collect()
}

/// Order of the matrix group generated by `gens`, by closure.
pub fn closure_order_brute(ctx: &FieldCtx, n: usize, gens: &[RawMat], cap: usize) -> Option<usize> {
    let id: RawMat = (0..n * n).map(|i| u32::from(i / n == i % n)).collect();
    let mut seen: HashSet<RawMat> = HashSet::from([id.clone()]);
    let mut frontier = vec![id];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = raw_mul(ctx, n, g, &x);
            if seen.insert(y.clone()) {
                if seen.len() > cap {
                    return None;
                }
                frontier.push(y);
            }
        }
    }
    Some(seen.len())
}

/// Companion matrix of the monic polynomial with the given low-first
/// coefficients (leading 1 included): ones below the diagonal, `-a_i` in the
/// last column.
pub fn companion_brute(ctx: &FieldCtx, coeffs: &[u32]) -> RawMat {
    let n = coeffs.len() - 1;
    let mut m = vec![0u32; n * n];
    for i in 1..n {
        m[i * n + i - 1] = 1;
    }
    for (i, &a) in coeffs[..n].iter().enumerate() {
        m[i * n + n - 1] = ctx.neg(Elem(a)).0;
    }
    m
}

/// Product of polynomials given low-first.
pub fn poly_mul_brute(ctx: &FieldCtx, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = add_brute(ctx, Elem(out[i + j]), mul_brute(ctx, Elem(x), Elem(y))).0;
        }
    }
    out
}

/// All monic polynomials of degree `d`, low-first with the leading 1.
pub fn monic_polys(ctx: &FieldCtx, d: usize) -> Vec<Vec<u32>> {
    let q = ctx.order();
    let total = (q as u64).pow(d as u32);
    (0..total)
        .map(|idx| {
            let mut c = digits_u64(idx, q, d);
            c.push(1);
            c
        })
        .collect()
}

/// Monic degree-`n` polynomials that factor into two monic factors of
/// positive degree.
pub fn reducible_brute(ctx: &FieldCtx, n: usize) -> HashSet<Vec<u32>> {
    let mut out = HashSet::new();
    for d in 1..=n / 2 {
        for a in monic_polys(ctx, d) {
            for b in monic_polys(ctx, n - d) {
                out.insert(poly_mul_brute(ctx, &a, &b));
            }
        }
    }
    out
}

pub fn field(q: u64) -> Arc<FieldCtx> {
    let (p, k) = ffgroup::gf::prime_power(q).expect("prime power");
    ffgroup::make_field(p, k).expect("field")
}

pub fn serial_cfg() -> HarnessConfig {
    HarnessConfig {
        workers: 1,
        oracle_cap: Some(5000),
        ..HarnessConfig::default()
    }
}
