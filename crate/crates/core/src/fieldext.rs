//! Field-extension subgroups of `GL_{ad}(q)`.
//!
//! `W = K^a` with `K = F_{q^d}` is an `ad`-dimensional space over `F = F_q`.
//! Fixing the ordered `F`-basis `alpha^j e_i` (index `i*d + j`) turns every
//! `K`-linear map of `W` into an `ad x ad` matrix over `F`, and the
//! componentwise `q`-power map into a block-diagonal "Frobenius" matrix.
//! `alpha` is a root of the first primitive polynomial of degree `d` over
//! `F`, so multiplication by `alpha` on `K` (`a = 1`) becomes exactly that
//! polynomial's companion matrix.
//!
//! `K` is built flat as `F_{p^{kd}}`; `F_{p^k}` sits inside it through a
//! root of its own modulus.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::gf::{Elem, FieldCtx};
use crate::matgf::Mat;
use crate::permgrp::gl_order;
use crate::poly::{enumerate_nonzero_const, Poly};
use crate::Budget;

/// First monic primitive polynomial of degree `n` over `ctx` together with
/// its companion matrix, which generates a Singer cycle.
pub fn singer_generator(ctx: &Arc<FieldCtx>, n: usize, budget: &Budget) -> Result<(Poly, Mat)> {
    for f in enumerate_nonzero_const(ctx, n, budget)? {
        if f.is_primitive()? {
            let s = Mat::companion(&f)?;
            return Ok((f, s));
        }
    }
    unreachable!("primitive polynomials exist in every degree")
}

/// Every invertible `a x a` matrix over `ctx`, by filtering all candidates.
/// Fails when there are more than `limit` candidates.
pub fn enumerate_gl(ctx: &Arc<FieldCtx>, a: usize, limit: u64) -> Result<Vec<Mat>> {
    let q = ctx.order() as u64;
    let total = crate::checked_pow(q, (a * a) as u32).filter(|&t| t <= limit);
    let total = total.ok_or_else(|| Error::ScanTooLarge {
        size: format!("{q}^{}", a * a),
        limit,
    })?;
    let mut out = Vec::new();
    for idx in 0..total {
        let mut rest = idx;
        let entries = (0..a * a)
            .map(|_| {
                let e = Elem((rest % q) as u32);
                rest /= q;
                e
            })
            .collect();
        let m = Mat::from_entries(ctx.clone(), a, entries);
        if !m.det().is_zero() {
            out.push(m);
        }
    }
    Ok(out)
}

/// `W = K^a` over `F` with its canonical ordered basis.
#[derive(Clone, Debug)]
pub struct ExtensionFrame {
    base: Arc<FieldCtx>,
    ext: Arc<FieldCtx>,
    d: usize,
    a: usize,
    alpha: Elem,
    min_poly: Poly,
    /// `base_embed[c]` is the image in `K` of the base element encoded `c`.
    base_embed: Vec<Elem>,
    /// Inverse of the `F_p`-matrix whose columns are `beta^i alpha^j`.
    coord_inv: Mat,
}

impl ExtensionFrame {
    pub fn new(
        base: &Arc<FieldCtx>,
        d: usize,
        a: usize,
        budget: &Budget,
    ) -> Result<ExtensionFrame> {
        if d == 0 || a == 0 {
            return Err(Error::InvalidParams("d and a must be at least 1".into()));
        }
        let q = base.order() as u64;
        let points = crate::checked_pow(q, (a * d) as u32).unwrap_or(u64::MAX);
        budget.check_points("q^(ad)", points)?;
        let p = base.characteristic();
        let k = base.degree() as usize;
        let ext = FieldCtx::new(p as u64, (k * d) as u32, budget)?;
        let prime = FieldCtx::new(p as u64, 1, budget)?;

        // image of the base generator: least root of the base modulus
        let beta = match base.modulus() {
            None => Elem::ONE,
            Some(m) => {
                let m = Poly::new(ext.clone(), m.iter().map(|&c| Elem(c)).collect());
                ext.elements()
                    .find(|&x| m.eval(x).is_zero())
                    .expect("F_{p^k} embeds in F_{p^{kd}}")
            }
        };
        let beta_pows: Vec<Elem> = (0..k).map(|i| ext.pow_u64(beta, i as u64)).collect();
        let base_embed: Vec<Elem> = base
            .elements()
            .map(|c| {
                base.digits(c)
                    .iter()
                    .zip(&beta_pows)
                    .fold(Elem::ZERO, |acc, (&ci, &b)| {
                        ext.add(acc, ext.mul(Elem(ci), b))
                    })
            })
            .collect();

        let (min_poly, _) = singer_generator(base, d, budget)?;
        let lifted = Poly::new(
            ext.clone(),
            min_poly
                .coeffs()
                .iter()
                .map(|c| base_embed[c.0 as usize])
                .collect(),
        );
        let alpha = ext
            .elements()
            .find(|&x| lifted.eval(x).is_zero())
            .expect("a primitive polynomial of degree d splits in F_{q^d}");

        let kd = k * d;
        let mut basis = Mat::zeros(prime.clone(), kd);
        for j in 0..d {
            let aj = ext.pow_u64(alpha, j as u64);
            for (i, &b) in beta_pows.iter().enumerate() {
                let v = ext.mul(b, aj);
                for (row, digit) in ext.digits(v).into_iter().enumerate() {
                    basis.set(row, j * k + i, Elem(digit));
                }
            }
        }
        if basis.rank() != kd {
            return Err(Error::InvalidParams(
                "frame basis is not independent".into(),
            ));
        }
        let coord_inv = basis.inv()?;
        Ok(ExtensionFrame {
            base: base.clone(),
            ext,
            d,
            a,
            alpha,
            min_poly,
            base_embed,
            coord_inv,
        })
    }

    pub fn base(&self) -> &Arc<FieldCtx> {
        &self.base
    }

    pub fn ext(&self) -> &Arc<FieldCtx> {
        &self.ext
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn a(&self) -> usize {
        self.a
    }

    /// Ambient dimension `ad`.
    pub fn n(&self) -> usize {
        self.a * self.d
    }

    /// The generator `alpha` of `K` over `F` (a primitive element of `K`).
    pub fn alpha(&self) -> Elem {
        self.alpha
    }

    /// Minimal polynomial of `alpha` over `F`.
    pub fn min_poly(&self) -> &Poly {
        &self.min_poly
    }

    pub fn embed_scalar(&self, c: Elem) -> Elem {
        self.base_embed[c.0 as usize]
    }

    /// Coordinates of `w` in `1, alpha, ..., alpha^{d-1}` over `F`.
    pub fn coords(&self, w: Elem) -> Vec<Elem> {
        let digits: Vec<Elem> = self.ext.digits(w).into_iter().map(Elem).collect();
        let x = self.coord_inv.mul_vec(&digits);
        let k = self.base.degree() as usize;
        x.chunks(k)
            .map(|chunk| {
                self.base
                    .from_digits(&chunk.iter().map(|e| e.0).collect::<Vec<_>>())
            })
            .collect()
    }

    fn check(&self, m: &Mat) -> Result<()> {
        if **m.ctx() != *self.ext || m.n() != self.a {
            return Err(Error::FrameMismatch);
        }
        Ok(())
    }

    /// Matrix over `F` of `v -> Mv` for an invertible `a x a` matrix `M`
    /// over `K`.
    pub fn embed_linear(&self, m: &Mat) -> Result<Mat> {
        self.check(m)?;
        if m.det().is_zero() {
            return Err(Error::SingularMatrix);
        }
        Ok(self.embed_unchecked(m))
    }

    fn embed_unchecked(&self, m: &Mat) -> Mat {
        let (a, d) = (self.a, self.d);
        let ext = &self.ext;
        let alpha_pows: Vec<Elem> = (0..d).map(|j| ext.pow_u64(self.alpha, j as u64)).collect();
        let mut out = Mat::zeros(self.base.clone(), a * d);
        for ic in 0..a {
            for (jc, &aj) in alpha_pows.iter().enumerate() {
                let col = ic * d + jc;
                for ir in 0..a {
                    let w = ext.mul(m.get(ir, ic), aj);
                    for (jr, c) in self.coords(w).into_iter().enumerate() {
                        out.set(ir * d + jr, col, c);
                    }
                }
            }
        }
        out
    }

    /// The embedded scalar map `v -> c v`, `c` in `K`.
    pub fn scalar(&self, c: Elem) -> Mat {
        self.embed_unchecked(&Mat::scalar(self.ext.clone(), self.a, c))
    }

    /// Matrix of the componentwise `q`-power map on `W`.
    pub fn frobenius_matrix(&self) -> Mat {
        let q = self.base.order() as u64;
        let d = self.d;
        let mut out = Mat::zeros(self.base.clone(), self.n());
        for i in 0..self.a {
            for j in 0..d {
                let v = self.ext.pow_u64(self.ext.pow_u64(self.alpha, j as u64), q);
                for (r, c) in self.coords(v).into_iter().enumerate() {
                    out.set(i * d + r, i * d + j, c);
                }
            }
        }
        out
    }

    /// Applies the `q`-power map to every entry of a matrix over `K`.
    pub fn twist(&self, m: &Mat) -> Mat {
        let q = self.base.order() as u64;
        m.map(|e| self.ext.pow_u64(e, q))
    }

    /// `{q, d, a, modulus}` for reports; the modulus is the minimal
    /// polynomial of `alpha` over `F` in comma-separated form.
    pub fn descriptor(&self) -> BTreeMap<String, String> {
        BTreeMap::from([
            ("q".to_string(), self.base.order().to_string()),
            ("d".to_string(), self.d.to_string()),
            ("a".to_string(), self.a.to_string()),
            ("modulus".to_string(), self.min_poly.to_text()),
        ])
    }
}

/// The standard field-extension subgroup `E` for a frame, represented by
/// the embedded scalar generator `z` (multiplication by `alpha`) and the
/// Frobenius matrix. Membership is `N_G(<z>)`.
#[derive(Clone, Debug)]
pub struct StandardExtSubgroup {
    frame: ExtensionFrame,
    z: Mat,
    frob: Mat,
    scalars: HashSet<Mat>,
}

impl StandardExtSubgroup {
    pub fn new(frame: ExtensionFrame) -> StandardExtSubgroup {
        let z = frame.scalar(frame.alpha());
        let frob = frame.frobenius_matrix();
        let mut scalars = HashSet::new();
        let mut power = z.clone();
        loop {
            scalars.insert(power.clone());
            if power.is_identity() {
                break;
            }
            power = power.mul(&z);
        }
        StandardExtSubgroup {
            frame,
            z,
            frob,
            scalars,
        }
    }

    pub fn frame(&self) -> &ExtensionFrame {
        &self.frame
    }

    pub fn z(&self) -> &Mat {
        &self.z
    }

    pub fn frob(&self) -> &Mat {
        &self.frob
    }

    /// The cyclic group `<z>` of embedded `K`-scalars.
    pub fn scalars(&self) -> &HashSet<Mat> {
        &self.scalars
    }

    /// True iff `M z M^{-1}` lies in `<z>`.
    pub fn contains(&self, m: &Mat) -> Result<bool> {
        if **m.ctx() != **self.frame.base() {
            return Err(Error::MixedFields(
                m.ctx().descriptor(),
                self.frame.base().descriptor(),
            ));
        }
        if m.n() != self.z.n() {
            return Err(Error::DimensionMismatch(m.n(), self.z.n()));
        }
        let inv = m.inv()?;
        Ok(self.scalars.contains(&m.mul(&self.z).mul(&inv)))
    }

    /// `d * |GL_a(q^d)|`.
    pub fn order(&self) -> BigUint {
        let qd = BigUint::from(self.frame.ext().order());
        BigUint::from(self.frame.d()) * gl_order(self.frame.a(), &qd)
    }

    /// All elements `embed(M) * frob^j`, `M` in `GL_a(K)`, `0 <= j < d`.
    /// `limit` caps the number of `a x a` candidates examined over `K`.
    pub fn elements(&self, limit: u64) -> Result<Vec<Mat>> {
        let frob_pows: Vec<Mat> = std::iter::successors(
            Some(Mat::identity(self.frame.base().clone(), self.frame.n())),
            |m| Some(m.mul(&self.frob)),
        )
        .take(self.frame.d())
        .collect();
        let mut out = Vec::new();
        for m in enumerate_gl(self.frame.ext(), self.frame.a(), limit)? {
            let e = self.frame.embed_unchecked(&m);
            for f in &frob_pows {
                out.push(e.mul(f));
            }
        }
        Ok(out)
    }
}

pub fn embed_linear(frame: &ExtensionFrame, m: &Mat) -> Result<Mat> {
    frame.embed_linear(m)
}

pub fn frobenius_matrix(frame: &ExtensionFrame) -> Mat {
    frame.frobenius_matrix()
}

pub fn in_standard_ext_subgroup(e: &StandardExtSubgroup, m: &Mat) -> Result<bool> {
    e.contains(m)
}

pub fn ext_subgroup_order(e: &StandardExtSubgroup) -> BigUint {
    e.order()
}
