//! The action of `GL_n(q)` on the `q^n - 1` nonzero vectors, and exact
//! permutation group orders through a base and strong generating set.
//!
//! Point `v` (1-based) is the vector whose little-endian base-`q` digits are
//! its coordinates: digit `i` is coordinate `i + 1`. Permutations store
//! 0-based images, so `images[v - 1] + 1` is the image of point `v`.
//! Composition follows the left action: `(a ∘ b)(x) = a(b(x))`.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf::{Elem, FieldCtx};
use crate::matgf::Mat;
use crate::Budget;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Perm {
    images: Vec<u32>,
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.images)
    }
}

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm {
            images: (0..degree as u32).collect(),
        }
    }

    /// From 0-based images; rejects anything that is not a bijection.
    pub fn from_images(images: Vec<u32>) -> Result<Perm> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            let slot = seen.get_mut(i as usize).ok_or(Error::NotAPermutation)?;
            if *slot {
                return Err(Error::NotAPermutation);
            }
            *slot = true;
        }
        Ok(Perm { images })
    }

    /// From disjoint cycles over 0-based points.
    pub fn from_cycles(degree: usize, cycles: &[&[u32]]) -> Result<Perm> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        for cycle in cycles {
            for (i, &a) in cycle.iter().enumerate() {
                let b = cycle[(i + 1) % cycle.len()];
                *images.get_mut(a as usize).ok_or(Error::NotAPermutation)? = b;
            }
        }
        Perm::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// Image of a 0-based point.
    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.images[x as usize]
    }

    /// Image of a 1-based point (a nonzero vector index).
    pub fn image_of_point(&self, v: u32) -> u32 {
        self.images[v as usize - 1] + 1
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm {
            images: other
                .images
                .iter()
                .map(|&x| self.images[x as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x as usize] = i as u32;
        }
        Perm { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// Least 0-based point not fixed.
    pub fn least_moved(&self) -> Option<u32> {
        self.images
            .iter()
            .enumerate()
            .find(|(i, &x)| *i as u32 != x)
            .map(|(i, _)| i as u32)
    }

    /// Size of the orbit containing the 0-based point `x`.
    pub fn cycle_len(&self, x: u32) -> usize {
        let mut len = 1;
        let mut y = self.apply(x);
        while y != x {
            y = self.apply(y);
            len += 1;
        }
        len
    }
}

/// `q^n`, the number of vectors including zero.
pub fn vector_count(ctx: &FieldCtx, n: usize) -> Option<u64> {
    crate::checked_pow(ctx.order() as u64, n as u32)
}

/// Coordinates of the 1-based point `v` (or of 0, the zero vector).
pub fn vector_of_point(ctx: &FieldCtx, n: usize, mut v: u64) -> Vec<Elem> {
    let q = ctx.order() as u64;
    (0..n)
        .map(|_| {
            let d = v % q;
            v /= q;
            Elem(d as u32)
        })
        .collect()
}

pub fn point_of_vector(ctx: &FieldCtx, v: &[Elem]) -> u64 {
    let q = ctx.order() as u64;
    v.iter().rev().fold(0, |acc, e| acc * q + e.0 as u64)
}

/// The permutation of nonzero vectors induced by an invertible matrix.
pub fn matrix_to_perm(a: &Mat, budget: &Budget) -> Result<Perm> {
    let ctx = a.ctx();
    let n = a.n();
    let total = vector_count(ctx, n).unwrap_or(u64::MAX);
    budget.check_points("q^n", total)?;
    if a.det().is_zero() {
        return Err(Error::SingularMatrix);
    }
    let images = (1..total)
        .map(|v| {
            let w = a.mul_vec(&vector_of_point(ctx, n, v));
            (point_of_vector(ctx, &w) - 1) as u32
        })
        .collect();
    Ok(Perm { images })
}

/// Recovers the matrix of a linear permutation from the images of the
/// standard basis vectors `e_j` (point `q^j`).
pub fn perm_to_matrix(perm: &Perm, ctx: &Arc<FieldCtx>, n: usize) -> Mat {
    let q = ctx.order() as u64;
    let mut m = Mat::zeros(ctx.clone(), n);
    for j in 0..n {
        let image = perm.image_of_point(q.pow(j as u32) as u32);
        for (i, c) in vector_of_point(ctx, n, image as u64)
            .into_iter()
            .enumerate()
        {
            m.set(i, j, c);
        }
    }
    m
}

/// `|GL_n(q)| = prod_{i=0}^{n-1} (q^n - q^i)`.
pub fn gl_order(n: usize, q: &BigUint) -> BigUint {
    let qn = q.pow(n as u32);
    (0..n).fold(BigUint::one(), |acc, i| acc * (&qn - q.pow(i as u32)))
}

/// A fixed small generating set of `GL_n(q)`: the transvection
/// `I + E_{12}`, the companion matrix of the first primitive polynomial, and
/// `diag(w, 1, ..., 1)` for a primitive `w` when `q > 2`.
pub fn gl_standard_generators(ctx: &Arc<FieldCtx>, n: usize, budget: &Budget) -> Result<Vec<Mat>> {
    let mut gens = Vec::new();
    if n >= 2 {
        let mut t = Mat::identity(ctx.clone(), n);
        t.set(0, 1, Elem::ONE);
        gens.push(t);
    }
    let (_, singer) = crate::fieldext::singer_generator(ctx, n, budget)?;
    gens.push(singer);
    if ctx.order() > 2 {
        let mut d = Mat::identity(ctx.clone(), n);
        d.set(0, 0, ctx.primitive_element());
        gens.push(d);
    }
    Ok(gens)
}

const NONE: u32 = u32::MAX;
const RANDOM_SEED: u64 = 0x5eed;
const PR_SLOTS: usize = 10;
const PR_WARMUP: usize = 50;
const RANDOM_MISSES: usize = 32;

#[derive(Clone, Debug)]
struct Level {
    base: u32,
    /// Indices into the strong generating set.
    gens: Vec<usize>,
    orbit: Vec<u32>,
    /// Point -> position in `orbit`, or `NONE`.
    slot: Vec<u32>,
    /// Schreier tree: `orbit[k] = strong[parent[k].1](orbit[parent[k].0])`.
    parent: Vec<(u32, u32)>,
    /// Lazily built `u_k^{-1}`, mapping `orbit[k]` back to `base`.
    inv_cache: Vec<OnceLock<Perm>>,
    /// For each orbit position, how many of `gens` have had their Schreier
    /// generator sifted.
    tested: Vec<usize>,
}

impl Level {
    fn new(base: u32, degree: usize) -> Level {
        let mut slot = vec![NONE; degree];
        slot[base as usize] = 0;
        Level {
            base,
            gens: Vec::new(),
            orbit: vec![base],
            slot,
            parent: vec![(NONE, NONE)],
            inv_cache: vec![OnceLock::from(Perm::identity(degree))],
            tested: vec![0],
        }
    }

    fn close_orbit(&mut self, strong: &[Perm]) {
        let mut pos = 0;
        while pos < self.orbit.len() {
            let gamma = self.orbit[pos];
            for &s in &self.gens {
                let delta = strong[s].apply(gamma);
                if self.slot[delta as usize] == NONE {
                    self.slot[delta as usize] = self.orbit.len() as u32;
                    self.orbit.push(delta);
                    self.parent.push((pos as u32, s as u32));
                    self.inv_cache.push(OnceLock::new());
                    self.tested.push(0);
                }
            }
            pos += 1;
        }
    }

    fn inv_u(&self, k: usize, strong_inv: &[Perm]) -> &Perm {
        let mut path = Vec::new();
        let mut cur = k;
        while self.inv_cache[cur].get().is_none() {
            path.push(cur);
            cur = self.parent[cur].0 as usize;
        }
        for &pos in path.iter().rev() {
            let (up, s) = self.parent[pos];
            let above = self.inv_cache[up as usize]
                .get()
                .expect("ancestor is built first");
            let _ = self.inv_cache[pos].set(above.compose(&strong_inv[s as usize]));
        }
        self.inv_cache[k].get().expect("just built")
    }
}

/// A base and strong generating set with explicit transversals.
#[derive(Clone, Debug)]
pub struct Bsgs {
    degree: usize,
    strong: Vec<Perm>,
    strong_inv: Vec<Perm>,
    levels: Vec<Level>,
}

impl Bsgs {
    /// Deterministic Schreier-Sims. Base points are chosen as the least
    /// point moved by the generator that needs a new level.
    pub fn new(gens: &[Perm]) -> Result<Bsgs> {
        Self::build(gens, None)
    }

    /// Same as [`Bsgs::new`], but stops once the transversal sizes multiply
    /// to `bound`, which must be a known multiple-or-upper-bound of the group
    /// order. Partial transversals only undercount, so reaching the bound
    /// certifies the order and completes every transversal.
    pub fn with_order_bound(gens: &[Perm], bound: &BigUint) -> Result<Bsgs> {
        Self::build(gens, Some(bound))
    }

    fn build(gens: &[Perm], bound: Option<&BigUint>) -> Result<Bsgs> {
        let first = gens.first().ok_or(Error::EmptyGeneratorList)?;
        let degree = first.degree();
        if let Some(g) = gens.iter().find(|g| g.degree() != degree) {
            return Err(Error::DimensionMismatch(degree, g.degree()));
        }
        let mut b = Bsgs {
            degree,
            strong: Vec::new(),
            strong_inv: Vec::new(),
            levels: Vec::new(),
        };
        for g in gens {
            if g.is_identity() || b.strong.contains(g) {
                continue;
            }
            if b.levels.iter().all(|l| g.apply(l.base) == l.base) {
                let beta = g.least_moved().expect("non-identity");
                b.levels.push(Level::new(beta, degree));
            }
            b.strong_inv.push(g.inverse());
            b.strong.push(g.clone());
        }
        for l in 0..b.levels.len() {
            let idx: Vec<usize> = (0..b.strong.len())
                .filter(|&s| {
                    b.levels[..l]
                        .iter()
                        .all(|lv| b.strong[s].apply(lv.base) == lv.base)
                })
                .collect();
            b.levels[l].gens = idx;
            b.levels[l].close_orbit(&b.strong);
        }
        let reached = |b: &Bsgs| bound.is_some_and(|bd| b.order() >= *bd);
        if let Some(bd) = bound {
            b.random_phase(gens, bd);
        }
        let mut i = b.levels.len();
        while i > 0 && !reached(&b) {
            match b.next_residue(i - 1) {
                None => i -= 1,
                Some((h, j)) => {
                    b.add_strong(h, i, j);
                    i = j + 1;
                }
            }
        }
        Ok(b)
    }

    /// Sifts seeded product-replacement elements until the order reaches
    /// `bound` or `RANDOM_MISSES` consecutive elements sift through. Every
    /// residue is a group element fixing the base points above its level,
    /// so the chain stays valid for the deterministic pass.
    fn random_phase(&mut self, gens: &[Perm], bound: &BigUint) {
        let gens: Vec<&Perm> = gens.iter().filter(|g| !g.is_identity()).collect();
        if gens.is_empty() {
            return;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(RANDOM_SEED);
        let mut slots: Vec<Perm> = (0..PR_SLOTS.max(gens.len()))
            .map(|i| gens[i % gens.len()].clone())
            .collect();
        let mut acc = Perm::identity(self.degree);
        let step = |slots: &mut Vec<Perm>, acc: &mut Perm, rng: &mut ChaCha8Rng| {
            let i = rng.gen_range(0..slots.len());
            let mut j = rng.gen_range(0..slots.len() - 1);
            if j >= i {
                j += 1;
            }
            let sj = if rng.gen::<bool>() {
                slots[j].clone()
            } else {
                slots[j].inverse()
            };
            slots[i] = slots[i].compose(&sj);
            *acc = acc.compose(&slots[i]);
        };
        for _ in 0..PR_WARMUP {
            step(&mut slots, &mut acc, &mut rng);
        }
        let mut misses = 0;
        while misses < RANDOM_MISSES && self.order() < *bound {
            step(&mut slots, &mut acc, &mut rng);
            match self.sift(acc.clone(), 0) {
                Ok(()) => misses += 1,
                Err((h, j)) => {
                    misses = 0;
                    self.add_strong(h, 0, j);
                }
            }
        }
    }

    /// Sifts untested Schreier generators of level `i` until one leaves a
    /// non-trivial residue. Returns the residue and the level where it
    /// stopped (`levels.len()` when it passed all levels).
    fn next_residue(&mut self, i: usize) -> Option<(Perm, usize)> {
        let mut pos = 0;
        while pos < self.levels[i].orbit.len() {
            let level = &self.levels[i];
            if level.tested[pos] < level.gens.len() {
                let gamma = level.orbit[pos];
                let u = level.inv_u(pos, &self.strong_inv).inverse();
                while self.levels[i].tested[pos] < self.levels[i].gens.len() {
                    let level = &self.levels[i];
                    let s = level.gens[level.tested[pos]];
                    let delta = self.strong[s].apply(gamma);
                    let back = level.inv_u(level.slot[delta as usize] as usize, &self.strong_inv);
                    let sg = Perm {
                        images: u
                            .images
                            .iter()
                            .map(|&x| back.images[self.strong[s].images[x as usize] as usize])
                            .collect(),
                    };
                    self.levels[i].tested[pos] += 1;
                    if sg.is_identity() {
                        continue;
                    }
                    if let Err(residue) = self.sift(sg, i + 1) {
                        return Some(residue);
                    }
                }
            }
            pos += 1;
        }
        None
    }

    fn sift(&self, mut h: Perm, from: usize) -> std::result::Result<(), (Perm, usize)> {
        for l in from..self.levels.len() {
            let level = &self.levels[l];
            let gamma = h.apply(level.base);
            let slot = level.slot[gamma as usize];
            if slot == NONE {
                return Err((h, l));
            }
            if slot != 0 {
                h = level.inv_u(slot as usize, &self.strong_inv).compose(&h);
            }
        }
        if h.is_identity() {
            Ok(())
        } else {
            Err((h, self.levels.len()))
        }
    }

    /// Adds `h` as a strong generator at levels `i..=j` (extending the base
    /// when `j` is past the last level).
    fn add_strong(&mut self, h: Perm, i: usize, j: usize) {
        if j == self.levels.len() {
            let beta = h.least_moved().expect("residue is not the identity");
            self.levels.push(Level::new(beta, self.degree));
        }
        let idx = self.strong.len();
        self.strong_inv.push(h.inverse());
        self.strong.push(h);
        for l in i..=j {
            self.levels[l].gens.push(idx);
            self.levels[l].close_orbit(&self.strong);
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// 0-based base points.
    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn strong_generators(&self) -> &[Perm] {
        &self.strong
    }

    pub fn transversal_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    /// Membership by sifting through the transversals.
    pub fn contains(&self, g: &Perm) -> bool {
        g.degree() == self.degree && self.sift(g.clone(), 0).is_ok()
    }

    /// Every element, as products `u_1 ∘ u_2 ∘ ... ∘ u_k` of transversal
    /// elements, in lexicographic order of orbit positions.
    pub fn elements(&self) -> Vec<Perm> {
        let forward: Vec<Vec<Perm>> = self
            .levels
            .iter()
            .map(|l| {
                (0..l.orbit.len())
                    .map(|k| l.inv_u(k, &self.strong_inv).inverse())
                    .collect()
            })
            .collect();
        let mut out = vec![Perm::identity(self.degree)];
        for level in forward.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * level.len());
            for u in level {
                for g in &out {
                    next.push(u.compose(g));
                }
            }
            out = next;
        }
        out
    }
}

/// Exact order of the group generated by `gens`.
pub fn group_order(gens: &[Perm]) -> Result<BigUint> {
    Ok(Bsgs::new(gens)?.order())
}

/// Exact order when a multiple-free upper bound is known (for instance
/// `|GL_n(q)|` for a group of matrices).
pub fn group_order_bounded(gens: &[Perm], bound: &BigUint) -> Result<BigUint> {
    Ok(Bsgs::with_order_bound(gens, bound)?.order())
}

/// Result of [`closure_oracle`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Closure {
    Elements(Vec<Perm>),
    Overflow,
}

impl Closure {
    pub fn len(&self) -> Option<usize> {
        match self {
            Closure::Elements(e) => Some(e.len()),
            Closure::Overflow => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }
}

/// Breadth-first closure under left multiplication by the generators;
/// gives up once more than `cap` elements are found.
pub fn closure_oracle(gens: &[Perm], cap: usize) -> Closure {
    let Some(first) = gens.first() else {
        return Closure::Elements(Vec::new());
    };
    let id = Perm::identity(first.degree());
    let mut seen: HashSet<Perm> = HashSet::new();
    let mut order = vec![id.clone()];
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g.compose(&x);
            if seen.insert(y.clone()) {
                if seen.len() > cap {
                    return Closure::Overflow;
                }
                order.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    Closure::Elements(order)
}
