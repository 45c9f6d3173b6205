//! Cached physical images of frequency-localized factors.
//!
//! Every trilinear term in the ladder contracts three multiplier images of
//! `u` or `B`. Factors are named symbolically, canonicalized through the
//! multiplier algebra (e.g. a block of a cutoff collapses to a plain block
//! two shells down), and their physical images are cached per quadrature
//! size. Derived factors (high-pass parts, widened blocks, cutoff bands)
//! are assembled pointwise from cached base images instead of fresh
//! transforms.

use std::collections::HashMap;
use std::rc::Rc;

use crate::field::SpectralVectorField;
use crate::lp::LpProfile;
use crate::norms::{lebesgue_norm, Lp, NormOperand};
use crate::quadrature::{gradient_images, pick_quad_size, triple_integral_images, vector_images, GradPhys, Vec3Phys};

/// Which field of the pair a factor comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Fld {
    U,
    B,
}

/// Symbolic multiplier transform applied to a field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Xf {
    Zero,
    Id,
    /// cutoff at `j`
    Lo(i32),
    /// squared cutoff at `j` (arises from nested cutoffs at equal scale)
    LoSq(i32),
    /// high-pass at `k`
    Hp(i32),
    /// annulus block at `l`
    Block(i32),
    /// widened (two-sided) block at `l`
    Tilde(i32),
    /// block `l` of the cutoff at `k`; survives only for `l` in `{k-1, k}`
    BlockLo(i32, i32),
    /// block `l` of the high-pass at `k`; differs from `Block(l)` only for
    /// `l` in `{k-1, k}`
    BlockHp(i32, i32),
    /// widened block `l` of the high-pass at `k`
    TildeHp(i32, i32),
    /// cutoff `j` of the high-pass at `k`
    LoHp(i32, i32),
    /// band multiplier `psi_{j2} - psi_{j1}` (sum of blocks `j1..j2-1`)
    LoBand(i32, i32),
}

pub(crate) type Factor = (Fld, Xf);

/// Memoized norms of factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum NormTag {
    Linf,
    L3,
    GradL2Sq,
}

const CACHE_BUDGET_BYTES: usize = 2_200_000_000;

pub(crate) struct PairContext<'a> {
    pub profile: &'a LpProfile,
    pub u: &'a SpectralVectorField,
    pub b: &'a SpectralVectorField,
    u_bound: usize,
    b_bound: usize,
    /// Common quadrature size: exact for any triple of factors of the pair.
    /// One size keeps every factor image single-build and cache-hot.
    quad_size: usize,
    vec_cache: HashMap<(Factor, usize), (Rc<Vec3Phys>, u64)>,
    grad_cache: HashMap<(Factor, usize), (Rc<GradPhys>, u64)>,
    norm_cache: HashMap<(Factor, NormTag), f64>,
    tri_cache: HashMap<(Factor, Factor, Factor), f64>,
    clock: u64,
    bytes: usize,
}

impl<'a> PairContext<'a> {
    pub fn new(
        profile: &'a LpProfile,
        u: &'a SpectralVectorField,
        b: &'a SpectralVectorField,
    ) -> Self {
        let u_bound = u.mode_bound();
        let b_bound = b.mode_bound();
        let fb = u_bound.max(b_bound).max(1);
        let quad_size = pick_quad_size(3 * fb, fb, profile.grid().n_per_dim())
            .expect("pair bounds exceed padded Nyquist");
        PairContext {
            profile,
            u,
            b,
            u_bound,
            b_bound,
            quad_size,
            vec_cache: HashMap::new(),
            grad_cache: HashMap::new(),
            norm_cache: HashMap::new(),
            tri_cache: HashMap::new(),
            clock: 0,
            bytes: 0,
        }
    }

    fn field(&self, f: Fld) -> &SpectralVectorField {
        match f {
            Fld::U => self.u,
            Fld::B => self.b,
        }
    }

    fn field_bound(&self, f: Fld) -> usize {
        match f {
            Fld::U => self.u_bound,
            Fld::B => self.b_bound,
        }
    }

    fn k_lo(&self) -> i32 {
        *self.profile.stored_range().start()
    }

    fn k_hi(&self) -> i32 {
        *self.profile.stored_range().end()
    }

    /// Collapse a symbolic transform through the multiplier algebra. The
    /// result either names a stored multiplier, a derived combination, or
    /// `Zero` when the supports are disjoint on the lattice.
    pub(crate) fn canonical(&self, xf: Xf) -> Xf {
        let (k_lo, k_hi) = (self.k_lo(), self.k_hi());
        match xf {
            Xf::Zero | Xf::Id => xf,
            Xf::Lo(j) => {
                if j < k_lo {
                    Xf::Zero // mean-zero operands only
                } else if j > k_hi + 1 {
                    Xf::Id
                } else {
                    xf
                }
            }
            Xf::LoSq(j) => {
                if j < k_lo {
                    Xf::Zero
                } else if j > k_hi + 1 {
                    Xf::Id
                } else {
                    xf
                }
            }
            Xf::Hp(k) => {
                if k < k_lo {
                    Xf::Id
                } else if k > k_hi + 1 {
                    Xf::Zero
                } else {
                    xf
                }
            }
            Xf::Block(l) => {
                if l < k_lo || l > k_hi {
                    Xf::Zero
                } else {
                    xf
                }
            }
            Xf::Tilde(l) => {
                if l + 2 < k_lo || l - 2 > k_hi {
                    Xf::Zero
                } else {
                    xf
                }
            }
            Xf::BlockLo(l, k) => {
                if l >= k + 1 {
                    Xf::Zero
                } else if l <= k - 2 {
                    self.canonical(Xf::Block(l))
                } else if l < k_lo || l > k_hi {
                    Xf::Zero
                } else {
                    xf
                }
            }
            Xf::BlockHp(l, k) => {
                if l <= k - 2 {
                    Xf::Zero
                } else if l >= k + 1 {
                    self.canonical(Xf::Block(l))
                } else if l < k_lo || l > k_hi {
                    Xf::Zero
                } else {
                    xf
                }
            }
            Xf::TildeHp(l, k) => {
                if l + 2 <= k - 2 {
                    Xf::Zero
                } else if l - 2 >= k + 1 {
                    self.canonical(Xf::Tilde(l))
                } else if l + 2 < k_lo || l - 2 > k_hi {
                    Xf::Zero
                } else {
                    xf
                }
            }
            Xf::LoHp(j, k) => {
                if j <= k - 1 {
                    Xf::Zero
                } else if k < k_lo {
                    self.canonical(Xf::Lo(j))
                } else if j > k_hi + 1 {
                    self.canonical(Xf::Hp(k))
                } else {
                    xf
                }
            }
            Xf::LoBand(j1, j2) => {
                let j1 = j1.clamp(k_lo, k_hi + 1);
                let j2 = j2.clamp(k_lo, k_hi + 1);
                if j1 >= j2 {
                    Xf::Zero
                } else {
                    Xf::LoBand(j1, j2)
                }
            }
        }
    }

    /// Upper bound on the per-coordinate mode carrying energy, from the
    /// multiplier support radius intersected with the operand's own band.
    pub(crate) fn bound(&self, f: Factor) -> usize {
        let (fld, xf) = f;
        let fb = self.field_bound(fld);
        let fs = self.profile.grid().freq_spacing();
        let radius_modes = |r: f64| -> usize {
            // strict support |xi| < r: per-coordinate |m| <= floor(r / fs)
            let m = (r / fs).floor() as i64;
            (m.max(0) as usize).min(fb)
        };
        match self.canonical(xf) {
            Xf::Zero => 0,
            Xf::Id | Xf::Hp(_) => fb,
            Xf::Lo(j) | Xf::LoSq(j) | Xf::LoHp(j, _) => radius_modes((j as f64).exp2()),
            Xf::Block(l) | Xf::BlockLo(l, _) | Xf::BlockHp(l, _) => {
                radius_modes((l as f64 + 1.0).exp2())
            }
            Xf::Tilde(l) | Xf::TildeHp(l, _) => radius_modes((l as f64 + 3.0).exp2()),
            Xf::LoBand(_, j2) => radius_modes((j2 as f64).exp2()),
        }
    }

    fn touch(&mut self) -> u64 {
        self.clock += 1;
        self.clock
    }

    fn evict_if_needed(&mut self) {
        while self.bytes > CACHE_BUDGET_BYTES {
            let oldest_vec = self
                .vec_cache
                .iter()
                .min_by_key(|(_, (_, t))| *t)
                .map(|(k, (v, t))| (*k, v[0].len() * 3 * 8, *t));
            let oldest_grad = self
                .grad_cache
                .iter()
                .min_by_key(|(_, (_, t))| *t)
                .map(|(k, (v, t))| (*k, v[0][0].len() * 9 * 8, *t));
            match (oldest_vec, oldest_grad) {
                (Some((kv, sv, tv)), Some((kg, sg, tg))) => {
                    if tv <= tg {
                        self.vec_cache.remove(&kv);
                        self.bytes -= sv;
                    } else {
                        self.grad_cache.remove(&kg);
                        self.bytes -= sg;
                    }
                }
                (Some((kv, sv, _)), None) => {
                    self.vec_cache.remove(&kv);
                    self.bytes -= sv;
                }
                (None, Some((kg, sg, _))) => {
                    self.grad_cache.remove(&kg);
                    self.bytes -= sg;
                }
                (None, None) => break,
            }
        }
    }

    /// Materialize the spectral form of a canonical factor.
    pub(crate) fn spectral(&self, f: Factor) -> SpectralVectorField {
        let (fld, xf) = f;
        let field = self.field(fld);
        let p = self.profile;
        match self.canonical(xf) {
            Xf::Zero => SpectralVectorField::zeros(*field.grid()),
            Xf::Id => field.clone(),
            Xf::Lo(j) => p.low_pass(field, j),
            Xf::Hp(k) => p.high_pass(field, k),
            Xf::Block(l) => p.block(field, l, crate::lp::BlockWidth::Standard),
            Xf::Tilde(l) => p.block(field, l, crate::lp::BlockWidth::Tilde),
            Xf::LoSq(j) => {
                let lo = p.low_pass(field, j);
                p.low_pass(&lo, j)
            }
            Xf::BlockLo(l, k) => {
                let lo = p.low_pass(field, k);
                p.block(&lo, l, crate::lp::BlockWidth::Standard)
            }
            Xf::BlockHp(l, k) => {
                let hp = p.high_pass(field, k);
                p.block(&hp, l, crate::lp::BlockWidth::Standard)
            }
            Xf::TildeHp(l, k) => {
                let hp = p.high_pass(field, k);
                p.block(&hp, l, crate::lp::BlockWidth::Tilde)
            }
            Xf::LoHp(j, k) => {
                let hp = p.high_pass(field, k);
                p.low_pass(&hp, j)
            }
            Xf::LoBand(j1, j2) => {
                let hi = p.low_pass(field, j2);
                let lo = p.low_pass(field, j1);
                hi.sub(&lo).expect("same grid")
            }
        }
    }

    /// Pointwise derivation plan: which base images combine to this factor.
    /// Returns `None` when the factor must be materialized directly.
    fn derivation(&self, xf: Xf) -> Option<(Xf, Xf)> {
        match xf {
            Xf::Hp(k) => Some((Xf::Id, Xf::Lo(k))),
            Xf::BlockHp(l, k) => Some((Xf::Block(l), Xf::BlockLo(l, k))),
            Xf::LoBand(j1, j2) => Some((Xf::Lo(j2), Xf::Lo(j1))),
            Xf::LoHp(j, k) if j >= k + 1 => Some((Xf::Lo(j), Xf::Lo(k))),
            Xf::LoHp(j, k) if j == k => Some((Xf::Lo(k), Xf::LoSq(k))),
            _ => None,
        }
    }

    pub(crate) fn vec_image(&mut self, f: Factor, m: usize) -> Rc<Vec3Phys> {
        let (fld, raw) = f;
        let xf = self.canonical(raw);
        let key = ((fld, xf), m);
        if let Some((img, _)) = self.vec_cache.get(&key) {
            let img = img.clone();
            let t = self.touch();
            self.vec_cache.get_mut(&key).unwrap().1 = t;
            return img;
        }
        let img = if let Some((base_a, base_b)) = self.derivation(xf) {
            let a = self.vec_image((fld, base_a), m);
            let b = self.vec_image((fld, base_b), m);
            Rc::new(sub_vec3(&a, &b))
        } else {
            Rc::new(vector_images(&self.spectral((fld, xf)), m))
        };
        self.bytes += img[0].len() * 3 * 8;
        let t = self.touch();
        self.vec_cache.insert(key, (img.clone(), t));
        self.evict_if_needed();
        img
    }

    pub(crate) fn grad_image(&mut self, f: Factor, m: usize) -> Rc<GradPhys> {
        let (fld, raw) = f;
        let xf = self.canonical(raw);
        let key = ((fld, xf), m);
        if let Some((img, _)) = self.grad_cache.get(&key) {
            let img = img.clone();
            let t = self.touch();
            self.grad_cache.get_mut(&key).unwrap().1 = t;
            return img;
        }
        let img = if let Some((base_a, base_b)) = self.derivation(xf) {
            let a = self.grad_image((fld, base_a), m);
            let b = self.grad_image((fld, base_b), m);
            Rc::new(sub_grad(&a, &b))
        } else {
            Rc::new(gradient_images(&self.spectral((fld, xf)), m))
        };
        self.bytes += img[0][0].len() * 9 * 8;
        let t = self.touch();
        self.grad_cache.insert(key, (img.clone(), t));
        self.evict_if_needed();
        img
    }

    /// Trilinear contraction `int (a . grad) g . c dx` between symbolic
    /// factors; exact quadrature size chosen from the factor bounds.
    pub(crate) fn tri(&mut self, a: Factor, g: Factor, c: Factor) -> f64 {
        let a = (a.0, self.canonical(a.1));
        let g = (g.0, self.canonical(g.1));
        let c = (c.0, self.canonical(c.1));
        if let Some(v) = self.tri_cache.get(&(a, g, c)) {
            return *v;
        }
        let (ba, bg, bc) = (self.bound(a), self.bound(g), self.bound(c));
        if ba == 0 || bg == 0 || bc == 0 {
            self.tri_cache.insert((a, g, c), 0.0);
            return 0.0;
        }
        let n = self.profile.grid().n_per_dim();
        let m = pick_quad_size(ba + bg + bc, ba.max(bg).max(bc), n)
            .expect("factor bounds exceed padded Nyquist")
            .min(self.quad_size);
        let ai = self.vec_image(a, m);
        let gi = self.grad_image(g, m);
        let ci = self.vec_image(c, m);
        let v = triple_integral_images(&ai, &gi, &ci, self.profile.grid().volume());
        self.tri_cache.insert((a, g, c), v);
        v
    }

    /// Memoized norms of factors used by envelopes and condition series.
    pub(crate) fn factor_norm(&mut self, f: Factor, tag: NormTag) -> f64 {
        let key = ((f.0, self.canonical(f.1)), tag);
        if let Some(v) = self.norm_cache.get(&key) {
            return *v;
        }
        let spectral = self.spectral(key.0);
        let v = match tag {
            NormTag::Linf => lebesgue_norm(&NormOperand::Vector(spectral), Lp::Infinity, 1),
            NormTag::L3 => lebesgue_norm(&NormOperand::Vector(spectral), Lp::Finite(3.0), 1),
            NormTag::GradL2Sq => crate::ops::grad_inner(&spectral, &spectral).expect("same grid"),
        };
        self.norm_cache.insert(key, v);
        v
    }
}

fn sub_vec3(a: &Vec3Phys, b: &Vec3Phys) -> Vec3Phys {
    [0, 1, 2].map(|i| {
        let mut out = a[i].clone();
        out.zip_mut_with(&b[i], |x, &y| *x -= y);
        out
    })
}

fn sub_grad(a: &GradPhys, b: &GradPhys) -> GradPhys {
    [0, 1, 2].map(|i| {
        [0, 1, 2].map(|j| {
            let mut out = a[i][j].clone();
            out.zip_mut_with(&b[i][j], |x, &y| *x -= y);
            out
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_divfree, SpectrumKind, SpectrumSpec};
    use crate::grid::Grid;
    use crate::quadrature::trilinear;
    use std::f64::consts::PI;

    #[test]
    fn canonicalization_collapses() {
        let grid = Grid::new(16, 4.0 * PI).unwrap();
        let p = LpProfile::build(grid).unwrap();
        let u = SpectralVectorField::zeros(grid);
        let ctx = PairContext::new(&p, &u, &u);
        let k = 1;
        assert_eq!(ctx.canonical(Xf::BlockLo(k - 2, k)), Xf::Block(k - 2));
        assert_eq!(ctx.canonical(Xf::BlockLo(k + 1, k)), Xf::Zero);
        assert_eq!(ctx.canonical(Xf::BlockHp(k - 2, k)), Xf::Zero);
        assert_eq!(ctx.canonical(Xf::BlockHp(k + 1, k)), Xf::Block(k + 1));
        assert_eq!(ctx.canonical(Xf::LoHp(k - 1, k)), Xf::Zero);
        assert_eq!(ctx.canonical(Xf::Lo(-20)), Xf::Zero);
        assert_eq!(ctx.canonical(Xf::Lo(20)), Xf::Id);
        assert_eq!(ctx.canonical(Xf::Hp(20)), Xf::Zero);
        assert_eq!(ctx.canonical(Xf::Hp(-20)), Xf::Id);
    }

    #[test]
    fn derived_factors_match_direct_materialization() {
        let grid = Grid::new(16, 4.0 * PI).unwrap();
        let p = LpProfile::build(grid).unwrap();
        let spec = SpectrumSpec {
            kind: SpectrumKind::PowerLaw { alpha: 1.0 },
            band: (p.k_min(), p.k_max()),
            seed: 77,
        };
        let u = random_divfree(grid, &p, &spec).unwrap();
        let b = random_divfree(
            grid,
            &p,
            &SpectrumSpec {
                seed: 78,
                ..spec.clone()
            },
        )
        .unwrap();
        let mut ctx = PairContext::new(&p, &u, &b);
        let k = p.k_min() + 1;
        let m = 2 * grid.n_per_dim();
        for xf in [
            Xf::Hp(k),
            Xf::BlockHp(k, k),
            Xf::LoBand(k - 1, k + 1),
            Xf::LoHp(k + 1, k),
            Xf::LoHp(k, k),
            Xf::TildeHp(k, k),
        ] {
            let derived = ctx.vec_image((Fld::U, xf), m);
            let direct = vector_images(&ctx.spectral((Fld::U, xf)), m);
            let mut worst = 0.0f64;
            let mut scale = 0.0f64;
            for i in 0..3 {
                for (x, y) in derived[i].iter().zip(direct[i].iter()) {
                    worst = worst.max((x - y).abs());
                    scale = scale.max(y.abs());
                }
            }
            assert!(
                worst <= 1e-12 * scale.max(1e-300),
                "{xf:?}: derived image off by {worst} (scale {scale})"
            );
        }
    }

    #[test]
    fn symbolic_trilinear_matches_public_op() {
        let grid = Grid::new(16, 4.0 * PI).unwrap();
        let p = LpProfile::build(grid).unwrap();
        let spec = SpectrumSpec {
            kind: SpectrumKind::PowerLaw { alpha: 1.5 },
            band: (p.k_min(), p.k_max()),
            seed: 5,
        };
        let u = random_divfree(grid, &p, &spec).unwrap();
        let b = random_divfree(
            grid,
            &p,
            &SpectrumSpec {
                seed: 6,
                ..spec.clone()
            },
        )
        .unwrap();
        let mut ctx = PairContext::new(&p, &u, &b);
        let k = p.k_min() + 2;
        let got = ctx.tri((Fld::U, Xf::Lo(k)), (Fld::B, Xf::Lo(k)), (Fld::B, Xf::Hp(k)));
        let want = trilinear(
            &p.low_pass(&u, k),
            &p.low_pass(&b, k),
            &p.high_pass(&b, k),
        )
        .unwrap();
        let scale = want.abs().max(1e-12);
        assert!(
            (got - want).abs() <= 1e-11 * scale,
            "symbolic {got} vs direct {want}"
        );
    }
}
