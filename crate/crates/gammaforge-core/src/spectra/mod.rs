//! Truncated symmetric G-spectra.
//!
//! A spectrum stores levels X_0..X_L as simplicial sets over the product
//! group G×Σn — one group per level, so both actions live in ordinary
//! action tables — together with structure maps X_n ∧ S¹ → X_{n+1} kept as
//! plain tables in the smash numbering (x−1)·q + a. Everything is
//! truncated: levels at `level_cap`, simplicial dimension at `dim_cap`,
//! and every certificate derived from a spectrum records the caps it was
//! computed under.
//!
//! The generalized structure map for an injection α: k → n is iterated
//! suspension followed by the permutation that moves the appended
//! coordinates into the complement of the image; all higher constructions
//! (values at G-sets, shifts, latching, smash products) are phrased
//! through it.

use std::sync::Arc;

use crate::gamma::GammaError;
use crate::groups::{Elem, FiniteGSet, FiniteGroup, GAction, PointedGSet, SymmetricGroup};
use crate::sset::{sphere_decode, sphere_encode, sphere_size, SSetMap, SimplicialGSet};

pub mod latch;
pub mod prolong;

/// A level- and dimension-truncated symmetric G-spectrum.
#[derive(Clone)]
pub struct SymSpectrum {
    pub group: Arc<FiniteGroup>,
    pub level_cap: usize,
    pub dim_cap: usize,
    /// syms[n] presents the Σn factor of levels[n].group
    pub syms: Vec<Arc<SymmetricGroup>>,
    /// levels[n] lives over the product group G×Σn
    pub levels: Vec<SimplicialGSet>,
    /// sigma[n]: X_n ∧ S¹ → X_{n+1} in smash numbering, for n < level_cap
    pub sigma: Vec<SSetMap>,
}

fn sym_tower(l: usize) -> Vec<Arc<SymmetricGroup>> {
    (0..=l).map(|n| Arc::new(SymmetricGroup::new(n))).collect()
}

/// The set {0..n-1} over G×Σn with (g, π) acting by π.
fn coordinate_gset(pg: &Arc<FiniteGroup>, sym: &SymmetricGroup, n: usize) -> FiniteGSet {
    let action = pg
        .elements()
        .map(|gid| {
            let (_, pi) = pg.project(gid).expect("product group");
            (0..n).map(|i| sym.apply(pi, i) as u32).collect()
        })
        .collect();
    FiniteGSet::new(Arc::clone(pg), action).expect("permutation action")
}

/// A simplicial set transported along a group homomorphism `hom` into the
/// group it is defined over (the action of `g` becomes that of `hom(g)`).
fn regroup(x: &SimplicialGSet, group: &Arc<FiniteGroup>, hom: &dyn Fn(usize) -> usize) -> SimplicialGSet {
    let levels = (0..=x.cap)
        .map(|q| {
            if x.levels[q].has_trivial_action() {
                PointedGSet::trivial(Arc::clone(group), x.size(q))
            } else {
                let table = group
                    .elements()
                    .map(|g| (0..=x.size(q)).map(|e| x.act(hom(g), q, e)).collect())
                    .collect();
                PointedGSet {
                    group: Arc::clone(group),
                    size: x.size(q),
                    action: GAction::Table(table),
                }
            }
        })
        .collect();
    let faces = (0..=x.cap)
        .map(|q| {
            (0..if q == 0 { 0 } else { q + 1 })
                .map(|i| (0..=x.size(q)).map(|e| x.face(q, i, e)).collect())
                .collect()
        })
        .collect();
    let degens = (0..=x.cap)
        .map(|q| {
            (0..if q == x.cap { 0 } else { q + 1 })
                .map(|i| (0..=x.size(q)).map(|e| x.degen(q, i, e)).collect())
                .collect()
        })
        .collect();
    SimplicialGSet::new(Arc::clone(group), x.cap, levels, faces, degens)
}

/// Extract the subcomplex on an ascending selection of elements. Returns
/// the subobject, its inclusion, and the old→new projection tables
/// (0 for elements outside the selection).
fn subcomplex(
    x: &SimplicialGSet,
    keep: &[Vec<Elem>],
) -> Result<(SimplicialGSet, SSetMap, Vec<Vec<Elem>>), GammaError> {
    x.check_selection_subcomplex(keep)
        .map_err(|e| GammaError::Invalid {
            reason: format!("selection is not a subcomplex: {e}"),
        })?;
    let mut to_new: Vec<Vec<Elem>> = Vec::with_capacity(x.cap + 1);
    let mut incl: Vec<Vec<Elem>> = Vec::with_capacity(x.cap + 1);
    for q in 0..=x.cap {
        let mut table = vec![0 as Elem; x.size(q) as usize + 1];
        let mut inc = vec![0 as Elem];
        for (new, &old) in keep[q].iter().enumerate() {
            table[old as usize] = new as Elem + 1;
            inc.push(old);
        }
        to_new.push(table);
        incl.push(inc);
    }
    let levels = (0..=x.cap)
        .map(|q| {
            let size = keep[q].len() as u32;
            if x.levels[q].has_trivial_action() {
                PointedGSet::trivial(Arc::clone(&x.group), size)
            } else {
                let table = x
                    .group
                    .elements()
                    .map(|g| {
                        (0..=size)
                            .map(|e| to_new[q][x.act(g, q, incl[q][e as usize]) as usize])
                            .collect()
                    })
                    .collect();
                PointedGSet {
                    group: Arc::clone(&x.group),
                    size,
                    action: GAction::Table(table),
                }
            }
        })
        .collect();
    let faces = (0..=x.cap)
        .map(|q| {
            (0..if q == 0 { 0 } else { q + 1 })
                .map(|i| {
                    (0..=keep[q].len() as u32)
                        .map(|e| to_new[q - 1][x.face(q, i, incl[q][e as usize]) as usize])
                        .collect()
                })
                .collect()
        })
        .collect();
    let degens = (0..=x.cap)
        .map(|q| {
            (0..if q == x.cap { 0 } else { q + 1 })
                .map(|i| {
                    (0..=keep[q].len() as u32)
                        .map(|e| to_new[q + 1][x.degen(q, i, incl[q][e as usize]) as usize])
                        .collect()
                })
                .collect()
        })
        .collect();
    let sub = SimplicialGSet::new(Arc::clone(&x.group), x.cap, levels, faces, degens);
    Ok((sub, SSetMap { maps: incl }, to_new))
}

impl SymSpectrum {
    pub fn size(&self, n: usize, q: usize) -> u32 {
        self.levels[n].size(q)
    }

    /// The structure map on x ∧ (circle jump a) in degree q.
    pub fn sigma_apply(&self, n: usize, q: usize, x: Elem, a: Elem) -> Elem {
        if x == 0 || a == 0 {
            return 0;
        }
        self.sigma[n].maps[q][((x - 1) as usize) * q + a as usize]
    }

    /// Iterated structure map appending the sphere coordinates in `digits`
    /// (circle jumps, one level per entry; a zero digit collapses).
    pub fn sigma_iter(&self, n: usize, q: usize, x: Elem, digits: &[Elem]) -> Elem {
        let mut cur = x;
        for (j, &d) in digits.iter().enumerate() {
            cur = self.sigma_apply(n + j, q, cur, d);
            if cur == 0 {
                return 0;
            }
        }
        cur
    }

    /// Generalized structure map X(α) for an injection α: {0..k-1} → {0..n2-1}
    /// (listed as `alpha`), applied to x ∧ (sphere coordinates on the
    /// complement of the image, ascending).
    pub fn inj_apply(&self, alpha: &[usize], n2: usize, q: usize, x: Elem, digits: &[Elem]) -> Elem {
        let k = alpha.len();
        debug_assert_eq!(k + digits.len(), n2);
        let cur = self.sigma_iter(k, q, x, digits);
        if cur == 0 {
            return 0;
        }
        let mut p = vec![0u8; n2];
        let mut hit = vec![false; n2];
        for (i, &a) in alpha.iter().enumerate() {
            p[i] = a as u8;
            hit[a] = true;
        }
        let mut j = k;
        for (c, &h) in hit.iter().enumerate() {
            if !h {
                p[j] = c as u8;
                j += 1;
            }
        }
        let rho = self.syms[n2].rank(&p);
        let pg = &self.levels[n2].group;
        self.levels[n2]
            .act(pg.pair_index(self.group.identity(), rho), q, cur)
    }

    /// Exhaustive check of the spectrum axioms within the caps: each level
    /// is a valid simplicial G×Σn-set, the structure maps are pointed
    /// simplicial maps, and every iterated structure map is equivariant
    /// for Σn×Σm block permutations and the diagonal G-action.
    pub fn validate(&self) -> Result<(), GammaError> {
        let bad = |reason: String| GammaError::Invalid { reason };
        if self.levels.len() != self.level_cap + 1 || self.sigma.len() != self.level_cap {
            return Err(bad("spectrum level lists do not match the cap".into()));
        }
        for (n, lv) in self.levels.iter().enumerate() {
            lv.validate()
                .map_err(|e| bad(format!("level {n}: {e}")))?;
            if lv.group.order() != self.group.order() * self.syms[n].group.order() {
                return Err(bad(format!("level {n} is not over G x Sigma_{n}")));
            }
        }
        for n in 0..self.level_cap {
            for q in 0..=self.dim_cap {
                let maps = &self.sigma[n].maps[q];
                if maps.len() != (self.size(n, q) as usize) * q + 1 || maps[0] != 0 {
                    return Err(bad(format!("structure map {n} has a bad degree-{q} table")));
                }
                for x in 1..=self.size(n, q) {
                    for a in 1..=q as Elem {
                        let y = self.sigma_apply(n, q, x, a);
                        if y > self.size(n + 1, q) {
                            return Err(bad(format!("structure map {n} leaves level {}", n + 1)));
                        }
                        for i in 0..=q {
                            if q > 0 {
                                let fx = self.levels[n].face(q, i, x);
                                let fa = crate::sset::circle_face(q as Elem, i as Elem, a);
                                let lhs = self.levels[n + 1].face(q, i, y);
                                let rhs = if fx == 0 || fa == 0 {
                                    0
                                } else {
                                    self.sigma_apply(n, q - 1, fx, fa)
                                };
                                if lhs != rhs {
                                    return Err(bad(format!(
                                        "structure map {n} fails d_{i} at degree {q}, ({x}, {a})"
                                    )));
                                }
                            }
                            if q < self.dim_cap {
                                let sx = self.levels[n].degen(q, i, x);
                                let sa = crate::sset::circle_degen(i as Elem, a);
                                let lhs = self.levels[n + 1].degen(q, i, y);
                                if lhs != self.sigma_apply(n, q + 1, sx, sa) {
                                    return Err(bad(format!(
                                        "structure map {n} fails s_{i} at degree {q}, ({x}, {a})"
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        // iterated equivariance, including the pure G part (γ = ρ = id)
        let mut digits = vec![0 as Elem; self.level_cap];
        let mut moved = vec![0 as Elem; self.level_cap];
        for n in 0..=self.level_cap {
            for m in 1..=self.level_cap - n {
                let symm = &self.syms[m];
                let pgn = &self.levels[n].group;
                let pgt = &self.levels[n + m].group;
                for q in 0..=self.dim_cap {
                    for x in 1..=self.size(n, q) {
                        for y in 1..=sphere_size(q, m) {
                            sphere_decode(q as Elem, m, y, &mut digits);
                            let base = self.sigma_iter(n, q, x, &digits[..m]);
                            for g in self.group.elements() {
                                for gam in 0..self.syms[n].group.order() {
                                    for rho in 0..symm.group.order() {
                                        let rinv = symm.group.inv(rho);
                                        for l in 0..m {
                                            moved[l] = digits[symm.apply(rinv, l)];
                                        }
                                        let gx =
                                            self.levels[n].act(pgn.pair_index(g, gam), q, x);
                                        let lhs = self.sigma_iter(n, q, gx, &moved[..m]);
                                        let blk = self.syms[n + m].block_rank(
                                            n,
                                            self.syms[n].perm(gam),
                                            symm.perm(rho),
                                        );
                                        let rhs = self.levels[n + m].act(
                                            pgt.pair_index(g, blk),
                                            q,
                                            base,
                                        );
                                        if lhs != rhs {
                                            return Err(bad(format!(
                                                "iterated structure map {n}+{m} is not equivariant \
                                                 at degree {q}, ({x}, {y})"
                                            )));
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// The sphere spectrum: level n is the n-fold smash of circles with Σn
/// permuting the coordinates and G acting trivially.
pub fn sphere_spectrum(group: &Arc<FiniteGroup>, level_cap: usize, dim_cap: usize) -> SymSpectrum {
    let syms = sym_tower(level_cap);
    let levels: Vec<SimplicialGSet> = (0..=level_cap)
        .map(|n| {
            let pg = FiniteGroup::product(group, &syms[n].group);
            SimplicialGSet::sphere(&coordinate_gset(&pg, &syms[n], n), dim_cap)
        })
        .collect();
    let sigma = (0..level_cap)
        .map(|n| SSetMap {
            maps: (0..=dim_cap)
                .map(|q| {
                    let mut table = vec![0 as Elem; sphere_size(q, n) as usize * q + 1];
                    let mut digits = vec![0 as Elem; n + 1];
                    for x in 1..=sphere_size(q, n) {
                        sphere_decode(q as Elem, n, x, &mut digits);
                        for a in 1..=q as Elem {
                            digits[n] = a;
                            table[(x - 1) as usize * q + a as usize] =
                                sphere_encode(q as Elem, &digits[..=n]);
                        }
                    }
                    table
                })
                .collect(),
        })
        .collect();
    SymSpectrum {
        group: Arc::clone(group),
        level_cap,
        dim_cap,
        syms,
        levels,
        sigma,
    }
}

/// The S-indexed power of a simplicial set over the product group, with
/// (g, π) permuting the slots through the G-action on S and acting on
/// every slot. Uses the factored action, so large levels stay cheap.
fn power_level(z: &SimplicialGSet, s_set: &FiniteGSet, pg: &Arc<FiniteGroup>) -> SimplicialGSet {
    let s = s_set.size;
    let decode = |radix: u64, mut v: u64, slots: &mut [u64]| {
        for slot in slots.iter_mut() {
            *slot = v % radix;
            v /= radix;
        }
    };
    let levels = (0..=z.cap)
        .map(|q| {
            let radix = z.size(q) as u64 + 1;
            let size = radix.pow(s as u32) - 1;
            assert!(size <= u32::MAX as u64, "power level overflows the index type");
            let source = pg
                .elements()
                .map(|gid| {
                    let (gi, _) = pg.project(pg.inv(gid)).expect("product group");
                    (0..s).map(|j| s_set.act(gi, j) as u32).collect()
                })
                .collect();
            let inner = pg
                .elements()
                .map(|gid| (0..z.size(q) + 1).map(|e| z.act(gid, q, e)).collect())
                .collect();
            PointedGSet {
                group: Arc::clone(pg),
                size: size as u32,
                action: GAction::Power {
                    radix,
                    slots: s,
                    source,
                    inner,
                },
            }
        })
        .collect::<Vec<_>>();
    let mut slots = vec![0u64; s];
    let faces = (0..=z.cap)
        .map(|q| {
            let radix = z.size(q) as u64 + 1;
            let tradix = if q == 0 { 1 } else { z.size(q - 1) as u64 + 1 };
            (0..if q == 0 { 0 } else { q + 1 })
                .map(|i| {
                    (0..=levels[q].size as u64)
                        .map(|e| {
                            decode(radix, e, &mut slots);
                            let mut out = 0u64;
                            let mut scale = 1u64;
                            for &sl in slots.iter() {
                                out += z.face(q, i, sl as Elem) as u64 * scale;
                                scale *= tradix;
                            }
                            out as Elem
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let degens = (0..=z.cap)
        .map(|q| {
            let radix = z.size(q) as u64 + 1;
            let tradix = if q == z.cap { 0 } else { z.size(q + 1) as u64 + 1 };
            (0..if q == z.cap { 0 } else { q + 1 })
                .map(|i| {
                    (0..=levels[q].size as u64)
                        .map(|e| {
                            decode(radix, e, &mut slots);
                            let mut out = 0u64;
                            let mut scale = 1u64;
                            for &sl in slots.iter() {
                                out += z.degen(q, i, sl as Elem) as u64 * scale;
                                scale *= tradix;
                            }
                            out as Elem
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    SimplicialGSet::new(Arc::clone(pg), z.cap, levels, faces, degens)
}

/// The S-indexed product of sphere spectra, G permuting the factors
/// through S and Σn acting on every sphere diagonally.
pub fn product_spectrum(s_set: &FiniteGSet, level_cap: usize, dim_cap: usize) -> SymSpectrum {
    let group = Arc::clone(&s_set.group);
    let syms = sym_tower(level_cap);
    let s = s_set.size;
    let levels: Vec<SimplicialGSet> = (0..=level_cap)
        .map(|n| {
            let pg = FiniteGroup::product(&group, &syms[n].group);
            let sphere = SimplicialGSet::sphere(&coordinate_gset(&pg, &syms[n], n), dim_cap);
            power_level(&sphere, s_set, &pg)
        })
        .collect();
    let sigma = (0..level_cap)
        .map(|n| SSetMap {
            maps: (0..=dim_cap)
                .map(|q| {
                    let size = levels[n].size(q);
                    let radix = sphere_size(q, n) as u64 + 1;
                    let tradix = sphere_size(q, n + 1) as u64 + 1;
                    let mut digits = vec![0 as Elem; n + 1];
                    let mut table = vec![0 as Elem; size as usize * q + 1];
                    for x in 1..=size {
                        for a in 1..=q as Elem {
                            let mut v = x as u64;
                            let mut out = 0u64;
                            let mut scale = 1u64;
                            for _ in 0..s {
                                let slot = (v % radix) as Elem;
                                v /= radix;
                                let moved = if slot == 0 {
                                    0
                                } else {
                                    sphere_decode(q as Elem, n, slot, &mut digits);
                                    digits[n] = a;
                                    sphere_encode(q as Elem, &digits[..=n])
                                };
                                out += moved as u64 * scale;
                                scale *= tradix;
                            }
                            table[(x - 1) as usize * q + a as usize] = out as Elem;
                        }
                    }
                    table
                })
                .collect(),
        })
        .collect();
    SymSpectrum {
        group,
        level_cap,
        dim_cap,
        syms,
        levels,
        sigma,
    }
}

/// The fat wedge inside the S-indexed product: tuples with two equal
/// entries or a basepoint entry. Returns the subspectrum and its
/// levelwise inclusion.
pub fn fat_wedge(
    s_set: &FiniteGSet,
    level_cap: usize,
    dim_cap: usize,
) -> Result<(SymSpectrum, SpectrumMap), GammaError> {
    let full = product_spectrum(s_set, level_cap, dim_cap);
    let s = s_set.size;
    let mut levels = Vec::with_capacity(level_cap + 1);
    let mut incls = Vec::with_capacity(level_cap + 1);
    let mut projs = Vec::with_capacity(level_cap + 1);
    for n in 0..=level_cap {
        let keep: Vec<Vec<Elem>> = (0..=dim_cap)
            .map(|q| {
                let radix = sphere_size(q, n) as u64 + 1;
                (1..=full.size(n, q))
                    .filter(|&x| {
                        let mut slots = Vec::with_capacity(s);
                        let mut v = x as u64;
                        for _ in 0..s {
                            slots.push(v % radix);
                            v /= radix;
                        }
                        slots.iter().any(|&d| d == 0)
                            || (0..s).any(|i| (0..i).any(|j| slots[i] == slots[j]))
                    })
                    .collect()
            })
            .collect();
        let (sub, incl, to_new) = subcomplex(&full.levels[n], &keep)?;
        levels.push(sub);
        incls.push(incl);
        projs.push(to_new);
    }
    let sigma = (0..level_cap)
        .map(|n| SSetMap {
            maps: (0..=dim_cap)
                .map(|q| {
                    let mut table = vec![0 as Elem; levels[n].size(q) as usize * q + 1];
                    for x in 1..=levels[n].size(q) {
                        let old = incls[n].apply(q, x);
                        for a in 1..=q as Elem {
                            table[(x - 1) as usize * q + a as usize] =
                                projs[n + 1][q][full.sigma_apply(n, q, old, a) as usize];
                        }
                    }
                    table
                })
                .collect(),
        })
        .collect();
    let wedge = SymSpectrum {
        group: Arc::clone(&full.group),
        level_cap,
        dim_cap,
        syms: full.syms.clone(),
        levels,
        sigma,
    };
    Ok((wedge, SpectrumMap { maps: incls }))
}

/// The suspension spectrum of a pointed simplicial G-set: level n is
/// K ∧ S^n with Σn on the sphere coordinates.
pub fn suspension_spectrum(k: &SimplicialGSet, level_cap: usize) -> SymSpectrum {
    let group = Arc::clone(&k.group);
    let dim_cap = k.cap;
    let syms = sym_tower(level_cap);
    let levels: Vec<SimplicialGSet> = (0..=level_cap)
        .map(|n| {
            let pg = FiniteGroup::product(&group, &syms[n].group);
            let sphere = SimplicialGSet::sphere(&coordinate_gset(&pg, &syms[n], n), dim_cap);
            let kk = regroup(k, &pg, &|gid| pg.project(gid).expect("product").0);
            SimplicialGSet::smash(&kk, &sphere).expect("compatible factors")
        })
        .collect();
    let sigma = (0..level_cap)
        .map(|n| SSetMap {
            maps: (0..=dim_cap)
                .map(|q| {
                    let (szs, szt) = (sphere_size(q, n), sphere_size(q, n + 1));
                    let mut digits = vec![0 as Elem; n + 1];
                    let mut table = vec![0 as Elem; levels[n].size(q) as usize * q + 1];
                    for e in 1..=levels[n].size(q) {
                        let (kx, sx) = ((e - 1) / szs, (e - 1) % szs + 1);
                        sphere_decode(q as Elem, n, sx, &mut digits);
                        for a in 1..=q as Elem {
                            digits[n] = a;
                            let st = sphere_encode(q as Elem, &digits[..=n]);
                            table[(e - 1) as usize * q + a as usize] = kx * szt + st;
                        }
                    }
                    table
                })
                .collect(),
        })
        .collect();
    SymSpectrum {
        group,
        level_cap,
        dim_cap,
        syms,
        levels,
        sigma,
    }
}

/// The constant spectrum on a pointed simplicial G-set with structure maps
/// collapsing to the basepoint. The standard non-flat example.
pub fn constant_spectrum(k: &SimplicialGSet, level_cap: usize) -> SymSpectrum {
    let group = Arc::clone(&k.group);
    let dim_cap = k.cap;
    let syms = sym_tower(level_cap);
    let levels: Vec<SimplicialGSet> = (0..=level_cap)
        .map(|n| {
            let pg = FiniteGroup::product(&group, &syms[n].group);
            regroup(k, &pg, &|gid| pg.project(gid).expect("product").0)
        })
        .collect();
    let sigma = (0..level_cap)
        .map(|n| SSetMap {
            maps: (0..=dim_cap)
                .map(|q| vec![0 as Elem; levels[n].size(q) as usize * q + 1])
                .collect(),
        })
        .collect();
    SymSpectrum {
        group,
        level_cap,
        dim_cap,
        syms,
        levels,
        sigma,
    }
}

/// X(M) for a finite G-set M: the level |M| with the G-action twisted by
/// the coordinate permutations g induces on M. Returned over G alone.
pub fn value_at(x: &SymSpectrum, m_set: &FiniteGSet) -> Result<SimplicialGSet, GammaError> {
    let m = m_set.size;
    if m > x.level_cap {
        return Err(GammaError::CapTooSmall {
            what: format!("spectrum value at a set of size {m}"),
            needed: m,
            cap: x.level_cap,
        });
    }
    let ranks: Vec<usize> = x
        .group
        .elements()
        .map(|g| {
            let p: Vec<u8> = (0..m).map(|i| m_set.act(g, i) as u8).collect();
            x.syms[m].rank(&p)
        })
        .collect();
    Ok(twisted_level(x, m, &ranks))
}

/// The level n of a spectrum as a simplicial set over G alone.
pub fn underlying_level(x: &SymSpectrum, n: usize) -> SimplicialGSet {
    twisted_level(x, n, &vec![x.syms[n].group.identity(); x.group.order()])
}

fn twisted_level(x: &SymSpectrum, n: usize, ranks: &[usize]) -> SimplicialGSet {
    let lv = &x.levels[n];
    let pg = &lv.group;
    let trivial_twist = ranks.iter().all(|&r| r == x.syms[n].group.identity());
    let levels = (0..=lv.cap)
        .map(|q| {
            if lv.levels[q].has_trivial_action() && trivial_twist {
                PointedGSet::trivial(Arc::clone(&x.group), lv.size(q))
            } else {
                let table = x
                    .group
                    .elements()
                    .map(|g| {
                        (0..=lv.size(q))
                            .map(|e| lv.act(pg.pair_index(g, ranks[g]), q, e))
                            .collect()
                    })
                    .collect();
                PointedGSet {
                    group: Arc::clone(&x.group),
                    size: lv.size(q),
                    action: GAction::Table(table),
                }
            }
        })
        .collect();
    let faces = (0..=lv.cap)
        .map(|q| {
            (0..if q == 0 { 0 } else { q + 1 })
                .map(|i| (0..=lv.size(q)).map(|e| lv.face(q, i, e)).collect())
                .collect()
        })
        .collect();
    let degens = (0..=lv.cap)
        .map(|q| {
            (0..if q == lv.cap { 0 } else { q + 1 })
                .map(|i| (0..=lv.size(q)).map(|e| lv.degen(q, i, e)).collect())
                .collect()
        })
        .collect();
    SimplicialGSet::new(Arc::clone(&x.group), lv.cap, levels, faces, degens)
}

/// The shifted spectrum sh^M X with (sh^M X)_n = X(M ⊔ {1..n}).
pub fn shift(x: &SymSpectrum, m_set: &FiniteGSet) -> Result<SymSpectrum, GammaError> {
    let m = m_set.size;
    if m > x.level_cap {
        return Err(GammaError::CapTooSmall {
            what: format!("shift by a set of size {m}"),
            needed: m,
            cap: x.level_cap,
        });
    }
    let level_cap = x.level_cap - m;
    let syms = sym_tower(level_cap);
    let levels: Vec<SimplicialGSet> = (0..=level_cap)
        .map(|n| {
            let pg = FiniteGroup::product(&x.group, &syms[n].group);
            let old = &x.levels[m + n];
            let opg = &old.group;
            let levels = (0..=old.cap)
                .map(|q| {
                    let table = pg
                        .elements()
                        .map(|gid| {
                            let (g, pi) = pg.project(gid).expect("product");
                            let mut p = vec![0u8; m + n];
                            for (i, slot) in p.iter_mut().enumerate().take(m) {
                                *slot = m_set.act(g, i) as u8;
                            }
                            for j in 0..n {
                                p[m + j] = (m + syms[n].apply(pi, j)) as u8;
                            }
                            let rho = x.syms[m + n].rank(&p);
                            (0..=old.size(q))
                                .map(|e| old.act(opg.pair_index(g, rho), q, e))
                                .collect()
                        })
                        .collect();
                    PointedGSet {
                        group: Arc::clone(&pg),
                        size: old.size(q),
                        action: GAction::Table(table),
                    }
                })
                .collect();
            let faces = (0..=old.cap)
                .map(|q| {
                    (0..if q == 0 { 0 } else { q + 1 })
                        .map(|i| (0..=old.size(q)).map(|e| old.face(q, i, e)).collect())
                        .collect()
                })
                .collect();
            let degens = (0..=old.cap)
                .map(|q| {
                    (0..if q == old.cap { 0 } else { q + 1 })
                        .map(|i| (0..=old.size(q)).map(|e| old.degen(q, i, e)).collect())
                        .collect()
                })
                .collect();
            SimplicialGSet::new(pg, old.cap, levels, faces, degens)
        })
        .collect();
    let sigma = (0..level_cap).map(|n| x.sigma[m + n].clone()).collect();
    Ok(SymSpectrum {
        group: Arc::clone(&x.group),
        level_cap,
        dim_cap: x.dim_cap,
        syms,
        levels,
        sigma,
    })
}

/// A map of symmetric spectra: one pointed simplicial map per level.
#[derive(Clone)]
pub struct SpectrumMap {
    pub maps: Vec<SSetMap>,
}

impl SpectrumMap {
    /// Levelwise validation (simplicial, pointed, G×Σn-equivariant) plus
    /// commutation with the structure maps.
    pub fn validate(&self, x: &SymSpectrum, y: &SymSpectrum) -> Result<(), GammaError> {
        let bad = |reason: String| GammaError::Invalid { reason };
        if x.level_cap != y.level_cap || x.dim_cap != y.dim_cap {
            return Err(bad("spectrum map endpoints have different caps".into()));
        }
        if self.maps.len() != x.level_cap + 1 {
            return Err(bad("spectrum map has the wrong number of levels".into()));
        }
        for n in 0..=x.level_cap {
            self.maps[n]
                .validate(&x.levels[n], &y.levels[n], true)
                .map_err(|e| bad(format!("level {n}: {e}")))?;
        }
        for n in 0..x.level_cap {
            for q in 1..=x.dim_cap {
                for e in 1..=x.size(n, q) {
                    for a in 1..=q as Elem {
                        let lhs = self.maps[n + 1].apply(q, x.sigma_apply(n, q, e, a));
                        let rhs = y.sigma_apply(n, q, self.maps[n].apply(q, e), a);
                        if lhs != rhs {
                            return Err(bad(format!(
                                "map does not commute with the structure map at level {n}, \
                                 degree {q}, ({e}, {a})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_levelwise_injective(&self) -> bool {
        self.maps.iter().all(|m| m.is_injective())
    }

    pub fn is_levelwise_bijective(&self, target: &SymSpectrum) -> bool {
        self.maps
            .iter()
            .enumerate()
            .all(|(n, m)| m.is_bijective_onto(&target.levels[n]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::SubgroupRef;

    fn same_tables(a: &SimplicialGSet, b: &SimplicialGSet) {
        assert_eq!(a.cap, b.cap);
        assert_eq!(a.group.order(), b.group.order());
        for q in 0..=a.cap {
            assert_eq!(a.size(q), b.size(q), "degree {q}");
            for e in 0..=a.size(q) {
                for i in 0..=q {
                    if q > 0 {
                        assert_eq!(a.face(q, i, e), b.face(q, i, e));
                    }
                    if q < a.cap {
                        assert_eq!(a.degen(q, i, e), b.degen(q, i, e));
                    }
                }
                for g in a.group.elements() {
                    assert_eq!(a.act(g, q, e), b.act(g, q, e));
                }
            }
        }
    }

    #[test]
    fn sphere_spectrum_is_a_symmetric_spectrum() {
        let z2 = FiniteGroup::cyclic(2);
        let sp = sphere_spectrum(&z2, 3, 3);
        sp.validate().unwrap();
        for n in 0..=3 {
            for q in 0..=3 {
                assert_eq!(sp.size(n, q), sphere_size(q, n));
            }
        }
    }

    #[test]
    fn value_at_a_free_orbit_matches_the_equivariant_sphere() {
        let z2 = FiniteGroup::cyclic(2);
        let sp = sphere_spectrum(&z2, 3, 3);
        let m = FiniteGSet::free_orbit(Arc::clone(&z2));
        let va = value_at(&sp, &m).unwrap();
        va.validate().unwrap();
        same_tables(&va, &SimplicialGSet::sphere(&m, 3));
        // a trivial set gives the level back
        let t = FiniteGSet::trivial(Arc::clone(&z2), 2);
        same_tables(&value_at(&sp, &t).unwrap(), &underlying_level(&sp, 2));
    }

    #[test]
    fn product_and_fat_wedge_example_counts() {
        let e = FiniteGroup::trivial();
        let s = FiniteGSet::trivial(Arc::clone(&e), 2);
        let full = product_spectrum(&s, 2, 2);
        full.validate().unwrap();
        let (fw, incl) = fat_wedge(&s, 2, 2).unwrap();
        fw.validate().unwrap();
        incl.validate(&fw, &full).unwrap();
        assert!(incl.is_levelwise_injective());
        // one circle simplex in degree 1: every pair has equal or base entries
        assert_eq!(full.size(1, 1), 3);
        assert_eq!(fw.size(1, 1), 3);
        // two circle simplices in degree 2: the (a,b) pairs drop out
        assert_eq!(full.size(1, 2), 8);
        assert_eq!(fw.size(1, 2), 6);
        // a singleton has a basepoint fat wedge
        let one = FiniteGSet::trivial(Arc::clone(&e), 1);
        let (fw1, _) = fat_wedge(&one, 2, 2).unwrap();
        for n in 0..=2 {
            for q in 0..=2 {
                assert_eq!(fw1.size(n, q), 0);
            }
        }
    }

    #[test]
    fn swap_action_on_the_free_orbit_product_fixes_the_diagonal() {
        let z2 = FiniteGroup::cyclic(2);
        let s = FiniteGSet::free_orbit(Arc::clone(&z2));
        let full = product_spectrum(&s, 2, 2);
        full.validate().unwrap();
        let pg = &full.levels[1].group;
        let gsub = SubgroupRef::new(
            pg,
            z2.elements()
                .map(|g| pg.pair_index(g, full.syms[1].group.identity()))
                .collect(),
        )
        .unwrap();
        let fixed = full.levels[1].levels[1].fixed_elems(&gsub);
        assert_eq!(fixed.len(), 1, "only the diagonal pair is swap-fixed");
    }

    #[test]
    fn shift_by_the_empty_set_is_the_identity() {
        let z2 = FiniteGroup::cyclic(2);
        let sp = product_spectrum(&FiniteGSet::free_orbit(Arc::clone(&z2)), 2, 2);
        let sh = shift(&sp, &FiniteGSet::trivial(Arc::clone(&z2), 0)).unwrap();
        sh.validate().unwrap();
        for n in 0..=2 {
            same_tables(&sh.levels[n], &sp.levels[n]);
        }
    }

    #[test]
    fn shift_reindexes_levels_and_stays_valid() {
        let z2 = FiniteGroup::cyclic(2);
        let sp = sphere_spectrum(&z2, 3, 3);
        let m = FiniteGSet::free_orbit(Arc::clone(&z2));
        let sh = shift(&sp, &m).unwrap();
        sh.validate().unwrap();
        assert_eq!(sh.level_cap, 1);
        for q in 0..=3 {
            assert_eq!(sh.size(0, q), sphere_size(q, 2));
            assert_eq!(sh.size(1, q), sphere_size(q, 3));
        }
        match shift(&sp, &FiniteGSet::trivial(z2, 4)) {
            Err(GammaError::CapTooSmall { needed, cap, .. }) => {
                assert_eq!((needed, cap), (4, 3));
            }
            _ => panic!("shift past the level cap must fail"),
        }
    }

    #[test]
    fn suspension_and_constant_spectra_validate() {
        let z2 = FiniteGroup::cyclic(2);
        let k = SimplicialGSet::sphere(&FiniteGSet::free_orbit(Arc::clone(&z2)), 3);
        suspension_spectrum(&k, 2).validate().unwrap();
        let pt = SimplicialGSet::discrete(&PointedGSet::trivial(Arc::clone(&z2), 1), 3);
        let cs = constant_spectrum(&pt, 2);
        cs.validate().unwrap();
        for n in 0..=2 {
            for q in 0..=3 {
                assert_eq!(cs.size(n, q), 1);
            }
        }
    }
}
