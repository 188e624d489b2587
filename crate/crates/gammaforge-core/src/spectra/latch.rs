//! Latching objects, smash products of spectra, and flatness certificates.
//!
//! The central colimit here is computed by two deliberately independent
//! engines that stay in the tree as permanent oracles for one another:
//!
//! * a comma engine ([`CommaLevel`]) that enumerates pairs of injections
//!   with a sphere on the leftover letters — this is also the smash
//!   product of two spectra, and latching is the special case where the
//!   second factor is the reduced sphere spectrum;
//! * a subset-poset engine ([`latching`] with [`LatchMethod::Poset`]) that
//!   glues the partial suspensions `X(V) ∧ S^(complement)` over the
//!   lattice of proper subsets of the level.
//!
//! [`latching_comparison`] builds the isomorphism between the two results
//! and checks it elementwise.  Flatness likewise has independent routes:
//! the suspension-injectivity conditions ([`flat_check`],
//! [`flat_check_map`], [`flat_check_inclusion`]), injectivity of the
//! latching maps ([`flat_via_latching`], [`flat_via_latching_map`]), and
//! the subset-cube colimit criteria ([`cube_colimit_check`],
//! [`cube_conditions_check`], and [`CubeFunctor`] for the abstract form).

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::colim::UnionFind;
use crate::gamma::GammaError;
use crate::groups::{Elem, FiniteGSet, FiniteGroup, GAction, PointedGSet};
use crate::par::maybe_par_range;
use crate::sset::{
    circle_degen, circle_face, sphere_decode, sphere_encode, sphere_size, SSetMap, SimplicialGSet,
};

use super::{
    constant_spectrum, product_spectrum, sphere_spectrum, subcomplex, suspension_spectrum,
    sym_tower, SpectrumMap, SymSpectrum,
};

/// Ascending letters of `{0..n-1}` that do not occur in `sub`.
fn complement(sub: &[usize], n: usize) -> Vec<usize> {
    let mut hit = vec![false; n];
    for &s in sub {
        hit[s] = true;
    }
    (0..n).filter(|&i| !hit[i]).collect()
}

/// All injective words of length `j` over `{0..n-1}`, lexicographically.
fn arrangements(n: usize, j: usize) -> Vec<Vec<usize>> {
    if j == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for shorter in arrangements(n, j - 1) {
        for v in 0..n {
            if !shorter.contains(&v) {
                let mut w = shorter.clone();
                w.push(v);
                out.push(w);
            }
        }
    }
    out.sort();
    out
}

fn transposition(m: usize, i: usize) -> Vec<u8> {
    let mut p: Vec<u8> = (0..m as u8).collect();
    p.swap(i, i + 1);
    p
}

/// Accumulates a value per colimit class from per-node computations,
/// insisting that every node of a class produces the same value and that
/// nodes glued to the basepoint produce the base value.  Any violation
/// means the relation set and the value rule disagree, so each use doubles
/// as an internal consistency check on the engine that produced the
/// classes.
struct ClassTable {
    vals: Vec<Elem>,
    seen: Vec<bool>,
}

impl ClassTable {
    fn new(classes: Elem) -> ClassTable {
        ClassTable {
            vals: vec![0; classes as usize + 1],
            seen: vec![false; classes as usize + 1],
        }
    }

    #[must_use]
    fn put(&mut self, class: Elem, val: Elem) -> bool {
        if class == 0 {
            return val == 0;
        }
        let c = class as usize;
        if self.seen[c] {
            self.vals[c] == val
        } else {
            self.seen[c] = true;
            self.vals[c] = val;
            true
        }
    }
}

fn class_clash(what: &str, level: usize, q: usize) -> GammaError {
    GammaError::Invalid {
        reason: format!("{what} is not constant on colimit classes at level {level}, degree {q}"),
    }
}

/// The sphere spectrum with its zeroth level replaced by a point.
///
/// Smashing a spectrum with this is exactly the latching construction:
/// level `n` of the smash only sees proper decompositions, because the
/// trivial zeroth level kills every summand that would use all of `n`.
pub fn reduced_sphere_spectrum(
    group: &Arc<FiniteGroup>,
    level_cap: usize,
    dim_cap: usize,
) -> SymSpectrum {
    let mut s = sphere_spectrum(group, level_cap, dim_cap);
    s.levels[0] = SimplicialGSet::point(Arc::clone(&s.levels[0].group), dim_cap);
    if level_cap > 0 {
        s.sigma[0] = SSetMap {
            maps: (0..=dim_cap).map(|_| vec![0]).collect(),
        };
    }
    s
}

/// The spectrum that is a single basepoint in every level and degree.
pub fn basepoint_spectrum(
    group: &Arc<FiniteGroup>,
    level_cap: usize,
    dim_cap: usize,
) -> SymSpectrum {
    let g = Arc::clone(group);
    constant_spectrum(&SimplicialGSet::point(g, dim_cap), level_cap)
}

/// The unique map from the basepoint spectrum into `x`.
pub fn basepoint_inclusion(x: &SymSpectrum) -> SpectrumMap {
    SpectrumMap {
        maps: (0..=x.level_cap)
            .map(|_| SSetMap {
                maps: (0..=x.dim_cap).map(|_| vec![0]).collect(),
            })
            .collect(),
    }
}

/// The identity self-map of a spectrum.
pub fn identity_spectrum_map(x: &SymSpectrum) -> SpectrumMap {
    SpectrumMap {
        maps: (0..=x.level_cap)
            .map(|n| SSetMap {
                maps: (0..=x.dim_cap)
                    .map(|q| (0..=x.size(n, q)).collect())
                    .collect(),
            })
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// The comma engine.
// ---------------------------------------------------------------------------

/// One level of the comma construction underlying `x ∧ y`.
///
/// A node is a tuple `(k, α, xe, ye, z)`: an injective word `α` of length
/// `k + k'` over the letters of the level `n` whose first `k` letters form
/// the left block, an element `xe` of `x` at level `k`, an element `ye` of
/// `y` at level `k'`, and a sphere element `z` on the letters missed by
/// `α`.  Nodes are glued along letter insertions into either block (which
/// consume a sphere digit through the structure maps) and along adjacent
/// transpositions within a block; the classes of the resulting quotient,
/// degree by degree, are the simplices of the smash.
pub struct CommaLevel {
    n: usize,
    dim_cap: usize,
    objs: Vec<(usize, Vec<usize>)>,
    obj_idx: BTreeMap<(usize, Vec<usize>), usize>,
    offs: Vec<Vec<u64>>,
    fsz: Vec<Vec<[u64; 3]>>,
    class_of: Vec<Vec<Elem>>,
    reps: Vec<Vec<u32>>,
    sizes: Vec<Elem>,
}

struct ObjRels {
    comp: Vec<usize>,
    ins_left: Vec<usize>,
    ins_right: Vec<usize>,
    swap_left: Vec<usize>,
    swap_right: Vec<usize>,
}

impl CommaLevel {
    fn new(x: &SymSpectrum, y: &SymSpectrum, n: usize) -> CommaLevel {
        debug_assert!(n <= x.level_cap && n <= y.level_cap);
        let dim_cap = x.dim_cap.min(y.dim_cap);
        let mut objs = Vec::new();
        for j in 0..=n {
            for arr in arrangements(n, j) {
                for k in 0..=j {
                    objs.push((k, arr.clone()));
                }
            }
        }
        let obj_idx: BTreeMap<(usize, Vec<usize>), usize> = objs
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, o)| (o, i))
            .collect();
        let rels: Vec<ObjRels> = objs
            .iter()
            .map(|(k, alpha)| {
                let k = *k;
                let comp = complement(alpha, n);
                let ins_left = comp
                    .iter()
                    .map(|&v| {
                        let mut a2 = Vec::with_capacity(alpha.len() + 1);
                        a2.extend_from_slice(&alpha[..k]);
                        a2.push(v);
                        a2.extend_from_slice(&alpha[k..]);
                        obj_idx[&(k + 1, a2)]
                    })
                    .collect();
                let ins_right = comp
                    .iter()
                    .map(|&v| {
                        let mut a2 = alpha.clone();
                        a2.push(v);
                        obj_idx[&(k, a2)]
                    })
                    .collect();
                let swap_left = (0..k.saturating_sub(1))
                    .map(|i| {
                        let mut a2 = alpha.clone();
                        a2.swap(i, i + 1);
                        obj_idx[&(k, a2)]
                    })
                    .collect();
                let swap_right = (0..(alpha.len() - k).saturating_sub(1))
                    .map(|i| {
                        let mut a2 = alpha.clone();
                        a2.swap(k + i, k + i + 1);
                        obj_idx[&(k, a2)]
                    })
                    .collect();
                ObjRels {
                    comp,
                    ins_left,
                    ins_right,
                    swap_left,
                    swap_right,
                }
            })
            .collect();
        // Adjacent transpositions as group elements of G × Σ_m, per factor.
        let tau = |sp: &SymSpectrum, m: usize, i: usize| {
            sp.levels[m]
                .group
                .pair_index(sp.group.identity(), sp.syms[m].rank(&transposition(m, i)))
        };
        let x_tau: Vec<Vec<usize>> = (0..=n)
            .map(|m| (0..m.saturating_sub(1)).map(|i| tau(x, m, i)).collect())
            .collect();
        let y_tau: Vec<Vec<usize>> = (0..=n)
            .map(|m| (0..m.saturating_sub(1)).map(|i| tau(y, m, i)).collect())
            .collect();

        let mut offs_all = Vec::with_capacity(dim_cap + 1);
        let mut fsz_all = Vec::with_capacity(dim_cap + 1);
        let mut class_all = Vec::with_capacity(dim_cap + 1);
        let mut reps_all = Vec::with_capacity(dim_cap + 1);
        let mut sizes_all = Vec::with_capacity(dim_cap + 1);
        for q in 0..=dim_cap {
            let fq: Vec<[u64; 3]> = objs
                .iter()
                .map(|(k, alpha)| {
                    let kp = alpha.len() - k;
                    [
                        x.size(*k, q) as u64,
                        y.size(kp, q) as u64,
                        sphere_size(q, n - alpha.len()) as u64,
                    ]
                })
                .collect();
            let mut offs = Vec::with_capacity(objs.len() + 1);
            offs.push(0u64);
            for f in &fq {
                offs.push(offs.last().unwrap() + f[0] * f[1] * f[2]);
            }
            let total = *offs.last().unwrap();
            assert!(total < u32::MAX as u64, "comma level exceeds the index type");
            let nid = |o: usize, xe: Elem, ye: Elem, z: Elem| -> u32 {
                (offs[o] + ((xe as u64 - 1) * fq[o][1] + (ye as u64 - 1)) * fq[o][2]
                    + (z as u64 - 1)
                    + 1) as u32
            };
            let mut uf = UnionFind::new(total as usize + 1);
            let mut digits = vec![0 as Elem; n];
            let mut buf: Vec<Elem> = Vec::with_capacity(n);
            for (o, (k, alpha)) in objs.iter().enumerate() {
                let k = *k;
                let kp = alpha.len() - k;
                let [xs, ys, zs] = fq[o];
                if xs * ys * zs == 0 {
                    continue;
                }
                let r = &rels[o];
                let c = r.comp.len();
                let mut zdrop = vec![0 as Elem; c];
                for z in 1..=zs as Elem {
                    sphere_decode(q as Elem, c, z, &mut digits);
                    for pv in 0..c {
                        buf.clear();
                        buf.extend_from_slice(&digits[..pv]);
                        buf.extend_from_slice(&digits[pv + 1..c]);
                        zdrop[pv] = sphere_encode(q as Elem, &buf);
                    }
                    for xe in 1..=xs as Elem {
                        for ye in 1..=ys as Elem {
                            let me = nid(o, xe, ye, z);
                            for pv in 0..c {
                                let d = digits[pv];
                                let x2 = x.sigma_apply(k, q, xe, d);
                                let t = if x2 == 0 {
                                    0
                                } else {
                                    nid(r.ins_left[pv], x2, ye, zdrop[pv])
                                };
                                uf.union(me, t);
                                let y2 = y.sigma_apply(kp, q, ye, d);
                                let t = if y2 == 0 {
                                    0
                                } else {
                                    nid(r.ins_right[pv], xe, y2, zdrop[pv])
                                };
                                uf.union(me, t);
                            }
                            for (i, &o2) in r.swap_left.iter().enumerate() {
                                let x2 = x.levels[k].act(x_tau[k][i], q, xe);
                                uf.union(me, nid(o2, x2, ye, z));
                            }
                            for (i, &o2) in r.swap_right.iter().enumerate() {
                                let y2 = y.levels[kp].act(y_tau[kp][i], q, ye);
                                uf.union(me, nid(o2, xe, y2, z));
                            }
                        }
                    }
                }
            }
            let quo = uf.quotient(0);
            offs_all.push(offs);
            fsz_all.push(fq);
            class_all.push(quo.class_of);
            reps_all.push(quo.rep);
            sizes_all.push(quo.size);
        }
        CommaLevel {
            n,
            dim_cap,
            objs,
            obj_idx,
            offs: offs_all,
            fsz: fsz_all,
            class_of: class_all,
            reps: reps_all,
            sizes: sizes_all,
        }
    }

    /// The class of the node `(k, α, xe, ye, z)`; base if any factor is.
    pub fn class_of_node(
        &self,
        q: usize,
        k: usize,
        alpha: &[usize],
        xe: Elem,
        ye: Elem,
        z: Elem,
    ) -> Elem {
        if xe == 0 || ye == 0 || z == 0 {
            return 0;
        }
        let o = self.obj_idx[&(k, alpha.to_vec())];
        let f = &self.fsz[q][o];
        let id =
            self.offs[q][o] + ((xe as u64 - 1) * f[1] + (ye as u64 - 1)) * f[2] + (z as u64 - 1)
                + 1;
        self.class_of[q][id as usize]
    }

    /// The canonical representative node of a nonbase class.
    pub fn rep_node(&self, q: usize, class: Elem) -> (usize, &[usize], Elem, Elem, Elem) {
        let id = self.reps[q][class as usize] as u64 - 1;
        let o = self.offs[q].partition_point(|&v| v <= id) - 1;
        let f = &self.fsz[q][o];
        let mut rem = id - self.offs[q][o];
        let z = (rem % f[2]) as Elem + 1;
        rem /= f[2];
        let ye = (rem % f[1]) as Elem + 1;
        let xe = (rem / f[1]) as Elem + 1;
        let (k, alpha) = &self.objs[o];
        (*k, alpha, xe, ye, z)
    }

    pub fn size(&self, q: usize) -> Elem {
        self.sizes[q]
    }

    pub fn level(&self) -> usize {
        self.n
    }
}

/// Realizes the classes of a comma level as a simplicial set over
/// `G × Σ_n`, with faces, degeneracies and the action computed on
/// representatives through `class_of_node`.
fn comma_space(x: &SymSpectrum, y: &SymSpectrum, cl: &CommaLevel) -> SimplicialGSet {
    let n = cl.n;
    let pg = Arc::clone(&x.levels[n].group);
    let dim = cl.dim_cap;
    let x_g: Vec<Vec<usize>> = x
        .group
        .elements()
        .map(|g| {
            (0..=n)
                .map(|m| x.levels[m].group.pair_index(g, x.syms[m].group.identity()))
                .collect()
        })
        .collect();
    let y_g: Vec<Vec<usize>> = y
        .group
        .elements()
        .map(|g| {
            (0..=n)
                .map(|m| y.levels[m].group.pair_index(g, y.syms[m].group.identity()))
                .collect()
        })
        .collect();

    let sphere_part = |q: usize, alpha: &[usize], z: Elem, out: &mut Vec<Elem>| {
        let c = n - alpha.len();
        out.clear();
        out.resize(c, 0);
        sphere_decode(q as Elem, c, z, out);
    };

    let mut levels = Vec::with_capacity(dim + 1);
    let mut faces = Vec::with_capacity(dim + 1);
    let mut degens = Vec::with_capacity(dim + 1);
    for q in 0..=dim {
        let size = cl.sizes[q];
        let mut tables = Vec::with_capacity(pg.order());
        for gid in pg.elements() {
            let (g, pidx) = pg.project(gid).expect("level group is a product");
            let pi = x.syms[n].perm(pidx);
            let mut row = vec![0 as Elem; size as usize + 1];
            let mut zd: Vec<Elem> = Vec::new();
            for cls in 1..=size {
                let (k, alpha, xe, ye, z) = cl.rep_node(q, cls);
                let kp = alpha.len() - k;
                let x2 = x.levels[k].act(x_g[g][k], q, xe);
                let y2 = y.levels[kp].act(y_g[g][kp], q, ye);
                let beta: Vec<usize> = alpha.iter().map(|&a| pi[a] as usize).collect();
                sphere_part(q, alpha, z, &mut zd);
                let comp = complement(alpha, n);
                let mut moved: Vec<(usize, Elem)> = comp
                    .iter()
                    .enumerate()
                    .map(|(j, &w)| (pi[w] as usize, zd[j]))
                    .collect();
                moved.sort_unstable();
                let perm_digits: Vec<Elem> = moved.iter().map(|&(_, d)| d).collect();
                let z2 = sphere_encode(q as Elem, &perm_digits);
                row[cls as usize] = cl.class_of_node(q, k, &beta, x2, y2, z2);
            }
            tables.push(row);
        }
        levels.push(PointedGSet {
            group: Arc::clone(&pg),
            size,
            action: GAction::Table(tables),
        });

        faces.push(if q == 0 {
            Vec::new()
        } else {
            (0..=q)
                .map(|i| {
                    let mut t = vec![0 as Elem; cl.sizes[q] as usize + 1];
                    let mut zd: Vec<Elem> = Vec::new();
                    for cls in 1..=cl.sizes[q] {
                        let (k, alpha, xe, ye, z) = cl.rep_node(q, cls);
                        let kp = alpha.len() - k;
                        let xf = x.levels[k].face(q, i, xe);
                        let yf = y.levels[kp].face(q, i, ye);
                        if xf == 0 || yf == 0 {
                            continue;
                        }
                        sphere_part(q, alpha, z, &mut zd);
                        let mut dead = false;
                        let fd: Vec<Elem> = zd
                            .iter()
                            .map(|&d| {
                                let r = circle_face(q as Elem, i as Elem, d);
                                if r == 0 {
                                    dead = true;
                                }
                                r
                            })
                            .collect();
                        if dead {
                            continue;
                        }
                        let z2 = sphere_encode(q as Elem - 1, &fd);
                        t[cls as usize] = cl.class_of_node(q - 1, k, alpha, xf, yf, z2);
                    }
                    t
                })
                .collect()
        });

        degens.push(if q == dim {
            Vec::new()
        } else {
            (0..=q)
                .map(|i| {
                    let mut t = vec![0 as Elem; cl.sizes[q] as usize + 1];
                    let mut zd: Vec<Elem> = Vec::new();
                    for cls in 1..=cl.sizes[q] {
                        let (k, alpha, xe, ye, z) = cl.rep_node(q, cls);
                        let kp = alpha.len() - k;
                        let xd = x.levels[k].degen(q, i, xe);
                        let yd = y.levels[kp].degen(q, i, ye);
                        sphere_part(q, alpha, z, &mut zd);
                        let dd: Vec<Elem> =
                            zd.iter().map(|&d| circle_degen(i as Elem, d)).collect();
                        let z2 = sphere_encode(q as Elem + 1, &dd);
                        t[cls as usize] = cl.class_of_node(q + 1, k, alpha, xd, yd, z2);
                    }
                    t
                })
                .collect()
        });
    }
    SimplicialGSet::new(pg, dim, levels, faces, degens)
}

/// The smash product of two spectra over the same group, together with the
/// comma presentations of its levels (used to map in and out of it).
///
/// Caps are the minima of the factors' caps.
pub fn smash_spectra(
    x: &SymSpectrum,
    y: &SymSpectrum,
) -> Result<(SymSpectrum, Vec<CommaLevel>), GammaError> {
    if *x.group != *y.group {
        return Err(GammaError::Invalid {
            reason: "smash factors live over different groups".into(),
        });
    }
    let level_cap = x.level_cap.min(y.level_cap);
    let dim_cap = x.dim_cap.min(y.dim_cap);
    let cls: Vec<CommaLevel> = (0..=level_cap).map(|n| CommaLevel::new(x, y, n)).collect();
    let levels: Vec<SimplicialGSet> = cls.iter().map(|cl| comma_space(x, y, cl)).collect();
    let sigma: Vec<SSetMap> = (0..level_cap)
        .map(|n| SSetMap {
            maps: (0..=dim_cap)
                .map(|q| {
                    let size = cls[n].sizes[q];
                    let mut table = vec![0 as Elem; size as usize * q + 1];
                    let mut digits = vec![0 as Elem; n + 1];
                    for c in 1..=size {
                        let (k, alpha, xe, ye, z) = cls[n].rep_node(q, c);
                        let cc = n - alpha.len();
                        sphere_decode(q as Elem, cc, z, &mut digits);
                        for a in 1..=q as Elem {
                            // The fresh letter n is the largest, so its digit
                            // sits at the end of the complement block.
                            digits[cc] = a;
                            let z2 = sphere_encode(q as Elem, &digits[..=cc]);
                            table[(c - 1) as usize * q + a as usize] =
                                cls[n + 1].class_of_node(q, k, alpha, xe, ye, z2);
                        }
                    }
                    table
                })
                .collect(),
        })
        .collect();
    let spectrum = SymSpectrum {
        group: Arc::clone(&x.group),
        level_cap,
        dim_cap,
        syms: sym_tower(level_cap),
        levels,
        sigma,
    };
    Ok((spectrum, cls))
}

/// The canonical map `𝕊 ∧ x → x` and its source.
///
/// The value of a node `(k, α, se, ye, z)` is obtained by scattering the
/// digits of the sphere parts over their letters and feeding `ye` through
/// the iterated structure maps along the injection `α` restricted to the
/// right block; constancy on classes is checked node by node.
pub fn smash_unit_comparison(
    x: &SymSpectrum,
) -> Result<(SymSpectrum, SpectrumMap), GammaError> {
    let s = sphere_spectrum(&x.group, x.level_cap, x.dim_cap);
    let (sm, cls) = smash_spectra(&s, x)?;
    let mut maps = Vec::with_capacity(sm.level_cap + 1);
    for (n, cl) in cls.iter().enumerate() {
        let mut qmaps = Vec::with_capacity(sm.dim_cap + 1);
        for q in 0..=sm.dim_cap {
            let mut ct = ClassTable::new(cl.sizes[q]);
            for (o, (k, alpha)) in cl.objs.iter().enumerate() {
                let k = *k;
                let f = cl.fsz[q][o];
                if f[0] * f[1] * f[2] == 0 {
                    continue;
                }
                let comp = complement(alpha, n);
                let alpha_r: Vec<usize> = alpha[k..].to_vec();
                let others = complement(&alpha_r, n);
                let mut sed = vec![0 as Elem; k];
                let mut zd = vec![0 as Elem; comp.len()];
                let mut digit_at = vec![0 as Elem; n];
                for se in 1..=f[0] as Elem {
                    sphere_decode(q as Elem, k, se, &mut sed);
                    for (i, &w) in alpha[..k].iter().enumerate() {
                        digit_at[w] = sed[i];
                    }
                    for z in 1..=f[2] as Elem {
                        sphere_decode(q as Elem, comp.len(), z, &mut zd);
                        for (j, &w) in comp.iter().enumerate() {
                            digit_at[w] = zd[j];
                        }
                        let digits: Vec<Elem> = others.iter().map(|&w| digit_at[w]).collect();
                        for ye in 1..=f[1] as Elem {
                            let val = x.inj_apply(&alpha_r, n, q, ye, &digits);
                            let id = cl.offs[q][o]
                                + ((se as u64 - 1) * f[1] + (ye as u64 - 1)) * f[2]
                                + (z as u64 - 1)
                                + 1;
                            if !ct.put(cl.class_of[q][id as usize], val) {
                                return Err(class_clash("the smash unit", n, q));
                            }
                        }
                    }
                }
            }
            qmaps.push(ct.vals);
        }
        maps.push(SSetMap { maps: qmaps });
    }
    Ok((sm, SpectrumMap { maps }))
}

// ---------------------------------------------------------------------------
// The subset-poset engine.
// ---------------------------------------------------------------------------

/// The value of the partial-suspension step `C(V) → C(U)` for nested
/// subsets `V ⊆ U` of `{0..full-1}`, where `C(W) = X_{|W|} ∧ S^(full∖W)`.
/// A node `(xe, z)` goes to `(x', z')` with `x'` the image of `xe` under
/// the injection-induced map fed the digits of `z` that land in `U∖V`, and
/// `z'` the sphere element on the remaining letters; the pair is encoded
/// as `(x' - 1)·|S^(full∖U)(q)| + z'`.
fn c_map(
    x: &SymSpectrum,
    full: usize,
    q: usize,
    v: &[usize],
    u: &[usize],
    xe: Elem,
    z: Elem,
) -> Elem {
    if xe == 0 || z == 0 {
        return 0;
    }
    let comp_v = complement(v, full);
    let mut zd = vec![0 as Elem; comp_v.len()];
    sphere_decode(q as Elem, comp_v.len(), z, &mut zd);
    let mut digit_at = vec![0 as Elem; full];
    for (j, &w) in comp_v.iter().enumerate() {
        digit_at[w] = zd[j];
    }
    let pos: Vec<usize> = v
        .iter()
        .map(|w| u.binary_search(w).expect("nested subsets"))
        .collect();
    let digits: Vec<Elem> = u
        .iter()
        .filter(|w| !v.contains(w))
        .map(|&w| digit_at[w])
        .collect();
    let xp = x.inj_apply(&pos, u.len(), q, xe, &digits);
    if xp == 0 {
        return 0;
    }
    let outer: Vec<Elem> = (0..full)
        .filter(|i| !u.contains(i))
        .map(|w| digit_at[w])
        .collect();
    let zp = sphere_encode(q as Elem, &outer);
    (xp - 1) * sphere_size(q, full - u.len()) + zp
}

/// The colimit of `C(V) = X_{|V|} ∧ S^(full∖V)` over the proper subsets
/// `V` of a chosen ambient subset, glued along the covering steps of the
/// poset.  With the ambient set equal to all of `{0..full-1}` this is the
/// latching object.
struct PosetLatch {
    letters: Vec<Vec<usize>>,
    dim_cap: usize,
    offs: Vec<Vec<u64>>,
    fsz: Vec<Vec<[u64; 2]>>,
    class_of: Vec<Vec<Elem>>,
    reps: Vec<Vec<u32>>,
    sizes: Vec<Elem>,
}

impl PosetLatch {
    fn new(x: &SymSpectrum, full: usize, ambient: &[usize]) -> PosetLatch {
        let a = ambient.len();
        let nmasks = 1usize << a;
        let fullmask = nmasks - 1;
        let letters: Vec<Vec<usize>> = (0..nmasks)
            .map(|m| {
                (0..a)
                    .filter(|i| m >> i & 1 == 1)
                    .map(|i| ambient[i])
                    .collect()
            })
            .collect();
        let mut offs_all = Vec::with_capacity(x.dim_cap + 1);
        let mut fsz_all = Vec::with_capacity(x.dim_cap + 1);
        let mut class_all = Vec::with_capacity(x.dim_cap + 1);
        let mut reps_all = Vec::with_capacity(x.dim_cap + 1);
        let mut sizes_all = Vec::with_capacity(x.dim_cap + 1);
        for q in 0..=x.dim_cap {
            let fq: Vec<[u64; 2]> = (0..nmasks)
                .map(|m| {
                    if m == fullmask {
                        [0, 0]
                    } else {
                        let u = m.count_ones() as usize;
                        [x.size(u, q) as u64, sphere_size(q, full - u) as u64]
                    }
                })
                .collect();
            let mut offs = Vec::with_capacity(nmasks + 1);
            offs.push(0u64);
            for f in &fq {
                offs.push(offs.last().unwrap() + f[0] * f[1]);
            }
            let total = *offs.last().unwrap();
            assert!(total < u32::MAX as u64, "latching level exceeds the index type");
            let nid = |m: usize, xe: Elem, z: Elem| -> u32 {
                (offs[m] + (xe as u64 - 1) * fq[m][1] + (z as u64 - 1) + 1) as u32
            };
            let mut uf = UnionFind::new(total as usize + 1);
            for m in 0..nmasks {
                if fq[m][0] * fq[m][1] == 0 {
                    continue;
                }
                for j in 0..a {
                    if m >> j & 1 == 1 {
                        continue;
                    }
                    let m2 = m | 1 << j;
                    if m2 == fullmask {
                        continue;
                    }
                    let zs2 = fq[m2][1];
                    for xe in 1..=fq[m][0] as Elem {
                        for z in 1..=fq[m][1] as Elem {
                            let enc = c_map(x, full, q, &letters[m], &letters[m2], xe, z);
                            let t = if enc == 0 {
                                0
                            } else {
                                nid(
                                    m2,
                                    ((enc as u64 - 1) / zs2) as Elem + 1,
                                    ((enc as u64 - 1) % zs2) as Elem + 1,
                                )
                            };
                            uf.union(nid(m, xe, z), t);
                        }
                    }
                }
            }
            let quo = uf.quotient(0);
            offs_all.push(offs);
            fsz_all.push(fq);
            class_all.push(quo.class_of);
            reps_all.push(quo.rep);
            sizes_all.push(quo.size);
        }
        PosetLatch {
            letters,
            dim_cap: x.dim_cap,
            offs: offs_all,
            fsz: fsz_all,
            class_of: class_all,
            reps: reps_all,
            sizes: sizes_all,
        }
    }

    fn class_of_node(&self, q: usize, mask: usize, xe: Elem, z: Elem) -> Elem {
        if xe == 0 || z == 0 {
            return 0;
        }
        let id = self.offs[q][mask] + (xe as u64 - 1) * self.fsz[q][mask][1] + (z as u64 - 1) + 1;
        self.class_of[q][id as usize]
    }

    fn rep_node(&self, q: usize, class: Elem) -> (usize, Elem, Elem) {
        let id = self.reps[q][class as usize] as u64 - 1;
        let m = self.offs[q].partition_point(|&v| v <= id) - 1;
        let rem = id - self.offs[q][m];
        let z = (rem % self.fsz[q][m][1]) as Elem + 1;
        let xe = (rem / self.fsz[q][m][1]) as Elem + 1;
        (m, xe, z)
    }
}

/// Realizes a full-ambient poset latch as a simplicial set over `G × Σ_n`
/// and computes the latching map into `X_n`, checking on every node that
/// the map is constant on classes.
fn poset_space_nu(
    x: &SymSpectrum,
    pl: &PosetLatch,
    n: usize,
) -> Result<(SimplicialGSet, SSetMap), GammaError> {
    let pg = Arc::clone(&x.levels[n].group);
    let nmasks = pl.letters.len();
    let fullmask = nmasks - 1;
    let full_letters: Vec<usize> = (0..n).collect();

    let mut maps = Vec::with_capacity(pl.dim_cap + 1);
    for q in 0..=pl.dim_cap {
        let mut ct = ClassTable::new(pl.sizes[q]);
        for m in 0..nmasks {
            if m == fullmask {
                continue;
            }
            let f = pl.fsz[q][m];
            if f[0] * f[1] == 0 {
                continue;
            }
            for xe in 1..=f[0] as Elem {
                for z in 1..=f[1] as Elem {
                    let val = c_map(x, n, q, &pl.letters[m], &full_letters, xe, z);
                    let id = pl.offs[q][m] + (xe as u64 - 1) * f[1] + (z as u64 - 1) + 1;
                    if !ct.put(pl.class_of[q][id as usize], val) {
                        return Err(class_clash("the latching map", n, q));
                    }
                }
            }
        }
        maps.push(ct.vals);
    }

    let mut levels = Vec::with_capacity(pl.dim_cap + 1);
    let mut faces = Vec::with_capacity(pl.dim_cap + 1);
    let mut degens = Vec::with_capacity(pl.dim_cap + 1);
    for q in 0..=pl.dim_cap {
        let size = pl.sizes[q];
        let decode_z = |mask: usize, z: Elem, out: &mut Vec<Elem>| {
            let c = n - pl.letters[mask].len();
            out.clear();
            out.resize(c, 0);
            sphere_decode(q as Elem, c, z, out);
        };
        let mut tables = Vec::with_capacity(pg.order());
        for gid in pg.elements() {
            let (g, pidx) = pg.project(gid).expect("level group is a product");
            let pi = x.syms[n].perm(pidx);
            let mut row = vec![0 as Elem; size as usize + 1];
            let mut zd: Vec<Elem> = Vec::new();
            for cls in 1..=size {
                let (m, xe, z) = pl.rep_node(q, cls);
                let vset = &pl.letters[m];
                let u = vset.len();
                let mask2 = vset.iter().fold(0usize, |acc, &w| acc | 1 << pi[w] as usize);
                let mut slot: Vec<u8> = vec![0; u];
                for (i, &w) in vset.iter().enumerate() {
                    slot[i] = vset.iter().filter(|&&w2| pi[w2] < pi[w]).count() as u8;
                }
                let gx = x.levels[u]
                    .group
                    .pair_index(g, x.syms[u].rank(&slot));
                let x2 = x.levels[u].act(gx, q, xe);
                decode_z(m, z, &mut zd);
                let comp = complement(vset, n);
                let mut moved: Vec<(usize, Elem)> = comp
                    .iter()
                    .enumerate()
                    .map(|(j, &w)| (pi[w] as usize, zd[j]))
                    .collect();
                moved.sort_unstable();
                let digits: Vec<Elem> = moved.iter().map(|&(_, d)| d).collect();
                let z2 = sphere_encode(q as Elem, &digits);
                row[cls as usize] = pl.class_of_node(q, mask2, x2, z2);
            }
            tables.push(row);
        }
        levels.push(PointedGSet {
            group: Arc::clone(&pg),
            size,
            action: GAction::Table(tables),
        });

        faces.push(if q == 0 {
            Vec::new()
        } else {
            (0..=q)
                .map(|i| {
                    let mut t = vec![0 as Elem; size as usize + 1];
                    let mut zd: Vec<Elem> = Vec::new();
                    for cls in 1..=size {
                        let (m, xe, z) = pl.rep_node(q, cls);
                        let u = pl.letters[m].len();
                        let xf = x.levels[u].face(q, i, xe);
                        if xf == 0 {
                            continue;
                        }
                        decode_z(m, z, &mut zd);
                        let mut dead = false;
                        let fd: Vec<Elem> = zd
                            .iter()
                            .map(|&d| {
                                let r = circle_face(q as Elem, i as Elem, d);
                                if r == 0 {
                                    dead = true;
                                }
                                r
                            })
                            .collect();
                        if dead {
                            continue;
                        }
                        t[cls as usize] =
                            pl.class_of_node(q - 1, m, xf, sphere_encode(q as Elem - 1, &fd));
                    }
                    t
                })
                .collect()
        });
        degens.push(if q == pl.dim_cap {
            Vec::new()
        } else {
            (0..=q)
                .map(|i| {
                    let mut t = vec![0 as Elem; size as usize + 1];
                    let mut zd: Vec<Elem> = Vec::new();
                    for cls in 1..=size {
                        let (m, xe, z) = pl.rep_node(q, cls);
                        let u = pl.letters[m].len();
                        let xd = x.levels[u].degen(q, i, xe);
                        decode_z(m, z, &mut zd);
                        let dd: Vec<Elem> =
                            zd.iter().map(|&d| circle_degen(i as Elem, d)).collect();
                        t[cls as usize] =
                            pl.class_of_node(q + 1, m, xd, sphere_encode(q as Elem + 1, &dd));
                    }
                    t
                })
                .collect()
        });
    }
    Ok((
        SimplicialGSet::new(pg, pl.dim_cap, levels, faces, degens),
        SSetMap { maps },
    ))
}

// ---------------------------------------------------------------------------
// Latching objects and their comparison.
// ---------------------------------------------------------------------------

/// Which engine computes a latching object.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatchMethod {
    /// Colimit over the proper-subset poset of the level.
    Poset,
    /// Smash with the reduced sphere spectrum, via the comma presentation.
    Comma,
}

/// A latching object: the obstruction space at one level together with its
/// canonical map into that level.
pub struct Latching {
    pub n: usize,
    pub space: SimplicialGSet,
    pub nu: SSetMap,
}

fn cap_guard(x: &SymSpectrum, n: usize, what: &str) -> Result<(), GammaError> {
    if n > x.level_cap {
        return Err(GammaError::CapTooSmall {
            what: format!("{what} at level {n}"),
            needed: n,
            cap: x.level_cap,
        });
    }
    Ok(())
}

fn comma_latch_space_nu(
    x: &SymSpectrum,
    bar: &SymSpectrum,
    cl: &CommaLevel,
) -> Result<(SimplicialGSet, SSetMap), GammaError> {
    let n = cl.n;
    let space = comma_space(x, bar, cl);
    let mut maps = Vec::with_capacity(cl.dim_cap + 1);
    for q in 0..=cl.dim_cap {
        let mut ct = ClassTable::new(cl.sizes[q]);
        for (o, (k, alpha)) in cl.objs.iter().enumerate() {
            let k = *k;
            let f = cl.fsz[q][o];
            if f[0] * f[1] * f[2] == 0 {
                continue;
            }
            let kp = alpha.len() - k;
            let comp = complement(alpha, n);
            let alpha_l: Vec<usize> = alpha[..k].to_vec();
            let others = complement(&alpha_l, n);
            let mut yd = vec![0 as Elem; kp];
            let mut zd = vec![0 as Elem; comp.len()];
            let mut digit_at = vec![0 as Elem; n];
            for ye in 1..=f[1] as Elem {
                sphere_decode(q as Elem, kp, ye, &mut yd);
                for (j, &w) in alpha[k..].iter().enumerate() {
                    digit_at[w] = yd[j];
                }
                for z in 1..=f[2] as Elem {
                    sphere_decode(q as Elem, comp.len(), z, &mut zd);
                    for (j, &w) in comp.iter().enumerate() {
                        digit_at[w] = zd[j];
                    }
                    let digits: Vec<Elem> = others.iter().map(|&w| digit_at[w]).collect();
                    for xe in 1..=f[0] as Elem {
                        let val = x.inj_apply(&alpha_l, n, q, xe, &digits);
                        let id = cl.offs[q][o]
                            + ((xe as u64 - 1) * f[1] + (ye as u64 - 1)) * f[2]
                            + (z as u64 - 1)
                            + 1;
                        if !ct.put(cl.class_of[q][id as usize], val) {
                            return Err(class_clash("the latching map", n, q));
                        }
                    }
                }
            }
        }
        maps.push(ct.vals);
    }
    Ok((space, SSetMap { maps }))
}

/// The latching object of `x` at level `n`, by the requested engine.
/// Both engines give the empty space at `n = 0`.
pub fn latching(x: &SymSpectrum, n: usize, method: LatchMethod) -> Result<Latching, GammaError> {
    cap_guard(x, n, "the latching object")?;
    let (space, nu) = match method {
        LatchMethod::Poset => {
            let ambient: Vec<usize> = (0..n).collect();
            let pl = PosetLatch::new(x, n, &ambient);
            poset_space_nu(x, &pl, n)?
        }
        LatchMethod::Comma => {
            let bar = reduced_sphere_spectrum(&x.group, n, x.dim_cap);
            let cl = CommaLevel::new(x, &bar, n);
            comma_latch_space_nu(x, &bar, &cl)?
        }
    };
    Ok(Latching { n, space, nu })
}

/// Builds both latching presentations of `x` at level `n` and returns the
/// canonical isomorphism from the poset presentation to the comma one,
/// after verifying elementwise that it is a well-defined equivariant
/// simplicial bijection compatible with the two latching maps.
///
/// A poset node `(V, xe, z)` matches the comma node whose injective word
/// lists `V` ascending as the left block and the complement ascending as
/// the right block, with the same `xe`, the sphere element `z` reread on
/// the right block, and the trivial element on the leftover sphere (there
/// are no leftover letters).
pub fn latching_comparison(x: &SymSpectrum, n: usize) -> Result<SSetMap, GammaError> {
    cap_guard(x, n, "the latching comparison")?;
    let ambient: Vec<usize> = (0..n).collect();
    let pl = PosetLatch::new(x, n, &ambient);
    let (pspace, pnu) = poset_space_nu(x, &pl, n)?;
    let bar = reduced_sphere_spectrum(&x.group, n, x.dim_cap);
    let cl = CommaLevel::new(x, &bar, n);
    let (cspace, cnu) = comma_latch_space_nu(x, &bar, &cl)?;

    let nmasks = pl.letters.len();
    let fullmask = nmasks.saturating_sub(1);
    let mut maps = Vec::with_capacity(pl.dim_cap + 1);
    for q in 0..=pl.dim_cap {
        let mut ct = ClassTable::new(pl.sizes[q]);
        for m in 0..nmasks {
            if m == fullmask && n > 0 {
                continue;
            }
            let f = pl.fsz[q][m];
            if f[0] * f[1] == 0 {
                continue;
            }
            let vset = &pl.letters[m];
            let comp = complement(vset, n);
            let mut word: Vec<usize> = vset.clone();
            word.extend_from_slice(&comp);
            for xe in 1..=f[0] as Elem {
                for z in 1..=f[1] as Elem {
                    let id = pl.offs[q][m] + (xe as u64 - 1) * f[1] + (z as u64 - 1) + 1;
                    let target = cl.class_of_node(q, vset.len(), &word, xe, z, 1);
                    if !ct.put(pl.class_of[q][id as usize], target) {
                        return Err(class_clash("the latching comparison", n, q));
                    }
                }
            }
        }
        maps.push(ct.vals);
    }
    let cmp = SSetMap { maps };
    cmp.validate(&pspace, &cspace, true).map_err(|e| GammaError::Invalid {
        reason: format!("the latching comparison at level {n} is not simplicial: {e}"),
    })?;
    if !cmp.is_bijective_onto(&cspace) {
        return Err(GammaError::Invalid {
            reason: format!("the latching engines disagree at level {n}"),
        });
    }
    for q in 0..=pl.dim_cap {
        for c in 1..=pl.sizes[q] {
            if pnu.maps[q][c as usize] != cnu.maps[q][cmp.apply(q, c) as usize] {
                return Err(GammaError::Invalid {
                    reason: format!(
                        "the latching maps disagree at level {n}, degree {q}, class {c}"
                    ),
                });
            }
        }
    }
    Ok(cmp)
}

/// The relative latching object of a map: the pushout of
/// `X_n ← L_n X → L_n Y` with its canonical map to `Y_n`.
pub struct MapLatching {
    pub n: usize,
    pub space: SimplicialGSet,
    pub nu: SSetMap,
}

pub fn latching_of_map(
    f: &SpectrumMap,
    x: &SymSpectrum,
    y: &SymSpectrum,
    n: usize,
    method: LatchMethod,
) -> Result<MapLatching, GammaError> {
    if x.level_cap != y.level_cap || x.dim_cap != y.dim_cap {
        return Err(GammaError::Invalid {
            reason: "relative latching needs equal caps on both spectra".into(),
        });
    }
    if *x.group != *y.group {
        return Err(GammaError::Invalid {
            reason: "relative latching needs both spectra over one group".into(),
        });
    }
    cap_guard(x, n, "the relative latching object")?;

    // Latching data on both sides, plus the transfer L_n X → L_n Y read off
    // node by node.
    let (nu_x, yspace, nu_y, lf) = match method {
        LatchMethod::Poset => {
            let ambient: Vec<usize> = (0..n).collect();
            let px = PosetLatch::new(x, n, &ambient);
            let (_, nu_x) = poset_space_nu(x, &px, n)?;
            let py = PosetLatch::new(y, n, &ambient);
            let (yspace, nu_y) = poset_space_nu(y, &py, n)?;
            let mut lf = Vec::with_capacity(x.dim_cap + 1);
            for q in 0..=x.dim_cap {
                let mut ct = ClassTable::new(px.sizes[q]);
                for m in 0..px.letters.len() {
                    let f0 = px.fsz[q][m];
                    if f0[0] * f0[1] == 0 {
                        continue;
                    }
                    let u = px.letters[m].len();
                    for xe in 1..=f0[0] as Elem {
                        let fe = f.maps[u].apply(q, xe);
                        for z in 1..=f0[1] as Elem {
                            let id =
                                px.offs[q][m] + (xe as u64 - 1) * f0[1] + (z as u64 - 1) + 1;
                            let tc = py.class_of_node(q, m, fe, z);
                            if !ct.put(px.class_of[q][id as usize], tc) {
                                return Err(class_clash("the latching transfer", n, q));
                            }
                        }
                    }
                }
                lf.push(ct.vals);
            }
            (nu_x, yspace, nu_y, lf)
        }
        LatchMethod::Comma => {
            let bar = reduced_sphere_spectrum(&x.group, n, x.dim_cap);
            let cx = CommaLevel::new(x, &bar, n);
            let (_, nu_x) = comma_latch_space_nu(x, &bar, &cx)?;
            let cy = CommaLevel::new(y, &bar, n);
            let (yspace, nu_y) = comma_latch_space_nu(y, &bar, &cy)?;
            let mut lf = Vec::with_capacity(x.dim_cap + 1);
            for q in 0..=x.dim_cap {
                let mut ct = ClassTable::new(cx.sizes[q]);
                for (o, (k, alpha)) in cx.objs.iter().enumerate() {
                    let f0 = cx.fsz[q][o];
                    if f0[0] * f0[1] * f0[2] == 0 {
                        continue;
                    }
                    for xe in 1..=f0[0] as Elem {
                        let fe = f.maps[*k].apply(q, xe);
                        for ye in 1..=f0[1] as Elem {
                            for z in 1..=f0[2] as Elem {
                                let id = cx.offs[q][o]
                                    + ((xe as u64 - 1) * f0[1] + (ye as u64 - 1)) * f0[2]
                                    + (z as u64 - 1)
                                    + 1;
                                let tc = cy.class_of_node(q, *k, alpha, fe, ye, z);
                                if !ct.put(cx.class_of[q][id as usize], tc) {
                                    return Err(class_clash("the latching transfer", n, q));
                                }
                            }
                        }
                    }
                }
                lf.push(ct.vals);
            }
            (nu_x, yspace, nu_y, lf)
        }
    };

    // Pushout X_n ∪_{L_n X} L_n Y, degree by degree.  Node ids: elements of
    // X_n first, then the classes of L_n Y.
    let pg = Arc::clone(&x.levels[n].group);
    let dim = x.dim_cap;
    let xs: Vec<u64> = (0..=dim).map(|q| x.size(n, q) as u64).collect();
    let lsz: Vec<u64> = (0..=dim).map(|q| yspace.size(q) as u64).collect();
    let mut class_of = Vec::with_capacity(dim + 1);
    let mut reps = Vec::with_capacity(dim + 1);
    let mut sizes = Vec::with_capacity(dim + 1);
    for q in 0..=dim {
        let total = xs[q] + lsz[q];
        assert!(total < u32::MAX as u64);
        let mut uf = UnionFind::new(total as usize + 1);
        for c in 1..=nu_x.maps[q].len() - 1 {
            let na = nu_x.maps[q][c];
            let b = lf[q][c];
            let nb = if b == 0 { 0 } else { (xs[q] + b as u64) as u32 };
            uf.union(na, nb);
        }
        let quo = uf.quotient(0);
        class_of.push(quo.class_of);
        reps.push(quo.rep);
        sizes.push(quo.size);
    }
    let node_class = |q: usize, node: u64| -> Elem {
        if node == 0 {
            0
        } else {
            class_of[q][node as usize]
        }
    };
    let x_node = |v: Elem| v as u64;
    let l_node = |q: usize, c: Elem| if c == 0 { 0 } else { xs[q] + c as u64 };

    let mut levels = Vec::with_capacity(dim + 1);
    let mut faces = Vec::with_capacity(dim + 1);
    let mut degens = Vec::with_capacity(dim + 1);
    let mut nu_maps = Vec::with_capacity(dim + 1);
    for q in 0..=dim {
        let size = sizes[q];
        // Representative-driven structure maps.
        let rep_split = |cls: Elem| -> (bool, Elem) {
            let id = reps[q][cls as usize] as u64;
            if id <= xs[q] {
                (true, id as Elem)
            } else {
                (false, (id - xs[q]) as Elem)
            }
        };
        let mut tables = Vec::with_capacity(pg.order());
        for gid in pg.elements() {
            let mut row = vec![0 as Elem; size as usize + 1];
            for cls in 1..=size {
                let (is_x, e) = rep_split(cls);
                row[cls as usize] = if is_x {
                    node_class(q, x_node(x.levels[n].act(gid, q, e)))
                } else {
                    node_class(q, l_node(q, yspace.act(gid, q, e)))
                };
            }
            tables.push(row);
        }
        levels.push(PointedGSet {
            group: Arc::clone(&pg),
            size,
            action: GAction::Table(tables),
        });
        faces.push(if q == 0 {
            Vec::new()
        } else {
            (0..=q)
                .map(|i| {
                    (0..=size)
                        .map(|cls| {
                            if cls == 0 {
                                return 0;
                            }
                            let (is_x, e) = rep_split(cls);
                            if is_x {
                                node_class(q - 1, x_node(x.levels[n].face(q, i, e)))
                            } else {
                                node_class(q - 1, l_node(q - 1, yspace.face(q, i, e)))
                            }
                        })
                        .collect()
                })
                .collect()
        });
        degens.push(if q == dim {
            Vec::new()
        } else {
            (0..=q)
                .map(|i| {
                    (0..=size)
                        .map(|cls| {
                            if cls == 0 {
                                return 0;
                            }
                            let (is_x, e) = rep_split(cls);
                            if is_x {
                                node_class(q + 1, x_node(x.levels[n].degen(q, i, e)))
                            } else {
                                node_class(q + 1, l_node(q + 1, yspace.degen(q, i, e)))
                            }
                        })
                        .collect()
                })
                .collect()
        });
        // The map to Y_n, checked on every node of the pushout.
        let mut ct = ClassTable::new(size);
        for v in 1..=xs[q] {
            if !ct.put(class_of[q][v as usize], f.maps[n].apply(q, v as Elem)) {
                return Err(class_clash("the relative latching map", n, q));
            }
        }
        for c in 1..=lsz[q] {
            let node = (xs[q] + c) as usize;
            if !ct.put(class_of[q][node], nu_y.maps[q][c as usize]) {
                return Err(class_clash("the relative latching map", n, q));
            }
        }
        nu_maps.push(ct.vals);
    }
    Ok(MapLatching {
        n,
        space: SimplicialGSet::new(pg, dim, levels, faces, degens),
        nu: SSetMap { maps: nu_maps },
    })
}

// ---------------------------------------------------------------------------
// Flatness certificates.
// ---------------------------------------------------------------------------

/// The outcome of one flatness route over a truncated window.
///
/// `ok` with an empty `failures` list certifies every decomposition the
/// caps allow; otherwise `failures` holds one human-readable witness per
/// refuted decomposition, in a deterministic order.
#[derive(Clone, Debug)]
pub struct FlatCertificate {
    pub route: &'static str,
    pub up_to: usize,
    pub dim_cap: usize,
    pub ok: bool,
    pub failures: Vec<String>,
}

fn certificate(route: &'static str, up_to: usize, dim_cap: usize, failures: Vec<String>) -> FlatCertificate {
    FlatCertificate {
        route,
        up_to,
        dim_cap,
        ok: failures.is_empty(),
        failures,
    }
}

fn flat_cap_guard(x: &SymSpectrum, up_to: usize) -> Result<(), GammaError> {
    if up_to > x.level_cap {
        return Err(GammaError::CapTooSmall {
            what: format!(
                "flatness condition (a) at decomposition (k, l) = (0, {})",
                x.level_cap + 1
            ),
            needed: up_to,
            cap: x.level_cap,
        });
    }
    Ok(())
}

fn object_cond_a(x: &SymSpectrum, k: usize, l: usize) -> Option<String> {
    for q in 1..=x.dim_cap {
        let xs = x.size(k, q) as u64;
        let zs = sphere_size(q, l) as u64;
        if xs * zs == 0 {
            continue;
        }
        let vals: Vec<Elem> = maybe_par_range((xs * zs) as usize, |t| {
            let xe = (t as u64 / zs) as Elem + 1;
            let zi = (t as u64 % zs) as Elem + 1;
            let mut digits = vec![0 as Elem; l];
            sphere_decode(q as Elem, l, zi, &mut digits);
            x.sigma_iter(k, q, xe, &digits)
        });
        let mut seen: HashMap<Elem, usize> = HashMap::with_capacity(vals.len());
        for (t, &v) in vals.iter().enumerate() {
            let xe = t as u64 / zs + 1;
            let zi = t as u64 % zs + 1;
            if v == 0 {
                return Some(format!(
                    "(a) (k, l) = ({k}, {l}) degree {q}: ({xe}, {zi}) maps to the basepoint of level {}",
                    k + l
                ));
            }
            if let Some(&t0) = seen.get(&v) {
                let xe0 = t0 as u64 / zs + 1;
                let zi0 = t0 as u64 % zs + 1;
                return Some(format!(
                    "(a) (k, l) = ({k}, {l}) degree {q}: ({xe0}, {zi0}) and ({xe}, {zi}) both map to {v} in level {}",
                    k + l
                ));
            }
            seen.insert(v, t);
        }
    }
    None
}

fn object_cond_b(x: &SymSpectrum, k: usize, l: usize, m: usize) -> Option<String> {
    let t_lv = k + l + m;
    let alpha_lm: Vec<usize> = (k..t_lv).collect();
    let alpha_l: Vec<usize> = (k..k + l).collect();
    for q in 1..=x.dim_cap {
        let szk = sphere_size(q, k) as u64;
        let szm = sphere_size(q, m) as u64;
        let xl = x.size(l, q) as u64;
        let xlm = x.size(l + m, q) as u64;
        let xkl = x.size(k + l, q) as u64;
        let tr_vals: Vec<Elem> = maybe_par_range((xlm * szk) as usize, |t| {
            let xe = (t as u64 / szk) as Elem + 1;
            let zi = (t as u64 % szk) as Elem + 1;
            let mut dk = vec![0 as Elem; k];
            sphere_decode(q as Elem, k, zi, &mut dk);
            x.inj_apply(&alpha_lm, t_lv, q, xe, &dk)
        });
        let bl_vals: Vec<Elem> = maybe_par_range((xkl * szm) as usize, |t| {
            let xe = (t as u64 / szm) as Elem + 1;
            let zi = (t as u64 % szm) as Elem + 1;
            let mut dm = vec![0 as Elem; m];
            sphere_decode(q as Elem, m, zi, &mut dm);
            x.sigma_iter(k + l, q, xe, &dm)
        });
        let mut cnt_tr: HashMap<Elem, u64> = HashMap::new();
        let mut tr0 = 0u64;
        for &v in &tr_vals {
            if v == 0 {
                tr0 += 1;
            } else {
                *cnt_tr.entry(v).or_insert(0) += 1;
            }
        }
        let mut cnt_bl: HashMap<Elem, u64> = HashMap::new();
        let mut bl0 = 0u64;
        for &v in &bl_vals {
            if v == 0 {
                bl0 += 1;
            } else {
                *cnt_bl.entry(v).or_insert(0) += 1;
            }
        }
        let mut p_nonbase: u128 = (tr0 as u128 + 1) * (bl0 as u128 + 1) - 1;
        for (v, c) in &cnt_tr {
            if let Some(c2) = cnt_bl.get(v) {
                p_nonbase += *c as u128 * *c2 as u128;
            }
        }
        let mut pairs: HashSet<u128> = HashSet::new();
        let mut dk = vec![0 as Elem; k];
        let mut dm = vec![0 as Elem; m];
        for kz in 1..=szk as Elem {
            sphere_decode(q as Elem, k, kz, &mut dk);
            for mz in 1..=szm as Elem {
                sphere_decode(q as Elem, m, mz, &mut dm);
                for xe in 1..=xl as Elem {
                    let te = x.sigma_iter(l, q, xe, &dm);
                    let t_id = if te == 0 {
                        0
                    } else {
                        (te as u64 - 1) * szk + kz as u64
                    };
                    let ble = x.inj_apply(&alpha_l, k + l, q, xe, &dk);
                    let bl_id = if ble == 0 {
                        0
                    } else {
                        (ble as u64 - 1) * szm + mz as u64
                    };
                    let vt = if t_id == 0 { 0 } else { tr_vals[t_id as usize - 1] };
                    let vb = if bl_id == 0 { 0 } else { bl_vals[bl_id as usize - 1] };
                    if vt != vb {
                        return Some(format!(
                            "(b) (k, l, m) = ({k}, {l}, {m}) degree {q}: the suspension square does not commute at ({xe}, {kz}, {mz})"
                        ));
                    }
                    if t_id == 0 && bl_id == 0 {
                        return Some(format!(
                            "(b) (k, l, m) = ({k}, {l}, {m}) degree {q}: ({xe}, {kz}, {mz}) maps to the base corner pair"
                        ));
                    }
                    if !pairs.insert((t_id as u128) << 64 | bl_id as u128) {
                        return Some(format!(
                            "(b) (k, l, m) = ({k}, {l}, {m}) degree {q}: two elements share the corner pair of ({xe}, {kz}, {mz})"
                        ));
                    }
                }
            }
        }
        if pairs.len() as u128 != p_nonbase {
            return Some(format!(
                "(b) (k, l, m) = ({k}, {l}, {m}) degree {q}: the canonical map reaches {} of {} pullback classes",
                pairs.len(),
                p_nonbase
            ));
        }
    }
    None
}

/// Certifies flatness of a single spectrum within the caps by the direct
/// suspension conditions: (a) every composite
/// `X_k ∧ S^l → X_(k+l)` is injective away from the basepoint, and (b) for
/// every decomposition `k ⊔ l ⊔ m` with `k, m ≥ 1` the square of partial
/// suspensions is a pullback.  Decompositions with `k = 0` or `m = 0` give
/// squares that are pullbacks for any spectrum, so they are skipped.
pub fn flat_check(x: &SymSpectrum, up_to: usize) -> Result<FlatCertificate, GammaError> {
    flat_cap_guard(x, up_to)?;
    let mut failures = Vec::new();
    for total in 1..=up_to {
        for k in 0..total {
            if let Some(w) = object_cond_a(x, k, total - k) {
                failures.push(w);
            }
        }
    }
    for total in 2..=up_to {
        for k in 1..total {
            for m in 1..=total - k {
                if let Some(w) = object_cond_b(x, k, total - k - m, m) {
                    failures.push(w);
                }
            }
        }
    }
    Ok(certificate("conditions", up_to, x.dim_cap, failures))
}

/// One pushout corner `X_T ∪_(X_j ∧ S^s) (Y_j ∧ S^s)` together with its
/// map to `Y_T`, with values folded onto classes and checked for
/// constancy (which is exactly naturality of the underlying squares).
struct Corner {
    xs: u64,
    zs: u64,
    class_of: Vec<Elem>,
    size: Elem,
    vals: Vec<Elem>,
}

fn build_corner(
    f: &SpectrumMap,
    x: &SymSpectrum,
    y: &SymSpectrum,
    q: usize,
    t_lv: usize,
    y_lv: usize,
    sph: usize,
    x_img: &(dyn Fn(Elem, &[Elem]) -> Elem + Sync),
    y_val: &(dyn Fn(Elem, &[Elem]) -> Elem + Sync),
) -> Result<Corner, GammaError> {
    let xs = x.size(t_lv, q) as u64;
    let ys = y.size(y_lv, q) as u64;
    let zs = sphere_size(q, sph) as u64;
    let total = xs + ys * zs;
    assert!(total < u32::MAX as u64, "pushout corner exceeds the index type");
    let mut uf = UnionFind::new(total as usize + 1);
    let xsrc = x.size(y_lv, q) as u64;
    let mut digits = vec![0 as Elem; sph];
    for zi in 1..=zs {
        sphere_decode(q as Elem, sph, zi as Elem, &mut digits);
        for xe in 1..=xsrc {
            let xv = x_img(xe as Elem, &digits);
            let fe = f.maps[y_lv].apply(q, xe as Elem);
            let nb = if fe == 0 {
                0
            } else {
                (xs + (fe as u64 - 1) * zs + zi) as u32
            };
            uf.union(xv, nb);
        }
    }
    let quo = uf.quotient(0);
    let vals_nodes: Vec<Elem> = maybe_par_range(total as usize, |t0| {
        let t = t0 as u64 + 1;
        if t <= xs {
            f.maps[t_lv].apply(q, t as Elem)
        } else {
            let r = t - xs - 1;
            let ye = (r / zs) as Elem + 1;
            let zi = (r % zs) as Elem + 1;
            let mut d = vec![0 as Elem; sph];
            sphere_decode(q as Elem, sph, zi, &mut d);
            y_val(ye, &d)
        }
    });
    let mut ct = ClassTable::new(quo.size);
    for (t0, &v) in vals_nodes.iter().enumerate() {
        if !ct.put(quo.class_of[t0 + 1], v) {
            return Err(GammaError::Invalid {
                reason: format!(
                    "a pushout corner value is not constant on classes at level {t_lv}, degree {q}"
                ),
            });
        }
    }
    Ok(Corner {
        xs,
        zs,
        class_of: quo.class_of,
        size: quo.size,
        vals: ct.vals,
    })
}

fn map_cond_a(
    f: &SpectrumMap,
    x: &SymSpectrum,
    y: &SymSpectrum,
    k: usize,
    l: usize,
) -> Result<Option<String>, GammaError> {
    for q in 1..=x.dim_cap {
        let corner = build_corner(
            f,
            x,
            y,
            q,
            k + l,
            k,
            l,
            &|xe, d| x.sigma_iter(k, q, xe, d),
            &|ye, d| y.sigma_iter(k, q, ye, d),
        )?;
        let mut seen: HashMap<Elem, Elem> = HashMap::with_capacity(corner.size as usize);
        for c in 1..=corner.size {
            let v = corner.vals[c as usize];
            if v == 0 {
                return Ok(Some(format!(
                    "(a) (k, l) = ({k}, {l}) degree {q}: pushout class {c} maps to the basepoint of level {}",
                    k + l
                )));
            }
            if let Some(&c0) = seen.get(&v) {
                return Ok(Some(format!(
                    "(a) (k, l) = ({k}, {l}) degree {q}: pushout classes {c0} and {c} both map to {v} in level {}",
                    k + l
                )));
            }
            seen.insert(v, c);
        }
    }
    Ok(None)
}

fn map_cond_b(
    f: &SpectrumMap,
    x: &SymSpectrum,
    y: &SymSpectrum,
    k: usize,
    l: usize,
    m: usize,
) -> Result<Option<String>, GammaError> {
    let t_lv = k + l + m;
    let alpha_lm: Vec<usize> = (k..t_lv).collect();
    let alpha_l: Vec<usize> = (k..k + l).collect();
    for q in 1..=x.dim_cap {
        let szk = sphere_size(q, k) as u64;
        let szm = sphere_size(q, m) as u64;
        let tl = build_corner(
            f,
            x,
            y,
            q,
            t_lv,
            l,
            k + m,
            &|xe, d| x.inj_apply(&alpha_l, t_lv, q, xe, d),
            &|ye, d| y.inj_apply(&alpha_l, t_lv, q, ye, d),
        )?;
        let tr = build_corner(
            f,
            x,
            y,
            q,
            t_lv,
            l + m,
            k,
            &|xe, d| x.inj_apply(&alpha_lm, t_lv, q, xe, d),
            &|ye, d| y.inj_apply(&alpha_lm, t_lv, q, ye, d),
        )?;
        let bl = build_corner(
            f,
            x,
            y,
            q,
            t_lv,
            k + l,
            m,
            &|xe, d| x.sigma_iter(k + l, q, xe, d),
            &|ye, d| y.sigma_iter(k + l, q, ye, d),
        )?;
        let total = (tl.xs + (y.size(l, q) as u64) * tl.zs) as usize;
        let t_of: Vec<Elem> = maybe_par_range(total, |t0| {
            let t = t0 as u64 + 1;
            if t <= tl.xs {
                tr.class_of[t as usize]
            } else {
                let r = t - tl.xs - 1;
                let ye = (r / tl.zs) as Elem + 1;
                let zi = (r % tl.zs) as Elem + 1;
                let mut d = vec![0 as Elem; k + m];
                sphere_decode(q as Elem, k + m, zi, &mut d);
                let ye2 = y.sigma_iter(l, q, ye, &d[k..]);
                if ye2 == 0 {
                    0
                } else {
                    let kz = sphere_encode(q as Elem, &d[..k]) as u64;
                    tr.class_of[(tr.xs + (ye2 as u64 - 1) * szk + kz) as usize]
                }
            }
        });
        let b_of: Vec<Elem> = maybe_par_range(total, |t0| {
            let t = t0 as u64 + 1;
            if t <= tl.xs {
                bl.class_of[t as usize]
            } else {
                let r = t - tl.xs - 1;
                let ye = (r / tl.zs) as Elem + 1;
                let zi = (r % tl.zs) as Elem + 1;
                let mut d = vec![0 as Elem; k + m];
                sphere_decode(q as Elem, k + m, zi, &mut d);
                let ye2 = y.inj_apply(&alpha_l, k + l, q, ye, &d[..k]);
                if ye2 == 0 {
                    0
                } else {
                    let mz = sphere_encode(q as Elem, &d[k..]) as u64;
                    bl.class_of[(bl.xs + (ye2 as u64 - 1) * szm + mz) as usize]
                }
            }
        });
        let mut ct_t = ClassTable::new(tl.size);
        let mut ct_b = ClassTable::new(tl.size);
        for t0 in 0..total {
            if !ct_t.put(tl.class_of[t0 + 1], t_of[t0]) || !ct_b.put(tl.class_of[t0 + 1], b_of[t0])
            {
                return Err(class_clash("a corner comparison", t_lv, q));
            }
        }
        let count = |corner: &Corner| {
            let mut cnt: HashMap<Elem, u64> = HashMap::new();
            let mut zero = 0u64;
            for c in 1..=corner.size {
                let v = corner.vals[c as usize];
                if v == 0 {
                    zero += 1;
                } else {
                    *cnt.entry(v).or_insert(0) += 1;
                }
            }
            (cnt, zero)
        };
        let (cnt_tr, tr0) = count(&tr);
        let (cnt_bl, bl0) = count(&bl);
        let mut p_nonbase: u128 = (tr0 as u128 + 1) * (bl0 as u128 + 1) - 1;
        for (v, c) in &cnt_tr {
            if let Some(c2) = cnt_bl.get(v) {
                p_nonbase += *c as u128 * *c2 as u128;
            }
        }
        let mut pairs: HashSet<u64> = HashSet::with_capacity(tl.size as usize);
        for c in 1..=tl.size {
            let tc = ct_t.vals[c as usize];
            let bc = ct_b.vals[c as usize];
            let vt = if tc == 0 { 0 } else { tr.vals[tc as usize] };
            let vb = if bc == 0 { 0 } else { bl.vals[bc as usize] };
            if vt != vb {
                return Ok(Some(format!(
                    "(b) (k, l, m) = ({k}, {l}, {m}) degree {q}: the suspension square does not commute at pushout class {c}"
                )));
            }
            if tc == 0 && bc == 0 {
                return Ok(Some(format!(
                    "(b) (k, l, m) = ({k}, {l}, {m}) degree {q}: pushout class {c} maps to the base corner pair"
                )));
            }
            if !pairs.insert((tc as u64) << 32 | bc as u64) {
                return Ok(Some(format!(
                    "(b) (k, l, m) = ({k}, {l}, {m}) degree {q}: two pushout classes share the corner pair of class {c}"
                )));
            }
        }
        if pairs.len() as u128 != p_nonbase {
            return Ok(Some(format!(
                "(b) (k, l, m) = ({k}, {l}, {m}) degree {q}: the canonical map reaches {} of {} pullback classes",
                pairs.len(),
                p_nonbase
            )));
        }
    }
    Ok(None)
}

/// Certifies that a map of spectra is a flat cofibration within the caps:
/// the map must be levelwise injective, every pushout-corner map of
/// condition (a) must be injective, and every condition (b) square of
/// corners must be a pullback.  The injectivity precondition is not
/// redundant — conditions (a) and (b) alone are blind to the failure of
/// injectivity at level 0 (collapsing a wedge summand satisfies both).
pub fn flat_check_map(
    f: &SpectrumMap,
    x: &SymSpectrum,
    y: &SymSpectrum,
    up_to: usize,
) -> Result<FlatCertificate, GammaError> {
    if x.level_cap != y.level_cap || x.dim_cap != y.dim_cap {
        return Err(GammaError::Invalid {
            reason: "flatness of a map needs equal caps on both spectra".into(),
        });
    }
    if *x.group != *y.group {
        return Err(GammaError::Invalid {
            reason: "flatness of a map needs both spectra over one group".into(),
        });
    }
    flat_cap_guard(x, up_to)?;
    let mut failures = Vec::new();
    for n in 0..=up_to {
        if let Some((q, a, b)) = f.maps[n].injectivity_witness() {
            failures.push(format!(
                "level {n} is not injective at degree {q}: {a} and {b} share an image"
            ));
        }
    }
    for total in 1..=up_to {
        for k in 0..total {
            if let Some(w) = map_cond_a(f, x, y, k, total - k)? {
                failures.push(w);
            }
        }
    }
    for total in 2..=up_to {
        for k in 1..total {
            for m in 1..=total - k {
                if let Some(w) = map_cond_b(f, x, y, k, total - k - m, m)? {
                    failures.push(w);
                }
            }
        }
    }
    Ok(certificate("conditions-map", up_to, x.dim_cap, failures))
}

/// Certifies that a levelwise-injective map into a flat spectrum is a flat
/// cofibration by the image criterion: for every decomposition `k ⊔ l`,
/// anything of level `k + l` that lies both in the subspectrum and in the
/// suspension image of the ambient level `k` already lies in the
/// suspension image of the included level `k` part.
///
/// Errors if the ambient spectrum is not itself flat within the caps or if
/// the map is not levelwise injective; assumes `incl` is a valid map of
/// spectra.
pub fn flat_check_inclusion(
    incl: &SpectrumMap,
    x: &SymSpectrum,
    y: &SymSpectrum,
    up_to: usize,
) -> Result<FlatCertificate, GammaError> {
    if x.level_cap != y.level_cap || x.dim_cap != y.dim_cap {
        return Err(GammaError::Invalid {
            reason: "the subspectrum criterion needs equal caps on both spectra".into(),
        });
    }
    let target = flat_check(y, up_to)?;
    if !target.ok {
        return Err(GammaError::Invalid {
            reason: "the ambient spectrum is not flat within the caps, so the subspectrum criterion does not apply".into(),
        });
    }
    if !incl.is_levelwise_injective() {
        return Err(GammaError::Invalid {
            reason: "the subspectrum criterion needs a levelwise injective map".into(),
        });
    }
    let mut failures = Vec::new();
    for total in 1..=up_to {
        for k in 0..total {
            let l = total - k;
            'decomp: for q in 1..=x.dim_cap {
                let ysz = y.size(k + l, q) as usize;
                let zs = sphere_size(q, l) as u64;
                let mut in_sub = vec![false; ysz + 1];
                for e in 1..=x.size(k + l, q) {
                    in_sub[incl.maps[k + l].apply(q, e) as usize] = true;
                }
                let xsk = x.size(k, q) as u64;
                let low: Vec<Elem> = maybe_par_range((xsk * zs) as usize, |t| {
                    let xe = (t as u64 / zs) as Elem + 1;
                    let zi = (t as u64 % zs) as Elem + 1;
                    let mut d = vec![0 as Elem; l];
                    sphere_decode(q as Elem, l, zi, &mut d);
                    y.sigma_iter(k, q, incl.maps[k].apply(q, xe), &d)
                });
                let mut in_low = vec![false; ysz + 1];
                for &v in &low {
                    in_low[v as usize] = true;
                }
                let ysk = y.size(k, q) as u64;
                let ambient: Vec<Elem> = maybe_par_range((ysk * zs) as usize, |t| {
                    let ye = (t as u64 / zs) as Elem + 1;
                    let zi = (t as u64 % zs) as Elem + 1;
                    let mut d = vec![0 as Elem; l];
                    sphere_decode(q as Elem, l, zi, &mut d);
                    y.sigma_iter(k, q, ye, &d)
                });
                for &v in &ambient {
                    if v != 0 && in_sub[v as usize] && !in_low[v as usize] {
                        failures.push(format!(
                            "(k, l) = ({k}, {l}) degree {q}: simplex {v} of level {} lies in the subspectrum and in the suspension image, but not in the suspension of the included part",
                            k + l
                        ));
                        break 'decomp;
                    }
                }
            }
        }
    }
    Ok(certificate("subspectrum", up_to, x.dim_cap, failures))
}

fn nu_injectivity_witness(label: &str, nu: &SSetMap) -> Option<String> {
    for (q, t) in nu.maps.iter().enumerate() {
        let mut seen: HashMap<Elem, usize> = HashMap::with_capacity(t.len());
        for (e, &v) in t.iter().enumerate().skip(1) {
            if v == 0 {
                return Some(format!("{label} degree {q}: class {e} maps to the basepoint"));
            }
            if let Some(&e0) = seen.get(&v) {
                return Some(format!(
                    "{label} degree {q}: classes {e0} and {e} both map to {v}"
                ));
            }
            seen.insert(v, e);
        }
    }
    None
}

/// Certifies flatness by injectivity of the latching maps `ν_n` for
/// `n = 1..=up_to`, with the latching objects computed by the requested
/// engine.
pub fn flat_via_latching(
    x: &SymSpectrum,
    up_to: usize,
    method: LatchMethod,
) -> Result<FlatCertificate, GammaError> {
    if up_to > x.level_cap {
        return Err(GammaError::CapTooSmall {
            what: format!("the latching object at level {}", x.level_cap + 1),
            needed: up_to,
            cap: x.level_cap,
        });
    }
    let mut failures = Vec::new();
    for n in 1..=up_to {
        let l = latching(x, n, method)?;
        if let Some(w) = nu_injectivity_witness(&format!("nu_{n}"), &l.nu) {
            failures.push(w);
        }
    }
    let route = match method {
        LatchMethod::Poset => "latching-poset",
        LatchMethod::Comma => "latching-comma",
    };
    Ok(certificate(route, up_to, x.dim_cap, failures))
}

/// Certifies that a map is a flat cofibration by injectivity of the
/// relative latching maps for `n = 0..=up_to` (at `n = 0` this is
/// injectivity of the map itself).
pub fn flat_via_latching_map(
    f: &SpectrumMap,
    x: &SymSpectrum,
    y: &SymSpectrum,
    up_to: usize,
    method: LatchMethod,
) -> Result<FlatCertificate, GammaError> {
    if up_to > x.level_cap {
        return Err(GammaError::CapTooSmall {
            what: format!("the relative latching object at level {}", x.level_cap + 1),
            needed: up_to,
            cap: x.level_cap,
        });
    }
    let mut failures = Vec::new();
    for n in 0..=up_to {
        let l = latching_of_map(f, x, y, n, method)?;
        if let Some(w) = nu_injectivity_witness(&format!("nu_{n}"), &l.nu) {
            failures.push(w);
        }
    }
    let route = match method {
        LatchMethod::Poset => "latching-map-poset",
        LatchMethod::Comma => "latching-map-comma",
    };
    Ok(certificate(route, up_to, x.dim_cap, failures))
}

// ---------------------------------------------------------------------------
// The subset-cube criteria.
// ---------------------------------------------------------------------------

/// For every subset `U` of the letters of level `n`, checks that the map
/// from the colimit of the partial suspensions over proper subsets of `U`
/// into `C(U)` is injective away from the basepoint.
pub fn cube_colimit_check(x: &SymSpectrum, n: usize) -> Result<bool, GammaError> {
    cap_guard(x, n, "the subset-cube colimit")?;
    for umask in 1..(1usize << n) {
        let ambient: Vec<usize> = (0..n).filter(|&i| umask >> i & 1 == 1).collect();
        let pl = PosetLatch::new(x, n, &ambient);
        let fullmask = pl.letters.len() - 1;
        for q in 0..=x.dim_cap {
            let mut ct = ClassTable::new(pl.sizes[q]);
            for m in 0..pl.letters.len() {
                if m == fullmask {
                    continue;
                }
                let f = pl.fsz[q][m];
                if f[0] * f[1] == 0 {
                    continue;
                }
                for xe in 1..=f[0] as Elem {
                    for z in 1..=f[1] as Elem {
                        let val = c_map(x, n, q, &pl.letters[m], &ambient, xe, z);
                        let id = pl.offs[q][m] + (xe as u64 - 1) * f[1] + (z as u64 - 1) + 1;
                        if !ct.put(pl.class_of[q][id as usize], val) {
                            return Err(class_clash("the subset-cube comparison", n, q));
                        }
                    }
                }
            }
            let mut seen = HashSet::with_capacity(pl.sizes[q] as usize);
            for c in 1..=pl.sizes[q] {
                let v = ct.vals[c as usize];
                if v == 0 || !seen.insert(v) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The two-condition form of the subset-cube criterion: (a) every step
/// `C(V) → C(U)` for `V ⊆ U` is injective away from the basepoint, and
/// (b) for incomparable `U, V` the images of `C(U)` and `C(V)` in
/// `C(U ∪ V)` intersect exactly in the image of `C(U ∩ V)`.  Nested pairs
/// in (b) hold automatically and are skipped.
pub fn cube_conditions_check(x: &SymSpectrum, n: usize) -> Result<bool, GammaError> {
    cap_guard(x, n, "the subset-cube conditions")?;
    let letters = |mask: usize| -> Vec<usize> {
        (0..n).filter(|&i| mask >> i & 1 == 1).collect()
    };
    let images = |umask: usize, wmask: usize, q: usize| -> HashSet<Elem> {
        let u = letters(umask);
        let w = letters(wmask);
        let xs = x.size(u.len(), q) as u64;
        let zs = sphere_size(q, n - u.len()) as u64;
        let mut out = HashSet::new();
        for xe in 1..=xs as Elem {
            for z in 1..=zs as Elem {
                let v = c_map(x, n, q, &u, &w, xe, z);
                if v != 0 {
                    out.insert(v);
                }
            }
        }
        out
    };
    for umask in 0..(1usize << n) {
        let u = letters(umask);
        let mut vmask = umask;
        loop {
            if vmask != umask {
                let v = letters(vmask);
                for q in 0..=x.dim_cap {
                    let xs = x.size(v.len(), q) as u64;
                    let zs = sphere_size(q, n - v.len()) as u64;
                    let mut seen = HashSet::with_capacity((xs * zs) as usize);
                    for xe in 1..=xs as Elem {
                        for z in 1..=zs as Elem {
                            let val = c_map(x, n, q, &v, &u, xe, z);
                            if val == 0 || !seen.insert(val) {
                                return Ok(false);
                            }
                        }
                    }
                }
            }
            if vmask == 0 {
                break;
            }
            vmask = (vmask - 1) & umask;
        }
    }
    for umask in 0..(1usize << n) {
        for vmask in 0..umask {
            if umask & vmask == umask || umask & vmask == vmask {
                continue;
            }
            let wmask = umask | vmask;
            let imask = umask & vmask;
            for q in 0..=x.dim_cap {
                let im_u = images(umask, wmask, q);
                let im_v = images(vmask, wmask, q);
                let im_i = images(imask, wmask, q);
                let inter: HashSet<Elem> = im_u.intersection(&im_v).copied().collect();
                if inter != im_i {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Abstract functors on the subset cube.
// ---------------------------------------------------------------------------

/// A functor from the subset lattice of `{0..n-1}` to pointed finite sets,
/// stored as one pointed table per covering step `mask → mask | bit`.
pub struct CubeFunctor {
    pub n: usize,
    /// Nonbase sizes, indexed by subset mask.
    pub sizes: Vec<u32>,
    steps: Vec<Vec<Vec<Elem>>>,
}

impl CubeFunctor {
    /// Applies the functor to the inclusion `from ⊆ to` by composing
    /// covering steps in ascending bit order.  Functoriality (checked by
    /// `validate`) makes the order immaterial.
    pub fn map(&self, from: usize, to: usize, e: Elem) -> Elem {
        debug_assert_eq!(from & to, from);
        let mut cur = e;
        let mut mask = from;
        for j in 0..self.n {
            if to >> j & 1 == 1 && mask >> j & 1 == 0 {
                let ji = (0..j).filter(|&i| mask >> i & 1 == 0).count();
                cur = self.steps[mask][ji][cur as usize];
                mask |= 1 << j;
            }
        }
        cur
    }

    pub fn validate(&self) -> Result<(), GammaError> {
        let nmasks = 1usize << self.n;
        if self.sizes.len() != nmasks || self.steps.len() != nmasks {
            return Err(GammaError::Invalid {
                reason: "cube functor tables have the wrong shape".into(),
            });
        }
        for mask in 0..nmasks {
            let unset: Vec<usize> = (0..self.n).filter(|&j| mask >> j & 1 == 0).collect();
            if self.steps[mask].len() != unset.len() {
                return Err(GammaError::Invalid {
                    reason: format!("cube functor steps at mask {mask} have the wrong count"),
                });
            }
            for (ji, &j) in unset.iter().enumerate() {
                let t = &self.steps[mask][ji];
                let m2 = mask | 1 << j;
                if t.len() != self.sizes[mask] as usize + 1 || t[0] != 0 {
                    return Err(GammaError::Invalid {
                        reason: format!("cube functor step {mask}→{m2} is not a pointed table"),
                    });
                }
                if t.iter().any(|&v| v > self.sizes[m2]) {
                    return Err(GammaError::Invalid {
                        reason: format!("cube functor step {mask}→{m2} is out of range"),
                    });
                }
            }
            // Path independence over every square above this mask.
            for a in 0..unset.len() {
                for b in a + 1..unset.len() {
                    let (i, j) = (unset[a], unset[b]);
                    let mi = mask | 1 << i;
                    let mj = mask | 1 << j;
                    let ji_in_mi = (0..j).filter(|&w| mi >> w & 1 == 0).count();
                    let ii_in_mj = (0..i).filter(|&w| mj >> w & 1 == 0).count();
                    for e in 0..=self.sizes[mask] {
                        let via_i = self.steps[mi][ji_in_mi]
                            [self.steps[mask][a][e as usize] as usize];
                        let via_j = self.steps[mj][ii_in_mj]
                            [self.steps[mask][b][e as usize] as usize];
                        if via_i != via_j {
                            return Err(GammaError::Invalid {
                                reason: format!(
                                    "cube functor is not functorial over mask {mask} at {e}"
                                ),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether, for every subset `U`, the map from the colimit over proper
    /// subsets of `U` into the value at `U` is injective away from the
    /// basepoint.
    pub fn colimit_route(&self) -> bool {
        for u in 1..(1usize << self.n) {
            let subs: Vec<usize> = (0..u).filter(|&v| v & u == v).collect();
            let mut offs = Vec::with_capacity(subs.len() + 1);
            offs.push(0u32);
            for &v in &subs {
                offs.push(offs.last().unwrap() + self.sizes[v]);
            }
            let pos: HashMap<usize, usize> =
                subs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            let total = *offs.last().unwrap();
            let mut uf = UnionFind::new(total as usize + 1);
            for (i, &v) in subs.iter().enumerate() {
                for j in 0..self.n {
                    if v >> j & 1 == 1 || u >> j & 1 == 0 {
                        continue;
                    }
                    let v2 = v | 1 << j;
                    if v2 == u {
                        continue;
                    }
                    let i2 = pos[&v2];
                    for e in 1..=self.sizes[v] {
                        let e2 = self.map(v, v2, e);
                        let nb = if e2 == 0 { 0 } else { offs[i2] + e2 };
                        uf.union(offs[i] + e, nb);
                    }
                }
            }
            let quo = uf.quotient(0);
            let mut vals = vec![None; quo.size as usize + 1];
            for (i, &v) in subs.iter().enumerate() {
                for e in 1..=self.sizes[v] {
                    let c = quo.class_of[(offs[i] + e) as usize] as usize;
                    if c != 0 && vals[c].is_none() {
                        vals[c] = Some(self.map(v, u, e));
                    }
                }
            }
            let mut seen = HashSet::with_capacity(quo.size as usize);
            for c in 1..=quo.size as usize {
                let v = vals[c].expect("every class has a representative node");
                if v == 0 || !seen.insert(v) {
                    return false;
                }
            }
        }
        true
    }

    /// Whether (a) every value map of an inclusion is injective away from
    /// the basepoint and (b) the images of incomparable `U, V` inside the
    /// value at `U ∪ V` intersect exactly in the image of `U ∩ V`.
    pub fn conditions_route(&self) -> bool {
        let nmasks = 1usize << self.n;
        for u in 0..nmasks {
            let mut v = u;
            loop {
                if v != u {
                    let mut seen = HashSet::with_capacity(self.sizes[v] as usize);
                    for e in 1..=self.sizes[v] {
                        let val = self.map(v, u, e);
                        if val == 0 || !seen.insert(val) {
                            return false;
                        }
                    }
                }
                if v == 0 {
                    break;
                }
                v = (v - 1) & u;
            }
        }
        let image = |v: usize, w: usize| -> HashSet<Elem> {
            (1..=self.sizes[v])
                .map(|e| self.map(v, w, e))
                .filter(|&x| x != 0)
                .collect()
        };
        for u in 0..nmasks {
            for v in 0..u {
                if u & v == u || u & v == v {
                    continue;
                }
                let w = u | v;
                let im_u = image(u, w);
                let im_v = image(v, w);
                let im_i = image(u & v, w);
                let inter: HashSet<Elem> = im_u.intersection(&im_v).copied().collect();
                if inter != im_i {
                    return false;
                }
            }
        }
        true
    }

    /// A random functor built from cells: each cell is born at a subset
    /// and, once a trigger subset is reached, either dies to the basepoint
    /// or merges into an earlier cell.  The fate of a cell depends only on
    /// the subset at which the functor is evaluated, so functoriality
    /// holds by construction.
    pub fn random(n: usize, cells: usize, rng: &mut ChaCha8Rng) -> CubeFunctor {
        #[derive(Clone, Copy)]
        enum Fate {
            Die,
            Merge(usize),
        }
        let nmasks = 1usize << n;
        let fullmask = nmasks - 1;
        let mut births: Vec<usize> = Vec::with_capacity(cells);
        let mut triggers: Vec<Option<(usize, Fate)>> = Vec::with_capacity(cells);
        for c in 0..cells {
            let birth = rng.gen_range(0..nmasks);
            let style = rng.gen_range(0..4u32);
            let trig = if style == 0 || birth == fullmask {
                None
            } else {
                let free: Vec<usize> = (0..n).filter(|&j| birth >> j & 1 == 0).collect();
                let mut tmask = birth | 1 << free[rng.gen_range(0..free.len())];
                if style == 3 && tmask != fullmask {
                    let free2: Vec<usize> =
                        (0..n).filter(|&j| tmask >> j & 1 == 0).collect();
                    tmask |= 1 << free2[rng.gen_range(0..free2.len())];
                }
                if style == 1 {
                    Some((tmask, Fate::Die))
                } else {
                    let cands: Vec<usize> = (0..c)
                        .filter(|&c2| births[c2] & tmask == births[c2])
                        .collect();
                    if cands.is_empty() {
                        Some((tmask, Fate::Die))
                    } else {
                        Some((tmask, Fate::Merge(cands[rng.gen_range(0..cands.len())])))
                    }
                }
            };
            births.push(birth);
            triggers.push(trig);
        }
        let resolve = |start: usize, mask: usize| -> Option<usize> {
            let mut c = start;
            loop {
                match triggers[c] {
                    Some((t, fate)) if t & mask == t => match fate {
                        Fate::Die => return None,
                        Fate::Merge(c2) => c = c2,
                    },
                    _ => return Some(c),
                }
            }
        };
        let alive = |c: usize, mask: usize| -> bool {
            births[c] & mask == births[c]
                && !matches!(triggers[c], Some((t, _)) if t & mask == t)
        };
        let mut ids: Vec<Vec<Elem>> = vec![vec![0; cells]; nmasks];
        let mut lists: Vec<Vec<usize>> = vec![Vec::new(); nmasks];
        let mut sizes = vec![0u32; nmasks];
        for mask in 0..nmasks {
            for c in 0..cells {
                if alive(c, mask) {
                    lists[mask].push(c);
                    ids[mask][c] = lists[mask].len() as Elem;
                }
            }
            sizes[mask] = lists[mask].len() as u32;
        }
        let steps: Vec<Vec<Vec<Elem>>> = (0..nmasks)
            .map(|mask| {
                (0..n)
                    .filter(|&j| mask >> j & 1 == 0)
                    .map(|j| {
                        let m2 = mask | 1 << j;
                        let mut t = vec![0 as Elem; sizes[mask] as usize + 1];
                        for (e0, &c) in lists[mask].iter().enumerate() {
                            t[e0 + 1] = match resolve(c, m2) {
                                None => 0,
                                Some(c2) => ids[m2][c2],
                            };
                        }
                        t
                    })
                    .collect()
            })
            .collect();
        CubeFunctor { n, sizes, steps }
    }
}

// ---------------------------------------------------------------------------
// Subspectra and a small zoo of samples.
// ---------------------------------------------------------------------------

/// The smallest subspectrum of `x` containing the seed simplices
/// `(level, degree, element)`: closed under faces, degeneracies, the
/// group actions, and the structure maps.  Returns it with its inclusion.
pub fn spanned_subspectrum(
    x: &SymSpectrum,
    seeds: &[(usize, usize, Elem)],
) -> Result<(SymSpectrum, SpectrumMap), GammaError> {
    let mut marked: Vec<Vec<BTreeSet<Elem>>> = (0..=x.level_cap)
        .map(|_| vec![BTreeSet::new(); x.dim_cap + 1])
        .collect();
    let mut queue: VecDeque<(usize, usize, Elem)> = VecDeque::new();
    for &(n, q, e) in seeds {
        if n > x.level_cap || q > x.dim_cap || e == 0 || e > x.size(n, q) {
            return Err(GammaError::Invalid {
                reason: format!("seed simplex ({n}, {q}, {e}) is out of range"),
            });
        }
        queue.push_back((n, q, e));
    }
    while let Some((n, q, e)) = queue.pop_front() {
        if e == 0 || !marked[n][q].insert(e) {
            continue;
        }
        if q > 0 {
            for i in 0..=q {
                queue.push_back((n, q - 1, x.levels[n].face(q, i, e)));
            }
        }
        if q < x.dim_cap {
            for i in 0..=q {
                queue.push_back((n, q + 1, x.levels[n].degen(q, i, e)));
            }
        }
        for g in x.levels[n].group.elements() {
            queue.push_back((n, q, x.levels[n].act(g, q, e)));
        }
        if n < x.level_cap {
            for a in 1..=q as Elem {
                queue.push_back((n + 1, q, x.sigma_apply(n, q, e, a)));
            }
        }
    }
    let mut levels = Vec::with_capacity(x.level_cap + 1);
    let mut incls = Vec::with_capacity(x.level_cap + 1);
    let mut projs = Vec::with_capacity(x.level_cap + 1);
    for n in 0..=x.level_cap {
        let keep: Vec<Vec<Elem>> = (0..=x.dim_cap)
            .map(|q| marked[n][q].iter().copied().collect())
            .collect();
        let (sub, incl, proj) = subcomplex(&x.levels[n], &keep)?;
        levels.push(sub);
        incls.push(incl);
        projs.push(proj);
    }
    let sigma: Vec<SSetMap> = (0..x.level_cap)
        .map(|n| SSetMap {
            maps: (0..=x.dim_cap)
                .map(|q| {
                    let size = levels[n].size(q);
                    let mut t = vec![0 as Elem; size as usize * q + 1];
                    for e in 1..=size {
                        let old = incls[n].apply(q, e);
                        for a in 1..=q as Elem {
                            t[(e - 1) as usize * q + a as usize] =
                                projs[n + 1][q][x.sigma_apply(n, q, old, a) as usize];
                        }
                    }
                    t
                })
                .collect(),
        })
        .collect();
    Ok((
        SymSpectrum {
            group: Arc::clone(&x.group),
            level_cap: x.level_cap,
            dim_cap: x.dim_cap,
            syms: x.syms.clone(),
            levels,
            sigma,
        },
        SpectrumMap { maps: incls },
    ))
}

/// A reproducible zoo of small named spectra, each with at most six
/// nonbase simplices per level and degree: spheres, a reduced sphere, tiny
/// constant and suspension spectra, and randomly spanned subspectra of
/// small products.
pub fn sample_spectra(seed: u64, count: usize) -> Vec<(String, SymSpectrum)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z2 = FiniteGroup::cyclic(2);
    let e = FiniteGroup::trivial();
    let free = FiniteGSet::free_orbit(Arc::clone(&z2));
    let donor_prod = product_spectrum(&free, 3, 2);
    let donor_sph = sphere_spectrum(&z2, 3, 2);
    let small = |x: &SymSpectrum| {
        (0..=x.level_cap).all(|n| (0..=x.dim_cap).all(|q| x.size(n, q) <= 6))
    };
    let mut out: Vec<(String, SymSpectrum)> = Vec::with_capacity(count);
    let mut attempt = 0usize;
    while out.len() < count {
        let kind = attempt % 6;
        attempt += 1;
        let (name, x) = match kind {
            0 => ("sphere over Z/2".to_string(), sphere_spectrum(&z2, 2, 2)),
            1 => (
                "reduced sphere".to_string(),
                reduced_sphere_spectrum(&e, 2, 2),
            ),
            2 => {
                let pts = PointedGSet::trivial(Arc::clone(&z2), 1);
                (
                    "constant two points over Z/2".to_string(),
                    constant_spectrum(&SimplicialGSet::discrete(&pts, 2), 3),
                )
            }
            3 => {
                let orbit = FiniteGSet::free_orbit(Arc::clone(&z2)).to_pointed();
                (
                    "suspension of a free orbit".to_string(),
                    suspension_spectrum(&SimplicialGSet::discrete(&orbit, 1), 3),
                )
            }
            kind => {
                let donor = if kind == 4 { &donor_prod } else { &donor_sph };
                let dn = if kind == 4 { "product" } else { "sphere" };
                let n = rng.gen_range(1..=donor.level_cap);
                let q = rng.gen_range(1..=donor.dim_cap);
                let sz = donor.size(n, q);
                if sz == 0 {
                    continue;
                }
                let el = rng.gen_range(1..=sz);
                match spanned_subspectrum(donor, &[(n, q, el)]) {
                    Ok((sub, _)) => (
                        format!("span of ({n}, {q}, {el}) in the {dn} donor"),
                        sub,
                    ),
                    Err(_) => continue,
                }
            }
        };
        if small(&x) {
            out.push((name, x));
        }
        if attempt > 40 * count.max(1) {
            break;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::fat_wedge;
    use super::*;

    fn z2() -> Arc<FiniteGroup> {
        FiniteGroup::cyclic(2)
    }

    fn e1() -> Arc<FiniteGroup> {
        FiniteGroup::trivial()
    }

    #[test]
    fn reduced_sphere_and_basepoint_spectra_validate() {
        for g in [e1(), z2()] {
            let r = reduced_sphere_spectrum(&g, 3, 2);
            r.validate().unwrap();
            assert_eq!(r.size(0, 2), 0);
            assert_eq!(r.size(2, 2), 4);
            let b = basepoint_spectrum(&g, 2, 2);
            b.validate().unwrap();
            let x = sphere_spectrum(&g, 2, 2);
            basepoint_inclusion(&x).validate(&b, &x).unwrap();
            identity_spectrum_map(&x).validate(&x, &x).unwrap();
        }
    }

    #[test]
    fn sphere_latching_is_the_sphere_level_and_the_routes_agree() {
        for g in [e1(), z2()] {
            let x = sphere_spectrum(&g, 3, 2);
            for n in 0..=3 {
                let cmp = latching_comparison(&x, n).unwrap();
                for method in [LatchMethod::Poset, LatchMethod::Comma] {
                    let l = latching(&x, n, method).unwrap();
                    if n == 0 {
                        assert!((0..=2).all(|q| l.space.size(q) == 0));
                    } else {
                        // L_n of the sphere is S^n itself.
                        assert!(l.nu.is_bijective_onto(&x.levels[n]));
                    }
                }
                let _ = cmp;
            }
        }
    }

    #[test]
    fn first_latching_object_is_the_level_smashed_with_a_circle() {
        let s = FiniteGSet::trivial(e1(), 2);
        let x = product_spectrum(&s, 2, 2);
        for method in [LatchMethod::Poset, LatchMethod::Comma] {
            let l = latching(&x, 1, method).unwrap();
            for q in 0..=2 {
                assert_eq!(l.space.size(q), x.size(0, q) * q as Elem);
            }
        }
    }

    #[test]
    fn latching_routes_agree_on_the_zoo() {
        for (name, x) in sample_spectra(0xC0FFEE, 8) {
            for n in 1..=x.level_cap.min(3) {
                latching_comparison(&x, n)
                    .unwrap_or_else(|e| panic!("{name} at level {n}: {e}"));
            }
        }
    }

    #[test]
    fn smash_unit_is_an_isomorphism() {
        let free = FiniteGSet::free_orbit(z2());
        for x in [sphere_spectrum(&z2(), 2, 2), product_spectrum(&free, 2, 2)] {
            let (sm, cmp) = smash_unit_comparison(&x).unwrap();
            sm.validate().unwrap();
            cmp.validate(&sm, &x).unwrap();
            assert!(cmp.is_levelwise_bijective(&x));
        }
    }

    #[test]
    fn flat_certificates_for_the_standard_examples() {
        let free = FiniteGSet::free_orbit(z2());
        for x in [sphere_spectrum(&z2(), 3, 2), product_spectrum(&free, 2, 2)] {
            let cap = x.level_cap;
            assert!(flat_check(&x, cap).unwrap().ok);
            assert!(flat_via_latching(&x, cap, LatchMethod::Poset).unwrap().ok);
            assert!(flat_via_latching(&x, cap, LatchMethod::Comma).unwrap().ok);
            for n in 0..=cap {
                assert!(cube_colimit_check(&x, n).unwrap());
                assert!(cube_conditions_check(&x, n).unwrap());
            }
        }
    }

    #[test]
    fn constant_spectra_are_refuted_with_a_unit_witness() {
        let pts = PointedGSet::trivial(z2(), 1);
        let c = constant_spectrum(&SimplicialGSet::discrete(&pts, 2), 2);
        let cert = flat_check(&c, 2).unwrap();
        assert!(!cert.ok);
        assert!(cert.failures[0].contains("(a) (k, l) = (0, 1)"), "{:?}", cert.failures);
        let lat = flat_via_latching(&c, 2, LatchMethod::Poset).unwrap();
        assert!(!lat.ok);
        assert!(lat.failures[0].starts_with("nu_1"), "{:?}", lat.failures);
        assert!(!cube_colimit_check(&c, 1).unwrap());
        assert!(!cube_conditions_check(&c, 1).unwrap());
        // The identity of a non-flat spectrum is still a flat cofibration:
        // the map routes measure the relative conditions, not the object.
        let id = identity_spectrum_map(&c);
        assert!(flat_check_map(&id, &c, &c, 2).unwrap().ok);
        assert!(flat_via_latching_map(&id, &c, &c, 2, LatchMethod::Poset)
            .unwrap()
            .ok);
        assert!(flat_via_latching_map(&id, &c, &c, 2, LatchMethod::Comma)
            .unwrap()
            .ok);
    }

    #[test]
    fn collapsing_a_wedge_summand_is_refuted_at_level_zero() {
        let two = PointedGSet::trivial(e1(), 2);
        let x = suspension_spectrum(&SimplicialGSet::discrete(&two, 1), 2);
        let y = sphere_spectrum(&e1(), 2, 1);
        let fold = SpectrumMap {
            maps: (0..=2)
                .map(|n| SSetMap {
                    maps: (0..=1)
                        .map(|q| {
                            let szs = y.size(n, q) as u64;
                            (0..=x.size(n, q) as u64)
                                .map(|e| if e == 0 { 0 } else { ((e - 1) % szs + 1) as Elem })
                                .collect()
                        })
                        .collect(),
                })
                .collect(),
        };
        fold.validate(&x, &y).unwrap();
        let cert = flat_check_map(&fold, &x, &y, 2).unwrap();
        assert!(!cert.ok);
        assert!(cert.failures[0].starts_with("level 0 is not injective"), "{:?}", cert.failures);
        let lat = flat_via_latching_map(&fold, &x, &y, 2, LatchMethod::Comma).unwrap();
        assert!(!lat.ok);
        assert!(lat.failures[0].starts_with("nu_0"), "{:?}", lat.failures);
    }

    #[test]
    fn basepoint_inclusion_matches_the_object_route() {
        let pts = PointedGSet::trivial(z2(), 1);
        for x in [
            sphere_spectrum(&z2(), 2, 2),
            constant_spectrum(&SimplicialGSet::discrete(&pts, 2), 2),
        ] {
            let b = basepoint_spectrum(&x.group, x.level_cap, x.dim_cap);
            let incl = basepoint_inclusion(&x);
            let by_map = flat_check_map(&incl, &b, &x, x.level_cap).unwrap();
            let by_obj = flat_check(&x, x.level_cap).unwrap();
            assert_eq!(by_map.ok, by_obj.ok);
        }
    }

    #[test]
    fn fat_wedge_inclusion_is_a_flat_cofibration() {
        let s = FiniteGSet::trivial(e1(), 2);
        let full = product_spectrum(&s, 2, 2);
        let (fw, incl) = fat_wedge(&s, 2, 2).unwrap();
        assert!(flat_check_map(&incl, &fw, &full, 2).unwrap().ok);
        assert!(flat_check_inclusion(&incl, &fw, &full, 2).unwrap().ok);
        for method in [LatchMethod::Poset, LatchMethod::Comma] {
            assert!(flat_via_latching_map(&incl, &fw, &full, 2, method).unwrap().ok);
        }
    }

    #[test]
    fn flatness_routes_agree_on_the_zoo() {
        for (name, x) in sample_spectra(0xBEEF, 6) {
            let cap = x.level_cap;
            let a = flat_check(&x, cap).unwrap().ok;
            let b = flat_via_latching(&x, cap, LatchMethod::Poset).unwrap().ok;
            let c = flat_via_latching(&x, cap, LatchMethod::Comma).unwrap().ok;
            let d = (0..=cap).all(|n| cube_colimit_check(&x, n).unwrap());
            let e = (0..=cap).all(|n| cube_conditions_check(&x, n).unwrap());
            assert!(
                a == b && b == c && c == d && d == e,
                "{name}: conditions {a}, poset latching {b}, comma latching {c}, cube colimit {d}, cube conditions {e}"
            );
        }
    }

    #[test]
    fn subset_functor_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let f = CubeFunctor::random(3, 5, &mut rng);
            f.validate().unwrap();
            assert_eq!(f.colimit_route(), f.conditions_route());
        }
        // Two cells merging at the top: the colimit keeps them separate,
        // the value does not.
        let merge = CubeFunctor {
            n: 2,
            sizes: vec![2, 2, 2, 1],
            steps: vec![
                vec![vec![0, 1, 2], vec![0, 1, 2]],
                vec![vec![0, 1, 1]],
                vec![vec![0, 1, 1]],
                vec![],
            ],
        };
        merge.validate().unwrap();
        assert!(!merge.colimit_route());
        assert!(!merge.conditions_route());
        // A single cell born at the bottom and kept forever passes.
        let live = CubeFunctor {
            n: 2,
            sizes: vec![1, 1, 1, 1],
            steps: vec![
                vec![vec![0, 1], vec![0, 1]],
                vec![vec![0, 1]],
                vec![vec![0, 1]],
                vec![],
            ],
        };
        live.validate().unwrap();
        assert!(live.colimit_route());
        assert!(live.conditions_route());
    }

    #[test]
    fn spanned_subspectra_are_subspectra_and_the_routes_agree() {
        let donor = product_spectrum(&FiniteGSet::free_orbit(z2()), 2, 2);
        for seeds in [vec![(1usize, 1usize, 1 as Elem)], vec![(2, 1, 3)], vec![(2, 2, 5)]] {
            let (sub, incl) = spanned_subspectrum(&donor, &seeds).unwrap();
            sub.validate().unwrap();
            incl.validate(&sub, &donor).unwrap();
            let by_incl = flat_check_inclusion(&incl, &sub, &donor, 2).unwrap().ok;
            let by_map = flat_check_map(&incl, &sub, &donor, 2).unwrap().ok;
            let by_latch = flat_via_latching_map(&incl, &sub, &donor, 2, LatchMethod::Comma)
                .unwrap()
                .ok;
            assert_eq!(by_incl, by_map, "{seeds:?}");
            assert_eq!(by_map, by_latch, "{seeds:?}");
        }
    }

    #[test]
    fn caps_are_reported_on_the_first_untested_decomposition() {
        let x = sphere_spectrum(&e1(), 2, 2);
        match flat_check(&x, 3) {
            Err(GammaError::CapTooSmall { needed, cap, .. }) => {
                assert_eq!((needed, cap), (3, 2));
            }
            other => panic!("expected a cap error, got {other:?}"),
        }
        assert!(latching(&x, 3, LatchMethod::Poset).is_err());
    }
}
