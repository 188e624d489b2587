//! Geometric fixed points of Γ-G-spaces.
//!
//! Level k of the fixed-point functor is the H-fixed subspace of A
//! evaluated at the H-fold smash power (k⁺)^∧H, where H permutes the smash
//! coordinates by left translation and a based map k⁺ → l⁺ acts on every
//! coordinate at once. Smash powers are large even for small k, so the
//! evaluation coend here is presented by *subsets* of the target rather
//! than by arbitrary indexing maps: a generator [f : j⁺ → T, x] rewrites to
//! [image of f, essential part of x] through epi-mono factorization and
//! peeling, and only the codimension-one relations out of each subset
//! remain. The tests cross-check this presentation against the
//! unrestricted one degree by degree.
//!
//! Alongside the functor itself this module provides the comparison maps
//! that make it useful: the unit isomorphism on the representable of 1⁺,
//! the lax monoidal map (ΦᴴA) ∧ (ΦᴴB) → Φᴴ(A ∧ B), and the collapse map
//! S⁺ ∧ Γ(1⁺,−) → Γ(S⁺,−) sending s ∧ φ to φ∘pₛ.

use std::sync::Arc;

use crate::colim::UnionFind;
use crate::groups::{Elem, FiniteGroup, GAction, PointedGSet, SubgroupRef};
use crate::par::maybe_par_range;
use crate::sset::{SSetMap, SimplicialGSet};

use super::smash::{ess_tables, omit_mono, smash_full, smash_pointed_functor, EssDegree, SmashData};
use super::{representable, BasedMap, GammaError, GammaGSpace, GammaMap, GammaRule};

/// Largest generator count one degree of a subset coend may materialize.
const MAX_GENERATORS: u64 = 1 << 26;

/// One simplicial degree of the coend at a plain finite pointed set,
/// reduced to generators [J, x] with J a subset of the target (stored as a
/// strictly increasing tuple) and x an essential element of the value at
/// level |J|. Only subsets up to the skeletal threshold occur.
pub(super) struct SubsetCoend {
    t: u32,
    /// subsets ordered by (size, lexicographic); `subsets[0]` is empty
    subsets: Vec<Vec<Elem>>,
    /// first subset index of each size; `starts[kk + 1] == subsets.len()`
    starts: Vec<usize>,
    /// generator offset per subset; `offsets[0] = 1`, generator 0 is the base
    offsets: Vec<u64>,
    ess: Arc<EssDegree>,
    class_of: Vec<Elem>,
    rep: Vec<u32>,
    pub(super) size: u32,
}

impl SubsetCoend {
    fn gen_index(&self, si: usize, xi: u32) -> u32 {
        (self.offsets[si] + xi as u64) as u32
    }

    fn subset_index(&self, s: &[Elem]) -> usize {
        let j = s.len();
        let slice = &self.subsets[self.starts[j]..self.starts[j + 1]];
        self.starts[j]
            + slice
                .binary_search_by(|c| c.as_slice().cmp(s))
                .expect("subset of the evaluation target")
    }

    /// Pre-quotient node of [subset, element], peeling the element to an
    /// essential one (and shrinking the subset along the peeled injection).
    fn node_of(&self, s: &[Elem], x: Elem) -> u32 {
        if x == 0 {
            return 0;
        }
        let j = s.len();
        match &self.ess.peel[j][x as usize - 1] {
            None => self.gen_index(self.subset_index(s), self.ess.idx[j][x as usize]),
            Some((j0, mu, x0)) => {
                let s2: Vec<Elem> = mu.table[1..].iter().map(|&v| s[v as usize - 1]).collect();
                self.gen_index(self.subset_index(&s2), self.ess.idx[*j0][*x0 as usize])
            }
        }
    }

    /// Class of an arbitrary generator [f : k⁺ → T, x]; `f` is a full table
    /// with `f[0] = 0` and entries in `0..=t`.
    pub(super) fn class_of_generator(
        &self,
        a: &GammaGSpace,
        q: usize,
        k: usize,
        f: &[Elem],
        x: Elem,
    ) -> Elem {
        if x == 0 {
            return 0;
        }
        debug_assert!(f[1..=k].iter().all(|&v| v <= self.t));
        let mut img: Vec<Elem> = f[1..=k].iter().copied().filter(|&v| v != 0).collect();
        img.sort_unstable();
        img.dedup();
        let table: Vec<Elem> = f[..=k]
            .iter()
            .map(|&v| {
                if v == 0 {
                    0
                } else {
                    img.binary_search(&v).expect("image entry") as Elem + 1
                }
            })
            .collect();
        let epi = BasedMap {
            source: k,
            target: img.len(),
            table,
        };
        let x2 = a.apply(&epi, q, x);
        self.class_of[self.node_of(&img, x2) as usize]
    }

    /// Canonical representative (k, f-table with f[0] = 0, x) of a class.
    pub(super) fn rep_generator(&self, class: Elem) -> (usize, Vec<Elem>, Elem) {
        let g = self.rep[class as usize];
        if g == 0 {
            return (0, vec![0], 0);
        }
        let si = self.offsets.partition_point(|&o| o <= g as u64) - 1;
        let s = &self.subsets[si];
        let xi = g as u64 - self.offsets[si];
        let mut f = Vec::with_capacity(s.len() + 1);
        f.push(0);
        f.extend_from_slice(s);
        (s.len(), f, self.ess.list[s.len()][xi as usize])
    }
}

/// Build the subset presentation of one degree of the coend at t⁺,
/// truncated at the given skeletal threshold.
pub(super) fn subset_coend(
    a: &GammaGSpace,
    q: usize,
    t: u32,
    threshold: usize,
    ess: &Arc<EssDegree>,
) -> Result<SubsetCoend, GammaError> {
    let kk = threshold.min(t as usize);
    // count generators before materializing anything
    let mut total: u128 = 1;
    let mut choose: u128 = 1;
    for j in 0..=kk {
        if j > 0 {
            choose = choose * (t as u128 - j as u128 + 1) / j as u128;
        }
        total += choose * ess.list[j].len() as u128;
        if total > MAX_GENERATORS as u128 {
            return Err(GammaError::CapTooSmall {
                what: format!("subset coend at a set of size {t}"),
                needed: total.min(usize::MAX as u128) as usize,
                cap: MAX_GENERATORS as usize,
            });
        }
    }
    // subsets by size, lexicographic within one size
    let mut subsets: Vec<Vec<Elem>> = vec![vec![]];
    let mut starts = vec![0usize, 1];
    for j in 1..=kk {
        let mut cur: Vec<Elem> = (1..=j as Elem).collect();
        loop {
            subsets.push(cur.clone());
            let mut i = j;
            while i > 0 && cur[i - 1] == (t as usize - (j - i)) as Elem {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            cur[i - 1] += 1;
            for p in i..j {
                cur[p] = cur[p - 1] + 1;
            }
        }
        starts.push(subsets.len());
    }
    let mut offsets = vec![0u64; subsets.len() + 1];
    offsets[0] = 1;
    for (si, s) in subsets.iter().enumerate() {
        offsets[si + 1] = offsets[si] + ess.list[s.len()].len() as u64;
    }
    let coend = SubsetCoend {
        t,
        subsets,
        starts,
        offsets,
        ess: Arc::clone(ess),
        class_of: vec![],
        rep: vec![],
        size: 0,
    };
    let total = coend.offsets[coend.subsets.len()];
    debug_assert!(total <= MAX_GENERATORS);
    // relations: a subset J only interacts with its codimension-one faces,
    // through the matching injection of level sets
    let mut uf = UnionFind::new(total as usize);
    for (si, s) in coend.subsets.iter().enumerate() {
        let j = s.len();
        if j == 0 {
            continue;
        }
        let start = coend.starts[j];
        debug_assert!(si >= start);
        for i in 1..=j {
            let mut s2 = s.clone();
            s2.remove(i - 1);
            let omit = omit_mono(j, i);
            for x1 in 1..=a.values[j - 1].size(q) {
                let lhs = coend.node_of(&s2, x1);
                let rhs = coend.node_of(s, a.apply(&omit, q, x1));
                if lhs != rhs {
                    uf.union(lhs, rhs);
                }
            }
        }
    }
    let quot = uf.quotient(0);
    Ok(SubsetCoend {
        class_of: quot.class_of,
        rep: quot.rep,
        size: quot.size,
        ..coend
    })
}

/// The H-fold smash power (k⁺)^∧H over the subgroup presented as a group:
/// tuples over {1..k} indexed by the group elements, encoded little-endian
/// base k, with the action permuting coordinates by left translation.
fn smash_power(hg: &Arc<FiniteGroup>, k: usize) -> PointedGSet {
    let m = hg.order();
    let size = (k as u64).pow(m as u32) as u32;
    if hg.is_trivial() || k <= 1 {
        return PointedGSet::trivial(Arc::clone(hg), size);
    }
    let k64 = k as u64;
    let table: Vec<Vec<Elem>> = hg
        .elements()
        .map(|h| {
            let hinv = hg.inv(h);
            (0..=size)
                .map(|e| {
                    if e == 0 {
                        return 0;
                    }
                    let mut d = vec![0u64; m];
                    let mut v = e as u64 - 1;
                    for slot in d.iter_mut() {
                        *slot = v % k64;
                        v /= k64;
                    }
                    let mut out = 0u64;
                    for p in (0..m).rev() {
                        out = out * k64 + d[hg.mul(hinv, p)];
                    }
                    out as Elem + 1
                })
                .collect()
        })
        .collect();
    PointedGSet {
        group: Arc::clone(hg),
        size,
        action: GAction::Table(table),
    }
}

/// Full table of φ^∧H on power encodings (length source^|H| + 1): the map
/// applied on every smash coordinate, with the base swallowing a tuple as
/// soon as one coordinate dies.
fn power_table(phi: &BasedMap, m: usize) -> Vec<Elem> {
    let k = phi.source as u64;
    let l = phi.target as u64;
    let size = k.pow(m as u32);
    (0..=size)
        .map(|e| {
            if e == 0 {
                return 0;
            }
            let mut v = e - 1;
            let mut out = 0u64;
            let mut scale = 1u64;
            for _ in 0..m {
                let digit = (v % k) as usize + 1;
                v /= k;
                let w = phi.table[digit];
                if w == 0 {
                    return 0;
                }
                out += (w as u64 - 1) * scale;
                scale *= l;
            }
            out as Elem + 1
        })
        .collect()
}

/// Encoding of the constant tuple (j, …, j) inside the k-power.
fn diag_power(k: usize, j: Elem, m: usize) -> Elem {
    let mut out = 0u64;
    for _ in 0..m {
        out = out * k as u64 + (j as u64 - 1);
    }
    out as Elem + 1
}

/// A evaluated at one smash power, with the per-degree coend presentations
/// kept for reading classes back.
struct PowerEval {
    space: SimplicialGSet,
    levels: Vec<Arc<SubsetCoend>>,
}

fn power_eval(
    ar: &GammaGSpace,
    tset: &PointedGSet,
    ess: &[Arc<EssDegree>],
) -> Result<PowerEval, GammaError> {
    let threshold = ar.skeletal.unwrap_or(ar.n_max);
    let t = tset.size;
    let levels: Vec<Arc<SubsetCoend>> = if ar.is_discrete() {
        let one = Arc::new(subset_coend(ar, 0, t, threshold, &ess[0])?);
        vec![one; ar.cap + 1]
    } else {
        let built: Vec<Result<Arc<SubsetCoend>, GammaError>> =
            maybe_par_range(ar.cap + 1, |q| {
                subset_coend(ar, q, t, threshold, &ess[q]).map(Arc::new)
            });
        built.into_iter().collect::<Result<Vec<_>, _>>()?
    };
    // the argument is a plain set, so faces and degeneracies only move the
    // value side; the action also rewrites the indexing tuple
    let push = |q: usize,
                c: Elem,
                post: &dyn Fn(Elem) -> Elem,
                q2: usize,
                on_a: &dyn Fn(usize, Elem) -> Elem|
     -> Elem {
        let (k, f, x) = levels[q].rep_generator(c);
        let f2: Vec<Elem> = f.iter().map(|&v| post(v)).collect();
        levels[q2].class_of_generator(ar, q2, k, &f2, on_a(k, x))
    };
    let cap = ar.cap;
    let group = Arc::clone(&ar.group);
    let mut lv = Vec::with_capacity(cap + 1);
    let mut faces = Vec::with_capacity(cap + 1);
    let mut degens = Vec::with_capacity(cap + 1);
    for q in 0..=cap {
        let size = levels[q].size;
        let trivial = group.is_trivial()
            || (tset.has_trivial_action()
                && (0..=threshold).all(|k| ar.values[k].levels[q].has_trivial_action()));
        let action = if trivial {
            GAction::Trivial
        } else {
            GAction::Table(
                group
                    .elements()
                    .map(|g| {
                        (0..=size)
                            .map(|c| {
                                push(
                                    q,
                                    c,
                                    &|v| tset.act(g, v),
                                    q,
                                    &|k, x| ar.values[k].act(g, q, x),
                                )
                            })
                            .collect()
                    })
                    .collect(),
            )
        };
        lv.push(PointedGSet {
            group: Arc::clone(&group),
            size,
            action,
        });
        faces.push(if q == 0 {
            vec![]
        } else {
            (0..=q)
                .map(|i| {
                    (0..=size)
                        .map(|c| push(q, c, &|v| v, q - 1, &|k, x| ar.values[k].face(q, i, x)))
                        .collect()
                })
                .collect()
        });
        degens.push(if q == cap {
            vec![]
        } else {
            (0..=q)
                .map(|i| {
                    (0..=size)
                        .map(|c| push(q, c, &|v| v, q + 1, &|k, x| ar.values[k].degen(q, i, x)))
                        .collect()
                })
                .collect()
        });
    }
    Ok(PowerEval {
        space: SimplicialGSet::new(group, cap, lv, faces, degens),
        levels,
    })
}

struct GfpCore {
    /// the input restricted to the subgroup as a group in its own right
    ar: GammaGSpace,
    m: usize,
    evals: Vec<PowerEval>,
    /// per level and degree: ascending coend classes fixed by the whole
    /// subgroup, with a leading 0 (the fixed-space numbering)
    included: Vec<Vec<Vec<Elem>>>,
}

impl GfpCore {
    fn project(&self, k: usize, q: usize, class: Elem) -> Elem {
        if class == 0 {
            return 0;
        }
        self.included[k][q]
            .binary_search(&class)
            .expect("image of a fixed class is fixed") as Elem
    }
}

/// Geometric fixed points of a Γ-G-space under a subgroup, with the data
/// needed to read fixed-point elements back as evaluation classes.
pub struct GeometricFixedPoints {
    /// the fixed-point Γ-space, over the trivial group
    pub space: GammaGSpace,
    core: Arc<GfpCore>,
}

impl GeometricFixedPoints {
    /// The evaluation class at the smash power behind a fixed-point element.
    pub fn witness(&self, k: usize, q: usize, e: Elem) -> Elem {
        self.core.included[k][q][e as usize]
    }
}

/// Compute the fixed-point Γ-space with `n_max` stored levels: level k is
/// the full-subgroup fixed subspace of A evaluated at (k⁺)^∧H. Evaluation
/// at powers beyond the stored range needs a skeletal certificate.
pub fn geometric_fixed_points(
    a: &GammaGSpace,
    h: &SubgroupRef,
    n_max: usize,
) -> Result<GeometricFixedPoints, GammaError> {
    let ar = a.restrict(h);
    let hg = Arc::clone(&ar.group);
    let m = hg.order();
    let threshold = ar.skeletal.unwrap_or(ar.n_max);
    for k in 0..=n_max {
        let t = (k as u64)
            .checked_pow(m as u32)
            .filter(|&t| t <= u32::MAX as u64)
            .ok_or_else(|| GammaError::Invalid {
                reason: format!("smash power {k}^{m} is out of range"),
            })?;
        if t as usize > threshold && ar.skeletal.is_none() {
            return Err(GammaError::SkeletalCertificateMissing { size: t as usize });
        }
    }
    let ess = ess_tables(&ar, ar.is_discrete());
    let built: Vec<Result<PowerEval, GammaError>> =
        maybe_par_range(n_max + 1, |k| power_eval(&ar, &smash_power(&hg, k), &ess));
    let evals = built.into_iter().collect::<Result<Vec<_>, _>>()?;
    let full = SubgroupRef::full(&hg);
    let mut values = Vec::with_capacity(n_max + 1);
    let mut included = Vec::with_capacity(n_max + 1);
    for ev in &evals {
        let (fx, inc) = ev.space.fixed_sset(&full);
        values.push(fx);
        included.push(inc);
    }
    let core = Arc::new(GfpCore {
        ar,
        m,
        evals,
        included,
    });
    let rc = Arc::clone(&core);
    let rule: GammaRule = Arc::new(move |phi: &BasedMap, q: usize, e: Elem| {
        if e == 0 {
            return 0;
        }
        let old = rc.included[phi.source][q][e as usize];
        let (j, f, x) = rc.evals[phi.source].levels[q].rep_generator(old);
        let pm = power_table(phi, rc.m);
        let f2: Vec<Elem> = f.iter().map(|&v| pm[v as usize]).collect();
        let nc = rc.evals[phi.target].levels[q].class_of_generator(&rc.ar, q, j, &f2, x);
        rc.project(phi.target, q, nc)
    });
    let space = GammaGSpace::new_unchecked(
        FiniteGroup::trivial(),
        n_max,
        a.cap,
        None,
        values,
        rule,
    );
    Ok(GeometricFixedPoints { space, core })
}

/// The fixed points of the representable of 1⁺ against the representable
/// itself: level k sends j to the class of [1⁺ ↦ diagonal j-tuple, id],
/// and the comparison holds exactly when this is a levelwise bijection.
pub struct UnitFixedPoints {
    pub gfp: GeometricFixedPoints,
    pub unit: GammaGSpace,
    pub map: GammaMap,
    pub holds: bool,
}

pub fn unit_fixed_points(
    group: &Arc<FiniteGroup>,
    h: &SubgroupRef,
    n_max: usize,
    cap: usize,
) -> Result<UnitFixedPoints, GammaError> {
    let one = representable(&PointedGSet::trivial(Arc::clone(group), 1), n_max, cap)?;
    let gfp = geometric_fixed_points(&one, h, n_max)?;
    let unit = representable(&PointedGSet::trivial(FiniteGroup::trivial(), 1), n_max, cap)?;
    let m = gfp.core.m;
    let levels = (0..=n_max)
        .map(|k| SSetMap {
            maps: (0..=cap)
                .map(|q| {
                    (0..=unit.values[k].size(q))
                        .map(|j| {
                            if j == 0 {
                                return 0;
                            }
                            let f = [0, diag_power(k, j, m)];
                            let cls = gfp.core.evals[k].levels[q].class_of_generator(
                                &gfp.core.ar,
                                q,
                                1,
                                &f,
                                1,
                            );
                            gfp.core.project(k, q, cls)
                        })
                        .collect()
                })
                .collect(),
        })
        .collect();
    let map = GammaMap { levels };
    let holds = map.validate(&unit, &gfp.space).is_ok() && map.is_levelwise_bijective(&gfp.space);
    Ok(UnitFixedPoints {
        gfp,
        unit,
        map,
        holds,
    })
}

/// The lax monoidal comparison (ΦᴴA) ∧ (ΦᴴB) → Φᴴ(A ∧ B): a smash class
/// [f, x∧y] of fixed evaluation classes pairs its factor generators inside
/// A ∧ B and re-indexes along the interleaved tuple followed by f on every
/// coordinate. Natural always; an isomorphism only in degenerate cases.
pub struct LaxSmashComparison {
    pub source: SmashData,
    /// A ∧ B with the skeletal certificate its factors grant
    pub smash: SmashData,
    pub target: GeometricFixedPoints,
    pub map: GammaMap,
    pub natural: bool,
}

pub fn lax_smash_comparison(
    a: &GammaGSpace,
    b: &GammaGSpace,
    h: &SubgroupRef,
    n_max: usize,
) -> Result<LaxSmashComparison, GammaError> {
    let pa = geometric_fixed_points(a, h, n_max)?;
    let pb = geometric_fixed_points(b, h, n_max)?;
    let source = smash_full(&pa.space, &pb.space, n_max)?;
    let ka = a.skeletal.unwrap_or(a.n_max);
    let kb = b.skeletal.unwrap_or(b.n_max);
    let smash = smash_full(a, b, (ka * kb).max(1))?;
    let target = geometric_fixed_points(&smash.space, h, n_max)?;
    let m = target.core.m;
    let cap = a.cap;
    let levels = (0..=n_max)
        .map(|n| SSetMap {
            maps: (0..=cap)
                .map(|q| {
                    (0..=source.space.values[n].size(q))
                        .map(|c| {
                            if c == 0 {
                                return 0;
                            }
                            let (k, l, f, x, y) = source.rep(n, q, c);
                            let xa = pa.core.included[k][q][x as usize];
                            let (ja, fa, xi) = pa.core.evals[k].levels[q].rep_generator(xa);
                            let yb = pb.core.included[l][q][y as usize];
                            let (jb, fb, yi) = pb.core.evals[l].levels[q].rep_generator(yb);
                            let w = smash.class_of(
                                ja * jb,
                                q,
                                ja,
                                jb,
                                &BasedMap::identity(ja * jb),
                                xi,
                                yi,
                            );
                            let pm = power_table(&f, m);
                            let mut u = vec![0 as Elem; ja * jb + 1];
                            for i in 1..=ja {
                                for ip in 1..=jb {
                                    u[(i - 1) * jb + ip] =
                                        pm[interleave(fa[i], fb[ip], k, l, m) as usize];
                                }
                            }
                            let nc = target.core.evals[n].levels[q].class_of_generator(
                                &target.core.ar,
                                q,
                                ja * jb,
                                &u,
                                w,
                            );
                            target.core.project(n, q, nc)
                        })
                        .collect()
                })
                .collect(),
        })
        .collect();
    let map = GammaMap { levels };
    let natural = map.validate(&source.space, &target.space).is_ok();
    Ok(LaxSmashComparison {
        source,
        smash,
        target,
        map,
        natural,
    })
}

/// Pair a k-power element with an l-power element coordinatewise inside the
/// (k·l)-power, matching the (x−1)·l + y smash numbering on every slot.
fn interleave(ex: Elem, ey: Elem, k: usize, l: usize, m: usize) -> Elem {
    let (mut vx, mut vy) = ((ex - 1) as u64, (ey - 1) as u64);
    let (k64, l64) = (k as u64, l as u64);
    let mut out = 0u64;
    let mut scale = 1u64;
    for _ in 0..m {
        out += ((vx % k64) * l64 + (vy % l64)) * scale;
        vx /= k64;
        vy /= l64;
        scale *= k64 * l64;
    }
    out as Elem + 1
}

/// The collapse comparison S⁺ ∧ Γ(1⁺,−) → Γ(S⁺,−): the element s ∧ φ goes
/// to φ∘pₛ, where pₛ keeps s and sends the rest of S to the base. Natural
/// and equivariant; injective levelwise, bijective only for S = 1⁺.
pub struct CollapseComparison {
    pub source: GammaGSpace,
    pub target: GammaGSpace,
    pub map: GammaMap,
    pub natural: bool,
}

pub fn collapse_comparison(
    s: &PointedGSet,
    n_max: usize,
    cap: usize,
) -> Result<CollapseComparison, GammaError> {
    let group = Arc::clone(&s.group);
    let one = representable(&PointedGSet::trivial(Arc::clone(&group), 1), n_max, cap)?;
    let source = smash_pointed_functor(s, &one)?;
    let target = representable(s, n_max, cap)?;
    let ssize = s.size as usize;
    let levels = (0..=n_max)
        .map(|k| SSetMap {
            maps: (0..=cap)
                .map(|q| {
                    (0..=source.values[k].size(q))
                        .map(|c| {
                            if c == 0 {
                                return 0;
                            }
                            let si = (c - 1) / k as u32 + 1;
                            let j = (c - 1) % k as u32 + 1;
                            let mut table = vec![0 as Elem; ssize + 1];
                            table[si as usize] = j;
                            BasedMap {
                                source: ssize,
                                target: k,
                                table,
                            }
                            .rank() as Elem
                        })
                        .collect()
                })
                .collect(),
        })
        .collect();
    let map = GammaMap { levels };
    let natural = map.validate(&source, &target).is_ok();
    Ok(CollapseComparison {
        source,
        target,
        map,
        natural,
    })
}

#[cfg(test)]
mod tests {
    use super::super::eval::{build_generic_coend, evaluate_full};
    use super::super::{eilenberg_maclane, CommMonoid};
    use super::*;
    use crate::groups::FiniteGSet;

    fn z2_monoid_space(n_max: usize) -> GammaGSpace {
        let z2 = FiniteGroup::cyclic(2);
        eilenberg_maclane(&CommMonoid::z2(z2), n_max, 1).unwrap()
    }

    /// A non-discrete 1-skeletal functor: level k is a wedge of k copies of
    /// a circle-like object (one vertex, one degenerate and one free edge).
    fn wedge_of_circles(n_max: usize) -> GammaGSpace {
        let g = FiniteGroup::trivial();
        let values = (0..=n_max)
            .map(|k| {
                let k32 = k as u32;
                let levels = vec![
                    PointedGSet::trivial(Arc::clone(&g), k32),
                    PointedGSet::trivial(Arc::clone(&g), 2 * k32),
                ];
                let face: Vec<Elem> = (0..=2 * k32).map(|e| (e + 1) / 2).collect();
                let faces = vec![vec![], vec![face.clone(), face]];
                let degen: Vec<Elem> = (0..=k32).map(|e| if e == 0 { 0 } else { 2 * e - 1 }).collect();
                let degens = vec![vec![degen], vec![]];
                SimplicialGSet::new(Arc::clone(&g), 1, levels, faces, degens)
            })
            .collect();
        let rule: GammaRule = Arc::new(|phi, q, e| {
            if e == 0 {
                return 0;
            }
            if q == 0 {
                return phi.apply(e);
            }
            let copy = phi.apply((e + 1) / 2);
            if copy == 0 {
                0
            } else {
                2 * copy - 1 + (e + 1) % 2
            }
        });
        GammaGSpace::new_unchecked(g, n_max, 1, None, values, rule)
    }

    #[test]
    fn subset_presentation_matches_the_generic_one() {
        let wedge = wedge_of_circles(3);
        for k in 0..=3 {
            wedge.values[k].validate().unwrap();
        }
        wedge.validate_functor(2).unwrap();
        let trivial_rep = representable(
            &PointedGSet::trivial(FiniteGroup::trivial(), 2),
            3,
            1,
        )
        .unwrap();
        let em = z2_monoid_space(3);
        let cases: Vec<(&GammaGSpace, usize)> = vec![(&em, 3), (&trivial_rep, 2), (&wedge, 1)];
        for (a, threshold) in cases {
            let ess = ess_tables(a, false);
            for q in 0..=a.cap {
                for t in [2u32, 3, 4] {
                    let sc = subset_coend(a, q, t, threshold, &ess[q]).unwrap();
                    let gc = build_generic_coend(a, q, t, threshold).unwrap();
                    assert_eq!(sc.size, gc.size, "class counts at t = {t}, q = {q}");
                    // subset reps land bijectively on generic classes
                    let mut seen = vec![false; gc.size as usize + 1];
                    for c in 0..=sc.size {
                        let (j, f, x) = sc.rep_generator(c);
                        let g = gc.class_of_generator(j, &f, x);
                        assert_eq!(g == 0, c == 0);
                        assert!(!seen[g as usize], "two subset classes collide");
                        seen[g as usize] = true;
                    }
                    assert!(seen.iter().all(|&b| b));
                    // and generic reps land back on the same subset class
                    for c in 0..=gc.size {
                        let (j, f, x) = gc.rep_generator(c);
                        let back = sc.class_of_generator(a, q, j, &f, x);
                        let (j2, f2, x2) = sc.rep_generator(back);
                        assert_eq!(gc.class_of_generator(j2, &f2, x2), c);
                    }
                }
            }
        }
    }

    #[test]
    fn power_evaluation_agrees_with_the_generic_route() {
        let em = z2_monoid_space(3);
        let full = SubgroupRef::full(&em.group);
        let ar = em.restrict(&full);
        let hg = Arc::clone(&ar.group);
        // size 4 exceeds the certificate threshold 3, so the reference
        // evaluation takes its unrestricted union-find route
        let tset = smash_power(&hg, 2);
        tset.validate().unwrap();
        let mine = power_eval(&ar, &tset, &ess_tables(&ar, true)).unwrap();
        let reference = evaluate_full(&ar, &tset).unwrap();
        mine.space.validate().unwrap();
        let maps: Vec<Vec<Elem>> = (0..=ar.cap)
            .map(|q| {
                (0..=mine.levels[q].size)
                    .map(|c| {
                        let (j, f, x) = mine.levels[q].rep_generator(c);
                        reference.levels[q].class_of_generator(&ar, q, j, &f, x)
                    })
                    .collect()
            })
            .collect();
        let iso = SSetMap { maps };
        iso.validate(&mine.space, &reference.space, true).unwrap();
        assert!(iso.is_bijective_onto(&reference.space));
    }

    #[test]
    fn trivial_subgroup_gives_the_functor_back() {
        let z2 = FiniteGroup::cyclic(2);
        let free = FiniteGSet::free_orbit(Arc::clone(&z2)).to_pointed();
        let a = representable(&free, 3, 1).unwrap();
        let e = SubgroupRef::trivial(&z2);
        let p = geometric_fixed_points(&a, &e, 3).unwrap();
        p.space.validate_functor(2).unwrap();
        let iso = GammaMap {
            levels: (0..=3)
                .map(|k| SSetMap {
                    maps: (0..=a.cap)
                        .map(|q| {
                            (0..=a.values[k].size(q))
                                .map(|x| {
                                    if x == 0 {
                                        return 0;
                                    }
                                    let idt: Vec<Elem> = (0..=k as Elem).collect();
                                    let cls = p.core.evals[k].levels[q].class_of_generator(
                                        &p.core.ar,
                                        q,
                                        k,
                                        &idt,
                                        x,
                                    );
                                    p.core.project(k, q, cls)
                                })
                                .collect()
                        })
                        .collect(),
                })
                .collect(),
        };
        iso.validate(&p.core.ar, &p.space).unwrap();
        assert!(iso.is_levelwise_bijective(&p.space));
    }

    #[test]
    fn unit_comparison_is_an_isomorphism() {
        let z2 = FiniteGroup::cyclic(2);
        let z3 = FiniteGroup::cyclic(3);
        let picks = [
            (Arc::clone(&z2), SubgroupRef::full(&z2)),
            (Arc::clone(&z2), SubgroupRef::trivial(&z2)),
            (Arc::clone(&z3), SubgroupRef::full(&z3)),
        ];
        for (group, h) in picks {
            let u = unit_fixed_points(&group, &h, 2, 1).unwrap();
            assert!(u.holds);
            u.gfp.space.validate_functor(2).unwrap();
            for k in 0..=2 {
                assert_eq!(u.gfp.space.values[k].size(0), k as u32);
            }
        }
    }

    #[test]
    fn fixed_points_of_the_mod_two_classifying_functor() {
        let em = z2_monoid_space(9);
        let full = SubgroupRef::full(&em.group);
        let p = geometric_fixed_points(&em, &full, 3).unwrap();
        p.space.validate_functor(2).unwrap();
        for k in 0..=3usize {
            // functions on k×k coordinates fixed under transposition are
            // supported on (k² + k)/2 orbits
            let expect = 1u32 << ((k * k + k) / 2);
            assert_eq!(p.space.values[k].size(0) + 1, expect, "level {k}");
        }
        // the level-2 power is the 2×2 square with the swap action: two
        // diagonal points and one free orbit, M^3 = 8 points in total
        assert_eq!(p.space.values[2].size(0) + 1, 8);
    }

    #[test]
    fn lax_comparison_is_natural_and_unital() {
        let z2 = FiniteGroup::cyclic(2);
        let full = SubgroupRef::full(&z2);
        let one = representable(&PointedGSet::trivial(Arc::clone(&z2), 1), 2, 1).unwrap();
        let lx = lax_smash_comparison(&one, &one, &full, 2).unwrap();
        assert!(lx.natural);
        assert!(lx.map.is_levelwise_bijective(&lx.target.space));
        let em = z2_monoid_space(4);
        let lx2 = lax_smash_comparison(&one, &em, &full, 2).unwrap();
        assert!(lx2.natural);
        assert!(lx2.map.is_levelwise_bijective(&lx2.target.space));
    }

    #[test]
    fn collapse_comparison_is_natural_and_injective() {
        let z2 = FiniteGroup::cyclic(2);
        let free = FiniteGSet::free_orbit(Arc::clone(&z2)).to_pointed();
        let cc = collapse_comparison(&free, 2, 1).unwrap();
        assert!(cc.natural);
        for k in 0..=2 {
            assert!(cc.map.levels[k].is_injective());
        }
        let one = PointedGSet::trivial(z2, 1);
        let cc2 = collapse_comparison(&one, 2, 1).unwrap();
        assert!(cc2.natural);
        assert!(cc2.map.is_levelwise_bijective(&cc2.target));
    }

    #[test]
    fn missing_certificate_and_oversize_powers_are_rejected() {
        let em = z2_monoid_space(1);
        let stripped = {
            let inner = em.clone();
            GammaGSpace::new_unchecked(
                Arc::clone(&em.group),
                em.n_max,
                em.cap,
                None,
                em.values.clone(),
                Arc::new(move |f: &BasedMap, q: usize, x: Elem| inner.apply(f, q, x)),
            )
        };
        let full = SubgroupRef::full(&stripped.group);
        match geometric_fixed_points(&stripped, &full, 2) {
            Err(GammaError::SkeletalCertificateMissing { size }) => assert_eq!(size, 4),
            _ => panic!("expected a missing-certificate error"),
        }
        let z4 = FiniteGroup::cyclic(4);
        let wide = eilenberg_maclane(&CommMonoid::z2(Arc::clone(&z4)), 9, 1).unwrap();
        let all = SubgroupRef::full(&z4);
        match geometric_fixed_points(&wide, &all, 3) {
            Err(GammaError::CapTooSmall { needed, cap, .. }) => {
                assert!(needed > cap);
            }
            _ => panic!("expected the 81-point power to overflow the generator cap"),
        }
    }
}
