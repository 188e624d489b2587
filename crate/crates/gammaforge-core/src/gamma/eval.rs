//! Evaluation of a Γ-G-space at arbitrary finite pointed sets and at
//! simplicial sets (degreewise, then diagonal).
//!
//! The value at a pointed set T is the colimit over the category of based
//! maps n⁺ → T⁺, n ≤ K, of the stored values; K is the certified skeletal
//! bound, which is what makes the truncation exact. Generators are pairs
//! (f: n⁺ → T⁺, a ∈ A(n⁺)_q) and relations identify (f∘φ, a) with
//! (f, A(φ)a). When |T| ≤ K the indexing category has a terminal object
//! and the colimit collapses to the stored value A(|T|⁺) carrying the
//! conjugation-twisted G-action; otherwise the closure is computed by
//! union-find. Class numbering follows the least contributing generator,
//! so evaluation is deterministic.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::colim::UnionFind;
use crate::groups::{Elem, GAction, PointedGSet};
use crate::par::maybe_par_range;
use crate::sset::{SSetMap, SimplicialGSet};

use super::{BasedMap, GammaError, GammaGSpace};

/// Largest generator set we are willing to materialize.
const MAX_GENERATORS: u64 = 1 << 28;

/// The union-find presentation of one degree of a coend.
pub struct GenericCoend {
    pub k_max: usize,
    pub t: u32,
    /// sizes[k] = number of non-base degree-q simplices of A(k⁺).
    pub sizes: Vec<u32>,
    /// offsets[k] = first generator index of the object-k block;
    /// offsets[k_max + 1] = total generator count.
    pub offsets: Vec<u64>,
    pub class_of: Vec<Elem>,
    /// rep[c] = least generator in class c (class 0 is the basepoint).
    pub rep: Vec<u32>,
    /// number of non-base classes.
    pub size: u32,
}

impl GenericCoend {
    #[inline]
    fn gen_index(&self, k: usize, f_rank: u64, x: Elem) -> u64 {
        self.offsets[k] + f_rank * (self.sizes[k] as u64 + 1) + x as u64
    }

    fn rank_of(&self, f: &[Elem]) -> u64 {
        let radix = self.t as u64 + 1;
        let mut r = 0u64;
        for &v in f.iter().skip(1).rev() {
            r = r * radix + v as u64;
        }
        r
    }

    pub fn class_of_generator(&self, k: usize, f: &[Elem], x: Elem) -> Elem {
        debug_assert!(k <= self.k_max, "generator object exceeds skeletal bound");
        self.class_of[self.gen_index(k, self.rank_of(f), x) as usize]
    }

    /// Decode the canonical representative of a class to (k, f-table, x).
    pub fn rep_generator(&self, class: Elem) -> (usize, Vec<Elem>, Elem) {
        let g = self.rep[class as usize] as u64;
        let mut k = 0;
        while self.offsets[k + 1] <= g {
            k += 1;
        }
        let rem = g - self.offsets[k];
        let stride = self.sizes[k] as u64 + 1;
        let f_rank = rem / stride;
        let x = (rem % stride) as Elem;
        let radix = self.t as u64 + 1;
        let mut f = vec![0 as Elem; k + 1];
        let mut v = f_rank;
        for fv in f.iter_mut().skip(1) {
            *fv = (v % radix) as Elem;
            v /= radix;
        }
        (k, f, x)
    }
}

/// One simplicial degree of an evaluation: either the terminal-object
/// collapse onto a stored value, or a computed colimit.
pub enum CoendLevel {
    Shortcut { t: usize },
    Generic(Arc<GenericCoend>),
}

impl CoendLevel {
    pub fn size(&self, a: &GammaGSpace, q: usize) -> u32 {
        match self {
            CoendLevel::Shortcut { t } => a.values[*t].size(q),
            CoendLevel::Generic(gc) => gc.size,
        }
    }

    /// The class of the generator (f: k⁺ → T, x ∈ A(k⁺)_q); f is a table
    /// of length k+1 with f[0] = 0 and values in 0..=|T|.
    pub fn class_of_generator(
        &self,
        a: &GammaGSpace,
        q: usize,
        k: usize,
        f: &[Elem],
        x: Elem,
    ) -> Elem {
        match self {
            CoendLevel::Shortcut { t } => {
                let bm = BasedMap {
                    source: k,
                    target: *t,
                    table: f.to_vec(),
                };
                a.apply(&bm, q, x)
            }
            CoendLevel::Generic(gc) => gc.class_of_generator(k, f, x),
        }
    }

    /// Canonical generator of a class: (k, f-table, x).
    pub fn rep_generator(&self, class: Elem) -> (usize, Vec<Elem>, Elem) {
        match self {
            CoendLevel::Shortcut { t } => (*t, (0..=*t as Elem).collect(), class),
            CoendLevel::Generic(gc) => gc.rep_generator(class),
        }
    }
}

/// An evaluated Γ-G-space together with the per-degree coend presentations
/// needed to map out of it.
pub struct Evaluation {
    pub space: SimplicialGSet,
    pub levels: Vec<CoendLevel>,
}

pub(crate) fn build_generic_coend(
    a: &GammaGSpace,
    q: usize,
    t: u32,
    k_max: usize,
) -> Result<GenericCoend, GammaError> {
    let tp1 = t as u64 + 1;
    let sizes: Vec<u32> = (0..=k_max).map(|k| a.values[k].size(q)).collect();
    let mut offsets = vec![0u64; k_max + 2];
    for k in 0..=k_max {
        let block = tp1
            .checked_pow(k as u32)
            .and_then(|m| m.checked_mul(sizes[k] as u64 + 1))
            .ok_or_else(|| too_large(t))?;
        offsets[k + 1] = offsets[k].checked_add(block).ok_or_else(|| too_large(t))?;
    }
    let total = offsets[k_max + 1];
    if total > MAX_GENERATORS || total > u32::MAX as u64 {
        return Err(too_large(t));
    }
    let mut uf = UnionFind::new(total as usize);
    for n in 0..=k_max {
        // A(φ) tables for every φ: k⁺ → n⁺, k ≤ k_max
        let phis: Vec<Vec<(Vec<Elem>, Vec<Elem>)>> = (0..=k_max)
            .map(|k| {
                BasedMap::all(k, n)
                    .into_iter()
                    .map(|phi| {
                        let act: Vec<Elem> =
                            (0..=sizes[k]).map(|x| a.apply(&phi, q, x)).collect();
                        (phi.table, act)
                    })
                    .collect()
            })
            .collect();
        let f_count = tp1.pow(n as u32);
        let stride_n = sizes[n] as u64 + 1;
        let mut f_table = vec![0u64; n + 1];
        for f_rank in 0..f_count {
            let mut v = f_rank;
            for fv in f_table.iter_mut().skip(1) {
                *fv = v % tp1;
                v /= tp1;
            }
            let tgt_base = offsets[n] + f_rank * stride_n;
            for (k, phis_k) in phis.iter().enumerate() {
                let stride_k = sizes[k] as u64 + 1;
                for (phi_table, act) in phis_k {
                    let mut r = 0u64;
                    for i in (1..=k).rev() {
                        r = r * tp1 + f_table[phi_table[i] as usize];
                    }
                    let src_base = offsets[k] + r * stride_k;
                    for (x, &ax) in act.iter().enumerate() {
                        uf.union((src_base + x as u64) as u32, (tgt_base + ax as u64) as u32);
                    }
                }
            }
        }
    }
    let quot = uf.quotient(0);
    Ok(GenericCoend {
        k_max,
        t,
        sizes,
        offsets,
        class_of: quot.class_of,
        rep: quot.rep,
        size: quot.size,
    })
}

fn too_large(t: u32) -> GammaError {
    GammaError::Invalid {
        reason: format!("coend at a set of size {t} has too many generators"),
    }
}

/// Evaluate at a finite pointed G-set.
pub fn evaluate(a: &GammaGSpace, t: &PointedGSet) -> Result<SimplicialGSet, GammaError> {
    Ok(evaluate_full(a, t)?.space)
}

pub fn evaluate_full(a: &GammaGSpace, t: &PointedGSet) -> Result<Evaluation, GammaError> {
    evaluate_simplicial_full(a, &SimplicialGSet::discrete(t, a.cap))
}

/// Evaluate degreewise at a simplicial G-set and take the diagonal.
pub fn evaluate_simplicial(
    a: &GammaGSpace,
    x: &SimplicialGSet,
) -> Result<SimplicialGSet, GammaError> {
    Ok(evaluate_simplicial_full(a, x)?.space)
}

pub fn evaluate_simplicial_full(
    a: &GammaGSpace,
    x: &SimplicialGSet,
) -> Result<Evaluation, GammaError> {
    if a.cap != x.cap {
        return Err(GammaError::Invalid {
            reason: format!("cap mismatch: Γ-space {} vs argument {}", a.cap, x.cap),
        });
    }
    if a.group.order() != x.group.order() {
        return Err(GammaError::Invalid {
            reason: "group mismatch between Γ-space and argument".into(),
        });
    }
    let threshold = a.skeletal.unwrap_or(a.n_max);
    for q in 0..=a.cap {
        let t = x.size(q) as usize;
        if t > threshold && a.skeletal.is_none() {
            return Err(GammaError::SkeletalCertificateMissing { size: t });
        }
    }
    let discrete = a.is_discrete();
    // degrees are independent; build the expensive closures in parallel,
    // sharing work across equal-size degrees when the values are constant
    let levels: Vec<CoendLevel> = if discrete {
        let mut cache: BTreeMap<u32, Arc<GenericCoend>> = BTreeMap::new();
        let mut out = Vec::with_capacity(a.cap + 1);
        for q in 0..=a.cap {
            let t = x.size(q);
            if t as usize <= threshold {
                out.push(CoendLevel::Shortcut { t: t as usize });
            } else if let Some(gc) = cache.get(&t) {
                out.push(CoendLevel::Generic(Arc::clone(gc)));
            } else {
                let gc = Arc::new(build_generic_coend(a, 0, t, threshold)?);
                cache.insert(t, Arc::clone(&gc));
                out.push(CoendLevel::Generic(gc));
            }
        }
        out
    } else {
        let built: Vec<Result<CoendLevel, GammaError>> = maybe_par_range(a.cap + 1, |q| {
            let t = x.size(q);
            if t as usize <= threshold {
                Ok(CoendLevel::Shortcut { t: t as usize })
            } else {
                Ok(CoendLevel::Generic(Arc::new(build_generic_coend(
                    a, q, t, threshold,
                )?)))
            }
        });
        built.into_iter().collect::<Result<Vec<_>, _>>()?
    };

    // one degree-q class pushed through (post, on_a) into degree q2
    let push = |q: usize, class: Elem, post: &dyn Fn(Elem) -> Elem, q2: usize, on_a: &dyn Fn(
        usize,
        Elem,
    ) -> Elem|
     -> Elem {
        let (k, f, xx) = levels[q].rep_generator(class);
        let f2: Vec<Elem> = f.iter().map(|&v| post(v)).collect();
        levels[q2].class_of_generator(a, q2, k, &f2, on_a(k, xx))
    };

    let cap = a.cap;
    let group = Arc::clone(&a.group);
    let mut lv = Vec::with_capacity(cap + 1);
    let mut faces = Vec::with_capacity(cap + 1);
    let mut degens = Vec::with_capacity(cap + 1);
    for q in 0..=cap {
        let size = levels[q].size(a, q);
        let trivial = group.is_trivial()
            || (x.levels[q].has_trivial_action()
                && (0..=threshold).all(|k| a.values[k].levels[q].has_trivial_action()));
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
                                    &|v| x.levels[q].act(g, v),
                                    q,
                                    &|k, xx| a.values[k].act(g, q, xx),
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
        let fq: Vec<Vec<Elem>> = if q == 0 {
            vec![]
        } else {
            (0..=q)
                .map(|i| {
                    (0..=size)
                        .map(|c| {
                            push(
                                q,
                                c,
                                &|v| x.face(q, i, v),
                                q - 1,
                                &|k, xx| a.values[k].face(q, i, xx),
                            )
                        })
                        .collect()
                })
                .collect()
        };
        faces.push(fq);
        let dq: Vec<Vec<Elem>> = if q == cap {
            vec![]
        } else {
            (0..=q)
                .map(|i| {
                    (0..=size)
                        .map(|c| {
                            push(
                                q,
                                c,
                                &|v| x.degen(q, i, v),
                                q + 1,
                                &|k, xx| a.values[k].degen(q, i, xx),
                            )
                        })
                        .collect()
                })
                .collect()
        };
        degens.push(dq);
    }
    let space = SimplicialGSet::new(group, cap, lv, faces, degens);
    Ok(Evaluation { space, levels })
}

/// The map A(f): A(X) → A(Y) induced by a simplicial map, on the given
/// evaluations.
pub fn evaluate_map(
    a: &GammaGSpace,
    src: &Evaluation,
    dst: &Evaluation,
    f: &SSetMap,
) -> SSetMap {
    let maps = (0..=a.cap)
        .map(|q| {
            (0..=src.levels[q].size(a, q))
                .map(|c| {
                    let (k, ft, xx) = src.levels[q].rep_generator(c);
                    let f2: Vec<Elem> = ft.iter().map(|&v| f.apply(q, v)).collect();
                    dst.levels[q].class_of_generator(a, q, k, &f2, xx)
                })
                .collect()
        })
        .collect();
    SSetMap { maps }
}

/// Machine-check that the canonical map sk_k A → A is an isomorphism on
/// every stored level, and record the certificate.
pub(crate) fn certify_skeletal(
    mut a: GammaGSpace,
    k: usize,
) -> Result<GammaGSpace, GammaError> {
    if k > a.n_max {
        return Err(GammaError::Invalid {
            reason: format!("skeletal bound {k} exceeds stored levels {}", a.n_max),
        });
    }
    let discrete = a.is_discrete();
    for m in (k + 1)..=a.n_max {
        let degrees = if discrete { 1 } else { a.cap + 1 };
        for q in 0..degrees {
            let gc = build_generic_coend(&a, q, m as u32, k)?;
            let target_size = a.values[m].size(q);
            if gc.size != target_size {
                return Err(GammaError::Invalid {
                    reason: format!(
                        "skeletal certificate fails at level {m}: colimit has {} classes, value has {}",
                        gc.size, target_size
                    ),
                });
            }
            let mut seen = vec![false; target_size as usize + 1];
            for c in 0..=gc.size {
                let (j, f, x) = gc.rep_generator(c);
                let bm = BasedMap {
                    source: j,
                    target: m,
                    table: f,
                };
                let image = a.apply(&bm, q, x);
                if (c == 0) != (image == 0) || seen[image as usize] {
                    return Err(GammaError::Invalid {
                        reason: format!(
                            "skeletal certificate fails at level {m}: canonical map is not a bijection"
                        ),
                    });
                }
                seen[image as usize] = true;
            }
        }
    }
    a.skeletal = Some(k);
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::{eilenberg_maclane, representable, CommMonoid};
    use crate::groups::{FiniteGSet, FiniteGroup, SubgroupRef};
    use crate::homology::{reduced_homology, HomologyGroup};
    use num_bigint::BigInt;

    #[test]
    fn representable_evaluation_is_a_power() {
        // Γ(S⁺,−)(T⁺) ≅ (T⁺)^{×S}; with |T| > |S| this exercises the
        // generic closure, not the terminal collapse.
        let g = FiniteGroup::trivial();
        let s = PointedGSet::trivial(Arc::clone(&g), 2);
        let a = representable(&s, 3, 1).unwrap();
        let t = PointedGSet::trivial(Arc::clone(&g), 3);
        let ev = evaluate_full(&a, &t).unwrap();
        assert!(matches!(ev.levels[0], CoendLevel::Generic(_)));
        assert_eq!(ev.space.size(0), 15); // 4² − 1
        // explicit comparison: class of (f, x) ↦ the tuple s ↦ f(x(s))
        let mut seen = vec![false; 16];
        for c in 0..=ev.space.size(0) {
            let (k, f, x) = ev.levels[0].rep_generator(c);
            // x encodes a based map S⁺ → k⁺ in base k+1 digits
            let radix = k as u64 + 1;
            let mut v = x as u64;
            let mut tuple = 0u64;
            let mut mult = 1u64;
            for _ in 0..2 {
                let digit = (v % radix) as usize;
                v /= radix;
                tuple += f[digit] as u64 * mult;
                mult *= 4;
            }
            assert!(!seen[tuple as usize], "duplicate tuple for class {c}");
            seen[tuple as usize] = true;
            assert_eq!(c == 0, tuple == 0);
        }
        assert!(seen.iter().all(|&b| b));
    }

    #[test]
    fn equivariant_evaluation_twists_the_action() {
        // EM(Z/2 with trivial action) at the free Z/2-orbit: conjugation
        // permutes the two coordinates, so exactly (1,1) is fixed.
        let z2 = FiniteGroup::cyclic(2);
        let m = CommMonoid::z2(Arc::clone(&z2));
        let a = eilenberg_maclane(&m, 3, 1).unwrap();
        let t = FiniteGSet::free_orbit(Arc::clone(&z2)).to_pointed();
        let ev = evaluate(&a, &t).unwrap();
        assert_eq!(ev.size(0), 3);
        let fixed = ev.levels[0].fixed_elems(&SubgroupRef::full(&z2));
        assert_eq!(fixed, vec![3]); // only the diagonal (1,1)
    }

    #[test]
    fn unit_representable_evaluates_to_the_argument() {
        let g = FiniteGroup::trivial();
        let one = PointedGSet::trivial(Arc::clone(&g), 1);
        let a = representable(&one, 3, 3).unwrap();
        let circle = SimplicialGSet::circle(Arc::clone(&g), 3);
        let ev = evaluate_simplicial(&a, &circle).unwrap();
        for q in 0..=3 {
            assert_eq!(ev.size(q), circle.size(q));
        }
        let h = reduced_homology(&ev, 1).unwrap();
        assert_eq!(
            h[1],
            HomologyGroup {
                rank: 1,
                torsion: vec![]
            }
        );
    }

    #[test]
    fn eilenberg_maclane_on_the_circle_is_a_classifying_space() {
        let g = FiniteGroup::trivial();
        let m = CommMonoid::z2(Arc::clone(&g));
        let a = eilenberg_maclane(&m, 9, 3).unwrap();
        let circle = SimplicialGSet::circle(Arc::clone(&g), 3);
        let ev = evaluate_simplicial(&a, &circle).unwrap();
        // degree q has M^(q non-base simplices): 2^q − 1 non-base points
        assert_eq!(ev.size(2), 3);
        assert_eq!(ev.size(3), 7);
        let h = reduced_homology(&ev, 2).unwrap();
        assert_eq!(h[1].rank, 0);
        assert_eq!(h[1].torsion, vec![BigInt::from(2)]);
        assert!(h[2].is_zero());
        assert!(h[0].is_zero());
    }

    #[test]
    fn missing_certificate_is_reported() {
        let g = FiniteGroup::trivial();
        let one = PointedGSet::trivial(Arc::clone(&g), 1);
        let a = representable(&one, 2, 1).unwrap();
        let stripped = GammaGSpace::new_unchecked(
            Arc::clone(&a.group),
            a.n_max,
            a.cap,
            None,
            a.values.clone(),
            a.rule(),
        );
        let t = PointedGSet::trivial(g, 5);
        assert_eq!(
            evaluate(&stripped, &t).unwrap_err(),
            GammaError::SkeletalCertificateMissing { size: 5 }
        );
    }

    #[test]
    fn false_skeletal_claims_are_rejected() {
        // HM is not 1-skeletal: sk_1 HM(2⁺) misses (1,1)
        let g = FiniteGroup::trivial();
        let m = CommMonoid::z2(Arc::clone(&g));
        let a = eilenberg_maclane(&m, 2, 1).unwrap();
        let bare = GammaGSpace::new_unchecked(
            Arc::clone(&a.group),
            a.n_max,
            a.cap,
            None,
            a.values.clone(),
            a.rule(),
        );
        let err = certify_skeletal(bare, 1).unwrap_err();
        assert!(matches!(err, GammaError::Invalid { .. }));
    }

    #[test]
    fn evaluate_map_collapses_functorially() {
        let g = FiniteGroup::trivial();
        let m = CommMonoid::z2(Arc::clone(&g));
        let a = eilenberg_maclane(&m, 9, 2).unwrap();
        let circle = SimplicialGSet::circle(Arc::clone(&g), 2);
        let point = SimplicialGSet::point(Arc::clone(&g), 2);
        let ev_c = evaluate_simplicial_full(&a, &circle).unwrap();
        let ev_p = evaluate_simplicial_full(&a, &point).unwrap();
        let collapse = SSetMap::constant(&circle);
        let induced = evaluate_map(&a, &ev_c, &ev_p, &collapse);
        induced
            .validate(&ev_c.space, &ev_p.space, true)
            .unwrap();
        // identity induces identity
        let id = SSetMap::identity(&circle);
        let ind_id = evaluate_map(&a, &ev_c, &ev_c, &id);
        for q in 0..=2 {
            for x in 0..=ev_c.space.size(q) {
                assert_eq!(ind_id.apply(q, x), x);
            }
        }
    }
}
