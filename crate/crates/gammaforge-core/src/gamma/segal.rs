//! Segal maps and the special / very special conditions.
//!
//! The Segal map at a based G-set S⁺ sends A(S⁺) to the S-indexed power of
//! A(1⁺) by applying the collapse maps p_s. Speciality asks that this is an
//! equivalence on H-fixed points for every subgroup and every |S| ≤ n_max;
//! we certify the homological surrogate (an integral homology isomorphism
//! up to a stated degree), which the report records explicitly. The very
//! special condition additionally asks that the monoid structure induced on
//! π₀ of the H-fixed points of A(1⁺) — multiplication through the zigzag
//! A(1⁺) × A(1⁺) ← A(2⁺) → A(1⁺) — is a group.

use crate::colim::UnionFind;
use crate::groups::{Elem, FiniteGSet, PointedGSet, SubgroupRef};
use crate::homology::g_homology_iso_up_to;
use crate::sset::{SSetMap, SimplicialGSet};

use super::eval::{evaluate_full, Evaluation};
use super::{BasedMap, GammaError, GammaGSpace};

/// Strip the basepoint from a pointed G-set.
pub fn unpointed(s: &PointedGSet) -> FiniteGSet {
    let action: Vec<Vec<u32>> = s
        .group
        .elements()
        .map(|g| (1..=s.size).map(|i| s.act(g, i) - 1).collect())
        .collect();
    FiniteGSet::new(s.group.clone(), action).expect("pointed action restricts")
}

pub struct SegalData {
    pub domain: Evaluation,
    pub target: SimplicialGSet,
    pub map: SSetMap,
}

/// The Segal map A(S⁺) → A(1⁺)^{×S}.
pub fn segal_map(a: &GammaGSpace, s: &PointedGSet) -> Result<SegalData, GammaError> {
    if a.n_max < 1 {
        return Err(GammaError::CapTooSmall {
            what: "Segal map needs level 1".into(),
            needed: 1,
            cap: a.n_max,
        });
    }
    let domain = evaluate_full(a, s)?;
    let target = SimplicialGSet::power_product(&a.values[1], &unpointed(s));
    let ssize = s.size as usize;
    let maps: Vec<Vec<Elem>> = (0..=a.cap)
        .map(|q| {
            let radix = a.values[1].size(q) as u64 + 1;
            (0..=domain.levels[q].size(a, q))
                .map(|c| {
                    let (k, f, x) = domain.levels[q].rep_generator(c);
                    let mut out = 0u64;
                    for l in (0..ssize).rev() {
                        // digit l is A(p_{l+1} ∘ f)(x)
                        let mut table = vec![0 as Elem; k + 1];
                        for (i, slot) in table.iter_mut().enumerate().skip(1) {
                            *slot = if f[i] == l as Elem + 1 { 1 } else { 0 };
                        }
                        let psf = BasedMap {
                            source: k,
                            target: 1,
                            table,
                        };
                        out = out * radix + a.apply(&psf, q, x) as u64;
                    }
                    out as Elem
                })
                .collect()
        })
        .collect();
    Ok(SegalData {
        domain,
        target,
        map: SSetMap { maps },
    })
}

/// One tested G-set in a speciality report: the orbit sizes of S and the
/// per-subgroup homology-equivalence verdicts for its Segal map.
pub struct SegalCheck {
    pub orbit_sizes: Vec<usize>,
    pub verdicts: Vec<(Vec<usize>, bool)>,
}

pub struct SpecialReport {
    /// homological surrogate degree the equivalences were checked to
    pub degree: usize,
    pub special: bool,
    pub checks: Vec<SegalCheck>,
}

/// Representatives of the isomorphism classes of transitive G-sets,
/// as subgroups minimal in their conjugacy class.
fn transitive_types(group: &std::sync::Arc<crate::groups::FiniteGroup>) -> Vec<SubgroupRef> {
    let all = crate::groups::subgroups(group);
    let mut reps = Vec::new();
    for h in &all {
        let min_conj = group
            .elements()
            .map(|g| crate::groups::conjugate_subgroup(group, h, g).elements().to_vec())
            .min()
            .unwrap();
        if min_conj == h.elements() {
            reps.push(h.clone());
        }
    }
    reps
}

/// All iso classes of nonempty G-sets of size ≤ max_size, as orbit-type
/// multisets realized by disjoint unions of coset spaces.
fn gsets_up_to(
    group: &std::sync::Arc<crate::groups::FiniteGroup>,
    max_size: usize,
) -> Vec<(Vec<usize>, FiniteGSet)> {
    let types = transitive_types(group);
    let orbits: Vec<FiniteGSet> = types
        .iter()
        .map(|h| FiniteGSet::cosets(group.clone(), h))
        .collect();
    let mut out = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    fn rec(
        orbits: &[FiniteGSet],
        from: usize,
        left: usize,
        stack: &mut Vec<usize>,
        out: &mut Vec<(Vec<usize>, FiniteGSet)>,
    ) {
        if !stack.is_empty() {
            let mut s = orbits[stack[0]].clone();
            for &i in &stack[1..] {
                s = s.disjoint_union(&orbits[i]);
            }
            out.push((stack.iter().map(|&i| orbits[i].size).collect(), s));
        }
        for i in from..orbits.len() {
            if orbits[i].size <= left {
                stack.push(i);
                rec(orbits, i, left - orbits[i].size, stack, out);
                stack.pop();
            }
        }
    }
    rec(&orbits, 0, max_size, &mut stack, &mut out);
    out
}

/// Check the Segal maps of every based G-set with |S| ≤ n_max against the
/// degree-d homology surrogate, per subgroup.
pub fn is_special(a: &GammaGSpace, degree: usize) -> Result<SpecialReport, GammaError> {
    if a.cap < degree + 1 {
        return Err(GammaError::CapTooSmall {
            what: format!("degree-{degree} homology surrogate"),
            needed: degree + 1,
            cap: a.cap,
        });
    }
    let mut checks = Vec::new();
    let mut special = true;
    for (orbit_sizes, s) in gsets_up_to(&a.group, a.n_max) {
        let sp = s.to_pointed();
        let segal = segal_map(a, &sp)?;
        let verdicts = g_homology_iso_up_to(&segal.map, &segal.domain.space, &segal.target, degree)
            .map_err(homology_err)?;
        special &= verdicts.iter().all(|(_, ok)| *ok);
        checks.push(SegalCheck {
            orbit_sizes,
            verdicts,
        });
    }
    Ok(SpecialReport {
        degree,
        special,
        checks,
    })
}

fn homology_err(e: crate::homology::HomologyError) -> GammaError {
    match e {
        crate::homology::HomologyError::CapTooSmall { degree, needed, cap } => {
            GammaError::CapTooSmall {
                what: format!("degree-{degree} homology"),
                needed,
                cap,
            }
        }
    }
}

/// Pointed path components of a simplicial set: class per vertex, with the
/// basepoint's component numbered 0.
fn pi0_classes(x: &SimplicialGSet) -> (Vec<Elem>, u32) {
    let n = x.size(0);
    let mut uf = UnionFind::new(n as usize + 1);
    if x.cap >= 1 {
        for e in 0..=x.size(1) {
            uf.union(x.face(1, 0, e), x.face(1, 1, e));
        }
    }
    let q = uf.quotient(0);
    (q.class_of, q.size)
}

pub struct VerySpecialReport {
    pub special: SpecialReport,
    pub very_special: bool,
    /// per subgroup: elements and whether π₀ of the fixed points of A(1⁺)
    /// is a group under the zigzag multiplication
    pub pi0_groups: Vec<(Vec<usize>, bool)>,
}

pub fn is_very_special(a: &GammaGSpace, degree: usize) -> Result<VerySpecialReport, GammaError> {
    if a.n_max < 2 {
        return Err(GammaError::CapTooSmall {
            what: "very special check needs level 2".into(),
            needed: 2,
            cap: a.n_max,
        });
    }
    let special = is_special(a, degree)?;
    let proj: Vec<BasedMap> = (1..=2)
        .map(|s| BasedMap::collapse_at(s, 2))
        .collect();
    let fold = BasedMap::fold(2);
    let mut pi0_groups = Vec::new();
    let mut very_special = special.special;
    for h in crate::groups::subgroups(&a.group) {
        let (f1, inc1) = a.values[1].fixed_sset(&h);
        let (f2, inc2) = a.values[2].fixed_sset(&h);
        let (pi1, n1) = pi0_classes(&f1);
        let (pi2, n2) = pi0_classes(&f2);
        // class of a fixed vertex of A(1⁺), by original label
        let cls1 = |orig: Elem| -> Elem {
            let pos = inc1[0].binary_search(&orig).expect("image of a fixed point is fixed");
            pi1[pos]
        };
        // the zigzag: each π₀ class of A(2⁺)^H projects to a pair and
        // folds to a product; the projection must be a π₀ bijection
        let pairs = (n1 as u64 + 1) * (n1 as u64 + 1);
        let mut table = vec![Elem::MAX; pairs as usize];
        let mut ok = n2 as u64 + 1 == pairs;
        if ok {
            for (pos, &orig) in inc2[0].iter().enumerate() {
                let w = pi2[pos];
                let u = cls1(a.apply(&proj[0], 0, orig));
                let v = cls1(a.apply(&proj[1], 0, orig));
                let m = cls1(a.apply(&fold, 0, orig));
                let idx = (u as u64 * (n1 as u64 + 1) + v as u64) as usize;
                if table[idx] == Elem::MAX {
                    table[idx] = m;
                } else if table[idx] != m {
                    ok = false; // zigzag not constant on components
                    break;
                }
                let _ = w;
            }
        }
        if ok {
            ok = table.iter().all(|&m| m != Elem::MAX);
        }
        if ok {
            // group check: every class has an inverse (0 is the unit)
            for u in 0..=n1 as u64 {
                let has_inverse = (0..=n1 as u64)
                    .any(|v| table[(u * (n1 as u64 + 1) + v) as usize] == 0);
                if !has_inverse {
                    ok = false;
                    break;
                }
            }
        }
        very_special &= ok;
        pi0_groups.push((h.elements().to_vec(), ok));
    }
    Ok(VerySpecialReport {
        special,
        very_special,
        pi0_groups,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::{eilenberg_maclane, representable, CommMonoid};
    use crate::groups::FiniteGroup;
    use std::sync::Arc;

    #[test]
    fn segal_counts_for_the_unit_representable() {
        // Γ(1⁺,−)(2⁺) has 2 non-base points; the power has 3: not special.
        let g = FiniteGroup::trivial();
        let one = PointedGSet::trivial(Arc::clone(&g), 1);
        let a = representable(&one, 3, 3).unwrap();
        let two = PointedGSet::trivial(Arc::clone(&g), 2);
        let sd = segal_map(&a, &two).unwrap();
        assert_eq!(sd.domain.space.size(0), 2);
        assert_eq!(sd.target.size(0), 3);
        sd.map.validate(&sd.domain.space, &sd.target, true).unwrap();
        let report = is_special(&a, 2).unwrap();
        assert!(!report.special);
    }

    #[test]
    fn eilenberg_maclane_of_a_group_is_very_special() {
        let g = FiniteGroup::trivial();
        let m = CommMonoid::z2(Arc::clone(&g));
        let a = eilenberg_maclane(&m, 3, 3).unwrap();
        let report = is_very_special(&a, 2).unwrap();
        assert!(report.special.special);
        assert!(report.very_special);
    }

    #[test]
    fn saturated_monoid_is_special_but_not_very_special() {
        let g = FiniteGroup::trivial();
        let m = CommMonoid::bool_or(Arc::clone(&g));
        let a = eilenberg_maclane(&m, 3, 3).unwrap();
        let report = is_very_special(&a, 2).unwrap();
        assert!(report.special.special);
        assert!(!report.very_special);
        assert_eq!(report.pi0_groups.len(), 1);
        assert!(!report.pi0_groups[0].1);
    }

    #[test]
    fn equivariant_segal_maps_respect_fixed_points() {
        let z2 = FiniteGroup::cyclic(2);
        let m = CommMonoid::z2(Arc::clone(&z2));
        let a = eilenberg_maclane(&m, 4, 3).unwrap();
        let report = is_very_special(&a, 2).unwrap();
        assert!(report.special.special);
        assert!(report.very_special);
        // subgroups: trivial and full, both groups on π₀
        assert_eq!(report.pi0_groups.len(), 2);
    }

    #[test]
    fn gset_enumeration_counts() {
        let z2 = FiniteGroup::cyclic(2);
        let sets = gsets_up_to(&z2, 4);
        // orbit multisets from {point, free}: 1, 11, 111, 1111, 2, 12, 112, 22
        assert_eq!(sets.len(), 8);
        let g = FiniteGroup::trivial();
        assert_eq!(gsets_up_to(&g, 3).len(), 3);
    }
}
