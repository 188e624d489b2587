//! The pushout-product of two strict cofibrations of discrete Γ-G-sets is
//! again a strict cofibration, checked on fixed instances and on seeded
//! random combinations of the generating cofibrations.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gammaforge_core::gamma::skeleta::is_strict_cofibration_discrete;
use gammaforge_core::gamma::smash::{gamma_pushout, smash_full, smash_map};
use gammaforge_core::gamma::{representable, BasedMap, GammaGSpace, GammaMap};
use gammaforge_core::groups::{FiniteGSet, FiniteGroup, PointedGSet};
use gammaforge_core::sset::SSetMap;

const LEVELS: usize = 2;
const CAP: usize = 1;

fn rep(s: &PointedGSet) -> GammaGSpace {
    representable(s, LEVELS, CAP).unwrap()
}

/// The map Γ(S'⁺, −) → Γ(S⁺, −) precomposing with u: S⁺ → S'⁺.
fn yoneda(u: &BasedMap, src: &GammaGSpace, dst: &GammaGSpace) -> GammaMap {
    let levels = (0..=src.n_max)
        .map(|n| SSetMap {
            maps: (0..=src.cap)
                .map(|q| {
                    (0..=src.value(n).size(q))
                        .map(|x| {
                            if x == 0 {
                                return 0;
                            }
                            let phi = BasedMap::from_rank(u.target, n, x as u64);
                            u.then(&phi).rank() as u32
                        })
                        .collect()
                })
                .collect(),
        })
        .collect();
    let m = GammaMap { levels };
    m.validate(src, dst).unwrap();
    m
}

/// Corner construction: for i: A → B and j: C → D, the induced map
/// (A∧D) ∪_{A∧C} (B∧C) → B∧D.
fn pushout_product(
    i: (&GammaGSpace, &GammaGSpace, &GammaMap),
    j: (&GammaGSpace, &GammaGSpace, &GammaMap),
) -> (GammaGSpace, GammaGSpace, GammaMap) {
    let (a, b, fi) = i;
    let (c, d, fj) = j;
    let sac = smash_full(a, c, LEVELS).unwrap();
    let sad = smash_full(a, d, LEVELS).unwrap();
    let sbc = smash_full(b, c, LEVELS).unwrap();
    let sbd = smash_full(b, d, LEVELS).unwrap();
    let (ida, idb) = (GammaMap::identity(a), GammaMap::identity(b));
    let (idc, idd) = (GammaMap::identity(c), GammaMap::identity(d));
    let up = smash_map(&sac, &sad, &ida, fj);
    let over = smash_map(&sac, &sbc, fi, &idc);
    let p = gamma_pushout(&sac.space, &sad.space, &sbc.space, &up, &over).unwrap();
    let north = smash_map(&sad, &sbd, fi, &idd);
    let east = smash_map(&sbc, &sbd, &idb, fj);
    let pp = p.induced(&north, &east);
    pp.validate(&p.space, &sbd.space).unwrap();
    (p.space, sbd.space, pp)
}

#[test]
fn corner_map_of_two_diagonals_is_a_strict_cofibration() {
    let tg = FiniteGroup::trivial();
    let r1 = rep(&PointedGSet::trivial(Arc::clone(&tg), 1));
    let r2 = rep(&PointedGSet::trivial(Arc::clone(&tg), 2));
    let diag = yoneda(&BasedMap::fold(2), &r1, &r2);
    assert!(is_strict_cofibration_discrete(&r1, &r2, &diag)
        .unwrap()
        .strict);
    let (q, bd, pp) = pushout_product((&r1, &r2, &diag), (&r1, &r2, &diag));
    assert!(is_strict_cofibration_discrete(&q, &bd, &pp).unwrap().strict);
}

#[test]
fn corner_map_from_the_point_recovers_cofibrancy_of_the_smash() {
    // when both inputs start at the point, the corner map is
    // point → B ∧ D, i.e. strictness of the smash itself
    let z2 = FiniteGroup::cyclic(2);
    let free = FiniteGSet::free_orbit(Arc::clone(&z2)).to_pointed();
    let b = rep(&free);
    let d = rep(&PointedGSet::trivial(Arc::clone(&z2), 2));
    let pt = GammaGSpace::point(Arc::clone(&z2), LEVELS, CAP);
    let into_b = GammaMap::constant(&pt);
    let into_d = GammaMap::constant(&pt);
    let (q, bd, pp) = pushout_product((&pt, &b, &into_b), (&pt, &d, &into_d));
    let report = is_strict_cofibration_discrete(&q, &bd, &pp).unwrap();
    assert!(report.strict);
    assert!(report.levels.iter().all(|l| l.witness.is_none()));
}

fn instance(group: &Arc<FiniteGroup>, pick: u32) -> (GammaGSpace, GammaGSpace, GammaMap) {
    match pick {
        0 | 1 => {
            let size = pick + 1;
            let b = rep(&PointedGSet::trivial(Arc::clone(group), size));
            let a = GammaGSpace::point(Arc::clone(group), LEVELS, CAP);
            let m = GammaMap::constant(&a);
            (a, b, m)
        }
        2 if group.order() == 2 => {
            let free = FiniteGSet::free_orbit(Arc::clone(group)).to_pointed();
            let b = rep(&free);
            let a = GammaGSpace::point(Arc::clone(group), LEVELS, CAP);
            let m = GammaMap::constant(&a);
            (a, b, m)
        }
        _ => {
            let r1 = rep(&PointedGSet::trivial(Arc::clone(group), 1));
            let r2 = rep(&PointedGSet::trivial(Arc::clone(group), 2));
            let m = yoneda(&BasedMap::fold(2), &r1, &r2);
            (r1, r2, m)
        }
    }
}

#[test]
fn seeded_random_corner_maps_stay_strict() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for round in 0..6 {
        let group = if rng.gen_bool(0.5) {
            FiniteGroup::cyclic(2)
        } else {
            FiniteGroup::trivial()
        };
        let i = instance(&group, rng.gen_range(0..4));
        let j = instance(&group, rng.gen_range(0..4));
        assert!(
            is_strict_cofibration_discrete(&i.0, &i.1, &i.2).unwrap().strict,
            "left input of round {round}"
        );
        assert!(
            is_strict_cofibration_discrete(&j.0, &j.1, &j.2).unwrap().strict,
            "right input of round {round}"
        );
        let (q, bd, pp) = pushout_product((&i.0, &i.1, &i.2), (&j.0, &j.1, &j.2));
        assert!(
            is_strict_cofibration_discrete(&q, &bd, &pp).unwrap().strict,
            "corner map of round {round}"
        );
    }
}
