//! Skeleta and coskeleta of Γ-G-spaces, the latching/matching squares built
//! from them, strict cofibrations and cell decompositions of discrete
//! Γ-G-sets, and the pushout/pullback squares that control level-by-level
//! extension of maps.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::colim::{pointed_pullback, pointed_pushout};
use crate::groups::{
    isotropy_in_family_gn, left_cosets, subgroup_as_group, Elem, FamilyReport, FiniteGroup,
    GAction, PointedGSet, SubgroupRef, SymmetricGroup,
};
use crate::sset::{SSetMap, SimplicialGSet};

use super::eval::{certify_skeletal, evaluate_full, Evaluation};
use super::{
    induced_representable, BasedMap, GammaError, GammaGSpace, GammaMap, GammaRule,
};

/// Hard ceiling on enumerated limit/mapping-space sizes.
const MAX_FAMILIES: usize = 1 << 22;

fn gerr(e: impl std::fmt::Display) -> GammaError {
    GammaError::Invalid {
        reason: e.to_string(),
    }
}

/// Restrict the stored levels to 0..=n.  The truncation is trivially
/// n-skeletal as a truncated functor, which is what the evaluator needs.
pub(crate) fn truncate(a: &GammaGSpace, n: usize) -> GammaGSpace {
    GammaGSpace {
        group: a.group.clone(),
        n_max: n,
        cap: a.cap,
        skeletal: Some(n),
        values: a.values[..=n].to_vec(),
        rule: a.rule(),
    }
}

/// First level whose value is not a constant simplicial set, if any.
pub(crate) fn discrete_violation(a: &GammaGSpace) -> Option<usize> {
    (0..=a.n_max).find(|&m| {
        let v = &a.values[m];
        (0..=a.cap).any(|q| v.size(q) != v.size(0))
            || (1..=a.cap).any(|q| (0..=v.size(q)).any(|x| v.face(q, 0, x) != x))
    })
}

/// The permutation σ as a based self-map of n⁺.
fn sigma_map(sym: &SymmetricGroup, s: usize, n: usize) -> BasedMap {
    let perm = sym.perm(s);
    let mut table = vec![0 as Elem; n + 1];
    for i in 1..=n {
        table[i] = perm[i - 1] as Elem + 1;
    }
    BasedMap {
        source: n,
        target: n,
        table,
    }
}

/// A table being filled from several presentations at once; disagreement
/// between the presentations is recorded instead of panicking.
struct Fill {
    table: Vec<Elem>,
    ok: bool,
}

impl Fill {
    fn new(len: usize) -> Self {
        let mut table = vec![Elem::MAX; len];
        if !table.is_empty() {
            table[0] = 0;
        }
        Fill { table, ok: true }
    }

    fn set(&mut self, i: Elem, v: Elem) {
        let slot = &mut self.table[i as usize];
        if *slot == Elem::MAX {
            *slot = v;
        } else if *slot != v {
            self.ok = false;
        }
    }

    fn complete(&self) -> bool {
        self.ok && self.table.iter().all(|&v| v != Elem::MAX)
    }
}

/// 0 ↦ 0, every other entry distinct and non-base, counts equal.
fn table_bijective(t: &[Elem], target_size: u32) -> bool {
    if t.len() != target_size as usize + 1 || t[0] != 0 {
        return false;
    }
    let mut seen = vec![false; target_size as usize + 1];
    for &v in &t[1..] {
        if v == 0 || seen[v as usize] {
            return false;
        }
        seen[v as usize] = true;
    }
    true
}

// ---------------------------------------------------------------------------
// skeleta
// ---------------------------------------------------------------------------

/// The n-skeleton of a Γ-G-space: at each level m⁺ the colimit of A over
/// the based maps k⁺ → m⁺ with k ≤ n, together with the canonical map back
/// into A.  Levels m ≤ n keep their original labels.
pub struct SkeletonData {
    pub space: GammaGSpace,
    /// canonical map sk_n A → A
    pub counit: GammaMap,
    pub bound: usize,
    base: GammaGSpace,
    evals: Vec<Arc<Evaluation>>,
}

impl SkeletonData {
    /// Class of the generator (f: k⁺ → m⁺, x ∈ A(k⁺)_q), k ≤ bound.
    pub fn class_of(&self, m: usize, q: usize, k: usize, f: &[Elem], x: Elem) -> Elem {
        self.evals[m].levels[q].class_of_generator(&self.base, q, k, f, x)
    }

    /// Canonical generator (k, f-table, x) of a class.
    pub fn rep(&self, m: usize, q: usize, c: Elem) -> (usize, Vec<Elem>, Elem) {
        self.evals[m].levels[q].rep_generator(c)
    }
}

pub fn skeleton(a: &GammaGSpace, n: usize) -> Result<SkeletonData, GammaError> {
    if n > a.n_max {
        return Err(GammaError::CapTooSmall {
            what: "skeleton bound".into(),
            needed: n,
            cap: a.n_max,
        });
    }
    let base = truncate(a, n);
    let mut evals = Vec::with_capacity(a.n_max + 1);
    for m in 0..=a.n_max {
        let t = PointedGSet::trivial(a.group.clone(), m as u32);
        evals.push(Arc::new(evaluate_full(&base, &t)?));
    }
    let values: Vec<SimplicialGSet> = evals.iter().map(|e| e.space.clone()).collect();
    let rule: GammaRule = {
        let base = base.clone();
        let evals = evals.clone();
        Arc::new(move |psi, q, x| {
            let (k, f, xx) = evals[psi.source].levels[q].rep_generator(x);
            let f2: Vec<Elem> = f.iter().map(|&v| psi.apply(v)).collect();
            evals[psi.target].levels[q].class_of_generator(&base, q, k, &f2, xx)
        })
    };
    let space = GammaGSpace {
        group: a.group.clone(),
        n_max: a.n_max,
        cap: a.cap,
        skeletal: None,
        values,
        rule,
    };
    let space = certify_skeletal(space, n)?;
    let levels = (0..=a.n_max)
        .map(|m| {
            let maps = (0..=a.cap)
                .map(|q| {
                    (0..=evals[m].levels[q].size(&base, q))
                        .map(|c| {
                            let (k, f, xx) = evals[m].levels[q].rep_generator(c);
                            let bm = BasedMap {
                                source: k,
                                target: m,
                                table: f,
                            };
                            a.apply(&bm, q, xx)
                        })
                        .collect()
                })
                .collect();
            SSetMap { maps }
        })
        .collect();
    Ok(SkeletonData {
        space,
        counit: GammaMap { levels },
        bound: n,
        base,
        evals,
    })
}

/// Level-m component of sk(f) for a map f given on levels 0..=bound.
pub fn skeleton_map(ska: &SkeletonData, skb: &SkeletonData, f: &GammaMap, m: usize) -> SSetMap {
    assert_eq!(ska.bound, skb.bound, "skeleton bounds must agree");
    let maps = (0..=ska.base.cap)
        .map(|q| {
            (0..=ska.evals[m].levels[q].size(&ska.base, q))
                .map(|c| {
                    let (k, ft, x) = ska.rep(m, q, c);
                    skb.class_of(m, q, k, &ft, f.levels[k].apply(q, x))
                })
                .collect()
        })
        .collect();
    SSetMap { maps }
}

// ---------------------------------------------------------------------------
// coskeleta
// ---------------------------------------------------------------------------

/// The limit presentation of one coskeleton level: compatible families
/// indexed by the epis m⁺ ↠ j⁺ with j ≤ bound (values on arbitrary maps are
/// forced by the epi-mono factorization).
pub struct LevelLimit {
    pub epis: Vec<BasedMap>,
    index: BTreeMap<(usize, u64), usize>,
    /// per degree, the lex-sorted family vectors; position 0 is the base family
    pub lists: Vec<Vec<Vec<Elem>>>,
}

impl LevelLimit {
    fn epi_index(&self, e: &BasedMap) -> usize {
        self.index[&(e.target, e.rank())]
    }

    fn find(&self, q: usize, v: &[Elem]) -> Option<Elem> {
        self.lists[q]
            .binary_search_by(|probe| probe.as_slice().cmp(v))
            .ok()
            .map(|p| p as Elem)
    }
}

struct Constraint {
    at: usize,
    src: usize,
    dst: usize,
    via_src: Vec<Elem>,
    via_dst: Vec<Elem>,
}

fn search_families(
    p: usize,
    sizes: &[u32],
    by_at: &[Vec<usize>],
    cons: &[Constraint],
    assign: &mut Vec<Elem>,
    out: &mut Vec<Vec<Elem>>,
) -> Result<(), GammaError> {
    if p == sizes.len() {
        if out.len() >= MAX_FAMILIES {
            return Err(GammaError::Invalid {
                reason: "coskeleton level exceeds the enumeration ceiling".into(),
            });
        }
        out.push(assign.clone());
        return Ok(());
    }
    for v in 0..=sizes[p] {
        assign[p] = v;
        let ok = by_at[p].iter().all(|&ci| {
            let c = &cons[ci];
            c.via_dst[assign[c.dst] as usize] == c.via_src[assign[c.src] as usize]
        });
        if ok {
            search_families(p + 1, sizes, by_at, cons, assign, out)?;
        }
    }
    assign[p] = 0;
    Ok(())
}

fn build_level_limit(a: &GammaGSpace, m: usize, bound: usize) -> Result<LevelLimit, GammaError> {
    let mut epis: Vec<BasedMap> = Vec::new();
    for j in 0..=bound {
        epis.extend(BasedMap::all_surjective(m, j));
    }
    let index: BTreeMap<(usize, u64), usize> = epis
        .iter()
        .enumerate()
        .map(|(i, e)| ((e.target, e.rank()), i))
        .collect();
    let mut lists = Vec::with_capacity(a.cap + 1);
    for q in 0..=a.cap {
        let mut cons: Vec<Constraint> = Vec::new();
        for (si, e) in epis.iter().enumerate() {
            let j = e.target;
            for j2 in 0..=bound {
                for theta in BasedMap::all(j, j2) {
                    if j == j2 && theta.table.iter().enumerate().all(|(i, &v)| v as usize == i) {
                        continue;
                    }
                    let te = e.then(&theta);
                    let (epi, mono) = te.epi_mono();
                    let di = index[&(epi.target, epi.rank())];
                    let via_src = (0..=a.values[j].size(q))
                        .map(|x| a.apply(&theta, q, x))
                        .collect();
                    let via_dst = (0..=a.values[epi.target].size(q))
                        .map(|x| a.apply(&mono, q, x))
                        .collect();
                    cons.push(Constraint {
                        at: si.max(di),
                        src: si,
                        dst: di,
                        via_src,
                        via_dst,
                    });
                }
            }
        }
        let mut by_at: Vec<Vec<usize>> = vec![Vec::new(); epis.len()];
        for (ci, c) in cons.iter().enumerate() {
            by_at[c.at].push(ci);
        }
        let sizes: Vec<u32> = epis.iter().map(|e| a.values[e.target].size(q)).collect();
        let mut assign = vec![0 as Elem; epis.len()];
        let mut out = Vec::new();
        search_families(0, &sizes, &by_at, &cons, &mut assign, &mut out)?;
        lists.push(out);
    }
    Ok(LevelLimit { epis, index, lists })
}

/// The n-coskeleton of a Γ-G-space: at each level m⁺ the limit of A over
/// the based maps m⁺ → j⁺ with j ≤ n, together with the canonical map from
/// A.  Levels m ≤ n keep their original labels.
pub struct CoskeletonData {
    pub space: GammaGSpace,
    /// canonical map A → csk_n A
    pub unit: GammaMap,
    pub bound: usize,
    base: GammaGSpace,
    families: Vec<Option<Arc<LevelLimit>>>,
}

fn family_component(
    base: &GammaGSpace,
    families: &[Option<Arc<LevelLimit>>],
    m: usize,
    q: usize,
    x: Elem,
    phi: &BasedMap,
) -> Elem {
    match &families[m] {
        None => base.apply(phi, q, x),
        Some(ll) => {
            let (e, mono) = phi.epi_mono();
            let xe = ll.lists[q][x as usize][ll.epi_index(&e)];
            base.apply(&mono, q, xe)
        }
    }
}

impl CoskeletonData {
    /// Value of the element x of (csk A)(m⁺)_q on a based map φ: m⁺ → j⁺,
    /// j ≤ bound.
    pub fn component(&self, m: usize, q: usize, x: Elem, phi: &BasedMap) -> Elem {
        family_component(&self.base, &self.families, m, q, x, phi)
    }

    pub fn family_list(&self, m: usize) -> Option<&LevelLimit> {
        self.families[m].as_deref()
    }
}

pub fn coskeleton(a: &GammaGSpace, n: usize) -> Result<CoskeletonData, GammaError> {
    if n > a.n_max {
        return Err(GammaError::CapTooSmall {
            what: "coskeleton bound".into(),
            needed: n,
            cap: a.n_max,
        });
    }
    let base = truncate(a, n);
    let mut families: Vec<Option<Arc<LevelLimit>>> = Vec::with_capacity(a.n_max + 1);
    for m in 0..=a.n_max {
        if m <= n {
            families.push(None);
        } else {
            families.push(Some(Arc::new(build_level_limit(a, m, n)?)));
        }
    }
    let mut values = Vec::with_capacity(a.n_max + 1);
    for m in 0..=a.n_max {
        match &families[m] {
            None => values.push(a.values[m].clone()),
            Some(ll) => {
                let mut levels = Vec::with_capacity(a.cap + 1);
                for q in 0..=a.cap {
                    let list = &ll.lists[q];
                    let size = (list.len() - 1) as u32;
                    let table: Vec<Vec<Elem>> = a
                        .group
                        .elements()
                        .map(|g| {
                            (0..list.len())
                                .map(|x| {
                                    let moved: Vec<Elem> = ll
                                        .epis
                                        .iter()
                                        .zip(&list[x])
                                        .map(|(e, &xe)| a.values[e.target].act(g, q, xe))
                                        .collect();
                                    ll.find(q, &moved).expect("action preserves compatibility")
                                })
                                .collect()
                        })
                        .collect();
                    levels.push(PointedGSet {
                        group: a.group.clone(),
                        size,
                        action: GAction::Table(table),
                    });
                }
                let componentwise = |f: &dyn Fn(usize, Elem) -> Elem, q: usize, x: usize| {
                    let moved: Vec<Elem> = ll
                        .epis
                        .iter()
                        .zip(&ll.lists[q][x])
                        .map(|(e, &xe)| f(e.target, xe))
                        .collect();
                    moved
                };
                let faces: Vec<Vec<Vec<Elem>>> = (0..=a.cap)
                    .map(|q| {
                        (0..if q == 0 { 0 } else { q + 1 })
                            .map(|i| {
                                (0..ll.lists[q].len())
                                    .map(|x| {
                                        let moved = componentwise(
                                            &|j, xe| a.values[j].face(q, i, xe),
                                            q,
                                            x,
                                        );
                                        ll.find(q - 1, &moved).expect("face of a family")
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect();
                let degens: Vec<Vec<Vec<Elem>>> = (0..=a.cap)
                    .map(|q| {
                        (0..if q == a.cap { 0 } else { q + 1 })
                            .map(|i| {
                                (0..ll.lists[q].len())
                                    .map(|x| {
                                        let moved = componentwise(
                                            &|j, xe| a.values[j].degen(q, i, xe),
                                            q,
                                            x,
                                        );
                                        ll.find(q + 1, &moved).expect("degeneracy of a family")
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect();
                values.push(SimplicialGSet::new(
                    a.group.clone(),
                    a.cap,
                    levels,
                    faces,
                    degens,
                ));
            }
        }
    }
    let rule: GammaRule = {
        let base = base.clone();
        let families = families.clone();
        Arc::new(move |psi, q, x| match &families[psi.target] {
            None => family_component(&base, &families, psi.source, q, x, psi),
            Some(ll2) => {
                let moved: Vec<Elem> = ll2
                    .epis
                    .iter()
                    .map(|e2| family_component(&base, &families, psi.source, q, x, &psi.then(e2)))
                    .collect();
                ll2.find(q, &moved).expect("image family is compatible")
            }
        })
    };
    let space = GammaGSpace {
        group: a.group.clone(),
        n_max: a.n_max,
        cap: a.cap,
        skeletal: Some(a.n_max),
        values,
        rule,
    };
    let levels = (0..=a.n_max)
        .map(|m| match &families[m] {
            None => SSetMap::identity(&a.values[m]),
            Some(ll) => SSetMap {
                maps: (0..=a.cap)
                    .map(|q| {
                        (0..=a.values[m].size(q))
                            .map(|x| {
                                let fam: Vec<Elem> = ll
                                    .epis
                                    .iter()
                                    .map(|e| a.apply(e, q, x))
                                    .collect();
                                ll.find(q, &fam).expect("unit family is compatible")
                            })
                            .collect()
                    })
                    .collect(),
            },
        })
        .collect();
    Ok(CoskeletonData {
        space,
        unit: GammaMap { levels },
        bound: n,
        base,
        families,
    })
}

/// Level-m component of csk(f) for a map f given on levels 0..=bound.
pub fn coskeleton_map(
    cska: &CoskeletonData,
    cskb: &CoskeletonData,
    f: &GammaMap,
    m: usize,
) -> SSetMap {
    assert_eq!(cska.bound, cskb.bound, "coskeleton bounds must agree");
    match (&cska.families[m], &cskb.families[m]) {
        (None, None) => f.levels[m].clone(),
        (Some(la), Some(lb)) => SSetMap {
            maps: (0..=cska.base.cap)
                .map(|q| {
                    la.lists[q]
                        .iter()
                        .map(|fam| {
                            let moved: Vec<Elem> = la
                                .epis
                                .iter()
                                .zip(fam)
                                .map(|(e, &xe)| f.levels[e.target].apply(q, xe))
                                .collect();
                            lb.find(q, &moved).expect("mapped family is compatible")
                        })
                        .collect()
                })
                .collect(),
        },
        _ => unreachable!("equal bounds give matching presentations"),
    }
}

// ---------------------------------------------------------------------------
// latching and matching
// ---------------------------------------------------------------------------

/// The latching comparison at level n: the pushout of
/// (sk_{n−1}B)(n⁺) ← (sk_{n−1}A)(n⁺) → A(n⁺) mapping to B(n⁺), all as
/// objects with the product of the G-action and the level-n symmetry.
pub struct LatchSquare {
    pub group: Arc<FiniteGroup>,
    pub source: SimplicialGSet,
    pub target: SimplicialGSet,
    pub map: SSetMap,
}

pub fn latch_map(
    a: &GammaGSpace,
    b: &GammaGSpace,
    f: &GammaMap,
    n: usize,
) -> Result<LatchSquare, GammaError> {
    if n > a.n_max || a.n_max != b.n_max || a.cap != b.cap {
        return Err(GammaError::Invalid {
            reason: "latching level out of range or mismatched truncations".into(),
        });
    }
    let target = b.value_with_sigma(n);
    let prod = target.group.clone();
    if n == 0 {
        let source = a.value_with_sigma(0);
        let map = f.levels[0].clone();
        return Ok(LatchSquare {
            group: prod,
            source,
            target,
            map,
        });
    }
    let ska = skeleton(a, n - 1)?;
    let skb = skeleton(b, n - 1)?;
    let skf = skeleton_map(&ska, &skb, f, n);
    let cu_a = &ska.counit.levels[n];
    let cu_b = &skb.counit.levels[n];
    let skb_n = &skb.space.values[n];
    let an = &a.values[n];
    let pushouts: Vec<_> = (0..=a.cap)
        .map(|q| pointed_pushout(skb_n.size(q), an.size(q), &skf.maps[q], &cu_a.maps[q]))
        .collect();
    let sym = SymmetricGroup::new(n);
    let sigmas: Vec<BasedMap> = sym
        .group
        .elements()
        .map(|s| sigma_map(&sym, s, n))
        .collect();
    let mut levels = Vec::with_capacity(a.cap + 1);
    for q in 0..=a.cap {
        let po = &pushouts[q];
        let table: Vec<Vec<Elem>> = prod
            .elements()
            .map(|p| {
                let (g, s) = prod.project(p).expect("product group");
                let mut fill = Fill::new(po.size as usize + 1);
                for x in 0..=skb_n.size(q) {
                    let y = skb.space.apply(&sigmas[s], q, skb_n.act(g, q, x));
                    fill.set(po.from_b[x as usize], po.from_b[y as usize]);
                }
                for x in 0..=an.size(q) {
                    let y = a.apply(&sigmas[s], q, an.act(g, q, x));
                    fill.set(po.from_c[x as usize], po.from_c[y as usize]);
                }
                debug_assert!(fill.complete(), "latching action is well defined");
                fill.table
            })
            .collect();
        levels.push(PointedGSet {
            group: prod.clone(),
            size: po.size,
            action: GAction::Table(table),
        });
    }
    let faces: Vec<Vec<Vec<Elem>>> = (0..=a.cap)
        .map(|q| {
            (0..if q == 0 { 0 } else { q + 1 })
                .map(|i| {
                    let mut fill = Fill::new(pushouts[q].size as usize + 1);
                    for x in 0..=skb_n.size(q) {
                        fill.set(
                            pushouts[q].from_b[x as usize],
                            pushouts[q - 1].from_b[skb_n.face(q, i, x) as usize],
                        );
                    }
                    for x in 0..=an.size(q) {
                        fill.set(
                            pushouts[q].from_c[x as usize],
                            pushouts[q - 1].from_c[an.face(q, i, x) as usize],
                        );
                    }
                    debug_assert!(fill.complete(), "latching faces are well defined");
                    fill.table
                })
                .collect()
        })
        .collect();
    let degens: Vec<Vec<Vec<Elem>>> = (0..=a.cap)
        .map(|q| {
            (0..if q == a.cap { 0 } else { q + 1 })
                .map(|i| {
                    let mut fill = Fill::new(pushouts[q].size as usize + 1);
                    for x in 0..=skb_n.size(q) {
                        fill.set(
                            pushouts[q].from_b[x as usize],
                            pushouts[q + 1].from_b[skb_n.degen(q, i, x) as usize],
                        );
                    }
                    for x in 0..=an.size(q) {
                        fill.set(
                            pushouts[q].from_c[x as usize],
                            pushouts[q + 1].from_c[an.degen(q, i, x) as usize],
                        );
                    }
                    debug_assert!(fill.complete(), "latching degeneracies are well defined");
                    fill.table
                })
                .collect()
        })
        .collect();
    let mut maps = Vec::with_capacity(a.cap + 1);
    for q in 0..=a.cap {
        let mut fill = Fill::new(pushouts[q].size as usize + 1);
        for x in 0..=skb_n.size(q) {
            fill.set(pushouts[q].from_b[x as usize], cu_b.apply(q, x));
        }
        for x in 0..=an.size(q) {
            fill.set(pushouts[q].from_c[x as usize], f.levels[n].apply(q, x));
        }
        debug_assert!(fill.complete(), "latching comparison is well defined");
        maps.push(fill.table);
    }
    let source = SimplicialGSet::new(prod.clone(), a.cap, levels, faces, degens);
    Ok(LatchSquare {
        group: prod,
        source,
        target,
        map: SSetMap { maps },
    })
}

/// The matching comparison at level n: A(n⁺) mapping into the pullback of
/// (csk_{n−1}A)(n⁺) → (csk_{n−1}B)(n⁺) ← B(n⁺), with the product action.
pub struct MatchSquare {
    pub group: Arc<FiniteGroup>,
    pub source: SimplicialGSet,
    pub target: SimplicialGSet,
    pub map: SSetMap,
}

pub fn match_map(
    a: &GammaGSpace,
    b: &GammaGSpace,
    f: &GammaMap,
    n: usize,
) -> Result<MatchSquare, GammaError> {
    if n > a.n_max || a.n_max != b.n_max || a.cap != b.cap {
        return Err(GammaError::Invalid {
            reason: "matching level out of range or mismatched truncations".into(),
        });
    }
    let source = a.value_with_sigma(n);
    let prod = source.group.clone();
    if n == 0 {
        let target = SimplicialGSet::point(prod.clone(), a.cap);
        let map = SSetMap::constant(&source);
        return Ok(MatchSquare {
            group: prod,
            source,
            target,
            map,
        });
    }
    let cska = coskeleton(a, n - 1)?;
    let cskb = coskeleton(b, n - 1)?;
    let cskf = coskeleton_map(&cska, &cskb, f, n);
    let ua = &cska.unit.levels[n];
    let ub = &cskb.unit.levels[n];
    let pairs: Vec<Vec<(Elem, Elem)>> = (0..=a.cap)
        .map(|q| pointed_pullback(&cskf.maps[q], &ub.maps[q]))
        .collect();
    let pos = |q: usize, p: (Elem, Elem)| -> Elem {
        if p == (0, 0) {
            return 0;
        }
        (pairs[q][1..].binary_search(&p).expect("pair in pullback") + 1) as Elem
    };
    let sym = SymmetricGroup::new(n);
    let sigmas: Vec<BasedMap> = sym
        .group
        .elements()
        .map(|s| sigma_map(&sym, s, n))
        .collect();
    let cn = &cska.space.values[n];
    let bn = &b.values[n];
    let mut levels = Vec::with_capacity(a.cap + 1);
    for q in 0..=a.cap {
        let table: Vec<Vec<Elem>> = prod
            .elements()
            .map(|p| {
                let (g, s) = prod.project(p).expect("product group");
                pairs[q]
                    .iter()
                    .map(|&(x, y)| {
                        let x2 = cska.space.apply(&sigmas[s], q, cn.act(g, q, x));
                        let y2 = b.apply(&sigmas[s], q, bn.act(g, q, y));
                        pos(q, (x2, y2))
                    })
                    .collect()
            })
            .collect();
        levels.push(PointedGSet {
            group: prod.clone(),
            size: (pairs[q].len() - 1) as u32,
            action: GAction::Table(table),
        });
    }
    let faces: Vec<Vec<Vec<Elem>>> = (0..=a.cap)
        .map(|q| {
            (0..if q == 0 { 0 } else { q + 1 })
                .map(|i| {
                    pairs[q]
                        .iter()
                        .map(|&(x, y)| pos(q - 1, (cn.face(q, i, x), bn.face(q, i, y))))
                        .collect()
                })
                .collect()
        })
        .collect();
    let degens: Vec<Vec<Vec<Elem>>> = (0..=a.cap)
        .map(|q| {
            (0..if q == a.cap { 0 } else { q + 1 })
                .map(|i| {
                    pairs[q]
                        .iter()
                        .map(|&(x, y)| pos(q + 1, (cn.degen(q, i, x), bn.degen(q, i, y))))
                        .collect()
                })
                .collect()
        })
        .collect();
    let maps = (0..=a.cap)
        .map(|q| {
            (0..=a.values[n].size(q))
                .map(|x| pos(q, (ua.apply(q, x), f.levels[n].apply(q, x))))
                .collect()
        })
        .collect();
    let target = SimplicialGSet::new(prod.clone(), a.cap, levels, faces, degens);
    Ok(MatchSquare {
        group: prod,
        source,
        target,
        map: SSetMap { maps },
    })
}

// ---------------------------------------------------------------------------
// strict cofibrations and cell decomposition
// ---------------------------------------------------------------------------

pub struct CofibrationLevel {
    pub level: usize,
    /// first collision of the latching comparison, if any
    pub witness: Option<(usize, Elem, Elem)>,
    pub family: FamilyReport,
}

pub struct CofibrationReport {
    pub strict: bool,
    pub levels: Vec<CofibrationLevel>,
}

/// Complement of the image of the latching comparison, as a pointed set
/// over the product group (degree 0 of a discrete object).
fn latch_complement(ls: &LatchSquare) -> PointedGSet {
    let size = ls.target.size(0);
    let mut hit = vec![false; size as usize + 1];
    for x in 0..=ls.source.size(0) {
        hit[ls.map.apply(0, x) as usize] = true;
    }
    let comp: Vec<Elem> = (1..=size).filter(|&x| !hit[x as usize]).collect();
    let table: Vec<Vec<Elem>> = ls
        .group
        .elements()
        .map(|g| {
            std::iter::once(0)
                .chain(comp.iter().map(|&x| {
                    let y = ls.target.act(g, 0, x);
                    (comp.binary_search(&y).expect("complement is closed") + 1) as Elem
                }))
                .collect()
        })
        .collect();
    PointedGSet {
        group: ls.group.clone(),
        size: comp.len() as u32,
        action: GAction::Table(table),
    }
}

/// A map of discrete Γ-G-sets is a strict cofibration when every latching
/// comparison is injective and the new orbits have graph-subgroup isotropy.
pub fn is_strict_cofibration_discrete(
    a: &GammaGSpace,
    b: &GammaGSpace,
    f: &GammaMap,
) -> Result<CofibrationReport, GammaError> {
    for x in [a, b] {
        if let Some(level) = discrete_violation(x) {
            return Err(GammaError::NotDiscrete { level });
        }
    }
    let mut strict = true;
    let mut levels = Vec::with_capacity(a.n_max + 1);
    for n in 0..=a.n_max {
        let ls = latch_map(a, b, f, n)?;
        let witness = ls.map.injectivity_witness();
        let family = isotropy_in_family_gn(&latch_complement(&ls)).map_err(gerr)?;
        strict &= witness.is_none() && family.all_in_family;
        levels.push(CofibrationLevel {
            level: n,
            witness,
            family,
        });
    }
    Ok(CofibrationReport { strict, levels })
}

/// One free cell of a discrete Γ-G-set: a level, a subgroup H of G, the
/// twisting homomorphism into the level symmetry recorded per element of
/// `subgroup.elements()`, and the chosen orbit representative.
pub struct Cell {
    pub level: usize,
    pub subgroup: SubgroupRef,
    pub rho: Vec<usize>,
    pub rep: Elem,
}

pub struct LevelAssembly {
    pub level: usize,
    pub cells: usize,
    pub pushout_matches: bool,
}

pub struct Decomposition {
    pub cells: Vec<Cell>,
    pub assemblies: Vec<LevelAssembly>,
    pub verified: bool,
}

/// The pointed H-set {1..n} twisted by rho, over the subgroup-as-group.
fn cell_domain(
    group: &Arc<FiniteGroup>,
    cell: &Cell,
    sym: &SymmetricGroup,
) -> (Arc<FiniteGroup>, PointedGSet) {
    let (hg, embed) = subgroup_as_group(group, &cell.subgroup);
    debug_assert_eq!(embed, cell.subgroup.elements().to_vec());
    let n = cell.level;
    let table: Vec<Vec<Elem>> = hg
        .elements()
        .map(|h| {
            let perm = sym.perm(cell.rho[h]);
            std::iter::once(0)
                .chain((1..=n).map(|j| perm[j - 1] as Elem + 1))
                .collect()
        })
        .collect();
    let s = PointedGSet {
        group: hg.clone(),
        size: n as u32,
        action: GAction::Table(table),
    };
    (hg, s)
}

/// The classifying map of a cell: G⁺ ∧_H Γ_H(S⁺, −) → F sending the
/// canonical pair (coset c, φ) to g_c · F(φ)(rep).
fn cell_attach(f: &GammaGSpace, cell: &Cell, r: &GammaGSpace) -> GammaMap {
    let cosets = left_cosets(&f.group, &cell.subgroup);
    let n = cell.level;
    let levels = (0..=f.n_max)
        .map(|m| {
            let per = (m as u64 + 1).pow(n as u32) - 1;
            SSetMap {
                maps: (0..=f.cap)
                    .map(|q| {
                        (0..=r.values[m].size(q))
                            .map(|x| {
                                if x == 0 {
                                    return 0;
                                }
                                let c = ((x as u64 - 1) / per) as usize;
                                let rank = (x as u64 - 1) % per + 1;
                                let phi = BasedMap::from_rank(n, m, rank);
                                let v = f.apply(&phi, q, cell.rep);
                                f.values[m].act(cosets[c], q, v)
                            })
                            .collect()
                    })
                    .collect(),
            }
        })
        .collect();
    GammaMap { levels }
}

fn verify_level_assembly(
    f: &GammaGSpace,
    n: usize,
    cells: &[Cell],
    sk_prev: &SkeletonData,
    sk_this: &SkeletonData,
) -> Result<bool, GammaError> {
    let sym = SymmetricGroup::new(n);
    struct CellData {
        r: GammaGSpace,
        sk: SkeletonData,
        attach: GammaMap,
    }
    let mut data = Vec::with_capacity(cells.len());
    for cell in cells {
        let (_, s) = cell_domain(&f.group, cell, &sym);
        let r = induced_representable(&f.group, &cell.subgroup, &s, f.n_max, f.cap)?;
        let attach = cell_attach(f, cell, &r);
        if attach.validate(&r, f).is_err() {
            return Ok(false);
        }
        let sk = skeleton(&r, n - 1)?;
        data.push(CellData { r, sk, attach });
    }
    let cosets: Vec<Vec<usize>> = cells
        .iter()
        .map(|c| left_cosets(&f.group, &c.subgroup))
        .collect();
    for m in 0..=f.n_max {
        for q in 0..=f.cap {
            let wedge_sizes: Vec<u32> = data.iter().map(|d| d.r.values[m].size(q)).collect();
            let sk_sizes: Vec<u32> = data
                .iter()
                .map(|d| d.sk.space.values[m].size(q))
                .collect();
            let total_w: u32 = wedge_sizes.iter().sum();
            let total_sw: u32 = sk_sizes.iter().sum();
            let w_off: Vec<u32> = wedge_sizes
                .iter()
                .scan(0, |acc, &s| {
                    let o = *acc;
                    *acc += s;
                    Some(o)
                })
                .collect();
            let mut cs = vec![0 as Elem; total_sw as usize + 1];
            let mut cw = vec![0 as Elem; total_sw as usize + 1];
            let mut idx = 1usize;
            for (i, d) in data.iter().enumerate() {
                for x in 1..=sk_sizes[i] {
                    let (k, psi, r0) = d.sk.rep(m, q, x);
                    let av = d.attach.levels[k].apply(q, r0);
                    cs[idx] = sk_prev.class_of(m, q, k, &psi, av);
                    let c0 = d.sk.counit.levels[m].apply(q, x);
                    cw[idx] = if c0 == 0 { 0 } else { w_off[i] + c0 };
                    idx += 1;
                }
            }
            let prev_size = sk_prev.space.values[m].size(q);
            let po = pointed_pushout(prev_size, total_w, &cs, &cw);
            let this_size = sk_this.space.values[m].size(q);
            let mut cmp = Fill::new(po.size as usize + 1);
            for x in 0..=prev_size {
                let (k, psi, xx) = sk_prev.rep(m, q, x);
                cmp.set(po.from_b[x as usize], sk_this.class_of(m, q, k, &psi, xx));
            }
            let mut idx = 1usize;
            for i in 0..data.len() {
                let per = (m as u64 + 1).pow(n as u32) - 1;
                for x in 1..=wedge_sizes[i] {
                    let c = ((x as u64 - 1) / per) as usize;
                    let rank = (x as u64 - 1) % per + 1;
                    let phi = BasedMap::from_rank(n, m, rank);
                    let v = f.values[n].act(cosets[i][c], q, cells[i].rep);
                    cmp.set(
                        po.from_c[idx],
                        sk_this.class_of(m, q, n, &phi.table, v),
                    );
                    idx += 1;
                }
            }
            if !cmp.complete() || !table_bijective(&cmp.table, this_size) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Decompose a discrete Γ-G-set into free cells, or report the first
/// obstruction.  The decomposition is verified by reassembling each skeleton
/// stage as a pushout and comparing levelwise.
pub fn decompose_discrete(f: &GammaGSpace) -> Result<Decomposition, GammaError> {
    if let Some(level) = discrete_violation(f) {
        return Err(GammaError::NotDiscrete { level });
    }
    let mut skels = Vec::with_capacity(f.n_max + 1);
    for bound in 0..=f.n_max {
        skels.push(skeleton(f, bound)?);
    }
    let mut cells = Vec::new();
    let mut assemblies = Vec::new();
    let mut verified = true;
    for n in 1..=f.n_max {
        let incl = &skels[n - 1].counit.levels[n];
        if let Some((q, x, y)) = incl.injectivity_witness() {
            return Err(GammaError::NotCofibrant {
                level: n,
                detail: format!(
                    "the canonical map from the {}-skeleton identifies {x} and {y} in degree {q}",
                    n - 1
                ),
            });
        }
        let vs = f.value_with_sigma(n);
        let (comp, cp) = {
            let size = f.values[n].size(0);
            let mut hit = vec![false; size as usize + 1];
            for x in 0..=skels[n - 1].space.values[n].size(0) {
                hit[incl.apply(0, x) as usize] = true;
            }
            let comp: Vec<Elem> = (1..=size).filter(|&x| !hit[x as usize]).collect();
            let table: Vec<Vec<Elem>> = vs
                .group
                .elements()
                .map(|g| {
                    std::iter::once(0)
                        .chain(comp.iter().map(|&x| {
                            let y = vs.act(g, 0, x);
                            (comp.binary_search(&y).expect("complement is closed") + 1) as Elem
                        }))
                        .collect()
                })
                .collect();
            (
                comp.clone(),
                PointedGSet {
                    group: vs.group.clone(),
                    size: comp.len() as u32,
                    action: GAction::Table(table),
                },
            )
        };
        let fam = isotropy_in_family_gn(&cp).map_err(gerr)?;
        let mut level_cells = Vec::new();
        for orb in &fam.orbits {
            let Some(graph) = &orb.graph else {
                return Err(GammaError::NotCofibrant {
                    level: n,
                    detail: "an orbit of new simplices has isotropy meeting the symmetry factor"
                        .into(),
                });
            };
            let subgroup = SubgroupRef::new(&f.group, graph.domain.clone()).map_err(gerr)?;
            level_cells.push(Cell {
                level: n,
                subgroup,
                rho: graph.rho.clone(),
                rep: comp[orb.rep as usize - 1],
            });
        }
        let ok = verify_level_assembly(f, n, &level_cells, &skels[n - 1], &skels[n])?;
        verified &= ok;
        assemblies.push(LevelAssembly {
            level: n,
            cells: level_cells.len(),
            pushout_matches: ok,
        });
        cells.extend(level_cells);
    }
    Ok(Decomposition {
        cells,
        assemblies,
        verified,
    })
}

// ---------------------------------------------------------------------------
// the filtration square and the two diagram squares
// ---------------------------------------------------------------------------

/// φ does not factor through any smaller object.
fn essentially_full(f: &BasedMap) -> bool {
    f.is_injective_on_nonbase() && f.table.iter().skip(1).all(|&v| v != 0)
}

/// Orbit-canonical pairs (φ: m⁺ → n⁺, v) under (φ∘σ, v) ~ (φ, σ·v).
struct BalancedSmash {
    reps: Vec<(u64, Elem)>,
    index: BTreeMap<(u64, Elem), Elem>,
}

fn canonical_pair(
    sym: &SymmetricGroup,
    act: &dyn Fn(usize, Elem) -> Elem,
    phi: &BasedMap,
    v: Elem,
) -> (u64, Elem) {
    let m = phi.source;
    let mut best = (u64::MAX, Elem::MAX);
    for s in sym.group.elements() {
        let perm = sym.perm(s);
        let mut table = vec![0 as Elem; m + 1];
        for i in 1..=m {
            table[i] = phi.table[perm[i - 1] as usize + 1];
        }
        let r = BasedMap {
            source: m,
            target: phi.target,
            table,
        }
        .rank();
        let w = act(sym.group.inv(s), v);
        if (r, w) < best {
            best = (r, w);
        }
    }
    best
}

fn build_balanced(
    sym: &SymmetricGroup,
    maps: &[BasedMap],
    size: u32,
    act: &dyn Fn(usize, Elem) -> Elem,
) -> BalancedSmash {
    let mut index: BTreeMap<(u64, Elem), Elem> = BTreeMap::new();
    for f in maps {
        if f.rank() == 0 {
            // the zero map is the basepoint of the mapping space
            continue;
        }
        for v in 1..=size {
            index.entry(canonical_pair(sym, act, f, v)).or_insert(0);
        }
    }
    let reps: Vec<(u64, Elem)> = index.keys().cloned().collect();
    for (i, k) in reps.iter().enumerate() {
        *index.get_mut(k).unwrap() = (i + 1) as Elem;
    }
    BalancedSmash { reps, index }
}

pub struct SquareReport {
    pub holds: bool,
    pub levels: Vec<(usize, bool)>,
}

/// Check, level by level, that the square gluing the stage-m piece of the
/// skeletal filtration is a pushout:
/// Γ(m⁺,−) ∧_{Σm} A(m⁺) over its boundary gives sk_m A from sk_{m−1} A.
pub fn filtration_square(a: &GammaGSpace, m: usize) -> Result<SquareReport, GammaError> {
    if m == 0 || m > a.n_max {
        return Err(GammaError::Invalid {
            reason: "filtration stage must lie between 1 and the stored bound".into(),
        });
    }
    let skm = skeleton(a, m)?;
    let skp = skeleton(a, m - 1)?;
    let sym = SymmetricGroup::new(m);
    let sigmas: Vec<BasedMap> = sym
        .group
        .elements()
        .map(|s| sigma_map(&sym, s, m))
        .collect();
    let mut levels = Vec::with_capacity(a.n_max + 1);
    let mut holds = true;
    for n in 0..=a.n_max {
        let mut ok_n = true;
        let all_maps = BasedMap::all(m, n);
        let small: Vec<BasedMap> = all_maps
            .iter()
            .filter(|f| !essentially_full(f))
            .cloned()
            .collect();
        for q in 0..=a.cap {
            let fa = a.values[m].size(q);
            let fs = skp.space.values[m].size(q);
            let act_f = |s: usize, v: Elem| a.apply(&sigmas[s], q, v);
            let act_s = |s: usize, v: Elem| skp.space.apply(&sigmas[s], q, v);
            let x1 = build_balanced(&sym, &all_maps, fa, &act_f);
            let x2 = build_balanced(&sym, &small, fa, &act_f);
            let x3 = build_balanced(&sym, &all_maps, fs, &act_s);
            let x23 = build_balanced(&sym, &small, fs, &act_s);
            let n23 = x23.reps.len();
            let mut t3 = vec![0 as Elem; n23 + 1];
            let mut t2 = vec![0 as Elem; n23 + 1];
            for (i, &(r, w)) in x23.reps.iter().enumerate() {
                t3[i + 1] = x3.index[&(r, w)];
                let v = skp.counit.levels[m].apply(q, w);
                t2[i + 1] = if v == 0 {
                    0
                } else {
                    x2.index[&canonical_pair(&sym, &act_f, &BasedMap::from_rank(m, n, r), v)]
                };
            }
            let boundary =
                pointed_pushout(x3.reps.len() as u32, x2.reps.len() as u32, &t3, &t2);
            let bl_size = skp.space.values[n].size(q);
            let mut to_bl = Fill::new(boundary.size as usize + 1);
            let mut to_x1 = Fill::new(boundary.size as usize + 1);
            for (i, &(r, w)) in x3.reps.iter().enumerate() {
                let d = boundary.from_b[i + 1];
                let (k, psi, xx) = skp.rep(m, q, w);
                let phi = BasedMap::from_rank(m, n, r);
                let comp = BasedMap {
                    source: k,
                    target: m,
                    table: psi,
                }
                .then(&phi);
                to_bl.set(d, skp.class_of(n, q, k, &comp.table, xx));
                let v = skp.counit.levels[m].apply(q, w);
                to_x1.set(
                    d,
                    if v == 0 {
                        0
                    } else {
                        x1.index[&canonical_pair(&sym, &act_f, &phi, v)]
                    },
                );
            }
            for (i, &(r, v)) in x2.reps.iter().enumerate() {
                let d = boundary.from_c[i + 1];
                let phi = BasedMap::from_rank(m, n, r);
                let (e, mono) = phi.epi_mono();
                let down = a.apply(&e, q, v);
                to_bl.set(
                    d,
                    if down == 0 {
                        0
                    } else {
                        skp.class_of(n, q, mono.source, &mono.table, down)
                    },
                );
                to_x1.set(d, x1.index[&(r, v)]);
            }
            if !to_bl.complete() || !to_x1.complete() {
                ok_n = false;
                continue;
            }
            let glued = pointed_pushout(bl_size, x1.reps.len() as u32, &to_bl.table, &to_x1.table);
            let mut cmp = Fill::new(glued.size as usize + 1);
            for x in 0..=bl_size {
                let (k, psi, xx) = skp.rep(n, q, x);
                cmp.set(glued.from_b[x as usize], skm.class_of(n, q, k, &psi, xx));
            }
            for (i, &(r, v)) in x1.reps.iter().enumerate() {
                cmp.set(
                    glued.from_c[i + 1],
                    skm.class_of(n, q, m, &BasedMap::from_rank(m, n, r).table, v),
                );
            }
            ok_n &= cmp.complete() && table_bijective(&cmp.table, skm.space.values[n].size(q));
        }
        holds &= ok_n;
        levels.push((n, ok_n));
    }
    Ok(SquareReport { holds, levels })
}

/// The skeleton-attachment square: injections l⁺ ↪ n⁺ smashed over Σl with
/// X(l⁺), glued onto the (l−1)-skeleton, reproduce the l-skeleton at level n.
pub fn diagram_skeleta_square(x: &GammaGSpace, n: usize, l: usize) -> Result<bool, GammaError> {
    if l == 0 || l > n || n > x.n_max {
        return Err(GammaError::Invalid {
            reason: "attachment square needs 1 <= l <= n within the stored bound".into(),
        });
    }
    let skl = skeleton(x, l)?;
    let skl1 = skeleton(x, l - 1)?;
    let sym = SymmetricGroup::new(l);
    let sigmas: Vec<BasedMap> = sym
        .group
        .elements()
        .map(|s| sigma_map(&sym, s, l))
        .collect();
    let injs = BasedMap::all_injective(l, n);
    for q in 0..=x.cap {
        let vsize = x.values[l].size(q);
        let wsize = skl1.space.values[l].size(q);
        let act_v = |s: usize, v: Elem| x.apply(&sigmas[s], q, v);
        let act_w = |s: usize, v: Elem| skl1.space.apply(&sigmas[s], q, v);
        let tr = build_balanced(&sym, &injs, vsize, &act_v);
        let tl = build_balanced(&sym, &injs, wsize, &act_w);
        let ntl = tl.reps.len();
        let mut to_bl = vec![0 as Elem; ntl + 1];
        let mut to_tr = vec![0 as Elem; ntl + 1];
        for (i, &(r, w)) in tl.reps.iter().enumerate() {
            let iota = BasedMap::from_rank(l, n, r);
            let (k, psi, xx) = skl1.rep(l, q, w);
            let comp = BasedMap {
                source: k,
                target: l,
                table: psi,
            }
            .then(&iota);
            to_bl[i + 1] = skl1.class_of(n, q, k, &comp.table, xx);
            let v = skl1.counit.levels[l].apply(q, w);
            to_tr[i + 1] = if v == 0 {
                0
            } else {
                tr.index[&canonical_pair(&sym, &act_v, &iota, v)]
            };
        }
        let bl_size = skl1.space.values[n].size(q);
        let glued = pointed_pushout(bl_size, tr.reps.len() as u32, &to_bl, &to_tr);
        let mut cmp = Fill::new(glued.size as usize + 1);
        for b in 0..=bl_size {
            let (k, psi, xx) = skl1.rep(n, q, b);
            cmp.set(glued.from_b[b as usize], skl.class_of(n, q, k, &psi, xx));
        }
        for (i, &(r, v)) in tr.reps.iter().enumerate() {
            cmp.set(
                glued.from_c[i + 1],
                skl.class_of(n, q, l, &BasedMap::from_rank(l, n, r).table, v),
            );
        }
        if !cmp.complete() || !table_bijective(&cmp.table, skl.space.values[n].size(q)) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn surjection_orbit_reps(sym: &SymmetricGroup, n: usize, l: usize) -> Vec<BasedMap> {
    let perms: Vec<BasedMap> = sym
        .group
        .elements()
        .map(|s| sigma_map(sym, s, l))
        .collect();
    let mut seen: std::collections::BTreeSet<u64> = Default::default();
    let mut reps = Vec::new();
    for f in BasedMap::all_surjective(n, l) {
        if seen.contains(&f.rank()) {
            continue;
        }
        for p in &perms {
            seen.insert(f.then(p).rank());
        }
        reps.push(f);
    }
    reps
}

/// The coskeleton square: the l-coskeleton at level n is the pullback of the
/// (l−1)-coskeleton against the Σl-equivariant maps Surj(n⁺, l⁺) → X(l⁺).
pub fn diagram_coskeleta_square(x: &GammaGSpace, n: usize, l: usize) -> Result<bool, GammaError> {
    if l == 0 || l >= n || n > x.n_max {
        return Err(GammaError::Invalid {
            reason: "coskeleton square needs 1 <= l < n within the stored bound".into(),
        });
    }
    let cskl = coskeleton(x, l)?;
    let cskl1 = coskeleton(x, l - 1)?;
    let sym = SymmetricGroup::new(l);
    let reps = surjection_orbit_reps(&sym, n, l);
    let p = reps.len();
    let lim_n = cskl.family_list(n).expect("level above the bound");
    let lim1_n = cskl1.family_list(n).expect("level above the bound");
    let lim1_l = cskl1.family_list(l).expect("level above the bound");
    let rep_idx: Vec<usize> = reps.iter().map(|r| lim_n.epi_index(r)).collect();
    let prefix = lim1_n.epis.len();
    for q in 0..=x.cap {
        let vsize = x.values[l].size(q) as u64;
        let wsize = (lim1_l.lists[q].len() - 1) as u64;
        let tuples = (vsize + 1)
            .checked_pow(p as u32)
            .filter(|&t| t <= MAX_FAMILIES as u64)
            .ok_or_else(|| GammaError::Invalid {
                reason: "equivariant map space exceeds the enumeration ceiling".into(),
            })?;
        // BL -> BR: restrict a (csk_{l-1})(n)-family along each surjection rep
        let bl = &lim1_n.lists[q];
        let f_tab: Vec<Elem> = (0..bl.len())
            .map(|y| {
                let mut enc = 0u64;
                for r in reps.iter().rev() {
                    let fam: Vec<Elem> = lim1_l
                        .epis
                        .iter()
                        .map(|e| {
                            cskl1.component(n, q, y as Elem, &r.then(e))
                        })
                        .collect();
                    let w = lim1_l.find(q, &fam).expect("restricted family") as u64;
                    enc = enc * (wsize + 1) + w;
                }
                enc as Elem
            })
            .collect();
        // TR -> BR: apply the unit of csk_{l-1} at level l coordinatewise
        let unit_l = &cskl1.unit.levels[l];
        let g_tab: Vec<Elem> = (0..tuples)
            .map(|u| {
                let mut enc = 0u64;
                let mut rest = u;
                let mut coords = Vec::with_capacity(p);
                for _ in 0..p {
                    coords.push((rest % (vsize + 1)) as Elem);
                    rest /= vsize + 1;
                }
                for &v in coords.iter().rev() {
                    enc = enc * (wsize + 1) + unit_l.apply(q, v) as u64;
                }
                enc as Elem
            })
            .collect();
        let pairs = pointed_pullback(&f_tab, &g_tab);
        // TL -> pairs must be a bijection
        let tln = &lim_n.lists[q];
        if tln.len() != pairs.len() {
            return Ok(false);
        }
        let mut seen = vec![false; pairs.len()];
        for fam in tln {
            let y = match lim1_n.find(q, &fam[..prefix]) {
                Some(y) => y,
                None => return Ok(false),
            };
            let mut u = 0u64;
            for &ri in rep_idx.iter().rev() {
                u = u * (vsize + 1) + fam[ri] as u64;
            }
            let key = (y, u as Elem);
            let pos = if key == (0, 0) {
                0
            } else {
                match pairs[1..].binary_search(&key) {
                    Ok(i) => i + 1,
                    Err(_) => return Ok(false),
                }
            };
            if seen[pos] {
                return Ok(false);
            }
            seen[pos] = true;
        }
        if !seen.iter().all(|&s| s) {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// level-by-level extension
// ---------------------------------------------------------------------------

pub struct ExtensionReport {
    pub level_map_valid: bool,
    pub sigma_equivariant: bool,
    pub skeleton_square: bool,
    pub coskeleton_square: bool,
    pub extends: bool,
}

/// Decide whether a candidate level-n component extends a natural map given
/// on levels < n: the candidate must be an equivariant simplicial map,
/// commute with the level-n symmetry, and fit the canonical skeleton and
/// coskeleton squares.
pub fn extends_to_next_level(
    a: &GammaGSpace,
    b: &GammaGSpace,
    partial: &[SSetMap],
    candidate: &SSetMap,
    n: usize,
) -> Result<ExtensionReport, GammaError> {
    if n == 0 || n > a.n_max || partial.len() != n {
        return Err(GammaError::Invalid {
            reason: "extension test needs the components on levels 0..n".into(),
        });
    }
    let pm = GammaMap {
        levels: partial.to_vec(),
    };
    pm.validate(&truncate(a, n - 1), &truncate(b, n - 1))
        .map_err(|e| GammaError::Invalid {
            reason: format!("partial map is not natural below the new level: {e:?}"),
        })?;
    let level_map_valid = candidate
        .validate(&a.values[n], &b.values[n], true)
        .is_ok();
    let sym = SymmetricGroup::new(n);
    let sigma_equivariant = sym.group.elements().all(|s| {
        let sg = sigma_map(&sym, s, n);
        (0..=a.cap).all(|q| {
            (0..=a.values[n].size(q)).all(|x| {
                candidate.apply(q, a.apply(&sg, q, x)) == b.apply(&sg, q, candidate.apply(q, x))
            })
        })
    });
    let ska = skeleton(a, n - 1)?;
    let skb = skeleton(b, n - 1)?;
    let skf = skeleton_map(&ska, &skb, &pm, n);
    let skeleton_square = (0..=a.cap).all(|q| {
        (0..=ska.space.values[n].size(q)).all(|x| {
            candidate.apply(q, ska.counit.levels[n].apply(q, x))
                == skb.counit.levels[n].apply(q, skf.apply(q, x))
        })
    });
    let cska = coskeleton(a, n - 1)?;
    let cskb = coskeleton(b, n - 1)?;
    let cskf = coskeleton_map(&cska, &cskb, &pm, n);
    let coskeleton_square = (0..=a.cap).all(|q| {
        (0..=a.values[n].size(q)).all(|x| {
            cskb.unit.levels[n].apply(q, candidate.apply(q, x))
                == cskf.apply(q, cska.unit.levels[n].apply(q, x))
        })
    });
    let extends = level_map_valid && sigma_equivariant && skeleton_square && coskeleton_square;
    Ok(ExtensionReport {
        level_map_valid,
        sigma_equivariant,
        skeleton_square,
        coskeleton_square,
        extends,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::{eilenberg_maclane, representable, CommMonoid};
    use crate::groups::FiniteGSet;

    fn z2() -> Arc<FiniteGroup> {
        FiniteGroup::cyclic(2)
    }

    #[test]
    fn representable_skeleton_drops_the_full_arity_maps() {
        let g = FiniteGroup::trivial();
        let s = PointedGSet::trivial(g.clone(), 2);
        let rep2 = representable(&s, 2, 2).unwrap();
        let sk = skeleton(&rep2, 1).unwrap();
        assert_eq!(sk.space.skeletal, Some(1));
        assert_eq!(sk.space.values[1].size(0), 3);
        assert_eq!(sk.space.values[2].size(0), 6);
        sk.counit.validate(&sk.space, &rep2).unwrap();
        let cu = &sk.counit.levels[2];
        assert!(cu.injectivity_witness().is_none());
        let mut img: Vec<Elem> = (1..=6).map(|x| cu.apply(0, x)).collect();
        img.sort_unstable();
        let expected: Vec<Elem> = BasedMap::all(2, 2)
            .iter()
            .filter(|f| !essentially_full(f) && f.rank() != 0)
            .map(|f| f.rank() as Elem)
            .collect();
        assert_eq!(img, expected);
        // idempotent: the skeleton of the skeleton is the skeleton
        let again = skeleton(&sk.space, 1).unwrap();
        assert!(again.counit.is_levelwise_bijective(&sk.space));
    }

    #[test]
    fn coskeleton_of_a_classifying_object_counts_tuples() {
        let g = FiniteGroup::trivial();
        let m = CommMonoid::z2(g.clone());
        let em = eilenberg_maclane(&m, 3, 2).unwrap();
        let csk = coskeleton(&em, 1).unwrap();
        assert_eq!(csk.space.values[2].size(0), 7); // |M⁺|^(2²−1) − 1
        assert_eq!(csk.space.values[3].size(0), 127); // |M⁺|^(2³−1) − 1
        csk.unit.validate(&em, &csk.space).unwrap();
        assert!(csk.unit.levels[2].is_injective());
        assert!(csk.unit.levels[3].is_injective());
        csk.space.validate_functor(2).unwrap();
    }

    #[test]
    fn latching_against_the_basepoint_lists_the_new_cells() {
        let g = FiniteGroup::trivial();
        let s = PointedGSet::trivial(g.clone(), 2);
        let rep2 = representable(&s, 2, 2).unwrap();
        let pt = GammaGSpace::point(g.clone(), 2, 2);
        let report =
            is_strict_cofibration_discrete(&pt, &rep2, &GammaMap::constant(&pt)).unwrap();
        assert!(report.strict);
        assert_eq!(report.levels[0].family.orbits.len(), 0);
        assert_eq!(report.levels[1].family.orbits.len(), 3);
        assert_eq!(report.levels[2].family.orbits.len(), 1);
        assert_eq!(report.levels[2].family.orbits[0].stabilizer.order(), 1);
    }

    #[test]
    fn matching_against_the_identity_is_a_bijection() {
        let g = FiniteGroup::trivial();
        let s = PointedGSet::trivial(g.clone(), 2);
        let rep2 = representable(&s, 2, 2).unwrap();
        let ms = match_map(&rep2, &rep2, &GammaMap::identity(&rep2), 2).unwrap();
        assert!(ms.map.is_bijective_onto(&ms.target));
        ms.map.validate(&ms.source, &ms.target, true).unwrap();
        ms.source.validate().unwrap();
        ms.target.validate().unwrap();
    }

    #[test]
    fn fixed_diagonals_obstruct_cell_decomposition() {
        let g = FiniteGroup::trivial();
        let m = CommMonoid::z2(g.clone());
        let em = eilenberg_maclane(&m, 2, 2).unwrap();
        // the diagonal (1,1) in M² is fixed by the level-2 swap but is not in
        // the image of the 1-skeleton
        match decompose_discrete(&em) {
            Err(GammaError::NotCofibrant { level, .. }) => assert_eq!(level, 2),
            Err(e) => panic!("wrong obstruction: {e}"),
            Ok(_) => panic!("expected a cofibrancy obstruction"),
        }
        let pt = GammaGSpace::point(g.clone(), 2, 2);
        let report = is_strict_cofibration_discrete(&pt, &em, &GammaMap::constant(&pt)).unwrap();
        assert!(!report.strict);
        assert!(!report.levels[2].family.all_in_family);
    }

    #[test]
    fn representable_decomposition_reassembles() {
        let g = FiniteGroup::trivial();
        let s = PointedGSet::trivial(g.clone(), 2);
        let rep2 = representable(&s, 2, 2).unwrap();
        let dec = decompose_discrete(&rep2).unwrap();
        assert!(dec.verified);
        let by_level: Vec<usize> = dec.assemblies.iter().map(|a| a.cells).collect();
        assert_eq!(by_level, vec![3, 1]);
    }

    #[test]
    fn twisted_cells_of_a_free_orbit_representable() {
        let g = z2();
        let s = FiniteGSet::free_orbit(g.clone()).to_pointed();
        let rep = representable(&s, 2, 2).unwrap();
        let dec = decompose_discrete(&rep).unwrap();
        assert!(dec.verified);
        // level 1: one free G-cell {01, 10} and one fixed point {11};
        // level 2: a single cell twisted along G ≅ Σ2
        let by_level: Vec<usize> = dec.assemblies.iter().map(|a| a.cells).collect();
        assert_eq!(by_level, vec![2, 1]);
        let twisted = dec.cells.iter().find(|c| c.level == 2).unwrap();
        assert_eq!(twisted.subgroup.order(), 2);
        assert!(twisted.rho.iter().any(|&r| r != 0));
    }

    #[test]
    fn filtration_squares_are_pushouts() {
        let g = FiniteGroup::trivial();
        let s = PointedGSet::trivial(g.clone(), 2);
        let rep2 = representable(&s, 2, 2).unwrap();
        for m in 1..=2 {
            let rpt = filtration_square(&rep2, m).unwrap();
            assert!(rpt.holds, "stage {m} fails: {:?}", rpt.levels);
        }
        let m = CommMonoid::z2(g.clone());
        let em = eilenberg_maclane(&m, 2, 2).unwrap();
        assert!(filtration_square(&em, 1).unwrap().holds);
        assert!(filtration_square(&em, 2).unwrap().holds);
        // with a genuine group action
        let gg = z2();
        let free = FiniteGSet::free_orbit(gg.clone()).to_pointed();
        let repf = representable(&free, 2, 2).unwrap();
        assert!(filtration_square(&repf, 1).unwrap().holds);
        assert!(filtration_square(&repf, 2).unwrap().holds);
    }

    #[test]
    fn diagram_squares_hold() {
        let g = FiniteGroup::trivial();
        let s = PointedGSet::trivial(g.clone(), 2);
        let rep2 = representable(&s, 2, 2).unwrap();
        assert!(diagram_skeleta_square(&rep2, 2, 1).unwrap());
        assert!(diagram_skeleta_square(&rep2, 2, 2).unwrap());
        assert!(diagram_coskeleta_square(&rep2, 2, 1).unwrap());
        let m = CommMonoid::z2(g.clone());
        let em = eilenberg_maclane(&m, 3, 2).unwrap();
        assert!(diagram_skeleta_square(&em, 3, 1).unwrap());
        assert!(diagram_skeleta_square(&em, 3, 2).unwrap());
        assert!(diagram_coskeleta_square(&em, 2, 1).unwrap());
        assert!(diagram_coskeleta_square(&em, 3, 2).unwrap());
    }

    #[test]
    fn extension_test_matches_brute_force_naturality() {
        let g = FiniteGroup::trivial();
        let s1 = PointedGSet::trivial(g.clone(), 1);
        let a = representable(&s1, 2, 2).unwrap();
        let m = CommMonoid::z2(g.clone());
        let b = eilenberg_maclane(&m, 2, 2).unwrap();
        // the restriction of the classifying map picked out by 1 ∈ M:
        // level m sends v ∈ m⁺ to the indicator tuple at coordinate v
        let partial: Vec<SSetMap> = (0..=1)
            .map(|lvl| SSetMap {
                maps: (0..=2)
                    .map(|_| {
                        (0..=(lvl as Elem))
                            .map(|v| if v == 0 { 0 } else { 1 << (v - 1) })
                            .collect()
                    })
                    .collect(),
            })
            .collect();
        let mut extending = 0;
        for aa in 0..=3u32 {
            for bb in 0..=3u32 {
                let cand = SSetMap {
                    maps: (0..=2).map(|_| vec![0, aa, bb]).collect(),
                };
                let report = extends_to_next_level(&a, &b, &partial, &cand, 2).unwrap();
                let mut full = partial.clone();
                full.push(cand);
                let oracle = GammaMap { levels: full }.validate(&a, &b).is_ok();
                assert_eq!(report.extends, oracle, "candidate ({aa},{bb})");
                extending += report.extends as u32;
            }
        }
        assert_eq!(extending, 1);
    }
}
