//! Level-truncated Γ-G-spaces.
//!
//! A Γ-G-space assigns to each pointed level set n⁺ = {+, 1, …, n} a
//! pointed simplicial G-set, functorially in based maps. We store values
//! up to a level truncation `n_max` together with a *rule* computing the
//! action of an arbitrary based map between stored levels. The symmetric
//! group actions are never stored separately: Σn acts on level n through
//! the rule on automorphisms of n⁺.
//!
//! Every instance carries a skeletal bound: a level K such that the
//! canonical map from the K-skeleton is an isomorphism on all stored
//! levels. That certificate (machine-checked at construction) is what
//! makes evaluation at arbitrary finite pointed sets exact: the defining
//! colimit can be restricted to levels ≤ K.

pub mod eval;
pub mod gfp;
pub mod segal;
pub mod skeleta;
pub mod smash;

use std::sync::Arc;

use thiserror::Error;

use crate::groups::{Elem, FiniteGroup, GAction, PointedGSet, SubgroupRef, SymmetricGroup};
use crate::sset::{SSetMap, SimplicialGSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GammaError {
    #[error("cap too small for {what}: needs {needed}, have {cap}")]
    CapTooSmall {
        what: String,
        needed: usize,
        cap: usize,
    },
    #[error("no skeletal certificate covers evaluation at a set of size {size}")]
    SkeletalCertificateMissing { size: usize },
    #[error("monoid is not commutative: {a} + {b} != {b} + {a}")]
    NotCommutative { a: Elem, b: Elem },
    #[error("not a monoid: {reason}")]
    BadMonoid { reason: String },
    #[error("values at level {level} are not discrete")]
    NotDiscrete { level: usize },
    #[error("not strictly cofibrant at level {level}: {detail}")]
    NotCofibrant { level: usize, detail: String },
    #[error("invalid data: {reason}")]
    Invalid { reason: String },
}

/// A based map m⁺ → n⁺ between standard level sets (or between arbitrary
/// pointed sets identified with their size). `table[i]` is the image of i,
/// with 0 the basepoint; `table[0] = 0` always.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BasedMap {
    pub source: usize,
    pub target: usize,
    pub table: Vec<Elem>,
}

impl BasedMap {
    pub fn new(source: usize, target: usize, table: Vec<Elem>) -> Result<Self, GammaError> {
        if table.len() != source + 1 || table[0] != 0 {
            return Err(GammaError::Invalid {
                reason: format!("based map table must have length {} and fix 0", source + 1),
            });
        }
        if let Some(&bad) = table.iter().find(|&&y| y as usize > target) {
            return Err(GammaError::Invalid {
                reason: format!("based map value {bad} exceeds target {target}"),
            });
        }
        Ok(BasedMap {
            source,
            target,
            table,
        })
    }

    pub fn identity(n: usize) -> Self {
        BasedMap {
            source: n,
            target: n,
            table: (0..=n as Elem).collect(),
        }
    }

    pub fn constant(source: usize, target: usize) -> Self {
        BasedMap {
            source,
            target,
            table: vec![0; source + 1],
        }
    }

    #[inline]
    pub fn apply(&self, i: Elem) -> Elem {
        self.table[i as usize]
    }

    /// self then g (usual composition g ∘ self).
    pub fn then(&self, g: &BasedMap) -> BasedMap {
        assert_eq!(self.target, g.source);
        BasedMap {
            source: self.source,
            target: g.target,
            table: self.table.iter().map(|&i| g.table[i as usize]).collect(),
        }
    }

    /// Index of this map among all based maps with the same source/target,
    /// in the base-(target+1) digit order used everywhere in this crate.
    pub fn rank(&self) -> u64 {
        let radix = self.target as u64 + 1;
        let mut r = 0u64;
        for &v in self.table.iter().skip(1).rev() {
            r = r * radix + v as u64;
        }
        r
    }

    pub fn from_rank(source: usize, target: usize, mut rank: u64) -> Self {
        let radix = target as u64 + 1;
        let mut table = vec![0 as Elem; source + 1];
        for v in table.iter_mut().skip(1) {
            *v = (rank % radix) as Elem;
            rank /= radix;
        }
        BasedMap {
            source,
            target,
            table,
        }
    }

    pub fn count(source: usize, target: usize) -> u64 {
        (target as u64 + 1).pow(source as u32)
    }

    pub fn all(source: usize, target: usize) -> Vec<BasedMap> {
        (0..Self::count(source, target))
            .map(|r| Self::from_rank(source, target, r))
            .collect()
    }

    pub fn is_injective_on_nonbase(&self) -> bool {
        let mut seen = vec![false; self.target + 1];
        for &v in self.table.iter().skip(1) {
            if v != 0 {
                if seen[v as usize] {
                    return false;
                }
                seen[v as usize] = true;
            }
        }
        true
    }

    pub fn is_surjective_onto_nonbase(&self) -> bool {
        let mut seen = vec![false; self.target + 1];
        for &v in self.table.iter().skip(1) {
            seen[v as usize] = true;
        }
        seen.iter().skip(1).all(|&s| s)
    }

    pub fn all_injective(source: usize, target: usize) -> Vec<BasedMap> {
        Self::all(source, target)
            .into_iter()
            .filter(|f| f.is_injective_on_nonbase() && f.table.iter().skip(1).all(|&v| v != 0))
            .collect()
    }

    pub fn all_surjective(source: usize, target: usize) -> Vec<BasedMap> {
        Self::all(source, target)
            .into_iter()
            .filter(|f| f.is_surjective_onto_nonbase())
            .collect()
    }

    /// Image factorization self = mono ∘ epi with the image listed in
    /// ascending order: epi: source ↠ j, mono: j ↪ target.
    pub fn epi_mono(&self) -> (BasedMap, BasedMap) {
        let mut image: Vec<Elem> = self
            .table
            .iter()
            .skip(1)
            .copied()
            .filter(|&v| v != 0)
            .collect();
        image.sort_unstable();
        image.dedup();
        let j = image.len();
        let epi_table: Vec<Elem> = self
            .table
            .iter()
            .map(|&v| {
                if v == 0 {
                    0
                } else {
                    image.binary_search(&v).unwrap() as Elem + 1
                }
            })
            .collect();
        let mut mono_table = vec![0 as Elem];
        mono_table.extend(image);
        (
            BasedMap {
                source: self.source,
                target: j,
                table: epi_table,
            },
            BasedMap {
                source: j,
                target: self.target,
                table: mono_table,
            },
        )
    }

    /// The smash pairing (k l)⁺ → (k' l')⁺ of f: k⁺→k'⁺ and g: l⁺→l'⁺
    /// under (i, j) ↦ (i−1)·l + j.
    pub fn smash(f: &BasedMap, g: &BasedMap) -> BasedMap {
        let (l, lp) = (g.source, g.target);
        let source = f.source * l;
        let target = f.target * lp;
        let table = (0..=source as Elem)
            .map(|e| {
                if e == 0 {
                    return 0;
                }
                let i = (e - 1) / l as Elem + 1;
                let j = (e - 1) % l as Elem + 1;
                let (fi, gj) = (f.apply(i), g.apply(j));
                if fi == 0 || gj == 0 {
                    0
                } else {
                    (fi - 1) * lp as Elem + gj
                }
            })
            .collect();
        BasedMap {
            source,
            target,
            table,
        }
    }

    /// The collapse p_s: size⁺ → 1⁺ sending s to 1 and everything else to
    /// the basepoint.
    pub fn collapse_at(s: Elem, size: usize) -> BasedMap {
        let mut table = vec![0 as Elem; size + 1];
        table[s as usize] = 1;
        BasedMap {
            source: size,
            target: 1,
            table,
        }
    }

    /// The fold n⁺ → 1⁺ sending every non-base element to 1.
    pub fn fold(n: usize) -> BasedMap {
        let mut table = vec![1 as Elem; n + 1];
        table[0] = 0;
        BasedMap {
            source: n,
            target: 1,
            table,
        }
    }

    /// String form "m>n:v1,...,vm" used by the JSON interface.
    pub fn encode(&self) -> String {
        let vals: Vec<String> = self
            .table
            .iter()
            .skip(1)
            .map(|v| v.to_string())
            .collect();
        format!("{}>{}:{}", self.source, self.target, vals.join(","))
    }

    pub fn decode(s: &str) -> Result<BasedMap, GammaError> {
        let err = || GammaError::Invalid {
            reason: format!("cannot parse based map {s:?}"),
        };
        let (head, vals) = s.split_once(':').ok_or_else(err)?;
        let (m, n) = head.split_once('>').ok_or_else(err)?;
        let source: usize = m.parse().map_err(|_| err())?;
        let target: usize = n.parse().map_err(|_| err())?;
        let mut table = vec![0 as Elem];
        if !vals.is_empty() {
            for v in vals.split(',') {
                table.push(v.parse().map_err(|_| err())?);
            }
        }
        BasedMap::new(source, target, table)
    }
}

/// The functorial action: rule(φ, q, x) = A(φ) applied to the degree-q
/// simplex x of values[φ.source], landing in values[φ.target].
pub type GammaRule = Arc<dyn Fn(&BasedMap, usize, Elem) -> Elem + Send + Sync>;

#[derive(Clone)]
pub struct GammaGSpace {
    pub group: Arc<FiniteGroup>,
    /// levels 0..=n_max are stored.
    pub n_max: usize,
    /// simplicial cap shared by all values.
    pub cap: usize,
    /// certified skeletal bound, if any.
    pub skeletal: Option<usize>,
    pub values: Vec<SimplicialGSet>,
    rule: GammaRule,
}

impl std::fmt::Debug for GammaGSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GammaGSpace")
            .field("n_max", &self.n_max)
            .field("cap", &self.cap)
            .field("skeletal", &self.skeletal)
            .finish()
    }
}

impl GammaGSpace {
    pub fn new_unchecked(
        group: Arc<FiniteGroup>,
        n_max: usize,
        cap: usize,
        skeletal: Option<usize>,
        values: Vec<SimplicialGSet>,
        rule: GammaRule,
    ) -> Self {
        GammaGSpace {
            group,
            n_max,
            cap,
            skeletal,
            values,
            rule,
        }
    }

    pub fn value(&self, n: usize) -> &SimplicialGSet {
        &self.values[n]
    }

    /// Apply the functorial action of a based map between stored levels.
    pub fn apply(&self, phi: &BasedMap, q: usize, x: Elem) -> Elem {
        debug_assert!(phi.source <= self.n_max && phi.target <= self.n_max);
        (self.rule)(phi, q, x)
    }

    pub fn rule(&self) -> GammaRule {
        Arc::clone(&self.rule)
    }

    /// Materialize A(φ) as a map of simplicial sets.
    pub fn map_table(&self, phi: &BasedMap) -> SSetMap {
        SSetMap {
            maps: (0..=self.cap)
                .map(|q| {
                    (0..=self.values[phi.source].size(q))
                        .map(|x| self.apply(phi, q, x))
                        .collect()
                })
                .collect(),
        }
    }

    /// All values constant in the simplicial direction?
    pub fn is_discrete(&self) -> bool {
        self.values.iter().all(|v| {
            let n0 = v.size(0);
            (0..=v.cap).all(|q| v.size(q) == n0)
                && (1..=v.cap).all(|q| (0..=n0).all(|x| v.face(q, 0, x) == x))
        })
    }

    /// The terminal Γ-G-space (every value a point).
    pub fn point(group: Arc<FiniteGroup>, n_max: usize, cap: usize) -> Self {
        let values = (0..=n_max)
            .map(|_| SimplicialGSet::point(Arc::clone(&group), cap))
            .collect();
        GammaGSpace {
            group,
            n_max,
            cap,
            skeletal: Some(0),
            values,
            rule: Arc::new(|_, _, _| 0),
        }
    }

    /// Check functor laws (identity, composition, equivariance,
    /// simpliciality) for all based maps between levels ≤ law_level.
    pub fn validate_functor(&self, law_level: usize) -> Result<(), GammaError> {
        let lv = law_level.min(self.n_max);
        for n in 0..=lv {
            let id = BasedMap::identity(n);
            for q in 0..=self.cap {
                for x in 0..=self.values[n].size(q) {
                    if self.apply(&id, q, x) != x {
                        return Err(GammaError::Invalid {
                            reason: format!("identity law fails at level {n}, degree {q}, {x}"),
                        });
                    }
                }
            }
        }
        for a in 0..=lv {
            for b in 0..=lv {
                for phi in BasedMap::all(a, b) {
                    let tbl = self.map_table(&phi);
                    tbl.validate(&self.values[a], &self.values[b], true)
                        .map_err(|e| GammaError::Invalid {
                            reason: format!("action of {} is not a map: {e}", phi.encode()),
                        })?;
                    for c in 0..=lv {
                        for psi in BasedMap::all(b, c) {
                            let comp = phi.then(&psi);
                            for q in 0..=self.cap {
                                for x in 0..=self.values[a].size(q) {
                                    if self.apply(&comp, q, x)
                                        != self.apply(&psi, q, self.apply(&phi, q, x))
                                    {
                                        return Err(GammaError::Invalid {
                                            reason: format!(
                                                "composition law fails on {} then {}",
                                                phi.encode(),
                                                psi.encode()
                                            ),
                                        });
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

    /// Level n with its G×Σn structure made explicit: the same simplicial
    /// set over the product group, (g, σ) acting by g then A(σ).
    pub fn value_with_sigma(&self, n: usize) -> SimplicialGSet {
        let sym = SymmetricGroup::new(n);
        let prod = FiniteGroup::product(&self.group, &sym.group);
        let v = &self.values[n];
        let levels: Vec<PointedGSet> = (0..=self.cap)
            .map(|q| {
                let size = v.size(q);
                let table: Vec<Vec<Elem>> = prod
                    .elements()
                    .map(|p| {
                        let (g, s) = prod.project(p).expect("product group");
                        let perm = sym.perm(s);
                        let mut tbl = vec![0 as Elem; n + 1];
                        for i in 1..=n {
                            tbl[i] = perm[i - 1] as Elem + 1;
                        }
                        let sigma = BasedMap {
                            source: n,
                            target: n,
                            table: tbl,
                        };
                        (0..=size)
                            .map(|x| self.apply(&sigma, q, v.act(g, q, x)))
                            .collect()
                    })
                    .collect();
                PointedGSet {
                    group: Arc::clone(&prod),
                    size,
                    action: GAction::Table(table),
                }
            })
            .collect();
        let faces = (0..=self.cap)
            .map(|q| {
                (0..if q == 0 { 0 } else { q + 1 })
                    .map(|i| (0..=v.size(q)).map(|x| v.face(q, i, x)).collect())
                    .collect()
            })
            .collect();
        let degens = (0..=self.cap)
            .map(|q| {
                (0..if q == self.cap { 0 } else { q + 1 })
                    .map(|i| (0..=v.size(q)).map(|x| v.degen(q, i, x)).collect())
                    .collect()
            })
            .collect();
        SimplicialGSet::new(prod, self.cap, levels, faces, degens)
    }

    /// Restrict the group action to a subgroup (values reindexed over the
    /// subgroup presented as a group in its own right).
    pub fn restrict(&self, h: &SubgroupRef) -> GammaGSpace {
        let (hg, embed) = crate::groups::subgroup_as_group(&self.group, h);
        let values: Vec<SimplicialGSet> = self
            .values
            .iter()
            .map(|v| restrict_sset(v, &hg, &embed))
            .collect();
        GammaGSpace {
            group: hg,
            n_max: self.n_max,
            cap: self.cap,
            skeletal: self.skeletal,
            values,
            rule: Arc::clone(&self.rule),
        }
    }
}

pub(crate) fn restrict_sset(
    v: &SimplicialGSet,
    hg: &Arc<FiniteGroup>,
    embed: &[usize],
) -> SimplicialGSet {
    let levels: Vec<PointedGSet> = (0..=v.cap)
        .map(|q| {
            let size = v.size(q);
            if v.levels[q].has_trivial_action() {
                PointedGSet::trivial(Arc::clone(hg), size)
            } else {
                let table = hg
                    .elements()
                    .map(|h| (0..=size).map(|x| v.act(embed[h], q, x)).collect())
                    .collect();
                PointedGSet {
                    group: Arc::clone(hg),
                    size,
                    action: GAction::Table(table),
                }
            }
        })
        .collect();
    let faces = (0..=v.cap)
        .map(|q| {
            (0..if q == 0 { 0 } else { q + 1 })
                .map(|i| (0..=v.size(q)).map(|x| v.face(q, i, x)).collect())
                .collect()
        })
        .collect();
    let degens = (0..=v.cap)
        .map(|q| {
            (0..if q == v.cap { 0 } else { q + 1 })
                .map(|i| (0..=v.size(q)).map(|x| v.degen(q, i, x)).collect())
                .collect()
        })
        .collect();
    SimplicialGSet::new(Arc::clone(hg), v.cap, levels, faces, degens)
}

/// A morphism of Γ-G-spaces, one pointed simplicial map per stored level.
#[derive(Clone, Debug)]
pub struct GammaMap {
    pub levels: Vec<SSetMap>,
}

impl GammaMap {
    pub fn identity(a: &GammaGSpace) -> Self {
        GammaMap {
            levels: a.values.iter().map(SSetMap::identity).collect(),
        }
    }

    pub fn constant(a: &GammaGSpace) -> Self {
        GammaMap {
            levels: a.values.iter().map(SSetMap::constant).collect(),
        }
    }

    /// Check naturality, equivariance and simpliciality against explicit
    /// source and target.
    pub fn validate(&self, a: &GammaGSpace, b: &GammaGSpace) -> Result<(), GammaError> {
        if self.levels.len() != a.n_max + 1 || a.n_max != b.n_max {
            return Err(GammaError::Invalid {
                reason: "level count mismatch".into(),
            });
        }
        for n in 0..=a.n_max {
            self.levels[n]
                .validate(&a.values[n], &b.values[n], true)
                .map_err(|e| GammaError::Invalid {
                    reason: format!("level {n}: {e}"),
                })?;
        }
        for m in 0..=a.n_max {
            for n in 0..=a.n_max {
                for phi in BasedMap::all(m, n) {
                    for q in 0..=a.cap {
                        for x in 0..=a.values[m].size(q) {
                            let down = self.levels[n].apply(q, a.apply(&phi, q, x));
                            let over = b.apply(&phi, q, self.levels[m].apply(q, x));
                            if down != over {
                                return Err(GammaError::Invalid {
                                    reason: format!(
                                        "naturality fails on {} at degree {q}, element {x}",
                                        phi.encode()
                                    ),
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_levelwise_bijective(&self, b: &GammaGSpace) -> bool {
        self.levels
            .iter()
            .zip(&b.values)
            .all(|(f, v)| f.is_bijective_onto(v))
    }
}

/// A finite commutative pointed G-monoid: elements 0..=size with 0 the
/// unit, a commutative associative addition, and G acting by monoid maps.
#[derive(Clone, Debug)]
pub struct CommMonoid {
    pub group: Arc<FiniteGroup>,
    pub size: u32,
    add: Vec<Elem>,
    pub action: GAction,
}

impl CommMonoid {
    pub fn new(
        group: Arc<FiniteGroup>,
        size: u32,
        table: &[Vec<Elem>],
        action: GAction,
    ) -> Result<Self, GammaError> {
        let n = size as usize + 1;
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(GammaError::BadMonoid {
                reason: format!("addition table must be {n}x{n}"),
            });
        }
        for (i, row) in table.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v as usize >= n {
                    return Err(GammaError::BadMonoid {
                        reason: format!("entry ({i},{j}) out of range"),
                    });
                }
            }
        }
        for a in 0..n {
            if table[0][a] != a as Elem || table[a][0] != a as Elem {
                return Err(GammaError::BadMonoid {
                    reason: "0 is not a unit".into(),
                });
            }
        }
        for a in 0..n as Elem {
            for b in 0..n as Elem {
                if table[a as usize][b as usize] != table[b as usize][a as usize] {
                    return Err(GammaError::NotCommutative { a, b });
                }
                for c in 0..n as Elem {
                    let ab_c = table[table[a as usize][b as usize] as usize][c as usize];
                    let a_bc = table[a as usize][table[b as usize][c as usize] as usize];
                    if ab_c != a_bc {
                        return Err(GammaError::BadMonoid {
                            reason: format!("not associative at ({a},{b},{c})"),
                        });
                    }
                }
            }
        }
        let m = CommMonoid {
            group: Arc::clone(&group),
            size,
            add: table.iter().flatten().copied().collect(),
            action,
        };
        // the action must consist of monoid maps
        let as_pointed = PointedGSet {
            group,
            size,
            action: m.action.clone(),
        };
        as_pointed.validate().map_err(|e| GammaError::BadMonoid {
            reason: format!("action invalid: {e}"),
        })?;
        for g in m.group.elements() {
            for a in 0..=size {
                for b in 0..=size {
                    if as_pointed.act(g, m.sum(a, b)) != m.sum(as_pointed.act(g, a), as_pointed.act(g, b))
                    {
                        return Err(GammaError::BadMonoid {
                            reason: format!("group element {g} is not a monoid map"),
                        });
                    }
                }
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn sum(&self, a: Elem, b: Elem) -> Elem {
        self.add[a as usize * (self.size as usize + 1) + b as usize]
    }

    pub fn act(&self, g: usize, a: Elem) -> Elem {
        self.action.apply(g, a)
    }

    /// Z/2 = {0, 1} with 1 + 1 = 0, trivial action.
    pub fn z2(group: Arc<FiniteGroup>) -> Self {
        CommMonoid::new(group, 1, &[vec![0, 1], vec![1, 0]], GAction::Trivial).unwrap()
    }

    /// The saturated monoid {0, 1} with 1 + 1 = 1 (boolean or).
    pub fn bool_or(group: Arc<FiniteGroup>) -> Self {
        CommMonoid::new(group, 1, &[vec![0, 1], vec![1, 1]], GAction::Trivial).unwrap()
    }
}

/// The representable Γ-G-space Γ(S⁺, −): level n is the discrete set of
/// based maps S⁺ → n⁺, with G acting by precomposing the inverse action
/// on S. Skeletal bound |S|, machine-checked.
pub fn representable(
    s: &PointedGSet,
    n_max: usize,
    cap: usize,
) -> Result<GammaGSpace, GammaError> {
    let group = Arc::clone(&s.group);
    let ssize = s.size as usize;
    let mut values = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let total = (n as u64 + 1).pow(ssize as u32);
        let size = (total - 1) as u32;
        let level = if s.has_trivial_action() {
            PointedGSet::trivial(Arc::clone(&group), size)
        } else {
            let table = group
                .elements()
                .map(|g| {
                    let gi = group.inv(g);
                    (0..=size)
                        .map(|x| {
                            // (g·m)(s) = m(g⁻¹ s)
                            let radix = n as u64 + 1;
                            let mut digits = vec![0 as Elem; ssize];
                            let mut v = x as u64;
                            for d in digits.iter_mut() {
                                *d = (v % radix) as Elem;
                                v /= radix;
                            }
                            let mut out = 0u64;
                            for i in (0..ssize).rev() {
                                let pre = s.act(gi, i as Elem + 1);
                                let dv = if pre == 0 { 0 } else { digits[pre as usize - 1] };
                                out = out * radix + dv as u64;
                            }
                            out as Elem
                        })
                        .collect()
                })
                .collect();
            PointedGSet {
                group: Arc::clone(&group),
                size,
                action: GAction::Table(table),
            }
        };
        values.push(SimplicialGSet::discrete(&level, cap));
    }
    let skeletal = ssize.min(n_max);
    let rule: GammaRule = {
        let ssize = ssize;
        Arc::new(move |phi: &BasedMap, _q, x| {
            let radix = phi.source as u64 + 1;
            let out_radix = phi.target as u64 + 1;
            let mut v = x as u64;
            let mut out = vec![0 as Elem; ssize];
            for o in out.iter_mut() {
                *o = phi.apply((v % radix) as Elem);
                v /= radix;
            }
            let mut r = 0u64;
            for &o in out.iter().rev() {
                r = r * out_radix + o as u64;
            }
            r as Elem
        })
    };
    let a = GammaGSpace {
        group,
        n_max,
        cap,
        skeletal: None,
        values,
        rule,
    };
    eval::certify_skeletal(a, skeletal)
}

/// The induced representable G⁺ ∧_H Γ_H(S⁺, −) for a pointed H-set S,
/// presented by pairs (coset representative, non-base map S⁺ → n⁺) with
/// gh ∧ φ identified with g ∧ φ(h⁻¹·−). G acts on the left factor.
pub fn induced_representable(
    group: &Arc<FiniteGroup>,
    h: &SubgroupRef,
    s: &PointedGSet,
    n_max: usize,
    cap: usize,
) -> Result<GammaGSpace, GammaError> {
    let (hg, embed) = crate::groups::subgroup_as_group(group, h);
    assert_eq!(
        *s.group, *hg,
        "S must be a pointed set over the subgroup as a group"
    );
    let cosets = crate::groups::left_cosets(group, h);
    let ssize = s.size as usize;
    let nc = cosets.len();
    // position of each ambient element's coset and the H-part: g = cosets[c] · h
    let mut decomp = vec![(0usize, 0usize); group.order()];
    for g in group.elements() {
        let mut found = None;
        for (c, &rep) in cosets.iter().enumerate() {
            let inv_rep = group.inv(rep);
            let hpart = group.mul(inv_rep, g);
            if let Some(hidx) = embed.iter().position(|&e| e == hpart) {
                found = Some((c, hidx));
                break;
            }
        }
        decomp[g] = found.expect("cosets cover the group");
    }
    let mut values = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let per = (n as u64 + 1).pow(ssize as u32) - 1; // non-base maps
        let size = (nc as u64 * per) as u32;
        let table = group
            .elements()
            .map(|gp| {
                (0..=size)
                    .map(|x| {
                        if x == 0 {
                            return 0;
                        }
                        let c = (x as u64 - 1) / per;
                        let phi_rank = (x as u64 - 1) % per + 1;
                        let g_new = group.mul(gp, cosets[c as usize]);
                        let (c2, hidx) = decomp[g_new];
                        // canonical form: (c2, φ ∘ (h⁻¹ · −))
                        let hinv = hg.inv(hidx);
                        let radix = n as u64 + 1;
                        let mut digits = vec![0 as Elem; ssize];
                        let mut v = phi_rank;
                        for d in digits.iter_mut() {
                            *d = (v % radix) as Elem;
                            v /= radix;
                        }
                        let mut out = 0u64;
                        for i in (0..ssize).rev() {
                            let pre = s.act(hinv, i as Elem + 1);
                            let dv = if pre == 0 { 0 } else { digits[pre as usize - 1] };
                            out = out * radix + dv as u64;
                        }
                        (c2 as u64 * per + out) as Elem
                    })
                    .collect()
            })
            .collect();
        let level = PointedGSet {
            group: Arc::clone(group),
            size,
            action: GAction::Table(table),
        };
        values.push(SimplicialGSet::discrete(&level, cap));
    }
    let rule: GammaRule = {
        let ssize = ssize;
        Arc::new(move |phi: &BasedMap, _q, x| {
            if x == 0 {
                return 0;
            }
            let per_src = (phi.source as u64 + 1).pow(ssize as u32) - 1;
            let per_tgt = (phi.target as u64 + 1).pow(ssize as u32) - 1;
            let c = (x as u64 - 1) / per_src;
            let mut v = (x as u64 - 1) % per_src + 1;
            let radix = phi.source as u64 + 1;
            let out_radix = phi.target as u64 + 1;
            let mut out = vec![0 as Elem; ssize];
            for o in out.iter_mut() {
                *o = phi.apply((v % radix) as Elem);
                v /= radix;
            }
            let mut r = 0u64;
            for &o in out.iter().rev() {
                r = r * out_radix + o as u64;
            }
            if r == 0 {
                0
            } else {
                (c * per_tgt + r) as Elem
            }
        })
    };
    let a = GammaGSpace {
        group: Arc::clone(group),
        n_max,
        cap,
        skeletal: None,
        values,
        rule,
    };
    eval::certify_skeletal(a, ssize.min(n_max))
}

/// The Eilenberg-MacLane Γ-G-space of a finite commutative pointed
/// G-monoid: level n is the discrete set M^n, and a based map acts by
/// summing over its fibers. Declared skeletal at n_max (certified there).
pub fn eilenberg_maclane(
    m: &CommMonoid,
    n_max: usize,
    cap: usize,
) -> Result<GammaGSpace, GammaError> {
    let group = Arc::clone(&m.group);
    let msize = m.size as u64 + 1;
    let mut values = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let size = (msize.pow(n as u32) - 1) as u32;
        let trivial = matches!(m.action, GAction::Trivial);
        let level = if trivial {
            PointedGSet::trivial(Arc::clone(&group), size)
        } else {
            let table = group
                .elements()
                .map(|g| {
                    (0..=size)
                        .map(|x| {
                            let mut v = x as u64;
                            let mut out = 0u64;
                            let mut digits = vec![0 as Elem; n];
                            for d in digits.iter_mut() {
                                *d = (v % msize) as Elem;
                                v /= msize;
                            }
                            for i in (0..n).rev() {
                                out = out * msize + m.act(g, digits[i]) as u64;
                            }
                            out as Elem
                        })
                        .collect()
                })
                .collect();
            PointedGSet {
                group: Arc::clone(&group),
                size,
                action: GAction::Table(table),
            }
        };
        values.push(SimplicialGSet::discrete(&level, cap));
    }
    let rule: GammaRule = {
        let m = m.clone();
        let msize = msize;
        Arc::new(move |phi: &BasedMap, _q, x| {
            let mut v = x as u64;
            let mut out = vec![0 as Elem; phi.target];
            for i in 1..=phi.source {
                let d = (v % msize) as Elem;
                v /= msize;
                let j = phi.apply(i as Elem);
                if j != 0 {
                    out[j as usize - 1] = m.sum(out[j as usize - 1], d);
                }
            }
            let mut r = 0u64;
            for &o in out.iter().rev() {
                r = r * msize + o as u64;
            }
            r as Elem
        })
    };
    let a = GammaGSpace {
        group,
        n_max,
        cap,
        skeletal: None,
        values,
        rule,
    };
    eval::certify_skeletal(a, n_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::FiniteGSet;

    #[test]
    fn based_map_roundtrip_and_factorization() {
        let f = BasedMap::new(3, 2, vec![0, 2, 0, 2]).unwrap();
        assert_eq!(BasedMap::from_rank(3, 2, f.rank()), f);
        assert_eq!(BasedMap::decode(&f.encode()).unwrap(), f);
        let (e, m) = f.epi_mono();
        assert!(e.is_surjective_onto_nonbase());
        assert!(m.is_injective_on_nonbase());
        assert_eq!(e.then(&m), f);
        assert_eq!(m.source, 1); // image is {2}
    }

    #[test]
    fn based_map_families() {
        assert_eq!(BasedMap::all(2, 2).len(), 9);
        assert_eq!(BasedMap::all_injective(2, 3).len(), 6);
        assert_eq!(BasedMap::all_surjective(2, 2).len(), 2);
        // onto-nonbase maps 3⁺ → 2⁺: 3² − 2·1... enumerate instead
        assert_eq!(BasedMap::all_surjective(3, 2).len(), 12);
        assert_eq!(BasedMap::all_surjective(3, 1).len(), 7);
    }

    #[test]
    fn smash_pairing_is_functorial() {
        let f = BasedMap::new(2, 2, vec![0, 2, 1]).unwrap();
        let g = BasedMap::new(2, 1, vec![0, 1, 0]).unwrap();
        let fg = BasedMap::smash(&f, &g);
        assert_eq!(fg.source, 4);
        assert_eq!(fg.target, 2);
        let f2 = BasedMap::identity(2);
        let g2 = BasedMap::fold(1);
        let comp_then_smash = BasedMap::smash(&f.then(&f2), &g.then(&g2));
        let smash_then_comp = fg.then(&BasedMap::smash(&f2, &g2));
        assert_eq!(comp_then_smash, smash_then_comp);
    }

    #[test]
    fn representable_counts() {
        let g = FiniteGroup::trivial();
        let one = PointedGSet::trivial(Arc::clone(&g), 1);
        let a = representable(&one, 3, 2).unwrap();
        for n in 0..=3 {
            assert_eq!(a.value(n).size(0), n as u32);
        }
        assert_eq!(a.skeletal, Some(1));
        let two = PointedGSet::trivial(g, 2);
        let b = representable(&two, 2, 2).unwrap();
        assert_eq!(b.value(2).size(0), 8);
        b.validate_functor(2).unwrap();
    }

    #[test]
    fn representable_with_free_orbit_action() {
        let z2 = FiniteGroup::cyclic(2);
        let s = FiniteGSet::free_orbit(Arc::clone(&z2)).to_pointed();
        let a = representable(&s, 2, 2).unwrap();
        // maps (Z/2)⁺ → 1⁺: 3 non-base; swap fixes only the full-support map
        assert_eq!(a.value(1).size(0), 3);
        let fixed = a.value(1).levels[0].fixed_elems(&SubgroupRef::full(&z2));
        assert_eq!(fixed.len(), 1);
        a.validate_functor(2).unwrap();
    }

    #[test]
    fn induced_representable_counts_and_restriction() {
        let z2 = FiniteGroup::cyclic(2);
        let triv = SubgroupRef::trivial(&z2);
        let (hg, _) = crate::groups::subgroup_as_group(&z2, &triv);
        let s = PointedGSet::trivial(hg, 1);
        let a = induced_representable(&z2, &triv, &s, 2, 2).unwrap();
        assert_eq!(a.value(1).size(0), 2); // |G| · 1
        assert_eq!(a.value(2).size(0), 4);
        a.validate_functor(2).unwrap();
        // H = G reduces to the plain representable
        let full = SubgroupRef::full(&z2);
        let (hg2, _) = crate::groups::subgroup_as_group(&z2, &full);
        let s2 = PointedGSet::trivial(hg2, 1);
        let b = induced_representable(&z2, &full, &s2, 2, 2).unwrap();
        let one = PointedGSet::trivial(Arc::clone(&z2), 1);
        let r = representable(&one, 2, 2).unwrap();
        for n in 0..=2 {
            assert_eq!(b.value(n).size(0), r.value(n).size(0));
        }
    }

    #[test]
    fn eilenberg_maclane_values_and_monoid_errors() {
        let g = FiniteGroup::trivial();
        let m = CommMonoid::z2(Arc::clone(&g));
        let a = eilenberg_maclane(&m, 3, 2).unwrap();
        assert_eq!(a.value(2).size(0), 3); // 2² − 1
        a.validate_functor(3).unwrap();
        // fold 2⁺→1⁺ adds coordinates: (1,1) ↦ 0
        let fold = BasedMap::fold(2);
        let x11 = 1 + 2; // digits (1,1)
        assert_eq!(a.apply(&fold, 0, x11), 0);
        let bad = CommMonoid::new(
            Arc::clone(&g),
            1,
            &[vec![0, 1], vec![1, 0]],
            GAction::Trivial,
        );
        assert!(bad.is_ok());
        let noncomm = CommMonoid::new(
            Arc::clone(&g),
            2,
            &[vec![0, 1, 2], vec![1, 1, 1], vec![2, 2, 2]],
            GAction::Trivial,
        );
        assert!(matches!(
            noncomm.unwrap_err(),
            GammaError::NotCommutative { .. }
        ));
    }

    #[test]
    fn value_with_sigma_action() {
        let g = FiniteGroup::trivial();
        let two = PointedGSet::trivial(g, 2);
        let a = representable(&two, 2, 1).unwrap();
        let v = a.value_with_sigma(2);
        v.validate().unwrap();
        // the swap in Σ2 must act nontrivially on Γ(2⁺,2⁺)
        let prod = &v.group;
        let nontrivial = prod
            .elements()
            .any(|p| (0..=v.size(0)).any(|x| v.levels[0].act(p, x) != x));
        assert!(nontrivial);
    }
}
