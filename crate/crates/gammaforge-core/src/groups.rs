//! Finite groups as multiplication tables, subgroup enumeration, and finite
//! (pointed) G-sets.
//!
//! Group elements are indices `0..order`. A pointed G-set keeps index 0 as
//! the basepoint and elements `1..=size` as the rest; unpointed index sets
//! (the `S` and `M` that spheres and products are indexed by) use
//! [`FiniteGSet`] with elements `0..size`.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

/// Element of a pointed set. 0 is always the basepoint.
pub type Elem = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("multiplication is not associative: witness ({a}, {b}, {c})")]
    NonAssociative { a: usize, b: usize, c: usize },
    #[error("no two-sided identity element")]
    NoIdentity,
    #[error("element {g} has no two-sided inverse")]
    NoInverse { g: usize },
    #[error("multiplication table is not {order} x {order}")]
    BadTableShape { order: usize },
    #[error("table entry {value} at ({row}, {col}) is out of range")]
    EntryOutOfRange {
        row: usize,
        col: usize,
        value: usize,
    },
    #[error("group was not constructed as a product; factor projections unavailable")]
    NotProductGroup,
    #[error("invalid action: {reason}")]
    BadAction { reason: String },
}

/// A finite group presented by its full multiplication table.
#[derive(Debug)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<usize>,
    identity: usize,
    inv: Vec<usize>,
    /// Set when the group was built as `A x B`; element `(a, b)` has index
    /// `a * |B| + b`.
    product_of: Option<(Arc<FiniteGroup>, Arc<FiniteGroup>)>,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.mul == other.mul
    }
}
impl Eq for FiniteGroup {}

impl FiniteGroup {
    /// Validate a multiplication table and build the group.
    /// Errors carry witnesses: the failing triple, or the element without an
    /// inverse.
    pub fn from_table(table: &[Vec<usize>]) -> Result<Arc<Self>, GroupError> {
        let order = table.len();
        if order == 0 {
            return Err(GroupError::NoIdentity);
        }
        for row in table {
            if row.len() != order {
                return Err(GroupError::BadTableShape { order });
            }
        }
        let mut mul = vec![0usize; order * order];
        for (i, row) in table.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v >= order {
                    return Err(GroupError::EntryOutOfRange {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
                mul[i * order + j] = v;
            }
        }
        let at = |a: usize, b: usize| mul[a * order + b];
        let identity = (0..order)
            .find(|&e| (0..order).all(|g| at(e, g) == g && at(g, e) == g))
            .ok_or(GroupError::NoIdentity)?;
        let mut inv = vec![usize::MAX; order];
        for g in 0..order {
            inv[g] = (0..order)
                .find(|&h| at(g, h) == identity && at(h, g) == identity)
                .ok_or(GroupError::NoInverse { g })?;
        }
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if at(at(a, b), c) != at(a, at(b, c)) {
                        return Err(GroupError::NonAssociative { a, b, c });
                    }
                }
            }
        }
        Ok(Arc::new(FiniteGroup {
            order,
            mul,
            identity,
            inv,
            product_of: None,
        }))
    }

    pub fn trivial() -> Arc<Self> {
        FiniteGroup::from_table(&[vec![0]]).expect("trivial group")
    }

    pub fn cyclic(n: usize) -> Arc<Self> {
        assert!(n >= 1);
        let table: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        FiniteGroup::from_table(&table).expect("cyclic group")
    }

    /// Product group `A x B`, element `(a, b)` at index `a * |B| + b`.
    /// Remembers the factors so isotropy queries can project.
    pub fn product(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> Arc<Self> {
        let order = a.order * b.order;
        let mut mul = vec![0usize; order * order];
        for a1 in 0..a.order {
            for b1 in 0..b.order {
                for a2 in 0..a.order {
                    for b2 in 0..b.order {
                        let x = a1 * b.order + b1;
                        let y = a2 * b.order + b2;
                        mul[x * order + y] = a.mul(a1, a2) * b.order + b.mul(b1, b2);
                    }
                }
            }
        }
        let identity = a.identity * b.order + b.identity;
        let inv = (0..order)
            .map(|g| a.inv(g / b.order) * b.order + b.inv(g % b.order))
            .collect();
        Arc::new(FiniteGroup {
            order,
            mul,
            identity,
            inv,
            product_of: Some((Arc::clone(a), Arc::clone(b))),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    pub fn inv(&self, g: usize) -> usize {
        self.inv[g]
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn factors(&self) -> Result<(&Arc<FiniteGroup>, &Arc<FiniteGroup>), GroupError> {
        self.product_of
            .as_ref()
            .map(|(a, b)| (a, b))
            .ok_or(GroupError::NotProductGroup)
    }

    pub fn pair_index(&self, a: usize, b: usize) -> usize {
        let (_, fb) = self.product_of.as_ref().expect("product group");
        a * fb.order + b
    }

    pub fn project(&self, g: usize) -> Result<(usize, usize), GroupError> {
        let (_, fb) = self.factors()?;
        Ok((g / fb.order, g % fb.order))
    }

    pub fn mul_table(&self) -> Vec<Vec<usize>> {
        (0..self.order)
            .map(|i| (0..self.order).map(|j| self.mul(i, j)).collect())
            .collect()
    }

    /// Order of the cyclic subgroup generated by `g`.
    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut n = 1;
        while x != self.identity {
            x = self.mul(x, g);
            n += 1;
        }
        n
    }
}

/// Symmetric group on `{0..n-1}` with permutations enumerated in
/// lexicographic order of their one-line notation. Composition convention:
/// `group.mul(s, t)` is s after t, i.e. `(s ∘ t)(i) = s(t(i))`.
pub struct SymmetricGroup {
    pub n: usize,
    pub group: Arc<FiniteGroup>,
    perms: Vec<Vec<u8>>,
}

fn permutations(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur: Vec<u8> = (0..n as u8).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    if n == 0 {
        out = vec![vec![]];
    }
    out
}

impl SymmetricGroup {
    pub fn new(n: usize) -> Self {
        let perms = permutations(n);
        let order = perms.len();
        let rank = |p: &[u8]| -> usize {
            // factorial number system rank; n is tiny so linear digits are fine
            let mut rest: Vec<u8> = (0..n as u8).collect();
            let mut r = 0usize;
            let mut fact = (1..=n.saturating_sub(1)).product::<usize>().max(1);
            for (k, &v) in p.iter().enumerate() {
                let pos = rest.iter().position(|&x| x == v).unwrap();
                r += pos * fact;
                rest.remove(pos);
                if k + 1 < n {
                    fact /= n - 1 - k;
                }
            }
            r
        };
        let mut table = vec![vec![0usize; order]; order];
        for (s, ps) in perms.iter().enumerate() {
            for (t, pt) in perms.iter().enumerate() {
                let comp: Vec<u8> = (0..n).map(|i| ps[pt[i] as usize]).collect();
                table[s][t] = rank(&comp);
            }
        }
        let group = FiniteGroup::from_table(&table).expect("symmetric group");
        SymmetricGroup { n, group, perms }
    }

    pub fn perm(&self, idx: usize) -> &[u8] {
        &self.perms[idx]
    }

    pub fn apply(&self, idx: usize, i: usize) -> usize {
        self.perms[idx][i] as usize
    }

    pub fn rank(&self, p: &[u8]) -> usize {
        self.perms
            .iter()
            .position(|q| q.as_slice() == p)
            .expect("permutation of the right degree")
    }

    /// Block embedding of `Σk x Σl` into `Σ(k+l)`: `(s, t)` acts on the first
    /// `k` letters by `s` and the last `l` by `t`.
    pub fn block_rank(&self, k: usize, s: &[u8], t: &[u8]) -> usize {
        let mut p: Vec<u8> = Vec::with_capacity(self.n);
        p.extend(s.iter().copied());
        p.extend(t.iter().map(|&x| x + k as u8));
        self.rank(&p)
    }
}

/// A subgroup recorded as its sorted element list (always contains the
/// identity). Ordering is by (order, elements), which is the canonical
/// enumeration order everywhere in the crate.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SubgroupRef {
    elements: Vec<usize>,
}

impl SubgroupRef {
    pub fn new(group: &FiniteGroup, mut elements: Vec<usize>) -> Result<Self, GroupError> {
        elements.sort_unstable();
        elements.dedup();
        let h = SubgroupRef { elements };
        if !h.is_subgroup_of(group) {
            return Err(GroupError::BadAction {
                reason: "element list is not closed under multiplication and inverse".into(),
            });
        }
        Ok(h)
    }

    pub fn trivial(group: &FiniteGroup) -> Self {
        SubgroupRef {
            elements: vec![group.identity()],
        }
    }

    pub fn full(group: &FiniteGroup) -> Self {
        SubgroupRef {
            elements: group.elements().collect(),
        }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.elements.binary_search(&g).is_ok()
    }

    pub fn is_subgroup_of(&self, group: &FiniteGroup) -> bool {
        if !self.contains(group.identity()) {
            return false;
        }
        self.elements.iter().all(|&a| {
            self.contains(group.inv(a))
                && self.elements.iter().all(|&b| self.contains(group.mul(a, b)))
        })
    }
}

/// Subgroup generated by `gens`.
pub fn closure(group: &FiniteGroup, gens: &[usize]) -> SubgroupRef {
    let mut seen = vec![false; group.order()];
    seen[group.identity()] = true;
    let mut stack = vec![group.identity()];
    for &g in gens {
        if !seen[g] {
            seen[g] = true;
            stack.push(g);
        }
    }
    // close under multiplication (inverses follow in a finite group)
    let mut changed = true;
    while changed {
        changed = false;
        let current: Vec<usize> = (0..group.order()).filter(|&g| seen[g]).collect();
        for &a in &current {
            for &b in &current {
                let c = group.mul(a, b);
                if !seen[c] {
                    seen[c] = true;
                    changed = true;
                }
            }
        }
    }
    let _ = stack;
    SubgroupRef {
        elements: (0..group.order()).filter(|&g| seen[g]).collect(),
    }
}

/// All subgroups, sorted by (order, element list). Brute-force join closure:
/// start from the cyclic subgroups and repeatedly join pairs until stable.
/// Every subgroup is a join of cyclic ones, so this finds them all.
pub fn subgroups(group: &FiniteGroup) -> Vec<SubgroupRef> {
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    found.insert(vec![group.identity()]);
    let cyclics: Vec<SubgroupRef> = group.elements().map(|g| closure(group, &[g])).collect();
    for c in &cyclics {
        found.insert(c.elements.clone());
    }
    loop {
        let snapshot: Vec<Vec<usize>> = found.iter().cloned().collect();
        let before = found.len();
        for h in &snapshot {
            for c in &cyclics {
                let mut gens = h.clone();
                gens.extend_from_slice(c.elements());
                found.insert(closure(group, &gens).elements);
            }
        }
        if found.len() == before {
            break;
        }
    }
    let mut out: Vec<SubgroupRef> = found
        .into_iter()
        .map(|elements| SubgroupRef { elements })
        .collect();
    out.sort_by(|a, b| (a.order(), &a.elements).cmp(&(b.order(), &b.elements)));
    out
}

/// The conjugate subgroup `g H g^{-1}`.
pub fn conjugate_subgroup(group: &FiniteGroup, h: &SubgroupRef, g: usize) -> SubgroupRef {
    let gi = group.inv(g);
    let mut elements: Vec<usize> = h
        .elements()
        .iter()
        .map(|&x| group.mul(group.mul(g, x), gi))
        .collect();
    elements.sort_unstable();
    SubgroupRef { elements }
}

/// Build a subgroup as a standalone group. Returns the group and the
/// embedding (new index -> ambient element, sorted ascending).
pub fn subgroup_as_group(
    group: &FiniteGroup,
    h: &SubgroupRef,
) -> (Arc<FiniteGroup>, Vec<usize>) {
    let embed: Vec<usize> = h.elements().to_vec();
    let index_of = |g: usize| embed.binary_search(&g).expect("closed subgroup");
    let table: Vec<Vec<usize>> = embed
        .iter()
        .map(|&a| embed.iter().map(|&b| index_of(group.mul(a, b))).collect())
        .collect();
    (
        FiniteGroup::from_table(&table).expect("subgroup closure is a group"),
        embed,
    )
}

/// Left cosets gH of a subgroup, as sorted min-representative list.
pub fn left_cosets(group: &FiniteGroup, h: &SubgroupRef) -> Vec<usize> {
    let mut seen = vec![false; group.order()];
    let mut reps = Vec::new();
    for g in group.elements() {
        if seen[g] {
            continue;
        }
        reps.push(g);
        for &x in h.elements() {
            seen[group.mul(g, x)] = true;
        }
    }
    reps
}

/// An unpointed finite G-set; elements `0..size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGSet {
    pub group: Arc<FiniteGroup>,
    pub size: usize,
    action: Vec<Vec<u32>>,
}

impl FiniteGSet {
    pub fn new(group: Arc<FiniteGroup>, action: Vec<Vec<u32>>) -> Result<Self, GroupError> {
        let size = action.first().map_or(0, |row| row.len());
        if action.len() != group.order() {
            return Err(GroupError::BadAction {
                reason: format!("need one permutation per group element, got {}", action.len()),
            });
        }
        let set = FiniteGSet { group, size, action };
        set.validate()?;
        Ok(set)
    }

    pub fn trivial(group: Arc<FiniteGroup>, size: usize) -> Self {
        let row: Vec<u32> = (0..size as u32).collect();
        let action = vec![row; group.order()];
        FiniteGSet { group, size, action }
    }

    /// G acting on itself by left multiplication.
    pub fn free_orbit(group: Arc<FiniteGroup>) -> Self {
        let action = group
            .elements()
            .map(|g| group.elements().map(|x| group.mul(g, x) as u32).collect())
            .collect();
        let size = group.order();
        FiniteGSet { group, size, action }
    }

    /// The coset space G/H with left translation action. Element `i` is the
    /// coset of `reps[i]` where `reps` are minimal representatives.
    pub fn cosets(group: Arc<FiniteGroup>, h: &SubgroupRef) -> Self {
        let reps = left_cosets(&group, h);
        let coset_index = |g: usize| -> u32 {
            reps.iter()
                .position(|&r| {
                    // g in rH  <=>  r^{-1} g in H
                    h.contains(group.mul(group.inv(r), g))
                })
                .expect("cosets partition the group") as u32
        };
        let action: Vec<Vec<u32>> = group
            .elements()
            .map(|g| reps.iter().map(|&r| coset_index(group.mul(g, r))).collect())
            .collect();
        FiniteGSet {
            size: reps.len(),
            group,
            action,
        }
    }

    pub fn disjoint_union(&self, other: &FiniteGSet) -> FiniteGSet {
        assert_eq!(self.group, other.group);
        let action = self
            .group
            .elements()
            .map(|g| {
                let mut row: Vec<u32> = self.action[g].clone();
                row.extend(other.action[g].iter().map(|&x| x + self.size as u32));
                row
            })
            .collect();
        FiniteGSet {
            group: Arc::clone(&self.group),
            size: self.size + other.size,
            action,
        }
    }

    pub fn act(&self, g: usize, i: usize) -> usize {
        self.action[g][i] as usize
    }

    pub fn validate(&self) -> Result<(), GroupError> {
        let g0 = self.group.identity();
        for i in 0..self.size {
            if self.act(g0, i) != i {
                return Err(GroupError::BadAction {
                    reason: format!("identity moves element {i}"),
                });
            }
        }
        for g in self.group.elements() {
            if self.action[g].len() != self.size {
                return Err(GroupError::BadAction {
                    reason: format!("row for group element {g} has the wrong length"),
                });
            }
            let mut seen = vec![false; self.size];
            for i in 0..self.size {
                let j = self.act(g, i);
                if j >= self.size || seen[j] {
                    return Err(GroupError::BadAction {
                        reason: format!("group element {g} does not act bijectively"),
                    });
                }
                seen[j] = true;
            }
            for h in self.group.elements() {
                for i in 0..self.size {
                    if self.act(g, self.act(h, i)) != self.act(self.group.mul(g, h), i) {
                        return Err(GroupError::BadAction {
                            reason: format!("action not compatible at g={g}, h={h}, x={i}"),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn fixed(&self, h: &SubgroupRef) -> Vec<usize> {
        (0..self.size)
            .filter(|&i| h.elements().iter().all(|&g| self.act(g, i) == i))
            .collect()
    }

    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.size];
        let mut out = Vec::new();
        for i in 0..self.size {
            if seen[i] {
                continue;
            }
            let mut orbit: Vec<usize> = self.group.elements().map(|g| self.act(g, i)).collect();
            orbit.sort_unstable();
            orbit.dedup();
            for &x in &orbit {
                seen[x] = true;
            }
            out.push(orbit);
        }
        out
    }

    pub fn stabilizer(&self, i: usize) -> SubgroupRef {
        SubgroupRef {
            elements: self.group.elements().filter(|&g| self.act(g, i) == i).collect(),
        }
    }

    /// Restrict the action to a subgroup, reindexed as its own group.
    pub fn restrict(&self, h: &SubgroupRef) -> FiniteGSet {
        let (hg, embed) = subgroup_as_group(&self.group, h);
        let action = embed.iter().map(|&g| self.action[g].clone()).collect();
        FiniteGSet {
            group: hg,
            size: self.size,
            action,
        }
    }

    /// Add a disjoint basepoint: elements shift up by one.
    pub fn to_pointed(&self) -> PointedGSet {
        let table = self
            .group
            .elements()
            .map(|g| {
                let mut row = vec![0 as Elem; self.size + 1];
                for i in 0..self.size {
                    row[i + 1] = self.action[g][i] + 1;
                }
                row
            })
            .collect();
        PointedGSet {
            group: Arc::clone(&self.group),
            size: self.size as u32,
            action: GAction::Table(table),
        }
    }
}

/// Action data of a pointed G-set. `Trivial` avoids materializing identity
/// permutations for the very large levels that show up in product spectra;
/// `Power` keeps slotwise actions on powers factored, so a level with
/// millions of tuples stays a few kilobytes of tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GAction {
    Trivial,
    Table(Vec<Vec<Elem>>),
    /// Elements are little-endian tuples of `slots` digits below `radix`
    /// (digit 0 = inner basepoint, the all-zero tuple is the basepoint).
    /// Slot j of g·x is `inner[g]` applied to slot `source[g][j]` of x.
    Power {
        radix: u64,
        slots: usize,
        source: Vec<Vec<u32>>,
        inner: Vec<Vec<Elem>>,
    },
}

impl GAction {
    pub fn apply(&self, g: usize, e: Elem) -> Elem {
        match self {
            GAction::Trivial => e,
            GAction::Table(t) => t[g][e as usize],
            GAction::Power {
                radix,
                slots,
                source,
                inner,
            } => {
                let ev = e as u64;
                let mut out = 0u64;
                let mut scale = 1u64;
                for j in 0..*slots {
                    let digit = (ev / radix.pow(source[g][j])) % radix;
                    out += inner[g][digit as usize] as u64 * scale;
                    scale *= radix;
                }
                out as Elem
            }
        }
    }
}

/// A finite pointed G-set: basepoint 0 fixed, elements `1..=size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedGSet {
    pub group: Arc<FiniteGroup>,
    pub size: u32,
    pub action: GAction,
}

impl PointedGSet {
    pub fn trivial(group: Arc<FiniteGroup>, size: u32) -> Self {
        PointedGSet {
            group,
            size,
            action: GAction::Trivial,
        }
    }

    pub fn from_table(group: Arc<FiniteGroup>, table: Vec<Vec<Elem>>) -> Result<Self, GroupError> {
        let size = table.first().map_or(1, |r| r.len()) as u32 - 1;
        let s = PointedGSet {
            group,
            size,
            action: GAction::Table(table),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn act(&self, g: usize, e: Elem) -> Elem {
        self.action.apply(g, e)
    }

    pub fn has_trivial_action(&self) -> bool {
        match &self.action {
            GAction::Trivial => true,
            GAction::Table(t) => self
                .group
                .elements()
                .all(|g| t[g].iter().enumerate().all(|(i, &v)| v == i as Elem)),
            GAction::Power { source, inner, .. } => self.group.elements().all(|g| {
                source[g].iter().enumerate().all(|(i, &v)| v == i as u32)
                    && inner[g].iter().enumerate().all(|(i, &v)| v == i as Elem)
            }),
        }
    }

    pub fn validate(&self) -> Result<(), GroupError> {
        let n = self.size as usize + 1;
        if let GAction::Power {
            radix,
            slots,
            source,
            inner,
        } = &self.action
        {
            // the factored form makes the action law checkable without
            // iterating the (possibly huge) underlying set
            let total = radix
                .checked_pow(*slots as u32)
                .filter(|&t| t - 1 <= u32::MAX as u64);
            if total != Some(self.size as u64 + 1) {
                return Err(GroupError::BadAction {
                    reason: "power action size does not match radix^slots".into(),
                });
            }
            if source.len() != self.group.order() || inner.len() != self.group.order() {
                return Err(GroupError::BadAction {
                    reason: "one permutation per group element required".into(),
                });
            }
            for g in self.group.elements() {
                let mut seen = vec![false; *slots];
                if source[g].len() != *slots {
                    return Err(GroupError::BadAction {
                        reason: format!("slot row for {g} has wrong length"),
                    });
                }
                for &s in &source[g] {
                    if s as usize >= *slots || seen[s as usize] {
                        return Err(GroupError::BadAction {
                            reason: format!("group element {g} does not permute slots"),
                        });
                    }
                    seen[s as usize] = true;
                }
                if inner[g].len() as u64 != *radix || inner[g][0] != 0 {
                    return Err(GroupError::BadAction {
                        reason: format!("inner row for {g} is not pointed"),
                    });
                }
                let mut seen = vec![false; inner[g].len()];
                for &v in &inner[g] {
                    if v as u64 >= *radix || seen[v as usize] {
                        return Err(GroupError::BadAction {
                            reason: format!("group element {g} does not act bijectively"),
                        });
                    }
                    seen[v as usize] = true;
                }
            }
            let e = self.group.identity();
            if source[e].iter().enumerate().any(|(i, &v)| v != i as u32)
                || inner[e].iter().enumerate().any(|(i, &v)| v != i as Elem)
            {
                return Err(GroupError::BadAction {
                    reason: "identity moves a slot or a digit".into(),
                });
            }
            for g in self.group.elements() {
                for h in self.group.elements() {
                    let gh = self.group.mul(g, h);
                    for j in 0..*slots {
                        if source[gh][j] != source[h][source[g][j] as usize] {
                            return Err(GroupError::BadAction {
                                reason: format!("slot action not compatible at g={g}, h={h}"),
                            });
                        }
                    }
                    for d in 0..inner[g].len() as Elem {
                        if inner[gh][d as usize] != inner[g][inner[h][d as usize] as usize] {
                            return Err(GroupError::BadAction {
                                reason: format!("inner action not compatible at g={g}, h={h}"),
                            });
                        }
                    }
                }
            }
        }
        if let GAction::Table(t) = &self.action {
            if t.len() != self.group.order() {
                return Err(GroupError::BadAction {
                    reason: "one permutation per group element required".into(),
                });
            }
            for g in self.group.elements() {
                if t[g].len() != n {
                    return Err(GroupError::BadAction {
                        reason: format!("row for {g} has wrong length"),
                    });
                }
                if t[g][0] != 0 {
                    return Err(GroupError::BadAction {
                        reason: format!("group element {g} moves the basepoint"),
                    });
                }
                let mut seen = vec![false; n];
                for &v in &t[g] {
                    if v as usize >= n || seen[v as usize] {
                        return Err(GroupError::BadAction {
                            reason: format!("group element {g} does not act bijectively"),
                        });
                    }
                    seen[v as usize] = true;
                }
            }
            let e = self.group.identity();
            for x in 0..n {
                if t[e][x] != x as Elem {
                    return Err(GroupError::BadAction {
                        reason: format!("identity moves element {x}"),
                    });
                }
            }
            for g in self.group.elements() {
                for h in self.group.elements() {
                    let gh = self.group.mul(g, h);
                    for x in 0..n as Elem {
                        if self.act(g, self.act(h, x)) != self.act(gh, x) {
                            return Err(GroupError::BadAction {
                                reason: format!("action not compatible at g={g}, h={h}, x={x}"),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Non-base elements fixed by every element of `h`, ascending.
    pub fn fixed_elems(&self, h: &SubgroupRef) -> Vec<Elem> {
        (1..=self.size)
            .filter(|&e| h.elements().iter().all(|&g| self.act(g, e) == e))
            .collect()
    }

    pub fn stabilizer(&self, e: Elem) -> SubgroupRef {
        SubgroupRef {
            elements: self
                .group
                .elements()
                .filter(|&g| self.act(g, e) == e)
                .collect(),
        }
    }

    /// Orbits of non-base elements: (least representative, sorted orbit,
    /// stabilizer of the representative), ordered by representative.
    pub fn orbit_decompose(&self) -> Vec<PointedOrbit> {
        let mut seen = vec![false; self.size as usize + 1];
        let mut out = Vec::new();
        for e in 1..=self.size {
            if seen[e as usize] {
                continue;
            }
            let mut orbit: Vec<Elem> = self.group.elements().map(|g| self.act(g, e)).collect();
            orbit.sort_unstable();
            orbit.dedup();
            for &x in &orbit {
                seen[x as usize] = true;
            }
            out.push(PointedOrbit {
                rep: e,
                stabilizer: self.stabilizer(e),
                elements: orbit,
            });
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedOrbit {
    pub rep: Elem,
    pub elements: Vec<Elem>,
    pub stabilizer: SubgroupRef,
}

/// The graph of a homomorphism `rho: H -> Sigma` recorded element-wise:
/// `domain[i]` in the first factor maps to `rho[i]` in the second.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphHom {
    pub domain: Vec<usize>,
    pub rho: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct IsotropyOrbit {
    pub rep: Elem,
    pub stabilizer: SubgroupRef,
    /// `Some` exactly when the stabilizer meets `{1} x Sigma_n` trivially,
    /// i.e. is the graph of a homomorphism from a subgroup of the first
    /// factor to the second.
    pub graph: Option<GraphHom>,
}

#[derive(Clone, Debug)]
pub struct FamilyReport {
    pub all_in_family: bool,
    pub orbits: Vec<IsotropyOrbit>,
}

/// For a pointed set with an action of a product group `G x Sigma`, decide
/// whether every non-base isotropy group lies in the family of graph
/// subgroups, and if so return the graphs (with remembered projections).
pub fn isotropy_in_family_gn(x: &PointedGSet) -> Result<FamilyReport, GroupError> {
    let group = &x.group;
    let (_, second) = group.factors()?;
    let e2 = second.identity();
    let mut orbits = Vec::new();
    let mut all = true;
    for orb in x.orbit_decompose() {
        let stab = &orb.stabilizer;
        // graph condition: each first-factor element appears at most once,
        // equivalently no non-identity element of {1} x Sigma stabilizes.
        let mut domain = Vec::new();
        let mut rho = Vec::new();
        let mut ok = true;
        for &p in stab.elements() {
            let (a, b) = group.project(p)?;
            if let Some(pos) = domain.iter().position(|&d| d == a) {
                let _ = pos;
                ok = false;
                break;
            }
            domain.push(a);
            rho.push(b);
        }
        // (1, b) with b != 1 in the stabilizer also violates the family
        if ok {
            let efirst = {
                let (first, _) = group.factors()?;
                first.identity()
            };
            for (d, r) in domain.iter().zip(rho.iter()) {
                if *d == efirst && *r != e2 {
                    ok = false;
                    break;
                }
            }
        }
        let graph = if ok {
            let mut idx: Vec<usize> = (0..domain.len()).collect();
            idx.sort_by_key(|&i| domain[i]);
            Some(GraphHom {
                domain: idx.iter().map(|&i| domain[i]).collect(),
                rho: idx.iter().map(|&i| rho[i]).collect(),
            })
        } else {
            all = false;
            None
        };
        orbits.push(IsotropyOrbit {
            rep: orb.rep,
            stabilizer: orb.stabilizer,
            graph,
        });
    }
    Ok(FamilyReport {
        all_in_family: all,
        orbits,
    })
}

/// The symmetric group S3 written as a table, for tests and examples:
/// elements in the `SymmetricGroup::new(3)` order.
pub fn s3() -> Arc<FiniteGroup> {
    SymmetricGroup::new(3).group
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_associative_with_witness() {
        // "subtraction mod 3": has right identity, not associative
        let t = vec![vec![0, 2, 1], vec![1, 0, 2], vec![2, 1, 0]];
        match FiniteGroup::from_table(&t) {
            Err(GroupError::NonAssociative { a, b, c }) => {
                // verify the witness actually fails in the table
                let at = |x: usize, y: usize| t[x][y];
                assert_ne!(at(at(a, b), c), at(a, at(b, c)));
            }
            Err(GroupError::NoIdentity) => {} // also acceptable shape of failure
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn rejects_no_identity() {
        let t = vec![vec![0, 0], vec![0, 0]]; // constant: no identity row/col pair
        assert_eq!(
            FiniteGroup::from_table(&t).err(),
            Some(GroupError::NoIdentity)
        );
        // a table whose identity is not element 0 is still a group
        let z2_relabelled = vec![vec![1, 0], vec![0, 1]];
        let g = FiniteGroup::from_table(&z2_relabelled).unwrap();
        assert_eq!(g.identity(), 1);
    }

    #[test]
    fn rejects_no_inverse() {
        // monoid {1, a} with a*a = a: identity 0, a has no inverse
        let t = vec![vec![0, 1], vec![1, 1]];
        assert_eq!(
            FiniteGroup::from_table(&t).err(),
            Some(GroupError::NoInverse { g: 1 })
        );
    }

    #[test]
    fn cyclic_groups() {
        let z4 = FiniteGroup::cyclic(4);
        assert_eq!(z4.order(), 4);
        assert_eq!(z4.identity(), 0);
        assert_eq!(z4.mul(3, 2), 1);
        assert_eq!(z4.inv(1), 3);
        assert_eq!(z4.element_order(1), 4);
        assert_eq!(z4.element_order(2), 2);
    }

    #[test]
    fn symmetric_group_composition() {
        let s3 = SymmetricGroup::new(3);
        assert_eq!(s3.group.order(), 6);
        // lex order starts with identity
        assert_eq!(s3.perm(0), &[0, 1, 2]);
        let swap01 = s3.rank(&[1, 0, 2]);
        let swap12 = s3.rank(&[0, 2, 1]);
        let prod = s3.group.mul(swap01, swap12); // (01) after (12): 0->1, 1->... compute
        let expect: Vec<u8> = (0..3)
            .map(|i| s3.perm(swap01)[s3.perm(swap12)[i] as usize])
            .collect();
        assert_eq!(s3.perm(prod), expect.as_slice());
    }

    /// Independent oracle: enumerate all 2^6 subsets of S3 and keep those
    /// closed under the group operations. Frozen expectation: 6 subgroups.
    #[test]
    fn s3_subgroup_oracle() {
        let g = s3();
        let mut brute = Vec::new();
        for mask in 0u32..64 {
            let els: Vec<usize> = (0..6).filter(|i| mask & (1 << i) != 0).collect();
            if els.is_empty() || !els.contains(&g.identity()) {
                continue;
            }
            let hs = SubgroupRef {
                elements: els.clone(),
            };
            if hs.is_subgroup_of(&g) {
                brute.push(els);
            }
        }
        brute.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        assert_eq!(brute.len(), 6, "S3 has exactly 6 subgroups");
        let fast: Vec<Vec<usize>> = subgroups(&g).into_iter().map(|h| h.elements).collect();
        assert_eq!(fast, brute);
    }

    #[test]
    fn subgroup_set_closed_under_conjugation() {
        for g in [FiniteGroup::cyclic(6), s3(), FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2))] {
            let subs = subgroups(&g);
            for h in &subs {
                for x in g.elements() {
                    let c = conjugate_subgroup(&g, h, x);
                    assert!(subs.contains(&c), "conjugate closure fails");
                }
            }
        }
    }

    #[test]
    fn lagrange_holds() {
        for g in [FiniteGroup::cyclic(8), s3()] {
            for h in subgroups(&g) {
                assert_eq!(g.order() % h.order(), 0);
            }
        }
    }

    #[test]
    fn product_projections() {
        let z2 = FiniteGroup::cyclic(2);
        let z3 = FiniteGroup::cyclic(3);
        let p = FiniteGroup::product(&z2, &z3);
        assert_eq!(p.order(), 6);
        let g = p.pair_index(1, 2);
        assert_eq!(p.project(g).unwrap(), (1, 2));
        assert_eq!(
            p.mul(p.pair_index(1, 1), p.pair_index(1, 2)),
            p.pair_index(0, 0)
        );
        assert!(matches!(
            FiniteGroup::cyclic(4).project(1),
            Err(GroupError::NotProductGroup)
        ));
    }

    #[test]
    fn cosets_action() {
        let g = s3();
        let subs = subgroups(&g);
        let order2 = subs.iter().find(|h| h.order() == 2).unwrap();
        let c = FiniteGSet::cosets(Arc::clone(&g), order2);
        assert_eq!(c.size, 3);
        c.validate().unwrap();
        assert_eq!(c.orbits().len(), 1, "coset space is transitive");
    }

    #[test]
    fn fixed_points_examples() {
        let z2 = FiniteGroup::cyclic(2);
        let free = FiniteGSet::free_orbit(Arc::clone(&z2));
        let full = SubgroupRef::full(&z2);
        assert!(free.fixed(&full).is_empty());
        let triv = FiniteGSet::trivial(Arc::clone(&z2), 3);
        assert_eq!(triv.fixed(&full), vec![0, 1, 2]);
        // fixed points of the trivial subgroup = everything
        assert_eq!(free.fixed(&SubgroupRef::trivial(&z2)).len(), 2);
    }

    #[test]
    fn orbit_decomposition_mixed() {
        let z2 = FiniteGroup::cyclic(2);
        let x = FiniteGSet::free_orbit(Arc::clone(&z2))
            .disjoint_union(&FiniteGSet::trivial(Arc::clone(&z2), 1));
        let orbits = x.orbits();
        assert_eq!(orbits, vec![vec![0, 1], vec![2]]);
        let p = x.to_pointed();
        let dec = p.orbit_decompose();
        assert_eq!(dec.len(), 2);
        assert_eq!(dec[0].elements, vec![1, 2]);
        assert_eq!(dec[0].stabilizer.order(), 1);
        assert_eq!(dec[1].stabilizer.order(), 2);
    }

    #[test]
    fn isotropy_family_graph_and_violation() {
        let s2 = SymmetricGroup::new(2);
        let prod = FiniteGroup::product(&s2.group, &s2.group);
        // X = {id, swap} (surjective based maps 2+ -> 2+), (g, s) . f = g f s^{-1}
        // index (g, s) = g*2 + s; action table on {base, 1=id, 2=swap}
        let table = vec![
            vec![0, 1, 2], // (e, e)
            vec![0, 2, 1], // (e, sw): f . sw
            vec![0, 2, 1], // (sw, e): sw . f
            vec![0, 1, 2], // (sw, sw)
        ];
        let x = PointedGSet::from_table(Arc::clone(&prod), table).unwrap();
        let rep = isotropy_in_family_gn(&x).unwrap();
        assert!(rep.all_in_family);
        assert_eq!(rep.orbits.len(), 1);
        let graph = rep.orbits[0].graph.as_ref().unwrap();
        assert_eq!(graph.domain, vec![0, 1]);
        assert_eq!(graph.rho, vec![0, 1], "stabilizer is the diagonal graph");

        // A fixed point has stabilizer all of G x Sigma: contains (1, sw)
        let fixed = PointedGSet::trivial(Arc::clone(&prod), 1);
        let rep2 = isotropy_in_family_gn(&fixed).unwrap();
        assert!(!rep2.all_in_family);
        assert!(rep2.orbits[0].graph.is_none());

        // non-product group errors
        let y = PointedGSet::trivial(FiniteGroup::cyclic(2), 1);
        assert!(matches!(
            isotropy_in_family_gn(&y),
            Err(GroupError::NotProductGroup)
        ));
    }

    #[test]
    fn pointed_validation_rejects_moved_basepoint() {
        let z2 = FiniteGroup::cyclic(2);
        let bad = PointedGSet {
            group: z2,
            size: 1,
            action: GAction::Table(vec![vec![0, 1], vec![1, 0]]),
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn subgroup_as_group_roundtrip() {
        let g = s3();
        let h = subgroups(&g).into_iter().find(|h| h.order() == 3).unwrap();
        let (hg, embed) = subgroup_as_group(&g, &h);
        assert_eq!(hg.order(), 3);
        for (i, &a) in embed.iter().enumerate() {
            for (j, &b) in embed.iter().enumerate() {
                assert_eq!(embed[hg.mul(i, j)], g.mul(a, b));
            }
        }
    }
}
