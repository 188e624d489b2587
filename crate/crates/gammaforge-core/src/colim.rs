//! Union-find based colimits of finite pointed sets.
//!
//! Every colimit in the crate is computed the same way: materialize the
//! generators, union along the relations, then canonicalize. The canonical
//! representative of a class is its least generator index and non-base
//! classes are numbered in order of that representative, so a colimit is a
//! deterministic function of its presentation — two runs produce identical
//! numberings.

use crate::groups::Elem;

pub struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        // path halving
        while self.parent[x as usize] != x {
            let gp = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = gp;
            x = gp;
        }
        x
    }

    /// Union, keeping the smaller root as the representative so that the
    /// final canonical form does not depend on union order.
    pub fn union(&mut self, a: u32, b: u32) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
    }
}

/// A quotient of `n` generators by the closure of the recorded unions.
///
/// `class_of[g]` is the class of generator `g`; class 0 is the class of the
/// designated base generator, and the non-base classes `1..=size` are ordered
/// by least member. `rep[c]` is that least member.
pub struct Quotient {
    pub class_of: Vec<Elem>,
    pub rep: Vec<u32>,
    pub size: u32,
}

impl UnionFind {
    pub fn quotient(mut self, base_generator: u32) -> Quotient {
        let n = self.parent.len();
        let base_root = self.find(base_generator);
        // roots in increasing order give the deterministic class numbering
        let mut class_of = vec![0 as Elem; n];
        let mut rep: Vec<u32> = vec![base_root];
        let mut next = 1 as Elem;
        // first pass: assign class numbers to roots in index order
        let mut root_class = vec![Elem::MAX; n];
        root_class[base_root as usize] = 0;
        for x in 0..n as u32 {
            let r = self.find(x);
            if root_class[r as usize] == Elem::MAX {
                root_class[r as usize] = next;
                rep.push(r);
                next += 1;
            }
        }
        for x in 0..n {
            let r = self.parent[x]; // fully compressed by the find pass above
            let r = if self.parent[r as usize] == r {
                r
            } else {
                self.find(x as u32)
            };
            class_of[x] = root_class[r as usize];
        }
        Quotient {
            class_of,
            rep,
            size: next - 1,
        }
    }
}

/// Pushout of pointed sets `B <- A -> C` (maps given on non-base elements,
/// value 0 means basepoint). Returns the induced maps from B and C into the
/// pushout, numbered canonically.
pub struct Pushout {
    pub from_b: Vec<Elem>,
    pub from_c: Vec<Elem>,
    pub size: u32,
}

pub fn pointed_pushout(size_b: u32, size_c: u32, f: &[Elem], g: &[Elem]) -> Pushout {
    // nodes: 0 = base, 1..=size_b = B, size_b+1..=size_b+size_c = C
    debug_assert_eq!(f.len(), g.len());
    let enc_b = |b: Elem| -> u32 { b };
    let enc_c = |c: Elem| -> u32 {
        if c == 0 {
            0
        } else {
            size_b + c
        }
    };
    let mut uf = UnionFind::new((size_b + size_c + 1) as usize);
    for (fa, ga) in f.iter().zip(g.iter()) {
        uf.union(enc_b(*fa), enc_c(*ga));
    }
    let q = uf.quotient(0);
    let from_b = (0..=size_b).map(|b| q.class_of[enc_b(b) as usize]).collect();
    let from_c = (0..=size_c).map(|c| q.class_of[enc_c(c) as usize]).collect();
    Pushout {
        from_b,
        from_c,
        size: q.size,
    }
}

/// Pullback of pointed sets `B -> D <- C`: the matching pairs, base first,
/// then sorted lexicographically. Returns the pair list; index in the list is
/// the element (0 = base pair).
pub fn pointed_pullback(f: &[Elem], g: &[Elem]) -> Vec<(Elem, Elem)> {
    let mut pairs = vec![(0, 0)];
    for (b, fb) in f.iter().enumerate().skip(1) {
        for (c, gc) in g.iter().enumerate().skip(1) {
            if fb == gc {
                pairs.push((b as Elem, c as Elem));
            }
        }
        // pairs (b, base): need f(b) = g(0) = 0
        if *fb == 0 {
            pairs.push((b as Elem, 0));
        }
    }
    for (c, gc) in g.iter().enumerate().skip(1) {
        if *gc == 0 {
            pairs.push((0, c as Elem));
        }
    }
    pairs[1..].sort_unstable();
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotient_canonical_numbering() {
        // generators 0..6, base gen 2; unions {0,4}, {1,5}
        let mut uf = UnionFind::new(6);
        uf.union(0, 4);
        uf.union(5, 1);
        let q = uf.quotient(2);
        assert_eq!(q.size, 3); // classes {0,4},{1,5},{3} besides base {2}
        assert_eq!(q.class_of[2], 0);
        assert_eq!(q.class_of[0], q.class_of[4]);
        assert_eq!(q.class_of[1], q.class_of[5]);
        // numbering by least member: {0,4} -> 1, {1,5} -> 2, {3} -> 3
        assert_eq!(q.class_of[0], 1);
        assert_eq!(q.class_of[1], 2);
        assert_eq!(q.class_of[3], 3);
        assert_eq!(q.rep, vec![2, 0, 1, 3]);
    }

    #[test]
    fn union_order_does_not_matter() {
        let mut a = UnionFind::new(8);
        a.union(3, 7);
        a.union(1, 3);
        let qa = a.quotient(0);
        let mut b = UnionFind::new(8);
        b.union(7, 1);
        b.union(7, 3);
        let qb = b.quotient(0);
        assert_eq!(qa.class_of, qb.class_of);
    }

    #[test]
    fn pushout_wedge() {
        // B = {0,1,2}, C = {0,1}, A = point only: pushout = wedge
        let p = pointed_pushout(2, 1, &[0], &[0]);
        assert_eq!(p.size, 3);
        assert_eq!(p.from_b, vec![0, 1, 2]);
        assert_eq!(p.from_c, vec![0, 3]);
    }

    #[test]
    fn pushout_glue() {
        // A = {0,1}, f(1) = 1 in B, g(1) = 2 in C: glue b1 ~ c2
        let p = pointed_pushout(2, 2, &[0, 1], &[0, 2]);
        assert_eq!(p.size, 3);
        assert_eq!(p.from_b[1], p.from_c[2]);
        assert_ne!(p.from_b[2], p.from_c[1]);
    }

    #[test]
    fn pushout_collapse_to_base() {
        // f kills a, g embeds: c := g(a) lands in the base class
        let p = pointed_pushout(1, 1, &[0, 0], &[0, 1]);
        assert_eq!(p.size, 1);
        assert_eq!(p.from_c[1], 0);
        assert_eq!(p.from_b[1], 1);
    }

    #[test]
    fn pullback_pairs() {
        // B = {0,1,2} -> D = {0,1}: f = [0,1,1]; C = {0,1} -> D: g = [0,1]
        let pairs = pointed_pullback(&[0, 1, 1], &[0, 1]);
        assert_eq!(pairs, vec![(0, 0), (1, 1), (2, 1)]);
    }

    #[test]
    fn pullback_mixed_base_pairs() {
        // f(1) = 0: the pair (1, base) matches
        let pairs = pointed_pullback(&[0, 0], &[0, 1]);
        assert_eq!(pairs, vec![(0, 0), (1, 0)]);
    }
}
