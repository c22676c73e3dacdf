//! Strata of the compactified moduli of discs with `k + 1` boundary and
//! `l` interior marked points, as planar trees of disc and sphere components.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Interior special point: a marked point or a sphere bubble.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Interior {
    Mark(usize),
    Sphere(Vec<Interior>),
}

/// Boundary special point after `z_0`, in cyclic order: a boundary marked
/// point or a disc bubble.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Boundary {
    Mark(usize),
    Disc(DiscNode),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DiscNode {
    pub boundary: Vec<Boundary>,
    pub interior: Vec<Interior>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Stratum {
    pub root: DiscNode,
    pub disc_vertices: usize,
    pub sphere_vertices: usize,
    /// Number of nodes.
    pub codim: usize,
    /// Real codimension: one per boundary node, two per interior node.
    pub real_codim: usize,
    pub dim: i64,
}

impl fmt::Display for Interior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interior::Mark(i) => write!(f, "w{i}"),
            Interior::Sphere(items) => {
                write!(f, "S(")?;
                join(f, items)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Mark(i) => write!(f, "z{i}"),
            Boundary::Disc(d) => d.fmt(f),
        }
    }
}

impl fmt::Display for DiscNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D[")?;
        join(f, &self.boundary)?;
        write!(f, " | ")?;
        join(f, &self.interior)?;
        write!(f, "]")
    }
}

fn join<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            write!(f, " ")?;
        }
        x.fmt(f)?;
    }
    Ok(())
}

/// All strata of the compactified `(k, l)` moduli space, in canonical
/// order: by codimension, then by structure.
pub fn enumerate_dm_strata(k: usize, ell: usize) -> Vec<Stratum> {
    let marks: Vec<usize> = (1..=ell).collect();
    let mut out: Vec<Stratum> = discs(1, k + 1, &marks).into_iter().map(|root| summarize(root, k, ell)).collect();
    out.sort_by(|a, b| (a.codim, &a.root).cmp(&(b.codim, &b.root)));
    out
}

fn summarize(root: DiscNode, k: usize, ell: usize) -> Stratum {
    let (mut d, mut s, mut bnodes, mut inodes) = (0, 0, 0, 0);
    let mut dim = 0i64;
    fn walk_i(x: &Interior, s: &mut usize, inodes: &mut usize, dim: &mut i64) {
        if let Interior::Sphere(items) = x {
            *s += 1;
            *inodes += 1;
            *dim += 2 * (items.len() as i64 + 1 - 3);
            for y in items {
                walk_i(y, s, inodes, dim);
            }
        }
    }
    fn walk_d(n: &DiscNode, d: &mut usize, s: &mut usize, b: &mut usize, i: &mut usize, dim: &mut i64) {
        *d += 1;
        *dim += n.boundary.len() as i64 - 2 + 2 * n.interior.len() as i64;
        for x in &n.boundary {
            if let Boundary::Disc(c) = x {
                *b += 1;
                walk_d(c, d, s, b, i, dim);
            }
        }
        for x in &n.interior {
            walk_i(x, s, i, dim);
        }
    }
    walk_d(&root, &mut d, &mut s, &mut bnodes, &mut inodes, &mut dim);
    debug_assert_eq!(dim, k as i64 - 2 + 2 * ell as i64 - (bnodes + 2 * inodes) as i64);
    Stratum { root, disc_vertices: d, sphere_vertices: s, codim: bnodes + inodes, real_codim: bnodes + 2 * inodes, dim }
}

#[derive(Clone, Copy)]
enum Slot {
    Leaf(usize),
    Child(usize, usize),
}

/// Disc components whose boundary marked points are `lo..hi` and whose
/// subtree carries the interior points `marks`.
fn discs(lo: usize, hi: usize, marks: &[usize]) -> Vec<DiscNode> {
    let mut out = Vec::new();
    let mut layouts = Vec::new();
    layout(lo, hi, marks.len(), &mut Vec::new(), &mut layouts);
    for lay in layouts {
        let children: Vec<(usize, usize)> = lay
            .iter()
            .filter_map(|s| match *s {
                Slot::Child(a, b) => Some((a, b)),
                Slot::Leaf(_) => None,
            })
            .collect();
        // destination of each interior point: 0 is this disc, 1..=c a child
        // disc, c + 1 the pool handed to sphere bubbles
        let c = children.len();
        let mut dest = vec![0usize; marks.len()];
        loop {
            let select = |j: usize| -> Vec<usize> { marks.iter().zip(&dest).filter(|(_, &d)| d == j).map(|(&m, _)| m).collect() };
            let own = select(0);
            let pool = select(c + 1);
            // prune before recursing: at best the pool forms one sphere, and
            // an empty-interval child is only stable with an interior point
            let bare_empty_child = children.iter().enumerate().any(|(j, &(a, b))| a == b && !dest.contains(&(j + 1)));
            if bare_empty_child || lay.len() + 2 * (own.len() + usize::from(!pool.is_empty())) < 2 {
                if !advance(&mut dest, c + 2) {
                    break;
                }
                continue;
            }
            let child_opts: Vec<Vec<DiscNode>> = children.iter().enumerate().map(|(j, &(a, b))| discs(a, b, &select(j + 1))).collect();
            if child_opts.iter().all(|o| !o.is_empty()) {
                for spheres in sphere_forests(&pool) {
                    // stability of this disc: k + 2l >= 2
                    if lay.len() + 2 * (own.len() + spheres.len()) < 2 {
                        continue;
                    }
                    let mut interior: Vec<Interior> = own.iter().map(|&m| Interior::Mark(m)).collect();
                    interior.extend(spheres);
                    interior.sort();
                    for pick in product(&child_opts) {
                        let mut it = pick.into_iter();
                        let boundary = lay
                            .iter()
                            .map(|s| match *s {
                                Slot::Leaf(m) => Boundary::Mark(m),
                                Slot::Child(..) => Boundary::Disc(it.next().expect("one disc per child")),
                            })
                            .collect();
                        out.push(DiscNode { boundary, interior: interior.clone() });
                    }
                }
            }
            if !advance(&mut dest, c + 2) {
                break;
            }
        }
    }
    out.sort();
    out
}

/// Boundary layouts of `lo..hi`: each slot is a leaf or a child disc taking
/// a consecutive, possibly empty, run of leaves. Empty children need an
/// interior point each, so there are at most `empty_left` of them.
fn layout(lo: usize, hi: usize, empty_left: usize, cur: &mut Vec<Slot>, out: &mut Vec<Vec<Slot>>) {
    if lo == hi {
        out.push(cur.clone());
    } else {
        cur.push(Slot::Leaf(lo));
        layout(lo + 1, hi, empty_left, cur, out);
        cur.pop();
        for end in lo + 1..=hi {
            cur.push(Slot::Child(lo, end));
            layout(end, hi, empty_left, cur, out);
            cur.pop();
        }
    }
    if empty_left > 0 {
        cur.push(Slot::Child(lo, lo));
        layout(lo, hi, empty_left - 1, cur, out);
        cur.pop();
    }
}

/// Unordered collections of sphere trees partitioning `marks`.
fn sphere_forests(marks: &[usize]) -> Vec<Vec<Interior>> {
    let mut out = Vec::new();
    for blocks in set_partitions(marks) {
        let opts: Vec<Vec<Interior>> = blocks.iter().map(|b| spheres(b)).collect();
        if opts.iter().any(|o| o.is_empty()) {
            continue;
        }
        for mut pick in product(&opts) {
            pick.sort();
            out.push(pick);
        }
    }
    out
}

/// Sphere components carrying exactly `marks` in their subtree.
fn spheres(marks: &[usize]) -> Vec<Interior> {
    let mut out = Vec::new();
    let mut dest = vec![0usize; marks.len()];
    // destination: 0 is this sphere, 1 the pool for child spheres
    loop {
        let own: Vec<usize> = marks.iter().zip(&dest).filter(|(_, &d)| d == 0).map(|(&m, _)| m).collect();
        let pool: Vec<usize> = marks.iter().zip(&dest).filter(|(_, &d)| d == 1).map(|(&m, _)| m).collect();
        for children in sphere_forests_proper(&pool, marks.len()) {
            // stability: the node plus its items give at least three points
            if own.len() + children.len() >= 2 {
                let mut items: Vec<Interior> = own.iter().map(|&m| Interior::Mark(m)).collect();
                items.extend(children);
                items.sort();
                out.push(Interior::Sphere(items));
            }
        }
        if !advance(&mut dest, 2) {
            break;
        }
    }
    out.sort();
    out
}

/// Sphere forests on `pool` when the pool is a proper subset, or when the
/// parent sphere would otherwise hand all points to a single child (which
/// is then unstable by itself, so recursion terminates).
fn sphere_forests_proper(pool: &[usize], total: usize) -> Vec<Vec<Interior>> {
    if pool.is_empty() {
        return vec![Vec::new()];
    }
    if pool.len() < total {
        return sphere_forests(pool);
    }
    // all points pushed down: the children form a partition into at least
    // two blocks, each a smaller subproblem
    set_partitions(pool)
        .into_iter()
        .filter(|b| b.len() >= 2)
        .flat_map(|blocks| {
            let opts: Vec<Vec<Interior>> = blocks.iter().map(|b| spheres(b)).collect();
            if opts.iter().any(|o| o.is_empty()) {
                Vec::new()
            } else {
                product(&opts)
                    .into_iter()
                    .map(|mut p| {
                        p.sort();
                        p
                    })
                    .collect()
            }
        })
        .collect()
}

fn set_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let Some((&first, rest)) = items.split_first() else {
        return vec![Vec::new()];
    };
    let mut out = Vec::new();
    for p in set_partitions(rest) {
        let mut with_new = vec![vec![first]];
        with_new.extend(p.iter().cloned());
        out.push(with_new);
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].insert(0, first);
            out.push(q);
        }
    }
    out
}

fn product<T: Clone>(opts: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for o in opts {
        out = out
            .into_iter()
            .flat_map(|p: Vec<T>| {
                o.iter().map(move |x| {
                    let mut q = p.clone();
                    q.push(x.clone());
                    q
                })
            })
            .collect();
    }
    out
}

fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_dm_strata(2, 0).len(), 1);
        assert_eq!(enumerate_dm_strata(3, 0).len(), 3);
        assert_eq!(enumerate_dm_strata(0, 1).len(), 1);
        assert_eq!(enumerate_dm_strata(1, 1).len(), 3);
        assert_eq!(enumerate_dm_strata(0, 2).len(), 6);
    }

    #[test]
    fn boundary_only_counts_are_schroeder() {
        let counts: Vec<usize> = (2..=6).map(|k| enumerate_dm_strata(k, 0).len()).collect();
        assert_eq!(counts, vec![1, 3, 11, 45, 197]);
    }

    #[test]
    fn unstable_spaces_are_empty() {
        assert!(enumerate_dm_strata(0, 0).is_empty());
        assert!(enumerate_dm_strata(1, 0).is_empty());
    }

    #[test]
    fn distinct_and_dimension_consistent() {
        for (k, l) in [(2, 1), (1, 2), (0, 3), (3, 1)] {
            let s = enumerate_dm_strata(k, l);
            let set: BTreeSet<_> = s.iter().map(|x| &x.root).collect();
            assert_eq!(set.len(), s.len());
            assert_eq!(s.iter().filter(|x| x.codim == 0).count(), 1);
            for x in &s {
                assert_eq!(x.dim, k as i64 - 2 + 2 * l as i64 - x.real_codim as i64);
                assert!(x.dim >= 0);
                assert_eq!(x.codim + 1, x.disc_vertices + x.sphere_vertices);
            }
        }
    }
}
