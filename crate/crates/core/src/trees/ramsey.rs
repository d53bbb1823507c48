use std::collections::{BTreeMap, HashMap};

/// A node of a complete `k`-ary tree, as its digit string from the root.
pub type Position = Vec<u32>;

/// A complete `k`-ary subtree of height `height` embedded in a larger tree:
/// target position → source position. Child `i` of a target node maps into the
/// subtree below child `i` of its source node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub color: bool,
    pub height: usize,
    pub map: BTreeMap<Position, Position>,
}

struct Search<'a> {
    k: u32,
    depth: usize,
    coloring: &'a dyn Fn(&[u32]) -> bool,
    colors: HashMap<Position, bool>,
    memo: HashMap<(Position, usize, bool), bool>,
}

impl<'a> Search<'a> {
    fn color(&mut self, v: &[u32]) -> bool {
        if let Some(&c) = self.colors.get(v) {
            return c;
        }
        let c = (self.coloring)(v);
        self.colors.insert(v.to_vec(), c);
        c
    }

    /// `v` roots a monochromatic subtree of height `h` in color `c`.
    fn can(&mut self, v: &[u32], h: usize, c: bool) -> bool {
        if self.color(v) != c {
            return false;
        }
        if h == 0 {
            return true;
        }
        if self.depth < v.len() + h {
            return false;
        }
        let key = (v.to_vec(), h, c);
        if let Some(&r) = self.memo.get(&key) {
            return r;
        }
        let mut ok = true;
        for i in 0..self.k {
            let mut child = v.to_vec();
            child.push(i);
            if self.find(&child, h - 1, c).is_none() {
                ok = false;
                break;
            }
        }
        self.memo.insert(key, ok);
        ok
    }

    /// Shortlex-first node of the subtree below `root` rooting such a subtree.
    fn find(&mut self, root: &[u32], h: usize, c: bool) -> Option<Position> {
        if self.depth < root.len() + h {
            return None;
        }
        let mut level = vec![root.to_vec()];
        for rel in 0..=(self.depth - root.len() - h) {
            if rel > 0 {
                level = level
                    .iter()
                    .flat_map(|p| {
                        (0..self.k).map(move |i| {
                            let mut q = p.clone();
                            q.push(i);
                            q
                        })
                    })
                    .collect();
            }
            for v in &level {
                if self.can(v, h, c) {
                    return Some(v.clone());
                }
            }
        }
        None
    }

    fn build(&mut self, v: &[u32], h: usize, c: bool, target: Position, map: &mut BTreeMap<Position, Position>) {
        map.insert(target.clone(), v.to_vec());
        if h == 0 {
            return;
        }
        for i in 0..self.k {
            let mut child = v.to_vec();
            child.push(i);
            let w = self.find(&child, h - 1, c).expect("checked by can");
            let mut t = target.clone();
            t.push(i);
            self.build(&w, h - 1, c, t, map);
        }
    }

    fn embed(&mut self, h: usize) -> Option<Embedding> {
        for c in [true, false] {
            if let Some(root) = self.find(&[], h, c) {
                let mut map = BTreeMap::new();
                self.build(&root, h, c, Vec::new(), &mut map);
                return Some(Embedding {
                    color: c,
                    height: h,
                    map,
                });
            }
        }
        None
    }
}

/// Exhaustive memoized search for a monochromatic complete `k`-ary subtree of
/// height `target` inside the complete `k`-ary tree of height `depth`.
/// Color 1 is tried first, then the shortlex-first root and children.
pub fn ramsey_monochromatic_subtree(
    k: usize,
    depth: usize,
    coloring: &dyn Fn(&[u32]) -> bool,
    target: usize,
) -> Option<Embedding> {
    if target > depth {
        return None;
    }
    Search {
        k: k as u32,
        depth,
        coloring,
        colors: HashMap::new(),
        memo: HashMap::new(),
    }
    .embed(target)
}

/// The tallest monochromatic subtree of height at least `min_height`.
pub fn max_monochromatic_subtree(
    k: usize,
    depth: usize,
    coloring: &dyn Fn(&[u32]) -> bool,
    min_height: usize,
) -> Option<Embedding> {
    let mut s = Search {
        k: k as u32,
        depth,
        coloring,
        colors: HashMap::new(),
        memo: HashMap::new(),
    };
    (min_height..=depth).rev().find_map(|h| s.embed(h))
}
