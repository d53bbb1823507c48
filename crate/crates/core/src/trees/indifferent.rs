use std::collections::{BTreeMap, HashMap};

use crate::domain::{Address, Block, HypothesisClass, Label};
use crate::error::{Error, Result};
use crate::trees::ramsey::max_monochromatic_subtree;
use crate::trees::{DvclTree, TreeSource};

/// A triple breaking indifference: `h_u` and `h_w` disagree on `x_v^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub v: Address,
    pub u: Address,
    pub w: Address,
    pub j: usize,
}

fn table_at(tree: &dyn TreeSource, u: &Address) -> Result<crate::domain::HypothesisId> {
    tree.table(u)
        .ok_or_else(|| Error::Invalid(format!("no table entry at {u}")))
}

/// First triple `(v, u, w)` with `ind(v) < ind(u)`, `w` strictly below `u`
/// (all materialized to depth `t`) where `h_u(x_v^j) ≠ h_w(x_v^j)`; `None`
/// when the tree is indifferent to depth `t`.
pub fn indifferent_check(
    class: &dyn HypothesisClass,
    tree: &dyn TreeSource,
    t: usize,
) -> Result<Option<Violation>> {
    let d = tree.block_size();
    let addrs = Address::up_to_level(d, t);
    let mut points = HashMap::new();
    let mut tables = HashMap::new();
    for a in &addrs {
        points.insert(a.clone(), tree.node(a)?);
        tables.insert(a.clone(), table_at(tree, a)?);
    }
    for (ui, u) in addrs.iter().enumerate() {
        let below: Vec<&Address> = addrs.iter().filter(|w| u.is_strict_prefix_of(w)).collect();
        if below.is_empty() {
            continue;
        }
        let hu = &tables[u];
        for v in &addrs[..ui] {
            for (j, p) in points[v].iter().enumerate() {
                let want = class.evaluate(hu, p)?;
                for w in &below {
                    if class.evaluate(&tables[*w], p)? != want {
                        return Ok(Some(Violation {
                            v: v.clone(),
                            u: u.clone(),
                            w: (*w).clone(),
                            j,
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug)]
pub struct IndifferentOutput {
    pub tree: DvclTree,
    /// Output position → source address.
    pub sources: BTreeMap<Address, Address>,
    /// Replacements that changed the tree.
    pub replacements: usize,
}

fn to_digits(rel: &Address) -> Vec<u32> {
    rel.blocks().iter().map(|b| b.value()).collect()
}

fn from_digits(digits: &[u32], d: usize) -> Address {
    Address::from_blocks(digits.iter().map(|&x| Block::new(x, d)).collect())
}

/// Finite replay of the indifference construction: for every position `u` up
/// to `d_out` in shortlex order, every earlier `v` and coordinate `j`, the
/// current subtree below `u` is replaced by its tallest subtree that is
/// monochromatic in the color `h(x_v^j)`.
pub fn make_indifferent(
    class: &dyn HypothesisClass,
    tree: &DvclTree,
    d_out: usize,
    d_in: usize,
) -> Result<IndifferentOutput> {
    let d = tree.d();
    if d_in < d_out {
        return Err(Error::Invalid(format!("source depth {d_in} below output depth {d_out}")));
    }
    if tree.depth() < d_in || !tree.table_complete_to(d_in) {
        return Err(Error::Invalid(format!("table is not complete to depth {d_in}")));
    }
    let mut pos: BTreeMap<Address, Address> = Address::up_to_level(d, d_in)
        .into_iter()
        .map(|a| (a.clone(), a))
        .collect();
    let mut replacements = 0;
    for u in Address::up_to_level(d, d_out) {
        let ui = u.shortlex_index(d);
        let earlier: Vec<Address> = Address::up_to_level(d, u.level())
            .into_iter()
            .filter(|v| v.shortlex_index(d) < ui)
            .collect();
        for v in &earlier {
            let vpoints = tree.node(&pos[v])?;
            for (j, p) in vpoints.iter().enumerate() {
                let mut height = 0;
                let mut probe = u.clone();
                loop {
                    probe = probe.child(Block::zeros(d));
                    if !pos.contains_key(&probe) {
                        break;
                    }
                    height += 1;
                }
                let mut colors: HashMap<Vec<u32>, bool> = HashMap::new();
                for (position, source) in pos.range(u.clone()..) {
                    if !u.is_prefix_of(position) {
                        continue;
                    }
                    let rel = position.strip_prefix(&u).expect("prefix checked");
                    let h = table_at(tree, source)?;
                    colors.insert(to_digits(&rel), class.evaluate(&h, p)?);
                }
                let coloring = |x: &[u32]| colors[x];
                let need = d_out - u.level();
                let emb = max_monochromatic_subtree(1 << d, height, &coloring, need).ok_or_else(
                    || Error::InsufficientDepth {
                        u: u.to_string(),
                        v: v.to_string(),
                        j,
                        reason: format!(
                            "no monochromatic subtree of height {need} inside height {height}"
                        ),
                    },
                )?;
                let identity = emb.height == height && emb.map.iter().all(|(a, b)| a == b);
                if identity {
                    continue;
                }
                replacements += 1;
                let old: Vec<(Address, Address)> = pos
                    .iter()
                    .filter(|(k, _)| u.is_prefix_of(k))
                    .map(|(k, s)| (k.clone(), s.clone()))
                    .collect();
                let old_map: HashMap<Address, Address> = old.iter().cloned().collect();
                for (k, _) in &old {
                    pos.remove(k);
                }
                for (target, source) in &emb.map {
                    let new_pos = u.concat(&from_digits(target, d));
                    let src_pos = u.concat(&from_digits(source, d));
                    pos.insert(new_pos, old_map[&src_pos].clone());
                }
            }
        }
    }
    let mut out = DvclTree::new(d, d_out);
    let mut sources = BTreeMap::new();
    for a in Address::up_to_level(d, d_out) {
        let src = pos[&a].clone();
        out.insert(a.clone(), tree.node(&src)?, tree.table(&src))?;
        sources.insert(a, src);
    }
    Ok(IndifferentOutput {
        tree: out,
        sources,
        replacements,
    })
}

/// `f_y(x_v^j)`: the label `h_u(x_v^j)` for the shallowest on-branch `u`
/// (within the given prefix) whose shortlex index exceeds that of `v`.
pub fn branch_function(
    class: &dyn HypothesisClass,
    tree: &dyn TreeSource,
    branch: &[Block],
    v: &Address,
    j: usize,
) -> Result<Label> {
    let d = tree.block_size();
    let vi = v.shortlex_index(d);
    let point = tree
        .node(v)?
        .get(j)
        .cloned()
        .ok_or_else(|| Error::Invalid(format!("coordinate {j} out of range at {v}")))?;
    let max_level = tree.max_depth().map_or(branch.len(), |m| m.min(branch.len()));
    let mut found: Option<Label> = None;
    for level in 0..=max_level {
        let u = Address::from_blocks(branch[..level].to_vec());
        if u.shortlex_index(d) <= vi {
            continue;
        }
        let Some(h) = tree.table(&u) else {
            break;
        };
        let label = class.evaluate(&h, &point)?;
        match found {
            None => {
                found = Some(label);
                if !cfg!(debug_assertions) {
                    break;
                }
            }
            Some(first) => debug_assert_eq!(
                first, label,
                "tree is not indifferent along the branch at {u}"
            ),
        }
    }
    found.ok_or_else(|| Error::InsufficientDepth {
        u: Address::from_blocks(branch.to_vec()).to_string(),
        v: v.to_string(),
        j,
        reason: "no on-branch node with a larger index is materialized".into(),
    })
}
