//! Ground truth at small scale: exhaustive enumeration of all search trees
//! on a caterpillar, breadth-first search over the rotation graph for exact
//! distances, and exact diameters with witness pairs.
//!
//! Everything is budget-gated: operations first count the state space and
//! refuse to run past the caller's node budget instead of silently
//! truncating.

use std::collections::HashMap;
use std::collections::VecDeque;

use crate::caterpillar::Caterpillar;
use crate::error::{Error, Result};
use crate::stg::Stg;

fn components_without(cat: &Caterpillar, members: &[usize], skip: usize) -> Vec<Vec<usize>> {
    let v = cat.vertex_count();
    let mut inside = vec![false; v];
    for &ix in members {
        inside[ix] = true;
    }
    inside[skip] = false;
    let mut seen = vec![false; v];
    let mut comps = Vec::new();
    for &start in members {
        if start == skip || seen[start] || !inside[start] {
            continue;
        }
        let mut comp = Vec::new();
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(x) = stack.pop() {
            comp.push(x);
            for y in cat.neighbors_ix(x) {
                if inside[y] && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

/// Number of search trees on the caterpillar, by the component recursion
/// (choose a root, multiply over the components it leaves behind). Memoized
/// per component vertex set; saturates at `u128::MAX`.
pub fn count(cat: &Caterpillar) -> u128 {
    fn rec(cat: &Caterpillar, comp: Vec<usize>, memo: &mut HashMap<Vec<usize>, u128>) -> u128 {
        if comp.len() <= 1 {
            return 1;
        }
        if let Some(&v) = memo.get(&comp) {
            return v;
        }
        let mut total: u128 = 0;
        for &r in &comp {
            let mut prod: u128 = 1;
            for sub in components_without(cat, &comp, r) {
                prod = prod.saturating_mul(rec(cat, sub, memo));
            }
            total = total.saturating_add(prod);
        }
        memo.insert(comp, total);
        total
    }
    let all: Vec<usize> = (0..cat.vertex_count()).collect();
    rec(cat, all, &mut HashMap::new())
}

fn check_budget(cat: &Caterpillar, budget: u64) -> Result<u128> {
    let total = count(cat);
    if total > budget as u128 {
        return Err(Error::BudgetExceeded {
            count: total,
            budget,
        });
    }
    Ok(total)
}

/// All search trees on the caterpillar, each exactly once, in a
/// deterministic order. Fails if the count exceeds the budget.
pub fn enumerate(cat: &Caterpillar, budget: u64) -> Result<Vec<Stg>> {
    let total = check_budget(cat, budget)?;
    // trees on a component: (root, child->parent edges)
    type Partial = (usize, Vec<(usize, usize)>);
    fn gen(cat: &Caterpillar, comp: &[usize]) -> Vec<Partial> {
        if comp.len() == 1 {
            return vec![(comp[0], Vec::new())];
        }
        let mut out = Vec::new();
        for &r in comp {
            let subs = components_without(cat, comp, r);
            let sub_trees: Vec<Vec<Partial>> = subs.iter().map(|s| gen(cat, s)).collect();
            // odometer over the cartesian product of component choices
            let mut pick = vec![0usize; sub_trees.len()];
            loop {
                let mut edges = Vec::new();
                for (k, &i) in pick.iter().enumerate() {
                    let (sub_root, sub_edges) = &sub_trees[k][i];
                    edges.extend_from_slice(sub_edges);
                    edges.push((*sub_root, r));
                }
                out.push((r, edges));
                let mut k = 0;
                loop {
                    if k == pick.len() {
                        break;
                    }
                    pick[k] += 1;
                    if pick[k] < sub_trees[k].len() {
                        break;
                    }
                    pick[k] = 0;
                    k += 1;
                }
                if k == pick.len() {
                    break;
                }
            }
        }
        out
    }
    let all: Vec<usize> = (0..cat.vertex_count()).collect();
    let trees = gen(cat, &all);
    debug_assert_eq!(trees.len() as u128, total);
    Ok(trees
        .into_iter()
        .map(|(root, edges)| Stg::from_raw_parts(cat, root, &edges))
        .collect())
}

fn neighbors(t: &Stg) -> Vec<Stg> {
    t.tree_edges()
        .into_iter()
        .map(|(p, c)| t.rotate(p, c).expect("tree edge rotates"))
        .collect()
}

/// Exact rotation distance between two trees on the same caterpillar, by
/// breadth-first search from `t1`.
pub fn distance(t1: &Stg, t2: &Stg, budget: u64) -> Result<usize> {
    if t1.caterpillar() != t2.caterpillar() {
        return Err(Error::CaterpillarMismatch);
    }
    check_budget(t1.caterpillar(), budget)?;
    if t1 == t2 {
        return Ok(0);
    }
    let mut dist: HashMap<Stg, usize> = HashMap::new();
    dist.insert(t1.clone(), 0);
    let mut queue = VecDeque::new();
    queue.push_back(t1.clone());
    while let Some(t) = queue.pop_front() {
        let d = dist[&t];
        for next in neighbors(&t) {
            if !dist.contains_key(&next) {
                if &next == t2 {
                    return Ok(d + 1);
                }
                dist.insert(next.clone(), d + 1);
                queue.push_back(next);
            }
        }
    }
    Err(Error::MalformedTree(
        "target tree not reachable by rotations".into(),
    ))
}

/// Distances from `start` to every tree on its caterpillar.
pub fn distance_map(start: &Stg, budget: u64) -> Result<HashMap<Stg, usize>> {
    check_budget(start.caterpillar(), budget)?;
    let mut dist: HashMap<Stg, usize> = HashMap::new();
    dist.insert(start.clone(), 0);
    let mut queue = VecDeque::new();
    queue.push_back(start.clone());
    while let Some(t) = queue.pop_front() {
        let d = dist[&t];
        for next in neighbors(&t) {
            if !dist.contains_key(&next) {
                dist.insert(next.clone(), d + 1);
                queue.push_back(next);
            }
        }
    }
    Ok(dist)
}

/// Exact diameter of the rotation graph, with one witness pair attaining it
/// and the graph's size.
#[derive(Debug, Clone)]
pub struct DiameterReport {
    pub diameter: usize,
    pub witness: (Stg, Stg),
    pub nodes: usize,
    pub edges: usize,
}

/// All-sources BFS over the rotation graph. The adjacency list is built
/// once; each source is searched independently, keeping memory linear in the
/// graph size.
pub fn diameter(cat: &Caterpillar, budget: u64) -> Result<DiameterReport> {
    let all = enumerate(cat, budget)?;
    let index: HashMap<&Stg, u32> = all.iter().zip(0u32..).collect();
    let adj: Vec<Vec<u32>> = all
        .iter()
        .map(|t| neighbors(t).iter().map(|s| index[s]).collect())
        .collect();
    let edges: usize = adj.iter().map(Vec::len).sum::<usize>() / 2;

    let mut best = 0;
    let mut witness = (0u32, 0u32);
    let mut dist = vec![u32::MAX; all.len()];
    for source in 0..all.len() as u32 {
        dist.fill(u32::MAX);
        dist[source as usize] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(source);
        let mut far = source;
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x as usize] {
                if dist[y as usize] == u32::MAX {
                    dist[y as usize] = dist[x as usize] + 1;
                    if dist[y as usize] > dist[far as usize] {
                        far = y;
                    }
                    queue.push_back(y);
                }
            }
        }
        if dist[far as usize] as usize > best {
            best = dist[far as usize] as usize;
            witness = (source, far);
        }
    }
    Ok(DiameterReport {
        diameter: best,
        witness: (
            all[witness.0 as usize].clone(),
            all[witness.1 as usize].clone(),
        ),
        nodes: all.len(),
        edges,
    })
}
