use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{Graph, INF};
use crate::metric::TieBreaker;
use crate::minors::claw::claw_from_models;
use crate::minors::model::{verify_minor_model, verify_superfat, MinorModel, SuperfatModel};
use crate::minors::pattern::build_pattern_tree;
use crate::VertexSet;

pub const MAX_PATTERN: usize = 10;

/// Result of a budgeted search. `exhaustive` is true when the whole space
/// was covered, so that a missing model means absence rather than "unknown".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinorSearch {
    pub model: Option<MinorModel>,
    pub exhaustive: bool,
}

struct Searcher<'a> {
    g: &'a Graph,
    order: Vec<usize>,
    parent: Vec<usize>,
    leaf: Vec<bool>,
    used: Vec<bool>,
    branch: Vec<Vec<usize>>,
    budget: usize,
    aborted: bool,
}

impl Searcher<'_> {
    fn place(&mut self, idx: usize) -> bool {
        if idx == self.order.len() {
            return true;
        }
        let v = self.order[idx];
        let n = self.g.n();
        if idx == 0 {
            for s in 0..n {
                let allowed: Vec<bool> = (0..n).map(|u| u >= s).collect();
                if self.grow_from(idx, s, &allowed) {
                    return true;
                }
                if self.aborted {
                    return false;
                }
            }
            return false;
        }
        let p = self.parent[v];
        let mut starts: Vec<usize> = self.branch[p]
            .iter()
            .flat_map(|&u| self.g.neighbors(u).iter().copied())
            .filter(|&u| !self.used[u])
            .collect();
        starts.sort_unstable();
        starts.dedup();
        let mut allowed = vec![true; n];
        for s in starts {
            if self.grow_from(idx, s, &allowed) {
                return true;
            }
            if self.aborted {
                return false;
            }
            allowed[s] = false;
        }
        false
    }

    fn grow_from(&mut self, idx: usize, s: usize, allowed: &[bool]) -> bool {
        if self.used[s] || !allowed[s] {
            return false;
        }
        let mut near = vec![0u32; self.g.n()];
        self.touch(&mut near, s, 1);
        let ext: Vec<usize> = self
            .g
            .neighbors(s)
            .iter()
            .copied()
            .filter(|&u| allowed[u] && !self.used[u])
            .collect();
        let mut sub = vec![s];
        self.extend(idx, &mut sub, ext, allowed, &mut near)
    }

    fn touch(&self, near: &mut [u32], v: usize, delta: i32) {
        for &w in std::iter::once(&v).chain(self.g.neighbors(v)) {
            near[w] = (near[w] as i32 + delta) as u32;
        }
    }

    /// Enumerates connected sets containing `sub` (each once) by exclusive
    /// neighbourhood extension, trying each as the branch set.
    fn extend(&mut self, idx: usize, sub: &mut Vec<usize>, mut ext: Vec<usize>, allowed: &[bool], near: &mut [u32]) -> bool {
        if self.budget == 0 {
            self.aborted = true;
            return false;
        }
        self.budget -= 1;
        let v = self.order[idx];
        self.branch[v] = sub.clone();
        for &u in sub.iter() {
            self.used[u] = true;
        }
        let found = self.place(idx + 1);
        if found {
            return true;
        }
        for &u in sub.iter() {
            self.used[u] = false;
        }
        if self.aborted || self.leaf[v] {
            return false;
        }
        while let Some(w) = ext.pop() {
            let mut next = ext.clone();
            for &u in self.g.neighbors(w) {
                if allowed[u] && !self.used[u] && near[u] == 0 && !next.contains(&u) {
                    next.push(u);
                }
            }
            sub.push(w);
            self.touch(near, w, 1);
            let found = self.extend(idx, sub, next, allowed, near);
            if found {
                return true;
            }
            self.touch(near, w, -1);
            sub.pop();
            if self.aborted {
                return false;
            }
        }
        false
    }
}

/// Backtracking search for a minor model of a tree `h` with at most
/// [`MAX_PATTERN`] vertices.
pub fn find_minor_model(g: &Graph, h: &Graph, budget: usize) -> Result<MinorSearch> {
    if h.n() > MAX_PATTERN {
        return Err(Error::PatternTooLarge(h.n()));
    }
    if h.n() == 0 || h.m() + 1 != h.n() || !h.is_connected() {
        return Err(Error::Precondition("pattern must be a nonempty tree".into()));
    }
    if h.n() > g.n() {
        return Ok(MinorSearch {
            model: None,
            exhaustive: true,
        });
    }
    let mut order = vec![0];
    let mut parent = vec![usize::MAX; h.n()];
    let mut queue = VecDeque::from([0]);
    let mut seen = vec![false; h.n()];
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        for &w in h.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = u;
                order.push(w);
                queue.push_back(w);
            }
        }
    }
    let leaf: Vec<bool> = (0..h.n()).map(|v| v != 0 && h.degree(v) == 1).collect();
    let mut s = Searcher {
        g,
        order,
        parent,
        leaf,
        used: vec![false; g.n()],
        branch: vec![Vec::new(); h.n()],
        budget,
        aborted: false,
    };
    if s.place(0) {
        let model = MinorModel {
            branch_sets: s.branch.into_iter().map(VertexSet::from).collect(),
        };
        if verify_minor_model(g, h, &model).is_some() {
            return Err(crate::error::invariant(0, "find_minor_model", "search produced an invalid model"));
        }
        return Ok(MinorSearch {
            model: Some(model),
            exhaustive: true,
        });
    }
    Ok(MinorSearch {
        model: None,
        exhaustive: !s.aborted,
    })
}

/// Result of [`find_superfat`]. `absent` means the exhaustive minor search
/// ruled out even an ordinary `H_ℓ` minor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperfatSearch {
    pub model: Option<SuperfatModel>,
    pub absent: bool,
}

const SEED_CAP: usize = 48;

/// Budgeted search for a c-superfat `H_ℓ` model built bottom-up from
/// single vertices by repeated claw combination.
pub fn find_superfat(g: &Graph, tb: &TieBreaker, ell: usize, c: usize, budget: usize) -> Result<SuperfatSearch> {
    let pattern = build_pattern_tree(ell);
    if pattern.n() <= MAX_PATTERN {
        let ordinary = find_minor_model(g, pattern.graph(), budget)?;
        if ordinary.model.is_none() && ordinary.exhaustive {
            return Ok(SuperfatSearch { model: None, absent: true });
        }
    }
    if g.n() == 0 {
        return Ok(SuperfatSearch { model: None, absent: true });
    }
    let mut seeds: Vec<usize> = (0..g.n()).collect();
    seeds.sort_by_key(|&v| (g.degree(v), v));
    let mut level: Vec<SuperfatModel> = seeds.into_iter().take(SEED_CAP).map(|v| SuperfatModel::point(v, c)).collect();
    let mut budget = budget;
    for _ in 0..ell {
        let unions: Vec<VertexSet> = level.iter().map(|m| m.union()).collect();
        let dist: Vec<Vec<u32>> = unions.iter().map(|u| g.distances_from(u.as_slice())).collect();
        let far = |i: usize, j: usize| unions[j].iter().all(|v| dist[i][v] == INF || dist[i][v] as usize > 5 * c);
        let mut next = Vec::new();
        'outer: for i in 0..level.len() {
            for j in i + 1..level.len() {
                if !far(i, j) {
                    continue;
                }
                for k in j + 1..level.len() {
                    if !far(i, k) || !far(j, k) {
                        continue;
                    }
                    if budget == 0 {
                        break 'outer;
                    }
                    budget -= 1;
                    let trio = [level[i].clone(), level[j].clone(), level[k].clone()];
                    if let Some(m) = claw_from_models(g, tb, &trio, None) {
                        next.push(m);
                        if next.len() >= SEED_CAP {
                            break 'outer;
                        }
                    }
                }
            }
        }
        if next.is_empty() {
            return Ok(SuperfatSearch { model: None, absent: false });
        }
        level = next;
    }
    let model = level.into_iter().find(|m| verify_superfat(g, m).is_none());
    Ok(SuperfatSearch { model, absent: false })
}
