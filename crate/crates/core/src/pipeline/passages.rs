use std::collections::VecDeque;

use crate::graph::{Graph, VertexSet, INF};
use crate::pipeline::realm::{BuildingClass, RealmState};
use crate::pipeline::schedule::Schedule;

/// An induced path joining two distinct houses or forts while staying far
/// from every other building.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Passage {
    /// Vertex sequence from the end in `ends.0` to the end in `ends.1`.
    pub vertices: Vec<usize>,
    pub ends: (usize, usize),
}

impl Passage {
    /// Number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.vertices.iter().copied().collect()
    }

    pub fn incident(&self, x: usize) -> bool {
        self.ends.0 == x || self.ends.1 == x
    }
}

/// For each vertex, the buildings `Y` within `δ(k+1+rk Y)` and the
/// distance to each.
#[derive(Debug, Clone)]
pub struct NearTable {
    pub owner: Vec<usize>,
    near: Vec<Vec<(usize, u32)>>,
}

impl NearTable {
    pub fn new(g: &Graph, sched: &Schedule, realm: &RealmState) -> NearTable {
        let k = realm.century;
        let mut near = vec![Vec::new(); g.n()];
        for (i, b) in realm.buildings.iter().enumerate() {
            let thr = sched.delta_at(k, k as isize + 1 + realm.rank(i));
            for (v, d) in g.ball_distances(b.vertices.as_slice(), thr as u32) {
                near[v].push((i, d));
            }
        }
        NearTable {
            owner: realm.owner(g.n()),
            near,
        }
    }

    /// Distance from `v` to building `y` if it is within the threshold.
    pub fn dist(&self, v: usize, y: usize) -> Option<u32> {
        self.near[v].iter().find(|&&(b, _)| b == y).map(|&(_, d)| d)
    }

    /// `v` lies outside every building and is far from all but `x1`, `x2`.
    pub fn allowed(&self, v: usize, x1: usize, x2: usize) -> bool {
        self.owner[v] == usize::MAX && self.near[v].iter().all(|&(b, _)| b == x1 || b == x2)
    }
}

/// Why a vertex sequence is not a passage.
pub fn passage_problem(g: &Graph, sched: &Schedule, realm: &RealmState, table: &NearTable, p: &Passage) -> Option<String> {
    let c = sched.c;
    let (x1, x2) = p.ends;
    let nb = realm.buildings.len();
    if x1 >= nb || x2 >= nb || x1 == x2 {
        return Some("ends must be two distinct buildings".into());
    }
    if realm.buildings[x1].class == BuildingClass::Castle || realm.buildings[x2].class == BuildingClass::Castle {
        return Some("a castle cannot be joined".into());
    }
    let vs = &p.vertices;
    if vs.len() < 2 || vs.iter().any(|&v| v >= g.n()) {
        return Some("too short or out of range".into());
    }
    if table.owner[vs[0]] != x1 || table.owner[vs[vs.len() - 1]] != x2 {
        return Some("ends are not in the named buildings".into());
    }
    let mut pos = vec![usize::MAX; g.n()];
    for (i, &v) in vs.iter().enumerate() {
        if pos[v] != usize::MAX {
            return Some(format!("vertex {v} repeats"));
        }
        pos[v] = i;
    }
    for (i, &v) in vs.iter().enumerate() {
        for &w in g.neighbors(v) {
            let j = pos[w];
            if j != usize::MAX && j.abs_diff(i) != 1 {
                return Some(format!("chord {v}-{w}"));
            }
        }
        if i + 1 < vs.len() && !g.has_edge(v, vs[i + 1]) {
            return Some(format!("{v} and {} are not adjacent", vs[i + 1]));
        }
    }
    let last = vs.len() - 1;
    for &v in &vs[1..last] {
        if !table.allowed(v, x1, x2) {
            return Some(format!("internal vertex {v} is inside or near another building"));
        }
    }
    // The end vertices themselves must be far from third parties.
    for &v in [vs[0], vs[last]].iter() {
        if table.near[v].iter().any(|&(b, _)| b != x1 && b != x2) {
            return Some(format!("end {v} is near another building"));
        }
    }
    if last < 2 * c + 1 {
        return Some("end segments overlap".into());
    }
    for (end, x, idx) in [(0usize, x1, 0usize), (1, x2, last)] {
        for (i, &v) in vs.iter().enumerate() {
            let along = if end == 0 { i } else { last - i };
            let close = table.dist(v, x).map_or(false, |d| d as usize <= c);
            if close != (along <= c) {
                return Some(format!("vertex {v} breaks the end segment at building {x}"));
            }
        }
        let far = if end == 0 { vs[c] } else { vs[last - c] };
        let d = g.distances_within(&[vs[idx]], c as u32);
        if d[far] as usize != c {
            return Some(format!("end segment at building {x} is not a geodesic"));
        }
    }
    None
}

/// Outcome of a passage search; `exhaustive` means a missing passage is
/// absent rather than unexplored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PassageSearch {
    pub passage: Option<Passage>,
    pub exhaustive: bool,
}

struct Dfs<'a> {
    g: &'a Graph,
    sched: &'a Schedule,
    realm: &'a RealmState,
    table: &'a NearTable,
    x1: usize,
    x2: usize,
    to_x2: Vec<u32>,
    max_len: usize,
    path: Vec<usize>,
    on_path: Vec<bool>,
    budget: usize,
    aborted: bool,
}

impl Dfs<'_> {
    fn step(&mut self) -> Option<Passage> {
        if self.budget == 0 {
            self.aborted = true;
            return None;
        }
        self.budget -= 1;
        let last = *self.path.last().unwrap();
        let mut next: Vec<usize> = self.g.neighbors(last).iter().copied().filter(|&w| !self.on_path[w]).collect();
        next.sort_by_key(|&w| (self.to_x2[w], w));
        for w in next {
            let len = self.path.len();
            if self.to_x2[w] == INF || len + self.to_x2[w] as usize > self.max_len {
                continue;
            }
            let prev = self.path.len() - 1;
            if self.g.neighbors(w).iter().any(|&u| self.on_path[u] && u != self.path[prev]) {
                continue;
            }
            let owner = self.table.owner[w];
            if owner == self.x2 {
                let p = Passage {
                    vertices: self.path.iter().copied().chain([w]).collect(),
                    ends: (self.x1, self.x2),
                };
                if passage_problem(self.g, self.sched, self.realm, self.table, &p).is_none() {
                    return Some(p);
                }
                continue;
            }
            if !self.table.allowed(w, self.x1, self.x2) {
                continue;
            }
            let c = self.sched.c as u32;
            let d1 = self.table.dist(w, self.x1);
            if len > self.sched.c && d1.map_or(false, |d| d <= c) {
                continue;
            }
            self.path.push(w);
            self.on_path[w] = true;
            let found = self.step();
            self.on_path[w] = false;
            self.path.pop();
            if found.is_some() || self.aborted {
                return found;
            }
        }
        None
    }
}

/// Searches for a passage of length at most `max_len` joining buildings
/// `x1` and `x2`: first a shortest path through the permitted vertices,
/// then a budgeted depth-first search over induced paths.
pub fn find_passage(
    g: &Graph,
    sched: &Schedule,
    realm: &RealmState,
    table: &NearTable,
    x1: usize,
    x2: usize,
    max_len: usize,
    budget: usize,
) -> PassageSearch {
    let none = |exhaustive| PassageSearch { passage: None, exhaustive };
    let b = &realm.buildings;
    if x1 == x2 || x1 >= b.len() || x2 >= b.len() || b[x1].class == BuildingClass::Castle || b[x2].class == BuildingClass::Castle {
        return none(true);
    }
    let usable = |v: usize| table.owner[v] == x2 || table.allowed(v, x1, x2);
    // Distances to x2 through usable vertices; they bound every candidate.
    let mut to_x2 = vec![INF; g.n()];
    let mut queue: VecDeque<usize> = b[x2].vertices.iter().collect();
    for v in b[x2].vertices.iter() {
        to_x2[v] = 0;
    }
    while let Some(u) = queue.pop_front() {
        if table.owner[u] == x2 && to_x2[u] > 0 {
            continue;
        }
        for &w in g.neighbors(u) {
            if to_x2[w] == INF && usable(w) {
                to_x2[w] = to_x2[u] + 1;
                queue.push_back(w);
            }
        }
    }
    let starts: Vec<usize> = g
        .boundary(&b[x1].vertices)
        .iter()
        .filter(|&v| !table.near[v].iter().any(|&(y, _)| y != x1 && y != x2))
        .collect();
    // Shortest path first.
    let mut best: Option<(u32, usize)> = None;
    for &s in &starts {
        for &w in g.neighbors(s) {
            if table.owner[w] == usize::MAX && to_x2[w] != INF && best.map_or(true, |(d, _)| to_x2[w] + 1 < d) {
                best = Some((to_x2[w] + 1, s));
            }
        }
    }
    if let Some((d, s)) = best {
        if d as usize <= max_len {
            let mut path = vec![s];
            let mut cur = *g
                .neighbors(s)
                .iter()
                .filter(|&&w| table.owner[w] == usize::MAX && to_x2[w].saturating_add(1) == d)
                .min()
                .unwrap();
            path.push(cur);
            while table.owner[cur] != x2 {
                cur = *g.neighbors(cur).iter().filter(|&&w| to_x2[w].saturating_add(1) == to_x2[cur]).min().unwrap();
                path.push(cur);
            }
            let p = Passage { vertices: path, ends: (x1, x2) };
            if passage_problem(g, sched, realm, table, &p).is_none() {
                return PassageSearch {
                    passage: Some(p),
                    exhaustive: true,
                };
            }
        }
    }
    let mut dfs = Dfs {
        g,
        sched,
        realm,
        table,
        x1,
        x2,
        to_x2,
        max_len,
        path: Vec::new(),
        on_path: vec![false; g.n()],
        budget,
        aborted: false,
    };
    for s in starts {
        dfs.path = vec![s];
        dfs.on_path[s] = true;
        // Other vertices of x1 must stay off the path and out of reach.
        for v in b[x1].vertices.iter() {
            dfs.on_path[v] = true;
        }
        let found = dfs.step();
        for v in b[x1].vertices.iter() {
            dfs.on_path[v] = false;
        }
        if found.is_some() {
            return PassageSearch {
                passage: found,
                exhaustive: true,
            };
        }
        if dfs.aborted {
            return none(false);
        }
    }
    none(true)
}
