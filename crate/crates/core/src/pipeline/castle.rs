use std::collections::{BTreeSet, HashMap};

use crate::decomp::{generic_certificate, verify_certificate, LineDecomposition, QuasiBoundCertificate};
use crate::error::{invariant, Result};
use crate::graph::{Graph, VertexSet, INF};
use crate::metric::TieBreaker;
use crate::minors::{claw_from_models, verify_superfat, SuperfatModel};
use crate::pipeline::passages::{find_passage, NearTable, Passage};
use crate::pipeline::realm::{verify_realm, Building, BuildingClass, RealmState};
use crate::pipeline::schedule::Schedule;
use crate::pipeline::structure::Contact;

/// Three forts joined through a connected set `W` to be merged into a castle
/// `Z = W ∪ X1 ∪ X2 ∪ X3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CastleMove {
    pub leaves: [usize; 3],
    /// Forts and houses whose union, with the passages, forms `W`.
    pub core: Vec<usize>,
    /// `passages[i]` for `i < 3` starts in `leaves[i]`; the rest join core
    /// buildings.
    pub passages: Vec<Passage>,
    pub w: VertexSet,
    pub z: VertexSet,
    pub certificate: Option<QuasiBoundCertificate>,
    pub model: SuperfatModel,
}

impl CastleMove {
    fn key(&self) -> (Vec<usize>, Vec<usize>) {
        let mut l = self.leaves.to_vec();
        l.sort_unstable();
        (l, self.core.clone())
    }
}

/// Why `mv` does not meet the conditions for adding a castle.
pub fn castle_problem(g: &Graph, sched: &Schedule, realm: &RealmState, mv: &CastleMove) -> Result<Option<String>> {
    let k = realm.century;
    let c = sched.c;
    let b = &realm.buildings;
    if mv.leaves.iter().any(|&x| x >= b.len() || !b[x].is_fort()) {
        return Ok(Some("leaves must be forts".into()));
    }
    let xs = mv.leaves.iter().fold(VertexSet::new(), |acc, &x| acc.union(&b[x].vertices));
    if mv.w.intersects(&xs) || !g.is_connected_induced(&mv.w) {
        return Ok(Some("W must be connected and avoid the three forts".into()));
    }
    if mv.z != mv.w.union(&xs) {
        return Ok(Some("Z is not W plus the three forts".into()));
    }
    let in_w = mv.w.mask(g.n());
    for (i, &x) in mv.leaves.iter().enumerate() {
        let p = &mv.passages[i].vertices;
        if p.len() <= c || !b[x].vertices.contains(p[0]) || !p[1..=c].iter().all(|&v| in_w[v]) {
            return Ok(Some(format!("no {c}-leg on fort {x}")));
        }
        if g.distances_within(&[p[0]], c as u32)[p[c]] as usize != c {
            return Ok(Some(format!("leg on fort {x} is not a geodesic")));
        }
        let d = g.distances_within(b[x].vertices.as_slice(), c as u32);
        let leg: BTreeSet<usize> = p[1..=c].iter().copied().collect();
        if let Some(v) = mv.w.iter().find(|v| d[*v] != INF && !leg.contains(v)) {
            return Ok(Some(format!("vertex {v} of W is within {c} of fort {x} off the leg")));
        }
    }
    let reach = (0..b.len())
        .map(|j| sched.delta_at(k, k as isize + 1 + realm.rank(j)))
        .max()
        .unwrap_or(0);
    let dist = g.distances_within(mv.w.as_slice(), reach as u32);
    for (j, y) in b.iter().enumerate() {
        if y.vertices.is_subset(&mv.z) && y.class != BuildingClass::Castle {
            continue;
        }
        let need = sched.delta_at(k, k as isize + 1 + realm.rank(j));
        if let Some(v) = y.vertices.iter().find(|&v| dist[v] as usize <= need) {
            return Ok(Some(format!("W is within {need} of building {j} at vertex {v}")));
        }
    }
    if k + 1 < sched.ell {
        let Some(cert) = &mv.certificate else {
            return Ok(Some("castle has no certificate".into()));
        };
        let (a, bb) = sched.castle_bound(k);
        if cert.subject != mv.z || cert.a > a || cert.b > bb {
            return Ok(Some(format!("castle certificate ({}, {}) is above ({a}, {bb})", cert.a, cert.b)));
        }
        if let Some(v) = verify_certificate(g, cert)? {
            return Ok(Some(format!("castle certificate: {v:?}")));
        }
    }
    if mv.model.pattern_ell < k + 1 || mv.model.c != c || !mv.model.union().is_subset(&mv.z) {
        return Ok(Some("castle model is not an H_(k+1) inside Z".into()));
    }
    if let Some(v) = verify_superfat(g, &mv.model) {
        return Ok(Some(format!("castle model: {v}")));
    }
    Ok(None)
}

/// Certificate for `Z`: the buildings' certificates side by side, with the
/// passage vertices added to every bag and every boundary center added to
/// every bag.
pub fn castle_certificate(
    g: &Graph,
    sched: &Schedule,
    realm: &RealmState,
    parts: &[usize],
    z: &VertexSet,
) -> Option<QuasiBoundCertificate> {
    let k = realm.century;
    let bound = sched.castle_bound(k);
    let certs: Option<Vec<QuasiBoundCertificate>> = parts.iter().map(|&i| realm.buildings[i].certificate.clone()).collect();
    let built = certs.and_then(|certs| {
        let a_set = certs.iter().fold(VertexSet::new(), |acc, c| acc.union(&c.subject));
        let extra = z.difference(&a_set);
        let centers = certs.iter().fold(VertexSet::new(), |acc, c| acc.union(&c.boundary_centers));
        let mut bags = Vec::new();
        let mut bag_centers = Vec::new();
        for cert in &certs {
            for (bag, cs) in cert.decomposition.bags.iter().zip(&cert.bag_centers) {
                bags.push(bag.union(&extra));
                bag_centers.push(cs.union(&centers));
            }
        }
        let d = g.distances_from(centers.as_slice());
        let reach = extra.iter().map(|v| d[v]).max().unwrap_or(0);
        if reach == INF {
            return None;
        }
        let b = certs.iter().map(|c| c.b).max().unwrap_or(0).max(reach as usize);
        let a = bag_centers.iter().map(|c| c.len()).max().unwrap_or(0).max(centers.len()).max(1);
        let cert = QuasiBoundCertificate {
            subject: z.clone(),
            decomposition: LineDecomposition::new(bags),
            bag_centers,
            a,
            b,
            boundary_centers: centers,
        };
        (a <= bound.0 && b <= bound.1).then_some(cert)
    });
    built
        .filter(|c| matches!(verify_certificate(g, c), Ok(None)))
        .or_else(|| generic_certificate(g, z, bound.0, bound.1))
}

/// Result of a castle search. `exhaustive` is false when a budget ran out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CastleSearch {
    pub found: Option<CastleMove>,
    pub exhaustive: bool,
    pub tried: usize,
}

/// Connected sets of at most `max` units, smallest first, each listed once.
fn connected_subsets(adj: &[Vec<usize>], max: usize) -> Vec<Vec<usize>> {
    fn grow(adj: &[Vec<usize>], root: usize, cur: &mut Vec<usize>, ext: Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        let mut s = cur.clone();
        s.sort_unstable();
        out.push(s);
        if cur.len() == max {
            return;
        }
        let mut ext = ext;
        while let Some(w) = ext.pop() {
            let mut next = ext.clone();
            for &u in &adj[w] {
                if u > root && !cur.contains(&u) && !next.contains(&u) && !adj_any(adj, cur, u) {
                    next.push(u);
                }
            }
            cur.push(w);
            grow(adj, root, cur, next, max, out);
            cur.pop();
        }
    }
    fn adj_any(adj: &[Vec<usize>], cur: &[usize], u: usize) -> bool {
        cur.iter().any(|&c| adj[c].contains(&u))
    }
    let mut out = Vec::new();
    for root in 0..adj.len() {
        let ext: Vec<usize> = adj[root].iter().copied().filter(|&u| u > root).collect();
        grow(adj, root, &mut vec![root], ext, max, &mut out);
    }
    out.sort_by_key(|s| s.len());
    out
}

struct PassageCache<'a> {
    g: &'a Graph,
    sched: &'a Schedule,
    realm: &'a RealmState,
    table: NearTable,
    budget: usize,
    exhaustive: bool,
    memo: HashMap<(usize, usize, usize), Option<Passage>>,
}

impl PassageCache<'_> {
    fn get(&mut self, x: usize, y: usize, max_len: usize) -> Option<Passage> {
        if let Some(p) = self.memo.get(&(x, y, max_len)) {
            return p.clone();
        }
        let r = find_passage(self.g, self.sched, self.realm, &self.table, x, y, max_len, self.budget);
        self.exhaustive &= r.exhaustive;
        self.memo.insert((x, y, max_len), r.passage.clone());
        r.passage
    }
}

const TRIPLE_CAP: usize = 24;

/// Looks for three forts and a core of at most four forts and maximal
/// communities that together form a castle. Cores are tried smallest first;
/// moves whose key is in `skip` are passed over.
pub fn find_castle(
    g: &Graph,
    tb: &TieBreaker,
    sched: &Schedule,
    realm: &RealmState,
    skip: &BTreeSet<(Vec<usize>, Vec<usize>)>,
    budget: usize,
) -> Result<CastleSearch> {
    let k = realm.century;
    let contact = Contact::new(g, tb, realm)?;
    let (units, uadj) = contact.units();
    let leg_len = sched.passage_len(k);
    let link_len = leg_len.max(2 * sched.d0 + 1);
    let b = &realm.buildings;
    // Buildings within reach of each fort.
    let owner = realm.owner(g.n());
    let mut near_fort: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); b.len()];
    for (f, x) in b.iter().enumerate() {
        if !x.is_fort() {
            continue;
        }
        for (v, _) in g.ball_distances(x.vertices.as_slice(), leg_len as u32) {
            if owner[v] != usize::MAX && owner[v] != f {
                near_fort[f].insert(owner[v]);
            }
        }
    }
    let mut cache = PassageCache {
        g,
        sched,
        realm,
        table: NearTable::new(g, sched, realm),
        budget,
        exhaustive: true,
        memo: HashMap::new(),
    };
    let mut tried = 0;
    for core_units in connected_subsets(&uadj, 4) {
        if tried >= budget {
            return Ok(CastleSearch {
                found: None,
                exhaustive: false,
                tried,
            });
        }
        tried += 1;
        let mut core: Vec<usize> = core_units.iter().flat_map(|&u| units[u].members()).collect();
        core.sort_unstable();
        let core_set: BTreeSet<usize> = core.iter().copied().collect();
        // Join the core buildings.
        let mut links = Vec::new();
        let mut comp: Vec<usize> = (0..b.len()).collect();
        fn find(comp: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while comp[r] != r {
                r = comp[r];
            }
            comp[x] = r;
            r
        }
        let mut joined = 1;
        for &x in &core {
            for &y in &contact.adj[x] {
                if y <= x || !core_set.contains(&y) || joined == core.len() {
                    continue;
                }
                let (rx, ry) = (find(&mut comp, x), find(&mut comp, y));
                if rx == ry {
                    continue;
                }
                if let Some(p) = cache.get(x, y, link_len) {
                    comp[rx] = ry;
                    joined += 1;
                    links.push(p);
                }
            }
        }
        if joined < core.len() {
            continue;
        }
        // Candidate leaves with their legs.
        let mut legs: Vec<(usize, Passage)> = Vec::new();
        for f in 0..b.len() {
            if !b[f].is_fort() || core_set.contains(&f) {
                continue;
            }
            let targets: Vec<usize> = near_fort[f].iter().copied().filter(|t| core_set.contains(t)).collect();
            if let Some(p) = targets.into_iter().find_map(|t| cache.get(f, t, leg_len)) {
                legs.push((f, p));
            }
        }
        if legs.len() < 3 {
            continue;
        }
        let mut triples = 0;
        for i in 0..legs.len() {
            for j in i + 1..legs.len() {
                for l in j + 1..legs.len() {
                    if triples == TRIPLE_CAP {
                        break;
                    }
                    triples += 1;
                    let chosen = [&legs[i], &legs[j], &legs[l]];
                    let leaves = [chosen[0].0, chosen[1].0, chosen[2].0];
                    let mut key_leaves = leaves.to_vec();
                    key_leaves.sort_unstable();
                    if skip.contains(&(key_leaves, core.clone())) {
                        continue;
                    }
                    let passages: Vec<Passage> = chosen.iter().map(|(_, p)| p.clone()).chain(links.iter().cloned()).collect();
                    if let Some(mv) = assemble(g, tb, sched, realm, leaves, &core, passages)? {
                        return Ok(CastleSearch {
                            found: Some(mv),
                            exhaustive: cache.exhaustive,
                            tried,
                        });
                    }
                }
            }
        }
    }
    Ok(CastleSearch {
        found: None,
        exhaustive: cache.exhaustive,
        tried,
    })
}

fn assemble(
    g: &Graph,
    tb: &TieBreaker,
    sched: &Schedule,
    realm: &RealmState,
    leaves: [usize; 3],
    core: &[usize],
    passages: Vec<Passage>,
) -> Result<Option<CastleMove>> {
    let b = &realm.buildings;
    let xs = leaves.iter().fold(VertexSet::new(), |acc, &x| acc.union(&b[x].vertices));
    let all = core
        .iter()
        .fold(VertexSet::new(), |acc, &y| acc.union(&b[y].vertices))
        .union(&passages.iter().fold(VertexSet::new(), |acc, p| acc.union(&p.vertex_set())));
    let w = all.difference(&xs);
    let z = w.union(&xs);
    let models: Option<Vec<SuperfatModel>> = leaves.iter().map(|&x| b[x].model.clone()).collect();
    let Some(models) = models else {
        return Ok(None);
    };
    let Some(model) = claw_from_models(g, tb, &[models[0].clone(), models[1].clone(), models[2].clone()], Some(&z)) else {
        return Ok(None);
    };
    let certificate = if realm.century + 1 < sched.ell {
        let parts: Vec<usize> = leaves.iter().chain(core).copied().collect();
        castle_certificate(g, sched, realm, &parts, &z)
    } else {
        None
    };
    let mv = CastleMove {
        leaves,
        core: core.to_vec(),
        passages,
        w,
        z,
        certificate,
        model,
    };
    Ok(castle_problem(g, sched, realm, &mv)?.is_none().then_some(mv))
}

/// Replaces the buildings inside `Z` by the castle `Z`.
pub fn apply_castle(g: &Graph, tb: &TieBreaker, sched: &Schedule, realm: &RealmState, mv: &CastleMove) -> Result<std::result::Result<RealmState, String>> {
    let k = realm.century;
    if k + 1 >= sched.ell {
        return Err(invariant(k, "apply_castle", "a castle of rank ℓ is a witness, not a building"));
    }
    let mut buildings: Vec<Building> = realm.buildings.iter().filter(|x| !x.vertices.is_subset(&mv.z)).cloned().collect();
    buildings.push(Building {
        vertices: mv.z.clone(),
        class: BuildingClass::Castle,
        certificate: mv.certificate.clone(),
        model: Some(mv.model.clone()),
    });
    let next = RealmState {
        century: k,
        kind: realm.kind,
        buildings,
        house_unions: Vec::new(),
    };
    Ok(match verify_realm(g, tb, sched, &next)? {
        None => Ok(next),
        Some(v) => Err(v.to_string()),
    })
}

/// Outcome of repeated castle building.
#[derive(Debug, Clone)]
pub struct CastleStage {
    pub realm: RealmState,
    pub moves: Vec<CastleMove>,
    pub rejected: Vec<String>,
    pub witness: Option<CastleMove>,
    pub exhaustive: bool,
}

/// Adds castles until none can be found. In the last century a castle would
/// have rank `ℓ`, so the first one found is returned as a witness instead.
pub fn build_castles(g: &Graph, tb: &TieBreaker, sched: &Schedule, realm: RealmState, budget: usize) -> Result<CastleStage> {
    let mut stage = CastleStage {
        realm,
        moves: Vec::new(),
        rejected: Vec::new(),
        witness: None,
        exhaustive: true,
    };
    let mut skip = BTreeSet::new();
    loop {
        let search = find_castle(g, tb, sched, &stage.realm, &skip, budget)?;
        stage.exhaustive &= search.exhaustive;
        let Some(mv) = search.found else {
            return Ok(stage);
        };
        if stage.realm.century + 1 >= sched.ell {
            stage.witness = Some(mv);
            return Ok(stage);
        }
        match apply_castle(g, tb, sched, &stage.realm, &mv)? {
            Ok(next) => {
                stage.realm = next;
                stage.moves.push(mv);
                skip.clear();
            }
            Err(why) => {
                stage.rejected.push(format!("castle on forts {:?}: {why}", mv.leaves));
                skip.insert(mv.key());
            }
        }
    }
}
