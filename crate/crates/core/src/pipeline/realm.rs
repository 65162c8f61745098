use serde::{Deserialize, Serialize};
use thiserror::Error as ThisError;

use crate::decomp::{
    compose_touching, find_quasi_center, generic_certificate, verify_certificate, LineDecomposition, QuasiBoundCertificate,
};
use crate::error::{invariant, Error, Result};
use crate::graph::{Graph, VertexSet, INF};
use crate::metric::{voronoi_partition, TieBreaker, VoronoiPartition};
use crate::minors::{verify_superfat, SuperfatModel};
use crate::pipeline::schedule::Schedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BuildingClass {
    House,
    Fort,
    Castle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Building {
    pub vertices: VertexSet,
    pub class: BuildingClass,
    /// Quasi-bound certificate for the vertex set. Houses carry one too, so
    /// that communities can be certified by concatenation.
    pub certificate: Option<QuasiBoundCertificate>,
    /// Superfat model inside the building (forts and castles).
    pub model: Option<SuperfatModel>,
}

impl Building {
    /// `k−1`, `k` or `k+1` for houses, forts and castles.
    pub fn rank(&self, k: usize) -> isize {
        k as isize
            + match self.class {
                BuildingClass::House => -1,
                BuildingClass::Fort => 0,
                BuildingClass::Castle => 1,
            }
    }

    pub fn is_house(&self) -> bool {
        self.class == BuildingClass::House
    }

    pub fn is_fort(&self) -> bool {
        self.class == BuildingClass::Fort
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RealmKind {
    Society,
    Realm,
}

/// Certificate for the union of the Voronoi cells of a maximal
/// adjoin-connected set of houses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HouseUnion {
    pub members: Vec<usize>,
    pub certificate: QuasiBoundCertificate,
}

/// A society or realm of century `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealmState {
    pub century: usize,
    pub kind: RealmKind,
    pub buildings: Vec<Building>,
    pub house_unions: Vec<HouseUnion>,
}

#[derive(Debug, Clone, PartialEq, Eq, ThisError)]
pub enum RealmViolation {
    #[error("building {0} is empty or disconnected")]
    NotBuilding(usize),
    #[error("buildings overlap at vertex {0}")]
    Overlap(usize),
    #[error("class: {0}")]
    Class(String),
    #[error("covering: vertex {0} is further than d0 from every building")]
    Covering(usize),
    #[error("separation: buildings {x} and {y} are at distance {dist}, need more than {need}")]
    Separation { x: usize, y: usize, dist: usize, need: usize },
    #[error("witness: building {building}: {detail}")]
    Witness { building: usize, detail: String },
    #[error("quasi-bound: building {building}: {detail}")]
    Certificate { building: usize, detail: String },
    #[error("house union {members:?}: {detail}")]
    HouseUnion { members: Vec<usize>, detail: String },
    #[error("community {members:?}: {detail}")]
    Community { members: Vec<usize>, detail: String },
}

impl RealmState {
    pub fn sets(&self) -> Vec<VertexSet> {
        self.buildings.iter().map(|b| b.vertices.clone()).collect()
    }

    pub fn voronoi(&self, g: &Graph, tb: &TieBreaker) -> Result<VoronoiPartition> {
        voronoi_partition(g, tb, &self.sets())
    }

    pub fn rank(&self, i: usize) -> isize {
        self.buildings[i].rank(self.century)
    }

    pub fn count(&self, class: BuildingClass) -> usize {
        self.buildings.iter().filter(|b| b.class == class).count()
    }

    /// Owner of each vertex (`usize::MAX` outside every building).
    pub fn owner(&self, n: usize) -> Vec<usize> {
        let mut owner = vec![usize::MAX; n];
        for (i, b) in self.buildings.iter().enumerate() {
            for v in b.vertices.iter() {
                owner[v] = i;
            }
        }
        owner
    }
}

/// Components of the houses under the adjoin relation, each sorted, in
/// order of their least member.
pub fn house_components(state: &RealmState, adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    components_within(adj, &|i| state.buildings[i].is_house(), state.buildings.len())
}

pub(crate) fn components_within(adj: &[Vec<usize>], keep: &dyn Fn(usize) -> bool, n: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] || !keep(s) {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            for &w in &adj[comp[i]] {
                if !seen[w] && keep(w) {
                    seen[w] = true;
                    comp.push(w);
                }
            }
            i += 1;
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Checks a certificate against a subject and an upper bound.
pub(crate) fn certificate_problem(
    g: &Graph,
    cert: &QuasiBoundCertificate,
    subject: &VertexSet,
    bound: (usize, usize),
) -> Result<Option<String>> {
    if &cert.subject != subject {
        return Ok(Some("certificate is for another set".into()));
    }
    if cert.a > bound.0 || cert.b > bound.1 {
        return Ok(Some(format!("declared ({}, {}) exceeds ({}, {})", cert.a, cert.b, bound.0, bound.1)));
    }
    Ok(verify_certificate(g, cert)?.map(|v| format!("{v:?}")))
}

/// A certificate for `region ⊇ x` from one for `x`: a first bag holding
/// `region ∖ x` and `bd(x)`, then every bag of `x` plus `bd(x)`. The
/// boundary centers of `x` cover the extra vertices at radius `b` plus the
/// largest distance from `region` to `x`.
pub fn expand_certificate(g: &Graph, cert: &QuasiBoundCertificate, region: &VertexSet) -> QuasiBoundCertificate {
    let x = &cert.subject;
    if region == x {
        return cert.clone();
    }
    let dist = g.distances_from(x.as_slice());
    let margin = region.iter().map(|v| dist[v]).filter(|&d| d != INF).max().unwrap_or(0) as usize;
    let bd = g.boundary(x);
    let outside = region.difference(x);
    let mut bags = vec![outside.union(&bd)];
    let mut centers = vec![cert.boundary_centers.clone()];
    for (bag, c) in cert.decomposition.bags.iter().zip(&cert.bag_centers) {
        bags.push(bag.union(&bd));
        centers.push(c.union(&cert.boundary_centers));
    }
    QuasiBoundCertificate {
        subject: region.clone(),
        decomposition: LineDecomposition::new(bags),
        bag_centers: centers,
        a: 2 * cert.a,
        b: cert.b + margin,
        boundary_centers: cert.boundary_centers.clone(),
    }
}

/// Side-by-side certificate for pairwise non-touching parts with boundary
/// centers searched afresh at `bound`.
pub(crate) fn union_certificate(g: &Graph, parts: &[QuasiBoundCertificate], bound: (usize, usize)) -> Option<QuasiBoundCertificate> {
    let mut cert = QuasiBoundCertificate::concat(g, parts);
    if cert.boundary_centers.len() > bound.0 || cert.b > bound.1 {
        cert.boundary_centers = find_quasi_center(g, &g.boundary(&cert.subject), bound.0, bound.1)?.centers;
        cert.b = bound.1.max(cert.b);
    }
    cert.a = cert.a.max(cert.boundary_centers.len());
    (cert.a <= bound.0 && cert.b <= bound.1).then_some(cert)
}

/// Certificate for `V(C)` of a community `C` (a list of house indices).
pub fn community_certificate(g: &Graph, state: &RealmState, members: &[usize], bound: (usize, usize)) -> Option<QuasiBoundCertificate> {
    let parts: Option<Vec<QuasiBoundCertificate>> = members.iter().map(|&i| state.buildings[i].certificate.clone()).collect();
    union_certificate(g, &parts?, bound)
}

/// Cell-union certificates for every maximal adjoin-connected set of
/// houses, at `(α, β − d0)`.
pub fn compute_house_unions(g: &Graph, tb: &TieBreaker, sched: &Schedule, state: &mut RealmState) -> Result<()> {
    let k = state.century;
    let (alpha, beta) = sched.budget(k);
    let bound = (alpha, beta.saturating_sub(sched.d0));
    let vp = state.voronoi(g, tb)?;
    let adj = vp.touch_graph(g);
    let mut unions = Vec::new();
    for comp in house_components(state, &adj) {
        let mut pieces = Vec::new();
        for &i in &comp {
            let cert = state.buildings[i]
                .certificate
                .as_ref()
                .ok_or_else(|| invariant(k, "house_union", format!("house {i} has no certificate")))?;
            pieces.push((vp.cells[i].clone(), expand_certificate(g, cert, &vp.cells[i])));
        }
        let subject = pieces.iter().fold(VertexSet::new(), |acc, p| acc.union(&p.0));
        let composed = compose_touching(g, &pieces)?;
        let cert = if composed.a <= bound.0 && composed.b <= bound.1 {
            composed
        } else {
            generic_certificate(g, &subject, bound.0, bound.1).ok_or_else(|| {
                invariant(
                    k,
                    "house_union",
                    format!("cells of {comp:?} composed to ({}, {}), above ({}, {})", composed.a, composed.b, bound.0, bound.1),
                )
            })?
        };
        unions.push(HouseUnion { members: comp, certificate: cert });
    }
    state.house_unions = unions;
    Ok(())
}

fn structural(g: &Graph, state: &RealmState) -> Option<RealmViolation> {
    let mut owner = vec![usize::MAX; g.n()];
    for (i, b) in state.buildings.iter().enumerate() {
        if b.vertices.is_empty() || g.check_set(&b.vertices).is_err() || !g.is_connected_induced(&b.vertices) {
            return Some(RealmViolation::NotBuilding(i));
        }
        for v in b.vertices.iter() {
            if owner[v] != usize::MAX {
                return Some(RealmViolation::Overlap(v));
            }
            owner[v] = i;
        }
    }
    None
}

fn covering(g: &Graph, sched: &Schedule, state: &RealmState) -> Option<RealmViolation> {
    let sources: Vec<usize> = state.buildings.iter().flat_map(|b| b.vertices.iter()).collect();
    let d = g.distances_within(&sources, sched.d0 as u32);
    (0..g.n()).find(|&v| d[v] == INF).map(RealmViolation::Covering)
}

/// Pairwise separation `dist(X, Y) > δ(rk X + rk Y)` by truncated BFS.
pub(crate) fn separation(g: &Graph, sched: &Schedule, state: &RealmState) -> Option<RealmViolation> {
    let k = state.century;
    let owner = state.owner(g.n());
    let min_rank = (0..state.buildings.len()).map(|i| state.rank(i)).min()?;
    for (i, b) in state.buildings.iter().enumerate() {
        let radius = sched.delta_at(k, state.rank(i) + min_rank);
        for (v, d) in g.ball_distances(b.vertices.as_slice(), radius as u32) {
            let j = owner[v];
            if j == usize::MAX || j == i {
                continue;
            }
            let need = sched.delta_at(k, state.rank(i) + state.rank(j));
            if d as usize <= need {
                return Some(RealmViolation::Separation {
                    x: i.min(j),
                    y: i.max(j),
                    dist: d as usize,
                    need,
                });
            }
        }
    }
    None
}

fn witnesses(g: &Graph, sched: &Schedule, state: &RealmState) -> Option<RealmViolation> {
    for (i, b) in state.buildings.iter().enumerate() {
        if b.is_house() {
            continue;
        }
        let rank = b.rank(state.century) as usize;
        let fail = |detail: String| Some(RealmViolation::Witness { building: i, detail });
        let Some(m) = &b.model else {
            return fail("no superfat model".into());
        };
        if m.pattern_ell < rank || m.c != sched.c {
            return fail(format!("model of H_{} at fatness {}, need H_{rank} at {}", m.pattern_ell, m.c, sched.c));
        }
        if !m.union().is_subset(&b.vertices) {
            return fail("model leaves the building".into());
        }
        if let Some(v) = verify_superfat(g, m) {
            return fail(v.to_string());
        }
    }
    None
}

fn building_certificates(g: &Graph, sched: &Schedule, state: &RealmState) -> Result<Option<RealmViolation>> {
    let k = state.century;
    for (i, b) in state.buildings.iter().enumerate() {
        let bound = match b.class {
            BuildingClass::House => continue,
            BuildingClass::Fort => sched.budget(k),
            BuildingClass::Castle => sched.castle_bound(k),
        };
        let Some(cert) = &b.certificate else {
            return Ok(Some(RealmViolation::Certificate {
                building: i,
                detail: "missing".into(),
            }));
        };
        if let Some(detail) = certificate_problem(g, cert, &b.vertices, bound)? {
            return Ok(Some(RealmViolation::Certificate { building: i, detail }));
        }
    }
    Ok(None)
}

fn house_union_bullet(g: &Graph, tb: &TieBreaker, sched: &Schedule, state: &RealmState) -> Result<Option<RealmViolation>> {
    let (alpha, beta) = sched.budget(state.century);
    let bound = (alpha, beta.saturating_sub(sched.d0));
    let vp = state.voronoi(g, tb)?;
    let adj = vp.touch_graph(g);
    for comp in house_components(state, &adj) {
        let subject = comp.iter().fold(VertexSet::new(), |acc, &i| acc.union(&vp.cells[i]));
        let fail = |detail: String| RealmViolation::HouseUnion {
            members: comp.clone(),
            detail,
        };
        let Some(u) = state.house_unions.iter().find(|u| u.members == comp) else {
            return Ok(Some(fail("no certificate".into())));
        };
        if let Some(detail) = certificate_problem(g, &u.certificate, &subject, bound)? {
            return Ok(Some(fail(detail)));
        }
    }
    Ok(None)
}

const SUBCOMMUNITY_CAP: usize = 32;

/// Communities checked directly: singletons, maximal ones, and a bounded
/// number of breadth-first prefixes inside each maximal one.
pub fn sample_communities(state: &RealmState, adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for comp in house_components(state, adj) {
        for &h in &comp {
            out.push(vec![h]);
        }
        if comp.len() > 1 {
            out.push(comp.clone());
        }
        let mut extra = 0;
        'starts: for &s in &comp {
            let mut order = vec![s];
            let mut i = 0;
            while i < order.len() {
                for &w in &adj[order[i]] {
                    if state.buildings[w].is_house() && !order.contains(&w) {
                        order.push(w);
                    }
                }
                i += 1;
            }
            for len in 2..order.len() {
                if extra == SUBCOMMUNITY_CAP {
                    break 'starts;
                }
                let mut c = order[..len].to_vec();
                c.sort_unstable();
                if !out.contains(&c) {
                    out.push(c);
                    extra += 1;
                }
            }
        }
    }
    out
}

fn community_bullet(g: &Graph, tb: &TieBreaker, sched: &Schedule, state: &RealmState) -> Result<Option<RealmViolation>> {
    let bound = sched.budget(state.century);
    let vp = state.voronoi(g, tb)?;
    let adj = vp.touch_graph(g);
    for members in sample_communities(state, &adj) {
        let subject = members.iter().fold(VertexSet::new(), |acc, &i| acc.union(&state.buildings[i].vertices));
        let detail = match community_certificate(g, state, &members, bound) {
            None => Some(format!("no certificate at ({}, {})", bound.0, bound.1)),
            Some(cert) => certificate_problem(g, &cert, &subject, bound)?,
        };
        if let Some(detail) = detail {
            return Ok(Some(RealmViolation::Community { members, detail }));
        }
    }
    Ok(None)
}

/// Checks the five society bullets.
pub fn verify_society(g: &Graph, tb: &TieBreaker, sched: &Schedule, state: &RealmState) -> Result<Option<RealmViolation>> {
    if let Some(v) = structural(g, state) {
        return Ok(Some(v));
    }
    if state.count(BuildingClass::Castle) > 0 {
        return Ok(Some(RealmViolation::Class("a society has no castles".into())));
    }
    if let Some(v) = covering(g, sched, state)
        .or_else(|| separation(g, sched, state))
        .or_else(|| witnesses(g, sched, state))
    {
        return Ok(Some(v));
    }
    if let Some(v) = building_certificates(g, sched, state)? {
        return Ok(Some(v));
    }
    house_union_bullet(g, tb, sched, state)
}

/// Checks the six realm bullets.
pub fn verify_realm(g: &Graph, tb: &TieBreaker, sched: &Schedule, state: &RealmState) -> Result<Option<RealmViolation>> {
    if let Some(v) = structural(g, state)
        .or_else(|| covering(g, sched, state))
        .or_else(|| separation(g, sched, state))
        .or_else(|| witnesses(g, sched, state))
    {
        return Ok(Some(v));
    }
    if let Some(v) = building_certificates(g, sched, state)? {
        return Ok(Some(v));
    }
    community_bullet(g, tb, sched, state)
}

/// Century-0 society: a greedy maximal `d0`-scattered set of singleton forts.
pub fn initial_society(g: &Graph, tb: &TieBreaker, sched: &Schedule) -> Result<RealmState> {
    if g.n() == 0 {
        return Err(Error::Precondition("graph has no vertices".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let (alpha, beta) = sched.budget(0);
    let mut near = vec![false; g.n()];
    let mut buildings = Vec::new();
    for v in 0..g.n() {
        if near[v] {
            continue;
        }
        for (u, _) in g.ball_distances(&[v], sched.d0 as u32) {
            near[u] = true;
        }
        buildings.push(Building {
            vertices: VertexSet::singleton(v),
            class: BuildingClass::Fort,
            certificate: Some(QuasiBoundCertificate::singleton(v, alpha, beta)),
            model: Some(SuperfatModel::point(v, sched.c)),
        });
    }
    let state = RealmState {
        century: 0,
        kind: RealmKind::Society,
        buildings,
        house_unions: Vec::new(),
    };
    if let Some(v) = verify_society(g, tb, sched, &state)? {
        return Err(invariant(0, "initial_society", v.to_string()));
    }
    Ok(state)
}

/// What the saturation loop did.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GrowthReport {
    pub added: usize,
    pub uncertified: usize,
}

fn grows(g: &Graph, sched: &Schedule, state: &RealmState, owner: &[usize], i: usize, u: usize) -> bool {
    let k = state.century;
    let min_rank = (0..state.buildings.len()).map(|j| state.rank(j)).min().unwrap_or(0);
    let radius = sched.delta_at(k, state.rank(i) + min_rank);
    g.ball_distances(&[u], radius as u32).into_iter().all(|(v, d)| {
        let j = owner[v];
        j == usize::MAX || j == i || d as usize > sched.delta_at(k, state.rank(i) + state.rank(j))
    })
}

/// Grows houses one vertex at a time while the result stays a society with
/// the same Voronoi partition, then checks the realm bullets.
pub fn society_to_realm(g: &Graph, tb: &TieBreaker, sched: &Schedule, s: &RealmState) -> Result<(RealmState, GrowthReport)> {
    let k = s.century;
    if s.kind != RealmKind::Society {
        return Err(Error::Precondition("input is not a society".into()));
    }
    let mut state = s.clone();
    let mut report = GrowthReport::default();
    let bound = sched.budget(k);
    let mut vp = state.voronoi(g, tb)?;
    let mut owner = state.owner(g.n());
    let mut blocked = vec![false; state.buildings.len()];
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..state.buildings.len() {
            if !state.buildings[i].is_house() {
                continue;
            }
            let union_cert = state
                .house_unions
                .iter()
                .find(|u| u.members.contains(&i))
                .map(|u| u.certificate.clone());
            loop {
                let x = state.buildings[i].vertices.clone();
                let mut cands: Vec<usize> = x
                    .iter()
                    .flat_map(|v| g.neighbors(v).iter().copied())
                    .filter(|&u| owner[u] == usize::MAX && vp.owner[u] == i)
                    .collect();
                cands.sort_unstable();
                cands.dedup();
                let mut grown = false;
                for u in cands {
                    if !grows(g, sched, &state, &owner, i, u) {
                        continue;
                    }
                    let mut bigger = x.clone();
                    bigger.insert(u);
                    let mut sets = state.sets();
                    sets[i] = bigger.clone();
                    let next = voronoi_partition(g, tb, &sets)?;
                    if next.owner != vp.owner {
                        continue;
                    }
                    let cert = union_cert
                        .as_ref()
                        .and_then(|c| c.restrict(g, &bigger))
                        .and_then(|c| union_certificate(g, &[c], bound));
                    let Some(cert) = cert else {
                        blocked[i] = true;
                        report.uncertified += 1;
                        continue;
                    };
                    state.buildings[i].vertices = bigger;
                    state.buildings[i].certificate = Some(cert);
                    owner[u] = i;
                    vp = next;
                    report.added += 1;
                    grown = true;
                    changed = true;
                    break;
                }
                if !grown {
                    break;
                }
            }
        }
    }
    // Every boundary vertex of a saturated house is within d0 of the
    // boundary of its cell.
    for (i, b) in state.buildings.iter().enumerate() {
        if !b.is_house() || blocked[i] {
            continue;
        }
        let bd = g.boundary(&b.vertices);
        if bd.is_empty() {
            continue;
        }
        let cell_bd = g.boundary(&vp.cells[i]);
        if cell_bd.is_empty() {
            continue;
        }
        let d = g.distances_within(cell_bd.as_slice(), sched.d0 as u32);
        let far = bd.iter().find(|&v| d[v] == INF);
        if let Some(v) = far {
            return Err(invariant(
                k,
                "society_to_realm",
                format!("house {i}: boundary vertex {v} is further than d0 from the boundary of its cell"),
            ));
        }
    }
    state.kind = RealmKind::Realm;
    if let Some(v) = verify_realm(g, tb, sched, &state)? {
        return Err(invariant(k, "society_to_realm", v.to_string()));
    }
    Ok((state, report))
}
