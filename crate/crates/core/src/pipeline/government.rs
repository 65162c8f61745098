use std::collections::BTreeSet;

use crate::decomp::{compose_touching, generic_certificate, QuasiBoundCertificate};
use crate::error::{invariant, Result};
use crate::graph::{Graph, VertexSet, INF};
use crate::metric::{voronoi_partition, TieBreaker, VoronoiPartition};
use crate::minors::{claw_from_models, verify_superfat, SuperfatModel};
use crate::pipeline::realm::{certificate_problem, components_within, expand_certificate, BuildingClass, RealmState};
use crate::pipeline::schedule::Schedule;
use crate::pipeline::structure::Contact;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Province {
    /// Building indices, sorted.
    pub members: Vec<usize>,
    pub ptype: usize,
    pub framework: VertexSet,
    pub certificate: QuasiBoundCertificate,
    pub model: SuperfatModel,
}

/// Provinces of a government; the buildings outside them are the rebels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Government {
    pub provinces: Vec<Province>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stronghold {
    Framework(usize),
    Rebel(usize),
}

/// Strongholds with their local sets and the talks-to relation.
#[derive(Debug, Clone)]
pub struct Strongholds {
    pub kinds: Vec<Stronghold>,
    pub local: VoronoiPartition,
    pub talks: Vec<BTreeSet<usize>>,
    /// Stronghold index of each rebel building (`usize::MAX` otherwise).
    pub of_rebel: Vec<usize>,
}

impl Strongholds {
    pub fn rebel_talks(&self, x: usize, y: usize) -> bool {
        self.talks[self.of_rebel[x]].contains(&self.of_rebel[y])
    }

    /// Provinces whose framework some member of `c` talks to.
    pub fn provinces_talked(&self, c: &[usize]) -> BTreeSet<usize> {
        c.iter()
            .flat_map(|&x| self.talks[self.of_rebel[x]].iter())
            .filter_map(|&s| match self.kinds[s] {
                Stronghold::Framework(p) => Some(p),
                Stronghold::Rebel(_) => None,
            })
            .collect()
    }
}

impl Government {
    pub fn primordial(realm: &RealmState) -> Result<Government> {
        let k = realm.century;
        let mut provinces = Vec::new();
        for (i, b) in realm.buildings.iter().enumerate() {
            if b.class != BuildingClass::Castle {
                continue;
            }
            let (Some(cert), Some(model)) = (&b.certificate, &b.model) else {
                return Err(invariant(k, "primordial", format!("castle {i} lacks a certificate or model")));
            };
            provinces.push(Province {
                members: vec![i],
                ptype: k + 1,
                framework: b.vertices.clone(),
                certificate: cert.clone(),
                model: model.clone(),
            });
        }
        Ok(Government { provinces })
    }

    pub fn rebels(&self, realm: &RealmState) -> Vec<usize> {
        let governed: BTreeSet<usize> = self.provinces.iter().flat_map(|p| p.members.iter().copied()).collect();
        (0..realm.buildings.len()).filter(|i| !governed.contains(i)).collect()
    }

    pub fn strongholds(&self, g: &Graph, tb: &TieBreaker, realm: &RealmState) -> Result<Strongholds> {
        let mut kinds: Vec<Stronghold> = (0..self.provinces.len()).map(Stronghold::Framework).collect();
        let mut sets: Vec<VertexSet> = self.provinces.iter().map(|p| p.framework.clone()).collect();
        let mut of_rebel = vec![usize::MAX; realm.buildings.len()];
        for r in self.rebels(realm) {
            of_rebel[r] = kinds.len();
            kinds.push(Stronghold::Rebel(r));
            sets.push(realm.buildings[r].vertices.clone());
        }
        let local = voronoi_partition(g, tb, &sets)?;
        let talks = local.touch_graph(g).into_iter().map(|v| v.into_iter().collect()).collect();
        Ok(Strongholds {
            kinds,
            local,
            talks,
            of_rebel,
        })
    }
}

/// Components of the talks-to relation on rebel houses.
pub fn networks(realm: &RealmState, sh: &Strongholds) -> Vec<Vec<usize>> {
    let n = realm.buildings.len();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|x| {
            if sh.of_rebel[x] == usize::MAX {
                return Vec::new();
            }
            sh.talks[sh.of_rebel[x]]
                .iter()
                .filter_map(|&s| match sh.kinds[s] {
                    Stronghold::Rebel(y) => Some(y),
                    Stronghold::Framework(_) => None,
                })
                .collect()
        })
        .collect();
    components_within(&adj, &|x| sh.of_rebel[x] != usize::MAX && realm.buildings[x].is_house(), n)
}

fn pow3(e: usize) -> usize {
    3usize.pow(e as u32)
}

/// Why `gov` is not a small government for `realm`.
pub fn government_problem(g: &Graph, tb: &TieBreaker, sched: &Schedule, realm: &RealmState, gov: &Government) -> Result<Option<String>> {
    let k = realm.century;
    let contact = Contact::new(g, tb, realm)?;
    let mut owner = vec![usize::MAX; realm.buildings.len()];
    for (p, prov) in gov.provinces.iter().enumerate() {
        for &m in &prov.members {
            if m >= owner.len() || owner[m] != usize::MAX {
                return Ok(Some(format!("building {m} is in two provinces or out of range")));
            }
            owner[m] = p;
        }
    }
    let mut in_frameworks = vec![usize::MAX; g.n()];
    for (p, prov) in gov.provinces.iter().enumerate() {
        let t = prov.ptype;
        if t <= k || t >= sched.ell {
            return Ok(Some(format!("province {p} has type {t} outside {}..{}", k + 1, sched.ell)));
        }
        let s = t - k;
        let peri = contact.peripheral(&prov.members);
        let peri_forts = peri.iter().filter(|&&x| contact.is_fort(x)).count();
        let peri_houses: Vec<usize> = peri.iter().copied().filter(|&x| contact.is_house(x)).collect();
        let castles = prov.members.iter().filter(|&&x| realm.buildings[x].class == BuildingClass::Castle).count();
        if peri_forts > pow3(s) - 1 {
            return Ok(Some(format!("province {p} has {peri_forts} peripheral forts")));
        }
        if contact.house_components(&peri_houses).len() > pow3(s) - 2 {
            return Ok(Some(format!("province {p} has too many peripheral communities")));
        }
        if castles != pow3(s - 1) {
            return Ok(Some(format!("province {p} of type {t} has {castles} castles")));
        }
        let va = prov.members.iter().fold(VertexSet::new(), |acc, &m| acc.union(&realm.buildings[m].vertices));
        if !va.is_subset(&prov.framework) || !g.is_connected_induced(&prov.framework) {
            return Ok(Some(format!("framework of province {p} is disconnected or misses a member")));
        }
        for v in prov.framework.iter() {
            if in_frameworks[v] != usize::MAX {
                return Ok(Some(format!("frameworks overlap at {v}")));
            }
            in_frameworks[v] = p;
        }
        let d = g.induced_distances(&prov.framework, va.as_slice());
        let radius = sched.d0 * s;
        if let Some(v) = prov.framework.iter().find(|&v| d[v] == INF || d[v] as usize > radius) {
            return Ok(Some(format!("framework vertex {v} of province {p} is further than {radius} from its members")));
        }
        let m = &prov.model;
        if m.pattern_ell < t || m.c != sched.c || !m.union().is_subset(&prov.framework) {
            return Ok(Some(format!("province {p} lacks an H_{t} model inside its framework")));
        }
        if let Some(v) = verify_superfat(g, m) {
            return Ok(Some(format!("province {p} model: {v}")));
        }
        if let Some(why) = certificate_problem(g, &prov.certificate, &prov.framework, sched.small_bound(k))? {
            return Ok(Some(format!("province {p} is not small: {why}")));
        }
    }
    for (i, b) in realm.buildings.iter().enumerate() {
        if b.class == BuildingClass::Castle && owner[i] == usize::MAX {
            return Ok(Some(format!("castle {i} is a rebel")));
        }
    }
    // Separation of frameworks from each other and from rebels.
    let rebels = gov.rebels(realm);
    for (p, prov) in gov.provinces.iter().enumerate() {
        let t = prov.ptype as isize;
        let reach = sched.delta_at(k, t + k as isize - 1);
        for (v, d) in g.ball_distances(prov.framework.as_slice(), reach as u32) {
            let q = in_frameworks[v];
            if q != usize::MAX && q != p {
                let need = sched.delta_at(k, t + gov.provinces[q].ptype as isize);
                if d as usize <= need {
                    return Ok(Some(format!("frameworks {p} and {q} are within {need}")));
                }
            }
        }
        let dist = g.distances_within(prov.framework.as_slice(), reach as u32);
        for &r in &rebels {
            let need = sched.delta_at(k, t + realm.rank(r));
            if realm.buildings[r].vertices.iter().any(|v| dist[v] as usize <= need) {
                return Ok(Some(format!("framework {p} is within {need} of rebel {r}")));
            }
        }
    }
    Ok(None)
}

/// A set of rebels with designated leaders that can overthrow three
/// provinces of one type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cabal {
    pub members: Vec<usize>,
    pub leaders: Vec<usize>,
    pub leading: Vec<Vec<usize>>,
    pub j: usize,
    pub provinces: [usize; 3],
}

fn in_communication(sh: &Strongholds, c: &[usize]) -> bool {
    let set: BTreeSet<usize> = c.iter().copied().collect();
    let mut seen = BTreeSet::from([c[0]]);
    let mut stack = vec![c[0]];
    while let Some(x) = stack.pop() {
        for &y in c {
            if !seen.contains(&y) && set.contains(&y) && sh.rebel_talks(x, y) {
                seen.insert(y);
                stack.push(y);
            }
        }
    }
    seen.len() == set.len()
}

/// Some type with three provinces talked to by `c`, as `(j, [A1, A2, A3])`.
fn danger(gov: &Government, sh: &Strongholds, c: &[usize]) -> Option<(usize, [usize; 3])> {
    let talked = sh.provinces_talked(c);
    let mut types: Vec<usize> = talked.iter().map(|&p| gov.provinces[p].ptype).collect();
    types.sort_unstable();
    types.dedup();
    types.into_iter().find_map(|j| {
        let ps: Vec<usize> = talked.iter().copied().filter(|&p| gov.provinces[p].ptype == j).take(3).collect();
        (ps.len() == 3).then(|| (j, [ps[0], ps[1], ps[2]]))
    })
}

/// Why `cabal` fails one of the six conditions.
pub fn cabal_problem(realm: &RealmState, contact: &Contact, gov: &Government, sh: &Strongholds, cabal: &Cabal) -> Option<String> {
    let c = &cabal.members;
    if c.is_empty() || c.iter().any(|&x| x >= sh.of_rebel.len() || sh.of_rebel[x] == usize::MAX) {
        return Some("members must be rebels".into());
    }
    let set: BTreeSet<usize> = c.iter().copied().collect();
    let nets = networks(realm, sh);
    if !in_communication(sh, c) {
        return Some("not in communication".into());
    }
    for n in &nets {
        if n.iter().any(|x| set.contains(x)) && !n.iter().all(|x| set.contains(x)) {
            return Some(format!("not organized: network {n:?} is split"));
        }
    }
    if cabal.leaders.len() > 2 || cabal.leaders.iter().any(|x| !set.contains(x) || !contact.is_fort(*x)) {
        return Some("leaders must be at most two forts of the cabal".into());
    }
    if cabal.leading.len() > 3 || cabal.leading.iter().any(|n| !nets.contains(n) || !n.iter().all(|x| set.contains(x))) {
        return Some("leading networks must be at most three networks of the cabal".into());
    }
    let led = |x: usize| cabal.leaders.contains(&x) || cabal.leading.iter().any(|n| n.contains(&x));
    if let Some(x) = contact.peripheral(c).into_iter().find(|&x| !led(x)) {
        return Some(format!("peripheral member {x} is not led"));
    }
    for &x in c {
        let outside = sh.talks[sh.of_rebel[x]].iter().any(|&s| match sh.kinds[s] {
            Stronghold::Rebel(y) => !set.contains(&y),
            Stronghold::Framework(_) => false,
        });
        if outside && !led(x) {
            return Some(format!("member {x} talks outside the cabal without being led"));
        }
    }
    let j = cabal.j;
    let talked = sh.provinces_talked(c);
    if cabal.provinces.iter().any(|p| !talked.contains(p) || gov.provinces[*p].ptype != j)
        || cabal.provinces[0] == cabal.provinces[1]
        || cabal.provinces[1] == cabal.provinces[2]
        || cabal.provinces[0] == cabal.provinces[2]
    {
        return Some("three provinces of one type are not all talked to".into());
    }
    let is_network = nets.iter().any(|n| n == c);
    if c.len() > 1 && !is_network {
        let types: BTreeSet<usize> = talked.iter().map(|&p| gov.provinces[p].ptype).collect();
        for t in types {
            if talked.iter().filter(|&&p| gov.provinces[p].ptype == t).count() > 4 {
                return Some(format!("talks to more than four provinces of type {t}"));
            }
        }
    }
    None
}

/// Order of the forts of `c` along their semiadjoin path or cycle.
fn fort_order(contact: &Contact, c: &[usize]) -> Vec<usize> {
    let semi = contact.semiadjoin(c);
    let forts: Vec<usize> = semi.iter().map(|(f, _)| *f).collect();
    if semi.iter().any(|(_, s)| s.len() > 2) || forts.is_empty() {
        return forts;
    }
    let start = semi.iter().find(|(_, s)| s.len() <= 1).map_or(forts[0], |(f, _)| *f);
    let mut order = vec![start];
    while order.len() < forts.len() {
        let last = *order.last().unwrap();
        let next = semi.iter().find(|(f, _)| *f == last).and_then(|(_, s)| s.iter().find(|x| !order.contains(x)).copied());
        match next {
            Some(x) => order.push(x),
            None => break,
        }
    }
    for f in forts {
        if !order.contains(&f) {
            order.push(f);
        }
    }
    order
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

/// Candidate cabals: single rebels, networks, and the windows of forts of
/// each maximal set of rebels in communication.
pub fn cabal_candidates(realm: &RealmState, contact: &Contact, gov: &Government, sh: &Strongholds) -> Vec<Cabal> {
    let nets = networks(realm, sh);
    let net_of = |x: usize| nets.iter().find(|n| n.contains(&x)).cloned();
    let mut out = Vec::new();
    let mut push = |members: Vec<usize>, leaders: Vec<usize>, leading: Vec<Vec<usize>>| {
        if let Some((j, provinces)) = danger(gov, sh, &members) {
            out.push(Cabal {
                members,
                leaders,
                leading,
                j,
                provinces,
            });
        }
    };
    let rebels = gov.rebels(realm);
    for &x in &rebels {
        if contact.is_fort(x) {
            push(vec![x], vec![x], Vec::new());
        } else if net_of(x).map_or(false, |n| n == vec![x]) {
            push(vec![x], Vec::new(), vec![vec![x]]);
        }
    }
    for n in &nets {
        if n.len() > 1 {
            push(n.clone(), Vec::new(), vec![n.clone()]);
        }
    }
    // Maximal sets in communication.
    let n = realm.buildings.len();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|x| {
            if sh.of_rebel[x] == usize::MAX {
                return Vec::new();
            }
            rebels.iter().copied().filter(|&y| y != x && sh.rebel_talks(x, y)).collect()
        })
        .collect();
    for comp in components_within(&adj, &|x| sh.of_rebel[x] != usize::MAX, n) {
        let order = fort_order(contact, &comp);
        if order.is_empty() {
            continue;
        }
        let talking = |forts: &[usize]| -> Vec<Vec<usize>> {
            nets.iter()
                .filter(|net| comp.contains(&net[0]) && net.iter().any(|&h| forts.iter().any(|&f| sh.rebel_talks(h, f))))
                .cloned()
                .collect()
        };
        let window = |i1: usize, i2: usize| -> Vec<usize> {
            let forts = &order[i1..=i2];
            sorted(forts.iter().copied().chain(talking(forts).into_iter().flatten()).collect())
        };
        let mut best: Option<(usize, usize)> = None;
        'width: for w in 0..order.len() {
            for i1 in 0..order.len() - w {
                if danger(gov, sh, &window(i1, i1 + w)).is_some() {
                    best = Some((i1, i1 + w));
                    break 'width;
                }
            }
        }
        let Some((i1, i2)) = best else {
            continue;
        };
        let interior: Vec<Vec<usize>> = if i2 > i1 + 1 { talking(&order[i1 + 1..i2]) } else { Vec::new() };
        let d = sorted(order[i1..=i2].iter().copied().chain(interior.iter().flatten().copied()).collect());
        let extra: Vec<Vec<usize>> = talking(&[order[i1], order[i2]]).into_iter().filter(|net| !d.contains(&net[0])).collect();
        let leaders = sorted(vec![order[i1], order[i2]]);
        // Fewest extra networks making the set dangerous.
        let mut chosen = None;
        'size: for size in 0..=3.min(extra.len()) {
            let mut idx: Vec<usize> = (0..size).collect();
            loop {
                let members = sorted(d.iter().copied().chain(idx.iter().flat_map(|&i| extra[i].iter().copied())).collect());
                if danger(gov, sh, &members).is_some() {
                    chosen = Some((members, idx.iter().map(|&i| extra[i].clone()).collect::<Vec<_>>()));
                    break 'size;
                }
                // Next combination.
                let mut i = size;
                while i > 0 && idx[i - 1] == extra.len() - size + i - 1 {
                    i -= 1;
                }
                if i == 0 {
                    break;
                }
                idx[i - 1] += 1;
                for t in i..size {
                    idx[t] = idx[t - 1] + 1;
                }
            }
        }
        if let Some((members, leading)) = chosen {
            push(members, leaders, leading);
        }
    }
    out
}

/// What a revolution produced.
#[derive(Debug, Clone)]
pub enum Revolution {
    Government(Government),
    /// The merged province would have type `ℓ`: its claw model is returned.
    Witness(SuperfatModel),
    Rejected(String),
}

/// Merges the cabal and its three provinces into one province of the next
/// type, with framework the union of their local sets.
pub fn apply_revolution(
    g: &Graph,
    tb: &TieBreaker,
    sched: &Schedule,
    realm: &RealmState,
    gov: &Government,
    sh: &Strongholds,
    cabal: &Cabal,
) -> Result<Revolution> {
    let k = realm.century;
    let group: Vec<usize> = cabal
        .provinces
        .iter()
        .copied()
        .chain(cabal.members.iter().map(|&x| sh.of_rebel[x]))
        .collect();
    let framework = group.iter().fold(VertexSet::new(), |acc, &s| acc.union(&sh.local.cells[s]));
    let models = cabal.provinces.map(|p| gov.provinces[p].model.clone());
    let Some(model) = claw_from_models(g, tb, &models, Some(&framework)) else {
        return Ok(Revolution::Rejected("no claw inside the new framework".into()));
    };
    if let Some(v) = verify_superfat(g, &model) {
        return Err(invariant(k, "revolution", format!("claw model is invalid: {v}")));
    }
    if cabal.j + 1 >= sched.ell {
        return Ok(Revolution::Witness(model));
    }
    let bound = sched.small_bound(k);
    let mut pieces = Vec::new();
    for &s in &group {
        let cert = match sh.kinds[s] {
            Stronghold::Framework(p) => gov.provinces[p].certificate.clone(),
            Stronghold::Rebel(x) => match &realm.buildings[x].certificate {
                Some(c) => c.clone(),
                None => return Ok(Revolution::Rejected(format!("rebel {x} has no certificate"))),
            },
        };
        pieces.push((sh.local.cells[s].clone(), expand_certificate(g, &cert, &sh.local.cells[s])));
    }
    let composed = compose_touching(g, &pieces)?;
    let certificate = if composed.a <= bound.0 && composed.b <= bound.1 {
        composed
    } else if let Some(c) = generic_certificate(g, &framework, bound.0, bound.1) {
        c
    } else {
        return Ok(Revolution::Rejected(format!(
            "framework composed to ({}, {}), above ({}, {})",
            composed.a, composed.b, bound.0, bound.1
        )));
    };
    let mut members: Vec<usize> = cabal.members.clone();
    for &p in &cabal.provinces {
        members.extend(gov.provinces[p].members.iter().copied());
    }
    let province = Province {
        members: sorted(members),
        ptype: cabal.j + 1,
        framework,
        certificate,
        model,
    };
    let mut provinces: Vec<Province> = gov
        .provinces
        .iter()
        .enumerate()
        .filter(|(p, _)| !cabal.provinces.contains(p))
        .map(|(_, p)| p.clone())
        .collect();
    provinces.push(province);
    let next = Government { provinces };
    Ok(match government_problem(g, tb, sched, realm, &next)? {
        None => Revolution::Government(next),
        Some(why) => Revolution::Rejected(why),
    })
}

/// Outcome of running revolutions until no cabal remains.
#[derive(Debug, Clone)]
pub struct Stabilized {
    pub government: Government,
    pub revolutions: usize,
    pub rejected: Vec<String>,
    pub witness: Option<SuperfatModel>,
    /// Notes on properties the theory guarantees but which failed here.
    pub notes: Vec<String>,
}

pub fn stabilize_government(g: &Graph, tb: &TieBreaker, sched: &Schedule, realm: &RealmState) -> Result<Stabilized> {
    let k = realm.century;
    let mut out = Stabilized {
        government: Government::primordial(realm)?,
        revolutions: 0,
        rejected: Vec::new(),
        witness: None,
        notes: Vec::new(),
    };
    if let Some(why) = government_problem(g, tb, sched, realm, &out.government)? {
        return Err(invariant(k, "primordial", why));
    }
    let contact = Contact::new(g, tb, realm)?;
    let mut rejected: BTreeSet<Vec<usize>> = BTreeSet::new();
    loop {
        let sh = out.government.strongholds(g, tb, realm)?;
        for r in out.government.rebels(realm) {
            let local = &sh.local.cells[sh.of_rebel[r]];
            if !local.is_subset(contact.cell(r)) {
                out.notes.push(format!("local set of rebel {r} leaves its cell"));
            }
        }
        let mut progressed = false;
        for cabal in cabal_candidates(realm, &contact, &out.government, &sh) {
            if rejected.contains(&cabal.members) {
                continue;
            }
            if let Some(why) = cabal_problem(realm, &contact, &out.government, &sh, &cabal) {
                out.notes.push(format!("candidate {:?}: {why}", cabal.members));
                rejected.insert(cabal.members.clone());
                continue;
            }
            match apply_revolution(g, tb, sched, realm, &out.government, &sh, &cabal)? {
                Revolution::Government(next) => {
                    out.government = next;
                    out.revolutions += 1;
                    progressed = true;
                }
                Revolution::Witness(m) => {
                    out.witness = Some(m);
                    return Ok(out);
                }
                Revolution::Rejected(why) => {
                    out.rejected.push(format!("cabal {:?}: {why}", cabal.members));
                    rejected.insert(cabal.members.clone());
                    continue;
                }
            }
            break;
        }
        if !progressed {
            return Ok(out);
        }
    }
}
