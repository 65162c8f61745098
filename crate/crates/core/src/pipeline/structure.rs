use std::collections::BTreeSet;

use crate::error::Result;
use crate::graph::{Graph, VertexSet};
use crate::metric::{TieBreaker, VoronoiPartition};
use crate::pipeline::realm::{components_within, BuildingClass, RealmState};

/// Adjoin relation of a realm and the derived notions of communities,
/// semiadjoining forts and peripheral members.
#[derive(Debug, Clone)]
pub struct Contact {
    pub voronoi: VoronoiPartition,
    /// `adj[i]`: buildings whose cells touch the cell of `i`.
    pub adj: Vec<Vec<usize>>,
    class: Vec<BuildingClass>,
}

/// A fort or a maximal community, the vertices of the contact graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Unit {
    Fort(usize),
    Community(Vec<usize>),
}

impl Unit {
    pub fn members(&self) -> Vec<usize> {
        match self {
            Unit::Fort(f) => vec![*f],
            Unit::Community(c) => c.clone(),
        }
    }
}

impl Contact {
    pub fn new(g: &Graph, tb: &TieBreaker, realm: &RealmState) -> Result<Contact> {
        let voronoi = realm.voronoi(g, tb)?;
        let adj = voronoi.touch_graph(g);
        Ok(Contact {
            voronoi,
            adj,
            class: realm.buildings.iter().map(|b| b.class).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.class.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class.is_empty()
    }

    pub fn is_fort(&self, i: usize) -> bool {
        self.class[i] == BuildingClass::Fort
    }

    pub fn is_house(&self, i: usize) -> bool {
        self.class[i] == BuildingClass::House
    }

    pub fn adjoins(&self, i: usize, j: usize) -> bool {
        self.adj[i].contains(&j)
    }

    /// Components of the houses of `members` under adjoining.
    pub fn house_components(&self, members: &[usize]) -> Vec<Vec<usize>> {
        let mut keep = vec![false; self.len()];
        for &m in members {
            keep[m] = self.is_house(m);
        }
        components_within(&self.adj, &|i| keep[i], self.len())
    }

    /// Maximal communities of the whole realm.
    pub fn maximal_communities(&self) -> Vec<Vec<usize>> {
        let all: Vec<usize> = (0..self.len()).collect();
        self.house_components(&all)
    }

    /// Forts adjoined by some member of `community`.
    pub fn forts_adjoined(&self, community: &[usize]) -> BTreeSet<usize> {
        community
            .iter()
            .flat_map(|&h| self.adj[h].iter().copied())
            .filter(|&f| self.is_fort(f))
            .collect()
    }

    /// For every fort of `members`, the other forts of `members` it
    /// semiadjoins within `members`.
    pub fn semiadjoin(&self, members: &[usize]) -> Vec<(usize, BTreeSet<usize>)> {
        let set: BTreeSet<usize> = members.iter().copied().collect();
        let comps = self.house_components(members);
        let forts: Vec<usize> = members.iter().copied().filter(|&f| self.is_fort(f)).collect();
        forts
            .iter()
            .map(|&f| {
                let mut s: BTreeSet<usize> = self.adj[f].iter().copied().filter(|g| *g != f && self.is_fort(*g) && set.contains(g)).collect();
                for comp in &comps {
                    let adj = self.forts_adjoined(comp);
                    if adj.contains(&f) {
                        s.extend(adj.into_iter().filter(|g| *g != f && set.contains(g)));
                    }
                }
                (f, s)
            })
            .collect()
    }

    /// Houses and forts of `members` that are peripheral with respect to
    /// `members`; castles are ignored.
    pub fn peripheral(&self, members: &[usize]) -> BTreeSet<usize> {
        let set: BTreeSet<usize> = members.iter().copied().collect();
        let mut out: BTreeSet<usize> = self
            .semiadjoin(members)
            .into_iter()
            .filter(|(_, s)| s.len() <= 1)
            .map(|(f, _)| f)
            .collect();
        for comp in self.house_components(members) {
            let forts: Vec<usize> = self.forts_adjoined(&comp).into_iter().filter(|f| set.contains(f)).collect();
            if forts.is_empty() || (forts.len() == 1 && out.contains(&forts[0])) {
                out.extend(comp);
            }
        }
        out
    }

    /// Forts and maximal communities, with the adjoin relation between them.
    pub fn units(&self) -> (Vec<Unit>, Vec<Vec<usize>>) {
        let mut units: Vec<Unit> = (0..self.len()).filter(|&i| self.is_fort(i)).map(Unit::Fort).collect();
        units.extend(self.maximal_communities().into_iter().map(Unit::Community));
        let mut unit_of = vec![usize::MAX; self.len()];
        for (u, unit) in units.iter().enumerate() {
            for m in unit.members() {
                unit_of[m] = u;
            }
        }
        let mut adj = vec![BTreeSet::new(); units.len()];
        for (u, unit) in units.iter().enumerate() {
            for m in unit.members() {
                for &w in &self.adj[m] {
                    let v = unit_of[w];
                    if v != usize::MAX && v != u {
                        adj[u].insert(v);
                    }
                }
            }
        }
        (units, adj.into_iter().map(|s| s.into_iter().collect()).collect())
    }

    /// Departures from the contact-graph shape expected of an optimal realm
    /// without a large fat minor: communities adjoining three forts and
    /// forts semiadjoining three others.
    pub fn shape_report(&self) -> Vec<String> {
        let mut out = Vec::new();
        for comp in self.maximal_communities() {
            let forts = self.forts_adjoined(&comp);
            if forts.len() > 2 {
                out.push(format!("community {comp:?} adjoins forts {forts:?}"));
            }
        }
        let all: Vec<usize> = (0..self.len()).collect();
        for (f, s) in self.semiadjoin(&all) {
            if s.len() > 2 {
                out.push(format!("fort {f} semiadjoins {s:?}"));
            }
        }
        out
    }

    /// The cell of each building.
    pub fn cell(&self, i: usize) -> &VertexSet {
        &self.voronoi.cells[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::path;
    use crate::decomp::QuasiBoundCertificate;
    use crate::pipeline::realm::{Building, RealmKind};

    fn building(v: usize, class: BuildingClass) -> Building {
        Building {
            vertices: VertexSet::singleton(v),
            class,
            certificate: Some(QuasiBoundCertificate::singleton(v, 1, 1)),
            model: None,
        }
    }

    #[test]
    fn path_contact() {
        use BuildingClass::{Fort, House};
        let g = path(60);
        let classes = [Fort, House, House, Fort, Fort, House];
        let realm = RealmState {
            century: 1,
            kind: RealmKind::Realm,
            buildings: classes.iter().enumerate().map(|(i, &c)| building(10 * i, c)).collect(),
            house_unions: Vec::new(),
        };
        let c = Contact::new(&g, &TieBreaker::lex(&g), &realm).unwrap();
        assert_eq!(c.maximal_communities(), vec![vec![1, 2], vec![5]]);
        let all: Vec<usize> = (0..6).collect();
        let semi: Vec<_> = c.semiadjoin(&all);
        assert_eq!(semi[0], (0, BTreeSet::from([3])));
        assert_eq!(semi[1], (3, BTreeSet::from([0, 4])));
        // Forts 0 and 4 are ends of the fort path, and community {5} hangs
        // off the peripheral fort 4.
        assert_eq!(c.peripheral(&all), BTreeSet::from([0, 4, 5]));
        let (units, adj) = c.units();
        assert_eq!(units.len(), 5);
        assert_eq!(units[3], Unit::Community(vec![1, 2]));
        assert_eq!(adj[3], vec![0, 1]);
        assert!(c.shape_report().is_empty());
    }
}
