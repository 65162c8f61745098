use std::collections::BTreeMap;

use crate::error::{invariant, Error, Result};
use crate::graph::{Graph, VertexSet, INF};
use crate::metric::{lambda_geodesic, LambdaPath, TieBreaker};
use crate::minors::model::{union_of, verify_superfat, SuperfatModel, UElem};
use crate::minors::pattern::build_pattern_tree;

/// Joins three far-apart superfat `H_t` models through a connected set `W`
/// into a superfat `H_{t+1}` model.
///
/// `W` must lie at distance exactly `c + 1` from every model and each leg is
/// a geodesic of that length from `W` (first vertex) to its model (last
/// vertex). With legs of length `c` the root image would sit at distance
/// `c` from the images of its grandchildren, which the fatness condition
/// forbids.
pub fn claw_combine(g: &Graph, models: &[SuperfatModel; 3], w: &VertexSet, legs: &[LambdaPath; 3]) -> Result<SuperfatModel> {
    let t = models[0].pattern_ell;
    let c = models[0].c;
    let pre = |msg: String| Err(Error::Precondition(msg));
    if models.iter().any(|m| m.pattern_ell != t || m.c != c) {
        return pre("models differ in depth or fatness".into());
    }
    if c < 2 {
        return pre(format!("fatness {c} is below 2"));
    }
    for (h, m) in models.iter().enumerate() {
        if let Some(v) = verify_superfat(g, m) {
            return pre(format!("model {h} is not superfat: {v}"));
        }
    }
    let unions: Vec<VertexSet> = models.iter().map(|m| m.union()).collect();
    for i in 0..3 {
        for j in i + 1..3 {
            if let Some(d) = g.set_distance_raw(unions[i].as_slice(), unions[j].as_slice()) {
                if d <= 5 * c {
                    return pre(format!("models {i} and {j} are at distance {d}, need more than {}", 5 * c));
                }
            }
        }
    }
    g.check_set(w)?;
    if w.is_empty() || !g.is_connected_induced(w) {
        return pre("W is empty or disconnected".into());
    }
    for h in 0..3 {
        let d = g.set_distance_raw(unions[h].as_slice(), w.as_slice());
        if d != Some(c + 1) {
            return pre(format!("model {h} is at distance {d:?} from W, need {}", c + 1));
        }
        let leg = &legs[h];
        LambdaPath::new(g, leg.vertices().to_vec())?;
        if !w.contains(leg.start()) || !unions[h].contains(leg.end()) || leg.len() != c + 1 {
            return pre(format!("leg {h} is not a geodesic of length {} from W to model {h}", c + 1));
        }
    }

    let small = build_pattern_tree(t);
    let big = build_pattern_tree(t + 1);
    let mut eta: BTreeMap<UElem, VertexSet> = BTreeMap::new();
    eta.insert(UElem::Vertex(0), w.clone());
    for h in 0..3 {
        let m = &models[h];
        let ch = h + 1;
        let leg = legs[h].vertices();
        let y = leg[leg.len() - 1];
        let rest: VertexSet = leg[1..].iter().copied().collect();
        let root_image = &m.eta[&UElem::Vertex(0)];
        if t == 0 {
            eta.insert(UElem::Vertex(ch), root_image.clone());
            eta.insert(UElem::Edge(0, ch), rest.difference(&VertexSet::singleton(y)));
            continue;
        }
        let sides: Vec<VertexSet> = (1..=3).map(|i| m.branch_image(&small, i)).collect();
        let near: Vec<bool> = sides
            .iter()
            .map(|s| g.set_distance_raw(rest.as_slice(), s.as_slice()).is_some_and(|d| d <= c))
            .collect();
        let Some(third) = [3usize, 2, 1].into_iter().find(|&j| (1..=3).all(|i| i == j || !near[i - 1])) else {
            return pre(format!("leg {h} approaches two branches of model {h}"));
        };
        let kept: Vec<usize> = (1..=3).filter(|&i| i != third).collect();
        // Canonical isomorphism from the subtree of `ch` onto H_t minus B_third.
        let mut map = vec![usize::MAX; big.n()];
        map[ch] = 0;
        for (&child, &target) in big.children(ch).iter().zip(&kept) {
            for (a, b) in big.subtree(child).into_iter().zip(small.subtree(target)) {
                map[a] = b;
            }
        }
        for x in big.subtree(ch) {
            eta.insert(UElem::Vertex(x), m.eta[&UElem::Vertex(map[x])].clone());
            if x != ch {
                let p = big.parent(x).unwrap();
                eta.insert(UElem::edge(p, x), m.eta[&UElem::edge(map[p], map[x])].clone());
            }
        }
        let edge_image = if root_image.contains(y) {
            rest.difference(&VertexSet::singleton(y))
        } else if sides[third - 1].contains(y) {
            rest.union(&sides[third - 1])
        } else {
            return pre(format!("leg {h} ends in a branch that is not the approached one"));
        };
        eta.insert(UElem::Edge(0, ch), edge_image);
    }
    let out = SuperfatModel {
        pattern_ell: t + 1,
        c,
        eta,
    };
    let allowed = union_of(
        std::iter::once(w)
            .chain(unions.iter())
            .chain(legs.iter().map(|l| l.vertex_set()).collect::<Vec<_>>().iter()),
    );
    if !out.union().is_subset(&allowed) {
        return Err(invariant(0, "claw_combine", "output leaves W, the models and the legs"));
    }
    if let Some(v) = verify_superfat(g, &out) {
        return Err(invariant(0, "claw_combine", v.to_string()));
    }
    Ok(out)
}

/// Looks for a connected `W` inside `allowed` (or anywhere) at distance
/// exactly `c + 1` from three models and combines them.
pub fn claw_from_models(g: &Graph, tb: &TieBreaker, models: &[SuperfatModel; 3], allowed: Option<&VertexSet>) -> Option<SuperfatModel> {
    let c = models[0].c;
    let unions: Vec<VertexSet> = models.iter().map(|m| m.union()).collect();
    let dist: Vec<Vec<u32>> = unions.iter().map(|u| g.distances_from(u.as_slice())).collect();
    let target = (c + 1) as u32;
    let mask = allowed.map(|a| a.mask(g.n()));
    let region: VertexSet = (0..g.n())
        .filter(|&v| mask.as_ref().map_or(true, |m| m[v]))
        .filter(|&v| dist.iter().all(|d| d[v] != INF && d[v] >= target))
        .collect();
    for comp in g.induced_components(&region) {
        let ends: Option<Vec<usize>> = dist.iter().map(|d| comp.iter().find(|&v| d[v] == target)).collect();
        let Some(ends) = ends else { continue };
        let legs: Option<Vec<LambdaPath>> = ends
            .iter()
            .zip(&unions)
            .map(|(&v, u)| lambda_geodesic(g, tb, v, u).ok())
            .collect();
        let Some(legs) = legs else { continue };
        let legs: [LambdaPath; 3] = legs.try_into().ok()?;
        if let Ok(m) = claw_combine(g, models, &comp, &legs) {
            return Some(m);
        }
    }
    None
}
