use serde::{Deserialize, Serialize};

use crate::decomp::{verify_certificate, QuasiBoundCertificate};
use crate::error::{invariant, Error, Result};
use crate::graph::Graph;
use crate::metric::TieBreaker;
use crate::minors::{verify_superfat, SuperfatModel};
use crate::pipeline::castle::build_castles;
use crate::pipeline::government::{stabilize_government, Government};
use crate::pipeline::realm::{
    compute_house_unions, initial_society, society_to_realm, verify_society, Building, BuildingClass, RealmKind, RealmState,
};
use crate::pipeline::schedule::Schedule;
use crate::pipeline::structure::Contact;

/// Either side of the dichotomy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Outcome {
    Certificate(QuasiBoundCertificate),
    Witness(SuperfatModel),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub century: usize,
    pub op: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineRun {
    pub outcome: Outcome,
    pub audit: Vec<AuditEntry>,
    /// Every search along the way finished within its budget.
    pub exhaustive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineConfig {
    /// Node budget handed to each passage and castle search.
    pub budget: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { budget: 200_000 }
    }
}

/// The society of the next century: rebels become houses and frameworks
/// become forts.
pub fn advance_century(g: &Graph, tb: &TieBreaker, sched: &Schedule, realm: &RealmState, gov: &Government) -> Result<RealmState> {
    let k = realm.century;
    let mut buildings: Vec<Building> = gov
        .rebels(realm)
        .into_iter()
        .map(|r| Building {
            class: BuildingClass::House,
            model: None,
            ..realm.buildings[r].clone()
        })
        .collect();
    for p in &gov.provinces {
        buildings.push(Building {
            vertices: p.framework.clone(),
            class: BuildingClass::Fort,
            certificate: Some(p.certificate.clone()),
            model: Some(p.model.top(k + 2)),
        });
    }
    buildings.sort_by_key(|b| b.vertices.as_slice()[0]);
    let mut next = RealmState {
        century: k + 1,
        kind: RealmKind::Society,
        buildings,
        house_unions: Vec::new(),
    };
    compute_house_unions(g, tb, sched, &mut next)?;
    if let Some(v) = verify_society(g, tb, sched, &next)? {
        return Err(invariant(k + 1, "advance_century", v.to_string()));
    }
    Ok(next)
}

/// The final certificate from a society of the last century, in which every
/// building is a house and the cells cover the graph.
pub fn extract_certificate(g: &Graph, sched: &Schedule, society: &RealmState) -> Result<QuasiBoundCertificate> {
    let k = society.century;
    if society.buildings.iter().any(|b| !b.is_house()) {
        return Err(invariant(k, "extract_certificate", "a fort survived the last century"));
    }
    let [union] = society.house_unions.as_slice() else {
        return Err(invariant(k, "extract_certificate", format!("{} house unions, need one", society.house_unions.len())));
    };
    let (a, b) = sched.final_bound();
    let cert = union.certificate.clone().relaxed(a, b);
    if cert.subject != g.vertices() || cert.a > a || cert.b > b {
        return Err(invariant(k, "extract_certificate", "certificate does not cover the graph within the final bound"));
    }
    if let Some(v) = verify_certificate(g, &cert)? {
        return Err(invariant(k, "extract_certificate", format!("{v:?}")));
    }
    Ok(cert)
}

/// Runs every century on a connected graph and returns a certificate of
/// bounded quasi-line-width or a superfat `H_ℓ` model.
pub fn run_pipeline(g: &Graph, tb: &TieBreaker, sched: &Schedule, config: &PipelineConfig) -> Result<PipelineRun> {
    if g.n() == 0 || !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut audit = Vec::new();
    let mut note = |century: usize, op: &str, detail: String| {
        audit.push(AuditEntry {
            century,
            op: op.to_string(),
            detail,
        })
    };
    note(
        0,
        "schedule",
        format!("c = {}, ℓ = {}, d0 = {}, final bound {:?}", sched.c, sched.ell, sched.d0, sched.final_bound()),
    );
    let mut exhaustive = true;
    let mut society = initial_society(g, tb, sched)?;
    note(0, "initial_society", format!("{} forts", society.buildings.len()));
    for k in 0..sched.ell {
        let (realm, growth) = society_to_realm(g, tb, sched, &society)?;
        note(k, "society_to_realm", format!("{} vertices added, {} growths blocked", growth.added, growth.uncertified));
        let stage = build_castles(g, tb, sched, realm, config.budget)?;
        exhaustive &= stage.exhaustive;
        for mv in &stage.moves {
            note(k, "castle", format!("forts {:?} around {:?}, {} vertices", mv.leaves, mv.core, mv.z.len()));
        }
        for why in &stage.rejected {
            note(k, "castle_rejected", why.clone());
        }
        if let Some(mv) = stage.witness {
            note(k, "witness", format!("claw on forts {:?} around {:?}", mv.leaves, mv.core));
            return finish(g, Outcome::Witness(mv.model), audit, exhaustive);
        }
        let realm = stage.realm;
        for issue in Contact::new(g, tb, &realm)?.shape_report() {
            note(k, "contact_shape", issue);
        }
        let stable = stabilize_government(g, tb, sched, &realm)?;
        note(
            k,
            "government",
            format!("{} provinces after {} revolutions", stable.government.provinces.len(), stable.revolutions),
        );
        for why in stable.rejected.iter().chain(&stable.notes) {
            note(k, "government_note", why.clone());
        }
        if let Some(model) = stable.witness {
            note(k, "witness", "revolution reached type ℓ".into());
            return finish(g, Outcome::Witness(model), audit, exhaustive);
        }
        society = advance_century(g, tb, sched, &realm, &stable.government)?;
        note(
            k + 1,
            "advance_century",
            format!(
                "{} houses, {} forts",
                society.count(BuildingClass::House),
                society.count(BuildingClass::Fort)
            ),
        );
    }
    let cert = extract_certificate(g, sched, &society)?;
    note(sched.ell, "certificate", format!("quasi-bound ({}, {})", cert.a, cert.b));
    finish(g, Outcome::Certificate(cert), audit, exhaustive)
}

fn finish(g: &Graph, outcome: Outcome, audit: Vec<AuditEntry>, exhaustive: bool) -> Result<PipelineRun> {
    if let Outcome::Witness(m) = &outcome {
        if let Some(v) = verify_superfat(g, m) {
            return Err(invariant(0, "witness", v.to_string()));
        }
    }
    Ok(PipelineRun {
        outcome,
        audit,
        exhaustive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{cycle, path, subdivided_star};
    use crate::pipeline::schedule::{make_schedule, ScheduleMode};

    fn run(g: &Graph, ell: usize, mode: ScheduleMode) -> PipelineRun {
        let s = make_schedule(2, ell, mode, None).unwrap();
        run_pipeline(g, &TieBreaker::lex(g), &s, &PipelineConfig::default()).unwrap()
    }

    #[test]
    fn path_and_cycle_certify() {
        for g in [path(400), cycle(300).unwrap(), Graph::empty(1)] {
            let r = run(&g, 1, ScheduleMode::Minimal);
            let Outcome::Certificate(c) = r.outcome else {
                panic!("expected a certificate");
            };
            assert_eq!(verify_certificate(&g, &c).unwrap(), None);
        }
    }

    #[test]
    fn star_gives_witness() {
        let g = subdivided_star(3, 99);
        let r = run(&g, 1, ScheduleMode::Minimal);
        assert!(matches!(r.outcome, Outcome::Witness(ref m) if m.pattern_ell == 1));
    }

    #[test]
    fn disconnected_rejected() {
        let s = make_schedule(2, 1, ScheduleMode::Minimal, None).unwrap();
        let g = Graph::empty(2);
        assert_eq!(run_pipeline(&g, &TieBreaker::lex(&g), &s, &PipelineConfig::default()), Err(Error::Disconnected));
    }
}
