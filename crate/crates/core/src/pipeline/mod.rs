//! The century construction: societies, realms, castles, governments and
//! the final certificate or witness.

pub mod castle;
pub mod century;
pub mod government;
pub mod passages;
pub mod realm;
pub mod schedule;
pub mod structure;

pub use castle::{apply_castle, build_castles, castle_certificate, castle_problem, find_castle, CastleMove, CastleSearch, CastleStage};
pub use realm::{
    compute_house_unions, initial_society, society_to_realm, verify_realm, verify_society, Building, BuildingClass, RealmKind,
    RealmState, RealmViolation,
};
pub use century::{advance_century, extract_certificate, run_pipeline, AuditEntry, Outcome, PipelineConfig, PipelineRun};
pub use government::{
    apply_revolution, cabal_candidates, cabal_problem, government_problem, networks, stabilize_government, Cabal, Government, Province,
    Revolution, Stabilized, Stronghold, Strongholds,
};
pub use passages::{find_passage, passage_problem, NearTable, Passage, PassageSearch};
pub use schedule::{make_schedule, CustomTable, Schedule, ScheduleMode};
pub use structure::{Contact, Unit};
