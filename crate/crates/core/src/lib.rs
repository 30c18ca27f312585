//! Ordered Bratteli diagrams, their Vershik maps, Kakutani-Rokhlin
//! partitions, and the diagram rebuilt from a nested partition sequence.

pub mod clopen;
pub mod diagram;
pub mod dot;
pub mod error;
pub mod fibers;
pub mod gen;
pub mod io;
pub mod kr;
pub mod path;
pub mod rebuild;
pub mod transform;
pub mod vershik;

pub use clopen::ClopenSet;
pub use diagram::{EdgeSpec, Extreme, IncidenceMatrix, LevelSpec, OrderedDiagram, ValidationReport, VertexRef, Violation};
pub use dot::render_dot;
pub use error::{Error, Result};
pub use fibers::Fibers;
pub use io::{parse_diagram, parse_document, serialize_diagram, FORMAT_TAG};
pub use kr::{build_kr, build_kr_canonical, canonical_w, first_return_set, return_time, KRPartition, ReturnTimeTable, Tower};
pub use path::{lex_compare, paths_at_depth, EventuallyPeriodicPath, ExtensionChoice, FinitePath};
pub use rebuild::{phi, rebuild_diagram, rebuild_from_partitions, verify_conjugacy, BvModel, ConjugacyReport, EdgeLabel, RebuiltDiagram};
pub use transform::{equiv_search, iso_check, telescope, telescope_with_paths, Certificate, EquivOutcome, GradedIsomorphism, Telescoping};
pub use vershik::{
    check_pa_axioms, check_pa_axioms_with, domain_of_power, empirical_minimality, image_clopen, image_exact, pred_fiber,
    succ_fiber, vershik, vershik_inv, vershik_pow, FiberStep, PartialActionWitness, DEFAULT_CAP,
};
