//! Exact Cech-Dolbeault cohomology for finite bigraded models.
//!
//! Everything here computes over the Gaussian rationals Q(i) with exact
//! arithmetic; there are no floats and no tolerances anywhere. The crate
//! models spaces of (p,q)-forms as finite-dimensional bigraded complexes,
//! assembles Cech double complexes and their total complexes over open
//! covers, builds relative complexes and their long exact sequences, and
//! compares the form-level theory with its current-level dual by direct
//! rank computation.
//!
//! Layout:
//! - [`scalar`]: the coefficient field Q(i), with a canonical text form.
//! - [`matrix`]: sparse exact matrices, rank / kernel / image / solve.
//! - [`bicomplex`]: bigraded complexes, chain maps, cohomology, cones.
//! - [`cover`]: cover diagrams, Cech double and total complexes,
//!   relative complexes, the short exact sequence of a pair.
//! - [`sequence`]: connecting maps, long exact sequences, ladder
//!   comparisons.
//! - [`duality`]: dual (current) complexes, integration pairings,
//!   form-to-current comparison.
//! - [`morphism`]: cover morphisms, pullback / pushforward, degree,
//!   the projection identity, pullback injectivity, blow-up accounting.
//! - [`models`]: bundled torus models, disjoint covers, seeded random
//!   diagrams, synthetic blow-up instances.
//! - [`format`]: the plain-text bundle format.
//! - [`report`]: deterministic report rendering shared with the CLI.

pub mod bicomplex;
pub mod cover;
pub mod duality;
pub mod error;
pub mod format;
pub mod matrix;
pub mod models;
pub mod morphism;
pub mod report;
pub mod scalar;
pub mod sequence;

pub use bicomplex::{
    bd, cone, induced_map, Bidegree, BigradedComplex, ChainMap, CohomologyGroup, ValidationReport,
};
pub use cover::{
    build_double_complex, canonical_map, cech_cohomology, relative_complex, relative_vs_cone_iso,
    ses_of_pair, total_complex, total_complex_full, CechDoubleComplex, CechElement, CoverDiagram,
    RelativeComplex, Simplex, Slot, TotalComplex,
};
pub use duality::{
    compare_forms_currents, double_dual_iso, dual_diagram, dual_sign_witnesses, dualize,
    form_to_current, relative_current_complex, DualComplex, FormsCurrentsReport, PairingData,
};
pub use error::{Error, Result};
pub use format::{
    bundle_from_str, bundle_to_string, load_bundle, load_bundle_dir, save_bundle, save_bundle_dir,
};
pub use matrix::{quotient_dim, PivotOrder, SparseMatrix, Subspace};
pub use models::{
    blowup_preset, builtin_bundle, builtin_bundle_names, disjoint_cover_morphism, glue_global,
    nilpotent_model, random_morphism, random_self_cover, random_three_set_diagram,
    random_two_set_diagram, random_valid_diagram, synthetic_blowup_bundle, torus_cover,
    torus_model, BlowupParams, DgaModel, ModelBundle, SizeBounds,
};
pub use morphism::{
    blowup_decomposition, check_relative_injectivity, compute_degree, projection_identity_check,
    relative_pullback, relative_pushforward, total_pullback, BlowupEntry, BlowupOutcome,
    CoverMorphism, InjectivityCertificate, InjectivityEntry, MorphismPairings,
};
pub use report::{Report, ReportSection};
pub use scalar::Scalar;
pub use sequence::{
    assemble_les, compare_les, connecting_map, connecting_map_with, LadderNode, LadderReport,
    LesLadder, LesNode, LesReport, ShortExactSequence,
};
