//! Null-congruence toolkit: a jet-based curvature engine, CR/Webster
//! geometry over almost-CR structures, and explicit Einstein metric families
//! admitting a twisting, non-shearing null congruence — with every closed-form
//! identity in the construction verified numerically.

pub mod cr;
pub mod curvature;
pub mod error;
pub mod field;
pub mod jet;
pub mod einstein;
pub mod optical;
pub mod report;
pub mod tensor;

pub use cr::bases::{fs_lift, heisenberg, lift_from_kahler, KahlerPotential};
pub use cr::manifest::parse_manifest;
pub use cr::{
    cr_einstein_check, reeb, validate_adapted, webster_curvature, webster_solve, CRBase,
    CrEinsteinReport, CrTensor, WebsterPack, WebsterPoint,
};
pub use curvature::{curvature_pack, CurvaturePack, FnMetric, MetricField};
pub use einstein::{
    aj_coefficients, appendix_oracle, assemble_einstein, assemble_general, bce_coefficients,
    coframe_derivative_check, dual_robinson_check, einstein_residual, fefferman_criteria,
    kerr_schild_check, killing_check, lambda0, lambda0_ode_residuals, step_residuals, taubnut_map,
    weyl_einstein_components, AppendixRecord, BceCoefficients, CoframeDerivativeResiduals,
    DualRobinsonRecord, DualRobinsonStatus, EinsteinParams, FeffermanCriteria, GeneralLambda,
    KillingResiduals, Lambda0OdeResiduals, SpacetimeModel, StepResiduals, TaubNutPoint,
    WeylComponentRecord,
};
pub use error::{Error, Result};
pub use optical::{
    congruence_invariants, e_alpha_ode_solution, optical_data, twist_complex_structure_residual,
    weyl_degeneracy_report, weyl_twist_identity_residual, CongruenceInvariants, OpticalData,
    WeylDegeneracyReport,
};
pub use jet::{CJet, Elementary, Jet, Num, RJet};
pub use report::{
    emit, run_suite, sample_points, BaseSpec, CheckResult, ConfigEcho, Format, ResidualReport,
    RunConfig, Suite, UlambdaSpec,
};
pub use tensor::{JetMatrix, MultiIndex, PointTensor};
