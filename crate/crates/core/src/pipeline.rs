//! complete → assemble → decompose → verify in one call.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::completion::{complete_with_max_iter, CompletedQuadruple};
use crate::decompose::{assemble_matrix_poly, decompose, QspSequence};
use crate::error::Error;
use crate::fejer::{DEFAULT_EPS_FEJER, DEFAULT_MAX_ITER};
use crate::targets::TargetPair;
use crate::verify::{default_verify_grid, epsilon_qsp_with_csv, Basis, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineOptions {
    pub eps_fejer: f64,
    pub max_iter: usize,
    /// `None` uses `8 (2n + 1)`.
    pub grid_points: Option<usize>,
    pub basis: Basis,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self { eps_fejer: DEFAULT_EPS_FEJER, max_iter: DEFAULT_MAX_ITER, grid_points: None, basis: Basis::Plus }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Complete,
    Decompose,
    Verify,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Complete => "complete",
            Stage::Decompose => "decompose",
            Stage::Verify => "verify",
        })
    }
}

#[derive(Debug)]
pub struct StageFailure {
    pub stage: Stage,
    pub error: Error,
}

impl fmt::Display for StageFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} failed: {}", self.stage, self.error)
    }
}

impl std::error::Error for StageFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineOutput {
    pub quadruple: CompletedQuadruple,
    pub sequence: QspSequence,
    pub verification: VerificationReport,
}

impl PipelineOutput {
    /// `family,n,iterations,residual,eps_qsp,seconds` without the family column.
    pub fn summary_fields(&self) -> (usize, usize, f64, f64, f64) {
        let r = &self.quadruple.report;
        (self.quadruple.degree(), r.wilson.iterations, r.unitarity_residual, self.verification.eps_qsp, r.elapsed_seconds)
    }
}

pub fn run_pipeline(pair: &TargetPair, opts: &PipelineOptions) -> Result<PipelineOutput, StageFailure> {
    run_pipeline_with_csv(pair, opts, None)
}

pub fn run_pipeline_with_csv(
    pair: &TargetPair,
    opts: &PipelineOptions,
    csv_path: Option<&Path>,
) -> Result<PipelineOutput, StageFailure> {
    let fail = |stage| move |error| StageFailure { stage, error };
    let quadruple = complete_with_max_iter(pair, opts.eps_fejer, opts.max_iter).map_err(fail(Stage::Complete))?;
    let sequence = assemble_matrix_poly(&quadruple)
        .and_then(|f| decompose(&f))
        .map_err(fail(Stage::Decompose))?;
    let grid = opts.grid_points.unwrap_or_else(|| default_verify_grid(sequence.source_degree.max(pair.degree())));
    // the padded pair is the one the sequence encodes
    let target = TargetPair::new(quadruple.a.clone(), quadruple.b.clone(), pair.meta().clone())
        .map_err(fail(Stage::Verify))?;
    let verification =
        epsilon_qsp_with_csv(&sequence, &target, grid, opts.basis, csv_path).map_err(fail(Stage::Verify))?;
    Ok(PipelineOutput { quadruple, sequence, verification })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::targets::{build_hamiltonian_sim, build_random};

    #[test]
    fn random_200() {
        let out = run_pipeline(&build_random(200, 3).unwrap(), &PipelineOptions::default()).unwrap();
        assert!(out.quadruple.report.wilson.converged);
        assert!(out.verification.eps_qsp <= 1e-10, "{}", out.verification.eps_qsp);
        assert_eq!(out.verification.grid_points, 8 * 401);
    }

    #[test]
    fn hamiltonian_simulation_tau_20() {
        let pair = build_hamiltonian_sim(20.0, 1e-14).unwrap();
        let out = run_pipeline(&pair, &PipelineOptions::default()).unwrap();
        assert!(out.quadruple.report.wilson.converged);
        assert!(out.verification.eps_qsp <= 1e-10);
    }

    #[test]
    fn failure_names_stage() {
        let pair = build_random(20, 1).unwrap();
        let opts = PipelineOptions { grid_points: Some(3), ..Default::default() };
        let err = run_pipeline(&pair, &opts).unwrap_err();
        assert_eq!(err.stage, Stage::Verify);
        assert!(err.to_string().starts_with("verify failed"));
    }
}
