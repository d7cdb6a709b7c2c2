//! Reconstruction of the QSP value from a projector sequence and its distance `ε_qsp` from the
//! target `A + iB`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decompose::QspSequence;
use crate::error::{Error, Result};
use crate::laurent::theta_grid;
use crate::mat2::Mat2;
use crate::targets::TargetPair;

pub const VERIFY_CSV_HEADER: &str = "theta,target_re,target_im,qsp_re,qsp_im,abs_err";

/// Measurement vector for the expectation value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// `|+⟩`, where `⟨+|F|+⟩ = A + iB`.
    #[default]
    Plus,
    /// `|0⟩`, where `⟨0|F|0⟩ = A + iD`.
    Zero,
}

impl FromStr for Basis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" => Ok(Basis::Plus),
            "zero" => Ok(Basis::Zero),
            other => Err(Error::Invalid(format!("unknown basis '{other}' (expected plus or zero)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub eps_qsp: f64,
    pub grid_points: usize,
    pub basis: Basis,
    pub worst_theta: f64,
    pub per_point_csv_path: Option<String>,
    pub elapsed_seconds: f64,
}

/// `F(e^{iθ/2})`.
pub fn reconstruct(seq: &QspSequence, theta: f64) -> Mat2 {
    seq.eval(Complex64::from_polar(1.0, 0.5 * theta))
}

pub fn expectation(m: &Mat2, basis: Basis) -> Complex64 {
    let a = &m.0;
    match basis {
        Basis::Zero => a[0][0],
        Basis::Plus => 0.5 * (a[0][0] + a[0][1] + a[1][0] + a[1][1]),
    }
}

pub fn qsp_value(seq: &QspSequence, theta: f64, basis: Basis) -> Complex64 {
    expectation(&reconstruct(seq, theta), basis)
}

/// Smallest grid accepted by [`epsilon_qsp`] for a sequence built from a degree-`n` target.
pub fn min_verify_grid(source_degree: usize) -> usize {
    4 * (2 * source_degree + 1)
}

/// `8 (2n + 1)`.
pub fn default_verify_grid(source_degree: usize) -> usize {
    8 * (2 * source_degree + 1)
}

pub fn epsilon_qsp(seq: &QspSequence, target: &TargetPair, grid_points: usize, basis: Basis) -> Result<VerificationReport> {
    epsilon_qsp_with_csv(seq, target, grid_points, basis, None)
}

/// `max_θ |qsp_value(θ) - (A + iB)(e^{iθ})|` on a uniform grid, optionally writing every point.
pub fn epsilon_qsp_with_csv(
    seq: &QspSequence,
    target: &TargetPair,
    grid_points: usize,
    basis: Basis,
    csv_path: Option<&Path>,
) -> Result<VerificationReport> {
    let degree = seq.source_degree.max(target.degree());
    let required = min_verify_grid(degree);
    if grid_points < required {
        return Err(Error::GridTooCoarse { points: grid_points, degree, required });
    }
    let start = Instant::now();
    let thetas: Vec<f64> = theta_grid(grid_points).collect();
    let rows: Vec<(Complex64, Complex64)> =
        thetas.par_iter().map(|&t| (target.value(t), qsp_value(seq, t, basis))).collect();
    let elapsed_seconds = start.elapsed().as_secs_f64();

    let (mut eps_qsp, mut worst_theta) = (0.0, 0.0);
    for (&t, (want, got)) in thetas.iter().zip(&rows) {
        let err = (got - want).norm();
        if err > eps_qsp || err.is_nan() {
            eps_qsp = err;
            worst_theta = t;
        }
    }
    if let Some(path) = csv_path {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "{VERIFY_CSV_HEADER}")?;
        for (&t, (want, got)) in thetas.iter().zip(&rows) {
            writeln!(w, "{t:e},{:e},{:e},{:e},{:e},{:e}", want.re, want.im, got.re, got.im, (got - want).norm())?;
        }
        w.flush()?;
    }
    Ok(VerificationReport {
        eps_qsp,
        grid_points,
        basis,
        worst_theta,
        per_point_csv_path: csv_path.map(|p| p.display().to_string()),
        elapsed_seconds,
    })
}
