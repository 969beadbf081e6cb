//! JSON encodings of trigonometric polynomials and matrix cocycles.
//!
//! ```json
//! {"dimension": 1, "degree": 1, "rho": 0.5,
//!  "coeffs": [{"k": [1], "re": [[0.5, 0], [0, 0]], "im": [[0, 0], [0, 0]]}]}
//! ```
//!
//! Scalars use the same layout with 1x1 blocks. `im` may be omitted.

use cocycle_core::cocycle::FourierSeries;
use cocycle_core::{AnalyticCocycle, Mat2C, TrigPoly, C64};
use serde::{Deserialize, Serialize};

use crate::error::LabError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub k: Vec<i32>,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesJson {
    pub dimension: usize,
    #[serde(default)]
    pub degree: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    pub coeffs: Vec<Term>,
}

fn block(t: &Term, rows: usize) -> Result<Vec<C64>, LabError> {
    let shape_ok = |b: &Vec<Vec<f64>>| b.len() == rows && b.iter().all(|r| r.len() == rows);
    if !shape_ok(&t.re) || !t.im.as_ref().map_or(true, shape_ok) {
        return Err(LabError::Config(format!("coefficient at k={:?} must be {rows}x{rows}", t.k)));
    }
    let mut out = Vec::with_capacity(rows * rows);
    for i in 0..rows {
        for j in 0..rows {
            let im = t.im.as_ref().map_or(0.0, |b| b[i][j]);
            out.push(C64::new(t.re[i][j], im));
        }
    }
    Ok(out)
}

impl SeriesJson {
    pub fn to_trig_poly(&self) -> Result<TrigPoly, LabError> {
        let terms = self
            .coeffs
            .iter()
            .map(|t| Ok((t.k.clone(), block(t, 1)?[0])))
            .collect::<Result<Vec<_>, LabError>>()?;
        Ok(FourierSeries::from_terms(self.dimension, self.degree, terms)?)
    }

    pub fn to_matrix_series(&self) -> Result<FourierSeries<Mat2C>, LabError> {
        let terms = self
            .coeffs
            .iter()
            .map(|t| {
                let b = block(t, 2)?;
                Ok((t.k.clone(), Mat2C::new(b[0], b[1], b[2], b[3])))
            })
            .collect::<Result<Vec<_>, LabError>>()?;
        Ok(FourierSeries::from_terms(self.dimension, self.degree, terms)?)
    }

    /// Cocycle with this series' `rho`, or `default_rho` when absent.
    pub fn to_cocycle(&self, default_rho: f64) -> Result<AnalyticCocycle, LabError> {
        Ok(AnalyticCocycle::new(self.to_matrix_series()?, self.rho.unwrap_or(default_rho))?)
    }

    pub fn from_matrix_series(s: &FourierSeries<Mat2C>, rho: Option<f64>) -> Self {
        let coeffs = s
            .terms()
            .map(|(k, m)| {
                let e = m.entries();
                Term {
                    k: k.to_vec(),
                    re: vec![vec![e[0].re, e[1].re], vec![e[2].re, e[3].re]],
                    im: Some(vec![vec![e[0].im, e[1].im], vec![e[2].im, e[3].im]]),
                }
            })
            .collect();
        SeriesJson { dimension: s.dimension(), degree: s.degree(), rho, coeffs }
    }
}
