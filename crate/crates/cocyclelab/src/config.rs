//! Experiment configuration (JSON).

use cocycle_core::cocycle::{almost_mathieu_cocycle, jacobi_cocycle, FourierSeries};
use cocycle_core::jacobi::JacobiFamily;
use cocycle_core::torus::golden;
use cocycle_core::{AnalyticCocycle, Frequency, TrigPoly};
use serde::{Deserialize, Serialize};

use crate::error::LabError;
use crate::format::SeriesJson;

/// Default ceiling on summed factor evaluations per run.
pub const DEFAULT_MAX_WORK: u128 = 1 << 36;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Le,
    Ldt,
    ContinuityCocycle,
    ContinuityFrequency,
    Ids,
    Thouless,
    Schedule,
    ApCheck,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Le => "le",
            Kind::Ldt => "ldt",
            Kind::ContinuityCocycle => "continuity-cocycle",
            Kind::ContinuityFrequency => "continuity-frequency",
            Kind::Ids => "ids",
            Kind::Thouless => "thouless",
            Kind::Schedule => "schedule",
            Kind::ApCheck => "ap-check",
        }
    }
}

/// The system under study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SystemSpec {
    /// `v = 2 lambda cos(2 pi x)`, `a = 1`.
    Amo {
        lambda: f64,
        #[serde(default)]
        energy: f64,
    },
    /// Constant coupling `a`, zero potential.
    Free {
        #[serde(default)]
        energy: f64,
        #[serde(default = "one")]
        a: f64,
        #[serde(default = "one_usize")]
        dimension: usize,
    },
    Jacobi {
        a: SeriesJson,
        v: SeriesJson,
        #[serde(default)]
        energy: f64,
    },
    /// A matrix cocycle given coefficient by coefficient.
    Inline { cocycle: SeriesJson },
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

fn default_rho() -> f64 {
    0.5
}

impl SystemSpec {
    pub fn dimension(&self) -> usize {
        match self {
            SystemSpec::Amo { .. } => 1,
            SystemSpec::Free { dimension, .. } => *dimension,
            SystemSpec::Jacobi { a, .. } => a.dimension,
            SystemSpec::Inline { cocycle } => cocycle.dimension,
        }
    }

    /// The configured energy, if the system has one.
    pub fn energy(&self) -> Option<f64> {
        match self {
            SystemSpec::Amo { energy, .. } | SystemSpec::Free { energy, .. } | SystemSpec::Jacobi { energy, .. } => {
                Some(*energy)
            }
            SystemSpec::Inline { .. } => None,
        }
    }

    fn trig_pair(&self) -> Result<Option<(TrigPoly, TrigPoly)>, LabError> {
        Ok(match self {
            SystemSpec::Amo { lambda, .. } => {
                Some((TrigPoly::constant_real(1, 1.0), TrigPoly::cosine(2.0 * lambda, vec![1])?))
            }
            SystemSpec::Free { a, dimension, .. } => {
                Some((TrigPoly::constant_real(*dimension, *a), TrigPoly::constant_real(*dimension, 0.0)))
            }
            SystemSpec::Jacobi { a, v, .. } => Some((a.to_trig_poly()?, v.to_trig_poly()?)),
            SystemSpec::Inline { .. } => None,
        })
    }

    /// Transfer cocycle at `energy` (or the configured energy).
    pub fn cocycle_at(&self, omega: &Frequency, rho: f64, energy: Option<f64>) -> Result<AnalyticCocycle, LabError> {
        if let SystemSpec::Inline { cocycle } = self {
            return cocycle.to_cocycle(rho);
        }
        let e = energy.or(self.energy()).unwrap_or(0.0);
        if let SystemSpec::Amo { lambda, .. } = self {
            if omega.dimension() == 1 {
                return Ok(almost_mathieu_cocycle(*lambda, e, omega.omega()[0], rho)?);
            }
        }
        let (a, v) = self.trig_pair()?.expect("named family");
        Ok(jacobi_cocycle(&a, &v, e, omega.omega(), rho)?)
    }

    pub fn jacobi_family(&self, omega: &Frequency, rho: f64) -> Result<JacobiFamily, LabError> {
        let (a, v) = self
            .trig_pair()?
            .ok_or_else(|| LabError::Config("spectral experiments need an amo, free or jacobi system".into()))?;
        Ok(JacobiFamily::new(a, v, omega.clone())?.with_rho(rho)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencySpec {
    /// Omitted means the golden mean `(sqrt 5 - 1)/2` on `T^1`.
    #[serde(default)]
    pub omega: Option<Vec<f64>>,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "one")]
    pub sigma: f64,
    /// Lattice radius for Diophantine scans.
    #[serde(default = "default_k_max")]
    pub k_max: u32,
}

fn default_tau() -> f64 {
    0.3
}

fn default_k_max() -> u32 {
    50
}

impl Default for FrequencySpec {
    fn default() -> Self {
        FrequencySpec { omega: None, tau: default_tau(), sigma: 1.0, k_max: default_k_max() }
    }
}

impl FrequencySpec {
    pub fn build(&self) -> Result<Frequency, LabError> {
        let w = self.omega.clone().unwrap_or_else(|| vec![golden()]);
        Ok(Frequency::new(w, self.tau, self.sigma)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleSpec {
    #[serde(default)]
    pub n: Vec<usize>,
    /// Points per dimension; defaults to 1024 on `T^1` and 64 otherwise.
    #[serde(default)]
    pub grid_m: Option<usize>,
    #[serde(default)]
    pub n0: Option<usize>,
    #[serde(default)]
    pub depth: Option<u32>,
}

impl Default for ScaleSpec {
    fn default() -> Self {
        ScaleSpec { n: Vec::new(), grid_m: None, n0: None, depth: None }
    }
}

impl ScaleSpec {
    pub fn grid_m(&self, dimension: usize) -> usize {
        self.grid_m.unwrap_or(if dimension == 1 { 1024 } else { 64 })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    #[serde(default = "one_usize")]
    pub degree: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub epsilons: Vec<f64>,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_n_unit")]
    pub n_unit: f64,
    #[serde(default = "default_n_min")]
    pub n_min: usize,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
}

fn default_beta() -> f64 {
    0.5
}

fn default_n_unit() -> f64 {
    16.0
}

fn default_n_min() -> usize {
    16
}

fn default_n_max() -> usize {
    4096
}

impl Default for PerturbationSpec {
    fn default() -> Self {
        PerturbationSpec {
            degree: 1,
            seed: None,
            epsilons: Vec::new(),
            beta: default_beta(),
            n_unit: default_n_unit(),
            n_min: default_n_min(),
            n_max: default_n_max(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencySweepSpec {
    /// `omega' = omega + h u` for each `h`.
    #[serde(default)]
    pub h_values: Vec<f64>,
    /// Unit direction `u`; defaults to the first coordinate axis.
    #[serde(default)]
    pub direction: Option<Vec<f64>>,
    /// Extra explicit targets `omega'`, e.g. a rational frequency.
    #[serde(default)]
    pub targets: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LdtSpec {
    pub epsilon: f64,
    /// Lattice radius for pairing each `N` with a window `K0`.
    #[serde(default = "default_k_max")]
    pub k_max: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdsSpec {
    #[serde(default)]
    pub windows: Vec<[f64; 2]>,
    pub n: usize,
    #[serde(default)]
    pub average: bool,
    #[serde(default)]
    pub scan: Option<IdsScanSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdsScanSpec {
    pub center: f64,
    pub h_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThoulessSpec {
    pub energies: Vec<f64>,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeSpec {
    Strict,
    Toy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub kappa0: f64,
    pub c: f64,
    #[serde(default = "one")]
    pub sigma: f64,
    #[serde(default = "one")]
    pub tau: f64,
    #[serde(default = "one")]
    pub rho: f64,
    #[serde(default = "default_stages")]
    pub max_stages: usize,
    #[serde(default = "default_mode")]
    pub mode: ModeSpec,
}

fn default_stages() -> usize {
    3
}

fn default_mode() -> ModeSpec {
    ModeSpec::Toy
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApSpec {
    pub n: usize,
    pub n1: Vec<usize>,
    /// Base points; when empty the grid nodes `i / grid_points` are used.
    #[serde(default)]
    pub points: Vec<f64>,
    #[serde(default = "default_ap_grid")]
    pub grid_points: usize,
}

fn default_ap_grid() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Must match the subcommand when present.
    #[serde(default)]
    pub kind: Option<Kind>,
    #[serde(default)]
    pub system: Option<SystemSpec>,
    #[serde(default)]
    pub frequency: FrequencySpec,
    /// Strip half-width for named families and for inline cocycles without one.
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default)]
    pub scales: ScaleSpec,
    #[serde(default)]
    pub perturbation: Option<PerturbationSpec>,
    #[serde(default)]
    pub frequency_sweep: Option<FrequencySweepSpec>,
    #[serde(default)]
    pub ldt: Option<LdtSpec>,
    #[serde(default)]
    pub ids: Option<IdsSpec>,
    #[serde(default)]
    pub thouless: Option<ThoulessSpec>,
    #[serde(default)]
    pub schedule: Option<ScheduleSpec>,
    #[serde(default)]
    pub ap: Option<ApSpec>,
    #[serde(default)]
    pub max_work: Option<u128>,
    /// Informational; `--out` decides where results go.
    #[serde(default)]
    pub output: Option<String>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, LabError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn system(&self) -> Result<&SystemSpec, LabError> {
        self.system.as_ref().ok_or_else(|| LabError::Config("missing \"system\"".into()))
    }

    pub fn max_work(&self) -> u128 {
        self.max_work.unwrap_or(DEFAULT_MAX_WORK)
    }

    pub fn section<'a, T>(&self, s: &'a Option<T>, name: &str) -> Result<&'a T, LabError> {
        s.as_ref().ok_or_else(|| LabError::Config(format!("missing \"{name}\" section")))
    }
}

/// Seeded random trigonometric matrix polynomial of the given degree on `T^d`,
/// entries uniform in the unit square. Normalization happens downstream.
pub fn random_direction(dimension: usize, degree: usize, seed: u64) -> Result<FourierSeries<cocycle_core::Mat2C>, LabError> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let side = 2 * degree as i64 + 1;
    let total = side.pow(dimension as u32);
    let mut terms = Vec::with_capacity(total as usize);
    for idx in 0..total {
        let mut k = vec![0i32; dimension];
        let mut r = idx;
        for slot in k.iter_mut().rev() {
            *slot = (r % side - degree as i64) as i32;
            r /= side;
        }
        let mut e = [cocycle_core::C64::new(0.0, 0.0); 4];
        for c in e.iter_mut() {
            *c = cocycle_core::C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
        terms.push((k, cocycle_core::Mat2C::new(e[0], e[1], e[2], e[3])));
    }
    Ok(FourierSeries::from_terms(dimension, degree, terms)?)
}
