//! Experiment configuration, read from TOML.
//!
//! ```toml
//! [problem]
//! source = "generate-lasso"   # generate-logistic | generate-dual | load-matrix
//! seed = 1
//! m = 180                     # rows / samples
//! n = 200                     # columns / dual components
//! sparsity = 0.02
//! lambda = 0.1
//! lower = -1.0                # optional box
//! upper = 1.0
//! block_size = 1
//! linking_rows = 0
//! linking_width = 0
//! planted_density = 0.1
//! noise = 0.01
//! flip_probability = 0.05     # logistic
//! sigma = 1.0                 # dual
//! primal_block = 1            # dual
//! matrix = "A.mtx"            # load-matrix
//! rhs = "b.txt"               # load-matrix
//! loss = "lasso"              # load-matrix: lasso | logistic
//!
//! [solver]
//! modes = ["prcd", "pcdm1"]
//! taus = [1, 10, 50]
//! seeds = [0, 1, 2]
//! scheme = "tau-nice"         # or partition-shuffle
//! relative_gap = 1e-4         # stop once F - F* <= relative_gap * (F(x0) - F*)
//! max_iters = 1000000
//! workers = 1
//! log_stride = 1
//! reference_tol = 1e-10
//! reference_max_iters = 1000000
//! record_time = true
//!
//! [output]
//! dir = "prcd-out"
//! traces = true
//! ```
//!
//! Every key is optional; missing keys take the defaults shown above (the
//! box is absent by default).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::generate::{
    build_lasso, build_logistic, generate_dual, generate_lasso, generate_logistic, DualSpec,
    GeneratedProblem, LassoSpec, LogisticSpec,
};
use super::matrix_io::{read_matrix_market, read_vector};
use crate::error::{Error, Result};
use crate::sampling::SamplingScheme;
use crate::solver::Mode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemSource {
    #[default]
    GenerateLasso,
    GenerateLogistic,
    GenerateDual,
    LoadMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Loss {
    #[default]
    Lasso,
    Logistic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemConfig {
    pub source: ProblemSource,
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    pub sparsity: f64,
    pub lambda: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub block_size: usize,
    pub linking_rows: usize,
    pub linking_width: usize,
    pub planted_density: f64,
    pub noise: f64,
    pub flip_probability: f64,
    pub sigma: f64,
    pub primal_block: usize,
    pub matrix: Option<PathBuf>,
    pub rhs: Option<PathBuf>,
    pub loss: Loss,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        Self {
            source: ProblemSource::GenerateLasso,
            seed: 1,
            m: 180,
            n: 200,
            sparsity: 0.02,
            lambda: 0.1,
            lower: None,
            upper: None,
            block_size: 1,
            linking_rows: 0,
            linking_width: 0,
            planted_density: 0.1,
            noise: 0.01,
            flip_probability: 0.05,
            sigma: 1.0,
            primal_block: 1,
            matrix: None,
            rhs: None,
            loss: Loss::Lasso,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub modes: Vec<Mode>,
    pub taus: Vec<usize>,
    pub seeds: Vec<u64>,
    pub scheme: SamplingScheme,
    pub relative_gap: f64,
    pub max_iters: u64,
    pub workers: usize,
    pub log_stride: u64,
    pub reference_tol: f64,
    pub reference_max_iters: u64,
    pub record_time: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            modes: vec![Mode::Prcd, Mode::Pcdm1],
            taus: vec![1, 10, 50],
            seeds: vec![0, 1, 2],
            scheme: SamplingScheme::TauNice,
            relative_gap: 1e-4,
            max_iters: 1_000_000,
            workers: 1,
            log_stride: 1,
            reference_tol: 1e-10,
            reference_max_iters: 1_000_000,
            record_time: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub traces: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("prcd-out"),
            traces: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    pub solver: RunConfig,
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e
                .span()
                .map(|s| text[..s.start].matches('\n').count() + 1)
                .unwrap_or(0),
            message: e.message().to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text, path)
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.solver;
        if s.modes.is_empty() || s.taus.is_empty() || s.seeds.is_empty() {
            return Err(Error::input("modes, taus and seeds must be non-empty"));
        }
        if s.workers == 0 {
            return Err(Error::input("workers must be at least 1"));
        }
        if !(s.relative_gap >= 0.0) {
            return Err(Error::input("relative_gap must be >= 0"));
        }
        if s.log_stride == 0 {
            return Err(Error::input("log_stride must be at least 1"));
        }
        Ok(())
    }
}

impl ProblemConfig {
    fn bounds(&self) -> Result<Option<(f64, f64)>> {
        match (self.lower, self.upper) {
            (None, None) => Ok(None),
            (lo, hi) => {
                let lo = lo.unwrap_or(f64::NEG_INFINITY);
                let hi = hi.unwrap_or(f64::INFINITY);
                if lo > hi {
                    return Err(Error::input(format!("lower bound {lo} exceeds upper bound {hi}")));
                }
                Ok(Some((lo, hi)))
            }
        }
    }

    pub fn lasso_spec(&self) -> Result<LassoSpec> {
        Ok(LassoSpec {
            m: self.m,
            n: self.n,
            sparsity: self.sparsity,
            lambda: self.lambda,
            bounds: self.bounds()?,
            block_size: self.block_size,
            linking_rows: self.linking_rows,
            linking_width: self.linking_width,
            planted_density: self.planted_density,
            noise: self.noise,
        })
    }

    /// Generate or load the configured problem.
    pub fn build(&self) -> Result<GeneratedProblem> {
        match self.source {
            ProblemSource::GenerateLasso => generate_lasso(&self.lasso_spec()?, self.seed),
            ProblemSource::GenerateLogistic => generate_logistic(
                &LogisticSpec {
                    samples: self.m,
                    n: self.n,
                    sparsity: self.sparsity,
                    lambda: self.lambda,
                    block_size: self.block_size,
                    flip_probability: self.flip_probability,
                },
                self.seed,
            ),
            ProblemSource::GenerateDual => generate_dual(
                &DualSpec {
                    components: self.n,
                    primal_block: self.primal_block,
                    sigma: self.sigma,
                },
                self.seed,
            ),
            ProblemSource::LoadMatrix => {
                let mpath = self
                    .matrix
                    .as_ref()
                    .ok_or_else(|| Error::input("load-matrix needs a matrix path"))?;
                let rpath = self
                    .rhs
                    .as_ref()
                    .ok_or_else(|| Error::input("load-matrix needs a right-hand side path"))?;
                let matrix = read_matrix_market(mpath)?;
                let rhs = read_vector(rpath)?;
                let problem = match self.loss {
                    Loss::Lasso => build_lasso(&matrix, &rhs, self.lambda, self.bounds()?, self.block_size)?,
                    Loss::Logistic => build_logistic(&matrix, &rhs, self.lambda, self.block_size)?,
                };
                Ok(GeneratedProblem {
                    problem,
                    matrix,
                    rhs,
                    planted: None,
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_from_empty_document() {
        let c = ExperimentConfig::from_toml_str("", Path::new("c.toml")).unwrap();
        assert_eq!(c, ExperimentConfig::default());
    }

    #[test]
    fn parses_sections() {
        let text = r#"
[problem]
source = "generate-dual"
n = 12
sigma = 2.0

[solver]
modes = ["prcd", "full-prox-grad"]
taus = [3]
scheme = "partition-shuffle"
"#;
        let c = ExperimentConfig::from_toml_str(text, Path::new("c.toml")).unwrap();
        assert_eq!(c.problem.source, ProblemSource::GenerateDual);
        assert_eq!(c.solver.modes, vec![Mode::Prcd, Mode::FullProxGrad]);
        assert_eq!(c.solver.scheme, SamplingScheme::PartitionShuffle);
        let g = c.problem.build().unwrap();
        assert_eq!(g.omega(), 12);
    }

    #[test]
    fn unknown_key_reports_line() {
        let text = "[problem]\nm = 3\nbogus = 1\n";
        let err = ExperimentConfig::from_toml_str(text, Path::new("c.toml")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }
}
