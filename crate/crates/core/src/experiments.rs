//! Seeded random ensembles, verification campaigns, gap scans and CSV persistence.
//!
//! Every sample is drawn from its own generator, seeded by mixing the master seed with the
//! sample index, so results do not depend on evaluation order or thread count.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geodesic::gamma_commute;
use crate::inequalities::{check_distance_lower_bound, Inequality, DEFAULT_TOL_REL};
use crate::matcore::{c64, commutator_defect, condition_estimate, CMatrix, HermitianMatrix, SpdMatrix};

/// Generator identity recorded in CSV preambles.
pub const RNG_ID: &str = "ChaCha20Rng (rand_chacha 0.9); sample seed = splitmix64(master + splitmix64(index))";

/// Upper bound on `cond(X)` for random conjugators.
pub const MAX_CONJUGATOR_CONDITION: f64 = 1e3;

pub const MAX_CONJUGATOR_ATTEMPTS: usize = 100;

pub const DEFAULT_SPREAD: f64 = 1.0;

pub const DEFAULT_DIMS: [usize; 3] = [2, 3, 5];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ensemble {
    /// Independent `exp(H)` with Gaussian Hermitian `H`.
    Generic,
    /// `A, B` share a random eigenbasis; `C` is generic.
    CommutingPair,
    CommutingTriple,
    /// `X D_i X^H` for one random invertible `X` and diagonal `D_i`.
    GammaCommutingTriple,
    /// The commuting pair with `B` replaced by `exp(log B + eps K)`, `||K||_F = 1`.
    NearCommuting(f64),
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ensemble::Generic => f.write_str("generic"),
            Ensemble::CommutingPair => f.write_str("commuting_pair"),
            Ensemble::CommutingTriple => f.write_str("commuting_triple"),
            Ensemble::GammaCommutingTriple => f.write_str("gamma_commuting_triple"),
            Ensemble::NearCommuting(eps) => write!(f, "near_commuting({eps})"),
        }
    }
}

impl FromStr for Ensemble {
    type Err = Error;

    /// Accepts the display form; `near_commuting:EPS` is also accepted.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unknown ensemble '{s}'"));
        Ok(match s {
            "generic" => Ensemble::Generic,
            "commuting_pair" => Ensemble::CommutingPair,
            "commuting_triple" => Ensemble::CommutingTriple,
            "gamma_commuting_triple" => Ensemble::GammaCommutingTriple,
            _ => {
                let eps = s
                    .strip_prefix("near_commuting(")
                    .and_then(|r| r.strip_suffix(')'))
                    .or_else(|| s.strip_prefix("near_commuting:"))
                    .ok_or_else(bad)?;
                let eps: f64 = eps.parse().map_err(|_| bad())?;
                if !(eps >= 0.0 && eps.is_finite()) {
                    return Err(bad());
                }
                Ensemble::NearCommuting(eps)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleConfig {
    pub dim: usize,
    /// Standard deviation of the Hermitian log-entries.
    pub spread: f64,
    pub ensemble: Ensemble,
    pub seed: u64,
}

impl SampleConfig {
    pub fn new(dim: usize, spread: f64, ensemble: Ensemble, seed: u64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidArgument(format!("dimension must be >= 2, got {dim}")));
        }
        if !(spread > 0.0 && spread.is_finite()) {
            return Err(Error::InvalidArgument(format!("spread must be positive, got {spread}")));
        }
        Ok(Self {
            dim,
            spread,
            ensemble,
            seed,
        })
    }
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sample `index` under `master`.
pub fn sample_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add(splitmix64(index)))
}

struct Draw {
    rng: ChaCha20Rng,
    spread: f64,
}

impl Draw {
    fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    fn complex_gaussian(&mut self, n: usize, scale: f64) -> CMatrix {
        // row-major draw order, real before imaginary
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let re = self.normal() * scale;
                let im = self.normal() * scale;
                m[(i, j)] = c64::new(re, im);
            }
        }
        m
    }

    fn hermitian(&mut self, n: usize) -> HermitianMatrix {
        HermitianMatrix::symmetrized(self.complex_gaussian(n, self.spread))
    }

    fn log_spectrum(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.normal() * self.spread).collect()
    }

    /// Haar unitary from the QR factorization of a complex Gaussian matrix.
    fn unitary(&mut self, n: usize) -> CMatrix {
        let qr = self.complex_gaussian(n, 1.0).qr();
        let (q, r) = (qr.q(), qr.r());
        let mut u = q;
        for j in 0..n {
            let d = r[(j, j)];
            let phase = if d.norm() > 0.0 { d / d.norm() } else { c64::new(1.0, 0.0) };
            let scaled = u.column(j) * phase;
            u.set_column(j, &scaled);
        }
        u
    }

    fn conjugator(&mut self, n: usize) -> Result<CMatrix> {
        let scale = 1.0 / (n as f64).sqrt();
        for _ in 0..MAX_CONJUGATOR_ATTEMPTS {
            let x = self.complex_gaussian(n, scale);
            if condition_estimate(&x)? <= MAX_CONJUGATOR_CONDITION {
                return Ok(x);
            }
        }
        Err(Error::ConditioningFailed(MAX_CONJUGATOR_ATTEMPTS))
    }
}

/// Gaussian Hermitian matrix with entry scale `spread`, drawn from its own seeded stream.
pub fn random_hermitian(seed: u64, dim: usize, spread: f64) -> HermitianMatrix {
    Draw {
        rng: ChaCha20Rng::seed_from_u64(seed),
        spread,
    }
    .hermitian(dim)
}

/// Random complex `X` with `cond(X) <= 1e3`, resampled at most 100 times.
pub fn random_conjugator(seed: u64, dim: usize) -> Result<CMatrix> {
    Draw {
        rng: ChaCha20Rng::seed_from_u64(seed),
        spread: 1.0,
    }
    .conjugator(dim)
}

/// Haar-distributed unitary.
pub fn random_unitary(seed: u64, dim: usize) -> CMatrix {
    Draw {
        rng: ChaCha20Rng::seed_from_u64(seed),
        spread: 1.0,
    }
    .unitary(dim)
}

/// `F diag(exp(logs)) F^H`.
fn congruent_exp(frame: &CMatrix, logs: &[f64]) -> Result<SpdMatrix> {
    let d = CMatrix::from_diagonal(&DVector::from_iterator(
        logs.len(),
        logs.iter().map(|l| c64::new(l.exp(), 0.0)),
    ));
    SpdMatrix::new(HermitianMatrix::symmetrized(frame * d * frame.adjoint()))
}

/// Exactly unit-Frobenius Hermitian perturbation direction.
fn unit_direction(h: HermitianMatrix) -> HermitianMatrix {
    let n = h.norm_fro();
    h.scale(1.0 / n)
}

/// One draw of an ensemble: a triple of SPD matrices.
#[derive(Debug, Clone)]
pub struct Sample {
    pub a: SpdMatrix,
    pub b: SpdMatrix,
    pub c: SpdMatrix,
    pub seed: u64,
}

/// Draws sample `index`. Ensembles that share a prefix of draws (commuting pair and
/// near-commuting) agree on that prefix for equal seeds.
pub fn sample(config: &SampleConfig, index: u64) -> Result<Sample> {
    let seed = sample_seed(config.seed, index);
    let mut draw = Draw {
        rng: ChaCha20Rng::seed_from_u64(seed),
        spread: config.spread,
    };
    let n = config.dim;
    let (a, b, c) = match config.ensemble {
        Ensemble::Generic => {
            let a = SpdMatrix::exp_of(&draw.hermitian(n))?;
            let b = SpdMatrix::exp_of(&draw.hermitian(n))?;
            let c = SpdMatrix::exp_of(&draw.hermitian(n))?;
            (a, b, c)
        }
        Ensemble::CommutingPair | Ensemble::NearCommuting(_) => {
            let u = draw.unitary(n);
            let (la, lb) = (draw.log_spectrum(n), draw.log_spectrum(n));
            let a = congruent_exp(&u, &la)?;
            let mut b = congruent_exp(&u, &lb)?;
            let c = SpdMatrix::exp_of(&draw.hermitian(n))?;
            if let Ensemble::NearCommuting(eps) = config.ensemble {
                let k = unit_direction(draw.hermitian(n));
                b = perturb(&b, &k, eps)?;
            }
            (a, b, c)
        }
        Ensemble::CommutingTriple => {
            let u = draw.unitary(n);
            let (la, lb, lc) = (draw.log_spectrum(n), draw.log_spectrum(n), draw.log_spectrum(n));
            (congruent_exp(&u, &la)?, congruent_exp(&u, &lb)?, congruent_exp(&u, &lc)?)
        }
        Ensemble::GammaCommutingTriple => {
            let x = draw.conjugator(n)?;
            let (la, lb, lc) = (draw.log_spectrum(n), draw.log_spectrum(n), draw.log_spectrum(n));
            (congruent_exp(&x, &la)?, congruent_exp(&x, &lb)?, congruent_exp(&x, &lc)?)
        }
    };
    Ok(Sample { a, b, c, seed })
}

/// First matrix of sample `index`.
pub fn sample_spd(config: &SampleConfig, index: u64) -> Result<SpdMatrix> {
    Ok(sample(config, index)?.a)
}

/// `exp(log B + eps K)`; `eps = 0` returns `B` unchanged.
pub fn perturb(b: &SpdMatrix, k: &HermitianMatrix, eps: f64) -> Result<SpdMatrix> {
    if eps == 0.0 {
        return Ok(b.clone());
    }
    SpdMatrix::exp_of(&b.log()?.add(&k.scale(eps))?)
}

/// One row of campaign or scan output.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRecord {
    pub dim: usize,
    pub spread: f64,
    pub ensemble: Ensemble,
    pub seed: u64,
    pub index: u64,
    pub sample_seed: u64,
    pub inequality: Inequality,
    pub p: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub satisfied: bool,
    pub commutator_defect: f64,
    pub gamma_defect_product: f64,
    pub gamma_defect_bracket: f64,
}

pub const CSV_HEADER: [&str; 15] = [
    "dim",
    "spread",
    "ensemble",
    "seed",
    "index",
    "sample_seed",
    "inequality",
    "p",
    "lhs",
    "rhs",
    "gap",
    "satisfied",
    "commutator_defect",
    "gamma_defect_product",
    "gamma_defect_bracket",
];

/// 17 significant digits in scientific notation.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

impl ScanRecord {
    fn fields(&self) -> [String; 15] {
        [
            self.dim.to_string(),
            format_f64(self.spread),
            self.ensemble.to_string(),
            self.seed.to_string(),
            self.index.to_string(),
            self.sample_seed.to_string(),
            self.inequality.to_string(),
            format_f64(self.p),
            format_f64(self.lhs),
            format_f64(self.rhs),
            format_f64(self.gap),
            self.satisfied.to_string(),
            format_f64(self.commutator_defect),
            format_f64(self.gamma_defect_product),
            format_f64(self.gamma_defect_bracket),
        ]
    }

    fn from_fields(row: &csv::StringRecord) -> Result<Self> {
        if row.len() != CSV_HEADER.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} fields, found {}",
                CSV_HEADER.len(),
                row.len()
            )));
        }
        fn parse<T: FromStr>(s: &str, what: &str) -> Result<T> {
            s.parse()
                .map_err(|_| Error::InvalidArgument(format!("bad {what} '{s}'")))
        }
        Ok(Self {
            dim: parse(&row[0], "dim")?,
            spread: parse(&row[1], "spread")?,
            ensemble: row[2].parse()?,
            seed: parse(&row[3], "seed")?,
            index: parse(&row[4], "index")?,
            sample_seed: parse(&row[5], "sample_seed")?,
            inequality: row[6].parse()?,
            p: parse(&row[7], "p")?,
            lhs: parse(&row[8], "lhs")?,
            rhs: parse(&row[9], "rhs")?,
            gap: parse(&row[10], "gap")?,
            satisfied: parse(&row[11], "satisfied")?,
            commutator_defect: parse(&row[12], "commutator_defect")?,
            gamma_defect_product: parse(&row[13], "gamma_defect_product")?,
            gamma_defect_bracket: parse(&row[14], "gamma_defect_bracket")?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

/// A validated batch of (inequality, p) checks over `count` samples of one configuration.
#[derive(Debug, Clone)]
pub struct Campaign {
    pub config: SampleConfig,
    pub checks: Vec<(Inequality, f64)>,
    pub count: u64,
    pub tol_rel: f64,
    pub execution: Execution,
}

impl Campaign {
    /// Every combination of `inequalities` and `p_values` must pass its range gate.
    pub fn new(config: SampleConfig, inequalities: &[Inequality], p_values: &[f64], count: u64) -> Result<Self> {
        let mut checks = Vec::with_capacity(inequalities.len() * p_values.len());
        for &ineq in inequalities {
            for &p in p_values {
                ineq.validate(p)?;
                checks.push((ineq, p));
            }
        }
        Ok(Self::from_checks(config, checks, count))
    }

    /// Keeps only the pairings that pass their range gate.
    pub fn applicable(config: SampleConfig, inequalities: &[Inequality], p_values: &[f64], count: u64) -> Self {
        let checks = inequalities
            .iter()
            .flat_map(|&i| p_values.iter().map(move |&p| (i, p)))
            .filter(|&(i, p)| i.accepts(p))
            .collect();
        Self::from_checks(config, checks, count)
    }

    fn from_checks(config: SampleConfig, mut checks: Vec<(Inequality, f64)>, count: u64) -> Self {
        checks.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)));
        checks.dedup_by(|x, y| x.0 == y.0 && x.1.to_bits() == y.1.to_bits());
        Self {
            config,
            checks,
            count,
            tol_rel: DEFAULT_TOL_REL,
            execution: Execution::default(),
        }
    }

    pub fn with_tolerance(mut self, tol_rel: f64) -> Self {
        self.tol_rel = tol_rel;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    fn run_index(&self, index: u64) -> Result<Vec<ScanRecord>> {
        let s = sample(&self.config, index)?;
        let comm = commutator_defect(s.a.hermitian(), s.b.hermitian())?;
        let gamma = gamma_commute(&s.a, &s.b, &s.c, None)?;
        self.checks
            .iter()
            .map(|&(ineq, p)| {
                let r = ineq.evaluate(&s.a, &s.b, &s.c, p)?;
                let satisfied = match ineq {
                    Inequality::LogMajorization => r.satisfied,
                    _ => r.satisfied_at(self.tol_rel),
                };
                Ok(ScanRecord {
                    dim: self.config.dim,
                    spread: self.config.spread,
                    ensemble: self.config.ensemble,
                    seed: self.config.seed,
                    index,
                    sample_seed: s.seed,
                    inequality: ineq,
                    p,
                    lhs: r.lhs,
                    rhs: r.rhs,
                    gap: r.gap,
                    satisfied,
                    commutator_defect: comm,
                    gamma_defect_product: gamma.defect_product,
                    gamma_defect_bracket: gamma.defect_bracket,
                })
            })
            .collect()
    }

    /// Rows ordered by (index, inequality, p).
    pub fn run(&self) -> Result<Vec<ScanRecord>> {
        let per_index: Vec<Vec<ScanRecord>> = match self.execution {
            Execution::Serial => (0..self.count).map(|i| self.run_index(i)).collect::<Result<_>>()?,
            Execution::Parallel => (0..self.count)
                .into_par_iter()
                .map(|i| self.run_index(i))
                .collect::<Result<_>>()?,
        };
        Ok(per_index.into_iter().flatten().collect())
    }
}

pub fn run_campaign(
    config: SampleConfig,
    inequalities: &[Inequality],
    p_values: &[f64],
    count: u64,
) -> Result<Vec<ScanRecord>> {
    Campaign::new(config, inequalities, p_values, count)?.run()
}

/// Distance lower-bound gap along `B_eps = exp(log B + eps K)` for an ascending,
/// nonnegative `eps` grid. Γ-defects are those of `(A, B_eps, I)`.
pub fn gap_scan(
    config: &SampleConfig,
    a: &SpdMatrix,
    b: &SpdMatrix,
    k: &HermitianMatrix,
    eps_grid: &[f64],
    p: f64,
) -> Result<Vec<ScanRecord>> {
    Inequality::DistanceLowerBound.validate(p)?;
    if eps_grid.iter().any(|e| !(*e >= 0.0 && e.is_finite())) || eps_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("epsilon grid must be nonnegative and ascending".into()));
    }
    let id = SpdMatrix::identity(a.dim())?;
    eps_grid
        .iter()
        .enumerate()
        .map(|(i, &eps)| {
            let b_eps = perturb(b, k, eps)?;
            let r = check_distance_lower_bound(a, &b_eps, p)?;
            let gamma = gamma_commute(a, &b_eps, &id, None)?;
            Ok(ScanRecord {
                dim: config.dim,
                spread: config.spread,
                ensemble: Ensemble::NearCommuting(eps),
                seed: config.seed,
                index: i as u64,
                sample_seed: sample_seed(config.seed, 0),
                inequality: Inequality::DistanceLowerBound,
                p,
                lhs: r.lhs,
                rhs: r.rhs,
                gap: r.gap,
                satisfied: r.satisfied,
                commutator_defect: r.diagnostics["commutator_ab"],
                gamma_defect_product: gamma.defect_product,
                gamma_defect_bracket: gamma.defect_bracket,
            })
        })
        .collect()
}

/// Draws the commuting base pair and unit direction `K` of sample 0 under `config`
/// and scans along `eps_grid`.
pub fn gap_scan_sampled(config: &SampleConfig, eps_grid: &[f64], p: f64) -> Result<Vec<ScanRecord>> {
    let seed = sample_seed(config.seed, 0);
    let mut draw = Draw {
        rng: ChaCha20Rng::seed_from_u64(seed),
        spread: config.spread,
    };
    let n = config.dim;
    // same draw order as the near-commuting ensemble
    let u = draw.unitary(n);
    let (la, lb) = (draw.log_spectrum(n), draw.log_spectrum(n));
    let a = congruent_exp(&u, &la)?;
    let b = congruent_exp(&u, &lb)?;
    let _c = draw.hermitian(n);
    let k = unit_direction(draw.hermitian(n));
    gap_scan(config, &a, &b, &k, eps_grid, p)
}

/// Header row then one row per record.
pub fn write_csv_to<W: Write>(records: &[ScanRecord], preamble: &[String], mut out: W) -> Result<()> {
    let io = |source| Error::Io {
        path: "<stream>".into(),
        source,
    };
    for line in preamble {
        writeln!(out, "# {line}").map_err(io)?;
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush().map_err(io)?;
    Ok(())
}

pub fn write_csv(records: &[ScanRecord], destination: &Path) -> Result<()> {
    write_csv_with_preamble(records, &[], destination)
}

pub fn write_csv_with_preamble(records: &[ScanRecord], preamble: &[String], destination: &Path) -> Result<()> {
    let with_path = |source| Error::Io {
        path: destination.to_path_buf(),
        source,
    };
    let file = std::fs::File::create(destination).map_err(with_path)?;
    let mut buf = std::io::BufWriter::new(file);
    write_csv_to(records, preamble, &mut buf).map_err(|e| match e {
        Error::Io { source, .. } => with_path(source),
        other => other,
    })?;
    buf.flush().map_err(with_path)
}

/// Parses CSV produced by [`write_csv_to`]; `#` preamble lines are skipped.
pub fn read_csv_from<R: Read>(input: R) -> Result<Vec<ScanRecord>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::InvalidArgument("unexpected CSV header".into()));
    }
    r.records().map(|row| ScanRecord::from_fields(&row?)).collect()
}

pub fn read_csv(path: &Path) -> Result<Vec<ScanRecord>> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv_from(file)
}
