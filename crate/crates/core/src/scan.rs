//! Classification of the (μ, γ) plane over random initial conditions.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{classify, detect_switching, summarize_all, ClassifierTolerances, StateTag};
use crate::integrator::{integrate, IntegrateError, IntegratorConfig};
use crate::model::{ModelError, ModelParams, PhaseState};

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("invalid scan grid `{field}`: {reason}")]
    InvalidGrid { field: &'static str, reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Integrator(#[from] IntegrateError),
    #[error("could not build worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanGrid {
    pub mu_min: f64,
    pub mu_max: f64,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub n_mu: usize,
    pub n_gamma: usize,
    pub alpha: f64,
    pub n_ics: usize,
    pub seed: u64,
}

impl Default for ScanGrid {
    fn default() -> Self {
        ScanGrid {
            mu_min: -5.0,
            mu_max: 5.0,
            gamma_min: -5.0,
            gamma_max: 5.0,
            n_mu: 201,
            n_gamma: 201,
            alpha: 0.0,
            n_ics: 10,
            seed: 0,
        }
    }
}

impl ScanGrid {
    pub fn validate(&self) -> Result<(), ScanError> {
        let bad = |field, reason: &str| {
            Err(ScanError::InvalidGrid {
                field,
                reason: reason.to_string(),
            })
        };
        let finite = [self.mu_min, self.mu_max, self.gamma_min, self.gamma_max, self.alpha];
        if finite.iter().any(|x| !x.is_finite()) {
            return bad("bounds", "must be finite");
        }
        if self.mu_min >= self.mu_max {
            return bad("mu_min", "must be < mu_max");
        }
        if self.gamma_min >= self.gamma_max {
            return bad("gamma_min", "must be < gamma_max");
        }
        if self.n_mu < 2 {
            return bad("n_mu", "must be >= 2");
        }
        if self.n_gamma < 2 {
            return bad("n_gamma", "must be >= 2");
        }
        if self.n_ics == 0 {
            return bad("n_ics", "must be >= 1");
        }
        Ok(())
    }

    /// Cell centres along μ, endpoints included.
    pub fn mu_at(&self, col: usize) -> f64 {
        lerp(self.mu_min, self.mu_max, col, self.n_mu)
    }

    /// Cell centres along γ, endpoints included.
    pub fn gamma_at(&self, row: usize) -> f64 {
        lerp(self.gamma_min, self.gamma_max, row, self.n_gamma)
    }

    pub fn n_cells(&self) -> usize {
        self.n_mu * self.n_gamma
    }
}

fn lerp(lo: f64, hi: f64, k: usize, n: usize) -> f64 {
    if k + 1 == n {
        hi
    } else {
        lo + (hi - lo) * k as f64 / (n - 1) as f64
    }
}

/// Label counts of one cell over its initial conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanCellResult {
    pub mu: f64,
    pub gamma: f64,
    /// Indexed by [`StateTag::index`]; sums to the number of initial
    /// conditions.
    pub counts: [usize; StateTag::ALL.len()],
    /// Runs that became non-finite; each is also counted as `Unclassified`.
    pub blowups: usize,
}

impl ScanCellResult {
    pub fn count(&self, tag: StateTag) -> usize {
        self.counts[tag.index()]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Tags observed at least once, in tag order.
    pub fn labels(&self) -> Vec<StateTag> {
        StateTag::ALL.into_iter().filter(|&t| self.count(t) > 0).collect()
    }

    /// Most frequent tag; ties go to the earliest tag.
    pub fn dominant(&self) -> StateTag {
        StateTag::ALL
            .into_iter()
            .fold((StateTag::Unclassified, 0), |(best, n), t| {
                if self.count(t) > n {
                    (t, self.count(t))
                } else {
                    (best, n)
                }
            })
            .0
    }

    /// More than one classified tag present. `Unclassified` runs do not
    /// make a cell a coexistence cell.
    pub fn is_coexistence(&self) -> bool {
        self.labels().iter().filter(|&&t| t != StateTag::Unclassified).count() > 1
    }

    pub fn has_chimera(&self) -> bool {
        self.labels().iter().any(|t| t.is_chimera())
    }
}

/// Cells in row-major order: row `r` holds `γ = gamma_at(r)`, column `c`
/// holds `μ = mu_at(c)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub grid: ScanGrid,
    pub cells: Vec<ScanCellResult>,
}

impl ScanResult {
    pub fn cell(&self, row: usize, col: usize) -> &ScanCellResult {
        &self.cells[row * self.grid.n_mu + col]
    }

    /// Share of cells without blow-ups that saw a chimera at least once.
    pub fn chimera_fraction(&self) -> f64 {
        let clean: Vec<_> = self.cells.iter().filter(|c| c.blowups == 0).collect();
        if clean.is_empty() {
            return 0.0;
        }
        clean.iter().filter(|c| c.has_chimera()).count() as f64 / clean.len() as f64
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Coupling values are keyed on a 1e-9 lattice so that the same physical
/// cell in two different grids gets the same stream.
fn quantize(x: f64) -> u64 {
    (x * 1e9).round() as i64 as u64
}

/// Seed of the stream for initial condition `ic` at coupling `(mu, gamma)`.
pub fn ic_seed(seed: u64, mu: f64, gamma: f64, ic: usize) -> u64 {
    let mut h = splitmix64(seed);
    for word in [quantize(mu), quantize(gamma), ic as u64] {
        h = splitmix64(h ^ word);
    }
    h
}

/// Phases uniform on `[0, 2π)`, velocities uniform on `[−1, 1]`.
pub fn random_state<R: Rng>(rng: &mut R) -> PhaseState<f64> {
    let theta = [0; 3].map(|_| rng.gen_range(0.0..std::f64::consts::TAU));
    let omega = [0; 3].map(|_| rng.gen_range(-1.0..=1.0));
    PhaseState::new(theta, omega)
}

pub fn random_state_from_seed(seed: u64) -> PhaseState<f64> {
    random_state(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// Outcome of one run: its tag, or `None` on blow-up.
pub fn run_and_classify(
    s0: &PhaseState<f64>,
    params: &ModelParams<f64>,
    cfg: &IntegratorConfig<f64>,
    tol: &ClassifierTolerances,
) -> Option<StateTag> {
    let traj = match integrate(s0, params, cfg) {
        Ok(t) => t,
        Err(IntegrateError::NonFinite { .. }) => return None,
        Err(e) => panic!("configuration validated before the run: {e}"),
    };
    let tag = summarize_all(&traj)
        .map(|s| classify(&s, tol).tag)
        .unwrap_or(StateTag::Unclassified);
    if tag != StateTag::Unclassified {
        return Some(tag);
    }
    Some(
        detect_switching(&traj, tol)
            .map(|r| r.tag)
            .unwrap_or(StateTag::Unclassified),
    )
}

fn scan_cell(
    grid: &ScanGrid,
    base: &ModelParams<f64>,
    cfg: &IntegratorConfig<f64>,
    tol: &ClassifierTolerances,
    row: usize,
    col: usize,
) -> ScanCellResult {
    let (mu, gamma) = (grid.mu_at(col), grid.gamma_at(row));
    let params = base.with_coupling(mu, gamma).with_alpha(grid.alpha);
    let mut counts = [0; StateTag::ALL.len()];
    let mut blowups = 0;
    for ic in 0..grid.n_ics {
        let s0 = random_state_from_seed(ic_seed(grid.seed, mu, gamma, ic));
        let tag = run_and_classify(&s0, &params, cfg, tol).unwrap_or_else(|| {
            blowups += 1;
            StateTag::Unclassified
        });
        counts[tag.index()] += 1;
    }
    ScanCellResult {
        mu,
        gamma,
        counts,
        blowups,
    }
}

/// Scans every cell of `grid`, using `jobs` worker threads (0 picks the
/// number of logical cores). The result does not depend on `jobs`.
pub fn scan_plane(
    grid: &ScanGrid,
    base: &ModelParams<f64>,
    cfg: &IntegratorConfig<f64>,
    tol: &ClassifierTolerances,
    jobs: usize,
) -> Result<ScanResult, ScanError> {
    grid.validate()?;
    base.with_coupling(0.0, 0.0).with_alpha(grid.alpha).validate()?;
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| ScanError::Pool(e.to_string()))?;
    let cells = pool.install(|| {
        (0..grid.n_cells())
            .into_par_iter()
            .map(|k| scan_cell(grid, base, cfg, tol, k / grid.n_mu, k % grid.n_mu))
            .collect()
    });
    Ok(ScanResult { grid: *grid, cells })
}

/// RGB colours for map rendering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorTable {
    /// Indexed by [`StateTag::index`].
    pub tags: [[u8; 3]; StateTag::ALL.len()],
    pub coexistence: [u8; 3],
}

impl Default for ColorTable {
    fn default() -> Self {
        ColorTable {
            tags: [
                [255, 255, 255], // SyncFixedPoint
                [200, 200, 255], // SyncRotation
                [240, 120, 200], // Splay
                [255, 170, 220], // RotatingWave
                [60, 90, 200],   // Antipodal21
                [180, 180, 180], // PhaseLocked21
                [0, 110, 80],    // ChimeraInPhase
                [120, 210, 160], // ChimeraAntiPhase
                [240, 210, 40],  // SwitchingRotChimera
                [0, 0, 0],       // Unclassified
            ],
            coexistence: [230, 60, 40],
        }
    }
}

pub const CSV_FIXED_COLUMNS: [&str; 2] = ["mu", "gamma"];
pub const CSV_BLOWUP_COLUMN: &str = "blowup_count";

/// One row per cell: `mu, gamma`, a count per tag, `blowup_count`.
pub fn write_scan_csv<W: Write>(result: &ScanResult, out: W) -> Result<(), ScanError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let mut header: Vec<&str> = CSV_FIXED_COLUMNS.to_vec();
    header.extend(StateTag::ALL.iter().map(|t| t.name()));
    header.push(CSV_BLOWUP_COLUMN);
    w.write_record(&header)?;
    for c in &result.cells {
        let mut row = vec![c.mu.to_string(), c.gamma.to_string()];
        row.extend(c.counts.iter().map(|n| n.to_string()));
        row.push(c.blowups.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Plain PPM (P3), one pixel per cell, γ increasing upwards.
pub fn write_scan_ppm<W: Write>(result: &ScanResult, colors: &ColorTable, mut out: W) -> Result<(), ScanError> {
    let g = &result.grid;
    writeln!(out, "P3")?;
    writeln!(out, "{} {}", g.n_mu, g.n_gamma)?;
    writeln!(out, "255")?;
    for row in (0..g.n_gamma).rev() {
        let line: Vec<String> = (0..g.n_mu)
            .map(|col| {
                let c = result.cell(row, col);
                let [r, gr, b] = if c.is_coexistence() {
                    colors.coexistence
                } else {
                    colors.tags[c.dominant().index()]
                };
                format!("{r} {gr} {b}")
            })
            .collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

/// The CSV table and PPM raster as strings.
pub fn render_map(result: &ScanResult, colors: &ColorTable) -> Result<(String, String), ScanError> {
    let mut csv_buf = Vec::new();
    write_scan_csv(result, &mut csv_buf)?;
    let mut ppm_buf = Vec::new();
    write_scan_ppm(result, colors, &mut ppm_buf)?;
    let text = |b: Vec<u8>| String::from_utf8(b).expect("ascii output");
    Ok((text(csv_buf), text(ppm_buf)))
}
