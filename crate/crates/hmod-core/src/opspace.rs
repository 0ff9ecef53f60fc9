//! Operator-space norms on matrices over a Hilbert module.
//!
//! A matrix of module elements is normed by localizing every entry and
//! taking the spectral norm of the resulting block matrix. The conjugate
//! norm transposes the grid and daggers each localized block, which realizes
//! the opposite (row-type) operator space structure without constructing
//! the conjugate module. The gap between the two is the basic obstruction
//! to self-duality of these structures and is computed here by a seeded
//! multi-start hill-climb over entry grids.
//!
//! The same search machinery yields amplified norms of arbitrary linear maps
//! between module coordinate spaces: the level-`n` norm is the supremum of
//! output-to-input norm ratios over `n×n` grids, which for non-module maps
//! (like a transpose map) grows with the level.

use crate::error::{Error, Result};
use crate::linalg::{c64, CMat};
use crate::module::HilbertModule;
use crate::par::{map_indexed, ExecMode};
use crate::tol::Tolerance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Budget for randomized norm searches. Deterministic for a fixed seed.
#[derive(Debug, Clone, Copy)]
pub struct SearchBudget {
    pub starts: usize,
    pub refine_steps: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { starts: 48, refine_steps: 120, seed: 0x6d6f64 }
    }
}

/// A rectangular grid of module elements, stored as coordinate columns.
#[derive(Debug, Clone)]
pub struct ElementGrid {
    pub rows: usize,
    pub cols: usize,
    /// Row-major `rows×cols` entries, each a `dim×1` coordinate column.
    pub entries: Vec<CMat>,
}

impl ElementGrid {
    pub fn new(rows: usize, cols: usize, entries: Vec<CMat>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::InvalidLevel(format!(
                "grid needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(ElementGrid { rows, cols, entries })
    }

    fn entry(&self, i: usize, j: usize) -> &CMat {
        &self.entries[i * self.cols + j]
    }
}

/// Column-type operator space norm: the spectral norm of the block matrix
/// of localized entries.
pub fn os_norm(module: &HilbertModule, grid: &ElementGrid) -> Result<f64> {
    let blocks: Vec<Vec<CMat>> = (0..grid.rows)
        .map(|i| (0..grid.cols).map(|j| module.localize_vector(grid.entry(i, j))).collect())
        .collect();
    CMat::from_blocks(&blocks).operator_norm()
}

/// Conjugate (row-type) operator space norm: the same grid with every
/// localized block daggered, i.e. the column norm of the entrywise-barred
/// matrix in the conjugate module.
pub fn conj_os_norm(module: &HilbertModule, grid: &ElementGrid) -> Result<f64> {
    let blocks: Vec<Vec<CMat>> = (0..grid.rows)
        .map(|i| (0..grid.cols).map(|j| module.localize_vector(grid.entry(i, j)).dagger()).collect())
        .collect();
    CMat::from_blocks(&blocks).operator_norm()
}

fn random_grid(rng: &mut ChaCha8Rng, dim: usize, rows: usize, cols: usize) -> ElementGrid {
    let entries = (0..rows * cols)
        .map(|_| {
            CMat::from_fn(dim, 1, |_, _| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        })
        .collect();
    ElementGrid { rows, cols, entries }
}

fn perturb_grid(rng: &mut ChaCha8Rng, grid: &ElementGrid, step: f64) -> ElementGrid {
    let entries = grid
        .entries
        .iter()
        .map(|e| {
            let noise = CMat::from_fn(e.rows, 1, |_, _| {
                c64(rng.gen_range(-step..step), rng.gen_range(-step..step))
            });
            e.add(&noise)
        })
        .collect();
    ElementGrid { rows: grid.rows, cols: grid.cols, entries }
}

/// Hill-climb `ratio` over grids starting from `start`, with multiplicative
/// step decay. Returns the best value found.
fn refine<F>(rng: &mut ChaCha8Rng, start: ElementGrid, steps: usize, ratio: &F) -> Result<f64>
where
    F: Fn(&ElementGrid) -> Result<Option<f64>>,
{
    let mut best_grid = start;
    let mut best = match ratio(&best_grid)? {
        Some(v) => v,
        None => return Ok(0.0),
    };
    let mut step = 0.5;
    let mut since_improvement = 0usize;
    for _ in 0..steps {
        let cand = perturb_grid(rng, &best_grid, step);
        if let Some(v) = ratio(&cand)? {
            if v > best {
                best = v;
                best_grid = cand;
                since_improvement = 0;
            } else {
                since_improvement += 1;
            }
        }
        if since_improvement >= 8 {
            step *= 0.6;
            since_improvement = 0;
            if step < 1e-7 {
                break;
            }
        }
    }
    Ok(best)
}

/// Best found ratio of column to conjugate norm over square grids of the
/// given level. A lower bound on the true supremum; for Hilbert-space
/// modules of localized dimension `d` the supremum at level `k` is
/// `sqrt(min(k, d))` and is attained by the structured start included here.
pub fn row_column_gap(
    module: &HilbertModule,
    level: usize,
    budget: &SearchBudget,
) -> Result<f64> {
    if level == 0 {
        return Err(Error::InvalidLevel("level must be positive".into()));
    }
    let dim = module.dim();
    let ratio = |g: &ElementGrid| -> Result<Option<f64>> {
        let denom = conj_os_norm(module, g)?;
        if denom < 1e-12 {
            return Ok(None);
        }
        Ok(Some(os_norm(module, g)? / denom))
    };
    // Structured start: first column runs through the coordinate basis.
    let mut structured = ElementGrid {
        rows: level,
        cols: level,
        entries: vec![CMat::zeros(dim, 1); level * level],
    };
    for i in 0..level.min(dim).max(1) {
        let mut e = CMat::zeros(dim, 1);
        e[(i.min(dim - 1), 0)] = c64(1.0, 0.0);
        structured.entries[i * level] = e;
    }
    let results = map_indexed(ExecMode::auto(), budget.starts + 1, |s| {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed.wrapping_add(s as u64 * 7919));
        let start = if s == 0 { structured.clone() } else { random_grid(&mut rng, dim, level, level) };
        refine(&mut rng, start, budget.refine_steps, &ratio)
    });
    let mut best = 0.0f64;
    for r in results {
        best = best.max(r?);
    }
    Ok(best)
}

/// Best found level-`n` amplified norm of a linear map on coordinates,
/// `sup ‖[m(x_ij)]‖ / ‖[x_ij]‖` over `n×n` grids. A lower bound on the true
/// completely bounded norm at that level.
pub fn linear_map_norm_at_level(
    source: &HilbertModule,
    target: &HilbertModule,
    m: &CMat,
    level: usize,
    budget: &SearchBudget,
) -> Result<f64> {
    if level == 0 {
        return Err(Error::InvalidLevel("level must be positive".into()));
    }
    if m.rows != target.dim() || m.cols != source.dim() {
        return Err(Error::InvalidModule(format!(
            "map shape {}x{} does not match modules ({}, {})",
            m.rows,
            m.cols,
            target.dim(),
            source.dim()
        )));
    }
    let dim = source.dim();
    let ratio = |g: &ElementGrid| -> Result<Option<f64>> {
        let denom = os_norm(source, g)?;
        if denom < 1e-12 {
            return Ok(None);
        }
        let image = ElementGrid {
            rows: g.rows,
            cols: g.cols,
            entries: g.entries.iter().map(|e| m.mul(e)).collect(),
        };
        Ok(Some(os_norm(target, &image)? / denom))
    };
    // Structured start: the transposed matrix-unit grid, entry (i,j) the
    // basis vector of index (j·level + i). This attains the supremum for
    // transpose-type maps.
    let mut structured = ElementGrid {
        rows: level,
        cols: level,
        entries: vec![CMat::zeros(dim, 1); level * level],
    };
    for i in 0..level {
        for j in 0..level {
            let mut e = CMat::zeros(dim, 1);
            e[((j * level + i) % dim, 0)] = c64(1.0, 0.0);
            structured.entries[i * level + j] = e;
        }
    }
    let results = map_indexed(ExecMode::auto(), budget.starts + 1, |s| {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed.wrapping_add(s as u64 * 104729));
        let start = if s == 0 { structured.clone() } else { random_grid(&mut rng, dim, level, level) };
        refine(&mut rng, start, budget.refine_steps, &ratio)
    });
    let mut best = 0.0f64;
    for r in results {
        best = best.max(r?);
    }
    Ok(best)
}

/// Level-`n` restriction of a module map's norm. For genuine module maps
/// this is level-independent and equals the localized spectral norm; exposed
/// for cross-checking that invariant.
pub fn module_map_norm_at_level(
    source: &HilbertModule,
    target: &HilbertModule,
    t: &CMat,
    level: usize,
    budget: &SearchBudget,
) -> Result<f64> {
    linear_map_norm_at_level(source, target, t, level, budget)
}
