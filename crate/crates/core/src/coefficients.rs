//! Choosing and certifying the coefficients `λ[i][j]`.
//!
//! Two properties depend on the coefficients. The code is MDS iff every
//! square block sub-matrix of the parity part is nonsingular, and a given
//! helper set can repair a failed node iff its repair matrix is invertible.
//! Both are polynomial non-vanishing conditions in the `λ`s, so a random
//! table over a large enough field satisfies all of them with high
//! probability; [`find_lambdas`] draws tables until one verifies.
//!
//! Each check is split into independent cases so callers can fan them out.

use alloc::vec::Vec;

use crate::construction::{min_alpha, CodeParams, MsrCode};
use crate::linalg::Matrix;
use crate::repair::{repair_matrix, RepairPlan};
use crate::rng::XorShift64Star;
use crate::subsets::{binomial, combinations};
use crate::{codec, Error, Result};

/// `α · max_{t ∈ [k]} C(n-k-1, t)·C(k-1, t)`: field size above which the
/// MDS coefficients are guaranteed to exist.
pub fn bound_qmds(n: usize, k: usize, d: usize) -> Result<u128> {
    let alpha = min_alpha(n, k, d)? as u128;
    let r = (n - k) as u64;
    let best = (1..=k as u64)
        .map(|t| binomial(r - 1, t).saturating_mul(binomial(k as u64 - 1, t)))
        .max()
        .unwrap_or(0);
    Ok(alpha.saturating_mul(best))
}

/// `(Σ_{h=ρ}^{r} h·C(r,h)·C(k-1, d-h)) · kα/ρ`: field size above which
/// coefficients supporting every helper set are guaranteed to exist.
pub fn bound_qany(n: usize, k: usize, d: usize) -> Result<u128> {
    let alpha = min_alpha(n, k, d)? as u128;
    let (r, rho) = (n - k, d - k + 1);
    let sum: u128 = (rho..=r)
        .filter(|&h| h <= d)
        .map(|h| {
            (h as u128)
                .saturating_mul(binomial(r as u64, h as u64))
                .saturating_mul(binomial(k as u64 - 1, (d - h) as u64))
        })
        .fold(0u128, u128::saturating_add);
    Ok(sum.saturating_mul(k as u128 * alpha / rho as u128))
}

/// A square block sub-matrix of the parity part: block rows are parity
/// nodes, block columns systematic nodes (both 1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubBlock {
    /// Parity nodes.
    pub parity_nodes: Vec<usize>,
    /// Systematic nodes.
    pub systematic_nodes: Vec<usize>,
}

/// Every `t × t` block sub-matrix, `1 <= t <= min(r, k)`.
pub fn mds_block_cases(params: &CodeParams) -> Vec<SubBlock> {
    let parity: Vec<usize> = (params.k() + 1..=params.n()).collect();
    let systematic: Vec<usize> = (1..=params.k()).collect();
    let mut out = Vec::new();
    for t in 1..=params.r().min(params.k()) {
        for rows in combinations(&parity, t) {
            for cols in combinations(&systematic, t) {
                out.push(SubBlock {
                    parity_nodes: rows.clone(),
                    systematic_nodes: cols,
                });
            }
        }
    }
    out
}

/// Whether one block sub-matrix is nonsingular.
pub fn check_mds_block(code: &MsrCode, case: &SubBlock) -> Result<bool> {
    if case.parity_nodes.len() == 1 {
        // A single block is a scaled permutation.
        let i = case.parity_nodes[0] - code.params().k() - 1;
        return Ok(!code
            .block(i, case.systematic_nodes[0] - 1)
            .lambda()
            .is_zero());
    }
    let m = codec::block_submatrix(code, &case.parity_nodes, &case.systematic_nodes)?;
    Ok(m.rank() == m.rows())
}

/// MDS via the block sub-matrix criterion.
pub fn check_mds(code: &MsrCode) -> Result<bool> {
    for case in mds_block_cases(code.params()) {
        if !check_mds_block(code, &case)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every `k`-subset of the `n` nodes.
pub fn mds_subset_cases(params: &CodeParams) -> Vec<Vec<usize>> {
    let nodes: Vec<usize> = (1..=params.n()).collect();
    combinations(&nodes, params.k())
}

/// Whether the generator rows of `nodes` form an invertible `kα × kα` matrix.
pub fn check_mds_subset_with(generator: &Matrix, alpha: usize, nodes: &[usize]) -> bool {
    let rows: Vec<usize> = nodes
        .iter()
        .flat_map(|&s| (s - 1) * alpha..s * alpha)
        .collect();
    let sub = generator.select_rows(&rows);
    sub.rank() == sub.cols()
}

/// MDS by definition: every `k` shards determine the file.
pub fn check_mds_definitional(code: &MsrCode) -> Result<bool> {
    let g = code.generator_matrix()?;
    let alpha = code.params().alpha();
    Ok(mds_subset_cases(code.params())
        .iter()
        .all(|nodes| check_mds_subset_with(&g, alpha, nodes)))
}

/// A failed systematic node and one of its `C(n-1, d)` helper sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairCase {
    /// The failed node.
    pub failed: usize,
    /// Its helpers, increasing.
    pub helpers: Vec<usize>,
}

/// Every `(failed systematic node, helper set)` pair.
pub fn any_helper_cases(params: &CodeParams) -> Vec<RepairCase> {
    let mut out = Vec::new();
    for failed in 1..=params.k() {
        let others: Vec<usize> = (1..=params.n()).filter(|&v| v != failed).collect();
        for helpers in combinations(&others, params.d()) {
            out.push(RepairCase { failed, helpers });
        }
    }
    out
}

/// Whether one repair case has a uniquely solvable system.
pub fn check_repair_case(code: &MsrCode, case: &RepairCase) -> Result<bool> {
    let plan = RepairPlan::new(code, case.failed, &case.helpers)?;
    let m = repair_matrix(code, &plan)?;
    Ok(m.rank() == m.rows())
}

/// Every failed systematic node is repairable from every helper set.
pub fn check_any_helper(code: &MsrCode) -> Result<bool> {
    for case in any_helper_cases(code.params()) {
        if !check_repair_case(code, &case)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A coefficient table together with the checks it passed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientCertificate {
    /// The `r × k` table.
    pub lambdas: Vec<Vec<u64>>,
    /// Block sub-matrix MDS check passed.
    pub mds_verified: bool,
    /// Every helper set verified.
    pub any_helper_verified: bool,
    /// Field modulus the checks ran over.
    pub q_used: u64,
    /// MDS field-size bound.
    pub bound_mds: u128,
    /// Any-helper field-size bound.
    pub bound_any: u128,
    /// Seed of the search.
    pub seed: u64,
    /// Tables drawn, including the accepted one.
    pub tries: u32,
}

impl CoefficientCertificate {
    /// Both checks passed.
    pub fn is_valid(&self) -> bool {
        self.mds_verified && self.any_helper_verified
    }

    /// Whether `q` is at or below the combined bound, where success is
    /// not guaranteed.
    pub fn below_recommended(&self) -> bool {
        (self.q_used as u128) <= self.bound_mds.saturating_add(self.bound_any)
    }
}

/// Draw an `r × k` table of uniform nonzero coefficients, row by row.
pub fn draw_lambdas(params: &CodeParams, rng: &mut XorShift64Star) -> Vec<Vec<u64>> {
    let q = params.q();
    (0..params.r())
        .map(|_| (0..params.k()).map(|_| 1 + rng.below(q - 1)).collect())
        .collect()
}

/// Draw coefficient tables from the seeded generator until one passes both
/// the MDS and the any-helper checks.
pub fn find_lambdas(
    params: &CodeParams,
    seed: u64,
    max_tries: u32,
) -> Result<CoefficientCertificate> {
    find_lambdas_with(params, seed, max_tries, |code| {
        Ok(check_mds(code)? && check_any_helper(code)?)
    })
}

/// [`find_lambdas`] with a caller-supplied acceptance test, e.g. one that
/// runs the case sweeps in parallel.
pub fn find_lambdas_with(
    params: &CodeParams,
    seed: u64,
    max_tries: u32,
    mut accept: impl FnMut(&MsrCode) -> Result<bool>,
) -> Result<CoefficientCertificate> {
    let (n, k, d) = (params.n(), params.k(), params.d());
    let bound_mds = bound_qmds(n, k, d)?;
    let bound_any = bound_qany(n, k, d)?;
    let mut rng = XorShift64Star::new(seed);
    for t in 0..max_tries {
        let lambdas = draw_lambdas(params, &mut rng);
        let code = MsrCode::new(*params, &lambdas)?;
        if accept(&code)? {
            return Ok(CoefficientCertificate {
                lambdas,
                mds_verified: true,
                any_helper_verified: true,
                q_used: params.q(),
                bound_mds,
                bound_any,
                seed,
                tries: t + 1,
            });
        }
    }
    Err(Error::SearchExhausted(max_tries))
}

/// Whether all entries of a coefficient table are nonzero and below `q`.
pub fn lambdas_in_range(params: &CodeParams, lambdas: &[Vec<u64>]) -> bool {
    lambdas.iter().flatten().all(|&l| l != 0 && l < params.q())
}
