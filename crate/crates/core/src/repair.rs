//! Bandwidth-optimal repair of a failed systematic node.
//!
//! Every helper sends the same `β = α/ρ` positions: the slice `Y` where the
//! label coordinate owned by `(scenario, failed node)` is zero. Parity blocks
//! of the other systematic nodes never move that coordinate, so their
//! contribution to the parity transmissions stays inside `Y` (alignment),
//! while the `ρ` parity blocks of the failed node carry `Y` onto the `ρ`
//! distinct cosets of that coordinate (signal recovery).
//!
//! The decoder solves the square system whose unknowns are the `α` lost
//! symbols plus, for every systematic node outside the helper set, its `β`
//! symbols on `Y`. Contributions of systematic helpers are subtracted using
//! what they sent. With `h` parity helpers the system is `hβ × hβ`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::codec::NodeShard;
use crate::construction::{CodeParams, MsrCode, ScenarioTable};
use crate::field::Fe;
use crate::labels::CoordinateSlice;
use crate::linalg::Matrix;
use crate::{Error, Result};

/// A failed systematic node and the `d` helpers chosen to rebuild it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HelperSet {
    failed: usize,
    helpers: Vec<usize>,
    systematic: Vec<usize>,
    parity_rows: Vec<usize>,
    absent: Vec<usize>,
}

impl HelperSet {
    /// Validate a helper set. Node numbers are 1-based.
    pub fn new(params: &CodeParams, failed: usize, helpers: &[usize]) -> Result<Self> {
        if !params.is_systematic(failed) {
            return Err(Error::OutOfRange("systematic-repair only"));
        }
        let mut sorted = helpers.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != helpers.len() {
            return Err(Error::OutOfRange("duplicate helper"));
        }
        if sorted.len() != params.d() {
            return Err(Error::DimensionMismatch("helper count must equal d"));
        }
        if sorted
            .iter()
            .any(|&h| h == failed || h == 0 || h > params.n())
        {
            return Err(Error::OutOfRange("helper node"));
        }
        let systematic: Vec<usize> = sorted
            .iter()
            .copied()
            .filter(|&h| params.is_systematic(h))
            .collect();
        let parity_rows: Vec<usize> = sorted
            .iter()
            .filter(|&&h| params.is_parity(h))
            .map(|&h| h - params.k() - 1)
            .collect();
        let absent = (1..=params.k())
            .filter(|&j| j != failed && !systematic.contains(&j))
            .collect();
        Ok(HelperSet {
            failed,
            helpers: sorted,
            systematic,
            parity_rows,
            absent,
        })
    }

    /// The failed node.
    pub fn failed(&self) -> usize {
        self.failed
    }
    /// All helpers, increasing.
    pub fn helpers(&self) -> &[usize] {
        &self.helpers
    }
    /// Systematic helpers, increasing.
    pub fn systematic(&self) -> &[usize] {
        &self.systematic
    }
    /// Parity helpers as zero-based parity rows, increasing.
    pub fn parity_rows(&self) -> &[usize] {
        &self.parity_rows
    }
    /// Number of parity helpers `h`.
    pub fn h(&self) -> usize {
        self.parity_rows.len()
    }
    /// Systematic nodes other than the failed one that are not helping.
    pub fn absent(&self) -> &[usize] {
        &self.absent
    }
}

/// The scenario whose parity set is the lexicographically smallest
/// `ρ`-subset of the parity helpers.
pub fn choose_scenario(params: &CodeParams, table: &ScenarioTable, hs: &HelperSet) -> usize {
    let rows = &hs.parity_rows()[..params.rho()];
    table
        .find(rows)
        .expect("every rho-subset of parity rows is a scenario")
}

/// Everything needed to run one repair: who helps and which positions they send.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairPlan {
    helper_set: HelperSet,
    scenario: usize,
    rows: CoordinateSlice,
    beta: usize,
    alpha: usize,
    k: usize,
}

impl RepairPlan {
    /// Plan the repair of `failed` from `helpers`.
    pub fn new(code: &MsrCode, failed: usize, helpers: &[usize]) -> Result<Self> {
        let params = code.params();
        let helper_set = HelperSet::new(params, failed, helpers)?;
        let scenario = choose_scenario(params, code.table(), &helper_set);
        let rows = params
            .space()
            .slice(params.coordinate(scenario, failed - 1), 0)?;
        Ok(RepairPlan {
            helper_set,
            scenario,
            rows,
            beta: params.beta(),
            alpha: params.alpha(),
            k: params.k(),
        })
    }

    /// The validated helper set.
    pub fn helper_set(&self) -> &HelperSet {
        &self.helper_set
    }
    /// The chosen scenario (zero-based).
    pub fn scenario(&self) -> usize {
        self.scenario
    }
    /// The positions every helper sends.
    pub fn rows(&self) -> &CoordinateSlice {
        &self.rows
    }
    /// Positions requested from `node`, or `None` if it is not a helper.
    pub fn rows_for(&self, node: usize) -> Option<&[usize]> {
        self.helper_set
            .helpers
            .contains(&node)
            .then(|| self.rows.members())
    }
    /// Total symbols downloaded: `d · β`.
    pub fn download_symbols(&self) -> usize {
        self.helper_set.helpers.len() * self.beta
    }
    /// What a conventional MDS decode would download: `k · α`.
    pub fn naive_symbols(&self) -> usize {
        self.k * self.alpha
    }
    /// Size of the square repair system, `h · β`.
    pub fn system_dimension(&self) -> usize {
        self.helper_set.h() * self.beta
    }
}

/// The symbols received from each helper, in increasing position order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transmissions {
    params_checksum: u32,
    by_node: BTreeMap<usize, Vec<Fe>>,
}

impl Transmissions {
    /// An empty set tagged with the helpers' parameter checksum.
    pub fn new(params_checksum: u32) -> Self {
        Transmissions {
            params_checksum,
            by_node: BTreeMap::new(),
        }
    }

    /// Record what `node` sent.
    pub fn insert(&mut self, node: usize, symbols: Vec<Fe>) {
        self.by_node.insert(node, symbols);
    }

    /// What `node` sent.
    pub fn get(&self, node: usize) -> Option<&[Fe]> {
        self.by_node.get(&node).map(Vec::as_slice)
    }

    /// Checksum of the parameters the helpers were encoded with.
    pub fn params_checksum(&self) -> u32 {
        self.params_checksum
    }

    /// Total symbols held.
    pub fn symbol_count(&self) -> usize {
        self.by_node.values().map(Vec::len).sum()
    }

    /// Extract the planned positions from full helper shards.
    pub fn from_shards(plan: &RepairPlan, shards: &[NodeShard]) -> Result<Self> {
        let checksum = shards.first().map_or(0, |s| s.params_checksum());
        let mut tx = Transmissions::new(checksum);
        for &node in plan.helper_set().helpers() {
            let shard = shards
                .iter()
                .find(|s| s.node_index() == node)
                .ok_or(Error::OutOfRange("missing helper shard"))?;
            if shard.params_checksum() != checksum {
                return Err(Error::ChecksumMismatch {
                    expected: checksum,
                    actual: shard.params_checksum(),
                });
            }
            if shard.symbols().len() != plan.alpha {
                return Err(Error::BadLength {
                    expected: plan.alpha,
                    actual: shard.symbols().len(),
                });
            }
            let sent = plan
                .rows
                .members()
                .iter()
                .map(|&v| shard.symbols()[v])
                .collect();
            tx.insert(node, sent);
        }
        Ok(tx)
    }
}

/// Outcome of a repair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairResult {
    /// The rebuilt shard.
    pub recovered: NodeShard,
    /// Symbols downloaded from helpers, always `d · β`.
    pub downloaded_symbols: usize,
    /// Dimension of the square system solved, `h · β`.
    pub system_dimension: usize,
}

/// Positions reached by `Y` through the row space of `S · A[i][j]`, i.e.
/// the preimages of `Y` under the block's permutation.
fn preimages(code: &MsrCode, i: usize, j: usize, rows: &[usize]) -> Vec<usize> {
    let params = code.params();
    let inv = code.block(i, j).perm().inverse(params.space());
    rows.iter().map(|&w| inv.apply(params.space(), w)).collect()
}

/// Signal recovery on an arbitrary slice: the row spaces of `S · A[i][col]`
/// for the given parity rows partition the positions.
pub fn check_signal_recovery_on(
    code: &MsrCode,
    col: usize,
    parity_rows: &[usize],
    slice: &CoordinateSlice,
) -> bool {
    let alpha = code.params().alpha();
    let mut hit = vec![false; alpha];
    for &i in parity_rows {
        for v in preimages(code, i, col, slice.members()) {
            if core::mem::replace(&mut hit[v], true) {
                return false;
            }
        }
    }
    hit.iter().all(|&h| h)
}

/// Alignment on an arbitrary slice: every block of every other systematic
/// column maps the slice onto itself.
pub fn check_alignment_on(code: &MsrCode, col: usize, slice: &CoordinateSlice) -> bool {
    let p = code.params();
    (0..p.k()).filter(|&j| j != col).all(|j| {
        (0..p.r()).all(|i| {
            let mut img = preimages(code, i, j, slice.members());
            img.sort_unstable();
            img == slice.members()
        })
    })
}

fn scenario_slice(code: &MsrCode, failed: usize, scenario: usize) -> Result<CoordinateSlice> {
    let p = code.params();
    if !p.is_systematic(failed) {
        return Err(Error::OutOfRange("systematic-repair only"));
    }
    if scenario >= p.scenario_count() {
        return Err(Error::OutOfRange("scenario"));
    }
    p.space().slice(p.coordinate(scenario, failed - 1), 0)
}

/// Signal recovery for failed node `failed` (1-based) in scenario `scenario`.
pub fn check_signal_recovery(code: &MsrCode, failed: usize, scenario: usize) -> Result<bool> {
    let slice = scenario_slice(code, failed, scenario)?;
    Ok(check_signal_recovery_on(
        code,
        failed - 1,
        code.table().subset(scenario),
        &slice,
    ))
}

/// Interference alignment for failed node `failed` in scenario `scenario`.
pub fn check_alignment(code: &MsrCode, failed: usize, scenario: usize) -> Result<bool> {
    let slice = scenario_slice(code, failed, scenario)?;
    Ok(check_alignment_on(code, failed - 1, &slice))
}

/// Where a term of a parity equation goes.
#[derive(Debug, Clone, Copy)]
enum Slot {
    /// Column of the unknown vector.
    Unknown(usize),
    /// Symbol `pos` of systematic helper `node`, moved to the right-hand side.
    Known { node: usize, pos: usize },
}

/// Data-independent layout of the repair system.
#[derive(Debug, Clone)]
struct SystemLayout {
    /// Per equation: the received parity symbol it equals.
    sources: Vec<(usize, usize)>,
    /// Per equation: `(slot, coefficient)` terms.
    terms: Vec<Vec<(Slot, Fe)>>,
    dim: usize,
}

fn layout(code: &MsrCode, plan: &RepairPlan) -> Result<SystemLayout> {
    let p = code.params();
    let (alpha, beta, k) = (p.alpha(), p.beta(), p.k());
    let hs = plan.helper_set();
    let rows = plan.rows();
    let fcol = hs.failed() - 1;
    let dim = plan.system_dimension();
    let mut sources = Vec::with_capacity(dim);
    let mut terms = vec![Vec::with_capacity(k); dim];
    let mut eq = 0;
    for &i in hs.parity_rows() {
        let pre: Vec<Vec<usize>> = (0..k)
            .map(|j| preimages(code, i, j, rows.members()))
            .collect();
        for pos in 0..beta {
            sources.push((p.k() + 1 + i, pos));
            for (j, pre_j) in pre.iter().enumerate() {
                let v = pre_j[pos];
                let lambda = code.block(i, j).lambda();
                let node = j + 1;
                let slot = if j == fcol {
                    Slot::Unknown(v)
                } else {
                    let at = rows.position(v).ok_or(Error::NotInSpan)?;
                    match hs.absent().iter().position(|&a| a == node) {
                        Some(idx) => Slot::Unknown(alpha + idx * beta + at),
                        None => Slot::Known { node, pos: at },
                    }
                };
                terms[eq].push((slot, lambda));
            }
            eq += 1;
        }
    }
    Ok(SystemLayout {
        sources,
        terms,
        dim,
    })
}

/// The square repair matrix `M` for a plan, independent of the data.
pub fn repair_matrix(code: &MsrCode, plan: &RepairPlan) -> Result<Matrix> {
    let lay = layout(code, plan)?;
    Ok(layout_matrix(code, &lay))
}

fn layout_matrix(code: &MsrCode, lay: &SystemLayout) -> Matrix {
    let f = code.params().field();
    let mut m = Matrix::zeros(f, lay.dim, lay.dim);
    for (eq, terms) in lay.terms.iter().enumerate() {
        for &(slot, lambda) in terms {
            if let Slot::Unknown(c) = slot {
                m.set(eq, c, f.add(m.get(eq, c), lambda));
            }
        }
    }
    m
}

fn check_transmissions(plan: &RepairPlan, tx: &Transmissions) -> Result<()> {
    for &node in plan.helper_set().helpers() {
        let got = tx
            .get(node)
            .ok_or(Error::DimensionMismatch("missing helper transmission"))?;
        if got.len() != plan.beta {
            return Err(Error::BadLength {
                expected: plan.beta,
                actual: got.len(),
            });
        }
    }
    if tx.symbol_count() != plan.download_symbols() {
        return Err(Error::DimensionMismatch("transmissions from non-helpers"));
    }
    Ok(())
}

fn layout_rhs(code: &MsrCode, lay: &SystemLayout, tx: &Transmissions) -> Vec<Fe> {
    let f = code.params().field();
    lay.sources
        .iter()
        .zip(&lay.terms)
        .map(|(&(node, pos), terms)| {
            let mut v = tx.get(node).expect("checked")[pos];
            for &(slot, lambda) in terms {
                if let Slot::Known { node, pos } = slot {
                    v = f.sub(v, f.mul(lambda, tx.get(node).expect("checked")[pos]));
                }
            }
            v
        })
        .collect()
}

/// The repair system `M · u = b`, where `u` is the lost shard followed by
/// the `β` slice symbols of each absent systematic node.
pub fn assemble_repair_system(
    code: &MsrCode,
    plan: &RepairPlan,
    tx: &Transmissions,
) -> Result<(Matrix, Vec<Fe>)> {
    check_transmissions(plan, tx)?;
    let lay = layout(code, plan)?;
    let rhs = layout_rhs(code, &lay, tx);
    Ok((layout_matrix(code, &lay), rhs))
}

/// A repair plan with its system pre-factored, reusable across codewords.
#[derive(Debug, Clone)]
pub struct RepairDecoder {
    code: MsrCode,
    plan: RepairPlan,
    layout: SystemLayout,
    /// The first `α` rows of `M⁻¹`.
    solve_rows: Matrix,
}

impl RepairDecoder {
    /// Factor the repair system; fails with `Singular` if the coefficient
    /// table does not support this helper set.
    pub fn new(code: &MsrCode, plan: &RepairPlan) -> Result<Self> {
        let layout = layout(code, plan)?;
        let inv = layout_matrix(code, &layout).inverse()?;
        let keep: Vec<usize> = (0..code.params().alpha()).collect();
        Ok(RepairDecoder {
            code: code.clone(),
            plan: plan.clone(),
            solve_rows: inv.select_rows(&keep),
            layout,
        })
    }

    /// The plan being executed.
    pub fn plan(&self) -> &RepairPlan {
        &self.plan
    }

    /// Rebuild the lost shard from one codeword's transmissions.
    pub fn decode(&self, tx: &Transmissions) -> Result<Vec<Fe>> {
        check_transmissions(&self.plan, tx)?;
        let rhs = layout_rhs(&self.code, &self.layout, tx);
        self.solve_rows.mul_vec(&rhs)
    }
}

/// Rebuild the failed shard described by `plan`.
pub fn repair(code: &MsrCode, plan: &RepairPlan, tx: &Transmissions) -> Result<RepairResult> {
    let symbols = RepairDecoder::new(code, plan)?.decode(tx)?;
    Ok(RepairResult {
        recovered: NodeShard::new(plan.helper_set().failed(), symbols, tx.params_checksum()),
        downloaded_symbols: tx.symbol_count(),
        system_dimension: plan.system_dimension(),
    })
}

/// Repair traffic compared with a conventional MDS rebuild.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandwidthReport {
    /// `d · α / (d - k + 1)`.
    pub repair_download: usize,
    /// `k · α`.
    pub naive_download: usize,
    /// File size `k · α`.
    pub file_size: usize,
    /// `Σ_{i<k} min(α, (d - i)·β)`, which equals the file size at the
    /// minimum-storage point.
    pub tradeoff_file_size: usize,
}

/// Bandwidth figures for a parameter set.
pub fn bandwidth_report(params: &CodeParams) -> BandwidthReport {
    let (alpha, beta, d, k) = (params.alpha(), params.beta(), params.d(), params.k());
    BandwidthReport {
        repair_download: d * beta,
        naive_download: k * alpha,
        file_size: k * alpha,
        tradeoff_file_size: (0..k).map(|i| alpha.min((d - i) * beta)).sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::CodeParams;
    use crate::labels::Translation;

    fn code_423(l22: u64) -> MsrCode {
        let p = CodeParams::new(4, 2, 3, 5).unwrap();
        MsrCode::new(p, &[vec![1, 1], vec![1, l22]]).unwrap()
    }

    fn ones(n: usize, k: usize, d: usize, q: u64) -> MsrCode {
        let p = CodeParams::new(n, k, d, q).unwrap();
        MsrCode::new(p, &vec![vec![1; k]; n - k]).unwrap()
    }

    #[test]
    fn helper_set_validation() {
        let p = CodeParams::new(5, 2, 3, 709).unwrap();
        let hs = HelperSet::new(&p, 1, &[5, 3, 4]).unwrap();
        assert_eq!(hs.helpers(), &[3, 4, 5]);
        assert_eq!(hs.parity_rows(), &[0, 1, 2]);
        assert_eq!(hs.absent(), &[2]);
        assert_eq!(hs.h(), 3);
        assert!(hs.h() >= p.rho());
        assert_eq!(
            HelperSet::new(&p, 3, &[1, 2, 4]),
            Err(Error::OutOfRange("systematic-repair only"))
        );
        assert!(HelperSet::new(&p, 1, &[2, 3]).is_err());
        assert!(HelperSet::new(&p, 1, &[1, 2, 3]).is_err());
        assert!(HelperSet::new(&p, 1, &[2, 2, 3]).is_err());
        assert!(HelperSet::new(&p, 1, &[2, 3, 6]).is_err());
    }

    #[test]
    fn scenario_choice() {
        let c = ones(5, 2, 3, 709);
        let plan = RepairPlan::new(&c, 1, &[3, 4, 5]).unwrap();
        assert_eq!(c.table().subset(plan.scenario()), &[0, 1]);
        for (a, helpers) in [(0, [2, 3, 4]), (1, [2, 3, 5]), (2, [2, 4, 5])] {
            assert_eq!(RepairPlan::new(&c, 1, &helpers).unwrap().scenario(), a);
        }
        let c1 = code_423(2);
        assert_eq!(RepairPlan::new(&c1, 2, &[1, 3, 4]).unwrap().scenario(), 0);
    }

    #[test]
    fn plan_sizes() {
        let c = ones(5, 2, 3, 709);
        let plan = RepairPlan::new(&c, 1, &[2, 3, 4]).unwrap();
        assert_eq!(plan.system_dimension(), 64);
        assert_eq!(plan.download_symbols(), 96);
        assert_eq!(plan.naive_symbols(), 128);
        assert_eq!(plan.rows().len(), 32);
        assert_eq!(plan.rows().coord(), 0);
        let plan = RepairPlan::new(&c, 2, &[3, 4, 5]).unwrap();
        assert_eq!(plan.system_dimension(), 96);
        assert_eq!(plan.rows().coord(), 3);
        assert_eq!(repair_matrix(&c, &plan).unwrap().rows(), 96);
    }

    #[test]
    fn structural_checks_hold_on_built_codes() {
        for (n, k, d) in [
            (4, 2, 3),
            (5, 2, 3),
            (5, 3, 4),
            (6, 2, 4),
            (6, 2, 3),
            (6, 3, 4),
        ] {
            let c = ones(n, k, d, 7);
            for f in 1..=k {
                for a in 0..c.params().scenario_count() {
                    assert!(
                        check_signal_recovery(&c, f, a).unwrap(),
                        "{n},{k},{d} f={f} a={a}"
                    );
                    assert!(
                        check_alignment(&c, f, a).unwrap(),
                        "{n},{k},{d} f={f} a={a}"
                    );
                }
            }
        }
    }

    #[test]
    fn wrong_slice_fails_signal_recovery() {
        let c = ones(5, 2, 3, 7);
        let p = c.params();
        let other = p.space().slice(p.coordinate(0, 1), 0).unwrap();
        assert!(!check_signal_recovery_on(
            &c,
            0,
            c.table().subset(0),
            &other
        ));
    }

    #[test]
    fn injected_shift_breaks_alignment() {
        let c = ones(5, 2, 3, 7);
        let p = *c.params();
        let space = *p.space();
        let mut blocks = Vec::new();
        for i in 0..3 {
            for j in 0..2 {
                let b = c.block(i, j).clone();
                if (i, j) == (0, 1) {
                    // Disturb the coordinate owned by (scenario 0, node 1).
                    let bump = Translation::unit(&space, p.coordinate(0, 0), 1).unwrap();
                    let perm = b.perm().compose(&bump, &space);
                    blocks.push(crate::EncodingBlock::new(b.lambda(), perm).unwrap());
                } else {
                    blocks.push(b);
                }
            }
        }
        let bad = MsrCode::from_blocks(p, blocks).unwrap();
        assert!(!check_alignment(&bad, 1, 0).unwrap());
        assert!(check_alignment(&bad, 1, 1).unwrap());
        let plan = RepairPlan::new(&bad, 1, &[2, 3, 4]).unwrap();
        assert_eq!(repair_matrix(&bad, &plan).unwrap_err(), Error::NotInSpan);
    }

    #[test]
    fn reports() {
        let r = bandwidth_report(&CodeParams::new(4, 2, 3, 5).unwrap());
        assert_eq!((r.repair_download, r.naive_download), (6, 8));
        assert_eq!(r.tradeoff_file_size, r.file_size);
        let r = bandwidth_report(&CodeParams::new(5, 2, 3, 709).unwrap());
        assert_eq!((r.repair_download, r.naive_download), (96, 128));
        assert_eq!(r.tradeoff_file_size, 128);
    }

    #[test]
    fn transmissions_are_checked() {
        let c = code_423(2);
        let plan = RepairPlan::new(&c, 1, &[2, 3, 4]).unwrap();
        let mut tx = Transmissions::new(0);
        tx.insert(2, vec![Fe::ZERO; 2]);
        tx.insert(3, vec![Fe::ZERO; 2]);
        assert!(repair(&c, &plan, &tx).is_err());
        tx.insert(4, vec![Fe::ZERO; 3]);
        assert!(matches!(
            repair(&c, &plan, &tx),
            Err(Error::BadLength { .. })
        ));
        tx.insert(4, vec![Fe::ZERO; 2]);
        let out = repair(&c, &plan, &tx).unwrap();
        assert_eq!(out.recovered.symbols(), &[Fe::ZERO; 4]);
        assert_eq!(out.downloaded_symbols, 6);
    }
}
