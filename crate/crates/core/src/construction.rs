//! Code parameters, the parity-subset scenario table, and the encoding
//! blocks `A[i][j] = λ[i][j] · Q[i][j]`.
//!
//! With `r = n - k` parities and `ρ = d - k + 1` parity helpers per repair,
//! there are `C(r, ρ)` ways to pick the parity helpers. Each choice gets one
//! label coordinate per systematic node, so the label space is
//! `Z_ρ^(k·C(r,ρ))` and `α = ρ^(k·C(r,ρ))`. The permutation `Q[i][j]` shifts
//! the coordinate owned by `(scenario a, node j)` by `ω_a(i)`, the rank of
//! parity `i` inside scenario `a` (zero if it is not a member).
//!
//! When `d = n - 1` there is a single scenario and block `(i, j)` is the
//! shift `i · e_j`.

use alloc::vec;
use alloc::vec::Vec;

use crate::field::{Fe, Field};
use crate::labels::{LabelSpace, Translation};
use crate::linalg::Matrix;
use crate::subsets::{binomial, combinations};
use crate::{Error, Result};

/// Largest `α` for which dense `α × α` blocks are materialized.
pub const DENSE_ALPHA_CAP: usize = 4096;
/// Largest `n` for which the dense generator matrix is materialized.
pub const DENSE_NODE_CAP: usize = 8;

/// Validated `[n, k, d]` parameters over `F_q` with all derived sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeParams {
    n: usize,
    k: usize,
    d: usize,
    field: Field,
    space: LabelSpace,
    scenarios: usize,
}

fn check_triple(n: usize, k: usize, d: usize) -> Result<()> {
    if k < 1 {
        return Err(Error::BadParams("k must be at least 1"));
    }
    if d <= k {
        return Err(Error::BadParams("d must exceed k"));
    }
    if d >= n {
        return Err(Error::BadParams("d must be at most n - 1"));
    }
    if n > u16::MAX as usize {
        return Err(Error::BadParams("n must fit in 16 bits"));
    }
    Ok(())
}

fn label_space(n: usize, k: usize, d: usize) -> Result<(LabelSpace, usize)> {
    check_triple(n, k, d)?;
    let r = n - k;
    let rho = d - k + 1;
    let scenarios = binomial(r as u64, rho as u64);
    let m = (scenarios)
        .checked_mul(k as u128)
        .filter(|&m| m <= 64)
        .ok_or(Error::Overflow("label length exceeds 64 coordinates"))? as usize;
    Ok((LabelSpace::new(rho, m)?, scenarios as usize))
}

/// `α = ρ^(k·C(r, ρ))` for a valid triple, if within [`crate::labels::MAX_ALPHA`].
pub fn min_alpha(n: usize, k: usize, d: usize) -> Result<usize> {
    Ok(label_space(n, k, d)?.0.size())
}

impl CodeParams {
    /// Validate `1 <= k < d <= n - 1` and `q` prime, and derive sizes.
    pub fn new(n: usize, k: usize, d: usize, q: u64) -> Result<Self> {
        let (space, scenarios) = label_space(n, k, d)?;
        let field = Field::new(q)?;
        Ok(CodeParams {
            n,
            k,
            d,
            field,
            space,
            scenarios,
        })
    }

    /// Total nodes.
    pub fn n(&self) -> usize {
        self.n
    }
    /// Systematic nodes.
    pub fn k(&self) -> usize {
        self.k
    }
    /// Helpers per repair.
    pub fn d(&self) -> usize {
        self.d
    }
    /// Field modulus.
    pub fn q(&self) -> u64 {
        self.field.modulus()
    }
    /// The field context.
    pub fn field(&self) -> Field {
        self.field
    }
    /// Parity nodes, `n - k`.
    pub fn r(&self) -> usize {
        self.n - self.k
    }
    /// Minimum parity helpers, `d - k + 1`.
    pub fn rho(&self) -> usize {
        self.d - self.k + 1
    }
    /// Number of parity-helper scenarios, `C(r, ρ)`.
    pub fn scenario_count(&self) -> usize {
        self.scenarios
    }
    /// Label coordinates, `k · C(r, ρ)`.
    pub fn m(&self) -> usize {
        self.space.len()
    }
    /// Symbols per node.
    pub fn alpha(&self) -> usize {
        self.space.size()
    }
    /// Symbols each helper sends, `α / ρ`.
    pub fn beta(&self) -> usize {
        self.alpha() / self.rho()
    }
    /// File symbols per codeword, `k · α`.
    pub fn file_symbols(&self) -> usize {
        self.k * self.alpha()
    }
    /// The label space indexing positions.
    pub fn space(&self) -> &LabelSpace {
        &self.space
    }
    /// Whether `node` (1-based) is systematic.
    pub fn is_systematic(&self, node: usize) -> bool {
        (1..=self.k).contains(&node)
    }
    /// Whether `node` (1-based) is a parity node.
    pub fn is_parity(&self, node: usize) -> bool {
        (self.k + 1..=self.n).contains(&node)
    }
    /// Label coordinate owned by scenario `a` and systematic column `j`
    /// (both zero-based).
    pub fn coordinate(&self, scenario: usize, col: usize) -> usize {
        scenario + col * self.scenarios
    }
}

/// The ordered `ρ`-subsets `R_a` of parity rows and their digit vectors `ω_a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioTable {
    subsets: Vec<Vec<usize>>,
    omegas: Vec<Vec<usize>>,
}

impl ScenarioTable {
    /// Lexicographic `ρ`-subsets of `0..r`.
    pub fn new(r: usize, rho: usize) -> Self {
        let rows: Vec<usize> = (0..r).collect();
        let subsets = combinations(&rows, rho);
        let omegas = subsets
            .iter()
            .map(|set| {
                let mut w = vec![0; r];
                for (t, &i) in set.iter().enumerate() {
                    w[i] = t;
                }
                w
            })
            .collect();
        ScenarioTable { subsets, omegas }
    }

    /// Number of scenarios.
    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    /// Never true for valid parameters.
    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    /// Parity rows of scenario `a`, increasing.
    pub fn subset(&self, a: usize) -> &[usize] {
        &self.subsets[a]
    }

    /// All scenarios in order.
    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    /// `ω_a(i)`: the rank of parity row `i` in scenario `a`, or 0.
    pub fn omega(&self, a: usize, i: usize) -> usize {
        self.omegas[a][i]
    }

    /// The full vector `ω_a`.
    pub fn omega_vector(&self, a: usize) -> &[usize] {
        &self.omegas[a]
    }

    /// Index of the scenario whose parity rows are exactly `set` (sorted).
    pub fn find(&self, set: &[usize]) -> Option<usize> {
        self.subsets.iter().position(|s| s == set)
    }
}

/// One encoding block: a nonzero scalar times a translation permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodingBlock {
    lambda: Fe,
    perm: Translation,
}

impl EncodingBlock {
    /// A block from its parts; `lambda` must be nonzero.
    pub fn new(lambda: Fe, perm: Translation) -> Result<Self> {
        if lambda.is_zero() {
            return Err(Error::ZeroLambda { row: 0, col: 0 });
        }
        Ok(EncodingBlock { lambda, perm })
    }

    /// The scalar `λ`.
    pub fn lambda(&self) -> Fe {
        self.lambda
    }

    /// The permutation part `Q`.
    pub fn perm(&self) -> &Translation {
        &self.perm
    }
}

/// A fully specified code: parameters, scenario table and `r × k` blocks.
#[derive(Debug, Clone)]
pub struct MsrCode {
    params: CodeParams,
    table: ScenarioTable,
    blocks: Vec<EncodingBlock>,
    perm_tables: Vec<Vec<u32>>,
}

impl MsrCode {
    /// Build the code for `params` with the given `r × k` coefficient table.
    pub fn new(params: CodeParams, lambdas: &[Vec<u64>]) -> Result<Self> {
        let (r, k) = (params.r(), params.k());
        if lambdas.len() != r || lambdas.iter().any(|row| row.len() != k) {
            return Err(Error::DimensionMismatch("lambda table must be r x k"));
        }
        let table = ScenarioTable::new(r, params.rho());
        let space = *params.space();
        let mut blocks = Vec::with_capacity(r * k);
        for (i, row) in lambdas.iter().enumerate() {
            for (j, &l) in row.iter().enumerate() {
                let lambda = params
                    .field()
                    .checked_elem(l)
                    .map_err(|_| Error::OutOfRange("lambda must be below q"))?;
                if lambda.is_zero() {
                    return Err(Error::ZeroLambda { row: i, col: j });
                }
                let mut shift = vec![0; space.len()];
                for a in 0..table.len() {
                    shift[params.coordinate(a, j)] = table.omega(a, i);
                }
                let perm = Translation::from_shift(&space, shift)?;
                blocks.push(EncodingBlock { lambda, perm });
            }
        }
        Ok(Self::assemble(params, table, blocks))
    }

    /// A code with arbitrary translation blocks in row-major `r × k` order.
    /// Nothing guarantees such a code is repairable; this exists to probe
    /// the verification routines.
    pub fn from_blocks(params: CodeParams, blocks: Vec<EncodingBlock>) -> Result<Self> {
        if blocks.len() != params.r() * params.k() {
            return Err(Error::DimensionMismatch("block count must be r * k"));
        }
        if blocks.iter().any(|b| b.perm.shift().len() != params.m()) {
            return Err(Error::DimensionMismatch("block shift length"));
        }
        let table = ScenarioTable::new(params.r(), params.rho());
        Ok(Self::assemble(params, table, blocks))
    }

    fn assemble(params: CodeParams, table: ScenarioTable, blocks: Vec<EncodingBlock>) -> Self {
        let perm_tables = blocks
            .iter()
            .map(|b| b.perm.table(params.space()))
            .collect();
        MsrCode {
            params,
            table,
            blocks,
            perm_tables,
        }
    }

    /// The same construction with a different coefficient table.
    pub fn with_lambdas(&self, lambdas: &[Vec<u64>]) -> Result<Self> {
        Self::new(self.params, lambdas)
    }

    /// Code parameters.
    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    /// The scenario table.
    pub fn table(&self) -> &ScenarioTable {
        &self.table
    }

    /// Block `(i, j)`: parity row `i`, systematic column `j`, zero-based.
    pub fn block(&self, i: usize, j: usize) -> &EncodingBlock {
        &self.blocks[i * self.params.k() + j]
    }

    /// `perm_table(i, j)[v]` is the position that input `v` lands on.
    pub fn perm_table(&self, i: usize, j: usize) -> &[u32] {
        &self.perm_tables[i * self.params.k() + j]
    }

    /// The coefficient table as integers.
    pub fn lambdas(&self) -> Vec<Vec<u64>> {
        let k = self.params.k();
        self.blocks
            .chunks(k)
            .map(|row| row.iter().map(|b| b.lambda.value()).collect())
            .collect()
    }

    /// Accumulate `A[i][j] · x` into `acc`.
    pub fn apply_block(&self, i: usize, j: usize, x: &[Fe], acc: &mut [Fe]) {
        let f = self.params.field();
        let lambda = self.block(i, j).lambda;
        for (&dst, &v) in self.perm_table(i, j).iter().zip(x) {
            let slot = &mut acc[dst as usize];
            *slot = f.add(*slot, f.mul(lambda, v));
        }
    }

    /// Dense `α × α` block `A[i][j]`.
    pub fn materialize_block(&self, i: usize, j: usize) -> Result<Matrix> {
        if self.params.alpha() > DENSE_ALPHA_CAP {
            return Err(Error::TooLarge("alpha above dense cap"));
        }
        let b = self.block(i, j);
        Ok(b.perm
            .materialize(self.params.space(), self.params.field(), b.lambda))
    }

    /// The `nα × kα` generator: `k` identity blocks over the parity blocks.
    pub fn generator_matrix(&self) -> Result<Matrix> {
        let p = &self.params;
        if p.alpha() > DENSE_ALPHA_CAP || p.n() > DENSE_NODE_CAP {
            return Err(Error::TooLarge("generator above dense cap"));
        }
        let (alpha, k) = (p.alpha(), p.k());
        let mut g = Matrix::zeros(p.field(), p.n() * alpha, k * alpha);
        for t in 0..k * alpha {
            g.set(t, t, Fe::ONE);
        }
        for i in 0..p.r() {
            for j in 0..k {
                let lambda = self.block(i, j).lambda;
                for (v, &dst) in self.perm_table(i, j).iter().enumerate() {
                    g.set((k + i) * alpha + dst as usize, j * alpha + v, lambda);
                }
            }
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(n: usize, k: usize, d: usize, q: u64) -> MsrCode {
        let p = CodeParams::new(n, k, d, q).unwrap();
        let lambdas = vec![vec![1; k]; n - k];
        MsrCode::new(p, &lambdas).unwrap()
    }

    #[test]
    fn parameter_validation() {
        assert!(CodeParams::new(4, 2, 3, 5).is_ok());
        assert!(matches!(
            CodeParams::new(4, 4, 3, 5),
            Err(Error::BadParams(_))
        ));
        assert!(matches!(
            CodeParams::new(4, 2, 2, 5),
            Err(Error::BadParams(_))
        ));
        assert!(matches!(
            CodeParams::new(4, 2, 4, 5),
            Err(Error::BadParams(_))
        ));
        assert!(matches!(
            CodeParams::new(4, 0, 3, 5),
            Err(Error::BadParams(_))
        ));
        assert_eq!(CodeParams::new(4, 2, 3, 6), Err(Error::NotPrime(6)));
        assert!(matches!(
            CodeParams::new(12, 4, 8, 5),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn derived_sizes() {
        let p = CodeParams::new(5, 2, 3, 709).unwrap();
        assert_eq!((p.r(), p.rho(), p.scenario_count(), p.m()), (3, 2, 3, 6));
        assert_eq!((p.alpha(), p.beta(), p.file_symbols()), (64, 32, 128));
        // d = n - 1 collapses to a single scenario with α = r^k.
        let p = CodeParams::new(6, 3, 5, 7).unwrap();
        assert_eq!(
            (p.rho(), p.scenario_count(), p.m(), p.alpha()),
            (3, 1, 3, 27)
        );
        assert_eq!(p.beta() * p.rho(), p.alpha());
    }

    #[test]
    fn alpha_values() {
        for k in 1..=4 {
            assert_eq!(min_alpha(k + 3, k, k + 1).unwrap(), 1 << (3 * k));
        }
        assert_eq!(min_alpha(5, 2, 3).unwrap(), 64);
        for (n, k) in [(4, 2), (5, 2), (5, 3), (6, 3), (7, 2)] {
            assert_eq!(min_alpha(n, k, n - 1).unwrap(), (n - k).pow(k as u32));
        }
        assert!(matches!(min_alpha(10, 5, 7), Err(Error::Overflow(_))));
    }

    #[test]
    fn scenario_table_three_choose_two() {
        let t = ScenarioTable::new(3, 2);
        assert_eq!(t.subsets(), &[vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(t.omega_vector(0), &[0, 1, 0]);
        assert_eq!(t.omega_vector(1), &[0, 0, 1]);
        assert_eq!(t.omega_vector(2), &[0, 0, 1]);
        assert_eq!(t.find(&[0, 2]), Some(1));
        assert_eq!(t.find(&[0]), None);
        let single = ScenarioTable::new(4, 4);
        assert_eq!(single.omega_vector(0), &[0, 1, 2, 3]);
    }

    #[test]
    fn restricted_omegas_cover_all_digits() {
        for r in 1..=6 {
            for rho in 1..=r {
                let t = ScenarioTable::new(r, rho);
                assert_eq!(t.len() as u128, binomial(r as u64, rho as u64));
                for a in 0..t.len() {
                    let mut digits: Vec<usize> =
                        t.subset(a).iter().map(|&i| t.omega(a, i)).collect();
                    digits.sort_unstable();
                    assert_eq!(digits, (0..rho).collect::<Vec<_>>());
                }
            }
        }
    }

    #[test]
    fn five_two_three_block_patterns() {
        // [k+3, k, k+1]: row 1 shifts nothing, row 2 shifts coordinate 3j-2,
        // row 3 shifts coordinates 3j-1 and 3j (1-based).
        for k in 1..=3 {
            let c = code(k + 3, k, k + 1, 7);
            for j in 0..k {
                let base = 3 * j;
                let pattern = |i: usize| -> Vec<usize> {
                    c.block(i, j).perm().shift()[base..base + 3].to_vec()
                };
                assert_eq!(pattern(0), vec![0, 0, 0]);
                assert_eq!(pattern(1), vec![1, 0, 0]);
                assert_eq!(pattern(2), vec![0, 1, 1]);
                for i in 0..3 {
                    let shift = c.block(i, j).perm().shift();
                    assert!(shift
                        .iter()
                        .enumerate()
                        .all(|(co, &s)| s == 0 || (base..base + 3).contains(&co)));
                }
            }
        }
    }

    #[test]
    fn zero_lambda_rejected() {
        let p = CodeParams::new(4, 2, 3, 5).unwrap();
        assert_eq!(
            MsrCode::new(p, &[vec![1, 1], vec![0, 2]]).unwrap_err(),
            Error::ZeroLambda { row: 1, col: 0 }
        );
        assert!(MsrCode::new(p, &[vec![1, 1]]).is_err());
        assert!(MsrCode::new(p, &[vec![1, 1], vec![1, 5]]).is_err());
    }

    #[test]
    fn generator_shape() {
        let c = code(5, 2, 3, 709);
        let g = c.generator_matrix().unwrap();
        assert_eq!((g.rows(), g.cols()), (320, 128));
        let top: Vec<usize> = (0..128).collect();
        assert_eq!(
            g.select_rows(&top),
            Matrix::identity(c.params().field(), 128)
        );
        for i in 0..3 {
            for j in 0..2 {
                let b = c.materialize_block(i, j).unwrap();
                for t in 0..64 {
                    assert_eq!(b.row(t).iter().filter(|v| !v.is_zero()).count(), 1);
                    assert_eq!((0..64).filter(|&s| !b.get(s, t).is_zero()).count(), 1);
                }
            }
        }
    }
}
