#![allow(dead_code)]

use msr_core::coefficients::find_lambdas;
use msr_core::field::next_prime_above;
use msr_core::labels::Translation;
use msr_core::rng::XorShift64Star;
use msr_core::{CodeParams, Fe, Matrix, MsrCode};

/// The code for `(n, k, d)` over the smallest prime above the combined
/// field-size bound, with a searched coefficient table.
pub fn certified(n: usize, k: usize, d: usize) -> MsrCode {
    let bound = msr_core::coefficients::bound_qmds(n, k, d).unwrap()
        + msr_core::coefficients::bound_qany(n, k, d).unwrap();
    let q = next_prime_above(bound as u64).unwrap();
    let params = CodeParams::new(n, k, d, q).unwrap();
    let cert = find_lambdas(&params, 0x5eed, 64).unwrap();
    MsrCode::new(params, &cert.lambdas).unwrap()
}

pub fn random_data(code: &MsrCode, seed: u64) -> Vec<Fe> {
    let f = code.params().field();
    let mut g = XorShift64Star::new(seed);
    (0..code.params().file_symbols())
        .map(|_| f.elem(g.below(f.modulus())))
        .collect()
}

/// Shift of block `(i, j)` written straight from the `d = n - 1` recipe:
/// parity row `i` shifts coordinate `j` by `i`.
pub fn construction_one_shift(params: &CodeParams, i: usize, j: usize) -> Translation {
    Translation::unit(params.space(), j, i).unwrap()
}

/// Dense rows `Y` of the generator rows of `node` (1-based).
pub fn received_functionals(code: &MsrCode, node: usize, rows: &[usize]) -> Matrix {
    let g = code.generator_matrix().unwrap();
    let alpha = code.params().alpha();
    let picks: Vec<usize> = rows.iter().map(|&y| (node - 1) * alpha + y).collect();
    g.select_rows(&picks)
}

/// Whether the lost shard is a function of what the helpers send, decided on
/// the full `kα`-unknown system: each unit functional on the failed node's
/// coordinates must lie in the row space of the received functionals.
pub fn uniquely_repairable(
    code: &MsrCode,
    failed: usize,
    helpers: &[usize],
    rows: &[usize],
) -> bool {
    let p = code.params();
    let alpha = p.alpha();
    let mut received: Option<Matrix> = None;
    for &h in helpers {
        let part = received_functionals(code, h, rows);
        received = Some(match received {
            None => part,
            Some(acc) => acc.vstack(&part).unwrap(),
        });
    }
    let received = received.unwrap();
    let mut target = Matrix::zeros(p.field(), alpha, p.file_symbols());
    for t in 0..alpha {
        target.set(t, (failed - 1) * alpha + t, Fe::ONE);
    }
    received.rank() == received.vstack(&target).unwrap().rank()
}
