//! Exhaustive verification sweeps, spread over worker threads.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use msr_core::coefficients::{
    any_helper_cases, check_mds_block, check_mds_subset_with, check_repair_case, mds_block_cases,
    mds_subset_cases,
};
use msr_core::repair::{check_alignment, check_signal_recovery};
use msr_core::MsrCode;

use crate::error::Result;

/// Environment variable capping the number of worker threads.
pub const THREADS_VAR: &str = "MSR_THREADS";

/// Worker count: `MSR_THREADS` if set to a positive integer, else the
/// available parallelism.
pub fn threads() -> usize {
    std::env::var(THREADS_VAR)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Map `f` over `items` on up to [`threads`] workers, keeping input order.
pub fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let workers = threads().min(items.len());
    if workers <= 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = items.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                *slots[i].lock().unwrap() = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("every slot filled"))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Repair,
    Mds,
    AnyHelper,
    All,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Skipped(String),
}

/// One row of the verification table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub suite: &'static str,
    pub case: String,
    pub verdict: Verdict,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = match &self.verdict {
            Verdict::Pass => "pass".to_string(),
            Verdict::Fail => "FAIL".to_string(),
            Verdict::Skipped(why) => format!("skip ({why})"),
        };
        write!(f, "{:<11} {:<40} {v}", self.suite, self.case)
    }
}

fn list(nodes: &[usize]) -> String {
    let parts: Vec<String> = nodes.iter().map(usize::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

fn verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Signal recovery and alignment for every systematic node and scenario.
pub fn verify_repair(code: &MsrCode) -> Result<Vec<Outcome>> {
    let p = code.params();
    let cases: Vec<(usize, usize)> = (1..=p.k())
        .flat_map(|f| (0..p.scenario_count()).map(move |a| (f, a)))
        .collect();
    let results = par_map(&cases, |&(f, a)| -> Result<bool> {
        Ok(check_signal_recovery(code, f, a)? && check_alignment(code, f, a)?)
    });
    cases
        .iter()
        .zip(results)
        .map(|(&(f, a), ok)| {
            let parity: Vec<usize> = code
                .table()
                .subset(a)
                .iter()
                .map(|i| p.k() + 1 + i)
                .collect();
            Ok(Outcome {
                suite: "repair",
                case: format!("f={f} parity={}", list(&parity)),
                verdict: verdict(ok?),
            })
        })
        .collect()
}

/// The block sub-matrix criterion, then direct inversion of every
/// `k`-subset of the generator when it fits in memory.
pub fn verify_mds(code: &MsrCode) -> Result<Vec<Outcome>> {
    let blocks = mds_block_cases(code.params());
    let results = par_map(&blocks, |b| check_mds_block(code, b));
    let mut out = Vec::new();
    for (b, ok) in blocks.iter().zip(results) {
        out.push(Outcome {
            suite: "mds-block",
            case: format!(
                "rows={} cols={}",
                list(&b.parity_nodes),
                list(&b.systematic_nodes)
            ),
            verdict: verdict(ok?),
        });
    }
    match code.generator_matrix() {
        Ok(g) => {
            let subsets = mds_subset_cases(code.params());
            let alpha = code.params().alpha();
            let results = par_map(&subsets, |s| check_mds_subset_with(&g, alpha, s));
            for (s, ok) in subsets.iter().zip(results) {
                out.push(Outcome {
                    suite: "mds-subset",
                    case: format!("nodes={}", list(s)),
                    verdict: verdict(ok),
                });
            }
        }
        Err(msr_core::Error::TooLarge(why)) => out.push(Outcome {
            suite: "mds-subset",
            case: "all subsets".into(),
            verdict: Verdict::Skipped(why.into()),
        }),
        Err(e) => return Err(e.into()),
    }
    Ok(out)
}

/// Unique solvability of the repair system for every helper set.
pub fn verify_any_helper(code: &MsrCode) -> Result<Vec<Outcome>> {
    let cases = any_helper_cases(code.params());
    let results = par_map(&cases, |c| check_repair_case(code, c));
    cases
        .iter()
        .zip(results)
        .map(|(c, ok)| {
            Ok(Outcome {
                suite: "any-helper",
                case: format!("f={} helpers={}", c.failed, list(&c.helpers)),
                verdict: verdict(ok?),
            })
        })
        .collect()
}

pub fn verify(code: &MsrCode, level: Level) -> Result<Vec<Outcome>> {
    Ok(match level {
        Level::Repair => verify_repair(code)?,
        Level::Mds => verify_mds(code)?,
        Level::AnyHelper => verify_any_helper(code)?,
        Level::All => {
            let mut v = verify_repair(code)?;
            v.extend(verify_mds(code)?);
            v.extend(verify_any_helper(code)?);
            v
        }
    })
}

/// Acceptance test for the coefficient search: the block MDS criterion and
/// every helper set, in parallel.
pub fn certify(code: &MsrCode) -> msr_core::Result<bool> {
    let blocks = mds_block_cases(code.params());
    for r in par_map(&blocks, |b| check_mds_block(code, b)) {
        if !r? {
            return Ok(false);
        }
    }
    let cases = any_helper_cases(code.params());
    for r in par_map(&cases, |c| check_repair_case(code, c)) {
        if !r? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use msr_core::CodeParams;

    #[test]
    fn par_map_keeps_order() {
        let v: Vec<u32> = (0..100).collect();
        assert_eq!(
            par_map(&v, |x| x * 2),
            v.iter().map(|x| x * 2).collect::<Vec<_>>()
        );
        assert!(par_map(&[] as &[u32], |x| *x).is_empty());
    }

    #[test]
    fn code_423_tables() {
        let p = CodeParams::new(4, 2, 3, 5).unwrap();
        let good = MsrCode::new(p, &[vec![1, 1], vec![1, 2]]).unwrap();
        let all = verify(&good, Level::All).unwrap();
        assert!(all.iter().all(|o| o.verdict == Verdict::Pass));
        // 2 repair rows, 5 blocks, 6 subsets, 2 helper sets.
        assert_eq!(all.len(), 2 + 5 + 6 + 2);
        let bad = good.with_lambdas(&[vec![1, 1], vec![1, 1]]).unwrap();
        let mds = verify(&bad, Level::Mds).unwrap();
        let failed: Vec<_> = mds.iter().filter(|o| o.verdict == Verdict::Fail).collect();
        assert_eq!(failed.len(), 2);
        assert_eq!(failed[0].case, "rows={3,4} cols={1,2}");
        assert_eq!(failed[1].case, "nodes={3,4}");
        assert!(!certify(&bad).unwrap());
        assert!(certify(&good).unwrap());
    }
}
