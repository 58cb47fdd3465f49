//! Straight-line scoring oracles, written from the rules text without
//! reference to the engine's scoring code. Used by the oracle tests and the
//! acceptance suite.

#![allow(dead_code)]

/// Strategy indices: 0 Bridging, 1 ComprehensionMonitoring, 2 Elaboration,
/// 3 Paraphrasing, 4 Prediction, 5 Other.
pub const STRATEGIES: usize = 6;

/// First vote. Points only when every player chose the same strategy.
pub fn first_vote(votes: &[usize], reader: usize, task: usize, value: i32) -> Vec<i32> {
    let n = votes.len();
    let mut out = vec![0; n];
    let first = votes[0];
    let mut everyone_agrees = true;
    for v in votes {
        if *v != first {
            everyone_agrees = false;
        }
    }
    if !everyone_agrees {
        return out;
    }
    // The single agreed strategy has n of n votes: accepted.
    for p in 0..n {
        if first == task {
            if p == reader {
                out[p] += value;
            } else {
                out[p] += value / 2;
            }
        } else {
            out[p] += 5;
        }
        out[p] += 5;
    }
    out
}

/// Revote. `revotes[p]` is a bit set over strategy indices.
pub fn revote(first: &[usize], revotes: &[u8], reader: usize, task: usize, value: i32) -> Vec<i32> {
    let n = first.len();
    let mut out = vec![0; n];
    for s in 0..STRATEGIES {
        let mut count = 0;
        for p in 0..n {
            if revotes[p] & (1 << s) != 0 {
                count += 1;
            }
        }
        let accepted = count * 2 > n;
        if !accepted {
            continue;
        }
        for p in 0..n {
            if revotes[p] & (1 << s) == 0 {
                continue;
            }
            if s == task {
                if p == reader {
                    out[p] += value;
                } else {
                    out[p] += value / 2;
                }
            } else {
                out[p] += 5;
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let sb = first[b];
            if revotes[a] & (1 << sb) != 0 && sb != first[a] {
                out[b] += 5;
            }
        }
    }
    out
}

/// Calls `f` with every `n`-digit base-`base` vector.
pub fn each_table(n: usize, base: usize, mut f: impl FnMut(&[usize])) {
    let mut digits = vec![0; n];
    loop {
        f(&digits);
        let mut i = 0;
        loop {
            if i == n {
                return;
            }
            digits[i] += 1;
            if digits[i] < base {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// One random revote scenario.
#[derive(Debug, Clone)]
pub struct RevoteTable {
    pub first: Vec<usize>,
    pub revotes: Vec<u8>,
    pub reader: usize,
    pub task: usize,
    pub value: i32,
}

/// Deterministic revote tables. Half of the revote sets are a single
/// strategy, the rest are arbitrary non-empty subsets, and first votes are
/// drawn from a narrow pool half the time so majorities and adoptions occur.
pub fn revote_tables(seed: u64, count: usize) -> Vec<RevoteTable> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(3..=4);
            let pool = if rng.gen_bool(0.5) { 2 } else { STRATEGIES };
            let first: Vec<usize> = (0..n).map(|_| rng.gen_range(0..pool)).collect();
            let revotes = (0..n)
                .map(|p| {
                    if rng.gen_bool(0.5) {
                        let s = if rng.gen_bool(0.5) { first[p] } else { first[rng.gen_range(0..n)] };
                        1u8 << s
                    } else {
                        rng.gen_range(1u8..64)
                    }
                })
                .collect();
            RevoteTable {
                first,
                revotes,
                reader: rng.gen_range(0..n),
                task: rng.gen_range(0..5),
                value: [12, 14, 16, 18, 20][rng.gen_range(0..5)],
            }
        })
        .collect()
}
