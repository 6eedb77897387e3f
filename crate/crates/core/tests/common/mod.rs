#![allow(dead_code)]

use mirrorkit::ci_model::{validate, Block, CiSpec};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const MAX_N: usize = 8;
pub const MAX_EXP: u32 = 7;

/// Random positive integers of length `len` summing to `total`, each at least `min`.
fn composition(rng: &mut ChaCha8Rng, total: u64, len: usize, min: u64) -> Option<Vec<u64>> {
    if len == 0 || total < min * len as u64 {
        return None;
    }
    let mut parts = vec![min; len];
    for _ in 0..total - min * len as u64 {
        let i = rng.gen_range(0..len);
        parts[i] += 1;
    }
    Some(parts)
}

/// One monomial per variable of the group, each of weighted degree `degree`:
/// either `x_i^a` or `x_i^a x_j^b`. Exponents are local to the group.
///
/// In invertible mode every `b` is 1 and each `j` appears as a second
/// variable at most once (Fermat, chain and loop shapes).
fn group_rows(rng: &mut ChaCha8Rng, weights: &[u64], degree: u64, invertible: bool) -> Option<Vec<Vec<u32>>> {
    let t = weights.len();
    let mut rows = Vec::with_capacity(t);
    let mut used = vec![false; t];
    for i in 0..t {
        let mut options: Vec<(Vec<u32>, Option<usize>)> = Vec::new();
        for a in 2..=MAX_EXP {
            let own = u64::from(a) * weights[i];
            if own == degree {
                let mut r = vec![0; t];
                r[i] = a;
                options.push((r, None));
            }
            if own >= degree {
                continue;
            }
            let rest = degree - own;
            for j in (0..t).filter(|&j| j != i && !(invertible && used[j])) {
                let ok = if invertible { rest == weights[j] } else { rest.is_multiple_of(weights[j]) && rest / weights[j] <= u64::from(MAX_EXP) };
                if ok {
                    let mut r = vec![0; t];
                    r[i] = a;
                    r[j] = (rest / weights[j]) as u32;
                    options.push((r, Some(j)));
                }
            }
        }
        let (row, second) = options.choose(rng)?.clone();
        if let Some(j) = second {
            used[j] = true;
        }
        rows.push(row);
    }
    Some(rows)
}

fn place(local: &[u32], offset: usize, n: usize) -> Vec<u32> {
    let mut v = vec![0; n];
    v[offset..offset + local.len()].copy_from_slice(local);
    v
}

fn distinct(rows: &[Vec<u32>]) -> bool {
    rows.iter().enumerate().all(|(i, r)| !rows[..i].contains(r))
}

fn candidate(rng: &mut ChaCha8Rng, k: usize) -> Option<CiSpec> {
    let invertible = rng.gen_bool(0.7);
    if k == 1 {
        let n = rng.gen_range(2..=MAX_N);
        let degree = rng.gen_range(n as u64..=42);
        let g = composition(rng, degree, n, degree.div_ceil(u64::from(MAX_EXP)))?;
        let rows = group_rows(rng, &g, degree, invertible)?;
        if !distinct(&rows) {
            return None;
        }
        Some(CiSpec {
            n,
            k: 1,
            blocks: vec![Block { exponents: rows, index_set: (1..=n).collect() }],
            weights: None,
        })
    } else {
        let n = rng.gen_range(4..=MAX_N);
        let t1 = rng.gen_range(2..=n - 2);
        let t2 = n - t1;
        // second group: its whole weight is carried by the second index set
        let d2 = rng.gen_range(t2 as u64..=30);
        let g2 = composition(rng, d2, t2, d2.div_ceil(u64::from(MAX_EXP)))?;
        let rows2 = group_rows(rng, &g2, d2, invertible)?;
        // first group: variables moved to the second index set carry block 2's charge
        let total1 = rng.gen_range(t1 as u64 + 1..=30);
        let g1 = composition(rng, total1, t1, 1)?;
        let moved: Vec<usize> = (0..t1).filter(|_| rng.gen_bool(0.3)).collect();
        if moved.len() == t1 {
            return None;
        }
        let d21: u64 = moved.iter().map(|&i| g1[i]).sum();
        let d11 = total1 - d21;
        let rows1 = group_rows(rng, &g1, d11, invertible)?;
        let mut block2 = Vec::with_capacity(t2);
        for r in &rows2 {
            let mut full = place(r, t1, n);
            if d21 > 0 {
                let choices: Vec<usize> = (0..t1).filter(|&j| d21.is_multiple_of(g1[j]) && d21 / g1[j] <= u64::from(MAX_EXP)).collect();
                let &j = choices.choose(rng)?;
                full[j] = (d21 / g1[j]) as u32;
            }
            block2.push(full);
        }
        let block1: Vec<Vec<u32>> = rows1.iter().map(|r| place(r, 0, n)).collect();
        if !distinct(&block1) || !distinct(&block2) {
            return None;
        }
        let first: Vec<usize> = (0..t1).filter(|i| !moved.contains(i)).map(|i| i + 1).collect();
        let second: Vec<usize> = moved.iter().map(|i| i + 1).chain(t1 + 1..=n).collect();
        Some(CiSpec {
            n,
            k: 2,
            blocks: vec![Block { exponents: block1, index_set: first }, Block { exponents: block2, index_set: second }],
            weights: None,
        })
    }
}

/// Draws until `per_k` distinct valid systems with k = 1 and with
/// k = 2 are found, or the attempts run out.
pub fn random_valid_specs(rng: &mut ChaCha8Rng, per_k: usize, max_attempts: usize) -> Vec<CiSpec> {
    let mut out: Vec<CiSpec> = Vec::with_capacity(2 * per_k);
    for k in 1..=2 {
        let mut found = 0;
        for _ in 0..max_attempts {
            if found >= per_k {
                break;
            }
            if let Some(spec) = candidate(rng, k) {
                if !out.contains(&spec) && validate(&spec).valid {
                    out.push(spec);
                    found += 1;
                }
            }
        }
    }
    out
}

pub fn load_fixture(name: &str) -> CiSpec {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"));
    CiSpec::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}
