#![allow(dead_code)]

use bratteli::io::DiagramDocument;
use bratteli::vershik::{Edge, OrderedBratteliDiagram, PathWord};
use bratteli::{BratteliDiagram, Matrix};
use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random `rows × cols` matrix with entries in `0..=max_entry` and no zero row.
pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, max_entry: u64) -> Vec<Vec<u64>> {
    (0..rows)
        .map(|_| loop {
            let row: Vec<u64> = (0..cols).map(|_| rng.gen_range(0..=max_entry)).collect();
            if row.iter().any(|&x| x > 0) {
                break row;
            }
        })
        .collect()
}

/// Random diagram with at most `max_levels` stored levels. When `stationary`
/// is allowed, about half the outputs repeat a square last matrix.
pub fn random_diagram(
    rng: &mut impl Rng,
    max_levels: usize,
    max_size: usize,
    max_entry: u64,
    allow_stationary: bool,
) -> BratteliDiagram {
    let levels = rng.gen_range(2..=max_levels.max(2));
    let mut sizes = vec![1];
    for _ in 1..levels {
        sizes.push(rng.gen_range(1..=max_size));
    }
    let stationary = allow_stationary && rng.gen_bool(0.5);
    if stationary {
        let l = sizes.len();
        if l == 2 {
            sizes.push(sizes[1]);
        } else {
            sizes[l - 1] = sizes[l - 2];
        }
    }
    let raw: Vec<Vec<Vec<u64>>> = sizes
        .windows(2)
        .map(|w| random_matrix(rng, w[1], w[0], max_entry))
        .collect();
    BratteliDiagram::validate(&sizes, &raw, stationary).expect("random diagram is valid")
}

/// Sorted kept-level list starting at 0 with levels in `1..=last`.
pub fn random_keep(rng: &mut impl Rng, last: usize) -> Vec<usize> {
    let mut keep = vec![0];
    keep.extend((1..=last).filter(|_| rng.gen_bool(0.5)));
    if keep.len() == 1 {
        keep.push(rng.gen_range(1..=last.max(1)));
    }
    keep
}

/// Random permutation of every incoming-edge order.
pub fn random_order(rng: &mut impl Rng, d: &BratteliDiagram) -> OrderedBratteliDiagram {
    let mut orders = OrderedBratteliDiagram::default_order(d).orders().clone();
    for level in orders.iter_mut() {
        for order in level.iter_mut() {
            order.shuffle(rng);
        }
    }
    OrderedBratteliDiagram::new(d.clone(), orders).expect("permuted order is valid")
}

pub fn random_document(rng: &mut impl Rng) -> DiagramDocument {
    let d = random_diagram(rng, 6, 5, 4, true);
    let mut doc = if rng.gen_bool(0.5) {
        DiagramDocument::with_order(d.clone(), random_order(rng, &d))
    } else {
        DiagramDocument::new(d)
    };
    let words = ["pascal", "tail", "seed", "x=1", "a#b", "levels 3", "ü"];
    for _ in 0..rng.gen_range(0..3) {
        let n = rng.gen_range(1..4);
        let c: Vec<&str> = (0..n).map(|_| *words.choose(rng).unwrap()).collect();
        doc.comments.push(c.join(" "));
    }
    doc
}

/// `C(n, k)` for `k = 0..=n` by the multiplicative formula.
pub fn binomial_row(n: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::from(1u32)];
    for k in 1..=n {
        let prev = row[k - 1].clone();
        row.push(prev * BigUint::from(n + 1 - k) / BigUint::from(k));
    }
    row
}

/// Base-`b` value of an odometer path, first edge least significant.
pub fn odometer_value(path: &PathWord, base: u64) -> u64 {
    path.edges
        .iter()
        .rev()
        .fold(0, |acc, e| acc * base + u64::from(e.copy - 1))
}

pub fn odometer_path(value: u64, base: u64, depth: usize) -> PathWord {
    let mut v = value;
    let edges = (0..depth)
        .map(|_| {
            let digit = v % base;
            v /= base;
            Edge {
                source: 0,
                copy: digit as u32 + 1,
            }
        })
        .collect();
    PathWord { edges, end: 0 }
}

/// Plain `u64` matrix product, independent of the library's big-integer code.
pub fn mul_u64(a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn to_rows(m: &Matrix) -> Vec<Vec<u64>> {
    m.to_u64_rows().expect("small entries")
}
