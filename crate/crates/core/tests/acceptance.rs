//! Acceptance run: one line per criterion, non-zero exit if any fails.

mod common;

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bratteli::dimension_group::{k0_presentation, stationary_invariants};
use bratteli::equivalence::{
    find_intertwining, supernatural_invariant, verify_intertwining, SearchOutcome,
};
use bratteli::generators::{gicar, golden_mean, odometer, pascal, stationary, uhf, Generator};
use bratteli::io::{parse_bd, serialize_bd, DiagramDocument};
use bratteli::quadratic::Quadratic;
use bratteli::simplicity::{simplicity, SimplicityVerdict};
use bratteli::towers::{dynkin, graph_norm, jones_index, DynkinType};
use bratteli::vershik::{OrderedBratteliDiagram, StationaryMeasure};
use bratteli::{BratteliDiagram, Matrix};
use common::*;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use rand::Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    check(t < limit, || format!("took {:.2?}, limit {:.0?}", t, limit))
}

fn gicar_dimensions() -> Outcome {
    let start = Instant::now();
    let d = gicar(30).map_err(|e| e.to_string())?;
    for n in 0..=30 {
        let dims = d.dims(n).map_err(|e| e.to_string())?.values;
        check(dims == binomial_row(n), || format!("level {n}: {dims:?}"))?;
    }
    let row4: Vec<u32> = d
        .dims(4)
        .unwrap()
        .values
        .iter()
        .map(|x| x.try_into().unwrap())
        .collect();
    check(row4 == [1, 4, 6, 4, 1], || format!("level 4 is {row4:?}"))?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("levels 0..=30 binomial, level 4 = {row4:?}"))
}

/// Summands of the target algebra of each connecting map, written as the
/// list of source summands along its block diagonal.
const PHI_BLOCKS: [&[&[usize]]; 4] = [
    &[&[0], &[0]],
    &[&[0], &[0, 1], &[1]],
    &[&[0], &[0, 1], &[1, 2], &[2]],
    &[&[0], &[0, 1], &[1, 2], &[2, 3], &[3]],
];

fn gicar_connecting_maps() -> Outcome {
    let d = gicar(4).map_err(|e| e.to_string())?;
    for (n, blocks) in PHI_BLOCKS.iter().enumerate() {
        let cols = n + 1;
        let rows: Vec<Vec<u64>> = blocks
            .iter()
            .map(|b| (0..cols).map(|i| b.iter().filter(|&&s| s == i).count() as u64).collect())
            .collect();
        let expected = Matrix::from_rows(&rows).unwrap();
        let got = d.step_matrix(n).map_err(|e| e.to_string())?;
        check(*got == expected, || format!("step {n}: {got} vs {expected}"))?;
        // block sizes must add up to the next level's summand sizes
        let src = d.dims(n).unwrap().values;
        let sizes: Vec<BigUint> = blocks
            .iter()
            .map(|b| b.iter().map(|&s| src[s].clone()).sum())
            .collect();
        check(sizes == d.dims(n + 1).unwrap().values, || format!("block sizes at step {n}"))?;
    }
    Ok("steps 0..=3 match the block embeddings".into())
}

fn telescoping_invariance() -> Outcome {
    let start = Instant::now();
    let mut r = rng(3);
    for case in 0..1000 {
        let d = random_diagram(&mut r, 6, 5, 4, false);
        let keep = random_keep(&mut r, d.last_level());
        let t = d.telescope(&keep).map_err(|e| e.to_string())?;
        for (i, &l) in keep.iter().enumerate() {
            check(t.dims(i).unwrap().values == d.dims(l).unwrap().values, || {
                format!("case {case}: kept level {l}")
            })?;
        }
    }
    within(start, Duration::from_secs(10))?;
    Ok("1000 random diagrams".into())
}

fn odometer_oracle() -> Outcome {
    let start = Instant::now();
    let mut checked = 0u64;
    for base in [2u64, 3, 5] {
        let od = OrderedBratteliDiagram::default_order(&odometer(base).unwrap());
        let mut depth = 1;
        while base.pow(depth as u32) <= 4096 {
            let size = base.pow(depth as u32);
            for v in 0..size {
                let next = od
                    .successor(&odometer_path(v, base, depth))
                    .map_err(|e| e.to_string())?;
                check(odometer_value(&next, base) == (v + 1) % size, || {
                    format!("base {base} depth {depth}: successor of {v}")
                })?;
                checked += 1;
            }
            let first = od.min_path(depth).unwrap();
            let orbit = od.orbit(&first, size as usize).unwrap();
            let distinct: HashSet<_> = orbit[..size as usize].iter().collect();
            check(distinct.len() == size as usize && orbit[size as usize] == first, || {
                format!("base {base} depth {depth}: orbit is not one {size}-cycle")
            })?;
            depth += 1;
        }
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!("{checked} paths, single cycles"))
}

fn found_and_verified(a: &BratteliDiagram, b: &BratteliDiagram, bound: usize) -> Result<(), String> {
    match find_intertwining(a, b, bound).map_err(|e| e.to_string())? {
        SearchOutcome::Found(w) => check(verify_intertwining(a, b, &w).unwrap_or(false), || {
            "witness fails verification".into()
        }),
        SearchOutcome::NotFoundWithinBound => Err("no witness within bound".into()),
    }
}

fn equivalence_controls() -> Outcome {
    let mut r = rng(5);
    for case in 0..100 {
        let d = random_diagram(&mut r, 6, 4, 3, false);
        let mut keep = random_keep(&mut r, d.last_level());
        if *keep.last().unwrap() != d.last_level() {
            keep.push(d.last_level());
        }
        let t = d.telescope(&keep).unwrap();
        found_and_verified(&d, &t, 4).map_err(|e| format!("(a) case {case} {keep:?}: {e}"))?;
    }
    let alternating = uhf(&[2, 3, 2, 3, 2, 3], false).unwrap();
    let six = uhf(&[6, 6, 6], false).unwrap();
    found_and_verified(&alternating, &six, 4).map_err(|e| format!("(b) {e}"))?;

    let (two, three) = (odometer(2).unwrap(), odometer(3).unwrap());
    let s2 = supernatural_invariant(&two).unwrap();
    let s3 = supernatural_invariant(&three).unwrap();
    let reason = format!("supernatural invariants differ: {s2} vs {s3}");
    check(s2 != s3 && reason.ends_with("{2:∞} vs {3:∞}"), || format!("(c) {reason}"))?;
    let outcome = find_intertwining(&two, &three, 8).unwrap();
    check(outcome == SearchOutcome::NotFoundWithinBound, || format!("(c) {outcome:?}"))?;
    Ok(format!("(a) 100 telescopes found, (b) found, (c) {reason}"))
}

fn stationary_invariants_golden() -> Outcome {
    let d = golden_mean();
    let report = stationary_invariants(&k0_presentation(&d).unwrap(), 1e-13);
    let poly: Vec<BigInt> = [1, -1, -1].into_iter().map(BigInt::from).collect();
    check(report.char_poly == poly, || format!("char poly {:?}", report.char_poly))?;
    check(report.determinant == BigInt::from(-1), || format!("det {}", report.determinant))?;
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let err = (report.perron_value() - phi).abs();
    check(err < 1e-12, || format!("Perron off by {err:e}"))?;

    let half = BigRational::new(1.into(), 2.into());
    let phi_exact = Quadratic::new(half.clone(), half, 5.into());
    let inv = phi_exact.recip();
    let inv2 = &inv * &inv;
    let m = StationaryMeasure::new(&d).map_err(|e| e.to_string())?;
    let c0 = m.cylinder(1, 0).unwrap().exact.ok_or("measure not exact")?;
    let c1 = m.cylinder(1, 1).unwrap().exact.ok_or("measure not exact")?;
    check(c0 == inv && c1 == inv2, || format!("cylinders {c0}, {c1}"))?;
    check(&c0 + &c1 == Quadratic::from_int(1), || "cylinders do not sum to 1".into())?;
    Ok(format!("x^2 - x - 1, det -1, cylinders {c0} and {c1}"))
}

fn dynkin_norms() -> Outcome {
    let tol = 1e-13;
    for rank in 2..=11 {
        let idx = jones_index(&dynkin(DynkinType::A, rank).unwrap(), tol);
        let expected = 4.0 * (std::f64::consts::PI / (rank as f64 + 1.0)).cos().powi(2);
        check((idx - expected).abs() < 1e-9, || format!("A{rank}: {idx} vs {expected}"))?;
    }
    let e8 = jones_index(&dynkin(DynkinType::E, 8).unwrap(), tol);
    let e8_expected = 4.0 * (std::f64::consts::PI / 30.0).cos().powi(2);
    check((e8 - e8_expected).abs() < 1e-9, || format!("E8: {e8}"))?;
    let mut all = Vec::new();
    all.extend((2..=11).map(|r| (DynkinType::A, r)));
    all.extend((4..=11).map(|r| (DynkinType::D, r)));
    all.extend((6..=8).map(|r| (DynkinType::E, r)));
    for (kind, rank) in all {
        let idx = jones_index(&dynkin(kind, rank).unwrap(), tol);
        check(idx < 4.0, || format!("{kind}{rank} index {idx}"))?;
    }
    for n in 4..=8 {
        let d = graph_norm(&dynkin(DynkinType::D, n).unwrap(), tol);
        let a = graph_norm(&dynkin(DynkinType::A, 2 * n - 3).unwrap(), tol);
        check((d - a).abs() < 1e-9, || format!("D{n} {d} vs A{} {a}", 2 * n - 3))?;
    }
    Ok(format!("E8 index {e8:.10}"))
}

fn support(m: &[Vec<u64>]) -> Vec<Vec<u64>> {
    m.iter().map(|r| r.iter().map(|&x| u64::from(x > 0)).collect()).collect()
}

/// Primitivity by boolean powers up to Wielandt's exponent.
fn primitive_oracle(a: &[Vec<u64>]) -> bool {
    let k = a.len();
    let s = support(a);
    let mut p = s.clone();
    for _ in 1..(k * k + 2 - 2 * k) {
        p = support(&mul_u64(&p, &s));
    }
    p.iter().flatten().all(|&x| x > 0)
}

/// The vertex set, pushed forward through the tail, revisits a state without
/// ever filling a whole level.
fn certificate_oracle(d: &BratteliDiagram, level: usize, vertices: &[usize]) -> bool {
    let Some(t) = d.tail_start() else { return false };
    let k = d.level_size(level).unwrap();
    let mut set: Vec<u64> = (0..k).map(|v| u64::from(vertices.contains(&v))).collect();
    let mut seen = HashSet::new();
    let mut n = level;
    loop {
        if set.iter().all(|&x| x > 0) && n > level {
            return false;
        }
        if n >= t && !seen.insert(set.clone()) {
            return true;
        }
        let m = to_rows(d.step_matrix(n).unwrap());
        let col: Vec<Vec<u64>> = set.iter().map(|&x| vec![x]).collect();
        set = support(&mul_u64(&m, &col)).into_iter().map(|r| r[0]).collect();
        n += 1;
    }
}

fn with_ones_prefix(tail: Vec<Vec<u64>>) -> BratteliDiagram {
    let k = tail.len();
    let ones = Matrix::from_rows(&vec![vec![1u64]; k]).unwrap();
    stationary(&[ones], Matrix::from_rows(&tail).unwrap()).unwrap()
}

fn simplicity_verdicts() -> Outcome {
    let mut r = rng(8);
    let mut primitive = vec![vec![vec![1, 1], vec![1, 0]], vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 0]]];
    for _ in 0..50 {
        let k = r.gen_range(1..=4);
        let m = random_matrix(&mut r, k, k, 2);
        if primitive_oracle(&m) {
            primitive.push(m);
        }
    }
    for tail in &primitive {
        check(primitive_oracle(tail), || format!("{tail:?} not primitive"))?;
        let v = simplicity(&with_ones_prefix(tail.clone()), 10);
        check(v == SimplicityVerdict::Simple, || format!("{tail:?}: {v:?}"))?;
    }

    let mut blocks = 0;
    for _ in 0..30 {
        let (k1, k2) = (r.gen_range(1..=3), r.gen_range(1..=3));
        let k = k1 + k2;
        let mut tail = vec![vec![0u64; k]; k];
        for i in 0..k {
            for j in 0..k {
                if (i < k1) == (j < k1) {
                    tail[i][j] = r.gen_range(1..=3);
                }
            }
        }
        let d = with_ones_prefix(tail.clone());
        match simplicity(&d, 10) {
            SimplicityVerdict::NotSimple(cert) => {
                check(certificate_oracle(&d, cert.level, &cert.vertices), || {
                    format!("{tail:?}: certificate {cert:?} rejected")
                })?;
            }
            v => return Err(format!("{tail:?}: {v:?}")),
        }
        blocks += 1;
    }

    let g = simplicity(&gicar(20).unwrap(), 20);
    check(matches!(g, SimplicityVerdict::UnknownAtBound(_)), || format!("gicar: {g:?}"))?;
    Ok(format!(
        "{} primitive tails simple, {blocks} block-diagonal certificates verified, gicar {g:?}",
        primitive.len()
    ))
}

fn round_trip() -> Outcome {
    let specs = [
        "gen:pascal:1", "gen:pascal:8", "gen:gicar:4", "gen:gicar:12", "gen:uhf:2", "gen:uhf:2,3,5",
        "gen:odometer:3", "gen:golden", "gen:dynkin:A:5:8", "gen:dynkin:D:6:9", "gen:dynkin:E:8:12",
    ];
    let mut docs: Vec<DiagramDocument> = specs
        .iter()
        .map(|s| DiagramDocument::new(s.parse::<Generator>().unwrap().build().unwrap()))
        .collect();
    docs.push(DiagramDocument::new(pascal(20).unwrap()));
    docs.push(DiagramDocument::new(uhf(&[2, 3], true).unwrap()));
    let mut r = rng(9);
    docs.extend((0..500).map(|_| random_document(&mut r)));
    for (i, doc) in docs.iter().enumerate() {
        let text = serialize_bd(doc);
        let back = parse_bd(&text).map_err(|e| format!("document {i}: {e}"))?;
        check(back == *doc, || format!("document {i} changed"))?;
        check(serialize_bd(&back) == text && serialize_bd(doc) == text, || {
            format!("document {i} not byte-stable")
        })?;
    }
    Ok(format!("{} documents", docs.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("GICAR/Pascal dimensions", gicar_dimensions),
        ("GICAR connecting maps", gicar_connecting_maps),
        ("telescoping invariance", telescoping_invariance),
        ("Vershik odometer oracle", odometer_oracle),
        ("equivalence controls", equivalence_controls),
        ("stationary invariants", stationary_invariants_golden),
        ("Dynkin norms", dynkin_norms),
        ("simplicity verdicts", simplicity_verdicts),
        ("round-trip serialization", round_trip),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = f();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS  {name} ({secs:.2} s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({secs:.2} s): {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
