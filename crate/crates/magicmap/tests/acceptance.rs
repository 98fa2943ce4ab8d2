//! Acceptance suite: one test per shipped guarantee, each ending in a
//! single PASS line. Oracles here are written independently of the
//! library internals (direct SoP evaluation, breadth-first search, full
//! permutation enumeration).

use std::collections::{BTreeMap, VecDeque};
use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use magicmap::alignment::{alignment_score, exact_align, greedy_align, InputMatrix};
use magicmap::driver::{format_sweep_table, sweep, DriverError, EXIT_UNMAPPABLE};
use magicmap::fabric::{
    read_outputs, run_stream, Crossbar, InstrClass, Instruction, StreamBuilder, WriteValue,
};
use magicmap::netlist::{CubeMark, SopCover};
use magicmap::non::{evaluate_non, sop_to_non};
use magicmap::occupancy::{CellState, Coord, Occupancy};
use magicmap::routing::{astar_copy, Parity, RouteError};
use magicmap::verify::{adp, improvement_ratio};
use magicmap::{
    build_lut_graph, map_benchmark, map_graph, parse_blif, AlignChoice, MapParams, Netlist,
    RunConfig, VerifyMode,
};

fn bench(name: &str) -> Netlist {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("benchmarks")
        .join(name);
    parse_blif(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const MAPPABLE: [&str; 6] = [
    "cm151a.blif",
    "majority3.blif",
    "full_adder.blif",
    "parity4.blif",
    "cmp2.blif",
    "dec2to4.blif",
];

/// 1. One thousand random covers (up to 8 variables, up to 8 product
/// terms) agree with their NOR-of-NORs form on every assignment.
#[test]
fn non_form_matches_random_covers_exhaustively() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..1000 {
        let n_vars = rng.gen_range(1..=8usize);
        let vars: Vec<String> = (0..n_vars).map(|i| format!("v{}", i)).collect();
        let n_cubes = rng.gen_range(1..=8usize);
        // an all-don't-care cube would denote a constant cover, which is
        // folded before NoN conversion, so force one bound literal
        let cubes: Vec<Vec<CubeMark>> = (0..n_cubes)
            .map(|_| {
                let mut cube: Vec<CubeMark> = (0..n_vars)
                    .map(|_| match rng.gen_range(0..3) {
                        0 => CubeMark::Zero,
                        1 => CubeMark::One,
                        _ => CubeMark::DontCare,
                    })
                    .collect();
                let pin = rng.gen_range(0..n_vars);
                if cube.iter().all(|&m| m == CubeMark::DontCare) {
                    cube[pin] = if rng.gen_bool(0.5) { CubeMark::One } else { CubeMark::Zero };
                }
                cube
            })
            .collect();
        let cover = SopCover::new(vars.clone(), cubes);
        let non = sop_to_non(&cover).unwrap();
        for bits in 0..1u32 << n_vars {
            let assignment: BTreeMap<String, bool> = vars
                .iter()
                .enumerate()
                .map(|(i, v)| (v.clone(), bits >> i & 1 == 1))
                .collect();
            let direct = cover.eval_with(|s| assignment[s]);
            assert_eq!(evaluate_non(&non, &assignment).unwrap(), direct);
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 30, "took {:?}", elapsed);
    println!("PASS 1/10: 1000 random covers match their NOR-of-NORs form ({:?})", elapsed);
}

/// 2. The worked single-LUT mapping: the flipped literal matrix renders
/// as 0 1 - / 1 0 0, and a hand-built stream computes F at M(3,2) while
/// leaving the written literal cells untouched.
#[test]
fn worked_single_lut_mapping() {
    let nl = parse_blif(
        ".model f\n.inputs a b c\n.outputs F\n.names a b c F\n10- 1\n011 1\n.end",
    )
    .unwrap();
    let non = sop_to_non(nl.node("F").unwrap()).unwrap();
    let text = non.to_string();
    assert!(text.contains("0 1 -"), "matrix was:\n{}", text);
    assert!(text.contains("1 0 0"), "matrix was:\n{}", text);

    let pi = |name: &str, negated: bool| WriteValue::Pi {
        name: name.to_string(),
        negated,
    };
    let mut b = StreamBuilder::new();
    let writes = [
        (1, 1, pi("a", true)),
        (1, 2, pi("b", false)),
        (2, 1, pi("a", false)),
        (2, 2, pi("b", true)),
        (2, 3, pi("c", true)),
    ];
    for (r, c, value) in writes.clone() {
        b.push(InstrClass::Write, Instruction::Write { r, c, value });
    }
    b.push(
        InstrClass::Compute,
        Instruction::Hnor {
            rows: [1, 2].into(),
            src_cols: [1, 2, 3].into(),
            dst_col: 4,
        },
    );
    b.push(
        InstrClass::Compute,
        Instruction::Vnor { col: 4, src_rows: [1, 2].into(), dst_row: 3 },
    );
    b.push(InstrClass::Compute, Instruction::Not { src: (3, 4), dst: (3, 2) });
    let stream = b.finish(4, 4, vec![("F".to_string(), 3, 2)]);

    for bits in 0..8u32 {
        let (a, bb, c) = (bits & 4 != 0, bits & 2 != 0, bits & 1 != 0);
        let assignment: BTreeMap<String, bool> = [("a", a), ("b", bb), ("c", c)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        let (after, _) = run_stream(Crossbar::pristine(4, 4), &stream, &assignment).unwrap();
        let f = read_outputs(&after, &stream).unwrap()["F"];
        assert_eq!(f, (a && !bb) || (!a && bb && c), "bits={:b}", bits);
        // the literal cells still hold exactly what was written
        for (r, c, value) in writes.clone() {
            let expect = match &value {
                WriteValue::Pi { name, negated } => assignment[name.as_str()] != *negated,
                WriteValue::Const(v) => *v,
            };
            assert_eq!(after.cell(r, c).unwrap().value, Some(expect));
        }
    }
    println!("PASS 2/10: worked single-LUT stream computes F at M(3,2), sources intact");
}

/// Breadth-first oracle over (cell, hop-parity) states with the same
/// hop relation: any free cell in the source's row or column, the
/// destination always allowed.
fn bfs_min_hops(occ: &Occupancy, src: Coord, dst: Coord, want_odd: bool) -> Option<usize> {
    let mut dist: BTreeMap<(Coord, bool), usize> = BTreeMap::new();
    let mut queue = VecDeque::new();
    dist.insert((src, false), 0);
    queue.push_back((src, false));
    while let Some((at, odd)) = queue.pop_front() {
        let d = dist[&(at, odd)];
        if at == dst && odd == want_odd {
            return Some(d);
        }
        let mut neighbors: Vec<Coord> = Vec::new();
        for r in 1..=occ.rows() {
            if r != at.0 {
                neighbors.push((r, at.1));
            }
        }
        for c in 1..=occ.cols() {
            if c != at.1 {
                neighbors.push((at.0, c));
            }
        }
        for n in neighbors {
            if n != dst && !occ.is_free(n) {
                continue;
            }
            if !dist.contains_key(&(n, !odd)) {
                dist.insert((n, !odd), d + 1);
                queue.push_back((n, !odd));
            }
        }
    }
    None
}

/// 3. A* routing agrees with a breadth-first oracle on 500 random boards
/// of sizes 8, 16, and 32: same reachability, same hop count.
#[test]
fn routing_matches_bfs_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for trial in 0..500 {
        let size = [8u32, 16, 32][trial % 3];
        let mut occ = Occupancy::new(size, size);
        for r in 1..=size {
            for c in 1..=size {
                if rng.gen_bool(0.3) {
                    occ.set((r, c), CellState::Dead);
                }
            }
        }
        let cell = |rng: &mut ChaCha8Rng| (rng.gen_range(1..=size), rng.gen_range(1..=size));
        let src = cell(&mut rng);
        let mut dst = cell(&mut rng);
        while dst == src {
            dst = cell(&mut rng);
        }
        let want_odd = rng.gen_bool(0.5);
        let parity = if want_odd { Parity::Odd } else { Parity::Even };
        let oracle = bfs_min_hops(&occ, src, dst, want_odd);
        match astar_copy(&occ, src, dst, parity) {
            Ok(path) => {
                assert_eq!(Some(path.hops()), oracle, "trial {}", trial);
                assert_eq!(path.parity_is_odd(), want_odd);
            }
            Err(RouteError::NoPath(..)) => {
                assert_eq!(oracle, None, "trial {}: A* missed a path", trial)
            }
            Err(e) => panic!("trial {}: {}", trial, e),
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "took {:?}", elapsed);
    println!("PASS 3/10: A* matches the BFS oracle on 500 random boards ({:?})", elapsed);
}

/// 4. Forcing odd hop parity costs exactly one detour hop on an open
/// board: M(3,4) to M(2,1) is 2 hops even, 3 hops odd.
#[test]
fn odd_parity_costs_one_detour() {
    let occ = Occupancy::new(8, 8);
    let even = astar_copy(&occ, (3, 4), (2, 1), Parity::Even).unwrap();
    let odd = astar_copy(&occ, (3, 4), (2, 1), Parity::Odd).unwrap();
    assert_eq!(even.hops(), 2);
    assert!(!even.parity_is_odd());
    assert_eq!(odd.hops(), 3);
    assert!(odd.parity_is_odd());
    println!("PASS 4/10: odd-parity route M(3,4)->M(2,1) takes 3 hops, even takes 2");
}

fn all_permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in all_permutations(k - 1) {
        for slot in 0..=p.len() {
            let mut q = p.clone();
            q.insert(slot, k - 1);
            out.push(q);
        }
    }
    out
}

/// 5. Alignment quality: the worked three-LUT fixture reaches score 5,
/// greedy never scores below the unaligned input, and exhaustive
/// alignment matches full permutation enumeration on small groups.
#[test]
fn alignment_quality() {
    let fixture = InputMatrix::from_names(&[
        &["a", "b", "c", "d"],
        &["b", "c", "e", "a"],
        &["h", "a", "g", "x"],
    ]);
    let aligned = greedy_align(&fixture);
    assert_eq!(alignment_score(&aligned), 5);
    for r in 0..3 {
        assert_eq!(aligned.rows[r][0].as_deref(), Some("a"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let pool = ["p", "q", "r", "s", "t"];
    for trial in 0..200 {
        let n_rows = rng.gen_range(2..=3usize);
        let width = rng.gen_range(2..=3usize);
        let rows: Vec<Vec<Option<String>>> = (0..n_rows)
            .map(|_| {
                let mut names: Vec<&str> = pool.to_vec();
                (0..width)
                    .map(|_| Some(names.remove(rng.gen_range(0..names.len())).to_string()))
                    .collect()
            })
            .collect();
        let m = InputMatrix::new(rows).unwrap();
        let base = alignment_score(&m);
        let greedy = alignment_score(&greedy_align(&m));
        assert!(greedy >= base, "trial {}: greedy {} < original {}", trial, greedy, base);

        // oracle: permute every row independently and take the best score
        let perms = all_permutations(width);
        let mut best = 0;
        let mut stack = vec![(0usize, m.clone())];
        while let Some((row, cur)) = stack.pop() {
            if row == n_rows {
                best = best.max(alignment_score(&cur));
                continue;
            }
            for perm in &perms {
                let mut next = cur.clone();
                next.rows[row] = perm.iter().map(|&j| m.rows[row][j].clone()).collect();
                stack.push((row + 1, next));
            }
        }
        let exact = alignment_score(&exact_align(&m).unwrap());
        assert_eq!(exact, best, "trial {}: exact {} vs oracle {}", trial, exact, best);
        assert!(exact >= greedy, "trial {}", trial);
    }
    println!("PASS 5/10: alignment fixture scores 5; exact matches enumeration on 200 groups");
}

/// 6. With zero spacing, the cells claimed by every group equal the
/// footprint formula sum (p_i + 1) x (k_eff + 1) over its members.
#[test]
fn footprint_accounting_is_exact() {
    for name in MAPPABLE {
        let nl = bench(name);
        let graph = build_lut_graph(&nl, 4).unwrap();
        for dim in [8u32, 32] {
            let params = MapParams {
                rows: dim,
                cols: dim,
                spacing: 0,
                align: AlignChoice::Greedy,
            };
            let mapping = match map_graph(&graph, &params) {
                Ok(m) => m,
                Err(_) => continue,
            };
            assert!(!mapping.groups.is_empty());
            for g in &mapping.groups {
                assert_eq!(
                    g.claimed_cells, g.expected_cells,
                    "{} at {}x{}: group {:?}",
                    name, dim, dim, g.members
                );
            }
        }
    }
    println!("PASS 6/10: claimed cells equal the footprint formula on every benchmark");
}

/// 7. Full parameter sweep over the benchmark set: every mapped
/// combination verifies, every benchmark maps at every k somewhere, the
/// 32x32 board at zero spacing always works, and the 8-to-1 selector
/// fits an 8x8 board in at most 142 cycles.
#[test]
fn sweep_maps_and_verifies() {
    let start = Instant::now();
    let dims = [8u32, 16, 32];
    let ks = [2usize, 3, 4];
    let spacings = [0u32, 2, 4, 6];
    for name in MAPPABLE {
        let nl = bench(name);
        for &k in &ks {
            let rows = sweep(
                &nl,
                name,
                &dims,
                &dims,
                &[k],
                &spacings,
                AlignChoice::Greedy,
                VerifyMode::Random { n: 128, seed: 11 },
            );
            let mut mapped_any = false;
            for row in &rows {
                if let Ok(o) = &row.outcome {
                    mapped_any = true;
                    assert_eq!(
                        o.report.verification.status, "PASS",
                        "{} k={} {}x{} s={}",
                        name, k, row.rows, row.cols, row.spacing
                    );
                }
                if row.rows == 32 && row.cols == 32 && row.spacing == 0 {
                    assert!(
                        row.outcome.is_ok(),
                        "{} k={} failed on 32x32 s=0: {:?}",
                        name,
                        k,
                        row.outcome.as_ref().err()
                    );
                }
            }
            assert!(mapped_any, "{} never mapped at k={}", name, k);
        }
    }

    // the selector benchmark on the small board, verified exhaustively
    let outcome = map_benchmark(
        &bench("cm151a.blif"),
        &RunConfig {
            benchmark: "cm151a".to_string(),
            rows: 8,
            cols: 8,
            k: 4,
            spacing: 0,
            align: AlignChoice::Greedy,
            verify: VerifyMode::Exhaustive,
        },
    )
    .unwrap();
    assert_eq!(outcome.report.verification.status, "PASS");
    assert!(
        outcome.report.cycles <= 142,
        "cm151a took {} cycles on 8x8",
        outcome.report.cycles
    );

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 300, "took {:?}", elapsed);
    println!(
        "PASS 7/10: sweep verified across {} benchmarks x 3 k x 9 boards x 4 spacings; \
         cm151a at {} cycles on 8x8 ({:?})",
        MAPPABLE.len(),
        outcome.report.cycles,
        elapsed
    );
}

/// 8. Metric arithmetic is exact: ADP is rows x cols x cycles with no
/// rounding, and improvement ratios are reduced integer fractions.
#[test]
fn metrics_are_exact() {
    assert_eq!(adp(64, 64, 797), 3_264_512);
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for _ in 0..100 {
        let (r, c, cy) = (rng.gen_range(1..=256u32), rng.gen_range(1..=256u32), rng.gen_range(1..=10_000u64));
        assert_eq!(adp(r, c, cy), r as u64 * c as u64 * cy);
    }
    // a 20x12 board at 824 cycles against a 146x9 board at 349 cycles
    let ours = adp(20, 12, 824);
    let other = adp(146, 9, 349);
    let (num, den) = improvement_ratio(other, ours);
    assert_eq!(num as u128 * ours as u128, den as u128 * other as u128);
    let gcd = {
        let (mut a, mut b) = (num, den);
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    assert_eq!(gcd, 1, "ratio {}/{} not reduced", num, den);
    println!("PASS 8/10: ADP and improvement ratios are exact integer arithmetic");
}

/// 9. The bundled flat 5-bit parity cover needs a 17-row footprint at
/// k=5 and is rejected as unmappable on a 16x16 crossbar.
#[test]
fn oversized_benchmark_is_unmappable() {
    let err = map_benchmark(
        &bench("parity5_flat.blif"),
        &RunConfig {
            benchmark: "parity5_flat".to_string(),
            rows: 16,
            cols: 16,
            k: 5,
            spacing: 0,
            align: AlignChoice::Greedy,
            verify: VerifyMode::Exhaustive,
        },
    )
    .unwrap_err();
    assert!(matches!(err, DriverError::Map(_)), "got {}", err);
    assert_eq!(err.exit_code(), EXIT_UNMAPPABLE);
    println!("PASS 9/10: flat 5-bit parity is reported unmappable on 16x16 at k=5");
}

/// 10. Reruns are byte-identical: the same sweep twice produces the
/// same table, and the same run twice the same instruction stream.
#[test]
fn reruns_are_byte_identical() {
    let nl = bench("cm151a.blif");
    let run_sweep = || {
        format_sweep_table(&sweep(
            &nl,
            "cm151a",
            &[8, 16, 32],
            &[8, 16, 32],
            &[3, 4],
            &[0, 2],
            AlignChoice::Greedy,
            VerifyMode::Random { n: 64, seed: 21 },
        ))
    };
    assert_eq!(run_sweep(), run_sweep());

    let cfg = RunConfig {
        benchmark: "cm151a".to_string(),
        rows: 8,
        cols: 8,
        k: 4,
        spacing: 0,
        align: AlignChoice::Greedy,
        verify: VerifyMode::Exhaustive,
    };
    let a = map_benchmark(&nl, &cfg).unwrap();
    let b = map_benchmark(&nl, &cfg).unwrap();
    assert_eq!(a.mapping.stream.to_text(), b.mapping.stream.to_text());
    assert_eq!(
        serde_json::to_string(&a.report).unwrap(),
        serde_json::to_string(&b.report).unwrap()
    );
    println!("PASS 10/10: sweeps and single runs are byte-identical across reruns");
}
