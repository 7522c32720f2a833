//! Acceptance suite: one test per shipping criterion, each printing a
//! PASS line (visible with `cargo test -- --nocapture`). Tolerances are
//! pinned in the constants below.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use scpr_core::engine::{
    conc_transition, seq_transition, Action, ConcSpace, SeqSpace, StateClass, Variant,
};
use scpr_core::fixture;
use scpr_core::instances::{
    connected_graphs, random_connected_graph, random_markov, random_oblivious,
    random_state_deterministic,
};
use scpr_core::matrix_game::MatrixGame;
use scpr_core::rng::SplitMix64;
use scpr_core::simulate::{estimate_concurrent_value, estimate_sequential_value};
use scpr_core::solver::{
    certify_epsilon, oblivious_capture_times, solve_concurrent, solve_oblivious_concurrent,
    solve_sequential, state_matrix_game, verify_pure_minimax,
};
use scpr_core::{ConcState, Graph, RobberStrategy, SeqState, SolveParams, SolveReport};

const VALUE_TOL: f64 = 1e-9;
const CONC_VALUE_TOL: f64 = 1e-8;
const DUALITY_GAP_TOL: f64 = 2e-9;
const EQUIVARIANCE_TOL: f64 = 5e-9;
const EPSILON_BUDGET: f64 = 1e-9; // 10 * default tol

fn pass(criterion: &str, detail: String, elapsed: Duration) {
    println!("criterion {criterion}: PASS ({detail}; {elapsed:.2?})");
}

#[test]
fn criterion_01_fixture_reproduction() {
    let t0 = Instant::now();
    let fx = fixture::counterexample();
    let params = SolveParams::default();
    let report = solve_concurrent(&fx.graph, &fx.robber, &params);
    let space = ConcSpace::new(&fx.graph);
    let start = ConcState::position(fx.start.0, fx.start.1, fx.start.2);

    // One-turn game at the start under the converged values, presented with
    // rows {2, 3} and columns {6, 5}: exactly the identity matrix.
    let sg = state_matrix_game(&fx.graph, &fx.robber, report.values.as_slice(), start)
        .expect("ordinary state");
    let ordered: Vec<Vec<f64>> = fx
        .row_moves
        .iter()
        .map(|&a1| {
            fx.col_moves
                .iter()
                .map(|&a2| sg.entry(a1, a2).expect("legal moves"))
                .collect()
        })
        .collect();
    assert_eq!(ordered, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);

    let solution = MatrixGame::new(ordered).unwrap().solve();
    assert!((solution.value - 0.5).abs() <= VALUE_TOL, "{}", solution.value);
    for w in solution.row_strategy.iter().chain(&solution.col_strategy) {
        assert!((w - 0.5).abs() <= VALUE_TOL, "{w}");
    }

    let v = report.values.value(space.index(&start));
    assert!((v - 0.5).abs() <= CONC_VALUE_TOL, "{v}");

    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(1), "runtime {elapsed:?}");
    pass("1 (fixture reproduction)", format!("value {v}"), elapsed);
}

#[test]
fn criterion_02_first_turn_successors() {
    let t0 = Instant::now();
    let fx = fixture::counterexample();
    let start = ConcState::position(2, 6, 1);
    let expected = [
        (2, 6, ConcState::position(2, 6, 4)),
        (2, 5, ConcState::position(2, 5, 4)),
        (3, 6, ConcState::position(3, 6, 4)),
        (3, 5, ConcState::position(3, 5, 4)),
    ];
    for (a1, a2, succ) in expected {
        let dist =
            conc_transition(&fx.graph, &fx.robber, &start, Action::Move(a1), Action::Move(a2))
                .unwrap();
        assert_eq!(dist.entries(), &[(succ, 1.0)], "moves ({a1}, {a2})");
    }
    pass(
        "2 (first-turn successors)",
        "4 action pairs exact".into(),
        t0.elapsed(),
    );
}

#[test]
fn criterion_03_oblivious_equivalence() {
    let t0 = Instant::now();
    let params = SolveParams::default();
    let mut rng = SplitMix64::new(0x0b11_0000);
    let mut instances = 0usize;
    for n in 1..=5u32 {
        for g in connected_graphs(n) {
            for _ in 0..20 {
                let robber = random_oblivious(&g, &mut rng);
                let race = solve_oblivious_concurrent(&g, &robber).unwrap();
                let general = solve_concurrent(&g, &robber, &params);
                for (idx, (a, b)) in race
                    .values
                    .as_slice()
                    .iter()
                    .zip(general.values.as_slice())
                    .enumerate()
                {
                    assert!(
                        *a == 0.0 || *a == 1.0,
                        "race value {a} at state {idx} not 0/1"
                    );
                    assert_eq!(a, b, "disagreement at state {idx}, edges {:?}", g.edges());
                }
                let residual = verify_pure_minimax(&g, &robber, &race.values).unwrap();
                assert_eq!(residual, 0.0);
                instances += 1;
            }
        }
    }
    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(120), "runtime {elapsed:?}");
    pass(
        "3 (oblivious equivalence)",
        format!("{instances} instances exact"),
        elapsed,
    );
}

/// Finite-horizon backward induction over the reachable game tree, memoized
/// on (state, remaining depth). Deterministic robber laws only.
struct SeqOracle<'a> {
    g: &'a Graph,
    robber: &'a RobberStrategy,
    space: SeqSpace,
    memo: HashMap<(usize, usize), f64>,
}

impl<'a> SeqOracle<'a> {
    fn new(g: &'a Graph, robber: &'a RobberStrategy) -> Self {
        SeqOracle {
            g,
            robber,
            space: SeqSpace::new(g),
            memo: HashMap::new(),
        }
    }

    fn value(&mut self, state: SeqState, depth: usize) -> f64 {
        match state.classify() {
            StateClass::C1Capture => return 1.0,
            StateClass::C2Capture | StateClass::Terminal => return 0.0,
            StateClass::Ordinary => {}
        }
        if depth == 0 {
            return 0.0;
        }
        let key = (self.space.index(&state), depth);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let SeqState::Position { x1, x2, turn, .. } = state else {
            unreachable!()
        };
        let own = if turn == 1 { x1 } else { x2 };
        let moves: Vec<_> = self.g.closed_neighborhood(own).unwrap().iter().collect();
        let mut best = if turn == 1 {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
        for dest in moves {
            let dist = seq_transition(self.g, self.robber, &state, Action::Move(dest)).unwrap();
            assert_eq!(dist.entries().len(), 1, "deterministic robber");
            let (succ, _) = dist.entries()[0];
            let v = self.value(succ, depth - 1);
            best = if turn == 1 { best.max(v) } else { best.min(v) };
        }
        self.memo.insert(key, best);
        best
    }
}

#[test]
fn criterion_04_sequential_oracle_equivalence() {
    let t0 = Instant::now();
    let params = SolveParams::default();
    let mut rng = SplitMix64::new(0x5e40);
    let mut instances = 0usize;
    for n in 1..=4u32 {
        let depth = 2 * (n as usize).pow(3);
        for g in connected_graphs(n) {
            let mut robbers = vec![RobberStrategy::identity()];
            robbers.push(random_oblivious(&g, &mut rng));
            robbers.push(random_oblivious(&g, &mut rng));
            robbers.push(random_state_deterministic(&g, &mut rng, 0.4));
            robbers.push(random_state_deterministic(&g, &mut rng, 0.7));
            for robber in &robbers {
                let report = solve_sequential(&g, robber, &params);
                let mut oracle = SeqOracle::new(&g, robber);
                let space = SeqSpace::new(&g);
                for (idx, state) in space.states().enumerate() {
                    let expected = oracle.value(state, depth);
                    let got = report.values.value(idx);
                    assert!(
                        (expected - got).abs() <= VALUE_TOL,
                        "state {state}: oracle {expected} vs solver {got} (edges {:?})",
                        g.edges()
                    );
                }
                instances += 1;
            }
        }
    }
    pass(
        "4 (sequential oracle equivalence)",
        format!("{instances} instances"),
        t0.elapsed(),
    );
}

#[test]
fn criterion_05_epsilon_certificates() {
    let t0 = Instant::now();
    let params = SolveParams::default();
    let mut rng = SplitMix64::new(0xce47);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = 3 + rng.next_below(4) as u32;
        let g = random_connected_graph(n, 0.35, &mut rng);
        let density = 0.3 + 0.5 * rng.next_f64();
        let robber = random_markov(&g, &mut rng, density);
        let report = solve_sequential(&g, &robber, &params);
        assert!(report.values.converged);
        let cert = certify_epsilon(&g, &robber, Variant::Sequential, &report, &params).unwrap();
        assert!(
            cert.epsilon <= EPSILON_BUDGET,
            "certificate {cert:?} exceeds {EPSILON_BUDGET}"
        );
        worst = worst.max(cert.epsilon);
    }
    pass(
        "5 (epsilon certificates)",
        format!("50 instances, worst epsilon {worst:e}"),
        t0.elapsed(),
    );
}

#[test]
fn criterion_06_monotone_iterates() {
    let t0 = Instant::now();
    let params = SolveParams::default();
    let mut rng = SplitMix64::new(0x360);
    let mut solves: Vec<SolveReport> = Vec::new();

    let fx = fixture::counterexample();
    solves.push(solve_concurrent(&fx.graph, &fx.robber, &params));
    solves.push(solve_sequential(&fx.graph, &fx.robber, &params));
    for trial in 0..14 {
        let n = 2 + rng.next_below(5) as u32;
        let g = random_connected_graph(n, 0.35, &mut rng);
        let robber = match trial % 3 {
            0 => random_oblivious(&g, &mut rng),
            1 => random_state_deterministic(&g, &mut rng, 0.5),
            _ => random_markov(&g, &mut rng, 0.5),
        };
        solves.push(if trial % 2 == 0 {
            solve_sequential(&g, &robber, &params)
        } else {
            solve_concurrent(&g, &robber, &params)
        });
    }

    for (i, report) in solves.iter().enumerate() {
        assert!(report.values.monotone, "solve {i} had a decreasing sweep");
        assert!(
            report.values.in_unit_interval,
            "solve {i} left the unit interval"
        );
    }
    pass(
        "6 (monotone iterates)",
        format!("{} recorded solves", solves.len()),
        t0.elapsed(),
    );
}

#[test]
fn criterion_07_capture_times_of_static_robber() {
    let t0 = Instant::now();
    let mut graphs: Vec<Graph> = Vec::new();
    for n in 1..=5u32 {
        graphs.extend(connected_graphs(n));
    }
    let mut rng = SplitMix64::new(0x1e44);
    for n in 2..=8u32 {
        for _ in 0..3 {
            graphs.push(random_connected_graph(n, 0.3, &mut rng));
        }
    }
    for g in &graphs {
        let table = oblivious_capture_times(g, &RobberStrategy::identity()).unwrap();
        let dist = g.distance_table();
        for c in g.vertices() {
            for r in g.vertices() {
                assert_eq!(
                    table.time(c, r),
                    Some(dist[(c - 1) as usize][(r - 1) as usize]),
                    "cop {c}, robber {r}, edges {:?}",
                    g.edges()
                );
            }
        }
        assert!(
            table.iterations <= g.vertex_count() as usize,
            "stabilized in {} > n = {}",
            table.iterations,
            g.vertex_count()
        );
    }
    pass(
        "7 (static-robber capture times)",
        format!("{} graphs", graphs.len()),
        t0.elapsed(),
    );
}

#[test]
fn criterion_08_monte_carlo_agreement() {
    let t0 = Instant::now();
    let params = SolveParams::default();
    let episodes = 100_000;
    let mut rng = SplitMix64::new(0x8c8c);
    let mut checked = 0usize;

    // The bundled fixture plus a seeded mix of robber kinds and variants.
    let fx = fixture::counterexample();
    let fx_report = solve_concurrent(&fx.graph, &fx.robber, &params);
    let start = ConcState::position(2, 6, 1);
    let est = estimate_concurrent_value(
        &fx.graph,
        &fx.robber,
        &fx_report.policy1,
        &fx_report.policy2,
        start,
        episodes,
        scpr_core::simulate::default_horizon(&fx.graph),
        0xf1f1,
    );
    let v = fx_report.values.value(ConcSpace::new(&fx.graph).index(&start));
    assert!((est.mean - v).abs() <= 3.0 * est.standard_error + est.truncated_fraction);
    checked += 1;

    let mut check_instance = |g: &Graph, robber: &RobberStrategy, variant: Variant, seed: u64| {
        let t_inst = Instant::now();
        let horizon = scpr_core::simulate::default_horizon(g);
        let n = g.vertex_count();
        let (x1, x2, x3) = (1, n, 2.min(n));
        match variant {
            Variant::Sequential => {
                let report = solve_sequential(g, robber, &params);
                let start = SeqState::position(x1, x2, x3, 1);
                let est = estimate_sequential_value(
                    g,
                    robber,
                    &report.policy1,
                    &report.policy2,
                    start,
                    episodes,
                    horizon,
                    seed,
                );
                let v = report.values.value(SeqSpace::new(g).index(&start));
                assert!(
                    (est.mean - v).abs()
                        <= 3.0 * est.standard_error + est.truncated_fraction + 1e-12,
                    "sequential estimate {} vs value {v} (se {}, trunc {})",
                    est.mean,
                    est.standard_error,
                    est.truncated_fraction
                );
            }
            Variant::Concurrent => {
                let report = solve_concurrent(g, robber, &params);
                let start = ConcState::position(x1, x2, x3);
                let est = estimate_concurrent_value(
                    g,
                    robber,
                    &report.policy1,
                    &report.policy2,
                    start,
                    episodes,
                    horizon,
                    seed,
                );
                let v = report.values.value(ConcSpace::new(g).index(&start));
                assert!(
                    (est.mean - v).abs()
                        <= 3.0 * est.standard_error + est.truncated_fraction + 1e-12,
                    "concurrent estimate {} vs value {v} (se {}, trunc {})",
                    est.mean,
                    est.standard_error,
                    est.truncated_fraction
                );
            }
        }
        let elapsed = t_inst.elapsed();
        assert!(elapsed < Duration::from_secs(60), "instance took {elapsed:?}");
        checked += 1;
    };

    for trial in 0..19u64 {
        let n = 3 + rng.next_below(4) as u32;
        let g = random_connected_graph(n, 0.4, &mut rng);
        match trial % 4 {
            0 => {
                let robber = random_markov(&g, &mut rng, 0.5);
                check_instance(&g, &robber, Variant::Sequential, 1000 + trial);
            }
            1 => {
                let robber = random_oblivious(&g, &mut rng);
                check_instance(&g, &robber, Variant::Concurrent, 1000 + trial);
            }
            2 => {
                let robber = random_state_deterministic(&g, &mut rng, 0.5);
                check_instance(&g, &robber, Variant::Sequential, 1000 + trial);
            }
            _ => {
                let robber = random_markov(&g, &mut rng, 0.6);
                check_instance(&g, &robber, Variant::Concurrent, 1000 + trial);
            }
        }
    }
    pass(
        "8 (Monte Carlo agreement)",
        format!("{checked} instances x {episodes} episodes"),
        t0.elapsed(),
    );
}

#[test]
fn criterion_09_matrix_game_properties() {
    let t0 = Instant::now();
    let mut rng = SplitMix64::new(0x9a9a);
    for trial in 0..500 {
        let rows = 1 + rng.next_below(6);
        let cols = 1 + rng.next_below(6);
        let payoff: Vec<Vec<f64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.next_f64() * 10.0 - 5.0).collect())
            .collect();
        let game = MatrixGame::new(payoff.clone()).unwrap();
        let s = game.solve();

        let gap = (s.row_guarantee(&game) - s.col_guarantee(&game)).abs();
        assert!(gap <= DUALITY_GAP_TOL, "trial {trial}: duality gap {gap}");

        let alpha = 0.1 + rng.next_f64() * 2.9;
        let beta = rng.next_f64() * 4.0 - 2.0;
        let scaled = MatrixGame::new(
            payoff
                .iter()
                .map(|row| row.iter().map(|&e| alpha * e + beta).collect())
                .collect(),
        )
        .unwrap();
        let vs = scaled.solve().value;
        assert!(
            (vs - (alpha * s.value + beta)).abs() <= EQUIVARIANCE_TOL,
            "trial {trial}: equivariance {vs} vs {}",
            alpha * s.value + beta
        );

        if rows == 1 {
            let expected = payoff[0].iter().fold(f64::INFINITY, |a, &b| a.min(b));
            assert_eq!(s.value, expected, "single-row reduction");
        }
        if cols == 1 {
            let expected = payoff.iter().map(|r| r[0]).fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(s.value, expected, "single-column reduction");
        }
    }
    pass("9 (matrix-game properties)", "500 matrices".into(), t0.elapsed());
}

#[test]
fn criterion_10_byte_identical_runs() {
    use std::process::Command;
    let t0 = Instant::now();
    let bin = env!("CARGO_BIN_EXE_scpr");

    let run = |args: &[&str], dir: &std::path::Path, threads: Option<&str>| {
        let mut cmd = Command::new(bin);
        cmd.args(args).current_dir(dir);
        if let Some(t) = threads {
            cmd.env("RAYON_NUM_THREADS", t);
        }
        let out = cmd.output().expect("binary runs");
        assert!(
            out.status.success(),
            "command {args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        out.stdout
    };

    let work = tempfile::tempdir().unwrap();
    std::fs::write(work.path().join("fig1.g"), fixture::GRAPH_TEXT).unwrap();
    std::fs::write(work.path().join("table2.r"), fixture::ROBBER_TEXT).unwrap();

    // repro: byte-identical, including across thread counts.
    let a = run(&["repro"], work.path(), None);
    let b = run(&["repro"], work.path(), None);
    let c = run(&["repro"], work.path(), Some("1"));
    assert_eq!(a, b, "repro differs between runs");
    assert_eq!(a, c, "repro differs under single-threaded execution");

    // solve: identical summary and identical output files across runs and
    // thread counts.
    let solve_args = [
        "solve",
        "--variant",
        "concurrent",
        "--graph",
        "fig1.g",
        "--robber",
        "table2.r",
        "--start",
        "2,6,1",
    ];
    let mut file_sets: Vec<(Vec<u8>, Vec<u8>, Vec<u8>)> = Vec::new();
    for threads in [None, None, Some("1")] {
        let stdout = run(&solve_args, work.path(), threads);
        let values = std::fs::read(work.path().join("scpr_out.values.csv")).unwrap();
        let policy = std::fs::read(work.path().join("scpr_out.policy.txt")).unwrap();
        file_sets.push((stdout, values, policy));
    }
    assert_eq!(file_sets[0], file_sets[1], "solve output differs between runs");
    assert_eq!(
        file_sets[0], file_sets[2],
        "solve output differs under single-threaded execution"
    );

    // simulate: the estimate is a pure function of the master seed.
    let sim_args = [
        "simulate",
        "--variant",
        "concurrent",
        "--graph",
        "fig1.g",
        "--robber",
        "table2.r",
        "--start",
        "2,6,1",
        "--episodes",
        "20000",
        "--seed",
        "99",
    ];
    let s1 = run(&sim_args, work.path(), None);
    let s2 = run(&sim_args, work.path(), Some("1"));
    assert_eq!(s1, s2, "simulate output differs under single-threaded execution");

    pass("10 (byte-identical runs)", "repro/solve/simulate".into(), t0.elapsed());
}
