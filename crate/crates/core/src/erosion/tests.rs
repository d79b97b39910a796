use super::*;
use crate::lattice::ScriptedSteps;
use proptest::prelude::*;

const E: u8 = 0;

fn cells(list: &[(i64, i64)]) -> Vec<CellId> {
    list.iter().map(|&(i, j)| CellId::new(i, j)).collect()
}

fn verts(list: &[(i64, i64)]) -> Vec<Vertex> {
    list.iter().map(|&(i, j)| Vertex::new(i, j)).collect()
}

fn rotated_to(walk: &[Vertex], first: Vertex) -> Vec<Vertex> {
    let k = walk.iter().position(|&v| v == first).expect("vertex on the walk");
    walk[k..].iter().chain(&walk[..k]).copied().collect()
}

fn droplet(list: &[(i64, i64)], source: (i64, i64), rate: f64) -> DropletSpec {
    DropletSpec { cells: cells(list), sources: vec![(CellId::new(source.0, source.1), rate)] }
}

fn block_and_single(surface: TiledSurface, single: (i64, i64)) -> ErosionState {
    ErosionState::from_cells(
        surface,
        &[droplet(&[(1, 1), (2, 1), (1, 2), (2, 2)], (1, 1), 1.0), droplet(&[single], single, 1.0)],
    )
    .unwrap()
}

#[test]
fn walk_ending_on_a_source_square_changes_nothing() {
    let mut state = block_and_single(TiledSurface::plane(1.0).unwrap(), (3, 1));
    let before = Snapshot::capture(&state, 0.0);
    let mut steps = ScriptedSteps::new(vec![E, E]);
    let ev = single_event(&mut state, 0, &mut steps, 0.0, true).unwrap();
    assert_eq!(ev.outcome, EventOutcome::SourceSquare { cell: CellId::new(3, 1) });
    assert_eq!(ev.walk.as_deref(), Some(&cells(&[(2, 1), (3, 1)])[..]));
    assert_eq!(Snapshot::capture(&state, 0.0), before);
}

#[test]
fn torus_capture_golden() {
    let surface = TiledSurface::torus(6, 6, 1.0, Complex64::new(0.0, 0.0)).unwrap();
    let mut state = block_and_single(surface, (4, 4));
    let mut steps = ScriptedSteps::new(vec![E, E]);
    let ev = single_event(&mut state, 0, &mut steps, 0.5, false).unwrap();
    assert_eq!(ev.outcome, EventOutcome::Capture { cell: CellId::new(3, 1), from: None });
    let expected = verts(&[(1, 1), (2, 1), (3, 1), (4, 1), (4, 2), (3, 2), (3, 3), (2, 3), (1, 3), (1, 2)]);
    assert_eq!(rotated_to(state.interface(0).unwrap(), expected[0]), expected);
    assert_eq!(state.cell_count(0).unwrap(), 5);
    assert_eq!(ev.changes, vec![InterfaceChange { droplet: 0, before: 8, after: 10 }]);
    assert!(check_invariants(&state).is_ok());
}

#[test]
fn capture_that_leaves_a_spur_removes_it() {
    let surface = TiledSurface::plane(1.0).unwrap();
    let mut state = ErosionState::from_cells(
        surface,
        &[
            droplet(&[(1, 1), (2, 1)], (1, 1), 1.0),
            droplet(&[(4, 0), (4, 1), (4, 2), (4, 3), (3, 1)], (4, 0), 1.0),
        ],
    )
    .unwrap();
    assert_eq!(state.interface(1).unwrap().len(), 12);
    let mut steps = ScriptedSteps::new(vec![E, E]);
    let ev = single_event(&mut state, 0, &mut steps, 0.0, false).unwrap();
    assert_eq!(ev.outcome, EventOutcome::Capture { cell: CellId::new(3, 1), from: Some(1) });
    let loser = verts(&[(4, 0), (5, 0), (5, 1), (5, 2), (5, 3), (5, 4), (4, 4), (4, 3), (4, 2), (4, 1)]);
    assert_eq!(rotated_to(state.interface(1).unwrap(), loser[0]), loser);
    let winner = verts(&[(1, 1), (2, 1), (3, 1), (4, 1), (4, 2), (3, 2), (2, 2), (1, 2)]);
    assert_eq!(rotated_to(state.interface(0).unwrap(), winner[0]), winner);
    assert!(ev.changes.contains(&InterfaceChange { droplet: 1, before: 12, after: 10 }));
    assert!(check_invariants(&state).is_ok());
}

#[test]
fn last_square_of_a_droplet_is_protected() {
    let surface = TiledSurface::plane(1.0).unwrap();
    let mut state = ErosionState::from_cells(
        surface,
        &[droplet(&[(1, 1), (2, 1)], (1, 1), 1.0), droplet(&[(3, 1)], (3, 1), 1.0)],
    )
    .unwrap();
    let before = Snapshot::capture(&state, 0.0);
    let mut steps = ScriptedSteps::new(vec![E, E]);
    let ev = single_event(&mut state, 0, &mut steps, 0.0, false).unwrap();
    assert!(matches!(ev.outcome, EventOutcome::SourceSquare { .. }));
    assert_eq!(Snapshot::capture(&state, 0.0), before);
}

#[test]
fn bridge_capture_is_rejected() {
    // capturing the middle of a three-square bar would split the loser
    let surface = TiledSurface::plane(1.0).unwrap();
    let mut state = ErosionState::from_cells(
        surface,
        &[
            droplet(&[(1, 1), (2, 1)], (1, 1), 1.0),
            droplet(&[(3, 0), (3, 1), (3, 2)], (3, 0), 1.0),
        ],
    )
    .unwrap();
    let before = Snapshot::capture(&state, 0.0);
    let mut steps = ScriptedSteps::new(vec![E, E]);
    let ev = single_event(&mut state, 0, &mut steps, 0.0, false).unwrap();
    assert_eq!(ev.outcome, EventOutcome::Rejected { cell: CellId::new(3, 1), reason: Rejection::LoserTopology });
    assert_eq!(Snapshot::capture(&state, 0.0), before);
}

#[test]
fn enclosing_capture_is_rejected() {
    // a U opening upwards: pocket (1, 1), mouth (1, 2)
    let u = [(0, 0), (1, 0), (2, 0), (0, 1), (2, 1), (0, 2), (2, 2)];
    let surface = TiledSurface::plane(1.0).unwrap();
    let start = ErosionState::from_cells(surface, &[droplet(&u, (0, 0), 1.0)]).unwrap();

    let mut state = start.clone();
    let mut steps = ScriptedSteps::new(vec![1, 1, E]);
    let ev = single_event(&mut state, 0, &mut steps, 0.0, false).unwrap();
    assert_eq!(ev.outcome, EventOutcome::Rejected { cell: CellId::new(1, 2), reason: Rejection::CapturerTopology });
    assert_eq!(state.interface(0).unwrap(), start.interface(0).unwrap());

    let mut state = start;
    let mut steps = ScriptedSteps::new(vec![E, 1]);
    let ev = single_event(&mut state, 0, &mut steps, 0.0, false).unwrap();
    assert_eq!(ev.outcome, EventOutcome::Capture { cell: CellId::new(1, 1), from: None });
    assert!(check_invariants(&state).is_ok());
}

#[test]
fn construction_errors() {
    let surface = TiledSurface::plane(1.0).unwrap();
    let overlap = ErosionState::from_cells(surface, &[droplet(&[(0, 0)], (0, 0), 1.0), droplet(&[(0, 0)], (0, 0), 1.0)]);
    assert!(matches!(overlap, Err(Error::Overlap(_))));
    let outside = ErosionState::from_cells(surface, &[droplet(&[(0, 0)], (1, 0), 1.0)]);
    assert!(matches!(outside, Err(Error::SourceOutside(_))));
    let spec = CircleSpec {
        center: Complex64::new(0.0, 0.0),
        radius: 0.2,
        divisor: WeightedDivisor::finite(&[(Complex64::new(0.5, 0.0), 1.0)]).unwrap(),
    };
    assert!(matches!(init_circles(TiledSurface::plane(0.05).unwrap(), &[spec]), Err(Error::SourceOutside(_))));
    let near = CircleSpec {
        center: Complex64::new(0.1, 0.0),
        radius: 0.2,
        divisor: WeightedDivisor::finite(&[(Complex64::new(0.1, 0.0), 1.0)]).unwrap(),
    };
    let far = CircleSpec { center: Complex64::new(0.0, 0.0), ..near.clone() };
    let far = CircleSpec { divisor: WeightedDivisor::finite(&[(Complex64::new(0.0, 0.0), 1.0)]).unwrap(), ..far };
    assert!(matches!(init_circles(TiledSurface::plane(0.05).unwrap(), &[near, far]), Err(Error::Overlap(_))));
}

#[test]
fn minimal_state_is_valid() {
    let state = ErosionState::from_cells(TiledSurface::plane(0.1).unwrap(), &[droplet(&[(0, 0)], (0, 0), 3.0)]).unwrap();
    assert_eq!(state.interface(0).unwrap().len(), 4);
    assert!(check_invariants(&state).is_ok());
    assert!((discrete_energy(&state).unwrap() - 9.0).abs() < 1e-12);
}

#[test]
fn initial_setups_are_valid() {
    let plane = plane_pair_setup(0.05, 0.2).unwrap();
    let torus = torus_pair_setup(0.05, 0.2).unwrap();
    for s in [&plane, &torus] {
        assert!(check_invariants(s).is_ok());
        assert_eq!(s.sources.len(), 2);
        assert_eq!(s.sources[0].rate, 2.0);
        assert!(s.cell_count(0).unwrap() > 40);
        assert_eq!(s.cell_count(0).unwrap(), s.cell_count(1).unwrap());
    }
    assert_eq!(torus.surface.dims(), Some((40, 40)));
}

#[test]
fn green_value_of_three_by_three_square() {
    let sq: Vec<(i64, i64)> = (0..3).flat_map(|j| (0..3).map(move |i| (i, j))).collect();
    let state = ErosionState::from_cells(TiledSurface::plane(1.0).unwrap(), &[droplet(&sq, (1, 1), 1.0)]).unwrap();
    // dense oracle
    let mut a = nalgebra::DMatrix::<f64>::identity(9, 9);
    for (p, &(i, j)) in sq.iter().enumerate() {
        for (q, &(k, l)) in sq.iter().enumerate() {
            if (i - k).abs() + (j - l).abs() == 1 {
                a[(p, q)] -= 0.25;
            }
        }
    }
    let oracle = a.try_inverse().unwrap()[(4, 4)];
    let g = droplet_green_matrix(&state, 0).unwrap()[0][0];
    assert!((g - oracle).abs() < 1e-10);
    assert!((g - 1.5).abs() < 1e-10);
}

#[test]
fn energy_is_quadratic_in_weights() {
    let state = plane_pair_setup(0.1, 0.3).unwrap();
    let mut doubled = state.clone();
    for s in &mut doubled.sources {
        s.rate *= 2.0;
    }
    let (e1, e2) = (discrete_energy(&state).unwrap(), discrete_energy(&doubled).unwrap());
    assert!((e2 - 4.0 * e1).abs() < 1e-9 * e2.abs());
}

#[test]
fn round_robin_schedule() {
    let mut s = Scheduler::new(&[2.0, 1.0], ClockMode::RoundRobin, 0).unwrap();
    let got: Vec<(f64, usize)> = (0..6).map(|_| s.pop()).collect();
    assert_eq!(got, vec![(0.5, 0), (1.0, 0), (1.0, 1), (1.5, 0), (2.0, 0), (2.0, 1)]);
}

#[test]
fn poisson_clock_means() {
    let n = 100_000;
    let mut s = Scheduler::new(&[2.5], ClockMode::Poisson, 7).unwrap();
    let mut last = 0.0;
    let mut sum = 0.0;
    for _ in 0..n {
        let (t, _) = s.pop();
        sum += t - last;
        last = t;
    }
    let mean = sum / n as f64;
    let sigma = (1.0 / 2.5) / (n as f64).sqrt();
    assert!((mean - 0.4).abs() < 3.0 * sigma, "{mean}");

    let mut s = Scheduler::new(&[1.5, 0.5], ClockMode::Poisson, 8).unwrap();
    let horizon = 20_000.0;
    let mut count = 0u64;
    while s.peek().0 <= horizon {
        s.pop();
        count += 1;
    }
    let expected = 2.0 * horizon;
    assert!((count as f64 - expected).abs() < 3.0 * expected.sqrt(), "{count}");
}

#[test]
fn round_robin_run_counts_events() {
    let state = ErosionState::from_cells(TiledSurface::plane(0.1).unwrap(), &[droplet(&[(0, 0)], (0, 0), 2.0)]).unwrap();
    let out = run(state, 1.0, ClockMode::RoundRobin, 1, &[], RunOptions { check_every: 1, ..Default::default() }).unwrap();
    assert_eq!(out.summary.events, 200);
    assert_eq!(out.summary.captures + out.summary.rejected, 200);
    assert_eq!(out.state.cell_count(0).unwrap() as u64, 1 + out.summary.captures);
    assert_eq!(out.summary.checks, 200);
}

#[test]
fn identical_seeds_give_identical_snapshots() {
    let go = |seed| {
        let state = plane_pair_setup(0.1, 0.2).unwrap();
        let opts = RunOptions { log_events: true, ..Default::default() };
        run(state, 0.5, ClockMode::Poisson, seed, &[0.1, 0.25, 0.5], opts).unwrap()
    };
    let (a, b, c) = (go(3), go(3), go(4));
    assert_eq!(a.snapshots.len(), 3);
    assert_eq!(a.snapshots, b.snapshots);
    assert_eq!(a.event_log, b.event_log);
    assert_ne!(a.snapshots, c.snapshots);
    assert!(a.event_log.starts_with("time,source,walk_length,outcome,cell_i,cell_j\n"));
    assert_eq!(a.event_log.lines().count() as u64, a.summary.events + 1);
}

#[test]
fn snapshot_round_trips() {
    let state = torus_pair_setup(0.1, 0.3).unwrap();
    let snap = Snapshot::capture(&state, 0.0);
    let back = Snapshot::from_json(&snap.to_json().unwrap()).unwrap();
    assert_eq!(back, snap);
    assert_eq!(back.droplets[0].cell_list(), state.cells(0).unwrap());
    assert!(Snapshot::from_json(&snap.to_json().unwrap().replace("v1", "v0")).is_err());
}

fn invariant_sweep(state: ErosionState, seed: u64, events: usize) {
    let mut sim = Simulation::new(state, ClockMode::Poisson, seed, RunOptions { check_every: 1, ..Default::default() }).unwrap();
    for _ in 0..events {
        let before: Vec<usize> = (0..sim.state.droplet_count()).map(|k| sim.state.cell_count(k).unwrap()).collect();
        let snap = Snapshot::capture(&sim.state, 0.0);
        let ev = sim.step().unwrap();
        let firing = sim.state.sources[ev.source].droplet;
        let after: Vec<usize> = (0..sim.state.droplet_count()).map(|k| sim.state.cell_count(k).unwrap()).collect();
        assert!(after[firing] >= before[firing]);
        for k in 0..after.len() {
            if k != firing {
                assert!(after[k] <= before[k]);
            }
        }
        if !matches!(ev.outcome, EventOutcome::Capture { .. }) {
            assert_eq!(Snapshot::capture(&sim.state, 0.0), snap);
        }
    }
}

#[test]
fn invariants_hold_on_plane_pair() {
    for seed in 0..3 {
        invariant_sweep(plane_pair_setup(0.05, 0.2).unwrap(), seed, 1000);
    }
}

#[test]
fn invariants_hold_on_torus_pair() {
    for seed in 0..3 {
        invariant_sweep(torus_pair_setup(0.05, 0.2).unwrap(), seed, 1000);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn invariants_hold_on_small_torus(seed in any::<u64>(), r in 0.15f64..0.35) {
        let state = torus_pair_setup(0.1, r).unwrap();
        invariant_sweep(state, seed, 400);
    }

    #[test]
    fn invariants_hold_with_many_sources(seed in any::<u64>()) {
        let z = |x: f64, y: f64| Complex64::new(x, y);
        let spec = |c: Complex64, pts: &[(Complex64, f64)]| CircleSpec {
            center: c,
            radius: 0.25,
            divisor: WeightedDivisor::finite(pts).unwrap(),
        };
        let specs = [
            spec(z(0.0, 0.0), &[(z(-0.1, 0.0), 1.0), (z(0.1, 0.05), 0.5)]),
            spec(z(0.6, 0.0), &[(z(0.6, 0.0), 1.0)]),
            spec(z(0.3, 0.5), &[(z(0.3, 0.5), 2.0)]),
        ];
        let surface = TiledSurface::torus(12, 12, 0.1, z(-0.3, -0.3)).unwrap();
        let state = init_circles(surface, &specs).unwrap();
        invariant_sweep(state, seed, 400);
    }
}
