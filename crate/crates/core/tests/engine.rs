use std::io::BufReader;

use bdmove::bd_chain::SimpleChainSpec;
use bdmove::config_space::{Configuration, Domain};
use bdmove::engine::{simulate, simulate_coupled, simulate_with, ModelSpec, SimOptions, TrajectoryLog};
use bdmove::jump_kernels::{BirthKernel, BirthRate, DeathKernel, DeathRate, DeathWeight, IntensitySpec};
use bdmove::movers::{MoverKind, MoverSpec};
use bdmove::potentials::{GibbsPotential, PairPotential, QuadratureSpec};

fn model() -> ModelSpec {
    ModelSpec::new(
        Domain::unit_cube(2).unwrap(),
        IntensitySpec::new(BirthRate::Constant { rate: 3.0 }, DeathRate::Linear { d0: 1.0, cap: 6 }, 9.0),
        BirthKernel::uniform(),
        DeathKernel::Weighted(DeathWeight::ExpDecay { scale: 0.3 }),
        MoverSpec::new(MoverKind::ReflectedBrownian { inv_temp: 4.0 }),
    )
    .unwrap()
}

fn start() -> Configuration {
    Configuration::from_points(2, &[[0.2, 0.2], [0.6, 0.7]]).unwrap()
}

#[test]
fn logs_are_well_formed() {
    let m = model();
    let opts = SimOptions {
        checkpoints: vec![0.0, 1.0, 2.5, 5.0],
        ..Default::default()
    };
    for i in 0..200 {
        let log = simulate_with(&m, &start(), 5.0, &opts, 11, i).unwrap();
        log.check_structure().unwrap();
        assert_eq!(log.checkpoints.len(), 4);
        assert_eq!(log.jumps, log.events.len());
        assert_eq!(log.final_state.count(), log.count_at(5.0));
    }
}

#[test]
fn same_seed_same_trajectory() {
    let m = model();
    let a = simulate(&m, &start(), 10.0, &[5.0], 42).unwrap();
    let b = simulate(&m, &start(), 10.0, &[5.0], 42).unwrap();
    let c = simulate(&m, &start(), 10.0, &[5.0], 43).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn jsonl_round_trip() {
    let log = simulate(&model(), &start(), 4.0, &[1.0, 2.0], 5).unwrap();
    let mut buf = Vec::new();
    log.write_jsonl(&mut buf).unwrap();
    let back = TrajectoryLog::read_jsonl(BufReader::new(&buf[..])).unwrap();
    assert_eq!(back, log);
}

#[test]
fn coupled_process_stays_dominated() {
    let cases = [
        (model(), 2usize),
        (
            ModelSpec::gibbs_invariant(
                Domain::unit_cube(2).unwrap(),
                GibbsPotential::new(0.0, PairPotential::Strauss { gamma: 1.0, r: 0.2, eps: 0.05 }),
                QuadratureSpec { cells_per_axis: 16 },
            )
            .unwrap(),
            4,
        ),
    ];
    for (m, n0) in cases {
        let chain = SimpleChainSpec::dominating(&m.intensities, &m.domain).unwrap();
        for i in 0..300 {
            let log = simulate_coupled(&m, &chain, &start(), n0, 5.0, &SimOptions::default(), 8, i).unwrap();
            assert!(log.dominated, "trajectory {i}");
            assert!(log.final_state.x.count() <= log.final_state.n);
            assert!(log.row_mass_error <= 1e-12);
        }
    }
}
