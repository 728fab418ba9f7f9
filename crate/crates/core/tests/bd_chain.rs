use bdmove::bd_chain::{ClosedForm, RateSeq, SimpleChainSpec};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn stationary_law_is_in_detailed_balance(b in 0.1..5.0f64, d in 0.1..5.0f64, p in 0.5..2.0f64) {
        let chain = SimpleChainSpec::new(
            RateSeq::closed(ClosedForm::constant(b)),
            RateSeq::closed(ClosedForm::Power { c: d, shift: 0.0, p }),
        )
        .unwrap();
        let pi = chain.stationary_distribution(1e-14).unwrap();
        prop_assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for n in 0..pi.len() - 1 {
            let (lhs, rhs) = (pi[n] * chain.beta(n), pi[n + 1] * chain.delta(n + 1));
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(rhs).max(1e-300));
        }
    }
}

#[test]
fn infinite_server_queue_time_average() {
    // beta = 2, delta_n = n: Poisson(2) occupancy with mean 2
    let chain = SimpleChainSpec::new(RateSeq::closed(ClosedForm::constant(2.0)), RateSeq::closed(ClosedForm::PerCapita { c: 1.0 }))
        .unwrap();
    let horizon = 1e4;
    let log = chain.simulate(0, horizon, 3, 0);
    let (mut area, mut t, mut n) = (0.0, 0.0, 0usize);
    for &(te, ne) in &log.events {
        area += n as f64 * (te - t);
        t = te;
        n = ne;
    }
    area += n as f64 * (horizon - t);
    let mean = area / horizon;
    assert!((mean - 2.0).abs() <= 0.04, "time average {mean}");
}
