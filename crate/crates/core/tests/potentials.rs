use bdmove::config_space::Configuration;
use bdmove::potentials::{GibbsPotential, PairPotential};
use proptest::prelude::*;

fn kinds() -> Vec<PairPotential> {
    vec![
        PairPotential::LennardJones { c: 1.0 },
        PairPotential::Riesz { c: 1.0, alpha: 1.0 },
        PairPotential::SoftCore { c: 5.0 },
        PairPotential::Strauss { gamma: 2.0, r: 0.2, eps: 0.05 },
    ]
}

/// Vector in the plane with `10⁻³ ≤ ‖ξ‖ ≤ 10`.
fn offset() -> impl Strategy<Value = [f64; 2]> {
    (-3.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(lr, th)| {
        let r = 10f64.powf(lr);
        [r * th.cos(), r * th.sin()]
    })
}

fn config() -> impl Strategy<Value = Configuration> {
    prop::collection::vec((0.0..1.0f64, 0.0..1.0f64).prop_map(|(a, b)| [a, b]), 0..8).prop_map(|p| Configuration::from_points(2, &p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gradient_matches_central_differences(xi in offset()) {
        let h = 1e-6;
        for p in kinds() {
            let g = p.grad(&xi).unwrap();
            for k in 0..2 {
                let (mut a, mut b) = (xi, xi);
                a[k] += h;
                b[k] -= h;
                let fd = (p.phi(&a) - p.phi(&b)) / (2.0 * h);
                prop_assert!((fd - g[k]).abs() <= 1e-4 * g[k].abs() + 1e-7, "{:?} at {:?}: fd {} vs {}", p, xi, fd, g[k]);
            }
        }
    }

    #[test]
    fn potentials_are_even(xi in offset()) {
        let neg = [-xi[0], -xi[1]];
        for p in kinds() {
            prop_assert_eq!(p.phi(&xi), p.phi(&neg));
            let (g, gn) = (p.grad(&xi).unwrap(), p.grad(&neg).unwrap());
            prop_assert!(g.iter().zip(&gn).all(|(a, b)| a == &-b));
        }
    }

    #[test]
    fn energy_delta_is_the_energy_difference(x in config(), a in 0.0..1.0f64, b in 0.0..1.0f64, act in -2.0..2.0f64) {
        for p in kinds() {
            let g = GibbsPotential::new(act, p);
            let with = x.with_point(&[a, b]);
            let (v0, v1) = (g.energy(&x), g.energy(&with));
            prop_assume!(v0.is_finite() && v1.is_finite());
            let scale = v0.abs().max(v1.abs()).max(1.0);
            prop_assert!((g.energy_delta(&x, &[a, b]) - (v1 - v0)).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn local_stability(x in config(), a in 0.0..1.0f64, b in 0.0..1.0f64, act in -2.0..2.0f64) {
        for p in kinds() {
            let g = GibbsPotential::new(act, p);
            let xi = [a, b];
            prop_assert!(g.boltzmann_delta(&x, &xi) <= (-act).exp() * g.envelope(&xi) * (1.0 + 1e-15));
        }
    }
}

#[test]
fn strauss_is_c1_at_both_ends() {
    let p: PairPotential = PairPotential::Strauss { gamma: 2.0, r: 0.2, eps: 0.05 };
    let eta = 1e-9f64;
    for edge in [0.15f64, 0.25] {
        let (below, above) = (p.radial(edge - eta, 2), p.radial(edge + eta, 2));
        assert!((below - above).abs() < 1e-6, "value jump at {edge}");
        let h = 1e-6;
        let left = (p.radial(edge, 2) - p.radial(edge - h, 2)) / h;
        let right = (p.radial(edge + h, 2) - p.radial(edge, 2)) / h;
        assert!((left - right).abs() < 1e-3, "slope jump at {edge}: {left} vs {right}");
        assert!(p.radial_derivative(edge - eta, 2).abs() < 1e-5 && p.radial_derivative(edge + eta, 2).abs() < 1e-5);
    }
}
