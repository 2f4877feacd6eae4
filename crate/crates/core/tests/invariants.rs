use proptest::prelude::*;

use widomlab::cantor::{self, GammaSequence};
use widomlab::chebyshev::widom_infty;
use widomlab::orthopoly::{discretize, stieltjes};
use widomlab::potential::{EquilibriumMeasure, IntegrateOpts};
use widomlab::realsets::{RationalFunction, RealCompactSet};
use widomlab::weights::{szego_factor, WeightExpr};

/// One to three bands in [-1, 1], each at least 0.05 wide and apart.
fn arb_set() -> impl Strategy<Value = EquilibriumMeasure> {
    (1usize..=3)
        .prop_flat_map(|k| prop::collection::vec(0.05f64..1.0, 2 * k))
        .prop_map(|steps| {
            let total: f64 = steps.iter().sum();
            let mut x = -1.0;
            let mut ends = vec![x];
            for s in &steps[..steps.len() - 1] {
                x += 2.0 * s / total;
                ends.push(x);
            }
            ends.push(1.0);
            // steps alternate band, gap, band, ...; drop the final gap
            let pairs: Vec<(f64, f64)> = ends
                .chunks(2)
                .take(steps.len() / 2)
                .map(|c| (c[0], c[1]))
                .collect();
            let pairs: Vec<(f64, f64)> = if pairs.len() == 1 { vec![(-1.0, 1.0)] } else { pairs };
            EquilibriumMeasure::new(&RealCompactSet::from_pairs(&pairs).unwrap()).unwrap()
        })
}

fn widom_2_sq(m: &EquilibriumMeasure, w: &WeightExpr, n: usize) -> f64 {
    let t = stieltjes(&discretize(m, w, 512).unwrap(), n).unwrap();
    t.log_widom_2_sq(n, m.log_capacity()).exp()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unweighted_l2_factor_is_at_least_two(m in arb_set(), n in 1usize..=8) {
        let v = widom_2_sq(&m, &WeightExpr::one(), n);
        prop_assert!(v >= 2.0 * (1.0 - 1e-8), "{v}");
    }

    #[test]
    fn l2_factor_dominates_szego(m in arb_set(), a in -1.5f64..1.5, n in 1usize..=8) {
        let w = WeightExpr::abs_linear(a);
        let s = szego_factor(&m, &w, 1e-12).unwrap().value;
        let v = widom_2_sq(&m, &w, n);
        prop_assert!(v >= s * (1.0 - 1e-8), "{v} < {s}");
    }

    #[test]
    fn sup_norm_dominates_l2_of_squared_weight(m in arb_set(), a in -1.5f64..1.5, n in 1usize..=6) {
        let w = WeightExpr::abs_linear(a);
        let w2 = WeightExpr::abs_rational(RationalFunction::real_zeros_poles(1.0, &[a, a], &[]).unwrap());
        let (_, hi) = widom_infty(&m, &w, n, 1e-9).unwrap();
        let l2 = widom_2_sq(&m, &w2, n).sqrt();
        prop_assert!(hi >= l2 * (1.0 - 1e-8), "{hi} < {l2}");
    }

    #[test]
    fn discrete_mass_matches_adaptive_quadrature(m in arb_set(), a in -1.5f64..1.5) {
        let w = WeightExpr::abs_linear(a);
        let sm = discretize(&m, &w, 512).unwrap();
        let oracle = m
            .integrate(|x| w.log_at(&x).exp(), &IntegrateOpts::singular(vec![a]).with_tol(1e-13))
            .unwrap();
        prop_assert!((sm.total_mass - oracle).abs() <= 1e-9 * oracle.max(1.0), "{} vs {oracle}", sm.total_mass);
    }

    #[test]
    fn cantor_levels_are_nested(gamma in 0.02f64..=0.25, s in 0usize..5) {
        let g = GammaSequence::constant(gamma).unwrap();
        let outer = cantor::iterate(&g, s).unwrap().bands;
        let inner = cantor::iterate(&g, s + 1).unwrap().bands;
        prop_assert_eq!(inner.bands().len(), 2 * outer.bands().len());
        prop_assert!(outer.contains_set(&inner, 1e-12));
        let c0 = cantor::capacity_exact(&g, s).unwrap();
        let c1 = cantor::capacity_exact(&g, s + 1).unwrap();
        prop_assert!(c1 <= c0 * (1.0 + 1e-12));
    }
}
