use levyito_core::jumpmeasure::{count_jumps, jump_integral, BorelRegion};
use levyito_core::measure::{psi, Atom, LevyMeasure, LevyTriplet, Region};
use levyito_core::rng::RngStream;
use levyito_core::simulate::{sample_levy_path, PathSample, SimConfig};
use proptest::prelude::*;

fn atoms_1d() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec(
        (
            prop_oneof![-5.0..-0.01f64, 0.01..5.0f64],
            0.0..3.0f64,
        ),
        0..5,
    )
}

fn triplet_1d() -> impl Strategy<Value = LevyTriplet<f64>> {
    (-3.0..3.0f64, 0.0..2.0f64, atoms_1d())
        .prop_map(|(a, q, atoms)| LevyTriplet::scalar(a, q, LevyMeasure::atoms_1d(&atoms)))
}

fn triplet_2d() -> impl Strategy<Value = LevyTriplet<f64>> {
    (
        prop::array::uniform2(-2.0..2.0f64),
        prop::array::uniform3(-1.0..1.0f64),
        prop::collection::vec((prop::array::uniform2(-3.0..3.0f64), 0.0..2.0f64), 0..4),
    )
        .prop_filter_map("atoms at the origin", |(a, l, atoms)| {
            // Q = L Lᵀ with L lower triangular
            let q = vec![
                vec![l[0] * l[0], l[0] * l[1]],
                vec![l[0] * l[1], l[1] * l[1] + l[2] * l[2]],
            ];
            if atoms.iter().any(|(x, _)| x[0].abs() + x[1].abs() < 1e-3) {
                return None;
            }
            let atoms = atoms.into_iter().map(|(x, m)| Atom::new(x.to_vec(), m)).collect();
            Some(LevyTriplet::new(a.to_vec(), q, LevyMeasure::atomic(2, atoms)))
        })
}

fn jump_path() -> impl Strategy<Value = PathSample<f64>> {
    prop::collection::vec((0.0..1.0f64, prop_oneof![-4.0..-0.1f64, 0.1..4.0f64]), 0..20).prop_map(|mut j| {
        j.sort_by(|a, b| a.0.total_cmp(&b.0));
        j.dedup_by(|a, b| a.0 == b.0);
        PathSample::pure_jump_1d(1.0, &j).unwrap()
    })
}

proptest! {
    #[test]
    fn real_part_nonnegative_and_phi_bounded(t in triplet_1d(), u in -50.0..50.0f64, time in 0.0..5.0f64) {
        let p = psi(&t, &[u]).unwrap();
        prop_assert!(p.re >= -1e-12);
        let phi = levyito_core::measure::char_fn(&t, &[u], time).unwrap();
        prop_assert!(phi.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn real_part_nonnegative_2d(t in triplet_2d(), u in prop::array::uniform2(-20.0..20.0f64)) {
        prop_assert!(psi(&t, &u).unwrap().re >= -1e-12);
    }

    #[test]
    fn hermitian_symmetry(t in triplet_1d(), u in -50.0..50.0f64) {
        let a = psi(&t, &[u]).unwrap();
        let b = psi(&t, &[-u]).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-10 * (1.0 + a.norm()));
    }

    #[test]
    fn exponent_additive_over_independent_sums(s in triplet_1d(), t in triplet_1d(), u in -20.0..20.0f64) {
        let sum = s.independent_sum(&t).unwrap();
        let lhs = psi(&sum, &[u]).unwrap();
        let rhs = psi(&s, &[u]).unwrap() + psi(&t, &[u]).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
    }

    #[test]
    fn atomic_mass_additive_over_disjoint_regions(atoms in atoms_1d(), r in 0.05..3.0f64) {
        let m = LevyMeasure::atoms_1d(&atoms);
        let pos: Region<f64> = format!("[{r},inf)").parse().unwrap();
        let neg: Region<f64> = format!("(-inf,-{r}]").parse().unwrap();
        let both = Region::outside(r);
        let lhs = m.mass(&pos).unwrap() + m.mass(&neg).unwrap();
        prop_assert!((lhs - m.mass(&both).unwrap()).abs() <= 1e-12 * (1.0 + lhs));
    }

    #[test]
    fn counts_additive_over_disjoint_regions(p in jump_path(), t in 0.0..1.0f64) {
        let b1: BorelRegion<f64> = "[1,inf)".parse().unwrap();
        let b2: BorelRegion<f64> = "(-inf,-1]".parse().unwrap();
        let b: BorelRegion<f64> = "|x| in [1,inf)".parse().unwrap();
        prop_assert_eq!(
            count_jumps(&p, &b1, t).unwrap() + count_jumps(&p, &b2, t).unwrap(),
            count_jumps(&p, &b, t).unwrap()
        );
    }

    #[test]
    fn jump_integral_linear(p in jump_path(), alpha in -3.0..3.0f64, beta in -3.0..3.0f64) {
        let b: BorelRegion<f64> = "|x| in [0.5,inf)".parse().unwrap();
        let f = |x: &[f64]| x[0] * x[0];
        let g = |x: &[f64]| x[0].sin();
        let lhs = jump_integral(&p, |x| alpha * f(x) + beta * g(x), &b, 1.0).unwrap();
        let rhs = alpha * jump_integral(&p, f, &b, 1.0).unwrap() + beta * jump_integral(&p, g, &b, 1.0).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn simulation_deterministic(t in triplet_1d(), seed in any::<u64>(), index in 0..1000u64) {
        let cfg = SimConfig::new(1.0, 0.25);
        let a = sample_levy_path(&t, &cfg, RngStream::new(seed, index)).unwrap();
        let b = sample_levy_path(&t, &cfg, RngStream::new(seed, index)).unwrap();
        prop_assert_eq!(a, b);
    }
}
