use proptest::prelude::*;

use sequd_core::augud::{run_augud, AugudConfig};
use sequd_core::design::{cd2, cd2_squared, random_balanced, Cd2Cache, LevelDesign, UnitDesign};
use sequd_core::objective::{Direction, EvalError};
use sequd_core::samplers::{sample, SamplerKind};
use sequd_core::sequd::{run_sequd, stage_spacing, zoom_levels, shift_into_bounds, SequdConfig};
use sequd_core::space::{ParamSpec, ParamValue, Scale, SearchSpace, TrialConfig};

fn unit_design() -> impl Strategy<Value = UnitDesign> {
    (1usize..25, 1usize..6).prop_flat_map(|(n, s)| {
        prop::collection::vec(prop::collection::vec(0.0f64..=1.0, s), n)
            .prop_map(move |rows| UnitDesign::from_rows(&rows, s).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cd2_reflection_invariant(d in unit_design()) {
        let a = cd2(&d).unwrap();
        prop_assert!((cd2(&d.reflect()).unwrap() - a).abs() < 1e-12);
    }

    #[test]
    fn cd2_permutation_invariant(d in unit_design(), seed in any::<u64>()) {
        let mut rows = d.to_rows();
        let n = rows.len();
        let s = d.factors();
        // deterministic shuffle from the seed
        let mut state = seed | 1;
        let mut next = || { state ^= state << 13; state ^= state >> 7; state ^= state << 17; state };
        for i in (1..n).rev() {
            let j = (next() % (i as u64 + 1)) as usize;
            rows.swap(i, j);
        }
        let shift = (next() % s as u64) as usize;
        let permuted: Vec<Vec<f64>> = rows.iter().map(|r| (0..s).map(|c| r[(c + shift) % s]).collect()).collect();
        let p = UnitDesign::from_rows(&permuted, s).unwrap();
        prop_assert!((cd2(&p).unwrap() - cd2(&d).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn cd2_is_nonnegative(d in unit_design()) {
        prop_assert!(cd2_squared(&d).unwrap() >= -1e-15);
    }

    #[test]
    fn unit_points_lie_in_cells(n in 1usize..40, s in 1usize..5, seed in any::<u64>()) {
        for kind in [SamplerKind::Random, SamplerKind::Lhs, SamplerKind::Sobol] {
            let d = sample(kind, n, s, seed).unwrap();
            prop_assert_eq!(d.runs(), n);
            prop_assert!(d.as_flat().iter().all(|x| (0.0..=1.0).contains(x)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn cache_tracks_naive_over_exchanges(seed in any::<u64>(), n in 4usize..20, s in 1usize..5) {
        let q = n;
        let d = random_balanced(n, s, q, seed).unwrap();
        let mut cache = Cd2Cache::new(&d.to_unit()).unwrap();
        let mut state = seed | 1;
        let mut next = |m: usize| { state ^= state << 13; state ^= state >> 7; state ^= state << 17; (state % m as u64) as usize };
        for _ in 0..1000 {
            let col = next(s);
            let a = next(n);
            let b = (a + 1 + next(n - 1)) % n;
            let predicted = cache.squared() + cache.exchange_delta(col, a, b).unwrap();
            cache.commit_exchange(col, a, b).unwrap();
            prop_assert!((cache.squared() - predicted).abs() < 1e-12);
        }
        let naive = cd2_squared(&cache.to_unit_design()).unwrap();
        prop_assert!((cache.squared() - naive).abs() < 1e-12);
    }

    #[test]
    fn augmentation_preserves_balance(seed in any::<u64>(), m in 1usize..4, s in 1usize..4, q in 2usize..6) {
        // fixed block of m*q runs, balanced on its own; add q more
        let fixed = random_balanced(m * q, s, q, seed).unwrap().into_inner();
        let cfg = AugudConfig { m_outer: 5, m_inner: 20, ..AugudConfig::default().with_seed(seed) };
        let res = run_augud(&fixed, q, s, q, &cfg).unwrap();
        let combined = fixed.stack(&res.design).unwrap();
        prop_assert!(combined.is_balanced());
        prop_assert_eq!(res.design.runs(), q);
        let check = cd2_squared(&combined.to_unit()).unwrap();
        prop_assert!((check - res.combined_cd2_squared).abs() < 1e-12);
    }

    #[test]
    fn augmentation_never_worsens_initial(seed in any::<u64>()) {
        let res = run_augud(&LevelDesign::empty(2, 10), 20, 2, 10, &AugudConfig::default().with_seed(seed)).unwrap();
        prop_assert!(res.combined_cd2_squared <= res.initial_cd2_squared);
    }
}

proptest! {
    #[test]
    fn zoom_spacing_and_bounds(x in 0.0f64..=1.0, j in 2usize..30, q in 1usize..30) {
        let axis = zoom_levels(x, j, q).unwrap();
        let expected = 1.0 / (2f64.powi(j as i32 - 1) * q as f64);
        prop_assert!((axis.spacing - expected).abs() <= 1e-15);
        prop_assert_eq!(stage_spacing(j, q), axis.spacing);
        prop_assert!(axis.levels.iter().any(|&l| (l - x).abs() < 1e-15));
        let shifted = shift_into_bounds(axis.clone());
        prop_assert_eq!(shifted.levels.len(), q);
        prop_assert!(shifted.levels.iter().all(|l| (0.0..=1.0).contains(l)));
        for w in shifted.levels.windows(2) {
            prop_assert!((w[1] - w[0] - axis.spacing).abs() < 1e-12);
        }
    }

    #[test]
    fn decode_stays_in_bounds(u in prop::collection::vec(0.0f64..=1.0, 6)) {
        let space = SearchSpace::new(vec![
            ParamSpec::continuous("lr", 1e-4, 1.0, Scale::Log10).unwrap(),
            ParamSpec::continuous("c", -2.0, 3.0, Scale::Linear).unwrap(),
            ParamSpec::integer("depth", 1, 12, Scale::Linear).unwrap(),
            ParamSpec::integer("trees", 8, 512, Scale::Log2).unwrap(),
            ParamSpec::categorical("kernel", &["rbf", "linear"]).unwrap(),
        ]).unwrap();
        prop_assert_eq!(space.dimension(), 6);
        let cfg = space.decode(&u).unwrap();
        let f = |name: &str| cfg.get(name).unwrap().clone();
        match (f("lr"), f("c"), f("depth"), f("trees"), f("kernel")) {
            (ParamValue::Float(lr), ParamValue::Float(c), ParamValue::Int(d), ParamValue::Int(t), ParamValue::Category(k)) => {
                prop_assert!((1e-4..=1.0).contains(&lr));
                prop_assert!((-2.0..=3.0).contains(&c));
                prop_assert!((1..=12).contains(&d));
                prop_assert!((8..=512).contains(&t));
                prop_assert!(k == "rbf" || k == "linear");
            }
            other => prop_assert!(false, "unexpected kinds {:?}", other),
        }
        let again = space.decode(&space.encode(&cfg).unwrap()).unwrap();
        for ((_, a), (_, b)) in again.values.iter().zip(&cfg.values) {
            match (a, b) {
                (ParamValue::Float(x), ParamValue::Float(y)) => prop_assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0)),
                _ => prop_assert_eq!(a, b),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn incumbent_is_monotone(seed in any::<u64>(), fail_every in 2usize..7) {
        let space = SearchSpace::unit_box(&[(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let objective = move |c: &TrialConfig, trial: usize| {
            if trial.is_multiple_of(fail_every) {
                return Err(EvalError::Other("skip".into()));
            }
            let x = c.numeric().unwrap();
            Ok((7.0 * x[0]).sin() + (5.0 * x[1]).cos())
        };
        let cfg = SequdConfig { t_max: 60, seed, ..SequdConfig::default() };
        let h = run_sequd(&space, &objective, &cfg).unwrap();
        prop_assert!(h.len() <= 60);
        let bsf = h.best_so_far();
        prop_assert!(bsf.windows(2).all(|w| w[1] >= w[0]));
        let inc = h.incumbent().unwrap();
        prop_assert_eq!(Some(inc.value), bsf.last().copied());
        // earliest trial among equals
        prop_assert!(h.records()[..inc.trial].iter().all(|r| !r.status.is_ok() || r.value < inc.value));
        prop_assert_eq!(h.direction, Direction::Maximize);
    }
}
