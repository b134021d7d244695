use heatbo::benchmarks::{parse_wcnf, synthetic_wcnf};
use heatbo::bo::{ball_size, enumerate_ball, TrustRegion, TrustRegionConfig};
use heatbo::kernels::{elementary_symmetric, gram, heat_rho, pad_sort, Family, KernelSpec};
use heatbo::linalg::sym_eigenvalues;
use heatbo::space::{hamming_distance, sample_automorphism, sample_relocation};
use heatbo::{Point, SearchSpace};
use proptest::prelude::*;

fn space_strategy() -> impl Strategy<Value = SearchSpace> {
    prop::collection::vec(2usize..6, 1..6).prop_map(|c| SearchSpace::new(c).unwrap())
}

fn space_and_points(m: usize) -> impl Strategy<Value = (SearchSpace, Vec<Point>)> {
    space_strategy().prop_flat_map(move |s| {
        let coords: Vec<_> = s.cardinalities().iter().map(|&g| 0..g).collect();
        let pts = prop::collection::vec(coords.prop_map(Point), 1..=m);
        (Just(s), pts)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relocation_preserves_hamming_and_heat_gram(
        (space, pts) in space_and_points(8),
        seed in any::<u64>(),
        beta in 0.01f64..3.0,
    ) {
        let r = sample_relocation(&space, seed);
        let moved: Vec<Point> = pts.iter().map(|p| r.apply(p)).collect();
        for (p, q) in pts.iter().zip(&moved) {
            prop_assert_eq!(&r.invert(q), p);
        }
        let spec = KernelSpec::heat(&space, vec![beta], 1.0).unwrap();
        let a = gram(&space, &spec, &pts).unwrap();
        let b = gram(&space, &spec, &moved).unwrap();
        prop_assert!((a - b).abs().max() <= 1e-12);
        for x in &pts {
            for y in &pts {
                prop_assert_eq!(
                    hamming_distance(x, y).unwrap(),
                    hamming_distance(&r.apply(x), &r.apply(y)).unwrap()
                );
            }
        }
    }

    #[test]
    fn automorphisms_invert_and_preserve_distance(n in 1usize..6, g in 2usize..5, seed in any::<u64>()) {
        let space = SearchSpace::uniform(n, g).unwrap();
        let a = sample_automorphism(&space, seed);
        let id = a.compose(&a.inverse());
        for x in space.enumerate().take(50) {
            prop_assert_eq!(&id.apply(&x), &x);
            let y = space.point_at((space.index_of(&x) * 7 + 3) % space.num_points().unwrap());
            prop_assert_eq!(
                hamming_distance(&x, &y).unwrap(),
                hamming_distance(&a.apply(&x), &a.apply(&y)).unwrap()
            );
        }
    }

    #[test]
    fn hamming_profile_grams_are_psd(
        (space, pts) in space_and_points(20),
        ls in 0.05f64..8.0,
        alpha in 0.05f64..8.0,
        which in 0usize..3,
    ) {
        let (family, a) = match which {
            0 => (Family::HammingRbf, None),
            1 => (Family::HammingMatern52, None),
            _ => (Family::HammingRq, Some(alpha)),
        };
        let spec = KernelSpec::hamming(&space, family, ls, a, 1.0).unwrap();
        let eig = sym_eigenvalues(&gram(&space, &spec, &pts).unwrap());
        prop_assert!(eig[0] >= -1e-8 * eig[eig.len() - 1]);
    }

    #[test]
    fn heat_rho_is_a_correlation(beta in 0.0f64..50.0, g in 2usize..40) {
        let r = heat_rho(beta, g);
        prop_assert!(r > -1.0 / (g as f64 - 1.0) && r <= 1.0);
    }

    #[test]
    fn elementary_symmetric_endpoints(v in prop::collection::vec(-2.0f64..2.0, 1..9)) {
        let e = elementary_symmetric(&v);
        let sum: f64 = v.iter().sum();
        let prod: f64 = v.iter().product();
        prop_assert!((e[1] - sum).abs() < 1e-10);
        prop_assert!((e[v.len()] - prod).abs() < 1e-10);
    }

    #[test]
    fn pad_sort_ignores_order(n in 1usize..10, g in 2usize..6, seed in any::<u64>(), raw in prop::collection::vec(0usize..100, 10)) {
        let space = SearchSpace::uniform(n, g).unwrap();
        let x = Point(raw[..n].iter().map(|v| v % g).collect());
        let mut rev = x.0.clone();
        rev.reverse();
        rev.rotate_left((seed % n as u64) as usize);
        prop_assert_eq!(pad_sort(&space, &x).unwrap(), pad_sort(&space, &Point(rev)).unwrap());
    }

    #[test]
    fn point_text_round_trip(coords in prop::collection::vec(0usize..1000, 0..12)) {
        let p = Point(coords);
        prop_assert_eq!(p.to_string().parse::<Point>().unwrap(), p.clone());
        prop_assert_eq!(Point::parse_with(&p.join(";"), ';').unwrap(), p);
    }

    #[test]
    fn trust_region_radius_stays_in_bounds(n in 1usize..12, steps in prop::collection::vec(any::<bool>(), 0..200)) {
        let space = SearchSpace::binary(n).unwrap();
        let mut tr = TrustRegion::new(&space, Point(vec![0; n]), &TrustRegionConfig::default()).unwrap();
        for improved in steps {
            tr.update(improved);
            prop_assert!(tr.radius >= tr.l_min && tr.radius <= tr.l_max);
        }
    }

    #[test]
    fn ball_enumeration_matches_size(cards in prop::collection::vec(2usize..4, 1..6), r in 0usize..6) {
        let space = SearchSpace::new(cards).unwrap();
        let center = Point(vec![0; space.dims()]);
        let ball = enumerate_ball(&space, &center, r);
        prop_assert_eq!(ball.len(), ball_size(&space, r));
        prop_assert!(ball.iter().all(|p| hamming_distance(p, &center).unwrap() <= r));
    }

    #[test]
    fn wcnf_round_trips(vars in 1usize..20, clauses in 1usize..30, seed in any::<u64>()) {
        let inst = synthetic_wcnf(vars, clauses, seed).unwrap();
        prop_assert_eq!(parse_wcnf(&inst.to_wcnf()).unwrap(), inst);
    }
}
