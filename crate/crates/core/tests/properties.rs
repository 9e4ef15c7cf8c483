use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spreadmod::approx::{minimal_approximation, resolve, support_restrict, universal_approximation};
use spreadmod::gen;
use spreadmod::hom::{hom_basis, kernel_module};
use spreadmod::invariants::{
    class_via_hom_matrix, class_via_resolution, generalized_rank, rank_invariant, rank_via_hooks,
    signed_diagram,
};
use spreadmod::{
    enumerate_spreads, ElemSet, Family, Fp, Mat, PersistenceModule, Poset, ResolutionStatus,
    Spread, SpreadKind,
};

fn small_field() -> impl Strategy<Value = Fp> {
    prop::sample::select(vec![2u32, 3, 5, 7, 32003]).prop_map(|p| Fp::new(p).unwrap())
}

fn matrix() -> impl Strategy<Value = Mat> {
    (small_field(), 0usize..6, 0usize..6).prop_flat_map(|(f, r, c)| {
        prop::collection::vec(-3i64..4, r * c).prop_map(move |v| {
            let rows: Vec<Vec<i64>> = v.chunks(c.max(1)).map(|ch| ch.to_vec()).take(r).collect();
            if c == 0 {
                Mat::zeros(f, r, 0)
            } else {
                Mat::from_rows(f, c, &rows)
            }
        })
    })
}

fn grids() -> Vec<Arc<Poset>> {
    vec![
        Arc::new(gen::grid(2, 2, 0)),
        Arc::new(gen::grid(3, 2, 1)),
    ]
}

fn module_on(p: &Arc<Poset>, seed: u64) -> PersistenceModule {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gen::random_module(p, Fp::default(), &mut rng, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_nullity(m in matrix()) {
        let k = m.kernel_basis();
        prop_assert_eq!(m.rank() + k.cols(), m.cols());
        prop_assert!(m.mul(&k).is_zero());
        prop_assert_eq!(k.rank(), k.cols());
    }

    #[test]
    fn transpose_rank(m in matrix()) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn solve_returns_a_solution(m in matrix(), pick in 0usize..8) {
        if m.cols() > 0 {
            let b = m.column(pick % m.cols());
            let x = m.solve(&b).expect("a column is in the image");
            prop_assert_eq!(m.mul_vec(&x), b);
        }
    }

    #[test]
    fn class_is_additive(seed_a in any::<u64>(), seed_b in any::<u64>(), which in 0usize..2) {
        let p = grids()[which].clone();
        let fam = Family::builtin(p.clone(), Fp::default(), SpreadKind::SingleSource, 10_000).unwrap();
        let a = module_on(&p, seed_a);
        let b = module_on(&p, seed_b);
        let ab = PersistenceModule::direct_sum(&[a.clone(), b.clone()]).unwrap();
        let ca = class_via_resolution(&fam, &a, 32).unwrap();
        let cb = class_via_resolution(&fam, &b, 32).unwrap();
        let cab = class_via_resolution(&fam, &ab, 32).unwrap();
        prop_assert_eq!(ca.add(&cb), cab);
    }

    #[test]
    fn class_algorithms_agree(seed in any::<u64>(), which in 0usize..2) {
        let p = grids()[which].clone();
        let fam = Family::builtin(p.clone(), Fp::default(), SpreadKind::SingleSource, 10_000).unwrap();
        let m = module_on(&p, seed);
        prop_assert_eq!(
            class_via_resolution(&fam, &m, 32).unwrap(),
            class_via_hom_matrix(&fam, &m).unwrap()
        );
    }

    #[test]
    fn hooks_recover_ranks(seed in any::<u64>(), which in 0usize..2) {
        let p = grids()[which].clone();
        let m = module_on(&p, seed);
        prop_assert_eq!(rank_via_hooks(&m), rank_invariant(&m));
    }

    #[test]
    fn rank_table_bounds(seed in any::<u64>(), which in 0usize..2) {
        let p = grids()[which].clone();
        let m = module_on(&p, seed);
        let r = rank_invariant(&m);
        for (a, b, k) in r.pairs() {
            prop_assert!(k <= m.dim(a).min(m.dim(b)));
            if a == b {
                prop_assert_eq!(k, m.dim(a));
            }
            for c in 0..p.len() {
                if p.leq(a, c) && p.leq(c, b) {
                    prop_assert!(k <= r.get(a, c).unwrap().min(r.get(c, b).unwrap()));
                }
            }
        }
    }

    #[test]
    fn generalized_rank_on_intervals(seed in any::<u64>(), which in 0usize..2) {
        let p = grids()[which].clone();
        let m = module_on(&p, seed);
        let r = rank_invariant(&m);
        for (a, b, k) in r.pairs() {
            let s = Spread::from_antichains(&p, ElemSet::singleton(a), ElemSet::singleton(b)).unwrap();
            prop_assert_eq!(generalized_rank(&m, &s).unwrap(), k);
        }
    }

    #[test]
    fn mobius_round_trip(seed in any::<u64>(), which in 0usize..2) {
        let p = grids()[which].clone();
        let m = module_on(&p, seed);
        let r = enumerate_spreads(&p, SpreadKind::ConnectedAll, 10_000).unwrap();
        let d = signed_diagram(&m, &r).unwrap();
        let ranks: Vec<i64> = d.ranks.iter().map(|&x| x as i64).collect();
        prop_assert_eq!(d.reconstruct_ranks(), ranks);
    }

    #[test]
    fn spread_sums_have_exact_diagrams(seed in any::<u64>()) {
        let p = Arc::new(gen::grid(3, 2, 1));
        let r = enumerate_spreads(&p, SpreadKind::ConnectedAll, 10_000).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (m, mult) = gen::random_spread_sum(&p, Fp::default(), &r, &mut rng, 3);
        let d = signed_diagram(&m, &r).unwrap();
        let want: Vec<i64> = mult.iter().map(|&k| k as i64).collect();
        prop_assert_eq!(d.coeffs, want);
    }

    #[test]
    fn resolutions_are_exact(seed in any::<u64>(), which in 0usize..2) {
        let p = grids()[which].clone();
        let fam = Family::builtin(p.clone(), Fp::default(), SpreadKind::Hook, 10_000).unwrap();
        let m = module_on(&p, seed);
        let res = resolve(&fam, &m, 32).unwrap();
        prop_assert_eq!(res.status, ResolutionStatus::Finite);
        prop_assert!(res.is_exact(&m));
    }

    #[test]
    fn approximations_have_the_lifting_property(seed in any::<u64>(), which in 0usize..2) {
        let p = grids()[which].clone();
        let fam = Family::builtin(p.clone(), Fp::default(), SpreadKind::Interval, 10_000).unwrap();
        let m = module_on(&p, seed);
        let a = minimal_approximation(&fam, &m).unwrap();
        let u = universal_approximation(&fam, &m).unwrap();
        for (x, y) in a.multiplicities.iter().zip(&u.multiplicities) {
            prop_assert!(x <= y);
        }
        for r in fam.modules() {
            // Every map R -> M factors: composites with the approximation
            // span Hom(R, M).
            let through = hom_basis(r, a.domain()).unwrap();
            let cols: Vec<Vec<u32>> = through
                .basis
                .iter()
                .map(|h| a.map.after(h).unwrap().to_vector())
                .collect();
            let len = spreadmod::hom::hom_space_len(r, &m);
            let rank = Mat::from_columns(Fp::default(), len, &cols).rank();
            prop_assert_eq!(rank, hom_basis(r, &m).unwrap().dim());
        }
    }

    #[test]
    fn kernels_embed(seed in any::<u64>()) {
        let p = Arc::new(gen::grid(2, 2, 0));
        let fam = Family::builtin(p.clone(), Fp::default(), SpreadKind::Interval, 10_000).unwrap();
        let m = module_on(&p, seed);
        let a = minimal_approximation(&fam, &m).unwrap();
        let (k, incl) = kernel_module(&a.map);
        prop_assert!(incl.is_mono());
        prop_assert!(a.map.after(&incl).unwrap().is_zero());
        for x in 0..p.len() {
            prop_assert_eq!(k.dim(x) + m.dim(x), a.domain().dim(x));
        }
    }

    #[test]
    fn restriction_keeps_minimal_terms(seed in any::<u64>(), which in 0usize..2) {
        let p = grids()[which].clone();
        let fam = Family::builtin(p.clone(), Fp::default(), SpreadKind::SingleSource, 10_000).unwrap();
        let m = module_on(&p, seed);
        let sub = support_restrict(&fam, &m).unwrap();
        let full = resolve(&fam, &m, 32).unwrap();
        let small = resolve(&sub, &m, 32).unwrap();
        let lifted: Vec<Vec<usize>> = small
            .terms
            .iter()
            .map(|t| spreadmod::approx::lift_multiplicities(&fam, &sub, t))
            .collect();
        prop_assert_eq!(lifted, full.terms);
    }
}
