use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zptower::analysis::KernelProfile;
use zptower::cartier::{cartier_matrix, derivative, madden_basis, CartierTables};
use zptower::gf::FieldElement;
use zptower::poly::SparsePoly;
use zptower::tower::{closed_form_basic, genus, TowerSpec, TowerState};

fn spec_strategy() -> impl Strategy<Value = TowerSpec> {
    (prop::sample::select(vec![2u32, 3, 5]), 2u64..=9, prop::collection::vec((0u32..2, 1i64..5, 1u64..9), 0..3))
        .prop_filter_map("valid spec", |(p, d, extra)| {
            if d % p as u64 == 0 {
                return None;
            }
            let mut terms = vec![(0, 1, d)];
            terms.extend(extra.into_iter().filter(|t| t.2 < d && t.1 % p as i64 != 0));
            TowerSpec::from_int_terms(p, &terms, "random").ok()
        })
}

fn random_poly(st: &TowerState, n: usize, rng: &mut ChaCha8Rng) -> SparsePoly {
    let ctx = st.field();
    let p = ctx.p() as u8;
    let terms: Vec<(u32, Vec<u8>, FieldElement)> = (0..rng.gen_range(1..5))
        .map(|_| (rng.gen_range(0..10), (0..n).map(|_| rng.gen_range(0..p)).collect(), ctx.random(rng)))
        .collect();
    SparsePoly::from_terms(n, terms, ctx)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn basis_size_kernel_shape_and_exactness(spec in spec_strategy(), seed in any::<u64>()) {
        let n = if spec.p() == 2 { 3 } else { 2 };
        let st = TowerState::build(&spec, n).unwrap();
        let tables = CartierTables::build(&st, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for level in 1..=n {
            let g = genus(&spec, level).unwrap();
            prop_assert_eq!(st.genus(level), g);
            prop_assert_eq!(madden_basis(&st, level).unwrap().len() as u64, g);
            let prof = KernelProfile::stabilized(&cartier_matrix(&st, &tables, level).unwrap()).unwrap();
            prop_assert!(prof.is_well_shaped());
            prop_assert_eq!(*prof.kernels.last().unwrap() as u64, g);
            for _ in 0..10 {
                let h = random_poly(&st, level, &mut rng);
                prop_assert!(tables.apply(&st, &derivative(&h, &st, level), level).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn basic_towers_match_closed_form(p in prop::sample::select(vec![2u32, 3, 5, 7]), d in 1u64..40, n in 1u32..5) {
        prop_assume!(d % p as u64 != 0);
        let spec = TowerSpec::basic(p, d).unwrap();
        prop_assert_eq!(genus(&spec, n as usize).unwrap(), closed_form_basic(p, d, n).unwrap().genus);
    }

    #[test]
    fn normalization_fixes_the_hash(e in 1u64..6, c in 1i64..3) {
        let a = TowerSpec::from_int_terms(3, &[(0, 1, 7), (0, c, e * 3)], "a").unwrap();
        let b = TowerSpec::from_int_terms(3, &[(0, 1, 7), (0, c, e)], "b").unwrap();
        prop_assert_eq!(a.spec_hash(), b.spec_hash());
        prop_assert!(a.normalize().is_normalized());
    }
}
