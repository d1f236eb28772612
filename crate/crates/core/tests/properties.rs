mod common;

use clustermod::scalar::rational;
use clustermod::Flavor;
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn check(c: Check) -> Result<(), TestCaseError> {
    c.map_err(TestCaseError::fail)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mutation_is_involutive(s in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let seed = random_seed(&mut rng);
        let k = random_vertex(&mut rng, &seed);
        check(seed_involution(&seed, k))?;
        check(a_involution(&seed, k, &random_a(&mut rng, &seed)))?;
        check(x_involution(&seed, k, &random_x(&mut rng, &seed)))?;
        check(trop_involution(&seed, k, &random_trop(&mut rng, &seed, Flavor::A)))?;
        check(trop_involution(&seed, k, &random_trop(&mut rng, &seed, Flavor::X)))?;
    }

    #[test]
    fn p_map_is_natural(s in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let seed = random_seed(&mut rng);
        let k = random_vertex(&mut rng, &seed);
        check(p_naturality(&seed, k, &random_a(&mut rng, &seed)))?;
    }

    #[test]
    fn mutation_is_equivariant(s in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let seed = random_seed(&mut rng);
        let k = random_vertex(&mut rng, &seed);
        let sigma = random_iso(&mut rng, &seed);
        let (a, x) = (random_a(&mut rng, &seed), random_x(&mut rng, &seed));
        check(sigma_equivariance(&seed, k, &sigma, &a, &x))?;
    }

    #[test]
    fn tropical_mutation_is_homogeneous(s in any::<u64>(), num in 1i64..50, den in 1i64..50) {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let seed = random_seed(&mut rng);
        let k = random_vertex(&mut rng, &seed);
        for flavor in [Flavor::A, Flavor::X] {
            check(homogeneity(&seed, k, &random_trop(&mut rng, &seed, flavor), &rational(num, den)))?;
        }
    }

    #[test]
    fn words_have_inverses(s in any::<u64>(), len in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let seed = random_seed(&mut rng);
        let w = random_word(&mut rng, &seed, len);
        let (a, x) = (random_a(&mut rng, &seed), random_x(&mut rng, &seed));
        check(word_inverse(&seed, &w, &a, &x))?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn tropical_limit_of_finite_scale(s in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let seed = random_seed(&mut rng);
        let w = random_word(&mut rng, &seed, 3);
        for flavor in [Flavor::A, Flavor::X] {
            let gap = finite_eps_gap(&seed, &w, &random_trop(&mut rng, &seed, flavor), 1e-4);
            prop_assert!(gap < 5e-3, "gap {gap}");
        }
    }
}
