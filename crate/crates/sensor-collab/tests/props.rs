//! Property tests for the index algebra and proximal operators.

use nalgebra::DVector;
use proptest::prelude::*;

use sensor_collab::admm::{block_soft_threshold, soft_threshold};
use sensor_collab::model::{
    col_of, group_indices, reshape_to_matrix, row_of, vectorize,
};

proptest! {
    #[test]
    fn vectorization_indices_consistent(n in 1usize..8, l_frac in 0.0f64..1.0) {
        let l = ((n * n - 1) as f64 * l_frac) as usize;
        let r = row_of(l, n);
        let c = col_of(l, n);
        prop_assert_eq!(r * n + c, l);
        prop_assert!(group_indices(r, n).contains(&l));
    }

    #[test]
    fn reshape_round_trip(n in 1usize..6, seed in 0u64..1000) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let w = DVector::from_fn(n * n, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
        let back = vectorize(&reshape_to_matrix(&w, n));
        prop_assert_eq!(back, w);
    }

    #[test]
    fn soft_threshold_is_nonexpansive_shrinkage(b in -5.0f64..5.0, t in 0.0f64..2.0) {
        let v = soft_threshold(
            &DVector::from_column_slice(&[b]),
            &DVector::from_column_slice(&[t]),
        );
        // Shrinks toward zero, never past it, never changes sign.
        prop_assert!(v[0].abs() <= b.abs() + 1e-12);
        prop_assert!(v[0] * b >= 0.0);
        prop_assert!((b - v[0]).abs() <= t + 1e-12);
    }

    #[test]
    fn block_soft_threshold_shrinks_norm(
        b1 in -3.0f64..3.0,
        b2 in -3.0f64..3.0,
        d in 0.0f64..3.0,
        rho in 0.5f64..5.0,
    ) {
        let b = DVector::from_column_slice(&[b1, b2]);
        let v = block_soft_threshold(&b, &DVector::zeros(2), d, rho);
        prop_assert!(v.norm() <= b.norm() + 1e-12);
        // With zero entrywise weights the output is colinear with b.
        if v.norm() > 1e-12 {
            let cos = v.dot(&b) / (v.norm() * b.norm());
            prop_assert!((cos - 1.0).abs() < 1e-9);
        }
    }
}
