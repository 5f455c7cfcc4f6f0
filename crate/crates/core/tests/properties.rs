//! Property suites: eigensolver residuals, unitary evolution, split
//! exactness, lift/quotient consistency.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;

use qwsearch::{
    default_split_spec, eigh, equitable_partition, evolve_state, full_hamiltonian, lift,
    quotient_hamiltonian, split, superposition_state, FamilyKind, SplitSpec,
};

/// Random symmetric matrix from an upper-triangle entry list.
fn symmetric_from(order: usize, upper: &[f64]) -> DMatrix<f64> {
    let mut h = DMatrix::zeros(order, order);
    let mut it = upper.iter();
    for i in 0..order {
        for j in i..order {
            let x = *it.next().unwrap();
            h[(i, j)] = x;
            h[(j, i)] = x;
        }
    }
    h
}

fn symmetric_strategy(max_order: usize) -> impl Strategy<Value = DMatrix<f64>> {
    (1..=max_order).prop_flat_map(|d| {
        proptest::collection::vec(-10.0f64..10.0, d * (d + 1) / 2)
            .prop_map(move |upper| symmetric_from(d, &upper))
    })
}

fn family_strategy() -> impl Strategy<Value = (FamilyKind, usize)> {
    prop_oneof![
        (2usize..200).prop_map(|n| (FamilyKind::Complete, n)),
        (3usize..12).prop_map(|m| (FamilyKind::SimplexComplete, m)),
        (2usize..8).prop_map(|n| (FamilyKind::Hypercube, n)),
    ]
}

proptest! {
    #[test]
    fn eigh_residuals_and_orthonormality(h in symmetric_strategy(50)) {
        let d = h.nrows();
        let decomp = eigh(&h).unwrap();
        for i in 0..d {
            let v = decomp.eigenvectors.column(i);
            let residual = (&h * v - decomp.eigenvalues[i] * v).norm();
            prop_assert!(
                residual <= 1e-10 * decomp.eigenvalues[i].abs().max(1.0),
                "residual {residual} for eigenvalue {}", decomp.eigenvalues[i]
            );
        }
        let gram = decomp.eigenvectors.transpose() * &decomp.eigenvectors;
        prop_assert!((gram - DMatrix::identity(d, d)).abs().max() <= 1e-10);
    }

    #[test]
    fn evolution_is_unitary_and_conserves_energy(
        h in symmetric_strategy(20),
        raw in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 20),
        t in 0.0f64..50.0,
    ) {
        let d = h.nrows();
        let mut psi0 = DVector::from_iterator(
            d,
            raw.iter().take(d).map(|&(re, im)| Complex64::new(re, im)),
        );
        let norm = psi0.norm();
        prop_assume!(norm > 1e-3);
        psi0 /= Complex64::new(norm, 0.0);

        let energy = |psi: &DVector<Complex64>| -> f64 {
            let h_psi = &h.map(|x| Complex64::new(x, 0.0)) * psi;
            psi.dotc(&h_psi).re
        };
        let psi_t = evolve_state(&h, &psi0, t).unwrap();
        prop_assert!((psi_t.norm() - 1.0).abs() <= 1e-10, "norm drift {}", psi_t.norm() - 1.0);
        prop_assert!(
            (energy(&psi_t) - energy(&psi0)).abs() <= 1e-10,
            "energy drift {}", energy(&psi_t) - energy(&psi0)
        );
    }

    #[test]
    fn split_is_exact_bit_for_bit(
        (family, size) in family_strategy(),
        gamma in 0.001f64..2.0,
        use_mask in proptest::bool::ANY,
    ) {
        let g = family.build(size).unwrap();
        let p = equitable_partition(&g);
        let h = quotient_hamiltonian(&g, &p, gamma).unwrap();
        let spec = if use_mask || family == FamilyKind::Hypercube {
            SplitSpec::mask(vec![(0, 1)])
        } else {
            default_split_spec(family).unwrap()
        };
        let ps = split(&h, &spec).unwrap();
        for i in 0..h.order {
            for j in 0..h.order {
                let sum = ps.h0[(i, j)] + ps.h1[(i, j)];
                prop_assert_eq!(sum.to_bits(), h.entries[(i, j)].to_bits());
                prop_assert!(ps.h0[(i, j)] == 0.0 || ps.h1[(i, j)] == 0.0);
            }
        }
    }

    #[test]
    fn lift_preserves_norm(
        (family, size) in family_strategy(),
        raw in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 32),
    ) {
        let g = family.build(size).unwrap();
        let p = equitable_partition(&g);
        let d = p.num_classes();
        prop_assume!(d <= raw.len());
        let reduced = DVector::from_iterator(
            d,
            raw.iter().take(d).map(|&(re, im)| Complex64::new(re, im)),
        );
        let full = lift(&p, &reduced).unwrap();
        prop_assert!((full.norm() - reduced.norm()).abs() <= 1e-12);
    }

    #[test]
    fn quotient_agrees_with_full_hamiltonian(
        (family, size) in prop_oneof![
            (2usize..32).prop_map(|n| (FamilyKind::Complete, n)),
            (3usize..5).prop_map(|m| (FamilyKind::SimplexComplete, m)),
            (2usize..6).prop_map(|n| (FamilyKind::Hypercube, n)),
        ],
        gamma in 0.01f64..2.0,
        raw in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
    ) {
        let g = family.build(size).unwrap();
        let p = equitable_partition(&g);
        let d = p.num_classes();
        prop_assume!(2 * d <= raw.len());
        let h_red = quotient_hamiltonian(&g, &p, gamma).unwrap();
        let h_full = full_hamiltonian(&g, gamma).unwrap();
        let hc = h_full.entries.map(|x| Complex64::new(x, 0.0));

        let vec_at = |offset: usize| {
            DVector::from_iterator(
                d,
                raw[offset..offset + d].iter().map(|&(re, im)| Complex64::new(re, im)),
            )
        };
        let (x, y) = (vec_at(0), vec_at(d));
        // <lift(x)| H_full |lift(y)> = <x| H_red |y>
        let lhs = lift(&p, &x).unwrap().dotc(&(&hc * lift(&p, &y).unwrap()));
        let rhs = x.dotc(&(&h_red.entries.map(|v| Complex64::new(v, 0.0)) * &y));
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()),
            "lhs {lhs}, rhs {rhs}");
    }

    #[test]
    fn superposition_lifts_to_uniform(
        (family, size) in prop_oneof![
            (2usize..64).prop_map(|n| (FamilyKind::Complete, n)),
            (3usize..6).prop_map(|m| (FamilyKind::SimplexComplete, m)),
            (2usize..7).prop_map(|n| (FamilyKind::Hypercube, n)),
        ],
    ) {
        let g = family.build(size).unwrap();
        let p = equitable_partition(&g);
        let s = superposition_state(&p).map(|x| Complex64::new(x, 0.0));
        let full = lift(&p, &s).unwrap();
        let expected = 1.0 / (g.num_vertices() as f64).sqrt();
        for v in 0..g.num_vertices() {
            prop_assert!((full[v].re - expected).abs() <= 1e-12);
            prop_assert!(full[v].im == 0.0);
        }
    }
}
