use middleconv::matrixmc::jordan;
use middleconv::rational::{q, qi};
use middleconv::*;
use proptest::prelude::*;
use proptest::sample::subsequence;

fn partition(n: u32) -> impl Strategy<Value = Vec<u32>> {
    // Random composition of n, sorted.
    prop::collection::vec(any::<bool>(), (n - 1) as usize).prop_map(move |cuts| {
        let mut parts = vec![1u32];
        for c in cuts {
            if c {
                parts.push(1);
            } else {
                *parts.last_mut().unwrap() += 1;
            }
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        parts
    })
}

fn spectral_type() -> impl Strategy<Value = SpectralType> {
    (2u32..=8, 3usize..=5).prop_flat_map(|(n, k)| {
        prop::collection::vec(partition(n), k)
            .prop_map(|rows| SpectralType::untrimmed(rows).unwrap())
    })
}

/// A tuple with a random relabelling of partitions and of parts inside each.
fn with_permutation() -> impl Strategy<Value = (SpectralType, Vec<usize>, Vec<Vec<usize>>)> {
    spectral_type().prop_flat_map(|m| {
        let k = m.len();
        let sigma = Just((0..k).collect::<Vec<_>>()).prop_shuffle();
        let within: Vec<_> = m
            .partitions()
            .iter()
            .map(|p| Just((0..p.len()).collect::<Vec<_>>()).prop_shuffle())
            .collect();
        (Just(m), sigma, within)
    })
}

fn small_matrix(n: usize) -> impl Strategy<Value = RationalMatrix> {
    prop::collection::vec(-4i64..=4, n * n).prop_map(move |v| {
        let rows: Vec<&[i64]> = v.chunks(n).collect();
        RationalMatrix::from_i64(&rows).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn canonical_form_is_idempotent(m in spectral_type()) {
        let c = canonicalize(&m);
        prop_assert_eq!(canonicalize(c.as_type()), c.clone());
        prop_assert_eq!(c.order(), m.order());
    }

    #[test]
    fn relabelling_preserves_invariants((m, sigma, within) in with_permutation()) {
        let g = m.permuted(&sigma, &within).unwrap();
        prop_assert_eq!(canonicalize(&g), canonicalize(&m));
        prop_assert_eq!(g.index_of_rigidity(), m.index_of_rigidity());
        prop_assert_eq!(classify(&g), classify(&m));
    }

    #[test]
    fn idx_with_itself_is_index_of_rigidity(m in spectral_type()) {
        prop_assert_eq!(idx(&m, &m), m.index_of_rigidity());
        prop_assert_eq!(m.index_of_rigidity() % 2, 0);
        prop_assert_eq!(inner(&alpha_of(&m), &alpha_of(&m)), m.index_of_rigidity());
    }

    #[test]
    fn trivial_partitions_do_not_change_idx(m in spectral_type()) {
        let mut rows = m.partitions().to_vec();
        rows.push(vec![m.order()]);
        let padded = SpectralType::untrimmed(rows).unwrap();
        prop_assert_eq!(padded.index_of_rigidity(), m.index_of_rigidity());
    }

    #[test]
    fn reduction_preserves_idx_and_order_drops(m in spectral_type()) {
        let t = reduce(&m);
        for st in &t.steps {
            if let Some(out) = &st.output {
                prop_assert_eq!(out.as_type().index_of_rigidity(), st.input.index_of_rigidity());
                prop_assert_eq!(
                    i64::from(out.order()),
                    i64::from(st.input.order()) - st.d
                );
            }
        }
        let c = classify(&m);
        prop_assert_eq!(c.rigid, t.verdict == Verdict::Rigid);
        if c.indivisible {
            prop_assert_eq!(c.irreducibly_realizable, t.verdict != Verdict::NotRealizable);
        }
    }

    #[test]
    fn realizable_types_are_positive_roots(m in spectral_type()) {
        let c = classify(&m);
        if c.irreducibly_realizable {
            prop_assert!(c.root_class.is_positive());
        }
    }

    #[test]
    fn build_l_has_the_requested_spectrum(m in partition(6), shift in -5i64..=5) {
        // Distinct eigenvalues give one semisimple block per part.
        let lam: Vec<Q> = (0..m.len() as i64).map(|i| qi(shift + i)).collect();
        let a = build_l(&m, &lam).unwrap();
        let want: Vec<(Q, Vec<u32>)> = lam.iter().cloned().zip(m.iter().map(|&x| vec![x])).collect();
        let mut got = spectral_data_of(&a).unwrap();
        got.sort_by(|x, y| x.0.cmp(&y.0));
        prop_assert_eq!(got, want);
        // One eigenvalue gives the partition m itself.
        let same = vec![qi(shift); m.len()];
        let b = build_l(&m, &same).unwrap();
        prop_assert_eq!(spectral_data_of(&b).unwrap(), vec![(qi(shift), m.clone())]);
    }

    #[test]
    fn centralizer_is_a_similarity_invariant(a in small_matrix(3), g in small_matrix(3)) {
        prop_assume!(g.rank() == 3);
        let b = &(&g.inverse().unwrap() * &a) * &g;
        prop_assert_eq!(centralizer_dim(&b).unwrap(), centralizer_dim(&a).unwrap());
        prop_assert_eq!(b.char_poly(), a.char_poly());
    }

    #[test]
    fn rank_nullity(a in small_matrix(4)) {
        prop_assert_eq!(a.rank() + a.nullspace().len(), 4);
        let (r, piv) = a.rref();
        prop_assert_eq!(piv.len(), a.rank());
        prop_assert_eq!(r.rank(), a.rank());
    }

    #[test]
    fn inverse_round_trip(a in small_matrix(3)) {
        if let Ok(inv) = a.inverse() {
            prop_assert_eq!(&a * &inv, RationalMatrix::identity(3));
        } else {
            prop_assert!(a.rank() < 3);
        }
    }

    #[test]
    fn rational_eigenvalues_are_roots(a in small_matrix(3)) {
        if let Ok(eigs) = a.rational_eigenvalues() {
            let p = a.char_poly().unwrap();
            for (mu, _) in &eigs {
                prop_assert_eq!(p.eval(mu), qi(0));
            }
            prop_assert_eq!(eigs.iter().map(|(_, m)| m).sum::<usize>(), 3);
        }
    }

    #[test]
    fn conjugation_keeps_spectral_data(
        e in subsequence(vec![-3i64, -1, 1, 2, 4], 3),
        g in small_matrix(3),
    ) {
        prop_assume!(g.rank() == 3);
        let vals: Vec<Q> = e.into_iter().map(qi).collect();
        let a1 = RationalMatrix::from_rows(vec![
            vec![vals[0].clone(), qi(1), qi(0)],
            vec![qi(0), vals[1].clone(), qi(1)],
            vec![qi(0), qi(0), vals[2].clone()],
        ]).unwrap();
        let a2 = jordan(3, &q(1, 2));
        let t = MatrixTuple::from_residues(vec![a1, a2]).unwrap();
        let u = t.conjugate(&g).unwrap();
        prop_assert_eq!(SpectralData::of(&u).unwrap(), SpectralData::of(&t).unwrap());
        prop_assert_eq!(orbit_dims(&u).unwrap(), orbit_dims(&t).unwrap());
    }
}
