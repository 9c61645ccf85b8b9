mod common;

use common::{c, lambda, random_vector, rng, table_identity, table_inverse};
use hopf_cstar::examples::{
    convolution_element, convolve, cyclic_fourier, finite_group, function_algebra, group_algebra, haar_state,
    monoid_function_algebra, pi, reconstruct_group, reflect, small_groups, FiniteGroup,
};
use hopf_cstar::{galois_maps, is_hopf, CStarAlgebra, Comultiplication, Error, GroupError, HopfStructure, LinearOperator, Tensor, C64};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn real(v: &[f64]) -> Vec<C64> {
    v.iter().map(|&x| c(x, 0.0)).collect()
}

#[test]
fn group_validation() {
    let z3 = finite_group(3, vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]).unwrap();
    assert_eq!(z3.identity(), 0);
    assert!(z3.is_abelian());
    let s3 = FiniteGroup::symmetric3();
    assert_eq!(s3.order(), 6);
    assert!(!s3.is_abelian());
    assert_eq!(finite_group(2, vec![vec![0, 1], vec![1, 1]]).unwrap_err(), GroupError::NoInverse(1));
    assert!(finite_group(2, vec![vec![0, 1]]).is_err());
}

#[test]
fn small_group_tables_match_brute_force() {
    for (name, g) in small_groups() {
        let t = g.table();
        assert_eq!(g.identity(), table_identity(t), "{name}");
        for p in 0..g.order() {
            assert_eq!(g.inverse(p), table_inverse(t, p), "{name}");
        }
    }
}

#[test]
fn function_algebra_examples() {
    let (alg, comult) = function_algebra(&FiniteGroup::cyclic(2)).unwrap();
    assert_eq!(alg.dim(), 2);
    let maps = galois_maps(&comult).unwrap();
    assert_eq!((maps.t1.rank(), maps.t2.rank()), (4, 4));

    let g = FiniteGroup::symmetric3();
    let (alg, comult) = function_algebra(&g).unwrap();
    let h = HopfStructure::new(comult, TOL).unwrap();
    for p in 0..6 {
        let expect = if p == g.identity() { 1.0 } else { 0.0 };
        assert!((h.counit(&alg.basis_element(p)).unwrap() - c(expect, 0.0)).norm() < TOL);
    }

    let (alg, comult) = function_algebra(&FiniteGroup::trivial()).unwrap();
    assert_eq!(alg.dim(), 1);
    let maps = galois_maps(&comult).unwrap();
    for t in [&maps.t1, &maps.t2, &maps.t_tilde, &maps.t_hat] {
        assert_eq!(t.matrix()[(0, 0)], c(1.0, 0.0));
    }
}

#[test]
fn group_algebra_examples() {
    let g = FiniteGroup::cyclic(2);
    let (alg, comult) = group_algebra(&g).unwrap();
    let blocks = alg.basis_element(1).blocks();
    assert_eq!(blocks[0], lambda(&g, 1));
    assert_eq!(blocks[0][(0, 1)], c(1.0, 0.0));
    let l1 = alg.basis_element(1);
    assert!(comult.apply(&l1).unwrap().try_sub(&Tensor::elementary(&[&l1, &l1])).unwrap().hs_norm() < 1e-15);

    let g = FiniteGroup::symmetric3();
    let (alg, comult) = group_algebra(&g).unwrap();
    let h = HopfStructure::new(comult, TOL).unwrap();
    let mut r = rng(2);
    for _ in 0..5 {
        let f: Vec<C64> = random_vector(6, &mut r).iter().cloned().collect();
        let a = pi(&alg, &f).unwrap();
        let sum: C64 = f.iter().sum();
        assert!((h.counit(&a).unwrap() - sum).norm() < TOL);
        let reflected = pi(&alg, &reflect(&g, &f)).unwrap();
        assert!((&h.antipode(&a).unwrap() - &reflected).hs_norm() < TOL);
    }
}

#[test]
fn convolution_examples() {
    let z2 = FiniteGroup::cyclic(2);
    let d0 = real(&[1.0, 0.0]);
    let (h, _) = convolution_element(&z2, &d0, &d0).unwrap();
    assert_eq!(h.coords().as_slice(), &d0[..]);

    let z3 = FiniteGroup::cyclic(3);
    let ones = real(&[1.0, 1.0, 1.0]);
    let (h, _) = convolution_element(&z3, &ones, &ones).unwrap();
    assert!(h.coords().iter().all(|z| (*z - c(3.0, 0.0)).norm() < 1e-14));
    let (alg, comult) = function_algebra(&z3).unwrap();
    let hs = HopfStructure::new(comult, TOL).unwrap();
    let h = alg.element(h.into_coords()).unwrap();
    assert!((hs.counit(&h).unwrap() - c(3.0, 0.0)).norm() < TOL);

    let zero = real(&[0.0, 0.0, 0.0]);
    let (h, k) = convolution_element(&z3, &zero, &ones).unwrap();
    assert_eq!(h.hs_norm(), 0.0);
    assert_eq!(k.hs_norm(), 0.0);
    assert!(matches!(convolution_element(&z3, &ones, &d0), Err(Error::InvalidInput(_))));
}

#[test]
fn convolution_witness_satisfies_t1() {
    let mut r = rng(9);
    for (name, g) in small_groups() {
        let n = g.order();
        let (alg, comult) = function_algebra(&g).unwrap();
        let hs = HopfStructure::new(comult.clone(), TOL).unwrap();
        let maps = galois_maps(&comult).unwrap();
        let f: Vec<C64> = random_vector(n, &mut r).iter().cloned().collect();
        let q: Vec<C64> = random_vector(n, &mut r).iter().cloned().collect();
        let (h, k) = convolution_element(&g, &f, &q).unwrap();
        let h = alg.element(h.into_coords()).unwrap();
        let k = Tensor::new(vec![alg.clone(), alg.clone()], k.into_coords()).unwrap();
        let lhs = maps.t1.apply(&k).unwrap();
        assert!(lhs.try_sub(&Tensor::elementary(&[&h, &alg.one()])).unwrap().hs_norm() < 1e-12, "{name}");
        let hv = h.coords();
        assert!((hs.counit(&h).unwrap() - hv[g.identity()]).norm() < TOL, "{name}");
        let s = hs.antipode(&h).unwrap();
        for p in 0..n {
            assert!((s.coords()[p] - hv[g.inverse(p)]).norm() < TOL, "{name}");
        }
    }
}

#[test]
fn monoid_examples() {
    let (_, comult) = monoid_function_algebra(&[vec![0, 1], vec![1, 1]]).unwrap();
    let v = is_hopf(&comult, TOL).unwrap();
    assert!(v.is_comultiplication && !v.is_hopf);
    assert_eq!(v.rank_t1, 3);
    let (_, comult) = monoid_function_algebra(FiniteGroup::cyclic(4).table()).unwrap();
    assert!(is_hopf(&comult, TOL).unwrap().is_hopf);
    let (_, comult) = monoid_function_algebra(&[vec![0]]).unwrap();
    assert!(is_hopf(&comult, TOL).unwrap().is_hopf);
    assert!(matches!(monoid_function_algebra(&[vec![1, 1], vec![0, 0]]), Err(Error::Group(GroupError::NotAssociative(..)))));
}

#[test]
fn haar_states() {
    for (name, g) in small_groups() {
        let n = g.order();
        let (alg, comult) = function_algebra(&g).unwrap();
        let h = haar_state(&comult, TOL).unwrap().unwrap();
        assert!(h.faithful && h.hopf_cross_check == Some(true), "{name}");
        assert!(h.invariance_residual <= 1e-10, "{name}");
        for p in 0..n {
            assert!((h.state.values()[p] - c(1.0 / n as f64, 0.0)).norm() < 1e-12, "{name}");
        }
        // h(S(a)*) = conj h(a).
        let hs = HopfStructure::new(comult, TOL).unwrap();
        let mut r = rng(n as u64);
        let a = alg.element(random_vector(n, &mut r)).unwrap();
        let lhs = h.state.eval(&hs.antipode(&a).unwrap().adjoint());
        assert!((lhs - h.state.eval(&a).conj()).norm() < 1e-12, "{name}");

        let (_, comult) = group_algebra(&g).unwrap();
        let h = haar_state(&comult, TOL).unwrap().unwrap();
        assert!(h.faithful && h.hopf_cross_check == Some(true), "{name}");
        assert!(h.invariance_residual <= 1e-10, "{name}");
        for p in 0..n {
            let expect = if p == g.identity() { 1.0 } else { 0.0 };
            assert!((h.state.values()[p] - c(expect, 0.0)).norm() < 1e-12, "{name}");
        }
    }
}

#[test]
fn a_tensor_one_has_no_invariant_state() {
    let a = CStarAlgebra::full(&[2]).unwrap();
    let legs = vec![a.clone(), a.clone()];
    let op = LinearOperator::from_basis_images(vec![a.clone()], legs, |x| Ok(Tensor::elementary(&[&x.to_element()?, &a.one()])))
        .unwrap();
    let comult = Comultiplication::new(op).unwrap();
    assert!(haar_state(&comult, TOL).unwrap().is_none());
}

#[test]
fn reconstruction_round_trip() {
    for (name, g) in small_groups() {
        let (_, comult) = function_algebra(&g).unwrap();
        let h = reconstruct_group(&comult, TOL).unwrap();
        assert_eq!(h.table(), g.table(), "{name}");
        assert!(h.is_isomorphic(&g), "{name}");
    }
    let z4 = reconstruct_group(&function_algebra(&FiniteGroup::cyclic(4)).unwrap().1, TOL).unwrap();
    let klein = FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2));
    let v4 = reconstruct_group(&function_algebra(&klein).unwrap().1, TOL).unwrap();
    assert_eq!(z4.order_profile(), vec![1, 2, 4, 4]);
    assert_eq!(v4.order_profile(), vec![1, 2, 2, 2]);
    assert!(!z4.is_isomorphic(&v4));
}

#[test]
fn reconstruction_of_a_relabelled_group() {
    // Points listed in a scrambled order still give an isomorphic group.
    let g = FiniteGroup::quaternion();
    let perm = [5, 2, 7, 0, 3, 6, 1, 4];
    let mut inv = [0; 8];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    let table: Vec<Vec<usize>> = (0..8).map(|a| (0..8).map(|b| perm[g.mul(inv[a], inv[b])]).collect()).collect();
    let (_, comult) = monoid_function_algebra(&table).unwrap();
    let h = reconstruct_group(&comult, TOL).unwrap();
    assert!(h.is_isomorphic(&g));
    assert!(!h.is_isomorphic(&FiniteGroup::dihedral(4)));
}

#[test]
fn reconstruction_failures() {
    let (_, comult) = monoid_function_algebra(&[vec![0, 1], vec![1, 1]]).unwrap();
    match reconstruct_group(&comult, TOL) {
        Err(Error::Precondition(msg)) => assert!(msg.contains("δ_0⊗δ_1"), "{msg}"),
        other => panic!("unexpected {other:?}"),
    }
    let (_, comult) = group_algebra(&FiniteGroup::symmetric3()).unwrap();
    assert!(matches!(reconstruct_group(&comult, TOL), Err(Error::Precondition(_))));
    // Commutative, but not given in its point basis.
    let (_, comult) = group_algebra(&FiniteGroup::cyclic(3)).unwrap();
    assert!(matches!(reconstruct_group(&comult, TOL), Err(Error::Precondition(_))));
    // ℂ with φ(1) = 1⊗1 is the trivial group.
    let alg = CStarAlgebra::full(&[1]).unwrap();
    let comult = Comultiplication::from_matrix(&alg, nalgebra::DMatrix::from_element(1, 1, c(1.0, 0.0))).unwrap();
    assert_eq!(reconstruct_group(&comult, TOL).unwrap().order(), 1);
}

#[test]
fn fourier_matches_counit_and_antipode() {
    for n in 2..=4 {
        let f = cyclic_fourier(n).unwrap();
        assert!(f.intertwining_residual().unwrap() < 1e-12);
        let ga = HopfStructure::new(f.group_algebra.clone(), TOL).unwrap();
        let fa = HopfStructure::new(f.dual.clone(), TOL).unwrap();
        for a in f.group_algebra.algebra().basis() {
            let fa_of = f.apply(&a).unwrap();
            assert!((ga.counit(&a).unwrap() - fa.counit(&fa_of).unwrap()).norm() < TOL);
            let lhs = f.apply(&ga.antipode(&a).unwrap()).unwrap();
            assert!((&lhs - &fa.antipode(&fa_of).unwrap()).hs_norm() < TOL);
        }
    }
    assert!(cyclic_fourier(0).is_err());
}

fn group_strategy() -> impl Strategy<Value = FiniteGroup> {
    (0..small_groups().len()).prop_map(|i| small_groups().swap_remove(i).1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pi_is_a_homomorphism(g in group_strategy(), seed in any::<u64>()) {
        let n = g.order();
        let (alg, _) = group_algebra(&g).unwrap();
        let mut r = rng(seed);
        let f: Vec<C64> = random_vector(n, &mut r).iter().cloned().collect();
        let q: Vec<C64> = random_vector(n, &mut r).iter().cloned().collect();
        let lhs = pi(&alg, &convolve(&g, &f, &q).unwrap()).unwrap();
        let rhs = &pi(&alg, &f).unwrap() * &pi(&alg, &q).unwrap();
        prop_assert!((&lhs - &rhs).hs_norm() < 1e-12);
        // Oracle: the same product through explicit translation matrices.
        let m = (0..n).fold(nalgebra::DMatrix::zeros(n, n), |acc, p| acc + lambda(&g, p) * f[p]);
        let k = (0..n).fold(nalgebra::DMatrix::zeros(n, n), |acc, p| acc + lambda(&g, p) * q[p]);
        prop_assert!((&lhs.blocks()[0] - m * k).norm() < 1e-12);
    }

    #[test]
    fn reflection_is_an_involution(g in group_strategy(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let f: Vec<C64> = random_vector(g.order(), &mut r).iter().cloned().collect();
        prop_assert_eq!(reflect(&g, &reflect(&g, &f)), f);
    }
}

#[test]
fn pi_of_point_mass_is_lambda() {
    let g = FiniteGroup::quaternion();
    let (alg, _) = group_algebra(&g).unwrap();
    for p in 0..8 {
        let mut f = vec![c(0.0, 0.0); 8];
        f[p] = c(1.0, 0.0);
        assert_eq!(pi(&alg, &f).unwrap().blocks()[0], lambda(&g, p));
    }
}
