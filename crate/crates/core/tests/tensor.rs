use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use hypercavity_core::analysis::negativity;
use hypercavity_core::tensor::{max_abs_diff, partial_trace, CMatrix};
use hypercavity_core::{
    basis_state, inner, kron_oracle, DensityMatrix, GateOp, StateVector, SubsystemKind, SubsystemLayout, C64,
};

fn layout3() -> SubsystemLayout {
    SubsystemLayout::builder().cavity("c", 3).aux("x").subsystem("m", SubsystemKind::Momentum, 2).build().unwrap()
}

fn amps(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| v.into_iter().map(|(a, b)| C64::new(a, b)).collect())
}

/// Unitary from a QR decomposition of a random complex matrix.
fn unitary(d: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), d * d).prop_map(move |v| {
        let m = CMatrix::from_iterator(d, d, v.into_iter().map(|(a, b)| C64::new(a, b)));
        m.qr().q()
    })
}

/// Full matrix of `u` on `targets` built entry by entry from the index
/// digits, independent of the library's Kronecker assembly.
fn brute_force_full(u: &CMatrix, targets: &[usize], dims: &[usize]) -> CMatrix {
    let n: usize = dims.iter().product();
    let digits = |mut i: usize| {
        let mut d = vec![0; dims.len()];
        for p in (0..dims.len()).rev() {
            d[p] = i % dims[p];
            i /= dims[p];
        }
        d
    };
    let local = |d: &[usize]| targets.iter().fold(0, |acc, &p| acc * dims[p] + d[p]);
    let mut full = CMatrix::zeros(n, n);
    for i in 0..n {
        let di = digits(i);
        for j in 0..n {
            let dj = digits(j);
            let rest_equal = (0..dims.len()).filter(|p| !targets.contains(p)).all(|p| di[p] == dj[p]);
            if rest_equal {
                full[(i, j)] = u[(local(&di), local(&dj))];
            }
        }
    }
    full
}

#[test]
fn superposition_of_cavity_states() {
    let l = SubsystemLayout::builder().cavity("c", 2).atom("a").build().unwrap();
    let s0 = basis_state(&l, &[("c", 0), ("a.int", 0), ("a.mom", 0)]).unwrap();
    let s1 = basis_state(&l, &[("c", 1), ("a.int", 0), ("a.mom", 0)]).unwrap();
    let plus = StateVector::superpose(&[(C64::new(1.0, 0.0), &s0), (C64::new(1.0, 0.0), &s1)]).unwrap();
    assert_abs_diff_eq!(plus.amplitudes()[0].re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
    assert_abs_diff_eq!(plus.amplitudes()[4].re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
    assert!(basis_state(&l, &[("c", 2), ("a.int", 0), ("a.mom", 0)]).is_err());
}

#[test]
fn bell_marginal_is_maximally_mixed() {
    let l = SubsystemLayout::builder().aux("x").aux("y").build().unwrap();
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let bell = StateVector::new(l, vec![one, zero, zero, one]).unwrap();
    let r = partial_trace(&bell.density(), &["x"]).unwrap();
    assert!(max_abs_diff(r.matrix(), &(CMatrix::identity(2, 2) * C64::new(0.5, 0.0))) < 1e-15);
    assert!(partial_trace(&bell.density(), &[]).is_err());
}

#[test]
fn non_adjacent_two_target_oracle() {
    let l = SubsystemLayout::builder().aux("p").cavity("c", 3).aux("q").build().unwrap();
    let mut u = CMatrix::zeros(4, 4);
    // CNOT with control q, target p, listed as (q, p)
    u[(0, 0)] = C64::new(1.0, 0.0);
    u[(1, 1)] = C64::new(1.0, 0.0);
    u[(2, 3)] = C64::new(1.0, 0.0);
    u[(3, 2)] = C64::new(1.0, 0.0);
    let g = GateOp::new(vec!["q".into(), "p".into()], vec![2, 2], u.clone()).unwrap();
    let full = kron_oracle(&g, &l, 4096).unwrap();
    assert_eq!(full, brute_force_full(&u, &[2, 0], &l.dims()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn apply_gate_matches_oracle(a in amps(12), u in unitary(6), order in 0usize..2) {
        let l = layout3();
        let s = StateVector::new(l.clone(), a).unwrap();
        let (targets, dims, pos) = if order == 0 {
            (vec!["c".to_string(), "m".to_string()], vec![3, 2], vec![0, 2])
        } else {
            (vec!["m".to_string(), "c".to_string()], vec![2, 3], vec![2, 0])
        };
        let g = GateOp::new(targets, dims, u.clone()).unwrap();
        let full = kron_oracle(&g, &l, 4096).unwrap();
        prop_assert!(max_abs_diff(&full, &brute_force_full(&u, &pos, &l.dims())) < 1e-15);
        let fast = s.apply(&g).unwrap();
        let dense = s.apply_dense(&full).unwrap();
        let diff = fast.amplitudes().iter().zip(dense.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-10);
        prop_assert!((fast.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inner_is_conjugate_symmetric_and_permutation_invariant(a in amps(12), b in amps(12)) {
        let l = layout3();
        let sa = StateVector::new(l.clone(), a).unwrap();
        let sb = StateVector::new(l, b).unwrap();
        let ab = inner(&sa, &sb).unwrap();
        prop_assert!((ab - inner(&sb, &sa).unwrap().conj()).norm() < 1e-15);
        let order = ["m", "c", "x"];
        let pa = sa.permute(&order).unwrap();
        let pb = sb.permute(&order).unwrap();
        prop_assert!((inner(&pa, &pb).unwrap() - ab).norm() < 1e-12);
        let back = pa.permute(&["c", "x", "m"]).unwrap();
        prop_assert_eq!(back, sa);
    }

    #[test]
    fn reduced_density_of_product_is_pure(a in amps(3), b in amps(4)) {
        let la = SubsystemLayout::builder().cavity("c", 3).build().unwrap();
        let lb = SubsystemLayout::builder().aux("x").aux("y").build().unwrap();
        let sa = StateVector::new(la, a).unwrap();
        let sb = StateVector::new(lb, b).unwrap();
        let prod = sa.tensor(&sb).unwrap();
        let r = prod.reduced_density(&["c"]).unwrap();
        prop_assert!((r.purity() - 1.0).abs() < 1e-10);
        prop_assert!(max_abs_diff(r.matrix(), sa.density().matrix()) < 1e-12);
        let via_full = partial_trace(&prod.density(), &["x", "y"]).unwrap();
        prop_assert!(max_abs_diff(via_full.matrix(), sb.density().matrix()) < 1e-12);
        prop_assert!((via_full.trace() - 1.0).abs() < 1e-12);
        prop_assert!(negativity(&prod.density(), &["c"]).unwrap() < 1e-9);
    }

    #[test]
    fn negativity_is_local_unitary_invariant(a in amps(8), ua in unitary(2), ub in unitary(4)) {
        let l = SubsystemLayout::builder().aux("x").aux("y").aux("z").build().unwrap();
        let s = StateVector::new(l, a).unwrap();
        let n0 = negativity(&s.density(), &["x"]).unwrap();
        let ga = GateOp::new(vec!["x".into()], vec![2], ua).unwrap();
        let gb = GateOp::new(vec!["z".into(), "y".into()], vec![2, 2], ub).unwrap();
        let t = s.apply(&ga).unwrap().apply(&gb).unwrap();
        let n1 = negativity(&t.density(), &["x"]).unwrap();
        prop_assert!((n0 - n1).abs() < 1e-9);
    }
}

#[test]
fn density_validation() {
    let l = SubsystemLayout::builder().aux("x").build().unwrap();
    let bad = CMatrix::identity(2, 2);
    assert!(DensityMatrix::new(l.clone(), bad).is_err());
    let half = CMatrix::identity(2, 2) * C64::new(0.5, 0.0);
    assert!(DensityMatrix::new(l, half).is_ok());
}
