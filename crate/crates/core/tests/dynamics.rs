mod common;

use gpt_core::boxes::pr_state;
use gpt_core::circuits::permutation_matrix;
use gpt_core::dynamics::{
    apply, canonicalize_effect, check_admissibility, cloning_lp, decompose_measurement,
    decompose_relabellings, disturbance_decomposition, embed, fig2_rotation, fig3_shrink,
    fig4_rotation, is_classical, is_well_defined, lift, measurement_distribution, no_cloning_check,
    Operation, Relabelling, Transformation,
};
use gpt_core::linalg::Matrix;
use gpt_core::lp::{solve_lp, LpStatus, Sense};
use gpt_core::protocols::pure_gbit;
use gpt_core::rational::{dot, int, rat, Rational, Vector};
use gpt_core::space::{is_member, vertices};
use gpt_core::state::{Effect, StateVector};
use gpt_core::system::{Party, SystemType, Theory};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn gbit_map(m: Matrix) -> Transformation {
    Transformation::new(SystemType::gbit(), m).unwrap()
}

fn measurement_swap() -> Matrix {
    let mut r = Relabelling::identity(Party::GBIT);
    r.measurement_map = vec![1, 0];
    r.matrix()
}

#[test]
fn figure_transformations() {
    assert!(is_well_defined(&gbit_map(fig2_rotation()), &[]).unwrap());
    assert!(is_well_defined(&gbit_map(fig3_shrink()), &[]).unwrap());
    let rot = check_admissibility(&gbit_map(fig4_rotation()), &[]).unwrap();
    assert!(!rot.well_defined);
    assert!(rot.failure.is_some());
}

#[test]
fn explicit_ancilla_list() {
    let anc = [
        SystemType::gbit(),
        SystemType::single(Theory::Gnst, 3, 2).unwrap(),
    ];
    assert!(is_well_defined(&gbit_map(fig2_rotation()), &anc).unwrap());
}

#[test]
fn apply_and_lift() {
    let pr = pr_state();
    assert_eq!(
        apply(&Transformation::identity(pr.system.clone()), &pr).unwrap(),
        pr
    );
    let rot = gbit_map(fig2_rotation());
    let a = pure_gbit([0, 1]);
    let b = pure_gbit([1, 1]);
    let lifted = lift(&rot, 2, 0).unwrap();
    let ab = a.tensor(&b).unwrap();
    let want = apply(&rot, &a).unwrap().tensor(&b).unwrap();
    assert_eq!(apply(&lifted, &ab).unwrap().entries, want.entries);
    let zero = gbit_map(Matrix::zeros(4, 4));
    assert!(apply(&zero, &a).unwrap().entries.iter().all(Zero::is_zero));
}

#[test]
fn decompose_identity() {
    let dec = decompose_relabellings(&Transformation::identity(SystemType::gbit())).unwrap();
    assert_eq!(dec.terms.len(), 1);
    assert_eq!(dec.terms[0].weight, int(1));
    assert_eq!(dec.terms[0].measurement_map, vec![0, 1]);
    assert!(dec.terms[0]
        .outcome_matrices
        .iter()
        .all(|s| *s == Matrix::identity(2)));
}

#[test]
fn decompose_quarter_turn() {
    let dec = decompose_relabellings(&gbit_map(fig2_rotation())).unwrap();
    assert_eq!(dec.terms.len(), 1);
    assert_eq!(dec.terms[0].measurement_map, vec![1, 0]);
    let flips = dec.terms[0]
        .outcome_matrices
        .iter()
        .filter(|s| **s != Matrix::identity(2))
        .count();
    assert_eq!(flips, 1);
    assert!(dec.has_zero_residual());
}

#[test]
fn decompose_half_swap() {
    let m = Matrix::identity(4)
        .scale(&rat(1, 2))
        .add(&measurement_swap().scale(&rat(1, 2)))
        .unwrap();
    let dec = decompose_relabellings(&gbit_map(m)).unwrap();
    let mut w: Vec<Rational> = dec.terms.iter().map(|t| t.weight.clone()).collect();
    w.sort();
    assert_eq!(w, vec![rat(1, 2), rat(1, 2)]);
}

#[test]
fn decomposition_rejects_the_eighth_turn() {
    assert!(decompose_relabellings(&gbit_map(fig4_rotation())).is_err());
}

#[test]
fn canonical_effects() {
    let g = SystemType::gbit();
    let r = Effect::new(g.clone(), vec![int(2), int(1), int(-1), int(-1)]).unwrap();
    let c = canonicalize_effect(&r).unwrap();
    assert_eq!(c.entries, vec![int(1), int(0), int(0), int(0)]);
    for v in vertices(&g).unwrap() {
        assert_eq!(dot(&r.entries, &v), dot(&c.entries, &v));
    }
    let id = Effect::identity(g.clone());
    assert_eq!(canonicalize_effect(&id).unwrap(), id);
    let z = Effect::new(g.clone(), vec![Rational::zero(); 4]).unwrap();
    assert_eq!(canonicalize_effect(&z).unwrap(), z);
}

#[test]
fn classicality() {
    assert!(is_classical(&SystemType::classical(6)).unwrap());
    assert!(!is_classical(&SystemType::gbit()).unwrap());
    assert!(!is_classical(&SystemType::single(Theory::Gnst, 3, 2).unwrap()).unwrap());
}

#[test]
fn disturbance_blocks() {
    let c = disturbance_decomposition(&SystemType::classical(4)).unwrap();
    assert_eq!(c.blocks.len(), 4);
    assert!(c.blocks.iter().all(|b| b.pure_states.len() == 1));
    let g = disturbance_decomposition(&SystemType::gbit()).unwrap();
    assert_eq!(g.blocks.len(), 1);
    assert_eq!(g.blocks[0].pure_states.len(), 4);
    assert!(g.block_scalar);
    let cube = disturbance_decomposition(&SystemType::single(Theory::Gnst, 3, 2).unwrap()).unwrap();
    assert_eq!(cube.blocks.len(), 1);
    assert_eq!(cube.blocks[0].pure_states.len(), 8);
}

/// Independent check that maps fixing every pure gbit state up to a scalar
/// are scalar: solve `M v = c_v v` directly over 16 + 4 unknowns.
#[test]
fn gbit_non_disturbing_maps_are_scalar_oracle() {
    let verts = vertices(&SystemType::gbit()).unwrap();
    let mut rows = Vec::new();
    for (k, v) in verts.iter().enumerate() {
        for i in 0..4 {
            let mut row = vec![Rational::zero(); 20];
            for j in 0..4 {
                row[i * 4 + j] = v[j].clone();
            }
            row[16 + k] = -v[i].clone();
            rows.push(row);
        }
    }
    let null = gpt_core::linalg::nullspace(&rows, 20);
    for n in &null {
        let c = &n[16..];
        assert!(c.iter().all(|x| *x == c[0]), "non-scalar profile {c:?}");
    }
    let d = disturbance_decomposition(&SystemType::gbit()).unwrap();
    // Profiles c_v span one dimension.
    let profiles: Vec<Vector> = null.iter().map(|n| n[16..].to_vec()).collect();
    assert_eq!(
        gpt_core::linalg::rank(&profiles),
        d.non_disturbing_dimension
    );
}

#[test]
fn no_cloning_for_gbits() {
    let report = no_cloning_check(&SystemType::gbit()).unwrap();
    for v in &report.verdicts {
        assert!(!v.deterministic_feasible);
        let h = cloning_lp(&SystemType::gbit(), &v.standard, true).unwrap();
        assert!(v.certificate.as_ref().unwrap().verify(&h));
        assert!(v.probabilistic_optimum.is_zero());
    }
    let bit = no_cloning_check(&SystemType::classical(2)).unwrap();
    assert!(bit
        .verdicts
        .iter()
        .all(|v| v.deterministic_feasible && v.witness_map.is_some()));
}

#[test]
fn cloning_lp_re_solves_to_infeasible() {
    let q = pure_gbit([0, 0]).entries;
    let h = cloning_lp(&SystemType::gbit(), &q, true).unwrap();
    let r = solve_lp(&vec![Rational::zero(); h.ambient_dim], &h, Sense::Minimize).unwrap();
    assert_eq!(r.status, LpStatus::Infeasible);
}

#[test]
fn measurement_structure() {
    // Effects of measuring x1 with probability 1/2 and x2 otherwise.
    let g = SystemType::gbit();
    let effects = vec![
        vec![rat(1, 2), int(0), rat(1, 2), int(0)],
        vec![int(0), rat(1, 2), int(0), rat(1, 2)],
    ];
    let dec = decompose_measurement(&g, &effects).unwrap();
    let p = pure_gbit([0, 1]);
    let dist = measurement_distribution(&dec, &p).unwrap();
    assert_eq!(dist, vec![rat(1, 2), rat(1, 2)]);
    assert_eq!(dec.reconstruct().to_rows(), effects);
}

#[test]
fn operation_branches_sum_to_input_norm() {
    let g = SystemType::gbit();
    let half = |m: Matrix| Transformation::new(g.clone(), m.scale(&rat(1, 2))).unwrap();
    let op = Operation {
        branches: vec![half(fig2_rotation()), half(Matrix::identity(4))],
    };
    assert!(op.is_complete().unwrap());
    let short = Operation {
        branches: vec![half(Matrix::identity(4))],
    };
    assert!(!short.is_complete().unwrap());
}

/// Three-gbit candidates. Whether bipartite structure results extend to more
/// parties is open, so these only record what the checker says.
#[test]
fn three_gbit_candidates() {
    let three = SystemType::gbits(Theory::Gnst, 3);
    let cycle =
        Transformation::new(three.clone(), permutation_matrix(Party::GBIT, &[1, 2, 0])).unwrap();
    assert!(is_well_defined(&cycle, &[]).unwrap());
    let local = Transformation::new(
        three.clone(),
        embed(&fig2_rotation(), &three, &[1]).unwrap(),
    )
    .unwrap();
    assert!(is_well_defined(&local, &[]).unwrap());
    let bad = Transformation::new(
        three.clone(),
        embed(&fig4_rotation(), &three, &[2]).unwrap(),
    )
    .unwrap();
    assert!(!is_well_defined(&bad, &[]).unwrap());
}

#[test]
fn relabellings_of_a_gbit() {
    let all = Relabelling::all(Party::GBIT);
    assert_eq!(all.len(), 64);
    assert_eq!(all.iter().filter(|r| r.is_reversible()).count(), 8);
    let v = pure_gbit([1, 0]).entries;
    for r in &all {
        assert_eq!(r.apply(&v), r.matrix().mul_vec(&v).unwrap());
    }
}

proptest! {
    #[test]
    fn maps_commute_with_mixing(seed in 0u64..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = common::random_relabelling_mixture(&mut rng, 3);
        let verts = vertices(&SystemType::gbit()).unwrap();
        let (terms, mix) = common::random_mixture(&mut rng, &verts, 3);
        let lhs = t.matrix.mul_vec(&mix).unwrap();
        let mut rhs = vec![Rational::zero(); 4];
        for (w, p) in &terms {
            for (r, x) in rhs.iter_mut().zip(t.matrix.mul_vec(p).unwrap()) {
                *r += w * x;
            }
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn rows_of_admissible_maps_are_effects(seed in 0u64..100) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = if seed % 4 == 0 {
            gbit_map(common::adversarial_admissible(&mut rng))
        } else {
            common::random_relabelling_mixture(&mut rng, 4)
        };
        for row in t.matrix.to_rows() {
            let c = canonicalize_effect(&Effect::new(SystemType::gbit(), row).unwrap()).unwrap();
            prop_assert!(c.entries.iter().all(|x| *x >= Rational::zero()));
            prop_assert!(c.is_valid_on(&vertices(&SystemType::gbit()).unwrap()));
        }
    }

    #[test]
    fn admissible_maps_keep_the_square(seed in 0u64..100) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = if seed % 4 == 0 {
            gbit_map(common::adversarial_admissible(&mut rng))
        } else {
            common::random_relabelling_mixture(&mut rng, 4)
        };
        for v in vertices(&SystemType::gbit()).unwrap() {
            let img = StateVector::new(SystemType::gbit(), t.matrix.mul_vec(&v).unwrap()).unwrap();
            prop_assert!(is_member(&img, &SystemType::gbit()).unwrap());
        }
    }

    #[test]
    fn decompositions_reconstruct(seed in 0u64..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = common::random_relabelling_mixture(&mut rng, 4);
        let dec = decompose_relabellings(&t).unwrap();
        prop_assert!(dec.has_zero_residual());
        let total: Rational = dec.terms.iter().map(|t| t.weight.clone()).sum();
        prop_assert!(total.is_one());
    }

    #[test]
    fn operation_branch_sums(seed in 0u64..100, k in 1i64..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = common::random_relabelling_mixture(&mut rng, 2);
        let b = common::random_relabelling_mixture(&mut rng, 2);
        let op = Operation {
            branches: vec![
                gbit_map(a.matrix.scale(&rat(k, 4))),
                gbit_map(b.matrix.scale(&rat(4 - k, 4))),
            ],
        };
        prop_assert!(op.is_complete().unwrap());
    }
}
