use equiproj::groups::{sample_element, FiniteGroup, GroupSpec};
use equiproj::numerics::{svd, unvec, vec};
use equiproj::projector::{
    apply_projector, build_equivariant_projector, build_invariant_projector, build_smooth, materialize,
    schur_project, Cutoff, SchurProjector, SpectralBasis,
};
use equiproj::DenseMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn az() -> GroupSpec {
    GroupSpec::so3_z().equivariant()
}

fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DenseMatrix {
    DenseMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
}

fn orthonormal_columns(cols: &[DenseMatrix]) -> DenseMatrix {
    let n = cols[0].rows() * cols[0].cols();
    let mut q = DenseMatrix::zeros(n, cols.len());
    for (j, c) in cols.iter().enumerate() {
        let mut v = vec(c);
        for p in 0..j {
            let u = q.column(p);
            let dot: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(&u).for_each(|(a, b)| *a -= dot * b);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        q.set_column(j, &v);
    }
    q
}

/// Sine of the largest principal angle between span(q) and range(p).
fn max_principal_sine(p: &DenseMatrix, q: &DenseMatrix) -> f64 {
    let residual = &(&DenseMatrix::identity(p.rows()) - p) * q;
    svd(&residual).unwrap().sigma.last().copied().unwrap_or(0.0)
}

fn e(i: usize, j: usize) -> DenseMatrix {
    DenseMatrix::from_fn(3, 3, |r, c| if (r, c) == (i, j) { 1.0 } else { 0.0 })
}

#[test]
fn az_retained_subspaces_match_published_bases() {
    let v1 = &e(0, 0) + &e(1, 1);
    let v2 = &e(0, 1) - &e(1, 0);
    let v3 = e(2, 2);
    let family = [v1, v2, v3];
    let seven = [
        family[0].clone(),
        family[1].clone(),
        family[2].clone(),
        e(0, 2),
        e(1, 2),
        e(2, 0),
        e(2, 1),
    ];

    let p = build_equivariant_projector(&az(), 1.5).unwrap();
    assert_eq!(p.basis.as_ref().unwrap().cols(), 7);
    assert!(max_principal_sine(&p.matrix, &orthonormal_columns(&seven)) <= 1e-8);

    let p = build_equivariant_projector(&az(), 0.5).unwrap();
    assert_eq!(p.basis.as_ref().unwrap().cols(), 3);
    assert!(max_principal_sine(&p.matrix, &orthonormal_columns(&family)) <= 1e-8);
}

#[test]
fn az_low_cutoff_has_equivariant_pattern() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let p = build_equivariant_projector(&az(), 0.5).unwrap();
    for _ in 0..20 {
        let w = apply_projector(&p, &random_matrix(&mut rng, 3, 3)).unwrap();
        assert!((w[(0, 0)] - w[(1, 1)]).abs() <= 1e-10);
        assert!((w[(0, 1)] + w[(1, 0)]).abs() <= 1e-10);
        for (i, j) in [(0, 2), (1, 2), (2, 0), (2, 1)] {
            assert!(w[(i, j)].abs() <= 1e-10);
        }
    }
}

#[test]
fn full_pass_cutoff_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let p = build_equivariant_projector(&az(), 2.5).unwrap();
    let theta = random_matrix(&mut rng, 3, 3);
    assert!((&apply_projector(&p, &theta).unwrap() - &theta).max_abs() <= 1e-12);
}

#[test]
fn apply_rejects_wrong_shape() {
    let p = build_equivariant_projector(&az(), 0.5).unwrap();
    assert!(apply_projector(&p, &DenseMatrix::zeros(2, 3)).is_err());
    let inv = build_invariant_projector(&GroupSpec::so2(), 0.5).unwrap();
    assert_eq!(apply_projector(&inv, &DenseMatrix::zeros(2, 1)).unwrap().shape(), (2, 1));
    assert_eq!(apply_projector(&inv, &DenseMatrix::zeros(1, 2)).unwrap().shape(), (1, 2));
}

fn hard_specs() -> Vec<GroupSpec> {
    vec![
        GroupSpec::so2(),
        GroupSpec::so2().equivariant(),
        GroupSpec::so3(),
        GroupSpec::so3().equivariant(),
        az(),
        GroupSpec::cyclic_grid(3, 4).unwrap(),
        GroupSpec::cyclic_grid(3, 4).unwrap().equivariant(),
        GroupSpec::shift_circulant(6).unwrap().equivariant(),
    ]
}

#[test]
fn hard_projectors_are_symmetric_idempotent_and_monotone() {
    let cutoffs = [1e-9, 0.3, 0.5, 0.9, 1.2, 1.5, 1.9, 2.5, 3.5];
    for spec in hard_specs() {
        let basis = SpectralBasis::for_kind(
            &spec,
            if spec.is_invariance() {
                equiproj::projector::ProjectorKind::Invariant
            } else {
                equiproj::projector::ProjectorKind::Equivariant
            },
        )
        .unwrap();
        let ps: Vec<DenseMatrix> = cutoffs
            .iter()
            .map(|&b| basis.projector(b, Cutoff::Hard).unwrap().matrix)
            .collect();
        for b in &ps {
            assert!((&(b * b) - b).frobenius_norm() <= 1e-10);
            assert!((b - &b.transpose()).frobenius_norm() <= 1e-10);
        }
        for w in ps.windows(2) {
            assert!((&(&w[1] * &w[0]) - &w[0]).frobenius_norm() <= 1e-10);
        }
    }
}

#[test]
fn exact_cutoff_is_equivariant_for_whole_group() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let specs = vec![
        GroupSpec::so2().equivariant(),
        GroupSpec::so2(),
        GroupSpec::so3().equivariant(),
        GroupSpec::so3(),
        GroupSpec::cyclic_vec(4).unwrap().equivariant(),
        GroupSpec::shift_circulant(8).unwrap().equivariant(),
        GroupSpec::cyclic_grid(3, 4).unwrap(),
    ];
    for spec in specs {
        let p = build_equivariant_projector(&spec, 1e-9).unwrap();
        let w = apply_projector(&p, &random_matrix(&mut rng, spec.d_out(), spec.d_in())).unwrap();
        for _ in 0..100 {
            let g = sample_element(&spec, &mut rng).unwrap();
            let out = g.out_or_identity(spec.d_out());
            let r = &(&w * &g.matrix_in) - &(&out * &w);
            assert!(r.frobenius_norm() <= 1e-9, "{}", spec.kind.name());
        }
    }
}

#[test]
fn discrete_substitution_is_exact_on_small_cyclic_groups() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for spec in [
        GroupSpec::cyclic_vec(4).unwrap().equivariant(),
        GroupSpec::cyclic_vec(8).unwrap().equivariant(),
        GroupSpec::shift_circulant(4).unwrap().equivariant(),
        GroupSpec::shift_circulant(8).unwrap().equivariant(),
        GroupSpec::shift_circulant(8).unwrap(),
    ] {
        let p = build_equivariant_projector(&spec, 1e-9).unwrap();
        let w = apply_projector(&p, &random_matrix(&mut rng, spec.d_out(), spec.d_in())).unwrap();
        assert!(w.frobenius_norm() > 1e-3);
        for g in FiniteGroup::from_spec(&spec).unwrap().elements {
            let r = &(&w * &g.matrix_in) - &(&g.out_or_identity(spec.d_out()) * &w);
            assert!(r.frobenius_norm() <= 1e-9);
        }
    }
}

#[test]
fn smooth_spectrum_in_unit_interval_and_non_increasing() {
    for spec in hard_specs() {
        for (b, s) in [(0.5, 1.0), (1.5, 0.7), (1e-9, 2.0)] {
            let p = build_smooth(&spec, b, s).unwrap();
            let mut last = 1.0;
            for e in &p.spectrum {
                assert!((0.0..=1.0 + 1e-12).contains(&e.gamma));
                if e.sigma >= b {
                    assert!(e.gamma <= last + 1e-15);
                    last = e.gamma;
                }
            }
            assert!((&p.matrix - &p.matrix.transpose()).frobenius_norm() <= 1e-10);
        }
    }
}

#[test]
fn smooth_converges_to_hard_as_width_vanishes() {
    // spectrum {0, 1, 2}: diag(0, 1, 2) acting on a 3-vector
    let spec = GroupSpec::custom_continuous(vec![DenseMatrix::diag(&[0.0, 1.0, 2.0])], None, 1.0).unwrap();
    for b in [0.5, 1.5, 2.5] {
        let hard = build_invariant_projector(&spec, b).unwrap();
        let smooth = build_smooth(&spec, b, 1e-4).unwrap();
        assert!((&hard.matrix - &smooth.matrix).frobenius_norm() <= 1e-10);
    }
    let hard = build_equivariant_projector(&az(), 0.5).unwrap();
    let smooth = build_smooth(&az(), 0.5, 1e-4).unwrap();
    assert!((&hard.matrix - &smooth.matrix).frobenius_norm() <= 1e-10);
}

#[test]
fn routes_agree_on_single_generator_specs() {
    let specs = vec![
        GroupSpec::so2(),
        GroupSpec::so2().equivariant(),
        GroupSpec::so3_z(),
        az(),
        GroupSpec::cyclic_grid(3, 4).unwrap(),
        GroupSpec::cyclic_grid(4, 4).unwrap(),
        GroupSpec::cyclic_grid(5, 4).unwrap(),
        GroupSpec::cyclic_vec(4).unwrap().equivariant(),
        GroupSpec::cyclic_vec(6).unwrap().equivariant(),
    ];
    for spec in &specs {
        for b in [1e-9, 0.5, 1.5, 3.0] {
            let schur = materialize(spec, b, Cutoff::Hard).unwrap();
            let spectral = build_equivariant_projector(spec, b).unwrap();
            let gap = (&schur.matrix - &spectral.matrix).frobenius_norm();
            assert!(gap <= 1e-9, "{} b={b}: {gap}", spec.kind.name());
        }
    }
}

// Grid-to-grid blocks pair eigenvalues whose modulus sum differs from the
// Sylvester singular value (e.g. −2 with −1±i: λ_sum = 2+√2, σ = √2), so
// the routes split once b passes the smallest such σ.
#[test]
fn grid_to_grid_routes_split_between_sigma_and_lambda_sum() {
    let spec = GroupSpec::cyclic_grid(3, 4).unwrap().equivariant();
    let agree = |b: f64| {
        let schur = materialize(&spec, b, Cutoff::Hard).unwrap();
        let spectral = build_equivariant_projector(&spec, b).unwrap();
        (&schur.matrix - &spectral.matrix).frobenius_norm()
    };
    assert!(agree(0.5) <= 1e-9);
    assert!(agree(1.5) > 1e-3);
}

#[test]
fn lemma_identity_holds_for_exact_schur_projection() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for spec in [az(), GroupSpec::so2().equivariant(), GroupSpec::cyclic_grid(4, 4).unwrap().equivariant()] {
        let theta = random_matrix(&mut rng, spec.d_out(), spec.d_in());
        let w = schur_project(&spec, &theta, 1e-9, Cutoff::Hard).unwrap();
        let gx = &spec.generators_in[0];
        let gy = &spec.output_generators()[0];
        assert!((&(&w * gx) - &(gy * &w)).frobenius_norm() <= 1e-9);
    }
}

#[test]
fn commuting_generators_compose_idempotently() {
    // two commuting generators on ℝ⁴: rotations of each coordinate plane
    let mut a = DenseMatrix::zeros(4, 4);
    a[(1, 0)] = 1.0;
    a[(0, 1)] = -1.0;
    let mut b = DenseMatrix::zeros(4, 4);
    b[(3, 2)] = 1.0;
    b[(2, 3)] = -1.0;
    let spec = GroupSpec::custom_continuous(vec![a, b], None, std::f64::consts::PI)
        .unwrap()
        .equivariant();
    for cutoff in [1e-9, 1.5] {
        let p = materialize(&spec, cutoff, Cutoff::Hard).unwrap().matrix;
        assert!((&(&p * &p) - &p).frobenius_norm() <= 1e-10);
    }
}

#[test]
fn so3_composition_gap_is_reported_not_zero() {
    let spec = GroupSpec::so3().equivariant();
    let stacked = build_equivariant_projector(&spec, 1e-9).unwrap().matrix;
    let once = SchurProjector::new(&spec, 1e-9, Cutoff::Hard).unwrap();
    let gap_once = (&once.materialize().unwrap().matrix - &stacked).frobenius_norm();
    let many = once.clone().with_sweeps(50).materialize().unwrap().matrix;
    let gap_many = (&many - &stacked).frobenius_norm();
    // repeated sweeps converge towards the stacked projector
    assert!(gap_many < gap_once);
    assert!(gap_many < 1e-6, "gap after 50 sweeps {gap_many}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schur_projection_is_linear(seed in 0u64..1000, alpha in -3.0f64..3.0, b in 0.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t1 = random_matrix(&mut rng, 3, 3);
        let t2 = random_matrix(&mut rng, 3, 3);
        let p = SchurProjector::new(&az(), b, Cutoff::Hard).unwrap();
        let lhs = p.apply(&(&t1.scale(alpha) + &t2)).unwrap();
        let rhs = &p.apply(&t1).unwrap().scale(alpha) + &p.apply(&t2).unwrap();
        prop_assert!((&lhs - &rhs).max_abs() <= 1e-12);
    }

    #[test]
    fn hard_apply_is_idempotent(seed in 0u64..1000, b in 0.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = build_equivariant_projector(&az(), b).unwrap();
        let theta = random_matrix(&mut rng, 3, 3);
        let once = apply_projector(&p, &theta).unwrap();
        let twice = apply_projector(&p, &once).unwrap();
        prop_assert!((&once - &twice).max_abs() <= 1e-12);
    }

    #[test]
    fn vec_round_trip(rows in 1usize..6, cols in 1usize..6, seed in 0u64..100) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_matrix(&mut rng, rows, cols);
        prop_assert_eq!(unvec(&vec(&m), rows, cols).unwrap(), m);
    }
}
