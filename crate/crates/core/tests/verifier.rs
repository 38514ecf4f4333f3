mod common;

use common::{ar_matrix_by_hand, c, random_unit_poly, rng, singular_values_2x2, unit_point};
use crsphere::forms::wedge_nonzero;
use crsphere::linalg::DEFAULT_RANK_TOL;
use crsphere::{
    ahern_rudin_embedding, cr_dim_at, defining_functions, del_form, equivalence_check, eval_embedding,
    independence_matrix, lemma_two_form_check, make_graph_embedding, make_negative_control, make_q,
    point_report, q_block_embedding, Complex64, ControlKind, GaussianRational, GraphEmbedding,
    PreparedEmbedding, WPolynomial,
};
use nalgebra::DMatrix;

const TOL: f64 = DEFAULT_RANK_TOL;

fn e1() -> [Complex64; 2] {
    [c(1.0, 0.0), c(0.0, 0.0)]
}

#[test]
fn ar_independence_matrix_at_the_axes() {
    let ar = ahern_rudin_embedding();
    let m = independence_matrix(&ar, &e1()).unwrap();
    assert_eq!(m, vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 1.0)]]);
    let m = independence_matrix(&ar, &[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
    assert_eq!(m, vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]);
    assert!(independence_matrix(&ar, &[c(0.5, 0.0), c(0.0, 0.0)]).is_err());
}

#[test]
fn ar_matrix_matches_hand_derivatives() {
    let ar = PreparedEmbedding::new(&ahern_rudin_embedding());
    let mut r = rng(21);
    for _ in 0..500 {
        let z = unit_point(&mut r, 2);
        let got = ar.independence_matrix(&z).unwrap();
        let want = ar_matrix_by_hand(z[0], z[1]);
        for i in 0..2 {
            for j in 0..2 {
                assert!((got[i][j] - want[i][j]).norm() < 1e-14);
            }
        }
        let (lo, hi) = singular_values_2x2(want);
        let rep = ar.point_report(&z, TOL).unwrap();
        assert!((rep.sigma_min - lo).abs() < 1e-12 && (rep.sigma_max - hi).abs() < 1e-12);
    }
}

#[test]
fn point_report_examples() {
    let ar = ahern_rudin_embedding();
    let rep = point_report(&ar, &e1(), TOL).unwrap();
    assert!((rep.sigma_min - 1.0).abs() < 1e-14);
    assert_eq!(rep.rank, 2);
    assert!(rep.cr_regular && !rep.marginal);

    let mut r = rng(22);
    let h = make_negative_control(ControlKind::Holomorphic, 2).unwrap();
    for _ in 0..20 {
        let rep = point_report(&h, &unit_point(&mut r, 2), TOL).unwrap();
        assert_eq!(rep.rank, 1);
        assert!(!rep.cr_regular);
    }
    let radial = make_negative_control(ControlKind::Radial, 2).unwrap();
    let rep = point_report(&radial, &e1(), TOL).unwrap();
    assert_eq!(rep.rank, 1);
    assert!(!rep.cr_regular);

    let zero = make_negative_control(ControlKind::Zero, 3).unwrap();
    let z = unit_point(&mut r, 3);
    let m = independence_matrix(&zero, &z).unwrap();
    assert!(m[1].iter().all(|x| *x == c(0.0, 0.0)));
}

#[test]
fn report_serializes_with_full_precision() {
    let mut r = rng(23);
    let z = unit_point(&mut r, 2);
    let rep = point_report(&ahern_rudin_embedding(), &z, TOL).unwrap();
    let text = serde_json::to_string(&rep).unwrap();
    let back: crsphere::IndependenceReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, rep);
    assert_eq!(back.z, z);
}

#[test]
fn defining_functions_of_ar() {
    let ar = ahern_rudin_embedding();
    let rhos = defining_functions(&ar);
    assert_eq!(rhos.len(), 3);
    assert!(rhos.iter().all(|p| p.m() == 3 && p.is_real()));
    let mut rho1 = WPolynomial::constant(3, GaussianRational::from_integers(-1, 0));
    for k in 0..2 {
        rho1 = &rho1 + &WPolynomial::abs_sq(3, k).unwrap();
    }
    assert_eq!(rhos[0], rho1);
    let reassembled = &rhos[1] + &rhos[2].scale(&GaussianRational::i());
    let z3_minus_p = &WPolynomial::z(3, 2).unwrap() - &crsphere::make_p().extend_vars(3).unwrap();
    assert_eq!(reassembled, z3_minus_p);
}

#[test]
fn defining_functions_vanish_on_the_graph() {
    let mut r = rng(24);
    let mut all = vec![ahern_rudin_embedding(), q_block_embedding(2).unwrap()];
    all.extend(ControlKind::ALL.iter().map(|&k| make_negative_control(k, 3).unwrap()));
    for e in &all {
        let rhos = defining_functions(e);
        assert_eq!(rhos.len(), 2 * e.q() + 1);
        for _ in 0..50 {
            let w = eval_embedding(e, &unit_point(&mut r, e.m())).unwrap();
            for rho in &rhos {
                assert!(rho.eval(&w).unwrap().norm() < 1e-12);
            }
        }
    }
}

#[test]
fn del_form_examples() {
    let ar = ahern_rudin_embedding();
    let rhos = defining_functions(&ar);
    let mut r = rng(25);
    let z = unit_point(&mut r, 2);
    let w = eval_embedding(&ar, &z).unwrap();
    let f = del_form(&rhos[0], &w).unwrap();
    assert_eq!(f.coeffs, vec![z[0].conj(), z[1].conj(), c(0.0, 0.0)]);

    let f = del_form(&WPolynomial::abs_sq(2, 0).unwrap(), &e1()).unwrap();
    assert_eq!(f.coeffs, vec![c(1.0, 0.0), c(0.0, 0.0)]);
    let f = del_form(&WPolynomial::constant(2, GaussianRational::from_integers(5, 0)), &e1()).unwrap();
    assert!(f.is_zero());
}

#[test]
fn ar_defining_forms_are_independent_at_the_axis_point() {
    let ar = PreparedEmbedding::new(&ahern_rudin_embedding());
    let forms = ar.defining_forms_at(&e1()).unwrap();
    assert_eq!(forms.len(), 3);
    assert!(wedge_nonzero(&forms, TOL).unwrap());
}

#[test]
fn two_form_lemma() {
    let mut r = rng(26);
    let sq = &WPolynomial::z(2, 0).unwrap() * &WPolynomial::z(2, 0).unwrap();
    let (lhs, rhs) = crsphere::verifier::lemma_two_forms(&sq, &unit_point(&mut r, 2)).unwrap();
    assert!(lhs.max_abs() < 1e-15 && rhs.max_abs() < 1e-15);

    let f = &WPolynomial::z(2, 0).unwrap() + &WPolynomial::zbar(2, 1).unwrap();
    for _ in 0..20 {
        assert!(lemma_two_form_check(&f, &unit_point(&mut r, 2)).unwrap() <= 1e-12);
    }
    let p = crsphere::make_p();
    for _ in 0..100 {
        assert!(lemma_two_form_check(&p, &unit_point(&mut r, 2)).unwrap() <= 1e-10);
    }
    for _ in 0..100 {
        let m = 1 + (r.random_range(0..4usize));
        let f = random_unit_poly(&mut r, m, 4, 5);
        let w = unit_point(&mut r, m);
        assert!(lemma_two_form_check(&f, &w).unwrap() <= 1e-10, "{f}");
    }
}

/// `dim_ℂ(T ∩ JT)` by an independent route: the real Jacobian of the graph
/// map by central differences of `f` off the sphere, restricted to the sphere
/// tangent, then the nullity of `(I − ΠT) J` on `T`.
fn brute_force_cr_dim(e: &GraphEmbedding, z: &[Complex64]) -> usize {
    let m = e.m();
    let n = 2 * (m + e.q());
    let h = 1e-6;
    let graph = |x: &[f64]| -> Vec<f64> {
        let w: Vec<Complex64> = x.chunks(2).map(|p| c(p[0], p[1])).collect();
        let mut out = x.to_vec();
        for f in e.functions() {
            let v = f.eval(&w).unwrap();
            out.extend([v.re, v.im]);
        }
        out
    };
    let x0: Vec<f64> = z.iter().flat_map(|w| [w.re, w.im]).collect();
    let mut jac = DMatrix::<f64>::zeros(n, 2 * m);
    for k in 0..2 * m {
        let mut xp = x0.clone();
        let mut xm = x0.clone();
        xp[k] += h;
        xm[k] -= h;
        let (gp, gm) = (graph(&xp), graph(&xm));
        for i in 0..n {
            jac[(i, k)] = (gp[i] - gm[i]) / (2.0 * h);
        }
    }
    // tangent basis: unit eigenvectors of the radial projector, QR for T
    let r = nalgebra::DVector::from_vec(x0);
    let proj = DMatrix::<f64>::identity(2 * m, 2 * m) - &r * r.transpose();
    let eig = nalgebra::SymmetricEigen::new(proj);
    let keep: Vec<usize> = (0..2 * m).filter(|&i| eig.eigenvalues[i] > 0.5).collect();
    assert_eq!(keep.len(), 2 * m - 1);
    let tangent = DMatrix::from_fn(2 * m, keep.len(), |i, j| eig.eigenvectors[(i, keep[j])]);
    let q = (&jac * tangent).qr().q();
    let mut jmat = DMatrix::<f64>::zeros(n, n);
    for k in 0..n / 2 {
        jmat[(2 * k + 1, 2 * k)] = 1.0;
        jmat[(2 * k, 2 * k + 1)] = -1.0;
    }
    let leak = (DMatrix::<f64>::identity(n, n) - &q * q.transpose()) * jmat * &q;
    let sv = leak.singular_values();
    let null = sv.iter().filter(|&&s| s < 1e-6).count();
    assert_eq!(null % 2, 0);
    null / 2
}

#[test]
fn cr_dimension_examples() {
    let ar = ahern_rudin_embedding();
    assert_eq!(cr_dim_at(&ar, &e1(), TOL).unwrap(), 0);
    let mut r = rng(27);
    let s7 = q_block_embedding(2).unwrap();
    let h = make_negative_control(ControlKind::Holomorphic, 2).unwrap();
    for _ in 0..50 {
        assert_eq!(cr_dim_at(&s7, &unit_point(&mut r, 4), TOL).unwrap(), 2);
        let z = unit_point(&mut r, 2);
        assert_eq!(cr_dim_at(&h, &z, TOL).unwrap(), 1);
        assert_eq!(brute_force_cr_dim(&h, &z), 1);
    }
}

#[test]
fn cr_dimension_agrees_with_the_brute_force_oracle() {
    let mut r = rng(28);
    let mut all = vec![ahern_rudin_embedding(), q_block_embedding(2).unwrap()];
    for m in [2, 3] {
        all.extend(ControlKind::ALL.iter().map(|&k| make_negative_control(k, m).unwrap()));
    }
    for e in &all {
        for _ in 0..30 {
            let z = unit_point(&mut r, e.m());
            assert_eq!(cr_dim_at(e, &z, TOL).unwrap(), brute_force_cr_dim(e, &z), "{}", e.label());
        }
    }
}

#[test]
fn three_criteria_agree() {
    let mut r = rng(29);
    let ar = PreparedEmbedding::new(&ahern_rudin_embedding());
    let h = PreparedEmbedding::new(&make_negative_control(ControlKind::Holomorphic, 2).unwrap());
    for _ in 0..1000 {
        let z = unit_point(&mut r, 2);
        assert_eq!(ar.equivalence_check(&z, TOL).unwrap().verdict(), Some(true));
        assert_eq!(h.equivalence_check(&z, TOL).unwrap().verdict(), Some(false));
    }
    let radial = make_negative_control(ControlKind::Radial, 2).unwrap();
    assert_eq!(equivalence_check(&radial, &e1(), TOL).unwrap().verdict(), Some(false));
}

#[test]
fn cr_dimension_is_minimal_wherever_the_matrix_has_full_rank() {
    let mut r = rng(30);
    for n in 1..=3 {
        let e = PreparedEmbedding::new(&q_block_embedding(n).unwrap());
        for _ in 0..1000 {
            let z = unit_point(&mut r, 2 * n);
            if e.point_report(&z, TOL).unwrap().cr_regular {
                assert_eq!(e.cr_dim_at(&z, TOL).unwrap(), 2 * n - 2);
            }
        }
    }
}

#[test]
fn scaling_a_graph_function_keeps_the_verdict() {
    let mut r = rng(31);
    let scales = [GaussianRational::from_integers(3, -2), GaussianRational::from_ratio(1, 1000), GaussianRational::i()];
    let mut bases = vec![ahern_rudin_embedding(), q_block_embedding(2).unwrap()];
    bases.extend(ControlKind::ALL.iter().map(|&k| make_negative_control(k, 2).unwrap()));
    for e in &bases {
        for s in &scales {
            let scaled = make_graph_embedding(e.m(), vec![e.functions()[0].scale(s)], "scaled").unwrap();
            for _ in 0..100 {
                let z = unit_point(&mut r, e.m());
                let a = point_report(e, &z, TOL).unwrap();
                let b = point_report(&scaled, &z, TOL).unwrap();
                assert_eq!(a.cr_regular, b.cr_regular);
            }
        }
    }
}

#[test]
fn block_swaps_permute_columns() {
    let mut r = rng(32);
    for n in 2..=3 {
        let e = PreparedEmbedding::new(&q_block_embedding(n).unwrap());
        for _ in 0..100 {
            let z = unit_point(&mut r, 2 * n);
            let (j, k) = (0, n - 1);
            let mut perm: Vec<usize> = (0..2 * n).collect();
            perm.swap(2 * j, 2 * k);
            perm.swap(2 * j + 1, 2 * k + 1);
            let zp: Vec<Complex64> = perm.iter().map(|&i| z[i]).collect();
            let a = e.independence_matrix(&z).unwrap();
            let b = e.independence_matrix(&zp).unwrap();
            for row in 0..2 {
                for col in 0..2 * n {
                    assert!((b[row][col] - a[row][perm[col]]).norm() < 1e-15);
                }
            }
            let sa = e.point_report(&z, TOL).unwrap().sigma_min;
            let sb = e.point_report(&zp, TOL).unwrap().sigma_min;
            assert!((sa - sb).abs() < 1e-12);
        }
    }
}

#[test]
fn the_largest_block_alone_has_full_rank() {
    let mut r = rng(33);
    for n in 1..=3 {
        let q = make_q(n).unwrap();
        let e = PreparedEmbedding::new(&make_graph_embedding(2 * n, vec![q], "q").unwrap());
        for _ in 0..10_000 {
            let z = unit_point(&mut r, 2 * n);
            let k = (0..n)
                .max_by(|&a, &b| {
                    let na = z[2 * a].norm_sqr() + z[2 * a + 1].norm_sqr();
                    let nb = z[2 * b].norm_sqr() + z[2 * b + 1].norm_sqr();
                    na.total_cmp(&nb)
                })
                .unwrap();
            assert!(z[2 * k].norm() + z[2 * k + 1].norm() > 0.0);
            let m = e.matrix_at(&z);
            let sub = [[m[0][2 * k], m[0][2 * k + 1]], [m[1][2 * k], m[1][2 * k + 1]]];
            let (lo, hi) = singular_values_2x2(sub);
            assert!(lo > TOL * hi, "block {k} degenerate at {z:?}");
        }
    }
}

use rand::Rng;

