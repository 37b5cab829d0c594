use eulerring::divergence::QuadratureRule;
use eulerring::expr::parse;
use eulerring::index::{box_points, indices_up_to};
use eulerring::logmono::{apply_lphi, solve_lphi, LogMonomialSum};
use eulerring::ponder::{partial_fractions, roots_with_multiplicity, RootOptions, UniPoly};
use eulerring::ring::{PiecewisePonderation, Region};
use eulerring::series::{euler_apply, lphi_apply, lphi_inverse};
use eulerring::stirling::{pochhammer_to_standard, standard_to_pochhammer_vec};
use eulerring::{EulerOperator, MultiIndex, PonderationPoly, Scalar, SparsePoly, TruncatedSeries};
use proptest::collection::vec;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Scalar> {
    (-9i64..=9, 1i64..=4).prop_map(|(n, d)| Scalar::from_ratio(n, d))
}

fn index(n: usize, max_total: u32) -> impl Strategy<Value = MultiIndex> {
    let all = indices_up_to(n, max_total);
    (0..all.len()).prop_map(move |i| all[i].clone())
}

fn sparse(n: usize, max_total: u32, len: usize) -> impl Strategy<Value = SparsePoly> {
    vec((index(n, max_total), rational()), 1..=len).prop_map(move |t| SparsePoly::from_terms(n, t))
}

/// (n, φ of degree ≤ 5, g of truncation ≤ 12)
fn phi_and_rhs() -> impl Strategy<Value = (PonderationPoly, TruncatedSeries)> {
    (1usize..=3, 1u32..=5, 1u32..=12).prop_flat_map(|(n, d, trunc)| {
        (sparse(n, d, 5), sparse(n, trunc, 8)).prop_map(move |(p, g)| {
            (PonderationPoly::new(p), TruncatedSeries::from_poly(g, trunc))
        })
    })
}

fn ring_element(n: usize, bound: u32) -> impl Strategy<Value = PiecewisePonderation> {
    let pts = box_points(n, bound);
    let npts = pts.len();
    let region = (any::<bool>(), vec(0..npts, 0..6)).prop_map(move |(fin, sel)| {
        let s = sel.iter().map(|&i| pts[i].clone()).collect();
        if fin {
            Region::Finite(s)
        } else {
            Region::Cofinite(s)
        }
    });
    vec((region, sparse(n, 2, 3)), 0..=3).prop_map(move |pieces| {
        PiecewisePonderation::from_pieces(
            n,
            bound,
            pieces.into_iter().map(|(r, p)| (r, PonderationPoly::new(p))).collect(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn inverse_then_apply_is_identity((phi, g) in phi_and_rhs()) {
        let inv = lphi_inverse(&phi, &g);
        prop_assume!(inv.is_ok());
        let back = lphi_apply(&phi, &inv.unwrap().series).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn euler_operator_matches_lphi(
        (op, f) in (1usize..=3).prop_flat_map(|n| (sparse(n, 4, 5), sparse(n, 10, 8)))
    ) {
        let n = op.nvars();
        let op = EulerOperator::new(op);
        let f = TruncatedSeries::from_poly(f, 10);
        let phi = PonderationPoly::from_euler_operator(&op);
        prop_assert_eq!(phi.nvars(), n);
        prop_assert_eq!(euler_apply(&op, &f), lphi_apply(&phi, &f).unwrap());
        prop_assert_eq!(phi.to_euler_operator(), op);
    }

    #[test]
    fn stirling_round_trip(c in vec(rational(), 1..=10)) {
        let back = pochhammer_to_standard(&standard_to_pochhammer_vec(&c));
        prop_assert_eq!(back, c);
    }

    #[test]
    fn partial_fractions_reconstruct(
        roots in vec(((-6i64..=-1, 1i64..=3), 0i64..=2, 1u32..=3), 1..=3)
    ) {
        // roots -a/b + i·c off the evaluation lattice 0..=9
        let mut phi = UniPoly::one();
        for ((a, b), c, m) in &roots {
            let r = &Scalar::from_ratio(*a, *b) + &(&Scalar::i() * &Scalar::from_i64(*c));
            for _ in 0..*m {
                phi = phi.mul(&UniPoly::linear_root(&r));
            }
        }
        let rs = roots_with_multiplicity(&phi, RootOptions::default()).unwrap();
        let pf = partial_fractions(&phi, &rs).unwrap();
        prop_assert!(pf.reconstruction_error(&phi) <= 1e-12);
    }

    #[test]
    fn log_monomial_solution_is_exact(
        phi in vec(rational(), 2..=5),
        terms in vec((0i64..=3, 1i64..=2, 0u32..=2, rational()), 1..=3)
    ) {
        let phi = UniPoly::new(phi);
        prop_assume!(phi.degree() >= 1);
        let mut g = LogMonomialSum::zero();
        for (num, den, p, c) in terms {
            g.add_term(Scalar::from_ratio(num, den), p, c);
        }
        if let Ok(f) = solve_lphi(&phi, &g) {
            prop_assert_eq!(apply_lphi(&phi, &f), g);
        }
    }

    #[test]
    fn exp_taylor_inverse(a in -3i64..=3, b in -3i64..=3, d in 1i64..=3) {
        let names = vec!["x".to_string(), "y".to_string()];
        let e = parse(&format!("exp(({a}/{d})*x + {b}*y)"), &names).unwrap().taylor(8).unwrap();
        let inv = parse(&format!("exp(-(({a}/{d})*x + {b}*y))"), &names).unwrap().taylor(8).unwrap();
        let one = TruncatedSeries::from_terms(2, 8, [(MultiIndex::zero(2), Scalar::one())]);
        prop_assert_eq!(e.mul(&inv), one);
    }

    #[test]
    fn pythagorean_taylor(a in -3i64..=3, b in -3i64..=3, c in -2i64..=2) {
        let names = vec!["x".to_string(), "y".to_string()];
        let arg = format!("{a}*x + {b}*y + {c}/2");
        let s = parse(&format!("sin({arg})"), &names).unwrap().taylor(7).unwrap();
        let co = parse(&format!("cos({arg})"), &names).unwrap().taylor(7).unwrap();
        let sum = s.mul(&s).add(&co.mul(&co));
        // the constant shift makes the coefficients floating point
        let one = TruncatedSeries::from_terms(2, 7, [(MultiIndex::zero(2), Scalar::one())]);
        prop_assert!(sum.sub(&one).max_abs_coeff() < 1e-12);
    }

    #[test]
    fn ring_axioms(
        (f, g, h) in (1usize..=2).prop_flat_map(|n| (ring_element(n, 4), ring_element(n, 4), ring_element(n, 4)))
    ) {
        let n = f.nvars();
        let zero = PiecewisePonderation::zero(n, 4);
        let one = PiecewisePonderation::one(n, 4);
        prop_assert!(f.add(&g).unwrap().eq_on_box(&g.add(&f).unwrap()));
        prop_assert!(f.mul(&g).unwrap().eq_on_box(&g.mul(&f).unwrap()));
        prop_assert!(f.add(&g).unwrap().add(&h).unwrap().eq_on_box(&f.add(&g.add(&h).unwrap()).unwrap()));
        prop_assert!(f.mul(&g).unwrap().mul(&h).unwrap().eq_on_box(&f.mul(&g.mul(&h).unwrap()).unwrap()));
        prop_assert!(f.mul(&g.add(&h).unwrap()).unwrap().eq_on_box(&f.mul(&g).unwrap().add(&f.mul(&h).unwrap()).unwrap()));
        prop_assert!(f.add(&zero).unwrap().eq_on_box(&f));
        prop_assert!(f.mul(&one).unwrap().eq_on_box(&f));
        prop_assert!(f.sub(&f).unwrap().eq_on_box(&zero));
    }

    #[test]
    fn idempotents_are_indicators(f in ring_element(2, 7), mask in vec(any::<bool>(), 64)) {
        // an indicator built from random pieces, and an arbitrary element
        let pts = box_points(2, 7);
        let chi = PiecewisePonderation::indicator(2, 7, pts.iter().zip(&mask).filter(|(_, m)| **m).map(|(p, _)| p.clone()));
        for e in [f, chi] {
            let square_is_self = e.mul(&e).unwrap().eq_on_box(&e);
            match e.idempotent_check() {
                Some(a) => {
                    prop_assert!(square_is_self);
                    prop_assert!(PiecewisePonderation::indicator(2, 7, a).eq_on_box(&e));
                }
                None => prop_assert!(!square_is_self),
            }
        }
    }

    #[test]
    fn represent_is_multiplicative(
        (f, g, s) in (1usize..=2).prop_flat_map(|n| (ring_element(n, 5), ring_element(n, 5), sparse(n, 5, 8)))
    ) {
        let s = TruncatedSeries::from_poly(s, 5);
        let fg = f.mul(&g).unwrap();
        let lhs = fg.represent().apply(&s).unwrap();
        let rhs = f.represent().apply(&g.represent().apply(&s).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        let sum = f.add(&g).unwrap().represent().apply(&s).unwrap();
        prop_assert_eq!(sum, f.represent().apply(&s).unwrap().add(&g.represent().apply(&s).unwrap()));
    }

    #[test]
    fn quadrature_moments(m in 2usize..=64, beta in -0.9f64..6.0) {
        let rule = QuadratureRule::gauss_jacobi(m, beta).unwrap();
        let total: f64 = rule.weights.iter().sum();
        prop_assert!((total * (beta + 1.0) - 1.0).abs() < 1e-13);
        for k in [1, m, 2 * m - 1] {
            let got = rule.integrate(|t| t.powi(k as i32));
            let want = 1.0 / (beta + 1.0 + k as f64);
            prop_assert!(((got - want) / want).abs() < 1e-13, "k {} got {} want {}", k, got, want);
        }
    }
}
