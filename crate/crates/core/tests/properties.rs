mod common;

use common::*;
use framelab_core::frames::{
    analysis, canonical_dual, frame_bounds, frame_operator, kernel_matrix, synthesis, CoefficientFunction,
};
use framelab_core::gallery::{build, torus_frequency, GallerySpec};
use framelab_core::measure::{discretize, sierpinski_subset, Atom, Density, MeasureSpace, Segment};
use framelab_core::numerics::{hermitian_eig, pinv, rank, svd, ComplexMatrix, RankPolicy};
use framelab_core::pairs::{
    pair_kernel_k, pair_kernel_r, pair_redundancy, phi_inner, reproducing_partner, resolution_operator, t_phi,
    PhiGeometry,
};
use framelab_core::rkhs::kernel_from_onb;
use framelab_core::C64;
use proptest::prelude::*;

fn shape() -> impl Strategy<Value = (usize, usize, u64)> {
    (1usize..=6).prop_flat_map(|d| (d..=d + 10, Just(d), any::<u64>())).prop_map(|(n, d, s)| (n, d, s))
}

fn mu_inner(a: &[C64], b: &[C64], w: &[f64]) -> C64 {
    a.iter().zip(b).zip(w).map(|((x, y), w)| x * y.conj() * w).sum()
}

fn plain_inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigendecomposition_reconstructs(d in 1usize..=8, seed in any::<u64>()) {
        let mut rng = rng(seed);
        let a = ComplexMatrix::from_fn(d, d, |_, _| c64(&mut rng));
        let h = a.add(&a.adjoint());
        let eig = hermitian_eig(&h).unwrap();
        prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        let v = &eig.vectors;
        prop_assert!(identity_gap(&v.adjoint().mul(v)) < 1e-12);
        let back = eig.apply_function(|x| x);
        prop_assert!(max_abs_diff(&back, &h) < 1e-12 * h.max_abs().max(1.0));
    }

    #[test]
    fn pinv_satisfies_penrose_conditions(rows in 1usize..=9, cols in 1usize..=9, seed in any::<u64>()) {
        let mut rng = rng(seed);
        let a = ComplexMatrix::from_fn(rows, cols, |_, _| c64(&mut rng));
        let s = svd(&a);
        prop_assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(max_abs_diff(&s.reconstruct(), &a) < 1e-12);
        let p = pinv(&a, &RankPolicy::default());
        prop_assert!(max_abs_diff(&a.mul(&p).mul(&a), &a) < 1e-10);
        prop_assert!(max_abs_diff(&p.mul(&a).mul(&p), &p) < 1e-10);
        let ap = a.mul(&p);
        prop_assert!(max_abs_diff(&ap, &ap.adjoint()) < 1e-10);
        prop_assert_eq!(rank(&a, &RankPolicy::default()), rows.min(cols));
    }

    #[test]
    fn synthesis_is_the_adjoint_of_analysis((n, d, seed) in shape()) {
        let mut rng = rng(seed);
        let fam = random_family(&mut rng, n, d);
        let f = vector(&mut rng, d);
        let big_f = CoefficientFunction(vector(&mut rng, n));
        let lhs = mu_inner(analysis(&fam, &f).unwrap().values(), big_f.values(), &fam.weights());
        let rhs = plain_inner(&f, &synthesis(&fam, &big_f).unwrap());
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn frame_operator_is_synthesis_after_analysis((n, d, seed) in shape()) {
        let mut rng = rng(seed);
        let fam = random_family(&mut rng, n, d);
        let s = frame_operator(&fam);
        let cols: Vec<Vec<C64>> = (0..d)
            .map(|a| {
                let e: Vec<C64> = (0..d).map(|b| C64::new(if a == b { 1.0 } else { 0.0 }, 0.0)).collect();
                synthesis(&fam, &analysis(&fam, &e).unwrap()).unwrap()
            })
            .collect();
        let dc = ComplexMatrix::from_columns(&cols).unwrap();
        prop_assert!(max_abs_diff(&s, &dc) < 1e-12);
        prop_assert!(max_abs_diff(&s, &brute_resolution(&fam, &fam)) < 1e-12);
    }

    #[test]
    fn bounds_hold_for_random_unit_vectors((n, d, seed) in shape()) {
        let mut rng = rng(seed);
        let fam = random_family(&mut rng, n, d);
        let r = frame_bounds(&fam);
        let w = fam.weights();
        for _ in 0..20 {
            let f = unit_vector(&mut rng, d);
            let e: f64 = analysis(&fam, &f).unwrap().values().iter().zip(&w).map(|(v, w)| w * v.norm_sqr()).sum();
            prop_assert!(e >= r.lower_bound * (1.0 - 1e-10) - 1e-12);
            prop_assert!(e <= r.upper_bound * (1.0 + 1e-10) + 1e-12);
        }
        let scaled = frame_bounds(&fam.scaled(C64::new(0.0, 2.0)));
        prop_assert!((scaled.upper_bound - 4.0 * r.upper_bound).abs() < 1e-10 * r.upper_bound);
    }

    #[test]
    fn canonical_dual_reconstructs((n, d, seed) in shape()) {
        let mut rng = rng(seed);
        let fam = random_family(&mut rng, n, d);
        let dual = canonical_dual(&fam).unwrap();
        let f = vector(&mut rng, d);
        let back = synthesis(&fam, &analysis(&dual, &f).unwrap()).unwrap();
        let err = back.iter().zip(&f).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-9);
    }

    #[test]
    fn frame_kernel_reproduces_and_matches_onb_kernel((n, d, seed) in shape()) {
        let mut rng = rng(seed);
        let fam = random_family(&mut rng, n, d);
        let k = kernel_matrix(&fam).unwrap();
        prop_assert!(k.hermitian_deviation() == 0.0 || k.hermitian_deviation() < 1e-12);
        prop_assert!(k.min_eigenvalue().unwrap() >= -1e-10 * k.entries().max_abs());
        let f = analysis(&fam, &vector(&mut rng, d)).unwrap();
        for x in 0..n {
            prop_assert!((k.reproduce(&f, x).unwrap() - f.values()[x]).norm() < 1e-10);
        }
        let w = fam.weights();
        let sqrt_w: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
        let scaled: Vec<Vec<C64>> = analysis_columns(&fam)
            .into_iter()
            .map(|c| c.iter().zip(&sqrt_w).map(|(v, s)| v * s).collect())
            .collect();
        // two different orthonormal bases of the same span
        let mut reversed = scaled.clone();
        reversed.reverse();
        let to_onb = |cols: &[Vec<C64>]| -> Vec<CoefficientFunction> {
            gram_schmidt(cols, 1e-9)
                .into_iter()
                .map(|q| CoefficientFunction(q.iter().zip(&sqrt_w).map(|(v, s)| v / s).collect()))
                .collect()
        };
        let k1 = kernel_from_onb(&to_onb(&scaled), fam.space()).unwrap();
        let k2 = kernel_from_onb(&to_onb(&reversed), fam.space()).unwrap();
        prop_assert!(max_abs_diff(k1.entries(), k2.entries()) < 1e-10);
        prop_assert!(max_abs_diff(k1.entries(), k.entries()) < 1e-9);
    }

    #[test]
    fn resolution_operator_identities((n, d, seed) in shape(), c in -3.0f64..3.0) {
        let mut rng = rng(seed);
        let space = weighted_space(&mut rng, n);
        let psi = family_on(&mut rng, &space, d);
        let phi = family_on(&mut rng, &space, d);
        let s = resolution_operator(&psi, &phi).unwrap().operator;
        let st = resolution_operator(&phi, &psi).unwrap().operator;
        prop_assert!(max_abs_diff(&st, &s.adjoint()) < 1e-12);
        prop_assert!(max_abs_diff(&s, &brute_resolution(&psi, &phi)) < 1e-12);
        let sc = resolution_operator(&psi, &phi.scaled(C64::new(c, 0.0))).unwrap().operator;
        prop_assert!(max_abs_diff(&sc, &s.scale_real(c)) < 1e-12 * (1.0 + c.abs()) * s.max_abs().max(1.0));
        prop_assert_eq!(d + pair_redundancy(&phi), n);
    }

    #[test]
    fn phi_inner_matches_double_sum((n, d, seed) in shape()) {
        let mut rng = rng(seed);
        let phi = random_family(&mut rng, n, d);
        let w = phi.weights();
        let f = vector(&mut rng, n);
        let g = vector(&mut rng, n);
        let mut double = C64::new(0.0, 0.0);
        for x in 0..n {
            for y in 0..n {
                double += f[x] * plain_inner(phi.row(x), phi.row(y)) * g[y].conj() * w[x] * w[y];
            }
        }
        let geom = PhiGeometry::new(&phi);
        let got = phi_inner(&geom, &CoefficientFunction(f.clone()), &CoefficientFunction(g.clone())).unwrap();
        prop_assert!((got - double).norm() < 1e-10 * double.norm().max(1.0));
        let via_gram: C64 = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).map(|(x, y)| f[x] * geom.gram()[(x, y)] * g[y].conj()).sum();
        prop_assert!((via_gram - double).norm() < 1e-10 * double.norm().max(1.0));
    }

    #[test]
    fn pair_kernels((n, d, seed) in shape()) {
        let mut rng = rng(seed);
        let space = weighted_space(&mut rng, n);
        let psi = family_on(&mut rng, &space, d);
        let phi = family_on(&mut rng, &space, d);
        let report = resolution_operator(&psi, &phi).unwrap();
        prop_assume!(report.condition < 1e6);
        let w = space.weights();

        let r = pair_kernel_r(&psi, &phi).unwrap();
        let op = ComplexMatrix::from_fn(n, n, |x, y| r.entries()[(x, y)] * w[y]);
        prop_assert!(max_abs_diff(&op.mul(&op), &op) < 1e-9);
        // oracle: projector onto Ran C_Ψ along ker T_Φ, C (T C)⁻¹ T
        let c = psi.analysis_matrix();
        let t = phi.synthesis_matrix();
        let oracle = c.mul(&pinv(&t.mul(&c), &RankPolicy::default())).mul(&t);
        prop_assert!(max_abs_diff(&op, &oracle) < 1e-9);

        let k = pair_kernel_k(&psi, &phi).unwrap();
        prop_assert!(k.hermitian_deviation() < 1e-12);
        prop_assert!(k.min_eigenvalue().unwrap() >= -1e-10 * k.entries().max_abs());
        let f = vector(&mut rng, d);
        let big_f = analysis(&psi, &f).unwrap();
        for x in 0..n {
            prop_assert!((k.reproduce(&big_f, x).unwrap() - big_f.values()[x]).norm() < 1e-9 * big_f.values()[x].norm().max(1.0));
        }
    }

    #[test]
    fn partner_inverts_t_phi((n, d, seed) in shape()) {
        let mut rng = rng(seed);
        let phi = random_family(&mut rng, n, d);
        let p = reproducing_partner(&phi).unwrap();
        for _ in 0..10 {
            let f = vector(&mut rng, d);
            let back = t_phi(&phi, &analysis(&p.partner, &f).unwrap()).unwrap();
            let err = back.iter().zip(&f).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            prop_assert!(err < 1e-9);
        }
    }

    #[test]
    fn sierpinski_is_monotone(lo in 0.0f64..2.0, width in 0.1f64..3.0, k in 0.5f64..4.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let seg = Segment::new(lo, lo + width, Density::Power { c: 1.0, k });
        let space = MeasureSpace::new(vec![], vec![seg]).unwrap();
        let full = seg.measure();
        let (x, y) = (a.min(b) * full, a.max(b) * full);
        let (_, tx) = sierpinski_subset(&space, 0, x).unwrap();
        let (_, ty) = sierpinski_subset(&space, 0, y).unwrap();
        prop_assert!(tx <= ty);
        prop_assert!(ty <= lo + width);
        prop_assert!((seg.measure_between(lo, ty) - y).abs() <= 1e-12 * full);
    }

    #[test]
    fn discretization_conserves_mass(cells in 1usize..40, atom in 0.01f64..3.0, k in 0.5f64..3.0) {
        let space = MeasureSpace::new(
            vec![Atom::new("a", atom)],
            vec![Segment::uniform(-1.0, 0.0), Segment::new(0.5, 2.0, Density::Power { c: 2.0, k })],
        )
        .unwrap();
        let disc = discretize(&space, cells).unwrap();
        prop_assert_eq!(disc.len(), 1 + 2 * cells);
        prop_assert!((disc.total_weight() - space.total_measure()).abs() < 1e-12 * space.total_measure());
    }

    #[test]
    fn torus_exponentials_are_orthonormal(grid in 2usize..64) {
        let space = framelab_core::measure::DiscretizedSpace::uniform_cells(0.0, 1.0, grid).unwrap();
        let w = space.weights();
        let xs: Vec<f64> = (0..grid).map(|j| (j as f64 + 0.5) / grid as f64).collect();
        let freqs: Vec<i64> = (0..grid).map(torus_frequency).filter(|k| 2 * k.abs() < grid as i64).collect();
        for &p in &freqs {
            for &q in &freqs {
                let e = |k: i64| -> Vec<C64> { xs.iter().map(|x| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 * x)).collect() };
                let ip = mu_inner(&e(p), &e(q), &w);
                let expect = if p == q { 1.0 } else { 0.0 };
                prop_assert!((ip - C64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn torus_upper_bound_is_capped(dim in 1usize..24) {
        let fam = build(&GallerySpec::TorusUpperSemiframe { dim, grid: 2 * dim }).unwrap();
        let r = frame_bounds(&fam);
        prop_assert!(r.upper_bound <= std::f64::consts::PI.powi(2) / 6.0 + 1e-12);
        prop_assert!((r.lower_bound - 1.0 / (dim * dim) as f64).abs() < 1e-12);
    }
}
