//! End-to-end checks of the workbench on the builtin scenarios. Every
//! assertion is exact; there are no tolerances anywhere.

use parconn::{
    app_map, bun_map, canonical_divisor, elm_minus_exponents, elm_plus_exponents, fuchs_check,
    h0_pairing_map, h1_basis, h1_dim, invert_app_bun, kernel, moduli_dimensions, pole_divisor,
    projectively_equal, reconstruct, residue, residue_functional, rr_dim, rr_space_basis,
    serre_coords, sigma_test, stability_margin, twist_exponents, CechOneClass, class_is_zero,
    ClosedPoint, CurveModel, DifferentialForm, Divisor, ExponentData, Ffe, Matrix, Poly,
    PivotPolicy, RatFunc, ReconstructOptions, Sampler, Scalar, Scenario, Weights,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pt(x: i64, y: i64) -> ClosedPoint {
    ClosedPoint::affine(Scalar::from_int(x), Scalar::from_int(y))
}

fn cstar() -> CurveModel {
    CurveModel::from_ints(&[1, -1, 0, 0, 0, 1]).unwrap()
}

fn small_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    Scalar::ratio(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=9))
}

fn combo(basis: &[Ffe], rng: &mut ChaCha8Rng) -> Ffe {
    loop {
        let mut out = Ffe::zero();
        for u in basis {
            let c = small_scalar(rng);
            if !c.is_zero() {
                out = out.add(&u.scale(&c));
            }
        }
        if !out.is_zero() {
            return out;
        }
    }
}

#[test]
fn round_trips_are_exact_on_both_builtin_scenarios() {
    for name in ["flagship-n1", "flagship-n2"] {
        let sc = Scenario::builtin(name).unwrap();
        let curve = sc.curve().unwrap();
        let mut sampler = Sampler::new(&sc).unwrap();
        for _ in 0..25 {
            let s = sampler.draw().unwrap();
            let res = invert_app_bun(
                &curve,
                &s.gamma,
                &s.pb,
                &sc.nu,
                &sampler.line_connection,
                ReconstructOptions::default(),
            )
            .unwrap();
            assert!(res.lambda.is_one());
            assert!(res.certificates.pass());
            let app = app_map(&curve, &res.connection).unwrap();
            assert!(projectively_equal(&app, &s.gamma));
            assert_eq!(bun_map(&res.connection), s.pb);
        }
    }
}

#[test]
fn pivot_order_never_changes_the_reconstruction() {
    let sc = Scenario::builtin("flagship-n1").unwrap();
    let curve = sc.curve().unwrap();
    let mut sampler = Sampler::new(&sc).unwrap();
    for k in 0..10u64 {
        let s = sampler.draw().unwrap();
        let base = reconstruct(
            &curve,
            &s.gamma,
            &s.pb,
            &sc.nu,
            &sampler.line_connection,
            ReconstructOptions::default(),
        )
        .unwrap();
        let base_ser = serde_json::to_string(&base.connection).unwrap();
        let opts = ReconstructOptions {
            pivots: PivotPolicy { shuffle_seed: Some(k + 1) },
        };
        let alt = reconstruct(&curve, &s.gamma, &s.pb, &sc.nu, &sampler.line_connection, opts)
            .unwrap();
        assert_eq!(alt.lambda, base.lambda);
        assert_eq!(alt.zeta.h, base.zeta.h);
        assert_eq!(serde_json::to_string(&alt.connection).unwrap(), base_ser);
    }
}

#[test]
fn lambda_vanishes_exactly_on_the_pairing_kernel() {
    let sc = Scenario::builtin("flagship-n1").unwrap();
    let curve = sc.curve().unwrap();
    let mut sampler = Sampler::new(&sc).unwrap();
    let cover = sampler.bundle.cover.clone();
    let mut marked_div = Divisor::zero();
    for t in &sc.t {
        marked_div = marked_div.add(&Divisor::point(t.clone()));
    }
    let gamma_div = sc.a_divisor().add(&canonical_divisor(&curve)).add(&marked_div);
    let basis = rr_space_basis(&curve, &gamma_div).unwrap();
    for _ in 0..5 {
        let pb = sampler.draw_bundle().unwrap();
        // one linear condition cuts out the degenerate sections
        let coords: Vec<Scalar> = basis
            .iter()
            .map(|u| {
                residue_functional(
                    &curve,
                    &cover,
                    &DifferentialForm::new(u.mul(&pb.bprime.cocycle, &curve)),
                )
                .unwrap()
            })
            .collect();
        let j = coords.iter().position(|c| !c.is_zero()).unwrap();
        let k = (0..coords.len()).find(|&k| k != j).unwrap();
        let gamma = basis[k].scale(&coords[j]).sub(&basis[j].scale(&coords[k]));
        assert!(sigma_test(&curve, &cover, &gamma, &pb.bprime.cocycle).unwrap());
        let res = reconstruct(
            &curve,
            &gamma,
            &pb,
            &sc.nu,
            &sampler.line_connection,
            ReconstructOptions::default(),
        )
        .unwrap();
        assert!(res.lambda.is_zero());
        assert!(res.certificates.pass());
        assert!(invert_app_bun(
            &curve,
            &gamma,
            &pb,
            &sc.nu,
            &sampler.line_connection,
            ReconstructOptions::default()
        )
        .is_err());

        let s = sampler.draw().unwrap();
        let res = reconstruct(
            &curve,
            &s.gamma,
            &s.pb,
            &sc.nu,
            &sampler.line_connection,
            ReconstructOptions::default(),
        )
        .unwrap();
        assert!(!res.lambda.is_zero());
    }
}

#[test]
fn cohomology_dimensions_and_riemann_roch() {
    let curve = cstar();
    let g = curve.genus() as i64;
    let k_div = canonical_divisor(&curve);
    let a = Divisor::from_entries(vec![(pt(0, -1), 3)]);
    assert_eq!(rr_dim(&curve, &a).unwrap(), 2);
    assert_eq!(h1_dim(&curve, &a.neg()).unwrap(), 4);
    for n in 1..=2i64 {
        let sc = Scenario::builtin(&format!("flagship-n{n}")).unwrap();
        let mut d_div = Divisor::zero();
        for t in &sc.t {
            d_div = d_div.add(&Divisor::point(t.clone()));
        }
        let expect = (3 * g - 2 + n) as usize;
        assert_eq!(rr_dim(&curve, &a.add(&k_div).add(&d_div)).unwrap(), expect);
        assert_eq!(h1_dim(&curve, &a.neg().sub(&d_div)).unwrap(), expect);
    }
    let q2 = ClosedPoint::Split {
        p: Poly::from_ints(&[1, 0, 1]),
        branch: Poly::from_ints(&[-1]),
    };
    let q2c = ClosedPoint::Split {
        p: Poly::from_ints(&[1, 0, 1]),
        branch: Poly::from_ints(&[1]),
    };
    let pool = vec![
        pt(0, 1),
        pt(0, -1),
        pt(1, 1),
        pt(1, -1),
        pt(-1, 1),
        pt(-1, -1),
        ClosedPoint::infinity(0),
        q2,
        q2c,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut checked = 0;
    while checked < 100 {
        let mut d = Divisor::zero();
        for p in &pool {
            let m = rng.gen_range(-2i64..=2);
            if m != 0 {
                d = d.add(&Divisor::point(p.clone()).scale(m));
            }
        }
        let deg = d.degree();
        if !(-3..=9).contains(&deg) {
            continue;
        }
        let l = rr_dim(&curve, &d).unwrap() as i64;
        let h = h1_dim(&curve, &d).unwrap() as i64;
        assert_eq!(l - h, deg + 1 - g, "at divisor {d:?}");
        checked += 1;
    }
}

#[test]
fn generic_classes_pair_invertibly() {
    let sc = Scenario::builtin("flagship-n1").unwrap();
    let curve = sc.curve().unwrap();
    let lb = sc.bundle(&curve).unwrap();
    let cover = lb.cover.clone();
    let g = curve.genus();
    let class_basis = h1_basis(&curve, &cover, &lb.a.neg()).unwrap();
    assert_eq!(class_basis.len(), 2 * g);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut invertible = 0;
    for _ in 0..20 {
        let q = combo(&class_basis, &mut rng);
        let b = CechOneClass::new(&curve, &cover, lb.a.neg(), q).unwrap();
        if h0_pairing_map(&curve, &cover, &lb.a, &b).unwrap().is_invertible() {
            invertible += 1;
        }
    }
    assert!(invertible >= 18, "only {invertible}/20 classes were generic");

    let sections = rr_space_basis(&curve, &lb.a).unwrap();
    for _ in 0..5 {
        let s = combo(&sections, &mut rng);
        let mut m = Matrix::zero(g, class_basis.len());
        for (j, bj) in class_basis.iter().enumerate() {
            let col =
                serre_coords(&curve, &cover, &Divisor::zero(), &s.mul(bj, &curve)).unwrap();
            for (i, v) in col.into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        assert_eq!(m.rank(), g);
        assert_eq!(kernel(&m).len(), class_basis.len() - g);
    }
}

#[test]
fn residue_sums_and_coboundary_functionals_vanish() {
    let curve = cstar();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let rand_poly = |rng: &mut ChaCha8Rng, maxdeg: usize| {
        Poly::new((0..=maxdeg).map(|_| small_scalar(rng)).collect())
    };
    for _ in 0..1000 {
        let num_a = rand_poly(&mut rng, 2);
        let num_b = rand_poly(&mut rng, 2);
        let mut den = rand_poly(&mut rng, 2);
        while den.is_zero() {
            den = rand_poly(&mut rng, 2);
        }
        let h = Ffe::new(
            RatFunc::new(num_a, den.clone()),
            RatFunc::new(num_b, den),
        );
        if h.is_zero() {
            continue;
        }
        let omega = DifferentialForm::new(h.clone());
        let mut sum = residue(&curve, &omega, &ClosedPoint::infinity(0)).unwrap();
        for (p, _) in pole_divisor(&curve, &h, &[]).unwrap().iter() {
            if !p.is_infinity() {
                sum += residue(&curve, &omega, p).unwrap();
            }
        }
        assert!(sum.is_zero(), "residues of {h} summed to {sum}");
    }

    let sc = Scenario::builtin("flagship-n1").unwrap();
    let lb = sc.bundle(&curve).unwrap();
    let cover = lb.cover.clone();
    let u0_basis = rr_space_basis(&curve, &cover.b_divisor().scale(3)).unwrap();
    let u1_basis = rr_space_basis(&curve, &cover.bp_divisor()).unwrap();
    for _ in 0..1000 {
        let q = combo(&u0_basis, &mut rng).sub(&combo(&u1_basis, &mut rng));
        assert!(class_is_zero(&curve, &cover, &Divisor::zero(), &q).unwrap());
    }
}

#[test]
fn exponent_maps_preserve_the_trace_relation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let n = rng.gen_range(1usize..=4);
        let degree = rng.gen_range(-3i64..=3);
        let mut nu: Vec<(Scalar, Scalar)> =
            (0..n).map(|_| (small_scalar(&mut rng), small_scalar(&mut rng))).collect();
        // balance the last lower exponent so the trace relation holds
        let mut sum = Scalar::zero();
        for (p, m) in &nu {
            sum += p + m;
        }
        let last = nu.last_mut().unwrap();
        last.1 = &last.1 - &(&sum + &Scalar::from_int(degree));
        let e = ExponentData::new(nu, Scalar::one(), degree);
        assert!(fuchs_check(&e));
        let i = rng.gen_range(0..n);
        let down = elm_minus_exponents(&e, i).unwrap();
        let up = elm_plus_exponents(&e, i).unwrap();
        let tw = twist_exponents(&e, i).unwrap();
        assert!(fuchs_check(&down));
        assert!(fuchs_check(&up));
        assert!(fuchs_check(&tw));
        assert_eq!(elm_plus_exponents(&down, i).unwrap(), e);
        assert_eq!(elm_minus_exponents(&up, i).unwrap(), e);
        assert_eq!(elm_minus_exponents(&tw, i).unwrap(), up);
    }
}

#[test]
fn odd_degree_stability_margin_is_never_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for n in 1..=4usize {
        for _ in 0..10 {
            let alpha: Vec<(Scalar, Scalar)> = (0..n)
                .map(|_| {
                    let a1 = Scalar::ratio(1, rng.gen_range(3i64..=9));
                    let gap = Scalar::ratio(1, n as i64 * rng.gen_range(2i64..=9));
                    (a1.clone(), &a1 + &gap)
                })
                .collect();
            let w = Weights::new(alpha).unwrap();
            assert!(w.is_small());
            for deg_f in -5..=5 {
                for mask in 0..1usize << n {
                    let inc: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
                    assert!(!stability_margin(3, deg_f, &inc, &w).is_zero());
                }
            }
        }
    }
}

#[test]
fn moduli_dimension_formulas_hold() {
    for g in 1..=5i64 {
        for n in 1..=6i64 {
            let d = moduli_dimensions(g, n);
            assert_eq!(d.parabolic_bundles, 4 * g + n - 3);
            assert_eq!(d.fixed_determinant_bundles, 3 * g + n - 3);
            assert_eq!(d.parabolic_connections, 8 * g + 2 * n - 6);
            assert_eq!(d.fixed_trace_connections, 6 * g + 2 * n - 6);
            assert_eq!(
                d.fixed_determinant_bundles + (3 * g - 3 + n),
                d.fixed_trace_connections
            );
        }
    }
}
