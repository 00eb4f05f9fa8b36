use monopole_moduli::euclidean::{l2_patch_pushforward, l2_patch_transition, l2_patch_transition_inverse};
use monopole_moduli::hyperbolic::{self, MultiCenterPotential, OrientedGeodesic, PointUHS};
use monopole_moduli::series::Series;
use monopole_moduli::symplectic::{self, Sheet, SheetData, SheetTangent, TangentVector};
use monopole_moduli::twistor::{self, TwistorPoint};
use monopole_moduli::{spectral, ExtComplex, Mobius, C64};
use proptest::prelude::*;

fn cosh_d(p: &PointUHS, q: &PointUHS) -> f64 {
    let e2 = (p.x - q.x).powi(2) + (p.y - q.y).powi(2) + (p.z - q.z).powi(2);
    1.0 + e2 / (2.0 * p.z * q.z)
}

prop_compose! {
    fn point()(x in -3.0..3.0f64, y in -3.0..3.0f64, z in 0.1..4.0f64) -> PointUHS {
        PointUHS::new(x, y, z).unwrap()
    }
}

prop_compose! {
    fn complex(scale: f64)(re in -scale..scale, im in -scale..scale) -> C64 {
        C64::new(re, im)
    }
}

prop_compose! {
    fn annulus()(r in 0.5..2.0f64, t in 0.0..std::f64::consts::TAU) -> C64 {
        C64::from_polar(r, t)
    }
}

fn boundary() -> impl Strategy<Value = ExtComplex> {
    prop_oneof![1 => Just(ExtComplex::Infinity), 4 => complex(3.0).prop_map(ExtComplex::Finite)]
}

prop_compose! {
    fn tangent()(a in prop::array::uniform3(complex(1.0)), b in prop::array::uniform3(complex(1.0))) -> ([C64; 3], [C64; 3]) {
        (a, b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn distance_is_a_metric(p in point(), q in point(), r in point()) {
        let (pq, qp) = (hyperbolic::dist(&p, &q), hyperbolic::dist(&q, &p));
        prop_assert_eq!(pq, qp);
        prop_assert!(pq >= 0.0);
        prop_assert!(hyperbolic::dist(&p, &p) == 0.0);
        prop_assert!(hyperbolic::dist(&p, &r) <= pq + hyperbolic::dist(&q, &r) + 1e-12);
    }

    #[test]
    fn mobius_maps_are_isometries(p in point(), q in point(), a in complex(2.0), b in complex(2.0), c in complex(2.0)) {
        // any (a, b; c, d) with ad - bc = 1
        prop_assume!(a.norm() > 0.2);
        let m = Mobius::new(a, b, c, (1.0 + b * c) / a);
        let (mp, mq) = (m.apply_point(&p), m.apply_point(&q));
        let before = cosh_d(&p, &q);
        prop_assert!((cosh_d(&mp, &mq) - before).abs() <= 1e-9 * before);
    }

    #[test]
    fn antipodal_map_is_an_involution(u in boundary()) {
        prop_assert!(u.tau().tau().approx_eq(&u, 1e-12));
        if let (Some(z), Some(t)) = (u.value(), u.tau().value()) {
            prop_assert!((z * t.conj() + 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn real_structure_is_a_fixed_point_free_involution(z in complex(3.0), w in complex(3.0)) {
        let p = TwistorPoint::finite(z, w);
        prop_assume!(p.is_ok());
        let p = p.unwrap();
        let s = twistor::sigma(&p);
        let back = twistor::sigma(&s);
        prop_assert!(back.z.approx_eq(&p.z, 1e-12) && back.w.approx_eq(&p.w, 1e-12));
        prop_assert!(!(s.z.approx_eq(&p.z, 1e-9) && s.w.approx_eq(&p.w, 1e-9)));
        // σ reverses the geodesic
        let (g, h) = (p.geodesic(), s.geodesic());
        prop_assert!(g.start.approx_eq(&h.end, 1e-12) && g.end.approx_eq(&h.start, 1e-12));
    }

    #[test]
    fn twistor_line_contains_geodesics_through_the_point(x in point(), end in boundary()) {
        let g = OrientedGeodesic::through(&x, end);
        let p = TwistorPoint::from_geodesic(&g);
        let section = twistor::twistor_line_section(&x);
        let (Some(z), Some(w)) = (p.z.value(), p.w.value()) else { return Ok(()) };
        let scale = (1.0 + z.norm()) * (1.0 + w.norm()) * (1.0 + x.w().norm_sqr() + x.z * x.z);
        prop_assert!(section.eval(z, w).norm() <= 1e-10 * scale);
        // the point of the geodesic nearest O is no farther from O than x
        let c = twistor::closest_point(&p);
        let o = PointUHS::origin();
        prop_assert!(cosh_d(&c, &o) <= cosh_d(&x, &o) * (1.0 + 1e-12));
        let ahead = hyperbolic::geodesic_point(&g, &x, hyperbolic::dist(&x, &c));
        let behind = hyperbolic::geodesic_point(&g, &x, -hyperbolic::dist(&x, &c));
        prop_assert!((cosh_d(&ahead, &c) - 1.0).min(cosh_d(&behind, &c) - 1.0) < 1e-9);
    }

    #[test]
    fn spectral_polynomial_is_real(cs in prop::collection::vec(point(), 1..4), l in prop::collection::vec(1u32..4, 3), mass in 0.1..2.0f64) {
        let n = cs.len();
        let v = MultiCenterPotential::for_mass(mass, cs, l[..n].to_vec()).unwrap();
        prop_assert!(twistor::ptilde(&v).sigma_reality_defect().unwrap() < 1e-12);
    }

    #[test]
    fn lifts_factorise(c0 in point(), c1 in point(), q in point(), phase in 0.0..std::f64::consts::TAU) {
        prop_assume!(cosh_d(&c0, &q) > 1.05 && cosh_d(&c1, &q) > 1.05 && cosh_d(&c0, &c1) > 1.05);
        let v = MultiCenterPotential::for_mass(1.0, vec![c0, c1], vec![1, 2]).unwrap();
        let data = spectral::lift_twistor_line(&q, &v, C64::from_polar(1.0, phase)).unwrap();
        prop_assert!(data.product_residual(64) < 1e-10);
        prop_assert!(data.reality_residual(64) < 1e-10);
        prop_assert!(data.divisor_is_disjoint_from_conjugate(1e-9));
    }

    #[test]
    fn symplectic_form_is_antisymmetric_and_bilinear(
        eta in prop::array::uniform3(complex(1.0)),
        expo in prop::array::uniform3(complex(0.5)),
        t1 in tangent(), t2 in tangent(), t3 in tangent(),
        lambda in complex(2.0),
        zeta0 in annulus(),
    ) {
        prop_assume!((zeta0.norm() - 1.0).abs() > 0.1);
        let sheets = SheetData { sheets: vec![Sheet { eta: Series::taylor(eta.to_vec()), u: Series::exp_of_polynomial(&expo, 64) }] };
        let marker = Series::taylor(vec![C64::new(-1.0, 0.0), 1.0 / zeta0]);
        let vector = |(p, r): ([C64; 3], [C64; 3])| {
            let st = SheetTangent {
                eta: Series::taylor(p.to_vec()).mul(&marker, 8),
                u: Series::taylor(r.to_vec()).mul(&marker, 8),
            };
            TangentVector::marked_at(vec![st], zeta0).unwrap()
        };
        let (x1, x2, x3) = (vector(t1), vector(t2), vector(t3));
        let mix = |(a, b): ([C64; 3], [C64; 3]), (c, d): ([C64; 3], [C64; 3])| {
            (std::array::from_fn(|i| a[i] + lambda * c[i]), std::array::from_fn(|i| b[i] + lambda * d[i]))
        };
        let x13 = vector(mix(t1, t3));
        let w = |a: &TangentVector, b: &TangentVector| symplectic::omega_d_residue(a, b, &sheets).unwrap();
        let w12 = w(&x1, &x2);
        prop_assert!((w12 + w(&x2, &x1)).norm() < 1e-12 * (1.0 + w12.norm()));
        prop_assert!(w(&x1, &x1).norm() < 1e-12);
        let lhs = w(&x13, &x2);
        let rhs = w12 + lambda * w(&x3, &x2);
        prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
    }

    #[test]
    fn l2_chart_change_roundtrips(z in annulus(), e in complex(1.0), u in annulus()) {
        let (zt, et, ut) = l2_patch_transition(z, e, u).unwrap();
        let (z2, e2, u2) = l2_patch_transition_inverse(zt, et, ut).unwrap();
        prop_assert!((z2 - z).norm() <= 1e-14 * z.norm());
        prop_assert!((e2 - e).norm() <= 1e-14 * (1.0 + e.norm()));
        prop_assert!((u2 - u).norm() <= 1e-14 * u.norm());
    }

    #[test]
    fn rho_changes_by_the_chart_sign(z in annulus(), e in complex(2.0), u in annulus(), vs in prop::array::uniform3(prop::array::uniform3(complex(1.0)))) {
        let here = symplectic::rho_form(z, e, u, vs).unwrap();
        prop_assume!(here.norm() > 1e-3);
        let pushed = vs.map(|v| l2_patch_pushforward(z, e, u, v).unwrap());
        let (zt, et, ut) = l2_patch_transition(z, e, u).unwrap();
        let there = symplectic::rho_form(zt, et, ut, pushed).unwrap();
        prop_assert!((there * z.powi(4) / here - symplectic::RHO_CHART_SIGN).norm() < 1e-10);
    }
}
