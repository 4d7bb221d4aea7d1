use super::*;

fn oracle_p0(p: PhasePoint1D, t: f64) -> PhasePoint1D {
    let tr = rk4_oracle(FlowSymbol::P0, PhasePoint::One(p), t, 1e-3).unwrap();
    match tr.last().unwrap() {
        PhasePoint::One(q) => *q,
        _ => unreachable!(),
    }
}

fn oracle_p4(p: PhasePoint2D, t: f64) -> PhasePoint2D {
    let tr = rk4_oracle(FlowSymbol::P4, PhasePoint::Two(p), t, 1e-3).unwrap();
    match tr.last().unwrap() {
        PhasePoint::Two(q) => *q,
        _ => unreachable!(),
    }
}

#[test]
fn bounded_loop_matches_oracle_and_closes() {
    let start = PhasePoint1D::new(0.2, 0.0, 0.1);
    let orbit = P0Orbit::new(start).unwrap();
    assert_eq!(orbit.kind(), OrbitKind::Bounded);
    let w = orbit.period().unwrap();
    for t in [0.3 * w, 0.71 * w, w] {
        let a = orbit.at(t).unwrap();
        let b = oracle_p0(start, t);
        assert!(a.distance(&b) < 1e-6, "t = {t}: {a:?} vs {b:?}");
    }
    assert!(orbit.at(w).unwrap().distance(&start) < 1e-6);
}

#[test]
fn unbounded_orbit_matches_oracle() {
    for (x, xi, t) in [(0.6, 0.1, 0.8), (-0.5, 0.3, 1.2), (0.1, 0.9, -0.7), (-0.05, -0.4, 0.5)] {
        let start = PhasePoint1D::new(x, xi, 0.1);
        let a = flow_p0(start, t).unwrap();
        let b = oracle_p0(start, t);
        assert!(a.distance(&b) < 1e-6, "({x},{xi}) t = {t}: {a:?} vs {b:?}");
    }
}

#[test]
fn axis_orbits_match_oracle() {
    for (xi, t) in [(0.2, 1.0), (0.8, 0.6), (-0.8, 0.6), (0.0, 2.0)] {
        let start = PhasePoint1D::new(0.0, xi, 0.1);
        let a = flow_p0(start, t).unwrap();
        let b = oracle_p0(start, t);
        assert!(a.distance(&b) < 1e-6, "xi = {xi}: {a:?} vs {b:?}");
    }
}

#[test]
fn stationary_points_stay() {
    let h: f64 = 0.1;
    for x in [h.sqrt(), -h.sqrt()] {
        let p = PhasePoint1D::new(x, 0.0, h);
        let orbit = P0Orbit::new(p).unwrap();
        assert_eq!(orbit.kind(), OrbitKind::Stationary);
        assert!(orbit.at(3.7).unwrap().distance(&p) < 1e-14);
    }
}

#[test]
fn separatrix_matches_oracle() {
    // C0 = 0 off the axis: x^2 + xi^2 = 3h
    let h: f64 = 0.1;
    let r = (3.0 * h).sqrt();
    let start = PhasePoint1D::new(r * 0.6, r * 0.8, h);
    let orbit = P0Orbit::new(start).unwrap();
    assert_eq!(orbit.kind(), OrbitKind::Separatrix);
    for t in [0.5, 2.0, -1.0] {
        let a = orbit.at(t).unwrap();
        let b = oracle_p0(start, t);
        assert!(a.distance(&b) < 1e-6, "t = {t}: {a:?} vs {b:?}");
    }
}

#[test]
fn time_reversal() {
    for (x, xi) in [(0.2, 0.05), (0.7, -0.2), (-0.3, 0.4)] {
        let p = PhasePoint1D::new(x, xi, 0.1);
        let Ok(q) = flow_p0(p, 0.9) else { continue };
        let back = flow_p0(q, -0.9).unwrap();
        assert!(back.distance(&p) < 1e-8, "{p:?} -> {back:?}");
    }
}

#[test]
fn blowup_is_reported_and_matches_oracle() {
    let start = PhasePoint1D::new(-0.8, -0.5, 0.1);
    let orbit = P0Orbit::new(start).unwrap();
    let tb = orbit.blowup_time(true).expect("forward blow-up");
    assert!(matches!(orbit.at(tb * 1.01), Err(Error::BlowUp { .. })));
    let tr = rk4_oracle(FlowSymbol::P0, PhasePoint::One(start), 2.0 * tb, 1e-3).unwrap();
    let to = tr.blowup_time.expect("oracle blow-up");
    assert!((to - tb).abs() < 1e-4 * (1.0 + tb), "{to} vs {tb}");
}

#[test]
fn p4_matches_oracle_and_conserves() {
    for (p, t) in [
        (PhasePoint2D::new(0.3, 0.1, 0.0, 0.2, 0.1), 1.5),
        (PhasePoint2D::new(-0.2, 0.4, 0.3, -0.1, 0.1), 0.9),
        (PhasePoint2D::new(0.1, 0.0, -0.2, 0.0, 0.1), 2.0),
    ] {
        let orbit = P4Orbit::new(p).unwrap();
        let a = orbit.at(t).unwrap();
        let b = oracle_p4(p, t);
        assert!(a.distance(&b) < 1e-6, "{p:?}: {a:?} vs {b:?}");
        let c0 = p4(a.x, a.y, a.xi, a.eta, p.h);
        assert!((c0 - orbit.c0()).abs() < 1e-9);
        assert!((a.y * a.y + a.eta * a.eta - orbit.c1sq()).abs() < 1e-9);
        let samples = orbit.sample(&[t / 3.0, 2.0 * t / 3.0, t]).unwrap();
        assert!(samples[2].distance(&a) < 1e-9);
    }
}

#[test]
fn pocket_loops_close_inside_the_disc() {
    let rep = invariant_pocket_check(0.1, 5).unwrap();
    assert!(rep.all_closed, "{rep:?}");
    assert!(rep.max_radius < rep.pocket_radius);
}

#[test]
fn level_set_has_two_components_inside_the_pocket_band() {
    let (h, c0) = (0.1, 0.025);
    let ls = p0_level_set(h, c0, 64, 3.0).unwrap();
    assert_eq!(ls.components(), 2);
    for pts in [ls.bounded.as_ref().unwrap(), &ls.unbounded] {
        for p in pts {
            assert!((p0(p[1], p[2], h) - c0).abs() < 1e-9, "{p:?}");
        }
    }
    let big = p0_level_set(h, 0.05, 64, 3.0).unwrap();
    assert_eq!(big.components(), 1);
}

#[test]
fn figure_parameters_close() {
    // loop on the C0 = 0.025 level for h = 0.1
    let ls = p0_level_set(0.1, 0.025, 32, 3.0).unwrap();
    let lp = ls.bounded.unwrap();
    let (a, b) = (lp[0], lp[lp.len() - 1]);
    let start = PhasePoint1D::new(a[1], a[2], 0.1);
    let orbit = P0Orbit::new(start).unwrap();
    let w = orbit.period().unwrap();
    assert!((w - b[0]).abs() < 1e-9);
    assert!(orbit.at(w).unwrap().distance(&start) < 1e-6);
    assert!(oracle_p0(start, w).distance(&start) < 1e-6);
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn closed_form_conserves_p0(x in -0.8f64..0.8, xi in -0.8f64..0.8, t in -1.5f64..1.5) {
            let p = PhasePoint1D::new(x, xi, 0.1);
            if let Ok(orbit) = P0Orbit::new(p) {
                if let Ok(q) = orbit.at(t) {
                    let c = p0(x, xi, 0.1);
                    prop_assert!((p0(q.x, q.xi, 0.1) - c).abs() < 1e-9 * (1.0 + q.x.abs().powi(3)));
                }
            }
        }

        #[test]
        fn closed_form_agrees_with_oracle(x in -0.6f64..0.6, xi in -0.6f64..0.6, t in 0.05f64..1.0) {
            let p = PhasePoint1D::new(x, xi, 0.1);
            let Ok(orbit) = P0Orbit::new(p) else { return Ok(()) };
            if let Some(tb) = orbit.blowup_time(true) {
                prop_assume!(t < 0.8 * tb);
            }
            let a = orbit.at(t).unwrap();
            let b = oracle_p0(p, t);
            prop_assert!(a.distance(&b) < 1e-6 * (1.0 + a.x.hypot(a.xi)), "{:?} vs {:?}", a, b);
        }

        #[test]
        fn linear_flows_conserve(c in proptest::array::uniform4(-2.0f64..2.0), t in -3.0f64..3.0) {
            let p = PhasePoint2D::from_coords(c, 1.0);
            let g = flow_gyrator(p, t);
            let w = flow_hyperbolic(p, t);
            prop_assert!((g.x * g.y + g.xi * g.eta - (p.x * p.y + p.xi * p.eta)).abs() < 1e-10);
            let e = |q: &PhasePoint2D| q.xi * q.eta - q.x * q.y;
            prop_assert!((e(&w) - e(&p)).abs() < 1e-9 * (1.0 + t.cosh().powi(2)));
        }
    }
}
