use geocycle::curve::{enclosed_area, Curve};
use geocycle::quadrature::QuadratureSpec;
use geocycle::sphere::{distance, integrate_cycle, CycleDocument, GeodesicArc, GeodesicCycle, SpherePoint};
use geocycle::Error;
use proptest::prelude::*;

fn great_circle() -> GeodesicCycle {
    GeodesicCycle::from_coords(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, -1.0, 0.0]]).unwrap()
}

#[test]
fn great_circle_length_and_area() {
    let c = great_circle();
    assert!((c.length() - 2.0 * std::f64::consts::PI).abs() < 1e-14);
    let area = enclosed_area(Curve::Geodesic(&c), &QuadratureSpec::default()).unwrap();
    assert!((area - 0.5).abs() < 1e-14);
}

#[test]
fn equator_path_integrals() {
    let c = great_circle();
    let v = integrate_cycle(&c, |p| p[0] * p[0], &QuadratureSpec::default()).unwrap() / c.length();
    assert!((v - 0.5).abs() < 1e-13);
    let z = integrate_cycle(&c, |p| p[2] * p[2], &QuadratureSpec::default()).unwrap();
    assert!(z.abs() < 1e-15);
}

#[test]
fn antipodal_arc_is_rejected() {
    let a = SpherePoint::new(vec![0.0, 0.0, 1.0]).unwrap();
    assert_eq!(GeodesicArc::new(a.clone(), a.antipode()).unwrap_err(), Error::Antipodal);
}

#[test]
fn invalid_points_are_rejected() {
    assert!(SpherePoint::new(vec![0.0, 0.0, 0.0]).is_err());
    assert!(SpherePoint::new(vec![1.0, 0.0]).is_err());
    assert!(GeodesicCycle::from_coords(&[[1.0, 0.0, 0.0]]).is_err());
}

#[test]
fn cycle_json_round_trip_is_exact() {
    let c = GeodesicCycle::from_coords(&[[0.3, 0.1, 0.9], [-0.2, 0.7, 0.1], [0.5, -0.6, -0.3]]).unwrap();
    let text = serde_json::to_string(&c).unwrap();
    let back: GeodesicCycle = serde_json::from_str(&text).unwrap();
    assert_eq!(back, c);
    let doc: CycleDocument = serde_json::from_str(&text).unwrap();
    assert_eq!(doc.dim, 3);
    assert!(doc.closed);
}

fn unit3() -> impl Strategy<Value = SpherePoint> {
    prop::array::uniform3(-1.0f64..1.0)
        .prop_filter("non-degenerate", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-2)
        .prop_map(|v| SpherePoint::new(v.to_vec()).unwrap())
}

proptest! {
    #[test]
    fn arcs_stay_on_sphere_with_constant_speed(a in unit3(), b in unit3(), s in 0.0f64..1.0) {
        prop_assume!(a.dot(&b) > -0.99);
        let arc = GeodesicArc::new(a.clone(), b.clone()).unwrap();
        let p = arc.eval(s);
        let norm: f64 = p.coords().iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!((norm - 1.0).abs() < 1e-12);
        let d = distance(&a, &b).unwrap();
        prop_assert!((distance(&a, &p).unwrap() - s * d).abs() < 1e-7);
    }

    #[test]
    fn reversal_preserves_length(a in unit3(), b in unit3(), c in unit3()) {
        prop_assume!(a.dot(&b) > -0.99 && b.dot(&c) > -0.99 && c.dot(&a) > -0.99);
        let cycle = GeodesicCycle::new(vec![a, b, c]).unwrap();
        prop_assert!((cycle.length() - cycle.reversed().length()).abs() < 1e-12);
    }
}
