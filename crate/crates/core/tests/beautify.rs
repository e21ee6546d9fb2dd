use geocycle::beautify::{bisect, h2, h3, miranda_check, solve, Target};

#[test]
fn geodesic_roots_lie_in_their_brackets() {
    for target in [Target::Geo2, Target::Geo3] {
        let r = solve(target).unwrap();
        assert!(r.bracket[0][0] < r.root[0] && r.root[0] < r.bracket[0][1]);
        assert!(r.residual.abs() < 1e-12);
        assert!(r.design_residual < 1e-9);
    }
    let r2 = solve(Target::Geo2).unwrap();
    assert!(h2(r2.root[0]).abs() < 1e-12);
    let r3 = solve(Target::Geo3).unwrap();
    assert!(h3(r3.root[0]).abs() < 1e-12);
}

#[test]
fn cube_root_is_certified() {
    assert!(miranda_check(64).holds());
    let r = solve(Target::Cube).unwrap();
    assert_eq!(r.value.len(), 2);
    assert!(r.design_residual < 1e-9);
}

#[test]
fn bisection_requires_a_sign_change() {
    assert!(bisect(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-12).is_err());
    let (bracket, _) = bisect(|x| Ok(x - 0.25), 0.0, 1.0, 1e-14).unwrap();
    assert!(bracket[0] <= 0.25 && 0.25 <= bracket[1]);
}

#[test]
fn targets_parse() {
    for t in Target::ALL {
        assert_eq!(t.name().parse::<Target>().unwrap(), t);
    }
    assert!("geo5".parse::<Target>().is_err());
}
