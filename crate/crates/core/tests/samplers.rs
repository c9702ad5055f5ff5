use gumbel_hull::bodies::{make_ball, make_ellipsoid};
use gumbel_hull::limits::chi_square_test;
use gumbel_hull::sampling::{patch_index, patch_masses, sample_h_kappa, sample_uniform_area, PATCH_COUNT};

fn counts(body: &gumbel_hull::bodies::ConvexBody, points: &[gumbel_hull::bodies::BoundaryPoint]) -> Vec<usize> {
    let mut c = vec![0usize; PATCH_COUNT];
    for p in points {
        c[patch_index(body, p)] += 1;
    }
    c
}

#[test]
fn curvature_sampler_matches_patch_masses() {
    for body in [
        make_ellipsoid(&[2.0, 1.0, 1.0]).unwrap(),
        make_ellipsoid(&[3.0, 1.0]).unwrap(),
        make_ellipsoid(&[1.5, 1.0, 0.7]).unwrap(),
    ] {
        let s = sample_h_kappa(&body, 20_000, 77).unwrap();
        let r = chi_square_test(&counts(&body, s.points()), &patch_masses(&body, true).unwrap()).unwrap();
        assert!(r.p_value > 0.001, "{}: {r:?}", body.describe());
    }
}

#[test]
fn area_sampler_matches_patch_areas() {
    let body = make_ellipsoid(&[2.0, 1.0, 1.0]).unwrap();
    let s = sample_uniform_area(&body, 20_000, 78).unwrap();
    let r = chi_square_test(&counts(&body, s.points()), &patch_masses(&body, false).unwrap()).unwrap();
    assert!(r.p_value > 0.001, "{r:?}");
}

#[test]
fn the_two_samplers_differ_off_the_sphere() {
    let body = make_ellipsoid(&[2.0, 1.0, 1.0]).unwrap();
    let s = sample_uniform_area(&body, 20_000, 79).unwrap();
    let r = chi_square_test(&counts(&body, s.points()), &patch_masses(&body, true).unwrap()).unwrap();
    assert!(r.p_value < 1e-6, "{r:?}");
}

#[test]
fn on_the_sphere_both_samplers_are_uniform() {
    let body = make_ball(3, 2.0).unwrap();
    let a = patch_masses(&body, true).unwrap();
    let b = patch_masses(&body, false).unwrap();
    let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
    for (x, y) in a.iter().zip(&b) {
        assert!((x / sa - y / sb).abs() < 1e-10);
    }
}
