mod common;

use common::fixtures::*;
use common::raster::{inscribed_radius, rasterize, Grid};
use pocketforge_core::geometry::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

const TOL: f64 = DEFAULT_TOL;

#[test]
fn rounded_corner_areas_match_closed_form() {
    // 10x10 grown by 5: square + four 10x5 strips + four quarter disks.
    let grown = offset_region(&square(10.0), 5.0, TOL).unwrap();
    assert!((grown.area() - (100.0 + 200.0 + 25.0 * PI)).abs() < 0.5);
    // 20x20 opened by 10 loses (4 - pi) r^2 at the corners.
    let opened = opening(&square(20.0), 10.0, TOL).unwrap();
    assert!((opened.area() - (400.0 - (4.0 - PI) * 25.0)).abs() < 0.5);
}

#[test]
fn opening_drops_narrow_limb() {
    let r = square_with_limb();
    let o = opening(&r, 12.0, TOL).unwrap();
    assert_eq!(o.metrics().component_count, 1);
    // A 12 mm disk can only graze the limb entrance.
    assert!(o.bbox().max.x < 22.0);
    let g = Grid::around(&r, 2.0, 0.05);
    let want = rasterize(&r, g).open(12.0);
    assert!(rasterize(&o, g).xor_area(&want) < 0.01 * want.area());

    // Both arms of the plain L are 10 wide; its inscribed disk is
    // 10*sqrt(2)/(1+sqrt(2)) = 5.858 in radius, so a 12 mm disk never fits.
    let l = l_shape();
    let g = Grid::around(&l, 2.0, 0.05);
    assert_eq!(rasterize(&l, g).open(12.0).count(), 0);
    assert!(opening(&l, 12.0, TOL).unwrap().is_empty());
    let mir = max_inscribed_radius(&l, TOL).unwrap();
    assert!((mir - 10.0 * 2f64.sqrt() / (1.0 + 2f64.sqrt())).abs() <= TOL);
}

#[test]
fn opening_matches_raster_on_holed_region() {
    let outer = square(40.0).parts[0].outer.clone();
    let hole = vec![
        Point::new(15.0, 12.0),
        Point::new(15.0, 28.0),
        Point::new(25.0, 28.0),
        Point::new(25.0, 12.0),
    ];
    let r = Region::from_part(PolygonWithHoles::new(outer, vec![hole]));
    for d in [4.0, 9.0, 13.0] {
        let g = Grid::around(&r, 2.0, 0.05);
        let want = rasterize(&r, g).open(d);
        let got = rasterize(&opening(&r, d, TOL).unwrap(), g);
        assert!(got.xor_area(&want) < 0.01 * r.area(), "d={d}: {}", got.xor_area(&want));
        assert_eq!(got.components(), want.components());
    }
}

#[test]
fn dilation_and_erosion_match_raster() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..8 {
        let r = random_rectilinear(&mut rng, 20);
        let g = Grid::around(&r, 6.0, 0.05);
        let m = rasterize(&r, g);
        for delta in [-3.5, -1.0, 2.0, 5.0] {
            let got = rasterize(&offset_region(&r, delta, TOL).unwrap(), g);
            let want = if delta < 0.0 { m.erode(-delta) } else { m.dilate(delta) };
            assert!(got.xor_area(&want) < 0.01 * r.area(), "delta={delta}");
        }
    }
}

#[test]
fn inscribed_radius_of_polygon_and_regions() {
    // A 64-gon circumscribing a radius-7 circle.
    let circ = 7.0 / (PI / 64.0).cos();
    let r = regular_polygon(64, circ, Point::new(3.0, -2.0));
    let c = max_inscribed_circle(&r, TOL).unwrap();
    assert!((c.radius - 7.0).abs() <= 0.05);
    assert!(c.center.dist(Point::new(3.0, -2.0)) < 0.1);

    let d = dumbbell(40.0, 10.0, 30.0);
    let mir = max_inscribed_radius(&d, TOL).unwrap();
    let g = Grid::around(&d, 1.0, 0.05);
    assert!((mir - inscribed_radius(&rasterize(&d, g))).abs() < 0.06);
}

#[test]
fn disconnected_inputs_and_empty_results() {
    let two = union(&Region::rect(0.0, 0.0, 5.0, 5.0), &Region::rect(10.0, 0.0, 15.0, 5.0));
    assert_eq!(two.metrics().component_count, 2);
    let merged = offset_region(&two, 3.0, TOL).unwrap();
    assert_eq!(merged.metrics().component_count, 1);
    assert!(offset_region(&Region::empty(), 2.0, TOL).unwrap().is_empty());
    let sep = opening(&dumbbell(40.0, 10.0, 30.0), 12.0, TOL).unwrap();
    assert_eq!(sep.metrics().component_count, 2);
}

fn rect_strategy() -> impl Strategy<Value = Region> {
    (0u64..10_000).prop_map(|seed| random_rectilinear(&mut ChaCha8Rng::seed_from_u64(seed), 20))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn offset_is_monotone(r in rect_strategy(), d1 in -6.0f64..6.0, gap in 0.1f64..4.0) {
        let a = offset_region(&r, d1, TOL).unwrap();
        let b = offset_region(&r, d1 + gap, TOL).unwrap();
        prop_assert!(difference(&a, &b).area() < 1e-3);
    }

    #[test]
    fn opening_is_anti_extensive_idempotent_and_monotone(r in rect_strategy(), d in 0.5f64..12.0, gap in 0.5f64..6.0) {
        let o = opening(&r, d, TOL).unwrap();
        prop_assert!(difference(&o, &r).area() < 1e-3);
        let oo = opening(&o, d, TOL).unwrap();
        prop_assert!(symmetric_difference(&o, &oo).area() < 0.005 * r.area().max(1.0));
        let wider = opening(&r, d + gap, TOL).unwrap();
        prop_assert!(difference(&wider, &o).area() < 1e-3 * r.area());
    }

    #[test]
    fn offset_agrees_with_raster_oracle(r in rect_strategy(), delta in -5.0f64..5.0) {
        let g = Grid::around(&r, 6.0, 0.05);
        let m = rasterize(&r, g);
        let want = if delta < 0.0 { m.erode(-delta) } else { m.dilate(delta) };
        let got = rasterize(&offset_region(&r, delta, TOL).unwrap(), g);
        prop_assert!(got.xor_area(&want) < 0.01 * r.area());
    }
}
