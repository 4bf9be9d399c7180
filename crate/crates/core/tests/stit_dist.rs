//! Distributional checks of the simulator against closed forms and against
//! alternative constructions of the same law.

use std::f64::consts::TAU;

use rand::Rng;
use rayon::prelude::*;
use stit_core::capacity::{analytic_missing, Estimate};
use stit_core::stit::{simulate, Construction, Simulator};
use stit_core::{rng, CompactSet, DirectionalMeasure, Point, Polygon, SimulationParams, Tessellation};

const N: u64 = 10_000;

fn iso() -> DirectionalMeasure {
    DirectionalMeasure::isotropic(TAU)
}

fn count_missed(n: u64, k: &CompactSet, run: impl Fn(u64) -> Tessellation + Sync) -> u64 {
    (0..n)
        .into_par_iter()
        .map(|i| u64::from(!run(i).hits_internal(k).unwrap()))
        .sum()
}

#[test]
fn centred_unit_square_survives_with_exp_minus_four() {
    let w = Polygon::rectangle(0.0, 0.0, 10.0, 10.0);
    let k = CompactSet::from(Polygon::rectangle(4.5, 4.5, 5.5, 5.5));
    let missed = count_missed(N, &k, |i| {
        simulate(&SimulationParams::new(w.clone(), 1.0, iso(), rng::derive(11, i))).unwrap()
    });
    let est = Estimate::from_counts(missed, N, 11);
    assert!(est.agrees_with_probability((-4.0f64).exp(), 3.0), "{est:?}");
}

#[test]
fn large_window_conserves_area() {
    let w = Polygon::rectangle(0.0, 0.0, 10.0, 10.0);
    for seed in 0..20 {
        let t = simulate(&SimulationParams::new(w.clone(), 1.0, iso(), seed)).unwrap();
        assert!(t.area_defect() <= 1e-6);
        assert!(t.live_cells.len() > 1);
    }
}

#[test]
fn window_rate_construction_has_the_same_law() {
    let w = Polygon::rectangle(-1.0, -1.0, 2.0, 1.5);
    let k = CompactSet::from(Polygon::segment(Point::new(0.1, 0.2), Point::new(0.9, 0.4)));
    let a = 0.8;
    for m in [iso(), DirectionalMeasure::axis(1.0)] {
        let run = |c: Construction, tag: u64| {
            let m = m.clone();
            let w = w.clone();
            count_missed(N, &k, move |i| {
                let mut p = SimulationParams::new(w.clone(), a, m.clone(), rng::derive(tag, i));
                p.construction = c;
                simulate(&p).unwrap()
            })
        };
        let cell = Estimate::from_counts(run(Construction::CellRate, 21), N, 21);
        let window = Estimate::from_counts(run(Construction::WindowRate, 22), N, 22);
        assert!(cell.agrees_with_estimate(&window, 3.0), "{cell:?} vs {window:?}");
        let exact = analytic_missing(&k, a, &m).unwrap();
        assert!(window.agrees_with_probability(exact, 3.0));
    }
}

#[test]
fn continuing_a_run_matches_a_fresh_run() {
    let w = Polygon::rectangle(0.0, 0.0, 3.0, 2.0);
    let k = CompactSet::from(Polygon::regular(5, Point::new(1.5, 1.0), 0.4));
    let (a, a2) = (0.4, 1.0);
    let fresh = count_missed(N, &k, |i| {
        simulate(&SimulationParams::new(w.clone(), a2, iso(), rng::derive(31, i))).unwrap()
    });
    // step to a, then on to a2
    let stepped = count_missed(N, &k, |i| {
        let mut sim = Simulator::new(&SimulationParams::new(w.clone(), a2, iso(), rng::derive(32, i))).unwrap();
        sim.advance_to(a).unwrap();
        sim.advance_to(a2).unwrap();
        sim.snapshot()
    });
    // restart each cell of the state at a with fresh randomness
    let renewed = count_missed(N, &k, |i| {
        simulate(&SimulationParams::new(w.clone(), a, iso(), rng::derive(33, i)))
            .unwrap()
            .nest(a2 - a, &iso(), rng::derive(34, i))
            .unwrap()
    });
    let fresh = Estimate::from_counts(fresh, N, 31);
    let stepped = Estimate::from_counts(stepped, N, 32);
    let renewed = Estimate::from_counts(renewed, N, 33);
    assert!(fresh.agrees_with_estimate(&stepped, 3.0), "{fresh:?} {stepped:?}");
    assert!(fresh.agrees_with_estimate(&renewed, 3.0), "{fresh:?} {renewed:?}");
}

#[test]
fn stepping_reproduces_the_one_shot_run_exactly() {
    let p = SimulationParams::new(Polygon::unit_square().scale(4.0), 1.5, iso(), 77);
    let mut sim = Simulator::new(&p).unwrap();
    for t in [0.1, 0.5, 0.5, 1.2, 1.5] {
        sim.advance_to(t).unwrap();
    }
    assert_eq!(sim.snapshot(), simulate(&p).unwrap());
}

#[test]
fn hit_predicate_agrees_with_single_cell_containment() {
    let w = Polygon::rectangle(0.0, 0.0, 5.0, 5.0);
    let mut r = rng::stream(41, 0);
    for i in 0..200 {
        let t = simulate(&SimulationParams::new(w.clone(), 1.0, iso(), i)).unwrap();
        for _ in 0..10 {
            let c = Point::new(r.random_range(0.5..4.5), r.random_range(0.5..4.5));
            let d = Point::new(r.random_range(-0.4..0.4), r.random_range(-0.4..0.4));
            let k = CompactSet::from(Polygon::segment(c, c + d));
            assert_eq!(t.hits_internal(&k).unwrap(), !t.contained_in_single_cell(&k).unwrap());
        }
    }
}

#[test]
fn restriction_conserves_area_and_convexity() {
    let w = Polygon::regular(9, Point::origin(), 4.0);
    let sub = Polygon::rectangle(-1.5, -2.0, 2.0, 1.0);
    for seed in 0..30 {
        let t = simulate(&SimulationParams::new(w.clone(), 1.2, iso(), seed)).unwrap();
        assert_eq!(t.restrict(&w).unwrap().live_cells, t.live_cells);
        let r = t.restrict(&sub).unwrap();
        assert!(r.area_defect() <= 1e-9);
        for c in &r.live_cells {
            let hull = stit_core::geometry::convex_hull(c.polygon.vertices()).unwrap();
            assert_eq!(&hull, &c.polygon);
        }
        for e in &r.internal_edges {
            assert!(sub.contains_point(e.a, 1e-9) && sub.contains_point(e.b, 1e-9));
        }
    }
}

#[test]
fn nesting_conserves_area() {
    let w = Polygon::rectangle(0.0, 0.0, 4.0, 3.0);
    for seed in 0..20 {
        let t = simulate(&SimulationParams::new(w.clone(), 0.7, iso(), seed)).unwrap();
        let n = t.nest(0.7, &iso(), seed + 100).unwrap();
        assert!(n.area_defect() <= 1e-9);
        assert!((n.time - 1.4).abs() < 1e-12);
        let tiny = t.nest(1e-12, &iso(), seed).unwrap();
        assert_eq!(tiny.live_cells, t.live_cells);
    }
}
