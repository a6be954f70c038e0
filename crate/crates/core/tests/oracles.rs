//! Numerical results checked against independent references: closed-form
//! distances, a graph Dijkstra and exhaustive search.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use bubblecut::convexify::{beta, mollify, KernelProfile};
use bubblecut::cut::{build_cut_graph, minimize_phi_area, perimeter, CutProblem};
use bubblecut::geometry::{distance_transform, signed_distance};
use bubblecut::metrics::{generate_metric, MetricSpec};
use bubblecut::{MetricGrid, Region, ScalarField, Step, Topology};

fn plane(n: usize, half: f64) -> MetricGrid {
    let h = 2.0 * half / (n - 1) as f64;
    MetricGrid::euclidean(n, n, h, [-half, -half], Topology::Plane).unwrap()
}

/// Shortest paths along the 8-neighbour graph with midpoint edge lengths.
fn dijkstra8(grid: &MetricGrid, source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; grid.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Reverse((0u64, source)));
    while let Some(Reverse((bits, p))) = heap.pop() {
        let d = f64::from_bits(bits);
        if d > dist[p] {
            continue;
        }
        for (di, dj) in [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)] {
            if let Step::Node(q) = grid.step(p, di, dj) {
                if !grid.in_domain(q) {
                    continue;
                }
                let nd = d + grid.vec_len(grid.tensor_mid(p, q), di as f64, dj as f64);
                if nd < dist[q] {
                    dist[q] = nd;
                    heap.push(Reverse((nd.to_bits(), q)));
                }
            }
        }
    }
    dist
}

#[test]
fn euclidean_point_distance_is_between_exact_and_graph_paths() {
    let g = plane(101, 1.0);
    let c = g.index(50, 50);
    let fmm = distance_transform(&g, &Region::from_indices(&g, [c]).unwrap()).unwrap();
    let graph = dijkstra8(&g, c);
    let mut worst = 0.0f64;
    for k in 0..g.len() {
        let [x, y] = g.coords(k);
        let exact = (x * x + y * y).sqrt();
        let d = fmm.at(k);
        assert!(d <= graph[k] + 1e-12, "fast marching above the graph distance at {k}");
        if exact > 0.2 {
            worst = worst.max((d - exact).abs() / exact);
        }
    }
    assert!(worst < 0.02, "relative error {worst}");
}

#[test]
fn poincare_distance_from_origin() {
    let g = generate_metric(&MetricSpec::PoincareDisk { n: 201, half_width: 0.8, disk_radius: Some(0.8) }).unwrap();
    let c = g.index(100, 100);
    let d = distance_transform(&g, &Region::from_indices(&g, [c]).unwrap()).unwrap();
    for k in g.domain_mask().iter().enumerate().filter(|e| *e.1).map(|e| e.0) {
        let [x, y] = g.coords(k);
        let r = (x * x + y * y).sqrt();
        if (0.2..0.75).contains(&r) {
            let exact = 2.0 * r.atanh();
            assert!((d.at(k) - exact).abs() / exact < 0.03, "r={r}: {} vs {exact}", d.at(k));
        }
    }
}

#[test]
fn signed_distance_to_a_disk() {
    let g = plane(161, 1.0);
    let disk = Region::from_fn(&g, |[x, y]| x * x + y * y <= 0.25);
    let sd = signed_distance(&g, &disk).unwrap();
    for k in 0..g.len() {
        let [x, y] = g.coords(k);
        let exact = (x * x + y * y).sqrt() - 0.5;
        assert!((sd.at(k) - exact).abs() < 2.0 * g.h() + 0.02 * exact.abs(), "{} vs {exact}", sd.at(k));
    }
}

#[test]
fn hyperbolic_circle_perimeters() {
    // Euclidean radius s ↦ hyperbolic circumference 2π sinh(2 atanh s).
    let g = generate_metric(&MetricSpec::PoincareDisk { n: 256, half_width: 0.84, disk_radius: Some(0.8) }).unwrap();
    let graph = build_cut_graph(&g).unwrap();
    for s in [0.3, 0.5, 0.7] {
        let disk = Region::from_fn(&g, |[x, y]| x * x + y * y <= s * s).intersection(&Region::domain(&g));
        let l = perimeter(&graph, &disk);
        let exact = 2.0 * PI * (2.0 * f64::atanh(s)).sinh();
        assert!((l / exact - 1.0).abs() < 0.04, "s={s}: {l} vs {exact}");
    }
}

#[test]
fn tiny_instances_match_exhaustive_search() {
    // 4 × 4 plane with its own φ on the middle columns; the best set is
    // found by enumerating all 2^16 subsets.
    let g = MetricGrid::euclidean(4, 4, 1.0, [0.0, 0.0], Topology::Plane).unwrap();
    let graph = build_cut_graph(&g).unwrap();
    for (phi_mid, phi_side) in [(9.0, -1.0), (3.0, 0.5), (0.1, 0.1), (6.0, 6.0)] {
        let phi = ScalarField::from_fn(&g, |[x, _]| if x == 1.0 || x == 2.0 { phi_mid } else { phi_side });
        let p = CutProblem::new(&graph, phi.clone());
        let sol = minimize_phi_area(&p).unwrap();
        let mut best = f64::INFINITY;
        for bits in 0u32..1 << 16 {
            let r = Region::from_mask(&g, (0..16).map(|k| bits >> k & 1 == 1).collect()).unwrap();
            best = best.min(p.evaluate(&r).energy);
        }
        assert!((sol.energy - best).abs() < 1e-6, "{phi_mid}/{phi_side}: {} vs {best}", sol.energy);
    }
}

#[test]
fn mollifier_reproduces_affine_functions() {
    // A symmetric kernel leaves affine functions unchanged away from the edge.
    let g = plane(81, 1.0);
    let f = ScalarField::from_fn(&g, |[x, y]| 2.0 * x - 0.5 * y + 1.0);
    let m = mollify(&g, &f, 0.1, KernelProfile::QuarticBump).unwrap();
    for k in 0..g.len() {
        let [x, y] = g.coords(k);
        if x.abs() < 0.85 && y.abs() < 0.85 {
            assert!((m.at(k) - f.at(k)).abs() < 1e-10);
        }
    }
}

#[test]
fn bending_values() {
    assert_eq!(beta(0.0, 0.7), 0.7);
    assert_eq!(beta(0.5, 2.0), 4.0);
    assert_eq!(beta(0.25, -1.0), -0.75);
}
