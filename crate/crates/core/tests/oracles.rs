//! Entropy values checked against exact characteristic polynomials.

mod common;

use common::{bisect, log_spectral_radius, LOG_PHI};
use core_entropy::circle::Angle;
use core_entropy::fixtures;
use core_entropy::hubbard::forest_entropy;
use core_entropy::markov::{entropy, incidence_matrix, IncidenceMatrix};
use core_entropy::portrait::quadratic_portrait;
use core_entropy::thurston::{thurston_entropy, transition_graph};

#[test]
fn oracle_sanity() {
    assert!((log_spectral_radius(&[vec![1, 1], vec![1, 0]]) - LOG_PHI).abs() < 1e-12);
    assert!((log_spectral_radius(&[vec![2]]) - 2f64.ln()).abs() < 1e-12);
    assert_eq!(log_spectral_radius(&[vec![0, 1], vec![0, 0]]), 0.0);
    // repeated roots at 0 and 1
    assert!((log_spectral_radius(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 0]]) - 0.0).abs() < 1e-12);
    let m = [vec![2, 2, 2, 1, 2], vec![1, 0, 0, 1, 0], vec![0, 1, 1, 1, 2], vec![2, 2, 2, 2, 1], vec![0, 0, 0, 1, 0]];
    let r = bisect(|x| x * x * x - 5.0 * x * x - x - 5.0, 5.0, 6.0);
    assert!((log_spectral_radius(&m) - r.ln()).abs() < 1e-12);
    let r = bisect(|x| x * x - 2.0, 0.0, 2.0);
    assert!((r - 2f64.sqrt()).abs() < 1e-14);
}

#[test]
fn forest_matrices_match_charpoly() {
    for (name, f) in fixtures::all_forests() {
        let m = incidence_matrix(f.system());
        let expected = log_spectral_radius(m.rows());
        assert!((forest_entropy(&f).value - expected).abs() < 1e-9, "{name}");
    }
}

#[test]
fn quadratic_thurston_matrices_match_charpoly() {
    let mut checked = 0;
    for q in 2..=24u64 {
        for p in 1..q {
            let theta = Angle::new(p, q).unwrap();
            if theta.denominator() != q {
                continue;
            }
            let portrait = quadratic_portrait(theta).unwrap();
            let graph = transition_graph(&portrait);
            if graph.pairs.is_empty() || graph.pairs.len() > 10 {
                continue;
            }
            let h = thurston_entropy(&portrait);
            let expected = log_spectral_radius(graph.transition.rows());
            assert!((h.value - expected).abs() < 1e-9, "theta = {theta}: {} vs {expected}", h.value);
            assert!(h.lower <= expected + 1e-12 && expected <= h.upper + 1e-12, "theta = {theta}");
            checked += 1;
        }
    }
    assert!(checked >= 50, "only {checked} angles checked");
}

#[test]
fn entropy_is_symmetric_under_conjugation() {
    for q in [5u64, 7, 9, 12, 15, 31] {
        for p in 1..q {
            let a = Angle::new(p, q).unwrap();
            let b = Angle::new(q - p, q).unwrap();
            let ha = thurston_entropy(&quadratic_portrait(a).unwrap()).value;
            let hb = thurston_entropy(&quadratic_portrait(b).unwrap()).value;
            assert!((ha - hb).abs() < 1e-9, "{a} vs {b}");
        }
    }
}

#[test]
fn random_small_matrices() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for _ in 0..300 {
        let n = rng.random_range(1..=5);
        let rows: Vec<Vec<u64>> = (0..n).map(|_| (0..n).map(|_| rng.random_range(0..3)).collect()).collect();
        let h = entropy(&IncidenceMatrix::from_rows(rows.clone()).unwrap());
        let expected = log_spectral_radius(&rows);
        assert!((h.value - expected).abs() < 1e-9, "{rows:?}: {} vs {expected}", h.value);
    }
}

