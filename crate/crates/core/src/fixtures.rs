//! Worked examples shipped with the crate as JSON.
//!
//! The same files live under `fixtures/` and can be passed to the CLI.

use crate::hubbard::HubbardForest;
use crate::newton::NewtonDescription;
use crate::portrait::{CriticalMarking, CriticalPortrait};
use crate::scan::ScanSpec;

macro_rules! json_fixture {
    ($name:ident, $ty:ty, $file:literal) => {
        pub fn $name() -> $ty {
            serde_json::from_str(include_str!(concat!("../fixtures/", $file)))
                .expect(concat!("fixture ", $file, " is valid"))
        }
    };
}

json_fixture!(chebyshev_forest, HubbardForest, "forest_chebyshev.json");
json_fixture!(airplane_forest, HubbardForest, "forest_airplane.json");
json_fixture!(basilica_forest, HubbardForest, "forest_basilica.json");
json_fixture!(rabbit_forest, HubbardForest, "forest_rabbit.json");
json_fixture!(cubic_fatou_julia_forest, HubbardForest, "forest_cubic_fatou_julia.json");
json_fixture!(cubic_hyperbolic_forest, HubbardForest, "forest_cubic_hyperbolic.json");
json_fixture!(two_fatou_ends, HubbardForest, "forest_two_fatou_ends.json");
json_fixture!(swapped_chebyshev_pair, HubbardForest, "forest_swapped_chebyshev.json");
json_fixture!(newton_cubic, NewtonDescription, "newton_cubic.json");
json_fixture!(newton_cubic_basilica, NewtonDescription, "newton_cubic_basilica.json");
json_fixture!(newton_ray_into_forest, NewtonDescription, "newton_ray_into_forest.json");

pub fn all_forests() -> Vec<(&'static str, HubbardForest)> {
    vec![
        ("chebyshev", chebyshev_forest()),
        ("airplane", airplane_forest()),
        ("basilica", basilica_forest()),
        ("rabbit", rabbit_forest()),
        ("cubic_fatou_julia", cubic_fatou_julia_forest()),
        ("cubic_hyperbolic", cubic_hyperbolic_forest()),
        ("two_fatou_ends", two_fatou_ends()),
        ("swapped_chebyshev", swapped_chebyshev_pair()),
    ]
}

json_fixture!(chebyshev_portrait, CriticalPortrait, "portrait_chebyshev.json");
json_fixture!(airplane_portrait, CriticalPortrait, "portrait_airplane.json");
json_fixture!(rabbit_portrait, CriticalPortrait, "portrait_rabbit.json");
json_fixture!(basilica_portrait, CriticalPortrait, "portrait_basilica.json");
json_fixture!(z2_plus_i_portrait, CriticalPortrait, "portrait_z2_plus_i.json");
json_fixture!(quintic_portrait, CriticalPortrait, "portrait_quintic.json");
json_fixture!(cubic_marking, CriticalMarking, "marking_cubic.json");
json_fixture!(airplane_scan, ScanSpec, "scan_airplane.json");
json_fixture!(chebyshev_scan, ScanSpec, "scan_chebyshev.json");

/// The four quadratic models bundled both as portrait and as Hubbard tree.
pub fn quadratic_models() -> Vec<(&'static str, CriticalPortrait, HubbardForest)> {
    vec![
        ("chebyshev", chebyshev_portrait(), chebyshev_forest()),
        ("airplane", airplane_portrait(), airplane_forest()),
        ("rabbit", rabbit_portrait(), rabbit_forest()),
        ("basilica", basilica_portrait(), basilica_forest()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_loads() {
        assert_eq!(all_forests().len(), 8);
        assert_eq!(quadratic_models().len(), 4);
        for p in [z2_plus_i_portrait(), quintic_portrait()] {
            assert!(p.degree() >= 2);
        }
        assert_eq!(cubic_marking().roles().len(), 2);
        assert_eq!(airplane_scan().n_end, 12);
        assert_eq!(chebyshev_scan().ratio, 2);
        for spec in [newton_cubic(), newton_cubic_basilica(), newton_ray_into_forest()] {
            assert_eq!(spec.degree, 3);
        }
    }
}
