//! The worked 25 x 25 example matrix, frozen as data, plus determinant
//! agreement sweeps between the elimination, block, and closed-form
//! routes.

use iwasawa_core::orbit::{
    build_matrix, closed_form, det_blocks, det_exact, orbit_partition, verify, OrbitMatrixParams,
};
use num_bigint::BigInt;

const EXAMPLE_5_2_3_1: [&str; 25] = [
    "1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0",
    "0 1 0 0 0 0 1 0 0 0 0 1 0 0 0 0 0 0 0 0 0 0 0 0 0",
    "0 0 1 0 0 0 0 0 0 0 0 0 1 0 0 0 0 0 0 0 0 0 1 0 0",
    "0 0 0 1 0 0 0 0 1 0 0 0 0 0 0 0 0 0 1 0 0 0 0 0 0",
    "0 0 0 0 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 1 0 0 0 0 1",
    "0 0 0 0 0 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0",
    "0 0 0 0 0 0 1 0 0 0 0 1 0 0 0 0 1 0 0 0 0 0 0 0 0",
    "0 0 1 0 0 0 0 1 0 0 0 0 0 0 0 0 0 1 0 0 0 0 0 0 0",
    "0 0 0 0 0 0 0 0 1 0 0 0 0 1 0 0 0 0 0 0 0 0 0 1 0",
    "0 0 0 0 1 0 0 0 0 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 1",
    "0 0 0 0 0 0 0 0 0 0 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0",
    "0 0 0 0 0 0 0 0 0 0 0 1 0 0 0 0 1 0 0 0 0 1 0 0 0",
    "0 0 0 0 0 0 0 1 0 0 0 0 1 0 0 0 0 0 0 0 0 0 1 0 0",
    "0 0 0 1 0 0 0 0 0 0 0 0 0 1 0 0 0 0 1 0 0 0 0 0 0",
    "0 0 0 0 1 0 0 0 0 1 0 0 0 0 1 0 0 0 0 0 0 0 0 0 0",
    "0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 1 0 0 0 0 0 0 0 0 0",
    "0 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 1 0 0 0 0 1 0 0 0",
    "0 0 1 0 0 0 0 0 0 0 0 0 1 0 0 0 0 1 0 0 0 0 0 0 0",
    "0 0 0 0 0 0 0 0 1 0 0 0 0 0 0 0 0 0 1 0 0 0 0 1 0",
    "0 0 0 0 0 0 0 0 0 1 0 0 0 0 1 0 0 0 0 1 0 0 0 0 0",
    "0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 1 0 0 0 0",
    "0 1 0 0 0 0 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 1 0 0 0",
    "0 0 0 0 0 0 0 1 0 0 0 0 0 0 0 0 0 1 0 0 0 0 1 0 0",
    "0 0 0 1 0 0 0 0 0 0 0 0 0 1 0 0 0 0 0 0 0 0 0 1 0",
    "0 0 0 0 0 0 0 0 0 0 0 0 0 0 1 0 0 0 0 1 0 0 0 0 1",
];

#[test]
fn the_worked_25_by_25_matrix_is_reproduced_entry_for_entry() {
    let params = OrbitMatrixParams::new(5, 2, 3, 1).unwrap();
    let built = build_matrix(&params);
    for (i, line) in EXAMPLE_5_2_3_1.iter().enumerate() {
        let row: Vec<u8> = line
            .split_whitespace()
            .map(|c| c.parse::<u8>().unwrap())
            .collect();
        assert_eq!(built.rows()[i], row, "row {}", i + 1);
    }
    // and its determinant by all three routes: 3^((5-1)(2-1)) = 81
    let report = verify(&params).unwrap();
    assert!(report.agree);
    assert_eq!(report.det_exact, BigInt::from(81));
}

#[test]
fn worked_9_by_9_determinant() {
    let params = OrbitMatrixParams::new(3, 2, 2, 1).unwrap();
    let report = verify(&params).unwrap();
    assert!(report.agree);
    assert_eq!(report.det_exact, BigInt::from(4));
    assert_eq!(report.csv_row(), "3,2,2,1,4,4,4,true");
}

#[test]
fn determinant_is_independent_of_u() {
    for (p, n, d) in [(3u64, 2u32, 2u64), (3, 3, 2), (5, 2, 3), (5, 2, 4), (7, 2, 5)] {
        let mut seen = Vec::new();
        for u in 1..=(p + 1) {
            if u % p == 0 {
                continue;
            }
            let m = build_matrix(&OrbitMatrixParams::new(p, n, d, u).unwrap());
            seen.push(det_exact(&m));
        }
        assert!(seen.windows(2).all(|w| w[0] == w[1]), "(p,n,d) = ({p},{n},{d})");
    }
}

#[test]
fn three_routes_agree_across_a_small_grid() {
    for p in [3u64, 5] {
        for n in 1..=2u32 {
            for d in 1..=p + 2 {
                for u in [1u64, 2] {
                    let params = OrbitMatrixParams::new(p, n, d, u).unwrap();
                    let m = build_matrix(&params);
                    let exact = det_exact(&m);
                    assert_eq!(exact, det_blocks(&params).unwrap(), "{params:?}");
                    assert_eq!(exact, closed_form(p, n, d).unwrap(), "{params:?}");
                }
            }
        }
    }
}

#[test]
fn partition_census_identity() {
    // sum over m of (p-1) p^(n-m), plus the fixed point, is p^n
    for (p, n) in [(3u64, 1u32), (3, 4), (5, 3), (7, 2)] {
        let classes = orbit_partition(p, n, 1).unwrap();
        let total: usize = classes.iter().map(|c| c.len()).sum();
        assert_eq!(total as u64, p.pow(n));
        assert_eq!(
            classes.iter().filter(|c| c.len() == 1).count() as u64,
            1 + (p - 1) // the fixed point plus the m = n classes
        );
    }
}
