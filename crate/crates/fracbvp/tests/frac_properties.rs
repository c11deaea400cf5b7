//! Property tests for the fractional operators: integer-order consistency
//! and linearity.

use proptest::prelude::*;

use fracbvp::{
    forward_difference, fractional_difference, fractional_sum, GridFunction, ShiftedGrid,
};

fn grid_values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0f64..50.0, 4..12)
}

proptest! {
    #[test]
    fn order_one_sum_is_cumulative(values in grid_values()) {
        let grid = ShiftedGrid::new(0.0, values.len()).unwrap();
        let f = GridFunction::new(grid, values.clone()).unwrap();
        let mut running = 0.0f64;
        for t in 0..values.len() {
            let got = fractional_sum(&f, 1.0, t as f64).unwrap();
            let scale = running.abs().max(1.0);
            prop_assert!((got - running).abs() <= 1e-12 * scale);
            running += values[t];
        }
    }

    #[test]
    fn order_one_difference_matches_forward_difference(values in grid_values()) {
        let grid = ShiftedGrid::new(-0.5, values.len()).unwrap();
        let f = GridFunction::new(grid, values).unwrap();
        let d = forward_difference(&f).unwrap();
        for i in 0..d.grid().count() {
            let t = d.grid().point(i);
            prop_assert_eq!(fractional_difference(&f, 1.0, t).unwrap(), d.value(i));
        }
    }

    #[test]
    fn order_two_difference_is_iterated_first_difference(values in grid_values()) {
        let grid = ShiftedGrid::new(0.0, values.len()).unwrap();
        let f = GridFunction::new(grid, values).unwrap();
        let dd = forward_difference(&forward_difference(&f).unwrap()).unwrap();
        for i in 0..dd.grid().count() {
            prop_assert_eq!(
                fractional_difference(&f, 2.0, i as f64).unwrap(),
                dd.value(i)
            );
        }
    }

    #[test]
    fn fractional_sum_is_linear(
        a in prop::collection::vec(-10.0f64..10.0, 8),
        b in prop::collection::vec(-10.0f64..10.0, 8),
        alpha in -3.0f64..3.0,
        order in 0.1f64..1.9,
    ) {
        let grid = ShiftedGrid::new(-0.25, 8).unwrap();
        let fa = GridFunction::new(grid, a.clone()).unwrap();
        let fb = GridFunction::new(grid, b.clone()).unwrap();
        let combined: Vec<f64> = a.iter().zip(&b).map(|(x, y)| alpha * x + y).collect();
        let fc = GridFunction::new(grid, combined).unwrap();
        for k in 0..5 {
            let t = grid.offset() + order + k as f64;
            let lhs = fractional_sum(&fc, order, t).unwrap();
            let rhs = alpha * fractional_sum(&fa, order, t).unwrap()
                + fractional_sum(&fb, order, t).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
        }
    }
}
