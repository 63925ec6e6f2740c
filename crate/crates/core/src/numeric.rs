//! Length of the closed geodesic loop through the link of the weak-order orthoscheme complex of `S_4`.

use serde::{Deserialize, Serialize};

use std::f64::consts::TAU;

/// A previously quoted value of the ratio, kept for comparison.
pub const QUOTED_RATIO: f64 = 0.987;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopLength {
    /// `2 acos(sqrt(14/25)) + 4 acos(sqrt(13/35))`, in radians.
    pub value: f64,
    pub ratio_to_2pi: f64,
    pub less_than_2pi: bool,
}

pub fn loop_length() -> LoopLength {
    let value = 2.0 * (14.0f64 / 25.0).sqrt().acos() + 4.0 * (13.0f64 / 35.0).sqrt().acos();
    LoopLength { value, ratio_to_2pi: value / TAU, less_than_2pi: value < TAU }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_and_ratio() {
        let l = loop_length();
        assert!(l.less_than_2pi);
        assert!((l.value - 5.1114).abs() < 1e-3, "{}", l.value);
        assert!((0.81..=0.82).contains(&l.ratio_to_2pi));
        assert!((l.ratio_to_2pi - QUOTED_RATIO).abs() > 0.1);
    }
}
