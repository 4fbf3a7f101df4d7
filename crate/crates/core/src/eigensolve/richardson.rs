use serde::{Deserialize, Serialize};

/// Result of extrapolating a sequence computed at geometrically refined
/// parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub levels: Vec<f64>,
    /// Observed order, when the last three levels converge monotonically.
    pub order: Option<f64>,
    pub value: f64,
    /// `|levels[last] − levels[last − 1]|`.
    pub last_difference: f64,
}

/// Richardson extrapolation from levels computed at parameter ratios
/// `1 : 1/ratio : 1/ratio² …`, using the observed order of the last three.
pub fn richardson(levels: &[f64], ratio: f64) -> Extrapolation {
    let n = levels.len();
    let last = levels.last().copied().unwrap_or(f64::NAN);
    if n < 2 {
        return Extrapolation { levels: levels.to_vec(), order: None, value: last, last_difference: 0.0 };
    }
    let d2 = levels[n - 1] - levels[n - 2];
    let mut out = Extrapolation { levels: levels.to_vec(), order: None, value: last, last_difference: d2.abs() };
    if n < 3 || d2 == 0.0 {
        return out;
    }
    let d1 = levels[n - 2] - levels[n - 3];
    if d1 * d2 > 0.0 && d1.abs() > d2.abs() {
        let p = ((d1 / d2).ln() / ratio.ln()).clamp(0.5, 6.0);
        out.order = Some(p);
        out.value = last + d2 / (ratio.powf(p) - 1.0);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_order_sequence_is_exact() {
        let h = [0.1, 0.05, 0.025];
        let v: Vec<f64> = h.iter().map(|h| 3.0 + 0.7 * h * h).collect();
        let e = richardson(&v, 2.0);
        assert!((e.order.unwrap() - 2.0).abs() < 1e-9);
        assert!((e.value - 3.0).abs() < 1e-12);
        assert!((e.last_difference - 0.7 * (0.0025 - 0.000625)).abs() < 1e-15);
    }

    #[test]
    fn oscillating_sequence_is_not_extrapolated() {
        let e = richardson(&[1.0, 1.1, 1.05], 2.0);
        assert_eq!(e.order, None);
        assert_eq!(e.value, 1.05);
    }
}
