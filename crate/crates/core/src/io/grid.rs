//! `MIN:MAX:POINTS` ranges and comma-separated value lists.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on grid sizes accepted from text.
pub const MAX_GRID_POINTS: usize = 1_000_000;

/// Evenly spaced grid from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRange {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl GridRange {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(Error::invalid(format!("range bounds must be finite, got {min}:{max}")));
        }
        if min >= max {
            return Err(Error::invalid(format!("range needs min < max, got {min}:{max}")));
        }
        if !(2..=MAX_GRID_POINTS).contains(&points) {
            return Err(Error::invalid(format!("range needs 2..={MAX_GRID_POINTS} points, got {points}")));
        }
        Ok(GridRange { min, max, points })
    }

    pub fn values(&self) -> Vec<f64> {
        let last = self.points - 1;
        // weighted form stays finite even when max - min overflows
        (0..self.points)
            .map(|i| {
                let t = i as f64 / last as f64;
                if i == last { self.max } else { self.min * (1.0 - t) + self.max * t }
            })
            .collect()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        GridRange::new(self.min * factor, self.max * factor, self.points)
    }
}

/// Parses `MIN:MAX:POINTS`, e.g. `0:1.1:23`.
pub fn parse_range(text: &str) -> Result<GridRange> {
    let parts: Vec<&str> = text.trim().split(':').collect();
    let [min, max, points] = parts.as_slice() else {
        return Err(Error::invalid(format!("range must look like MIN:MAX:POINTS, got {text:?}")));
    };
    let num = |s: &str| {
        s.trim().parse::<f64>().map_err(|_| Error::invalid(format!("not a number in range: {s:?}")))
    };
    let points = points
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::invalid(format!("point count must be a non-negative integer, got {points:?}")))?;
    GridRange::new(num(min)?, num(max)?, points)
}

/// Parses a comma-separated list of finite numbers, e.g. `0.05,0.4`.
pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    let values = text
        .split(',')
        .map(|s| {
            let v = s.trim().parse::<f64>().map_err(|_| Error::invalid(format!("not a number: {s:?}")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::invalid(format!("value must be finite, got {s:?}")))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_ranges() {
        let r = parse_range("0:1.1:23").unwrap();
        assert_eq!(r, GridRange { min: 0.0, max: 1.1, points: 23 });
        let v = r.values();
        assert_eq!(v.len(), 23);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[22], 1.1);
        assert!((v[11] - 0.55).abs() < 1e-15);

        assert_eq!(parse_range(" 0 : 1 : 21 ").unwrap().values()[20], 1.0);
    }

    #[test]
    fn extreme_bounds_stay_finite() {
        let v = parse_range("-1e308:1e308:3").unwrap().values();
        assert_eq!(v, vec![-1e308, 0.0, 1e308]);
    }

    #[test]
    fn rejects_bad_ranges() {
        for bad in ["", "0:1", "0:1:2:3", "1:0:5", "0:0:5", "0:1:1", "0:1:-3", "a:1:3", "0:inf:3", "0:1:2.5", "nan:1:3"] {
            assert!(parse_range(bad).is_err(), "{bad:?} accepted");
        }
    }

    #[test]
    fn parses_lists() {
        assert_eq!(parse_list("0.05,0.4").unwrap(), vec![0.05, 0.4]);
        assert_eq!(parse_list(" 0.1 ").unwrap(), vec![0.1]);
        assert!(parse_list("").is_err());
        assert!(parse_list("0.1,,0.2").is_err());
        assert!(parse_list("0.1,NaN").is_err());
    }

    proptest! {
        #[test]
        fn grids_are_ascending_and_hit_both_ends(min in -1e3..1e3f64, span in 1e-6..1e3f64, points in 2usize..500) {
            let r = GridRange::new(min, min + span, points).unwrap();
            let v = r.values();
            prop_assert_eq!(v.len(), points);
            prop_assert_eq!(v[0], r.min);
            prop_assert_eq!(*v.last().unwrap(), r.max);
            prop_assert!(v.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn range_parser_never_panics(s in "\\PC*") {
            let _ = parse_range(&s);
            let _ = parse_list(&s);
        }
    }
}
