//! Herbrand transition functions.
//!
//! A [`PLFunction`] is a continuous, strictly increasing, piecewise-linear
//! bijection of `[-1, oo)` that is the identity on `[-1, 0]`. The functions
//! `phi` and `psi` of a (finite or eventually periodic) Galois extension are
//! of this shape, and the three operations here (evaluation, composition,
//! inversion) are all exact.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{minus_one, Rat};

/// One linear piece: the function has slope `slope` from `start` up to the
/// next segment's start (or to infinity for the last segment).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub start: Rat,
    pub slope: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLFunction {
    segments: Vec<Segment>,
    /// Value of the function at each segment start.
    values: Vec<Rat>,
}

impl PLFunction {
    pub fn identity() -> Self {
        PLFunction {
            segments: vec![Segment { start: minus_one(), slope: Rat::one() }],
            values: vec![minus_one()],
        }
    }

    /// Builds a function from `(start, slope)` pairs, validating and
    /// merging adjacent pieces of equal slope.
    pub fn new(pairs: Vec<(Rat, Rat)>) -> Result<Self> {
        let Some((first, _)) = pairs.first() else {
            return Err(Error::InvalidFunction("no segments".into()));
        };
        if *first != minus_one() {
            return Err(Error::InvalidFunction(format!("first segment starts at {first}, not -1")));
        }
        let mut segments: Vec<Segment> = Vec::with_capacity(pairs.len());
        for (start, slope) in pairs {
            if !slope.is_positive() {
                return Err(Error::InvalidFunction(format!("non-positive slope {slope} at {start}")));
            }
            if let Some(last) = segments.last() {
                if start <= last.start {
                    return Err(Error::InvalidFunction(format!(
                        "segment starts not strictly increasing at {start}"
                    )));
                }
                if slope == last.slope {
                    continue;
                }
            }
            segments.push(Segment { start, slope });
        }
        if !segments[0].slope.is_one() {
            return Err(Error::InvalidFunction("slope on [-1, 0] must be 1".into()));
        }
        if let Some(second) = segments.get(1) {
            if second.start.is_negative() {
                return Err(Error::InvalidFunction(format!(
                    "break at {} inside [-1, 0], where the function is the identity",
                    second.start
                )));
            }
        }
        Ok(Self::from_normalized(segments))
    }

    fn from_normalized(segments: Vec<Segment>) -> Self {
        let mut values = Vec::with_capacity(segments.len());
        values.push(minus_one());
        for w in segments.windows(2) {
            let prev = values.last().unwrap().clone();
            values.push(prev + &w[0].slope * (&w[1].start - &w[0].start));
        }
        PLFunction { segments, values }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Segment starts after `-1`, i.e. the points where the slope changes.
    pub fn breakpoints(&self) -> impl Iterator<Item = &Rat> {
        self.segments.iter().skip(1).map(|s| &s.start)
    }

    pub fn is_identity(&self) -> bool {
        self.segments.len() == 1
    }

    fn check_domain(x: &Rat) -> Result<()> {
        if *x < minus_one() {
            return Err(Error::Domain { value: x.clone() });
        }
        Ok(())
    }

    /// Index of the segment governing `[x, x + eps)`.
    fn segment_index(&self, x: &Rat) -> usize {
        self.segments.partition_point(|s| s.start <= *x) - 1
    }

    pub fn eval(&self, x: &Rat) -> Result<Rat> {
        Self::check_domain(x)?;
        let k = self.segment_index(x);
        Ok(&self.values[k] + &self.segments[k].slope * (x - &self.segments[k].start))
    }

    /// Slope immediately to the right of `x`.
    pub fn right_slope(&self, x: &Rat) -> Result<&Rat> {
        Self::check_domain(x)?;
        Ok(&self.segments[self.segment_index(x)].slope)
    }

    /// Exact inverse function: break `b` with slope `s` maps to break `f(b)`
    /// with slope `1/s`.
    pub fn invert(&self) -> PLFunction {
        let segments = self
            .segments
            .iter()
            .zip(&self.values)
            .map(|(s, v)| Segment { start: v.clone(), slope: s.slope.recip() })
            .collect();
        Self::from_normalized(segments)
    }

    /// Evaluates the inverse without materializing it.
    pub fn eval_inverse(&self, y: &Rat) -> Result<Rat> {
        Self::check_domain(y)?;
        let k = self.values.partition_point(|v| v <= y) - 1;
        Ok(&self.segments[k].start + (y - &self.values[k]) / &self.segments[k].slope)
    }

    /// `self ∘ inner`, i.e. `x -> self(inner(x))`.
    pub fn compose(&self, inner: &PLFunction) -> PLFunction {
        let mut starts: Vec<Rat> = inner.segments.iter().map(|s| s.start.clone()).collect();
        for b in self.breakpoints() {
            starts.push(inner.eval_inverse(b).expect("breakpoints lie in the domain"));
        }
        starts.sort();
        starts.dedup();
        let mut segments: Vec<Segment> = Vec::with_capacity(starts.len());
        for x in starts {
            let y = inner.eval(&x).expect("starts lie in the domain");
            let slope = self.right_slope(&y).expect("image lies in the domain") * inner.right_slope(&x).unwrap();
            match segments.last() {
                Some(last) if last.slope == slope => {}
                _ => segments.push(Segment { start: x, slope }),
            }
        }
        Self::from_normalized(segments)
    }

    pub fn to_pairs(&self) -> Vec<(Rat, Rat)> {
        self.segments.iter().map(|s| (s.start.clone(), s.slope.clone())).collect()
    }
}

impl fmt::Display for PLFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (s, v)) in self.segments.iter().zip(&self.values).enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "from {} (value {}) slope {}", s.start, v, s.slope)?;
        }
        Ok(())
    }
}

/// Builds a function from breakpoints and the slopes on the pieces after
/// them; slope `1` is used on `[-1, first break)`.
pub fn from_slopes(breaks_and_slopes: &[(Rat, Rat)]) -> Result<PLFunction> {
    let mut pairs = vec![(minus_one(), Rat::one())];
    for (b, s) in breaks_and_slopes {
        if b.is_zero() || b.is_positive() {
            pairs.push((b.clone(), s.clone()));
        } else {
            return Err(Error::InvalidFunction(format!("break {b} must be >= 0")));
        }
    }
    PLFunction::new(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn sample() -> PLFunction {
        // slopes 1, 1/2, 1/6 with breaks at 0 and 2
        PLFunction::new(vec![(int(-1), int(1)), (int(0), rat(1, 2)), (int(2), rat(1, 6))]).unwrap()
    }

    #[test]
    fn identity_evaluates_to_argument() {
        assert_eq!(PLFunction::identity().eval(&int(5)).unwrap(), int(5));
        assert_eq!(PLFunction::identity().invert(), PLFunction::identity());
    }

    #[test]
    fn eval_and_inverse() {
        let f = sample();
        assert_eq!(f.eval(&int(1)).unwrap(), rat(1, 2));
        assert_eq!(f.eval(&int(2)).unwrap(), int(1));
        assert_eq!(f.eval(&int(8)).unwrap(), int(2));
        assert_eq!(f.invert().eval(&int(1)).unwrap(), int(2));
        assert_eq!(f.eval_inverse(&int(2)).unwrap(), int(8));
        let slopes: Vec<Rat> = f.invert().segments().iter().map(|s| s.slope.clone()).collect();
        assert_eq!(slopes, vec![int(1), int(2), int(6)]);
        assert_eq!(f.invert().invert(), f);
    }

    #[test]
    fn domain_error_below_minus_one() {
        assert!(matches!(sample().eval(&rat(-3, 2)), Err(Error::Domain { .. })));
    }

    #[test]
    fn compose_with_inverse_is_identity() {
        let f = sample();
        assert!(f.compose(&f.invert()).is_identity());
        assert!(f.invert().compose(&f).is_identity());
        assert_eq!(PLFunction::identity().compose(&f), f);
        assert_eq!(f.compose(&PLFunction::identity()), f);
    }

    #[test]
    fn normalization_merges_equal_slopes() {
        let f = PLFunction::new(vec![(int(-1), int(1)), (int(0), int(1)), (int(1), rat(1, 2))]).unwrap();
        assert_eq!(f.segments().len(), 2);
        assert_eq!(f.segments()[1].start, int(1));
    }

    #[test]
    fn rejects_invalid_shapes() {
        assert!(PLFunction::new(vec![]).is_err());
        assert!(PLFunction::new(vec![(int(0), int(1))]).is_err());
        assert!(PLFunction::new(vec![(int(-1), int(2))]).is_err());
        assert!(PLFunction::new(vec![(int(-1), int(1)), (rat(-1, 2), int(2))]).is_err());
        assert!(PLFunction::new(vec![(int(-1), int(1)), (int(1), int(0))]).is_err());
        assert!(PLFunction::new(vec![(int(-1), int(1)), (int(2), int(3)), (int(1), int(2))]).is_err());
    }
}
