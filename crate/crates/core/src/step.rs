//! Integer-valued step functions on `[-1, oo)`.
//!
//! Entry `(b_j, o_j)` means the value is `o_j` on `(b_j, b_{j+1}]`; entry 0
//! always sits at `-1` and also gives the value at `-1` itself. This matches
//! `G_r = G_{ceil(r)}` for groups with integer jumps. A second entry at `-1`
//! is allowed and then covers `(-1, b_2]` (the non-totally-ramified case).

use num_bigint::BigInt;
use num_traits::Zero;

use crate::rational::{minus_one, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StepFunction {
    steps: Vec<(Rat, BigInt)>,
}

/// A maximal interval `(start, end]` on which the step function is constant.
/// `end` is `None` on the final, unbounded piece.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece<'a> {
    pub start: Rat,
    pub end: Option<Rat>,
    pub value: &'a BigInt,
}

impl StepFunction {
    /// Checks the break layout and merges consecutive equal values.
    pub fn new(steps: Vec<(Rat, BigInt)>) -> Result<Self, String> {
        let Some((first, _)) = steps.first() else {
            return Err("empty step list".into());
        };
        if *first != minus_one() {
            return Err(format!("first break is {first}, expected -1"));
        }
        let mut out: Vec<(Rat, BigInt)> = Vec::with_capacity(steps.len());
        for (k, (b, v)) in steps.into_iter().enumerate() {
            if k > 0 {
                let prev = &out.last().unwrap().0;
                let ok = if k == 1 { b >= *prev } else { b > *prev };
                if !ok {
                    return Err(format!("breaks must be strictly increasing (at {b})"));
                }
            }
            if out.last().is_some_and(|(_, last)| *last == v) {
                continue;
            }
            out.push((b, v));
        }
        Ok(StepFunction { steps: out })
    }

    pub fn constant(value: BigInt) -> Self {
        StepFunction { steps: vec![(minus_one(), value)] }
    }

    pub fn steps(&self) -> &[(Rat, BigInt)] {
        &self.steps
    }

    pub fn initial(&self) -> &BigInt {
        &self.steps[0].1
    }

    pub fn last_value(&self) -> &BigInt {
        &self.steps.last().unwrap().1
    }

    /// Last break, after which the function is constant.
    pub fn last_break(&self) -> &Rat {
        &self.steps.last().unwrap().0
    }

    /// Breaks after the initial entry.
    pub fn breaks(&self) -> impl Iterator<Item = &Rat> {
        self.steps.iter().skip(1).map(|(b, _)| b)
    }

    pub fn value_at(&self, x: &Rat) -> &BigInt {
        let k = self.steps.partition_point(|(b, _)| b < x);
        &self.steps[k.saturating_sub(1)].1
    }

    /// Pieces of positive length, in order. The first piece starts at `-1`.
    pub fn pieces(&self) -> Vec<Piece<'_>> {
        let mut out = Vec::with_capacity(self.steps.len());
        for (j, (b, v)) in self.steps.iter().enumerate() {
            let end = self.steps.get(j + 1).map(|(n, _)| n.clone());
            if end.as_ref().is_some_and(|e| e == b) {
                continue;
            }
            out.push(Piece { start: b.clone(), end, value: v });
        }
        out
    }

    /// `∫_{from}^{to} g(value(x)) dx` for `-1 <= from <= to`.
    pub fn integrate<G>(&self, from: &Rat, to: &Rat, g: G) -> Rat
    where
        G: Fn(&BigInt) -> Rat,
    {
        let mut total = Rat::zero();
        for piece in self.pieces() {
            let lo = if piece.start > *from { piece.start.clone() } else { from.clone() };
            let hi = match &piece.end {
                Some(e) if e < to => e.clone(),
                _ => to.clone(),
            };
            if hi > lo {
                total += g(piece.value) * (hi - lo);
            }
        }
        total
    }

    /// Same layout with every value mapped through `f`.
    pub fn map_values<F>(&self, f: F) -> Result<Self, String>
    where
        F: Fn(&BigInt) -> BigInt,
    {
        StepFunction::new(self.steps.iter().map(|(b, v)| (b.clone(), f(v))).collect())
    }

    /// Same values with every break mapped through `f` (which must be increasing).
    pub fn map_breaks<F>(&self, f: F) -> Result<Self, String>
    where
        F: Fn(&Rat) -> Rat,
    {
        StepFunction::new(self.steps.iter().map(|(b, v)| (f(b), v.clone())).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn cyclotomic_lower() -> StepFunction {
        StepFunction::new(vec![(int(-1), 6.into()), (int(0), 3.into()), (int(2), 1.into())]).unwrap()
    }

    #[test]
    fn left_continuous_values() {
        let f = cyclotomic_lower();
        assert_eq!(f.value_at(&int(-1)), &BigInt::from(6));
        assert_eq!(f.value_at(&int(0)), &BigInt::from(6));
        assert_eq!(f.value_at(&rat(1, 2)), &BigInt::from(3));
        assert_eq!(f.value_at(&int(2)), &BigInt::from(3));
        assert_eq!(f.value_at(&int(3)), &BigInt::from(1));
    }

    #[test]
    fn double_entry_at_minus_one() {
        let f = StepFunction::new(vec![(int(-1), 4.into()), (int(-1), 1.into())]).unwrap();
        assert_eq!(f.value_at(&int(-1)), &BigInt::from(4));
        assert_eq!(f.value_at(&rat(-1, 2)), &BigInt::from(1));
        assert_eq!(f.pieces().len(), 1);
    }

    #[test]
    fn integrates_pieces() {
        let f = cyclotomic_lower();
        let area = f.integrate(&int(-1), &int(3), |v| Rat::from_integer(v.clone()));
        assert_eq!(area, int(6 + 6 + 1));
    }

    #[test]
    fn merges_and_validates() {
        let f = StepFunction::new(vec![(int(-1), 2.into()), (int(0), 2.into()), (int(1), 1.into())]).unwrap();
        assert_eq!(f.steps().len(), 2);
        assert!(StepFunction::new(vec![(int(0), 1.into())]).is_err());
        assert!(StepFunction::new(vec![(int(-1), 2.into()), (int(1), 1.into()), (int(1), 1.into())]).is_err());
    }
}
