use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{big_pow, from_big, int, Rat};

/// `v(i) = C i p^{di} + A p^{di} + B`, exact from level `i_min` on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityFit {
    pub c: Rat,
    pub a: Rat,
    pub b: Rat,
    pub i_min: i64,
}

impl StabilityFit {
    pub fn evaluate(&self, i: i64, p: u64, d: u32) -> Rat {
        let x = power(p, d, i);
        &self.c * int(i) * &x + &self.a * &x + &self.b
    }

    /// Compares the leading coefficient with the two candidate readings
    /// `e [K(0):K]` (absolute ramification index of `K(0)`) and `[K(0):K]`.
    pub fn leading_check(&self, e: u64, base_degree: &BigInt) -> LeadingCheck {
        let relative = from_big(base_degree);
        let absolute = int(e as i64) * &relative;
        LeadingCheck {
            matches_absolute: self.c == absolute,
            matches_relative: self.c == relative,
            absolute,
            relative,
        }
    }
}

impl fmt::Display for StabilityFit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C = {}, A = {}, B = {}, i_min = {}", self.c, self.a, self.b, self.i_min)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeadingCheck {
    pub absolute: Rat,
    pub relative: Rat,
    pub matches_absolute: bool,
    pub matches_relative: bool,
}

/// `p^{d i}` as a rational (negative `i` allowed).
fn power(p: u64, d: u32, i: i64) -> Rat {
    let x = from_big(&big_pow(p, d as u64 * i.unsigned_abs()));
    if i < 0 {
        x.recip()
    } else {
        x
    }
}

/// Solves `m x = rhs` exactly. `None` if singular.
fn solve3(mut m: [[Rat; 3]; 3], mut rhs: [Rat; 3]) -> Option<[Rat; 3]> {
    for col in 0..3 {
        let pivot = (col..3).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for r in 0..3 {
            if r != col && !m[r][col].is_zero() {
                let f = &m[r][col] / &m[col][col];
                for k in 0..3 {
                    let t = &f * &m[col][k];
                    m[r][k] -= t;
                }
                let t = &f * &rhs[col];
                rhs[r] -= t;
            }
        }
    }
    Some([&rhs[0] / &m[0][0], &rhs[1] / &m[1][1], &rhs[2] / &m[2][2]])
}

fn fit_window(points: &[(i64, BigInt)], p: u64, d: u32) -> Result<StabilityFit> {
    let row = |i: i64| {
        let x = power(p, d, i);
        [int(i) * &x, x, Rat::one()]
    };
    let m = [row(points[0].0), row(points[1].0), row(points[2].0)];
    let rhs = [from_big(&points[0].1), from_big(&points[1].1), from_big(&points[2].1)];
    let [c, a, b] = solve3(m, rhs)
        .ok_or_else(|| Error::InvalidParameters("singular stability system".into()))?;
    Ok(StabilityFit { c, a, b, i_min: points[0].0 })
}

/// Fits `C i p^{di} + A p^{di} + B` to consecutive levels.
///
/// Windows of three consecutive points are tried from the left; the first
/// whose fit reproduces every later point is returned, with `i_min` its
/// first level. With four or more points the accepted fit must be confirmed
/// by at least one point outside its window.
pub fn fit_stability(values: &[(i64, BigInt)], p: u64, d: u32) -> Result<StabilityFit> {
    if values.len() < 3 {
        return Err(Error::InvalidParameters("at least three levels are needed".into()));
    }
    if values.windows(2).any(|w| w[1].0 != w[0].0 + 1) {
        return Err(Error::InvalidParameters("levels must be consecutive and increasing".into()));
    }
    let last_start = if values.len() == 3 { 0 } else { values.len() - 4 };
    for s in 0..=last_start {
        let fit = fit_window(&values[s..], p, d)?;
        if values[s + 3..].iter().all(|(i, v)| fit.evaluate(*i, p, d) == from_big(v)) {
            return Ok(fit);
        }
    }
    let first = fit_window(values, p, d)?;
    let residuals: Vec<(i64, Rat)> =
        values.iter().map(|(i, v)| (*i, from_big(v) - first.evaluate(*i, p, d))).collect();
    let offending = residuals.iter().find(|(_, r)| !r.is_zero()).map(|(i, _)| *i).unwrap_or(values[0].0);
    Err(Error::NotStable { residuals, offending })
}

/// Shifts the index origin by `k` levels:
/// `(C, A, B) -> (C / p^{dk}, (A - C k) / p^{dk}, B)`.
pub fn reindex_constants(fit: &StabilityFit, k: i64, p: u64, d: u32) -> StabilityFit {
    let scale = power(p, d, k);
    StabilityFit {
        c: &fit.c / &scale,
        a: (&fit.a - &fit.c * int(k)) / &scale,
        b: fit.b.clone(),
        i_min: fit.i_min + k,
    }
}

/// `v_p(d_{K(i)/K}) = f_i v_{p_i}(D_{K(i)/K})` with
/// `f_i = e_k f_k p^{d (i - k)} / e_i`.
pub fn disc_from_different(
    different: &BigInt,
    e_k: &BigInt,
    f_k: &BigInt,
    p: u64,
    d: u32,
    levels_above_k: u64,
    e_i: &BigInt,
) -> Result<BigInt> {
    if e_i.is_zero() {
        return Err(Error::InvalidRamificationData("e_i must be positive".into()));
    }
    let numerator = e_k * f_k * big_pow(p, d as u64 * levels_above_k);
    let (f_i, r) = numerator.div_rem(e_i);
    if !r.is_zero() {
        return Err(Error::InvalidRamificationData(format!(
            "residue degree {numerator}/{e_i} is not an integer"
        )));
    }
    Ok(f_i * different)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn pts(v: &[(i64, i64)]) -> Vec<(i64, BigInt)> {
        v.iter().map(|&(i, x)| (i, BigInt::from(x))).collect()
    }

    #[test]
    fn cyclotomic_fit() {
        let fit = fit_stability(&pts(&[(1, 9), (2, 45), (3, 189)]), 3, 1).unwrap();
        assert_eq!(fit, StabilityFit { c: int(2), a: int(1), b: int(0), i_min: 1 });
        assert!(fit.leading_check(1, &BigInt::from(2)).matches_absolute);
    }

    #[test]
    fn zero_sequence() {
        let fit = fit_stability(&pts(&[(0, 0), (1, 0), (2, 0), (3, 0)]), 5, 2).unwrap();
        assert_eq!((fit.c, fit.a, fit.b, fit.i_min), (int(0), int(0), int(0), 0));
    }

    #[test]
    fn corrupted_value_is_reported() {
        // (2i+1) 3^i for i = 1..6 with level 4 corrupted
        let mut v = pts(&[(1, 9), (2, 45), (3, 189), (4, 729), (5, 2673), (6, 9477)]);
        v[3].1 += 1;
        match fit_stability(&v, 3, 1) {
            Err(Error::NotStable { offending, residuals }) => {
                assert_eq!(offending, 4);
                assert_eq!(residuals.iter().filter(|(_, r)| !r.is_zero()).count(), 1);
            }
            other => panic!("expected NotStable, got {other:?}"),
        }
    }

    #[test]
    fn late_stabilization() {
        // garbage at level 0, then (2i+1) 3^i
        let v = pts(&[(0, 7), (1, 9), (2, 45), (3, 189), (4, 729)]);
        let fit = fit_stability(&v, 3, 1).unwrap();
        assert_eq!(fit.i_min, 1);
    }

    #[test]
    fn reindex() {
        let fit = StabilityFit { c: int(2), a: int(1), b: int(0), i_min: 1 };
        assert_eq!(reindex_constants(&fit, 0, 3, 1), fit);
        let shifted = reindex_constants(&fit, 1, 3, 1);
        assert_eq!((shifted.c.clone(), shifted.a.clone(), shifted.b.clone()), (rat(2, 3), rat(-1, 3), int(0)));
        for i in 1..6 {
            assert_eq!(shifted.evaluate(i + 1, 3, 1), fit.evaluate(i, 3, 1));
        }
        let flat = StabilityFit { c: int(0), a: int(5), b: int(2), i_min: 0 };
        let r = reindex_constants(&flat, 2, 2, 3);
        assert_eq!((r.c, r.a, r.b), (int(0), rat(5, 64), int(2)));
    }

    #[test]
    fn discriminant_reduction() {
        let one = BigInt::one();
        let d = BigInt::from(45);
        assert_eq!(disc_from_different(&d, &BigInt::from(2), &one, 3, 1, 2, &BigInt::from(18)).unwrap(), d);
        assert_eq!(
            disc_from_different(&d, &one, &BigInt::from(2), 3, 1, 3, &BigInt::from(27)).unwrap(),
            BigInt::from(90)
        );
        assert!(matches!(
            disc_from_different(&d, &one, &one, 3, 1, 1, &BigInt::from(9)),
            Err(Error::InvalidRamificationData(_))
        ));
    }
}
