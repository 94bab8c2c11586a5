use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{big_pow, ceil_to_i64, from_big, int, is_prime, minus_one, Rat};
use crate::step::StepFunction;

/// Eventually periodic upper ramification data of an infinite, totally
/// ramified Galois extension with `p`-adic Lie group `G`.
///
/// `window` stores `n(v) = [G : G^v]` on `[-1, v0 + e]`. Beyond the window
/// the function is determined by `n(v + e) = p^d n(v)` for `v > v0`, which is
/// the index form of `(G^v)^p = G^{v+e}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SenProfile {
    p: u64,
    d: u32,
    e: u64,
    v0: Rat,
    c: Rat,
    window: StepFunction,
}

impl SenProfile {
    pub fn new(p: u64, d: u32, e: u64, v0: Rat, c: Rat, window: Vec<(Rat, BigInt)>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidProfile(m));
        if !is_prime(p) {
            return bad(format!("p = {p} is not prime"));
        }
        if d == 0 || e == 0 {
            return bad("d and e must be positive".into());
        }
        if v0.is_negative() || c.is_negative() {
            return bad("v0 and c must be non-negative".into());
        }
        let window = StepFunction::new(window).map_err(Error::InvalidProfile)?;
        if !window.initial().is_one() {
            return bad(format!("n(-1) = {}, expected 1", window.initial()));
        }
        let right = &v0 + int(e as i64);
        for ((b0, o0), (b, o)) in window.steps().iter().zip(window.steps().iter().skip(1)) {
            if b.is_negative() {
                return bad(format!("index jumps at {b} < 0; the extension must be totally ramified"));
            }
            if *b >= right {
                return bad(format!("break {b} lies outside the window [-1, {right}]"));
            }
            if o < o0 || !o.is_multiple_of(o0) {
                return bad(format!("index {o} after {b} is not a multiple of the previous index {o0} (after {b0})"));
            }
        }
        let profile = SenProfile { p, d, e, v0, c, window };
        let seam = profile.window.value_at(&right);
        let expected = profile.period_factor(1) * profile.base_index();
        if *seam != expected {
            return bad(format!(
                "periodic seam violated: n(v0 + e) = {seam}, but p^d * n(v0) = {expected}"
            ));
        }
        Ok(profile)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn e(&self) -> u64 {
        self.e
    }

    pub fn e_rat(&self) -> Rat {
        int(self.e as i64)
    }

    pub fn v0(&self) -> &Rat {
        &self.v0
    }

    pub fn c(&self) -> &Rat {
        &self.c
    }

    pub fn window(&self) -> &StepFunction {
        &self.window
    }

    pub fn with_c(mut self, c: Rat) -> Result<Self> {
        if c.is_negative() {
            return Err(Error::InvalidProfile("c must be non-negative".into()));
        }
        self.c = c;
        Ok(self)
    }

    /// `p^{d k}`.
    pub fn period_factor(&self, k: u64) -> BigInt {
        big_pow(self.p, self.d as u64 * k)
    }

    /// `n(v0) = [G : G[0]]`.
    pub fn base_index(&self) -> BigInt {
        self.window.value_at(&self.v0).clone()
    }

    /// `[G : G[i]] = p^{d i} n(v0)`.
    pub fn bracket_index(&self, i: u64) -> BigInt {
        self.period_factor(i) * self.base_index()
    }

    /// `v0 + k e`, where the bracket group `G[k]` starts.
    pub fn bracket_point(&self, k: u64) -> Rat {
        &self.v0 + int((k * self.e) as i64)
    }

    /// `[G : G^v]`, extending the window periodically.
    pub fn index_at(&self, v: &Rat) -> Result<BigInt> {
        if *v < minus_one() {
            return Err(Error::Domain { value: v.clone() });
        }
        let right = self.bracket_point(1);
        if *v <= right {
            return Ok(self.window.value_at(v).clone());
        }
        let j = ceil_to_i64(&((v - &self.v0) / self.e_rat())) - 1;
        let shifted = v - int(j * self.e as i64);
        Ok(self.period_factor(j as u64) * self.window.value_at(&shifted))
    }

    /// One period of `n` on `(v0, v0 + e]` as `(offset from v0, value)` pairs.
    fn period_pattern(&self) -> Vec<(Rat, BigInt)> {
        let just_after = self.window.steps().partition_point(|(b, _)| *b <= self.v0);
        let mut pattern = vec![(Rat::zero(), self.window.steps()[just_after - 1].1.clone())];
        for (b, o) in &self.window.steps()[just_after..] {
            pattern.push((b - &self.v0, o.clone()));
        }
        pattern
    }

    /// `n` as an explicit step function that agrees with it on `[-1, limit]`
    /// and stays constant after `limit`.
    pub fn index_function(&self, limit: &Rat) -> StepFunction {
        let mut steps: Vec<(Rat, BigInt)> = self
            .window
            .steps()
            .iter()
            .filter(|(b, _)| *b < self.v0 && b < limit)
            .cloned()
            .collect();
        let pattern = self.period_pattern();
        let mut t = 0u64;
        'outer: loop {
            let base = self.bracket_point(t);
            if base >= *limit && t > 0 {
                break;
            }
            let factor = self.period_factor(t);
            for (off, o) in &pattern {
                let b = &base + off;
                if b >= *limit {
                    break 'outer;
                }
                steps.push((b, &factor * o));
            }
            t += 1;
        }
        if steps.is_empty() {
            steps.push((minus_one(), BigInt::one()));
        }
        StepFunction::new(steps).expect("materialized breaks are increasing")
    }

    /// `∫_{from}^{to} n(v) dv`.
    pub fn integrate_index(&self, from: &Rat, to: &Rat) -> Rat {
        self.index_function(to).integrate(from, to, from_big)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    pub(crate) fn cyclotomic(p: u64) -> SenProfile {
        let pm1 = BigInt::from(p - 1);
        SenProfile::new(
            p,
            1,
            1,
            int(1),
            int(1),
            vec![(int(-1), BigInt::one()), (int(0), pm1.clone()), (int(1), pm1 * p)],
        )
        .unwrap()
    }

    #[test]
    fn periodic_extension_of_cyclotomic() {
        let prof = cyclotomic(3);
        assert_eq!(prof.index_at(&int(-1)).unwrap(), BigInt::one());
        assert_eq!(prof.index_at(&rat(5, 2)).unwrap(), BigInt::from(18));
        assert_eq!(prof.index_at(&int(3)).unwrap(), BigInt::from(18));
        assert_eq!(prof.index_at(&rat(7, 2)).unwrap(), BigInt::from(54));
        for k in 0..6u64 {
            assert_eq!(
                prof.index_at(&prof.bracket_point(k)).unwrap(),
                prof.period_factor(k) * prof.base_index()
            );
        }
        assert!(matches!(prof.index_at(&int(-2)), Err(Error::Domain { .. })));
    }

    #[test]
    fn materialized_function_matches_pointwise() {
        let prof = SenProfile::new(
            2,
            2,
            2,
            rat(1, 2),
            int(3),
            vec![(int(-1), 1.into()), (int(0), 3.into()), (rat(1, 2), 6.into()), (int(1), 12.into())],
        )
        .unwrap();
        let limit = int(9);
        let f = prof.index_function(&limit);
        let mut x = int(-1);
        while x <= limit {
            assert_eq!(f.value_at(&x), &prof.index_at(&x).unwrap(), "at {x}");
            x += rat(1, 8);
        }
    }

    #[test]
    fn rejects_broken_seam() {
        let r = SenProfile::new(3, 1, 1, int(1), int(1), vec![(int(-1), 1.into()), (int(0), 2.into()), (int(1), 4.into())]);
        assert!(matches!(r, Err(Error::InvalidProfile(m)) if m.contains("seam")));
        let r = SenProfile::new(4, 1, 1, int(1), int(1), vec![(int(-1), 1.into())]);
        assert!(r.is_err());
        let r = SenProfile::new(3, 1, 1, int(1), int(1), vec![(int(-1), 1.into()), (int(0), 2.into()), (int(2), 6.into())]);
        assert!(r.is_err());
    }
}
