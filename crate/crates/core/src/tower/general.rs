use num_bigint::BigInt;
use num_integer::Integer;

use super::bracket::BracketTower;
use super::fit::StabilityFit;
use super::profile::SenProfile;
use crate::error::{Error, Result};
use crate::filtration::{chain_subgroup, different_integral, to_lower, UpperFiltration};
use crate::rational::{as_integer, big_pow, ceil_to_i64, floor_to_i64, from_big, int, minus_one, valuation, Rat};
use crate::step::StepFunction;

/// A general Lie tower `K(i)` over a Sen profile, described through its
/// quotient index functions `q_i(u) = [G : G^u G(i)]`.
///
/// Only the base level `i0` is explicit. Higher levels follow the shift law:
/// `q_i = n` up to the splice point `v0 + k_i e` and
/// `q_i(u) = p^{d(i-i0)} q_{i0}(u - (i-i0) e)` after it, with
/// `k_i = k_{i0} + (i - i0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralTower {
    profile: SenProfile,
    i0: u64,
    k0: u64,
    base: StepFunction,
    bracket: BracketTower,
    closed_form: StabilityFit,
}

/// Both computations of `v_{K(i)}(D_{K(i)/K})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralDifferent {
    pub level: u64,
    pub degree: BigInt,
    /// `∫ ([G:G(i)] - q_i(u)) du`.
    pub direct: Rat,
    /// `v(D_{K(i)/K[k_i]}) + [K(i):K[k_i]] v(D_{K[k_i]/K})`.
    pub via_bracket: Rat,
    pub value: BigInt,
}

/// Probe points that hit every piece of the common refinement of `fs`.
fn probes(fs: &[&StepFunction]) -> Vec<Rat> {
    let mut pts: Vec<Rat> = vec![minus_one()];
    for f in fs {
        pts.extend(f.breaks().cloned());
    }
    pts.sort();
    pts.dedup();
    let mut out = pts.clone();
    for w in pts.windows(2) {
        out.push((&w[0] + &w[1]) / int(2));
    }
    out.push(pts.last().unwrap() + int(1));
    out.sort();
    out
}

impl GeneralTower {
    pub fn new(profile: SenProfile, i0: u64, k0: u64, base_quotient: Vec<(Rat, BigInt)>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidTower(m));
        let base = StepFunction::new(base_quotient).map_err(Error::InvalidTower)?;
        let bracket = BracketTower::new(profile.clone());
        let closed_form = bracket.closed_form();
        let tower = GeneralTower { profile, i0, k0, base, bracket, closed_form };
        let prof = &tower.profile;
        let splice = prof.bracket_point(k0);
        let top = tower.base.last_value().clone();

        for w in tower.base.steps().windows(2) {
            if w[1].1 < w[0].1 || !w[1].1.is_multiple_of(&w[0].1) {
                return bad(format!("base quotient index {} after {} is not a multiple of {}", w[1].1, w[1].0, w[0].1));
            }
        }

        // q_{i0} = n on [-1, v0 + k e]
        let n_to_splice = prof.index_function(&splice);
        let lhs: Vec<_> = n_to_splice.steps().iter().filter(|(b, _)| *b < splice).collect();
        let rhs: Vec<_> = tower.base.steps().iter().filter(|(b, _)| *b < splice).collect();
        if lhs != rhs {
            let at = probes(&[&n_to_splice, &tower.base])
                .into_iter()
                .find(|x| *x <= splice && n_to_splice.value_at(x) != tower.base.value_at(x))
                .unwrap_or_else(|| splice.clone());
            return bad(format!(
                "seam violation: base quotient differs from n below the splice point v0 + k e = {splice} (first at u = {at})"
            ));
        }

        // q <= n and q saturates at [G:G(i0)]
        let end = tower.base.last_break().clone().max(splice.clone());
        let n_far = prof.index_function(&(&end + int(1)));
        for x in probes(&[&n_far, &tower.base]) {
            if x > end {
                break;
            }
            if tower.base.value_at(&x) > n_far.value_at(&x) {
                return bad(format!("q(u) exceeds [G:G^u] at u = {x}"));
            }
        }

        let n_k = prof.bracket_index(k0);
        if !top.is_multiple_of(&n_k) {
            return bad(format!("[G:G(i0)] = {top} is not a multiple of [G:G[k]] = {n_k}"));
        }
        if valuation(&top, prof.p()) < prof.d() * i0 as u32 {
            return bad(format!("[G:G(i0)] = {top} is not divisible by p^(d i0); [K(0):K] would not be an integer"));
        }

        // Sen sandwich G^{i0 e + c} <= G(i0) <= G^{i0 e - c}, in index form
        let e = prof.e_rat();
        let centre = int(i0 as i64) * &e;
        let lo = &centre - prof.c();
        let hi = &centre + prof.c();
        if splice < lo || splice > hi {
            return bad(format!("splice point {splice} is outside the sandwich window [{lo}, {hi}]"));
        }
        // left-continuous: a jump at u leaves G^u nontrivial, so it must be < hi
        if *tower.base.last_break() >= hi {
            return bad(format!(
                "q saturates only after its jump at u = {}, not before i0 e + c = {hi}",
                tower.base.last_break()
            ));
        }

        // index form of G(ceil((v+c)/e)) <= G^v <= G(floor((v-c)/e)) at levels below i0
        for j in 0..i0 {
            let m_j = tower.degree(j);
            let je = int(j as i64) * &e;
            let upper_point = &je + prof.c();
            if prof.index_at(&upper_point)? < m_j {
                return bad(format!("sandwich violated: [G:G^{upper_point}] < [G:G({j})] = {m_j}"));
            }
            let lower_point = &je - prof.c();
            if lower_point >= minus_one() && prof.index_at(&lower_point)? > m_j {
                return bad(format!("sandwich violated: [G:G^{lower_point}] > [G:G({j})] = {m_j}"));
            }
        }
        Ok(tower)
    }

    pub fn profile(&self) -> &SenProfile {
        &self.profile
    }

    pub fn i0(&self) -> u64 {
        self.i0
    }

    pub fn k0(&self) -> u64 {
        self.k0
    }

    pub fn base_quotient(&self) -> &StepFunction {
        &self.base
    }

    /// `k_i = k_{i0} + (i - i0)`.
    pub fn bracket_level(&self, i: u64) -> u64 {
        self.k0 + i - self.i0
    }

    /// `[K(i):K] = p^{d i} [K(0):K]`; valid for every `i >= 0`.
    pub fn degree(&self, i: u64) -> BigInt {
        let top = self.base.last_value();
        let p_i0 = big_pow(self.profile.p(), self.profile.d() as u64 * self.i0);
        top / p_i0 * self.profile.period_factor(i)
    }

    fn check_level(&self, i: u64) -> Result<()> {
        if i < self.i0 {
            return Err(Error::InvalidParameters(format!("level {i} is below the base level {}", self.i0)));
        }
        Ok(())
    }

    /// `q_i` as an explicit step function.
    pub fn quotient_index(&self, i: u64) -> Result<StepFunction> {
        self.check_level(i)?;
        let prof = &self.profile;
        let shift = i - self.i0;
        let splice_i = prof.bracket_point(self.bracket_level(i));
        let splice_0 = prof.bracket_point(self.k0);
        let offset = int((shift * prof.e()) as i64);
        let factor = prof.period_factor(shift);
        let mut steps: Vec<(Rat, BigInt)> =
            prof.index_function(&splice_i).steps().iter().filter(|(b, _)| *b < splice_i).cloned().collect();
        for (b, q) in self.base.steps() {
            if *b >= splice_0 {
                steps.push((b + &offset, &factor * q));
            }
        }
        StepFunction::new(steps).map_err(Error::InvalidTower)
    }

    /// Upper filtration of the finite group `Gal(K(i)/K)`.
    pub fn upper_filtration(&self, i: u64) -> Result<UpperFiltration> {
        let top = self.degree(i);
        let orders = self.quotient_index(i)?.map_values(|q| &top / q).map_err(Error::InvalidTower)?;
        UpperFiltration::from_steps(orders)
    }

    /// Splits `v_{K(i)}(D_{K(i)/K})` through `K[k_i]` and also integrates it
    /// directly; the two must agree and be integral.
    pub fn different(&self, i: u64) -> Result<GeneralDifferent> {
        let q = self.quotient_index(i)?;
        let degree = self.degree(i);
        let top = from_big(&degree);
        let end = q.last_break().clone();
        let direct = q.integrate(&minus_one(), &end, |v| &top - from_big(v));

        let k = self.bracket_level(i);
        let sub_order = &degree / self.profile.bracket_index(k);
        let gamma_lower = to_lower(&self.upper_filtration(i)?);
        let h_lower = chain_subgroup(&gamma_lower, &sub_order)?;
        let top_part = different_integral(&h_lower);
        let bottom_part = self.closed_form.evaluate(k as i64, self.profile.p(), self.profile.d());
        let via_bracket = top_part + from_big(&sub_order) * bottom_part;

        if direct != via_bracket {
            return Err(Error::Inconsistency(format!(
                "level {i}: direct integral {direct} but transitivity through K[{k}] gives {via_bracket}"
            )));
        }
        let value = as_integer(&direct)
            .ok_or_else(|| Error::Inconsistency(format!("different at level {i} is not integral: {direct}")))?;
        Ok(GeneralDifferent { level: i, degree, direct, via_bracket, value })
    }

    pub fn general_different(&self, i: u64) -> Result<BigInt> {
        self.different(i).map(|r| r.value)
    }

    /// Checks the sandwich `G^{ie+c} <= G(i) <= G^{ie-c}` on `q_i`:
    /// `q_i = n` up to `ie - c` and `q_i` is saturated from `ie + c`.
    pub fn sandwich_holds(&self, i: u64) -> Result<bool> {
        let q = self.quotient_index(i)?;
        let prof = &self.profile;
        let centre = int(i as i64) * prof.e_rat();
        let lo = &centre - prof.c();
        let hi = &centre + prof.c();
        let top = self.degree(i);
        let n = prof.index_function(&(&hi + int(1)));
        let ok_low = probes(&[&q, &n]).iter().filter(|x| **x <= lo).all(|x| q.value_at(x) == n.value_at(x));
        Ok(ok_low && *q.value_at(&hi) == top && (*q.last_break() <= hi || q.last_value() == &top))
    }

    /// Index inequalities `[G:G(ceil((v+c)/e))] >= [G:G^v] >= [G:G(floor((v-c)/e))]`.
    pub fn estimate_holds(&self, v: &Rat) -> Result<bool> {
        let prof = &self.profile;
        let e = prof.e_rat();
        let n = prof.index_at(v)?;
        let upper_level = ceil_to_i64(&((v + prof.c()) / &e));
        let lower_level = floor_to_i64(&((v - prof.c()) / &e));
        let left = upper_level < 0 || self.degree(upper_level as u64) >= n;
        let right = lower_level < 0 || n >= self.degree(lower_level as u64);
        Ok(left && right)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::tower::fit::fit_stability;
    use num_traits::One;

    fn cyclotomic(p: u64) -> SenProfile {
        let pm1 = BigInt::from(p - 1);
        SenProfile::new(p, 1, 1, int(1), int(1), vec![(int(-1), BigInt::one()), (int(0), pm1.clone()), (int(1), pm1 * p)])
            .unwrap()
    }

    fn extra_break() -> GeneralTower {
        let base = vec![(int(-1), 1.into()), (int(0), 2.into()), (int(1), 6.into()), (rat(9, 4), 18.into())];
        GeneralTower::new(cyclotomic(3), 2, 1, base).unwrap()
    }

    #[test]
    fn base_level_is_the_input_integral() {
        let t = extra_break();
        // 17 + 16 + 12 * 5/4
        assert_eq!(t.general_different(2).unwrap(), BigInt::from(48));
        assert_eq!(t.general_different(3).unwrap(), BigInt::from(198));
        assert_eq!(t.degree(3), BigInt::from(54));
    }

    #[test]
    fn extra_break_is_stable() {
        let t = extra_break();
        let values: Vec<(i64, BigInt)> = (2..=10).map(|i| (i as i64, t.general_different(i).unwrap())).collect();
        let fit = fit_stability(&values[..3], 3, 1).unwrap();
        for (i, v) in &values {
            assert_eq!(fit.evaluate(*i, 3, 1), from_big(v), "level {i}");
        }
        // [K(0):K] = 18 / 9
        assert_eq!(fit.c, int(2));
    }

    #[test]
    fn bracket_tower_as_general_tower() {
        let prof = cyclotomic(3);
        let base = prof.index_function(&prof.bracket_point(1)).steps().to_vec();
        let t = GeneralTower::new(prof.clone(), 1, 1, base).unwrap();
        let b = BracketTower::new(prof);
        for i in 1..7 {
            assert_eq!(t.general_different(i).unwrap(), b.different_direct(t.bracket_level(i)).unwrap());
            assert!(t.sandwich_holds(i).unwrap());
        }
    }

    #[test]
    fn seam_violation_is_rejected() {
        let base = vec![(int(-1), 1.into()), (int(0), 2.into()), (rat(3, 2), 6.into()), (rat(9, 4), 18.into())];
        match GeneralTower::new(cyclotomic(3), 2, 1, base) {
            Err(Error::InvalidTower(m)) => assert!(m.contains("seam"), "{m}"),
            other => panic!("expected seam violation, got {other:?}"),
        }
    }

    #[test]
    fn late_saturation_is_rejected() {
        let base = vec![(int(-1), 1.into()), (int(0), 2.into()), (int(1), 6.into()), (int(4), 18.into())];
        assert!(GeneralTower::new(cyclotomic(3), 2, 1, base).is_err());
    }

    #[test]
    fn jump_at_the_window_edge_is_rejected() {
        let base = vec![(int(-1), 1.into()), (int(0), 2.into()), (int(1), 6.into()), (int(3), 18.into())];
        assert!(GeneralTower::new(cyclotomic(3), 2, 1, base).is_err());
    }

    #[test]
    fn levels_below_base_are_refused() {
        assert!(matches!(extra_break().general_different(1), Err(Error::InvalidParameters(_))));
    }
}
