use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::fit::StabilityFit;
use super::profile::SenProfile;
use crate::error::{Error, Result};
use crate::filtration::UpperFiltration;
use crate::rational::{as_integer, from_big, int, minus_one, Rat};
use crate::step::StepFunction;

/// The tower `K[i]` cut out by `G[i] = G^{v0 + i e}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketTower {
    profile: SenProfile,
}

impl BracketTower {
    pub fn new(profile: SenProfile) -> Self {
        BracketTower { profile }
    }

    pub fn profile(&self) -> &SenProfile {
        &self.profile
    }

    /// `[K[i] : K] = [G : G[i]]`.
    pub fn degree(&self, i: u64) -> BigInt {
        self.profile.bracket_index(i)
    }

    /// `u -> [G/G[i] : (G/G[i])^u] = min(n(u), [G : G[i]])`.
    pub fn quotient_index(&self, i: u64) -> StepFunction {
        self.profile.index_function(&self.profile.bracket_point(i))
    }

    /// Upper filtration of the finite group `Gal(K[i]/K)`.
    pub fn upper_filtration(&self, i: u64) -> UpperFiltration {
        let top = self.degree(i);
        let orders = self.quotient_index(i).map_values(|q| &top / q).expect("quotients keep the layout");
        UpperFiltration::from_steps(orders).expect("orders of a quotient chain")
    }

    /// `v_{K[i]}(D_{K[i]/K}) = [K[i]:K] ∫_{-1}^{v0+ie} (1 - n(v)/[G:G[i]]) dv`,
    /// integrated piece by piece.
    pub fn different_direct(&self, i: u64) -> Result<BigInt> {
        let top = from_big(&self.degree(i));
        let end = self.profile.bracket_point(i);
        let value = self.quotient_index(i).integrate(&minus_one(), &end, |n| &top - from_big(n));
        as_integer(&value)
            .ok_or_else(|| Error::Inconsistency(format!("different of K[{i}]/K is not integral: {value}")))
    }

    /// `(C, A, B)` from the window integrals
    /// `A' = ∫_0^e [G^{v0+v} : G[1]]^{-1} dv` and
    /// `B' = ∫_{-1}^{v0} [G^v : G[0]]^{-1} dv`, so that
    /// `v_{K[i]}(D) = C i p^{di} + A p^{di} + B` with `C = e [K[0]:K]`.
    pub fn closed_form(&self) -> StabilityFit {
        let prof = &self.profile;
        let n0 = from_big(&prof.base_index());
        let n1 = from_big(&prof.bracket_index(1));
        let window = prof.window();
        let a_prime = window.integrate(prof.v0(), &prof.bracket_point(1), |n| from_big(n) / &n1);
        let b_prime = window.integrate(&minus_one(), prof.v0(), |n| from_big(n) / &n0);
        // Σ_{k<i} p^{-d(i-k-1)} = p^d (1 - p^{-di}) / (p^d - 1); scaled by [K[i]:K]
        // this leaves a constant plus a multiple of p^{di}.
        let pd = from_big(&prof.period_factor(1));
        let geometric = &pd / (&pd - Rat::one());
        let c = prof.e_rat() * &n0;
        let a = &n0 * (prof.v0() + Rat::one()) - &n0 * &a_prime * &geometric;
        let b = &n0 * &a_prime * &geometric - &n0 * &b_prime;
        StabilityFit { c, a, b, i_min: 0 }
    }

    /// `psi_{K[k]/K}(x) = ∫_0^x min(n(w), [G:G[k]]) dw`, identity for `x < 0`.
    pub fn psi_quotient(&self, k: u64, x: &Rat) -> Result<Rat> {
        if *x < minus_one() {
            return Err(Error::Domain { value: x.clone() });
        }
        if x.is_negative() {
            return Ok(x.clone());
        }
        Ok(self.quotient_index(k).integrate(&int(0), x, from_big))
    }
}

/// Free-function form of [`BracketTower::psi_quotient`].
pub fn psi_quotient(profile: &SenProfile, k: u64, x: &Rat) -> Result<Rat> {
    BracketTower::new(profile.clone()).psi_quotient(k, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::{different_valuation, psi_of, to_lower};
    use crate::rational::rat;

    fn cyclotomic(p: u64) -> BracketTower {
        let pm1 = BigInt::from(p - 1);
        BracketTower::new(
            SenProfile::new(
                p,
                1,
                1,
                int(1),
                int(1),
                vec![(int(-1), BigInt::one()), (int(0), pm1.clone()), (int(1), pm1 * p)],
            )
            .unwrap(),
        )
    }

    #[test]
    fn cyclotomic_differents() {
        let t = cyclotomic(3);
        let got: Vec<BigInt> = (0..3).map(|i| t.different_direct(i).unwrap()).collect();
        assert_eq!(got, vec![1.into(), 9.into(), 45.into()]);
        assert_eq!(t.degree(2), BigInt::from(18));
        // agrees with the finite filtration at level 1
        assert_eq!(different_valuation(&to_lower(&t.upper_filtration(1))).unwrap(), BigInt::from(9));
    }

    #[test]
    fn cyclotomic_closed_form() {
        let fit = cyclotomic(3).closed_form();
        assert_eq!((fit.c.clone(), fit.a.clone(), fit.b.clone()), (int(2), int(1), int(0)));
    }

    #[test]
    fn single_break_zp_tower() {
        for p in [2u64, 3, 5, 7] {
            let prof = SenProfile::new(p, 1, 1, int(0), int(1), vec![(int(-1), BigInt::one()), (int(0), BigInt::from(p))]).unwrap();
            let t = BracketTower::new(prof);
            let fit = t.closed_form();
            assert_eq!(fit.c, int(1));
            for i in 1..=8 {
                assert_eq!(fit.evaluate(i, p, 1), from_big(&t.different_direct(i as u64).unwrap()), "p={p} i={i}");
            }
        }
    }

    #[test]
    fn psi_quotient_values() {
        let t = cyclotomic(3);
        assert_eq!(t.psi_quotient(2, &rat(-1, 2)).unwrap(), rat(-1, 2));
        assert_eq!(t.psi_quotient(2, &int(3)).unwrap(), int(26));
        // saturated slope beyond v0 + k e
        let a = t.psi_quotient(2, &int(5)).unwrap();
        let b = t.psi_quotient(2, &rat(11, 2)).unwrap();
        assert_eq!((b - a) * int(2), int(18));
        // same as psi of the finite upper filtration
        let psi = psi_of(&t.upper_filtration(2));
        assert_eq!(psi.eval(&rat(7, 3)).unwrap(), t.psi_quotient(2, &rat(7, 3)).unwrap());
    }
}
