//! Finite ramification filtrations in lower and upper numbering.
//!
//! Filtrations carry group orders only. `|G_r|` is stored as a left-continuous
//! step function (see [`StepFunction`]), so for a filtration with integer
//! jumps `order_at(k)` is exactly `|G_k|`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::herbrand::PLFunction;
use crate::rational::{as_integer, from_big, minus_one, Rat};
use crate::step::StepFunction;

fn validate_orders(steps: &StepFunction) -> std::result::Result<(), String> {
    if !steps.last_value().is_one() {
        return Err(format!("final order is {}, expected 1", steps.last_value()));
    }
    for w in steps.steps().windows(2) {
        let (_, prev) = &w[0];
        let (b, next) = &w[1];
        if !next.is_positive() || !prev.is_positive() {
            return Err("orders must be positive".into());
        }
        if next > prev {
            return Err(format!("order increases at {b}"));
        }
        if !prev.is_multiple_of(next) {
            return Err(format!("order {next} at {b} does not divide the previous order {prev}"));
        }
    }
    if !steps.initial().is_positive() {
        return Err("orders must be positive".into());
    }
    // G_r = G_0 for -1 < r <= 0, so the only jump allowed below 0 is at -1.
    if let Some(b) = steps.breaks().find(|b| **b > minus_one() && b.is_negative()) {
        return Err(format!("jump at {b} inside (-1, 0)"));
    }
    Ok(())
}

macro_rules! filtration_type {
    ($name:ident, $what:literal) => {
        #[doc = concat!("Orders of the ", $what, " ramification groups of a finite Galois group.")]
        #[derive(Debug, Clone, PartialEq, Eq, Hash)]
        pub struct $name(StepFunction);

        impl $name {
            pub fn new(steps: Vec<(Rat, BigInt)>) -> Result<Self> {
                let steps = StepFunction::new(steps).map_err(Error::InvalidFiltration)?;
                Self::from_steps(steps)
            }

            pub fn from_steps(steps: StepFunction) -> Result<Self> {
                validate_orders(&steps).map_err(Error::InvalidFiltration)?;
                Ok($name(steps))
            }

            pub fn trivial() -> Self {
                $name(StepFunction::constant(BigInt::one()))
            }

            pub fn steps(&self) -> &StepFunction {
                &self.0
            }

            pub fn to_pairs(&self) -> Vec<(Rat, BigInt)> {
                self.0.steps().to_vec()
            }

            /// `|G|`.
            pub fn group_order(&self) -> &BigInt {
                self.0.initial()
            }

            /// Order of the inertia group, i.e. the ramification index.
            pub fn inertia_order(&self) -> &BigInt {
                self.0.value_at(&Rat::zero())
            }

            pub fn order_at(&self, x: &Rat) -> Result<&BigInt> {
                if *x < minus_one() {
                    return Err(Error::Domain { value: x.clone() });
                }
                Ok(self.0.value_at(x))
            }

            /// Points where the order drops.
            pub fn breaks(&self) -> Vec<Rat> {
                self.0.breaks().cloned().collect()
            }
        }
    };
}

filtration_type!(LowerFiltration, "lower-numbering");
filtration_type!(UpperFiltration, "upper-numbering");

/// `phi(r) = ∫_0^r |G_w| / |G_0| dw` for `r >= 0`, identity below.
pub fn phi_of(lower: &LowerFiltration) -> PLFunction {
    let e = from_big(lower.inertia_order());
    slope_function(lower.steps(), |o| from_big(o) / &e)
}

/// `psi(v) = ∫_0^v [G^0 : G^w] dw` for `v >= 0`, identity below.
pub fn psi_of(upper: &UpperFiltration) -> PLFunction {
    let e = from_big(upper.inertia_order());
    slope_function(upper.steps(), |o| &e / from_big(o))
}

fn slope_function<F: Fn(&BigInt) -> Rat>(steps: &StepFunction, slope: F) -> PLFunction {
    let mut pairs = vec![(minus_one(), Rat::one())];
    for (b, o) in steps.steps().iter().skip(1) {
        if !b.is_negative() {
            pairs.push((b.clone(), slope(o)));
        }
    }
    PLFunction::new(pairs).expect("slopes of a valid filtration are positive")
}

pub fn to_upper(lower: &LowerFiltration) -> UpperFiltration {
    let phi = phi_of(lower);
    let steps = lower
        .steps()
        .map_breaks(|b| phi.eval(b).expect("breaks lie in the domain"))
        .expect("phi is strictly increasing");
    UpperFiltration(steps)
}

pub fn to_lower(upper: &UpperFiltration) -> LowerFiltration {
    let psi = psi_of(upper);
    let steps = upper
        .steps()
        .map_breaks(|b| psi.eval(b).expect("breaks lie in the domain"))
        .expect("psi is strictly increasing");
    LowerFiltration(steps)
}

/// `e * ∫_{-1}^{oo} (1 - 1/|G^v|) dv`, evaluated on the upper filtration.
pub fn different_integral(lower: &LowerFiltration) -> Rat {
    upper_different_integral(&to_upper(lower))
}

/// The integral formula for the different, starting from upper numbering.
pub fn upper_different_integral(upper: &UpperFiltration) -> Rat {
    let e = from_big(upper.inertia_order());
    let end = upper.steps().last_break().clone();
    let integral = upper.steps().integrate(&minus_one(), &end, |o| Rat::one() - from_big(o).recip());
    e * integral
}

/// `Σ_{r >= 0} (|G_r| - 1)` over integers `r`. Requires integer breaks.
pub fn different_sum(lower: &LowerFiltration) -> Result<BigInt> {
    if let Some(b) = lower.steps().breaks().find(|b| !b.is_integer()) {
        return Err(Error::Unsupported(format!("non-integer lower break {b}")));
    }
    let mut total = BigInt::zero();
    for piece in lower.steps().pieces() {
        let Some(end) = piece.end else { continue };
        // integers k with start < k <= end and k >= 0
        let lo = piece.start.to_integer().max(BigInt::from(-1));
        let hi = end.to_integer();
        if hi > lo {
            total += (hi - lo) * (piece.value - 1u32);
        }
    }
    Ok(total)
}

/// Valuation of the different, computed by the integral over the upper
/// filtration and by Hilbert's sum over the lower filtration. The two must
/// agree.
pub fn different_valuation(lower: &LowerFiltration) -> Result<BigInt> {
    different_report(lower).map(|r| r.value)
}

/// Both routes of [`different_valuation`], for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferentReport {
    pub integral: Rat,
    pub sum: BigInt,
    pub value: BigInt,
}

pub fn different_report(lower: &LowerFiltration) -> Result<DifferentReport> {
    let sum = different_sum(lower)?;
    let integral = different_integral(lower);
    match as_integer(&integral) {
        Some(v) if v == sum => Ok(DifferentReport { integral, sum, value: v }),
        _ => Err(Error::Inconsistency(format!(
            "different: integral gives {integral}, lower sum gives {sum}"
        ))),
    }
}

/// Upper filtration of `G / G^{v_cut}`.
pub fn quotient_upper(upper: &UpperFiltration, v_cut: &Rat) -> Result<UpperFiltration> {
    if *v_cut < minus_one() {
        return Err(Error::Domain { value: v_cut.clone() });
    }
    let h = upper.steps().value_at(v_cut).clone();
    let mut steps = Vec::new();
    for (k, (b, o)) in upper.steps().steps().iter().enumerate() {
        if k == 0 || b < v_cut {
            let (q, r) = o.div_rem(&h);
            if !r.is_zero() {
                return Err(Error::InvalidFiltration(format!("order {o} at {b} not divisible by {h}")));
            }
            steps.push((b.clone(), q));
        }
    }
    steps.push((v_cut.clone(), BigInt::one()));
    UpperFiltration::new(steps)
}

/// Validates caller-supplied intersection orders `|H_r| = |G_r ∩ H|`.
pub fn subgroup_lower(lower: &LowerFiltration, subgroup: &LowerFiltration) -> Result<LowerFiltration> {
    let mut points: Vec<Rat> = vec![minus_one()];
    points.extend(lower.breaks());
    points.extend(subgroup.breaks());
    // value just after each break, plus the value at the break itself
    let mut probes = points.clone();
    for w in {
        let mut s = points.clone();
        s.sort();
        s.dedup();
        s
    }
    .windows(2)
    {
        probes.push((&w[0] + &w[1]) / Rat::from_integer(2.into()));
    }
    if let Some(last) = points.iter().max() {
        probes.push(last + Rat::one());
    }
    let h = subgroup.group_order();
    if !lower.group_order().is_multiple_of(h) {
        return Err(Error::InvalidSubgroup(format!("|H| = {h} does not divide |G| = {}", lower.group_order())));
    }
    for x in &probes {
        let hr = subgroup.steps().value_at(x);
        let gr = lower.steps().value_at(x);
        if !h.is_multiple_of(hr) || !gr.is_multiple_of(hr) {
            return Err(Error::InvalidSubgroup(format!(
                "|H_r| = {hr} at r = {x} must divide |H| = {h} and |G_r| = {gr}"
            )));
        }
    }
    Ok(subgroup.clone())
}

/// Lower filtration of a subgroup `H` of order `h` that sits in the chain of
/// ramification groups (every `G_r` contains `H` or is contained in it), so
/// that `|H_r| = min(|G_r|, h)`.
pub fn chain_subgroup(lower: &LowerFiltration, h: &BigInt) -> Result<LowerFiltration> {
    let orders = lower.steps().map_values(|o| o.min(h).clone()).map_err(Error::InvalidSubgroup)?;
    let sub = LowerFiltration::from_steps(orders)?;
    subgroup_lower(lower, &sub)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn lower(pairs: &[(i64, i64)]) -> LowerFiltration {
        LowerFiltration::new(pairs.iter().map(|&(b, o)| (int(b), BigInt::from(o))).collect()).unwrap()
    }

    fn upper(pairs: &[(i64, i64)]) -> UpperFiltration {
        UpperFiltration::new(pairs.iter().map(|&(b, o)| (int(b), BigInt::from(o))).collect()).unwrap()
    }

    // Gal(Q3(ζ9)/Q3): |G_0| = 6, |G_1| = |G_2| = 3, |G_3| = 1.
    fn zeta9() -> LowerFiltration {
        lower(&[(-1, 6), (0, 3), (2, 1)])
    }

    #[test]
    fn phi_of_trivial_is_identity() {
        assert!(phi_of(&LowerFiltration::trivial()).is_identity());
    }

    #[test]
    fn phi_of_zeta9() {
        let phi = phi_of(&zeta9());
        assert_eq!(phi.eval(&int(1)).unwrap(), rat(1, 2));
        assert_eq!(phi.eval(&int(2)).unwrap(), int(1));
        let slopes: Vec<Rat> = phi.segments().iter().map(|s| s.slope.clone()).collect();
        assert_eq!(slopes, vec![int(1), rat(1, 2), rat(1, 6)]);
    }

    #[test]
    fn unramified_phi_is_identity() {
        let l = lower(&[(-1, 5), (-1, 1)]);
        assert!(phi_of(&l).is_identity());
        assert_eq!(l.inertia_order(), &BigInt::from(1));
        assert_eq!(different_valuation(&l).unwrap(), BigInt::zero());
    }

    #[test]
    fn upper_breaks_of_zeta9() {
        let u = to_upper(&zeta9());
        assert_eq!(u.breaks(), vec![int(0), int(1)]);
        assert_eq!(to_lower(&u), zeta9());
        assert_eq!(to_upper(&LowerFiltration::trivial()), UpperFiltration::trivial());
    }

    #[test]
    fn tame_breaks_are_fixed() {
        let l = lower(&[(-1, 4), (0, 1)]);
        assert_eq!(to_upper(&l).breaks(), vec![int(0)]);
        assert_eq!(different_valuation(&l).unwrap(), BigInt::from(3));
    }

    #[test]
    fn different_of_zeta9() {
        let r = different_report(&zeta9()).unwrap();
        assert_eq!(r.value, BigInt::from(9));
        assert_eq!(r.integral, int(9));
        assert_eq!(different_valuation(&LowerFiltration::trivial()).unwrap(), BigInt::zero());
    }

    #[test]
    fn non_integer_break_is_unsupported() {
        let l = LowerFiltration::new(vec![(int(-1), 2.into()), (rat(1, 2), 1.into())]).unwrap();
        assert!(matches!(different_valuation(&l), Err(Error::Unsupported(_))));
    }

    #[test]
    fn rejects_bad_filtrations() {
        assert!(LowerFiltration::new(vec![(int(-1), 6.into()), (int(0), 4.into()), (int(1), 1.into())]).is_err());
        assert!(LowerFiltration::new(vec![(int(-1), 6.into()), (int(0), 3.into())]).is_err());
        assert!(LowerFiltration::new(vec![(int(-1), 3.into()), (rat(-1, 2), 1.into())]).is_err());
        assert!(LowerFiltration::new(vec![(int(-1), 3.into()), (int(0), 9.into()), (int(1), 1.into())]).is_err());
    }

    #[test]
    fn quotient_of_zeta27() {
        // Gal(Q3(ζ27)/Q3): upper orders 18, 9, 3, 1 with jumps at 0, 1, 2.
        let u = upper(&[(-1, 18), (0, 9), (1, 3), (2, 1)]);
        assert_eq!(quotient_upper(&u, &int(5)).unwrap(), u);
        assert_eq!(quotient_upper(&u, &int(-1)).unwrap(), UpperFiltration::trivial());
        // G^2 = Gal(Q3(ζ27)/Q3(ζ9)), so the quotient is Gal(Q3(ζ9)/Q3).
        assert_eq!(quotient_upper(&u, &int(2)).unwrap(), to_upper(&zeta9()));
        // G^1 = Gal(Q3(ζ27)/Q3(ζ3)).
        assert_eq!(quotient_upper(&u, &int(1)).unwrap(), upper(&[(-1, 2), (0, 1)]));
    }

    #[test]
    fn subgroup_of_zeta27() {
        // lower: |G_0| = 18, |G_1| = |G_2| = 9, |G_3..8| = 3, |G_9| = 1
        let g = lower(&[(-1, 18), (0, 9), (2, 3), (8, 1)]);
        let h = lower(&[(-1, 9), (2, 3), (8, 1)]);
        assert_eq!(subgroup_lower(&g, &h).unwrap(), h);
        assert_eq!(chain_subgroup(&g, &BigInt::from(9)).unwrap(), h);
        assert_eq!(subgroup_lower(&g, &g).unwrap(), g);
        assert_eq!(subgroup_lower(&g, &LowerFiltration::trivial()).unwrap(), LowerFiltration::trivial());
        let bad = lower(&[(-1, 9), (5, 1)]);
        // |H_r| = 9 does not divide |G_r| = 3 for 2 < r <= 5
        assert!(matches!(subgroup_lower(&g, &bad), Err(Error::InvalidSubgroup(_))));
    }
}
