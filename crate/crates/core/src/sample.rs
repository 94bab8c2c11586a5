//! Seeded random inputs: finite filtrations, Sen profiles and general towers.
//!
//! Item `k` of a batch is drawn from its own ChaCha stream, so batches are
//! reproducible and independent of evaluation order.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::filtration::LowerFiltration;
use crate::rational::{ceil_to_i64, from_big, int, minus_one, rat, Rat};
use crate::tower::{GeneralTower, SenProfile};

pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Lower filtration of a group whose order is a product of at most four
/// primes `<= 7`, with integer jumps in `[-1, 30]`.
pub fn lower_filtration<R: Rng>(rng: &mut R) -> LowerFiltration {
    let count = rng.gen_range(1..=4);
    let mut primes: Vec<u64> = (0..count).map(|_| *[2u64, 3, 5, 7].choose(rng).unwrap()).collect();
    primes.shuffle(rng);
    // orders along a chain: drop one or more primes at each jump
    let mut orders = Vec::new();
    let mut rest = primes.as_slice();
    while !rest.is_empty() {
        orders.push(rest.iter().map(|&p| BigInt::from(p)).product::<BigInt>());
        let drop = rng.gen_range(1..=rest.len());
        rest = &rest[drop..];
    }
    orders.push(BigInt::one());
    let jumps = orders.len() - 1;
    let mut breaks: Vec<i64> = (-1..=30).collect::<Vec<_>>().choose_multiple(rng, jumps).cloned().collect();
    breaks.sort();
    let mut steps = vec![(minus_one(), orders[0].clone())];
    for (b, o) in breaks.into_iter().zip(orders.into_iter().skip(1)) {
        steps.push((int(b), o));
    }
    LowerFiltration::new(steps).expect("generated filtration is valid")
}

/// A piece of given index whose length times index is a positive integer
/// at most `max_units`.
fn piece_length<R: Rng>(rng: &mut R, index: &BigInt, max_units: i64) -> Rat {
    rat(rng.gen_range(1..=max_units.max(1)), 1) / from_big(index)
}

/// Random Sen profile. Every piece has integral `length * index`, so all
/// finite layers have integral lower breaks.
pub fn sen_profile<R: Rng>(rng: &mut R) -> SenProfile {
    let p = *[2u64, 3, 5].choose(rng).unwrap();
    let d = rng.gen_range(1..=3u32);
    let e = rng.gen_range(1..=3u64);
    let mut steps: Vec<(Rat, BigInt)> = vec![(minus_one(), BigInt::one())];
    let mut at = int(0);
    if rng.gen_bool(0.5) {
        at += int(1);
    }
    let mut index = BigInt::one();
    for _ in 0..rng.gen_range(0..=2) {
        index *= *[2u64, 3, p].choose(rng).unwrap();
        steps.push((at.clone(), index.clone()));
        at += piece_length(rng, &index, index.to_i64().unwrap_or(1));
    }
    let v0 = at.clone();
    let n0 = index;
    // one period: exponents of p climbing to d
    let mut exps: Vec<u32> = (0..d).filter(|_| rng.gen_bool(0.4)).collect();
    exps.push(d);
    let e_rat = int(e as i64);
    let mut offset = int(0);
    for (j, a) in exps.iter().enumerate() {
        let mut value = &n0 * BigInt::from(p).pow(*a);
        // keep every intermediate piece inside the period
        let room = ceil_to_i64(&((&e_rat - &offset) * from_big(&value))) - 1;
        let last = j + 1 == exps.len() || room < 1;
        if last {
            value = &n0 * BigInt::from(p).pow(d);
        }
        if j > 0 || value != n0 {
            steps.push((&v0 + &offset, value.clone()));
        }
        if last {
            break;
        }
        offset += piece_length(rng, &value, (room / 2).max(1));
    }
    let c = &v0 + &e_rat;
    SenProfile::new(p, d, e, v0, c, steps).expect("generated profile is valid")
}

/// Random general tower over a random Sen profile.
pub fn general_tower<R: Rng>(rng: &mut R) -> GeneralTower {
    loop {
        if let Some(t) = try_general_tower(rng) {
            return t;
        }
    }
}

fn try_general_tower<R: Rng>(rng: &mut R) -> Option<GeneralTower> {
    let prof = sen_profile(rng);
    let (p, d) = (prof.p(), prof.d());
    let e_rat = prof.e_rat();
    let k0 = rng.gen_range(0..=2u64);
    let t = rng.gen_range(1..=d + 1);
    let i0 = k0 + (t / d) as u64;
    let splice = prof.bracket_point(k0);
    let n_k = prof.bracket_index(k0);

    let mut base: Vec<(Rat, BigInt)> =
        prof.index_function(&splice).steps().iter().filter(|(b, _)| *b < splice).cloned().collect();
    let mut exps: Vec<u32> = (1..t).filter(|_| rng.gen_bool(0.5)).collect();
    exps.push(t);
    let mut at = splice.clone();
    let mut current = n_k.clone();
    for a in exps {
        // q <= n needs the jump to N_k p^a no earlier than splice + ceil(a/d) e
        let earliest = &splice + int(a.div_ceil(d) as i64) * &e_rat;
        let needed = ceil_to_i64(&((&earliest - &at) * from_big(&current))).max(1);
        let units = needed + rng.gen_range(0..=3);
        at += rat(units, 1) / from_big(&current);
        current = &n_k * BigInt::from(p).pow(a);
        base.push((at.clone(), current.clone()));
    }

    let saturation = at;
    let centre = int(i0 as i64) * &e_rat;
    let mut c = [&saturation - &centre, &centre - &splice, &splice - &centre, prof.v0() + &e_rat + int(1)]
        .into_iter()
        .max()
        .unwrap();
    for _ in 0..8 {
        let with_c = prof.clone().with_c(c.clone()).ok()?;
        if let Ok(tower) = GeneralTower::new(with_c, i0, k0, base.clone()) {
            return Some(tower);
        }
        c *= int(2);
    }
    None
}

/// `(profile, j, k)` with `0 <= k < j`: the layers `K[k] ⊂ K[j]` over `K`.
pub fn tower_triple<R: Rng>(rng: &mut R) -> (SenProfile, u64, u64) {
    let prof = sen_profile(rng);
    let j = rng.gen_range(1..=4u64);
    let k = rng.gen_range(0..j);
    (prof, j, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        let a: Vec<_> = (0..20).map(|k| sen_profile(&mut rng_for(7, k))).collect();
        let b: Vec<_> = (0..20).map(|k| sen_profile(&mut rng_for(7, k))).collect();
        assert_eq!(a, b);
        assert_eq!(lower_filtration(&mut rng_for(3, 1)), lower_filtration(&mut rng_for(3, 1)));
    }

    #[test]
    fn many_profiles_are_valid() {
        for k in 0..2000 {
            sen_profile(&mut rng_for(11, k));
            lower_filtration(&mut rng_for(11, k));
        }
    }

    #[test]
    fn general_towers_validate() {
        for k in 0..50 {
            let t = general_tower(&mut rng_for(0, k));
            for i in t.i0()..t.i0() + 3 {
                assert!(t.different(i).is_ok(), "tower {k} level {i}");
            }
        }
    }
}
