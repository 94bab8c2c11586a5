use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use dashmap::DashSet;

use super::matrix::{ModMatrix, Precision};
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Default element budget for subgroup closure. Large enough for the whole
/// of `GL_2(Z/81)` (25 509 168 elements).
pub const DEFAULT_BUDGET: usize = 30_000_000;

/// Codes up to this bound use a dense bitset (128 MiB at most).
const DENSE_LIMIT: u64 = 1 << 30;

/// Concurrent set of matrix codes.
enum Store {
    Dense(Vec<AtomicU64>),
    Sparse(DashSet<u64>),
}

impl Store {
    fn new(universe: u64) -> Self {
        if universe <= DENSE_LIMIT {
            Store::Dense((0..universe.div_ceil(64)).map(|_| AtomicU64::new(0)).collect())
        } else {
            Store::Sparse(DashSet::new())
        }
    }

    /// `true` if `code` was not present before.
    fn insert(&self, code: u64) -> bool {
        match self {
            Store::Dense(bits) => {
                let mask = 1u64 << (code % 64);
                bits[(code / 64) as usize].fetch_or(mask, Ordering::Relaxed) & mask == 0
            }
            Store::Sparse(set) => set.insert(code),
        }
    }
}

/// `|Gamma ∩ ker mod p^i|` per level and the dimension read off from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureReport {
    pub order: u64,
    /// `level_orders[i] = |Gamma ∩ ker mod p^i|` for `i = 0..=m`.
    pub level_orders: Vec<u64>,
    /// `log_p |Gamma(i) / Gamma(i+1)|` for `i = 1..m-1`.
    pub ratios: Vec<u32>,
    pub dimension: u32,
    pub stabilization_level: u32,
}

/// Generates `Gamma = <generators>` inside `GL_n(Z/p^m)` by breadth-first
/// closure and measures its congruence filtration.
pub fn closed_subgroup_dimension(
    generators: &[ModMatrix],
    prec: Precision,
    budget: usize,
    exec: Execution,
) -> Result<ClosureReport> {
    if prec.m < 3 {
        return Err(Error::InvalidParameters("m >= 3 is needed to see two consecutive quotients".into()));
    }
    if let Some(g) = generators.iter().find(|g| g.precision() != prec) {
        return Err(Error::InvalidParameters(format!("generator {g} has the wrong shape")));
    }
    let universe = prec
        .matrix_count()
        .ok_or_else(|| Error::InvalidParameters("matrix codes do not fit in 64 bits".into()))?;
    let store = Store::new(universe);
    let m = prec.m as usize;
    let histogram: Vec<AtomicU64> = (0..=m).map(|_| AtomicU64::new(0)).collect();
    let count = AtomicUsize::new(0);

    let admit = |x: &ModMatrix| -> bool {
        if store.insert(x.encode()) {
            histogram[x.level() as usize].fetch_add(1, Ordering::Relaxed);
            count.fetch_add(1, Ordering::Relaxed);
            true
        } else {
            false
        }
    };

    let identity = ModMatrix::identity(prec);
    admit(&identity);
    let mut frontier = vec![identity];
    while !frontier.is_empty() {
        if count.load(Ordering::Relaxed) > budget {
            return Err(Error::BudgetExceeded { budget });
        }
        frontier = exec.flat_map(&frontier, |x| {
            generators.iter().map(|g| x.mul(g)).filter(|y| admit(y)).collect::<Vec<_>>()
        });
    }
    let order = count.load(Ordering::Relaxed) as u64;
    if order as usize > budget {
        return Err(Error::BudgetExceeded { budget });
    }

    let mut level_orders = vec![0u64; m + 1];
    let mut acc = 0;
    for i in (0..=m).rev() {
        acc += histogram[i].load(Ordering::Relaxed);
        level_orders[i] = acc;
    }
    let mut ratios = Vec::with_capacity(m - 1);
    for i in 1..m {
        let (a, b) = (level_orders[i], level_orders[i + 1]);
        let log = log_exact(a / b, prec.p).filter(|_| a % b == 0).ok_or_else(|| {
            Error::Inconsistency(format!("|Gamma({i})| / |Gamma({})| = {a}/{b} is not a power of p", i + 1))
        })?;
        ratios.push(log);
    }
    let dimension = *ratios.last().expect("m >= 3");
    let stable_from = ratios.iter().rposition(|&r| r != dimension).map_or(0, |k| k + 1);
    Ok(ClosureReport { order, level_orders, ratios, dimension, stabilization_level: stable_from as u32 + 1 })
}

fn log_exact(mut x: u64, p: u64) -> Option<u32> {
    let mut k = 0;
    while x > 1 {
        if !x.is_multiple_of(p) {
            return None;
        }
        x /= p;
        k += 1;
    }
    (x == 1).then_some(k)
}

/// Generators of the whole group `GL_2(Z/p^m)`: `E12(1)`, `E21(1)` and
/// `diag(u, 1)` for generators `u` of the units.
pub fn gl2_generators(prec: Precision) -> Result<Vec<ModMatrix>> {
    if prec.n != 2 {
        return Err(Error::InvalidParameters("gl2_generators needs n = 2".into()));
    }
    let mut gens = sl2_generators(prec)?;
    for u in unit_generators(prec) {
        gens.push(ModMatrix::diagonal(prec, &[u as i64, 1])?);
    }
    Ok(gens)
}

/// `E12(1)` and `E21(1)`, which generate `SL_2(Z/p^m)`.
pub fn sl2_generators(prec: Precision) -> Result<Vec<ModMatrix>> {
    if prec.n != 2 {
        return Err(Error::InvalidParameters("sl2_generators needs n = 2".into()));
    }
    Ok(vec![ModMatrix::elementary(prec, 0, 1, 1)?, ModMatrix::elementary(prec, 1, 0, 1)?])
}

/// Generators of `(Z/p^m)^*`: a primitive root for odd `p`, `-1` and `5`
/// for `p = 2`.
fn unit_generators(prec: Precision) -> Vec<u64> {
    let q = prec.modulus();
    if prec.p == 2 {
        return vec![q - 1, 5 % q];
    }
    vec![primitive_root(prec)]
}

fn primitive_root(prec: Precision) -> u64 {
    let q = prec.modulus();
    let phi = q / prec.p * (prec.p - 1);
    let mut factors = Vec::new();
    let mut r = phi;
    let mut f = 2;
    while f * f <= r {
        if r.is_multiple_of(f) {
            factors.push(f);
            while r.is_multiple_of(f) {
                r /= f;
            }
        }
        f += 1;
    }
    if r > 1 {
        factors.push(r);
    }
    let pow = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        b %= q;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % q;
            }
            b = b * b % q;
            e >>= 1;
        }
        acc
    };
    (2..q)
        .find(|&g| g % prec.p != 0 && factors.iter().all(|&f| pow(g, phi / f) != 1))
        .expect("odd prime powers have primitive roots")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn full_group_mod_27() {
        let prec = Precision::new(2, 3, 3).unwrap();
        let r = closed_subgroup_dimension(&gl2_generators(prec).unwrap(), prec, DEFAULT_BUDGET, Execution::default())
            .unwrap();
        assert_eq!(r.order, prec.group_order().unwrap());
        assert_eq!((r.dimension, r.stabilization_level), (4, 1));
    }

    #[test]
    fn special_linear_mod_27() {
        let prec = Precision::new(2, 3, 3).unwrap();
        let r = closed_subgroup_dimension(&sl2_generators(prec).unwrap(), prec, DEFAULT_BUDGET, Execution::default())
            .unwrap();
        assert_eq!(r.order, 27 * 27 * 24);
        assert_eq!(r.dimension, 3);
    }

    #[test]
    fn trivial_group() {
        let prec = Precision::new(2, 5, 3).unwrap();
        let r = closed_subgroup_dimension(&[], prec, 10, Execution::default()).unwrap();
        assert_eq!((r.order, r.dimension, r.stabilization_level), (1, 0, 1));
    }

    #[test]
    fn conjugation_invariance() {
        let prec = Precision::new(2, 3, 3).unwrap();
        let gens = sl2_generators(prec).unwrap();
        let base = closed_subgroup_dimension(&gens, prec, DEFAULT_BUDGET, Execution::Sequential).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..3 {
            let c = ModMatrix::random_invertible(prec, &mut rng);
            let ci = c.inverse();
            let conj: Vec<ModMatrix> = gens.iter().map(|g| c.mul(g).mul(&ci)).collect();
            let r = closed_subgroup_dimension(&conj, prec, DEFAULT_BUDGET, Execution::default()).unwrap();
            assert_eq!((r.dimension, r.stabilization_level, r.order), (base.dimension, base.stabilization_level, base.order));
        }
    }

    #[test]
    fn budget_is_enforced() {
        let prec = Precision::new(2, 3, 3).unwrap();
        let r = closed_subgroup_dimension(&gl2_generators(prec).unwrap(), prec, 1000, Execution::default());
        assert_eq!(r, Err(Error::BudgetExceeded { budget: 1000 }));
    }

    #[test]
    fn unit_generators() {
        assert_eq!(primitive_root(Precision::new(1, 3, 4).unwrap()), 2);
        assert_eq!(primitive_root(Precision::new(1, 7, 2).unwrap()), 3);
        let prec = Precision::new(2, 2, 4).unwrap();
        let r = closed_subgroup_dimension(&gl2_generators(prec).unwrap(), prec, DEFAULT_BUDGET, Execution::default())
            .unwrap();
        assert_eq!(r.order, prec.group_order().unwrap());
    }
}
