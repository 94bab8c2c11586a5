use std::collections::HashSet;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::matrix::{det_mod, level_of, ModMatrix, Precision};
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Outcome of a sampled check. Failures carry a human-readable witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub name: String,
    pub checked: usize,
    pub failed: usize,
    pub witnesses: Vec<String>,
}

const MAX_WITNESSES: usize = 5;

impl CheckReport {
    fn collect(name: String, outcomes: Vec<Option<String>>) -> Self {
        let checked = outcomes.len();
        let failures: Vec<String> = outcomes.into_iter().flatten().collect();
        CheckReport {
            name,
            checked,
            failed: failures.len(),
            witnesses: failures.into_iter().take(MAX_WITNESSES).collect(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "pass" } else { "FAIL" };
        write!(f, "{}: {verdict} ({} checked, {} failed)", self.name, self.checked, self.failed)?;
        for w in &self.witnesses {
            write!(f, "\n  witness: {w}")?;
        }
        Ok(())
    }
}

/// Per-sample generator: one ChaCha stream per sample index.
fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `|ker(GL_n(Z/p^m) -> GL_n(Z/p^i))| = p^{n^2 (m - i)}`.
pub fn kernel_order(n: usize, p: u64, i: u32, m: u32) -> Result<u64> {
    let prec = Precision::new(n, p, m)?;
    if i < 1 || i > m {
        return Err(Error::InvalidParameters(format!("level i = {i} must satisfy 1 <= i <= m = {m}")));
    }
    p.checked_pow(prec.entries() as u32 * (m - i))
        .ok_or_else(|| Error::InvalidParameters("kernel order overflows u64".into()))
}

/// Result of scanning every matrix mod `p^m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub precision: Precision,
    pub group_order: u64,
    /// `kernel[i]` counts elements `= I mod p^i`, for `i = 0..=m`.
    pub kernel: Vec<u64>,
}

/// Counts `GL_n(Z/p^m)` and its congruence kernels by brute force.
pub fn enumerate_group(prec: Precision, exec: Execution) -> Result<Enumeration> {
    let total = prec
        .matrix_count()
        .filter(|&c| c <= 1 << 32)
        .ok_or_else(|| Error::InvalidParameters("too many matrices to enumerate".into()))?;
    let m = prec.m as usize;
    let q = prec.modulus();
    let histogram = exec
        .fold_range(
            0..total,
            1 << 14,
            |range| {
                let mut hist = vec![0u64; m + 1];
                for code in range {
                    let x = ModMatrix::decode(prec, code);
                    if !det_mod(x.entries(), prec.n, q).is_multiple_of(prec.p) {
                        hist[level_of(x.entries(), prec) as usize] += 1;
                    }
                }
                hist
            },
            |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect(),
        )
        .unwrap_or_else(|| vec![0; m + 1]);
    let mut kernel = vec![0u64; m + 1];
    let mut acc = 0;
    for i in (0..=m).rev() {
        acc += histogram[i];
        kernel[i] = acc;
    }
    Ok(Enumeration { precision: prec, group_order: kernel[0], kernel })
}

/// All `(n, p, m)` with `p` in `{2, 3, 5, 7}`, `n <= 3` and `|GL_n(Z/p^m)| <= limit`.
pub fn small_groups(limit: u64) -> Vec<Precision> {
    let mut out = Vec::new();
    for n in 1..=3 {
        for p in [2u64, 3, 5, 7] {
            for m in 1.. {
                match Precision::new(n, p, m).ok().and_then(|pr| pr.group_order().map(|o| (pr, o))) {
                    Some((pr, o)) if o <= limit => out.push(pr),
                    _ => break,
                }
            }
        }
    }
    out
}

/// First level at which the shift and commutator checks are meaningful:
/// 1 for odd `p`, 2 for `p = 2` (where `H/H^4` must be abelian).
pub fn base_level(p: u64) -> u32 {
    if p == 2 {
        2
    } else {
        1
    }
}

/// `(I + p^i A)^p = I + p^{i+1} A mod p^{i+2}`, and the induced map on
/// `level i / level i+1` is well defined: `X (I + p^{i+1} B)` lands in the
/// same class.
pub fn shift_check(n: usize, p: u64, i: u32, m: u32, samples: usize, seed: u64, exec: Execution) -> Result<CheckReport> {
    let prec = Precision::new(n, p, m)?;
    if i < base_level(p) {
        return Err(Error::InvalidParameters(
            "p = 2 needs the mod-4 variant: H/H^4 must be abelian, so the shift check starts at level i >= 2".into(),
        ));
    }
    if i + 2 > m {
        return Err(Error::InvalidParameters(format!("need i + 2 <= m, got i = {i}, m = {m}")));
    }
    let indices: Vec<u64> = (0..samples as u64).collect();
    let outcomes = exec.map(&indices, |&s| {
        let mut rng = sample_rng(seed, s);
        let x = ModMatrix::random_kernel(prec, i, &mut rng);
        let y = ModMatrix::random_kernel(prec, i + 1, &mut rng);
        let a = x.kernel_coordinates(i, 1);
        let xp = x.pow(p);
        if xp.level() < i + 1 {
            return Some(format!("X = {x}: X^p = {xp} is not at level {}", i + 1));
        }
        if xp.kernel_coordinates(i + 1, 1) != a {
            return Some(format!("X = {x}: X^p = {xp} is not I + p^(i+1) A mod p^(i+2)"));
        }
        let xyp = x.mul(&y).pow(p);
        if xyp.level() < i + 1 || xyp.kernel_coordinates(i + 1, 1) != a {
            return Some(format!("X = {x}, Y = {y}: (XY)^p = {xyp} leaves the class of X^p"));
        }
        None
    });
    Ok(CheckReport::collect(format!("shift n={n} p={p} i={i} m={m}"), outcomes))
}

/// Commutators of level-`b` elements lie at level `b + 1`, where `b` is
/// [`base_level`].
pub fn abelian_check(n: usize, p: u64, m: u32, samples: usize, seed: u64, exec: Execution) -> Result<CheckReport> {
    let prec = Precision::new(n, p, m)?;
    let b = base_level(p);
    if m < b + 1 {
        return Err(Error::InvalidParameters(format!("need m >= {} for p = {p}", b + 1)));
    }
    let indices: Vec<u64> = (0..samples as u64).collect();
    let outcomes = exec.map(&indices, |&s| {
        let mut rng = sample_rng(seed, s);
        let x = ModMatrix::random_kernel(prec, b, &mut rng);
        let y = ModMatrix::random_kernel(prec, b, &mut rng);
        let c = x.commutator(&y);
        (c.level() < b + 1).then(|| format!("X = {x}, Y = {y}: [X, Y] = {c} is not I mod p^{}", b + 1))
    });
    Ok(CheckReport::collect(format!("abelian n={n} p={p} m={m}"), outcomes))
}

/// Negative control: commutators of random elements of the whole group.
/// Returns how many of the sampled pairs fail the level test.
pub fn abelian_negative_control(n: usize, p: u64, m: u32, samples: usize, seed: u64) -> Result<usize> {
    let prec = Precision::new(n, p, m)?;
    let b = base_level(p);
    Ok((0..samples as u64)
        .filter(|&s| {
            let mut rng = sample_rng(seed, s);
            let x = ModMatrix::random_invertible(prec, &mut rng);
            let y = ModMatrix::random_invertible(prec, &mut rng);
            x.commutator(&y).level() < b + 1
        })
        .count())
}

/// `level i / level i+r` has exponent `p^r`: sampled `X` satisfy
/// `X^{p^r} = I mod p^{i+r}`, and the class of `X^{p^{r-1}}` is nontrivial for
/// some sample.
pub fn quotient_exponent_check(
    n: usize,
    p: u64,
    i: u32,
    r: u32,
    m: u32,
    samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<CheckReport> {
    let prec = Precision::new(n, p, m)?;
    if i < base_level(p) || r == 0 || i + r > m {
        return Err(Error::InvalidParameters(format!("need {} <= i, r >= 1, i + r <= m", base_level(p))));
    }
    let indices: Vec<u64> = (0..samples as u64).collect();
    let results = exec.map(&indices, |&s| {
        let mut rng = sample_rng(seed, s);
        let x = ModMatrix::random_kernel(prec, i, &mut rng);
        let top = x.pow(p.pow(r));
        let below = x.pow(p.pow(r - 1));
        let outcome = (top.level() < i + r).then(|| format!("X = {x}: X^(p^{r}) = {top} is not at level {}", i + r));
        (outcome, below.level() < i + r)
    });
    let sharp = results.iter().any(|(_, nontrivial)| *nontrivial);
    let mut outcomes: Vec<Option<String>> = results.into_iter().map(|(o, _)| o).collect();
    if !sharp {
        outcomes.push(Some(format!("no sample has order exactly p^{r} in the quotient")));
    }
    Ok(CheckReport::collect(format!("exponent n={n} p={p} i={i} r={r} m={m}"), outcomes))
}

/// Which level convention the power subgroups of `H = ker mod p` follow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSubgroupReport {
    pub j: u32,
    /// `|{X^{p^j} : X in H}|`.
    pub powers: u64,
    /// `|ker mod p^{j+1}|`.
    pub shifted_kernel: u64,
    /// `|ker mod p^j|`.
    pub literal_kernel: u64,
    /// Every power lies in `ker mod p^{j+1}` and the counts match.
    pub matches_shifted: bool,
    pub matches_literal: bool,
}

/// Enumerates `H = ker(GL_n(Z/p^m) -> GL_n(F_p))` and the set of its
/// `p^j`-th powers, and compares with both candidate congruence kernels.
pub fn power_subgroup_check(n: usize, p: u64, j: u32, m: u32, exec: Execution) -> Result<PowerSubgroupReport> {
    let prec = Precision::new(n, p, m)?;
    if j + 1 > m {
        return Err(Error::InvalidParameters(format!("need j + 1 <= m, got j = {j}, m = {m}")));
    }
    let h_order = kernel_order(n, p, 1, m)?;
    if h_order > 1 << 22 {
        return Err(Error::InvalidParameters(format!("H has {h_order} elements; too many to enumerate")));
    }
    let codes: Vec<u64> = (0..h_order).collect();
    let per = p.pow(m - 1);
    let exponent = p.pow(j);
    let powers: Vec<(u64, u32)> = exec.map(&codes, |&code| {
        // code enumerates A mod p^{m-1} in X = I + p A
        let mut a = code;
        let mut e = ModMatrix::identity(prec).entries().to_vec();
        for slot in e.iter_mut().rev() {
            *slot = (*slot + p * (a % per)) % prec.modulus();
            a /= per;
        }
        let y = ModMatrix::from_raw(prec, e).pow(exponent);
        (y.encode(), y.level())
    });
    let all_deep = powers.iter().all(|&(_, l)| l > j);
    let distinct: HashSet<u64> = powers.into_iter().map(|(c, _)| c).collect();
    let count = distinct.len() as u64;
    let shifted = kernel_order(n, p, j + 1, m)?;
    let literal = if j == 0 { prec.group_order().unwrap_or(0) } else { kernel_order(n, p, j, m)? };
    Ok(PowerSubgroupReport {
        j,
        powers: count,
        shifted_kernel: shifted,
        literal_kernel: literal,
        matches_shifted: all_deep && count == shifted,
        matches_literal: count == literal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_orders() {
        assert_eq!(kernel_order(1, 3, 1, 2).unwrap(), 3);
        assert_eq!(kernel_order(2, 3, 1, 2).unwrap(), 81);
        assert!(kernel_order(2, 3, 0, 2).is_err());
        assert!(kernel_order(2, 3, 3, 2).is_err());
    }

    #[test]
    fn enumeration_of_small_group() {
        let e = enumerate_group(Precision::new(2, 3, 2).unwrap(), Execution::default()).unwrap();
        assert_eq!(e.group_order, 81 * 48);
        assert_eq!(e.kernel[1], 81);
        assert_eq!(e.kernel[2], 1);
    }

    #[test]
    fn scalar_shift() {
        let r = shift_check(1, 3, 1, 3, 200, 0, Execution::default()).unwrap();
        assert!(r.passed(), "{r}");
        assert!(matches!(shift_check(2, 2, 1, 4, 10, 0, Execution::default()), Err(Error::InvalidParameters(m)) if m.contains("H/H^4")));
        assert!(shift_check(2, 2, 2, 4, 200, 0, Execution::default()).unwrap().passed());
    }

    #[test]
    fn identity_commutes() {
        let prec = Precision::new(2, 3, 3).unwrap();
        let d1 = ModMatrix::diagonal(prec, &[4, 7]).unwrap();
        let d2 = ModMatrix::diagonal(prec, &[2, 5]).unwrap();
        assert!(d1.commutator(&d2).is_identity());
        assert!(abelian_check(2, 3, 3, 200, 0, Execution::default()).unwrap().passed());
        assert!(abelian_negative_control(2, 3, 3, 50, 0).unwrap() > 0);
    }

    #[test]
    fn power_subgroups_follow_shifted_levels() {
        for j in 0..3 {
            let r = power_subgroup_check(2, 3, j, 3, Execution::default()).unwrap();
            assert!(r.matches_shifted, "{r:?}");
        }
        let r = power_subgroup_check(2, 3, 1, 3, Execution::default()).unwrap();
        assert!(!r.matches_literal);
    }

    #[test]
    fn quotient_exponent() {
        assert!(quotient_exponent_check(2, 3, 1, 2, 4, 200, 0, Execution::default()).unwrap().passed());
    }
}
