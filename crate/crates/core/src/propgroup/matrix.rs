use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rational::is_prime;

/// Largest modulus `p^m` accepted; products of two residues stay in `u64`.
pub const MAX_MODULUS: u64 = 1 << 31;

/// Shape of a truncated matrix group `GL_n(Z/p^m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Precision {
    pub n: usize,
    pub p: u64,
    pub m: u32,
}

impl Precision {
    pub fn new(n: usize, p: u64, m: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameters("matrix size n must be positive".into()));
        }
        if !is_prime(p) {
            return Err(Error::InvalidParameters(format!("p = {p} is not prime")));
        }
        if m == 0 {
            return Err(Error::InvalidParameters("precision m must be positive".into()));
        }
        match p.checked_pow(m) {
            Some(q) if q <= MAX_MODULUS => Ok(Precision { n, p, m }),
            _ => Err(Error::InvalidParameters(format!("modulus {p}^{m} exceeds 2^31"))),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.m)
    }

    pub fn entries(&self) -> usize {
        self.n * self.n
    }

    /// `q^{n^2}`, the number of all `n x n` matrices mod `q`, if it fits.
    pub fn matrix_count(&self) -> Option<u64> {
        self.modulus().checked_pow(self.entries() as u32)
    }

    /// `|GL_n(Z/p^m)| = p^{n^2 (m-1)} |GL_n(F_p)|`.
    pub fn group_order(&self) -> Option<u64> {
        let n = self.n as u32;
        let mut gl = 1u64;
        for k in 0..n {
            gl = gl.checked_mul(self.p.checked_pow(n)?.checked_sub(self.p.checked_pow(k)?)?)?;
        }
        gl.checked_mul(self.p.checked_pow(n * n * (self.m - 1))?)
    }
}

/// An `n x n` matrix with entries mod `p^m` and unit determinant.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModMatrix {
    prec: Precision,
    entries: Vec<u64>,
}

impl ModMatrix {
    /// Reduces `entries` (row-major) and checks the determinant.
    pub fn new(prec: Precision, entries: Vec<i64>) -> Result<Self> {
        if entries.len() != prec.entries() {
            return Err(Error::InvalidParameters(format!(
                "expected {} entries, got {}",
                prec.entries(),
                entries.len()
            )));
        }
        let q = prec.modulus() as i64;
        let entries = entries.iter().map(|x| x.rem_euclid(q) as u64).collect();
        let x = ModMatrix { prec, entries };
        if x.det().is_multiple_of(prec.p) {
            return Err(Error::InvalidParameters(format!("matrix {x} is not invertible mod {}", prec.p)));
        }
        Ok(x)
    }

    /// Trusted constructor for already reduced, invertible entries.
    pub(crate) fn from_raw(prec: Precision, entries: Vec<u64>) -> Self {
        ModMatrix { prec, entries }
    }

    pub fn identity(prec: Precision) -> Self {
        let n = prec.n;
        let entries = (0..n * n).map(|k| u64::from(k / n == k % n)).collect();
        ModMatrix { prec, entries }
    }

    /// `I + a E_{row,col}`.
    pub fn elementary(prec: Precision, row: usize, col: usize, a: i64) -> Result<Self> {
        let mut e: Vec<i64> = ModMatrix::identity(prec).entries.iter().map(|&x| x as i64).collect();
        e[row * prec.n + col] += a;
        ModMatrix::new(prec, e)
    }

    pub fn diagonal(prec: Precision, diag: &[i64]) -> Result<Self> {
        let n = prec.n;
        let mut e = vec![0i64; n * n];
        for (k, d) in diag.iter().enumerate() {
            e[k * n + k] = *d;
        }
        ModMatrix::new(prec, e)
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.entries[r * self.prec.n + c]
    }

    pub fn mul(&self, other: &ModMatrix) -> ModMatrix {
        let n = self.prec.n;
        let q = self.prec.modulus();
        let mut out = vec![0u64; n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.entries[r * n + k];
                if a == 0 {
                    continue;
                }
                for c in 0..n {
                    out[r * n + c] = (out[r * n + c] + a * other.entries[k * n + c]) % q;
                }
            }
        }
        ModMatrix { prec: self.prec, entries: out }
    }

    pub fn pow(&self, mut e: u64) -> ModMatrix {
        let mut base = self.clone();
        let mut acc = ModMatrix::identity(self.prec);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Gauss-Jordan inverse mod `p^m`.
    pub fn inverse(&self) -> ModMatrix {
        let n = self.prec.n;
        let q = self.prec.modulus() as i128;
        let p = self.prec.p as i128;
        let mut a: Vec<i128> = self.entries.iter().map(|&x| x as i128).collect();
        let mut inv: Vec<i128> = ModMatrix::identity(self.prec).entries.iter().map(|&x| x as i128).collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| a[r * n + col] % p != 0).expect("unit determinant");
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
                inv.swap(col * n + k, pivot * n + k);
            }
            let s = mod_inverse(a[col * n + col], q);
            for k in 0..n {
                a[col * n + k] = a[col * n + k] * s % q;
                inv[col * n + k] = inv[col * n + k] * s % q;
            }
            for r in 0..n {
                let f = a[r * n + col];
                if r != col && f != 0 {
                    for k in 0..n {
                        a[r * n + k] = (a[r * n + k] - f * a[col * n + k]).rem_euclid(q);
                        inv[r * n + k] = (inv[r * n + k] - f * inv[col * n + k]).rem_euclid(q);
                    }
                }
            }
        }
        ModMatrix { prec: self.prec, entries: inv.into_iter().map(|x| x as u64).collect() }
    }

    /// `X Y X^{-1} Y^{-1}`.
    pub fn commutator(&self, other: &ModMatrix) -> ModMatrix {
        self.mul(other).mul(&self.inverse()).mul(&other.inverse())
    }

    /// Determinant mod `p^m`.
    pub fn det(&self) -> u64 {
        det_mod(&self.entries, self.prec.n, self.prec.modulus())
    }

    /// Largest `i <= m` with `X = I mod p^i`.
    pub fn level(&self) -> u32 {
        level_of(&self.entries, self.prec)
    }

    pub fn is_identity(&self) -> bool {
        self.level() == self.prec.m
    }

    /// Mixed-radix code in `[0, q^{n^2})`.
    pub fn encode(&self) -> u64 {
        let q = self.prec.modulus();
        self.entries.iter().fold(0u64, |acc, &x| acc * q + x)
    }

    pub fn decode(prec: Precision, mut code: u64) -> ModMatrix {
        let q = prec.modulus();
        let mut entries = vec![0u64; prec.entries()];
        for slot in entries.iter_mut().rev() {
            *slot = code % q;
            code /= q;
        }
        ModMatrix { prec, entries }
    }

    /// `I + p^i A` for uniformly random `A`; an element of the level-`i` kernel.
    pub fn random_kernel<R: Rng>(prec: Precision, i: u32, rng: &mut R) -> ModMatrix {
        let q = prec.modulus();
        let step = prec.p.pow(i.min(prec.m));
        let mut x = ModMatrix::identity(prec);
        for e in x.entries.iter_mut() {
            *e = (*e + step * rng.gen_range(0..q)) % q;
        }
        x
    }

    /// Uniformly random element of `GL_n(Z/p^m)` by rejection.
    pub fn random_invertible<R: Rng>(prec: Precision, rng: &mut R) -> ModMatrix {
        let q = prec.modulus();
        loop {
            let entries: Vec<u64> = (0..prec.entries()).map(|_| rng.gen_range(0..q)).collect();
            if det_mod(&entries, prec.n, prec.p) != 0 {
                return ModMatrix { prec, entries };
            }
        }
    }

    /// `A` with `X = I + p^i A`, reduced mod `p^r`. Requires `level() >= i`.
    pub fn kernel_coordinates(&self, i: u32, r: u32) -> Vec<u64> {
        let pi = self.prec.p.pow(i);
        let pr = self.prec.p.pow(r);
        let q = self.prec.modulus();
        let id = ModMatrix::identity(self.prec);
        self.entries
            .iter()
            .zip(&id.entries)
            .map(|(&x, &e)| ((x + q - e) % q / pi) % pr)
            .collect()
    }
}

pub(crate) fn level_of(entries: &[u64], prec: Precision) -> u32 {
    let n = prec.n;
    let mut level = prec.m;
    for (k, &x) in entries.iter().enumerate() {
        let d = if k / n == k % n { (x + prec.modulus() - 1) % prec.modulus() } else { x };
        if d != 0 {
            let mut v = 0;
            let mut d = d;
            while d % prec.p == 0 {
                d /= prec.p;
                v += 1;
            }
            level = level.min(v);
            if level == 0 {
                break;
            }
        }
    }
    level
}

fn mod_inverse(a: i128, q: i128) -> i128 {
    let (mut r0, mut r1) = (a.rem_euclid(q), q);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let t = r0 / r1;
        (r0, r1) = (r1, r0 - t * r1);
        (s0, s1) = (s1, s0 - t * s1);
    }
    s0.rem_euclid(q)
}

/// Determinant of a row-major `n x n` matrix mod `q` by Laplace expansion.
pub(crate) fn det_mod(e: &[u64], n: usize, q: u64) -> u64 {
    let m = |r: usize, c: usize| e[r * n + c] as u128;
    let q128 = q as u128;
    let v = match n {
        1 => m(0, 0) % q128,
        2 => (m(0, 0) * m(1, 1) + q128 * q128 - (m(0, 1) * m(1, 0)) % (q128 * q128)) % q128,
        _ => {
            let mut acc: u128 = 0;
            for c in 0..n {
                let minor: Vec<u64> = (1..n)
                    .flat_map(|r| (0..n).filter(move |&k| k != c).map(move |k| (r, k)))
                    .map(|(r, k)| e[r * n + k])
                    .collect();
                let term = m(0, c) % q128 * det_mod(&minor, n - 1, q) as u128 % q128;
                if c % 2 == 0 {
                    acc = (acc + term) % q128;
                } else {
                    acc = (acc + q128 - term) % q128;
                }
            }
            acc
        }
    };
    v as u64
}

impl fmt::Display for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.prec.n;
        write!(f, "[")?;
        for r in 0..n {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = (0..n).map(|c| self.get(r, c).to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "] mod {}^{}", self.prec.p, self.prec.m)
    }
}

impl fmt::Debug for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
