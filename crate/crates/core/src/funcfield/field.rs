//! Coefficient fields: prime fields F_p and the rationals.

use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A field given by an explicit context value. Elements carry no reference to
/// the context, so the same element type can serve many primes at once.
pub trait Field: Clone + fmt::Debug + PartialEq + Send + Sync {
    type Elem: Clone + PartialEq + Eq + Hash + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn from_bigint(&self, v: &BigInt) -> Self::Elem;
    /// 0 for the rationals.
    fn characteristic(&self) -> u64;
    /// Canonical decimal rendering used by the polynomial printer.
    fn render(&self, a: &Self::Elem) -> String;
    /// True when `render` may produce a leading minus sign or a fraction,
    /// so the printer has to parenthesize.
    fn is_negative(&self, _a: &Self::Elem) -> bool {
        false
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }
}

/// The prime field F_p; `p` must be prime and below 2^63.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    p: u64,
}

impl Fp {
    /// Panics if `p` is not prime.
    pub fn new(p: u64) -> Self {
        assert!(is_prime_u64(p), "{p} is not prime");
        assert!(p < (1 << 63), "prime too large");
        Fp { p }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn reduce_i128(&self, v: i128) -> u64 {
        v.rem_euclid(self.p as i128) as u64
    }

    pub fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// A generator of the cyclic group F_p^*.
    pub fn primitive_root(&self) -> u64 {
        if self.p == 2 {
            return 1;
        }
        let order = self.p - 1;
        let primes = prime_factors_u64(order);
        (2..self.p)
            .find(|&g| primes.iter().all(|&q| self.pow(g, order / q) != 1))
            .expect("F_p^* is cyclic")
    }

    /// Discrete logarithm of `a` to base `g` by baby-step giant-step.
    pub fn discrete_log(&self, g: u64, a: u64) -> u64 {
        assert!(a % self.p != 0, "discrete log of zero");
        let n = self.p - 1;
        let m = (n as f64).sqrt().ceil() as u64 + 1;
        let mut table = std::collections::HashMap::with_capacity(m as usize);
        let mut e = 1u64;
        for j in 0..m {
            table.entry(e).or_insert(j);
            e = self.mul(&e, &g);
        }
        let factor = self.inv(&self.pow(g, m)).expect("nonzero");
        let mut gamma = a % self.p;
        for i in 0..=m {
            if let Some(&j) = table.get(&gamma) {
                return (i * m + j) % n.max(1);
            }
            gamma = self.mul(&gamma, &factor);
        }
        unreachable!("g is a primitive root")
    }
}

impl Field for Fp {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        // extended Euclid on (a, p)
        let (mut r0, mut r1) = (self.p as i128, *a as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        Some(self.reduce_i128(s0))
    }
    #[inline]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn from_i64(&self, v: i64) -> u64 {
        self.reduce_i128(v as i128)
    }
    fn from_bigint(&self, v: &BigInt) -> u64 {
        let p = BigInt::from(self.p);
        let r = ((v % &p) + &p) % &p;
        u64::try_from(r).expect("residue fits")
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn render(&self, a: &u64) -> String {
        a.to_string()
    }
}

/// The rationals, with elements as reduced big fractions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_bigint(&self, v: &BigInt) -> BigRational {
        BigRational::from_integer(v.clone())
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn render(&self, a: &BigRational) -> String {
        a.to_string()
    }
    fn is_negative(&self, a: &BigRational) -> bool {
        a.is_negative() || !a.is_integer()
    }
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % small == 0 {
            return n == small;
        }
    }
    // deterministic Miller-Rabin for 64-bit inputs
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Distinct prime factors in increasing order, by trial division.
pub fn prime_factors_u64(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2u64;
    while q * q <= n {
        if n % q == 0 {
            out.push(q);
            while n % q == 0 {
                n /= q;
            }
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// If `q` is a power p^e of a prime with e ≥ 1, returns (p, e).
pub fn prime_power(q: &BigInt) -> Option<(u64, u32)> {
    if q <= &BigInt::one() {
        return None;
    }
    for e in (1..=q.bits() as u32).rev() {
        let r = q.nth_root(e);
        if num_traits::pow(r.clone(), e as usize) == *q {
            if let Ok(v) = u64::try_from(&r) {
                if is_prime_u64(v) {
                    return Some((v, e));
                }
            }
        }
    }
    None
}
