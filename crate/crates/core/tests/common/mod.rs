//! Independent numeric oracles for the integration suites. Nothing here
//! calls into the entropy code under test.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub const LOG_PHI: f64 = 0.481_211_825_059_603_4;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Characteristic polynomial `det(xI - M)` by Faddeev-LeVerrier, coefficients
/// from the leading one down: `[1, c_1, ..., c_n]`.
pub fn charpoly(m: &[Vec<u64>]) -> Vec<BigRational> {
    let n = m.len();
    let a: Vec<Vec<BigRational>> = m.iter().map(|r| r.iter().map(|&x| q(x as i64)).collect()).collect();
    let mul = |x: &Vec<Vec<BigRational>>, y: &Vec<Vec<BigRational>>| -> Vec<Vec<BigRational>> {
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).fold(BigRational::zero(), |s, k| s + &x[i][k] * &y[k][j])).collect())
            .collect()
    };
    let mut coeffs = vec![BigRational::one()];
    let mut mk = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{k-1} I,  c_k = -tr(A M_k) / k
        let c_prev = coeffs[k - 1].clone();
        for (i, row) in mk.iter_mut().enumerate() {
            row[i] += &c_prev;
        }
        let am = mul(&a, &mk);
        let tr = (0..n).fold(BigRational::zero(), |s, i| s + &am[i][i]);
        coeffs.push(-tr / q(k as i64));
        mk = am;
    }
    coeffs
}

fn derivative(p: &[BigRational]) -> Vec<BigRational> {
    let n = p.len() - 1;
    p[..n].iter().enumerate().map(|(i, c)| c * q((n - i) as i64)).collect()
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.len() > 1 && p[0].is_zero() {
        p.remove(0);
    }
    p
}

fn remainder(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    while r.len() >= b.len() && !(r.len() == 1 && r[0].is_zero()) {
        let f = &r[0] / &b[0];
        for (i, c) in b.iter().enumerate() {
            r[i] = &r[i] - &f * c;
        }
        r.remove(0);
        r = trim(r);
        if r.iter().all(Zero::is_zero) {
            return vec![BigRational::zero()];
        }
    }
    r
}

fn quotient(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let mut out = Vec::new();
    while r.len() >= b.len() {
        let f = &r[0] / &b[0];
        for (i, c) in b.iter().enumerate() {
            r[i] = &r[i] - &f * c;
        }
        r.remove(0);
        out.push(f);
    }
    out
}

// Positive rescaling to a primitive integer polynomial; signs are unchanged.
fn primitive(p: Vec<BigRational>) -> Vec<BigRational> {
    use num_integer::Integer;
    let lcm = p.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let ints: Vec<BigInt> = p.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if g.is_zero() {
        return p;
    }
    ints.into_iter().map(|c| BigRational::from_integer(c / &g)).collect()
}

fn sturm_chain(p: &[BigRational]) -> Vec<Vec<BigRational>> {
    let mut chain = vec![primitive(p.to_vec()), primitive(derivative(p))];
    loop {
        let n = chain.len();
        if chain[n - 1].len() <= 1 {
            break;
        }
        let r = remainder(&chain[n - 2], &chain[n - 1]);
        if r.iter().all(Zero::is_zero) {
            break;
        }
        chain.push(primitive(r.into_iter().map(|c| -c).collect()));
    }
    chain
}

// Sign of an integer-coefficient polynomial at the dyadic point n / 2^k:
// the sign of sum c_i n^(deg-i) 2^(k i).
fn sign_at(p: &[BigRational], n: &BigInt, k: usize) -> i8 {
    let scale = BigInt::one() << k;
    let mut value = BigInt::zero();
    let mut pw = BigInt::one();
    let deg = p.len() - 1;
    let mut npow = vec![BigInt::one(); deg + 1];
    for i in 1..=deg {
        npow[i] = &npow[i - 1] * n;
    }
    for (i, c) in p.iter().enumerate() {
        value += c.to_integer() * &npow[deg - i] * &pw;
        pw *= &scale;
    }
    match value.sign() {
        num_bigint::Sign::Plus => 1,
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
    }
}

fn sign_changes(chain: &[Vec<BigRational>], n: &BigInt, k: usize) -> usize {
    let signs: Vec<i8> = chain.iter().map(|p| sign_at(p, n, k)).filter(|&s| s != 0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Largest real root of a polynomial with at least one real root, isolated
/// exactly with a Sturm chain (distinct roots in `(a, b]` = `V(a) - V(b)`)
/// and refined by bisection over dyadic rationals.
pub fn largest_real_root(p: &[BigRational]) -> f64 {
    // The last chain element is gcd(p, p'); dividing it out leaves the
    // square-free part, whose chain has no common zero.
    let full = sturm_chain(p);
    let square_free = quotient(p, full.last().expect("nonempty chain"));
    let chain = sturm_chain(&square_free);
    let bound = cauchy_bound(p).ceil().to_integer();
    let (mut lo, mut hi, mut k) = (-bound.clone(), bound, 0usize);
    let at_hi = sign_changes(&chain, &hi, k);
    for _ in 0..56 {
        let mid = &lo + &hi;
        k += 1;
        if sign_changes(&chain, &mid, k) > at_hi {
            lo = mid;
            hi *= 2;
        } else {
            hi = mid;
            lo *= 2;
        }
    }
    let x = BigRational::new(lo + hi, BigInt::one() << (k + 1));
    x.to_f64().unwrap()
}

fn cauchy_bound(p: &[BigRational]) -> BigRational {
    p[1..].iter().map(|c| (c / &p[0]).abs()).fold(BigRational::zero(), |a, b| if b > a { b } else { a }) + q(1)
}

/// `log` of the spectral radius of a nonnegative integer matrix, clamped at 0.
pub fn log_spectral_radius(m: &[Vec<u64>]) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    largest_real_root(&charpoly(m)).max(1.0).ln()
}

/// Plain bisection for a sign change of `f` on `[lo, hi]`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    assert!(f(lo) * f(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
