//! Arithmetic on N ∪ {∞}: valuations, gcds with the ∞ conventions, the
//! transfer equation, and phenotypes of integers relative to a vertex.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::graph::{EdgeId, GbsGraph, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("valuation of zero is undefined")]
    ZeroValuation,
    #[error("gcd of two zeros is undefined")]
    BothZero,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("size must be at least 1")]
    ZeroSize,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no termination after {0} steps")]
    NonTermination(usize),
    #[error("cannot factor {0}: cofactor exceeds 64 bits")]
    TooLarge(String),
    #[error("invalid number {0}")]
    BadNumber(String),
}

/// An element of N ∪ {∞}. Orbit sizes and phenotypes are never zero; zero only
/// appears transiently.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtNat {
    Fin(BigUint),
    Inf,
}

impl ExtNat {
    pub fn one() -> ExtNat {
        ExtNat::Fin(BigUint::one())
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, ExtNat::Inf)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtNat::Fin(n) if n.is_zero())
    }

    pub fn finite(&self) -> Option<&BigUint> {
        match self {
            ExtNat::Fin(n) => Some(n),
            ExtNat::Inf => None,
        }
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.finite().and_then(|n| n.to_u64())
    }

    /// `self` times `|k|`; ∞ stays ∞.
    pub fn mul_int(&self, k: i64) -> ExtNat {
        match self {
            ExtNat::Fin(n) => ExtNat::Fin(n * BigUint::from(k.unsigned_abs())),
            ExtNat::Inf => ExtNat::Inf,
        }
    }
}

impl From<u64> for ExtNat {
    fn from(n: u64) -> ExtNat {
        ExtNat::Fin(BigUint::from(n))
    }
}

impl From<BigUint> for ExtNat {
    fn from(n: BigUint) -> ExtNat {
        ExtNat::Fin(n)
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Fin(n) => write!(f, "{n}"),
            ExtNat::Inf => write!(f, "inf"),
        }
    }
}

impl FromStr for ExtNat {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<ExtNat, ArithError> {
        match s {
            "inf" | "∞" => Ok(ExtNat::Inf),
            _ if !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) => {
                Ok(ExtNat::Fin(s.parse().map_err(|_| ArithError::BadNumber(s.to_string()))?))
            }
            _ => Err(ArithError::BadNumber(s.to_string())),
        }
    }
}

/// p-adic valuation of a nonzero natural number.
pub fn vp(n: &BigUint, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let p = BigUint::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of the absolute value of a nonzero label.
pub fn vp_int(k: i64, p: u64) -> u32 {
    let mut k = k.unsigned_abs();
    let mut v = 0;
    while k != 0 && k % p == 0 {
        k /= p;
        v += 1;
    }
    v
}

/// Valuation in N ∪ {∞}; `None` stands for ∞.
pub fn vp_ext(n: &ExtNat, p: u64) -> Option<u32> {
    n.finite().map(|n| vp(n, p))
}

/// Valuation as an `ExtNat`: `val(∞, p) = ∞`.
pub fn val(n: &ExtNat, p: u64) -> Result<ExtNat, ArithError> {
    if !is_prime(p) {
        return Err(ArithError::NotPrime(p));
    }
    match n {
        ExtNat::Inf => Ok(ExtNat::Inf),
        ExtNat::Fin(m) if m.is_zero() => Err(ArithError::ZeroValuation),
        ExtNat::Fin(m) => Ok(ExtNat::from(vp(m, p) as u64)),
    }
}

/// gcd with `∞ ∧ n = n ∧ ∞ = n` and `∞ ∧ ∞ = ∞`.
pub fn egcd(a: &ExtNat, b: &ExtNat) -> Result<ExtNat, ArithError> {
    match (a, b) {
        (ExtNat::Inf, ExtNat::Inf) => Ok(ExtNat::Inf),
        (ExtNat::Inf, x) | (x, ExtNat::Inf) => Ok(x.clone()),
        (ExtNat::Fin(x), ExtNat::Fin(y)) => {
            if x.is_zero() && y.is_zero() {
                Err(ArithError::BothZero)
            } else {
                Ok(ExtNat::Fin(x.gcd(y)))
            }
        }
    }
}

/// `N ∧ k` for a nonzero label, as a machine integer.
pub fn gcd_label(n: &ExtNat, k: i64) -> u64 {
    let k = k.unsigned_abs();
    match n {
        ExtNat::Inf => k,
        ExtNat::Fin(m) => (m % BigUint::from(k)).to_u64().expect("fits").gcd(&k),
    }
}

/// `N / (N ∧ k)`, with `∞ / (∞ ∧ k) = ∞`.
pub fn quo(n: &ExtNat, k: i64) -> ExtNat {
    match n {
        ExtNat::Inf => ExtNat::Inf,
        ExtNat::Fin(m) => ExtNat::Fin(m / BigUint::from(gcd_label(n, k))),
    }
}

pub fn transfer_ok(n: &ExtNat, k: i64, m: &ExtNat, l: i64) -> bool {
    quo(n, k) == quo(m, l)
}

/// The size `N|l| / (N ∧ k)` used whenever a fresh orbit is attached along
/// an edge labeled `(k, l)`.
pub fn transfer_canonical(n: &ExtNat, k: i64, l: i64) -> ExtNat {
    quo(n, k).mul_int(l)
}

/// All `M` with `N/(N∧k) = M/(M∧l)`, in increasing order.
pub fn transfer_targets(n: &ExtNat, k: i64, l: i64) -> Vec<ExtNat> {
    let q = match quo(n, k) {
        ExtNat::Inf => return vec![ExtNat::Inf],
        ExtNat::Fin(q) => q,
    };
    let l = l.unsigned_abs();
    let mut out: Vec<ExtNat> = divisors(l)
        .into_iter()
        .filter(|&g| q.gcd(&BigUint::from(l / g)).is_one())
        .map(|g| ExtNat::Fin(&q * BigUint::from(g)))
        .collect();
    out.sort();
    out
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

/// The valuation-wise map `|φ(N)|_p = |N|_p + |m|_p - |n|_p` if `|N|_p > |n|_p`,
/// else `0`.
pub fn phi(m: i64, n: i64, big_n: &ExtNat) -> ExtNat {
    let x = match big_n {
        ExtNat::Inf => return ExtNat::Inf,
        ExtNat::Fin(x) => x,
    };
    let mut primes: BTreeSet<u64> = BTreeSet::new();
    primes.extend(small_prime_factors(m.unsigned_abs()));
    primes.extend(small_prime_factors(n.unsigned_abs()));
    let (mut rest, mut out) = (x.clone(), BigUint::one());
    for p in primes {
        let v = vp(x, p);
        rest /= BigUint::from(p).pow(v);
        let (vm, vn) = (vp_int(m, p), vp_int(n, p));
        if v > vn {
            out *= BigUint::from(p).pow(v + vm - vn);
        }
    }
    // primes outside both labels have |m|_p = |n|_p = 0 and keep their power
    ExtNat::Fin(out * rest)
}

/// One step along the oriented edge `d` with the smallest admissible size.
pub fn phi_dir(g: &GbsGraph, d: EdgeId, n: &ExtNat) -> ExtNat {
    phi(g.k_trg(d), g.k_src(d), n)
}

/// Valuation after walking a label chain under the forced rule, checking the
/// precondition `|N1|_p > max_i (Σ_{j≤i} |k_j|_p - Σ_{j<i} |l_j|_p)`.
pub fn propagate(n1: &ExtNat, labels: &[(i64, i64)], p: u64) -> Result<ExtNat, ArithError> {
    let v = match n1 {
        ExtNat::Inf => return Ok(ExtNat::Inf),
        ExtNat::Fin(x) if x.is_zero() => return Err(ArithError::ZeroValuation),
        ExtNat::Fin(x) => vp(x, p) as i64,
    };
    let mut acc = 0i64;
    for &(k, l) in labels {
        let need = acc + vp_int(k, p) as i64;
        if v <= need {
            return Err(ArithError::Precondition(format!(
                "valuation {v} does not exceed partial sum {need}"
            )));
        }
        acc = need - vp_int(l, p) as i64;
    }
    Ok(ExtNat::from((v - acc) as u64))
}

/// Iterates `|N'|_p = |N|_p + |n|_p - |m|_p` if `|N|_p > |m|_p` else `0`, the
/// smallest admissible size one step along an edge labeled `(m, n)`, until
/// `stop` holds. Returns the whole trajectory.
pub fn drain(m: i64, n: i64, start: &ExtNat, stop: impl Fn(&ExtNat) -> bool) -> Result<Vec<ExtNat>, ArithError> {
    if m == 0 || n == 0 {
        return Err(ArithError::ZeroValuation);
    }
    let mut out = vec![start.clone()];
    if start.is_inf() {
        return Ok(out);
    }
    let bound = 64 + 4 * start.finite().map_or(0, |x| x.bits() as usize);
    let mut cur = start.clone();
    while !stop(&cur) {
        if out.len() > bound {
            return Err(ArithError::NonTermination(bound));
        }
        cur = phi(n, m, &cur);
        out.push(cur.clone());
    }
    Ok(out)
}

/// Baumslag-Solitar phenotype: product of `p^{|N|_p}` over primes with
/// `|m|_p = |n|_p` and `|N|_p > |n|_p`.
pub fn phenotype_bs(m: i64, n: i64, big_n: &ExtNat) -> ExtNat {
    let x = match big_n {
        ExtNat::Inf => return ExtNat::Inf,
        ExtNat::Fin(x) => x,
    };
    let mut primes: BTreeSet<u64> = BTreeSet::new();
    primes.extend(small_prime_factors(m.unsigned_abs()));
    primes.extend(small_prime_factors(n.unsigned_abs()));
    let mut out = x.clone();
    for p in primes {
        let v = vp(x, p);
        if vp_int(m, p) != vp_int(n, p) || v <= vp_int(n, p) {
            out /= BigUint::from(p).pow(v);
        }
    }
    ExtNat::Fin(out)
}

/// A finite set of primes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrimeSet(pub BTreeSet<u64>);

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Per-prime threshold data for a label prime at a vertex: `None` when some
/// cycle is unbalanced at `p`, otherwise the largest value of
/// `Σ_{i≤r}|k_i|_p - Σ_{i<r}|l_i|_p` over edge paths based at `v`.
pub fn label_prime_threshold(g: &GbsGraph, v: VertexId, p: u64) -> Option<i64> {
    let pot = potential(g, v, p)?;
    g.oriented_edges()
        .map(|e| vp_int(g.k_src(e), p) as i64 - pot[g.src(e).0])
        .max()
}

/// Offset of the forced valuation at each vertex relative to `v`, if every
/// cycle is balanced at `p`.
fn potential(g: &GbsGraph, v: VertexId, p: u64) -> Option<Vec<i64>> {
    let mut pot: Vec<Option<i64>> = vec![None; g.vertex_count()];
    pot[v.0] = Some(0);
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        let base = pot[u.0].expect("visited");
        for &e in g.out_edges(u) {
            let w = g.trg(e);
            let value = base - vp_int(g.k_src(e), p) as i64 + vp_int(g.k_trg(e), p) as i64;
            match pot[w.0] {
                None => {
                    pot[w.0] = Some(value);
                    stack.push(w);
                }
                Some(x) if x != value => return None,
                Some(_) => {}
            }
        }
    }
    Some(pot.into_iter().map(|x| x.expect("connected")).collect())
}

/// True when the label prime `p` belongs to the phenotype prime set of an
/// integer of valuation `v` at vertex `at`.
pub fn label_prime_survives(g: &GbsGraph, at: VertexId, p: u64, v: u32) -> bool {
    match label_prime_threshold(g, at, p) {
        None => false,
        Some(t) => (v as i64) > t,
    }
}

/// Phenotype `Ph_{H,v}(N)`.
pub fn phenotype(g: &GbsGraph, v: VertexId, n: &ExtNat) -> ExtNat {
    let x = match n {
        ExtNat::Inf => return ExtNat::Inf,
        ExtNat::Fin(x) => x,
    };
    let mut out = x.clone();
    for p in g.label_primes() {
        let e = vp(x, p);
        if e > 0 && !label_prime_survives(g, v, p, e) {
            out /= BigUint::from(p).pow(e);
        }
    }
    ExtNat::Fin(out)
}

/// Phenotype prime set: primes dividing `N` that pass both conditions.
pub fn phenotype_set(g: &GbsGraph, v: VertexId, n: &ExtNat) -> Result<PrimeSet, ArithError> {
    let ph = phenotype(g, v, n);
    match ph {
        ExtNat::Inf => Err(ArithError::Precondition("the prime set of ∞ is not used".into())),
        ExtNat::Fin(x) => Ok(PrimeSet(prime_factors_big(&x)?.into_iter().collect())),
    }
}

/// Exhaustive check of both conditions over reduced paths with distinct
/// sources and over simple cycles.
pub fn phenotype_set_oracle(g: &GbsGraph, v: VertexId, n: &ExtNat) -> Result<PrimeSet, ArithError> {
    let x = match n {
        ExtNat::Inf => return Err(ArithError::Precondition("the prime set of ∞ is not used".into())),
        ExtNat::Fin(x) => x,
    };
    let paths = g.open_paths_from(v);
    let cycles = g.simple_cycles();
    let mut out = BTreeSet::new();
    for p in prime_factors_big(x)? {
        let vn = vp(x, p) as i64;
        let ok_paths = paths.iter().all(|c| {
            let ks: i64 = c.iter().map(|&e| vp_int(g.k_src(e), p) as i64).sum();
            let ls: i64 = c[..c.len() - 1].iter().map(|&e| vp_int(g.k_trg(e), p) as i64).sum();
            vn > ks - ls
        });
        let ok_cycles = cycles.iter().all(|c| {
            let ks: u32 = c.iter().map(|&e| vp_int(g.k_src(e), p)).sum();
            let ls: u32 = c.iter().map(|&e| vp_int(g.k_trg(e), p)).sum();
            ks == ls
        });
        if ok_paths && ok_cycles {
            out.insert(p);
        }
    }
    Ok(PrimeSet(out))
}

/// Phenotype computed from [`phenotype_set_oracle`].
pub fn phenotype_oracle(g: &GbsGraph, v: VertexId, n: &ExtNat) -> Result<ExtNat, ArithError> {
    let x = match n {
        ExtNat::Inf => return Ok(ExtNat::Inf),
        ExtNat::Fin(x) => x,
    };
    let set = phenotype_set_oracle(g, v, n)?;
    let mut out = BigUint::one();
    for p in set.0 {
        out *= BigUint::from(p).pow(vp(x, p));
    }
    Ok(ExtNat::Fin(out))
}

/// `N` is its own phenotype (or is ∞).
pub fn is_attained(g: &GbsGraph, v: VertexId, n: &ExtNat) -> bool {
    phenotype(g, v, n) == *n
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // deterministic witness set for 64-bit integers
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Distinct prime factors of `n`, in increasing order.
pub fn small_prime_factors(n: u64) -> Vec<u64> {
    let mut out = BTreeSet::new();
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m <= 1 {
            continue;
        }
        let mut m = m;
        for p in [2u64, 3, 5, 7, 11, 13] {
            while m % p == 0 {
                out.insert(p);
                m /= p;
            }
        }
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            out.insert(m);
        } else {
            let d = pollard_rho(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    out.into_iter().collect()
}

/// Distinct prime factors of a big natural number; trial division by small
/// primes first, the cofactor must then fit in 64 bits.
pub fn prime_factors_big(n: &BigUint) -> Result<Vec<u64>, ArithError> {
    let mut out = BTreeSet::new();
    let mut m = n.clone();
    let mut p = 2u64;
    while p < 10_000 && m.bits() > 64 {
        let bp = BigUint::from(p);
        if (&m % &bp).is_zero() {
            out.insert(p);
            while (&m % &bp).is_zero() {
                m /= &bp;
            }
        }
        p += 1;
    }
    let rest = m.to_u64().ok_or_else(|| ArithError::TooLarge(n.to_string()))?;
    out.extend(small_prime_factors(rest));
    Ok(out.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn n(x: u64) -> ExtNat {
        ExtNat::from(x)
    }

    #[test]
    fn valuations() {
        assert_eq!(val(&n(12), 2).unwrap(), n(2));
        assert_eq!(val(&ExtNat::Inf, 7).unwrap(), ExtNat::Inf);
        assert_eq!(vp_int(-18, 3), 2);
        assert_eq!(val(&n(0), 2), Err(ArithError::ZeroValuation));
    }

    #[test]
    fn gcds() {
        assert_eq!(egcd(&ExtNat::Inf, &n(6)).unwrap(), n(6));
        assert_eq!(egcd(&n(4), &n(6)).unwrap(), n(2));
        assert_eq!(egcd(&ExtNat::Inf, &ExtNat::Inf).unwrap(), ExtNat::Inf);
        assert_eq!(egcd(&n(0), &n(0)), Err(ArithError::BothZero));
    }

    #[test]
    fn transfer() {
        assert!(transfer_ok(&n(4), 2, &n(2), 3));
        assert!(transfer_ok(&n(4), 2, &n(6), 3));
        assert!(!transfer_ok(&n(4), 2, &n(3), 3));
        assert_eq!(transfer_targets(&n(4), 2, 3), vec![n(2), n(6)]);
        assert_eq!(transfer_targets(&ExtNat::Inf, 2, 3), vec![ExtNat::Inf]);
        assert_eq!(transfer_targets(&n(1), 5, 5), vec![n(1), n(5)]);
    }

    #[test]
    fn transfer_targets_match_brute_force() {
        for big_n in 1..40u64 {
            for k in [-6i64, -2, 1, 2, 3, 4, 9] {
                for l in [-4i64, 1, 2, 3, 6] {
                    let brute: Vec<ExtNat> =
                        (1..=400u64).map(n).filter(|m| transfer_ok(&n(big_n), k, m, l)).collect();
                    assert_eq!(transfer_targets(&n(big_n), k, l), brute, "N={big_n} k={k} l={l}");
                }
            }
        }
    }

    #[test]
    fn phenotype_examples() {
        let lp = GbsGraph::loop_graph(2, 3).unwrap();
        let seg = GbsGraph::segment(2, 3).unwrap();
        let v = VertexId(0);
        assert!(phenotype_set(&lp, v, &n(12)).unwrap().0.is_empty());
        assert_eq!(phenotype_set(&lp, v, &n(5)).unwrap().0, BTreeSet::from([5]));
        assert_eq!(phenotype_set(&seg, v, &n(12)).unwrap().0, BTreeSet::from([2, 3]));
        assert_eq!(phenotype(&lp, v, &n(12)), n(1));
        assert_eq!(phenotype(&seg, v, &n(12)), n(12));
        assert_eq!(phenotype(&seg, v, &ExtNat::Inf), ExtNat::Inf);
        for g in [&lp, &seg] {
            for x in 1..200 {
                assert_eq!(
                    phenotype_set(g, v, &n(x)).unwrap(),
                    phenotype_set_oracle(g, v, &n(x)).unwrap()
                );
            }
        }
    }

    #[test]
    fn bs_phenotype_examples() {
        assert_eq!(phenotype_bs(2, 3, &n(12)), n(1));
        assert_eq!(phenotype_bs(2, 2, &n(8)), n(8));
        assert_eq!(phenotype_bs(2, 3, &ExtNat::Inf), ExtNat::Inf);
    }

    #[test]
    fn attained() {
        let lp = GbsGraph::loop_graph(2, 3).unwrap();
        assert!(is_attained(&lp, VertexId(0), &n(5)));
        assert!(!is_attained(&lp, VertexId(0), &n(12)));
        assert!(is_attained(&lp, VertexId(0), &n(1)));
    }

    #[test]
    fn phi_examples() {
        // valuation by valuation: |4|_2 = 2 > |2|_2 = 1 gives 2^{2+0-1}; no other prime divides 4
        assert_eq!(phi(3, 2, &n(4)), n(2));
        assert_eq!(phi(7, 9, &n(1)), n(1));
        assert_eq!(phi(2, 3, &ExtNat::Inf), ExtNat::Inf);
    }

    #[test]
    fn propagate_examples() {
        assert_eq!(propagate(&n(8), &[(2, 3)], 2).unwrap(), n(2));
        assert_eq!(propagate(&n(8), &[], 2).unwrap(), n(3));
        assert_eq!(propagate(&n(32), &[(2, 2), (2, 2)], 2).unwrap(), n(5));
        assert!(propagate(&n(2), &[(2, 3)], 2).is_err());
    }

    #[test]
    fn drain_examples() {
        assert_eq!(drain(2, 3, &n(1), |x| *x == n(1)).unwrap(), vec![n(1)]);
        let v2_zero = |x: &ExtNat| vp_ext(x, 2) == Some(0);
        let v3_zero = |x: &ExtNat| vp_ext(x, 3) == Some(0);
        let first = drain(2, 3, &n(12), v2_zero).unwrap();
        assert_eq!(first, vec![n(12), n(18), n(27)]);
        let second = drain(3, 2, first.last().unwrap(), v3_zero).unwrap();
        assert_eq!(second, vec![n(27), n(9), n(3), n(1)]);
        assert_eq!(*second.last().unwrap(), phenotype_bs(2, 3, &n(12)));
        assert_eq!(drain(2, 3, &ExtNat::Inf, v2_zero).unwrap(), vec![ExtNat::Inf]);
    }

    #[test]
    fn factoring() {
        assert_eq!(small_prime_factors(360), vec![2, 3, 5]);
        assert_eq!(small_prime_factors(1_000_000_007 * 998_244_353), vec![998_244_353, 1_000_000_007]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1));
    }

    proptest! {
        #[test]
        fn loop_phenotype_is_bs_phenotype(m in -30i64..=30, k in -30i64..=30, x in 1u64..=10_000) {
            prop_assume!(m != 0 && k != 0);
            let g = GbsGraph::loop_graph(m, k).unwrap();
            prop_assert_eq!(phenotype(&g, VertexId(0), &n(x)), phenotype_bs(k, m, &n(x)));
        }

        #[test]
        fn phenotype_idempotent_and_divides(x in 1u64..100_000, k in 2i64..12, l in 2i64..12, m in 2i64..12) {
            let g = GbsGraph::from_labels(2, &[(0, 1, k, l), (1, 1, m, 6)]).unwrap();
            for v in g.vertices() {
                let ph = phenotype(&g, v, &n(x));
                prop_assert_eq!(phenotype(&g, v, &ph), ph.clone());
                let p = ph.to_u64().unwrap();
                prop_assert_eq!(x % p, 0);
                prop_assert_eq!(phenotype_set(&g, v, &n(x)).unwrap(), phenotype_set_oracle(&g, v, &n(x)).unwrap());
            }
        }
    }
}
