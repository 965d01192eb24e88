//! Linear congruential maps `x -> (a*x + b) mod p` used as injective encodings
//! of global trades.
//!
//! `p` is the smallest prime `>= n`, so the map is a bijection on `Z_p` and
//! its restriction to `0..n` leaves exactly `p - n` gaps in the image. The
//! *sorted rank-map* sends a rank `r` to the `r`-th smallest image value; its
//! shift `value - rank` is non-decreasing in the rank, which lets a known pair
//! of anchors bracket the rank of any value between them.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

/// Largest prime below 2^32; keeps `a * x` inside `u64`.
const MAX_MODULUS: u64 = 4_294_967_291;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin, exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n % w == 0 {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &w in &WITNESSES {
        let mut x = pow_mod(w, d, n);
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

pub fn smallest_prime_geq(n: u64) -> u64 {
    let mut p = n.max(2);
    while !is_prime(p) {
        p += 1;
    }
    p
}

/// Inverse of `a` modulo prime `p` via extended Euclid.
fn mod_inverse(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (i128::from(p), i128::from(a));
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1);
    t0.rem_euclid(i128::from(p)) as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LcgMap {
    a: u64,
    b: u64,
    p: u64,
    n: u64,
    a_inv: u64,
}

impl LcgMap {
    /// `p` is derived as the smallest prime `>= n`.
    pub fn new(a: u64, b: u64, n: u64) -> Result<Self> {
        if n < 1 {
            return Err(Error::invalid("LCG domain must be non-empty"));
        }
        let p = smallest_prime_geq(n);
        Self::with_modulus(a, b, p, n)
    }

    pub fn with_modulus(a: u64, b: u64, p: u64, n: u64) -> Result<Self> {
        if p > MAX_MODULUS || !is_prime(p) || p < n {
            return Err(Error::invalid(format!("modulus {p} must be a prime >= n = {n}")));
        }
        if a == 0 || a >= p || b >= p {
            return Err(Error::invalid(format!("need 1 <= a < p and b < p, got a={a} b={b} p={p}")));
        }
        Ok(LcgMap {
            a,
            b,
            p,
            n,
            a_inv: mod_inverse(a, p),
        })
    }

    /// Draws `a` uniformly from `[1, p)` and `b` from `[0, p)`.
    pub fn sample<R: Rng + ?Sized>(n: u64, rng: &mut R) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("global trades need n >= 2"));
        }
        let p = smallest_prime_geq(n);
        let a = rng.random_range(1..p);
        let b = rng.random_range(0..p);
        Self::with_modulus(a, b, p, n)
    }

    pub fn identity(n: u64) -> Result<Self> {
        Self::new(1, 0, n)
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn domain(&self) -> u64 {
        self.n
    }

    pub fn gaps(&self) -> u64 {
        self.p - self.n
    }

    #[inline]
    pub fn eval(&self, x: u64) -> u64 {
        debug_assert!(x < self.p);
        (self.a * x + self.b) % self.p
    }

    #[inline]
    pub fn invert(&self, y: u64) -> u64 {
        debug_assert!(y < self.p);
        let shifted = (y + self.p - self.b) % self.p;
        (self.a_inv * shifted) % self.p
    }

    /// Image values of `0..n` in ascending order, i.e. the sorted rank-map.
    pub fn sorted_image(&self) -> Vec<u64> {
        let mut hit = vec![false; self.p as usize];
        for x in 0..self.n {
            hit[self.eval(x) as usize] = true;
        }
        (0..self.p).filter(|&y| hit[y as usize]).collect()
    }

    /// Domain elements ordered by their image value.
    pub fn nodes_by_rank(&self) -> Vec<u64> {
        let mut slot = vec![u64::MAX; self.p as usize];
        for x in 0..self.n {
            slot[self.eval(x) as usize] = x;
        }
        slot.into_iter().filter(|&x| x != u64::MAX).collect()
    }
}

impl fmt::Display for LcgMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.a, self.b, self.p, self.n)
    }
}

impl FromStr for LcgMap {
    type Err = Error;

    /// Parses the `a b p n` tuple written by `Display`.
    fn from_str(s: &str) -> Result<Self> {
        let nums: Vec<u64> = s
            .split_whitespace()
            .map(|t| t.parse::<u64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::invalid(format!("LCG tuple {s:?}: {e}")))?;
        match nums[..] {
            [a, b, p, n] => Self::with_modulus(a, b, p, n),
            _ => Err(Error::invalid(format!("LCG tuple {s:?} needs 4 fields"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankBounds {
    pub lower: u64,
    pub upper: u64,
}

impl RankBounds {
    pub fn contains(&self, rank: u64) -> bool {
        self.lower <= rank && rank <= self.upper
    }

    pub fn width(&self) -> u64 {
        self.upper - self.lower
    }
}

/// A known point of the sorted rank-map: `value = rank + shift`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Anchor {
    pub rank: u64,
    pub shift: u64,
}

impl Anchor {
    pub fn new(rank: u64, value: u64) -> Self {
        debug_assert!(value >= rank);
        Anchor {
            rank,
            shift: value - rank,
        }
    }

    pub fn value(&self) -> u64 {
        self.rank + self.shift
    }
}

/// Brackets the rank of image value `y` lying between two anchors.
pub fn rank_bounds(y: u64, low: Anchor, high: Anchor) -> Result<RankBounds> {
    if low.value() > y || y > high.value() || low.rank > high.rank || low.shift > high.shift {
        return Err(Error::invalid(format!(
            "value {y} not bracketed by anchors {low:?} and {high:?}"
        )));
    }
    let lower = y.saturating_sub(high.shift).max(low.rank);
    let upper = (y - low.shift).min(high.rank);
    Ok(RankBounds { lower, upper })
}

/// A contiguous, sorted run of image values whose first element has global
/// rank `base`, e.g. the targets of one loaded macrochunk.
#[derive(Clone, Copy, Debug)]
pub struct RankWindow<'a> {
    values: &'a [u64],
    base: u64,
}

impl<'a> RankWindow<'a> {
    /// `values` must be strictly increasing.
    pub fn new(values: &'a [u64], base: u64) -> Self {
        RankWindow { values, base }
    }

    pub fn values(&self) -> &'a [u64] {
        self.values
    }

    pub fn contains_value(&self, y: u64) -> bool {
        matches!((self.values.first(), self.values.last()), (Some(&lo), Some(&hi)) if lo <= y && y <= hi)
    }

    /// Global rank of `y`: narrows the search with [`rank_bounds`] using the
    /// window's end points as anchors, then binary-searches what is left.
    pub fn rank_of(&self, y: u64) -> Result<u64> {
        let (Some(&first), Some(&last)) = (self.values.first(), self.values.last()) else {
            return Err(Error::NotInImage(y));
        };
        if y < first || y > last {
            return Err(Error::NotInImage(y));
        }
        let low = Anchor::new(self.base, first);
        let high = Anchor::new(self.base + self.values.len() as u64 - 1, last);
        let bounds = rank_bounds(y, low, high)?;
        let lo = (bounds.lower - self.base) as usize;
        let hi = (bounds.upper - self.base) as usize;
        match self.values[lo..=hi].binary_search(&y) {
            Ok(i) => Ok(self.base + (lo + i) as u64),
            Err(_) => Err(Error::NotInImage(y)),
        }
    }
}

pub fn rank_lookup(sorted_image: &[u64], y: u64) -> Result<u64> {
    RankWindow::new(sorted_image, 0).rank_of(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fig6() -> LcgMap {
        LcgMap::with_modulus(4, 1, 7, 6).unwrap()
    }

    #[test]
    fn primes() {
        assert_eq!(smallest_prime_geq(6), 7);
        assert_eq!(smallest_prime_geq(7), 7);
        assert_eq!(smallest_prime_geq(1), 2);
        assert_eq!(smallest_prime_geq(2), 2);
        assert_eq!(smallest_prime_geq(24), 29);
        assert!(is_prime(MAX_MODULUS));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2, 3, 5, 7
        assert!(is_prime(1_000_000_007));
    }

    #[test]
    fn prime_near_million_by_trial_division() {
        let trial = |x: u64| x >= 2 && (2..).take_while(|d| d * d <= x).all(|d| x % d != 0);
        let p = smallest_prime_geq(1_000_000);
        assert!(trial(p));
        assert!((1_000_000..p).all(|x| !trial(x)));
    }

    #[test]
    fn fig6_images_and_inverse() {
        let h = fig6();
        let img: Vec<u64> = (0..6).map(|x| h.eval(x)).collect();
        assert_eq!(img, vec![1, 5, 2, 6, 3, 0]);
        assert_eq!(h.invert(2), 2);
        assert_eq!(h.sorted_image(), vec![0, 1, 2, 3, 5, 6]);
        assert_eq!(h.nodes_by_rank(), vec![5, 0, 2, 4, 1, 3]);
        assert_eq!(h.gaps(), 1);
    }

    #[test]
    fn identity_map() {
        let h = LcgMap::new(1, 0, 10).unwrap();
        assert!((0..10).all(|x| h.eval(x) == x && h.invert(x) == x));
    }

    #[test]
    fn fig6_rank_bounds() {
        let b = rank_bounds(2, Anchor::new(0, 0), Anchor::new(5, 6)).unwrap();
        assert_eq!(b, RankBounds { lower: 1, upper: 2 });
        assert!(rank_bounds(7, Anchor::new(0, 0), Anchor::new(5, 6)).is_err());
    }

    #[test]
    fn no_gap_bounds_collapse() {
        // n = p = 7: every shift is zero
        let b = rank_bounds(4, Anchor::new(0, 0), Anchor::new(6, 6)).unwrap();
        assert_eq!(b, RankBounds { lower: 4, upper: 4 });
    }

    #[test]
    fn fig6_rank_lookup() {
        let img = fig6().sorted_image();
        assert_eq!(rank_lookup(&img, 5).unwrap(), 4);
        assert_eq!(rank_lookup(&img, 0).unwrap(), 0);
        assert!(matches!(rank_lookup(&img, 4), Err(Error::NotInImage(4))));
    }

    #[test]
    fn window_rank_uses_global_base() {
        let img = fig6().sorted_image();
        let w = RankWindow::new(&img[2..5], 2);
        assert_eq!(w.rank_of(3).unwrap(), 3);
        assert_eq!(w.rank_of(5).unwrap(), 4);
        assert!(w.rank_of(6).is_err());
    }

    #[test]
    fn forced_multiplier_for_two_nodes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let h = LcgMap::sample(2, &mut rng).unwrap();
            assert_eq!(h.modulus(), 2);
            assert_eq!(h.a(), 1);
            assert!(h.b() < 2);
        }
        assert!(LcgMap::sample(1, &mut rng).is_err());
    }

    #[test]
    fn parse_round_trip() {
        let h = fig6();
        assert_eq!(h.to_string(), "4 1 7 6");
        assert_eq!("4 1 7 6".parse::<LcgMap>().unwrap(), h);
        assert!("4 1 8 6".parse::<LcgMap>().is_err());
        assert!("0 1 7 6".parse::<LcgMap>().is_err());
        assert!("4 1 7".parse::<LcgMap>().is_err());
    }
}
