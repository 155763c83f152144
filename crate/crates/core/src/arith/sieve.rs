//! Segmented sieve of Eratosthenes over odd numbers.
//!
//! Every segment is sieved independently from the shared base primes, so a
//! stream can restart at any segment boundary and workers never share state.

use serde::{Deserialize, Serialize};

/// Half-open interval `[lo, hi)` of integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Segment {
    pub lo: u64,
    pub hi: u64,
}

#[derive(Debug, Clone)]
pub struct PrimeSieve {
    bound: u64,
    base: Vec<u64>,
}

fn simple_sieve(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

impl PrimeSieve {
    /// Sieve for primes `≤ bound`.
    pub fn new(bound: u64) -> Self {
        let mut r = (bound as f64).sqrt() as u64;
        while r * r > bound {
            r -= 1;
        }
        while (r + 1) * (r + 1) <= bound {
            r += 1;
        }
        PrimeSieve {
            bound,
            base: simple_sieve(r),
        }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// Partition `[2, bound]` into consecutive segments of `size` integers.
    pub fn segments(&self, size: u64) -> Vec<Segment> {
        assert!(size >= 2);
        let mut out = Vec::new();
        let mut lo = 0;
        while lo <= self.bound {
            let hi = (lo + size).min(self.bound + 1);
            out.push(Segment { lo, hi });
            lo = hi;
        }
        out
    }

    /// Call `visit` on each prime in `seg ∩ [2, bound]`, ascending.
    pub fn for_each_in(&self, seg: Segment, mut visit: impl FnMut(u64)) {
        let lo = seg.lo.max(2);
        let hi = seg.hi.min(self.bound + 1);
        if lo >= hi {
            return;
        }
        if lo <= 2 {
            visit(2);
        }
        // odd numbers lo_odd, lo_odd + 2, ... < hi
        let lo_odd = (lo.max(3)) | 1;
        if lo_odd >= hi {
            return;
        }
        let len = ((hi - lo_odd + 1) / 2) as usize;
        let mut composite = vec![false; len];
        for &p in self.base.iter().skip(1) {
            let pp = p * p;
            if pp >= hi {
                break;
            }
            let mut start = if pp >= lo_odd {
                pp
            } else {
                let r = lo_odd % p;
                if r == 0 {
                    lo_odd
                } else {
                    lo_odd + (p - r)
                }
            };
            if start % 2 == 0 {
                start += p;
            }
            let mut idx = ((start - lo_odd) / 2) as usize;
            let step = p as usize;
            while idx < len {
                composite[idx] = true;
                idx += step;
            }
        }
        for (i, c) in composite.iter().enumerate() {
            if !c {
                let n = lo_odd + 2 * i as u64;
                if n > 1 {
                    visit(n);
                }
            }
        }
    }

    pub fn primes_in(&self, seg: Segment) -> Vec<u64> {
        let mut out = Vec::new();
        self.for_each_in(seg, |p| out.push(p));
        out
    }

    pub fn count_in(&self, seg: Segment) -> u64 {
        let mut c = 0;
        self.for_each_in(seg, |_| c += 1);
        c
    }

    /// Ascending stream of primes `≥ start`, sieved lazily in segments.
    pub fn iter_from(&self, start: u64, segment_size: u64) -> impl Iterator<Item = u64> + '_ {
        let mut lo = start;
        let mut buf: std::vec::IntoIter<u64> = Vec::new().into_iter();
        std::iter::from_fn(move || loop {
            if let Some(p) = buf.next() {
                return Some(p);
            }
            if lo > self.bound {
                return None;
            }
            let hi = (lo + segment_size).min(self.bound + 1);
            buf = self.primes_in(Segment { lo, hi }).into_iter();
            lo = hi;
        })
    }
}

/// Ascending stream of the primes `≤ bound`.
pub fn primes_up_to(bound: u64) -> impl Iterator<Item = u64> {
    let sieve = PrimeSieve::new(bound);
    let mut lo = 0u64;
    let mut buf: std::vec::IntoIter<u64> = Vec::new().into_iter();
    std::iter::from_fn(move || loop {
        if let Some(p) = buf.next() {
            return Some(p);
        }
        if lo > sieve.bound {
            return None;
        }
        let hi = (lo + (1 << 18)).min(sieve.bound + 1);
        buf = sieve.primes_in(Segment { lo, hi }).into_iter();
        lo = hi;
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_bounds() {
        assert_eq!(primes_up_to(10).collect::<Vec<_>>(), vec![2, 3, 5, 7]);
        assert_eq!(primes_up_to(100).count(), 25);
        assert_eq!(primes_up_to(2).collect::<Vec<_>>(), vec![2]);
        assert_eq!(primes_up_to(1).count(), 0);
    }

    #[test]
    fn segmented_matches_simple() {
        let reference = simple_sieve(100_000);
        let sieve = PrimeSieve::new(100_000);
        for size in [2u64, 7, 1000, 4096, 1 << 20] {
            let got: Vec<u64> = sieve
                .segments(size)
                .into_iter()
                .flat_map(|s| sieve.primes_in(s))
                .collect();
            assert_eq!(got, reference, "segment size {size}");
        }
    }

    #[test]
    fn restart_from_boundary() {
        let sieve = PrimeSieve::new(10_000);
        let all: Vec<u64> = sieve.iter_from(0, 333).collect();
        let tail: Vec<u64> = sieve.iter_from(5000, 333).collect();
        let expect: Vec<u64> = all.iter().copied().filter(|&p| p >= 5000).collect();
        assert_eq!(tail, expect);
    }

    #[test]
    fn pi_of_ten_to_the_seventh() {
        let sieve = PrimeSieve::new(10_000_000);
        let n: u64 = sieve.segments(1 << 20).into_iter().map(|s| sieve.count_in(s)).sum();
        assert_eq!(n, 664_579);
    }
}
