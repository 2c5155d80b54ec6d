//! Compensated summation with a reduction order fixed by the data size only,
//! so results are bit-identical under any number of worker threads.

use rayon::prelude::*;

/// Separations per chunk. Fixed: changing it changes the last bits of every
/// lattice sum.
pub const CHUNK: u64 = 1 << 16;

/// Neumaier (improved Kahan-Babuska) accumulator.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::new();
        iter.into_iter().for_each(|x| acc.add(x));
        acc
    }
}

/// `sum_{m in range} term(m)` split into [`CHUNK`]-sized pieces that run in
/// parallel and are combined in index order.
pub fn chunked_sum<F>(start: u64, end: u64, term: F) -> f64
where
    F: Fn(u64) -> f64 + Sync,
{
    if end <= start {
        return 0.0;
    }
    let chunks = (end - start).div_ceil(CHUNK);
    let partials: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = start + c * CHUNK;
            let hi = (lo + CHUNK).min(end);
            (lo..hi).map(&term).collect::<Neumaier>().total()
        })
        .collect();
    partials.into_iter().collect::<Neumaier>().total()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensates_cancellation() {
        let acc: Neumaier = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(acc.total(), 2.0);
    }

    #[test]
    fn chunked_matches_closed_form() {
        let n = 3 * CHUNK + 17;
        let s = chunked_sum(1, n, |m| m as f64);
        let want = (n - 1) as f64 * n as f64 / 2.0;
        assert_eq!(s, want);
        assert_eq!(chunked_sum(5, 5, |_| 1.0), 0.0);
    }

    #[test]
    fn independent_of_thread_count() {
        let f = |m: u64| ((m as f64) * 0.37).sin() / (m as f64);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| chunked_sum(1, 500_000, f));
        let b = four.install(|| chunked_sum(1, 500_000, f));
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
