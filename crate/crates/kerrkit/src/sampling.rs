//! Deterministic quasi-random point sets (Halton sequences).

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Radical inverse of `index` in base `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while index > 0 {
        out += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    out
}

/// Halton sequence in `dim` dimensions (at most 8), skipping the first
/// `skip` indices. A `skip` derived from a seed gives reproducible but
/// distinct point sets.
#[derive(Debug, Clone)]
pub struct Halton {
    dim: usize,
    index: u64,
}

impl Halton {
    pub fn new(dim: usize, skip: u64) -> Self {
        assert!((1..=PRIMES.len()).contains(&dim), "Halton dimension must be 1..=8");
        Halton { dim, index: skip + 1 }
    }

    /// Next point in the unit cube.
    pub fn next_point(&mut self) -> Vec<f64> {
        let p = (0..self.dim).map(|d| radical_inverse(self.index, PRIMES[d])).collect();
        self.index += 1;
        p
    }
}

impl Iterator for Halton {
    type Item = Vec<f64>;
    fn next(&mut self) -> Option<Vec<f64>> {
        Some(self.next_point())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_two_prefix() {
        let v: Vec<f64> = (1..5).map(|i| radical_inverse(i, 2)).collect();
        assert_eq!(v, vec![0.5, 0.25, 0.75, 0.125]);
    }

    #[test]
    fn points_in_unit_cube() {
        for p in Halton::new(4, 17).take(500) {
            assert!(p.iter().all(|x| (0.0..1.0).contains(x)));
        }
    }
}
