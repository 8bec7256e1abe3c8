//! Regular lattice on the probability simplex: the compositions of an
//! integer `n1` into `K` nonnegative parts, each divided by `n1`.

/// All compositions of `n1` into `k` parts, lexicographic, scaled by 1/n1.
#[derive(Debug, Clone)]
pub struct SimplexLattice {
    n1: u32,
    k: usize,
    points: Vec<Vec<u32>>,
}

impl SimplexLattice {
    pub fn n1(&self) -> u32 {
        self.n1
    }

    pub fn parts(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Numerators of the `idx`-th lattice point; the coordinates are these
    /// over `n1`, summing to exactly 1.
    pub fn point(&self, idx: usize) -> &[u32] {
        &self.points[idx]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        self.points.iter().map(|p| p.as_slice())
    }
}

/// Generate the lattice for `n1 >= 1`, `k >= 1` in lexicographic order.
pub fn simplex_points(n1: u32, k: usize) -> SimplexLattice {
    assert!(n1 >= 1 && k >= 1);
    let mut points = Vec::with_capacity(simplex_count(n1 as u64, k as u64) as usize);
    let mut current = vec![0u32; k];
    fill(n1, 0, &mut current, &mut points);
    SimplexLattice { n1, k, points }
}

fn fill(remaining: u32, pos: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if pos == current.len() - 1 {
        current[pos] = remaining;
        out.push(current.clone());
        return;
    }
    for v in 0..=remaining {
        current[pos] = v;
        fill(remaining - v, pos + 1, current, out);
    }
}

/// Number of lattice points: C(n1 + k − 1, k − 1).
pub fn simplex_count(n1: u64, k: u64) -> u128 {
    binomial(n1 as u128 + k as u128 - 1, k as u128 - 1)
}

pub fn binomial(n: u128, mut k: u128) -> u128 {
    if k > n {
        return 0;
    }
    if k > n - k {
        k = n - k;
    }
    let mut result: u128 = 1;
    for i in 0..k {
        result = result * (n - i) / (i + 1);
    }
    result
}
