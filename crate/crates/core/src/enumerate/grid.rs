//! Square grid of trial off-diagonal entries inside the half-radius disc.
//!
//! The grid has spacing 1/n2 and is anchored at the square's corners
//! (±1/2, ±1/2), so the coordinates are (2k − n2)/(2 n2) for k = 0..=n2.
//! A point is kept when |z| ≤ 1/2 exactly (boundary inclusive). For odd n2
//! no coordinate is zero, so every modulus is at least 1/(n2·√2); for even
//! n2 the origin itself is a grid point.

/// Grid point with value `(a + i·b) / (2·n2)`; `a, b ≡ n2 (mod 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridPoint {
    pub a: i64,
    pub b: i64,
}

impl GridPoint {
    /// Squared modulus numerator: |z|² = (a² + b²)/(4·n2²).
    pub fn norm_sqr_num(&self) -> i64 {
        self.a * self.a + self.b * self.b
    }
}

#[derive(Debug, Clone)]
pub struct DiscGrid {
    n2: u32,
    points: Vec<GridPoint>,
}

impl DiscGrid {
    pub fn n2(&self) -> u32 {
        self.n2
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[GridPoint] {
        &self.points
    }

    pub fn contains_origin(&self) -> bool {
        self.points.iter().any(|p| p.a == 0 && p.b == 0)
    }

    /// Smallest modulus over all grid points (zero when the origin is one).
    pub fn min_modulus(&self) -> f64 {
        self.points
            .iter()
            .map(|p| (p.norm_sqr_num() as f64).sqrt() / (2.0 * self.n2 as f64))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Build the grid for `n2 >= 1`, points ordered lexicographically by (a, b).
pub fn disc_grid(n2: u32) -> DiscGrid {
    assert!(n2 >= 1);
    let n = n2 as i64;
    let mut points = Vec::new();
    for ka in 0..=n {
        let a = 2 * ka - n;
        for kb in 0..=n {
            let b = 2 * kb - n;
            // |z| <= 1/2 with z = (a + ib)/(2 n2) is exactly a² + b² <= n2².
            if a * a + b * b <= n * n {
                points.push(GridPoint { a, b });
            }
        }
    }
    DiscGrid { n2, points }
}
