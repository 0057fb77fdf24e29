//! Deterministic map helpers for grid evaluations.
//!
//! Points are evaluated independently and collected in index order, so results
//! are byte-identical regardless of thread count. The `parallel` feature
//! switches the default entry point to rayon; `map_points_seq` always runs on
//! the calling thread and is kept public for benchmarking the two paths
//! against each other.

/// Sequential map, kept as the reference path.
pub fn map_points_seq<T, U, F>(points: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    points.iter().map(|p| f(p)).collect()
}

#[cfg(feature = "parallel")]
pub fn map_points<T, U, F>(points: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    use rayon::prelude::*;
    points.par_iter().map(|p| f(p)).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_points<T, U, F>(points: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    map_points_seq(points, f)
}

/// `n` evenly spaced values covering `[lo, hi]` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "linspace needs at least two points");
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + step * i as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_matches_sequential() {
        let pts: Vec<f64> = linspace(0.0, 1.0, 101);
        let a = map_points(&pts, |x| (x * 17.0).sin());
        let b = map_points_seq(&pts, |x| (x * 17.0).sin());
        assert_eq!(a, b);
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(-0.25, 0.25, 5);
        assert_eq!(v.first().copied(), Some(-0.25));
        assert_eq!(v.last().copied(), Some(0.25));
        assert_eq!(v.len(), 5);
    }
}
