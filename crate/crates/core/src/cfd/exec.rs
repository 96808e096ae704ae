//! Row-wise loop drivers. Every row is computed independently and reductions
//! are combined in row order, so both modes give bit-identical results.

/// How grid loops are executed.
///
/// `Rayon` runs rows on the rayon thread pool when the `parallel` feature is
/// enabled and falls back to a plain loop otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parallelism {
    Rayon,
    Sequential,
}

impl Default for Parallelism {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Parallelism::Rayon
        } else {
            Parallelism::Sequential
        }
    }
}

impl Parallelism {
    #[cfg_attr(not(feature = "parallel"), allow(dead_code))]
    fn threaded(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Rayon
    }
}

/// Calls `f(row_index, row)` for each `width`-long row of `data`.
pub(crate) fn for_rows<F>(par: Parallelism, data: &mut [f64], width: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if par.threaded() {
        use rayon::prelude::*;
        data.par_chunks_mut(width)
            .enumerate()
            .for_each(|(j, row)| f(j, row));
        return;
    }
    let _ = par;
    data.chunks_mut(width)
        .enumerate()
        .for_each(|(j, row)| f(j, row));
}

/// Evaluates `f` for rows `0..rows` and returns the values in row order.
pub(crate) fn map_rows<T, F>(par: Parallelism, rows: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if par.threaded() {
        use rayon::prelude::*;
        return (0..rows).into_par_iter().map(f).collect();
    }
    let _ = par;
    (0..rows).map(f).collect()
}

pub(crate) fn sum_rows<F>(par: Parallelism, rows: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    map_rows(par, rows, f).into_iter().sum()
}

pub(crate) fn max_rows<F>(par: Parallelism, rows: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    map_rows(par, rows, f).into_iter().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let mut a: Vec<f64> = (0..60).map(|k| k as f64 * 0.1).collect();
        let mut b = a.clone();
        let op = |j: usize, row: &mut [f64]| {
            for x in row.iter_mut() {
                *x = (*x + j as f64).sin();
            }
        };
        for_rows(Parallelism::Rayon, &mut a, 6, op);
        for_rows(Parallelism::Sequential, &mut b, 6, op);
        assert_eq!(a, b);
        let s = |j: usize| a[j * 6..(j + 1) * 6].iter().sum::<f64>();
        assert_eq!(
            sum_rows(Parallelism::Rayon, 10, s).to_bits(),
            sum_rows(Parallelism::Sequential, 10, s).to_bits()
        );
    }
}
