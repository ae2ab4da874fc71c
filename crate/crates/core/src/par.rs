//! Trial-level data parallelism. With the `parallel` feature off every mode
//! runs sequentially; results are always ordered by trial index.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExecMode {
    Sequential,
    #[default]
    Parallel,
}

/// `f(0), f(1), …, f(trials − 1)` in index order.
pub fn map_trials<T, F>(mode: ExecMode, trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            (0..trials).into_par_iter().map(f).collect()
        }
        _ => (0..trials).map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_by_index() {
        let seq = map_trials(ExecMode::Sequential, 257, |i| i * i);
        let par = map_trials(ExecMode::Parallel, 257, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(seq[16], 256);
        assert!(map_trials(ExecMode::Parallel, 0, |i| i).is_empty());
    }
}
