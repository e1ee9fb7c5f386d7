use rand::seq::index;
use rand::Rng;

use super::GenError;

/// Draws `n_total` items from `bins` (bin `d` holds the candidates with `d`
/// operators), roughly the same number from every bin.
///
/// Bins are visited in order. Each takes
/// `min(ceil(remaining / bins_left), bin_size)` items uniformly without
/// replacement, where `bins_left` counts the current bin and all later
/// ones, so budget a small bin cannot use carries forward. If a pass ends
/// short (only possible when late bins are smaller than early ones) the
/// rule is re-run over the items not yet taken.
///
/// Returns the drawn items grouped by bin, in draw order within each bin.
pub fn stratified_sample<R: Rng + ?Sized>(
    bins: &[Vec<usize>],
    n_total: usize,
    rng: &mut R,
) -> Result<Vec<usize>, GenError> {
    let available: usize = bins.iter().map(Vec::len).sum();
    if available < n_total {
        return Err(GenError::InsufficientPool {
            requested: n_total,
            available,
        });
    }
    let mut left: Vec<Vec<usize>> = bins.to_vec();
    let mut taken: Vec<Vec<usize>> = vec![Vec::new(); bins.len()];
    let mut remaining = n_total;
    while remaining > 0 {
        for d in 0..left.len() {
            let bins_left = left.len() - d;
            let quota = remaining.div_ceil(bins_left).min(left[d].len());
            if quota == 0 {
                continue;
            }
            let mut picks = index::sample(rng, left[d].len(), quota).into_vec();
            taken[d].extend(picks.iter().map(|&i| left[d][i]));
            picks.sort_unstable_by(|a, b| b.cmp(a));
            for i in picks {
                left[d].swap_remove(i);
            }
            remaining -= quota;
        }
    }
    Ok(taken.into_iter().flatten().collect())
}

/// Quotas the first pass would assign to bins of the given sizes.
pub fn bin_quotas(bin_sizes: &[usize], n_total: usize) -> Vec<usize> {
    let mut remaining = n_total;
    bin_sizes
        .iter()
        .enumerate()
        .map(|(d, &size)| {
            let quota = remaining.div_ceil(bin_sizes.len() - d).min(size);
            remaining -= quota;
            quota
        })
        .collect()
}
