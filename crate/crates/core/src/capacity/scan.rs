//! Monte Carlo scan of the unitary-encoding objective against mutual
//! information, and per-bin maxima of the scatter.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::functionals::chi_covariant_inner;
use crate::capacity::optimize::{draw_valid, StateFamily};
use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::random::rng_for_index;
use crate::states::mutual_information;

/// One sampled state: q = I(S:W) and the objective F, both in bits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub q: f64,
    pub f: f64,
}

/// Samples `n` states of `family` (sample `i` from its own seeded stream)
/// and evaluates F = S(Ψ(I/d)) − E_{Ψ^c⊗I}[ρ_SW] for each.
pub fn mc_scan(ch: &KrausChannel, family: StateFamily, n: usize, seed: u64) -> Result<Vec<ScanRecord>> {
    if n == 0 {
        return Err(Error::Validation("scan needs at least one sample".into()));
    }
    let (ds, _) = family.dims();
    if ch.din() != ds {
        return Err(Error::Dimension(format!(
            "{family} states have a {ds}-dimensional signal, channel takes {}",
            ch.din()
        )));
    }
    let id = KrausChannel::identity(ds);
    (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for_index(seed, i);
            let (_, state) = draw_valid(&mut rng, family, None).ok_or_else(|| {
                Error::Validation(format!("no valid {family} state found for sample {i}"))
            })?;
            Ok(ScanRecord {
                q: mutual_information(&state),
                f: chi_covariant_inner(ch, &id, &state)?,
            })
        })
        .collect()
}

/// Largest F among the records whose q falls in one bin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinMax {
    pub q_lo: f64,
    pub q_hi: f64,
    pub count: usize,
    pub f_max: f64,
    /// q of the record attaining `f_max`.
    pub q_at_max: f64,
    /// Reference line evaluated at `q_at_max`.
    pub reference: f64,
    /// f_max − reference.
    pub deviation: f64,
}

/// Groups records into bins [k·width, (k+1)·width) over [0, q_max] (the
/// last bin is closed) and reports each non-empty bin's maximum against
/// `reference(q)`. Ties keep the earliest record.
pub fn bin_maxima(
    records: &[ScanRecord],
    width: f64,
    q_max: f64,
    reference: impl Fn(f64) -> f64,
) -> Result<Vec<BinMax>> {
    if !(width > 0.0) || !(q_max > 0.0) {
        return Err(Error::Validation(format!("bad bin layout width={width}, q_max={q_max}")));
    }
    let nbins = (q_max / width).round().max(1.0) as usize;
    let mut bins: Vec<Option<(usize, ScanRecord)>> = vec![None; nbins];
    for r in records {
        let k = ((r.q.max(0.0) / width).floor() as usize).min(nbins - 1);
        match &mut bins[k] {
            Some((count, best)) => {
                *count += 1;
                if r.f > best.f {
                    *best = *r;
                }
            }
            slot @ None => *slot = Some((1, *r)),
        }
    }
    Ok(bins
        .into_iter()
        .enumerate()
        .filter_map(|(k, b)| {
            b.map(|(count, best)| {
                let reference = reference(best.q);
                BinMax {
                    q_lo: k as f64 * width,
                    q_hi: (k + 1) as f64 * width,
                    count,
                    f_max: best.f,
                    q_at_max: best.q,
                    reference,
                    deviation: best.f - reference,
                }
            })
        })
        .collect())
}
