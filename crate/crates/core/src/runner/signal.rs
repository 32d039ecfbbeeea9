//! Small time-series helpers for reading periods and transfer events off
//! recorded observables.

/// A local maximum and its topographic prominence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub index: usize,
    pub value: f64,
    pub prominence: f64,
}

/// Local maxima of `xs` (plateaus report their first index) together with
/// their prominence: the height above the higher of the two lowest points
/// separating the peak from taller terrain on either side (or the series end).
pub fn peaks(xs: &[f64]) -> Vec<Peak> {
    let n = xs.len();
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if xs[i] > xs[i - 1] {
            let mut j = i;
            while j + 1 < n && xs[j + 1] == xs[i] {
                j += 1;
            }
            if j + 1 < n && xs[j + 1] < xs[i] {
                out.push(Peak {
                    index: i,
                    value: xs[i],
                    prominence: prominence(xs, i, j),
                });
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

fn prominence(xs: &[f64], start: usize, end: usize) -> f64 {
    let top = xs[start];
    let mut left_min = top;
    for &x in xs[..start].iter().rev() {
        if x > top {
            break;
        }
        left_min = left_min.min(x);
    }
    let mut right_min = top;
    for &x in &xs[end + 1..] {
        if x > top {
            break;
        }
        right_min = right_min.min(x);
    }
    top - left_min.max(right_min)
}

/// Peaks whose prominence is at least `fraction` of the series range.
pub fn prominent_peaks(xs: &[f64], fraction: f64) -> Vec<Peak> {
    let (lo, hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let range = hi - lo;
    if !(range > 0.0) {
        return Vec::new();
    }
    peaks(xs).into_iter().filter(|p| p.prominence >= fraction * range).collect()
}

/// Mean spacing between consecutive peak positions, in the units of `times`.
pub fn mean_peak_spacing(times: &[f64], found: &[Peak]) -> Option<f64> {
    if found.len() < 2 {
        return None;
    }
    let first = times[found[0].index];
    let last = times[found[found.len() - 1].index];
    Some((last - first) / (found.len() - 1) as f64)
}

/// A contiguous stretch of fast change in a probability series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferEvent {
    /// First and last sample index of the stretch (inclusive).
    pub start: usize,
    pub end: usize,
    /// Time of the largest single-step change inside the stretch.
    pub peak_time: f64,
    /// Net change of the series across the stretch.
    pub net_change: f64,
}

/// Groups steps whose change `|x[i] − x[i−1]|` exceeds `rate_fraction` of the
/// largest step into events.
pub fn transfer_events(times: &[f64], xs: &[f64], rate_fraction: f64) -> Vec<TransferEvent> {
    let rates: Vec<f64> = xs.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let max_rate = rates.iter().cloned().fold(0.0, f64::max);
    if max_rate == 0.0 {
        return Vec::new();
    }
    let threshold = rate_fraction * max_rate;
    let mut events = Vec::new();
    let mut i = 0;
    while i < rates.len() {
        if rates[i] < threshold {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < rates.len() && rates[j + 1] >= threshold {
            j += 1;
        }
        let best = (i..=j).max_by(|&a, &b| rates[a].total_cmp(&rates[b])).unwrap_or(i);
        events.push(TransferEvent {
            start: i,
            end: j + 1,
            // rates[k] is the step from sample k to k+1
            peak_time: 0.5 * (times[best] + times[best + 1]),
            net_change: xs[j + 1] - xs[i],
        });
        i = j + 1;
    }
    events
}

/// Index of the first sample at which `xs` has the opposite sign to `xs[0]`.
pub fn first_sign_change(xs: &[f64]) -> Option<usize> {
    let s0 = xs.first()?.signum();
    xs.iter().position(|x| x.signum() != s0 && *x != 0.0)
}
