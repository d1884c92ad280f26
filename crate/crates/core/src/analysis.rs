//! Peak detection on sampled arrival densities.

/// Relative prominence threshold used by the reports.
pub const DEFAULT_PROMINENCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub index: usize,
    pub t: f64,
    pub value: f64,
    pub prominence: f64,
}

/// Three-point moving average; the end samples are kept as they are.
pub fn smooth3(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    if n < 3 {
        return values.to_vec();
    }
    let mut out = Vec::with_capacity(n);
    out.push(values[0]);
    for w in values.windows(3) {
        out.push((w[0] + w[1] + w[2]) / 3.0);
    }
    out.push(values[n - 1]);
    out
}

/// Topographic prominence of the local maximum at `i`.
fn prominence(s: &[f64], i: usize) -> f64 {
    let height = s[i];
    let mut left_min = height;
    for j in (0..i).rev() {
        if s[j] > height {
            break;
        }
        left_min = left_min.min(s[j]);
    }
    let mut right_min = height;
    for &v in &s[i + 1..] {
        if v > height {
            break;
        }
        right_min = right_min.min(v);
    }
    height - left_min.max(right_min)
}

/// Interior local maxima of the 3-point smoothed signal whose prominence is
/// at least `relative_prominence` times the global maximum. Sorted by time.
pub fn find_peaks(times: &[f64], values: &[f64], relative_prominence: f64) -> Vec<Peak> {
    assert_eq!(times.len(), values.len());
    let s = smooth3(values);
    let n = s.len();
    let global = s.iter().copied().fold(0.0, f64::max);
    if n < 3 || global <= 0.0 {
        return Vec::new();
    }
    let threshold = relative_prominence * global;
    let mut peaks = Vec::new();
    let mut i = 1;
    while i < n - 1 {
        if s[i] > s[i - 1] {
            // Walk across a plateau before deciding.
            let mut j = i;
            while j + 1 < n && s[j + 1] == s[i] {
                j += 1;
            }
            if j + 1 < n && s[j + 1] < s[i] {
                let centre = (i + j) / 2;
                let prom = prominence(&s, i);
                if prom >= threshold {
                    peaks.push(Peak {
                        index: centre,
                        t: times[centre],
                        value: values[centre],
                        prominence: prom,
                    });
                }
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    peaks
}

/// Peaks with the largest values, returned in time order.
pub fn dominant_peaks(peaks: &[Peak], count: usize) -> Vec<Peak> {
    let mut by_height = peaks.to_vec();
    by_height.sort_by(|a, b| b.value.total_cmp(&a.value));
    by_height.truncate(count);
    by_height.sort_by(|a, b| a.t.total_cmp(&b.t));
    by_height
}
