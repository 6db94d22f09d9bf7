/// A local extremum: sample index and value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub index: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Extrema {
    pub maxima: Vec<Extremum>,
    pub minima: Vec<Extremum>,
}

impl Extrema {
    pub fn count(&self) -> usize {
        self.maxima.len() + self.minima.len()
    }

    /// At least two maxima and two minima, enough to fit both envelopes.
    pub fn can_sift(&self) -> bool {
        self.maxima.len() >= 2 && self.minima.len() >= 2
    }
}

/// Strict interior local maxima and minima.
///
/// A run of equal samples that is higher (lower) than both neighbours counts
/// once, at index `floor((first + last) / 2)`. The first and last samples are
/// never extrema.
pub fn find_extrema(x: &[f64]) -> Extrema {
    let mut out = Extrema::default();
    let n = x.len();
    if n < 3 {
        return out;
    }
    let mut i = 1;
    while i < n - 1 {
        let mut j = i;
        while j + 1 < n && x[j + 1] == x[i] {
            j += 1;
        }
        if j == n - 1 {
            break;
        }
        let (left, right, v) = (x[i - 1], x[j + 1], x[i]);
        let at = Extremum {
            index: (i + j) / 2,
            value: v,
        };
        if v > left && v > right {
            out.maxima.push(at);
        } else if v < left && v < right {
            out.minima.push(at);
        }
        i = j + 1;
    }
    out
}

/// Number of sign changes, counting a run of exact zeros between opposite
/// signs as one crossing.
pub fn zero_crossings(x: &[f64]) -> usize {
    let mut count = 0;
    let mut last_sign = 0.0;
    for &v in x {
        if v == 0.0 {
            continue;
        }
        let s = v.signum();
        if last_sign != 0.0 && s != last_sign {
            count += 1;
        }
        last_sign = s;
    }
    count
}
