use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;

use super::{nu_alpha_sorted, sample_sas, ALPHA_MAX, ALPHA_MIN, GAUSSIAN_NU};
use crate::error::{Error, Result};
use crate::rng;

const EMBEDDED_TABLE: &str = include_str!("../../data/alpha_lookup.txt");
const PROVENANCE_PREFIX: &str = "# provenance:";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    PublishedTable,
    MonteCarlo,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::PublishedTable => "published-table",
            Provenance::MonteCarlo => "monte-carlo",
        })
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "published-table" => Ok(Provenance::PublishedTable),
            "monte-carlo" => Ok(Provenance::MonteCarlo),
            other => Err(Error::Lookup(format!("unknown provenance '{other}'"))),
        }
    }
}

/// Monotone `α ↦ ν_α` table for symmetric stable laws, inverted by linear
/// interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaLookup {
    /// (α, ν_α) with α strictly increasing and ν_α strictly decreasing.
    entries: Vec<(f64, f64)>,
    provenance: Provenance,
    note: String,
}

impl AlphaLookup {
    pub fn new(entries: Vec<(f64, f64)>, provenance: Provenance) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Lookup("empty table".into()));
        }
        for &(a, nu) in &entries {
            if !(ALPHA_MIN..=ALPHA_MAX).contains(&a) || !nu.is_finite() || nu <= 0.0 {
                return Err(Error::Lookup(format!("bad entry (alpha {a}, nu {nu})")));
            }
        }
        for w in entries.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Lookup(
                    "alpha grid must be strictly increasing".into(),
                ));
            }
            if w[1].1 >= w[0].1 {
                return Err(Error::Lookup(format!(
                    "nu_alpha not strictly decreasing between alpha {} and {}",
                    w[0].0, w[1].0
                )));
            }
        }
        Ok(Self {
            entries,
            provenance,
            note: String::new(),
        })
    }

    /// The table shipped with the crate.
    pub fn embedded() -> &'static AlphaLookup {
        static TABLE: OnceLock<AlphaLookup> = OnceLock::new();
        TABLE.get_or_init(|| {
            EMBEDDED_TABLE
                .parse()
                .expect("embedded alpha lookup table is valid")
        })
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    /// Inverts a quantile ratio to α, clamped to `[ALPHA_MIN, ALPHA_MAX]`.
    /// Ratios at or below the Gaussian value map to exactly 2.
    pub fn alpha_for_nu(&self, nu: f64) -> f64 {
        if nu <= GAUSSIAN_NU {
            return ALPHA_MAX;
        }
        let (lo_alpha, hi_nu) = self.entries[0];
        let (hi_alpha, lo_nu) = self.entries[self.entries.len() - 1];
        let alpha = if nu >= hi_nu {
            lo_alpha
        } else if nu <= lo_nu {
            hi_alpha
        } else {
            // entries[i].1 > nu >= entries[i + 1].1
            let i = self.entries.partition_point(|&(_, v)| v > nu) - 1;
            let (a0, n0) = self.entries[i];
            let (a1, n1) = self.entries[i + 1];
            a0 + (a1 - a0) * (n0 - nu) / (n0 - n1)
        };
        alpha.clamp(ALPHA_MIN, ALPHA_MAX)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        std::fs::read_to_string(path)
            .map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?
            .parse()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_string()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Two whitespace-separated columns `alpha nu_alpha`. The first line is
/// `# provenance: <published-table|monte-carlo>[; free text]`, later `#` lines
/// are comments.
impl FromStr for AlphaLookup {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .and_then(|l| l.strip_prefix(PROVENANCE_PREFIX))
            .ok_or_else(|| Error::Lookup("missing '# provenance:' header".into()))?;
        let (kind, note) = header.split_once(';').unwrap_or((header, ""));
        let provenance = kind.trim().parse()?;

        let mut entries = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Lookup(format!("line {}: {e}", lineno + 2)))
            };
            match cols.as_slice() {
                [a, nu] => entries.push((parse(a)?, parse(nu)?)),
                _ => {
                    return Err(Error::Lookup(format!(
                        "line {}: expected 2 columns, got {}",
                        lineno + 2,
                        cols.len()
                    )))
                }
            }
        }
        Ok(Self::new(entries, provenance)?.with_note(note.trim()))
    }
}

impl fmt::Display for AlphaLookup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{PROVENANCE_PREFIX} {}", self.provenance)?;
        if !self.note.is_empty() {
            write!(f, "; {}", self.note)?;
        }
        writeln!(f)?;
        writeln!(f, "# alpha nu_alpha")?;
        for (a, nu) in &self.entries {
            writeln!(f, "{a:.2} {nu:.6}")?;
        }
        Ok(())
    }
}

/// Monte-Carlo `α ↦ ν_α` table: for every grid point, `ν_α` is averaged over
/// `trials` independent sample sets of `per_point_n` CMS draws. Fails if the
/// averaged ratios are not strictly decreasing in α.
pub fn build_lookup(
    alphas: &[f64],
    per_point_n: usize,
    trials: usize,
    seed: u64,
) -> Result<AlphaLookup> {
    if alphas.is_empty() || trials == 0 {
        return Err(Error::InvalidArgument("empty grid or zero trials".into()));
    }
    if alphas.iter().any(|a| !(ALPHA_MIN..=ALPHA_MAX).contains(a))
        || alphas.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::InvalidArgument(format!(
            "alpha grid must be strictly increasing within [{ALPHA_MIN}, {ALPHA_MAX}]"
        )));
    }
    let jobs: Vec<(usize, usize)> = (0..alphas.len())
        .flat_map(|i| (0..trials).map(move |t| (i, t)))
        .collect();
    let ratios: Vec<f64> = jobs
        .par_iter()
        .map(|&(i, t)| {
            let stream = rng::derive_seed(seed, (i * trials + t) as u64);
            let mut x = sample_sas(alphas[i], per_point_n, stream)?;
            x.sort_unstable_by(f64::total_cmp);
            nu_alpha_sorted(&x)
        })
        .collect::<Result<_>>()?;
    let entries = alphas
        .iter()
        .zip(ratios.chunks(trials))
        .map(|(&a, chunk)| (a, chunk.iter().sum::<f64>() / trials as f64))
        .collect();
    AlphaLookup::new(entries, Provenance::MonteCarlo).map_err(|e| match e {
        Error::Lookup(msg) => Error::Lookup(format!("monotonicity failure: {msg}")),
        other => other,
    })
}
