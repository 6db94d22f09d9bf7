//! Python bindings. Signals cross the boundary as lists of floats plus a
//! sample rate; heavy calls release the GIL.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use hhtalpha::emd::{EemdConfig, EmdConfig, ImfSet};
use hhtalpha::enhance::{AlphaProfile, EnhanceConfig, ThresholdCombine};
use hhtalpha::metrics::{Metric, MetricConfig};
use hhtalpha::signal::WindowKind;
use hhtalpha::stable::AlphaLookup;
use hhtalpha::{Error, Signal};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } | Error::Wav { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn signal(samples: Vec<f64>, sample_rate: u32) -> PyResult<Signal> {
    Signal::new(samples, sample_rate).map_err(to_py)
}

/// Enhancement parameters; defaults are the published operating point.
#[pyclass(name = "EnhanceConfig", module = "hhtalpha", from_py_object)]
#[derive(Clone)]
struct PyEnhanceConfig {
    #[pyo3(get, set)]
    frame_len: usize,
    #[pyo3(get, set)]
    step: usize,
    #[pyo3(get, set)]
    mu: f64,
    #[pyo3(get, set)]
    alpha_min: f64,
    #[pyo3(get, set)]
    ensemble_size: usize,
    #[pyo3(get, set)]
    ensemble_snr_db: f64,
    #[pyo3(get, set)]
    max_modes: usize,
    #[pyo3(get, set)]
    seed: u64,
    /// "floor" or "literal_min"
    #[pyo3(get, set)]
    threshold_mode: String,
}

#[pymethods]
impl PyEnhanceConfig {
    #[new]
    #[pyo3(signature = (
        frame_len = 10240, step = 128, mu = 0.8, alpha_min = 1.1, ensemble_size = 50,
        ensemble_snr_db = 30.0, max_modes = 10, seed = 0, threshold_mode = "floor".to_string()
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        frame_len: usize,
        step: usize,
        mu: f64,
        alpha_min: f64,
        ensemble_size: usize,
        ensemble_snr_db: f64,
        max_modes: usize,
        seed: u64,
        threshold_mode: String,
    ) -> Self {
        Self {
            frame_len,
            step,
            mu,
            alpha_min,
            ensemble_size,
            ensemble_snr_db,
            max_modes,
            seed,
            threshold_mode,
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "EnhanceConfig(frame_len={}, step={}, mu={}, alpha_min={}, ensemble_size={}, \
             ensemble_snr_db={}, max_modes={}, seed={}, threshold_mode='{}')",
            self.frame_len,
            self.step,
            self.mu,
            self.alpha_min,
            self.ensemble_size,
            self.ensemble_snr_db,
            self.max_modes,
            self.seed,
            self.threshold_mode
        )
    }
}

impl PyEnhanceConfig {
    fn to_core(&self) -> PyResult<EnhanceConfig> {
        let threshold_combine = match self.threshold_mode.as_str() {
            "floor" => ThresholdCombine::Floor,
            "literal_min" | "literal-min" => ThresholdCombine::LiteralMin,
            other => {
                return Err(PyValueError::new_err(format!(
                    "threshold_mode must be 'floor' or 'literal_min', got '{other}'"
                )))
            }
        };
        let cfg = EnhanceConfig {
            eemd: eemd_config(
                self.ensemble_size,
                self.ensemble_snr_db,
                self.max_modes,
                self.seed,
            ),
            frame_len: self.frame_len,
            step: self.step,
            mu: self.mu,
            alpha_min: self.alpha_min,
            threshold_combine,
            window: WindowKind::Hann,
        };
        cfg.validate().map_err(to_py)?;
        Ok(cfg)
    }
}

fn eemd_config(
    ensemble_size: usize,
    ensemble_snr_db: f64,
    max_modes: usize,
    seed: u64,
) -> EemdConfig {
    EemdConfig {
        emd: EmdConfig {
            max_modes,
            ..Default::default()
        },
        ensemble_size,
        ensemble_snr_db,
        master_seed: seed,
    }
}

/// Per-frame α of every mode and of the input, with the selection made.
#[pyclass(name = "AlphaProfile", module = "hhtalpha", frozen)]
struct PyAlphaProfile(AlphaProfile);

#[pymethods]
impl PyAlphaProfile {
    #[getter]
    fn num_frames(&self) -> usize {
        self.0.num_frames()
    }

    #[getter]
    fn num_modes(&self) -> usize {
        self.0.num_modes()
    }

    /// `per_mode[q][m]`: α of mode `m + 1` in frame `q`.
    #[getter]
    fn per_mode(&self) -> Vec<Vec<f64>> {
        self.0.per_mode().to_vec()
    }

    #[getter]
    fn noisy(&self) -> Vec<f64> {
        self.0.noisy().to_vec()
    }

    #[getter]
    fn thresholds(&self) -> Vec<f64> {
        self.0.thresholds().to_vec()
    }

    #[getter]
    fn cut_index(&self) -> Vec<usize> {
        self.0.cut_index().to_vec()
    }

    fn mean_per_mode(&self) -> Vec<f64> {
        self.0.mean_per_mode()
    }

    fn to_csv(&self) -> String {
        self.0.to_csv()
    }
}

/// Modes and residual of an ensemble EMD.
#[pyclass(name = "Decomposition", module = "hhtalpha", frozen)]
struct PyDecomposition(ImfSet);

#[pymethods]
impl PyDecomposition {
    #[getter]
    fn modes(&self) -> Vec<Vec<f64>> {
        self.0
            .modes()
            .iter()
            .map(|m| m.samples().to_vec())
            .collect()
    }

    #[getter]
    fn residual(&self) -> Vec<f64> {
        self.0.residual().samples().to_vec()
    }

    #[getter]
    fn num_modes(&self) -> usize {
        self.0.num_modes()
    }

    /// Sum of all modes and the residual.
    fn reconstruct(&self) -> Vec<f64> {
        self.0.reconstruct()
    }
}

#[pyfunction]
#[pyo3(signature = (samples, sample_rate, config = None))]
fn enhance(
    py: Python<'_>,
    samples: Vec<f64>,
    sample_rate: u32,
    config: Option<PyEnhanceConfig>,
) -> PyResult<(Vec<f64>, PyAlphaProfile)> {
    let cfg = config.map_or_else(|| Ok(EnhanceConfig::default()), |c| c.to_core())?;
    let x = signal(samples, sample_rate)?;
    let (y, profile) = py
        .detach(|| hhtalpha::enhance::enhance(&x, &cfg, AlphaLookup::embedded()))
        .map_err(to_py)?;
    Ok((y.into_samples(), PyAlphaProfile(profile)))
}

#[pyfunction]
#[pyo3(signature = (samples, sample_rate, ensemble_size = 50, ensemble_snr_db = 30.0, max_modes = 10, seed = 0))]
fn eemd(
    py: Python<'_>,
    samples: Vec<f64>,
    sample_rate: u32,
    ensemble_size: usize,
    ensemble_snr_db: f64,
    max_modes: usize,
    seed: u64,
) -> PyResult<PyDecomposition> {
    let cfg = eemd_config(ensemble_size, ensemble_snr_db, max_modes, seed);
    let x = signal(samples, sample_rate)?;
    let imfs = py.detach(|| hhtalpha::emd::eemd(&x, &cfg)).map_err(to_py)?;
    Ok(PyDecomposition(imfs))
}

/// Returns `(alpha, nu_alpha)`.
#[pyfunction]
fn estimate_alpha(samples: Vec<f64>) -> PyResult<(f64, f64)> {
    let e = hhtalpha::stable::estimate_alpha(&samples, AlphaLookup::embedded()).map_err(to_py)?;
    Ok((e.alpha, e.nu_alpha))
}

#[pyfunction]
#[pyo3(signature = (alpha, n, seed = 0))]
fn sample_sas(alpha: f64, n: usize, seed: u64) -> PyResult<Vec<f64>> {
    hhtalpha::stable::sample_sas(alpha, n, seed).map_err(to_py)
}

/// Metric values as a dict; `metrics` is a subset of "llr", "fwsnrseg",
/// "stoi" (all by default).
#[pyfunction]
#[pyo3(signature = (clean, processed, sample_rate, metrics = None))]
fn evaluate<'py>(
    py: Python<'py>,
    clean: Vec<f64>,
    processed: Vec<f64>,
    sample_rate: u32,
    metrics: Option<Vec<String>>,
) -> PyResult<Bound<'py, PyDict>> {
    let selected: Vec<Metric> = match metrics {
        Some(names) => names
            .iter()
            .map(|n| n.parse())
            .collect::<Result<_, _>>()
            .map_err(to_py)?,
        None => Metric::ALL.to_vec(),
    };
    let (x, y) = (signal(clean, sample_rate)?, signal(processed, sample_rate)?);
    let report = py
        .detach(|| hhtalpha::metrics::evaluate(&x, &y, &selected, &MetricConfig::default()))
        .map_err(to_py)?;
    let out = PyDict::new(py);
    let fields = [
        ("llr", report.llr),
        ("fwsnrseg_db", report.fwsnrseg_db),
        ("stoi", report.stoi),
        ("stoi_pct", report.stoi_pct),
    ];
    for (key, value) in fields {
        if let Some(v) = value {
            out.set_item(key, v)?;
        }
    }
    Ok(out)
}

/// `100 / (1 + exp(a·d + b))`.
#[pyfunction]
fn map_intelligibility(d: f64, a: f64, b: f64) -> f64 {
    hhtalpha::metrics::map_intelligibility(d, a, b)
}

/// Returns `(samples, sample_rate)` of a mono PCM16 or float WAV.
#[pyfunction]
fn read_wav(path: std::path::PathBuf) -> PyResult<(Vec<f64>, u32)> {
    let s = hhtalpha::signal::read_wav(path).map_err(to_py)?;
    let rate = s.sample_rate();
    Ok((s.into_samples(), rate))
}

/// Writes float32 mono.
#[pyfunction]
fn write_wav(path: std::path::PathBuf, samples: Vec<f64>, sample_rate: u32) -> PyResult<()> {
    hhtalpha::signal::write_wav(&signal(samples, sample_rate)?, path).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (sample_rate, duration_s, seed = 0))]
fn speech_proxy(sample_rate: u32, duration_s: f64, seed: u64) -> PyResult<Vec<f64>> {
    Ok(hhtalpha::synth::speech_proxy(sample_rate, duration_s, seed)
        .map_err(to_py)?
        .into_samples())
}

/// Symmetric α-stable noise peak-normalized to 0.5.
#[pyfunction]
#[pyo3(signature = (alpha, n, seed = 0))]
fn stable_noise(alpha: f64, n: usize, seed: u64) -> PyResult<Vec<f64>> {
    // the rate is only carried along
    Ok(hhtalpha::synth::stable_noise(alpha, n, 1, seed)
        .map_err(to_py)?
        .into_samples())
}

/// Returns `(mixture, scaled_noise)` with the SNR measured over the active
/// region of `clean`.
#[pyfunction]
#[pyo3(signature = (clean, noise, snr_db, sample_rate, seed = 0))]
fn mix_at_snr(
    clean: Vec<f64>,
    noise: Vec<f64>,
    snr_db: f64,
    sample_rate: u32,
    seed: u64,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let (x, n) = (signal(clean, sample_rate)?, signal(noise, sample_rate)?);
    let (mix, scaled) = hhtalpha::synth::mix_at_snr(&x, &n, snr_db, seed).map_err(to_py)?;
    Ok((mix.into_samples(), scaled.into_samples()))
}

#[pymodule]
#[pyo3(name = "hhtalpha")]
fn hhtalpha_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEnhanceConfig>()?;
    m.add_class::<PyAlphaProfile>()?;
    m.add_class::<PyDecomposition>()?;
    m.add_function(wrap_pyfunction!(enhance, m)?)?;
    m.add_function(wrap_pyfunction!(eemd, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(sample_sas, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(map_intelligibility, m)?)?;
    m.add_function(wrap_pyfunction!(read_wav, m)?)?;
    m.add_function(wrap_pyfunction!(write_wav, m)?)?;
    m.add_function(wrap_pyfunction!(speech_proxy, m)?)?;
    m.add_function(wrap_pyfunction!(stable_noise, m)?)?;
    m.add_function(wrap_pyfunction!(mix_at_snr, m)?)?;
    Ok(())
}
