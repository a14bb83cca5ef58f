//! Closed-form clock-cycle models for the two kernels in both coding
//! styles, calibrated against measured synthesis results.
//!
//! The built-in `paper-table` profile reproduces the measured counts:
//!
//! * conv/restructured is exactly `width * height` (one pixel per cycle;
//!   pipeline fill is reported separately as latency, not in the headline
//!   number);
//! * conv/software costs 68 cycles per pixel plus one fixed cycle, i.e.
//!   20889601 at 640x480;
//! * huffman/software follows `27 n^2 + 247 n + 537`, the quadratic shape
//!   of re-sorting the node list on every merge, which gives 7889921 at
//!   n = 536;
//! * huffman/restructured is linear in the 2n - 1 nodes touched,
//!   `(3138 / 1071) * (2n - 1) + 4`, giving 3142 at n = 536.
//!
//! Frequencies are always inputs, never predicted; throughput is simply
//! `freq / cycles`.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    Huffman,
    Conv,
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::Huffman => write!(f, "huffman"),
            Kernel::Conv => write!(f, "conv"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Style {
    Software,
    Restructured,
}

impl fmt::Display for Style {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Style::Software => write!(f, "software"),
            Style::Restructured => write!(f, "restructured"),
        }
    }
}

/// A kernel, a coding style, and the size parameters of one loop nest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopSchedule {
    Huffman { style: Style, symbols: u32 },
    Conv { style: Style, width: u32, height: u32 },
}

/// Keeps quadratic evaluation exact in f64.
const MAX_HUFFMAN_SYMBOLS: u32 = 100_000_000;
/// Keeps `width * height` well inside u64/f64 exact range.
const MAX_CONV_DIM: u32 = 1_000_000;

impl LoopSchedule {
    pub fn huffman(style: Style, symbols: u32) -> Result<Self, CycleModelError> {
        if symbols == 0 {
            return Err(CycleModelError::InvalidSize(
                "symbol count must be positive".into(),
            ));
        }
        if symbols > MAX_HUFFMAN_SYMBOLS {
            return Err(CycleModelError::InvalidSize(format!(
                "symbol count {symbols} exceeds the supported maximum {MAX_HUFFMAN_SYMBOLS}"
            )));
        }
        Ok(LoopSchedule::Huffman { style, symbols })
    }

    pub fn conv(style: Style, width: u32, height: u32) -> Result<Self, CycleModelError> {
        if width < 3 || height < 3 {
            return Err(CycleModelError::InvalidSize(format!(
                "convolution needs width and height >= 3, got {width}x{height}"
            )));
        }
        if width > MAX_CONV_DIM || height > MAX_CONV_DIM {
            return Err(CycleModelError::InvalidSize(format!(
                "dimensions {width}x{height} exceed the supported maximum {MAX_CONV_DIM}"
            )));
        }
        Ok(LoopSchedule::Conv {
            style,
            width,
            height,
        })
    }

    pub fn kernel(&self) -> Kernel {
        match self {
            LoopSchedule::Huffman { .. } => Kernel::Huffman,
            LoopSchedule::Conv { .. } => Kernel::Conv,
        }
    }

    pub fn style(&self) -> Style {
        match self {
            LoopSchedule::Huffman { style, .. } => *style,
            LoopSchedule::Conv { style, .. } => *style,
        }
    }
}

/// Per-(kernel, style) cost constants under one calibration.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationProfile {
    name: String,
    conv_sw_per_pixel: f64,
    conv_sw_overhead: f64,
    huff_sw_quadratic: f64,
    huff_sw_linear: f64,
    huff_sw_constant: f64,
    huff_rs_per_node: f64,
    huff_rs_fill: f64,
}

pub const PAPER_TABLE_PROFILE: &str = "paper-table";

impl CalibrationProfile {
    /// The default calibration; see the module docs for the derivations.
    pub fn paper_table() -> Self {
        CalibrationProfile {
            name: PAPER_TABLE_PROFILE.to_string(),
            conv_sw_per_pixel: 68.0,
            conv_sw_overhead: 1.0,
            huff_sw_quadratic: 27.0,
            huff_sw_linear: 247.0,
            huff_sw_constant: 537.0,
            huff_rs_per_node: 3138.0 / 1071.0,
            huff_rs_fill: 4.0,
        }
    }

    pub fn by_name(name: &str) -> Result<Self, CycleModelError> {
        match name {
            PAPER_TABLE_PROFILE => Ok(Self::paper_table()),
            other => Err(CycleModelError::UnknownProfile(other.to_string())),
        }
    }

    /// Builds a custom calibration; every constant must be positive.
    #[allow(clippy::too_many_arguments)]
    pub fn custom(
        name: &str,
        conv_sw_per_pixel: f64,
        conv_sw_overhead: f64,
        huff_sw_quadratic: f64,
        huff_sw_linear: f64,
        huff_sw_constant: f64,
        huff_rs_per_node: f64,
        huff_rs_fill: f64,
    ) -> Result<Self, CycleModelError> {
        let constants = [
            ("conv_sw_per_pixel", conv_sw_per_pixel),
            ("conv_sw_overhead", conv_sw_overhead),
            ("huff_sw_quadratic", huff_sw_quadratic),
            ("huff_sw_linear", huff_sw_linear),
            ("huff_sw_constant", huff_sw_constant),
            ("huff_rs_per_node", huff_rs_per_node),
            ("huff_rs_fill", huff_rs_fill),
        ];
        for (what, v) in constants {
            if v <= 0.0 || !v.is_finite() {
                return Err(CycleModelError::NonPositiveConstant(what));
            }
        }
        Ok(CalibrationProfile {
            name: name.to_string(),
            conv_sw_per_pixel,
            conv_sw_overhead,
            huff_sw_quadratic,
            huff_sw_linear,
            huff_sw_constant,
            huff_rs_per_node,
            huff_rs_fill,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

/// A cycle count plus the pipeline fill excluded from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CycleEstimate {
    pub cycles: u64,
    pub latency: u64,
}

#[derive(Debug)]
pub enum CycleModelError {
    UnknownProfile(String),
    InvalidSize(String),
    InvalidFrequency(f64),
    NonPositiveConstant(&'static str),
}

impl fmt::Display for CycleModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CycleModelError::UnknownProfile(name) => write!(f, "unknown profile \"{name}\""),
            CycleModelError::InvalidSize(msg) => write!(f, "invalid size: {msg}"),
            CycleModelError::InvalidFrequency(v) => {
                write!(f, "frequency must be positive and finite, got {v}")
            }
            CycleModelError::NonPositiveConstant(what) => {
                write!(f, "profile constant {what} must be positive")
            }
        }
    }
}

impl std::error::Error for CycleModelError {}

/// Evaluates the closed-form model for one schedule.
pub fn estimate_cycles(schedule: &LoopSchedule, profile: &CalibrationProfile) -> CycleEstimate {
    match *schedule {
        LoopSchedule::Conv {
            style: Style::Restructured,
            width,
            height,
        } => CycleEstimate {
            cycles: width as u64 * height as u64,
            latency: width as u64 + 1,
        },
        LoopSchedule::Conv {
            style: Style::Software,
            width,
            height,
        } => {
            let pixels = (width as u64 * height as u64) as f64;
            CycleEstimate {
                cycles: (profile.conv_sw_per_pixel * pixels + profile.conv_sw_overhead).round()
                    as u64,
                latency: 0,
            }
        }
        LoopSchedule::Huffman {
            style: Style::Restructured,
            symbols,
        } => {
            let nodes = 2.0 * symbols as f64 - 1.0;
            CycleEstimate {
                cycles: (profile.huff_rs_per_node * nodes + profile.huff_rs_fill).round() as u64,
                latency: profile.huff_rs_fill.round() as u64,
            }
        }
        LoopSchedule::Huffman {
            style: Style::Software,
            symbols,
        } => {
            let n = symbols as f64;
            CycleEstimate {
                cycles: (profile.huff_sw_quadratic * n * n
                    + profile.huff_sw_linear * n
                    + profile.huff_sw_constant)
                    .round() as u64,
                latency: 0,
            }
        }
    }
}

/// Operations per second at the given clock: `freq_mhz * 1e6 / cycles`.
pub fn throughput(estimate: &CycleEstimate, freq_mhz: f64) -> Result<f64, CycleModelError> {
    if !(freq_mhz > 0.0) || !freq_mhz.is_finite() {
        return Err(CycleModelError::InvalidFrequency(freq_mhz));
    }
    Ok(freq_mhz * 1e6 / estimate.cycles as f64)
}

/// `a.cycles / b.cycles` as a float.
pub fn cycle_ratio(a: &CycleEstimate, b: &CycleEstimate) -> f64 {
    a.cycles as f64 / b.cycles as f64
}

/// Size parameters for one kernel, used when comparing the two styles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelSize {
    Huffman { symbols: u32 },
    Conv { width: u32, height: u32 },
}

impl KernelSize {
    pub fn kernel(&self) -> Kernel {
        match self {
            KernelSize::Huffman { .. } => Kernel::Huffman,
            KernelSize::Conv { .. } => Kernel::Conv,
        }
    }

    fn schedule(&self, style: Style) -> Result<LoopSchedule, CycleModelError> {
        match *self {
            KernelSize::Huffman { symbols } => LoopSchedule::huffman(style, symbols),
            KernelSize::Conv { width, height } => LoopSchedule::conv(style, width, height),
        }
    }
}

/// One side of a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonSide {
    pub cycles: u64,
    pub latency: u64,
    pub freq_mhz: f64,
    pub throughput: f64,
}

/// Software vs. restructured at the same size. Ratios follow the
/// software-over-restructured convention, so a large cycle ratio and a
/// small throughput ratio both say the software style loses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub kernel: Kernel,
    pub profile: String,
    pub software: ComparisonSide,
    pub restructured: ComparisonSide,
    pub cycle_ratio: f64,
    pub throughput_ratio: f64,
}

pub fn compare(
    size: &KernelSize,
    profile: &CalibrationProfile,
    freq_software_mhz: f64,
    freq_restructured_mhz: f64,
) -> Result<Comparison, CycleModelError> {
    let sw = estimate_cycles(&size.schedule(Style::Software)?, profile);
    let rs = estimate_cycles(&size.schedule(Style::Restructured)?, profile);
    let sw_tp = throughput(&sw, freq_software_mhz)?;
    let rs_tp = throughput(&rs, freq_restructured_mhz)?;
    Ok(Comparison {
        kernel: size.kernel(),
        profile: profile.name.clone(),
        software: ComparisonSide {
            cycles: sw.cycles,
            latency: sw.latency,
            freq_mhz: freq_software_mhz,
            throughput: sw_tp,
        },
        restructured: ComparisonSide {
            cycles: rs.cycles,
            latency: rs.latency,
            freq_mhz: freq_restructured_mhz,
            throughput: rs_tp,
        },
        cycle_ratio: cycle_ratio(&sw, &rs),
        throughput_ratio: sw_tp / rs_tp,
    })
}
