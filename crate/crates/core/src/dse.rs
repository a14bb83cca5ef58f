//! Exhaustive design-space exploration over template parameters, scored by
//! the cycle model and a block-RAM proxy, with Pareto-frontier extraction
//! over (cycles, BRAM), both minimized.
//!
//! The BRAM proxy counts one bank per line-buffer row once a row outgrows
//! the register threshold, sized against 18-kilobit blocks; the Huffman
//! architectures use fixed measured constants. Slices and power are out of
//! reach without synthesis and are deliberately not modeled.

use std::fmt;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::codegen::TemplateId;
use crate::cycle_model::{
    estimate_cycles, CalibrationProfile, CycleModelError, LoopSchedule, Style,
};

/// Bits a line-buffer row may hold before it moves from fabric registers
/// into block RAM.
pub const REGISTER_THRESHOLD_BITS: u64 = 1024;
/// Capacity of one block-RAM bank.
pub const BRAM_BITS: u64 = 18 * 1024;
/// Measured constants for the fixed Huffman architectures.
const HUFFMAN_RESTRUCTURED_BRAMS: u64 = 2;
const HUFFMAN_SOFTWARE_BRAMS: u64 = 9;

/// Default cap on exhaustive enumeration.
pub const DEFAULT_POINT_LIMIT: usize = 100_000;

/// One parameter assignment within a template's space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum DesignParams {
    Conv {
        style: Style,
        k: u32,
        width: u32,
        height: u32,
        pixel_bits: u32,
    },
    Huffman {
        style: Style,
        n: u32,
    },
}

impl DesignParams {
    pub fn template(&self) -> TemplateId {
        match self {
            DesignParams::Conv { .. } => TemplateId::Conv2dStream,
            DesignParams::Huffman { .. } => TemplateId::HuffmanTree,
        }
    }

    pub fn style(&self) -> Style {
        match self {
            DesignParams::Conv { style, .. } => *style,
            DesignParams::Huffman { style, .. } => *style,
        }
    }
}

/// An evaluated point: parameters plus the two modeled metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DesignPoint {
    #[serde(flatten)]
    pub params: DesignParams,
    pub cycles: u64,
    pub bram: u64,
}

#[derive(Debug)]
pub enum DseError {
    InvalidParams(String),
    EmptyParameter(&'static str),
    /// Cartesian size exceeds the enumeration cap.
    SpaceTooLarge { size: u128, limit: usize },
    EmptyPoints,
    CycleModel(CycleModelError),
    Json(String),
    Io(io::Error),
}

impl fmt::Display for DseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DseError::InvalidParams(msg) => write!(f, "invalid design parameters: {msg}"),
            DseError::EmptyParameter(name) => {
                write!(f, "parameter list \"{name}\" must not be empty")
            }
            DseError::SpaceTooLarge { size, limit } => {
                write!(f, "search space has {size} points, over the limit {limit}")
            }
            DseError::EmptyPoints => write!(f, "no points to take a frontier of"),
            DseError::CycleModel(e) => write!(f, "cycle model: {e}"),
            DseError::Json(msg) => write!(f, "bad space json: {msg}"),
            DseError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for DseError {}

impl From<CycleModelError> for DseError {
    fn from(e: CycleModelError) -> Self {
        DseError::CycleModel(e)
    }
}

impl From<io::Error> for DseError {
    fn from(e: io::Error) -> Self {
        DseError::Io(e)
    }
}

/// Block-RAM count for one parameter assignment.
pub fn estimate_bram(params: &DesignParams) -> Result<u64, DseError> {
    match *params {
        DesignParams::Conv {
            style,
            k,
            width,
            pixel_bits,
            ..
        } => {
            if k < 3 || k % 2 == 0 {
                return Err(DseError::InvalidParams(format!(
                    "K must be odd >= 3, got {k}"
                )));
            }
            if ![8, 16, 32].contains(&pixel_bits) {
                return Err(DseError::InvalidParams(format!(
                    "pixel bit-width must be 8/16/32, got {pixel_bits}"
                )));
            }
            match style {
                // The software loop nest re-reads the image array; no
                // on-chip line storage at all.
                Style::Software => Ok(0),
                Style::Restructured => {
                    let row_bits = u64::from(width) * u64::from(pixel_bits);
                    if row_bits <= REGISTER_THRESHOLD_BITS {
                        Ok(0)
                    } else {
                        Ok(u64::from(k) * row_bits.div_ceil(BRAM_BITS))
                    }
                }
            }
        }
        DesignParams::Huffman { style, n } => {
            if n < 2 {
                return Err(DseError::InvalidParams(format!("n must be >= 2, got {n}")));
            }
            Ok(match style {
                Style::Restructured => HUFFMAN_RESTRUCTURED_BRAMS,
                Style::Software => HUFFMAN_SOFTWARE_BRAMS,
            })
        }
    }
}

/// Discrete per-parameter value lists; the space is their cartesian
/// product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "template")]
pub enum SearchSpace {
    #[serde(rename = "conv2d_stream")]
    Conv {
        style: Vec<Style>,
        k: Vec<u32>,
        width: Vec<u32>,
        height: Vec<u32>,
        pixel_bits: Vec<u32>,
    },
    #[serde(rename = "huffman_tree")]
    Huffman { style: Vec<Style>, n: Vec<u32> },
}

impl SearchSpace {
    pub fn from_json(text: &str) -> Result<Self, DseError> {
        serde_json::from_str(text).map_err(|e| DseError::Json(e.to_string()))
    }

    pub fn size(&self) -> Result<u128, DseError> {
        let dims: Vec<(&'static str, usize)> = match self {
            SearchSpace::Conv {
                style,
                k,
                width,
                height,
                pixel_bits,
            } => vec![
                ("style", style.len()),
                ("k", k.len()),
                ("width", width.len()),
                ("height", height.len()),
                ("pixel_bits", pixel_bits.len()),
            ],
            SearchSpace::Huffman { style, n } => {
                vec![("style", style.len()), ("n", n.len())]
            }
        };
        let mut size: u128 = 1;
        for (name, len) in dims {
            if len == 0 {
                return Err(DseError::EmptyParameter(name));
            }
            size *= len as u128;
        }
        Ok(size)
    }
}

/// Exhaustively evaluates the space in declaration order (last parameter
/// varies fastest). Deterministic: same space and profile, same points.
pub fn explore(
    space: &SearchSpace,
    profile: &CalibrationProfile,
) -> Result<Vec<DesignPoint>, DseError> {
    explore_with_limit(space, profile, DEFAULT_POINT_LIMIT)
}

pub fn explore_with_limit(
    space: &SearchSpace,
    profile: &CalibrationProfile,
    limit: usize,
) -> Result<Vec<DesignPoint>, DseError> {
    let size = space.size()?;
    if size > limit as u128 {
        return Err(DseError::SpaceTooLarge { size, limit });
    }
    let mut points = Vec::with_capacity(size as usize);
    match space {
        SearchSpace::Conv {
            style,
            k,
            width,
            height,
            pixel_bits,
        } => {
            for &style in style {
                for &k in k {
                    for &width in width {
                        for &height in height {
                            for &pixel_bits in pixel_bits {
                                let params = DesignParams::Conv {
                                    style,
                                    k,
                                    width,
                                    height,
                                    pixel_bits,
                                };
                                let bram = estimate_bram(&params)?;
                                let schedule = LoopSchedule::conv(style, width, height)?;
                                let cycles = estimate_cycles(&schedule, profile).cycles;
                                points.push(DesignPoint {
                                    params,
                                    cycles,
                                    bram,
                                });
                            }
                        }
                    }
                }
            }
        }
        SearchSpace::Huffman { style, n } => {
            for &style in style {
                for &n in n {
                    let params = DesignParams::Huffman { style, n };
                    let bram = estimate_bram(&params)?;
                    let schedule = LoopSchedule::huffman(style, n)?;
                    let cycles = estimate_cycles(&schedule, profile).cycles;
                    points.push(DesignPoint {
                        params,
                        cycles,
                        bram,
                    });
                }
            }
        }
    }
    Ok(points)
}

fn dominates(a: &DesignPoint, b: &DesignPoint) -> bool {
    a.cycles <= b.cycles && a.bram <= b.bram && (a.cycles < b.cycles || a.bram < b.bram)
}

/// True for points no other point dominates; metric duplicates of a
/// frontier point all count as on the frontier.
pub fn frontier_flags(points: &[DesignPoint]) -> Vec<bool> {
    points
        .iter()
        .map(|p| !points.iter().any(|q| dominates(q, p)))
        .collect()
}

/// Non-dominated points in input order, one representative per metric
/// pair (the earliest).
pub fn pareto(points: &[DesignPoint]) -> Result<Vec<DesignPoint>, DseError> {
    if points.is_empty() {
        return Err(DseError::EmptyPoints);
    }
    let flags = frontier_flags(points);
    let mut seen = std::collections::HashSet::new();
    let mut result = Vec::new();
    for (p, on) in points.iter().zip(flags) {
        if on && seen.insert((p.cycles, p.bram)) {
            result.push(*p);
        }
    }
    Ok(result)
}

/// Writes `param...,cycles,bram,on_frontier` rows, header included.
pub fn write_results_csv<W: Write>(mut w: W, points: &[DesignPoint]) -> Result<(), DseError> {
    if points.is_empty() {
        return Err(DseError::EmptyPoints);
    }
    let flags = frontier_flags(points);
    match points[0].params {
        DesignParams::Conv { .. } => {
            writeln!(
                w,
                "template,style,k,width,height,pixel_bits,cycles,bram,on_frontier"
            )?;
            for (p, on) in points.iter().zip(flags) {
                if let DesignParams::Conv {
                    style,
                    k,
                    width,
                    height,
                    pixel_bits,
                } = p.params
                {
                    writeln!(
                        w,
                        "conv2d_stream,{style},{k},{width},{height},{pixel_bits},{},{},{}",
                        p.cycles, p.bram, on
                    )?;
                }
            }
        }
        DesignParams::Huffman { .. } => {
            writeln!(w, "template,style,n,cycles,bram,on_frontier")?;
            for (p, on) in points.iter().zip(flags) {
                if let DesignParams::Huffman { style, n } = p.params {
                    writeln!(w, "huffman_tree,{style},{n},{},{},{}", p.cycles, p.bram, on)?;
                }
            }
        }
    }
    Ok(())
}
