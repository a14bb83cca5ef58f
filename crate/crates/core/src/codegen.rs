//! HLS-C template instantiation for the two kernel architectures.
//!
//! Templates are plain text with typed substitution slots; two templates
//! are enough that an AST buys nothing and golden-file tests stay trivial.
//! Every emitted source also compiles under an ordinary C compiler: the
//! `#pragma HLS PIPELINE` lines are no-ops there, and defining the harness
//! macro named in the manifest turns on a `main` that reads fixtures from
//! stdin, so generated code can be executed and checked against the
//! simulators without any synthesis tool.

use std::fmt;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::stencil::{SOBEL_GX_STANDARD, SOBEL_GY_STANDARD};

const CONV_HEADER: &str = include_str!("../templates/conv2d_stream.h.in");
const CONV_SOURCE: &str = include_str!("../templates/conv2d_stream.c.in");
const HUFFMAN_HEADER: &str = include_str!("../templates/huffman_tree.h.in");
const HUFFMAN_SOURCE: &str = include_str!("../templates/huffman_tree.c.in");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TemplateId {
    #[serde(rename = "conv2d_stream")]
    Conv2dStream,
    #[serde(rename = "huffman_tree")]
    HuffmanTree,
}

impl fmt::Display for TemplateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemplateId::Conv2dStream => write!(f, "conv2d_stream"),
            TemplateId::HuffmanTree => write!(f, "huffman_tree"),
        }
    }
}

/// Loop-nest regularity of the kernel a template implements: static bounds
/// and direct addressing, or data-dependent control and indirection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelClass {
    Regular,
    Irregular,
}

impl TemplateId {
    pub fn classification(&self) -> KernelClass {
        match self {
            TemplateId::Conv2dStream => KernelClass::Regular,
            TemplateId::HuffmanTree => KernelClass::Irregular,
        }
    }
}

/// Parameters for the streaming convolution template. `gx`/`gy` default to
/// the standard Sobel pair, which is only defined for `k = 3`; larger
/// kernels must supply coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvTemplateParams {
    pub k: u32,
    pub width: u32,
    pub height: u32,
    pub pixel_bits: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gx: Option<Vec<Vec<i32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gy: Option<Vec<Vec<i32>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HuffmanTemplateParams {
    pub n: u32,
    pub symbol_bits: u32,
    pub freq_bits: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TemplateParams {
    Conv2dStream(ConvTemplateParams),
    HuffmanTree(HuffmanTemplateParams),
}

impl TemplateParams {
    pub fn template(&self) -> TemplateId {
        match self {
            TemplateParams::Conv2dStream(_) => TemplateId::Conv2dStream,
            TemplateParams::HuffmanTree(_) => TemplateId::HuffmanTree,
        }
    }

    /// Parses the JSON parameter object for the given template.
    pub fn from_json(id: TemplateId, text: &str) -> Result<Self, CodegenError> {
        match id {
            TemplateId::Conv2dStream => serde_json::from_str(text)
                .map(TemplateParams::Conv2dStream)
                .map_err(|e| CodegenError::BadParamsJson(e.to_string())),
            TemplateId::HuffmanTree => serde_json::from_str(text)
                .map(TemplateParams::HuffmanTree)
                .map_err(|e| CodegenError::BadParamsJson(e.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedFile {
    pub name: String,
    pub contents: String,
}

/// One instantiated template: header, source, and a JSON manifest.
/// Identical parameters always yield byte-identical files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedSource {
    pub template: TemplateId,
    pub files: Vec<GeneratedFile>,
}

impl GeneratedSource {
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files
            .iter()
            .find(|f| f.name == name)
            .map(|f| f.contents.as_str())
    }

    pub fn write_to_dir(&self, dir: &Path) -> io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for f in &self.files {
            std::fs::write(dir.join(&f.name), &f.contents)?;
        }
        Ok(())
    }
}

#[derive(Debug)]
pub enum CodegenError {
    /// Every violated constraint, one message per parameter.
    Invalid(Vec<String>),
    BadParamsJson(String),
    /// A template slot was left unresolved; a bug, not user error.
    Render(String),
    Io(io::Error),
}

impl fmt::Display for CodegenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodegenError::Invalid(violations) => {
                write!(f, "invalid parameters: {}", violations.join("; "))
            }
            CodegenError::BadParamsJson(msg) => write!(f, "bad parameter json: {msg}"),
            CodegenError::Render(msg) => write!(f, "template rendering failed: {msg}"),
            CodegenError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CodegenError {}

impl From<io::Error> for CodegenError {
    fn from(e: io::Error) -> Self {
        CodegenError::Io(e)
    }
}

const SUPPORTED_BIT_WIDTHS: [u32; 3] = [8, 16, 32];
/// Keeps `int` indexing in the generated C safe.
const MAX_CONV_TEMPLATE_DIM: u32 = 32_768;

fn check_coeffs(what: &str, k: u32, m: &[Vec<i32>], violations: &mut Vec<String>) {
    if m.len() != k as usize || m.iter().any(|row| row.len() != k as usize) {
        violations.push(format!("{what} must be a {k}x{k} matrix"));
        return;
    }
    for row in m {
        for &v in row {
            if !(-128..=127).contains(&v) {
                violations.push(format!(
                    "{what} coefficient {v} outside signed 8-bit range"
                ));
                return;
            }
        }
    }
}

/// Checks every invariant and reports all violations together.
pub fn validate_params(params: &TemplateParams) -> Result<(), CodegenError> {
    let mut violations = Vec::new();
    match params {
        TemplateParams::Conv2dStream(p) => {
            if p.k % 2 == 0 {
                violations.push("K must be odd".to_string());
            }
            if p.k < 3 {
                violations.push(format!("K must be >= 3, got {}", p.k));
            }
            if p.width < p.k {
                violations.push(format!("width {} must be >= K {}", p.width, p.k));
            }
            if p.height < p.k {
                violations.push(format!("height {} must be >= K {}", p.height, p.k));
            }
            if p.width > MAX_CONV_TEMPLATE_DIM || p.height > MAX_CONV_TEMPLATE_DIM {
                violations.push(format!(
                    "dimensions {}x{} exceed the supported maximum {MAX_CONV_TEMPLATE_DIM}",
                    p.width, p.height
                ));
            }
            if !SUPPORTED_BIT_WIDTHS.contains(&p.pixel_bits) {
                violations.push(format!(
                    "pixel bit-width must be one of 8/16/32, got {}",
                    p.pixel_bits
                ));
            }
            match (&p.gx, &p.gy) {
                (Some(gx), Some(gy)) => {
                    check_coeffs("gx", p.k, gx, &mut violations);
                    check_coeffs("gy", p.k, gy, &mut violations);
                }
                (None, None) => {
                    if p.k != 3 {
                        violations.push(format!(
                            "default Sobel coefficients are 3x3; K = {} needs explicit gx/gy",
                            p.k
                        ));
                    }
                }
                _ => violations.push("gx and gy must be given together".to_string()),
            }
        }
        TemplateParams::HuffmanTree(p) => {
            if p.n < 2 {
                violations.push(format!("n must be >= 2, got {}", p.n));
            }
            if !SUPPORTED_BIT_WIDTHS.contains(&p.symbol_bits) {
                violations.push(format!(
                    "symbol bit-width must be one of 8/16/32, got {}",
                    p.symbol_bits
                ));
            }
            if !SUPPORTED_BIT_WIDTHS.contains(&p.freq_bits) {
                violations.push(format!(
                    "frequency bit-width must be one of 8/16/32, got {}",
                    p.freq_bits
                ));
            }
            if SUPPORTED_BIT_WIDTHS.contains(&p.symbol_bits)
                && p.symbol_bits < 32
                && u64::from(p.n) > (1u64 << p.symbol_bits) - 1
            {
                violations.push(format!(
                    "n = {} does not fit the {}-bit symbol type (the internal marker is n itself)",
                    p.n, p.symbol_bits
                ));
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(CodegenError::Invalid(violations))
    }
}

fn render(template: &str, slots: &[(&str, String)]) -> Result<String, CodegenError> {
    let mut out = template.to_string();
    for (name, value) in slots {
        out = out.replace(&format!("{{{{{name}}}}}"), value);
    }
    if let Some(pos) = out.find("{{") {
        let tail: String = out[pos..].chars().take(24).collect();
        return Err(CodegenError::Render(format!(
            "unresolved slot near \"{tail}\""
        )));
    }
    Ok(out)
}

fn unsigned_type(bits: u32) -> &'static str {
    match bits {
        8 => "unsigned char",
        16 => "unsigned short",
        _ => "unsigned int",
    }
}

fn coeff_init(m: &[Vec<i32>]) -> String {
    let rows: Vec<String> = m
        .iter()
        .map(|row| {
            let items: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            format!("{{{}}}", items.join(", "))
        })
        .collect();
    format!("{{ {} }}", rows.join(", "))
}

fn manifest(
    template: TemplateId,
    params_json: serde_json::Value,
    files: &[&str],
    harness_define: &str,
    pipeline_pragmas: u32,
) -> String {
    let value = serde_json::json!({
        "schema": 1,
        "template": template,
        "classification": template.classification(),
        "params": params_json,
        "files": files,
        "harness_define": harness_define,
        "pipeline_pragmas": pipeline_pragmas,
    });
    let mut text = serde_json::to_string_pretty(&value).expect("manifest serializes");
    text.push('\n');
    text
}

fn instantiate_conv(p: &ConvTemplateParams) -> Result<GeneratedSource, CodegenError> {
    let gx = p.gx.clone().unwrap_or_else(|| {
        SOBEL_GX_STANDARD
            .values()
            .iter()
            .map(|r| r.to_vec())
            .collect()
    });
    let gy = p.gy.clone().unwrap_or_else(|| {
        SOBEL_GY_STANDARD
            .values()
            .iter()
            .map(|r| r.to_vec())
            .collect()
    });
    let margin = p.k / 2;
    let pixels = u64::from(p.width) * u64::from(p.height);
    let latency = u64::from(margin) * (u64::from(p.width) + 1);
    let wide = p.pixel_bits > 8;
    let slots = [
        ("K", p.k.to_string()),
        ("KM1", (p.k - 1).to_string()),
        ("WIDTH", p.width.to_string()),
        ("HEIGHT", p.height.to_string()),
        ("PIXELS", pixels.to_string()),
        ("MARGIN", margin.to_string()),
        ("LATENCY", latency.to_string()),
        ("PIXEL_TYPE", unsigned_type(p.pixel_bits).to_string()),
        ("PIXEL_MAX", ((1u64 << p.pixel_bits) - 1).to_string()),
        (
            "RESPONSE_TYPE",
            if wide { "long long" } else { "int" }.to_string(),
        ),
        (
            "ACC_TYPE",
            if wide { "long long" } else { "int" }.to_string(),
        ),
        ("RESPONSE_FMT", if wide { "%lld" } else { "%d" }.to_string()),
        ("GX_INIT", coeff_init(&gx)),
        ("GY_INIT", coeff_init(&gy)),
    ];
    let header = render(CONV_HEADER, &slots)?;
    let source = render(CONV_SOURCE, &slots)?;
    let manifest = manifest(
        TemplateId::Conv2dStream,
        serde_json::to_value(p).expect("params serialize"),
        &["conv2d_stream.h", "conv2d_stream.c"],
        "CONV2D_STREAM_HARNESS",
        1,
    );
    Ok(GeneratedSource {
        template: TemplateId::Conv2dStream,
        files: vec![
            GeneratedFile {
                name: "conv2d_stream.h".into(),
                contents: header,
            },
            GeneratedFile {
                name: "conv2d_stream.c".into(),
                contents: source,
            },
            GeneratedFile {
                name: "manifest.json".into(),
                contents: manifest,
            },
        ],
    })
}

fn instantiate_huffman(p: &HuffmanTemplateParams) -> Result<GeneratedSource, CodegenError> {
    let slots = [
        ("N", p.n.to_string()),
        ("INTERNAL", (p.n - 1).to_string()),
        ("SYMBOL_TYPE", unsigned_type(p.symbol_bits).to_string()),
        ("FREQ_TYPE", unsigned_type(p.freq_bits).to_string()),
        ("FREQ_MAX", ((1u64 << p.freq_bits) - 1).to_string()),
    ];
    let header = render(HUFFMAN_HEADER, &slots)?;
    let source = render(HUFFMAN_SOURCE, &slots)?;
    let manifest = manifest(
        TemplateId::HuffmanTree,
        serde_json::to_value(p).expect("params serialize"),
        &["huffman_tree.h", "huffman_tree.c"],
        "HUFFMAN_TREE_HARNESS",
        2,
    );
    Ok(GeneratedSource {
        template: TemplateId::HuffmanTree,
        files: vec![
            GeneratedFile {
                name: "huffman_tree.h".into(),
                contents: header,
            },
            GeneratedFile {
                name: "huffman_tree.c".into(),
                contents: source,
            },
            GeneratedFile {
                name: "manifest.json".into(),
                contents: manifest,
            },
        ],
    })
}

/// Validates and renders one template instantiation.
pub fn instantiate(params: &TemplateParams) -> Result<GeneratedSource, CodegenError> {
    validate_params(params)?;
    match params {
        TemplateParams::Conv2dStream(p) => instantiate_conv(p),
        TemplateParams::HuffmanTree(p) => instantiate_huffman(p),
    }
}

/// The parameter sets frozen by the golden-file tests.
pub fn canonical_conv_params() -> ConvTemplateParams {
    ConvTemplateParams {
        k: 3,
        width: 640,
        height: 480,
        pixel_bits: 8,
        gx: None,
        gy: None,
    }
}

pub fn canonical_huffman_params() -> HuffmanTemplateParams {
    HuffmanTemplateParams {
        n: 536,
        symbol_bits: 16,
        freq_bits: 32,
    }
}
