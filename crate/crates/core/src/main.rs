//! Batch command-line front end. Every subcommand reads and writes files,
//! prints a JSON report on stdout, and exits nonzero with a one-line
//! diagnostic on stderr (plus a structured JSON error on stdout under
//! `--json`).

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use restruct::codegen::{self, TemplateId, TemplateParams};
use restruct::cycle_model::{
    self, CalibrationProfile, Comparison, CycleEstimate, KernelSize, LoopSchedule, Style,
};
use restruct::dataflow::{self, StreamGraph, Token};
use restruct::dse;
use restruct::huffman::{
    build_tree_reference, build_tree_restructured_with_stats, compute_bit_lengths, BitLengthTable,
    HuffmanError, SortedFreqTable,
};
use restruct::pgm;
use restruct::stencil::{
    self, coeffs_from_json, convolve_reference, convolve_streaming, Coeffs3x3, Image,
    ResponseImage, ResponseMode,
};

#[derive(Parser)]
#[command(
    name = "restruct",
    version,
    about = "Simulators, cycle models, HLS-C code generation, dataflow composition, and \
             design-space exploration for restructured hardware kernels"
)]
struct Cli {
    /// Also print errors as structured JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HuffmanMode {
    Reference,
    Restructured,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConvMode {
    Reference,
    Streaming,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DesignArg {
    Conv,
    Huffman,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StyleArg {
    Software,
    Restructured,
}

impl From<StyleArg> for Style {
    fn from(s: StyleArg) -> Style {
        match s {
            StyleArg::Software => Style::Software,
            StyleArg::Restructured => Style::Restructured,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TemplateArg {
    #[value(name = "conv2d_stream")]
    Conv2dStream,
    #[value(name = "huffman_tree")]
    HuffmanTree,
}

#[derive(Subcommand)]
enum Command {
    /// Build a Huffman tree from a sorted symbol,freq CSV.
    Huffman {
        /// Input CSV with header `symbol,freq`, sorted by freq ascending.
        #[arg(long)]
        freqs: PathBuf,
        #[arg(long, value_enum)]
        mode: HuffmanMode,
        /// Write per-symbol code lengths as `symbol,length` CSV.
        #[arg(long)]
        lengths: Option<PathBuf>,
        /// Write the node arrays CSV (restructured mode only).
        #[arg(long)]
        arrays: Option<PathBuf>,
        /// Also write the JSON report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Convolve a binary PGM image.
    Conv {
        /// Input image, binary PGM (P5), maxval 255.
        #[arg(long)]
        image: PathBuf,
        #[arg(long, value_enum)]
        mode: ConvMode,
        /// sobel-standard, sobel-paper, or a JSON file with gx/gy.
        #[arg(long, default_value = "sobel-standard")]
        kernel: String,
        /// Write the display-mode result as PGM.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write raw signed responses as CSV, one image row per line.
        #[arg(long)]
        raw: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Estimate clock cycles and throughput for one design point.
    Estimate {
        #[arg(long, value_enum)]
        design: DesignArg,
        #[arg(long, value_enum)]
        style: StyleArg,
        #[arg(long)]
        width: Option<u32>,
        #[arg(long)]
        height: Option<u32>,
        /// Symbol count (huffman designs).
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, default_value = "paper-table")]
        profile: String,
        #[arg(long)]
        freq_mhz: f64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Compare the software and restructured styles at one size.
    Compare {
        #[arg(long, value_enum)]
        design: DesignArg,
        #[arg(long)]
        width: Option<u32>,
        #[arg(long)]
        height: Option<u32>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, default_value = "paper-table")]
        profile: String,
        /// Clock for the software design, MHz.
        #[arg(long)]
        freq_software: f64,
        /// Clock for the restructured design, MHz.
        #[arg(long)]
        freq_restructured: f64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Instantiate an HLS-C template into a directory.
    Codegen {
        #[arg(long, value_enum)]
        template: TemplateArg,
        /// JSON file with the template parameters.
        #[arg(long)]
        params: PathBuf,
        /// Output directory for .c/.h/manifest.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Explore a parameter space and write the scored points as CSV.
    Dse {
        /// JSON search-space description.
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Cap on the number of enumerated points.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Run a stream graph over a token file.
    Graph {
        /// JSON graph description.
        #[arg(long)]
        spec: PathBuf,
        /// Input tokens: .pgm pixels or a text file with one integer per line.
        #[arg(long = "in")]
        input: PathBuf,
        /// Output tokens: .pgm (all tokens must be 0..=255) or text.
        #[arg(long = "out")]
        output: PathBuf,
        /// Required when the output file is a PGM.
        #[arg(long)]
        out_width: Option<usize>,
        #[arg(long)]
        out_height: Option<usize>,
        /// Include a cycle estimate in the report.
        #[arg(long)]
        estimate: bool,
        #[arg(long, default_value = "paper-table")]
        profile: String,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

/// Error kind plus human message, rendered per the --json flag.
struct CliError {
    kind: &'static str,
    message: String,
}

impl CliError {
    fn new(kind: &'static str, message: impl Into<String>) -> Self {
        CliError {
            kind,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new("io", e.to_string())
    }
}

impl From<HuffmanError> for CliError {
    fn from(e: HuffmanError) -> Self {
        let kind = match &e {
            HuffmanError::Io(_) => "io",
            HuffmanError::Csv { .. } => "invalid-input",
            HuffmanError::FrequencyOverflow => "overflow",
            HuffmanError::Malformed(_) => "structural",
            _ => "invalid-input",
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<stencil::StencilError> for CliError {
    fn from(e: stencil::StencilError) -> Self {
        CliError::new("invalid-input", e.to_string())
    }
}

impl From<pgm::PgmError> for CliError {
    fn from(e: pgm::PgmError) -> Self {
        let kind = match &e {
            pgm::PgmError::Io(_) => "io",
            _ => "invalid-input",
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<cycle_model::CycleModelError> for CliError {
    fn from(e: cycle_model::CycleModelError) -> Self {
        let kind = match &e {
            cycle_model::CycleModelError::UnknownProfile(_) => "config",
            _ => "invalid-input",
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<codegen::CodegenError> for CliError {
    fn from(e: codegen::CodegenError) -> Self {
        let kind = match &e {
            codegen::CodegenError::Invalid(_) => "validation",
            codegen::CodegenError::BadParamsJson(_) => "invalid-input",
            codegen::CodegenError::Render(_) => "render",
            codegen::CodegenError::Io(_) => "io",
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<dse::DseError> for CliError {
    fn from(e: dse::DseError) -> Self {
        let kind = match &e {
            dse::DseError::SpaceTooLarge { .. } => "limit",
            dse::DseError::Io(_) => "io",
            dse::DseError::Json(_) => "invalid-input",
            _ => "invalid-input",
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<dataflow::DataflowError> for CliError {
    fn from(e: dataflow::DataflowError) -> Self {
        let kind = match &e {
            dataflow::DataflowError::Deadlock { .. } => "deadlock",
            dataflow::DataflowError::Json(_) => "invalid-input",
            _ => "validation",
        };
        CliError::new(kind, e.to_string())
    }
}

fn main() {
    let cli = Cli::parse();
    let json_errors = cli.json;
    match run(cli.command) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {}", e.message);
            if json_errors {
                let payload = serde_json::json!({
                    "schema": 1,
                    "error": { "kind": e.kind, "message": e.message },
                });
                println!("{}", serde_json::to_string_pretty(&payload).expect("json"));
            }
            std::process::exit(1);
        }
    }
}

/// Pretty-prints the report on stdout and optionally writes it to a file.
fn emit_report<T: Serialize>(report: &T, path: Option<&Path>) -> Result<(), CliError> {
    let text =
        serde_json::to_string_pretty(report).map_err(|e| CliError::new("io", e.to_string()))?;
    println!("{text}");
    if let Some(path) = path {
        let mut f = BufWriter::new(File::create(path)?);
        f.write_all(text.as_bytes())?;
        f.write_all(b"\n")?;
    }
    Ok(())
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Huffman {
            freqs,
            mode,
            lengths,
            arrays,
            report,
        } => cmd_huffman(
            &freqs,
            mode,
            lengths.as_deref(),
            arrays.as_deref(),
            report.as_deref(),
        ),
        Command::Conv {
            image,
            mode,
            kernel,
            out,
            raw,
            report,
        } => cmd_conv(
            &image,
            mode,
            &kernel,
            out.as_deref(),
            raw.as_deref(),
            report.as_deref(),
        ),
        Command::Estimate {
            design,
            style,
            width,
            height,
            n,
            profile,
            freq_mhz,
            report,
        } => cmd_estimate(
            design,
            style,
            width,
            height,
            n,
            &profile,
            freq_mhz,
            report.as_deref(),
        ),
        Command::Compare {
            design,
            width,
            height,
            n,
            profile,
            freq_software,
            freq_restructured,
            report,
        } => cmd_compare(
            design,
            width,
            height,
            n,
            &profile,
            freq_software,
            freq_restructured,
            report.as_deref(),
        ),
        Command::Codegen {
            template,
            params,
            out,
        } => cmd_codegen(template, &params, &out),
        Command::Dse { space, out, limit } => cmd_dse(&space, &out, limit),
        Command::Graph {
            spec,
            input,
            output,
            out_width,
            out_height,
            estimate,
            profile,
            report,
        } => cmd_graph(
            &spec,
            &input,
            &output,
            out_width,
            out_height,
            estimate,
            &profile,
            report.as_deref(),
        ),
    }
}

#[derive(Serialize)]
struct HuffmanReport {
    schema: u32,
    kernel: &'static str,
    mode: &'static str,
    symbols: usize,
    num_internal: usize,
    weighted_length: u128,
    max_length: u32,
    kraft_equality: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    nodes_created: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reorder_ops: Option<usize>,
}

fn cmd_huffman(
    freqs: &Path,
    mode: HuffmanMode,
    lengths_out: Option<&Path>,
    arrays_out: Option<&Path>,
    report_out: Option<&Path>,
) -> Result<(), CliError> {
    let table = SortedFreqTable::from_csv(BufReader::new(File::open(freqs)?))?;
    let (lengths, mode_name, stats): (BitLengthTable, &'static str, Option<(usize, usize)>) =
        match mode {
            HuffmanMode::Reference => {
                if arrays_out.is_some() {
                    return Err(CliError::new(
                        "invalid-input",
                        "--arrays is only available in restructured mode",
                    ));
                }
                (build_tree_reference(&table)?, "reference", None)
            }
            HuffmanMode::Restructured => {
                let (arrays, stats) = build_tree_restructured_with_stats(&table)?;
                if let Some(path) = arrays_out {
                    arrays.to_csv(BufWriter::new(File::create(path)?))?;
                }
                let lengths = compute_bit_lengths(&arrays, &table)?;
                (
                    lengths,
                    "restructured",
                    Some((stats.nodes_created, stats.reorder_ops)),
                )
            }
        };
    if let Some(path) = lengths_out {
        lengths.to_csv(BufWriter::new(File::create(path)?))?;
    }
    let report = HuffmanReport {
        schema: 1,
        kernel: "huffman",
        mode: mode_name,
        symbols: table.len(),
        num_internal: table.len() - 1,
        weighted_length: lengths.weighted_length(&table)?,
        max_length: lengths.max_length(),
        kraft_equality: lengths.satisfies_kraft_equality(),
        nodes_created: stats.map(|s| s.0),
        reorder_ops: stats.map(|s| s.1),
    };
    emit_report(&report, report_out)
}

#[derive(Serialize)]
struct ConvReport {
    schema: u32,
    kernel: &'static str,
    mode: &'static str,
    coefficients: String,
    width: usize,
    height: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pushes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    emitted: Option<usize>,
}

fn resolve_kernel(name: &str) -> Result<(Coeffs3x3, Coeffs3x3), CliError> {
    match name {
        "sobel-standard" => Ok((stencil::SOBEL_GX_STANDARD, stencil::SOBEL_GY_STANDARD)),
        "sobel-paper" => Ok((stencil::SOBEL_GX_PAPER, stencil::SOBEL_GY_PAPER)),
        path => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::new(
                    "invalid-input",
                    format!("kernel must be sobel-standard, sobel-paper, or a JSON file: {e}"),
                )
            })?;
            Ok(coeffs_from_json(&text)?)
        }
    }
}

fn write_raw_csv(path: &Path, response: &ResponseImage) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    for row in 0..response.height() {
        let cells: Vec<String> = (0..response.width())
            .map(|col| response.at(row, col).to_string())
            .collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

fn cmd_conv(
    image_path: &Path,
    mode: ConvMode,
    kernel: &str,
    out: Option<&Path>,
    raw: Option<&Path>,
    report_out: Option<&Path>,
) -> Result<(), CliError> {
    let image = pgm::read_pgm(BufReader::new(File::open(image_path)?))?;
    let (gx, gy) = resolve_kernel(kernel)?;
    let (raw_response, run_stats, mode_name) = match mode {
        ConvMode::Reference => (
            convolve_reference(&image, &gx, &gy, ResponseMode::Raw)?,
            None,
            "reference",
        ),
        ConvMode::Streaming => {
            let run = convolve_streaming(&image, &gx, &gy, ResponseMode::Raw)?;
            (run.response, Some((run.pushes, run.emitted)), "streaming")
        }
    };
    if let Some(path) = raw {
        write_raw_csv(path, &raw_response)?;
    }
    if let Some(path) = out {
        let display = match mode {
            ConvMode::Reference => convolve_reference(&image, &gx, &gy, ResponseMode::Display)?,
            ConvMode::Streaming => {
                convolve_streaming(&image, &gx, &gy, ResponseMode::Display)?.response
            }
        };
        pgm::write_pgm(BufWriter::new(File::create(path)?), &display.into_image()?)?;
    }
    let report = ConvReport {
        schema: 1,
        kernel: "conv",
        mode: mode_name,
        coefficients: kernel.to_string(),
        width: image.width(),
        height: image.height(),
        pushes: run_stats.map(|s| s.0),
        emitted: run_stats.map(|s| s.1),
    };
    emit_report(&report, report_out)
}

fn build_size(
    design: DesignArg,
    width: Option<u32>,
    height: Option<u32>,
    n: Option<u32>,
) -> Result<KernelSize, CliError> {
    match design {
        DesignArg::Conv => match (width, height) {
            (Some(width), Some(height)) => Ok(KernelSize::Conv { width, height }),
            _ => Err(CliError::new(
                "invalid-input",
                "conv designs need --width and --height",
            )),
        },
        DesignArg::Huffman => match n {
            Some(symbols) => Ok(KernelSize::Huffman { symbols }),
            None => Err(CliError::new("invalid-input", "huffman designs need --n")),
        },
    }
}

#[derive(Serialize)]
struct EstimateReport {
    schema: u32,
    kernel: String,
    style: String,
    cycles: u64,
    latency: u64,
    freq_mhz: f64,
    throughput: f64,
    profile: String,
}

#[allow(clippy::too_many_arguments)]
fn cmd_estimate(
    design: DesignArg,
    style: StyleArg,
    width: Option<u32>,
    height: Option<u32>,
    n: Option<u32>,
    profile: &str,
    freq_mhz: f64,
    report_out: Option<&Path>,
) -> Result<(), CliError> {
    let profile = CalibrationProfile::by_name(profile)?;
    let style: Style = style.into();
    let schedule = match build_size(design, width, height, n)? {
        KernelSize::Conv { width, height } => LoopSchedule::conv(style, width, height)?,
        KernelSize::Huffman { symbols } => LoopSchedule::huffman(style, symbols)?,
    };
    let estimate: CycleEstimate = cycle_model::estimate_cycles(&schedule, &profile);
    let throughput = cycle_model::throughput(&estimate, freq_mhz)?;
    let report = EstimateReport {
        schema: 1,
        kernel: schedule.kernel().to_string(),
        style: style.to_string(),
        cycles: estimate.cycles,
        latency: estimate.latency,
        freq_mhz,
        throughput,
        profile: profile.name().to_string(),
    };
    emit_report(&report, report_out)
}

#[derive(Serialize)]
struct CompareReport {
    schema: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    width: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    height: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    symbols: Option<u32>,
    #[serde(flatten)]
    comparison: Comparison,
}

#[allow(clippy::too_many_arguments)]
fn cmd_compare(
    design: DesignArg,
    width: Option<u32>,
    height: Option<u32>,
    n: Option<u32>,
    profile: &str,
    freq_software: f64,
    freq_restructured: f64,
    report_out: Option<&Path>,
) -> Result<(), CliError> {
    let profile = CalibrationProfile::by_name(profile)?;
    let size = build_size(design, width, height, n)?;
    let comparison = cycle_model::compare(&size, &profile, freq_software, freq_restructured)?;
    let report = CompareReport {
        schema: 1,
        width,
        height,
        symbols: n,
        comparison,
    };
    emit_report(&report, report_out)
}

fn cmd_codegen(template: TemplateArg, params_path: &Path, out_dir: &Path) -> Result<(), CliError> {
    let id = match template {
        TemplateArg::Conv2dStream => TemplateId::Conv2dStream,
        TemplateArg::HuffmanTree => TemplateId::HuffmanTree,
    };
    let text = std::fs::read_to_string(params_path)?;
    let params = TemplateParams::from_json(id, &text)?;
    let generated = codegen::instantiate(&params)?;
    generated.write_to_dir(out_dir)?;
    let files: Vec<&str> = generated.files.iter().map(|f| f.name.as_str()).collect();
    let report = serde_json::json!({
        "schema": 1,
        "template": id,
        "out_dir": out_dir.display().to_string(),
        "files": files,
    });
    emit_report(&report, None)
}

fn cmd_dse(space_path: &Path, out_path: &Path, limit: Option<usize>) -> Result<(), CliError> {
    let space = dse::SearchSpace::from_json(&std::fs::read_to_string(space_path)?)?;
    let profile = CalibrationProfile::paper_table();
    let points = match limit {
        Some(limit) => dse::explore_with_limit(&space, &profile, limit)?,
        None => dse::explore(&space, &profile)?,
    };
    dse::write_results_csv(BufWriter::new(File::create(out_path)?), &points)?;
    let frontier = dse::pareto(&points)?;
    let report = serde_json::json!({
        "schema": 1,
        "points": points.len(),
        "frontier_size": frontier.len(),
        "out": out_path.display().to_string(),
    });
    emit_report(&report, None)
}

fn read_tokens(path: &Path) -> Result<Vec<Token>, CliError> {
    if path.extension().is_some_and(|e| e == "pgm") {
        let image = pgm::read_pgm(BufReader::new(File::open(path)?))?;
        Ok(image.pixels().iter().map(|&p| p as Token).collect())
    } else {
        let text = std::fs::read_to_string(path)?;
        let mut tokens = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            tokens.push(line.parse::<Token>().map_err(|e| {
                CliError::new("invalid-input", format!("bad token at line {}: {e}", i + 1))
            })?);
        }
        Ok(tokens)
    }
}

fn write_tokens(
    path: &Path,
    tokens: &[Token],
    dims: Option<(usize, usize)>,
) -> Result<(), CliError> {
    if path.extension().is_some_and(|e| e == "pgm") {
        let (width, height) = dims.ok_or_else(|| {
            CliError::new(
                "invalid-input",
                "PGM output needs --out-width and --out-height",
            )
        })?;
        if width * height != tokens.len() {
            return Err(CliError::new(
                "invalid-input",
                format!(
                    "{} tokens do not fill a {width}x{height} image",
                    tokens.len()
                ),
            ));
        }
        let mut pixels = Vec::with_capacity(tokens.len());
        for &t in tokens {
            if !(0..=255).contains(&t) {
                return Err(CliError::new(
                    "invalid-input",
                    format!("token {t} outside 0..=255; write a text file instead"),
                ));
            }
            pixels.push(t as u8);
        }
        let image = Image::new(width, height, pixels)?;
        pgm::write_pgm(BufWriter::new(File::create(path)?), &image)?;
    } else {
        let mut w = BufWriter::new(File::create(path)?);
        for t in tokens {
            writeln!(w, "{t}")?;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_graph(
    spec: &Path,
    input: &Path,
    output: &Path,
    out_width: Option<usize>,
    out_height: Option<usize>,
    estimate: bool,
    profile: &str,
    report_out: Option<&Path>,
) -> Result<(), CliError> {
    let graph = StreamGraph::from_json(&std::fs::read_to_string(spec)?)?;
    dataflow::validate_graph(&graph)?;
    let tokens = read_tokens(input)?;
    let run = dataflow::run_functional(&graph, &tokens)?;
    let dims = match (out_width, out_height) {
        (Some(w), Some(h)) => Some((w, h)),
        _ => None,
    };
    write_tokens(output, &run.outputs, dims)?;
    let mut report = serde_json::json!({
        "schema": 1,
        "tokens_in": tokens.len(),
        "tokens_out": run.outputs.len(),
        "channel_peaks": run.channel_peaks,
    });
    if estimate {
        let profile = CalibrationProfile::by_name(profile)?;
        let e = dataflow::estimate_graph_cycles(&graph, &profile, tokens.len())?;
        report["cycles"] = serde_json::json!(e.cycles);
        report["latency"] = serde_json::json!(e.latency);
    }
    emit_report(&report, report_out)
}
