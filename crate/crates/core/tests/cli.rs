//! End-to-end subcommand tests driving the compiled binary. Every captured
//! report is also validated against the schema shipped in schemas/.

use std::path::{Path, PathBuf};
use std::process::Command;

use restruct::huffman::SortedFreqTable;
use restruct::pgm;
use restruct::stencil::Image;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_restruct"))
}

fn schema_for(name: &str) -> jsonschema::JSONSchema {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("read {}: {e}", path.display()));
    let value: serde_json::Value = serde_json::from_str(&text).expect("schema parses");
    jsonschema::JSONSchema::compile(&value).expect("schema compiles")
}

fn assert_valid(report: &serde_json::Value, schema_name: &str) {
    let schema = schema_for(schema_name);
    let result = schema.validate(report);
    if let Err(errors) = result {
        let msgs: Vec<String> = errors.map(|e| e.to_string()).collect();
        panic!("{schema_name} rejected {report}: {msgs:?}");
    }
}

fn run_ok(args: &[&str]) -> serde_json::Value {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "expected success for {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn run_err(args: &[&str]) -> (String, Option<serde_json::Value>) {
    let out = bin().args(args).output().expect("binary runs");
    assert!(!out.status.success(), "expected failure for {args:?}");
    let stderr = String::from_utf8_lossy(&out.stderr).into_owned();
    let json = serde_json::from_slice(&out.stdout).ok();
    (stderr, json)
}

/// Deterministic 536-row fixture: dense symbols over a sorted ramp.
fn write_freq_fixture(path: &Path, n: u32) {
    let pairs: Vec<(u32, u64)> = (0..n).map(|i| (i, (i as u64 / 3) + 1)).collect();
    let table = SortedFreqTable::from_pairs(&pairs).unwrap();
    let mut buf = Vec::new();
    table.to_csv(&mut buf).unwrap();
    std::fs::write(path, buf).unwrap();
}

fn write_pgm_fixture(path: &Path, width: usize, height: usize) {
    let img = Image::from_fn(width, height, |r, c| ((r * 31 + c * 7) % 256) as u8);
    let mut buf = Vec::new();
    pgm::write_pgm(&mut buf, &img).unwrap();
    std::fs::write(path, buf).unwrap();
}

#[test]
fn huffman_fixture_reports_535_internal_nodes() {
    let dir = tempfile::tempdir().unwrap();
    let freqs = dir.path().join("freqs.csv");
    write_freq_fixture(&freqs, 536);
    let lengths = dir.path().join("lengths.csv");
    let arrays = dir.path().join("arrays.csv");
    let report = run_ok(&[
        "huffman",
        "--freqs",
        freqs.to_str().unwrap(),
        "--mode",
        "restructured",
        "--lengths",
        lengths.to_str().unwrap(),
        "--arrays",
        arrays.to_str().unwrap(),
    ]);
    assert_valid(&report, "huffman-report.schema.json");
    assert_eq!(report["num_internal"], 535);
    assert_eq!(report["nodes_created"], 535);
    assert_eq!(report["reorder_ops"], 0);
    assert_eq!(report["kraft_equality"], true);
    let arrays_text = std::fs::read_to_string(&arrays).unwrap();
    assert_eq!(arrays_text.lines().count(), 536); // header + 535 nodes
}

#[test]
fn huffman_two_symbols_get_length_one() {
    let dir = tempfile::tempdir().unwrap();
    let freqs = dir.path().join("freqs.csv");
    std::fs::write(&freqs, "symbol,freq\n7,1\n9,1\n").unwrap();
    let lengths = dir.path().join("lengths.csv");
    let report = run_ok(&[
        "huffman",
        "--freqs",
        freqs.to_str().unwrap(),
        "--mode",
        "reference",
        "--lengths",
        lengths.to_str().unwrap(),
    ]);
    assert_valid(&report, "huffman-report.schema.json");
    let text = std::fs::read_to_string(&lengths).unwrap();
    assert_eq!(text, "symbol,length\n7,1\n9,1\n");
}

#[test]
fn huffman_rejects_unsorted_input() {
    let dir = tempfile::tempdir().unwrap();
    let freqs = dir.path().join("freqs.csv");
    std::fs::write(&freqs, "symbol,freq\n0,5\n1,2\n").unwrap();
    let (stderr, json) = run_err(&[
        "huffman",
        "--freqs",
        freqs.to_str().unwrap(),
        "--mode",
        "restructured",
        "--json",
    ]);
    assert!(stderr.contains("not sorted by frequency"), "{stderr}");
    let err = json.expect("structured error under --json");
    assert_valid(&err, "error.schema.json");
    assert_eq!(err["error"]["kind"], "invalid-input");
}

#[test]
fn huffman_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let freqs = dir.path().join("freqs.csv");
    write_freq_fixture(&freqs, 100);
    let mut outputs = Vec::new();
    for run in 0..2 {
        let lengths = dir.path().join(format!("lengths{run}.csv"));
        let arrays = dir.path().join(format!("arrays{run}.csv"));
        run_ok(&[
            "huffman",
            "--freqs",
            freqs.to_str().unwrap(),
            "--mode",
            "restructured",
            "--lengths",
            lengths.to_str().unwrap(),
            "--arrays",
            arrays.to_str().unwrap(),
        ]);
        outputs.push((
            std::fs::read(&lengths).unwrap(),
            std::fs::read(&arrays).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn conv_modes_agree_on_raw_output() {
    let dir = tempfile::tempdir().unwrap();
    let image = dir.path().join("in.pgm");
    write_pgm_fixture(&image, 20, 14);
    let raw_ref = dir.path().join("ref.csv");
    let raw_stream = dir.path().join("stream.csv");
    let report = run_ok(&[
        "conv",
        "--image",
        image.to_str().unwrap(),
        "--mode",
        "reference",
        "--raw",
        raw_ref.to_str().unwrap(),
    ]);
    assert_valid(&report, "conv-report.schema.json");
    assert!(report.get("pushes").is_none());
    let report = run_ok(&[
        "conv",
        "--image",
        image.to_str().unwrap(),
        "--mode",
        "streaming",
        "--raw",
        raw_stream.to_str().unwrap(),
    ]);
    assert_valid(&report, "conv-report.schema.json");
    assert_eq!(report["pushes"], 20 * 14);
    assert_eq!(
        std::fs::read(&raw_ref).unwrap(),
        std::fs::read(&raw_stream).unwrap()
    );
}

#[test]
fn conv_streaming_vga_reports_307200_pushes() {
    let dir = tempfile::tempdir().unwrap();
    let image = dir.path().join("in.pgm");
    write_pgm_fixture(&image, 640, 480);
    let out = dir.path().join("edges.pgm");
    let report = run_ok(&[
        "conv",
        "--image",
        image.to_str().unwrap(),
        "--mode",
        "streaming",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_valid(&report, "conv-report.schema.json");
    assert_eq!(report["pushes"], 307_200);
    // The display PGM parses back with the same dimensions.
    let written = pgm::read_pgm(std::fs::read(&out).unwrap().as_slice()).unwrap();
    assert_eq!((written.width(), written.height()), (640, 480));
}

#[test]
fn conv_rejects_undersized_images() {
    let dir = tempfile::tempdir().unwrap();
    let image = dir.path().join("tiny.pgm");
    write_pgm_fixture(&image, 2, 2);
    let (stderr, _) = run_err(&[
        "conv",
        "--image",
        image.to_str().unwrap(),
        "--mode",
        "reference",
    ]);
    assert!(stderr.contains("smaller than the 3x3 window"), "{stderr}");
}

#[test]
fn conv_accepts_custom_kernel_json() {
    let dir = tempfile::tempdir().unwrap();
    let image = dir.path().join("in.pgm");
    write_pgm_fixture(&image, 8, 8);
    let coeffs = dir.path().join("k.json");
    std::fs::write(
        &coeffs,
        r#"{"gx": [[0,0,0],[0,1,0],[0,0,0]], "gy": [[0,0,0],[0,0,0],[0,0,0]]}"#,
    )
    .unwrap();
    let report = run_ok(&[
        "conv",
        "--image",
        image.to_str().unwrap(),
        "--mode",
        "reference",
        "--kernel",
        coeffs.to_str().unwrap(),
    ]);
    assert_valid(&report, "conv-report.schema.json");
}

#[test]
fn estimate_conv_restructured_3x3_is_9_cycles() {
    let report = run_ok(&[
        "estimate",
        "--design",
        "conv",
        "--style",
        "restructured",
        "--width",
        "3",
        "--height",
        "3",
        "--freq-mhz",
        "1",
    ]);
    assert_valid(&report, "estimate-report.schema.json");
    assert_eq!(report["cycles"], 9);
}

#[test]
fn estimate_rejects_unknown_profile() {
    let (stderr, json) = run_err(&[
        "estimate",
        "--design",
        "conv",
        "--style",
        "software",
        "--width",
        "64",
        "--height",
        "64",
        "--profile",
        "nonesuch",
        "--freq-mhz",
        "100",
        "--json",
    ]);
    assert!(stderr.contains("unknown profile"), "{stderr}");
    let err = json.expect("structured error");
    assert_valid(&err, "error.schema.json");
    assert_eq!(err["error"]["kind"], "config");
}

#[test]
fn compare_conv_vga_matches_measured_throughputs() {
    let report = run_ok(&[
        "compare",
        "--design",
        "conv",
        "--width",
        "640",
        "--height",
        "480",
        "--freq-software",
        "129",
        "--freq-restructured",
        "128",
    ]);
    assert_valid(&report, "compare-report.schema.json");
    let rs_tp = report["restructured"]["throughput"].as_f64().unwrap();
    let sw_tp = report["software"]["throughput"].as_f64().unwrap();
    assert!((rs_tp - 416.7).abs() < 0.1, "restructured {rs_tp}");
    assert!((sw_tp - 6.18).abs() < 0.01, "software {sw_tp}");
}

#[test]
fn compare_huffman_536_matches_measured_throughputs() {
    let report = run_ok(&[
        "compare",
        "--design",
        "huffman",
        "--n",
        "536",
        "--freq-software",
        "145",
        "--freq-restructured",
        "125",
    ]);
    assert_valid(&report, "compare-report.schema.json");
    let rs_tp = report["restructured"]["throughput"].as_f64().unwrap();
    let sw_tp = report["software"]["throughput"].as_f64().unwrap();
    assert!((rs_tp / 39_784.0 - 1.0).abs() < 0.01, "restructured {rs_tp}");
    assert!((sw_tp / 18.4 - 1.0).abs() < 0.01, "software {sw_tp}");
}

#[test]
fn codegen_cli_output_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("params.json");
    std::fs::write(&params, r#"{"k":3,"width":640,"height":480,"pixel_bits":8}"#).unwrap();
    let out_dir = dir.path().join("generated");
    let report = run_ok(&[
        "codegen",
        "--template",
        "conv2d_stream",
        "--params",
        params.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_valid(&report, "codegen-report.schema.json");
    let golden_dir =
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/conv2d_stream");
    for name in ["conv2d_stream.h", "conv2d_stream.c", "manifest.json"] {
        assert_eq!(
            std::fs::read(out_dir.join(name)).unwrap(),
            std::fs::read(golden_dir.join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn codegen_rejects_invalid_params() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("params.json");
    std::fs::write(&params, r#"{"k":4,"width":640,"height":480,"pixel_bits":8}"#).unwrap();
    let (stderr, json) = run_err(&[
        "codegen",
        "--template",
        "conv2d_stream",
        "--params",
        params.to_str().unwrap(),
        "--out",
        dir.path().join("x").to_str().unwrap(),
        "--json",
    ]);
    assert!(stderr.contains("odd"), "{stderr}");
    let err = json.expect("structured error");
    assert_eq!(err["error"]["kind"], "validation");
}

#[test]
fn dse_two_style_space_puts_both_styles_on_frontier() {
    let dir = tempfile::tempdir().unwrap();
    let space = dir.path().join("space.json");
    std::fs::write(
        &space,
        r#"{"template":"conv2d_stream","style":["software","restructured"],
            "k":[3],"width":[640],"height":[480],"pixel_bits":[8]}"#,
    )
    .unwrap();
    let out = dir.path().join("results.csv");
    let report = run_ok(&[
        "dse",
        "--space",
        space.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_valid(&report, "dse-report.schema.json");
    assert_eq!(report["points"], 2);
    assert_eq!(report["frontier_size"], 2);
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "template,style,k,width,height,pixel_bits,cycles,bram,on_frontier"
    );
    for line in lines {
        assert!(line.ends_with(",true"), "{line}");
    }
}

#[test]
fn graph_passthrough_reproduces_the_input_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("graph.json");
    std::fs::write(
        &spec,
        r#"{
            "instances": [{"id": "p", "kind": {"type": "passthrough"}}],
            "channels": [],
            "pattern": {"kind": "pipeline", "stages": ["p"]},
            "input": {"instance": "p", "port": 0},
            "output": {"instance": "p", "port": 0}
        }"#,
    )
    .unwrap();
    let input = dir.path().join("in.csv");
    let canonical: String = (0..50).map(|i| format!("{i}\n")).collect();
    std::fs::write(&input, &canonical).unwrap();
    let output = dir.path().join("out.csv");
    let report = run_ok(&[
        "graph",
        "--spec",
        spec.to_str().unwrap(),
        "--in",
        input.to_str().unwrap(),
        "--out",
        output.to_str().unwrap(),
    ]);
    assert_valid(&report, "graph-report.schema.json");
    assert_eq!(std::fs::read_to_string(&output).unwrap(), canonical);
}

#[test]
fn graph_conv_threshold_over_pgm_with_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("graph.json");
    std::fs::write(
        &spec,
        r#"{
            "instances": [
                {"id": "conv", "kind": {"type": "conv2d_stream", "width": 16, "height": 12}},
                {"id": "cut", "kind": {"type": "threshold", "value": 100}}
            ],
            "channels": [
                {"from": {"instance": "conv", "port": 0},
                 "to": {"instance": "cut", "port": 0}, "depth": 8}
            ],
            "pattern": {"kind": "pipeline", "stages": ["conv", "cut"]},
            "input": {"instance": "conv", "port": 0},
            "output": {"instance": "cut", "port": 0}
        }"#,
    )
    .unwrap();
    let input = dir.path().join("in.pgm");
    write_pgm_fixture(&input, 16, 12);
    let output = dir.path().join("out.pgm");
    let report = run_ok(&[
        "graph",
        "--spec",
        spec.to_str().unwrap(),
        "--in",
        input.to_str().unwrap(),
        "--out",
        output.to_str().unwrap(),
        "--out-width",
        "16",
        "--out-height",
        "12",
        "--estimate",
    ]);
    assert_valid(&report, "graph-report.schema.json");
    assert_eq!(report["tokens_in"], 16 * 12);
    assert_eq!(report["tokens_out"], 16 * 12);
    assert_eq!(report["cycles"], 16 * 12 + 17);
    let out_img = pgm::read_pgm(std::fs::read(&output).unwrap().as_slice()).unwrap();
    assert!(out_img.pixels().iter().all(|&p| p == 0 || p == 255));
}
