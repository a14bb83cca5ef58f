//! C ABI over the restruct toolkit. The surface follows the usual
//! opaque-handle pattern: constructors hand back heap pointers, every
//! fallible call returns a status code and writes results through out
//! pointers, and each handle type has a matching `_free`.
//!
//! The generated header lands in `include/restruct.h` at build time.

use std::ffi::{c_char, CStr};

use restruct::cycle_model::{
    estimate_cycles, throughput, CalibrationProfile, LoopSchedule, Style,
};
use restruct::huffman::{
    build_tree_reference, build_tree_restructured, compute_bit_lengths, BitLengthTable,
    HuffmanError, SortedFreqTable, SymbolFreq,
};
use restruct::stencil::{
    convolve_reference, convolve_streaming, Coeffs3x3, Image, ResponseMode,
};

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RestructStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Overflow = 3,
    Structural = 4,
    UnknownProfile = 5,
    InvalidArgument = 6,
}

/// Which Huffman builder to run.
#[repr(C)]
pub enum RestructHuffmanMode {
    Reference = 0,
    Restructured = 1,
}

/// Which convolution path to run.
#[repr(C)]
pub enum RestructConvEngine {
    Reference = 0,
    Streaming = 1,
}

/// How convolution responses are folded (signed raw vs clamped display).
#[repr(C)]
pub enum RestructResponseMode {
    Raw = 0,
    Display = 1,
}

#[repr(C)]
pub enum RestructKernel {
    Huffman = 0,
    Conv = 1,
}

#[repr(C)]
pub enum RestructStyle {
    Software = 0,
    Restructured = 1,
}

/// Opaque frequency table handle.
pub struct RestructFreqTable(SortedFreqTable);

/// Opaque bit-length table handle.
pub struct RestructBitLengths(BitLengthTable);

fn status_of(err: &HuffmanError) -> RestructStatus {
    match err {
        HuffmanError::FrequencyOverflow => RestructStatus::Overflow,
        HuffmanError::Malformed(_) => RestructStatus::Structural,
        _ => RestructStatus::InvalidInput,
    }
}

/// Version of the underlying library as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn restruct_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Builds a frequency table from parallel symbol/frequency arrays of
/// `len` entries, which must already be sorted by frequency ascending.
///
/// # Safety
/// `symbols` and `freqs` must point to `len` readable elements and `out`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn restruct_freq_table_new(
    symbols: *const u32,
    freqs: *const u64,
    len: usize,
    out: *mut *mut RestructFreqTable,
) -> RestructStatus {
    if symbols.is_null() || freqs.is_null() || out.is_null() {
        return RestructStatus::NullPointer;
    }
    let symbols = std::slice::from_raw_parts(symbols, len);
    let freqs = std::slice::from_raw_parts(freqs, len);
    let entries: Vec<SymbolFreq> = symbols
        .iter()
        .zip(freqs)
        .map(|(&symbol, &freq)| SymbolFreq { symbol, freq })
        .collect();
    match SortedFreqTable::new(entries) {
        Ok(table) => {
            *out = Box::into_raw(Box::new(RestructFreqTable(table)));
            RestructStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Releases a table handle; a null pointer is ignored.
///
/// # Safety
/// `table` must have come from `restruct_freq_table_new` and not already
/// be freed.
#[no_mangle]
pub unsafe extern "C" fn restruct_freq_table_free(table: *mut RestructFreqTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Number of symbols in the table.
///
/// # Safety
/// `table` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn restruct_freq_table_len(
    table: *const RestructFreqTable,
    out: *mut usize,
) -> RestructStatus {
    if table.is_null() || out.is_null() {
        return RestructStatus::NullPointer;
    }
    *out = (*table).0.len();
    RestructStatus::Ok
}

/// Runs one of the two tree builders and returns the per-symbol code
/// lengths.
///
/// # Safety
/// `table` must be a live handle, `out` a valid pointer, and `mode` a
/// member of `RestructHuffmanMode`.
#[no_mangle]
pub unsafe extern "C" fn restruct_huffman_bit_lengths(
    table: *const RestructFreqTable,
    mode: RestructHuffmanMode,
    out: *mut *mut RestructBitLengths,
) -> RestructStatus {
    if table.is_null() || out.is_null() {
        return RestructStatus::NullPointer;
    }
    let table = &(*table).0;
    let result = match mode {
        RestructHuffmanMode::Reference => build_tree_reference(table),
        RestructHuffmanMode::Restructured => {
            build_tree_restructured(table).and_then(|arrays| compute_bit_lengths(&arrays, table))
        }
    };
    match result {
        Ok(lengths) => {
            *out = Box::into_raw(Box::new(RestructBitLengths(lengths)));
            RestructStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Releases a bit-length handle; a null pointer is ignored.
///
/// # Safety
/// `lengths` must have come from `restruct_huffman_bit_lengths` and not
/// already be freed.
#[no_mangle]
pub unsafe extern "C" fn restruct_bit_lengths_free(lengths: *mut RestructBitLengths) {
    if !lengths.is_null() {
        drop(Box::from_raw(lengths));
    }
}

/// Number of symbols covered by the bit-length table.
///
/// # Safety
/// `lengths` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn restruct_bit_lengths_count(
    lengths: *const RestructBitLengths,
    out: *mut usize,
) -> RestructStatus {
    if lengths.is_null() || out.is_null() {
        return RestructStatus::NullPointer;
    }
    *out = (*lengths).0.len();
    RestructStatus::Ok
}

/// Code length of one symbol.
///
/// # Safety
/// `lengths` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn restruct_bit_lengths_get(
    lengths: *const RestructBitLengths,
    symbol: u32,
    out: *mut u32,
) -> RestructStatus {
    if lengths.is_null() || out.is_null() {
        return RestructStatus::NullPointer;
    }
    match (*lengths).0.get(symbol) {
        Some(len) => {
            *out = len;
            RestructStatus::Ok
        }
        None => RestructStatus::InvalidArgument,
    }
}

/// Sum of frequency times code length over the table.
///
/// # Safety
/// Both handles must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn restruct_weighted_length(
    lengths: *const RestructBitLengths,
    table: *const RestructFreqTable,
    out: *mut u64,
) -> RestructStatus {
    if lengths.is_null() || table.is_null() || out.is_null() {
        return RestructStatus::NullPointer;
    }
    match (*lengths).0.weighted_length(&(*table).0) {
        Ok(w) => match u64::try_from(w) {
            Ok(w) => {
                *out = w;
                RestructStatus::Ok
            }
            Err(_) => RestructStatus::Overflow,
        },
        Err(e) => status_of(&e),
    }
}

/// Whether the lengths satisfy Kraft equality exactly.
///
/// # Safety
/// `lengths` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn restruct_kraft_equality_holds(
    lengths: *const RestructBitLengths,
    out: *mut bool,
) -> RestructStatus {
    if lengths.is_null() || out.is_null() {
        return RestructStatus::NullPointer;
    }
    *out = (*lengths).0.satisfies_kraft_equality();
    RestructStatus::Ok
}

/// Convolves a `width * height` 8-bit image with two 3x3 coefficient
/// matrices (`gx`, `gy`, row-major, 9 entries each) and writes one
/// response value per pixel into `out_values`. `out_pushes` may be null;
/// with the streaming engine it receives the push count.
///
/// # Safety
/// `pixels` must hold `width * height` readable bytes, `gx`/`gy` nine
/// readable ints each, and `out_values` `width * height` writable ints.
#[no_mangle]
pub unsafe extern "C" fn restruct_convolve(
    width: usize,
    height: usize,
    pixels: *const u8,
    gx: *const i32,
    gy: *const i32,
    engine: RestructConvEngine,
    mode: RestructResponseMode,
    out_values: *mut i32,
    out_pushes: *mut u64,
) -> RestructStatus {
    if pixels.is_null() || gx.is_null() || gy.is_null() || out_values.is_null() {
        return RestructStatus::NullPointer;
    }
    let Some(count) = width.checked_mul(height) else {
        return RestructStatus::InvalidArgument;
    };
    let image = match Image::new(
        width,
        height,
        std::slice::from_raw_parts(pixels, count).to_vec(),
    ) {
        Ok(image) => image,
        Err(_) => return RestructStatus::InvalidArgument,
    };
    let load = |p: *const i32| -> Result<Coeffs3x3, RestructStatus> {
        let flat = std::slice::from_raw_parts(p, 9);
        let mut m = [[0i32; 3]; 3];
        for r in 0..3 {
            for c in 0..3 {
                m[r][c] = flat[r * 3 + c];
            }
        }
        Coeffs3x3::new(m).map_err(|_| RestructStatus::InvalidArgument)
    };
    let gx = match load(gx) {
        Ok(v) => v,
        Err(s) => return s,
    };
    let gy = match load(gy) {
        Ok(v) => v,
        Err(s) => return s,
    };
    let mode = match mode {
        RestructResponseMode::Raw => ResponseMode::Raw,
        RestructResponseMode::Display => ResponseMode::Display,
    };
    let (response, pushes) = match engine {
        RestructConvEngine::Reference => match convolve_reference(&image, &gx, &gy, mode) {
            Ok(r) => (r, 0u64),
            Err(_) => return RestructStatus::InvalidInput,
        },
        RestructConvEngine::Streaming => match convolve_streaming(&image, &gx, &gy, mode) {
            Ok(run) => {
                let pushes = run.pushes as u64;
                (run.response, pushes)
            }
            Err(_) => return RestructStatus::InvalidInput,
        },
    };
    let out = std::slice::from_raw_parts_mut(out_values, count);
    out.copy_from_slice(response.values());
    if !out_pushes.is_null() {
        *out_pushes = pushes;
    }
    RestructStatus::Ok
}

/// Evaluates the cycle model. For conv kernels `size_a`/`size_b` are
/// width/height; for huffman kernels `size_a` is the symbol count and
/// `size_b` is ignored. `profile` is a NUL-terminated profile name such
/// as "paper-table".
///
/// # Safety
/// `profile` must be a valid NUL-terminated string; `out_cycles` and
/// `out_latency` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn restruct_estimate_cycles(
    kernel: RestructKernel,
    style: RestructStyle,
    size_a: u32,
    size_b: u32,
    profile: *const c_char,
    out_cycles: *mut u64,
    out_latency: *mut u64,
) -> RestructStatus {
    if profile.is_null() || out_cycles.is_null() || out_latency.is_null() {
        return RestructStatus::NullPointer;
    }
    let Ok(name) = CStr::from_ptr(profile).to_str() else {
        return RestructStatus::InvalidArgument;
    };
    let profile = match CalibrationProfile::by_name(name) {
        Ok(p) => p,
        Err(_) => return RestructStatus::UnknownProfile,
    };
    let style = match style {
        RestructStyle::Software => Style::Software,
        RestructStyle::Restructured => Style::Restructured,
    };
    let schedule = match kernel {
        RestructKernel::Huffman => LoopSchedule::huffman(style, size_a),
        RestructKernel::Conv => LoopSchedule::conv(style, size_a, size_b),
    };
    let schedule = match schedule {
        Ok(s) => s,
        Err(_) => return RestructStatus::InvalidArgument,
    };
    let estimate = estimate_cycles(&schedule, &profile);
    *out_cycles = estimate.cycles;
    *out_latency = estimate.latency;
    RestructStatus::Ok
}

/// Operations per second for a cycle count at a clock frequency.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn restruct_throughput(
    cycles: u64,
    freq_mhz: f64,
    out: *mut f64,
) -> RestructStatus {
    if out.is_null() {
        return RestructStatus::NullPointer;
    }
    if cycles == 0 {
        return RestructStatus::InvalidArgument;
    }
    let estimate = restruct::cycle_model::CycleEstimate { cycles, latency: 0 };
    match throughput(&estimate, freq_mhz) {
        Ok(tp) => {
            *out = tp;
            RestructStatus::Ok
        }
        Err(_) => RestructStatus::InvalidArgument,
    }
}
