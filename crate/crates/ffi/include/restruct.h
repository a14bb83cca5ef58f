#ifndef RESTRUCT_H
#define RESTRUCT_H

/* Generated by cbindgen from restruct-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Which convolution path to run.
 */
typedef enum RestructConvEngine {
  RESTRUCT_CONV_ENGINE_REFERENCE = 0,
  RESTRUCT_CONV_ENGINE_STREAMING = 1,
} RestructConvEngine;

/**
 * Which Huffman builder to run.
 */
typedef enum RestructHuffmanMode {
  RESTRUCT_HUFFMAN_MODE_REFERENCE = 0,
  RESTRUCT_HUFFMAN_MODE_RESTRUCTURED = 1,
} RestructHuffmanMode;

typedef enum RestructKernel {
  RESTRUCT_KERNEL_HUFFMAN = 0,
  RESTRUCT_KERNEL_CONV = 1,
} RestructKernel;

/**
 * How convolution responses are folded (signed raw vs clamped display).
 */
typedef enum RestructResponseMode {
  RESTRUCT_RESPONSE_MODE_RAW = 0,
  RESTRUCT_RESPONSE_MODE_DISPLAY = 1,
} RestructResponseMode;

/**
 * Status code returned by every fallible call.
 */
typedef enum RestructStatus {
  RESTRUCT_STATUS_OK = 0,
  RESTRUCT_STATUS_NULL_POINTER = 1,
  RESTRUCT_STATUS_INVALID_INPUT = 2,
  RESTRUCT_STATUS_OVERFLOW = 3,
  RESTRUCT_STATUS_STRUCTURAL = 4,
  RESTRUCT_STATUS_UNKNOWN_PROFILE = 5,
  RESTRUCT_STATUS_INVALID_ARGUMENT = 6,
} RestructStatus;

typedef enum RestructStyle {
  RESTRUCT_STYLE_SOFTWARE = 0,
  RESTRUCT_STYLE_RESTRUCTURED = 1,
} RestructStyle;

/**
 * Opaque bit-length table handle.
 */
typedef struct RestructBitLengths RestructBitLengths;

/**
 * Opaque frequency table handle.
 */
typedef struct RestructFreqTable RestructFreqTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version of the underlying library as a static NUL-terminated string.
 */
const char *restruct_version(void);

/**
 * Builds a frequency table from parallel symbol/frequency arrays of
 * `len` entries, which must already be sorted by frequency ascending.
 *
 * # Safety
 * `symbols` and `freqs` must point to `len` readable elements and `out`
 * must be a valid pointer.
 */
enum RestructStatus restruct_freq_table_new(const uint32_t *symbols,
                                            const uint64_t *freqs,
                                            size_t len,
                                            struct RestructFreqTable **out);

/**
 * Releases a table handle; a null pointer is ignored.
 *
 * # Safety
 * `table` must have come from `restruct_freq_table_new` and not already
 * be freed.
 */
void restruct_freq_table_free(struct RestructFreqTable *table);

/**
 * Number of symbols in the table.
 *
 * # Safety
 * `table` must be a live handle and `out` a valid pointer.
 */
enum RestructStatus restruct_freq_table_len(const struct RestructFreqTable *table, size_t *out);

/**
 * Runs one of the two tree builders and returns the per-symbol code
 * lengths.
 *
 * # Safety
 * `table` must be a live handle, `out` a valid pointer, and `mode` a
 * member of `RestructHuffmanMode`.
 */
enum RestructStatus restruct_huffman_bit_lengths(const struct RestructFreqTable *table,
                                                 enum RestructHuffmanMode mode,
                                                 struct RestructBitLengths **out);

/**
 * Releases a bit-length handle; a null pointer is ignored.
 *
 * # Safety
 * `lengths` must have come from `restruct_huffman_bit_lengths` and not
 * already be freed.
 */
void restruct_bit_lengths_free(struct RestructBitLengths *lengths);

/**
 * Number of symbols covered by the bit-length table.
 *
 * # Safety
 * `lengths` must be a live handle and `out` a valid pointer.
 */
enum RestructStatus restruct_bit_lengths_count(const struct RestructBitLengths *lengths,
                                               size_t *out);

/**
 * Code length of one symbol.
 *
 * # Safety
 * `lengths` must be a live handle and `out` a valid pointer.
 */
enum RestructStatus restruct_bit_lengths_get(const struct RestructBitLengths *lengths,
                                             uint32_t symbol,
                                             uint32_t *out);

/**
 * Sum of frequency times code length over the table.
 *
 * # Safety
 * Both handles must be live and `out` a valid pointer.
 */
enum RestructStatus restruct_weighted_length(const struct RestructBitLengths *lengths,
                                             const struct RestructFreqTable *table,
                                             uint64_t *out);

/**
 * Whether the lengths satisfy Kraft equality exactly.
 *
 * # Safety
 * `lengths` must be a live handle and `out` a valid pointer.
 */
enum RestructStatus restruct_kraft_equality_holds(const struct RestructBitLengths *lengths,
                                                  bool *out);

/**
 * Convolves a `width * height` 8-bit image with two 3x3 coefficient
 * matrices (`gx`, `gy`, row-major, 9 entries each) and writes one
 * response value per pixel into `out_values`. `out_pushes` may be null;
 * with the streaming engine it receives the push count.
 *
 * # Safety
 * `pixels` must hold `width * height` readable bytes, `gx`/`gy` nine
 * readable ints each, and `out_values` `width * height` writable ints.
 */
enum RestructStatus restruct_convolve(size_t width,
                                      size_t height,
                                      const uint8_t *pixels,
                                      const int32_t *gx,
                                      const int32_t *gy,
                                      enum RestructConvEngine engine,
                                      enum RestructResponseMode mode,
                                      int32_t *out_values,
                                      uint64_t *out_pushes);

/**
 * Evaluates the cycle model. For conv kernels `size_a`/`size_b` are
 * width/height; for huffman kernels `size_a` is the symbol count and
 * `size_b` is ignored. `profile` is a NUL-terminated profile name such
 * as "paper-table".
 *
 * # Safety
 * `profile` must be a valid NUL-terminated string; `out_cycles` and
 * `out_latency` must be valid pointers.
 */
enum RestructStatus restruct_estimate_cycles(enum RestructKernel kernel,
                                             enum RestructStyle style,
                                             uint32_t size_a,
                                             uint32_t size_b,
                                             const char *profile,
                                             uint64_t *out_cycles,
                                             uint64_t *out_latency);

/**
 * Operations per second for a cycle count at a clock frequency.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RestructStatus restruct_throughput(uint64_t cycles, double freq_mhz, double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* RESTRUCT_H */
