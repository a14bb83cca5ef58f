//! 3x3 convolution two ways: a naive reference over the whole image and a
//! streaming line-buffer/window-buffer pipeline that consumes one pixel per
//! simulated cycle.
//!
//! The streaming path models the hardware memory discipline: each of the
//! three line-buffer rows is a separate memory seeing at most one read and
//! one write per push (the values read out during the vertical shift are
//! exactly the new window column), and the window buffer is a register file
//! read only as a whole. Per push the order is fixed: line-buffer shift,
//! window column load, window horizontal shift with the new column entering
//! on the right.
//!
//! Both paths compute the same response. Raw mode keeps `dx + dy` as signed
//! values and is the normative mode for equivalence checks; display mode
//! emits `|dx| + |dy|` clamped to 0..=255 so results can be written as PGM.
//! Centers whose 3x3 window is not fully inside the image carry 0 in both
//! modes.

use std::fmt;

use serde::Deserialize;

/// 8-bit grayscale image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

/// 3x3 signed coefficient matrix; every entry must fit in a signed byte.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coeffs3x3([[i32; 3]; 3]);

/// The usual Sobel x-derivative.
pub const SOBEL_GX_STANDARD: Coeffs3x3 = Coeffs3x3([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]]);
/// The usual Sobel y-derivative.
pub const SOBEL_GY_STANDARD: Coeffs3x3 = Coeffs3x3([[-1, -2, -1], [0, 0, 0], [1, 2, 1]]);
/// The x matrix as printed in the source material; its columns do not sum
/// to zero, so it is almost certainly a typo, but it is kept selectable for
/// fidelity.
pub const SOBEL_GX_PAPER: Coeffs3x3 = Coeffs3x3([[1, 0, 1], [2, 0, 2], [-1, 0, 1]]);
/// The y matrix as printed in the source material (the standard matrix with
/// the sign flipped).
pub const SOBEL_GY_PAPER: Coeffs3x3 = Coeffs3x3([[1, 2, 1], [0, 0, 0], [-1, -2, -1]]);

/// How window responses are folded into a single output value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResponseMode {
    /// `dx + dy`, signed. Normative for equivalence checks.
    Raw,
    /// `|dx| + |dy|` clamped to 0..=255, suitable for PGM output.
    Display,
}

/// Convolution result, row-major. In display mode every value is 0..=255.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseImage {
    width: usize,
    height: usize,
    mode: ResponseMode,
    values: Vec<i32>,
}

/// One tagged output from the streaming pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamOutput {
    pub row: usize,
    pub col: usize,
    pub value: i32,
}

/// Peak per-push access counts across the three line-buffer rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LineBufferStats {
    pub max_reads_per_row: u32,
    pub max_writes_per_row: u32,
}

/// Result of driving a whole image through the streaming pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamingRun {
    pub response: ResponseImage,
    /// Total pixels pushed; one push per simulated cycle.
    pub pushes: usize,
    /// Outputs emitted while pushing, always `pushes - (width + 1)`.
    pub emitted: usize,
    pub line_buffer_stats: LineBufferStats,
}

#[derive(Debug)]
pub enum StencilError {
    /// Image smaller than the 3x3 window.
    ImageTooSmall { width: usize, height: usize },
    /// Pixel buffer length does not match `width * height`.
    BadPixelCount { expected: usize, actual: usize },
    CoeffOutOfRange { row: usize, col: usize, value: i32 },
    /// More pushes than the image has pixels.
    PushBeyondExtent,
    /// Raw-mode responses cannot be converted straight to 8-bit pixels.
    NotDisplayMode,
    BadCoeffsJson(String),
}

impl fmt::Display for StencilError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StencilError::ImageTooSmall { width, height } => {
                write!(f, "image {width}x{height} is smaller than the 3x3 window")
            }
            StencilError::BadPixelCount { expected, actual } => {
                write!(f, "expected {expected} pixels, got {actual}")
            }
            StencilError::CoeffOutOfRange { row, col, value } => write!(
                f,
                "coefficient [{row}][{col}] = {value} outside signed 8-bit range"
            ),
            StencilError::PushBeyondExtent => {
                write!(f, "push beyond the declared image extent")
            }
            StencilError::NotDisplayMode => {
                write!(f, "response is not in display mode")
            }
            StencilError::BadCoeffsJson(msg) => write!(f, "bad coefficients json: {msg}"),
        }
    }
}

impl std::error::Error for StencilError {}

impl Image {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, StencilError> {
        if pixels.len() != width * height {
            return Err(StencilError::BadPixelCount {
                expected: width * height,
                actual: pixels.len(),
            });
        }
        Ok(Image {
            width,
            height,
            pixels,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                pixels.push(f(row, col));
            }
        }
        Image {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn at(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }
}

impl Coeffs3x3 {
    pub fn new(values: [[i32; 3]; 3]) -> Result<Self, StencilError> {
        for (r, row) in values.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if !(-128..=127).contains(&v) {
                    return Err(StencilError::CoeffOutOfRange {
                        row: r,
                        col: c,
                        value: v,
                    });
                }
            }
        }
        Ok(Coeffs3x3(values))
    }

    pub fn at(&self, row: usize, col: usize) -> i32 {
        self.0[row][col]
    }

    pub fn values(&self) -> [[i32; 3]; 3] {
        self.0
    }

    /// All-zero coefficients, handy for isolating one derivative.
    pub fn zero() -> Self {
        Coeffs3x3([[0; 3]; 3])
    }
}

#[derive(Deserialize)]
struct CoeffsFile {
    gx: [[i32; 3]; 3],
    gy: [[i32; 3]; 3],
}

/// Parses `{"gx": [[..3x3..]], "gy": [[..3x3..]]}`.
pub fn coeffs_from_json(text: &str) -> Result<(Coeffs3x3, Coeffs3x3), StencilError> {
    let parsed: CoeffsFile =
        serde_json::from_str(text).map_err(|e| StencilError::BadCoeffsJson(e.to_string()))?;
    Ok((Coeffs3x3::new(parsed.gx)?, Coeffs3x3::new(parsed.gy)?))
}

impl ResponseImage {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn mode(&self) -> ResponseMode {
        self.mode
    }

    pub fn values(&self) -> &[i32] {
        &self.values
    }

    pub fn at(&self, row: usize, col: usize) -> i32 {
        self.values[row * self.width + col]
    }

    /// Converts a display-mode response into an 8-bit image.
    pub fn into_image(self) -> Result<Image, StencilError> {
        if self.mode != ResponseMode::Display {
            return Err(StencilError::NotDisplayMode);
        }
        let pixels = self.values.iter().map(|&v| v as u8).collect();
        Image::new(self.width, self.height, pixels)
    }
}

fn check_size(image: &Image) -> Result<(), StencilError> {
    if image.width < 3 || image.height < 3 {
        return Err(StencilError::ImageTooSmall {
            width: image.width,
            height: image.height,
        });
    }
    Ok(())
}

fn eval_window(window: &[[u8; 3]; 3], gx: &Coeffs3x3, gy: &Coeffs3x3, mode: ResponseMode) -> i32 {
    let mut dx = 0i32;
    let mut dy = 0i32;
    for r in 0..3 {
        for c in 0..3 {
            let p = window[r][c] as i32;
            dx += p * gx.at(r, c);
            dy += p * gy.at(r, c);
        }
    }
    match mode {
        ResponseMode::Raw => dx + dy,
        ResponseMode::Display => (dx.abs() + dy.abs()).min(255),
    }
}

/// Naive whole-image convolution: two loops over centers, two loops over
/// the kernel. Borders carry 0.
pub fn convolve_reference(
    image: &Image,
    gx: &Coeffs3x3,
    gy: &Coeffs3x3,
    mode: ResponseMode,
) -> Result<ResponseImage, StencilError> {
    check_size(image)?;
    let (w, h) = (image.width, image.height);
    let mut values = vec![0i32; w * h];
    for row in 1..h - 1 {
        for col in 1..w - 1 {
            let mut window = [[0u8; 3]; 3];
            for (wr, wrow) in window.iter_mut().enumerate() {
                for (wc, slot) in wrow.iter_mut().enumerate() {
                    *slot = image.at(row + wr - 1, col + wc - 1);
                }
            }
            values[row * w + col] = eval_window(&window, gx, gy, mode);
        }
    }
    Ok(ResponseImage {
        width: w,
        height: h,
        mode,
        values,
    })
}

/// Three image rows backed by separately counted memories.
#[derive(Debug, Clone)]
struct LineBuffer {
    rows: [Vec<u8>; 3],
    reads_this_push: [u32; 3],
    writes_this_push: [u32; 3],
    max_reads: u32,
    max_writes: u32,
}

impl LineBuffer {
    fn new(width: usize) -> Self {
        LineBuffer {
            rows: [vec![0; width], vec![0; width], vec![0; width]],
            reads_this_push: [0; 3],
            writes_this_push: [0; 3],
            max_reads: 0,
            max_writes: 0,
        }
    }

    fn begin_push(&mut self) {
        self.reads_this_push = [0; 3];
        self.writes_this_push = [0; 3];
    }

    fn read(&mut self, row: usize, col: usize) -> u8 {
        self.reads_this_push[row] += 1;
        self.rows[row][col]
    }

    fn write(&mut self, row: usize, col: usize, value: u8) {
        self.writes_this_push[row] += 1;
        self.rows[row][col] = value;
    }

    fn end_push(&mut self) {
        let r = *self.reads_this_push.iter().max().expect("3 rows");
        let w = *self.writes_this_push.iter().max().expect("3 rows");
        self.max_reads = self.max_reads.max(r);
        self.max_writes = self.max_writes.max(w);
    }
}

/// Streaming convolution state: push pixels in raster order, collect tagged
/// outputs. After the fill latency of `width + 1` pushes, every push emits
/// exactly one output, so a full image takes `width * height` cycles.
#[derive(Debug, Clone)]
pub struct StreamingConvState {
    width: usize,
    height: usize,
    gx: Coeffs3x3,
    gy: Coeffs3x3,
    mode: ResponseMode,
    line_buffer: LineBuffer,
    window: [[u8; 3]; 3],
    pushed: usize,
}

impl StreamingConvState {
    pub fn new(
        width: usize,
        height: usize,
        gx: Coeffs3x3,
        gy: Coeffs3x3,
        mode: ResponseMode,
    ) -> Result<Self, StencilError> {
        if width < 3 || height < 3 {
            return Err(StencilError::ImageTooSmall { width, height });
        }
        Ok(StreamingConvState {
            width,
            height,
            gx,
            gy,
            mode,
            line_buffer: LineBuffer::new(width),
            window: [[0; 3]; 3],
            pushed: 0,
        })
    }

    /// Number of pushes before the first output appears.
    pub fn fill_latency(&self) -> usize {
        self.width + 1
    }

    pub fn pushes(&self) -> usize {
        self.pushed
    }

    /// Whole-window register read.
    pub fn window(&self) -> [[u8; 3]; 3] {
        self.window
    }

    pub fn line_buffer_stats(&self) -> LineBufferStats {
        LineBufferStats {
            max_reads_per_row: self.line_buffer.max_reads,
            max_writes_per_row: self.line_buffer.max_writes,
        }
    }

    /// Feeds one pixel. Returns the output for the center lagging the
    /// cursor by one row and one column, or `None` during pipeline fill.
    /// Border centers carry value 0.
    pub fn push_pixel(&mut self, pixel: u8) -> Result<Option<StreamOutput>, StencilError> {
        let (w, h) = (self.width, self.height);
        if self.pushed >= w * h {
            return Err(StencilError::PushBeyondExtent);
        }
        let p = self.pushed;
        let col = p % w;

        // Vertical line-buffer shift at this column. The two values read
        // out are rows i-2 and i-1 of the image, so together with the new
        // pixel they are the incoming window column.
        self.line_buffer.begin_push();
        let a = self.line_buffer.read(1, col);
        let b = self.line_buffer.read(2, col);
        self.line_buffer.write(0, col, a);
        self.line_buffer.write(1, col, b);
        self.line_buffer.write(2, col, pixel);
        self.line_buffer.end_push();
        let column = [a, b, pixel];

        // Window shift: drop the oldest column, append the new one.
        for r in 0..3 {
            self.window[r][0] = self.window[r][1];
            self.window[r][1] = self.window[r][2];
            self.window[r][2] = column[r];
        }

        self.pushed += 1;
        if p < w + 1 {
            return Ok(None);
        }
        let cp = p - w - 1;
        let crow = cp / w;
        let ccol = cp % w;
        let value = if crow >= 1 && crow + 1 < h && ccol >= 1 && ccol + 1 < w {
            eval_window(&self.window, &self.gx, &self.gy, self.mode)
        } else {
            0
        };
        Ok(Some(StreamOutput {
            row: crow,
            col: ccol,
            value,
        }))
    }
}

/// Drives [`StreamingConvState::push_pixel`] over the whole image in raster
/// order and assembles the outputs. Centers never emitted (the trailing
/// `width + 1` positions) are all borders and stay 0.
pub fn convolve_streaming(
    image: &Image,
    gx: &Coeffs3x3,
    gy: &Coeffs3x3,
    mode: ResponseMode,
) -> Result<StreamingRun, StencilError> {
    check_size(image)?;
    let (w, h) = (image.width, image.height);
    let mut state = StreamingConvState::new(w, h, *gx, *gy, mode)?;
    let mut values = vec![0i32; w * h];
    let mut emitted = 0usize;
    for &pixel in image.pixels() {
        if let Some(out) = state.push_pixel(pixel)? {
            values[out.row * w + out.col] = out.value;
            emitted += 1;
        }
    }
    Ok(StreamingRun {
        response: ResponseImage {
            width: w,
            height: h,
            mode,
            values,
        },
        pushes: state.pushes(),
        emitted,
        line_buffer_stats: state.line_buffer_stats(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp_4x4() -> Image {
        Image::from_fn(4, 4, |r, c| (r * 4 + c + 1) as u8)
    }

    #[test]
    fn rejects_undersized_images() {
        let img = Image::from_fn(2, 2, |_, _| 0);
        assert!(matches!(
            convolve_reference(&img, &SOBEL_GX_STANDARD, &SOBEL_GY_STANDARD, ResponseMode::Raw),
            Err(StencilError::ImageTooSmall { .. })
        ));
        assert!(matches!(
            convolve_streaming(&img, &SOBEL_GX_STANDARD, &SOBEL_GY_STANDARD, ResponseMode::Raw),
            Err(StencilError::ImageTooSmall { .. })
        ));
    }

    #[test]
    fn constant_image_gives_zero_interior() {
        let img = Image::from_fn(8, 6, |_, _| 77);
        let out = convolve_reference(&img, &SOBEL_GX_STANDARD, &SOBEL_GY_STANDARD, ResponseMode::Raw)
            .unwrap();
        assert!(out.values().iter().all(|&v| v == 0));
    }

    #[test]
    fn zero_coefficients_give_zero_output() {
        let img = ramp_4x4();
        let out =
            convolve_reference(&img, &Coeffs3x3::zero(), &Coeffs3x3::zero(), ResponseMode::Raw)
                .unwrap();
        assert!(out.values().iter().all(|&v| v == 0));
    }

    #[test]
    fn ramp_center_derivatives() {
        // Window at center (1,1) is [[1,2,3],[5,6,7],[9,10,11]]:
        // dx = 8, dy = 32, raw = 40.
        let img = ramp_4x4();
        let dx_only =
            convolve_reference(&img, &SOBEL_GX_STANDARD, &Coeffs3x3::zero(), ResponseMode::Raw)
                .unwrap();
        assert_eq!(dx_only.at(1, 1), 8);
        let dy_only =
            convolve_reference(&img, &Coeffs3x3::zero(), &SOBEL_GY_STANDARD, ResponseMode::Raw)
                .unwrap();
        assert_eq!(dy_only.at(1, 1), 32);
        let raw =
            convolve_reference(&img, &SOBEL_GX_STANDARD, &SOBEL_GY_STANDARD, ResponseMode::Raw)
                .unwrap();
        assert_eq!(raw.at(1, 1), 40);
    }

    #[test]
    fn borders_are_zero() {
        let img = ramp_4x4();
        let out = convolve_reference(&img, &SOBEL_GX_STANDARD, &SOBEL_GY_STANDARD, ResponseMode::Raw)
            .unwrap();
        for row in 0..4 {
            for col in 0..4 {
                if row == 0 || row == 3 || col == 0 || col == 3 {
                    assert_eq!(out.at(row, col), 0, "({row},{col})");
                }
            }
        }
    }

    #[test]
    fn window_after_eleven_pushes() {
        let img = ramp_4x4();
        let mut state = StreamingConvState::new(
            4,
            4,
            SOBEL_GX_STANDARD,
            SOBEL_GY_STANDARD,
            ResponseMode::Raw,
        )
        .unwrap();
        for &p in &img.pixels()[..11] {
            state.push_pixel(p).unwrap();
        }
        assert_eq!(state.window(), [[1, 2, 3], [5, 6, 7], [9, 10, 11]]);
    }

    #[test]
    fn first_interior_output_matches_reference() {
        let img = ramp_4x4();
        let reference =
            convolve_reference(&img, &SOBEL_GX_STANDARD, &SOBEL_GY_STANDARD, ResponseMode::Raw)
                .unwrap();
        let mut state = StreamingConvState::new(
            4,
            4,
            SOBEL_GX_STANDARD,
            SOBEL_GY_STANDARD,
            ResponseMode::Raw,
        )
        .unwrap();
        let mut first_interior = None;
        for &p in img.pixels() {
            if let Some(out) = state.push_pixel(p).unwrap() {
                if out.row >= 1 && out.row < 3 && out.col >= 1 && out.col < 3 {
                    first_interior = Some(out);
                    break;
                }
            }
        }
        let out = first_interior.unwrap();
        assert_eq!((out.row, out.col), (1, 1));
        assert_eq!(out.value, reference.at(1, 1));
    }

    #[test]
    fn one_output_per_push_after_latency() {
        let img = Image::from_fn(7, 5, |r, c| (r * 31 + c * 7) as u8);
        let mut state = StreamingConvState::new(
            7,
            5,
            SOBEL_GX_STANDARD,
            SOBEL_GY_STANDARD,
            ResponseMode::Raw,
        )
        .unwrap();
        let mut seen = Vec::new();
        for (p, &px) in img.pixels().iter().enumerate() {
            let out = state.push_pixel(px).unwrap();
            if p < state.fill_latency() {
                assert!(out.is_none(), "push {p} during fill");
            } else {
                seen.push(out.expect("one output per push after latency"));
            }
        }
        assert_eq!(seen.len(), 7 * 5 - (7 + 1));
        // Emissions are consecutive centers in raster order.
        for (k, out) in seen.iter().enumerate() {
            assert_eq!((out.row, out.col), (k / 7, k % 7));
        }
    }

    #[test]
    fn push_beyond_extent_is_an_error() {
        let mut state = StreamingConvState::new(
            3,
            3,
            SOBEL_GX_STANDARD,
            SOBEL_GY_STANDARD,
            ResponseMode::Raw,
        )
        .unwrap();
        for _ in 0..9 {
            state.push_pixel(0).unwrap();
        }
        assert!(matches!(
            state.push_pixel(0),
            Err(StencilError::PushBeyondExtent)
        ));
    }

    #[test]
    fn window_tracks_neighborhood_of_lagging_center() {
        let img = Image::from_fn(9, 6, |r, c| (r * 13 + c * 5 + 1) as u8);
        let (w, _) = (img.width(), img.height());
        let mut state = StreamingConvState::new(
            9,
            6,
            SOBEL_GX_STANDARD,
            SOBEL_GY_STANDARD,
            ResponseMode::Raw,
        )
        .unwrap();
        for (p, &px) in img.pixels().iter().enumerate() {
            state.push_pixel(px).unwrap();
            let (row, col) = (p / w, p % w);
            if row >= 2 && col >= 2 {
                let window = state.window();
                for r in 0..3 {
                    for c in 0..3 {
                        assert_eq!(
                            window[r][c],
                            img.at(row - 2 + r, col - 2 + c),
                            "push ({row},{col}) window[{r}][{c}]"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn line_buffer_discipline_holds() {
        let img = Image::from_fn(16, 12, |r, c| (r * 7 + c * 3) as u8);
        let run =
            convolve_streaming(&img, &SOBEL_GX_STANDARD, &SOBEL_GY_STANDARD, ResponseMode::Raw)
                .unwrap();
        assert!(run.line_buffer_stats.max_reads_per_row <= 1);
        assert!(run.line_buffer_stats.max_writes_per_row <= 1);
    }

    #[test]
    fn streaming_equals_reference_small_sweep() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for (w, h) in [(3, 3), (4, 7), (13, 5), (32, 9)] {
            let img = Image::from_fn(w, h, |_, _| (next() % 256) as u8);
            for mode in [ResponseMode::Raw, ResponseMode::Display] {
                let reference =
                    convolve_reference(&img, &SOBEL_GX_STANDARD, &SOBEL_GY_STANDARD, mode).unwrap();
                let run =
                    convolve_streaming(&img, &SOBEL_GX_STANDARD, &SOBEL_GY_STANDARD, mode).unwrap();
                assert_eq!(run.response, reference, "{w}x{h}");
                assert_eq!(run.pushes, w * h);
                assert_eq!(run.emitted, w * h - (w + 1));
            }
        }
    }

    #[test]
    fn three_by_three_has_exactly_one_interior_output() {
        let img = Image::from_fn(3, 3, |r, c| (r * 3 + c) as u8);
        let mut state = StreamingConvState::new(
            3,
            3,
            SOBEL_GX_STANDARD,
            SOBEL_GY_STANDARD,
            ResponseMode::Raw,
        )
        .unwrap();
        let mut interior = 0;
        for &p in img.pixels() {
            if let Some(out) = state.push_pixel(p).unwrap() {
                if out.row == 1 && out.col == 1 {
                    interior += 1;
                }
            }
        }
        assert_eq!(interior, 1);
    }

    #[test]
    fn display_mode_clamps_and_converts() {
        let img = Image::from_fn(5, 5, |r, c| if (r + c) % 2 == 0 { 0 } else { 255 });
        let disp = convolve_reference(
            &img,
            &SOBEL_GX_STANDARD,
            &SOBEL_GY_STANDARD,
            ResponseMode::Display,
        )
        .unwrap();
        assert!(disp.values().iter().all(|&v| (0..=255).contains(&v)));
        let as_image = disp.into_image().unwrap();
        assert_eq!(as_image.width(), 5);

        let raw =
            convolve_reference(&img, &SOBEL_GX_STANDARD, &SOBEL_GY_STANDARD, ResponseMode::Raw)
                .unwrap();
        assert!(matches!(
            raw.into_image(),
            Err(StencilError::NotDisplayMode)
        ));
    }

    #[test]
    fn coeff_validation_and_json() {
        assert!(matches!(
            Coeffs3x3::new([[0, 0, 0], [0, 200, 0], [0, 0, 0]]),
            Err(StencilError::CoeffOutOfRange { row: 1, col: 1, value: 200 })
        ));
        let (gx, gy) = coeffs_from_json(
            r#"{"gx": [[-1,0,1],[-2,0,2],[-1,0,1]], "gy": [[-1,-2,-1],[0,0,0],[1,2,1]]}"#,
        )
        .unwrap();
        assert_eq!(gx, SOBEL_GX_STANDARD);
        assert_eq!(gy, SOBEL_GY_STANDARD);
        assert!(coeffs_from_json("{\"gx\": []}").is_err());
    }
}
