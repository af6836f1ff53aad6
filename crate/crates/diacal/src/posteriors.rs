//! Posterior tracks: per-frame class probabilities at a fixed frame rate,
//! plus the `PST1` binary file format and a CSV import for hand-written
//! fixtures.
//!
//! `PST1` layout (all integers and floats little-endian):
//!
//! ```text
//! magic            4 bytes  0x50 0x53 0x54 0x31 ("PST1")
//! version          u16      1
//! reserved         u16      0
//! frame_rate       f64
//! num_frames       u64
//! num_classes      u32
//! window_length_s  f32
//! window_stride_s  f32
//! rows             num_frames * num_classes * f32, row-major
//! file_id_len      u32
//! file_id          UTF-8 bytes
//! ```

use std::io::{BufRead, Read, Write};

use crate::annotations::FrameGrid;
use crate::error::{Error, Result};

const MAGIC: [u8; 4] = *b"PST1";
const VERSION: u16 = 1;

/// Per-frame class probabilities for one file.
///
/// Rows live on a single timeline at `grid.frame_rate`; the sliding windows
/// of the emitting segmentation model are described by `window_length` /
/// `window_stride` and materialized as views over the timeline.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorTrack {
    pub file_id: String,
    pub grid: FrameGrid,
    pub num_classes: usize,
    rows: Vec<f32>,
    /// Window length in seconds; must be > 0.
    pub window_length: f32,
    /// Window stride in seconds; equal to `window_length` for
    /// non-overlapping windows.
    pub window_stride: f32,
}

impl PosteriorTrack {
    pub fn new(
        file_id: &str,
        grid: FrameGrid,
        num_classes: usize,
        rows: Vec<f32>,
        window_length: f32,
        window_stride: f32,
    ) -> Result<Self> {
        if num_classes < 2 {
            return Err(Error::InvalidConfig(format!(
                "num_classes must be >= 2, got {num_classes}"
            )));
        }
        let valid_window = |v: f32| v.is_finite() && v > 0.0;
        if !valid_window(window_length) || !valid_window(window_stride) {
            return Err(Error::InvalidConfig(
                "window length and stride must be > 0".into(),
            ));
        }
        if rows.len() != grid.num_frames * num_classes {
            return Err(Error::InvalidConfig(format!(
                "expected {} probabilities ({} frames x {} classes), got {}",
                grid.num_frames * num_classes,
                grid.num_frames,
                num_classes,
                rows.len()
            )));
        }
        for t in 0..grid.num_frames {
            validate_row(&rows[t * num_classes..(t + 1) * num_classes], t)?;
        }
        Ok(Self {
            file_id: file_id.to_string(),
            grid,
            num_classes,
            rows,
            window_length,
            window_stride,
        })
    }

    pub fn num_frames(&self) -> usize {
        self.grid.num_frames
    }

    pub fn row(&self, frame: usize) -> &[f32] {
        &self.rows[frame * self.num_classes..(frame + 1) * self.num_classes]
    }

    pub fn rows(&self) -> &[f32] {
        &self.rows
    }

    /// Window spans `[start, end)` in seconds, emitted at the track stride.
    /// A shorter tail window is included when the file length is not a
    /// multiple of the stride.
    pub fn windows(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let duration = self.grid.duration();
        let stride = f64::from(self.window_stride);
        let length = f64::from(self.window_length);
        (0..)
            .map(move |k| k as f64 * stride)
            .take_while(move |&start| start + 1e-9 < duration)
            .map(move |start| (start, (start + length).min(duration)))
    }
}

fn validate_row(row: &[f32], index: usize) -> Result<()> {
    let mut sum = 0.0f64;
    for &p in row {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidRow {
                row: index,
                reason: format!("entry {p} is not a probability"),
            });
        }
        sum += f64::from(p);
    }
    if (sum - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidRow {
            row: index,
            reason: format!("row sums to {sum}, not 1"),
        });
    }
    Ok(())
}

/// Serializes a track to the `PST1` binary format.
pub fn write_posteriors<W: Write>(track: &PosteriorTrack, mut writer: W) -> Result<()> {
    writer.write_all(&MAGIC)?;
    writer.write_all(&VERSION.to_le_bytes())?;
    writer.write_all(&0u16.to_le_bytes())?;
    writer.write_all(&track.grid.frame_rate.to_le_bytes())?;
    writer.write_all(&(track.grid.num_frames as u64).to_le_bytes())?;
    writer.write_all(&(track.num_classes as u32).to_le_bytes())?;
    writer.write_all(&track.window_length.to_le_bytes())?;
    writer.write_all(&track.window_stride.to_le_bytes())?;
    for p in &track.rows {
        writer.write_all(&p.to_le_bytes())?;
    }
    let id = track.file_id.as_bytes();
    writer.write_all(&(id.len() as u32).to_le_bytes())?;
    writer.write_all(id)?;
    Ok(())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(Error::Truncated {
                expected: self.pos + n,
                actual: self.bytes.len(),
            });
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f32(&mut self) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Deserializes a `PST1` stream, validating magic, version, payload length,
/// and row sums.
pub fn read_posteriors<R: Read>(mut reader: R) -> Result<PosteriorTrack> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    let mut cur = Cursor {
        bytes: &bytes,
        pos: 0,
    };
    if cur.take(4)? != MAGIC {
        return Err(Error::BadMagic);
    }
    let version = cur.u16()?;
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let _reserved = cur.u16()?;
    let frame_rate = cur.f64()?;
    let num_frames = cur.u64()? as usize;
    let num_classes = cur.u32()? as usize;
    let window_length = cur.f32()?;
    let window_stride = cur.f32()?;
    let n_values = num_frames
        .checked_mul(num_classes)
        .ok_or_else(|| Error::InvalidConfig("frame x class count overflow".into()))?;
    let mut rows = Vec::with_capacity(n_values);
    for _ in 0..n_values {
        rows.push(cur.f32()?);
    }
    let id_len = cur.u32()? as usize;
    let id_bytes = cur.take(id_len)?;
    let file_id = std::str::from_utf8(id_bytes)
        .map_err(|_| Error::InvalidConfig("file id is not valid UTF-8".into()))?;
    let grid = FrameGrid::new(frame_rate, num_frames)?;
    PosteriorTrack::new(file_id, grid, num_classes, rows, window_length, window_stride)
}

/// Reads the CSV fixture format: header `frame,c0..c{C-1}` then one row per
/// frame in ascending frame order. Grid and window metadata are supplied by
/// the caller since the CSV carries none.
pub fn read_posteriors_csv<R: BufRead>(
    reader: R,
    file_id: &str,
    frame_rate: f64,
    window_length: f32,
    window_stride: f32,
) -> Result<PosteriorTrack> {
    let mut lines = reader.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line?,
        None => return Err(Error::EmptyInput("csv posterior stream")),
    };
    let cols: Vec<&str> = header.trim().split(',').collect();
    if cols.len() < 3 || cols[0] != "frame" {
        return Err(Error::CsvParse {
            line: 1,
            reason: "expected header frame,c0,..".into(),
        });
    }
    for (i, col) in cols[1..].iter().enumerate() {
        if *col != format!("c{i}") {
            return Err(Error::CsvParse {
                line: 1,
                reason: format!("expected column c{i}, got {col:?}"),
            });
        }
    }
    let num_classes = cols.len() - 1;
    let mut rows: Vec<f32> = Vec::new();
    let mut expected_frame = 0usize;
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != num_classes + 1 {
            return Err(Error::CsvParse {
                line: line_no,
                reason: format!("expected {} fields, got {}", num_classes + 1, fields.len()),
            });
        }
        let frame: usize = fields[0].parse().map_err(|_| Error::CsvParse {
            line: line_no,
            reason: format!("bad frame index {:?}", fields[0]),
        })?;
        if frame != expected_frame {
            return Err(Error::CsvParse {
                line: line_no,
                reason: format!("expected frame {expected_frame}, got {frame}"),
            });
        }
        expected_frame += 1;
        for field in &fields[1..] {
            let p: f32 = field.parse().map_err(|_| Error::CsvParse {
                line: line_no,
                reason: format!("bad probability {field:?}"),
            })?;
            rows.push(p);
        }
    }
    let grid = FrameGrid::new(frame_rate, expected_frame)?;
    PosteriorTrack::new(file_id, grid, num_classes, rows, window_length, window_stride)
}
