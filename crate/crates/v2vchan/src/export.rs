//! Frame export: CSV for easy inspection, and a compact little-endian raw
//! format for bulk runs.
//!
//! Both formats flatten the stream into one record per
//! `(frame, path, transmit element, receive element)` tuple:
//!
//! * **CSV**: header `t,n,p,q,re,im,tau_s,power`, floats printed with 17
//!   significant digits so parsing them back reproduces the exact bits.
//! * **Raw**: the 8-byte magic `V2VCIR1\0`, then fixed 52-byte records
//!   `[t:f64][n:u32][p:u32][q:u32][re:f64][im:f64][tau_s:f64][power:f64]`,
//!   all little-endian.
//!
//! [`export_cir_to_path`] removes the output file again if the export fails
//! partway, so an interrupted run never leaves a truncated artifact behind.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::chanmodel::{CirFrame, ModelError};

/// Leading magic of the raw format.
pub const RAW_MAGIC: [u8; 8] = *b"V2VCIR1\0";

/// Byte length of one raw record.
pub const RAW_RECORD_LEN: usize = 52;

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// Supported output encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Raw,
}

impl FromStr for ExportFormat {
    type Err = ExportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ExportFormat::Csv),
            "raw" => Ok(ExportFormat::Raw),
            _ => Err(ExportError::UnknownFormat { name: s.to_owned() }),
        }
    }
}

/// What an export produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExportSummary {
    /// Frames consumed from the stream.
    pub frames: u64,
    /// Records written (frames x paths x element pairs).
    pub records: u64,
}

/// One decoded raw record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawRecord {
    pub t: f64,
    pub path: u32,
    pub p: u32,
    pub q: u32,
    pub gain: Complex64,
    pub tau_s: f64,
    pub power: f64,
}

/// Failure modes of export and re-import.
#[derive(Debug, Error)]
pub enum ExportError {
    #[error("i/o failure while writing frame {frame}: {source}")]
    WriteFrame {
        frame: u64,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("unknown export format `{name}` (expected `csv` or `raw`)")]
    UnknownFormat { name: String },
    #[error("sample rate {value} for the tapped view must be finite and > 0")]
    InvalidSampleRate { value: f64 },
    #[error("not a raw channel file: magic {found:02x?} does not match {RAW_MAGIC:02x?}")]
    BadMagic { found: [u8; 8] },
    #[error("raw stream ends mid-record at byte {offset}")]
    TruncatedRecord { offset: u64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

// ---------------------------------------------------------------------------
// Writing
// ---------------------------------------------------------------------------

fn encode_record(
    t: f64,
    n: u32,
    p: u32,
    q: u32,
    gain: Complex64,
    tau_s: f64,
    power: f64,
) -> [u8; RAW_RECORD_LEN] {
    let mut buf = [0u8; RAW_RECORD_LEN];
    buf[0..8].copy_from_slice(&t.to_le_bytes());
    buf[8..12].copy_from_slice(&n.to_le_bytes());
    buf[12..16].copy_from_slice(&p.to_le_bytes());
    buf[16..20].copy_from_slice(&q.to_le_bytes());
    buf[20..28].copy_from_slice(&gain.re.to_le_bytes());
    buf[28..36].copy_from_slice(&gain.im.to_le_bytes());
    buf[36..44].copy_from_slice(&tau_s.to_le_bytes());
    buf[44..52].copy_from_slice(&power.to_le_bytes());
    buf
}

fn write_frame<W: Write>(sink: &mut W, frame: &CirFrame, format: ExportFormat) -> io::Result<u64> {
    let mut records = 0;
    for (n, path) in frame.paths.iter().enumerate() {
        for p in 0..frame.mt_elements {
            for q in 0..frame.mr_elements {
                let gain = path.gains[p * frame.mr_elements + q];
                match format {
                    ExportFormat::Csv => writeln!(
                        sink,
                        "{t:.16e},{n},{p},{q},{re:.16e},{im:.16e},{tau:.16e},{power:.16e}",
                        t = frame.t,
                        re = gain.re,
                        im = gain.im,
                        tau = path.delay_s,
                        power = path.power,
                    )?,
                    ExportFormat::Raw => sink.write_all(&encode_record(
                        frame.t,
                        n as u32,
                        p as u32,
                        q as u32,
                        gain,
                        path.delay_s,
                        path.power,
                    ))?,
                }
                records += 1;
            }
        }
    }
    Ok(records)
}

/// Drains `frames` into `sink` in the requested format. Stops at the first
/// failed frame or write; by then any earlier records are already in the
/// sink, so writers that need atomicity should go through
/// [`export_cir_to_path`].
pub fn export_cir<I, W>(
    frames: I,
    format: ExportFormat,
    sink: &mut W,
) -> Result<ExportSummary, ExportError>
where
    I: IntoIterator<Item = Result<CirFrame, ModelError>>,
    W: Write,
{
    let mut summary = ExportSummary {
        frames: 0,
        records: 0,
    };
    match format {
        ExportFormat::Csv => {
            writeln!(sink, "t,n,p,q,re,im,tau_s,power")
                .map_err(|source| ExportError::WriteFrame { frame: 0, source })?;
        }
        ExportFormat::Raw => {
            sink.write_all(&RAW_MAGIC)
                .map_err(|source| ExportError::WriteFrame { frame: 0, source })?;
        }
    }
    for frame in frames {
        let frame = frame?;
        summary.records +=
            write_frame(sink, &frame, format).map_err(|source| ExportError::WriteFrame {
                frame: summary.frames,
                source,
            })?;
        summary.frames += 1;
    }
    sink.flush()?;
    Ok(summary)
}

/// Tapped-delay-line CSV view: header `t,n,p,q,re,im,tap,power`, one row per
/// element pair, with the delay quantised to the nearest sample index at
/// `sample_rate_hz` (`tap = round(tau_s * fs)`). The primary formats carry
/// the delay unquantised, so this view loses no information that is not also
/// exported elsewhere.
pub fn export_taps_csv<I, W>(
    frames: I,
    sample_rate_hz: f64,
    sink: &mut W,
) -> Result<ExportSummary, ExportError>
where
    I: IntoIterator<Item = Result<CirFrame, ModelError>>,
    W: Write,
{
    if !sample_rate_hz.is_finite() || sample_rate_hz <= 0.0 {
        return Err(ExportError::InvalidSampleRate {
            value: sample_rate_hz,
        });
    }
    let mut summary = ExportSummary {
        frames: 0,
        records: 0,
    };
    writeln!(sink, "t,n,p,q,re,im,tap,power")
        .map_err(|source| ExportError::WriteFrame { frame: 0, source })?;
    for frame in frames {
        let frame = frame?;
        let write = |sink: &mut W| -> io::Result<u64> {
            let mut records = 0;
            for (n, path) in frame.paths.iter().enumerate() {
                let tap = (path.delay_s * sample_rate_hz).round() as u64;
                for p in 0..frame.mt_elements {
                    for q in 0..frame.mr_elements {
                        let gain = path.gains[p * frame.mr_elements + q];
                        writeln!(
                            sink,
                            "{t:.16e},{n},{p},{q},{re:.16e},{im:.16e},{tap},{power:.16e}",
                            t = frame.t,
                            re = gain.re,
                            im = gain.im,
                            power = path.power,
                        )?;
                        records += 1;
                    }
                }
            }
            Ok(records)
        };
        summary.records += write(sink).map_err(|source| ExportError::WriteFrame {
            frame: summary.frames,
            source,
        })?;
        summary.frames += 1;
    }
    sink.flush()?;
    Ok(summary)
}

/// Exports to a file, buffered; on any failure the partially written file is
/// removed before the error is returned.
pub fn export_cir_to_path<I, P>(
    frames: I,
    format: ExportFormat,
    path: P,
) -> Result<ExportSummary, ExportError>
where
    I: IntoIterator<Item = Result<CirFrame, ModelError>>,
    P: AsRef<Path>,
{
    let path = path.as_ref();
    let file = File::create(path)?;
    let mut sink = BufWriter::new(file);
    match export_cir(frames, format, &mut sink) {
        Ok(summary) => Ok(summary),
        Err(err) => {
            drop(sink);
            let _ = std::fs::remove_file(path);
            Err(err)
        }
    }
}

/// [`export_taps_csv`] into a file, with the same remove-on-failure
/// guarantee as [`export_cir_to_path`].
pub fn export_taps_csv_to_path<I, P>(
    frames: I,
    sample_rate_hz: f64,
    path: P,
) -> Result<ExportSummary, ExportError>
where
    I: IntoIterator<Item = Result<CirFrame, ModelError>>,
    P: AsRef<Path>,
{
    let path = path.as_ref();
    let file = File::create(path)?;
    let mut sink = BufWriter::new(file);
    match export_taps_csv(frames, sample_rate_hz, &mut sink) {
        Ok(summary) => Ok(summary),
        Err(err) => {
            drop(sink);
            let _ = std::fs::remove_file(path);
            Err(err)
        }
    }
}

// ---------------------------------------------------------------------------
// Reading
// ---------------------------------------------------------------------------

/// Decodes a complete raw export. The whole source is validated: a wrong
/// magic or a trailing partial record is an error, not a silent truncation.
pub fn read_raw<R: Read>(source: &mut R) -> Result<Vec<RawRecord>, ExportError> {
    let mut magic = [0u8; 8];
    read_fully(source, &mut magic, 0)?.ok_or(ExportError::TruncatedRecord { offset: 0 })?;
    if magic != RAW_MAGIC {
        return Err(ExportError::BadMagic { found: magic });
    }
    let mut records = Vec::new();
    let mut offset = 8u64;
    let mut buf = [0u8; RAW_RECORD_LEN];
    while read_fully(source, &mut buf, offset)?.is_some() {
        records.push(RawRecord {
            t: f64::from_le_bytes(buf[0..8].try_into().unwrap()),
            path: u32::from_le_bytes(buf[8..12].try_into().unwrap()),
            p: u32::from_le_bytes(buf[12..16].try_into().unwrap()),
            q: u32::from_le_bytes(buf[16..20].try_into().unwrap()),
            gain: Complex64::new(
                f64::from_le_bytes(buf[20..28].try_into().unwrap()),
                f64::from_le_bytes(buf[28..36].try_into().unwrap()),
            ),
            tau_s: f64::from_le_bytes(buf[36..44].try_into().unwrap()),
            power: f64::from_le_bytes(buf[44..52].try_into().unwrap()),
        });
        offset += RAW_RECORD_LEN as u64;
    }
    Ok(records)
}

/// Fills `buf` completely (`Ok(Some(()))`), observes a clean end of stream
/// before the first byte (`Ok(None)`), or reports a mid-record truncation.
fn read_fully<R: Read>(
    source: &mut R,
    buf: &mut [u8],
    offset: u64,
) -> Result<Option<()>, ExportError> {
    let mut filled = 0;
    while filled < buf.len() {
        match source.read(&mut buf[filled..]) {
            Ok(0) if filled == 0 => return Ok(None),
            Ok(0) => {
                return Err(ExportError::TruncatedRecord {
                    offset: offset + filled as u64,
                })
            }
            Ok(n) => filled += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
            Err(e) => return Err(ExportError::Io(e)),
        }
    }
    Ok(Some(()))
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
