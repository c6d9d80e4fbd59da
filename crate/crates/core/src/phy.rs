//! VLC physical layer: framing, Manchester line code, OOK intensity mapping
//! and airtime.
//!
//! Bits are carried as `bool` (`true` = 1), most significant bit first.
//! Manchester polarity follows IEEE 802.15.7 PHY I: a 0 is sent as
//! (LO, HI) and a 1 as (HI, LO).

use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::error::{Error, Result};

/// Sync word; longer preambles repeat it.
pub const PREAMBLE_WORD: u16 = 0xAA55;
pub const MAX_PAYLOAD: usize = 255;
/// Length field plus CRC.
pub const HEADER_TRAILER_BITS: usize = 8 + 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chip {
    Hi,
    Lo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhyConfig {
    /// Information bit rate (after line coding the chip rate is twice this).
    #[serde(rename = "data_rate_bps")]
    pub data_rate: f64,
    /// Modulation depth `A` in normalized intensity units.
    pub amplitude: f64,
    pub preamble_bits: usize,
}

impl Default for PhyConfig {
    fn default() -> Self {
        Self {
            data_rate: 100_000.0,
            amplitude: 1.0,
            preamble_bits: 16,
        }
    }
}

impl PhyConfig {
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if !(self.data_rate.is_finite() && self.data_rate > 0.0) {
            bad.push(format!("phy.data_rate_bps must be > 0, got {}", self.data_rate));
        }
        if !(self.amplitude.is_finite() && self.amplitude > 0.0) {
            bad.push(format!("phy.amplitude must be > 0, got {}", self.amplitude));
        }
        if self.preamble_bits == 0 || !self.preamble_bits.is_multiple_of(8) {
            bad.push(format!(
                "phy.preamble_bits must be a positive multiple of 8, got {}",
                self.preamble_bits
            ));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(bad))
        }
    }

    pub fn chip_duration(&self) -> f64 {
        1.0 / (2.0 * self.data_rate)
    }

    fn preamble(&self) -> Vec<bool> {
        (0..self.preamble_bits).map(|i| PREAMBLE_WORD & (0x8000 >> (i % 16)) != 0).collect()
    }
}

pub fn manchester_encode(bits: &[bool]) -> Vec<Chip> {
    bits.iter()
        .flat_map(|&b| if b { [Chip::Hi, Chip::Lo] } else { [Chip::Lo, Chip::Hi] })
        .collect()
}

pub fn manchester_decode(chips: &[Chip]) -> Result<Vec<bool>> {
    if !chips.len().is_multiple_of(2) {
        return Err(Error::Framing(chips.len()));
    }
    chips
        .chunks_exact(2)
        .enumerate()
        .map(|(i, pair)| match (pair[0], pair[1]) {
            (Chip::Hi, Chip::Lo) => Ok(true),
            (Chip::Lo, Chip::Hi) => Ok(false),
            _ => Err(Error::CodeViolation(i)),
        })
        .collect()
}

/// Intensity offsets around the lamp's nominal level.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityWaveform {
    pub samples: Vec<f64>,
    pub chip_duration: f64,
}

impl IntensityWaveform {
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 * self.chip_duration
    }

    /// `time_s,intensity` rows, one per chip start.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["time_s", "intensity"])?;
        for (i, s) in self.samples.iter().enumerate() {
            w.write_record([format!("{:e}", i as f64 * self.chip_duration), format!("{s}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn ook_modulate(chips: &[Chip], cfg: &PhyConfig) -> IntensityWaveform {
    let a = cfg.amplitude;
    IntensityWaveform {
        samples: chips.iter().map(|c| if *c == Chip::Hi { a } else { -a }).collect(),
        chip_duration: cfg.chip_duration(),
    }
}

/// CRC-16/CCITT-FALSE (poly 0x1021, init 0xFFFF, no reflection).
pub fn crc16_ccitt(data: &[u8]) -> u16 {
    let mut crc: u16 = 0xFFFF;
    for &byte in data {
        crc ^= (byte as u16) << 8;
        for _ in 0..8 {
            crc = if crc & 0x8000 != 0 { (crc << 1) ^ 0x1021 } else { crc << 1 };
        }
    }
    crc
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    payload: Vec<u8>,
    checksum: u16,
}

impl Frame {
    pub fn payload(&self) -> &[u8] {
        &self.payload
    }

    pub fn payload_length(&self) -> u8 {
        self.payload.len() as u8
    }

    pub fn checksum(&self) -> u16 {
        self.checksum
    }

    /// Serialized length in bits under `cfg`.
    pub fn bit_len(&self, cfg: &PhyConfig) -> usize {
        frame_bits(self.payload.len(), cfg)
    }

    /// Length byte, payload, CRC.
    fn body_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.payload.len() + 3);
        out.push(self.payload.len() as u8);
        out.extend_from_slice(&self.payload);
        out.extend_from_slice(&self.checksum.to_be_bytes());
        out
    }

    pub fn serialize(&self, cfg: &PhyConfig) -> Vec<bool> {
        let mut bits = cfg.preamble();
        bits.extend(bytes_to_bits(&self.body_bytes()));
        bits
    }

    pub fn to_hex(&self, cfg: &PhyConfig) -> String {
        bits_to_bytes(&self.serialize(cfg)).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(hex: &str, cfg: &PhyConfig) -> Result<Self> {
        let hex = hex.trim();
        if !hex.len().is_multiple_of(2) {
            return Err(Error::Argument("hex frame has an odd number of digits".into()));
        }
        let bytes = (0..hex.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&hex[i..i + 2], 16))
            .collect::<std::result::Result<Vec<u8>, _>>()
            .map_err(|e| Error::Argument(format!("bad hex frame: {e}")))?;
        let payload = parse_frame(&bytes_to_bits(&bytes), cfg)?;
        build_frame(&payload, cfg)
    }
}

/// Bits in a frame carrying `payload_len` bytes.
pub fn frame_bits(payload_len: usize, cfg: &PhyConfig) -> usize {
    cfg.preamble_bits + HEADER_TRAILER_BITS + 8 * payload_len
}

pub fn build_frame(payload: &[u8], _cfg: &PhyConfig) -> Result<Frame> {
    if payload.is_empty() || payload.len() > MAX_PAYLOAD {
        return Err(Error::Argument(format!(
            "payload must be 1..={MAX_PAYLOAD} bytes, got {}",
            payload.len()
        )));
    }
    let mut covered = Vec::with_capacity(payload.len() + 1);
    covered.push(payload.len() as u8);
    covered.extend_from_slice(payload);
    Ok(Frame {
        payload: payload.to_vec(),
        checksum: crc16_ccitt(&covered),
    })
}

/// Validate preamble, length and CRC and return the payload.
pub fn parse_frame(bits: &[bool], cfg: &PhyConfig) -> Result<Vec<u8>> {
    let pre = cfg.preamble();
    if bits.len() < pre.len() + 8 || bits[..pre.len()] != pre[..] {
        return Err(Error::Sync("preamble not found".into()));
    }
    let body = &bits[pre.len()..];
    let len = bits_to_bytes(&body[..8])[0] as usize;
    if len == 0 {
        return Err(Error::Sync("zero length field".into()));
    }
    let need = 8 + 8 * len + 16;
    if body.len() != need {
        return Err(Error::Sync(format!(
            "length field says {need} bits after preamble, got {}",
            body.len()
        )));
    }
    let bytes = bits_to_bytes(&body[..need]);
    let expected = crc16_ccitt(&bytes[..=len]);
    let actual = u16::from_be_bytes([bytes[len + 1], bytes[len + 2]]);
    if expected != actual {
        return Err(Error::Integrity { expected, actual });
    }
    Ok(bytes[1..=len].to_vec())
}

/// Seconds on air for `frame_bits` information bits.
pub fn frame_airtime(frame_bits: usize, cfg: &PhyConfig) -> f64 {
    frame_bits as f64 / cfg.data_rate
}

pub fn bytes_to_bits(bytes: &[u8]) -> Vec<bool> {
    bytes.iter().flat_map(|&b| (0..8).map(move |i| b & (0x80 >> i) != 0)).collect()
}

/// Packs MSB-first; a trailing partial byte is zero-padded.
pub fn bits_to_bytes(bits: &[bool]) -> Vec<u8> {
    bits.chunks(8)
        .map(|c| c.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i))))
        .collect()
}
