//! Bit stream encodings for files and stdout.

use bernoulli_cubic::{pack_words, words_from_le_bytes, words_to_le_bytes, BitStream, Error};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// Packed bits, first bit in the most significant position of each byte.
    Raw,
    /// One '0' or '1' character per bit.
    Ascii,
    /// 32-bit words (first bit as MSB), little-endian bytes; trailing bits dropped.
    Words32le,
    /// `index,bit` rows under a header.
    Csv,
    /// A single JSON object with the bits as a '0'/'1' string.
    Json,
}

#[derive(Serialize, Deserialize)]
struct JsonBits {
    bits: usize,
    sequence: String,
}

pub fn encode(s: &BitStream, format: OutputFormat) -> Vec<u8> {
    match format {
        OutputFormat::Raw => s.as_packed_bytes().to_vec(),
        OutputFormat::Ascii => {
            let mut out = s.to_ascii();
            if !out.is_empty() {
                out.push('\n');
            }
            out.into_bytes()
        }
        OutputFormat::Words32le => words_to_le_bytes(&pack_words(s).words),
        OutputFormat::Csv => {
            let mut out = String::with_capacity(8 * s.len() + 10);
            out.push_str("index,bit\n");
            for (i, b) in s.iter().enumerate() {
                out.push_str(&i.to_string());
                out.push_str(if b { ",1\n" } else { ",0\n" });
            }
            out.into_bytes()
        }
        OutputFormat::Json => {
            let record = JsonBits {
                bits: s.len(),
                sequence: s.to_ascii(),
            };
            let mut out = serde_json::to_vec(&record).expect("serializable");
            out.push(b'\n');
            out
        }
    }
}

pub fn decode(bytes: &[u8], format: OutputFormat) -> Result<BitStream, Error> {
    let text = || std::str::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()));
    match format {
        OutputFormat::Raw => BitStream::from_packed_bytes(bytes, 8 * bytes.len()),
        OutputFormat::Ascii => BitStream::from_ascii(text()?),
        OutputFormat::Words32le => Ok(BitStream::from_words(&words_from_le_bytes(bytes)?)),
        OutputFormat::Csv => {
            let mut s = BitStream::new();
            for (k, line) in text()?.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || (k == 0 && line.starts_with("index")) {
                    continue;
                }
                match line.rsplit_once(',').map(|(_, bit)| bit.trim()) {
                    Some("0") => s.push(false),
                    Some("1") => s.push(true),
                    _ => return Err(Error::Parse(format!("bad CSV row {}: {line:?}", k + 1))),
                }
            }
            Ok(s)
        }
        OutputFormat::Json => {
            let record: JsonBits = serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))?;
            let s = BitStream::from_ascii(&record.sequence)?;
            if s.len() != record.bits {
                return Err(Error::Parse(format!(
                    "JSON declares {} bits but holds {}",
                    record.bits,
                    s.len()
                )));
            }
            Ok(s)
        }
    }
}
