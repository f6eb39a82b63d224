//! Sample-batch CSV and packed code files.
//!
//! Packed layout (little endian): magic `QESC`, format version (u8), bits
//! per code (u8), two reserved zero bytes, code count (u64), then one byte
//! per code for `bits ≤ 8` or two bytes per code otherwise.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::sampler::SampleBatch;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"QESC";
const VERSION: u8 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedCodes {
    pub bits: u32,
    pub codes: Vec<u16>,
}

pub fn write_packed_codes(path: &Path, bits: u32, codes: &[u16]) -> Result<()> {
    if !(1..=16).contains(&bits) {
        return Err(Error::Config(format!("code width must be in 1..=16, got {bits}")));
    }
    if let Some(c) = codes.iter().find(|&&c| (c as u32) >> bits != 0) {
        return Err(Error::Format(format!("code {c} does not fit in {bits} bits")));
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&[VERSION, bits as u8, 0, 0])?;
    w.write_all(&(codes.len() as u64).to_le_bytes())?;
    if bits <= 8 {
        let bytes: Vec<u8> = codes.iter().map(|&c| c as u8).collect();
        w.write_all(&bytes)?;
    } else {
        for c in codes {
            w.write_all(&c.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_packed_codes(path: &Path) -> Result<PackedCodes> {
    let mut r = BufReader::new(File::open(path)?);
    let mut header = [0u8; 16];
    r.read_exact(&mut header)
        .map_err(|_| Error::Format("truncated packed-code header".into()))?;
    if &header[..4] != MAGIC {
        return Err(Error::Format("not a packed-code file".into()));
    }
    if header[4] != VERSION {
        return Err(Error::Format(format!("unsupported packed-code version {}", header[4])));
    }
    let bits = header[5] as u32;
    if !(1..=16).contains(&bits) {
        return Err(Error::Format(format!("invalid code width {bits}")));
    }
    let count = u64::from_le_bytes(header[8..16].try_into().expect("8 bytes")) as usize;
    let width = if bits <= 8 { 1 } else { 2 };
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    if body.len() != count * width {
        return Err(Error::Format(format!(
            "expected {} payload bytes, found {}",
            count * width,
            body.len()
        )));
    }
    let codes = if width == 1 {
        body.into_iter().map(u16::from).collect()
    } else {
        body.chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]])).collect()
    };
    Ok(PackedCodes { bits, codes })
}

/// `cycle_index,analog_value_au,code` rows; the code column is empty when the
/// batch was not digitized.
pub fn write_sample_csv(path: &Path, batch: &SampleBatch) -> Result<()> {
    batch.check()?;
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "cycle_index,analog_value_au,code")?;
    for (i, v) in batch.values.iter().enumerate() {
        let cycle = batch.first_cycle + i as u64;
        match &batch.codes {
            Some(codes) => writeln!(w, "{cycle},{v},{}", codes[i])?,
            None => writeln!(w, "{cycle},{v},")?,
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for bits in [1, 8, 12, 16] {
            let max = ((1u32 << bits) - 1) as u16;
            let codes: Vec<u16> = (0..1000u32).map(|i| (i * 7919 % (max as u32 + 1)) as u16).collect();
            let p = dir.path().join(format!("c{bits}.bin"));
            write_packed_codes(&p, bits, &codes).unwrap();
            let back = read_packed_codes(&p).unwrap();
            assert_eq!(back, PackedCodes { bits, codes });
        }
    }

    #[test]
    fn packed_rejects_oversized_codes_and_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.bin");
        assert!(write_packed_codes(&p, 4, &[16]).is_err());
        std::fs::write(&p, b"NOPE000000000000").unwrap();
        assert!(matches!(read_packed_codes(&p), Err(Error::Format(_))));
    }

    #[test]
    fn sample_csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        let mut b = SampleBatch::from_values(5, vec![0.5, -1.25]);
        b.codes = Some(vec![200, 3]);
        write_sample_csv(&p, &b).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text, "cycle_index,analog_value_au,code\n5,0.5,200\n6,-1.25,3\n");
    }
}
