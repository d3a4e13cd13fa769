//! Little-endian binary table files.
//!
//! A file is a sequence of records. Each record is
//!
//! ```text
//! "TPLT"  u8 kind  u8 flags  5 × 8-byte params  u32 count  count entries
//! ```
//!
//! `kind` is 0 = M, 1 = L, 2 = D, 3 = DL, 4 = CORDIC+LUT. Flags bit 0 marks
//! interpolation, bit 1 Q3.28 entries, bits 4..8 hold a function tag. The
//! params are `p` (f64), `k` (f64, M) or `n` (i64, others), `exp_bits`,
//! `mant_bits` and `base_exponent` (i64).
//!
//! A DL record carries the D part's parameters with `n` of the L part,
//! then the L entries and a second `u32 count` with the D entries.
//! A CORDIC+LUT record stores `n_iter` as `n`, the mode tag as `exp_bits`
//! and the address width as `mant_bits`; each entry is three i32 words
//! (x, y, θ_consumed). Its angle tables are regenerated on load.

use std::fs::File;
use std::io::{BufReader, BufWriter, ErrorKind, Read, Write};
use std::path::Path;

use super::{DlLut, FuzzyLut, LutEntries, LutKind, SpacingSpec};
use crate::combined::CordicLutTables;
use crate::cordic::{CordicMode, CordicTables};
use crate::error::{Error, Result};
use crate::fixedpoint::FixedQ3_28;

pub const MAGIC: &[u8; 4] = b"TPLT";

const FLAG_INTERP: u8 = 1;
const FLAG_FIXED: u8 = 2;
const RESERVED_FLAGS: u8 = 0b1100;
const MAX_ENTRIES: u32 = 1 << 26;

#[derive(Debug, Clone, PartialEq)]
pub enum TableRecord {
    Lut(FuzzyLut),
    DlLut(DlLut),
    /// Start table and its function tag.
    CordicLut(CordicLutTables, u8),
}

impl TableRecord {
    pub fn function_tag(&self) -> u8 {
        match self {
            TableRecord::Lut(t) => t.function_tag(),
            TableRecord::DlLut(t) => t.function_tag(),
            TableRecord::CordicLut(_, tag) => *tag,
        }
    }

    pub fn memory_bytes(&self) -> usize {
        match self {
            TableRecord::Lut(t) => t.memory_bytes(),
            TableRecord::DlLut(t) => t.memory_bytes(),
            TableRecord::CordicLut(t, _) => t.memory_bytes(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            TableRecord::Lut(t) => t.kind().name(),
            TableRecord::DlLut(_) => LutKind::DL.name(),
            TableRecord::CordicLut(..) => "CORDIC+LUT",
        }
    }

    pub fn entry_count(&self) -> usize {
        match self {
            TableRecord::Lut(t) => t.len(),
            TableRecord::DlLut(t) => t.len(),
            TableRecord::CordicLut(t, _) => t.cells().len(),
        }
    }
}

fn kind_tag(kind: LutKind) -> u8 {
    match kind {
        LutKind::M => 0,
        LutKind::L => 1,
        LutKind::D => 2,
        LutKind::DL => 3,
    }
}

const CORDIC_LUT_TAG: u8 = 4;

fn flags(interpolated: bool, fixed: bool, function_tag: u8) -> Result<u8> {
    if function_tag > 15 {
        return Err(Error::Format(format!(
            "function tag {function_tag} exceeds 4 bits"
        )));
    }
    Ok(((interpolated as u8) * FLAG_INTERP) | ((fixed as u8) * FLAG_FIXED) | (function_tag << 4))
}

fn put_header(out: &mut Vec<u8>, kind: u8, flags: u8, params: [[u8; 8]; 5]) {
    out.extend_from_slice(MAGIC);
    out.push(kind);
    out.push(flags);
    for p in params {
        out.extend_from_slice(&p);
    }
}

fn spec_params(spec: &SpacingSpec) -> [[u8; 8]; 5] {
    let second = match spec.kind {
        LutKind::M => spec.k.to_le_bytes(),
        _ => (spec.n as i64).to_le_bytes(),
    };
    [
        spec.p.to_le_bytes(),
        second,
        (spec.exp_bits as i64).to_le_bytes(),
        (spec.mant_bits as i64).to_le_bytes(),
        (spec.base_exponent as i64).to_le_bytes(),
    ]
}

fn put_entries(out: &mut Vec<u8>, entries: &LutEntries) {
    out.extend_from_slice(&(entries.len() as u32).to_le_bytes());
    match entries {
        LutEntries::Float(v) => v
            .iter()
            .for_each(|e| out.extend_from_slice(&e.to_le_bytes())),
        LutEntries::Fixed(v) => v
            .iter()
            .for_each(|e| out.extend_from_slice(&e.raw().to_le_bytes())),
    }
}

/// Appends one record to `out`.
pub fn encode_record(out: &mut Vec<u8>, record: &TableRecord) -> Result<()> {
    match record {
        TableRecord::Lut(t) => {
            put_header(
                out,
                kind_tag(t.kind()),
                flags(t.interpolated(), t.is_fixed(), t.function_tag())?,
                spec_params(t.spec()),
            );
            put_entries(out, t.entries());
        }
        TableRecord::DlLut(t) => {
            let mut spec = *t.high().spec();
            spec.kind = LutKind::DL;
            spec.n = t.low().spec().n;
            put_header(
                out,
                kind_tag(LutKind::DL),
                flags(true, false, t.function_tag())?,
                spec_params(&spec),
            );
            put_entries(out, t.low().entries());
            put_entries(out, t.high().entries());
        }
        TableRecord::CordicLut(t, tag) => {
            let params = [
                0f64.to_le_bytes(),
                (t.n_iter() as i64).to_le_bytes(),
                (t.mode().tag() as i64).to_le_bytes(),
                (t.addr_bits() as i64).to_le_bytes(),
                0i64.to_le_bytes(),
            ];
            put_header(out, CORDIC_LUT_TAG, flags(false, true, *tag)?, params);
            out.extend_from_slice(&(t.cells().len() as u32).to_le_bytes());
            for cell in t.cells() {
                for v in cell {
                    out.extend_from_slice(&v.raw().to_le_bytes());
                }
            }
        }
    }
    Ok(())
}

pub fn to_bytes(records: &[TableRecord]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for r in records {
        encode_record(&mut out, r)?;
    }
    Ok(out)
}

fn read_exact<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf).map_err(|e| match e.kind() {
        ErrorKind::UnexpectedEof => Error::Format("truncated record".into()),
        _ => Error::Io(e),
    })?;
    Ok(buf)
}

fn read_count(r: &mut impl Read) -> Result<usize> {
    let n = u32::from_le_bytes(read_exact(r)?);
    if n > MAX_ENTRIES {
        return Err(Error::Format(format!(
            "entry count {n} exceeds {MAX_ENTRIES}"
        )));
    }
    Ok(n as usize)
}

fn read_entries(r: &mut impl Read, fixed: bool) -> Result<LutEntries> {
    let n = read_count(r)?;
    let mut raw = vec![0u8; n * 4];
    r.read_exact(&mut raw)
        .map_err(|_| Error::Format("truncated entries".into()))?;
    let words = raw.chunks_exact(4).map(|c| [c[0], c[1], c[2], c[3]]);
    Ok(if fixed {
        LutEntries::Fixed(
            words
                .map(|w| FixedQ3_28::from_raw(i32::from_le_bytes(w)))
                .collect(),
        )
    } else {
        LutEntries::Float(words.map(f32::from_le_bytes).collect())
    })
}

fn small(v: i64, what: &str) -> Result<i32> {
    i32::try_from(v).map_err(|_| Error::Format(format!("{what} {v} out of range")))
}

fn unsigned(v: i64, what: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::Format(format!("{what} {v} out of range")))
}

/// Reads one record, or `None` at a clean end of input.
pub fn decode_record(r: &mut impl Read) -> Result<Option<TableRecord>> {
    let mut magic = [0u8; 4];
    let mut got = 0;
    while got < 4 {
        match r.read(&mut magic[got..]) {
            Ok(0) if got == 0 => return Ok(None),
            Ok(0) => return Err(Error::Format("truncated magic".into())),
            Ok(n) => got += n,
            Err(e) if e.kind() == ErrorKind::Interrupted => {}
            Err(e) => return Err(Error::Io(e)),
        }
    }
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let [kind, flags] = read_exact::<2>(r)?;
    if flags & RESERVED_FLAGS != 0 {
        return Err(Error::Format(format!(
            "reserved flag bits set in {flags:#04x}"
        )));
    }
    let interpolated = flags & FLAG_INTERP != 0;
    let fixed = flags & FLAG_FIXED != 0;
    let tag = flags >> 4;
    let mut params = [[0u8; 8]; 5];
    for p in &mut params {
        *p = read_exact(r)?;
    }
    let p = f64::from_le_bytes(params[0]);
    let second_f = f64::from_le_bytes(params[1]);
    let second_i = i64::from_le_bytes(params[1]);
    let exp_bits = i64::from_le_bytes(params[2]);
    let mant_bits = i64::from_le_bytes(params[3]);
    let base = i64::from_le_bytes(params[4]);

    let lut_kind = match kind {
        0 => Some(LutKind::M),
        1 => Some(LutKind::L),
        2 => Some(LutKind::D),
        3 => Some(LutKind::DL),
        CORDIC_LUT_TAG => None,
        other => return Err(Error::Format(format!("unknown table kind {other}"))),
    };
    let Some(lut_kind) = lut_kind else {
        let mode = CordicMode::from_tag(exp_bits)
            .ok_or_else(|| Error::Format(format!("unknown CORDIC mode {exp_bits}")))?;
        let bits = unsigned(mant_bits, "address bits")?;
        let n_iter = unsigned(second_i, "n_iter")?;
        let n = read_count(r)?;
        let mut cells = Vec::with_capacity(n);
        for _ in 0..n {
            let mut cell = [FixedQ3_28::ZERO; 3];
            for v in &mut cell {
                *v = FixedQ3_28::from_raw(i32::from_le_bytes(read_exact(r)?));
            }
            cells.push(cell);
        }
        let cordic = CordicTables::with_skip(mode, bits, n_iter)?;
        return Ok(Some(TableRecord::CordicLut(
            CordicLutTables::from_parts(bits, cells, cordic)?,
            tag,
        )));
    };

    let n = if lut_kind == LutKind::M {
        0
    } else {
        small(second_i, "density exponent")?
    };
    let mut spec = SpacingSpec {
        kind: lut_kind,
        p,
        k: match lut_kind {
            LutKind::M => second_f,
            LutKind::L => 2f64.powi(n),
            _ => 0.0,
        },
        n,
        exp_bits: unsigned(exp_bits, "exp_bits")?,
        mant_bits: unsigned(mant_bits, "mant_bits")?,
        base_exponent: small(base, "base exponent")?,
    };
    if lut_kind == LutKind::M && !(spec.k.is_finite() && spec.k > 0.0) {
        return Err(Error::Format(format!(
            "M-LUT density {} not positive",
            spec.k
        )));
    }
    if matches!(lut_kind, LutKind::D | LutKind::DL) && !(1..=20).contains(&spec.mant_bits) {
        return Err(Error::Format(format!(
            "mant_bits {} outside 1..=20",
            spec.mant_bits
        )));
    }
    if lut_kind != LutKind::DL {
        let entries = read_entries(r, fixed)?;
        let lut = FuzzyLut::from_parts(spec, entries, interpolated, tag)?;
        return Ok(Some(TableRecord::Lut(lut)));
    }

    let low_entries = read_entries(r, false)?;
    let high_entries = read_entries(r, false)?;
    let low_spec = SpacingSpec {
        kind: LutKind::L,
        p: 0.0,
        k: 2f64.powi(n),
        n,
        exp_bits: 0,
        mant_bits: 0,
        base_exponent: 0,
    };
    spec.kind = LutKind::D;
    spec.n = 0;
    let low = FuzzyLut::from_parts(low_spec, low_entries, true, tag)?;
    let high = FuzzyLut::from_parts(spec, high_entries, true, tag)?;
    Ok(Some(TableRecord::DlLut(DlLut::from_parts(low, high)?)))
}

pub fn from_bytes(mut bytes: &[u8]) -> Result<Vec<TableRecord>> {
    let mut out = Vec::new();
    while let Some(r) = decode_record(&mut bytes)? {
        out.push(r);
    }
    Ok(out)
}

pub fn save_tables(path: impl AsRef<Path>, records: &[TableRecord]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&to_bytes(records)?)?;
    w.flush()?;
    Ok(())
}

pub fn load_tables(path: impl AsRef<Path>) -> Result<Vec<TableRecord>> {
    let mut r = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    while let Some(rec) = decode_record(&mut r)? {
        out.push(rec);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combined::build_cordic_lut;
    use crate::lut::{build_dllut, build_dlut, build_fixed_llut, build_llut, build_mlut};
    use std::f64::consts::TAU;

    fn samples() -> Vec<TableRecord> {
        vec![
            TableRecord::Lut(
                build_mlut(f64::sin, 0.0, TAU, 100, false)
                    .unwrap()
                    .with_function_tag(1),
            ),
            TableRecord::Lut(build_mlut(f64::exp, 0.0, 1.0, 64, true).unwrap()),
            TableRecord::Lut(
                build_llut(f64::sin, 0.0, TAU, 256, true)
                    .unwrap()
                    .with_function_tag(3),
            ),
            TableRecord::Lut(build_llut(f64::ln, 1.0, 2.0, 50, false).unwrap()),
            TableRecord::Lut(build_fixed_llut(f64::sin, 0.0, TAU, 512, true).unwrap()),
            TableRecord::Lut(build_fixed_llut(f64::sqrt, 0.5, 2.0, 128, false).unwrap()),
            TableRecord::Lut(build_dlut(f64::tanh, 3, 4, -5, 3).unwrap()),
            TableRecord::DlLut(
                build_dllut(f64::tanh, 3, 5, -5, 3)
                    .unwrap()
                    .with_function_tag(9),
            ),
            TableRecord::CordicLut(build_cordic_lut(CordicMode::Circular, 6, 28).unwrap(), 1),
            TableRecord::CordicLut(build_cordic_lut(CordicMode::Hyperbolic, 4, 24).unwrap(), 0),
        ]
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let records = samples();
        let bytes = to_bytes(&records).unwrap();
        let back = from_bytes(&bytes).unwrap();
        assert_eq!(back, records);
        assert_eq!(to_bytes(&back).unwrap(), bytes);
    }

    #[test]
    fn header_layout() {
        let lut = build_llut(f64::sin, 0.0, TAU, 256, true)
            .unwrap()
            .with_function_tag(3);
        let bytes = to_bytes(&[TableRecord::Lut(lut.clone())]).unwrap();
        assert_eq!(&bytes[..4], b"TPLT");
        assert_eq!(bytes[4], 1);
        assert_eq!(bytes[5], 0x31);
        assert_eq!(
            i64::from_le_bytes(bytes[14..22].try_into().unwrap()),
            lut.spec().n as i64
        );
        assert_eq!(u32::from_le_bytes(bytes[46..50].try_into().unwrap()), 257);
        assert_eq!(bytes.len(), lut.memory_bytes());
    }

    #[test]
    fn rejects_corrupt_input() {
        let bytes = to_bytes(&samples()[..1]).unwrap();
        assert!(from_bytes(&bytes[..bytes.len() - 1]).is_err());
        assert!(from_bytes(&bytes[..2]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(from_bytes(&bad), Err(Error::Format(_))));
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(from_bytes(&bad).is_err());
        let mut bad = bytes;
        bad[5] |= 0b100;
        assert!(from_bytes(&bad).is_err());
        assert!(from_bytes(&[]).unwrap().is_empty());
    }

    #[test]
    fn file_round_trip() {
        let dir = std::env::temp_dir().join(format!("pimfunc-format-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("tables.bin");
        save_tables(&path, &samples()).unwrap();
        assert_eq!(load_tables(&path).unwrap(), samples());
        std::fs::remove_dir_all(dir).unwrap();
    }
}
