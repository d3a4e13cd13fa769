//! CORDIC whose first iterations are replaced by one table lookup.
//!
//! The angle range [0, 2) is cut into `2^bits` cells of width `2^-(bits-1)`.
//! Each cell stores the gain-compensated vector rotated to the cell centre
//! and the centre angle itself. A query shifts the raw angle to get the
//! cell, subtracts the stored angle and runs the remaining iterations from
//! the stored vector. The residual is at most `2^-bits`, which the
//! iterations from shift `bits` onward can absorb.

use crate::cordic::{CordicMode, CordicState, CordicTables, Rotator};
use crate::costmodel::{tally, Op};
use crate::error::{Error, Result};
use crate::fixedpoint::{fixed_sub, to_fixed_f64, FixedQ3_28, FRAC_BITS};

/// Largest supported address width.
pub const MAX_ADDR_BITS: u32 = 20;

/// Upper end (exclusive) of the angles a start table covers.
pub const ANGLE_LIMIT: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CordicLutTables {
    bits: u32,
    /// (x, y, θ_consumed) per cell.
    cells: Vec<[FixedQ3_28; 3]>,
    cordic: CordicTables,
}

fn cell_centre(bits: u32, cell: usize) -> f64 {
    if bits == 0 {
        0.0
    } else {
        (cell as f64 + 0.5) * 2f64.powi(1 - bits as i32)
    }
}

/// Exact start vector for a cell, in double precision.
fn cell_vector(mode: CordicMode, inv_gain: f64, theta: f64) -> (f64, f64) {
    match mode {
        CordicMode::Hyperbolic => (inv_gain * theta.cosh(), inv_gain * theta.sinh()),
        _ => (inv_gain * theta.cos(), inv_gain * theta.sin()),
    }
}

/// Start table with `2^lut_addr_bits` cells followed by CORDIC from shift
/// `lut_addr_bits`. Zero address bits gives plain CORDIC.
pub fn build_cordic_lut(
    mode: CordicMode,
    lut_addr_bits: u32,
    n_iter: u32,
) -> Result<CordicLutTables> {
    if mode == CordicMode::Linear {
        return Err(Error::config(
            "CORDIC+LUT needs circular or hyperbolic mode",
        ));
    }
    if lut_addr_bits > MAX_ADDR_BITS {
        return Err(Error::config(format!(
            "{lut_addr_bits} address bits exceeds {MAX_ADDR_BITS}"
        )));
    }
    let cordic = CordicTables::with_skip(mode, lut_addr_bits, n_iter)?;
    let inv_gain = cordic.inv_gain_exact();
    let count = 1usize << lut_addr_bits;
    let mut cells = Vec::with_capacity(count);
    for cell in 0..count {
        let centre = to_fixed_f64(cell_centre(lut_addr_bits, cell))?;
        let (x, y) = cell_vector(mode, inv_gain, centre.to_f64());
        cells.push([to_fixed_f64(x)?, to_fixed_f64(y)?, centre]);
    }
    tally(Op::SetupEntry, count as u64);
    Ok(CordicLutTables {
        bits: lut_addr_bits,
        cells,
        cordic,
    })
}

impl CordicLutTables {
    pub(crate) fn from_parts(
        bits: u32,
        cells: Vec<[FixedQ3_28; 3]>,
        cordic: CordicTables,
    ) -> Result<Self> {
        if cells.len() != 1 << bits || cordic.skip() != bits {
            return Err(Error::Format(format!(
                "{} cells and skip {} do not match {bits} address bits",
                cells.len(),
                cordic.skip()
            )));
        }
        Ok(CordicLutTables {
            bits,
            cells,
            cordic,
        })
    }

    pub fn mode(&self) -> CordicMode {
        self.cordic.mode()
    }

    pub fn addr_bits(&self) -> u32 {
        self.bits
    }

    /// Iterations replaced by the lookup.
    pub fn skip(&self) -> u32 {
        self.bits
    }

    pub fn n_iter(&self) -> u32 {
        self.cordic.n_iter()
    }

    pub fn cells(&self) -> &[[FixedQ3_28; 3]] {
        &self.cells
    }

    pub fn cordic(&self) -> &CordicTables {
        &self.cordic
    }

    /// Iterations run after the lookup.
    pub fn iterations(&self) -> usize {
        self.cordic.iterations()
    }

    /// Three Q3.28 words per cell plus the remaining angle table.
    pub fn memory_bytes(&self) -> usize {
        self.cells.len() * 3 * 4 + self.cordic.angle_table_bytes()
    }

    fn address(&self, theta: FixedQ3_28) -> usize {
        (theta.raw() >> (FRAC_BITS + 1 - self.bits)) as usize
    }
}

/// (x, y) rotated by θ ∈ [0, 2): (cos, sin) or (cosh, sinh) by mode.
pub fn cordic_lut_eval(
    tables: &CordicLutTables,
    theta: FixedQ3_28,
) -> Result<(FixedQ3_28, FixedQ3_28)> {
    let t = theta.to_f64();
    if !(0.0..ANGLE_LIMIT).contains(&t) {
        return Err(Error::range(t, 0.0, ANGLE_LIMIT));
    }
    tally(Op::IntShift, 1);
    tally(Op::Lookup, 3);
    let [x, y, consumed] = tables.cells[tables.address(theta)];
    let residual = fixed_sub(theta, consumed)?;
    let s = tables.cordic.rotate_unchecked(CordicState {
        x,
        y,
        theta: residual,
    });
    Ok((s.x, s.y))
}

impl Rotator for CordicLutTables {
    fn mode(&self) -> CordicMode {
        self.cordic.mode()
    }

    fn rotate(&self, theta: FixedQ3_28) -> Result<(FixedQ3_28, FixedQ3_28)> {
        cordic_lut_eval(self, theta)
    }
}
