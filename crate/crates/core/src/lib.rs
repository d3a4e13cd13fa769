//! Transcendental functions for cores where multiplication is scarce.
//!
//! Eight evaluation methods are provided: CORDIC, multiplication-addressed
//! (M-LUT), ldexp-addressed (L-LUT) and direct float-bit addressed (D-LUT)
//! fuzzy lookup tables with and without interpolation, the L-LUT/D-LUT
//! composite (DL-LUT), and a CORDIC whose first iterations are replaced by a
//! table (CORDIC+LUT). Every kernel reports what it executes to an
//! operation-count cost model, which stands in for cycle counters.
//!
//! The [`api`] module is the usual entry point:
//!
//! ```
//! use pimfunc::api::{build_evaluator, EvaluatorConfig, FunctionId, MethodId, MethodKind};
//!
//! let config = EvaluatorConfig::new(FunctionId::Sin, MethodId::float(MethodKind::LLutInterp), 1 << 14);
//! let sine = build_evaluator(&config).unwrap();
//! let y = sine.evaluate(1.0).unwrap();
//! assert!((y - 1.0f32.sin()).abs() < 1e-6);
//! ```

pub mod api;
pub mod combined;
pub mod cordic;
pub mod costmodel;
mod error;
pub mod fixedpoint;
pub mod harness;
pub mod lut;
pub mod rangeext;

pub use api::{
    build_evaluator, supported, Evaluator, EvaluatorConfig, FunctionId, MethodId, MethodKind,
    NumberFormat,
};
pub use costmodel::{with_counting, OpCounts, Weights};
pub use error::{Error, Result};
pub use fixedpoint::FixedQ3_28;
