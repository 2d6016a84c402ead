//! Residual validation of solution lists against a system.

use std::fmt::Write as _;

use num_complex::{Complex, Complex64};

use crate::error::{Error, Result};
use crate::phc::{sci, to_complex, written_value, ExactSystem, SolutionRecord};

/// Residuals above this are flagged.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// Digit counts above this evaluate in exact rational arithmetic.
pub const DOUBLE_DIGITS: usize = 15;

#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub index: usize,
    /// Largest modulus over the equations.
    pub value: f64,
    pub flagged: bool,
}

/// Coordinates of `record` in the variable order of `system`, matched by
/// name.
fn ordered<'a>(system: &ExactSystem, record: &'a SolutionRecord) -> Result<Vec<&'a Complex64>> {
    if record.coordinates.len() != system.nvars() {
        return Err(Error::Arity {
            index: record.index,
            expected: system.nvars(),
            got: record.coordinates.len(),
        });
    }
    system
        .names()
        .iter()
        .map(|n| {
            record
                .coordinates
                .iter()
                .find(|(m, _)| m == n)
                .map(|(_, z)| z)
                .ok_or_else(|| Error::UnknownName(n.clone()))
        })
        .collect()
}

/// Max-norm residual of every record. With more than 15 `digits` the
/// coordinates are taken as the exact decimals a solution file holds and
/// the system is evaluated without rounding.
pub fn validate_solutions(
    system: &ExactSystem,
    records: &[SolutionRecord],
    digits: usize,
    tolerance: f64,
) -> Result<Vec<Residual>> {
    let float_system = crate::phc::float_system(system);
    records
        .iter()
        .map(|record| {
            let point = ordered(system, record)?;
            let value = if digits > DOUBLE_DIGITS {
                let exact: Vec<_> = point
                    .iter()
                    .map(|z| Complex::new(written_value(z.re), written_value(z.im)))
                    .collect();
                system
                    .evaluate(&exact)?
                    .iter()
                    .map(|r| to_complex(r).norm())
                    .fold(0.0, f64::max)
            } else {
                let point: Vec<Complex64> = point.into_iter().copied().collect();
                float_system.evaluate(&point)?.iter().map(|r| r.norm()).fold(0.0, f64::max)
            };
            Ok(Residual {
                index: record.index,
                value,
                flagged: value.is_nan() || value > tolerance,
            })
        })
        .collect()
}

/// The residual section of a validation report.
pub fn residual_report(residuals: &[Residual], digits: usize) -> String {
    let mut out = format!("THE RESIDUALS with {digits} decimal places :\n");
    for r in residuals {
        let _ = write!(out, "residual {} : {}", r.index, sci(r.value, 10));
        if r.flagged {
            out.push_str("  flagged");
        }
        out.push('\n');
    }
    out
}
