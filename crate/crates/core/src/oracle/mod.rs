//! Slow, independent checks of the closed forms: principal-value frequency
//! integrals, brute-force distance integrals, fixed-point special functions
//! and 3D-quadrature matrix elements. Shipped in the library so that the
//! audit can be rerun from the command line.

pub mod closure;
pub mod hp;
pub mod oscillatory;
pub mod pv;

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::hydrogen::AtomicConstants;

pub use closure::{
    brute_force_mixing_products, closure_expectation, direct_element, ClosureCheck, ClosureOperator,
};
pub use oscillatory::{oscillatory_l_integral, Kernel, LIntegral, Route};
pub use pv::{principal_value, pv_omega_integral, PvEstimate, PvSetup};

/// χ pairs used for difference comparisons, all inside `[0.1, 10³]`.
pub const CHI_PAIRS: [(f64, f64); 7] = [
    (0.1, 0.17),
    (0.5, 0.9),
    (2.0, 3.3),
    (10.0, 17.0),
    (60.0, 95.0),
    (300.0, 520.0),
    (1000.0, 610.0),
];

/// One comparison between a closed form and an oracle value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditRow {
    pub case_id: String,
    pub closed_form: f64,
    pub oracle: f64,
    pub rel_error: f64,
}

impl AuditRow {
    fn new(case_id: String, closed_form: f64, oracle: f64) -> Self {
        let rel_error = (closed_form - oracle).abs() / oracle.abs().max(f64::MIN_POSITIVE);
        AuditRow {
            case_id,
            closed_form,
            oracle,
            rel_error,
        }
    }
}

/// Differences `F(χ_a) − F(χ_b)` of I₁, I₂, J₁, J₂ for both gap signs (ℱ
/// for positive, ℒ for negative) against the contour-rotation oracle.
pub fn integral_audit(constants: &AtomicConstants) -> Result<Vec<AuditRow>> {
    let mut cases = Vec::new();
    for kernel in Kernel::ALL {
        for gap in [constants.fine_structure, -constants.lamb_shift] {
            for (ca, cb) in CHI_PAIRS {
                cases.push((kernel, gap, ca, cb));
            }
        }
    }
    cases
        .par_iter()
        .map(|&(kernel, gap, ca, cb)| {
            let za = ca / (2.0 * gap.abs());
            let zb = cb / (2.0 * gap.abs());
            let oracle = oscillatory_l_integral(kernel, gap, za, zb)?;
            let closed =
                oscillatory::closed_form(kernel, gap, za)? - oscillatory::closed_form(kernel, gap, zb)?;
            let sign = if gap > 0.0 { '+' } else { '-' };
            Ok(AuditRow::new(format!("{}:{sign}:{ca}-{cb}", kernel.name()), closed, oracle))
        })
        .collect()
}

/// `−ln|ℰ+L|` against the subtracted principal-value frequency integral.
pub fn pv_audit(constants: &AtomicConstants) -> Result<Vec<AuditRow>> {
    let mut rows = Vec::new();
    for gap in [constants.fine_structure, -constants.lamb_shift] {
        for frac in [0.0, 0.3, 2.5] {
            let lower = frac * gap.abs();
            let z = 10.0 / gap.abs();
            let est = pv_omega_integral(gap, lower, z, 0)?;
            let exact = -(gap + lower).abs().ln();
            let sign = if gap > 0.0 { '+' } else { '-' };
            rows.push(AuditRow::new(format!("pv:{sign}:L={frac}|E|"), exact, est.value));
        }
    }
    Ok(rows)
}

/// Fixed-point `T` and `U` against the double-precision kernels.
pub fn special_function_audit() -> Result<Vec<AuditRow>> {
    use crate::specfun::{t_and_u, Chi};
    let mut rows = Vec::new();
    for x in [1e-3, 0.1, 1.0, 7.9, 8.1, 30.0, 120.0] {
        let hp = hp::evaluate(x)?;
        let (t, u) = t_and_u(Chi::new(x)?);
        rows.push(AuditRow::new(format!("T:{x}"), t, hp.t));
        rows.push(AuditRow::new(format!("U:{x}"), u, hp.u));
    }
    Ok(rows)
}

/// All audit rows in a fixed order.
pub fn full_audit(constants: &AtomicConstants) -> Result<Vec<AuditRow>> {
    let mut rows = integral_audit(constants)?;
    rows.extend(pv_audit(constants)?);
    rows.extend(special_function_audit()?);
    Ok(rows)
}

/// CSV with header `case_id,closed_form,oracle,rel_error`.
pub fn write_audit_csv<W: Write>(rows: &[AuditRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn audit_csv_has_header_and_rows() {
        let rows = special_function_audit().unwrap();
        let mut buf = Vec::new();
        write_audit_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("case_id,closed_form,oracle,rel_error\n"));
        assert_eq!(text.lines().count(), rows.len() + 1);
        assert!(rows.iter().all(|r| r.rel_error < 1e-12), "{rows:?}");
    }

    #[test]
    fn pv_rows_agree() {
        let rows = pv_audit(&AtomicConstants::default()).unwrap();
        for r in rows {
            assert!((r.closed_form - r.oracle).abs() < 1e-8, "{r:?}");
        }
    }
}
