use std::fmt::Write as _;

use bose_mesner::scalar::{CMatrix, Cplx as Complex, RMatrix};

const DIGITS: usize = 8;

pub fn real(x: f64) -> String {
    let s = format!("{x:.DIGITS$}");
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

pub fn complex(z: Complex<f64>) -> String {
    let cutoff = 0.5 * 10f64.powi(-(DIGITS as i32));
    if z.im.abs() < cutoff {
        return real(z.re);
    }
    if z.re.abs() < cutoff {
        return format!("{}i", real(z.im));
    }
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{}{sign}{}i", real(z.re), real(z.im.abs()))
}

fn nested(rows: Vec<Vec<String>>) -> String {
    let mut out = String::from("[");
    for (i, row) in rows.iter().enumerate() {
        if i > 0 {
            out.push_str(",\n ");
        }
        let _ = write!(out, "[{}]", row.join(","));
    }
    out.push(']');
    out
}

pub fn real_matrix(m: &RMatrix<f64>) -> String {
    nested(m.row_iter().map(|r| r.iter().map(|&x| real(x)).collect()).collect())
}

pub fn complex_matrix(m: &CMatrix<f64>) -> String {
    nested(m.row_iter().map(|r| r.iter().map(|&z| complex(z)).collect()).collect())
}

pub fn vector(v: &[f64]) -> String {
    format!("[{}]", v.iter().map(|&x| real(x)).collect::<Vec<_>>().join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(real(std::f64::consts::FRAC_1_SQRT_2), "0.70710678");
        assert_eq!(real(-0.0), "0");
        assert_eq!(real(1.0), "1");
        assert_eq!(real(-1e-12), "0");
        assert_eq!(complex(Complex::new(0.5, -0.25)), "0.5-0.25i");
        assert_eq!(complex(Complex::new(0.0, 1.0)), "1i");
    }
}
