//! Parsing of state specifications given on the command line.

use qsteer_core::{make_pure_state, Complex64, DensityMatrix};

use crate::error::{Error, Result};

/// Parses a state spec in dimension `dim`.
///
/// Accepted forms: a basis index (`0`, `1`, ...), `+` / `-` for
/// `(|0> +- |1>)/sqrt 2`, `mixed` for `I/d`, or a comma-separated amplitude
/// list whose entries are `re` or `re:im` (normalized on input).
pub fn parse_state(spec: &str, dim: usize) -> Result<DensityMatrix> {
    let spec = spec.trim();
    let bad = |reason: String| Error::Config(format!("state `{spec}`: {reason}"));
    if spec == "mixed" {
        return Ok(DensityMatrix::maximally_mixed(dim));
    }
    if spec == "+" || spec == "-" {
        if dim < 2 {
            return Err(bad("needs dimension >= 2".into()));
        }
        let sign = if spec == "+" { 1.0 } else { -1.0 };
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[0] = Complex64::new(1.0, 0.0);
        v[1] = Complex64::new(sign, 0.0);
        return Ok(make_pure_state(&v)?);
    }
    if !spec.contains(',') {
        let k: usize = spec
            .parse()
            .map_err(|_| bad("expected a basis index, `+`, `-`, `mixed` or amplitudes".into()))?;
        return DensityMatrix::basis(dim, k).map_err(|_| bad(format!("basis index out of range for dimension {dim}")));
    }
    let amps = spec
        .split(',')
        .map(|entry| {
            let mut parts = entry.split(':');
            let re = parts.next().unwrap_or("").trim().parse::<f64>();
            let im = parts.next().map(|s| s.trim().parse::<f64>()).unwrap_or(Ok(0.0));
            match (re, im, parts.next()) {
                (Ok(re), Ok(im), None) => Ok(Complex64::new(re, im)),
                _ => Err(bad(format!("cannot parse amplitude `{entry}`"))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    if amps.len() != dim {
        return Err(bad(format!("{} amplitudes for dimension {dim}", amps.len())));
    }
    make_pure_state(&amps).map_err(|e| bad(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_and_named_states() {
        let zero = parse_state("0", 2).unwrap();
        assert_eq!(zero, DensityMatrix::basis(2, 0).unwrap());
        let plus = parse_state("+", 2).unwrap();
        assert!((plus.matrix()[(0, 1)].re - 0.5).abs() < 1e-15);
        let minus = parse_state("-", 2).unwrap();
        assert!((minus.matrix()[(0, 1)].re + 0.5).abs() < 1e-15);
        assert_eq!(parse_state("mixed", 3).unwrap(), DensityMatrix::maximally_mixed(3));
    }

    #[test]
    fn amplitude_lists() {
        let s = parse_state("3,4", 2).unwrap();
        assert!((s.matrix()[(1, 1)].re - 0.64).abs() < 1e-12);
        let c = parse_state("1, 0:1", 2).unwrap();
        assert!((c.matrix()[(0, 1)].im + 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_specs() {
        for spec in ["2", "x", "1,2,3", "0,0", "1:2:3,0", ""] {
            assert!(matches!(parse_state(spec, 2), Err(Error::Config(_))), "{spec}");
        }
    }
}
