//! Parsers for the small text inputs: matrices, base points, gamma, boxes.

use std::path::Path;

use bottleneck_core::algebra::{parse_system, PolySystem};
use bottleneck_core::Complex;
use nalgebra::DMatrix;

use crate::InputError;

fn csv_rows(text: &str) -> Result<Vec<Vec<f64>>, InputError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| InputError::Csv(format!("record {}: {e}", i + 1)))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let row = rec
            .iter()
            .map(|f| match f.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => Err(InputError::Csv(format!(
                    "record {}: not a finite number: {f:?}",
                    i + 1
                ))),
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Real matrix, one CSV row per matrix row.
pub fn parse_matrix_csv(text: &str) -> Result<DMatrix<f64>, InputError> {
    let rows = csv_rows(text)?;
    let Some(first) = rows.first() else {
        return Err(InputError::Csv("matrix is empty".into()));
    };
    let cols = first.len();
    if let Some(i) = rows.iter().position(|r| r.len() != cols) {
        return Err(InputError::Csv(format!(
            "row {} has {} entries, expected {cols}",
            i + 1,
            rows[i].len()
        )));
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

/// Complex vector, one `re` or `re,im` row per coordinate.
pub fn parse_point_csv(text: &str) -> Result<Vec<Complex>, InputError> {
    let rows = csv_rows(text)?;
    if rows.is_empty() {
        return Err(InputError::Csv("point is empty".into()));
    }
    rows.iter()
        .enumerate()
        .map(|(i, r)| match r.as_slice() {
            [re] => Ok(Complex::new(*re, 0.0)),
            [re, im] => Ok(Complex::new(*re, *im)),
            _ => Err(InputError::Csv(format!(
                "row {} must hold re or re,im",
                i + 1
            ))),
        })
        .collect()
}

/// `re,im`.
pub fn parse_complex(text: &str) -> Result<Complex, InputError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| {
        s.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| InputError::Value(format!("not a finite number: {s:?}")))
    };
    match parts.as_slice() {
        [re, im] => Ok(Complex::new(num(re)?, num(im)?)),
        _ => Err(InputError::Value(format!("expected re,im, got {text:?}"))),
    }
}

/// `lo,hi;lo,hi;...`, one interval per coordinate.
pub fn parse_bounds(text: &str) -> Result<Vec<[f64; 2]>, InputError> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|iv| {
            let c =
                parse_complex(iv).map_err(|_| InputError::Value(format!("bad interval {iv:?}")))?;
            if c.re > c.im {
                return Err(InputError::Value(format!("empty interval {iv:?}")));
            }
            Ok([c.re, c.im])
        })
        .collect()
}

pub fn read_text(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError::Io(format!("{}: {e}", path.display())))
}

pub fn read_system(path: &Path) -> Result<PolySystem, InputError> {
    let text = read_text(path)?;
    parse_system(&text).map_err(|e| InputError::System(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix() {
        let m = parse_matrix_csv("1, 0, 0\n0,1,0\n").unwrap();
        assert_eq!(m.shape(), (2, 3));
        assert_eq!(m[(1, 1)], 1.0);
        assert!(parse_matrix_csv("1,2\n3\n").is_err());
        assert!(parse_matrix_csv("").is_err());
        assert!(parse_matrix_csv("1,nan\n").is_err());
    }

    #[test]
    fn point() {
        let p = parse_point_csv("# base point\n0.5\n1,-2\n").unwrap();
        assert_eq!(p, vec![Complex::new(0.5, 0.0), Complex::new(1.0, -2.0)]);
        assert!(parse_point_csv("1,2,3\n").is_err());
    }

    #[test]
    fn complex_and_bounds() {
        assert_eq!(parse_complex("0.6, 0.8").unwrap(), Complex::new(0.6, 0.8));
        assert!(parse_complex("1").is_err());
        assert_eq!(
            parse_bounds("-2,2;-1,3").unwrap(),
            vec![[-2.0, 2.0], [-1.0, 3.0]]
        );
        assert!(parse_bounds("2,-2").is_err());
    }
}
