//! Gaussian elimination over a local field with minimal-valuation pivots.

use super::element::PadicElement;
use super::field::LocalField;
use crate::error::{Error, Result};

pub type Matrix = Vec<Vec<PadicElement>>;

fn pivot_row(m: &Matrix, col: usize, from: usize) -> Option<usize> {
    (from..m.len())
        .filter(|&r| !m[r][col].is_zero())
        .min_by_key(|&r| m[r][col].valuation_pi().unwrap())
}

/// Reduces `[a | rhs]` in place to echelon form; returns the determinant of `a`.
fn eliminate(a: &mut Matrix, rhs: &mut [Vec<PadicElement>], field: &LocalField) -> Result<PadicElement> {
    let n = a.len();
    let mut det = field.one();
    for col in 0..n {
        let r = pivot_row(a, col, col).ok_or_else(|| Error::InvalidInput("singular matrix".into()))?;
        if r != col {
            a.swap(r, col);
            rhs.swap(r, col);
            det = -det;
        }
        let piv = a[col][col].clone();
        det = &det * &piv;
        let inv = piv.inv()?;
        for row in 0..n {
            if row == col || a[row][col].is_exact_zero() {
                continue;
            }
            let factor = &a[row][col] * &inv;
            for k in col..n {
                let t = &factor * &a[col][k];
                a[row][k] = &a[row][k] - &t;
            }
            for k in 0..rhs[row].len() {
                let t = &factor * &rhs[col][k];
                rhs[row][k] = &rhs[row][k] - &t;
            }
        }
        for k in 0..rhs[col].len() {
            rhs[col][k] = &rhs[col][k] * &inv;
        }
        for k in col..n {
            a[col][k] = &a[col][k] * &inv;
        }
    }
    Ok(det)
}

/// Solves `a x = b` for square `a`.
pub fn solve(a: &Matrix, b: &[PadicElement]) -> Result<Vec<PadicElement>> {
    let field = a[0][0].field().clone();
    let mut m = a.clone();
    let mut rhs: Vec<Vec<PadicElement>> = b.iter().map(|x| vec![x.clone()]).collect();
    eliminate(&mut m, &mut rhs, &field)?;
    Ok(rhs.into_iter().map(|mut r| r.remove(0)).collect())
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    let n = a.len();
    let field = a[0][0].field().clone();
    let mut m = a.clone();
    let mut rhs: Matrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { field.one() } else { field.zero() })
                .collect()
        })
        .collect();
    eliminate(&mut m, &mut rhs, &field)?;
    Ok(rhs)
}

pub fn det(a: &Matrix) -> Result<PadicElement> {
    let field = a[0][0].field().clone();
    let mut m = a.clone();
    let mut rhs: Vec<Vec<PadicElement>> = vec![vec![]; a.len()];
    match eliminate(&mut m, &mut rhs, &field) {
        Ok(d) => Ok(d),
        Err(Error::InvalidInput(_)) => Ok(field.zero_to(field.prec() as i64)),
        Err(e) => Err(e),
    }
}

pub fn mat_vec(a: &Matrix, v: &[PadicElement]) -> Vec<PadicElement> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .map(|(x, y)| x * y)
                .reduce(|s, t| s + t)
                .unwrap()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{assert_equal, PrimeConfig};

    #[test]
    fn solve_and_det() {
        let k = LocalField::qp(PrimeConfig::new(3, 32).unwrap());
        let e = |v: i64| k.from_int(v);
        let a = vec![vec![e(3), e(1)], vec![e(9), e(2)]];
        let d = det(&a).unwrap();
        assert!(assert_equal(&d, &e(-3), 28));
        let x = solve(&a, &[e(5), e(12)]).unwrap();
        // 3x+y=5, 9x+2y=12 -> x = 2/3, y = 3
        assert!(assert_equal(&x[0], &k.from_ratio_i64(2, 3), 26));
        assert!(assert_equal(&x[1], &e(3), 26));
        let inv = inverse(&a).unwrap();
        let v = mat_vec(&inv, &[e(5), e(12)]);
        assert!(assert_equal(&v[1], &e(3), 26));
    }
}
