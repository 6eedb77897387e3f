use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::Rational;
use crate::error::{Error, Result};

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Rational::one();
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(RationalMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(RationalMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() })
    }

    /// Panics on ragged input; intended for literals.
    pub fn from_ints<T: Copy + Into<BigInt>>(rows: &[Vec<T>]) -> Self {
        let rows = rows
            .iter()
            .map(|row| row.iter().map(|&v| Rational::from_int(v.into())).collect())
            .collect();
        Self::from_rows(rows).expect("rectangular integer literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// Returns a copy with one entry replaced.
    pub fn with_entry(&self, r: usize, c: usize, v: Rational) -> Self {
        let mut m = self.clone();
        m.entries[r * self.cols + c] = v;
        m
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.entries[c * self.rows + r] = self.get(r, c).clone();
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let rows = idx.iter().map(|&r| self.row(r).to_vec()).collect();
        Self::from_rows(rows).unwrap_or_else(|_| Self::zeros(0, self.cols))
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let rows = (0..self.rows)
            .map(|r| idx.iter().map(|&c| self.get(r, c).clone()).collect())
            .collect();
        Self::from_rows(rows).unwrap_or_else(|_| Self::zeros(self.rows, 0))
    }

    pub fn checked_mul(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        out.entries[r * other.cols + c] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * s).collect(),
        }
    }

    pub fn sub(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("matrix subtraction".into()));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(RationalMatrix { rows: self.rows, cols: self.cols, entries })
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(Rational::is_integer)
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    /// Reduced row echelon form and the pivot columns.
    ///
    /// Pivot choice: first nonzero entry at or below the current row.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let mut m = self.to_rows();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(row, p);
            let inv = m[row][col].recip();
            for v in m[row].iter_mut() {
                *v *= &inv;
            }
            let pivot_row = m[row].clone();
            for (r, other) in m.iter_mut().enumerate() {
                if r == row || other[col].is_zero() {
                    continue;
                }
                let f = other[col].clone();
                for (v, p) in other.iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *v -= &(&f * p);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        let out = RationalMatrix::from_rows(m).unwrap_or_else(|_| Self::zeros(self.rows, self.cols));
        (out, pivots)
    }

    /// Row rank over the rationals.
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space { x : self·x = 0 }, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(i, f);
                }
                v
            })
            .collect()
    }

    pub fn determinant(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut m = self.to_rows();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != col {
                m.swap(p, col);
                det = -det;
            }
            det *= &m[col][col];
            let pivot = m[col].clone();
            for row in m.iter_mut().skip(col + 1) {
                if row[col].is_zero() {
                    continue;
                }
                let f = &row[col] / &pivot[col];
                for (v, p) in row.iter_mut().zip(&pivot).skip(col) {
                    *v -= &(&f * p);
                }
            }
        }
        Ok(det)
    }

    pub fn lcm_of_denominators(&self) -> BigInt {
        self.entries.iter().fold(BigInt::one(), |acc, e| acc.lcm(e.denom()))
    }
}

/// Gauss-Jordan inverse with first-nonzero pivoting.
pub fn invert(m: &RationalMatrix) -> Result<RationalMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("cannot invert a {}x{} matrix", m.rows, m.cols)));
    }
    let n = m.rows;
    let mut aug: Vec<Vec<Rational>> = (0..n)
        .map(|r| {
            let mut row = m.row(r).to_vec();
            row.extend((0..n).map(|c| if c == r { Rational::one() } else { Rational::zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !aug[r][col].is_zero()).ok_or(Error::SingularMatrix)?;
        aug.swap(col, p);
        let inv = aug[col][col].recip();
        for v in aug[col].iter_mut() {
            *v *= &inv;
        }
        let pivot = aug[col].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, p) in row.iter_mut().zip(&pivot) {
                if !p.is_zero() {
                    *v -= &(&f * p);
                }
            }
        }
    }
    let entries = aug.into_iter().flat_map(|row| row.into_iter().skip(n)).collect();
    RationalMatrix::from_entries(n, n, entries)
}

/// Solves m·x = rhs for square nonsingular m.
pub fn solve(m: &RationalMatrix, rhs: &[Rational]) -> Result<Vec<Rational>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("solve needs a square matrix".into()));
    }
    if rhs.len() != m.rows {
        return Err(Error::DimensionMismatch(format!(
            "rhs of length {} for {} rows",
            rhs.len(),
            m.rows
        )));
    }
    let n = m.rows;
    let mut aug: Vec<Vec<Rational>> = (0..n)
        .map(|r| {
            let mut row = m.row(r).to_vec();
            row.push(rhs[r].clone());
            row
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !aug[r][col].is_zero()).ok_or(Error::SingularMatrix)?;
        aug.swap(col, p);
        let inv = aug[col][col].recip();
        for v in aug[col].iter_mut() {
            *v *= &inv;
        }
        let pivot = aug[col].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, p) in row.iter_mut().zip(&pivot) {
                *v -= &(&f * p);
            }
        }
    }
    Ok(aug.into_iter().map(|mut row| row.pop().unwrap_or_default()).collect())
}

/// Solves a·X = b for a possibly rectangular a, one column of b at a time.
///
/// Returns `None` if some column is inconsistent. Free variables are set to zero.
pub fn solve_least_pivot(a: &RationalMatrix, b: &RationalMatrix) -> Option<RationalMatrix> {
    if a.rows != b.rows {
        return None;
    }
    let mut aug = Vec::with_capacity(a.rows);
    for r in 0..a.rows {
        let mut row = a.row(r).to_vec();
        row.extend_from_slice(b.row(r));
        aug.push(row);
    }
    let full = RationalMatrix::from_rows(aug).ok()?;
    let (red, pivots) = full.rref();
    if pivots.iter().any(|&p| p >= a.cols) {
        return None;
    }
    let mut x = RationalMatrix::zeros(a.cols, b.cols);
    for (i, &p) in pivots.iter().enumerate() {
        for c in 0..b.cols {
            x.entries[p * b.cols + c] = red.get(i, a.cols + c).clone();
        }
    }
    Some(x)
}

impl Mul for &RationalMatrix {
    type Output = RationalMatrix;

    /// Panics on a dimension mismatch; use `checked_mul` otherwise.
    fn mul(self, rhs: &RationalMatrix) -> RationalMatrix {
        self.checked_mul(rhs).expect("matrix dimensions agree")
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = self.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        for (i, row) in cells.iter().enumerate() {
            let padded: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            write!(f, "{}", padded.join(" "))?;
            if i + 1 < cells.len() {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

impl Serialize for RationalMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<Rational>>::deserialize(deserializer)?;
        RationalMatrix::from_rows(rows).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn identity_inverts_to_itself() {
        let i5 = RationalMatrix::identity(5);
        assert_eq!(invert(&i5).unwrap(), i5);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let m = RationalMatrix::from_ints(&[vec![1, 1], vec![1, 1]]);
        assert_eq!(invert(&m), Err(Error::SingularMatrix));
        assert_eq!(solve(&m, &[r(1, 1), r(0, 1)]), Err(Error::SingularMatrix));
        assert_eq!(m.determinant().unwrap(), Rational::zero());
    }

    #[test]
    fn solve_identity_and_mismatch() {
        let i3 = RationalMatrix::identity(3);
        let rhs = vec![r(1, 1), r(2, 1), r(3, 1)];
        assert_eq!(solve(&i3, &rhs).unwrap(), rhs);
        assert!(matches!(solve(&i3, &rhs[..2]), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn quadric_cayley_transpose_solves_by_z_coefficient() {
        // rows of L for x1^2 + x2^2 with x1 x2 + 1
        let l = RationalMatrix::from_ints(&[
            vec![2, 0, 1, 0, 0],
            vec![0, 2, 1, 0, 0],
            vec![0, 0, 1, 0, 1],
            vec![1, 1, 0, 1, 0],
            vec![0, 0, 0, 1, 0],
        ]);
        let lt = l.transpose();
        let constant = solve(&lt, &[r(1, 1), r(1, 1), r(1, 1), r(1, 1), r(0, 1)]).unwrap();
        let linear = solve(&lt, &[r(0, 1), r(0, 1), r(0, 1), r(0, 1), r(1, 1)]).unwrap();
        // hand back-substitution: xi = ((1-z)/2, (1-z)/2, z, z, 1-z)
        assert_eq!(constant, vec![r(1, 2), r(1, 2), r(0, 1), r(0, 1), r(1, 1)]);
        assert_eq!(linear, vec![r(-1, 2), r(-1, 2), r(1, 1), r(1, 1), r(-1, 1)]);
        let inv = invert(&l).unwrap();
        assert!((&l * &inv).is_identity());
        assert!((&inv * &l).is_identity());
        assert_eq!(inv.lcm_of_denominators(), BigInt::from(4));
        let s_row = inv.select_rows(&[4]);
        assert_eq!(s_row.lcm_of_denominators(), BigInt::from(2));
    }

    #[test]
    fn rank_cases() {
        assert_eq!(RationalMatrix::zeros(3, 3).rank(), 0);
        assert_eq!(RationalMatrix::identity(4).rank(), 4);
        let edges = RationalMatrix::from_ints(&[vec![1, -1], vec![-1, 1]]);
        assert_eq!(edges.rank(), 1);
    }

    #[test]
    fn lcm_of_integer_matrix_is_one() {
        let m = RationalMatrix::from_ints(&[vec![3, -4], vec![0, 7]]);
        assert_eq!(m.lcm_of_denominators(), BigInt::one());
    }

    #[test]
    fn nullspace_vectors_are_annihilated() {
        let m = RationalMatrix::from_ints(&[vec![1, 2, 3, 4], vec![2, 4, 6, 8], vec![0, 1, 1, 0]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(m.mul_vec(v).unwrap().iter().all(Rational::is_zero));
        }
    }

    #[test]
    fn rectangular_solve() {
        let a = RationalMatrix::from_ints(&[vec![1, 1], vec![1, -1], vec![2, 0]]);
        let b = RationalMatrix::from_ints(&[vec![3], vec![1], vec![4]]);
        let x = solve_least_pivot(&a, &b).unwrap();
        assert_eq!(x, RationalMatrix::from_ints(&[vec![2], vec![1]]));
        let bad = RationalMatrix::from_ints(&[vec![3], vec![1], vec![5]]);
        assert!(solve_least_pivot(&a, &bad).is_none());
    }

    #[test]
    fn json_shape() {
        let m = RationalMatrix::from_rows(vec![vec![r(1, 2), r(-3, 1)]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"[["1/2","-3"]]"#);
        let back: RationalMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
