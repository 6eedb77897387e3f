use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rational;

pub fn gcd_all<'a>(values: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    values.into_iter().fold(BigInt::zero(), |acc, v| acc.gcd(v))
}

pub fn lcm_all<'a>(values: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, v| if v.is_zero() { acc } else { acc.lcm(v) })
}

/// Scales a rational vector to the primitive integer vector on the same ray.
///
/// The sign is chosen so the first nonzero entry is positive. Returns `None`
/// for the zero vector.
pub fn primitive_integer_vector(v: &[Rational]) -> Option<Vec<BigInt>> {
    let first = v.iter().find(|x| !x.is_zero())?;
    let denom = lcm_all(v.iter().map(Rational::denom));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * &Rational::from_int(denom.clone())).to_integer().expect("cleared denominators"))
        .collect();
    let g = gcd_all(&ints);
    let sign = if first.is_negative() { -BigInt::one() } else { BigInt::one() };
    Some(ints.into_iter().map(|x| x / &g * &sign).collect())
}

/// Lattice basis of { y ∈ Z^m : ⟨y, w⟩ = 0 }.
///
/// Runs a Euclidean column reduction on w, tracking a unimodular transform;
/// the columns that end up paired with zeros of w form the basis.
pub fn integer_kernel_of_row(w: &[BigInt]) -> Vec<Vec<BigInt>> {
    let m = w.len();
    let mut row = w.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    loop {
        let nonzero: Vec<usize> = (0..m).filter(|&i| !row[i].is_zero()).collect();
        if nonzero.len() <= 1 {
            break;
        }
        let p = *nonzero.iter().min_by_key(|&&i| row[i].abs()).expect("nonempty");
        for &j in &nonzero {
            if j == p {
                continue;
            }
            let q = row[j].div_floor(&row[p]);
            row[j] = &row[j] - &q * &row[p];
            let colp = u[p].clone();
            for (a, b) in u[j].iter_mut().zip(&colp) {
                *a -= &q * b;
            }
        }
    }
    (0..m).filter(|&i| row[i].is_zero()).map(|i| u[i].clone()).collect()
}

/// Lattice basis of { y ∈ Z^m : ⟨y, w⟩ = 0 for every row w }.
pub fn integer_kernel(rows: &[Vec<BigInt>], m: usize) -> Vec<Vec<BigInt>> {
    let mut basis: Vec<Vec<BigInt>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    for w in rows {
        let images: Vec<BigInt> = basis.iter().map(|b| b.iter().zip(w).map(|(x, y)| x * y).sum()).collect();
        basis = integer_kernel_of_row(&images)
            .into_iter()
            .map(|c| {
                (0..m)
                    .map(|i| c.iter().zip(&basis).map(|(a, b)| a * &b[i]).sum())
                    .collect()
            })
            .collect();
    }
    basis
}
