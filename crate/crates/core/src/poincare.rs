//! Cyclotomic rational functions ∏(1-λ_q^d) / ∏(1-λ_q^d), the Poincaré
//! series of the structural algebra and of Euler characteristics, and the
//! duality check between them and the monodromy functions.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::ci_model::{charges, derive_weights, ChargeMatrix, CiSpec, WeightSystem};
use crate::error::{Error, Result};
use crate::horn_system::m_function;
use crate::mellin::{implied_transposed_weights, solve_xi};
use crate::ci_model::build_cayley;
use crate::transposition::{transpose_spec, TransposeResult};

/// Factors `(q, d)` stand for `1 - λ_q^d`, with q 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CyclotomicRatio {
    pub variables: usize,
    pub num: Vec<(usize, u64)>,
    pub den: Vec<(usize, u64)>,
}

impl CyclotomicRatio {
    /// Builds the canonical form: factors with d = 0 are skipped, identical
    /// numerator/denominator pairs cancel, both lists are sorted.
    pub fn new(variables: usize, num: Vec<(usize, u64)>, den: Vec<(usize, u64)>) -> Self {
        let mut num: Vec<_> = num.into_iter().filter(|&(_, d)| d > 0).collect();
        let mut den: Vec<_> = den.into_iter().filter(|&(_, d)| d > 0).collect();
        num.sort_unstable();
        den.sort_unstable();
        let (mut i, mut j) = (0, 0);
        let (mut cn, mut cd) = (Vec::new(), Vec::new());
        while i < num.len() || j < den.len() {
            match (num.get(i), den.get(j)) {
                (Some(a), Some(b)) if a == b => {
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a < b => {
                    cn.push(*a);
                    i += 1;
                }
                (Some(_), Some(b)) => {
                    cd.push(*b);
                    j += 1;
                }
                (Some(a), None) => {
                    cn.push(*a);
                    i += 1;
                }
                (None, Some(b)) => {
                    cd.push(*b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        CyclotomicRatio { variables, num: cn, den: cd }
    }

    pub fn one(variables: usize) -> Self {
        CyclotomicRatio { variables, num: Vec::new(), den: Vec::new() }
    }

    /// Total exponent per variable in numerator and denominator.
    pub fn degrees(&self) -> Vec<(u64, u64)> {
        let mut out = vec![(0, 0); self.variables];
        for &(q, d) in &self.num {
            out[q - 1].0 += d;
        }
        for &(q, d) in &self.den {
            out[q - 1].1 += d;
        }
        out
    }

    pub fn degree_balanced(&self) -> bool {
        self.degrees().iter().all(|(a, b)| a == b)
    }

    /// Renames variable q to `map[q-1]` (both 1-based).
    pub fn relabel(&self, map: &[usize]) -> Self {
        let f = |v: &[(usize, u64)]| v.iter().map(|&(q, d)| (map[q - 1], d)).collect();
        Self::new(self.variables, f(&self.num), f(&self.den))
    }

    fn factor_list(&self, v: &[(usize, u64)]) -> String {
        let var = |q: usize| if self.variables == 1 { "λ".to_string() } else { format!("λ{q}") };
        let mut groups: Vec<((usize, u64), usize)> = Vec::new();
        for f in v {
            match groups.last_mut() {
                Some((g, c)) if g == f => *c += 1,
                _ => groups.push((*f, 1)),
            }
        }
        groups
            .iter()
            .map(|&((q, d), c)| {
                let base = if d == 1 { format!("(1-{})", var(q)) } else { format!("(1-{}^{d})", var(q)) };
                if c == 1 {
                    base
                } else {
                    format!("{base}^{c}")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for CyclotomicRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let top = if self.num.is_empty() { "1".to_string() } else { self.factor_list(&self.num) };
        match self.den.len() {
            0 => write!(f, "{top}"),
            1 => write!(f, "{top}/{}", self.factor_list(&self.den)),
            _ => {
                let bottom = self.factor_list(&self.den);
                if bottom.contains(' ') {
                    write!(f, "{top}/({bottom})")
                } else {
                    write!(f, "{top}/{bottom}")
                }
            }
        }
    }
}

/// `∏_q ∏_ν (1-λ_ν^{Q^(ν)_q}) / ∏_ν ∏_j (1-λ_ν^{g^(ν)_j})`.
pub fn poincare_structure(weights: &WeightSystem, charges: &ChargeMatrix) -> CyclotomicRatio {
    let k = charges.k();
    let mut num = Vec::new();
    let mut den = Vec::new();
    for nu in 0..k {
        for q in 0..k {
            num.push((nu + 1, charges.get(q, nu)));
        }
        den.extend(weights.group_weights(nu).into_iter().map(|g| (nu + 1, g)));
    }
    CyclotomicRatio::new(k, num, den)
}

/// `∏_q ∏_ν (1-t_q^{^TQ^(q)_ν}) / ∏_q ∏_j (1-t_q^{^Tg^(q)_j})`.
pub fn poincare_euler(tweights: &WeightSystem, tcharges: &ChargeMatrix) -> CyclotomicRatio {
    let k = tcharges.k();
    let mut num = Vec::new();
    let mut den = Vec::new();
    for q in 0..k {
        num.extend((0..k).map(|nu| (q + 1, tcharges.get(nu, q))));
        den.extend(tweights.group_weights(q).into_iter().map(|g| (q + 1, g)));
    }
    CyclotomicRatio::new(k, num, den)
}

fn poly_mul_factor(p: &mut Vec<BigInt>, d: usize) {
    p.resize(p.len() + d, BigInt::zero());
    for i in (d..p.len()).rev() {
        let lower = p[i - d].clone();
        p[i] -= lower;
    }
}

fn product_poly(factors: impl Iterator<Item = u64>) -> Vec<BigInt> {
    let mut p = vec![BigInt::from(1)];
    for d in factors {
        poly_mul_factor(&mut p, d as usize);
    }
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn exps_for(v: &[(usize, u64)], q: usize) -> impl Iterator<Item = u64> + '_ {
    v.iter().filter(move |&&(r, _)| r == q).map(|&(_, d)| d)
}

/// Exact equality as rational functions.
///
/// Every factor involves one variable and has constant term 1, so the
/// cross-multiplied identity holds iff it holds separately in each variable.
pub fn ratio_equal(a: &CyclotomicRatio, b: &CyclotomicRatio) -> bool {
    if a.variables != b.variables {
        return false;
    }
    let a = CyclotomicRatio::new(a.variables, a.num.clone(), a.den.clone());
    let b = CyclotomicRatio::new(b.variables, b.num.clone(), b.den.clone());
    if a == b {
        return true;
    }
    (1..=a.variables).all(|q| {
        let left = product_poly(exps_for(&a.num, q).chain(exps_for(&b.den, q)));
        let right = product_poly(exps_for(&b.num, q).chain(exps_for(&a.den, q)));
        left == right
    })
}

/// Power-series coefficients up to a total degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesTable {
    pub variables: usize,
    pub order: usize,
    /// Exponent vectors with nonzero coefficients, sorted.
    pub terms: Vec<(Vec<u32>, i64)>,
}

impl SeriesTable {
    pub fn coefficient(&self, exponent: &[u32]) -> i64 {
        self.terms.iter().find(|(e, _)| e == exponent).map_or(0, |(_, c)| *c)
    }

    /// Coefficients of λ^0 … λ^order for a one-variable series.
    pub fn univariate(&self) -> Vec<i64> {
        (0..=self.order as u32).map(|j| self.coefficient(&[j])).collect()
    }
}

fn univariate_series(num: impl Iterator<Item = u64>, den: impl Iterator<Item = u64>, order: usize) -> Vec<BigInt> {
    let mut c = product_poly(num);
    c.resize(c.len().max(order + 1), BigInt::zero());
    c.truncate(order + 1);
    for d in den {
        let d = d as usize;
        for i in d..=order {
            let prev = c[i - d].clone();
            c[i] += prev;
        }
    }
    c
}

pub fn series_expand(r: &CyclotomicRatio, order: usize) -> Result<SeriesTable> {
    if r.num.iter().chain(&r.den).any(|&(_, d)| d == 0) {
        return Err(Error::NotExpandable("factor with exponent 0".into()));
    }
    let per_var: Vec<Vec<BigInt>> = (1..=r.variables)
        .map(|q| univariate_series(exps_for(&r.num, q), exps_for(&r.den, q), order))
        .collect();
    let mut table: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
    table.insert(vec![], BigInt::from(1));
    for series in &per_var {
        let mut next = BTreeMap::new();
        for (e, c) in &table {
            let used: u32 = e.iter().sum();
            for (j, s) in series.iter().enumerate() {
                if used as usize + j > order {
                    break;
                }
                if s.is_zero() {
                    continue;
                }
                let mut e2 = e.clone();
                e2.push(j as u32);
                next.insert(e2, c * s);
            }
        }
        table = next;
    }
    let terms = table
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(e, c)| c.to_i64().map(|c| (e, c)).ok_or_else(|| Error::NotExpandable("coefficient overflow".into())))
        .collect::<Result<_>>()?;
    Ok(SeriesTable { variables: r.variables, order, terms })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityReport {
    pub m_x: CyclotomicRatio,
    pub m_y: CyclotomicRatio,
    pub po_x: CyclotomicRatio,
    pub po_y: CyclotomicRatio,
    pub p_a_x: CyclotomicRatio,
    pub p_a_y: CyclotomicRatio,
    pub identities: Vec<IdentityCheck>,
    pub degree_balanced: bool,
    pub passed: bool,
}

impl DualityReport {
    pub fn first_failure(&self) -> Option<&str> {
        self.identities.iter().find(|c| !c.passed).map(|c| c.name.as_str())
    }
}

/// Monodromy function read off from the Mellin side of `spec`: weights come
/// from the ratios of the ξ forms, not from any stored weight vector.
fn mellin_m_function(spec: &CiSpec, tr: &TransposeResult) -> Result<CyclotomicRatio> {
    let forms = solve_xi(&build_cayley(spec)?)?;
    let tw = implied_transposed_weights(spec, tr, &forms)?;
    let tc = charges(&tr.tspec, &tw);
    Ok(m_function(&tw, &tc))
}

pub fn verify_duality(spec: &CiSpec, tr: &TransposeResult) -> Result<DualityReport> {
    let k = spec.k;
    let wx = derive_weights(spec)?;
    let cx = charges(spec, &wx);
    let tc = charges(&tr.tspec, &tr.tweights);

    let m_x = mellin_m_function(spec, tr)?;
    let back = transpose_spec(&tr.tspec)?;
    // group q of the double transpose is group nu(nu'(q)) of the input
    let map: Vec<usize> = (0..k).map(|q| tr.nu.apply(back.nu.apply(q)) + 1).collect();
    let m_y = mellin_m_function(&tr.tspec, &back)?.relabel(&map);

    let po_y = poincare_euler(&tr.tweights, &tc);
    let p_a_y = poincare_structure(&tr.tweights, &tc);
    let po_x = poincare_euler(&wx, &cx);
    let p_a_x = poincare_structure(&wx, &cx);

    let check = |name: &str, a: &CyclotomicRatio, b: &CyclotomicRatio| IdentityCheck {
        name: name.to_string(),
        lhs: a.to_string(),
        rhs: b.to_string(),
        passed: ratio_equal(a, b),
    };
    let identities = vec![
        check("M_X = PO_Ybar", &m_x, &po_y),
        check("PO_Ybar = P_AY", &po_y, &p_a_y),
        check("M_Y = PO_Xbar", &m_y, &po_x),
        check("PO_Xbar = P_AX", &po_x, &p_a_x),
    ];
    let degree_balanced = [&m_x, &m_y, &po_x, &po_y, &p_a_x, &p_a_y].iter().all(|r| r.degree_balanced());
    let passed = identities.iter().all(|c| c.passed);
    Ok(DualityReport { m_x, m_y, po_x, po_y, p_a_x, p_a_y, identities, degree_balanced, passed })
}
