//! Complete-intersection systems, weight systems, charges and the
//! Cayley-trick matrix.
//!
//! A system has `k` blocks. Block `q` contributes the polynomial
//! `f_{2q-1}` (its exponent rows) and the binomial `f_{2q} = ∏_{i∈I} x_i + 1`
//! (its index set). The variables are split into `k` consecutive groups, group
//! `q` having as many variables as block `q` has monomials; group `q` carries
//! the weight vector `g^(q)`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational_linalg::{invert, primitive_integer_vector, Rational, RationalMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    pub exponents: Vec<Vec<u32>>,
    /// 1-based variable indices.
    pub index_set: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CiSpec {
    pub n: usize,
    pub k: usize,
    pub blocks: Vec<Block>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Vec<u64>>>,
}

impl CiSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::SpecInvalid(format!("parse error: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Number of monomials of block `q` (0-based).
    pub fn tau(&self, q: usize) -> usize {
        self.blocks[q].exponents.len()
    }

    /// Size of the index set of block `q`.
    pub fn tilde_tau(&self, q: usize) -> usize {
        self.blocks[q].index_set.len()
    }

    /// 0-based positions of the variables in weight group `q`.
    pub fn group_range(&self, q: usize) -> std::ops::Range<usize> {
        let start: usize = (0..q).map(|p| self.tau(p)).sum();
        start..start + self.tau(q)
    }

    pub fn group_of(&self, position: usize) -> Option<usize> {
        (0..self.k).find(|&q| self.group_range(q).contains(&position))
    }

    /// 0/1 indicator of the index set of block `q`.
    pub fn indicator(&self, q: usize) -> Vec<i64> {
        let mut v = vec![0; self.n];
        for &i in &self.blocks[q].index_set {
            if (1..=self.n).contains(&i) {
                v[i - 1] = 1;
            }
        }
        v
    }

    /// All monomial exponent rows, block by block.
    pub fn monomials(&self) -> Vec<Vec<i64>> {
        self.blocks
            .iter()
            .flat_map(|b| b.exponents.iter().map(|row| row.iter().map(|&e| i64::from(e)).collect()))
            .collect()
    }

    /// Block index of each monomial row.
    pub fn monomial_blocks(&self) -> Vec<usize> {
        (0..self.k).flat_map(|q| std::iter::repeat_n(q, self.tau(q))).collect()
    }

    /// Rows `v - indicator` for every monomial, block by block.
    pub fn difference_matrix(&self) -> Vec<Vec<i64>> {
        let blocks = self.monomial_blocks();
        self.monomials()
            .into_iter()
            .zip(blocks)
            .map(|(v, q)| {
                let ind = self.indicator(q);
                v.iter().zip(&ind).map(|(a, b)| a - b).collect()
            })
            .collect()
    }

    /// Checks dimensions, the index-set partition and that block sizes add up to `n`.
    pub fn check_structure(&self) -> Result<()> {
        shape_problems(self)
            .into_iter()
            .chain(partition_problems(self))
            .chain(size_problems(self))
            .next()
            .map_or(Ok(()), |p| Err(Error::SpecInvalid(p)))
    }

    /// Human-readable polynomials `f_{2q-1}` and `f_{2q}` for every block.
    pub fn polynomials(&self) -> Vec<(String, String)> {
        self.blocks
            .iter()
            .map(|b| {
                let terms: Vec<String> = b.exponents.iter().map(|row| monomial_string(row)).collect();
                let mut idx = b.index_set.clone();
                idx.sort_unstable();
                let prod: Vec<String> = idx.iter().map(|i| format!("x{i}")).collect();
                (terms.join(" + "), format!("{} + 1", prod.join("*")))
            })
            .collect()
    }
}

pub fn monomial_string(exps: &[u32]) -> String {
    let factors: Vec<String> = exps
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, e) })
        .collect();
    if factors.is_empty() {
        "1".to_string()
    } else {
        factors.join("*")
    }
}

fn shape_problems(spec: &CiSpec) -> Vec<String> {
    let mut out = Vec::new();
    if spec.n == 0 || spec.k == 0 {
        out.push("n and k must be positive".to_string());
    }
    if spec.blocks.len() != spec.k {
        out.push(format!("k = {} but {} blocks given", spec.k, spec.blocks.len()));
    }
    for (q, b) in spec.blocks.iter().enumerate() {
        if b.exponents.is_empty() {
            out.push(format!("block {} has no monomials", q + 1));
        }
        if let Some(row) = b.exponents.iter().find(|r| r.len() != spec.n) {
            out.push(format!("block {} has an exponent row of length {} instead of {}", q + 1, row.len(), spec.n));
        }
        if b.index_set.is_empty() {
            out.push(format!("block {} has an empty index set", q + 1));
        }
        if let Some(i) = b.index_set.iter().find(|&&i| i == 0 || i > spec.n) {
            out.push(format!("block {} index {} is outside 1..={}", q + 1, i, spec.n));
        }
    }
    out
}

fn partition_problems(spec: &CiSpec) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (q, b) in spec.blocks.iter().enumerate() {
        for &i in &b.index_set {
            if !seen.insert(i) {
                out.push(format!("index {} appears twice (again in block {})", i, q + 1));
            }
        }
    }
    let missing: Vec<usize> = (1..=spec.n).filter(|i| !seen.contains(i)).collect();
    if !missing.is_empty() {
        out.push(format!("indices {missing:?} are in no index set"));
    }
    out
}

fn size_problems(spec: &CiSpec) -> Vec<String> {
    let total: usize = spec.blocks.iter().map(|b| b.exponents.len()).sum();
    if total == spec.n {
        Vec::new()
    } else {
        vec![format!("block sizes add up to {total}, expected n = {}", spec.n)]
    }
}

/// One weight vector of length `n` per block, supported on that block's group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightSystem {
    pub vectors: Vec<Vec<u64>>,
}

impl WeightSystem {
    /// Diagonal of G: the weight of each variable in its own group.
    pub fn diagonal(&self) -> Vec<u64> {
        let n = self.vectors.first().map_or(0, Vec::len);
        (0..n).map(|i| self.vectors.iter().map(|v| v[i]).sum()).collect()
    }

    pub fn group_sum(&self, q: usize) -> u64 {
        self.vectors[q].iter().sum()
    }

    /// Nonzero weights of group `q`, in variable order.
    pub fn group_weights(&self, q: usize) -> Vec<u64> {
        self.vectors[q].iter().copied().filter(|&w| w > 0).collect()
    }

    pub fn as_rational_columns(&self) -> RationalMatrix {
        let n = self.vectors.first().map_or(0, Vec::len);
        let rows = (0..n)
            .map(|i| self.vectors.iter().map(|v| Rational::from(v[i])).collect())
            .collect();
        RationalMatrix::from_rows(rows).unwrap_or_else(|_| RationalMatrix::zeros(n, self.vectors.len()))
    }
}

/// Charges: `entries[j][q]` is the weighted degree of block `j` under `g^(q)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChargeMatrix {
    pub entries: Vec<Vec<u64>>,
    /// Least common multiple of the nonzero charges of each weight group.
    pub q_bar: Vec<u64>,
}

impl ChargeMatrix {
    pub fn get(&self, j: usize, q: usize) -> u64 {
        self.entries[j][q]
    }

    pub fn k(&self) -> usize {
        self.entries.len()
    }

    /// Nonzero charges of group `q` over all blocks.
    pub fn group_charges(&self, q: usize) -> Vec<u64> {
        self.entries.iter().map(|row| row[q]).filter(|&c| c > 0).collect()
    }
}

fn kernel_rows_for_group(spec: &CiSpec, q: usize) -> RationalMatrix {
    let cols: Vec<usize> = spec.group_range(q).collect();
    let rows = spec
        .difference_matrix()
        .into_iter()
        .map(|row| cols.iter().map(|&c| Rational::from(row[c])).collect())
        .collect();
    RationalMatrix::from_rows(rows).unwrap_or_else(|_| RationalMatrix::zeros(0, cols.len()))
}

fn check_supplied(spec: &CiSpec, supplied: &[Vec<u64>]) -> Result<WeightSystem> {
    if supplied.len() != spec.k || supplied.iter().any(|v| v.len() != spec.n) {
        return Err(Error::SpecInvalid("supplied weights must be k vectors of length n".into()));
    }
    let diff = spec.difference_matrix();
    for (q, g) in supplied.iter().enumerate() {
        let range = spec.group_range(q);
        let support_ok = g.iter().enumerate().all(|(i, &w)| (w > 0) == range.contains(&i));
        let kernel_ok = diff.iter().all(|row| {
            row.iter().zip(g).map(|(a, &b)| a * i64::try_from(b).unwrap_or(i64::MAX)).sum::<i64>() == 0
        });
        if !support_ok || !kernel_ok {
            return Err(Error::WeightsMismatch { block: q + 1 });
        }
    }
    Ok(WeightSystem { vectors: supplied.to_vec() })
}

/// Solves the quasihomogeneity conditions group by group.
///
/// Each group must have a one-dimensional solution space spanned by a
/// positive vector, which is returned in primitive form. Supplied weights
/// are checked against the conditions and returned unchanged.
pub fn derive_weights(spec: &CiSpec) -> Result<WeightSystem> {
    spec.check_structure()?;
    if let Some(supplied) = &spec.weights {
        return check_supplied(spec, supplied);
    }
    let mut vectors = Vec::with_capacity(spec.k);
    for q in 0..spec.k {
        let kernel = kernel_rows_for_group(spec, q).nullspace();
        match kernel.len() {
            0 => return Err(Error::NoPositiveSolution { block: q + 1 }),
            1 => {}
            dim => return Err(Error::AmbiguousWeights { block: q + 1, dim }),
        }
        let prim = primitive_integer_vector(&kernel[0]).ok_or(Error::NoPositiveSolution { block: q + 1 })?;
        if prim.iter().any(|x| !x.is_positive()) {
            return Err(Error::NoPositiveSolution { block: q + 1 });
        }
        let mut full = vec![0u64; spec.n];
        for (pos, w) in spec.group_range(q).zip(&prim) {
            full[pos] = w.to_u64().ok_or(Error::NoPositiveSolution { block: q + 1 })?;
        }
        vectors.push(full);
    }
    Ok(WeightSystem { vectors })
}

/// Charge of block `j` under group `q`, read off the first monomial of block `j`.
pub fn charges(spec: &CiSpec, w: &WeightSystem) -> ChargeMatrix {
    let entries: Vec<Vec<u64>> = spec
        .blocks
        .iter()
        .map(|b| {
            w.vectors
                .iter()
                .map(|g| b.exponents[0].iter().zip(g).map(|(&e, &x)| u64::from(e) * x).sum())
                .collect()
        })
        .collect();
    let q_bar = (0..w.vectors.len())
        .map(|q| {
            entries
                .iter()
                .map(|row| row[q])
                .filter(|&c| c > 0)
                .fold(1u64, |acc, c| acc.lcm(&c))
        })
        .collect();
    ChargeMatrix { entries, q_bar }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowKind {
    /// Monomial `r` (1-based) of the block.
    Monomial(usize),
    /// The row of `y_{2ν-1} s_ν`.
    SRow,
    /// The row of `y_{2ν} ∏_{i∈I} x_i`.
    ProductRow,
    /// The row of `y_{2ν}`.
    ConstantRow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RowLabel {
    /// 1-based block index.
    pub block: usize,
    pub kind: RowKind,
}

impl fmt::Display for RowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            RowKind::Monomial(r) => write!(f, "f{}.m{}", self.block, r),
            RowKind::SRow => write!(f, "f{}.s", self.block),
            RowKind::ProductRow => write!(f, "f{}.prod", self.block),
            RowKind::ConstantRow => write!(f, "f{}.const", self.block),
        }
    }
}

impl std::str::FromStr for RowLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let bad = || format!("bad row label {s:?}");
        let rest = s.strip_prefix('f').ok_or_else(bad)?;
        let (b, kind) = rest.split_once('.').ok_or_else(bad)?;
        let block = b.parse().map_err(|_| bad())?;
        let kind = match kind {
            "s" => RowKind::SRow,
            "prod" => RowKind::ProductRow,
            "const" => RowKind::ConstantRow,
            m => RowKind::Monomial(m.strip_prefix('m').and_then(|r| r.parse().ok()).ok_or_else(bad)?),
        };
        Ok(RowLabel { block, kind })
    }
}

impl Serialize for RowLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RowLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(de::Error::custom)
    }
}

/// The square Cayley-trick matrix with its row and column bookkeeping.
///
/// Rows of block ν: its monomials, then the s-row, the product row and the
/// constant row. Columns: `x_1..x_n`, `y_1..y_{2k}`, `s_1..s_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CayleyMatrix {
    pub n: usize,
    pub k: usize,
    pub matrix: RationalMatrix,
    pub row_labels: Vec<RowLabel>,
    pub column_labels: Vec<String>,
    /// 1-based index of each block's constant row.
    pub a: Vec<usize>,
    /// Cumulative monomial counts.
    pub b: Vec<usize>,
    /// 1-based indices of the monomial rows.
    pub i_lambda: Vec<usize>,
}

impl CayleyMatrix {
    pub fn size(&self) -> usize {
        self.n + 3 * self.k
    }

    /// 0-based index of the s-row of block ν (0-based).
    pub fn s_row(&self, nu: usize) -> usize {
        self.a[nu] - 3
    }

    pub fn product_row(&self, nu: usize) -> usize {
        self.a[nu] - 2
    }

    pub fn constant_row(&self, nu: usize) -> usize {
        self.a[nu] - 1
    }

    /// 0-based indices of the monomial rows, block by block.
    pub fn monomial_rows(&self) -> Vec<usize> {
        self.i_lambda.iter().map(|i| i - 1).collect()
    }

    /// The monomial rows restricted to the x-columns.
    pub fn l_lambda(&self) -> RationalMatrix {
        let cols: Vec<usize> = (0..self.n).collect();
        self.matrix.select_rows(&self.monomial_rows()).select_columns(&cols)
    }

    pub fn inverse(&self) -> Result<RationalMatrix> {
        invert(&self.matrix)
    }

    pub fn text(&self) -> String {
        let header: Vec<String> = std::iter::once(String::new()).chain(self.column_labels.iter().cloned()).collect();
        let mut cells: Vec<Vec<String>> = vec![header];
        for (r, label) in self.row_labels.iter().enumerate() {
            let mut row = vec![label.to_string()];
            row.extend(self.matrix.row(r).iter().map(ToString::to_string));
            cells.push(row);
        }
        let width = cells.iter().flat_map(|r| r.iter().skip(1)).map(|c| c.chars().count()).max().unwrap_or(1);
        let lw = cells.iter().map(|r| r[0].chars().count()).max().unwrap_or(0);
        cells
            .iter()
            .map(|row| {
                let mut line = format!("{:<lw$}", row[0]);
                for c in &row[1..] {
                    line.push_str(&format!(" {c:>width$}"));
                }
                line.trim_end().to_string()
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

pub fn build_cayley(spec: &CiSpec) -> Result<CayleyMatrix> {
    spec.check_structure()?;
    let (n, k) = (spec.n, spec.k);
    let size = n + 3 * k;
    let y = |j: usize| n + j;
    let s = |nu: usize| n + 2 * k + nu;
    let mut rows = Vec::with_capacity(size);
    let mut labels = Vec::with_capacity(size);
    let mut a = Vec::with_capacity(k);
    let mut b = Vec::with_capacity(k);
    let mut i_lambda = Vec::with_capacity(n);
    let mut monomials_so_far = 0;
    for (nu, block) in spec.blocks.iter().enumerate() {
        let label = |kind| RowLabel { block: nu + 1, kind };
        for (r, exps) in block.exponents.iter().enumerate() {
            let mut row = vec![Rational::zero(); size];
            for (i, &e) in exps.iter().enumerate() {
                row[i] = Rational::from(i64::from(e));
            }
            row[y(2 * nu)] = Rational::one();
            rows.push(row);
            labels.push(label(RowKind::Monomial(r + 1)));
            i_lambda.push(rows.len());
        }
        monomials_so_far += block.exponents.len();

        let mut s_row = vec![Rational::zero(); size];
        s_row[y(2 * nu)] = Rational::one();
        s_row[s(nu)] = Rational::one();
        rows.push(s_row);
        labels.push(label(RowKind::SRow));

        let mut prod = vec![Rational::zero(); size];
        for &i in &block.index_set {
            prod[i - 1] = Rational::one();
        }
        prod[y(2 * nu + 1)] = Rational::one();
        rows.push(prod);
        labels.push(label(RowKind::ProductRow));

        let mut constant = vec![Rational::zero(); size];
        constant[y(2 * nu + 1)] = Rational::one();
        rows.push(constant);
        labels.push(label(RowKind::ConstantRow));

        b.push(monomials_so_far);
        a.push(monomials_so_far + 3 * (nu + 1));
    }
    let column_labels = (1..=n)
        .map(|i| format!("x{i}"))
        .chain((1..=2 * k).map(|j| format!("y{j}")))
        .chain((1..=k).map(|j| format!("s{j}")))
        .collect();
    Ok(CayleyMatrix {
        n,
        k,
        matrix: RationalMatrix::from_rows(rows)?,
        row_labels: labels,
        column_labels,
        a,
        b,
        i_lambda,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.to_string(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub checks: Vec<Check>,
    pub weights: Option<WeightSystem>,
    pub charges: Option<ChargeMatrix>,
}

pub fn validate(spec: &CiSpec) -> ValidationReport {
    let mut checks = Vec::new();
    let shape = shape_problems(spec);
    let shape_ok = shape.is_empty();
    checks.push(Check::new("shape", shape_ok, shape.join("; ")));
    if !shape_ok {
        return finish(checks, None, None);
    }
    let part = partition_problems(spec);
    checks.push(Check::new("partition", part.is_empty(), part.join("; ")));
    let sizes = size_problems(spec);
    checks.push(Check::new("block_sizes", sizes.is_empty(), sizes.join("; ")));
    if !part.is_empty() || !sizes.is_empty() {
        return finish(checks, None, None);
    }

    let (weights, charge) = match derive_weights(spec) {
        Ok(w) => {
            let c = charges(spec, &w);
            checks.push(Check::new("quasihomogeneity", true, format!("weights {:?}", w.vectors)));
            let mut cy_ok = true;
            let mut detail = Vec::new();
            for q in 0..spec.k {
                let lhs: u64 = c.entries.iter().map(|row| row[q]).sum();
                let rhs = w.group_sum(q);
                cy_ok &= lhs == rhs;
                detail.push(format!("group {}: charges {} vs weights {}", q + 1, lhs, rhs));
            }
            checks.push(Check::new("calabi_yau", cy_ok, detail.join("; ")));
            (Some(w), Some(c))
        }
        Err(e) => {
            checks.push(Check::new("quasihomogeneity", false, e.to_string()));
            checks.push(Check::new("calabi_yau", false, "no positive weight system"));
            (None, None)
        }
    };

    match build_cayley(spec).and_then(|cm| cm.matrix.determinant()) {
        Ok(det) => checks.push(Check::new("cayley_nonsingular", !det.is_zero(), format!("det = {det}"))),
        Err(e) => checks.push(Check::new("cayley_nonsingular", false, e.to_string())),
    }
    finish(checks, weights, charge)
}

fn finish(checks: Vec<Check>, weights: Option<WeightSystem>, charges: Option<ChargeMatrix>) -> ValidationReport {
    ValidationReport { valid: checks.iter().all(|c| c.passed), checks, weights, charges }
}

/// Weighted degrees of every monomial and of the index-set product under each group.
pub fn pairing_table(spec: &CiSpec, w: &WeightSystem) -> Vec<Vec<Vec<BigInt>>> {
    (0..spec.k)
        .map(|j| {
            let mut rows: Vec<Vec<i64>> = spec.blocks[j]
                .exponents
                .iter()
                .map(|r| r.iter().map(|&e| i64::from(e)).collect())
                .collect();
            rows.push(spec.indicator(j));
            rows.iter()
                .map(|row| {
                    w.vectors
                        .iter()
                        .map(|g| row.iter().zip(g).map(|(&a, &b)| BigInt::from(a) * BigInt::from(b)).sum())
                        .collect()
                })
                .collect()
        })
        .collect()
}
