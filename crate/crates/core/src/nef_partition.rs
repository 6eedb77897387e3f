//! Polytopes spanned by the block difference vectors, their dual vertices,
//! the cones built on both, and the magic-square matching of L⁻¹ entries.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::ci_model::{derive_weights, CayleyMatrix, CiSpec, WeightSystem};
use crate::error::{Error, Result};
use crate::mellin::LinearForm;
use crate::rational_linalg::{integer_kernel, primitive_integer_vector, solve_least_pivot, PermutationMap, Rational, RationalMatrix};
use crate::transposition::TransposeResult;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticePolytope {
    pub ambient: usize,
    /// Hull generators; the origin comes first.
    pub vertices: Vec<Vec<i64>>,
    /// Basis of the lattice orthogonal to every weight vector.
    pub sublattice: Vec<Vec<i64>>,
}

fn dot_int(a: &[i64], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| y * &Rational::from(*x)).sum()
}

fn sublattice_basis(weights: &WeightSystem, n: usize) -> Vec<Vec<i64>> {
    let rows: Vec<Vec<BigInt>> = weights.vectors.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect();
    integer_kernel(&rows, n)
        .into_iter()
        .filter_map(|b| {
            let r: Vec<Rational> = b.into_iter().map(Rational::from).collect();
            primitive_integer_vector(&r)
        })
        .map(|v| v.iter().map(|x| x.to_i64().expect("small lattice")).collect())
        .collect()
}

/// `Δ_q = hull({0} ∪ {v_j - v_{τ_q+1}})` for every block.
pub fn build_deltas(spec: &CiSpec, weights: &WeightSystem) -> Vec<LatticePolytope> {
    let diff = spec.difference_matrix();
    let sublattice = sublattice_basis(weights, spec.n);
    let blocks = spec.monomial_blocks();
    (0..spec.k)
        .map(|q| {
            let mut vertices = vec![vec![0i64; spec.n]];
            for (row, _) in diff.iter().zip(&blocks).filter(|(_, &b)| b == q) {
                if !vertices.contains(row) {
                    vertices.push(row.clone());
                }
            }
            LatticePolytope { ambient: spec.n, vertices, sublattice: sublattice.clone() }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinkowskiReport {
    pub dim: usize,
    pub expected: usize,
    pub passed: bool,
}

/// Dimension of `Δ_1 + … + Δ_k`, compared against n - k.
pub fn minkowski_dim(deltas: &[LatticePolytope]) -> MinkowskiReport {
    let n = deltas.first().map_or(0, |d| d.ambient);
    let rows: Vec<Vec<i64>> = deltas.iter().flat_map(|d| d.vertices.iter().skip(1).cloned()).collect();
    let dim = if rows.is_empty() { 0 } else { RationalMatrix::from_ints(&rows).rank() };
    let expected = n.saturating_sub(deltas.len());
    MinkowskiReport { dim, expected, passed: dim == expected }
}

/// `φ_q(y) = -min_{x ∈ Δ_q} ⟨x, y⟩`.
pub fn support_phi(deltas: &[LatticePolytope], q: usize, y: &[Rational]) -> Rational {
    let min = deltas[q].vertices.iter().map(|x| dot_int(x, y)).min().unwrap_or_else(Rational::zero);
    -min
}

/// Monomial exponent matrix minus block indicators; row order follows the blocks.
pub fn torus_embedding(spec: &CiSpec) -> Vec<Vec<i64>> {
    spec.difference_matrix()
}

/// The first standard basis vectors that complete the weight vectors to a basis (0-based).
pub fn coordinate_section(weights: &WeightSystem, n: usize) -> Vec<usize> {
    let mut rows: Vec<Vec<Rational>> =
        weights.vectors.iter().map(|v| v.iter().map(|&x| Rational::from(x)).collect()).collect();
    let mut rank = RationalMatrix::from_rows(rows.clone()).map_or(0, |m| m.rank());
    let mut section = Vec::new();
    for i in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[i] = Rational::one();
        rows.push(e);
        let r = RationalMatrix::from_rows(rows.clone()).map_or(0, |m| m.rank());
        if r > rank {
            rank = r;
            section.push(i);
        } else {
            rows.pop();
        }
    }
    section
}

/// Whether `m + Σ t_q g^(q)` is integral for some real t.
fn has_integral_representative(m: &[Rational], weights: &WeightSystem) -> bool {
    let mut rest: Vec<bool> = vec![true; m.len()];
    for g in &weights.vectors {
        let support: Vec<usize> = (0..g.len()).filter(|&i| g[i] > 0).collect();
        for &i in &support {
            rest[i] = false;
        }
        let Some(&i0) = support.first() else { continue };
        let g0 = g[i0] as i64;
        let ok = (0..g0).any(|a| {
            let t = (&m[i0] - &Rational::from(a)) / Rational::from(g0);
            support.iter().all(|&i| (&m[i] - &(&t * &Rational::from(g[i]))).is_integer())
        });
        if !ok {
            return false;
        }
    }
    m.iter().zip(rest).all(|(x, free)| !free || x.is_integer())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualVertex {
    /// 1-based block ℓ.
    pub block: usize,
    /// 1-based variable of `I^(ℓ)` indexing the vertex.
    pub variable: usize,
    /// Representative in R^n supported on the coordinate section.
    pub vector: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexCheck {
    pub block: usize,
    pub variable: usize,
    /// Pairings with the difference vectors of the vertex's own block.
    pub own_pairings: Vec<Rational>,
    pub own_block_all_minus_one: bool,
    pub own_block_at_least_minus_one: bool,
    pub other_blocks_nonnegative: bool,
    /// At most one nonzero pairing inside every other block.
    pub other_blocks_single_support: bool,
    /// For each block, the 1-based index of its nonzero pairing, when there is exactly one.
    pub j_q: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeGenerators {
    pub v_labels: Vec<String>,
    pub v: Vec<Vec<Rational>>,
    pub m_labels: Vec<String>,
    pub m: Vec<Vec<Rational>>,
}

impl ConeGenerators {
    pub fn pairings(&self) -> Vec<Vec<Rational>> {
        self.v
            .iter()
            .map(|v| self.m.iter().map(|m| v.iter().zip(m).map(|(a, b)| a * b).sum()).collect())
            .collect()
    }
}

/// Generators `(x, ε_q)` of σ and `(m, ε_ℓ)` of its dual.
pub fn cone_generators(spec: &CiSpec, duals: &[DualVertex]) -> ConeGenerators {
    let (n, k) = (spec.n, spec.k);
    let lift = |x: Vec<Rational>, q: usize| {
        let mut v = x;
        v.extend((0..k).map(|l| if l == q { Rational::one() } else { Rational::zero() }));
        v
    };
    let diff = spec.difference_matrix();
    let blocks = spec.monomial_blocks();
    let mut gens = ConeGenerators { v_labels: Vec::new(), v: Vec::new(), m_labels: Vec::new(), m: Vec::new() };
    for q in 0..k {
        gens.v_labels.push(format!("v{}_0", q + 1));
        gens.v.push(lift(vec![Rational::zero(); n], q));
        for (j, row) in diff.iter().zip(&blocks).filter(|(_, &b)| b == q).map(|(r, _)| r).enumerate() {
            gens.v_labels.push(format!("v{}_{}", q + 1, j + 1));
            gens.v.push(lift(row.iter().map(|&x| Rational::from(x)).collect(), q));
        }
        gens.m_labels.push(format!("m{}_0", q + 1));
        gens.m.push(lift(vec![Rational::zero(); n], q));
        for (r, d) in duals.iter().filter(|d| d.block == q + 1).enumerate() {
            gens.m_labels.push(format!("m{}_{}", q + 1, r + 1));
            gens.m.push(lift(d.vector.clone(), q));
        }
    }
    gens
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NefFlags {
    pub minkowski_dim_ok: bool,
    pub p_integral: bool,
    pub phi_is_delta: bool,
    pub pairings_nonnegative: bool,
    pub own_block_all_minus_one: bool,
    pub own_block_at_least_minus_one: bool,
    pub other_blocks_nonnegative: bool,
    pub other_blocks_single_support: bool,
    /// Hypotheses under which solvability is guaranteed.
    pub lambda_identity: bool,
    pub weights_identity: bool,
    pub transposed_weights_identity: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NefPartitionData {
    pub deltas: Vec<LatticePolytope>,
    pub minkowski: MinkowskiReport,
    /// 1-based coordinates spanning the chosen section of R^n / Σ R·g.
    pub section: Vec<usize>,
    pub duals: Vec<DualVertex>,
    #[serde(rename = "P")]
    pub p: RationalMatrix,
    pub rhs: RationalMatrix,
    /// `phi[q][d]` = φ_q at dual vertex d.
    pub phi: Vec<Vec<Rational>>,
    pub cone: ConeGenerators,
    pub pairings: Vec<Vec<Rational>>,
    pub vertex_checks: Vec<VertexCheck>,
    pub flags: NefFlags,
}

impl NefPartitionData {
    /// `ψ_ℓ(x) = -min_{y ∈ Δ*_ℓ} ⟨x, y⟩` over the origin and the dual vertices of block ℓ (0-based).
    pub fn psi(&self, l: usize, x: &[Rational]) -> Rational {
        let min = self
            .duals
            .iter()
            .filter(|d| d.block == l + 1)
            .map(|d| d.vector.iter().zip(x).map(|(a, b)| a * b).sum::<Rational>())
            .fold(Rational::zero(), |acc, v| if v < acc { v } else { acc });
        -min
    }
}

/// Solves `D·P = R` for the dual vertices, D the block difference matrix of
/// the input and R the same data read from the transposed system in original
/// coordinates, with P taken in the coordinate section.
pub fn solve_dual_partition(spec: &CiSpec, tr: &TransposeResult) -> Result<NefPartitionData> {
    let n = spec.n;
    let weights = derive_weights(spec)?;
    let deltas = build_deltas(spec, &weights);
    let minkowski = minkowski_dim(&deltas);
    if !minkowski.passed {
        return Err(Error::Unsolvable(format!(
            "Minkowski sum has dimension {}, expected {}",
            minkowski.dim, minkowski.expected
        )));
    }
    let diff = spec.difference_matrix();
    let d = RationalMatrix::from_ints(&diff);

    // dual vertices of block ℓ are indexed by the variables of I^(ℓ)
    let mut order: Vec<(usize, usize)> = spec
        .blocks
        .iter()
        .enumerate()
        .flat_map(|(l, b)| b.index_set.iter().map(move |&i| (l, i - 1)))
        .collect();
    order.sort_unstable();
    let tdiff = tr.tspec.difference_matrix();
    let var_inv = tr.variable_map.inverse();
    let rhs_rows: Vec<Vec<i64>> = (0..n)
        .map(|r| order.iter().map(|&(_, c)| tdiff[tr.lambda.apply(c)][var_inv.apply(r)]).collect())
        .collect();
    let rhs = RationalMatrix::from_ints(&rhs_rows);

    let section = coordinate_section(&weights, n);
    let d_s = d.select_columns(&section);
    let x = solve_least_pivot(&d_s, &rhs).ok_or_else(|| Error::Unsolvable("inconsistent system".into()))?;
    if d_s.checked_mul(&x)? != rhs {
        return Err(Error::Unsolvable("inconsistent system".into()));
    }
    let mut p = RationalMatrix::zeros(n, n);
    for (row, &s) in section.iter().enumerate() {
        for c in 0..n {
            p = p.with_entry(s, c, x.get(row, c).clone());
        }
    }

    let duals: Vec<DualVertex> = order
        .iter()
        .enumerate()
        .map(|(t, &(l, c))| DualVertex { block: l + 1, variable: c + 1, vector: p.column(t) })
        .collect();
    let p_integral = duals.iter().all(|dv| has_integral_representative(&dv.vector, &weights));

    let phi: Vec<Vec<Rational>> =
        (0..spec.k).map(|q| duals.iter().map(|dv| support_phi(&deltas, q, &dv.vector)).collect()).collect();
    let phi_is_delta = phi.iter().enumerate().all(|(q, row)| {
        row.iter().zip(&duals).all(|(v, dv)| *v == if dv.block == q + 1 { Rational::one() } else { Rational::zero() })
    });

    let blocks = spec.monomial_blocks();
    let vertex_checks: Vec<VertexCheck> = duals
        .iter()
        .map(|dv| {
            let l = dv.block - 1;
            let pair = |q: usize| -> Vec<Rational> {
                diff.iter().zip(&blocks).filter(|(_, &b)| b == q).map(|(row, _)| dot_int(row, &dv.vector)).collect()
            };
            let own = pair(l);
            let minus_one = -Rational::one();
            let mut other_nonneg = true;
            let mut single = true;
            let j_q = (0..spec.k)
                .map(|q| {
                    if q == l {
                        return None;
                    }
                    let ps = pair(q);
                    other_nonneg &= ps.iter().all(|v| !v.is_negative());
                    let nz: Vec<usize> = (0..ps.len()).filter(|&j| !ps[j].is_zero()).collect();
                    single &= nz.len() <= 1;
                    (nz.len() == 1).then(|| nz[0] + 1)
                })
                .collect();
            VertexCheck {
                block: dv.block,
                variable: dv.variable,
                own_block_all_minus_one: own.iter().all(|v| *v == minus_one),
                own_block_at_least_minus_one: own.iter().all(|v| *v >= minus_one),
                own_pairings: own,
                other_blocks_nonnegative: other_nonneg,
                other_blocks_single_support: single,
                j_q,
            }
        })
        .collect();

    let cone = cone_generators(spec, &duals);
    let pairings = cone.pairings();
    let pairings_nonnegative = pairings.iter().flatten().all(|v| !v.is_negative());
    let all_ones = |w: &WeightSystem| w.diagonal().iter().all(|&g| g == 1);
    let flags = NefFlags {
        minkowski_dim_ok: minkowski.passed,
        p_integral,
        phi_is_delta,
        pairings_nonnegative,
        own_block_all_minus_one: vertex_checks.iter().all(|v| v.own_block_all_minus_one),
        own_block_at_least_minus_one: vertex_checks.iter().all(|v| v.own_block_at_least_minus_one),
        other_blocks_nonnegative: vertex_checks.iter().all(|v| v.other_blocks_nonnegative),
        other_blocks_single_support: vertex_checks.iter().all(|v| v.other_blocks_single_support),
        lambda_identity: tr.lambda.is_identity(),
        weights_identity: all_ones(&weights),
        transposed_weights_identity: all_ones(&tr.tweights),
    };
    Ok(NefPartitionData {
        deltas,
        minkowski,
        section: section.iter().map(|s| s + 1).collect(),
        duals,
        p,
        rhs,
        phi,
        cone,
        pairings,
        vertex_checks,
        flags,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MagicSquareBlock {
    /// 1-based block q.
    pub block: usize,
    /// Matching against the constant-row column of block q itself.
    pub literal: bool,
    /// Block whose constant-row column is matched under the correspondence.
    pub matched_block: usize,
    pub found: bool,
    /// 1-based σ(b) for the monomial rows b in order.
    pub witness: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MagicSquareReport {
    pub blocks: Vec<MagicSquareBlock>,
    pub satisfied: bool,
    pub literal_satisfied: bool,
}

/// A bijection σ with `p[b] = w[σ(b)]`, matching equal values in sorted order.
fn matching(p: &[Rational], w: &[Rational]) -> Option<Vec<usize>> {
    if p.len() != w.len() {
        return None;
    }
    let mut pi: Vec<usize> = (0..p.len()).collect();
    let mut wi: Vec<usize> = (0..w.len()).collect();
    pi.sort_by(|&a, &b| p[a].cmp(&p[b]));
    wi.sort_by(|&a, &b| w[a].cmp(&w[b]));
    let mut sigma = vec![0; p.len()];
    for (&a, &b) in pi.iter().zip(&wi) {
        if p[a] != w[b] {
            return None;
        }
        sigma[a] = b + 1;
    }
    Some(sigma)
}

/// For each block q, looks for σ with `p_q^b = w_{σ(b)}` where p_q^b is the
/// z_q coefficient of form b over the monomial rows and w the i-coefficients
/// of the constant-row form of block `correspondence(q)` (q itself when none is given).
pub fn magic_square_check(cm: &CayleyMatrix, forms: &[LinearForm], correspondence: Option<&PermutationMap>) -> MagicSquareReport {
    let rows = cm.monomial_rows();
    let blocks: Vec<MagicSquareBlock> = (0..cm.k)
        .map(|q| {
            let p: Vec<Rational> = rows.iter().map(|&b| forms[b].z[q].clone()).collect();
            let w_of = |nu: usize| forms[cm.constant_row(nu)].i.clone();
            let literal = matching(&p, &w_of(q)).is_some();
            let target = correspondence.map_or(q, |c| c.apply(q));
            let witness = matching(&p, &w_of(target));
            MagicSquareBlock { block: q + 1, literal, matched_block: target + 1, found: witness.is_some(), witness }
        })
        .collect();
    MagicSquareReport {
        satisfied: blocks.iter().all(|b| b.found),
        literal_satisfied: blocks.iter().all(|b| b.literal),
        blocks,
    }
}
