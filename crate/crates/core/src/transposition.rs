//! The transposed system read off the transposed Cayley matrix.
//!
//! Transposing the Cayley matrix turns the variables of the original
//! system into monomials and its monomials into variables. Block `q` of
//! the transposed system is built from original block `ν(q)`: its
//! monomials are the columns of the original monomial matrix at the variables
//! of `I^(ν(q))`, and its index set consists of the variables that came from
//! the monomials of block `ν(q)`. The new variables are grouped into weight
//! groups by the kernel of the transposed difference matrix.

use serde::{Deserialize, Serialize};

use crate::ci_model::{derive_weights, Block, CiSpec, WeightSystem};
use crate::error::{Error, Result};
use crate::rational_linalg::{PermutationMap, Rational, RationalMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionFlags {
    /// Some block correspondence matches monomial counts with index-set sizes.
    pub block_sizes_match: bool,
    pub nu_involution: bool,
    /// λ carries the index-set and monomial matrices onto their transposed counterparts.
    pub lambda_identities: bool,
    pub rho_exists: bool,
    pub t_rho_exists: bool,
    pub g_rho_symmetric: Option<bool>,
    pub tg_t_rho_symmetric: Option<bool>,
    /// The transposed system coincides with the original.
    pub self_transposed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransposeResult {
    pub tspec: CiSpec,
    pub tweights: WeightSystem,
    /// Transposed block q is built from original block nu(q).
    pub nu: PermutationMap,
    pub nu_star: RationalMatrix,
    /// Original variable i becomes transposed monomial lambda(i).
    pub lambda: PermutationMap,
    /// Transposed variable p comes from original monomial row variable_map(p).
    pub variable_map: PermutationMap,
    pub rho: Option<PermutationMap>,
    pub t_rho: Option<PermutationMap>,
    pub condition_flags: ConditionFlags,
    /// Other block correspondences that would also have produced a valid shape.
    pub alternative_nus: Vec<PermutationMap>,
}

impl TransposeResult {
    /// Transposed weight group holding the variable that came from original monomial row `r`.
    pub fn group_of_row(&self, r: usize) -> usize {
        let p = self.variable_map.inverse().apply(r);
        self.tspec.group_of(p).expect("every position lies in a group")
    }
}

fn proportional(a: &[Rational], b: &[Rational]) -> bool {
    (0..a.len()).all(|i| (0..a.len()).all(|j| &a[i] * &b[j] == &a[j] * &b[i]))
}

struct Candidate {
    tspec: CiSpec,
    tweights: WeightSystem,
    order: Vec<usize>,
}

/// Builds the transposed blocks for a fixed correspondence `pi`, or explains why not.
fn try_correspondence(spec: &CiSpec, pi: &[usize]) -> std::result::Result<Candidate, String> {
    let n = spec.n;
    let k = spec.k;
    let rows = spec.monomials();
    let row_block = spec.monomial_blocks();

    // new blocks in original-row coordinates
    let mut new_blocks: Vec<(Vec<Vec<u32>>, Vec<usize>)> = Vec::with_capacity(k);
    for &mu in pi.iter().take(k) {
        let mut vars = spec.blocks[mu].index_set.clone();
        vars.sort_unstable();
        let monomials = vars
            .iter()
            .map(|&i| rows.iter().map(|r| u32::try_from(r[i - 1]).unwrap_or(0)).collect())
            .collect();
        let index_rows = (0..n).filter(|&r| row_block[r] == mu).collect();
        new_blocks.push((monomials, index_rows));
    }

    let diff_rows: Vec<Vec<Rational>> = new_blocks
        .iter()
        .flat_map(|(mons, idx)| {
            mons.iter().map(move |m| {
                (0..n)
                    .map(|r| Rational::from(i64::from(m[r]) - i64::from(idx.contains(&r))))
                    .collect::<Vec<_>>()
            })
        })
        .collect();
    let diff = RationalMatrix::from_rows(diff_rows).map_err(|e| e.to_string())?;
    let kernel = diff.nullspace();
    if kernel.len() != k {
        return Err(format!("transposed weight kernel has dimension {} instead of {k}", kernel.len()));
    }

    let basis_rows: Vec<Vec<Rational>> = (0..n).map(|r| kernel.iter().map(|v| v[r].clone()).collect()).collect();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (r, row) in basis_rows.iter().enumerate() {
        if row.iter().all(Rational::is_zero) {
            return Err(format!("original monomial row {} gets weight zero", r + 1));
        }
        match classes.iter_mut().find(|c| proportional(&basis_rows[c[0]], row)) {
            Some(c) => c.push(r),
            None => classes.push(vec![r]),
        }
    }
    if classes.len() != k {
        return Err(format!("{} weight groups found instead of {k}", classes.len()));
    }

    let mut used = vec![false; k];
    let mut order = Vec::with_capacity(n);
    assign_classes(spec, &new_blocks, &classes, 0, &mut used, &mut order)
        .ok_or_else(|| "no grouping of transposed variables has positive weights".to_string())
}

fn assign_classes(
    spec: &CiSpec,
    new_blocks: &[(Vec<Vec<u32>>, Vec<usize>)],
    classes: &[Vec<usize>],
    q: usize,
    used: &mut Vec<bool>,
    order: &mut Vec<usize>,
) -> Option<Candidate> {
    if q == spec.k {
        return build_candidate(spec, new_blocks, order);
    }
    let mut candidates: Vec<usize> =
        (0..classes.len()).filter(|&c| !used[c] && classes[c].len() == spec.tau(q)).collect();
    candidates.sort_by_key(|&c| classes[c][0]);
    for c in candidates {
        used[c] = true;
        let len = order.len();
        order.extend_from_slice(&classes[c]);
        if let Some(found) = assign_classes(spec, new_blocks, classes, q + 1, used, order) {
            return Some(found);
        }
        order.truncate(len);
        used[c] = false;
    }
    None
}

fn build_candidate(spec: &CiSpec, new_blocks: &[(Vec<Vec<u32>>, Vec<usize>)], order: &[usize]) -> Option<Candidate> {
    let n = spec.n;
    let mut pos = vec![0; n];
    for (p, &r) in order.iter().enumerate() {
        pos[r] = p;
    }
    let blocks = new_blocks
        .iter()
        .map(|(mons, idx)| {
            let exponents = mons.iter().map(|m| (0..n).map(|p| m[order[p]]).collect()).collect();
            let mut index_set: Vec<usize> = idx.iter().map(|&r| pos[r] + 1).collect();
            index_set.sort_unstable();
            Block { exponents, index_set }
        })
        .collect();
    let tspec = CiSpec { n, k: spec.k, blocks, weights: None };
    let tweights = derive_weights(&tspec).ok()?;
    Some(Candidate { tspec, tweights, order: order.to_vec() })
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(k - 1) {
        for slot in 0..k {
            let mut p: Vec<usize> = rest.clone();
            p.insert(slot, k - 1);
            out.push(p);
        }
    }
    out.sort();
    out
}

/// Searches for ρ on `spec`: position i of group q maps to a variable of I^(q).
///
/// First looks for an involution preserving the weights, which makes G·ρ
/// symmetric; otherwise returns the first bijection in lexicographic order.
pub fn find_rho(spec: &CiSpec, w: &WeightSystem) -> Option<(PermutationMap, bool)> {
    let n = spec.n;
    if (0..spec.k).any(|q| spec.tau(q) != spec.tilde_tau(q)) {
        return None;
    }
    let group: Vec<usize> = (0..n).map(|i| spec.group_of(i).unwrap_or(usize::MAX)).collect();
    let mut target_block = vec![usize::MAX; n];
    for (q, b) in spec.blocks.iter().enumerate() {
        for &i in &b.index_set {
            target_block[i - 1] = q;
        }
    }
    let diag = w.diagonal();
    let allowed = |i: usize, j: usize| target_block[j] == group[i];

    let mut sigma = vec![usize::MAX; n];
    if symmetric_search(0, &mut sigma, &allowed, &diag) {
        return PermutationMap::new(sigma).ok().map(|p| (p, true));
    }
    let mut taken = vec![false; n];
    let mut images = Vec::with_capacity(n);
    for i in 0..n {
        let j = (0..n).find(|&j| !taken[j] && allowed(i, j))?;
        taken[j] = true;
        images.push(j);
    }
    PermutationMap::new(images).ok().map(|p| (p, false))
}

fn symmetric_search(i: usize, sigma: &mut Vec<usize>, allowed: &dyn Fn(usize, usize) -> bool, diag: &[u64]) -> bool {
    let n = sigma.len();
    if i == n {
        return true;
    }
    if sigma[i] != usize::MAX {
        return symmetric_search(i + 1, sigma, allowed, diag);
    }
    for j in i..n {
        if sigma[j] != usize::MAX || diag[i] != diag[j] || !allowed(i, j) || !allowed(j, i) {
            continue;
        }
        sigma[i] = j;
        sigma[j] = i;
        if symmetric_search(i + 1, sigma, allowed, diag) {
            return true;
        }
        sigma[i] = usize::MAX;
        sigma[j] = usize::MAX;
    }
    false
}

/// G·ρ is symmetric exactly when ρ is an involution preserving the diagonal weights.
pub fn g_rho_symmetric(w: &WeightSystem, rho: &PermutationMap) -> bool {
    let diag = w.diagonal();
    let g = RationalMatrix::from_rows(
        (0..diag.len())
            .map(|i| (0..diag.len()).map(|j| if i == j { Rational::from(diag[i]) } else { Rational::zero() }).collect())
            .collect(),
    )
    .expect("square");
    // row i of ρ has its unit at column ρ(i)
    let rho_rows = rho.to_matrix().transpose();
    (&g * &rho_rows).is_symmetric()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryFlags {
    pub rho: PermutationMap,
    pub t_rho: PermutationMap,
    pub g_rho_symmetric: bool,
    pub tg_t_rho_symmetric: bool,
}

pub fn check_symmetry_conditions(spec: &CiSpec, tr: &TransposeResult) -> Result<SymmetryFlags> {
    let w = derive_weights(spec)?;
    let (rho, _) = find_rho(spec, &w).ok_or(Error::NoRho { side: "original" })?;
    let (t_rho, _) = find_rho(&tr.tspec, &tr.tweights).ok_or(Error::NoRho { side: "transposed" })?;
    Ok(SymmetryFlags {
        g_rho_symmetric: g_rho_symmetric(&w, &rho),
        tg_t_rho_symmetric: g_rho_symmetric(&tr.tweights, &t_rho),
        rho,
        t_rho,
    })
}

/// Index-set incidence: entry (i, j) is 1 when variable i lies in I^(j).
fn index_incidence(spec: &CiSpec) -> RationalMatrix {
    let rows = (0..spec.n)
        .map(|i| {
            (0..spec.k)
                .map(|j| if spec.blocks[j].index_set.contains(&(i + 1)) { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    RationalMatrix::from_rows(rows).expect("rectangular")
}

fn lambda_identities(spec: &CiSpec, tspec: &CiSpec, nu: &PermutationMap, lambda: &PermutationMap, var_map: &PermutationMap) -> bool {
    let n = spec.n;
    let lam = lambda.to_matrix();
    // transposed block incidence, columns permuted by ν
    let t_rows = (0..n)
        .map(|p| {
            let block = tspec.monomial_blocks()[p];
            (0..spec.k).map(|j| if block == nu.apply(j) { Rational::one() } else { Rational::zero() }).collect()
        })
        .collect();
    let t_incidence = RationalMatrix::from_rows(t_rows).expect("rectangular");
    let first = &lam * &index_incidence(spec) == t_incidence;

    let l_lambda = RationalMatrix::from_ints(&spec.monomials());
    let pos = var_map.inverse();
    let t_monomials = tspec.monomials();
    let aligned_rows: Vec<Vec<Rational>> = t_monomials
        .iter()
        .map(|m| (0..n).map(|r| Rational::from(m[pos.apply(r)])).collect())
        .collect();
    let aligned = RationalMatrix::from_rows(aligned_rows).expect("rectangular");
    let second = &lam * &l_lambda.transpose() == aligned;
    first && second
}

/// Builds the canonical transposed system and its permutation data.
pub fn transpose_spec(spec: &CiSpec) -> Result<TransposeResult> {
    spec.check_structure()?;
    let k = spec.k;
    let n = spec.n;
    let shape_ok: Vec<Vec<usize>> = permutations(k)
        .into_iter()
        .filter(|pi| (0..k).all(|q| spec.tilde_tau(pi[q]) == spec.tau(q)))
        .collect();
    if shape_ok.is_empty() {
        return Err(Error::NoValidShape("no block correspondence matches monomial counts with index-set sizes".into()));
    }
    let involutive: Vec<&Vec<usize>> = shape_ok.iter().filter(|pi| (0..k).all(|q| pi[pi[q]] == q)).collect();
    if involutive.is_empty() {
        return Err(Error::NoInvolutiveNu);
    }

    let w = derive_weights(spec)?;
    let mut found: Option<(Vec<usize>, Candidate)> = None;
    let mut alternatives = Vec::new();
    let mut last_reason = String::new();
    for pi in involutive {
        match try_correspondence(spec, pi) {
            Ok(c) if found.is_none() => found = Some((pi.clone(), c)),
            Ok(_) => alternatives.push(PermutationMap::new(pi.clone())?),
            Err(reason) => last_reason = reason,
        }
    }
    let (pi, cand) = found.ok_or(Error::NoValidShape(last_reason))?;

    let nu = PermutationMap::new(pi.clone())?;
    let variable_map = PermutationMap::new(cand.order.clone())?;

    // λ: original variable i -> index of its transposed monomial
    let mut lambda_images = vec![0; n];
    let mut offset = 0;
    for &mu in &pi {
        let mut vars = spec.blocks[mu].index_set.clone();
        vars.sort_unstable();
        for (slot, &i) in vars.iter().enumerate() {
            lambda_images[i - 1] = offset + slot;
        }
        offset += vars.len();
    }
    let lambda = PermutationMap::new(lambda_images)?;

    let rho = find_rho(spec, &w);
    let t_rho = find_rho(&cand.tspec, &cand.tweights);
    let mut stripped = spec.clone();
    stripped.weights = None;
    let condition_flags = ConditionFlags {
        block_sizes_match: true,
        nu_involution: nu.is_involution(),
        lambda_identities: lambda_identities(spec, &cand.tspec, &nu, &lambda, &variable_map),
        rho_exists: rho.is_some(),
        t_rho_exists: t_rho.is_some(),
        g_rho_symmetric: rho.as_ref().map(|(r, _)| g_rho_symmetric(&w, r)),
        tg_t_rho_symmetric: t_rho.as_ref().map(|(r, _)| g_rho_symmetric(&cand.tweights, r)),
        self_transposed: cand.tspec == stripped,
    };
    Ok(TransposeResult {
        nu_star: nu.to_matrix(),
        tspec: cand.tspec,
        tweights: cand.tweights,
        nu,
        lambda,
        variable_map,
        rho: rho.map(|(r, _)| r),
        t_rho: t_rho.map(|(r, _)| r),
        condition_flags,
        alternative_nus: alternatives,
    })
}

/// True when transposing twice gives back `spec` up to the recorded permutations.
pub fn check_involution(spec: &CiSpec) -> Result<bool> {
    let tr1 = transpose_spec(spec)?;
    let tr2 = transpose_spec(&tr1.tspec)?;
    Ok(double_transpose_matches(spec, &tr1, &tr2))
}

pub fn double_transpose_matches(spec: &CiSpec, tr1: &TransposeResult, tr2: &TransposeResult) -> bool {
    let n = spec.n;
    let lambda1_inv = tr1.lambda.inverse();
    let lambda2_inv = tr2.lambda.inverse();
    // twice-transposed variable -> original variable
    let var_to_orig: Vec<usize> = (0..n).map(|p| lambda1_inv.apply(tr2.variable_map.apply(p))).collect();
    // twice-transposed monomial -> original monomial row
    let mon_to_orig: Vec<usize> = (0..n).map(|m| tr1.variable_map.apply(lambda2_inv.apply(m))).collect();

    let orig_rows = spec.monomials();
    let orig_blocks = spec.monomial_blocks();
    let twice = &tr2.tspec;
    let twice_rows = twice.monomials();
    let twice_blocks = twice.monomial_blocks();

    let mut block_map = vec![usize::MAX; spec.k];
    for m in 0..n {
        let r = mon_to_orig[m];
        let exps_match = (0..n).all(|p| twice_rows[m][p] == orig_rows[r][var_to_orig[p]]);
        if !exps_match {
            return false;
        }
        let (b2, b0) = (twice_blocks[m], orig_blocks[r]);
        if block_map[b2] == usize::MAX {
            block_map[b2] = b0;
        } else if block_map[b2] != b0 {
            return false;
        }
    }
    (0..spec.k).all(|q| {
        let mut mapped: Vec<usize> = twice.blocks[q].index_set.iter().map(|&p| var_to_orig[p - 1] + 1).collect();
        mapped.sort_unstable();
        let mut orig = spec.blocks[block_map[q]].index_set.clone();
        orig.sort_unstable();
        mapped == orig
    })
}
