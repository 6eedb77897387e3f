//! Horn-type operators annihilating the period integrals, their one-variable
//! restrictions, and the monodromy data read off from them.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::ci_model::{charges, derive_weights, ChargeMatrix, CiSpec, WeightSystem};
use crate::error::{Error, Result};
use crate::mellin::{compute_delta, LinearForm};
use crate::poincare::CyclotomicRatio;
use crate::rational_linalg::Rational;
use crate::transposition::TransposeResult;

pub const EXPANSION_DEGREE_CAP: usize = 64;

/// Indices (1-based) of the forms by the sign of their z_q coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexPartition {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
    pub zero: Vec<usize>,
}

pub fn index_partition(forms: &[LinearForm], q: usize) -> IndexPartition {
    let mut p = IndexPartition { plus: Vec::new(), minus: Vec::new(), zero: Vec::new() };
    for (a, f) in forms.iter().enumerate() {
        let c = &f.z[q];
        if c.is_positive() {
            p.plus.push(a + 1);
        } else if c.is_negative() {
            p.minus.push(a + 1);
        } else {
            p.zero.push(a + 1);
        }
    }
    p
}

/// One factor `(form + shift)`; the z slots of `coeffs` hold the ϑ coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HornFactor {
    pub coeffs: LinearForm,
    pub shift: i64,
}

impl HornFactor {
    fn theta_only(theta: Vec<Rational>, shift: i64) -> Self {
        let k = theta.len();
        let mut coeffs = LinearForm::zero(0, k);
        coeffs.z = theta;
        HornFactor { coeffs, shift }
    }
}

impl fmt::Display for HornFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut form = self.coeffs.clone();
        form.constant += Rational::from(self.shift);
        let k = form.z.len();
        let text = form.to_string();
        let text = (0..k).rev().fold(text, |t, l| {
            let var = if k == 1 { "θ".to_string() } else { format!("θ{}", l + 1) };
            t.replace(&format!("z{}", l + 1), &var)
        });
        write!(f, "({text})")
    }
}

/// `P - s^delta_power · Q` in the ϑ variables of `variable`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HornOperator {
    /// 1-based.
    pub variable: usize,
    pub p_factors: Vec<HornFactor>,
    pub q_factors: Vec<HornFactor>,
    pub delta_power: u64,
}

pub type Polynomial = BTreeMap<Vec<u32>, Rational>;

fn expand(factors: &[HornFactor], k: usize) -> Result<Polynomial> {
    if factors.len() > EXPANSION_DEGREE_CAP {
        return Err(Error::DegreeCapExceeded { cap: EXPANSION_DEGREE_CAP });
    }
    let mut poly: Polynomial = BTreeMap::new();
    poly.insert(vec![0; k], Rational::one());
    for factor in factors {
        let mut next: Polynomial = BTreeMap::new();
        let constant = &factor.coeffs.constant + &Rational::from(factor.shift);
        for (e, c) in &poly {
            let mut add = |exp: Vec<u32>, v: Rational| {
                let entry = next.entry(exp).or_insert_with(Rational::zero);
                *entry += v;
            };
            if !constant.is_zero() {
                add(e.clone(), c * &constant);
            }
            for (l, t) in factor.coeffs.z.iter().enumerate() {
                if !t.is_zero() {
                    let mut e2 = e.clone();
                    e2[l] += 1;
                    add(e2, c * t);
                }
            }
        }
        next.retain(|_, v| !v.is_zero());
        poly = next;
    }
    Ok(poly)
}

impl HornOperator {
    pub fn degree_p(&self) -> usize {
        self.p_factors.len()
    }

    pub fn degree_q(&self) -> usize {
        self.q_factors.len()
    }

    fn theta_count(&self) -> usize {
        self.p_factors.iter().chain(&self.q_factors).next().map_or(0, |f| f.coeffs.z.len())
    }

    /// P and Q expanded as polynomials in ϑ at i = 0, ζ = 0.
    pub fn expand(&self) -> Result<(Polynomial, Polynomial)> {
        let k = self.theta_count();
        Ok((expand(&self.p_factors, k)?, expand(&self.q_factors, k)?))
    }
}

fn product_text(factors: &[HornFactor]) -> String {
    if factors.is_empty() {
        return "1".into();
    }
    let mut out = String::new();
    let mut iter = factors.iter().map(ToString::to_string).peekable();
    while let Some(f) = iter.next() {
        let mut count = 1;
        while iter.peek() == Some(&f) {
            iter.next();
            count += 1;
        }
        out.push_str(&f);
        if count > 1 {
            out.push_str(&format!("^{count}"));
        }
    }
    out
}

impl fmt::Display for HornOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let power = if self.delta_power == 1 { String::new() } else { format!("^{}", self.delta_power) };
        write!(
            f,
            "{} - s{}{}·{}",
            product_text(&self.p_factors),
            self.variable,
            power,
            product_text(&self.q_factors)
        )
    }
}

/// The operators `P_q - s_q^Δ Q_q` with factors `ℒ_a(i, -ϑ, ζ) + j`.
///
/// The exponents B are the Δ-scaled integer z-coefficients of the forms.
pub fn horn_operators(spec: &CiSpec, forms: &[LinearForm]) -> Result<Vec<HornOperator>> {
    let delta = compute_delta(forms);
    let delta_r = Rational::from_int(delta.clone());
    let delta_power = delta.to_u64().ok_or_else(|| Error::SpecInvalid("Δ out of range".into()))?;
    (0..spec.k)
        .map(|q| {
            let part = index_partition(forms, q);
            if part.plus.is_empty() || part.minus.is_empty() {
                return Err(Error::SpecInvalid(format!("no forms of one sign for s{}", q + 1)));
            }
            let factors = |indices: &[usize], sign: i64| -> Vec<HornFactor> {
                let mut out = Vec::new();
                for &a in indices {
                    let f = &forms[a - 1];
                    let b = (&f.z[q] * &delta_r * Rational::from(sign)).to_i64().expect("integral after Δ");
                    let mut coeffs = f.clone();
                    coeffs.z = f.z.iter().map(|c| -c.clone()).collect();
                    out.extend((0..b).map(|j| HornFactor { coeffs: coeffs.clone(), shift: j }));
                }
                out
            };
            Ok(HornOperator {
                variable: q + 1,
                p_factors: factors(&part.plus, 1),
                q_factors: factors(&part.minus, -1),
                delta_power,
            })
        })
        .collect()
}

/// The one-variable operator for `t_ν` built from the transposed weights.
pub fn restricted_operator(tweights: &WeightSystem, tcharges: &ChargeMatrix, nu: usize) -> HornOperator {
    let k = tcharges.k();
    let mut p_factors = Vec::new();
    for g in tweights.group_weights(nu) {
        let g = g as i64;
        p_factors.extend((0..g).map(|r| HornFactor::theta_only(vec![Rational::from(-g)], r)));
    }
    let mut q_factors = Vec::new();
    for q in 0..k {
        let c = tcharges.get(q, nu) as i64;
        q_factors.extend((0..c).map(|r| HornFactor::theta_only(vec![Rational::from(c)], -r)));
    }
    HornOperator { variable: nu + 1, p_factors, q_factors, delta_power: 1 }
}

/// The multi-variable operator for `t_ν` before restriction.
pub fn full_operator(tweights: &WeightSystem, tcharges: &ChargeMatrix, nu: usize) -> HornOperator {
    let k = tcharges.k();
    let mut p_factors = Vec::new();
    for g in tweights.group_weights(nu) {
        let g = g as i64;
        let mut theta = vec![Rational::zero(); k];
        theta[nu] = Rational::from(-g);
        p_factors.extend((0..g).map(|r| HornFactor::theta_only(theta.clone(), r)));
    }
    let mut q_factors = Vec::new();
    for q in 0..k {
        let theta: Vec<Rational> = (0..k).map(|mu| Rational::from(tcharges.get(q, mu))).collect();
        let c = tcharges.get(q, nu) as i64;
        q_factors.extend((0..c).map(|r| HornFactor::theta_only(theta.clone(), -r)));
    }
    HornOperator { variable: nu + 1, p_factors, q_factors, delta_power: 1 }
}

fn poly_from_factors(exps: &[u64]) -> Vec<i64> {
    let mut p = vec![1i64];
    for &d in exps {
        let d = d as usize;
        p.resize(p.len() + d, 0);
        for i in (d..p.len()).rev() {
            p[i] -= p[i - d];
        }
    }
    p
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharPolyPair {
    /// 1-based.
    pub block: usize,
    pub chi: u64,
    /// Coefficients of λ^0, λ^1, … .
    pub at_zero: Vec<i64>,
    pub at_infinity: Vec<i64>,
    pub at_zero_factored: String,
    pub at_infinity_factored: String,
}

/// Characteristic polynomials of the local monodromies of the restricted operator.
pub fn char_polys(tweights: &WeightSystem, tcharges: &ChargeMatrix, q: usize) -> CharPolyPair {
    let zero_exps = tweights.group_weights(q);
    let inf_exps: Vec<u64> = (0..tcharges.k()).map(|nu| tcharges.get(nu, q)).filter(|&c| c > 0).collect();
    let factored = |exps: &[u64]| CyclotomicRatio::new(1, exps.iter().map(|&d| (1, d)).collect(), vec![]).to_string();
    CharPolyPair {
        block: q + 1,
        chi: zero_exps.iter().sum(),
        at_zero: poly_from_factors(&zero_exps),
        at_infinity: poly_from_factors(&inf_exps),
        at_zero_factored: factored(&zero_exps),
        at_infinity_factored: factored(&inf_exps),
    }
}

/// `∏_q ∏_ν (1-λ_q^{^TQ^(q)_ν}) / ∏_q ∏_j (1-λ_q^{^Tg^(q)_j})`.
pub fn m_function(tweights: &WeightSystem, tcharges: &ChargeMatrix) -> CyclotomicRatio {
    let k = tcharges.k();
    let mut num = Vec::new();
    let mut den = Vec::new();
    for q in 0..k {
        num.extend((0..k).map(|nu| (q + 1, tcharges.get(nu, q))));
        den.extend(tweights.group_weights(q).into_iter().map(|g| (q + 1, g)));
    }
    CyclotomicRatio::new(k, num, den)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryReport {
    /// Cyclic orders LCM(Q^(q)_1, …, Q^(q)_k) of the input.
    pub q_bar: Vec<u64>,
    /// The same for the transposed spec.
    pub tq_bar: Vec<u64>,
    /// ∏ Z_{Q̄^(q)}: quantum symmetry of X, geometric symmetry of Y.
    pub quantum_x: String,
    /// ∏ Z_{^TQ̄^(q)}: quantum symmetry of Y, geometric symmetry of X.
    pub quantum_y: String,
    /// Whether every transposed weight of group q divides ^TQ̄^(q).
    pub weights_divide: Vec<bool>,
}

fn group_text(orders: &[u64]) -> String {
    orders.iter().map(|o| format!("Z_{o}")).collect::<Vec<_>>().join(" x ")
}

pub fn symmetry_report(spec: &CiSpec, tr: &TransposeResult) -> Result<SymmetryReport> {
    let w = derive_weights(spec)?;
    let q_bar = charges(spec, &w).q_bar;
    let tq_bar = charges(&tr.tspec, &tr.tweights).q_bar;
    let weights_divide = (0..spec.k)
        .map(|q| tr.tweights.group_weights(q).iter().all(|g| tq_bar[q].is_multiple_of(*g)))
        .collect();
    Ok(SymmetryReport {
        quantum_x: group_text(&q_bar),
        quantum_y: group_text(&tq_bar),
        q_bar,
        tq_bar,
        weights_divide,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ci_model::build_cayley;
    use crate::ci_model::fixtures::*;
    use crate::mellin::solve_xi;
    use crate::poincare::ratio_equal;
    use crate::transposition::transpose_spec;

    fn forms(spec: &CiSpec) -> Vec<LinearForm> {
        solve_xi(&build_cayley(spec).unwrap()).unwrap()
    }

    fn tdata(spec: &CiSpec) -> (WeightSystem, ChargeMatrix) {
        let tr = transpose_spec(spec).unwrap();
        let tc = charges(&tr.tspec, &tr.tweights);
        (tr.tweights, tc)
    }

    #[test]
    fn quadric_partition_and_operator() {
        let spec = quadric();
        let f = forms(&spec);
        let part = index_partition(&f, 0);
        assert_eq!(part.plus, vec![3, 4]);
        assert_eq!(part.minus, vec![1, 2, 5]);
        assert!(part.zero.is_empty());
        let ops = horn_operators(&spec, &f).unwrap();
        // Δ = 4: B = (-2, -2, 4, 4, -4)
        assert_eq!(ops[0].degree_p(), 8);
        assert_eq!(ops[0].degree_q(), 8);
        assert_eq!(ops[0].delta_power, 4);
    }

    #[test]
    fn quadric_operator_expansion_by_hand() {
        let spec = quadric();
        let ops = horn_operators(&spec, &forms(&spec)).unwrap();
        let (p, _) = ops[0].expand().unwrap();
        // P = ∏_{j<4} (-θ + j)^2 at i = ζ = 0
        let one = |c: i64| Rational::from(c);
        assert_eq!(p.get(&vec![8]), Some(&one(1)));
        assert_eq!(p.get(&vec![0]), None);
        assert_eq!(p.get(&vec![2]), Some(&one(36)));
        assert_eq!(p.get(&vec![7]), Some(&one(-12)));
    }

    #[test]
    fn degrees_balance_on_examples() {
        for spec in [schimmrigk(), degree21()] {
            for op in horn_operators(&spec, &forms(&spec)).unwrap() {
                assert_eq!(op.degree_p(), op.degree_q());
            }
        }
    }

    #[test]
    fn expansion_cap() {
        let spec = degree21();
        let ops = horn_operators(&spec, &forms(&spec)).unwrap();
        assert_eq!(ops[0].expand(), Err(Error::DegreeCapExceeded { cap: EXPANSION_DEGREE_CAP }));
    }

    #[test]
    fn restricted_operator_degrees() {
        let (tw, tc) = tdata(&degree21());
        let op = restricted_operator(&tw, &tc, 0);
        assert_eq!((op.degree_p(), op.degree_q()), (7, 7));
        let (tw, tc) = tdata(&quadric());
        let op = restricted_operator(&tw, &tc, 0);
        assert_eq!((op.degree_p(), op.degree_q()), (2, 2));
        assert_eq!(op.to_string(), "(-θ)^2 - s1·(2*θ)(2*θ - 1)");
        assert_eq!(full_operator(&tw, &tc, 0), op);
    }

    #[test]
    fn degree21_char_polys() {
        let (tw, tc) = tdata(&degree21());
        let cp = char_polys(&tw, &tc, 0);
        assert_eq!(cp.chi, 7);
        assert_eq!(cp.at_infinity_factored, "(1-λ^7)");
        assert_eq!(cp.at_zero_factored, "(1-λ)^3 (1-λ^2)^2");
        assert_eq!(cp.at_zero.len() - 1, 7);
        assert_eq!(cp.at_infinity, vec![1, 0, 0, 0, 0, 0, 0, -1]);
    }

    #[test]
    fn quadric_char_polys_and_m_function() {
        let (tw, tc) = tdata(&quadric());
        let cp = char_polys(&tw, &tc, 0);
        assert_eq!(cp.at_zero, vec![1, -2, 1]);
        assert_eq!(cp.at_infinity, vec![1, 0, -1]);
        let m = m_function(&tw, &tc);
        assert_eq!(m.to_string(), "(1-λ^2)/(1-λ)^2");
    }

    #[test]
    fn schimmrigk_zero_charge_skipped() {
        let (tw, tc) = tdata(&schimmrigk());
        for q in 0..2 {
            let cp = char_polys(&tw, &tc, q);
            assert_eq!(cp.at_zero.len(), cp.at_infinity.len());
            assert_eq!(cp.at_zero.len() as u64 - 1, cp.chi);
        }
    }

    #[test]
    fn m_function_matches_char_polys() {
        for spec in [quadric(), schimmrigk(), degree21()] {
            let (tw, tc) = tdata(&spec);
            let m = m_function(&tw, &tc);
            let k = spec.k;
            let mut num = Vec::new();
            let mut den = Vec::new();
            for q in 0..k {
                num.extend((0..k).map(|nu| (q + 1, tc.get(nu, q))));
                den.extend(tw.group_weights(q).into_iter().map(|g| (q + 1, g)));
            }
            assert!(ratio_equal(&m, &CyclotomicRatio::new(k, num, den)));
        }
    }

    #[test]
    fn symmetry_orders() {
        let spec = degree21();
        let tr = transpose_spec(&spec).unwrap();
        let rep = symmetry_report(&spec, &tr).unwrap();
        assert_eq!(rep.q_bar, vec![21]);
        assert_eq!(rep.tq_bar, vec![7]);
        // 2 does not divide 7
        assert_eq!(rep.weights_divide, vec![false]);
        let q = quadric();
        let rep = symmetry_report(&q, &transpose_spec(&q).unwrap()).unwrap();
        assert_eq!((rep.q_bar, rep.tq_bar), (vec![2], vec![2]));
        let s = schimmrigk();
        let rep = symmetry_report(&s, &transpose_spec(&s).unwrap()).unwrap();
        assert_eq!(rep.q_bar, vec![3, 3]);
    }
}
