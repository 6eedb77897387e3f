//! Linear forms from the inverse Cayley matrix and the Gamma-product form of
//! the Mellin transform of the period integral.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::ci_model::{build_cayley, charges, CayleyMatrix, CiSpec, RowKind, RowLabel, WeightSystem};
use crate::error::{Error, Result};
use crate::rational_linalg::{primitive_integer_vector, Rational};
use crate::transposition::{ConditionFlags, TransposeResult};

/// Affine form `Σ i_j·(i_j + 1) + Σ z_l·z_l + Σ zeta_m·(ζ_m + 1)` written with its
/// constant part collected: `Σ i_j·i_j + Σ z_l·z_l + Σ zeta_m·ζ_m + constant`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LinearForm {
    pub i: Vec<Rational>,
    pub z: Vec<Rational>,
    pub zeta: Vec<Rational>,
    pub constant: Rational,
}

impl LinearForm {
    pub fn zero(n: usize, k: usize) -> Self {
        LinearForm {
            i: vec![Rational::zero(); n],
            z: vec![Rational::zero(); k],
            zeta: vec![Rational::zero(); 2 * k],
            constant: Rational::zero(),
        }
    }

    pub fn z_var(n: usize, k: usize, l: usize) -> Self {
        let mut f = Self::zero(n, k);
        f.z[l] = Rational::one();
        f
    }

    pub fn one_minus_z(n: usize, k: usize, l: usize) -> Self {
        let mut f = Self::zero(n, k);
        f.z[l] = -Rational::one();
        f.constant = Rational::one();
        f
    }

    pub fn n(&self) -> usize {
        self.i.len()
    }

    pub fn k(&self) -> usize {
        self.z.len()
    }

    /// Specialization at i = 0, ζ = 0.
    pub fn at_origin(&self) -> Self {
        LinearForm {
            i: vec![Rational::zero(); self.i.len()],
            z: self.z.clone(),
            zeta: vec![Rational::zero(); self.zeta.len()],
            constant: self.constant.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coefficients().all(Rational::is_zero)
    }

    fn coefficients(&self) -> impl Iterator<Item = &Rational> {
        self.i.iter().chain(&self.z).chain(&self.zeta)
    }

    pub fn add(&self, other: &LinearForm) -> LinearForm {
        let zip = |a: &[Rational], b: &[Rational]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        LinearForm {
            i: zip(&self.i, &other.i),
            z: zip(&self.z, &other.z),
            zeta: zip(&self.zeta, &other.zeta),
            constant: &self.constant + &other.constant,
        }
    }

    pub fn scale(&self, s: &Rational) -> LinearForm {
        let mul = |a: &[Rational]| a.iter().map(|x| x * s).collect();
        LinearForm { i: mul(&self.i), z: mul(&self.z), zeta: mul(&self.zeta), constant: &self.constant * s }
    }

    pub fn sub(&self, other: &LinearForm) -> LinearForm {
        self.add(&other.scale(&-Rational::one()))
    }

    /// `1 - self`.
    pub fn reflect(&self) -> LinearForm {
        let mut f = self.scale(&-Rational::one());
        f.constant += Rational::one();
        f
    }

    /// The value at i = 0, ζ = 0 and the given z.
    pub fn eval_z(&self, z: &[Rational]) -> Rational {
        self.z.iter().zip(z).map(|(a, b)| a * b).sum::<Rational>() + &self.constant
    }

    /// The scalar `s` with `self = s·other`, if one exists.
    pub fn ratio_to(&self, other: &LinearForm) -> Option<Rational> {
        let pairs = self.coefficients().chain(std::iter::once(&self.constant)).zip(
            other.coefficients().chain(std::iter::once(&other.constant)),
        );
        let mut ratio: Option<Rational> = None;
        for (a, b) in pairs {
            if b.is_zero() {
                if !a.is_zero() {
                    return None;
                }
                continue;
            }
            let r = a / b;
            match &ratio {
                Some(prev) if *prev != r => return None,
                Some(_) => {}
                None => ratio = Some(r),
            }
        }
        ratio
    }

    /// Integer numerators `(A, B, D)` over the common denominator `delta`.
    pub fn integer_numerators(&self, delta: &BigInt) -> (Vec<BigInt>, Vec<BigInt>, Vec<BigInt>) {
        let d = Rational::from_int(delta.clone());
        let scale = |v: &[Rational]| {
            v.iter().map(|x| (x * &d).to_integer().expect("delta clears all denominators")).collect()
        };
        (scale(&self.i), scale(&self.z), scale(&self.zeta))
    }
}

fn push_term(out: &mut String, coef: &Rational, var: &str) {
    if coef.is_zero() {
        return;
    }
    let neg = coef.is_negative();
    let abs = coef.abs();
    if out.is_empty() {
        if neg {
            out.push('-');
        }
    } else {
        out.push_str(if neg { " - " } else { " + " });
    }
    if var.is_empty() {
        out.push_str(&abs.to_string());
    } else if abs.is_one() {
        out.push_str(var);
    } else {
        out.push_str(&format!("{abs}*{var}"));
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        for (l, c) in self.z.iter().enumerate() {
            push_term(&mut s, c, &format!("z{}", l + 1));
        }
        for (j, c) in self.i.iter().enumerate() {
            push_term(&mut s, c, &format!("i{}", j + 1));
        }
        for (m, c) in self.zeta.iter().enumerate() {
            push_term(&mut s, c, &format!("zeta{}", m + 1));
        }
        push_term(&mut s, &self.constant, "");
        if s.is_empty() {
            s.push('0');
        }
        write!(f, "{s}")
    }
}

/// The forms ℒ_a: column a of L⁻¹ paired with (i+1, ζ+1, z).
pub fn solve_xi(cm: &CayleyMatrix) -> Result<Vec<LinearForm>> {
    let inv = cm.inverse()?;
    let (n, k) = (cm.n, cm.k);
    Ok((0..cm.size())
        .map(|a| {
            let i: Vec<Rational> = (0..n).map(|j| inv.get(j, a).clone()).collect();
            let zeta: Vec<Rational> = (0..2 * k).map(|m| inv.get(n + m, a).clone()).collect();
            let z = (0..k).map(|l| inv.get(n + 2 * k + l, a).clone()).collect();
            let constant = i.iter().chain(&zeta).sum();
            LinearForm { i, z, zeta, constant }
        })
        .collect())
}

/// Least Δ with Δ·ℒ_a integral for every form.
pub fn compute_delta(forms: &[LinearForm]) -> BigInt {
    forms.iter().flat_map(|f| f.coefficients()).fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FormType {
    /// Pure `z_ell`.
    A { ell: usize },
    /// `ζ_{2ell-1} + ζ_{2ell} - z_ell` plus i-terms.
    B { ell: usize },
    /// `ζ_{2l-1}` paired with `-z_l` for every l, no `ζ_{2l}`.
    C,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormClass {
    pub index: usize,
    pub row: RowLabel,
    #[serde(flatten)]
    pub form_type: FormType,
}

fn match_type(f: &LinearForm) -> Option<FormType> {
    let k = f.k();
    let unit = |v: &[Rational], l: usize, s: &Rational| v.iter().enumerate().all(|(m, x)| if m == l { x == s } else { x.is_zero() });
    let one = Rational::one();
    if f.i.iter().chain(&f.zeta).all(Rational::is_zero) && f.constant.is_zero() {
        if let Some(l) = (0..k).find(|&l| unit(&f.z, l, &one)) {
            return Some(FormType::A { ell: l + 1 });
        }
    }
    for l in 0..k {
        let zeta_ok = f.zeta.iter().enumerate().all(|(m, x)| if m / 2 == l { x.is_one() } else { x.is_zero() });
        if zeta_ok && unit(&f.z, l, &-one.clone()) {
            return Some(FormType::B { ell: l + 1 });
        }
    }
    let c_ok = (0..k).all(|l| f.zeta[2 * l] == -f.z[l].clone() && f.zeta[2 * l + 1].is_zero());
    (c_ok && !f.is_zero()).then_some(FormType::C)
}

/// Tags each form and checks the tag against the kind of its Cayley row.
pub fn classify_forms(cm: &CayleyMatrix, forms: &[LinearForm]) -> Result<Vec<FormClass>> {
    forms
        .iter()
        .enumerate()
        .map(|(a, f)| {
            let row = cm.row_labels[a];
            let failure = |reason: String| Error::ClassificationFailure { index: a + 1, reason };
            if f.is_zero() {
                return Err(failure("zero form".into()));
            }
            let t = match_type(f).ok_or_else(|| failure("no pattern matches".into()))?;
            let expected = match row.kind {
                RowKind::SRow => FormType::A { ell: row.block },
                RowKind::ConstantRow => FormType::B { ell: row.block },
                RowKind::ProductRow | RowKind::Monomial(_) => FormType::C,
            };
            if t != expected {
                return Err(failure(format!("row {row} gives {t:?}, expected {expected:?}")));
            }
            Ok(FormClass { index: a + 1, row, form_type: t })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumRuleReport {
    /// Every i-coefficient sums to zero over all forms.
    pub i_columns_vanish: bool,
    /// Every z-coefficient sums to zero over all forms.
    pub z_columns_vanish: bool,
    /// The forms add up to ζ_1 + … + ζ_2k + 2k.
    pub total_identity: bool,
    pub passed: bool,
}

pub fn check_sum_rules(forms: &[LinearForm]) -> SumRuleReport {
    let Some(first) = forms.first() else {
        return SumRuleReport { i_columns_vanish: true, z_columns_vanish: true, total_identity: true, passed: true };
    };
    let total = forms.iter().skip(1).fold(first.clone(), |acc, f| acc.add(f));
    let k = total.k();
    let i_ok = total.i.iter().all(Rational::is_zero);
    let z_ok = total.z.iter().all(Rational::is_zero);
    let total_ok = total.zeta.iter().all(Rational::is_one) && total.constant == Rational::from(2 * k as i64);
    SumRuleReport {
        i_columns_vanish: i_ok,
        z_columns_vanish: z_ok,
        total_identity: total_ok,
        passed: i_ok && z_ok && total_ok,
    }
}

/// Multiset of Γ arguments, numerator over denominator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaProduct {
    pub numerator: Vec<LinearForm>,
    pub denominator: Vec<LinearForm>,
    pub delta: u64,
    pub note: String,
}

impl GammaProduct {
    pub fn new(numerator: Vec<LinearForm>, denominator: Vec<LinearForm>, delta: &BigInt) -> Self {
        GammaProduct {
            numerator,
            denominator,
            delta: delta.to_u64().unwrap_or(u64::MAX),
            note: format!("up to a {delta}-periodic factor"),
        }
    }

    /// Moves every denominator Γ(y) to a numerator Γ(1-y) and sorts.
    ///
    /// Returns the sorted argument list and the number of reflections used.
    pub fn canonical(&self) -> (Vec<LinearForm>, usize) {
        let mut args: Vec<LinearForm> = self.numerator.iter().map(LinearForm::at_origin).collect();
        args.extend(self.denominator.iter().map(|f| f.at_origin().reflect()));
        args.sort();
        (args, self.denominator.len())
    }

    pub fn equivalent(&self, other: &GammaProduct) -> bool {
        self.canonical().0 == other.canonical().0
    }
}

fn gamma_list(forms: &[String]) -> String {
    let mut groups: Vec<(String, usize)> = Vec::new();
    for f in forms {
        match groups.iter_mut().find(|(g, _)| g == f) {
            Some((_, c)) => *c += 1,
            None => groups.push((f.clone(), 1)),
        }
    }
    groups
        .iter()
        .map(|(g, c)| if *c == 1 { format!("Γ({g})") } else { format!("Γ({g})^{c}") })
        .collect::<Vec<_>>()
        .join("·")
}

fn ratio_text(num: &[String], den: &[String]) -> String {
    let top = if num.is_empty() { "1".to_string() } else { gamma_list(num) };
    match den.len() {
        0 => top,
        1 => format!("{top}/{}", gamma_list(den)),
        _ => {
            let bottom = gamma_list(den);
            if bottom.contains('·') {
                format!("{top}/({bottom})")
            } else {
                format!("{top}/{bottom}")
            }
        }
    }
}

impl fmt::Display for GammaProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &[LinearForm]| v.iter().map(|x| x.at_origin().to_string()).collect::<Vec<_>>();
        write!(f, "{}", ratio_text(&show(&self.numerator), &show(&self.denominator)))
    }
}

/// Γ arguments written over the factor symbols ξ^(1), …, ξ^(k).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicGammaProduct {
    pub numerator: Vec<Vec<Rational>>,
    pub denominator: Vec<Vec<Rational>>,
}

fn sort_key(v: &[Rational]) -> (usize, Vec<Rational>) {
    let first = v.iter().position(|x| !x.is_zero()).unwrap_or(v.len());
    (first, v[first.min(v.len())..].to_vec())
}

impl SymbolicGammaProduct {
    pub fn sorted(mut self) -> Self {
        self.numerator.sort_by_key(|v| sort_key(v));
        self.denominator.sort_by_key(|v| sort_key(v));
        self
    }

    fn combo(v: &[Rational]) -> String {
        let name = |j: usize| if v.len() == 1 { "ξ".to_string() } else { format!("ξ{}", j + 1) };
        let mut s = String::new();
        for (j, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !s.is_empty() {
                s.push(if c.is_negative() { '-' } else { '+' });
            } else if c.is_negative() {
                s.push('-');
            }
            let abs = c.abs();
            if !abs.is_one() {
                s.push_str(&abs.to_string());
            }
            s.push_str(&name(j));
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }

    pub fn multiset_eq(&self, other: &SymbolicGammaProduct) -> bool {
        let a = self.clone().sorted();
        let b = other.clone().sorted();
        a.numerator == b.numerator && a.denominator == b.denominator
    }
}

impl fmt::Display for SymbolicGammaProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.clone().sorted();
        let num: Vec<String> = s.numerator.iter().map(|v| Self::combo(v)).collect();
        let den: Vec<String> = s.denominator.iter().map(|v| Self::combo(v)).collect();
        write!(f, "{}", ratio_text(&num, &den))
    }
}

/// Checks the special values on the s-, product and constant rows and returns
/// `∏_ν Γ(z_ν) ∏_{monomial rows} Γ(ξ_j)`.
pub fn lemma_form(cm: &CayleyMatrix, forms: &[LinearForm]) -> Result<GammaProduct> {
    let (n, k) = (cm.n, cm.k);
    for nu in 0..k {
        let z = LinearForm::z_var(n, k, nu);
        let checks = [
            (cm.s_row(nu), z.clone()),
            (cm.product_row(nu), z),
            (cm.constant_row(nu), LinearForm::one_minus_z(n, k, nu)),
        ];
        for (row, expected) in checks {
            if forms[row].at_origin() != expected {
                return Err(Error::LemmaShapeViolation { index: row + 1 });
            }
        }
    }
    let numerator = (0..k)
        .map(|nu| LinearForm::z_var(n, k, nu))
        .chain(cm.monomial_rows().into_iter().map(|a| forms[a].at_origin()))
        .collect();
    Ok(GammaProduct::new(numerator, Vec::new(), &compute_delta(forms)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorRow {
    /// 1-based Cayley row.
    pub row: usize,
    /// 1-based transposed weight group.
    pub group: usize,
    pub weight: u64,
}

/// ξ on the monomial rows written as transposed weight times one factor per group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct XiFactorization {
    /// One factor per transposed weight group.
    pub factors: Vec<LinearForm>,
    /// `labels[q]` is the index j of the symbol ξ^(j) naming factor q.
    pub labels: Vec<usize>,
    pub rows: Vec<FactorRow>,
    /// `p_tilde[q][r]`: coefficient of (1 - z_r) in factor q.
    pub p_tilde: Vec<Vec<Rational>>,
}

impl XiFactorization {
    /// The factor named ξ^(j), 1-based.
    pub fn labelled(&self, j: usize) -> &LinearForm {
        let q = self.labels.iter().position(|&l| l == j).expect("label exists");
        &self.factors[q]
    }
}

pub fn factorize_xi(spec: &CiSpec, tr: &TransposeResult, forms: &[LinearForm]) -> Result<XiFactorization> {
    let cm = build_cayley(spec)?;
    let pos = tr.variable_map.inverse();
    let mut factors: Vec<Option<LinearForm>> = vec![None; spec.k];
    let mut rows = Vec::with_capacity(spec.n);
    for (r, &a) in cm.monomial_rows().iter().enumerate() {
        let p = pos.apply(r);
        let q = tr.tspec.group_of(p).expect("position in a group");
        let weight = tr.tweights.vectors[q][p];
        if weight == 0 {
            return Err(Error::NotFactorizable { row: a + 1 });
        }
        let candidate = forms[a].at_origin().scale(&Rational::from(weight).recip());
        match &factors[q] {
            Some(f) if *f != candidate => return Err(Error::NotFactorizable { row: a + 1 }),
            Some(_) => {}
            None => factors[q] = Some(candidate),
        }
        rows.push(FactorRow { row: a + 1, group: q + 1, weight });
    }
    let factors: Vec<LinearForm> = factors
        .into_iter()
        .collect::<Option<_>>()
        .ok_or(Error::NotFactorizable { row: 0 })?;
    let inv_nu = tr.nu.inverse();
    let labels = (0..spec.k).map(|q| inv_nu.apply(q) + 1).collect();
    let p_tilde = factors.iter().map(|f| f.z.iter().map(|c| -c.clone()).collect()).collect();
    Ok(XiFactorization { factors, labels, rows, p_tilde })
}

/// Weights implied by the ratios of ξ inside each transposed weight group,
/// made primitive. Independent of the weights stored with the transposition.
pub fn implied_transposed_weights(spec: &CiSpec, tr: &TransposeResult, forms: &[LinearForm]) -> Result<WeightSystem> {
    let cm = build_cayley(spec)?;
    let monomial_rows = cm.monomial_rows();
    let mut vectors = vec![vec![0u64; spec.n]; spec.k];
    for (q, vector) in vectors.iter_mut().enumerate() {
        let positions: Vec<usize> = tr.tspec.group_range(q).collect();
        let values: Vec<LinearForm> = positions
            .iter()
            .map(|&p| forms[monomial_rows[tr.variable_map.apply(p)]].at_origin())
            .collect();
        let ratios: Vec<Rational> = values
            .iter()
            .map(|v| v.ratio_to(&values[0]).ok_or(Error::NotFactorizable { row: 0 }))
            .collect::<Result<_>>()?;
        let prim = primitive_integer_vector(&ratios).ok_or(Error::NotFactorizable { row: 0 })?;
        for (&p, w) in positions.iter().zip(prim) {
            vector[p] = w.to_u64().ok_or(Error::NotFactorizable { row: 0 })?;
        }
    }
    Ok(WeightSystem { vectors })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityLine {
    /// 1-based transposed block.
    pub block: usize,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizedReport {
    pub identity_holds: bool,
    pub identities: Vec<IdentityLine>,
    pub factorized_form: GammaProduct,
    pub symbolic: SymbolicGammaProduct,
    pub symbolic_text: String,
    pub lemma_form: GammaProduct,
    pub matches_lemma: bool,
    pub reflections: usize,
    pub conditions: ConditionFlags,
}

pub fn verify_factorized_form(spec: &CiSpec, tr: &TransposeResult, xi: &XiFactorization) -> Result<FactorizedReport> {
    let (n, k) = (spec.n, spec.k);
    let tcharges = charges(&tr.tspec, &tr.tweights);
    let label_vec = |q: usize, c: u64| {
        let mut v = vec![Rational::zero(); k];
        v[xi.labels[q] - 1] = Rational::from(c);
        v
    };

    let mut identities = Vec::with_capacity(k);
    let mut denominator = Vec::with_capacity(k);
    let mut sym_den = Vec::with_capacity(k);
    for j in 0..k {
        let lhs = (0..k).fold(LinearForm::zero(n, k), |acc, q| {
            acc.add(&xi.factors[q].scale(&Rational::from(tcharges.get(j, q))))
        });
        let target = tr.nu.apply(j);
        if lhs != LinearForm::one_minus_z(n, k, target) {
            return Err(Error::IdentityViolated { q: j + 1 });
        }
        let combo = (0..k).fold(vec![Rational::zero(); k], |acc, q| {
            acc.iter().zip(label_vec(q, tcharges.get(j, q))).map(|(a, b)| a + b).collect()
        });
        identities.push(IdentityLine {
            block: j + 1,
            lhs: SymbolicGammaProduct::combo(&combo),
            rhs: format!("1 - z{}", target + 1),
        });
        denominator.push(lhs);
        sym_den.push(combo);
    }

    let mut numerator = Vec::with_capacity(n);
    let mut sym_num = Vec::with_capacity(n);
    for q in 0..k {
        for p in tr.tspec.group_range(q) {
            let w = tr.tweights.vectors[q][p];
            numerator.push(xi.factors[q].scale(&Rational::from(w)));
            sym_num.push(label_vec(q, w));
        }
    }

    let cm = build_cayley(spec)?;
    let forms = solve_xi(&cm)?;
    let delta = compute_delta(&forms);
    let lemma = lemma_form(&cm, &forms)?;
    let factorized_form = GammaProduct::new(numerator, denominator, &delta);
    let symbolic = SymbolicGammaProduct { numerator: sym_num, denominator: sym_den }.sorted();
    Ok(FactorizedReport {
        identity_holds: true,
        identities,
        matches_lemma: factorized_form.equivalent(&lemma),
        reflections: factorized_form.canonical().1,
        symbolic_text: symbolic.to_string(),
        factorized_form,
        symbolic,
        lemma_form: lemma,
        conditions: tr.condition_flags.clone(),
    })
}
