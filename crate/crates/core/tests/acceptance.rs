//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines show up in plain `cargo test` output.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use mirrorkit::ci_model::{build_cayley, derive_weights, CiSpec};
use mirrorkit::horn_system::horn_operators;
use mirrorkit::mellin::{factorize_xi, lemma_form, solve_xi, verify_factorized_form, LinearForm};
use mirrorkit::nef_partition::{magic_square_check, solve_dual_partition};
use mirrorkit::pipeline::generate_family;
use mirrorkit::poincare::{series_expand, verify_duality};
use mirrorkit::transposition::{check_involution, transpose_spec};
use mirrorkit::{Rational, RationalMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_2024;
const RANDOM_SPECS_PER_K: usize = 125;
const TIME_LIMIT: Duration = Duration::from_secs(1);

const SCHIMMRIGK_L: &str = "
3 0 0 0 0 0 0 1 0 0 0 0 0; 0 3 0 0 0 0 0 1 0 0 0 0 0; 0 0 3 0 0 0 0 1 0 0 0 0 0;
0 0 0 3 0 0 0 1 0 0 0 0 0; 0 0 0 0 0 0 0 1 0 0 0 1 0; 0 1 1 1 0 0 0 0 1 0 0 0 0;
0 0 0 0 0 0 0 0 1 0 0 0 0; 0 1 0 0 3 0 0 0 0 1 0 0 0; 0 0 1 0 0 3 0 0 0 1 0 0 0;
0 0 0 1 0 0 3 0 0 1 0 0 0; 0 0 0 0 0 0 0 0 0 1 0 0 1; 1 0 0 0 1 1 1 0 0 0 1 0 0;
0 0 0 0 0 0 0 0 0 0 1 0 0";

const SCHIMMRIGK_L_INV: &str = "
1/3 -1/9 -1/9 -1/9 0 1/3 -1/3 0 0 0 0 0 0;
0 2/9 -1/9 -1/9 0 1/3 -1/3 0 0 0 0 0 0;
0 -1/9 2/9 -1/9 0 1/3 -1/3 0 0 0 0 0 0;
0 -1/9 -1/9 2/9 0 1/3 -1/3 0 0 0 0 0 0;
-1/9 -1/27 2/27 2/27 0 -1/9 1/9 2/9 -1/9 -1/9 0 1/3 -1/3;
-1/9 2/27 -1/27 2/27 0 -1/9 1/9 -1/9 2/9 -1/9 0 1/3 -1/3;
-1/9 2/27 2/27 -1/27 0 -1/9 1/9 -1/9 -1/9 2/9 0 1/3 -1/3;
0 1/3 1/3 1/3 0 -1 1 0 0 0 0 0 0;
0 0 0 0 0 0 1 0 0 0 0 0 0;
1/3 -1/9 -1/9 -1/9 0 0 0 1/3 1/3 1/3 0 -1 1;
0 0 0 0 0 0 0 0 0 0 0 0 1;
0 -1/3 -1/3 -1/3 1 1 -1 0 0 0 0 0 0;
-1/3 1/9 1/9 1/9 0 0 0 -1/3 -1/3 -1/3 1 1 -1";

const DEGREE21_L: &str = "
7 0 0 0 0 1 0 0; 0 7 0 1 0 1 0 0; 0 0 7 0 1 1 0 0; 0 0 0 3 0 1 0 0;
0 0 0 0 3 1 0 0; 0 0 0 0 0 1 0 1; 1 1 1 1 1 0 1 0; 0 0 0 0 0 0 1 0";

const DEGREE21_L_INV: &str = "
6/49 -1/49 -1/49 -2/49 -2/49 0 1/7 -1/7;
-2/147 19/147 -2/147 -11/147 -4/147 0 2/21 -2/21;
-2/147 -2/147 19/147 -4/147 -11/147 0 2/21 -2/21;
-1/21 -1/21 -1/21 5/21 -2/21 0 1/3 -1/3;
-1/21 -1/21 -1/21 -2/21 5/21 0 1/3 -1/3;
1/7 1/7 1/7 2/7 2/7 0 -1 1;
0 0 0 0 0 0 0 1;
-1/7 -1/7 -1/7 -2/7 -2/7 1 1 -1";

/// A Γ argument as (z coefficients, constant).
type Arg = (Vec<Rational>, Rational);

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome { passed, detail: detail.into() }
    }
}

fn r(p: i64, q: i64) -> Rational {
    Rational::new(p, q)
}

fn parse_matrix(text: &str) -> Vec<Vec<Rational>> {
    text.split(';')
        .map(|row| row.split_whitespace().map(|c| c.parse().unwrap()).collect())
        .collect()
}

fn rows_of(m: &RationalMatrix) -> Vec<Vec<Rational>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    (0..a.len())
        .map(|i| (0..b[0].len()).map(|j| (0..b.len()).map(|t| &a[i][t] * &b[t][j]).sum()).collect())
        .collect()
}

fn is_identity(m: &[Vec<Rational>]) -> bool {
    m.iter().enumerate().all(|(i, row)| row.iter().enumerate().all(|(j, v)| *v == if i == j { Rational::one() } else { Rational::zero() }))
}

/// Rank by exact Gaussian elimination, written out here rather than borrowed from the library.
fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(rank, p);
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && !row[c].is_zero() {
                let f = &row[c] / &pivot_row[c];
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &(&f * p);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Γ arguments as (z coefficients, constant), sorted.
fn args(forms: &[LinearForm]) -> Vec<Arg> {
    let mut v: Vec<_> = forms.iter().map(|f| (f.z.clone(), f.constant.clone())).collect();
    v.sort();
    v
}

fn arg(z: &[Rational], c: Rational) -> Arg {
    (z.to_vec(), c)
}

fn repeat(a: Arg, times: usize) -> Vec<Arg> {
    vec![a; times]
}

fn sorted<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort();
    v
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn criterion_1() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, spec, l_text, inv_text) in [
        ("two-block", common::load_fixture("schimmrigk"), SCHIMMRIGK_L, SCHIMMRIGK_L_INV),
        ("degree-21", common::load_fixture("degree21"), DEGREE21_L, DEGREE21_L_INV),
    ] {
        let ((l, inv), t) = timed(|| {
            let cm = build_cayley(&spec).unwrap();
            let inv = cm.inverse().unwrap();
            (rows_of(&cm.matrix), rows_of(&inv))
        });
        let this = l == parse_matrix(l_text) && inv == parse_matrix(inv_text) && t < TIME_LIMIT;
        ok &= this;
        notes.push(format!("{name} {}x{} {}", l.len(), l.len(), if this { "exact" } else { "MISMATCH" }));
    }
    Outcome::new(ok, notes.join(", "))
}

fn factorized_args(spec: &CiSpec) -> (Vec<Arg>, Vec<Arg>, Vec<Arg>) {
    let tr = transpose_spec(spec).unwrap();
    let cm = build_cayley(spec).unwrap();
    let forms = solve_xi(&cm).unwrap();
    let xi = factorize_xi(spec, &tr, &forms).unwrap();
    let report = verify_factorized_form(spec, &tr, &xi).unwrap();
    let lemma = lemma_form(&cm, &forms).unwrap();
    (args(&report.factorized_form.numerator), args(&report.factorized_form.denominator), args(&lemma.numerator))
}

/// Moves each denominator Γ(1 - w) to a numerator Γ(w), the reflection that
/// holds up to a periodic factor.
fn reflect_into(num: &[Arg], den: &[Arg]) -> Vec<Arg> {
    let mut all = num.to_vec();
    all.extend(den.iter().map(|(z, c)| (z.iter().map(|x| -x).collect(), Rational::one() - c.clone())));
    sorted(all)
}

fn criterion_2() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();

    // degree 21, ξ = -(z-1)/7: Γ(ξ)³Γ(2ξ)²/Γ(7ξ); left side Γ(-(z-1)/7)³Γ(-2(z-1)/7)²Γ(z)
    let spec = common::load_fixture("degree21");
    let (num, den, lemma) = factorized_args(&spec);
    let xi = |m: i64| arg(&[r(-m, 7)], r(m, 7));
    let want_num = sorted([repeat(xi(1), 3), repeat(xi(2), 2)].concat());
    let want_den = vec![xi(7)];
    let want_lemma = sorted([repeat(xi(1), 3), repeat(xi(2), 2), vec![arg(&[r(1, 1)], r(0, 1))]].concat());
    let this = num == want_num && den == want_den && lemma == want_lemma && reflect_into(&num, &den) == want_lemma;
    ok &= this;
    notes.push(format!("degree-21 original {}", if this { "ok" } else { "MISMATCH" }));

    // transposed side, ξ = -(z-1)/21: Γ(3ξ)Γ(2ξ)²Γ(7ξ)²/Γ(21ξ)
    let tspec = transpose_spec(&spec).unwrap().tspec;
    let (num, den, lemma) = factorized_args(&tspec);
    let xi = |m: i64| arg(&[r(-m, 21)], r(m, 21));
    let want_num = sorted([vec![xi(3)], repeat(xi(2), 2), repeat(xi(7), 2)].concat());
    let want_den = vec![xi(21)];
    let want_lemma = sorted([vec![xi(3)], repeat(xi(2), 2), repeat(xi(7), 2), vec![arg(&[r(1, 1)], r(0, 1))]].concat());
    let this = num == want_num && den == want_den && lemma == want_lemma && reflect_into(&num, &den) == want_lemma;
    ok &= this;
    notes.push(format!("degree-21 transposed {}", if this { "ok" } else { "MISMATCH" }));

    // two-block: ξ1 = -(z1-1)/3 + (z2-1)/9, ξ2 = -(z2-1)/3; Γ(ξ1)³Γ(ξ2)⁴/(Γ(3ξ1+ξ2)Γ(3ξ2))
    let spec = common::load_fixture("schimmrigk");
    let (num, den, _) = factorized_args(&spec);
    let xi1 = arg(&[r(-1, 3), r(1, 9)], r(1, 3) - r(1, 9));
    let xi2 = arg(&[r(0, 1), r(-1, 3)], r(1, 3));
    let want_num = sorted([repeat(xi1, 3), repeat(xi2, 4)].concat());
    let want_den = sorted(vec![arg(&[r(-1, 1), r(0, 1)], r(1, 1)), arg(&[r(0, 1), r(-1, 1)], r(1, 1))]);
    let this = num == want_num && den == want_den;
    ok &= this;
    notes.push(format!("two-block {}", if this { "ok" } else { "MISMATCH" }));
    Outcome::new(ok, notes.join(", "))
}

/// Power series of ∏(1-λ^a)/∏(1-λ^b) by repeated multiplication and geometric division.
fn univariate_series(num: &[u64], den: &[u64], order: usize) -> Vec<i64> {
    let mut c = vec![0i64; order + 1];
    c[0] = 1;
    for &a in num {
        for i in (a as usize..=order).rev() {
            c[i] -= c[i - a as usize];
        }
    }
    for &b in den {
        for i in b as usize..=order {
            c[i] += c[i - b as usize];
        }
    }
    c
}

fn criterion_3() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    let mut cases: Vec<(String, CiSpec)> = vec![
        ("degree-21".into(), common::load_fixture("degree21")),
        ("two-block".into(), common::load_fixture("schimmrigk")),
        ("quadric".into(), common::load_fixture("quadric")),
    ];
    for m in 3..=5 {
        cases.push((format!("family m={m}"), generate_family(m).unwrap()));
    }
    let mut slowest = Duration::ZERO;
    for (name, spec) in &cases {
        let (report, t) = timed(|| verify_duality(spec, &transpose_spec(spec).unwrap()).unwrap());
        slowest = slowest.max(t);
        if !report.passed || t >= TIME_LIMIT {
            ok = false;
            notes.push(format!("{name} FAILED at {:?}", report.first_failure()));
        }
    }
    // degree 21: M_X read off the closed form Γ(ξ)³Γ(2ξ)²/Γ(7ξ), compared by series
    let spec = common::load_fixture("degree21");
    let report = verify_duality(&spec, &transpose_spec(&spec).unwrap()).unwrap();
    let series = series_expand(&report.m_x, 30).unwrap().univariate();
    if series != univariate_series(&[7], &[1, 1, 1, 2, 2], 30) {
        ok = false;
        notes.push("degree-21 M_X series mismatch".into());
    }
    let corrupted = common::load_fixture("corrupted_weights");
    let bad = verify_duality(&corrupted, &transpose_spec(&corrupted).unwrap()).unwrap();
    let named = bad.first_failure().map(str::to_string);
    if bad.passed || named.as_deref() != Some("M_Y = PO_Xbar") {
        ok = false;
    }
    notes.push(format!("{} cases, slowest {:.0?}; corrupted fixture fails at {:?}", cases.len(), slowest, named.unwrap_or_default()));
    Outcome::new(ok, notes.join("; "))
}

fn inverse_rows(spec: &CiSpec) -> Vec<Vec<Rational>> {
    rows_of(&build_cayley(spec).unwrap().inverse().unwrap())
}

/// Checks every identity directly against the entries of L⁻¹; returns the failures.
fn property_failures(spec: &CiSpec) -> Vec<String> {
    let (n, k) = (spec.n, spec.k);
    let size = n + 3 * k;
    let cm = build_cayley(spec).unwrap();
    let l = rows_of(&cm.matrix);
    let inv = inverse_rows(spec);
    let mut fails = Vec::new();
    if !is_identity(&mat_mul(&l, &inv)) || !is_identity(&mat_mul(&inv, &l)) {
        fails.push("L·L⁻¹".to_string());
    }
    let forms = solve_xi(&cm).unwrap();
    let consistent = (0..size).all(|a| {
        let f = &forms[a];
        (0..n).all(|j| f.i[j] == inv[j][a])
            && (0..2 * k).all(|m| f.zeta[m] == inv[n + m][a])
            && (0..k).all(|q| f.z[q] == inv[n + 2 * k + q][a])
    });
    if !consistent {
        fails.push("forms differ from L⁻¹ columns".to_string());
    }
    let row_sum = |row: usize| -> Rational { inv[row].iter().sum() };
    let constant = |a: usize| -> Rational { (0..n + 2 * k).map(|j| inv[j][a].clone()).sum() };

    // column sums of the i and z coefficients vanish
    if !(0..n).all(|j| row_sum(j).is_zero()) || !(0..k).all(|q| row_sum(n + 2 * k + q).is_zero()) {
        fails.push("column sums".to_string());
    }
    // Σ L_a = ζ_1 + … + ζ_2k + 2k
    let total_constant: Rational = (0..size).map(constant).sum();
    if !(0..2 * k).all(|m| row_sum(n + m).is_one()) || total_constant != Rational::from(2 * k as i64) {
        fails.push("sum of forms".to_string());
    }
    // rows a-2, a-1 of block ν give z_ν at the origin; row a gives 1 - z_ν
    for nu in 0..k {
        let z_of = |a: usize| -> Vec<Rational> { (0..k).map(|q| inv[n + 2 * k + q][a].clone()).collect() };
        let unit: Vec<Rational> = (0..k).map(|q| if q == nu { Rational::one() } else { Rational::zero() }).collect();
        let neg: Vec<Rational> = unit.iter().map(|x| -x).collect();
        let (s, p, c) = (cm.s_row(nu), cm.product_row(nu), cm.constant_row(nu));
        let ok = z_of(s) == unit
            && z_of(p) == unit
            && z_of(c) == neg
            && constant(s).is_zero()
            && constant(p).is_zero()
            && constant(c).is_one();
        if !ok {
            fails.push(format!("special rows of block {}", nu + 1));
        }
    }
    // deg P_q = deg Q_q, counted from Δ·(z_q coefficients)
    let delta = inv.iter().flatten().fold(num_bigint::BigInt::from(1), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
    let delta = Rational::from(delta);
    let ops = horn_operators(spec, &forms).unwrap();
    for q in 0..k {
        let scaled: Vec<Rational> = (0..size).map(|a| &inv[n + 2 * k + q][a] * &delta).collect();
        let pos: Rational = scaled.iter().filter(|x| x.is_positive()).sum();
        let neg: Rational = scaled.iter().filter(|x| x.is_negative()).map(|x| -x).sum();
        let op = &ops[q];
        let degs = sorted(vec![Rational::from(op.degree_p() as i64), Rational::from(op.degree_q() as i64)]);
        if pos != neg || degs != vec![pos.clone(), neg] {
            fails.push(format!("Horn degrees of block {}", q + 1));
        }
    }
    fails
}

fn criterion_4(specs: &[CiSpec]) -> Outcome {
    let mut failures: BTreeMap<String, usize> = BTreeMap::new();
    for spec in specs {
        for f in property_failures(spec) {
            *failures.entry(f).or_default() += 1;
        }
    }
    let k2 = specs.iter().filter(|s| s.k == 2).count();
    let enough = specs.len() >= 200;
    Outcome::new(
        enough && failures.is_empty(),
        format!("{} systems ({} with k=2, seed {SEED:#x}), failures {:?}", specs.len(), k2, failures),
    )
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Brute force: some variable permutation and block bijection carry `a` onto `b`,
/// monomial sets and index sets included.
fn isomorphic(a: &CiSpec, b: &CiSpec) -> bool {
    if a.n != b.n || a.k != b.k {
        return false;
    }
    let col_sig = |s: &CiSpec, i: usize| -> Vec<u32> { sorted(s.monomials().iter().map(|r| r[i] as u32).collect()) };
    let sig_a: Vec<Vec<u32>> = (0..a.n).map(|i| col_sig(a, i)).collect();
    let sig_b: Vec<Vec<u32>> = (0..b.n).map(|i| col_sig(b, i)).collect();
    let block_key = |s: &CiSpec, q: usize, sigma: &[usize]| -> (Vec<Vec<u32>>, Vec<usize>) {
        let mons = sorted(s.blocks[q].exponents.iter().map(|r| (0..s.n).map(|i| r[sigma[i]]).collect()).collect());
        let inv: Vec<usize> = (0..s.n).map(|i| sigma.iter().position(|&x| x == i).unwrap()).collect();
        let idx = sorted(s.blocks[q].index_set.iter().map(|&i| inv[i - 1]).collect());
        (mons, idx)
    };
    let identity: Vec<usize> = (0..a.n).collect();
    let mut keys_b: Vec<_> = (0..b.k).map(|q| block_key(b, q, &identity)).collect();
    keys_b.sort();
    // sigma[i] = variable of `a` placed at position i of `b`
    permutations(a.n).into_iter().any(|sigma| {
        if (0..a.n).any(|i| sig_a[sigma[i]] != sig_b[i]) {
            return false;
        }
        let mut keys_a: Vec<_> = (0..a.k).map(|q| block_key(a, q, &sigma)).collect();
        keys_a.sort();
        keys_a == keys_b
    })
}

fn criterion_5(specs: &[CiSpec]) -> Outcome {
    let mut checked = 0;
    let mut bad = 0;
    let named = [common::load_fixture("schimmrigk"), common::load_fixture("degree21")];
    for (i, spec) in named.iter().chain(specs).enumerate() {
        let Ok(tr) = transpose_spec(spec) else {
            if i < named.len() {
                bad += 1;
            }
            continue;
        };
        checked += 1;
        let twice = transpose_spec(&tr.tspec).map(|t| t.tspec);
        let ok = check_involution(spec).unwrap_or(false) && twice.is_ok_and(|t| isomorphic(spec, &t));
        if !ok {
            bad += 1;
        }
    }
    Outcome::new(bad == 0, format!("{checked} transposable systems (both worked examples included), {bad} failures"))
}

/// (block, variable, dual vertex), both indices 1-based.
type Vertex = (usize, usize, Vec<i64>);

fn criterion_6() -> Outcome {
    let pinned: [(&str, Vec<Vertex>); 2] = [
        ("quadric", vec![(1, 1, vec![1, 0]), (1, 2, vec![-1, 0])]),
        (
            "schimmrigk",
            vec![
                (1, 2, vec![0, 1, 0, 0, 0, 0, 0]),
                (1, 3, vec![0, 0, 1, 0, 0, 0, 0]),
                (1, 4, vec![-1, -1, -1, 0, 0, 0, 0]),
                (2, 1, vec![1, 0, 0, 0, 0, 0, 0]),
                (2, 5, vec![0, 0, 0, 0, 1, 0, 0]),
                (2, 6, vec![0, 0, 0, 0, 0, 1, 0]),
                (2, 7, vec![0, 0, 0, 0, -1, -1, 0]),
            ],
        ),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, expected) in pinned {
        let spec = common::load_fixture(name);
        let tr = transpose_spec(&spec).unwrap();
        let Ok(data) = solve_dual_partition(&spec, &tr) else {
            ok = false;
            notes.push(format!("{name} unsolvable"));
            continue;
        };
        let got: Vec<(usize, usize, Vec<Rational>)> = data.duals.iter().map(|d| (d.block, d.variable, d.vector.clone())).collect();
        let want: Vec<(usize, usize, Vec<Rational>)> =
            expected.iter().map(|(b, v, x)| (*b, *v, x.iter().map(|&t| Rational::from(t)).collect())).collect();
        let pinned_ok = got == want;

        // Δ_q generators: the origin and (monomial - index-set indicator) of block q
        let diff_rows = |q: usize| -> Vec<Vec<Rational>> {
            let ind: Vec<i64> = (1..=spec.n).map(|i| i64::from(spec.blocks[q].index_set.contains(&i))).collect();
            spec.blocks[q]
                .exponents
                .iter()
                .map(|row| row.iter().zip(&ind).map(|(&e, &c)| Rational::from(i64::from(e) - c)).collect())
                .collect()
        };
        let dot = |x: &[Rational], y: &[Rational]| -> Rational { x.iter().zip(y).map(|(a, b)| a * b).sum() };
        let mut phi_ok = true;
        let mut pairings_ok = true;
        for (l, _, m) in &want {
            for q in 0..spec.k {
                let rows = diff_rows(q);
                let min = rows.iter().map(|x| dot(x, m)).fold(Rational::zero(), |acc, v| if v < acc { v } else { acc });
                let expected_phi = if q + 1 == *l { Rational::one() } else { Rational::zero() };
                phi_ok &= -min == expected_phi;
                // ⟨(x, ε_q), (m, ε_ℓ)⟩ over the origin and the difference rows
                let shift = if q + 1 == *l { Rational::one() } else { Rational::zero() };
                pairings_ok &= !shift.is_negative() && rows.iter().all(|x| !(&dot(x, m) + &shift).is_negative());
            }
        }
        let all_rows: Vec<Vec<Rational>> = (0..spec.k).flat_map(diff_rows).collect();
        let dim_ok = rank(all_rows) == spec.n - spec.k;
        let this = pinned_ok && phi_ok && pairings_ok && dim_ok && data.flags.phi_is_delta && data.flags.pairings_nonnegative;
        ok &= this;
        notes.push(format!(
            "{name}: vertices {}, phi=delta {}, pairings>=0 {}, dim n-k {}",
            pinned_ok, phi_ok, pairings_ok, dim_ok
        ));
    }
    Outcome::new(ok, notes.join("; "))
}

fn criterion_7() -> Outcome {
    let spec = common::load_fixture("schimmrigk");
    let (n, k) = (spec.n, spec.k);
    let tr = transpose_spec(&spec).unwrap();
    let cm = build_cayley(&spec).unwrap();
    let forms = solve_xi(&cm).unwrap();
    let report = magic_square_check(&cm, &forms, Some(&tr.nu));
    let inv = inverse_rows(&spec);
    let rows = cm.monomial_rows();
    let mut witnessed = true;
    let mut shown = Vec::new();
    for b in &report.blocks {
        let q = b.block - 1;
        let Some(sigma) = &b.witness else {
            witnessed = false;
            continue;
        };
        let bijective = sorted(sigma.clone()) == (1..=n).collect::<Vec<_>>();
        let target = cm.constant_row(b.matched_block - 1);
        let matches = rows.iter().zip(sigma).all(|(&row, &s)| inv[n + 2 * k + q][row] == inv[s - 1][target]);
        witnessed &= bijective && matches;
        shown.push(format!("q={} via block {} sigma={:?}", b.block, b.matched_block, sigma));
    }
    Outcome::new(report.satisfied && witnessed, shown.join("; "))
}

fn criterion_8() -> Outcome {
    let spec = common::load_fixture("degree21");
    let weights = derive_weights(&spec).unwrap().vectors[0].clone();
    let report = verify_duality(&spec, &transpose_spec(&spec).unwrap()).unwrap();
    let order = 7;
    let got = series_expand(&report.p_a_x, order).unwrap().univariate();
    // monomials of weighted degree j, times the numerator (1 - λ^21) which is 1 below degree 21
    let mut counts = vec![0i64; order + 1];
    let bound = |w: u64| (order as u64 / w) as u32;
    for a in 0..=bound(weights[0]) {
        for b in 0..=bound(weights[1]) {
            for c in 0..=bound(weights[2]) {
                for d in 0..=bound(weights[3]) {
                    for e in 0..=bound(weights[4]) {
                        let deg: u64 = [a, b, c, d, e].iter().zip(&weights).map(|(&x, &w)| u64::from(x) * w).sum();
                        if deg <= order as u64 {
                            counts[deg as usize] += 1;
                        }
                    }
                }
            }
        }
    }
    Outcome::new(got == counts, format!("weights {weights:?}: series {got:?}, enumeration {counts:?}"))
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let specs = common::random_valid_specs(&mut rng, RANDOM_SPECS_PER_K, 200_000);

    type Criterion<'a> = (&'a str, &'a str, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("1", "golden Cayley matrices and inverses", Box::new(criterion_1)),
        ("2", "Gamma-product closed forms", Box::new(criterion_2)),
        ("3", "monodromy / Poincare duality", Box::new(criterion_3)),
        ("4", "random-system identity suite", Box::new(|| criterion_4(&specs))),
        ("5", "double transposition", Box::new(|| criterion_5(&specs))),
        ("6", "nef partition and dual vertices", Box::new(criterion_6)),
        ("7", "magic-square matching", Box::new(criterion_7)),
        ("8", "structural-algebra series", Box::new(criterion_8)),
    ];
    let mut failed = 0;
    for (id, name, run) in &criteria {
        let (outcome, t) = timed(run);
        let mark = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{mark} criterion {id}: {name} [tolerance: exact] ({:.0?}) {}", t, outcome.detail);
        failed += usize::from(!outcome.passed);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
