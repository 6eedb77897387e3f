//! Stage orchestration behind the command line: runs any single stage or the
//! full verification chain and renders a consolidated report.

use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::ci_model::{build_cayley, charges, validate, Block, CayleyMatrix, ChargeMatrix, CiSpec, ValidationReport, WeightSystem};
use crate::error::{Error, Result};
use crate::horn_system::{char_polys, horn_operators, restricted_operator, symmetry_report, CharPolyPair, HornOperator, SymmetryReport};
use crate::mellin::{
    check_sum_rules, classify_forms, compute_delta, factorize_xi, lemma_form, solve_xi, verify_factorized_form, FactorizedReport, FormClass,
    GammaProduct, LinearForm, SumRuleReport, XiFactorization,
};
use crate::nef_partition::{magic_square_check, solve_dual_partition, MagicSquareReport, NefPartitionData};
use crate::poincare::{series_expand, verify_duality, DualityReport, SeriesTable};
use crate::rational_linalg::{Rational, RationalMatrix};
use crate::transposition::{double_transpose_matches, transpose_spec, TransposeResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_CONCLUSION: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Horn operators with more factors than this are summarised in text output.
const TEXT_FACTOR_LIMIT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Validate,
    Weights,
    Cayley,
    Transpose,
    Mellin,
    Horn,
    Poincare,
    Nef,
    Verify,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Validate,
        Command::Weights,
        Command::Cayley,
        Command::Transpose,
        Command::Mellin,
        Command::Horn,
        Command::Poincare,
        Command::Nef,
        Command::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Weights => "weights",
            Command::Cayley => "cayley",
            Command::Transpose => "transpose",
            Command::Mellin => "mellin",
            Command::Horn => "horn",
            Command::Poincare => "poincare",
            Command::Nef => "nef",
            Command::Verify => "verify",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Command::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| format!("unknown command {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Text,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "text" => Ok(OutputFormat::Text),
            _ => Err(format!("unknown format {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub input: PathBuf,
    pub format: OutputFormat,
    pub order: usize,
    /// Soft condition flags abort (exit 2) instead of annotating.
    pub strict: bool,
}

impl RunConfig {
    pub fn new(command: Command, input: impl Into<PathBuf>) -> Self {
        RunConfig { command, input: input.into(), format: OutputFormat::Json, order: 8, strict: false }
    }
}

/// How a failing check affects the exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    /// Construction invariant; failure means exit 3.
    Hard,
    /// A conclusion of the construction; failure means exit 2.
    Conclusion,
    /// Sufficient condition; reported, exit 2 only in strict mode.
    Soft,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportCheck {
    pub name: String,
    pub severity: Severity,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightsStage {
    pub weights: WeightSystem,
    pub charges: ChargeMatrix,
    pub polynomials: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CayleyStage {
    pub cayley: CayleyMatrix,
    pub inverse: RationalMatrix,
    pub determinant: Rational,
    pub delta: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransposeStage {
    pub result: TransposeResult,
    pub polynomials: Vec<(String, String)>,
    pub involution: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MellinStage {
    pub forms: Vec<LinearForm>,
    pub form_text: Vec<String>,
    pub delta: u64,
    pub classes: Vec<FormClass>,
    pub sum_rules: SumRuleReport,
    pub lemma_form: GammaProduct,
    pub lemma_text: String,
    pub factorization: XiFactorization,
    pub factorized: FactorizedReport,
    pub magic_square: MagicSquareReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HornStage {
    pub operators: Vec<HornOperator>,
    pub operator_text: Vec<String>,
    pub restricted: Vec<HornOperator>,
    pub restricted_text: Vec<String>,
    pub char_polys: Vec<CharPolyPair>,
    pub symmetry: SymmetryReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoincareStage {
    pub duality: DualityReport,
    pub series_a_x: SeriesTable,
    pub series_a_y: SeriesTable,
}

/// One consolidated report; stages that did not run are absent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: Command,
    pub exit_code: i32,
    pub strict: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub checks: Vec<ReportCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation: Option<ValidationReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightsStage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cayley: Option<CayleyStage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transpose: Option<TransposeStage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mellin: Option<MellinStage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horn: Option<HornStage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poincare: Option<PoincareStage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nef: Option<NefPartitionData>,
}

impl Report {
    fn empty(command: Command, strict: bool) -> Self {
        Report {
            command,
            exit_code: EXIT_OK,
            strict,
            error: None,
            checks: Vec::new(),
            validation: None,
            weights: None,
            cayley: None,
            transpose: None,
            mellin: None,
            horn: None,
            poincare: None,
            nef: None,
        }
    }

    fn check(&mut self, name: &str, severity: Severity, passed: bool, detail: impl Into<String>) {
        self.checks.push(ReportCheck { name: name.to_string(), severity, passed, detail: detail.into() });
    }

    /// First failing check that decides the exit status, if any.
    pub fn decisive_failure(&self) -> Option<&ReportCheck> {
        let failing = |s: Severity| self.checks.iter().find(|c| !c.passed && c.severity == s);
        failing(Severity::Hard)
            .or_else(|| failing(Severity::Conclusion))
            .or_else(|| if self.strict { failing(Severity::Soft) } else { None })
    }

    fn settle(&mut self) {
        if self.error.is_some() {
            return;
        }
        self.exit_code = match self.decisive_failure().map(|c| c.severity) {
            None => EXIT_OK,
            Some(Severity::Hard) => EXIT_INTERNAL,
            Some(_) => EXIT_CONCLUSION,
        };
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.to_json() + "\n",
            OutputFormat::Text => self.to_text(),
        }
    }
}

/// Exit status an error maps to.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::SpecInvalid(_)
        | Error::NoPositiveSolution { .. }
        | Error::AmbiguousWeights { .. }
        | Error::WeightsMismatch { .. }
        | Error::SingularMatrix
        | Error::InvalidFamilyParameter(_) => EXIT_INVALID,
        Error::NoValidShape(_)
        | Error::NoInvolutiveNu
        | Error::NoRho { .. }
        | Error::NotFactorizable { .. }
        | Error::IdentityViolated { .. }
        | Error::Unsolvable(_) => EXIT_CONCLUSION,
        Error::DimensionMismatch(_)
        | Error::ClassificationFailure { .. }
        | Error::LemmaShapeViolation { .. }
        | Error::NotExpandable(_)
        | Error::DegreeCapExceeded { .. } => EXIT_INTERNAL,
    }
}

fn to_u64(v: &num_bigint::BigInt) -> Result<u64> {
    v.to_u64().ok_or_else(|| Error::DimensionMismatch(format!("{v} does not fit in u64")))
}

pub fn weights_stage(spec: &CiSpec) -> Result<WeightsStage> {
    let weights = crate::ci_model::derive_weights(spec)?;
    let charges = charges(spec, &weights);
    Ok(WeightsStage { weights, charges, polynomials: spec.polynomials() })
}

pub fn cayley_stage(spec: &CiSpec) -> Result<CayleyStage> {
    let cayley = build_cayley(spec)?;
    let inverse = cayley.inverse()?;
    let determinant = cayley.matrix.determinant()?;
    let delta = to_u64(&inverse.lcm_of_denominators())?;
    Ok(CayleyStage { cayley, inverse, determinant, delta })
}

pub fn transpose_stage(spec: &CiSpec) -> Result<TransposeStage> {
    let result = transpose_spec(spec)?;
    let back = transpose_spec(&result.tspec)?;
    let involution = double_transpose_matches(spec, &result, &back);
    let polynomials = result.tspec.polynomials();
    Ok(TransposeStage { result, polynomials, involution })
}

pub fn mellin_stage(spec: &CiSpec, tr: &TransposeResult) -> Result<MellinStage> {
    let cm = build_cayley(spec)?;
    let forms = solve_xi(&cm)?;
    let delta = compute_delta(&forms);
    let classes = classify_forms(&cm, &forms)?;
    let sum_rules = check_sum_rules(&forms);
    let lemma = lemma_form(&cm, &forms)?;
    let factorization = factorize_xi(spec, tr, &forms)?;
    let factorized = verify_factorized_form(spec, tr, &factorization)?;
    let magic_square = magic_square_check(&cm, &forms, Some(&tr.nu));
    Ok(MellinStage {
        form_text: forms.iter().map(ToString::to_string).collect(),
        forms,
        delta: to_u64(&delta)?,
        classes,
        sum_rules,
        lemma_text: lemma.to_string(),
        lemma_form: lemma,
        factorization,
        factorized,
        magic_square,
    })
}

pub fn horn_stage(spec: &CiSpec, tr: &TransposeResult) -> Result<HornStage> {
    let forms = solve_xi(&build_cayley(spec)?)?;
    let operators = horn_operators(spec, &forms)?;
    let tcharges = charges(&tr.tspec, &tr.tweights);
    let restricted: Vec<HornOperator> = (0..spec.k).map(|q| restricted_operator(&tr.tweights, &tcharges, q)).collect();
    Ok(HornStage {
        operator_text: operators.iter().map(ToString::to_string).collect(),
        operators,
        restricted_text: restricted.iter().map(ToString::to_string).collect(),
        restricted,
        char_polys: (0..spec.k).map(|q| char_polys(&tr.tweights, &tcharges, q)).collect(),
        symmetry: symmetry_report(spec, tr)?,
    })
}

pub fn poincare_stage(spec: &CiSpec, tr: &TransposeResult, order: usize) -> Result<PoincareStage> {
    let duality = verify_duality(spec, tr)?;
    let series_a_x = series_expand(&duality.p_a_x, order)?;
    let series_a_y = series_expand(&duality.p_a_y, order)?;
    Ok(PoincareStage { duality, series_a_x, series_a_y })
}

fn flag_checks(report: &mut Report, tr: &TransposeResult) {
    let f = &tr.condition_flags;
    report.check("block_sizes_match", Severity::Soft, f.block_sizes_match, "some correspondence matches monomial counts with index-set sizes");
    report.check("nu_involution", Severity::Soft, f.nu_involution, format!("nu = {:?}", tr.nu.one_based()));
    report.check("lambda_identities", Severity::Soft, f.lambda_identities, "lambda carries index and monomial matrices to the transposed ones");
    report.check("rho_exists", Severity::Soft, f.rho_exists && f.t_rho_exists, "permutations rho and transposed rho");
    if let (Some(a), Some(b)) = (f.g_rho_symmetric, f.tg_t_rho_symmetric) {
        report.check("g_rho_symmetric", Severity::Soft, a && b, format!("original {a}, transposed {b}"));
    }
}

fn run_stages(report: &mut Report, spec: &CiSpec, order: usize) -> Result<()> {
    let command = report.command;
    let all = command == Command::Verify;

    let validation = validate(spec);
    let valid = validation.valid;
    let failed: Vec<String> = validation.checks.iter().filter(|c| !c.passed).map(|c| format!("{}: {}", c.name, c.detail)).collect();
    report.validation = Some(validation);
    if !valid {
        return Err(Error::SpecInvalid(failed.join("; ")));
    }
    if command == Command::Validate {
        return Ok(());
    }

    if all || command == Command::Weights {
        report.weights = Some(weights_stage(spec)?);
    }
    if all || command == Command::Cayley {
        let stage = cayley_stage(spec)?;
        let product = stage.cayley.matrix.checked_mul(&stage.inverse)?;
        report.check("cayley_inverse", Severity::Hard, product.is_identity(), format!("det L = {}", stage.determinant));
        report.cayley = Some(stage);
    }
    if matches!(command, Command::Weights | Command::Cayley) {
        return Ok(());
    }

    let stage = transpose_stage(spec)?;
    let tr = stage.result.clone();
    if all || command == Command::Transpose {
        flag_checks(report, &tr);
        report.check("double_transpose", Severity::Conclusion, stage.involution, "transposing twice restores the input up to the recorded permutations");
        report.transpose = Some(stage);
    }

    if all || command == Command::Mellin {
        let stage = mellin_stage(spec, &tr)?;
        let s = &stage.sum_rules;
        report.check("sum_rules", Severity::Hard, s.passed, format!("i columns {}, z columns {}, total {}", s.i_columns_vanish, s.z_columns_vanish, s.total_identity));
        report.check("factorized_identity", Severity::Conclusion, stage.factorized.identity_holds, stage.factorized.symbolic_text.clone());
        report.check("factorized_matches_lemma", Severity::Conclusion, stage.factorized.matches_lemma, format!("{} reflections", stage.factorized.reflections));
        let witness = stage.magic_square.blocks.iter().map(|b| format!("{:?}", b.witness)).collect::<Vec<_>>().join(", ");
        report.check("magic_square", Severity::Soft, stage.magic_square.satisfied, format!("witness {witness}"));
        if command == Command::Mellin {
            flag_checks(report, &tr);
        }
        report.mellin = Some(stage);
    }

    if all || command == Command::Horn {
        let stage = horn_stage(spec, &tr)?;
        for op in &stage.operators {
            report.check(
                &format!("horn_degree_{}", op.variable),
                Severity::Hard,
                op.degree_p() == op.degree_q(),
                format!("deg P = {}, deg Q = {}", op.degree_p(), op.degree_q()),
            );
        }
        let divide = &stage.symmetry.weights_divide;
        report.check("weights_divide_orders", Severity::Soft, divide.iter().all(|&b| b), format!("{divide:?}"));
        report.horn = Some(stage);
    }

    if all || command == Command::Poincare {
        let stage = poincare_stage(spec, &tr, order)?;
        for id in &stage.duality.identities {
            report.check(&id.name, Severity::Conclusion, id.passed, format!("{} vs {}", id.lhs, id.rhs));
        }
        report.check("degree_balance", Severity::Hard, stage.duality.degree_balanced, "numerator and denominator degrees agree per variable");
        report.poincare = Some(stage);
    }

    if all || command == Command::Nef {
        let data = solve_dual_partition(spec, &tr)?;
        let f = &data.flags;
        let m = &data.minkowski;
        report.check("minkowski_dim", Severity::Conclusion, f.minkowski_dim_ok, format!("dim {} expected {}", m.dim, m.expected));
        report.check("p_integral", Severity::Conclusion, f.p_integral, "integral representative modulo the weight span");
        report.check("phi_is_delta", Severity::Conclusion, f.phi_is_delta, "phi_q at dual vertices of block l is delta_ql");
        report.check("cone_pairings_nonnegative", Severity::Conclusion, f.pairings_nonnegative, "");
        report.check("own_block_pairings", Severity::Soft, f.own_block_all_minus_one, "all own-block pairings equal -1");
        report.check(
            "vertex_conditions",
            Severity::Soft,
            f.own_block_at_least_minus_one && f.other_blocks_nonnegative && f.other_blocks_single_support,
            "",
        );
        report.check(
            "dual_partition_hypotheses",
            Severity::Soft,
            f.lambda_identity && f.weights_identity && f.transposed_weights_identity,
            "",
        );
        report.nef = Some(data);
    }
    Ok(())
}

/// Runs one command on an already parsed system.
pub fn run_spec(command: Command, spec: &CiSpec, order: usize, strict: bool) -> Report {
    let mut report = Report::empty(command, strict);
    match run_stages(&mut report, spec, order) {
        Ok(()) => report.settle(),
        Err(e) => {
            report.exit_code = exit_code_for(&e);
            report.error = Some(e.to_string());
        }
    }
    report
}

/// Parses the input and runs one command on it.
pub fn run_str(command: Command, input: &str, order: usize, strict: bool) -> Report {
    match CiSpec::from_json(input) {
        Ok(spec) => run_spec(command, &spec, order, strict),
        Err(e) => {
            let mut report = Report::empty(command, strict);
            report.exit_code = exit_code_for(&e);
            report.error = Some(e.to_string());
            report
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub output: String,
}

pub fn run(config: &RunConfig) -> RunOutcome {
    let report = match std::fs::read_to_string(&config.input) {
        Ok(text) => run_str(config.command, &text, config.order, config.strict),
        Err(e) => {
            let mut report = Report::empty(config.command, config.strict);
            report.exit_code = EXIT_INVALID;
            report.error = Some(format!("cannot read {}: {e}", config.input.display()));
            report
        }
    };
    RunOutcome { exit_code: report.exit_code, output: report.render(config.format) }
}

/// The 2m+1 variable family `Σ_{i=0}^m x_i^m`, `x_1⋯x_m + 1`,
/// `Σ_{i=1}^m x_i x_{i+m}^m`, `x_0 x_{m+1}⋯x_{2m} + 1`.
///
/// Variable `x_i` is stored at 1-based position `i + 1`.
pub fn generate_family(m: usize) -> Result<CiSpec> {
    if m < 3 {
        return Err(Error::InvalidFamilyParameter(m));
    }
    let n = 2 * m + 1;
    let exp = m as u32;
    let unit = |entries: &[(usize, u32)]| {
        let mut v = vec![0u32; n];
        for &(i, e) in entries {
            v[i] = e;
        }
        v
    };
    let first = Block { exponents: (0..=m).map(|i| unit(&[(i, exp)])).collect(), index_set: (2..=m + 1).collect() };
    let second = Block {
        exponents: (1..=m).map(|i| unit(&[(i, 1), (i + m, exp)])).collect(),
        index_set: std::iter::once(1).chain(m + 2..=n).collect(),
    };
    Ok(CiSpec { n, k: 2, blocks: vec![first, second], weights: None })
}

/// Plain-text table with row and column headers, right-aligned cells.
pub fn labelled_table(row_labels: &[String], column_labels: &[String], m: &RationalMatrix) -> String {
    let mut cells: Vec<Vec<String>> = vec![std::iter::once(String::new()).chain(column_labels.iter().cloned()).collect()];
    for (r, label) in row_labels.iter().enumerate() {
        cells.push(std::iter::once(label.clone()).chain(m.row(r).iter().map(ToString::to_string)).collect());
    }
    let width = cells.iter().flat_map(|r| r.iter().skip(1)).map(|c| c.chars().count()).max().unwrap_or(1);
    let lw = cells.iter().map(|r| r[0].chars().count()).max().unwrap_or(0);
    cells
        .iter()
        .map(|row| {
            let mut line = format!("{:<lw$}", row[0]);
            for c in &row[1..] {
                let pad = width.saturating_sub(c.chars().count()) + 1;
                line.push_str(&" ".repeat(pad));
                line.push_str(c);
            }
            line.trim_end().to_string()
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn polys_text(out: &mut String, polys: &[(String, String)]) {
    for (j, (a, b)) in polys.iter().enumerate() {
        let _ = writeln!(out, "  f{} = {a}", 2 * j + 1);
        let _ = writeln!(out, "  f{} = {b}", 2 * j + 2);
    }
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        if let Some(v) = &self.validation {
            let _ = writeln!(out, "\n== validate ==");
            for c in &v.checks {
                let mark = if c.passed { "ok" } else { "FAILED" };
                let line = format!("  {:<20} {mark:<6} {}", c.name, c.detail);
                let _ = writeln!(out, "{}", line.trim_end());
            }
        }
        if let Some(w) = &self.weights {
            let _ = writeln!(out, "\n== weights ==");
            polys_text(&mut out, &w.polynomials);
            for (q, g) in w.weights.vectors.iter().enumerate() {
                let _ = writeln!(out, "  g({}) = {:?}", q + 1, g);
            }
            for (j, row) in w.charges.entries.iter().enumerate() {
                let _ = writeln!(out, "  Q[f{}] = {:?}", 2 * j + 1, row);
            }
            let _ = writeln!(out, "  Qbar = {:?}", w.charges.q_bar);
        }
        if let Some(c) = &self.cayley {
            let n = c.cayley.size();
            let _ = writeln!(out, "\n== cayley ==");
            let _ = writeln!(out, "L ({n}x{n}), det = {}", c.determinant);
            let _ = writeln!(out, "{}", c.cayley.text());
            let _ = writeln!(out, "\nL^-1, Delta = {}", c.delta);
            let rows: Vec<String> = c.cayley.column_labels.clone();
            let cols: Vec<String> = c.cayley.row_labels.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "{}", labelled_table(&rows, &cols, &c.inverse));
        }
        if let Some(t) = &self.transpose {
            let r = &t.result;
            let _ = writeln!(out, "\n== transpose ==");
            polys_text(&mut out, &t.polynomials);
            let _ = writeln!(out, "  nu = {:?}", r.nu.one_based());
            let _ = writeln!(out, "  lambda = {:?}", r.lambda.one_based());
            let _ = writeln!(out, "  variable map = {:?}", r.variable_map.one_based());
            for (q, g) in r.tweights.vectors.iter().enumerate() {
                let _ = writeln!(out, "  Tg({}) = {:?}", q + 1, g);
            }
            let _ = writeln!(out, "  self-transposed: {}", r.condition_flags.self_transposed);
            let _ = writeln!(out, "  involution: {}", t.involution);
        }
        if let Some(m) = &self.mellin {
            let _ = writeln!(out, "\n== mellin ==");
            let _ = writeln!(out, "  Delta = {}", m.delta);
            for (a, text) in m.form_text.iter().enumerate() {
                let _ = writeln!(out, "  L{} = {text}", a + 1);
            }
            let _ = writeln!(out, "  special values: {}", m.lemma_text);
            for (q, f) in m.factorization.factors.iter().enumerate() {
                let _ = writeln!(out, "  xi({}) = {f}", m.factorization.labels[q]);
            }
            for line in &m.factorized.identities {
                let _ = writeln!(out, "  block {}: {} = {}", line.block, line.lhs, line.rhs);
            }
            let _ = writeln!(out, "  factorized: {}", m.factorized.symbolic_text);
            let _ = writeln!(out, "  factorized (explicit): {}", m.factorized.factorized_form);
            let _ = writeln!(out, "  reflections: {}", m.factorized.reflections);
            for b in &m.magic_square.blocks {
                let _ = writeln!(out, "  magic square block {}: matched block {}, witness {:?}", b.block, b.matched_block, b.witness);
            }
        }
        if let Some(h) = &self.horn {
            let _ = writeln!(out, "\n== horn ==");
            for (op, t) in h.operators.iter().zip(&h.operator_text) {
                if op.degree_p().max(op.degree_q()) <= TEXT_FACTOR_LIMIT {
                    let _ = writeln!(out, "  {t}");
                } else {
                    let _ = writeln!(out, "  operator {}: deg P = {}, deg Q = {} (full form in JSON output)", op.variable, op.degree_p(), op.degree_q());
                }
            }
            for t in &h.restricted_text {
                let _ = writeln!(out, "  restricted: {t}");
            }
            for c in &h.char_polys {
                let _ = writeln!(out, "  block {}: at 0 {}, at infinity {}, chi = {}", c.block, c.at_zero_factored, c.at_infinity_factored, c.chi);
            }
            let _ = writeln!(out, "  quantum symmetry X: {}", h.symmetry.quantum_x);
            let _ = writeln!(out, "  quantum symmetry Y: {}", h.symmetry.quantum_y);
        }
        if let Some(p) = &self.poincare {
            let d = &p.duality;
            let _ = writeln!(out, "\n== poincare ==");
            for (name, r) in [("M_X", &d.m_x), ("M_Y", &d.m_y), ("PO_X", &d.po_x), ("PO_Y", &d.po_y), ("P_AX", &d.p_a_x), ("P_AY", &d.p_a_y)] {
                let _ = writeln!(out, "  {name:<5} = {r}");
            }
            for (name, s) in [("P_AX", &p.series_a_x), ("P_AY", &p.series_a_y)] {
                let body = if s.variables == 1 {
                    s.univariate().iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
                } else {
                    s.terms.iter().map(|(e, c)| format!("{c}*{e:?}")).collect::<Vec<_>>().join(" + ")
                };
                let _ = writeln!(out, "  series {name} to order {}: {body}", s.order);
            }
        }
        if let Some(nef) = &self.nef {
            let _ = writeln!(out, "\n== nef ==");
            let _ = writeln!(out, "  Minkowski dim {} (expected {})", nef.minkowski.dim, nef.minkowski.expected);
            let _ = writeln!(out, "  section {:?}", nef.section);
            for d in &nef.duals {
                let v: Vec<String> = d.vector.iter().map(ToString::to_string).collect();
                let _ = writeln!(out, "  dual vertex block {} var {}: ({})", d.block, d.variable, v.join(", "));
            }
            for (q, row) in nef.phi.iter().enumerate() {
                let v: Vec<String> = row.iter().map(ToString::to_string).collect();
                let _ = writeln!(out, "  phi_{} = [{}]", q + 1, v.join(", "));
            }
        }
        let _ = writeln!(out, "\n== checks ==");
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            let sev = match c.severity {
                Severity::Hard => "hard",
                Severity::Conclusion => "conclusion",
                Severity::Soft => "soft",
            };
            let line = format!("  {mark} {:<28} [{sev}] {}", c.name, c.detail);
            let _ = writeln!(out, "{}", line.trim_end());
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error: {e}");
        }
        let _ = writeln!(out, "exit: {}", self.exit_code);
        out
    }
}
