use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use cfree::clt::{
    check_condition_a as check_moment_form, check_condition_a_cumulants, clt_limit_law,
    convergence_table, forms_agree, ClassicalOracle, ConditionAReport, ConvergenceRow, FreeOracle,
    Moment, PatternOracle, PatternSource, TableOracle, TableOracleSpec,
};
use cfree::convolution::{c_convolve, c_convolve_analytic, free_convolve};
use cfree::cumulants::{cumulants_via_series, free_cumulants};
use cfree::freeprod::{duplicate_pair, State};
use cfree::io::{from_json, reprs, JsonError, LawSpec, Number, PairSpec, SequenceFile};
use cfree::lahalukacs::{
    c_from_b, constant_variance_phi_law, linear_variance_phi_law, mmm_transform,
    regression_residuals, RegressionParams,
};
use cfree::laws::{density_grid, ClosedForm, DensityPoint, TwoStateLaw};
use cfree::{Error, Rational, Scalar, ScalarMode};

use crate::{Case, Format, Normalization, Route};

/// Tolerance for agreement tests in float mode.
const FLOAT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct CliError {
    #[serde(skip)]
    pub exit_code: u8,
    pub error: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
}

impl CliError {
    fn validation(error: &str, message: impl Into<String>) -> Self {
        CliError {
            exit_code: 1,
            error: error.into(),
            message: message.into(),
            file: None,
            path: None,
            field: None,
        }
    }

    pub fn usage(kind: clap::error::ErrorKind, message: String) -> Self {
        let error = match kind {
            clap::error::ErrorKind::InvalidSubcommand => "unknown_subcommand",
            _ => "usage",
        };
        let message = message
            .lines()
            .next()
            .unwrap_or_default()
            .trim_start_matches("error: ")
            .to_owned();
        Self::validation(error, message)
    }

    fn parse(file: &Path, e: JsonError) -> Self {
        let field = e
            .path
            .rsplit('.')
            .next()
            .filter(|f| !f.is_empty() && *f != "?")
            .map(str::to_owned);
        CliError {
            exit_code: 1,
            error: "parse".into(),
            message: e.message,
            file: Some(file.display().to_string()),
            path: Some(e.path),
            field,
        }
    }

    fn field(field: &str, e: Error) -> Self {
        CliError {
            field: Some(field.into()),
            ..Self::from(e)
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("error serializes")
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let exit_code = match e {
            Error::NonInvertible
            | Error::CompositionDomain
            | Error::ReversionSingular
            | Error::SqrtNormalization
            | Error::AnalyticRouteUnavailable(_)
            | Error::Branch(_) => 2,
            _ => 1,
        };
        CliError {
            exit_code,
            error: e.kind().into(),
            message: e.to_string(),
            file: None,
            path: None,
            field: None,
        }
    }
}

/// A rendered artifact and the exit status to report after writing it.
pub struct Output {
    text: String,
    exit_code: u8,
}

impl Output {
    fn json<S: Serialize>(value: &S) -> Self {
        let mut text = serde_json::to_string_pretty(value).expect("output serializes");
        text.push('\n');
        Output { text, exit_code: 0 }
    }

    fn text(text: String) -> Self {
        Output { text, exit_code: 0 }
    }

    pub fn write(self, target: Option<&Path>) -> Result<u8, CliError> {
        let result = match target {
            Some(p) => fs::write(p, self.text.as_bytes()),
            None => std::io::stdout().lock().write_all(self.text.as_bytes()),
        };
        result.map_err(|e| CliError::validation("io", e.to_string()))?;
        Ok(self.exit_code)
    }
}

macro_rules! by_mode {
    ($mode:expr, $f:ident($($arg:expr),* $(,)?)) => {
        match $mode {
            ScalarMode::Exact => $f::<Rational>($($arg),*),
            ScalarMode::Float => $f::<f64>($($arg),*),
        }
    };
}

fn read_json<D: serde::de::DeserializeOwned>(path: &Path) -> Result<D, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError {
        file: Some(path.display().to_string()),
        ..CliError::validation("io", e.to_string())
    })?;
    from_json(&text).map_err(|e| CliError::parse(path, e))
}

fn number(field: &str, text: &str) -> Result<Number, CliError> {
    text.parse().map_err(|e| CliError::field(field, e))
}

pub fn json_only(format: Option<Format>, command: &str) -> Result<(), CliError> {
    match format {
        Some(Format::Csv) => Err(CliError::validation(
            "usage",
            format!("`{command}` has no CSV output"),
        )),
        _ => Ok(()),
    }
}

#[derive(Serialize)]
struct Components {
    phi: Vec<String>,
    psi: Vec<String>,
}

impl Components {
    fn of<T: Scalar>(law: &TwoStateLaw<T>) -> Self {
        Components {
            phi: reprs(law.phi().moments()),
            psi: reprs(law.psi().moments()),
        }
    }
}

#[derive(Serialize)]
struct CumulantsOut<'a> {
    mode: ScalarMode,
    order: usize,
    input: &'a PairSpec,
    #[serde(rename = "R")]
    big_r: Vec<String>,
    r: Vec<String>,
}

pub fn cumulants(mode: ScalarMode, path: &Path, order: usize) -> Result<Output, CliError> {
    let spec: PairSpec = read_json(path)?;
    by_mode!(mode, cumulants_impl(&spec, order))
}

fn cumulants_impl<T: Scalar>(spec: &PairSpec, order: usize) -> Result<Output, CliError> {
    let law = spec.law::<T>(order)?;
    Ok(Output::json(&CumulantsOut {
        mode: T::MODE,
        order,
        input: spec,
        big_r: reprs(cumulants_via_series(&law).values()),
        r: reprs(free_cumulants(law.psi()).values()),
    }))
}

#[derive(Serialize)]
struct ConvolveOut<'a> {
    mode: ScalarMode,
    order: usize,
    route: &'static str,
    inputs: [&'a PairSpec; 2],
    #[serde(flatten)]
    result: Components,
    #[serde(skip_serializing_if = "Option::is_none")]
    analytic: Option<Components>,
    #[serde(skip_serializing_if = "Option::is_none")]
    routes_agree: Option<bool>,
}

pub fn convolve(
    mode: ScalarMode,
    left: &Path,
    right: &Path,
    route: Route,
    order: usize,
) -> Result<Output, CliError> {
    let a: PairSpec = read_json(left)?;
    let b: PairSpec = read_json(right)?;
    by_mode!(mode, convolve_impl(&a, &b, route, order))
}

fn convolve_impl<T: Scalar>(
    a: &PairSpec,
    b: &PairSpec,
    route: Route,
    order: usize,
) -> Result<Output, CliError> {
    let p = a.law::<T>(order)?;
    let q = b.law::<T>(order)?;
    let (name, result, analytic, agree) = match route {
        Route::Cumulant => ("cumulant", c_convolve(&p, &q)?, None, None),
        Route::Analytic => ("analytic", c_convolve_analytic(&p, &q)?, None, None),
        Route::Both => {
            let c = c_convolve(&p, &q)?;
            let an = c_convolve_analytic(&p, &q)?;
            let agree = c.approx_eq(&an, FLOAT_TOL);
            ("both", c, Some(Components::of(&an)), Some(agree))
        }
    };
    Ok(Output::json(&ConvolveOut {
        mode: T::MODE,
        order,
        route: name,
        inputs: [a, b],
        result: Components::of(&result),
        analytic,
        routes_agree: agree,
    }))
}

#[derive(Serialize)]
struct LahaLukacsOut<'a> {
    mode: ScalarMode,
    order: usize,
    case: &'static str,
    nu: &'a LawSpec,
    a: String,
    b: String,
    c: String,
    #[serde(flatten)]
    law: Components,
    #[serde(rename = "R")]
    big_r: Vec<String>,
    /// ψ-moments of `S = X + Y`.
    m_s: Vec<String>,
    /// φ-moments of `S` from the regression transform of `m_s`.
    #[serde(rename = "M_S")]
    big_m_s: Vec<String>,
    /// φ-moments of `S` from the c-convolution.
    #[serde(rename = "M_S_convolution")]
    big_m_s_convolution: Vec<String>,
    transform_matches_convolution: bool,
    phi_hankel_min_eigenvalue: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    residuals: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    regression_holds: Option<bool>,
}

pub fn laha_lukacs(
    mode: ScalarMode,
    nu: &Path,
    a: &str,
    b: &str,
    case: Case,
    check: Option<usize>,
    order: usize,
) -> Result<Output, CliError> {
    let spec: LawSpec = read_json(nu)?;
    let a = number("a", a)?;
    let b = number("b", b)?;
    by_mode!(mode, laha_lukacs_impl(&spec, &a, &b, case, check, order))
}

fn laha_lukacs_impl<T: Scalar>(
    spec: &LawSpec,
    a: &Number,
    b: &Number,
    case: Case,
    check: Option<usize>,
    order: usize,
) -> Result<Output, CliError> {
    let nu = spec.moments::<T>(order)?;
    let (a, b): (T, T) = (a.get(), b.get());
    let c = c_from_b(&b).map_err(|e| CliError::field("b", e))?;
    let params = RegressionParams::with_c(a.clone(), b.clone(), c.clone())
        .map_err(|e| CliError::field("b", e))?;
    let (name, law) = match case {
        Case::Constant => ("constant", constant_variance_phi_law(&nu)?),
        Case::Linear => ("linear", linear_variance_phi_law(&nu, &a)?),
    };
    let m_s = free_convolve(&nu, &nu)?;
    let big_m_s = mmm_transform(&m_s, &params)?;
    let conv = c_convolve(&law, &law)?;
    let residuals = match check {
        Some(n_max) => Some(regression_residuals(&duplicate_pair(&law), &params, n_max)?),
        None => None,
    };
    Ok(Output::json(&LahaLukacsOut {
        mode: T::MODE,
        order,
        case: name,
        nu: spec,
        a: a.to_repr(),
        b: b.to_repr(),
        c: c.to_repr(),
        big_r: reprs(cumulants_via_series(&law).values()),
        law: Components::of(&law),
        m_s: reprs(m_s.moments()),
        transform_matches_convolution: big_m_s.approx_eq(conv.phi(), FLOAT_TOL),
        big_m_s: reprs(big_m_s.moments()),
        big_m_s_convolution: reprs(conv.phi().moments()),
        phi_hankel_min_eigenvalue: law.phi().hankel_min_eigenvalue(),
        regression_holds: residuals
            .as_ref()
            .map(|r| r.iter().all(|v| v.approx_eq(&T::zero(), FLOAT_TOL))),
        residuals: residuals.map(|r| reprs(&r)),
    }))
}

pub struct CltArgs {
    pub laws: PathBuf,
    pub n_list: Vec<usize>,
    pub max_moment: usize,
    pub nu: Option<PathBuf>,
    pub s: Option<String>,
    pub big_s: Option<String>,
    pub normalization: Normalization,
}

#[derive(Serialize)]
#[serde(bound = "")]
struct CltOut<'a, T: Scalar> {
    mode: ScalarMode,
    normalization: State,
    input: &'a SequenceFile,
    limit: Vec<String>,
    rows: Vec<ConvergenceRow<T>>,
}

pub fn clt(mode: ScalarMode, format: Option<Format>, args: &CltArgs) -> Result<Output, CliError> {
    let mut file: SequenceFile = read_json(&args.laws)?;
    if let Some(p) = &args.nu {
        file.nu = Some(read_json(p)?);
    }
    if let Some(s) = &args.s {
        file.s = Some(number("s", s)?);
    }
    if let Some(s) = &args.big_s {
        file.big_s = Some(number("S", s)?);
    }
    if args.n_list.is_empty() || args.n_list.contains(&0) {
        return Err(CliError::validation(
            "usage",
            "--n-list needs positive sizes",
        ));
    }
    by_mode!(mode, clt_impl(&file, format, args))
}

fn clt_impl<T: Scalar>(
    file: &SequenceFile,
    format: Option<Format>,
    args: &CltArgs,
) -> Result<Output, CliError> {
    let missing = |f: &str| {
        CliError::validation(
            "usage",
            format!("`{f}` is given neither on the command line nor in the sequence file"),
        )
    };
    let nu = file.nu.as_ref().ok_or_else(|| missing("nu"))?;
    let s: T = file.s.as_ref().ok_or_else(|| missing("s"))?.get();
    let big_s: T = file.big_s.as_ref().ok_or_else(|| missing("S"))?.get();
    let order = args.max_moment;
    let spec = file.spec::<T>(order)?;
    let limit = clt_limit_law(&nu.moments::<T>(order)?, &s, &big_s, order)?;
    let normalization = match args.normalization {
        Normalization::Phi => State::Phi,
        Normalization::Psi => State::Psi,
    };
    let rows = convergence_table(&spec, &limit, &args.n_list, order, normalization)?;
    if format == Some(Format::Json) {
        return Ok(Output::json(&CltOut {
            mode: T::MODE,
            normalization,
            input: file,
            limit: reprs(limit.moments()),
            rows,
        }));
    }
    let mut csv = String::from("n,moment,normalized,limit,abs_error\n");
    for r in &rows {
        let value = match &r.normalized {
            Moment::Exact(v) => v.to_repr(),
            Moment::Float(v) => v.to_repr(),
        };
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            r.n,
            r.k,
            value,
            r.limit.to_repr(),
            r.abs_error.to_repr()
        ));
    }
    Ok(Output::text(csv))
}

#[derive(Serialize)]
struct ConditionAOut<'a> {
    mode: ScalarMode,
    source: &'a str,
    #[serde(flatten)]
    moment_form: ConditionAReport,
    cumulant_form: ConditionAReport,
    forms_agree: bool,
}

fn default_law() -> PairSpec {
    let atoms = |v: &[(i64, i64, i64)]| LawSpec::Atomic {
        atoms: v
            .iter()
            .map(|&(p, q, x)| {
                (
                    Number(Rational::new(p.into(), q.into())),
                    Number(Rational::from_integer(x.into())),
                )
            })
            .collect(),
    };
    PairSpec::Pair {
        phi: atoms(&[(3, 4, -1), (1, 4, 3)]),
        psi: atoms(&[(2, 3, -1), (1, 3, 2)]),
    }
}

pub fn check_condition_a(
    mode: ScalarMode,
    source: &str,
    law: Option<&Path>,
    max_order: usize,
) -> Result<Output, CliError> {
    let law = match law {
        Some(p) => read_json(p)?,
        None => default_law(),
    };
    let table = match source.strip_prefix("oracle:") {
        Some(file) => Some(read_json::<TableOracleSpec>(Path::new(file))?),
        None if source == "free" || source == "classical" => None,
        None => {
            return Err(CliError::validation(
                "usage",
                format!("unknown source `{source}` (expected free, classical or oracle:<file>)"),
            ))
        }
    };
    by_mode!(
        mode,
        condition_a_impl(source, &law, table.as_ref(), max_order)
    )
}

fn condition_a_impl<T: Scalar>(
    source: &str,
    law: &PairSpec,
    table: Option<&TableOracleSpec>,
    m: usize,
) -> Result<Output, CliError> {
    let oracle: Box<dyn PatternOracle<T>> = match table {
        Some(spec) => Box::new(TableOracle::<T>::from_spec(spec)?),
        None => {
            let law = law.law::<T>(m.max(2))?;
            if source == "free" {
                Box::new(FreeOracle::new(&law, m)?)
            } else {
                Box::new(ClassicalOracle::new(&law))
            }
        }
    };
    let moment_form = check_moment_form(&mut PatternSource::new(oracle.as_ref()), m)?;
    let cumulant_form = check_condition_a_cumulants(&mut PatternSource::new(oracle.as_ref()), m)?;
    Ok(Output::json(&ConditionAOut {
        mode: T::MODE,
        source,
        forms_agree: forms_agree(&moment_form, &cumulant_form),
        moment_form,
        cumulant_form,
    }))
}

#[derive(Serialize)]
struct GridOut<'a> {
    form: &'a str,
    param: f64,
    eps: f64,
    points: Vec<DensityPoint>,
}

pub fn cauchy_grid(
    format: Option<Format>,
    form: &str,
    param: f64,
    from: f64,
    to: f64,
    points: usize,
    eps: f64,
) -> Result<Output, CliError> {
    let closed = ClosedForm::from_id(form, param)?;
    if points == 0 || !from.is_finite() || !to.is_finite() || from > to {
        return Err(CliError::validation(
            "usage",
            "the grid needs finite bounds from <= to and at least one point",
        ));
    }
    let step = if points > 1 {
        (to - from) / (points - 1) as f64
    } else {
        0.0
    };
    let grid: Vec<f64> = (0..points).map(|i| from + step * i as f64).collect();
    let values = density_grid(&closed, &grid, eps)?;
    if format == Some(Format::Json) {
        return Ok(Output::json(&GridOut {
            form,
            param,
            eps,
            points: values,
        }));
    }
    let mut csv = String::from("x,re_G,im_G,density\n");
    for p in &values {
        csv.push_str(&format!(
            "{:?},{:?},{:?},{:?}\n",
            p.x, p.re_g, p.im_g, p.density
        ));
    }
    Ok(Output::text(csv))
}

pub fn selftest(format: Option<Format>, fault: Option<&str>) -> Result<Output, CliError> {
    let report =
        cfree::selftest::selftest(fault).map_err(|e| CliError::field("inject-fault", e))?;
    let mut out = match format {
        Some(Format::Json) => Output::json(&report),
        Some(Format::Csv) => {
            return Err(CliError::validation(
                "usage",
                "`selftest` has no CSV output",
            ))
        }
        None => Output::text(report.to_string()),
    };
    if !report.passed {
        out.exit_code = 2;
    }
    Ok(out)
}
