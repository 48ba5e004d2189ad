use std::path::{Path, PathBuf};

use serde::Serialize;

use valkit_core::crofton::{kubota_convergence, ConvergencePoint};
use valkit_core::euler::{euler_integral, support_codim};
use valkit_core::fourier2d::{antipode, fourier2d};
use valkit_core::intrinsic::{intrinsic_volume, intrinsic_volumes, kappa, mixed_volume, mixed_volume_interpolation_check, AngleConfig};
use valkit_core::num;
use valkit_core::radon::inversion_check;
use valkit_core::valuation::{hadwiger_fit, Valuation};
use valkit_core::Polytope;

use crate::output::{self, CsvTable};
use crate::schema::{
    ConstructibleJson, DensityJson, PolytopeJson, RadonInputJson, RadonReportJson, ValuationJson, Q,
};
use crate::{read_json, Cli, CliError, Command, Format, Rendered};

/// Executes one command and renders its output.
pub fn run(cli: &Cli) -> Result<Rendered, CliError> {
    match cli.command {
        Command::Intrinsic => intrinsic(cli),
        Command::Crofton => crofton(cli),
        Command::RadonCheck => radon_check(cli),
        Command::Fourier2d => fourier(cli),
        Command::Euler => euler(cli),
        Command::HadwigerFit => hadwiger(cli),
        Command::MixedVolume => mixed(cli),
    }
}

fn single_input(cli: &Cli) -> Result<&Path, CliError> {
    match cli.input.as_slice() {
        [p] => Ok(p),
        [] => Err(CliError::Input("--input is required".into())),
        _ => Err(CliError::Input("this command takes a single --input".into())),
    }
}

fn check_n(cli: &Cli, found: usize) -> Result<(), CliError> {
    match cli.n {
        Some(n) if n != found => Err(CliError::Input(format!("--n {n} does not match input dimension {found}"))),
        _ => Ok(()),
    }
}

fn read_polytope(path: &Path) -> Result<Polytope, CliError> {
    Ok(read_json::<PolytopeJson>(path)?.to_polytope()?)
}

fn angle_config(cli: &Cli) -> AngleConfig {
    AngleConfig { samples: cli.samples.max(1), seed: cli.seed }
}

fn ok(text: String) -> Result<Rendered, CliError> {
    Ok(Rendered { text, breach: None })
}

#[derive(Serialize)]
struct IntrinsicRow {
    i: usize,
    value: f64,
    stderr: f64,
    method: &'static str,
}

#[derive(Serialize)]
struct IntrinsicResult {
    n: usize,
    dim: usize,
    volumes: Vec<IntrinsicRow>,
}

fn intrinsic(cli: &Cli) -> Result<Rendered, CliError> {
    let p = read_polytope(single_input(cli)?)?;
    check_n(cli, p.ambient_dim())?;
    let volumes = intrinsic_volumes(&p, &angle_config(cli))?
        .into_iter()
        .enumerate()
        .map(|(i, e)| IntrinsicRow { i, value: e.value, stderr: e.stderr, method: e.method.as_str() })
        .collect();
    let res = IntrinsicResult { n: p.ambient_dim(), dim: p.dim(), volumes };
    match cli.format {
        Format::Json => ok(output::json(cli, &res)?),
        Format::Csv => {
            let mut t = CsvTable::new(cli)?;
            t.row(["i", "value", "stderr", "method"])?;
            for r in &res.volumes {
                t.row([r.i.to_string(), r.value.to_string(), r.stderr.to_string(), r.method.to_string()])?;
            }
            ok(t.finish())
        }
    }
}

/// Flag coefficient `[a b] = C(a, b) κ_a / (κ_b κ_{a-b})`.
fn flag(a: usize, b: usize) -> f64 {
    num::binomial(a, b) as f64 * kappa(a) / (kappa(b) * kappa(a - b))
}

#[derive(Serialize)]
struct SeriesRow {
    #[serde(rename = "N")]
    n: usize,
    estimate: f64,
    stderr: f64,
}

impl From<&ConvergencePoint> for SeriesRow {
    fn from(p: &ConvergencePoint) -> Self {
        SeriesRow { n: p.samples, estimate: p.estimate, stderr: p.stderr }
    }
}

#[derive(Serialize)]
struct CroftonBody {
    input: PathBuf,
    estimate: f64,
    stderr: f64,
    method: &'static str,
    intrinsic: f64,
    ratio: Option<f64>,
    series: Vec<SeriesRow>,
}

#[derive(Serialize)]
struct CroftonResult {
    n: usize,
    k: usize,
    i: usize,
    /// `E[V_i(K|E)] / V_i(K)` for every body.
    expected_ratio: f64,
    bodies: Vec<CroftonBody>,
}

fn series_sizes(samples: usize) -> Vec<usize> {
    let mut sizes: Vec<usize> = [samples / 100, samples / 10, samples].into_iter().filter(|&s| s >= 2).collect();
    sizes.dedup();
    sizes
}

fn crofton(cli: &Cli) -> Result<Rendered, CliError> {
    if cli.input.is_empty() {
        return Err(CliError::Input("--input is required".into()));
    }
    let bodies: Vec<Polytope> = cli.input.iter().map(|p| read_polytope(p)).collect::<Result<_, _>>()?;
    let n = bodies[0].ambient_dim();
    if let Some(b) = bodies.iter().find(|b| b.ambient_dim() != n) {
        return Err(CliError::Input(format!("bodies live in R^{n} and R^{}", b.ambient_dim())));
    }
    check_n(cli, n)?;
    let k = cli.k.ok_or_else(|| CliError::Input("--k is required".into()))?;
    let i = cli.i.ok_or_else(|| CliError::Input("--i is required".into()))?;
    if k > n {
        return Err(CliError::Input(format!("plane dimension {k} exceeds {n}")));
    }
    if i > k {
        return Err(CliError::Input(format!("degree {i} exceeds plane dimension {k}")));
    }
    let sizes = series_sizes(cli.samples);
    if k < n && sizes.is_empty() {
        return Err(CliError::Input("--samples must be at least 2".into()));
    }
    let cfg = angle_config(cli);
    let mut rows = Vec::new();
    for (path, body) in cli.input.iter().zip(&bodies) {
        let exact = intrinsic_volume(body, i, &cfg)?;
        let (estimate, stderr, method, series) = if k == n {
            (exact.value, exact.stderr, exact.method.as_str(), Vec::new())
        } else {
            let pts = kubota_convergence(body, k, i, &sizes, cli.seed, cli.shards.max(1))?;
            let last = *pts.last().expect("nonempty series");
            (last.estimate, last.stderr, "monte-carlo", pts.iter().map(SeriesRow::from).collect())
        };
        let ratio = (exact.value != 0.0).then(|| estimate / exact.value);
        rows.push(CroftonBody { input: path.clone(), estimate, stderr, method, intrinsic: exact.value, ratio, series });
    }
    let res = CroftonResult { n, k, i, expected_ratio: flag(k, i) / flag(n, i), bodies: rows };
    match cli.format {
        Format::Json => ok(output::json(cli, &res)?),
        Format::Csv => {
            let mut t = CsvTable::new(cli)?;
            t.comment(&format!("expected_ratio {}", res.expected_ratio));
            for b in &res.bodies {
                let ratio = b.ratio.map_or("nan".to_string(), |r| r.to_string());
                t.comment(&format!("body {} intrinsic {} ratio {ratio}", b.input.display(), b.intrinsic));
                t.row(["N", "estimate", "stderr"])?;
                if b.series.is_empty() {
                    t.row(["0".to_string(), b.estimate.to_string(), b.stderr.to_string()])?;
                }
                for s in &b.series {
                    t.row([s.n.to_string(), s.estimate.to_string(), s.stderr.to_string()])?;
                }
            }
            ok(t.finish())
        }
    }
}

fn radon_check(cli: &Cli) -> Result<Rendered, CliError> {
    let f = read_json::<RadonInputJson>(single_input(cli)?)?.to_fn()?;
    check_n(cli, f.n())?;
    let report = inversion_check(&f, cli.points, cli.seed)?;
    let res = RadonReportJson::from(&report);
    let breach = (!res.all_pass).then(|| {
        let failed = res.points.iter().filter(|p| !p.pass).count();
        format!("{failed} of {} points failed the inversion check", res.points.len())
    });
    let text = match cli.format {
        Format::Json => output::json(cli, &res)?,
        Format::Csv => {
            let mut t = CsvTable::new(cli)?;
            t.comment(&format!("n {} integral {} resamples {}", res.n, res.integral.0, res.resamples));
            t.row(["ray", "lhs", "rhs", "pass"])?;
            for p in &res.points {
                let ray: Vec<String> = p.ray.iter().map(|x| x.0.to_string()).collect();
                t.row([ray.join(" "), p.lhs.0.to_string(), p.rhs.0.to_string(), p.pass.to_string()])?;
            }
            t.finish()
        }
    };
    Ok(Rendered { text, breach })
}

#[derive(Serialize)]
struct FourierResult {
    input: DensityJson,
    transform: DensityJson,
    square_is_antipode: bool,
}

fn fourier(cli: &Cli) -> Result<Rendered, CliError> {
    let h = read_json::<DensityJson>(single_input(cli)?)?.to_density()?;
    let fh = fourier2d(&h);
    let square_is_antipode = fourier2d(&fh) == antipode(&h);
    let res = FourierResult { input: (&h).into(), transform: (&fh).into(), square_is_antipode };
    let breach = (!square_is_antipode).then(|| "F^2 differs from the antipodal map".to_string());
    let text = match cli.format {
        Format::Json => output::json(cli, &res)?,
        Format::Csv => {
            let mut t = CsvTable::new(cli)?;
            t.row(["k", "re", "im"])?;
            for c in &res.transform.coeffs {
                t.row([c.k.to_string(), c.re.0.to_string(), c.im.0.to_string()])?;
            }
            t.finish()
        }
    };
    Ok(Rendered { text, breach })
}

#[derive(Serialize)]
struct EulerResult {
    n: usize,
    atoms: usize,
    integral: Q,
    support_codim: Option<usize>,
}

fn euler(cli: &Cli) -> Result<Rendered, CliError> {
    let f = read_json::<ConstructibleJson>(single_input(cli)?)?.to_fn()?;
    check_n(cli, f.ambient_dim())?;
    let res = EulerResult {
        n: f.ambient_dim(),
        atoms: f.atoms().len(),
        integral: Q(euler_integral(&f)),
        support_codim: support_codim(&f),
    };
    match cli.format {
        Format::Json => ok(output::json(cli, &res)?),
        Format::Csv => {
            let mut t = CsvTable::new(cli)?;
            t.row(["n", "atoms", "integral", "support_codim"])?;
            let codim = res.support_codim.map_or(String::new(), |c| c.to_string());
            t.row([res.n.to_string(), res.atoms.to_string(), res.integral.0.to_string(), codim])?;
            ok(t.finish())
        }
    }
}

#[derive(Serialize)]
struct FitResult {
    n: usize,
    coefficients: Vec<f64>,
    stderr: Vec<f64>,
    residual: f64,
}

fn hadwiger(cli: &Cli) -> Result<Rendered, CliError> {
    let spec = read_json::<ValuationJson>(single_input(cli)?)?;
    let phi = match &spec {
        ValuationJson::Intrinsic(c) => {
            let coefs: Vec<_> = c.intrinsic.iter().map(|x| x.0.clone()).collect();
            if coefs.len() != c.n + 1 {
                return Err(CliError::Input(format!("expected {} intrinsic coefficients, found {}", c.n + 1, coefs.len())));
            }
            Valuation::intrinsic_combination(c.n, &coefs, angle_config(cli))?
        }
        ValuationJson::Minkowski(m) => m.to_class()?.to_valuation(),
    };
    check_n(cli, phi.ambient_dim())?;
    let fit = hadwiger_fit(&phi)?;
    let res = FitResult { n: phi.ambient_dim(), coefficients: fit.coefficients, stderr: fit.stderr, residual: fit.residual };
    let breach = (res.residual > cli.tolerance)
        .then(|| format!("fit residual {} exceeds tolerance {}", res.residual, cli.tolerance));
    let text = match cli.format {
        Format::Json => output::json(cli, &res)?,
        Format::Csv => {
            let mut t = CsvTable::new(cli)?;
            t.comment(&format!("residual {}", res.residual));
            t.row(["i", "coefficient", "stderr"])?;
            for (i, (c, s)) in res.coefficients.iter().zip(&res.stderr).enumerate() {
                t.row([i.to_string(), c.to_string(), s.to_string()])?;
            }
            t.finish()
        }
    };
    Ok(Rendered { text, breach })
}

#[derive(Serialize)]
struct MixedResult {
    n: usize,
    mixed_volume: Q,
    interpolation: Q,
    agree: bool,
}

fn mixed(cli: &Cli) -> Result<Rendered, CliError> {
    if cli.input.is_empty() {
        return Err(CliError::Input("--input is required".into()));
    }
    let bodies: Vec<Polytope> = cli.input.iter().map(|p| read_polytope(p)).collect::<Result<_, _>>()?;
    check_n(cli, bodies.len())?;
    let mv = mixed_volume(&bodies)?;
    let interp = mixed_volume_interpolation_check(&bodies, None)?;
    let agree = mv == interp;
    let res = MixedResult { n: bodies.len(), mixed_volume: Q(mv), interpolation: Q(interp), agree };
    let breach = (!agree).then(|| "inclusion-exclusion and interpolation disagree".to_string());
    let text = match cli.format {
        Format::Json => output::json(cli, &res)?,
        Format::Csv => {
            let mut t = CsvTable::new(cli)?;
            t.row(["n", "mixed_volume", "interpolation", "agree"])?;
            t.row([res.n.to_string(), res.mixed_volume.0.to_string(), res.interpolation.0.to_string(), agree.to_string()])?;
            t.finish()
        }
    };
    Ok(Rendered { text, breach })
}
