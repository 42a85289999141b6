//! Command-line front door: file I/O, subcommand dispatch, verification
//! suites, and report emission.
//!
//! Exit codes: 0 success, 1 check failure or internal error, 2 usage or
//! parse error, 3 recovery precondition failure (the variance is not of
//! lattice type).

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use varfun::algebra::{poly_parse, series_parse, ExponentVector, SeriesVector};
use varfun::catalog::{self, CasalisFamily};
use varfun::group::GroupElement;
use varfun::lagrange::{lagrange_coefficient_table, LagrangeProblem};
use varfun::recover::{recover_measure, RecoverError};
use varfun::rouques::{HElement, Semigroup, TiltedDensity};
use varfun::suites::{self, CheckOutcome};
use varfun::transform::{transform_variance, VarianceSpec};

#[derive(Parser)]
#[command(name = "varfun", version, about = "Group actions on variance functions of natural exponential families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply the transform T_g to a variance file.
    Transform {
        /// Variance spec JSON file.
        #[arg(long)]
        variance: PathBuf,
        /// Group element JSON file.
        #[arg(long)]
        group: PathBuf,
        /// Output path (variance JSON when polynomial, rational-matrix JSON otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Assert the cubic degree bound on the output and report pass/fail.
        #[arg(long)]
        check_degree: bool,
    },
    /// Multiply two group element files (g1 * g2).
    Compose {
        #[arg(long)]
        g1: PathBuf,
        #[arg(long)]
        g2: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a univariate polynomial of degree <= 3 by its cubic orbit.
    ClassifyCubic {
        /// Polynomial in m1, e.g. "m1 - m1^2".
        #[arg(long)]
        poly: String,
    },
    /// Emit a catalog representative as a variance file.
    Catalog {
        /// Family tag: I, II, III, IV, V (or I_2 / IV_1 style).
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        /// Index for the I_k / IV_k families.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover the lattice measure generated by a variance function.
    Recover {
        #[arg(long)]
        variance: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_degree: u32,
        /// Output TSV (columns k_1..k_n, mu_numerator, mu_denominator).
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve a Lagrange inversion problem and emit the coefficient table.
    Lagrange {
        /// Semicolon-separated component expressions, e.g. "exp(z1);1+z2".
        #[arg(long)]
        g: String,
        /// Optional weight expression (default 1).
        #[arg(long)]
        g0: Option<String>,
        #[arg(long, default_value_t = 8)]
        max_degree: u32,
        /// Output TSV (columns k_1..k_n, numerator, denominator); stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a tilted-density mass table.
    Rouques {
        /// poisson or negbinomial.
        #[arg(long)]
        semigroup: String,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Comma-separated tilt vector c.
        #[arg(long, default_value = "0")]
        c: String,
        /// Comma-separated p vector (negbinomial only).
        #[arg(long)]
        p: Option<String>,
        #[arg(long, default_value_t = 50)]
        kmax: u32,
        /// Output TSV (columns k_1..k_n, mass); stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the tilted-density residual checks and emit a JSON report.
    RouquesCheck {
        /// convolution, cumulant, or normalization.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite and emit a JSON report.
    Verify {
        /// composition, prop34, theorem52, theorem54, lagrange, recover, rouques, or all.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }

    fn precondition(message: impl Into<String>) -> Self {
        CliError {
            code: 3,
            message: message.into(),
        }
    }
}

#[derive(Serialize)]
struct RunReport {
    command: String,
    inputs: BTreeMap<String, String>,
    results: Vec<ResultRow>,
    wall_ms: u128,
}

#[derive(Serialize)]
struct ResultRow {
    name: String,
    status: String,
    detail: String,
}

impl RunReport {
    fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            results: Vec::new(),
            wall_ms: 0,
        }
    }

    fn input(&mut self, key: &str, value: impl Into<String>) {
        self.inputs.insert(key.to_string(), value.into());
    }

    fn absorb(&mut self, outcomes: Vec<CheckOutcome>) {
        for o in outcomes {
            self.results.push(ResultRow {
                name: o.name,
                status: if o.passed { "pass" } else { "fail" }.into(),
                detail: o.detail,
            });
        }
    }

    fn finish(mut self, started: Instant) -> (String, bool) {
        self.wall_ms = started.elapsed().as_millis();
        self.results.sort_by(|a, b| a.name.cmp(&b.name));
        let ok = self.results.iter().all(|r| r.status != "fail");
        (
            serde_json::to_string_pretty(&self).expect("serializable report"),
            ok,
        )
    }
}

fn fnv64(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

fn read_file(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: Option<&PathBuf>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| CliError::internal(format!("cannot write {}: {e}", p.display()))),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Transform {
            variance,
            group,
            out,
            check_degree,
        } => cmd_transform(variance, group, out, check_degree),
        Command::Compose { g1, g2, out } => cmd_compose(g1, g2, out),
        Command::ClassifyCubic { poly } => cmd_classify(&poly),
        Command::Catalog { family, n, k, out } => cmd_catalog(&family, n, k, out),
        Command::Recover {
            variance,
            max_degree,
            out,
        } => cmd_recover(variance, max_degree, out),
        Command::Lagrange {
            g,
            g0,
            max_degree,
            out,
        } => cmd_lagrange(&g, g0.as_deref(), max_degree, out),
        Command::Rouques {
            semigroup,
            lambda,
            c,
            p,
            kmax,
            out,
        } => cmd_rouques(&semigroup, lambda, &c, p.as_deref(), kmax, out),
        Command::RouquesCheck { suite, seed, out } => cmd_rouques_check(&suite, seed, out),
        Command::Verify { suite, seed, cases } => cmd_verify(&suite, seed, cases),
    }
}

fn cmd_transform(
    variance: PathBuf,
    group: PathBuf,
    out: Option<PathBuf>,
    check_degree: bool,
) -> Result<u8, CliError> {
    let started = Instant::now();
    let v_text = read_file(&variance)?;
    let g_text = read_file(&group)?;
    let v = VarianceSpec::from_json(&v_text).map_err(|e| CliError::usage(e.to_string()))?;
    let g = GroupElement::from_json(&g_text).map_err(|e| CliError::usage(e.to_string()))?;
    if g.dim() != v.dim() {
        return Err(CliError::usage(format!(
            "dimension mismatch: variance has n={}, group element has n={}",
            v.dim(),
            g.dim()
        )));
    }
    let mut report = RunReport::new("transform");
    report.input("variance", fnv64(v_text.as_bytes()));
    report.input("group", fnv64(g_text.as_bytes()));
    let r = transform_variance(&g, &v).map_err(|e| CliError::internal(e.to_string()))?;
    let lowered = r.lower();
    let (content, polynomial, degree) = match &lowered {
        Ok(p) => (
            VarianceSpec::new(p.clone(), v.mean_domain.clone()).to_json(),
            true,
            p.total_degree(),
        ),
        Err(_) => (r.to_json(), false, -1),
    };
    write_output(out.as_ref(), &content)?;
    report.results.push(ResultRow {
        name: "output-form".into(),
        status: "pass".into(),
        detail: if polynomial {
            format!("lowered to a polynomial matrix of total degree {degree}")
        } else {
            "denominator does not divide the numerators; rational matrix emitted".into()
        },
    });
    let mut failed = false;
    if check_degree {
        let ok = polynomial && degree <= 3;
        failed = !ok;
        report.results.push(ResultRow {
            name: "degree-bound".into(),
            status: if ok { "pass" } else { "fail" }.into(),
            detail: if polynomial {
                format!("total degree {degree} (bound 3)")
            } else {
                "output is not polynomial".into()
            },
        });
    }
    let (json, _) = report.finish(started);
    if out.is_some() {
        println!("{json}");
    } else {
        eprintln!("{json}");
    }
    Ok(if failed { 1 } else { 0 })
}

fn cmd_compose(g1: PathBuf, g2: PathBuf, out: Option<PathBuf>) -> Result<u8, CliError> {
    let a = GroupElement::from_json(&read_file(&g1)?).map_err(|e| CliError::usage(e.to_string()))?;
    let b = GroupElement::from_json(&read_file(&g2)?).map_err(|e| CliError::usage(e.to_string()))?;
    if a.dim() != b.dim() {
        return Err(CliError::usage(format!(
            "dimension mismatch: n={} vs n={}",
            a.dim(),
            b.dim()
        )));
    }
    write_output(out.as_ref(), &a.mul(&b).to_json())?;
    Ok(0)
}

fn cmd_classify(poly: &str) -> Result<u8, CliError> {
    let p = poly_parse(poly, 1).map_err(|e| CliError::usage(e.to_string()))?;
    let orbit = catalog::classify_cubic_orbit_n1(&p).map_err(|e| CliError::usage(e.to_string()))?;
    println!("{orbit}");
    Ok(0)
}

fn cmd_catalog(
    family: &str,
    n: usize,
    k: Option<usize>,
    out: Option<PathBuf>,
) -> Result<u8, CliError> {
    let tag = match (CasalisFamily::parse(family), k) {
        (Some(tag), None) => tag,
        (Some(_), Some(_)) => {
            return Err(CliError::usage(
                "give the index either inside the tag (I_2) or via --k, not both",
            ))
        }
        (None, Some(k)) => match family {
            "I" => CasalisFamily::I(k),
            "IV" => CasalisFamily::IV(k),
            _ => return Err(CliError::usage(format!("unknown family '{family}'"))),
        },
        (None, None) => return Err(CliError::usage(format!("unknown family '{family}'"))),
    };
    let v = catalog::casalis_representative(tag, n)
        .map_err(|e| CliError::usage(e.to_string()))?;
    write_output(out.as_ref(), &v.to_json())?;
    Ok(0)
}

fn cmd_recover(variance: PathBuf, max_degree: u32, out: PathBuf) -> Result<u8, CliError> {
    let v_text = read_file(&variance)?;
    let v = VarianceSpec::from_json(&v_text).map_err(|e| CliError::usage(e.to_string()))?;
    let rec = recover_measure(&v, max_degree).map_err(|e| match e {
        RecoverError::NotLatticeType { .. } | RecoverError::NotAnalytic { .. } => {
            CliError::precondition(e.to_string())
        }
        other => CliError::internal(other.to_string()),
    })?;
    for w in &rec.warnings {
        eprintln!("warning: {w}");
    }
    let n = v.dim();
    let mut table = String::new();
    for i in 1..=n {
        table.push_str(&format!("k_{i}\t"));
    }
    table.push_str("mu_numerator\tmu_denominator\n");
    for (k, mu) in rec.measure.iter() {
        for i in 0..n {
            table.push_str(&format!("{}\t", k.get(i)));
        }
        table.push_str(&format!("{}\t{}\n", mu.numer(), mu.denom()));
    }
    std::fs::write(&out, table)
        .map_err(|e| CliError::internal(format!("cannot write {}: {e}", out.display())))?;
    Ok(0)
}

fn cmd_lagrange(
    g: &str,
    g0: Option<&str>,
    max_degree: u32,
    out: Option<PathBuf>,
) -> Result<u8, CliError> {
    let exprs: Vec<&str> = g.split(';').map(str::trim).filter(|s| !s.is_empty()).collect();
    let n = exprs.len();
    if n == 0 {
        return Err(CliError::usage("at least one component expression required"));
    }
    let comps = exprs
        .iter()
        .map(|e| series_parse(e, n, max_degree).map_err(|err| CliError::usage(err.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let gvec = SeriesVector::new(comps).map_err(|e| CliError::usage(e.to_string()))?;
    let g0 = g0
        .map(|e| series_parse(e, n, max_degree).map_err(|err| CliError::usage(err.to_string())))
        .transpose()?;
    let problem = LagrangeProblem::new(gvec, g0).map_err(|e| CliError::usage(e.to_string()))?;
    let table = lagrange_coefficient_table(&problem)
        .map_err(|e| CliError::internal(e.to_string()))?;
    let mut text = String::new();
    for i in 1..=n {
        text.push_str(&format!("k_{i}\t"));
    }
    text.push_str("numerator\tdenominator\n");
    for (k, coeff) in table {
        for i in 0..n {
            text.push_str(&format!("{}\t", k.get(i)));
        }
        text.push_str(&format!("{}\t{}\n", coeff.numer(), coeff.denom()));
    }
    write_output(out.as_ref(), &text)?;
    Ok(0)
}

fn parse_f64_list(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|e| CliError::usage(format!("invalid number '{s}': {e}")))
        })
        .collect()
}

fn cmd_rouques(
    semigroup: &str,
    lambda: f64,
    c: &str,
    p: Option<&str>,
    kmax: u32,
    out: Option<PathBuf>,
) -> Result<u8, CliError> {
    let c = parse_f64_list(c)?;
    let sg = match semigroup {
        "poisson" => Semigroup::Poisson,
        "negbinomial" => {
            let p = parse_f64_list(p.ok_or_else(|| {
                CliError::usage("negbinomial requires --p")
            })?)?;
            Semigroup::neg_binomial(p).map_err(|e| CliError::usage(e.to_string()))?
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown discrete semigroup '{other}' (expected poisson or negbinomial)"
            )))
        }
    };
    let n = sg.dim();
    let h = HElement::from_f64(lambda, &c).map_err(|e| CliError::usage(e.to_string()))?;
    let t = TiltedDensity::new(sg, h).map_err(|e| CliError::usage(e.to_string()))?;
    let mut text = String::new();
    if n == 1 {
        text.push_str("k\tmass\n");
        for e in 0..=kmax {
            let m = t
                .discrete_mass(&ExponentVector::new(vec![e]))
                .map_err(|err| CliError::internal(err.to_string()))?;
            text.push_str(&format!("{e}\t{m:.17e}\n"));
        }
    } else {
        for i in 1..=n {
            text.push_str(&format!("k_{i}\t"));
        }
        text.push_str("mass\n");
        for k in ExponentVector::up_to_degree(n, kmax) {
            let m = t
                .discrete_mass(&k)
                .map_err(|err| CliError::internal(err.to_string()))?;
            for i in 0..n {
                text.push_str(&format!("{}\t", k.get(i)));
            }
            text.push_str(&format!("{m:.17e}\n"));
        }
    }
    write_output(out.as_ref(), &text)?;
    Ok(0)
}

fn cmd_rouques_check(suite: &str, seed: u64, out: Option<PathBuf>) -> Result<u8, CliError> {
    let started = Instant::now();
    let mut report = RunReport::new("rouques-check");
    report.input("suite", suite);
    report.input("seed", seed.to_string());
    let outcomes = rouques_check_suite(suite, seed)?;
    report.absorb(outcomes);
    let (json, ok) = report.finish(started);
    write_output(out.as_ref(), &json)?;
    Ok(if ok { 0 } else { 1 })
}

fn rouques_check_suite(suite: &str, seed: u64) -> Result<Vec<CheckOutcome>, CliError> {
    let all = suites::rouques_suite(seed);
    let filtered: Vec<CheckOutcome> = match suite {
        "convolution" => all
            .into_iter()
            .filter(|o| o.name.contains("convolution") || o.name.contains("quadrature"))
            .collect(),
        "cumulant" => {
            let mut v: Vec<CheckOutcome> = all
                .into_iter()
                .filter(|o| o.name.contains("fixed point"))
                .collect();
            // the multivariate fixed point is part of the cumulant family
            let negbin = varfun::rouques::negbin_z_residual(
                &[0.25, 0.25],
                &[-2.0, -2.5],
                &[0.4, 0.2],
                60,
            )
            .map_err(|e| CliError::internal(e.to_string()))?;
            v.push(CheckOutcome {
                name: "rouques negbinomial fixed point".into(),
                passed: negbin < 1e-6,
                detail: format!("residual {negbin:.3e}"),
            });
            // the functional equation itself, with both sides from their
            // own routes (truncated tilted sum vs closed-form cumulant)
            let t = TiltedDensity::new(
                Semigroup::Poisson,
                HElement::from_f64(2.0, &[0.3])
                    .map_err(|e| CliError::internal(e.to_string()))?,
            )
            .map_err(|e| CliError::internal(e.to_string()))?;
            let eqn = varfun::rouques::cumulant_equation_residual(&t, &[-2.0], 250)
                .map_err(|e| CliError::internal(e.to_string()))?;
            v.push(CheckOutcome {
                name: "rouques cumulant equation (Poisson)".into(),
                passed: eqn < 1e-8,
                detail: format!("residual {eqn:.3e}"),
            });
            v
        }
        "normalization" => all
            .into_iter()
            .filter(|o| o.name.contains("normalization"))
            .collect(),
        other => return Err(CliError::usage(format!("unknown rouques suite '{other}'"))),
    };
    Ok(filtered)
}

fn cmd_verify(suite: &str, seed: u64, cases: usize) -> Result<u8, CliError> {
    let started = Instant::now();
    let mut report = RunReport::new("verify");
    report.input("suite", suite);
    report.input("seed", seed.to_string());
    report.input("cases", cases.to_string());
    let outcomes = match suite {
        "composition" => suites::composition_suite(seed, cases, &[2, 3]),
        "prop34" => suites::symmetry_condition_suite(seed, cases.div_ceil(5), 4),
        "theorem52" => suites::degree_bound_suite(seed, cases.div_ceil(2), &[1, 2, 3]),
        "theorem54" => suites::orbit_witness_suite(&[1, 2, 3], &[(2, 1), (3, 1), (3, 2)]),
        "lagrange" => suites::lagrange_suite(seed, cases.div_ceil(2)),
        "recover" => suites::recover_suite(8),
        "rouques" => suites::rouques_suite(seed),
        "all" => {
            let mut v = Vec::new();
            v.extend(suites::composition_suite(seed, cases, &[2, 3]));
            v.extend(suites::symmetry_condition_suite(seed, cases.div_ceil(5), 4));
            v.extend(suites::degree_bound_suite(seed, cases.div_ceil(2), &[1, 2, 3]));
            v.extend(suites::orbit_witness_suite(&[1, 2, 3], &[(2, 1), (3, 1), (3, 2)]));
            v.extend(suites::lagrange_suite(seed, cases.div_ceil(2)));
            v.extend(suites::recover_suite(8));
            v.extend(suites::rouques_suite(seed));
            v.extend(suites::cubic_classifier_suite(seed, cases));
            v.extend(suites::rank_one_suite(seed, 2 * cases, cases.div_ceil(2)));
            v.extend(suites::kendall_abel_suite());
            v.extend(suites::pointwise_cross_check_suite(seed, cases.div_ceil(2)));
            v
        }
        other => return Err(CliError::usage(format!("unknown suite '{other}'"))),
    };
    report.absorb(outcomes);
    let (json, ok) = report.finish(started);
    println!("{json}");
    Ok(if ok { 0 } else { 1 })
}
