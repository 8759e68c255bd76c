//! Command-line front end. [`run`] is the whole program; `main` only wires
//! it to the process streams.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use asmbridge::bridge::{self, OrderReport, Status};
use asmbridge::chmodel::{self, ChCase, LineCheck};
use asmbridge::fdb::fdb_qderiv_at0;
use asmbridge::model::parse_model;
use asmbridge::numlab::{self, EvalPoint, ResidualProfile};
use asmbridge::sample::random_pdes;
use asmbridge::seriesgen::{
    check_linearity, generate_ahsm_raw, generate_ahsm_rearranged, generate_asm, qderiv_at0, rearrange, Hierarchy,
    HierarchyKind, PerturbedPde,
};
use asmbridge::symcore::latex::to_latex;
use asmbridge::symcore::rational::{format_significant, parse_rational};
use asmbridge::symcore::normalize;
use asmbridge::{Error, Rational};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn case_arg(s: &str) -> Result<ChCase, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn kind_arg(s: &str) -> Result<HierarchyKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "asmbridge", version, about = "Perturbation hierarchies and homotopy series for perturbed PDEs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
    Latex,
}

#[derive(Args, Debug, Clone)]
struct Source {
    /// Built-in case: ch-generic, ch-inv-u or ch-linear-u.
    #[arg(long, value_parser = case_arg, default_value = "ch-generic")]
    case: ChCase,
    /// Model file; overrides --case.
    #[arg(long)]
    model: Option<PathBuf>,
}

impl Source {
    fn pde(&self) -> Result<PerturbedPde, Error> {
        match &self.model {
            Some(path) => {
                let src = fs::read_to_string(path)
                    .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
                Ok(parse_model(&src)?.pde)
            }
            None => Ok(chmodel::ch_pde(self.case)),
        }
    }
}

#[derive(Args, Debug, Clone)]
struct PointArgs {
    #[arg(long, value_parser = rational, default_value = "1")]
    x: Rational,
    #[arg(long, value_parser = rational, default_value = "0.1")]
    t: Rational,
    #[arg(long, value_parser = rational, default_value = "0.01")]
    eps: Rational,
    #[arg(long, value_parser = rational, default_value = "1")]
    q: Rational,
    /// Wave speed for ch-inv-u.
    #[arg(long, value_parser = rational, default_value = "1", allow_hyphen_values = true)]
    a: Rational,
}

impl PointArgs {
    fn point(&self, theta: Rational) -> EvalPoint {
        EvalPoint {
            x: self.x.clone(),
            t: self.t.clone(),
            eps: self.eps.clone(),
            q: self.q.clone(),
            theta,
            a: self.a.clone(),
        }
    }
}

#[derive(Args, Debug, Clone)]
struct GridArgs {
    #[arg(long, value_parser = rational, default_value = "0")]
    theta_min: Rational,
    #[arg(long, value_parser = rational, default_value = "0.999")]
    theta_max: Rational,
    #[arg(long, value_parser = rational, default_value = "0.001")]
    step: Rational,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a generated hierarchy.
    Hierarchy {
        #[command(flatten)]
        source: Source,
        /// asm, ahsm-raw or ahsm.
        #[arg(long, value_parser = kind_arg, default_value = "ahsm")]
        kind: HierarchyKind,
        #[arg(long, default_value_t = 3)]
        order: usize,
        /// Multiply equation i by i!.
        #[arg(long)]
        paper_form: bool,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Run one of the verification suites.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
    /// Homotopy series obtained from a built-in ASM solution.
    Transform {
        #[arg(long, value_parser = case_arg)]
        case: ChCase,
        #[arg(long, value_parser = rational)]
        theta: Option<Rational>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Exact residual of a homotopy series at one point.
    Residual {
        #[arg(long, value_parser = case_arg)]
        case: ChCase,
        #[arg(long, value_parser = rational)]
        theta: Rational,
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Residual over a theta grid, as CSV.
    Sweep {
        #[arg(long, value_parser = case_arg)]
        case: ChCase,
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Grid search plus golden-section refinement of |residual| over theta.
    Optimize {
        #[arg(long, value_parser = case_arg)]
        case: ChCase,
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_parser = rational, default_value = "0.000001")]
        width: Rational,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Generator coefficient differences under the alternate map.
    OperatorCheck {
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[arg(long, value_parser = rational)]
        theta: Option<Rational>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

#[derive(Subcommand, Debug)]
enum Suite {
    /// Equation n is affine-linear in u_n.
    Lemma1 {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 4)]
        order: usize,
        /// Also check this many random polynomial models.
        #[arg(long, default_value_t = 0)]
        random: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Theta-only map on the E0 q-derivatives.
    Lemma2 {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 4)]
        order: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Row operations on the raw homotopy hierarchy against the closed form.
    Rearrange {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 4)]
        order: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Mapped and reduced homotopy equations against the scaled ASM ones.
    Theorem1 {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 4)]
        order: usize,
        #[arg(long, value_parser = rational)]
        theta: Option<Rational>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Built-in solutions against the hierarchies and the displayed series.
    Solutions {
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Generated Cahn-Hilliard hierarchy against the displayed lines.
    GoldenCh {
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Faa di Bruno assembly against direct series extraction.
    FdbOracle {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 4)]
        order: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

/// One verdict line.
#[derive(Serialize)]
struct Item {
    label: String,
    status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

impl Item {
    fn new(label: impl Into<String>, ok: bool, detail: Option<String>) -> Item {
        Item {
            label: label.into(),
            status: Status::from_bool(ok),
            detail,
        }
    }
}

impl From<&LineCheck> for Item {
    fn from(c: &LineCheck) -> Item {
        Item {
            label: c.label.clone(),
            status: c.status,
            detail: (c.status == Status::Fail).then(|| format!("residual {}", c.residual_normal_form)),
        }
    }
}

impl From<&OrderReport> for Item {
    fn from(r: &OrderReport) -> Item {
        Item {
            label: format!("order {}", r.order),
            status: r.status,
            detail: (r.status == Status::Fail).then(|| format!("residual {}", r.residual_normal_form)),
        }
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
}

impl Io<'_> {
    fn put(&mut self, s: &str) -> Result<(), Error> {
        self.out
            .write_all(s.as_bytes())
            .map_err(|e| Error::InvalidArgument(format!("write failed: {e}")))
    }
}

fn json<T: Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn verdict(io: &mut Io, items: &[Item], format: Format) -> Result<i32, Error> {
    match format {
        Format::Json => io.put(&json(items))?,
        _ => {
            for it in items {
                let line = match &it.detail {
                    Some(d) => format!("{}: {} ({d})\n", it.label, it.status),
                    None => format!("{}: {}\n", it.label, it.status),
                };
                io.put(&line)?;
            }
        }
    }
    Ok(if items.iter().all(|i| i.status == Status::Pass) {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

fn hierarchy(pde: &PerturbedPde, kind: HierarchyKind, order: usize, paper_form: bool) -> Result<Hierarchy, Error> {
    match kind {
        HierarchyKind::Asm => generate_asm(pde, order, paper_form),
        HierarchyKind::AhsmRaw => generate_ahsm_raw(pde, order, paper_form),
        HierarchyKind::AhsmRearranged => generate_ahsm_rearranged(pde, order, paper_form),
    }
}

fn lemma1_items(pde: &PerturbedPde, order: usize) -> Result<Vec<Item>, Error> {
    let mut items = Vec::new();
    for kind in [HierarchyKind::Asm, HierarchyKind::AhsmRearranged] {
        let h = hierarchy(pde, kind, order, false)?;
        for n in 1..=order {
            let r = check_linearity(&h, n)?;
            let detail = (!r.linear).then(|| format!("degree {:?}", r.degree));
            items.push(Item::new(format!("{} {kind} order {n}", pde.name), r.linear, detail));
        }
    }
    Ok(items)
}

fn execute(cli: Cli, io: &mut Io) -> Result<i32, Error> {
    match cli.command {
        Command::Hierarchy {
            source,
            kind,
            order,
            paper_form,
            format,
        } => {
            let h = hierarchy(&source.pde()?, kind, order, paper_form)?;
            io.put(&match format {
                Format::Text => h.to_text(),
                Format::Json => h.to_json() + "\n",
                Format::Latex => h.to_latex(),
            })?;
            Ok(EXIT_OK)
        }
        Command::Verify { suite } => verify(suite, io),
        Command::Transform { case, theta, format } => {
            let sol = chmodel::homotopy_solution(case, theta.as_ref())?;
            let coeffs: Vec<String> = sol
                .coefficients
                .iter()
                .map(|c| Ok(normalize(c)?.to_string()))
                .collect::<Result<_, Error>>()?;
            let assembled = normalize(&sol.assembled())?;
            match format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct Out {
                        coefficients: Vec<String>,
                        assembled: String,
                    }
                    io.put(&json(&Out {
                        coefficients: coeffs,
                        assembled: assembled.to_string(),
                    }))?;
                }
                Format::Text => {
                    for (l, c) in coeffs.iter().enumerate() {
                        io.put(&format!("u{l} = {c}\n"))?;
                    }
                }
                Format::Latex => {
                    for (l, c) in sol.coefficients.iter().enumerate() {
                        io.put(&format!("u_{{{l}}} = {}\n", to_latex(&normalize(c)?.to_expr())))?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Residual {
            case,
            theta,
            point,
            format,
        } => {
            let r = numlab::residual(case, &point.point(theta.clone()))?;
            match format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct Out {
                        theta: String,
                        residual: String,
                        exact: String,
                    }
                    io.put(&json(&Out {
                        theta: theta.to_string(),
                        residual: format_significant(&r, 17),
                        exact: r.to_string(),
                    }))?;
                }
                _ => io.put(&format!(
                    "theta = {}\nresidual = {}\n",
                    theta,
                    format_significant(&r, 17)
                ))?,
            }
            Ok(EXIT_OK)
        }
        Command::Sweep {
            case,
            point,
            grid,
            out,
            svg,
        } => {
            let profile = ResidualProfile::homotopy(case, &point.point(Rational::from_integer(0.into())), None)?;
            let rows = numlab::sweep(&profile, &grid.theta_min, &grid.theta_max, &grid.step)?;
            let csv = numlab::to_csv(&rows);
            match out {
                Some(path) => write_file(&path, &csv)?,
                None => io.put(&csv)?,
            }
            if let Some(path) = svg {
                write_file(&path, &numlab::to_svg(&rows))?;
            }
            Ok(EXIT_OK)
        }
        Command::Optimize {
            case,
            point,
            grid,
            width,
            format,
        } => {
            let profile = ResidualProfile::homotopy(case, &point.point(Rational::from_integer(0.into())), None)?;
            let res = numlab::optimize_theta(&profile, &grid.theta_min, &grid.theta_max, &grid.step, &width)?;
            match format {
                Format::Json => io.put(&json(&res))?,
                _ => io.put(&format!(
                    "theta* = {} ({})\nresidual = {}\ngrid points = {}\nrefinement iterations = {}\nbracket = [{}, {}]\n",
                    format_significant(&res.theta, 17),
                    res.theta,
                    format_significant(&res.residual, 17),
                    res.grid_points,
                    res.refinement_iterations,
                    res.bracket.0,
                    res.bracket.1
                ))?,
            }
            Ok(EXIT_OK)
        }
        Command::OperatorCheck { order, theta, format } => {
            let rows = bridge::operator_diagnostic(order, theta.as_ref())?;
            match format {
                Format::Json => io.put(&json(&rows))?,
                _ => {
                    for r in &rows {
                        io.put(&format!(
                            "order {}: forward {} | reverse {}\n",
                            r.order, r.forward_difference, r.reverse_difference
                        ))?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
    }
}

fn verify(suite: Suite, io: &mut Io) -> Result<i32, Error> {
    match suite {
        Suite::Lemma1 {
            source,
            order,
            random,
            seed,
            format,
        } => {
            let mut items = lemma1_items(&source.pde()?, order)?;
            for pde in random_pdes(seed, random) {
                items.extend(lemma1_items(&pde, order)?);
            }
            verdict(io, &items, format)
        }
        Suite::Lemma2 { source, order, format } => {
            let pde = source.pde()?;
            let items = (2..=order.max(2))
                .map(|n| {
                    let r = bridge::verify_lemma2(&pde, n)?;
                    let detail = (r.status == Status::Fail).then(|| format!("residual {}", r.residual_normal_form));
                    Ok(Item::new(format!("n = {n}"), r.status == Status::Pass, detail))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            verdict(io, &items, format)
        }
        Suite::Rearrange { source, order, format } => {
            let pde = source.pde()?;
            let (rows, cert) = rearrange(&generate_ahsm_raw(&pde, order, true)?)?;
            let closed = generate_ahsm_rearranged(&pde, order, true)?;
            let items: Vec<Item> = (0..=order)
                .map(|i| {
                    let diff = rows.equations[i].sub(&closed.equations[i]);
                    let mult: Vec<String> = cert.rows[i].iter().map(|(j, m)| format!("eq{j} * {m}")).collect();
                    let detail = if diff.is_zero() {
                        (!mult.is_empty()).then(|| format!("added {}", mult.join(", ")))
                    } else {
                        Some(format!("residual {diff}"))
                    };
                    Item::new(format!("order {i}"), diff.is_zero(), detail)
                })
                .collect();
            verdict(io, &items, format)
        }
        Suite::Theorem1 {
            source,
            order,
            theta,
            format,
        } => {
            let reports = bridge::verify_theorem1(&source.pde()?, order, theta.as_ref())?;
            if format == Format::Json {
                io.put(&json(&reports))?;
                return Ok(if reports.iter().all(|r| r.status == Status::Pass) {
                    EXIT_OK
                } else {
                    EXIT_FAILED
                });
            }
            let items: Vec<Item> = reports.iter().map(Item::from).collect();
            verdict(io, &items, format)
        }
        Suite::Solutions { format } => {
            let mut items = Vec::new();
            for case in [ChCase::InvU, ChCase::LinearU] {
                for c in chmodel::check_asm_solution(case)? {
                    let mut it = Item::from(&c);
                    it.label = format!("{case} asm {}", c.label);
                    items.push(it);
                }
                let c = chmodel::check_homotopy_solution(case)?;
                let mut it = Item::from(&c);
                it.label = format!("{case} homotopy series");
                items.push(it);
            }
            for (label, ok) in chmodel::coefficient_guards() {
                items.push(Item::new(label, ok, None));
            }
            verdict(io, &items, format)
        }
        Suite::GoldenCh { format } => {
            let mut items: Vec<Item> = chmodel::ch_hierarchy_golden_check(3)?.iter().map(Item::from).collect();
            for c in chmodel::theta_map_intermediate_check()? {
                let mut it = Item::from(&c);
                it.label = format!("theta-map reduced {}", c.label);
                items.push(it);
            }
            verdict(io, &items, format)
        }
        Suite::FdbOracle { source, order, format } => {
            let pde = source.pde()?;
            let direct = qderiv_at0(&pde.e0, order)?;
            let items = (1..=order)
                .map(|n| {
                    let oracle = normalize(&fdb_qderiv_at0(&pde.e0, n as u32)?)?;
                    let diff = oracle.sub(&direct[n]);
                    let detail = (!diff.is_zero()).then(|| format!("residual {diff}"));
                    Ok(Item::new(format!("n = {n}"), diff.is_zero(), detail))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            verdict(io, &items, format)
        }
    }
}

fn write_file(path: &PathBuf, content: &str) -> Result<(), Error> {
    fs::write(path, content).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code: 0 success, 1 failed verification, 2 usage or input
/// error.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut io = Io { out };
    match execute(cli, &mut io) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
