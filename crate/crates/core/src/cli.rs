//! Command-line front end. Every command renders its report to a string
//! first, so identical arguments give byte-identical output.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::convexroof::{mixed_ed, RoofConfig};
use crate::cvmode::{cat_report, CatSpec, Cutoff};
use crate::error::{Error, Result};
use crate::families::{family_ed_closed_form, fig5_grid, FamilyKind, FamilySpec};
use crate::fsmetric::{entanglement_distance, metric_tensor, optimal_frame, UnitVectorFrame};
use crate::locc::{run_suite, Suite};
use crate::luequiv::{equivalence_test, MatchConfig};
use crate::qstate::{DensityMatrix, PureState, C64};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "entdist", version, about = "Entanglement distance and entanglement metric toolkit")]
pub struct Cli {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entanglement distance, optimal frame and entanglement metric.
    Ed(StateArgs),
    /// Metric tensor in the optimal frame or in a given one.
    Em {
        #[command(flatten)]
        state: StateArgs,
        /// JSON list of unit vectors `[[x,y,z], ...]`, one per qubit.
        #[arg(long)]
        frame: Option<PathBuf>,
    },
    /// Write a state file.
    State(StateArgs),
    /// Local-unitary equivalence test by metric matching.
    Equiv {
        /// State file or family spec `kind:M:p1,p2`.
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        starts: Option<usize>,
        #[arg(long)]
        match_tol: Option<f64>,
    },
    /// Parameter sweep of a state family.
    Family {
        #[arg(long)]
        family: FamilyKind,
        #[arg(long = "M")]
        num_qubits: usize,
        /// Points per swept parameter.
        #[arg(long, default_value_t = 50)]
        points: usize,
        /// Append the flattened metric tensor.
        #[arg(long)]
        em: bool,
    },
    /// Convex-roof entanglement distance of a density matrix.
    Roof {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        ensemble_size: Option<usize>,
    },
    /// Entanglement distance of a symmetric two-mode cat state.
    Cv {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        alpha1: C64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        alpha2: C64,
        #[arg(long)]
        cutoff: Option<usize>,
    },
    /// Randomized property suite.
    Proptest {
        #[arg(long)]
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Three-qubit W-family landscape `E/3` over `[0, pi/2]^2`.
    Fig5 {
        #[arg(long, default_value_t = 101)]
        resolution: usize,
    },
}

/// A state given as a file, a `kind:M:params` spec or separate family flags.
#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    #[arg(long, conflicts_with_all = ["spec", "family"])]
    pub state: Option<PathBuf>,
    #[arg(long, conflicts_with = "family")]
    pub spec: Option<String>,
    #[arg(long)]
    pub family: Option<FamilyKind>,
    #[arg(long = "M")]
    pub num_qubits: Option<usize>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub phi: Option<f64>,
    /// W-state angles; the uniform W state when omitted.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub angles: Vec<f64>,
}

impl StateArgs {
    pub fn resolve(&self) -> Result<PureState> {
        if let Some(path) = &self.state {
            return PureState::from_json(&read(path)?);
        }
        if let Some(spec) = &self.spec {
            return Ok(FamilySpec::from_str(spec)?.state());
        }
        let kind = self.family.ok_or_else(|| Error::invalid("give --state, --spec or --family"))?;
        let m = self.num_qubits.ok_or_else(|| Error::invalid("--family needs --M"))?;
        let spec = match kind {
            FamilyKind::Ghzl => FamilySpec::ghzl(m, self.theta.ok_or_else(|| Error::invalid("ghzl needs --theta"))?)?,
            FamilyKind::Brs => FamilySpec::brs(m, self.phi.ok_or_else(|| Error::invalid("brs needs --phi"))?)?,
            FamilyKind::W if self.angles.is_empty() => FamilySpec::w_uniform(m)?,
            FamilyKind::W => FamilySpec::w(m, self.angles.clone())?,
        };
        Ok(spec.state())
    }
}

fn parse_complex(s: &str) -> std::result::Result<C64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("bad number '{x}' in '{s}'"));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected re,im but got '{s}'")),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))
}

fn load_state_or_spec(s: &str) -> Result<PureState> {
    let path = Path::new(s);
    if path.is_file() {
        PureState::from_json(&read(path)?)
    } else {
        Ok(FamilySpec::from_str(s)?.state())
    }
}

/// Fixed 17-significant-digit formatting for CSV cells.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn csv(header: &[String], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Rendered report plus whether a property check failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output: String,
    pub violation: bool,
}

impl From<String> for Outcome {
    fn from(output: String) -> Self {
        Self { output, violation: false }
    }
}

#[derive(Serialize)]
struct EmJson {
    schema_version: u32,
    frame: Vec<[f64; 3]>,
    em: Vec<Vec<f64>>,
    trace: f64,
}

#[derive(Serialize)]
struct Fig5Json {
    schema_version: u32,
    resolution: usize,
    max_ed_per_qubit: f64,
    argmax: [f64; 2],
    points: Vec<crate::families::GridPoint>,
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let fmt = cli.format;
    Ok(match &cli.command {
        Command::Ed(args) => {
            let rep = entanglement_distance(&args.resolve()?);
            match fmt {
                Format::Json => json(&rep.to_json()),
                Format::Csv => {
                    let mut header = vec!["E".to_string()];
                    header.extend(numbered("E_", rep.num_qubits()));
                    let mut row = vec![fmt_num(rep.total)];
                    row.extend(rep.per_qubit.iter().map(|&x| fmt_num(x)));
                    csv(&header, &[row])
                }
            }
            .into()
        }
        Command::Em { state, frame } => {
            let psi = state.resolve()?;
            let frame = match frame {
                Some(p) => serde_json::from_str::<UnitVectorFrame>(&read(p)?)
                    .map_err(|e| Error::Parse(format!("frame file line {} column {}: {e}", e.line(), e.column())))?,
                None => optimal_frame(&psi).0,
            };
            let em = metric_tensor(&psi, &frame)?;
            match fmt {
                Format::Json => json(&EmJson {
                    schema_version: SCHEMA_VERSION,
                    frame: frame.vectors().to_vec(),
                    em: em.rows(),
                    trace: em.trace(),
                }),
                Format::Csv => {
                    let rows: Vec<Vec<String>> =
                        em.rows().iter().map(|r| r.iter().map(|&x| fmt_num(x)).collect()).collect();
                    csv(&numbered("g_", em.dim()), &rows)
                }
            }
            .into()
        }
        Command::State(args) => {
            let mut s = args.resolve()?.to_json();
            s.push('\n');
            s.into()
        }
        Command::Equiv { a, b, restarts, starts, match_tol } => {
            let mut cfg = MatchConfig { seed: cli.seed, ..Default::default() };
            if let Some(r) = restarts {
                cfg.restarts = *r;
            }
            if let Some(s) = starts {
                cfg.starts = *s;
            }
            if let Some(t) = match_tol {
                cfg.match_tol = *t;
            }
            let rep = equivalence_test(&load_state_or_spec(a)?, &load_state_or_spec(b)?, &cfg)?;
            match fmt {
                Format::Json => json(&rep),
                Format::Csv => csv(
                    &["status", "witnesses_tested", "min_residual", "max_residual"].map(String::from),
                    &[vec![
                        serde_json::to_value(rep.status).expect("status").as_str().unwrap_or_default().to_string(),
                        rep.witnesses_tested.to_string(),
                        rep.min_residual.map(fmt_num).unwrap_or_default(),
                        rep.max_residual.map(fmt_num).unwrap_or_default(),
                    ]],
                ),
            }
            .into()
        }
        Command::Family { family, num_qubits, points, em } => family_sweep(*family, *num_qubits, *points, *em, fmt)?.into(),
        Command::Roof { rho, restarts, ensemble_size } => {
            let rho = DensityMatrix::from_json(&read(rho)?)?;
            let mut cfg = RoofConfig { seed: cli.seed, ensemble_size: *ensemble_size, ..Default::default() };
            if let Some(r) = restarts {
                cfg.restarts = *r;
            }
            let rep = mixed_ed(&rho, &cfg)?;
            match fmt {
                Format::Json => json(&rep),
                Format::Csv => {
                    let header = ["qubit", "value", "eigen_bound", "rank", "ensemble_size", "restarts", "best_restart", "evaluations"]
                        .map(String::from);
                    let rows: Vec<Vec<String>> = rep
                        .per_qubit
                        .iter()
                        .map(|r| {
                            vec![
                                r.qubit.to_string(),
                                fmt_num(r.value),
                                fmt_num(r.eigen_bound),
                                r.rank.to_string(),
                                r.ensemble_size.to_string(),
                                r.restarts.to_string(),
                                r.best_restart.to_string(),
                                r.evaluations.to_string(),
                            ]
                        })
                        .collect();
                    csv(&header, &rows)
                }
            }
            .into()
        }
        Command::Cv { alpha1, alpha2, cutoff } => {
            let spec = CatSpec::new(*alpha1, *alpha2)?;
            let rep = cat_report(&spec, cutoff.map_or(Cutoff::Auto, Cutoff::Fixed))?;
            match fmt {
                Format::Json => json(&rep),
                Format::Csv => csv(
                    &["alpha1_re", "alpha1_im", "alpha2_re", "alpha2_im", "cutoff", "E", "p", "closed_form", "difference"]
                        .map(String::from),
                    &[vec![
                        fmt_num(rep.alpha1.re),
                        fmt_num(rep.alpha1.im),
                        fmt_num(rep.alpha2.re),
                        fmt_num(rep.alpha2.im),
                        rep.cutoff.to_string(),
                        fmt_num(rep.ed),
                        fmt_num(rep.p),
                        fmt_num(rep.closed_form),
                        fmt_num(rep.difference),
                    ]],
                ),
            }
            .into()
        }
        Command::Proptest { suite, trials } => {
            let rep = run_suite(*suite, *trials, cli.seed)?;
            let output = match fmt {
                Format::Json => json(&rep),
                Format::Csv => csv(
                    &["suite", "trials", "violations", "worst_margin", "tolerance", "seed"].map(String::from),
                    &[vec![
                        rep.suite.to_string(),
                        rep.trials.to_string(),
                        rep.violations.to_string(),
                        fmt_num(rep.worst_margin),
                        fmt_num(rep.tolerance),
                        rep.seed.to_string(),
                    ]],
                ),
            };
            Outcome { output, violation: !rep.passed() }
        }
        Command::Fig5 { resolution } => {
            let grid = fig5_grid(*resolution)?;
            let best = grid.iter().max_by(|a, b| a.ed_per_qubit.total_cmp(&b.ed_per_qubit)).expect("non-empty grid");
            match fmt {
                Format::Json => json(&Fig5Json {
                    schema_version: SCHEMA_VERSION,
                    resolution: *resolution,
                    max_ed_per_qubit: best.ed_per_qubit,
                    argmax: [best.theta1, best.theta2],
                    points: grid.clone(),
                }),
                Format::Csv => {
                    let rows: Vec<Vec<String>> = grid
                        .iter()
                        .map(|p| vec![fmt_num(p.theta1), fmt_num(p.theta2), fmt_num(p.ed_per_qubit)])
                        .collect();
                    csv(&["theta1", "theta2", "E_per_qubit"].map(String::from), &rows)
                }
            }
            .into()
        }
    })
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn family_sweep(kind: FamilyKind, m: usize, points: usize, with_em: bool, fmt: Format) -> Result<String> {
    use std::f64::consts::{FRAC_PI_2, TAU};
    if points == 0 {
        return Err(Error::invalid("--points must be at least 1"));
    }
    let grid: Vec<Vec<f64>> = match kind {
        FamilyKind::Ghzl => linspace(0.0, FRAC_PI_2, points).into_iter().map(|t| vec![t]).collect(),
        FamilyKind::Brs => linspace(0.0, TAU, points).into_iter().map(|p| vec![p]).collect(),
        FamilyKind::W => {
            let axis = linspace(0.0, FRAC_PI_2, points);
            match m {
                2 => axis.into_iter().map(|t| vec![t]).collect(),
                3 => axis.iter().flat_map(|&a| axis.iter().map(move |&b| vec![a, b])).collect(),
                _ => return Err(Error::Unsupported(format!("W sweeps cover 2 or 3 qubits, got {m}"))),
            }
        }
    };
    let mut header = kind.param_names(m);
    header.extend(["E_total", "E_per_qubit", "E_per_qubit_closed_form"].map(String::from));
    header.extend(numbered("E_", m));
    if with_em {
        for i in 0..m {
            for j in 0..m {
                header.push(format!("g_{i}_{j}"));
            }
        }
    }
    let mut rows = Vec::with_capacity(grid.len());
    let mut records = Vec::with_capacity(grid.len());
    for params in grid {
        let spec = FamilySpec::new(kind, m, params.clone())?;
        let rep = entanglement_distance(&spec.state());
        let closed = match family_ed_closed_form(&spec) {
            Ok(x) => Some(x),
            Err(Error::Unsupported(_)) => None,
            Err(e) => return Err(e),
        };
        let mut row: Vec<String> = params.iter().map(|&x| fmt_num(x)).collect();
        row.push(fmt_num(rep.total));
        row.push(fmt_num(rep.per_qubit_mean()));
        row.push(closed.map(fmt_num).unwrap_or_default());
        row.extend(rep.per_qubit.iter().map(|&x| fmt_num(x)));
        if with_em {
            row.extend(rep.em.rows().into_iter().flatten().map(fmt_num));
        }
        rows.push(row);
        records.push(FamilyRow {
            params,
            e_total: rep.total,
            e_per_qubit: rep.per_qubit_mean(),
            e_per_qubit_closed_form: closed,
            e_mu: rep.per_qubit.clone(),
            em: with_em.then(|| rep.em.rows()),
        });
    }
    Ok(match fmt {
        Format::Csv => csv(&header, &rows),
        Format::Json => json(&FamilyJson {
            schema_version: SCHEMA_VERSION,
            family: kind.name().to_string(),
            num_qubits: m,
            param_names: kind.param_names(m),
            rows: records,
        }),
    })
}

#[derive(Serialize)]
struct FamilyRow {
    params: Vec<f64>,
    #[serde(rename = "E_total")]
    e_total: f64,
    #[serde(rename = "E_per_qubit")]
    e_per_qubit: f64,
    #[serde(rename = "E_per_qubit_closed_form")]
    e_per_qubit_closed_form: Option<f64>,
    #[serde(rename = "E_mu")]
    e_mu: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    em: Option<Vec<Vec<f64>>>,
}

#[derive(Serialize)]
struct FamilyJson {
    schema_version: u32,
    family: String,
    num_qubits: usize,
    param_names: Vec<String>,
    rows: Vec<FamilyRow>,
}

/// Parses `args`, runs the command and writes the report. Returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &outcome.output)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout().write_all(outcome.output.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return EXIT_INVALID;
    }
    if outcome.violation {
        eprintln!("property violated; see report");
        return EXIT_VIOLATION;
    }
    EXIT_OK
}
