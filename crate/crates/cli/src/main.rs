//! `zgraded`: command line front end. Every subcommand maps onto one library
//! operation and prints canonical symbolic output.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use zgraded::berez::{self, Coefficient};
use zgraded::io;
use zgraded::{
    koszul_sign, standard_order, BerSection, Convention, Degree, DeltaComplex, DomainSpec, Error,
    FormAlgebra, GradedFunction, GradedMatrix, IntegralRegistry, Rational, Result, ScalarExpr,
};

#[derive(Parser)]
#[command(name = "zgraded", version, about = "Exact symbolic computation for Z2^n-graded supergeometry")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value = "text")]
    format: Format,
    /// Override the truncation order of domains given with --domain.
    #[arg(long, global = true)]
    truncate: Option<u32>,
    /// Integral registry file.
    #[arg(long, global = true)]
    registry: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    /// One JSON object per line.
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Theory {
    Z2,
    Z22Naive,
    Z22Residue,
}

#[derive(Subcommand)]
enum Cmd {
    /// Koszul sign (-1)^<a,b> of two degrees.
    Sign { a: String, b: String },
    /// Degrees of Z2^n in standard order.
    Order { n: usize },
    /// Product of two functions.
    Mul {
        #[arg(long)]
        domain: PathBuf,
        f: String,
        g: String,
    },
    /// Inverse of a function with invertible body.
    Invert {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long = "fn")]
        f: String,
    },
    /// Coordinate derivative.
    Partial {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long = "fn")]
        f: String,
        #[arg(long)]
        var: String,
    },
    /// Pullback of a function on the target of a transformation.
    Pullback {
        #[arg(long)]
        transform: PathBuf,
        #[arg(long = "fn")]
        f: String,
    },
    /// Composite `outer ∘ inner` of two transformations.
    Compose {
        #[arg(long)]
        outer: PathBuf,
        #[arg(long)]
        inner: PathBuf,
    },
    /// Modified Jacobian of a transformation.
    Jac {
        #[arg(long)]
        transform: PathBuf,
    },
    /// Tangent map at a point of the source body, e.g. `--at x=1/2`.
    Tangent {
        #[arg(long)]
        transform: PathBuf,
        #[arg(long, value_delimiter = ',')]
        at: Vec<String>,
    },
    /// Supertranspose.
    Strans(MatrixArgs),
    /// Z2^n-trace.
    Trace(MatrixArgs),
    /// Quasideterminant with respect to the first `split` rows and columns.
    Qdet {
        #[command(flatten)]
        m: MatrixArgs,
        #[arg(long)]
        split: usize,
    },
    /// UDL decomposition.
    Udl(MatrixArgs),
    /// Z2^n-determinant.
    Det(MatrixArgs),
    /// Z2^n-Berezinian.
    Ber(MatrixArgs),
    /// Print d(d f) and check that it vanishes. Without --domain the domain
    /// is `x, y | xi1, xi2` over Z2.
    DdCheck {
        #[arg(long, default_value = "deligne")]
        convention: String,
        #[arg(long = "fn")]
        f: String,
        #[arg(long)]
        domain: Option<PathBuf>,
    },
    /// Check the gluing law on every overlap of a section.
    GlueCheck {
        #[arg(long)]
        section: PathBuf,
    },
    /// Integrate a section in one chart.
    Integrate {
        #[arg(long)]
        section: PathBuf,
        #[arg(long)]
        chart: String,
        #[arg(long, value_enum)]
        theory: Theory,
    },
    /// Check δ² = 0 and δΩ = 0 for a free module with the given basis degrees.
    DeltaCheck {
        /// Basis degrees, e.g. "(0,0) (1,1) (0,1)".
        #[arg(long)]
        module: String,
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long, default_value_t = 6)]
        weight: u32,
    },
}

#[derive(clap::Args)]
struct MatrixArgs {
    #[arg(long)]
    domain: PathBuf,
    #[arg(long)]
    matrix: PathBuf,
}

/// Named results plus the verdict of checking commands.
struct Report {
    records: Vec<(String, String)>,
    ok: bool,
    /// Print names in text mode.
    keyed: bool,
}

impl Report {
    fn one(name: &str, value: impl ToString) -> Report {
        Report {
            records: vec![(name.to_string(), value.to_string())],
            ok: true,
            keyed: false,
        }
    }
}

struct Session {
    truncate: Option<u32>,
    registry: Option<PathBuf>,
}

impl Session {
    fn domain(&self, path: &Path) -> Result<DomainSpec> {
        let d = io::load_domain(path)?;
        match self.truncate {
            Some(t) => d.with_truncation(t),
            None => Ok(d),
        }
    }

    fn matrix(&self, m: &MatrixArgs) -> Result<GradedMatrix> {
        io::load_matrix(&self.domain(&m.domain)?, &m.matrix)
    }

    fn registry(&self) -> Result<IntegralRegistry> {
        match &self.registry {
            Some(p) => io::load_registry(p),
            None => Ok(IntegralRegistry::new()),
        }
    }
}

fn degree(s: &str) -> Result<Degree> {
    s.parse()
}

fn degree_list(s: &str) -> Result<Vec<Degree>> {
    let mut out = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let end = rest
            .find(')')
            .ok_or_else(|| Error::Parse { line: 1, column: 1, message: format!("unclosed degree in `{s}`") })?;
        out.push(degree(&rest[..=end])?);
        rest = rest[end + 1..].trim_start_matches([',', ';', ' ']);
    }
    Ok(out)
}

fn point(pairs: &[String]) -> Result<BTreeMap<String, Rational>> {
    pairs
        .iter()
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Error::Parse { line: 1, column: 1, message: format!("expected `var=value`, got `{p}`") })?;
            let r = ScalarExpr::parse(v.trim())?
                .as_rational()
                .ok_or_else(|| Error::Config(format!("`{v}` is not a rational number")))?;
            Ok((k.trim().to_string(), r))
        })
        .collect()
}

fn scalar_rows(rows: &[Vec<ScalarExpr>]) -> String {
    rows.iter()
        .map(|r| format!("[{}]", r.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")))
        .collect::<Vec<_>>()
        .join("\n")
}

fn default_dd_domain() -> DomainSpec {
    DomainSpec::builder(1)
        .base("x")
        .base("y")
        .generator("xi1", "(1)".parse().unwrap())
        .generator("xi2", "(1)".parse().unwrap())
        .build()
        .expect("valid domain")
}

fn run(cli: &Cli) -> Result<Report> {
    let s = Session {
        truncate: cli.truncate,
        registry: cli.registry.clone(),
    };
    Ok(match &cli.cmd {
        Cmd::Sign { a, b } => Report::one("sign", koszul_sign(&degree(a)?, &degree(b)?)?),
        Cmd::Order { n } => {
            let v: Vec<String> = standard_order(*n)?.iter().map(|d| d.to_string()).collect();
            Report::one("order", v.join(" "))
        }
        Cmd::Mul { domain, f, g } => {
            let d = s.domain(domain)?;
            Report::one("product", &GradedFunction::parse(&d, f)? * &GradedFunction::parse(&d, g)?)
        }
        Cmd::Invert { domain, f } => {
            let d = s.domain(domain)?;
            Report::one("inverse", GradedFunction::parse(&d, f)?.invert()?)
        }
        Cmd::Partial { domain, f, var } => {
            let d = s.domain(domain)?;
            Report::one("partial", GradedFunction::parse(&d, f)?.partial(var)?)
        }
        Cmd::Pullback { transform, f } => {
            let phi = io::load_transform(transform)?;
            Report::one("pullback", phi.pullback(&GradedFunction::parse(phi.target(), f)?)?)
        }
        Cmd::Compose { outer, inner } => {
            let (o, i) = (io::load_transform(outer)?, io::load_transform(inner)?);
            Report::one("composite", o.compose(&i)?.to_string().trim_end())
        }
        Cmd::Jac { transform } => {
            let m = io::load_transform(transform)?.modified_jacobian()?;
            Report::one("jacobian", m.to_string().trim_end())
        }
        Cmd::Tangent { transform, at } => {
            let t = io::load_transform(transform)?.tangent_matrix_at(&point(at)?)?;
            Report::one("tangent", scalar_rows(&t))
        }
        Cmd::Strans(m) => Report::one("supertranspose", s.matrix(m)?.supertranspose()?.to_string().trim_end()),
        Cmd::Trace(m) => Report::one("trace", s.matrix(m)?.z2n_trace()?),
        Cmd::Qdet { m, split } => {
            Report::one("quasideterminant", s.matrix(m)?.quasideterminant(*split)?.to_string().trim_end())
        }
        Cmd::Udl(m) => {
            let (u, d, l) = s.matrix(m)?.udl_decompose()?;
            Report {
                records: vec![
                    ("U".into(), u.to_string().trim_end().into()),
                    ("D".into(), d.to_string().trim_end().into()),
                    ("L".into(), l.to_string().trim_end().into()),
                ],
                ok: true,
                keyed: true,
            }
        }
        Cmd::Det(m) => Report::one("det", s.matrix(m)?.z2n_det()?),
        Cmd::Ber(m) => Report::one("ber", s.matrix(m)?.z2n_ber()?),
        Cmd::DdCheck { convention, f, domain } => {
            let conv: Convention = convention.parse()?;
            let d = match domain {
                Some(p) => s.domain(p)?,
                None => default_dd_domain(),
            };
            let alg = FormAlgebra::new(&d, conv, 2)?;
            let w = alg.parse(f)?;
            let dd = alg.d(&alg.d(&w)?)?;
            Report {
                ok: dd.is_zero(),
                records: vec![("dd".into(), dd.to_string())],
                keyed: false,
            }
        }
        Cmd::GlueCheck { section } => glue_check(&io::load_section(section)?)?,
        Cmd::Integrate { section, chart, theory } => {
            let mut sec = io::load_section(section)?;
            sec.complete()?;
            let reg = s.registry()?;
            let c = sec
                .coefficient(chart)
                .ok_or_else(|| Error::Config(format!("no coefficient known on chart `{chart}`")))?;
            let v = match (theory, c) {
                (Theory::Z2, Coefficient::Function(f)) => berez::integrate_z2(f, &reg)?,
                (Theory::Z22Naive, Coefficient::Function(f)) => berez::integrate_z22_naive(f, &reg)?,
                (Theory::Z22Residue, Coefficient::Laurent(l)) => berez::integrate_z22_residue(l, &reg)?,
                (Theory::Z22Residue, Coefficient::Function(f)) => {
                    let pole = f.domain().generators()[0].name.clone();
                    berez::integrate_z22_residue(&zgraded::LaurentFunction::exact(f, &pole)?, &reg)?
                }
                (_, Coefficient::Laurent(_)) => {
                    return Err(Error::Unsupported("Laurent coefficients need the residue integral".into()))
                }
            };
            Report::one("integral", v)
        }
        Cmd::DeltaCheck { module, gamma, weight } => {
            let gamma = gamma.as_deref().map(degree).transpose()?;
            let c = DeltaComplex::new(&degree_list(module)?, gamma, *weight)?;
            let d = c.delta();
            let dd = &d * &d;
            let om = c.apply(&c.omega())?;
            Report {
                ok: dd.is_zero() && om.is_zero(),
                keyed: true,
                records: vec![
                    ("delta".into(), d.to_string()),
                    ("delta^2".into(), dd.to_string()),
                    ("omega".into(), c.omega().to_string()),
                    ("delta(omega)".into(), om.to_string()),
                ],
            }
        }
    })
}

fn glue_check(sec: &BerSection) -> Result<Report> {
    let r = sec.glue_check()?;
    let mut records = Vec::new();
    for o in &r.overlaps {
        let verdict = if o.ok { "ok" } else { "MISMATCH" };
        let mut v = format!("{verdict}: expected {}", o.expected);
        if !o.ok {
            v += &format!(", found {}", o.actual);
        }
        records.push((format!("{} -> {}", o.from, o.to), v));
    }
    for c in &r.coherence {
        let v = format!(
            "morphisms {}, volumes {}",
            if c.morphisms_agree { "agree" } else { "DIFFER" },
            if c.volumes_agree { "agree" } else { "DIFFER" }
        );
        records.push((format!("{} -> {} -> {}", c.charts[0], c.charts[1], c.charts[2]), v));
    }
    if records.is_empty() {
        records.push(("glue".into(), "no overlap has coefficients on both charts".into()));
    }
    Ok(Report {
        ok: r.ok(),
        records,
        keyed: true,
    })
}

fn print(format: Format, r: &Report) {
    match format {
        Format::Text if !r.keyed => {
            for (_, v) in &r.records {
                println!("{v}");
            }
        }
        Format::Text => {
            for (k, v) in &r.records {
                if v.contains('\n') {
                    println!("{k}:\n{v}");
                } else {
                    println!("{k}: {v}");
                }
            }
        }
        Format::Json => {
            for (k, v) in &r.records {
                println!("{}", serde_json::json!({ "name": k, "value": v }));
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(r) => {
            print(cli.format, &r);
            if r.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            match cli.format {
                Format::Text => eprintln!("error: {e}"),
                Format::Json => println!("{}", serde_json::json!({ "error": e.to_string() })),
            }
            ExitCode::from(if matches!(e, Error::Parse { .. }) { 2 } else { 1 })
        }
    }
}
