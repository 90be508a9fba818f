//! `hypvol`: exact intersection numbers, Mirzakhani polynomials and volumes
//! of hyperbolic cone surfaces from the command line.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hypvol::exactmath::{fmt_rational, fmt_vector, parse_vector};
use hypvol::graphs::{contributing_graphs, enumerate_rational_graphs, RationalGraph};
use hypvol::intersections::{self, IntersectionError};
use hypvol::mirzakhani::mirzakhani_poly;
use hypvol::tautclasses::s_class;
use hypvol::verify::{self, IdentityReport, Verdict, VerifyConfig};
use hypvol::volumes::{self, DomainError};
use hypvol::Rational;

/// Exit status for malformed command lines; 2 is reserved for failed identities.
const USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "hypvol", version, about = "Exact volumes of hyperbolic cone surfaces")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Intersection-number cache file; overrides HYPVOL_CACHE.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Worker threads for sampled checks (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Print degree bookkeeping next to polynomial output.
    #[arg(long, global = true)]
    audit: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// ψ-class intersection number ⟨τ_{d_1}⋯τ_{d_n}⟩_g.
    Psi {
        #[arg(long)]
        g: u32,
        /// Exponents, comma-separated; `-` for none.
        #[arg(long, allow_hyphen_values = true)]
        d: String,
    },
    /// Mixed number ⟨κ₁^m τ_{d_1}⋯τ_{d_n}⟩_g.
    Kappa {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        m: u32,
        #[arg(long, allow_hyphen_values = true, default_value = "-")]
        d: String,
    },
    /// Mirzakhani polynomial P_{g,n}, or its level-ℓ variant.
    Mpoly {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        level: u32,
    },
    /// Rational graphs of type (g, n), or those contributing at an angle vector.
    Graphs {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = vector)]
        a: Option<Angles>,
    },
    /// Volume functions.
    Volume {
        #[command(subcommand)]
        op: VolumeOp,
    },
    /// Decorated tautological class s_{g,n}(a).
    Sclass {
        #[arg(long)]
        g: u32,
        #[arg(long, value_parser = vector)]
        a: Angles,
    },
    /// Check identities exactly; `all` runs every identity.
    Verify(VerifyArgs),
    /// Table of V_{0,n}(0,…,0,x) and its normalized volume on [0, 2].
    Fig1 {
        #[arg(long, value_parser = clap::value_parser!(u64).range(3..=5))]
        n: u64,
        #[arg(long, default_value_t = 40)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inspect or delete the intersection-number cache.
    Cache {
        #[command(subcommand)]
        op: CacheOp,
    },
}

#[derive(Subcommand, Debug)]
enum VolumeOp {
    /// V_{g,n}(a) and Vol_{g,n}(a).
    Eval {
        #[arg(long)]
        g: u32,
        #[arg(long, value_parser = vector)]
        a: Angles,
    },
    /// t ↦ V^ℓ_{g,n}(head, t) on [0, 2].
    Profile {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = vector, default_value = "")]
        head: Angles,
        #[arg(long, default_value_t = 0)]
        ell: u32,
    },
}

#[derive(Subcommand, Debug)]
enum CacheOp {
    Stats,
    Clear,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Identity name or `all`.
    identity: String,
    /// Largest 3g−3+n checked.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(i64).range(1..))]
    max_dim: i64,
    #[arg(long, default_value_t = 4)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exit with status 2 if an asserted identity fails.
    #[arg(long)]
    strict: bool,
    /// Omit wall-clock times so that reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

/// Comma-separated rationals such as `0,1/4,3/2`.
#[derive(Clone, Debug)]
struct Angles(Vec<Rational>);

fn vector(s: &str) -> Result<Angles, String> {
    if s.trim().is_empty() {
        return Ok(Angles(Vec::new()));
    }
    parse_vector(s).map(Angles).map_err(|e| e.to_string())
}

fn exponents(s: &str) -> Result<Vec<u32>, String> {
    let s = s.trim();
    if s.is_empty() || s == "-" {
        return Ok(Vec::new());
    }
    s.split(',').map(|d| d.trim().parse::<u32>().map_err(|_| format!("bad exponent {d:?}"))).collect()
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(String),
    Identity(String),
    Io(String),
}

impl From<DomainError> for Failure {
    fn from(e: DomainError) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<IntersectionError> for Failure {
    fn from(e: IntersectionError) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Out = Result<String, Failure>;

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn cache_path(flag: &Option<PathBuf>) -> Option<PathBuf> {
    flag.clone().or_else(|| std::env::var_os("HYPVOL_CACHE").filter(|v| !v.is_empty()).map(PathBuf::from))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(j) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    let path = cache_path(&cli.cache);
    let result = run(&cli, path.as_deref());
    match result {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(text.as_bytes());
            if !text.is_empty() && !text.ends_with('\n') {
                let _ = stdout.write_all(b"\n");
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Identity(text)) => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            eprintln!("error: an asserted identity failed");
            ExitCode::from(2)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(USAGE)
        }
        Err(Failure::Domain(m)) | Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli, cache: Option<&Path>) -> Out {
    if let Command::Cache { op } = &cli.command {
        return cache_command(op, cache);
    }
    let table = intersections::global();
    if let Some(p) = cache {
        if p.exists() {
            table.load(p)?;
        }
    }
    let out = dispatch(cli)?;
    if let Some(p) = cache {
        if table.is_dirty() {
            table.store(p)?;
        }
    }
    Ok(out)
}

fn dispatch(cli: &Cli) -> Out {
    let fmt = cli.format;
    match &cli.command {
        Command::Psi { g, d } => {
            let d = exponents(d).map_err(Failure::Usage)?;
            let v = intersections::psi_number(*g, &d)?;
            Ok(scalar(fmt, &v, &[("g", g.to_string()), ("d", format!("{d:?}"))]))
        }
        Command::Kappa { g, m, d } => {
            let d = exponents(d).map_err(Failure::Usage)?;
            let v = intersections::kappa_psi_number(*g, &d, *m)?;
            Ok(scalar(fmt, &v, &[("g", g.to_string()), ("m", m.to_string()), ("d", format!("{d:?}"))]))
        }
        Command::Mpoly { g, n, level } => mpoly(cli, *g, *n, *level),
        Command::Graphs { g, n, a } => graphs(fmt, *g, *n, a.as_ref().map(|a| a.0.as_slice())),
        Command::Volume { op: VolumeOp::Eval { g, a } } => {
            let a = &a.0;
            let v = volumes::vol_eval(*g, a)?;
            Ok(match fmt {
                Format::Json => json(&v),
                Format::Csv => format!("a,V_exact,Vol_float\n\"{}\",{},{}\n", fmt_vector(a), v.v_exact, v.vol),
                Format::Text => {
                    let how = if v.limit { " (one-sided limit)" } else { "" };
                    format!("V = {}\nVol = {}{how}", v.v_exact, v.vol)
                }
            })
        }
        Command::Volume { op: VolumeOp::Profile { g, n, head, ell } } => profile(cli, *g, *n, &head.0, *ell),
        Command::Sclass { g, a } => {
            let c = s_class(*g, &a.0)?;
            Ok(match fmt {
                Format::Json => {
                    let terms: Vec<_> = c
                        .terms
                        .iter()
                        .map(|(t, v)| ClassTerm { coeff: fmt_rational(v), term: t.to_string(), degree: t.degree() })
                        .collect();
                    json(&terms)
                }
                Format::Csv => {
                    let mut s = String::from("coeff,degree,term\n");
                    for (t, v) in &c.terms {
                        s.push_str(&format!("{},{},\"{}\"\n", fmt_rational(v), t.degree(), t));
                    }
                    s
                }
                Format::Text => c.dump(),
            })
        }
        Command::Verify(args) => verify_command(fmt, args),
        Command::Fig1 { n, samples, out } => {
            let rows = volumes::fig1_table(*n as usize, *samples)?;
            let text = match fmt {
                Format::Json => json(&rows),
                _ => volumes::fig1_csv(&rows),
            };
            match out {
                Some(p) => {
                    std::fs::write(p, &text)?;
                    Ok(String::new())
                }
                None => Ok(text),
            }
        }
        Command::Cache { .. } => unreachable!("handled before loading"),
    }
}

fn scalar(fmt: Format, v: &Rational, fields: &[(&str, String)]) -> String {
    match fmt {
        Format::Json => {
            let mut m = serde_json::Map::new();
            for (k, x) in fields {
                m.insert(k.to_string(), serde_json::Value::String(x.clone()));
            }
            m.insert("value".into(), serde_json::Value::String(fmt_rational(v)));
            json(&m)
        }
        Format::Csv => format!("value\n{}\n", fmt_rational(v)),
        Format::Text => fmt_rational(v),
    }
}

fn audit_line(g: u32, n: usize, observed: usize) -> String {
    let structural = 6 * g as i64 - 6 + 2 * n as i64;
    let printed = 6 * g as i64 - 6 + n as i64;
    format!(
        "audit: observed degree {observed}; structural bound 6g-6+2n = {structural}; printed claim 6g-6+n = {printed}"
    )
}

fn mpoly(cli: &Cli, g: u32, n: usize, level: u32) -> Out {
    let p = mirzakhani_poly(g, n, level)?;
    let mut s = match cli.format {
        Format::Json => json(&p.record()),
        Format::Csv => {
            let mut s = String::from("exponents,coeff\n");
            for t in p.poly.term_records() {
                s.push_str(&format!(
                    "\"{}\",{}\n",
                    t.exponents.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(","),
                    t.coeff
                ));
            }
            s
        }
        Format::Text => p.poly.to_string(),
    };
    if cli.audit {
        s = format!("{s}\n{}", audit_line(g, n, p.poly.total_degree().unwrap_or(0) as usize));
    }
    Ok(s)
}

#[derive(Serialize)]
struct GraphRow {
    graph: String,
    edges: usize,
    central_valence: usize,
    automorphisms: u64,
}

#[derive(Serialize)]
struct ClassTerm {
    coeff: String,
    term: String,
    degree: i64,
}

fn graphs(fmt: Format, g: u32, n: usize, a: Option<&[Rational]>) -> Out {
    if !intersections::is_stable(g, n) {
        return Err(DomainError::Unstable { g, n }.into());
    }
    let list: Vec<RationalGraph> = match a {
        Some(a) => {
            if a.len() != n {
                return Err(Failure::Usage(format!("expected {n} angles, got {}", a.len())));
            }
            let av = volumes::canonicalize(a)?;
            contributing_graphs(g, n, av.coords())
        }
        None => enumerate_rational_graphs(g, n),
    };
    let rows: Vec<GraphRow> = list
        .iter()
        .map(|r| GraphRow {
            graph: r.to_string(),
            edges: r.num_edges(),
            central_valence: r.central_valence(),
            automorphisms: r.automorphism_order(),
        })
        .collect();
    Ok(match fmt {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut s = String::from("graph,edges,central_valence,automorphisms\n");
            for r in &rows {
                s.push_str(&format!("\"{}\",{},{},{}\n", r.graph, r.edges, r.central_valence, r.automorphisms));
            }
            s
        }
        Format::Text => {
            let mut s = format!("{} graphs\n", rows.len());
            for r in &rows {
                s.push_str(&format!("{}  |Aut|={}\n", r.graph, r.automorphisms));
            }
            s
        }
    })
}

#[derive(Serialize)]
struct Piece {
    lo: String,
    hi: String,
    poly: String,
}

#[derive(Serialize)]
struct ProfileOut {
    g: u32,
    n: usize,
    head: Vec<String>,
    level: u32,
    pieces: Vec<Piece>,
}

fn profile(cli: &Cli, g: u32, n: usize, head: &[Rational], ell: u32) -> Out {
    if head.len() + 1 != n {
        return Err(Failure::Usage(format!("--head needs {} angles for n = {n}", n.saturating_sub(1))));
    }
    let vp = volumes::v_profile(g, n, head, ell)?;
    let bp = vp.profile.breakpoints();
    let pieces: Vec<Piece> = vp
        .profile
        .pieces()
        .iter()
        .enumerate()
        .map(|(k, p)| Piece { lo: fmt_rational(&bp[k]), hi: fmt_rational(&bp[k + 1]), poly: p.to_string() })
        .collect();
    let mut s = match cli.format {
        Format::Json => {
            json(&ProfileOut { g, n, head: vp.head.iter().map(fmt_rational).collect(), level: ell, pieces })
        }
        Format::Csv => {
            let mut s = String::from("lo,hi,poly\n");
            for p in &pieces {
                s.push_str(&format!("{},{},\"{}\"\n", p.lo, p.hi, p.poly));
            }
            s
        }
        Format::Text => vp.profile.to_string(),
    };
    if cli.audit {
        let observed = vp.profile.max_degree().unwrap_or(0);
        s = format!("{s}\n{}", audit_line(g, n, observed));
    }
    Ok(s)
}

fn verify_command(fmt: Format, args: &VerifyArgs) -> Out {
    let cfg =
        VerifyConfig { max_dim: args.max_dim, samples: args.samples.max(1), seed: args.seed, timing: !args.no_timing };
    let reports: Vec<IdentityReport> = if args.identity == "all" {
        verify::verify_all(&cfg)
    } else {
        verify::run_identity(&args.identity, &cfg).map_err(|e| Failure::Usage(e.to_string()))?
    };
    let text = match fmt {
        Format::Json => {
            #[derive(Serialize)]
            struct Run<'a> {
                seed: u64,
                max_dim: i64,
                samples: usize,
                reports: &'a [IdentityReport],
            }
            json(&Run { seed: cfg.seed, max_dim: cfg.max_dim, samples: cfg.samples, reports: &reports })
        }
        Format::Csv => {
            let mut s = String::from("identity,g,n,verdict,samples,runtime_ms,residual\n");
            for r in &reports {
                s.push_str(&format!(
                    "{},{},{},{},{},{},\"{}\"\n",
                    r.identity,
                    r.g,
                    r.n,
                    verdict(r.verdict),
                    r.samples.len(),
                    r.runtime_ms,
                    r.residual_text.replace('"', "'")
                ));
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for r in &reports {
                let residual = if r.residual_text.len() > 80 {
                    format!("{}…", &r.residual_text[..80])
                } else {
                    r.residual_text.clone()
                };
                s.push_str(&format!(
                    "{:<17} ({},{})  {:<10} residual {}",
                    r.identity,
                    r.g,
                    r.n,
                    verdict(r.verdict),
                    residual
                ));
                if !r.notes.is_empty() {
                    s.push_str(&format!("  [{}]", r.notes));
                }
                s.push('\n');
            }
            s.push_str(&format!("seed {}; {} reports\n", cfg.seed, reports.len()));
            s
        }
    };
    if args.strict && !verify::all_hold(&reports) {
        return Err(Failure::Identity(text));
    }
    Ok(text)
}

fn verdict(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "holds",
        Verdict::Fails => "fails",
        Verdict::Excluded => "excluded",
        Verdict::Diagnostic => "diagnostic",
    }
}

fn cache_command(op: &CacheOp, path: Option<&Path>) -> Out {
    let Some(path) = path else {
        return Err(Failure::Usage("no cache file; pass --cache or set HYPVOL_CACHE".into()));
    };
    match op {
        CacheOp::Stats => {
            let table = intersections::IntersectionTable::new();
            let exists = path.exists();
            if exists {
                table.load(path)?;
            }
            let st = table.stats();
            let bytes = if exists { std::fs::metadata(path)?.len() } else { 0 };
            Ok(format!(
                "path {}\nexists {}\npsi entries {}\nkappa entries {}\nbytes {}",
                path.display(),
                exists,
                st.psi_entries,
                st.kappa_entries,
                bytes
            ))
        }
        CacheOp::Clear => {
            if path.exists() {
                std::fs::remove_file(path)?;
                Ok(format!("removed {}", path.display()))
            } else {
                Ok(format!("nothing to remove at {}", path.display()))
            }
        }
    }
}
