mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use pcforge::beauville::{
    beauville_check, paper_structure_p3, paper_structure_p_ge_5, parse_certificate, reverify_certificate, search_pc,
};
use pcforge::checks::{self, absence_line, certificate_line, CheckLine, Checker, Section, Status};
use pcforge::group::FiniteGroup;
use pcforge::maxclass;
use pcforge::nottingham::{self, NottinghamGroup, TruncSeries};
use pcforge::pcp::{gamma_series, lambda_series};
use pcforge::pquotient::{FpPresentation, QuotientTower};
use pcforge::pcp::PcGroup;
use pcforge::series::{coset_power, easterfield, hall_petrescu, CongruenceResult, Coverage};

use input::GroupInput;
use report::Format;

#[derive(Parser)]
#[command(name = "pcforge", version, about = "p-quotients, Beauville structures and Nottingham quotients")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Seed for sampled checks.
    #[arg(long, default_value_t = 20_240_101, global = true)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Largest group order that may be enumerated.
    #[arg(long, env = "PCFORGE_MAX_ORDER", default_value_t = 10_000_000, global = true)]
    max_order: u128,
    /// Add wall-clock times per section (reports then no longer replay byte for byte).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Free,
    Freeprod,
    Relators,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the p-central quotient tower F/λ_2(F), ..., F/λ_n(F).
    Quotient {
        family: FamilyArg,
        p: u32,
        n: u32,
        /// Relators for `relators`, e.g. "x^3,y^9,X*Y*x*y".
        #[arg(long)]
        relators: Option<String>,
        /// Write the tower here instead of stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Generator cap per stage.
        #[arg(long, default_value_t = 64)]
        cap: usize,
    },
    /// Check, construct or search for a Beauville structure.
    ///
    /// GROUP is `free:P:N`, `freeprod:P:N`, `h`, or a file holding a presentation or a tower.
    Beauville {
        group: Option<String>,
        /// Pairs as words in u, v: "u,v;uv2,uv4".
        #[arg(long, conflicts_with_all = ["search", "paper_construction", "verify"])]
        pairs: Option<String>,
        #[arg(long, conflicts_with_all = ["paper_construction", "verify"])]
        search: bool,
        #[arg(long, conflicts_with = "verify")]
        paper_construction: bool,
        /// Re-check a certificate file instead.
        #[arg(long)]
        verify: Option<PathBuf>,
    },
    /// Properties of the maximal-class group of order p^n.
    Maxclass {
        p: u32,
        n: u32,
        /// Also print a PC presentation of P.
        #[arg(long)]
        pc: bool,
    },
    /// Truncated Nottingham group computations.
    Nottingham {
        #[command(subcommand)]
        op: NottOp,
    },
    /// λ- and γ-series of a group, with the power congruences and Easterfield's bound.
    Series {
        group: String,
        /// Sampled pairs above order 3^5.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Run a section of the check suite: lemma2.2, lemma2.3, lemma2.4, thmA, easterfield,
    /// thm3.2, lemma3.3, thm3.4, thm3.5, catanese, maxclass, nottingham, infra or all.
    Reproduce { section: String },
}

#[derive(Subcommand)]
enum NottOp {
    /// f(g(t)). Series without a `(mod t^(k+1), p=P)` suffix take `--p` and the level `--k`.
    Compose {
        f: String,
        g: String,
        #[arg(long)]
        p: Option<u32>,
        #[arg(long)]
        k: Option<u32>,
    },
    /// Series reversion.
    Invert {
        f: String,
        #[arg(long)]
        p: Option<u32>,
        #[arg(long)]
        k: Option<u32>,
    },
    /// γ_i(N/N_k) against N_r(i).
    Lcs { p: u32, k: u32 },
    /// <N_m^p> against N_(mp + m mod p) inside N/N_k.
    Power { p: u32, k: u32, m: u32 },
    /// PC presentation of N/N_k on t+t^2, t+t^3.
    Pc { p: u32, k: u32 },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(false)` when a report contains a FAIL line.
fn run(cli: &Cli) -> Result<bool> {
    match &cli.cmd {
        Cmd::Quotient {
            family,
            p,
            n,
            relators,
            out,
            cap,
        } => {
            let fp = match (family, relators) {
                (FamilyArg::Free, None) => FpPresentation::free(),
                (FamilyArg::Freeprod, None) => FpPresentation::free_product(*p),
                (FamilyArg::Relators, Some(r)) => FpPresentation::parse(r)?,
                (FamilyArg::Relators, None) => bail!("`relators` needs --relators"),
                (_, Some(_)) => bail!("--relators only goes with `relators`"),
            };
            let tower = QuotientTower::compute(&fp, *p, *n, *cap)?;
            let text = tower.to_text();
            match out {
                Some(path) => std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            for s in &tower.stages {
                eprintln!("n={}: order {}^{}", s.n, p, s.pcp.ngens());
            }
            if tower.stabilized {
                eprintln!("tower stabilized at n={}", tower.last().n);
            }
            Ok(true)
        }
        Cmd::Beauville {
            group,
            pairs,
            search,
            paper_construction,
            verify,
        } => {
            let line = match (verify, group) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                    let c = parse_certificate(&text)?;
                    let rv = reverify_certificate(&c, cli.max_order.min(3125))?;
                    CheckLine::new(
                        "beauville.verify",
                        if rv.ok() { Status::Pass } else { Status::Fail },
                        format!("{rv:?}"),
                    )
                }
                (None, None) => bail!("give a group or --verify"),
                (None, Some(spec)) => beauville_line(cli, spec, pairs.as_deref(), *search, *paper_construction)?,
            };
            emit(cli, "beauville", vec![line])
        }
        Cmd::Maxclass { p, n, pc } => {
            let g = maxclass::maximal_class_group(*p, *n)?;
            let mut lines = vec![
                CheckLine::new("maxclass.order", Status::Pass, format!("|P| = {}", g.size())),
                pass_if("maxclass.theta-identity", g.annihilation_identity(), "Θ^(p-1) + ... + Θ + 1 ≡ 0"),
                pass_if("maxclass.outside-p1", maxclass::outside_p1_order_p(&g), "every element outside P_1 has order p"),
                pass_if(
                    "maxclass.maximal-class",
                    pcforge::beauville::is_maximal_class(&g, *p),
                    "an element has a centralizer of order p^2",
                ),
            ];
            for (i, e, o, a) in maxclass::exponent_filtration(&g) {
                lines.push(pass_if(
                    format!("maxclass.exp.P{i}"),
                    e == o && a,
                    format!("log_p exp P_{i} = {o}, expected {e}, attained on P_{i} \\ P_{}: {a}", i + 1),
                ));
            }
            if *pc {
                let m = maxclass::to_pc(&g)?;
                print!("{}", pcforge::pcp::format_presentation(m.pc.pcp()));
            }
            emit(cli, "maxclass", lines)
        }
        Cmd::Nottingham { op } => match op {
            NottOp::Compose { f, g, p, k } => {
                let (f, g) = (series_arg(f, *p, *k)?, series_arg(g, *p, *k)?);
                println!("{}", f.compose(&g)?);
                Ok(true)
            }
            NottOp::Invert { f, p, k } => {
                let f = series_arg(f, *p, *k)?;
                println!("{}", f.invert());
                Ok(true)
            }
            NottOp::Lcs { p, k } => {
                let rows = nottingham::lcs_check(*p, *k)?;
                let lines = rows
                    .into_iter()
                    .map(|r| {
                        let detail = format!("|γ_{}| = {}, r = {}, |N_r/N_k| = {}", r.i, r.gamma_order, r.r, r.expected_order);
                        if r.with_slack {
                            pass_if(format!("nottingham.lcs.gamma{:02}", r.i), r.equal, detail)
                        } else {
                            CheckLine::new(format!("nottingham.lcs.gamma{:02}", r.i), Status::Skip, detail)
                        }
                    })
                    .collect();
                emit(cli, "nottingham", lines)
            }
            NottOp::Power { p, k, m } => {
                let c = nottingham::power_subgroup_check(*p, *k, *m)?;
                let id = format!("nottingham.power.m{m}");
                let detail = format!("<N_{m}^{p}> = N_{} inside N/N_{k}", c.target);
                let line = if c.observable {
                    pass_if(id, c.holds, detail)
                } else {
                    CheckLine::new(id, Status::Skip, format!("{detail}: not observable"))
                };
                emit(cli, "nottingham", vec![line])
            }
            NottOp::Pc { p, k } => {
                let m = nottingham::to_pc(&NottinghamGroup::new(*p, *k)?)?;
                print!("{}", pcforge::pcp::format_presentation(m.pc.pcp()));
                Ok(true)
            }
        },
        Cmd::Series { group, samples } => {
            let input = GroupInput::load(group)?;
            let g = &input.group;
            let p = g.p();
            let lambda: Vec<String> = lambda_series(g).iter().map(|s| format!("{}^{}", p, s.len())).collect();
            let gamma: Vec<String> = gamma_series(g).iter().map(|s| format!("{}^{}", p, s.len())).collect();
            let mut lines = vec![
                CheckLine::new("series.lambda", Status::Pass, format!("|λ_i| = {}", lambda.join(", "))),
                CheckLine::new("series.gamma", Status::Pass, format!("|γ_i| = {}", gamma.join(", "))),
            ];
            let cov = if g.size() <= 243 {
                Coverage::Exhaustive
            } else {
                Coverage::Sampled {
                    pairs: *samples,
                    seed: cli.seed,
                }
            };
            if g.frattini_weighted() {
                let checks: [(&str, CongruenceCheck); 2] =
                    [("series.hall-petrescu", hall_petrescu), ("series.coset-power", coset_power)];
                for (id, check) in checks {
                    match check(g, cov, cli.max_order) {
                        Ok(r) => {
                            let detail = match &r.counterexample {
                                None => format!("levels {:?}, {} pairs", r.levels, r.pairs),
                                Some((n, x, y)) => format!("fails at level {n}: x = {x:?}, y = {y:?}"),
                            };
                            lines.push(pass_if(id, r.holds(), detail));
                        }
                        Err(pcforge::Error::Bound { size, bound }) => lines.push(CheckLine::new(
                            id,
                            Status::Skip,
                            format!("order {size} exceeds the bound {bound}"),
                        )),
                        Err(e) => return Err(e.into()),
                    }
                }
            } else {
                lines.push(CheckLine::new(
                    "series.hall-petrescu",
                    Status::Skip,
                    "presentation weights do not give the λ-series",
                ));
            }
            match easterfield(g, cli.max_order) {
                Ok(r) => {
                    let rows: Vec<String> = r.rows.iter().map(|x| format!("i={}: {}<={}", x.i, x.exp_log, x.bound_log)).collect();
                    lines.push(pass_if(
                        "series.easterfield",
                        r.holds(),
                        format!("class {}, k = {}, [{}]", r.class, r.k, rows.join(", ")),
                    ));
                }
                Err(pcforge::Error::Bound { size, bound }) => lines.push(CheckLine::new(
                    "series.easterfield",
                    Status::Skip,
                    format!("order {size} exceeds the bound {bound}"),
                )),
                Err(e) => return Err(e.into()),
            }
            emit(cli, "series", lines)
        }
        Cmd::Reproduce { section } => {
            let names = checks::expand(section)?;
            let checker = Checker::new(cli.max_order, cli.seed);
            // Sections are independent; results come back in the requested order.
            let sections = pcforge::par::map(&names, |name| checker.run(name))
                .into_iter()
                .collect::<pcforge::Result<Vec<_>>>()?;
            let header = format!(
                "pcforge reproduce {section} seed={} max-order={}",
                cli.seed, cli.max_order
            );
            print!("{}", report::render(cli.format, &header, &sections, cli.timings));
            Ok(checks::totals(&sections).0 == 0)
        }
    }
}

type CongruenceCheck = fn(&PcGroup, Coverage, u128) -> pcforge::Result<CongruenceResult>;

fn series_arg(s: &str, p: Option<u32>, k: Option<u32>) -> Result<TruncSeries> {
    if s.contains("(mod") {
        return Ok(s.parse()?);
    }
    match (p, k) {
        (Some(p), Some(k)) => Ok(format!("{s} (mod t^{}, p={p})", k + 1).parse()?),
        _ => bail!("`{s}` has no `(mod ...)` suffix; pass --p and --k"),
    }
}

fn pass_if(id: impl Into<String>, ok: bool, detail: impl Into<String>) -> CheckLine {
    CheckLine::new(id, if ok { Status::Pass } else { Status::Fail }, detail)
}

fn emit(cli: &Cli, name: &'static str, mut lines: Vec<CheckLine>) -> Result<bool> {
    lines.sort_by(|a, b| a.id.cmp(&b.id));
    let sections = [Section {
        name,
        lines,
        elapsed: std::time::Duration::ZERO,
    }];
    let header = std::env::args().collect::<Vec<_>>().join(" ");
    print!("{}", report::render(cli.format, &header, &sections, false));
    Ok(checks::totals(&sections).0 == 0)
}

fn beauville_line(cli: &Cli, spec: &str, pairs: Option<&str>, search: bool, construction: bool) -> Result<CheckLine> {
    let input = GroupInput::load(spec)?;
    let g = &input.group;
    let bound = cli.max_order;
    let (u, v) = (&input.images[0], &input.images[1]);
    let elementwise = bound.min(3125);
    if search {
        let (out, cert) = search_pc(g, bound)?;
        return Ok(match cert {
            Some(c) => certificate_line("beauville.search", g, &c, elementwise, "structure found by search")?,
            None => absence_line("beauville.search", &out),
        });
    }
    let pairs = if construction {
        if g.p() >= 5 {
            paper_structure_p_ge_5(g, u, v)?
        } else if g.p() == 3 {
            paper_structure_p3(g, u, v, bound)?.0
        } else {
            bail!("no construction for p = {}", g.p());
        }
    } else {
        let spec = pairs.context("give --pairs, --search or --paper-construction")?;
        input::parse_pairs(g, u, v, spec)?
    };
    let ((a, b), (c, d)) = &pairs;
    let cert = beauville_check(g, (a, b), (c, d));
    Ok(certificate_line("beauville.check", g, &cert, elementwise, spec)?)
}
