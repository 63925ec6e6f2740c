use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hellylat::affine::{AffineLattice, MPoint, MPointJson};
use hellylat::catalog::{generate_with_cap, CatalogRecipe};
use hellylat::coxeter::{self, Family, LatticePoint};
use hellylat::garside::{Braid, Garside};
use hellylat::helly::{clique_helly_check, helly_check, helly_check_window, Ball, Graph, GraphJson, HellyOutcome};
use hellylat::numeric::loop_length;
use hellylat::suites::{run_suites, Status, SuiteConfig, DEFAULT_CAP, DEFAULT_SEED, SUITES};
use hellylat::{Exec, FinitePoset};

#[derive(Parser)]
#[command(name = "hellylat", version, about = "Posets, Garside groups, affine lattices and Helly checks")]
struct Cli {
    /// Seed for sampled inputs.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Upper bound on enumerated elements.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Run sweeps on a single thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Profile a poset: bounds, grading, lattice and flag properties, bowties.
    Analyze(AnalyzeArgs),
    /// Print a catalog poset as JSON.
    Generate {
        /// `kind:params` (e.g. `boolean:3`, `subspace:2:3`) or a JSON recipe.
        recipe: String,
    },
    /// Braid group operations.
    Garside(GarsideArgs),
    /// Operations in the affine version of a lattice.
    Affine(AffineArgs),
    /// Helly checks on graphs.
    Helly(HellyArgs),
    /// Thin Coxeter complexes of types A (extended) and C.
    Coxeter(CoxeterArgs),
    /// Evaluate the weak-order link loop length.
    Numeric,
    /// Run registered check suites.
    Suite(SuiteArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Catalog recipe, or a path to poset JSON with `--file`.
    source: String,
    /// Treat the source as a poset JSON file.
    #[arg(long)]
    file: bool,
    /// Also report meet and join of two element ids.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    pair: Option<Vec<String>>,
}

#[derive(Args)]
struct GarsideArgs {
    #[arg(long, default_value_t = 3)]
    strands: usize,
    #[command(subcommand)]
    op: GarsideOp,
}

#[derive(Subcommand)]
enum GarsideOp {
    /// Normal form of a word such as `s1,-s2,d`.
    NormalForm { word: String },
    Multiply { a: String, b: String },
    Inverse { a: String },
    /// Whether `a` is a prefix of `b`.
    PrefixLeq { a: String, b: String },
    /// Elements of `[lo, hi]`.
    Interval { lo: String, hi: String },
    /// Thickening ball, checked against `[g d^-k, g d^k]`.
    Ball {
        centre: String,
        #[arg(long, default_value_t = 1)]
        radius: u32,
    },
    /// Meet and join found by scanning `[d^-r, d^r]`.
    Lattice {
        a: String,
        b: String,
        #[arg(long, default_value_t = 3)]
        window: i64,
    },
}

#[derive(Args)]
struct AffineArgs {
    /// Catalog recipe of the base lattice.
    #[arg(long)]
    base: String,
    /// Coordinates live in `(1/denominator) Z`.
    #[arg(long, default_value_t = 1)]
    denominator: i64,
    #[command(subcommand)]
    op: AffineOp,
}

/// Points are JSON (`{"u":[0,1],"jumps":{"1":"a"}}`) or `const:V` for a constant point.
#[derive(Subcommand)]
enum AffineOp {
    Leq {
        x: String,
        y: String,
        /// Decide by searching elementary steps instead of the criterion.
        #[arg(long)]
        oracle: bool,
    },
    Join { x: String, y: String },
    Meet { x: String, y: String },
    Distance { x: String, y: String },
    /// Elementary steps available from a point.
    Superiors { x: String },
    Interval { lo: String, hi: String },
    /// Point at `at` units from `x` on the way to `y`.
    Geodesic {
        x: String,
        y: String,
        #[arg(long)]
        at: i64,
    },
    /// Neighbours in the thickening.
    Neighbours { x: String },
}

#[derive(Args)]
struct HellyArgs {
    /// `cycle:N`, `complete:N`, `king:WxH`, or a path to graph JSON.
    #[arg(long)]
    graph: String,
    #[command(subcommand)]
    op: HellyOp,
}

#[derive(Subcommand)]
enum HellyOp {
    /// Check balls given as `name:radius` arguments.
    Balls {
        #[arg(required = true)]
        balls: Vec<String>,
    },
    /// Helly property of the maximal cliques.
    Cliques,
    /// All balls with centres in `core` (repeat the flag per vertex) and radii up to `radius`.
    Window {
        #[arg(long, required = true)]
        core: Vec<String>,
        #[arg(long, default_value_t = 1)]
        radius: usize,
    },
}

#[derive(Args)]
struct CoxeterArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[command(subcommand)]
    op: CoxeterOp,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    AExtended,
    C,
}

/// Points are comma separated integers, e.g. `0,-1,2`.
#[derive(Subcommand)]
enum CoxeterOp {
    Compare {
        #[arg(allow_hyphen_values = true)]
        u: String,
        #[arg(allow_hyphen_values = true)]
        v: String,
    },
    /// Move a point into the fundamental domain.
    Reduce {
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// Local poset at a vertex.
    Local {
        #[arg(allow_hyphen_values = true)]
        v: String,
    },
    Neighbours {
        #[arg(allow_hyphen_values = true)]
        v: String,
    },
    /// Height and building type.
    Type {
        #[arg(allow_hyphen_values = true)]
        v: String,
    },
}

#[derive(Args)]
struct SuiteArgs {
    /// Suite names; `all` or nothing runs every suite.
    names: Vec<String>,
    /// List the registered suites.
    #[arg(long)]
    list: bool,
}

/// Output of one command: a JSON value and its text rendering.
struct Rendered {
    json: Value,
    text: String,
}

fn rendered(json: Value, text: impl Into<String>) -> Rendered {
    Rendered { json, text: text.into() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((out, code)) => match write_output(&cli, &out) {
            Ok(()) => ExitCode::from(code),
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        },
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn write_output(cli: &Cli, out: &Rendered) -> Result<()> {
    let mut body = match cli.format {
        Format::Json => match &out.json {
            Value::Array(lines) if matches!(cli.command, Command::Suite(_)) => {
                lines.iter().map(Value::to_string).collect::<Vec<_>>().join("\n")
            }
            other => serde_json::to_string_pretty(other)?,
        },
        Format::Text => out.text.clone(),
    };
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match &cli.out {
        Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display())),
        None => std::io::stdout().write_all(body.as_bytes()).context("writing stdout"),
    }
}

fn exec(cli: &Cli) -> Exec {
    if cli.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    }
}

fn run(cli: &Cli) -> Result<(Rendered, u8)> {
    let out = match &cli.command {
        Command::Analyze(args) => analyze(cli, args)?,
        Command::Generate { recipe } => {
            let p = generate_with_cap(&parse_recipe(recipe)?, cli.cap)?;
            let json = serde_json::to_value(p.to_json())?;
            let text = format!("{}\n", serde_json::to_string_pretty(&json)?);
            rendered(json, text)
        }
        Command::Garside(args) => garside(cli, args)?,
        Command::Affine(args) => affine(cli, args)?,
        Command::Helly(args) => helly(cli, args)?,
        Command::Coxeter(args) => coxeter_cmd(args)?,
        Command::Numeric => {
            let l = loop_length();
            let text = format!(
                "value {:.6} rad, ratio to 2pi {:.4}, below 2pi: {}",
                l.value, l.ratio_to_2pi, l.less_than_2pi
            );
            rendered(serde_json::to_value(l)?, text)
        }
        Command::Suite(args) => return suite(cli, args),
    };
    Ok((out, 0))
}

/// `kind:a:b` shorthand or a JSON catalog recipe.
fn parse_recipe(text: &str) -> Result<CatalogRecipe> {
    let text = text.trim();
    if text.starts_with('{') {
        return serde_json::from_str(text).context("parsing catalog recipe JSON");
    }
    let mut parts = text.split(':');
    let kind = parts.next().unwrap_or_default();
    let nums: Vec<u64> = parts
        .map(|p| p.parse().with_context(|| format!("bad number `{p}` in `{text}`")))
        .collect::<Result<_>>()?;
    let arg = |i: usize| -> Result<usize> {
        nums.get(i).map(|&v| v as usize).ok_or_else(|| anyhow!("`{kind}` needs {} parameter(s)", i + 1))
    };
    let recipe = match kind {
        "boolean" => CatalogRecipe::Boolean { n: arg(0)? },
        "partition" => CatalogRecipe::Partition { n: arg(0)? },
        "noncrossing" => CatalogRecipe::Noncrossing { n: arg(0)? },
        "chain" => CatalogRecipe::Chain { n: arg(0)? },
        "weak-order" => CatalogRecipe::WeakOrder { n: arg(0)? },
        "subspace" => CatalogRecipe::Subspace { q: arg(0)?, n: arg(1)? },
        "polar" => CatalogRecipe::Polar { q: arg(0)?, dim: arg(1)? },
        "random-graded" => CatalogRecipe::RandomGraded { seed: nums.first().copied().unwrap_or(0), size: arg(1)? },
        _ => bail!("unknown catalog kind `{kind}`"),
    };
    Ok(recipe)
}

fn analyze(cli: &Cli, args: &AnalyzeArgs) -> Result<Rendered> {
    let p = if args.file {
        let text = fs::read_to_string(&args.source).with_context(|| format!("reading {}", args.source))?;
        FinitePoset::from_json_str(&text)?
    } else {
        generate_with_cap(&parse_recipe(&args.source)?, cli.cap)?
    };
    let profile = p.analyze_with(exec(cli));
    let bowtie = if profile.bounded() && profile.graded {
        p.find_bowtie()?.map(|b| [p.id(b.a), p.id(b.b), p.id(b.c), p.id(b.d)].map(str::to_string))
    } else {
        None
    };
    let mut json = json!({ "size": p.len(), "profile": profile, "bowtie": bowtie });
    let mut text = format!(
        "size {}\ngraded {}\nrank {}\nmeet-semilattice {}\nlattice {}\nflag {}\nbowtie {}\n",
        p.len(),
        profile.graded,
        profile.rank.map_or("-".into(), |r| r.to_string()),
        profile.meet_semilattice,
        profile.lattice,
        profile.flag,
        bowtie.as_ref().map_or("none".into(), |b| b.join(" ")),
    );
    if let Some(pair) = &args.pair {
        let (a, b) = (p.elem(&pair[0])?, p.elem(&pair[1])?);
        let meet = p.meet(a, b).map(|x| p.id(x).to_string());
        let join = p.join(a, b).map(|x| p.id(x).to_string());
        json["meet"] = json!(meet);
        json["join"] = json!(join);
        text.push_str(&format!(
            "meet {}\njoin {}\n",
            meet.as_deref().unwrap_or("none"),
            join.as_deref().unwrap_or("none")
        ));
    }
    Ok(rendered(json, text))
}

fn garside(cli: &Cli, args: &GarsideArgs) -> Result<Rendered> {
    let g = Garside::new(args.strands)?;
    let show = |b: &Braid| g.display(b).to_string();
    let one = |b: Braid| {
        let s = show(&b);
        rendered(json!({ "normal_form": s, "inf": b.inf(), "factors": b.canonical_length() }), s)
    };
    let list = |items: Vec<Braid>| {
        let names: Vec<String> = items.iter().map(show).collect();
        let text = names.join("\n");
        rendered(json!({ "count": names.len(), "elements": names }), text)
    };
    Ok(match &args.op {
        GarsideOp::NormalForm { word } => one(g.parse(word)?),
        GarsideOp::Multiply { a, b } => one(g.multiply(&g.parse(a)?, &g.parse(b)?)),
        GarsideOp::Inverse { a } => one(g.inverse(&g.parse(a)?)),
        GarsideOp::PrefixLeq { a, b } => {
            let r = g.prefix_leq(&g.parse(a)?, &g.parse(b)?);
            rendered(json!({ "leq": r }), r.to_string())
        }
        GarsideOp::Interval { lo, hi } => list(g.interval(&g.parse(lo)?, &g.parse(hi)?, cli.cap)?),
        GarsideOp::Ball { centre, radius } => list(g.thickening_ball(&g.parse(centre)?, *radius, cli.cap)?),
        GarsideOp::Lattice { a, b, window } => {
            let (meet, join) = g.lattice_ops_window(
                &g.parse(a)?,
                &g.parse(b)?,
                &g.delta_power(-window),
                &g.delta_power(*window),
                cli.cap,
            )?;
            let (m, j) = (show(&meet), show(&join));
            rendered(json!({ "meet": m, "join": j }), format!("meet {m}\njoin {j}"))
        }
    })
}

fn affine(cli: &Cli, args: &AffineArgs) -> Result<Rendered> {
    let base = generate_with_cap(&parse_recipe(&args.base)?, cli.cap)?;
    let m = AffineLattice::new(base, args.denominator)?;
    let point = |text: &str| -> Result<MPoint> {
        if let Some(v) = text.strip_prefix("const:") {
            let value = hellylat::affine::parse_rational(v).map_err(|e| anyhow!(e))?;
            return Ok(m.constant(m.to_units(value)?));
        }
        let json: MPointJson = serde_json::from_str(text).with_context(|| format!("parsing point `{text}`"))?;
        Ok(m.from_json(&json)?)
    };
    let one = |p: MPoint| rendered(serde_json::to_value(m.to_json(&p)).expect("serializable"), m.describe(&p));
    let list = |items: Vec<MPoint>| {
        let json: Vec<Value> = items.iter().map(|p| serde_json::to_value(m.to_json(p)).expect("serializable")).collect();
        let text = items.iter().map(|p| m.describe(p)).collect::<Vec<_>>().join("\n");
        rendered(json!({ "count": items.len(), "points": json }), text)
    };
    Ok(match &args.op {
        AffineOp::Leq { x, y, oracle } => {
            let mode = if *oracle { hellylat::affine::OrderMode::Oracle } else { hellylat::affine::OrderMode::Criterion };
            let r = m.leq_with(&point(x)?, &point(y)?, mode);
            rendered(json!({ "leq": r }), r.to_string())
        }
        AffineOp::Join { x, y } => one(m.join(&point(x)?, &point(y)?)),
        AffineOp::Meet { x, y } => one(m.meet(&point(x)?, &point(y)?)),
        AffineOp::Distance { x, y } => {
            let d = m.distance(&point(x)?, &point(y)?);
            rendered(json!({ "distance": d.to_string() }), d.to_string())
        }
        AffineOp::Superiors { x } => {
            let steps = m.elementary_superiors(&point(x)?);
            let json: Vec<Value> = steps
                .iter()
                .map(|(s, q)| json!({ "step": s, "point": serde_json::to_value(m.to_json(q)).expect("serializable") }))
                .collect();
            let text = steps
                .iter()
                .map(|(s, q)| format!("[{}..{}] {} -> {}", s.start, s.end, m.base().id(s.element), m.describe(q)))
                .collect::<Vec<_>>()
                .join("\n");
            rendered(json!(json), text)
        }
        AffineOp::Interval { lo, hi } => list(m.interval(&point(lo)?, &point(hi)?, cli.cap)?),
        AffineOp::Geodesic { x, y, at } => one(m.geodesic_point(&point(x)?, &point(y)?, *at)?),
        AffineOp::Neighbours { x } => list(m.thickening_neighbours(&point(x)?)),
    })
}

fn load_graph(recipe: &str) -> Result<Graph> {
    let size = |s: &str| -> Result<usize> { s.parse().with_context(|| format!("bad size in `{recipe}`")) };
    if let Some(n) = recipe.strip_prefix("cycle:") {
        return Ok(Graph::cycle(size(n)?));
    }
    if let Some(n) = recipe.strip_prefix("complete:") {
        return Ok(Graph::complete(size(n)?));
    }
    if let Some(dims) = recipe.strip_prefix("king:") {
        let (w, h) = dims.split_once('x').ok_or_else(|| anyhow!("expected king:WxH"))?;
        return Ok(Graph::king_grid(size(w)?, size(h)?));
    }
    let text = fs::read_to_string(recipe).with_context(|| format!("reading {recipe}"))?;
    let json: GraphJson = serde_json::from_str(&text).context("parsing graph JSON")?;
    Ok(Graph::from_json(&json)?)
}

fn outcome_json(g: &Graph, family: &[Ball], outcome: &HellyOutcome) -> Rendered {
    match outcome {
        HellyOutcome::Pass => rendered(json!({ "helly": true, "balls": family.len() }), "pass"),
        HellyOutcome::Violation(positions) => {
            let balls: Vec<String> =
                positions.iter().map(|&i| format!("{}:{}", g.name(family[i].center), family[i].radius)).collect();
            let text = format!("violation {}", balls.join(","));
            rendered(json!({ "helly": false, "violation": balls }), text)
        }
    }
}

fn helly(cli: &Cli, args: &HellyArgs) -> Result<Rendered> {
    let g = load_graph(&args.graph)?;
    Ok(match &args.op {
        HellyOp::Balls { balls } => {
            let family = balls
                .iter()
                .map(|item| {
                    let (name, r) = item.trim().rsplit_once(':').ok_or_else(|| anyhow!("expected name:radius"))?;
                    Ok(Ball { center: g.vertex(name)?, radius: r.parse().context("bad radius")? })
                })
                .collect::<Result<Vec<_>>>()?;
            outcome_json(&g, &family, &helly_check(&g, &family, cli.cap)?)
        }
        HellyOp::Cliques => {
            let outcome = clique_helly_check(&g, cli.cap)?;
            let passed = outcome.passed();
            rendered(json!({ "clique_helly": passed }), if passed { "pass" } else { "violation" })
        }
        HellyOp::Window { core, radius } => {
            let core = core.iter().map(|n| Ok(g.vertex(n.trim())?)).collect::<Result<Vec<_>>>()?;
            let (family, outcome) = helly_check_window(&g, &core, *radius, cli.cap, exec(cli))?;
            outcome_json(&g, &family, &outcome)
        }
    })
}

fn coxeter_cmd(args: &CoxeterArgs) -> Result<Rendered> {
    let family = match args.family {
        FamilyArg::AExtended => Family::AExtended,
        FamilyArg::C => Family::C,
    };
    let point = |text: &str| -> Result<LatticePoint> {
        let coords = text
            .split(',')
            .map(|c| c.trim().parse::<i64>().with_context(|| format!("bad coordinate `{c}`")))
            .collect::<Result<Vec<_>>>()?;
        Ok(LatticePoint::new(family, coords)?)
    };
    let names = |ps: &[LatticePoint]| ps.iter().map(ToString::to_string).collect::<Vec<_>>();
    Ok(match &args.op {
        CoxeterOp::Compare { u, v } => {
            let word = match coxeter::compare(&point(u)?, &point(v)?)? {
                Some(std::cmp::Ordering::Less) => "less",
                Some(std::cmp::Ordering::Greater) => "greater",
                Some(std::cmp::Ordering::Equal) => "equal",
                None => "incomparable",
            };
            rendered(json!({ "comparison": word }), word)
        }
        CoxeterOp::Reduce { x } => {
            let r = coxeter::reduce_to_fundamental(&point(x)?)?;
            let text = format!("{} via [{}]", r.point, r.witness.iter().map(ToString::to_string).collect::<Vec<_>>().join(","));
            rendered(serde_json::to_value(&r)?, text)
        }
        CoxeterOp::Local { v } => {
            let local = coxeter::local_poset(&point(v)?)?;
            let profile = local.poset.analyze();
            let json = json!({
                "below": names(&local.below),
                "above": names(&local.above),
                "poset": local.poset.to_json(),
                "profile": profile,
                "product_violations": local.product_violations().len(),
            });
            let text = format!(
                "below {}\nabove {}\ngraded {} lattice {} flag {}",
                names(&local.below).join(" "),
                names(&local.above).join(" "),
                profile.graded,
                profile.lattice,
                profile.flag
            );
            rendered(json, text)
        }
        CoxeterOp::Neighbours { v } => {
            let ns = names(&coxeter::neighbours(&point(v)?)?);
            let text = ns.join(" ");
            rendered(json!(ns), text)
        }
        CoxeterOp::Type { v } => {
            let p = point(v)?;
            rendered(
                json!({ "height": p.height(), "type": p.vertex_type() }),
                format!("height {} type {}", p.height(), p.vertex_type()),
            )
        }
    })
}

fn suite(cli: &Cli, args: &SuiteArgs) -> Result<(Rendered, u8)> {
    if args.list {
        let json: Vec<Value> = SUITES.iter().map(|s| json!({ "suite": s.name, "theorem": s.claim })).collect();
        let text = SUITES.iter().map(|s| format!("{:<24} {}", s.name, s.claim)).collect::<Vec<_>>().join("\n");
        return Ok((rendered(json!(json), text), 0));
    }
    let names = if args.names.is_empty() { vec!["all".to_string()] } else { args.names.clone() };
    let config = SuiteConfig { seed: cli.seed, cap: cli.cap, exec: exec(cli) };
    let reports = run_suites(&names, &config)?;
    let code = if reports.iter().any(|r| r.status == Status::Fail) { 1 } else { 0 };
    let text = reports
        .iter()
        .map(|r| {
            let status = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
            };
            format!("{status} {:<24} {:>6} ms  {}", r.suite, r.millis, r.witness)
        })
        .collect::<Vec<_>>()
        .join("\n");
    Ok((rendered(serde_json::to_value(&reports)?, text), code))
}
