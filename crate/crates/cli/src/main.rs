use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use sepsys::doc::{self, AnyDoc};
use sepsys::gallery;
use sepsys::graphsep::{build_restriction_system, enumerate_separations, Graph};
use sepsys::normality::normality_certificate;
use sepsys::orient::{consistent_orientations, splits_at, splitting_subsets};
use sepsys::{search, suites, InverseSystem, SepSystem};

#[derive(Parser)]
#[command(name = "sepsys", version, about = "Analyse finite and profinite abstract separation systems")]
struct Cli {
    /// Print the machine-readable report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Also write the machine-readable report to this file.
    #[arg(long, global = true, value_name = "FILE")]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a system or inverse system document is valid.
    Validate { file: PathBuf },
    /// Classify every element, test nestedness and list splitting stars.
    Analyze { file: PathBuf },
    /// List the consistent orientations.
    Orients { file: PathBuf },
    /// List the splitting stars.
    Stars { file: PathBuf },
    /// Show the limit of an inverse system with its coordinates.
    Limit { file: PathBuf },
    /// Closure of a set of limit elements.
    Closure {
        file: PathBuf,
        /// Limit element labels.
        #[arg(long, value_delimiter = ',', required = true)]
        subset: Vec<String>,
        /// Close over the points below the top only, reading the system as
        /// a truncated chain.
        #[arg(long)]
        probe: bool,
    },
    /// Project limit elements to a point.
    Project {
        file: PathBuf,
        /// Point label.
        #[arg(long)]
        at: String,
        /// Limit element labels; all elements by default.
        #[arg(long, value_delimiter = ',')]
        subset: Vec<String>,
    },
    /// Emit a named example as an inverse system document.
    Gen {
        example: String,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Print the example's certificate checks instead of the document.
        #[arg(long)]
        certify: bool,
    },
    /// Separations of a graph with order below a bound.
    Graph {
        file: PathBuf,
        #[arg(long)]
        order_bound: usize,
        /// Vertex subsets (comma-separated names), one per flag; builds the
        /// restriction system over them.
        #[arg(long)]
        chain: Vec<String>,
    },
    /// Run a named property suite.
    Check {
        suite: String,
        #[arg(long, env = "SEPSYS_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long)]
        size: Option<usize>,
        /// Run on this inverse system document instead of random instances.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Hunt for counterexamples to a property, shrinking the first found.
    Search {
        #[arg(long)]
        property: String,
        #[arg(long, env = "SEPSYS_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 5)]
        size: usize,
    },
    /// List suites, search properties and examples.
    List,
}

/// Text for people, JSON for machines, and whether every check passed.
struct Report {
    text: String,
    json: Value,
    ok: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(rep) => {
            if let Some(path) = &cli.report {
                let body = serde_json::to_string_pretty(&rep.json).expect("report serializes");
                if let Err(e) = std::fs::write(path, body) {
                    eprintln!("error: cannot write report {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&rep.json).expect("report serializes"));
            } else {
                print!("{}", rep.text);
            }
            ExitCode::from(if rep.ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

enum Loaded {
    System(SepSystem),
    Inverse(InverseSystem),
}

impl Loaded {
    /// The system itself, or the limit of an inverse system.
    fn system(&self) -> &SepSystem {
        match self {
            Loaded::System(s) => s,
            Loaded::Inverse(is) => is.limit().system(),
        }
    }
}

fn load(path: &Path) -> Result<Loaded> {
    Ok(match doc::parse_any(&read(path)?)? {
        AnyDoc::System(d) => Loaded::System(doc::system_from_doc(&d)?),
        AnyDoc::Inverse(d) => Loaded::Inverse(doc::inverse_from_doc(&d)?),
    })
}

fn load_inverse(path: &Path) -> Result<InverseSystem> {
    match load(path)? {
        Loaded::Inverse(is) => Ok(is),
        Loaded::System(_) => bail!("{} is a single system; an inverse system is needed", path.display()),
    }
}

fn labels(s: &SepSystem, set: &sepsys::ElemSet) -> String {
    format!("{{{}}}", s.set_labels(set).join(", "))
}

fn run(cmd: &Command) -> Result<Report> {
    match cmd {
        Command::Validate { file } => validate(file),
        Command::Analyze { file } => analyze(file),
        Command::Orients { file } => orients(file),
        Command::Stars { file } => stars(file),
        Command::Limit { file } => limit(file),
        Command::Closure { file, subset, probe } => closure(file, subset, *probe),
        Command::Project { file, at, subset } => project(file, at, subset),
        Command::Gen { example, depth, certify } => gen(example, *depth, *certify),
        Command::Graph { file, order_bound, chain } => graph(file, *order_bound, chain),
        Command::Check { suite, seed, count, size, input } => check(suite, *seed, *count, *size, input.as_deref()),
        Command::Search { property, seed, count, size } => search_cmd(property, *seed, *count, *size),
        Command::List => Ok(list()),
    }
}

fn validate(file: &Path) -> Result<Report> {
    let loaded = load(file)?;
    let (text, json) = match &loaded {
        Loaded::System(s) => (
            format!("valid separation system: {} elements, {} separations\n", s.len(), s.separations().len()),
            json!({"kind": "system", "valid": true, "elements": s.len(), "separations": s.separations().len()}),
        ),
        Loaded::Inverse(is) => {
            let n = is.limit().system().len();
            (
                format!(
                    "valid inverse system: {} points, limit has {n} elements, {}surjective\n",
                    is.poset().len(),
                    if is.is_surjective() { "" } else { "not " }
                ),
                json!({"kind": "inverse", "valid": true, "points": is.poset().len(), "limit_elements": n,
                       "surjective": is.is_surjective()}),
            )
        }
    };
    Ok(Report { text, json, ok: true })
}

#[derive(Serialize)]
struct ElementRow {
    label: String,
    inverse: String,
    small: bool,
    co_small: bool,
    degenerate: bool,
    trivial_witnesses: Vec<String>,
    co_trivial_witnesses: Vec<String>,
}

fn analyze(file: &Path) -> Result<Report> {
    let loaded = load(file)?;
    let s = loaded.system();
    let names = |v: &Option<Vec<sepsys::Elem>>| v.iter().flatten().map(|&w| s.label(w).to_string()).collect::<Vec<_>>();
    let rows: Vec<ElementRow> = s
        .elements()
        .map(|e| {
            let c = s.classify(e);
            ElementRow {
                label: s.label(e).into(),
                inverse: s.label(s.inv(e)).into(),
                small: c.small,
                co_small: c.co_small,
                degenerate: c.degenerate,
                trivial_witnesses: names(&c.trivial),
                co_trivial_witnesses: names(&c.co_trivial),
            }
        })
        .collect();
    let crossing = s.crossing_pair(&s.all());
    let stars = splitting_subsets(s);
    let mut text = String::new();
    if matches!(loaded, Loaded::Inverse(_)) {
        text.push_str("(limit of the inverse system)\n");
    }
    text.push_str(&format!("{:<16} {:<16} {:<6} {:<8} {:<5} {}\n", "element", "inverse", "small", "co-small", "degen", "trivial by"));
    let flag = |b: bool| if b { "yes" } else { "-" };
    for r in &rows {
        text.push_str(&format!(
            "{:<16} {:<16} {:<6} {:<8} {:<5} {}\n",
            r.label,
            r.inverse,
            flag(r.small),
            flag(r.co_small),
            flag(r.degenerate),
            if r.trivial_witnesses.is_empty() { "-".to_string() } else { r.trivial_witnesses.join(" ") }
        ));
    }
    match crossing {
        None => text.push_str("nested: yes\n"),
        Some((a, b)) => text.push_str(&format!("nested: no ({} crosses {})\n", s.label(a), s.label(b))),
    }
    text.push_str(&format!("splitting stars ({}):\n", stars.len()));
    for st in &stars {
        text.push_str(&format!("  {}\n", labels(s, st)));
    }
    let json = json!({
        "elements": rows,
        "nested": crossing.is_none(),
        "crossing": crossing.map(|(a, b)| [s.label(a), s.label(b)]),
        "splitting_stars": doc::stars_doc(s, &stars),
    });
    Ok(Report { text, json, ok: true })
}

fn orients(file: &Path) -> Result<Report> {
    let loaded = load(file)?;
    let s = loaded.system();
    let os = consistent_orientations(s);
    let mut text = format!("{} consistent orientations\n", os.len());
    for o in &os {
        let split = splits_at(s, o).map(|st| labels(s, &st)).unwrap_or_else(|| "-".into());
        text.push_str(&format!("  {}  splits at {split}\n", labels(s, o)));
    }
    Ok(Report { text, json: json!({"orientations": doc::stars_doc(s, &os)}), ok: true })
}

fn stars(file: &Path) -> Result<Report> {
    let loaded = load(file)?;
    let s = loaded.system();
    let st = splitting_subsets(s);
    let mut text = format!("{} splitting stars\n", st.len());
    for x in &st {
        text.push_str(&format!("  {}\n", labels(s, x)));
    }
    Ok(Report { text, json: json!({"splitting_stars": doc::stars_doc(s, &st)}), ok: true })
}

fn limit(file: &Path) -> Result<Report> {
    let is = load_inverse(file)?;
    let lim = is.limit();
    let ls = lim.system();
    let poset = is.poset();
    let mut text = format!("limit: {} elements over {} points\n", ls.len(), poset.len());
    let mut coords = serde_json::Map::new();
    for x in ls.elements() {
        let c: Vec<String> =
            poset.points().into_iter().map(|p| format!("{}:{}", poset.label(p), is.level(p).label(lim.project(x, p)))).collect();
        text.push_str(&format!("  {:<16} {}\n", ls.label(x), c.join(" ")));
        let obj: serde_json::Map<String, Value> = poset
            .points()
            .into_iter()
            .map(|p| (poset.label(p).to_string(), Value::from(is.level(p).label(lim.project(x, p)))))
            .collect();
        coords.insert(ls.label(x).into(), Value::Object(obj));
    }
    Ok(Report { text, json: json!({"system": doc::system_doc(ls), "coordinates": coords}), ok: true })
}

fn closure(file: &Path, subset: &[String], probe: bool) -> Result<Report> {
    let is = load_inverse(file)?;
    let ls = is.limit().system();
    let set = doc::set_from_labels(ls, subset)?;
    let points = if probe { is.probe_points() } else { is.poset().points() };
    let cl = is.limit().closure_on(&set, &points);
    let closed = cl == set;
    let text = format!("closure: {}\nclosed: {}\n", labels(ls, &cl), if closed { "yes" } else { "no" });
    Ok(Report { text, json: json!({"closure": ls.set_labels(&cl), "closed": closed, "probe": probe}), ok: true })
}

fn project(file: &Path, at: &str, subset: &[String]) -> Result<Report> {
    let is = load_inverse(file)?;
    let p = is.poset().find(at).with_context(|| format!("unknown point `{at}`"))?;
    let lim = is.limit();
    let ls = lim.system();
    let set = if subset.is_empty() { ls.all() } else { doc::set_from_labels(ls, subset)? };
    let lvl = is.level(p);
    let mut text = String::new();
    let mut map = serde_json::Map::new();
    for &x in &set {
        let y = lvl.label(lim.project(x, p));
        text.push_str(&format!("{} -> {y}\n", ls.label(x)));
        map.insert(ls.label(x).into(), Value::from(y));
    }
    Ok(Report { text, json: json!({"point": at, "projection": map}), ok: true })
}

fn gen(example: &str, depth: usize, certify: bool) -> Result<Report> {
    let is = gallery::gen(example, depth)?;
    if !certify {
        let d = doc::inverse_doc(&is);
        let text = serde_json::to_string_pretty(&d)? + "\n";
        return Ok(Report { text, json: to_json(&d), ok: true });
    }
    let cert = gallery::certificate(example, depth)?;
    let mut text = format!("certificate for {example} at depth {depth}\n");
    for (name, ok) in &cert.checks {
        text.push_str(&format!("  [{}] {name}\n", if *ok { "ok" } else { "FAIL" }));
    }
    let mut json = json!({"certificate": cert});
    if gallery::CHAIN_NAMES.contains(&example) {
        let rep = normality_certificate(example, depth)?;
        text.push_str(&format!("normality verdict: {:?} (depth {})\n", rep.verdict, rep.depth));
        json["normality"] = to_json(&rep);
    }
    Ok(Report { text, json, ok: cert.passed() })
}

fn graph(file: &Path, k: usize, chain: &[String]) -> Result<Report> {
    let g = Graph::parse(&read(file)?)?;
    if chain.is_empty() {
        let gs = enumerate_separations(&g, k)?;
        let d = doc::system_doc(&gs.system);
        let text = format!("{} separations of order < {k}\n{}\n", gs.seps.len(), serde_json::to_string_pretty(&d)?);
        return Ok(Report { text, json: to_json(&d), ok: true });
    }
    let subsets: Vec<u64> = chain
        .iter()
        .map(|c| {
            let names: Vec<&str> = c.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            g.mask_of(&names)
        })
        .collect::<Result<_, _>>()?;
    let rs = build_restriction_system(&g, k, &subsets)?;
    let d = doc::inverse_doc(&rs.system);
    let text = serde_json::to_string_pretty(&d)? + "\n";
    Ok(Report { text, json: to_json(&d), ok: true })
}

fn suite_text(res: &suites::SuiteResult) -> String {
    let mut text = format!(
        "{}: {} instances, {} checks, {} skipped by preconditions, {} violations\n",
        res.suite,
        res.instances,
        res.checks,
        res.skipped,
        res.violations.len()
    );
    for v in res.violations.iter().take(20) {
        match v.seed {
            Some(s) => text.push_str(&format!("  violation (seed {s}): {}\n", v.detail)),
            None => text.push_str(&format!("  violation: {}\n", v.detail)),
        }
    }
    for n in res.notes.iter().take(20) {
        text.push_str(&format!("  note: {n}\n"));
    }
    if res.notes.len() > 20 {
        text.push_str(&format!("  ... {} more notes\n", res.notes.len() - 20));
    }
    text
}

fn check(suite: &str, seed: u64, count: usize, size: Option<usize>, input: Option<&Path>) -> Result<Report> {
    let res = match input {
        Some(path) => suites::run_on_system(suite, &load_inverse(path)?)?,
        None => {
            let s = suites::find(suite).with_context(|| format!("unknown suite `{suite}`"))?;
            suites::run_suite(suite, suites::SuiteParams { seed, count, size: size.unwrap_or(s.default_size) })?
        }
    };
    Ok(Report { text: suite_text(&res), json: to_json(&res), ok: res.passed() })
}

fn search_cmd(property: &str, seed: u64, count: usize, size: usize) -> Result<Report> {
    let rep = search::search(property, seed, count, size)?;
    let text = match &rep.counterexample {
        None => format!("{property}: no counterexample in {} instances\n", rep.instances),
        Some(c) => format!(
            "{property}: counterexample at seed {} ({} separations, shrunk to {}): {}\n{}\n",
            c.seed,
            c.original_separations,
            c.shrunk.inverse.len(),
            c.reason,
            serde_json::to_string_pretty(&c.shrunk)?
        ),
    };
    let ok = rep.counterexample.is_none();
    Ok(Report { text, json: to_json(&rep), ok })
}

fn list() -> Report {
    let mut text = String::from("suites:\n");
    for s in suites::SUITES {
        text.push_str(&format!("  {:<30} {}\n", s.name, s.about));
    }
    text.push_str("search properties:\n");
    for p in search::PROPERTIES {
        text.push_str(&format!("  {:<34} {}\n", p.name, p.about));
    }
    text.push_str(&format!("examples: {}\n", gallery::EXAMPLE_NAMES.join(", ")));
    let json = json!({
        "suites": suites::names(),
        "properties": search::PROPERTIES.iter().map(|p| p.name).collect::<Vec<_>>(),
        "examples": gallery::EXAMPLE_NAMES,
    });
    Report { text, json, ok: true }
}
