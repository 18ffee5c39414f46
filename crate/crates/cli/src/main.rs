//! `clusterd`: Laurent expansions of type D cluster variables from the
//! command line.

mod render;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use clusterd::atomic::{self, ExpansionTable};
use clusterd::cluster::{enumerate_seeds, expand_by_mutation, oracle_sweep, Seed};
use clusterd::fixtures;
use clusterd::laurent::{default_names, LaurentPoly};
use clusterd::snake::{self, build_snake, enumerate_matchings, expand_tagged_via_matchings, matching_to_path};
use clusterd::surface::{parse_arc_list, parse_arc_term, ArcTerm, OrdinaryArc, Surface, TaggedArc};
use clusterd::tpath::{self, expand_tagged, path_json, path_text, tpaths_of, Labels};
use clusterd::triangulation::{CrossingSequence, IdealTriangulation, TaggedTriangulation};
use clusterd::Error;

#[derive(Parser)]
#[command(name = "clusterd", version, about = "Laurent expansions of type D cluster variables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for the sweeps; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Largest n accepted by enumerations.
    #[arg(long, global = true, default_value_t = 8)]
    seed_bound: usize,
}

#[derive(Args, Clone)]
struct Input {
    /// Number of marked points on the boundary.
    #[arg(long)]
    n: Option<usize>,
    /// Arcs of the triangulation, e.g. `R(0),RN(0),P(1,3),P(0,3)`, or `@file`.
    #[arg(long)]
    triangulation: Option<String>,
    /// A bundled configuration: folded-square, two-radii, around-folded, loop-on-wheel, radii-and-peripheral.
    #[arg(long)]
    fixture: Option<String>,
    /// The arc to expand, e.g. `P(1,0)`.
    #[arg(long)]
    arc: Option<String>,
    /// Walk the arc from its second endpoint.
    #[arg(long)]
    reversed: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Tpath,
    Snake,
    Mutation,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Oracle,
    Bijection,
    Lemmas,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Expand a cluster variable in the cluster of a triangulation.
    Expand {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "tpath")]
        method: Method,
    },
    /// List the complete T-paths of an arc.
    Paths {
        #[command(flatten)]
        input: Input,
    },
    /// Describe the snake graph of an arc.
    Snake {
        #[command(flatten)]
        input: Input,
    },
    /// List the perfect matchings of the snake graph and their T-paths.
    Matchings {
        #[command(flatten)]
        input: Input,
    },
    /// The exchange graph: every seed and its neighbours.
    Seeds {
        #[command(flatten)]
        input: Input,
    },
    /// Run the exhaustive checks at size n.
    Verify {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
    },
    /// Degree lemmas, the proper-Laurent sweep and decomposition.
    Atomic {
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Largest multiplicity of an arc in the proper-Laurent sweep.
        #[arg(long, default_value_t = 2)]
        max_mult: u32,
        /// A lemma id, `proper-laurent`, `decomposition`, or `all`.
        #[arg(long, default_value = "all")]
        lemma: String,
        /// Write one JSON line per failed instance here.
        #[arg(long)]
        witnesses: Option<PathBuf>,
    },
    /// Draw the triangulation, and the arc if given, as SVG.
    Render {
        #[command(flatten)]
        input: Input,
        /// Output file; `-` for stdout.
        #[arg(long, default_value = "-")]
        out: String,
    },
}

/// Failure kinds and their exit codes.
enum Fail {
    /// A checked property does not hold (1).
    Property(String),
    /// Bad input (2).
    Usage(String),
    /// Two methods disagree (3).
    Mismatch(String),
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Property(_) => 1,
            Fail::Usage(_) => 2,
            Fail::Mismatch(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Fail::Property(m) | Fail::Usage(m) | Fail::Mismatch(m) => m,
        }
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Usage(e.to_string())
    }
}

type Out = Result<(), Fail>;

/// `println!` that exits quietly when stdout is closed.
macro_rules! out {
    ($($t:tt)*) => {
        if writeln!(std::io::stdout(), $($t)*).is_err() {
            std::process::exit(0);
        }
    };
}

/// Points at byte `pos` of `text` under a parse error.
fn annotate(e: Error, what: &str, text: &str, offset: usize) -> Fail {
    match e {
        Error::Parse { pos, msg } => {
            let at = pos + offset;
            Fail::Usage(format!("cannot parse {what}: {msg} at byte {at}\n  {text}\n  {}^", " ".repeat(text[..at.min(text.len())].chars().count())))
        }
        other => Fail::Usage(format!("{what}: {other}")),
    }
}

/// Everything a command needs about its input.
struct Job {
    surface: Surface,
    tagged: TaggedTriangulation,
    ideal: Option<IdealTriangulation>,
    labels: Labels,
    arc: Option<ArcTerm>,
    reversed: bool,
}

impl Job {
    fn names(&self) -> Vec<String> {
        default_names(self.surface.n())
    }

    fn arc(&self) -> Result<ArcTerm, Fail> {
        self.arc.ok_or_else(|| Fail::Usage("this command needs --arc (or a fixture with an arc)".into()))
    }

    fn tagged_arc(&self) -> Result<TaggedArc, Fail> {
        Ok(self.arc()?.tagged(&self.surface)?)
    }

    fn ideal(&self) -> Result<&IdealTriangulation, Fail> {
        self.ideal.as_ref().ok_or_else(|| Fail::Usage(Error::NoIdealForm.to_string()))
    }

    fn sequence(&self) -> Result<CrossingSequence, Fail> {
        let ideal = self.ideal()?;
        let gamma: OrdinaryArc = self.arc()?.ordinary(&self.surface)?;
        if ideal.contains(&gamma) {
            return Err(Fail::Usage(Error::ArcInTriangulation(gamma.to_string()).to_string()));
        }
        Ok(ideal.crossing_sequence(&gamma, self.reversed)?)
    }
}

fn strip_braces(text: &str) -> (&str, usize) {
    match (text.find('{'), text.rfind('}')) {
        (Some(a), Some(b)) if a < b => (&text[a + 1..b], a + 1),
        _ => (text, 0),
    }
}

fn resolve(input: &Input) -> Result<Job, Fail> {
    let fixture = match &input.fixture {
        Some(name) => Some(fixtures::fixture(name).ok_or_else(|| {
            Fail::Usage(format!("unknown fixture `{name}`; known: {}", fixtures::names().join(", ")))
        })?),
        None => None,
    };
    let n = match (&fixture, input.n) {
        (Some(f), Some(n)) if f.surface.n() != n => {
            return Err(Fail::Usage(format!("fixture {} has n = {}, not {n}", f.name, f.surface.n())))
        }
        (Some(f), _) => f.surface.n(),
        (None, Some(n)) => n,
        (None, None) => return Err(Fail::Usage("give --n or --fixture".into())),
    };
    let surface = Surface::new(n)?;
    let (tagged, ideal, labels) = match (&input.triangulation, &fixture) {
        (Some(given), _) => {
            let raw = match given.strip_prefix('@') {
                Some(path) => fs::read_to_string(path).map_err(|e| Fail::Usage(format!("{path}: {e}")))?,
                None => given.clone(),
            };
            let raw = raw.trim().to_string();
            let (body, offset) = strip_braces(&raw);
            let terms = parse_arc_list(body, n).map_err(|e| annotate(e, "triangulation", &raw, offset))?;
            let arcs = terms.into_iter().map(|t| t.tagged(&surface)).collect::<clusterd::Result<Vec<_>>>()?;
            let t = TaggedTriangulation::new(surface, arcs)?;
            let ideal = t.ideal().ok();
            (t, ideal, Labels::default_for(n))
        }
        (None, Some(f)) => (f.tagged(), Some(f.ideal.clone()), f.labels.clone()),
        (None, None) => {
            let t = TaggedTriangulation::wheel(surface);
            let ideal = t.ideal().ok();
            (t, ideal, Labels::default_for(n))
        }
    };
    let arc = match (&input.arc, &fixture) {
        (Some(text), _) => Some(parse_arc_term(text, n).map_err(|e| annotate(e, "arc", text, 0))?),
        (None, Some(f)) => f.gamma.map(|g| parse_arc_term(&g.to_string(), n)).transpose()?,
        (None, None) => None,
    };
    let reversed = input.reversed || (input.arc.is_none() && fixture.as_ref().is_some_and(|f| f.reversed));
    Ok(Job { surface, tagged, ideal, labels, arc, reversed })
}

fn print_json(v: &serde_json::Value) {
    out!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn cmd_expand(job: &Job, method: Method, as_json: bool) -> Out {
    let gamma = job.tagged_arc()?;
    let t = &job.tagged;
    let mut results: Vec<(&str, LaurentPoly)> = Vec::new();
    if matches!(method, Method::Tpath | Method::All) {
        results.push(("tpath", expand_tagged(t, &gamma)?));
    }
    if matches!(method, Method::Snake | Method::All) {
        results.push(("snake", expand_tagged_via_matchings(t, &gamma)?));
    }
    if matches!(method, Method::Mutation | Method::All) {
        results.push(("mutation", expand_by_mutation(t, &gamma)?));
    }
    let names = job.names();
    let agree = results.windows(2).all(|w| w[0].1 == w[1].1);
    if as_json {
        let methods: serde_json::Map<String, serde_json::Value> = results
            .iter()
            .map(|(m, p)| (m.to_string(), json!({"text": p.to_text(&names), "terms": p.to_json()})))
            .collect();
        print_json(&json!({
            "n": job.surface.n(),
            "triangulation": t.arcs().iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "variables": names,
            "arc": gamma.to_string(),
            "text": results[0].1.to_text(&names),
            "methods": methods,
            "agree": agree,
        }));
    } else if agree {
        out!("{}", results[0].1.to_text(&names));
    } else {
        for (m, p) in &results {
            out!("{m}: {}", p.to_text(&names));
        }
    }
    if agree {
        Ok(())
    } else {
        Err(Fail::Mismatch(format!("methods disagree on {gamma} in {t}")))
    }
}

fn cmd_paths(job: &Job, as_json: bool) -> Out {
    let seq = job.sequence()?;
    let ideal = job.ideal()?;
    let paths = tpaths_of(&seq);
    if as_json {
        print_json(&json!({"d": seq.d(), "paths": paths.iter().map(|p| path_json(ideal, p, &job.labels)).collect::<Vec<_>>()}));
    } else {
        for p in &paths {
            out!("{}", path_text(ideal, p, &job.labels));
        }
    }
    Ok(())
}

fn cmd_snake(job: &Job, as_json: bool) -> Out {
    let seq = job.sequence()?;
    let ideal = job.ideal()?;
    let g = build_snake(&seq);
    if as_json {
        print_json(&g.to_json());
        return Ok(());
    }
    out!("{} tiles, {} vertices, {} edges", g.d(), g.vertex_count, g.edges.len());
    for (k, tile) in g.tiles.iter().enumerate() {
        let label = |e: &clusterd::triangulation::Edge| job.labels.name(ideal, &seq.side(e));
        let edges: Vec<String> = tile.edges.iter().map(|&i| label(&g.edges[i].lifted)).collect();
        let glue = match tile.glue {
            Some(snake::Glue::Right) => " -> right",
            Some(snake::Glue::Up) => " -> up",
            None => "",
        };
        out!("tile {}: diagonal {}, edges [{}]{glue}", k + 1, label(&tile.diagonal), edges.join(", "));
    }
    Ok(())
}

fn cmd_matchings(job: &Job, as_json: bool) -> Out {
    let seq = job.sequence()?;
    let ideal = job.ideal()?;
    let g = build_snake(&seq);
    let paths = tpaths_of(&seq);
    let mut rows = Vec::new();
    for m in enumerate_matchings(&g) {
        let labels: Vec<String> = m.iter().map(|&i| job.labels.name(ideal, &seq.side(&g.edges[i].lifted))).collect();
        let path = matching_to_path(&g, &m).and_then(|w| paths.iter().find(|p| p.lifted == w));
        let text = path.map(|p| path_text(ideal, p, &job.labels));
        if text.is_none() {
            return Err(Fail::Property(format!("matching {m:?} does not give a T-path")));
        }
        rows.push((m, labels, text.unwrap()));
    }
    if as_json {
        let v: Vec<serde_json::Value> =
            rows.iter().map(|(m, l, p)| json!({"edges": m, "labels": l, "path": p})).collect();
        print_json(&json!({"matchings": v}));
    } else {
        for (_, l, p) in &rows {
            out!("{{{}}} -> {p}", l.join(", "));
        }
    }
    Ok(())
}

fn cmd_seeds(job: &Job, bound: usize, as_json: bool) -> Out {
    let seeds = enumerate_seeds(&Seed::initial(&job.tagged), bound)?;
    let index: BTreeMap<Vec<TaggedArc>, usize> = seeds.iter().enumerate().map(|(i, s)| (s.cluster.key(), i)).collect();
    let mut rows = Vec::new();
    for s in &seeds {
        let mut nbrs = Vec::new();
        for k in 0..s.x.len() {
            nbrs.push(index[&s.mutate(k)?.cluster.key()]);
        }
        let arcs: Vec<String> = s.cluster.key().iter().map(|a| a.to_string()).collect();
        rows.push((arcs, nbrs));
    }
    if as_json {
        let v: Vec<serde_json::Value> =
            rows.iter().enumerate().map(|(i, (a, nb))| json!({"id": i, "arcs": a, "neighbors": nb})).collect();
        print_json(&json!({"n": job.surface.n(), "seeds": v}));
    } else {
        for (i, (a, nb)) in rows.iter().enumerate() {
            let nb: Vec<String> = nb.iter().map(|x| x.to_string()).collect();
            out!("{i}: {{{}}} -> {}", a.join(","), nb.join(" "));
        }
    }
    Ok(())
}

fn tally_line(name: &str, pairs: usize, failures: &[String], as_json: bool) -> serde_json::Value {
    if !as_json {
        out!("{name}: {pairs} checked, {} failed", failures.len());
        for f in failures.iter().take(10) {
            out!("  {f}");
        }
    }
    json!({"check": name, "checked": pairs, "failed": failures.len(), "failures": failures})
}

fn cmd_verify(n: usize, suite: Suite, bound: usize, as_json: bool) -> Out {
    let s = Surface::new(n)?;
    if n > bound {
        return Err(Error::BoundExceeded { n, bound }.into());
    }
    let mut report = Vec::new();
    let mut failed = false;
    let mut add = |name: &str, pairs: usize, failures: Vec<String>| {
        failed |= !failures.is_empty();
        report.push(tally_line(name, pairs, &failures, as_json));
    };
    if matches!(suite, Suite::Oracle | Suite::All) {
        let r = oracle_sweep(s, bound)?;
        add("oracle", r.pairs, r.failures);
        let r = tpath::notching_sweep(s, bound)?;
        add("notching", r.pairs, r.failures);
        let table = ExpansionTable::new(s, bound)?;
        let mut bad = Vec::new();
        let mut count = 0;
        for (ti, t) in table.triangulations.iter().enumerate() {
            for a in &table.arcs {
                count += 1;
                if !table.get(ti, a).all_coefficients_positive() {
                    bad.push(format!("{t} {a}"));
                }
            }
        }
        add("positivity", count, bad);
    }
    if matches!(suite, Suite::Bijection | Suite::All) {
        let r = snake::bijection_sweep(s, bound)?;
        add("bijection", r.pairs, r.failures);
        let r = tpath::denominator_sweep(s, bound)?;
        add("denominators", r.pairs, r.failures);
    }
    if matches!(suite, Suite::Lemmas | Suite::All) {
        let table = ExpansionTable::new(s, bound)?;
        for l in atomic::verify_degree_lemmas(&table, None)? {
            let mut f: Vec<String> = l.failures.iter().map(|w| serde_json::to_string(w).unwrap()).collect();
            if l.instances == 0 {
                f.push("no instance".into());
            }
            add(&l.id, l.instances, f);
        }
        let r = atomic::sweep_proper_laurent(&table, 2);
        add("proper-laurent", r.instances, r.failures.iter().map(|w| serde_json::to_string(w).unwrap()).collect());
    }
    if as_json {
        print_json(&json!({"n": n, "ok": !failed, "checks": report}));
    }
    if failed {
        Err(Fail::Property("some checks failed".into()))
    } else {
        Ok(())
    }
}

fn cmd_atomic(n: usize, max_mult: u32, lemma: &str, witnesses: Option<&PathBuf>, bound: usize, as_json: bool) -> Out {
    let s = Surface::new(n)?;
    let known = lemma == "all"
        || lemma == "proper-laurent"
        || lemma == "decomposition"
        || atomic::LEMMAS.iter().any(|l| l.0 == lemma);
    if !known {
        let ids: Vec<&str> = atomic::LEMMAS.iter().map(|l| l.0).collect();
        return Err(Fail::Usage(format!("unknown lemma `{lemma}`; known: all, proper-laurent, decomposition, {}", ids.join(", "))));
    }
    let table = ExpansionTable::new(s, bound)?;
    let mut report = Vec::new();
    let mut records: Vec<serde_json::Value> = Vec::new();
    let mut failed = false;
    if lemma != "proper-laurent" && lemma != "decomposition" {
        let filter = (lemma != "all").then_some(lemma);
        for l in atomic::verify_degree_lemmas(&table, filter)? {
            failed |= !l.failures.is_empty() || l.instances == 0;
            records.extend(l.failures.iter().map(|w| serde_json::to_value(w).unwrap()));
            if !as_json {
                out!("{:32} {:6} instances, {} failed", l.id, l.instances, l.failures.len());
            }
            report.push(serde_json::to_value(&l).unwrap());
        }
    }
    if lemma == "all" || lemma == "proper-laurent" {
        let r = atomic::sweep_proper_laurent(&table, max_mult);
        failed |= !r.failures.is_empty();
        records.extend(r.failures.iter().map(|w| serde_json::to_value(w).unwrap()));
        if !as_json {
            out!("{:32} {:6} instances, {} failed ({} terms)", "proper-laurent", r.instances, r.failures.len(), r.terms);
        }
        report.push(json!({"id": "proper-laurent", "max_mult": max_mult, "report": r}));
    }
    if lemma == "all" || lemma == "decomposition" {
        let r = atomic::decomposition_round_trip(n, 200, 1)?;
        failed |= r.recovered != r.trials;
        records.extend(r.failures.iter().map(|f| json!({"decomposition": f})));
        if !as_json {
            out!("{:32} {:6} instances, {} failed", "decomposition", r.trials, r.trials - r.recovered);
        }
        report.push(json!({"id": "decomposition", "report": r}));
    }
    if let Some(path) = witnesses {
        let mut f = fs::File::create(path).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?;
        for r in &records {
            writeln!(f, "{r}").map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?;
        }
    }
    if as_json {
        print_json(&json!({"n": n, "ok": !failed, "results": report}));
    }
    if failed {
        Err(Fail::Property("some instances failed".into()))
    } else {
        Ok(())
    }
}

fn cmd_render(job: &Job, out: &str) -> Out {
    let gamma = job.arc.map(|a| a.tagged(&job.surface)).transpose()?;
    let svg = render::render_svg(&job.tagged, &job.labels.arcs, gamma.as_ref());
    if out == "-" {
        if std::io::stdout().write_all(svg.as_bytes()).is_err() {
            std::process::exit(0);
        }
        Ok(())
    } else {
        fs::write(out, svg).map_err(|e| Fail::Usage(format!("{out}: {e}")))
    }
}

fn run(cli: &Cli) -> Out {
    if let Some(k) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global().map_err(|e| Fail::Usage(e.to_string()))?;
    }
    let bound = cli.seed_bound;
    let check_bound = |job: &Job| {
        if job.surface.n() > bound {
            Err(Fail::from(Error::BoundExceeded { n: job.surface.n(), bound }))
        } else {
            Ok(())
        }
    };
    match &cli.command {
        Command::Expand { input, method } => {
            let job = resolve(input)?;
            check_bound(&job)?;
            cmd_expand(&job, *method, cli.json)
        }
        Command::Paths { input } => cmd_paths(&resolve(input)?, cli.json),
        Command::Snake { input } => cmd_snake(&resolve(input)?, cli.json),
        Command::Matchings { input } => cmd_matchings(&resolve(input)?, cli.json),
        Command::Seeds { input } => {
            let job = resolve(input)?;
            cmd_seeds(&job, bound, cli.json)
        }
        Command::Verify { n, suite } => cmd_verify(*n, *suite, bound, cli.json),
        Command::Atomic { n, max_mult, lemma, witnesses } => {
            cmd_atomic(*n, *max_mult, lemma, witnesses.as_ref(), bound, cli.json)
        }
        Command::Render { input, out } => cmd_render(&resolve(input)?, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
