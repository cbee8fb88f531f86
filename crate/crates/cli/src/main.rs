//! `hhx`: command-line driver for the Hochschild homology pipelines.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use hhx_core::algebra::{is_etale, AlgebraMap, AlgebraMapSpec, GradedAlgebra};
use hhx_core::chains::BettiTable;
use hhx_core::colim::{
    arc_double_complex, arc_functor, cyclic_cech_poset, edge_map, minimal_single_component, poset_homology, Poset,
};
use hhx_core::compare::ComparisonReport;
use hhx_core::glue::{hh_via_suspension, hochschild_cohomology, rhom, suspension_bar, LeftModule};
use hhx_core::loday::{hh, oracle_hh};
use hhx_core::simplicial::{builtin, sphere_min, SimplicialSet};
use hhx_core::sseq::{converges, sseq_infinity, sseq_pages, SpectralSequencePage};
use hhx_core::{Error, Field, Result};

#[derive(Parser, Debug)]
#[command(name = "hhx", version, about = "Exact higher Hochschild homology of finite algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Base field override, `Q` or `Fp:<p>`; rational inputs are reduced mod p.
    #[arg(long, global = true)]
    field: Option<String>,
    /// Print the JSON artifact instead of the table.
    #[arg(long, global = true)]
    json: bool,
    /// Write the JSON artifact to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Higher Hochschild homology through the Loday construction.
    Hh {
        #[arg(long)]
        algebra: PathBuf,
        /// Builtin descriptor (`circle:min`, `sphere:2`, `union:circle:min+point`, …) or a JSON file.
        #[arg(long, default_value = "circle:min")]
        space: String,
        #[arg(long)]
        smax: usize,
        /// Map file exhibiting the algebra over an étale base.
        #[arg(long)]
        base_map: Option<PathBuf>,
    },
    /// Homology of spheres by iterated two-sided bar constructions.
    HhBar {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, default_value_t = 1)]
        sphere: usize,
        #[arg(long)]
        smax: usize,
    },
    /// Classical Hochschild homology from the cyclic bar complex.
    OracleHh {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        smax: usize,
    },
    /// Hochschild cohomology with coefficients in a bimodule (default: the algebra).
    Cohomology {
        #[arg(long)]
        algebra: PathBuf,
        /// Left module over the enveloping algebra.
        #[arg(long)]
        module: Option<PathBuf>,
        #[arg(long)]
        nmax: usize,
    },
    /// Ext between two left modules via the cobar complex.
    Rhom {
        #[arg(long)]
        algebra: PathBuf,
        /// Module file, or `regular`.
        #[arg(long)]
        left: String,
        /// Module file, or `regular`.
        #[arg(long)]
        right: String,
        #[arg(long)]
        nmax: usize,
    },
    /// Homology of a poset with arc-functor coefficients.
    PosetHh {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, conflicts_with = "cover")]
        poset: Option<PathBuf>,
        /// Use the arc cover of the circle with this many cells.
        #[arg(long)]
        cover: Option<usize>,
        #[arg(long)]
        smax: usize,
        /// Object to start the edge map from (default: first minimal single-component object).
        #[arg(long)]
        edge: Option<String>,
    },
    /// Spectral sequence pages of a bar or arc-cover double complex.
    Sseq {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, conflicts_with = "cover")]
        sphere: Option<usize>,
        #[arg(long)]
        cover: Option<usize>,
        #[arg(long)]
        smax: usize,
        #[arg(long, default_value_t = 3)]
        rmax: usize,
    },
    /// Checks whether the algebra is étale and whether HH of a sphere is the algebra.
    EtaleCheck {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, default_value_t = 2)]
        sphere: usize,
        #[arg(long)]
        smax: usize,
    },
    /// Compares two pipelines (`loday`, `oracle`, `bar`, `poset`, `file:<path>`).
    Compare {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long)]
        algebra: Option<PathBuf>,
        #[arg(long, default_value = "circle:min")]
        space: String,
        #[arg(long, default_value_t = 1)]
        sphere: usize,
        #[arg(long)]
        cover: Option<usize>,
        #[arg(long)]
        smax: usize,
    },
    /// Validates algebra, space, poset, module, map and Betti table files.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum)]
        kind: Option<Kind>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Algebra,
    Space,
    Poset,
    Module,
    Map,
    Betti,
}

/// What a command produced: a JSON artifact and its human rendering.
struct Output {
    artifact: String,
    human: String,
    exit: u8,
}

impl Output {
    fn new<T: Serialize>(value: &T, human: String) -> Output {
        let mut artifact = serde_json::to_string_pretty(value).expect("artifact serializes");
        artifact.push('\n');
        Output {
            artifact,
            human,
            exit: 0,
        }
    }

    fn table(t: &BettiTable) -> Output {
        Output {
            artifact: t.to_json(),
            human: format!("[{}]\n{}", t.provenance, t.render()),
            exit: 0,
        }
    }
}

struct Ctx {
    field: Option<Field>,
}

impl Ctx {
    fn read(path: &Path) -> Result<String> {
        fs::read_to_string(path).map_err(|e| Error::usage(format!("cannot read {}: {e}", path.display())))
    }

    fn algebra(&self, path: &Path) -> Result<GradedAlgebra> {
        GradedAlgebra::from_json(&Self::read(path)?, self.field)
    }

    fn space(descriptor: &str) -> Result<SimplicialSet> {
        if descriptor.ends_with(".json") {
            SimplicialSet::from_json(&Self::read(Path::new(descriptor))?)
        } else {
            builtin(descriptor)
        }
    }

    /// A map file; `target` is used when the file names none.
    fn map(&self, path: &Path, target: Option<&GradedAlgebra>) -> Result<AlgebraMap> {
        let spec: AlgebraMapSpec = serde_json::from_str(&Self::read(path)?)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        let source = match &spec.source {
            Some(p) => self.algebra(&dir.join(p))?,
            None => return Err(Error::invalid("map file names no source algebra")),
        };
        let named = spec.target.as_ref().map(|p| self.algebra(&dir.join(p))).transpose()?;
        let target = match (target, named) {
            (Some(t), Some(n)) if *t != n => return Err(Error::invalid("map target differs from the given algebra")),
            (Some(t), _) => t.clone(),
            (None, Some(n)) => n,
            (None, None) => return Err(Error::invalid("map file names no target algebra")),
        };
        AlgebraMap::from_spec(source, target, &spec)
    }

    fn module(&self, path: &Path, algebra: Option<GradedAlgebra>) -> Result<LeftModule> {
        let dir = path.parent().unwrap_or(Path::new("."));
        LeftModule::from_json(&Self::read(path)?, dir, algebra, self.field)
    }

    fn cover(m: Option<usize>, poset: Option<&PathBuf>) -> Result<Poset> {
        match (m, poset) {
            (_, Some(p)) => Poset::from_json(&Self::read(p)?),
            (Some(m), None) => cyclic_cech_poset(m),
            (None, None) => Err(Error::usage("give --poset or --cover")),
        }
    }
}

fn render_pages(pages: &[SpectralSequencePage]) -> String {
    let mut out = String::new();
    for page in pages {
        out.push_str(&format!("E^{}:\n", page.r));
        for ((p, q, t), d) in page.entries() {
            if d > 0 {
                out.push_str(&format!("  (p={p}, q={q}, t={t}) {d:>4}\n"));
            }
        }
    }
    out
}

fn pipeline(
    ctx: &Ctx,
    name: &str,
    algebra: Option<&PathBuf>,
    space: &str,
    sphere: usize,
    cover: Option<usize>,
    smax: usize,
) -> Result<BettiTable> {
    if let Some(path) = name.strip_prefix("file:") {
        return Ok(serde_json::from_str(&Ctx::read(Path::new(path))?)?);
    }
    let a = ctx.algebra(algebra.ok_or_else(|| Error::usage(format!("pipeline {name} needs --algebra")))?)?;
    match name {
        "loday" => hh(&a, &Ctx::space(space)?, smax, None),
        "oracle" => oracle_hh(&a, smax),
        "bar" | "bar-suspension" => hh_via_suspension(&a, sphere, smax),
        "poset" => poset_homology(&arc_functor(&a, &cyclic_cech_poset(cover.unwrap_or(smax + 2))?)?, smax),
        other => Err(Error::usage(format!("unknown pipeline {other:?}"))),
    }
}

fn detect(value: &Value) -> Option<Kind> {
    let has = |k: &str| value.get(k).is_some();
    if has("table") {
        Some(Kind::Algebra)
    } else if has("cells") {
        Some(Kind::Space)
    } else if has("objects") {
        Some(Kind::Poset)
    } else if has("action") {
        Some(Kind::Module)
    } else if has("matrix") {
        Some(Kind::Map)
    } else if has("provenance") {
        Some(Kind::Betti)
    } else {
        None
    }
}

fn validate_file(ctx: &Ctx, path: &Path, kind: Option<Kind>) -> Result<Kind> {
    let text = Ctx::read(path)?;
    let value: Value = serde_json::from_str(&text)?;
    let kind = kind
        .or_else(|| detect(&value))
        .ok_or_else(|| Error::invalid("unrecognized file contents"))?;
    match kind {
        Kind::Algebra => drop(GradedAlgebra::from_json(&text, ctx.field)?),
        Kind::Space => drop(SimplicialSet::from_json(&text)?),
        Kind::Poset => drop(Poset::from_json(&text)?),
        Kind::Module => drop(ctx.module(path, None)?),
        Kind::Map => drop(ctx.map(path, None)?),
        Kind::Betti => drop(serde_json::from_str::<BettiTable>(&text)?),
    }
    Ok(kind)
}

fn run(cli: &Cli) -> Result<Output> {
    let field = cli.field.as_deref().map(str::parse::<Field>).transpose()?;
    let ctx = Ctx { field };
    match &cli.command {
        Command::Hh {
            algebra,
            space,
            smax,
            base_map,
        } => {
            let a = ctx.algebra(algebra)?;
            let base = base_map.as_ref().map(|p| ctx.map(p, Some(&a))).transpose()?;
            Ok(Output::table(&hh(&a, &Ctx::space(space)?, *smax, base.as_ref())?))
        }
        Command::HhBar { algebra, sphere, smax } => Ok(Output::table(&hh_via_suspension(
            &ctx.algebra(algebra)?,
            *sphere,
            *smax,
        )?)),
        Command::OracleHh { algebra, smax } => Ok(Output::table(&oracle_hh(&ctx.algebra(algebra)?, *smax)?)),
        Command::Cohomology { algebra, module, nmax } => {
            let a = ctx.algebra(algebra)?;
            let m = match module {
                Some(p) => Some(ctx.module(p, Some(LeftModule::bimodule(&a)?.algebra().clone()))?),
                None => None,
            };
            Ok(Output::table(&hochschild_cohomology(&a, m.as_ref(), nmax + 1)?))
        }
        Command::Rhom {
            algebra,
            left,
            right,
            nmax,
        } => {
            let a = ctx.algebra(algebra)?;
            let load = |s: &str| -> Result<LeftModule> {
                if s == "regular" {
                    Ok(LeftModule::regular(&a))
                } else {
                    ctx.module(Path::new(s), Some(a.clone()))
                }
            };
            Ok(Output::table(&rhom(&load(left)?, &a, &load(right)?, nmax + 1)?))
        }
        Command::PosetHh {
            algebra,
            poset,
            cover,
            smax,
            edge,
        } => {
            let a = ctx.algebra(algebra)?;
            let p = Ctx::cover(*cover, poset.as_ref())?;
            let f = arc_functor(&a, &p)?;
            let table = poset_homology(&f, *smax)?;
            let x0 = match edge {
                Some(name) => p
                    .index_of(name)
                    .ok_or_else(|| Error::usage(format!("no object named {name:?}")))?,
                None => minimal_single_component(&p)
                    .ok_or_else(|| Error::usage("poset has no minimal single-component object"))?,
            };
            let e = edge_map(&f, x0, *smax)?;
            #[derive(Serialize)]
            struct Report<'a> {
                table: &'a BettiTable,
                edge_object: &'a str,
                edge_bijective: bool,
                higher_vanish: bool,
                edge_iso: bool,
            }
            let name = p.objects()[x0].name.as_str();
            let report = Report {
                table: &table,
                edge_object: name,
                edge_bijective: e.bijective,
                higher_vanish: e.higher_vanish,
                edge_iso: e.is_iso(),
            };
            let human = format!(
                "[{}]\n{}edge map from {name}: bijective onto H_0: {}; iso: {}\n",
                table.provenance,
                table.render(),
                e.bijective,
                e.is_iso()
            );
            Ok(Output::new(&report, human))
        }
        Command::Sseq {
            algebra,
            sphere,
            cover,
            smax,
            rmax,
        } => {
            let a = ctx.algebra(algebra)?;
            let dc = match (sphere, cover) {
                (Some(d), _) => suspension_bar(&a, *d, *smax)?,
                (None, Some(m)) => arc_double_complex(&a, &cyclic_cech_poset(*m)?, smax + 1)?,
                (None, None) => return Err(Error::usage("give --sphere or --cover")),
            };
            let pages = sseq_pages(&dc, *rmax)?;
            let infinity = sseq_infinity(&dc)?;
            let ok = converges(&dc)?;
            #[derive(Serialize)]
            struct Report<'a> {
                pages: &'a [SpectralSequencePage],
                infinity: &'a SpectralSequencePage,
                converges: bool,
            }
            let mut human = render_pages(&pages);
            human.push_str(&format!("E^∞ (r = {}) matches total homology: {ok}\n", infinity.r));
            Ok(Output::new(
                &Report {
                    pages: &pages,
                    infinity: &infinity,
                    converges: ok,
                },
                human,
            ))
        }
        Command::EtaleCheck { algebra, sphere, smax } => {
            let a = ctx.algebra(algebra)?;
            let etale = a.is_commutative() && a.is_ungraded() && is_etale(&a)?;
            let table = hh(&a, &sphere_min(*sphere)?, *smax, None)?;
            let mut expected = BettiTable::new("algebra", *smax);
            for (t, n) in a.dims_by_degree() {
                expected.set(0, t, n);
            }
            let concentrated = table.agrees(&expected, *smax);
            #[derive(Serialize)]
            struct Report<'a> {
                etale: bool,
                sphere: usize,
                s_max: usize,
                hh_is_algebra: bool,
                table: &'a BettiTable,
            }
            let human = format!("étale: {etale}; HH^{{S^{sphere}}} ≅ A: {concentrated}\n");
            Ok(Output::new(
                &Report {
                    etale,
                    sphere: *sphere,
                    s_max: *smax,
                    hh_is_algebra: concentrated,
                    table: &table,
                },
                human,
            ))
        }
        Command::Compare {
            left,
            right,
            algebra,
            space,
            sphere,
            cover,
            smax,
        } => {
            let l = pipeline(&ctx, left, algebra.as_ref(), space, *sphere, *cover, *smax)?;
            let r = pipeline(&ctx, right, algebra.as_ref(), space, *sphere, *cover, *smax)?;
            let report = ComparisonReport::new(l, r, *smax);
            let exit = if report.agrees() { 0 } else { 3 };
            Ok(Output {
                artifact: report.to_json(),
                human: report.render(),
                exit,
            })
        }
        Command::Validate { files, kind } => {
            let mut human = String::new();
            let mut results = Vec::new();
            let mut failed = None;
            for f in files {
                match validate_file(&ctx, f, *kind) {
                    Ok(k) => {
                        human.push_str(&format!("ok      {} ({k:?})\n", f.display()));
                        results.push(serde_json::json!({"file": f.display().to_string(), "ok": true}));
                    }
                    Err(e) => {
                        human.push_str(&format!("invalid {}: {e}\n", f.display()));
                        results.push(
                            serde_json::json!({"file": f.display().to_string(), "ok": false, "error": e.to_string()}),
                        );
                        failed.get_or_insert(e);
                    }
                }
            }
            let mut out = Output::new(&results, human);
            if let Some(e) = failed {
                out.exit = exit_code(&e);
            }
            Ok(out)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_validation() {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(out) => {
            if let Some(path) = &cli.out {
                if let Err(e) = fs::write(path, &out.artifact) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            if cli.json {
                print!("{}", out.artifact);
            } else {
                print!("{}", out.human);
            }
            ExitCode::from(out.exit)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
