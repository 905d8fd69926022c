//! Command-line front end for the `tns-lab` binary.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::analysis::{
    conjecture_search, flattening_report, sweep_report, verify_thm16, verify_thm17,
    verify_vr_bound, verify_vr_unbound, ConjectureOptions, Report, SweepFamily, Verdict,
    VerifyOptions,
};
use crate::constructions::{
    imm_vertex_tensor, reference_survival_table, section3_assignment, survival_search,
    survival_tables, thm14_assignment, thm16_params, thm17_candidates, thm17_extended_candidates,
    thm17_flattening, thm17_graph, Section3Params,
};
use crate::netgraph::{build_open_grid, build_torus_grid, TNGraph, WeightProfile};
use crate::tensor::{
    bound_contract, flatten, network_contract_with, parse_tensor, rank_with, write_tensor,
    Assignment, ContractOptions, FlatteningSpec, Label, ScalarMode, SparseTensor,
};

#[derive(Parser, Debug)]
#[command(
    name = "tns-lab",
    version,
    about = "Exact tensor network state laboratory"
)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Scalar field for ranks: `rat`, or `fp [PRIME]`.
    #[arg(long, global = true, num_args = 1..=2, value_names = ["MODE", "PRIME"])]
    scalar: Option<Vec<String>>,
    /// Write the full JSON report here.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Size guard on tensor cells and intermediate nonzeros.
    #[arg(long, global = true, default_value_t = 1 << 22)]
    max_cells: usize,
    /// Leave timing out of reports.
    #[arg(long, global = true)]
    no_timing: bool,
    /// Recompute ranks in the other scalar mode and compare.
    #[arg(long, global = true)]
    audit: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a torus or open grid graph.
    Grid(GridArgs),
    /// Contract an assignment (or one shared tensor) on a graph.
    Contract(ContractArgs),
    /// Rank of one flattening of a tensor.
    Rank(RankArgs),
    /// Write an explicit construction.
    Make(MakeArgs),
    /// Check a rank statement exactly.
    Verify(VerifyArgs),
    /// Rank every flattening in a family.
    Sweep(SweepArgs),
    /// Randomized search for tensors with all flattenings saturated.
    Search(SearchArgs),
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long, conflicts_with = "open", required_unless_present = "open")]
    torus: bool,
    #[arg(long)]
    open: bool,
    #[arg(short = 'M')]
    m: usize,
    #[arg(short = 'N')]
    n: usize,
    #[arg(short = 'd')]
    d: usize,
    #[arg(short = 'k')]
    k: usize,
    #[arg(short = 's')]
    s: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ContractArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Directory holding `v<index>.tns` for every vertex.
    #[arg(long, conflicts_with = "bound", required_unless_present = "bound")]
    assign: Option<PathBuf>,
    /// One role-labelled tensor placed at every vertex.
    #[arg(long)]
    bound: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct RankArgs {
    #[arg(long)]
    tensor: PathBuf,
    /// Comma-separated row axis labels; the rest are columns.
    #[arg(long, value_delimiter = ',')]
    rows: Vec<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Construction {
    Imm,
    Thm14,
    Sec3,
    Thm16,
    Thm17Search,
    Qmf4Search,
}

#[derive(Args, Debug)]
struct MakeArgs {
    #[arg(long, value_enum)]
    construction: Construction,
    #[arg(short = 's', default_value_t = 2)]
    s: usize,
    #[arg(short = 'N', default_value_t = 2)]
    n: usize,
    #[arg(short = 'k', default_value_t = 2)]
    k: usize,
    #[arg(short = 'd', default_value_t = 2)]
    d: usize,
    /// Candidate budget for `qmf4-search`.
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    /// Output file, or directory for per-vertex constructions.
    #[arg(long)]
    out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Statement {
    VrBound,
    VrUnbound,
    Thm16,
    Thm17,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_enum)]
    statement: Statement,
    #[arg(short = 's', default_value_t = 2)]
    s: usize,
    #[arg(short = 'N', default_value_t = 2)]
    n: usize,
    #[arg(short = 'k', default_value_t = 2)]
    k: usize,
    #[arg(short = 'd', default_value_t = 2)]
    d: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    All,
    Balanced,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    tensor: PathBuf,
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Family::Balanced)]
    family: Family,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long, required = true)]
    conjecture42: bool,
    #[arg(short = 'N', default_value_t = 2)]
    n: usize,
    #[arg(short = 'd', default_value_t = 2)]
    d: usize,
    #[arg(short = 'k', default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Also evaluate the bound state of the survival-table witness.
    #[arg(long)]
    seeded_survival: bool,
}

struct Global {
    seed: Option<u64>,
    scalar: Option<ScalarMode>,
    json: Option<PathBuf>,
    max_cells: usize,
    no_timing: bool,
    audit: bool,
}

fn parse_scalar(raw: &[String]) -> Result<ScalarMode> {
    match raw {
        [m] if m == "rat" => Ok(ScalarMode::Rational),
        [m] if m == "fp" => Ok(ScalarMode::prime()),
        [m, p] if m == "fp" => {
            let p: u64 = p.parse().with_context(|| format!("bad prime `{p}`"))?;
            if !(p > 1 << 30 && crate::tensor::is_prime(p)) {
                bail!("{p} is not a prime above 2^30");
            }
            Ok(ScalarMode::Prime { p })
        }
        _ => bail!("--scalar takes `rat` or `fp [PRIME]`"),
    }
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path)
        .map_err(|e| anyhow!("writing {}: {}", path.display(), e.error))?;
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_graph(path: &Path) -> Result<TNGraph> {
    TNGraph::from_json(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_tensor(path: &Path) -> Result<SparseTensor> {
    parse_tensor(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn emit(global: &Global, mut report: Report) -> Result<Verdict> {
    if global.no_timing {
        report.timing_ms = None;
    }
    if let Some(path) = &global.json {
        write_atomic(path, &(report.to_json() + "\n"))?;
    }
    Ok(report.verdict)
}

fn write_assignment(dir: &Path, g: &TNGraph, asgn: &Assignment) -> Result<()> {
    write_atomic(&dir.join("graph.json"), &(g.to_json() + "\n"))?;
    for (v, t) in asgn.iter() {
        write_atomic(&dir.join(format!("v{}.tns", v.0)), &write_tensor(t))?;
    }
    Ok(())
}

fn summary_flattening(r: &Report) -> String {
    match r.flattenings.first() {
        Some(f) => format!(
            "rank {} (dim bound {}, min-cut bound {})",
            f.rank,
            f.dim_bound,
            f.qmf_bound.map_or("-".into(), |q| q.to_string())
        ),
        None => "no flattening".into(),
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    let global = Global {
        seed: cli.seed,
        scalar: cli.scalar.as_deref().map(parse_scalar).transpose()?,
        json: cli.json,
        max_cells: cli.max_cells,
        no_timing: cli.no_timing,
        audit: cli.audit,
    };
    match cli.command {
        Command::Grid(a) => {
            let g = if a.torus {
                build_torus_grid(a.m, a.n, WeightProfile::new(a.d, a.k))?
            } else {
                let s = a.s.ok_or_else(|| anyhow!("open grids need -s"))?;
                build_open_grid(a.m, a.n, WeightProfile::with_external(a.d, a.k, s))?
            };
            write_atomic(&a.out, &(g.to_json() + "\n"))?;
            println!("{}", g.descriptor());
            Ok(0)
        }
        Command::Contract(a) => {
            let g = load_graph(&a.graph)?;
            let opts = ContractOptions {
                schedule: None,
                max_nonzeros: Some(global.max_cells),
            };
            let (t, peak) = if let Some(path) = &a.bound {
                let t = bound_contract(&g, &load_tensor(path)?)?;
                let nnz = t.nnz();
                (t, nnz)
            } else {
                let dir = a.assign.as_ref().expect("clap enforces one source");
                let mut asgn = Assignment::new();
                for v in g.vertex_ids() {
                    asgn.insert(v, load_tensor(&dir.join(format!("v{}.tns", v.0)))?);
                }
                let (t, stats) = network_contract_with(&g, &asgn, &opts)?;
                (t, stats.peak_nonzeros)
            };
            write_atomic(&a.out, &write_tensor(&t))?;
            println!(
                "contracted {}: {} axes, {} nonzeros (peak {})",
                g.descriptor(),
                t.order(),
                t.nnz(),
                peak
            );
            Ok(0)
        }
        Command::Rank(a) => {
            let t = load_tensor(&a.tensor)?;
            let rows: Vec<Label> = a
                .rows
                .iter()
                .filter(|s| !s.is_empty())
                .map(|s| s.parse())
                .collect::<std::result::Result<_, _>>()?;
            let spec = FlatteningSpec::from_rows(&t, &rows)?;
            let scalar = global.scalar.unwrap_or(ScalarMode::Rational);
            let m = flatten(&t, &spec)?;
            let rank = rank_with(&m, scalar)?;
            println!("rank {rank} ({} x {})", m.nrows, m.ncols);
            let mut report = Report::new(
                "rank",
                [("rows".to_string(), json!(a.rows))].into_iter().collect(),
                global.seed.unwrap_or(0),
                scalar,
            );
            report
                .flattenings
                .push(flattening_report(None, &t, &spec, scalar)?);
            emit(&global, report)?;
            Ok(0)
        }
        Command::Make(a) => make(&global, a),
        Command::Verify(a) => {
            let opts = VerifyOptions {
                scalar: global.scalar.unwrap_or(ScalarMode::Rational),
                max_cells: global.max_cells,
                audit: global.audit,
            };
            let report = match a.statement {
                Statement::VrBound => verify_vr_bound(a.s, a.n, &opts)?,
                Statement::VrUnbound => verify_vr_unbound(a.k, a.d, a.n, &opts)?,
                Statement::Thm16 => verify_thm16(a.n, &opts)?,
                Statement::Thm17 => verify_thm17(a.n, &opts)?,
            };
            println!(
                "{} {}: {} [{}]",
                report.kind,
                serde_json::to_string(&report.params)?,
                summary_flattening(&report),
                if report.passed() { "PASS" } else { "FAIL" }
            );
            let verdict = emit(&global, report)?;
            Ok(if verdict == Verdict::Pass { 0 } else { 2 })
        }
        Command::Sweep(a) => {
            let t = load_tensor(&a.tensor)?;
            let g = a.graph.as_deref().map(load_graph).transpose()?;
            let family = match a.family {
                Family::All => SweepFamily::All,
                Family::Balanced => SweepFamily::Balanced,
            };
            let scalar = global.scalar.unwrap_or(ScalarMode::Rational);
            let report = sweep_report(g.as_ref(), &t, &family, scalar)?;
            println!(
                "{} flattenings, {} saturated, bounds {}",
                report.flattenings.len(),
                report.derived["saturated"],
                if report.bounds_hold() {
                    "hold"
                } else {
                    "VIOLATED"
                }
            );
            let verdict = emit(&global, report)?;
            Ok(if verdict == Verdict::Fail { 2 } else { 0 })
        }
        Command::Search(a) => {
            let seeded = if a.seeded_survival {
                let out = survival_search(
                    &reference_survival_table(),
                    1_000_000,
                    global.seed.unwrap_or(0),
                )?;
                Some(
                    out.found
                        .ok_or_else(|| anyhow!("no survival-table witness found"))?,
                )
            } else {
                None
            };
            let opts = ConjectureOptions {
                n: a.n,
                d: a.d,
                k: a.k,
                trials: a.trials,
                seed: global.seed.unwrap_or(0),
                scalar: global.scalar.unwrap_or_else(ScalarMode::prime),
                audit: global.audit,
                seeded,
            };
            let report = conjecture_search(&opts)?;
            println!(
                "{} trials, best {} of {} flattenings saturated (seed {})",
                a.trials,
                report
                    .derived
                    .get("best_saturated")
                    .cloned()
                    .unwrap_or(json!(0)),
                report.derived["flattenings_per_trial"],
                opts.seed
            );
            let verdict = emit(&global, report)?;
            Ok(if verdict == Verdict::Fail { 2 } else { 0 })
        }
    }
}

fn make(global: &Global, a: MakeArgs) -> Result<i32> {
    match a.construction {
        Construction::Imm => {
            let t = imm_vertex_tensor(a.s)?;
            write_atomic(&a.out, &write_tensor(&t))?;
            println!(
                "iterated matrix multiplication tensor, s = {}: {} nonzeros",
                a.s,
                t.nnz()
            );
        }
        Construction::Thm14 => {
            let (g, asgn) = thm14_assignment(a.n, a.k, a.d)?;
            write_assignment(&a.out, &g, &asgn)?;
            println!("{} vertex tensors for {}", asgn.len(), g.descriptor());
        }
        Construction::Sec3 | Construction::Thm16 => {
            let p = if a.construction == Construction::Thm16 {
                thm16_params(a.n)?
            } else {
                Section3Params::random(a.n, global.seed.unwrap_or(0))?
            };
            let (g, asgn) = section3_assignment(&p)?;
            write_assignment(&a.out, &g, &asgn)?;
            println!("{} vertex tensors for {}", asgn.len(), g.descriptor());
        }
        Construction::Thm17Search => {
            let g = thm17_graph(a.n)?;
            let spec = thm17_flattening(&g);
            let target = 1usize << (a.n - 1);
            let scalar = global.scalar.unwrap_or(ScalarMode::Rational);
            let mut found = None;
            for c in thm17_candidates(a.n)?
                .into_iter()
                .chain(thm17_extended_candidates(a.n)?)
            {
                let state = bound_contract(&g, &c.tensor)?;
                if rank_with(&flatten(&state, &spec)?, scalar)? == target {
                    found = Some(c);
                    break;
                }
            }
            let c = found.ok_or_else(|| anyhow!("no candidate reaches rank {target}"))?;
            write_atomic(&a.out, &write_tensor(&c.tensor))?;
            println!("witness {}", c.description);
        }
        Construction::Qmf4Search => {
            let target = reference_survival_table();
            let out = survival_search(&target, a.budget, global.seed.unwrap_or(0))?;
            match out.found {
                Some(t) => {
                    write_atomic(&a.out, &write_tensor(&t))?;
                    print!(
                        "witness after {} candidates\n{}",
                        out.examined,
                        survival_tables(&t)?
                    );
                }
                None => {
                    let diff = out
                        .nearest
                        .map(|(_, table, _)| table.diff(&target).join("; "))
                        .unwrap_or_default();
                    bail!(
                        "no witness in {} candidates; nearest miss: {diff}",
                        out.examined
                    );
                }
            }
        }
    }
    Ok(0)
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_flag() {
        assert_eq!(parse_scalar(&["rat".into()]).unwrap(), ScalarMode::Rational);
        assert_eq!(parse_scalar(&["fp".into()]).unwrap(), ScalarMode::prime());
        assert_eq!(
            parse_scalar(&["fp".into(), "2147483629".into()]).unwrap(),
            ScalarMode::Prime { p: 2147483629 }
        );
        assert!(parse_scalar(&["fp".into(), "1000003".into()]).is_err());
        assert!(parse_scalar(&["real".into()]).is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["tns-lab", "frobnicate"]), 1);
        assert_eq!(run(["tns-lab", "verify", "thm16", "-N", "3"]), 1);
        assert_eq!(run(["tns-lab", "--help"]), 0);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.txt");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
