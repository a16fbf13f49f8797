use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use treemap_core::baseline::build_baseline;
use treemap_core::classify::{classify, ClassificationRow, DataClass};
use treemap_core::harness::{
    in_pool, layout_svg, layouts_for, normalized_steps, pair_seed, read_summaries, render_reports,
    run_matrix, write_results_csv, Manifest, PairStatus, RunConfig,
};
use treemap_core::model::serialize_dataset;
use treemap_core::synth::generate_suite;
use treemap_core::{parse_dataset, Algorithm, Rect, TimeVaryingTree};

#[derive(Parser)]
#[command(name = "treemap-eval", version, about = "Evaluate time-varying rectangular treemap algorithms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic datasets for the requested data classes
    Generate(GenerateArgs),
    /// Lay out datasets and write per-step layouts as JSON and SVG
    Layout(RunArgs),
    /// Run the evaluation matrix and write the results CSV
    Evaluate(RunArgs),
    /// Classify datasets into data classes
    Classify(IoArgs),
    /// Build the stability baseline of every transition
    Baseline(RunArgs),
    /// Render rankings, matrix plots and feature charts from results
    Report(ReportArgs),
}

#[derive(Args)]
struct IoArgs {
    /// Dataset file or directory of dataset files
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Root rectangle as WxH
    #[arg(long, default_value = "1000x1000", value_parser = parse_rect)]
    rect: Rect,
    /// Comma-separated algorithm names or ALL
    #[arg(long, default_value = "ALL")]
    algorithms: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated class labels or ALL
    #[arg(long, default_value = "ALL")]
    classes: String,
    #[arg(long, default_value_t = 60)]
    leaves: usize,
    #[arg(long, default_value_t = 12)]
    timesteps: usize,
    /// Datasets per class
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct ReportArgs {
    /// Directory holding results.csv and classification.csv
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated class labels or ALL
    #[arg(long, default_value = "ALL")]
    classes: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_rect(s: &str) -> Result<Rect, String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got `{s}`"))?;
    let w: f64 = w.trim().parse().map_err(|_| format!("bad width in `{s}`"))?;
    let h: f64 = h.trim().parse().map_err(|_| format!("bad height in `{s}`"))?;
    if !(w > 0.0 && h > 0.0 && w.is_finite() && h.is_finite()) {
        return Err(format!("rectangle `{s}` must have positive sides"));
    }
    Ok(Rect::new(0.0, 0.0, w, h))
}

fn parse_classes(s: &str) -> Result<Vec<DataClass>> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(DataClass::all());
    }
    s.split(',')
        .map(|c| c.trim().parse::<DataClass>().map_err(Into::into))
        .collect()
}

fn load_datasets(input: &Path) -> Result<Vec<TimeVaryingTree>> {
    let files = if input.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(input)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json") && p.file_name().is_some_and(|n| n != "manifest.json"))
            .collect();
        files.sort();
        files
    } else {
        vec![input.to_path_buf()]
    };
    if files.is_empty() {
        bail!("no dataset files in {}", input.display());
    }
    files
        .iter()
        .map(|f| {
            let bytes = fs::read(f).with_context(|| format!("reading {}", f.display()))?;
            parse_dataset(&bytes).with_context(|| format!("parsing {}", f.display()))
        })
        .collect()
}

fn safe_name(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn write_manifest(out: &Path, manifest: &Manifest) -> Result<()> {
    let mut manifest = manifest.clone();
    manifest
        .versions
        .insert("treemap-cli".into(), env!("CARGO_PKG_VERSION").into());
    fs::write(out.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(())
}

fn config(args: &RunArgs) -> Result<RunConfig> {
    Ok(RunConfig {
        rect: args.rect,
        algorithms: Algorithm::parse_list(&args.algorithms)?,
        seed: args.seed,
        jobs: args.io.jobs,
    })
}

fn generate(args: GenerateArgs) -> Result<()> {
    let classes = parse_classes(&args.classes)?;
    fs::create_dir_all(&args.out)?;
    let suite = in_pool(args.jobs, || generate_suite(&classes, args.leaves, args.timesteps, args.count, args.seed))?;
    let mut pairs = Vec::new();
    for entry in suite {
        let mut status = PairStatus {
            dataset: entry.class.label(),
            algorithm: String::new(),
            seed: entry.seed,
            ok: true,
            error: None,
            unconverged_baselines: 0,
        };
        match entry.result {
            Ok(tree) => {
                status.dataset = tree.name.clone();
                fs::write(args.out.join(format!("{}.json", safe_name(&tree.name))), serialize_dataset(&tree))?;
            }
            Err(e) => {
                warn!("{}: {e}", entry.class);
                status.ok = false;
                status.error = Some(e.to_string());
            }
        }
        pairs.push(status);
    }
    let failed = pairs.iter().filter(|p| !p.ok).count();
    info!("generated {} datasets, {failed} failed", pairs.len() - failed);
    let mut manifest = Manifest::new(
        "generate",
        RunConfig {
            algorithms: Vec::new(),
            seed: args.seed,
            jobs: args.jobs,
            ..RunConfig::default()
        },
        pairs,
    );
    manifest.parameters = BTreeMap::from([
        ("classes".to_string(), args.classes.clone()),
        ("leaves".to_string(), args.leaves.to_string()),
        ("timesteps".to_string(), args.timesteps.to_string()),
        ("count".to_string(), args.count.to_string()),
    ]);
    write_manifest(&args.out, &manifest)
}

fn status_of(dataset: &str, alg: Algorithm, seed: u64, result: &Result<usize>) -> PairStatus {
    PairStatus {
        dataset: dataset.to_string(),
        algorithm: alg.name().to_string(),
        seed,
        ok: result.is_ok(),
        error: result.as_ref().err().map(|e| format!("{e:#}")),
        unconverged_baselines: *result.as_ref().unwrap_or(&0),
    }
}

fn layout(args: RunArgs) -> Result<()> {
    let config = config(&args)?;
    let datasets = load_datasets(&args.io.input)?;
    let mut pairs = Vec::new();
    for tree in &datasets {
        for &alg in &config.algorithms {
            let seed = pair_seed(config.seed, &tree.name, alg);
            let dir = args.io.out.join(safe_name(&tree.name)).join(alg.name());
            let result = (|| -> Result<usize> {
                let steps = normalized_steps(tree, &config.rect)?;
                let layouts = layouts_for(tree, &steps, config.rect, alg, seed)?;
                fs::create_dir_all(&dir)?;
                let json: Vec<_> = layouts.iter().enumerate().map(|(t, l)| l.to_json(t)).collect();
                fs::write(dir.join("layouts.json"), serde_json::to_string_pretty(&json)? + "\n")?;
                for (t, l) in layouts.iter().enumerate() {
                    fs::write(dir.join(format!("t{t:03}.svg")), layout_svg(l, &[]))?;
                }
                Ok(0)
            })();
            if let Err(e) = &result {
                warn!("{} / {alg}: {e:#}", tree.name);
            }
            pairs.push(status_of(&tree.name, alg, seed, &result));
        }
    }
    fs::create_dir_all(&args.io.out)?;
    write_manifest(&args.io.out, &Manifest::new("layout", config, pairs))
}

fn baseline(args: RunArgs) -> Result<()> {
    let config = config(&args)?;
    let datasets = load_datasets(&args.io.input)?;
    let mut pairs = Vec::new();
    for tree in &datasets {
        for &alg in &config.algorithms {
            let seed = pair_seed(config.seed, &tree.name, alg);
            let dir = args.io.out.join(safe_name(&tree.name)).join(alg.name());
            let result = (|| -> Result<usize> {
                let steps = normalized_steps(tree, &config.rect)?;
                let layouts = layouts_for(tree, &steps, config.rect, alg, seed)?;
                fs::create_dir_all(&dir)?;
                let mut json = Vec::new();
                let mut unconverged = 0;
                for t in 1..steps.len() {
                    let b = build_baseline(&layouts[t - 1], &steps[t - 1], &steps[t])?;
                    unconverged += usize::from(!b.converged);
                    fs::write(dir.join(format!("t{t:03}.svg")), layout_svg(&b.baseline, &b.walls))?;
                    json.push(b.to_json(t));
                }
                fs::write(dir.join("baselines.json"), serde_json::to_string_pretty(&json)? + "\n")?;
                Ok(unconverged)
            })();
            if let Err(e) = &result {
                warn!("{} / {alg}: {e:#}", tree.name);
            }
            pairs.push(status_of(&tree.name, alg, seed, &result));
        }
    }
    fs::create_dir_all(&args.io.out)?;
    write_manifest(&args.io.out, &Manifest::new("baseline", config, pairs))
}

fn evaluate(args: RunArgs) -> Result<()> {
    let config = config(&args)?;
    let datasets = load_datasets(&args.io.input)?;
    info!("{} datasets x {} algorithms", datasets.len(), config.algorithms.len());
    let store = run_matrix(&datasets, &config)?;
    fs::create_dir_all(&args.io.out)?;
    let file = fs::File::create(args.io.out.join("results.csv"))?;
    write_results_csv(&store.records, std::io::BufWriter::new(file))?;
    write_classification(&datasets, &args.io.out)?;
    let failed = store.statuses.iter().filter(|s| !s.ok).count();
    if failed > 0 {
        warn!("{failed} pairs failed; see manifest.json");
    }
    write_manifest(&args.io.out, &Manifest::new("evaluate", config, store.statuses))
}

fn write_classification(datasets: &[TimeVaryingTree], out: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(out.join("classification.csv"))?;
    for tree in datasets {
        w.serialize(ClassificationRow::new(&tree.name, &classify(tree)))?;
    }
    w.flush()?;
    Ok(())
}

fn classify_cmd(args: IoArgs) -> Result<()> {
    let datasets = load_datasets(&args.input)?;
    fs::create_dir_all(&args.out)?;
    write_classification(&datasets, &args.out)?;
    let pairs = datasets
        .iter()
        .map(|t| PairStatus {
            dataset: t.name.clone(),
            algorithm: String::new(),
            seed: 0,
            ok: true,
            error: None,
            unconverged_baselines: 0,
        })
        .collect();
    let config = RunConfig {
        algorithms: Vec::new(),
        jobs: args.jobs,
        ..RunConfig::default()
    };
    write_manifest(&args.out, &Manifest::new("classify", config, pairs))
}

fn report(args: ReportArgs) -> Result<()> {
    let results = args.input.join("results.csv");
    let summaries = read_summaries(fs::File::open(&results).with_context(|| format!("opening {}", results.display()))?)?;
    let class_file = args.input.join("classification.csv");
    let mut classes = BTreeMap::new();
    for row in csv::Reader::from_path(&class_file)
        .with_context(|| format!("opening {}", class_file.display()))?
        .deserialize::<ClassificationRow>()
    {
        let row = row?;
        classes.insert(row.dataset.clone(), row.label.parse::<DataClass>()?);
    }
    let requested = if args.classes.trim().eq_ignore_ascii_case("all") {
        Vec::new()
    } else {
        parse_classes(&args.classes)?
    };
    let files = render_reports(&summaries, &classes, &requested, args.seed, &args.out)?;
    info!("wrote {} report files", files.len());
    let mut manifest = Manifest::new(
        "report",
        RunConfig {
            algorithms: Vec::new(),
            seed: args.seed,
            ..RunConfig::default()
        },
        Vec::new(),
    );
    manifest.parameters = BTreeMap::from([("classes".to_string(), args.classes.clone())]);
    write_manifest(&args.out, &manifest)
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Generate(a) => generate(a),
        Command::Layout(a) => layout(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Classify(a) => classify_cmd(a),
        Command::Baseline(a) => baseline(a),
        Command::Report(a) => report(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rect_flag() {
        assert_eq!(parse_rect("1000x1000").unwrap(), Rect::new(0.0, 0.0, 1000.0, 1000.0));
        assert_eq!(parse_rect("4X3").unwrap().h, 3.0);
        assert!(parse_rect("0x10").is_err());
        assert!(parse_rect("10").is_err());
    }

    #[test]
    fn class_flag() {
        assert_eq!(parse_classes("ALL").unwrap().len(), 54);
        assert_eq!(parse_classes("1L-LWV-LWC-LID, 2/3L-HWV-SWC-RID").unwrap().len(), 2);
        assert!(parse_classes("1L-LWV").is_err());
    }
}
