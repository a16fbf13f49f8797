use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::scores::{consistency_report, relative_score_table, Metric, ScoreTable, CONSISTENCY_SAMPLE};
use super::svg::{score_color, Svg, PALETTE};
use crate::classify::{Change, DataClass, InsDel, Levels, Variance};
use crate::error::Result;
use crate::geometry::{Layout, Rect};
use crate::metrics::mean;

/// Dataset-level values of one (dataset, algorithm) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub dataset: String,
    pub algorithm: String,
    pub mean_rho: f64,
    pub mean_sigma: Option<f64>,
}

fn slug(label: &str) -> String {
    label.replace('/', "").replace('+', "p")
}

/// Writes matrix plots, ranking tables, feature polylines and the
/// consistency comparison into `out`. Requested classes without results are
/// skipped with a warning; an empty request means every class present.
pub fn render_reports(
    summaries: &[ReportSummary],
    classes: &BTreeMap<String, DataClass>,
    requested: &[DataClass],
    seed: u64,
    out: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out)?;
    let mut written = Vec::new();
    let mut write = |name: String, body: String| -> Result<()> {
        let path = out.join(name);
        fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };

    let measured: BTreeSet<&str> = summaries.iter().map(|s| s.dataset.as_str()).collect();
    let mut members: BTreeMap<DataClass, Vec<String>> = BTreeMap::new();
    for d in &measured {
        match classes.get(*d) {
            Some(c) => members.entry(*c).or_default().push(d.to_string()),
            None => log::warn!("{d}: no class, left out of per-class reports"),
        }
    }
    if !requested.is_empty() {
        for c in requested {
            if !members.contains_key(c) {
                log::warn!("{c}: no results, omitted");
            }
        }
        members.retain(|c, _| requested.contains(c));
    }

    let tables: BTreeMap<Metric, ScoreTable> =
        Metric::ALL.iter().map(|&m| (m, relative_score_table(summaries, m))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<String> = measured.iter().map(|d| d.to_string()).collect();
    let baseline: Vec<String> = all
        .choose_multiple(&mut rng, CONSISTENCY_SAMPLE.min(all.len()))
        .cloned()
        .collect();

    for (&metric, table) in &tables {
        write(
            format!("matrix_{}_baseline.svg", metric.label()),
            matrix_svg(&format!("{} / random collection", metric.label()), &baseline, table),
        )?;
        for (class, ds) in &members {
            write(
                format!("matrix_{}_{}.svg", metric.label(), slug(&class.label())),
                matrix_svg(&format!("{} / {class}", metric.label()), ds, table),
            )?;
        }
    }

    write("ranking_all.csv".into(), ranking_csv(&ranking(summaries, &all))?)?;
    write("ranking_all.svg".into(), ranking_svg("all datasets", &ranking(summaries, &all)))?;
    for (class, ds) in &members {
        let r = ranking(summaries, ds);
        write(format!("ranking_{}.csv", slug(&class.label())), ranking_csv(&r)?)?;
        write(format!("ranking_{}.svg", slug(&class.label())), ranking_svg(&class.label(), &r))?;
    }

    let class_means = class_means(summaries, &members);
    for feature in Feature::ALL {
        write(format!("features_{}.svg", feature.name()), feature_svg(feature, &class_means))?;
    }

    let mut rows = Vec::new();
    for (&metric, table) in &tables {
        let member_classes: BTreeMap<String, DataClass> = members
            .iter()
            .flat_map(|(c, ds)| ds.iter().map(move |d| (d.clone(), *c)))
            .collect();
        rows.extend(consistency_report(table, &member_classes, metric, seed));
    }
    let mut csv_out = csv::Writer::from_writer(Vec::new());
    csv_out.write_record(["class", "metric", "datasets", "c", "c_random", "consistent"])?;
    for r in &rows {
        csv_out.write_record([
            r.class.clone(),
            r.metric.label().to_string(),
            r.datasets.to_string(),
            r.c.to_string(),
            r.c_random.to_string(),
            r.consistent.to_string(),
        ])?;
    }
    write("consistency.csv".into(), into_string(csv_out)?)?;
    let mut svg = Svg::new(420.0, 40.0 + 18.0 * rows.len() as f64);
    svg.text(10.0, 20.0, 12.0, "start", "consistency vs random collection (blue: more consistent)");
    for (i, r) in rows.iter().enumerate() {
        let y = 32.0 + 18.0 * i as f64;
        svg.rect(10.0, y, 14.0, 14.0, if r.consistent { "#2166ac" } else { "#b2182b" });
        svg.text(
            30.0,
            y + 11.0,
            11.0,
            "start",
            &format!("{} {} c={:.3} c*={:.3}", r.class, r.metric.label(), r.c, r.c_random),
        );
    }
    write("consistency.svg".into(), svg.finish())?;
    Ok(written)
}

/// Draws the cells of a layout, with optional baseline walls in grey.
pub fn layout_svg(layout: &Layout, walls: &[Rect]) -> String {
    let root = layout.root;
    let scale = 800.0 / root.w.max(root.h);
    let tx = |x: f64| (x - root.x) * scale;
    let ty = |y: f64| (y - root.y) * scale;
    let mut svg = Svg::new(root.w * scale, root.h * scale);
    for (i, (id, r)) in layout.cells.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        svg.rect(tx(r.x), ty(r.y), r.w * scale, r.h * scale, color);
        svg.outline(tx(r.x), ty(r.y), r.w * scale, r.h * scale, "white");
        if r.w * scale > 40.0 && r.h * scale > 14.0 {
            svg.text(tx(r.x) + 3.0, ty(r.y) + 11.0, 9.0, "start", id);
        }
    }
    for w in walls {
        svg.rect(tx(w.x), ty(w.y), w.w * scale, w.h * scale, "#bbbbbb");
    }
    svg.finish()
}

fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| crate::Error::Invalid(e.to_string()))?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

fn matrix_svg(title: &str, datasets: &[String], table: &ScoreTable) -> String {
    let rows: Vec<&BTreeMap<String, f64>> = datasets.iter().filter_map(|d| table.get(d)).collect();
    let mut per_alg: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for scores in &rows {
        for (a, &s) in scores.iter() {
            per_alg.entry(a).or_default().push(s);
        }
    }
    // Worst average at the top, best at the bottom.
    let mut algs: Vec<(&str, f64)> = per_alg.iter().map(|(a, v)| (*a, mean(v.iter().copied()).unwrap_or(1.0))).collect();
    algs.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(y.0)));
    let mut cols: Vec<(&String, &BTreeMap<String, f64>)> =
        datasets.iter().filter_map(|d| table.get(d).map(|s| (d, s))).collect();
    cols.sort_by(|a, b| {
        let ma = mean(a.1.values().copied()).unwrap_or(0.0);
        let mb = mean(b.1.values().copied()).unwrap_or(0.0);
        ma.total_cmp(&mb).then(a.0.cmp(b.0))
    });

    let (cw, ch, left, top) = (8.0, 14.0, 50.0, 30.0);
    let mut svg = Svg::new(left + cw * cols.len().max(1) as f64 + 10.0, top + ch * algs.len() as f64 + 10.0);
    svg.text(left, 18.0, 12.0, "start", title);
    for (r, (alg, _)) in algs.iter().enumerate() {
        let y = top + ch * r as f64;
        svg.text(left - 4.0, y + ch - 3.0, 10.0, "end", alg);
        for (c, (_, scores)) in cols.iter().enumerate() {
            let fill = scores.get(*alg).map(|&s| score_color(s)).unwrap_or_else(|| "#dddddd".into());
            svg.rect(left + cw * c as f64, y, cw, ch, &fill);
        }
    }
    svg.finish()
}

#[derive(Debug, Clone, PartialEq)]
struct Ranking {
    quality: Vec<(String, f64)>,
    stability: Vec<(String, f64)>,
}

fn ranking(summaries: &[ReportSummary], datasets: &[String]) -> Ranking {
    let keep: BTreeSet<&str> = datasets.iter().map(String::as_str).collect();
    let mut rho: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    let mut sigma: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for s in summaries.iter().filter(|s| keep.contains(s.dataset.as_str())) {
        rho.entry(&s.algorithm).or_default().push(s.mean_rho);
        if let Some(v) = s.mean_sigma {
            sigma.entry(&s.algorithm).or_default().push(v);
        }
    }
    let avg = |m: BTreeMap<&str, Vec<f64>>| -> Vec<(String, f64)> {
        m.into_iter()
            .filter_map(|(a, v)| Some((a.to_string(), mean(v)?)))
            .collect()
    };
    let mut quality = avg(rho);
    quality.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut stability = avg(sigma);
    stability.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    Ranking { quality, stability }
}

fn ranking_csv(r: &Ranking) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["rank", "visual_quality", "mean_rho", "stability", "mean_sigma"])?;
    for i in 0..r.quality.len().max(r.stability.len()) {
        let q = r.quality.get(i);
        let s = r.stability.get(i);
        w.write_record([
            (i + 1).to_string(),
            q.map(|x| x.0.clone()).unwrap_or_default(),
            q.map(|x| x.1.to_string()).unwrap_or_default(),
            s.map(|x| x.0.clone()).unwrap_or_default(),
            s.map(|x| x.1.to_string()).unwrap_or_default(),
        ])?;
    }
    into_string(w)
}

fn ranking_svg(title: &str, r: &Ranking) -> String {
    let n = r.quality.len().max(r.stability.len());
    let mut svg = Svg::new(330.0, 56.0 + 18.0 * n as f64);
    svg.text(10.0, 18.0, 12.0, "start", title);
    svg.text(20.0, 38.0, 11.0, "start", "visual quality");
    svg.text(180.0, 38.0, 11.0, "start", "stability");
    let color: BTreeMap<&str, &str> = crate::layout::Algorithm::ALL
        .iter()
        .enumerate()
        .map(|(i, a)| (a.name(), PALETTE[i]))
        .collect();
    for (col, entries) in [(20.0, &r.quality), (180.0, &r.stability)] {
        for (i, (alg, v)) in entries.iter().enumerate() {
            let y = 44.0 + 18.0 * i as f64;
            svg.rect(col, y, 12.0, 12.0, color.get(alg.as_str()).copied().unwrap_or("#444444"));
            svg.text(col + 18.0, y + 10.0, 11.0, "start", &format!("{alg} {v:.4}"));
        }
    }
    svg.finish()
}

/// Class -> algorithm -> (mean ρ, mean σ).
type ClassMeans = BTreeMap<DataClass, BTreeMap<String, (f64, Option<f64>)>>;

fn class_means(summaries: &[ReportSummary], members: &BTreeMap<DataClass, Vec<String>>) -> ClassMeans {
    members
        .iter()
        .map(|(class, ds)| {
            let r = ranking(summaries, ds);
            let sigma: BTreeMap<String, f64> = r.stability.into_iter().collect();
            let per_alg = r
                .quality
                .into_iter()
                .map(|(a, q)| {
                    let s = sigma.get(&a).copied();
                    (a, (q, s))
                })
                .collect();
            (*class, per_alg)
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
enum Feature {
    Levels,
    Variance,
    Change,
    InsDel,
}

impl Feature {
    const ALL: [Feature; 4] = [Feature::Levels, Feature::Variance, Feature::Change, Feature::InsDel];

    fn name(self) -> &'static str {
        match self {
            Feature::Levels => "levels",
            Feature::Variance => "weight_variance",
            Feature::Change => "weight_change",
            Feature::InsDel => "insertions_deletions",
        }
    }

    fn subclasses(self) -> Vec<&'static str> {
        match self {
            Feature::Levels => Levels::ALL.iter().map(|l| l.label()).collect(),
            Feature::Variance => Variance::ALL.iter().map(|l| l.label()).collect(),
            Feature::Change => Change::ALL.iter().map(|l| l.label()).collect(),
            Feature::InsDel => InsDel::ALL.iter().map(|l| l.label()).collect(),
        }
    }

    fn of(self, c: &DataClass) -> &'static str {
        match self {
            Feature::Levels => c.levels.label(),
            Feature::Variance => c.variance.label(),
            Feature::Change => c.change.label(),
            Feature::InsDel => c.insdel.label(),
        }
    }
}

/// Per algorithm and subclass: the average over classes of the class means,
/// so every class counts equally.
fn feature_points(feature: Feature, means: &ClassMeans) -> BTreeMap<String, Vec<Option<(f64, f64)>>> {
    let algs: BTreeSet<&String> = means.values().flat_map(|m| m.keys()).collect();
    algs.into_iter()
        .map(|alg| {
            let points = feature
                .subclasses()
                .into_iter()
                .map(|sub| {
                    let vals: Vec<(f64, f64)> = means
                        .iter()
                        .filter(|(c, _)| feature.of(c) == sub)
                        .filter_map(|(_, m)| {
                            let (q, s) = m.get(alg)?;
                            Some((*q, (*s)?))
                        })
                        .collect();
                    let q = mean(vals.iter().map(|v| v.0))?;
                    let s = mean(vals.iter().map(|v| v.1))?;
                    Some((q, s))
                })
                .collect();
            (alg.clone(), points)
        })
        .collect()
}

fn feature_svg(feature: Feature, means: &ClassMeans) -> String {
    let points = feature_points(feature, means);
    let (w, h, m) = (640.0, 460.0, 60.0);
    let plot_w = w - m - 160.0;
    let plot_h = h - 2.0 * m;
    let all: Vec<(f64, f64)> = points.values().flatten().flatten().copied().collect();
    let range = |f: fn(&(f64, f64)) -> f64| {
        let lo = all.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = all.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi - lo < 1e-12 {
            (lo - 0.5, hi + 0.5)
        } else {
            let pad = 0.05 * (hi - lo);
            (lo - pad, hi + pad)
        }
    };
    let (x0, x1) = range(|p| p.0);
    let (y0, y1) = range(|p| p.1);
    let sx = |x: f64| m + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| m + (y - y0) / (y1 - y0) * plot_h;

    let mut svg = Svg::new(w, h);
    svg.text(m, 24.0, 13.0, "start", feature.name());
    svg.outline(m, m, plot_w, plot_h, "#888888");
    svg.text(m + plot_w / 2.0, h - 20.0, 11.0, "middle", "mean visual quality (higher is better)");
    svg.text(16.0, m - 8.0, 11.0, "start", "mean stability (lower is better, down)");
    for (v, anchor_x) in [(x0, m), (x1, m + plot_w)] {
        svg.text(anchor_x, m + plot_h + 14.0, 9.0, "middle", &format!("{v:.3}"));
    }
    for (v, y) in [(y0, m), (y1, m + plot_h)] {
        svg.text(m - 4.0, y + 3.0, 9.0, "end", &format!("{v:.4}"));
    }
    let color: BTreeMap<&str, &str> = crate::layout::Algorithm::ALL
        .iter()
        .enumerate()
        .map(|(i, a)| (a.name(), PALETTE[i]))
        .collect();
    for (i, (alg, pts)) in points.iter().enumerate() {
        let c = color.get(alg.as_str()).copied().unwrap_or("#444444");
        let line: Vec<(f64, f64)> = pts.iter().flatten().map(|&(x, y)| (sx(x), sy(y))).collect();
        svg.polyline(&line, c);
        for (k, p) in pts.iter().enumerate() {
            if let Some((x, y)) = p {
                svg.glyph(k, sx(*x), sy(*y), c);
            }
        }
        let ly = m + 16.0 * i as f64;
        svg.rect(w - 150.0, ly, 12.0, 12.0, c);
        svg.text(w - 132.0, ly + 10.0, 11.0, "start", alg);
    }
    let ly = m + 16.0 * points.len() as f64 + 12.0;
    for (k, sub) in feature.subclasses().iter().enumerate() {
        let y = ly + 16.0 * k as f64;
        svg.glyph(k, w - 144.0, y, "#333333");
        svg.text(w - 132.0, y + 4.0, 11.0, "start", sub);
    }
    svg.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(d: &str, a: &str, rho: f64, sigma: f64) -> ReportSummary {
        ReportSummary {
            dataset: d.into(),
            algorithm: a.into(),
            mean_rho: rho,
            mean_sigma: Some(sigma),
        }
    }

    #[test]
    fn two_by_two_matrix() {
        let s = vec![
            summary("d1", "SND", 0.5, 0.01),
            summary("d1", "SQR", 0.9, 0.2),
            summary("d2", "SND", 0.4, 0.02),
            summary("d2", "SQR", 0.8, 0.1),
        ];
        let table = relative_score_table(&s, Metric::VisualQuality);
        let svg = matrix_svg("t", &["d1".into(), "d2".into()], &table);
        assert_eq!(svg.matches("<rect x=").count(), 4);
    }

    #[test]
    fn ranking_sorts_each_column() {
        let s = vec![
            summary("d1", "SND", 0.5, 0.01),
            summary("d1", "SQR", 0.9, 0.2),
            summary("d1", "GIT", 0.7, 0.05),
        ];
        let r = ranking(&s, &["d1".into()]);
        let q: Vec<&str> = r.quality.iter().map(|x| x.0.as_str()).collect();
        let st: Vec<&str> = r.stability.iter().map(|x| x.0.as_str()).collect();
        assert_eq!(q, ["SQR", "GIT", "SND"]);
        assert_eq!(st, ["SND", "GIT", "SQR"]);
    }

    #[test]
    fn missing_classes_are_omitted() {
        let dir = std::env::temp_dir().join(format!("treemap-report-{}", std::process::id()));
        let s = vec![summary("d1", "SND", 0.5, 0.01), summary("d1", "SQR", 0.9, 0.2)];
        let c: DataClass = "1L-LWV-LWC-LID".parse().unwrap();
        let other: DataClass = "4+L-HWV-SWC-SID".parse().unwrap();
        let classes = BTreeMap::from([("d1".to_string(), c)]);
        let files = render_reports(&s, &classes, &[c, other], 0, &dir).unwrap();
        let names: Vec<String> = files
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        assert!(names.contains(&"matrix_visual_quality_1L-LWV-LWC-LID.svg".to_string()));
        assert!(!names.iter().any(|n| n.contains("4pL")));
        assert!(names.contains(&"features_levels.svg".to_string()));
        let again = render_reports(&s, &classes, &[c, other], 0, &dir).unwrap();
        assert_eq!(files, again);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn subclasses_weigh_classes_equally() {
        let a: DataClass = "1L-LWV-LWC-LID".parse().unwrap();
        let b: DataClass = "1L-HWV-LWC-LID".parse().unwrap();
        // Class a has three datasets, class b one; each class counts once.
        let s = vec![
            summary("a1", "SND", 0.2, 0.0),
            summary("a2", "SND", 0.2, 0.0),
            summary("a3", "SND", 0.2, 0.0),
            summary("b1", "SND", 0.6, 0.4),
        ];
        let members = BTreeMap::from([
            (a, vec!["a1".to_string(), "a2".into(), "a3".into()]),
            (b, vec!["b1".to_string()]),
        ]);
        let pts = feature_points(Feature::Levels, &class_means(&s, &members));
        let (q, sigma) = pts["SND"][0].unwrap();
        assert!((q - 0.4).abs() < 1e-12);
        assert!((sigma - 0.2).abs() < 1e-12);
        assert!(pts["SND"][1].is_none());
    }
}
