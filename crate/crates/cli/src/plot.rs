//! Plot data: sample points, bottleneck segments, and an SVG for plane curves.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use bottleneck_core::algebra::random_orthogonal;
use bottleneck_core::bottleneck::BottleneckPair;
use bottleneck_core::rng::{SeedTree, Stream};
use nalgebra::DMatrix;

use crate::InputError;

#[derive(Debug, Clone, PartialEq)]
pub enum PlotOutcome {
    Nothing,
    Written {
        files: Vec<PathBuf>,
        projected: bool,
    },
}

/// Projection to R^3 used for ambient dimension above 3: the first three
/// rows of a seeded random orthogonal matrix.
pub fn plot_projection(n: usize, seed: u64) -> Option<DMatrix<f64>> {
    (n > 3).then(|| {
        let q = random_orthogonal(n, &mut SeedTree::new(seed).rng(Stream::Projection));
        q.rows(0, 3).into_owned()
    })
}

fn apply(m: Option<&DMatrix<f64>>, p: &[f64]) -> Vec<f64> {
    match m {
        None => p.to_vec(),
        Some(m) => (0..m.nrows())
            .map(|r| (0..p.len()).map(|c| m[(r, c)] * p[c]).sum())
            .collect(),
    }
}

fn write(path: &Path, text: &str) -> Result<(), InputError> {
    std::fs::write(path, text).map_err(|e| InputError::Io(format!("{}: {e}", path.display())))
}

/// Writes `points.csv`, `segments.csv` and, for plane curves, `plot.svg`
/// into `dir`. Only real pairs are drawn.
pub fn emit_plot(
    pairs: &[BottleneckPair],
    cloud: &[Vec<f64>],
    n: usize,
    seed: u64,
    dir: &Path,
) -> Result<PlotOutcome, InputError> {
    let real: Vec<&BottleneckPair> = pairs.iter().filter(|p| p.is_real).collect();
    if real.is_empty() && cloud.is_empty() {
        return Ok(PlotOutcome::Nothing);
    }
    std::fs::create_dir_all(dir).map_err(|e| InputError::Io(format!("{}: {e}", dir.display())))?;
    let proj = plot_projection(n, seed);
    let k = proj.as_ref().map_or(n, |m| m.nrows());
    let coords = |prefix: &str| {
        (1..=k)
            .map(|i| format!("{prefix}{i}"))
            .collect::<Vec<_>>()
            .join(",")
    };

    let points: Vec<Vec<f64>> = cloud.iter().map(|p| apply(proj.as_ref(), p)).collect();
    let segments: Vec<(Vec<f64>, Vec<f64>, f64)> = real
        .iter()
        .map(|p| {
            let re = |z: &[bottleneck_core::Complex]| z.iter().map(|c| c.re).collect::<Vec<f64>>();
            (
                apply(proj.as_ref(), &re(&p.x)),
                apply(proj.as_ref(), &re(&p.y)),
                p.distance.unwrap_or(f64::NAN),
            )
        })
        .collect();

    let mut files = Vec::new();
    let mut text = coords("x") + "\n";
    for p in &points {
        text += &join(p);
        text.push('\n');
    }
    let path = dir.join("points.csv");
    write(&path, &text)?;
    files.push(path);

    let mut text = format!("{},{},distance\n", coords("a"), coords("b"));
    for (a, b, d) in &segments {
        let _ = writeln!(text, "{},{},{d:?}", join(a), join(b));
    }
    let path = dir.join("segments.csv");
    write(&path, &text)?;
    files.push(path);

    if n == 2 {
        let path = dir.join("plot.svg");
        write(&path, &svg(&points, &segments))?;
        files.push(path);
    }
    Ok(PlotOutcome::Written {
        files,
        projected: proj.is_some(),
    })
}

fn join(p: &[f64]) -> String {
    p.iter()
        .map(|x| format!("{x:?}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn svg(points: &[Vec<f64>], segments: &[(Vec<f64>, Vec<f64>, f64)]) -> String {
    const SIZE: f64 = 600.0;
    const MARGIN: f64 = 30.0;
    let all = points.iter().map(Vec::as_slice).chain(
        segments
            .iter()
            .flat_map(|(a, b, _)| [a.as_slice(), b.as_slice()]),
    );
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in all {
        for i in 0..2 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let map = |p: &[f64]| {
        (
            MARGIN + (p[0] - lo[0]) * scale,
            SIZE - MARGIN - (p[1] - lo[1]) * scale,
        )
    };

    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    for p in points {
        let (x, y) = map(p);
        let _ = writeln!(
            s,
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"1.5\" fill=\"#555\"/>"
        );
    }
    for (a, b, _) in segments {
        let ((x1, y1), (x2, y2)) = (map(a), map(b));
        let _ = writeln!(
            s,
            "<line class=\"bottleneck\" x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"#c00\" stroke-width=\"1.5\"/>"
        );
        for (x, y) in [(x1, y1), (x2, y2)] {
            let _ = writeln!(
                s,
                "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"#c00\"/>"
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
