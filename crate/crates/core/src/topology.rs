//! Sampling real curves by hyperplane slices and counting connected
//! components of the Vietoris-Rips graph of the sample.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{square_system, AlgebraError, Poly, PolySystem, VariableGroups};
use crate::rng::{unit_circle, SeedTree, Stream};
use crate::tracking::{track_all, PathStatus, PolyHomotopy, ProductStartSystem, TrackerConfig};
use crate::Complex;

/// Residual bound every sample satisfies on the original equations.
pub const SAMPLE_RESIDUAL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopologyError {
    #[error("sampling needs a curve (declared dimension 1), got dimension {0}")]
    NotACurve(usize),
    #[error("box has {found} intervals, ambient dimension is {expected}")]
    BoxDimension { found: usize, expected: usize },
    #[error("interval {0} is empty or not finite")]
    BadInterval(usize),
    #[error("spacing must be positive and finite")]
    BadSpacing,
    #[error("radius must be positive and finite")]
    BadRadius,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("cloud csv, record {record}: {message}")]
    Csv { record: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleCloud {
    pub points: Vec<Vec<f64>>,
    /// Name of the sampled system, for reports.
    pub source: String,
    pub residual_bound: f64,
    /// Largest distance from a sample to its nearest neighbour; a density
    /// diagnostic, not a coverage certificate.
    pub largest_gap: Option<f64>,
    pub slices: usize,
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt()
}

/// Grid `lo, lo + spacing, ...` up to `hi`.
fn grid(lo: f64, hi: f64, spacing: f64) -> Vec<f64> {
    let steps = ((hi - lo) / spacing + 1e-9).floor() as usize;
    (0..=steps).map(|i| lo + i as f64 * spacing).collect()
}

/// Samples the real points of a curve on the axis-aligned hyperplanes
/// `x_k = c`, `c` on a grid of the given spacing inside `bounds`.
///
/// Each slice is solved by a total-degree gamma homotopy; real solutions
/// inside the box that satisfy the original equations are kept, and points
/// closer than `spacing / 10` are merged.
pub fn sample_curve(
    spec: &PolySystem,
    bounds: &[(f64, f64)],
    spacing: f64,
    cfg: &TrackerConfig,
    seed: u64,
) -> Result<SampleCloud, TopologyError> {
    let n = spec.num_vars();
    if spec.declared_dim() != 1 {
        return Err(TopologyError::NotACurve(spec.declared_dim()));
    }
    if bounds.len() != n {
        return Err(TopologyError::BoxDimension {
            found: bounds.len(),
            expected: n,
        });
    }
    for (k, &(lo, hi)) in bounds.iter().enumerate() {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(TopologyError::BadInterval(k));
        }
    }
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(TopologyError::BadSpacing);
    }
    let tree = SeedTree::new(seed);
    let squared = square_system(spec, tree.child(Stream::SquareX))?;
    let gamma = unit_circle(&mut tree.rng(Stream::Gamma));
    let slices: Vec<(usize, f64)> = bounds
        .iter()
        .enumerate()
        .flat_map(|(k, &(lo, hi))| grid(lo, hi, spacing).into_iter().map(move |c| (k, c)))
        .collect();

    // One start system serves every slice: only the constant of the last equation changes.
    let template = slice_system(&squared.squared, 0, 0.0);
    let start = ProductStartSystem::random(
        &template,
        &VariableGroups::single(n),
        &mut tree.rng(Stream::Sampling),
    );
    let start_sys = start.to_system(template.vars());
    let starts = start.start_points();
    let inside = |p: &[f64]| {
        p.iter()
            .zip(bounds)
            .all(|(x, &(lo, hi))| *x >= lo && *x <= hi)
    };

    let found: Vec<Vec<Vec<f64>>> = slices
        .par_iter()
        .map(|&(k, c)| {
            let target = slice_system(&squared.squared, k, c);
            let h = PolyHomotopy::gamma_trick("slice", &target, &start_sys, gamma);
            track_all(&h, &starts, cfg)
                .into_iter()
                .filter(|o| matches!(o.status, PathStatus::Converged | PathStatus::Singular))
                .filter(|o| {
                    o.endpoint
                        .iter()
                        .all(|z| z.im.abs() <= 1e-8 * (1.0 + z.re.abs()))
                })
                .map(|o| o.endpoint.iter().map(|z| z.re).collect::<Vec<f64>>())
                .filter(|p| inside(p))
                .filter(|p| {
                    let z: Vec<Complex> = p.iter().map(|&x| Complex::new(x, 0.0)).collect();
                    spec.residual(&z) < SAMPLE_RESIDUAL
                })
                .collect()
        })
        .collect();

    let merge = spacing / 10.0;
    let mut points: Vec<Vec<f64>> = Vec::new();
    for p in found.into_iter().flatten() {
        if points.iter().all(|q| dist(q, &p) >= merge) {
            points.push(p);
        }
    }
    let largest_gap = nearest_neighbour_gaps(&points).into_iter().reduce(f64::max);
    Ok(SampleCloud {
        points,
        source: spec.vars().join(","),
        residual_bound: SAMPLE_RESIDUAL,
        largest_gap,
        slices: slices.len(),
    })
}

/// `{squared equations, x_k - c}`.
pub fn slice_system(squared: &PolySystem, k: usize, c: f64) -> PolySystem {
    let n = squared.num_vars();
    let mut polys = squared.polys().to_vec();
    polys.push(&Poly::var(n, k) - &Poly::constant(n, Complex::new(c, 0.0)));
    PolySystem::square(squared.vars().to_vec(), polys).expect("n - 1 equations plus the slice")
}

fn nearest_neighbour_gaps(points: &[Vec<f64>]) -> Vec<f64> {
    (0..points.len())
        .filter_map(|i| {
            (0..points.len())
                .filter(|&j| j != i)
                .map(|j| dist(&points[i], &points[j]))
                .reduce(f64::min)
        })
        .collect()
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        let mut root = i;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[i] != root {
            let next = self.parent[i];
            self.parent[i] = root;
            i = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Graph on the sample with an edge whenever `0 < |e_i - e_j| < 2r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RipsGraph {
    pub radius: f64,
    pub edges: Vec<(usize, usize)>,
    /// Component of each point, numbered in order of first appearance.
    pub labels: Vec<usize>,
    pub components: usize,
}

pub fn rips_graph(points: &[Vec<f64>], r: f64) -> Result<RipsGraph, TopologyError> {
    if !(r.is_finite() && r > 0.0) {
        return Err(TopologyError::BadRadius);
    }
    let mut edges = Vec::new();
    let mut uf = UnionFind::new(points.len());
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = dist(&points[i], &points[j]);
            if d > 0.0 && d < 2.0 * r {
                edges.push((i, j));
                uf.union(i, j);
            }
        }
    }
    let mut root_label = std::collections::HashMap::new();
    let labels: Vec<usize> = (0..points.len())
        .map(|i| {
            let root = uf.find(i);
            let next = root_label.len();
            *root_label.entry(root).or_insert(next)
        })
        .collect();
    Ok(RipsGraph {
        radius: r,
        edges,
        components: root_label.len(),
        labels,
    })
}

/// Number of components of the Rips graph and the label of each point.
pub fn rips_components(points: &[Vec<f64>], r: f64) -> Result<(usize, Vec<usize>), TopologyError> {
    rips_graph(points, r).map(|g| (g.components, g.labels))
}

/// Component labels of a sample, extended to arbitrary points by nearest sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentLabels {
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

impl ComponentLabels {
    pub fn from_cloud(points: &[Vec<f64>], r: f64) -> Result<Self, TopologyError> {
        let (_, labels) = rips_components(points, r)?;
        Ok(ComponentLabels {
            points: points.to_vec(),
            labels,
        })
    }

    /// Label of the sample nearest to `p`; `None` for an empty sample.
    pub fn label_of(&self, p: &[f64]) -> Option<usize> {
        self.points
            .iter()
            .zip(&self.labels)
            .map(|(q, &l)| (dist(p, q), l))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, l)| l)
    }
}

/// Writes one point per row under a `x1,...,xn[,label]` header.
pub fn write_cloud_csv<W: Write>(
    points: &[Vec<f64>],
    labels: Option<&[usize]>,
    out: W,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let n = points.first().map_or(0, Vec::len);
    let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    if labels.is_some() {
        header.push("label".into());
    }
    if n > 0 {
        w.write_record(&header)?;
    }
    for (i, p) in points.iter().enumerate() {
        let mut row: Vec<String> = p.iter().map(|x| format!("{x:?}")).collect();
        if let Some(l) = labels {
            row.push(l[i].to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a cloud written by [`write_cloud_csv`] or a bare numeric CSV.
/// A non-numeric first row is a header; a column headed `label` is dropped.
pub fn read_cloud_csv<R: Read>(input: R) -> Result<Vec<Vec<f64>>, TopologyError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut skip_col: Option<usize> = None;
    let mut width: Option<usize> = None;
    for (index, rec) in reader.records().enumerate() {
        let record = index + 1;
        let rec = rec.map_err(|e| TopologyError::Csv {
            record,
            message: e.to_string(),
        })?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        if index == 0 && rec.iter().any(|f| f.parse::<f64>().is_err()) {
            skip_col = rec.iter().position(|f| f.eq_ignore_ascii_case("label"));
            continue;
        }
        let mut p = Vec::with_capacity(rec.len());
        for (c, field) in rec.iter().enumerate() {
            if Some(c) == skip_col {
                continue;
            }
            let x: f64 = field.parse().map_err(|_| TopologyError::Csv {
                record,
                message: format!("not a number: {field:?}"),
            })?;
            if !x.is_finite() {
                return Err(TopologyError::Csv {
                    record,
                    message: "non-finite coordinate".into(),
                });
            }
            p.push(x);
        }
        match width {
            None => width = Some(p.len()),
            Some(w) if w != p.len() => {
                return Err(TopologyError::Csv {
                    record,
                    message: format!("expected {w} coordinates, found {}", p.len()),
                })
            }
            _ => {}
        }
        points.push(p);
    }
    Ok(points)
}
