//! Body generators, experiment configuration, batch execution and
//! bit-exact report emission.
//!
//! A `BodySpec` fully determines a body (random specs through their own
//! seed), and an `ExperimentConfig` fully determines a report: every
//! Monte Carlo seed is derived from the master seed by the splitmix64
//! counter scheme in `rng`, so identical configs produce byte-identical
//! CSV output regardless of worker count.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::body::{ConvexBody, Ellipsoid};
use crate::error::{Error, Result};
use crate::pipeline;
use crate::positions;
use crate::rng;
use crate::volume::{self, McConfig};

/// Report schema version; bump on any change to the column set.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

pub const REPORT_COLUMNS: [&str; 21] = [
    "schema_version",
    "body_id",
    "kind",
    "dimension",
    "scale",
    "seed",
    "volume",
    "volume_method",
    "volume_stderr",
    "volume_term",
    "upper",
    "lower",
    "inradius_k3",
    "gamma",
    "rs_ratio",
    "mproxy_source",
    "mproxy_sum_ratio",
    "mproxy_intersection_ratio",
    "a2_empirical",
    "approximate",
    "error",
];

/// Declarative body description (the JSON input format).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodySpec {
    pub id: String,
    pub kind: BodyKind,
    pub dimension: usize,
    #[serde(default = "default_scale")]
    pub scale: f64,
}

fn default_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BodyKind {
    Ball,
    LpBall { p: f64 },
    Cube,
    CrossPolytope,
    Simplex,
    Ellipsoid { shape: Vec<Vec<f64>> },
    VPolytope { vertices: Vec<Vec<f64>> },
    RandomPolytope { count: usize, seed: u64 },
}

impl BodyKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Ball => "ball",
            Self::LpBall { .. } => "lp-ball",
            Self::Cube => "cube",
            Self::CrossPolytope => "cross-polytope",
            Self::Simplex => "simplex",
            Self::Ellipsoid { .. } => "ellipsoid",
            Self::VPolytope { .. } => "v-polytope",
            Self::RandomPolytope { .. } => "random-polytope",
        }
    }
}

/// Matrix input format for the factorization subcommands: row-major
/// entries of a square matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixSpec {
    pub dim: usize,
    pub entries: Vec<f64>,
}

impl MatrixSpec {
    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        if self.entries.len() != self.dim * self.dim {
            return Err(Error::InvalidInput(format!(
                "matrix spec wants {} entries for dim {}, got {}",
                self.dim * self.dim,
                self.dim,
                self.entries.len()
            )));
        }
        Ok(DMatrix::from_row_slice(self.dim, self.dim, &self.entries))
    }

    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        let mut entries = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                entries.push(m[(i, j)]);
            }
        }
        Self {
            dim: m.nrows(),
            entries,
        }
    }
}

/// Deterministic body construction from a spec.
pub fn generate_body(spec: &BodySpec) -> Result<ConvexBody> {
    let d = spec.dimension;
    let s = spec.scale;
    if d < 2 {
        return Err(Error::InvalidInput(format!(
            "body {} needs dimension >= 2, got {d}",
            spec.id
        )));
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "body {} needs a positive finite scale, got {s}",
            spec.id
        )));
    }
    match &spec.kind {
        BodyKind::Ball => Ok(ConvexBody::Ellipsoid(Ellipsoid::ball(d, s)?)),
        BodyKind::Cube => Ok(ConvexBody::vpolytope(cube_vertices(d, s))?),
        BodyKind::CrossPolytope => Ok(ConvexBody::vpolytope(cross_vertices(d, s))?),
        BodyKind::Simplex => {
            let mut verts = vec![DVector::zeros(d)];
            for i in 0..d {
                verts.push(DVector::from_fn(d, |k, _| if k == i { s } else { 0.0 }));
            }
            ConvexBody::vpolytope(verts)
        }
        BodyKind::LpBall { p } => lp_ball(d, *p, s),
        BodyKind::Ellipsoid { shape } => {
            if shape.len() != d || shape.iter().any(|row| row.len() != d) {
                return Err(Error::InvalidInput(format!(
                    "body {}: shape matrix must be {d}x{d}",
                    spec.id
                )));
            }
            let mut m = DMatrix::zeros(d, d);
            for (i, row) in shape.iter().enumerate() {
                for (j, &x) in row.iter().enumerate() {
                    m[(i, j)] = x;
                }
            }
            ConvexBody::ellipsoid(DVector::zeros(d), m / (s * s))
        }
        BodyKind::VPolytope { vertices } => {
            if vertices.iter().any(|v| v.len() != d) {
                return Err(Error::InvalidInput(format!(
                    "body {}: vertices must have dimension {d}",
                    spec.id
                )));
            }
            ConvexBody::vpolytope(
                vertices
                    .iter()
                    .map(|v| DVector::from_row_slice(v) * s)
                    .collect(),
            )
        }
        BodyKind::RandomPolytope { count, seed } => {
            if *count < d + 1 {
                return Err(Error::InvalidInput(format!(
                    "body {}: random polytope needs at least {} vertices",
                    spec.id,
                    d + 1
                )));
            }
            let mut r = rng::rng_from_seed(*seed);
            for _attempt in 0..16 {
                let verts: Vec<DVector<f64>> = (0..*count)
                    .map(|_| rng::unit_vector(&mut r, d) * s)
                    .collect();
                if let Ok(b) = ConvexBody::vpolytope(verts) {
                    return Ok(b);
                }
            }
            Err(Error::Numerical(format!(
                "body {}: failed to draw a full-dimensional random polytope",
                spec.id
            )))
        }
    }
}

fn cube_vertices(d: usize, s: f64) -> Vec<DVector<f64>> {
    (0..(1u32 << d))
        .map(|mask| DVector::from_fn(d, |i, _| if mask >> i & 1 == 1 { s } else { -s }))
        .collect()
}

fn cross_vertices(d: usize, s: f64) -> Vec<DVector<f64>> {
    let mut verts = Vec::with_capacity(2 * d);
    for i in 0..d {
        for sign in [-1.0, 1.0] {
            verts.push(DVector::from_fn(d, |k, _| if k == i { sign * s } else { 0.0 }));
        }
    }
    verts
}

fn lp_ball(d: usize, p: f64, s: f64) -> Result<ConvexBody> {
    if p == 1.0 {
        return Ok(ConvexBody::vpolytope(cross_vertices(d, s))?);
    }
    if p.is_infinite() && p > 0.0 {
        return Ok(ConvexBody::vpolytope(cube_vertices(d, s))?);
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "lp-ball needs p in (1, inf) or exactly 1/inf, got {p}"
        )));
    }
    // boundary grid of the unit p-ball, same direction budget as the
    // ellipsoid approximation
    let ball = Ellipsoid::unit_ball(d);
    let dirs = ball.boundary_grid();
    let verts: Vec<DVector<f64>> = dirs
        .into_iter()
        .map(|u| {
            let norm_p = u.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p);
            u * (s / norm_p)
        })
        .collect();
    ConvexBody::vpolytope(verts)
}

/// Optional per-run tolerance overrides.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub loewner_eps: Option<f64>,
    pub exact_sum_cap: Option<usize>,
}

/// Batch experiment configuration (the JSON input format).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Bodies to run. Empty means: run the standard battery over
    /// `dimensions`.
    #[serde(default)]
    pub bodies: Vec<BodySpec>,
    /// Dimensions of the standard battery when `bodies` is empty.
    #[serde(default = "default_dimensions")]
    pub dimensions: Vec<usize>,
    #[serde(default = "default_samples")]
    pub mc_samples: u64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub tolerances: ToleranceOverrides,
    /// CSV output path.
    pub output: PathBuf,
    /// Pipeline stages to dump as body-spec JSON next to the CSV
    /// (any of "k1", "k2", "k3").
    #[serde(default)]
    pub dump_stages: Vec<String>,
    #[serde(default)]
    pub plot: bool,
}

fn default_dimensions() -> Vec<usize> {
    vec![2, 4, 6]
}

fn default_samples() -> u64 {
    1_000_000
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        for &d in &self.dimensions {
            if d < 2 || d % 2 != 0 {
                return Err(Error::InvalidInput(format!(
                    "battery dimensions must be even and >= 2, got {d}"
                )));
            }
        }
        for spec in &self.bodies {
            if spec.dimension % 2 != 0 {
                return Err(Error::InvalidInput(format!(
                    "body {} has odd dimension {}; capacity experiments need 2n",
                    spec.id, spec.dimension
                )));
            }
            generate_body(spec).map(|_| ())?;
        }
        for stage in &self.dump_stages {
            if !matches!(stage.as_str(), "k1" | "k2" | "k3") {
                return Err(Error::InvalidInput(format!(
                    "unknown dump stage {stage:?}; expected k1, k2 or k3"
                )));
            }
        }
        if self.mc_samples < 10_000 {
            return Err(Error::InvalidInput(
                "mc_samples must be at least 10000".into(),
            ));
        }
        Ok(())
    }

    fn mc_config(&self, row_seed: u64) -> McConfig {
        McConfig {
            samples: self.mc_samples,
            seed: row_seed,
            loewner_eps: self
                .tolerances
                .loewner_eps
                .unwrap_or(crate::tolerances::LOEWNER_EPS),
            exact_sum_cap: self
                .tolerances
                .exact_sum_cap
                .unwrap_or_else(|| McConfig::default().exact_sum_cap),
        }
    }
}

/// The standard test battery for one dimension: ball, cube,
/// cross-polytope, simplex and two seeded random polytopes.
pub fn standard_battery(d: usize) -> Vec<BodySpec> {
    let random_count = match d {
        2 => 8,
        4 => 10,
        _ => 8,
    };
    let mk = |name: &str, kind: BodyKind| BodySpec {
        id: format!("{name}-2n{d}"),
        kind,
        dimension: d,
        scale: 1.0,
    };
    vec![
        mk("ball", BodyKind::Ball),
        mk("cube", BodyKind::Cube),
        mk("cross", BodyKind::CrossPolytope),
        mk("simplex", BodyKind::Simplex),
        mk(
            "random-a",
            BodyKind::RandomPolytope {
                count: random_count,
                seed: 101,
            },
        ),
        mk(
            "random-b",
            BodyKind::RandomPolytope {
                count: random_count,
                seed: 202,
            },
        ),
    ]
}

/// One row of the experiment report.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub body_id: String,
    pub kind: String,
    pub dimension: usize,
    pub scale: f64,
    pub seed: u64,
    pub values: Option<RowValues>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RowValues {
    pub volume: f64,
    pub volume_method: &'static str,
    pub volume_stderr: f64,
    pub volume_term: f64,
    pub upper: f64,
    pub lower: f64,
    pub inradius_k3: f64,
    pub gamma: f64,
    pub rs_ratio: f64,
    pub mproxy_source: &'static str,
    pub mproxy_sum_ratio: f64,
    pub mproxy_intersection_ratio: f64,
    pub a2: f64,
    pub approximate: bool,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub invariants_pass: bool,
    pub csv_path: PathBuf,
    pub svg_path: Option<PathBuf>,
}

fn run_one(spec: &BodySpec, cfg: &McConfig) -> Result<RowValues> {
    let body = generate_body(spec)?;
    let report = pipeline::viterbo_ratio(&body, cfg)?;
    let vol = volume::volume(&body, cfg)?;
    let rs = pipeline::rogers_shephard_ratio(&body, cfg)?;
    let proxy = positions::m_proxy(&body, cfg)?;
    let trace = report
        .bound
        .trace
        .as_ref()
        .ok_or_else(|| Error::Numerical("pipeline returned no trace".into()))?;
    Ok(RowValues {
        volume: vol.value,
        volume_method: vol.method.as_str(),
        volume_stderr: vol.stderr,
        volume_term: report.volume_term,
        upper: report.bound.upper,
        lower: report.bound.lower,
        inradius_k3: trace.r,
        gamma: report.gamma,
        rs_ratio: rs,
        mproxy_source: proxy.source.as_str(),
        mproxy_sum_ratio: proxy.quality.sum,
        mproxy_intersection_ratio: proxy.quality.intersection,
        a2: trace.a2,
        approximate: trace.theta_check_mc
            || vol.method == volume::VolumeMethod::MonteCarlo,
    })
}

fn row_invariants_hold(v: &RowValues, dimension: usize) -> bool {
    let gamma_consistent =
        (v.gamma - (v.upper / std::f64::consts::PI) / v.volume_term).abs() <= 1e-9 * v.gamma.abs().max(1.0);
    let bounds_ordered = v.lower <= v.upper + 1e-9;
    let rs_bound = v.rs_ratio <= 4f64.powi(dimension as i32) * (1.0 + 1e-6) + 1e-9;
    let positive = v.volume > 0.0 && v.upper > 0.0;
    gamma_consistent && bounds_ordered && rs_bound && positive
}

/// 17-significant-digit decimal formatting used in every numeric CSV cell.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Run the batch, write the CSV (and optional SVG) atomically, and return
/// the in-memory report. Row failures land in the error column; they and
/// any invariant violation clear `invariants_pass`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let specs: Vec<BodySpec> = if config.bodies.is_empty() {
        config
            .dimensions
            .iter()
            .flat_map(|&d| standard_battery(d))
            .collect()
    } else {
        config.bodies.clone()
    };

    let rows: Vec<ReportRow> = specs
        .par_iter()
        .enumerate()
        .map(|(idx, spec)| {
            let seed = rng::derive_seed(config.master_seed, idx as u64);
            let cfg = config.mc_config(seed);
            let result = run_one(spec, &cfg);
            let (values, error) = match result {
                Ok(v) => (Some(v), None),
                Err(e) => (None, Some(e.to_string())),
            };
            ReportRow {
                body_id: spec.id.clone(),
                kind: spec.kind.name().to_string(),
                dimension: spec.dimension,
                scale: spec.scale,
                seed,
                values,
                error,
            }
        })
        .collect();

    let invariants_pass = rows.iter().all(|r| {
        r.error.is_none()
            && r.values
                .as_ref()
                .is_some_and(|v| row_invariants_hold(v, r.dimension))
    });

    write_csv_atomic(&config.output, &rows)?;

    if !config.dump_stages.is_empty() {
        dump_stages(config, &specs)?;
    }

    let svg_path = if config.plot {
        let path = config.output.with_extension("svg");
        write_scatter_svg(&path, &rows)?;
        Some(path)
    } else {
        None
    };

    Ok(ExperimentReport {
        rows,
        invariants_pass,
        csv_path: config.output.clone(),
        svg_path,
    })
}

fn write_csv_atomic(path: &Path, rows: &[ReportRow]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer
        .write_record(REPORT_COLUMNS)
        .map_err(|e| Error::InvalidInput(format!("csv write failed: {e}")))?;
    for row in rows {
        let mut record: Vec<String> = vec![
            REPORT_SCHEMA_VERSION.to_string(),
            row.body_id.clone(),
            row.kind.clone(),
            row.dimension.to_string(),
            fmt_f64(row.scale),
            row.seed.to_string(),
        ];
        match &row.values {
            Some(v) => {
                record.extend([
                    fmt_f64(v.volume),
                    v.volume_method.to_string(),
                    fmt_f64(v.volume_stderr),
                    fmt_f64(v.volume_term),
                    fmt_f64(v.upper),
                    fmt_f64(v.lower),
                    fmt_f64(v.inradius_k3),
                    fmt_f64(v.gamma),
                    fmt_f64(v.rs_ratio),
                    v.mproxy_source.to_string(),
                    fmt_f64(v.mproxy_sum_ratio),
                    fmt_f64(v.mproxy_intersection_ratio),
                    fmt_f64(v.a2),
                    v.approximate.to_string(),
                    String::new(),
                ]);
            }
            None => {
                record.extend((0..14).map(|_| String::new()));
                record.push(row.error.clone().unwrap_or_default());
            }
        }
        writer
            .write_record(&record)
            .map_err(|e| Error::InvalidInput(format!("csv write failed: {e}")))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::InvalidInput(format!("csv flush failed: {e}")))?;
    let tmp = path.with_extension("csv.tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn dump_stages(config: &ExperimentConfig, specs: &[BodySpec]) -> Result<()> {
    let dir = config
        .output
        .parent()
        .map(|p| p.to_path_buf())
        .unwrap_or_else(|| PathBuf::from("."));
    for spec in specs {
        let seed = rng::derive_seed(config.master_seed, 0);
        let cfg = config.mc_config(seed);
        let body = generate_body(spec)?;
        let bound = pipeline::tmt_upper_bound(&body, &cfg)?;
        let Some(trace) = bound.trace else { continue };
        for stage in &config.dump_stages {
            let stage_body = match stage.as_str() {
                "k1" => &trace.k1,
                "k2" => &trace.k2,
                _ => &trace.k3,
            };
            let spec_out = body_to_spec(
                format!("{}-{stage}", spec.id),
                stage_body,
            )?;
            let path = dir.join(format!("{}-{stage}.json", spec.id));
            fs::write(&path, serde_json::to_vec_pretty(&spec_out)?)?;
        }
    }
    Ok(())
}

/// Express a computed body as a serializable spec (vertex lists for
/// polytopes, shape matrices for ellipsoids).
pub fn body_to_spec(id: String, body: &ConvexBody) -> Result<BodySpec> {
    let d = body.dim();
    let kind = match body {
        ConvexBody::Ellipsoid(e) => {
            if e.center().norm() > 1e-9 {
                return Err(Error::InvalidInput(
                    "stage dump expects centered ellipsoids".into(),
                ));
            }
            let mut shape = vec![vec![0.0; d]; d];
            for i in 0..d {
                for j in 0..d {
                    shape[i][j] = e.shape()[(i, j)];
                }
            }
            BodyKind::Ellipsoid { shape }
        }
        _ => {
            let p = body.to_vpolytope()?;
            BodyKind::VPolytope {
                vertices: p
                    .vertices()
                    .iter()
                    .map(|v| v.iter().cloned().collect())
                    .collect(),
            }
        }
    };
    Ok(BodySpec {
        id,
        kind,
        dimension: d,
        scale: 1.0,
    })
}

fn write_scatter_svg(path: &Path, rows: &[ReportRow]) -> Result<()> {
    let pts: Vec<(usize, f64)> = rows
        .iter()
        .filter_map(|r| r.values.as_ref().map(|v| (r.dimension, v.gamma)))
        .collect();
    let gmax = pts.iter().map(|&(_, g)| g).fold(1.0f64, f64::max) * 1.1;
    let dmax = pts.iter().map(|&(d, _)| d).max().unwrap_or(6) + 2;
    let (w, h) = (640.0, 420.0);
    let (ml, mb) = (60.0, 40.0);
    let sx = |d: usize| ml + (w - ml - 20.0) * d as f64 / dmax as f64;
    let sy = |g: f64| (h - mb) - (h - mb - 20.0) * g / gmax;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{0}\" x2=\"{w}\" y2=\"{0}\" stroke=\"black\"/>\n",
        h - mb
    ));
    svg.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"20\" x2=\"{ml}\" y2=\"{}\" stroke=\"black\"/>\n",
        h - mb
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"13\">dimension 2n</text>\n",
        w / 2.0 - 40.0,
        h - 8.0
    ));
    svg.push_str(&format!(
        "<text x=\"12\" y=\"{}\" font-size=\"13\" transform=\"rotate(-90 12 {})\">gamma</text>\n",
        h / 2.0,
        h / 2.0
    ));
    for d in (2..=dmax).step_by(2) {
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\">{d}</text>\n",
            sx(d),
            h - mb + 16.0
        ));
    }
    for k in 0..=4 {
        let g = gmax * k as f64 / 4.0;
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"end\">{g:.1}</text>\n",
            ml - 6.0,
            sy(g) + 4.0
        ));
    }
    for (d, g) in &pts {
        svg.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"steelblue\" fill-opacity=\"0.7\"/>\n",
            sx(*d),
            sy(*g)
        ));
    }
    svg.push_str("</svg>\n");
    let tmp = path.with_extension("svg.tmp");
    fs::write(&tmp, svg)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_bodies_match_their_specs() {
        let cube = generate_body(&BodySpec {
            id: "c".into(),
            kind: BodyKind::Cube,
            dimension: 4,
            scale: 1.0,
        })
        .unwrap();
        let ConvexBody::VPolytope(p) = &cube else { panic!() };
        assert_eq!(p.vertices().len(), 16);

        let l1 = generate_body(&BodySpec {
            id: "l1".into(),
            kind: BodyKind::LpBall { p: 1.0 },
            dimension: 4,
            scale: 1.0,
        })
        .unwrap();
        let ConvexBody::VPolytope(p) = &l1 else { panic!() };
        assert_eq!(p.vertices().len(), 8);
    }

    #[test]
    fn random_bodies_are_reproducible() {
        let spec = BodySpec {
            id: "r".into(),
            kind: BodyKind::RandomPolytope { count: 40, seed: 7 },
            dimension: 4,
            scale: 1.0,
        };
        let a = generate_body(&spec).unwrap();
        let b = generate_body(&spec).unwrap();
        let (ConvexBody::VPolytope(pa), ConvexBody::VPolytope(pb)) = (&a, &b) else {
            panic!()
        };
        assert_eq!(pa.vertices().len(), pb.vertices().len());
        for (x, y) in pa.vertices().iter().zip(pb.vertices()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn odd_dimension_configs_are_rejected() {
        let config = ExperimentConfig {
            bodies: vec![BodySpec {
                id: "bad".into(),
                kind: BodyKind::Ball,
                dimension: 3,
                scale: 1.0,
            }],
            dimensions: vec![2],
            mc_samples: 10_000,
            master_seed: 0,
            tolerances: Default::default(),
            output: PathBuf::from("/tmp/unused.csv"),
            dump_stages: vec![],
            plot: false,
        };
        assert!(matches!(config.validate(), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn matrix_spec_round_trips() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let spec = MatrixSpec::from_matrix(&m);
        assert_eq!(spec.entries, vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(spec.to_matrix().unwrap(), m);
    }

    #[test]
    fn seventeen_significant_digits() {
        let x = std::f64::consts::PI * 32.0;
        let s = fmt_f64(x);
        let back: f64 = s.parse().unwrap();
        assert_eq!(back.to_bits(), x.to_bits());
    }
}
