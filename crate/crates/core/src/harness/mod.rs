//! Experiment configuration, dispatch and persistence.
//!
//! A run reads an [`ExperimentConfig`], writes one or more CSV tables, any
//! SVG plots, and a `report.json` holding the [`RunManifest`] and the
//! results. Outputs depend only on the configuration: rows are computed in
//! parallel but collected in input order, randomness comes from a seeded
//! ChaCha stream, and the manifest carries no clock readings.

pub mod output;
pub mod scan;

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cantor::{self, GammaSequence};
use crate::chebyshev::{bound_audit, weighted_chebyshev, BoundReport};
use crate::error::{Error, Result};
use crate::orthopoly::{discretize, l2_bound_audit, stieltjes};
use crate::potential::EquilibriumMeasure;
use crate::realsets::RealCompactSet;
use crate::weights::{szego_factor, WeightExpr};
use output::{line_plot, Series, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    CapacityTable,
    ChebSweep,
    OpolySweep,
    BoundsAudit,
    Bernstein,
    Cantor,
    ConjectureScan,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::CapacityTable => "capacity-table",
            Kind::ChebSweep => "cheb-sweep",
            Kind::OpolySweep => "opoly-sweep",
            Kind::BoundsAudit => "bounds-audit",
            Kind::Bernstein => "bernstein",
            Kind::Cantor => "cantor",
            Kind::ConjectureScan => "conjecture-scan",
        }
    }
}

/// A band set, given directly or as a level of a Cantor construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bands: Option<Vec<(f64, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cantor: Option<CantorLevel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CantorLevel {
    pub gamma: GammaSequence,
    pub level: usize,
}

impl SetSpec {
    pub fn bands(pairs: &[(f64, f64)]) -> Self {
        Self {
            bands: Some(pairs.to_vec()),
            cantor: None,
        }
    }

    pub fn build(&self) -> Result<RealCompactSet> {
        match (&self.bands, &self.cantor) {
            (Some(b), None) => RealCompactSet::from_pairs(b),
            (None, Some(c)) => Ok(cantor::iterate(&c.gamma, c.level)?.bands),
            _ => Err(Error::InvalidArgument(
                "set needs exactly one of `bands` or `cantor`".into(),
            )),
        }
    }
}

fn default_tol() -> f64 {
    1e-10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<SetSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sets: Vec<SetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightExpr>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weights: Vec<WeightExpr>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub degrees: Vec<usize>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<GammaSequence>,
    /// Cantor levels `s` for numeric comparisons.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<usize>,
    /// Number of random instances for randomized kinds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instances: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_bands: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(kind: Kind) -> Self {
        Self {
            kind: Some(kind),
            set: None,
            sets: Vec::new(),
            weight: None,
            weights: Vec::new(),
            degrees: Vec::new(),
            tol: default_tol(),
            seed: None,
            out: None,
            gamma: None,
            levels: Vec::new(),
            instances: None,
            max_degree: None,
            max_bands: None,
        }
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        serde_json::from_slice(bytes).map_err(|e| Error::InvalidArgument(format!("config: {e}")))
    }

    fn kind(&self) -> Result<Kind> {
        self.kind
            .ok_or_else(|| Error::InvalidArgument("config has no `kind`".into()))
    }

    fn randomized(&self) -> bool {
        match self.kind {
            Some(Kind::ConjectureScan) => true,
            Some(Kind::BoundsAudit) => self.instances.is_some(),
            _ => false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let kind = self.kind()?;
        let need = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{} needs {what}", kind.name())))
            }
        };
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument("tol must be positive".into()));
        }
        if self.randomized() {
            need(self.seed.is_some(), "a seed")?;
        }
        match kind {
            Kind::CapacityTable => need(self.set.is_some() || !self.sets.is_empty(), "`set` or `sets`"),
            Kind::ChebSweep | Kind::OpolySweep => {
                need(self.set.is_some(), "`set`")?;
                need(!self.degrees.is_empty(), "`degrees`")
            }
            Kind::BoundsAudit if self.instances.is_none() => {
                need(self.set.is_some(), "`set`")?;
                need(!self.degrees.is_empty(), "`degrees`")
            }
            Kind::BoundsAudit | Kind::ConjectureScan => Ok(()),
            Kind::Bernstein => {
                need(self.set.is_some(), "`set`")?;
                need(!self.weights.is_empty() || self.weight.is_some(), "`weights`")?;
                need(!self.degrees.is_empty(), "`degrees`")
            }
            Kind::Cantor => {
                need(self.gamma.is_some(), "`gamma`")?;
                need(!self.degrees.is_empty(), "`degrees`")
            }
        }
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    fn weight(&self) -> WeightExpr {
        self.weight.clone().unwrap_or_else(WeightExpr::one)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub kind: Kind,
    pub config_hash: String,
    pub version: String,
    pub seed: Option<u64>,
    pub files: Vec<String>,
    pub failures: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub run: RunManifest,
    pub results: serde_json::Value,
}

struct Sink {
    dir: PathBuf,
    files: Vec<String>,
    failures: Vec<String>,
    warnings: Vec<String>,
}

impl Sink {
    fn table(&mut self, t: &Table) -> Result<()> {
        let f = t.write(&self.dir)?;
        self.files.push(f);
        Ok(())
    }

    fn plot(&mut self, name: &str, svg: Option<String>) -> Result<()> {
        match svg {
            Some(s) => {
                let file = format!("{name}.svg");
                std::fs::write(self.dir.join(&file), s)
                    .map_err(|e| Error::InvalidArgument(format!("{file}: {e}")))?;
                self.files.push(file);
            }
            None => self.warnings.push(format!("{name}: nothing to plot")),
        }
        Ok(())
    }

    fn fail(&mut self, row: impl std::fmt::Display, e: Error) {
        self.failures.push(format!("{row}: {e}"));
    }
}

/// Runs `cfg`, writing into `out` (or `cfg.out`, or the working directory).
pub fn run(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<Report> {
    cfg.validate()?;
    let kind = cfg.kind()?;
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.out.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| Error::InvalidArgument(format!("{}: {e}", dir.display())))?;
    let mut sink = Sink {
        dir: dir.clone(),
        files: Vec::new(),
        failures: Vec::new(),
        warnings: Vec::new(),
    };
    let results = match kind {
        Kind::CapacityTable => capacity_table(cfg, &mut sink)?,
        Kind::ChebSweep => cheb_sweep(cfg, &mut sink)?,
        Kind::OpolySweep => opoly_sweep(cfg, &mut sink)?,
        Kind::BoundsAudit => bounds_audit(cfg, &mut sink)?,
        Kind::Bernstein => bernstein(cfg, &mut sink)?,
        Kind::Cantor => cantor_run(cfg, &mut sink)?,
        Kind::ConjectureScan => conjecture_scan(cfg, &mut sink)?,
    };
    sink.files.push("report.json".into());
    let report = Report {
        run: RunManifest {
            kind,
            config_hash: cfg.hash(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: cfg.seed,
            files: sink.files,
            failures: sink.failures,
            warnings: sink.warnings,
        },
        results,
    };
    let json = serde_json::to_vec_pretty(&report).expect("report serializes");
    std::fs::write(dir.join("report.json"), json)
        .map_err(|e| Error::InvalidArgument(format!("report.json: {e}")))?;
    Ok(report)
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("results serialize")
}

fn capacity_table(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<serde_json::Value> {
    let specs: Vec<SetSpec> = cfg.set.iter().cloned().chain(cfg.sets.iter().cloned()).collect();
    let rows: Vec<Result<(usize, f64, f64, f64, f64)>> = specs
        .par_iter()
        .map(|s| {
            let k = s.build()?;
            let m = EquilibriumMeasure::new(&k)?;
            Ok((k.num_bands(), m.capacity(), m.log_capacity(), m.frostman_spread(), m.condition()))
        })
        .collect();
    let mut t = Table::new(
        "capacity",
        &["index", "bands", "capacity", "log_capacity", "frostman_spread", "condition"],
    );
    let mut out = Vec::new();
    for (i, r) in rows.into_iter().enumerate() {
        match r {
            Ok((b, c, lc, fs, cond)) => {
                t.push(vec![i.into(), b.into(), c.into(), lc.into(), fs.into(), cond.into()]);
                out.push(serde_json::json!({"index": i, "bands": b, "capacity": c, "log_capacity": lc}));
            }
            Err(e) => sink.fail(format!("set {i}"), e),
        }
    }
    sink.table(&t)?;
    Ok(serde_json::Value::Array(out))
}

fn sweep_table(
    name: &str,
    m: &EquilibriumMeasure,
    w: &WeightExpr,
    degrees: &[usize],
    tol: f64,
    sink: &mut Sink,
) -> Result<(Table, f64)> {
    let s = szego_factor(m, w, 1e-12)?.value;
    let log_cap = m.log_capacity();
    let rows: Vec<Result<_>> = degrees
        .par_iter()
        .map(|&n| weighted_chebyshev(m, w, n, tol))
        .collect();
    let mut t = Table::new(
        name,
        &["n", "t_lower", "t_upper", "w_lower", "w_upper", "two_s", "gap", "rounds"],
    );
    for (&n, r) in degrees.iter().zip(rows) {
        match r {
            Ok(r) => {
                let (lo, hi) = r.log_widom(log_cap);
                let (wl, wu) = (lo.exp(), hi.exp());
                t.push(vec![
                    n.into(),
                    r.t_lower.into(),
                    r.t_upper.into(),
                    wl.into(),
                    wu.into(),
                    (2.0 * s).into(),
                    (0.5 * (wl + wu) - 2.0 * s).abs().into(),
                    r.rounds.into(),
                ]);
            }
            Err(e) => sink.fail(format!("{name} n={n}"), e),
        }
    }
    Ok((t, s))
}

fn single_set(cfg: &ExperimentConfig) -> Result<EquilibriumMeasure> {
    let k = cfg
        .set
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("missing `set`".into()))?
        .build()?;
    EquilibriumMeasure::new(&k)
}

fn widom_series(t: &Table, label: &str, col: &str) -> Series {
    Series {
        label: label.into(),
        points: t.column("n").into_iter().zip(t.column(col)).collect(),
    }
}

fn cheb_sweep(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<serde_json::Value> {
    let m = single_set(cfg)?;
    let w = cfg.weight();
    w.validate(m.set())?;
    let (t, s) = sweep_table("cheb_sweep", &m, &w, &cfg.degrees, cfg.tol, sink)?;
    sink.table(&t)?;
    let plot = line_plot("sup-norm Widom factors", "n", &[widom_series(&t, "W_inf upper", "w_upper")], Some(("2S", 2.0 * s)));
    sink.plot("cheb_sweep", plot)?;
    Ok(to_value(&serde_json::json!({"two_s": 2.0 * s, "rows": t.rows.len()})))
}

fn opoly_sweep(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<serde_json::Value> {
    let m = single_set(cfg)?;
    let w = cfg.weight();
    w.validate(m.set())?;
    let top = cfg.degrees.iter().copied().max().unwrap_or(1);
    let sm = discretize(&m, &w, (8 * top).max(512))?;
    let rec = stieltjes(&sm, top)?;
    let s = szego_factor(&m, &w, 1e-12)?.value;
    let mut t = Table::new("opoly_sweep", &["n", "alpha", "beta", "log_norm", "w2_sq", "two_s", "gap"]);
    for &n in &cfg.degrees {
        let v = rec.log_widom_2_sq(n, m.log_capacity()).exp();
        t.push(vec![
            n.into(),
            rec.alpha[n].into(),
            rec.beta[n].into(),
            rec.log_norms[n].into(),
            v.into(),
            (2.0 * s).into(),
            (v - 2.0 * s).abs().into(),
        ]);
    }
    sink.table(&t)?;
    let mut buf = Vec::new();
    rec.write_csv(&mut buf)?;
    std::fs::write(sink.dir.join("recurrence.csv"), buf)
        .map_err(|e| Error::InvalidArgument(format!("recurrence.csv: {e}")))?;
    sink.files.push("recurrence.csv".into());
    let plot = line_plot("L2 Widom factors", "n", &[widom_series(&t, "[W_2]^2", "w2_sq")], Some(("2S", 2.0 * s)));
    sink.plot("opoly_sweep", plot)?;
    Ok(to_value(&rec))
}

const AUDIT_HEADER: [&str; 10] = [
    "instance", "n", "bound", "status", "lhs_lower", "lhs_upper", "rhs", "margin", "family", "reason",
];

fn push_reports(t: &mut Table, instance: usize, fam: &str, reps: &[BoundReport]) {
    for r in reps {
        let id = serde_json::to_value(r.bound_id).ok();
        let st = serde_json::to_value(r.status).ok();
        t.push(vec![
            instance.into(),
            r.n.into(),
            id.and_then(|v| v.as_str().map(String::from)).unwrap_or_default().into(),
            st.and_then(|v| v.as_str().map(String::from)).unwrap_or_default().into(),
            r.lhs_lower.into(),
            r.lhs_upper.into(),
            r.rhs.unwrap_or(f64::NAN).into(),
            r.margin.unwrap_or(f64::NAN).into(),
            fam.into(),
            r.reason.as_str().into(),
        ]);
    }
}

fn bounds_audit(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<serde_json::Value> {
    let mut t = Table::new("bounds_audit", &AUDIT_HEADER);
    let mut all: Vec<BoundReport> = Vec::new();
    if let Some(count) = cfg.instances {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or_default());
        let max_n = cfg.max_degree.unwrap_or(32);
        let max_bands = cfg.max_bands.unwrap_or(3);
        let jobs: Vec<(RealCompactSet, WeightExpr, usize)> = (0..count)
            .map(|_| {
                let k = scan::random_set(&mut rng, max_bands);
                let w = scan::random_covered_weight(&mut rng, &k);
                let n = rand::Rng::random_range(&mut rng, 1..=max_n);
                (k, w, n)
            })
            .collect();
        let done: Vec<Result<scan::AuditInstance>> = jobs
            .par_iter()
            .map(|(k, w, n)| scan::audit_instance(k, w, *n, cfg.tol))
            .collect();
        for (i, r) in done.into_iter().enumerate() {
            match r {
                Ok(inst) => {
                    push_reports(&mut t, i, scan::family(&inst.weight), &inst.reports);
                    all.extend(inst.reports);
                }
                Err(e) => sink.fail(format!("instance {i}"), e),
            }
        }
    } else {
        let m = single_set(cfg)?;
        let w = cfg.weight();
        w.validate(m.set())?;
        let done: Vec<Result<Vec<BoundReport>>> = cfg
            .degrees
            .par_iter()
            .map(|&n| {
                let mut r = bound_audit(&m, &w, n, cfg.tol)?;
                r.extend(l2_bound_audit(&m, &w, n)?);
                Ok(r)
            })
            .collect();
        for (&n, r) in cfg.degrees.iter().zip(done) {
            match r {
                Ok(reps) => {
                    push_reports(&mut t, 0, scan::family(&w), &reps);
                    all.extend(reps);
                }
                Err(e) => sink.fail(format!("n={n}"), e),
            }
        }
    }
    sink.table(&t)?;
    Ok(to_value(&all))
}

fn bernstein(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<serde_json::Value> {
    let m = single_set(cfg)?;
    let weights: Vec<WeightExpr> = cfg.weight.iter().cloned().chain(cfg.weights.iter().cloned()).collect();
    let mut summary = Vec::new();
    for (i, w) in weights.iter().enumerate() {
        if let Err(e) = w.validate(m.set()) {
            sink.fail(format!("weight {i}"), e);
            continue;
        }
        let name = format!("bernstein_w{i}");
        match sweep_table(&name, &m, w, &cfg.degrees, cfg.tol, sink) {
            Ok((t, s)) => {
                sink.table(&t)?;
                let plot = line_plot(
                    &format!("weight {i}: {}", scan::family(w)),
                    "n",
                    &[widom_series(&t, "W_inf upper", "w_upper")],
                    Some(("2S", 2.0 * s)),
                );
                sink.plot(&name, plot)?;
                let gaps = t.column("gap");
                let decreasing = gaps.windows(2).all(|p| p[1] < p[0]);
                summary.push(serde_json::json!({"weight": i, "two_s": 2.0 * s, "decreasing": decreasing}));
            }
            Err(e) => sink.fail(format!("weight {i}"), e),
        }
    }
    Ok(serde_json::Value::Array(summary))
}

fn cantor_run(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<serde_json::Value> {
    let g = cfg.gamma.clone().ok_or_else(|| Error::InvalidArgument("missing `gamma`".into()))?;
    let mut exact = Table::new("cantor_exact", &["n", "degree", "w_inf_exact", "w2_exact", "w2_exact_sq"]);
    for &n in &cfg.degrees {
        match (cantor::widom_infty_exact(&g, n), cantor::widom_2_exact(&g, n)) {
            (Ok(a), Ok(b)) => exact.push(vec![n.into(), (1usize << n).into(), a.into(), b.into(), (b * b).into()]),
            (Err(e), _) | (_, Err(e)) => sink.fail(format!("n={n}"), e),
        }
    }
    sink.table(&exact)?;

    let mut levels = Table::new("cantor_levels", &["s", "cap_exact", "cap_numeric"]);
    let mut numeric = Table::new("cantor_numeric", &["s", "n", "degree", "w_inf_lower", "w_inf_upper", "w_inf_exact"]);
    let level_rows: Vec<Result<(f64, f64, Vec<(usize, f64, f64)>)>> = cfg
        .levels
        .par_iter()
        .map(|&s| {
            let it = cantor::iterate(&g, s)?;
            let m = EquilibriumMeasure::new(&it.bands)?;
            let mut w = Vec::new();
            for &n in cfg.degrees.iter().filter(|&&n| (1usize << n) <= 16) {
                let r = weighted_chebyshev(&m, &WeightExpr::one(), 1 << n, cfg.tol)?;
                let (lo, hi) = r.log_widom(m.log_capacity());
                w.push((n, lo.exp(), hi.exp()));
            }
            Ok((cantor::capacity_exact(&g, s)?, m.capacity(), w))
        })
        .collect();
    for (&s, r) in cfg.levels.iter().zip(level_rows) {
        match r {
            Ok((ce, cn, w)) => {
                levels.push(vec![s.into(), ce.into(), cn.into()]);
                for (n, lo, hi) in w {
                    let ex = cantor::widom_infty_exact(&g, n).unwrap_or(f64::NAN);
                    numeric.push(vec![s.into(), n.into(), (1usize << n).into(), lo.into(), hi.into(), ex.into()]);
                }
            }
            Err(e) => sink.fail(format!("s={s}"), e),
        }
    }
    if !cfg.levels.is_empty() {
        sink.table(&levels)?;
        sink.table(&numeric)?;
    }
    let w_plot = line_plot(
        "exact Widom factors at degree 2^n",
        "n",
        &[
            widom_series(&exact, "W_inf", "w_inf_exact"),
            widom_series(&exact, "[W_2]^2", "w2_exact_sq"),
        ],
        Some(("2", 2.0)),
    );
    sink.plot("cantor_widom", w_plot)?;
    let cap_plot = line_plot(
        "capacity of E_s",
        "s",
        &[
            Series {
                label: "exact".into(),
                points: levels.column("s").into_iter().zip(levels.column("cap_exact")).collect(),
            },
            Series {
                label: "numeric".into(),
                points: levels.column("s").into_iter().zip(levels.column("cap_numeric")).collect(),
            },
        ],
        cantor::capacity_limit(&g).ok().map(|c| ("cap K", c.0)),
    );
    sink.plot("cantor_capacity", cap_plot)?;
    Ok(serde_json::json!({
        "capacity_limit": cantor::capacity_limit(&g).ok(),
        "exact_rows": exact.rows.len(),
    }))
}

fn conjecture_scan(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<serde_json::Value> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or_default());
    let count = cfg.instances.unwrap_or(20);
    let max_n = cfg.max_degree.unwrap_or(32).min(32);
    let max_bands = cfg.max_bands.unwrap_or(4);
    let jobs: Vec<(RealCompactSet, WeightExpr)> = (0..count)
        .map(|_| {
            let k = scan::random_set(&mut rng, max_bands);
            let w = scan::random_weight(&mut rng, &k);
            (k, w)
        })
        .collect();
    let rows: Vec<Result<scan::ScanRow>> = jobs
        .par_iter()
        .enumerate()
        .map(|(i, (k, w))| scan::scan_instance(i, k, w, max_n, cfg.tol))
        .collect();
    let mut t = Table::new("conjecture_scan", &["index", "bands", "family", "s", "min_margin", "argmin_n"]);
    let mut ok = Vec::new();
    for (i, r) in rows.into_iter().enumerate() {
        match r {
            Ok(r) => {
                t.push(vec![
                    r.index.into(),
                    r.bands.into(),
                    r.family.as_str().into(),
                    r.s.into(),
                    r.min_margin.into(),
                    r.argmin.into(),
                ]);
                ok.push(r);
            }
            Err(e) => sink.fail(format!("instance {i}"), e),
        }
    }
    sink.table(&t)?;
    Ok(to_value(&ok))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip_and_hash() {
        let js = br#"{"kind":"cheb-sweep","set":{"bands":[[-1,1]]},"degrees":[1,2],
            "weight":{"kind":"const","value":1.0}}"#;
        let c = ExperimentConfig::from_json(js).unwrap();
        c.validate().unwrap();
        let back = ExperimentConfig::from_json(&serde_json::to_vec(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
        assert_eq!(c.hash().len(), 64);
    }

    #[test]
    fn schema_violations_are_rejected() {
        assert!(ExperimentConfig::from_json(br#"{"kind":"cantor","bogus":1}"#).is_err());
        let c = ExperimentConfig::from_json(br#"{"kind":"conjecture-scan"}"#).unwrap();
        assert!(c.validate().is_err());
        let c = ExperimentConfig::from_json(br#"{"kind":"cheb-sweep","degrees":[1]}"#).unwrap();
        assert!(c.validate().is_err());
    }
}
