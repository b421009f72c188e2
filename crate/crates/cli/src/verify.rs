// Copyright 2026 The afqw Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! The acceptance suite: every criterion is recomputed from scratch and
//! reported as one pass/fail line.

use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use afqw_core::catalog::PointLabel;
use afqw_core::dynamics::{
    classify_sector, even_odd_split, evolve_series, mcd_from_substeps, period_two_contrast, pre_reflection_window,
    return_series, EdgePresence, McdRun, Sector, SectorThresholds,
};
use afqw_core::lattice::{floquet_operator, static_operators, LatticeSpec, StateVector, Sublattice, Substeps};
use afqw_core::linalg::{self, C64, I, ZERO};
use afqw_core::model::{
    bloch_unitary, circular_distance, critical_expansion_error, frame_unitary, quasienergies, quasienergy_of_eigenvalue,
    Benchmark, GapKind,
};
use afqw_core::par::{self, Execution};
use afqw_core::spectra::{
    find_edge_mode, gate_deviation, logical_projection, optimized_superposition, quasienergy_spectrum, EdgeModePair,
    EdgeSearch,
};
use afqw_core::topology::{geometric_mcd_integral, invariants, winding_number, DEFAULT_K_POINTS};
use afqw_core::{Frame, ModelParams};
use ndarray::Array2;
use ndarray_linalg::EigVals;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::commands;
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::export::Output;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    /// Short chains and loosened tolerances for a quick smoke run.
    pub fast: bool,
    /// Replace the chiral operator by a sign-corrupted one; the chiral
    /// criterion must then fail.
    pub flip_sigma_y: bool,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { fast: false, flip_sigma_y: false, seed: 20260101 }
    }
}

/// Sizes and bounds used by the suite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub open_cells: usize,
    pub bulk_cells: usize,
    pub pinning: f64,
    pub gate: f64,
    pub search: EdgeSearch,
    pub mcd: f64,
    pub sector_periods: usize,
    pub sector_tail: usize,
    pub sectors: SectorThresholds,
}

impl Tolerances {
    pub fn full() -> Self {
        Self {
            open_cells: 60,
            bulk_cells: 401,
            pinning: 1e-3,
            gate: 1e-3,
            search: EdgeSearch::default(),
            mcd: 0.15,
            sector_periods: 200,
            sector_tail: 50,
            sectors: SectorThresholds::default(),
        }
    }

    /// `L = 20` open chains; edge levels split by up to a few 1e−2 there and
    /// the trivial tail sits on a `~1/L` background of about 0.06.
    pub fn fast() -> Self {
        Self {
            open_cells: 20,
            bulk_cells: 101,
            pinning: 5e-2,
            gate: 1e-1,
            search: EdgeSearch { cluster_tol: 1e-1, ..EdgeSearch::default() },
            mcd: 0.3,
            sector_periods: 200,
            sector_tail: 50,
            sectors: SectorThresholds { trivial: 0.08, ..SectorThresholds::default() },
        }
    }

    pub fn for_options(opts: &VerifyOptions) -> Self {
        if opts.fast {
            Self::fast()
        } else {
            Self::full()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionResult {
    pub id: &'static str,
    pub primary: bool,
    pub passed: bool,
    pub measured: String,
    pub bound: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let kind = if self.primary { "primary" } else { "invariant" };
        write!(
            f,
            "{status} {kind:<9} {:<22} {} (bound: {}) [{:.2} s]",
            self.id,
            self.measured,
            self.bound,
            self.elapsed.as_secs_f64()
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub results: Vec<CriterionResult>,
}

impl Report {
    pub fn failed_primary(&self) -> usize {
        self.results.iter().filter(|r| r.primary && !r.passed).count()
    }

    pub fn get(&self, id: &str) -> Option<&CriterionResult> {
        self.results.iter().find(|r| r.id == id)
    }

    /// Rows of `verify.csv`; wall-clock times are left out so reruns match.
    pub fn rows(&self) -> Vec<Vec<String>> {
        self.results
            .iter()
            .map(|r| {
                vec![
                    r.id.to_string(),
                    if r.primary { "primary" } else { "invariant" }.to_string(),
                    if r.passed { "pass" } else { "fail" }.to_string(),
                    r.measured.clone(),
                    r.bound.clone(),
                ]
            })
            .collect()
    }
}

struct Check {
    id: &'static str,
    primary: bool,
    start: Instant,
}

impl Check {
    fn primary(id: &'static str) -> Self {
        Self { id, primary: true, start: Instant::now() }
    }

    fn invariant(id: &'static str) -> Self {
        Self { id, primary: false, start: Instant::now() }
    }

    fn done(self, passed: bool, measured: String, bound: impl Into<String>) -> CriterionResult {
        CriterionResult {
            id: self.id,
            primary: self.primary,
            passed,
            measured,
            bound: bound.into(),
            elapsed: self.start.elapsed(),
        }
    }

    /// Like [`Check::done`], with a wall-clock limit folded into the verdict.
    fn timed(self, passed: bool, measured: String, bound: &str, limit: Duration) -> CriterionResult {
        let elapsed = self.start.elapsed();
        let mut r = self.done(passed && elapsed < limit, measured, format!("{bound}; runtime < {} s", limit.as_secs()));
        r.elapsed = elapsed;
        r
    }

    fn errored(self, e: impl fmt::Display) -> CriterionResult {
        self.done(false, format!("error: {e}"), "-")
    }
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

fn random_params(rng: &mut ChaCha8Rng, n: usize) -> Vec<ModelParams> {
    (0..n)
        .map(|_| ModelParams {
            t1: rng.random_range(0.2..1.5),
            t2: rng.random_range(0.2..1.5),
            mass: rng.random_range(-4.0..2.0),
            phi: rng.random_range(0.0..PI),
            period: rng.random_range(1.0..3.0),
        })
        .collect()
}

fn k_sweep() -> impl Iterator<Item = f64> {
    (0..1024).map(|j| -PI + 2.0 * PI * j as f64 / 1024.0)
}

/// `σ_y` with one sign corrupted; a global sign flip would cancel in `ΓUΓU`.
fn corrupted_sigma_y() -> Array2<C64> {
    ndarray::array![[ZERO, -I], [-I, ZERO]]
}

fn chiral_identity(params: &[ModelParams], opts: &VerifyOptions) -> CriterionResult {
    let check = Check::primary("chiral_identity");
    let gamma = if opts.flip_sigma_y { corrupted_sigma_y() } else { linalg::sigma_y() };
    let id = linalg::identity(2);
    let residual = |u: Array2<C64>| linalg::max_diff(&gamma.dot(&u).dot(&gamma).dot(&u).view(), &id.view());
    let mut frames = 0.0_f64;
    let mut bare = 0.0_f64;
    for p in params {
        for k in k_sweep() {
            for f in Frame::BOTH {
                frames = frames.max(residual(frame_unitary(p, k, f).into_matrix()));
            }
            bare = bare.max(residual(bloch_unitary(p, k).into_matrix()));
        }
    }
    let measured = format!("max frame residual {} (bare period operator: {})", sci(frames), sci(bare));
    check.timed(frames < 1e-12, measured, "< 1e-12 in both symmetric frames", Duration::from_secs(1))
}

fn band_consistency(params: &[ModelParams]) -> CriterionResult {
    let check = Check::primary("band_consistency");
    let mut worst = 0.0_f64;
    for p in params {
        for k in k_sweep() {
            let Ok((lo, hi)) = quasienergies(p, k) else { return check.errored("arccos domain") };
            let Ok(ev) = bloch_unitary(p, k).eigenvalues() else { return check.errored("2x2 eigvals") };
            let mut direct: Vec<f64> = ev.iter().map(|&z| quasienergy_of_eigenvalue(z, p.period)).collect();
            direct.sort_by(f64::total_cmp);
            let d = circular_distance(direct[0], lo, p.period).max(circular_distance(direct[1], hi, p.period));
            let swapped = circular_distance(direct[0], hi, p.period).max(circular_distance(direct[1], lo, p.period));
            worst = worst.max(d.min(swapped));
        }
    }
    check.done(worst < 1e-10, format!("max deviation {}", sci(worst)), "< 1e-10")
}

fn winding_catalog() -> CriterionResult {
    let check = Check::primary("winding_catalog");
    let mut ok = true;
    let mut found = Vec::new();
    let mut worst = 0.0_f64;
    for label in PointLabel::BULK {
        let p = label.params();
        let (w1, w2) = match (winding_number(&p, Frame::Frame1, DEFAULT_K_POINTS), winding_number(&p, Frame::Frame2, DEFAULT_K_POINTS)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return check.errored(e),
        };
        worst = worst.max(w1.residual).max(w2.residual);
        ok &= Some((w1.winding, w2.winding)) == label.expected_windings() && w1.residual < 1e-6 && w2.residual < 1e-6;
        found.push(format!("{label}=({},{})", w1.winding, w2.winding));
    }
    let measured = format!("{} max residual {}", found.join(" "), sci(worst));
    check.timed(ok, measured, "(0,0) (1,1) (1,-1) (2,0), residual < 1e-6", Duration::from_secs(1))
}

fn gap_index_catalog() -> CriterionResult {
    let check = Check::primary("gap_index_catalog");
    let mut ok = true;
    let mut found = Vec::new();
    for label in PointLabel::OPEN_BOUNDARY {
        match invariants(&label.params(), DEFAULT_K_POINTS) {
            Ok(t) => {
                ok &= Some((t.nu0, t.nupi)) == label.expected_gap_indices();
                found.push(format!("{label}=({},{})", t.nu0, t.nupi));
            }
            Err(e) => return check.errored(e),
        }
    }
    check.done(ok, found.join(" "), "(0,0) (0,1) (1,0) (1,1)")
}

fn geometric_oracle() -> CriterionResult {
    let check = Check::primary("geometric_oracle");
    let mut worst = 0.0_f64;
    for label in PointLabel::BULK {
        let p = label.params();
        for f in Frame::BOTH {
            let w = match winding_number(&p, f, DEFAULT_K_POINTS) {
                Ok(w) => w.winding as f64,
                Err(e) => return check.errored(e),
            };
            match geometric_mcd_integral(&p, f, 8192) {
                Ok(g) => worst = worst.max((g + 0.5 * w).abs()),
                Err(e) => return check.errored(e),
            }
        }
    }
    check.done(worst < 1e-6, format!("max |C_geo + W/2| {}", sci(worst)), "< 1e-6")
}

/// Greedy nearest matching of two eigenvalue multisets.
fn multiset_distance(mut a: Vec<C64>, mut b: Vec<C64>) -> f64 {
    a.sort_by(|x, y| x.arg().total_cmp(&y.arg()));
    let mut worst = 0.0_f64;
    for z in a {
        let Some((j, d)) = b.iter().enumerate().map(|(j, w)| (j, (z - w).norm())).min_by(|p, q| p.1.total_cmp(&q.1)) else {
            return f64::INFINITY;
        };
        worst = worst.max(d);
        b.swap_remove(j);
    }
    if b.is_empty() {
        worst
    } else {
        f64::INFINITY
    }
}

fn momentum_sector_oracle(params: &[ModelParams]) -> CriterionResult {
    let check = Check::primary("momentum_sector_oracle");
    let run = || -> afqw_core::Result<f64> {
        let spec = LatticeSpec::periodic(12)?;
        let ks: Vec<f64> = (0..12).map(|j| 2.0 * PI * j as f64 / 12.0).collect();
        let mut worst = 0.0_f64;
        for p in params {
            let steps = Substeps::new(p, spec)?;
            let mut bloch = Vec::new();
            for &k in &ks {
                bloch.extend(bloch_unitary(p, k).eigenvalues()?);
            }
            worst = worst.max(multiset_distance(steps.period_operator().matrix.eigvals()?.to_vec(), bloch));
            for f in Frame::BOTH {
                let mut bloch = Vec::new();
                for &k in &ks {
                    bloch.extend(frame_unitary(p, k, f).eigenvalues()?);
                }
                worst = worst.max(multiset_distance(steps.frame_operator(f).matrix.eigvals()?.to_vec(), bloch));
            }
        }
        Ok(worst)
    };
    match run() {
        Ok(w) => check.done(w < 1e-9, format!("max eigenvalue mismatch {}", sci(w)), "< 1e-9"),
        Err(e) => check.errored(e),
    }
}

struct OpenPoint {
    label: PointLabel,
    u: afqw_core::lattice::LatticeOperator,
    spec: LatticeSpec,
    zero: afqw_core::Result<afqw_core::spectra::EdgeMode>,
    pi: afqw_core::Result<afqw_core::spectra::EdgeMode>,
}

fn open_point(label: PointLabel, cells: usize, search: &EdgeSearch) -> afqw_core::Result<OpenPoint> {
    let spec = LatticeSpec::open(cells)?;
    let u = floquet_operator(&label.params(), spec)?;
    let s = quasienergy_spectrum(&u)?;
    let zero = find_edge_mode(&s, GapKind::Zero, search);
    let pi = find_edge_mode(&s, GapKind::Pi, search);
    Ok(OpenPoint { label, u, spec, zero, pi })
}

impl OpenPoint {
    fn pair(&self) -> Option<EdgeModePair> {
        match (&self.zero, &self.pi) {
            (Ok(z), Ok(p)) => Some(EdgeModePair::from_modes(z.clone(), p.clone())),
            _ => None,
        }
    }
}

fn edge_pair(points: &[OpenPoint], tol: &Tolerances, started: Instant) -> CriterionResult {
    let mut check = Check::primary("edge_pair");
    check.start = started;
    let mut ok = true;
    let mut found = Vec::new();
    for pt in points {
        let period = pt.label.params().period;
        let zero = pt.zero.as_ref().ok().filter(|m| m.eps.abs() < tol.pinning && m.weight > tol.search.min_weight);
        let pi = pt
            .pi
            .as_ref()
            .ok()
            .filter(|m| circular_distance(m.eps, PI / period, period) < tol.pinning && m.weight > tol.search.min_weight);
        let expected = match pt.label {
            PointLabel::P1 => (false, false),
            PointLabel::P2 => (false, true),
            PointLabel::P3 => (true, false),
            _ => (true, true),
        };
        ok &= (zero.is_some(), pi.is_some()) == expected;
        let show = |m: Option<&afqw_core::spectra::EdgeMode>| {
            m.map(|m| format!("{:.2}", m.weight)).unwrap_or_else(|| "-".into())
        };
        found.push(format!("{}: 0 {} pi {}", pt.label, show(zero), show(pi)));
    }
    let bound = format!("|d eps| < {:.0e}, weight > {}; P4 both, P1 none, P2 pi, P3 0", tol.pinning, tol.search.min_weight);
    check.timed(ok, found.join(", "), &bound, Duration::from_secs(30))
}

fn gate_action(p4: &OpenPoint, tol: &Tolerances) -> CriterionResult {
    let check = Check::primary("tau_z_gate");
    let run = || -> afqw_core::Result<(f64, f64)> {
        let pair = p4.pair().ok_or(afqw_core::Error::NoZeroMode)?;
        let d = gate_deviation(&logical_projection(&p4.u, &pair)?);
        let long = open_point(PointLabel::P4, 2 * p4.spec.cells, &tol.search)?;
        let pair = long.pair().ok_or(afqw_core::Error::NoZeroMode)?;
        Ok((d, gate_deviation(&logical_projection(&long.u, &pair)?)))
    };
    match run() {
        Ok((d, d2)) => check.done(
            d < tol.gate && d2 < d,
            format!("L={} {} L={} {}", p4.spec.cells, sci(d), 2 * p4.spec.cells, sci(d2)),
            format!("< {:.0e}, shrinking with L", tol.gate),
        ),
        Err(e) => check.errored(e),
    }
}

fn doubled_period(p4: &OpenPoint) -> CriterionResult {
    let check = Check::primary("doubled_period");
    let run = || -> afqw_core::Result<(f64, f64)> {
        let pair = p4.pair().ok_or(afqw_core::Error::NoZeroMode)?;
        let pi1 = static_operators(p4.spec).pi1;
        let psi = optimized_superposition(&pair, &pi1)?;
        let ts = evolve_series(&p4.u, &psi, &pi1, 40)?;
        Ok(period_two_contrast(&ts))
    };
    match run() {
        Ok((two, one)) => check.done(
            one > 10.0 * two,
            format!("min |P(m)-P(m+1)| {} vs max |P(m)-P(m+2)| {}", sci(one), sci(two)),
            "ratio > 10 over m in [0, 40]",
        ),
        Err(e) => check.errored(e),
    }
}

fn sector_classification(points: &[OpenPoint], tol: &Tolerances) -> CriterionResult {
    let check = Check::primary("sector_classification");
    let mut ok = true;
    let mut found = Vec::new();
    for pt in points {
        let run = || -> afqw_core::Result<Sector> {
            let psi = StateVector::site(pt.spec, 1, Sublattice::A)?;
            let ts = evolve_series(&pt.u, &psi, &static_operators(pt.spec).pi1, tol.sector_periods)?;
            let edges = EdgePresence { zero: pt.zero.is_ok(), pi: pt.pi.is_ok() };
            Ok(classify_sector(&ts, tol.sector_tail, &tol.sectors, Some(edges))?.value)
        };
        let expected = match pt.label {
            PointLabel::P1 => Sector::Trivial,
            PointLabel::P2 => Sector::PiOnly,
            PointLabel::P3 => Sector::ZeroOnly,
            _ => Sector::Coexistence,
        };
        match run() {
            Ok(s) => {
                ok &= s == expected;
                found.push(format!("{}={s:?}", pt.label));
            }
            Err(e) => {
                ok = false;
                found.push(format!("{}=error({e})", pt.label));
            }
        }
    }
    check.done(ok, found.join(" "), "Trivial PiOnly ZeroOnly Coexistence")
}

struct BulkRun {
    label: PointLabel,
    runs: Vec<(McdRun, i64)>,
}

fn bulk_runs(cells: usize) -> afqw_core::Result<Vec<BulkRun>> {
    let spec = LatticeSpec::periodic(cells)?;
    par::map_slice(&PointLabel::BULK, Execution::Parallel, |&label| -> afqw_core::Result<BulkRun> {
        let p = label.params();
        let window = pre_reflection_window(&p, spec)?;
        let steps = Substeps::new(&p, spec)?;
        let mut runs = Vec::new();
        for f in Frame::BOTH {
            let w = winding_number(&p, f, DEFAULT_K_POINTS)?.winding;
            runs.push((mcd_from_substeps(&steps, f, window)?, w));
        }
        Ok(BulkRun { label, runs })
    })
    .into_iter()
    .collect()
}

fn mcd_quantization(tol: &Tolerances) -> (CriterionResult, Option<Vec<BulkRun>>) {
    let check = Check::primary("mcd_quantization");
    match bulk_runs(tol.bulk_cells) {
        Ok(runs) => {
            let mut worst = 0.0_f64;
            let mut found = Vec::new();
            for b in &runs {
                for (run, w) in &b.runs {
                    let end = run.averaged.last().unwrap_or(f64::NAN);
                    worst = worst.max((end - *w as f64).abs());
                    let tag = if run.frame == Frame::Frame1 { 1 } else { 2 };
                    found.push(format!("{}/{tag}={end:.3}", b.label));
                }
            }
            let measured = format!("{} max error {worst:.3}", found.join(" "));
            let bound = format!("within {} of W at the window end, L = {}", tol.mcd, tol.bulk_cells);
            (check.timed(worst < tol.mcd, measured, &bound, Duration::from_secs(120)), Some(runs))
        }
        Err(e) => (check.errored(e), None),
    }
}

/// Share of periods on which the running-average error to the geometric
/// target shrinks, minimized over points and frames.
fn running_average_suppression(runs: Option<&[BulkRun]>) -> CriterionResult {
    let check = Check::invariant("running_average");
    let Some(runs) = runs else { return check.errored("no displacement runs") };
    let mut worst = f64::INFINITY;
    for b in runs {
        for (run, w) in &b.runs {
            let err: Vec<f64> = run.averaged.values.iter().map(|v| (v - *w as f64).abs()).collect();
            let steps = err.len().saturating_sub(1).max(1);
            let shrinking = err.windows(2).filter(|p| p[1] < p[0]).count();
            worst = worst.min(shrinking as f64 / steps as f64);
        }
    }
    check.done(worst >= 0.8, format!("min share of shrinking steps {worst:.2}"), ">= 0.80")
}

fn critical_expansions() -> CriterionResult {
    let check = Check::primary("critical_expansions");
    let qs = [1e-2, 5e-3, 2.5e-3];
    let mut worst = 0.0_f64;
    for b in [Benchmark::C0, Benchmark::Cpi] {
        let ratios: afqw_core::Result<Vec<f64>> =
            qs.iter().map(|&q| critical_expansion_error(&b.params(), b, q).map(|e| e / (q * q))).collect();
        match ratios {
            Ok(r) => {
                let (lo, hi) = r.iter().fold((f64::MAX, f64::MIN), |(a, c), &x| (a.min(x), c.max(x)));
                worst = worst.max((hi - lo) / lo);
            }
            Err(e) => return check.errored(e),
        }
    }
    check.done(worst < 0.1, format!("max relative spread of error/q^2 {worst:.4}"), "< 0.10")
}

fn staggering(cells: usize) -> CriterionResult {
    let check = Check::primary("benchmark_staggering");
    let run = || -> afqw_core::Result<(f64, f64)> {
        let spec = LatticeSpec::periodic(cells)?;
        let labels = [PointLabel::C0, PointLabel::Cpi];
        let s: afqw_core::Result<Vec<f64>> = par::map_slice(&labels, Execution::Parallel, |&l| {
            let u = Substeps::new(&l.params(), spec)?.period_operator();
            Ok(even_odd_split(&return_series(&u, 30)?, 1, 30)?.staggering)
        })
        .into_iter()
        .collect();
        let s = s?;
        Ok((s[0], s[1]))
    };
    match run() {
        Ok((c0, cpi)) => check.done(
            cpi / c0 >= 5.0,
            format!("C0 {c0:.4} Cpi {cpi:.4} ratio {:.2}", cpi / c0),
            format!("ratio >= 5 over m in [1, 30], L = {cells}"),
        ),
        Err(e) => check.errored(e),
    }
}

/// Write a compact set of exports into `dir`.
fn export_sample(dir: &Path) -> Result<()> {
    let mut cfg = RunConfig { out: dir.to_path_buf(), ..RunConfig::default() };
    cfg.phase_map.n_m = 13;
    cfg.phase_map.n_phi = 9;
    cfg.phase_map.n_k = 512;
    cfg.open.cells = 24;
    cfg.edge_dynamics.points = vec![PointLabel::P4];
    cfg.edge_dynamics.m_max = 40;
    cfg.edge_dynamics.m_tail = 10;
    cfg.bulk.cells = 41;
    cfg.bulk.points = vec![PointLabel::Q4];
    cfg.critical.m_max = 12;
    cfg.critical.m_hi = 12;
    commands::cmd_phase_map(&cfg)?;
    commands::cmd_obc_spectrum(&cfg)?;
    commands::cmd_edge_dynamics(&cfg)?;
    commands::cmd_mcd(&cfg)?;
    commands::cmd_critical_benchmark(&cfg)?;
    Ok(())
}

fn csv_bytes(dir: &Path) -> Result<Vec<(String, Vec<u8>)>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        if path.extension().is_some_and(|e| e == "csv") {
            let bytes = fs::read(&path).map_err(|e| CliError::io(&path, e))?;
            files.push((path.file_name().unwrap_or_default().to_string_lossy().into_owned(), bytes));
        }
    }
    files.sort();
    Ok(files)
}

/// Byte comparison of all CSV files in two directories.
pub fn compare_csv_dirs(a: &Path, b: &Path) -> Result<(usize, Vec<String>)> {
    let (fa, fb) = (csv_bytes(a)?, csv_bytes(b)?);
    let mut differing: Vec<String> = fa.iter().filter(|f| !fb.contains(f)).map(|f| f.0.clone()).collect();
    differing.extend(fb.iter().filter(|f| !fa.iter().any(|g| g.0 == f.0)).map(|f| f.0.clone()));
    Ok((fa.len(), differing))
}

fn determinism(scratch: &Path) -> CriterionResult {
    let check = Check::primary("determinism");
    let run = || -> Result<(usize, Vec<String>)> {
        let (a, b) = (scratch.join("run_a"), scratch.join("run_b"));
        for d in [&a, &b] {
            if d.exists() {
                fs::remove_dir_all(d).map_err(|e| CliError::io(d, e))?;
            }
            export_sample(d)?;
        }
        compare_csv_dirs(&a, &b)
    };
    match run() {
        Ok((n, diff)) => check.done(
            n > 0 && diff.is_empty(),
            format!("{n} CSV files compared, {} differ {:?}", diff.len(), diff),
            "byte-identical reruns",
        ),
        Err(e) => check.errored(e),
    }
}

/// Run every criterion; `scratch` receives the determinism reruns.
pub fn run_suite(opts: &VerifyOptions, scratch: &Path, mut on_result: impl FnMut(&CriterionResult)) -> Report {
    let tol = Tolerances::for_options(opts);
    let mut report = Report::default();
    let mut push = |r: CriterionResult, report: &mut Report| {
        on_result(&r);
        report.results.push(r);
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let sweep = random_params(&mut rng, 10);
    let sector_sets = random_params(&mut rng, 10);

    push(chiral_identity(&sweep, opts), &mut report);
    push(band_consistency(&sweep), &mut report);
    push(winding_catalog(), &mut report);
    push(gap_index_catalog(), &mut report);
    push(geometric_oracle(), &mut report);
    push(momentum_sector_oracle(&sector_sets), &mut report);

    let started = Instant::now();
    let points: afqw_core::Result<Vec<OpenPoint>> =
        PointLabel::OPEN_BOUNDARY.iter().map(|&l| open_point(l, tol.open_cells, &tol.search)).collect();
    match points {
        Ok(points) => {
            push(edge_pair(&points, &tol, started), &mut report);
            let p4 = &points[3];
            push(gate_action(p4, &tol), &mut report);
            push(doubled_period(p4), &mut report);
            push(sector_classification(&points, &tol), &mut report);
        }
        Err(e) => {
            for id in ["edge_pair", "tau_z_gate", "doubled_period", "sector_classification"] {
                push(Check::primary(id).errored(&e), &mut report);
            }
        }
    }

    let (mcd, runs) = mcd_quantization(&tol);
    push(mcd, &mut report);
    push(critical_expansions(), &mut report);
    push(staggering(tol.bulk_cells), &mut report);
    push(determinism(scratch), &mut report);
    push(running_average_suppression(runs.as_deref()), &mut report);
    report
}

/// `afqw verify`: print every line, write `verify.csv`, fail if any primary
/// criterion failed.
pub fn cmd_verify(cfg: &RunConfig, opts: &VerifyOptions) -> Result<Report> {
    let scratch = cfg.out.join("determinism");
    let report = run_suite(opts, &scratch, |r| println!("{r}"));
    let mut out = Output::new(&cfg.out, "verify", &json!({ "fast": opts.fast, "flip_sigma_y": opts.flip_sigma_y, "seed": opts.seed }))?;
    out.csv("verify.csv", &["criterion", "kind", "status", "measured", "bound"], &report.rows(), json!({}))?;
    out.result("failed_primary", report.failed_primary())?;
    out.finish()?;
    let failed = report.failed_primary();
    println!(
        "{} of {} primary criteria passed",
        report.results.iter().filter(|r| r.primary && r.passed).count(),
        report.results.iter().filter(|r| r.primary).count()
    );
    if failed > 0 {
        return Err(CliError::VerifyFailed(failed));
    }
    Ok(report)
}
