use clap::Args;
use serde_json::json;

use twisted_core::exact::int;
use twisted_core::laguerre::{common_zero_scan, isolate_real_roots, laguerre_coeffs_int};
use twisted_core::par;
use twisted_core::twisted::{default_probes, heisenberg_slice_demo, separable_gaussian, HeisenbergDemo, SliceGrid};

use super::{check_row, cjson};
use crate::anchors;
use crate::report::{Report, Row};
use crate::{Ctx, Failure};

#[derive(Args, Debug)]
pub struct ZerosArgs {
    /// Compare only this pair (with --k2).
    #[arg(long)]
    pub k1: Option<usize>,
    #[arg(long)]
    pub k2: Option<usize>,
    /// Scan every pair k1 < k2 <= k_max (default 20).
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Laguerre order n - 1 (default: every n from 1 to 4).
    #[arg(long)]
    pub n: Option<usize>,
    /// Right end of the scanned interval [0, x_max].
    #[arg(long)]
    pub x_max: Option<f64>,
    /// Width below which isolating intervals stop shrinking.
    #[arg(long)]
    pub resolution: Option<f64>,
}

pub fn run_zeros(ctx: &Ctx, a: ZerosArgs) -> Result<bool, Failure> {
    let c = &ctx.cfg.zeros;
    let k_max = a.k_max.or(c.k_max).unwrap_or(20);
    let x_max = a.x_max.or(c.x_max).unwrap_or(200.0);
    let resolution = a.resolution.or(c.resolution).unwrap_or(1e-12);
    if k_max > 60 {
        return Err(Failure::Usage(format!("guardrail: k_max <= 60 (got {k_max})")));
    }
    if !(x_max > 0.0 && x_max.is_finite()) || !(resolution > 0.0) {
        return Err(Failure::Usage("x_max and resolution must be positive".into()));
    }
    let ns: Vec<usize> = match a.n.or(c.n) {
        Some(0) => return Err(Failure::Usage("n must be at least 1".into())),
        Some(n) if n > 16 => return Err(Failure::Usage(format!("guardrail: n <= 16 (got {n})"))),
        Some(n) => vec![n],
        None => (1..=4).collect(),
    };
    let pairs: Vec<(usize, usize)> = match (a.k1.or(c.k1), a.k2.or(c.k2)) {
        (Some(k1), Some(k2)) if k1 != k2 && k1.max(k2) <= 60 => vec![(k1.min(k2), k1.max(k2))],
        (Some(_), Some(_)) => return Err(Failure::Usage("--k1 and --k2 must differ and be at most 60".into())),
        (None, None) => (1..=k_max).flat_map(|k2| (0..k2).map(move |k1| (k1, k2))).collect(),
        _ => return Err(Failure::Usage("--k1 and --k2 go together".into())),
    };
    let units: Vec<(usize, usize, usize)> = ns.iter().flat_map(|&n| pairs.iter().map(move |&(k1, k2)| (n, k1, k2))).collect();
    let scans = par::map(&units, |&(n, k1, k2)| common_zero_scan(k1, k2, &int(n as i64 - 1), x_max, resolution));

    let mut report = Report::new("zeros");
    report.set("identity", anchors::COMMON_ZEROS);
    report.set("interval", [0.0, x_max]);
    report.set("resolution", resolution);
    for (&(n, k1, k2), s) in units.iter().zip(&scans) {
        // a root lost to the scan would hide a possible common zero
        let complete = s.zeros1.len() == k1 && s.zeros2.len() == k2 || x_max < 4.0 * (k2 + n) as f64;
        let ok = s.candidates.is_empty() && s.gcd_degree == 0 && complete;
        let mut row = check_row(
            "zeros",
            anchors::COMMON_ZEROS,
            json!({ "n": n, "order": n - 1, "k1": k1, "k2": k2 }),
            ok,
            Some(s.candidates.len() as f64),
            Some(0.0),
        );
        row.insert("zeros_k1".into(), json!(s.zeros1.len()));
        row.insert("zeros_k2".into(), json!(s.zeros2.len()));
        row.insert("gcd_degree".into(), json!(s.gcd_degree));
        row.insert("closest_gap".into(), json!(closest_gap(s)));
        report.push(row);
    }
    let mut roots = Vec::new();
    for &n in &ns {
        let mut ks: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        ks.sort_unstable();
        ks.dedup();
        for k in ks {
            for (i, iv) in isolate_real_roots(&laguerre_coeffs_int(k, n - 1), 0.0, x_max, resolution).iter().enumerate() {
                let mut r = Row::new();
                r.insert("n".into(), json!(n));
                r.insert("k".into(), json!(k));
                r.insert("index".into(), json!(i));
                r.insert("lo".into(), json!(iv.lo));
                r.insert("hi".into(), json!(iv.hi));
                r.insert("midpoint".into(), json!(iv.midpoint()));
                roots.push(r);
            }
        }
    }
    ctx.sink.csv_artifact("roots.csv", &roots)?;
    ctx.sink.emit(&report)?;
    Ok(report.passed)
}

/// Smallest distance between isolating intervals of the two polynomials.
fn closest_gap(s: &twisted_core::laguerre::ZeroScan) -> Option<f64> {
    s.zeros1
        .iter()
        .flat_map(|a| s.zeros2.iter().map(move |b| (a.lo - b.hi).max(b.lo - a.hi).max(0.0)))
        .reduce(f64::min)
}

#[derive(Args, Debug)]
pub struct HeisenbergArgs {
    /// Frequency of the Fourier transform in t.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub z_nodes: Option<usize>,
    #[arg(long)]
    pub z_extent: Option<f64>,
    #[arg(long)]
    pub t_nodes: Option<usize>,
    #[arg(long)]
    pub t_extent: Option<f64>,
    /// Skip the run on the refined grid.
    #[arg(long)]
    pub no_refine: bool,
}

fn demo_rows(report: &mut Report, label: &str, d: &HeisenbergDemo) {
    for (z, (g, t)) in d.probes.iter().zip(d.group.iter().zip(&d.twisted)) {
        let mut r = Row::new();
        r.insert("grid".into(), json!(label));
        r.insert("z".into(), cjson(*z));
        r.insert("group".into(), cjson(*g));
        r.insert("twisted".into(), cjson(*t));
        r.insert("difference".into(), json!((g - t).norm()));
        r.insert("status".into(), json!("info"));
        report.push(r);
    }
}

pub fn run_heisenberg(ctx: &Ctx, a: HeisenbergArgs) -> Result<bool, Failure> {
    let c = &ctx.cfg.heisenberg;
    let d = SliceGrid::demo();
    let grid = SliceGrid::new(
        a.z_nodes.or(c.z_nodes).unwrap_or(d.z_nodes),
        a.z_extent.or(c.z_extent).unwrap_or(d.z_extent),
        a.t_nodes.or(c.t_nodes).unwrap_or(d.t_nodes),
        a.t_extent.or(c.t_extent).unwrap_or(d.t_extent),
    )?;
    let n_nodes = grid.z_nodes * grid.z_nodes * grid.t_nodes;
    if n_nodes > 1 << 21 || (!a.no_refine && 8 * n_nodes > 1 << 23) {
        return Err(Failure::Usage(format!("guardrail: slice grid of {n_nodes} nodes is too large")));
    }
    let lambda = a.lambda.or(c.lambda).unwrap_or(1.0);
    let tol = ctx.tol.unwrap_or(2e-2);
    let probes = default_probes();
    let base = heisenberg_slice_demo(&separable_gaussian, &separable_gaussian, &grid, lambda, &probes)?;
    let mut report = Report::new("heisenberg");
    report.set("identity", anchors::HEISENBERG);
    report.set("lambda", lambda);
    report.set("grid", &grid);
    demo_rows(&mut report, "base", &base);
    report.push(check_row(
        "heisenberg",
        anchors::HEISENBERG,
        json!({ "grid": "base", "scale": base.scale }),
        base.rel_residual <= tol,
        Some(base.rel_residual),
        Some(tol),
    ));
    if !a.no_refine {
        let fine = heisenberg_slice_demo(&separable_gaussian, &separable_gaussian, &grid.refined()?, lambda, &probes)?;
        demo_rows(&mut report, "refined", &fine);
        report.push(check_row(
            "heisenberg",
            "residual at least halves under one grid refinement",
            json!({ "base": base.rel_residual, "refined": fine.rel_residual }),
            fine.rel_residual <= 0.5 * base.rel_residual,
            Some(fine.rel_residual / base.rel_residual),
            Some(0.5),
        ));
    }
    ctx.sink.emit(&report)?;
    Ok(report.passed)
}
