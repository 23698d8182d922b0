use clap::{Args, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use twisted_core::laguerre::phi_radial;
use twisted_core::spectral::{cone_injectivity_experiment, sphere_injectivity_experiment, ConeConfig, SphereConfig};

use super::{check_row, cjson};
use crate::anchors;
use crate::field::{point, FieldSpec, Input};
use crate::report::{to_row, Report, Row};
use crate::{Ctx, Failure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// Radial f, weighted twisted spherical means on spheres ([experiment.sphere]).
    Sphere,
    /// f on C^2 with projections sampled on complex rays ([experiment.cone]).
    Cone,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub kind: Kind,
    /// Cone input function (overrides [field]); same forms as `expand --f`.
    #[arg(long = "f")]
    pub f: Option<String>,
    #[arg(long)]
    pub harmonic: Option<String>,
}

pub fn run(ctx: &Ctx, a: ExperimentArgs) -> Result<bool, Failure> {
    match a.kind {
        Kind::Sphere => sphere(ctx),
        Kind::Cone => cone(ctx, a),
    }
}

fn sphere(ctx: &Ctx) -> Result<bool, Failure> {
    let s = ctx.cfg.experiment.sphere.as_ref().ok_or_else(|| Failure::Usage("experiment sphere needs an [experiment.sphere] config section".into()))?;
    let profile = s.profile.build()?;
    let n = s.n.unwrap_or(1);
    let weight = s.weight.build(n)?;
    if s.sphere_radii.is_empty() || s.sphere_radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Failure::Usage("experiment.sphere.sphere_radii must be positive and nonempty".into()));
    }
    let mut cfg = SphereConfig::new(weight, s.sphere_radii.clone(), s.k_max, ctx.seed);
    if let Some(r) = &s.measure_radii {
        cfg.measure_radii = r.clone();
    }
    if let Some(m) = s.points_per_sphere {
        cfg.points_per_sphere = m;
    }
    if let Some(v) = s.noise_floor {
        cfg.noise_floor = v;
    }
    let tol = ctx.tol.unwrap_or(1e-4);
    let rep = sphere_injectivity_experiment(&profile, &cfg)?;

    let mut report = Report::new("sphere_experiment");
    report.set("identity", anchors::SPHERE_INJECTIVITY);
    report.set("verdict", &rep.verdict);
    report.set("tolerance", tol);
    report.set("experiment", &rep);
    report.push(check_row(
        "sphere",
        "decay hypothesis: e^{r^2/4} |f(r)| grows at most polynomially",
        json!({ "radii": rep.decay.radii, "weighted": rep.decay.weighted, "slope": rep.decay.slope, "limit": rep.decay.limit }),
        rep.decay.passed,
        None,
        None,
    ));
    let incomplete = rep.verdict.starts_with("incomplete");
    for c in &rep.coefficients {
        let mut row = Row::new();
        row.insert("identity".into(), json!(anchors::SPHERE_INJECTIVITY));
        row.insert("k".into(), json!(c.k));
        row.insert("coefficient".into(), json!(c.status));
        row.insert("radius_used".into(), json!(c.radius_used));
        row.insert("recovered".into(), c.recovered.map_or(Value::Null, cjson));
        row.insert("truth".into(), json!(c.truth));
        row.insert("residual".into(), json!(c.error));
        row.insert("tolerance".into(), json!(tol));
        let ok = match c.status.as_str() {
            "unreachable" => true,
            "pinned" => c.error.is_some_and(|e| e <= tol),
            _ => false,
        };
        row.insert("status".into(), json!(if ok { "pass" } else { "fail" }));
        report.push(row);
    }
    if incomplete {
        report.passed = false;
    }
    let rows: Vec<Row> = rep
        .coefficients
        .iter()
        .flat_map(|c| {
            c.per_radius.iter().map(move |r| {
                let mut row = to_row(r);
                row.insert("k".into(), json!(c.k));
                row.shift_remove("recovered");
                row.insert("recovered_re".into(), json!(r.recovered.map(|v| v.re)));
                row.insert("recovered_im".into(), json!(r.recovered.map(|v| v.im)));
                row
            })
        })
        .collect();
    ctx.sink.csv_artifact("sphere_radii.csv", &rows)?;
    ctx.sink.emit(&report)?;
    Ok(report.passed)
}

/// `P_{s,t}^k(z0)` of a planted mixture at a unit direction.
fn planted_coefficient(input: &Input, k: usize, s: usize, t: usize, z0: &[Complex64]) -> Option<Complex64> {
    let Input::Planted(entry) = input else { return None };
    let n = entry.n;
    let mut v = Complex64::new(0.0, 0.0);
    for c in entry.components.iter().filter(|c| c.harmonic.p() == s && c.harmonic.q() == t && k >= s) {
        let phi = phi_radial(k - s, (n + s + t - 1) as f64, 1.0);
        if phi.abs() < 1e-12 {
            return None;
        }
        v += c.projection(k, z0) / phi;
    }
    Some(v)
}

fn cone(ctx: &Ctx, a: ExperimentArgs) -> Result<bool, Failure> {
    let s = ctx.cfg.experiment.cone.as_ref().ok_or_else(|| Failure::Usage("experiment cone needs an [experiment.cone] config section".into()))?;
    let spec = match (&a.f, &ctx.cfg.field) {
        (Some(f), _) => FieldSpec::from_shorthand(f, a.harmonic.as_deref())?,
        (None, Some(f)) => f.clone(),
        (None, None) => return Err(Failure::Usage("experiment cone needs --f or a [field] section".into())),
    };
    let input = spec.resolve(ctx.seed)?;
    if input.n() != 2 {
        return Err(Failure::Usage(format!("the cone experiment runs on C^2, the input lives on C^{}", input.n())));
    }
    let dirs = s.directions.iter().map(|d| point(d, 2)).collect::<Result<Vec<_>, _>>()?;
    let mut cfg = ConeConfig::new(dirs, s.k_max, ctx.seed)?;
    if let Some(t) = s.t_max {
        cfg.t_max = t;
        cfg.angles = cfg.angles.max(s.k_max + t + 2);
    }
    if let Some(r) = &s.radii {
        cfg.radii = r.clone();
    }
    if let Some(z) = s.zero_tol {
        cfg.zero_tol = z;
    }
    let tol = ctx.tol.unwrap_or(1e-3);
    let f = input.field();
    let rep = cone_injectivity_experiment(f.as_ref(), &cfg)?;

    let mut report = Report::new("cone_experiment");
    report.set("identity", anchors::CONE_INJECTIVITY);
    report.set("input", input.name());
    report.set("verdict", &rep.verdict);
    report.set("note", &rep.note);
    report.set("tolerance", tol);
    report.set("f_sup", rep.f_sup);
    report.set("fits", &rep.fits);
    report.set("binomials", &rep.binomials);

    let truths: Vec<Option<Complex64>> =
        rep.coefficients.iter().map(|c| planted_coefficient(&input, c.k, c.s, c.t, &rep.directions[c.direction])).collect();
    let scale = truths.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    let mut table = Vec::new();
    for (c, truth) in rep.coefficients.iter().zip(&truths) {
        let mut row = Row::new();
        row.insert("identity".into(), json!(anchors::CONE_INJECTIVITY));
        row.insert("k".into(), json!(c.k));
        row.insert("s".into(), json!(c.s));
        row.insert("t".into(), json!(c.t));
        row.insert("direction".into(), json!(c.direction));
        row.insert("value_re".into(), json!(c.value.re));
        row.insert("value_im".into(), json!(c.value.im));
        row.insert("forced_zero".into(), json!(c.forced_zero));
        match truth {
            Some(t) => {
                let err = if scale > 0.0 { (c.value - t).norm() / scale } else { c.value.norm() };
                row.insert("planted_re".into(), json!(t.re));
                row.insert("planted_im".into(), json!(t.im));
                row.insert("residual".into(), json!(err));
                row.insert("tolerance".into(), json!(tol));
                row.insert("status".into(), json!(if err <= tol { "pass" } else { "fail" }));
            }
            None => {
                row.insert("status".into(), json!("info"));
            }
        }
        table.push(row.clone());
        report.push(row);
    }
    ctx.sink.csv_artifact("cone_coefficients.csv", &table)?;
    ctx.sink.emit(&report)?;
    Ok(report.passed)
}
