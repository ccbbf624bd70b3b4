use super::cache::{load_or_build, BallSource};
use super::{CertifyArgs, Cli, CounterexampleArgs, CrosscheckArgs, EstimateArgs, NormArgs, TransferArgs};
use crate::error::{Error, Result};
use crate::groups::{ball, Element, Family, FiniteFunction, GroupSpec};
use crate::kphi::{
    build_f2_witness_with, certify_lower, half_line_certificate, k4_constant, lower_from_certificate, sandwich_on,
    Action, BallProblem, Certificate, OptimizerOptions,
};
use crate::norms::{gauge_norm, NormingFunction, ValueMultiset};
use crate::opsim::{
    build_schedule, build_trees, diagonal_tensor_lower_bound, dump_levels, explicit_commutator_norms,
    regular_representation_crosscheck, sabotaged_trees, schedule_norms, tensor_orbit, SparseSlice, Word,
};
use crate::transfer::{transfer_lower, EmbeddingFile, EmbeddingMap};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn elapsed_ms(start: Instant) -> u64 {
    u64::try_from(start.elapsed().as_millis()).unwrap_or(u64::MAX)
}

/// Parse a value file: see [`super::NormArgs::values`].
pub(super) fn parse_values(text: &str) -> Result<ValueMultiset> {
    let t = text.trim();
    if t.starts_with('[') {
        let v: Value = serde_json::from_str(t)?;
        let items = v.as_array().ok_or_else(|| Error::InvalidInput("expected a JSON array".into()))?;
        if items.iter().all(Value::is_number) {
            return Ok(ValueMultiset::from_abs(items.iter().filter_map(Value::as_f64)));
        }
        let mut entries = Vec::with_capacity(items.len());
        for item in items {
            let bad = || Error::InvalidInput(format!("expected [value, count], got {item}"));
            let pair = item.as_array().filter(|p| p.len() == 2).ok_or_else(bad)?;
            let value = pair[0].as_f64().ok_or_else(bad)?;
            let count = match &pair[1] {
                Value::String(s) => s.trim().parse::<BigUint>().map_err(|_| bad())?,
                Value::Number(n) => BigUint::from(n.as_u64().ok_or_else(bad)?),
                _ => return Err(bad()),
            };
            entries.push((value, count));
        }
        return ValueMultiset::new(entries);
    }
    let values = t
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| Error::InvalidInput(format!("not a number: {s:?}"))))
        .collect::<Result<Vec<_>>>()?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("values must be finite".into()));
    }
    Ok(ValueMultiset::from_abs(values))
}

pub(super) fn norm(a: &NormArgs) -> Result<Value> {
    let v = parse_values(&read_to_string(&a.values)?)?;
    let n = gauge_norm(&v, &a.phi);
    Ok(json!({
        "phi": a.phi.to_string(),
        "norm": n,
        "distinct_values": v.entries().len(),
        "count": v.total_count().to_str_radix(10),
    }))
}

fn has_f2_letters(spec: &GroupSpec) -> bool {
    spec.family == Family::Free(2)
        && ["a", "b"].iter().all(|w| spec.family.parse_word(w).map(|g| spec.generators().contains(&g)).unwrap_or(false))
}

/// Certified lower bound for one radius, with a label for its source.
fn lower_bound(
    spec: &GroupSpec,
    phi: &NormingFunction,
    radius: usize,
    depth: usize,
    user: Option<&Certificate>,
) -> Result<(Option<f64>, String)> {
    if let Some(cert) = user {
        return Ok((Some(lower_from_certificate(cert, spec, phi, radius)?), "file".into()));
    }
    if has_f2_letters(spec) {
        let d = depth.max(radius + 2);
        return match build_f2_witness_with(d, Action::Right, *phi) {
            Ok(cert) => Ok((Some(lower_from_certificate(&cert, spec, phi, radius)?), format!("f2_witness:{d}"))),
            Err(Error::Unsupported(_)) => Ok((None, "none".into())),
            Err(e) => Err(e),
        };
    }
    if spec.family == Family::FreeAbelian(1) && *phi == NormingFunction::Trace {
        let t = depth.max(radius + 1);
        let cert = half_line_certificate(t)?;
        return Ok((Some(lower_from_certificate(&cert, spec, phi, radius)?), format!("half_line:{t}")));
    }
    Ok((None, "none".into()))
}

pub(super) fn estimate(cli: &Cli, a: &EstimateArgs) -> Result<Value> {
    let start = Instant::now();
    let radii: Vec<usize> = match (&a.radius, &a.radii) {
        (Some(r), _) => vec![*r],
        (None, Some(rs)) if !rs.is_empty() => rs.clone(),
        _ => return Err(Error::InvalidInput("no radius given".into())),
    };
    let user =
        a.certificate.as_deref().map(|p| read_to_string(p).and_then(|s| Certificate::from_json(&s))).transpose()?;
    let cache = cli.cache_dir();
    let mut rows = Vec::with_capacity(radii.len());
    let mut warm: Option<FiniteFunction> = None;
    for &r in &radii {
        let (b, source) = load_or_build(&a.group, r + 1, cli.ball_cap(), cache.as_deref())?;
        log::info!("R={r}: ball {}", if source == BallSource::Cache { "cache" } else { "built" });
        let problem = BallProblem::with_ball(&a.group, a.phi, r, b)?;
        let (lower, lower_source) = lower_bound(&a.group, &a.phi, r, a.witness_depth, user.as_ref())?;
        let opts = OptimizerOptions {
            iterations: a.iterations,
            seed: cli.global.seed,
            ball_cap: cli.ball_cap(),
            warm_start: warm
                .take()
                .filter(|f| f.iter().all(|(x, _)| problem.ball.index_of(x).is_some_and(|i| i < problem.inner))),
        };
        let rep = sandwich_on(&problem, lower, a.method, &opts)?;
        rows.push(json!({
            "R": r,
            "lower": rep.lower,
            "lower_source": lower_source,
            "upper": rep.upper,
            "gap": rep.gap,
            "minimizer_support_size": rep.result.minimizer.len(),
            "ball_size": problem.dim(),
            "diagnostics": rep.result.diagnostics,
        }));
        warm = Some(rep.result.minimizer);
    }
    if let Some(path) = &a.csv {
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        w.write_record(["R", "lower", "upper", "gap", "minimizer_support_size"]).map_err(csv_err)?;
        for row in &rows {
            let cell = |k: &str| match &row[k] {
                Value::Null => String::new(),
                v => v.to_string(),
            };
            w.write_record([cell("R"), cell("lower"), cell("upper"), cell("gap"), cell("minimizer_support_size")])
                .map_err(csv_err)?;
        }
        w.flush()?;
    }
    let mut out = json!({
        "group": a.group.to_string(),
        "phi": a.phi.to_string(),
        "rows": rows,
        "runtime_ms": elapsed_ms(start),
    });
    if let [only] = rows_of(&out)[..] {
        let only = only.clone();
        for k in ["R", "lower", "upper", "gap", "minimizer_support_size"] {
            out[k] = only[k].clone();
        }
    }
    Ok(out)
}

fn rows_of(v: &Value) -> Vec<&Value> {
    v["rows"].as_array().map(|a| a.iter().collect()).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

fn certificate_summary(cert: &Certificate) -> Value {
    let k4 = k4_constant(cert);
    let lower = cert.residual_radius().checked_sub(1).and_then(|r| certify_lower(cert, r).ok());
    json!({
        "group": cert.group().to_string(),
        "action": cert.action().to_string(),
        "phi": cert.phi().to_string(),
        "functions": cert.entries().len(),
        "residual_radius": cert.residual_radius(),
        "dual_norms": cert.dual_norms(),
        "k4_constant": k4,
        "lower_bound": lower,
    })
}

pub(super) fn certify(a: &CertifyArgs) -> Result<Value> {
    if let Some(path) = &a.validate {
        let cert = Certificate::from_json(&read_to_string(path)?)?;
        let mut v = certificate_summary(&cert);
        v["valid"] = Value::Bool(true);
        return Ok(v);
    }
    let cert = match (a.half_line, a.depth) {
        (Some(t), None) => {
            if a.action != Action::Right || a.phi != NormingFunction::Trace {
                return Err(Error::InvalidInput("the half-line certificate is right action, trace norm".into()));
            }
            half_line_certificate(t)?
        }
        (None, d) => build_f2_witness_with(d.unwrap_or(20), a.action, a.phi)?,
        (Some(_), Some(_)) => return Err(Error::InvalidInput("--half-line and --depth are exclusive".into())),
    };
    if let Some(p) = &a.cert_out {
        std::fs::write(p, cert.to_json())?;
    }
    let mut v = certificate_summary(&cert);
    v["valid"] = Value::Bool(true);
    Ok(v)
}

pub(super) fn transfer(a: &TransferArgs) -> Result<Value> {
    let rho = if let Some(p) = &a.embedding {
        let file: EmbeddingFile = serde_json::from_str(&read_to_string(p)?)?;
        EmbeddingMap::from_file(&file)?
    } else if let Some(n) = a.inclusion {
        EmbeddingMap::inclusion(2, n, a.domain_radius)?
    } else if let Some(words) = &a.reexpress {
        let w: Vec<&str> = words.iter().map(String::as_str).collect();
        EmbeddingMap::reexpression(Family::Free(2), &w, a.domain_radius)?
    } else {
        return Err(Error::InvalidInput("one of --embedding, --inclusion, --reexpress is required".into()));
    };
    let cert = match &a.certificate {
        Some(p) => Certificate::from_json(&read_to_string(p)?)?,
        None => build_f2_witness_with(a.witness_depth, Action::Right, a.phi)?,
    };
    let target = rho.target().clone();
    let rep = transfer_lower(&cert, &rho, &target, &a.phi)?;
    Ok(json!({
        "source": rho.source().to_string(),
        "target": target.to_string(),
        "phi": a.phi.to_string(),
        "M": rho.lipschitz_m(),
        "target_generators": target.generators().len(),
        "colipschitz": rho.colipschitz(),
        "domain_radius": rho.domain_radius(),
        "displacement_weight": rho.displacement_weight(),
        "bound": rep.bound,
        "source_lower": rep.source_lower,
        "factor": rep.factor,
        "valid_radius": rep.valid_radius,
    }))
}

fn delta_xi() -> BTreeMap<Word, f64> {
    [(Vec::new(), 1.0)].into_iter().collect()
}

pub(super) fn counterexample(a: &CounterexampleArgs) -> Result<Value> {
    let start = Instant::now();
    let schedule = build_schedule(&a.phi, a.nmax)?;
    let rows = schedule_norms(&schedule, &a.phi)?;
    for row in &rows {
        if row.norm.hi > row.target || !row.rank_bound_holds {
            return Err(Error::Invariant(format!(
                "n = {} {:?}: norm {} against target {} (rank bound holds: {})",
                row.n, row.parity, row.norm.hi, row.target, row.rank_bound_holds
            )));
        }
    }
    let depth = a.orbit_depth.max(a.explicit_depth);
    let (tx, ty) = build_trees(&schedule, depth as u64 + 1)?;
    let (x, y) = (SparseSlice::from_tree(&tx, depth)?, SparseSlice::from_tree(&ty, depth)?);
    let orbit = tensor_orbit(&x, &y, a.orbit_depth)?;
    if !orbit.is_free() || !orbit.is_orthonormal() {
        return Err(Error::Invariant(format!("tensor orbit collides at length {:?}", orbit.first_collision_length())));
    }
    let delta = delta_xi();
    let diag = diagonal_tensor_lower_bound(&orbit, &delta, a.witness_depth, &a.phi)?;
    let small = tensor_orbit(&x, &y, a.explicit_depth)?;
    let explicit = explicit_commutator_norms(&x, &y, &small, &delta, &a.phi)?;
    if explicit[0].max(explicit[1]) < diag.bound * (1.0 - 1e-12) {
        return Err(Error::Invariant(format!("dense commutator norms {explicit:?} fall below {}", diag.bound)));
    }
    let sab_depth = a.orbit_depth.min(6);
    let (sx, sy) = sabotaged_trees(&schedule, sab_depth as u64 + 1)?;
    let sab =
        tensor_orbit(&SparseSlice::from_tree(&sx, sab_depth)?, &SparseSlice::from_tree(&sy, sab_depth)?, sab_depth)?;

    if let Some(p) = &a.dump {
        let d = dump_levels(&schedule, &a.phi, a.dump_depth)?;
        std::fs::write(p, serde_json::to_string_pretty(&d)? + "\n")?;
    }
    if let Some(p) = &a.csv {
        let mut w = csv::Writer::from_path(p).map_err(csv_err)?;
        w.write_record(["n", "parity", "h", "rank", "norm_lo", "norm_hi", "target"]).map_err(csv_err)?;
        for r in &rows {
            w.write_record([
                r.n.to_string(),
                serde_json::to_value(r.parity)?.as_str().unwrap_or_default().to_string(),
                r.h.to_string(),
                r.rank.to_str_radix(10),
                r.norm.lo.to_string(),
                r.norm.hi.to_string(),
                r.target.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
    }
    let s: Vec<u64> = (1..=schedule.len()).map(|p| schedule.partial_sum(p)).collect();
    Ok(json!({
        "phi": a.phi.to_string(),
        "schedule": { "h": schedule.values(), "S": s },
        "norms": rows,
        "all_norms_within_target": true,
        "orbit": {
            "max_len": orbit.max_len,
            "count": orbit.len(),
            "free": orbit.is_free(),
            "orthonormal": orbit.is_orthonormal(),
        },
        "diagonal_bound": diag,
        "explicit_check": { "orbit_len": small.max_len, "norms": explicit },
        "sabotaged": { "orbit_len": sab.max_len, "free": sab.is_free(), "first_collision_length": sab.first_collision_length() },
        "runtime_ms": elapsed_ms(start),
    }))
}

pub(super) fn crosscheck(cli: &Cli, a: &CrosscheckArgs) -> Result<Value> {
    let start = Instant::now();
    let g: Element = a.group.parse_word(&a.generator)?;
    let support = ball(&a.group, a.radius, cli.ball_cap())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cli.global.seed);
    let mut max_dev: f64 = 0.0;
    let mut dims = Vec::with_capacity(a.samples);
    let mut worst_gap: f64 = 0.0;
    for _ in 0..a.samples {
        let f = FiniteFunction::from_pairs(
            a.group.family,
            support.elements().iter().map(|x| (x.clone(), rng.gen::<f64>())),
        );
        let rep = regular_representation_crosscheck(&a.group, &g, &f, &a.phi, cli.ball_cap())?;
        max_dev = max_dev.max(rep.max_deviation);
        worst_gap = worst_gap.max((rep.commutator_norm - rep.difference_norm).abs());
        dims.push(rep.dimension);
    }
    Ok(json!({
        "group": a.group.to_string(),
        "phi": a.phi.to_string(),
        "generator": a.group.format(&g),
        "samples": a.samples,
        "dimension": dims.iter().max(),
        "max_deviation": max_dev,
        "max_norm_gap": worst_gap,
        "runtime_ms": elapsed_ms(start),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_formats() {
        let a = parse_values("[3, -4]").unwrap();
        let b = parse_values("3, 4\n").unwrap();
        let c = parse_values("[[3, 1], [4, \"1\"]]").unwrap();
        for v in [&a, &b, &c] {
            assert_eq!(gauge_norm(v, &NormingFunction::Schatten(2.0)).hi, 5.0);
        }
        let big = parse_values("[[1, \"1000000000000000000000\"]]").unwrap();
        assert_eq!(big.total_count().to_str_radix(10), "1000000000000000000000");
        assert!(parse_values("[[1, -2]]").is_err());
        assert!(parse_values("1 x").is_err());
        assert!(parse_values("[[-1, 2]]").is_err());
    }
}
