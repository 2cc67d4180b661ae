//! The `construct`, `jets` and `nevanlinna` commands.

use fermatlab_core::expr::Expr;
use fermatlab_core::jets::{threshold_verify, Sweep, DEFAULT_TRUNCATION};
use fermatlab_core::nevanlinna::{
    growth_ratio, lemma_defect_check, locate_a_points, logderiv_check, report, small_function_check, BaseSurface,
    LemmaCase, QuadConfig, Target, ZeroPoleList,
};
use fermatlab_core::solutions::{
    catalog, draw, holo_equal, holo_general, mero_equal, mero_general, verify, CatalogId, FactoryFamily, GridSpec,
    MeroParams, SolutionTuple,
};
use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{CommandKind, Options, RunConfig};
use crate::error::CliError;
use crate::report::{num, ReportDocument, Table, Verdict};
use crate::sexpr;
use crate::values::{parse_complex, parse_pair, parse_point, parse_range, parse_target};

/// Default largest exponent accepted by `jets`.
pub const DEFAULT_MAX_EXPONENT: u32 = 12;
/// Radii for defect checks: the surrogate `1 − max N/T` needs radii where
/// the characteristic has outgrown bounded terms.
pub const DEFECT_SCHEDULE: [f64; 4] = [8.0, 12.0, 16.0, 20.0];
pub const LEMMA_SLACK: f64 = 0.05;
pub const LOGDERIV_SLACK: f64 = 2.0;
pub const SMALL_FUNCTION_TOL: f64 = 0.05;

/// Output of one command: the report and its main table.
pub struct Outcome {
    pub report: ReportDocument,
    pub table: Table,
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (results, verdicts, table) = match cfg.command {
        CommandKind::Construct => construct(&cfg.options, cfg.seed())?,
        CommandKind::Jets => jets(&cfg.options, cfg.seed())?,
        CommandKind::Nevanlinna => nevanlinna(&cfg.options, cfg.seed())?,
    };
    Ok(Outcome { report: ReportDocument::new(cfg.command, cfg.echo(), results, verdicts), table })
}

type Parts = (Vec<Value>, Vec<Verdict>, Table);

fn required<'a, T>(v: &'a Option<T>, key: &str) -> Result<&'a T, CliError> {
    v.as_ref().ok_or_else(|| CliError::Schema(format!("`{key}` is required here")))
}

fn complex_list(v: &Option<Vec<String>>) -> Result<Vec<Complex64>, CliError> {
    v.iter().flatten().map(|s| parse_complex(s)).collect()
}

fn expr_list(s: &str) -> Result<Vec<Expr>, CliError> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(|p| Ok(sexpr::parse(p)?)).collect()
}

enum Construction {
    Factory(FactoryFamily),
    Catalog(CatalogId),
}

fn family_of(name: &str) -> Result<Construction, CliError> {
    if let Some(f) = FactoryFamily::parse(name) {
        return Ok(Construction::Factory(f));
    }
    Ok(Construction::Catalog(CatalogId::parse(name)?))
}

fn has_factory_params(o: &Options) -> bool {
    o.n.is_some() || o.k.is_some() || o.ns.is_some() || o.a.is_some() || o.b.is_some()
}

fn factory_tuple(family: FactoryFamily, o: &Options) -> Result<SolutionTuple, CliError> {
    let a = complex_list(&o.a)?;
    Ok(match family {
        FactoryFamily::HoloEqual => holo_equal(*required(&o.n, "n")?, *required(&o.k, "k")?, &a)?,
        FactoryFamily::MeroEqual => {
            let n = *required(&o.n, "n")?;
            let k = *required(&o.k, "k")?;
            let params = match &o.b {
                Some(b) => {
                    let [a] = a[..] else {
                        return Err(CliError::Parameter("the split-pair variant takes exactly one `a`".into()));
                    };
                    MeroParams::SplitPair { b: parse_complex(b)?, a }
                }
                None => MeroParams::Uniform(a),
            };
            mero_equal(n, k, &params)?
        }
        FactoryFamily::HoloGeneral => holo_general(required(&o.ns, "ns")?, &a)?,
        FactoryFamily::MeroGeneral => mero_general(required(&o.ns, "ns")?, &a)?,
    })
}

/// Tuples requested by the options: explicit parameters, a catalog
/// example, or `draws` random members drawn from `seed`.
fn tuples(o: &Options, seed: u64) -> Result<Vec<SolutionTuple>, CliError> {
    let name = required(&o.family, "family")?;
    match family_of(name)? {
        Construction::Catalog(id) => {
            if has_factory_params(o) || o.draws.is_some() {
                return Err(CliError::Schema(format!("{name} takes only `inner`")));
            }
            let inner = sexpr::parse(o.inner.as_deref().unwrap_or("z"))?;
            Ok(vec![catalog(id, &inner)?])
        }
        Construction::Factory(f) => {
            if o.inner.is_some() {
                return Err(CliError::Schema("`inner` applies to catalog examples only".into()));
            }
            if has_factory_params(o) {
                if o.draws.is_some() {
                    return Err(CliError::Schema("`draws` excludes explicit parameters".into()));
                }
                return Ok(vec![factory_tuple(f, o)?]);
            }
            let count = o.draws.unwrap_or(1);
            if count == 0 {
                return Err(CliError::Parameter("`draws` must be positive".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..count).map(|_| draw(f, &mut rng)).collect())
        }
    }
}

fn default_tol(t: &SolutionTuple) -> f64 {
    if t.family_id == CatalogId::K2N3Baker.as_str() || t.family_id == CatalogId::K3N5M.as_str() {
        1e-8
    } else {
        1e-9
    }
}

fn grid_for(t: &SolutionTuple, o: &Options) -> Result<GridSpec, CliError> {
    let GridSpec::Polar { rings, per_ring, r_min, r_max } = GridSpec::default_for(t) else {
        unreachable!("default grid is polar")
    };
    let g = GridSpec::Polar {
        rings: o.grid_rings.unwrap_or(rings),
        per_ring: o.grid_per_ring.unwrap_or(per_ring),
        r_min: o.grid_r_min.unwrap_or(r_min),
        r_max: o.grid_r_max.unwrap_or(r_max),
    };
    if let GridSpec::Polar { rings, per_ring, r_min, r_max } = g {
        if rings == 0 || per_ring == 0 || !(0.0 <= r_min && r_min <= r_max && r_max.is_finite()) {
            return Err(CliError::Parameter("grid needs rings, points per ring and 0 ≤ r-min ≤ r-max".into()));
        }
    }
    Ok(g)
}

fn tuple_json(t: &SolutionTuple) -> Value {
    json!({
        "family": t.family_id,
        "kind": t.kind,
        "domain": t.domain,
        "exponents": t.exponents,
        "params": t.params,
        "exprs": t.exprs.iter().map(sexpr::print).collect::<Vec<_>>(),
        "coefficients": t.coefficients.as_ref().map(|c| c.iter().map(sexpr::print).collect::<Vec<_>>()),
        "notes": t.notes,
    })
}

fn construct(o: &Options, seed: u64) -> Result<Parts, CliError> {
    let ts = tuples(o, seed)?;
    let mut results = Vec::new();
    let mut verdicts = Vec::new();
    let mut table = Table::new(vec!["index", "family", "k", "samples", "accepted", "max_residual", "tol", "pass"]);
    for (i, t) in ts.iter().enumerate() {
        let tol = o.tol.unwrap_or_else(|| default_tol(t));
        let grid = grid_for(t, o)?;
        let rep = verify(t, &grid, tol);
        let tag = if ts.len() > 1 { format!("[{i}]") } else { String::new() };
        verdicts.push(Verdict::le(format!("VERIFY.{}{tag}.max_residual<=tol", t.family_id), rep.max_residual, tol));
        verdicts.push(Verdict::ge(format!("VERIFY.{}{tag}.accepted>=1", t.family_id), rep.accepted as f64, 1.0));
        table.push(vec![
            i.to_string(),
            t.family_id.clone(),
            t.k().to_string(),
            rep.samples.to_string(),
            rep.accepted.to_string(),
            num(rep.max_residual),
            num(tol),
            rep.passed().to_string(),
        ]);
        let mut v = tuple_json(t);
        v["grid"] = json!(grid);
        v["verify"] = json!(rep);
        results.push(v);
    }
    Ok((results, verdicts, table))
}

fn sweep_of(o: &Options) -> Result<Sweep, CliError> {
    let family = required(&o.family, "family")?;
    let max = o.max_exponent.unwrap_or(DEFAULT_MAX_EXPONENT);
    let range = || -> Result<(u32, u32), CliError> {
        match (&o.range, o.n) {
            (Some(r), None) => parse_range(r),
            (None, Some(n)) => Ok((n, n)),
            (Some(_), Some(_)) => Err(CliError::Schema("give either `range` or `n`".into())),
            (None, None) => Err(CliError::Schema("`range` is required here".into())),
        }
    };
    let check = |top: u32| {
        if top > max {
            Err(CliError::Parameter(format!("exponent {top} exceeds the configured maximum {max}")))
        } else {
            Ok(())
        }
    };
    let sweep = match family.as_str() {
        "Cn" | "Sn" => {
            if o.m.is_some() || o.pairs.is_some() {
                return Err(CliError::Schema(format!("{family} takes `range` or `n`")));
            }
            let (from, to) = range()?;
            check(to)?;
            if family == "Cn" {
                Sweep::Cn { from, to }
            } else {
                Sweep::Sn { from, to }
            }
        }
        "Cmn" => {
            let pairs = match (&o.pairs, o.m, o.n) {
                (Some(p), None, None) => p.iter().map(|s| parse_pair(s)).collect::<Result<Vec<_>, _>>()?,
                (None, Some(m), Some(n)) => vec![(m, n)],
                _ => return Err(CliError::Schema("Cmn takes `pairs` or both `m` and `n`".into())),
            };
            if pairs.is_empty() {
                return Err(CliError::Parameter("no exponent pairs".into()));
            }
            for &(m, n) in &pairs {
                check(m.max(n))?;
                if m < n || n == 0 {
                    return Err(CliError::Parameter(format!("pair {m}:{n} needs m ≥ n ≥ 1")));
                }
            }
            Sweep::Cmn { pairs }
        }
        "Smnl" => {
            if o.m.is_some() || o.pairs.is_some() {
                return Err(CliError::Schema("Smnl takes `range`".into()));
            }
            let (_, to) = range()?;
            check(to)?;
            Sweep::Smnl { max: to }
        }
        other => return Err(CliError::Schema(format!("unknown jet family `{other}`"))),
    };
    Ok(sweep)
}

fn jets(o: &Options, seed: u64) -> Result<Parts, CliError> {
    let sweep = sweep_of(o)?;
    let truncation = o.truncation.unwrap_or(DEFAULT_TRUNCATION);
    let rep = threshold_verify(&sweep, seed, truncation)?;
    let mut verdicts = Vec::new();
    let mut table = Table::new(vec!["exponents", "key", "order"]);
    for row in &rep.rows {
        let exps = row.exponents.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        let suffix = format!("@{exps}");
        verdicts.extend(row.verdicts.iter().map(|v| Verdict::from_jet(v, &suffix)));
        for (key, ord) in &row.orders {
            table.push(vec![exps.clone(), key.clone(), ord.to_string()]);
        }
    }
    verdicts.extend(rep.sweep_verdicts.iter().map(|v| Verdict::from_jet(v, "")));
    Ok((vec![json!(rep)], verdicts, table))
}

fn quad_config(o: &Options) -> Result<QuadConfig, CliError> {
    let d = QuadConfig::default();
    let cfg = QuadConfig {
        rel_tol: o.rel_tol.unwrap_or(d.rel_tol),
        abs_tol: o.abs_tol.unwrap_or(d.abs_tol),
        max_evals: o.max_evals.unwrap_or(d.max_evals),
        pole_guard: d.pole_guard,
    };
    if !(cfg.rel_tol > 0.0 && cfg.abs_tol >= 0.0 && cfg.max_evals > 0) {
        return Err(CliError::Parameter("quadrature tolerances must be positive".into()));
    }
    Ok(cfg)
}

fn surface_of(o: &Options) -> Result<BaseSurface, CliError> {
    let s = o.surface.as_deref().unwrap_or("C");
    BaseSurface::parse(s).ok_or_else(|| CliError::Schema(format!("unknown surface `{s}` (use C or D)")))
}

/// `e^z + z − ½`, `−e^z`, `½ − z`: three non-constant members summing to 0,
/// none vanishing at the base point.
pub fn exp_syzygy() -> Vec<Expr> {
    let z = Expr::var();
    let half = Expr::real(0.5);
    vec![z.exp().add(&z).add(&half.neg()), z.exp().neg(), half.add(&z.neg())]
}

fn tuple_of(o: &Options, seed: u64) -> Result<Vec<Expr>, CliError> {
    match (&o.tuple, &o.family) {
        (Some(_), Some(_)) => Err(CliError::Schema("give either `tuple` or `family`".into())),
        (Some(t), None) => match t.strip_prefix("builtin:") {
            Some("exp-syzygy") => Ok(exp_syzygy()),
            Some(other) => Err(CliError::Schema(format!("unknown builtin tuple `{other}`"))),
            None => expr_list(t),
        },
        (None, Some(_)) => Ok(tuples(o, seed)?.swap_remove(0).exprs),
        (None, None) => Err(CliError::Schema("`tuple` or `family` is required here".into())),
    }
}

fn forbid(keys: &[(&str, bool)]) -> Result<(), CliError> {
    match keys.iter().find(|(_, set)| *set) {
        Some((key, _)) => Err(CliError::Schema(format!("`{key}` does not apply to this experiment"))),
        None => Ok(()),
    }
}

fn nevanlinna(o: &Options, seed: u64) -> Result<Parts, CliError> {
    let cfg = quad_config(o)?;
    let surface = surface_of(o)?;
    match (o.defect_check.as_deref(), o.growth_ratio) {
        (Some(_), true) => Err(CliError::Schema("`defect-check` and `growth-ratio` are exclusive".into())),
        (Some("lemma52"), false) => lemma52(o, seed, surface, &cfg),
        (Some("small-function"), false) => small_function(o, seed, surface, &cfg),
        (Some("logderiv"), false) => logderiv(o, surface, &cfg),
        (Some(other), false) => Err(CliError::Schema(format!("unknown defect check `{other}`"))),
        (None, true) => growth(o, seed, surface, &cfg),
        (None, false) => single_function(o, surface, &cfg),
    }
}

fn lemma52(o: &Options, seed: u64, surface: BaseSurface, cfg: &QuadConfig) -> Result<Parts, CliError> {
    forbid(&[("f", o.f.is_some()), ("points", o.points.is_some()), ("target", o.target.is_some())])?;
    let psis = tuple_of(o, seed)?;
    let radii = o.radii.clone().unwrap_or(DEFECT_SCHEDULE.to_vec());
    let slack = o.slack.unwrap_or(LEMMA_SLACK);
    let rep = lemma_defect_check(&psis, surface, &radii, None, seed, slack, cfg)?;
    let mut verdicts = vec![Verdict::le("LEMMA52.sum<=n+slack", rep.sum, rep.n as f64 + slack)];
    if let LemmaCase::Independent { cramer_residual } = rep.case {
        verdicts.push(Verdict::le("LEMMA52.cramer_residual<=1e-8", cramer_residual, 1e-8));
    }
    verdicts.push(Verdict::le("LEMMA52.syzygy_residual<=1e-10", rep.syzygy_residual, 1e-10));
    let mut table = Table::new(vec!["member", "defect", "raw", "clamped"]);
    for (j, d) in rep.defects.iter().enumerate() {
        table.push(vec![j.to_string(), num(d.value), num(d.raw), d.clamped.to_string()]);
    }
    let mut v = json!(rep);
    v["tuple"] = json!(psis.iter().map(sexpr::print).collect::<Vec<_>>());
    Ok((vec![v], verdicts, table))
}

fn small_function(o: &Options, seed: u64, surface: BaseSurface, cfg: &QuadConfig) -> Result<Parts, CliError> {
    forbid(&[("f", o.f.is_some()), ("points", o.points.is_some()), ("target", o.target.is_some())])?;
    let fs = tuple_of(o, seed)?;
    let alphas = expr_list(required(&o.alphas, "alphas")?)?;
    let radii = o.radii.clone().unwrap_or(DEFECT_SCHEDULE.to_vec());
    let tol = o.tol.unwrap_or(SMALL_FUNCTION_TOL);
    let rep = small_function_check(&alphas, &fs, surface, &radii, tol, cfg)?;
    let mut verdicts = Vec::new();
    let mut table = Table::new(vec!["member", "defect", "raw", "clamped"]);
    for (j, d) in rep.defects.iter().enumerate() {
        verdicts.push(Verdict::ge(format!("SMALL.defect_inf[{j}]>=1-tol"), d.value, 1.0 - tol));
        table.push(vec![j.to_string(), num(d.value), num(d.raw), d.clamped.to_string()]);
    }
    Ok((vec![json!(rep)], verdicts, table))
}

fn logderiv(o: &Options, surface: BaseSurface, cfg: &QuadConfig) -> Result<Parts, CliError> {
    forbid(&[("tuple", o.tuple.is_some()), ("points", o.points.is_some()), ("target", o.target.is_some())])?;
    let f = sexpr::parse(required(&o.f, "f")?)?;
    let radii = o.radii.clone().unwrap_or(vec![2.0, 4.0, 8.0]);
    let k = o.level.unwrap_or(1);
    let slack = o.slack.unwrap_or(LOGDERIV_SLACK);
    let rows = logderiv_check(&f, k as usize, surface, &radii, slack, cfg)?;
    let mut verdicts = Vec::new();
    let mut table = Table::new(vec!["r", "m", "t", "bound"]);
    for row in &rows {
        verdicts.push(Verdict::le(format!("LOGDERIV.m<=bound@r={}", row.r), row.m, row.bound));
        table.push(vec![num(row.r), num(row.m), num(row.t), num(row.bound)]);
    }
    Ok((vec![json!({ "f": sexpr::print(&f), "level": k, "slack": slack, "rows": rows })], verdicts, table))
}

fn growth(o: &Options, seed: u64, surface: BaseSurface, cfg: &QuadConfig) -> Result<Parts, CliError> {
    forbid(&[("f", o.f.is_some()), ("points", o.points.is_some()), ("target", o.target.is_some())])?;
    let fs = tuple_of(o, seed)?;
    let radii = o.radii.clone().unwrap_or(vec![1.0, 2.0, 3.0]);
    let mut verdicts = Vec::new();
    let mut table = Table::new(vec!["r", "kappa", "ratio"]);
    let mut rows = Vec::new();
    for &r in &radii {
        let ratio = growth_ratio(&fs, surface, r, cfg)?;
        let kappa = surface.kappa(r);
        if kappa == 0.0 {
            verdicts.push(Verdict::eq(format!("GROWTH.ratio==0@r={r}"), ratio, 0.0));
        } else {
            verdicts.push(Verdict::le(format!("GROWTH.ratio<=0@r={r}"), ratio, 0.0));
        }
        table.push(vec![num(r), num(kappa), num(ratio)]);
        rows.push(json!({ "r": r, "kappa": kappa, "ratio": ratio }));
    }
    let v = json!({
        "surface": surface,
        "tuple": fs.iter().map(sexpr::print).collect::<Vec<_>>(),
        "rows": rows,
    });
    Ok((vec![v], verdicts, table))
}

fn single_function(o: &Options, surface: BaseSurface, cfg: &QuadConfig) -> Result<Parts, CliError> {
    forbid(&[("tuple", o.tuple.is_some()), ("family", o.family.is_some()), ("alphas", o.alphas.is_some())])?;
    let f = sexpr::parse(required(&o.f, "f")?)?;
    let target = parse_target(o.target.as_deref().unwrap_or("inf"))?;
    let radii = o.radii.clone().unwrap_or(vec![1.0, 2.0, 4.0, 8.0]);
    let points = match &o.points {
        Some(p) => ZeroPoleList::user(p.iter().map(|s| parse_point(s)).collect::<Result<Vec<_>, _>>()?)?,
        None if target == Target::Finite(Complex64::new(0.0, 0.0)) && f.is_zero_free_entire() => ZeroPoleList::empty(),
        None if target == Target::Infinity && f.is_pole_free() => ZeroPoleList::empty(),
        None => {
            let r_max = radii.iter().copied().fold(f64::NAN, f64::max);
            locate_a_points(&f, target, surface, r_max)?
        }
    };
    let rep = report(&f, target, o.level, surface, &radii, &points, cfg)?;
    let mut verdicts = vec![Verdict::eq("FMT.growth_flag", rep.fmt_growth_flag, false)];
    for row in &rep.rows {
        if surface.kappa(row.r) == 0.0 {
            verdicts.push(Verdict::eq(format!("GROWTH.ratio==0@r={}", row.r), row.growth_ratio, 0.0));
        } else {
            verdicts.push(Verdict::le(format!("GROWTH.ratio<=0@r={}", row.r), row.growth_ratio, 0.0));
        }
    }
    let mut table = Table::new(vec!["r", "t", "m", "n", "n_k", "fmt_residual", "growth_ratio"]);
    for row in &rep.rows {
        table.push(vec![
            num(row.r),
            num(row.t),
            num(row.m),
            num(row.n),
            num(row.n_k),
            num(row.fmt_residual),
            num(row.growth_ratio),
        ]);
    }
    let v = json!({ "f": sexpr::print(&f), "points": points, "report": rep });
    Ok((vec![v], verdicts, table))
}
