//! Pipelines behind each command.

use g2ambient_core::ambient::{check_ricci_order_tol, fg_expand, AmbientMetric};
use g2ambient_core::g2::{check_two_plane, fhol_origin};
use g2ambient_core::geometries::{
    einstein_ambient, einstein_constant, fefferman_ambient, levi_determinant, pe_ambient, pe_extension, pe_juhl_poincare,
    pe_tractor, CRDefiningFunction, PEFamily,
};
use g2ambient_core::linalg::JetMatrix;
use g2ambient_core::parallel_ext::{covariant_residual_order_tol, extend_parallel_tol};
use g2ambient_core::tensors::{schouten, MetricJet, TensorJet};
use g2ambient_core::tractor::{parallel_1form_from_sigma, tractor_derivative, TractorField};
use g2ambient_core::{Error, Jet, Q};
use toml::{Table, Value};

use crate::config::{Command, Expectations, Input, RunConfig};
use crate::inputs;
use crate::report::{int, matrix_value, measured, num, order_value, Num, Outcome, Provenance};
use crate::CliError;

pub fn run<S: Num>(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut facts = Facts::default();
    let mut out = match (cfg.command, &cfg.input) {
        (Command::FgExpand, Input::Metric(_)) => fg_expand_cmd::<S>(cfg, &mut facts)?,
        (Command::ExtendTractor, Input::Tractor(_) | Input::PeFamily(_)) => extend_tractor_cmd::<S>(cfg, &mut facts)?,
        (Command::CheckTwoPlane, Input::TwoPlane(_)) => check_two_plane_cmd::<S>(cfg, &mut facts)?,
        (Command::Fhol, Input::Fhol(_)) => fhol_cmd::<S>(cfg, &mut facts)?,
        (Command::CheckPe, Input::PeFamily(_)) => check_pe_cmd::<S>(cfg, &mut facts)?,
        (Command::CheckCr, Input::Cr(_)) => check_cr_cmd::<S>(cfg, &mut facts)?,
        _ => return Err(CliError::Config("input section does not match the command".into())),
    };
    apply_expectations::<S>(&cfg.expect, &facts, cfg.tolerance, &mut out)?;
    Ok(out)
}

fn fmt_order(v: u32) -> String {
    if v == u32::MAX {
        "unbounded".into()
    } else {
        v.to_string()
    }
}

fn conv<S: Num>(j: &Jet<Q>) -> Jet<S> {
    j.map_scalar(S::from_q)
}

fn conv_matrix<S: Num>(m: &JetMatrix<Q>) -> JetMatrix<S> {
    m.iter().map(|r| r.iter().map(conv).collect()).collect()
}

fn base_values<S: Num>(m: &JetMatrix<S>) -> Vec<Vec<S>> {
    m.iter().map(|r| r.iter().map(|j| j.constant_term()).collect()).collect()
}

fn matrices_agree<S: Num>(a: &JetMatrix<S>, b: &JetMatrix<S>, tol: f64) -> bool {
    a.iter().zip(b).all(|(r, s)| r.iter().zip(s).all(|(x, y)| (x - y).is_negligible(tol)))
}

/// Lowest-degree part of a jet, for diagnostics.
fn leading_term<S: Num>(j: &Jet<S>, names: &[&str]) -> String {
    match j.min_degree() {
        Some(d) => {
            let low = j.truncated(d as i64);
            let top = Jet::from_terms(
                j.space(),
                &low.terms().filter(|(e, _)| e.iter().map(|&x| x as u32).sum::<u32>() == d).map(|(e, v)| (e.to_vec(), v.clone())).collect::<Vec<_>>(),
            );
            top.display_with(names)
        }
        None => "0".into(),
    }
}

/// Values the `[expect]` section may refer to.
#[derive(Default)]
struct Facts {
    generic: Option<bool>,
    three_degenerate: Option<bool>,
    l_rank: Option<usize>,
    quartic: Option<Vec<Value>>,
    quartic_zero: Option<bool>,
    quartic_raw: Option<Vec<String>>,
    einstein: Option<bool>,
    ricci_flat: Option<bool>,
    achieved_order: Option<u32>,
    levi_determinant_one: Option<bool>,
}

fn apply_expectations<S: Num>(e: &Expectations, f: &Facts, tol: f64, out: &mut Outcome) -> Result<(), CliError> {
    fn missing(key: &str) -> CliError {
        CliError::Config(format!("expectation `{key}` does not apply to this command or input"))
    }
    fn check<T: PartialEq + std::fmt::Debug>(out: &mut Outcome, key: &str, want: &Option<T>, got: &Option<T>) -> Result<(), CliError> {
        if let Some(w) = want {
            let g = got.as_ref().ok_or_else(|| missing(key))?;
            out.verdict(&format!("expect_{key}"), w == g, format!("expected {w:?}, computed {g:?}"));
        }
        Ok(())
    }
    check(out, "generic", &e.generic, &f.generic)?;
    check(out, "three_degenerate", &e.three_degenerate, &f.three_degenerate)?;
    check(out, "l_rank", &e.l_rank, &f.l_rank)?;
    check(out, "l_injective", &e.l_injective, &f.l_rank.map(|r| r == 6))?;
    check(out, "quartic_zero", &e.quartic_zero, &f.quartic_zero)?;
    check(out, "einstein", &e.einstein, &f.einstein)?;
    check(out, "ricci_flat", &e.ricci_flat, &f.ricci_flat)?;
    check(out, "achieved_order", &e.achieved_order, &f.achieved_order)?;
    check(out, "levi_determinant_one", &e.levi_determinant_one, &f.levi_determinant_one)?;
    if let Some(want) = &e.quartic {
        let got = f.quartic_raw.as_ref().ok_or_else(|| missing("quartic"))?;
        if want.len() != 5 {
            return Err(CliError::Config("`expect.quartic` needs five coefficients A0..A4".into()));
        }
        let mut pass = true;
        for (w, g) in want.iter().zip(got) {
            let w = S::from_q(&inputs::parse_rational(w, "expect.quartic")?);
            let g = S::from_q(&inputs::parse_rational(g, "quartic")?);
            if !w.sub(&g).is_negligible(tol) {
                pass = false;
            }
        }
        let shown: Vec<String> = f.quartic.iter().flatten().map(|v| v.to_string()).collect();
        out.verdict("expect_quartic", pass, format!("expected [{}], computed [{}]", want.join(", "), shown.join(", ")));
    }
    Ok(())
}

/// `fg_expand`, falling back to the closed form `(1 + λρ)²g` for Einstein
/// seeds whose requested depth lies beyond the determined range.
fn ambient_for<S: Num>(g: &MetricJet<S>, rho_order: u32) -> Result<(AmbientMetric<S>, &'static str), CliError> {
    match fg_expand(g, rho_order) {
        Ok(a) => Ok((a, "fefferman-graham-expansion")),
        Err(Error::AmbiguityNotDetermined(msg)) => match einstein_ambient(g, 2) {
            Ok((a, _)) => Ok((a, "einstein-closed-form")),
            Err(_) => Err(CliError::Core(Error::AmbiguityNotDetermined(msg))),
        },
        Err(e) => Err(e.into()),
    }
}

/// Order below which `Ric(g̃)` is expected to vanish.
fn expected_ricci_order<S: Num>(a: &AmbientMetric<S>, limit: u32, method: &str) -> u32 {
    if a.n % 2 == 1 || method == "einstein-closed-form" {
        limit
    } else {
        limit.min((a.n / 2 - 1) as u32)
    }
}

fn fg_expand_cmd<S: Num>(cfg: &RunConfig, facts: &mut Facts) -> Result<Outcome, CliError> {
    let Input::Metric(mi) = &cfg.input else { unreachable!() };
    let (gq, _) = inputs::metric(mi, cfg.dimension, cfg.x_order)?;
    let g = MetricJet::new(conv_matrix::<S>(&gq))?;
    let n = g.dim();
    let (a, method) = ambient_for(&g, cfg.rho_order)?;
    let mut out = Outcome::default();
    out.set("dimension", int(n));
    out.set("signature", Value::Array(vec![int(g.signature.0), int(g.signature.1)]));
    out.set("method", method);
    let series = a.rho_series();
    let mut coeffs = Vec::new();
    for (m, gm) in series.iter().enumerate() {
        let rel = gm.iter().flatten().map(|j| if j.is_exact() { i64::MAX } else { j.reliable() }).min().unwrap_or(-1);
        let mut t = Table::new();
        t.insert("rho_power".into(), int(m));
        t.insert("base_point_value".into(), matrix_value(&base_values(gm)));
        t.insert(
            "reliable_x_degree".into(),
            if rel == i64::MAX {
                measured("exact", Provenance::Computed)
            } else {
                measured(rel, if (rel as u32) < cfg.x_order { Provenance::TruncationLimited } else { Provenance::Computed })
            },
        );
        coeffs.push(Value::Table(t));
    }
    out.set("rho_coefficients", Value::Array(coeffs));

    let p = schouten(&g)?;
    if series.len() > 1 {
        let two_p: JetMatrix<S> = (0..n).map(|i| (0..n).map(|j| p.get(&[i, j]).scale_i(2)).collect()).collect();
        let ok = matrices_agree(&series[1], &two_p, cfg.tolerance);
        out.verdict("initial_term", ok, "first rho-coefficient equals twice the Schouten tensor");
    }

    match einstein_constant(&g) {
        Ok(lambda) => {
            facts.einstein = Some(true);
            out.set("einstein_constant", num(&lambda));
            let gm = g.matrix();
            let mut ok = true;
            for (m, gm_m) in series.iter().enumerate() {
                let c = match m {
                    0 => S::one(),
                    1 => lambda.mul(&S::from_i64(2)),
                    2 => lambda.mul(&lambda),
                    _ => S::zero(),
                };
                let want: JetMatrix<S> = gm.iter().map(|r| r.iter().map(|j| j.scale(&c)).collect()).collect();
                ok &= matrices_agree(gm_m, &want, cfg.tolerance);
            }
            out.verdict(
                "einstein_pattern",
                ok,
                format!("rho-coefficients 0..{} equal those of (1 + lambda rho)^2 g", series.len() - 1),
            );
        }
        Err(Error::NotEinstein(_)) => {
            facts.einstein = Some(false);
        }
        Err(e) => return Err(e.into()),
    }

    let ric = check_ricci_order_tol(&a, cfg.tolerance)?;
    let mut rt = Table::new();
    rt.insert("order".into(), measured(order_value(ric.order), Provenance::of_order(ric.order, ric.truncation_limit)));
    rt.insert("truncation_limit".into(), measured(order_value(ric.truncation_limit), Provenance::TruncationLimited));
    rt.insert(
        "componentwise".into(),
        measured(order_value(ric.componentwise), Provenance::of_order(ric.componentwise, ric.truncation_limit)),
    );
    let mut blocks = Table::new();
    for (name, v) in &ric.blocks {
        blocks.insert(name.clone(), measured(order_value(*v), Provenance::of_order(*v, ric.truncation_limit)));
    }
    rt.insert("blocks".into(), Value::Table(blocks));
    if let Some(l) = &ric.leading {
        let mut lt = Table::new();
        lt.insert("rho_power".into(), measured(int(l.rho_power), Provenance::Computed));
        lt.insert("trace_is_zero".into(), Value::Boolean(l.trace_is_zero));
        lt.insert("trace_free_is_zero".into(), Value::Boolean(l.trace_free_is_zero));
        rt.insert("leading".into(), Value::Table(lt));
    }
    out.set("ricci", Value::Table(rt));
    let expected = expected_ricci_order(&a, ric.truncation_limit, method);
    facts.ricci_flat = Some(ric.order >= ric.truncation_limit);
    out.verdict(
        "ricci_order",
        ric.order >= expected,
        format!("Ric of the ambient metric vanishes to rho-order {} (required {})", fmt_order(ric.order), fmt_order(expected)),
    );
    Ok(out)
}

fn seed_diagnostic<S: Num>(chi: &TractorField<S>, tol: f64) -> Result<Vec<String>, CliError> {
    let d = tractor_derivative(chi)?;
    let names: Vec<String> = (1..=chi.n()).map(|i| format!("x{i}")).collect();
    let nm: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let mut diag = Vec::new();
    for idx in d.t.indices() {
        let c = d.get(&idx);
        if !c.is_negligible(tol) {
            let lab: Vec<String> = idx.iter().map(|&i| d.t.frame.label(i)).collect();
            diag.push(format!("nabla chi ({}) has leading term {}", lab.join(","), leading_term(c, &nm)));
        }
    }
    Ok(diag)
}

fn extend_tractor_cmd<S: Num>(cfg: &RunConfig, facts: &mut Facts) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let (chi, seed) = match &cfg.input {
        Input::Tractor(t) => {
            let (gq, names) = inputs::metric(&t.metric, cfg.dimension, cfg.x_order)?;
            let g = MetricJet::new(conv_matrix::<S>(&gq))?;
            let n = g.dim();
            match (&t.sigma, &t.components) {
                (Some(s), None) => {
                    let sigma = conv::<S>(&inputs::scalar_on_metric(s, &t.metric, &names, cfg.x_order, "sigma")?);
                    let (chi, _) = parallel_1form_from_sigma(&sigma, &g)?;
                    (chi, "sigma")
                }
                (None, Some(c)) => {
                    if c.len() != n + 2 {
                        return Err(CliError::Config(format!("a tractor 1-form on a {n}-manifold has {} components, got {}", n + 2, c.len())));
                    }
                    let js: Vec<Jet<S>> = c
                        .iter()
                        .enumerate()
                        .map(|(i, e)| inputs::scalar_on_metric(e, &t.metric, &names, cfg.x_order, &format!("tractor component {i}")).map(|j| conv(&j)))
                        .collect::<Result<_, _>>()?;
                    let chi = TractorField::one_form(&g, js[0].clone(), js[1..=n].to_vec(), js[n + 1].clone())?;
                    (chi, "components")
                }
                _ => return Err(CliError::Config("the tractor seed needs exactly one of `sigma` or `components`".into())),
            }
        }
        Input::PeFamily(p) => {
            let fam = pe_family::<S>(p, cfg.dimension, cfg.x_order)?;
            let (chi, _) = pe_tractor(&fam)?;
            (chi, "pe-family-r")
        }
        _ => unreachable!(),
    };
    let diag = seed_diagnostic(&chi, cfg.tolerance)?;
    if !diag.is_empty() {
        return Err(CliError::NotParallel { message: "the seed tractor is not parallel for the normal tractor connection".into(), residual: diag });
    }
    let g = chi.scale.clone();
    let (a, method) = ambient_for(&g, cfg.rho_order)?;
    let e = extend_parallel_tol(&chi, &a, cfg.tolerance)?;
    let rep = covariant_residual_order_tol(&e, &a, cfg.tolerance)?;
    out.set("dimension", int(g.dim()));
    out.set("seed", seed);
    out.set("ambient_method", method);
    out.set("achieved_order", measured(order_value(rep.order), Provenance::of_order(rep.order, rep.truncation_limit)));
    out.set("truncation_limit", measured(order_value(rep.truncation_limit), Provenance::TruncationLimited));
    out.set("infinity_derivative_vanishes", rep.infinity_derivative_vanishes);
    let leading: Vec<Value> = rep
        .leading
        .iter()
        .map(|(lab, m, c)| {
            let mut t = Table::new();
            t.insert("component".into(), Value::String(lab.clone()));
            t.insert("rho_power".into(), measured(int(*m), Provenance::Computed));
            t.insert("coefficient".into(), Value::String(c.clone()));
            Value::Table(t)
        })
        .collect();
    out.set("residual_leading", Value::Array(leading));
    facts.achieved_order = Some(rep.order);
    let expected = expected_ricci_order(&a, rep.truncation_limit, method);
    out.verdict(
        "parallel_extension_order",
        rep.order >= expected,
        format!("ambient covariant derivative vanishes to rho-order {} (required {})", fmt_order(rep.order), fmt_order(expected)),
    );
    Ok(out)
}

fn quartic_values<S: Num>(a: &[S; 5]) -> Value {
    let mut t = Table::new();
    for (i, v) in a.iter().enumerate() {
        t.insert(format!("A{i}"), num(v));
    }
    Value::Table(t)
}

fn check_two_plane_cmd<S: Num>(cfg: &RunConfig, facts: &mut Facts) -> Result<Outcome, CliError> {
    let Input::TwoPlane(t) = &cfg.input else { unreachable!() };
    if cfg.dimension.is_some_and(|d| d != 5) {
        return Err(CliError::Config("2-plane fields live in dimension 5".into()));
    }
    let f = conv::<S>(&inputs::five_variable(&t.f, t.variables.as_deref(), cfg.x_order, "F")?);
    let r = check_two_plane(&f, cfg.tolerance)?;
    let mut out = Outcome::default();
    out.set("generic", r.generic);
    facts.generic = Some(r.generic);
    out.verdict("generic", r.generic, "the second derived distribution spans the tangent space");
    if !r.generic {
        return Ok(out);
    }
    out.set("adapted", r.adapted);
    out.set("quartic", quartic_values(&r.quartic.a));
    out.set("quartic_is_zero", r.quartic.is_zero());
    out.set("quartic_symmetric", r.symmetric);
    out.set("weyl_vanishes_on_d1", r.weyl_vanishes_on_d1);
    out.set("three_degenerate", r.three_degenerate);
    out.set("resultant", num(&r.resultant));
    out.set("l_rank", measured(int(r.l_rank), Provenance::Computed));
    out.set("l_injective", r.l_rank == 6);
    out.set("metric_reliable_degree", measured(r.metric_reliable, Provenance::TruncationLimited));
    out.verdict("adapted", r.adapted, "the conformal metric is adapted to the distribution");
    out.verdict("quartic_symmetric", r.symmetric, "the quartic tensor is totally symmetric on D");
    out.verdict("weyl_vanishes_on_d1", r.weyl_vanishes_on_d1, "W(X, Y, Z, .) vanishes for X, Y, Z in the derived distribution");
    facts.three_degenerate = Some(r.three_degenerate);
    facts.l_rank = Some(r.l_rank);
    facts.quartic_zero = Some(r.quartic.is_zero());
    facts.quartic = Some(r.quartic.a.iter().map(|v| v.value()).collect());
    facts.quartic_raw = Some(r.quartic.a.iter().map(raw_scalar).collect());
    Ok(out)
}

/// Rational text for a scalar; floats are rendered through their exact value.
fn raw_scalar<S: Num>(v: &S) -> String {
    match v.value() {
        Value::String(s) => s,
        Value::Float(x) => float_to_rational(x),
        other => other.to_string(),
    }
}

fn float_to_rational(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0".into();
    }
    let mut den: u64 = 1;
    let mut v = x;
    while v.fract() != 0.0 && den < (1u64 << 52) {
        v *= 2.0;
        den *= 2;
    }
    format!("{}/{}", v as i128, den)
}

fn fhol_cmd<S: Num>(cfg: &RunConfig, facts: &mut Facts) -> Result<Outcome, CliError> {
    let Input::Fhol(t) = &cfg.input else { unreachable!() };
    let f = conv::<S>(&inputs::five_variable(&t.f, t.variables.as_deref(), cfg.x_order, "f")?);
    let r = fhol_origin(&f)?;
    let mut out = Outcome::default();
    let mut pt = Table::new();
    let labels = ["q6", "x_q5", "x2_q4", "x3_q3", "x4_q2"];
    for (l, v) in labels.iter().zip(&r.partials) {
        pt.insert((*l).into(), num(v));
    }
    out.set("partials", Value::Table(pt));
    out.set("quartic", quartic_values(&r.quartic.a));
    let nonzero = r.curvature.iter().filter(|c| !c.is_negligible(cfg.tolerance)).count();
    out.set("nonzero_curvature_components", measured(int(nonzero), Provenance::Computed));
    facts.quartic_zero = Some(r.quartic.is_zero());
    facts.quartic = Some(r.quartic.a.iter().map(|v| v.value()).collect());
    facts.quartic_raw = Some(r.quartic.a.iter().map(raw_scalar).collect());
    Ok(out)
}

fn pe_family<S: Num>(p: &crate::config::PeInput, dimension: Option<usize>, order: u32) -> Result<PEFamily<S>, CliError> {
    let (coeffs, is_k) = inputs::pe_family(p, dimension, order)?;
    let c: Vec<JetMatrix<S>> = coeffs.iter().map(conv_matrix).collect();
    Ok(if is_k { PEFamily::from_k(c, p.polynomial)? } else { PEFamily::new(c, p.polynomial)? })
}

fn check_pe_cmd<S: Num>(cfg: &RunConfig, facts: &mut Facts) -> Result<Outcome, CliError> {
    let Input::PeFamily(p) = &cfg.input else { unreachable!() };
    let fam = pe_family::<S>(p, cfg.dimension, cfg.x_order)?;
    let mut out = Outcome::default();
    out.set("dimension", int(fam.d + 1));
    out.set("even", fam.is_even());
    let (_, res) = pe_tractor(&fam)?;
    out.set("seed_tractor_parallel", res.is_negligible(cfg.tolerance));
    let a = pe_ambient(&fam)?;
    let e = pe_extension(&fam, &a)?;
    out.set("d_rt_order", measured(order_value(e.achieved_order), Provenance::of_order(e.achieved_order, e.truncation_limit)));
    out.set("d_rt_truncation_limit", measured(order_value(e.truncation_limit), Provenance::TruncationLimited));
    out.verdict(
        "d_rt_parallel",
        e.achieved_order >= e.truncation_limit,
        format!("d(rt) is parallel to rho-order {} of {}", fmt_order(e.achieved_order), fmt_order(e.truncation_limit)),
    );
    let ric = check_ricci_order_tol(&a, cfg.tolerance)?;
    out.set("ambient_ricci_order", measured(order_value(ric.order), Provenance::of_order(ric.order, ric.truncation_limit)));
    out.set("ambient_ricci_truncation_limit", measured(order_value(ric.truncation_limit), Provenance::TruncationLimited));
    facts.ricci_flat = Some(ric.order >= ric.truncation_limit);
    if let Some(s0) = &p.juhl_s0 {
        let s0 = S::from_q(&inputs::parse_rational(s0, "juhl_s0")?);
        let j = pe_juhl_poincare(&fam, &s0, cfg.x_order)?;
        let ok = j.residual.is_negligible(cfg.tolerance);
        out.set("juhl_residual_reliable_degree", measured(j.residual.reliable(), Provenance::TruncationLimited));
        out.verdict("juhl_einstein", ok, "Ric(g++) + n g++ vanishes within the truncation");
        facts.einstein = Some(ok);
    }
    Ok(out)
}

fn check_cr_cmd<S: Num>(cfg: &RunConfig, facts: &mut Facts) -> Result<Outcome, CliError> {
    let Input::Cr(c) = &cfg.input else { unreachable!() };
    let (n, uq) = inputs::cr_function(c, cfg.dimension, cfg.x_order)?;
    let cr = CRDefiningFunction::new(n, conv::<S>(&uq))?;
    let mut out = Outcome::default();
    out.set("complex_dimension", int(n));
    out.set("levi_signature", Value::Array(vec![int(cr.levi_signature.0), int(cr.levi_signature.1)]));
    out.set("levi_nondegenerate", cr.levi_nondegenerate);
    let j = levi_determinant(&cr)?;
    let one = (&j - &Jet::one(j.space())).is_negligible(cfg.tolerance);
    out.set("levi_determinant_is_one", one);
    out.set("levi_determinant_reliable_degree", measured(j.reliable(), Provenance::TruncationLimited));
    facts.levi_determinant_one = Some(one);
    out.verdict("levi_nondegenerate", cr.levi_nondegenerate, "the Levi form is nondegenerate at the base point");
    if !cr.levi_nondegenerate {
        return Ok(out);
    }
    let fa = fefferman_ambient(&cr, cfg.x_order)?;
    let ric = fa.ricci()?;
    let (v, rel) = fa.ricci_valuation()?;
    let flat = ric.is_negligible(cfg.tolerance);
    out.set(
        "ricci_valuation",
        measured(order_value(v), if v == u32::MAX { Provenance::TruncationLimited } else { Provenance::Computed }),
    );
    out.set("ricci_reliable_degree", measured(rel, Provenance::TruncationLimited));
    out.set("ricci_vanishes", flat);
    facts.ricci_flat = Some(flat);
    let dk: TensorJet<S> = fa.kahler_form_derivative();
    let parallel = dk.is_negligible(cfg.tolerance);
    out.set("kahler_form_parallel", parallel);
    out.set("kahler_derivative_reliable_degree", measured(dk.reliable(), Provenance::TruncationLimited));
    out.verdict("kahler_form_parallel", parallel, "the Kahler form of the ambient metric is parallel");
    let det = fa.normalized_hessian_determinant()?;
    let ok = (&det + &fa.j_u).is_negligible(cfg.tolerance);
    out.verdict("hessian_determinant_identity", ok, "det of the complex Hessian equals -|z0|^(2n) J(u)");
    Ok(out)
}
