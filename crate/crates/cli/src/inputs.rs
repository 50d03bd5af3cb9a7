//! Conversion of config input sections into exact jets.

use std::sync::Arc;

use g2ambient_core::linalg::JetMatrix;
use g2ambient_core::poly::parse_jet_bound;
use g2ambient_core::{Jet, JetSpace, Q};

use crate::config::{CrInput, MetricInput, PeInput};
use crate::CliError;

fn parse_q(s: &str, what: &str) -> Result<Q, CliError> {
    let sp = JetSpace::get(1, 0);
    let j = parse_jet_bound(s, &[], &sp).map_err(|e| CliError::Config(format!("{what}: {e}")))?;
    Ok(j.constant_term())
}

pub fn parse_rational(s: &str, what: &str) -> Result<Q, CliError> {
    parse_q(s, what)
}

fn default_names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Bindings `name_i ↦ c_i + x_i` on `sp`.
fn bindings(names: &[String], center: Option<&[String]>, sp: &Arc<JetSpace>) -> Result<Vec<(String, Jet<Q>)>, CliError> {
    let mut out = Vec::with_capacity(names.len());
    if let Some(c) = center {
        if c.len() != names.len() {
            return Err(CliError::Config(format!("center has {} entries for {} coordinates", c.len(), names.len())));
        }
    }
    for (i, n) in names.iter().enumerate() {
        let mut j = Jet::var(sp, i);
        if let Some(c) = center {
            j = j.add_scalar(&parse_q(&c[i], "center")?);
        }
        out.push((n.clone(), j));
    }
    Ok(out)
}

fn check_names(names: &[String]) -> Result<(), CliError> {
    for (i, a) in names.iter().enumerate() {
        if a.is_empty() || !a.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_') {
            return Err(CliError::Config(format!("'{a}' is not a valid variable name")));
        }
        if names[..i].contains(a) {
            return Err(CliError::Config(format!("variable '{a}' is listed twice")));
        }
    }
    Ok(())
}

fn parse_expr(text: &str, b: &[(String, Jet<Q>)], sp: &Arc<JetSpace>, what: &str) -> Result<Jet<Q>, CliError> {
    let bb: Vec<(&str, Jet<Q>)> = b.iter().map(|(n, j)| (n.as_str(), j.clone())).collect();
    parse_jet_bound(text, &bb, sp).map_err(|e| CliError::Config(format!("{what}: {e}")))
}

/// Metric components as exact jets, with their coordinate names.
pub fn metric(m: &MetricInput, dimension: Option<usize>, order: u32) -> Result<(JetMatrix<Q>, Vec<String>), CliError> {
    let n = match (&m.matrix, &m.diagonal) {
        (Some(_), Some(_)) => return Err(CliError::Config("give either `matrix` or `diagonal`, not both".into())),
        (Some(mm), None) => mm.len(),
        (None, Some(d)) => d.len(),
        (None, None) => return Err(CliError::Config("the metric needs `matrix` or `diagonal`".into())),
    };
    if let Some(d) = dimension {
        if d != n {
            return Err(CliError::Config(format!("dimension = {d} but the metric has {n} rows")));
        }
    }
    if n == 0 {
        return Err(CliError::Config("empty metric".into()));
    }
    let names = m.variables.clone().unwrap_or_else(|| default_names("x", n));
    if names.len() != n {
        return Err(CliError::Config(format!("{} variable names for a {n}-dimensional metric", names.len())));
    }
    check_names(&names)?;
    let sp = JetSpace::get(n, order);
    let b = bindings(&names, m.center.as_deref(), &sp)?;
    let mut g = vec![vec![Jet::zero(&sp); n]; n];
    if let Some(mm) = &m.matrix {
        for (i, row) in mm.iter().enumerate() {
            if row.len() != n {
                return Err(CliError::Config(format!("metric row {} has {} entries, expected {n}", i + 1, row.len())));
            }
            for (j, e) in row.iter().enumerate() {
                g[i][j] = parse_expr(e, &b, &sp, &format!("metric entry ({},{})", i + 1, j + 1))?;
            }
        }
        for i in 0..n {
            for j in 0..i {
                if g[i][j] != g[j][i] {
                    return Err(CliError::Config(format!("metric is not symmetric at ({},{})", i + 1, j + 1)));
                }
            }
        }
    }
    if let Some(d) = &m.diagonal {
        for (i, e) in d.iter().enumerate() {
            g[i][i] = parse_expr(e, &b, &sp, &format!("metric diagonal entry {}", i + 1))?;
        }
    }
    if let Some(f) = &m.conformal_factor {
        let c = parse_expr(f, &b, &sp, "conformal_factor")?;
        for row in g.iter_mut() {
            for e in row.iter_mut() {
                *e = &*e * &c;
            }
        }
    }
    Ok((g, names))
}

/// A scalar expression in the coordinates of a metric input.
pub fn scalar_on_metric(text: &str, m: &MetricInput, names: &[String], order: u32, what: &str) -> Result<Jet<Q>, CliError> {
    let sp = JetSpace::get(names.len(), order);
    let b = bindings(names, m.center.as_deref(), &sp)?;
    parse_expr(text, &b, &sp, what)
}

/// `F(x, y, z, p, q)` or `f(x, y, z, p, q)` as an exact jet.
pub fn five_variable(text: &str, variables: Option<&[String]>, order: u32, what: &str) -> Result<Jet<Q>, CliError> {
    let names: Vec<String> = match variables {
        Some(v) => v.to_vec(),
        None => ["x", "y", "z", "p", "q"].iter().map(|s| s.to_string()).collect(),
    };
    if names.len() != 5 {
        return Err(CliError::Config(format!("{what} needs five variable names, got {}", names.len())));
    }
    check_names(&names)?;
    let sp = JetSpace::get(5, order);
    let b = bindings(&names, None, &sp)?;
    parse_expr(text, &b, &sp, what)
}

/// Family coefficients: `(coefficients, is_k_form)` with `d = dim Σ`.
pub fn pe_family(p: &PeInput, dimension: Option<usize>, order: u32) -> Result<(Vec<JetMatrix<Q>>, bool), CliError> {
    let (raw, is_k) = match (&p.k, &p.h) {
        (Some(k), None) => (k, true),
        (None, Some(h)) => (h, false),
        _ => return Err(CliError::Config("the PE family needs exactly one of `k` or `h`".into())),
    };
    let first = raw.first().ok_or_else(|| CliError::Config("the PE family has no coefficients".into()))?;
    let d = first.len();
    if let Some(n) = dimension {
        if n != d + 1 {
            return Err(CliError::Config(format!("dimension = {n} but the family lives on a {d}-dimensional slice (n = {})", d + 1)));
        }
    }
    let names = p.variables.clone().unwrap_or_else(|| default_names("y", d));
    if names.len() != d {
        return Err(CliError::Config(format!("{} variable names for a {d}-dimensional slice", names.len())));
    }
    check_names(&names)?;
    let sp = JetSpace::get(d, order);
    let b = bindings(&names, None, &sp)?;
    let mut out = Vec::with_capacity(raw.len());
    for (m, mat) in raw.iter().enumerate() {
        if mat.len() != d || mat.iter().any(|r| r.len() != d) {
            return Err(CliError::Config(format!("family coefficient {m} is not {d}×{d}")));
        }
        let mut c = vec![vec![Jet::zero(&sp); d]; d];
        for (i, row) in mat.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                c[i][j] = parse_expr(e, &b, &sp, &format!("family coefficient {m} entry ({},{})", i + 1, j + 1))?;
            }
        }
        out.push(c);
    }
    Ok((out, is_k))
}

/// `(n, u)` with `u` a jet in `(z, z̄)` about the base point.
pub fn cr_function(c: &CrInput, dimension: Option<usize>, order: u32) -> Result<(usize, Jet<Q>), CliError> {
    let n = match (&c.variables, dimension) {
        (Some(v), _) => {
            if v.len() % 2 != 0 {
                return Err(CliError::Config("CR variables must list z1..zn then their conjugates".into()));
            }
            v.len() / 2
        }
        (None, Some(d)) => d,
        (None, None) => return Err(CliError::Config("set `dimension` (complex dimension) or the CR variable names".into())),
    };
    if let Some(d) = dimension {
        if d != n {
            return Err(CliError::Config(format!("dimension = {d} but {} CR variables were given", 2 * n)));
        }
    }
    let names: Vec<String> = match &c.variables {
        Some(v) => v.clone(),
        None => default_names("z", n).into_iter().chain(default_names("zb", n)).collect(),
    };
    check_names(&names)?;
    let center: Option<Vec<String>> = match &c.center {
        Some(v) if v.len() != n => {
            return Err(CliError::Config(format!("center has {} entries for complex dimension {n}", v.len())))
        }
        Some(v) => Some(v.iter().chain(v.iter()).cloned().collect()),
        None => None,
    };
    let sp = JetSpace::get(2 * n, order);
    let b = bindings(&names, center.as_deref(), &sp)?;
    Ok((n, parse_expr(&c.u, &b, &sp, "CR defining function")?))
}
