//! Problem files: TOML with a `[context]` table and one primary payload.
//!
//! ```toml
//! lagrangian = "1/2*u_{1}^2 + u^3"      # or: source = ["u_{1,1}"], or: eta = ["u | dx2"]
//! section = ["x^2"]                      # residual_on_section input
//! points = [[0.0], [0.5]]
//! multiplier = [["-1"]]
//!
//! [context]
//! order = 1
//! base = ["x"]
//! fields = ["u"]
//!
//! [iso]                                  # x̄ = A x + b, ȳ = φ(x, y)
//! matrix = [[2]]
//! shift = [0]
//! fiber = ["u + u^2"]
//!
//! [probe]                                # first-variation input
//! section = ["x^2"]
//! direction = ["x^2*(1 - x)^2"]
//!
//! [options]
//! tolerance = 1e-6
//! verbose = false
//! skip_variational_check = false
//! seed = 7
//! nodes = 32
//! step = 1e-4
//! ```

use serde::Deserialize;
use thiserror::Error;

use crate::expr::{Expr, Rational};
use crate::forms::{DiffForm, FiberedIso, FormsError};
use crate::jet::{JetContext, JetError, SectionSpec};
use crate::parse::{parse_expr, parse_form_term, parse_rational, ParseError};
use crate::variational::{Lagrangian, MultiplierMatrix, SourceForm, VariationalError};

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("malformed problem file: {0}")]
    Format(String),
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("in {field}: {error}")]
    Parse { field: String, error: ParseError },
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Variational(#[from] VariationalError),
    #[error(transparent)]
    Forms(#[from] FormsError),
    #[error(transparent)]
    Numeric(#[from] crate::numeric::NumericError),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    lagrangian: Option<String>,
    source: Option<Vec<String>>,
    eta: Option<Vec<String>>,
    section: Option<Vec<String>>,
    points: Option<Vec<Vec<f64>>>,
    multiplier: Option<Vec<Vec<String>>>,
    context: RawContext,
    iso: Option<RawIso>,
    probe: Option<RawProbe>,
    #[serde(default)]
    options: Options,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawContext {
    n: Option<usize>,
    m: Option<usize>,
    order: usize,
    base: Option<Vec<String>>,
    fields: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawNumber {
    Int(i64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIso {
    matrix: Vec<Vec<RawNumber>>,
    shift: Option<Vec<RawNumber>>,
    fiber: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProbe {
    section: Vec<String>,
    direction: Vec<String>,
}

/// Options block; command-line flags override these.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Options {
    pub tolerance: Option<f64>,
    pub verbose: Option<bool>,
    pub skip_variational_check: Option<bool>,
    pub seed: Option<u64>,
    pub nodes: Option<usize>,
    pub step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Lagrangian(Lagrangian),
    Source(SourceForm),
    Eta(DiffForm),
}

#[derive(Debug, Clone)]
pub struct ProblemFile {
    pub ctx: JetContext,
    pub payload: Payload,
    pub iso: Option<FiberedIso>,
    pub section: Option<SectionSpec>,
    pub probe: Option<(SectionSpec, SectionSpec)>,
    pub points: Vec<Vec<f64>>,
    pub multiplier: Option<MultiplierMatrix>,
    pub options: Options,
    pub warnings: Vec<String>,
}

struct Loader<'a> {
    ctx: &'a JetContext,
    warnings: Vec<String>,
}

impl Loader<'_> {
    fn expr(&mut self, field: &str, src: &str) -> Result<Expr, ProblemError> {
        let parsed = parse_expr(src, self.ctx).map_err(|error| ProblemError::Parse { field: field.into(), error })?;
        self.warnings.extend(parsed.warnings.into_iter().map(|w| format!("{field}: {w}")));
        Ok(parsed.expr)
    }

    fn exprs(&mut self, field: &str, srcs: &[String]) -> Result<Vec<Expr>, ProblemError> {
        srcs.iter().enumerate().map(|(i, s)| self.expr(&format!("{field}[{i}]"), s)).collect()
    }

    fn section(&mut self, field: &str, srcs: &[String]) -> Result<SectionSpec, ProblemError> {
        let comps = self.exprs(field, srcs)?;
        Ok(SectionSpec::new(comps, self.ctx)?)
    }

    fn number(&self, field: &str, v: &RawNumber) -> Result<Rational, ProblemError> {
        match v {
            RawNumber::Int(i) => Ok(Rational::from_integer((*i).into())),
            RawNumber::Text(s) => parse_rational(s)
                .ok_or_else(|| ProblemError::Invalid(format!("{field}: {s:?} is not a rational number"))),
        }
    }
}

impl ProblemFile {
    /// Parses a problem file; `ceiling` overrides the prolongation ceiling.
    pub fn parse(text: &str, ceiling: Option<usize>) -> Result<Self, ProblemError> {
        let raw: RawProblem = toml::from_str(text).map_err(|e| ProblemError::Format(e.to_string()))?;
        let ctx = build_context(&raw.context, ceiling)?;
        let mut loader = Loader { ctx: &ctx, warnings: Vec::new() };

        let payloads =
            [raw.lagrangian.is_some(), raw.source.is_some(), raw.eta.is_some()].iter().filter(|b| **b).count();
        if payloads != 1 {
            return Err(ProblemError::Invalid("exactly one of `lagrangian`, `source`, `eta` must be given".into()));
        }
        let payload = if let Some(l) = &raw.lagrangian {
            Payload::Lagrangian(Lagrangian::new(loader.expr("lagrangian", l)?, &ctx)?)
        } else if let Some(s) = &raw.source {
            Payload::Source(SourceForm::new(loader.exprs("source", s)?, &ctx)?)
        } else {
            let terms = raw.eta.as_deref().unwrap_or_default();
            let mut eta = DiffForm::zero(0);
            for (i, t) in terms.iter().enumerate() {
                let (form, w) = parse_form_term(t, &ctx)
                    .map_err(|error| ProblemError::Parse { field: format!("eta[{i}]"), error })?;
                loader.warnings.extend(w);
                eta = eta.add(&form);
            }
            Payload::Eta(eta)
        };

        let iso = match &raw.iso {
            None => None,
            Some(iso) => {
                let matrix = iso
                    .matrix
                    .iter()
                    .map(|row| row.iter().map(|v| loader.number("iso.matrix", v)).collect())
                    .collect::<Result<Vec<Vec<_>>, _>>()?;
                let shift = match &iso.shift {
                    Some(s) => s.iter().map(|v| loader.number("iso.shift", v)).collect::<Result<Vec<_>, _>>()?,
                    None => vec![Rational::from_integer(0.into()); ctx.n()],
                };
                let fiber = loader.exprs("iso.fiber", &iso.fiber)?;
                Some(FiberedIso::new(matrix, shift, fiber, &ctx)?)
            }
        };
        let section = match &raw.section {
            Some(s) => Some(loader.section("section", s)?),
            None => None,
        };
        let probe = match &raw.probe {
            Some(p) => {
                Some((loader.section("probe.section", &p.section)?, loader.section("probe.direction", &p.direction)?))
            }
            None => None,
        };
        let multiplier = match &raw.multiplier {
            Some(rows) => {
                let rows = rows
                    .iter()
                    .enumerate()
                    .map(|(i, r)| loader.exprs(&format!("multiplier[{i}]"), r))
                    .collect::<Result<Vec<_>, _>>()?;
                Some(MultiplierMatrix::new(rows, &ctx)?)
            }
            None => None,
        };
        let warnings = loader.warnings;
        Ok(ProblemFile {
            ctx,
            payload,
            iso,
            section,
            probe,
            points: raw.points.unwrap_or_default(),
            multiplier,
            options: raw.options,
            warnings,
        })
    }
}

fn build_context(raw: &RawContext, ceiling: Option<usize>) -> Result<JetContext, ProblemError> {
    let n = raw.n.or(raw.base.as_ref().map(Vec::len)).unwrap_or(1);
    let m = raw.m.or(raw.fields.as_ref().map(Vec::len)).unwrap_or(1);
    let defaults = JetContext::new(n, m, 0)?;
    let base = raw.base.clone().unwrap_or_else(|| defaults.base_names().to_vec());
    let fields = raw.fields.clone().unwrap_or_else(|| defaults.field_names().to_vec());
    if base.len() != n || fields.len() != m {
        return Err(ProblemError::Invalid("context names disagree with n or m".into()));
    }
    let ceiling = ceiling.unwrap_or(crate::jet::DEFAULT_ORDER_CEILING);
    if raw.order > ceiling {
        return Err(JetError::OrderOverflow { order: raw.order, ceiling }.into());
    }
    let ctx = JetContext::with_names(0, base, fields)?.with_ceiling(ceiling);
    Ok(ctx.with_order(raw.order))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_lagrangian_problem() {
        let text = r#"
lagrangian = "1/2*u_{1}^2"
[context]
order = 1
base = ["x"]
fields = ["u"]
"#;
        let p = ProblemFile::parse(text, None).unwrap();
        assert_eq!(p.ctx.n(), 1);
        let Payload::Lagrangian(l) = &p.payload else { panic!() };
        assert_eq!(l.density(), &(Expr::ratio(1, 2) * p.ctx.y(1, &[1]).pow(2).unwrap()));
    }

    #[test]
    fn loads_iso_and_eta() {
        let text = r#"
eta = ["u | dz", "x*z | du"]
[context]
order = 0
base = ["x", "z"]
fields = ["u"]
[iso]
matrix = [[2, 0], ["1/2", 1]]
fiber = ["u + u^2"]
"#;
        let p = ProblemFile::parse(text, None).unwrap();
        let Payload::Eta(eta) = &p.payload else { panic!() };
        assert_eq!(eta.degree(), Some(1));
        assert!(p.iso.is_some());
    }

    #[test]
    fn rejects_bad_files() {
        let two_payloads = r#"
lagrangian = "u"
source = ["u"]
[context]
order = 1
"#;
        assert!(matches!(ProblemFile::parse(two_payloads, None), Err(ProblemError::Invalid(_))));
        let bad_expr = r#"
lagrangian = "u +"
[context]
order = 1
fields = ["u"]
"#;
        assert!(matches!(ProblemFile::parse(bad_expr, None), Err(ProblemError::Parse { .. })));
        let unknown_key = r#"
lagrangian = "y"
wat = 1
[context]
order = 1
"#;
        assert!(matches!(ProblemFile::parse(unknown_key, None), Err(ProblemError::Format(_))));
        let high = r#"
lagrangian = "y"
[context]
order = 5
"#;
        assert!(ProblemFile::parse(high, Some(4)).is_err());
        assert!(ProblemFile::parse(high, None).is_ok());
    }
}
