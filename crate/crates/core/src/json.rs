//! JSON documents for states, channels, certificates and reports.
//!
//! Documents are built as [`serde_json::Value`] trees, whose maps keep keys
//! sorted, and printed with every float at 17 significant digits so that
//! output is byte-stable and round-trips exactly.

use std::io;

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Value};

use crate::channel::{Classification, GaussianChannel, IgoSpec};
use crate::coherence::CoherenceReport;
use crate::equivalence::{EquivalenceVerdict, IncoherentUnitary, Side};
use crate::error::{Error, Result};
use crate::scalar::Float;
use crate::state::GaussianState;

/// `%.17g`: shortest of fixed and exponent notation with trailing zeros
/// removed.
pub fn format_g17(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Wraps another formatter and prints floats via [`format_g17`].
struct G17<F>(F);

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
            self.0.$name(w $(, $arg)*)
        })*
    };
}

impl<F: Formatter> Formatter for G17<F> {
    delegate!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        end_object_key(),
        begin_object_value(),
        end_object_value(),
    );

    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format_g17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }
}

/// Serializes a document, compact or indented.
pub fn to_string(value: &Value, pretty: bool) -> String {
    use serde::Serialize;
    let mut out = Vec::new();
    let result = if pretty {
        value.serialize(&mut serde_json::Serializer::with_formatter(&mut out, G17(PrettyFormatter::new())))
    } else {
        value.serialize(&mut serde_json::Serializer::with_formatter(&mut out, G17(serde_json::ser::CompactFormatter)))
    };
    result.expect("writing to a Vec cannot fail");
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

fn num<T: Float>(x: T) -> Value {
    Value::from(x.as_f64())
}

fn vector<T: Float>(v: impl IntoIterator<Item = T>) -> Value {
    Value::Array(v.into_iter().map(num).collect())
}

fn matrix<T: Float>(m: &DMatrix<T>) -> Value {
    Value::Array(m.row_iter().map(|r| vector(r.iter().copied())).collect())
}

fn parse<'a, D: Deserialize<'a>>(text: &'a str) -> Result<D> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn to_matrix<T: Float>(rows: &[Vec<f64>], n: usize, what: &str) -> Result<DMatrix<T>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Shape(format!("{what} must be {n}x{n}")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| T::lit(rows[i][j])))
}

fn to_vector<T: Float>(v: &[f64], n: usize, what: &str) -> Result<DVector<T>> {
    if v.len() != n {
        return Err(Error::Shape(format!("{what} has length {}, expected {n}", v.len())));
    }
    Ok(DVector::from_iterator(n, v.iter().map(|&x| T::lit(x))))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StateDoc {
    modes: usize,
    mean: Vec<f64>,
    cov: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelDoc {
    modes: usize,
    #[serde(rename = "T")]
    t: Vec<Vec<f64>>,
    #[serde(rename = "N")]
    n: Vec<Vec<f64>>,
    shift: Vec<f64>,
}

#[derive(Deserialize)]
struct UnitaryDoc {
    perm: Vec<usize>,
    angles: Vec<f64>,
}

pub fn state_to_json<T: Float>(state: &GaussianState<T>) -> Value {
    json!({
        "modes": state.modes(),
        "mean": vector(state.mean().iter().copied()),
        "cov": matrix(state.cov()),
    })
}

/// Parses `{"modes", "mean", "cov"}` and validates the state.
pub fn state_from_json<T: Float>(text: &str, tol: T) -> Result<GaussianState<T>> {
    let doc: StateDoc = parse(text)?;
    if doc.modes == 0 {
        return Err(Error::Shape("modes must be positive".into()));
    }
    let n = 2 * doc.modes;
    GaussianState::validate(to_matrix(&doc.cov, n, "cov")?, to_vector(&doc.mean, n, "mean")?, tol)
}

pub fn channel_to_json<T: Float>(channel: &GaussianChannel<T>) -> Value {
    json!({
        "modes": channel.modes(),
        "T": matrix(channel.t()),
        "N": matrix(channel.n()),
        "shift": vector(channel.shift().iter().copied()),
    })
}

/// Parses `{"modes", "T", "N", "shift"}` and validates complete positivity.
pub fn channel_from_json<T: Float>(text: &str, tol: T) -> Result<GaussianChannel<T>> {
    let doc: ChannelDoc = parse(text)?;
    if doc.modes == 0 {
        return Err(Error::Shape("modes must be positive".into()));
    }
    let n = 2 * doc.modes;
    GaussianChannel::validate(
        to_matrix(&doc.t, n, "T")?,
        to_matrix(&doc.n, n, "N")?,
        to_vector(&doc.shift, n, "shift")?,
        tol,
    )
}

/// `{"perm", "angles"}` with zero-based mode indices.
pub fn unitary_to_json<T: Float>(u: &IncoherentUnitary<T>) -> Value {
    json!({ "perm": u.perm(), "angles": vector(u.angles().iter().copied()) })
}

pub fn unitary_from_json<T: Float>(text: &str) -> Result<IncoherentUnitary<T>> {
    let doc: UnitaryDoc = parse(text)?;
    IncoherentUnitary::new(doc.perm, doc.angles.into_iter().map(T::lit).collect())
}

pub fn report_to_json<T: Float>(report: &CoherenceReport<T>) -> Value {
    json!({
        "n_bar": vector(report.n_bar.iter().copied()),
        "entropy": num(report.entropy),
        "c_rel_ent": num(report.c_rel_ent),
        "reference": state_to_json(&report.reference),
    })
}

pub fn verdict_to_json<T: Float>(verdict: &EquivalenceVerdict<T>) -> Value {
    let label = verdict.label();
    match verdict {
        EquivalenceVerdict::Equivalent { certificate, residual } => json!({
            "verdict": label,
            "perm": certificate.perm(),
            "angles": vector(certificate.angles().iter().copied()),
            "residual": num(*residual),
        }),
        EquivalenceVerdict::NotEquivalent { witness, best_residual } => json!({
            "verdict": label,
            "witness": witness.name(),
            "best_residual": best_residual.map(num),
        }),
        EquivalenceVerdict::AllIncoherent => json!({ "verdict": label }),
        EquivalenceVerdict::HypothesisViolated { side, mode, reason } => json!({
            "verdict": label,
            "side": match side { Side::First => "first", Side::Second => "second" },
            "mode": mode,
            "reason": reason,
        }),
    }
}

pub fn igo_spec_to_json<T: Float>(spec: &IgoSpec<T>) -> Value {
    let blocks: Vec<Value> = spec
        .blocks
        .iter()
        .map(|b| {
            json!({
                "source": b.source,
                "target": b.target,
                "t": num(b.scale),
                "O": [[num(b.orth[(0, 0)]), num(b.orth[(0, 1)])], [num(b.orth[(1, 0)]), num(b.orth[(1, 1)])]],
            })
        })
        .collect();
    json!({ "blocks": blocks, "noise": vector(spec.noise.iter().copied()), "strict": spec.strict })
}

pub fn classification_to_json<T: Float>(c: &Classification<T>) -> Value {
    match c {
        Classification::NotIncoherent { reason } => json!({ "verdict": c.label(), "reason": reason }),
        Classification::Incoherent(spec) | Classification::StrictlyIncoherent(spec) => {
            json!({ "verdict": c.label(), "spec": igo_spec_to_json(spec) })
        }
    }
}
