//! JSON input formats. Numbers are written as strings `"p/q"`, `"p"` or
//! decimals (`"0.25"`), all read as exact rationals and converted when the
//! float engine runs. Serialization emits the canonical `"p/q"` form, so a
//! parse, serialize, parse cycle is the identity.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::clt::SequenceSpec;
use crate::error::{Error, Result};
use crate::lahalukacs::{constant_variance_phi_law, linear_variance_phi_law};
use crate::laws::{
    atomic_moments, marchenko_pastur_moments, point_mass, semicircle_moments, symmetric_bernoulli,
    AtomicMeasure, MomentSequence, TwoStateLaw,
};
use crate::scalar::{Rational, Scalar};

/// An exact number read from JSON.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Number(pub Rational);

impl Number {
    pub fn get<T: Scalar>(&self) -> T {
        T::from_rational(&self.0)
    }
}

impl From<Rational> for Number {
    fn from(q: Rational) -> Self {
        Number(q)
    }
}

impl FromStr for Number {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some((int, frac)) = t.split_once('.') {
            let bad = || Error::Parse(format!("`{s}` is not a decimal number"));
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let negative = int.starts_with('-');
            let whole = BigInt::from_str(if int.is_empty() || int == "-" {
                "0"
            } else {
                int
            })
            .map_err(|_| bad())?;
            let scale = BigInt::from(10u32).pow(frac.len() as u32);
            let mut numer = whole.abs() * &scale + BigInt::from_str(frac).map_err(|_| bad())?;
            if negative {
                numer = -numer;
            }
            return Ok(Number(Rational::new(numer, scale)));
        }
        Ok(Number(<Rational as Scalar>::parse_scalar(t)?))
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.to_repr())
    }
}

impl Serialize for Number {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_repr())
    }
}

impl<'de> Deserialize<'de> for Number {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Number;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or a string \"p/q\"")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Number, E> {
                v.parse().map_err(|e: Error| E::custom(e))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Number, E> {
                Ok(Number(Rational::from_integer(v.into())))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Number, E> {
                Ok(Number(Rational::from_integer(v.into())))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Number, E> {
                Rational::from_float(v)
                    .map(Number)
                    .ok_or_else(|| E::custom("non-finite number"))
            }
        }
        d.deserialize_any(V)
    }
}

/// A single-state law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLaw", into = "RawLaw")]
pub enum LawSpec {
    Semicircle {
        variance: Number,
    },
    Mp {
        lambda: Number,
    },
    Atomic {
        atoms: Vec<(Number, Number)>,
    },
    /// Symmetric Bernoulli on `{-1, 1}`.
    Bernoulli,
    PointMass {
        at: Number,
    },
    /// Explicit moments `m_0 = 1, m_1, ...`; must reach the requested order.
    Moments {
        moments: Vec<Number>,
    },
}

impl LawSpec {
    pub fn moments<T: Scalar>(&self, order: usize) -> Result<MomentSequence<T>> {
        match self {
            LawSpec::Semicircle { variance } => semicircle_moments(&variance.get(), order),
            LawSpec::Mp { lambda } => marchenko_pastur_moments(&lambda.get(), order),
            LawSpec::Atomic { atoms } => {
                let atoms = atoms.iter().map(|(w, x)| (w.get(), x.get())).collect();
                Ok(atomic_moments(&AtomicMeasure::new(atoms)?, order))
            }
            LawSpec::Bernoulli => Ok(symmetric_bernoulli(order)),
            LawSpec::PointMass { at } => Ok(point_mass(&at.get(), order)),
            LawSpec::Moments { moments } => {
                if moments.len() < order + 1 {
                    return Err(Error::OrderExceeded {
                        requested: order,
                        supported: moments.len().saturating_sub(1),
                    });
                }
                MomentSequence::new(moments[..=order].iter().map(Number::get).collect())
            }
        }
    }

    /// An exact moment list, for echoing computed laws back as input.
    pub fn from_moments(m: &MomentSequence<Rational>) -> Self {
        LawSpec::Moments {
            moments: m.moments().iter().cloned().map(Number).collect(),
        }
    }
}

/// A law pair `(μ, ν)` = (φ-law, ψ-law).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPair", into = "RawPair")]
pub enum PairSpec {
    Pair {
        phi: LawSpec,
        psi: LawSpec,
    },
    /// `μ = ν`.
    Single {
        law: LawSpec,
    },
    /// ψ-law `nu`, φ-law with `R_2 = 1` and all other `R_n = 0`.
    ConstantVariance {
        nu: LawSpec,
    },
    /// ψ-law `nu`, φ-law with `R_n = a^(n-2)` for `n >= 2`.
    LinearVariance {
        nu: LawSpec,
        a: Number,
    },
}

impl PairSpec {
    pub fn law<T: Scalar>(&self, order: usize) -> Result<TwoStateLaw<T>> {
        match self {
            PairSpec::Pair { phi, psi } => {
                TwoStateLaw::new(phi.moments(order)?, psi.moments(order)?)
            }
            PairSpec::Single { law } => Ok(TwoStateLaw::single_state(law.moments(order)?)),
            PairSpec::ConstantVariance { nu } => constant_variance_phi_law(&nu.moments(order)?),
            PairSpec::LinearVariance { nu, a } => {
                linear_variance_phi_law(&nu.moments(order)?, &a.get())
            }
        }
    }

    pub fn from_law(l: &TwoStateLaw<Rational>) -> Self {
        PairSpec::Pair {
            phi: LawSpec::from_moments(l.phi()),
            psi: LawSpec::from_moments(l.psi()),
        }
    }
}

// Flat mirrors of the tagged forms; deserializing through a plain struct
// keeps field paths in error messages.

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum LawType {
    Semicircle,
    Mp,
    Atomic,
    Bernoulli,
    PointMass,
    Moments,
}

#[derive(Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLaw {
    #[serde(rename = "type")]
    kind: Option<LawType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    variance: Option<Number>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda: Option<Number>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    atoms: Option<Vec<(Number, Number)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    at: Option<Number>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    moments: Option<Vec<Number>>,
}

fn required<V>(v: Option<V>, field: &str, kind: &str) -> std::result::Result<V, String> {
    v.ok_or_else(|| format!("missing field `{field}` for type `{kind}`"))
}

fn unexpected(present: &[(&str, bool)], kind: &str) -> std::result::Result<(), String> {
    match present.iter().find(|(_, p)| *p) {
        Some((field, _)) => Err(format!("field `{field}` does not apply to type `{kind}`")),
        None => Ok(()),
    }
}

impl TryFrom<RawLaw> for LawSpec {
    type Error = String;

    fn try_from(r: RawLaw) -> std::result::Result<Self, String> {
        let kind = r.kind.ok_or("missing field `type`")?;
        let name = serde_json::to_value(kind)
            .unwrap()
            .as_str()
            .unwrap_or_default()
            .to_owned();
        let fields = [
            (
                "variance",
                r.variance.is_some() && kind != LawType::Semicircle,
            ),
            ("lambda", r.lambda.is_some() && kind != LawType::Mp),
            ("atoms", r.atoms.is_some() && kind != LawType::Atomic),
            ("at", r.at.is_some() && kind != LawType::PointMass),
            ("moments", r.moments.is_some() && kind != LawType::Moments),
        ];
        unexpected(&fields, &name)?;
        Ok(match kind {
            LawType::Semicircle => LawSpec::Semicircle {
                variance: required(r.variance, "variance", &name)?,
            },
            LawType::Mp => LawSpec::Mp {
                lambda: required(r.lambda, "lambda", &name)?,
            },
            LawType::Atomic => LawSpec::Atomic {
                atoms: required(r.atoms, "atoms", &name)?,
            },
            LawType::Bernoulli => LawSpec::Bernoulli,
            LawType::PointMass => LawSpec::PointMass {
                at: required(r.at, "at", &name)?,
            },
            LawType::Moments => LawSpec::Moments {
                moments: required(r.moments, "moments", &name)?,
            },
        })
    }
}

impl From<LawSpec> for RawLaw {
    fn from(l: LawSpec) -> Self {
        match l {
            LawSpec::Semicircle { variance } => RawLaw {
                kind: Some(LawType::Semicircle),
                variance: Some(variance),
                ..Default::default()
            },
            LawSpec::Mp { lambda } => RawLaw {
                kind: Some(LawType::Mp),
                lambda: Some(lambda),
                ..Default::default()
            },
            LawSpec::Atomic { atoms } => RawLaw {
                kind: Some(LawType::Atomic),
                atoms: Some(atoms),
                ..Default::default()
            },
            LawSpec::Bernoulli => RawLaw {
                kind: Some(LawType::Bernoulli),
                ..Default::default()
            },
            LawSpec::PointMass { at } => RawLaw {
                kind: Some(LawType::PointMass),
                at: Some(at),
                ..Default::default()
            },
            LawSpec::Moments { moments } => RawLaw {
                kind: Some(LawType::Moments),
                moments: Some(moments),
                ..Default::default()
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum PairType {
    Pair,
    Single,
    ConstantVariance,
    LinearVariance,
}

#[derive(Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    #[serde(rename = "type")]
    kind: Option<PairType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phi: Option<LawSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    psi: Option<LawSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    law: Option<LawSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nu: Option<LawSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<Number>,
}

impl TryFrom<RawPair> for PairSpec {
    type Error = String;

    fn try_from(r: RawPair) -> std::result::Result<Self, String> {
        let kind = r.kind.ok_or("missing field `type`")?;
        let name = serde_json::to_value(kind)
            .unwrap()
            .as_str()
            .unwrap_or_default()
            .to_owned();
        let pair = kind == PairType::Pair;
        let with_nu = matches!(kind, PairType::ConstantVariance | PairType::LinearVariance);
        let fields = [
            ("phi", r.phi.is_some() && !pair),
            ("psi", r.psi.is_some() && !pair),
            ("law", r.law.is_some() && kind != PairType::Single),
            ("nu", r.nu.is_some() && !with_nu),
            ("a", r.a.is_some() && kind != PairType::LinearVariance),
        ];
        unexpected(&fields, &name)?;
        Ok(match kind {
            PairType::Pair => PairSpec::Pair {
                phi: required(r.phi, "phi", &name)?,
                psi: required(r.psi, "psi", &name)?,
            },
            PairType::Single => PairSpec::Single {
                law: required(r.law, "law", &name)?,
            },
            PairType::ConstantVariance => PairSpec::ConstantVariance {
                nu: required(r.nu, "nu", &name)?,
            },
            PairType::LinearVariance => PairSpec::LinearVariance {
                nu: required(r.nu, "nu", &name)?,
                a: required(r.a, "a", &name)?,
            },
        })
    }
}

impl From<PairSpec> for RawPair {
    fn from(p: PairSpec) -> Self {
        match p {
            PairSpec::Pair { phi, psi } => RawPair {
                kind: Some(PairType::Pair),
                phi: Some(phi),
                psi: Some(psi),
                ..Default::default()
            },
            PairSpec::Single { law } => RawPair {
                kind: Some(PairType::Single),
                law: Some(law),
                ..Default::default()
            },
            PairSpec::ConstantVariance { nu } => RawPair {
                kind: Some(PairType::ConstantVariance),
                nu: Some(nu),
                ..Default::default()
            },
            PairSpec::LinearVariance { nu, a } => RawPair {
                kind: Some(PairType::LinearVariance),
                nu: Some(nu),
                a: Some(a),
                ..Default::default()
            },
        }
    }
}

/// Input of the `clt` subcommand. `nu`, `s` and `S` are optional here so
/// that they can come from the command line instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceFile {
    pub laws: Vec<PairSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<LawSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Number>,
    #[serde(default, rename = "S", skip_serializing_if = "Option::is_none")]
    pub big_s: Option<Number>,
}

impl SequenceFile {
    pub fn spec<T: Scalar>(&self, order: usize) -> Result<SequenceSpec<T>> {
        SequenceSpec::new(
            self.laws
                .iter()
                .map(|l| l.law(order))
                .collect::<Result<_>>()?,
        )
    }
}

/// Parses JSON with a field path in the error message.
pub fn from_json<D: serde::de::DeserializeOwned>(text: &str) -> std::result::Result<D, JsonError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| JsonError {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JsonError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for JsonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at `{}`: {}", self.path, self.message)
    }
}

impl std::error::Error for JsonError {}

/// Canonical string forms of a slice of scalars.
pub fn reprs<T: Scalar>(v: &[T]) -> Vec<String> {
    v.iter().map(Scalar::to_repr).collect()
}
