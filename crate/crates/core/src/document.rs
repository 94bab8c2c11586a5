//! Self-describing JSON documents for filtrations, profiles, towers and
//! generator sets.
//!
//! ```json
//! {"format_version": 1, "kind": "lower_filtration",
//!  "payload": {"steps": [["-1/1", "6"], ["0/1", "3"], ["2/1", "1"]]}}
//! ```
//!
//! Rationals are strings `"a/b"` (a bare integer `"a"` is accepted on input),
//! integers are decimal strings. Unknown fields are rejected.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtration::{LowerFiltration, UpperFiltration};
use crate::herbrand::PLFunction;
use crate::propgroup::{ModMatrix, Precision};
use crate::rational::{format_rational, parse_integer, parse_rational, Rat};
use crate::tower::{GeneralTower, SenProfile};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    LowerFiltration(LowerFiltration),
    UpperFiltration(UpperFiltration),
    PlFunction(PLFunction),
    SenProfile(SenProfile),
    GeneralTower(GeneralTower),
    GeneratorSet { precision: Precision, generators: Vec<ModMatrix> },
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::LowerFiltration(_) => "lower_filtration",
            Document::UpperFiltration(_) => "upper_filtration",
            Document::PlFunction(_) => "pl_function",
            Document::SenProfile(_) => "sen_profile",
            Document::GeneralTower(_) => "general_tower",
            Document::GeneratorSet { .. } => "generator_set",
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let env: Envelope = serde_json::from_str(text).map_err(|e| json_error("document", e))?;
        if env.format_version != FORMAT_VERSION {
            return Err(parse_err("format_version", format!("unsupported version {}", env.format_version)));
        }
        let payload = env.payload;
        match env.kind.as_str() {
            "lower_filtration" => {
                let s: StepsPayload = payload_of(payload)?;
                Ok(Document::LowerFiltration(LowerFiltration::new(parse_steps(&s.steps, "payload.steps")?)?))
            }
            "upper_filtration" => {
                let s: StepsPayload = payload_of(payload)?;
                Ok(Document::UpperFiltration(UpperFiltration::new(parse_steps(&s.steps, "payload.steps")?)?))
            }
            "pl_function" => {
                let s: SegmentsPayload = payload_of(payload)?;
                let pairs = s
                    .segments
                    .iter()
                    .enumerate()
                    .map(|(k, (a, b))| {
                        let at = format!("payload.segments[{k}]");
                        Ok((rational(a, &format!("{at}[0]"))?, rational(b, &format!("{at}[1]"))?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Document::PlFunction(PLFunction::new(pairs)?))
            }
            "sen_profile" => {
                let s: ProfilePayload = payload_of(payload)?;
                Ok(Document::SenProfile(s.build("payload")?))
            }
            "general_tower" => {
                let s: TowerPayload = payload_of(payload)?;
                let profile = s.profile.build("payload.profile")?;
                let i0 = small(&s.i0, "payload.i0")?;
                let k0 = small(&s.k0, "payload.k0")?;
                let base = parse_steps(&s.base_quotient, "payload.base_quotient")?;
                Ok(Document::GeneralTower(GeneralTower::new(profile, i0, k0, base)?))
            }
            "generator_set" => {
                let s: GeneratorPayload = payload_of(payload)?;
                let n = small(&s.n, "payload.n")? as usize;
                let p = small(&s.p, "payload.p")?;
                let m = small(&s.m, "payload.m")? as u32;
                let precision = Precision::new(n, p, m)?;
                let mut generators = Vec::with_capacity(s.generators.len());
                for (g, rows) in s.generators.iter().enumerate() {
                    let at = format!("payload.generators[{g}]");
                    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                        return Err(parse_err(&at, format!("expected a {n} x {n} matrix")));
                    }
                    let mut entries = Vec::with_capacity(n * n);
                    for (r, row) in rows.iter().enumerate() {
                        for (c, x) in row.iter().enumerate() {
                            let v = integer(x, &format!("{at}[{r}][{c}]"))?;
                            let reduced = (v % BigInt::from(precision.modulus())).to_i64().expect("residue fits");
                            entries.push(reduced);
                        }
                    }
                    generators.push(ModMatrix::new(precision, entries)?);
                }
                Ok(Document::GeneratorSet { precision, generators })
            }
            other => Err(parse_err("kind", format!("unknown document kind {other:?}"))),
        }
    }

    pub fn to_json(&self) -> String {
        let payload = match self {
            Document::LowerFiltration(f) => to_value(StepsPayload { steps: format_steps(f.steps().steps()) }),
            Document::UpperFiltration(f) => to_value(StepsPayload { steps: format_steps(f.steps().steps()) }),
            Document::PlFunction(f) => to_value(SegmentsPayload {
                segments: f.to_pairs().iter().map(|(a, b)| (format_rational(a), format_rational(b))).collect(),
            }),
            Document::SenProfile(p) => to_value(ProfilePayload::from(p)),
            Document::GeneralTower(t) => to_value(TowerPayload {
                profile: ProfilePayload::from(t.profile()),
                i0: t.i0().to_string(),
                k0: t.k0().to_string(),
                base_quotient: format_steps(t.base_quotient().steps()),
            }),
            Document::GeneratorSet { precision, generators } => to_value(GeneratorPayload {
                n: precision.n.to_string(),
                p: precision.p.to_string(),
                m: precision.m.to_string(),
                generators: generators
                    .iter()
                    .map(|g| {
                        (0..precision.n).map(|r| (0..precision.n).map(|c| g.get(r, c).to_string()).collect()).collect()
                    })
                    .collect(),
            }),
        };
        let env = Envelope { format_version: FORMAT_VERSION, kind: self.kind().to_string(), payload };
        serde_json::to_string_pretty(&env).expect("documents serialize")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    format_version: u32,
    kind: String,
    payload: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepsPayload {
    steps: Vec<(String, String)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentsPayload {
    segments: Vec<(String, String)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfilePayload {
    p: String,
    d: String,
    e: String,
    v0: String,
    c: String,
    window: Vec<(String, String)>,
}

impl ProfilePayload {
    fn build(&self, at: &str) -> Result<SenProfile> {
        SenProfile::new(
            small(&self.p, &format!("{at}.p"))?,
            small(&self.d, &format!("{at}.d"))? as u32,
            small(&self.e, &format!("{at}.e"))?,
            rational(&self.v0, &format!("{at}.v0"))?,
            rational(&self.c, &format!("{at}.c"))?,
            parse_steps(&self.window, &format!("{at}.window"))?,
        )
    }
}

impl From<&SenProfile> for ProfilePayload {
    fn from(p: &SenProfile) -> Self {
        ProfilePayload {
            p: p.p().to_string(),
            d: p.d().to_string(),
            e: p.e().to_string(),
            v0: format_rational(p.v0()),
            c: format_rational(p.c()),
            window: format_steps(p.window().steps()),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TowerPayload {
    profile: ProfilePayload,
    i0: String,
    k0: String,
    base_quotient: Vec<(String, String)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorPayload {
    n: String,
    p: String,
    m: String,
    generators: Vec<Vec<Vec<String>>>,
}

fn to_value<T: Serialize>(t: T) -> serde_json::Value {
    serde_json::to_value(t).expect("payload serializes")
}

fn payload_of<T: for<'de> Deserialize<'de>>(v: serde_json::Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| json_error("payload", e))
}

fn json_error(at: &str, e: serde_json::Error) -> Error {
    let location = if e.line() > 0 { format!("{at} (line {}, column {})", e.line(), e.column()) } else { at.to_string() };
    Error::Parse { location, message: e.to_string() }
}

fn parse_err(at: &str, message: String) -> Error {
    Error::Parse { location: at.to_string(), message }
}

fn rational(s: &str, at: &str) -> Result<Rat> {
    parse_rational(s).map_err(|m| parse_err(at, m))
}

fn integer(s: &str, at: &str) -> Result<BigInt> {
    parse_integer(s).map_err(|m| parse_err(at, m))
}

fn small(s: &str, at: &str) -> Result<u64> {
    integer(s, at)?.to_u64().ok_or_else(|| parse_err(at, format!("{s} is not a small non-negative integer")))
}

fn parse_steps(pairs: &[(String, String)], at: &str) -> Result<Vec<(Rat, BigInt)>> {
    pairs
        .iter()
        .enumerate()
        .map(|(k, (b, o))| Ok((rational(b, &format!("{at}[{k}][0]"))?, integer(o, &format!("{at}[{k}][1]"))?)))
        .collect()
}

fn format_steps(steps: &[(Rat, BigInt)]) -> Vec<(String, String)> {
    steps.iter().map(|(b, o)| (format_rational(b), o.to_string())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    const ZETA9: &str = r#"{"format_version": 1, "kind": "lower_filtration",
        "payload": {"steps": [["-1", "6"], ["0/1", "3"], ["2", "1"]]}}"#;

    #[test]
    fn reads_and_round_trips() {
        let doc = Document::from_json(ZETA9).unwrap();
        let expected = LowerFiltration::new(vec![(int(-1), 6.into()), (int(0), 3.into()), (int(2), 1.into())]).unwrap();
        assert_eq!(doc, Document::LowerFiltration(expected));
        assert_eq!(Document::from_json(&doc.to_json()).unwrap(), doc);
    }

    #[test]
    fn zero_denominator_has_a_location() {
        let text = ZETA9.replace("\"0/1\"", "\"3/0\"");
        match Document::from_json(&text) {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "payload.steps[1][0]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = ZETA9.replace("\"steps\"", "\"extra\": [], \"steps\"");
        assert!(matches!(Document::from_json(&text), Err(Error::Parse { .. })));
        let text = ZETA9.replace("lower_filtration", "mystery");
        assert!(matches!(Document::from_json(&text), Err(Error::Parse { .. })));
    }

    #[test]
    fn generator_set_round_trip() {
        let text = r#"{"format_version": 1, "kind": "generator_set", "payload": {"n": "2", "p": "3", "m": "3",
            "generators": [[["1", "1"], ["0", "1"]], [["1", "0"], ["-1", "1"]]]}}"#;
        let doc = Document::from_json(text).unwrap();
        let Document::GeneratorSet { generators, .. } = &doc else { panic!() };
        assert_eq!(generators[1].get(1, 0), 26);
        assert_eq!(Document::from_json(&doc.to_json()).unwrap(), doc);
    }
}
