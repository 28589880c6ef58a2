//! Input and output files. Every file is a JSON object whose `kind` field
//! names its payload.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use realembed::network::{ComplexScenario, EmbeddingCertificate, RealScenario};
use realembed::protocol::{ComplexProtocol, ProtocolCertificate, RealProtocol};
use realembed::witness::WitnessInstance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Scenario,
    Protocol,
    Witness,
    EmbeddedScenario,
    EmbeddedProtocol,
}

const KINDS: &str = "scenario, protocol, witness, embedded-scenario, embedded-protocol";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub kind: Kind,
    pub scenario: ComplexScenario,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolFile {
    pub kind: Kind,
    pub protocol: ComplexProtocol,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessFile {
    pub kind: Kind,
    pub witness: WitnessInstance,
}

/// Output of `embed` for a scenario; `verify` accepts it as input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioBundle {
    pub kind: Kind,
    pub original: ComplexScenario,
    pub embedded: RealScenario,
    pub certificate: EmbeddingCertificate,
}

/// Output of `embed` for a protocol; `verify` accepts it as input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolBundle {
    pub kind: Kind,
    pub original: ComplexProtocol,
    pub embedded: RealProtocol,
    pub certificate: ProtocolCertificate,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Document {
    Scenario(ScenarioFile),
    Protocol(ProtocolFile),
    Witness(WitnessFile),
    EmbeddedScenario(ScenarioBundle),
    EmbeddedProtocol(ProtocolBundle),
}

impl Document {
    pub fn scenario(scenario: ComplexScenario) -> Self {
        Document::Scenario(ScenarioFile {
            kind: Kind::Scenario,
            scenario,
        })
    }

    pub fn protocol(protocol: ComplexProtocol) -> Self {
        Document::Protocol(ProtocolFile {
            kind: Kind::Protocol,
            protocol,
        })
    }

    pub fn witness(witness: WitnessInstance) -> Self {
        Document::Witness(WitnessFile {
            kind: Kind::Witness,
            witness,
        })
    }

    pub fn kind(&self) -> Kind {
        match self {
            Document::Scenario(_) => Kind::Scenario,
            Document::Protocol(_) => Kind::Protocol,
            Document::Witness(_) => Kind::Witness,
            Document::EmbeddedScenario(_) => Kind::EmbeddedScenario,
            Document::EmbeddedProtocol(_) => Kind::EmbeddedProtocol,
        }
    }

    pub fn to_json(&self) -> String {
        let out = match self {
            Document::Scenario(d) => serde_json::to_string_pretty(d),
            Document::Protocol(d) => serde_json::to_string_pretty(d),
            Document::Witness(d) => serde_json::to_string_pretty(d),
            Document::EmbeddedScenario(d) => serde_json::to_string_pretty(d),
            Document::EmbeddedProtocol(d) => serde_json::to_string_pretty(d),
        };
        out.expect("documents always serialize") + "\n"
    }
}

fn typed<T: DeserializeOwned>(text: &str) -> Result<T, String> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        format!("field `{path}`: {}", e.into_inner())
    })
}

/// Parses a file. Syntax errors carry line and column, payload errors the
/// path of the offending field as well.
pub fn parse(text: &str) -> Result<Document, String> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| format!("invalid JSON: {e}"))?;
    let kind = value
        .get("kind")
        .ok_or_else(|| format!("missing field `kind` (expected one of {KINDS})"))?;
    let kind: Kind = serde_json::from_value(kind.clone())
        .map_err(|_| format!("field `kind`: unknown value {kind} (expected one of {KINDS})"))?;
    Ok(match kind {
        Kind::Scenario => Document::Scenario(typed(text)?),
        Kind::Protocol => Document::Protocol(typed(text)?),
        Kind::Witness => Document::Witness(typed(text)?),
        Kind::EmbeddedScenario => Document::EmbeddedScenario(typed(text)?),
        Kind::EmbeddedProtocol => Document::EmbeddedProtocol(typed(text)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_round_trip() {
        let doc = Document::scenario(realembed::network::bell_chsh());
        assert_eq!(parse(&doc.to_json()).unwrap(), doc);
    }

    #[test]
    fn diagnostics_name_location() {
        let e = parse("{\"kind\": \"scenario\",\n \"scenario\": [}").unwrap_err();
        assert!(e.contains("line 2"), "{e}");
        let e = parse("{\"kind\": \"scenario\", \"scenario\": {\"parties\": 3}}").unwrap_err();
        assert!(e.contains("scenario.parties"), "{e}");
        let e = parse("{\"kind\": \"nonsense\"}").unwrap_err();
        assert!(e.contains("kind"), "{e}");
    }
}
