//! The chain interchange document: a small JSON schema carrying the kind and
//! the two rate vectors as exact rational strings.
//!
//! ```json
//! { "kind": "gambler", "p": ["0", "1/2", "1/2", "0"], "q": ["0", "1/2", "1/2", "0"] }
//! ```
//!
//! Entries are `"a/b"` fractions or decimal literals; decimals convert
//! exactly. Gambler arrays have length `N + 1`, polygon arrays `m + 1`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use ruin_core::{Error, GamblerChain, PolygonChain, Scalar};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainDocument {
    pub kind: String,
    pub p: Vec<String>,
    pub q: Vec<String>,
}

/// A validated chain of either kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Chain {
    Gambler(GamblerChain),
    Polygon(PolygonChain),
}

impl ChainDocument {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("document serializes")
    }

    /// Validates the document into a chain; every type invariant holds on
    /// success.
    pub fn to_chain(&self) -> Result<Chain, Error> {
        let parse = |v: &[String]| -> Result<Vec<Scalar>, Error> {
            v.iter().map(|t| Scalar::parse(t)).collect()
        };
        let p = parse(&self.p)?;
        let q = parse(&self.q)?;
        match self.kind.as_str() {
            "gambler" => Ok(Chain::Gambler(GamblerChain::new(p, q)?)),
            "polygon" => Ok(Chain::Polygon(PolygonChain::new(p, q)?)),
            other => Err(Error::Parse(format!(
                "unknown chain kind {other:?} (expected \"gambler\" or \"polygon\")"
            ))),
        }
    }

    pub fn from_gambler(chain: &GamblerChain) -> Self {
        ChainDocument {
            kind: "gambler".into(),
            p: chain.p_rates().iter().map(|x| x.to_string()).collect(),
            q: chain.q_rates().iter().map(|x| x.to_string()).collect(),
        }
    }

    pub fn from_polygon(chain: &PolygonChain) -> Self {
        ChainDocument {
            kind: "polygon".into(),
            p: chain.p_rates().iter().map(|x| x.to_string()).collect(),
            q: chain.q_rates().iter().map(|x| x.to_string()).collect(),
        }
    }
}

pub fn load_chain(path: &Path) -> anyhow::Result<Chain> {
    let text = fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    let doc = ChainDocument::from_json(&text)?;
    Ok(doc.to_chain()?)
}

pub fn load_gambler(path: &Path) -> anyhow::Result<GamblerChain> {
    match load_chain(path)? {
        Chain::Gambler(c) => Ok(c),
        Chain::Polygon(_) => anyhow::bail!("{} holds a polygon chain, need a gambler chain", path.display()),
    }
}

pub fn load_polygon(path: &Path) -> anyhow::Result<PolygonChain> {
    match load_chain(path)? {
        Chain::Polygon(c) => Ok(c),
        Chain::Gambler(_) => anyhow::bail!("{} holds a gambler chain, need a polygon chain", path.display()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_two_kinds() {
        let doc = ChainDocument::from_json(
            r#"{"kind":"gambler","p":["0","1/2","1/2","0"],"q":["0","1/2","1/2","0"]}"#,
        )
        .unwrap();
        match doc.to_chain().unwrap() {
            Chain::Gambler(c) => assert_eq!(c.pot(), 3),
            _ => panic!("expected gambler"),
        }
        let doc = ChainDocument::from_json(
            r#"{"kind":"polygon","p":["1/4","1/4","1/4"],"q":["1/4","1/4","1/4"]}"#,
        )
        .unwrap();
        match doc.to_chain().unwrap() {
            Chain::Polygon(c) => assert_eq!(c.size(), 2),
            _ => panic!("expected polygon"),
        }
    }

    #[test]
    fn rejects_invalid_documents() {
        // p(1) + q(1) = 2
        let doc = ChainDocument::from_json(
            r#"{"kind":"gambler","p":["0","1","0"],"q":["0","1","0"]}"#,
        )
        .unwrap();
        assert!(doc.to_chain().is_err());
        // length mismatch
        let doc = ChainDocument::from_json(
            r#"{"kind":"gambler","p":["0","1/2","0"],"q":["0","0"]}"#,
        )
        .unwrap();
        assert!(doc.to_chain().is_err());
        // nonzero boundary
        let doc = ChainDocument::from_json(
            r#"{"kind":"gambler","p":["1/2","1/2","0"],"q":["0","1/4","0"]}"#,
        )
        .unwrap();
        assert!(doc.to_chain().is_err());
        // unknown kind
        let doc =
            ChainDocument::from_json(r#"{"kind":"ladder","p":["1/2"],"q":["1/2"]}"#).unwrap();
        assert!(doc.to_chain().is_err());
        // malformed rational
        let doc = ChainDocument::from_json(
            r#"{"kind":"polygon","p":["1/4","x","1/4"],"q":["1/4","1/4","1/4"]}"#,
        )
        .unwrap();
        assert!(doc.to_chain().is_err());
    }

    #[test]
    fn round_trip_preserves_the_chain() {
        let doc = ChainDocument::from_json(
            r#"{"kind":"gambler","p":["0","0.25","2/6","0"],"q":["0","1/2","0.5","0"]}"#,
        )
        .unwrap();
        let chain = doc.to_chain().unwrap();
        let Chain::Gambler(g) = &chain else { panic!() };
        let again = ChainDocument::from_gambler(g);
        assert_eq!(again.to_chain().unwrap(), chain);
        // decimals were parsed exactly
        assert_eq!(again.p[1], "1/4");
        assert_eq!(again.p[2], "1/3");
    }
}
