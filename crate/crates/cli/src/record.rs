//! Result records: one computed quantity with its parameters, the exact
//! reduced fraction, and a 20-significant-digit decimal rendering.

use ruin_core::Scalar;
use serde::Serialize;

pub const APPROX_DIGITS: usize = 20;

#[derive(Debug, Clone)]
pub struct ResultRecord {
    pub quantity: String,
    /// Parameter name/value pairs in presentation order.
    pub parameters: Vec<(String, String)>,
    pub exact: Scalar,
}

#[derive(Serialize)]
struct RecordDto<'a> {
    quantity: &'a str,
    parameters: serde_json::Map<String, serde_json::Value>,
    exact: String,
    approx: String,
}

impl ResultRecord {
    pub fn new(quantity: &str, parameters: &[(&str, String)], exact: Scalar) -> Self {
        ResultRecord {
            quantity: quantity.into(),
            parameters: parameters
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
            exact,
        }
    }

    pub fn exact_string(&self) -> String {
        self.exact.to_string()
    }

    pub fn approx_string(&self) -> String {
        self.exact.decimal(APPROX_DIGITS)
    }

    pub fn to_json(&self) -> String {
        let mut parameters = serde_json::Map::new();
        for (k, v) in &self.parameters {
            parameters.insert(k.clone(), serde_json::Value::String(v.clone()));
        }
        let dto = RecordDto {
            quantity: &self.quantity,
            parameters,
            exact: self.exact_string(),
            approx: self.approx_string(),
        };
        serde_json::to_string(&dto).expect("record serializes")
    }

    pub fn csv_header() -> &'static str {
        "quantity,parameters,exact,approx"
    }

    pub fn to_csv_row(&self) -> String {
        let params = self
            .parameters
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        format!(
            "{},{},{},{}",
            self.quantity,
            params,
            self.exact_string(),
            self.approx_string()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_both_formats_with_identical_exact_strings() {
        let rec = ResultRecord::new(
            "ew",
            &[("j", "0".into()), ("i", "1".into()), ("k", "3".into())],
            Scalar::from_fraction(8, 3).unwrap(),
        );
        let json = rec.to_json();
        assert!(json.contains("\"exact\":\"8/3\""), "{json}");
        assert!(json.contains("\"approx\":\"2.6666666666666666667\""));
        assert!(json.contains("\"j\":\"0\""));
        let csv = rec.to_csv_row();
        assert_eq!(csv, "ew,j=0;i=1;k=3,8/3,2.6666666666666666667");
        // the same exact string appears in both renderings
        assert!(json.contains(&rec.exact_string()) && csv.contains(&rec.exact_string()));
    }
}
