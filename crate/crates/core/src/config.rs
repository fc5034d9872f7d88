//! Strict JSON loading shared by the run and sweep configurations.

use serde::de::DeserializeOwned;

use crate::error::{Error, Result};

/// Deserializes `text`, reporting failures against the offending key path.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|err| {
        let path = err.path().to_string();
        let inner = err.into_inner();
        let key = if path == "." || path.is_empty() {
            unknown_key(&inner).unwrap_or_else(|| "<document>".to_string())
        } else {
            path
        };
        Error::config(key, inner.to_string())
    })
}

/// Pulls the key name out of serde's "unknown field `x`" message.
fn unknown_key(err: &serde_json::Error) -> Option<String> {
    let msg = err.to_string();
    let rest = msg.strip_prefix("unknown field `")?;
    Some(rest[..rest.find('`')?].to_string())
}
