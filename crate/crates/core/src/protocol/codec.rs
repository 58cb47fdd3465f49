//! Frame encoding.
//!
//! A frame is `<length>:<json>`: the byte length of the JSON object in
//! decimal ASCII, a colon, then exactly that many bytes of UTF-8 JSON. The
//! object has the fields `kind`, `code` (control frames only), `game_id`,
//! `seq`, `sender`, `visibility` and `payload`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::message::{Body, ChatBody, Control, Kind, Visibility, WireMessage};

/// Longest accepted length prefix, in digits.
const MAX_PREFIX_DIGITS: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("malformed frame: {0}")]
    MalformedMessage(String),
    #[error("unknown control code {0:?}")]
    UnknownCode(String),
    #[error("payload does not match {code}: {reason}")]
    PayloadSchemaViolation { code: String, reason: String },
}

impl ProtocolError {
    pub fn code(&self) -> &'static str {
        match self {
            ProtocolError::MalformedMessage(_) => "MalformedMessage",
            ProtocolError::UnknownCode(_) => "UnknownCode",
            ProtocolError::PayloadSchemaViolation { .. } => "PayloadSchemaViolation",
        }
    }

    /// The reply a server sends for an undecodable frame.
    pub fn to_rejected(&self) -> Control {
        Control::rejected(self.code(), self.to_string())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    code: Option<String>,
    #[serde(default)]
    game_id: Option<String>,
    seq: u64,
    #[serde(default)]
    sender: Option<String>,
    visibility: Visibility,
    #[serde(default)]
    payload: serde_json::Value,
}

pub fn encode_json(msg: &WireMessage) -> String {
    let (kind, code, payload) = match &msg.body {
        Body::Control(c) => {
            let mut v = serde_json::to_value(c).expect("control payloads always serialize");
            let payload = v
                .get_mut("payload")
                .map(serde_json::Value::take)
                .unwrap_or_else(|| serde_json::json!({}));
            (Kind::Control, Some(c.code().to_string()), payload)
        }
        Body::Chat(chat) => (
            Kind::Chat,
            None,
            serde_json::to_value(chat).expect("chat bodies always serialize"),
        ),
    };
    let env = Envelope {
        kind,
        code,
        game_id: msg.game_id.clone(),
        seq: msg.seq,
        sender: msg.sender.clone(),
        visibility: msg.visibility.clone(),
        payload,
    };
    serde_json::to_string(&env).expect("envelopes always serialize")
}

/// Encodes one frame as text.
pub fn encode(msg: &WireMessage) -> String {
    let json = encode_json(msg);
    format!("{}:{json}", json.len())
}

pub fn decode(bytes: &[u8]) -> Result<WireMessage, ProtocolError> {
    let malformed = |why: &str| ProtocolError::MalformedMessage(why.to_string());
    let colon = bytes
        .iter()
        .take(MAX_PREFIX_DIGITS + 1)
        .position(|b| *b == b':')
        .ok_or_else(|| malformed("missing length prefix"))?;
    let prefix = &bytes[..colon];
    if prefix.is_empty() || !prefix.iter().all(u8::is_ascii_digit) {
        return Err(malformed("length prefix is not a decimal number"));
    }
    if prefix.len() > 1 && prefix[0] == b'0' {
        return Err(malformed("length prefix has leading zeros"));
    }
    let len: usize = std::str::from_utf8(prefix)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| malformed("length prefix out of range"))?;
    let body = &bytes[colon + 1..];
    if body.len() != len {
        return Err(ProtocolError::MalformedMessage(format!(
            "length prefix says {len} bytes, frame has {}",
            body.len()
        )));
    }
    let text = std::str::from_utf8(body).map_err(|_| malformed("frame is not UTF-8"))?;
    decode_json(text)
}

pub fn decode_json(text: &str) -> Result<WireMessage, ProtocolError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| ProtocolError::MalformedMessage(e.to_string()))?;
    let env: Envelope = serde_json::from_value(value).map_err(|e| ProtocolError::MalformedMessage(e.to_string()))?;
    let body = match (env.kind, env.code) {
        (Kind::Chat, Some(code)) => {
            return Err(ProtocolError::PayloadSchemaViolation {
                code,
                reason: "chat frames carry no control code".into(),
            })
        }
        (Kind::Chat, None) => Body::Chat(serde_json::from_value::<ChatBody>(env.payload).map_err(|e| {
            ProtocolError::PayloadSchemaViolation {
                code: "chat".into(),
                reason: e.to_string(),
            }
        })?),
        (Kind::Control, None) => return Err(ProtocolError::MalformedMessage("control frame without a code".into())),
        (Kind::Control, Some(code)) => {
            if !Control::is_known_code(&code) {
                return Err(ProtocolError::UnknownCode(code));
            }
            if !env.payload.is_object() {
                return Err(ProtocolError::PayloadSchemaViolation {
                    code,
                    reason: "payload must be an object".into(),
                });
            }
            let tagged = serde_json::json!({"code": code, "payload": env.payload});
            Body::Control(
                serde_json::from_value(tagged)
                    .map_err(|e| ProtocolError::PayloadSchemaViolation { code, reason: e.to_string() })?,
            )
        }
    };
    Ok(WireMessage {
        seq: env.seq,
        game_id: env.game_id,
        sender: env.sender,
        visibility: env.visibility,
        body,
    })
}
