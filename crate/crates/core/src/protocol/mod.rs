//! The wire protocol: typed frames that keep game control separate from
//! user chat.

pub mod codec;
pub mod gate;
pub mod message;
pub mod view;

pub use codec::{decode, encode, ProtocolError};
pub use gate::{gate_chat, ChatContext, DenyReason, Gate};
pub use message::{Body, ChatBody, Control, Direction, Kind, WireMessage, Visibility};
