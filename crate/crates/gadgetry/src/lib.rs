//! Class-file-level analysis and transformation of JVM artifacts.
//!
//! The crate covers three workflows over JAR/AAR archives:
//!
//! - measuring how the set of serializable classes shifts between dependency
//!   versions ([`hierarchy`], [`evolution`]),
//! - injecting gadget-enabling modifications into artifacts ([`inject`]),
//! - detecting dormant deserialization gadget chains via call-graph
//!   reachability diffs ([`detect`]).
//!
//! Everything rests on [`classfile`], a byte-exact class-file reader/writer:
//! parsing then re-emitting an untouched class reproduces its input bytes,
//! which keeps rewritten archives diffable down to the member level.

pub mod archive;
pub mod classfile;
pub mod detect;
pub mod evolution;
pub mod hierarchy;
pub mod inject;
pub mod repoclient;
