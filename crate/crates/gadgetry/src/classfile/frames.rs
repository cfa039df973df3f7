//! StackMapTable decoding and encoding.
//!
//! Frames are stored in their exact wire form (compressed vs. extended), so an
//! untouched method re-encodes byte-for-byte. Offset fixup after a code edit
//! recomputes deltas and only switches a frame to its extended form when the
//! new delta no longer fits the compressed encoding.

use super::bytes::{Reader, WriteBytes};
use super::ClassFileError;

pub const ITEM_TOP: u8 = 0;
pub const ITEM_INTEGER: u8 = 1;
pub const ITEM_FLOAT: u8 = 2;
pub const ITEM_DOUBLE: u8 = 3;
pub const ITEM_LONG: u8 = 4;
pub const ITEM_NULL: u8 = 5;
pub const ITEM_UNINITIALIZED_THIS: u8 = 6;
pub const ITEM_OBJECT: u8 = 7;
pub const ITEM_UNINITIALIZED: u8 = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerificationType {
    Top,
    Integer,
    Float,
    Double,
    Long,
    Null,
    UninitializedThis,
    /// Constant-pool index of a Class entry.
    Object(u16),
    /// Bytecode offset of the `new` instruction that created the value.
    Uninitialized(u16),
}

impl VerificationType {
    fn parse(r: &mut Reader) -> Result<Self, ClassFileError> {
        Ok(match r.u1()? {
            ITEM_TOP => VerificationType::Top,
            ITEM_INTEGER => VerificationType::Integer,
            ITEM_FLOAT => VerificationType::Float,
            ITEM_DOUBLE => VerificationType::Double,
            ITEM_LONG => VerificationType::Long,
            ITEM_NULL => VerificationType::Null,
            ITEM_UNINITIALIZED_THIS => VerificationType::UninitializedThis,
            ITEM_OBJECT => VerificationType::Object(r.u2()?),
            ITEM_UNINITIALIZED => VerificationType::Uninitialized(r.u2()?),
            tag => {
                return Err(ClassFileError::MalformedPool {
                    index: 0,
                    reason: format!("unknown verification type tag {tag}"),
                })
            }
        })
    }

    fn emit(&self, out: &mut Vec<u8>) {
        match self {
            VerificationType::Top => out.w_u1(ITEM_TOP),
            VerificationType::Integer => out.w_u1(ITEM_INTEGER),
            VerificationType::Float => out.w_u1(ITEM_FLOAT),
            VerificationType::Double => out.w_u1(ITEM_DOUBLE),
            VerificationType::Long => out.w_u1(ITEM_LONG),
            VerificationType::Null => out.w_u1(ITEM_NULL),
            VerificationType::UninitializedThis => out.w_u1(ITEM_UNINITIALIZED_THIS),
            VerificationType::Object(i) => {
                out.w_u1(ITEM_OBJECT);
                out.w_u2(*i);
            }
            VerificationType::Uninitialized(o) => {
                out.w_u1(ITEM_UNINITIALIZED);
                out.w_u2(*o);
            }
        }
    }
}

/// One stack-map frame in its exact wire form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StackMapFrame {
    /// Tags 0-63; offset delta is the tag itself.
    Same { delta: u8 },
    /// Tags 64-127; offset delta is tag - 64.
    SameLocals1 { delta: u8, stack: VerificationType },
    /// Tag 247.
    SameLocals1Extended { delta: u16, stack: VerificationType },
    /// Tags 248-250; `chopped` is 251 - tag (1..=3).
    Chop { chopped: u8, delta: u16 },
    /// Tag 251.
    SameExtended { delta: u16 },
    /// Tags 252-254; one to three appended locals.
    Append { delta: u16, locals: Vec<VerificationType> },
    /// Tag 255.
    Full { delta: u16, locals: Vec<VerificationType>, stack: Vec<VerificationType> },
}

impl StackMapFrame {
    /// Offset delta relative to the previous frame.
    pub fn delta(&self) -> u16 {
        match self {
            StackMapFrame::Same { delta } => *delta as u16,
            StackMapFrame::SameLocals1 { delta, .. } => *delta as u16,
            StackMapFrame::SameLocals1Extended { delta, .. }
            | StackMapFrame::Chop { delta, .. }
            | StackMapFrame::SameExtended { delta }
            | StackMapFrame::Append { delta, .. }
            | StackMapFrame::Full { delta, .. } => *delta,
        }
    }

    /// Rebuilds the frame with a new delta, switching between compressed and
    /// extended forms as the new value requires.
    pub fn with_delta(&self, delta: u16) -> StackMapFrame {
        match self {
            StackMapFrame::Same { .. } | StackMapFrame::SameExtended { .. } => {
                if delta <= 63 && matches!(self, StackMapFrame::Same { .. }) {
                    StackMapFrame::Same { delta: delta as u8 }
                } else if delta <= 63 {
                    // Originally extended: keep the extended form.
                    StackMapFrame::SameExtended { delta }
                } else {
                    StackMapFrame::SameExtended { delta }
                }
            }
            StackMapFrame::SameLocals1 { stack, .. } => {
                if delta <= 63 {
                    StackMapFrame::SameLocals1 { delta: delta as u8, stack: stack.clone() }
                } else {
                    StackMapFrame::SameLocals1Extended { delta, stack: stack.clone() }
                }
            }
            StackMapFrame::SameLocals1Extended { stack, .. } => {
                StackMapFrame::SameLocals1Extended { delta, stack: stack.clone() }
            }
            StackMapFrame::Chop { chopped, .. } => StackMapFrame::Chop { chopped: *chopped, delta },
            StackMapFrame::Append { locals, .. } => StackMapFrame::Append { delta, locals: locals.clone() },
            StackMapFrame::Full { locals, stack, .. } => {
                StackMapFrame::Full { delta, locals: locals.clone(), stack: stack.clone() }
            }
        }
    }

    /// Applies `remap` to every bytecode offset the frame references: the
    /// frame's own absolute offset and any Uninitialized item offsets.
    pub fn map_uninitialized(
        &mut self,
        remap: &impl Fn(u16) -> Result<u16, ClassFileError>,
    ) -> Result<(), ClassFileError> {
        let map_one = |t: &mut VerificationType| -> Result<(), ClassFileError> {
            if let VerificationType::Uninitialized(off) = t {
                *off = remap(*off)?;
            }
            Ok(())
        };
        match self {
            StackMapFrame::SameLocals1 { stack, .. } | StackMapFrame::SameLocals1Extended { stack, .. } => {
                map_one(stack)?
            }
            StackMapFrame::Append { locals, .. } => {
                for l in locals {
                    map_one(l)?;
                }
            }
            StackMapFrame::Full { locals, stack, .. } => {
                for l in locals {
                    map_one(l)?;
                }
                for s in stack {
                    map_one(s)?;
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Parses a StackMapTable attribute payload (after name/length framing).
pub fn parse_stack_map(data: &[u8]) -> Result<Vec<StackMapFrame>, ClassFileError> {
    let mut r = Reader::new(data);
    let count = r.u2()?;
    let mut frames = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let tag = r.u1()?;
        let frame = match tag {
            0..=63 => StackMapFrame::Same { delta: tag },
            64..=127 => StackMapFrame::SameLocals1 { delta: tag - 64, stack: VerificationType::parse(&mut r)? },
            247 => StackMapFrame::SameLocals1Extended { delta: r.u2()?, stack: VerificationType::parse(&mut r)? },
            248..=250 => StackMapFrame::Chop { chopped: 251 - tag, delta: r.u2()? },
            251 => StackMapFrame::SameExtended { delta: r.u2()? },
            252..=254 => {
                let delta = r.u2()?;
                let n = tag - 251;
                let mut locals = Vec::with_capacity(n as usize);
                for _ in 0..n {
                    locals.push(VerificationType::parse(&mut r)?);
                }
                StackMapFrame::Append { delta, locals }
            }
            255 => {
                let delta = r.u2()?;
                let nlocals = r.u2()?;
                let mut locals = Vec::with_capacity(nlocals as usize);
                for _ in 0..nlocals {
                    locals.push(VerificationType::parse(&mut r)?);
                }
                let nstack = r.u2()?;
                let mut stack = Vec::with_capacity(nstack as usize);
                for _ in 0..nstack {
                    stack.push(VerificationType::parse(&mut r)?);
                }
                StackMapFrame::Full { delta, locals, stack }
            }
            t => {
                return Err(ClassFileError::MalformedPool {
                    index: 0,
                    reason: format!("reserved stack map frame tag {t}"),
                })
            }
        };
        frames.push(frame);
    }
    if r.remaining() != 0 {
        return Err(ClassFileError::Truncated { at: r.pos() });
    }
    Ok(frames)
}

/// Emits the attribute payload (after name/length framing).
pub fn emit_stack_map(frames: &[StackMapFrame], out: &mut Vec<u8>) {
    out.w_u2(frames.len() as u16);
    for frame in frames {
        match frame {
            StackMapFrame::Same { delta } => out.w_u1(*delta),
            StackMapFrame::SameLocals1 { delta, stack } => {
                out.w_u1(64 + delta);
                stack.emit(out);
            }
            StackMapFrame::SameLocals1Extended { delta, stack } => {
                out.w_u1(247);
                out.w_u2(*delta);
                stack.emit(out);
            }
            StackMapFrame::Chop { chopped, delta } => {
                out.w_u1(251 - chopped);
                out.w_u2(*delta);
            }
            StackMapFrame::SameExtended { delta } => {
                out.w_u1(251);
                out.w_u2(*delta);
            }
            StackMapFrame::Append { delta, locals } => {
                out.w_u1(251 + locals.len() as u8);
                out.w_u2(*delta);
                for l in locals {
                    l.emit(out);
                }
            }
            StackMapFrame::Full { delta, locals, stack } => {
                out.w_u1(255);
                out.w_u2(*delta);
                out.w_u2(locals.len() as u16);
                for l in locals {
                    l.emit(out);
                }
                out.w_u2(stack.len() as u16);
                for s in stack {
                    s.emit(out);
                }
            }
        }
    }
}

/// Absolute bytecode offsets described by a frame list: the first frame sits
/// at its delta, every later frame at previous + delta + 1.
pub fn frame_offsets(frames: &[StackMapFrame]) -> Vec<u32> {
    let mut offsets = Vec::with_capacity(frames.len());
    let mut prev: Option<u32> = None;
    for f in frames {
        let abs = match prev {
            None => f.delta() as u32,
            Some(p) => p + f.delta() as u32 + 1,
        };
        offsets.push(abs);
        prev = Some(abs);
    }
    offsets
}

/// Re-expresses frames against new absolute offsets (same frame count).
pub fn reencode_deltas(frames: &[StackMapFrame], new_offsets: &[u32]) -> Result<Vec<StackMapFrame>, ClassFileError> {
    assert_eq!(frames.len(), new_offsets.len());
    let mut out = Vec::with_capacity(frames.len());
    let mut prev: Option<u32> = None;
    for (f, &abs) in frames.iter().zip(new_offsets) {
        let delta = match prev {
            None => abs,
            Some(p) => abs
                .checked_sub(p + 1)
                .ok_or(ClassFileError::OffsetOverflow { at: abs })?,
        };
        if delta > u16::MAX as u32 {
            return Err(ClassFileError::OffsetOverflow { at: abs });
        }
        out.push(f.with_delta(delta as u16));
        prev = Some(abs);
    }
    Ok(out)
}
