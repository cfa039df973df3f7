//! Bytecode instruction model.
//!
//! Decoding is form-faithful: `aload_0`, `aload 0`, and `wide aload 0` are kept
//! as distinct values so an untouched method re-encodes to identical bytes.
//! Switch instructions carry no padding; pad bytes are recomputed from the
//! instruction's own offset at encode time.

use super::bytes::{Reader, WriteBytes};
use super::ClassFileError;

pub mod op {
    pub const NOP: u8 = 0x00;
    pub const ACONST_NULL: u8 = 0x01;
    pub const ICONST_M1: u8 = 0x02;
    pub const ICONST_0: u8 = 0x03;
    pub const ICONST_5: u8 = 0x08;
    pub const LCONST_0: u8 = 0x09;
    pub const FCONST_0: u8 = 0x0b;
    pub const DCONST_0: u8 = 0x0e;
    pub const BIPUSH: u8 = 0x10;
    pub const SIPUSH: u8 = 0x11;
    pub const LDC: u8 = 0x12;
    pub const LDC_W: u8 = 0x13;
    pub const LDC2_W: u8 = 0x14;
    pub const ILOAD: u8 = 0x15;
    pub const LLOAD: u8 = 0x16;
    pub const FLOAD: u8 = 0x17;
    pub const DLOAD: u8 = 0x18;
    pub const ALOAD: u8 = 0x19;
    pub const ILOAD_0: u8 = 0x1a;
    pub const ALOAD_0: u8 = 0x2a;
    pub const ALOAD_3: u8 = 0x2d;
    pub const IALOAD: u8 = 0x2e;
    pub const AALOAD: u8 = 0x32;
    pub const SALOAD: u8 = 0x35;
    pub const ISTORE: u8 = 0x36;
    pub const LSTORE: u8 = 0x37;
    pub const FSTORE: u8 = 0x38;
    pub const DSTORE: u8 = 0x39;
    pub const ASTORE: u8 = 0x3a;
    pub const ISTORE_0: u8 = 0x3b;
    pub const ASTORE_0: u8 = 0x4b;
    pub const ASTORE_3: u8 = 0x4e;
    pub const IASTORE: u8 = 0x4f;
    pub const AASTORE: u8 = 0x53;
    pub const SASTORE: u8 = 0x56;
    pub const POP: u8 = 0x57;
    pub const POP2: u8 = 0x58;
    pub const DUP: u8 = 0x59;
    pub const DUP_X1: u8 = 0x5a;
    pub const DUP_X2: u8 = 0x5b;
    pub const DUP2: u8 = 0x5c;
    pub const DUP2_X1: u8 = 0x5d;
    pub const DUP2_X2: u8 = 0x5e;
    pub const SWAP: u8 = 0x5f;
    pub const IADD: u8 = 0x60;
    pub const IINC: u8 = 0x84;
    pub const I2L: u8 = 0x85;
    pub const I2S: u8 = 0x93;
    pub const LCMP: u8 = 0x94;
    pub const FCMPL: u8 = 0x95;
    pub const FCMPG: u8 = 0x96;
    pub const DCMPL: u8 = 0x97;
    pub const DCMPG: u8 = 0x98;
    pub const IFEQ: u8 = 0x99;
    pub const IFNE: u8 = 0x9a;
    pub const IFLT: u8 = 0x9b;
    pub const IFGE: u8 = 0x9c;
    pub const IFGT: u8 = 0x9d;
    pub const IFLE: u8 = 0x9e;
    pub const IF_ICMPEQ: u8 = 0x9f;
    pub const IF_ICMPNE: u8 = 0xa0;
    pub const IF_ICMPLT: u8 = 0xa1;
    pub const IF_ICMPGE: u8 = 0xa2;
    pub const IF_ICMPGT: u8 = 0xa3;
    pub const IF_ICMPLE: u8 = 0xa4;
    pub const IF_ACMPEQ: u8 = 0xa5;
    pub const IF_ACMPNE: u8 = 0xa6;
    pub const GOTO: u8 = 0xa7;
    pub const JSR: u8 = 0xa8;
    pub const RET: u8 = 0xa9;
    pub const TABLESWITCH: u8 = 0xaa;
    pub const LOOKUPSWITCH: u8 = 0xab;
    pub const IRETURN: u8 = 0xac;
    pub const LRETURN: u8 = 0xad;
    pub const FRETURN: u8 = 0xae;
    pub const DRETURN: u8 = 0xaf;
    pub const ARETURN: u8 = 0xb0;
    pub const RETURN: u8 = 0xb1;
    pub const GETSTATIC: u8 = 0xb2;
    pub const PUTSTATIC: u8 = 0xb3;
    pub const GETFIELD: u8 = 0xb4;
    pub const PUTFIELD: u8 = 0xb5;
    pub const INVOKEVIRTUAL: u8 = 0xb6;
    pub const INVOKESPECIAL: u8 = 0xb7;
    pub const INVOKESTATIC: u8 = 0xb8;
    pub const INVOKEINTERFACE: u8 = 0xb9;
    pub const INVOKEDYNAMIC: u8 = 0xba;
    pub const NEW: u8 = 0xbb;
    pub const NEWARRAY: u8 = 0xbc;
    pub const ANEWARRAY: u8 = 0xbd;
    pub const ARRAYLENGTH: u8 = 0xbe;
    pub const ATHROW: u8 = 0xbf;
    pub const CHECKCAST: u8 = 0xc0;
    pub const INSTANCEOF: u8 = 0xc1;
    pub const MONITORENTER: u8 = 0xc2;
    pub const MONITOREXIT: u8 = 0xc3;
    pub const WIDE: u8 = 0xc4;
    pub const MULTIANEWARRAY: u8 = 0xc5;
    pub const IFNULL: u8 = 0xc6;
    pub const IFNONNULL: u8 = 0xc7;
    pub const GOTO_W: u8 = 0xc8;
    pub const JSR_W: u8 = 0xc9;
}

use op::*;

/// Wide-prefixed instruction payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WideInsn {
    /// `wide <load/store/ret> index`.
    Local { op: u8, index: u16 },
    /// `wide iinc index delta`.
    Iinc { index: u16, delta: i16 },
}

/// One decoded instruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Insn {
    /// Any fixed one-byte instruction (constants, array ops, arithmetic,
    /// stack shuffles, returns, and the `_n` load/store forms).
    Plain(u8),
    Bipush(i8),
    Sipush(i16),
    Ldc(u8),
    LdcW(u16),
    Ldc2W(u16),
    /// Load/store/ret with a one-byte local index.
    Local { op: u8, index: u8 },
    Iinc { index: u8, delta: i8 },
    Wide(WideInsn),
    /// Any instruction with a single two-byte constant-pool operand.
    Cp { op: u8, index: u16 },
    InvokeInterface { index: u16, count: u8 },
    InvokeDynamic { index: u16 },
    Newarray(u8),
    Multianewarray { index: u16, dims: u8 },
    /// Two-byte-offset branch (`if*`, `goto`, `jsr`, `ifnull`, `ifnonnull`).
    Branch { op: u8, delta: i16 },
    /// Four-byte-offset branch (`goto_w`, `jsr_w`).
    BranchW { op: u8, delta: i32 },
    TableSwitch { default: i32, low: i32, high: i32, offsets: Vec<i32> },
    LookupSwitch { default: i32, pairs: Vec<(i32, i32)> },
}

fn is_plain(opcode: u8) -> bool {
    // iinc (0x84) sits inside the arithmetic range and is excluded: it
    // carries operands.
    matches!(opcode,
        NOP..=ICONST_5
        | LCONST_0..=0x0f
        | ILOAD_0..=SALOAD
        | ISTORE_0..=SASTORE
        | POP..=0x83
        | I2L..=I2S
        | LCMP..=DCMPG
        | IRETURN..=RETURN
        | ARRAYLENGTH
        | ATHROW
        | MONITORENTER
        | MONITOREXIT)
}

fn is_local_u8(opcode: u8) -> bool {
    matches!(opcode, ILOAD..=ALOAD | ISTORE..=ASTORE | RET)
}

fn is_branch2(opcode: u8) -> bool {
    matches!(opcode, IFEQ..=JSR | IFNULL | IFNONNULL)
}

impl Insn {
    /// True for instructions that transfer control with an encoded offset.
    pub fn is_branch(&self) -> bool {
        matches!(
            self,
            Insn::Branch { .. } | Insn::BranchW { .. } | Insn::TableSwitch { .. } | Insn::LookupSwitch { .. }
        )
    }

    /// Encoded byte length when the instruction starts at `offset`.
    pub fn encoded_len(&self, offset: u32) -> u32 {
        match self {
            Insn::Plain(_) => 1,
            Insn::Bipush(_) | Insn::Ldc(_) | Insn::Local { .. } | Insn::Newarray(_) => 2,
            Insn::Sipush(_) | Insn::LdcW(_) | Insn::Ldc2W(_) | Insn::Cp { .. } | Insn::Branch { .. } | Insn::Iinc { .. } => 3,
            Insn::Wide(WideInsn::Local { .. }) => 4,
            Insn::Wide(WideInsn::Iinc { .. }) => 6,
            Insn::Multianewarray { .. } => 4,
            Insn::InvokeInterface { .. } | Insn::InvokeDynamic { .. } | Insn::BranchW { .. } => 5,
            Insn::TableSwitch { offsets, .. } => {
                let pad = switch_pad(offset);
                1 + pad + 12 + 4 * offsets.len() as u32
            }
            Insn::LookupSwitch { pairs, .. } => {
                let pad = switch_pad(offset);
                1 + pad + 8 + 8 * pairs.len() as u32
            }
        }
    }

    /// Decodes one instruction starting at `offset` within the code array.
    /// `r` must be positioned at the opcode byte.
    pub(crate) fn decode(r: &mut Reader, offset: u32) -> Result<Insn, ClassFileError> {
        let opcode = r.u1()?;
        let insn = match opcode {
            _ if is_plain(opcode) => Insn::Plain(opcode),
            BIPUSH => Insn::Bipush(r.i1()?),
            SIPUSH => Insn::Sipush(r.i2()?),
            LDC => Insn::Ldc(r.u1()?),
            LDC_W => Insn::LdcW(r.u2()?),
            LDC2_W => Insn::Ldc2W(r.u2()?),
            _ if is_local_u8(opcode) => Insn::Local { op: opcode, index: r.u1()? },
            IINC => Insn::Iinc { index: r.u1()?, delta: r.i1()? },
            _ if is_branch2(opcode) => Insn::Branch { op: opcode, delta: r.i2()? },
            GOTO_W | JSR_W => Insn::BranchW { op: opcode, delta: r.i4()? },
            TABLESWITCH => {
                skip_switch_pad(r, offset)?;
                let default = r.i4()?;
                let low = r.i4()?;
                let high = r.i4()?;
                if high < low {
                    return Err(ClassFileError::BadOpcode { opcode, at: offset });
                }
                let n = (high as i64 - low as i64 + 1) as usize;
                let mut offsets = Vec::with_capacity(n);
                for _ in 0..n {
                    offsets.push(r.i4()?);
                }
                Insn::TableSwitch { default, low, high, offsets }
            }
            LOOKUPSWITCH => {
                skip_switch_pad(r, offset)?;
                let default = r.i4()?;
                let npairs = r.i4()?;
                if npairs < 0 {
                    return Err(ClassFileError::BadOpcode { opcode, at: offset });
                }
                let mut pairs = Vec::with_capacity(npairs as usize);
                for _ in 0..npairs {
                    let k = r.i4()?;
                    let v = r.i4()?;
                    pairs.push((k, v));
                }
                Insn::LookupSwitch { default, pairs }
            }
            GETSTATIC..=INVOKESTATIC | NEW | ANEWARRAY | CHECKCAST | INSTANCEOF => {
                Insn::Cp { op: opcode, index: r.u2()? }
            }
            INVOKEINTERFACE => {
                let index = r.u2()?;
                let count = r.u1()?;
                let zero = r.u1()?;
                if zero != 0 {
                    return Err(ClassFileError::BadOpcode { opcode, at: offset });
                }
                Insn::InvokeInterface { index, count }
            }
            INVOKEDYNAMIC => {
                let index = r.u2()?;
                if r.u1()? != 0 || r.u1()? != 0 {
                    return Err(ClassFileError::BadOpcode { opcode, at: offset });
                }
                Insn::InvokeDynamic { index }
            }
            NEWARRAY => Insn::Newarray(r.u1()?),
            MULTIANEWARRAY => Insn::Multianewarray { index: r.u2()?, dims: r.u1()? },
            WIDE => {
                let sub = r.u1()?;
                if sub == IINC {
                    Insn::Wide(WideInsn::Iinc { index: r.u2()?, delta: r.i2()? })
                } else if is_local_u8(sub) {
                    Insn::Wide(WideInsn::Local { op: sub, index: r.u2()? })
                } else {
                    return Err(ClassFileError::BadOpcode { opcode: sub, at: offset });
                }
            }
            _ => return Err(ClassFileError::BadOpcode { opcode, at: offset }),
        };
        Ok(insn)
    }

    /// Encodes the instruction assuming it starts at `offset`.
    pub fn encode(&self, offset: u32, out: &mut Vec<u8>) {
        match self {
            Insn::Plain(opcode) => out.w_u1(*opcode),
            Insn::Bipush(v) => {
                out.w_u1(BIPUSH);
                out.w_u1(*v as u8);
            }
            Insn::Sipush(v) => {
                out.w_u1(SIPUSH);
                out.w_i2(*v);
            }
            Insn::Ldc(i) => {
                out.w_u1(LDC);
                out.w_u1(*i);
            }
            Insn::LdcW(i) => {
                out.w_u1(LDC_W);
                out.w_u2(*i);
            }
            Insn::Ldc2W(i) => {
                out.w_u1(LDC2_W);
                out.w_u2(*i);
            }
            Insn::Local { op, index } => {
                out.w_u1(*op);
                out.w_u1(*index);
            }
            Insn::Iinc { index, delta } => {
                out.w_u1(IINC);
                out.w_u1(*index);
                out.w_u1(*delta as u8);
            }
            Insn::Wide(WideInsn::Local { op, index }) => {
                out.w_u1(WIDE);
                out.w_u1(*op);
                out.w_u2(*index);
            }
            Insn::Wide(WideInsn::Iinc { index, delta }) => {
                out.w_u1(WIDE);
                out.w_u1(IINC);
                out.w_u2(*index);
                out.w_i2(*delta);
            }
            Insn::Cp { op, index } => {
                out.w_u1(*op);
                out.w_u2(*index);
            }
            Insn::InvokeInterface { index, count } => {
                out.w_u1(INVOKEINTERFACE);
                out.w_u2(*index);
                out.w_u1(*count);
                out.w_u1(0);
            }
            Insn::InvokeDynamic { index } => {
                out.w_u1(INVOKEDYNAMIC);
                out.w_u2(*index);
                out.w_u1(0);
                out.w_u1(0);
            }
            Insn::Newarray(atype) => {
                out.w_u1(NEWARRAY);
                out.w_u1(*atype);
            }
            Insn::Multianewarray { index, dims } => {
                out.w_u1(MULTIANEWARRAY);
                out.w_u2(*index);
                out.w_u1(*dims);
            }
            Insn::Branch { op, delta } => {
                out.w_u1(*op);
                out.w_i2(*delta);
            }
            Insn::BranchW { op, delta } => {
                out.w_u1(*op);
                out.w_i4(*delta);
            }
            Insn::TableSwitch { default, low, high, offsets } => {
                out.w_u1(TABLESWITCH);
                for _ in 0..switch_pad(offset) {
                    out.w_u1(0);
                }
                out.w_i4(*default);
                out.w_i4(*low);
                out.w_i4(*high);
                for o in offsets {
                    out.w_i4(*o);
                }
            }
            Insn::LookupSwitch { default, pairs } => {
                out.w_u1(LOOKUPSWITCH);
                for _ in 0..switch_pad(offset) {
                    out.w_u1(0);
                }
                out.w_i4(*default);
                out.w_i4(pairs.len() as i32);
                for (k, v) in pairs {
                    out.w_i4(*k);
                    out.w_i4(*v);
                }
            }
        }
    }
}

/// Pad byte count after a switch opcode at `offset`: the operand block must
/// start at a 4-byte boundary relative to the start of the code array.
pub fn switch_pad(offset: u32) -> u32 {
    (4 - ((offset + 1) % 4)) % 4
}

fn skip_switch_pad(r: &mut Reader, offset: u32) -> Result<(), ClassFileError> {
    for _ in 0..switch_pad(offset) {
        r.u1()?;
    }
    Ok(())
}

/// Decodes a full code array into (offset, instruction) pairs.
pub fn decode_code(code: &[u8]) -> Result<Vec<(u32, Insn)>, ClassFileError> {
    let mut r = Reader::new(code);
    let mut insns = Vec::new();
    while r.remaining() > 0 {
        let offset = r.pos() as u32;
        let insn = Insn::decode(&mut r, offset)?;
        insns.push((offset, insn));
    }
    Ok(insns)
}

/// Encodes (offset, instruction) pairs back into a code array. Offsets must
/// be the ones the instructions were laid out at; they drive switch padding.
pub fn encode_code(insns: &[(u32, Insn)]) -> Vec<u8> {
    let mut out = Vec::new();
    for (offset, insn) in insns {
        debug_assert_eq!(out.len() as u32, *offset, "layout offset mismatch");
        insn.encode(*offset, &mut out);
    }
    out
}
