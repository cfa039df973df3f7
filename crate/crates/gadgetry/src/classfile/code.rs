//! Code attribute model, emission, and the offset-fixing rewriter.
//!
//! `rewrite_code` replaces single instructions with short straight-line
//! sequences and repairs everything that encodes a bytecode offset: branch
//! deltas, switch tables and their alignment padding, exception-handler
//! ranges, and StackMapTable frames. Debug tables whose offsets would go
//! stale (LineNumberTable, LocalVariableTable, LocalVariableTypeTable) are
//! dropped from edited methods only.

use super::bytes::{Reader, WriteBytes};
use super::descriptor::{field_slots, parse_method_descriptor};
use super::frames::{self, StackMapFrame};
use super::insn::{op, Insn, WideInsn};
use super::pool::{Constant, ConstantPool};
use super::ClassFileError;
use std::collections::HashMap;

pub const ATTR_STACK_MAP_TABLE: &str = "StackMapTable";
pub const ATTR_LINE_NUMBER_TABLE: &str = "LineNumberTable";
pub const ATTR_LOCAL_VARIABLE_TABLE: &str = "LocalVariableTable";
pub const ATTR_LOCAL_VARIABLE_TYPE_TABLE: &str = "LocalVariableTypeTable";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExceptionHandler {
    pub start_pc: u16,
    pub end_pc: u16,
    pub handler_pc: u16,
    pub catch_type: u16,
}

/// Attribute nested inside a Code attribute. Only StackMapTable is decoded
/// structurally; everything else is an opaque blob preserved verbatim.
#[derive(Debug, Clone, PartialEq)]
pub enum CodeAttribute {
    StackMapTable { name_index: u16, frames: Vec<StackMapFrame> },
    Opaque { name_index: u16, data: Vec<u8> },
}

impl CodeAttribute {
    pub fn name_index(&self) -> u16 {
        match self {
            CodeAttribute::StackMapTable { name_index, .. } => *name_index,
            CodeAttribute::Opaque { name_index, .. } => *name_index,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodeBody {
    pub max_stack: u16,
    pub max_locals: u16,
    /// Instructions with their bytecode offsets, in order.
    pub code: Vec<(u32, Insn)>,
    pub handlers: Vec<ExceptionHandler>,
    pub attributes: Vec<CodeAttribute>,
}

impl CodeBody {
    /// Byte length of the encoded code array.
    pub fn code_len(&self) -> u32 {
        match self.code.last() {
            None => 0,
            Some((off, insn)) => off + insn.encoded_len(*off),
        }
    }

    /// Parses a Code attribute payload (after the name/length framing).
    pub fn parse(data: &[u8], pool: &ConstantPool) -> Result<CodeBody, ClassFileError> {
        let mut r = Reader::new(data);
        let max_stack = r.u2()?;
        let max_locals = r.u2()?;
        let code_len = r.u4()? as usize;
        let code_bytes = r.take(code_len)?;
        let code = super::insn::decode_code(code_bytes)?;
        let handler_count = r.u2()?;
        let mut handlers = Vec::with_capacity(handler_count as usize);
        for _ in 0..handler_count {
            handlers.push(ExceptionHandler {
                start_pc: r.u2()?,
                end_pc: r.u2()?,
                handler_pc: r.u2()?,
                catch_type: r.u2()?,
            });
        }
        let attr_count = r.u2()?;
        let mut attributes = Vec::with_capacity(attr_count as usize);
        for _ in 0..attr_count {
            let name_index = r.u2()?;
            let len = r.u4()? as usize;
            let data = r.take(len)?.to_vec();
            let name = pool.utf8_str(name_index)?;
            if name == ATTR_STACK_MAP_TABLE {
                attributes.push(CodeAttribute::StackMapTable {
                    name_index,
                    frames: frames::parse_stack_map(&data)?,
                });
            } else {
                attributes.push(CodeAttribute::Opaque { name_index, data });
            }
        }
        if r.remaining() != 0 {
            return Err(ClassFileError::Truncated { at: r.pos() });
        }
        Ok(CodeBody { max_stack, max_locals, code, handlers, attributes })
    }

    /// Emits the Code attribute payload (after the name/length framing).
    pub fn emit_payload(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.w_u2(self.max_stack);
        out.w_u2(self.max_locals);
        let code_bytes = super::insn::encode_code(&self.code);
        out.w_u4(code_bytes.len() as u32);
        out.extend_from_slice(&code_bytes);
        out.w_u2(self.handlers.len() as u16);
        for h in &self.handlers {
            out.w_u2(h.start_pc);
            out.w_u2(h.end_pc);
            out.w_u2(h.handler_pc);
            out.w_u2(h.catch_type);
        }
        out.w_u2(self.attributes.len() as u16);
        for attr in &self.attributes {
            match attr {
                CodeAttribute::StackMapTable { name_index, frames: fs } => {
                    let mut payload = Vec::new();
                    frames::emit_stack_map(fs, &mut payload);
                    out.w_u2(*name_index);
                    out.w_u4(payload.len() as u32);
                    out.extend_from_slice(&payload);
                }
                CodeAttribute::Opaque { name_index, data } => {
                    out.w_u2(*name_index);
                    out.w_u4(data.len() as u32);
                    out.extend_from_slice(data);
                }
            }
        }
        out
    }
}

/// One edit: the instruction starting at `at` is replaced by `replacement`.
/// A replacement that begins with the original instruction is an insertion
/// after it. Replacements must be straight-line code (no branches).
#[derive(Debug, Clone)]
pub struct CodeEdit {
    pub at: u32,
    pub replacement: Vec<Insn>,
}

/// Applies edits and repairs every offset-bearing structure. An empty edit
/// list returns the body unchanged, debug tables included.
pub fn rewrite_code(
    body: &CodeBody,
    edits: &[CodeEdit],
    pool: &ConstantPool,
) -> Result<CodeBody, ClassFileError> {
    if edits.is_empty() {
        return Ok(body.clone());
    }

    let old_code = &body.code;
    let old_len = body.code_len();
    let mut start_to_idx: HashMap<u32, usize> = HashMap::with_capacity(old_code.len());
    for (idx, (off, _)) in old_code.iter().enumerate() {
        start_to_idx.insert(*off, idx);
    }

    let mut edit_by_idx: HashMap<usize, &CodeEdit> = HashMap::new();
    for edit in edits {
        assert!(!edit.replacement.is_empty(), "replacement must not be empty");
        for insn in &edit.replacement {
            assert!(!insn.is_branch(), "replacements must be straight-line code");
        }
        let idx = *start_to_idx
            .get(&edit.at)
            .ok_or(ClassFileError::EditTargetNotInstructionStart { at: edit.at })?;
        if edit_by_idx.insert(idx, edit).is_some() {
            return Err(ClassFileError::EditTargetNotInstructionStart { at: edit.at });
        }
    }

    // New instruction list; entries remember which old instruction they came
    // from so branch targets can be recomputed from old absolute offsets.
    let mut new_insns: Vec<(Option<usize>, Insn)> = Vec::with_capacity(old_code.len() + edits.len());
    let mut old_to_new_pos: Vec<usize> = Vec::with_capacity(old_code.len());
    for (idx, (_, insn)) in old_code.iter().enumerate() {
        old_to_new_pos.push(new_insns.len());
        match edit_by_idx.get(&idx) {
            Some(edit) => {
                for (k, rep) in edit.replacement.iter().enumerate() {
                    let origin = if k == 0 { Some(idx) } else { None };
                    new_insns.push((origin, rep.clone()));
                }
            }
            None => new_insns.push((Some(idx), insn.clone())),
        }
    }

    // Single forward pass: each length depends only on its own offset.
    let mut new_offsets: Vec<u32> = Vec::with_capacity(new_insns.len());
    let mut off: u32 = 0;
    for (_, insn) in &new_insns {
        new_offsets.push(off);
        off += insn.encoded_len(off);
    }
    let new_len = off;

    let map_offset = |old: u32| -> Result<u32, ClassFileError> {
        if old == old_len {
            return Ok(new_len);
        }
        match start_to_idx.get(&old) {
            Some(&idx) => Ok(new_offsets[old_to_new_pos[idx]]),
            None => Err(ClassFileError::BadBranchTarget { target: old }),
        }
    };

    // Repair branch deltas and switch tables on surviving instructions.
    let mut new_code: Vec<(u32, Insn)> = Vec::with_capacity(new_insns.len());
    for (pos, (origin, insn)) in new_insns.iter().enumerate() {
        let new_off = new_offsets[pos];
        let fixed = match (origin, insn) {
            (Some(old_idx), insn) if insn.is_branch() => {
                let old_off = old_code[*old_idx].0;
                let remap_rel = |delta: i64| -> Result<i64, ClassFileError> {
                    let old_target = old_off as i64 + delta;
                    if old_target < 0 || old_target > old_len as i64 {
                        return Err(ClassFileError::BadBranchTarget { target: old_target as u32 });
                    }
                    let new_target = map_offset(old_target as u32)?;
                    Ok(new_target as i64 - new_off as i64)
                };
                match insn {
                    Insn::Branch { op, delta } => {
                        let d = remap_rel(*delta as i64)?;
                        let d16 = i16::try_from(d)
                            .map_err(|_| ClassFileError::OffsetOverflow { at: new_off })?;
                        Insn::Branch { op: *op, delta: d16 }
                    }
                    Insn::BranchW { op, delta } => {
                        let d = remap_rel(*delta as i64)?;
                        let d32 = i32::try_from(d)
                            .map_err(|_| ClassFileError::OffsetOverflow { at: new_off })?;
                        Insn::BranchW { op: *op, delta: d32 }
                    }
                    Insn::TableSwitch { default, low, high, offsets } => {
                        let mut mapped = Vec::with_capacity(offsets.len());
                        for o in offsets {
                            mapped.push(
                                i32::try_from(remap_rel(*o as i64)?)
                                    .map_err(|_| ClassFileError::OffsetOverflow { at: new_off })?,
                            );
                        }
                        Insn::TableSwitch {
                            default: i32::try_from(remap_rel(*default as i64)?)
                                .map_err(|_| ClassFileError::OffsetOverflow { at: new_off })?,
                            low: *low,
                            high: *high,
                            offsets: mapped,
                        }
                    }
                    Insn::LookupSwitch { default, pairs } => {
                        let mut mapped = Vec::with_capacity(pairs.len());
                        for (k, v) in pairs {
                            mapped.push((
                                *k,
                                i32::try_from(remap_rel(*v as i64)?)
                                    .map_err(|_| ClassFileError::OffsetOverflow { at: new_off })?,
                            ));
                        }
                        Insn::LookupSwitch {
                            default: i32::try_from(remap_rel(*default as i64)?)
                                .map_err(|_| ClassFileError::OffsetOverflow { at: new_off })?,
                            pairs: mapped,
                        }
                    }
                    _ => unreachable!(),
                }
            }
            (_, insn) => insn.clone(),
        };
        new_code.push((new_off, fixed));
    }

    let map_pc16 = |old: u16| -> Result<u16, ClassFileError> {
        let mapped = map_offset(old as u32)?;
        u16::try_from(mapped).map_err(|_| ClassFileError::OffsetOverflow { at: mapped })
    };

    let mut handlers = Vec::with_capacity(body.handlers.len());
    for h in &body.handlers {
        handlers.push(ExceptionHandler {
            start_pc: map_pc16(h.start_pc)?,
            end_pc: map_pc16(h.end_pc)?,
            handler_pc: map_pc16(h.handler_pc)?,
            catch_type: h.catch_type,
        });
    }

    let mut attributes = Vec::with_capacity(body.attributes.len());
    for attr in &body.attributes {
        match attr {
            CodeAttribute::StackMapTable { name_index, frames: old_frames } => {
                let old_abs = frames::frame_offsets(old_frames);
                let mut new_abs = Vec::with_capacity(old_abs.len());
                for abs in &old_abs {
                    new_abs.push(map_offset(*abs)?);
                }
                let mut new_frames = frames::reencode_deltas(old_frames, &new_abs)?;
                for f in &mut new_frames {
                    f.map_uninitialized(&map_pc16)?;
                }
                attributes.push(CodeAttribute::StackMapTable { name_index: *name_index, frames: new_frames });
            }
            CodeAttribute::Opaque { name_index, data } => {
                let name = pool.utf8_str(*name_index)?;
                if name == ATTR_LINE_NUMBER_TABLE
                    || name == ATTR_LOCAL_VARIABLE_TABLE
                    || name == ATTR_LOCAL_VARIABLE_TYPE_TABLE
                {
                    continue;
                }
                attributes.push(CodeAttribute::Opaque { name_index: *name_index, data: data.clone() });
            }
        }
    }

    let simulated = linear_max_stack(&new_code, pool)?;
    Ok(CodeBody {
        max_stack: body.max_stack.max(simulated),
        max_locals: body.max_locals,
        code: new_code,
        handlers,
        attributes,
    })
}

/// Straight-line operand stack simulation: walks the instruction list in
/// order, clamping at zero across control transfers, and reports the maximum
/// depth reached. Used to confirm that replacements keep the stack shape and
/// to grow max_stack conservatively for inserted sequences.
pub fn linear_max_stack(code: &[(u32, Insn)], pool: &ConstantPool) -> Result<u16, ClassFileError> {
    let mut depth: i64 = 0;
    let mut max_depth: i64 = 0;
    for (_, insn) in code {
        let (pops, pushes) = stack_effect(insn, pool)?;
        depth = (depth - pops as i64).max(0) + pushes as i64;
        max_depth = max_depth.max(depth);
    }
    Ok(max_depth.min(u16::MAX as i64) as u16)
}

fn invoke_effect(
    pool: &ConstantPool,
    index: u16,
    has_receiver: bool,
) -> Result<(u16, u16), ClassFileError> {
    let (_, _, descriptor) = pool.member_ref(index)?;
    let d = parse_method_descriptor(&descriptor)?;
    let pops = d.arg_slots() + if has_receiver { 1 } else { 0 };
    Ok((pops, d.ret_slots()))
}

fn field_effect(pool: &ConstantPool, index: u16) -> Result<u16, ClassFileError> {
    let (_, _, descriptor) = pool.member_ref(index)?;
    field_slots(&descriptor)
}

/// (pops, pushes) in operand-stack slots.
fn stack_effect(insn: &Insn, pool: &ConstantPool) -> Result<(u16, u16), ClassFileError> {
    use op::*;
    Ok(match insn {
        Insn::Plain(opcode) => plain_effect(*opcode),
        Insn::Bipush(_) | Insn::Sipush(_) => (0, 1),
        Insn::Ldc(i) => (0, ldc_width(pool, *i as u16)?),
        Insn::LdcW(i) => (0, ldc_width(pool, *i)?),
        Insn::Ldc2W(_) => (0, 2),
        Insn::Local { op, .. } | Insn::Wide(WideInsn::Local { op, .. }) => match *op {
            ILOAD | FLOAD | ALOAD => (0, 1),
            LLOAD | DLOAD => (0, 2),
            ISTORE | FSTORE | ASTORE => (1, 0),
            LSTORE | DSTORE => (2, 0),
            RET => (0, 0),
            _ => (0, 0),
        },
        Insn::Iinc { .. } | Insn::Wide(WideInsn::Iinc { .. }) => (0, 0),
        Insn::Cp { op, index } => match *op {
            GETSTATIC => (0, field_effect(pool, *index)?),
            PUTSTATIC => (field_effect(pool, *index)?, 0),
            GETFIELD => (1, field_effect(pool, *index)?),
            PUTFIELD => (1 + field_effect(pool, *index)?, 0),
            INVOKEVIRTUAL | INVOKESPECIAL => invoke_effect(pool, *index, true)?,
            INVOKESTATIC => invoke_effect(pool, *index, false)?,
            NEW => (0, 1),
            ANEWARRAY | CHECKCAST | INSTANCEOF => (1, 1),
            _ => (0, 0),
        },
        Insn::InvokeInterface { index, .. } => invoke_effect(pool, *index, true)?,
        Insn::InvokeDynamic { index } => {
            let nat = match pool.get(*index)? {
                Constant::InvokeDynamic { name_and_type_index, .. } => *name_and_type_index,
                _ => {
                    return Err(ClassFileError::MalformedPool {
                        index: *index,
                        reason: "expected InvokeDynamic".into(),
                    })
                }
            };
            let (_, descriptor) = pool.name_and_type(nat)?;
            let d = parse_method_descriptor(&descriptor)?;
            (d.arg_slots(), d.ret_slots())
        }
        Insn::Newarray(_) => (1, 1),
        Insn::Multianewarray { dims, .. } => (*dims as u16, 1),
        Insn::Branch { op, .. } => match *op {
            IFEQ..=IFLE | IFNULL | IFNONNULL => (1, 0),
            IF_ICMPEQ..=IF_ACMPNE => (2, 0),
            GOTO => (0, 0),
            JSR => (0, 1),
            _ => (0, 0),
        },
        Insn::BranchW { op, .. } => {
            if *op == JSR_W {
                (0, 1)
            } else {
                (0, 0)
            }
        }
        Insn::TableSwitch { .. } | Insn::LookupSwitch { .. } => (1, 0),
    })
}

fn ldc_width(pool: &ConstantPool, index: u16) -> Result<u16, ClassFileError> {
    // Loadable category-1 constants push one slot; ldc2_w covers category 2.
    match pool.get(index)? {
        Constant::Integer(_)
        | Constant::Float(_)
        | Constant::String { .. }
        | Constant::Class { .. }
        | Constant::MethodHandle { .. }
        | Constant::MethodType { .. }
        | Constant::Dynamic { .. } => Ok(1),
        _ => Err(ClassFileError::MalformedPool {
            index,
            reason: "constant not loadable by ldc".into(),
        }),
    }
}

fn plain_effect(opcode: u8) -> (u16, u16) {
    use op::*;
    match opcode {
        NOP => (0, 0),
        ACONST_NULL | 0x02..=0x08 | 0x0b..=0x0d => (0, 1),
        0x09 | 0x0a | 0x0e | 0x0f => (0, 2),
        0x1a..=0x1d | 0x22..=0x25 | 0x2a..=0x2d => (0, 1),
        0x1e..=0x21 | 0x26..=0x29 => (0, 2),
        0x2f | 0x31 => (2, 2),
        0x2e | 0x30 | 0x32..=0x35 => (2, 1),
        0x3b..=0x3e | 0x43..=0x46 | 0x4b..=0x4e => (1, 0),
        0x3f..=0x42 | 0x47..=0x4a => (2, 0),
        0x50 | 0x52 => (4, 0),
        0x4f | 0x51 | 0x53..=0x56 => (3, 0),
        POP => (1, 0),
        POP2 => (2, 0),
        DUP => (1, 2),
        DUP_X1 => (2, 3),
        DUP_X2 => (3, 4),
        DUP2 => (2, 4),
        DUP2_X1 => (3, 5),
        DUP2_X2 => (4, 6),
        SWAP => (2, 2),
        0x60 | 0x62 | 0x64 | 0x66 | 0x68 | 0x6a | 0x6c | 0x6e | 0x70 | 0x72 => (2, 1),
        0x61 | 0x63 | 0x65 | 0x67 | 0x69 | 0x6b | 0x6d | 0x6f | 0x71 | 0x73 => (4, 2),
        0x74 | 0x76 => (1, 1),
        0x75 | 0x77 => (2, 2),
        0x78 | 0x7a | 0x7c => (2, 1),
        0x79 | 0x7b | 0x7d => (3, 2),
        0x7e | 0x80 | 0x82 => (2, 1),
        0x7f | 0x81 | 0x83 => (4, 2),
        0x85 | 0x87 => (1, 2),
        0x86 | 0x8b | 0x91 | 0x92 | 0x93 => (1, 1),
        0x88 | 0x89 | 0x8e | 0x90 => (2, 1),
        0x8a | 0x8f => (2, 2),
        0x8c | 0x8d => (1, 2),
        LCMP => (4, 1),
        FCMPL | FCMPG => (2, 1),
        DCMPL | DCMPG => (4, 1),
        IRETURN | FRETURN | ARETURN => (1, 0),
        LRETURN | DRETURN => (2, 0),
        RETURN => (0, 0),
        ARRAYLENGTH => (1, 1),
        ATHROW | MONITORENTER | MONITOREXIT => (1, 0),
        _ => (0, 0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classfile::pool::PoolBuilder;

    fn test_pool() -> (ConstantPool, u16, u16) {
        let mut b = PoolBuilder::new();
        let string_idx = b.string("hello").unwrap();
        let field_idx = b.fieldref("a/B", "f", "Ljava/lang/String;").unwrap();
        b.utf8(ATTR_LINE_NUMBER_TABLE).unwrap();
        b.utf8(ATTR_LOCAL_VARIABLE_TABLE).unwrap();
        b.utf8(ATTR_STACK_MAP_TABLE).unwrap();
        (b.into_pool(), string_idx, field_idx)
    }

    fn ldc_swap(field_idx: u16) -> Vec<Insn> {
        vec![
            Insn::Plain(op::ALOAD_0),
            Insn::Cp { op: op::GETFIELD, index: field_idx },
        ]
    }

    /// goto at 0 jumps over an ldc at 5; replacing the 2-byte ldc with a
    /// 4-byte sequence moves the target from 20 to 22.
    #[test]
    fn forward_branch_grows_by_two_per_replaced_ldc() {
        let (pool, string_idx, field_idx) = test_pool();
        let code = vec![
            (0u32, Insn::Branch { op: op::GOTO, delta: 20 }),
            (3, Insn::Plain(op::NOP)),
            (4, Insn::Plain(op::NOP)),
            (5, Insn::Ldc(string_idx as u8)),
            (7, Insn::Plain(op::POP)),
            (8, Insn::Plain(op::NOP)),
            (9, Insn::Plain(op::NOP)),
            (10, Insn::Plain(op::NOP)),
            (11, Insn::Plain(op::NOP)),
            (12, Insn::Plain(op::NOP)),
            (13, Insn::Plain(op::NOP)),
            (14, Insn::Plain(op::NOP)),
            (15, Insn::Plain(op::NOP)),
            (16, Insn::Plain(op::NOP)),
            (17, Insn::Plain(op::NOP)),
            (18, Insn::Plain(op::NOP)),
            (19, Insn::Plain(op::NOP)),
            (20, Insn::Plain(op::RETURN)),
        ];
        let body = CodeBody { max_stack: 1, max_locals: 1, code, handlers: vec![], attributes: vec![] };
        let edits = [CodeEdit { at: 5, replacement: ldc_swap(field_idx) }];
        let out = rewrite_code(&body, &edits, &pool).unwrap();
        assert_eq!(out.code[0].1, Insn::Branch { op: op::GOTO, delta: 22 });
        assert_eq!(out.code_len(), body.code_len() + 2);
        assert_eq!(out.max_stack, 1);
    }

    #[test]
    fn empty_edit_list_returns_identical_body() {
        let (pool, string_idx, _) = test_pool();
        let body = CodeBody {
            max_stack: 1,
            max_locals: 1,
            code: vec![(0, Insn::Ldc(string_idx as u8)), (2, Insn::Plain(op::POP)), (3, Insn::Plain(op::RETURN))],
            handlers: vec![],
            attributes: vec![CodeAttribute::Opaque { name_index: 9, data: vec![0, 0] }],
        };
        let out = rewrite_code(&body, &[], &pool).unwrap();
        assert_eq!(out, body);
    }

    #[test]
    fn edit_inside_instruction_is_rejected() {
        let (pool, string_idx, field_idx) = test_pool();
        let body = CodeBody {
            max_stack: 1,
            max_locals: 1,
            code: vec![(0, Insn::Ldc(string_idx as u8)), (2, Insn::Plain(op::RETURN))],
            handlers: vec![],
            attributes: vec![],
        };
        let err = rewrite_code(&body, &[CodeEdit { at: 1, replacement: ldc_swap(field_idx) }], &pool).unwrap_err();
        assert!(matches!(err, ClassFileError::EditTargetNotInstructionStart { at: 1 }));
    }

    #[test]
    fn handler_ranges_and_stack_map_shift_with_the_edit() {
        let (pool, string_idx, field_idx) = test_pool();
        // try { ldc; pop } handler at 8; stack map frame at the handler.
        let code = vec![
            (0u32, Insn::Ldc(string_idx as u8)),
            (2, Insn::Plain(op::POP)),
            (3, Insn::Branch { op: op::GOTO, delta: 6 }),
            (6, Insn::Plain(op::NOP)),
            (7, Insn::Plain(op::NOP)),
            (8, Insn::Plain(op::POP)),
            (9, Insn::Plain(op::RETURN)),
        ];
        let smt_name = 9; // arbitrary valid Utf8 slot is not required for rewrite
        let body = CodeBody {
            max_stack: 1,
            max_locals: 1,
            code,
            handlers: vec![ExceptionHandler { start_pc: 0, end_pc: 3, handler_pc: 8, catch_type: 0 }],
            attributes: vec![CodeAttribute::StackMapTable {
                name_index: smt_name,
                frames: vec![StackMapFrame::SameLocals1 {
                    delta: 8,
                    stack: frames::VerificationType::Object(1),
                }],
            }],
        };
        let out = rewrite_code(&body, &[CodeEdit { at: 0, replacement: ldc_swap(field_idx) }], &pool).unwrap();
        assert_eq!(out.handlers[0], ExceptionHandler { start_pc: 0, end_pc: 5, handler_pc: 10, catch_type: 0 });
        match &out.attributes[0] {
            CodeAttribute::StackMapTable { frames: fs, .. } => {
                assert_eq!(frames::frame_offsets(fs), vec![10]);
            }
            _ => panic!("stack map missing"),
        }
    }

    #[test]
    fn debug_tables_dropped_only_when_edited() {
        let (pool, string_idx, field_idx) = test_pool();
        let lnt_index = {
            // Locate the LineNumberTable Utf8 added by test_pool.
            pool.iter_entries()
                .find(|(_, c)| matches!(c, Constant::Utf8(b) if b == ATTR_LINE_NUMBER_TABLE.as_bytes()))
                .unwrap()
                .0
        };
        let body = CodeBody {
            max_stack: 1,
            max_locals: 1,
            code: vec![(0, Insn::Ldc(string_idx as u8)), (2, Insn::Plain(op::POP)), (3, Insn::Plain(op::RETURN))],
            handlers: vec![],
            attributes: vec![CodeAttribute::Opaque { name_index: lnt_index, data: vec![0, 1, 0, 0, 0, 1] }],
        };
        let out = rewrite_code(&body, &[CodeEdit { at: 0, replacement: ldc_swap(field_idx) }], &pool).unwrap();
        assert!(out.attributes.is_empty());
    }

    #[test]
    fn switch_padding_recomputed_when_offsets_shift() {
        let (pool, string_idx, field_idx) = test_pool();
        // ldc at 0 (2 bytes), tableswitch at 2: pad 1. After the swap the
        // switch starts at 4: pad 3, and relative targets must still land on
        // the same instructions.
        let code = vec![
            (0u32, Insn::Ldc(string_idx as u8)),
            (2, Insn::Plain(op::POP)),
            (3, Insn::Plain(op::ICONST_0)),
            (
                4,
                Insn::TableSwitch { default: 24, low: 0, high: 1, offsets: vec![24, 25] },
            ),
            (28, Insn::Plain(op::RETURN)),
            (29, Insn::Plain(op::RETURN)),
        ];
        let body = CodeBody { max_stack: 1, max_locals: 1, code, handlers: vec![], attributes: vec![] };
        let out = rewrite_code(&body, &[CodeEdit { at: 0, replacement: ldc_swap(field_idx) }], &pool).unwrap();
        let (sw_off, sw) = out
            .code
            .iter()
            .find(|(_, i)| matches!(i, Insn::TableSwitch { .. }))
            .cloned()
            .unwrap();
        assert_eq!(sw_off, 6);
        match sw {
            Insn::TableSwitch { default, offsets, .. } => {
                assert_eq!(default + sw_off as i32, 28);
                assert_eq!(offsets.iter().map(|o| o + sw_off as i32).collect::<Vec<_>>(), vec![28, 29]);
            }
            _ => unreachable!(),
        }
        // The swap added 2 bytes but the switch pad shrank from 3 to 1, so
        // the total length is unchanged and the targets still line up.
        assert_eq!(out.code_len(), 30);
    }

    #[test]
    fn constructor_insertion_grows_max_stack() {
        let mut b = PoolBuilder::new();
        let ctor = b.methodref("java/lang/Object", "<init>", "()V").unwrap();
        let string_idx = b.string("v").unwrap();
        let field = b.fieldref("a/B", "f", "Ljava/lang/String;").unwrap();
        let pool = b.into_pool();
        let body = CodeBody {
            max_stack: 1,
            max_locals: 1,
            code: vec![
                (0, Insn::Plain(op::ALOAD_0)),
                (1, Insn::Cp { op: op::INVOKESPECIAL, index: ctor }),
                (4, Insn::Plain(op::RETURN)),
            ],
            handlers: vec![],
            attributes: vec![],
        };
        let edits = [CodeEdit {
            at: 1,
            replacement: vec![
                Insn::Cp { op: op::INVOKESPECIAL, index: ctor },
                Insn::Plain(op::ALOAD_0),
                Insn::Ldc(string_idx as u8),
                Insn::Cp { op: op::PUTFIELD, index: field },
            ],
        }];
        let out = rewrite_code(&body, &edits, &pool).unwrap();
        assert_eq!(out.max_stack, 2);
        assert_eq!(out.code.len(), 6);
    }
}
