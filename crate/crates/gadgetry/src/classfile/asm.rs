//! Declarative class assembly.
//!
//! Builds complete class files from symbolic specs: constants and member
//! references are interned automatically, labels are resolved to branch
//! deltas, and max_stack/max_locals are computed when not given. Output is
//! deterministic: the same spec assembles to the same bytes.
//!
//! Assembled classes use major version 49 (no stack-map requirement), or 50
//! when explicit stack-map frames are attached.

use super::code::{CodeAttribute, CodeBody, ExceptionHandler};
use super::descriptor::parse_method_descriptor;
use super::flags::*;
use super::frames::StackMapFrame;
use super::insn::{op, Insn};
use super::pool::PoolBuilder;
use super::{Attribute, ClassFile, ClassFileError, MemberInfo};
use std::collections::HashMap;

pub type LabelId = u16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvokeKind {
    Virtual,
    Special,
    Static,
    Interface,
}

/// Symbolic instruction.
#[derive(Debug, Clone, PartialEq)]
pub enum AsmInsn {
    /// Position marker; emits nothing.
    Label(LabelId),
    Aload(u16),
    Astore(u16),
    Iload(u16),
    Istore(u16),
    AconstNull,
    /// Integer constant via the shortest encoding (iconst_n/bipush/sipush/ldc).
    Iconst(i32),
    Lconst0,
    Fconst0,
    Dconst0,
    LdcString(String),
    /// Class constant load (`Foo.class`); takes an internal name.
    LdcClassRef(String),
    LdcLong(i64),
    LdcDouble(u64),
    GetField { owner: String, name: String, descriptor: String },
    PutField { owner: String, name: String, descriptor: String },
    GetStatic { owner: String, name: String, descriptor: String },
    PutStatic { owner: String, name: String, descriptor: String },
    Invoke { kind: InvokeKind, owner: String, name: String, descriptor: String },
    New(String),
    Checkcast(String),
    Dup,
    Pop,
    Pop2,
    Swap,
    Athrow,
    Return,
    Areturn,
    Ireturn,
    Lreturn,
    /// Any two-byte-offset branch opcode with a label target.
    Branch { op: u8, target: LabelId },
    TableSwitch { low: i32, default: LabelId, targets: Vec<LabelId> },
    LookupSwitch { default: LabelId, pairs: Vec<(i32, LabelId)> },
    Iinc { index: u8, delta: i8 },
    /// Escape hatch: a fully concrete instruction (pool indices included).
    Raw(Insn),
}

impl AsmInsn {
    pub fn goto(target: LabelId) -> AsmInsn {
        AsmInsn::Branch { op: op::GOTO, target }
    }

    pub fn invoke_virtual(owner: &str, name: &str, descriptor: &str) -> AsmInsn {
        AsmInsn::Invoke {
            kind: InvokeKind::Virtual,
            owner: owner.into(),
            name: name.into(),
            descriptor: descriptor.into(),
        }
    }

    pub fn invoke_special(owner: &str, name: &str, descriptor: &str) -> AsmInsn {
        AsmInsn::Invoke {
            kind: InvokeKind::Special,
            owner: owner.into(),
            name: name.into(),
            descriptor: descriptor.into(),
        }
    }

    pub fn invoke_static(owner: &str, name: &str, descriptor: &str) -> AsmInsn {
        AsmInsn::Invoke {
            kind: InvokeKind::Static,
            owner: owner.into(),
            name: name.into(),
            descriptor: descriptor.into(),
        }
    }

    pub fn invoke_interface(owner: &str, name: &str, descriptor: &str) -> AsmInsn {
        AsmInsn::Invoke {
            kind: InvokeKind::Interface,
            owner: owner.into(),
            name: name.into(),
            descriptor: descriptor.into(),
        }
    }

    pub fn get_field(owner: &str, name: &str, descriptor: &str) -> AsmInsn {
        AsmInsn::GetField { owner: owner.into(), name: name.into(), descriptor: descriptor.into() }
    }

    pub fn put_field(owner: &str, name: &str, descriptor: &str) -> AsmInsn {
        AsmInsn::PutField { owner: owner.into(), name: name.into(), descriptor: descriptor.into() }
    }
}

#[derive(Debug, Clone)]
pub struct HandlerAsm {
    pub start: LabelId,
    pub end: LabelId,
    pub handler: LabelId,
    /// Internal name of the caught class; None for catch-all.
    pub catch_type: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct CodeAsm {
    pub insns: Vec<AsmInsn>,
    pub max_stack: Option<u16>,
    pub max_locals: Option<u16>,
    /// Labels that get a same-frame stack-map entry (empty stack, unchanged
    /// locals). Presence bumps the class to major version 50.
    pub frames_at: Vec<LabelId>,
    pub handlers: Vec<HandlerAsm>,
}

impl CodeAsm {
    pub fn of(insns: Vec<AsmInsn>) -> Self {
        CodeAsm { insns, ..Default::default() }
    }
}

#[derive(Debug, Clone)]
pub struct MethodAsm {
    pub access_flags: u16,
    pub name: String,
    pub descriptor: String,
    pub code: Option<CodeAsm>,
}

impl MethodAsm {
    pub fn new(access_flags: u16, name: &str, descriptor: &str, insns: Vec<AsmInsn>) -> Self {
        MethodAsm {
            access_flags,
            name: name.into(),
            descriptor: descriptor.into(),
            code: Some(CodeAsm::of(insns)),
        }
    }

    pub fn abstract_method(access_flags: u16, name: &str, descriptor: &str) -> Self {
        MethodAsm {
            access_flags: access_flags | ACC_ABSTRACT,
            name: name.into(),
            descriptor: descriptor.into(),
            code: None,
        }
    }

    /// Standard no-arg constructor delegating to the given superclass.
    pub fn default_ctor(super_name: &str) -> Self {
        MethodAsm::new(
            ACC_PUBLIC,
            "<init>",
            "()V",
            vec![
                AsmInsn::Aload(0),
                AsmInsn::invoke_special(super_name, "<init>", "()V"),
                AsmInsn::Return,
            ],
        )
    }
}

#[derive(Debug, Clone)]
pub struct FieldAsm {
    pub access_flags: u16,
    pub name: String,
    pub descriptor: String,
}

#[derive(Debug, Clone)]
pub struct ClassAsm {
    pub name: String,
    pub super_name: Option<String>,
    pub interfaces: Vec<String>,
    pub access_flags: u16,
    /// Overrides the feature-derived default (49, or 50 with frames).
    pub major_version: Option<u16>,
    pub fields: Vec<FieldAsm>,
    pub methods: Vec<MethodAsm>,
    pub source_file: Option<String>,
}

impl ClassAsm {
    /// A public class extending java/lang/Object with a default constructor.
    pub fn new(name: &str) -> Self {
        ClassAsm {
            name: name.into(),
            super_name: Some("java/lang/Object".into()),
            interfaces: Vec::new(),
            access_flags: ACC_PUBLIC | ACC_SUPER,
            major_version: None,
            fields: Vec::new(),
            methods: vec![MethodAsm::default_ctor("java/lang/Object")],
            source_file: None,
        }
    }

    /// A public interface (no constructor, abstract methods only).
    pub fn interface(name: &str) -> Self {
        ClassAsm {
            name: name.into(),
            super_name: Some("java/lang/Object".into()),
            interfaces: Vec::new(),
            access_flags: ACC_PUBLIC | ACC_INTERFACE | ACC_ABSTRACT,
            major_version: None,
            fields: Vec::new(),
            methods: Vec::new(),
            source_file: None,
        }
    }

    pub fn implements(mut self, interfaces: &[&str]) -> Self {
        self.interfaces.extend(interfaces.iter().map(|s| s.to_string()));
        self
    }

    pub fn extends(mut self, super_name: &str) -> Self {
        self.super_name = Some(super_name.into());
        // The default constructor must delegate to the actual superclass.
        for m in &mut self.methods {
            if m.name == "<init>" {
                if let Some(code) = &mut m.code {
                    for insn in &mut code.insns {
                        if let AsmInsn::Invoke { kind: InvokeKind::Special, owner, name, .. } = insn {
                            if name == "<init>" && owner == "java/lang/Object" {
                                *owner = super_name.into();
                            }
                        }
                    }
                }
            }
        }
        self
    }

    pub fn abstract_class(mut self) -> Self {
        self.access_flags |= ACC_ABSTRACT;
        self
    }

    pub fn field(mut self, access_flags: u16, name: &str, descriptor: &str) -> Self {
        self.fields.push(FieldAsm { access_flags, name: name.into(), descriptor: descriptor.into() });
        self
    }

    pub fn method(mut self, m: MethodAsm) -> Self {
        self.methods.push(m);
        self
    }
}

/// Marks symbolic instructions resolved against the pool but with branch
/// targets still pending.
enum Proto {
    Fixed(Insn),
    Branch { op: u8, target: LabelId },
    Table { low: i32, default: LabelId, targets: Vec<LabelId> },
    Lookup { default: LabelId, pairs: Vec<(i32, LabelId)> },
}

impl Proto {
    /// Encoded length at `offset`; branch forms are always the 2-byte-offset
    /// encodings (goto_w is never assembled).
    fn len_at(&self, offset: u32) -> u32 {
        match self {
            Proto::Fixed(i) => i.encoded_len(offset),
            Proto::Branch { .. } => 3,
            Proto::Table { targets, .. } => {
                Insn::TableSwitch { default: 0, low: 0, high: 0, offsets: vec![0; targets.len()] }
                    .encoded_len(offset)
            }
            Proto::Lookup { pairs, .. } => {
                Insn::LookupSwitch { default: 0, pairs: vec![(0, 0); pairs.len()] }.encoded_len(offset)
            }
        }
    }
}

fn local_load(op_base: u8, plain_base: u8, index: u16) -> Insn {
    if index <= 3 {
        Insn::Plain(plain_base + index as u8)
    } else if index <= u8::MAX as u16 {
        Insn::Local { op: op_base, index: index as u8 }
    } else {
        Insn::Wide(super::insn::WideInsn::Local { op: op_base, index })
    }
}

fn ldc_for(index: u16) -> Insn {
    if index <= u8::MAX as u16 {
        Insn::Ldc(index as u8)
    } else {
        Insn::LdcW(index)
    }
}

struct MethodAssembly {
    code: Vec<(u32, Insn)>,
    handlers: Vec<ExceptionHandler>,
    frames: Vec<StackMapFrame>,
    max_locals_seen: u16,
}

fn assemble_code(
    pool: &mut PoolBuilder,
    code: &CodeAsm,
) -> Result<MethodAssembly, ClassFileError> {
    let mut protos: Vec<Proto> = Vec::with_capacity(code.insns.len());
    // Label -> index into protos of the next real instruction.
    let mut label_pos: HashMap<LabelId, usize> = HashMap::new();
    let mut max_locals_seen: u16 = 0;

    for insn in &code.insns {
        match insn {
            AsmInsn::Label(id) => {
                label_pos.insert(*id, protos.len());
                continue;
            }
            AsmInsn::Aload(i) => {
                max_locals_seen = max_locals_seen.max(*i + 1);
                protos.push(Proto::Fixed(local_load(op::ALOAD, op::ALOAD_0, *i)));
            }
            AsmInsn::Astore(i) => {
                max_locals_seen = max_locals_seen.max(*i + 1);
                protos.push(Proto::Fixed(local_load(op::ASTORE, op::ASTORE_0, *i)));
            }
            AsmInsn::Iload(i) => {
                max_locals_seen = max_locals_seen.max(*i + 1);
                protos.push(Proto::Fixed(local_load(op::ILOAD, op::ILOAD_0, *i)));
            }
            AsmInsn::Istore(i) => {
                max_locals_seen = max_locals_seen.max(*i + 1);
                protos.push(Proto::Fixed(local_load(op::ISTORE, op::ISTORE_0, *i)));
            }
            AsmInsn::AconstNull => protos.push(Proto::Fixed(Insn::Plain(op::ACONST_NULL))),
            AsmInsn::Iconst(v) => {
                let insn = match *v {
                    -1..=5 => Insn::Plain((op::ICONST_0 as i32 + *v) as u8),
                    v if i8::try_from(v).is_ok() => Insn::Bipush(v as i8),
                    v if i16::try_from(v).is_ok() => Insn::Sipush(v as i16),
                    v => ldc_for(pool.push(super::Constant::Integer(v))?),
                };
                protos.push(Proto::Fixed(insn));
            }
            AsmInsn::Lconst0 => protos.push(Proto::Fixed(Insn::Plain(op::LCONST_0))),
            AsmInsn::Fconst0 => protos.push(Proto::Fixed(Insn::Plain(op::FCONST_0))),
            AsmInsn::Dconst0 => protos.push(Proto::Fixed(Insn::Plain(op::DCONST_0))),
            AsmInsn::LdcString(s) => {
                let idx = pool.string(s)?;
                protos.push(Proto::Fixed(ldc_for(idx)));
            }
            AsmInsn::LdcClassRef(name) => {
                let idx = pool.class(name)?;
                protos.push(Proto::Fixed(ldc_for(idx)));
            }
            AsmInsn::LdcLong(v) => {
                let idx = pool.push(super::Constant::Long(*v))?;
                protos.push(Proto::Fixed(Insn::Ldc2W(idx)));
            }
            AsmInsn::LdcDouble(bits) => {
                let idx = pool.push(super::Constant::Double(*bits))?;
                protos.push(Proto::Fixed(Insn::Ldc2W(idx)));
            }
            AsmInsn::GetField { owner, name, descriptor } => {
                let idx = pool.fieldref(owner, name, descriptor)?;
                protos.push(Proto::Fixed(Insn::Cp { op: op::GETFIELD, index: idx }));
            }
            AsmInsn::PutField { owner, name, descriptor } => {
                let idx = pool.fieldref(owner, name, descriptor)?;
                protos.push(Proto::Fixed(Insn::Cp { op: op::PUTFIELD, index: idx }));
            }
            AsmInsn::GetStatic { owner, name, descriptor } => {
                let idx = pool.fieldref(owner, name, descriptor)?;
                protos.push(Proto::Fixed(Insn::Cp { op: op::GETSTATIC, index: idx }));
            }
            AsmInsn::PutStatic { owner, name, descriptor } => {
                let idx = pool.fieldref(owner, name, descriptor)?;
                protos.push(Proto::Fixed(Insn::Cp { op: op::PUTSTATIC, index: idx }));
            }
            AsmInsn::Invoke { kind, owner, name, descriptor } => {
                let d = parse_method_descriptor(descriptor)?;
                let insn = match kind {
                    InvokeKind::Virtual => Insn::Cp {
                        op: op::INVOKEVIRTUAL,
                        index: pool.methodref(owner, name, descriptor)?,
                    },
                    InvokeKind::Special => Insn::Cp {
                        op: op::INVOKESPECIAL,
                        index: pool.methodref(owner, name, descriptor)?,
                    },
                    InvokeKind::Static => Insn::Cp {
                        op: op::INVOKESTATIC,
                        index: pool.methodref(owner, name, descriptor)?,
                    },
                    InvokeKind::Interface => Insn::InvokeInterface {
                        index: pool.interface_methodref(owner, name, descriptor)?,
                        count: (d.arg_slots() + 1) as u8,
                    },
                };
                protos.push(Proto::Fixed(insn));
            }
            AsmInsn::New(name) => {
                let idx = pool.class(name)?;
                protos.push(Proto::Fixed(Insn::Cp { op: op::NEW, index: idx }));
            }
            AsmInsn::Checkcast(name) => {
                let idx = pool.class(name)?;
                protos.push(Proto::Fixed(Insn::Cp { op: op::CHECKCAST, index: idx }));
            }
            AsmInsn::Dup => protos.push(Proto::Fixed(Insn::Plain(op::DUP))),
            AsmInsn::Pop => protos.push(Proto::Fixed(Insn::Plain(op::POP))),
            AsmInsn::Pop2 => protos.push(Proto::Fixed(Insn::Plain(op::POP2))),
            AsmInsn::Swap => protos.push(Proto::Fixed(Insn::Plain(op::SWAP))),
            AsmInsn::Athrow => protos.push(Proto::Fixed(Insn::Plain(op::ATHROW))),
            AsmInsn::Return => protos.push(Proto::Fixed(Insn::Plain(op::RETURN))),
            AsmInsn::Areturn => protos.push(Proto::Fixed(Insn::Plain(op::ARETURN))),
            AsmInsn::Ireturn => protos.push(Proto::Fixed(Insn::Plain(op::IRETURN))),
            AsmInsn::Lreturn => protos.push(Proto::Fixed(Insn::Plain(op::LRETURN))),
            AsmInsn::Branch { op: o, target } => protos.push(Proto::Branch { op: *o, target: *target }),
            AsmInsn::TableSwitch { low, default, targets } => {
                protos.push(Proto::Table { low: *low, default: *default, targets: targets.clone() })
            }
            AsmInsn::LookupSwitch { default, pairs } => {
                protos.push(Proto::Lookup { default: *default, pairs: pairs.clone() })
            }
            AsmInsn::Iinc { index, delta } => {
                protos.push(Proto::Fixed(Insn::Iinc { index: *index, delta: *delta }))
            }
            AsmInsn::Raw(i) => protos.push(Proto::Fixed(i.clone())),
        }
    }

    // Layout pass: lengths depend only on each instruction's own offset.
    let mut offsets = Vec::with_capacity(protos.len());
    let mut off: u32 = 0;
    for p in &protos {
        offsets.push(off);
        off += p.len_at(off);
    }
    let code_len = off;

    let label_offset = |id: LabelId| -> Result<u32, ClassFileError> {
        match label_pos.get(&id) {
            Some(&pos) if pos < offsets.len() => Ok(offsets[pos]),
            Some(_) => Ok(code_len),
            None => Err(ClassFileError::BadBranchTarget { target: id as u32 }),
        }
    };

    // Resolution pass.
    let mut out = Vec::with_capacity(protos.len());
    for (pos, p) in protos.iter().enumerate() {
        let at = offsets[pos];
        let insn = match p {
            Proto::Fixed(i) => i.clone(),
            Proto::Branch { op: o, target } => {
                let delta = label_offset(*target)? as i64 - at as i64;
                let delta = i16::try_from(delta).map_err(|_| ClassFileError::OffsetOverflow { at })?;
                Insn::Branch { op: *o, delta }
            }
            Proto::Table { low, default, targets } => {
                let mut rel = Vec::with_capacity(targets.len());
                for t in targets {
                    rel.push((label_offset(*t)? as i64 - at as i64) as i32);
                }
                Insn::TableSwitch {
                    default: (label_offset(*default)? as i64 - at as i64) as i32,
                    low: *low,
                    high: *low + targets.len() as i32 - 1,
                    offsets: rel,
                }
            }
            Proto::Lookup { default, pairs } => {
                let mut rel = Vec::with_capacity(pairs.len());
                for (k, t) in pairs {
                    rel.push((*k, (label_offset(*t)? as i64 - at as i64) as i32));
                }
                Insn::LookupSwitch {
                    default: (label_offset(*default)? as i64 - at as i64) as i32,
                    pairs: rel,
                }
            }
        };
        out.push((at, insn));
    }

    let mut handlers = Vec::with_capacity(code.handlers.len());
    for h in &code.handlers {
        let catch_type = match &h.catch_type {
            Some(name) => pool.class(name)?,
            None => 0,
        };
        handlers.push(ExceptionHandler {
            start_pc: label_offset(h.start)? as u16,
            end_pc: label_offset(h.end)? as u16,
            handler_pc: label_offset(h.handler)? as u16,
            catch_type,
        });
    }

    let mut frame_offsets: Vec<u32> = code
        .frames_at
        .iter()
        .map(|id| label_offset(*id))
        .collect::<Result<_, _>>()?;
    frame_offsets.sort_unstable();
    frame_offsets.dedup();
    let mut frames = Vec::with_capacity(frame_offsets.len());
    let mut prev: Option<u32> = None;
    for abs in frame_offsets {
        let delta = match prev {
            None => abs,
            Some(p) => abs - p - 1,
        };
        frames.push(if delta <= 63 {
            StackMapFrame::Same { delta: delta as u8 }
        } else {
            StackMapFrame::SameExtended { delta: delta as u16 }
        });
        prev = Some(abs);
    }

    Ok(MethodAssembly { code: out, handlers, frames, max_locals_seen })
}

/// Assembles a class file from a symbolic spec.
pub fn assemble_class(spec: &ClassAsm) -> Result<ClassFile, ClassFileError> {
    let mut pool = PoolBuilder::new();
    let this_class = pool.class(&spec.name)?;
    let super_class = match &spec.super_name {
        Some(s) => pool.class(s)?,
        None => 0,
    };
    let mut interfaces = Vec::with_capacity(spec.interfaces.len());
    for i in &spec.interfaces {
        interfaces.push(pool.class(i)?);
    }

    let mut fields = Vec::with_capacity(spec.fields.len());
    for f in &spec.fields {
        fields.push(MemberInfo {
            access_flags: f.access_flags,
            name_index: pool.utf8(&f.name)?,
            descriptor_index: pool.utf8(&f.descriptor)?,
            attributes: Vec::new(),
        });
    }

    let mut any_frames = false;
    let mut methods = Vec::with_capacity(spec.methods.len());
    for m in &spec.methods {
        let descriptor = parse_method_descriptor(&m.descriptor)?;
        let name_index = pool.utf8(&m.name)?;
        let descriptor_index = pool.utf8(&m.descriptor)?;
        let mut attributes = Vec::new();
        if let Some(code) = &m.code {
            let code_name = pool.utf8("Code")?;
            let assembled = assemble_code(&mut pool, code)?;
            let arg_slots: u16 = descriptor.arg_slots();
            let implicit = arg_slots + if m.access_flags & ACC_STATIC == 0 { 1 } else { 0 };
            let max_locals = code.max_locals.unwrap_or(implicit.max(assembled.max_locals_seen));
            let max_stack = match code.max_stack {
                Some(v) => v,
                None => super::code::linear_max_stack(&assembled.code, pool.pool())?,
            };
            let mut code_attrs = Vec::new();
            if !assembled.frames.is_empty() {
                any_frames = true;
                let name_index = pool.utf8(super::code::ATTR_STACK_MAP_TABLE)?;
                code_attrs.push(CodeAttribute::StackMapTable { name_index, frames: assembled.frames });
            }
            attributes.push(Attribute::Code {
                name_index: code_name,
                body: CodeBody {
                    max_stack,
                    max_locals,
                    code: assembled.code,
                    handlers: assembled.handlers,
                    attributes: code_attrs,
                },
            });
        }
        methods.push(MemberInfo {
            access_flags: m.access_flags,
            name_index,
            descriptor_index,
            attributes,
        });
    }

    let mut attributes = Vec::new();
    if let Some(sf) = &spec.source_file {
        let name_index = pool.utf8("SourceFile")?;
        let value_index = pool.utf8(sf)?;
        attributes.push(Attribute::Opaque { name_index, data: value_index.to_be_bytes().to_vec() });
    }

    let major_version = spec.major_version.unwrap_or(if any_frames { 50 } else { 49 });
    Ok(ClassFile {
        minor_version: 0,
        major_version,
        pool: pool.into_pool(),
        access_flags: spec.access_flags,
        this_class,
        super_class,
        interfaces,
        fields,
        methods,
        attributes,
    })
}
