//! Class-file parsing, emission, rewriting, and assembly.
//!
//! The model is read-faithful: everything not needed structurally is kept as
//! opaque bytes, and `emit_class(parse_class(b)) == b` holds for any class
//! file this module accepts. Only Code attributes (and StackMapTable inside
//! them) are decoded, because bytecode edits must repair their offsets.

mod bytes;
pub mod asm;
pub mod code;
pub mod descriptor;
pub mod frames;
pub mod insn;
pub mod pool;

pub use code::{rewrite_code, CodeBody, CodeEdit, ExceptionHandler};
pub use descriptor::{parse_field_descriptor, parse_method_descriptor, JType, MethodDescriptor};
pub use insn::Insn;
pub use pool::{Constant, ConstantPool, PoolBuilder};

use bytes::{Reader, WriteBytes};
use thiserror::Error;

pub const MAGIC: u32 = 0xCAFE_BABE;
/// Oldest accepted class-file major version (JDK 1.0.2).
pub const MIN_SUPPORTED_MAJOR: u16 = 45;
/// Newest accepted class-file major version (Java 25).
pub const MAX_SUPPORTED_MAJOR: u16 = 69;

#[derive(Debug, Error)]
pub enum ClassFileError {
    #[error("bad magic: expected 0xCAFEBABE")]
    MagicMismatch,
    #[error("unsupported class-file major version {major}")]
    UnsupportedVersion { major: u16 },
    #[error("input ends early at byte {at}")]
    Truncated { at: usize },
    #[error("malformed constant pool at index {index}: {reason}")]
    MalformedPool { index: u16, reason: String },
    #[error("constant pool would exceed 65535 slots")]
    OverflowPool,
    #[error("branch offset out of range after rewrite at {at}")]
    OffsetOverflow { at: u32 },
    #[error("edit target {at} is not an instruction start")]
    EditTargetNotInstructionStart { at: u32 },
    #[error("bad method or field descriptor: {descriptor}")]
    BadDescriptor { descriptor: String },
    #[error("unknown or misplaced opcode 0x{opcode:02x} at offset {at}")]
    BadOpcode { opcode: u8, at: u32 },
    #[error("branch target {target} is not an instruction start")]
    BadBranchTarget { target: u32 },
    #[error("trailing bytes after class structure ({count} bytes)")]
    TrailingBytes { count: usize },
}

/// Class, field, method, and interface access flags.
pub mod flags {
    pub const ACC_PUBLIC: u16 = 0x0001;
    pub const ACC_PRIVATE: u16 = 0x0002;
    pub const ACC_PROTECTED: u16 = 0x0004;
    pub const ACC_STATIC: u16 = 0x0008;
    pub const ACC_FINAL: u16 = 0x0010;
    pub const ACC_SUPER: u16 = 0x0020;
    pub const ACC_SYNCHRONIZED: u16 = 0x0020;
    pub const ACC_VOLATILE: u16 = 0x0040;
    pub const ACC_BRIDGE: u16 = 0x0040;
    pub const ACC_TRANSIENT: u16 = 0x0080;
    pub const ACC_VARARGS: u16 = 0x0080;
    pub const ACC_NATIVE: u16 = 0x0100;
    pub const ACC_INTERFACE: u16 = 0x0200;
    pub const ACC_ABSTRACT: u16 = 0x0400;
    pub const ACC_STRICT: u16 = 0x0800;
    pub const ACC_SYNTHETIC: u16 = 0x1000;
    pub const ACC_ANNOTATION: u16 = 0x2000;
    pub const ACC_ENUM: u16 = 0x4000;
    pub const ACC_MODULE: u16 = 0x8000;
}

/// Class-level, field-level, or method-level attribute.
#[derive(Debug, Clone, PartialEq)]
pub enum Attribute {
    /// Decoded Code attribute (methods only).
    Code { name_index: u16, body: CodeBody },
    /// Any other attribute, preserved verbatim.
    Opaque { name_index: u16, data: Vec<u8> },
}

impl Attribute {
    pub fn name_index(&self) -> u16 {
        match self {
            Attribute::Code { name_index, .. } => *name_index,
            Attribute::Opaque { name_index, .. } => *name_index,
        }
    }
}

/// A field or method.
#[derive(Debug, Clone, PartialEq)]
pub struct MemberInfo {
    pub access_flags: u16,
    pub name_index: u16,
    pub descriptor_index: u16,
    pub attributes: Vec<Attribute>,
}

impl MemberInfo {
    pub fn name(&self, pool: &ConstantPool) -> Result<String, ClassFileError> {
        pool.utf8_str(self.name_index)
    }

    pub fn descriptor(&self, pool: &ConstantPool) -> Result<String, ClassFileError> {
        pool.utf8_str(self.descriptor_index)
    }

    pub fn code(&self) -> Option<&CodeBody> {
        self.attributes.iter().find_map(|a| match a {
            Attribute::Code { body, .. } => Some(body),
            _ => None,
        })
    }

    pub fn code_mut(&mut self) -> Option<&mut CodeBody> {
        self.attributes.iter_mut().find_map(|a| match a {
            Attribute::Code { body, .. } => Some(body),
            _ => None,
        })
    }

    pub fn is_static(&self) -> bool {
        self.access_flags & flags::ACC_STATIC != 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassFile {
    pub minor_version: u16,
    pub major_version: u16,
    pub pool: ConstantPool,
    pub access_flags: u16,
    pub this_class: u16,
    pub super_class: u16,
    pub interfaces: Vec<u16>,
    pub fields: Vec<MemberInfo>,
    pub methods: Vec<MemberInfo>,
    pub attributes: Vec<Attribute>,
}

impl ClassFile {
    pub fn class_name(&self) -> Result<String, ClassFileError> {
        self.pool.class_name(self.this_class)
    }

    /// Internal name of the superclass; None for java/lang/Object and modules.
    pub fn super_name(&self) -> Result<Option<String>, ClassFileError> {
        if self.super_class == 0 {
            return Ok(None);
        }
        Ok(Some(self.pool.class_name(self.super_class)?))
    }

    pub fn interface_names(&self) -> Result<Vec<String>, ClassFileError> {
        self.interfaces.iter().map(|i| self.pool.class_name(*i)).collect()
    }

    pub fn is_interface(&self) -> bool {
        self.access_flags & flags::ACC_INTERFACE != 0
    }

    pub fn is_abstract(&self) -> bool {
        self.access_flags & flags::ACC_ABSTRACT != 0
    }

    pub fn is_module(&self) -> bool {
        self.access_flags & flags::ACC_MODULE != 0
    }
}

fn parse_attributes(
    r: &mut Reader,
    pool: &ConstantPool,
    allow_code: bool,
) -> Result<Vec<Attribute>, ClassFileError> {
    let count = r.u2()?;
    let mut attrs = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let name_index = r.u2()?;
        let len = r.u4()? as usize;
        let data = r.take(len)?;
        let name = pool.utf8_str(name_index)?;
        if allow_code && name == "Code" {
            attrs.push(Attribute::Code { name_index, body: CodeBody::parse(data, pool)? });
        } else {
            attrs.push(Attribute::Opaque { name_index, data: data.to_vec() });
        }
    }
    Ok(attrs)
}

fn parse_member(r: &mut Reader, pool: &ConstantPool, is_method: bool) -> Result<MemberInfo, ClassFileError> {
    Ok(MemberInfo {
        access_flags: r.u2()?,
        name_index: r.u2()?,
        descriptor_index: r.u2()?,
        attributes: parse_attributes(r, pool, is_method)?,
    })
}

/// Parses a complete class file.
pub fn parse_class(data: &[u8]) -> Result<ClassFile, ClassFileError> {
    let mut r = Reader::new(data);
    if r.u4()? != MAGIC {
        return Err(ClassFileError::MagicMismatch);
    }
    let minor_version = r.u2()?;
    let major_version = r.u2()?;
    if !(MIN_SUPPORTED_MAJOR..=MAX_SUPPORTED_MAJOR).contains(&major_version) {
        return Err(ClassFileError::UnsupportedVersion { major: major_version });
    }
    let pool = ConstantPool::parse(&mut r)?;
    let access_flags = r.u2()?;
    let this_class = r.u2()?;
    let super_class = r.u2()?;
    let iface_count = r.u2()?;
    let mut interfaces = Vec::with_capacity(iface_count as usize);
    for _ in 0..iface_count {
        interfaces.push(r.u2()?);
    }
    let field_count = r.u2()?;
    let mut fields = Vec::with_capacity(field_count as usize);
    for _ in 0..field_count {
        fields.push(parse_member(&mut r, &pool, false)?);
    }
    let method_count = r.u2()?;
    let mut methods = Vec::with_capacity(method_count as usize);
    for _ in 0..method_count {
        methods.push(parse_member(&mut r, &pool, true)?);
    }
    let attributes = parse_attributes(&mut r, &pool, false)?;
    if r.remaining() != 0 {
        return Err(ClassFileError::TrailingBytes { count: r.remaining() });
    }
    Ok(ClassFile {
        minor_version,
        major_version,
        pool,
        access_flags,
        this_class,
        super_class,
        interfaces,
        fields,
        methods,
        attributes,
    })
}

fn emit_attributes(attrs: &[Attribute], out: &mut Vec<u8>) {
    out.w_u2(attrs.len() as u16);
    for attr in attrs {
        match attr {
            Attribute::Code { name_index, body } => {
                let payload = body.emit_payload();
                out.w_u2(*name_index);
                out.w_u4(payload.len() as u32);
                out.extend_from_slice(&payload);
            }
            Attribute::Opaque { name_index, data } => {
                out.w_u2(*name_index);
                out.w_u4(data.len() as u32);
                out.extend_from_slice(data);
            }
        }
    }
}

fn emit_member(m: &MemberInfo, out: &mut Vec<u8>) {
    out.w_u2(m.access_flags);
    out.w_u2(m.name_index);
    out.w_u2(m.descriptor_index);
    emit_attributes(&m.attributes, out);
}

/// Emits a complete class file. For a class produced by `parse_class` and not
/// modified since, the output is byte-identical to the input.
pub fn emit_class(class: &ClassFile) -> Vec<u8> {
    let mut out = Vec::new();
    out.w_u4(MAGIC);
    out.w_u2(class.minor_version);
    out.w_u2(class.major_version);
    class.pool.emit(&mut out);
    out.w_u2(class.access_flags);
    out.w_u2(class.this_class);
    out.w_u2(class.super_class);
    out.w_u2(class.interfaces.len() as u16);
    for i in &class.interfaces {
        out.w_u2(*i);
    }
    out.w_u2(class.fields.len() as u16);
    for f in &class.fields {
        emit_member(f, &mut out);
    }
    out.w_u2(class.methods.len() as u16);
    for m in &class.methods {
        emit_member(m, &mut out);
    }
    emit_attributes(&class.attributes, &mut out);
    out
}
