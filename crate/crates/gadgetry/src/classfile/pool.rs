//! Constant pool model: 1-indexed, with Long/Double entries occupying two slots.
//!
//! Utf8 payloads are kept as raw bytes (modified UTF-8 is never re-encoded), so
//! emission is byte-exact even for payloads that are not valid UTF-8.

use super::bytes::{Reader, WriteBytes};
use super::ClassFileError;
use std::collections::HashMap;

pub const TAG_UTF8: u8 = 1;
pub const TAG_INTEGER: u8 = 3;
pub const TAG_FLOAT: u8 = 4;
pub const TAG_LONG: u8 = 5;
pub const TAG_DOUBLE: u8 = 6;
pub const TAG_CLASS: u8 = 7;
pub const TAG_STRING: u8 = 8;
pub const TAG_FIELDREF: u8 = 9;
pub const TAG_METHODREF: u8 = 10;
pub const TAG_INTERFACE_METHODREF: u8 = 11;
pub const TAG_NAME_AND_TYPE: u8 = 12;
pub const TAG_METHOD_HANDLE: u8 = 15;
pub const TAG_METHOD_TYPE: u8 = 16;
pub const TAG_DYNAMIC: u8 = 17;
pub const TAG_INVOKE_DYNAMIC: u8 = 18;
pub const TAG_MODULE: u8 = 19;
pub const TAG_PACKAGE: u8 = 20;

/// One constant-pool entry. Numeric payloads are stored as raw bit patterns so
/// NaN floats and every other value round-trip exactly.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Constant {
    Utf8(Vec<u8>),
    Integer(i32),
    Float(u32),
    Long(i64),
    Double(u64),
    Class { name_index: u16 },
    String { string_index: u16 },
    Fieldref { class_index: u16, name_and_type_index: u16 },
    Methodref { class_index: u16, name_and_type_index: u16 },
    InterfaceMethodref { class_index: u16, name_and_type_index: u16 },
    NameAndType { name_index: u16, descriptor_index: u16 },
    MethodHandle { reference_kind: u8, reference_index: u16 },
    MethodType { descriptor_index: u16 },
    Dynamic { bootstrap_method_attr_index: u16, name_and_type_index: u16 },
    InvokeDynamic { bootstrap_method_attr_index: u16, name_and_type_index: u16 },
    Module { name_index: u16 },
    Package { name_index: u16 },
}

impl Constant {
    /// True for entries that occupy two pool slots.
    pub fn is_wide(&self) -> bool {
        matches!(self, Constant::Long(_) | Constant::Double(_))
    }
}

/// Pool slot: index 0 and the slot after each Long/Double hold no entry.
#[derive(Debug, Clone, PartialEq)]
enum Slot {
    Unused,
    Entry(Constant),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConstantPool {
    slots: Vec<Slot>,
}

impl ConstantPool {
    pub fn new() -> Self {
        ConstantPool { slots: vec![Slot::Unused] }
    }

    /// Declared pool count (number of slots, including index 0).
    pub fn count(&self) -> usize {
        self.slots.len()
    }

    pub fn get(&self, index: u16) -> Result<&Constant, ClassFileError> {
        match self.slots.get(index as usize) {
            Some(Slot::Entry(c)) => Ok(c),
            _ => Err(ClassFileError::MalformedPool {
                index,
                reason: "no entry at index".into(),
            }),
        }
    }

    /// Entry lookup that tolerates absence; used by scans over arbitrary indices.
    pub fn try_get(&self, index: u16) -> Option<&Constant> {
        match self.slots.get(index as usize) {
            Some(Slot::Entry(c)) => Some(c),
            _ => None,
        }
    }

    pub fn utf8(&self, index: u16) -> Result<&[u8], ClassFileError> {
        match self.get(index)? {
            Constant::Utf8(bytes) => Ok(bytes),
            _ => Err(ClassFileError::MalformedPool {
                index,
                reason: "expected Utf8".into(),
            }),
        }
    }

    /// Utf8 entry decoded for name handling. Internal names and descriptors
    /// are ASCII in practice; non-UTF-8 payloads decode lossily.
    pub fn utf8_str(&self, index: u16) -> Result<String, ClassFileError> {
        Ok(String::from_utf8_lossy(self.utf8(index)?).into_owned())
    }

    /// Resolves a Class entry to its internal name.
    pub fn class_name(&self, index: u16) -> Result<String, ClassFileError> {
        match self.get(index)? {
            Constant::Class { name_index } => self.utf8_str(*name_index),
            _ => Err(ClassFileError::MalformedPool {
                index,
                reason: "expected Class".into(),
            }),
        }
    }

    /// Resolves a Fieldref/Methodref/InterfaceMethodref to (owner, name, descriptor).
    pub fn member_ref(&self, index: u16) -> Result<(String, String, String), ClassFileError> {
        let (class_index, nat_index) = match self.get(index)? {
            Constant::Fieldref { class_index, name_and_type_index }
            | Constant::Methodref { class_index, name_and_type_index }
            | Constant::InterfaceMethodref { class_index, name_and_type_index } => {
                (*class_index, *name_and_type_index)
            }
            _ => {
                return Err(ClassFileError::MalformedPool {
                    index,
                    reason: "expected member reference".into(),
                })
            }
        };
        let owner = self.class_name(class_index)?;
        let (name, descriptor) = self.name_and_type(nat_index)?;
        Ok((owner, name, descriptor))
    }

    pub fn name_and_type(&self, index: u16) -> Result<(String, String), ClassFileError> {
        match self.get(index)? {
            Constant::NameAndType { name_index, descriptor_index } => {
                Ok((self.utf8_str(*name_index)?, self.utf8_str(*descriptor_index)?))
            }
            _ => Err(ClassFileError::MalformedPool {
                index,
                reason: "expected NameAndType".into(),
            }),
        }
    }

    pub fn iter_entries(&self) -> impl Iterator<Item = (u16, &Constant)> {
        self.slots.iter().enumerate().filter_map(|(i, s)| match s {
            Slot::Entry(c) => Some((i as u16, c)),
            Slot::Unused => None,
        })
    }

    pub(crate) fn parse(r: &mut Reader) -> Result<Self, ClassFileError> {
        let count = r.u2()? as usize;
        if count == 0 {
            return Err(ClassFileError::MalformedPool {
                index: 0,
                reason: "pool count must be at least 1".into(),
            });
        }
        let mut slots = Vec::with_capacity(count);
        slots.push(Slot::Unused);
        while slots.len() < count {
            let index = slots.len() as u16;
            let tag = r.u1()?;
            let entry = match tag {
                TAG_UTF8 => {
                    let len = r.u2()? as usize;
                    Constant::Utf8(r.take(len)?.to_vec())
                }
                TAG_INTEGER => Constant::Integer(r.i4()?),
                TAG_FLOAT => Constant::Float(r.u4()?),
                TAG_LONG => Constant::Long(r.u8_()? as i64),
                TAG_DOUBLE => Constant::Double(r.u8_()?),
                TAG_CLASS => Constant::Class { name_index: r.u2()? },
                TAG_STRING => Constant::String { string_index: r.u2()? },
                TAG_FIELDREF => Constant::Fieldref {
                    class_index: r.u2()?,
                    name_and_type_index: r.u2()?,
                },
                TAG_METHODREF => Constant::Methodref {
                    class_index: r.u2()?,
                    name_and_type_index: r.u2()?,
                },
                TAG_INTERFACE_METHODREF => Constant::InterfaceMethodref {
                    class_index: r.u2()?,
                    name_and_type_index: r.u2()?,
                },
                TAG_NAME_AND_TYPE => Constant::NameAndType {
                    name_index: r.u2()?,
                    descriptor_index: r.u2()?,
                },
                TAG_METHOD_HANDLE => Constant::MethodHandle {
                    reference_kind: r.u1()?,
                    reference_index: r.u2()?,
                },
                TAG_METHOD_TYPE => Constant::MethodType { descriptor_index: r.u2()? },
                TAG_DYNAMIC => Constant::Dynamic {
                    bootstrap_method_attr_index: r.u2()?,
                    name_and_type_index: r.u2()?,
                },
                TAG_INVOKE_DYNAMIC => Constant::InvokeDynamic {
                    bootstrap_method_attr_index: r.u2()?,
                    name_and_type_index: r.u2()?,
                },
                TAG_MODULE => Constant::Module { name_index: r.u2()? },
                TAG_PACKAGE => Constant::Package { name_index: r.u2()? },
                other => {
                    return Err(ClassFileError::MalformedPool {
                        index,
                        reason: format!("unknown constant tag {other}"),
                    })
                }
            };
            let wide = entry.is_wide();
            slots.push(Slot::Entry(entry));
            if wide {
                if slots.len() >= count {
                    return Err(ClassFileError::MalformedPool {
                        index,
                        reason: "wide constant overruns pool count".into(),
                    });
                }
                slots.push(Slot::Unused);
            }
        }
        Ok(ConstantPool { slots })
    }

    pub(crate) fn emit(&self, out: &mut Vec<u8>) {
        out.w_u2(self.slots.len() as u16);
        for slot in &self.slots {
            let c = match slot {
                Slot::Unused => continue,
                Slot::Entry(c) => c,
            };
            match c {
                Constant::Utf8(bytes) => {
                    out.w_u1(TAG_UTF8);
                    out.w_u2(bytes.len() as u16);
                    out.extend_from_slice(bytes);
                }
                Constant::Integer(v) => {
                    out.w_u1(TAG_INTEGER);
                    out.w_i4(*v);
                }
                Constant::Float(v) => {
                    out.w_u1(TAG_FLOAT);
                    out.w_u4(*v);
                }
                Constant::Long(v) => {
                    out.w_u1(TAG_LONG);
                    out.w_u8(*v as u64);
                }
                Constant::Double(v) => {
                    out.w_u1(TAG_DOUBLE);
                    out.w_u8(*v);
                }
                Constant::Class { name_index } => {
                    out.w_u1(TAG_CLASS);
                    out.w_u2(*name_index);
                }
                Constant::String { string_index } => {
                    out.w_u1(TAG_STRING);
                    out.w_u2(*string_index);
                }
                Constant::Fieldref { class_index, name_and_type_index } => {
                    out.w_u1(TAG_FIELDREF);
                    out.w_u2(*class_index);
                    out.w_u2(*name_and_type_index);
                }
                Constant::Methodref { class_index, name_and_type_index } => {
                    out.w_u1(TAG_METHODREF);
                    out.w_u2(*class_index);
                    out.w_u2(*name_and_type_index);
                }
                Constant::InterfaceMethodref { class_index, name_and_type_index } => {
                    out.w_u1(TAG_INTERFACE_METHODREF);
                    out.w_u2(*class_index);
                    out.w_u2(*name_and_type_index);
                }
                Constant::NameAndType { name_index, descriptor_index } => {
                    out.w_u1(TAG_NAME_AND_TYPE);
                    out.w_u2(*name_index);
                    out.w_u2(*descriptor_index);
                }
                Constant::MethodHandle { reference_kind, reference_index } => {
                    out.w_u1(TAG_METHOD_HANDLE);
                    out.w_u1(*reference_kind);
                    out.w_u2(*reference_index);
                }
                Constant::MethodType { descriptor_index } => {
                    out.w_u1(TAG_METHOD_TYPE);
                    out.w_u2(*descriptor_index);
                }
                Constant::Dynamic { bootstrap_method_attr_index, name_and_type_index } => {
                    out.w_u1(TAG_DYNAMIC);
                    out.w_u2(*bootstrap_method_attr_index);
                    out.w_u2(*name_and_type_index);
                }
                Constant::InvokeDynamic { bootstrap_method_attr_index, name_and_type_index } => {
                    out.w_u1(TAG_INVOKE_DYNAMIC);
                    out.w_u2(*bootstrap_method_attr_index);
                    out.w_u2(*name_and_type_index);
                }
                Constant::Module { name_index } => {
                    out.w_u1(TAG_MODULE);
                    out.w_u2(*name_index);
                }
                Constant::Package { name_index } => {
                    out.w_u1(TAG_PACKAGE);
                    out.w_u2(*name_index);
                }
            }
        }
    }
}

/// Deduplicating writer over a constant pool. Existing entries are indexed on
/// construction so injected references reuse what the class already declares.
pub struct PoolBuilder {
    pool: ConstantPool,
    index: HashMap<Constant, u16>,
}

impl PoolBuilder {
    pub fn new() -> Self {
        PoolBuilder::from_pool(ConstantPool::new())
    }

    pub fn from_pool(pool: ConstantPool) -> Self {
        let mut index = HashMap::new();
        for (i, c) in pool.iter_entries() {
            index.entry(c.clone()).or_insert(i);
        }
        PoolBuilder { pool, index }
    }

    pub fn into_pool(self) -> ConstantPool {
        self.pool
    }

    pub fn pool(&self) -> &ConstantPool {
        &self.pool
    }

    pub fn push(&mut self, c: Constant) -> Result<u16, ClassFileError> {
        if let Some(&i) = self.index.get(&c) {
            return Ok(i);
        }
        let at = self.pool.slots.len();
        let extra = if c.is_wide() { 2 } else { 1 };
        if at + extra > u16::MAX as usize + 1 {
            return Err(ClassFileError::OverflowPool);
        }
        let wide = c.is_wide();
        self.index.insert(c.clone(), at as u16);
        self.pool.slots.push(Slot::Entry(c));
        if wide {
            self.pool.slots.push(Slot::Unused);
        }
        Ok(at as u16)
    }

    pub fn utf8(&mut self, s: &str) -> Result<u16, ClassFileError> {
        self.push(Constant::Utf8(s.as_bytes().to_vec()))
    }

    pub fn class(&mut self, internal_name: &str) -> Result<u16, ClassFileError> {
        let name_index = self.utf8(internal_name)?;
        self.push(Constant::Class { name_index })
    }

    pub fn string(&mut self, value: &str) -> Result<u16, ClassFileError> {
        let string_index = self.utf8(value)?;
        self.push(Constant::String { string_index })
    }

    pub fn name_and_type(&mut self, name: &str, descriptor: &str) -> Result<u16, ClassFileError> {
        let name_index = self.utf8(name)?;
        let descriptor_index = self.utf8(descriptor)?;
        self.push(Constant::NameAndType { name_index, descriptor_index })
    }

    pub fn fieldref(&mut self, owner: &str, name: &str, descriptor: &str) -> Result<u16, ClassFileError> {
        let class_index = self.class(owner)?;
        let name_and_type_index = self.name_and_type(name, descriptor)?;
        self.push(Constant::Fieldref { class_index, name_and_type_index })
    }

    pub fn methodref(&mut self, owner: &str, name: &str, descriptor: &str) -> Result<u16, ClassFileError> {
        let class_index = self.class(owner)?;
        let name_and_type_index = self.name_and_type(name, descriptor)?;
        self.push(Constant::Methodref { class_index, name_and_type_index })
    }

    pub fn interface_methodref(
        &mut self,
        owner: &str,
        name: &str,
        descriptor: &str,
    ) -> Result<u16, ClassFileError> {
        let class_index = self.class(owner)?;
        let name_and_type_index = self.name_and_type(name, descriptor)?;
        self.push(Constant::InterfaceMethodref { class_index, name_and_type_index })
    }
}

impl Default for PoolBuilder {
    fn default() -> Self {
        PoolBuilder::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn long_occupies_two_slots() {
        let mut b = PoolBuilder::new();
        let i1 = b.push(Constant::Long(7)).unwrap();
        let i2 = b.utf8("after").unwrap();
        assert_eq!(i1, 1);
        assert_eq!(i2, 3);
        let pool = b.into_pool();
        assert_eq!(pool.count(), 4);
        assert!(pool.get(2).is_err());
    }

    #[test]
    fn builder_dedups_structurally() {
        let mut b = PoolBuilder::new();
        let a = b.methodref("java/lang/Object", "<init>", "()V").unwrap();
        let c = b.methodref("java/lang/Object", "<init>", "()V").unwrap();
        assert_eq!(a, c);
        let utf_count = b
            .pool()
            .iter_entries()
            .filter(|(_, c)| matches!(c, Constant::Utf8(_)))
            .count();
        assert_eq!(utf_count, 3);
    }

    #[test]
    fn builder_reuses_preexisting_entries() {
        let mut b = PoolBuilder::new();
        b.utf8("java/io/Serializable").unwrap();
        let pool = b.into_pool();
        let before = pool.count();
        let mut b2 = PoolBuilder::from_pool(pool);
        b2.utf8("java/io/Serializable").unwrap();
        assert_eq!(b2.pool().count(), before);
    }

    #[test]
    fn float_bits_roundtrip_exactly() {
        let nan_bits = 0x7fc0_1234u32;
        let mut b = PoolBuilder::new();
        b.push(Constant::Float(nan_bits)).unwrap();
        let pool = b.into_pool();
        let mut out = Vec::new();
        pool.emit(&mut out);
        let mut r = Reader::new(&out);
        let parsed = ConstantPool::parse(&mut r).unwrap();
        assert_eq!(parsed.get(1).unwrap(), &Constant::Float(nan_bits));
    }
}
