//! Field and method descriptor parsing.

use super::ClassFileError;

/// One parsed parameter or return type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JType {
    Byte,
    Char,
    Double,
    Float,
    Int,
    Long,
    Short,
    Boolean,
    Void,
    /// Object type with internal name (no `L`/`;` framing).
    Object(String),
    /// Array with element type and dimension count.
    Array(Box<JType>, u8),
}

impl JType {
    /// Operand-stack width in slots. Void is zero, long/double are two.
    pub fn slots(&self) -> u16 {
        match self {
            JType::Void => 0,
            JType::Long | JType::Double => 2,
            _ => 1,
        }
    }
}

/// Parsed method descriptor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDescriptor {
    pub params: Vec<JType>,
    pub ret: JType,
}

impl MethodDescriptor {
    pub fn arg_slots(&self) -> u16 {
        self.params.iter().map(JType::slots).sum()
    }

    pub fn ret_slots(&self) -> u16 {
        self.ret.slots()
    }
}

fn bad(descriptor: &str) -> ClassFileError {
    ClassFileError::BadDescriptor { descriptor: descriptor.to_string() }
}

fn parse_one(chars: &mut std::str::Chars, whole: &str) -> Result<JType, ClassFileError> {
    let mut dims: u8 = 0;
    loop {
        let c = chars.next().ok_or_else(|| bad(whole))?;
        let base = match c {
            'B' => JType::Byte,
            'C' => JType::Char,
            'D' => JType::Double,
            'F' => JType::Float,
            'I' => JType::Int,
            'J' => JType::Long,
            'S' => JType::Short,
            'Z' => JType::Boolean,
            'V' => JType::Void,
            'L' => {
                let mut name = String::new();
                loop {
                    match chars.next() {
                        Some(';') => break,
                        Some(c) => name.push(c),
                        None => return Err(bad(whole)),
                    }
                }
                if name.is_empty() {
                    return Err(bad(whole));
                }
                JType::Object(name)
            }
            '[' => {
                // u8 overflow enforces the 255-dimension ceiling.
                dims = dims.checked_add(1).ok_or_else(|| bad(whole))?;
                continue;
            }
            _ => return Err(bad(whole)),
        };
        if dims > 0 {
            if base == JType::Void {
                return Err(bad(whole));
            }
            return Ok(JType::Array(Box::new(base), dims));
        }
        return Ok(base);
    }
}

/// Parses a field descriptor such as `Ljava/lang/String;` or `[I`.
pub fn parse_field_descriptor(descriptor: &str) -> Result<JType, ClassFileError> {
    let mut chars = descriptor.chars();
    let t = parse_one(&mut chars, descriptor)?;
    if t == JType::Void || chars.next().is_some() {
        return Err(bad(descriptor));
    }
    Ok(t)
}

/// Parses a method descriptor such as `(Ljava/lang/Object;I)V`.
pub fn parse_method_descriptor(descriptor: &str) -> Result<MethodDescriptor, ClassFileError> {
    let mut chars = descriptor.chars();
    if chars.next() != Some('(') {
        return Err(bad(descriptor));
    }
    let mut params = Vec::new();
    loop {
        let rest = chars.as_str();
        if let Some(stripped) = rest.strip_prefix(')') {
            let mut ret_chars = stripped.chars();
            let ret = parse_one(&mut ret_chars, descriptor)?;
            if ret_chars.next().is_some() {
                return Err(bad(descriptor));
            }
            return Ok(MethodDescriptor { params, ret });
        }
        if rest.is_empty() {
            return Err(bad(descriptor));
        }
        let t = parse_one(&mut chars, descriptor)?;
        if t == JType::Void {
            return Err(bad(descriptor));
        }
        params.push(t);
    }
}

/// Slot width of a field descriptor (2 for J/D, otherwise 1).
pub fn field_slots(descriptor: &str) -> Result<u16, ClassFileError> {
    Ok(parse_field_descriptor(descriptor)?.slots())
}
